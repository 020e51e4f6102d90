use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::manifold::{Layout, ManifoldKind, QuadratureGrid};
use crate::{Error, Result};

/// Relative norm below which a Gram–Schmidt residual counts as dependent.
const RANK_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trig {
    Const,
    Sin,
    Cos,
}

/// Real trigonometric mode `trig(2π k·m/res)` on lattice coordinates `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mode {
    pub freq: [i64; 3],
    pub trig: Trig,
}

/// The first `n` real Fourier modes in order of `|k|²`, then lexicographic
/// order of `k`, with `sin` before `cos` at each frequency.
pub fn fourier_modes(d: usize, n: usize) -> Vec<Mode> {
    let mut reach = 1i64;
    loop {
        let span = |j: usize| if j < d { -reach..=reach } else { 0..=0 };
        let mut ks: Vec<[i64; 3]> = Vec::new();
        for a in span(0) {
            for b in span(1) {
                for c in span(2) {
                    let k = [a, b, c];
                    // One representative of each ±k pair.
                    if k.iter().find(|&&v| v != 0).is_some_and(|&v| v > 0) {
                        ks.push(k);
                    }
                }
            }
        }
        let norm = |k: &[i64; 3]| k.iter().map(|v| v * v).sum::<i64>();
        ks.sort_by(|x, y| norm(x).cmp(&norm(y)).then(x.cmp(y)));
        let mut modes = vec![Mode {
            freq: [0; 3],
            trig: Trig::Const,
        }];
        for k in &ks {
            modes.push(Mode {
                freq: *k,
                trig: Trig::Sin,
            });
            modes.push(Mode {
                freq: *k,
                trig: Trig::Cos,
            });
        }
        modes.truncate(n);
        // Every vector of squared norm ≤ reach² is in the box, so the order
        // is final once the last kept mode lies inside that ball.
        if modes.len() == n && modes.last().is_some_and(|m| norm(&m.freq) <= reach * reach) {
            return modes;
        }
        reach += 1;
    }
}

/// Orthonormal trigonometric basis on a lattice, evaluated through a single
/// table of `e^{2πij/res}`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct FourierBasis {
    pub modes: Vec<Mode>,
    d: usize,
    res: usize,
    /// `1/√vol` and `√(2/vol)`.
    scale0: f64,
    scale1: f64,
    table: Vec<(f64, f64)>,
}

impl FourierBasis {
    pub fn new(grid: &QuadratureGrid, n: usize) -> Result<Self> {
        let Layout::Lattice { res, .. } = *grid.layout() else {
            return Err(Error::invalid(
                "class",
                "Fourier modes need a torus lattice",
            ));
        };
        let m = grid.manifold();
        let modes = fourier_modes(m.d, n);
        let top = modes
            .iter()
            .flat_map(|md| md.freq.iter().map(|v| v.unsigned_abs() as usize))
            .max()
            .unwrap_or(0);
        if 2 * top >= res {
            return Err(Error::GridTooCoarse(format!(
                "frequency {top} needs more than {res} points per axis"
            )));
        }
        let table = (0..res)
            .map(|j| {
                let a = 2.0 * std::f64::consts::PI * j as f64 / res as f64;
                (a.cos(), a.sin())
            })
            .collect();
        Ok(Self {
            modes,
            d: m.d,
            res,
            scale0: 1.0 / m.vol.sqrt(),
            scale1: (2.0 / m.vol).sqrt(),
            table,
        })
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    /// `(cos, sin)` of `2π k·c/res`.
    pub fn phase(&self, k: &[i64; 3], c: &[i64; 3]) -> (f64, f64) {
        let mut s = 0i64;
        for j in 0..self.d {
            s += k[j] * c[j];
        }
        self.table[s.rem_euclid(self.res as i64) as usize]
    }

    /// Value of a normalized mode given the phase at that point.
    pub fn mode_value(&self, mode: &Mode, (c, s): (f64, f64)) -> f64 {
        match mode.trig {
            Trig::Const => self.scale0,
            Trig::Cos => self.scale1 * c,
            Trig::Sin => self.scale1 * s,
        }
    }

    pub fn sup_norm(&self, mode: &Mode) -> f64 {
        match mode.trig {
            Trig::Const => self.scale0,
            _ => self.scale1,
        }
    }

    /// Normalized mode coefficient from the complex sum `Σ f e^{iθ·m}`.
    pub fn from_sum(&self, mode: &Mode, (re, im): (f64, f64)) -> f64 {
        match mode.trig {
            Trig::Const => self.scale0 * re,
            Trig::Cos => self.scale1 * re,
            Trig::Sin => self.scale1 * im,
        }
    }
}

fn lattice_coords(grid: &QuadratureGrid, i: usize) -> [i64; 3] {
    let c = grid.coords(i);
    [c[0] as i64, c[1] as i64, c[2] as i64]
}

/// A finite-dimensional approximation space, stored so that coefficients
/// and evaluations are cheap.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Basis {
    Fourier(FourierBasis),
    /// Orthonormal fields.
    Dense(Vec<Vec<f64>>),
    Cells(CellPartition),
    Zero,
}

impl Basis {
    pub fn dim(&self) -> usize {
        match self {
            Basis::Fourier(f) => f.len(),
            Basis::Dense(v) => v.len(),
            Basis::Cells(c) => c.len(),
            Basis::Zero => 0,
        }
    }

    /// Orthonormal coefficients `w Σ f b_k` of a span basis.
    pub fn coefficients(&self, grid: &QuadratureGrid, f: &[f64]) -> Vec<f64> {
        let w = grid.weight();
        match self {
            Basis::Fourier(fb) => {
                let mut acc = vec![(0.0, 0.0); fb.len()];
                for (i, &v) in f.iter().enumerate() {
                    if v == 0.0 {
                        continue;
                    }
                    let c = lattice_coords(grid, i);
                    for (a, md) in acc.iter_mut().zip(&fb.modes) {
                        let (co, si) = fb.phase(&md.freq, &c);
                        a.0 += v * co;
                        a.1 += v * si;
                    }
                }
                acc.iter()
                    .zip(&fb.modes)
                    .map(|(&s, md)| w * fb.from_sum(md, s))
                    .collect()
            }
            Basis::Dense(fields) => fields
                .iter()
                .map(|b| w * b.iter().zip(f).map(|(x, y)| x * y).sum::<f64>())
                .collect(),
            Basis::Cells(_) | Basis::Zero => Vec::new(),
        }
    }

    /// `Σ c_k b_k` on the grid.
    pub fn evaluate(&self, grid: &QuadratureGrid, coeffs: &[f64]) -> Vec<f64> {
        let n = grid.n_points();
        match self {
            Basis::Fourier(fb) => (0..n)
                .map(|i| {
                    let c = lattice_coords(grid, i);
                    fb.modes
                        .iter()
                        .zip(coeffs)
                        .map(|(md, a)| a * fb.mode_value(md, fb.phase(&md.freq, &c)))
                        .sum()
                })
                .collect(),
            Basis::Dense(fields) => {
                let mut out = vec![0.0; n];
                for (b, a) in fields.iter().zip(coeffs) {
                    for (o, x) in out.iter_mut().zip(b) {
                        *o += a * x;
                    }
                }
                out
            }
            Basis::Cells(_) | Basis::Zero => vec![0.0; n],
        }
    }

    /// Basis values at one grid point.
    pub fn point_values(&self, grid: &QuadratureGrid, i: usize) -> Vec<f64> {
        match self {
            Basis::Fourier(fb) => {
                let c = lattice_coords(grid, i);
                fb.modes
                    .iter()
                    .map(|md| fb.mode_value(md, fb.phase(&md.freq, &c)))
                    .collect()
            }
            Basis::Dense(fields) => fields.iter().map(|b| b[i]).collect(),
            Basis::Cells(_) | Basis::Zero => Vec::new(),
        }
    }
}

/// Modified Gram–Schmidt in the quadrature inner product. Fields whose
/// residual falls below the rank tolerance are dropped; at most `limit` are
/// kept.
pub(crate) fn orthonormalize(
    grid: &QuadratureGrid,
    fields: impl IntoIterator<Item = Vec<f64>>,
    limit: usize,
) -> Vec<Vec<f64>> {
    let w = grid.weight();
    let dot = |a: &[f64], b: &[f64]| w * a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut out: Vec<Vec<f64>> = Vec::new();
    for mut f in fields {
        if out.len() == limit {
            break;
        }
        let start = dot(&f, &f).sqrt();
        if start == 0.0 {
            continue;
        }
        // Two passes keep the basis orthogonal to rounding level.
        for _ in 0..2 {
            for b in &out {
                let c = dot(&f, b);
                for (x, y) in f.iter_mut().zip(b) {
                    *x -= c * y;
                }
            }
        }
        let norm = dot(&f, &f).sqrt();
        if norm > RANK_TOL * start {
            f.iter_mut().for_each(|x| *x /= norm);
            out.push(f);
        }
    }
    out
}

/// Monomials `x^a y^b z^c` on the sphere by total degree, orthonormalized;
/// monomials dependent through `x²+y²+z² = R²` drop out.
pub(crate) fn sphere_monomials(grid: &QuadratureGrid, n: usize) -> Result<Vec<Vec<f64>>> {
    const MAX_DEGREE: u32 = 40;
    let r = grid.manifold().scale;
    let points: Vec<[f64; 3]> = (0..grid.n_points())
        .map(|i| {
            let p = grid.point(i);
            [p[0] / r, p[1] / r, p[2] / r]
        })
        .collect();
    let exps = (0..=MAX_DEGREE).flat_map(|deg| {
        (0..=deg)
            .rev()
            .flat_map(move |a| (0..=deg - a).rev().map(move |b| (a, b, deg - a - b)))
    });
    let fields = exps.map(|(a, b, c)| {
        points
            .iter()
            .map(|p| p[0].powi(a as i32) * p[1].powi(b as i32) * p[2].powi(c as i32))
            .collect::<Vec<f64>>()
    });
    let out = orthonormalize(grid, fields, n);
    if out.len() < n {
        return Err(Error::RankDeficient(format!(
            "only {} independent monomials on this grid",
            out.len()
        )));
    }
    Ok(out)
}

/// `n` random combinations of the first `2n + 1` Fourier modes,
/// orthonormalized.
pub(crate) fn random_smooth(grid: &QuadratureGrid, n: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    let fb = FourierBasis::new(grid, 2 * n + 1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let basis = Basis::Fourier(fb);
    let fields: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let c: Vec<f64> = (0..basis.dim())
                .map(|_| StandardNormal.sample(&mut rng))
                .collect();
            basis.evaluate(grid, &c)
        })
        .collect();
    let out = orthonormalize(grid, fields, n);
    if out.len() < n {
        return Err(Error::RankDeficient(format!(
            "random span has rank {}",
            out.len()
        )));
    }
    Ok(out)
}

/// Voronoi cells of `n` centers chosen by farthest-point sampling from a
/// coarse subset of the grid. Ties go to the lowest center index.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct CellPartition {
    pub centers: Vec<usize>,
    pub locator: Locator,
    /// Grid points per cell.
    pub counts: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Locator {
    Lattice {
        res: i64,
        d: usize,
        centers: Vec<[i64; 3]>,
        side: i64,
        per_axis: i64,
        candidates: Vec<Vec<u32>>,
    },
    BruteForce,
}

impl CellPartition {
    pub fn new(grid: &QuadratureGrid, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n", "need at least one cell"));
        }
        let coarse = coarse_subset(grid, n);
        if coarse.len() < n {
            return Err(Error::GridTooCoarse(format!(
                "{} coarse points for {n} cells",
                coarse.len()
            )));
        }
        let centers = farthest_points(grid, &coarse, n);
        let locator = match grid.layout() {
            Layout::Lattice { res, .. } => lattice_locator(grid, *res, &centers),
            Layout::Fibonacci { .. } => Locator::BruteForce,
        };
        let mut part = CellPartition {
            centers,
            locator,
            counts: Vec::new(),
        };
        part.counts = part.count_cells(grid);
        Ok(part)
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    /// Cell of grid point `i`.
    pub fn cell_of(&self, grid: &QuadratureGrid, i: usize) -> usize {
        match &self.locator {
            Locator::Lattice {
                res,
                d,
                centers,
                side,
                per_axis,
                candidates,
            } => {
                let c = lattice_coords(grid, i);
                let mut b = 0i64;
                for j in (0..*d).rev() {
                    b = b * per_axis + c[j] / side;
                }
                nearest_among(&candidates[b as usize], centers, &c, *res, *d)
            }
            Locator::BruteForce => {
                let mut best = 0;
                let mut bd = f64::INFINITY;
                for (k, &cz) in self.centers.iter().enumerate() {
                    let dist = grid.distance(cz, i);
                    if dist < bd {
                        bd = dist;
                        best = k;
                    }
                }
                best
            }
        }
    }

    fn count_cells(&self, grid: &QuadratureGrid) -> Vec<u64> {
        let mut counts = vec![0u64; self.len()];
        match &self.locator {
            Locator::Lattice {
                res,
                d,
                centers,
                side,
                per_axis,
                candidates,
            } => {
                let extent = |b: i64| (b * side, ((b + 1) * side).min(*res));
                for (bi, cands) in candidates.iter().enumerate() {
                    let mut rest = bi as i64;
                    let mut ranges = [(0i64, 1i64); 3];
                    for r in ranges.iter_mut().take(*d) {
                        *r = extent(rest % per_axis);
                        rest /= per_axis;
                    }
                    if cands.len() == 1 {
                        let size: i64 = ranges.iter().map(|(a, b)| b - a).product();
                        counts[cands[0] as usize] += size as u64;
                        continue;
                    }
                    for z in ranges[2].0..ranges[2].1 {
                        for y in ranges[1].0..ranges[1].1 {
                            for x in ranges[0].0..ranges[0].1 {
                                let k = nearest_among(cands, centers, &[x, y, z], *res, *d);
                                counts[k] += 1;
                            }
                        }
                    }
                }
            }
            Locator::BruteForce => {
                for i in 0..grid.n_points() {
                    counts[self.cell_of(grid, i)] += 1;
                }
            }
        }
        counts
    }
}

fn min_image_sq(a: &[i64; 3], b: &[i64; 3], res: i64, d: usize) -> i64 {
    let mut s = 0;
    for j in 0..d {
        let t = (a[j] - b[j]).rem_euclid(res);
        let t = t.min(res - t);
        s += t * t;
    }
    s
}

fn nearest_among(cands: &[u32], centers: &[[i64; 3]], c: &[i64; 3], res: i64, d: usize) -> usize {
    let mut best = cands[0] as usize;
    let mut bd = min_image_sq(&centers[best], c, res, d);
    for &k in &cands[1..] {
        let dist = min_image_sq(&centers[k as usize], c, res, d);
        if dist < bd {
            bd = dist;
            best = k as usize;
        }
    }
    best
}

/// Buckets of the lattice; each keeps the centers that can be nearest to
/// some point inside it, in index order.
fn lattice_locator(grid: &QuadratureGrid, res: usize, centers: &[usize]) -> Locator {
    let d = grid.manifold().d;
    let res = res as i64;
    let target = ((4 * centers.len()) as f64)
        .powf(1.0 / d as f64)
        .round()
        .max(1.0) as i64;
    let side = (res + target - 1) / target;
    let per_axis = (res + side - 1) / side;
    let cc: Vec<[i64; 3]> = centers.iter().map(|&i| lattice_coords(grid, i)).collect();
    let n_buckets = per_axis.pow(d as u32);
    let real_dist = |a: &[f64; 3], b: &[i64; 3]| {
        let mut s = 0.0;
        for j in 0..d {
            let t = (a[j] - b[j] as f64).rem_euclid(res as f64);
            let t = t.min(res as f64 - t);
            s += t * t;
        }
        s.sqrt()
    };
    let candidates = (0..n_buckets)
        .map(|bi| {
            let mut rest = bi;
            let mut mid = [0.0; 3];
            let mut half = 0.0;
            for m in mid.iter_mut().take(d) {
                let b = rest % per_axis;
                rest /= per_axis;
                let lo = b * side;
                let hi = ((b + 1) * side).min(res) - 1;
                *m = 0.5 * (lo + hi) as f64;
                half += (0.5 * (hi - lo) as f64).powi(2);
            }
            let half = half.sqrt();
            let dists: Vec<f64> = cc.iter().map(|c| real_dist(&mid, c)).collect();
            let dmin = dists.iter().cloned().fold(f64::INFINITY, f64::min);
            let cut = dmin + 2.0 * half + 1e-9;
            (0..cc.len() as u32)
                .filter(|&k| dists[k as usize] <= cut)
                .collect()
        })
        .collect();
    Locator::Lattice {
        res,
        d,
        centers: cc,
        side,
        per_axis,
        candidates,
    }
}

/// Every `step`-th lattice coordinate per axis, or every `step`-th sphere
/// point, with at least `2^d n` points when the grid allows it.
fn coarse_subset(grid: &QuadratureGrid, n: usize) -> Vec<usize> {
    match grid.layout() {
        Layout::Lattice { res, .. } => {
            let d = grid.manifold().d;
            let per_axis = 2 * (n as f64).powf(1.0 / d as f64).ceil() as usize;
            let step = (res / per_axis).max(1);
            let ticks: Vec<usize> = (0..*res).step_by(step).collect();
            let mut out = Vec::new();
            let t = |j: usize| if j < d { ticks.len() } else { 1 };
            for c in 0..t(2) {
                for b in 0..t(1) {
                    for a in 0..t(0) {
                        let pick = |j: usize, v: usize| if j < d { ticks[v] } else { 0 };
                        out.push(grid.index_of(&[pick(0, a), pick(1, b), pick(2, c)]));
                    }
                }
            }
            out.sort_unstable();
            out
        }
        Layout::Fibonacci { points } => {
            let step = (points.len() / (8 * n)).max(1);
            (0..points.len()).step_by(step).collect()
        }
    }
}

/// Greedy farthest-point sampling from `pool[0]`; ties go to the earliest
/// pool entry.
fn farthest_points(grid: &QuadratureGrid, pool: &[usize], n: usize) -> Vec<usize> {
    let mut chosen = vec![pool[0]];
    let mut gap: Vec<f64> = pool.iter().map(|&i| grid.distance(pool[0], i)).collect();
    while chosen.len() < n {
        let mut best = 0;
        for (k, &g) in gap.iter().enumerate() {
            if g > gap[best] {
                best = k;
            }
        }
        let c = pool[best];
        chosen.push(c);
        for (g, &i) in gap.iter_mut().zip(pool) {
            *g = g.min(grid.distance(c, i));
        }
    }
    chosen
}

pub(crate) fn is_torus(grid: &QuadratureGrid) -> bool {
    grid.manifold().kind == ManifoldKind::Torus
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::ManifoldSpec;

    fn torus(d: usize, res: usize) -> QuadratureGrid {
        QuadratureGrid::new(ManifoldSpec::torus(d, 1.0, -1.0).unwrap(), res).unwrap()
    }

    #[test]
    fn mode_order() {
        let m = fourier_modes(1, 3);
        assert_eq!(m[0].trig, Trig::Const);
        assert_eq!((m[1].freq[0], m[1].trig), (1, Trig::Sin));
        assert_eq!((m[2].freq[0], m[2].trig), (1, Trig::Cos));
        let m2 = fourier_modes(2, 9);
        assert_eq!(m2.len(), 9);
        let norms: Vec<i64> = m2
            .iter()
            .map(|m| m.freq.iter().map(|v| v * v).sum())
            .collect();
        assert!(norms.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(norms, vec![0, 1, 1, 1, 1, 2, 2, 2, 2]);
        // Nested prefixes.
        assert_eq!(&fourier_modes(2, 40)[..9], &m2[..]);
    }

    #[test]
    fn fourier_basis_is_orthonormal() {
        for (d, res, n) in [(1, 64, 9), (2, 24, 13)] {
            let g = torus(d, res);
            let b = Basis::Fourier(FourierBasis::new(&g, n).unwrap());
            let fields: Vec<Vec<f64>> = (0..n)
                .map(|k| {
                    let mut e = vec![0.0; n];
                    e[k] = 1.0;
                    b.evaluate(&g, &e)
                })
                .collect();
            for (a, fa) in fields.iter().enumerate() {
                let c = b.coefficients(&g, fa);
                for (k, v) in c.iter().enumerate() {
                    let want = if k == a { 1.0 } else { 0.0 };
                    assert!((v - want).abs() < 1e-10, "{d} {a} {k} {v}");
                }
            }
        }
        assert!(FourierBasis::new(&torus(1, 8), 9).is_err());
    }

    #[test]
    fn circle_three_modes_are_one_sin_cos() {
        let g = torus(1, 32);
        let b = Basis::Fourier(FourierBasis::new(&g, 3).unwrap());
        for i in 0..32 {
            let x = i as f64 / 32.0;
            let v = b.point_values(&g, i);
            let s2 = 2f64.sqrt();
            assert!((v[0] - 1.0).abs() < 1e-12);
            assert!((v[1] - s2 * (2.0 * std::f64::consts::PI * x).sin()).abs() < 1e-12);
            assert!((v[2] - s2 * (2.0 * std::f64::consts::PI * x).cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn sphere_monomials_drop_dependent_terms() {
        let g = QuadratureGrid::new(ManifoldSpec::sphere(1.0, -1.0).unwrap(), 2000).unwrap();
        // Degree ≤ 2 restricted to the sphere spans 1 + 3 + 5 = 9 dimensions.
        let b = sphere_monomials(&g, 9).unwrap();
        assert_eq!(b.len(), 9);
        let w = g.weight();
        for i in 0..9 {
            for j in 0..9 {
                let ip: f64 = w * b[i].iter().zip(&b[j]).map(|(x, y)| x * y).sum::<f64>();
                assert!((ip - if i == j { 1.0 } else { 0.0 }).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn random_span_is_full_rank_and_seeded() {
        let g = torus(2, 32);
        let a = random_smooth(&g, 5, 9).unwrap();
        let b = random_smooth(&g, 5, 9).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, random_smooth(&g, 5, 10).unwrap());
    }

    #[test]
    fn cell_locator_matches_brute_force() {
        for (d, res, n) in [(1, 500, 7), (2, 90, 13), (2, 64, 16), (3, 20, 5)] {
            let g = torus(d, res);
            let part = CellPartition::new(&g, n).unwrap();
            assert_eq!(part.len(), n);
            let mut counts = vec![0u64; n];
            for i in 0..g.n_points() {
                let mut best = 0;
                let mut bd = f64::INFINITY;
                for (k, &c) in part.centers.iter().enumerate() {
                    let dist = g.distance(c, i);
                    if dist < bd {
                        bd = dist;
                        best = k;
                    }
                }
                assert_eq!(part.cell_of(&g, i), best, "{d} {i}");
                counts[best] += 1;
            }
            assert_eq!(counts, part.counts);
            assert_eq!(counts.iter().sum::<u64>() as usize, g.n_points());
        }
    }

    #[test]
    fn sphere_cells_cover_everything() {
        let g = QuadratureGrid::new(ManifoldSpec::sphere(1.0, -1.0).unwrap(), 3000).unwrap();
        let part = CellPartition::new(&g, 12).unwrap();
        assert_eq!(part.counts.iter().sum::<u64>(), 3000);
        assert!(part.counts.iter().all(|&c| c > 0));
    }
}
