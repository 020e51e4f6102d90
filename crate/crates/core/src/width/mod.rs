//! Hypothesis classes of known pseudo-dimension, best `L^q` approximation
//! of the adversarial family, and width sweeps against the lower bound.

mod basis;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complexity::{entropy_contradiction_check, EntropyReport};
use crate::family::{assemble_family, chi, gv_code, AdversarialFamily, BumpProfile};
use crate::manifold::{weighted_lp, Exponent, ManifoldKind, ManifoldSpec, QuadratureGrid};
use crate::model_space::{choose_r, theoretical_width_bound, ConstantsTable, RadiusBranch};
use crate::packing::maximal_packing;
use crate::{Error, Result};

pub use basis::{fourier_modes, Mode, Trig};

use basis::{is_torus, orthonormalize, Basis, CellPartition, FourierBasis};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassKind {
    Span,
    PiecewiseConstant,
}

/// A linear space of functions on the grid. Its pseudo-dimension equals its
/// linear dimension `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisClass {
    pub kind: ClassKind,
    pub n: usize,
    /// `fourier`, `monomial`, `random`, `fields`, `voronoi` or `zero`.
    pub label: String,
    pub(crate) basis: Basis,
}

impl HypothesisClass {
    /// Orthonormalized span of the given fields; fails if they are
    /// dependent.
    pub fn from_fields(grid: &QuadratureGrid, fields: Vec<Vec<f64>>) -> Result<Self> {
        let n = fields.len();
        if let Some(f) = fields.iter().find(|f| f.len() != grid.n_points()) {
            return Err(Error::LengthMismatch {
                expected: grid.n_points(),
                actual: f.len(),
            });
        }
        let basis = orthonormalize(grid, fields, n);
        if basis.len() < n || n == 0 {
            return Err(Error::RankDeficient(format!(
                "{} of {n} fields independent",
                basis.len()
            )));
        }
        Ok(Self {
            kind: ClassKind::Span,
            n,
            label: "fields".into(),
            basis: Basis::Dense(basis),
        })
    }

    /// The class `{0}`.
    pub fn zero() -> Self {
        Self {
            kind: ClassKind::Span,
            n: 0,
            label: "zero".into(),
            basis: Basis::Zero,
        }
    }

    /// Upper bound on the pseudo-dimension: the linear dimension.
    pub fn pseudo_dimension_bound(&self) -> usize {
        self.n
    }

    /// Basis field `j` on the grid: an orthonormal span element, or a cell
    /// indicator.
    pub fn basis_field(&self, grid: &QuadratureGrid, j: usize) -> Vec<f64> {
        match &self.basis {
            Basis::Cells(c) => (0..grid.n_points())
                .map(|i| if c.cell_of(grid, i) == j { 1.0 } else { 0.0 })
                .collect(),
            b => {
                let mut e = vec![0.0; b.dim()];
                e[j] = 1.0;
                b.evaluate(grid, &e)
            }
        }
    }

    /// Fourier modes, when the class is a trigonometric span.
    pub fn modes(&self) -> Option<&[Mode]> {
        match &self.basis {
            Basis::Fourier(f) => Some(&f.modes),
            _ => None,
        }
    }

    /// Voronoi centers, when the class is piecewise constant.
    pub fn cell_centers(&self) -> Option<&[usize]> {
        match &self.basis {
            Basis::Cells(c) => Some(&c.centers),
            _ => None,
        }
    }
}

/// Spans use Fourier modes on tori and orthonormalized monomials on the
/// sphere; piecewise-constant classes use Voronoi cells of `n` spread-out
/// grid points.
pub fn make_hypothesis_class(
    grid: &QuadratureGrid,
    kind: ClassKind,
    n: usize,
) -> Result<HypothesisClass> {
    if n == 0 {
        return Err(Error::invalid("n", "class dimension must be at least 1"));
    }
    let (label, basis) = match kind {
        ClassKind::Span if is_torus(grid) => {
            ("fourier", Basis::Fourier(FourierBasis::new(grid, n)?))
        }
        ClassKind::Span => ("monomial", Basis::Dense(basis::sphere_monomials(grid, n)?)),
        ClassKind::PiecewiseConstant => ("voronoi", Basis::Cells(CellPartition::new(grid, n)?)),
    };
    Ok(HypothesisClass {
        kind,
        n,
        label: label.into(),
        basis,
    })
}

/// Span of `n` seeded random trigonometric polynomials on a torus.
pub fn random_span_class(grid: &QuadratureGrid, n: usize, seed: u64) -> Result<HypothesisClass> {
    if n == 0 {
        return Err(Error::invalid("n", "class dimension must be at least 1"));
    }
    Ok(HypothesisClass {
        kind: ClassKind::Span,
        n,
        label: "random".into(),
        basis: Basis::Dense(basis::random_smooth(grid, n, seed)?),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Subgradient steps for `q ∈ {1, ∞}` on spans.
    pub polish_iterations: usize,
    /// Skip polishing when `2 · points · n · iterations` exceeds this.
    pub polish_work: f64,
    /// Members are evaluated densely when `points · n` stays below this;
    /// larger lattice problems use the sparse paths.
    pub dense_work: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            polish_iterations: 500,
            polish_work: 2e9,
            dense_work: 1e8,
        }
    }
}

/// Distance from one function to a class in `L^q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApproxError {
    pub q: Exponent,
    /// Achieved `‖f − h‖_q`, an upper bound on the infimum.
    pub value: f64,
    /// Certified lower bound on the infimum.
    pub lower: f64,
    /// `‖f − Pf‖₂` for the orthogonal projection `P`.
    pub l2_residual: f64,
    /// How much polishing improved on the projection residual in `L^q`.
    pub polish_gain: f64,
    pub polish_iterations: usize,
}

/// Best `L^q` approximation of `f` from the class, for `q ∈ {1, 2, ∞}`.
/// `q = 2` and piecewise-constant classes are exact. Spans with `q ∈ {1, ∞}`
/// start from the projection and run a subgradient polish; the lower bound
/// comes from duality with the projection residual `e`:
/// `‖f−h‖₁ ≥ ‖e‖₂²/‖e‖_∞` and `‖f−h‖_∞ ≥ ‖e‖₂²/‖e‖₁`.
pub fn best_approx_error(
    grid: &QuadratureGrid,
    class: &HypothesisClass,
    f: &[f64],
    q: Exponent,
    opts: &SolverOptions,
) -> Result<ApproxError> {
    check_q(q)?;
    if f.len() != grid.n_points() {
        return Err(Error::LengthMismatch {
            expected: grid.n_points(),
            actual: f.len(),
        });
    }
    match &class.basis {
        Basis::Cells(part) => {
            let assign: Vec<u32> = (0..grid.n_points())
                .map(|i| part.cell_of(grid, i) as u32)
                .collect();
            Ok(cells_exact(grid, part.len(), &assign, f, q))
        }
        basis => Ok(span_dense(grid, basis, f, q, opts)),
    }
}

fn check_q(q: Exponent) -> Result<()> {
    if q == Exponent::ONE || q == Exponent::TWO || q.is_infinite() {
        Ok(())
    } else {
        Err(Error::invalid(
            "q",
            format!("only 1, 2 and inf are supported, got {q}"),
        ))
    }
}

fn norms(grid: &QuadratureGrid, e: &[f64]) -> (f64, f64, f64) {
    let w = grid.weight();
    let l1 = weighted_lp(e.iter().copied(), w, Exponent::ONE);
    let l2 = weighted_lp(e.iter().copied(), w, Exponent::TWO);
    let linf = weighted_lp(e.iter().copied(), w, Exponent::INF);
    (l1, l2, linf)
}

fn duality_lower(q: Exponent, l1: f64, l2: f64, linf: f64, vol: f64) -> f64 {
    if q == Exponent::TWO {
        l2
    } else if q == Exponent::ONE {
        if linf > 0.0 {
            l2 * l2 / linf
        } else {
            0.0
        }
    } else {
        let a = if l1 > 0.0 { l2 * l2 / l1 } else { 0.0 };
        a.max(l2 / vol.sqrt())
    }
}

fn span_dense(
    grid: &QuadratureGrid,
    basis: &Basis,
    f: &[f64],
    q: Exponent,
    opts: &SolverOptions,
) -> ApproxError {
    let coeffs = basis.coefficients(grid, f);
    let h = basis.evaluate(grid, &coeffs);
    let e: Vec<f64> = f.iter().zip(&h).map(|(a, b)| a - b).collect();
    let (l1, l2, linf) = norms(grid, &e);
    let vol = grid.manifold().vol;
    let lower = duality_lower(q, l1, l2, linf, vol);
    let start = if q == Exponent::ONE {
        l1
    } else if q == Exponent::TWO {
        l2
    } else {
        linf
    };
    let n = basis.dim();
    // With nothing to subtract the residual is `f` and the error is exact.
    let lower = if n == 0 { start } else { lower };
    let work = 2.0 * grid.n_points() as f64 * n as f64 * opts.polish_iterations as f64;
    if q == Exponent::TWO || n == 0 || opts.polish_iterations == 0 || work > opts.polish_work {
        return ApproxError {
            q,
            value: start,
            lower: lower.min(start),
            l2_residual: l2,
            polish_gain: 0.0,
            polish_iterations: 0,
        };
    }
    let best = polish(
        grid,
        basis,
        f,
        coeffs,
        e,
        q,
        start,
        l2,
        opts.polish_iterations,
    );
    ApproxError {
        q,
        value: best,
        lower: lower.min(best),
        l2_residual: l2,
        polish_gain: start - best,
        polish_iterations: opts.polish_iterations,
    }
}

/// Normalized subgradient steps of length `0.1 ‖e₀‖₂/√(t+1)`, keeping the
/// best iterate.
#[allow(clippy::too_many_arguments)]
fn polish(
    grid: &QuadratureGrid,
    basis: &Basis,
    f: &[f64],
    mut c: Vec<f64>,
    mut e: Vec<f64>,
    q: Exponent,
    start: f64,
    scale: f64,
    iterations: usize,
) -> f64 {
    let mut best = start;
    for t in 0..iterations {
        // Subgradient of c ↦ ‖f − Bc‖_q.
        let g: Vec<f64> = if q == Exponent::ONE {
            let s: Vec<f64> = e.iter().map(|&v| sign(v)).collect();
            basis
                .coefficients(grid, &s)
                .into_iter()
                .map(|v| -v)
                .collect()
        } else {
            let (mut idx, mut m) = (0, -1.0);
            for (i, v) in e.iter().enumerate() {
                if v.abs() > m {
                    m = v.abs();
                    idx = i;
                }
            }
            let s = sign(e[idx]);
            basis
                .point_values(grid, idx)
                .into_iter()
                .map(|b| -s * b)
                .collect()
        };
        let gn = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if gn == 0.0 {
            break;
        }
        let step = 0.1 * scale / ((t + 1) as f64).sqrt();
        for (ci, gi) in c.iter_mut().zip(&g) {
            *ci -= step * gi / gn;
        }
        let h = basis.evaluate(grid, &c);
        e = f.iter().zip(&h).map(|(a, b)| a - b).collect();
        let (l1, _, linf) = norms(grid, &e);
        let val = if q == Exponent::ONE { l1 } else { linf };
        best = best.min(val);
    }
    best
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Exact best constant per cell: mean, weighted median or midrange.
fn cells_exact(
    grid: &QuadratureGrid,
    n_cells: usize,
    assign: &[u32],
    f: &[f64],
    q: Exponent,
) -> ApproxError {
    let w = grid.weight();
    let mut sum = vec![0.0; n_cells];
    let mut cnt = vec![0usize; n_cells];
    let mut lo = vec![f64::INFINITY; n_cells];
    let mut hi = vec![f64::NEG_INFINITY; n_cells];
    for (&c, &v) in assign.iter().zip(f) {
        let c = c as usize;
        sum[c] += v;
        cnt[c] += 1;
        lo[c] = lo[c].min(v);
        hi[c] = hi[c].max(v);
    }
    let mean: Vec<f64> = sum
        .iter()
        .zip(&cnt)
        .map(|(s, &n)| if n > 0 { s / n as f64 } else { 0.0 })
        .collect();
    let l2 = weighted_lp(
        assign.iter().zip(f).map(|(&c, v)| v - mean[c as usize]),
        w,
        Exponent::TWO,
    );
    let value = if q == Exponent::TWO {
        l2
    } else if q.is_infinite() {
        lo.iter()
            .zip(&hi)
            .filter(|(a, _)| a.is_finite())
            .map(|(a, b)| 0.5 * (b - a))
            .fold(0.0, f64::max)
    } else {
        let mut groups: Vec<Vec<f64>> = cnt.iter().map(|&n| Vec::with_capacity(n)).collect();
        for (&c, &v) in assign.iter().zip(f) {
            groups[c as usize].push(v);
        }
        let mut total = 0.0;
        for g in &mut groups {
            if g.is_empty() {
                continue;
            }
            g.sort_by(f64::total_cmp);
            let med = g[g.len() / 2];
            total += g.iter().map(|v| (v - med).abs()).sum::<f64>();
        }
        total * w
    };
    ApproxError {
        q,
        value,
        lower: value,
        l2_residual: l2,
        polish_gain: 0.0,
        polish_iterations: 0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WidthPath {
    Dense,
    Sparse,
}

/// `sup_a inf_h ‖f_a − h‖_q` over the family members.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyWidth {
    pub q: Exponent,
    pub class: String,
    pub n: usize,
    pub path: WidthPath,
    pub members: usize,
    /// Largest per-member lower bound: a lower bound on the width.
    pub lower: f64,
    /// Largest per-member achieved error: an upper bound on the width.
    pub value: f64,
    pub l2: f64,
    pub per_member: Vec<ApproxError>,
}

/// Width of the family against a class. Large lattice problems with
/// Fourier or Voronoi classes take sparse paths that never materialize
/// member fields.
pub fn family_width(
    grid: &QuadratureGrid,
    family: &AdversarialFamily,
    class: &HypothesisClass,
    q: Exponent,
    opts: &SolverOptions,
) -> Result<FamilyWidth> {
    check_q(q)?;
    if family.n_members() == 0 {
        return Err(Error::Empty("family"));
    }
    let work = grid.n_points() as f64 * class.n.max(1) as f64;
    let shared = grid.is_lattice() && family.bumps.iter().all(|b| b.shared_stencil().is_some());
    let sparse_ok = shared && matches!(class.basis, Basis::Fourier(_) | Basis::Cells(_));
    let (path, per_member) = if sparse_ok && work > opts.dense_work {
        let v = match &class.basis {
            Basis::Fourier(fb) => sparse_fourier(grid, family, fb, q),
            Basis::Cells(part) => sparse_cells(grid, family, part, q),
            _ => unreachable!(),
        };
        (WidthPath::Sparse, v)
    } else {
        let assign: Option<Vec<u32>> = match &class.basis {
            Basis::Cells(part) => Some(
                (0..grid.n_points())
                    .map(|i| part.cell_of(grid, i) as u32)
                    .collect(),
            ),
            _ => None,
        };
        let v = (0..family.n_members())
            .into_par_iter()
            .map(|j| {
                let f = family.member_values(j, grid);
                match (&class.basis, &assign) {
                    (Basis::Cells(part), Some(a)) => cells_exact(grid, part.len(), a, &f, q),
                    (b, _) => span_dense(grid, b, &f, q, opts),
                }
            })
            .collect();
        (WidthPath::Dense, v)
    };
    let fold = |get: fn(&ApproxError) -> f64| per_member.iter().map(get).fold(0.0, f64::max);
    Ok(FamilyWidth {
        q,
        class: class.label.clone(),
        n: class.n,
        path,
        members: per_member.len(),
        lower: fold(|a| a.lower),
        value: fold(|a| a.value),
        l2: fold(|a| a.l2_residual),
        per_member,
    })
}

/// Shared template values `T(o)` at the stencil offsets, before the member
/// scale and sign.
fn template(family: &AdversarialFamily) -> (&crate::manifold::Stencil, Vec<f64>) {
    let b = &family.bumps[0];
    let st = b.shared_stencil().expect("shared stencil");
    let t = st
        .distances
        .iter()
        .map(|&dist| b.height * chi(dist / b.radius))
        .collect();
    (st, t)
}

fn centre_coords(grid: &QuadratureGrid, i: usize) -> [i64; 3] {
    let c = grid.coords(i);
    [c[0] as i64, c[1] as i64, c[2] as i64]
}

/// Fourier coefficients of every member from the template transform times
/// `Σ_i a_i e^{iθ·c_i}`; the residual norm follows from Parseval.
fn sparse_fourier(
    grid: &QuadratureGrid,
    family: &AdversarialFamily,
    fb: &FourierBasis,
    q: Exponent,
) -> Vec<ApproxError> {
    let (st, t) = template(family);
    let w = grid.weight();
    let s = family.member_scale();
    let vol = grid.manifold().vol;
    let that: Vec<f64> = fb
        .modes
        .iter()
        .map(|md| {
            st.offsets
                .iter()
                .zip(&t)
                .map(|(o, v)| v * fb.phase(&md.freq, o).0)
                .sum()
        })
        .collect();
    let members = family.n_members();
    let nm = fb.len();
    let mut acc = vec![(0.0f64, 0.0f64); members * nm];
    for (i, b) in family.bumps.iter().enumerate() {
        let c = centre_coords(grid, b.center);
        let signs: Vec<f64> = (0..members).map(|j| family.code.sign(j, i)).collect();
        for (k, md) in fb.modes.iter().enumerate() {
            let (co, si) = fb.phase(&md.freq, &c);
            for (j, &a) in signs.iter().enumerate() {
                let slot = &mut acc[j * nm + k];
                slot.0 += a * co;
                slot.1 += a * si;
            }
        }
    }
    let f2 = s * s * family.n_balls() as f64 * w * t.iter().map(|v| v * v).sum::<f64>();
    let finf = s * t.iter().cloned().fold(0.0, f64::max);
    (0..members)
        .map(|j| {
            let coeffs: Vec<f64> = fb
                .modes
                .iter()
                .enumerate()
                .map(|(k, md)| w * s * that[k] * fb.from_sum(md, acc[j * nm + k]))
                .collect();
            let e2 = (f2 - coeffs.iter().map(|c| c * c).sum::<f64>()).max(0.0);
            let l2 = e2.sqrt();
            let proj_sup: f64 = coeffs
                .iter()
                .zip(&fb.modes)
                .map(|(c, md)| c.abs() * fb.sup_norm(md))
                .sum();
            let linf_bound = finf + proj_sup;
            let (lower, value) = if q == Exponent::TWO {
                (l2, l2)
            } else if q == Exponent::ONE {
                (
                    if linf_bound > 0.0 {
                        e2 / linf_bound
                    } else {
                        0.0
                    },
                    l2 * vol.sqrt(),
                )
            } else {
                (l2 / vol.sqrt(), linf_bound)
            };
            ApproxError {
                q,
                value,
                lower,
                l2_residual: l2,
                polish_gain: 0.0,
                polish_iterations: 0,
            }
        })
        .collect()
}

/// Per-ball pieces `(cell, Σ T, Σ T², count, min T, max T)`.
type Piece = (usize, f64, f64, u64, f64, f64);

/// Cell statistics of every member from per-ball partial sums. A ball whose
/// nearest and second-nearest cell centers differ by more than its diameter
/// lies in one cell; other balls are split node by node.
fn sparse_cells(
    grid: &QuadratureGrid,
    family: &AdversarialFamily,
    part: &CellPartition,
    q: Exponent,
) -> Vec<ApproxError> {
    let (st, t) = template(family);
    let w = grid.weight();
    let s = family.member_scale();
    let vol = grid.manifold().vol;
    let res = grid.lattice_resolution().expect("lattice") as i64;
    let d = grid.manifold().d;
    let reach = family.radius / grid.spacing();
    let ccs: Vec<[i64; 3]> = part
        .centers
        .iter()
        .map(|&c| centre_coords(grid, c))
        .collect();
    let whole = {
        let (sum, sq) = t.iter().fold((0.0, 0.0), |(a, b), v| (a + v, b + v * v));
        let lo = t.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = t.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (sum, sq, t.len() as u64, lo, hi)
    };
    let pieces: Vec<Vec<Piece>> = family
        .bumps
        .par_iter()
        .map(|b| {
            let c = centre_coords(grid, b.center);
            let mut d1 = (f64::INFINITY, 0usize);
            let mut d2 = f64::INFINITY;
            for (k, cc) in ccs.iter().enumerate() {
                let mut sq = 0i64;
                for j in 0..d {
                    let u = (cc[j] - c[j]).rem_euclid(res);
                    let u = u.min(res - u);
                    sq += u * u;
                }
                let dist = (sq as f64).sqrt();
                if dist < d1.0 {
                    d2 = d1.0;
                    d1 = (dist, k);
                } else if dist < d2 {
                    d2 = dist;
                }
            }
            if d2 - d1.0 > 2.0 * reach + 1e-9 {
                return vec![(d1.1, whole.0, whole.1, whole.2, whole.3, whole.4)];
            }
            let mut local: Vec<Piece> = Vec::new();
            for (o, &v) in st.offsets.iter().zip(&t) {
                let cell = part.cell_of(grid, grid.shifted(b.center, o));
                match local.iter_mut().find(|p| p.0 == cell) {
                    Some(p) => {
                        p.1 += v;
                        p.2 += v * v;
                        p.3 += 1;
                        p.4 = p.4.min(v);
                        p.5 = p.5.max(v);
                    }
                    None => local.push((cell, v, v * v, 1, v, v)),
                }
            }
            local.sort_by_key(|p| p.0);
            local
        })
        .collect();
    let n_cells = part.len();
    (0..family.n_members())
        .into_par_iter()
        .map(|j| {
            let mut sum = vec![0.0; n_cells];
            let mut sq = vec![0.0; n_cells];
            let mut cov = vec![0u64; n_cells];
            let mut lo = vec![f64::INFINITY; n_cells];
            let mut hi = vec![f64::NEG_INFINITY; n_cells];
            for (i, ps) in pieces.iter().enumerate() {
                let a = s * family.code.sign(j, i);
                for &(c, ps1, ps2, n, mn, mx) in ps {
                    sum[c] += a * ps1;
                    sq[c] += a * a * ps2;
                    cov[c] += n;
                    let (x, y) = if a >= 0.0 {
                        (a * mn, a * mx)
                    } else {
                        (a * mx, a * mn)
                    };
                    lo[c] = lo[c].min(x);
                    hi[c] = hi[c].max(y);
                }
            }
            let mut e2 = 0.0;
            let mut midrange: f64 = 0.0;
            let mut einf: f64 = 0.0;
            for c in 0..n_cells {
                let n = part.counts[c];
                if n == 0 {
                    continue;
                }
                if cov[c] < n {
                    lo[c] = lo[c].min(0.0);
                    hi[c] = hi[c].max(0.0);
                }
                let mean = sum[c] / n as f64;
                e2 += (sq[c] - sum[c] * mean).max(0.0);
                midrange = midrange.max(0.5 * (hi[c] - lo[c]));
                einf = einf.max((hi[c] - mean).max(mean - lo[c]));
            }
            let e2 = e2 * w;
            let l2 = e2.sqrt();
            let (lower, value) = if q == Exponent::TWO {
                (l2, l2)
            } else if q == Exponent::ONE {
                (if einf > 0.0 { e2 / einf } else { 0.0 }, l2 * vol.sqrt())
            } else {
                (midrange, midrange)
            };
            ApproxError {
                q,
                value,
                lower: lower.min(value),
                l2_residual: l2,
                polish_gain: 0.0,
                polish_iterations: 0,
            }
        })
        .collect()
}

/// Hölder links `dist_q ≥ dist₁ vol^{1/q−1} ≥ C₁ vol^{1/q−1}/4`, checked
/// with the certified lower bound on the left of each link and the achieved
/// `L¹` error on the right of the first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderReport {
    pub q: Exponent,
    pub vol_factor: f64,
    pub dist_q_lower: f64,
    pub dist_1_value: f64,
    pub dist_1_lower: f64,
    pub c1: f64,
    /// The first link is vacuous for `q = 1`.
    pub links: [bool; 2],
    pub passes: bool,
}

pub fn holder_chain_check(
    grid: &QuadratureGrid,
    family: &AdversarialFamily,
    class: &HypothesisClass,
    q: Exponent,
    opts: &SolverOptions,
) -> Result<HolderReport> {
    let one = family_width(grid, family, class, Exponent::ONE, opts)?;
    let vol = grid.manifold().vol;
    let vol_factor = vol.powf(q.reciprocal() - 1.0);
    let dist_q_lower = if q == Exponent::ONE {
        one.lower
    } else {
        family_width(grid, family, class, q, opts)?.lower
    };
    let slack = 1.0 - 1e-9;
    let first = q == Exponent::ONE || dist_q_lower >= one.value * vol_factor * slack;
    let second = one.lower >= family.c1 / 4.0 * slack;
    Ok(HolderReport {
        q,
        vol_factor,
        dist_q_lower,
        dist_1_value: one.value,
        dist_1_lower: one.lower,
        c1: family.c1,
        links: [first, second],
        passes: first && second,
    })
}

/// Settings for one width sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub manifold: ManifoldSpec,
    pub n_list: Vec<usize>,
    pub p: Exponent,
    pub q: Exponent,
    pub k: u32,
    pub bump_constant: f64,
    pub seed: u64,
    pub classes: Vec<ClassKind>,
    /// Family members kept per row.
    pub max_members: usize,
    /// Fixed grid resolution; chosen per row so that the spacing is below
    /// `r/8` when absent.
    pub resolution: Option<usize>,
    pub max_grid_points: usize,
    pub dominance_tolerance: f64,
    pub slope_tolerance: f64,
    pub entropy: bool,
    pub solver: SolverOptions,
}

impl SweepConfig {
    pub fn new(manifold: ManifoldSpec, n_list: Vec<usize>) -> Self {
        Self {
            manifold,
            n_list,
            p: Exponent::TWO,
            q: Exponent::TWO,
            k: 1,
            bump_constant: crate::family::DEFAULT_BUMP_CONSTANT,
            seed: 0,
            classes: vec![ClassKind::Span, ClassKind::PiecewiseConstant],
            max_members: 8,
            resolution: None,
            max_grid_points: 120_000_000,
            dominance_tolerance: 0.05,
            slope_tolerance: 0.15,
            entropy: true,
            solver: SolverOptions::default(),
        }
    }

    fn profile(&self) -> Result<BumpProfile> {
        BumpProfile::new(self.k, if self.k == 1 { 1.0 } else { self.bump_constant })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassWidth {
    pub class: ClassKind,
    pub label: String,
    pub path: WidthPath,
    pub lower: f64,
    pub value: f64,
    pub l2: f64,
    pub dominates: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub r: f64,
    pub branch: RadiusBranch,
    pub resolution: usize,
    pub grid_points: usize,
    #[serde(rename = "N_r")]
    pub n_r: usize,
    pub members: usize,
    pub theoretical_lower_bound: f64,
    pub widths: Vec<ClassWidth>,
    pub dominance_ok: bool,
    pub entropy: Option<EntropyReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WidthReport {
    pub manifold: ManifoldSpec,
    pub p: Exponent,
    pub q: Exponent,
    pub k: u32,
    pub seed: u64,
    pub rows: Vec<SweepRow>,
    /// Least-squares slope of `log bound` against `log n`.
    pub slope: Option<f64>,
    pub expected_slope: f64,
    pub slope_ok: Option<bool>,
    pub dominance_ok: bool,
    /// False when a row could not be built; `error` says why.
    pub complete: bool,
    pub error: Option<String>,
    pub passes: bool,
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() < 2 || x.len() != y.len() {
        return None;
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Smallest grid whose spacing is below `r/8`.
pub fn auto_resolution(m: &ManifoldSpec, r: f64) -> usize {
    match m.kind {
        ManifoldKind::Torus => ((8.0 * m.scale / r).floor() as usize + 1).max(8),
        ManifoldKind::Sphere => ((64.0 * m.vol / (r * r)).floor() as usize + 1).max(256),
    }
}

/// For each `n`: choose `r`, pack, sign with a code, and measure the family
/// width against each class next to the theoretical bound.
pub fn width_sweep(cfg: &SweepConfig) -> Result<WidthReport> {
    check_q(cfg.q)?;
    if cfg.n_list.is_empty() || cfg.n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid(
            "n_list",
            "must be nonempty and strictly increasing",
        ));
    }
    if cfg.max_members == 0 {
        return Err(Error::invalid("max_members", "must be positive"));
    }
    let profile = cfg.profile()?;
    let m = cfg.manifold;
    let mut rows = Vec::new();
    let mut error = None;
    for &n in &cfg.n_list {
        match sweep_row(cfg, &profile, n) {
            Ok(row) => rows.push(row),
            Err(e) => {
                error = Some(format!("n = {n}: {e}"));
                break;
            }
        }
    }
    let xs: Vec<f64> = rows.iter().map(|r| (r.n as f64).ln()).collect();
    let ys: Vec<f64> = rows
        .iter()
        .map(|r| r.theoretical_lower_bound.ln())
        .collect();
    let slope = fit_slope(&xs, &ys);
    let expected_slope = -(cfg.k as f64) / m.d as f64;
    let slope_ok = slope.map(|s| (s - expected_slope).abs() <= cfg.slope_tolerance);
    let dominance_ok = rows.iter().all(|r| r.dominance_ok);
    let complete = error.is_none();
    Ok(WidthReport {
        manifold: m,
        p: cfg.p,
        q: cfg.q,
        k: cfg.k,
        seed: cfg.seed,
        rows,
        slope,
        expected_slope,
        slope_ok,
        dominance_ok,
        complete,
        error,
        passes: complete && dominance_ok && slope_ok != Some(false),
    })
}

fn sweep_row(cfg: &SweepConfig, profile: &BumpProfile, n: usize) -> Result<SweepRow> {
    let m = cfg.manifold;
    let table = ConstantsTable::for_manifold(&m, cfg.p, cfg.q);
    let choice = choose_r(&m, n, &table)?;
    let r = choice.r;
    let resolution = cfg.resolution.unwrap_or_else(|| auto_resolution(&m, r));
    let points = match m.kind {
        ManifoldKind::Torus => resolution.checked_pow(m.d as u32).unwrap_or(usize::MAX),
        ManifoldKind::Sphere => resolution,
    };
    if points > cfg.max_grid_points {
        return Err(Error::GridTooCoarse(format!(
            "r = {r:.3e} needs {points} grid points, above the cap of {}",
            cfg.max_grid_points
        )));
    }
    let grid = QuadratureGrid::new(m, resolution)?;
    let packing = maximal_packing(&grid, r, 0)?;
    let target = cfg
        .max_members
        .min(crate::family::default_code_target(packing.count()));
    let code = gv_code(packing.count(), Some(target), cfg.seed, 100_000)?;
    let family = assemble_family(&grid, &packing, &code, cfg.p, *profile)?;
    let bound = theoretical_width_bound(&m, n, cfg.p, cfg.q, cfg.k, cfg.bump_constant)?;
    let mut widths = Vec::new();
    for &kind in &cfg.classes {
        let class = make_hypothesis_class(&grid, kind, n)?;
        let fw = family_width(&grid, &family, &class, cfg.q, &cfg.solver)?;
        widths.push(ClassWidth {
            class: kind,
            label: class.label.clone(),
            path: fw.path,
            lower: fw.lower,
            value: fw.value,
            l2: fw.l2,
            dominates: fw.lower >= bound * (1.0 - cfg.dominance_tolerance),
        });
    }
    let entropy = cfg
        .entropy
        .then(|| {
            entropy_contradiction_check(
                &family,
                &grid,
                n,
                &table,
                choice.branch == RadiusBranch::Entropy,
            )
        })
        .transpose()?;
    Ok(SweepRow {
        n,
        r,
        branch: choice.branch,
        resolution,
        grid_points: grid.n_points(),
        n_r: family.n_balls(),
        members: family.n_members(),
        theoretical_lower_bound: bound,
        dominance_ok: widths.iter().all(|w| w.dominates),
        widths,
        entropy,
    })
}

#[cfg(test)]
mod tests;
