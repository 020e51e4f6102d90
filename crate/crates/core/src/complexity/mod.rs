//! P-shattering, brute-force pseudo-dimension, metric-entropy bounds and
//! sample complexity.

use std::f64::consts::E;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::family::{clamp, AdversarialFamily};
use crate::manifold::QuadratureGrid;
use crate::model_space::{
    croke_constant, hyperbolic_volume_constant, model_ball_volume, ConstantsTable,
};
use crate::{Error, Result};

/// Largest point set accepted by [`p_shatters`].
pub const MAX_SHATTER_POINTS: usize = 20;
/// Largest candidate set accepted by [`pseudo_dim_bruteforce`].
pub const MAX_CANDIDATES: usize = 30;
/// Largest subset size searched by [`pseudo_dim_bruteforce`].
pub const MAX_SEARCH_SIZE: usize = 12;

/// Row-major table of `h(x_j)` for functions `h` (rows) and points `x_j`
/// (columns).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl EvaluationMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch {
                expected: rows * cols,
                actual: data.len(),
            });
        }
        if let Some(v) = data.iter().find(|v| !v.is_finite()) {
            return Err(Error::Evaluation(format!("non-finite entry {v}")));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::LengthMismatch {
                    expected: cols,
                    actual: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Self::new(rows.len(), cols, data)
    }

    /// Evaluates every function at every point.
    pub fn from_class<X, F: Fn(&X) -> f64>(functions: &[F], points: &[X]) -> Result<Self> {
        let data = functions
            .iter()
            .flat_map(|f| points.iter().map(f))
            .collect();
        Self::new(functions.len(), points.len(), data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    /// Keeps the listed columns, in order.
    pub fn select_columns(&self, cols: &[usize]) -> EvaluationMatrix {
        let data = (0..self.rows)
            .flat_map(|r| cols.iter().map(move |&c| self.get(r, c)))
            .collect();
        EvaluationMatrix {
            rows: self.rows,
            cols: cols.len(),
            data,
        }
    }
}

/// True iff the sign patterns of `h(x_j) − s_j` over all rows cover
/// `{±1}^n`. Zero counts as `+1`.
pub fn p_shatters(matrix: &EvaluationMatrix, thresholds: &[f64]) -> Result<bool> {
    let n = matrix.cols;
    if n > MAX_SHATTER_POINTS {
        return Err(Error::TooManyPoints(n));
    }
    if thresholds.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: thresholds.len(),
        });
    }
    let total = 1usize << n;
    if matrix.rows < total {
        return Ok(false);
    }
    let mut seen = vec![false; total];
    let mut count = 0;
    for r in 0..matrix.rows {
        let mut pat = 0usize;
        for (j, &s) in thresholds.iter().enumerate() {
            if matrix.get(r, j) >= s {
                pat |= 1 << j;
            }
        }
        if !seen[pat] {
            seen[pat] = true;
            count += 1;
            if count == total {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// A shattered point set with its thresholds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShatterWitness {
    pub points: Vec<usize>,
    pub thresholds: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PseudoDimension {
    pub dim: usize,
    pub witness: Option<ShatterWitness>,
    /// True when the search stopped at `n_max` or at the candidate count, so
    /// the true value may be larger.
    pub capped: bool,
}

/// Largest `n ≤ n_max` such that some `n` candidate columns are
/// P-shattered for some thresholds. Thresholds range over midpoints between
/// consecutive distinct column values, which suffices for a finite class.
pub fn pseudo_dim_bruteforce(matrix: &EvaluationMatrix, n_max: usize) -> Result<PseudoDimension> {
    if matrix.cols > MAX_CANDIDATES {
        return Err(Error::TooManyPoints(matrix.cols));
    }
    if n_max > MAX_SEARCH_SIZE {
        return Err(Error::invalid(
            "n_max",
            format!("at most {MAX_SEARCH_SIZE}, got {n_max}"),
        ));
    }
    let midpoints: Vec<Vec<f64>> = (0..matrix.cols)
        .map(|c| {
            let mut v: Vec<f64> = (0..matrix.rows).map(|r| matrix.get(r, c)).collect();
            v.sort_by(f64::total_cmp);
            v.dedup();
            v.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
        })
        .collect();
    let mut best = PseudoDimension {
        dim: 0,
        witness: None,
        capped: false,
    };
    let limit = n_max.min(matrix.cols);
    for n in 1..=limit {
        if matrix.rows < 1 << n {
            return Ok(best);
        }
        let total = binomial(matrix.cols, n);
        let found = (0..total).into_par_iter().find_map_first(|rank| {
            let cols = unrank_combination(matrix.cols, n, rank);
            shatter_search(matrix, &cols, &midpoints).map(|thresholds| ShatterWitness {
                points: cols,
                thresholds,
            })
        });
        match found {
            Some(w) => {
                best = PseudoDimension {
                    dim: n,
                    witness: Some(w),
                    capped: n == limit,
                }
            }
            None => return Ok(best),
        }
    }
    Ok(best)
}

fn binomial(n: usize, k: usize) -> u64 {
    let mut acc = 1u64;
    for i in 0..k {
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc
}

/// The `rank`-th `k`-subset of `0..n` in lexicographic order.
fn unrank_combination(n: usize, k: usize, mut rank: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut next = 0;
    for slot in 0..k {
        loop {
            let rest = binomial(n - next - 1, k - slot - 1);
            if rank < rest {
                break;
            }
            rank -= rest;
            next += 1;
        }
        out.push(next);
        next += 1;
    }
    out
}

/// Backtracking over per-column thresholds. After fixing thresholds on the
/// first `j` columns the rows fall into groups by prefix pattern; every group
/// must split on column `j`, so its threshold lies in
/// `(max_g min_g, min_g max_g]`.
fn shatter_search(m: &EvaluationMatrix, cols: &[usize], mids: &[Vec<f64>]) -> Option<Vec<f64>> {
    let rows: Vec<usize> = (0..m.rows).collect();
    let mut chosen = Vec::with_capacity(cols.len());
    descend(m, cols, mids, vec![rows], &mut chosen).then_some(chosen)
}

fn descend(
    m: &EvaluationMatrix,
    cols: &[usize],
    mids: &[Vec<f64>],
    groups: Vec<Vec<usize>>,
    chosen: &mut Vec<f64>,
) -> bool {
    let depth = chosen.len();
    if depth == cols.len() {
        return true;
    }
    let c = cols[depth];
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for g in &groups {
        let (gmin, gmax) = g
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &r| {
                let v = m.get(r, c);
                (a.min(v), b.max(v))
            });
        lo = lo.max(gmin);
        hi = hi.min(gmax);
    }
    // Each new group must still hold one row per pattern of the remaining
    // columns.
    let need = 1usize << (cols.len() - depth - 1);
    let values: Vec<Vec<f64>> = groups
        .iter()
        .map(|g| g.iter().map(|&r| m.get(r, c)).collect())
        .collect();
    for &s in mids[c].iter().filter(|&&s| s > lo && s <= hi) {
        let splits = values.iter().all(|v| {
            let pos = v.iter().filter(|&&x| x >= s).count();
            pos >= need && v.len() - pos >= need
        });
        if !splits {
            continue;
        }
        let mut next = Vec::with_capacity(groups.len() * 2);
        for g in &groups {
            let (pos, neg): (Vec<usize>, Vec<usize>) = g.iter().partition(|&&r| m.get(r, c) >= s);
            next.push(neg);
            next.push(pos);
        }
        chosen.push(s);
        if descend(m, cols, mids, next, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// `e(n+1)(4eβσ(X)/ε)^n`.
pub fn haussler_upper_bound(n: usize, epsilon: f64, beta: f64, total_measure: f64) -> f64 {
    log2_haussler_upper_bound(n, epsilon, beta, total_measure).exp2()
}

/// Base-2 logarithm of [`haussler_upper_bound`].
pub fn log2_haussler_upper_bound(n: usize, epsilon: f64, beta: f64, total_measure: f64) -> f64 {
    let nf = n as f64;
    let head = (E * (nf + 1.0)).log2();
    if n == 0 {
        head
    } else {
        head + nf * (4.0 * E * beta * total_measure / epsilon).log2()
    }
}

/// Greedy maximal subset with pairwise distance at least `epsilon`, scanning
/// indices in order.
pub fn greedy_separated_subset_by(
    count: usize,
    epsilon: f64,
    dist: impl Fn(usize, usize) -> f64,
) -> Vec<usize> {
    let cut = epsilon * (1.0 - 1e-12);
    let mut kept: Vec<usize> = Vec::new();
    for i in 0..count {
        if kept.iter().all(|&j| dist(i, j) >= cut) {
            kept.push(i);
        }
    }
    kept
}

/// [`greedy_separated_subset_by`] with quadrature `L¹` distances.
pub fn greedy_separated_subset(
    fields: &[Vec<f64>],
    epsilon: f64,
    grid: &QuadratureGrid,
) -> Result<Vec<usize>> {
    if let Some(f) = fields.iter().find(|f| f.len() != grid.n_points()) {
        return Err(Error::LengthMismatch {
            expected: grid.n_points(),
            actual: f.len(),
        });
    }
    let w = grid.weight();
    Ok(greedy_separated_subset_by(fields.len(), epsilon, |a, b| {
        fields[a]
            .iter()
            .zip(&fields[b])
            .map(|(x, y)| (x - y).abs())
            .sum::<f64>()
            * w
    }))
}

/// `⌈(128/ε²)(2·pdim·ln(34/ε) + ln(16/δ))⌉`, natural logarithms.
pub fn sample_complexity(epsilon: f64, delta: f64, pdim: usize) -> Result<u64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::invalid(
            "epsilon",
            format!("must lie in (0,1), got {epsilon}"),
        ));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid(
            "delta",
            format!("must lie in (0,1), got {delta}"),
        ));
    }
    let v = 128.0 / (epsilon * epsilon)
        * (2.0 * pdim as f64 * (34.0 / epsilon).ln() + (16.0 / delta).ln());
    Ok(v.ceil() as u64)
}

/// Separated count versus both entropy bounds at one level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyEstimate {
    pub epsilon: f64,
    pub n: usize,
    pub beta: f64,
    pub total_measure: f64,
    pub separated_count: usize,
    pub log2_haussler_upper: f64,
    /// `N_r/16`, the base-2 logarithm of the code-size lower bound.
    pub log2_exponential_lower: f64,
    /// `separated_count ≤ e(n+1)(4eβσ/ε)^n`.
    pub upper_consistent: bool,
}

/// Clamps the given approximants of the family members and counts a greedy
/// `C₁/2`-separated subset, bracketed by the Haussler bound for
/// pseudo-dimension `n`.
pub fn clamped_projection_entropy(
    family: &AdversarialFamily,
    grid: &QuadratureGrid,
    approximants: &[Vec<f64>],
    n: usize,
) -> Result<EntropyEstimate> {
    let clamped: Vec<Vec<f64>> = approximants
        .par_iter()
        .map(|v| clamp(grid, v, &family.packing, &family.beta))
        .collect::<Result<_>>()?;
    let epsilon = family.c1 / 2.0;
    let kept = greedy_separated_subset(&clamped, epsilon, grid)?;
    let beta = family.beta.iter().cloned().fold(0.0, f64::max);
    let vol = grid.manifold().vol;
    let log2_haussler_upper = log2_haussler_upper_bound(n, epsilon, beta, vol);
    Ok(EntropyEstimate {
        epsilon,
        n,
        beta,
        total_measure: vol,
        separated_count: kept.len(),
        log2_haussler_upper,
        log2_exponential_lower: family.n_balls() as f64 / 16.0,
        upper_consistent: (kept.len() as f64).log2() <= log2_haussler_upper + 1e-12,
    })
}

/// Numerical evaluation of the entropy sandwich for one `n`. All bounds are
/// base-2 logarithms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub n: usize,
    pub r: f64,
    #[serde(rename = "N_r")]
    pub n_r: usize,
    /// `N_r/16`.
    pub lhs_log2: f64,
    /// Successive upper bounds: the Haussler bound with measured `α, β`; its
    /// rearrangement through `sup vol(B_r)^{-1}`; the packing and small-ball
    /// substitutions; the flat model envelope; the constant form; `C₄`.
    pub rhs_chain_log2: [f64; 6],
    /// Whether each line is at least its predecessor.
    pub chain_monotone: [bool; 5],
    /// Ratio of model shell integrals at `r` and `r/2` against `2^d`.
    pub sinh_ratio: f64,
    pub sinh_ratio_within_power: bool,
    /// Small-ball bound needs `r ≤ inj/2`.
    pub small_ball_applicable: bool,
    /// `N_r > 16[n log₂C₄ + log₂(e(n+1))]`.
    pub n_threshold_check: bool,
    pub n_threshold: f64,
    /// `lhs` exceeds every line of the chain.
    pub contradiction: bool,
    /// The radius came from the entropy branch of the radius choice.
    pub in_regime: bool,
    /// Set when the contradiction fails outside the entropy regime.
    pub flagged: bool,
    pub passes: bool,
}

/// Compares `2^{N_r/16}` with the chain of upper bounds down to
/// `e(n+1)C₄^n`, using the family's measured packing and ball volumes.
/// `in_regime` says whether the radius came from the entropy branch of the
/// radius schedule; a missing contradiction outside it is flagged, not failed.
pub fn entropy_contradiction_check(
    family: &AdversarialFamily,
    grid: &QuadratureGrid,
    n: usize,
    table: &ConstantsTable,
    in_regime: bool,
) -> Result<EntropyReport> {
    let m = grid.manifold();
    let d = m.d;
    let df = d as f64;
    let r = family.radius;
    let nr = family.n_balls() as f64;
    let nf = n as f64;
    let head = (E * (nf + 1.0)).log2();
    let line = |base: f64| head + nf * base.log2();
    let beta = family.beta.iter().cloned().fold(0.0, f64::max);
    let alpha = family.c1 / 2.0;
    let vmin = family
        .bumps
        .iter()
        .map(|b| b.ball_volume)
        .fold(f64::INFINITY, f64::min);
    let ratio = family.sinh_ratio;
    let c2 = croke_constant(d);
    let c3 = hyperbolic_volume_constant(d);
    let l0 = line(4.0 * E * beta * m.vol / alpha);
    let l1 = line(16.0 * E * m.vol * ratio / (nr * vmin));
    let l2 = line(16.0 * E * model_ball_volume(d, m.k, 2.0 * r)? * ratio / (c2 * r.powf(df)));
    let l3 = line(16.0 * E * c3 * (2.0 * r).powf(df) * ratio / (c2 * r.powf(df)));
    let l4 = line(2f64.powf(df + 4.0) * E * c3 * ratio / c2);
    let l5 = head + nf * table.log2_c4;
    let chain = [l0, l1, l2, l3, l4, l5];
    let tol = 1e-9;
    let mut chain_monotone = [false; 5];
    for k in 0..5 {
        chain_monotone[k] = chain[k + 1] >= chain[k] - tol * chain[k].abs().max(1.0);
    }
    let lhs = nr / 16.0;
    let n_threshold = 16.0 * (nf * table.log2_c4 + head);
    let contradiction = chain.iter().all(|&v| lhs > v);
    let flagged = !contradiction && !in_regime;
    Ok(EntropyReport {
        n,
        r,
        n_r: family.n_balls(),
        lhs_log2: lhs,
        rhs_chain_log2: chain,
        chain_monotone,
        sinh_ratio: ratio,
        sinh_ratio_within_power: ratio <= 2f64.powf(df),
        small_ball_applicable: r <= m.inj / 2.0,
        n_threshold_check: nr > n_threshold,
        n_threshold,
        contradiction,
        in_regime,
        flagged,
        passes: contradiction || flagged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{assemble_family, gv_code, BumpProfile};
    use crate::manifold::{Exponent, ManifoldSpec};
    use crate::model_space::{choose_r, RadiusBranch};
    use crate::packing::maximal_packing;
    use proptest::prelude::*;

    fn affine_class() -> Vec<(f64, f64)> {
        let steps: Vec<f64> = (-8..=8).map(|i| i as f64 * 0.25).collect();
        steps
            .iter()
            .flat_map(|&a| steps.iter().map(move |&b| (a, b)))
            .collect()
    }

    fn affine_matrix(xs: &[f64]) -> EvaluationMatrix {
        let rows: Vec<Vec<f64>> = affine_class()
            .iter()
            .map(|&(a, b)| xs.iter().map(|x| a * x + b).collect())
            .collect();
        EvaluationMatrix::from_rows(&rows).unwrap()
    }

    #[test]
    fn two_points_shattered_by_four_lines() {
        // x = 0, 1 with thresholds 0.5, 0.5 and the four witnesses.
        let witnesses = [(0.0, 1.0), (-1.0, 1.0), (1.0, 0.0), (0.0, 0.0)];
        let rows: Vec<Vec<f64>> = witnesses.iter().map(|&(a, b)| vec![b, a + b]).collect();
        let m = EvaluationMatrix::from_rows(&rows).unwrap();
        assert!(p_shatters(&m, &[0.5, 0.5]).unwrap());
        assert!(!p_shatters(&m.select_columns(&[0, 1]), &[2.0, 0.5]).unwrap());
    }

    #[test]
    fn three_points_with_raised_middle_threshold() {
        // Pattern (−, +, −) would need a line below the outer thresholds and
        // above the middle one, which is above their chord.
        let m = affine_matrix(&[0.0, 0.5, 1.0]);
        assert!(!p_shatters(&m, &[0.0, 1.0, 0.0]).unwrap());
    }

    #[test]
    fn one_point_two_constants() {
        let m = EvaluationMatrix::from_rows(&[vec![0.0], vec![1.0]]).unwrap();
        assert!(p_shatters(&m, &[0.5]).unwrap());
        assert!(!p_shatters(&m, &[1.5]).unwrap());
    }

    #[test]
    fn zero_counts_as_positive() {
        let m = EvaluationMatrix::from_rows(&[vec![0.0], vec![-1.0]]).unwrap();
        assert!(p_shatters(&m, &[0.0]).unwrap());
    }

    #[test]
    fn guards() {
        let m = EvaluationMatrix::new(1, 21, vec![0.0; 21]).unwrap();
        assert!(matches!(
            p_shatters(&m, &[0.0; 21]),
            Err(Error::TooManyPoints(21))
        ));
        let m = EvaluationMatrix::new(1, 31, vec![0.0; 31]).unwrap();
        assert!(pseudo_dim_bruteforce(&m, 3).is_err());
        let m = EvaluationMatrix::new(1, 3, vec![0.0; 3]).unwrap();
        assert!(pseudo_dim_bruteforce(&m, 13).is_err());
        assert!(EvaluationMatrix::new(1, 1, vec![f64::NAN]).is_err());
    }

    #[test]
    fn affine_pseudo_dimension_is_two() {
        let xs: Vec<f64> = (0..6).map(|i| i as f64 / 5.0).collect();
        let pd = pseudo_dim_bruteforce(&affine_matrix(&xs), 4).unwrap();
        assert_eq!(pd.dim, 2);
        assert!(!pd.capped);
        let w = pd.witness.unwrap();
        let sub = affine_matrix(&xs).select_columns(&w.points);
        assert!(p_shatters(&sub, &w.thresholds).unwrap());
    }

    fn span_matrix(j: usize, points: usize) -> EvaluationMatrix {
        // Columns of disjoint bumps: basis function t is 1 on point t only,
        // so the span restricted to those points is all of R^j.
        let grid: Vec<f64> = (-4..=4).map(|i| i as f64 * 0.5).collect();
        let mut coeffs: Vec<Vec<f64>> = vec![vec![]];
        for _ in 0..j {
            coeffs = coeffs
                .into_iter()
                .flat_map(|c| {
                    grid.iter().map(move |&g| {
                        let mut c = c.clone();
                        c.push(g);
                        c
                    })
                })
                .collect();
        }
        let basis = |t: usize, x: usize| {
            let centre = t as f64 * points as f64 / j as f64;
            let u = (x as f64 - centre) / 1.2;
            (1.0 - u * u).max(0.0)
        };
        let rows: Vec<Vec<f64>> = coeffs
            .iter()
            .map(|c| {
                (0..points)
                    .map(|x| c.iter().enumerate().map(|(t, a)| a * basis(t, x)).sum())
                    .collect()
            })
            .collect();
        EvaluationMatrix::from_rows(&rows).unwrap()
    }

    #[test]
    fn span_dimension_equals_pseudo_dimension() {
        for j in 1..=4 {
            let pd = pseudo_dim_bruteforce(&span_matrix(j, 8), 6).unwrap();
            assert_eq!(pd.dim, j, "span of {j}");
        }
        let constants: Vec<Vec<f64>> = (0..9).map(|c| vec![c as f64; 5]).collect();
        let pd =
            pseudo_dim_bruteforce(&EvaluationMatrix::from_rows(&constants).unwrap(), 4).unwrap();
        assert_eq!(pd.dim, 1);
    }

    #[test]
    fn combination_unranking() {
        let all: Vec<Vec<usize>> = (0..binomial(5, 3))
            .map(|k| unrank_combination(5, 3, k))
            .collect();
        assert_eq!(all.len(), 10);
        assert_eq!(all[0], vec![0, 1, 2]);
        assert_eq!(all[9], vec![2, 3, 4]);
        let mut sorted = all.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted, all);
    }

    #[test]
    fn haussler_examples() {
        assert!((haussler_upper_bound(0, 0.3, 1.0, 1.0) - E).abs() < 1e-12);
        assert!((haussler_upper_bound(1, 4.0 * E, 1.0, 1.0) - 2.0 * E).abs() < 1e-12);
        let v = haussler_upper_bound(2, 1.0, 0.5, 2.0);
        assert!((v - 3.0 * E * (4.0 * E).powi(2)).abs() < 1e-9);
        assert!((v - 963.9).abs() < 0.5);
    }

    #[test]
    fn sample_complexity_examples() {
        assert_eq!(sample_complexity(0.5, 0.5, 0).unwrap(), 1775);
        let direct = (12800.0 * (4.0 * 340f64.ln() + 1600f64.ln())).ceil() as u64;
        assert_eq!(sample_complexity(0.1, 0.01, 2).unwrap(), direct);
        assert!(sample_complexity(1.0, 0.5, 1).is_err());
        assert!(sample_complexity(0.5, 0.0, 1).is_err());
    }

    proptest! {
        #[test]
        fn sample_complexity_linear_in_pdim(eps in 0.01f64..0.99, delta in 0.01f64..0.99, k in 1usize..50) {
            let raw = |p: usize| 128.0 / (eps * eps) * (2.0 * p as f64 * (34.0 / eps).ln() + (16.0 / delta).ln());
            let step = 128.0 / (eps * eps) * 2.0 * k as f64 * (34.0 / eps).ln();
            prop_assert!((raw(2 * k) - raw(k) - step).abs() <= 1e-9 * raw(2 * k));
            let c = sample_complexity(eps, delta, k).unwrap() as f64;
            prop_assert!(c >= raw(k) && c < raw(k) + 1.0);
        }

        #[test]
        fn greedy_size_non_increasing(pts in proptest::collection::vec(0.0f64..1.0, 1..40), a in 0.0f64..0.5, b in 0.0f64..0.5) {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let dist = |i: usize, j: usize| (pts[i] - pts[j]).abs();
            let nl = greedy_separated_subset_by(pts.len(), lo, dist).len();
            let nh = greedy_separated_subset_by(pts.len(), hi, dist).len();
            prop_assert!(nh <= nl);
        }

        #[test]
        fn shattering_is_monotone_in_the_class(seed in 0u64..1000) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let rows: Vec<Vec<f64>> = (0..12).map(|_| (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
            let s: Vec<f64> = (0..3).map(|_| rng.gen_range(-0.5..0.5)).collect();
            let base = EvaluationMatrix::from_rows(&rows).unwrap();
            let mut more = rows.clone();
            more.extend((0..6).map(|_| (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<f64>>()));
            let bigger = EvaluationMatrix::from_rows(&more).unwrap();
            if p_shatters(&base, &s).unwrap() {
                prop_assert!(p_shatters(&bigger, &s).unwrap());
            }
        }
    }

    #[test]
    fn greedy_examples() {
        let g = QuadratureGrid::new(ManifoldSpec::torus(1, 1.0, -1.0).unwrap(), 64).unwrap();
        let a: Vec<f64> = (0..64).map(|i| (i as f64 / 10.0).sin()).collect();
        let b: Vec<f64> = a.iter().map(|x| x + 1.0).collect();
        let fields = vec![a.clone(), a.clone(), b.clone(), b];
        assert_eq!(
            greedy_separated_subset(&fields, 0.5, &g).unwrap(),
            vec![0, 2]
        );
        assert_eq!(greedy_separated_subset(&fields, 5.0, &g).unwrap(), vec![0]);
        assert!(greedy_separated_subset(&[vec![0.0; 3]], 0.5, &g).is_err());
    }

    #[test]
    fn family_members_are_c1_separated_and_bracketed() {
        let g = QuadratureGrid::new(ManifoldSpec::torus(2, 1.0, -1.0).unwrap(), 200).unwrap();
        let pack = maximal_packing(&g, 0.1, 0).unwrap();
        let code = gv_code(pack.count(), None, 3, 10_000).unwrap();
        let fam =
            assemble_family(&g, &pack, &code, Exponent::TWO, BumpProfile::first_order()).unwrap();
        let members: Vec<Vec<f64>> = (0..fam.n_members())
            .map(|j| fam.member_values(j, &g))
            .collect();
        let kept = greedy_separated_subset(&members, fam.c1, &g).unwrap();
        assert_eq!(kept.len(), fam.n_members());
        let est = clamped_projection_entropy(&fam, &g, &members, 3).unwrap();
        assert_eq!(est.separated_count, fam.n_members());
        assert!(est.upper_consistent);
    }

    #[test]
    fn contradiction_on_the_circle() {
        let m = ManifoldSpec::torus(1, 1.0, -1.0).unwrap();
        let table = ConstantsTable::for_manifold(&m, Exponent::TWO, Exponent::ONE);
        let n = 4;
        let choice = choose_r(&m, n, &table).unwrap();
        assert_eq!(choice.branch, RadiusBranch::Entropy);
        let res = (8.0 / choice.r).ceil() as usize * 2;
        let g = QuadratureGrid::new(m, res).unwrap();
        let pack = maximal_packing(&g, choice.r, 0).unwrap();
        let code = gv_code(pack.count(), Some(2), 0, 10).unwrap();
        let fam =
            assemble_family(&g, &pack, &code, Exponent::TWO, BumpProfile::first_order()).unwrap();
        let rep = entropy_contradiction_check(
            &fam,
            &g,
            n,
            &table,
            choice.branch == RadiusBranch::Entropy,
        )
        .unwrap();
        assert!(rep.n_threshold_check, "{rep:?}");
        assert!(rep.contradiction && rep.passes, "{rep:?}");
        assert!(rep.chain_monotone.iter().all(|&b| b), "{rep:?}");
        assert!(rep.sinh_ratio_within_power);
    }

    #[test]
    fn outside_regime_is_flagged() {
        // A large radius relative to n: the cap branch.
        let m = ManifoldSpec::torus(1, 1.0, -1.0).unwrap();
        let table = ConstantsTable::for_manifold(&m, Exponent::TWO, Exponent::ONE);
        let g = QuadratureGrid::new(m, 400).unwrap();
        let pack = maximal_packing(&g, 0.2, 0).unwrap();
        let code = gv_code(pack.count(), Some(1), 0, 10).unwrap();
        let fam =
            assemble_family(&g, &pack, &code, Exponent::TWO, BumpProfile::first_order()).unwrap();
        let rep = entropy_contradiction_check(&fam, &g, 1000, &table, false).unwrap();
        assert!(!rep.contradiction && rep.flagged && rep.passes);
        let rep = entropy_contradiction_check(&fam, &g, 1000, &table, true).unwrap();
        assert!(!rep.passes);
    }
}
