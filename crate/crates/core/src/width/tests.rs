use std::f64::consts::PI;

use super::*;
use crate::complexity::{pseudo_dim_bruteforce, EvaluationMatrix};
use crate::family::{gv_code, BumpProfile};
use crate::manifold::lp_norm;
use crate::packing::maximal_packing;

fn torus(d: usize, res: usize) -> QuadratureGrid {
    QuadratureGrid::new(ManifoldSpec::torus(d, 1.0, -1.0).unwrap(), res).unwrap()
}

fn field(g: &QuadratureGrid, f: impl Fn(f64) -> f64) -> Vec<f64> {
    (0..g.n_points()).map(|i| f(g.point(i)[0])).collect()
}

fn no_polish() -> SolverOptions {
    SolverOptions {
        polish_iterations: 0,
        ..SolverOptions::default()
    }
}

#[test]
fn members_of_the_span_have_zero_error() {
    let g = torus(1, 128);
    let class = make_hypothesis_class(&g, ClassKind::Span, 5).unwrap();
    let f = field(&g, |x| {
        0.3 - 1.2 * (2.0 * PI * x).sin() + 0.7 * (4.0 * PI * x).cos()
    });
    let e = best_approx_error(&g, &class, &f, Exponent::TWO, &no_polish()).unwrap();
    assert!(e.value < 1e-8);
}

#[test]
fn orthogonal_field_keeps_its_norm() {
    let g = torus(1, 128);
    let class = make_hypothesis_class(&g, ClassKind::Span, 3).unwrap();
    let f = field(&g, |x| (6.0 * PI * x).cos());
    let e = best_approx_error(&g, &class, &f, Exponent::TWO, &no_polish()).unwrap();
    let norm = lp_norm(&g, &f, Exponent::TWO).unwrap();
    assert!((e.value - norm).abs() < 1e-12);
}

fn toy() -> (QuadratureGrid, HypothesisClass, Vec<Vec<f64>>, Vec<f64>) {
    let g = torus(1, 64);
    let b1 = field(&g, |x| 1.0 + x);
    let b2 = field(&g, |x| (2.0 * PI * x).sin() + 0.3 * x * x);
    let class = HypothesisClass::from_fields(&g, vec![b1.clone(), b2.clone()]).unwrap();
    let f = field(&g, |x| (x - 0.3).abs() + 0.2 * (6.0 * PI * x).cos());
    (g, class, vec![b1, b2], f)
}

/// Minimum of `‖f − a b1 − b b2‖_q` over a coarse grid on `[−2, 2]²`,
/// refined around the best cell.
fn grid_search(g: &QuadratureGrid, basis: &[Vec<f64>], f: &[f64], q: Exponent) -> f64 {
    let eval = |a: f64, b: f64| {
        let r: Vec<f64> = f
            .iter()
            .zip(basis[0].iter().zip(&basis[1]))
            .map(|(v, (x, y))| v - a * x - b * y)
            .collect();
        lp_norm(g, &r, q).unwrap()
    };
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for i in 0..=400 {
        for j in 0..=400 {
            let (a, b) = (-2.0 + 0.01 * i as f64, -2.0 + 0.01 * j as f64);
            let v = eval(a, b);
            if v < best.0 {
                best = (v, a, b);
            }
        }
    }
    let (_, a0, b0) = best;
    for i in 0..=400 {
        for j in 0..=400 {
            let (a, b) = (a0 - 0.02 + 1e-4 * i as f64, b0 - 0.02 + 1e-4 * j as f64);
            best.0 = best.0.min(eval(a, b));
        }
    }
    best.0
}

#[test]
fn projection_matches_coefficient_search() {
    let (g, class, basis, f) = toy();
    let e = best_approx_error(&g, &class, &f, Exponent::TWO, &no_polish()).unwrap();
    let brute = grid_search(&g, &basis, &f, Exponent::TWO);
    assert!((e.value - brute).abs() < 1e-4, "{} vs {brute}", e.value);
}

#[test]
fn one_and_sup_bounds_bracket_the_search() {
    let (g, class, basis, f) = toy();
    for q in [Exponent::ONE, Exponent::INF] {
        let plain = best_approx_error(&g, &class, &f, q, &no_polish()).unwrap();
        let e = best_approx_error(&g, &class, &f, q, &SolverOptions::default()).unwrap();
        let brute = grid_search(&g, &basis, &f, q);
        assert!(e.lower <= brute * (1.0 + 1e-9), "{q}: {e:?} {brute}");
        assert!(e.value >= brute - 1e-4, "{q}: {e:?} {brute}");
        assert!(e.value <= plain.value);
        assert_eq!(e.polish_iterations, 500);
        assert!((plain.value - e.value - e.polish_gain).abs() < 1e-15);
    }
}

#[test]
fn cells_are_exact() {
    let g = torus(1, 120);
    let class = make_hypothesis_class(&g, ClassKind::PiecewiseConstant, 4).unwrap();
    assert_eq!(class.cell_centers().unwrap().len(), 4);
    let f = field(&g, |x| (x * 7.0).sin() + x * x);
    let cells: Vec<usize> = (0..g.n_points())
        .map(|i| class.basis.clone_cell(&g, i))
        .collect();
    for q in [Exponent::ONE, Exponent::TWO, Exponent::INF] {
        let e = best_approx_error(&g, &class, &f, q, &no_polish()).unwrap();
        assert_eq!(e.value, e.lower);
        // Best constant per cell by a fine scan over candidate levels.
        let mut total = 0.0f64;
        for c in 0..4 {
            let vals: Vec<f64> = f
                .iter()
                .zip(&cells)
                .filter(|(_, &k)| k == c)
                .map(|(v, _)| *v)
                .collect();
            let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let mut best = f64::INFINITY;
            for s in 0..=20_000 {
                let level = lo + (hi - lo) * s as f64 / 20_000.0;
                let r = vals.iter().map(|v| v - level);
                let err = if q == Exponent::INF {
                    r.fold(0.0, |m: f64, v| m.max(v.abs()))
                } else if q == Exponent::ONE {
                    r.map(f64::abs).sum::<f64>() * g.weight()
                } else {
                    r.map(|v| v * v).sum::<f64>() * g.weight()
                };
                best = best.min(err);
            }
            if q == Exponent::INF {
                total = total.max(best);
            } else {
                total += best;
            }
        }
        let brute = if q == Exponent::TWO {
            total.sqrt()
        } else {
            total
        };
        assert!(
            (e.value - brute).abs() <= 1e-4 * brute.max(1e-3),
            "{q}: {} vs {brute}",
            e.value
        );
    }
}

impl Basis {
    fn clone_cell(&self, g: &QuadratureGrid, i: usize) -> usize {
        match self {
            Basis::Cells(c) => c.cell_of(g, i),
            _ => unreachable!(),
        }
    }
}

fn family_on(g: &QuadratureGrid, r: f64, p: Exponent, members: usize) -> AdversarialFamily {
    let pack = maximal_packing(g, r, 0).unwrap();
    let code = gv_code(pack.count(), Some(members), 5, 10_000).unwrap();
    assemble_family(g, &pack, &code, p, BumpProfile::first_order()).unwrap()
}

#[test]
fn bump_span_and_zero_class() {
    let g = torus(2, 100);
    let fam = family_on(&g, 0.15, Exponent::TWO, 3);
    let bumps: Vec<Vec<f64>> = fam
        .bumps
        .iter()
        .map(|b| {
            let mut v = vec![0.0; g.n_points()];
            b.for_each_node(&g, |i, dist| v[i] = b.value_at(dist));
            v
        })
        .collect();
    let class = HypothesisClass::from_fields(&g, bumps).unwrap();
    let w = family_width(&g, &fam, &class, Exponent::TWO, &no_polish()).unwrap();
    assert!(w.value < 1e-10);
    for q in [Exponent::ONE, Exponent::TWO, Exponent::INF] {
        let w = family_width(&g, &fam, &HypothesisClass::zero(), q, &no_polish()).unwrap();
        let direct = (0..fam.n_members())
            .map(|j| lp_norm(&g, &fam.member_values(j, &g), q).unwrap())
            .fold(0.0, f64::max);
        assert!((w.value - direct).abs() < 1e-12 * direct);
        assert!((w.lower - direct).abs() < 1e-12 * direct);
    }
}

#[test]
fn sparse_paths_agree_with_dense() {
    for (d, res, r) in [(1, 4000, 0.01), (2, 240, 0.05)] {
        let g = torus(d, res);
        let fam = family_on(&g, r, Exponent::TWO, 4);
        let sparse = SolverOptions {
            dense_work: 0.0,
            ..no_polish()
        };
        for kind in [ClassKind::Span, ClassKind::PiecewiseConstant] {
            let class = make_hypothesis_class(&g, kind, 9).unwrap();
            for q in [Exponent::ONE, Exponent::TWO, Exponent::INF] {
                let a = family_width(&g, &fam, &class, q, &no_polish()).unwrap();
                let b = family_width(&g, &fam, &class, q, &sparse).unwrap();
                assert_eq!(a.path, WidthPath::Dense);
                assert_eq!(b.path, WidthPath::Sparse);
                for (x, y) in a.per_member.iter().zip(&b.per_member) {
                    assert!(
                        (x.l2_residual - y.l2_residual).abs() <= 1e-9 * x.l2_residual,
                        "{kind:?} {q}"
                    );
                    assert!(
                        y.lower <= x.value * (1.0 + 1e-9),
                        "{kind:?} {q}: {y:?} {x:?}"
                    );
                    assert!(
                        x.lower <= y.value * (1.0 + 1e-9),
                        "{kind:?} {q}: {y:?} {x:?}"
                    );
                    if kind == ClassKind::PiecewiseConstant && q != Exponent::ONE {
                        assert!((x.value - y.value).abs() <= 1e-9 * x.value);
                    }
                }
            }
        }
    }
}

#[test]
fn nested_spans_give_non_increasing_width() {
    let g = torus(1, 2000);
    let fam = family_on(&g, 0.02, Exponent::TWO, 4);
    let mut last = f64::INFINITY;
    for n in [1, 3, 5, 9, 17] {
        let class = make_hypothesis_class(&g, ClassKind::Span, n).unwrap();
        let w = family_width(&g, &fam, &class, Exponent::TWO, &no_polish()).unwrap();
        assert!(w.value <= last * (1.0 + 1e-12));
        last = w.value;
    }
}

#[test]
fn scale_equivariance() {
    let (g, class, _, f) = toy();
    let c = 3.5;
    let scaled: Vec<f64> = f.iter().map(|v| c * v).collect();
    for q in [Exponent::ONE, Exponent::TWO, Exponent::INF] {
        let a = best_approx_error(&g, &class, &f, q, &SolverOptions::default()).unwrap();
        let b = best_approx_error(&g, &class, &scaled, q, &SolverOptions::default()).unwrap();
        assert!((b.value - c * a.value).abs() <= 1e-9 * b.value, "{q}");
        assert!((b.lower - c * a.lower).abs() <= 1e-9 * b.lower, "{q}");
    }
}

#[test]
fn three_dimensional_span_has_pseudo_dimension_three() {
    let g = torus(1, 64);
    let class = make_hypothesis_class(&g, ClassKind::Span, 3).unwrap();
    let points: Vec<usize> = (0..8).map(|i| i * 8 + 3).collect();
    let basis: Vec<Vec<f64>> = (0..3).map(|j| class.basis_field(&g, j)).collect();
    let levels = [-1.0, 0.0, 1.0];
    let mut rows = Vec::new();
    for &a in &levels {
        for &b in &levels {
            for &c in &levels {
                rows.push(
                    points
                        .iter()
                        .map(|&i| a * basis[0][i] + b * basis[1][i] + c * basis[2][i])
                        .collect(),
                );
            }
        }
    }
    let pd = pseudo_dim_bruteforce(&EvaluationMatrix::from_rows(&rows).unwrap(), 5).unwrap();
    assert_eq!(pd.dim, 3);
}

#[test]
fn dominance_on_the_circle() {
    let m = ManifoldSpec::torus(1, 1.0, -1.0).unwrap();
    for q in [Exponent::ONE, Exponent::TWO, Exponent::INF] {
        let n = 8;
        let table = ConstantsTable::for_manifold(&m, Exponent::TWO, q);
        let r = choose_r(&m, n, &table).unwrap().r;
        let g = QuadratureGrid::new(m, auto_resolution(&m, r)).unwrap();
        let fam = family_on(&g, r, Exponent::TWO, 4);
        let bound = theoretical_width_bound(&m, n, Exponent::TWO, q, 1, 1.0).unwrap();
        for kind in [ClassKind::Span, ClassKind::PiecewiseConstant] {
            let class = make_hypothesis_class(&g, kind, n).unwrap();
            let w = family_width(&g, &fam, &class, q, &SolverOptions::default()).unwrap();
            assert!(w.lower >= bound, "{q} {kind:?}: {} < {bound}", w.lower);
            let h = holder_chain_check(&g, &fam, &class, q, &no_polish()).unwrap();
            assert!(h.passes, "{q} {kind:?}: {h:?}");
        }
    }
}

#[test]
fn holder_factor_per_exponent() {
    let g = QuadratureGrid::new(ManifoldSpec::torus(1, 2.0, -1.0).unwrap(), 4000).unwrap();
    let fam = family_on(&g, 0.02, Exponent::TWO, 2);
    let class = make_hypothesis_class(&g, ClassKind::Span, 5).unwrap();
    let one = holder_chain_check(&g, &fam, &class, Exponent::ONE, &no_polish()).unwrap();
    assert_eq!(one.vol_factor, 1.0);
    assert_eq!(one.dist_q_lower, one.dist_1_lower);
    let inf = holder_chain_check(&g, &fam, &class, Exponent::INF, &no_polish()).unwrap();
    assert!((inf.vol_factor - 0.5).abs() < 1e-15);
    let two = holder_chain_check(&g, &fam, &class, Exponent::TWO, &no_polish()).unwrap();
    assert!(two.links[0] && inf.links[0]);
}

#[test]
fn small_sweep_on_the_circle() {
    let mut cfg = SweepConfig::new(ManifoldSpec::torus(1, 1.0, -1.0).unwrap(), vec![16, 32, 64]);
    cfg.max_members = 2;
    let rep = width_sweep(&cfg).unwrap();
    assert!(rep.complete && rep.passes, "{rep:?}");
    assert!((rep.slope.unwrap() + 1.0).abs() < 0.1);
    for row in &rep.rows {
        assert_eq!(row.branch, RadiusBranch::Entropy);
        assert!(row.entropy.as_ref().unwrap().contradiction);
    }
    let again = width_sweep(&cfg).unwrap();
    assert_eq!(rep, again);
}

#[test]
fn sweep_edge_cases() {
    let m = ManifoldSpec::torus(1, 1.0, -1.0).unwrap();
    let mut cfg = SweepConfig::new(m, vec![4]);
    cfg.max_members = 2;
    let rep = width_sweep(&cfg).unwrap();
    assert_eq!(rep.slope, None);
    assert!(rep.passes);
    let mut cfg = SweepConfig::new(m, vec![4, 8, 4096]);
    cfg.max_members = 2;
    cfg.max_grid_points = 100_000;
    let rep = width_sweep(&cfg).unwrap();
    assert!(!rep.complete && !rep.passes);
    assert_eq!(rep.rows.len(), 2);
    assert!(rep.error.unwrap().contains("4096"));
    assert!(width_sweep(&SweepConfig::new(m, vec![8, 4])).is_err());
    assert!(make_hypothesis_class(&torus(1, 64), ClassKind::Span, 0).is_err());
}

#[test]
fn sphere_span_and_cells() {
    let g = QuadratureGrid::new(ManifoldSpec::sphere(1.0, -1.0).unwrap(), 4000).unwrap();
    let fam = family_on(&g, 0.5, Exponent::TWO, 3);
    for kind in [ClassKind::Span, ClassKind::PiecewiseConstant] {
        let class = make_hypothesis_class(&g, kind, 6).unwrap();
        let w = family_width(&g, &fam, &class, Exponent::TWO, &no_polish()).unwrap();
        assert_eq!(w.path, WidthPath::Dense);
        assert!(
            w.value > 0.0 && w.value <= w.per_member.iter().map(|a| a.value).fold(0.0, f64::max)
        );
    }
}
