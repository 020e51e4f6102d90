//! The adversarial Sobolev family: normalized bumps on a packing, signed
//! by a well-separated code.

mod bump;
mod code;

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::manifold::{
    hessian_norm_field, lp_norm, weighted_lp, Exponent, QuadratureGrid, ScalarField, BALL_EPS,
};
use crate::model_space::sinh_ratio;
use crate::packing::BallPacking;
use crate::{Error, Result};

pub use bump::{
    build_bump, chi, chi_prime, chi_second, Bump, BumpNorms, BumpProfile, DEFAULT_BUMP_CONSTANT,
};
pub use code::{default_code_target, guaranteed_size, gv_code, SignCode, CODE_CAP};

use bump::{bump_with_support, check_radius, Support};

/// Signed sums `f_a = N^{−1/p} Σ a_i φ_i` over the words of a code.
#[derive(Debug, Clone)]
pub struct AdversarialFamily {
    pub radius: f64,
    pub p: Exponent,
    pub profile: BumpProfile,
    pub packing: BallPacking,
    pub bumps: Vec<Bump>,
    pub code: SignCode,
    /// Clamp level `β_i` on each ball.
    pub beta: Vec<f64>,
    /// Separation constant `C₁(r)`.
    pub c1: f64,
    /// Model-space ratio `∫_0^r s^{d−1} / ∫_0^{r/2} s^{d−1}` used in `C₁`.
    pub sinh_ratio: f64,
}

impl AdversarialFamily {
    pub fn n_balls(&self) -> usize {
        self.bumps.len()
    }

    pub fn n_members(&self) -> usize {
        self.code.len()
    }

    /// `N^{−1/p}`.
    pub fn member_scale(&self) -> f64 {
        (self.n_balls() as f64).powf(-self.p.reciprocal())
    }

    /// Visits `(grid index, value)` over the support of member `j`.
    pub fn for_each_member_node(
        &self,
        j: usize,
        grid: &QuadratureGrid,
        mut f: impl FnMut(usize, f64),
    ) {
        let s = self.member_scale();
        for (i, b) in self.bumps.iter().enumerate() {
            let a = self.code.sign(j, i) * s;
            b.for_each_node(grid, |idx, dist| f(idx, a * b.value_at(dist)));
        }
    }

    pub fn member_values(&self, j: usize, grid: &QuadratureGrid) -> Vec<f64> {
        let mut v = vec![0.0; grid.n_points()];
        self.for_each_member_node(j, grid, |i, x| v[i] = x);
        v
    }

    /// Member `j` with its analytic gradient norm.
    pub fn member_field(&self, j: usize, grid: &QuadratureGrid) -> ScalarField {
        let s = self.member_scale();
        let mut values = vec![0.0; grid.n_points()];
        let mut grad = vec![0.0; grid.n_points()];
        for (i, b) in self.bumps.iter().enumerate() {
            let a = self.code.sign(j, i) * s;
            let gscale = s / b.ball_volume.powf(self.p.reciprocal());
            b.for_each_node(grid, |idx, dist| {
                values[idx] = a * b.value_at(dist);
                grad[idx] = gscale * self.profile.grad(self.radius, dist);
            });
        }
        ScalarField {
            values,
            grad_norm: Some(grad),
        }
    }

    /// `‖f_a‖_p`, `‖∇f_a‖_p` and (flat case) `‖∇²f_a‖_p` by sparse quadrature.
    pub fn member_norms(&self, j: usize, grid: &QuadratureGrid) -> BumpNorms {
        let w = grid.weight();
        let s = self.member_scale();
        let d = grid.manifold().d;
        let (mut vals, mut grads, mut hess) = (Vec::new(), Vec::new(), Vec::new());
        let flat = self
            .bumps
            .first()
            .is_some_and(|b| b.norms.hess_lp.is_some());
        for (i, b) in self.bumps.iter().enumerate() {
            let a = self.code.sign(j, i) * s;
            let gscale = s / b.ball_volume.powf(self.p.reciprocal());
            b.for_each_node(grid, |_, dist| {
                vals.push(a * b.value_at(dist));
                grads.push(gscale * self.profile.grad(self.radius, dist));
                if flat {
                    hess.push(gscale * self.profile.hessian(self.radius, dist, d));
                }
            });
        }
        BumpNorms {
            l1: weighted_lp(vals.iter().copied(), w, Exponent::ONE),
            lp: weighted_lp(vals.iter().copied(), w, self.p),
            grad_lp: weighted_lp(grads.into_iter(), w, self.p),
            hess_lp: flat.then(|| weighted_lp(hess.into_iter(), w, self.p)),
        }
    }

    /// `‖f_a − f_b‖₁` by quadrature over the union of supports.
    pub fn pair_l1_distance(&self, a: usize, b: usize, grid: &QuadratureGrid) -> f64 {
        let s = self.member_scale();
        let mut total = 0.0;
        for (i, bump) in self.bumps.iter().enumerate() {
            let diff = (self.code.sign(a, i) - self.code.sign(b, i)) * s;
            if diff != 0.0 {
                bump.for_each_node(grid, |_, dist| total += (diff * bump.value_at(dist)).abs());
            }
        }
        total * grid.weight()
    }

    /// Step-one lower bound `‖f_a‖₁ ≥ (A/N^{1/p}) Σ vol(B_{r/2})/vol(B_r)^{1/p}`.
    pub fn member_l1_lower_bound(&self) -> f64 {
        let a = self.profile.amplitude(self.radius);
        let ip = self.p.reciprocal();
        self.member_scale()
            * self
                .bumps
                .iter()
                .map(|b| a * b.half_ball_volume / b.ball_volume.powf(ip))
                .sum::<f64>()
    }

    pub fn manifest(&self, with_words: bool) -> FamilyManifest {
        FamilyManifest {
            r: self.radius,
            n_r: self.n_balls(),
            p: self.p,
            k: self.profile.k,
            bump_constant: self.profile.constant,
            members: self.n_members(),
            code_min_l1_distance: self.code.min_l1_distance,
            code_words: with_words.then(|| {
                (0..self.code.len())
                    .map(|j| self.code.word_string(j))
                    .collect()
            }),
            beta: self.beta.clone(),
            c1: self.c1,
            sinh_ratio: self.sinh_ratio,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyManifest {
    pub r: f64,
    #[serde(rename = "N_r")]
    pub n_r: usize,
    pub p: Exponent,
    pub k: u32,
    pub bump_constant: f64,
    pub members: usize,
    pub code_min_l1_distance: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub code_words: Option<Vec<String>>,
    pub beta: Vec<f64>,
    #[serde(rename = "C1")]
    pub c1: f64,
    pub sinh_ratio: f64,
}

/// Builds bumps on every packing center and signs them with the code.
/// Lattice bumps share one stencil.
pub fn assemble_family(
    grid: &QuadratureGrid,
    packing: &BallPacking,
    code: &SignCode,
    p: Exponent,
    profile: BumpProfile,
) -> Result<AdversarialFamily> {
    let n = packing.count();
    if code.m != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: code.m,
        });
    }
    if code.is_empty() {
        return Err(Error::Empty("code"));
    }
    let r = packing.radius;
    check_radius(grid, r)?;
    let bumps: Vec<Bump> = match grid.stencil(r) {
        Some(st) => {
            let st = Arc::new(st);
            let template = bump_with_support(
                grid,
                packing.centers[0],
                r,
                p,
                &profile,
                Support::Shared(st),
            );
            packing
                .centers
                .iter()
                .map(|&c| Bump {
                    center: c,
                    ..template.clone()
                })
                .collect()
        }
        None => packing
            .centers
            .par_iter()
            .map(|&c| {
                bump_with_support(grid, c, r, p, &profile, Support::Explicit(grid.ball(c, r)))
            })
            .collect(),
    };
    let m = grid.manifold();
    let ip = p.reciprocal();
    let nf = n as f64;
    let amp = profile.amplitude(r);
    let beta = bumps
        .iter()
        .map(|b| amp / (b.ball_volume.powf(ip) * nf.powf(ip)))
        .collect();
    let ratio = sinh_ratio(m.d, m.k, r);
    let inf_v = bumps
        .iter()
        .map(|b| b.ball_volume)
        .fold(f64::INFINITY, f64::min);
    let c1 = amp * nf.powf(1.0 - ip) * inf_v.powf(1.0 - ip) / (2.0 * ratio);
    Ok(AdversarialFamily {
        radius: r,
        p,
        profile,
        packing: packing.clone(),
        bumps,
        code: code.clone(),
        beta,
        c1,
        sinh_ratio: ratio,
    })
}

/// Clips values to `[−β_i, β_i]` on each ball `B_r(p_i)` and zeroes them off
/// the union of balls.
pub fn clamp(
    grid: &QuadratureGrid,
    values: &[f64],
    packing: &BallPacking,
    beta: &[f64],
) -> Result<Vec<f64>> {
    if values.len() != grid.n_points() {
        return Err(Error::LengthMismatch {
            expected: grid.n_points(),
            actual: values.len(),
        });
    }
    if beta.len() != packing.count() {
        return Err(Error::LengthMismatch {
            expected: packing.count(),
            actual: beta.len(),
        });
    }
    let mut out = vec![0.0; values.len()];
    let r = packing.radius;
    let stencil = grid.stencil(r);
    for (&c, &b) in packing.centers.iter().zip(beta) {
        let mut put = |i: usize| out[i] = values[i].clamp(-b, b);
        match &stencil {
            Some(st) => st.offsets.iter().for_each(|o| put(grid.shifted(c, o))),
            None => {
                let cut = r * (1.0 - BALL_EPS);
                (0..grid.n_points())
                    .filter(|&i| grid.distance(c, i) < cut)
                    .for_each(&mut put);
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MembershipReport {
    pub tolerance: f64,
    pub max_bump_lp: f64,
    pub max_bump_grad_lp: f64,
    pub max_bump_hess_lp: Option<f64>,
    pub max_member_lp: f64,
    pub max_member_grad_lp: f64,
    pub max_member_hess_lp: Option<f64>,
    /// Finite-difference Hessian norm of the first member, when computed.
    pub fd_member_hess_lp: Option<f64>,
    pub passes: bool,
}

/// Checks `‖·‖_p ≤ 1` and `‖∇·‖_p ≤ 1` (and `‖∇²·‖_p ≤ 1` for second-order
/// families) on every bump and member, within `tolerance`.
pub fn membership_report(
    family: &AdversarialFamily,
    grid: &QuadratureGrid,
    tolerance: f64,
    fd_hessian: bool,
) -> Result<MembershipReport> {
    let fold = |it: &mut dyn Iterator<Item = f64>| it.fold(0.0f64, f64::max);
    let max_bump_lp = fold(&mut family.bumps.iter().map(|b| b.norms.lp));
    let max_bump_grad_lp = fold(&mut family.bumps.iter().map(|b| b.norms.grad_lp));
    let second = family.profile.k >= 2;
    let max_bump_hess_lp = (second && family.bumps[0].norms.hess_lp.is_some())
        .then(|| fold(&mut family.bumps.iter().filter_map(|b| b.norms.hess_lp)));
    let members: Vec<BumpNorms> = (0..family.n_members())
        .into_par_iter()
        .map(|j| family.member_norms(j, grid))
        .collect();
    let max_member_lp = fold(&mut members.iter().map(|n| n.lp));
    let max_member_grad_lp = fold(&mut members.iter().map(|n| n.grad_lp));
    let max_member_hess_lp =
        max_bump_hess_lp.map(|_| fold(&mut members.iter().filter_map(|n| n.hess_lp)));
    let fd_member_hess_lp = if second && fd_hessian && grid.is_lattice() {
        let f = ScalarField::new(family.member_values(0, grid));
        let h = hessian_norm_field(grid, &f)?;
        Some(lp_norm(grid, &h, family.p)?)
    } else {
        None
    };
    let lim = 1.0 + tolerance;
    let mut passes = max_bump_lp <= lim
        && max_bump_grad_lp <= lim
        && max_member_lp <= lim
        && max_member_grad_lp <= lim;
    if second {
        passes &= max_bump_hess_lp.is_none_or(|v| v <= lim)
            && max_member_hess_lp.is_none_or(|v| v <= lim)
            && fd_member_hess_lp.is_none_or(|v| v <= 1.0 + tolerance.max(0.1));
    }
    Ok(MembershipReport {
        tolerance,
        max_bump_lp,
        max_bump_grad_lp,
        max_bump_hess_lp,
        max_member_lp,
        max_member_grad_lp,
        max_member_hess_lp,
        fd_member_hess_lp,
        passes,
    })
}

/// Successive lower bounds on `‖f − f′‖₁` for the closest pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeparationChain {
    pub hamming: usize,
    /// Quadrature distance.
    pub measured: f64,
    /// `Σ_I 2 N^{−1/p} ‖φ_i‖₁` over differing indices `I`.
    pub disjoint_sum: f64,
    /// Plateau bound `Σ_I 2 N^{−1/p} A vol(B_{r/2})/vol(B_r)^{1/p}`.
    pub plateau_bound: f64,
    /// Model-space bound with `vol(B_{r/2}) ≥ vol(B_r)/ratio`.
    pub comparison_bound: f64,
    pub c1: f64,
    /// Whether each successive inequality held numerically.
    pub links: [bool; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    pub members: usize,
    pub pairs: usize,
    pub min_distance: Option<f64>,
    pub closest_pair: Option<(usize, usize)>,
    pub c1: f64,
    pub tolerance: f64,
    pub passes: bool,
    pub chain: Option<SeparationChain>,
}

/// Minimum pairwise `L¹` distance over all members, compared with `C₁(r)`.
pub fn verify_separation(
    family: &AdversarialFamily,
    grid: &QuadratureGrid,
    tolerance: f64,
) -> SeparationReport {
    let m = family.n_members();
    let pairs: Vec<(usize, usize)> = (0..m)
        .flat_map(|a| ((a + 1)..m).map(move |b| (a, b)))
        .collect();
    let dists: Vec<f64> = pairs
        .par_iter()
        .map(|&(a, b)| family.pair_l1_distance(a, b, grid))
        .collect();
    let mut best: Option<(f64, (usize, usize))> = None;
    for (&d, &pair) in dists.iter().zip(&pairs) {
        if best.is_none_or(|(v, _)| d < v) {
            best = Some((d, pair));
        }
    }
    let chain = best.map(|(measured, (a, b))| separation_chain(family, a, b, measured));
    SeparationReport {
        members: m,
        pairs: pairs.len(),
        min_distance: best.map(|b| b.0),
        closest_pair: best.map(|b| b.1),
        c1: family.c1,
        tolerance,
        passes: best.is_none_or(|(d, _)| d >= family.c1 * (1.0 - tolerance)),
        chain,
    }
}

fn separation_chain(
    family: &AdversarialFamily,
    a: usize,
    b: usize,
    measured: f64,
) -> SeparationChain {
    let idx = family.code.differing(a, b);
    let s = 2.0 * family.member_scale();
    let amp = family.profile.amplitude(family.radius);
    let ip = family.p.reciprocal();
    let mut disjoint_sum = 0.0;
    let mut plateau_bound = 0.0;
    let mut comparison_bound = 0.0;
    for &i in &idx {
        let bump = &family.bumps[i];
        disjoint_sum += s * bump.norms.l1;
        plateau_bound += s * amp * bump.half_ball_volume / bump.ball_volume.powf(ip);
        comparison_bound += s * amp * bump.ball_volume.powf(1.0 - ip) / family.sinh_ratio;
    }
    let c1 = family.c1;
    let slack = 1e-9;
    SeparationChain {
        hamming: idx.len(),
        measured,
        disjoint_sum,
        plateau_bound,
        comparison_bound,
        c1,
        links: [
            (measured - disjoint_sum).abs() <= slack * disjoint_sum.max(1e-300),
            disjoint_sum >= plateau_bound * (1.0 - slack),
            plateau_bound >= comparison_bound * (1.0 - slack),
            comparison_bound >= c1 * (1.0 - slack),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::ManifoldSpec;
    use crate::packing::maximal_packing;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn square(res: usize) -> QuadratureGrid {
        QuadratureGrid::new(ManifoldSpec::torus(2, 1.0, -1.0).unwrap(), res).unwrap()
    }

    fn family(
        grid: &QuadratureGrid,
        r: f64,
        p: Exponent,
        words: Option<usize>,
    ) -> AdversarialFamily {
        let pack = maximal_packing(grid, r, 0).unwrap();
        let code = gv_code(pack.count(), words, 11, 100_000).unwrap();
        assemble_family(grid, &pack, &code, p, BumpProfile::first_order()).unwrap()
    }

    #[test]
    fn all_plus_member_norm() {
        let g = square(200);
        let f = family(&g, 0.1, Exponent::TWO, Some(2));
        let n = f.member_norms(0, &g);
        assert!(n.lp <= 1.0 && n.grad_lp <= 1.0);
        // Disjoint supports: ‖f‖_p^p = N^{-1} Σ ‖φ_i‖_p^p.
        let direct: f64 =
            f.bumps.iter().map(|b| b.norms.lp.powi(2)).sum::<f64>() / f.n_balls() as f64;
        assert!((n.lp.powi(2) - direct).abs() < 1e-12);
        let dense = lp_norm(&g, &f.member_values(0, &g), Exponent::TWO).unwrap();
        assert!((dense - n.lp).abs() < 1e-12);
        assert!(n.l1 >= f.member_l1_lower_bound());
    }

    #[test]
    fn pair_distance_identity_and_zero() {
        let g = square(200);
        let f = family(&g, 0.1, Exponent::TWO, Some(4));
        for (a, b) in [(0, 1), (1, 2), (2, 3)] {
            let d = f.pair_l1_distance(a, b, &g);
            let expected: f64 = f
                .code
                .differing(a, b)
                .iter()
                .map(|&i| 2.0 * f.member_scale() * f.bumps[i].norms.l1)
                .sum();
            assert!((d - expected).abs() < 1e-12 * expected);
            let dense: f64 = f
                .member_values(a, &g)
                .iter()
                .zip(f.member_values(b, &g))
                .map(|(x, y)| (x - y).abs())
                .sum::<f64>()
                * g.weight();
            assert!((dense - d).abs() < 1e-12 * d);
        }
        assert_eq!(f.pair_l1_distance(2, 2, &g), 0.0);
    }

    #[test]
    fn separation_on_square_torus() {
        for p in [Exponent::ONE, Exponent::TWO, Exponent::INF] {
            let g = square(200);
            let f = family(&g, 0.1, p, None);
            let rep = verify_separation(&f, &g, 0.05);
            assert!(rep.passes, "{rep:?}");
            assert!(f.c1 > 0.0);
            let chain = rep.chain.unwrap();
            assert!(
                chain.links[0] && chain.links[1] && chain.links[3],
                "{chain:?}"
            );
        }
    }

    #[test]
    fn antipodal_pair_distance() {
        let g = square(200);
        let f = family(&g, 0.1, Exponent::TWO, Some(2));
        let rep = verify_separation(&f, &g, 0.05);
        let total: f64 = f.bumps.iter().map(|b| b.norms.l1).sum::<f64>() * 2.0 * f.member_scale();
        assert!((rep.min_distance.unwrap() - total).abs() < 1e-12 * total);
        assert!(rep.min_distance.unwrap() >= f.c1);
    }

    #[test]
    fn single_member_is_vacuous() {
        let g = square(200);
        let f = family(&g, 0.1, Exponent::TWO, Some(1));
        let rep = verify_separation(&f, &g, 0.05);
        assert!(rep.passes && rep.min_distance.is_none() && rep.chain.is_none());
    }

    #[test]
    fn clamp_properties() {
        let g = square(160);
        let f = family(&g, 0.1, Exponent::TWO, Some(4));
        let beta = &f.beta;
        for j in 0..f.n_members() {
            let v = f.member_values(j, &g);
            let c = clamp(&g, &v, &f.packing, beta).unwrap();
            for (x, y) in v.iter().zip(&c) {
                assert!((x - y).abs() < 1e-15);
            }
        }
        let big = 10.0 * beta.iter().cloned().fold(0.0, f64::max);
        let sat = clamp(&g, &vec![big; g.n_points()], &f.packing, beta).unwrap();
        let mut inside = vec![false; g.n_points()];
        for (i, b) in f.bumps.iter().enumerate() {
            b.for_each_node(&g, |idx, _| {
                inside[idx] = true;
                assert_eq!(sat[idx], beta[i]);
            });
        }
        for (s, &ins) in sat.iter().zip(&inside) {
            if !ins {
                assert_eq!(*s, 0.0);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let noise: Vec<f64> = (0..g.n_points())
            .map(|_| rng.gen_range(-0.1..0.1))
            .collect();
        let other: Vec<f64> = (0..g.n_points())
            .map(|_| rng.gen_range(-0.1..0.1))
            .collect();
        let cn = clamp(&g, &noise, &f.packing, beta).unwrap();
        let co = clamp(&g, &other, &f.packing, beta).unwrap();
        // Idempotent and 1-Lipschitz in L¹.
        assert_eq!(clamp(&g, &cn, &f.packing, beta).unwrap(), cn);
        let l1 = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>();
        assert!(l1(&cn, &co) <= l1(&noise, &other));
        for j in 0..f.n_members() {
            let fa = f.member_values(j, &g);
            for (x, (y, z)) in fa.iter().zip(noise.iter().zip(&cn)) {
                assert!((x - z).abs() <= (x - y).abs() + 1e-15);
            }
        }
        assert!(clamp(&g, &[0.0], &f.packing, beta).is_err());
    }

    #[test]
    fn membership_second_order() {
        let g = square(400);
        let pack = maximal_packing(&g, 0.12, 0).unwrap();
        let code = gv_code(pack.count(), Some(3), 1, 1000).unwrap();
        let prof = BumpProfile::second_order(DEFAULT_BUMP_CONSTANT);
        for p in [Exponent::ONE, Exponent::TWO, Exponent::INF] {
            let fam = assemble_family(&g, &pack, &code, p, prof).unwrap();
            let rep = membership_report(&fam, &g, 0.02, true).unwrap();
            assert!(rep.passes, "{p}: {rep:?}");
            let fd = rep.fd_member_hess_lp.unwrap();
            let an = rep.max_member_hess_lp.unwrap();
            assert!((fd - an).abs() / an < 0.1, "{fd} vs {an}");
        }
    }

    #[test]
    fn second_order_constant_eight_fails_hessian_sup() {
        let g = square(400);
        let pack = maximal_packing(&g, 0.12, 0).unwrap();
        let code = gv_code(pack.count(), Some(2), 1, 1000).unwrap();
        let fam = assemble_family(
            &g,
            &pack,
            &code,
            Exponent::INF,
            BumpProfile::second_order(8.0),
        )
        .unwrap();
        let rep = membership_report(&fam, &g, 0.02, false).unwrap();
        assert!(rep.max_member_hess_lp.unwrap() > 1.0);
        assert!(!rep.passes);
    }

    #[test]
    fn code_length_must_match() {
        let g = square(200);
        let pack = maximal_packing(&g, 0.1, 0).unwrap();
        let code = gv_code(pack.count() + 1, Some(2), 1, 10).unwrap();
        assert!(matches!(
            assemble_family(&g, &pack, &code, Exponent::TWO, BumpProfile::first_order()),
            Err(Error::LengthMismatch { .. })
        ));
    }
}
