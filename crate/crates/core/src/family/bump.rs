use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::manifold::weighted_lp;
use crate::manifold::{Exponent, ManifoldKind, QuadratureGrid, ScalarField, Stencil};
use crate::{Error, Result};

/// Normalizing constant for second-order bumps unless configured otherwise.
pub const DEFAULT_BUMP_CONSTANT: f64 = 32.0;

/// Radial cutoff: 1 on `[0, ½]`, a reversed quintic smoothstep on `[½, 1]`,
/// 0 beyond. It is C² with `max |chi′| = 3.75`.
pub fn chi(s: f64) -> f64 {
    if s <= 0.5 {
        1.0
    } else if s >= 1.0 {
        0.0
    } else {
        let t = 2.0 * (s - 0.5);
        1.0 - t * t * t * (10.0 + t * (-15.0 + 6.0 * t))
    }
}

pub fn chi_prime(s: f64) -> f64 {
    if s <= 0.5 || s >= 1.0 {
        0.0
    } else {
        let t = 2.0 * (s - 0.5);
        -2.0 * 30.0 * t * t * (1.0 - t) * (1.0 - t)
    }
}

pub fn chi_second(s: f64) -> f64 {
    if s <= 0.5 || s >= 1.0 {
        0.0
    } else {
        let t = 2.0 * (s - 0.5);
        -4.0 * 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t)
    }
}

/// Smoothness order and normalization of the bumps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BumpProfile {
    pub k: u32,
    /// Divides `r^k` in the plateau value for `k ≥ 2`; ignored for `k = 1`.
    pub constant: f64,
}

impl BumpProfile {
    pub fn new(k: u32, constant: f64) -> Result<Self> {
        if !(1..=2).contains(&k) {
            return Err(Error::invalid(
                "k",
                format!("smoothness order must be 1 or 2, got {k}"),
            ));
        }
        if !(constant > 0.0 && constant.is_finite()) {
            return Err(Error::invalid("bump_constant", "must be positive"));
        }
        Ok(Self { k, constant })
    }

    pub fn first_order() -> Self {
        Self {
            k: 1,
            constant: 1.0,
        }
    }

    pub fn second_order(constant: f64) -> Self {
        Self { k: 2, constant }
    }

    /// Plateau height of the unnormalized bump: `r/4`, or `r^k/C`.
    pub fn amplitude(&self, r: f64) -> f64 {
        if self.k <= 1 {
            r / 4.0
        } else {
            r.powi(self.k as i32) / self.constant
        }
    }

    /// `|∇φ′|` at distance `rho` from the center.
    pub fn grad(&self, r: f64, rho: f64) -> f64 {
        self.amplitude(r) * chi_prime(rho / r).abs() / r
    }

    /// Frobenius norm of the Euclidean Hessian of `φ′` in dimension `d`.
    pub fn hessian(&self, r: f64, rho: f64, d: usize) -> f64 {
        let s = rho / r;
        if s <= 0.5 || s >= 1.0 {
            return 0.0;
        }
        let radial = chi_second(s);
        let tangential = chi_prime(s) / s;
        self.amplitude(r) / (r * r)
            * (radial * radial + (d as f64 - 1.0) * tangential * tangential).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Support {
    /// Lattice stencil shared by every bump of the same radius.
    Shared(Arc<Stencil>),
    Explicit(Vec<(usize, f64)>),
}

/// Quadrature norms of a normalized bump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BumpNorms {
    pub l1: f64,
    pub lp: f64,
    pub grad_lp: f64,
    /// Flat manifolds only.
    pub hess_lp: Option<f64>,
}

/// `φ = A chi(d(·, center)/r) / vol_M(B_r(center))^{1/p}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bump {
    pub center: usize,
    pub radius: f64,
    pub ball_volume: f64,
    pub half_ball_volume: f64,
    /// Plateau value `A / V^{1/p}`.
    pub height: f64,
    pub norms: BumpNorms,
    pub(crate) support: Support,
}

impl Bump {
    pub fn value_at(&self, rho: f64) -> f64 {
        self.height * chi(rho / self.radius)
    }

    /// Visits `(grid index, distance to center)` for every support node.
    pub fn for_each_node(&self, grid: &QuadratureGrid, mut f: impl FnMut(usize, f64)) {
        match &self.support {
            Support::Shared(st) => {
                for (o, &dist) in st.offsets.iter().zip(&st.distances) {
                    f(grid.shifted(self.center, o), dist);
                }
            }
            Support::Explicit(list) => {
                for &(i, dist) in list {
                    f(i, dist);
                }
            }
        }
    }

    /// The lattice stencil, when the support is shared.
    pub fn shared_stencil(&self) -> Option<&Stencil> {
        match &self.support {
            Support::Shared(st) => Some(st),
            Support::Explicit(_) => None,
        }
    }

    pub fn support_len(&self) -> usize {
        match &self.support {
            Support::Shared(st) => st.len(),
            Support::Explicit(list) => list.len(),
        }
    }

    /// Dense field with the analytic gradient norm attached.
    pub fn to_field(
        &self,
        grid: &QuadratureGrid,
        profile: &BumpProfile,
        p: Exponent,
    ) -> ScalarField {
        let mut values = vec![0.0; grid.n_points()];
        let mut grad = vec![0.0; grid.n_points()];
        let norm = self.ball_volume.powf(p.reciprocal());
        self.for_each_node(grid, |i, dist| {
            values[i] = self.value_at(dist);
            grad[i] = profile.grad(self.radius, dist) / norm;
        });
        ScalarField {
            values,
            grad_norm: Some(grad),
        }
    }
}

/// Builds the normalized bump around grid point `center`.
pub fn build_bump(
    grid: &QuadratureGrid,
    center: usize,
    r: f64,
    p: Exponent,
    profile: &BumpProfile,
) -> Result<Bump> {
    check_radius(grid, r)?;
    let support = match grid.stencil(r) {
        Some(st) => Support::Shared(Arc::new(st)),
        None => Support::Explicit(grid.ball(center, r)),
    };
    Ok(bump_with_support(grid, center, r, p, profile, support))
}

pub(crate) fn check_radius(grid: &QuadratureGrid, r: f64) -> Result<()> {
    let m = grid.manifold();
    if !(r > 0.0 && r < m.inj) {
        return Err(Error::RadiusTooLarge { r, inj: m.inj });
    }
    if r >= 4.0 {
        return Err(Error::invalid("r", "bump radius must be below 4"));
    }
    Ok(())
}

pub(crate) fn bump_with_support(
    grid: &QuadratureGrid,
    center: usize,
    r: f64,
    p: Exponent,
    profile: &BumpProfile,
    support: Support,
) -> Bump {
    let w = grid.weight();
    let mut bump = Bump {
        center,
        radius: r,
        ball_volume: 0.0,
        half_ball_volume: 0.0,
        height: 0.0,
        norms: BumpNorms {
            l1: 0.0,
            lp: 0.0,
            grad_lp: 0.0,
            hess_lp: None,
        },
        support,
    };
    let half = 0.5 * r * (1.0 - crate::manifold::BALL_EPS);
    let mut count = 0usize;
    let mut half_count = 0usize;
    let mut dists = Vec::with_capacity(bump.support_len());
    bump.for_each_node(grid, |_, dist| {
        count += 1;
        if dist < half {
            half_count += 1;
        }
        dists.push(dist);
    });
    bump.ball_volume = count as f64 * w;
    bump.half_ball_volume = half_count as f64 * w;
    let norm = bump.ball_volume.powf(p.reciprocal());
    bump.height = profile.amplitude(r) / norm;
    let d = grid.manifold().d;
    let vals = || dists.iter().map(|&x| bump.height * chi(x / r));
    let grads = || dists.iter().map(|&x| profile.grad(r, x) / norm);
    bump.norms = BumpNorms {
        l1: weighted_lp(vals(), w, Exponent::ONE),
        lp: weighted_lp(vals(), w, p),
        grad_lp: weighted_lp(grads(), w, p),
        hess_lp: (grid.manifold().kind == ManifoldKind::Torus)
            .then(|| weighted_lp(dists.iter().map(|&x| profile.hessian(r, x, d) / norm), w, p)),
    };
    bump
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::manifold::{gradient_norm_field, hessian_norm_field, ManifoldSpec};

    #[test]
    fn cutoff_shape() {
        assert_eq!(chi(0.0), 1.0);
        assert_eq!(chi(0.5), 1.0);
        assert_eq!(chi(1.0), 0.0);
        assert_eq!(chi(3.0), 0.0);
        let mut max_slope: f64 = 0.0;
        let mut max_curv: f64 = 0.0;
        for i in 0..=100_000 {
            let s = 0.5 + 0.5 * i as f64 / 100_000.0;
            max_slope = max_slope.max(chi_prime(s).abs());
            max_curv = max_curv.max(chi_second(s).abs());
            let h = 1e-6;
            if s > 0.5 + h && s < 1.0 - h {
                let fd = (chi(s + h) - chi(s - h)) / (2.0 * h);
                assert!((fd - chi_prime(s)).abs() < 1e-6);
                let fd2 = (chi_prime(s + h) - chi_prime(s - h)) / (2.0 * h);
                assert!((fd2 - chi_second(s)).abs() < 1e-4);
            }
        }
        assert!((max_slope - 3.75).abs() < 1e-9);
        assert!(max_slope < 4.0);
        assert!((max_curv - 23.094).abs() < 1e-2);
    }

    fn square(res: usize) -> QuadratureGrid {
        QuadratureGrid::new(ManifoldSpec::torus(2, 1.0, -1.0).unwrap(), res).unwrap()
    }

    #[test]
    fn plateau_and_support() {
        let g = square(200);
        let prof = BumpProfile::first_order();
        let b = build_bump(&g, 0, 0.2, Exponent::TWO, &prof).unwrap();
        let f = b.to_field(&g, &prof, Exponent::TWO);
        let expected = 0.2 / (4.0 * b.ball_volume.sqrt());
        assert!((f.values[0] - expected).abs() < 1e-15);
        for i in 0..g.n_points() {
            if g.distance(0, i) >= 0.2 {
                assert_eq!(f.values[i], 0.0);
            }
        }
    }

    #[test]
    fn l1_lower_bound_against_flat_volumes() {
        let g = square(400);
        let r = 0.2;
        let b = build_bump(&g, 0, r, Exponent::TWO, &BumpProfile::first_order()).unwrap();
        let bound = (r / 4.0) * PI * (r / 2.0) * (r / 2.0) / (PI * r * r).sqrt();
        assert!(b.norms.l1 >= bound);
        assert!((b.ball_volume - PI * r * r).abs() / (PI * r * r) < 0.01);
    }

    #[test]
    fn first_order_membership_and_numeric_gradient() {
        let g = square(400);
        let prof = BumpProfile::first_order();
        for p in [Exponent::ONE, Exponent::TWO, Exponent::INF] {
            let b = build_bump(&g, 0, 0.15, p, &prof).unwrap();
            assert!(b.norms.lp <= 1.0 && b.norms.grad_lp <= 1.0);
            let f = b.to_field(&g, &prof, p);
            let numeric = gradient_norm_field(&g, &ScalarField::new(f.values.clone())).unwrap();
            let a = f.grad_lp_norm(&g, p).unwrap().unwrap();
            let n = numeric.grad_lp_norm(&g, p).unwrap().unwrap();
            assert!((a - n).abs() / a < 0.02, "{p}: {a} vs {n}");
        }
    }

    #[test]
    fn second_order_hessian_matches_finite_differences() {
        let g = square(512);
        let prof = BumpProfile::second_order(DEFAULT_BUMP_CONSTANT);
        let b = build_bump(&g, 0, 0.1, Exponent::TWO, &prof).unwrap();
        let f = b.to_field(&g, &prof, Exponent::TWO);
        let h = hessian_norm_field(&g, &f).unwrap();
        let fd = crate::manifold::lp_norm(&g, &h, Exponent::TWO).unwrap();
        let analytic = b.norms.hess_lp.unwrap();
        assert!((fd - analytic).abs() / analytic < 0.1, "{fd} vs {analytic}");
        assert!(analytic <= 1.0);
    }

    #[test]
    fn profile_validation() {
        assert!(BumpProfile::new(3, 8.0).is_err());
        assert!(BumpProfile::new(2, 0.0).is_err());
        assert_eq!(BumpProfile::new(2, 8.0).unwrap().amplitude(0.5), 0.25 / 8.0);
        let g = square(64);
        assert!(matches!(
            build_bump(&g, 0, 0.5, Exponent::ONE, &BumpProfile::first_order()),
            Err(Error::RadiusTooLarge { .. })
        ));
    }

    #[test]
    fn sphere_bump_uses_explicit_support() {
        let g = QuadratureGrid::new(ManifoldSpec::sphere(1.0, -1.0).unwrap(), 10_000).unwrap();
        let b = build_bump(&g, 17, 0.6, Exponent::TWO, &BumpProfile::first_order()).unwrap();
        assert!(matches!(b.support, Support::Explicit(_)));
        let cap = 2.0 * PI * (1.0 - 0.6f64.cos());
        assert!((b.ball_volume - cap).abs() / cap < 0.02);
        assert!(b.norms.hess_lp.is_none());
    }
}
