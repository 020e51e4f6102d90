//! Constant-curvature model spaces and the explicit constants of the width
//! bound.

use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::manifold::{Exponent, ManifoldSpec, QuadratureGrid};
use crate::quadrature::integrate;
use crate::{Error, Result};

const RTOL: f64 = 1e-8;

/// Surface area of the unit sphere `S^{d−1}`: `2π^{d/2}/Γ(d/2)`.
pub fn unit_sphere_area(d: usize) -> f64 {
    2.0 * PI.powf(d as f64 / 2.0) / libm::tgamma(d as f64 / 2.0)
}

/// Volume of a geodesic ball of radius `rho` in the simply connected space of
/// constant curvature `k < 0`.
pub fn model_ball_volume(d: usize, k: f64, rho: f64) -> Result<f64> {
    if !(k < 0.0) {
        return Err(Error::NonNegativeCurvature(k));
    }
    if d == 0 {
        return Err(Error::invalid("d", "dimension must be at least 1"));
    }
    if rho <= 0.0 {
        return Ok(0.0);
    }
    let a = (-k).sqrt();
    if d == 1 {
        return Ok(2.0 * rho);
    }
    let e = (d - 1) as i32;
    Ok(unit_sphere_area(d) * integrate(|t| ((a * t).sinh() / a).powi(e), 0.0, rho, RTOL))
}

/// Geodesic ball volume in the unit round sphere `S^d` (curvature +1), with
/// the convention that the 0-dimensional ball has volume 1.
pub fn spherical_ball_volume(d: usize, rho: f64) -> f64 {
    match d {
        0 => 1.0,
        1 => 2.0 * rho,
        _ => {
            let e = (d - 1) as i32;
            unit_sphere_area(d) * integrate(|t| t.sin().powi(e), 0.0, rho, RTOL)
        }
    }
}

/// `∫_0^r s^{d−1} / ∫_0^{r/2} s^{d−1}` with `s(u) = sinh(u√|K|)`.
pub fn sinh_ratio(d: usize, k: f64, r: f64) -> f64 {
    if d <= 1 {
        return 2.0;
    }
    let a = (-k).abs().sqrt();
    let e = (d - 1) as i32;
    let f = |u: f64| {
        if a == 0.0 {
            u.powi(e)
        } else {
            ((a * u).sinh() / a).powi(e)
        }
    };
    integrate(f, 0.0, r, RTOL) / integrate(f, 0.0, r / 2.0, RTOL)
}

/// Bound on [`sinh_ratio`] that holds for every `r`: `2^d cosh(r√|K|)^{d−1}`.
pub fn sinh_ratio_envelope(d: usize, k: f64, r: f64) -> f64 {
    2f64.powi(d as i32) * (r * (-k).abs().sqrt()).cosh().powi(d as i32 - 1)
}

/// Croke's small-ball constant `C₂(d)`.
pub fn croke_constant(d: usize) -> f64 {
    let s_low = spherical_ball_volume(d - 1, 1.0);
    let s_top = spherical_ball_volume(d, 1.0);
    let df = d as f64;
    2f64.powi(d as i32 - 1) * s_low.powi(d as i32) / (df.powf(df) * s_top.powi(d as i32 - 1))
}

/// `C₃(d) = ω_d 2^{d−1}/d`, so that `vol_K(B_ρ) < C₃ ρ^d` for `ρ ≤ 2/√|K|`.
pub fn hyperbolic_volume_constant(d: usize) -> f64 {
    unit_sphere_area(d) * 2f64.powi(d as i32 - 1) / d as f64
}

/// `C₄(d) = 2^{2d+4} e C₃/C₂`.
pub fn entropy_base(d: usize) -> f64 {
    2f64.powi(2 * d as i32 + 4) * E * hyperbolic_volume_constant(d) / croke_constant(d)
}

/// `C₂(d) r^d`, a lower bound on `vol_M(B_r)` for `r ≤ inj/2`.
pub fn croke_lower_bound(d: usize, r: f64) -> f64 {
    croke_constant(d) * r.powi(d as i32)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantsTable {
    pub d: usize,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub log2_c4: f64,
    pub p: Exponent,
    pub q: Exponent,
    pub vol: f64,
    /// Width constant for first-order families.
    pub c5: f64,
}

impl ConstantsTable {
    pub fn new(d: usize, p: Exponent, q: Exponent, vol: f64) -> Self {
        let c2 = croke_constant(d);
        let c3 = hyperbolic_volume_constant(d);
        let c4 = entropy_base(d);
        let mut t = Self {
            d,
            c2,
            c3,
            c4,
            log2_c4: c4.log2(),
            p,
            q,
            vol,
            c5: 0.0,
        };
        t.c5 = t.c5_for(1, 1.0);
        t
    }

    pub fn for_manifold(m: &ManifoldSpec, p: Exponent, q: Exponent) -> Self {
        Self::new(m.d, p, q, m.vol)
    }

    /// Width constant for order-`k` families. Order one uses plateau `r/4`;
    /// higher orders use plateau `r^k / bump_constant`.
    pub fn c5_for(&self, k: u32, bump_constant: f64) -> f64 {
        let ip = self.p.reciprocal();
        let iq = self.q.reciprocal();
        let d = self.d as f64;
        let shared = self.vol.powf(iq - ip) * (self.c2 / self.c3).powf(1.0 - ip);
        if k <= 1 {
            2f64.powf(-2.0 * d - 5.0 + d * ip) * shared
        } else {
            2f64.powf(-2.0 * d - 3.0 + d * ip) * shared / bump_constant
        }
    }
}

/// `vol(M)/vol_K(B_{2r}) ≤ N_r ≤ vol_K(B_D)/vol_K(B_r)`.
pub fn packing_number_bounds(m: &ManifoldSpec, r: f64) -> Result<(f64, f64)> {
    if !(r > 0.0 && r < m.inj) {
        return Err(Error::RadiusTooLarge { r, inj: m.inj });
    }
    let lower = m.vol / model_ball_volume(m.d, m.k, 2.0 * r)?;
    let upper = model_ball_volume(m.d, m.k, m.diam)? / model_ball_volume(m.d, m.k, r)?;
    Ok((lower, upper))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileSample {
    pub r: f64,
    pub ball_volume: f64,
    pub model_volume: f64,
    pub ratio: f64,
}

/// `vol_M(B_r(center)) / vol_K(B_r)` along increasing radii.
pub fn bishop_gromov_profile(
    grid: &QuadratureGrid,
    center: usize,
    r_list: &[f64],
) -> Result<Vec<ProfileSample>> {
    if r_list.is_empty() {
        return Err(Error::Empty("r_list"));
    }
    if center >= grid.n_points() {
        return Err(Error::invalid(
            "center",
            format!("index {center} out of range"),
        ));
    }
    let m = grid.manifold();
    if r_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid(
            "r_list",
            "radii must be strictly increasing",
        ));
    }
    if r_list[r_list.len() - 1] > m.diam * (1.0 + 1e-12) || r_list[0] <= 0.0 {
        return Err(Error::invalid("r_list", "radii must lie in (0, diam]"));
    }
    r_list
        .iter()
        .map(|&r| {
            let ball_volume = grid.ball_volume(center, r);
            let model_volume = model_ball_volume(m.d, m.k, r)?;
            Ok(ProfileSample {
                r,
                ball_volume,
                model_volume,
                ratio: ball_volume / model_volume,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadiusBranch {
    /// Entropy-driven term `½(16 C₃/vol · [n log₂C₄ + log₂(e(n+1))])^{−1/d}`.
    Entropy,
    Curvature,
    Injectivity,
    Cap,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiusChoice {
    pub r: f64,
    pub branch: RadiusBranch,
    /// Entropy, curvature, injectivity and cap terms, in that order.
    pub terms: [f64; 4],
}

/// Minimum of the four admissible radii for approximating classes of
/// pseudo-dimension `n`.
pub fn choose_r(m: &ManifoldSpec, n: usize, table: &ConstantsTable) -> Result<RadiusChoice> {
    if n == 0 {
        return Err(Error::invalid("n", "pseudo-dimension must be at least 1"));
    }
    let nf = n as f64;
    let bracket = nf * table.log2_c4 + (E * (nf + 1.0)).log2();
    let entropy = 0.5 * (16.0 * table.c3 / m.vol * bracket).powf(-1.0 / m.d as f64);
    let terms = [entropy, 1.0 / (-m.k).sqrt(), m.inj / 2.0, 4.0];
    let branches = [
        RadiusBranch::Entropy,
        RadiusBranch::Curvature,
        RadiusBranch::Injectivity,
        RadiusBranch::Cap,
    ];
    let mut best = 0;
    for j in 1..4 {
        if terms[j] < terms[best] {
            best = j;
        }
    }
    Ok(RadiusChoice {
        r: terms[best],
        branch: branches[best],
        terms,
    })
}

/// `C₅ r(n)^k`, the lower bound on the order-`k` width.
pub fn theoretical_width_bound(
    m: &ManifoldSpec,
    n: usize,
    p: Exponent,
    q: Exponent,
    k: u32,
    bump_constant: f64,
) -> Result<f64> {
    let table = ConstantsTable::for_manifold(m, p, q);
    let r = choose_r(m, n, &table)?.r;
    Ok(table.c5_for(k, bump_constant) * r.powi(k as i32))
}

/// Smallest `n ≤ max_n` at which the radius schedule leaves its floors and
/// takes the entropy branch.
pub fn first_branch_threshold(m: &ManifoldSpec, max_n: usize) -> Option<usize> {
    let table = ConstantsTable::new(m.d, Exponent::ONE, Exponent::ONE, m.vol);
    (1..=max_n).find(|&n| {
        choose_r(m, n, &table)
            .map(|c| c.branch == RadiusBranch::Entropy)
            .unwrap_or(false)
    })
}
