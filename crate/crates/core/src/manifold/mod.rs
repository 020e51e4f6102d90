//! Analytic compact manifolds, quadrature grids and scalar fields.

mod field;
mod gradient;
mod grid;

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

pub(crate) use field::weighted_lp;
pub use field::{lp_norm, ScalarField};
pub use gradient::{gradient_norm_field, hessian_norm_field};
pub use grid::{GridSpec, Layout, QuadratureGrid, Stencil};

/// Ambient coordinates of a grid point. Torus points use the first `d`
/// entries; sphere points are 3-vectors of length `R`.
pub type Point = [f64; 3];

/// Relative slack used for every open-ball membership and separation test.
pub const BALL_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ManifoldKind {
    Torus,
    Sphere,
}

impl fmt::Display for ManifoldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ManifoldKind::Torus => f.write_str("torus"),
            ManifoldKind::Sphere => f.write_str("sphere"),
        }
    }
}

/// A flat torus `T^d` of side `L` or a round sphere `S^2` of radius `R`,
/// together with the negative Ricci lower-bound parameter `K`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ManifoldSpec {
    pub kind: ManifoldKind,
    pub d: usize,
    pub scale: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub inj: f64,
    pub diam: f64,
    pub vol: f64,
}

impl ManifoldSpec {
    pub fn new(kind: ManifoldKind, d: usize, scale: f64, k: f64) -> Result<Self> {
        let supported = match kind {
            ManifoldKind::Torus => (1..=3).contains(&d),
            ManifoldKind::Sphere => d == 2,
        };
        if !supported {
            return Err(Error::UnsupportedManifold {
                kind: kind.to_string(),
                d,
            });
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::invalid(
                "scale",
                format!("must be positive, got {scale}"),
            ));
        }
        if !(k < 0.0 && k.is_finite()) {
            return Err(Error::NonNegativeCurvature(k));
        }
        let (inj, diam, vol) = match kind {
            ManifoldKind::Torus => (
                scale / 2.0,
                scale * (d as f64).sqrt() / 2.0,
                scale.powi(d as i32),
            ),
            ManifoldKind::Sphere => (PI * scale, PI * scale, 4.0 * PI * scale * scale),
        };
        Ok(Self {
            kind,
            d,
            scale,
            k,
            inj,
            diam,
            vol,
        })
    }

    pub fn torus(d: usize, side: f64, k: f64) -> Result<Self> {
        Self::new(ManifoldKind::Torus, d, side, k)
    }

    pub fn sphere(radius: f64, k: f64) -> Result<Self> {
        Self::new(ManifoldKind::Sphere, 2, radius, k)
    }

    /// Geodesic distance. Torus inputs are wrapped to the minimum image;
    /// sphere inputs are treated as directions and projected to radius `R`.
    pub fn distance(&self, x: &Point, y: &Point) -> f64 {
        match self.kind {
            ManifoldKind::Torus => {
                let l = self.scale;
                let mut s = 0.0;
                for j in 0..self.d {
                    let mut t = (x[j] - y[j]).rem_euclid(l);
                    if t > l - t {
                        t = l - t;
                    }
                    s += t * t;
                }
                s.sqrt()
            }
            ManifoldKind::Sphere => self.scale * angle_between(x, y),
        }
    }
}

/// Angle between two nonzero 3-vectors, accurate near 0 and π.
pub(crate) fn angle_between(x: &Point, y: &Point) -> f64 {
    let cross = [
        x[1] * y[2] - x[2] * y[1],
        x[2] * y[0] - x[0] * y[2],
        x[0] * y[1] - x[1] * y[0],
    ];
    let cn = (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]).sqrt();
    let dot = x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
    cn.atan2(dot)
}

/// Integrability exponent in `[1, ∞]`. Serialized as a number, or as the
/// string `"inf"` for the max-norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponent(f64);

impl Exponent {
    pub const ONE: Exponent = Exponent(1.0);
    pub const TWO: Exponent = Exponent(2.0);
    pub const INF: Exponent = Exponent(f64::INFINITY);

    pub fn new(p: f64) -> Result<Self> {
        if p >= 1.0 && !p.is_nan() {
            Ok(Exponent(p))
        } else {
            Err(Error::invalid(
                "exponent",
                format!("must lie in [1, inf], got {p}"),
            ))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    /// `1/p`, with `1/∞ = 0`.
    pub fn reciprocal(self) -> f64 {
        if self.is_infinite() {
            0.0
        } else {
            1.0 / self.0
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl std::str::FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(Exponent::INF),
            other => {
                let v: f64 = other
                    .parse()
                    .map_err(|_| Error::invalid("exponent", format!("cannot parse `{s}`")))?;
                Exponent::new(v)
            }
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_infinite() {
            serializer.serialize_str("inf")
        } else {
            serializer.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        let parsed = match Raw::deserialize(deserializer)? {
            Raw::Num(v) => Exponent::new(v),
            Raw::Text(s) => s.parse(),
        };
        parsed.map_err(serde::de::Error::custom)
    }
}
