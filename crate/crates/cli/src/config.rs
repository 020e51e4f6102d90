//! Run configuration, read from JSON and validated before any computation.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use widthlab_core::complexity::{MAX_CANDIDATES, MAX_SEARCH_SIZE};
use widthlab_core::width::ClassKind;
use widthlab_core::{Exponent, ManifoldKind, ManifoldSpec};

/// A usage or configuration problem. The binary maps it to exit code 2.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "configuration error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn bad(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ManifoldConfig {
    pub kind: ManifoldKind,
    /// Defaults to 2 for both kinds.
    pub d: Option<usize>,
    /// Torus side or sphere radius.
    pub scale: f64,
    #[serde(rename = "K")]
    pub k: f64,
}

impl Default for ManifoldConfig {
    fn default() -> Self {
        Self {
            kind: ManifoldKind::Torus,
            d: None,
            scale: 1.0,
            k: -1.0,
        }
    }
}

impl ManifoldConfig {
    pub fn spec(&self) -> Result<ManifoldSpec, ConfigError> {
        ManifoldSpec::new(self.kind, self.d.unwrap_or(2), self.scale, self.k)
            .map_err(|e| bad(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Relative slack on the Sobolev norms of bumps and members.
    pub membership: f64,
    /// Measured separation must reach `C₁ (1 − separation)`.
    pub separation: f64,
    /// Measured width must reach `bound (1 − dominance)`.
    pub dominance: f64,
    /// Allowed distance of the fitted slope from `−k/d`.
    pub slope: f64,
    /// Noise band on the volume-ratio profile.
    pub bishop_gromov: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            membership: 0.02,
            separation: 0.05,
            dominance: 0.05,
            slope: 0.15,
            bishop_gromov: 0.02,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PseudodimClass {
    /// `x ↦ a x + b` on points of `[0, 1]`, coefficients on a 17×17 grid.
    Affine,
    /// Fourier span of dimension `dim` on the circle, coefficients in
    /// `{−1, 0, 1}`.
    Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PseudodimConfig {
    pub class: PseudodimClass,
    pub dim: usize,
    pub points: usize,
}

impl Default for PseudodimConfig {
    fn default() -> Self {
        Self {
            class: PseudodimClass::Span,
            dim: 3,
            points: 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleTriple {
    pub epsilon: f64,
    pub delta: f64,
    pub pdim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub manifold: ManifoldConfig,
    /// Points per axis on a torus, total points on a sphere. Chosen from the
    /// radius when absent.
    pub resolution: Option<usize>,
    pub p: Exponent,
    pub q: Exponent,
    pub k: u32,
    /// Plateau divisor for second-order bumps.
    pub bump_constant: f64,
    /// Pseudo-dimension used by the single-family commands.
    pub n: usize,
    /// Fixed bump radius; taken from the radius schedule for `n` when absent.
    pub r: Option<f64>,
    pub n_list: Vec<usize>,
    pub seed: u64,
    pub max_members: usize,
    pub classes: Vec<ClassKind>,
    pub max_grid_points: usize,
    pub tolerances: Tolerances,
    pub pseudodim: PseudodimConfig,
    pub sample_complexity: Vec<SampleTriple>,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            manifold: ManifoldConfig::default(),
            resolution: None,
            p: Exponent::TWO,
            q: Exponent::TWO,
            k: 1,
            bump_constant: widthlab_core::family::DEFAULT_BUMP_CONSTANT,
            n: 16,
            r: None,
            n_list: vec![16, 32, 64, 128, 256],
            seed: 0,
            max_members: 8,
            classes: vec![ClassKind::Span, ClassKind::PiecewiseConstant],
            max_grid_points: 120_000_000,
            tolerances: Tolerances::default(),
            pseudodim: PseudodimConfig::default(),
            sample_complexity: vec![
                SampleTriple {
                    epsilon: 0.5,
                    delta: 0.5,
                    pdim: 0,
                },
                SampleTriple {
                    epsilon: 0.1,
                    delta: 0.05,
                    pdim: 3,
                },
            ],
            out: PathBuf::from("widthlab-out"),
        }
    }
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| bad(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| bad(e.to_string()))
    }

    /// Checks every field and returns the manifold it describes.
    pub fn validate(&self) -> Result<ManifoldSpec, ConfigError> {
        let m = self.manifold.spec()?;
        for (name, e) in [("q", self.q)] {
            if !(e == Exponent::ONE || e == Exponent::TWO || e.is_infinite()) {
                return Err(bad(format!("{name} must be 1, 2 or \"inf\", got {e}")));
            }
        }
        if !(1..=2).contains(&self.k) {
            return Err(bad(format!("k must be 1 or 2, got {}", self.k)));
        }
        if !(self.bump_constant > 0.0 && self.bump_constant.is_finite()) {
            return Err(bad("bump_constant must be positive"));
        }
        if self.n == 0 {
            return Err(bad("n must be at least 1"));
        }
        if let Some(r) = self.r {
            if !(r > 0.0 && r < m.inj) {
                return Err(bad(format!(
                    "r = {r} must lie in (0, inj) with inj = {}",
                    m.inj
                )));
            }
        }
        if self.n_list.is_empty() || self.n_list[0] == 0 {
            return Err(bad("n_list must be nonempty with positive entries"));
        }
        if self.n_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(bad("n_list must be strictly increasing"));
        }
        if self.max_members == 0 {
            return Err(bad("max_members must be positive"));
        }
        if self.classes.is_empty() {
            return Err(bad("classes must be nonempty"));
        }
        if self.resolution == Some(0) {
            return Err(bad("resolution must be positive"));
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("membership", t.membership),
            ("separation", t.separation),
            ("dominance", t.dominance),
            ("slope", t.slope),
            ("bishop_gromov", t.bishop_gromov),
        ] {
            if !(0.0..1.0).contains(&v) {
                return Err(bad(format!("tolerance {name} must lie in [0, 1), got {v}")));
            }
        }
        let pd = &self.pseudodim;
        if pd.dim == 0 || pd.dim >= MAX_SEARCH_SIZE {
            return Err(bad(format!(
                "pseudodim.dim must lie in [1, {}), got {}",
                MAX_SEARCH_SIZE, pd.dim
            )));
        }
        if pd.points <= pd.dim || pd.points > MAX_CANDIDATES {
            return Err(bad(format!(
                "pseudodim.points must lie in ({}, {MAX_CANDIDATES}], got {}",
                pd.dim, pd.points
            )));
        }
        if pd.class == PseudodimClass::Span && pd.dim > 5 {
            return Err(bad("pseudodim.dim is at most 5 for the span class"));
        }
        for s in &self.sample_complexity {
            if !(s.epsilon > 0.0 && s.epsilon < 1.0 && s.delta > 0.0 && s.delta < 1.0) {
                return Err(bad(format!(
                    "sample_complexity needs epsilon and delta in (0, 1), got {} and {}",
                    s.epsilon, s.delta
                )));
            }
        }
        Ok(m)
    }

    /// Hex SHA-256 of the compact JSON serialization.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }
}
