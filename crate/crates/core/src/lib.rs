//! Numerical laboratory for lower bounds on nonlinear widths of Sobolev balls
//! on compact Riemannian manifolds.
//!
//! The crate builds, on flat tori and round spheres, the witness families used
//! to bound from below how well a Sobolev ball can be approximated by function
//! classes of bounded pseudo-dimension, and checks every intermediate
//! inequality numerically:
//!
//! - [`manifold`]: analytic manifolds, quadrature grids, scalar fields and
//!   `L^p` norms.
//! - [`model_space`]: constant-curvature ball volumes, Bishop–Gromov and Croke
//!   comparisons, and every explicit constant of the bound.
//! - [`packing`]: greedy maximal geodesic ball packings on grids.
//! - [`family`]: normalized bumps, well-separated sign codes, the signed-sum
//!   family and its clamping operator.
//! - [`complexity`]: P-shattering, brute-force pseudo-dimension, Haussler's
//!   metric-entropy bound and the entropy contradiction.
//! - [`width`]: hypothesis classes of known dimension, best approximation and
//!   width sweeps against the theoretical rate.

pub mod complexity;
mod error;
pub mod family;
pub mod manifold;
pub mod model_space;
pub mod packing;
mod quadrature;
pub mod width;

pub use error::{Error, Result};
pub use manifold::{Exponent, ManifoldKind, ManifoldSpec, QuadratureGrid, ScalarField};
