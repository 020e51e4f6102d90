use serde::{Deserialize, Serialize};

use super::{Exponent, QuadratureGrid};
use crate::{Error, Result};

/// Values of a function on grid nodes, optionally with `|∇u|` at each node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarField {
    pub values: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub grad_norm: Option<Vec<f64>>,
}

impl ScalarField {
    pub fn new(values: Vec<f64>) -> Self {
        Self {
            values,
            grad_norm: None,
        }
    }

    pub fn with_grad(values: Vec<f64>, grad_norm: Vec<f64>) -> Result<Self> {
        if grad_norm.len() != values.len() {
            return Err(Error::LengthMismatch {
                expected: values.len(),
                actual: grad_norm.len(),
            });
        }
        if grad_norm.iter().any(|g| !(*g >= 0.0)) {
            return Err(Error::invalid("grad_norm", "entries must be nonnegative"));
        }
        Ok(Self {
            values,
            grad_norm: Some(grad_norm),
        })
    }

    pub fn from_fn(grid: &QuadratureGrid, f: impl Fn(&super::Point) -> f64) -> Self {
        Self::new((0..grid.n_points()).map(|i| f(&grid.point(i))).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn lp_norm(&self, grid: &QuadratureGrid, p: Exponent) -> Result<f64> {
        lp_norm(grid, &self.values, p)
    }

    pub fn grad_lp_norm(&self, grid: &QuadratureGrid, p: Exponent) -> Result<Option<f64>> {
        self.grad_norm
            .as_ref()
            .map(|g| lp_norm(grid, g, p))
            .transpose()
    }
}

/// `(Σ w_i |v_i|^p)^{1/p}`, or `max |v_i|` when `p = ∞`.
pub fn lp_norm(grid: &QuadratureGrid, values: &[f64], p: Exponent) -> Result<f64> {
    if values.len() != grid.n_points() {
        return Err(Error::LengthMismatch {
            expected: grid.n_points(),
            actual: values.len(),
        });
    }
    Ok(weighted_lp(values.iter().copied(), grid.weight(), p))
}

/// Norm of a sparse set of values sharing the uniform weight `w`; absent
/// entries are zero.
pub(crate) fn weighted_lp(values: impl Iterator<Item = f64>, w: f64, p: Exponent) -> f64 {
    if p.is_infinite() {
        return values.fold(0.0, |m, v| m.max(v.abs()));
    }
    let pv = p.value();
    if pv == 1.0 {
        w * values.map(f64::abs).sum::<f64>()
    } else if pv == 2.0 {
        (w * values.map(|v| v * v).sum::<f64>()).sqrt()
    } else {
        (w * values.map(|v| v.abs().powf(pv)).sum::<f64>()).powf(1.0 / pv)
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::manifold::ManifoldSpec;

    fn torus2(res: usize) -> QuadratureGrid {
        QuadratureGrid::new(ManifoldSpec::torus(2, 1.0, -1.0).unwrap(), res).unwrap()
    }

    #[test]
    fn constant_field_norms() {
        let g = torus2(32);
        let one = ScalarField::new(vec![1.0; g.n_points()]);
        assert!((one.lp_norm(&g, Exponent::ONE).unwrap() - 1.0).abs() < 1e-12);
        let c = ScalarField::new(vec![-3.5; g.n_points()]);
        assert_eq!(c.lp_norm(&g, Exponent::INF).unwrap(), 3.5);
    }

    #[test]
    fn length_mismatch_is_error() {
        let g = torus2(16);
        assert!(matches!(
            lp_norm(&g, &[1.0, 2.0], Exponent::TWO),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(ScalarField::with_grad(vec![1.0], vec![1.0, 2.0]).is_err());
        assert!(ScalarField::with_grad(vec![1.0], vec![-1.0]).is_err());
    }

    #[test]
    fn spherical_cap_area() {
        let m = ManifoldSpec::sphere(1.0, -1.0).unwrap();
        let g = QuadratureGrid::new(m, 10_000).unwrap();
        let north = [0.0, 0.0, 1.0];
        let ind = ScalarField::from_fn(&g, |x| {
            if m.distance(x, &north) < 1.0 {
                1.0
            } else {
                0.0
            }
        });
        let area = ind.lp_norm(&g, Exponent::ONE).unwrap();
        let exact = 2.0 * PI * (1.0 - 1f64.cos());
        assert!((area - exact).abs() / exact < 0.01, "{area} vs {exact}");
    }

    fn smooth(x: &crate::manifold::Point) -> f64 {
        (2.0 * PI * x[0]).sin() * (2.0 * PI * x[1]).cos() + 0.3
    }

    #[test]
    fn normalized_norm_is_monotone_in_p() {
        let g = QuadratureGrid::new(ManifoldSpec::torus(2, 2.0, -1.0).unwrap(), 48).unwrap();
        let f = ScalarField::from_fn(&g, smooth);
        let vol = g.manifold().vol;
        let mut last = 0.0;
        for p in [1.0, 1.5, 2.0, 3.0, 7.0] {
            let v = f.lp_norm(&g, Exponent::new(p).unwrap()).unwrap() * vol.powf(-1.0 / p);
            assert!(v >= last - 1e-12);
            last = v;
        }
        assert!(f.lp_norm(&g, Exponent::INF).unwrap() >= last - 1e-12);
    }

    #[test]
    fn refinement_changes_norms_little() {
        for p in [Exponent::ONE, Exponent::TWO, Exponent::new(3.0).unwrap()] {
            let a = ScalarField::from_fn(&torus2(40), smooth)
                .lp_norm(&torus2(40), p)
                .unwrap();
            let b = ScalarField::from_fn(&torus2(80), smooth)
                .lp_norm(&torus2(80), p)
                .unwrap();
            assert!((a - b).abs() / b < 0.01);
        }
    }

    #[test]
    fn holder_chain_for_stored_fields() {
        let g = QuadratureGrid::new(ManifoldSpec::torus(2, 1.5, -1.0).unwrap(), 40).unwrap();
        let vol = g.manifold().vol;
        let f = ScalarField::from_fn(&g, smooth);
        let l1 = f.lp_norm(&g, Exponent::ONE).unwrap();
        for q in [Exponent::ONE, Exponent::TWO, Exponent::INF] {
            let lq = f.lp_norm(&g, q).unwrap();
            assert!(l1 <= lq * vol.powf(1.0 - q.reciprocal()) * (1.0 + 1e-12));
        }
    }
}
