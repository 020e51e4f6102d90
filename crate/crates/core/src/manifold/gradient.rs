use super::{angle_between, Layout, ManifoldKind, Point, QuadratureGrid, ScalarField};
use crate::{Error, Result};

const SPHERE_NEIGHBOURS: usize = 8;

/// Numerical `|∇u|`: central differences on the torus lattice, a local
/// tangent-plane least-squares fit over the 8 nearest nodes on the sphere.
pub fn gradient_norm_field(grid: &QuadratureGrid, field: &ScalarField) -> Result<ScalarField> {
    let u = &field.values;
    if u.len() != grid.n_points() {
        return Err(Error::LengthMismatch {
            expected: grid.n_points(),
            actual: u.len(),
        });
    }
    let grad = match grid.layout() {
        Layout::Lattice { spacing, .. } => lattice_gradient(grid, u, *spacing),
        Layout::Fibonacci { points } => sphere_gradient(grid, points, u)?,
    };
    ScalarField::with_grad(u.clone(), grad)
}

fn lattice_gradient(grid: &QuadratureGrid, u: &[f64], h: f64) -> Vec<f64> {
    let d = grid.manifold().d;
    (0..u.len())
        .map(|i| {
            let mut s = 0.0;
            for j in 0..d {
                let mut e = [0i64; 3];
                e[j] = 1;
                let fwd = u[grid.shifted(i, &e)];
                e[j] = -1;
                let bwd = u[grid.shifted(i, &e)];
                let g = (fwd - bwd) / (2.0 * h);
                s += g * g;
            }
            s.sqrt()
        })
        .collect()
}

/// Frobenius norm of the finite-difference Hessian on a torus lattice.
pub fn hessian_norm_field(grid: &QuadratureGrid, field: &ScalarField) -> Result<Vec<f64>> {
    let Layout::Lattice { spacing: h, .. } = *grid.layout() else {
        return Err(Error::UnsupportedManifold {
            kind: format!("{} (finite-difference Hessian)", ManifoldKind::Sphere),
            d: grid.manifold().d,
        });
    };
    let u = &field.values;
    if u.len() != grid.n_points() {
        return Err(Error::LengthMismatch {
            expected: grid.n_points(),
            actual: u.len(),
        });
    }
    let d = grid.manifold().d;
    let h2 = h * h;
    Ok((0..u.len())
        .map(|i| {
            let at = |a: i64, aj: usize, b: i64, bj: usize| {
                let mut o = [0i64; 3];
                o[aj] += a;
                o[bj] += b;
                u[grid.shifted(i, &o)]
            };
            let mut s = 0.0;
            for j in 0..d {
                let ujj = (at(1, j, 0, j) - 2.0 * u[i] + at(-1, j, 0, j)) / h2;
                s += ujj * ujj;
                for k in (j + 1)..d {
                    let ujk = (at(1, j, 1, k) - at(1, j, -1, k) - at(-1, j, 1, k)
                        + at(-1, j, -1, k))
                        / (4.0 * h2);
                    s += 2.0 * ujk * ujk;
                }
            }
            s.sqrt()
        })
        .collect())
}

fn sphere_gradient(grid: &QuadratureGrid, points: &[Point], u: &[f64]) -> Result<Vec<f64>> {
    let radius = grid.manifold().scale;
    let n = points.len();
    let base_angle = 3.0 * grid.spacing() / radius;
    let mut out = Vec::with_capacity(n);
    let mut cand: Vec<(f64, usize)> = Vec::new();
    for i in 0..n {
        let x = points[i];
        let mut angle = base_angle;
        loop {
            cand.clear();
            // Fibonacci nodes are sorted by height, so a height band is an
            // index window.
            let chord = 2.0 * radius * (angle / 2.0).min(std::f64::consts::FRAC_PI_2).sin();
            let zlo = (x[2] - chord) / radius;
            let zhi = (x[2] + chord) / radius;
            let jlo = (((1.0 - zhi) * n as f64 / 2.0 - 0.5).floor().max(0.0)) as usize;
            let jhi = (((1.0 - zlo) * n as f64 / 2.0 - 0.5).ceil().max(0.0) as usize).min(n - 1);
            for (j, y) in points.iter().enumerate().take(jhi + 1).skip(jlo) {
                if j != i {
                    let a = angle_between(&x, y);
                    if a <= angle {
                        cand.push((a, j));
                    }
                }
            }
            if cand.len() >= SPHERE_NEIGHBOURS || angle >= std::f64::consts::PI {
                break;
            }
            angle *= 2.0;
        }
        cand.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        cand.truncate(SPHERE_NEIGHBOURS);
        out.push(tangent_fit(&x, radius, &cand, points, u, i)?);
    }
    Ok(out)
}

/// Least-squares fit of `u(y) − u(x)` in log-map coordinates: quadratic
/// when the neighbours allow it, linear otherwise.
fn tangent_fit(
    x: &Point,
    radius: f64,
    neigh: &[(f64, usize)],
    points: &[Point],
    u: &[f64],
    i: usize,
) -> Result<f64> {
    let nrm = [x[0] / radius, x[1] / radius, x[2] / radius];
    let pick = if nrm[0].abs() < 0.9 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 1.0, 0.0]
    };
    let e1 = normalize(sub(pick, scale(nrm, dot(pick, nrm))));
    let e2 = cross(nrm, e1);
    let mut rows: Vec<([f64; 5], f64)> = Vec::with_capacity(neigh.len());
    for &(a, j) in neigh {
        let y = points[j];
        let v = sub(y, scale(nrm, dot(y, nrm)));
        let vn = dot(v, v).sqrt();
        if vn == 0.0 {
            continue;
        }
        let t = scale(v, radius * a / vn);
        let (s, r) = (dot(t, e1), dot(t, e2));
        rows.push(([s, r, 0.5 * s * s, s * r, 0.5 * r * r], u[j] - u[i]));
    }
    for width in [5usize, 2] {
        if rows.len() < width {
            continue;
        }
        let mut ata = vec![0.0; width * width];
        let mut atb = vec![0.0; width];
        for (a, b) in &rows {
            for p in 0..width {
                atb[p] += a[p] * b;
                for q in 0..width {
                    ata[p * width + q] += a[p] * a[q];
                }
            }
        }
        if let Some(sol) = solve_dense(&mut ata, &mut atb, width) {
            return Ok((sol[0] * sol[0] + sol[1] * sol[1]).sqrt());
        }
    }
    Err(Error::DegenerateNeighbours(i))
}

/// Gaussian elimination with partial pivoting; `None` when nearly singular.
fn solve_dense(a: &mut [f64], b: &mut [f64], n: usize) -> Option<Vec<f64>> {
    let scale_ref = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale_ref == 0.0 {
        return None;
    }
    for col in 0..n {
        let piv =
            (col..n).max_by(|&p, &q| a[p * n + col].abs().total_cmp(&a[q * n + col].abs()))?;
        if a[piv * n + col].abs() < 1e-12 * scale_ref {
            return None;
        }
        if piv != col {
            for k in 0..n {
                a.swap(piv * n + k, col * n + k);
            }
            b.swap(piv, col);
        }
        for row in (col + 1)..n {
            let f = a[row * n + col] / a[col * n + col];
            for k in col..n {
                a[row * n + k] -= f * a[col * n + k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut s = b[row];
        for k in (row + 1)..n {
            s -= a[row * n + k] * x[k];
        }
        x[row] = s / a[row * n + row];
    }
    Some(x)
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn scale(a: [f64; 3], s: f64) -> [f64; 3] {
    [a[0] * s, a[1] * s, a[2] * s]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn normalize(a: [f64; 3]) -> [f64; 3] {
    scale(a, 1.0 / dot(a, a).sqrt())
}
