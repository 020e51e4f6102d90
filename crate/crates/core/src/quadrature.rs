//! One-dimensional adaptive Simpson integration.

const MAX_DEPTH: u32 = 48;

/// Integrates `f` over `[a, b]` to the requested relative tolerance.
pub(crate) fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rtol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    // Seed the absolute tolerance from a composite rule so tiny integrals
    // (near-zero radii) still get a relative error target.
    let n = 16;
    let h = (b - a) / n as f64;
    let mut coarse = 0.0;
    for i in 0..n {
        let x0 = a + i as f64 * h;
        let x1 = x0 + h;
        let xm = 0.5 * (x0 + x1);
        coarse += h / 6.0 * (f(x0) + 4.0 * f(xm) + f(x1));
    }
    let atol = (rtol * coarse.abs()).max(f64::MIN_POSITIVE);

    let mut total = 0.0;
    for i in 0..n {
        let x0 = a + i as f64 * h;
        let x1 = x0 + h;
        let xm = 0.5 * (x0 + x1);
        let (f0, fm, f1) = (f(x0), f(xm), f(x1));
        let whole = h / 6.0 * (f0 + 4.0 * fm + f1);
        total += recurse(&f, x0, x1, f0, fm, f1, whole, atol / n as f64, MAX_DEPTH);
    }
    total
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate(|x| x * x * x, 0.0, 2.0, 1e-12);
        assert!((v - 4.0).abs() < 1e-12);
    }

    #[test]
    fn sinh_matches_cosh_antiderivative() {
        let v = integrate(f64::sinh, 0.0, 1.7, 1e-10);
        let exact = 1.7f64.cosh() - 1.0;
        assert!(((v - exact) / exact).abs() < 1e-10);
    }

    #[test]
    fn tiny_interval_keeps_relative_accuracy() {
        let v = integrate(f64::sinh, 0.0, 1e-5, 1e-9);
        let exact = (1e-5f64).cosh() - 1.0;
        let exact = if exact == 0.0 { 0.5e-10 } else { exact };
        assert!(((v - 0.5e-10) / 0.5e-10).abs() < 1e-6, "{v} vs {exact}");
    }
}
