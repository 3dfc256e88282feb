//! Finite-difference and quadrature helpers shared by the diagnostics and
//! scenario audits. First derivatives are second-order central in the
//! interior and second-order one-sided at the two end nodes.

/// First derivative of nodal values with spacing `dx`.
pub fn derivative(f: &[f64], dx: f64) -> Vec<f64> {
    let n = f.len();
    let mut d = vec![0.0; n];
    if n < 3 {
        return d;
    }
    let inv = 0.5 / dx;
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) * inv;
    for i in 1..n - 1 {
        d[i] = (f[i + 1] - f[i - 1]) * inv;
    }
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) * inv;
    d
}

/// Second derivative; the end nodes use the four-point one-sided formula.
pub fn second_derivative(f: &[f64], dx: f64) -> Vec<f64> {
    let n = f.len();
    let mut d = vec![0.0; n];
    if n < 4 {
        return d;
    }
    let inv = 1.0 / (dx * dx);
    d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) * inv;
    for i in 1..n - 1 {
        d[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) * inv;
    }
    d[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) * inv;
    d
}

/// Composite trapezoid rule over the nodes.
pub fn trapezoid(f: &[f64], dx: f64) -> f64 {
    match f.len() {
        0 | 1 => 0.0,
        n => {
            let inner: f64 = f[1..n - 1].iter().sum();
            dx * (inner + 0.5 * (f[0] + f[n - 1]))
        }
    }
}

/// Running trapezoid integral starting from zero at the first node.
pub fn cumulative_trapezoid(f: &[f64], dx: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(f.len());
    let mut acc = 0.0;
    for (i, &v) in f.iter().enumerate() {
        if i > 0 {
            acc += 0.5 * dx * (f[i - 1] + v);
        }
        out.push(acc);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_exact_on_quadratics() {
        let dx = 0.1;
        let f: Vec<f64> = (0..10).map(|i| (i as f64 * dx).powi(2)).collect();
        let d = derivative(&f, dx);
        for (i, v) in d.iter().enumerate() {
            assert!((v - 2.0 * i as f64 * dx).abs() < 1e-12, "node {i}: {v}");
        }
    }

    #[test]
    fn second_derivative_exact_on_cubics() {
        let dx = 0.25;
        let f: Vec<f64> = (0..8).map(|i| (i as f64 * dx).powi(3)).collect();
        let d = second_derivative(&f, dx);
        for (i, v) in d.iter().enumerate() {
            assert!((v - 6.0 * i as f64 * dx).abs() < 1e-10, "node {i}: {v}");
        }
    }

    #[test]
    fn trapezoid_linear_exact() {
        let f = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(trapezoid(&f, 0.5), 0.5 * (2.0 + 3.0 + 2.5));
        let c = cumulative_trapezoid(&f, 0.5);
        assert_eq!(c[0], 0.0);
        assert_eq!(*c.last().unwrap(), trapezoid(&f, 0.5));
    }
}
