//! Gauss–Legendre rules and the spectral integration matrix used for
//! collocation in time.

use std::f64::consts::PI;

/// Nodes and weights of the `m`-point Gauss–Legendre rule on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(m >= 1, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_m
        let mut x = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(m, x);
            dp = d;
            let step = p / d;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(m, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }
    (nodes, weights)
}

/// `(P_m(x), P_m'(x))` by the three-term recurrence.
fn legendre(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if m == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=m {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Composite rule on `[a, b]` with `panels` equal panels of `m` nodes each.
pub fn composite(a: f64, b: f64, panels: usize, m: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(m);
    let h = (b - a) / panels as f64;
    let mut nodes = Vec::with_capacity(panels * m);
    let mut weights = Vec::with_capacity(panels * m);
    for p in 0..panels {
        let left = a + p as f64 * h;
        for (xi, wi) in x.iter().zip(&w) {
            nodes.push(left + 0.5 * h * (xi + 1.0));
            weights.push(0.5 * h * wi);
        }
    }
    (nodes, weights)
}

/// Lagrange basis polynomial `l_j` through `nodes`, evaluated at `x`.
fn lagrange(nodes: &[f64], j: usize, x: f64) -> f64 {
    nodes.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, &xi)| (x - xi) / (nodes[j] - xi)).product()
}

/// `S[i][j] = int_{-1}^{x_i} l_j(x) dx` for the Gauss–Legendre nodes `x_i`, so that
/// `sum_j S[i][j] g(x_j)` integrates the interpolant of `g` from `-1` to `x_i`.
pub fn integration_matrix(m: usize) -> Vec<Vec<f64>> {
    let (x, _) = gauss_legendre(m);
    let (y, v) = gauss_legendre(m);
    x.iter()
        .map(|&xi| {
            let half = 0.5 * (xi + 1.0);
            (0..m)
                .map(|j| {
                    y.iter().zip(&v).map(|(yk, vk)| vk * lagrange(&x, j, -1.0 + half * (yk + 1.0))).sum::<f64>() * half
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn integrates_polynomials_exactly() {
        for m in [1, 2, 5, 16, 32] {
            let (x, w) = gauss_legendre(m);
            assert_relative_eq!(w.iter().sum::<f64>(), 2.0, epsilon = 1e-13);
            for deg in 0..(2 * m) {
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                let q: f64 = x.iter().zip(&w).map(|(a, b)| b * a.powi(deg as i32)).sum();
                assert!((q - exact).abs() < 1e-12, "m={m} deg={deg}: {q} vs {exact}");
            }
            assert!(x.windows(2).all(|p| p[0] < p[1]));
        }
    }

    #[test]
    fn composite_exp() {
        let (x, w) = composite(0.0, 3.0, 4, 8);
        let q: f64 = x.iter().zip(&w).map(|(a, b)| b * a.exp()).sum();
        assert_relative_eq!(q, 3f64.exp() - 1.0, max_relative = 1e-14);
    }

    #[test]
    fn integration_matrix_antiderivative() {
        let m = 10;
        let s = integration_matrix(m);
        let (x, _) = gauss_legendre(m);
        for (i, row) in s.iter().enumerate() {
            let q: f64 = row.iter().zip(&x).map(|(sij, xj)| sij * xj.powi(9)).sum();
            let exact = (x[i].powi(10) - 1.0) / 10.0;
            assert!((q - exact).abs() < 1e-11);
        }
    }
}
