//! Gauss-Legendre and Gauss-Jacobi rules via the Golub-Welsch algorithm.

use nalgebra::DMatrix;
use statrs::function::gamma::gamma;

/// Nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Eigen-decomposition of the symmetric tridiagonal Jacobi matrix; weights
/// from the first eigenvector components scaled by the zeroth moment.
fn golub_welsch(diag: &[f64], offdiag: &[f64], mu0: f64) -> GaussRule {
    let n = diag.len();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = diag[i];
        if i + 1 < n {
            m[(i, i + 1)] = offdiag[i];
            m[(i + 1, i)] = offdiag[i];
        }
    }
    let eig = m.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    GaussRule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    }
}

/// n-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> GaussRule {
    assert!(n >= 1);
    if n == 1 {
        return GaussRule {
            nodes: vec![0.0],
            weights: vec![2.0],
        };
    }
    let diag = vec![0.0; n];
    let offdiag: Vec<f64> = (1..n)
        .map(|k| {
            let k = k as f64;
            k / (4.0 * k * k - 1.0).sqrt()
        })
        .collect();
    golub_welsch(&diag, &offdiag, 2.0)
}

/// n-point Gauss-Jacobi rule on [-1, 1] with weight (1-x)^alpha (1+x)^beta.
pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> GaussRule {
    assert!(n >= 1 && alpha > -1.0 && beta > -1.0);
    if alpha == 0.0 && beta == 0.0 {
        return gauss_legendre(n);
    }
    let ab = alpha + beta;
    let mut diag = Vec::with_capacity(n);
    diag.push((beta - alpha) / (ab + 2.0));
    for k in 1..n {
        let k = k as f64;
        let denom = (2.0 * k + ab) * (2.0 * k + ab + 2.0);
        diag.push((beta * beta - alpha * alpha) / denom);
    }
    let mut offdiag = Vec::with_capacity(n.saturating_sub(1));
    if n > 1 {
        offdiag.push(
            (4.0 * (alpha + 1.0) * (beta + 1.0) / ((ab + 2.0).powi(2) * (ab + 3.0))).sqrt(),
        );
    }
    for k in 2..n {
        let k = k as f64;
        let num = 4.0 * k * (k + alpha) * (k + beta) * (k + ab);
        let den = (2.0 * k + ab).powi(2) * (2.0 * k + ab + 1.0) * (2.0 * k + ab - 1.0);
        offdiag.push((num / den).sqrt());
    }
    let mu0 = 2f64.powf(ab + 1.0) * gamma(alpha + 1.0) * gamma(beta + 1.0) / gamma(ab + 2.0);
    golub_welsch(&diag, &offdiag, mu0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn integrate(rule: &GaussRule, f: impl Fn(f64) -> f64) -> f64 {
        rule.nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    #[test]
    fn legendre_exactness() {
        let rule = gauss_legendre(8);
        // Degree 15 exactness.
        assert!((integrate(&rule, |x| x.powi(14)) - 2.0 / 15.0).abs() < 1e-14);
        assert!((integrate(&rule, |x| x.powi(15))).abs() < 1e-14);
        assert!((integrate(&rule, |_| 1.0) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn jacobi_moments() {
        for &beta in &[-0.5, -1.0 / 3.0, 0.25, 0.75] {
            let rule = gauss_jacobi(8, 0.0, beta);
            // integral of (1+x)^beta over [-1,1] = 2^(beta+1)/(beta+1)
            let m0 = 2f64.powf(beta + 1.0) / (beta + 1.0);
            assert!((integrate(&rule, |_| 1.0) - m0).abs() < 1e-12 * m0.abs());
            // integral of x (1+x)^beta
            let m1 = 2f64.powf(beta + 2.0) / (beta + 2.0) - m0;
            assert!((integrate(&rule, |x| x) - m1).abs() < 1e-12);
        }
    }

    #[test]
    fn jacobi_weights_positive() {
        for &beta in &[-0.9, -0.5, 0.5, 0.9] {
            let rule = gauss_jacobi(8, 0.0, beta);
            assert!(rule.weights.iter().all(|&w| w > 0.0));
            assert!(rule.nodes.windows(2).all(|w| w[0] < w[1]));
        }
    }
}
