//! Cubature rules on the unit disk: the midpoint rule on a polar cell grid
//! and a Gauss-Chebyshev-style tensor rule (Gauss-Legendre radially with the
//! r dr factor absorbed exactly, equispaced angularly).

use super::gauss::gauss_legendre;
use crate::Vec2;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiskRuleKind {
    Midpoint,
    Chebyshev,
}

impl DiskRuleKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "midpoint" => Some(Self::Midpoint),
            "chebyshev" => Some(Self::Chebyshev),
            _ => None,
        }
    }
}

/// Quadrature points strictly inside the unit disk with positive weights
/// summing to pi.
#[derive(Debug, Clone)]
pub struct DiskRule {
    pub points: Vec<Vec2>,
    pub weights: Vec<f64>,
}

impl DiskRule {
    pub fn build(kind: DiskRuleKind, n_r: usize, n_t: usize) -> DiskRule {
        match kind {
            DiskRuleKind::Midpoint => midpoint_disk_rule(n_r, n_t),
            DiskRuleKind::Chebyshev => chebyshev_disk_rule(n_r, n_t.max(2)),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Polar midpoint rule: n_r x n_t cells of uniform radial and angular
/// spacing, point at each cell center, weight equal to the exact cell area.
pub fn midpoint_disk_rule(n_r: usize, n_t: usize) -> DiskRule {
    assert!(n_r >= 1 && n_t >= 1);
    let mut points = Vec::with_capacity(n_r * n_t);
    let mut weights = Vec::with_capacity(n_r * n_t);
    let dt = 2.0 * PI / n_t as f64;
    for i in 1..=n_r {
        let r = (i as f64 - 0.5) / n_r as f64;
        let (r_in, r_out) = ((i as f64 - 1.0) / n_r as f64, i as f64 / n_r as f64);
        let w = 0.5 * (r_out * r_out - r_in * r_in) * dt;
        for m in 1..=n_t {
            let t = (m as f64 - 0.5) * dt;
            points.push(Vec2::new(r * t.cos(), r * t.sin()));
            weights.push(w);
        }
    }
    DiskRule { points, weights }
}

/// Tensor rule: radial positions r_i = sqrt(u_i) with (u_i, w_i) the n_r
/// point Gauss-Legendre rule on [0,1] (the substitution u = r^2 absorbs the
/// polar r dr factor exactly), equispaced angles with equal weights.
pub fn chebyshev_disk_rule(n_r: usize, n_t: usize) -> DiskRule {
    assert!(n_r >= 1 && n_t >= 2);
    let gl = gauss_legendre(n_r);
    let mut points = Vec::with_capacity(n_r * n_t);
    let mut weights = Vec::with_capacity(n_r * n_t);
    for i in 0..n_r {
        let u = 0.5 * (gl.nodes[i] + 1.0);
        let wu = 0.5 * gl.weights[i];
        let r = u.sqrt();
        let w = PI * wu / n_t as f64;
        // Half-spacing angular offset keeps every ray away from theta = 0,
        // where SC maps pin a prevertex (the integrand of transplanted rules
        // is singular there).
        for m in 0..n_t {
            let t = 2.0 * PI * (m as f64 + 0.5) / n_t as f64;
            points.push(Vec2::new(r * t.cos(), r * t.sin()));
            weights.push(w);
        }
    }
    DiskRule { points, weights }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn integrate(rule: &DiskRule, f: impl Fn(Vec2) -> f64) -> f64 {
        rule.points
            .iter()
            .zip(&rule.weights)
            .map(|(&p, &w)| w * f(p))
            .sum()
    }

    #[test]
    fn midpoint_single_cell() {
        let r = midpoint_disk_rule(1, 1);
        assert_eq!(r.len(), 1);
        assert!((r.points[0].norm() - 0.5).abs() < 1e-15);
        assert!((r.weights[0] - PI).abs() < 1e-15);
    }

    #[test]
    fn midpoint_weights_exact_areas() {
        for &(nr, nt) in &[(3, 5), (7, 2), (20, 20)] {
            let r = midpoint_disk_rule(nr, nt);
            let total: f64 = r.weights.iter().sum();
            assert!((total - PI).abs() < 1e-13);
            assert!(r.points.iter().all(|p| p.norm() < 1.0));
            assert!(r.weights.iter().all(|&w| w > 0.0));
        }
    }

    #[test]
    fn midpoint_x2_converges() {
        // integral of x^2 over the unit disk = pi/4.
        let exact = PI / 4.0;
        let coarse = integrate(&midpoint_disk_rule(20, 20), |p| p.x * p.x);
        let fine = integrate(&midpoint_disk_rule(40, 40), |p| p.x * p.x);
        let e_coarse = (coarse - exact).abs() / exact;
        let e_fine = (fine - exact).abs() / exact;
        assert!(e_coarse < 2e-3, "coarse rel err {e_coarse}");
        assert!(e_fine < e_coarse);
    }

    #[test]
    fn chebyshev_exactness() {
        let r = chebyshev_disk_rule(2, 4);
        let total: f64 = r.weights.iter().sum();
        assert!((total - PI).abs() < 1e-13);
        assert!((integrate(&r, |p| p.x * p.x) - PI / 4.0).abs() < 1e-13);
        let r2 = chebyshev_disk_rule(4, 8);
        assert!(integrate(&r2, |p| p.x.powi(3) * p.y).abs() < 1e-14);
        // Degree given by min(2 n_r - 1, n_t - 1): x^4 needs n_t >= 5.
        let r3 = chebyshev_disk_rule(3, 6);
        // integral of x^4 = pi/8.
        assert!((integrate(&r3, |p| p.x.powi(4)) - PI / 8.0).abs() < 1e-13);
    }
}
