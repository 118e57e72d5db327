//! Structured bilinear quadrilateral meshes, controlled perturbation and
//! parent/physical coordinate maps.

use crate::{Error, Result, Vec2};
use nalgebra::Matrix2;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::io::Write;

#[derive(Debug, Clone)]
pub struct Mesh {
    pub nodes: Vec<Vec2>,
    pub elements: Vec<[usize; 4]>,
    pub bounds: (Vec2, Vec2),
    nx: usize,
    ny: usize,
    /// node -> adjacent element ids
    support: Vec<Vec<usize>>,
}

/// Bilinear shape functions at parent coordinates.
pub fn shape_fn(xi: f64, eta: f64) -> [f64; 4] {
    [
        0.25 * (1.0 - xi) * (1.0 - eta),
        0.25 * (1.0 + xi) * (1.0 - eta),
        0.25 * (1.0 + xi) * (1.0 + eta),
        0.25 * (1.0 - xi) * (1.0 + eta),
    ]
}

/// Parent-space shape function gradients, rows = node, cols = (d/dxi, d/deta).
pub fn shape_grad(xi: f64, eta: f64) -> [[f64; 2]; 4] {
    [
        [-0.25 * (1.0 - eta), -0.25 * (1.0 - xi)],
        [0.25 * (1.0 - eta), -0.25 * (1.0 + xi)],
        [0.25 * (1.0 + eta), 0.25 * (1.0 + xi)],
        [-0.25 * (1.0 + eta), 0.25 * (1.0 - xi)],
    ]
}

impl Mesh {
    /// Uniform structured mesh of nx x ny bilinear quadrilaterals.
    /// Node coordinates are exact grid multiples (no running-sum drift).
    pub fn structured(nx: usize, ny: usize, lo: Vec2, hi: Vec2) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::Domain("nx, ny must be >= 1".into()));
        }
        let (w, h) = (hi.x - lo.x, hi.y - lo.y);
        let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
        for j in 0..=ny {
            for i in 0..=nx {
                nodes.push(Vec2::new(
                    lo.x + w * i as f64 / nx as f64,
                    lo.y + h * j as f64 / ny as f64,
                ));
            }
        }
        let mut elements = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let n0 = j * (nx + 1) + i;
                elements.push([n0, n0 + 1, n0 + nx + 2, n0 + nx + 1]);
            }
        }
        let mut support = vec![Vec::new(); nodes.len()];
        for (e, conn) in elements.iter().enumerate() {
            for &n in conn {
                support[n].push(e);
            }
        }
        Ok(Self {
            nodes,
            elements,
            bounds: (lo, hi),
            nx,
            ny,
            support,
        })
    }

    pub fn grid_dims(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn dx(&self) -> f64 {
        (self.bounds.1.x - self.bounds.0.x) / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        (self.bounds.1.y - self.bounds.0.y) / self.ny as f64
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn element_nodes(&self, e: usize) -> [Vec2; 4] {
        let c = self.elements[e];
        [
            self.nodes[c[0]],
            self.nodes[c[1]],
            self.nodes[c[2]],
            self.nodes[c[3]],
        ]
    }

    /// Elements adjacent to a node (its support).
    pub fn node_support(&self, n: usize) -> &[usize] {
        &self.support[n]
    }

    pub fn is_boundary_node(&self, n: usize) -> bool {
        let i = n % (self.nx + 1);
        let j = n / (self.nx + 1);
        i == 0 || i == self.nx || j == 0 || j == self.ny
    }

    /// Randomly displaces interior nodes by up to alpha_ir times the cell
    /// size per axis; the draws are a fixed ChaCha8 stream so results are
    /// bit-identical for a given seed.
    pub fn perturbed(&self, alpha_ir: f64, seed: u64) -> Result<Mesh> {
        if !(0.0..0.5).contains(&alpha_ir) {
            return Err(Error::Domain("alpha_ir must be in [0, 0.5)".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (dx, dy) = (self.dx(), self.dy());
        let mut out = self.clone();
        for n in 0..out.nodes.len() {
            if out.is_boundary_node(n) {
                continue;
            }
            let base = self.nodes[n];
            let mut ok = false;
            for _ in 0..32 {
                let rx: f64 = rng.gen_range(0.0..1.0);
                let ry: f64 = rng.gen_range(0.0..1.0);
                out.nodes[n] = Vec2::new(
                    base.x + (2.0 * rx - 1.0) * alpha_ir * dx,
                    base.y + (2.0 * ry - 1.0) * alpha_ir * dy,
                );
                if out.support[n]
                    .iter()
                    .all(|&e| out.element_jacobians_positive(e))
                {
                    ok = true;
                    break;
                }
            }
            if !ok {
                return Err(Error::NonConvergence(format!(
                    "could not perturb node {n} without inverting an element"
                )));
            }
        }
        Ok(out)
    }

    fn element_jacobians_positive(&self, e: usize) -> bool {
        let g = 1.0 / 3f64.sqrt();
        [(-g, -g), (g, -g), (g, g), (-g, g)]
            .iter()
            .all(|&(xi, eta)| self.jacobian(e, xi, eta).determinant() > 0.0)
    }

    pub fn parent_to_physical(&self, e: usize, xi: f64, eta: f64) -> Vec2 {
        let n = shape_fn(xi, eta);
        let v = self.element_nodes(e);
        v[0] * n[0] + v[1] * n[1] + v[2] * n[2] + v[3] * n[3]
    }

    /// Jacobian dx/d(xi,eta) of the bilinear map.
    pub fn jacobian(&self, e: usize, xi: f64, eta: f64) -> Matrix2<f64> {
        let g = shape_grad(xi, eta);
        let v = self.element_nodes(e);
        let mut j = Matrix2::zeros();
        for k in 0..4 {
            j[(0, 0)] += g[k][0] * v[k].x;
            j[(0, 1)] += g[k][1] * v[k].x;
            j[(1, 0)] += g[k][0] * v[k].y;
            j[(1, 1)] += g[k][1] * v[k].y;
        }
        j
    }

    /// Inverts the bilinear map by Newton iteration from the element center.
    pub fn physical_to_parent(&self, e: usize, x: Vec2) -> Result<(f64, f64)> {
        let mut xi = 0.0f64;
        let mut eta = 0.0f64;
        let diag = (self.element_nodes(e)[2] - self.element_nodes(e)[0]).norm();
        for _ in 0..20 {
            let r = self.parent_to_physical(e, xi, eta) - x;
            if r.norm() < 1e-13 * diag {
                // Final residual check in parent units below.
                break;
            }
            let j = self.jacobian(e, xi, eta);
            let inv = j
                .try_inverse()
                .ok_or_else(|| Error::Singular("singular element jacobian".into()))?;
            let d = inv * r;
            xi -= d.x;
            eta -= d.y;
        }
        let r = self.parent_to_physical(e, xi, eta) - x;
        if r.norm() > 1e-10 * diag {
            return Err(Error::NonConvergence(format!(
                "bilinear inversion residual {:.3e} at element {e}",
                r.norm()
            )));
        }
        if xi.abs() > 1.0 + 1e-6 || eta.abs() > 1.0 + 1e-6 {
            return Err(Error::OutOfElement);
        }
        Ok((xi.clamp(-1.0, 1.0), eta.clamp(-1.0, 1.0)))
    }

    /// Element containing the point, if any (ties broken by lowest id).
    pub fn element_containing(&self, x: Vec2) -> Option<usize> {
        // Structured grid lookup first, falling back to a scan for
        // perturbed meshes.
        let (lo, hi) = self.bounds;
        if x.x < lo.x - 1e-12 || x.x > hi.x + 1e-12 || x.y < lo.y - 1e-12 || x.y > hi.y + 1e-12 {
            return None;
        }
        let i = (((x.x - lo.x) / self.dx()).floor() as isize).clamp(0, self.nx as isize - 1);
        let j = (((x.y - lo.y) / self.dy()).floor() as isize).clamp(0, self.ny as isize - 1);
        // Search a small neighborhood around the grid guess.
        for dj in -1..=1isize {
            for di in -1..=1isize {
                let (ii, jj) = (i + di, j + dj);
                if ii < 0 || jj < 0 || ii >= self.nx as isize || jj >= self.ny as isize {
                    continue;
                }
                let e = jj as usize * self.nx + ii as usize;
                if self.point_in_element(e, x) {
                    return Some(e);
                }
            }
        }
        (0..self.n_elements()).find(|&e| self.point_in_element(e, x))
    }

    pub fn point_in_element(&self, e: usize, x: Vec2) -> bool {
        let v = self.element_nodes(e);
        let tol = 1e-12 * (v[2] - v[0]).norm();
        (0..4).all(|i| crate::geometry::cross(v[(i + 1) % 4] - v[i], x - v[i]) >= -tol)
    }

    /// Characteristic element length (diagonal of the first element).
    pub fn char_length(&self) -> f64 {
        let v = self.element_nodes(0);
        (v[2] - v[0]).norm()
    }

    /// CSV export of the node and element tables for debugging.
    pub fn export_csv<W: Write>(&self, nodes_out: &mut W, elems_out: &mut W) -> Result<()> {
        writeln!(nodes_out, "id,x,y")?;
        for (i, n) in self.nodes.iter().enumerate() {
            writeln!(nodes_out, "{i},{},{}", n.x, n.y)?;
        }
        writeln!(elems_out, "id,n1,n2,n3,n4")?;
        for (i, e) in self.elements.iter().enumerate() {
            writeln!(elems_out, "{i},{},{},{},{}", e[0], e[1], e[2], e[3])?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn structured_counts() {
        let m = Mesh::structured(1, 1, Vec2::new(0.0, 0.0), Vec2::new(1.0, 1.0)).unwrap();
        assert_eq!(m.n_nodes(), 4);
        assert_eq!(m.n_elements(), 1);

        let m = Mesh::structured(60, 60, Vec2::new(0.0, 0.0), Vec2::new(10.0, 10.0)).unwrap();
        assert_eq!(m.n_nodes(), 3721);
        assert_eq!(m.n_elements(), 3600);

        let m = Mesh::structured(72, 144, Vec2::new(0.0, 0.0), Vec2::new(1.0, 2.0)).unwrap();
        assert_eq!(m.n_nodes(), 10585);
        assert_eq!(m.n_elements(), 10368);
    }

    #[test]
    fn structured_coordinates_are_grid_multiples() {
        let m = Mesh::structured(7, 3, Vec2::new(0.0, 0.0), Vec2::new(7.0, 3.0)).unwrap();
        for (n, p) in m.nodes.iter().enumerate() {
            let i = n % 8;
            let j = n / 8;
            assert_eq!(p.x, i as f64);
            assert_eq!(p.y, j as f64);
        }
    }

    #[test]
    fn perturb_zero_is_identity() {
        let m = Mesh::structured(5, 5, Vec2::new(0.0, 0.0), Vec2::new(1.0, 1.0)).unwrap();
        let p = m.perturbed(0.0, 3).unwrap();
        for (a, b) in m.nodes.iter().zip(&p.nodes) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn perturb_deterministic_and_bounded() {
        let m = Mesh::structured(10, 10, Vec2::new(0.0, 0.0), Vec2::new(1.0, 1.0)).unwrap();
        let a = m.perturbed(0.4, 99).unwrap();
        let b = m.perturbed(0.4, 99).unwrap();
        let mut moved = 0;
        for (i, (pa, pb)) in a.nodes.iter().zip(&b.nodes).enumerate() {
            assert_eq!(pa, pb, "non-deterministic perturbation");
            let d = pa - m.nodes[i];
            assert!(d.x.abs() <= 0.4 * m.dx() + 1e-15);
            assert!(d.y.abs() <= 0.4 * m.dy() + 1e-15);
            if m.is_boundary_node(i) {
                assert_eq!(*pa, m.nodes[i], "boundary node moved");
            } else if d.norm() > 0.0 {
                moved += 1;
            }
        }
        assert!(moved > 0);
        for e in 0..a.n_elements() {
            assert!(a.element_jacobians_positive(e));
        }
    }

    #[test]
    fn parent_map_basics() {
        let m = Mesh::structured(1, 1, Vec2::new(0.0, 0.0), Vec2::new(1.0, 1.0)).unwrap();
        let c = m.parent_to_physical(0, 0.0, 0.0);
        assert!((c - Vec2::new(0.5, 0.5)).norm() < 1e-15);
        let p = m.parent_to_physical(0, -1.0, -1.0);
        assert!((p - m.nodes[0]).norm() < 1e-15);
    }

    #[test]
    fn jacobian_parallelogram_identity() {
        // Skew the unit square into a parallelogram; det J = area / 4.
        let mut m = Mesh::structured(1, 1, Vec2::new(0.0, 0.0), Vec2::new(1.0, 1.0)).unwrap();
        m.nodes[2] += Vec2::new(0.3, 0.0);
        m.nodes[3] += Vec2::new(0.3, 0.0);
        let area = crate::geometry::signed_area(&m.element_nodes(0));
        let det = m.jacobian(0, 0.0, 0.0).determinant();
        assert!((det - area / 4.0).abs() < 1e-14);
    }

    #[test]
    fn inversion_round_trip_on_perturbed_mesh() {
        use rand::Rng;
        let m = Mesh::structured(8, 8, Vec2::new(0.0, 0.0), Vec2::new(1.0, 1.0))
            .unwrap()
            .perturbed(0.4, 5)
            .unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for e in 0..m.n_elements() {
            for _ in 0..100 {
                let xi = rng.gen_range(-1.0..1.0);
                let eta = rng.gen_range(-1.0..1.0);
                let x = m.parent_to_physical(e, xi, eta);
                let (xi2, eta2) = m.physical_to_parent(e, x).unwrap();
                let x2 = m.parent_to_physical(e, xi2, eta2);
                assert!((x2 - x).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn inversion_node_corner() {
        let m = Mesh::structured(2, 2, Vec2::new(0.0, 0.0), Vec2::new(1.0, 1.0)).unwrap();
        let v = m.element_nodes(0);
        let (xi, eta) = m.physical_to_parent(0, v[2]).unwrap();
        assert!((xi - 1.0).abs() < 1e-9 && (eta - 1.0).abs() < 1e-9);
    }

    #[test]
    fn inversion_rejects_outside_point() {
        let m = Mesh::structured(2, 2, Vec2::new(0.0, 0.0), Vec2::new(1.0, 1.0)).unwrap();
        assert!(m.physical_to_parent(0, Vec2::new(0.9, 0.9)).is_err());
    }

    #[test]
    fn element_lookup() {
        let m = Mesh::structured(4, 4, Vec2::new(0.0, 0.0), Vec2::new(1.0, 1.0)).unwrap();
        assert_eq!(m.element_containing(Vec2::new(0.1, 0.1)), Some(0));
        assert_eq!(m.element_containing(Vec2::new(0.9, 0.9)), Some(15));
        assert_eq!(m.element_containing(Vec2::new(1.5, 0.5)), None);
    }
}
