//! Node classification for enrichment, the enrichment functions themselves
//! (Heaviside, near-tip branch functions, abs level set) and DOF bookkeeping
//! for the enlarged system.

use crate::geometry::{
    clip_element, clip_element_by_interface, side_of_path, CrackPath, CutClass, InterfaceLine,
    TipFrame,
};
use crate::mesh::Mesh;
use crate::{Error, Result, Vec2};

/// Fraction of a nodal support that must land on each side of the crack for
/// the support to count as split (prevents spurious Heaviside enrichment of
/// grazed supports).
const SUPPORT_SPLIT_TOL: f64 = 1e-4;

/// Result of classifying one crack against a mesh: the Heaviside set N^c
/// and, per tip, the containing element with the nodes to branch-enrich.
#[derive(Debug, Clone)]
pub struct Classification {
    pub heaviside_nodes: Vec<usize>,
    pub tips: Vec<TipElement>,
}

#[derive(Debug, Clone)]
pub struct TipElement {
    pub elem: usize,
    pub frame: TipFrame,
    pub nodes: [usize; 4],
}

/// Splits mesh nodes into N^f (nodes of tip-containing elements, branch
/// enriched) and N^c (nodes whose support the crack fully traverses,
/// Heaviside enriched). Topological enrichment: exactly one element per tip.
pub fn classify_nodes(mesh: &Mesh, crack: &CrackPath) -> Result<Classification> {
    let mut tips = Vec::new();
    let mut in_nf = vec![false; mesh.n_nodes()];
    for frame in crack.tips() {
        let elem = mesh.element_containing(frame.point).ok_or_else(|| {
            Error::DegenerateGeometry(format!("crack tip {:?} outside mesh", frame.point))
        })?;
        let nodes = mesh.elements[elem];
        for &n in &nodes {
            in_nf[n] = true;
        }
        tips.push(TipElement { elem, frame, nodes });
    }

    // Cache cuts per element; supports overlap heavily.
    let mut cuts: Vec<Option<crate::geometry::ElementCut>> = vec![None; mesh.n_elements()];
    let mut heaviside_nodes = Vec::new();
    for node in 0..mesh.n_nodes() {
        if in_nf[node] {
            continue;
        }
        let (mut plus, mut minus, mut total) = (0.0, 0.0, 0.0);
        let mut has_split = false;
        for &e in mesh.node_support(node) {
            if cuts[e].is_none() {
                cuts[e] = Some(clip_element(&mesh.element_nodes(e), crack)?);
            }
            let cut = cuts[e].as_ref().unwrap();
            match cut.class {
                CutClass::Split | CutClass::Tip => {
                    has_split = true;
                    for (poly, &side) in cut.polys.iter().zip(&cut.sides) {
                        if side > 0.0 {
                            plus += poly.area();
                        } else {
                            minus += poly.area();
                        }
                        total += poly.area();
                    }
                }
                CutClass::Uncut => {
                    let verts = mesh.element_nodes(e);
                    let area = crate::geometry::signed_area(&verts);
                    let c = (verts[0] + verts[1] + verts[2] + verts[3]) / 4.0;
                    match side_of_path(c, crack) {
                        Ok(s) if s > 0.0 => plus += area,
                        Ok(_) => minus += area,
                        Err(_) => plus += area, // centroid on the extension line
                    }
                    total += area;
                }
            }
        }
        // Sides accumulated from uncut elements alone do not make a split
        // support: the crack itself must pass through it.
        if has_split && plus > SUPPORT_SPLIT_TOL * total && minus > SUPPORT_SPLIT_TOL * total {
            heaviside_nodes.push(node);
        }
    }
    Ok(Classification {
        heaviside_nodes,
        tips,
    })
}

/// Nodes whose support the material interface cuts (weak-discontinuity
/// enrichment set); edge-aligned interfaces cut nothing.
pub fn classify_interface_nodes(mesh: &Mesh, iface: &InterfaceLine) -> Result<Vec<usize>> {
    let mut cuts: Vec<Option<crate::geometry::ElementCut>> = vec![None; mesh.n_elements()];
    let mut nodes = Vec::new();
    for node in 0..mesh.n_nodes() {
        let (mut plus, mut minus, mut total) = (0.0, 0.0, 0.0);
        let mut has_split = false;
        for &e in mesh.node_support(node) {
            if cuts[e].is_none() {
                cuts[e] = Some(clip_element_by_interface(&mesh.element_nodes(e), iface)?);
            }
            let cut = cuts[e].as_ref().unwrap();
            match cut.class {
                CutClass::Split => {
                    has_split = true;
                    for (poly, &side) in cut.polys.iter().zip(&cut.sides) {
                        if side > 0.0 {
                            plus += poly.area();
                        } else {
                            minus += poly.area();
                        }
                        total += poly.area();
                    }
                }
                _ => {
                    let verts = mesh.element_nodes(e);
                    let area = crate::geometry::signed_area(&verts);
                    let c = (verts[0] + verts[1] + verts[2] + verts[3]) / 4.0;
                    if crate::geometry::signed_distance(c, iface) > 0.0 {
                        plus += area;
                    } else {
                        minus += area;
                    }
                    total += area;
                }
            }
        }
        if has_split && plus > SUPPORT_SPLIT_TOL * total && minus > SUPPORT_SPLIT_TOL * total {
            nodes.push(node);
        }
    }
    Ok(nodes)
}

/// Heaviside enrichment: the side sign of x relative to the crack.
pub fn heaviside(x: Vec2, crack: &CrackPath) -> Result<f64> {
    side_of_path(x, crack)
}

/// The four near-tip branch functions
/// sqrt(r) {sin(t/2), cos(t/2), sin t sin(t/2), sin t cos(t/2)}.
pub fn branch_functions(r: f64, theta: f64) -> [f64; 4] {
    if r == 0.0 {
        return [0.0; 4];
    }
    let sr = r.sqrt();
    let (s2, c2) = (0.5 * theta).sin_cos();
    let st = theta.sin();
    [sr * s2, sr * c2, sr * st * s2, sr * st * c2]
}

/// Branch-function gradients in global coordinates for a tip frame rotated
/// by `frame.angle`. Derivatives scale as r^(-1/2).
pub fn branch_derivatives(r: f64, theta: f64, frame: &TipFrame) -> Result<[Vec2; 4]> {
    if r <= crate::geometry::EPS_GEOM_REL {
        return Err(Error::Domain(format!(
            "branch derivatives evaluated at r = {r:.3e} (too close to tip)"
        )));
    }
    let sr = r.sqrt();
    let (s2, c2) = (0.5 * theta).sin_cos();
    let (st, ct) = theta.sin_cos();
    // (dB/dr, (1/r) dB/dtheta) per function.
    let polar = [
        (s2 / (2.0 * sr), c2 / (2.0 * sr)),
        (c2 / (2.0 * sr), -s2 / (2.0 * sr)),
        (st * s2 / (2.0 * sr), (ct * s2 + 0.5 * st * c2) / sr),
        (st * c2 / (2.0 * sr), (ct * c2 - 0.5 * st * s2) / sr),
    ];
    let (sa, ca) = frame.angle.sin_cos();
    let mut out = [Vec2::zeros(); 4];
    for (i, &(dr, dt)) in polar.iter().enumerate() {
        // Local Cartesian gradient, then rotation to global axes.
        let dx1 = ct * dr - st * dt;
        let dx2 = st * dr + ct * dt;
        out[i] = Vec2::new(ca * dx1 - sa * dx2, sa * dx1 + ca * dx2);
    }
    Ok(out)
}

/// Abs level-set enrichment for weak discontinuities: chi = |phi|.
pub fn abs_enrichment(phi: f64) -> f64 {
    phi.abs()
}

/// Gradient of |phi| given grad(phi); the positive-side convention applies
/// on the interface itself.
pub fn abs_enrichment_grad(phi: f64, grad_phi: Vec2) -> Vec2 {
    if phi < 0.0 {
        -grad_phi
    } else {
        grad_phi
    }
}

/// DOF bookkeeping. DOF indices are pair-based: pair p owns DOFs (2p, 2p+1)
/// for the x and y components. Standard pairs coincide with node ids;
/// enriched pairs follow contiguously (all Heaviside sets crack by crack,
/// then branch blocks tip by tip, then abs pairs).
#[derive(Debug, Clone)]
pub struct DofMap {
    pub n_nodes: usize,
    pub cracks: Vec<CrackDofs>,
    pub abs_pairs: Vec<Option<usize>>,
    n_pairs: usize,
}

#[derive(Debug, Clone)]
pub struct CrackDofs {
    pub classification: Classification,
    /// node -> Heaviside pair index.
    pub heaviside: Vec<Option<usize>>,
    /// per tip: node -> 4 branch pair indices.
    pub branch: Vec<Vec<Option<[usize; 4]>>>,
}

impl DofMap {
    pub fn build(
        mesh: &Mesh,
        cracks: &[CrackPath],
        interface: Option<&InterfaceLine>,
    ) -> Result<DofMap> {
        let n_nodes = mesh.n_nodes();
        let mut next = n_nodes;
        let mut crack_dofs = Vec::with_capacity(cracks.len());
        for crack in cracks {
            let cls = classify_nodes(mesh, crack)?;
            let mut heaviside = vec![None; n_nodes];
            for &n in &cls.heaviside_nodes {
                heaviside[n] = Some(next);
                next += 1;
            }
            let mut branch = Vec::with_capacity(cls.tips.len());
            for tip in &cls.tips {
                let mut per_node = vec![None; n_nodes];
                for &n in &tip.nodes {
                    per_node[n] = Some([next, next + 1, next + 2, next + 3]);
                    next += 4;
                }
                branch.push(per_node);
            }
            crack_dofs.push(CrackDofs {
                classification: cls,
                heaviside,
                branch,
            });
        }
        let mut abs_pairs = vec![None; n_nodes];
        if let Some(iface) = interface {
            for n in classify_interface_nodes(mesh, iface)? {
                abs_pairs[n] = Some(next);
                next += 1;
            }
        }
        Ok(DofMap {
            n_nodes,
            cracks: crack_dofs,
            abs_pairs,
            n_pairs: next,
        })
    }

    pub fn n_pairs(&self) -> usize {
        self.n_pairs
    }

    pub fn n_dofs(&self) -> usize {
        2 * self.n_pairs
    }

    /// Standard DOF pair of a node.
    pub fn std_pair(&self, node: usize) -> usize {
        node
    }

    /// True if the node carries any enriched DOF.
    pub fn is_enriched(&self, node: usize) -> bool {
        self.cracks.iter().any(|c| {
            c.heaviside[node].is_some() || c.branch.iter().any(|b| b[node].is_some())
        }) || self.abs_pairs[node].is_some()
    }

    /// All enriched pair indices attached to a node (for boundary-condition
    /// handling).
    pub fn enriched_pairs(&self, node: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for c in &self.cracks {
            if let Some(p) = c.heaviside[node] {
                out.push(p);
            }
            for b in &c.branch {
                if let Some(ps) = b[node] {
                    out.extend_from_slice(&ps);
                }
            }
        }
        if let Some(p) = self.abs_pairs[node] {
            out.push(p);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn crack(pts: &[(f64, f64)], ts: bool, te: bool) -> CrackPath {
        CrackPath::new(pts.iter().map(|&(x, y)| Vec2::new(x, y)).collect(), ts, te).unwrap()
    }

    #[test]
    fn classify_center_crack_row() {
        // 5x5 mesh, horizontal crack with tips in the first and last columns.
        let mesh = Mesh::structured(5, 5, Vec2::new(0.0, 0.0), Vec2::new(5.0, 5.0)).unwrap();
        let c = crack(&[(0.5, 2.3), (4.5, 2.3)], true, true);
        let cls = classify_nodes(&mesh, &c).unwrap();
        assert_eq!(cls.tips.len(), 2);
        let tip_nodes: Vec<usize> = cls.tips.iter().flat_map(|t| t.nodes).collect();
        assert_eq!(tip_nodes.len(), 8);
        // N^c: the four interior nodes on rows y=2 and y=3 between the tip
        // elements.
        let mut expect = Vec::new();
        for &y in &[2usize, 3] {
            for &x in &[2usize, 3] {
                expect.push(y * 6 + x);
            }
        }
        let mut got = cls.heaviside_nodes.clone();
        got.sort_unstable();
        expect.sort_unstable();
        assert_eq!(got, expect);
    }

    #[test]
    fn classify_crack_inside_one_element() {
        let mesh = Mesh::structured(3, 3, Vec2::new(0.0, 0.0), Vec2::new(3.0, 3.0)).unwrap();
        let c = crack(&[(1.2, 1.4), (1.8, 1.6)], true, true);
        let cls = classify_nodes(&mesh, &c).unwrap();
        assert!(cls.heaviside_nodes.is_empty());
        assert_eq!(cls.tips.len(), 2);
        assert_eq!(cls.tips[0].elem, cls.tips[1].elem);
    }

    #[test]
    fn branch_function_values() {
        let b = branch_functions(1.0, 0.0);
        assert_eq!(b, [0.0, 1.0, 0.0, 0.0]);
        let b = branch_functions(4.0, PI);
        assert!((b[0] - 2.0).abs() < 1e-15);
        assert!(b[1].abs() < 1e-15 && b[2].abs() < 1e-15 && b[3].abs() < 1e-15);
        assert_eq!(branch_functions(0.0, 1.0), [0.0; 4]);
    }

    #[test]
    fn only_b1_jumps_across_faces() {
        for &r in &[0.3, 1.7] {
            let up = branch_functions(r, PI - 1e-12);
            let dn = branch_functions(r, -PI + 1e-12);
            assert!((up[0] - dn[0] - 2.0 * r.sqrt()).abs() < 1e-9);
            for k in 1..4 {
                assert!((up[k] - dn[k]).abs() < 1e-9, "B{} jumped", k + 1);
            }
        }
    }

    #[test]
    fn branch_derivatives_match_finite_difference() {
        let frame = TipFrame {
            point: Vec2::new(0.7, -0.2),
            angle: 0.3,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let r = rng.gen_range(0.05..2.0);
            let t = rng.gen_range(-0.95 * PI..0.95 * PI);
            // Global point for this (r, theta).
            let (sa, ca) = frame.angle.sin_cos();
            let local = Vec2::new(r * t.cos(), r * t.sin());
            let x = frame.point + Vec2::new(ca * local.x - sa * local.y, sa * local.x + ca * local.y);
            let grads = branch_derivatives(r, t, &frame).unwrap();
            let h = 1e-7 * r.max(0.1);
            for k in 0..4 {
                let f = |p: Vec2| {
                    let (rr, tt) = frame.polar(p);
                    branch_functions(rr, tt)[k]
                };
                let fd = Vec2::new(
                    (f(x + Vec2::new(h, 0.0)) - f(x - Vec2::new(h, 0.0))) / (2.0 * h),
                    (f(x + Vec2::new(0.0, h)) - f(x - Vec2::new(0.0, h))) / (2.0 * h),
                );
                assert!(
                    (fd - grads[k]).norm() <= 1e-5 * grads[k].norm().max(1.0),
                    "B{}: fd {fd:?} vs {:?}",
                    k + 1,
                    grads[k]
                );
            }
        }
    }

    #[test]
    fn branch_derivative_scaling_and_equivariance() {
        let frame0 = TipFrame {
            point: Vec2::zeros(),
            angle: 0.0,
        };
        let (r, t) = (0.8, 0.9);
        let g1 = branch_derivatives(r, t, &frame0).unwrap();
        let g4 = branch_derivatives(4.0 * r, t, &frame0).unwrap();
        for k in 0..4 {
            assert!((g4[k] * 2.0 - g1[k]).norm() < 1e-12);
        }
        // Rotating the frame rotates the global gradient components.
        let phi = 1.1;
        let framer = TipFrame {
            point: Vec2::zeros(),
            angle: phi,
        };
        let gr = branch_derivatives(r, t, &framer).unwrap();
        let (s, c) = phi.sin_cos();
        for k in 0..4 {
            let rotated = Vec2::new(c * g1[k].x - s * g1[k].y, s * g1[k].x + c * g1[k].y);
            assert!((gr[k] - rotated).norm() < 1e-12);
        }
    }

    #[test]
    fn branch_derivative_near_tip_error() {
        let frame = TipFrame {
            point: Vec2::zeros(),
            angle: 0.0,
        };
        assert!(branch_derivatives(0.0, 0.0, &frame).is_err());
    }

    #[test]
    fn abs_enrichment_basics() {
        assert_eq!(abs_enrichment(-2.0), 2.0);
        assert_eq!(abs_enrichment(0.0), 0.0);
        let g = Vec2::new(0.0, 1.0);
        let jump = abs_enrichment_grad(1e-9, g) - abs_enrichment_grad(-1e-9, g);
        assert!((jump - g * 2.0).norm() < 1e-15);
        // Positive-side convention at phi = 0.
        assert_eq!(abs_enrichment_grad(0.0, g), g);
    }

    #[test]
    fn dofmap_contiguous_and_disjoint() {
        let mesh = Mesh::structured(5, 5, Vec2::new(0.0, 0.0), Vec2::new(5.0, 5.0)).unwrap();
        let c = crack(&[(0.5, 2.3), (4.5, 2.3)], true, true);
        let dm = DofMap::build(&mesh, &[c], None).unwrap();
        let mut seen = vec![false; dm.n_pairs()];
        for n in 0..mesh.n_nodes() {
            seen[dm.std_pair(n)] = true;
            for p in dm.enriched_pairs(n) {
                assert!(!seen[p], "pair {p} assigned twice");
                seen[p] = true;
            }
        }
        assert!(seen.iter().all(|&s| s), "gap in DOF pair numbering");
        // No node both Heaviside- and branch-enriched for the same crack.
        let cd = &dm.cracks[0];
        for n in 0..mesh.n_nodes() {
            if cd.heaviside[n].is_some() {
                assert!(cd.branch.iter().all(|b| b[n].is_none()));
            }
        }
        // 25 H-free tip nodes... expected counts: 36 std pairs + 4 H + 2 tips x 4 nodes x 4.
        assert_eq!(dm.n_pairs(), 36 + 4 + 32);
    }

    #[test]
    fn interface_classification_edge_aligned_is_empty() {
        let mesh = Mesh::structured(4, 4, Vec2::new(-1.0, -1.0), Vec2::new(1.0, 1.0)).unwrap();
        let aligned = InterfaceLine::new(Vec2::new(-1.0, 0.0), Vec2::new(1.0, 0.0), (1, 2)).unwrap();
        assert!(classify_interface_nodes(&mesh, &aligned).unwrap().is_empty());
        let offset = InterfaceLine::new(Vec2::new(-1.0, 0.2), Vec2::new(1.0, 0.2), (1, 2)).unwrap();
        let nodes = classify_interface_nodes(&mesh, &offset).unwrap();
        // Interface at y=0.2 cuts the row of elements spanning y in [0, 0.5]:
        // the two node rows bounding it are enriched.
        assert_eq!(nodes.len(), 10);
    }
}
