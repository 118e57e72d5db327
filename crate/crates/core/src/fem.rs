//! Constitutive matrices, enriched strain-displacement blocks, global
//! assembly, constraint handling, linear solve, and post-processing norms.

use crate::enrichment::{abs_enrichment, abs_enrichment_grad, branch_derivatives, DofMap};
use crate::geometry::{
    clip_element, clip_element_by_interface, side_of_path, signed_distance, CrackPath, CutClass,
    ElementCut, InterfaceLine,
};
use crate::mesh::{shape_fn, shape_grad, Mesh};
use crate::quadrature::{element_rule, QuadratureSet, Scheme};
use crate::{Error, Result, Vec2};
use nalgebra::{DVector, Matrix2, Matrix3, Vector3};
use sprs::{CsMat, TriMat};
use sprs_ldl::Ldl;
use std::io::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    PlaneStrain,
    PlaneStress,
}

/// Two isotropic materials separated by a straight interface; the side with
/// positive signed distance takes `e_plus`.
#[derive(Debug, Clone)]
pub struct Bimaterial {
    pub iface: InterfaceLine,
    pub e_plus: f64,
    pub e_minus: f64,
}

#[derive(Debug, Clone)]
pub struct MaterialModel {
    pub e: f64,
    pub nu: f64,
    pub regime: Regime,
    pub bimaterial: Option<Bimaterial>,
}

impl MaterialModel {
    pub fn new(e: f64, nu: f64, regime: Regime) -> Result<Self> {
        if e <= 0.0 || !(0.0..0.5).contains(&nu) {
            return Err(Error::Domain(format!("invalid material E={e}, nu={nu}")));
        }
        Ok(Self {
            e,
            nu,
            regime,
            bimaterial: None,
        })
    }

    pub fn young_at(&self, x: Vec2) -> f64 {
        match &self.bimaterial {
            Some(bi) => {
                if signed_distance(x, &bi.iface) > 0.0 {
                    bi.e_plus
                } else {
                    bi.e_minus
                }
            }
            None => self.e,
        }
    }

    /// Isotropic constitutive matrix in Voigt form (xx, yy, xy) at x.
    pub fn d_matrix(&self, x: Vec2) -> Matrix3<f64> {
        let e = self.young_at(x);
        let nu = self.nu;
        match self.regime {
            Regime::PlaneStrain => {
                let c = e / ((1.0 + nu) * (1.0 - 2.0 * nu));
                Matrix3::new(
                    c * (1.0 - nu),
                    c * nu,
                    0.0,
                    c * nu,
                    c * (1.0 - nu),
                    0.0,
                    0.0,
                    0.0,
                    c * (1.0 - 2.0 * nu) / 2.0,
                )
            }
            Regime::PlaneStress => {
                let c = e / (1.0 - nu * nu);
                Matrix3::new(c, c * nu, 0.0, c * nu, c, 0.0, 0.0, 0.0, c * (1.0 - nu) / 2.0)
            }
        }
    }

    /// Kolosov constant.
    pub fn kappa(&self) -> f64 {
        match self.regime {
            Regime::PlaneStrain => 3.0 - 4.0 * self.nu,
            Regime::PlaneStress => (3.0 - self.nu) / (1.0 + self.nu),
        }
    }
}

/// All discontinuities a model carries.
#[derive(Debug, Clone, Default)]
pub struct Discontinuities {
    pub cracks: Vec<CrackPath>,
    pub interface: Option<InterfaceLine>,
}

/// One active DOF pair of an element: which global pair, which local node,
/// and which multiplier function.
#[derive(Debug, Clone, Copy)]
pub struct ElemPair {
    pub pair: usize,
    pub local: usize,
    pub kind: PairKind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PairKind {
    Std,
    Heaviside { crack: usize },
    Branch { crack: usize, tip: usize, alpha: usize },
    Abs,
}

/// Active pairs of an element in DofMap column order.
pub fn element_pairs(mesh: &Mesh, e: usize, dofmap: &DofMap) -> Vec<ElemPair> {
    let conn = mesh.elements[e];
    let mut pairs = Vec::with_capacity(8);
    for (local, &n) in conn.iter().enumerate() {
        pairs.push(ElemPair {
            pair: dofmap.std_pair(n),
            local,
            kind: PairKind::Std,
        });
    }
    for (ci, cd) in dofmap.cracks.iter().enumerate() {
        for (local, &n) in conn.iter().enumerate() {
            if let Some(p) = cd.heaviside[n] {
                pairs.push(ElemPair {
                    pair: p,
                    local,
                    kind: PairKind::Heaviside { crack: ci },
                });
            }
        }
        for (ti, bt) in cd.branch.iter().enumerate() {
            for (local, &n) in conn.iter().enumerate() {
                if let Some(ps) = bt[n] {
                    for (alpha, &p) in ps.iter().enumerate() {
                        pairs.push(ElemPair {
                            pair: p,
                            local,
                            kind: PairKind::Branch {
                                crack: ci,
                                tip: ti,
                                alpha,
                            },
                        });
                    }
                }
            }
        }
    }
    for (local, &n) in conn.iter().enumerate() {
        if let Some(p) = dofmap.abs_pairs[n] {
            pairs.push(ElemPair {
                pair: p,
                local,
                kind: PairKind::Abs,
            });
        }
    }
    pairs
}

/// Per-point table of (N psi, grad(N psi)) for every active pair, the
/// scalar building block of both assembly and field evaluation.
pub fn point_table(
    mesh: &Mesh,
    e: usize,
    pairs: &[ElemPair],
    xi: f64,
    eta: f64,
    x: Vec2,
    dofmap: &DofMap,
    disc: &Discontinuities,
) -> Result<Vec<(f64, Vec2)>> {
    let n = shape_fn(xi, eta);
    let dn_ref = shape_grad(xi, eta);
    let jinv_t = mesh
        .jacobian(e, xi, eta)
        .try_inverse()
        .ok_or_else(|| Error::Singular(format!("element {e} jacobian")))?
        .transpose();
    let dn: Vec<Vec2> = dn_ref
        .iter()
        .map(|g| jinv_t * Vec2::new(g[0], g[1]))
        .collect();

    // Crack-level quantities evaluated lazily once per point.
    let mut h_vals: Vec<Option<f64>> = vec![None; disc.cracks.len()];
    let mut tip_vals: Vec<Vec<Option<([f64; 4], [Vec2; 4])>>> = dofmap
        .cracks
        .iter()
        .map(|cd| vec![None; cd.classification.tips.len()])
        .collect();

    let mut out = Vec::with_capacity(pairs.len());
    for p in pairs {
        let (ni, gi) = (n[p.local], dn[p.local]);
        let entry = match p.kind {
            PairKind::Std => (ni, gi),
            PairKind::Heaviside { crack } => {
                if h_vals[crack].is_none() {
                    h_vals[crack] = Some(side_of_path(x, &disc.cracks[crack])?);
                }
                let h = h_vals[crack].unwrap();
                (ni * h, gi * h)
            }
            PairKind::Branch { crack, tip, alpha } => {
                if tip_vals[crack][tip].is_none() {
                    let frame = &dofmap.cracks[crack].classification.tips[tip].frame;
                    let (r, t) = frame.polar(x);
                    let b = crate::enrichment::branch_functions(r, t);
                    let db = branch_derivatives(r, t, frame)?;
                    tip_vals[crack][tip] = Some((b, db));
                }
                let (b, db) = tip_vals[crack][tip].as_ref().unwrap();
                (ni * b[alpha], gi * b[alpha] + db[alpha] * ni)
            }
            PairKind::Abs => {
                let iface = disc.interface.as_ref().ok_or_else(|| {
                    Error::Domain("abs-enriched DOF without an interface".into())
                })?;
                let phi = signed_distance(x, iface);
                let chi = abs_enrichment(phi);
                let gchi = abs_enrichment_grad(phi, iface.normal());
                (ni * chi, gi * chi + gchi * ni)
            }
        };
        out.push(entry);
    }
    Ok(out)
}

#[derive(Debug)]
pub struct LinearSystem {
    pub k: CsMat<f64>,
    pub f: DVector<f64>,
    /// (dof index, prescribed value); duplicates resolved last-wins.
    pub constraints: Vec<(usize, f64)>,
}

/// Classifies an element against every discontinuity and returns its
/// quadrature cut. Elements cut by two cracks at once are unsupported.
pub fn element_cut(mesh: &Mesh, e: usize, disc: &Discontinuities) -> Result<ElementCut> {
    let verts = mesh.element_nodes(e);
    let mut found: Option<ElementCut> = None;
    for crack in &disc.cracks {
        let cut = clip_element(&verts, crack)?;
        if cut.class != CutClass::Uncut {
            if found.is_some() {
                return Err(Error::Unsupported(format!(
                    "element {e} cut by more than one crack"
                )));
            }
            found = Some(cut);
        }
    }
    if let Some(iface) = &disc.interface {
        let cut = clip_element_by_interface(&verts, iface)?;
        if cut.class != CutClass::Uncut {
            if found.is_some() {
                return Err(Error::Unsupported(format!(
                    "element {e} cut by both a crack and the interface"
                )));
            }
            found = Some(cut);
        }
    }
    Ok(found.unwrap_or(ElementCut {
        class: CutClass::Uncut,
        polys: Vec::new(),
        sides: Vec::new(),
    }))
}

/// Builds the quadrature set of every element under the given scheme.
pub fn build_quadrature(
    mesh: &Mesh,
    disc: &Discontinuities,
    scheme: Scheme,
    tip_budget: Option<usize>,
) -> Result<Vec<QuadratureSet>> {
    let mut sets = Vec::with_capacity(mesh.n_elements());
    for e in 0..mesh.n_elements() {
        let cut = element_cut(mesh, e, disc)?;
        sets.push(element_rule(mesh, e, &cut, scheme, tip_budget)?);
    }
    Ok(sets)
}

/// Global stiffness assembly K = sum_e sum_j W_j B^T D B. Element order is
/// fixed, so the sparse matrix is bit-reproducible.
pub fn assemble(
    mesh: &Mesh,
    dofmap: &DofMap,
    disc: &Discontinuities,
    mat: &MaterialModel,
    quad: &[QuadratureSet],
) -> Result<LinearSystem> {
    let n = dofmap.n_dofs();
    let mut tri = TriMat::new((n, n));
    for set in quad {
        let e = set.elem;
        let pairs = element_pairs(mesh, e, dofmap);
        let m = pairs.len();
        let mut ke = nalgebra::DMatrix::<f64>::zeros(2 * m, 2 * m);
        for qp in &set.points {
            let table = point_table(mesh, e, &pairs, qp.xi, qp.eta, qp.x, dofmap, disc)?;
            let d = mat.d_matrix(qp.x);
            // Column j of B for pair i, component c: grad-based Voigt block.
            for i in 0..m {
                let gi = table[i].1;
                let bi = voigt_block(gi);
                let dbi = d * bi;
                for j in i..m {
                    let bj = voigt_block(table[j].1);
                    let block = bi.transpose() * d * bj;
                    let _ = &dbi;
                    for a in 0..2 {
                        for b in 0..2 {
                            ke[(2 * i + a, 2 * j + b)] += qp.w * block[(a, b)];
                        }
                    }
                }
            }
        }
        // Mirror the upper triangle so K is exactly symmetric.
        for i in 0..2 * m {
            for j in 0..i {
                ke[(i, j)] = ke[(j, i)];
            }
        }
        for (i, pi) in pairs.iter().enumerate() {
            for (j, pj) in pairs.iter().enumerate() {
                for a in 0..2 {
                    for b in 0..2 {
                        let v = ke[(2 * i + a, 2 * j + b)];
                        if v != 0.0 {
                            tri.add_triplet(2 * pi.pair + a, 2 * pj.pair + b, v);
                        }
                    }
                }
            }
        }
    }
    Ok(LinearSystem {
        k: tri.to_csr(),
        f: DVector::zeros(n),
        constraints: Vec::new(),
    })
}

fn voigt_block(g: Vec2) -> nalgebra::Matrix3x2<f64> {
    nalgebra::Matrix3x2::new(g.x, 0.0, 0.0, g.y, g.y, g.x)
}

fn spmv(k: &CsMat<f64>, x: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; k.rows()];
    for (v, (r, c)) in k.iter() {
        y[r] += v * x[c];
    }
    y
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundarySide {
    Bottom,
    Top,
    Left,
    Right,
}

/// Adds a constant traction along one outer edge (standard DOFs; loaded
/// edges sit away from enrichment in all fixtures).
pub fn add_edge_traction(mesh: &Mesh, sys: &mut LinearSystem, side: BoundarySide, t: Vec2) {
    let (nx, ny) = mesh.grid_dims();
    let mut add = |n0: usize, n1: usize| {
        let len = (mesh.nodes[n1] - mesh.nodes[n0]).norm();
        for &n in &[n0, n1] {
            sys.f[2 * n] += 0.5 * len * t.x;
            sys.f[2 * n + 1] += 0.5 * len * t.y;
        }
    };
    match side {
        BoundarySide::Bottom => (0..nx).for_each(|i| add(i, i + 1)),
        BoundarySide::Top => {
            let base = ny * (nx + 1);
            (0..nx).for_each(|i| add(base + i, base + i + 1))
        }
        BoundarySide::Left => (0..ny).for_each(|j| add(j * (nx + 1), (j + 1) * (nx + 1))),
        BoundarySide::Right => {
            (0..ny).for_each(|j| add(j * (nx + 1) + nx, (j + 1) * (nx + 1) + nx))
        }
    }
}

pub fn add_point_load(sys: &mut LinearSystem, node: usize, load: Vec2) {
    sys.f[2 * node] += load.x;
    sys.f[2 * node + 1] += load.y;
}

/// Eliminates constrained DOFs and solves the reduced SPD system by sparse
/// LDLT with reverse-Cuthill-McKee ordering.
pub fn solve(sys: &LinearSystem) -> Result<DVector<f64>> {
    let n = sys.f.len();
    if sys.constraints.is_empty() {
        return Err(Error::Singular(
            "no constraints: rigid-body modes unconstrained".into(),
        ));
    }
    let mut prescribed: Vec<Option<f64>> = vec![None; n];
    for &(dof, val) in &sys.constraints {
        prescribed[dof] = Some(val);
    }
    let mut reduced_of = vec![usize::MAX; n];
    let mut free = Vec::new();
    for (dof, p) in prescribed.iter().enumerate() {
        if p.is_none() {
            reduced_of[dof] = free.len();
            free.push(dof);
        }
    }
    let mut u = DVector::zeros(n);
    for (dof, p) in prescribed.iter().enumerate() {
        if let Some(v) = p {
            u[dof] = *v;
        }
    }
    if free.is_empty() {
        return Ok(u);
    }

    let nr = free.len();
    let mut tri = TriMat::new((nr, nr));
    let mut rhs: Vec<f64> = free.iter().map(|&d| sys.f[d]).collect();
    for (v, (r, c)) in sys.k.iter() {
        match (prescribed[r], prescribed[c]) {
            (None, None) => tri.add_triplet(reduced_of[r], reduced_of[c], *v),
            (None, Some(uc)) => rhs[reduced_of[r]] -= v * uc,
            _ => {}
        }
    }
    let kr = tri.to_csr();
    let ldl = Ldl::new()
        .check_symmetry(sprs::SymmetryCheck::DontCheckSymmetry)
        .fill_in_reduction(sprs::FillInReduction::ReverseCuthillMcKee)
        .numeric(kr.view())
        .map_err(|e| Error::Singular(format!("LDLT factorization failed: {e}")))?;
    if ldl.d().iter().any(|&d| d <= 0.0) {
        return Err(Error::Singular(
            "reduced stiffness not positive definite".into(),
        ));
    }
    let ur = ldl.solve(&rhs[..]);
    // Direct-solve sanity: relative residual on the reduced system.
    let kru = spmv(&kr, &ur);
    let rnorm: f64 = kru
        .iter()
        .zip(&rhs)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let fnorm: f64 = rhs.iter().map(|b| b * b).sum::<f64>().sqrt();
    if rnorm > 1e-8 * fnorm.max(1.0) {
        return Err(Error::NonConvergence(format!(
            "linear solve residual {rnorm:.3e} vs rhs norm {fnorm:.3e}"
        )));
    }
    for (i, &dof) in free.iter().enumerate() {
        u[dof] = ur[i];
    }
    Ok(u)
}

/// Strain energy 1/2 u^T K u on the unconstrained operator.
pub fn strain_energy(sys: &LinearSystem, u: &DVector<f64>) -> f64 {
    let uv: Vec<f64> = u.iter().copied().collect();
    let ku = spmv(&sys.k, &uv);
    0.5 * ku.iter().zip(&uv).map(|(a, b)| a * b).sum::<f64>()
}

/// Relative nodal displacement error in percent over standard DOFs.
pub fn l2_displacement_error(
    mesh: &Mesh,
    u: &DVector<f64>,
    exact: impl Fn(Vec2) -> Vec2,
) -> Result<f64> {
    let (mut num, mut den) = (0.0, 0.0);
    for (n, &x) in mesh.nodes.iter().enumerate() {
        let ue = exact(x);
        let dx = u[2 * n] - ue.x;
        let dy = u[2 * n + 1] - ue.y;
        num += dx * dx + dy * dy;
        den += ue.x * ue.x + ue.y * ue.y;
    }
    if den == 0.0 {
        return Err(Error::Domain("exact solution identically zero".into()));
    }
    Ok(100.0 * (num / den).sqrt())
}

/// A solved displacement field with its evaluation context.
pub struct DisplacementField<'a> {
    pub mesh: &'a Mesh,
    pub dofmap: &'a DofMap,
    pub disc: &'a Discontinuities,
    pub u: DVector<f64>,
}

impl<'a> DisplacementField<'a> {
    /// Displacement and displacement gradient (du_i/dx_j) at a parent point
    /// of an element.
    pub fn eval_in_element(&self, e: usize, xi: f64, eta: f64) -> Result<(Vec2, Matrix2<f64>)> {
        let x = self.mesh.parent_to_physical(e, xi, eta);
        let pairs = element_pairs(self.mesh, e, self.dofmap);
        let table = point_table(self.mesh, e, &pairs, xi, eta, x, self.dofmap, self.disc)?;
        let mut u = Vec2::zeros();
        let mut grad = Matrix2::zeros();
        for (p, &(val, g)) in pairs.iter().zip(&table) {
            let qx = self.u[2 * p.pair];
            let qy = self.u[2 * p.pair + 1];
            u += Vec2::new(qx * val, qy * val);
            grad[(0, 0)] += qx * g.x;
            grad[(0, 1)] += qx * g.y;
            grad[(1, 0)] += qy * g.x;
            grad[(1, 1)] += qy * g.y;
        }
        Ok((u, grad))
    }

    pub fn u_at(&self, x: Vec2) -> Result<Vec2> {
        let e = self
            .mesh
            .element_containing(x)
            .ok_or_else(|| Error::Domain(format!("point {x:?} outside mesh")))?;
        let (xi, eta) = self.mesh.physical_to_parent(e, x)?;
        Ok(self.eval_in_element(e, xi, eta)?.0)
    }

    /// Engineering strain (xx, yy, 2xy) at a parent point.
    pub fn strain_in_element(&self, e: usize, xi: f64, eta: f64) -> Result<Vector3<f64>> {
        let (_, g) = self.eval_in_element(e, xi, eta)?;
        Ok(Vector3::new(g[(0, 0)], g[(1, 1)], g[(0, 1)] + g[(1, 0)]))
    }

    pub fn stress_in_element(
        &self,
        mat: &MaterialModel,
        e: usize,
        xi: f64,
        eta: f64,
    ) -> Result<Vector3<f64>> {
        let x = self.mesh.parent_to_physical(e, xi, eta);
        Ok(mat.d_matrix(x) * self.strain_in_element(e, xi, eta)?)
    }

    /// CSV export: node id, coordinates, standard nodal displacement.
    pub fn export_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "node,x,y,ux,uy")?;
        for (n, &p) in self.mesh.nodes.iter().enumerate() {
            writeln!(
                out,
                "{},{},{},{},{}",
                n,
                p.x,
                p.y,
                self.u[2 * n],
                self.u[2 * n + 1]
            )?;
        }
        Ok(())
    }
}

/// Constrains both components of a node to a prescribed displacement.
pub fn constrain_node(sys: &mut LinearSystem, node: usize, u: Vec2) {
    sys.constraints.push((2 * node, u.x));
    sys.constraints.push((2 * node + 1, u.y));
}
