//! Near-tip crack field on a square domain: the crack enters through the
//! left edge and ends at the domain center; the exact mode I asymptotic
//! displacement is imposed on the whole outer boundary.

use crate::config::BenchmarkSpec;
use crate::report::{convergence_driver, write_csv, ConvergenceRow};
use crate::{solve_with, Solved};
use nalgebra::{DMatrix, DVector};
use std::f64::consts::PI;
use std::path::PathBuf;
use xfrac_core::enrichment::DofMap;
use xfrac_core::fem::{Discontinuities, LinearSystem, MaterialModel, Regime};
use xfrac_core::fracture::{westergaard_disp, SifPair};
use xfrac_core::geometry::{side_of_path, CrackPath, TipFrame};
use xfrac_core::mesh::Mesh;
use xfrac_core::{Result, Vec2};

pub const SIGMA: f64 = 1e4;
pub const A: f64 = 100.0;
pub const SIDE: f64 = 10.0;
pub const E: f64 = 1e7;
pub const NU: f64 = 0.3;

pub fn k_ref() -> f64 {
    SIGMA * (PI * A).sqrt()
}

pub struct Fixture {
    pub mesh: Mesh,
    pub crack: CrackPath,
    pub frame: TipFrame,
    pub mat: MaterialModel,
    pub r_d: f64,
}

/// n-by-n mesh with the crack half an element off the center gridlines so
/// the tip sits at an element center.
pub fn fixture(n: usize, alpha_ir: f64, seed: u64) -> Result<Fixture> {
    let mut mesh = Mesh::structured(n, n, Vec2::zeros(), Vec2::new(SIDE, SIDE))?;
    if alpha_ir > 0.0 {
        mesh = mesh.perturbed(alpha_ir, seed)?;
    }
    let h = SIDE / n as f64;
    let yc = 0.5 * SIDE + 0.5 * h;
    let tip = Vec2::new(0.5 * SIDE + 0.5 * h, yc);
    let crack = CrackPath::new(vec![Vec2::new(-1.0, yc), tip], false, true)?;
    let frame = crack.tips()[0];
    let mat = MaterialModel::new(E, NU, Regime::PlaneStrain)?;
    Ok(Fixture {
        mesh,
        crack,
        frame,
        mat,
        r_d: 3.0,
    })
}

fn exact_disp(frame: &TipFrame, mat: &MaterialModel, x: Vec2) -> Vec2 {
    let mu = E / (2.0 * (1.0 + NU));
    westergaard_disp(
        SifPair {
            k1: k_ref(),
            k2: 0.0,
        },
        frame,
        x,
        mat.kappa(),
        mu,
    )
}

/// Imposes the exact displacement on every boundary node's standard DOFs
/// and least-squares fits the Heaviside DOFs of crack-crossed-edge nodes so
/// the enriched boundary trace matches the discontinuous exact field.
pub fn apply_bcs(
    fx: &Fixture,
    mesh: &Mesh,
    dofmap: &DofMap,
    sys: &mut LinearSystem,
) -> Result<()> {
    for node in 0..mesh.n_nodes() {
        if mesh.is_boundary_node(node) {
            let ue = exact_disp(&fx.frame, &fx.mat, mesh.nodes[node]);
            sys.constraints.push((2 * dofmap.std_pair(node), ue.x));
            sys.constraints.push((2 * dofmap.std_pair(node) + 1, ue.y));
        }
    }

    // Enriched DOFs on the crossed (left) edge: fit by least squares along
    // the edge; all other boundary enriched DOFs (none in this fixture
    // unless the mesh is heavily perturbed) are pinned to zero.
    let (nx, ny) = mesh.grid_dims();
    let heav = &dofmap.cracks[0].heaviside;
    let left_edge: Vec<usize> = (0..=ny).map(|j| j * (nx + 1)).collect();
    let fitted: Vec<usize> = left_edge
        .iter()
        .copied()
        .filter(|&n| heav[n].is_some())
        .collect();
    for node in 0..mesh.n_nodes() {
        if !mesh.is_boundary_node(node) || fitted.contains(&node) {
            continue;
        }
        if let Some(p) = heav[node] {
            sys.constraints.push((2 * p, 0.0));
            sys.constraints.push((2 * p + 1, 0.0));
        }
        for per_tip in &dofmap.cracks[0].branch {
            if let Some(ps) = per_tip[node] {
                for p in ps {
                    sys.constraints.push((2 * p, 0.0));
                    sys.constraints.push((2 * p + 1, 0.0));
                }
            }
        }
    }
    if fitted.is_empty() {
        return Ok(());
    }

    let mut rows_a: Vec<Vec<f64>> = Vec::new();
    let mut rhs_x: Vec<f64> = Vec::new();
    let mut rhs_y: Vec<f64> = Vec::new();
    for seg in left_edge.windows(2) {
        let (n0, n1) = (seg[0], seg[1]);
        if !fitted.contains(&n0) && !fitted.contains(&n1) {
            continue;
        }
        let (p0, p1) = (mesh.nodes[n0], mesh.nodes[n1]);
        let u0 = exact_disp(&fx.frame, &fx.mat, p0);
        let u1 = exact_disp(&fx.frame, &fx.mat, p1);
        for k in 0..8 {
            let s = (k as f64 + 0.5) / 8.0;
            let x = p0 + (p1 - p0) * s;
            let hval = match side_of_path(x, &fx.crack) {
                Ok(v) => v,
                Err(_) => continue, // sample on the discontinuity
            };
            let target = exact_disp(&fx.frame, &fx.mat, x) - (u0 * (1.0 - s) + u1 * s);
            let mut row = vec![0.0; fitted.len()];
            for (col, &fnode) in fitted.iter().enumerate() {
                let shape = if fnode == n0 {
                    1.0 - s
                } else if fnode == n1 {
                    s
                } else {
                    0.0
                };
                row[col] = shape * hval;
            }
            rows_a.push(row);
            rhs_x.push(target.x);
            rhs_y.push(target.y);
        }
    }
    let m = rows_a.len();
    let a = DMatrix::from_fn(m, fitted.len(), |i, j| rows_a[i][j]);
    let svd = a.svd(true, true);
    let ax = svd.solve(&DVector::from_vec(rhs_x), 1e-12).map_err(|e| {
        xfrac_core::Error::Singular(format!("boundary enrichment fit: {e}"))
    })?;
    let ay = svd
        .solve(&DVector::from_vec(rhs_y), 1e-12)
        .map_err(|e| xfrac_core::Error::Singular(format!("boundary enrichment fit: {e}")))?;
    for (col, &fnode) in fitted.iter().enumerate() {
        let p = heav[fnode].unwrap();
        sys.constraints.push((2 * p, ax[col]));
        sys.constraints.push((2 * p + 1, ay[col]));
    }
    Ok(())
}

/// Solves one mesh and extracts K_I.
pub fn solve_k(fx: &Fixture, spec: &BenchmarkSpec, tip_budget: Option<usize>) -> Result<(SifPair, Solved)> {
    let disc = Discontinuities {
        cracks: vec![fx.crack.clone()],
        interface: None,
    };
    let solved = solve_with(
        &fx.mesh,
        &fx.mat,
        disc,
        spec.scheme,
        tip_budget,
        |mesh, dofmap, sys| apply_bcs(fx, mesh, dofmap, sys),
    )?;
    let k = solved.sif(&fx.mesh, &fx.mat, &fx.frame, fx.r_d)?;
    Ok((k, solved))
}

/// Mesh-convergence rows for K_I.
pub fn convergence(spec: &BenchmarkSpec) -> Result<Vec<ConvergenceRow>> {
    let mut rows = Vec::new();
    for &n in &spec.meshes {
        let fx = fixture(n, spec.alpha_ir, spec.seed)?;
        let (k, _) = solve_k(&fx, spec, spec.tip_budget())?;
        rows.push(ConvergenceRow::new(SIDE / n as f64, k.k1, k_ref()));
    }
    if rows.len() >= 2 {
        convergence_driver(&mut rows)?;
    }
    Ok(rows)
}

/// Integration-point sweep on a fixed 60x60 mesh (budget on the x axis).
pub fn point_sweep(spec: &BenchmarkSpec, budgets: &[usize]) -> Result<Vec<ConvergenceRow>> {
    let fx = fixture(60, spec.alpha_ir, spec.seed)?;
    let mut rows = Vec::new();
    for &b in budgets {
        let (k, _) = solve_k(&fx, spec, Some(b))?;
        rows.push(ConvergenceRow::new(b as f64, k.k1, k_ref()));
    }
    Ok(rows)
}

pub fn run(spec: &BenchmarkSpec) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    match &spec.tip_points {
        Some(budgets) if budgets.len() > 1 => {
            let rows = point_sweep(spec, budgets)?;
            let path = spec.out.join("griffith_sweep.csv");
            write_csv(&path, &rows)?;
            written.push(path);
        }
        _ => {
            let rows = convergence(spec)?;
            let path = spec.out.join("griffith_convergence.csv");
            write_csv(&path, &rows)?;
            written.push(path);
        }
    }
    Ok(written)
}
