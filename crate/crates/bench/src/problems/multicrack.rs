//! Two interacting cracks in a 1x2 plate under tension; the mode I SIF at
//! the inner tip of the first crack is normalized by the finite-width
//! center-crack solution.

use crate::config::BenchmarkSpec;
use crate::report::{write_csv, ConvergenceRow};
use crate::solve_with;
use std::f64::consts::PI;
use std::path::PathBuf;
use xfrac_core::fem::{
    add_edge_traction, BoundarySide, Discontinuities, MaterialModel, Regime,
};
use xfrac_core::fracture::SifPair;
use xfrac_core::geometry::CrackPath;
use xfrac_core::mesh::Mesh;
use xfrac_core::{Error, Result, Vec2};

pub const WIDTH: f64 = 1.0;
pub const HEIGHT: f64 = 2.0;
pub const SIGMA: f64 = 1.0;
pub const A1: f64 = 0.1; // half-length of crack 1
pub const E: f64 = 3e7;
pub const NU: f64 = 0.3;

/// Finite-width center-crack reference with the secant correction.
pub fn k_center(a: f64) -> f64 {
    let sec = 1.0 / (PI * a / WIDTH).cos();
    SIGMA * (PI * a * sec).sqrt()
}

fn crack_at(center: Vec2, half_len: f64, theta: f64) -> Result<CrackPath> {
    let dir = Vec2::new(theta.cos(), theta.sin());
    CrackPath::new(vec![center - dir * half_len, center + dir * half_len], true, true)
}

fn segments_intersect(a: (Vec2, Vec2), b: (Vec2, Vec2)) -> bool {
    let cross = |o: Vec2, p: Vec2, q: Vec2| (p.x - o.x) * (q.y - o.y) - (p.y - o.y) * (q.x - o.x);
    let (d1, d2) = (cross(a.0, a.1, b.0), cross(a.0, a.1, b.1));
    let (d3, d4) = (cross(b.0, b.1, a.0), cross(b.0, b.1, a.1));
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

/// SIFs at the inner (second) tip of crack 1 for the given offsets and
/// angles; `h_off`/`l_off` are the vertical/horizontal center offsets.
#[allow(clippy::too_many_arguments)]
pub fn solve_point_a(
    n: usize,
    h_off: f64,
    l_off: f64,
    a2: f64,
    theta1: f64,
    theta2: f64,
    spec: &BenchmarkSpec,
) -> Result<SifPair> {
    let mesh = Mesh::structured(n, 2 * n, Vec2::zeros(), Vec2::new(WIDTH, HEIGHT))?;
    let c1 = Vec2::new(0.5 - 0.5 * l_off, 1.0 - 0.5 * h_off);
    let c2 = Vec2::new(0.5 + 0.5 * l_off, 1.0 + 0.5 * h_off);
    let crack1 = crack_at(c1, A1, theta1)?;
    let crack2 = crack_at(c2, a2, theta2)?;
    let (s1, s2) = (crack1.vertices(), crack2.vertices());
    if segments_intersect((s1[0], s1[1]), (s2[0], s2[1])) {
        return Err(Error::Unsupported("cracks intersect".into()));
    }
    let frame = crack1.tips()[1]; // point A: inner tip of crack 1
    let mat = MaterialModel::new(E, NU, Regime::PlaneStrain)?;
    let disc = Discontinuities {
        cracks: vec![crack1, crack2],
        interface: None,
    };
    let solved = solve_with(&mesh, &mat, disc, spec.scheme, spec.tip_budget(), |mesh, dofmap, sys| {
        add_edge_traction(mesh, sys, BoundarySide::Top, Vec2::new(0.0, SIGMA));
        add_edge_traction(mesh, sys, BoundarySide::Bottom, Vec2::new(0.0, -SIGMA));
        let (nx, _) = mesh.grid_dims();
        let bl = dofmap.std_pair(0);
        let br = dofmap.std_pair(nx);
        sys.constraints.push((2 * bl, 0.0));
        sys.constraints.push((2 * bl + 1, 0.0));
        sys.constraints.push((2 * br + 1, 0.0));
        Ok(())
    })?;
    solved.sif(&mesh, &mat, &frame, 0.08)
}

pub fn run(spec: &BenchmarkSpec) -> Result<Vec<PathBuf>> {
    let n = spec.meshes[spec.meshes.len() - 1];
    let kc = k_center(A1);

    // Angle sweep at the reference offsets (H = 0.1, L = 0.2), equal cracks.
    let mut rows = Vec::new();
    for deg in (0..=90).step_by(15) {
        let t = (deg as f64).to_radians();
        let k = solve_point_a(n, 0.1, 0.2, A1, t, t, spec)?;
        rows.push(ConvergenceRow::new(deg as f64, k.k1, kc));
    }
    for deg in (0..=90).step_by(15) {
        let t = (deg as f64).to_radians();
        let k = solve_point_a(n, 0.1, 0.2, A1, t, t, spec)?;
        rows.push(ConvergenceRow::new(deg as f64, k.k2, kc));
    }
    let sweep_path = spec.out.join("multicrack_convergence.csv");
    write_csv(&sweep_path, &rows)?;

    // Offset/length-ratio study at theta = 0: h column is H/L.
    let mut ratio_rows = Vec::new();
    for ratio in [1.0, 2.0] {
        for h_off in [0.05, 0.1, 0.2] {
            let k = solve_point_a(n, h_off, 0.2, A1 * ratio, 0.0, 0.0, spec)?;
            ratio_rows.push(ConvergenceRow::new(h_off / 0.2, k.k1, kc));
        }
    }
    let ratio_path = spec.out.join("multicrack_ratio.csv");
    write_csv(&ratio_path, &ratio_rows)?;
    Ok(vec![sweep_path, ratio_path])
}
