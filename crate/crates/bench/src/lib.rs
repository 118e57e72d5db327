//! Benchmark harness: six fracture/interface studies, convergence sweeps
//! and CSV/SVG reporting on top of the `xfrac-core` solver.

pub mod config;
pub mod problems;
pub mod report;

use nalgebra::DVector;
use xfrac_core::enrichment::DofMap;
use xfrac_core::fem::{
    assemble, build_quadrature, solve, DisplacementField, Discontinuities, LinearSystem,
    MaterialModel,
};
use xfrac_core::fracture::{interaction_integral, SifPair};
use xfrac_core::geometry::TipFrame;
use xfrac_core::mesh::Mesh;
use xfrac_core::quadrature::{QuadratureSet, Scheme};
use xfrac_core::Result;

/// A solved model with everything needed for post-processing.
pub struct Solved {
    pub dofmap: DofMap,
    pub disc: Discontinuities,
    pub quad: Vec<QuadratureSet>,
    pub sys: LinearSystem,
    pub u: DVector<f64>,
}

impl Solved {
    pub fn field<'a>(&'a self, mesh: &'a Mesh) -> DisplacementField<'a> {
        DisplacementField {
            mesh,
            dofmap: &self.dofmap,
            disc: &self.disc,
            u: self.u.clone(),
        }
    }

    pub fn sif(
        &self,
        mesh: &Mesh,
        mat: &MaterialModel,
        frame: &TipFrame,
        r_d: f64,
    ) -> Result<SifPair> {
        interaction_integral(&self.field(mesh), mat, &self.quad, frame, r_d)
    }
}

/// Assemble, apply boundary conditions and solve one configuration.
pub fn solve_with(
    mesh: &Mesh,
    mat: &MaterialModel,
    disc: Discontinuities,
    scheme: Scheme,
    tip_budget: Option<usize>,
    bc: impl FnOnce(&Mesh, &DofMap, &mut LinearSystem) -> Result<()>,
) -> Result<Solved> {
    let dofmap = DofMap::build(mesh, &disc.cracks, disc.interface.as_ref())?;
    let quad = build_quadrature(mesh, &disc, scheme, tip_budget)?;
    let mut sys = assemble(mesh, &dofmap, &disc, mat, &quad)?;
    bc(mesh, &dofmap, &mut sys)?;
    let u = solve(&sys)?;
    Ok(Solved {
        dofmap,
        disc,
        quad,
        sys,
        u,
    })
}
