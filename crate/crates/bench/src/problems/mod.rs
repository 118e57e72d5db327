//! The six benchmark studies and their dispatcher.

pub mod bimaterial;
pub mod dcb;
pub mod edge;
pub mod griffith;
pub mod inclined;
pub mod multicrack;

use crate::config::{BenchmarkSpec, Problem};
use xfrac_core::Result;

/// Runs one benchmark and returns the list of files written.
pub fn run(spec: &BenchmarkSpec) -> Result<Vec<std::path::PathBuf>> {
    std::fs::create_dir_all(&spec.out)?;
    match spec.problem {
        Problem::Griffith => griffith::run(spec),
        Problem::Edge => edge::run(spec),
        Problem::Inclined => inclined::run(spec),
        Problem::Multicrack => multicrack::run(spec),
        Problem::Bimaterial => bimaterial::run(spec),
        Problem::Dcb => dcb::run(spec),
    }
}
