//! TPMS lattice geometry for the sector-shaped compliant module.
//!
//! A lattice phase is the shell `|g(p) - t| <= w` of a triply periodic
//! level-set function `g`, clipped to a [`Domain`]. From it we estimate
//! relative density, invert density for the shell half-width, and extract a
//! closed, consistently oriented triangle mesh for printing.

mod density;
mod domain;
mod extract;
mod field;
mod mesh;
mod stl;

pub use density::{solve_level_for_density, volume_fraction, DENSITY_TOLERANCE, SAMPLING_SEED};
pub use domain::{BoxDomain, Domain, SectorDomain};
pub use extract::{extract_surface, mesh_module, GridSpec};
pub use field::{eval_field, TpmsField, TpmsKind};
pub use mesh::{MeshDefect, SurfaceMesh, MIN_TRIANGLE_AREA};
pub use stl::{export_stl, import_stl, read_stl, stl_bytes};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LatticeError {
    #[error("invalid {field}: {reason}")]
    InvalidParameter { field: &'static str, reason: String },
    #[error("empty domain: {0}")]
    EmptyDomain(String),
    #[error("empty lattice: no solid material inside the domain")]
    EmptyLattice,
    #[error("density bisection did not converge: best {achieved:.4} for target {target:.4}")]
    NonConvergence { target: f64, achieved: f64 },
    #[error("extracted mesh is defective: {0}")]
    Defective(#[from] MeshDefect),
    #[error("malformed STL: {0}")]
    MalformedStl(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> LatticeError {
    LatticeError::InvalidParameter {
        field,
        reason: reason.into(),
    }
}
