//! Infinitesimal rigidity of triangulated polyhedra: Cayley–Menger dihedral
//! angles, the stiffness matrix of a triangulation, the rigidity matrix of the
//! surface, and the polyhedra they are tested on.

pub mod cayley_menger;
pub mod deformation;
pub mod document;
pub mod error;
pub mod generators;
pub mod geom;
pub mod hilbert_einstein;
pub mod pipeline;
pub mod stiffness;
pub mod triangulation;

pub use error::{Error, Result};
