//! Gap eigenvalues, spectral measures and radial wave-map evolution around
//! the equivariant harmonic maps of the hyperbolic plane.

pub mod checks;
pub mod cli;
pub mod error;
pub mod evolve;
pub mod geometry;
pub mod numerics;
pub mod operators;
pub mod profile;
pub mod spectral;
pub mod weyl;

pub use error::{Error, Result};
pub use geometry::{HarmonicFamily, Target};
pub use operators::{assemble, OperatorKind, OperatorSpec};
pub use profile::RadialProfile;
