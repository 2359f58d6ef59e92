//! Chiral model of twisted multilayer graphene: plane-wave operators, magic
//! parameters, flat-band constructions from theta functions, and Chern numbers.

pub mod chern;
pub mod error;
pub mod lattice;
pub mod linalg;
pub mod planewave;
pub mod potential;
pub mod perturbation;
pub mod spectra;
pub mod symmetry;
pub mod theta;

pub use error::{MoireError, Result};
pub use lattice::C64;
