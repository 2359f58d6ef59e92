use crate::lattice::C64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MoireError {
    #[error("layer count must be at least 1, got {0}")]
    InvalidLayers(usize),
    #[error("cutoff must be at least 1, got {0}")]
    InvalidCutoff(usize),
    #[error("expected {expected} tunnelling parameters, got {got}")]
    TunnellingLength { expected: usize, got: usize },
    #[error("state dimension {got} does not match basis dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("resolvent symbol vanishes on component {component} (|p+q+k| = {modulus:.3e})")]
    SingularResolvent { component: usize, modulus: f64 },
    #[error("probe k = {k} lies within {distance:.3e} of the free spectrum")]
    ProbeOnSpectrum { k: C64, distance: f64 },
    #[error("alpha = {alpha} is not a simple magic parameter (multiplicity {multiplicity})")]
    NotSimpleMagic { alpha: C64, multiplicity: usize },
    #[error("separation radicand is negative: eigen-sum = {sum}")]
    NegativeRadicand { sum: f64 },
    #[error("theta quotient evaluated at a pole: zeta = {0}")]
    PoleAt(C64),
    #[error("sample grid hits the pole set at z = {0}")]
    GridPole(C64),
    #[error("rotation moves {dropped} populated modes out of the truncation")]
    RotationLeavesBox { dropped: usize },
    #[error("boundary phase winding {winding} is not an integer")]
    BranchAmbiguity { winding: f64 },
    #[error("link overlap modulus {modulus:.3e} is too small; refine the grid")]
    DegenerateOverlap { modulus: f64 },
    #[error("plaquette sum {value} is not within 1e-6 of an integer")]
    NonIntegralChern { value: f64 },
    #[error("dense decomposition failed: {0}")]
    Decomposition(String),
    #[error("no convergence: {0}")]
    Convergence(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, MoireError>;
