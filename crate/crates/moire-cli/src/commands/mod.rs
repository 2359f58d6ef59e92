pub mod bands;
pub mod chern;
pub mod flatband;
pub mod magic;
pub mod selftest;
pub mod separation;
pub mod symcheck;

use crate::config::AlphaSpec;
use crate::error::{CliError, CliResult};
use moire::planewave::{BasisSpec, PlaneWaveBasis};
use moire::spectra::{magic_angles, refine_magic, DEFAULT_CHECK_PROBE};
use moire::C64;

/// Upper bound on `|α|` for every magic-parameter search.
pub const MAGIC_MAX_MODULUS: f64 = 10.0;

pub(crate) fn basis(n: usize, cutoff: usize) -> CliResult<PlaneWaveBasis> {
    Ok(PlaneWaveBasis::new(BasisSpec::new(n, cutoff))?)
}

/// Smallest cutoff that resolves the first `j` real magic parameters.
fn locate_cutoff(j: usize) -> usize {
    match j {
        1 => 6,
        2 | 3 => 8,
        4 => 10,
        _ => 14,
    }
}

/// Snaps a refined parameter onto the real axis when its imaginary part is
/// truncation noise.
pub(crate) fn snap_real(alpha: C64) -> C64 {
    if alpha.im.abs() <= 1e-5 * alpha.re.abs().max(1.0) {
        C64::new(alpha.re, 0.0)
    } else {
        alpha
    }
}

/// `magic:j` is located at a small cutoff and then refined at `cutoff`.
pub fn resolve_alpha(spec: AlphaSpec, cutoff: usize, probe: C64) -> CliResult<C64> {
    match spec {
        AlphaSpec::Value(a) => Ok(a),
        AlphaSpec::Magic(j) => {
            let coarse = basis(1, locate_cutoff(j))?;
            let set = magic_angles(&coarse, &[], probe, DEFAULT_CHECK_PROBE, MAGIC_MAX_MODULUS)?;
            let reals = set.real_values();
            let &alpha0 = reals.get(j - 1).ok_or_else(|| {
                CliError::Config(format!(
                    "magic:{j} requested but only {} real magic parameters below {MAGIC_MAX_MODULUS} were found",
                    reals.len()
                ))
            })?;
            let fine = basis(1, cutoff.max(locate_cutoff(j)))?;
            Ok(snap_real(refine_magic(&fine, C64::new(alpha0, 0.0), probe)?))
        }
    }
}
