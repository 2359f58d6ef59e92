//! Band separation near `K′` for two layers: the second-order constant `C`
//! and a direct fit of `E₂(K′, t)`.

use crate::error::{MoireError, Result};
use crate::lattice::{c64, C64};
use crate::linalg::hermitian_eigen;
use crate::planewave::{assemble_dn, BasisSpec, PlaneWaveBasis};
use crate::spectra::{flatband_multiplicity, singular_bands, DEFAULT_PROBE};
use crate::lattice::DualIndex;
use faer::Mat;
use rayon::prelude::*;

/// `K′ = −i`.
pub const K_PRIME: C64 = C64::new(0.0, -1.0);

/// Relative threshold below which eigenvalues of `D†D` count as kernel.
pub const EIGEN_TRUNCATION: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct SeparationConstant {
    pub value: f64,
    pub terms: usize,
    pub sum: f64,
}

/// `C = (1 − Σ_{z_i>0} |⟨ψ, D u_i⟩|²/z_i)^{1/2}` with `(z_i, u_i)` the eigenpairs of
/// `D†D` for the single-layer `D(α) + K′`, and `ψ` the unit plane wave of
/// momentum `i` on the first component.
pub fn separation_constant(cutoff: usize, alpha: C64) -> Result<SeparationConstant> {
    let basis = PlaneWaveBasis::new(BasisSpec::new(1, cutoff))?;
    if alpha != c64(0.0, 0.0) {
        let multiplicity = flatband_multiplicity(&basis, alpha, &[], DEFAULT_PROBE, 1e-6)?;
        if multiplicity != 1 {
            return Err(MoireError::NotSimpleMagic { alpha, multiplicity });
        }
    }
    let d = assemble_dn(&basis, alpha, &[], K_PRIME)?.matrix.to_dense();
    let dtd = d.adjoint() * &d;
    let (z, u) = hermitian_eigen(dtd.as_ref())?;
    let zmax = z.iter().cloned().fold(0.0, f64::max);
    let psi = basis.index(0, DualIndex::new(0, 0)).expect("zero mode");
    // ⟨ψ, D u_i⟩ is row ψ of D·U.
    let row: Mat<C64> = Mat::from_fn(1, d.ncols(), |_, j| d[(psi, j)]);
    let proj = row * &u;
    let mut sum = 0.0;
    let mut terms = 0;
    for (i, &zi) in z.iter().enumerate() {
        if zi > EIGEN_TRUNCATION * zmax {
            sum += proj[(0, i)].norm_sqr() / zi;
            terms += 1;
        }
    }
    if sum > 1.0 {
        return Err(MoireError::NegativeRadicand { sum });
    }
    Ok(SeparationConstant { value: (1.0 - sum).sqrt(), terms, sum })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeparationFit {
    pub t: Vec<f64>,
    pub e1: Vec<f64>,
    pub e2: Vec<f64>,
    pub slope: f64,
    pub exponent: f64,
}

/// `count` log-spaced samples on `[lo, hi]`.
pub fn log_samples(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count.max(2) - 1) as f64).exp())
        .collect()
}

/// Samples `E₁, E₂` at `K′` for `n = 2` and fits `E₂ = s·t` through the origin
/// on the three smallest `t`. The exponent is the log-log slope of `|E₂ − s t|`
/// over the next three.
pub fn separation_fit(cutoff: usize, alpha: C64, t_samples: &[f64]) -> Result<SeparationFit> {
    if t_samples.len() < 6 {
        return Err(MoireError::InvalidArgument(format!("need at least 6 t samples, got {}", t_samples.len())));
    }
    let mut t = t_samples.to_vec();
    t.sort_by(f64::total_cmp);
    let basis = PlaneWaveBasis::new(BasisSpec::new(2, cutoff))?;
    let bands: Vec<Vec<f64>> = t
        .par_iter()
        .map(|&ti| singular_bands(&basis, alpha, &[ti], K_PRIME, 2))
        .collect::<Result<_>>()?;
    let e1: Vec<f64> = bands.iter().map(|b| b[0]).collect();
    let e2: Vec<f64> = bands.iter().map(|b| b[1]).collect();

    let num: f64 = (0..3).map(|i| t[i] * e2[i]).sum();
    let den: f64 = (0..3).map(|i| t[i] * t[i]).sum();
    let slope = num / den;

    let pts: Vec<(f64, f64)> = (3..6)
        .map(|i| (t[i].ln(), (e2[i] - slope * t[i]).abs().max(f64::MIN_POSITIVE).ln()))
        .collect();
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / 3.0;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / 3.0;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(SeparationFit { t, e1, e2, slope, exponent: sxy / sxx })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeparationReport {
    pub alpha: C64,
    pub cutoff: usize,
    pub c_formula: f64,
    pub c_fit: f64,
    pub exponent: f64,
    pub truncation_count: usize,
    pub fit: SeparationFit,
}

impl SeparationReport {
    pub fn relative_mismatch(&self) -> f64 {
        (self.c_formula - self.c_fit).abs() / self.c_formula
    }
}

pub fn separation_report(cutoff: usize, alpha: C64, t_samples: &[f64]) -> Result<SeparationReport> {
    let c = separation_constant(cutoff, alpha)?;
    let fit = separation_fit(cutoff, alpha, t_samples)?;
    Ok(SeparationReport {
        alpha,
        cutoff,
        c_formula: c.value,
        c_fit: fit.slope,
        exponent: fit.exponent,
        truncation_count: c.terms,
        fit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_constant_is_one() {
        let c = separation_constant(4, c64(0.0, 0.0)).unwrap();
        assert!((c.value - 1.0).abs() < 1e-12, "{c:?}");
    }

    #[test]
    fn log_spacing() {
        let s = log_samples(1e-3, 1e-1, 5);
        assert!((s[0] - 1e-3).abs() < 1e-15);
        assert!((s[2] - 1e-2).abs() < 1e-14);
        assert!((s[4] - 1e-1).abs() < 1e-13);
    }

    #[test]
    fn fit_needs_six_samples() {
        assert!(separation_fit(4, c64(0.5, 0.0), &[1e-3, 1e-2]).is_err());
    }
}
