//! Theta-function flat-band states checked against the SVD kernel, and the
//! integral of the second kernel component over the first six magic parameters.

use super::{basis, resolve_alpha, snap_real};
use crate::config::{Defaults, RunConfig};
use crate::error::CliResult;
use crate::output::{fmt_f64, Check, Cx, Outcome, OutputWriter};
use moire::lattice::{distance_to_dual_coset, k_from_fractional};
use moire::linalg::{collinearity, norm};
use moire::planewave::assemble_dn;
use moire::spectra::{lowest_state, refine_magic};
use moire::theta::{FlatBandFamily, MagicKernel, GRID_SIZE};
use moire::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

pub const DEFAULTS: Defaults = Defaults { n: 2, cutoff: 10, ..Defaults::new("flatband") };
pub const RESIDUAL_TOL: f64 = 1e-7;
pub const COLLINEARITY_TOL: f64 = 1e-6;
/// Minimum distance of a random momentum from `Λ*` and `Λ* − i`.
pub const DIRAC_EXCLUSION: f64 = 0.05;
pub const INTEGRAL_CUTOFF: usize = 18;
/// Three-figure values of the first six real magic parameters, used as
/// starting points for refinement.
pub const REFERENCE_MAGIC: [f64; 6] = [0.586, 2.22, 3.75, 5.28, 6.79, 8.31];
/// Reference values of `|I(u₂)|` at those parameters.
pub const REFERENCE_INTEGRALS: [f64; 6] = [0.2345, 0.0542, 0.0033, 0.0022, 0.0013, 8.3963e-4];
pub const INTEGRAL_FLOOR: f64 = 1e-8;
pub const REFERENCE_DEVIATION: f64 = 0.1;
const ORIGIN_PROBE: f64 = 1e-6;
const ORIGIN_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Serialize)]
pub struct StateCheck {
    pub k: Cx,
    pub residual: f64,
    pub collinearity: f64,
    pub singular_value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct IntegralRow {
    pub index: usize,
    pub alpha: f64,
    pub integral: f64,
    pub zero_mode: f64,
    pub reference: f64,
    pub ratio: f64,
    pub beyond_reference_tolerance: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FlatbandReport {
    pub alpha: Cx,
    pub layers: usize,
    pub t: Vec<f64>,
    pub cutoff: usize,
    pub grid_size: usize,
    pub states: Vec<StateCheck>,
    /// `‖Φ_𝐤 − Φ_0‖/‖Φ_0‖` at `|𝐤| = 10⁻⁶`.
    pub origin_limit: f64,
    pub integral_cutoff: usize,
    pub integrals: Vec<IntegralRow>,
    /// Normalisation: unit coefficient norm, zero mode of `u₂` real and nonnegative.
    pub normalization: &'static str,
    pub strictly_decreasing: bool,
}

/// `count` seeded momenta away from the Dirac cosets.
pub fn random_momenta(seed: u64, count: usize) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let k = k_from_fractional(3.0 * rng.random::<f64>(), 3.0 * rng.random::<f64>());
        if distance_to_dual_coset(k, C64::new(0.0, 0.0)) > DIRAC_EXCLUSION
            && distance_to_dual_coset(k, C64::new(0.0, -1.0)) > DIRAC_EXCLUSION
        {
            out.push(k);
        }
    }
    out
}

/// `|I(u₂)|` at the refined first six real magic parameters.
pub fn integral_table(cutoff: usize, probe: C64) -> CliResult<Vec<IntegralRow>> {
    let single = basis(1, cutoff)?;
    REFERENCE_MAGIC
        .iter()
        .zip(REFERENCE_INTEGRALS)
        .enumerate()
        .map(|(i, (&seed, reference))| {
            let alpha = snap_real(refine_magic(&single, C64::new(seed, 0.0), probe)?);
            let kernel = MagicKernel::compute(cutoff, alpha, probe)?;
            let integral = kernel.integral().abs();
            let ratio = integral / reference;
            Ok(IntegralRow {
                index: i + 1,
                alpha: alpha.re,
                integral,
                zero_mode: kernel.zero_mode(),
                reference,
                ratio,
                beyond_reference_tolerance: (ratio - 1.0).abs() > REFERENCE_DEVIATION,
            })
        })
        .collect()
}

pub fn strictly_decreasing(rows: &[IntegralRow]) -> bool {
    rows.windows(2).all(|w| w[1].integral < w[0].integral)
}

pub fn run(cfg: &RunConfig) -> CliResult<Outcome<FlatbandReport>> {
    let r = cfg.resolve(&DEFAULTS)?;
    let probe = r.probe();
    let alpha = resolve_alpha(r.alpha, r.cutoff, probe)?;
    let b = basis(r.n, r.cutoff)?;
    let family = FlatBandFamily::new(&b, &r.t, MagicKernel::compute(r.cutoff, alpha, probe)?, GRID_SIZE)?;

    let ks = random_momenta(r.seed, r.samples);
    let phis = ks.par_iter().map(|&k| Ok(family.state(k)?)).collect::<CliResult<Vec<_>>>()?;
    let states = ks
        .par_iter()
        .zip(&phis)
        .map(|(&k, phi)| {
            let d = assemble_dn(&b, alpha, &r.t, k)?.matrix;
            let residual = norm(&d.mul_vec(phi.coeffs())) / phi.norm();
            let (singular_value, v) = lowest_state(&b, alpha, &r.t, k)?;
            Ok(StateCheck { k: k.into(), residual, collinearity: collinearity(phi.coeffs(), &v), singular_value })
        })
        .collect::<CliResult<Vec<_>>>()?;

    let origin = family.state_at_origin();
    let near = family.state(C64::from_polar(ORIGIN_PROBE, 0.7))?;
    let diff: Vec<C64> = near.coeffs().iter().zip(origin.coeffs()).map(|(a, b)| a - b).collect();
    let origin_limit = norm(&diff) / origin.norm();

    let integral_cutoff = r.cutoff.max(INTEGRAL_CUTOFF);
    let integrals = integral_table(integral_cutoff, probe)?;
    let decreasing = strictly_decreasing(&integrals);

    let worst_residual = states.iter().map(|s| s.residual).fold(0.0, f64::max);
    let worst_collinearity = states.iter().map(|s| s.collinearity).fold(1.0, f64::min);
    let smallest_integral = integrals.iter().map(|x| x.integral).fold(f64::INFINITY, f64::min);
    let checks = vec![
        Check::assertion("residual", worst_residual <= RESIDUAL_TOL, format!("max {worst_residual:.3e}")),
        Check::assertion(
            "collinearity",
            worst_collinearity >= 1.0 - COLLINEARITY_TOL,
            format!("min {worst_collinearity:.12}"),
        ),
        Check::assertion("origin limit", origin_limit <= ORIGIN_TOL, format!("{origin_limit:.3e}")),
        Check::assertion(
            "integrals nonzero",
            smallest_integral > INTEGRAL_FLOOR,
            format!("min |I| = {smallest_integral:.6e}"),
        ),
    ];

    let mut coeff_rows = Vec::new();
    for (s, (k, phi)) in ks.iter().zip(&phis).enumerate() {
        for (flat, c) in phi.coeffs().iter().enumerate() {
            let (component, d) = b.entry(flat);
            coeff_rows.push(vec![
                s.to_string(),
                fmt_f64(k.re),
                fmt_f64(k.im),
                component.to_string(),
                d.m.to_string(),
                d.n.to_string(),
                fmt_f64(c.re),
                fmt_f64(c.im),
            ]);
        }
    }
    let report = FlatbandReport {
        alpha: alpha.into(),
        layers: r.n,
        t: r.t.clone(),
        cutoff: r.cutoff,
        grid_size: GRID_SIZE,
        states,
        origin_limit,
        integral_cutoff,
        integrals,
        normalization: "unit coefficient norm; zero mode of u2 real and nonnegative",
        strictly_decreasing: decreasing,
    };
    let mut out = OutputWriter::new(&cfg.out_dir(), &r)?;
    out.write_json("flatband.json", &report, &checks)?;
    let columns = ["sample", "k_re", "k_im", "component", "m", "n", "re", "im"].map(String::from);
    out.write_csv("flatband_states.csv", &columns, &coeff_rows)?;
    Ok(out.finish(report, checks))
}
