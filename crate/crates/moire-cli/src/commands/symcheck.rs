//! Protected zero modes: sector kernels on `ℂ/3Λ` and `E₁` at `K`, `K′`.

use super::{basis, resolve_alpha};
use crate::config::{AlphaSpec, Defaults, RunConfig};
use crate::error::CliResult;
use crate::output::{Check, Cx, Outcome, OutputWriter};
use moire::perturbation::K_PRIME;
use moire::spectra::singular_bands;
use moire::symmetry::{verify_protected, ProtectedCheck, DEFAULT_SYM_CUTOFF};
use moire::C64;
use rayon::prelude::*;
use serde::Serialize;

pub const DEFAULTS: Defaults = Defaults { n: 2, cutoff: DEFAULT_SYM_CUTOFF, ..Defaults::new("symcheck") };
/// Cutoff of the Floquet basis used for `E₁(K)` and `E₁(K′)`.
pub const FLOQUET_CUTOFF: usize = 10;
pub const E1_TOL: f64 = 1e-8;
/// Couplings checked besides the first magic parameter, which sits between 0.25 and 1.1.
pub const FIXED_COUPLINGS: [f64; 3] = [0.0, 0.25, 1.1];
pub const DEFAULT_TUNNELLING: [f64; 3] = [0.2, 1.0, 2.5];
/// Tunnelling strength at which the extra Dirac cones are gapped out.
pub const GAPPED_T: f64 = 0.5;
const LOW_SINGULAR: usize = 6;
const ZERO_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Serialize)]
pub struct SectorOut {
    pub label: String,
    pub dim: usize,
    pub d_kernel: usize,
    pub h_kernel: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckOut {
    pub alpha: Cx,
    pub t: Vec<f64>,
    pub first_sector_ok: bool,
    pub last_sector_ok: bool,
    pub last_collinearity: f64,
    pub e1_k: f64,
    pub e1_k_prime: f64,
    /// Sectors with a nontrivial kernel of `D` or `H`.
    pub kernels: Vec<SectorOut>,
}

#[derive(Debug, Clone, Serialize)]
pub struct UnprotectedPair {
    pub alpha: Cx,
    /// Lowest singular values at `K` with all tunnelling switched off.
    pub untunnelled: Vec<f64>,
    pub tunnelled: Vec<f64>,
    pub zero_modes_untunnelled: usize,
    pub zero_modes_tunnelled: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SymcheckReport {
    pub layers: usize,
    pub cutoff: usize,
    pub floquet_cutoff: usize,
    pub checks: Vec<CheckOut>,
    pub untunnelled: Vec<CheckOut>,
    pub pair: UnprotectedPair,
}

fn to_out(c: &ProtectedCheck, e1_k: f64, e1_k_prime: f64) -> CheckOut {
    CheckOut {
        alpha: c.alpha.into(),
        t: c.t.clone(),
        first_sector_ok: c.first_sector_ok,
        last_sector_ok: c.last_sector_ok,
        last_collinearity: c.last_collinearity,
        e1_k,
        e1_k_prime,
        kernels: c
            .sectors
            .iter()
            .filter(|s| s.d_kernel + s.h_kernel > 0)
            .map(|s| SectorOut { label: s.label.to_string(), dim: s.dim, d_kernel: s.d_kernel, h_kernel: s.h_kernel })
            .collect(),
    }
}

pub fn run(cfg: &RunConfig) -> CliResult<Outcome<SymcheckReport>> {
    let r = cfg.resolve(&DEFAULTS)?;
    let probe = r.probe();
    let magic = resolve_alpha(AlphaSpec::Magic(1), FLOQUET_CUTOFF, probe)?;
    let alphas: Vec<C64> = match cfg.alpha {
        Some(spec) => vec![resolve_alpha(spec, FLOQUET_CUTOFF, probe)?],
        None => {
            let [a, b, c] = FIXED_COUPLINGS.map(|x| C64::new(x, 0.0));
            vec![a, b, magic, c]
        }
    };
    let mut ts: Vec<Vec<f64>> = match &cfg.t {
        Some(_) => vec![r.t.clone()],
        None => DEFAULT_TUNNELLING.iter().map(|&x| vec![x; r.n - 1]).collect(),
    };
    ts.dedup();
    let zeros = vec![0.0; r.n - 1];

    let floquet = basis(r.n, FLOQUET_CUTOFF)?;
    let e1 = |alpha: C64, t: &[f64]| -> CliResult<(f64, f64)> {
        let at = |k| singular_bands(&floquet, alpha, t, k, 1).map(|v| v[0]);
        Ok((at(C64::new(0.0, 0.0))?, at(K_PRIME)?))
    };
    let annotate = |checks: &[ProtectedCheck]| -> CliResult<Vec<CheckOut>> {
        checks
            .par_iter()
            .map(|c| {
                let (k, kp) = e1(c.alpha, &c.t)?;
                Ok(to_out(c, k, kp))
            })
            .collect()
    };
    let checks = annotate(&verify_protected(r.n, r.cutoff, &alphas, &ts)?.checks)?;
    let untunnelled = annotate(&verify_protected(r.n, r.cutoff, &[magic], std::slice::from_ref(&zeros))?.checks)?;

    let low = |t: &[f64]| singular_bands(&floquet, magic, t, C64::new(0.0, 0.0), LOW_SINGULAR);
    let (off, on) = (low(&zeros)?, low(&vec![GAPPED_T; r.n - 1])?);
    let count = |v: &[f64]| v.iter().filter(|&&s| s < ZERO_TOL).count();
    let pair = UnprotectedPair {
        alpha: magic.into(),
        zero_modes_untunnelled: count(&off),
        zero_modes_tunnelled: count(&on),
        untunnelled: off,
        tunnelled: on,
    };

    let all: Vec<&CheckOut> = checks.iter().chain(&untunnelled).collect();
    let sectors_ok = all.iter().all(|c| c.first_sector_ok && c.last_sector_ok);
    let worst_e1 = all.iter().map(|c| c.e1_k.max(c.e1_k_prime)).fold(0.0, f64::max);
    let checks_v = vec![
        Check::assertion(
            "protected sectors",
            sectors_ok,
            format!("{} of {} parameter pairs pass", all.iter().filter(|c| c.first_sector_ok && c.last_sector_ok).count(), all.len()),
        ),
        Check::assertion("E1 at K and K'", worst_e1 <= E1_TOL, format!("max {worst_e1:.3e}")),
    ];
    let report = SymcheckReport {
        layers: r.n,
        cutoff: r.cutoff,
        floquet_cutoff: FLOQUET_CUTOFF,
        checks,
        untunnelled,
        pair,
    };
    let mut out = OutputWriter::new(&cfg.out_dir(), &r)?;
    out.write_json("symcheck.json", &report, &checks_v)?;
    Ok(out.finish(report, checks_v))
}
