//! Separation of the second band from the flat band at `K′` for two layers.

use super::resolve_alpha;
use crate::config::{Defaults, RunConfig};
use crate::error::CliResult;
use crate::output::{Check, Cx, Outcome, OutputWriter};
use moire::perturbation::{log_samples, separation_report};
use serde::Serialize;

pub const DEFAULTS: Defaults = Defaults { n: 2, fixed_n: Some(2), accepts_t: false, samples: 6, ..Defaults::new("separation") };
pub const T_RANGE: (f64, f64) = (1e-3, 1e-2);
pub const E1_TOL: f64 = 1e-8;
pub const MISMATCH_TOL: f64 = 0.02;

#[derive(Debug, Clone, Serialize)]
pub struct SeparationOut {
    pub alpha: Cx,
    pub cutoff: usize,
    pub c_formula: f64,
    pub c_fit: f64,
    pub relative_mismatch: f64,
    /// Log-log slope of `|E₂ − Ct|` on the larger samples.
    pub correction_exponent: f64,
    pub truncation_count: usize,
    pub t: Vec<f64>,
    pub e1: Vec<f64>,
    pub e2: Vec<f64>,
}

pub fn run(cfg: &RunConfig) -> CliResult<Outcome<SeparationOut>> {
    let r = cfg.resolve(&DEFAULTS)?;
    let alpha = resolve_alpha(r.alpha, r.cutoff, r.probe())?;
    let rep = separation_report(r.cutoff, alpha, &log_samples(T_RANGE.0, T_RANGE.1, r.samples))?;
    let report = SeparationOut {
        alpha: alpha.into(),
        cutoff: r.cutoff,
        c_formula: rep.c_formula,
        c_fit: rep.c_fit,
        relative_mismatch: rep.relative_mismatch(),
        correction_exponent: rep.exponent,
        truncation_count: rep.truncation_count,
        t: rep.fit.t.clone(),
        e1: rep.fit.e1.clone(),
        e2: rep.fit.e2.clone(),
    };
    let max_e1 = report.e1.iter().cloned().fold(0.0, f64::max);
    let checks = vec![
        Check::assertion("E1 vanishes at K'", max_e1 <= E1_TOL, format!("max E1 = {max_e1:.3e}")),
        Check::assertion(
            "slope matches C",
            report.relative_mismatch <= MISMATCH_TOL,
            format!("C = {:.10}, fit = {:.10}", report.c_formula, report.c_fit),
        ),
    ];
    let mut out = OutputWriter::new(&cfg.out_dir(), &r)?;
    out.write_json("separation.json", &report, &checks)?;
    Ok(out.finish(report, checks))
}
