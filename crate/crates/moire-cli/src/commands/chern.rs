//! Chern number of the flat-band bundle, from the multipliers and from a
//! link-variable lattice.

use super::{basis, resolve_alpha};
use crate::config::{Defaults, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output::{Check, Cx, Outcome, OutputWriter};
use moire::chern::{chern_analytic, chern_numeric};
use serde::Serialize;

pub const DEFAULTS: Defaults = Defaults { cutoff: 8, grid: &[8, 12, 16], ..Defaults::new("chern") };
pub const ANALYTIC_LAYERS: u32 = 5;

#[derive(Debug, Clone, Serialize)]
pub struct GridResult {
    pub grid: usize,
    pub value: i64,
    pub flux: f64,
    pub min_overlap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChernReport {
    pub alpha: Cx,
    pub layers: usize,
    pub t: Vec<f64>,
    pub cutoff: usize,
    /// `c₁` from the multipliers for `n = 1..=5`.
    pub analytic: Vec<(u32, i64)>,
    pub numeric: Vec<GridResult>,
}

pub fn run(cfg: &RunConfig) -> CliResult<Outcome<ChernReport>> {
    let r = cfg.resolve(&DEFAULTS)?;
    if let Some(&g) = r.grid.iter().find(|&&g| g < 6) {
        return Err(CliError::Config(format!("Berry grids must be at least 6, got {g}")));
    }
    let alpha = resolve_alpha(r.alpha, r.cutoff, r.probe())?;
    let b = basis(r.n, r.cutoff)?;
    let analytic = (1..=ANALYTIC_LAYERS)
        .map(|n| Ok((n, chern_analytic(n)?)))
        .collect::<CliResult<Vec<_>>>()?;
    let numeric = r
        .grid
        .iter()
        .map(|&g| {
            let c = chern_numeric(&b, alpha, &r.t, g)?;
            Ok(GridResult { grid: g, value: c.value, flux: c.flux, min_overlap: c.min_overlap })
        })
        .collect::<CliResult<Vec<_>>>()?;

    let expected = -(r.n as i64);
    let analytic_ok = analytic.iter().all(|&(n, c)| c == -(n as i64));
    let numeric_ok = numeric.iter().all(|g| g.value == expected);
    let values: Vec<i64> = numeric.iter().map(|g| g.value).collect();
    let checks = vec![
        Check::assertion("analytic", analytic_ok, format!("{analytic:?}")),
        Check::assertion("numeric", numeric_ok, format!("expected {expected}, got {values:?}")),
    ];
    let report = ChernReport { alpha: alpha.into(), layers: r.n, t: r.t.clone(), cutoff: r.cutoff, analytic, numeric };
    let mut out = OutputWriter::new(&cfg.out_dir(), &r)?;
    out.write_json("chern.json", &report, &checks)?;
    Ok(out.finish(report, checks))
}
