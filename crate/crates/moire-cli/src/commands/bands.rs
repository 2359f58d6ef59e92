//! Singular bands along a k-path.

use super::{basis, resolve_alpha};
use crate::config::{Defaults, Format, RunConfig};
use crate::error::CliResult;
use crate::output::{fmt_f64, Cx, Outcome, OutputWriter};
use moire::spectra::band_path;
use serde::Serialize;

pub const DEFAULTS: Defaults = Defaults {
    n: 2,
    samples: 24,
    format: Format::Csv,
    formats: &[Format::Csv, Format::Json],
    ..Defaults::new("bands")
};

#[derive(Debug, Clone, Serialize)]
pub struct BandRow {
    pub segment: usize,
    pub fraction: f64,
    pub k: Cx,
    pub energies: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BandsReport {
    pub alpha: Cx,
    pub layers: usize,
    pub t: Vec<f64>,
    pub cutoff: usize,
    pub segments: usize,
    pub samples_per_segment: usize,
    pub rows: Vec<BandRow>,
    pub max_e1: f64,
    pub min_e2: Option<f64>,
}

pub fn run(cfg: &RunConfig) -> CliResult<Outcome<BandsReport>> {
    let r = cfg.resolve(&DEFAULTS)?;
    let alpha = resolve_alpha(r.alpha, r.cutoff, r.probe())?;
    let b = basis(r.n, r.cutoff)?;
    let path = r.waypoints();
    let bs = band_path(&b, alpha, &r.t, &path, r.samples, r.bands)?;
    let rows: Vec<BandRow> = bs
        .samples
        .iter()
        .zip(&bs.bands)
        .map(|(s, e)| BandRow { segment: s.segment, fraction: s.fraction, k: s.k.into(), energies: e.clone() })
        .collect();
    let report = BandsReport {
        alpha: alpha.into(),
        layers: r.n,
        t: r.t.clone(),
        cutoff: r.cutoff,
        segments: path.len() - 1,
        samples_per_segment: r.samples,
        max_e1: bs.band(0).into_iter().fold(0.0, f64::max),
        min_e2: (r.bands > 1).then(|| bs.band(1).into_iter().fold(f64::INFINITY, f64::min)),
        rows,
    };

    let mut out = OutputWriter::new(&cfg.out_dir(), &r)?;
    match r.format {
        Format::Csv => {
            let mut columns: Vec<String> = ["segment", "fraction", "k_re", "k_im"].map(String::from).to_vec();
            columns.extend((1..=r.bands).map(|j| format!("E{j}")));
            let table: Vec<Vec<String>> = report
                .rows
                .iter()
                .map(|row| {
                    let mut v = vec![row.segment.to_string(), fmt_f64(row.fraction), fmt_f64(row.k.re), fmt_f64(row.k.im)];
                    v.extend(row.energies.iter().map(|&e| fmt_f64(e)));
                    v
                })
                .collect();
            out.write_csv("bands.csv", &columns, &table)?;
        }
        Format::Json => {
            out.write_json("bands.json", &report, &[])?;
        }
    }
    Ok(out.finish(report, Vec::new()))
}
