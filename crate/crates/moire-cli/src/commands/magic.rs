//! Magic parameters, the n-independence table and the cutoff sweep.

use super::{basis, MAGIC_MAX_MODULUS};
use crate::config::{Defaults, RunConfig};
use crate::error::CliResult;
use crate::output::{Check, Cx, Outcome, OutputWriter};
use moire::spectra::{flatband_multiplicity, magic_angles, MagicAngleSet, DEFAULT_CHECK_PROBE, RESIDUAL_GATE};
use moire::C64;
use serde::Serialize;

pub const DEFAULTS: Defaults = Defaults { cutoff: 14, ..Defaults::new("magic") };
/// Allowed drift of a real magic parameter between cutoffs `N − 2` and `N`.
pub const SWEEP_TOL: f64 = 1e-4;
/// Allowed spread of the real lists across `n = 1, 2, 3`.
pub const CROSS_TOL: f64 = 1e-6;
pub const CROSS_LAYERS: [usize; 3] = [1, 2, 3];

#[derive(Debug, Clone, Serialize)]
pub struct EntryOut {
    pub alpha: Cx,
    pub residual: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SetOut {
    pub layers: usize,
    pub t: Vec<f64>,
    pub cutoff: usize,
    pub probe: Cx,
    pub check_probe: Cx,
    pub max_modulus: f64,
    pub candidates: usize,
    pub entries: Vec<EntryOut>,
    /// Positive real parameters, ascending.
    pub real: Vec<f64>,
    /// Multiplicity of each real parameter for the full `n`-layer operator.
    pub real_multiplicities: Vec<usize>,
}

impl SetOut {
    fn build(set: &MagicAngleSet, t: &[f64]) -> CliResult<Self> {
        let b = basis(set.layers, set.cutoff)?;
        let real: Vec<C64> = set.real_positive().iter().map(|e| e.alpha).collect();
        let real_multiplicities = real
            .iter()
            .map(|&a| flatband_multiplicity(&b, a, t, set.probe, RESIDUAL_GATE))
            .collect::<moire::Result<Vec<_>>>()?;
        Ok(SetOut {
            layers: set.layers,
            t: t.to_vec(),
            cutoff: set.cutoff,
            probe: set.probe.into(),
            check_probe: set.check_probe.into(),
            max_modulus: set.max_modulus,
            candidates: set.candidates,
            entries: set
                .entries
                .iter()
                .map(|e| EntryOut { alpha: e.alpha.into(), residual: e.residual, multiplicity: e.multiplicity })
                .collect(),
            real: real.iter().map(|a| a.re).collect(),
            real_multiplicities,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossCheck {
    pub cutoff: usize,
    pub sets: Vec<SetOut>,
    /// Largest pairwise difference of the real lists; `None` when their lengths differ.
    pub max_deviation: Option<f64>,
    pub multiplicities_agree: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Sweep {
    pub coarse_cutoff: usize,
    pub fine_cutoff: usize,
    /// Largest distance from a coarse real parameter to the nearest fine one.
    pub max_deviation: f64,
    pub first_shift: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MagicReport {
    pub set: SetOut,
    pub cross_check: CrossCheck,
    pub sweep: Sweep,
}

fn pairwise_deviation(sets: &[SetOut]) -> Option<f64> {
    let first = &sets[0].real;
    let mut worst = 0.0f64;
    for s in &sets[1..] {
        if s.real.len() != first.len() {
            return None;
        }
        for (a, b) in first.iter().zip(&s.real) {
            worst = worst.max((a - b).abs());
        }
    }
    Some(worst)
}

fn nearest_deviation(coarse: &[f64], fine: &[f64]) -> f64 {
    coarse
        .iter()
        .map(|a| fine.iter().map(|b| (a - b).abs()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

pub fn run(cfg: &RunConfig) -> CliResult<Outcome<MagicReport>> {
    let r = cfg.resolve(&DEFAULTS)?;
    let probe = r.probe();
    let search = |n: usize, t: &[f64], cutoff: usize| -> CliResult<SetOut> {
        let set = magic_angles(&basis(n, cutoff)?, t, probe, DEFAULT_CHECK_PROBE, MAGIC_MAX_MODULUS)?;
        SetOut::build(&set, t)
    };
    let set = search(r.n, &r.t, r.cutoff)?;

    let coarse_cutoff = r.cutoff.saturating_sub(2).max(1);
    let sets = CROSS_LAYERS
        .iter()
        .map(|&n| search(n, &vec![1.0; n - 1], coarse_cutoff))
        .collect::<CliResult<Vec<_>>>()?;
    let max_deviation = pairwise_deviation(&sets);
    let multiplicities_agree = sets.iter().all(|s| s.real_multiplicities == sets[0].real_multiplicities);
    let cross_check = CrossCheck { cutoff: coarse_cutoff, sets, max_deviation, multiplicities_agree };

    let same_family = r.n <= CROSS_LAYERS.len() && r.t.iter().all(|&x| x == 1.0);
    let coarse = if same_family {
        cross_check.sets[r.n - 1].real.clone()
    } else {
        search(r.n, &r.t, coarse_cutoff)?.real
    };
    let sweep = Sweep {
        coarse_cutoff,
        fine_cutoff: r.cutoff,
        max_deviation: nearest_deviation(&coarse, &set.real),
        first_shift: coarse.first().zip(set.real.first()).map(|(a, b)| (a - b).abs()),
    };

    let checks = vec![
        Check::assertion("real parameters found", !set.real.is_empty(), format!("{} real entries", set.real.len())),
        Check::assertion(
            "n-independence",
            max_deviation.is_some_and(|d| d <= CROSS_TOL) && multiplicities_agree,
            format!("max deviation {max_deviation:?}, multiplicities agree: {multiplicities_agree}"),
        ),
        Check::convergence(
            "cutoff sweep",
            sweep.max_deviation <= SWEEP_TOL,
            format!("N={} vs N={}: {:.3e}", coarse_cutoff, r.cutoff, sweep.max_deviation),
        ),
    ];
    let report = MagicReport { set, cross_check, sweep };
    let mut out = OutputWriter::new(&cfg.out_dir(), &r)?;
    out.write_json("magic.json", &report, &checks)?;
    Ok(out.finish(report, checks))
}
