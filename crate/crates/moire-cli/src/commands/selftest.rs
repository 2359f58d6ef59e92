//! Invariant suites at a reduced cutoff.

use super::basis;
use crate::config::{AlphaSpec, Defaults, RunConfig};
use crate::error::CliResult;
use crate::output::{Check, Outcome, OutputWriter};
use moire::chern::{cocycle_defect, multiplier};
use moire::lattice::{c64, lattice_point, omega, omega_pow};
use moire::linalg::hermitian_eigenvalues;
use moire::perturbation::K_PRIME;
use moire::planewave::assemble_hnk;
use moire::potential::{eval_u, fourier_u};
use moire::spectra::singular_bands;
use moire::theta::theta;
use moire::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;

pub const DEFAULTS: Defaults = Defaults {
    n: 2,
    cutoff: 8,
    alpha: AlphaSpec::Value(C64::new(0.7, 0.0)),
    samples: 50,
    ..Defaults::new("selftest")
};
pub const TOL: f64 = 1e-10;
pub const DIRAC_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Serialize)]
pub struct Suite {
    pub name: String,
    /// Largest relative defect over the samples.
    pub worst: f64,
    pub tolerance: f64,
    pub samples: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SelftestReport {
    pub cutoff: usize,
    pub layers: usize,
    pub suites: Vec<Suite>,
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1.0)
}

fn suite(name: &str, tolerance: f64, samples: usize, f: impl FnOnce() -> CliResult<f64>) -> CliResult<Suite> {
    let worst = f()?;
    Ok(Suite {
        name: name.into(),
        worst,
        tolerance,
        samples,
        passed: worst <= tolerance,
    })
}

fn random_point(rng: &mut ChaCha8Rng, scale: f64) -> C64 {
    c64(scale * (2.0 * rng.random::<f64>() - 1.0), scale * (2.0 * rng.random::<f64>() - 1.0))
}

fn potential_defect(zs: &[C64]) -> f64 {
    let (plus, minus) = (fourier_u(1), fourier_u(-1));
    let mut worst = 0.0f64;
    for &z in zs {
        let u = eval_u(z);
        let defects = [
            rel(eval_u(omega() * z), omega() * u),
            rel(eval_u(z + lattice_point(1, 0)), omega_pow(-1) * u),
            rel(eval_u(z + lattice_point(0, 1)), omega_pow(-1) * u),
            rel(eval_u(z + lattice_point(1, 1)), omega_pow(-2) * u),
            rel(eval_u(z.conj()).conj(), u),
            rel(plus.eval(z), u),
            rel(minus.eval(z), eval_u(-z)),
        ];
        worst = defects.into_iter().fold(worst, f64::max);
    }
    worst
}

fn theta_defect(zetas: &[C64]) -> f64 {
    let i = c64(0.0, 1.0);
    let mut worst = theta(c64(0.0, 0.0)).norm();
    for &z in zetas {
        let th = theta(z);
        let omega_law = -(-i * PI * omega() - 2.0 * PI * i * z).exp() * th;
        let defects = [rel(theta(z + 1.0), -th), rel(theta(z + omega()), omega_law), rel(theta(-z), -th)];
        worst = defects.into_iter().fold(worst, f64::max);
    }
    worst
}

fn cocycle_worst(rng: &mut ChaCha8Rng, samples: usize) -> f64 {
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let mut idx = || rng.random_range(-3i64..=3);
        let (p, q) = ((idx(), idx()), (idx(), idx()));
        let k = random_point(rng, 1.0);
        let n = rng.random_range(1u32..=3);
        let scale = multiplier(p.0 + q.0, p.1 + q.1, k, n).norm().max(1.0);
        worst = worst.max(cocycle_defect(p, q, k, n) / scale);
    }
    worst
}

/// `max_j |E_j + E_{dim−1−j}|` for the ascending spectrum of `H_{n,k}`.
fn chiral_defect(n: usize, cutoff: usize, alpha: C64, t: &[f64], k: C64) -> CliResult<f64> {
    let h = assemble_hnk(&basis(n, cutoff)?, alpha, t, k)?.matrix.to_dense();
    let e = hermitian_eigenvalues(h.as_ref())?;
    let d = e.len();
    Ok((0..d / 2).map(|j| (e[j] + e[d - 1 - j]).abs()).fold(0.0, f64::max))
}

pub fn run(cfg: &RunConfig) -> CliResult<Outcome<SelftestReport>> {
    let r = cfg.resolve(&DEFAULTS)?;
    let AlphaSpec::Value(alpha) = r.alpha else {
        return Err(crate::error::CliError::Config("selftest needs an explicit coupling".into()));
    };
    let mut rng = ChaCha8Rng::seed_from_u64(r.seed);
    let zs: Vec<C64> = (0..r.samples).map(|_| random_point(&mut rng, 3.0)).collect();
    let zetas: Vec<C64> = (0..r.samples).map(|_| random_point(&mut rng, 1.0)).collect();
    let k = random_point(&mut rng, 0.5) + c64(0.3, 0.2);

    let suites = vec![
        suite("potential symmetries", TOL, zs.len(), || Ok(potential_defect(&zs)))?,
        suite("theta transformation laws", TOL, zetas.len(), || Ok(theta_defect(&zetas)))?,
        suite("multiplier cocycle", TOL, r.samples, || Ok(cocycle_worst(&mut rng, r.samples)))?,
        suite("chiral symmetry n=1", TOL, 1, || chiral_defect(1, r.cutoff, alpha, &[], k))?,
        suite("chiral symmetry", TOL, 1, || chiral_defect(r.n, r.cutoff, alpha, &r.t, k))?,
        suite("Dirac points", DIRAC_TOL, 2, || {
            let b = basis(r.n, r.cutoff)?;
            let at = |k| singular_bands(&b, alpha, &r.t, k, 1).map(|v| v[0]);
            Ok(at(c64(0.0, 0.0))?.max(at(K_PRIME)?))
        })?,
    ];
    let checks: Vec<Check> = suites
        .iter()
        .map(|s| Check::assertion(&s.name, s.passed, format!("worst {:.3e} (tolerance {:.0e})", s.worst, s.tolerance)))
        .collect();
    let report = SelftestReport { cutoff: r.cutoff, layers: r.n, suites };
    let mut out = OutputWriter::new(&cfg.out_dir(), &r)?;
    out.write_json("selftest.json", &report, &checks)?;
    Ok(out.finish(report, checks))
}
