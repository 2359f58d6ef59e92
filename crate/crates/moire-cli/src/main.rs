use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use moire_cli::commands::{bands, chern, flatband, magic, selftest, separation, symcheck};
use moire_cli::{CliError, Outcome, RunConfig};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "moire", version, about = "Chiral twisted multilayer graphene: magic angles, flat bands, Chern numbers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Magic parameters with an n-independence cross-check and cutoff sweep.
    Magic(Flags),
    /// Lowest singular bands along a k-path.
    Bands(Flags),
    /// Band separation at K' for two layers.
    Separation(Flags),
    /// Theta-function flat-band states and the kernel integrals.
    Flatband(Flags),
    /// Analytic and lattice Chern numbers.
    Chern(Flags),
    /// Protected zero modes and symmetry sectors.
    Symcheck(Flags),
    /// Invariant suites at a reduced cutoff.
    Selftest(Flags),
}

#[derive(Args, Debug)]
struct Flags {
    /// Number of layer pairs.
    #[arg(long)]
    n: Option<String>,
    /// Coupling, e.g. 0.586, 0.5+0.1i or magic:2.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    /// Shorthand for --alpha magic:J.
    #[arg(long, conflicts_with = "alpha")]
    magic_index: Option<String>,
    /// Comma-separated tunnelling values t_1..t_{n-1}.
    #[arg(long, allow_hyphen_values = true)]
    t: Option<String>,
    /// Plane-wave cutoff N.
    #[arg(long)]
    cutoff: Option<String>,
    /// Comma-separated Berry grid sizes.
    #[arg(long)]
    grid: Option<String>,
    /// Waypoints LABEL:k1,k2;LABEL:k1,k2;...
    #[arg(long, allow_hyphen_values = true)]
    path: Option<String>,
    /// Samples per path segment, random momenta, or separation t-samples.
    #[arg(long)]
    samples: Option<String>,
    /// Number of bands to report.
    #[arg(long)]
    bands: Option<String>,
    /// Output directory (default: $MOIRE_OUT_DIR or ./moire-out).
    #[arg(long)]
    out: Option<String>,
    /// json or csv.
    #[arg(long)]
    format: Option<String>,
    /// Worker threads.
    #[arg(long)]
    threads: Option<String>,
    /// Seed for randomly sampled test points.
    #[arg(long)]
    seed: Option<String>,
    /// Probe momentum for magic-parameter searches.
    #[arg(long, allow_hyphen_values = true)]
    k_probe: Option<String>,
    /// Flat key = value configuration file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Flags {
    fn to_config(&self) -> Result<RunConfig, CliError> {
        let mut file = match &self.config {
            Some(p) => RunConfig::from_file(p)?,
            None => RunConfig::default(),
        };
        let mut flags = RunConfig::default();
        let pairs = [
            ("n", &self.n),
            ("alpha", &self.alpha),
            ("magic_index", &self.magic_index),
            ("t", &self.t),
            ("cutoff", &self.cutoff),
            ("grid", &self.grid),
            ("path", &self.path),
            ("samples", &self.samples),
            ("bands", &self.bands),
            ("out", &self.out),
            ("format", &self.format),
            ("threads", &self.threads),
            ("seed", &self.seed),
            ("k_probe", &self.k_probe),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                flags.set(key, v)?;
            }
        }
        if flags.alpha.is_some() {
            file.alpha = None;
        }
        Ok(file.overlay(flags))
    }
}

fn report<R>(name: &str, outcome: Outcome<R>) -> Result<(), CliError> {
    for f in &outcome.files {
        println!("wrote {}", f.display());
    }
    for c in &outcome.checks {
        println!("{name}: {} {} ({})", if c.passed { "ok  " } else { "FAIL" }, c.name, c.detail);
    }
    outcome.status()
}

fn dispatch(command: &Command, cfg: &RunConfig) -> Result<(), CliError> {
    match command {
        Command::Magic(_) => report("magic", magic::run(cfg)?),
        Command::Bands(_) => report("bands", bands::run(cfg)?),
        Command::Separation(_) => report("separation", separation::run(cfg)?),
        Command::Flatband(_) => report("flatband", flatband::run(cfg)?),
        Command::Chern(_) => report("chern", chern::run(cfg)?),
        Command::Symcheck(_) => report("symcheck", symcheck::run(cfg)?),
        Command::Selftest(_) => report("selftest", selftest::run(cfg)?),
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let flags = match &cli.command {
        Command::Magic(f)
        | Command::Bands(f)
        | Command::Separation(f)
        | Command::Flatband(f)
        | Command::Chern(f)
        | Command::Symcheck(f)
        | Command::Selftest(f) => f,
    };
    let cfg = flags.to_config()?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cfg.threads {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().context("building the worker pool")?;
    pool.install(|| dispatch(&cli.command, &cfg))?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e.downcast_ref::<CliError>().map_or(1, CliError::exit_code);
            ExitCode::from(code as u8)
        }
    }
}
