//! Run configuration: a flat `key = value` file merged with command-line flags.
//!
//! Grammar: one assignment per line, `#` starts a comment, blank lines are
//! ignored. Keys are the long flag names with `-` or `_` as separator.
//! Unknown or repeated keys are rejected.

use crate::error::{CliError, CliResult};
use moire::spectra::{check_probe, default_path, Waypoint, DEFAULT_PROBE};
use moire::C64;
use serde::Serialize;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "MOIRE_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "moire-out";
const MAX_LAYERS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(CliError::Config(format!("unknown format `{other}` (expected json or csv)"))),
        }
    }
}

/// Either an explicit coupling or the `j`-th real magic parameter (1-based).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaSpec {
    Value(C64),
    Magic(usize),
}

impl fmt::Display for AlphaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlphaSpec::Value(z) => write!(f, "{}", format_complex(*z)),
            AlphaSpec::Magic(j) => write!(f, "magic:{j}"),
        }
    }
}

impl Serialize for AlphaSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl FromStr for AlphaSpec {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        let s = s.trim();
        match s.strip_prefix("magic:") {
            Some(j) => parse_magic_index(j).map(AlphaSpec::Magic),
            None => parse_complex(s).map(AlphaSpec::Value),
        }
    }
}

pub fn parse_magic_index(s: &str) -> CliResult<usize> {
    match s.trim().parse::<usize>() {
        Ok(j) if j >= 1 => Ok(j),
        _ => Err(CliError::Config(format!("magic index must be a positive integer, got `{s}`"))),
    }
}

pub fn format_complex(z: C64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.im < 0.0 {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

/// Parses `a`, `bi`, `a+bi` or `a-bi` (also `i`, `-i`).
pub fn parse_complex(s: &str) -> CliResult<C64> {
    let bad = || CliError::Config(format!("cannot parse complex number `{s}`"));
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix('i') else {
        let re = t.parse::<f64>().map_err(|_| bad())?;
        return finite(C64::new(re, 0.0)).ok_or_else(bad);
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let imag = |part: &str| -> CliResult<f64> {
        match part {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            p => p.parse::<f64>().map_err(|_| bad()),
        }
    };
    let z = match split {
        Some(i) => C64::new(body[..i].parse::<f64>().map_err(|_| bad())?, imag(&body[i..])?),
        None => C64::new(0.0, imag(body)?),
    };
    finite(z).ok_or_else(bad)
}

fn finite(z: C64) -> Option<C64> {
    (z.re.is_finite() && z.im.is_finite()).then_some(z)
}

fn parse_list<T: FromStr>(s: &str, what: &str) -> CliResult<Vec<T>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<T>()
                .map_err(|_| CliError::Config(format!("invalid {what} entry `{}`", x.trim())))
        })
        .collect()
}

pub fn parse_reals(s: &str) -> CliResult<Vec<f64>> {
    let v: Vec<f64> = parse_list(s, "number")?;
    if v.iter().any(|x| !x.is_finite()) {
        return Err(CliError::Config(format!("non-finite value in `{s}`")));
    }
    Ok(v)
}

pub fn parse_grid(s: &str) -> CliResult<Vec<usize>> {
    let v: Vec<usize> = parse_list(s, "grid")?;
    if v.is_empty() || v.contains(&0) {
        return Err(CliError::Config(format!("grid list must hold positive sizes, got `{s}`")));
    }
    Ok(v)
}

/// `LABEL:k1,k2;LABEL:k1,k2;…` in fractional coordinates.
pub fn parse_path(s: &str) -> CliResult<Vec<Waypoint>> {
    let path = s
        .split(';')
        .filter(|w| !w.trim().is_empty())
        .map(|w| {
            let (label, coords) = w
                .split_once(':')
                .ok_or_else(|| CliError::Config(format!("waypoint `{w}` is not LABEL:k1,k2")))?;
            let c = parse_reals(coords)?;
            if c.len() != 2 || label.trim().is_empty() {
                return Err(CliError::Config(format!("waypoint `{w}` is not LABEL:k1,k2")));
            }
            Ok(Waypoint::new(label.trim(), c[0], c[1]))
        })
        .collect::<CliResult<Vec<_>>>()?;
    if path.len() < 2 {
        return Err(CliError::Config("a path needs at least two waypoints".into()));
    }
    Ok(path)
}

fn parse_num<T: FromStr>(key: &str, v: &str) -> CliResult<T> {
    v.trim()
        .parse::<T>()
        .map_err(|_| CliError::Config(format!("invalid value `{}` for `{key}`", v.trim())))
}

/// Everything a user may set. `None` means "use the command default".
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    pub n: Option<usize>,
    pub alpha: Option<AlphaSpec>,
    pub t: Option<Vec<f64>>,
    pub cutoff: Option<usize>,
    pub grid: Option<Vec<usize>>,
    pub path: Option<Vec<Waypoint>>,
    pub samples: Option<usize>,
    pub bands: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub threads: Option<usize>,
    pub seed: Option<u64>,
    pub k_probe: Option<C64>,
}

impl RunConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut cfg = RunConfig::default();
        let mut seen = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
            let key = key.trim().replace('-', "_");
            if seen.contains(&key) {
                return Err(CliError::Config(format!("line {}: key `{key}` set twice", lineno + 1)));
            }
            cfg.set(&key, value)?;
            seen.push(key);
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> CliResult<()> {
        match key {
            "n" => self.n = Some(parse_num(key, value)?),
            "alpha" => self.alpha = Some(value.parse()?),
            "magic_index" => self.alpha = Some(AlphaSpec::Magic(parse_magic_index(value)?)),
            "t" => self.t = Some(parse_reals(value)?),
            "cutoff" => self.cutoff = Some(parse_num(key, value)?),
            "grid" => self.grid = Some(parse_grid(value)?),
            "path" => self.path = Some(parse_path(value)?),
            "samples" => self.samples = Some(parse_num(key, value)?),
            "bands" => self.bands = Some(parse_num(key, value)?),
            "out" => self.out = Some(PathBuf::from(value.trim())),
            "format" => self.format = Some(value.parse()?),
            "threads" => self.threads = Some(parse_num(key, value)?),
            "seed" => self.seed = Some(parse_num(key, value)?),
            "k_probe" => self.k_probe = Some(parse_complex(value)?),
            other => return Err(CliError::Config(format!("unknown configuration key `{other}`"))),
        }
        Ok(())
    }

    /// `self` with every field set in `flags` replaced.
    pub fn overlay(self, flags: RunConfig) -> RunConfig {
        RunConfig {
            n: flags.n.or(self.n),
            alpha: flags.alpha.or(self.alpha),
            t: flags.t.or(self.t),
            cutoff: flags.cutoff.or(self.cutoff),
            grid: flags.grid.or(self.grid),
            path: flags.path.or(self.path),
            samples: flags.samples.or(self.samples),
            bands: flags.bands.or(self.bands),
            out: flags.out.or(self.out),
            format: flags.format.or(self.format),
            threads: flags.threads.or(self.threads),
            seed: flags.seed.or(self.seed),
            k_probe: flags.k_probe.or(self.k_probe),
        }
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out
            .clone()
            .or_else(|| std::env::var_os(OUT_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
    }

    pub fn resolve(&self, d: &Defaults) -> CliResult<Resolved> {
        let n = self.n.unwrap_or(d.n);
        if n == 0 || n > MAX_LAYERS {
            return Err(CliError::Config(format!("n must lie in 1..={MAX_LAYERS}, got {n}")));
        }
        if let Some(fixed) = d.fixed_n {
            if n != fixed {
                return Err(CliError::Config(format!("`{}` is defined for n = {fixed} only", d.command)));
            }
        }
        if !d.accepts_t && self.t.is_some() {
            return Err(CliError::Config(format!("`{}` does not take a tunnelling vector", d.command)));
        }
        let t = self.t.clone().unwrap_or_else(|| vec![1.0; n - 1]);
        if t.len() != n - 1 {
            return Err(CliError::Config(format!("n = {n} needs {} tunnelling values, got {}", n - 1, t.len())));
        }
        let cutoff = self.cutoff.unwrap_or(d.cutoff);
        if cutoff == 0 {
            return Err(CliError::Config("cutoff must be at least 1".into()));
        }
        let samples = self.samples.unwrap_or(d.samples);
        let bands = self.bands.unwrap_or(d.bands);
        if samples == 0 || bands == 0 {
            return Err(CliError::Config("samples and bands must be positive".into()));
        }
        let k_probe = self.k_probe.unwrap_or(DEFAULT_PROBE);
        check_probe(k_probe)?;
        let format = self.format.unwrap_or(d.format);
        if !d.formats.contains(&format) {
            return Err(CliError::Config(format!("`{}` does not support {format:?} output", d.command)));
        }
        let path = self.path.clone().unwrap_or_else(default_path);
        Ok(Resolved {
            command: d.command.to_string(),
            n,
            alpha: self.alpha.unwrap_or(d.alpha),
            t,
            cutoff,
            grid: self.grid.clone().unwrap_or_else(|| d.grid.to_vec()),
            path: path.iter().map(|w| (w.label.clone(), w.k1, w.k2)).collect(),
            samples,
            bands,
            format,
            seed: self.seed.unwrap_or(0),
            k_probe: [k_probe.re, k_probe.im],
        })
    }
}

/// Per-command defaults and restrictions.
#[derive(Debug, Clone)]
pub struct Defaults {
    pub command: &'static str,
    pub n: usize,
    pub fixed_n: Option<usize>,
    pub accepts_t: bool,
    pub alpha: AlphaSpec,
    pub cutoff: usize,
    pub grid: &'static [usize],
    pub samples: usize,
    pub bands: usize,
    pub format: Format,
    pub formats: &'static [Format],
}

impl Defaults {
    pub const fn new(command: &'static str) -> Self {
        Defaults {
            command,
            n: 1,
            fixed_n: None,
            accepts_t: true,
            alpha: AlphaSpec::Magic(1),
            cutoff: 12,
            grid: &[12],
            samples: 10,
            bands: 4,
            format: Format::Json,
            formats: &[Format::Json],
        }
    }
}

/// Fully determined settings of one run; hashed into every output header.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Resolved {
    pub command: String,
    pub n: usize,
    pub alpha: AlphaSpec,
    pub t: Vec<f64>,
    pub cutoff: usize,
    pub grid: Vec<usize>,
    pub path: Vec<(String, f64, f64)>,
    pub samples: usize,
    pub bands: usize,
    pub format: Format,
    pub seed: u64,
    pub k_probe: [f64; 2],
}

impl Resolved {
    pub fn probe(&self) -> C64 {
        C64::new(self.k_probe[0], self.k_probe[1])
    }

    pub fn waypoints(&self) -> Vec<Waypoint> {
        self.path.iter().map(|(l, a, b)| Waypoint::new(l, *a, *b)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        assert_eq!(parse_complex("0.5").unwrap(), C64::new(0.5, 0.0));
        assert_eq!(parse_complex("0.5+0.1i").unwrap(), C64::new(0.5, 0.1));
        assert_eq!(parse_complex("0.17-0.21i").unwrap(), C64::new(0.17, -0.21));
        assert_eq!(parse_complex("-i").unwrap(), C64::new(0.0, -1.0));
        assert_eq!(parse_complex("2i").unwrap(), C64::new(0.0, 2.0));
        assert_eq!(parse_complex("1e-3-2e-2i").unwrap(), C64::new(1e-3, -2e-2));
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("").is_err());
    }

    #[test]
    fn complex_round_trip() {
        for z in [C64::new(0.586, 0.0), C64::new(-1.5, 2.25), C64::new(0.1, -0.3)] {
            assert_eq!(parse_complex(&format_complex(z)).unwrap(), z);
        }
    }

    #[test]
    fn alpha_selector() {
        assert_eq!("magic:2".parse::<AlphaSpec>().unwrap(), AlphaSpec::Magic(2));
        assert!("magic:0".parse::<AlphaSpec>().is_err());
        assert_eq!("0.4".parse::<AlphaSpec>().unwrap(), AlphaSpec::Value(C64::new(0.4, 0.0)));
    }

    #[test]
    fn path_grammar() {
        let p = parse_path("K:0,0;G:0.5,0.5;K':1,1").unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p[2].label, "K'");
        assert!(parse_path("K:0,0").is_err());
        assert!(parse_path("K:0;G:1,1").is_err());
    }

    #[test]
    fn file_grammar() {
        let cfg = RunConfig::parse("# run\nn = 3\nt = 1, 0.5 # inline\n\nmagic-index = 2\n").unwrap();
        assert_eq!(cfg.n, Some(3));
        assert_eq!(cfg.t, Some(vec![1.0, 0.5]));
        assert_eq!(cfg.alpha, Some(AlphaSpec::Magic(2)));
        assert!(RunConfig::parse("colour = red").is_err());
        assert!(RunConfig::parse("n = 2\nn = 3").is_err());
        assert!(RunConfig::parse("just text").is_err());
    }

    #[test]
    fn flags_win() {
        let file = RunConfig::parse("n = 3\ncutoff = 10").unwrap();
        let flags = RunConfig { n: Some(2), ..Default::default() };
        let merged = file.overlay(flags);
        assert_eq!(merged.n, Some(2));
        assert_eq!(merged.cutoff, Some(10));
    }

    #[test]
    fn resolve_validates() {
        let d = Defaults::new("test");
        let bad_t = RunConfig { n: Some(3), t: Some(vec![1.0]), ..Default::default() };
        assert!(matches!(bad_t.resolve(&d), Err(CliError::Config(_))));
        let probe = RunConfig { k_probe: Some(C64::new(0.0, 0.0)), ..Default::default() };
        assert!(matches!(probe.resolve(&d), Err(CliError::Config(_))));
        let ok = RunConfig { n: Some(3), ..Default::default() }.resolve(&d).unwrap();
        assert_eq!(ok.t, vec![1.0, 1.0]);
    }
}
