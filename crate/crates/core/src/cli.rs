//! Experiment files, presets and the CSV writers behind the `irs-noma`
//! binary.
//!
//! An experiment file is flat `key = value` text; `#` starts a comment.
//! `elements` and `group_size` accept comma-separated lists, and every
//! `(elements, group_size)` pair with `elements % group_size == 0` becomes one
//! curve.
//!
//! ```text
//! antennas = 4
//! beams = 1
//! elements = 12
//! group_size = 1
//! alpha1_sq = 0.8
//! alpha2_sq = 0.2
//! rate_bpcu = 2
//! schemes = ideal, dft, onoff
//! snr_db = 0:30:3
//! trials = 1000000
//! seed = 1
//! ```

use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::analytics::{closed_form_outage, error_floor};
use crate::channel::SystemConfig;
use crate::irs_control::Scheme;
use crate::simulator::Engine;
use crate::{Error, Result};

/// Environment variable holding the default worker count.
pub const THREADS_ENV: &str = "IRS_NOMA_THREADS";

/// `validate` fails when any point deviates by more than this many standard
/// errors.
pub const VALIDATE_Z_LIMIT: f64 = 4.0;

pub const CSV_HEADER: &str = "scheme,rho_db,K,M,N,P,Q,alpha1_sq,alpha2_sq,rate_bpcu,trials,failures,outage_mc,ci_low,ci_high,outage_analytic,floor";
pub const ANALYTIC_CSV_HEADER: &str = "scheme,rho_db,K,M,N,P,Q,alpha1_sq,alpha2_sq,rate_bpcu,outage_analytic,floor";

/// Inclusive SNR grid in dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl SnrGrid {
    pub fn validate(&self) -> Result<()> {
        if !(self.start.is_finite() && self.stop.is_finite() && self.step.is_finite()) {
            return Err(Error::InvalidConfig("SNR grid bounds must be finite".into()));
        }
        if self.step <= 0.0 {
            return Err(Error::InvalidConfig(format!("SNR step must be positive, got {}", self.step)));
        }
        if self.stop < self.start {
            return Err(Error::InvalidConfig(format!(
                "empty SNR grid: start {} is above stop {}",
                self.start, self.stop
            )));
        }
        Ok(())
    }

    /// Grid points `start + i·step` up to `stop` (with a small slack for
    /// rounding in the step).
    pub fn points(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| self.start + self.step * i as f64).collect()
    }
}

impl fmt::Display for SnrGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.step)
    }
}

impl FromStr for SnrGrid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::InvalidConfig(format!("expected START:STOP:STEP, got `{s}`")));
        }
        let num = |p: &str| {
            p.parse::<f64>()
                .map_err(|_| Error::InvalidConfig(format!("`{p}` is not a number")))
        };
        let grid = Self {
            start: num(parts[0])?,
            stop: num(parts[1])?,
            step: num(parts[2])?,
        };
        grid.validate()?;
        Ok(grid)
    }
}

/// Everything needed to run one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub antennas: usize,
    pub beams: usize,
    pub elements: Vec<usize>,
    pub group_sizes: Vec<usize>,
    pub alpha1_sq: f64,
    pub alpha2_sq: f64,
    pub rate_bpcu: f64,
    pub schemes: Vec<Scheme>,
    pub grid: SnrGrid,
    pub trials: u64,
    pub seed: u64,
    pub output: Option<PathBuf>,
    /// Number of beams assumed by the closed form in `validate`; defaults to
    /// `beams`. Setting it differently checks a deliberately mismatched model.
    pub reference_beams: Option<usize>,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            antennas: 4,
            beams: 1,
            elements: vec![4],
            group_sizes: vec![1],
            alpha1_sq: 0.8,
            alpha2_sq: 0.2,
            rate_bpcu: 2.0,
            schemes: vec![Scheme::OnOff],
            grid: SnrGrid {
                start: 0.0,
                stop: 30.0,
                step: 3.0,
            },
            trials: 1_000_000,
            seed: 1,
            output: None,
            reference_beams: None,
        }
    }
}

impl ExperimentSpec {
    /// One validated [`SystemConfig`] per `(elements, group_size)` pair, at
    /// the first grid SNR.
    pub fn configs(&self) -> Result<Vec<SystemConfig>> {
        self.validate()?;
        let mut out = Vec::new();
        for &n in &self.elements {
            for &q in &self.group_sizes {
                let cfg = SystemConfig {
                    antennas: self.antennas,
                    beams: self.beams,
                    elements: n,
                    groups: n / q,
                    group_size: q,
                    alpha1_sq: self.alpha1_sq,
                    alpha2_sq: self.alpha2_sq,
                    snr: crate::channel::db_to_linear(self.grid.start),
                    rate_bpcu: self.rate_bpcu,
                };
                cfg.validate()?;
                out.push(cfg);
            }
        }
        Ok(out)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be >= 1".into()));
        }
        if self.schemes.is_empty() {
            return Err(Error::InvalidConfig("at least one scheme is required".into()));
        }
        if self.elements.is_empty() || self.group_sizes.is_empty() {
            return Err(Error::InvalidConfig("elements and group_size must be non-empty".into()));
        }
        for &n in &self.elements {
            for &q in &self.group_sizes {
                if q == 0 || n % q != 0 {
                    return Err(Error::InvalidConfig(format!("group_size {q} does not divide elements {n}")));
                }
            }
        }
        if self.antennas < self.beams || self.beams == 0 {
            return Err(Error::InvalidConfig(format!(
                "need antennas >= beams >= 1, got {} and {}",
                self.antennas, self.beams
            )));
        }
        if let Some(k) = self.reference_beams {
            if k == 0 || k > self.antennas {
                return Err(Error::InvalidConfig(format!("reference_beams {k} out of range")));
            }
        }
        Ok(())
    }

    /// Parses an experiment file. Unset keys keep their defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut spec = Self::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(Error::Parse {
                    line,
                    msg: format!("expected `key = value`, got `{content}`"),
                });
            };
            spec.set(key.trim(), value.trim())
                .map_err(|e| Error::Parse { line, msg: e.to_string() })?;
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Sets one key; shared by the file parser and command-line overrides.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse()
                .map_err(|_| Error::InvalidConfig(format!("`{v}` is not a valid value for `{key}`")))
        }
        fn list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>> {
            v.split(',').map(|x| num(key, x.trim())).collect()
        }
        match key.to_ascii_lowercase().as_str() {
            "antennas" | "m" => self.antennas = num(key, value)?,
            "beams" | "k" => self.beams = num(key, value)?,
            "elements" | "n" => self.elements = list(key, value)?,
            "group_size" | "q" => self.group_sizes = list(key, value)?,
            "alpha1_sq" => self.alpha1_sq = num(key, value)?,
            "alpha2_sq" => self.alpha2_sq = num(key, value)?,
            "rate_bpcu" | "rate" => self.rate_bpcu = num(key, value)?,
            "schemes" | "scheme" => {
                self.schemes = value.split(',').map(str::parse).collect::<Result<_>>()?;
            }
            "snr_db" => self.grid = value.parse()?,
            "trials" => self.trials = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "out" | "output" => self.output = Some(PathBuf::from(value)),
            "reference_beams" => self.reference_beams = Some(num(key, value)?),
            other => return Err(Error::InvalidConfig(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Writes the spec back as an experiment file that [`Self::parse`]
    /// reads to an equal value.
    pub fn to_config_string(&self) -> String {
        let join = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(", ");
        let mut s = String::new();
        let _ = writeln!(s, "antennas = {}", self.antennas);
        let _ = writeln!(s, "beams = {}", self.beams);
        let _ = writeln!(s, "elements = {}", join(&self.elements));
        let _ = writeln!(s, "group_size = {}", join(&self.group_sizes));
        let _ = writeln!(s, "alpha1_sq = {}", self.alpha1_sq);
        let _ = writeln!(s, "alpha2_sq = {}", self.alpha2_sq);
        let _ = writeln!(s, "rate_bpcu = {}", self.rate_bpcu);
        let schemes: Vec<&str> = self.schemes.iter().map(|s| s.as_str()).collect();
        let _ = writeln!(s, "schemes = {}", schemes.join(", "));
        let _ = writeln!(s, "snr_db = {}", self.grid);
        let _ = writeln!(s, "trials = {}", self.trials);
        let _ = writeln!(s, "seed = {}", self.seed);
        if let Some(out) = &self.output {
            let _ = writeln!(s, "out = {}", out.display());
        }
        if let Some(k) = self.reference_beams {
            let _ = writeln!(s, "reference_beams = {k}");
        }
        s
    }
}

pub const PRESET_NAMES: [&str; 5] = ["fig2a", "fig2b", "fig3a", "fig3b", "fig3c"];

/// Built-in experiment setups.
pub fn preset(name: &str) -> Option<ExperimentSpec> {
    let base = ExperimentSpec::default();
    let grid = |start, stop, step| SnrGrid { start, stop, step };
    let spec = match name {
        "fig2a" => ExperimentSpec {
            beams: 1,
            elements: vec![12],
            group_sizes: vec![1],
            rate_bpcu: 2.0,
            schemes: Scheme::ALL.to_vec(),
            grid: grid(0.0, 30.0, 3.0),
            ..base
        },
        "fig2b" => ExperimentSpec {
            beams: 1,
            elements: vec![12],
            group_sizes: vec![1, 2, 3],
            rate_bpcu: 2.0,
            schemes: vec![Scheme::OnOff],
            grid: grid(0.0, 60.0, 5.0),
            ..base
        },
        "fig3a" => ExperimentSpec {
            beams: 2,
            elements: vec![4],
            group_sizes: vec![1],
            rate_bpcu: 1.0,
            schemes: Scheme::ALL.to_vec(),
            grid: grid(0.0, 50.0, 5.0),
            ..base
        },
        "fig3b" => ExperimentSpec {
            beams: 2,
            elements: vec![4, 8, 12],
            group_sizes: vec![1],
            rate_bpcu: 1.0,
            schemes: vec![Scheme::OnOff],
            grid: grid(0.0, 50.0, 5.0),
            ..base
        },
        "fig3c" => ExperimentSpec {
            beams: 2,
            elements: vec![20],
            group_sizes: vec![1, 2, 4],
            rate_bpcu: 1.0,
            schemes: vec![Scheme::OnOff],
            grid: grid(0.0, 50.0, 5.0),
            ..base
        },
        _ => return None,
    };
    Some(spec)
}

pub fn preset_description(name: &str) -> Option<&'static str> {
    Some(match name {
        "fig2a" => "single pair, N=12, Q=1, R=2: ideal vs DFT vs on-off",
        "fig2b" => "single pair, N=12, R=2: on-off with Q in {1, 2, 3}",
        "fig3a" => "two pairs, N=4, Q=1, R=1: ideal vs DFT vs on-off",
        "fig3b" => "two pairs, Q=1, R=1: on-off with N in {4, 8, 12}",
        "fig3c" => "two pairs, N=20, R=1: on-off with Q in {1, 2, 4}",
        _ => return None,
    })
}

/// Computed values: 17 significant digits, enough to round-trip any f64.
fn prob(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(prob).unwrap_or_default()
}

fn config_columns(cfg: &SystemConfig, rho_db: f64) -> String {
    format!(
        "{rho_db},{},{},{},{},{},{},{},{}",
        cfg.beams, cfg.antennas, cfg.elements, cfg.groups, cfg.group_size, cfg.alpha1_sq, cfg.alpha2_sq, cfg.rate_bpcu
    )
}

/// Monte Carlo sweep of every curve in `spec`, as CSV text.
pub fn simulate_csv(spec: &ExperimentSpec, engine: &Engine) -> Result<String> {
    let configs = spec.configs()?;
    let grid = spec.grid.points();
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for template in &configs {
        let result = engine.sweep(template, &spec.schemes, &grid, spec.trials, spec.seed)?;
        for (s, scheme) in result.schemes.iter().enumerate() {
            for point in &result.points {
                let est = &point.estimates[s];
                let (analytic, floor) = if *scheme == Scheme::OnOff {
                    (point.analytic, point.floor)
                } else {
                    (None, None)
                };
                let _ = writeln!(
                    out,
                    "{scheme},{},{},{},{},{},{},{},{}",
                    config_columns(&est.config, point.rho_db),
                    est.trials,
                    est.failures,
                    prob(est.p_hat),
                    prob(est.ci_low),
                    prob(est.ci_high),
                    opt(analytic),
                    opt(floor),
                );
            }
        }
    }
    Ok(out)
}

/// Closed-form on-off outage (and floor where defined) over the grid.
pub fn analytic_csv(spec: &ExperimentSpec) -> Result<String> {
    let configs = spec.configs()?;
    let grid = spec.grid.points();
    let mut out = String::new();
    out.push_str(ANALYTIC_CSV_HEADER);
    out.push('\n');
    for template in &configs {
        for &db in &grid {
            let cfg = template.with_snr_db(db);
            let analytic = closed_form_outage(&cfg).transpose()?;
            let floor = error_floor(&cfg).transpose()?;
            let _ = writeln!(
                out,
                "{},{},{},{}",
                Scheme::OnOff,
                config_columns(&cfg, db),
                opt(analytic),
                opt(floor)
            );
        }
    }
    Ok(out)
}

/// One compared grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationPoint {
    pub elements: usize,
    pub group_size: usize,
    pub rho_db: f64,
    pub failures: u64,
    pub trials: u64,
    pub outage_mc: f64,
    pub outage_analytic: f64,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub points: Vec<ValidationPoint>,
}

impl ValidationReport {
    pub fn max_abs_z(&self) -> f64 {
        self.points.iter().map(|p| p.z.abs()).fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.points.iter().all(|p| p.z.abs() <= VALIDATE_Z_LIMIT)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for p in &self.points {
            let flag = if p.z.abs() <= VALIDATE_Z_LIMIT { "ok" } else { "FAIL" };
            let _ = writeln!(
                s,
                "N={:<3} Q={:<2} rho_db={:<7} mc={} analytic={} z={:+.3} {flag}",
                p.elements,
                p.group_size,
                p.rho_db,
                prob(p.outage_mc),
                prob(p.outage_analytic),
                p.z
            );
        }
        let _ = writeln!(
            s,
            "{} points, max |z| = {:.3}, limit {VALIDATE_Z_LIMIT}: {}",
            self.points.len(),
            self.max_abs_z(),
            if self.passed() { "PASS" } else { "FAIL" }
        );
        s
    }
}

/// Simulates on-off control and compares every grid point with the closed
/// form for `reference_beams` (default: the simulated beam count).
pub fn validate(spec: &ExperimentSpec, engine: &Engine) -> Result<ValidationReport> {
    let configs = spec.configs()?;
    let grid = spec.grid.points();
    let reference_beams = spec.reference_beams.unwrap_or(spec.beams);
    let mut points = Vec::new();
    for template in &configs {
        let reference = SystemConfig {
            beams: reference_beams,
            ..template.clone()
        };
        if closed_form_outage(&reference).is_none() {
            return Err(Error::InvalidConfig(format!(
                "no closed form for K={} Q={}; validate needs K=1, or K>=2 with Q=1",
                reference.beams, reference.group_size
            )));
        }
        let result = engine.sweep(template, &[Scheme::OnOff], &grid, spec.trials, spec.seed)?;
        for point in &result.points {
            let est = &point.estimates[0];
            let analytic = closed_form_outage(&reference.with_snr_db(point.rho_db)).expect("checked above")?;
            points.push(ValidationPoint {
                elements: template.elements,
                group_size: template.group_size,
                rho_db: point.rho_db,
                failures: est.failures,
                trials: est.trials,
                outage_mc: est.p_hat,
                outage_analytic: analytic,
                z: est.z_score(analytic),
            });
        }
    }
    Ok(ValidationReport { points })
}

/// Writes `contents` to `path`, or to stdout without a path.
pub fn emit(contents: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, contents)?,
        None => print!("{contents}"),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_points_and_errors() {
        let g: SnrGrid = "0:30:3".parse().unwrap();
        assert_eq!(g.points().len(), 11);
        assert_eq!(*g.points().last().unwrap(), 30.0);
        let g: SnrGrid = "-10:0:2.5".parse().unwrap();
        assert_eq!(g.points(), vec![-10.0, -7.5, -5.0, -2.5, 0.0]);
        assert_eq!("5:5:1".parse::<SnrGrid>().unwrap().points(), vec![5.0]);
        assert!("10:0:1".parse::<SnrGrid>().is_err());
        assert!("0:10:0".parse::<SnrGrid>().is_err());
        assert!("0:10".parse::<SnrGrid>().is_err());
        assert!("a:10:1".parse::<SnrGrid>().is_err());
    }

    #[test]
    fn parse_reports_line_numbers() {
        let text = "antennas = 4\n\n# comment\nbeams = two\n";
        match ExperimentSpec::parse(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
        match ExperimentSpec::parse("beams 2\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("unexpected {other:?}"),
        }
        match ExperimentSpec::parse("a = 1\nwat = 3\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parse_full_file() {
        let text = "M = 4\nK = 2\nN = 4, 8\nQ = 1\nalpha1_sq = 0.8\nalpha2_sq = 0.2 # split\nrate_bpcu = 1\n\
                    schemes = onoff, dft\nsnr_db = 0:50:5\ntrials = 1000\nseed = 9\nout = x.csv\n";
        let spec = ExperimentSpec::parse(text).unwrap();
        assert_eq!(spec.beams, 2);
        assert_eq!(spec.elements, vec![4, 8]);
        assert_eq!(spec.schemes, vec![Scheme::OnOff, Scheme::Dft]);
        assert_eq!(spec.output.as_deref(), Some(Path::new("x.csv")));
        assert_eq!(spec.configs().unwrap().len(), 2);
    }

    #[test]
    fn invalid_combinations() {
        assert!(ExperimentSpec::parse("elements = 12\ngroup_size = 5\n").is_err());
        assert!(ExperimentSpec::parse("antennas = 2\nbeams = 3\n").is_err());
        assert!(ExperimentSpec::parse("trials = 0\n").is_err());
        assert!(ExperimentSpec::parse("snr_db = 10:0:1\n").is_err());
        assert!(ExperimentSpec::parse("alpha1_sq = 0.5\n").unwrap().configs().is_err());
    }

    #[test]
    fn presets_exist_and_round_trip() {
        for name in PRESET_NAMES {
            let spec = preset(name).unwrap();
            spec.validate().unwrap();
            assert!(preset_description(name).is_some());
            assert_eq!(ExperimentSpec::parse(&spec.to_config_string()).unwrap(), spec);
        }
        assert!(preset("fig9").is_none());
    }

    #[test]
    fn optional_keys_round_trip() {
        let spec = ExperimentSpec {
            output: Some(PathBuf::from("out/run.csv")),
            reference_beams: Some(1),
            alpha1_sq: 0.7,
            alpha2_sq: 0.30000000000000004,
            ..ExperimentSpec::default()
        };
        assert_eq!(ExperimentSpec::parse(&spec.to_config_string()).unwrap(), spec);
    }
}
