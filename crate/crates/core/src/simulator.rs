//! Monte Carlo outage estimation.
//!
//! Trial `t` of a run draws its channels from stream `t` of the run seed, so
//! every (scheme, SNR) estimate is reproducible on its own and independent of
//! how trials are spread across workers. Within a trial all schemes and all
//! SNR points reuse the same realisation; comparisons between schemes are
//! therefore paired.

use rayon::prelude::*;

use crate::analytics::{closed_form_outage, error_floor};
use crate::channel::{draw_realization, ChannelRealization, SystemConfig};
use crate::irs_control::{best_codeword, build_dft_codebook, build_onoff_codebook, ideal_theta, Codebook, Scheme};
use crate::linkmetrics::{is_outage, ProjectedGains, SinrBreakdown};
use crate::numerics::RandomStream;
use crate::{Error, Result};

/// Two-sided 95% standard normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

/// Estimates resting on fewer failures than this are flagged.
pub const MIN_RELIABLE_FAILURES: u64 = 50;

const BLOCK: u64 = 2048;

/// Wilson score interval for `failures` out of `trials`.
pub fn wilson_interval(failures: u64, trials: u64, z: f64) -> (f64, f64) {
    let n = trials as f64;
    let p = failures as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let low = (center - half).clamp(0.0, 1.0).min(p);
    let high = (center + half).clamp(0.0, 1.0).max(p);
    (low, high)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutageEstimate {
    pub scheme: Scheme,
    pub trials: u64,
    pub failures: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub config: SystemConfig,
    pub seed: u64,
    /// Fewer than [`MIN_RELIABLE_FAILURES`] outages were seen; rerun with
    /// more trials before trusting the tail.
    pub needs_more_trials: bool,
}

impl OutageEstimate {
    pub fn new(scheme: Scheme, failures: u64, trials: u64, config: SystemConfig, seed: u64) -> Self {
        let (ci_low, ci_high) = wilson_interval(failures, trials, Z_95);
        Self {
            scheme,
            trials,
            failures,
            p_hat: failures as f64 / trials as f64,
            ci_low,
            ci_high,
            config,
            seed,
            needs_more_trials: failures < MIN_RELIABLE_FAILURES,
        }
    }

    /// Standardised deviation of the estimate from a reference probability,
    /// using the binomial standard error under the reference.
    pub fn z_score(&self, reference: f64) -> f64 {
        let diff = self.p_hat - reference;
        let var = reference * (1.0 - reference) / self.trials as f64;
        if var > 0.0 {
            diff / var.sqrt()
        } else if diff == 0.0 {
            0.0
        } else {
            diff.signum() * f64::INFINITY
        }
    }
}

/// Paired outcome counts of two schemes evaluated on the same trials.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairedComparison {
    pub first: Scheme,
    pub second: Scheme,
    pub trials: u64,
    /// Trials where only `first` was in outage.
    pub only_first: u64,
    /// Trials where only `second` was in outage.
    pub only_second: u64,
}

impl PairedComparison {
    /// `p_first - p_second`.
    pub fn difference(&self) -> f64 {
        (self.only_first as f64 - self.only_second as f64) / self.trials as f64
    }

    /// McNemar statistic of the difference; zero when the schemes never
    /// disagree.
    pub fn z_score(&self) -> f64 {
        let discordant = self.only_first + self.only_second;
        if discordant == 0 {
            0.0
        } else {
            (self.only_first as f64 - self.only_second as f64) / (discordant as f64).sqrt()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub rho_db: f64,
    /// One estimate per scheme, in the sweep's scheme order.
    pub estimates: Vec<OutageEstimate>,
    /// Closed-form on-off outage, where one exists.
    pub analytic: Option<f64>,
    /// High-SNR error floor, where one exists.
    pub floor: Option<f64>,
    /// `discordant[a][b]`: trials with scheme `a` in outage and `b` not.
    pub discordant: Vec<Vec<u64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub schemes: Vec<Scheme>,
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    pub fn estimate(&self, point: usize, scheme: Scheme) -> Option<&OutageEstimate> {
        let s = self.schemes.iter().position(|&x| x == scheme)?;
        Some(&self.points[point].estimates[s])
    }

    pub fn paired(&self, point: usize, first: Scheme, second: Scheme) -> Option<PairedComparison> {
        let a = self.schemes.iter().position(|&x| x == first)?;
        let b = self.schemes.iter().position(|&x| x == second)?;
        let pt = &self.points[point];
        Some(PairedComparison {
            first,
            second,
            trials: pt.estimates[a].trials,
            only_first: pt.discordant[a][b],
            only_second: pt.discordant[b][a],
        })
    }

    /// Estimates of one scheme across the grid.
    pub fn curve(&self, scheme: Scheme) -> Vec<&OutageEstimate> {
        match self.schemes.iter().position(|&x| x == scheme) {
            Some(s) => self.points.iter().map(|p| &p.estimates[s]).collect(),
            None => Vec::new(),
        }
    }
}

/// Monte Carlo engine with a fixed worker count.
#[derive(Debug, Clone, Copy)]
pub struct Engine {
    pub workers: usize,
    /// Zero-based beam carrying the far user.
    pub served_beam: usize,
}

impl Default for Engine {
    fn default() -> Self {
        Self {
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            served_beam: 0,
        }
    }
}

impl Engine {
    pub fn with_workers(workers: usize) -> Self {
        Self {
            workers: workers.max(1),
            ..Self::default()
        }
    }

    pub fn estimate_outage(&self, config: &SystemConfig, scheme: Scheme, trials: u64, seed: u64) -> Result<OutageEstimate> {
        let result = self.run_grid(config, &[scheme], vec![config.clone()], &[config.snr_db()], trials, seed)?;
        let mut point = result.points.into_iter().next().expect("one grid point");
        Ok(point.estimates.remove(0))
    }

    /// Outage of every scheme at every grid point, all on common randomness.
    pub fn sweep(
        &self,
        template: &SystemConfig,
        schemes: &[Scheme],
        rho_db: &[f64],
        trials: u64,
        seed: u64,
    ) -> Result<SweepResult> {
        if rho_db.is_empty() {
            return Err(Error::InvalidConfig("empty SNR grid".into()));
        }
        if rho_db.iter().any(|x| !x.is_finite()) || rho_db.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidConfig("SNR grid must be finite and strictly increasing".into()));
        }
        let configs = rho_db.iter().map(|&db| template.with_snr_db(db)).collect();
        self.run_grid(template, schemes, configs, rho_db, trials, seed)
    }

    fn run_grid(
        &self,
        template: &SystemConfig,
        schemes: &[Scheme],
        configs: Vec<SystemConfig>,
        rho_db: &[f64],
        trials: u64,
        seed: u64,
    ) -> Result<SweepResult> {
        template.validate()?;
        if trials == 0 {
            return Err(Error::InvalidConfig("trials must be >= 1".into()));
        }
        if schemes.is_empty() {
            return Err(Error::InvalidConfig("no schemes requested".into()));
        }
        if schemes.contains(&Scheme::Ideal) && template.elements < template.beams {
            return Err(Error::Infeasible(format!(
                "ideal zero forcing needs N >= K, got N={} K={}",
                template.elements, template.beams
            )));
        }
        if self.served_beam >= template.beams {
            return Err(Error::InvalidConfig(format!("served beam {} out of range", self.served_beam)));
        }

        let kernel = TrialKernel::new(template, schemes, &configs)?;
        let tally = self.run(&kernel, trials, seed)?;

        let mut points = Vec::with_capacity(configs.len());
        for (p, cfg) in configs.iter().enumerate() {
            let estimates = schemes
                .iter()
                .enumerate()
                .map(|(s, &scheme)| OutageEstimate::new(scheme, tally.failures(s, p), trials, cfg.clone(), seed))
                .collect();
            let discordant = (0..schemes.len())
                .map(|a| (0..schemes.len()).map(|b| tally.discordant(a, b, p)).collect())
                .collect();
            points.push(SweepPoint {
                rho_db: rho_db[p],
                estimates,
                analytic: closed_form_outage(cfg).transpose()?,
                floor: error_floor(cfg).transpose()?,
                discordant,
            });
        }
        Ok(SweepResult {
            schemes: schemes.to_vec(),
            points,
        })
    }

    /// Paired outage comparison of two schemes at one configuration.
    pub fn paired(
        &self,
        config: &SystemConfig,
        first: Scheme,
        second: Scheme,
        trials: u64,
        seed: u64,
    ) -> Result<PairedComparison> {
        let result = self.run_grid(config, &[first, second], vec![config.clone()], &[config.snr_db()], trials, seed)?;
        Ok(result.paired(0, first, second).expect("both schemes present"))
    }

    fn run(&self, kernel: &TrialKernel, trials: u64, seed: u64) -> Result<Tally> {
        let blocks = trials.div_ceil(BLOCK);
        let work = |b: u64| -> Result<Tally> {
            let mut tally = Tally::new(kernel.schemes.len(), kernel.configs.len());
            let mut outage = vec![false; kernel.schemes.len() * kernel.configs.len()];
            let end = ((b + 1) * BLOCK).min(trials);
            for t in b * BLOCK..end {
                kernel.evaluate(self.served_beam, RandomStream::new(seed, t), &mut outage)?;
                tally.record(&outage);
            }
            Ok(tally)
        };
        let merge = |mut a: Tally, b: Tally| {
            a.merge(&b);
            a
        };
        if self.workers <= 1 {
            return (0..blocks).map(work).try_fold(Tally::new(kernel.schemes.len(), kernel.configs.len()), |acc, t| {
                t.map(|t| merge(acc, t))
            });
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("cannot start worker pool: {e}")))?;
        pool.install(|| {
            (0..blocks)
                .into_par_iter()
                .map(work)
                .try_reduce(|| Tally::new(kernel.schemes.len(), kernel.configs.len()), |a, b| Ok(merge(a, b)))
        })
    }
}

/// Outage estimate with a default engine.
pub fn estimate_outage(config: &SystemConfig, scheme: Scheme, trials: u64, seed: u64) -> Result<OutageEstimate> {
    Engine::default().estimate_outage(config, scheme, trials, seed)
}

/// Sweep with a default engine.
pub fn sweep(
    template: &SystemConfig,
    schemes: &[Scheme],
    rho_db: &[f64],
    trials: u64,
    seed: u64,
) -> Result<SweepResult> {
    Engine::default().sweep(template, schemes, rho_db, trials, seed)
}

struct TrialKernel<'a> {
    template: &'a SystemConfig,
    schemes: &'a [Scheme],
    configs: &'a [SystemConfig],
    dft: Option<Codebook>,
    onoff: Option<Codebook>,
}

impl<'a> TrialKernel<'a> {
    fn new(template: &'a SystemConfig, schemes: &'a [Scheme], configs: &'a [SystemConfig]) -> Result<Self> {
        let dft = schemes
            .contains(&Scheme::Dft)
            .then(|| build_dft_codebook(template.elements))
            .transpose()?;
        let onoff = schemes
            .contains(&Scheme::OnOff)
            .then(|| build_onoff_codebook(template.elements, template.groups, template.group_size))
            .transpose()?;
        Ok(Self {
            template,
            schemes,
            configs,
            dft,
            onoff,
        })
    }

    /// Fills `outage[s * points + p]` for one trial.
    fn evaluate(&self, served: usize, stream: RandomStream, outage: &mut [bool]) -> Result<()> {
        let real = draw_realization(self.template, served, &stream)?;
        let points = self.configs.len();
        for (s, scheme) in self.schemes.iter().enumerate() {
            let row = &mut outage[s * points..(s + 1) * points];
            match scheme {
                Scheme::Ideal => {
                    let gains = ideal_gains(&real)?;
                    for (flag, cfg) in row.iter_mut().zip(self.configs) {
                        *flag = is_outage(SinrBreakdown::from_gains(gains, cfg).sinr, cfg.rate_bpcu);
                    }
                }
                Scheme::Dft | Scheme::OnOff => {
                    let book = if *scheme == Scheme::Dft { &self.dft } else { &self.onoff };
                    let gains = book.as_ref().expect("codebook built for requested scheme").gains(&real)?;
                    for (flag, cfg) in row.iter_mut().zip(self.configs) {
                        let best = best_codeword(&gains, cfg).expect("codebooks are non-empty");
                        *flag = is_outage(SinrBreakdown::from_gains(gains[best], cfg).sinr, cfg.rate_bpcu);
                    }
                }
            }
        }
        Ok(())
    }
}

/// Gains through the zero-forcing vector. A served cascade with no
/// component in the null space leaves no useful signal for any unit vector
/// there, so it is scored as zero gain (an outage) rather than an error.
fn ideal_gains(real: &ChannelRealization) -> Result<ProjectedGains> {
    match ideal_theta(real) {
        Ok(theta) => ProjectedGains::project(&theta.values, real),
        Err(Error::Degenerate(_)) => Ok(ProjectedGains {
            served: 0.0,
            inter_pair: 0.0,
        }),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone)]
struct Tally {
    schemes: usize,
    points: usize,
    failures: Vec<u64>,
    discordant: Vec<u64>,
}

impl Tally {
    fn new(schemes: usize, points: usize) -> Self {
        Self {
            schemes,
            points,
            failures: vec![0; schemes * points],
            discordant: vec![0; schemes * schemes * points],
        }
    }

    fn record(&mut self, outage: &[bool]) {
        let (s_n, p_n) = (self.schemes, self.points);
        for s in 0..s_n {
            for p in 0..p_n {
                if outage[s * p_n + p] {
                    self.failures[s * p_n + p] += 1;
                    for b in 0..s_n {
                        if !outage[b * p_n + p] {
                            self.discordant[(s * s_n + b) * p_n + p] += 1;
                        }
                    }
                }
            }
        }
    }

    fn merge(&mut self, other: &Tally) {
        for (a, b) in self.failures.iter_mut().zip(&other.failures) {
            *a += b;
        }
        for (a, b) in self.discordant.iter_mut().zip(&other.discordant) {
            *a += b;
        }
    }

    fn failures(&self, scheme: usize, point: usize) -> u64 {
        self.failures[scheme * self.points + point]
    }

    fn discordant(&self, a: usize, b: usize, point: usize) -> u64 {
        self.discordant[(a * self.schemes + b) * self.points + point]
    }
}
