//! Measurement protocol: generate an instance, encode it, sample, check every
//! shot, and aggregate the single-run success probability over repetitions.
//! Also time-to-solution and the log-linear scaling fits.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Duration;

use rayon::prelude::*;

use crate::checker::{is_cycle_cover, RejectReason};
use crate::error::{Error, Result};
use crate::graph::{GeneratorParams, Noise};
use crate::qubo::{self, QuboProblem};
use crate::seed;
use crate::solver::{self, AnnealParams, SampleSet};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sampler {
    Exact,
    Anneal(AnnealParams),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentConfig {
    /// `seed` is ignored here; instance seeds derive from `master_seed`.
    pub generator: GeneratorParams,
    pub sampler: Sampler,
    pub shots: usize,
    pub repetitions: usize,
    pub epsilon: f64,
    pub t_anneal: Duration,
    pub t_pause: Duration,
    pub target_probability: f64,
    pub master_seed: u64,
}

impl ExperimentConfig {
    pub fn new(generator: GeneratorParams, sampler: Sampler) -> Self {
        Self {
            generator,
            sampler,
            shots: 100,
            repetitions: 50,
            epsilon: qubo::DEFAULT_EPSILON,
            t_anneal: Duration::from_micros(200),
            t_pause: Duration::from_micros(100),
            target_probability: 0.99,
            master_seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.generator.validate()?;
        if self.shots < 1 || self.repetitions < 1 {
            return Err(Error::Domain("shots and repetitions must be at least 1".into()));
        }
        if !(self.target_probability > 0.0 && self.target_probability < 1.0) {
            return Err(Error::Domain(format!(
                "target probability must lie in (0, 1), got {}",
                self.target_probability
            )));
        }
        if let Sampler::Anneal(p) = self.sampler {
            AnnealParams { shots: self.shots, ..p }.validate()?;
        }
        Ok(())
    }

    /// Seed for repetition `rep`. The instance uses it directly; sampler
    /// shots use `seed::derive(rep_seed, 1)`.
    pub fn rep_seed(&self, rep: usize) -> u64 {
        seed::derive(self.master_seed, rep as u64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub p_sol: f64,
    pub num_vertices: usize,
    pub num_edges: usize,
    pub n_noise: usize,
    pub min_energy: f64,
    /// Rejected shots by cause.
    pub rejections: BTreeMap<RejectReason, usize>,
}

/// Fraction of sampled shots whose decoded subgraph is a valid cover.
pub fn success_fraction(
    q: &QuboProblem,
    g: &crate::graph::DirectedGraph,
    samples: &SampleSet,
) -> Result<(f64, BTreeMap<RejectReason, usize>)> {
    let mut accepted = 0usize;
    let mut rejections = BTreeMap::new();
    for r in &samples.records {
        let sub = q.decode(&r.assignment)?;
        match is_cycle_cover(g, &sub)?.reason() {
            None => accepted += r.count,
            Some(reason) => *rejections.entry(reason).or_default() += r.count,
        }
    }
    Ok((accepted as f64 / samples.total_shots as f64, rejections))
}

/// One repetition: fresh instance, encode, sample, check.
pub fn run_trial(config: &ExperimentConfig, rep: usize) -> Result<TrialOutcome> {
    config.validate()?;
    let rep_seed = config.rep_seed(rep);
    let params = GeneratorParams {
        seed: rep_seed,
        ..config.generator
    };
    let g = params.generate()?;
    let q = qubo::encode(&g, config.epsilon)?;
    let sample_seed = seed::derive(rep_seed, 1);
    let samples = match config.sampler {
        Sampler::Exact => solver::sample_exact(&q, config.shots, sample_seed)?,
        Sampler::Anneal(p) => solver::sample_sa(
            &q,
            &AnnealParams {
                shots: config.shots,
                seed: sample_seed,
                ..p
            },
        )?,
    };
    let (p_sol, rejections) = success_fraction(&q, &g, &samples)?;
    Ok(TrialOutcome {
        p_sol,
        num_vertices: g.num_vertices(),
        num_edges: g.num_edges(),
        n_noise: g.num_edges() - params.num_vertices(),
        min_energy: samples.lowest().map_or(f64::NAN, |r| r.energy),
        rejections,
    })
}

/// Time to solution, or why it has no finite value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tts {
    Finite(Duration),
    /// `p = 1`: a single run suffices.
    SingleRun(Duration),
    /// `p = 0`: no solution was ever observed.
    Unreachable,
}

impl Tts {
    pub fn duration(&self) -> Option<Duration> {
        match *self {
            Tts::Finite(d) | Tts::SingleRun(d) => Some(d),
            Tts::Unreachable => None,
        }
    }
}

/// `(t_anneal + t_pause) * ln(1 - target) / ln(1 - p)`.
pub fn tts(p: f64, t_anneal: Duration, t_pause: Duration, target: f64) -> Result<Tts> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::Domain(format!("target must lie in (0, 1), got {target}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("probability must lie in [0, 1], got {p}")));
    }
    let run = t_anneal + t_pause;
    if p == 0.0 {
        return Ok(Tts::Unreachable);
    }
    if p == 1.0 {
        return Ok(Tts::SingleRun(run));
    }
    let runs = (1.0 - target).ln() / (1.0 - p).ln();
    Ok(Tts::Finite(run.mul_f64(runs)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceMeta {
    pub cycles: usize,
    pub cycle_len: usize,
    pub num_vertices: usize,
    pub num_edges: usize,
    pub n_noise: usize,
    /// `None` when the noise was given as a count.
    pub p_noise: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub per_rep_p_sol: Vec<f64>,
    pub p_sol_mean: f64,
    /// Zero when there is a single repetition; see `sem_defined`.
    pub p_sol_sem: f64,
    pub sem_defined: bool,
    pub tts: Tts,
    pub meta: InstanceMeta,
    pub shots: usize,
    pub rejections: BTreeMap<RejectReason, usize>,
}

/// Mean and standard error (sample standard deviation over `sqrt(n)`).
/// A single value has standard error 0.
pub fn mean_sem(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Runs all repetitions on `threads` worker threads (1 runs inline). The
/// result does not depend on the thread count.
pub fn run_experiment(config: &ExperimentConfig, threads: usize) -> Result<ExperimentResult> {
    config.validate()?;
    let trials: Vec<TrialOutcome> = if threads <= 1 {
        (0..config.repetitions)
            .map(|rep| run_trial(config, rep))
            .collect::<Result<_>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Domain(format!("thread pool: {e}")))?;
        pool.install(|| {
            (0..config.repetitions)
                .into_par_iter()
                .map(|rep| run_trial(config, rep))
                .collect::<Result<_>>()
        })?
    };
    let per_rep_p_sol: Vec<f64> = trials.iter().map(|t| t.p_sol).collect();
    let (p_sol_mean, p_sol_sem) = mean_sem(&per_rep_p_sol);
    let mut rejections = BTreeMap::new();
    for t in &trials {
        for (&r, &c) in &t.rejections {
            *rejections.entry(r).or_default() += c;
        }
    }
    let first = &trials[0];
    let meta = InstanceMeta {
        cycles: config.generator.cycles,
        cycle_len: config.generator.cycle_len,
        num_vertices: first.num_vertices,
        num_edges: first.num_edges,
        n_noise: first.n_noise,
        p_noise: match config.generator.noise {
            Noise::Fraction(p) => Some(p),
            Noise::Count(_) => None,
        },
    };
    Ok(ExperimentResult {
        tts: tts(
            p_sol_mean.clamp(0.0, 1.0),
            config.t_anneal,
            config.t_pause,
            config.target_probability,
        )?,
        per_rep_p_sol,
        p_sol_mean,
        p_sol_sem,
        sem_defined: config.repetitions > 1,
        meta,
        shots: config.shots,
        rejections,
    })
}

pub const RESULTS_HEADER: &str = "n,L,N_V,N_E,p_noise,N_noise,shots,reps,p_sol_mean,p_sol_sem,tts_ms";

impl ExperimentResult {
    /// One results-CSV row (no trailing newline). `p_noise` is derived from
    /// the noise count when it was not given; `tts_ms` is empty when
    /// undefined.
    pub fn csv_row(&self) -> String {
        let m = &self.meta;
        let p_noise = m.p_noise.unwrap_or_else(|| {
            let nv = m.num_vertices as f64;
            m.n_noise as f64 / (nv * (nv - 2.0))
        });
        let tts_ms = self
            .tts
            .duration()
            .map(|d| (d.as_secs_f64() * 1e3).to_string())
            .unwrap_or_default();
        let mut s = String::new();
        write!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{}",
            m.cycles,
            m.cycle_len,
            m.num_vertices,
            m.num_edges,
            p_noise,
            m.n_noise,
            self.shots,
            self.per_rep_p_sol.len(),
            self.p_sol_mean,
            self.p_sol_sem,
            tts_ms
        )
        .unwrap();
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitModel {
    /// `ln(TTS / 1 ms) = a + b * N_noise`
    Exponential,
    /// `ln(TTS / 1 ms) = a + b * ln(N_noise)`
    PowerLaw,
}

impl FitModel {
    pub fn name(&self) -> &'static str {
        match self {
            FitModel::Exponential => "exp",
            FitModel::PowerLaw => "power",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub model: FitModel,
    pub a: f64,
    pub b: f64,
    /// Root-mean-square residual in the transformed coordinates.
    pub rms_residual: f64,
    pub points_used: usize,
}

impl FitResult {
    pub fn csv_line(&self) -> String {
        format!("{},{},{},{}", self.model.name(), self.a, self.b, self.rms_residual)
    }
}

/// Ordinary least squares of `ln(TTS / 1 ms)` against `N_noise` or
/// `ln(N_noise)`, over `(N_noise, TTS in ms)` points with
/// `N_noise >= min_noise`. Points are sorted before summation so the result
/// does not depend on input order.
pub fn fit_tts(points: &[(u64, f64)], model: FitModel, min_noise: u64) -> Result<FitResult> {
    let mut xy = Vec::new();
    for &(n, ms) in points.iter().filter(|p| p.0 >= min_noise) {
        if !(ms > 0.0 && ms.is_finite()) {
            return Err(Error::Domain(format!("TTS must be positive and finite, got {ms} ms at N_noise={n}")));
        }
        let x = match model {
            FitModel::Exponential => n as f64,
            FitModel::PowerLaw => {
                if n == 0 {
                    return Err(Error::Domain("power-law fit needs N_noise > 0".into()));
                }
                (n as f64).ln()
            }
        };
        xy.push((x, ms.ln()));
    }
    if xy.len() < 2 {
        return Err(Error::InsufficientData(xy.len()));
    }
    xy.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.total_cmp(&q.1)));
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain("all usable points share the same N_noise".into()));
    }
    let b = sxy / sxx;
    let a = my - b * mx;
    let rss: f64 = xy.iter().map(|p| (p.1 - a - b * p.0).powi(2)).sum();
    Ok(FitResult {
        model,
        a,
        b,
        rms_residual: (rss / n).sqrt(),
        points_used: xy.len(),
    })
}
