//! Monte Carlo validation of the asymptotic theory: bias and RMSE across
//! sample sizes, standardized statistics, normality diagnostics and interval
//! coverage.
//!
//! Replicate `b` of size-lane `s` always draws from the counter-based stream
//! `(seed, s, b)` and all reductions run in replicate order, so a study is
//! bitwise reproducible no matter how many worker threads execute it. With
//! the `parallel` feature (default) replicates run on the rayon pool;
//! without it the same code runs sequentially.

use serde::{Deserialize, Serialize};

use crate::asymptotics::{asymptotic_variance, HMode};
use crate::distribution::{empirical_distribution, CountVector, DiscreteDistribution};
use crate::error::{Error, Result};
use crate::normal;
use crate::stream::RngStream;
use crate::zenga_population;

/// Study parameters.
#[derive(Debug, Clone)]
pub struct StudyConfig {
    pub dist: DiscreteDistribution,
    pub sizes: Vec<u64>,
    /// Replicates per size (B).
    pub replicates: u32,
    pub seed: u64,
    /// Confidence level used for the coverage column.
    pub level: f64,
}

impl StudyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() {
            return Err(Error::InvalidArgument("no sample sizes given".into()));
        }
        if let Some(bad) = self.sizes.iter().find(|&&n| n < 2) {
            return Err(Error::InvalidArgument(format!(
                "sample sizes must be at least 2, got {bad}"
            )));
        }
        if self.replicates < 100 {
            return Err(Error::InvalidArgument(format!(
                "at least 100 replicates required, got {}",
                self.replicates
            )));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "confidence level must lie in (0,1), got {}",
                self.level
            )));
        }
        Ok(())
    }
}

/// Summary row for one sample size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeStats {
    pub size: u64,
    /// Mean error (bias) of the replicate estimates.
    pub erm: f64,
    pub mse: f64,
    pub rmse: f64,
    /// Sample standard deviation of `sqrt(n) (Z_b - Z)`.
    pub sd_scaled: f64,
    /// Asymptotic standard deviation `sqrt(H' Sigma H)` (corrected mode).
    pub sigma_analytic: f64,
    /// Kolmogorov-Smirnov distance of the standardized statistics to the
    /// standard normal (0.5 when the statistic is degenerate).
    pub ks_distance: f64,
    /// Fraction of replicate confidence intervals containing the target.
    pub coverage: f64,
}

/// Full study output; `qq` and `kde` describe the largest size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub per_size: Vec<SizeStats>,
    /// `(normal quantile, sorted standardized statistic)` pairs.
    pub qq: Vec<(f64, f64)>,
    /// Gaussian-kernel density of the standardized statistics, bandwidth
    /// `1.06 sigma B^(-1/5)`.
    pub kde: Vec<(f64, f64)>,
}

/// One multinomial draw of size `n` from the law, by classifying `n`
/// independent uniforms against the cumulative masses.
pub fn sample_counts(dist: &DiscreteDistribution, n: u64, stream: &mut RngStream) -> CountVector {
    let cum = dist.cumulative_probs();
    let mut counts = vec![0u64; dist.len()];
    for _ in 0..n {
        let u = stream.next_f64();
        let j = cum.partition_point(|&c| c <= u);
        counts[j] += 1;
    }
    CountVector::new(counts).expect("n >= 1 draws")
}

/// Standardized statistic `sqrt(n) (zhat - Z) / sigma` with `sigma` from the
/// corrected asymptotic variance.
pub fn standardize(zhat: f64, dist: &DiscreteDistribution, n: u64) -> Result<f64> {
    let sigma2 = asymptotic_variance(dist, HMode::Corrected);
    if sigma2 <= 0.0 {
        return Err(Error::InvalidArgument(
            "degenerate law: asymptotic variance is zero".into(),
        ));
    }
    let z = zenga_population(dist).index;
    Ok((n as f64).sqrt() * (zhat - z) / sigma2.sqrt())
}

/// Normalized multinomial cell counts `(n_h - n p_h) / sqrt(n p_h)`.
pub fn normalized_counts(counts: &CountVector, dist: &DiscreteDistribution) -> Result<Vec<f64>> {
    if counts.len() != dist.len() {
        return Err(Error::InvalidCounts(format!(
            "{} counts but {} support points",
            counts.len(),
            dist.len()
        )));
    }
    let n = counts.total() as f64;
    Ok(counts
        .counts()
        .iter()
        .zip(dist.probs())
        .map(|(&c, &p)| (c as f64 - n * p) / (n * p).sqrt())
        .collect())
}

/// Kolmogorov-Smirnov distance between the empirical law of `sorted`
/// (ascending) and the standard normal cdf.
pub fn ks_distance_to_normal(sorted: &[f64]) -> f64 {
    let b = sorted.len() as f64;
    let mut sup: f64 = 0.0;
    for (i, &t) in sorted.iter().enumerate() {
        let phi = normal::cdf(t);
        sup = sup
            .max(((i + 1) as f64 / b - phi).abs())
            .max((i as f64 / b - phi).abs());
    }
    sup
}

fn map_replicates<T: Send, F: Fn(u32) -> T + Sync + Send>(parallel: bool, b: u32, f: F) -> Vec<T> {
    #[cfg(feature = "parallel")]
    if parallel {
        use rayon::prelude::*;
        return (0..b).into_par_iter().map(f).collect();
    }
    let _ = parallel;
    (0..b).map(f).collect()
}

/// Zenga estimates over `replicates` independent multinomial samples of size
/// `n`, replicate `b` drawn from stream `(seed, lane, b)`. Output order is
/// the replicate index.
pub fn replicate_estimates(
    dist: &DiscreteDistribution,
    n: u64,
    seed: u64,
    lane: u64,
    replicates: u32,
) -> Vec<f64> {
    replicate_estimates_with(dist, n, seed, lane, replicates, cfg!(feature = "parallel"))
}

/// Sequential variant of [`replicate_estimates`]; same output bit for bit.
pub fn replicate_estimates_sequential(
    dist: &DiscreteDistribution,
    n: u64,
    seed: u64,
    lane: u64,
    replicates: u32,
) -> Vec<f64> {
    replicate_estimates_with(dist, n, seed, lane, replicates, false)
}

/// Rayon variant of [`replicate_estimates`].
#[cfg(feature = "parallel")]
pub fn replicate_estimates_parallel(
    dist: &DiscreteDistribution,
    n: u64,
    seed: u64,
    lane: u64,
    replicates: u32,
) -> Vec<f64> {
    replicate_estimates_with(dist, n, seed, lane, replicates, true)
}

fn replicate_estimates_with(
    dist: &DiscreteDistribution,
    n: u64,
    seed: u64,
    lane: u64,
    replicates: u32,
    parallel: bool,
) -> Vec<f64> {
    map_replicates(parallel, replicates, |b| {
        let mut stream = RngStream::derived(seed, lane, b as u64);
        let counts = sample_counts(dist, n, &mut stream);
        let emp = empirical_distribution(&counts, dist.values()).expect("counts sum to n >= 1");
        zenga_population(&emp).index
    })
}

struct Replicate {
    zhat: f64,
    covered: bool,
}

/// Runs the full study; parallel over replicates when the `parallel` feature
/// is enabled.
pub fn run_study(config: &StudyConfig) -> Result<StudyReport> {
    run_study_with(config, cfg!(feature = "parallel"))
}

/// Sequential study run, available regardless of features; identical output.
pub fn run_study_sequential(config: &StudyConfig) -> Result<StudyReport> {
    run_study_with(config, false)
}

/// Study run on the rayon pool.
#[cfg(feature = "parallel")]
pub fn run_study_parallel(config: &StudyConfig) -> Result<StudyReport> {
    run_study_with(config, true)
}

fn run_study_with(config: &StudyConfig, parallel: bool) -> Result<StudyReport> {
    config.validate()?;
    let dist = &config.dist;
    let z_pop = zenga_population(dist).index;
    let sigma2 = asymptotic_variance(dist, HMode::Corrected);
    let sigma = sigma2.sqrt();
    let q = normal::quantile(0.5 * (1.0 + config.level))?;
    let b = config.replicates;

    let largest = config
        .sizes
        .iter()
        .enumerate()
        .max_by_key(|(_, &n)| n)
        .map(|(i, _)| i)
        .expect("sizes non-empty");

    let mut per_size = Vec::with_capacity(config.sizes.len());
    let mut qq = Vec::new();
    let mut kde = Vec::new();

    for (lane, &n) in config.sizes.iter().enumerate() {
        let reps = map_replicates(parallel, b, |rep| {
            let mut stream = RngStream::derived(config.seed, lane as u64, rep as u64);
            let counts = sample_counts(dist, n, &mut stream);
            let emp =
                empirical_distribution(&counts, dist.values()).expect("counts sum to n >= 1");
            let zhat = zenga_population(&emp).index;
            let covered = if emp.len() < 2 {
                zhat == z_pop
            } else {
                let s2 = asymptotic_variance(&emp, HMode::Corrected);
                let half = q * (s2 / n as f64).sqrt();
                (zhat - half).max(0.0) <= z_pop && z_pop <= (zhat + half).min(1.0)
            };
            Replicate { zhat, covered }
        });

        // all reductions stay in replicate order
        let bf = b as f64;
        let sqrt_n = (n as f64).sqrt();
        let mut sum_err = 0.0;
        let mut sum_sq = 0.0;
        let mut hits = 0u32;
        let mut devs = Vec::with_capacity(reps.len());
        for r in &reps {
            let err = r.zhat - z_pop;
            sum_err += err;
            sum_sq += err * err;
            if r.covered {
                hits += 1;
            }
            devs.push(sqrt_n * err);
        }
        let erm = sum_err / bf;
        let mse = sum_sq / bf;
        let mean_dev = devs.iter().sum::<f64>() / bf;
        let var_dev = devs.iter().map(|d| (d - mean_dev).powi(2)).sum::<f64>() / (bf - 1.0);
        let sd_scaled = var_dev.sqrt();

        let mut ts: Vec<f64> = if sigma > 0.0 {
            devs.iter().map(|d| d / sigma).collect()
        } else {
            vec![0.0; devs.len()]
        };
        ts.sort_by(|a, b| a.partial_cmp(b).expect("finite statistics"));
        let ks = ks_distance_to_normal(&ts);

        if lane == largest {
            qq = qq_pairs(&ts);
            kde = gaussian_kde(&ts);
        }

        per_size.push(SizeStats {
            size: n,
            erm,
            mse,
            rmse: mse.sqrt(),
            sd_scaled,
            sigma_analytic: sigma,
            ks_distance: ks,
            coverage: hits as f64 / bf,
        });
    }

    Ok(StudyReport { per_size, qq, kde })
}

/// `(normal quantile of (b - 0.5)/B, sorted statistic)` pairs.
fn qq_pairs(sorted: &[f64]) -> Vec<(f64, f64)> {
    let b = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let p = (i as f64 + 0.5) / b;
            (normal::quantile(p).expect("p in (0,1)"), t)
        })
        .collect()
}

/// Gaussian-kernel density estimate on 201 grid points spanning the sample
/// plus three bandwidths on each side.
fn gaussian_kde(sample: &[f64]) -> Vec<(f64, f64)> {
    let b = sample.len() as f64;
    let mean = sample.iter().sum::<f64>() / b;
    let var = sample.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (b - 1.0);
    let bandwidth = 1.06 * var.sqrt() * b.powf(-0.2);
    if !(bandwidth > 0.0) {
        return Vec::new();
    }
    let lo = sample.iter().cloned().fold(f64::INFINITY, f64::min) - 3.0 * bandwidth;
    let hi = sample.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 3.0 * bandwidth;
    const POINTS: usize = 201;
    (0..POINTS)
        .map(|i| {
            let x = lo + (hi - lo) * i as f64 / (POINTS - 1) as f64;
            let density = sample
                .iter()
                .map(|t| normal::pdf((x - t) / bandwidth))
                .sum::<f64>()
                / (b * bandwidth);
            (x, density)
        })
        .collect()
}
