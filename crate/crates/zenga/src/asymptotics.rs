//! Asymptotic variance of the empirical Zenga index through its multinomial
//! representation.
//!
//! With `N_h = (n_h - n p_h) / sqrt(n p_h)` the normalized cell counts of the
//! multinomial sample, `sqrt(n) (Z_n - Z)` converges to `H' N` for a score
//! vector `H` assembled from per-cut pieces, so the limit variance is
//! `H' Sigma H` with `Sigma` the covariance of `N`.
//!
//! Two assemblies of `H` are provided. [`HMode::Literal`] weights the
//! cumulative-mass score `E_j` by `1 / p_j*^2`. [`HMode::Corrected`] weights
//! it by `zeta_j = p_j mu_(j) / (p_j*^2 mu^(j))`, which is what the term-wise
//! expansion of the estimator actually yields; it is the default and the one
//! that agrees with the finite-difference and influence-function variances
//! (see [`delta_variance`] and [`crate::influence`]). The literal mode is kept
//! so the discrepancy can be inspected.

use serde::{Deserialize, Serialize};

use crate::distribution::{empirical_distribution, CountVector, DiscreteDistribution};
use crate::error::{Error, Result};
use crate::influence::influence_profile;
use crate::normal;
use crate::zenga_population;

/// Default relative finite-difference step for [`delta_variance`].
pub const DEFAULT_DELTA_STEP: f64 = 1e-6;

/// Covariance matrix of the normalized multinomial cell counts:
/// diagonal `1 - p_h`, off-diagonal `-sqrt(p_h p_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceSigma {
    m: usize,
    entries: Vec<f64>,
}

impl CovarianceSigma {
    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn entry(&self, h: usize, k: usize) -> f64 {
        self.entries[h * self.m + k]
    }

    /// `v' Sigma v`.
    pub fn quadratic_form(&self, v: &[f64]) -> f64 {
        assert_eq!(v.len(), self.m);
        let mut acc = 0.0;
        for h in 0..self.m {
            let mut row = 0.0;
            for k in 0..self.m {
                row += self.entry(h, k) * v[k];
            }
            acc += v[h] * row;
        }
        acc
    }

    /// `Sigma v` (used by tests to check the null direction sqrt(p)).
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.m);
        (0..self.m)
            .map(|h| (0..self.m).map(|k| self.entry(h, k) * v[k]).sum())
            .collect()
    }
}

pub fn sigma_matrix(dist: &DiscreteDistribution) -> CovarianceSigma {
    let m = dist.len();
    let probs = dist.probs();
    let mut entries = vec![0.0; m * m];
    for h in 0..m {
        for k in 0..m {
            entries[h * m + k] = if h == k {
                1.0 - probs[h]
            } else {
                -(probs[h] * probs[k]).sqrt()
            };
        }
    }
    CovarianceSigma { m, entries }
}

/// Which `E_j` weighting to use when assembling `H`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HMode {
    /// `1 / p_j*^2`, as displayed.
    Literal,
    /// `zeta_j = p_j mu_(j) / (p_j*^2 mu^(j))`; matches the independent
    /// variance routes and is the default everywhere.
    Corrected,
}

/// All per-cut score vectors and coefficients entering `H`, for m >= 2.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreSet {
    /// c_h = sqrt(p_h) * (lower mean / upper mean) at the cut through h;
    /// the last component is zero.
    pub c: Vec<f64>,
    /// `d1[j][h] = x_h sqrt(p_h)` for h in the poorer group, else 0 (cut j+1).
    pub d1: Vec<Vec<f64>>,
    /// `d2[j][h] = -x_h sqrt(p_h)` for h in the richer group, else 0.
    pub d2: Vec<Vec<f64>>,
    /// `e[j][h] = -sqrt(p_h)` for h in the poorer group, else 0.
    pub e: Vec<Vec<f64>>,
    pub gamma1: Vec<f64>,
    pub gamma2: Vec<f64>,
    /// Corrected E-coefficients zeta_j.
    pub zeta: Vec<f64>,
    pub h_literal: Vec<f64>,
    pub h_corrected: Vec<f64>,
}

impl ScoreSet {
    pub fn h(&self, mode: HMode) -> &[f64] {
        match mode {
            HMode::Literal => &self.h_literal,
            HMode::Corrected => &self.h_corrected,
        }
    }
}

pub fn score_set(dist: &DiscreteDistribution) -> Result<ScoreSet> {
    let m = dist.len();
    if m < 2 {
        return Err(Error::InvalidArgument(
            "score set needs at least two support points".into(),
        ));
    }
    let values = dist.values();
    let probs = dist.probs();
    let sqrt_p: Vec<f64> = probs.iter().map(|p| p.sqrt()).collect();

    let mut c = vec![0.0; m];
    let mut d1 = Vec::with_capacity(m - 1);
    let mut d2 = Vec::with_capacity(m - 1);
    let mut e = Vec::with_capacity(m - 1);
    let mut gamma1 = Vec::with_capacity(m - 1);
    let mut gamma2 = Vec::with_capacity(m - 1);
    let mut zeta = Vec::with_capacity(m - 1);
    // minus_h accumulates C + sum_j (gamma1 D1 + gamma2 D2 + kappa E)
    let mut minus_h_lit = vec![0.0; m];
    let mut minus_h_cor = vec![0.0; m];

    for cut in 1..m {
        let (mu_lo, mu_up) = dist.partial_means(cut)?;
        let pstar = dist.cumulative_prob(cut);
        let tail = 1.0 - pstar;
        let p_cut = probs[cut - 1];

        c[cut - 1] = sqrt_p[cut - 1] * (mu_lo / pstar) / (mu_up / tail);

        let g1 = p_cut * tail / (pstar * mu_up);
        let g2 = p_cut * tail * mu_lo / (pstar * mu_up * mu_up);
        let z = p_cut * mu_lo / (pstar * pstar * mu_up);
        let kappa_lit = 1.0 / (pstar * pstar);

        let mut d1_j = vec![0.0; m];
        let mut d2_j = vec![0.0; m];
        let mut e_j = vec![0.0; m];
        for h in 0..m {
            if h < cut {
                d1_j[h] = values[h] * sqrt_p[h];
                e_j[h] = -sqrt_p[h];
            } else {
                d2_j[h] = -values[h] * sqrt_p[h];
            }
        }
        for h in 0..m {
            let common = g1 * d1_j[h] + g2 * d2_j[h];
            minus_h_lit[h] += common + kappa_lit * e_j[h];
            minus_h_cor[h] += common + z * e_j[h];
        }

        d1.push(d1_j);
        d2.push(d2_j);
        e.push(e_j);
        gamma1.push(g1);
        gamma2.push(g2);
        zeta.push(z);
    }

    let h_literal: Vec<f64> = minus_h_lit.iter().zip(&c).map(|(s, ch)| -(s + ch)).collect();
    let h_corrected: Vec<f64> = minus_h_cor.iter().zip(&c).map(|(s, ch)| -(s + ch)).collect();

    Ok(ScoreSet {
        c,
        d1,
        d2,
        e,
        gamma1,
        gamma2,
        zeta,
        h_literal,
        h_corrected,
    })
}

/// Limit variance of `sqrt(n) (Z_n - Z)`, i.e. `H' Sigma H`. Zero for a
/// single-point support (the statistic is constant).
pub fn asymptotic_variance(dist: &DiscreteDistribution, mode: HMode) -> f64 {
    if dist.len() < 2 {
        return 0.0;
    }
    let scores = score_set(dist).expect("m >= 2");
    let sigma = sigma_matrix(dist);
    sigma.quadratic_form(scores.h(mode))
}

/// Zenga index as a function of a free (not necessarily normalized) mass
/// vector; cumulative and tail masses are both recomputed from `masses`, so
/// any off-simplex extension error lies along the all-ones direction, which
/// the multinomial covariance annihilates.
fn zenga_free_mass(values: &[f64], masses: &[f64]) -> f64 {
    let m = values.len();
    let mut acc = 0.0;
    let mut pstar = 0.0;
    let mut mu_lo = 0.0;
    let mut total = 0.0;
    let mut mu_total = 0.0;
    for h in 0..m {
        total += masses[h];
        mu_total += masses[h] * values[h];
    }
    for cut in 1..m {
        pstar += masses[cut - 1];
        mu_lo += masses[cut - 1] * values[cut - 1];
        let tail = total - pstar;
        let mu_up = mu_total - mu_lo;
        acc += masses[cut - 1] * (mu_lo / pstar) / (mu_up / tail);
    }
    1.0 - acc
}

/// Delta-method variance oracle: numeric gradient `g` of the index in the
/// mass coordinates by central differences, then `g' (diag(p) - p p') g`.
/// `step` is the relative step size, in `(0, 1e-3]`; each coordinate is
/// perturbed by `step * max(p_j, 1e-3)`.
pub fn delta_variance(dist: &DiscreteDistribution, step: f64) -> Result<f64> {
    if !(step > 0.0 && step <= 1e-3) {
        return Err(Error::InvalidArgument(format!(
            "step must lie in (0, 1e-3], got {step}"
        )));
    }
    let m = dist.len();
    if m < 2 {
        return Ok(0.0);
    }
    let values = dist.values();
    let probs = dist.probs();
    let mut grad = vec![0.0; m];
    let mut work = probs.to_vec();
    for h in 0..m {
        let dp = step * probs[h].max(1e-3);
        if probs[h] - dp <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "step {step} too large for mass {} at position {}",
                probs[h],
                h + 1
            )));
        }
        work[h] = probs[h] + dp;
        let up = zenga_free_mass(values, &work);
        work[h] = probs[h] - dp;
        let down = zenga_free_mass(values, &work);
        work[h] = probs[h];
        grad[h] = (up - down) / (2.0 * dp);
    }
    // g' (diag(p) - p p') g = sum p g^2 - (sum p g)^2
    let mean_g: f64 = probs.iter().zip(&grad).map(|(p, g)| p * g).sum();
    let second: f64 = probs.iter().zip(&grad).map(|(p, g)| p * g * g).sum();
    // rounding can push the difference of the two sums slightly negative
    Ok((second - mean_g * mean_g).max(0.0))
}

/// Point estimate with variances from every estimation path and a normal
/// confidence interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticReport {
    /// Empirical Zenga index.
    pub index: f64,
    pub n: u64,
    /// Variances of `sqrt(n) (Z_n - Z)` under each path.
    pub sigma2_literal: f64,
    pub sigma2_corrected: f64,
    pub sigma2_delta: f64,
    pub sigma2_if: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub level: f64,
}

impl AsymptoticReport {
    /// Standard error of the index at the observed sample size
    /// (corrected path).
    pub fn standard_error(&self) -> f64 {
        (self.sigma2_corrected / self.n as f64).sqrt()
    }
}

/// Plug-in confidence interval `Z_n ± q_(1+level)/2 sqrt(sigma^2 / n)` with
/// `sigma^2` the corrected variance at the empirical law, clamped to [0, 1].
/// With fewer than two observed support points the interval degenerates to
/// the point estimate.
pub fn confidence_interval(
    counts: &CountVector,
    support: &[f64],
    level: f64,
) -> Result<AsymptoticReport> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "confidence level must lie in (0,1), got {level}"
        )));
    }
    let dist = empirical_distribution(counts, support)?;
    let n = counts.total();
    let index = zenga_population(&dist).index;
    if dist.len() < 2 {
        return Ok(AsymptoticReport {
            index,
            n,
            sigma2_literal: 0.0,
            sigma2_corrected: 0.0,
            sigma2_delta: 0.0,
            sigma2_if: 0.0,
            ci_low: index,
            ci_high: index,
            level,
        });
    }
    let sigma2_corrected = asymptotic_variance(&dist, HMode::Corrected);
    let sigma2_literal = asymptotic_variance(&dist, HMode::Literal);
    let sigma2_delta = delta_variance(&dist, DEFAULT_DELTA_STEP)?;
    let sigma2_if = influence_profile(&dist).if_variance;
    let q = normal::quantile(0.5 * (1.0 + level))?;
    let half = q * (sigma2_corrected / n as f64).sqrt();
    Ok(AsymptoticReport {
        index,
        n,
        sigma2_literal,
        sigma2_corrected,
        sigma2_delta,
        sigma2_if,
        ci_low: (index - half).max(0.0),
        ci_high: (index + half).min(1.0),
        level,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::CountVector;

    fn dist(values: &[f64], probs: &[f64]) -> DiscreteDistribution {
        DiscreteDistribution::new(values.to_vec(), probs.to_vec()).unwrap()
    }

    fn two_point() -> DiscreteDistribution {
        dist(&[1.0, 3.0], &[0.5, 0.5])
    }

    #[test]
    fn sigma_entries() {
        let s = sigma_matrix(&two_point());
        assert!((s.entry(0, 0) - 0.5).abs() < 1e-15);
        assert!((s.entry(1, 1) - 0.5).abs() < 1e-15);
        assert!((s.entry(0, 1) + 0.5).abs() < 1e-15);
        assert!((s.entry(1, 0) + 0.5).abs() < 1e-15);

        let s = sigma_matrix(&dist(&[9.0], &[1.0]));
        assert_eq!(s.entry(0, 0), 0.0);

        let s = sigma_matrix(&dist(&[1.0, 2.0], &[0.2, 0.8]));
        assert!((s.entry(0, 0) - 0.8).abs() < 1e-15);
        assert!((s.entry(1, 1) - 0.2).abs() < 1e-15);
        assert!((s.entry(0, 1) + 0.4).abs() < 1e-15);
    }

    #[test]
    fn sigma_annihilates_sqrt_p() {
        let d = dist(&[1.0, 2.0, 7.0, 20.0], &[0.1, 0.4, 0.3, 0.2]);
        let s = sigma_matrix(&d);
        let sqrt_p: Vec<f64> = d.probs().iter().map(|p| p.sqrt()).collect();
        for y in s.mul_vec(&sqrt_p) {
            assert!(y.abs() < 1e-14);
        }
    }

    #[test]
    fn sigma_positive_semidefinite_on_random_vectors() {
        let d = dist(&[1.0, 2.0, 7.0, 20.0], &[0.1, 0.4, 0.3, 0.2]);
        let s = sigma_matrix(&d);
        let mut stream = crate::stream::RngStream::new(11);
        for _ in 0..200 {
            let v: Vec<f64> = (0..4).map(|_| stream.next_f64() * 2.0 - 1.0).collect();
            assert!(s.quadratic_form(&v) >= -1e-12);
        }
    }

    #[test]
    fn score_set_two_point_hand_values() {
        let s = score_set(&two_point()).unwrap();
        let r = 0.5f64.sqrt();
        assert!((s.c[0] - r / 3.0).abs() < 1e-15);
        assert_eq!(s.c[1], 0.0);
        assert!((s.gamma1[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((s.gamma2[0] - 1.0 / 9.0).abs() < 1e-15);
        assert!((s.zeta[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!(s.h_corrected[0].abs() < 1e-15);
        assert!((s.h_corrected[1] - r / 3.0).abs() < 1e-15);
        assert!((s.h_literal[0] - 10.0 * r / 3.0).abs() < 1e-14);
        assert!((s.h_literal[1] - r / 3.0).abs() < 1e-15);
    }

    #[test]
    fn score_set_sparsity() {
        let d = dist(&[1.0, 2.0, 7.0, 20.0], &[0.1, 0.4, 0.3, 0.2]);
        let s = score_set(&d).unwrap();
        let sqrt_p: Vec<f64> = d.probs().iter().map(|p| p.sqrt()).collect();
        assert_eq!(s.c[3], 0.0);
        for (j, cut) in (1..d.len()).enumerate() {
            for h in 0..d.len() {
                if h < cut {
                    assert_eq!(s.d2[j][h], 0.0);
                    assert!((s.e[j][h] + sqrt_p[h]).abs() < 1e-15);
                    assert!((s.d1[j][h] - d.values()[h] * sqrt_p[h]).abs() < 1e-15);
                } else {
                    assert_eq!(s.d1[j][h], 0.0);
                    assert_eq!(s.e[j][h], 0.0);
                    assert!((s.d2[j][h] + d.values()[h] * sqrt_p[h]).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn score_set_recombines_into_h() {
        // -H = C + sum_j (gamma1 D1 + gamma2 D2 + kappa E) for both modes
        let d = dist(&[1.0, 2.0, 7.0, 20.0], &[0.1, 0.4, 0.3, 0.2]);
        let s = score_set(&d).unwrap();
        let m = d.len();
        for h in 0..m {
            let mut lit = s.c[h];
            let mut cor = s.c[h];
            for j in 0..m - 1 {
                let pstar = d.cumulative_prob(j + 1);
                lit += s.gamma1[j] * s.d1[j][h]
                    + s.gamma2[j] * s.d2[j][h]
                    + s.e[j][h] / (pstar * pstar);
                cor += s.gamma1[j] * s.d1[j][h]
                    + s.gamma2[j] * s.d2[j][h]
                    + s.zeta[j] * s.e[j][h];
            }
            assert!((s.h_literal[h] + lit).abs() < 1e-12);
            assert!((s.h_corrected[h] + cor).abs() < 1e-12);
        }
    }

    #[test]
    fn variance_two_point() {
        assert!((asymptotic_variance(&two_point(), HMode::Corrected) - 1.0 / 36.0).abs() < 1e-15);
        assert!((asymptotic_variance(&two_point(), HMode::Literal) - 2.25).abs() < 1e-12);
        assert_eq!(
            asymptotic_variance(&dist(&[5.0], &[1.0]), HMode::Corrected),
            0.0
        );
    }

    #[test]
    fn variance_scale_invariant() {
        let d1 = dist(&[1.0, 2.0, 7.0], &[0.2, 0.5, 0.3]);
        for c in [0.5, 3.0, 1e6] {
            let scaled: Vec<f64> = d1.values().iter().map(|x| c * x).collect();
            let d2 = dist(&scaled, d1.probs());
            for mode in [HMode::Corrected, HMode::Literal] {
                let a = asymptotic_variance(&d1, mode);
                let b = asymptotic_variance(&d2, mode);
                assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "c={c}");
            }
        }
    }

    #[test]
    fn delta_variance_two_point() {
        let v = delta_variance(&two_point(), 1e-6).unwrap();
        assert!((v - 1.0 / 36.0).abs() < 1e-9);
    }

    #[test]
    fn delta_variance_single_atom_is_zero() {
        assert_eq!(delta_variance(&dist(&[5.0], &[1.0]), 1e-6).unwrap(), 0.0);
    }

    #[test]
    fn delta_variance_rejects_bad_step() {
        assert!(delta_variance(&two_point(), 0.0).is_err());
        assert!(delta_variance(&two_point(), 2e-3).is_err());
    }

    #[test]
    fn delta_matches_corrected_on_uniform_three_point() {
        let p = 1.0 / 3.0;
        let d = dist(&[1.0, 2.0, 3.0], &[p, p, p]);
        let analytic = asymptotic_variance(&d, HMode::Corrected);
        // hand-derived via the closed-form gradient at the uniform point
        let frozen = 9919.0 / 135000.0;
        assert!((analytic - frozen).abs() < 1e-12 * frozen);
        let fd = delta_variance(&d, 1e-6).unwrap();
        assert!(((fd - analytic) / analytic).abs() < 1e-6);
    }

    #[test]
    fn h_corrected_matches_assembled_proof_limits() {
        // <H, z> must equal minus the sum of the three term-wise limits
        // (lower/upper sum expansion, cumulative-mass expansion with the
        // zeta weighting, and the cut-mass expansion) for arbitrary z.
        let d = dist(&[1.0, 2.0, 7.0, 20.0], &[0.1, 0.4, 0.3, 0.2]);
        let s = score_set(&d).unwrap();
        let m = d.len();
        let values = d.values();
        let probs = d.probs();
        let sqrt_p: Vec<f64> = probs.iter().map(|p| p.sqrt()).collect();
        let mut stream = crate::stream::RngStream::new(5);
        for _ in 0..25 {
            let z: Vec<f64> = (0..m).map(|_| stream.next_f64() * 4.0 - 2.0).collect();
            let mut a1 = 0.0;
            let mut a2 = 0.0;
            let mut a3 = 0.0;
            for cut in 1..m {
                let (mu_lo, mu_up) = d.partial_means(cut).unwrap();
                let pstar = d.cumulative_prob(cut);
                let tail = 1.0 - pstar;
                let p_cut = probs[cut - 1];
                let low_sum: f64 = (0..cut).map(|h| values[h] * sqrt_p[h] * z[h]).sum();
                let up_sum: f64 = (cut..m).map(|h| values[h] * sqrt_p[h] * z[h]).sum();
                let e_sum: f64 = (0..cut).map(|h| sqrt_p[h] * z[h]).sum();
                a1 += p_cut * (tail / pstar)
                    * (low_sum / mu_up - mu_lo * up_sum / (mu_up * mu_up));
                a2 -= p_cut * mu_lo / (pstar * pstar * mu_up) * e_sum;
                a3 += sqrt_p[cut - 1] * (1.0 / pstar - 1.0) * (mu_lo / mu_up) * z[cut - 1];
            }
            let h_dot: f64 = s.h_corrected.iter().zip(&z).map(|(h, zi)| h * zi).sum();
            assert!((h_dot + (a1 + a2 + a3)).abs() < 1e-12);
        }
    }

    #[test]
    fn confidence_interval_two_point_counts() {
        let counts = CountVector::new(vec![1, 1]).unwrap();
        let r = confidence_interval(&counts, &[1.0, 3.0], 0.95).unwrap();
        assert!((r.index - 5.0 / 6.0).abs() < 1e-15);
        assert!((r.sigma2_corrected - 1.0 / 36.0).abs() < 1e-12);
        let q = normal::quantile(0.975).unwrap();
        let half = q * (1.0f64 / 36.0 / 2.0).sqrt();
        assert!((r.ci_low - (5.0 / 6.0 - half)).abs() < 1e-10);
        // the upper end would exceed 1 and is clamped
        assert_eq!(r.ci_high, 1.0);
        assert!(r.ci_low <= r.index && r.index <= r.ci_high);
    }

    #[test]
    fn confidence_interval_shrinks_with_level_and_n() {
        let counts = CountVector::new(vec![5, 5]).unwrap();
        let wide = confidence_interval(&counts, &[1.0, 3.0], 0.99).unwrap();
        let narrow = confidence_interval(&counts, &[1.0, 3.0], 0.01).unwrap();
        assert!(narrow.ci_high - narrow.ci_low < wide.ci_high - wide.ci_low);
        assert!(narrow.ci_high - narrow.ci_low < 1e-2);

        let big = CountVector::new(vec![500, 500]).unwrap();
        let tighter = confidence_interval(&big, &[1.0, 3.0], 0.99).unwrap();
        let ratio = (wide.ci_high - wide.ci_low) / (tighter.ci_high - tighter.ci_low);
        assert!((ratio - 10.0).abs() < 1e-6); // sqrt(1000/10)
    }

    #[test]
    fn confidence_interval_degenerate_sample() {
        let counts = CountVector::new(vec![4, 0]).unwrap();
        let r = confidence_interval(&counts, &[1.0, 3.0], 0.95).unwrap();
        assert_eq!(r.ci_low, r.index);
        assert_eq!(r.ci_high, r.index);
        assert_eq!(r.sigma2_corrected, 0.0);
    }

    #[test]
    fn confidence_interval_rejects_bad_level() {
        let counts = CountVector::new(vec![1, 1]).unwrap();
        assert!(confidence_interval(&counts, &[1.0, 3.0], 0.0).is_err());
        assert!(confidence_interval(&counts, &[1.0, 3.0], 1.0).is_err());
    }
}
