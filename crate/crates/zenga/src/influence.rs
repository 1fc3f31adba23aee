//! Influence function of the discrete Zenga index.
//!
//! The analytic form evaluates, at a support point `x_k`,
//!
//! ```text
//! IF(x_k) = sum_j p_j [ R1_j / (R2_j^2 (1 - F_j)) * x_k * [k > j]
//!                       - x_k / (R2_j F_j)        * [k <= j] ]
//!         + sum_j p_j [ R1_j / (R2_j F_j)         * [k <= j]
//!                       - R1_j / (R2_j (1 - F_j)) * [k > j] ]
//!         - R1_k / R2_k * [k <= m-1]
//!         + sum_j p_j R1_j / R2_j
//! ```
//!
//! with `R1_j, R2_j` the conditional means below-or-at and above `x_j`,
//! `F_j` the cdf there, and the sums running over the cuts `j = 1..m-1`
//! (the largest point is outside the integration domain, so its Dirac term
//! is absent). The formula is exactly mean-zero under the law, and
//! `E[IF^2]` reproduces the corrected asymptotic variance.
//!
//! [`numeric_influence`] implements the defining contamination limit
//! `(Z((1-eps) P + eps delta_x) - Z(P)) / eps` directly and serves as an
//! independent oracle for the analytic form.

use serde::{Deserialize, Serialize};

use crate::distribution::DiscreteDistribution;
use crate::error::{Error, Result};
use crate::zenga_population;

/// Influence values at every support point plus their second moment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfluencePoint {
    pub value: f64,
    pub influence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfluenceProfile {
    pub points: Vec<InfluencePoint>,
    /// `sum_k p_k IF(x_k)^2`, the plug-in asymptotic variance.
    pub if_variance: f64,
}

/// Per-cut quantities shared by all evaluation points.
struct CutTable {
    weight: Vec<f64>,
    f: Vec<f64>,
    r1: Vec<f64>,
    r2: Vec<f64>,
    /// `sum_j p_j R1_j / R2_j`
    ratio_mean: f64,
}

fn cut_table(dist: &DiscreteDistribution) -> CutTable {
    let m = dist.len();
    let probs = dist.probs();
    let mut weight = Vec::with_capacity(m - 1);
    let mut f = Vec::with_capacity(m - 1);
    let mut r1 = Vec::with_capacity(m - 1);
    let mut r2 = Vec::with_capacity(m - 1);
    let mut ratio_mean = 0.0;
    for cut in 1..m {
        let (mu_lo, mu_up) = dist.partial_means(cut).expect("cut in range");
        let pstar = dist.cumulative_prob(cut);
        let a = mu_lo / pstar;
        let b = mu_up / (1.0 - pstar);
        weight.push(probs[cut - 1]);
        f.push(pstar);
        r1.push(a);
        r2.push(b);
        ratio_mean += probs[cut - 1] * a / b;
    }
    CutTable {
        weight,
        f,
        r1,
        r2,
        ratio_mean,
    }
}

fn influence_at(dist: &DiscreteDistribution, table: &CutTable, point: usize) -> f64 {
    let m = dist.len();
    let x_k = dist.values()[point];
    let mut acc = table.ratio_mean;
    if point < m - 1 {
        acc -= table.r1[point] / table.r2[point];
    }
    for j in 0..m - 1 {
        let (w, f, r1, r2) = (table.weight[j], table.f[j], table.r1[j], table.r2[j]);
        if point <= j {
            // x_k in the poorer group of this cut
            acc += w * (-x_k / (r2 * f) + r1 / (r2 * f));
        } else {
            acc += w * (r1 * x_k / (r2 * r2 * (1.0 - f)) - r1 / (r2 * (1.0 - f)));
        }
    }
    acc
}

/// Analytic influence value at support point `point` (0-based). Zero for a
/// single-atom law, where the index is constant.
pub fn influence_function(dist: &DiscreteDistribution, point: usize) -> f64 {
    assert!(point < dist.len(), "support index out of range");
    if dist.len() < 2 {
        return 0.0;
    }
    influence_at(dist, &cut_table(dist), point)
}

/// Influence values at every support point and their p-weighted second
/// moment.
pub fn influence_profile(dist: &DiscreteDistribution) -> InfluenceProfile {
    let m = dist.len();
    if m < 2 {
        return InfluenceProfile {
            points: vec![InfluencePoint {
                value: dist.values()[0],
                influence: 0.0,
            }],
            if_variance: 0.0,
        };
    }
    let table = cut_table(dist);
    let mut points = Vec::with_capacity(m);
    let mut variance = 0.0;
    for k in 0..m {
        let v = influence_at(dist, &table, k);
        variance += dist.probs()[k] * v * v;
        points.push(InfluencePoint {
            value: dist.values()[k],
            influence: v,
        });
    }
    InfluenceProfile {
        points,
        if_variance: variance,
    }
}

/// Contamination difference quotient at the support point with index
/// `point`: `(Z((1-eps) P + eps delta_x) - Z(P)) / eps`.
pub fn numeric_influence(dist: &DiscreteDistribution, point: usize, eps: f64) -> Result<f64> {
    assert!(point < dist.len(), "support index out of range");
    numeric_influence_at(dist, dist.values()[point], eps)
}

/// Contamination difference quotient at an arbitrary location `x >= 0`; the
/// point is inserted into the support when it is not already there.
pub fn numeric_influence_at(dist: &DiscreteDistribution, x: f64, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps <= 1e-3) {
        return Err(Error::InvalidArgument(format!(
            "contamination mass must lie in (0, 1e-3], got {eps}"
        )));
    }
    if !(x.is_finite() && x >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "contamination point must be finite and non-negative, got {x}"
        )));
    }
    let base = zenga_population(dist).index;
    let mut values = Vec::with_capacity(dist.len() + 1);
    let mut probs = Vec::with_capacity(dist.len() + 1);
    let mut inserted = false;
    for (&v, &p) in dist.values().iter().zip(dist.probs()) {
        if !inserted && x < v {
            values.push(x);
            probs.push(eps);
            inserted = true;
        }
        if x == v {
            values.push(v);
            probs.push((1.0 - eps) * p + eps);
            inserted = true;
        } else {
            values.push(v);
            probs.push((1.0 - eps) * p);
        }
    }
    if !inserted {
        values.push(x);
        probs.push(eps);
    }
    let contaminated = DiscreteDistribution::new(values, probs)?;
    Ok((zenga_population(&contaminated).index - base) / eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::{asymptotic_variance, delta_variance, HMode};
    use crate::stream::RngStream;

    fn dist(values: &[f64], probs: &[f64]) -> DiscreteDistribution {
        DiscreteDistribution::new(values.to_vec(), probs.to_vec()).unwrap()
    }

    fn two_point() -> DiscreteDistribution {
        dist(&[1.0, 3.0], &[0.5, 0.5])
    }

    fn uniform3() -> DiscreteDistribution {
        let p = 1.0 / 3.0;
        dist(&[1.0, 2.0, 3.0], &[p, p, p])
    }

    #[test]
    fn two_point_hand_values() {
        assert!((influence_function(&two_point(), 0) + 1.0 / 6.0).abs() < 1e-15);
        assert!((influence_function(&two_point(), 1) - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn three_point_hand_values() {
        // hand-evaluated: (-1/60, -97/300, 17/50)
        let d = uniform3();
        assert!((influence_function(&d, 0) + 1.0 / 60.0).abs() < 1e-14);
        assert!((influence_function(&d, 1) + 97.0 / 300.0).abs() < 1e-14);
        assert!((influence_function(&d, 2) - 17.0 / 50.0).abs() < 1e-14);
    }

    #[test]
    fn profile_two_point() {
        let p = influence_profile(&two_point());
        assert!((p.points[0].influence + 1.0 / 6.0).abs() < 1e-15);
        assert!((p.points[1].influence - 1.0 / 6.0).abs() < 1e-15);
        assert!((p.if_variance - 1.0 / 36.0).abs() < 1e-15);
    }

    #[test]
    fn profile_single_atom() {
        let p = influence_profile(&dist(&[4.0], &[1.0]));
        assert_eq!(p.points.len(), 1);
        assert_eq!(p.points[0].influence, 0.0);
        assert_eq!(p.if_variance, 0.0);
    }

    #[test]
    fn mean_zero_on_random_laws() {
        let mut stream = RngStream::new(99);
        for _ in 0..50 {
            let d = random_dist(&mut stream);
            let mean: f64 = d
                .probs()
                .iter()
                .enumerate()
                .map(|(k, p)| p * influence_function(&d, k))
                .sum();
            assert!(mean.abs() < 1e-12, "mean {mean}");
        }
    }

    #[test]
    fn variance_routes_agree() {
        let mut stream = RngStream::new(123);
        for _ in 0..30 {
            let d = random_dist(&mut stream);
            let v_if = influence_profile(&d).if_variance;
            let v_h = asymptotic_variance(&d, HMode::Corrected);
            let v_fd = delta_variance(&d, 1e-6).unwrap();
            assert!(((v_if - v_h) / v_h).abs() < 1e-6, "if={v_if} h={v_h}");
            assert!(((v_fd - v_h) / v_h).abs() < 1e-4, "fd={v_fd} h={v_h}");
        }
    }

    #[test]
    fn numeric_oracle_two_point() {
        let d = two_point();
        let n0 = numeric_influence(&d, 0, 1e-6).unwrap();
        let n1 = numeric_influence(&d, 1, 1e-6).unwrap();
        assert!((n0 + 1.0 / 6.0).abs() < 1e-5);
        assert!((n1 - 1.0 / 6.0).abs() < 1e-5);
    }

    #[test]
    fn numeric_oracle_first_order_convergence() {
        let d = uniform3();
        for k in 0..3 {
            let analytic = influence_function(&d, k);
            let e1 = (numeric_influence(&d, k, 1e-3).unwrap() - analytic).abs();
            let e2 = (numeric_influence(&d, k, 5e-4).unwrap() - analytic).abs();
            let e4 = (numeric_influence(&d, k, 2.5e-4).unwrap() - analytic).abs();
            assert!(e2 / e1 > 0.3 && e2 / e1 < 0.7, "k={k}: {e1} {e2}");
            assert!(e4 / e2 > 0.3 && e4 / e2 < 0.7, "k={k}: {e2} {e4}");
        }
    }

    #[test]
    fn numeric_oracle_off_support_insertion() {
        let d = two_point();
        // inserting a new point changes the support; the quotient stays finite
        let v = numeric_influence_at(&d, 2.0, 1e-6).unwrap();
        assert!(v.is_finite());
        // contamination at a point above the maximum extends the support
        let v = numeric_influence_at(&d, 10.0, 1e-6).unwrap();
        assert!(v.is_finite());
    }

    #[test]
    fn numeric_oracle_rejects_bad_eps() {
        let d = two_point();
        assert!(numeric_influence(&d, 0, 0.0).is_err());
        assert!(numeric_influence(&d, 0, 1e-2).is_err());
    }

    #[test]
    fn scale_invariance() {
        let d1 = dist(&[1.0, 2.0, 7.0], &[0.2, 0.5, 0.3]);
        for c in [0.5, 3.0, 1e6] {
            let scaled: Vec<f64> = d1.values().iter().map(|x| c * x).collect();
            let d2 = dist(&scaled, d1.probs());
            for k in 0..3 {
                let a = influence_function(&d1, k);
                let b = influence_function(&d2, k);
                assert!((a - b).abs() < 1e-12, "c={c} k={k}");
            }
        }
    }

    fn random_dist(stream: &mut RngStream) -> DiscreteDistribution {
        let m = 2 + (stream.next_u64() % 11) as usize;
        let mut values = Vec::with_capacity(m);
        let mut acc = 0.1 + stream.next_f64();
        for _ in 0..m {
            values.push(acc);
            acc += 0.05 + stream.next_f64() * 5.0;
        }
        let raw: Vec<f64> = (0..m).map(|_| -(1.0 - stream.next_f64()).ln()).collect();
        let sum: f64 = raw.iter().sum();
        let probs: Vec<f64> = raw.iter().map(|e| e / sum).collect();
        DiscreteDistribution::new(values, probs).unwrap()
    }
}
