//! The discrete Zenga inequality index and the Gini index used for
//! comparisons.
//!
//! For a law with ordered support `x_1 < ... < x_m` and masses `p_j`, the
//! Zenga index is
//!
//! ```text
//! Z = 1 - sum_{j=1}^{m-1} p_j * (lower mean at j) / (upper mean at j)
//! ```
//!
//! where the lower mean averages income over the poorest group `{1..j}` and
//! the upper mean over the richer group `{j+1..m}`. The per-cut ratios are
//! kept in a [`ZengaDecomposition`] so callers can plot the pointwise curve
//! `1 - ratio_j`.

use serde::{Deserialize, Serialize};

use crate::distribution::{empirical_distribution, CountVector, DiscreteDistribution};
use crate::error::Result;

/// One cut of the Zenga sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZengaTerm {
    /// Number of support points in the poorer group (1..=m-1).
    pub cut: usize,
    /// Mass p_j at the cut point.
    pub weight: f64,
    /// Mean income of the poorer group.
    pub lower_mean: f64,
    /// Mean income of the richer group.
    pub upper_mean: f64,
    /// lower_mean / upper_mean, in [0, 1].
    pub ratio: f64,
}

impl ZengaTerm {
    /// Pointwise inequality curve value 1 - ratio.
    pub fn curve_point(&self) -> f64 {
        1.0 - self.ratio
    }
}

/// The Zenga index together with its per-cut terms (empty for m = 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZengaDecomposition {
    pub terms: Vec<ZengaTerm>,
    pub index: f64,
}

/// Zenga index of a population law.
pub fn zenga_population(dist: &DiscreteDistribution) -> ZengaDecomposition {
    let m = dist.len();
    let mut terms = Vec::with_capacity(m.saturating_sub(1));
    let mut acc = 0.0;
    for cut in 1..m {
        let (lo, up) = dist.partial_means(cut).expect("cut in range");
        let pstar = dist.cumulative_prob(cut);
        let lower_mean = lo / pstar;
        let upper_mean = up / (1.0 - pstar);
        let ratio = lower_mean / upper_mean;
        let weight = dist.probs()[cut - 1];
        acc += weight * ratio;
        terms.push(ZengaTerm {
            cut,
            weight,
            lower_mean,
            upper_mean,
            ratio,
        });
    }
    ZengaDecomposition {
        terms,
        index: 1.0 - acc,
    }
}

/// Zenga index of an observed sample, i.e. the population index of the
/// empirical law on the observed support (zero-count points dropped).
pub fn zenga_empirical(counts: &CountVector, support: &[f64]) -> Result<ZengaDecomposition> {
    let dist = empirical_distribution(counts, support)?;
    Ok(zenga_population(&dist))
}

/// Gini index by the pairwise-difference formula
/// `sum_{j,k} p_j p_k |x_j - x_k| / (2 mean)`.
pub fn gini_population(dist: &DiscreteDistribution) -> f64 {
    let values = dist.values();
    let probs = dist.probs();
    let mut acc = 0.0;
    for j in 0..values.len() {
        // support is ordered, so |x_j - x_k| needs only k > j (doubled)
        for k in (j + 1)..values.len() {
            acc += 2.0 * probs[j] * probs[k] * (values[k] - values[j]);
        }
    }
    acc / (2.0 * dist.mean())
}

/// Gini index of an observed sample (plug-in, no small-sample correction).
pub fn gini_empirical(counts: &CountVector, support: &[f64]) -> Result<f64> {
    let dist = empirical_distribution(counts, support)?;
    Ok(gini_population(&dist))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::CountVector;

    fn dist(values: &[f64], probs: &[f64]) -> DiscreteDistribution {
        DiscreteDistribution::new(values.to_vec(), probs.to_vec()).unwrap()
    }

    fn uniform3() -> DiscreteDistribution {
        let p = 1.0 / 3.0;
        dist(&[1.0, 2.0, 3.0], &[p, p, p])
    }

    #[test]
    fn zenga_two_point() {
        let z = zenga_population(&dist(&[1.0, 3.0], &[0.5, 0.5]));
        assert!((z.index - 5.0 / 6.0).abs() < 1e-15);
        assert_eq!(z.terms.len(), 1);
        assert!((z.terms[0].ratio - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(z.terms[0].weight, 0.5);
    }

    #[test]
    fn zenga_three_point_uniform() {
        let z = zenga_population(&uniform3());
        assert!((z.index - 0.7).abs() < 1e-12);
        // terms 0.4/3 and 0.5/3
        assert!((z.terms[0].weight * z.terms[0].ratio - 0.4 / 3.0).abs() < 1e-12);
        assert!((z.terms[1].weight * z.terms[1].ratio - 0.5 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn zenga_single_atom_is_one() {
        let z = zenga_population(&dist(&[7.0], &[1.0]));
        assert_eq!(z.index, 1.0);
        assert!(z.terms.is_empty());
    }

    #[test]
    fn zenga_scale_invariant_exactly() {
        let base = zenga_population(&dist(&[2.0, 6.0], &[0.5, 0.5]));
        let ref_z = zenga_population(&dist(&[1.0, 3.0], &[0.5, 0.5]));
        assert_eq!(base.index, ref_z.index);
        assert!((base.index - 5.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn zenga_bounds_and_ratio_range() {
        let d = dist(&[1.0, 2.0, 7.0, 20.0], &[0.1, 0.4, 0.3, 0.2]);
        let z = zenga_population(&d);
        let p_m = d.probs()[d.len() - 1];
        assert!(z.index >= p_m && z.index <= 1.0);
        for t in &z.terms {
            assert!((0.0..=1.0).contains(&t.ratio));
        }
    }

    #[test]
    fn zenga_degenerate_equal_values_gives_p_m() {
        // bypasses validation: all values equal makes every ratio exactly 1
        let d = DiscreteDistribution::new_unchecked(vec![4.0, 4.0, 4.0], vec![0.2, 0.3, 0.5]);
        let z = zenga_population(&d);
        for t in &z.terms {
            assert_eq!(t.ratio, 1.0);
        }
        assert!((z.index - 0.5).abs() < 1e-15);
    }

    #[test]
    fn zenga_empirical_examples() {
        let z = zenga_empirical(&CountVector::new(vec![1, 1]).unwrap(), &[1.0, 3.0]).unwrap();
        assert!((z.index - 5.0 / 6.0).abs() < 1e-15);

        let z = zenga_empirical(&CountVector::new(vec![3, 1]).unwrap(), &[1.0, 3.0]).unwrap();
        assert!((z.index - 0.75).abs() < 1e-15);

        // first point unobserved: cut at the old j=1 disappears with it
        let z =
            zenga_empirical(&CountVector::new(vec![0, 1, 1]).unwrap(), &[1.0, 2.0, 3.0]).unwrap();
        assert!((z.index - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn zenga_plug_in_consistency() {
        let d = dist(&[1.0, 2.0, 7.0, 20.0], &[0.1, 0.4, 0.3, 0.2]);
        let counts = CountVector::new(vec![10, 40, 30, 20]).unwrap();
        let z_emp = zenga_empirical(&counts, d.values()).unwrap();
        let z_pop = zenga_population(&d);
        assert!((z_emp.index - z_pop.index).abs() < 1e-12);
    }

    #[test]
    fn gini_examples() {
        assert!((gini_population(&dist(&[1.0, 3.0], &[0.5, 0.5])) - 0.25).abs() < 1e-15);
        assert_eq!(gini_population(&dist(&[5.0], &[1.0])), 0.0);
        assert!((gini_population(&uniform3()) - 2.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn gini_empirical_examples() {
        let g = gini_empirical(&CountVector::new(vec![1, 1]).unwrap(), &[1.0, 3.0]).unwrap();
        assert!((g - 0.25).abs() < 1e-15);
        let g = gini_empirical(&CountVector::new(vec![5, 5]).unwrap(), &[1.0, 3.0]).unwrap();
        assert!((g - 0.25).abs() < 1e-15);
        // degenerate sample collapses to one point
        let g = gini_empirical(&CountVector::new(vec![1, 0]).unwrap(), &[1.0, 3.0]).unwrap();
        assert_eq!(g, 0.0);
    }

    #[test]
    fn gini_scale_invariant() {
        let d1 = dist(&[1.0, 2.0, 7.0], &[0.2, 0.5, 0.3]);
        let d2 = dist(&[3.0, 6.0, 21.0], &[0.2, 0.5, 0.3]);
        assert!((gini_population(&d1) - gini_population(&d2)).abs() < 1e-14);
    }
}
