//! Finite discrete income laws and observed count data.
//!
//! A [`DiscreteDistribution`] carries the ordered support `x_1 < ... < x_m`
//! with positive masses summing to one, plus the derived quantities every
//! other module consumes: cumulative masses, partial (unnormalized) means
//! below/above a cut, truncated (conditional) means, and the step cdf.
//! [`CountVector`] is the observed side: per-point counts with frequency and
//! cumulative accessors. [`FrequencyTable`] is grouped data as published,
//! reduced to `(support, counts)` through a representative-point rule.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance on `sum(probs) - 1`; inputs inside it are renormalized,
/// anything farther off is rejected.
pub const PROB_SUM_TOLERANCE: f64 = 1e-12;

/// An ordered finite support with strictly positive masses summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    values: Vec<f64>,
    probs: Vec<f64>,
    /// cumulative masses p_j* for j = 1..m; last entry pinned to exactly 1
    cum_probs: Vec<f64>,
    /// prefix sums of p_h * x_h
    cum_weighted: Vec<f64>,
    /// suffix sums of p_h * x_h (index j holds the sum over h >= j)
    tail_weighted: Vec<f64>,
    mean: f64,
}

impl DiscreteDistribution {
    pub fn new(values: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        if values.len() != probs.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} values but {} probabilities",
                values.len(),
                probs.len()
            )));
        }
        for (i, w) in values.windows(2).enumerate() {
            if !(w[0] < w[1]) {
                return Err(Error::InvalidDistribution(format!(
                    "support not strictly increasing at position {} ({} then {})",
                    i + 1,
                    w[0],
                    w[1]
                )));
            }
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidDistribution(
                "support values must be finite and non-negative".into(),
            ));
        }
        let last = *values.last().expect("non-empty");
        if !(last > 0.0) {
            return Err(Error::InvalidDistribution(
                "largest support value must be positive".into(),
            ));
        }
        if probs.iter().any(|p| !p.is_finite() || *p <= 0.0) {
            return Err(Error::InvalidDistribution(
                "all probabilities must be finite and positive".into(),
            ));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > PROB_SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {sum}, outside tolerance {PROB_SUM_TOLERANCE}"
            )));
        }
        let probs: Vec<f64> = probs.iter().map(|p| p / sum).collect();
        Ok(Self::assemble(values, probs))
    }

    /// Builds without validating the invariants. Useful for exercising the
    /// formulas on degenerate inputs (equal values, zero masses) in tests.
    pub fn new_unchecked(values: Vec<f64>, probs: Vec<f64>) -> Self {
        Self::assemble(values, probs)
    }

    fn assemble(values: Vec<f64>, probs: Vec<f64>) -> Self {
        let m = values.len();
        let mut cum_probs = Vec::with_capacity(m);
        let mut cum_weighted = Vec::with_capacity(m);
        let mut acc_p = 0.0;
        let mut acc_px = 0.0;
        for (x, p) in values.iter().zip(&probs) {
            acc_p += p;
            acc_px += p * x;
            cum_probs.push(acc_p);
            cum_weighted.push(acc_px);
        }
        // p_m* = 1 by definition; pinning it keeps sampling and tail sums exact
        cum_probs[m - 1] = 1.0;
        let mut tail_weighted = vec![0.0; m + 1];
        for h in (0..m).rev() {
            tail_weighted[h] = tail_weighted[h + 1] + probs[h] * values[h];
        }
        let mean = cum_weighted[m - 1];
        Self {
            values,
            probs,
            cum_probs,
            cum_weighted,
            tail_weighted,
            mean,
        }
    }

    /// Number of support points m.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Cumulative mass p_j* = sum of the first `cut` masses, `cut` in 1..=m.
    pub fn cumulative_prob(&self, cut: usize) -> f64 {
        self.cum_probs[cut - 1]
    }

    /// Cumulative masses p_1*, ..., p_m* (the last pinned to 1).
    pub fn cumulative_probs(&self) -> &[f64] {
        &self.cum_probs
    }

    /// Unnormalized partial means around a cut: the first `cut` points versus
    /// the rest. Returns `(lower, upper)` with `lower + upper = mean`;
    /// `cut` must lie in 1..=m-1.
    pub fn partial_means(&self, cut: usize) -> Result<(f64, f64)> {
        let m = self.len();
        if cut == 0 || cut >= m {
            return Err(Error::InvalidArgument(format!(
                "cut must be in 1..={}, got {cut}",
                m - 1
            )));
        }
        Ok((self.cum_weighted[cut - 1], self.tail_weighted[cut]))
    }

    /// Right-continuous step cdf.
    pub fn cdf(&self, s: f64) -> f64 {
        let idx = self.values.partition_point(|&x| x <= s);
        if idx == 0 {
            0.0
        } else {
            self.cum_probs[idx - 1]
        }
    }

    /// Conditional means below-or-at and strictly above `s`:
    /// `(R1, R2) = (E[X | X <= s], E[X | X > s])`. Requires
    /// `x_1 <= s < x_m` so neither conditioning event is empty.
    pub fn truncated_means(&self, s: f64) -> Result<(f64, f64)> {
        let m = self.len();
        if s < self.values[0] {
            return Err(Error::InvalidArgument(format!(
                "threshold {s} below the smallest support value {}",
                self.values[0]
            )));
        }
        if s >= self.values[m - 1] {
            return Err(Error::InvalidArgument(format!(
                "threshold {s} at or above the largest support value {}; upper mean undefined",
                self.values[m - 1]
            )));
        }
        let cut = self.values.partition_point(|&x| x <= s); // in 1..=m-1
        let f = self.cum_probs[cut - 1];
        let r1 = self.cum_weighted[cut - 1] / f;
        let r2 = self.tail_weighted[cut] / (1.0 - f);
        Ok((r1, r2))
    }
}

/// Observed per-support-point counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountVector {
    counts: Vec<u64>,
    n: u64,
}

impl CountVector {
    pub fn new(counts: Vec<u64>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::InvalidCounts("empty count vector".into()));
        }
        let n: u64 = counts.iter().sum();
        if n == 0 {
            return Err(Error::InvalidCounts("all counts are zero".into()));
        }
        Ok(Self { counts, n })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Total sample size n.
    pub fn total(&self) -> u64 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Relative frequencies f_j = n_j / n.
    pub fn frequencies(&self) -> Vec<f64> {
        self.counts
            .iter()
            .map(|&c| c as f64 / self.n as f64)
            .collect()
    }

    /// Cumulative counts n_j*.
    pub fn cumulative_counts(&self) -> Vec<u64> {
        self.counts
            .iter()
            .scan(0u64, |acc, &c| {
                *acc += c;
                Some(*acc)
            })
            .collect()
    }

    /// Cumulative frequencies f_j*.
    pub fn cumulative_frequencies(&self) -> Vec<f64> {
        self.cumulative_counts()
            .iter()
            .map(|&c| c as f64 / self.n as f64)
            .collect()
    }

    /// Empirical cdf F_n over the given aligned support.
    pub fn empirical_cdf(&self, support: &[f64], s: f64) -> f64 {
        let hits: u64 = support
            .iter()
            .zip(&self.counts)
            .filter(|(x, _)| **x <= s)
            .map(|(_, c)| *c)
            .sum();
        hits as f64 / self.n as f64
    }
}

/// Distribution of the observed sample: masses f_j = n_j / n on the points
/// actually seen (zero-count points are dropped).
pub fn empirical_distribution(
    counts: &CountVector,
    support: &[f64],
) -> Result<DiscreteDistribution> {
    if counts.len() != support.len() {
        return Err(Error::InvalidCounts(format!(
            "{} counts but {} support points",
            counts.len(),
            support.len()
        )));
    }
    let n = counts.total() as f64;
    let mut values = Vec::new();
    let mut probs = Vec::new();
    for (&x, &c) in support.iter().zip(counts.counts()) {
        if c > 0 {
            values.push(x);
            probs.push(c as f64 / n);
        }
    }
    DiscreteDistribution::new(values, probs)
}

/// One grouped-data class `(lower, upper]` with its count and an optional
/// published representative point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyRow {
    pub lower: f64,
    pub upper: f64,
    pub count: u64,
    pub representative: Option<f64>,
}

/// Grouped income data: increasing, non-overlapping classes with counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyTable {
    rows: Vec<FrequencyRow>,
}

impl FrequencyTable {
    pub fn new(rows: Vec<FrequencyRow>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidTable("no rows".into()));
        }
        for (i, row) in rows.iter().enumerate() {
            if !row.lower.is_finite() || !row.upper.is_finite() {
                return Err(Error::InvalidTable(format!(
                    "row {}: non-finite class bound",
                    i + 1
                )));
            }
            if !(row.lower < row.upper) {
                return Err(Error::InvalidTable(format!(
                    "row {}: class lower bound {} not below upper bound {}",
                    i + 1,
                    row.lower,
                    row.upper
                )));
            }
        }
        for (i, w) in rows.windows(2).enumerate() {
            if w[1].lower < w[0].upper {
                return Err(Error::InvalidTable(format!(
                    "rows {} and {}: classes ({}, {}] and ({}, {}] overlap or are out of order",
                    i + 1,
                    i + 2,
                    w[0].lower,
                    w[0].upper,
                    w[1].lower,
                    w[1].upper
                )));
            }
        }
        if rows.iter().all(|r| r.count == 0) {
            return Err(Error::InvalidTable("all counts are zero".into()));
        }
        Ok(Self { rows })
    }

    /// Table whose classes enclose the given points, with the points recorded
    /// in the representative column. Inverse of
    /// [`from_frequency_table`] under [`RepresentativeRule::Custom`].
    pub fn enclosing(support: &[f64], counts: &[u64]) -> Result<Self> {
        if support.len() != counts.len() || support.is_empty() {
            return Err(Error::InvalidTable(
                "support and counts must be non-empty and aligned".into(),
            ));
        }
        let m = support.len();
        let mut rows = Vec::with_capacity(m);
        for i in 0..m {
            let lower = if i == 0 {
                if support[0] > 0.0 {
                    0.0
                } else {
                    support[0] - 1.0
                }
            } else {
                (support[i - 1] + support[i]) / 2.0
            };
            let upper = if i == m - 1 {
                support[i] + (support[i] - lower)
            } else {
                (support[i] + support[i + 1]) / 2.0
            };
            rows.push(FrequencyRow {
                lower,
                upper,
                count: counts[i],
                representative: Some(support[i]),
            });
        }
        Self::new(rows)
    }

    pub fn rows(&self) -> &[FrequencyRow] {
        &self.rows
    }
}

/// How to pick the point standing for a class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RepresentativeRule {
    /// `(lower + upper) / 2`.
    Midpoint,
    /// The table's representative column (must be present in every kept row).
    Custom,
}

/// Reduces a frequency table to `(support, counts)`: one point per class via
/// the rule, zero-count classes dropped.
pub fn from_frequency_table(
    table: &FrequencyTable,
    rule: RepresentativeRule,
) -> Result<(Vec<f64>, CountVector)> {
    let mut support = Vec::new();
    let mut counts = Vec::new();
    for (i, row) in table.rows().iter().enumerate() {
        if row.count == 0 {
            continue;
        }
        let point = match rule {
            RepresentativeRule::Midpoint => (row.lower + row.upper) / 2.0,
            RepresentativeRule::Custom => row.representative.ok_or_else(|| {
                Error::InvalidTable(format!(
                    "row {}: representative column required by the custom rule",
                    i + 1
                ))
            })?,
        };
        if let Some(&prev) = support.last() {
            if !(point > prev) {
                return Err(Error::InvalidTable(format!(
                    "row {}: representative {point} not above the previous one {prev}",
                    i + 1
                )));
            }
        }
        support.push(point);
        counts.push(row.count);
    }
    if support.is_empty() {
        return Err(Error::InvalidTable("all counts are zero".into()));
    }
    Ok((support, CountVector::new(counts)?))
}
