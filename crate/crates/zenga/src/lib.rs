//! Inequality measurement on finite discrete income data.
//!
//! This crate computes the discrete Zenga inequality index on aggregated
//! (frequency-table) income data, together with everything needed to do
//! inference on it:
//!
//! - [`distribution`]: discrete laws, observed counts, frequency tables and
//!   the representative-point reduction of grouped data;
//! - [`indices`]: the Zenga index (population and plug-in forms, with its
//!   per-cut decomposition) and the Gini index for comparisons;
//! - [`asymptotics`]: the limit variance of `sqrt(n) (Z_n - Z)` through a
//!   multinomial score representation, a finite-difference delta-method
//!   oracle, and normal confidence intervals;
//! - [`influence`]: the analytic influence function, its variance, and a
//!   direct contamination oracle;
//! - [`montecarlo`]: a reproducible simulation harness (bias, RMSE,
//!   normality diagnostics, interval coverage) that parallelizes over
//!   replicates when the `parallel` feature is on (default) and falls back
//!   to a sequential loop otherwise, with bitwise-identical output;
//! - [`io`]: the file formats of the command-line tool.
//!
//! ```
//! use zenga::{DiscreteDistribution, zenga_population, gini_population};
//!
//! let law = DiscreteDistribution::new(vec![1.0, 3.0], vec![0.5, 0.5]).unwrap();
//! let z = zenga_population(&law);
//! assert!((z.index - 5.0 / 6.0).abs() < 1e-12);
//! assert!((gini_population(&law) - 0.25).abs() < 1e-12);
//! ```

pub mod asymptotics;
pub mod distribution;
pub mod error;
pub mod indices;
pub mod influence;
pub mod io;
pub mod montecarlo;
pub mod normal;
pub mod stream;

pub use asymptotics::{
    asymptotic_variance, confidence_interval, delta_variance, score_set, sigma_matrix,
    AsymptoticReport, CovarianceSigma, HMode, ScoreSet,
};
pub use distribution::{
    empirical_distribution, from_frequency_table, CountVector, DiscreteDistribution,
    FrequencyRow, FrequencyTable, RepresentativeRule,
};
pub use error::{Error, Result};
pub use indices::{
    gini_empirical, gini_population, zenga_empirical, zenga_population, ZengaDecomposition,
    ZengaTerm,
};
pub use influence::{
    influence_function, influence_profile, numeric_influence, numeric_influence_at,
    InfluencePoint, InfluenceProfile,
};
pub use io::{parse_dist_spec, parse_frequency_csv, write_report, DistSpec, Report, ReportFormat};
pub use montecarlo::{
    run_study, run_study_sequential, sample_counts, standardize, StudyConfig, StudyReport,
};
pub use stream::RngStream;
