//! Input parsing and report serialization.
//!
//! Two input formats exist: a frequency-table CSV with header
//! `class_lower,class_upper,count[,representative]`, and a distribution spec,
//! a small TOML document with `values`, `probs` and an optional `label`.
//! Reports serialize either as CSV (stable column order, 17 significant
//! digits so every float round-trips) or as TOML. Parsers reject malformed
//! input outright and name the offending line or field.

use serde::{Deserialize, Serialize};

use crate::asymptotics::AsymptoticReport;
use crate::distribution::{DiscreteDistribution, FrequencyRow, FrequencyTable};
use crate::error::{Error, Result};
use crate::indices::ZengaDecomposition;
use crate::influence::InfluenceProfile;
use crate::montecarlo::StudyReport;

/// A distribution as written in an input file; validation happens when it is
/// turned into a [`DiscreteDistribution`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub values: Vec<f64>,
    pub probs: Vec<f64>,
}

impl DistSpec {
    pub fn to_distribution(&self) -> Result<DiscreteDistribution> {
        DiscreteDistribution::new(self.values.clone(), self.probs.clone())
    }
}

/// Output encoding for [`write_report`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    /// TOML key-value rendering.
    StructuredText,
}

/// Render a float with 17 significant digits (lossless for f64).
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Anything the tool can emit: CSV rows plus a TOML rendering via serde.
pub trait Report: Serialize {
    fn to_csv(&self) -> String;
}

pub fn write_report<R: Report>(report: &R, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Csv => Ok(report.to_csv()),
        ReportFormat::StructuredText => toml::to_string(report)
            .map_err(|e| Error::InvalidArgument(format!("serialization failed: {e}"))),
    }
}

impl Report for DistSpec {
    fn to_csv(&self) -> String {
        let mut out = String::from("value,prob\n");
        for (v, p) in self.values.iter().zip(&self.probs) {
            out.push_str(&format!("{},{}\n", num(*v), num(*p)));
        }
        out
    }
}

impl Report for InfluenceProfile {
    fn to_csv(&self) -> String {
        let mut out = String::from("value,influence\n");
        for p in &self.points {
            out.push_str(&format!("{},{}\n", num(p.value), num(p.influence)));
        }
        out
    }
}

impl Report for StudyReport {
    fn to_csv(&self) -> String {
        let mut out =
            String::from("size,erm,mse,rmse,sd_scaled,sigma_analytic,ks,coverage\n");
        for row in &self.per_size {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                row.size,
                num(row.erm),
                num(row.mse),
                num(row.rmse),
                num(row.sd_scaled),
                num(row.sigma_analytic),
                num(row.ks_distance),
                num(row.coverage)
            ));
        }
        out
    }
}

impl Report for AsymptoticReport {
    fn to_csv(&self) -> String {
        format!(
            "index,n,sigma2_literal,sigma2_corrected,sigma2_delta,sigma2_if,ci_low,ci_high,level\n{},{},{},{},{},{},{},{},{}\n",
            num(self.index),
            self.n,
            num(self.sigma2_literal),
            num(self.sigma2_corrected),
            num(self.sigma2_delta),
            num(self.sigma2_if),
            num(self.ci_low),
            num(self.ci_high),
            num(self.level)
        )
    }
}

impl Report for ZengaDecomposition {
    fn to_csv(&self) -> String {
        let mut out = String::from("cut,weight,lower_mean,upper_mean,ratio,curve\n");
        for t in &self.terms {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                t.cut,
                num(t.weight),
                num(t.lower_mean),
                num(t.upper_mean),
                num(t.ratio),
                num(t.curve_point())
            ));
        }
        out
    }
}

impl Report for FrequencyTable {
    fn to_csv(&self) -> String {
        write_frequency_csv(self)
    }
}

/// QQ pairs of a study as `theoretical,empirical` rows.
pub fn write_qq_csv(report: &StudyReport) -> String {
    let mut out = String::from("theoretical,empirical\n");
    for (t, e) in &report.qq {
        out.push_str(&format!("{},{}\n", num(*t), num(*e)));
    }
    out
}

/// KDE curve of a study as `abscissa,density` rows.
pub fn write_kde_csv(report: &StudyReport) -> String {
    let mut out = String::from("abscissa,density\n");
    for (x, d) in &report.kde {
        out.push_str(&format!("{},{}\n", num(*x), num(*d)));
    }
    out
}

/// Frequency table in the exact format [`parse_frequency_csv`] reads; the
/// representative column appears when any row carries one.
pub fn write_frequency_csv(table: &FrequencyTable) -> String {
    let with_repr = table.rows().iter().any(|r| r.representative.is_some());
    let mut out = String::from(if with_repr {
        "class_lower,class_upper,count,representative\n"
    } else {
        "class_lower,class_upper,count\n"
    });
    for row in table.rows() {
        if with_repr {
            let repr = row.representative.map(num).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{}\n",
                num(row.lower),
                num(row.upper),
                row.count,
                repr
            ));
        } else {
            out.push_str(&format!(
                "{},{},{}\n",
                num(row.lower),
                num(row.upper),
                row.count
            ));
        }
    }
    out
}

fn parse_f64(field: &str, name: &str, line: usize) -> Result<f64> {
    let v: f64 = field.trim().parse().map_err(|_| Error::Parse {
        line,
        message: format!("field `{name}`: `{field}` is not a number"),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            line,
            message: format!("field `{name}`: `{field}` is not finite"),
        });
    }
    Ok(v)
}

/// Parses a frequency-table CSV. The header must be
/// `class_lower,class_upper,count` with an optional trailing
/// `representative` column; decimal points only, no thousands separators.
pub fn parse_frequency_csv(text: &str) -> Result<FrequencyTable> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "empty input".into(),
    })?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    let with_repr = match cols.as_slice() {
        ["class_lower", "class_upper", "count"] => false,
        ["class_lower", "class_upper", "count", "representative"] => true,
        _ => {
            return Err(Error::Parse {
                line: 1,
                message: format!(
                    "expected header `class_lower,class_upper,count[,representative]`, got `{header}`"
                ),
            })
        }
    };
    let expected = if with_repr { 4 } else { 3 };
    let mut rows = Vec::new();
    for (idx, raw) in lines {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split(',').collect();
        if fields.len() != expected {
            return Err(Error::Parse {
                line,
                message: format!("expected {expected} fields, got {}", fields.len()),
            });
        }
        let lower = parse_f64(fields[0], "class_lower", line)?;
        let upper = parse_f64(fields[1], "class_upper", line)?;
        let count: u64 = fields[2].trim().parse().map_err(|_| Error::Parse {
            line,
            message: format!(
                "field `count`: `{}` is not a non-negative integer",
                fields[2]
            ),
        })?;
        let representative = if with_repr {
            let f = fields[3].trim();
            if f.is_empty() {
                None
            } else {
                Some(parse_f64(f, "representative", line)?)
            }
        } else {
            None
        };
        rows.push(FrequencyRow {
            lower,
            upper,
            count,
            representative,
        });
    }
    FrequencyTable::new(rows)
}

/// Parses a distribution spec (TOML with `values`, `probs`, optional
/// `label`). Array lengths must match; everything else is validated at
/// construction time.
pub fn parse_dist_spec(text: &str) -> Result<DistSpec> {
    let spec: DistSpec = toml::from_str(text).map_err(|e| Error::Parse {
        line: 0,
        message: e.to_string().replace('\n', " "),
    })?;
    if spec.values.len() != spec.probs.len() {
        return Err(Error::Parse {
            line: 0,
            message: format!(
                "field `probs`: {} entries but `values` has {}",
                spec.probs.len(),
                spec.values.len()
            ),
        });
    }
    Ok(spec)
}

/// Serializes a spec in the format [`parse_dist_spec`] reads.
pub fn write_dist_spec(spec: &DistSpec) -> Result<String> {
    write_report(spec, ReportFormat::StructuredText)
}
