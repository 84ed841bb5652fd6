//! Tabular sweep reports: rows of measured quantities against envelope
//! shapes, serialized as CSV plus a JSON summary.

use serde::Serialize;
use std::fmt::Write as _;

/// Status of one sweep row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowFlag {
    Ok,
    /// A quadrature or evaluation failure; the row carries NaNs.
    Failed,
    /// Degenerate row (zero/zero ratio), excluded from statistics.
    Degenerate,
    /// Norm window truncation warning was raised while measuring.
    Truncated,
}

/// One measured-vs-envelope record.
#[derive(Debug, Clone)]
pub struct SweepRow {
    /// Values of the sweep parameters, aligned with `SweepReport::columns`.
    pub params: Vec<f64>,
    pub measured: f64,
    pub envelope: f64,
    pub flag: RowFlag,
}

impl SweepRow {
    pub fn ratio(&self) -> f64 {
        if self.envelope > 0.0 {
            self.measured / self.envelope
        } else {
            f64::NAN
        }
    }
}

/// A deterministic table of sweep results.
#[derive(Debug, Clone)]
pub struct SweepReport {
    pub estimate: String,
    /// Parameter column names (measured/envelope/ratio/flag are implicit).
    pub columns: Vec<String>,
    pub rows: Vec<SweepRow>,
    /// Metadata recorded with every report.
    pub profile_id: String,
    pub tolerances: Vec<(String, f64)>,
}

impl SweepReport {
    pub fn new(estimate: impl Into<String>, columns: &[&str], profile_id: impl Into<String>) -> Self {
        Self {
            estimate: estimate.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            profile_id: profile_id.into(),
            tolerances: Vec::new(),
        }
    }

    pub fn push(&mut self, params: Vec<f64>, measured: f64, envelope: f64, flag: RowFlag) {
        debug_assert_eq!(params.len(), self.columns.len());
        self.rows.push(SweepRow { params, measured, envelope, flag });
    }

    pub fn with_tolerance(mut self, name: &str, value: f64) -> Self {
        self.tolerances.push((name.to_string(), value));
        self
    }

    pub fn ok_rows(&self) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(|r| r.flag == RowFlag::Ok)
    }

    pub fn max_ratio(&self) -> f64 {
        self.ok_rows().map(|r| r.ratio()).fold(f64::NAN, f64::max)
    }

    pub fn min_ratio(&self) -> f64 {
        self.ok_rows().map(|r| r.ratio()).fold(f64::NAN, f64::min)
    }

    pub fn any_failed(&self) -> bool {
        self.rows.iter().any(|r| r.flag == RowFlag::Failed)
    }

    /// Fixed 17-significant-digit scientific CSV; byte-identical for
    /// identical inputs.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for c in &self.columns {
            let _ = write!(out, "{c},");
        }
        out.push_str("measured,envelope,ratio,flag\n");
        for r in &self.rows {
            for p in &r.params {
                let _ = write!(out, "{p:.16e},");
            }
            let _ = writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{}",
                r.measured,
                r.envelope,
                r.ratio(),
                match r.flag {
                    RowFlag::Ok => "ok",
                    RowFlag::Failed => "failed",
                    RowFlag::Degenerate => "degenerate",
                    RowFlag::Truncated => "truncated",
                }
            );
        }
        out
    }
}

/// JSON summary of a sweep (`"schema": 1`).
#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub schema: u32,
    pub estimate: String,
    pub profile_id: String,
    pub regime: Option<String>,
    pub rows: usize,
    pub failed_rows: usize,
    pub max_ratio: f64,
    pub min_ratio: f64,
    /// Named regression slopes (log2-log2 where applicable).
    pub slopes: Vec<NamedSlope>,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct NamedSlope {
    pub parameter: String,
    pub slope: f64,
    pub points: usize,
}

impl SweepSummary {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }
}

/// Least-squares slope of `y` against `x`.
pub fn regression_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    if points.len() < 2 {
        return f64::NAN;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in points {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    num / den
}
