//! Experiment reports: long-format rows, CSV/JSON serialization and the
//! per-(n, metric) summary block.
//!
//! The CSV layout is fixed:
//!
//! ```text
//! experiment,n,r_n,rho_n,seed,replicate,metric,param,value,target,abs_error,rel_error,flag
//! ```
//!
//! Floats carry 17 significant digits, infinities serialize as `inf`,
//! and absent optionals are empty fields. Wall-clock times are kept out
//! of the CSV so identical configurations produce byte-identical files;
//! the JSON report carries `wall_ms` per replicate for diagnostics.

use crate::{CliError, Result};

pub const CSV_HEADER: &str =
    "experiment,n,r_n,rho_n,seed,replicate,metric,param,value,target,abs_error,rel_error,flag";

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub experiment: String,
    pub n: usize,
    pub r_n: f64,
    pub rho_n: Option<f64>,
    pub seed: u64,
    pub replicate: usize,
    pub metric: String,
    pub param: Option<f64>,
    pub value: f64,
    pub target: Option<f64>,
    pub abs_error: Option<f64>,
    pub rel_error: Option<f64>,
    pub flag: String,
    /// Emission order within a replicate; drives the deterministic sort,
    /// not serialized.
    pub order: usize,
    /// Wall time of the replicate in milliseconds; JSON only.
    pub wall_ms: f64,
}

impl Row {
    /// Fill `abs_error`/`rel_error` from `value` and `target`.
    pub fn with_errors(mut self) -> Self {
        if let Some(t) = self.target {
            if self.value.is_finite() && t.is_finite() {
                let abs = (self.value - t).abs();
                self.abs_error = Some(abs);
                self.rel_error = if t != 0.0 { Some(abs / t.abs()) } else { None };
            } else if self.value.is_infinite() && t.is_infinite() {
                self.abs_error = None;
                self.rel_error = None;
            } else {
                self.abs_error = Some(f64::INFINITY);
                self.rel_error = Some(f64::INFINITY);
            }
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub n: usize,
    pub metric: String,
    pub count: usize,
    pub value_median: f64,
    pub value_iqr: f64,
    pub rel_error_median: Option<f64>,
    pub rel_error_iqr: Option<f64>,
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub experiment: String,
    pub rows: Vec<Row>,
    pub summary: Vec<SummaryRow>,
}

/// 17-significant-digit float field; `inf` for infinities.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".to_string() } else { "-inf".to_string() }
    } else {
        format!("{v:.16e}")
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn parse_field_f64(tok: &str) -> std::result::Result<f64, String> {
    match tok {
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        "nan" => Ok(f64::NAN),
        _ => tok.parse::<f64>().map_err(|e| format!("bad float {tok:?}: {e}")),
    }
}

fn parse_opt_f64(tok: &str) -> std::result::Result<Option<f64>, String> {
    if tok.is_empty() {
        Ok(None)
    } else {
        parse_field_f64(tok).map(Some)
    }
}

impl Report {
    pub fn new(experiment: &str) -> Self {
        Report { experiment: experiment.to_string(), rows: Vec::new(), summary: Vec::new() }
    }

    /// Deterministic row order: (n, replicate, emission order).
    pub fn sort_rows(&mut self) {
        self.rows.sort_by(|a, b| {
            (a.n, a.replicate, a.order).cmp(&(b.n, b.replicate, b.order))
        });
    }

    /// Per-(n, metric) median and IQR of values and relative errors.
    pub fn build_summary(&mut self) {
        use std::collections::BTreeMap;
        let mut groups: BTreeMap<(usize, String), (Vec<f64>, Vec<f64>)> = BTreeMap::new();
        for row in &self.rows {
            let entry = groups.entry((row.n, row.metric.clone())).or_default();
            entry.0.push(row.value);
            if let Some(re) = row.rel_error {
                entry.1.push(re);
            }
        }
        self.summary = groups
            .into_iter()
            .map(|((n, metric), (values, rels))| {
                let (vm, vq) = median_iqr(&values);
                let (rm, rq) = if rels.is_empty() {
                    (None, None)
                } else {
                    let (m, q) = median_iqr(&rels);
                    (Some(m), Some(q))
                };
                SummaryRow {
                    n,
                    metric,
                    count: values.len(),
                    value_median: vm,
                    value_iqr: vq,
                    rel_error_median: rm,
                    rel_error_iqr: rq,
                }
            })
            .collect();
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.rows.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            debug_assert!(!r.metric.contains(',') && !r.flag.contains(','));
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                r.experiment,
                r.n,
                fmt_f64(r.r_n),
                fmt_opt(r.rho_n),
                r.seed,
                r.replicate,
                r.metric,
                fmt_opt(r.param),
                fmt_f64(r.value),
                fmt_opt(r.target),
                fmt_opt(r.abs_error),
                fmt_opt(r.rel_error),
                r.flag,
            ));
        }
        out
    }

    /// Parse a CSV report back into rows; re-serializing the result is
    /// byte-identical to the input.
    pub fn parse_csv(text: &str) -> Result<Report> {
        let conf = |line: usize, msg: String| CliError::Config {
            path: "<csv>".to_string(),
            line,
            msg,
        };
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h == CSV_HEADER => {}
            Some((_, h)) => {
                return Err(conf(1, format!("unexpected header {h:?}")));
            }
            None => return Err(conf(1, "empty report".to_string())),
        }
        let mut rows = Vec::new();
        for (idx, line) in lines {
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 13 {
                return Err(conf(idx + 1, format!("expected 13 fields, got {}", fields.len())));
            }
            let e = |msg: String| conf(idx + 1, msg);
            rows.push(Row {
                experiment: fields[0].to_string(),
                n: fields[1].parse().map_err(|_| e(format!("bad n {:?}", fields[1])))?,
                r_n: parse_field_f64(fields[2]).map_err(e)?,
                rho_n: parse_opt_f64(fields[3]).map_err(e)?,
                seed: fields[4].parse().map_err(|_| e(format!("bad seed {:?}", fields[4])))?,
                replicate: fields[5]
                    .parse()
                    .map_err(|_| e(format!("bad replicate {:?}", fields[5])))?,
                metric: fields[6].to_string(),
                param: parse_opt_f64(fields[7]).map_err(e)?,
                value: parse_field_f64(fields[8]).map_err(e)?,
                target: parse_opt_f64(fields[9]).map_err(e)?,
                abs_error: parse_opt_f64(fields[10]).map_err(e)?,
                rel_error: parse_opt_f64(fields[11]).map_err(e)?,
                flag: fields[12].to_string(),
                order: rows.len(),
                wall_ms: 0.0,
            });
        }
        let experiment = rows.first().map(|r| r.experiment.clone()).unwrap_or_default();
        Ok(Report { experiment, rows, summary: Vec::new() })
    }

    /// JSON report with rows, summary and per-row wall times.
    pub fn to_json(&self) -> String {
        fn jf(v: f64) -> String {
            if v.is_finite() {
                format!("{v:.16e}")
            } else {
                format!("\"{}\"", fmt_f64(v))
            }
        }
        fn jopt(v: Option<f64>) -> String {
            v.map(jf).unwrap_or_else(|| "null".to_string())
        }
        let mut out = String::from("{\n");
        out.push_str(&format!("  \"experiment\": \"{}\",\n", self.experiment));
        out.push_str("  \"rows\": [\n");
        for (i, r) in self.rows.iter().enumerate() {
            out.push_str(&format!(
                "    {{\"experiment\": \"{}\", \"n\": {}, \"r_n\": {}, \"rho_n\": {}, \"seed\": {}, \"replicate\": {}, \"metric\": \"{}\", \"param\": {}, \"value\": {}, \"target\": {}, \"abs_error\": {}, \"rel_error\": {}, \"flag\": \"{}\", \"wall_ms\": {}}}{}\n",
                r.experiment,
                r.n,
                jf(r.r_n),
                jopt(r.rho_n),
                r.seed,
                r.replicate,
                r.metric,
                jopt(r.param),
                jf(r.value),
                jopt(r.target),
                jopt(r.abs_error),
                jopt(r.rel_error),
                r.flag,
                jf(r.wall_ms),
                if i + 1 < self.rows.len() { "," } else { "" }
            ));
        }
        out.push_str("  ],\n  \"summary\": [\n");
        for (i, s) in self.summary.iter().enumerate() {
            out.push_str(&format!(
                "    {{\"n\": {}, \"metric\": \"{}\", \"count\": {}, \"value_median\": {}, \"value_iqr\": {}, \"rel_error_median\": {}, \"rel_error_iqr\": {}}}{}\n",
                s.n,
                s.metric,
                s.count,
                jf(s.value_median),
                jf(s.value_iqr),
                jopt(s.rel_error_median),
                jopt(s.rel_error_iqr),
                if i + 1 < self.summary.len() { "," } else { "" }
            ));
        }
        out.push_str("  ]\n}\n");
        out
    }

    /// Summary for terminal output.
    pub fn summary_table(&self) -> String {
        let mut out = String::new();
        out.push_str("n        metric            count  median           iqr              rel_err_median\n");
        for s in &self.summary {
            out.push_str(&format!(
                "{:<8} {:<17} {:<6} {:<16.9} {:<16.9} {}\n",
                s.n,
                s.metric,
                s.count,
                s.value_median,
                s.value_iqr,
                s.rel_error_median.map(|v| format!("{v:.9}")).unwrap_or_else(|| "-".into()),
            ));
        }
        out
    }

    /// Median of a metric's per-replicate values at a given n.
    pub fn metric_values(&self, n: usize, metric: &str) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|r| r.n == n && r.metric == metric)
            .map(|r| r.value)
            .collect()
    }

    pub fn metric_rel_errors(&self, n: usize, metric: &str) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|r| r.n == n && r.metric == metric)
            .filter_map(|r| r.rel_error)
            .collect()
    }
}

/// Interpolated median and interquartile range.
pub fn median_iqr(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    (quantile(&v, 0.5), quantile(&v, 0.75) - quantile(&v, 0.25))
}

pub fn median(values: &[f64]) -> f64 {
    median_iqr(values).0
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = q * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_report() -> Report {
        let mut rep = Report::new("pointwise");
        for (i, v) in [(0usize, 1.25), (1, f64::INFINITY), (2, 0.5)] {
            rep.rows.push(
                Row {
                    experiment: "pointwise".into(),
                    n: 500,
                    r_n: 0.123456789,
                    rho_n: if i == 1 { None } else { Some(0.25) },
                    seed: 42,
                    replicate: i,
                    metric: "h".into(),
                    param: None,
                    value: v,
                    target: Some(4.0 / std::f64::consts::PI),
                    abs_error: None,
                    rel_error: None,
                    flag: if v.is_finite() { String::new() } else { "degenerate".into() },
                    order: 0,
                    wall_ms: 1.5,
                }
                .with_errors(),
            );
        }
        rep.sort_rows();
        rep.build_summary();
        rep
    }

    #[test]
    fn csv_round_trip_is_byte_identical() {
        let rep = sample_report();
        let csv = rep.to_csv();
        let parsed = Report::parse_csv(&csv).unwrap();
        assert_eq!(parsed.to_csv(), csv);
    }

    #[test]
    fn infinity_serializes_as_inf() {
        let rep = sample_report();
        let csv = rep.to_csv();
        assert!(csv.contains(",inf,"));
        let parsed = Report::parse_csv(&csv).unwrap();
        assert!(parsed.rows[1].value.is_infinite());
    }

    #[test]
    fn float_fields_keep_17_digits() {
        let v = std::f64::consts::PI;
        let s = fmt_f64(v);
        assert_eq!(s.parse::<f64>().unwrap(), v);
        assert!(s.contains("3.1415926535897931"));
    }

    #[test]
    fn errors_computed() {
        let rep = sample_report();
        let r = &rep.rows[0];
        let t = 4.0 / std::f64::consts::PI;
        assert!((r.abs_error.unwrap() - (1.25 - t).abs()).abs() < 1e-15);
        // Infinite value against finite target: infinite errors.
        assert!(rep.rows[1].abs_error.unwrap().is_infinite());
    }

    #[test]
    fn summary_stats() {
        let (m, iqr) = median_iqr(&[1.0, 2.0, 3.0, 4.0]);
        assert!((m - 2.5).abs() < 1e-15);
        assert!((iqr - 1.5).abs() < 1e-15);
        let (m, _) = median_iqr(&[7.0]);
        assert_eq!(m, 7.0);
    }

    #[test]
    fn bad_csv_is_rejected_with_line_numbers() {
        let mut csv = sample_report().to_csv();
        csv.push_str("pointwise,not-a-number\n");
        match Report::parse_csv(&csv) {
            Err(CliError::Config { line, .. }) => assert_eq!(line, 5),
            other => panic!("expected config error, got {other:?}"),
        }
    }
}
