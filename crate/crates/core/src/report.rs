//! Scan reports and their table, CSV and JSON encodings.
//!
//! Every real number in a report is rounded to 12 significant digits when
//! the report is built, so the CSV and JSON encodings carry identical values
//! and JSON round-trips exactly.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::dcflow::solve_angles;
use crate::error::Result;
use crate::model::{partition_area, AreaSpec, Network};
use crate::outage::{self, OutageContext, OutageOutcome, OutageResult, RatioStats, ScanOptions};
use crate::reduction::{self, ReducedArea, SMALL_WEIGHT};
use crate::severity::{self, SeverityResult, TransferLimit};

pub const CSV_HEADER: [&str; 9] = [
    "line_id",
    "islanding",
    "theta_monitored_deg",
    "theta_recomputed_deg",
    "b_area_post",
    "p_area_post",
    "ratio",
    "max_power_in",
    "binding_line",
];

/// Rounds to 12 significant digits.
pub fn sig12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

fn deg(rad: f64) -> f64 {
    sig12(rad.to_degrees())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub case_path: String,
    pub area_path: String,
    pub timestamp: String,
    pub tool_version: String,
    pub wall_time_s: Option<f64>,
}

impl Metadata {
    pub fn new(case_path: impl Into<String>, area_path: impl Into<String>) -> Self {
        Self {
            case_path: case_path.into(),
            area_path: area_path.into(),
            timestamp: chrono::Utc::now().to_rfc3339(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time_s: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BorderWeight {
    pub bus: u32,
    pub side: String,
    pub weight: f64,
    pub omit_candidate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Severity {
    pub max_power_in: Option<f64>,
    pub lambda_star: Option<f64>,
    pub binding_line: Option<u32>,
    pub unbounded: bool,
}

impl From<&SeverityResult> for Severity {
    fn from(s: &SeverityResult) -> Self {
        match s.limit {
            TransferLimit::Bounded {
                lambda_star,
                max_power_in,
                binding_line,
            } => Self {
                max_power_in: Some(sig12(max_power_in)),
                lambda_star: Some(sig12(lambda_star)),
                binding_line: Some(binding_line.0),
                unbounded: false,
            },
            TransferLimit::Unbounded => Self {
                max_power_in: None,
                lambda_star: None,
                binding_line: None,
                unbounded: true,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaseSummary {
    pub theta_area_rad: f64,
    pub theta_area_deg: f64,
    pub b_area: f64,
    pub p_area: f64,
    pub weights: Vec<BorderWeight>,
    pub severity: Option<Severity>,
}

impl BaseSummary {
    fn new(area: &ReducedArea, side_a_len: usize) -> Self {
        Self {
            theta_area_rad: sig12(area.theta_area),
            theta_area_deg: deg(area.theta_area),
            b_area: sig12(area.b_area),
            p_area: sig12(area.p_area),
            weights: area
                .border_order
                .iter()
                .zip(&area.weights)
                .enumerate()
                .map(|(j, (bus, &w))| BorderWeight {
                    bus: bus.0,
                    side: if j < side_a_len { "a" } else { "b" }.into(),
                    weight: sig12(w),
                    omit_candidate: w.abs() < SMALL_WEIGHT,
                })
                .collect(),
            severity: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Evaluated,
    Islanding,
    AreaDegenerate,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutageRow {
    pub line_id: u32,
    pub status: RowStatus,
    pub islanding: bool,
    pub message: Option<String>,
    pub theta_monitored_rad: Option<f64>,
    pub theta_monitored_deg: Option<f64>,
    pub theta_recomputed_rad: Option<f64>,
    pub theta_recomputed_deg: Option<f64>,
    pub b_area_post: Option<f64>,
    pub p_area_post: Option<f64>,
    pub ratio: Option<f64>,
    pub severity: Option<Severity>,
}

impl From<&OutageResult> for OutageRow {
    fn from(r: &OutageResult) -> Self {
        let (status, message) = match &r.outcome {
            OutageOutcome::Evaluated(_) => (RowStatus::Evaluated, None),
            OutageOutcome::Islanding => (RowStatus::Islanding, None),
            OutageOutcome::AreaDegenerate(m) => (RowStatus::AreaDegenerate, Some(m.clone())),
            OutageOutcome::Failed(m) => (RowStatus::Failed, Some(m.clone())),
        };
        let m = r.metrics();
        Self {
            line_id: r.line_id.0,
            status,
            islanding: r.is_islanding(),
            message,
            theta_monitored_rad: m.map(|m| sig12(m.theta_monitored)),
            theta_monitored_deg: m.map(|m| deg(m.theta_monitored)),
            theta_recomputed_rad: m.map(|m| sig12(m.theta_recomputed)),
            theta_recomputed_deg: m.map(|m| deg(m.theta_recomputed)),
            b_area_post: m.map(|m| sig12(m.b_area_post)),
            p_area_post: m.map(|m| sig12(m.p_area_post)),
            ratio: m.filter(|m| m.ratio.is_finite()).map(|m| sig12(m.ratio)),
            severity: r.severity.as_ref().map(Severity::from),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioSummary {
    pub mean: f64,
    pub std_dev: f64,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl From<RatioStats> for RatioSummary {
    fn from(s: RatioStats) -> Self {
        Self {
            mean: sig12(s.mean),
            std_dev: sig12(s.std_dev),
            min: sig12(s.min),
            max: sig12(s.max),
            count: s.count,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub metadata: Metadata,
    pub base: BaseSummary,
    /// Sorted by ascending max power into the area; outages without a
    /// bounded severity follow, by line id.
    pub outages: Vec<OutageRow>,
    pub ratio_stats: Option<RatioSummary>,
    /// Why severity is missing, when it is.
    pub severity_note: Option<String>,
}

/// Base-case report with no outage rows.
pub fn baseline_report(net: &Network, spec: &AreaSpec, metadata: Metadata) -> Result<ScanReport> {
    let part = partition_area(net, spec)?;
    let area = reduction::reduce_area(net, &part, &solve_angles(net)?)?;
    Ok(ScanReport {
        metadata,
        base: BaseSummary::new(&area, part.side_a().len()),
        outages: Vec::new(),
        ratio_stats: None,
        severity_note: None,
    })
}

/// Full scan: every outage inside the area, severities and ratio statistics.
pub fn scan_report(
    net: &Network,
    spec: &AreaSpec,
    options: &ScanOptions,
    metadata: Metadata,
) -> Result<ScanReport> {
    let part = partition_area(net, spec)?;
    let sol = solve_angles(net)?;
    let area = reduction::reduce_area(net, &part, &sol)?;
    let ctx = OutageContext::new(net, &part, &area)?;
    let mut results = outage::scan_with_context(&ctx, options);

    let mut base = BaseSummary::new(&area, part.side_a().len());
    let mut severity_note = None;
    match severity::stress_direction(net, &part, &sol) {
        Ok(dir) => {
            let all = severity::severity_scan(&ctx, &mut results, &dir, options)?;
            base.severity = all.iter().find(|s| s.is_base()).map(Severity::from);
        }
        Err(e) => severity_note = Some(e.to_string()),
    }

    let ratio_stats = outage::ratio_statistics(&results)
        .ok()
        .map(RatioSummary::from);
    let mut rows: Vec<(Option<SeverityResult>, OutageRow)> = results
        .iter()
        .map(|r| (r.severity, OutageRow::from(r)))
        .collect();
    rows.sort_by(|(sa, ra), (sb, rb)| match (sa, sb) {
        (Some(a), Some(b)) => severity::severity_order(a, b),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => ra.line_id.cmp(&rb.line_id),
    });

    Ok(ScanReport {
        metadata,
        base,
        outages: rows.into_iter().map(|(_, r)| r).collect(),
        ratio_stats,
        severity_note,
    })
}

fn num(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn severity_cells(s: Option<&Severity>) -> (String, String) {
    match s {
        Some(s) if s.unbounded => ("unbounded".into(), String::new()),
        Some(s) => (
            num(s.max_power_in),
            s.binding_line.map(|b| b.to_string()).unwrap_or_default(),
        ),
        None => (String::new(), String::new()),
    }
}

impl ScanReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One row per outage in report order, then the base case with line id
    /// `base`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER).expect("in-memory write");
        for row in &self.outages {
            let (max_power, binding) = severity_cells(row.severity.as_ref());
            w.write_record([
                row.line_id.to_string(),
                row.islanding.to_string(),
                num(row.theta_monitored_deg),
                num(row.theta_recomputed_deg),
                num(row.b_area_post),
                num(row.p_area_post),
                num(row.ratio),
                max_power,
                binding,
            ])
            .expect("in-memory write");
        }
        let (max_power, binding) = severity_cells(self.base.severity.as_ref());
        w.write_record([
            "base".to_string(),
            "false".to_string(),
            self.base.theta_area_deg.to_string(),
            self.base.theta_area_deg.to_string(),
            self.base.b_area.to_string(),
            self.base.p_area.to_string(),
            "1".to_string(),
            max_power,
            binding,
        ])
        .expect("in-memory write");
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let b = &self.base;
        let _ = writeln!(
            out,
            "area angle   {:>14.6} deg  ({:.6} rad)",
            b.theta_area_deg, b.theta_area_rad
        );
        let _ = writeln!(out, "area b       {:>14.6} pu", b.b_area);
        let _ = writeln!(out, "area power   {:>14.6} pu", b.p_area);
        if let Some(s) = &b.severity {
            let (p, line) = severity_cells(Some(s));
            let _ = writeln!(out, "max power in {p:>14} pu  (binding line {line})");
        }
        let _ = writeln!(out, "\n{:>8} {:>4} {:>12}", "bus", "side", "weight");
        for w in &b.weights {
            let flag = if w.omit_candidate {
                "  small, may be omitted"
            } else {
                ""
            };
            let _ = writeln!(out, "{:>8} {:>4} {:>12.6}{flag}", w.bus, w.side, w.weight);
        }
        if !self.outages.is_empty() {
            let _ = writeln!(
                out,
                "\n{:>8} {:>16} {:>12} {:>12} {:>12} {:>10} {:>14} {:>8}",
                "line",
                "status",
                "theta_mon",
                "theta_rec",
                "b_area",
                "ratio",
                "max_power",
                "binding"
            );
            for r in &self.outages {
                let (p, line) = severity_cells(r.severity.as_ref());
                let f = |x: Option<f64>| x.map(|v| format!("{v:.4}")).unwrap_or_else(|| "-".into());
                let status = match r.status {
                    RowStatus::Evaluated => "evaluated",
                    RowStatus::Islanding => "islanding",
                    RowStatus::AreaDegenerate => "area-degenerate",
                    RowStatus::Failed => "failed",
                };
                let _ = writeln!(
                    out,
                    "{:>8} {:>16} {:>12} {:>12} {:>12} {:>10} {:>14} {:>8}",
                    r.line_id,
                    status,
                    f(r.theta_monitored_deg),
                    f(r.theta_recomputed_deg),
                    f(r.b_area_post),
                    r.ratio
                        .map(|v| format!("{v:.6}"))
                        .unwrap_or_else(|| "-".into()),
                    p,
                    line
                );
            }
        }
        if let Some(s) = &self.ratio_stats {
            let _ = writeln!(
                out,
                "\nratio theta_mon/theta_rec over {} outages: mean {:.6}, std {:.6}, min {:.6}, max {:.6}",
                s.count, s.mean, s.std_dev, s.min, s.max
            );
        }
        if let Some(note) = &self.severity_note {
            let _ = writeln!(out, "\nseverity not computed: {note}");
        }
        if let Some(t) = self.metadata.wall_time_s {
            let _ = writeln!(out, "\nwall time {t:.3} s");
        }
        out
    }
}
