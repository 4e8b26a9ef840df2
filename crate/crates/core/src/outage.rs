//! Single-line outage scan over the lines inside an area.
//!
//! For each outage two angles are compared: the monitored angle, which keeps
//! the pre-outage weights and applies them to post-outage border angles, and
//! the recomputed angle, which rebuilds the weights from the post-outage
//! network. The recomputed angle obeys Ohm's law with the post-outage area
//! susceptance and power.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::dcflow::{AngleSolution, DcSolver};
use crate::error::{Error, Result};
use crate::graph;
use crate::model::{AreaPartition, BusId, Line, LineId, Network};
use crate::reduction::{self, AreaBlocks, KronReduction, ReducedArea};
use crate::severity::SeverityResult;
use crate::sparse::SymbolicLdl;

/// Execution knobs shared by the outage and severity scans. Results do not
/// depend on either setting beyond floating-point rounding of the fast path.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ScanOptions {
    /// Use rank-one updates of the base factorizations instead of refactoring.
    pub fast_path: bool,
    /// Worker threads; `None` uses every available core.
    pub jobs: Option<usize>,
}

impl ScanOptions {
    pub(crate) fn run<T, R, F>(&self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match self.jobs {
            Some(1) => items.iter().map(f).collect(),
            Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
                Ok(pool) => pool.install(|| items.par_iter().map(&f).collect()),
                Err(_) => items.iter().map(f).collect(),
            },
            None => items.par_iter().map(f).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutageMetrics {
    /// Post-outage angle with frozen base-case weights (radians).
    pub theta_monitored: f64,
    /// Post-outage angle with recomputed weights (radians).
    pub theta_recomputed: f64,
    pub b_area_post: f64,
    pub p_area_post: f64,
    /// `theta_monitored / theta_recomputed`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum OutageOutcome {
    Evaluated(OutageMetrics),
    /// The outage disconnects the network and is not evaluated.
    Islanding,
    /// The network stays connected but the area's lines no longer join all
    /// area buses.
    AreaDegenerate(String),
    /// Numeric failure for this line only.
    Failed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutageResult {
    pub line_id: LineId,
    pub outcome: OutageOutcome,
    pub severity: Option<SeverityResult>,
}

impl OutageResult {
    pub fn is_islanding(&self) -> bool {
        matches!(self.outcome, OutageOutcome::Islanding)
    }

    pub fn metrics(&self) -> Option<&OutageMetrics> {
        match &self.outcome {
            OutageOutcome::Evaluated(m) => Some(m),
            _ => None,
        }
    }
}

/// Area angle seen by a monitor that keeps the base-case weights.
pub fn monitored_angle(frozen_weights: &[f64], border_angles_post: &[f64]) -> Result<f64> {
    if frozen_weights.len() != border_angles_post.len() {
        return Err(Error::DimensionMismatch {
            expected: frozen_weights.len(),
            got: border_angles_post.len(),
        });
    }
    Ok(frozen_weights
        .iter()
        .zip(border_angles_post)
        .map(|(w, t)| w * t)
        .sum())
}

/// Area angle, susceptance and power rebuilt from the post-outage network.
pub fn recomputed_angle(
    net_post: &Network,
    part: &AreaPartition,
    sol_post: &AngleSolution,
) -> Result<(f64, f64, f64)> {
    if !part.internally_connected(net_post) {
        return Err(Error::DegenerateArea(
            "outage splits the lines inside the area".into(),
        ));
    }
    let area = reduction::reduce_area(net_post, part, sol_post)?;
    Ok((area.theta_area, area.b_area, area.p_area))
}

/// Lines eligible for the scan: in service with both endpoints in the area.
pub fn area_lines(net: &Network, part: &AreaPartition) -> Vec<LineId> {
    net.in_service_lines()
        .filter(|l| part.is_internal(l))
        .map(|l| l.id)
        .collect()
}

/// Base-case state shared read-only by every outage evaluation.
pub struct OutageContext<'a> {
    pub(crate) net: &'a Network,
    pub(crate) part: &'a AreaPartition,
    pub(crate) base: &'a ReducedArea,
    pub(crate) solver: DcSolver,
    pub(crate) base_angles: Vec<f64>,
    network_bridges: BTreeSet<LineId>,
    area_bridges: BTreeSet<LineId>,
    blocks: AreaBlocks,
    base_reduction: KronReduction,
}

impl<'a> OutageContext<'a> {
    pub fn new(net: &'a Network, part: &'a AreaPartition, base: &'a ReducedArea) -> Result<Self> {
        let solver = DcSolver::new(net)?;
        let base_angles = solver.solve(&net.injections());
        let blocks = AreaBlocks::assemble(net, part)?;
        let inflow = reduction::inflow_from_angles(net, part, &base_angles);
        let base_reduction = blocks.reduce(&inflow.total);
        Ok(Self {
            net,
            part,
            base,
            solver,
            base_angles,
            network_bridges: net.bridges(),
            area_bridges: internal_bridges(net, part),
            blocks,
            base_reduction,
        })
    }

    pub(crate) fn is_islanding(&self, line: LineId) -> bool {
        self.network_bridges.contains(&line)
    }

    pub(crate) fn network_symbolic(&self) -> Option<Arc<SymbolicLdl>> {
        self.solver.symbolic()
    }

    fn evaluate(&self, id: LineId, fast_path: bool) -> OutageResult {
        let outcome = if self.is_islanding(id) {
            OutageOutcome::Islanding
        } else if self.area_bridges.contains(&id) {
            OutageOutcome::AreaDegenerate(format!(
                "outage of line {id} splits the lines inside the area"
            ))
        } else {
            let line = self.net.line(id).expect("scanned line exists");
            let evaluated = if fast_path {
                self.evaluate_fast(line)
            } else {
                self.evaluate_full(line)
            };
            match evaluated {
                Ok(m) => OutageOutcome::Evaluated(m),
                Err(Error::DegenerateArea(msg)) => OutageOutcome::AreaDegenerate(msg),
                Err(e) => OutageOutcome::Failed(e.to_string()),
            }
        };
        OutageResult {
            line_id: id,
            outcome,
            severity: None,
        }
    }

    fn evaluate_full(&self, line: &Line) -> Result<OutageMetrics> {
        let net_post = self.net.with_line_status(line.id, false)?;
        let solver = match self.network_symbolic() {
            Some(sym) => DcSolver::with_symbolic(&net_post, sym)?,
            None => DcSolver::new(&net_post)?,
        };
        let angles = solver.solve(&net_post.injections());
        let border = reduction::gather_border(self.net, self.part, &angles);
        let theta_monitored = monitored_angle(&self.base.weights, &border)?;

        let blocks =
            AreaBlocks::with_symbolic(&net_post, self.part, self.blocks.interior_symbolic())?;
        let inflow = reduction::inflow_from_angles(&net_post, self.part, &angles);
        let post = reduction::finish(self.part, blocks.reduce(&inflow.total), &border)?;
        Ok(metrics(theta_monitored, &post))
    }

    fn evaluate_fast(&self, line: &Line) -> Result<OutageMetrics> {
        let update = self.solver.outage_update(self.net, line)?;
        let angles = update.apply(&self.base_angles);
        let border = reduction::gather_border(self.net, self.part, &angles);
        let theta_monitored = monitored_angle(&self.base.weights, &border)?;

        // tie lines are untouched by an internal outage
        let inflow = reduction::inflow_from_angles(self.net, self.part, &angles);
        let reduced = self.blocks.reduce_after_outage(
            &self.base_reduction,
            self.part,
            line,
            &inflow.total,
        )?;
        let post = reduction::finish(self.part, reduced, &border)?;
        Ok(metrics(theta_monitored, &post))
    }
}

fn metrics(theta_monitored: f64, post: &ReducedArea) -> OutageMetrics {
    OutageMetrics {
        theta_monitored,
        theta_recomputed: post.theta_area,
        b_area_post: post.b_area,
        p_area_post: post.p_area,
        ratio: theta_monitored / post.theta_area,
    }
}

/// Lines inside the area whose removal disconnects the area's own subgraph.
fn internal_bridges(net: &Network, part: &AreaPartition) -> BTreeSet<LineId> {
    let local: HashMap<BusId, usize> = part
        .border()
        .iter()
        .chain(part.interior())
        .enumerate()
        .map(|(i, &b)| (b, i))
        .collect();
    let lines: Vec<&Line> = net
        .in_service_lines()
        .filter(|l| part.is_internal(l))
        .collect();
    let edges: Vec<(usize, usize)> = lines
        .iter()
        .map(|l| (local[&l.from_bus], local[&l.to_bus]))
        .collect();
    graph::bridges(local.len(), &edges)
        .into_iter()
        .zip(lines)
        .filter_map(|(bridge, l)| bridge.then_some(l.id))
        .collect()
}

/// Evaluates every in-service line inside the area, in ascending line id.
pub fn scan_outages(
    net: &Network,
    part: &AreaPartition,
    base: &ReducedArea,
    options: &ScanOptions,
) -> Result<Vec<OutageResult>> {
    let ctx = OutageContext::new(net, part, base)?;
    Ok(scan_with_context(&ctx, options))
}

pub fn scan_with_context(ctx: &OutageContext<'_>, options: &ScanOptions) -> Vec<OutageResult> {
    let lines = area_lines(ctx.net, ctx.part);
    options.run(&lines, |&id| ctx.evaluate(id, options.fast_path))
}

/// Evaluates one outage. Tie lines and lines outside the area are rejected.
pub fn evaluate_outage(
    ctx: &OutageContext<'_>,
    line: LineId,
    fast_path: bool,
) -> Result<OutageResult> {
    let l = ctx.net.line(line).ok_or(Error::UnknownLine(line))?;
    if !l.in_service {
        return Err(Error::LineOutOfService(line));
    }
    if !ctx.part.is_internal(l) {
        return Err(Error::NotAreaLine(line));
    }
    Ok(ctx.evaluate(line, fast_path))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioStats {
    pub mean: f64,
    pub std_dev: f64,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

/// Mean, population standard deviation and range of the angle ratios over
/// evaluated outages. Undefined ratios (zero recomputed angle) are skipped.
pub fn ratio_statistics(results: &[OutageResult]) -> Result<RatioStats> {
    let ratios: Vec<f64> = results
        .iter()
        .filter_map(|r| r.metrics())
        .map(|m| m.ratio)
        .filter(|r| r.is_finite())
        .collect();
    if ratios.is_empty() {
        return Err(Error::EmptyResults);
    }
    let count = ratios.len();
    let mean = ratios.iter().sum::<f64>() / count as f64;
    let var = ratios.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / count as f64;
    let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let max = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(RatioStats {
        // rounding can push the mean of identical values just outside [min, max]
        mean: mean.clamp(min, max),
        std_dev: var.sqrt(),
        min,
        max,
        count,
    })
}
