//! Outage severity as the largest power the area can take in before a line
//! inside it reaches its limit.
//!
//! Border inflows are scaled proportionally along a fixed stress direction.
//! DC flows are affine in the scaling parameter, `f(λ) = f0 + λ·Δf`, so the
//! first limit hit is found with a single ratio test.

use std::cmp::Ordering;

use serde::Serialize;

use crate::dcflow::{line_flow, AngleSolution, DcSolver};
use crate::error::{Error, Result};
use crate::model::{AreaPartition, LineId, Network};
use crate::outage::{OutageContext, OutageResult, ScanOptions};
use crate::reduction;

/// Flow sensitivities at or below this never bind.
pub const MIN_SENSITIVITY: f64 = 1e-12;

/// Injection change per unit of extra power entering side a.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StressDirection {
    /// Per bus, indexed like [`Network::buses`].
    pub delta_injection: Vec<f64>,
    pub description: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TransferLimit {
    Bounded {
        lambda_star: f64,
        max_power_in: f64,
        binding_line: LineId,
    },
    /// No limited line inside the area responds to the stress.
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeverityResult {
    /// `None` for the base case.
    pub line_id: Option<LineId>,
    /// Power entering side a before stressing.
    pub inflow: f64,
    pub limit: TransferLimit,
}

impl SeverityResult {
    pub fn max_power_in(&self) -> Option<f64> {
        match self.limit {
            TransferLimit::Bounded { max_power_in, .. } => Some(max_power_in),
            TransferLimit::Unbounded => None,
        }
    }

    pub fn lambda_star(&self) -> Option<f64> {
        match self.limit {
            TransferLimit::Bounded { lambda_star, .. } => Some(lambda_star),
            TransferLimit::Unbounded => None,
        }
    }

    pub fn binding_line(&self) -> Option<LineId> {
        match self.limit {
            TransferLimit::Bounded { binding_line, .. } => Some(binding_line),
            TransferLimit::Unbounded => None,
        }
    }

    pub fn is_base(&self) -> bool {
        self.line_id.is_none()
    }
}

/// Canonical severity order: ascending max power, unbounded after bounded,
/// ties by line id with the base case after outages.
pub fn severity_order(a: &SeverityResult, b: &SeverityResult) -> Ordering {
    let key = |s: &SeverityResult| (s.max_power_in().is_none(), s.max_power_in().unwrap_or(0.0));
    let (ua, pa) = key(a);
    let (ub, pb) = key(b);
    ua.cmp(&ub)
        .then(pa.total_cmp(&pb))
        .then(a.line_id.is_none().cmp(&b.line_id.is_none()))
        .then(a.line_id.cmp(&b.line_id))
}

/// Stress direction from the base case: side-a border buses take extra
/// power in proportion to their inflow, side-b border buses give it up in
/// proportion to their outflow. Normalized to one unit entering side a.
pub fn stress_direction(
    net: &Network,
    part: &AreaPartition,
    sol: &AngleSolution,
) -> Result<StressDirection> {
    let inflow = reduction::border_inflow(net, part, sol);
    let a = part.side_a().len();
    let total_in: f64 = inflow.total[..a].iter().sum();
    let total_out: f64 = -inflow.total[a..].iter().sum::<f64>();
    if !(total_in > MIN_SENSITIVITY) {
        return Err(Error::UndefinedDirection(format!(
            "base inflow at side a is {total_in}"
        )));
    }
    if !(total_out > MIN_SENSITIVITY) {
        return Err(Error::UndefinedDirection(format!(
            "base outflow at side b is {total_out}"
        )));
    }
    let mut delta = vec![0.0; net.bus_count()];
    for (j, &bus) in part.border().iter().enumerate() {
        let scale = if j < a { total_in } else { total_out };
        delta[net.bus_index(bus).expect("area bus exists")] = inflow.total[j] / scale;
    }
    Ok(StressDirection {
        delta_injection: delta,
        description: "proportional border inflow, absorbed at side b".into(),
    })
}

/// Power entering side a for the given angles.
fn side_a_inflow(net: &Network, part: &AreaPartition, angles: &[f64]) -> f64 {
    let inflow = reduction::inflow_from_angles(net, part, angles);
    inflow.total[..part.side_a().len()].iter().sum()
}

/// Ratio test over limited in-service lines inside the area. Returns the
/// step to the first limit and the line that reaches it.
pub fn ratio_test(
    net: &Network,
    part: &AreaPartition,
    base_angles: &[f64],
    delta_angles: &[f64],
) -> Option<(f64, LineId)> {
    limit_test(net, part, base_angles, delta_angles, None)
}

fn limit_test(
    net: &Network,
    part: &AreaPartition,
    base_angles: &[f64],
    delta_angles: &[f64],
    outaged: Option<LineId>,
) -> Option<(f64, LineId)> {
    let mut best: Option<(f64, LineId)> = None;
    let lines = net
        .in_service_lines()
        .filter(|l| part.is_internal(l) && Some(l.id) != outaged);
    for line in lines {
        let Some(limit) = line.limit else { continue };
        let f0 = line_flow(net, line, base_angles);
        let df = line_flow(net, line, delta_angles);
        let step = if f0.abs() > limit {
            0.0
        } else if df > MIN_SENSITIVITY {
            (limit - f0) / df
        } else if df < -MIN_SENSITIVITY {
            (-limit - f0) / df
        } else {
            continue;
        };
        let step = step.max(0.0);
        if best.is_none_or(|(s, _)| step < s) {
            best = Some((step, line.id));
        }
    }
    best
}

fn limit_from(inflow: f64, test: Option<(f64, LineId)>) -> TransferLimit {
    match test {
        Some((lambda_star, binding_line)) => TransferLimit::Bounded {
            lambda_star,
            max_power_in: inflow + lambda_star,
            binding_line,
        },
        None => TransferLimit::Unbounded,
    }
}

/// Maximum power into the area along `dir` for the network as given.
pub fn max_power_into_area(
    net: &Network,
    part: &AreaPartition,
    dir: &StressDirection,
) -> Result<SeverityResult> {
    if dir.delta_injection.len() != net.bus_count() {
        return Err(Error::DimensionMismatch {
            expected: net.bus_count(),
            got: dir.delta_injection.len(),
        });
    }
    let solver = DcSolver::new(net)?;
    let theta0 = solver.solve(&net.injections());
    let theta_delta = solver.solve(&dir.delta_injection);
    let inflow = side_a_inflow(net, part, &theta0);
    Ok(SeverityResult {
        line_id: None,
        inflow,
        limit: limit_from(inflow, ratio_test(net, part, &theta0, &theta_delta)),
    })
}

/// Severity of the base case and of every non-islanding scanned outage.
///
/// Fills `OutageResult::severity` and returns all severities in canonical
/// order (see [`severity_order`]).
pub fn severity_scan(
    ctx: &OutageContext<'_>,
    results: &mut [OutageResult],
    dir: &StressDirection,
    options: &ScanOptions,
) -> Result<Vec<SeverityResult>> {
    let net = ctx.net;
    let part = ctx.part;
    let theta0 = &ctx.base_angles;
    let theta_delta = ctx.solver.solve(&dir.delta_injection);
    let base_inflow = side_a_inflow(net, part, theta0);
    let base = SeverityResult {
        line_id: None,
        inflow: base_inflow,
        limit: limit_from(base_inflow, ratio_test(net, part, theta0, &theta_delta)),
    };

    let lines: Vec<LineId> = results
        .iter()
        .filter(|r| !r.is_islanding())
        .map(|r| r.line_id)
        .collect();
    let evaluated = options.run(&lines, |&id| -> Result<SeverityResult> {
        let line = net.line(id).ok_or(Error::UnknownLine(id))?;
        let (post0, post_delta) = if options.fast_path {
            let update = ctx.solver.outage_update(net, line)?;
            (update.apply(theta0), update.apply(&theta_delta))
        } else {
            let net_post = net.with_line_status(id, false)?;
            let solver = match ctx.network_symbolic() {
                Some(sym) => DcSolver::with_symbolic(&net_post, sym)?,
                None => DcSolver::new(&net_post)?,
            };
            (
                solver.solve(&net_post.injections()),
                solver.solve(&dir.delta_injection),
            )
        };
        // tie lines are untouched by an internal outage
        let inflow = side_a_inflow(net, part, &post0);
        let test = limit_test(net, part, &post0, &post_delta, Some(id));
        Ok(SeverityResult {
            line_id: Some(id),
            inflow,
            limit: limit_from(inflow, test),
        })
    });

    let mut all = Vec::with_capacity(lines.len() + 1);
    for (id, sev) in lines.iter().zip(evaluated) {
        // a per-line failure leaves that outage without a severity
        if let Ok(sev) = sev {
            if let Some(r) = results.iter_mut().find(|r| r.line_id == *id) {
                r.severity = Some(sev);
            }
            all.push(sev);
        }
    }
    all.push(base);
    all.sort_by(severity_order);
    Ok(all)
}
