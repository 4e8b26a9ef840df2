//! DC load flow: susceptance (Laplacian) assembly, angle solves, line flows
//! and single-line outages.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::{BusId, Line, LineId, Network};
use crate::sparse::{LdlFactor, SymCsc, SymbolicLdl};

/// Network susceptance matrix over buses in ascending id order.
#[derive(Debug, Clone, PartialEq)]
pub struct SusceptanceMatrix {
    order: Vec<BusId>,
    matrix: SymCsc,
}

impl SusceptanceMatrix {
    pub fn order(&self) -> &[BusId] {
        &self.order
    }

    pub fn dim(&self) -> usize {
        self.order.len()
    }

    /// Entry by position in [`SusceptanceMatrix::order`].
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix.get(i, j)
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        self.matrix.column(i).map(|(_, v)| v).sum()
    }

    pub fn as_sparse(&self) -> &SymCsc {
        &self.matrix
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        self.matrix.to_dense()
    }
}

fn line_triplets(net: &Network, line: &Line) -> [(usize, usize, f64); 3] {
    let u = net.bus_index(line.from_bus).expect("validated endpoint");
    let v = net.bus_index(line.to_bus).expect("validated endpoint");
    let b = line.susceptance;
    [(u, u, b), (v, v, b), (u, v, -b)]
}

/// Assembles the susceptance matrix from in-service lines.
pub fn assemble_b(net: &Network) -> SusceptanceMatrix {
    let n = net.bus_count();
    let triplets = net
        .in_service_lines()
        .flat_map(|l| line_triplets(net, l))
        .chain((0..n).map(|i| (i, i, 0.0)));
    SusceptanceMatrix {
        order: net.buses().iter().map(|b| b.id).collect(),
        matrix: SymCsc::from_triplets(n, triplets),
    }
}

/// Bus voltage angles in radians, indexed like [`Network::buses`].
#[derive(Debug, Clone, PartialEq)]
pub struct AngleSolution {
    angles: Vec<f64>,
    slack_bus: BusId,
}

impl AngleSolution {
    pub fn new(angles: Vec<f64>, slack_bus: BusId) -> Self {
        Self { angles, slack_bus }
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn slack_bus(&self) -> BusId {
        self.slack_bus
    }

    pub fn angle(&self, net: &Network, bus: BusId) -> Option<f64> {
        net.bus_index(bus).map(|i| self.angles[i])
    }
}

/// Signed line flows (from-bus to to-bus) for in-service lines.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowSolution {
    flows: BTreeMap<LineId, f64>,
}

impl FlowSolution {
    pub fn flows(&self) -> &BTreeMap<LineId, f64> {
        &self.flows
    }

    pub fn flow(&self, line: LineId) -> Option<f64> {
        self.flows.get(&line).copied()
    }
}

/// Factored slack-deleted susceptance system of one network.
///
/// Solves are read-only, so one solver can be shared across threads.
#[derive(Debug, Clone)]
pub struct DcSolver {
    slack: usize,
    slack_bus: BusId,
    factor: Option<LdlFactor>,
}

impl DcSolver {
    pub fn new(net: &Network) -> Result<Self> {
        Self::build(net, None)
    }

    /// Reuses the symbolic analysis of another solver. `net` must not have
    /// in-service lines the other network lacked.
    pub fn with_symbolic(net: &Network, symbolic: Arc<SymbolicLdl>) -> Result<Self> {
        Self::build(net, Some(symbolic))
    }

    fn build(net: &Network, symbolic: Option<Arc<SymbolicLdl>>) -> Result<Self> {
        let slack = net.bus_index(net.slack_bus()).expect("validated slack");
        let reduced = reduced_matrix(net, slack);
        let factor = if reduced.dim() == 0 {
            None
        } else {
            Some(match symbolic {
                Some(sym) => LdlFactor::with_symbolic(sym, &reduced)?,
                None => LdlFactor::new(&reduced)?,
            })
        };
        Ok(Self {
            slack,
            slack_bus: net.slack_bus(),
            factor,
        })
    }

    pub fn symbolic(&self) -> Option<Arc<SymbolicLdl>> {
        self.factor.as_ref().map(|f| Arc::clone(f.symbolic()))
    }

    pub fn slack_bus(&self) -> BusId {
        self.slack_bus
    }

    /// Angles for the given per-bus injections, slack angle fixed to 0. The
    /// slack row is dropped, so the slack bus absorbs any imbalance.
    pub fn solve(&self, injections: &[f64]) -> Vec<f64> {
        let Some(factor) = &self.factor else {
            return vec![0.0; injections.len()];
        };
        let rhs: Vec<f64> = injections
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != self.slack)
            .map(|(_, &p)| p)
            .collect();
        let x = factor.solve(&rhs);
        let mut angles = Vec::with_capacity(injections.len());
        angles.extend_from_slice(&x[..self.slack]);
        angles.push(0.0);
        angles.extend_from_slice(&x[self.slack..]);
        angles
    }

    /// Rank-one correction for removing `line` from the factored network.
    pub fn outage_update(&self, net: &Network, line: &Line) -> Result<OutageUpdate> {
        let n = net.bus_count();
        let u = net.bus_index(line.from_bus).expect("validated endpoint");
        let v = net.bus_index(line.to_bus).expect("validated endpoint");
        let mut e = vec![0.0; n];
        e[u] += 1.0;
        e[v] -= 1.0;
        let z = self.solve(&e);
        // 1 - b * (effective resistance between u and v)
        let denom = 1.0 - line.susceptance * (z[u] - z[v]);
        if denom <= ISLANDING_TOL {
            return Err(Error::Islanding(line.id));
        }
        Ok(OutageUpdate {
            from: u,
            to: v,
            scale: line.susceptance / denom,
            z,
        })
    }
}

/// Below this, `1 - b·R_eff` is taken as zero, i.e. the line is a bridge.
const ISLANDING_TOL: f64 = 1e-10;

fn reduced_matrix(net: &Network, slack: usize) -> SymCsc {
    let n = net.bus_count();
    let shift = |i: usize| if i > slack { i - 1 } else { i };
    let triplets = net
        .in_service_lines()
        .flat_map(|l| line_triplets(net, l))
        .filter(|&(i, j, _)| i != slack && j != slack)
        .map(|(i, j, v)| (shift(i), shift(j), v));
    SymCsc::from_triplets(n.saturating_sub(1), triplets)
}

/// Sherman-Morrison update mapping base-case angles to post-outage angles for
/// the same injections.
#[derive(Debug, Clone)]
pub struct OutageUpdate {
    from: usize,
    to: usize,
    scale: f64,
    z: Vec<f64>,
}

impl OutageUpdate {
    pub fn apply(&self, base_angles: &[f64]) -> Vec<f64> {
        let k = self.scale * (base_angles[self.from] - base_angles[self.to]);
        base_angles
            .iter()
            .zip(&self.z)
            .map(|(t, z)| t + k * z)
            .collect()
    }
}

/// Solves the DC load flow with the network's own injections.
pub fn solve_angles(net: &Network) -> Result<AngleSolution> {
    let solver = DcSolver::new(net)?;
    Ok(AngleSolution::new(
        solver.solve(&net.injections()),
        net.slack_bus(),
    ))
}

pub fn line_flow(net: &Network, line: &Line, angles: &[f64]) -> f64 {
    let u = net.bus_index(line.from_bus).expect("validated endpoint");
    let v = net.bus_index(line.to_bus).expect("validated endpoint");
    line.susceptance * (angles[u] - angles[v])
}

pub fn line_flows(net: &Network, sol: &AngleSolution) -> FlowSolution {
    FlowSolution {
        flows: net
            .in_service_lines()
            .map(|l| (l.id, line_flow(net, l, sol.angles())))
            .collect(),
    }
}

/// Copy of `net` with `line` out of service. Bridges are rejected.
pub fn apply_outage(net: &Network, line: LineId) -> Result<Network> {
    if net.is_islanding(line)? {
        return Err(Error::Islanding(line));
    }
    net.with_line_status(line, false)
}

/// Copy of `net` with `line` back in service.
pub fn restore_line(net: &Network, line: LineId) -> Result<Network> {
    net.with_line_status(line, true)
}
