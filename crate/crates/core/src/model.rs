//! Network data model and the JSON case format.
//!
//! A [`Network`] is immutable once built: buses and lines are sorted by id,
//! every structural invariant is checked in [`Network::new`], and outage
//! variants are produced as modified copies.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph;

/// Injections must sum to zero within this tolerance (lossless DC balance).
pub const BALANCE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BusId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LineId(pub u32);

impl fmt::Display for BusId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for LineId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bus {
    pub id: BusId,
    #[serde(default)]
    pub name: String,
    /// Net injection in per-unit; positive is generation.
    pub injection: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub id: LineId,
    #[serde(rename = "from")]
    pub from_bus: BusId,
    #[serde(rename = "to")]
    pub to_bus: BusId,
    pub susceptance: f64,
    /// Flow limit in per-unit; `None` means unconstrained.
    pub limit: Option<f64>,
    #[serde(default = "in_service_default")]
    pub in_service: bool,
}

fn in_service_default() -> bool {
    true
}

impl Line {
    pub fn other_end(&self, bus: BusId) -> BusId {
        if bus == self.from_bus {
            self.to_bus
        } else {
            self.from_bus
        }
    }
}

/// On-disk case document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseFile {
    pub slack_bus: BusId,
    pub buses: Vec<Bus>,
    pub lines: Vec<Line>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    buses: Vec<Bus>,
    lines: Vec<Line>,
    slack_bus: BusId,
    bus_index: HashMap<BusId, usize>,
    line_index: HashMap<LineId, usize>,
}

impl Network {
    /// Builds and validates a network. Buses and lines are stored sorted by id.
    pub fn new(mut buses: Vec<Bus>, mut lines: Vec<Line>, slack_bus: BusId) -> Result<Self> {
        buses.sort_by_key(|b| b.id);
        lines.sort_by_key(|l| l.id);

        if buses.is_empty() {
            return Err(Error::InvalidNetwork("network has no buses".into()));
        }
        if let Some(w) = buses.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(Error::InvalidNetwork(format!(
                "duplicate bus id {}",
                w[0].id
            )));
        }
        if let Some(w) = lines.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(Error::InvalidNetwork(format!(
                "duplicate line id {}",
                w[0].id
            )));
        }
        let bus_index: HashMap<BusId, usize> =
            buses.iter().enumerate().map(|(i, b)| (b.id, i)).collect();
        let line_index: HashMap<LineId, usize> =
            lines.iter().enumerate().map(|(i, l)| (l.id, i)).collect();

        for bus in &buses {
            if !bus.injection.is_finite() {
                return Err(Error::InvalidNetwork(format!(
                    "bus {} has non-finite injection",
                    bus.id
                )));
            }
        }
        if !bus_index.contains_key(&slack_bus) {
            return Err(Error::InvalidNetwork(format!(
                "slack bus {slack_bus} does not exist"
            )));
        }
        for line in &lines {
            for end in [line.from_bus, line.to_bus] {
                if !bus_index.contains_key(&end) {
                    return Err(Error::InvalidNetwork(format!(
                        "line {} references unknown bus {end}",
                        line.id
                    )));
                }
            }
            if line.from_bus == line.to_bus {
                return Err(Error::InvalidNetwork(format!(
                    "line {} connects bus {} to itself",
                    line.id, line.from_bus
                )));
            }
            if !(line.susceptance.is_finite() && line.susceptance > 0.0) {
                return Err(Error::InvalidNetwork(format!(
                    "line {} has non-positive susceptance {}",
                    line.id, line.susceptance
                )));
            }
            if let Some(limit) = line.limit {
                if !(limit.is_finite() && limit > 0.0) {
                    return Err(Error::InvalidNetwork(format!(
                        "line {} has non-positive limit {limit}",
                        line.id
                    )));
                }
            }
        }

        let imbalance: f64 = buses.iter().map(|b| b.injection).sum();
        if imbalance.abs() > BALANCE_TOL {
            return Err(Error::InvalidNetwork(format!(
                "injections sum to {imbalance}, expected 0"
            )));
        }

        let net = Self {
            buses,
            lines,
            slack_bus,
            bus_index,
            line_index,
        };
        let edges = net.in_service_edges();
        let components = graph::component_count(net.buses.len(), &edges);
        if components > 1 {
            return Err(Error::InvalidNetwork(format!(
                "in-service graph has {components} components"
            )));
        }
        Ok(net)
    }

    pub fn from_case(case: CaseFile) -> Result<Self> {
        Self::new(case.buses, case.lines, case.slack_bus)
    }

    pub fn to_case(&self) -> CaseFile {
        CaseFile {
            slack_bus: self.slack_bus,
            buses: self.buses.clone(),
            lines: self.lines.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_case()).expect("case serializes")
    }

    pub fn buses(&self) -> &[Bus] {
        &self.buses
    }

    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    pub fn slack_bus(&self) -> BusId {
        self.slack_bus
    }

    pub fn bus_count(&self) -> usize {
        self.buses.len()
    }

    /// Position of a bus in [`Network::buses`], which is also its index in
    /// every per-bus vector produced by this crate.
    pub fn bus_index(&self, id: BusId) -> Option<usize> {
        self.bus_index.get(&id).copied()
    }

    pub fn line(&self, id: LineId) -> Option<&Line> {
        self.line_index.get(&id).map(|&i| &self.lines[i])
    }

    pub fn injections(&self) -> Vec<f64> {
        self.buses.iter().map(|b| b.injection).collect()
    }

    pub fn in_service_lines(&self) -> impl Iterator<Item = &Line> {
        self.lines.iter().filter(|l| l.in_service)
    }

    fn in_service_edges(&self) -> Vec<(usize, usize)> {
        self.in_service_lines()
            .map(|l| (self.bus_index[&l.from_bus], self.bus_index[&l.to_bus]))
            .collect()
    }

    /// In-service lines whose removal would disconnect the network.
    pub fn bridges(&self) -> BTreeSet<LineId> {
        let active: Vec<&Line> = self.in_service_lines().collect();
        let edges = self.in_service_edges();
        graph::bridges(self.buses.len(), &edges)
            .into_iter()
            .zip(active)
            .filter_map(|(bridge, line)| bridge.then_some(line.id))
            .collect()
    }

    /// True iff taking `line` out of service disconnects the network.
    pub fn is_islanding(&self, line: LineId) -> Result<bool> {
        let l = self.line(line).ok_or(Error::UnknownLine(line))?;
        if !l.in_service {
            return Err(Error::LineOutOfService(line));
        }
        Ok(self.bridges().contains(&line))
    }

    /// Copy of the network with the same topology and new injections.
    pub fn with_injections(&self, injections: &[f64]) -> Result<Self> {
        if injections.len() != self.buses.len() {
            return Err(Error::DimensionMismatch {
                expected: self.buses.len(),
                got: injections.len(),
            });
        }
        let buses = self
            .buses
            .iter()
            .zip(injections)
            .map(|(b, &p)| Bus {
                injection: p,
                ..b.clone()
            })
            .collect();
        Self::new(buses, self.lines.clone(), self.slack_bus)
    }

    /// Copy with one line's service flag changed. Validation is rerun, so
    /// removing a bridge fails with a disconnection error.
    pub(crate) fn with_line_status(&self, line: LineId, in_service: bool) -> Result<Self> {
        let idx = *self.line_index.get(&line).ok_or(Error::UnknownLine(line))?;
        let mut lines = self.lines.clone();
        lines[idx].in_service = in_service;
        Self::new(self.buses.clone(), lines, self.slack_bus)
    }
}

/// Parses and validates a case document.
pub fn load_case<R: Read>(source: R) -> Result<Network> {
    let case: CaseFile = serde_json::from_reader(source)?;
    Network::from_case(case)
}

/// On-disk area document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AreaFile {
    pub area_buses: Vec<BusId>,
    pub side_a: Vec<BusId>,
    pub side_b: Vec<BusId>,
}

/// A designated area with its two border sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AreaSpec {
    area_buses: BTreeSet<BusId>,
    side_a: BTreeSet<BusId>,
    side_b: BTreeSet<BusId>,
}

impl AreaSpec {
    pub fn new(
        area_buses: impl IntoIterator<Item = BusId>,
        side_a: impl IntoIterator<Item = BusId>,
        side_b: impl IntoIterator<Item = BusId>,
        net: &Network,
    ) -> Result<Self> {
        let area_buses: BTreeSet<BusId> = area_buses.into_iter().collect();
        let side_a: BTreeSet<BusId> = side_a.into_iter().collect();
        let side_b: BTreeSet<BusId> = side_b.into_iter().collect();

        for &bus in area_buses.iter().chain(&side_a).chain(&side_b) {
            if net.bus_index(bus).is_none() {
                return Err(Error::UnknownBus(bus));
            }
        }
        if side_a.is_empty() {
            return Err(Error::InvalidArea("side_a is empty".into()));
        }
        if side_b.is_empty() {
            return Err(Error::InvalidArea("side_b is empty".into()));
        }
        if let Some(bus) = side_a.intersection(&side_b).next() {
            return Err(Error::InvalidArea(format!("bus {bus} is on both sides")));
        }
        if let Some(bus) = side_a
            .iter()
            .chain(&side_b)
            .find(|b| !area_buses.contains(b))
        {
            return Err(Error::InvalidArea(format!(
                "side bus {bus} is not in area_buses"
            )));
        }
        Ok(Self {
            area_buses,
            side_a,
            side_b,
        })
    }

    pub fn area_buses(&self) -> &BTreeSet<BusId> {
        &self.area_buses
    }

    pub fn side_a(&self) -> &BTreeSet<BusId> {
        &self.side_a
    }

    pub fn side_b(&self) -> &BTreeSet<BusId> {
        &self.side_b
    }

    pub fn contains(&self, bus: BusId) -> bool {
        self.area_buses.contains(&bus)
    }

    pub fn to_file(&self) -> AreaFile {
        AreaFile {
            area_buses: self.area_buses.iter().copied().collect(),
            side_a: self.side_a.iter().copied().collect(),
            side_b: self.side_b.iter().copied().collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("area serializes")
    }
}

/// Parses an area document and checks it against `net`.
pub fn load_area_spec<R: Read>(source: R, net: &Network) -> Result<AreaSpec> {
    let file: AreaFile = serde_json::from_reader(source)?;
    AreaSpec::new(file.area_buses, file.side_a, file.side_b, net)
}

/// Position of a bus inside the area.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    /// Index into [`AreaPartition::border`].
    Border(usize),
    /// Index into [`AreaPartition::interior`].
    Interior(usize),
}

/// Border/interior split of an area. Border ordering is side a ascending,
/// then side b ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct AreaPartition {
    border: Vec<BusId>,
    interior: Vec<BusId>,
    side_a_len: usize,
    ties: Vec<LineId>,
    roles: BTreeMap<BusId, Role>,
}

impl AreaPartition {
    pub fn border(&self) -> &[BusId] {
        &self.border
    }

    pub fn interior(&self) -> &[BusId] {
        &self.interior
    }

    pub fn ties(&self) -> &[LineId] {
        &self.ties
    }

    pub fn side_a(&self) -> &[BusId] {
        &self.border[..self.side_a_len]
    }

    pub fn side_b(&self) -> &[BusId] {
        &self.border[self.side_a_len..]
    }

    /// Indicator of side a over the border ordering.
    pub fn sigma_a(&self) -> Vec<f64> {
        (0..self.border.len())
            .map(|i| if i < self.side_a_len { 1.0 } else { 0.0 })
            .collect()
    }

    pub fn role(&self, bus: BusId) -> Option<Role> {
        self.roles.get(&bus).copied()
    }

    pub fn contains(&self, bus: BusId) -> bool {
        self.roles.contains_key(&bus)
    }

    /// Both endpoints inside the area.
    pub fn is_internal(&self, line: &Line) -> bool {
        self.contains(line.from_bus) && self.contains(line.to_bus)
    }

    /// Exactly one endpoint inside the area.
    pub fn is_tie(&self, line: &Line) -> bool {
        self.contains(line.from_bus) != self.contains(line.to_bus)
    }

    /// Whether the in-service lines inside the area connect all area buses.
    pub fn internally_connected(&self, net: &Network) -> bool {
        let local: BTreeMap<BusId, usize> = self
            .roles
            .keys()
            .enumerate()
            .map(|(i, &b)| (b, i))
            .collect();
        let edges: Vec<(usize, usize)> = net
            .in_service_lines()
            .filter(|l| self.is_internal(l))
            .map(|l| (local[&l.from_bus], local[&l.to_bus]))
            .collect();
        graph::is_connected(local.len(), &edges)
    }
}

/// Splits the area into border and interior buses and enumerates tie lines.
pub fn partition_area(net: &Network, spec: &AreaSpec) -> Result<AreaPartition> {
    let border: Vec<BusId> = spec.side_a().iter().chain(spec.side_b()).copied().collect();
    let declared: BTreeSet<BusId> = border.iter().copied().collect();

    let mut ties = Vec::new();
    for line in net.in_service_lines() {
        let from_in = spec.contains(line.from_bus);
        let to_in = spec.contains(line.to_bus);
        if from_in != to_in {
            ties.push(line.id);
            let inside = if from_in { line.from_bus } else { line.to_bus };
            if !declared.contains(&inside) {
                return Err(Error::InvalidArea(format!(
                    "bus {inside} carries tie line {} but is not assigned to side_a or side_b",
                    line.id
                )));
            }
        }
    }

    let interior: Vec<BusId> = spec
        .area_buses()
        .iter()
        .filter(|b| !declared.contains(b))
        .copied()
        .collect();

    let mut roles = BTreeMap::new();
    for (i, &b) in border.iter().enumerate() {
        roles.insert(b, Role::Border(i));
    }
    for (i, &b) in interior.iter().enumerate() {
        roles.insert(b, Role::Interior(i));
    }

    let part = AreaPartition {
        side_a_len: spec.side_a().len(),
        border,
        interior,
        ties,
        roles,
    };
    if !part.internally_connected(net) {
        return Err(Error::DegenerateArea(
            "lines inside the area do not connect all area buses".into(),
        ));
    }
    Ok(part)
}
