//! Seeded synthetic cases.
//!
//! Corridor topologies place the area as a grid between a generating north
//! region and a loading south region. Each grid column is one north-south
//! path; the top row is side a and the bottom row side b. With the ladder
//! topology the area is a cutset (every north-south path crosses it) and has
//! no interior injections. The mesh topology adds chords, interior
//! injections and optionally a single external bypass line. The random
//! topology is an arbitrary connected graph with a breadth-first area.

use std::collections::{BTreeSet, VecDeque};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dcflow::{line_flows, solve_angles};
use crate::error::{Error, Result};
use crate::model::{partition_area, AreaSpec, Bus, BusId, Line, LineId, Network};
use crate::reduction;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    Ladder,
    Mesh,
    Random,
}

impl FromStr for Topology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ladder" => Ok(Self::Ladder),
            "mesh" => Ok(Self::Mesh),
            "random" => Ok(Self::Random),
            other => Err(Error::Generator(format!("unknown topology {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    pub buses: usize,
    /// Parallel north-south paths through the area (grid columns).
    pub paths: usize,
    pub seed: u64,
    pub topology: Topology,
    /// Target line count; extra lines are chords inside the area.
    pub lines: Option<usize>,
    /// Susceptance of a north-south bypass line as a fraction of the area
    /// susceptance. Mesh topology only.
    pub bypass: Option<f64>,
}

impl GenParams {
    pub fn new(buses: usize, paths: usize, seed: u64, topology: Topology) -> Self {
        Self {
            buses,
            paths,
            seed,
            topology,
            lines: None,
            bypass: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedCase {
    pub network: Network,
    pub area: AreaSpec,
    /// Line id of the bypass, if one was added.
    pub bypass_line: Option<LineId>,
}

/// Values on a 1e-3 grid keep sums exact enough for the balance check.
fn milli(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0
}

struct Builder {
    buses: Vec<Bus>,
    lines: Vec<Line>,
}

impl Builder {
    fn new(n: usize) -> Self {
        Self {
            buses: (1..=n as u32)
                .map(|id| Bus {
                    id: BusId(id),
                    name: format!("bus-{id}"),
                    injection: 0.0,
                })
                .collect(),
            lines: Vec::new(),
        }
    }

    /// Adds a line between 0-based bus positions.
    fn line(&mut self, u: usize, v: usize, susceptance: f64) -> LineId {
        let id = LineId(self.lines.len() as u32 + 1);
        self.lines.push(Line {
            id,
            from_bus: self.buses[u].id,
            to_bus: self.buses[v].id,
            susceptance: milli(susceptance).max(0.001),
            limit: None,
            in_service: true,
        });
        id
    }

    /// Sets the last listed bus so that injections balance exactly.
    fn balance(&mut self, sink: usize) {
        let others: f64 = self
            .buses
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != sink)
            .map(|(_, b)| b.injection)
            .sum();
        self.buses[sink].injection = -others;
    }

    fn connect_tree(&mut self, rng: &mut ChaCha8Rng, nodes: &[usize], lo: f64, hi: f64) {
        for k in 1..nodes.len() {
            let parent = nodes[rng.gen_range(0..k)];
            self.line(parent, nodes[k], rng.gen_range(lo..hi));
        }
    }
}

/// Builds a case from generator parameters. The output is a pure function of
/// the parameters.
pub fn generate(params: &GenParams) -> Result<GeneratedCase> {
    match params.topology {
        Topology::Ladder | Topology::Mesh => corridor(params),
        Topology::Random => random_area(params),
    }
}

fn corridor(params: &GenParams) -> Result<GeneratedCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let paths = params.paths;
    if paths == 0 {
        return Err(Error::Generator("paths must be at least 1".into()));
    }
    let region = (params.buses / 20).max(1);
    let rows = params.buses.saturating_sub(2 * region) / paths;
    if rows < 2 {
        return Err(Error::Generator(format!(
            "{} buses cannot hold {paths} paths with two border rows",
            params.buses
        )));
    }
    let north_len = params.buses - rows * paths - region;
    let north: Vec<usize> = (0..north_len).collect();
    let grid = |r: usize, c: usize| north_len + r * paths + c;
    let south: Vec<usize> = (north_len + rows * paths..params.buses).collect();
    let mesh = params.topology == Topology::Mesh;

    let mut b = Builder::new(params.buses);
    b.connect_tree(&mut rng, &north, 20.0, 40.0);
    b.connect_tree(&mut rng, &south, 20.0, 40.0);
    for r in 0..rows {
        for c in 0..paths {
            if r + 1 < rows {
                b.line(grid(r, c), grid(r + 1, c), rng.gen_range(5.0..15.0));
            }
            if c + 1 < paths {
                b.line(grid(r, c), grid(r, c + 1), rng.gen_range(5.0..15.0));
            }
        }
    }
    for c in 0..paths {
        let n = north[rng.gen_range(0..north.len())];
        b.line(n, grid(0, c), rng.gen_range(30.0..60.0));
        let s = south[rng.gen_range(0..south.len())];
        b.line(grid(rows - 1, c), s, rng.gen_range(30.0..60.0));
    }

    let grid_lines = b.lines.len();
    let target = params.lines.unwrap_or(if mesh {
        grid_lines + paths * rows / 4
    } else {
        grid_lines
    });
    if target < grid_lines {
        return Err(Error::Generator(format!(
            "{target} lines is below the {grid_lines} needed for the topology"
        )));
    }
    if target > grid_lines && rows * paths < 2 {
        return Err(Error::Generator("area too small for extra lines".into()));
    }
    while b.lines.len() < target {
        // chords stay local so the area keeps a corridor shape
        let r = rng.gen_range(0..rows);
        let c = rng.gen_range(0..paths);
        let r2 = (r + rng.gen_range(0..=2)).min(rows - 1);
        let c2 = (c + rng.gen_range(0..=2)).min(paths - 1);
        if (r, c) == (r2, c2) {
            continue;
        }
        b.line(grid(r, c), grid(r2, c2), rng.gen_range(2.0..12.0));
    }

    for &n in &north {
        b.buses[n].injection = milli(rng.gen_range(5.0..20.0));
    }
    if mesh {
        for r in 1..rows - 1 {
            for c in 0..paths {
                b.buses[grid(r, c)].injection = milli(rng.gen_range(-1.0..1.0));
            }
        }
    }
    let total_gen: f64 = b.buses.iter().map(|x| x.injection).sum();
    let shares: Vec<f64> = south.iter().map(|_| rng.gen_range(0.5..1.5)).collect();
    let share_sum: f64 = shares.iter().sum();
    for (&s, share) in south.iter().zip(&shares) {
        b.buses[s].injection = milli(-total_gen * share / share_sum);
    }
    b.balance(*south.last().expect("south region is nonempty"));

    let id = |i: usize| BusId(i as u32 + 1);
    let area_buses: Vec<BusId> = (0..rows)
        .flat_map(|r| (0..paths).map(move |c| (r, c)))
        .map(|(r, c)| id(grid(r, c)))
        .collect();
    let side_a: Vec<BusId> = (0..paths).map(|c| id(grid(0, c))).collect();
    let side_b: Vec<BusId> = (0..paths).map(|c| id(grid(rows - 1, c))).collect();
    let slack = id(north[0]);

    let mut bypass_line = None;
    if let (Some(fraction), true) = (params.bypass, mesh) {
        let net = Network::new(b.buses.clone(), b.lines.clone(), slack)?;
        let area = AreaSpec::new(area_buses.clone(), side_a.clone(), side_b.clone(), &net)?;
        let part = partition_area(&net, &area)?;
        let reduced = reduction::reduce_area(&net, &part, &solve_angles(&net)?)?;
        let susceptance = milli(fraction * reduced.b_area).max(0.001);
        let id = LineId(b.lines.len() as u32 + 1);
        b.lines.push(Line {
            id,
            from_bus: BusId(north[0] as u32 + 1),
            to_bus: BusId(south[0] as u32 + 1),
            susceptance,
            limit: None,
            in_service: true,
        });
        bypass_line = Some(id);
    }

    finish(&mut rng, b, slack, area_buses, side_a, side_b, bypass_line)
}

/// Sets limits from base flows and validates the result.
fn finish(
    rng: &mut ChaCha8Rng,
    b: Builder,
    slack: BusId,
    area_buses: Vec<BusId>,
    side_a: Vec<BusId>,
    side_b: Vec<BusId>,
    bypass_line: Option<LineId>,
) -> Result<GeneratedCase> {
    let Builder { buses, mut lines } = b;
    let net = Network::new(buses.clone(), lines.clone(), slack)?;
    let flows = line_flows(&net, &solve_angles(&net)?);
    for line in &mut lines {
        let f = flows.flow(line.id).unwrap_or(0.0).abs();
        line.limit = Some(milli((f * rng.gen_range(1.3..3.0)).max(1.0)));
    }
    let network = Network::new(buses, lines, slack)?;
    let area = AreaSpec::new(area_buses, side_a, side_b, &network)?;
    partition_area(&network, &area)?;
    Ok(GeneratedCase {
        network,
        area,
        bypass_line,
    })
}

/// Random connected graph with a breadth-first area and random injections.
fn random_area(params: &GenParams) -> Result<GeneratedCase> {
    let n = params.buses;
    if n < 3 {
        return Err(Error::Generator(
            "random topology needs at least 3 buses".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut b = Builder::new(n);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    b.connect_tree(&mut rng, &order, 1.0, 20.0);
    let target = params.lines.unwrap_or(n + n / 2).max(n - 1);
    while b.lines.len() < target {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v {
            b.line(u, v, rng.gen_range(1.0..20.0));
        }
    }
    for bus in &mut b.buses {
        bus.injection = milli(rng.gen_range(-10.0..10.0));
    }
    b.balance(n - 1);

    let mut adj = vec![Vec::new(); n];
    for l in &b.lines {
        let (u, v) = (l.from_bus.0 as usize - 1, l.to_bus.0 as usize - 1);
        adj[u].push(v);
        adj[v].push(u);
    }
    let size = rng.gen_range(2.max(n / 3)..=(2 * n / 3).max(2));
    let root = rng.gen_range(0..n);
    let mut area = BTreeSet::new();
    let mut queue = VecDeque::from([root]);
    area.insert(root);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if area.len() < size && area.insert(w) {
                queue.push_back(w);
            }
        }
    }

    let mut border: BTreeSet<usize> = b
        .lines
        .iter()
        .map(|l| (l.from_bus.0 as usize - 1, l.to_bus.0 as usize - 1))
        .filter(|(u, v)| area.contains(u) != area.contains(v))
        .map(|(u, v)| if area.contains(&u) { u } else { v })
        .collect();
    let mut spare: Vec<usize> = area.difference(&border).copied().collect();
    spare.shuffle(&mut rng);
    while border.len() < 2 {
        border.insert(spare.pop().expect("area has at least two buses"));
    }
    let mut border: Vec<usize> = border.into_iter().collect();
    border.shuffle(&mut rng);
    let split = rng.gen_range(1..border.len());

    let id = |i: &usize| BusId(*i as u32 + 1);
    let area_buses = area.iter().map(id).collect();
    let side_a = border[..split].iter().map(id).collect();
    let side_b = border[split..].iter().map(id).collect();
    finish(&mut rng, b, BusId(1), area_buses, side_a, side_b, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph;

    #[test]
    fn deterministic_for_seed() {
        let p = GenParams::new(30, 3, 1, Topology::Mesh);
        let a = generate(&p).unwrap();
        let b = generate(&p).unwrap();
        assert_eq!(a.network.to_json(), b.network.to_json());
        assert_eq!(a.area.to_json(), b.area.to_json());
        let c = generate(&GenParams::new(30, 3, 2, Topology::Mesh)).unwrap();
        assert_ne!(a.network.to_json(), c.network.to_json());
    }

    #[test]
    fn ladder_is_cutset() {
        for seed in 0..10 {
            let case = generate(&GenParams::new(40, 4, seed, Topology::Ladder)).unwrap();
            let net = &case.network;
            let outside: Vec<usize> = (0..net.bus_count())
                .filter(|&i| !case.area.contains(net.buses()[i].id))
                .collect();
            let local = |b: BusId| outside.iter().position(|&i| net.buses()[i].id == b);
            let edges: Vec<(usize, usize)> = net
                .lines()
                .iter()
                .filter_map(|l| Some((local(l.from_bus)?, local(l.to_bus)?)))
                .collect();
            assert_eq!(
                graph::component_count(outside.len(), &edges),
                2,
                "seed {seed}"
            );
        }
    }

    #[test]
    fn every_line_is_limited() {
        for topology in [Topology::Ladder, Topology::Mesh, Topology::Random] {
            let case = generate(&GenParams::new(30, 3, 7, topology)).unwrap();
            assert!(case.network.lines().iter().all(|l| l.limit.is_some()));
        }
    }

    #[test]
    fn infeasible_parameters() {
        assert!(matches!(
            generate(&GenParams::new(5, 4, 0, Topology::Ladder)),
            Err(Error::Generator(_))
        ));
        assert!(matches!(
            generate(&GenParams::new(20, 0, 0, Topology::Mesh)),
            Err(Error::Generator(_))
        ));
        let mut p = GenParams::new(30, 3, 0, Topology::Ladder);
        p.lines = Some(3);
        assert!(matches!(generate(&p), Err(Error::Generator(_))));
        assert!("spiral".parse::<Topology>().is_err());
    }

    #[test]
    fn line_target_is_met() {
        let mut p = GenParams::new(400, 18, 3, Topology::Mesh);
        p.lines = Some(1000);
        let case = generate(&p).unwrap();
        assert_eq!(case.network.bus_count(), 400);
        assert_eq!(case.network.lines().len(), 1000);
    }
}
