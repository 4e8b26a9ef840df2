//! Small reference networks.
//!
//! The five-bus network has north border buses 1 and 2, a hub bus 3 and
//! south border buses 4 and 5. Lines 1-4 (30 pu) join the north buses to the
//! hub, lines 5-6 (10 pu) run 3-4 and lines 7-8 (40 pu) run 3-5. The north
//! buses each generate 50 pu; bus 4 draws 20 pu and bus 5 draws 80 pu.

use crate::model::{AreaSpec, Bus, BusId, Line, LineId, Network};

pub const FIVE_BUS_CASE: &str = r#"{
  "slack_bus": 3,
  "buses": [
    {"id": 1, "name": "north-1", "injection": 50.0},
    {"id": 2, "name": "north-2", "injection": 50.0},
    {"id": 3, "name": "hub", "injection": 0.0},
    {"id": 4, "name": "south-4", "injection": -20.0},
    {"id": 5, "name": "south-5", "injection": -80.0}
  ],
  "lines": [
    {"id": 1, "from": 1, "to": 3, "susceptance": 30.0, "limit": null, "in_service": true},
    {"id": 2, "from": 1, "to": 3, "susceptance": 30.0, "limit": null, "in_service": true},
    {"id": 3, "from": 2, "to": 3, "susceptance": 30.0, "limit": null, "in_service": true},
    {"id": 4, "from": 2, "to": 3, "susceptance": 30.0, "limit": null, "in_service": true},
    {"id": 5, "from": 3, "to": 4, "susceptance": 10.0, "limit": null, "in_service": true},
    {"id": 6, "from": 3, "to": 4, "susceptance": 10.0, "limit": null, "in_service": true},
    {"id": 7, "from": 3, "to": 5, "susceptance": 40.0, "limit": null, "in_service": true},
    {"id": 8, "from": 3, "to": 5, "susceptance": 40.0, "limit": null, "in_service": true}
  ]
}"#;

pub const FIVE_BUS_AREA: &str =
    r#"{"area_buses": [1, 2, 3, 4, 5], "side_a": [1, 2], "side_b": [4, 5]}"#;

fn bus(id: u32, injection: f64) -> Bus {
    Bus {
        id: BusId(id),
        name: format!("bus-{id}"),
        injection,
    }
}

fn line(id: u32, from: u32, to: u32, susceptance: f64, limit: Option<f64>) -> Line {
    Line {
        id: LineId(id),
        from_bus: BusId(from),
        to_bus: BusId(to),
        susceptance,
        limit,
        in_service: true,
    }
}

pub fn five_bus() -> Network {
    crate::model::load_case(FIVE_BUS_CASE.as_bytes()).expect("five-bus fixture is valid")
}

/// Five-bus network with the same flow limit on every line.
pub fn five_bus_with_limit(limit: f64) -> Network {
    let mut case = five_bus().to_case();
    for l in &mut case.lines {
        l.limit = Some(limit);
    }
    Network::from_case(case).expect("five-bus fixture is valid")
}

pub fn five_bus_area(net: &Network) -> AreaSpec {
    crate::model::load_area_spec(FIVE_BUS_AREA.as_bytes(), net).expect("five-bus area is valid")
}

/// Buses 1 and 2 joined by one line carrying 1 pu.
pub fn two_bus() -> Network {
    Network::new(
        vec![bus(1, 1.0), bus(2, -1.0)],
        vec![line(1, 1, 2, 1.0, None)],
        BusId(2),
    )
    .expect("two-bus fixture is valid")
}

/// Parallel lines between bus 1 (generating `power`) and bus 2 (slack,
/// consuming it). Line ids start at 1.
pub fn three_parallel(susceptances: &[f64], power: f64, limits: Option<&[f64]>) -> Network {
    let lines = susceptances
        .iter()
        .enumerate()
        .map(|(i, &b)| line(i as u32 + 1, 1, 2, b, limits.map(|l| l[i])))
        .collect();
    Network::new(vec![bus(1, power), bus(2, -power)], lines, BusId(2))
        .expect("parallel-line fixture is valid")
}

/// The whole parallel-line network as an area with bus 1 on side a.
pub fn three_parallel_area(net: &Network) -> AreaSpec {
    AreaSpec::new([BusId(1), BusId(2)], [BusId(1)], [BusId(2)], net)
        .expect("parallel-line area is valid")
}
