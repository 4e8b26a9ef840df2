//! Independent oracles shared by the integration tests. Nothing here calls
//! the library's own solvers: angles come from a dense nalgebra solve.
#![allow(dead_code)]

use std::collections::BTreeMap;

use area_angle::model::{AreaPartition, Network};
use area_angle::{BusId, LineId};
use nalgebra::{DMatrix, DVector};

/// Dense DC angles with the slack at zero, indexed like `net.buses()`.
pub fn dense_angles(net: &Network, injections: &[f64]) -> Vec<f64> {
    let n = net.bus_count();
    let mut b = DMatrix::<f64>::zeros(n, n);
    for l in net.in_service_lines() {
        let i = net.bus_index(l.from_bus).unwrap();
        let j = net.bus_index(l.to_bus).unwrap();
        b[(i, i)] += l.susceptance;
        b[(j, j)] += l.susceptance;
        b[(i, j)] -= l.susceptance;
        b[(j, i)] -= l.susceptance;
    }
    let s = net.bus_index(net.slack_bus()).unwrap();
    let keep: Vec<usize> = (0..n).filter(|&i| i != s).collect();
    let m = keep.len();
    let mut theta = vec![0.0; n];
    if m == 0 {
        return theta;
    }
    let r = DMatrix::from_fn(m, m, |i, j| b[(keep[i], keep[j])]);
    let p = DVector::from_fn(m, |i, _| injections[keep[i]]);
    let x = r.lu().solve(&p).expect("reduced Laplacian is nonsingular");
    for (k, &i) in keep.iter().enumerate() {
        theta[i] = x[k];
    }
    theta
}

pub fn dense_flows(net: &Network, theta: &[f64]) -> BTreeMap<LineId, f64> {
    net.in_service_lines()
        .map(|l| {
            let i = net.bus_index(l.from_bus).unwrap();
            let j = net.bus_index(l.to_bus).unwrap();
            (l.id, l.susceptance * (theta[i] - theta[j]))
        })
        .collect()
}

/// Effective susceptance between the side-a and side-b supernodes of the
/// isolated area: merge each side, ground side b, push one unit in at side a.
pub fn supernode_susceptance(net: &Network, part: &AreaPartition) -> f64 {
    let a: Vec<BusId> = part.side_a().to_vec();
    let b: Vec<BusId> = part.side_b().to_vec();
    // node 0 = side a, node 1 = side b, then interior
    let mut node = BTreeMap::new();
    for &x in &a {
        node.insert(x, 0usize);
    }
    for &x in &b {
        node.insert(x, 1usize);
    }
    for (k, &x) in part.interior().iter().enumerate() {
        node.insert(x, k + 2);
    }
    let n = part.interior().len() + 2;
    let mut lap = DMatrix::<f64>::zeros(n, n);
    for l in net.in_service_lines() {
        let (Some(&i), Some(&j)) = (node.get(&l.from_bus), node.get(&l.to_bus)) else {
            continue;
        };
        if i == j {
            continue;
        }
        lap[(i, i)] += l.susceptance;
        lap[(j, j)] += l.susceptance;
        lap[(i, j)] -= l.susceptance;
        lap[(j, i)] -= l.susceptance;
    }
    // ground node 1
    let keep: Vec<usize> = (0..n).filter(|&i| i != 1).collect();
    let m = keep.len();
    let r = DMatrix::from_fn(m, m, |i, j| lap[(keep[i], keep[j])]);
    let mut rhs = DVector::zeros(m);
    rhs[0] = 1.0;
    let x = r.lu().solve(&rhs).expect("area is connected");
    1.0 / x[0]
}

/// Internal limited lines all within their limits (plus `slack`).
pub fn feasible(net: &Network, part: &AreaPartition, injections: &[f64], slack: f64) -> bool {
    let theta = dense_angles(net, injections);
    let flows = dense_flows(net, &theta);
    net.in_service_lines()
        .filter(|l| part.is_internal(l))
        .all(|l| match l.limit {
            Some(limit) => flows[&l.id].abs() <= limit + slack,
            None => true,
        })
}

/// Largest step along `delta` keeping every internal limit, by bisection on
/// feasibility. `None` when no step up to `cap` is infeasible.
pub fn bisect_lambda(
    net: &Network,
    part: &AreaPartition,
    delta: &[f64],
    cap: f64,
) -> Option<(f64, Vec<LineId>)> {
    let base = net.injections();
    let at = |lambda: f64| -> Vec<f64> {
        base.iter()
            .zip(delta)
            .map(|(p, d)| p + lambda * d)
            .collect()
    };
    let violators = |lambda: f64| -> Vec<LineId> {
        let theta = dense_angles(net, &at(lambda));
        let flows = dense_flows(net, &theta);
        net.in_service_lines()
            .filter(|l| part.is_internal(l))
            .filter(|l| l.limit.is_some_and(|lim| flows[&l.id].abs() > lim + 1e-9))
            .map(|l| l.id)
            .collect()
    };
    if !violators(0.0).is_empty() {
        return Some((0.0, violators(0.0)));
    }
    let mut hi = 1.0;
    while violators(hi).is_empty() {
        hi *= 2.0;
        if hi > cap {
            return None;
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if violators(mid).is_empty() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some((lo, violators(hi)))
}
