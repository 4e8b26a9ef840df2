//! Kron (Ward) reduction of an area onto its border buses and the quantities
//! derived from it: area susceptance, border weights, area angle and area
//! power.
//!
//! The area is taken in isolation: only lines with both endpoints inside it
//! enter the reduced matrix, and power arriving over tie lines is folded into
//! the border injections instead.

use std::sync::Arc;

use crate::dcflow::AngleSolution;
use crate::error::{Error, Result};
use crate::model::{AreaPartition, Line, Network, Role};
use crate::sparse::{LdlFactor, SymCsc, SymbolicLdl};

/// Area susceptances at or below this are degenerate.
pub const MIN_AREA_SUSCEPTANCE: f64 = 1e-12;

/// Weights smaller than this in magnitude are reported as omit candidates.
pub const SMALL_WEIGHT: f64 = 0.01;

/// Power arriving at each border bus, in border order.
#[derive(Debug, Clone, PartialEq)]
pub struct BorderInflow {
    /// Injection at the border bus itself.
    pub direct: Vec<f64>,
    /// Net inflow over tie lines.
    pub tie: Vec<f64>,
    /// `direct + tie`.
    pub total: Vec<f64>,
}

pub fn border_inflow(net: &Network, part: &AreaPartition, sol: &AngleSolution) -> BorderInflow {
    inflow_from_angles(net, part, sol.angles())
}

pub(crate) fn inflow_from_angles(
    net: &Network,
    part: &AreaPartition,
    angles: &[f64],
) -> BorderInflow {
    let direct: Vec<f64> = part
        .border()
        .iter()
        .map(|&b| net.buses()[net.bus_index(b).expect("area bus exists")].injection)
        .collect();
    let mut tie = vec![0.0; direct.len()];
    for line in net.in_service_lines().filter(|l| part.is_tie(l)) {
        let (inside, outside) = if part.contains(line.from_bus) {
            (line.from_bus, line.to_bus)
        } else {
            (line.to_bus, line.from_bus)
        };
        let Some(Role::Border(j)) = part.role(inside) else {
            unreachable!("partition assigns every tie bus to the border");
        };
        let ti = angles[net.bus_index(inside).expect("validated")];
        let to = angles[net.bus_index(outside).expect("validated")];
        tie[j] += line.susceptance * (to - ti);
    }
    let total = direct.iter().zip(&tie).map(|(d, t)| d + t).collect();
    BorderInflow { direct, tie, total }
}

/// Border angles in border order.
pub fn border_angles(net: &Network, part: &AreaPartition, sol: &AngleSolution) -> Vec<f64> {
    gather_border(net, part, sol.angles())
}

pub(crate) fn gather_border(net: &Network, part: &AreaPartition, angles: &[f64]) -> Vec<f64> {
    part.border()
        .iter()
        .map(|&b| angles[net.bus_index(b).expect("area bus exists")])
        .collect()
}

/// Reduced border system: `matrix · θ_m = injections`.
#[derive(Debug, Clone, PartialEq)]
pub struct KronReduction {
    pub matrix: Vec<Vec<f64>>,
    pub injections: Vec<f64>,
}

/// Block form of the isolated area's susceptance matrix with the interior
/// block factored.
#[derive(Debug, Clone)]
pub struct AreaBlocks {
    b_mm: Vec<Vec<f64>>,
    /// Row `i` lists the nonzeros `(k, B_mn[i][k])`.
    b_mn: Vec<Vec<(usize, f64)>>,
    b_nn: Option<LdlFactor>,
    p_n: Vec<f64>,
    /// `B_nn⁻¹ P_n`.
    interior_response: Vec<f64>,
}

impl AreaBlocks {
    pub fn assemble(net: &Network, part: &AreaPartition) -> Result<Self> {
        Self::build(net, part, None)
    }

    /// Reuses the interior symbolic analysis of a previous assembly whose
    /// line set was a superset of this one.
    pub fn with_symbolic(
        net: &Network,
        part: &AreaPartition,
        symbolic: Option<Arc<SymbolicLdl>>,
    ) -> Result<Self> {
        Self::build(net, part, symbolic)
    }

    fn build(
        net: &Network,
        part: &AreaPartition,
        symbolic: Option<Arc<SymbolicLdl>>,
    ) -> Result<Self> {
        let m = part.border().len();
        let n = part.interior().len();
        let mut b_mm = vec![vec![0.0; m]; m];
        let mut b_mn_dense: Vec<std::collections::BTreeMap<usize, f64>> =
            vec![Default::default(); m];
        let mut nn_triplets: Vec<(usize, usize, f64)> = (0..n).map(|k| (k, k, 0.0)).collect();

        for line in net.in_service_lines().filter(|l| part.is_internal(l)) {
            let b = line.susceptance;
            let ru = part.role(line.from_bus).expect("internal line");
            let rv = part.role(line.to_bus).expect("internal line");
            for r in [ru, rv] {
                match r {
                    Role::Border(i) => b_mm[i][i] += b,
                    Role::Interior(k) => nn_triplets.push((k, k, b)),
                }
            }
            match (ru, rv) {
                (Role::Border(i), Role::Border(j)) => {
                    b_mm[i][j] -= b;
                    b_mm[j][i] -= b;
                }
                (Role::Border(i), Role::Interior(k)) | (Role::Interior(k), Role::Border(i)) => {
                    *b_mn_dense[i].entry(k).or_insert(0.0) -= b;
                }
                (Role::Interior(k), Role::Interior(l)) => nn_triplets.push((k, l, -b)),
            }
        }

        let p_n: Vec<f64> = part
            .interior()
            .iter()
            .map(|&bus| net.buses()[net.bus_index(bus).expect("area bus exists")].injection)
            .collect();

        let b_nn =
            if n == 0 {
                None
            } else {
                let matrix = SymCsc::from_triplets(n, nn_triplets);
                let factor = match symbolic {
                    Some(sym) => LdlFactor::with_symbolic(sym, &matrix),
                    None => LdlFactor::new(&matrix),
                };
                Some(factor.map_err(|e| {
                    Error::DegenerateArea(format!("interior block is singular ({e})"))
                })?)
            };
        let interior_response = match &b_nn {
            Some(f) => f.solve(&p_n),
            None => Vec::new(),
        };

        Ok(Self {
            b_mm,
            b_mn: b_mn_dense
                .into_iter()
                .map(|row| row.into_iter().collect())
                .collect(),
            b_nn,
            p_n,
            interior_response,
        })
    }

    pub fn interior_symbolic(&self) -> Option<Arc<SymbolicLdl>> {
        self.b_nn.as_ref().map(|f| Arc::clone(f.symbolic()))
    }

    fn border_dim(&self) -> usize {
        self.b_mm.len()
    }

    fn interior_dim(&self) -> usize {
        self.p_n.len()
    }

    /// `B_mn · x` for an interior vector.
    fn mul_mn(&self, x: &[f64]) -> Vec<f64> {
        self.b_mn
            .iter()
            .map(|row| row.iter().map(|&(k, v)| v * x[k]).sum())
            .collect()
    }

    /// Eliminates the interior buses given total border injections.
    pub fn reduce(&self, border_injections: &[f64]) -> KronReduction {
        let m = self.border_dim();
        let n = self.interior_dim();
        let mut matrix = self.b_mm.clone();
        if let Some(factor) = &self.b_nn {
            for j in 0..m {
                if self.b_mn[j].is_empty() {
                    continue;
                }
                let mut col = vec![0.0; n];
                for &(k, v) in &self.b_mn[j] {
                    col[k] = v;
                }
                let y = factor.solve(&col);
                let correction = self.mul_mn(&y);
                for i in 0..m {
                    matrix[i][j] -= correction[i];
                }
            }
            symmetrize(&mut matrix);
        }
        let equivalent = self.mul_mn(&self.interior_response);
        let injections = border_injections
            .iter()
            .zip(&equivalent)
            .map(|(p, e)| p - e)
            .collect();
        KronReduction { matrix, injections }
    }

    /// Reduction of the area with `line` removed, derived from the base
    /// reduction by a rank-one Schur complement update.
    pub fn reduce_after_outage(
        &self,
        base: &KronReduction,
        part: &AreaPartition,
        line: &Line,
        border_injections: &[f64],
    ) -> Result<KronReduction> {
        let m = self.border_dim();
        let n = self.interior_dim();
        let b = line.susceptance;
        let mut e_m = vec![0.0; m];
        let mut e_n = vec![0.0; n];
        for (bus, sign) in [(line.from_bus, 1.0), (line.to_bus, -1.0)] {
            match part.role(bus).ok_or(Error::NotAreaLine(line.id))? {
                Role::Border(i) => e_m[i] += sign,
                Role::Interior(k) => e_n[k] += sign,
            }
        }
        let g = match &self.b_nn {
            Some(f) if e_n.iter().any(|&v| v != 0.0) => f.solve(&e_n),
            _ => vec![0.0; n],
        };
        let s: f64 = e_n.iter().zip(&g).map(|(a, b)| a * b).sum();
        let c = 1.0 - b * s;
        if c <= 1e-10 {
            return Err(Error::DegenerateArea(format!(
                "outage of line {} detaches interior buses from the border",
                line.id
            )));
        }
        let h = self.mul_mn(&g);
        let e_tilde: Vec<f64> = e_m.iter().zip(&h).map(|(a, b)| a - b).collect();
        let k = b / c;
        let mut matrix = base.matrix.clone();
        for i in 0..m {
            for j in 0..m {
                matrix[i][j] -= k * e_tilde[i] * e_tilde[j];
            }
        }

        // B'_nn⁻¹ P_n by Sherman-Morrison, then B'_mn applied to it.
        let x = &self.interior_response;
        let en_x: f64 = e_n.iter().zip(x).map(|(a, b)| a * b).sum();
        let z: Vec<f64> = x
            .iter()
            .zip(&g)
            .map(|(xi, gi)| xi + k * gi * en_x)
            .collect();
        let en_z: f64 = e_n.iter().zip(&z).map(|(a, b)| a * b).sum();
        let mut equivalent = self.mul_mn(&z);
        for (eq, em) in equivalent.iter_mut().zip(&e_m) {
            *eq -= b * em * en_z;
        }
        let injections = border_injections
            .iter()
            .zip(&equivalent)
            .map(|(p, e)| p - e)
            .collect();
        Ok(KronReduction { matrix, injections })
    }
}

fn symmetrize(a: &mut [Vec<f64>]) {
    let m = a.len();
    for i in 0..m {
        for j in i + 1..m {
            let avg = 0.5 * (a[i][j] + a[j][i]);
            a[i][j] = avg;
            a[j][i] = avg;
        }
    }
}

/// Kron-reduces the isolated area onto its border.
pub fn kron_reduce(
    net: &Network,
    part: &AreaPartition,
    inflow: &BorderInflow,
) -> Result<KronReduction> {
    Ok(AreaBlocks::assemble(net, part)?.reduce(&inflow.total))
}

/// Area quantities on the border buses.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedArea {
    pub border_order: Vec<crate::model::BusId>,
    pub reduced_matrix: Vec<Vec<f64>>,
    pub reduced_injections: Vec<f64>,
    pub sigma_a: Vec<f64>,
    pub weights: Vec<f64>,
    pub b_area: f64,
    pub p_area: f64,
    pub theta_area: f64,
}

impl ReducedArea {
    /// Border buses whose weight is small enough to drop from monitoring.
    pub fn omit_candidates(&self) -> Vec<crate::model::BusId> {
        self.border_order
            .iter()
            .zip(&self.weights)
            .filter(|(_, w)| w.abs() < SMALL_WEIGHT)
            .map(|(&b, _)| b)
            .collect()
    }
}

/// Area susceptance, weights, area power and area angle from a reduction.
pub fn area_quantities(
    reduction: &KronReduction,
    sigma_a: &[f64],
    border_angles: &[f64],
) -> Result<(f64, Vec<f64>, f64, f64)> {
    let m = sigma_a.len();
    for len in [
        reduction.matrix.len(),
        reduction.injections.len(),
        border_angles.len(),
    ] {
        if len != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: len,
            });
        }
    }
    let sigma_b: Vec<f64> = (0..m)
        .map(|j| (0..m).map(|i| sigma_a[i] * reduction.matrix[i][j]).sum())
        .collect();
    let b_area: f64 = sigma_b.iter().zip(sigma_a).map(|(a, s)| a * s).sum();
    if !(b_area > MIN_AREA_SUSCEPTANCE) {
        return Err(Error::DegenerateArea(format!(
            "area susceptance {b_area:e} is not positive"
        )));
    }
    let weights: Vec<f64> = sigma_b.iter().map(|v| v / b_area).collect();
    let theta: f64 = weights.iter().zip(border_angles).map(|(w, t)| w * t).sum();
    let p_area: f64 = sigma_a
        .iter()
        .zip(&reduction.injections)
        .map(|(s, p)| s * p)
        .sum();
    Ok((b_area, weights, p_area, theta))
}

/// Builds the full [`ReducedArea`] for a solved case.
pub fn reduce_area(
    net: &Network,
    part: &AreaPartition,
    sol: &AngleSolution,
) -> Result<ReducedArea> {
    let inflow = border_inflow(net, part, sol);
    let reduction = kron_reduce(net, part, &inflow)?;
    finish(part, reduction, &border_angles(net, part, sol))
}

pub(crate) fn finish(
    part: &AreaPartition,
    reduction: KronReduction,
    border_angles: &[f64],
) -> Result<ReducedArea> {
    let sigma_a = part.sigma_a();
    let (b_area, weights, p_area, theta_area) =
        area_quantities(&reduction, &sigma_a, border_angles)?;
    Ok(ReducedArea {
        border_order: part.border().to_vec(),
        reduced_matrix: reduction.matrix,
        reduced_injections: reduction.injections,
        sigma_a,
        weights,
        b_area,
        p_area,
        theta_area,
    })
}

/// Weights frozen from the base case, for use with post-outage angles.
pub fn monitored_weights(base: &ReducedArea) -> Vec<f64> {
    base.weights.clone()
}
