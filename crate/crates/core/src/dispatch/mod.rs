//! Pay-as-bid redispatch over a settlement horizon.
//!
//! The problem minimises accepted offer cost, minus accepted bid cost, plus
//! storage degradation, subject to DC nodal balance, line limits, angle
//! limits, ladder chaining and storage state-of-charge dynamics with a cyclic
//! terminal condition. Flows and angles are incremental to the FPN schedule.

mod build;
mod export;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::lp::{solve_lp, LpError, LpStatus};
use crate::model::{FuelType, NodeId, Scenario, StorageAsset, Tech};
use crate::FEAS_TOL;

pub use build::{build_dispatch_problem, ANGLE_LIMIT, BASE_MVA, ZERO_TARIFF_EPSILON};

#[derive(Debug, Error)]
pub enum DispatchError {
    #[error("redispatch is infeasible{}", match .period {
        Some(t) => format!(" (period {t}: available headroom is below the net imbalance)"),
        None => String::new(),
    })]
    Infeasible { period: Option<usize> },
    #[error("internal error: redispatch LP reported unbounded")]
    Unbounded,
    #[error("storage delta run needs a scenario without storage, found {0} assets")]
    NonEmptyFleet(usize),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Model(#[from] crate::model::ModelError),
}

/// Acceptance of one ladder band over the horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct BandDispatch {
    /// £/MWh
    pub price: f64,
    /// Band size, MW.
    pub volume: f64,
    /// Accepted MW per period.
    pub accepted: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnitDispatch {
    pub id: String,
    pub node: NodeId,
    pub fuel: FuelType,
    pub offers: Vec<BandDispatch>,
    pub bids: Vec<BandDispatch>,
}

impl UnitDispatch {
    /// Net upward deviation from FPN in MW for period `t`.
    pub fn net_mw(&self, t: usize) -> f64 {
        let up: f64 = self.offers.iter().map(|b| b.accepted[t]).sum();
        let down: f64 = self.bids.iter().map(|b| b.accepted[t]).sum();
        up - down
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StorageDispatch {
    pub id: String,
    pub technology: Tech,
    pub node: NodeId,
    pub rated_power: f64,
    pub energy_capacity: f64,
    pub eta_charge: f64,
    pub eta_discharge: f64,
    pub degradation_tariff: f64,
    /// MW per period.
    pub charge: Vec<f64>,
    pub discharge: Vec<f64>,
    /// MWh at each period boundary, `horizon + 1` entries.
    pub soc: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DispatchSolution {
    pub horizon: usize,
    pub period_hours: f64,
    pub units: Vec<UnitDispatch>,
    pub storage: Vec<StorageDispatch>,
    pub nodes: Vec<NodeId>,
    /// Radians, `[node][period]`; all zero when the network has no lines.
    pub angle: Vec<Vec<f64>>,
    pub line_labels: Vec<String>,
    /// MW, `[line][period]`.
    pub flow: Vec<Vec<f64>>,
    /// Balancing cost in £, excluding the zero-tariff tie-break penalty.
    pub objective_cost: f64,
}

/// Solves the redispatch problem for `scenario`.
pub fn solve_dispatch(scenario: &Scenario) -> Result<DispatchSolution, DispatchError> {
    let (lp, layout) = build::build(scenario);
    let sol = solve_lp(&lp)?;
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => {
            return Err(DispatchError::Infeasible {
                period: first_short_period(scenario),
            })
        }
        LpStatus::Unbounded => return Err(DispatchError::Unbounded),
    }
    let x = &sol.values;
    let pick = |idx: &[usize]| idx.iter().map(|&j| x[j]).collect::<Vec<f64>>();

    let units = scenario
        .units
        .iter()
        .enumerate()
        .map(|(ui, u)| {
            let bands = |ladder: &[crate::model::Band], vars: &[Vec<usize>]| {
                ladder
                    .iter()
                    .zip(vars)
                    .map(|(b, v)| BandDispatch {
                        price: b.price,
                        volume: b.volume,
                        accepted: pick(v),
                    })
                    .collect()
            };
            UnitDispatch {
                id: u.id.clone(),
                node: u.node.clone(),
                fuel: u.fuel,
                offers: bands(&u.offer_ladder, &layout.offer[ui]),
                bids: bands(&u.bid_ladder, &layout.bid[ui]),
            }
        })
        .collect();

    let mut penalty = 0.0;
    let storage = scenario
        .storage
        .iter()
        .enumerate()
        .map(|(si, s)| {
            let charge = pick(&layout.charge[si]);
            let discharge = pick(&layout.discharge[si]);
            let extra = layout.throughput_price[si] - s.degradation_tariff;
            penalty += extra
                * scenario.period_hours
                * charge.iter().chain(&discharge).sum::<f64>();
            StorageDispatch {
                id: s.id.clone(),
                technology: s.technology,
                node: s.node.clone(),
                rated_power: s.rated_power,
                energy_capacity: s.energy_capacity,
                eta_charge: s.eta_charge,
                eta_discharge: s.eta_discharge,
                degradation_tariff: s.degradation_tariff,
                charge,
                discharge,
                soc: pick(&layout.soc[si]),
            }
        })
        .collect();

    let angle = if layout.angle.is_empty() {
        vec![vec![0.0; scenario.horizon]; scenario.network.nodes.len()]
    } else {
        layout.angle.iter().map(|v| pick(v)).collect()
    };

    Ok(DispatchSolution {
        horizon: scenario.horizon,
        period_hours: scenario.period_hours,
        units,
        storage,
        nodes: scenario.network.nodes.iter().map(|n| n.id.clone()).collect(),
        angle,
        line_labels: scenario
            .network
            .lines
            .iter()
            .enumerate()
            .map(|(l, line)| line.label(l))
            .collect(),
        flow: layout.flow.iter().map(|v| pick(v)).collect(),
        objective_cost: sol.objective_value - penalty,
    })
}

/// First period whose system-wide net imbalance exceeds the total headroom in
/// the required direction, if any.
fn first_short_period(scenario: &Scenario) -> Option<usize> {
    let storage_power: f64 = scenario.storage.iter().map(|s| s.rated_power).sum();
    let up: f64 = scenario.units.iter().map(|u| u.total_offer()).sum::<f64>() + storage_power;
    let down: f64 = scenario.units.iter().map(|u| u.total_bid()).sum::<f64>() + storage_power;
    (0..scenario.horizon).find(|&t| {
        let net: f64 = scenario.imbalance.mw.iter().map(|s| s[t]).sum();
        (net > 0.0 && up < net - FEAS_TOL) || (net < 0.0 && down < -net - FEAS_TOL)
    })
}

/// Balancing cost recomputed from accepted volumes, ladder prices and storage
/// throughput: offers minus bids plus degradation, in £.
pub fn bm_cost(solution: &DispatchSolution) -> f64 {
    let dt = solution.period_hours;
    let mut cost = 0.0;
    for u in &solution.units {
        for b in &u.offers {
            cost += b.price * dt * b.accepted.iter().sum::<f64>();
        }
        for b in &u.bids {
            cost -= b.price * dt * b.accepted.iter().sum::<f64>();
        }
    }
    for s in &solution.storage {
        let throughput: f64 = s.charge.iter().chain(&s.discharge).sum();
        cost += s.degradation_tariff * throughput * dt;
    }
    cost
}

/// Share of rated power used for balancing, averaged over the horizon and
/// clamped to `[0, 1]`. Returns 0 if `asset` is not in the solution.
pub fn k_fraction(solution: &DispatchSolution, asset: &StorageAsset) -> f64 {
    let Some(s) = solution.storage.iter().find(|s| s.id == asset.id) else {
        return 0.0;
    };
    if s.charge.is_empty() {
        return 0.0;
    }
    let total: f64 = s
        .charge
        .iter()
        .zip(&s.discharge)
        .map(|(c, d)| (c + d) / s.rated_power)
        .sum();
    (total / s.charge.len() as f64).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StorageDelta {
    pub base: DispatchSolution,
    pub with_storage: DispatchSolution,
    /// `bm_cost(with_storage) - bm_cost(base)`, £.
    pub cost_delta: f64,
}

/// Solves a storage-free scenario with and without `asset`.
pub fn storage_delta_run(
    scenario_without: &Scenario,
    asset: &StorageAsset,
) -> Result<StorageDelta, DispatchError> {
    if !scenario_without.storage.is_empty() {
        return Err(DispatchError::NonEmptyFleet(scenario_without.storage.len()));
    }
    let base = solve_dispatch(scenario_without)?;
    let with_storage = solve_dispatch(&scenario_without.with_storage(vec![asset.clone()])?)?;
    let cost_delta = bm_cost(&with_storage) - bm_cost(&base);
    Ok(StorageDelta {
        base,
        with_storage,
        cost_delta,
    })
}

/// Aggregates of a solved dispatch.
#[derive(Debug, Clone, PartialEq)]
pub struct DispatchReport {
    pub objective_cost: f64,
    /// Base power used to convert per-unit susceptances to MW flows.
    pub base_mva: f64,
    /// Net energy deviation from FPN per fuel, MWh per period.
    pub fuel_delta_mwh: BTreeMap<FuelType, Vec<f64>>,
    /// Net redispatch energy across all units, MWh per period.
    pub net_redispatch_mwh: Vec<f64>,
    /// Storage utilisation fraction per asset id.
    pub utilisation: BTreeMap<String, f64>,
}

impl DispatchReport {
    pub fn new(solution: &DispatchSolution) -> Self {
        let dt = solution.period_hours;
        let mut fuel_delta_mwh: BTreeMap<FuelType, Vec<f64>> = BTreeMap::new();
        let mut net = vec![0.0; solution.horizon];
        for u in &solution.units {
            let series = fuel_delta_mwh
                .entry(u.fuel)
                .or_insert_with(|| vec![0.0; solution.horizon]);
            for t in 0..solution.horizon {
                let e = u.net_mw(t) * dt;
                series[t] += e;
                net[t] += e;
            }
        }
        let utilisation = solution
            .storage
            .iter()
            .map(|s| {
                let n = s.charge.len().max(1) as f64;
                let used: f64 = s
                    .charge
                    .iter()
                    .zip(&s.discharge)
                    .map(|(c, d)| (c + d) / s.rated_power)
                    .sum();
                (s.id.clone(), (used / n).clamp(0.0, 1.0))
            })
            .collect();
        DispatchReport {
            objective_cost: solution.objective_cost,
            base_mva: BASE_MVA,
            fuel_delta_mwh,
            net_redispatch_mwh: net,
            utilisation,
        }
    }
}

/// Largest residuals of the physical and market invariants on a solved
/// instance; each is compared against [`FEAS_TOL`] by callers.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Audit {
    /// |injections - net export - imbalance|, MW.
    pub balance: f64,
    /// |flow - BASE_MVA * b * Δθ|, MW.
    pub flow_law: f64,
    /// Excess of |flow| over capacity, MW.
    pub line_limit: f64,
    /// |ΔSoC - Σ(ηc Pc - Pd/ηd)Δt| and |soc_end - soc_initial|, MWh.
    pub soc_telescoping: f64,
    /// Largest min(charge, discharge) over assets with positive tariff, MW.
    pub simultaneous: f64,
    /// Largest unsaturated volume of a cheaper band while a strictly more
    /// expensive band of the same unit and side is in use, MW.
    pub ladder_order: f64,
}

impl Audit {
    pub fn worst(&self) -> f64 {
        [
            self.balance,
            self.flow_law,
            self.line_limit,
            self.soc_telescoping,
            self.simultaneous,
            self.ladder_order,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Recomputes every invariant of `solution` against `scenario`.
pub fn audit(scenario: &Scenario, solution: &DispatchSolution) -> Audit {
    let net = &scenario.network;
    let dt = scenario.period_hours;
    let mut a = Audit::default();
    for t in 0..solution.horizon {
        let mut injection = vec![0.0; net.nodes.len()];
        for u in &solution.units {
            injection[net.node_index(&u.node).expect("known node")] += u.net_mw(t);
        }
        for s in &solution.storage {
            injection[net.node_index(&s.node).expect("known node")] += s.discharge[t] - s.charge[t];
        }
        for (l, line) in net.lines.iter().enumerate() {
            let (i, j) = (
                net.node_index(&line.from).expect("known node"),
                net.node_index(&line.to).expect("known node"),
            );
            let f = solution.flow[l][t];
            injection[i] -= f;
            injection[j] += f;
            let law = BASE_MVA * line.susceptance_pu * (solution.angle[i][t] - solution.angle[j][t]);
            a.flow_law = a.flow_law.max((f - law).abs());
            a.line_limit = a.line_limit.max(f.abs() - line.capacity_mw);
        }
        for (n, inj) in injection.iter().enumerate() {
            a.balance = a.balance.max((inj - scenario.imbalance.mw[n][t]).abs());
        }
    }
    for s in &solution.storage {
        let mut predicted = s.soc[0];
        for t in 0..solution.horizon {
            predicted += (s.eta_charge * s.charge[t] - s.discharge[t] / s.eta_discharge) * dt;
            a.soc_telescoping = a.soc_telescoping.max((s.soc[t + 1] - predicted).abs());
        }
        a.soc_telescoping = a
            .soc_telescoping
            .max((s.soc[solution.horizon] - s.soc[0]).abs());
        if s.degradation_tariff > 0.0 {
            for t in 0..solution.horizon {
                a.simultaneous = a.simultaneous.max(s.charge[t].min(s.discharge[t]));
            }
        }
    }
    for u in &solution.units {
        for (bands, cheaper_first) in [(&u.offers, true), (&u.bids, false)] {
            for t in 0..solution.horizon {
                for (i, lo) in bands.iter().enumerate() {
                    let slack = lo.volume - lo.accepted[t];
                    for hi in &bands[i + 1..] {
                        let strictly_worse = if cheaper_first {
                            hi.price > lo.price
                        } else {
                            hi.price < lo.price
                        };
                        if strictly_worse && hi.accepted[t] > FEAS_TOL {
                            a.ladder_order = a.ladder_order.max(slack);
                        }
                    }
                }
            }
        }
    }
    a
}
