//! Assembly of the time-coupled redispatch LP.

use crate::lp::{LpProblem, Relation};
use crate::model::Scenario;

/// Base power for per-unit susceptances, MVA. Line flow in MW is
/// `BASE_MVA * susceptance_pu * (angle_from - angle_to)`.
pub const BASE_MVA: f64 = 100.0;
/// Voltage angle limit, radians.
pub const ANGLE_LIMIT: f64 = 0.5;
/// Throughput penalty (£/MWh) for zero-tariff storage so that simultaneous
/// charging and discharging is never a tie. Not part of reported costs.
pub const ZERO_TARIFF_EPSILON: f64 = 1e-6;

/// Variable indices of the built problem.
#[derive(Debug, Clone)]
pub(crate) struct Layout {
    /// `[unit][rank][period]`
    pub offer: Vec<Vec<Vec<usize>>>,
    pub bid: Vec<Vec<Vec<usize>>>,
    /// `[asset][period]`
    pub charge: Vec<Vec<usize>>,
    pub discharge: Vec<Vec<usize>>,
    /// `[asset][boundary]`, `horizon + 1` entries.
    pub soc: Vec<Vec<usize>>,
    /// `[node][period]`; empty when the network has no lines.
    pub angle: Vec<Vec<usize>>,
    /// `[line][period]`
    pub flow: Vec<Vec<usize>>,
    /// Effective throughput price including the zero-tariff epsilon.
    pub throughput_price: Vec<f64>,
}

/// Builds the redispatch LP for `scenario`.
pub fn build_dispatch_problem(scenario: &Scenario) -> LpProblem {
    build(scenario).0
}

pub(crate) fn build(scenario: &Scenario) -> (LpProblem, Layout) {
    let net = &scenario.network;
    let horizon = scenario.horizon;
    let dt = scenario.period_hours;
    let mut lp = LpProblem::new();

    let ladder_vars = |lp: &mut LpProblem, uid: &str, side: &str, ladder: &[crate::model::Band], sign: f64| {
        ladder
            .iter()
            .enumerate()
            .map(|(r, band)| {
                (0..horizon)
                    .map(|t| {
                        lp.add_var(format!("{side}[{uid}:{r}@{t}]"), 0.0, band.volume, sign * band.price * dt)
                    })
                    .collect::<Vec<_>>()
            })
            .collect::<Vec<_>>()
    };
    let mut offer = Vec::with_capacity(scenario.units.len());
    let mut bid = Vec::with_capacity(scenario.units.len());
    for u in &scenario.units {
        offer.push(ladder_vars(&mut lp, &u.id, "offer", &u.offer_ladder, 1.0));
        bid.push(ladder_vars(&mut lp, &u.id, "bid", &u.bid_ladder, -1.0));
    }

    let mut charge = Vec::new();
    let mut discharge = Vec::new();
    let mut soc = Vec::new();
    let mut throughput_price = Vec::new();
    for s in &scenario.storage {
        let price = if s.degradation_tariff > 0.0 {
            s.degradation_tariff
        } else {
            ZERO_TARIFF_EPSILON
        };
        throughput_price.push(price);
        charge.push(
            (0..horizon)
                .map(|t| lp.add_var(format!("charge[{}@{t}]", s.id), 0.0, s.rated_power, price * dt))
                .collect::<Vec<_>>(),
        );
        discharge.push(
            (0..horizon)
                .map(|t| lp.add_var(format!("discharge[{}@{t}]", s.id), 0.0, s.rated_power, price * dt))
                .collect::<Vec<_>>(),
        );
        soc.push(
            (0..=horizon)
                .map(|t| {
                    let (lo, hi) = if t == 0 {
                        (s.soc_initial, s.soc_initial)
                    } else {
                        (0.0, s.energy_capacity)
                    };
                    lp.add_var(format!("soc[{}@{t}]", s.id), lo, hi, 0.0)
                })
                .collect::<Vec<_>>(),
        );
    }

    let ref_idx = net.reference_index();
    let angle: Vec<Vec<usize>> = if net.lines.is_empty() {
        Vec::new()
    } else {
        net.nodes
            .iter()
            .enumerate()
            .map(|(n, node)| {
                let lim = if n == ref_idx { 0.0 } else { ANGLE_LIMIT };
                (0..horizon)
                    .map(|t| lp.add_var(format!("angle[{}@{t}]", node.id), -lim, lim, 0.0))
                    .collect()
            })
            .collect()
    };
    let flow: Vec<Vec<usize>> = net
        .lines
        .iter()
        .enumerate()
        .map(|(l, line)| {
            (0..horizon)
                .map(|t| {
                    lp.add_var(
                        format!("flow[{}@{t}]", line.label(l)),
                        -line.capacity_mw,
                        line.capacity_mw,
                        0.0,
                    )
                })
                .collect()
        })
        .collect();

    let node_of = |id: &crate::model::NodeId| net.node_index(id).expect("validated scenario");
    for t in 0..horizon {
        // Nodal balance: redispatch injections minus net export equal the imbalance.
        for (n, _) in net.nodes.iter().enumerate() {
            let mut row = Vec::new();
            for (ui, u) in scenario.units.iter().enumerate() {
                if node_of(&u.node) != n {
                    continue;
                }
                row.extend(offer[ui].iter().map(|band| (band[t], 1.0)));
                row.extend(bid[ui].iter().map(|band| (band[t], -1.0)));
            }
            for (si, s) in scenario.storage.iter().enumerate() {
                if node_of(&s.node) == n {
                    row.push((discharge[si][t], 1.0));
                    row.push((charge[si][t], -1.0));
                }
            }
            for (l, line) in net.lines.iter().enumerate() {
                if node_of(&line.from) == n {
                    row.push((flow[l][t], -1.0));
                }
                if node_of(&line.to) == n {
                    row.push((flow[l][t], 1.0));
                }
            }
            lp.add_constraint(row, Relation::Eq, scenario.imbalance.mw[n][t]);
        }

        for (l, line) in net.lines.iter().enumerate() {
            let k = BASE_MVA * line.susceptance_pu;
            let (a, b) = (node_of(&line.from), node_of(&line.to));
            lp.add_constraint(
                vec![(flow[l][t], 1.0), (angle[a][t], -k), (angle[b][t], k)],
                Relation::Eq,
                0.0,
            );
        }

        // Ladder chaining: band r may be used at most in proportion to the
        // nearest earlier band with positive volume.
        for (ui, u) in scenario.units.iter().enumerate() {
            for (vars, ladder) in [(&offer[ui], &u.offer_ladder), (&bid[ui], &u.bid_ladder)] {
                let mut prev: Option<usize> = None;
                for (r, band) in ladder.iter().enumerate() {
                    if band.volume <= 0.0 {
                        continue;
                    }
                    if let Some(p) = prev {
                        lp.add_constraint(
                            vec![(vars[r][t], ladder[p].volume), (vars[p][t], -band.volume)],
                            Relation::Le,
                            0.0,
                        );
                    }
                    prev = Some(r);
                }
            }
        }
    }

    for (si, s) in scenario.storage.iter().enumerate() {
        for t in 0..horizon {
            lp.add_constraint(
                vec![
                    (soc[si][t + 1], 1.0),
                    (soc[si][t], -1.0),
                    (charge[si][t], -s.eta_charge * dt),
                    (discharge[si][t], dt / s.eta_discharge),
                ],
                Relation::Eq,
                0.0,
            );
        }
        lp.add_constraint(
            vec![(soc[si][horizon], 1.0), (soc[si][0], -1.0)],
            Relation::Eq,
            0.0,
        );
    }

    let layout = Layout {
        offer,
        bid,
        charge,
        discharge,
        soc,
        angle,
        flow,
        throughput_price,
    };
    (lp, layout)
}
