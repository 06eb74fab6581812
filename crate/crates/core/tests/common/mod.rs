#![allow(dead_code)]

pub mod oracle;

use bmsim_core::lp::{Constraint, LpProblem, Relation};
use bmsim_core::model::{Band, BmUnit, FuelType, Imbalance, Line, Network, Node, Scenario, StorageAsset, Tech};
use bmsim_core::make_storage;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn net(nodes: &[(&str, &str)], lines: &[(&str, &str, f64, f64)]) -> Network {
    Network::new(
        nodes.iter().map(|(id, zone)| Node::new(*id, *zone)).collect(),
        lines.iter().map(|&(f, t, b, cap)| Line::new(f, t, b, cap)).collect(),
    )
    .unwrap()
}

pub fn one_node() -> Network {
    net(&[("n1", "A")], &[])
}

pub fn bands(v: &[(f64, f64)]) -> Vec<Band> {
    v.iter().map(|&(p, vol)| Band::new(p, vol)).collect()
}

/// A unit with headroom on both sides of a flat FPN.
pub fn unit(id: &str, node: &str, fuel: FuelType, offers: &[(f64, f64)], bids: &[(f64, f64)], periods: usize) -> BmUnit {
    BmUnit::new(id, node, fuel, 0.0, 1000.0, vec![500.0; periods], bands(offers), bands(bids))
}

pub fn scenario(network: Network, units: Vec<BmUnit>, imbalance: Vec<Vec<f64>>) -> Scenario {
    Scenario::new(network, units, vec![], Imbalance { mw: imbalance }).unwrap()
}

pub fn storage(tech: Tech, node: &str, mw: f64, hours: f64) -> StorageAsset {
    make_storage(tech, node.into(), mw, hours).unwrap()
}

/// One node, 20 MW surplus then 20 MW shortfall, one CCGT holding a bid and
/// an offer band of 50 MW each.
pub fn arbitrage(bid: f64, offer: f64) -> Scenario {
    scenario(
        one_node(),
        vec![unit("G1", "n1", FuelType::Ccgt, &[(offer, 50.0)], &[(bid, 50.0)], 2)],
        vec![vec![-20.0, 20.0]],
    )
}

/// Storage lowers cost here but raises emissions: it charges by displacing
/// a cheap coal bid and discharges by displacing a dear wind offer.
pub fn divergence_witness() -> (Scenario, StorageAsset) {
    let s = scenario(
        one_node(),
        vec![
            unit("COAL", "n1", FuelType::Coal, &[], &[(10.0, 50.0)], 2),
            unit("WIND", "n1", FuelType::Wind, &[(100.0, 50.0)], &[], 2),
        ],
        vec![vec![-20.0, 20.0]],
    );
    (s, storage(Tech::Lib, "n1", 1.0, 2.0))
}

// ---------------------------------------------------------------- LPs

/// Bounded random LP with small integer data; most instances are feasible
/// by construction around a hidden interior point.
pub fn random_lp(rng: &mut impl Rng) -> LpProblem {
    let n = rng.gen_range(1..=6);
    let m = rng.gen_range(0..=6);
    let mut p = LpProblem::new();
    let mut hidden = Vec::with_capacity(n);
    for j in 0..n {
        let lo = rng.gen_range(-5..=2) as f64;
        let hi = lo + rng.gen_range(0..=8) as f64;
        let cost = rng.gen_range(-10..=10) as f64;
        p.add_var(format!("x{j}"), lo, hi, cost);
        hidden.push(rng.gen_range(lo..=hi));
    }
    let always_feasible = rng.gen_bool(0.8);
    for _ in 0..m {
        let mut coeffs = Vec::new();
        for j in 0..n {
            let a = rng.gen_range(-5..=5);
            if a != 0 && rng.gen_bool(0.7) {
                coeffs.push((j, a as f64));
            }
        }
        if coeffs.is_empty() {
            continue;
        }
        let at: f64 = coeffs.iter().map(|&(j, a)| a * hidden[j]).sum();
        let relation = *[Relation::Le, Relation::Le, Relation::Ge, Relation::Eq].choose(rng).unwrap();
        let rhs = if !always_feasible {
            rng.gen_range(-20..=20) as f64
        } else {
            match relation {
                Relation::Le => (at + rng.gen_range(0.0..4.0)).ceil(),
                Relation::Ge => (at - rng.gen_range(0.0..4.0)).floor(),
                Relation::Eq => at,
            }
        };
        p.add_constraint(coeffs, relation, rhs);
    }
    p
}

/// Instances with many constraints tied at one vertex, or known to cycle
/// under naive pivoting.
pub fn degenerate_fixtures() -> Vec<(&'static str, LpProblem, f64)> {
    let mut out = Vec::new();

    // Beale's cycling example; the optimum is -1/20.
    let mut beale = LpProblem::new();
    let inf = f64::INFINITY;
    for (name, c) in [("x4", -0.75), ("x5", 150.0), ("x6", -0.02), ("x7", 6.0)] {
        beale.add_var(name, 0.0, inf, c);
    }
    beale.add_constraint(vec![(0, 0.25), (1, -60.0), (2, -0.04), (3, 9.0)], Relation::Le, 0.0);
    beale.add_constraint(vec![(0, 0.5), (1, -90.0), (2, -0.02), (3, 3.0)], Relation::Le, 0.0);
    beale.add_constraint(vec![(2, 1.0)], Relation::Le, 1.0);
    out.push(("beale", beale, -0.05));

    // Pyramid apex: five planes through (0, 0, 1).
    let mut pyramid = LpProblem::new();
    for name in ["x", "y", "z"] {
        pyramid.add_var(name, -2.0, 2.0, 0.0);
    }
    pyramid.objective[2] = -1.0;
    for (a, b) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0), (1.0, 1.0)] {
        pyramid.add_constraint(vec![(0, a), (1, b), (2, 1.0)], Relation::Le, 1.0);
    }
    out.push(("pyramid", pyramid, -1.0));

    // Origin over-determined: every row passes through zero.
    let mut origin = LpProblem::new();
    for j in 0..4 {
        origin.add_var(format!("x{j}"), 0.0, 10.0, -1.0 + j as f64 * 0.25);
    }
    for k in 1..=8 {
        let coeffs = (0..4).map(|j| (j, ((j + k) % 5) as f64 - 1.5)).collect();
        origin.add_constraint(coeffs, Relation::Le, 0.0);
    }
    out.push(("origin", origin, f64::NAN));

    // Duplicate rows and a redundant equality.
    let mut dup = LpProblem::new();
    dup.add_var("a", 0.0, 5.0, 1.0);
    dup.add_var("b", 0.0, 5.0, 2.0);
    for _ in 0..4 {
        dup.add_constraint(vec![(0, 1.0), (1, 1.0)], Relation::Ge, 3.0);
    }
    dup.add_constraint(vec![(0, 2.0), (1, 2.0)], Relation::Eq, 6.0);
    dup.add_constraint(vec![(0, 1.0), (1, 1.0)], Relation::Eq, 3.0);
    out.push(("duplicates", dup, 3.0));

    // Transportation problem with a degenerate basis (supply equals demand
    // on a sub-block).
    let mut tp = LpProblem::new();
    let cost = [[4.0, 6.0, 9.0], [5.0, 3.0, 8.0], [7.0, 4.0, 2.0]];
    for (i, row) in cost.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            tp.add_var(format!("s{i}d{j}"), 0.0, 100.0, c);
        }
    }
    for (i, s) in [20.0, 30.0, 25.0].into_iter().enumerate() {
        tp.add_constraint((0..3).map(|j| (3 * i + j, 1.0)).collect(), Relation::Eq, s);
    }
    for (j, d) in [20.0, 30.0, 25.0].into_iter().enumerate() {
        tp.add_constraint((0..3).map(|i| (3 * i + j, 1.0)).collect(), Relation::Eq, d);
    }
    out.push(("transport", tp, 80.0 + 90.0 + 50.0));

    out
}

/// Same problem with the objective multiplied by `k`.
pub fn scaled_objective(p: &LpProblem, k: f64) -> LpProblem {
    let mut q = p.clone();
    for c in &mut q.objective {
        *c *= k;
    }
    q
}

/// Same problem with every constraint row multiplied by `k > 0`.
pub fn scaled_rows(p: &LpProblem, k: f64) -> LpProblem {
    let mut q = p.clone();
    q.constraints = q
        .constraints
        .iter()
        .map(|c| Constraint {
            coeffs: c.coeffs.iter().map(|&(j, a)| (j, a * k)).collect(),
            relation: c.relation,
            rhs: c.rhs * k,
        })
        .collect();
    q
}

// ---------------------------------------------------------- scenarios

const FUELS: [FuelType; 8] = [
    FuelType::Coal,
    FuelType::Ocgt,
    FuelType::Ccgt,
    FuelType::Other,
    FuelType::Biomass,
    FuelType::Nuclear,
    FuelType::Npshyd,
    FuelType::Wind,
];

/// Random feasible-looking scenario: a tree network with up to `max_nodes`
/// nodes, nonnegative bid prices and offers priced above every bid.
pub fn random_scenario(rng: &mut impl Rng, max_nodes: usize, periods: usize) -> Scenario {
    let n = rng.gen_range(1..=max_nodes);
    let ids: Vec<String> = (0..n).map(|i| format!("b{i}")).collect();
    let nodes: Vec<Node> = ids
        .iter()
        .map(|id| Node::new(id.as_str(), if rng.gen_bool(0.5) { "East" } else { "West" }))
        .collect();
    let mut lines = Vec::new();
    for i in 1..n {
        let j = rng.gen_range(0..i);
        lines.push(Line::new(
            &ids[j],
            &ids[i],
            rng.gen_range(2.0..20.0),
            rng.gen_range(10.0..120.0),
        ));
    }
    if n == 3 && rng.gen_bool(0.5) {
        let (a, b) = if lines[1].from.as_str() == ids[0] { (&ids[1], &ids[2]) } else { (&ids[0], &ids[2]) };
        lines.push(Line::new(a, b, rng.gen_range(2.0..20.0), rng.gen_range(10.0..120.0)));
    }
    let network = Network::new(nodes, lines).unwrap();

    let n_units = rng.gen_range(1..=4);
    let units = (0..n_units)
        .map(|k| {
            let offers: Vec<(f64, f64)> = {
                let mut p: f64 = rng.gen_range(61.0..120.0);
                (0..rng.gen_range(0..=2))
                    .map(|_| {
                        p += rng.gen_range(0.0..20.0);
                        (p.round(), rng.gen_range(5.0..60.0f64).round())
                    })
                    .collect()
            };
            let bids: Vec<(f64, f64)> = {
                let mut p: f64 = rng.gen_range(20.0..60.0);
                (0..rng.gen_range(0..=2))
                    .map(|_| {
                        p = (p - rng.gen_range(0.0..20.0f64)).max(0.0);
                        (p.round(), rng.gen_range(5.0..60.0f64).round())
                    })
                    .collect()
            };
            BmUnit::new(
                &format!("U{k}"),
                &ids[rng.gen_range(0..n)],
                *FUELS.choose(rng).unwrap(),
                0.0,
                600.0,
                vec![300.0; periods],
                bands(&offers),
                bands(&bids),
            )
        })
        .collect();
    let imbalance = (0..n)
        .map(|_| (0..periods).map(|_| rng.gen_range(-40.0..40.0f64).round()).collect())
        .collect();
    Scenario::new(network, units, vec![], Imbalance { mw: imbalance }).unwrap()
}

pub fn random_storage(rng: &mut impl Rng, s: &Scenario, tech: Tech) -> StorageAsset {
    let node = &s.network.nodes[rng.gen_range(0..s.network.nodes.len())].id;
    let mw = rng.gen_range(1.0..100.0f64).round();
    let hours = *[1.0, 2.0, 4.0].choose(rng).unwrap();
    make_storage(tech, node.clone(), mw, hours).unwrap()
}

pub const ALL_TECHS: [Tech; 4] = [Tech::Lib, Tech::Vrfb, Tech::Psh, Tech::Hes];

// ------------------------------------------------- hand-built dispatch suite

fn with(s: Scenario, assets: Vec<StorageAsset>) -> Scenario {
    s.with_storage(assets).unwrap()
}

/// Small scenarios (at most three nodes, two units and two periods) that the
/// vertex oracle can solve by enumeration.
pub fn dispatch_suite() -> Vec<(&'static str, Scenario)> {
    use FuelType::*;
    let two = |cap: f64| net(&[("a", "X"), ("b", "Y")], &[("a", "b", 10.0, cap)]);
    let tri = |cap: f64| {
        net(
            &[("a", "X"), ("b", "X"), ("c", "Y")],
            &[("a", "b", 10.0, 100.0), ("b", "c", 10.0, cap), ("a", "c", 5.0, cap)],
        )
    };
    let chain = net(
        &[("a", "X"), ("b", "Y"), ("c", "Z")],
        &[("a", "b", 8.0, 12.0), ("b", "c", 8.0, 30.0)],
    );
    vec![
        (
            "single offer",
            scenario(one_node(), vec![unit("G1", "n1", Ccgt, &[(50.0, 20.0)], &[], 1)], vec![vec![10.0]]),
        ),
        (
            "two-unit merit order",
            scenario(
                one_node(),
                vec![
                    unit("G1", "n1", Ccgt, &[(40.0, 10.0)], &[], 1),
                    unit("G2", "n1", Ocgt, &[(60.0, 20.0)], &[], 1),
                ],
                vec![vec![15.0]],
            ),
        ),
        (
            "single bid",
            scenario(one_node(), vec![unit("G1", "n1", Coal, &[], &[(10.0, 20.0)], 1)], vec![vec![-4.0]]),
        ),
        (
            "balanced",
            scenario(
                one_node(),
                vec![unit("G1", "n1", Ccgt, &[(50.0, 20.0)], &[(30.0, 20.0)], 2)],
                vec![vec![0.0, 0.0]],
            ),
        ),
        ("two-period bid then offer", arbitrage(30.0, 80.0)),
        (
            "offer ladder",
            scenario(
                one_node(),
                vec![unit("G1", "n1", Coal, &[(40.0, 10.0), (55.0, 10.0)], &[], 2)],
                vec![vec![15.0, 6.0]],
            ),
        ),
        (
            "bid ladder",
            scenario(
                one_node(),
                vec![unit("G1", "n1", Ccgt, &[], &[(30.0, 10.0), (20.0, 10.0)], 2)],
                vec![vec![-15.0, -3.0]],
            ),
        ),
        (
            "ladders against each other",
            scenario(
                one_node(),
                vec![
                    unit("G1", "n1", Coal, &[(45.0, 8.0), (70.0, 8.0)], &[], 1),
                    unit("G2", "n1", Ccgt, &[(50.0, 6.0), (60.0, 6.0)], &[], 1),
                ],
                vec![vec![20.0]],
            ),
        ),
        (
            "two-node congestion",
            scenario(
                two(5.0),
                vec![
                    unit("G1", "a", Ccgt, &[(30.0, 20.0)], &[], 1),
                    unit("G2", "b", Ocgt, &[(80.0, 20.0)], &[], 1),
                ],
                vec![vec![0.0], vec![10.0]],
            ),
        ),
        (
            "two-node uncongested",
            scenario(
                two(50.0),
                vec![
                    unit("G1", "a", Ccgt, &[(30.0, 20.0)], &[], 1),
                    unit("G2", "b", Ocgt, &[(80.0, 20.0)], &[], 1),
                ],
                vec![vec![0.0], vec![10.0]],
            ),
        ),
        (
            "two-node surplus export",
            scenario(
                two(6.0),
                vec![
                    unit("W", "a", Wind, &[], &[(5.0, 30.0)], 2),
                    unit("G", "b", Ccgt, &[(70.0, 30.0)], &[(35.0, 30.0)], 2),
                ],
                vec![vec![-4.0, 3.0], vec![-12.0, 8.0]],
            ),
        ),
        (
            "angle-limited line",
            scenario(
                net(&[("a", "X"), ("b", "Y")], &[("a", "b", 0.04, 100.0)]),
                vec![
                    unit("G1", "a", Nuclear, &[(20.0, 20.0)], &[], 1),
                    unit("G2", "b", Ocgt, &[(90.0, 20.0)], &[], 1),
                ],
                vec![vec![0.0], vec![10.0]],
            ),
        ),
        (
            "triangle loop flow",
            scenario(
                tri(4.0),
                vec![
                    unit("G1", "a", Ccgt, &[(30.0, 30.0)], &[], 1),
                    unit("G2", "c", Ocgt, &[(90.0, 30.0)], &[], 1),
                ],
                vec![vec![0.0], vec![0.0], vec![12.0]],
            ),
        ),
        (
            "triangle two periods",
            scenario(
                tri(6.0),
                vec![
                    unit("G1", "a", Coal, &[(40.0, 25.0)], &[(15.0, 25.0)], 2),
                    unit("G2", "b", Ccgt, &[(60.0, 25.0)], &[(25.0, 25.0)], 2),
                ],
                vec![vec![0.0, 0.0], vec![5.0, -5.0], vec![8.0, -6.0]],
            ),
        ),
        (
            "chain with a bottleneck",
            scenario(
                chain.clone(),
                vec![
                    unit("G1", "a", Coal, &[(35.0, 40.0)], &[], 2),
                    unit("G2", "c", Ocgt, &[(95.0, 40.0)], &[], 2),
                ],
                vec![vec![0.0, 0.0], vec![10.0, 4.0], vec![8.0, 3.0]],
            ),
        ),
        (
            "chain with bids",
            scenario(
                chain,
                vec![
                    unit("G1", "a", Wind, &[], &[(2.0, 30.0)], 2),
                    unit("G2", "c", Ccgt, &[(65.0, 30.0)], &[(30.0, 30.0)], 2),
                ],
                vec![vec![-10.0, 0.0], vec![0.0, 0.0], vec![-6.0, 9.0]],
            ),
        ),
        ("LIB arbitrage", with(arbitrage(10.0, 100.0), vec![storage(Tech::Lib, "n1", 1.0, 2.0)])),
        ("VRFB arbitrage", with(arbitrage(10.0, 100.0), vec![storage(Tech::Vrfb, "n1", 5.0, 2.0)])),
        ("PSH arbitrage", with(arbitrage(20.0, 90.0), vec![storage(Tech::Psh, "n1", 10.0, 1.0)])),
        ("HES below threshold", with(arbitrage(30.0, 80.0), vec![storage(Tech::Hes, "n1", 1.0, 2.0)])),
        ("LIB larger than the spread", with(arbitrage(10.0, 100.0), vec![storage(Tech::Lib, "n1", 40.0, 2.0)])),
        ("divergence witness", {
            let (s, a) = divergence_witness();
            with(s, vec![a])
        }),
        (
            "storage behind congestion",
            with(
                scenario(
                    two(5.0),
                    vec![unit("G1", "a", Ccgt, &[(80.0, 30.0)], &[(10.0, 30.0)], 2)],
                    vec![vec![0.0, 0.0], vec![-6.0, 6.0]],
                ),
                vec![storage(Tech::Lib, "b", 2.0, 2.0)],
            ),
        ),
    ]
}
