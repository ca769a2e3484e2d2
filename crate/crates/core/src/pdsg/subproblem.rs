//! Lagrangian dual function with rows coding, arc-sum, aggregate, capacity
//! and budget dualized. Conservation stays in the primal set, so
//!
//! `g(v) = b·v + sum_h q_h(v) + sum_c R_c * dist_c(v)`
//!
//! where `q_h` minimizes hyperarc `h`'s own variables over their boxes and
//! `dist_c` is the shortest source-sink path for commodity `c` under arc
//! prices `sum_{g contains e} pi[g][c] >= 0`.

use petgraph::algo::{bellman_ford, dijkstra};
use petgraph::graph::{DiGraph, NodeIndex};
use petgraph::visit::EdgeRef;

use super::dual::DualPoint;
use super::layout::Layout;
use crate::formulation::{FlowProgram, VarKind};
use crate::par::{self, Execution};

/// Reduced costs and the box minimizer of one hyperarc's variables.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperarcBlock {
    /// Per commodity.
    pub x: Vec<f64>,
    /// Per session.
    pub y: Vec<f64>,
    pub z: f64,
    pub p: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Subproblem {
    pub value: f64,
    pub reduced: HyperarcBlock,
    pub minimizer: HyperarcBlock,
}

/// `min d*u` over `[0, hi]`, ties to 0.
fn box_min(d: f64, hi: f64) -> (f64, f64) {
    if d < 0.0 {
        (d * hi, hi)
    } else {
        (0.0, 0.0)
    }
}

/// Reduced costs of hyperarc `h`'s variables at `dual`.
pub fn hyperarc_reduced_costs(layout: &Layout, h: usize, dual: &DualPoint) -> HyperarcBlock {
    let info = &layout.hyperarcs[h];
    let cc = layout.commodity_count();
    let lam = &dual.lambda[h * cc..(h + 1) * cc];
    let x = (0..cc)
        .map(|c| lam[c] - layout.hyperarc_groups[h].iter().map(|&g| dual.pi[g * cc + c]).sum::<f64>())
        .collect();
    let y = layout
        .session_commodities
        .iter()
        .map(|cs| dual.nu[h] - cs.iter().map(|&c| lam[c]).sum::<f64>())
        .collect();
    HyperarcBlock {
        x,
        y,
        z: dual.mu[h] / info.scale - dual.nu[h],
        p: 1.0 - dual.mu[h] * info.gamma / info.scale + dual.zeta[info.sender] / info.budget,
    }
}

/// Value and minimizer of hyperarc `h`'s block of the Lagrangian.
pub fn eval_subproblem(layout: &Layout, h: usize, dual: &DualPoint) -> Subproblem {
    let idx = layout.index;
    let d = hyperarc_reduced_costs(layout, h, dual);
    let mut value = 0.0;
    let mut take = |dj: f64, hi: f64| {
        let (v, u) = box_min(dj, hi);
        value += v;
        u
    };
    let minimizer = HyperarcBlock {
        x: d.x.iter().enumerate().map(|(c, &dj)| take(dj, layout.upper[idx.x(h, c)])).collect(),
        y: d.y.iter().enumerate().map(|(m, &dj)| take(dj, layout.upper[idx.y(h, m)])).collect(),
        z: take(d.z, layout.upper[idx.z(h)]),
        p: take(d.p, layout.upper[idx.power(h)]),
    };
    Subproblem {
        value,
        reduced: d,
        minimizer,
    }
}

/// Arc prices of commodity `c`.
pub fn arc_prices(layout: &Layout, c: usize, dual: &DualPoint) -> Vec<f64> {
    let cc = layout.commodity_count();
    layout
        .arc_groups
        .iter()
        .map(|gs| gs.iter().map(|&g| dual.pi[g * cc + c]).sum())
        .collect()
}

/// `R_c` times the cheapest source-sink path under `prices`.
pub fn routing_value(layout: &Layout, c: usize, prices: &[f64]) -> f64 {
    let com = &layout.commodities[c];
    let sink = NodeIndex::new(com.sink);
    let dist = dijkstra(&layout.graph, NodeIndex::new(com.source), Some(sink), |e| prices[e.id().index()]);
    com.demand * dist[&sink]
}

/// Constant part `b·v` of the Lagrangian: only budget rows have a nonzero
/// right-hand side.
pub fn constant_term(layout: &Layout, dual: &DualPoint) -> f64 {
    -(0..layout.node_count)
        .filter(|&i| layout.has_budget[i])
        .map(|i| dual.zeta[i])
        .sum::<f64>()
}

/// Dual function value through the per-hyperarc decomposition.
#[derive(Clone, Debug, PartialEq)]
pub struct DualValue {
    pub value: f64,
    /// `q_h` per hyperarc.
    pub subproblems: Vec<f64>,
    /// `R_c * dist_c` per commodity.
    pub routing: Vec<f64>,
    pub constant: f64,
}

pub fn dual_value(layout: &Layout, dual: &DualPoint, exec: Execution) -> DualValue {
    let subproblems = par::map_range(exec, layout.hyperarcs.len(), |h| eval_subproblem(layout, h, dual).value);
    let routing = par::map_range(exec, layout.commodity_count(), |c| {
        routing_value(layout, c, &arc_prices(layout, c, dual))
    });
    let constant = constant_term(layout, dual);
    let value = constant + subproblems.iter().sum::<f64>() + routing.iter().sum::<f64>();
    DualValue {
        value,
        subproblems,
        routing,
        constant,
    }
}

/// The same dual function evaluated without the decomposition: generic
/// `c - A^T v` over every row of the program, box minimization per variable
/// and Bellman-Ford per commodity.
pub fn dual_value_direct(program: &FlowProgram, layout: &Layout, dual: &DualPoint) -> f64 {
    let row_duals = dual.to_row_duals(program);
    let reduced = program.reduced_costs(&row_duals);
    let idx = program.index;
    let mut value: f64 = program.rows.iter().zip(&row_duals).map(|(r, v)| r.rhs * v).sum();
    for (j, &d) in reduced.iter().enumerate() {
        if !matches!(idx.kind(j), VarKind::ArcFlow { .. }) {
            value += d.min(0.0) * layout.upper[j];
        }
    }
    let st = &program.structure;
    for (c, com) in st.commodities.iter().enumerate() {
        let mut g = DiGraph::<(), f64>::new();
        let nodes: Vec<_> = (0..st.node_count).map(|_| g.add_node(())).collect();
        for (e, &(t, h)) in st.arc_ends.iter().enumerate() {
            g.add_edge(nodes[t], nodes[h], reduced[idx.flow(e, c)]);
        }
        let paths = bellman_ford(&g, nodes[com.source]).expect("arc prices are nonnegative");
        value += com.demand * paths.distances[com.sink];
    }
    value
}

/// Reduced costs of every variable (flow entries are the arc prices).
pub fn reduced_costs(layout: &Layout, dual: &DualPoint, exec: Execution) -> Vec<f64> {
    let idx = layout.index;
    let mut d = vec![0.0; idx.len()];
    let blocks = par::map_range(exec, layout.hyperarcs.len(), |h| hyperarc_reduced_costs(layout, h, dual));
    for (h, b) in blocks.iter().enumerate() {
        for (c, &v) in b.x.iter().enumerate() {
            d[idx.x(h, c)] = v;
        }
        for (m, &v) in b.y.iter().enumerate() {
            d[idx.y(h, m)] = v;
        }
        d[idx.z(h)] = b.z;
        d[idx.power(h)] = b.p;
    }
    for c in 0..layout.commodity_count() {
        for (e, v) in arc_prices(layout, c, dual).into_iter().enumerate() {
            d[idx.flow(e, c)] = v;
        }
    }
    d
}

/// Keeps the arc-sum and budget prices of `dual` and picks the coding,
/// aggregate and capacity prices that maximize every hyperarc's term.
///
/// With `lambda = Pi` (the summed arc prices of each commodity) and
/// `mu/scale = nu`, hyperarc `h` contributes
/// `V(nu) = sum_m R_m min(0, nu - Pi_m) + Pcap_h min(0, a_h - nu gamma_h)`
/// with `a_h = 1 + zeta_i / P_i`. `V` is concave and piecewise linear, so
/// its maximum sits at one of the breakpoints `Pi_m` or `a_h / gamma_h`.
/// No choice of the three blocks does better for the given prices, so the
/// dual value can only go up.
pub fn refine_dual(layout: &Layout, dual: &DualPoint) -> DualPoint {
    let idx = layout.index;
    let cc = layout.commodity_count();
    let mut out = dual.clone();
    for (h, info) in layout.hyperarcs.iter().enumerate() {
        let pi: Vec<f64> = (0..cc)
            .map(|c| layout.hyperarc_groups[h].iter().map(|&g| dual.pi[g * cc + c]).sum())
            .collect();
        out.lambda[h * cc..(h + 1) * cc].copy_from_slice(&pi);
        let session_price: Vec<f64> = layout
            .session_commodities
            .iter()
            .map(|cs| cs.iter().map(|&c| pi[c]).sum())
            .collect();
        let a = 1.0 + dual.zeta[info.sender] / info.budget;
        let pcap = layout.upper[idx.power(h)];
        let value = |nu: f64| {
            session_price
                .iter()
                .zip(&layout.session_demands)
                .map(|(&p, &r)| r * (nu - p).min(0.0))
                .sum::<f64>()
                + pcap * (a - nu * info.gamma).min(0.0)
        };
        let nu = session_price
            .iter()
            .copied()
            .chain([a / info.gamma])
            .map(|nu| (value(nu), nu))
            .fold((f64::NEG_INFINITY, 0.0), |best, cand| if cand.0 > best.0 { cand } else { best })
            .1;
        out.nu[h] = nu;
        out.mu[h] = nu * info.scale;
    }
    out
}
