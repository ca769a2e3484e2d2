//! Structure the decomposition needs, extracted once from a [`Problem`].

use petgraph::graph::{DiGraph, NodeIndex};

use super::dual::DualPoint;
use super::projection::FlowPolytope;
use crate::error::{Error, Result};
use crate::formulation::{Commodity, Problem, RowKind, RowOwner, VariableIndex};

/// Dual caps are this many times a per-row estimate of the optimal multiplier.
pub const DUAL_CAP_FACTOR: f64 = 10.0;

#[derive(Clone, Debug, PartialEq)]
pub struct HyperarcInfo {
    /// Sender position.
    pub sender: usize,
    pub gamma: f64,
    /// Capacity-row normalization, `max(gamma, 1)`.
    pub scale: f64,
    pub budget: f64,
    /// Upper box for `P`: the budget, or the power needed to carry every
    /// session at once if that is smaller.
    pub power_cap: f64,
}

/// One sender's hyperarcs in nesting order. `new_arcs[k]` are the arcs to
/// receivers that first appear in `hyperarcs[k]`; `groups[k]` is the arc
/// group owned by `hyperarcs[k..]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainLayout {
    pub sender: usize,
    pub hyperarcs: Vec<usize>,
    pub groups: Vec<usize>,
    pub new_arcs: Vec<Vec<usize>>,
}

#[derive(Clone, Debug)]
pub struct Layout {
    pub index: VariableIndex,
    pub node_count: usize,
    pub hyperarcs: Vec<HyperarcInfo>,
    pub commodities: Vec<Commodity>,
    pub session_demands: Vec<f64>,
    pub total_demand: f64,
    /// Commodity positions per session.
    pub session_commodities: Vec<Vec<usize>>,
    /// `(owners, arcs)` per arc group.
    pub groups: Vec<(Vec<usize>, Vec<usize>)>,
    /// Groups in which each hyperarc is an owner.
    pub hyperarc_groups: Vec<Vec<usize>>,
    /// Groups containing each arc.
    pub arc_groups: Vec<Vec<usize>>,
    pub arc_ends: Vec<(usize, usize)>,
    /// Whether each node has a budget row (sends on some hyperarc).
    pub has_budget: Vec<bool>,
    pub budgets: Vec<f64>,
    pub chains: Vec<ChainLayout>,
    /// Upper box per primal variable (all lower boxes are 0).
    pub upper: Vec<f64>,
    /// Upper caps of the dual box; `nu` ranges over `[-cap, cap]`.
    pub dual_caps: DualPoint,
    pub polytopes: Vec<FlowPolytope>,
    /// Arc graph with edge `e` at index `e`.
    pub graph: DiGraph<(), ()>,
}

impl Layout {
    /// Fails unless the program uses max coding semantics and every sender's
    /// hyperarcs are nested.
    pub fn new(problem: &Problem) -> Result<Self> {
        let program = &problem.program;
        let st = &program.structure;
        let index = program.index;
        let (h_count, c_count) = (index.hyperarcs, index.commodities);

        let coding_ok = program.rows.iter().all(|r| !matches!(r.owner, RowOwner::CodingSum { .. }));
        if !coding_ok {
            return Err(Error::Solver("the subgradient method needs max coding semantics".into()));
        }

        let total_demand: f64 = st.session_demands.iter().sum();
        let hyperarcs: Vec<HyperarcInfo> = (0..h_count)
            .map(|h| {
                let sender = st.hyperarc_sender[h];
                let gamma = st.gamma[h];
                let budget = st.budgets[sender];
                HyperarcInfo {
                    sender,
                    gamma,
                    scale: gamma.max(1.0),
                    budget,
                    power_cap: budget.min(total_demand / gamma),
                }
            })
            .collect();

        let mut session_commodities = vec![Vec::new(); index.sessions];
        for (c, com) in st.commodities.iter().enumerate() {
            session_commodities[com.session].push(c);
        }

        let groups: Vec<(Vec<usize>, Vec<usize>)> =
            st.groups.iter().map(|(_, owners, arcs)| (owners.clone(), arcs.clone())).collect();
        let mut hyperarc_groups = vec![Vec::new(); h_count];
        let mut arc_groups = vec![Vec::new(); st.arc_ends.len()];
        for (g, (owners, arcs)) in groups.iter().enumerate() {
            for &h in owners {
                hyperarc_groups[h].push(g);
            }
            for &e in arcs {
                arc_groups[e].push(g);
            }
        }

        let chains = problem
            .arc_graph
            .chains(&problem.hyperarcs)?
            .into_iter()
            .map(|chain| {
                let k = chain.groups.len();
                let new_arcs = (0..k)
                    .map(|j| {
                        let here = &groups[chain.groups[j]].1;
                        match chain.groups.get(j + 1) {
                            Some(&next) => here.iter().copied().filter(|e| !groups[next].1.contains(e)).collect(),
                            None => here.clone(),
                        }
                    })
                    .collect();
                ChainLayout {
                    sender: hyperarcs[chain.hyperarcs[0]].sender,
                    hyperarcs: chain.hyperarcs,
                    groups: chain.groups,
                    new_arcs,
                }
            })
            .collect();

        let mut has_budget = vec![false; st.node_count];
        for info in &hyperarcs {
            has_budget[info.sender] = true;
        }
        debug_assert_eq!(
            program.count_rows(RowKind::Budget),
            has_budget.iter().filter(|&&b| b).count()
        );

        let mut upper = vec![0.0; index.len()];
        for (h, info) in hyperarcs.iter().enumerate() {
            for (c, com) in st.commodities.iter().enumerate() {
                upper[index.x(h, c)] = com.demand;
            }
            for (m, &r) in st.session_demands.iter().enumerate() {
                upper[index.y(h, m)] = r;
            }
            upper[index.z(h)] = total_demand;
            upper[index.power(h)] = info.power_cap;
        }
        for e in 0..st.arc_ends.len() {
            for (c, com) in st.commodities.iter().enumerate() {
                upper[index.flow(e, c)] = com.demand;
            }
        }

        // A unit of rate on hyperarc h costs 1/gamma_h of power when no budget
        // binds; every multiplier is a marginal price of rate or power.
        let unit = |h: usize| 1.0 / hyperarcs[h].gamma;
        let f = DUAL_CAP_FACTOR;
        let total_budget: f64 = (0..st.node_count).filter(|&i| has_budget[i]).map(|i| st.budgets[i]).sum();
        let mut dual_caps = DualPoint::zeros(h_count, c_count, groups.len(), st.node_count);
        for (h, info) in hyperarcs.iter().enumerate() {
            for c in 0..c_count {
                dual_caps.lambda[h * c_count + c] = f * unit(h);
            }
            dual_caps.nu[h] = f * unit(h);
            dual_caps.mu[h] = f * info.scale * unit(h);
        }
        for (g, (owners, _)) in groups.iter().enumerate() {
            let cap = owners.iter().map(|&h| unit(h)).fold(0.0, f64::max);
            for c in 0..c_count {
                dual_caps.pi[g * c_count + c] = f * cap;
            }
        }
        for (zeta, &budgeted) in dual_caps.zeta.iter_mut().zip(&has_budget) {
            if budgeted {
                *zeta = f * total_budget;
            }
        }

        let polytopes = st
            .commodities
            .iter()
            .map(|com| FlowPolytope::new(st.node_count, st.arc_ends.clone(), com.source, com.sink, com.demand))
            .collect();

        let mut graph = DiGraph::with_capacity(st.node_count, st.arc_ends.len());
        for _ in 0..st.node_count {
            graph.add_node(());
        }
        for &(t, h) in &st.arc_ends {
            graph.add_edge(NodeIndex::new(t), NodeIndex::new(h), ());
        }

        Ok(Layout {
            index,
            node_count: st.node_count,
            hyperarcs,
            commodities: st.commodities.clone(),
            session_demands: st.session_demands.clone(),
            total_demand,
            session_commodities,
            groups,
            hyperarc_groups,
            arc_groups,
            arc_ends: st.arc_ends.clone(),
            has_budget,
            budgets: st.budgets.clone(),
            chains,
            upper,
            dual_caps,
            polytopes,
            graph,
        })
    }

    pub fn commodity_count(&self) -> usize {
        self.index.commodities
    }

    pub fn arc_count(&self) -> usize {
        self.arc_ends.len()
    }

    /// Lower end of the dual box.
    pub fn dual_floor(&self) -> DualPoint {
        let mut lo = DualPoint::zeros_like(&self.dual_caps);
        for (l, c) in lo.nu.iter_mut().zip(&self.dual_caps.nu) {
            *l = -c;
        }
        lo
    }
}
