use std::collections::VecDeque;

use super::arc_graph::ArcGraph;
use super::program::{Commodity, FlowProgram, Row, RowKind, RowOwner, Sense, Structure, VariableIndex};
use crate::error::{Error, Result};
use crate::model::{Hyperarc, NetworkInstance};

/// How a hyperarc's per-sink flows of one session combine into its rate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CodingSemantics {
    /// Intra-session network coding: the rate is the largest per-sink flow.
    #[default]
    Max,
    /// Plain routing: per-sink flows add up.
    Sum,
}

/// Builds the min-power LP.
///
/// Rows, in order (with `G` arc groups, `S` senders, `N` nodes):
///
/// | kind | count |
/// |---|---|
/// | coding | `H*C` (`H*M` under [`CodingSemantics::Sum`]) |
/// | arc-sum | `G*C` |
/// | aggregate | `H` |
/// | capacity | `H` |
/// | budget | `S` |
/// | conservation | `N*C` |
///
/// For broadcast decompositions `G = H` and `S = N`.
pub fn assemble_program(
    instance: &NetworkInstance,
    hyperarcs: &[Hyperarc],
    arc_graph: &ArcGraph,
    semantics: CodingSemantics,
) -> Result<FlowProgram> {
    let pos = |id| instance.index_of(id).ok_or(Error::UnknownNode(id));

    let mut hyperarc_sender = Vec::with_capacity(hyperarcs.len());
    let mut rank = Vec::with_capacity(hyperarcs.len());
    for (h, hyper) in hyperarcs.iter().enumerate() {
        let s = pos(hyper.sender)?;
        for &r in &hyper.receivers {
            pos(r)?;
        }
        if !(hyper.gamma > 0.0 && hyper.gamma.is_finite()) {
            return Err(Error::validation("gamma", format!("hyperarc {h}: must be finite and > 0")));
        }
        rank.push(1 + hyperarcs[..h].iter().filter(|o| o.sender == hyper.sender).count());
        hyperarc_sender.push(s);
    }
    let arc_ends: Vec<(usize, usize)> = arc_graph
        .arcs()
        .iter()
        .map(|a| Ok((pos(a.tail)?, pos(a.head)?)))
        .collect::<Result<_>>()?;

    let node_count = instance.nodes().len();
    let commodities: Vec<Commodity> = instance
        .sessions()
        .iter()
        .enumerate()
        .flat_map(|(m, s)| {
            s.receivers.iter().map(move |&t| (m, s, t))
        })
        .map(|(m, s, t)| {
            Ok(Commodity {
                session: m,
                session_id: s.id,
                source: pos(s.source)?,
                sink: pos(t)?,
                demand: s.demand,
            })
        })
        .collect::<Result<_>>()?;

    let reach = reachability(node_count, &arc_ends);
    for c in &commodities {
        if !reach[c.source][c.sink] {
            let s = &instance.sessions()[c.session];
            return Err(Error::UnreachableSink {
                session: s.id,
                origin: s.source,
                sink: instance.nodes()[c.sink].id,
            });
        }
    }

    let index = VariableIndex {
        hyperarcs: hyperarcs.len(),
        arcs: arc_ends.len(),
        commodities: commodities.len(),
        sessions: instance.sessions().len(),
    };

    let nid = |p: usize| instance.nodes()[p].id;
    let mut names = vec![String::new(); index.len()];
    for h in 0..index.hyperarcs {
        let (i, k) = (hyperarcs[h].sender, rank[h]);
        for (c, com) in commodities.iter().enumerate() {
            names[index.x(h, c)] = format!("x_{}_{}_{}_{}", com.session_id, nid(com.sink), i, k);
        }
        for (m, s) in instance.sessions().iter().enumerate() {
            names[index.y(h, m)] = format!("y_{}_{}_{}", s.id, i, k);
        }
        names[index.z(h)] = format!("z_{i}_{k}");
        names[index.power(h)] = format!("P_{i}_{k}");
    }
    for (e, &(tail, head)) in arc_ends.iter().enumerate() {
        for (c, com) in commodities.iter().enumerate() {
            names[index.flow(e, c)] =
                format!("f_{}_{}_{}_{}", com.session_id, nid(com.sink), nid(tail), nid(head));
        }
    }

    let mut objective = vec![0.0; index.len()];
    for h in 0..index.hyperarcs {
        objective[index.power(h)] = 1.0;
    }

    let mut rows = Vec::new();
    match semantics {
        CodingSemantics::Max => {
            for h in 0..index.hyperarcs {
                for (c, com) in commodities.iter().enumerate() {
                    rows.push(Row {
                        kind: RowKind::Coding,
                        sense: Sense::Ge,
                        owner: RowOwner::Coding { hyperarc: h, commodity: c },
                        coeffs: vec![(index.y(h, com.session), 1.0), (index.x(h, c), -1.0)],
                        rhs: 0.0,
                    });
                }
            }
        }
        CodingSemantics::Sum => {
            for h in 0..index.hyperarcs {
                for m in 0..index.sessions {
                    let mut coeffs = vec![(index.y(h, m), 1.0)];
                    coeffs.extend(
                        commodities
                            .iter()
                            .enumerate()
                            .filter(|(_, com)| com.session == m)
                            .map(|(c, _)| (index.x(h, c), -1.0)),
                    );
                    rows.push(Row {
                        kind: RowKind::Coding,
                        sense: Sense::Ge,
                        owner: RowOwner::CodingSum { hyperarc: h, session: m },
                        coeffs,
                        rhs: 0.0,
                    });
                }
            }
        }
    }

    for (g, group) in arc_graph.groups().iter().enumerate() {
        for c in 0..index.commodities {
            let mut coeffs: Vec<(usize, f64)> = group.owners.iter().map(|&h| (index.x(h, c), 1.0)).collect();
            coeffs.extend(group.arcs.iter().map(|&e| (index.flow(e, c), -1.0)));
            rows.push(Row {
                kind: RowKind::ArcSum,
                sense: Sense::Ge,
                owner: RowOwner::ArcSum { group: g, commodity: c },
                coeffs,
                rhs: 0.0,
            });
        }
    }

    for h in 0..index.hyperarcs {
        let mut coeffs = vec![(index.z(h), 1.0)];
        coeffs.extend((0..index.sessions).map(|m| (index.y(h, m), -1.0)));
        rows.push(Row {
            kind: RowKind::Aggregate,
            sense: Sense::Eq,
            owner: RowOwner::Aggregate { hyperarc: h },
            coeffs,
            rhs: 0.0,
        });
    }

    for (h, hyper) in hyperarcs.iter().enumerate() {
        let scale = hyper.gamma.max(1.0);
        rows.push(Row {
            kind: RowKind::Capacity,
            sense: Sense::Ge,
            owner: RowOwner::Capacity { hyperarc: h },
            coeffs: vec![(index.power(h), hyper.gamma / scale), (index.z(h), -1.0 / scale)],
            rhs: 0.0,
        });
    }

    let budgets: Vec<f64> = instance.nodes().iter().map(|n| n.power_budget).collect();
    for (node, &budget) in budgets.iter().enumerate() {
        let coeffs: Vec<(usize, f64)> = (0..index.hyperarcs)
            .filter(|&h| hyperarc_sender[h] == node)
            .map(|h| (index.power(h), -1.0 / budget))
            .collect();
        if coeffs.is_empty() {
            continue;
        }
        rows.push(Row {
            kind: RowKind::Budget,
            sense: Sense::Ge,
            owner: RowOwner::Budget { node },
            coeffs,
            rhs: -1.0,
        });
    }

    for (c, com) in commodities.iter().enumerate() {
        for node in 0..node_count {
            let mut coeffs = Vec::new();
            for (e, &(tail, head)) in arc_ends.iter().enumerate() {
                if tail == node {
                    coeffs.push((index.flow(e, c), 1.0));
                } else if head == node {
                    coeffs.push((index.flow(e, c), -1.0));
                }
            }
            let rhs = if node == com.source {
                com.demand
            } else if node == com.sink {
                -com.demand
            } else {
                0.0
            };
            rows.push(Row {
                kind: RowKind::Conservation,
                sense: Sense::Eq,
                owner: RowOwner::Conservation { commodity: c, node },
                coeffs,
                rhs,
            });
        }
    }

    let structure = Structure {
        node_count,
        session_demands: instance.sessions().iter().map(|s| s.demand).collect(),
        commodities,
        arc_ends,
        hyperarc_sender,
        gamma: hyperarcs.iter().map(|h| h.gamma).collect(),
        budgets,
        groups: arc_graph
            .groups()
            .iter()
            .map(|g| Ok((pos(g.sender)?, g.owners.clone(), g.arcs.clone())))
            .collect::<Result<_>>()?,
    };

    Ok(FlowProgram {
        index,
        objective,
        rows,
        names,
        structure,
    })
}

fn reachability(n: usize, arcs: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut adj = vec![Vec::new(); n];
    for &(t, h) in arcs {
        adj[t].push(h);
    }
    (0..n)
        .map(|s| {
            let mut seen = vec![false; n];
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for &w in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
            seen
        })
        .collect()
}
