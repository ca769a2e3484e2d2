use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::model::{Hyperarc, NodeId};

/// Directed arc `(tail, head)` of the arc graph, with the hyperarcs that
/// deliver to `head`. Owner indices are ascending positions in the hyperarc
/// list.
#[derive(Clone, Debug, PartialEq)]
pub struct Arc {
    pub tail: NodeId,
    pub head: NodeId,
    pub owners: Vec<usize>,
}

/// One distinct owning set of a sender together with every arc of that sender
/// whose owning set it contains. Flow on those arcs can only be carried by the
/// group's hyperarcs, which gives one capacity-sharing row per group and
/// commodity.
#[derive(Clone, Debug, PartialEq)]
pub struct ArcGroup {
    pub sender: NodeId,
    pub owners: Vec<usize>,
    pub arcs: Vec<usize>,
}

/// A sender's hyperarcs in nesting order, `J^1 ⊂ J^2 ⊂ ...`, with
/// `groups[k]` the group owned by `hyperarcs[k..]`. That group's arcs are the
/// ones to receivers outside `J^(k-1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Chain {
    pub sender: NodeId,
    pub hyperarcs: Vec<usize>,
    pub groups: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ArcGraph {
    arcs: Vec<Arc>,
    groups: Vec<ArcGroup>,
    hyperarc_count: usize,
}

impl ArcGraph {
    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn groups(&self) -> &[ArcGroup] {
        &self.groups
    }

    pub fn hyperarc_count(&self) -> usize {
        self.hyperarc_count
    }

    pub fn find(&self, tail: NodeId, head: NodeId) -> Option<usize> {
        self.arcs.iter().position(|a| a.tail == tail && a.head == head)
    }

    /// Nesting chains per sender, in order of first appearance. Fails if some
    /// sender's hyperarcs are not totally ordered by inclusion.
    pub fn chains(&self, hyperarcs: &[Hyperarc]) -> Result<Vec<Chain>> {
        let mut senders: Vec<NodeId> = Vec::new();
        for h in hyperarcs {
            if !senders.contains(&h.sender) {
                senders.push(h.sender);
            }
        }
        senders
            .into_iter()
            .map(|sender| {
                let mut members: Vec<usize> =
                    (0..hyperarcs.len()).filter(|&i| hyperarcs[i].sender == sender).collect();
                members.sort_by_key(|&i| (hyperarcs[i].receivers.len(), i));
                for w in members.windows(2) {
                    let (small, big) = (&hyperarcs[w[0]], &hyperarcs[w[1]]);
                    if big.receivers.len() <= small.receivers.len()
                        || !small.receivers.iter().all(|r| big.contains(*r))
                    {
                        return Err(Error::NotNested(sender));
                    }
                }
                let mut groups = Vec::with_capacity(members.len());
                for k in 0..members.len() {
                    let owners: Vec<usize> = {
                        let mut o = members[k..].to_vec();
                        o.sort_unstable();
                        o
                    };
                    let g = self
                        .groups
                        .iter()
                        .position(|g| g.sender == sender && g.owners == owners)
                        .ok_or(Error::NotNested(sender))?;
                    groups.push(g);
                }
                Ok(Chain {
                    sender,
                    hyperarcs: members,
                    groups,
                })
            })
            .collect()
    }
}

/// Expands hyperarcs into the arc graph: one arc `(i, l)` per sender `i` and
/// receiver `l` reached by at least one hyperarc of `i`, plus the owning-set
/// groups used to couple arc flow to hyperarc flow.
///
/// Each sender's owning sets must be laminar (pairwise nested or disjoint),
/// which always holds for broadcast decompositions.
pub fn build_arc_graph(hyperarcs: &[Hyperarc]) -> Result<ArcGraph> {
    let mut arcs: Vec<Arc> = Vec::new();
    let mut lookup: HashMap<(NodeId, NodeId), usize> = HashMap::new();
    for (h, hyper) in hyperarcs.iter().enumerate() {
        for &head in &hyper.receivers {
            let idx = *lookup.entry((hyper.sender, head)).or_insert_with(|| {
                arcs.push(Arc {
                    tail: hyper.sender,
                    head,
                    owners: Vec::new(),
                });
                arcs.len() - 1
            });
            if arcs[idx].owners.last() != Some(&h) {
                arcs[idx].owners.push(h);
            }
        }
    }

    let mut groups: Vec<ArcGroup> = Vec::new();
    for arc in &arcs {
        if !groups.iter().any(|g| g.sender == arc.tail && g.owners == arc.owners) {
            groups.push(ArcGroup {
                sender: arc.tail,
                owners: arc.owners.clone(),
                arcs: Vec::new(),
            });
        }
    }
    for g in groups.iter_mut() {
        g.arcs = arcs
            .iter()
            .enumerate()
            .filter(|(_, a)| a.tail == g.sender && is_subset(&a.owners, &g.owners))
            .map(|(i, _)| i)
            .collect();
    }
    for (i, a) in groups.iter().enumerate() {
        for b in &groups[i + 1..] {
            if a.sender == b.sender
                && !is_subset(&a.owners, &b.owners)
                && !is_subset(&b.owners, &a.owners)
                && a.owners.iter().any(|o| b.owners.contains(o))
            {
                return Err(Error::NonLaminar(a.sender));
            }
        }
    }

    Ok(ArcGraph {
        arcs,
        groups,
        hyperarc_count: hyperarcs.len(),
    })
}

fn is_subset(small: &[usize], big: &[usize]) -> bool {
    small.iter().all(|x| big.contains(x))
}
