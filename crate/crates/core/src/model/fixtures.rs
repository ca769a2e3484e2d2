//! Small hand-built networks with known optima.

use super::{Channel, Hyperarc, NetworkInstance, NodeId, NodeSpec, Point, Session};
use crate::error::Result;

fn node(id: u32, x: f64, y: f64, budget: f64) -> NodeSpec {
    NodeSpec {
        id: NodeId(id),
        location: Point::new(x, y),
        power_budget: budget,
    }
}

/// Two nodes `distance` apart with one unicast session of rate `demand`.
/// The source has budget `budget`, the sink budget 1.
pub fn single_link(distance: f64, demand: f64, budget: f64) -> Result<NetworkInstance> {
    NetworkInstance::new(
        vec![node(0, 0.0, 0.0, budget), node(1, distance, 0.0, 1.0)],
        Channel::default(),
        vec![Session {
            id: 0,
            source: NodeId(0),
            receivers: vec![NodeId(1)],
            demand,
        }],
        None,
    )
}

/// Node ids of [`butterfly`].
pub mod butterfly_nodes {
    pub const S: u32 = 0;
    pub const A: u32 = 1;
    pub const B: u32 = 2;
    pub const C: u32 = 3;
    pub const D: u32 = 4;
    pub const T1: u32 = 5;
    pub const T2: u32 = 6;
}

/// The coding butterfly as point-to-point hyperarcs: `s -> a, b`,
/// `a -> c, t1`, `b -> c, t2`, `c -> d`, `d -> t1, t2`, one multicast of
/// rate 1 from `s` to `{t1, t2}`. Every arc has gain 1 except the two side
/// arcs `a -> t1` and `b -> t2`, which are twice as long (gain 1/4). Budgets
/// never bind.
///
/// Sharing `s -> a -> c -> d` serves both sinks for a total power of 5.
/// Routing each sink separately costs at least 4 per sink.
pub fn butterfly() -> Result<(NetworkInstance, Vec<Hyperarc>)> {
    use butterfly_nodes::*;
    let budget = 10.0;
    let nodes = vec![
        node(S, 1.0, 2.0, budget),
        node(A, 0.0, 1.0, budget),
        node(B, 2.0, 1.0, budget),
        node(C, 1.0, 1.0, budget),
        node(D, 1.0, 0.0, budget),
        node(T1, 0.0, -1.0, budget),
        node(T2, 2.0, -1.0, budget),
    ];
    let sessions = vec![Session {
        id: 0,
        source: NodeId(S),
        receivers: vec![NodeId(T1), NodeId(T2)],
        demand: 1.0,
    }];
    let instance = NetworkInstance::new(nodes, Channel::default(), sessions, None)?;
    let arc = |from: u32, to: u32, gamma: f64| Hyperarc::new(NodeId(from), vec![NodeId(to)], gamma);
    let hyperarcs = vec![
        arc(S, A, 1.0),
        arc(S, B, 1.0),
        arc(A, C, 1.0),
        arc(A, T1, 0.25),
        arc(B, C, 1.0),
        arc(B, T2, 0.25),
        arc(C, D, 1.0),
        arc(D, T1, 1.0),
        arc(D, T2, 1.0),
    ];
    Ok((instance, hyperarcs))
}
