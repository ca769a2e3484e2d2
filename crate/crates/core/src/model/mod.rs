//! Network geometry, channel constants, sessions and the broadcast
//! decomposition into hyperarcs.

mod fixtures;
mod generate;
mod hyperarc;
mod io;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use fixtures::{butterfly, butterfly_nodes, single_link};
pub use generate::{derive_seed, generate_instance, generate_instance_with, DemandPolicy, GeneratorConfig};
pub use hyperarc::{decompose_broadcast, hyperarc_rate, Hyperarc};
pub use io::{read_instance, write_instance, InstanceFile, NodeRecord, SessionRecord};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Planar position in meters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NodeSpec {
    pub id: NodeId,
    pub location: Point,
    /// Total transmit power available to the node, in watts.
    pub power_budget: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Session {
    pub id: usize,
    pub source: NodeId,
    pub receivers: Vec<NodeId>,
    /// Rate every receiver must get, in nats/s.
    pub demand: f64,
}

/// Path-loss exponent, noise density and bandwidth shared by every link.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Channel {
    pub alpha: f64,
    pub noise_density: f64,
    /// Only used by the approximation analysis; the optimizer works in the
    /// infinite-bandwidth linear regime.
    pub bandwidth: f64,
}

impl Default for Channel {
    fn default() -> Self {
        Channel {
            alpha: 2.0,
            noise_density: 1.0,
            bandwidth: 1.0,
        }
    }
}

/// The full optimization input. Immutable once constructed.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkInstance {
    nodes: Vec<NodeSpec>,
    channel: Channel,
    sessions: Vec<Session>,
    reach_limit: Option<usize>,
    index: HashMap<NodeId, usize>,
}

impl NetworkInstance {
    pub fn new(
        nodes: Vec<NodeSpec>,
        channel: Channel,
        sessions: Vec<Session>,
        reach_limit: Option<usize>,
    ) -> Result<Self> {
        if !(channel.alpha > 0.0 && channel.alpha.is_finite()) {
            return Err(Error::validation("alpha", format!("must be > 0, got {}", channel.alpha)));
        }
        if !(channel.noise_density > 0.0 && channel.noise_density.is_finite()) {
            return Err(Error::validation(
                "noise_density",
                format!("must be > 0, got {}", channel.noise_density),
            ));
        }
        if !(channel.bandwidth > 0.0 && channel.bandwidth.is_finite()) {
            return Err(Error::validation(
                "bandwidth",
                format!("must be > 0, got {}", channel.bandwidth),
            ));
        }
        if reach_limit == Some(0) {
            return Err(Error::validation("reach_limit", "must be a positive integer or null"));
        }

        let mut index = HashMap::with_capacity(nodes.len());
        for (pos, node) in nodes.iter().enumerate() {
            if index.insert(node.id, pos).is_some() {
                return Err(Error::validation("nodes.id", format!("duplicate node id {}", node.id)));
            }
            if !(node.power_budget > 0.0 && node.power_budget.is_finite()) {
                return Err(Error::validation(
                    "nodes.power_budget",
                    format!("node {}: must be > 0, got {}", node.id, node.power_budget),
                ));
            }
            if !(node.location.x.is_finite() && node.location.y.is_finite()) {
                return Err(Error::validation(
                    "nodes.location",
                    format!("node {}: coordinates must be finite", node.id),
                ));
            }
        }
        for (a, na) in nodes.iter().enumerate() {
            for nb in &nodes[a + 1..] {
                if na.location == nb.location {
                    return Err(Error::CoincidentNodes(na.id, nb.id));
                }
            }
        }

        let mut session_ids = HashMap::new();
        for s in &sessions {
            if session_ids.insert(s.id, ()).is_some() {
                return Err(Error::validation("sessions.id", format!("duplicate session id {}", s.id)));
            }
            if !index.contains_key(&s.source) {
                return Err(Error::validation(
                    "sessions.source",
                    format!("session {}: unknown node {}", s.id, s.source),
                ));
            }
            if s.receivers.is_empty() {
                return Err(Error::validation(
                    "sessions.receivers",
                    format!("session {}: receiver set is empty", s.id),
                ));
            }
            for (k, r) in s.receivers.iter().enumerate() {
                if !index.contains_key(r) {
                    return Err(Error::validation(
                        "sessions.receivers",
                        format!("session {}: unknown node {}", s.id, r),
                    ));
                }
                if *r == s.source {
                    return Err(Error::validation(
                        "sessions.receivers",
                        format!("session {}: source {} listed as receiver", s.id, r),
                    ));
                }
                if s.receivers[..k].contains(r) {
                    return Err(Error::validation(
                        "sessions.receivers",
                        format!("session {}: receiver {} listed twice", s.id, r),
                    ));
                }
            }
            if !(s.demand > 0.0 && s.demand.is_finite()) {
                return Err(Error::validation(
                    "sessions.demand",
                    format!("session {}: must be > 0, got {}", s.id, s.demand),
                ));
            }
        }

        Ok(NetworkInstance {
            nodes,
            channel,
            sessions,
            reach_limit,
            index,
        })
    }

    pub fn nodes(&self) -> &[NodeSpec] {
        &self.nodes
    }

    pub fn sessions(&self) -> &[Session] {
        &self.sessions
    }

    pub fn channel(&self) -> Channel {
        self.channel
    }

    pub fn alpha(&self) -> f64 {
        self.channel.alpha
    }

    pub fn noise_density(&self) -> f64 {
        self.channel.noise_density
    }

    pub fn bandwidth(&self) -> f64 {
        self.channel.bandwidth
    }

    pub fn reach_limit(&self) -> Option<usize> {
        self.reach_limit
    }

    /// Position of `id` in [`Self::nodes`].
    pub fn index_of(&self, id: NodeId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    pub fn node(&self, id: NodeId) -> Option<&NodeSpec> {
        self.index_of(id).map(|i| &self.nodes[i])
    }

    pub fn distance(&self, a: NodeId, b: NodeId) -> Option<f64> {
        Some(self.node(a)?.location.distance(&self.node(b)?.location))
    }

    pub fn total_demand(&self) -> f64 {
        self.sessions.iter().map(|s| s.demand).sum()
    }

    /// Same network with a different session list.
    pub fn with_sessions(&self, sessions: Vec<Session>) -> Result<Self> {
        Self::new(self.nodes.clone(), self.channel, sessions, self.reach_limit)
    }

    /// Same network and sessions with every demand multiplied by `factor`.
    pub fn with_scaled_demands(&self, factor: f64) -> Result<Self> {
        let sessions = self
            .sessions
            .iter()
            .map(|s| Session {
                demand: s.demand * factor,
                ..s.clone()
            })
            .collect();
        self.with_sessions(sessions)
    }

    /// Multiplies every power budget by `factor`.
    pub fn with_scaled_budgets(&self, factor: f64) -> Result<Self> {
        let nodes = self
            .nodes
            .iter()
            .map(|n| NodeSpec {
                power_budget: n.power_budget * factor,
                ..n.clone()
            })
            .collect();
        Self::new(nodes, self.channel, self.sessions.clone(), self.reach_limit)
    }

    /// Multiplies every coordinate by `factor`.
    pub fn with_scaled_geometry(&self, factor: f64) -> Result<Self> {
        let nodes = self
            .nodes
            .iter()
            .map(|n| NodeSpec {
                location: Point::new(n.location.x * factor, n.location.y * factor),
                ..n.clone()
            })
            .collect();
        Self::new(nodes, self.channel, self.sessions.clone(), self.reach_limit)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn node(id: u32, x: f64, y: f64) -> NodeSpec {
        NodeSpec {
            id: NodeId(id),
            location: Point::new(x, y),
            power_budget: 1.0,
        }
    }

    #[test]
    fn rejects_duplicate_ids() {
        let err = NetworkInstance::new(
            vec![node(3, 0.0, 0.0), node(3, 1.0, 0.0)],
            Channel::default(),
            vec![],
            None,
        )
        .unwrap_err();
        assert!(err.to_string().contains("duplicate node id 3"), "{err}");
    }

    #[test]
    fn rejects_coincident_locations() {
        let err = NetworkInstance::new(
            vec![node(0, 1.0, 1.0), node(1, 1.0, 1.0)],
            Channel::default(),
            vec![],
            None,
        )
        .unwrap_err();
        assert!(matches!(err, Error::CoincidentNodes(..)));
    }

    #[test]
    fn rejects_bad_sessions() {
        let nodes = vec![node(0, 0.0, 0.0), node(1, 1.0, 0.0)];
        let bad = |s: Session| NetworkInstance::new(nodes.clone(), Channel::default(), vec![s], None);
        let base = Session {
            id: 0,
            source: NodeId(0),
            receivers: vec![NodeId(1)],
            demand: 1.0,
        };
        assert!(bad(base.clone()).is_ok());
        assert!(bad(Session { receivers: vec![], ..base.clone() }).is_err());
        assert!(bad(Session { receivers: vec![NodeId(0)], ..base.clone() }).is_err());
        assert!(bad(Session { receivers: vec![NodeId(7)], ..base.clone() }).is_err());
        assert!(bad(Session { demand: 0.0, ..base.clone() }).is_err());
        assert!(bad(Session { source: NodeId(9), ..base }).is_err());
    }

    #[test]
    fn rejects_nonpositive_channel_constants() {
        let nodes = vec![node(0, 0.0, 0.0), node(1, 1.0, 0.0)];
        for channel in [
            Channel { alpha: 0.0, ..Channel::default() },
            Channel { noise_density: -1.0, ..Channel::default() },
            Channel { bandwidth: 0.0, ..Channel::default() },
        ] {
            assert!(NetworkInstance::new(nodes.clone(), channel, vec![], None).is_err());
        }
        assert!(NetworkInstance::new(nodes, Channel::default(), vec![], Some(0)).is_err());
    }
}
