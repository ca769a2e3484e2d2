//! Seeded random instances: uniform placement on an `a x a` square, random
//! multicast sessions, demands scaled down until the program is feasible.
//!
//! Randomness comes from one 64-bit seed. Each concern draws from its own
//! ChaCha8 stream of that seed (0: placement, 1: sessions, 2: demands), so
//! changing e.g. the session count never moves the node positions.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Channel, NetworkInstance, NodeId, NodeSpec, Point, Session};
use crate::error::{Error, Result};
use crate::formulation::{check_feasibility, Feasibility, Problem};

const STREAM_PLACEMENT: u64 = 0;
const STREAM_SESSIONS: u64 = 1;
const STREAM_DEMANDS: u64 = 2;

/// How session demands are brought under the network's min-cut.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DemandPolicy {
    /// Draw each demand uniformly in (0, 1], then halve all of them until the
    /// phase-1 check passes.
    Halving { max_attempts: usize },
    /// Use the drawn demands as-is; fail if infeasible.
    Fixed,
}

impl Default for DemandPolicy {
    fn default() -> Self {
        DemandPolicy::Halving { max_attempts: 30 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneratorConfig {
    pub channel: Channel,
    pub power_budget: f64,
    pub reach_limit: Option<usize>,
    /// Upper bound on receivers per session (also capped at `n - 1`).
    pub max_sinks: usize,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            channel: Channel::default(),
            power_budget: 1.0,
            reach_limit: None,
            max_sinks: 3,
        }
    }
}

pub fn generate_instance(
    seed: u64,
    node_count: usize,
    area_side: f64,
    session_count: usize,
    policy: DemandPolicy,
) -> Result<NetworkInstance> {
    generate_instance_with(&GeneratorConfig::default(), seed, node_count, area_side, session_count, policy)
}

pub fn generate_instance_with(
    config: &GeneratorConfig,
    seed: u64,
    node_count: usize,
    area_side: f64,
    session_count: usize,
    policy: DemandPolicy,
) -> Result<NetworkInstance> {
    if node_count < 2 {
        return Err(Error::validation("node_count", format!("need at least 2 nodes, got {node_count}")));
    }
    if !(area_side > 0.0 && area_side.is_finite()) {
        return Err(Error::validation("area_side", format!("must be > 0, got {area_side}")));
    }
    if config.max_sinks == 0 {
        return Err(Error::validation("max_sinks", "must be at least 1"));
    }

    let nodes = place_nodes(config, seed, node_count, area_side);
    let sessions = draw_sessions(config, seed, node_count, session_count);
    let instance = NetworkInstance::new(nodes, config.channel, sessions, config.reach_limit)?;

    match policy {
        DemandPolicy::Fixed => {
            if is_feasible(&instance)? {
                Ok(instance)
            } else {
                Err(Error::GeneratorExhausted(1))
            }
        }
        DemandPolicy::Halving { max_attempts } => {
            let mut current = instance;
            for _ in 0..max_attempts {
                if is_feasible(&current)? {
                    return Ok(current);
                }
                current = current.with_scaled_demands(0.5)?;
            }
            Err(Error::GeneratorExhausted(max_attempts))
        }
    }
}

fn is_feasible(instance: &NetworkInstance) -> Result<bool> {
    let problem = Problem::build(instance.clone())?;
    Ok(matches!(check_feasibility(&problem.program)?, Feasibility::Feasible { .. }))
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

fn place_nodes(config: &GeneratorConfig, seed: u64, n: usize, side: f64) -> Vec<NodeSpec> {
    let mut rng = stream(seed, STREAM_PLACEMENT);
    let mut points: Vec<Point> = Vec::with_capacity(n);
    while points.len() < n {
        let p = Point::new(rng.random::<f64>() * side, rng.random::<f64>() * side);
        if !points.contains(&p) {
            points.push(p);
        }
    }
    points
        .into_iter()
        .enumerate()
        .map(|(i, location)| NodeSpec {
            id: NodeId(i as u32),
            location,
            power_budget: config.power_budget,
        })
        .collect()
}

fn draw_sessions(config: &GeneratorConfig, seed: u64, n: usize, count: usize) -> Vec<Session> {
    let mut rng = stream(seed, STREAM_SESSIONS);
    let mut demand_rng = stream(seed, STREAM_DEMANDS);
    let max_sinks = config.max_sinks.min(n - 1);
    (0..count)
        .map(|id| {
            let source = rng.random_range(0..n);
            let sink_count = rng.random_range(1..=max_sinks);
            let mut receivers: Vec<NodeId> = sample(&mut rng, n - 1, sink_count)
                .into_iter()
                .map(|k| if k >= source { k + 1 } else { k })
                .map(|k| NodeId(k as u32))
                .collect();
            receivers.sort();
            // (0, 1]
            let demand = 1.0 - demand_rng.random::<f64>();
            Session {
                id,
                source: NodeId(source as u32),
                receivers,
                demand,
            }
        })
        .collect()
}

/// Derives an independent seed for cell `index` of a sweep (SplitMix64).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
