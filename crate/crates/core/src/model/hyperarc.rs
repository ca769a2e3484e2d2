use crate::error::{Error, Result};

use super::{NetworkInstance, NodeId};

/// A broadcast connection from one sender to a receiver set, carrying one
/// common rate. Receivers are listed best (closest) first; `gamma` is the
/// rate bought per watt, fixed by the worst receiver.
#[derive(Clone, Debug, PartialEq)]
pub struct Hyperarc {
    pub sender: NodeId,
    pub receivers: Vec<NodeId>,
    pub gamma: f64,
}

impl Hyperarc {
    pub fn new(sender: NodeId, receivers: Vec<NodeId>, gamma: f64) -> Self {
        Hyperarc {
            sender,
            receivers,
            gamma,
        }
    }

    pub fn worst_receiver(&self) -> NodeId {
        *self.receivers.last().expect("hyperarc without receivers")
    }

    pub fn contains(&self, node: NodeId) -> bool {
        self.receivers.contains(&node)
    }

    /// Rate carried when `power` watts are spent on this hyperarc.
    pub fn rate(&self, power: f64) -> Result<f64> {
        hyperarc_rate(power, self.gamma)
    }
}

/// Linear low-SNR rate: `gamma * power`.
pub fn hyperarc_rate(power: f64, gamma: f64) -> Result<f64> {
    if power < 0.0 {
        return Err(Error::NegativePower(power));
    }
    Ok(gamma * power)
}

/// Splits every node's broadcast channel into nested hyperarcs.
///
/// Receivers are sorted by distance from the sender (ties by ascending id) and
/// the `k`-th hyperarc reaches the `k` closest of them, for
/// `k = 1..=min(reach_limit, n - 1)`. Its gain is `1 / (d^alpha * N0)` with `d`
/// the distance to the farthest receiver in the prefix.
pub fn decompose_broadcast(instance: &NetworkInstance) -> Result<Vec<Hyperarc>> {
    let nodes = instance.nodes();
    let n = nodes.len();
    let reach = instance.reach_limit().unwrap_or(usize::MAX).min(n.saturating_sub(1));
    let alpha = instance.alpha();
    let n0 = instance.noise_density();

    let mut out = Vec::with_capacity(n * reach);
    for sender in nodes {
        let mut others: Vec<(f64, NodeId)> = nodes
            .iter()
            .filter(|o| o.id != sender.id)
            .map(|o| (sender.location.distance(&o.location), o.id))
            .collect();
        others.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

        for k in 1..=reach {
            let (d, worst) = others[k - 1];
            if d == 0.0 {
                return Err(Error::CoincidentNodes(sender.id, worst));
            }
            let gamma = 1.0 / (d.powf(alpha) * n0);
            out.push(Hyperarc {
                sender: sender.id,
                receivers: others[..k].iter().map(|o| o.1).collect(),
                gamma,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Channel, NodeSpec, Point};

    fn line_instance(xs: &[f64], reach: Option<usize>) -> NetworkInstance {
        let nodes = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| NodeSpec {
                id: NodeId(i as u32),
                location: Point::new(x, 0.0),
                power_budget: 1.0,
            })
            .collect();
        NetworkInstance::new(nodes, Channel::default(), vec![], reach).unwrap()
    }

    #[test]
    fn two_receivers_on_a_line() {
        // gamma = 1 / (d^2 * 1): d = 1 -> 1.0, d = 2 -> 0.25
        let inst = line_instance(&[0.0, 1.0, 2.0], None);
        let hs: Vec<_> = decompose_broadcast(&inst)
            .unwrap()
            .into_iter()
            .filter(|h| h.sender == NodeId(0))
            .collect();
        assert_eq!(hs.len(), 2);
        assert_eq!(hs[0].receivers, vec![NodeId(1)]);
        assert_eq!(hs[0].gamma, 1.0);
        assert_eq!(hs[1].receivers, vec![NodeId(1), NodeId(2)]);
        assert_eq!(hs[1].gamma, 0.25);
    }

    #[test]
    fn equidistant_receivers_tie_break_by_id() {
        let nodes = vec![
            NodeSpec { id: NodeId(5), location: Point::new(0.0, 0.0), power_budget: 1.0 },
            NodeSpec { id: NodeId(9), location: Point::new(0.0, 1.0), power_budget: 1.0 },
            NodeSpec { id: NodeId(2), location: Point::new(1.0, 0.0), power_budget: 1.0 },
        ];
        let channel = Channel { noise_density: 0.5, ..Channel::default() };
        let inst = NetworkInstance::new(nodes, channel, vec![], None).unwrap();
        let hs: Vec<_> = decompose_broadcast(&inst)
            .unwrap()
            .into_iter()
            .filter(|h| h.sender == NodeId(5))
            .collect();
        assert_eq!(hs[0].receivers, vec![NodeId(2)]);
        assert_eq!(hs[1].receivers, vec![NodeId(2), NodeId(9)]);
        assert_eq!(hs[0].gamma, 2.0);
        assert_eq!(hs[1].gamma, 2.0);
    }

    #[test]
    fn reach_limit_one_keeps_nearest_neighbor() {
        let inst = line_instance(&[0.0, 1.0, 3.0, 7.0], Some(1));
        let hs = decompose_broadcast(&inst).unwrap();
        assert_eq!(hs.len(), 4);
        let nearest: Vec<_> = hs.iter().map(|h| (h.sender.0, h.receivers[0].0)).collect();
        assert_eq!(nearest, vec![(0, 1), (1, 0), (2, 1), (3, 2)]);
    }

    #[test]
    fn two_nodes_give_one_hyperarc_each() {
        let inst = line_instance(&[0.0, 4.0], None);
        assert_eq!(decompose_broadcast(&inst).unwrap().len(), 2);
    }

    #[test]
    fn rate_is_linear_in_power() {
        assert_eq!(hyperarc_rate(0.0, 3.0).unwrap(), 0.0);
        assert_eq!(hyperarc_rate(1.0, 1.0).unwrap(), 1.0);
        assert_eq!(hyperarc_rate(2.0, 0.25).unwrap(), 0.5);
        assert!(matches!(hyperarc_rate(-1.0, 1.0), Err(Error::NegativePower(_))));
    }
}
