//! JSON instance files.
//!
//! ```json
//! {
//!   "alpha": 2.0,
//!   "noise_density": 1.0,
//!   "bandwidth": 1.0,
//!   "reach_limit": null,
//!   "nodes": [{"id": 0, "x": 0.0, "y": 0.0, "power_budget": 1.0}],
//!   "sessions": [{"id": 0, "source": 0, "receivers": [1, 2], "demand": 0.5}]
//! }
//! ```
//!
//! Floats are written in shortest round-trip form, so `write` followed by
//! `read` reproduces every value bit for bit.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Channel, NetworkInstance, NodeId, NodeSpec, Point, Session};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub alpha: f64,
    pub noise_density: f64,
    pub bandwidth: f64,
    pub reach_limit: Option<usize>,
    pub nodes: Vec<NodeRecord>,
    pub sessions: Vec<SessionRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeRecord {
    pub id: u32,
    pub x: f64,
    pub y: f64,
    pub power_budget: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionRecord {
    pub id: usize,
    pub source: u32,
    pub receivers: Vec<u32>,
    pub demand: f64,
}

impl From<&NetworkInstance> for InstanceFile {
    fn from(inst: &NetworkInstance) -> Self {
        InstanceFile {
            alpha: inst.alpha(),
            noise_density: inst.noise_density(),
            bandwidth: inst.bandwidth(),
            reach_limit: inst.reach_limit(),
            nodes: inst
                .nodes()
                .iter()
                .map(|n| NodeRecord {
                    id: n.id.0,
                    x: n.location.x,
                    y: n.location.y,
                    power_budget: n.power_budget,
                })
                .collect(),
            sessions: inst
                .sessions()
                .iter()
                .map(|s| SessionRecord {
                    id: s.id,
                    source: s.source.0,
                    receivers: s.receivers.iter().map(|r| r.0).collect(),
                    demand: s.demand,
                })
                .collect(),
        }
    }
}

impl TryFrom<InstanceFile> for NetworkInstance {
    type Error = Error;

    fn try_from(file: InstanceFile) -> Result<Self> {
        let nodes = file
            .nodes
            .into_iter()
            .map(|n| NodeSpec {
                id: NodeId(n.id),
                location: Point::new(n.x, n.y),
                power_budget: n.power_budget,
            })
            .collect();
        let sessions = file
            .sessions
            .into_iter()
            .map(|s| Session {
                id: s.id,
                source: NodeId(s.source),
                receivers: s.receivers.into_iter().map(NodeId).collect(),
                demand: s.demand,
            })
            .collect();
        let channel = Channel {
            alpha: file.alpha,
            noise_density: file.noise_density,
            bandwidth: file.bandwidth,
        };
        NetworkInstance::new(nodes, channel, sessions, file.reach_limit)
    }
}

impl NetworkInstance {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&InstanceFile::from(self))
            .expect("instance file serialization cannot fail");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(text).map_err(|e| Error::Parse {
            path: "<memory>".into(),
            source: e,
        })?;
        file.try_into()
    }
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<NetworkInstance> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let file: InstanceFile = serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        source: e,
    })?;
    file.try_into()
}

pub fn write_instance(instance: &NetworkInstance, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, instance.to_json()).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"{
        "alpha": 2.0, "noise_density": 1.0, "bandwidth": 1.0, "reach_limit": null,
        "nodes": [
            {"id": 0, "x": 0.0, "y": 0.0, "power_budget": 1.0},
            {"id": 1, "x": 3.0, "y": 4.0, "power_budget": 2.0}
        ],
        "sessions": [{"id": 0, "source": 0, "receivers": [1], "demand": 0.1}]
    }"#;

    #[test]
    fn round_trip_preserves_every_bit() {
        let inst = NetworkInstance::from_json(SAMPLE).unwrap();
        let inst = inst
            .with_scaled_demands(1.0 / 3.0)
            .unwrap()
            .with_scaled_geometry(std::f64::consts::PI)
            .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("inst.json");
        write_instance(&inst, &path).unwrap();
        let back = read_instance(&path).unwrap();
        assert_eq!(back, inst);
        assert_eq!(back.to_json(), inst.to_json());
    }

    #[test]
    fn duplicate_node_id_is_named() {
        let text = SAMPLE.replace(r#""id": 1, "x": 3.0"#, r#""id": 0, "x": 3.0"#);
        let err = NetworkInstance::from_json(&text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("nodes.id") && msg.contains("duplicate node id 0"), "{msg}");
    }

    #[test]
    fn zero_alpha_is_rejected() {
        let text = SAMPLE.replace(r#""alpha": 2.0"#, r#""alpha": 0.0"#);
        let err = NetworkInstance::from_json(&text).unwrap_err();
        assert!(err.to_string().contains("alpha"), "{err}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = SAMPLE.replace(r#""bandwidth": 1.0,"#, r#""bandwidth": 1.0, "colour": 3,"#);
        assert!(NetworkInstance::from_json(&text).is_err());
    }

    #[test]
    fn missing_file_reports_path() {
        let err = read_instance("/nonexistent/inst.json").unwrap_err();
        assert!(err.to_string().contains("/nonexistent/inst.json"));
    }
}
