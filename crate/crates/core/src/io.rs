//! JSON file formats. All PE and task indices in files are 1-based.
//!
//! Topology:
//! ```json
//! { "nodes": [{"index": 1, "type": "RISC"}, {"index": 2, "type": "RISC"}],
//!   "links": [{"a": 1, "b": 2, "resource": "noc", "hops": 1}],
//!   "buses": [{"resource": "bus", "members": [1, 2]}] }
//! ```
//! or `{"preset": "keystone"}`.
//!
//! Task graph:
//! ```json
//! { "tasks": [{"name": "src", "costs": {"RISC": 10}}, {"name": "dst", "costs": {"RISC": 4}}],
//!   "channels": [{"from": 1, "to": 2, "volume": 8}],
//!   "symmetries": [[1, 2]] }
//! ```
//! `symmetries` lists generators of the task symmetry group as image arrays.
//!
//! A mapping is an array of PE indices, entry `i` for task `i`.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::archgraph::{self, Bus, Link, TopologyGraph};
use crate::error::{Error, Result};
use crate::mapping::{Channel, Mapping, Task, TaskGraph, TaskSymmetry};
use crate::perm::Permutation;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NodeDto {
    pub index: usize,
    #[serde(rename = "type")]
    pub pe_type: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LinkDto {
    pub a: usize,
    pub b: usize,
    #[serde(default = "default_resource")]
    pub resource: String,
    #[serde(default = "one")]
    pub hops: u32,
}

fn default_resource() -> String {
    "noc".into()
}

fn one() -> u32 {
    1
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BusDto {
    pub resource: String,
    pub members: Vec<usize>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologyDto {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub nodes: Vec<NodeDto>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub links: Vec<LinkDto>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub buses: Vec<BusDto>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub allow_disconnected: bool,
}

fn zero_based(i: usize, what: &str) -> Result<usize> {
    i.checked_sub(1)
        .ok_or_else(|| Error::Format(format!("{what} indices are 1-based, got 0")))
}

impl TopologyDto {
    pub fn into_topology(self) -> Result<TopologyGraph> {
        if let Some(name) = &self.preset {
            if !self.nodes.is_empty() || !self.links.is_empty() || !self.buses.is_empty() {
                return Err(Error::Format("a preset topology cannot also list nodes".into()));
            }
            return archgraph::preset(name)
                .ok_or_else(|| Error::InvalidTopology(format!("unknown preset {name:?}")));
        }
        let n = self.nodes.len();
        let mut types = vec![None; n];
        for node in self.nodes {
            let i = zero_based(node.index, "PE")?;
            if i >= n || types[i].is_some() {
                return Err(Error::InvalidTopology(format!(
                    "PE indices must be exactly 1..={n}, found {}",
                    node.index
                )));
            }
            types[i] = Some(node.pe_type);
        }
        let node_types = types.into_iter().map(|t| t.expect("all indices seen")).collect();
        let links = self
            .links
            .into_iter()
            .map(|l| {
                Ok(Link {
                    a: zero_based(l.a, "PE")?,
                    b: zero_based(l.b, "PE")?,
                    resource: l.resource,
                    hops: l.hops,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let buses = self
            .buses
            .into_iter()
            .map(|b| {
                Ok(Bus {
                    resource: b.resource,
                    members: b.members.into_iter().map(|m| zero_based(m, "PE")).collect::<Result<_>>()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut t = TopologyGraph::new(node_types, links, buses);
        if self.allow_disconnected {
            if let Ok(t) = &mut t {
                t.allow_disconnected = true;
            }
        }
        t
    }

    pub fn from_topology(t: &TopologyGraph) -> Self {
        TopologyDto {
            preset: None,
            nodes: t
                .node_types
                .iter()
                .enumerate()
                .map(|(i, ty)| NodeDto {
                    index: i + 1,
                    pe_type: ty.clone(),
                })
                .collect(),
            links: t
                .links
                .iter()
                .map(|l| LinkDto {
                    a: l.a + 1,
                    b: l.b + 1,
                    resource: l.resource.clone(),
                    hops: l.hops,
                })
                .collect(),
            buses: t
                .buses
                .iter()
                .map(|b| BusDto {
                    resource: b.resource.clone(),
                    members: b.members.iter().map(|m| m + 1).collect(),
                })
                .collect(),
            allow_disconnected: t.allow_disconnected,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TaskDto {
    pub name: String,
    #[serde(default)]
    pub costs: BTreeMap<String, u64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChannelDto {
    pub from: usize,
    pub to: usize,
    pub volume: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskGraphDto {
    pub tasks: Vec<TaskDto>,
    #[serde(default)]
    pub channels: Vec<ChannelDto>,
    #[serde(default)]
    pub symmetries: Vec<Vec<usize>>,
}

impl TaskGraphDto {
    pub fn into_task_graph(self) -> Result<(TaskGraph, TaskSymmetry)> {
        let tasks = self
            .tasks
            .into_iter()
            .map(|t| Task {
                name: t.name,
                costs: t.costs,
            })
            .collect();
        let channels = self
            .channels
            .into_iter()
            .map(|c| {
                Ok(Channel {
                    from: zero_based(c.from, "task")?,
                    to: zero_based(c.to, "task")?,
                    volume: c.volume,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let tg = TaskGraph::new(tasks, channels)?;
        let gens = self
            .symmetries
            .iter()
            .map(|g| Permutation::from_one_based(g))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::InvalidTaskSymmetry(e.to_string()))?;
        let h = TaskSymmetry::new(&tg, gens)?;
        Ok((tg, h))
    }

    pub fn from_task_graph(tg: &TaskGraph, h: &TaskSymmetry) -> Self {
        TaskGraphDto {
            tasks: tg
                .tasks()
                .iter()
                .map(|t| TaskDto {
                    name: t.name.clone(),
                    costs: t.costs.clone(),
                })
                .collect(),
            channels: tg
                .channels()
                .iter()
                .map(|c| ChannelDto {
                    from: c.from + 1,
                    to: c.to + 1,
                    volume: c.volume,
                })
                .collect(),
            symmetries: h.group().generators().iter().map(|g| g.to_one_based()).collect(),
        }
    }
}

pub fn parse_topology(text: &str) -> Result<TopologyGraph> {
    serde_json::from_str::<TopologyDto>(text)?.into_topology()
}

pub fn parse_task_graph(text: &str) -> Result<(TaskGraph, TaskSymmetry)> {
    serde_json::from_str::<TaskGraphDto>(text)?.into_task_graph()
}

/// Parses a 1-based mapping array.
pub fn parse_mapping(text: &str) -> Result<Mapping> {
    let raw: Vec<u32> = serde_json::from_str(text)?;
    raw.into_iter()
        .map(|p| {
            p.checked_sub(1)
                .ok_or_else(|| Error::InvalidMapping("PE indices are 1-based, got 0".into()))
        })
        .collect()
}

pub fn mapping_to_json(m: &[u32]) -> String {
    serde_json::to_string(&m.iter().map(|p| p + 1).collect::<Vec<_>>()).expect("plain array")
}

pub fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}
