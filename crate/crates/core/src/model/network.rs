use std::collections::BTreeSet;

use super::{ModelError, NodeId};

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: NodeId,
    /// Zone label used for locational reporting (GSP-group analogue).
    pub zone: String,
}

impl Node {
    pub fn new(id: impl Into<String>, zone: impl Into<String>) -> Self {
        Node {
            id: NodeId(id.into()),
            zone: zone.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Line {
    pub from: NodeId,
    pub to: NodeId,
    pub susceptance_pu: f64,
    pub capacity_mw: f64,
}

impl Line {
    pub fn new(from: &str, to: &str, susceptance_pu: f64, capacity_mw: f64) -> Self {
        Line {
            from: from.into(),
            to: to.into(),
            susceptance_pu,
            capacity_mw,
        }
    }

    pub fn label(&self, index: usize) -> String {
        format!("L{index}:{}-{}", self.from, self.to)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    pub nodes: Vec<Node>,
    pub lines: Vec<Line>,
    pub reference_node: NodeId,
}

impl Network {
    /// Builds a network whose reference (slack-angle) node is the first node.
    pub fn new(nodes: Vec<Node>, lines: Vec<Line>) -> Result<Self, ModelError> {
        let reference_node = nodes
            .first()
            .map(|n| n.id.clone())
            .ok_or_else(|| ModelError::invariant("network", "no nodes"))?;
        let net = Network {
            nodes,
            lines,
            reference_node,
        };
        net.validate()?;
        Ok(net)
    }

    pub fn node_index(&self, id: &NodeId) -> Option<usize> {
        self.nodes.iter().position(|n| &n.id == id)
    }

    pub fn zone_of(&self, id: &NodeId) -> Option<&str> {
        self.nodes.iter().find(|n| &n.id == id).map(|n| n.zone.as_str())
    }

    pub fn reference_index(&self) -> usize {
        self.node_index(&self.reference_node).expect("validated network")
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.nodes.is_empty() {
            return Err(ModelError::invariant("network", "no nodes"));
        }
        let mut ids = BTreeSet::new();
        for n in &self.nodes {
            if !ids.insert(&n.id) {
                return Err(ModelError::invariant(format!("node {}", n.id), "duplicate id"));
            }
        }
        if self.node_index(&self.reference_node).is_none() {
            return Err(ModelError::invariant(
                "network",
                format!("reference node {} does not exist", self.reference_node),
            ));
        }
        for (i, l) in self.lines.iter().enumerate() {
            let name = format!("line {}", l.label(i));
            if l.from == l.to {
                return Err(ModelError::invariant(name, "self-loop"));
            }
            if self.node_index(&l.from).is_none() || self.node_index(&l.to).is_none() {
                return Err(ModelError::invariant(name, "endpoint is not a declared node"));
            }
            if !(l.susceptance_pu > 0.0 && l.susceptance_pu.is_finite()) {
                return Err(ModelError::invariant(name, "susceptance must be positive"));
            }
            if !(l.capacity_mw > 0.0 && l.capacity_mw.is_finite()) {
                return Err(ModelError::invariant(name, "capacity must be positive"));
            }
        }
        if !self.is_connected() {
            return Err(ModelError::invariant("network", "graph is not connected"));
        }
        Ok(())
    }

    fn is_connected(&self) -> bool {
        let n = self.nodes.len();
        let mut adj = vec![Vec::new(); n];
        for l in &self.lines {
            if let (Some(a), Some(b)) = (self.node_index(&l.from), self.node_index(&l.to)) {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}
