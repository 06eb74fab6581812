//! Networks, balancing units, storage assets and scenarios.
//!
//! Everything here is immutable once validated; the dispatch and sweep layers
//! share these values freely across worker threads.

mod io;
mod network;
mod storage;
mod unit;

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use io::{load_scenario, save_scenario, ScenarioPaths};
pub use network::{Line, Network, Node};
pub use storage::{make_storage, StorageAsset, StorageOverrides, Tech};
pub use unit::{Band, BmUnit, FuelType};

/// Length of one settlement period in hours.
pub const PERIOD_HOURS: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub String);

impl NodeId {
    pub fn new(s: impl Into<String>) -> Self {
        NodeId(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId(s.to_owned())
    }
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}: row {row}, column `{column}`: {message}")]
    Schema {
        file: String,
        row: usize,
        column: String,
        message: String,
    },
    #[error("{entity}: {message}")]
    Invariant { entity: String, message: String },
    #[error("unknown technology `{0}`")]
    UnknownTech(String),
    #[error("unknown fuel type `{0}`")]
    UnknownFuel(String),
}

impl ModelError {
    pub(crate) fn invariant(entity: impl Into<String>, message: impl Into<String>) -> Self {
        ModelError::Invariant {
            entity: entity.into(),
            message: message.into(),
        }
    }
}

/// Signed imbalance per node and period; positive means a shortfall that needs
/// upward action.
#[derive(Debug, Clone, PartialEq)]
pub struct Imbalance {
    /// `mw[node_index][period]`, node order as in the network.
    pub mw: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub network: Network,
    pub units: Vec<BmUnit>,
    pub storage: Vec<StorageAsset>,
    pub imbalance: Imbalance,
    pub horizon: usize,
    pub period_hours: f64,
}

impl Scenario {
    /// Validates every cross-entity invariant. Entity-local invariants are
    /// checked by each type's own `validate`.
    pub fn new(
        network: Network,
        units: Vec<BmUnit>,
        storage: Vec<StorageAsset>,
        imbalance: Imbalance,
    ) -> Result<Self, ModelError> {
        network.validate()?;
        let horizon = imbalance.mw.first().map_or(0, Vec::len);
        if horizon == 0 {
            return Err(ModelError::invariant("scenario", "horizon must be at least one period"));
        }
        if imbalance.mw.len() != network.nodes.len() {
            return Err(ModelError::invariant(
                "imbalance",
                format!(
                    "defined for {} nodes, network has {}",
                    imbalance.mw.len(),
                    network.nodes.len()
                ),
            ));
        }
        for (node, series) in network.nodes.iter().zip(&imbalance.mw) {
            if series.len() != horizon {
                return Err(ModelError::invariant(
                    format!("imbalance at node {}", node.id),
                    format!("has {} periods, expected {horizon}", series.len()),
                ));
            }
            if series.iter().any(|v| !v.is_finite()) {
                return Err(ModelError::invariant(
                    format!("imbalance at node {}", node.id),
                    "non-finite value",
                ));
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for u in &units {
            u.validate(horizon)?;
            if network.node_index(&u.node).is_none() {
                return Err(ModelError::invariant(
                    format!("unit {}", u.id),
                    format!("node {} is not in the network", u.node),
                ));
            }
            if !seen.insert(u.id.clone()) {
                return Err(ModelError::invariant(format!("unit {}", u.id), "duplicate id"));
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for s in &storage {
            s.validate()?;
            if network.node_index(&s.node).is_none() {
                return Err(ModelError::invariant(
                    format!("storage {}", s.id),
                    format!("node {} is not in the network", s.node),
                ));
            }
            if !seen.insert(s.id.clone()) {
                return Err(ModelError::invariant(format!("storage {}", s.id), "duplicate id"));
            }
        }
        Ok(Scenario {
            network,
            units,
            storage,
            imbalance,
            horizon,
            period_hours: PERIOD_HOURS,
        })
    }

    /// Same scenario with a different storage fleet.
    pub fn with_storage(&self, storage: Vec<StorageAsset>) -> Result<Self, ModelError> {
        Scenario::new(
            self.network.clone(),
            self.units.clone(),
            storage,
            self.imbalance.clone(),
        )
    }

    pub fn horizon_hours(&self) -> f64 {
        self.horizon as f64 * self.period_hours
    }
}
