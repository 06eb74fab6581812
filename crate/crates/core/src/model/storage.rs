use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{ModelError, NodeId};

/// Storage technology.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Tech {
    #[serde(rename = "LIB")]
    Lib,
    #[serde(rename = "VRFB")]
    Vrfb,
    #[serde(rename = "PSH")]
    Psh,
    #[serde(rename = "HES")]
    Hes,
}

impl Tech {
    pub const ALL: [Tech; 4] = [Tech::Lib, Tech::Vrfb, Tech::Psh, Tech::Hes];

    pub fn as_str(self) -> &'static str {
        match self {
            Tech::Lib => "LIB",
            Tech::Vrfb => "VRFB",
            Tech::Psh => "PSH",
            Tech::Hes => "HES",
        }
    }

    /// Round-trip efficiency.
    pub fn round_trip(self) -> f64 {
        match self {
            Tech::Lib => 0.85,
            Tech::Vrfb => 0.64,
            Tech::Psh => 0.79,
            Tech::Hes => 0.30,
        }
    }

    /// Throughput degradation cost, £/MWh, charged on both legs.
    pub fn degradation_tariff(self) -> f64 {
        match self {
            Tech::Lib => 13.17,
            Tech::Vrfb => 0.78,
            Tech::Psh => 0.00,
            Tech::Hes => 0.23,
        }
    }
}

impl fmt::Display for Tech {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Tech {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Tech::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| ModelError::UnknownTech(s.to_owned()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StorageAsset {
    pub id: String,
    pub technology: Tech,
    pub node: NodeId,
    /// MW
    pub rated_power: f64,
    /// hours
    pub duration: f64,
    /// MWh, always `rated_power * duration`.
    pub energy_capacity: f64,
    pub eta_charge: f64,
    pub eta_discharge: f64,
    /// £/MWh of throughput.
    pub degradation_tariff: f64,
    /// MWh
    pub soc_initial: f64,
}

/// Optional per-asset replacements for the technology defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StorageOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_charge: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_discharge: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degradation_tariff: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub soc_initial: Option<f64>,
}

/// Builds an asset with technology defaults: the round-trip efficiency split
/// evenly between legs, the technology's degradation tariff and a half-full
/// initial state of charge.
pub fn make_storage(
    tech: Tech,
    node: NodeId,
    rated_power: f64,
    duration: f64,
) -> Result<StorageAsset, ModelError> {
    let id = format!("{tech}@{node}");
    if !(rated_power > 0.0 && rated_power.is_finite()) {
        return Err(ModelError::invariant(format!("storage {id}"), "rated power must be positive"));
    }
    if !(duration > 0.0 && duration.is_finite()) {
        return Err(ModelError::invariant(format!("storage {id}"), "duration must be positive"));
    }
    let eta = tech.round_trip().sqrt();
    let energy_capacity = rated_power * duration;
    Ok(StorageAsset {
        id,
        technology: tech,
        node,
        rated_power,
        duration,
        energy_capacity,
        eta_charge: eta,
        eta_discharge: eta,
        degradation_tariff: tech.degradation_tariff(),
        soc_initial: 0.5 * energy_capacity,
    })
}

impl StorageAsset {
    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    /// Applies overrides; the result still has to pass [`StorageAsset::validate`].
    pub fn with_overrides(mut self, o: &StorageOverrides) -> Self {
        if let Some(v) = o.eta_charge {
            self.eta_charge = v;
        }
        if let Some(v) = o.eta_discharge {
            self.eta_discharge = v;
        }
        if let Some(v) = o.degradation_tariff {
            self.degradation_tariff = v;
        }
        if let Some(v) = o.soc_initial {
            self.soc_initial = v;
        }
        self
    }

    pub fn round_trip(&self) -> f64 {
        self.eta_charge * self.eta_discharge
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let fail = |msg: String| Err(ModelError::invariant(format!("storage {}", self.id), msg));
        if !(self.rated_power > 0.0 && self.duration > 0.0) {
            return fail("rated power and duration must be positive".into());
        }
        if (self.energy_capacity - self.rated_power * self.duration).abs() > 1e-9 * self.energy_capacity.max(1.0) {
            return fail("energy capacity must equal rated power x duration".into());
        }
        for (name, eta) in [("eta_charge", self.eta_charge), ("eta_discharge", self.eta_discharge)] {
            if !(eta > 0.0 && eta <= 1.0) {
                return fail(format!("{name} {eta} outside (0, 1]"));
            }
        }
        if (self.round_trip() - self.technology.round_trip()).abs() > 1e-9 {
            return fail(format!(
                "eta_charge x eta_discharge = {} does not match the {} round-trip efficiency {}",
                self.round_trip(),
                self.technology,
                self.technology.round_trip()
            ));
        }
        if !(self.degradation_tariff >= 0.0 && self.degradation_tariff.is_finite()) {
            return fail("degradation tariff must be nonnegative".into());
        }
        if !(self.soc_initial >= 0.0 && self.soc_initial <= self.energy_capacity) {
            return fail(format!(
                "initial state of charge {} MWh outside [0, {}] MWh",
                self.soc_initial, self.energy_capacity
            ));
        }
        Ok(())
    }
}
