use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::SweepError;
use crate::model::{Network, NodeId, Tech};
use crate::valuation::{DEFAULT_CM_DERATING, DEFAULT_DC_HOURS, PLACEHOLDER_CM_PRICE, PLACEHOLDER_DC_PRICE};

fn default_sizes() -> Vec<f64> {
    vec![1.0, 100.0]
}
fn default_duration() -> f64 {
    2.0
}
fn default_out() -> PathBuf {
    PathBuf::from("out")
}
fn default_parallelism() -> usize {
    1
}

/// Revenue-stacking inputs shared by every sweep row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ValuationConfig {
    pub cm_price_gbp_per_mw_year: f64,
    pub cm_derating: f64,
    pub dc_price_gbp_per_mw_h: f64,
    pub dc_hours_per_year: f64,
    /// Scales one scenario's cost saving to a year. 12 treats the scenario as
    /// one representative month.
    pub nbb_multiplier: f64,
}

impl Default for ValuationConfig {
    fn default() -> Self {
        ValuationConfig {
            cm_price_gbp_per_mw_year: PLACEHOLDER_CM_PRICE,
            cm_derating: DEFAULT_CM_DERATING,
            dc_price_gbp_per_mw_h: PLACEHOLDER_DC_PRICE,
            dc_hours_per_year: DEFAULT_DC_HOURS,
            nbb_multiplier: 12.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Scenario directory; relative paths resolve against the config file.
    pub scenario: PathBuf,
    pub technologies: Vec<Tech>,
    #[serde(default = "default_sizes")]
    pub sizes_mw: Vec<f64>,
    #[serde(default = "default_duration")]
    pub duration_h: f64,
    /// Candidate nodes. Combined with every node of the listed zones.
    #[serde(default)]
    pub nodes: Vec<String>,
    #[serde(default)]
    pub zones: Vec<String>,
    #[serde(default)]
    pub valuation: ValuationConfig,
    #[serde(default = "default_out")]
    pub output_dir: PathBuf,
    #[serde(default = "default_parallelism")]
    pub parallelism: usize,
}

impl SweepConfig {
    /// Reads a JSON config and resolves its relative paths.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, SweepError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| SweepError::Io {
            path: path.to_owned(),
            source,
        })?;
        let mut cfg: SweepConfig =
            serde_json::from_str(&text).map_err(|e| SweepError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        if cfg.scenario.is_relative() {
            cfg.scenario = base.join(&cfg.scenario);
        }
        if cfg.output_dir.is_relative() {
            cfg.output_dir = base.join(&cfg.output_dir);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        let fail = |m: &str| Err(SweepError::Config(m.to_owned()));
        if self.technologies.is_empty() {
            return fail("technology list is empty");
        }
        if self.sizes_mw.is_empty() || self.sizes_mw.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
            return fail("sizes must be a nonempty list of positive values");
        }
        if !(self.duration_h > 0.0 && self.duration_h.is_finite()) {
            return fail("duration must be positive");
        }
        if self.nodes.is_empty() && self.zones.is_empty() {
            return fail("location list is empty: give candidate nodes or zones");
        }
        if self.parallelism == 0 {
            return fail("parallelism must be at least 1");
        }
        let v = &self.valuation;
        if !(0.0..=1.0).contains(&v.cm_derating) {
            return fail("cm_derating must lie in [0, 1]");
        }
        if [v.cm_price_gbp_per_mw_year, v.dc_price_gbp_per_mw_h, v.dc_hours_per_year, v.nbb_multiplier]
            .iter()
            .any(|x| !(*x >= 0.0 && x.is_finite()))
        {
            return fail("valuation prices, hours and multiplier must be nonnegative");
        }
        Ok(())
    }

    /// Candidate nodes present in `network`, in network order.
    pub fn candidates(&self, network: &Network) -> Result<Vec<NodeId>, SweepError> {
        let nodes: BTreeSet<&str> = self.nodes.iter().map(String::as_str).collect();
        let zones: BTreeSet<&str> = self.zones.iter().map(String::as_str).collect();
        let picked: Vec<NodeId> = network
            .nodes
            .iter()
            .filter(|n| nodes.contains(n.id.as_str()) || zones.contains(n.zone.as_str()))
            .map(|n| n.id.clone())
            .collect();
        if picked.is_empty() {
            return Err(SweepError::NoCandidates);
        }
        Ok(picked)
    }
}
