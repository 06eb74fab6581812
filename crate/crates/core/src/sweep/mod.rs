//! Base-versus-storage sweeps across technologies, sizes and locations.

mod config;
mod report;

use std::cmp::Ordering;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};

use log::{debug, info, warn};
use rayon::prelude::*;
use thiserror::Error;

use crate::carbon::{default_intensities, emission_delta};
use crate::dispatch::{bm_cost, k_fraction, solve_dispatch, DispatchError, DispatchSolution};
use crate::model::{load_scenario, make_storage, ModelError, NodeId, Scenario, ScenarioPaths, Tech};
use crate::valuation::{
    annualize_nbb, capex_sensitivity, table2_defaults, RevenueInputs, DEFAULT_CAPEX_FACTORS,
};

pub use config::{SweepConfig, ValuationConfig};
pub use report::{emit_reports, ValuationReport};

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid sweep config: {0}")]
    Config(String),
    #[error("no candidate location matches a network node")]
    NoCandidates,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("base case: {0}")]
    BaseDispatch(#[source] DispatchError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("sweep result is empty")]
    EmptyResult,
}

/// One (technology, size, location) case.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub tech: Tech,
    pub size_mw: f64,
    pub zone: String,
    pub node: NodeId,
    /// £ over the scenario horizon; never positive.
    pub cost_delta: Option<f64>,
    /// kgCO₂/h
    pub emission_rate: Option<f64>,
    pub kappa: Option<f64>,
    pub nbb_per_year: Option<f64>,
    pub cmr: Option<f64>,
    pub dcr: Option<f64>,
    pub npv: Option<f64>,
    pub npv_capex_70: Option<f64>,
    pub npv_capex_30: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub base_cost: f64,
    pub horizon_hours: f64,
    /// Dispatch problems solved, base case included.
    pub dispatch_solves: usize,
}

fn row_order(a: &SweepRow, b: &SweepRow) -> Ordering {
    a.tech
        .as_str()
        .cmp(b.tech.as_str())
        .then(a.size_mw.total_cmp(&b.size_mw))
        .then_with(|| a.zone.cmp(&b.zone))
        .then_with(|| a.node.cmp(&b.node))
}

struct Job {
    tech: Tech,
    size_mw: f64,
    node: NodeId,
    zone: String,
}

fn evaluate(
    job: &Job,
    scenario: &Scenario,
    base: &DispatchSolution,
    cfg: &SweepConfig,
    solves: &AtomicUsize,
) -> SweepRow {
    let mut row = SweepRow {
        tech: job.tech,
        size_mw: job.size_mw,
        zone: job.zone.clone(),
        node: job.node.clone(),
        cost_delta: None,
        emission_rate: None,
        kappa: None,
        nbb_per_year: None,
        cmr: None,
        dcr: None,
        npv: None,
        npv_capex_70: None,
        npv_capex_30: None,
        error: None,
    };
    let outcome = (|| -> Result<(), String> {
        let asset = make_storage(job.tech, job.node.clone(), job.size_mw, cfg.duration_h)
            .map_err(|e| e.to_string())?
            .with_id(format!("candidate-{}-{}MW@{}", job.tech, job.size_mw, job.node));
        let mut fleet = scenario.storage.clone();
        fleet.push(asset.clone());
        let case = scenario.with_storage(fleet).map_err(|e| e.to_string())?;
        solves.fetch_add(1, AtomicOrdering::Relaxed);
        let sol = solve_dispatch(&case).map_err(|e| e.to_string())?;
        let cost_delta = bm_cost(&sol) - bm_cost(base);
        let emissions = emission_delta(base, &sol, &default_intensities(), scenario.horizon_hours())
            .map_err(|e| e.to_string())?;
        let kappa = k_fraction(&sol, &asset);

        let v = &cfg.valuation;
        let rev = RevenueInputs {
            nbb_per_year: annualize_nbb(&[cost_delta], v.nbb_multiplier),
            kappa,
            cm_price: v.cm_price_gbp_per_mw_year,
            cm_derating: v.cm_derating,
            dc_price: v.dc_price_gbp_per_mw_h,
            dc_hours_per_year: v.dc_hours_per_year,
            rated_power: job.size_mw,
        };
        let econ = table2_defaults(job.tech, job.size_mw);
        let sens = capex_sensitivity(&rev, &econ, &DEFAULT_CAPEX_FACTORS);

        row.cost_delta = Some(cost_delta);
        row.emission_rate = Some(emissions.rate);
        row.kappa = Some(kappa);
        row.nbb_per_year = Some(rev.nbb_per_year);
        row.cmr = Some(rev.cmr());
        row.dcr = Some(rev.dcr());
        row.npv = Some(sens[0].1.npv);
        row.npv_capex_70 = Some(sens[1].1.npv);
        row.npv_capex_30 = Some(sens[2].1.npv);
        Ok(())
    })();
    if let Err(e) = outcome {
        warn!("{} {} MW at {}: {e}", job.tech, job.size_mw, job.node);
        row.error = Some(e);
    } else {
        debug!(
            "{} {} MW at {}: cost delta {:?}",
            job.tech, job.size_mw, job.node, row.cost_delta
        );
    }
    row
}

/// Solves the base case once, then every (technology, size, location) case.
///
/// A failing case is recorded in its row's `error` and never aborts the sweep.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult, SweepError> {
    cfg.validate()?;
    let scenario = load_scenario(&ScenarioPaths::from_dir(&cfg.scenario))?;
    let candidates = cfg.candidates(&scenario.network)?;

    let solves = AtomicUsize::new(1);
    let base = solve_dispatch(&scenario).map_err(SweepError::BaseDispatch)?;
    let base_cost = bm_cost(&base);
    info!(
        "base case: {} periods, cost {base_cost:.2}, {} candidate nodes",
        scenario.horizon,
        candidates.len()
    );

    let mut jobs = Vec::new();
    for &tech in &cfg.technologies {
        for &size_mw in &cfg.sizes_mw {
            for node in &candidates {
                jobs.push(Job {
                    tech,
                    size_mw,
                    node: node.clone(),
                    zone: scenario.network.zone_of(node).unwrap_or_default().to_owned(),
                });
            }
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.parallelism)
        .build()
        .map_err(|e| SweepError::Config(format!("worker pool: {e}")))?;
    let mut rows: Vec<SweepRow> = pool.install(|| {
        jobs.par_iter()
            .map(|job| evaluate(job, &scenario, &base, cfg, &solves))
            .collect()
    });
    rows.sort_by(row_order);

    Ok(SweepResult {
        rows,
        base_cost,
        horizon_hours: scenario.horizon_hours(),
        dispatch_solves: solves.load(AtomicOrdering::Relaxed),
    })
}
