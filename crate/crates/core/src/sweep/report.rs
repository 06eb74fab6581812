use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{SweepError, SweepResult, SweepRow};

pub const SWEEP_HEADER: &str = "tech,size_mw,zone,node,cost_delta_gbp,emission_rate_kgco2_per_h,kappa,npv_gbp,npv_capex70_gbp,npv_capex30_gbp,error";

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Quotes a CSV field when it contains a separator or quote.
fn field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = format!("{SWEEP_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.tech,
            r.size_mw,
            field(&r.zone),
            field(r.node.as_str()),
            opt(r.cost_delta),
            opt(r.emission_rate),
            opt(r.kappa),
            opt(r.npv),
            opt(r.npv_capex_70),
            opt(r.npv_capex_30),
            field(r.error.as_deref().unwrap_or("")),
        );
    }
    out
}

/// First row (in sweep order) minimising `key`.
fn best_by<'a>(rows: impl Iterator<Item = &'a SweepRow>, key: impl Fn(&SweepRow) -> Option<f64>) -> Option<&'a SweepRow> {
    let mut best: Option<(&SweepRow, f64)> = None;
    for r in rows {
        if let Some(v) = key(r) {
            if best.is_none_or(|(_, b)| v < b) {
                best = Some((r, v));
            }
        }
    }
    best.map(|(r, _)| r)
}

fn by_zone_csv(rows: &[SweepRow]) -> String {
    let mut zones: BTreeMap<&str, Vec<&SweepRow>> = BTreeMap::new();
    for r in rows {
        zones.entry(r.zone.as_str()).or_default().push(r);
    }
    let mut out = String::from(
        "zone,best_cost_tech,best_cost_size_mw,best_cost_node,best_cost_delta_gbp,\
         best_emission_tech,best_emission_size_mw,best_emission_node,best_emission_rate_kgco2_per_h\n",
    );
    for (zone, rs) in zones {
        let cost = best_by(rs.iter().copied(), |r| r.cost_delta);
        let emis = best_by(rs.iter().copied(), |r| r.emission_rate);
        let cols = |r: Option<&SweepRow>, v: fn(&SweepRow) -> Option<f64>| match r {
            Some(r) => format!("{},{},{},{}", r.tech, r.size_mw, field(r.node.as_str()), opt(v(r))),
            None => ",,,".to_owned(),
        };
        let _ = writeln!(
            out,
            "{},{},{}",
            field(zone),
            cols(cost, |r| r.cost_delta),
            cols(emis, |r| r.emission_rate)
        );
    }
    out
}

#[derive(Debug, Serialize)]
struct TechSummary {
    rows: usize,
    failed_rows: usize,
    min_cost_delta_gbp: Option<f64>,
    max_cost_delta_gbp: Option<f64>,
    min_emission_rate_kgco2_per_h: Option<f64>,
    max_emission_rate_kgco2_per_h: Option<f64>,
    min_npv_gbp: Option<f64>,
    max_npv_gbp: Option<f64>,
    best_cost_zone: Option<String>,
    best_emission_zone: Option<String>,
}

#[derive(Debug, Serialize)]
struct Summary {
    base_cost_gbp: f64,
    horizon_hours: f64,
    dispatch_solves: usize,
    rows: usize,
    failed_rows: usize,
    technologies: BTreeMap<String, TechSummary>,
}

fn min_max(vals: impl Iterator<Item = f64> + Clone) -> (Option<f64>, Option<f64>) {
    (
        vals.clone().reduce(f64::min),
        vals.reduce(f64::max),
    )
}

fn summary(result: &SweepResult) -> Summary {
    let mut by_tech: BTreeMap<String, Vec<&SweepRow>> = BTreeMap::new();
    for r in &result.rows {
        by_tech.entry(r.tech.to_string()).or_default().push(r);
    }
    let technologies = by_tech
        .into_iter()
        .map(|(tech, rs)| {
            let (min_cost, max_cost) = min_max(rs.iter().filter_map(|r| r.cost_delta));
            let (min_em, max_em) = min_max(rs.iter().filter_map(|r| r.emission_rate));
            let (min_npv, max_npv) = min_max(rs.iter().filter_map(|r| r.npv));
            let s = TechSummary {
                rows: rs.len(),
                failed_rows: rs.iter().filter(|r| r.error.is_some()).count(),
                min_cost_delta_gbp: min_cost,
                max_cost_delta_gbp: max_cost,
                min_emission_rate_kgco2_per_h: min_em,
                max_emission_rate_kgco2_per_h: max_em,
                min_npv_gbp: min_npv,
                max_npv_gbp: max_npv,
                best_cost_zone: best_by(rs.iter().copied(), |r| r.cost_delta).map(|r| r.zone.clone()),
                best_emission_zone: best_by(rs.iter().copied(), |r| r.emission_rate).map(|r| r.zone.clone()),
            };
            (tech, s)
        })
        .collect();
    Summary {
        base_cost_gbp: result.base_cost,
        horizon_hours: result.horizon_hours,
        dispatch_solves: result.dispatch_solves,
        rows: result.rows.len(),
        failed_rows: result.rows.iter().filter(|r| r.error.is_some()).count(),
        technologies,
    }
}

/// Per-row valuation record.
#[derive(Debug, Serialize)]
pub struct ValuationReport {
    pub tech: String,
    pub size_mw: f64,
    pub node: String,
    pub zone: String,
    pub kappa: f64,
    pub nbb_per_year: f64,
    pub cmr: f64,
    pub dcr: f64,
    pub npv: f64,
    pub sensitivity: Vec<SensitivityPoint>,
}

#[derive(Debug, Serialize)]
pub struct SensitivityPoint {
    pub factor: f64,
    pub npv: f64,
}

fn valuations(rows: &[SweepRow]) -> Vec<ValuationReport> {
    rows.iter()
        .filter(|r| r.error.is_none())
        .filter_map(|r| {
            Some(ValuationReport {
                tech: r.tech.to_string(),
                size_mw: r.size_mw,
                node: r.node.to_string(),
                zone: r.zone.clone(),
                kappa: r.kappa?,
                nbb_per_year: r.nbb_per_year?,
                cmr: r.cmr?,
                dcr: r.dcr?,
                npv: r.npv?,
                sensitivity: vec![
                    SensitivityPoint { factor: 1.0, npv: r.npv? },
                    SensitivityPoint { factor: 0.7, npv: r.npv_capex_70? },
                    SensitivityPoint { factor: 0.3, npv: r.npv_capex_30? },
                ],
            })
        })
        .collect()
}

fn pretty<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report types serialise") + "\n"
}

fn write(path: PathBuf, contents: String) -> Result<PathBuf, SweepError> {
    fs::write(&path, contents).map_err(|source| SweepError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

/// Writes `sweep.csv`, `by_zone.csv`, `summary.json` and `valuation.json`.
pub fn emit_reports(result: &SweepResult, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>, SweepError> {
    if result.rows.is_empty() {
        return Err(SweepError::EmptyResult);
    }
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|source| SweepError::Io {
        path: dir.to_owned(),
        source,
    })?;
    Ok(vec![
        write(dir.join("sweep.csv"), sweep_csv(&result.rows))?,
        write(dir.join("by_zone.csv"), by_zone_csv(&result.rows))?,
        write(dir.join("summary.json"), pretty(&summary(result)))?,
        write(dir.join("valuation.json"), pretty(&valuations(&result.rows)))?,
    ])
}
