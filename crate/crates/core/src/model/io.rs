//! CSV/JSON scenario files.
//!
//! A scenario directory holds `network.csv`, `units.csv`, `fpn.csv`,
//! `ladders.csv`, `imbalance.csv` and optionally `storage.json`. Periods are
//! zero-based settlement-period indices.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use csv::{ReaderBuilder, StringRecord, Trim};
use serde::{Deserialize, Serialize};

use super::{
    make_storage, Band, BmUnit, FuelType, Imbalance, Line, ModelError, Network, Node, NodeId,
    Scenario, StorageAsset, StorageOverrides, Tech,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioPaths {
    pub network: PathBuf,
    pub units: PathBuf,
    pub fpn: PathBuf,
    pub ladders: PathBuf,
    pub imbalance: PathBuf,
    /// Absent means an empty storage fleet.
    pub storage: Option<PathBuf>,
}

impl ScenarioPaths {
    /// Standard file names inside `dir`; `storage.json` is used if present.
    pub fn from_dir(dir: impl AsRef<Path>) -> Self {
        let dir = dir.as_ref();
        let storage = dir.join("storage.json");
        ScenarioPaths {
            network: dir.join("network.csv"),
            units: dir.join("units.csv"),
            fpn: dir.join("fpn.csv"),
            ladders: dir.join("ladders.csv"),
            imbalance: dir.join("imbalance.csv"),
            storage: storage.exists().then_some(storage),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StorageRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    id: Option<String>,
    technology: String,
    node: String,
    rated_power_mw: f64,
    duration_h: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    overrides: Option<StorageOverrides>,
}

fn read(path: &Path) -> Result<String, ModelError> {
    fs::read_to_string(path).map_err(|source| ModelError::Io {
        path: path.to_owned(),
        source,
    })
}

fn file_label(path: &Path) -> String {
    path.file_name()
        .map(|f| f.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

struct Table<'a> {
    file: &'a str,
    headers: &'static [&'static str],
    rows: Vec<(usize, StringRecord)>,
}

impl Table<'_> {
    fn schema(&self, row: usize, column: &str, message: impl Into<String>) -> ModelError {
        ModelError::Schema {
            file: self.file.to_owned(),
            row,
            column: column.to_owned(),
            message: message.into(),
        }
    }

    fn text<'r>(&self, row: usize, rec: &'r StringRecord, col: usize) -> Result<&'r str, ModelError> {
        match rec.get(col) {
            Some(s) if !s.is_empty() => Ok(s),
            _ => Err(self.schema(row, self.headers[col], "missing value")),
        }
    }

    fn num(&self, row: usize, rec: &StringRecord, col: usize) -> Result<f64, ModelError> {
        let s = self.text(row, rec, col)?;
        match s.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(self.schema(row, self.headers[col], format!("`{s}` is not a finite number"))),
        }
    }

    fn index(&self, row: usize, rec: &StringRecord, col: usize) -> Result<usize, ModelError> {
        let s = self.text(row, rec, col)?;
        s.parse::<usize>()
            .map_err(|_| self.schema(row, self.headers[col], format!("`{s}` is not a nonnegative integer")))
    }
}

/// Parses one CSV section. `first_line` is the file line of the header.
fn parse_table<'a>(
    file: &'a str,
    text: &str,
    first_line: usize,
    headers: &'static [&'static str],
) -> Result<Table<'a>, ModelError> {
    let mut rdr = ReaderBuilder::new()
        .trim(Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let header_err = |message: String| ModelError::Schema {
        file: file.to_owned(),
        row: first_line,
        column: headers.join(","),
        message,
    };
    let found = rdr.headers().map_err(|e| header_err(e.to_string()))?.clone();
    if found.iter().ne(headers.iter().copied()) {
        return Err(header_err(format!(
            "expected header `{}`, found `{}`",
            headers.join(","),
            found.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| header_err(e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line() as usize) + first_line - 1;
        if rec.len() != headers.len() {
            return Err(ModelError::Schema {
                file: file.to_owned(),
                row: line,
                column: headers.join(","),
                message: format!("expected {} fields, found {}", headers.len(), rec.len()),
            });
        }
        rows.push((line, rec));
    }
    Ok(Table { file, headers, rows })
}

const NODE_HEADERS: &[&str] = &["node", "zone"];
const LINE_HEADERS: &[&str] = &["from", "to", "susceptance_pu", "capacity_mw"];
const UNIT_HEADERS: &[&str] = &["id", "node", "fuel", "p_min", "p_max"];
const FPN_HEADERS: &[&str] = &["unit", "period", "mw"];
const LADDER_HEADERS: &[&str] = &["unit", "side", "rank", "price_gbp_per_mwh", "volume_mw"];
const IMBALANCE_HEADERS: &[&str] = &["node", "period", "mw"];

fn parse_network(path: &Path) -> Result<Network, ModelError> {
    let file = file_label(path);
    let text = read(path)?;
    let lines: Vec<&str> = text.lines().collect();
    let start = lines.iter().position(|l| !l.trim().is_empty()).unwrap_or(0);
    let split = lines[start..]
        .iter()
        .position(|l| l.trim().is_empty())
        .map(|p| p + start)
        .ok_or_else(|| ModelError::Schema {
            file: file.clone(),
            row: lines.len(),
            column: LINE_HEADERS.join(","),
            message: "missing blank line before the line section".into(),
        })?;
    let line_start = lines[split..]
        .iter()
        .position(|l| !l.trim().is_empty())
        .map_or(lines.len(), |p| p + split);

    let nodes_tab = parse_table(&file, &lines[start..split].join("\n"), start + 1, NODE_HEADERS)?;
    let mut nodes = Vec::new();
    for (row, rec) in &nodes_tab.rows {
        nodes.push(Node::new(nodes_tab.text(*row, rec, 0)?, nodes_tab.text(*row, rec, 1)?));
    }
    let lines_tab = if line_start < lines.len() {
        parse_table(&file, &lines[line_start..].join("\n"), line_start + 1, LINE_HEADERS)?
    } else {
        return Err(ModelError::Schema {
            file,
            row: lines.len(),
            column: LINE_HEADERS.join(","),
            message: "missing line section".into(),
        });
    };
    let mut net_lines = Vec::new();
    for (row, rec) in &lines_tab.rows {
        net_lines.push(Line {
            from: lines_tab.text(*row, rec, 0)?.into(),
            to: lines_tab.text(*row, rec, 1)?.into(),
            susceptance_pu: lines_tab.num(*row, rec, 2)?,
            capacity_mw: lines_tab.num(*row, rec, 3)?,
        });
    }
    Network::new(nodes, net_lines)
}

/// `entity -> period -> (csv row, value)`.
type Series = BTreeMap<String, BTreeMap<usize, (usize, f64)>>;

/// Reads a `<entity>,period,mw` series file into `entity -> values by period`.
fn parse_series(
    path: &Path,
    headers: &'static [&'static str],
) -> Result<Series, ModelError> {
    let file = file_label(path);
    let text = read(path)?;
    let tab = parse_table(&file, &text, 1, headers)?;
    let mut out: BTreeMap<String, BTreeMap<usize, (usize, f64)>> = BTreeMap::new();
    for (row, rec) in &tab.rows {
        let key = tab.text(*row, rec, 0)?.to_owned();
        let period = tab.index(*row, rec, 1)?;
        let mw = tab.num(*row, rec, 2)?;
        if out.entry(key).or_default().insert(period, (*row, mw)).is_some() {
            return Err(tab.schema(*row, headers[1], format!("duplicate period {period}")));
        }
    }
    Ok(out)
}

fn dense_series(
    entity: String,
    series: Option<&BTreeMap<usize, (usize, f64)>>,
    horizon: usize,
) -> Result<Vec<f64>, ModelError> {
    let series = series.ok_or_else(|| ModelError::invariant(entity.clone(), "no values supplied"))?;
    if let Some((&p, _)) = series.range(horizon..).next() {
        return Err(ModelError::invariant(
            entity,
            format!("period {p} beyond the horizon of {horizon}"),
        ));
    }
    (0..horizon)
        .map(|t| {
            series
                .get(&t)
                .map(|&(_, v)| v)
                .ok_or_else(|| ModelError::invariant(entity.clone(), format!("missing period {t}")))
        })
        .collect()
}

fn parse_storage(path: &Path) -> Result<Vec<StorageAsset>, ModelError> {
    let file = file_label(path);
    let text = read(path)?;
    let records: Vec<StorageRecord> = serde_json::from_str(&text).map_err(|e| ModelError::Schema {
        file: file.clone(),
        row: e.line(),
        column: "storage".into(),
        message: e.to_string(),
    })?;
    records
        .into_iter()
        .map(|r| {
            let tech: Tech = r.technology.parse()?;
            let mut asset = make_storage(tech, NodeId(r.node), r.rated_power_mw, r.duration_h)?;
            if let Some(id) = r.id {
                asset = asset.with_id(id);
            }
            if let Some(o) = &r.overrides {
                asset = asset.with_overrides(o);
            }
            asset.validate()?;
            Ok(asset)
        })
        .collect()
}

/// Reads and validates a scenario from its file set.
pub fn load_scenario(paths: &ScenarioPaths) -> Result<Scenario, ModelError> {
    let network = parse_network(&paths.network)?;

    let imbalance_raw = parse_series(&paths.imbalance, IMBALANCE_HEADERS)?;
    let horizon = imbalance_raw
        .values()
        .filter_map(|s| s.keys().next_back())
        .max()
        .map_or(0, |&p| p + 1);
    let imb_file = file_label(&paths.imbalance);
    for (node, series) in &imbalance_raw {
        if network.node_index(&NodeId(node.clone())).is_none() {
            let row = series.values().next().map_or(0, |&(r, _)| r);
            return Err(ModelError::Schema {
                file: imb_file,
                row,
                column: "node".into(),
                message: format!("unknown node `{node}`"),
            });
        }
    }
    let mw = network
        .nodes
        .iter()
        .map(|n| {
            dense_series(
                format!("imbalance at node {}", n.id),
                imbalance_raw.get(n.id.as_str()),
                horizon,
            )
        })
        .collect::<Result<Vec<_>, _>>()?;

    let units_file = file_label(&paths.units);
    let units_tab = parse_table(&units_file, &read(&paths.units)?, 1, UNIT_HEADERS)?;
    let mut units = Vec::new();
    for (row, rec) in &units_tab.rows {
        let fuel_text = units_tab.text(*row, rec, 2)?;
        let fuel: FuelType = fuel_text
            .parse()
            .map_err(|e: ModelError| units_tab.schema(*row, "fuel", e.to_string()))?;
        units.push(BmUnit {
            id: units_tab.text(*row, rec, 0)?.to_owned(),
            node: units_tab.text(*row, rec, 1)?.into(),
            fuel,
            p_min: units_tab.num(*row, rec, 3)?,
            p_max: units_tab.num(*row, rec, 4)?,
            fpn: Vec::new(),
            offer_ladder: Vec::new(),
            bid_ladder: Vec::new(),
        });
    }

    let fpn_raw = parse_series(&paths.fpn, FPN_HEADERS)?;
    let fpn_file = file_label(&paths.fpn);
    for (unit, series) in &fpn_raw {
        if !units.iter().any(|u| &u.id == unit) {
            let row = series.values().next().map_or(0, |&(r, _)| r);
            return Err(ModelError::Schema {
                file: fpn_file,
                row,
                column: "unit".into(),
                message: format!("unknown unit `{unit}`"),
            });
        }
    }
    for u in &mut units {
        u.fpn = dense_series(format!("fpn of unit {}", u.id), fpn_raw.get(&u.id), horizon)?;
    }

    let ladders_file = file_label(&paths.ladders);
    let lad = parse_table(&ladders_file, &read(&paths.ladders)?, 1, LADDER_HEADERS)?;
    let mut ranked: BTreeMap<(String, bool), BTreeMap<usize, Band>> = BTreeMap::new();
    for (row, rec) in &lad.rows {
        let unit = lad.text(*row, rec, 0)?.to_owned();
        if !units.iter().any(|u| u.id == unit) {
            return Err(lad.schema(*row, "unit", format!("unknown unit `{unit}`")));
        }
        let is_offer = match lad.text(*row, rec, 1)? {
            "offer" => true,
            "bid" => false,
            other => return Err(lad.schema(*row, "side", format!("`{other}` is neither offer nor bid"))),
        };
        let rank = lad.index(*row, rec, 2)?;
        let band = Band::new(lad.num(*row, rec, 3)?, lad.num(*row, rec, 4)?);
        if ranked.entry((unit, is_offer)).or_default().insert(rank, band).is_some() {
            return Err(lad.schema(*row, "rank", format!("duplicate rank {rank}")));
        }
    }
    for ((unit, is_offer), bands) in ranked {
        let u = units.iter_mut().find(|u| u.id == unit).expect("checked above");
        let ladder: Vec<Band> = bands.into_values().collect();
        if is_offer {
            u.offer_ladder = ladder;
        } else {
            u.bid_ladder = ladder;
        }
    }

    let storage = match &paths.storage {
        Some(p) => parse_storage(p)?,
        None => Vec::new(),
    };

    Scenario::new(network, units, storage, Imbalance { mw })
}

fn write(path: &Path, contents: String) -> Result<(), ModelError> {
    fs::write(path, contents).map_err(|source| ModelError::Io {
        path: path.to_owned(),
        source,
    })
}

/// Writes `scenario` into `dir` using the standard file names.
pub fn save_scenario(scenario: &Scenario, dir: impl AsRef<Path>) -> Result<ScenarioPaths, ModelError> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|source| ModelError::Io {
        path: dir.to_owned(),
        source,
    })?;

    let mut net = String::from("node,zone\n");
    for n in &scenario.network.nodes {
        net.push_str(&format!("{},{}\n", n.id, n.zone));
    }
    net.push_str("\nfrom,to,susceptance_pu,capacity_mw\n");
    for l in &scenario.network.lines {
        net.push_str(&format!("{},{},{},{}\n", l.from, l.to, l.susceptance_pu, l.capacity_mw));
    }

    let mut units = String::from("id,node,fuel,p_min,p_max\n");
    let mut fpn = String::from("unit,period,mw\n");
    let mut ladders = String::from("unit,side,rank,price_gbp_per_mwh,volume_mw\n");
    for u in &scenario.units {
        units.push_str(&format!("{},{},{},{},{}\n", u.id, u.node, u.fuel, u.p_min, u.p_max));
        for (t, v) in u.fpn.iter().enumerate() {
            fpn.push_str(&format!("{},{t},{v}\n", u.id));
        }
        for (side, ladder) in [("offer", &u.offer_ladder), ("bid", &u.bid_ladder)] {
            for (r, b) in ladder.iter().enumerate() {
                ladders.push_str(&format!("{},{side},{r},{},{}\n", u.id, b.price, b.volume));
            }
        }
    }

    let mut imbalance = String::from("node,period,mw\n");
    for (n, series) in scenario.network.nodes.iter().zip(&scenario.imbalance.mw) {
        for (t, v) in series.iter().enumerate() {
            imbalance.push_str(&format!("{},{t},{v}\n", n.id));
        }
    }

    let records: Vec<StorageRecord> = scenario
        .storage
        .iter()
        .map(|s| StorageRecord {
            id: Some(s.id.clone()),
            technology: s.technology.to_string(),
            node: s.node.0.clone(),
            rated_power_mw: s.rated_power,
            duration_h: s.duration,
            overrides: Some(StorageOverrides {
                eta_charge: Some(s.eta_charge),
                eta_discharge: Some(s.eta_discharge),
                degradation_tariff: Some(s.degradation_tariff),
                soc_initial: Some(s.soc_initial),
            }),
        })
        .collect();

    let paths = ScenarioPaths {
        network: dir.join("network.csv"),
        units: dir.join("units.csv"),
        fpn: dir.join("fpn.csv"),
        ladders: dir.join("ladders.csv"),
        imbalance: dir.join("imbalance.csv"),
        storage: Some(dir.join("storage.json")),
    };
    write(&paths.network, net)?;
    write(&paths.units, units)?;
    write(&paths.fpn, fpn)?;
    write(&paths.ladders, ladders)?;
    write(&paths.imbalance, imbalance)?;
    write(
        paths.storage.as_ref().expect("set above"),
        serde_json::to_string_pretty(&records).expect("plain records serialise") + "\n",
    )?;
    Ok(paths)
}
