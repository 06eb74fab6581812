use std::fmt::Write as _;

use super::DispatchSolution;

impl DispatchSolution {
    /// Long-format CSV: `kind,entity,period,value`.
    ///
    /// Offer and bid entities are `unit:rank`; `soc` rows are indexed by
    /// period boundary (`0..=horizon`).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("kind,entity,period,value\n");
        let mut row = |kind: &str, entity: &str, t: usize, v: f64| {
            let _ = writeln!(out, "{kind},{entity},{t},{v}");
        };
        for u in &self.units {
            for (kind, bands) in [("offer", &u.offers), ("bid", &u.bids)] {
                for (r, b) in bands.iter().enumerate() {
                    let entity = format!("{}:{r}", u.id);
                    for (t, &v) in b.accepted.iter().enumerate() {
                        row(kind, &entity, t, v);
                    }
                }
            }
        }
        for s in &self.storage {
            for (t, &v) in s.charge.iter().enumerate() {
                row("charge", &s.id, t, v);
            }
            for (t, &v) in s.discharge.iter().enumerate() {
                row("discharge", &s.id, t, v);
            }
            for (t, &v) in s.soc.iter().enumerate() {
                row("soc", &s.id, t, v);
            }
        }
        for (label, series) in self.line_labels.iter().zip(&self.flow) {
            for (t, &v) in series.iter().enumerate() {
                row("flow", label, t, v);
            }
        }
        for (node, series) in self.nodes.iter().zip(&self.angle) {
            for (t, &v) in series.iter().enumerate() {
                row("angle", node.as_str(), t, v);
            }
        }
        out
    }
}
