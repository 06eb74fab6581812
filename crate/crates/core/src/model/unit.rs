use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{ModelError, NodeId};

/// Generation technology of a balancing unit, as used for carbon accounting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FuelType {
    Coal,
    #[serde(rename = "OCGT")]
    Ocgt,
    #[serde(rename = "CCGT")]
    Ccgt,
    Other,
    Biomass,
    Nuclear,
    #[serde(rename = "NPSHYD")]
    Npshyd,
    Wind,
    #[serde(rename = "PSH")]
    Psh,
    /// Storage, demand-side response and embedded renewables.
    ZeroRated,
}

impl FuelType {
    pub const ALL: [FuelType; 10] = [
        FuelType::Coal,
        FuelType::Ocgt,
        FuelType::Ccgt,
        FuelType::Other,
        FuelType::Biomass,
        FuelType::Nuclear,
        FuelType::Npshyd,
        FuelType::Wind,
        FuelType::Psh,
        FuelType::ZeroRated,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FuelType::Coal => "Coal",
            FuelType::Ocgt => "OCGT",
            FuelType::Ccgt => "CCGT",
            FuelType::Other => "Other",
            FuelType::Biomass => "Biomass",
            FuelType::Nuclear => "Nuclear",
            FuelType::Npshyd => "NPSHYD",
            FuelType::Wind => "Wind",
            FuelType::Psh => "PSH",
            FuelType::ZeroRated => "ZeroRated",
        }
    }
}

impl fmt::Display for FuelType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FuelType {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FuelType::ALL
            .into_iter()
            .find(|f| f.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| ModelError::UnknownFuel(s.to_owned()))
    }
}

/// One price/volume step of an offer or bid ladder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band {
    /// £/MWh
    pub price: f64,
    /// MW
    pub volume: f64,
}

impl Band {
    pub fn new(price: f64, volume: f64) -> Self {
        Band { price, volume }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BmUnit {
    pub id: String,
    pub node: NodeId,
    pub fuel: FuelType,
    pub p_min: f64,
    pub p_max: f64,
    /// Final physical notification, MW per settlement period.
    pub fpn: Vec<f64>,
    /// Upward steps, cheapest first.
    pub offer_ladder: Vec<Band>,
    /// Downward steps, highest price first.
    pub bid_ladder: Vec<Band>,
}

impl BmUnit {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        id: &str,
        node: &str,
        fuel: FuelType,
        p_min: f64,
        p_max: f64,
        fpn: Vec<f64>,
        offer_ladder: Vec<Band>,
        bid_ladder: Vec<Band>,
    ) -> Self {
        BmUnit {
            id: id.to_owned(),
            node: node.into(),
            fuel,
            p_min,
            p_max,
            fpn,
            offer_ladder,
            bid_ladder,
        }
    }

    pub fn total_offer(&self) -> f64 {
        self.offer_ladder.iter().map(|b| b.volume).sum()
    }

    pub fn total_bid(&self) -> f64 {
        self.bid_ladder.iter().map(|b| b.volume).sum()
    }

    pub fn validate(&self, horizon: usize) -> Result<(), ModelError> {
        let entity = || format!("unit {}", self.id);
        let fail = |msg: String| Err(ModelError::invariant(entity(), msg));
        if !(self.p_min.is_finite() && self.p_max.is_finite() && self.p_min <= self.p_max) {
            return fail(format!("p_min {} must not exceed p_max {}", self.p_min, self.p_max));
        }
        if self.fpn.len() != horizon {
            return fail(format!("fpn has {} periods, expected {horizon}", self.fpn.len()));
        }
        for band in self.offer_ladder.iter().chain(&self.bid_ladder) {
            if !(band.volume >= 0.0 && band.volume.is_finite()) {
                return fail("ladder volumes must be nonnegative".into());
            }
            if !band.price.is_finite() {
                return fail("ladder prices must be finite".into());
            }
        }
        if self.offer_ladder.windows(2).any(|w| w[1].price < w[0].price) {
            return fail("offer prices must be nondecreasing".into());
        }
        if self.bid_ladder.windows(2).any(|w| w[1].price > w[0].price) {
            return fail("bid prices must be nonincreasing".into());
        }
        let (up, down) = (self.total_offer(), self.total_bid());
        for (t, &p) in self.fpn.iter().enumerate() {
            if !(p >= self.p_min && p <= self.p_max) {
                return fail(format!("fpn {p} outside [p_min, p_max] in period {t}"));
            }
            if p + up > self.p_max + 1e-9 {
                return fail(format!("fpn + offer volume exceeds p_max in period {t}"));
            }
            if p - down < self.p_min - 1e-9 {
                return fail(format!("fpn - bid volume falls below p_min in period {t}"));
            }
        }
        Ok(())
    }
}
