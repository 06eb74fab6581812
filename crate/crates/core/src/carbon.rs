//! Operational emission change between a storage case and the base case.
//!
//! Each unit's net redispatch energy (offers positive, bids negative) is
//! differenced between the two solutions and weighted by the fixed intensity of
//! its fuel. Storage itself carries zero operational intensity.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::dispatch::DispatchSolution;
use crate::model::FuelType;

/// kgCO₂ per MWh for every fuel.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensityTable {
    values: BTreeMap<FuelType, f64>,
}

impl IntensityTable {
    /// Builds a table; every fuel must be present with a nonnegative value.
    pub fn new(values: BTreeMap<FuelType, f64>) -> Result<Self, CarbonError> {
        for fuel in FuelType::ALL {
            match values.get(&fuel) {
                None => return Err(CarbonError::MissingFuel(fuel)),
                Some(v) if !(*v >= 0.0 && v.is_finite()) => {
                    return Err(CarbonError::NegativeIntensity(fuel))
                }
                _ => {}
            }
        }
        Ok(IntensityTable { values })
    }

    pub fn get(&self, fuel: FuelType) -> f64 {
        self.values[&fuel]
    }
}

impl Default for IntensityTable {
    fn default() -> Self {
        default_intensities()
    }
}

/// Marginal intensities per generation technology, kgCO₂/MWh.
pub fn default_intensities() -> IntensityTable {
    let values = FuelType::ALL
        .into_iter()
        .map(|f| {
            let v = match f {
                FuelType::Coal => 937.0,
                FuelType::Ocgt => 651.0,
                FuelType::Ccgt => 394.0,
                FuelType::Other => 300.0,
                FuelType::Biomass => 120.0,
                FuelType::Nuclear
                | FuelType::Npshyd
                | FuelType::Wind
                | FuelType::Psh
                | FuelType::ZeroRated => 0.0,
            };
            (f, v)
        })
        .collect();
    IntensityTable { values }
}

#[derive(Debug, Error, PartialEq)]
pub enum CarbonError {
    #[error("intensity table has no entry for {0}")]
    MissingFuel(FuelType),
    #[error("intensity for {0} must be nonnegative")]
    NegativeIntensity(FuelType),
    #[error("unit sets differ between solutions: {0}")]
    UnitMismatch(String),
    #[error("horizon must be positive")]
    EmptyHorizon,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmissionDelta {
    /// kgCO₂ over the horizon.
    pub total: f64,
    /// kgCO₂ per hour.
    pub rate: f64,
    pub per_fuel: BTreeMap<FuelType, f64>,
    /// Net generation change per fuel, MWh.
    pub energy_mwh: BTreeMap<FuelType, f64>,
}

fn net_energy(solution: &DispatchSolution) -> BTreeMap<&str, (FuelType, f64)> {
    solution
        .units
        .iter()
        .map(|u| {
            let e: f64 = (0..solution.horizon).map(|t| u.net_mw(t)).sum::<f64>() * solution.period_hours;
            (u.id.as_str(), (u.fuel, e))
        })
        .collect()
}

/// Emission change of `test` relative to `base`.
pub fn emission_delta(
    base: &DispatchSolution,
    test: &DispatchSolution,
    table: &IntensityTable,
    horizon_hours: f64,
) -> Result<EmissionDelta, CarbonError> {
    if horizon_hours.is_nan() || horizon_hours <= 0.0 {
        return Err(CarbonError::EmptyHorizon);
    }
    let base_e = net_energy(base);
    let test_e = net_energy(test);
    if base_e.len() != test_e.len() {
        return Err(CarbonError::UnitMismatch(format!(
            "{} units vs {}",
            base_e.len(),
            test_e.len()
        )));
    }
    let mut per_fuel: BTreeMap<FuelType, f64> = BTreeMap::new();
    let mut energy_mwh: BTreeMap<FuelType, f64> = BTreeMap::new();
    for (id, &(fuel, e_base)) in &base_e {
        let Some(&(test_fuel, e_test)) = test_e.get(id) else {
            return Err(CarbonError::UnitMismatch(format!("{id} missing from test case")));
        };
        if test_fuel != fuel {
            return Err(CarbonError::UnitMismatch(format!("{id} changes fuel")));
        }
        let delta = e_test - e_base;
        *energy_mwh.entry(fuel).or_default() += delta;
        *per_fuel.entry(fuel).or_default() += delta * table.get(fuel);
    }
    let total: f64 = per_fuel.values().sum();
    Ok(EmissionDelta {
        total,
        rate: total / horizon_hours,
        per_fuel,
        energy_mwh,
    })
}

impl EmissionDelta {
    /// `fuel,delta_mwh,delta_kgco2` rows followed by a `total` row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("fuel,delta_mwh,delta_kgco2\n");
        let mut mwh = 0.0;
        for (fuel, kg) in &self.per_fuel {
            let e = self.energy_mwh.get(fuel).copied().unwrap_or(0.0);
            mwh += e;
            let _ = writeln!(out, "{fuel},{e},{kg}");
        }
        let _ = writeln!(out, "total,{mwh},{}", self.total);
        out
    }
}
