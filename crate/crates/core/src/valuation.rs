//! Discounted cash-flow valuation of a storage asset with revenue stacking.
//!
//! The annual cash flow combines the balancing-mechanism benefit (weighted by
//! the balancing share κ), de-rated Capacity Market payments and Dynamic
//! Containment revenue on the remaining `1 - κ` share, less fixed O&M. CAPEX is
//! an undiscounted outlay and the residual value is recovered one year after
//! the end of the operating life.

use serde::{Deserialize, Serialize};

use crate::model::Tech;

/// Discount rate applied to every technology.
pub const DEFAULT_DISCOUNT_RATE: f64 = 0.08;
/// Fraction of nameplate credited in the Capacity Market.
pub const DEFAULT_CM_DERATING: f64 = 0.20;
/// Placeholder Capacity Market clearing price, £/MW/year. Not a market value.
pub const PLACEHOLDER_CM_PRICE: f64 = 30_000.0;
/// Placeholder Dynamic Containment availability price, £/MW/h. Not a market value.
pub const PLACEHOLDER_DC_PRICE: f64 = 5.0;
/// Hours per year of Dynamic Containment availability.
pub const DEFAULT_DC_HOURS: f64 = 8760.0;
/// CAPEX scaling factors evaluated by default: current, -30 %, -70 %.
pub const DEFAULT_CAPEX_FACTORS: [f64; 3] = [1.0, 0.7, 0.3];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TechEconomics {
    /// £
    pub capex: f64,
    /// £/year
    pub fixed_om: f64,
    pub life_years: u32,
    /// Residual value as a fraction of CAPEX.
    pub lambda_rv: f64,
    pub discount_rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RevenueInputs {
    /// Annualised net balancing-mechanism benefit, £/year.
    pub nbb_per_year: f64,
    /// Share of capacity used in the balancing mechanism.
    pub kappa: f64,
    /// £/MW/year
    pub cm_price: f64,
    pub cm_derating: f64,
    /// £/MW/h
    pub dc_price: f64,
    pub dc_hours_per_year: f64,
    /// MW
    pub rated_power: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NpvResult {
    pub npv: f64,
    /// Undiscounted cash flow for years `0..=life_years`.
    pub cash_flows: Vec<f64>,
    pub residual_value: f64,
}

/// Residual value recovered at end of life.
pub fn residual_value(capex: f64, lambda_rv: f64) -> f64 {
    lambda_rv * capex
}

impl RevenueInputs {
    /// Capacity Market revenue, £/year.
    pub fn cmr(&self) -> f64 {
        self.cm_derating * self.rated_power * self.cm_price
    }

    /// Dynamic Containment revenue if the whole capacity were offered, £/year.
    pub fn dcr(&self) -> f64 {
        self.rated_power * self.dc_price * self.dc_hours_per_year
    }
}

pub fn annual_cash_flow(rev: &RevenueInputs, econ: &TechEconomics) -> f64 {
    rev.kappa * rev.nbb_per_year + rev.cmr() + (1.0 - rev.kappa) * rev.dcr() - econ.fixed_om
}

/// Net present value of a constant annual cash flow over years `0..=Y`.
pub fn npv(cash_per_year: f64, econ: &TechEconomics) -> NpvResult {
    let d = econ.discount_rate;
    let y = econ.life_years;
    let cash_flows = vec![cash_per_year; y as usize + 1];
    let discounted: f64 = cash_flows
        .iter()
        .enumerate()
        .map(|(year, cf)| cf / (1.0 + d).powi(year as i32))
        .sum();
    let rv = residual_value(econ.capex, econ.lambda_rv);
    NpvResult {
        npv: discounted - econ.capex + rv / (1.0 + d).powi(y as i32 + 1),
        cash_flows,
        residual_value: rv,
    }
}

/// Re-evaluates the NPV with CAPEX (and with it the residual value) scaled by
/// each factor.
pub fn capex_sensitivity(
    rev: &RevenueInputs,
    econ: &TechEconomics,
    factors: &[f64],
) -> Vec<(f64, NpvResult)> {
    let cash = annual_cash_flow(rev, econ);
    factors
        .iter()
        .map(|&f| {
            let scaled = TechEconomics {
                capex: econ.capex * f,
                ..*econ
            };
            (f, npv(cash, &scaled))
        })
        .collect()
}

/// `(capex, fixed O&M)` at 1 MW and 100 MW, operating life, residual fraction.
fn table_row(tech: Tech) -> ([f64; 2], [f64; 2], u32, f64) {
    match tech {
        Tech::Lib => ([539_348.37, 41_895_060.23], [2_563.0, 206_969.0], 11, 0.20),
        Tech::Vrfb => ([753_820.03, 60_452_744.77], [4_527.0, 358_962.0], 12, 0.40),
        Tech::Psh => ([912_765.79, 91_276_578.54], [6_468.0, 646_778.0], 60, 0.20),
        Tech::Hes => ([2_344_571.11, 234_457_110.52], [18_595.0, 1_859_487.0], 30, 0.05),
    }
}

/// Economic parameters for a 2-hour asset of `tech` at `rated_power` MW.
///
/// 1 MW and 100 MW are exact table rows; other sizes interpolate (or
/// extrapolate) linearly in CAPEX and fixed O&M between those two points.
pub fn table2_defaults(tech: Tech, rated_power: f64) -> TechEconomics {
    let (capex, om, life_years, lambda_rv) = table_row(tech);
    let lerp = |pair: [f64; 2]| {
        if rated_power == 1.0 {
            pair[0]
        } else if rated_power == 100.0 {
            pair[1]
        } else {
            pair[0] + (pair[1] - pair[0]) * (rated_power - 1.0) / 99.0
        }
    };
    TechEconomics {
        capex: lerp(capex),
        fixed_om: lerp(om),
        life_years,
        lambda_rv,
        discount_rate: DEFAULT_DISCOUNT_RATE,
    }
}

/// Converts simulated-period cost deltas (negative = saving) into an annual
/// net balancing benefit: `multiplier * Σ(-delta)`. With one January and one
/// July month the multiplier is 6.
pub fn annualize_nbb(cost_deltas: &[f64], multiplier: f64) -> f64 {
    multiplier * cost_deltas.iter().map(|d| -d).sum::<f64>()
}
