//! Endurance-limited lifetime and total life-cycle footprint.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Write traffic seen by a memory array, assumed spread uniformly over its capacity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WritePattern {
    pub writes_per_day: f64,
    pub access_width_bits: f64,
    pub capacity_bits: f64,
}

impl WritePattern {
    fn validate(&self) -> Result<()> {
        if !(self.writes_per_day >= 0.0) {
            return Err(Error::invalid("write_rate", "must be nonnegative"));
        }
        if !(self.access_width_bits > 0.0) {
            return Err(Error::invalid("access_width", "must be positive"));
        }
        if !(self.capacity_bits > 0.0) {
            return Err(Error::invalid("capacity", "must be positive"));
        }
        Ok(())
    }
}

/// Days of operation before wear-out. `Unlimited` covers devices without an
/// endurance limit and patterns with no writes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "days")]
pub enum Lifetime {
    Days(f64),
    Unlimited,
}

impl Lifetime {
    pub fn days(self) -> Option<f64> {
        match self {
            Lifetime::Days(d) => Some(d),
            Lifetime::Unlimited => None,
        }
    }

    /// Shorter of two lifetimes.
    pub fn min(self, other: Lifetime) -> Lifetime {
        match (self, other) {
            (Lifetime::Days(a), Lifetime::Days(b)) => Lifetime::Days(a.min(b)),
            (Lifetime::Days(a), Lifetime::Unlimited) | (Lifetime::Unlimited, Lifetime::Days(a)) => {
                Lifetime::Days(a)
            }
            (Lifetime::Unlimited, Lifetime::Unlimited) => Lifetime::Unlimited,
        }
    }
}

/// endurance × capacity / (writes per day × access width).
///
/// `endurance_cycles = None` is an unlimited-endurance device.
pub fn lifetime(endurance_cycles: Option<f64>, pattern: &WritePattern) -> Result<Lifetime> {
    pattern.validate()?;
    let Some(endurance) = endurance_cycles else {
        return Ok(Lifetime::Unlimited);
    };
    if !(endurance >= 1.0) {
        return Err(Error::invalid("endurance", format!("{endurance} < 1")));
    }
    if pattern.writes_per_day == 0.0 {
        return Ok(Lifetime::Unlimited);
    }
    Ok(Lifetime::Days(
        endurance * pattern.capacity_bits / (pattern.writes_per_day * pattern.access_width_bits),
    ))
}

/// kg CO₂e.
pub fn operational_carbon(energy_kwh: f64, ci_kg_per_kwh: f64) -> Result<f64> {
    if !(energy_kwh >= 0.0) {
        return Err(Error::invalid("energy", "must be nonnegative"));
    }
    Ok(energy_kwh * ci_kg_per_kwh)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LifecycleResult {
    pub ocf_kg: f64,
    pub ecf_kg: f64,
    pub runtime_days: f64,
    pub lifetime: Lifetime,
    pub total_cf_kg: f64,
    /// Runtime exceeds the rated lifetime.
    pub past_rated_lifetime: bool,
}

/// Operational carbon plus the share of embodied carbon used up over `runtime_days`.
///
/// Runtimes beyond the lifetime are not clamped; the result is flagged instead.
pub fn total_cf(ocf_kg: f64, ecf_kg: f64, runtime_days: f64, lifetime: Lifetime) -> Result<LifecycleResult> {
    if !(runtime_days >= 0.0) {
        return Err(Error::invalid("runtime", "must be nonnegative"));
    }
    let share = match lifetime {
        Lifetime::Days(lt) if lt > 0.0 => runtime_days / lt,
        Lifetime::Days(lt) => return Err(Error::invalid("lifetime", format!("{lt} days is not positive"))),
        Lifetime::Unlimited => 0.0,
    };
    Ok(LifecycleResult {
        ocf_kg,
        ecf_kg,
        runtime_days,
        lifetime,
        total_cf_kg: ocf_kg + share * ecf_kg,
        past_rated_lifetime: share > 1.0,
    })
}

/// Embodied carbon charged to each write when the array is worn out evenly:
/// ecf × access width / (endurance × capacity).
pub fn embodied_per_write(ecf_kg: f64, endurance_cycles: f64, pattern: &WritePattern) -> Result<f64> {
    pattern.validate()?;
    if !(endurance_cycles >= 1.0) {
        return Err(Error::invalid("endurance", format!("{endurance_cycles} < 1")));
    }
    Ok(ecf_kg * pattern.access_width_bits / (endurance_cycles * pattern.capacity_bits))
}
