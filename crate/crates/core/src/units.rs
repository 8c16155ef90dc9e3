//! Unit conversions used at I/O boundaries.
//!
//! Internally the model works in seconds, watts, joules and cm². kWh, µg, pJ,
//! mW and ns appear only where data enters or leaves.

pub const JOULES_PER_KWH: f64 = 3.6e6;
pub const KG_PER_UG: f64 = 1e-9;
pub const JOULES_PER_PJ: f64 = 1e-12;
pub const WATTS_PER_MW: f64 = 1e-3;
pub const SECONDS_PER_NS: f64 = 1e-9;
pub const CM_PER_NM: f64 = 1e-7;

/// 1 MB = 2^20 bytes.
pub const BITS_PER_MB: f64 = 8.0 * 1024.0 * 1024.0;

pub fn joules_to_kwh(joules: f64) -> f64 {
    joules / JOULES_PER_KWH
}

pub fn kwh_to_joules(kwh: f64) -> f64 {
    kwh * JOULES_PER_KWH
}

pub fn ug_to_kg(ug: f64) -> f64 {
    ug * KG_PER_UG
}

pub fn mb_to_bits(mb: f64) -> f64 {
    mb * BITS_PER_MB
}

pub fn bits_to_mb(bits: f64) -> f64 {
    bits / BITS_PER_MB
}
