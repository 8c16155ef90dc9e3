//! Memory-array design points and per-access operational carbon.
//!
//! Design points are characterisation data produced by an external array
//! explorer (one record per device, capacity and optimisation target). They are
//! loaded from CSV or JSON; the catalog is immutable once loaded.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::schema::SCHEMA_VERSION;
use crate::units::{joules_to_kwh, JOULES_PER_PJ, SECONDS_PER_NS, WATTS_PER_MW};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OptTarget {
    Area,
    ReadDynamicEnergy,
    #[serde(rename = "ReadEDP")]
    ReadEdp,
    #[serde(rename = "WriteEDP")]
    WriteEdp,
    ReadLatency,
    WriteLatency,
    LeakagePower,
}

impl OptTarget {
    pub const ALL: [OptTarget; 7] = [
        OptTarget::Area,
        OptTarget::ReadDynamicEnergy,
        OptTarget::ReadEdp,
        OptTarget::WriteEdp,
        OptTarget::ReadLatency,
        OptTarget::WriteLatency,
        OptTarget::LeakagePower,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            OptTarget::Area => "Area",
            OptTarget::ReadDynamicEnergy => "ReadDynamicEnergy",
            OptTarget::ReadEdp => "ReadEDP",
            OptTarget::WriteEdp => "WriteEDP",
            OptTarget::ReadLatency => "ReadLatency",
            OptTarget::WriteLatency => "WriteLatency",
            OptTarget::LeakagePower => "LeakagePower",
        }
    }

    /// The quantity this target minimises.
    pub fn metric(self, dp: &MemoryDesignPoint) -> f64 {
        match self {
            OptTarget::Area => dp.area,
            OptTarget::ReadDynamicEnergy => dp.read_energy,
            OptTarget::ReadEdp => dp.read_energy * dp.read_latency,
            OptTarget::WriteEdp => dp.write_energy * dp.write_latency,
            OptTarget::ReadLatency => dp.read_latency,
            OptTarget::WriteLatency => dp.write_latency,
            OptTarget::LeakagePower => dp.leakage_power,
        }
    }
}

impl fmt::Display for OptTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OptTarget {
    type Err = Error;

    /// Accepts the full names and the usual short forms (RDE, REDP, WEDP).
    fn from_str(s: &str) -> Result<Self> {
        let t = match s {
            "Area" => OptTarget::Area,
            "ReadDynamicEnergy" | "RDE" => OptTarget::ReadDynamicEnergy,
            "ReadEDP" | "REDP" => OptTarget::ReadEdp,
            "WriteEDP" | "WEDP" => OptTarget::WriteEdp,
            "ReadLatency" => OptTarget::ReadLatency,
            "WriteLatency" => OptTarget::WriteLatency,
            "LeakagePower" => OptTarget::LeakagePower,
            other => return Err(Error::invalid("opt_target", format!("unknown target `{other}`"))),
        };
        Ok(t)
    }
}

/// One characterised array configuration.
///
/// Units: capacity and data width in bits, area in cm², latencies in ns, energies
/// in pJ per access, leakage in mW.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MemoryDesignPoint {
    pub device_name: String,
    pub capacity: u64,
    pub opt_target: OptTarget,
    pub area: f64,
    pub area_efficiency: f64,
    pub read_latency: f64,
    pub write_latency: f64,
    pub read_energy: f64,
    pub write_energy: f64,
    pub leakage_power: f64,
    pub data_width: u64,
}

/// Column names and units, in canonical order.
pub const COLUMNS: [(&str, &str); 11] = [
    ("device_name", "-"),
    ("capacity", "bits"),
    ("opt_target", "-"),
    ("area", "cm2"),
    ("area_efficiency", "1"),
    ("read_latency", "ns"),
    ("write_latency", "ns"),
    ("read_energy", "pJ"),
    ("write_energy", "pJ"),
    ("leakage_power", "mW"),
    ("data_width", "bits"),
];

impl MemoryDesignPoint {
    fn validate(&self, record: usize) -> Result<()> {
        let fail = |field: &str, reason: String| Error::Load {
            record,
            field: field.to_string(),
            reason,
        };
        let metrics = [
            ("area", self.area),
            ("read_latency", self.read_latency),
            ("write_latency", self.write_latency),
            ("read_energy", self.read_energy),
            ("write_energy", self.write_energy),
            ("leakage_power", self.leakage_power),
        ];
        for (field, v) in metrics {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(fail(field, format!("{v} must be a finite nonnegative number")));
            }
        }
        if !(self.area_efficiency > 0.0 && self.area_efficiency <= 1.0) {
            return Err(fail(
                "area_efficiency",
                format!("{} is outside (0, 1]", self.area_efficiency),
            ));
        }
        if self.data_width == 0 || !self.capacity.is_multiple_of(self.data_width) {
            return Err(fail(
                "data_width",
                format!("{} does not divide capacity {}", self.data_width, self.capacity),
            ));
        }
        if self.device_name.trim().is_empty() {
            return Err(fail("device_name", "must not be empty".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CatalogJson {
    schema_version: u32,
    design_points: Vec<MemoryDesignPoint>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Catalog {
    points: Vec<MemoryDesignPoint>,
}

impl Catalog {
    /// Validates every record and rejects duplicate (device, capacity, target) keys.
    pub fn new(points: Vec<MemoryDesignPoint>) -> Result<Self> {
        let mut seen = HashSet::new();
        for (i, dp) in points.iter().enumerate() {
            dp.validate(i + 1)?;
            if !seen.insert((dp.device_name.clone(), dp.capacity, dp.opt_target)) {
                return Err(Error::Load {
                    record: i + 1,
                    field: "opt_target".into(),
                    reason: format!(
                        "duplicate design point ({}, {}, {})",
                        dp.device_name, dp.capacity, dp.opt_target
                    ),
                });
            }
        }
        Ok(Catalog { points })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Parses JSON when the text starts with `{`, CSV otherwise.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            Self::from_json_str(text)
        } else {
            Self::from_csv_str(text)
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: CatalogJson = serde_json::from_str(text)?;
        if file.schema_version != SCHEMA_VERSION {
            return Err(Error::Schema(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                file.schema_version
            )));
        }
        Self::new(file.design_points)
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&CatalogJson {
            schema_version: SCHEMA_VERSION,
            design_points: self.points.clone(),
        })?)
    }

    /// CSV with one header row. Header cells are `name` or `name (unit)`; a unit,
    /// when given, must match the canonical one. Lines starting with `#` are ignored.
    pub fn from_csv_str(text: &str) -> Result<Self> {
        if text.trim().is_empty() {
            return Ok(Catalog::default());
        }
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let header = reader.headers()?.clone();
        let mut index = [usize::MAX; COLUMNS.len()];
        for (col, cell) in header.iter().enumerate() {
            let (name, unit) = match cell.split_once('(') {
                Some((n, u)) => (n.trim(), Some(u.trim_end_matches(')').trim())),
                None => (cell.trim(), None),
            };
            let Some(k) = COLUMNS.iter().position(|(n, _)| *n == name) else {
                return Err(Error::Schema(format!("unknown design-point column `{name}`")));
            };
            if let Some(u) = unit {
                if u != COLUMNS[k].1 {
                    return Err(Error::Schema(format!(
                        "column `{name}` has unit `{u}`, expected `{}`",
                        COLUMNS[k].1
                    )));
                }
            }
            if index[k] != usize::MAX {
                return Err(Error::Schema(format!("column `{name}` appears twice")));
            }
            index[k] = col;
        }
        if let Some(k) = index.iter().position(|&i| i == usize::MAX) {
            return Err(Error::Schema(format!(
                "missing design-point column `{}`",
                COLUMNS[k].0
            )));
        }

        let mut points = Vec::new();
        for (i, row) in reader.records().enumerate() {
            let row = row?;
            let record = i + 1;
            let cell = |k: usize| row.get(index[k]).unwrap_or("");
            let num = |k: usize| -> Result<f64> {
                cell(k).parse::<f64>().map_err(|_| Error::Load {
                    record,
                    field: COLUMNS[k].0.into(),
                    reason: format!("`{}` is not a number", cell(k)),
                })
            };
            let int = |k: usize| -> Result<u64> {
                cell(k).parse::<u64>().map_err(|_| Error::Load {
                    record,
                    field: COLUMNS[k].0.into(),
                    reason: format!("`{}` is not a nonnegative integer", cell(k)),
                })
            };
            let opt_target = cell(2).parse::<OptTarget>().map_err(|_| Error::Load {
                record,
                field: "opt_target".into(),
                reason: format!("unknown target `{}`", cell(2)),
            })?;
            points.push(MemoryDesignPoint {
                device_name: cell(0).to_string(),
                capacity: int(1)?,
                opt_target,
                area: num(3)?,
                area_efficiency: num(4)?,
                read_latency: num(5)?,
                write_latency: num(6)?,
                read_energy: num(7)?,
                write_energy: num(8)?,
                leakage_power: num(9)?,
                data_width: int(10)?,
            });
        }
        Self::new(points)
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(COLUMNS.iter().map(|(n, u)| {
            if *u == "-" {
                n.to_string()
            } else {
                format!("{n} ({u})")
            }
        }))?;
        for dp in &self.points {
            w.write_record([
                dp.device_name.clone(),
                dp.capacity.to_string(),
                dp.opt_target.to_string(),
                dp.area.to_string(),
                dp.area_efficiency.to_string(),
                dp.read_latency.to_string(),
                dp.write_latency.to_string(),
                dp.read_energy.to_string(),
                dp.write_energy.to_string(),
                dp.leakage_power.to_string(),
                dp.data_width.to_string(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Schema(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn points(&self) -> &[MemoryDesignPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// The design point minimising `target` among records for `device` at
    /// `capacity` bits. Ties go to the smaller area, then the smaller name.
    pub fn select(&self, device: &str, capacity: u64, target: OptTarget) -> Result<&MemoryDesignPoint> {
        self.select_by(device, capacity, |dp| target.metric(dp))
            .ok_or_else(|| {
                Error::NotFound(format!(
                    "no design point for device {device} at {capacity} bits (target {target})"
                ))
            })
    }

    /// [`Catalog::select`] with an arbitrary metric.
    pub fn select_by(
        &self,
        device: &str,
        capacity: u64,
        metric: impl Fn(&MemoryDesignPoint) -> f64,
    ) -> Option<&MemoryDesignPoint> {
        self.points
            .iter()
            .filter(|dp| dp.device_name == device && dp.capacity == capacity)
            .min_by(|a, b| {
                metric(a)
                    .total_cmp(&metric(b))
                    .then_with(|| a.area.total_cmp(&b.area))
                    .then_with(|| a.device_name.cmp(&b.device_name))
            })
    }
}

/// Operational carbon per access, kg CO₂e.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccessCarbon {
    pub read: f64,
    pub write: f64,
    pub ci_used: f64,
}

/// Per-access carbon of a design point. With `include_leakage` the array leakage
/// over the access latency is charged to the access.
pub fn per_access_carbon(dp: &MemoryDesignPoint, ci_kg_per_kwh: f64, include_leakage: bool) -> AccessCarbon {
    let leak_w = if include_leakage {
        dp.leakage_power * WATTS_PER_MW
    } else {
        0.0
    };
    let access_j =
        |energy_pj: f64, latency_ns: f64| energy_pj * JOULES_PER_PJ + leak_w * latency_ns * SECONDS_PER_NS;
    AccessCarbon {
        read: joules_to_kwh(access_j(dp.read_energy, dp.read_latency)) * ci_kg_per_kwh,
        write: joules_to_kwh(access_j(dp.write_energy, dp.write_latency)) * ci_kg_per_kwh,
        ci_used: ci_kg_per_kwh,
    }
}
