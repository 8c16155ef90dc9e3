//! Versioned on-disk formats.
//!
//! Every JSON file carries `schema_version` and rejects unknown fields. Field
//! names carry their units. Each file type converts to and from its model type.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::embodied::{DeviceLibrary, DeviceSpec, FabBaseline};
use crate::recipe::{
    FixedStage, GhgModel, LayerProcess, ProcessRecipe, ToolPowerModel, DEFAULT_CHAMBER_PUMP_FRACTION,
};
use crate::system::{AcceleratorConfig, BufferSpec, BufferSweep, BufferTraffic, WorkloadProfile};
use crate::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// A JSON file format paired with the model type it describes.
pub trait SchemaFile: Serialize + DeserializeOwned {
    type Model;

    fn schema_version(&self) -> u32;
    fn into_model(self) -> Result<Self::Model>;
    fn from_model(model: &Self::Model) -> Self;
}

pub fn parse<F: SchemaFile>(text: &str) -> Result<F::Model> {
    let file: F = serde_json::from_str(text)?;
    if file.schema_version() != SCHEMA_VERSION {
        return Err(Error::Schema(format!(
            "unsupported schema_version {} (expected {SCHEMA_VERSION})",
            file.schema_version()
        )));
    }
    file.into_model()
}

pub fn load<F: SchemaFile>(path: &Path) -> Result<F::Model> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse::<F>(&text)
}

pub fn to_json<F: SchemaFile>(model: &F::Model) -> String {
    serde_json::to_string_pretty(&F::from_model(model)).expect("schema types serialize") + "\n"
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerEntry {
    pub name: String,
    pub thickness_nm: f64,
    pub rate_nm_per_cycle: f64,
    pub cycle_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageEntry {
    pub name: String,
    pub duration_s: f64,
    pub power_class: crate::recipe::PowerClass,
}

fn default_chamber_pump_fraction() -> f64 {
    DEFAULT_CHAMBER_PUMP_FRACTION
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerEntry {
    pub p_preheat_w: f64,
    pub p_steady_w: f64,
    pub sigma_fraction: f64,
    #[serde(default = "default_chamber_pump_fraction")]
    pub chamber_pump_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecipeFile {
    pub schema_version: u32,
    pub fixed_stages: Vec<StageEntry>,
    pub layers: Vec<LayerEntry>,
    pub wafer_area_cm2: f64,
    pub facility_overhead: f64,
    pub power: PowerEntry,
}

impl SchemaFile for RecipeFile {
    type Model = ProcessRecipe;

    fn schema_version(&self) -> u32 {
        self.schema_version
    }

    fn into_model(self) -> Result<ProcessRecipe> {
        let recipe = ProcessRecipe {
            fixed_stages: self
                .fixed_stages
                .into_iter()
                .map(|s| FixedStage {
                    name: s.name,
                    duration_s: s.duration_s,
                    power_class: s.power_class,
                })
                .collect(),
            layers: self
                .layers
                .into_iter()
                .map(|l| LayerProcess::new(&l.name, l.thickness_nm, l.rate_nm_per_cycle, l.cycle_s))
                .collect(),
            wafer_area_cm2: self.wafer_area_cm2,
            facility_overhead: self.facility_overhead,
            power: ToolPowerModel {
                p_preheat_w: self.power.p_preheat_w,
                p_steady_w: self.power.p_steady_w,
                chamber_pump_fraction: self.power.chamber_pump_fraction,
                sigma_fraction: self.power.sigma_fraction,
            },
        };
        recipe.validate()?;
        Ok(recipe)
    }

    fn from_model(r: &ProcessRecipe) -> Self {
        RecipeFile {
            schema_version: SCHEMA_VERSION,
            fixed_stages: r
                .fixed_stages
                .iter()
                .map(|s| StageEntry {
                    name: s.name.clone(),
                    duration_s: s.duration_s,
                    power_class: s.power_class,
                })
                .collect(),
            layers: r
                .layers
                .iter()
                .map(|l| LayerEntry {
                    name: l.name.clone(),
                    thickness_nm: l.thickness_nm,
                    rate_nm_per_cycle: l.rate_nm_per_cycle,
                    cycle_s: l.cycle_s,
                })
                .collect(),
            wafer_area_cm2: r.wafer_area_cm2,
            facility_overhead: r.facility_overhead,
            power: PowerEntry {
                p_preheat_w: r.power.p_preheat_w,
                p_steady_w: r.power.p_steady_w,
                sigma_fraction: r.power.sigma_fraction,
                chamber_pump_fraction: r.power.chamber_pump_fraction,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GhgFile {
    pub schema_version: u32,
    pub ghg_rate_ug_per_nm_cm2: f64,
    pub gwp: f64,
    pub destruction_efficiency: f64,
}

impl SchemaFile for GhgFile {
    type Model = GhgModel;

    fn schema_version(&self) -> u32 {
        self.schema_version
    }

    fn into_model(self) -> Result<GhgModel> {
        let ghg = GhgModel {
            ghg_rate_ug_per_nm_cm2: self.ghg_rate_ug_per_nm_cm2,
            gwp: self.gwp,
            destruction_efficiency: self.destruction_efficiency,
        };
        ghg.validate()?;
        Ok(ghg)
    }

    fn from_model(g: &GhgModel) -> Self {
        GhgFile {
            schema_version: SCHEMA_VERSION,
            ghg_rate_ug_per_nm_cm2: g.ghg_rate_ug_per_nm_cm2,
            gwp: g.gwp,
            destruction_efficiency: g.destruction_efficiency,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FabFile {
    pub schema_version: u32,
    pub epa_cmos_kwh_per_cm2: f64,
    pub gpa_cmos_kg_per_cm2: f64,
    pub mpa_cmos_kg_per_cm2: f64,
    #[serde(rename = "yield")]
    pub yield_fraction: f64,
    pub carbon_intensity_kg_per_kwh: f64,
    pub node_nm: f64,
}

impl SchemaFile for FabFile {
    type Model = FabBaseline;

    fn schema_version(&self) -> u32 {
        self.schema_version
    }

    fn into_model(self) -> Result<FabBaseline> {
        let fab = FabBaseline {
            epa_cmos_kwh_per_cm2: self.epa_cmos_kwh_per_cm2,
            gpa_cmos_kg_per_cm2: self.gpa_cmos_kg_per_cm2,
            mpa_cmos_kg_per_cm2: self.mpa_cmos_kg_per_cm2,
            yield_fraction: self.yield_fraction,
            carbon_intensity_kg_per_kwh: self.carbon_intensity_kg_per_kwh,
            node_nm: self.node_nm,
        };
        fab.validate()?;
        Ok(fab)
    }

    fn from_model(f: &FabBaseline) -> Self {
        FabFile {
            schema_version: SCHEMA_VERSION,
            epa_cmos_kwh_per_cm2: f.epa_cmos_kwh_per_cm2,
            gpa_cmos_kg_per_cm2: f.gpa_cmos_kg_per_cm2,
            mpa_cmos_kg_per_cm2: f.mpa_cmos_kg_per_cm2,
            yield_fraction: f.yield_fraction,
            carbon_intensity_kg_per_kwh: f.carbon_intensity_kg_per_kwh,
            node_nm: f.node_nm,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceEntry {
    pub name: String,
    pub cell_area_f2: f64,
    pub is_fefet: bool,
    #[serde(default)]
    pub hzo_thickness_nm: f64,
    #[serde(default)]
    pub al2o3_thickness_nm: f64,
    /// `null` or absent: no endurance limit.
    #[serde(default)]
    pub endurance_cycles: Option<f64>,
    #[serde(default)]
    pub read_voltage_v: Option<f64>,
    #[serde(default)]
    pub set_voltage_v: Option<f64>,
    #[serde(default)]
    pub reset_voltage_v: Option<f64>,
    #[serde(default)]
    pub program_pulse_ns: Option<f64>,
    /// Free-form provenance note.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DevicesFile {
    pub schema_version: u32,
    pub devices: Vec<DeviceEntry>,
}

impl SchemaFile for DevicesFile {
    type Model = DeviceLibrary;

    fn schema_version(&self) -> u32 {
        self.schema_version
    }

    fn into_model(self) -> Result<DeviceLibrary> {
        DeviceLibrary::new(
            self.devices
                .into_iter()
                .map(|d| DeviceSpec {
                    name: d.name,
                    cell_area_f2: d.cell_area_f2,
                    hzo_thickness_nm: d.hzo_thickness_nm,
                    al2o3_thickness_nm: d.al2o3_thickness_nm,
                    endurance_cycles: d.endurance_cycles,
                    read_voltage_v: d.read_voltage_v,
                    set_voltage_v: d.set_voltage_v,
                    reset_voltage_v: d.reset_voltage_v,
                    program_pulse_ns: d.program_pulse_ns,
                    is_fefet: d.is_fefet,
                })
                .collect(),
        )
    }

    fn from_model(lib: &DeviceLibrary) -> Self {
        DevicesFile {
            schema_version: SCHEMA_VERSION,
            devices: lib
                .devices()
                .iter()
                .map(|d| DeviceEntry {
                    name: d.name.clone(),
                    cell_area_f2: d.cell_area_f2,
                    is_fefet: d.is_fefet,
                    hzo_thickness_nm: d.hzo_thickness_nm,
                    al2o3_thickness_nm: d.al2o3_thickness_nm,
                    endurance_cycles: d.endurance_cycles,
                    read_voltage_v: d.read_voltage_v,
                    set_voltage_v: d.set_voltage_v,
                    reset_voltage_v: d.reset_voltage_v,
                    program_pulse_ns: d.program_pulse_ns,
                    source: None,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AcceleratorFile {
    pub schema_version: u32,
    pub name: String,
    pub compute_area_cm2: f64,
    pub compute_energy_per_mac_pj: f64,
    pub pe_rows: u32,
    pub pe_cols: u32,
    pub buffers: Vec<BufferSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<BufferSweep>,
    #[serde(default)]
    pub authoritative: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl SchemaFile for AcceleratorFile {
    type Model = AcceleratorConfig;

    fn schema_version(&self) -> u32 {
        self.schema_version
    }

    fn into_model(self) -> Result<AcceleratorConfig> {
        let cfg = AcceleratorConfig {
            name: self.name,
            compute_area_cm2: self.compute_area_cm2,
            compute_energy_per_mac_pj: self.compute_energy_per_mac_pj,
            pe_rows: self.pe_rows,
            pe_cols: self.pe_cols,
            buffers: self.buffers,
            sweep: self.sweep,
            authoritative: self.authoritative,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn from_model(c: &AcceleratorConfig) -> Self {
        AcceleratorFile {
            schema_version: SCHEMA_VERSION,
            name: c.name.clone(),
            compute_area_cm2: c.compute_area_cm2,
            compute_energy_per_mac_pj: c.compute_energy_per_mac_pj,
            pe_rows: c.pe_rows,
            pe_cols: c.pe_cols,
            buffers: c.buffers.clone(),
            sweep: c.sweep.clone(),
            authoritative: c.authoritative,
            note: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkloadFile {
    pub schema_version: u32,
    pub name: String,
    pub mac_count: f64,
    pub execution_time_s: f64,
    pub inferences_per_day: f64,
    pub buffers: Vec<BufferTraffic>,
    #[serde(default)]
    pub authoritative: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl SchemaFile for WorkloadFile {
    type Model = WorkloadProfile;

    fn schema_version(&self) -> u32 {
        self.schema_version
    }

    fn into_model(self) -> Result<WorkloadProfile> {
        let w = WorkloadProfile {
            name: self.name,
            mac_count: self.mac_count,
            buffers: self.buffers,
            execution_time_s: self.execution_time_s,
            inferences_per_day: self.inferences_per_day,
            authoritative: self.authoritative,
        };
        w.validate()?;
        Ok(w)
    }

    fn from_model(w: &WorkloadProfile) -> Self {
        WorkloadFile {
            schema_version: SCHEMA_VERSION,
            name: w.name.clone(),
            mac_count: w.mac_count,
            execution_time_s: w.execution_time_s,
            inferences_per_day: w.inferences_per_day,
            buffers: w.buffers.clone(),
            authoritative: w.authoritative,
            note: None,
        }
    }
}
