//! Carbon per area and embodied carbon for CMOS and FeFET memory arrays.
//!
//! FeFET EPA and GPA are the CMOS baseline plus the ferroelectric-layer terms
//! weighted by area efficiency (AE), since the FE stack is only deposited over the
//! cell array. MPA and yield are the CMOS values.

use serde::{Deserialize, Serialize};

use crate::recipe::{self, fe_stack, GhgModel, ProcessRecipe};
use crate::units::{bits_to_mb, ug_to_kg, CM_PER_NM};
use crate::{Error, Result};

pub const DEFAULT_AREA_EFFICIENCY: f64 = 0.95;

/// CMOS fab constants per cm² of die.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FabBaseline {
    pub epa_cmos_kwh_per_cm2: f64,
    pub gpa_cmos_kg_per_cm2: f64,
    pub mpa_cmos_kg_per_cm2: f64,
    pub yield_fraction: f64,
    pub carbon_intensity_kg_per_kwh: f64,
    pub node_nm: f64,
}

impl Default for FabBaseline {
    /// 28 nm baseline, Taiwan grid (583 g/kWh), Y = 0.875.
    fn default() -> Self {
        FabBaseline {
            epa_cmos_kwh_per_cm2: 0.9,
            gpa_cmos_kg_per_cm2: 0.1375,
            mpa_cmos_kg_per_cm2: 0.5,
            yield_fraction: 0.875,
            carbon_intensity_kg_per_kwh: 0.583,
            node_nm: 28.0,
        }
    }
}

impl FabBaseline {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("epa_cmos_kwh_per_cm2", self.epa_cmos_kwh_per_cm2),
            ("gpa_cmos_kg_per_cm2", self.gpa_cmos_kg_per_cm2),
            ("mpa_cmos_kg_per_cm2", self.mpa_cmos_kg_per_cm2),
            ("carbon_intensity_kg_per_kwh", self.carbon_intensity_kg_per_kwh),
            ("node_nm", self.node_nm),
        ];
        for (name, v) in positive {
            if !(v > 0.0) {
                return Err(Error::invalid(name, "must be positive"));
            }
        }
        check_yield(self.yield_fraction)
    }

    /// Feature size in cm.
    pub fn feature_cm(&self) -> f64 {
        self.node_nm * CM_PER_NM
    }
}

fn check_yield(y: f64) -> Result<()> {
    if !(y > 0.0 && y <= 1.0) {
        return Err(Error::invalid("yield", format!("{y} is outside (0, 1]")));
    }
    Ok(())
}

fn check_ae(ae: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&ae) {
        return Err(Error::invalid(
            "area_efficiency",
            format!("{ae} is outside [0, 1]"),
        ));
    }
    Ok(())
}

/// One memory technology.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceSpec {
    pub name: String,
    /// Cell area in F².
    pub cell_area_f2: f64,
    pub hzo_thickness_nm: f64,
    pub al2o3_thickness_nm: f64,
    /// Program/erase cycles; `None` means no endurance limit (SRAM).
    pub endurance_cycles: Option<f64>,
    pub read_voltage_v: Option<f64>,
    pub set_voltage_v: Option<f64>,
    pub reset_voltage_v: Option<f64>,
    pub program_pulse_ns: Option<f64>,
    pub is_fefet: bool,
}

impl DeviceSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.cell_area_f2 > 0.0) {
            return Err(Error::invalid(
                "cell_area_f2",
                format!("device {} needs a positive cell area", self.name),
            ));
        }
        if !(self.hzo_thickness_nm >= 0.0 && self.al2o3_thickness_nm >= 0.0) {
            return Err(Error::invalid(
                "thickness",
                format!("device {} has a negative layer thickness", self.name),
            ));
        }
        if let Some(e) = self.endurance_cycles {
            if !(e >= 1.0) {
                return Err(Error::invalid(
                    "endurance_cycles",
                    format!("device {} has endurance {e} < 1", self.name),
                ));
            }
        }
        if !self.is_fefet && (self.hzo_thickness_nm != 0.0 || self.al2o3_thickness_nm != 0.0) {
            return Err(Error::invalid(
                "thickness",
                format!("non-FeFET device {} cannot carry FE layers", self.name),
            ));
        }
        Ok(())
    }
}

/// Named collection of devices.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DeviceLibrary {
    devices: Vec<DeviceSpec>,
}

impl DeviceLibrary {
    pub fn new(devices: Vec<DeviceSpec>) -> Result<Self> {
        for (i, d) in devices.iter().enumerate() {
            d.validate()?;
            if devices[..i].iter().any(|o| o.name == d.name) {
                return Err(Error::Schema(format!("device `{}` defined twice", d.name)));
            }
        }
        Ok(DeviceLibrary { devices })
    }

    pub fn get(&self, name: &str) -> Result<&DeviceSpec> {
        self.devices
            .iter()
            .find(|d| d.name == name)
            .ok_or_else(|| Error::NotFound(format!("device `{name}`")))
    }

    pub fn devices(&self) -> &[DeviceSpec] {
        &self.devices
    }
}

/// Yield-normalised carbon per area and its parts (kg CO₂e/cm²).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CpaBreakdown {
    /// CI × EPA, before yield.
    pub energy_term: f64,
    pub gas_term: f64,
    pub material_term: f64,
    pub total_cpa: f64,
    /// kWh/cm².
    pub epa_total: f64,
    /// Share of `epa_total` coming from the FE layers.
    pub fe_epa_share: f64,
    pub yield_fraction: f64,
}

pub fn epa_fefet(epa_cmos: f64, epa_fe_layer: f64, ae: f64) -> Result<f64> {
    check_ae(ae)?;
    Ok(epa_cmos + epa_fe_layer * ae)
}

/// Both GPA inputs in kg CO₂e/cm².
pub fn gpa_fefet(gpa_cmos: f64, gpa_fe_layer: f64, ae: f64) -> Result<f64> {
    check_ae(ae)?;
    Ok(gpa_cmos + gpa_fe_layer * ae)
}

pub fn cpa(fab: &FabBaseline, epa_total: f64, gpa_total: f64, mpa_total: f64) -> Result<CpaBreakdown> {
    check_yield(fab.yield_fraction)?;
    let energy_term = fab.carbon_intensity_kg_per_kwh * epa_total;
    let total_cpa = (energy_term + gpa_total + mpa_total) / fab.yield_fraction;
    let fe_epa_share = if epa_total > 0.0 {
        ((epa_total - fab.epa_cmos_kwh_per_cm2) / epa_total).clamp(0.0, 1.0)
    } else {
        0.0
    };
    Ok(CpaBreakdown {
        energy_term,
        gas_term: gpa_total,
        material_term: mpa_total,
        total_cpa,
        epa_total,
        fe_epa_share,
        yield_fraction: fab.yield_fraction,
    })
}

/// First-order array area in cm²: bits × cell area / AE.
pub fn array_area(capacity_bits: f64, device: &DeviceSpec, fab: &FabBaseline, ae: f64) -> Result<f64> {
    if !(ae > 0.0 && ae <= 1.0) {
        return Err(Error::invalid(
            "area_efficiency",
            format!("{ae} is outside (0, 1]"),
        ));
    }
    if !(capacity_bits >= 0.0) {
        return Err(Error::invalid("capacity", "must be nonnegative"));
    }
    let f = fab.feature_cm();
    Ok(capacity_bits * device.cell_area_f2 * f * f / ae)
}

/// kg CO₂e.
pub fn embodied_carbon(area_cm2: f64, cpa_kg_per_cm2: f64) -> Result<f64> {
    if !(area_cm2 >= 0.0) {
        return Err(Error::invalid("area", "must be nonnegative"));
    }
    Ok(cpa_kg_per_cm2 * area_cm2)
}

/// kg CO₂e per MB (2^20 bytes).
pub fn embodied_per_mb(capacity_bits: f64, area_cm2: f64, cpa_kg_per_cm2: f64) -> Result<f64> {
    if !(capacity_bits > 0.0) {
        return Err(Error::invalid(
            "capacity",
            "per-MB carbon needs a positive capacity",
        ));
    }
    Ok(embodied_carbon(area_cm2, cpa_kg_per_cm2)? / bits_to_mb(capacity_bits))
}

/// FE-layer EPA (kWh/cm²) and GPA (kg CO₂e/cm²) for one device, before AE weighting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeLayerTerms {
    pub epa_kwh_per_cm2: f64,
    pub gpa_kg_per_cm2: f64,
}

/// Fab baseline plus the FE process models: everything needed to price a device.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbodiedModel {
    pub fab: FabBaseline,
    pub recipe: ProcessRecipe,
    pub ghg: GhgModel,
}

impl Default for EmbodiedModel {
    fn default() -> Self {
        EmbodiedModel {
            fab: FabBaseline::default(),
            recipe: ProcessRecipe::calibrated_reference(),
            ghg: GhgModel::default(),
        }
    }
}

impl EmbodiedModel {
    /// FE-layer terms for a device, with EPA scaled through its own deposition
    /// timeline. Non-FeFET devices have none.
    pub fn fe_layer(&self, device: &DeviceSpec) -> Result<FeLayerTerms> {
        device.validate()?;
        if !device.is_fefet {
            return Ok(FeLayerTerms {
                epa_kwh_per_cm2: 0.0,
                gpa_kg_per_cm2: 0.0,
            });
        }
        let stack = fe_stack(device.hzo_thickness_nm, device.al2o3_thickness_nm);
        let epa = recipe::epa_fe_layer(&self.recipe, &stack, None)?.nominal;
        let gpa = ug_to_kg(recipe::gpa_fe_layer(device.al2o3_thickness_nm, &self.ghg)?);
        Ok(FeLayerTerms {
            epa_kwh_per_cm2: epa,
            gpa_kg_per_cm2: gpa,
        })
    }

    pub fn cmos_cpa(&self) -> Result<CpaBreakdown> {
        self.fab.validate()?;
        cpa(
            &self.fab,
            self.fab.epa_cmos_kwh_per_cm2,
            self.fab.gpa_cmos_kg_per_cm2,
            self.fab.mpa_cmos_kg_per_cm2,
        )
    }

    /// CPA of a device at area efficiency `ae`. SRAM and other CMOS devices get the
    /// baseline CPA regardless of `ae`.
    pub fn device_cpa(&self, device: &DeviceSpec, ae: f64) -> Result<CpaBreakdown> {
        self.fab.validate()?;
        check_ae(ae)?;
        let fe = self.fe_layer(device)?;
        let epa = epa_fefet(self.fab.epa_cmos_kwh_per_cm2, fe.epa_kwh_per_cm2, ae)?;
        let gpa = gpa_fefet(self.fab.gpa_cmos_kg_per_cm2, fe.gpa_kg_per_cm2, ae)?;
        cpa(&self.fab, epa, gpa, self.fab.mpa_cmos_kg_per_cm2)
    }

    /// Embodied carbon (kg CO₂e) with the first-order area model.
    pub fn first_order_embodied(
        &self,
        device: &DeviceSpec,
        capacity_bits: f64,
        ae: f64,
    ) -> Result<ArrayEmbodied> {
        let area = array_area(capacity_bits, device, &self.fab, ae)?;
        let cpa = self.device_cpa(device, ae)?;
        Ok(ArrayEmbodied {
            capacity_bits,
            area_cm2: area,
            embodied_kg: embodied_carbon(area, cpa.total_cpa)?,
            cpa,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrayEmbodied {
    pub capacity_bits: f64,
    pub area_cm2: f64,
    pub cpa: CpaBreakdown,
    pub embodied_kg: f64,
}

impl ArrayEmbodied {
    pub fn per_mb_kg(&self) -> Result<f64> {
        embodied_per_mb(self.capacity_bits, self.area_cm2, self.cpa.total_cpa)
    }
}
