//! ALD process model for the ferroelectric gate stack.
//!
//! A [`ProcessRecipe`] is a list of fixed stages (preheat, stabilization) followed by
//! one deposition stage per layer. Each stage draws either the preheat or the steady
//! tool power. Tool energy divided by usable wafer area gives the FE-layer EPA; the
//! CH₄ released by the Al₂O₃ precursor chemistry gives the FE-layer GPA.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::units::{joules_to_kwh, kwh_to_joules};
use crate::{Error, Result};

pub const HZO: &str = "HZO";
pub const AL2O3: &str = "Al2O3";

/// Published FE-layer EPA for the reference 20 nm HZO + 3 nm Al₂O₃ recipe.
pub const REFERENCE_FE_EPA_KWH_PER_CM2: f64 = 0.26;
pub const REFERENCE_HZO_NM: f64 = 20.0;
pub const REFERENCE_AL2O3_NM: f64 = 3.0;

pub const DEFAULT_PREHEAT_S: f64 = 3600.0;
pub const DEFAULT_STABILIZATION_S: f64 = 3029.0;
pub const DEFAULT_WAFER_DIAMETER_MM: f64 = 100.0;
pub const DEFAULT_FACILITY_OVERHEAD: f64 = 0.40;
pub const DEFAULT_CHAMBER_PUMP_FRACTION: f64 = 0.70;
/// 3σ = 10 % of nominal.
pub const DEFAULT_SIGMA_FRACTION: f64 = 0.10 / 3.0;
pub const DEFAULT_PREHEAT_TO_STEADY_RATIO: f64 = 1.5;

/// Layer thickness overrides keyed by layer name, in nm.
pub type LayerThicknesses = BTreeMap<String, f64>;

/// Thickness map for the usual two-layer FeFET stack.
pub fn fe_stack(hzo_nm: f64, al2o3_nm: f64) -> LayerThicknesses {
    BTreeMap::from([(HZO.to_string(), hzo_nm), (AL2O3.to_string(), al2o3_nm)])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerProcess {
    pub name: String,
    pub thickness_nm: f64,
    pub rate_nm_per_cycle: f64,
    pub cycle_s: f64,
}

impl LayerProcess {
    pub fn new(name: &str, thickness_nm: f64, rate_nm_per_cycle: f64, cycle_s: f64) -> Self {
        LayerProcess {
            name: name.to_string(),
            thickness_nm,
            rate_nm_per_cycle,
            cycle_s,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.thickness_nm >= 0.0) {
            return Err(Error::invalid(
                "thickness_nm",
                format!("layer {} has negative thickness {}", self.name, self.thickness_nm),
            ));
        }
        if !(self.rate_nm_per_cycle > 0.0) {
            return Err(Error::invalid(
                "rate_nm_per_cycle",
                format!("layer {} must have a positive deposition rate", self.name),
            ));
        }
        if !(self.cycle_s > 0.0) {
            return Err(Error::invalid(
                "cycle_s",
                format!("layer {} must have a positive cycle time", self.name),
            ));
        }
        Ok(())
    }
}

/// Deposition time in seconds: cycles needed for the thickness times the cycle time.
pub fn deposition_time(layer: &LayerProcess) -> Result<f64> {
    layer.validate()?;
    Ok(layer.thickness_nm / layer.rate_nm_per_cycle * layer.cycle_s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PowerClass {
    Preheat,
    Steady,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedStage {
    pub name: String,
    pub duration_s: f64,
    pub power_class: PowerClass,
}

impl FixedStage {
    pub fn new(name: &str, duration_s: f64, power_class: PowerClass) -> Self {
        FixedStage {
            name: name.to_string(),
            duration_s,
            power_class,
        }
    }
}

/// Nominal ALD tool power per stage class.
///
/// The nominal powers are whole-tool figures. `chamber_pump_fraction` only splits
/// reported energy into chamber/pump and other modules; it does not change EPA.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolPowerModel {
    pub p_preheat_w: f64,
    pub p_steady_w: f64,
    pub chamber_pump_fraction: f64,
    pub sigma_fraction: f64,
}

impl ToolPowerModel {
    pub fn power_w(&self, class: PowerClass) -> f64 {
        match class {
            PowerClass::Preheat => self.p_preheat_w,
            PowerClass::Steady => self.p_steady_w,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.p_preheat_w > 0.0 && self.p_steady_w > 0.0) {
            return Err(Error::invalid("power", "nominal tool powers must be positive"));
        }
        if !(0.0..=1.0).contains(&self.chamber_pump_fraction) {
            return Err(Error::invalid(
                "chamber_pump_fraction",
                format!("{} is outside [0, 1]", self.chamber_pump_fraction),
            ));
        }
        if !(self.sigma_fraction >= 0.0) {
            return Err(Error::invalid("sigma_fraction", "must be nonnegative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcessRecipe {
    pub fixed_stages: Vec<FixedStage>,
    pub layers: Vec<LayerProcess>,
    pub wafer_area_cm2: f64,
    pub facility_overhead: f64,
    pub power: ToolPowerModel,
}

impl ProcessRecipe {
    /// The reference research-fab recipe with uncalibrated nominal powers
    /// (steady 1 kW, preheat 1.5 kW).
    pub fn reference_uncalibrated() -> Self {
        let radius_cm = DEFAULT_WAFER_DIAMETER_MM / 20.0;
        ProcessRecipe {
            fixed_stages: vec![
                FixedStage::new("preheat", DEFAULT_PREHEAT_S, PowerClass::Preheat),
                FixedStage::new("stabilization", DEFAULT_STABILIZATION_S, PowerClass::Steady),
            ],
            layers: vec![
                LayerProcess::new(HZO, REFERENCE_HZO_NM, 0.2, 100.0),
                LayerProcess::new(AL2O3, REFERENCE_AL2O3_NM, 0.1, 30.0),
            ],
            wafer_area_cm2: std::f64::consts::PI * radius_cm * radius_cm,
            facility_overhead: DEFAULT_FACILITY_OVERHEAD,
            power: ToolPowerModel {
                p_preheat_w: 1000.0 * DEFAULT_PREHEAT_TO_STEADY_RATIO,
                p_steady_w: 1000.0,
                chamber_pump_fraction: DEFAULT_CHAMBER_PUMP_FRACTION,
                sigma_fraction: DEFAULT_SIGMA_FRACTION,
            },
        }
    }

    /// Reference recipe with powers scaled so the reference stack reproduces
    /// [`REFERENCE_FE_EPA_KWH_PER_CM2`].
    pub fn calibrated_reference() -> Self {
        let mut recipe = Self::reference_uncalibrated();
        let factor = calibrate_power(
            &recipe,
            REFERENCE_FE_EPA_KWH_PER_CM2,
            &fe_stack(REFERENCE_HZO_NM, REFERENCE_AL2O3_NM),
        )
        .expect("reference recipe is calibratable");
        recipe.scale_power(factor);
        recipe
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.wafer_area_cm2 > 0.0) {
            return Err(Error::invalid("wafer_area_cm2", "must be positive"));
        }
        if !(0.0..1.0).contains(&self.facility_overhead) {
            return Err(Error::invalid(
                "facility_overhead",
                format!("{} is outside [0, 1)", self.facility_overhead),
            ));
        }
        if self.fixed_stages.is_empty() && self.layers.is_empty() {
            return Err(Error::invalid("recipe", "needs at least one stage or layer"));
        }
        for stage in &self.fixed_stages {
            if !(stage.duration_s >= 0.0) {
                return Err(Error::invalid(
                    "duration_s",
                    format!("stage {} has negative duration", stage.name),
                ));
            }
        }
        for layer in &self.layers {
            layer.validate()?;
        }
        self.power.validate()
    }

    pub fn layer(&self, name: &str) -> Option<&LayerProcess> {
        self.layers.iter().find(|l| l.name == name)
    }

    /// Multiplies both nominal powers by `factor`.
    pub fn scale_power(&mut self, factor: f64) {
        self.power.p_preheat_w *= factor;
        self.power.p_steady_w *= factor;
    }

    /// Usable area that carries the tool energy: the wafer area net of the
    /// facility overhead share.
    fn energy_area_cm2(&self) -> f64 {
        self.wafer_area_cm2 * (1.0 - self.facility_overhead)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StageKind {
    Fixed,
    Deposition,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimelineEntry {
    pub name: String,
    pub duration_s: f64,
    pub power_class: PowerClass,
    pub kind: StageKind,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Timeline {
    pub entries: Vec<TimelineEntry>,
}

impl Timeline {
    pub fn total_s(&self) -> f64 {
        self.entries.iter().map(|e| e.duration_s).sum()
    }

    pub fn fixed_s(&self) -> f64 {
        self.entries
            .iter()
            .filter(|e| e.kind == StageKind::Fixed)
            .map(|e| e.duration_s)
            .sum()
    }

    /// Tool energy in joules at nominal power.
    pub fn energy_j(&self, power: &ToolPowerModel) -> f64 {
        self.entries
            .iter()
            .map(|e| e.duration_s * power.power_w(e.power_class))
            .sum()
    }

    fn energy_with(&self, mut power_of: impl FnMut(usize, &TimelineEntry) -> f64) -> f64 {
        self.entries
            .iter()
            .enumerate()
            .map(|(i, e)| e.duration_s * power_of(i, e))
            .sum()
    }
}

/// Ordered stage list: fixed stages first, then one deposition stage per recipe layer.
///
/// Layers missing from `thicknesses` keep the recipe thickness.
pub fn stage_timeline(recipe: &ProcessRecipe, thicknesses: &LayerThicknesses) -> Result<Timeline> {
    for (name, &t) in thicknesses {
        if recipe.layer(name).is_none() {
            return Err(Error::Schema(format!("unknown layer `{name}` in thickness map")));
        }
        if !(t >= 0.0) {
            return Err(Error::invalid(
                "thickness_nm",
                format!("layer {name} has negative thickness {t}"),
            ));
        }
    }

    let mut entries = Vec::with_capacity(recipe.fixed_stages.len() + recipe.layers.len());
    for stage in &recipe.fixed_stages {
        entries.push(TimelineEntry {
            name: stage.name.clone(),
            duration_s: stage.duration_s,
            power_class: stage.power_class,
            kind: StageKind::Fixed,
        });
    }
    for layer in &recipe.layers {
        let mut layer = layer.clone();
        if let Some(&t) = thicknesses.get(&layer.name) {
            layer.thickness_nm = t;
        }
        entries.push(TimelineEntry {
            duration_s: deposition_time(&layer)?,
            name: format!("{} deposition", layer.name),
            power_class: PowerClass::Steady,
            kind: StageKind::Deposition,
        });
    }
    Ok(Timeline { entries })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonteCarlo {
    pub samples: usize,
    pub seed: u64,
}

/// FE-layer EPA, nominal and (optionally) sampled under tool-power uncertainty.
/// All values in kWh/cm².
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpaDistribution {
    pub nominal: f64,
    pub samples: Vec<f64>,
    pub mean: f64,
    pub std: f64,
    /// Standard deviation propagated analytically from the per-stage power σ.
    pub propagated_std: f64,
    pub seed: Option<u64>,
}

/// FE-layer EPA for the given layer thicknesses.
///
/// Each Monte Carlo sample perturbs the power of every stage independently with a
/// Gaussian of σ = `sigma_fraction` × nominal, clamped at zero. Sample `i` uses its
/// own ChaCha stream derived from `(seed, i)`, so the sample list does not depend on
/// how the work is split across threads.
pub fn epa_fe_layer(
    recipe: &ProcessRecipe,
    thicknesses: &LayerThicknesses,
    mc: Option<MonteCarlo>,
) -> Result<EpaDistribution> {
    recipe.validate()?;
    let timeline = stage_timeline(recipe, thicknesses)?;
    let area = recipe.energy_area_cm2();
    let to_epa = |joules: f64| joules_to_kwh(joules / area);

    let nominal = to_epa(timeline.energy_j(&recipe.power));
    let sigma = recipe.power.sigma_fraction;
    let propagated_var: f64 = timeline
        .entries
        .iter()
        .map(|e| {
            let s = e.duration_s * recipe.power.power_w(e.power_class) * sigma;
            s * s
        })
        .sum();
    let propagated_std = to_epa(propagated_var.sqrt());

    let Some(mc) = mc.filter(|mc| mc.samples > 0) else {
        return Ok(EpaDistribution {
            nominal,
            samples: Vec::new(),
            mean: nominal,
            std: 0.0,
            propagated_std,
            seed: mc.map(|mc| mc.seed),
        });
    };

    let samples: Vec<f64> = (0..mc.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(mc.seed);
            rng.set_stream(i as u64);
            to_epa(timeline.energy_with(|_, e| {
                let z: f64 = rng.sample(StandardNormal);
                let p = recipe.power.power_w(e.power_class);
                (p + sigma * p * z).max(0.0)
            }))
        })
        .collect();

    let (mean, std) = mean_std(&samples);
    Ok(EpaDistribution {
        nominal,
        samples,
        mean,
        std,
        propagated_std,
        seed: Some(mc.seed),
    })
}

/// Sample mean and (N-1) standard deviation.
fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Split of nominal tool energy into chamber/pump and other modules, in kWh/cm².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToolEnergySplit {
    pub chamber_pump: f64,
    pub other_modules: f64,
}

pub fn tool_energy_split(recipe: &ProcessRecipe, thicknesses: &LayerThicknesses) -> Result<ToolEnergySplit> {
    let epa = epa_fe_layer(recipe, thicknesses, None)?.nominal;
    let f = recipe.power.chamber_pump_fraction;
    Ok(ToolEnergySplit {
        chamber_pump: epa * f,
        other_modules: epa * (1.0 - f),
    })
}

/// Factor by which both nominal powers must be scaled so the nominal FE-layer EPA
/// equals `target_epa_kwh_per_cm2`.
pub fn calibrate_power(
    recipe: &ProcessRecipe,
    target_epa_kwh_per_cm2: f64,
    thicknesses: &LayerThicknesses,
) -> Result<f64> {
    if !(target_epa_kwh_per_cm2 > 0.0) {
        return Err(Error::invalid("target_epa", "must be positive"));
    }
    recipe.validate()?;
    let timeline = stage_timeline(recipe, thicknesses)?;
    let energy = timeline.energy_j(&recipe.power);
    if !(timeline.total_s() > 0.0 && energy > 0.0) {
        return Err(Error::CalibrationImpossible(
            "timeline has zero duration or zero energy".into(),
        ));
    }
    let target_j = kwh_to_joules(target_epa_kwh_per_cm2) * recipe.energy_area_cm2();
    Ok(target_j / energy)
}

/// CH₄ emission model for the Al₂O₃ deposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GhgModel {
    /// µg CH₄ per nm of Al₂O₃ per cm².
    pub ghg_rate_ug_per_nm_cm2: f64,
    /// kg CO₂e per kg CH₄.
    pub gwp: f64,
    pub destruction_efficiency: f64,
}

impl Default for GhgModel {
    fn default() -> Self {
        GhgModel {
            ghg_rate_ug_per_nm_cm2: 26.9,
            gwp: 28.0,
            destruction_efficiency: 0.9,
        }
    }
}

impl GhgModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.ghg_rate_ug_per_nm_cm2 >= 0.0) {
            return Err(Error::invalid("ghg_rate_ug_per_nm_cm2", "must be nonnegative"));
        }
        if !(self.gwp >= 0.0) {
            return Err(Error::invalid("gwp", "must be nonnegative"));
        }
        if !(0.0..=1.0).contains(&self.destruction_efficiency) {
            return Err(Error::invalid(
                "destruction_efficiency",
                format!("{} is outside [0, 1]", self.destruction_efficiency),
            ));
        }
        Ok(())
    }
}

/// CH₄ mass per area in µg/cm².
pub fn ch4_mass(al2o3_nm: f64, ghg: &GhgModel) -> Result<f64> {
    if !(al2o3_nm >= 0.0) {
        return Err(Error::invalid("al2o3_thickness_nm", "must be nonnegative"));
    }
    ghg.validate()?;
    Ok(ghg.ghg_rate_ug_per_nm_cm2 * al2o3_nm)
}

/// FE-layer GPA in µg CO₂e/cm². CH₄ is the only gas modelled.
pub fn gpa_fe_layer(al2o3_nm: f64, ghg: &GhgModel) -> Result<f64> {
    let mass = ch4_mass(al2o3_nm, ghg)?;
    Ok(ghg.gwp * mass * (1.0 - ghg.destruction_efficiency))
}
