//! Accelerator-level carbon: buffers plus a compute array.
//!
//! Buffer areas and energies come from catalog design points; the compute array
//! is a single area and energy-per-MAC figure. Embodied carbon is area × CPA per
//! component, operational carbon is per inference.

use serde::{Deserialize, Serialize};

use crate::catalog::{Catalog, MemoryDesignPoint, OptTarget};
use crate::embodied::{embodied_carbon, DeviceLibrary, DeviceSpec, EmbodiedModel};
use crate::lifecycle::{lifetime, Lifetime, WritePattern};
use crate::units::{joules_to_kwh, JOULES_PER_PJ, WATTS_PER_MW};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BufferRole {
    Weight,
    Io,
}

impl BufferRole {
    pub fn as_str(self) -> &'static str {
        match self {
            BufferRole::Weight => "weight",
            BufferRole::Io => "io",
        }
    }
}

impl std::fmt::Display for BufferRole {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A buffer and the catalog design point it resolves to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BufferSpec {
    pub role: BufferRole,
    pub device: String,
    pub capacity_bits: u64,
    pub opt_target: OptTarget,
}

/// Replace one buffer's device and target across a grid of alternatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BufferSweep {
    pub role: BufferRole,
    /// First entry is the baseline the others are compared against.
    pub devices: Vec<String>,
    pub targets: Vec<OptTarget>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcceleratorConfig {
    pub name: String,
    pub compute_area_cm2: f64,
    pub compute_energy_per_mac_pj: f64,
    pub pe_rows: u32,
    pub pe_cols: u32,
    pub buffers: Vec<BufferSpec>,
    pub sweep: Option<BufferSweep>,
    /// False for illustrative datasets.
    pub authoritative: bool,
}

impl AcceleratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.compute_area_cm2 > 0.0) {
            return Err(Error::invalid("compute_area_cm2", "must be positive"));
        }
        if !(self.compute_energy_per_mac_pj >= 0.0) {
            return Err(Error::invalid("compute_energy_per_mac_pj", "must be nonnegative"));
        }
        if self.pe_rows == 0 || self.pe_cols == 0 {
            return Err(Error::invalid(
                "pe_rows/pe_cols",
                "array dimensions must be positive",
            ));
        }
        for (i, b) in self.buffers.iter().enumerate() {
            if self.buffers[..i].iter().any(|o| o.role == b.role) {
                return Err(Error::Schema(format!("buffer role `{}` listed twice", b.role)));
            }
        }
        if let Some(sweep) = &self.sweep {
            if !self.buffers.iter().any(|b| b.role == sweep.role) {
                return Err(Error::Schema(format!(
                    "sweep role `{}` has no buffer",
                    sweep.role
                )));
            }
            if sweep.devices.is_empty() || sweep.targets.is_empty() {
                return Err(Error::Schema(
                    "sweep needs at least one device and one target".into(),
                ));
            }
        }
        Ok(())
    }

    /// Copy of the config with the buffer in `role` switched to `device` / `target`.
    pub fn with_buffer(&self, role: BufferRole, device: &str, target: OptTarget) -> Self {
        let mut cfg = self.clone();
        for b in cfg.buffers.iter_mut().filter(|b| b.role == role) {
            b.device = device.to_string();
            b.opt_target = target;
        }
        cfg.sweep = None;
        cfg
    }
}

/// Per-inference traffic of one buffer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BufferTraffic {
    pub role: BufferRole,
    pub reads: f64,
    pub writes: f64,
}

/// Workload summary (counts and time, not a trace).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkloadProfile {
    pub name: String,
    pub mac_count: f64,
    pub buffers: Vec<BufferTraffic>,
    pub execution_time_s: f64,
    pub inferences_per_day: f64,
    pub authoritative: bool,
}

impl WorkloadProfile {
    pub fn validate(&self) -> Result<()> {
        if !(self.execution_time_s > 0.0) {
            return Err(Error::invalid("execution_time_s", "must be positive"));
        }
        if !(self.mac_count >= 0.0 && self.inferences_per_day >= 0.0) {
            return Err(Error::invalid("workload", "counts must be nonnegative"));
        }
        for (i, t) in self.buffers.iter().enumerate() {
            if !(t.reads >= 0.0 && t.writes >= 0.0) {
                return Err(Error::invalid(
                    "workload",
                    format!("buffer {} has negative access counts", t.role),
                ));
            }
            if self.buffers[..i].iter().any(|o| o.role == t.role) {
                return Err(Error::Schema(format!("traffic for `{}` listed twice", t.role)));
            }
        }
        Ok(())
    }

    pub fn traffic(&self, role: BufferRole) -> (f64, f64) {
        self.buffers
            .iter()
            .find(|t| t.role == role)
            .map_or((0.0, 0.0), |t| (t.reads, t.writes))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedBuffer<'a> {
    pub role: BufferRole,
    pub device: &'a DeviceSpec,
    pub point: &'a MemoryDesignPoint,
}

pub fn resolve_buffers<'a>(
    config: &AcceleratorConfig,
    catalog: &'a Catalog,
    devices: &'a DeviceLibrary,
) -> Result<Vec<ResolvedBuffer<'a>>> {
    config
        .buffers
        .iter()
        .map(|b| {
            let not_found = |e: Error| Error::NotFound(format!("{} buffer: {e}", b.role));
            let device = devices.get(&b.device).map_err(not_found)?;
            let point = catalog
                .select(&b.device, b.capacity_bits, b.opt_target)
                .map_err(not_found)?;
            Ok(ResolvedBuffer {
                role: b.role,
                device,
                point,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentEmbodied {
    pub component: String,
    pub device: Option<String>,
    pub area_cm2: f64,
    pub cpa_kg_per_cm2: f64,
    pub embodied_kg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbodiedSection {
    pub components: Vec<ComponentEmbodied>,
    pub total_area_cm2: f64,
    pub total_kg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BufferOperational {
    pub role: BufferRole,
    pub dynamic_kg: f64,
    pub leakage_kg: f64,
    pub total_kg: f64,
}

/// Per-inference operational carbon, kg CO₂e.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperationalSection {
    pub buffers: Vec<BufferOperational>,
    pub dynamic_kg: f64,
    pub leakage_kg: f64,
    pub compute_kg: f64,
    pub buffers_total_kg: f64,
    pub total_kg: f64,
    pub ci_kg_per_kwh: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BufferLifetime {
    pub role: BufferRole,
    pub device: String,
    pub lifetime: Lifetime,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemCarbonReport {
    pub config_name: String,
    pub workload_name: String,
    pub embodied: EmbodiedSection,
    pub operational: OperationalSection,
    pub lifetimes: Vec<BufferLifetime>,
    /// Buffer that wears out first, if any buffer is endurance-limited.
    pub limiting_buffer: Option<BufferLifetime>,
    pub authoritative_data: bool,
}

/// Embodied carbon per component: compute array and SRAM buffers at CMOS CPA,
/// FeFET buffers at their FeFET CPA for the design point's area efficiency.
pub fn system_embodied(
    config: &AcceleratorConfig,
    model: &EmbodiedModel,
    catalog: &Catalog,
    devices: &DeviceLibrary,
) -> Result<EmbodiedSection> {
    config.validate()?;
    let cmos = model.cmos_cpa()?.total_cpa;
    let mut components = vec![ComponentEmbodied {
        component: "compute".into(),
        device: None,
        area_cm2: config.compute_area_cm2,
        cpa_kg_per_cm2: cmos,
        embodied_kg: embodied_carbon(config.compute_area_cm2, cmos)?,
    }];
    for b in resolve_buffers(config, catalog, devices)? {
        let cpa = model.device_cpa(b.device, b.point.area_efficiency)?.total_cpa;
        components.push(ComponentEmbodied {
            component: format!("{} buffer", b.role),
            device: Some(b.device.name.clone()),
            area_cm2: b.point.area,
            cpa_kg_per_cm2: cpa,
            embodied_kg: embodied_carbon(b.point.area, cpa)?,
        });
    }
    Ok(EmbodiedSection {
        total_area_cm2: components.iter().map(|c| c.area_cm2).sum(),
        total_kg: components.iter().map(|c| c.embodied_kg).sum(),
        components,
    })
}

/// Per-inference operational carbon: buffer accesses × energy per access, leakage
/// over the execution time, and MACs × energy per MAC.
pub fn per_inference_operational(
    config: &AcceleratorConfig,
    workload: &WorkloadProfile,
    catalog: &Catalog,
    devices: &DeviceLibrary,
    ci_kg_per_kwh: f64,
) -> Result<OperationalSection> {
    config.validate()?;
    workload.validate()?;
    for t in &workload.buffers {
        if !config.buffers.iter().any(|b| b.role == t.role) {
            return Err(Error::Schema(format!(
                "workload has traffic for `{}` but the accelerator has no such buffer",
                t.role
            )));
        }
    }
    let to_kg = |joules: f64| joules_to_kwh(joules) * ci_kg_per_kwh;

    let mut buffers = Vec::new();
    for b in resolve_buffers(config, catalog, devices)? {
        let (reads, writes) = workload.traffic(b.role);
        let dynamic_j = (reads * b.point.read_energy + writes * b.point.write_energy) * JOULES_PER_PJ;
        let leakage_j = b.point.leakage_power * WATTS_PER_MW * workload.execution_time_s;
        let dynamic_kg = to_kg(dynamic_j);
        let leakage_kg = to_kg(leakage_j);
        buffers.push(BufferOperational {
            role: b.role,
            dynamic_kg,
            leakage_kg,
            total_kg: dynamic_kg + leakage_kg,
        });
    }
    let compute_kg = to_kg(workload.mac_count * config.compute_energy_per_mac_pj * JOULES_PER_PJ);
    let dynamic_kg: f64 = buffers.iter().map(|b| b.dynamic_kg).sum();
    let leakage_kg: f64 = buffers.iter().map(|b| b.leakage_kg).sum();
    let buffers_total_kg: f64 = buffers.iter().map(|b| b.total_kg).sum();
    Ok(OperationalSection {
        buffers,
        dynamic_kg,
        leakage_kg,
        compute_kg,
        total_kg: buffers_total_kg + compute_kg,
        buffers_total_kg,
        ci_kg_per_kwh,
    })
}

/// Wear-out lifetime of every buffer, with writes per day = writes per
/// inference × inferences per day.
pub fn buffer_lifetimes(
    config: &AcceleratorConfig,
    workload: &WorkloadProfile,
    catalog: &Catalog,
    devices: &DeviceLibrary,
) -> Result<Vec<BufferLifetime>> {
    workload.validate()?;
    resolve_buffers(config, catalog, devices)?
        .into_iter()
        .map(|b| {
            let (_, writes) = workload.traffic(b.role);
            let pattern = WritePattern {
                writes_per_day: writes * workload.inferences_per_day,
                access_width_bits: b.point.data_width as f64,
                capacity_bits: b.point.capacity as f64,
            };
            Ok(BufferLifetime {
                role: b.role,
                device: b.device.name.clone(),
                lifetime: lifetime(b.device.endurance_cycles, &pattern)?,
            })
        })
        .collect()
}

/// Lifetime of the weight buffer.
pub fn weight_buffer_lifetime(
    config: &AcceleratorConfig,
    workload: &WorkloadProfile,
    catalog: &Catalog,
    devices: &DeviceLibrary,
) -> Result<Lifetime> {
    buffer_lifetimes(config, workload, catalog, devices)?
        .into_iter()
        .find(|b| b.role == BufferRole::Weight)
        .map(|b| b.lifetime)
        .ok_or_else(|| Error::NotFound("weight buffer".into()))
}

pub fn evaluate(
    config: &AcceleratorConfig,
    workload: &WorkloadProfile,
    model: &EmbodiedModel,
    catalog: &Catalog,
    devices: &DeviceLibrary,
) -> Result<SystemCarbonReport> {
    let embodied = system_embodied(config, model, catalog, devices)?;
    let operational = per_inference_operational(
        config,
        workload,
        catalog,
        devices,
        model.fab.carbon_intensity_kg_per_kwh,
    )?;
    let lifetimes = buffer_lifetimes(config, workload, catalog, devices)?;
    let limiting_buffer = lifetimes
        .iter()
        .filter_map(|b| b.lifetime.days().map(|d| (d, b)))
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, b)| b.clone());
    Ok(SystemCarbonReport {
        config_name: config.name.clone(),
        workload_name: workload.name.clone(),
        embodied,
        operational,
        lifetimes,
        limiting_buffer,
        authoritative_data: config.authoritative && workload.authoritative,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub device: String,
    pub target: OptTarget,
    pub report: SystemCarbonReport,
}

/// Relative reductions of a candidate scenario against the baseline device at
/// the same target (positive = candidate is lower).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwapComparison {
    pub target: OptTarget,
    pub baseline_device: String,
    pub candidate_device: String,
    pub area_reduction: f64,
    pub embodied_reduction: f64,
    pub operational_reduction: f64,
    pub buffers_only_operational_reduction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub role: BufferRole,
    pub scenarios: Vec<ScenarioResult>,
    pub comparisons: Vec<SwapComparison>,
}

/// Evaluates every (device, target) combination of the config's sweep.
pub fn evaluate_sweep(
    config: &AcceleratorConfig,
    workload: &WorkloadProfile,
    model: &EmbodiedModel,
    catalog: &Catalog,
    devices: &DeviceLibrary,
) -> Result<SweepResult> {
    config.validate()?;
    let sweep = config
        .sweep
        .as_ref()
        .ok_or_else(|| Error::Schema("accelerator config has no sweep".into()))?;
    let mut scenarios = Vec::new();
    for &target in &sweep.targets {
        for device in &sweep.devices {
            let cfg = config.with_buffer(sweep.role, device, target);
            scenarios.push(ScenarioResult {
                device: device.clone(),
                target,
                report: evaluate(&cfg, workload, model, catalog, devices)?,
            });
        }
    }

    let reduction = |base: f64, cand: f64| if base > 0.0 { 1.0 - cand / base } else { 0.0 };
    let baseline = &sweep.devices[0];
    let mut comparisons = Vec::new();
    for &target in &sweep.targets {
        let find = |d: &str| {
            scenarios
                .iter()
                .find(|s| s.target == target && s.device == d)
                .map(|s| &s.report)
                .expect("scenario evaluated above")
        };
        let base = find(baseline);
        for device in &sweep.devices[1..] {
            let cand = find(device);
            comparisons.push(SwapComparison {
                target,
                baseline_device: baseline.clone(),
                candidate_device: device.clone(),
                area_reduction: reduction(base.embodied.total_area_cm2, cand.embodied.total_area_cm2),
                embodied_reduction: reduction(base.embodied.total_kg, cand.embodied.total_kg),
                operational_reduction: reduction(base.operational.total_kg, cand.operational.total_kg),
                buffers_only_operational_reduction: reduction(
                    base.operational.buffers_total_kg,
                    cand.operational.buffers_total_kg,
                ),
            });
        }
    }
    Ok(SweepResult {
        role: sweep.role,
        scenarios,
        comparisons,
    })
}
