use std::path::PathBuf;

use fecarbon::embodied::embodied_per_mb;
use fecarbon::lifecycle::{embodied_per_write, lifetime, total_cf, Lifetime, WritePattern};
use fecarbon::recipe::{
    calibrate_power, epa_fe_layer, fe_stack, stage_timeline, tool_energy_split, MonteCarlo,
};
use fecarbon::schema::{self, RecipeFile};
use fecarbon::system::{
    evaluate, evaluate_sweep, BufferLifetime, EmbodiedSection, OperationalSection, SystemCarbonReport,
};
use fecarbon::units::BITS_PER_MB;
use serde_json::{json, Value};

use crate::args::{CalibrateArgs, Command, CompareArgs, CpaArgs, EpaArgs, LifetimeArgs};
use crate::error::{CliError, CliResult};
use crate::inputs::Resolved;
use crate::report::{q, Cell, Table};

const KWH_CM2: &str = "kWh/cm2";
const KG_CM2: &str = "kg CO2e/cm2";
const KG: &str = "kg CO2e";
const KG_INF: &str = "kg CO2e/inference";

/// What a command produced: structured results, the plot-ready table, warnings
/// and any side files requested by flags.
pub struct Outcome {
    pub results: Value,
    pub table: Table,
    pub warnings: Vec<String>,
    pub files: Vec<(PathBuf, String)>,
}

impl Outcome {
    fn new(results: Value, table: Table) -> Self {
        Outcome {
            results,
            table,
            warnings: Vec::new(),
            files: Vec::new(),
        }
    }
}

pub fn execute(command: &Command, seed: Option<u64>, inputs: &Resolved) -> CliResult<Outcome> {
    match command {
        Command::Epa(a) => epa(a, seed, inputs),
        Command::Cpa(a) => cpa(a, inputs),
        Command::Compare(a) => compare(a, inputs),
        Command::Lifetime(a) => lifetime_cmd(a, inputs),
        Command::System(_) => system(inputs),
        Command::Calibrate(a) => calibrate(a, inputs),
        Command::Replay(_) => Err(CliError::Validation(
            "a replay cannot be nested in a report".into(),
        )),
    }
}

fn rel_diff(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn epa(a: &EpaArgs, seed: Option<u64>, r: &Resolved) -> CliResult<Outcome> {
    let mc = match (a.mc_samples, seed) {
        (0, _) => None,
        (samples, Some(seed)) => Some(MonteCarlo { samples, seed }),
        (_, None) => {
            return Err(CliError::Validation(
                "--seed is required when --mc-samples > 0".into(),
            ));
        }
    };
    let device = r.devices.get(&a.device)?;
    if !device.is_fefet {
        return Err(CliError::Validation(format!(
            "device {} has no ferroelectric layers",
            device.name
        )));
    }
    let recipe = &r.model.recipe;
    let stack = fe_stack(device.hzo_thickness_nm, device.al2o3_thickness_nm);
    let timeline = stage_timeline(recipe, &stack)?;
    let dist = epa_fe_layer(recipe, &stack, mc)?;
    let split = tool_energy_split(recipe, &stack)?;
    let breakdown = r.model.device_cpa(device, a.ae)?;

    let results = json!({
        "device": device.name,
        "area_efficiency": q(a.ae, "1"),
        "hzo_thickness": q(device.hzo_thickness_nm, "nm"),
        "al2o3_thickness": q(device.al2o3_thickness_nm, "nm"),
        "process_time": {
            "total": q(timeline.total_s(), "s"),
            "fixed_stages": q(timeline.fixed_s(), "s"),
            "deposition": q(timeline.total_s() - timeline.fixed_s(), "s"),
        },
        "fe_epa": {
            "nominal": q(dist.nominal, KWH_CM2),
            "mean": q(dist.mean, KWH_CM2),
            "std": q(dist.std, KWH_CM2),
            "propagated_std": q(dist.propagated_std, KWH_CM2),
            "samples": q(dist.samples.len() as f64, "count"),
        },
        "tool_energy_split": {
            "chamber_pump": q(split.chamber_pump, KWH_CM2),
            "other_modules": q(split.other_modules, KWH_CM2),
        },
        "cmos_epa": q(r.model.fab.epa_cmos_kwh_per_cm2, KWH_CM2),
        "fefet_epa_total": q(breakdown.epa_total, KWH_CM2),
        "fe_epa_share": q(breakdown.fe_epa_share, "1"),
    });

    let mut table = Table::quantities();
    table.push_quantity("process_time", timeline.total_s(), "s");
    table.push_quantity("fe_epa_nominal", dist.nominal, KWH_CM2);
    if !dist.samples.is_empty() {
        table.push_quantity("fe_epa_mean", dist.mean, KWH_CM2);
        table.push_quantity("fe_epa_std", dist.std, KWH_CM2);
    }
    table.push_quantity("fe_epa_propagated_std", dist.propagated_std, KWH_CM2);
    table.push_quantity("chamber_pump_epa", split.chamber_pump, KWH_CM2);
    table.push_quantity("other_modules_epa", split.other_modules, KWH_CM2);
    table.push_quantity("cmos_epa", r.model.fab.epa_cmos_kwh_per_cm2, KWH_CM2);
    table.push_quantity("fefet_epa_total", breakdown.epa_total, KWH_CM2);
    table.push_quantity("fe_epa_share", breakdown.fe_epa_share, "1");

    let mut out = Outcome::new(results, table);
    match (&a.samples_out, dist.samples.is_empty()) {
        (Some(path), false) => out.files.push((path.clone(), samples_csv(&dist.samples))),
        (Some(_), true) => out
            .warnings
            .push("no samples drawn; --samples-out ignored".into()),
        (None, _) => {}
    }
    Ok(out)
}

fn samples_csv(samples: &[f64]) -> String {
    let mut t = Table::new(&[("sample", "-"), ("fe_epa", KWH_CM2)]);
    for (i, s) in samples.iter().enumerate() {
        t.push(vec![Cell::Text(i.to_string()), (*s).into()]);
    }
    t.to_csv()
}

fn cpa(a: &CpaArgs, r: &Resolved) -> CliResult<Outcome> {
    let cmos = r.model.cmos_cpa()?;
    let (name, b) = match &a.device {
        Some(d) => (d.as_str(), r.model.device_cpa(r.devices.get(d)?, a.ae)?),
        None => ("CMOS", cmos.clone()),
    };
    let overhead = b.total_cpa / cmos.total_cpa - 1.0;
    let results = json!({
        "device": name,
        "area_efficiency": q(a.ae, "1"),
        "energy_term": q(b.energy_term, KG_CM2),
        "gas_term": q(b.gas_term, KG_CM2),
        "material_term": q(b.material_term, KG_CM2),
        "yield": q(b.yield_fraction, "1"),
        "total_cpa": q(b.total_cpa, KG_CM2),
        "epa_total": q(b.epa_total, KWH_CM2),
        "fe_epa_share": q(b.fe_epa_share, "1"),
        "cmos_cpa": q(cmos.total_cpa, KG_CM2),
        "overhead_vs_cmos": q(overhead, "1"),
    });
    let mut table = Table::quantities();
    table.push_quantity("energy_term", b.energy_term, KG_CM2);
    table.push_quantity("gas_term", b.gas_term, KG_CM2);
    table.push_quantity("material_term", b.material_term, KG_CM2);
    table.push_quantity("yield", b.yield_fraction, "1");
    table.push_quantity("total_cpa", b.total_cpa, KG_CM2);
    table.push_quantity("epa_total", b.epa_total, KWH_CM2);
    table.push_quantity("fe_epa_share", b.fe_epa_share, "1");
    table.push_quantity("overhead_vs_cmos", overhead, "1");
    Ok(Outcome::new(results, table))
}

struct ArrayPoint {
    area: f64,
    cpa: f64,
    embodied: f64,
    per_mb: f64,
}

fn compare(a: &CompareArgs, r: &Resolved) -> CliResult<Outcome> {
    if a.devices.is_empty() || a.capacities.is_empty() {
        return Err(CliError::Validation(
            "compare needs at least one device and one capacity".into(),
        ));
    }
    let devices = a
        .devices
        .iter()
        .map(|d| r.devices.get(d))
        .collect::<fecarbon::Result<Vec<_>>>()?;

    let point = |device: &fecarbon::embodied::DeviceSpec, mb: f64| -> CliResult<ArrayPoint> {
        if !(mb > 0.0) {
            return Err(CliError::Validation(format!("capacity {mb} MB must be positive")));
        }
        let bits = mb * BITS_PER_MB;
        let (area, cpa) = match &r.catalog {
            Some(catalog) => {
                if bits.fract() != 0.0 {
                    return Err(CliError::Validation(format!(
                        "{mb} MB is not a whole number of bits"
                    )));
                }
                let dp = catalog.select(&device.name, bits as u64, a.target)?;
                (dp.area, r.model.device_cpa(device, dp.area_efficiency)?.total_cpa)
            }
            None => {
                let arr = r.model.first_order_embodied(device, bits, a.ae)?;
                (arr.area_cm2, arr.cpa.total_cpa)
            }
        };
        Ok(ArrayPoint {
            area,
            cpa,
            embodied: area * cpa,
            per_mb: embodied_per_mb(bits, area, cpa)?,
        })
    };

    let mut columns = vec![("capacity".to_string(), "MB".to_string())];
    for d in &a.devices {
        columns.push((format!("{d}_area"), "cm2".into()));
        columns.push((format!("{d}_embodied"), KG.into()));
        columns.push((format!("{d}_per_mb"), "kg CO2e/MB".into()));
    }
    let ratio_names: Vec<String> = a.devices[1..]
        .iter()
        .map(|d| format!("{}/{d}", a.devices[0]))
        .collect();
    for name in &ratio_names {
        columns.push((format!("ratio_{name}"), "1".into()));
    }
    let mut table = Table {
        columns,
        rows: Vec::new(),
    };

    let mut rows = Vec::new();
    for &mb in &a.capacities {
        let points = devices
            .iter()
            .map(|d| point(d, mb))
            .collect::<CliResult<Vec<_>>>()?;
        let mut cells = vec![Cell::Num(mb)];
        let mut per_device = serde_json::Map::new();
        for (name, p) in a.devices.iter().zip(&points) {
            cells.extend([p.area.into(), p.embodied.into(), p.per_mb.into()]);
            per_device.insert(
                name.clone(),
                json!({
                    "area": q(p.area, "cm2"),
                    "cpa": q(p.cpa, KG_CM2),
                    "embodied": q(p.embodied, KG),
                    "per_mb": q(p.per_mb, "kg CO2e/MB"),
                }),
            );
        }
        let mut ratios = serde_json::Map::new();
        for (name, p) in ratio_names.iter().zip(&points[1..]) {
            let ratio = points[0].per_mb / p.per_mb;
            cells.push(ratio.into());
            ratios.insert(name.clone(), q(ratio, "1"));
        }
        table.push(cells);
        let mut row = json!({ "capacity": q(mb, "MB"), "devices": per_device });
        if !ratios.is_empty() {
            row["per_mb_ratios"] = Value::Object(ratios);
        }
        rows.push(row);
    }

    let results = json!({
        "target": a.target.as_str(),
        "area_model": if r.catalog.is_some() { "catalog" } else { "first-order" },
        "area_efficiency": if r.catalog.is_some() { Value::Null } else { q(a.ae, "1") },
        "rows": rows,
    });
    Ok(Outcome::new(results, table))
}

fn lifetime_json(lt: Lifetime) -> Value {
    match lt {
        Lifetime::Days(d) => json!({ "kind": "days", "value": d, "unit": "days" }),
        Lifetime::Unlimited => json!({ "kind": "unlimited" }),
    }
}

fn lifetime_cmd(a: &LifetimeArgs, r: &Resolved) -> CliResult<Outcome> {
    let device = r.devices.get(&a.device)?;
    let endurance = a.endurance.or(device.endurance_cycles);
    let capacity_bits = a.capacity * BITS_PER_MB;
    let pattern = WritePattern {
        writes_per_day: a.write_rate,
        access_width_bits: a.width as f64,
        capacity_bits,
    };
    let lt = lifetime(endurance, &pattern)?;
    let array = r.model.first_order_embodied(device, capacity_bits, a.ae)?;
    let per_write = endurance
        .map(|e| embodied_per_write(array.embodied_kg, e, &pattern))
        .transpose()?;

    let mut table = Table::quantities();
    match lt {
        Lifetime::Days(d) => {
            table.push_quantity("lifetime", d, "days");
            table.push_quantity("lifetime_years", d / 365.0, "years");
        }
        Lifetime::Unlimited => table.push(vec!["lifetime".into(), "unlimited".into(), "days".into()]),
    }
    table.push_quantity("embodied", array.embodied_kg, KG);
    if let Some(w) = per_write {
        table.push_quantity("embodied_per_write", w, "kg CO2e/write");
    }

    let mut results = json!({
        "device": device.name,
        "endurance": endurance.map_or(Value::Null, |e| q(e, "cycles")),
        "capacity": q(capacity_bits, "bits"),
        "write_rate": q(a.write_rate, "writes/day"),
        "access_width": q(a.width as f64, "bits"),
        "lifetime": lifetime_json(lt),
        "array_area": q(array.area_cm2, "cm2"),
        "embodied": q(array.embodied_kg, KG),
        "embodied_per_write": per_write.map_or(Value::Null, |w| q(w, "kg CO2e/write")),
    });

    let mut warnings = Vec::new();
    if let Some(t) = a.runtime_days {
        let cf = total_cf(a.ocf_kg, array.embodied_kg, t, lt)?;
        if cf.past_rated_lifetime {
            warnings.push(format!(
                "runtime {t} days exceeds the rated lifetime; embodied carbon is charged beyond one array"
            ));
        }
        results["total_footprint"] = json!({
            "runtime": q(t, "days"),
            "ocf": q(cf.ocf_kg, KG),
            "ecf": q(cf.ecf_kg, KG),
            "total": q(cf.total_cf_kg, KG),
            "past_rated_lifetime": cf.past_rated_lifetime,
        });
        table.push_quantity("total_footprint", cf.total_cf_kg, KG);
    }
    let mut out = Outcome::new(results, table);
    out.warnings = warnings;
    Ok(out)
}

fn embodied_json(e: &EmbodiedSection) -> Value {
    let components: Vec<Value> = e
        .components
        .iter()
        .map(|c| {
            json!({
                "component": c.component,
                "device": c.device,
                "area": q(c.area_cm2, "cm2"),
                "cpa": q(c.cpa_kg_per_cm2, KG_CM2),
                "embodied": q(c.embodied_kg, KG),
            })
        })
        .collect();
    json!({
        "components": components,
        "total_area": q(e.total_area_cm2, "cm2"),
        "total": q(e.total_kg, KG),
    })
}

fn operational_json(o: &OperationalSection) -> Value {
    let buffers: Vec<Value> = o
        .buffers
        .iter()
        .map(|b| {
            json!({
                "role": b.role.as_str(),
                "dynamic": q(b.dynamic_kg, KG_INF),
                "leakage": q(b.leakage_kg, KG_INF),
                "total": q(b.total_kg, KG_INF),
            })
        })
        .collect();
    json!({
        "buffers": buffers,
        "dynamic": q(o.dynamic_kg, KG_INF),
        "leakage": q(o.leakage_kg, KG_INF),
        "compute": q(o.compute_kg, KG_INF),
        "buffers_total": q(o.buffers_total_kg, KG_INF),
        "total": q(o.total_kg, KG_INF),
        "carbon_intensity": q(o.ci_kg_per_kwh, "kg CO2e/kWh"),
    })
}

fn buffer_lifetime_json(b: &BufferLifetime) -> Value {
    json!({ "role": b.role.as_str(), "device": b.device, "lifetime": lifetime_json(b.lifetime) })
}

fn system_json(r: &SystemCarbonReport) -> Value {
    json!({
        "config": r.config_name,
        "workload": r.workload_name,
        "embodied": embodied_json(&r.embodied),
        "operational": operational_json(&r.operational),
        "lifetimes": r.lifetimes.iter().map(buffer_lifetime_json).collect::<Vec<_>>(),
        "limiting_buffer": r.limiting_buffer.as_ref().map(buffer_lifetime_json),
        "authoritative_data": r.authoritative_data,
    })
}

/// Totals must equal the sums of their parts.
fn check_additivity(r: &SystemCarbonReport) -> CliResult<()> {
    let e: f64 = r.embodied.components.iter().map(|c| c.embodied_kg).sum();
    let b: f64 = r.operational.buffers.iter().map(|b| b.total_kg).sum();
    let checks = [
        ("embodied total", r.embodied.total_kg, e),
        ("buffers operational total", r.operational.buffers_total_kg, b),
        (
            "operational total",
            r.operational.total_kg,
            b + r.operational.compute_kg,
        ),
    ];
    for (name, total, parts) in checks {
        if rel_diff(total, parts) > 1e-12 {
            return Err(CliError::Inconsistent(format!(
                "{name} {total} != sum of parts {parts}"
            )));
        }
    }
    Ok(())
}

fn system(r: &Resolved) -> CliResult<Outcome> {
    let missing = |what: &str| CliError::Inconsistent(format!("{what} was not resolved"));
    let config = r.accelerator.as_ref().ok_or_else(|| missing("accelerator"))?;
    let workload = r.workload.as_ref().ok_or_else(|| missing("workload"))?;
    let catalog = r.catalog.as_ref().ok_or_else(|| missing("catalog"))?;

    let base = evaluate(config, workload, &r.model, catalog, &r.devices)?;
    check_additivity(&base)?;
    let mut results = json!({
        "authoritative_data": base.authoritative_data,
        "baseline": system_json(&base),
    });

    let mut table;
    if config.sweep.is_some() {
        let sweep = evaluate_sweep(config, workload, &r.model, catalog, &r.devices)?;
        table = Table::new(&[
            ("device", "-"),
            ("target", "-"),
            ("total_area", "cm2"),
            ("embodied", KG),
            ("operational", KG_INF),
            ("buffers_operational", KG_INF),
            ("compute_operational", KG_INF),
            ("embodied_reduction", "1"),
            ("operational_reduction", "1"),
            ("buffers_only_operational_reduction", "1"),
        ]);
        for s in &sweep.scenarios {
            check_additivity(&s.report)?;
            let cmp = sweep
                .comparisons
                .iter()
                .find(|c| c.target == s.target && c.candidate_device == s.device);
            let rep = &s.report;
            table.push(vec![
                s.device.clone().into(),
                s.target.as_str().into(),
                rep.embodied.total_area_cm2.into(),
                rep.embodied.total_kg.into(),
                rep.operational.total_kg.into(),
                rep.operational.buffers_total_kg.into(),
                rep.operational.compute_kg.into(),
                cmp.map(|c| c.embodied_reduction).into(),
                cmp.map(|c| c.operational_reduction).into(),
                cmp.map(|c| c.buffers_only_operational_reduction).into(),
            ]);
        }
        results["sweep"] = json!({
            "role": sweep.role.as_str(),
            "scenarios": sweep.scenarios.iter().map(|s| json!({
                "device": s.device,
                "target": s.target.as_str(),
                "report": system_json(&s.report),
            })).collect::<Vec<_>>(),
            "comparisons": sweep.comparisons.iter().map(|c| json!({
                "target": c.target.as_str(),
                "baseline_device": c.baseline_device,
                "candidate_device": c.candidate_device,
                "area_reduction": q(c.area_reduction, "1"),
                "embodied_reduction": q(c.embodied_reduction, "1"),
                "operational_reduction": q(c.operational_reduction, "1"),
                "buffers_only_operational_reduction": q(c.buffers_only_operational_reduction, "1"),
            })).collect::<Vec<_>>(),
        });
    } else {
        table = Table::new(&[
            ("component", "-"),
            ("device", "-"),
            ("area", "cm2"),
            ("cpa", KG_CM2),
            ("embodied", KG),
            ("operational", KG_INF),
        ]);
        for c in &base.embodied.components {
            let op = if c.component == "compute" {
                Some(base.operational.compute_kg)
            } else {
                base.operational
                    .buffers
                    .iter()
                    .find(|b| c.component == format!("{} buffer", b.role))
                    .map(|b| b.total_kg)
            };
            table.push(vec![
                c.component.clone().into(),
                c.device.clone().unwrap_or_else(|| "-".into()).into(),
                c.area_cm2.into(),
                c.cpa_kg_per_cm2.into(),
                c.embodied_kg.into(),
                op.into(),
            ]);
        }
    }

    let mut out = Outcome::new(results, table);
    if !base.authoritative_data {
        out.warnings.push(
            "accelerator or workload data is illustrative, not authoritative; treat results as indicative"
                .into(),
        );
    }
    Ok(out)
}

fn calibrate(a: &CalibrateArgs, r: &Resolved) -> CliResult<Outcome> {
    let mut recipe = r.model.recipe.clone();
    let stack = fe_stack(a.hzo, a.al2o3);
    let factor = calibrate_power(&recipe, a.target_epa, &stack)?;
    recipe.scale_power(factor);
    let achieved = epa_fe_layer(&recipe, &stack, None)?.nominal;
    if rel_diff(achieved, a.target_epa) > 1e-9 {
        return Err(CliError::Inconsistent(format!(
            "calibrated EPA {achieved} misses target {}",
            a.target_epa
        )));
    }
    let results = json!({
        "target_epa": q(a.target_epa, KWH_CM2),
        "hzo_thickness": q(a.hzo, "nm"),
        "al2o3_thickness": q(a.al2o3, "nm"),
        "scale_factor": q(factor, "1"),
        "p_preheat": q(recipe.power.p_preheat_w, "W"),
        "p_steady": q(recipe.power.p_steady_w, "W"),
        "achieved_epa": q(achieved, KWH_CM2),
    });
    let mut table = Table::quantities();
    table.push_quantity("scale_factor", factor, "1");
    table.push_quantity("p_preheat", recipe.power.p_preheat_w, "W");
    table.push_quantity("p_steady", recipe.power.p_steady_w, "W");
    table.push_quantity("achieved_epa", achieved, KWH_CM2);
    let mut out = Outcome::new(results, table);
    if let Some(path) = &a.recipe_out {
        out.files
            .push((path.clone(), schema::to_json::<RecipeFile>(&recipe)));
    }
    Ok(out)
}
