use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn fecarbon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fecarbon"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = fecarbon(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn report(args: &[&str]) -> Value {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    serde_json::from_str(&ok(&full)).unwrap()
}

fn exit_code(args: &[&str]) -> i32 {
    fecarbon(args).status.code().unwrap()
}

fn value(v: &Value) -> f64 {
    assert!(v["unit"].is_string(), "{v} has no unit");
    v["value"].as_f64().unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn data_file(name: &str) -> String {
    format!("{}/../core/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

/// Every number in the results sits in a `{value, unit}` pair.
fn assert_units(v: &Value) {
    match v {
        Value::Object(m) => {
            if m.contains_key("value") {
                assert!(m.get("unit").is_some_and(Value::is_string), "{v} lacks a unit");
            }
            for (k, child) in m {
                if k == "value" {
                    continue;
                }
                assert!(!child.is_number(), "bare number at `{k}` in {v}");
                assert_units(child);
            }
        }
        Value::Array(a) => a.iter().for_each(assert_units),
        _ => {}
    }
}

#[test]
fn epa_reports_fe_share_for_hzo5_and_recipe() {
    for device in ["HZO5", "Recipe"] {
        let r = report(&["epa", "--device", device]);
        let share = value(&r["results"]["fe_epa_share"]);
        assert!((0.18..=0.22).contains(&share), "{device}: {share}");
        assert_units(&r["results"]);
    }
    let recipe = report(&["epa"]);
    assert_eq!(value(&recipe["results"]["process_time"]["total"]), 17529.0);
    assert!((value(&recipe["results"]["fe_epa"]["nominal"]) - 0.26).abs() < 1e-12);
}

#[test]
fn epa_hzo7_share_is_below_the_headline_band() {
    // Thinner HZO means less deposition time, so the share sits under ~20%.
    let r = report(&["epa", "--device", "HZO7"]);
    let share = value(&r["results"]["fe_epa_share"]);
    assert!((share - 0.1631).abs() < 5e-4, "{share}");
}

#[test]
fn epa_without_samples_writes_no_file() {
    let dir = TempDir::new().unwrap();
    let samples = dir.path().join("samples.csv");
    let out = fecarbon(&["epa", "--mc-samples", "0", "--samples-out", path_str(&samples)]);
    assert!(out.status.success());
    assert!(!samples.exists());
    assert!(String::from_utf8_lossy(&out.stderr).contains("--samples-out ignored"));
}

#[test]
fn epa_samples_are_reproducible() {
    let dir = TempDir::new().unwrap();
    let run = |name: &str, seed: &str| {
        let path = dir.path().join(name);
        ok(&[
            "--seed",
            seed,
            "epa",
            "--mc-samples",
            "2000",
            "--samples-out",
            path_str(&path),
        ]);
        std::fs::read(path).unwrap()
    };
    let a = run("a.csv", "7");
    let b = run("b.csv", "7");
    let c = run("c.csv", "8");
    assert_eq!(a, b);
    assert_ne!(a, c);
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("sample,fe_epa (kWh/cm2)\n"));
    assert_eq!(text.lines().count(), 2001);
}

#[test]
fn mc_samples_need_a_seed() {
    assert_eq!(exit_code(&["epa", "--mc-samples", "10"]), 2);
}

#[test]
fn epa_rejects_devices_without_fe_layers() {
    assert_eq!(exit_code(&["epa", "--device", "SRAM"]), 2);
    assert_eq!(exit_code(&["epa", "--device", "nope"]), 2);
}

#[test]
fn cpa_examples() {
    let cmos = report(&["cpa"]);
    let base = value(&cmos["results"]["total_cpa"]);
    assert!((base - 1.3282).abs() < 1e-3);
    assert_units(&cmos["results"]);

    let hzo5 = report(&["cpa", "--device", "HZO5", "--ae", "0.95"]);
    let overhead = value(&hzo5["results"]["overhead_vs_cmos"]);
    assert!((0.105..=0.115).contains(&overhead), "{overhead}");

    let ae0 = report(&["cpa", "--device", "HZO5", "--ae", "0"]);
    assert_eq!(value(&ae0["results"]["total_cpa"]), base);
}

#[test]
fn compare_ratio_and_linearity() {
    let csv = ok(&[
        "--format",
        "csv",
        "compare",
        "--devices",
        "SRAM,HZO5",
        "--capacities",
        "2,4,8,16,32",
    ]);
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header.last(), Some(&"ratio_SRAM/HZO5 (1)"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 5);
    for r in &rows {
        let ratio = *r.last().unwrap();
        assert!((ratio / 4.3 - 1.0).abs() <= 0.05, "{ratio}");
    }
    for pair in rows.windows(2) {
        // columns: capacity, SRAM area, SRAM embodied, ...
        assert!((pair[1][2] / pair[0][2] - 2.0).abs() < 1e-12);
        assert!((pair[1][5] / pair[0][5] - 2.0).abs() < 1e-12);
    }
}

#[test]
fn compare_single_device_has_no_ratio_column() {
    let csv = ok(&[
        "--format",
        "csv",
        "compare",
        "--devices",
        "HZO5",
        "--capacities",
        "2",
    ]);
    let header = csv.lines().next().unwrap();
    assert!(!header.contains("ratio"), "{header}");
    let r = report(&["compare", "--devices", "HZO5", "--capacities", "2"]);
    assert!(r["results"]["rows"][0].get("per_mb_ratios").is_none());
}

#[test]
fn compare_from_catalog_uses_target_optimal_records() {
    let r = report(&[
        "compare",
        "--catalog",
        &data_file("design_points_2mb.csv"),
        "--capacities",
        "2",
        "--target",
        "Area",
    ]);
    let sram_area = value(&r["results"]["rows"][0]["devices"]["SRAM"]["area"]);
    assert_eq!(sram_area, 0.0240048);
    assert_eq!(r["inputs"]["catalog"]["provenance"], "user");
}

#[test]
fn lifetime_examples() {
    let r = report(&[
        "lifetime",
        "--device",
        "HZO5",
        "--endurance",
        "1e5",
        "--capacity",
        "2",
        "--write-rate",
        "1e6",
        "--width",
        "64",
    ]);
    let lt = &r["results"]["lifetime"];
    assert_eq!(lt["kind"], "days");
    assert!((value(lt) - 26_214.4).abs() < 1e-9);

    let sram = report(&[
        "lifetime",
        "--device",
        "SRAM",
        "--capacity",
        "2",
        "--write-rate",
        "1e6",
    ]);
    assert_eq!(sram["results"]["lifetime"]["kind"], "unlimited");

    let idle = report(&[
        "lifetime",
        "--device",
        "HZO5",
        "--capacity",
        "2",
        "--write-rate",
        "0",
    ]);
    assert_eq!(idle["results"]["lifetime"]["kind"], "unlimited");
}

#[test]
fn lifetime_past_rating_warns_but_does_not_clamp() {
    let out = fecarbon(&[
        "--format",
        "json",
        "lifetime",
        "--device",
        "HZO5",
        "--endurance",
        "1e5",
        "--capacity",
        "2",
        "--write-rate",
        "1e6",
        "--runtime-days",
        "52428.8",
        "--ocf-kg",
        "1",
    ]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("exceeds the rated lifetime"));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    let f = &r["results"]["total_footprint"];
    assert_eq!(f["past_rated_lifetime"], true);
    let ecf = value(&f["ecf"]);
    assert!((value(&f["total"]) - (1.0 + 2.0 * ecf)).abs() < 1e-12);
}

#[test]
fn system_packaged_sweep() {
    let out = fecarbon(&["--format", "json", "system"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("not authoritative"));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["results"]["authoritative_data"], false);
    assert_units(&r["results"]);
    let targets: Vec<&str> = r["results"]["sweep"]["comparisons"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["target"].as_str().unwrap())
        .collect();
    assert_eq!(targets, ["Area", "ReadDynamicEnergy", "ReadEDP"]);
    let area = &r["results"]["sweep"]["comparisons"][0];
    assert!((0.35..=0.50).contains(&value(&area["embodied_reduction"])));
    assert!((0.50..=0.80).contains(&value(&area["operational_reduction"])));

    let csv = ok(&["--format", "csv", "system"]);
    assert_eq!(csv.lines().count(), 7);
}

#[test]
fn sram_system_matches_cpa_components() {
    let dir = TempDir::new().unwrap();
    let mut cfg: Value =
        serde_json::from_str(&std::fs::read_to_string(data_file("edge_tpu_accelerator.json")).unwrap())
            .unwrap();
    cfg.as_object_mut().unwrap().remove("sweep");
    let path = dir.path().join("sram.json");
    std::fs::write(&path, cfg.to_string()).unwrap();

    let r = report(&["system", "--accelerator", path_str(&path)]);
    assert!(r["results"].get("sweep").is_none());
    let cmos = value(&report(&["cpa"])["results"]["total_cpa"]);
    let components = r["results"]["baseline"]["embodied"]["components"]
        .as_array()
        .unwrap();
    let mut expected = 0.0;
    for c in components {
        let area = value(&c["area"]);
        assert!((value(&c["embodied"]) - area * cmos).abs() <= 1e-15);
        expected += area * cmos;
    }
    let total = value(&r["results"]["baseline"]["embodied"]["total"]);
    assert!((total - expected).abs() <= 1e-12 * expected);
}

#[test]
fn system_missing_workload_is_exit_3() {
    let out = fecarbon(&["system", "--workload", "/definitely/not/here.json"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not/here.json"));
}

#[test]
fn calibrate_scales_powers() {
    let dir = TempDir::new().unwrap();
    let recipe: Value =
        serde_json::from_str(&std::fs::read_to_string(data_file("recipe.json")).unwrap()).unwrap();
    for (scale, expected) in [(2.0, 0.5), (1.0, 1.0), (0.5, 2.0)] {
        let mut r = recipe.clone();
        for key in ["p_preheat_w", "p_steady_w"] {
            let p = r["power"][key].as_f64().unwrap();
            r["power"][key] = (p * scale).into();
        }
        let path = dir.path().join("recipe.json");
        std::fs::write(&path, r.to_string()).unwrap();
        let out_path = dir.path().join("calibrated.json");
        let rep = report(&[
            "--recipe",
            path_str(&path),
            "calibrate",
            "--recipe-out",
            path_str(&out_path),
        ]);
        assert!((value(&rep["results"]["scale_factor"]) - expected).abs() < 1e-12);
        assert_eq!(rep["inputs"]["recipe"]["provenance"], "user");

        let again = report(&["--recipe", path_str(&out_path), "epa"]);
        assert!((value(&again["results"]["fe_epa"]["nominal"]) - 0.26).abs() < 1e-12);
    }
}

#[test]
fn calibrate_rejects_bad_target() {
    assert_eq!(exit_code(&["calibrate", "--target-epa", "0"]), 2);
}

#[test]
fn reports_replay_exactly() {
    let dir = TempDir::new().unwrap();
    let commands: [&[&str]; 6] = [
        &["--seed", "3", "epa", "--device", "HZO5", "--mc-samples", "500"],
        &["cpa", "--device", "HZO2"],
        &["compare", "--capacities", "2,8"],
        &[
            "lifetime",
            "--device",
            "HZO1",
            "--capacity",
            "4",
            "--write-rate",
            "1e7",
            "--runtime-days",
            "10",
        ],
        &["system"],
        &["calibrate", "--target-epa", "0.3"],
    ];
    for (i, args) in commands.iter().enumerate() {
        let path = dir.path().join(format!("r{i}.json"));
        let mut full = vec!["--format", "json", "--out", path_str(&path)];
        full.extend_from_slice(args);
        ok(&full);
        let original: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        let replayed = report(&["replay", path_str(&path)]);
        assert_eq!(original["results"], replayed["results"], "{args:?}");
        assert_eq!(original["inputs"], replayed["inputs"], "{args:?}");
    }
}

#[test]
fn tampered_report_fails_replay_with_exit_4() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("r.json");
    ok(&[
        "--format",
        "json",
        "--out",
        path_str(&path),
        "cpa",
        "--device",
        "HZO5",
    ]);
    let mut r: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    r["inputs"]["fab"]["value"]["carbon_intensity_kg_per_kwh"] = 0.4.into();
    std::fs::write(&path, r.to_string()).unwrap();
    assert_eq!(exit_code(&["replay", path_str(&path)]), 4);
    assert_eq!(exit_code(&["replay", "/no/such/report.json"]), 3);
}

#[test]
fn input_files_are_validated() {
    let dir = TempDir::new().unwrap();
    let fab: Value = serde_json::from_str(&std::fs::read_to_string(data_file("fab.json")).unwrap()).unwrap();

    let mut extra = fab.clone();
    extra["surprise"] = 1.into();
    let p = dir.path().join("extra.json");
    std::fs::write(&p, extra.to_string()).unwrap();
    assert_eq!(exit_code(&["--fab", path_str(&p), "cpa"]), 2);

    let mut version = fab.clone();
    version["schema_version"] = 99.into();
    std::fs::write(&p, version.to_string()).unwrap();
    assert_eq!(exit_code(&["--fab", path_str(&p), "cpa"]), 2);

    let mut bad_yield = fab;
    bad_yield["yield"] = 1.5.into();
    std::fs::write(&p, bad_yield.to_string()).unwrap();
    assert_eq!(exit_code(&["--fab", path_str(&p), "cpa"]), 2);

    let catalog = std::fs::read_to_string(data_file("design_points_2mb.csv"))
        .unwrap()
        .replacen(",0.8,", ",1.2,", 1);
    let c = dir.path().join("bad.csv");
    std::fs::write(&c, catalog).unwrap();
    let out = fecarbon(&["compare", "--catalog", path_str(&c), "--capacities", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("area_efficiency"));
}

#[test]
fn user_inputs_are_labelled() {
    let r = report(&["--fab", &data_file("fab.json"), "cpa"]);
    assert_eq!(r["inputs"]["fab"]["provenance"], "user");
    assert_eq!(r["inputs"]["ghg"]["provenance"], "paper-default");
    assert_eq!(r["inputs"]["recipe"]["provenance"], "calibrated");
    assert_eq!(r["tool"]["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn table_output_has_units_in_header() {
    let text = ok(&["compare", "--capacities", "2"]);
    assert!(text.lines().next().unwrap().contains("SRAM_area (cm2)"));
}
