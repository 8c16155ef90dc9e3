use fecarbon::catalog::{per_access_carbon, Catalog, MemoryDesignPoint, OptTarget};
use fecarbon::embodied::{
    array_area, cpa, embodied_carbon, embodied_per_mb, epa_fefet, gpa_fefet, DeviceLibrary, DeviceSpec,
    EmbodiedModel, FabBaseline,
};
use fecarbon::lifecycle::{embodied_per_write, lifetime, total_cf, Lifetime, WritePattern};
use fecarbon::recipe::{
    calibrate_power, deposition_time, epa_fe_layer, fe_stack, gpa_fe_layer, GhgModel, LayerProcess,
    MonteCarlo, ProcessRecipe,
};
use fecarbon::system::{
    per_inference_operational, system_embodied, AcceleratorConfig, BufferRole, BufferSpec, BufferTraffic,
    WorkloadProfile,
};
use proptest::prelude::*;

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn fab() -> impl Strategy<Value = FabBaseline> {
    (
        0.01..5.0f64,
        0.0..1.0f64,
        0.0..2.0f64,
        0.05..=1.0f64,
        0.01..1.5f64,
        3.0..180.0f64,
    )
        .prop_map(|(epa, gpa, mpa, y, ci, node)| FabBaseline {
            epa_cmos_kwh_per_cm2: epa,
            gpa_cmos_kg_per_cm2: gpa.max(1e-6),
            mpa_cmos_kg_per_cm2: mpa.max(1e-6),
            yield_fraction: y,
            carbon_intensity_kg_per_kwh: ci,
            node_nm: node,
        })
}

fn fefet(hzo: f64, al: f64, endurance: f64) -> DeviceSpec {
    DeviceSpec {
        name: "X".into(),
        cell_area_f2: 30.0,
        hzo_thickness_nm: hzo,
        al2o3_thickness_nm: al,
        endurance_cycles: Some(endurance),
        read_voltage_v: None,
        set_voltage_v: None,
        reset_voltage_v: None,
        program_pulse_ns: None,
        is_fefet: true,
    }
}

fn sram() -> DeviceSpec {
    DeviceSpec {
        name: "SRAM".into(),
        cell_area_f2: 146.0,
        hzo_thickness_nm: 0.0,
        al2o3_thickness_nm: 0.0,
        endurance_cycles: None,
        read_voltage_v: None,
        set_voltage_v: None,
        reset_voltage_v: None,
        program_pulse_ns: None,
        is_fefet: false,
    }
}

fn pattern() -> impl Strategy<Value = WritePattern> {
    (1.0..1e9f64, 1u32..=10, 1.0..1e9f64).prop_map(|(w, width_exp, cap)| WritePattern {
        writes_per_day: w,
        access_width_bits: f64::from(1u32 << width_exp),
        capacity_bits: cap,
    })
}

fn design_point(device: &str, capacity: u64) -> impl Strategy<Value = MemoryDesignPoint> {
    let device = device.to_string();
    (
        1e-4..1.0f64,
        0.5..=1.0f64,
        (0.1..100.0f64, 0.1..1000.0f64),
        (0.0..100.0f64, 0.0..1000.0f64),
        0.0..100.0f64,
    )
        .prop_map(move |(area, ae, (rl, wl), (re, we), leak)| MemoryDesignPoint {
            device_name: device.clone(),
            capacity,
            opt_target: OptTarget::Area,
            area,
            area_efficiency: ae,
            read_latency: rl,
            write_latency: wl,
            read_energy: re,
            write_energy: we,
            leakage_power: leak,
            data_width: 64,
        })
}

fn recipe_with(wafer_area: f64) -> ProcessRecipe {
    let mut r = ProcessRecipe::calibrated_reference();
    r.wafer_area_cm2 = wafer_area;
    r
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn cpa_times_yield_is_the_unnormalised_sum(
        fab in fab(), epa in 0.0..10.0f64, gpa in 0.0..2.0f64, mpa in 0.0..2.0f64,
    ) {
        let b = cpa(&fab, epa, gpa, mpa).unwrap();
        let lhs = fab.carbon_intensity_kg_per_kwh * epa + gpa + mpa;
        prop_assert!(close(lhs, b.total_cpa * fab.yield_fraction, 1e-12));
        prop_assert!(close(b.total_cpa, (b.energy_term + b.gas_term + b.material_term) / b.yield_fraction, 1e-12));
        prop_assert!((0.0..=1.0).contains(&b.fe_epa_share));
    }

    #[test]
    fn fefet_terms_nondecreasing_in_ae_and_fe_term(
        base in 0.0..5.0f64, fe in 0.0..5.0f64, dfe in 0.0..1.0f64, ae1 in 0.0..=1.0f64, ae2 in 0.0..=1.0f64,
    ) {
        let (lo, hi) = if ae1 <= ae2 { (ae1, ae2) } else { (ae2, ae1) };
        prop_assert!(epa_fefet(base, fe, lo).unwrap() <= epa_fefet(base, fe, hi).unwrap());
        prop_assert!(gpa_fefet(base, fe, lo).unwrap() <= gpa_fefet(base, fe, hi).unwrap());
        prop_assert!(epa_fefet(base, fe, lo).unwrap() <= epa_fefet(base, fe + dfe, lo).unwrap());
        prop_assert!(gpa_fefet(base, fe, lo).unwrap() <= gpa_fefet(base, fe + dfe, lo).unwrap());
        prop_assert_eq!(epa_fefet(base, fe, 0.0).unwrap(), base);
    }

    #[test]
    fn device_cpa_nondecreasing_in_ae(
        hzo in 0.0..40.0f64, al in 0.0..6.0f64, ae1 in 0.0..=1.0f64, ae2 in 0.0..=1.0f64,
    ) {
        let model = EmbodiedModel::default();
        let d = fefet(hzo, al, 1e9);
        let (lo, hi) = if ae1 <= ae2 { (ae1, ae2) } else { (ae2, ae1) };
        let a = model.device_cpa(&d, lo).unwrap();
        let b = model.device_cpa(&d, hi).unwrap();
        prop_assert!(a.total_cpa <= b.total_cpa);
        prop_assert_eq!(a.material_term, model.fab.mpa_cmos_kg_per_cm2);
        prop_assert_eq!(a.yield_fraction, model.fab.yield_fraction);
    }

    #[test]
    fn fe_gpa_is_negligible_for_thin_al2o3(al in 0.0..=3.0f64, ae in 0.0..=1.0f64) {
        let model = EmbodiedModel::default();
        let fe = model.fe_layer(&fefet(10.0, al, 1e9)).unwrap();
        let extra = gpa_fefet(0.1375, fe.gpa_kg_per_cm2, ae).unwrap() - 0.1375;
        prop_assert!(extra <= 2.3e-7);
    }

    #[test]
    fn deposition_time_is_linear(
        t in 0.0..100.0f64, k in 0.0..10.0f64, rate in 0.01..1.0f64, cycle in 1.0..500.0f64,
    ) {
        let base = deposition_time(&LayerProcess::new("L", t, rate, cycle)).unwrap();
        let scaled = deposition_time(&LayerProcess::new("L", k * t, rate, cycle)).unwrap();
        prop_assert!(close(scaled, k * base, 1e-12));
        let slower = deposition_time(&LayerProcess::new("L", t, rate, 2.0 * cycle)).unwrap();
        prop_assert!(close(slower, 2.0 * base, 1e-12));
        let faster = deposition_time(&LayerProcess::new("L", t, 2.0 * rate, cycle)).unwrap();
        prop_assert!(close(faster, base / 2.0, 1e-12));
        prop_assert!(close(base, t / rate * cycle, 1e-12));
    }

    #[test]
    fn lifetime_proportionalities(p in pattern(), endurance in 1.0..1e12f64, k in 1.01..100.0f64) {
        let days = |e: f64, p: &WritePattern| lifetime(Some(e), p).unwrap().days().unwrap();
        let base = days(endurance, &p);
        prop_assert!(close(base, endurance * p.capacity_bits / (p.writes_per_day * p.access_width_bits), 1e-12));
        prop_assert!(close(days(k * endurance, &p), k * base, 1e-12));
        let more_cap = WritePattern { capacity_bits: k * p.capacity_bits, ..p };
        prop_assert!(close(days(endurance, &more_cap), k * base, 1e-12));
        let more_writes = WritePattern { writes_per_day: k * p.writes_per_day, ..p };
        prop_assert!(close(days(endurance, &more_writes), base / k, 1e-12));
        let wider = WritePattern { access_width_bits: k * p.access_width_bits, ..p };
        prop_assert!(close(days(endurance, &wider), base / k, 1e-12));
    }

    #[test]
    fn embodied_charge_per_write_strictly_falls_with_endurance(
        p in pattern(), ecf in 1e-6..10.0f64, endurance in 1.0..1e12f64, k in 1.01..100.0f64,
    ) {
        let low = embodied_per_write(ecf, endurance, &p).unwrap();
        let high = embodied_per_write(ecf, k * endurance, &p).unwrap();
        prop_assert!(high < low);
    }

    #[test]
    fn total_cf_amortises_proportionally(
        ocf in 0.0..100.0f64, ecf in 0.0..100.0f64, lt in 0.1..1e5f64, frac in 0.0..3.0f64, dt in 0.0..1e4f64,
        d in 0.0..10.0f64,
    ) {
        let t = frac * lt;
        let r = total_cf(ocf, ecf, t, Lifetime::Days(lt)).unwrap();
        prop_assert!(close(r.total_cf_kg, ocf + t / lt * ecf, 1e-12));
        prop_assert_eq!(r.past_rated_lifetime, t > lt);
        let later = total_cf(ocf, ecf, t + dt, Lifetime::Days(lt)).unwrap();
        prop_assert!(later.total_cf_kg >= r.total_cf_kg);
        prop_assert!(total_cf(ocf + d, ecf, t, Lifetime::Days(lt)).unwrap().total_cf_kg >= r.total_cf_kg);
        prop_assert!(total_cf(ocf, ecf + d, t, Lifetime::Days(lt)).unwrap().total_cf_kg >= r.total_cf_kg);
        prop_assert_eq!(total_cf(ocf, ecf, t, Lifetime::Unlimited).unwrap().total_cf_kg, ocf);
    }

    #[test]
    fn select_is_invariant_under_monotone_transforms(
        points in prop::collection::vec(design_point("D", 1024), 1..=7),
        energies in prop::collection::vec(0u32..100_000, 7),
    ) {
        // One record per target so the (device, capacity, target) keys stay unique.
        let points: Vec<_> = points
            .into_iter()
            .zip(&energies)
            .zip(OptTarget::ALL)
            .map(|((mut dp, &e), target)| {
                dp.read_energy = f64::from(e) / 10.0;
                dp.opt_target = target;
                dp
            })
            .collect();
        let catalog = Catalog::new(points).unwrap();
        let metric = |dp: &MemoryDesignPoint| dp.read_energy;
        let chosen = catalog.select_by("D", 1024, metric).unwrap();
        prop_assert_eq!(chosen, catalog.select("D", 1024, OptTarget::ReadDynamicEnergy).unwrap());
        let transforms: [fn(f64) -> f64; 4] = [
            |x| 3.0 * x + 7.0,
            |x| x * x * x,
            |x| (1.0 + x).ln(),
            |x| x.sqrt() - 1.0,
        ];
        for f in transforms {
            prop_assert_eq!(chosen, catalog.select_by("D", 1024, |dp| f(metric(dp))).unwrap());
        }
        prop_assert!(catalog.points().iter().all(|dp| metric(chosen) <= metric(dp)));
    }

    #[test]
    fn per_access_carbon_is_linear(
        dp in design_point("D", 1024), ci in 0.0..2.0f64, k in 0.0..10.0f64, leak in 0.0..100.0f64,
    ) {
        for include in [false, true] {
            let base = per_access_carbon(&dp, ci, include);
            let scaled_ci = per_access_carbon(&dp, k * ci, include);
            prop_assert!(close(scaled_ci.read, k * base.read, 1e-12));
            prop_assert!(close(scaled_ci.write, k * base.write, 1e-12));
        }
        let no_leak = MemoryDesignPoint { leakage_power: 0.0, ..dp.clone() };
        let scaled = MemoryDesignPoint {
            read_energy: k * dp.read_energy,
            write_energy: k * dp.write_energy,
            ..no_leak.clone()
        };
        let a = per_access_carbon(&no_leak, ci, true);
        let b = per_access_carbon(&scaled, ci, true);
        prop_assert!(close(b.read, k * a.read, 1e-12));
        prop_assert!(close(b.write, k * a.write, 1e-12));

        let other = MemoryDesignPoint { leakage_power: leak, ..dp.clone() };
        prop_assert_eq!(per_access_carbon(&dp, ci, false), per_access_carbon(&other, ci, false));
        prop_assert!(per_access_carbon(&dp, ci, true).read >= per_access_carbon(&dp, ci, false).read);
    }

    #[test]
    fn fe_epa_increasing_in_thickness_decreasing_in_wafer_area(
        hzo in 0.0..50.0f64, al in 0.0..10.0f64, dh in 0.1..10.0f64, wafer in 10.0..800.0f64, dw in 1.0..100.0f64,
    ) {
        let r = recipe_with(wafer);
        let epa = |r: &ProcessRecipe, h: f64, a: f64| epa_fe_layer(r, &fe_stack(h, a), None).unwrap().nominal;
        let base = epa(&r, hzo, al);
        prop_assert!(epa(&r, hzo + dh, al) > base);
        prop_assert!(epa(&r, hzo, al + dh) > base);
        prop_assert!(epa(&recipe_with(wafer + dw), hzo, al) < base);
    }

    #[test]
    fn calibration_is_a_fixpoint(
        target in 0.01..5.0f64, hzo in 0.0..50.0f64, al in 0.0..10.0f64, p in 10.0..1e4f64,
    ) {
        let mut r = ProcessRecipe::reference_uncalibrated();
        r.power.p_steady_w = p;
        r.power.p_preheat_w = 1.5 * p;
        let stack = fe_stack(hzo, al);
        let f = calibrate_power(&r, target, &stack).unwrap();
        r.scale_power(f);
        prop_assert!(close(epa_fe_layer(&r, &stack, None).unwrap().nominal, target, 1e-9));
        let again = calibrate_power(&r, target, &stack).unwrap();
        prop_assert!(close(again, 1.0, 1e-9));
    }

    #[test]
    fn fe_gpa_linear_in_thickness_and_unabated_fraction(
        t in 0.0..20.0f64, k in 0.0..5.0f64, rate in 0.0..100.0f64, gwp in 0.0..100.0f64, d in 0.0..=1.0f64,
    ) {
        let ghg = GhgModel { ghg_rate_ug_per_nm_cm2: rate, gwp, destruction_efficiency: d };
        let base = gpa_fe_layer(t, &ghg).unwrap();
        prop_assert!(close(gpa_fe_layer(k * t, &ghg).unwrap(), k * base, 1e-12));
        prop_assert!(close(base, gwp * rate * t * (1.0 - d), 1e-12));
        let half = GhgModel { destruction_efficiency: 1.0 - (1.0 - d) / 2.0, ..ghg.clone() };
        prop_assert!(close(gpa_fe_layer(t, &half).unwrap(), base / 2.0, 1e-12));
    }

    #[test]
    fn embodied_is_linear_in_capacity(cap in 1.0..1e10f64, k in 1.0..64.0f64, ae in 0.1..=1.0f64) {
        let model = EmbodiedModel::default();
        let d = fefet(10.0, 2.0, 1e9);
        let a = model.first_order_embodied(&d, cap, ae).unwrap();
        let b = model.first_order_embodied(&d, k * cap, ae).unwrap();
        prop_assert!(close(b.embodied_kg, k * a.embodied_kg, 1e-12));
        prop_assert!(close(b.per_mb_kg().unwrap(), a.per_mb_kg().unwrap(), 1e-12));
        let area = array_area(cap, &d, &model.fab, ae).unwrap();
        prop_assert!(close(embodied_per_mb(cap, area, 2.0).unwrap() * cap / 8_388_608.0, embodied_carbon(area, 2.0).unwrap(), 1e-12));
    }

    #[test]
    fn mc_sampling_is_reproducible(seed in any::<u64>(), n in 1usize..32) {
        let r = ProcessRecipe::calibrated_reference();
        let stack = fe_stack(20.0, 3.0);
        let mc = Some(MonteCarlo { samples: n, seed });
        let a = epa_fe_layer(&r, &stack, mc).unwrap();
        let b = epa_fe_layer(&r, &stack, mc).unwrap();
        prop_assert_eq!(a.samples.len(), n);
        prop_assert!(a.samples.iter().zip(&b.samples).all(|(x, y)| x.to_bits() == y.to_bits()));
        prop_assert!(a.samples.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn system_totals_are_additive_and_linear(
        compute_area in 1e-4..1.0f64,
        mac_pj in 0.0..1.0f64,
        w in design_point("HZO", 4096),
        io in design_point("SRAM", 4096),
        counts in (0.0..1e7f64, 0.0..1e7f64, 0.0..1e7f64, 0.0..1e7f64, 0.0..1e9f64),
        exec in 1e-4..1.0f64,
        ci in 0.01..1.5f64,
        k in 0.0..10.0f64,
    ) {
        let devices = DeviceLibrary::new(vec![sram(), DeviceSpec { name: "HZO".into(), ..fefet(10.0, 2.0, 1e9) }]).unwrap();
        let catalog = Catalog::new(vec![w, io]).unwrap();
        let buffer = |role, device: &str| BufferSpec { role, device: device.into(), capacity_bits: 4096, opt_target: OptTarget::Area };
        let config = AcceleratorConfig {
            name: "a".into(),
            compute_area_cm2: compute_area,
            compute_energy_per_mac_pj: mac_pj,
            pe_rows: 8,
            pe_cols: 8,
            buffers: vec![buffer(BufferRole::Weight, "HZO"), buffer(BufferRole::Io, "SRAM")],
            sweep: None,
            authoritative: false,
        };
        let (wr, ww, ir, iw, macs) = counts;
        let workload = |scale: f64| WorkloadProfile {
            name: "w".into(),
            mac_count: macs * scale,
            buffers: vec![
                BufferTraffic { role: BufferRole::Weight, reads: wr * scale, writes: ww * scale },
                BufferTraffic { role: BufferRole::Io, reads: ir * scale, writes: iw * scale },
            ],
            execution_time_s: exec,
            inferences_per_day: 1.0,
            authoritative: false,
        };
        let model = EmbodiedModel::default();

        let e = system_embodied(&config, &model, &catalog, &devices).unwrap();
        let parts: f64 = e.components.iter().map(|c| c.embodied_kg).sum();
        prop_assert!(close(e.total_kg, parts, 1e-12));
        prop_assert!(e.components.iter().all(|c| close(c.embodied_kg, c.area_cm2 * c.cpa_kg_per_cm2, 1e-12)));

        let op = per_inference_operational(&config, &workload(1.0), &catalog, &devices, ci).unwrap();
        let buffers: f64 = op.buffers.iter().map(|b| b.total_kg).sum();
        prop_assert!(close(op.buffers_total_kg, buffers, 1e-12));
        prop_assert!(close(op.total_kg, buffers + op.compute_kg, 1e-12));
        prop_assert!(close(op.buffers_total_kg, op.dynamic_kg + op.leakage_kg, 1e-12));

        let op_ci = per_inference_operational(&config, &workload(1.0), &catalog, &devices, k * ci).unwrap();
        prop_assert!(close(op_ci.total_kg, k * op.total_kg, 1e-12));
        let op_k = per_inference_operational(&config, &workload(k), &catalog, &devices, ci).unwrap();
        prop_assert!(close(op_k.dynamic_kg + op_k.compute_kg, k * (op.dynamic_kg + op.compute_kg), 1e-12));
        prop_assert!(close(op_k.leakage_kg, op.leakage_kg, 1e-12));
    }

    #[test]
    fn smaller_buffer_area_never_raises_embodied(
        w in design_point("HZO", 4096), shrink in 0.0..1.0f64,
    ) {
        let devices = DeviceLibrary::new(vec![DeviceSpec { name: "HZO".into(), ..fefet(10.0, 2.0, 1e9) }]).unwrap();
        let config = AcceleratorConfig {
            name: "a".into(),
            compute_area_cm2: 0.01,
            compute_energy_per_mac_pj: 0.1,
            pe_rows: 8,
            pe_cols: 8,
            buffers: vec![BufferSpec { role: BufferRole::Weight, device: "HZO".into(), capacity_bits: 4096, opt_target: OptTarget::Area }],
            sweep: None,
            authoritative: false,
        };
        let model = EmbodiedModel::default();
        let smaller = MemoryDesignPoint { area: w.area * shrink, ..w.clone() };
        let big = system_embodied(&config, &model, &Catalog::new(vec![w]).unwrap(), &devices).unwrap();
        let small = system_embodied(&config, &model, &Catalog::new(vec![smaller]).unwrap(), &devices).unwrap();
        prop_assert!(small.total_kg <= big.total_kg);
    }
}
