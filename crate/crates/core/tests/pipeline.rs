use std::fs;

use vqe_r12::cabs::CabsMode;
use vqe_r12::pipeline::*;
use vqe_r12::vqe::AnsatzKind;
use vqe_r12::Error;

fn h2_config() -> RunConfig {
    RunConfig {
        geometry: "H 0 0 0; H 0 0 {R}".into(),
        basis: "sto-3g".into(),
        cabs_mode: CabsMode::Gbs,
        cabs_basis: Some("et:0,0.3,3,2".into()),
        ..RunConfig::default()
    }
}

fn scratch(name: &str) -> std::path::PathBuf {
    let d = std::env::temp_dir().join(format!("vqe-r12-{name}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&d);
    fs::create_dir_all(&d).unwrap();
    d
}

fn without_timing(json: &str) -> serde_json::Value {
    let mut v: serde_json::Value = serde_json::from_str(json).unwrap();
    v.as_object_mut().unwrap().remove("timing");
    v
}

#[test]
fn negative_gamma_is_rejected_up_front() {
    let cfg = RunConfig { gamma: -1.0, geometry: "Xx 0 0 0".into(), ..RunConfig::default() };
    match run_single(&cfg) {
        Err(Error::Invalid(msg)) => assert!(msg.contains("gamma")),
        other => panic!("{other:?}"),
    }
}

#[test]
fn default_gamma() {
    assert_eq!(RunConfig::default().gamma, 1.4);
    assert_eq!(DEFAULT_GAMMA, 1.4);
}

#[test]
fn single_point_bookkeeping() {
    let out = run_single(&h2_config().at(0.74)).unwrap();
    let r = &out.record;
    assert_eq!(r.e_total, r.e_vqe + r.e_correction);
    assert_eq!(r.n_qubits, 2 * r.n_obs);
    assert_eq!((r.n_obs, r.n_cabs), (2, 4));
    assert!(r.e_correction < 0.0);
    assert!((r.e_vqe - r.e_fci_obs.unwrap()).abs() < 1e-8);
    assert!(r.e_hf >= r.e_vqe);
    assert!(out.terms.is_some());
}

#[test]
fn no_cabs_means_no_correction() {
    let cfg = RunConfig { cabs_mode: CabsMode::None, ..h2_config() }.at(1.0);
    let r = run_single(&cfg).unwrap().record;
    assert_eq!(r.e_correction, 0.0);
    assert_eq!(r.n_cabs, 0);
    assert_eq!(r.e_total, r.e_vqe);
}

#[test]
fn pair_ansatz_on_pnos() {
    let cfg = RunConfig {
        geometry: "He 0 0 0".into(),
        basis: "cc-pvdz".into(),
        ansatz: AnsatzKind::Spa,
        cabs_mode: CabsMode::Pno,
        pnos_per_pair: Some(2),
        mp2_init: true,
        ..RunConfig::default()
    };
    let r = run_single(&cfg).unwrap().record;
    assert_eq!(r.n_obs, 3);
    assert_eq!(r.n_cabs, 2);
    assert!(r.e_vqe < r.e_hf);
    assert!(r.e_vqe >= r.e_fci_obs.unwrap() - 1e-9);
}

#[test]
fn pair_ansatz_needs_pnos() {
    let obs = {
        let cfg = RunConfig { geometry: "He 0 0 0".into(), ..RunConfig::default() };
        let mol = load_geometry(&cfg.geometry, 0).unwrap();
        let (host, ints, scf) = run_scf(&cfg, &mol).unwrap();
        build_obs(&cfg, &mol, host, &ints, scf).unwrap()
    };
    assert!(build_ansatz(AnsatzKind::Spa, &obs).is_err());
}

#[test]
fn scan_is_sorted_deterministic_and_resumable() {
    let dir = scratch("scan");
    let cfg = RunConfig { scan: Some(Scan::parse("0.6:1.2:3").unwrap()), ..h2_config() };
    let a = run_scan(&cfg, Some(&dir)).unwrap();
    assert_eq!(a.exit_code(), 0);
    let rs: Vec<f64> = a.records.iter().map(|r| r.r.unwrap()).collect();
    assert_eq!(rs, vec![0.6, 0.8999999999999999, 1.2]);
    assert!(dir.join("pes.csv").exists());
    let json_a = fs::read_to_string(dir.join("pes.json")).unwrap();
    assert_eq!(fs::read_dir(dir.join("points")).unwrap().count(), 3);

    let b = run_scan(&cfg, None).unwrap();
    assert_eq!(without_timing(&json_a), without_timing(&b.to_json().unwrap()));

    // cached points are reused rather than recomputed
    let first = dir.join("points").join(format!("{}.json", point_hash(&cfg.at(0.6)).unwrap()));
    let text = fs::read_to_string(&first).unwrap().replace(&format!("{:?}", a.records[0].e_hf), "-42.0");
    fs::write(&first, text).unwrap();
    let c = run_scan(&cfg, Some(&dir)).unwrap();
    assert_eq!(c.records[0].e_hf, -42.0);
    assert_eq!(c.records[1], a.records[1]);
    let _ = fs::remove_dir_all(&dir);
}

#[test]
fn failed_points_make_a_partial_scan() {
    let cfg = RunConfig { scan: Some(Scan::parse("0:1:3").unwrap()), ..h2_config() };
    let rep = run_scan(&cfg, None).unwrap();
    assert_eq!(rep.records.len(), 2);
    assert_eq!(rep.failures.len(), 1);
    assert_eq!(rep.failures[0].r, 0.0);
    assert!(rep.is_partial());
    assert_eq!(rep.exit_code(), 2);
    let json: serde_json::Value = serde_json::from_str(&rep.to_json().unwrap()).unwrap();
    assert_eq!(json["schema_version"], SCHEMA_VERSION);
}

#[test]
fn scan_ranges() {
    assert_eq!(Scan::parse("1:2:3").unwrap().points().unwrap(), vec![1.0, 1.5, 2.0]);
    assert!(Scan::parse("2:1:3").is_err());
    assert!(Scan::parse("1:2:0").is_err());
    assert!(Scan::parse("1:2").is_err());
    let cfg = RunConfig { scan: Some(Scan { start: 1.0, stop: 2.0, count: 2 }), geometry: "H 0 0 0; H 0 0 1".into(), ..RunConfig::default() };
    assert!(cfg.validate().is_err());
}

#[test]
fn metrics_fixture() {
    let reference = [(0.5, -1.0), (1.0, -1.1), (1.5, -1.05)];
    let curve = [(0.5, -0.999), (1.0, -1.097), (1.5, -1.048)];
    let m = compute_metrics(&curve, &reference).unwrap();
    assert!((m.npe * 1e3 - 2.0).abs() < 1e-9);
    assert!((m.max * 1e3 - 3.0).abs() < 1e-9);
    let shifted = [(0.5, -0.999), (1.1, -1.097), (1.5, -1.048)];
    assert!(compute_metrics(&shifted, &reference).is_err());
    assert!(compute_metrics(&curve[..2], &reference).is_err());
}

#[test]
fn reference_curve_csv() {
    let text = "R,E\n0.5,-1.0\n1.0,-1.1\n";
    assert_eq!(read_curve_csv(text.as_bytes()).unwrap(), vec![(0.5, -1.0), (1.0, -1.1)]);
    assert!(read_curve_csv("0.5,-1\nx,y\n".as_bytes()).is_err());
}

#[test]
fn basis_specs_union() {
    let mol = load_geometry("H 0 0 0; H 0 0 0.74", 0).unwrap();
    assert_eq!(load_basis("sto-3g", &mol).unwrap().ao_count(), 2);
    assert_eq!(load_basis("sto-3g+et:0,0.3,3,1", &mol).unwrap().ao_count(), 4);
    assert!(load_basis("nonsense", &mol).is_err());
    assert!(load_basis("et:0,0.3", &mol).is_err());
}

#[test]
fn geometry_forms_agree() {
    let inline = load_geometry("H 0 0 0; H 0 0 0.74", 0).unwrap();
    let xyz = load_geometry("2\ncomment\nH 0 0 0\nH 0 0 0.74\n", 0).unwrap();
    assert_eq!(inline, xyz);
    assert!((inline.atoms[1].position[2] - 0.74 * vqe_r12::basis::ANGSTROM_TO_BOHR).abs() < 1e-12);
    assert_eq!(load_geometry("He 0 0 0; H 0 0 1", 1).unwrap().charge, 1);
}

#[test]
fn frozen_core_counts() {
    let m = load_geometry("Be 0 0 0", 0).unwrap();
    assert_eq!(core_orbitals(&m), 1);
    let m = load_geometry("H 0 0 0; H 0 0 1", 0).unwrap();
    assert_eq!(core_orbitals(&m), 0);
}

#[test]
fn config_json_round_trip() {
    let cfg = RunConfig { shots: Some(1000), pnos_per_pair: Some(3), ..h2_config() };
    let text = serde_json::to_string(&cfg).unwrap();
    assert_eq!(serde_json::from_str::<RunConfig>(&text).unwrap(), cfg);
    let partial: RunConfig = serde_json::from_str(r#"{"geometry": "He 0 0 0", "ansatz": "spa-g"}"#).unwrap();
    assert_eq!(partial.ansatz, AnsatzKind::SpaG);
    assert_eq!(partial.gamma, 1.4);
}

#[test]
fn shots_are_seeded() {
    let cfg = RunConfig { shots: Some(100_000), seed: 5, ..h2_config() }.at(0.74);
    let a = run_single(&cfg).unwrap().record;
    let b = run_single(&cfg).unwrap().record;
    assert_eq!(a, b);
    let exact = run_single(&RunConfig { shots: None, ..cfg }).unwrap().record;
    assert_ne!(a.e_correction, exact.e_correction);
    assert!((a.e_correction - exact.e_correction).abs() < 1e-3);
}
