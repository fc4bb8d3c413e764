//! End-to-end runs of the `phrictl` binary on small configurations.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use admittance_pareto::maps::MapKind;
use phrictl::artifacts::{self, alpha_dir, bundle_path, map_path, selection_path};
use phrictl::bundle::{ExplorerBundle, MAX_MAP_SIDE};
use serde_json::{json, Value};
use tempfile::TempDir;

const SMOKE_BUDGET: Duration = Duration::from_secs(10);

fn smoke_config() -> Value {
    json!({
        "scenario": "S1",
        "alphas": [1, 0.7, 0.4],
        "grid": { "m_range": [0.2, 40.2], "m_step": 10, "b_range": [0.001, 400], "b_step": 100 },
        "boundary_k_eq": [1210]
    })
}

struct Workspace {
    dir: TempDir,
}

impl Workspace {
    fn new() -> Self {
        Self { dir: tempfile::tempdir().unwrap() }
    }

    fn out(&self) -> PathBuf {
        self.dir.path().join("out")
    }

    fn write_config(&self, config: &Value) -> PathBuf {
        let path = self.dir.path().join("config.json");
        std::fs::write(&path, serde_json::to_vec_pretty(config).unwrap()).unwrap();
        path
    }

    fn run(&self, stage: &str, config: &Value, extra: &[&str]) -> Output {
        let path = self.write_config(config);
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_phrictl"));
        cmd.arg(stage).arg("--config").arg(&path).arg("--out").arg(self.out()).args(extra);
        cmd.env_remove("PHRICTL_THREADS");
        cmd.output().unwrap()
    }

    fn run_ok(&self, stage: &str, config: &Value, extra: &[&str]) -> Output {
        let out = self.run(stage, config, extra);
        assert!(out.status.success(), "{stage} failed: {}", String::from_utf8_lossy(&out.stderr));
        out
    }
}

fn read_bundle(out: &Path) -> ExplorerBundle {
    ExplorerBundle::from_slice(&std::fs::read(bundle_path(out)).unwrap()).unwrap()
}

fn with(mut base: Value, key: &str, value: Value) -> Value {
    base[key] = value;
    base
}

#[test]
fn config_errors_exit_with_code_one() {
    let ws = Workspace::new();
    let cases = [
        with(smoke_config(), "unknown_key", json!(1)),
        with(smoke_config(), "alphas", json!([])),
        with(smoke_config(), "alphas", json!([1.5])),
        with(smoke_config(), "scenario", json!("S9")),
        with(smoke_config(), "weight_step", json!(0)),
    ];
    for config in &cases {
        let out = ws.run("sweep", config, &[]);
        assert_eq!(out.status.code(), Some(1), "{config}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!ws.out().join("config.json").exists(), "{config}: wrote output before failing");
    }

    let missing = Command::new(env!("CARGO_BIN_EXE_phrictl"))
        .args(["sweep", "--config"])
        .arg(ws.dir.path().join("absent.json"))
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(1));

    let bad_threads = Command::new(env!("CARGO_BIN_EXE_phrictl"))
        .args(["sweep", "--config"])
        .arg(ws.write_config(&smoke_config()))
        .arg("--out")
        .arg(ws.out())
        .env("PHRICTL_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad_threads.status.code(), Some(1));
}

#[test]
fn smoke_bundle_writes_every_artifact_quickly() {
    let ws = Workspace::new();
    let start = Instant::now();
    let out = ws.run_ok("bundle", &smoke_config(), &[]);
    let elapsed = start.elapsed();
    assert!(elapsed < SMOKE_BUDGET, "smoke run took {elapsed:?}");
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), bundle_path(&ws.out()).display().to_string());

    let root = ws.out();
    for alpha in [1.0, 0.7, 0.4] {
        for kind in [MapKind::Transparency, MapKind::Robustness] {
            for ext in ["json", "csv"] {
                assert!(map_path(&root, alpha, kind, ext).is_file());
            }
        }
        for name in ["front.json", "front.csv", "config.json", "boundary_k-1210.csv"] {
            assert!(alpha_dir(&root, alpha).join(name).is_file(), "alpha {alpha}: {name}");
        }
    }
    for name in ["config.json", "selection.json", "bundle.json"] {
        assert!(root.join(name).is_file(), "{name}");
    }
}

#[test]
fn map_csv_and_json_agree_including_sentinels() {
    let ws = Workspace::new();
    ws.run_ok("sweep", &smoke_config(), &[]);
    let mut sentinels = 0;
    for alpha in [1.0, 0.7, 0.4] {
        for kind in [MapKind::Transparency, MapKind::Robustness] {
            let map = artifacts::read_map(&ws.out(), alpha, kind).unwrap().unwrap();
            let rows = artifacts::read_map_csv(&map_path(&ws.out(), alpha, kind, "csv")).unwrap();
            assert_eq!(rows.len(), map.grid.len());
            for (k, (m, b, v)) in rows.iter().enumerate() {
                let (i, j) = map.grid.cell(k);
                assert_eq!((*m, *b), (map.grid.m_f()[i], map.grid.b_f()[j]));
                assert_eq!(v.map(f64::to_bits), map.values()[k].map(f64::to_bits));
                sentinels += v.is_none() as usize;
            }
        }
    }
    assert!(sentinels > 0, "the smoke grid should contain unstable cells");
}

#[test]
fn fronts_on_disk_match_the_bundle() {
    let ws = Workspace::new();
    ws.run_ok("bundle", &smoke_config(), &[]);
    let bundle = read_bundle(&ws.out());
    assert_eq!(bundle.fronts.len(), 3);
    for front in &bundle.fronts {
        front.check_invariants().unwrap();
        assert!(!front.is_empty());
        let disk = artifacts::read_front(&ws.out(), front.alpha).unwrap().unwrap();
        assert_eq!(disk, front.points);
        let csv_rows = std::fs::read_to_string(alpha_dir(&ws.out(), front.alpha).join("front.csv")).unwrap();
        assert_eq!(csv_rows.lines().count(), front.len() + 1);
    }
    let selection: Value = serde_json::from_slice(&std::fs::read(selection_path(&ws.out())).unwrap()).unwrap();
    assert_eq!(serde_json::to_value(&bundle.selection).unwrap(), selection);
}

#[test]
fn extra_order_adds_a_front() {
    let ws = Workspace::new();
    ws.run_ok("bundle", &smoke_config(), &["--alphas", "1,0.7,0.4,0.05"]);
    let bundle = read_bundle(&ws.out());
    let alphas: Vec<f64> = bundle.fronts.iter().map(|f| f.alpha).collect();
    assert_eq!(alphas, [1.0, 0.7, 0.4, 0.05]);
    assert_eq!(bundle.maps.len(), 4);
    assert_eq!(bundle.selection.per_alpha.len(), 4);
}

#[test]
fn infeasible_constraints_give_an_empty_report() {
    let ws = Workspace::new();
    let config = with(smoke_config(), "constraints", json!({ "rho_min": 0.99 }));
    let out = ws.run_ok("select", &config, &[]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "chosen: none");
    let report: Value = serde_json::from_slice(&std::fs::read(selection_path(&ws.out())).unwrap()).unwrap();
    assert!(report["chosen"].is_null());
    assert_eq!(report["constraints"]["rho_min"], json!(0.99));
    let eliminated = report["eliminated_counts"]["total"].as_u64().unwrap();
    let front_total: u64 = report["per_alpha"].as_array().unwrap().iter().map(|a| a["front_size"].as_u64().unwrap()).sum();
    assert_eq!(eliminated, front_total);
}

#[test]
fn selection_echoes_constraints_and_respects_them() {
    let ws = Workspace::new();
    let constraints = json!({ "C_max": 900.0, "rho_min": 0.3, "omega_c_min_hz": 1.0, "k_e_eval": 610.0 });
    let config = with(smoke_config(), "constraints", constraints.clone());
    ws.run_ok("select", &config, &[]);
    let report: Value = serde_json::from_slice(&std::fs::read(selection_path(&ws.out())).unwrap()).unwrap();
    assert_eq!(report["constraints"], constraints);
    assert_eq!(report["policy"], json!("min_C"));
    let chosen = &report["chosen"];
    assert!(chosen["C"].as_f64().unwrap() <= 900.0);
    assert!(chosen["rho"].as_f64().unwrap() >= 0.3);
    assert!(chosen["omega_c_hz"].as_f64().unwrap() >= 1.0);
    for per_alpha in report["per_alpha"].as_array().unwrap() {
        if let Some(c) = per_alpha["chosen"]["C"].as_f64() {
            assert!(chosen["C"].as_f64().unwrap() <= c);
        }
    }
}

#[test]
fn bundle_maps_fit_the_explorer_limit() {
    let ws = Workspace::new();
    let config = json!({
        "alphas": [1],
        "grid": { "m_range": [0.2, 25.2], "m_step": 0.2, "b_range": [0.001, 5], "b_step": 1 }
    });
    ws.run_ok("bundle", &config, &["--downsample", "1"]);
    let bundle = read_bundle(&ws.out());
    let maps = &bundle.maps[0];
    assert_eq!(maps.stride, [2, 1]);
    assert!(maps.transparency.values.len() <= MAX_MAP_SIDE);
    let full = artifacts::read_map(&ws.out(), 1.0, MapKind::Transparency).unwrap().unwrap();
    assert_eq!(full.grid.dims().0, 126);
    assert_eq!(maps.transparency.values[1][3], full.get(2, 3));

    // the bundle survives a serialization round trip unchanged
    let text = serde_json::to_vec(&bundle).unwrap();
    assert_eq!(ExplorerBundle::from_slice(&text).unwrap(), bundle);
}

fn modified(path: &Path) -> std::time::SystemTime {
    std::fs::metadata(path).unwrap().modified().unwrap()
}

#[test]
fn stages_reuse_matching_upstream_artifacts() {
    let ws = Workspace::new();
    let config = with(smoke_config(), "alphas", json!([0.7]));
    ws.run_ok("sweep", &config, &[]);
    let maps = map_path(&ws.out(), 0.7, MapKind::Robustness, "json");
    let front = alpha_dir(&ws.out(), 0.7).join("front.json");
    let swept = modified(&maps);
    let map_bytes = std::fs::read(&maps).unwrap();
    assert!(!front.exists());

    std::thread::sleep(Duration::from_millis(20));
    ws.run_ok("front", &config, &[]);
    assert_eq!(modified(&maps), swept, "front resampled matching maps");
    let fronted = modified(&front);

    std::thread::sleep(Duration::from_millis(20));
    ws.run_ok("select", &config, &[]);
    assert_eq!(modified(&front), fronted, "select rebuilt a matching front");

    // a different weight step invalidates only the front
    std::thread::sleep(Duration::from_millis(20));
    ws.run_ok("select", &with(config.clone(), "weight_step", json!(0.01)), &[]);
    assert_eq!(modified(&maps), swept);
    assert!(modified(&front) > fronted);

    // a different grid invalidates the maps as well
    let regridded = with(config, "grid", json!({ "m_range": [0.2, 30.2], "m_step": 10, "b_range": [0.001, 400], "b_step": 100 }));
    ws.run_ok("front", &regridded, &[]);
    assert!(modified(&maps) > swept);
    assert_ne!(std::fs::read(&maps).unwrap(), map_bytes);
}

#[test]
fn explicit_plant_terms_replace_the_generated_blocks() {
    let ws = Workspace::new();
    let lonely = with(smoke_config(), "plant", json!({ "G_num": [{ "c": 1, "beta": 0 }] }));
    assert_eq!(ws.run("sweep", &lonely, &[]).status.code(), Some(1));

    let base = with(smoke_config(), "alphas", json!([0.7]));
    ws.run_ok("sweep", &base, &[]);
    let generated = artifacts::read_map(&ws.out(), 0.7, MapKind::Transparency).unwrap().unwrap();

    // the default robot lag, 1/(tau s + 1) with a 10 Hz corner, spelled out
    let tau = 1.0 / (2.0 * std::f64::consts::PI * 10.0);
    let explicit = with(
        base.clone(),
        "plant",
        json!({ "G_num": [{ "c": 1, "beta": 0 }], "G_den": [{ "c": 1, "beta": 0 }, { "c": tau, "beta": 1 }] }),
    );
    ws.run_ok("sweep", &explicit, &[]);
    let spelled_out = artifacts::read_map(&ws.out(), 0.7, MapKind::Transparency).unwrap().unwrap();
    assert_eq!(spelled_out.values(), generated.values());

    let unity = with(
        base,
        "plant",
        json!({ "G_num": [{ "c": 1, "beta": 0 }], "G_den": [{ "c": 1, "beta": 0 }] }),
    );
    ws.run_ok("sweep", &unity, &[]);
    let without_lag = artifacts::read_map(&ws.out(), 0.7, MapKind::Transparency).unwrap().unwrap();
    assert_ne!(without_lag.values(), generated.values());
}
