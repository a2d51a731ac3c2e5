use std::sync::atomic::{AtomicUsize, Ordering};

use neqcp::cache::{sweep_cached_with, Cache};
use neqcp::sweep::run_sweep_with;
use neqcp::table::{parse_csv, to_csv_string};
use neqcp::{find_zero_crossing, run_sweep, CliError, PointEvaluator, Result, Row, RunConfig};
use neqcp_core::equilibrium::Material;
use proptest::prelude::*;

/// Analytic stand-in for the physics that counts its calls.
#[derive(Default)]
struct Counting {
    calls: AtomicUsize,
    fail_at: Option<usize>,
}

impl PointEvaluator for Counting {
    fn evaluate(&self, index: usize, a: f64, t_g: f64) -> Result<Row> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        if self.fail_at == Some(index) {
            return Err(CliError::Physics {
                row: index,
                a,
                t_g,
                source: neqcp_core::Error::Budget { detail: "test".into(), evaluations: 0 },
            });
        }
        let f_eq = -1e-30 / a.powi(4);
        let f_neq = f_eq * (1.0 - (t_g / 300.0) * (a / 1e-6));
        Ok(Row {
            a,
            f_neq,
            f_eq: Some(f_eq),
            ratio: Some(f_neq / f_eq),
            f_tilde: f_eq,
            delta: f_neq - f_eq,
            err: 1e-9 * f_neq.abs(),
            t_g,
        })
    }
}

fn small_config() -> RunConfig {
    RunConfig { points: 7, t_g: vec![77.0, 700.0], ..RunConfig::default() }
}

#[test]
fn rows_in_ascending_separation_for_every_temperature() {
    let t = run_sweep_with(&small_config(), &Counting::default(), 3).unwrap();
    assert_eq!(t.rows.len(), 14);
    for t_g in [77.0, 700.0] {
        let block = t.block(t_g);
        assert_eq!(block.len(), 7);
        assert!(block.windows(2).all(|w| w[0].a < w[1].a));
    }
    assert!(t.rows.windows(2).all(|w| w[0].a <= w[1].a));
}

#[test]
fn output_is_independent_of_thread_count() {
    let cfg = small_config();
    let one = to_csv_string(&run_sweep_with(&cfg, &Counting::default(), 1).unwrap()).unwrap();
    for jobs in [2, 4, 8] {
        let many = to_csv_string(&run_sweep_with(&cfg, &Counting::default(), jobs).unwrap()).unwrap();
        assert_eq!(one, many, "jobs = {jobs}");
    }
}

#[test]
fn failing_row_is_identified() {
    let eval = Counting { fail_at: Some(5), ..Counting::default() };
    match run_sweep_with(&small_config(), &eval, 2) {
        Err(e @ CliError::Physics { row: 5, .. }) => assert_eq!(e.exit_code(), 3),
        other => panic!("{other:?}"),
    }
}

#[test]
fn metadata_records_constants_tolerances_and_hash() {
    let cfg = small_config();
    let t = parse_csv(&to_csv_string(&run_sweep_with(&cfg, &Counting::default(), 1).unwrap()).unwrap()).unwrap();
    assert_eq!(t.meta("v_F"), Some(format!("{:?}", cfg.v_f).as_str()));
    assert_eq!(t.meta("tol_force"), Some("1e-6"));
    assert_eq!(t.meta("tol_tensor"), Some("1e-8"));
    assert_eq!(t.meta("config_hash"), Some(cfg.hash().unwrap().as_str()));
    assert!(t.meta("tool").unwrap().starts_with("neqcp "));
    for k in ["c", "hbar", "k_B", "alpha"] {
        assert!(t.meta(k).is_some(), "{k}");
    }
}

#[test]
fn ratio_column_matches_other_columns() {
    let table = run_sweep_with(&small_config(), &Counting::default(), 1).unwrap();
    for r in &table.rows {
        let ratio = r.ratio.unwrap();
        assert!((ratio / (r.f_neq / r.f_eq.unwrap()) - 1.0).abs() <= 1e-9);
    }
    // After rounding each column to nine significant digits the recomputed
    // ratio can differ by up to two half-units in the ninth digit.
    let parsed = parse_csv(&to_csv_string(&table).unwrap()).unwrap();
    for r in &parsed.rows {
        let recomputed = r.f_neq / r.f_eq.unwrap();
        assert!((r.ratio.unwrap() / recomputed - 1.0).abs() <= 1.5e-8);
    }
}

#[test]
fn cache_replays_without_evaluation_and_misses_on_changes() {
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::new(dir.path()).unwrap();
    let cfg = small_config();
    let eval = Counting::default();
    let first = sweep_cached_with(&cfg, &eval, 2, Some(&cache)).unwrap();
    assert!(!first.from_cache);
    let calls = eval.calls.load(Ordering::SeqCst);
    assert_eq!(calls, 14);

    let second = sweep_cached_with(&cfg, &eval, 2, Some(&cache)).unwrap();
    assert!(second.from_cache);
    assert_eq!(second.csv, first.csv);
    assert_eq!(to_csv_string(&second.table).unwrap(), first.csv);
    assert_eq!(eval.calls.load(Ordering::SeqCst), calls);

    let mut tol = cfg.clone();
    tol.tol_force = 5e-7;
    assert!(!sweep_cached_with(&tol, &eval, 2, Some(&cache)).unwrap().from_cache);
    let mut vf = cfg.clone();
    vf.v_f *= 1.1;
    assert!(!sweep_cached_with(&vf, &eval, 2, Some(&cache)).unwrap().from_cache);
    assert_eq!(eval.calls.load(Ordering::SeqCst), 3 * calls);
}

#[test]
fn corrupt_and_stale_entries_are_recomputed() {
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::new(dir.path()).unwrap();
    let cfg = small_config();
    let hash = cfg.hash().unwrap();
    let eval = Counting::default();

    std::fs::write(cache.entry_path(&hash), "a_m,garbage\n1,2,3\n").unwrap();
    let out = sweep_cached_with(&cfg, &eval, 1, Some(&cache)).unwrap();
    assert!(!out.from_cache);
    assert_eq!(std::fs::read_to_string(cache.entry_path(&hash)).unwrap(), out.csv);

    let stale = out.csv.replace(&format!("neqcp {}", env!("CARGO_PKG_VERSION")), "neqcp 0.0.0-old");
    std::fs::write(cache.entry_path(&hash), stale).unwrap();
    assert!(!sweep_cached_with(&cfg, &eval, 1, Some(&cache)).unwrap().from_cache);
    assert!(sweep_cached_with(&cfg, &eval, 1, Some(&cache)).unwrap().from_cache);
    // No stray temporary files are left behind.
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn equal_temperatures_give_unit_ratio() {
    let cfg = RunConfig { t_g: vec![300.0], points: 5, ..RunConfig::default() };
    let t = run_sweep(&cfg, 1).unwrap();
    for r in &t.rows {
        assert_eq!(r.ratio, Some(1.0));
        assert_eq!(r.delta, 0.0);
    }
    assert_eq!(to_csv_string(&t).unwrap(), to_csv_string(&run_sweep(&cfg, 2).unwrap()).unwrap());
}

#[test]
fn ratio_does_not_depend_on_the_particle() {
    let metal = RunConfig { t_g: vec![500.0], points: 2, a_min: 0.5e-6, a_max: 1.5e-6, ..RunConfig::default() };
    let mut dielectric = metal.clone();
    dielectric.spec.material = Material::Dielectric { epsilon: 4.0 };
    let (m, d) = (run_sweep(&metal, 1).unwrap(), run_sweep(&dielectric, 1).unwrap());
    for (x, y) in m.rows.iter().zip(&d.rows) {
        assert!((x.ratio.unwrap() / y.ratio.unwrap() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn invalid_config_is_rejected_before_evaluation() {
    let eval = Counting::default();
    let cfg = RunConfig { a_min: 2e-6, a_max: 1e-6, ..RunConfig::default() };
    assert!(matches!(run_sweep_with(&cfg, &eval, 1), Err(CliError::Config(_))));
    assert_eq!(eval.calls.load(Ordering::SeqCst), 0);
}

/// Smooth force with a root at 0.8 µm plus deterministic noise scaled by
/// the tolerance; the reported error covers the noise.
fn noisy_force(a: f64, tol: f64, seed: u64) -> (f64, f64) {
    let slope = 1e-16;
    let smooth = slope * (a - 0.8e-6);
    let phase = (a * 1e9 + seed as f64).sin() * 43758.5453;
    let noise = (phase - phase.floor() - 0.5) * 2.0 * tol * 1e-22;
    (smooth + noise, tol * 1e-22)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn zero_crossing_is_stable_under_tolerance_halving(seed in 0u64..1000, tol in 1e-7f64..1e-3) {
        let z1 = find_zero_crossing(|a| Ok(noisy_force(a, tol, seed)), 0.3e-6, 2e-6).unwrap();
        let z2 = find_zero_crossing(|a| Ok(noisy_force(a, 0.5 * tol, seed)), 0.3e-6, 2e-6).unwrap();
        prop_assert!((z1.separation - z2.separation).abs() <= z1.width().max(z2.width()));
        for z in [z1, z2] {
            prop_assert!(z.lo <= 0.8e-6 && 0.8e-6 <= z.hi, "{:?}", z);
        }
    }
}
