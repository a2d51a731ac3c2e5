use std::f64::consts::PI;

use neqcp_core::quadrature::{
    integrate_adaptive, integrate_decaying_tail, integrate_double, integrate_endpoint_singular,
    integrate_endpoint_singular_with, IntegralEstimate, QuadConfig, QuadError,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-9;

fn rel(value: f64, exact: f64) -> f64 {
    ((value - exact) / exact).abs()
}

fn log_uniform() -> impl Strategy<Value = f64> {
    (-6.0f64..6.0).prop_map(|e| 10f64.powf(e))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn decaying_tail_scale_sweep(sigma in log_uniform()) {
        let cfg = QuadConfig::new(TOL);
        let e = integrate_decaying_tail(|x: f64| (-x / sigma).exp(), 0.0, sigma, &cfg).unwrap();
        prop_assert!(rel(e.value, sigma) < TOL, "{} vs {}", e.value, sigma);
        let e = integrate_decaying_tail(|x: f64| x * (-2.0 * x / sigma).exp(), 0.0, sigma, &cfg).unwrap();
        prop_assert!(rel(e.value, 0.25 * sigma * sigma) < TOL);
        let e = integrate_decaying_tail(|x: f64| (-x / sigma).exp() * (x / sigma).sin(), 0.0, sigma, &cfg).unwrap();
        prop_assert!(rel(e.value, 0.5 * sigma) < TOL);
    }

    #[test]
    fn endpoint_singular_scale_sweep(sigma in log_uniform()) {
        let cfg = QuadConfig::new(TOL);
        let e = integrate_endpoint_singular(|x: f64| 1.0 / (x / sigma).sqrt(), 0.0, sigma, true, false, &cfg).unwrap();
        prop_assert!(rel(e.value, 2.0 * sigma) < TOL);
        // Offsets from the nearest end keep `σ − x` exact next to the right end.
        let dist = |x: f64, off: f64| if off < 0.0 { (x, -off) } else { (off.max(x), sigma - x) };
        let e = integrate_endpoint_singular_with(
            |x: f64, off: f64| { let (l, r) = dist(x, off); 1.0 / (l * r).sqrt() },
            0.0, sigma, true, true, &cfg,
        ).unwrap();
        prop_assert!(rel(e.value, PI) < TOL);
        let e = integrate_endpoint_singular_with(
            |x: f64, off: f64| {
                let u = x / sigma;
                let r = if off < 0.0 { -off / sigma } else { 1.0 - u };
                u * u / (r * (1.0 + u)).sqrt()
            },
            0.0, sigma, false, true, &cfg,
        ).unwrap();
        prop_assert!(rel(e.value, 0.25 * PI * sigma) < TOL);
    }

    #[test]
    fn double_scale_sweep(sigma in log_uniform()) {
        // ∫₀^∞ (ω/σ) e^{−ω/σ} ∫₀^∞ e^{−ωy} dy dω = 1
        let cfg = QuadConfig::new(TOL);
        let outer = |w: f64| -> Result<IntegralEstimate<f64>, QuadError<f64>> {
            let inner = integrate_decaying_tail(|y: f64| (-w * y).exp(), 0.0, 1.0 / w, &cfg)?;
            Ok(inner.scale(w / sigma * (-w / sigma).exp()))
        };
        let e = integrate_double(outer, 0.0, f64::INFINITY, &[sigma], &cfg).unwrap();
        prop_assert!(rel(e.value, 1.0) < 10.0 * TOL, "{}", e.value);
    }

    #[test]
    fn tightening_never_increases_error(b in 0.5f64..10.0, w in 0.0f64..10.0, p in 0u32..4) {
        let f = |x: f64| x.powi(p as i32) * (-b * x).exp() * (w * x).cos();
        let loose = integrate_decaying_tail(f, 0.0, 1.0 / b, &QuadConfig::new(1e-5)).unwrap();
        let tight = integrate_decaying_tail(f, 0.0, 1.0 / b, &QuadConfig::new(1e-8)).unwrap();
        prop_assert!(tight.abs_error <= loose.abs_error, "{} > {}", tight.abs_error, loose.abs_error);
    }
}

/// Random peaked and oscillatory integrands on [0, 1].
fn random_integrand(rng: &mut ChaCha8Rng) -> impl Fn(f64) -> f64 {
    let centre: f64 = rng.gen_range(0.0..1.0);
    let width = 10f64.powf(rng.gen_range(-3.0..0.0));
    let freq: f64 = rng.gen_range(0.0..60.0);
    let power: f64 = rng.gen_range(0.0..3.0);
    move |x: f64| x.powf(power) * (freq * x).cos() + 1.0 / (1.0 + ((x - centre) / width).powi(2))
}

#[test]
fn reported_error_covers_tolerance_halving() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let trials = 400;
    let mut honoured = 0;
    for _ in 0..trials {
        let f = random_integrand(&mut rng);
        let tol = 10f64.powf(rng.gen_range(-10.0..-4.0));
        let a = integrate_adaptive(&f, &[0.0, 1.0], &QuadConfig::new(tol)).unwrap();
        let b = integrate_adaptive(&f, &[0.0, 1.0], &QuadConfig::new(0.5 * tol)).unwrap();
        if (a.value - b.value).abs() <= a.abs_error {
            honoured += 1;
        }
    }
    assert!(honoured as f64 >= 0.95 * trials as f64, "{honoured}/{trials}");
}

#[test]
fn results_are_bitwise_deterministic_across_threads() {
    let run = || {
        let f = |x: f64| (-x).exp() * (3.0 * x).sin() / (1.0 + x * x);
        integrate_decaying_tail(f, 0.0, 1.0, &QuadConfig::new(1e-10)).unwrap()
    };
    let first = run();
    let handles: Vec<_> = (0..4).map(|_| std::thread::spawn(run)).collect();
    for h in handles {
        let other = h.join().unwrap();
        assert_eq!(other.value.to_bits(), first.value.to_bits());
        assert_eq!(other.abs_error.to_bits(), first.abs_error.to_bits());
    }
}
