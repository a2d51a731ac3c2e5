//! Force on a nanoparticle at temperature `T_E` (the environment) above a
//! graphene sheet at `T_g`.
//!
//! ```text
//! F_neq = F̃(a, T_E; T_g) + (2ħα₀/πc²) ∫₀^∞ dω Θ(ω) ∫_{ω/c}^∞ k dk e^{−2aq} Im[A_TM R_TM + A_TE R_TE]
//! ```
//!
//! with `Θ = n(ω, T_E) − n(ω, T_g)`, `A_TM = 2k²c² − ω²`, `A_TE = ω²` and the
//! reflection coefficients at `T_g`. Integrals run in reduced variables
//! `x = ω/ω_a`, `y = 2aq`, `K = 2ak` with `ω_a = c/2a`, where the addition is
//!
//! ```text
//! ΔF = (2ħcα₀/π(2a)⁵) ∫ dx Θ ∫₀^∞ y e^{−y} Im[(2y² + x²)R_TM + x²R_TE] dy.
//! ```
//!
//! The inner integrand has a thermal-plasmon resonance where
//! `Re(qΠ₀₀ + 2ħk²)` changes sign; it is located by scanning and bisection
//! and the quadrature is split around it.

use std::cell::Cell;

use num_complex::Complex64;

use crate::equilibrium::{ForceModel, ForceResult, NanoparticleSpec};
use crate::error::{Error, Result};
use crate::graphene::{ReflectionPair, SpectralPoint};
use crate::quadrature::{
    integrate_adaptive, integrate_decaying_tail, integrate_double, integrate_endpoint_singular_with, IntegralEstimate,
    QuadConfig,
};
use crate::units::{PhysicalConstants, DIRAC_MODEL_LIMIT_EV, ELECTRON_VOLT};

/// Below this `ħω/k_BT` the occupation difference uses its series.
pub const THETA_SERIES_THRESHOLD: f64 = 1e-4;
/// Frequency cutoff in units of `k_B max(T_E, T_g)/ħ`.
pub const OMEGA_MAX_THERMAL: f64 = 40.0;
/// Relative tolerance of the representation cross-check.
pub const CROSS_CHECK_TOLERANCE: f64 = 1e-4;

/// Reduced normal wavenumber beyond which `y³e^{−y}` is below 1e-20.
const Y_CUT: f64 = 60.0;
const SCAN_LOG: usize = 36;
const SCAN_LIN: usize = 12;
const BISECTIONS: usize = 80;

/// Parts of the nonequilibrium force, in newtons.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NoneqBreakdown {
    /// `F̃(a, T_E; T_g)`.
    pub f_tilde_te_tg: f64,
    /// Evanescent-wave addition.
    pub delta_evanescent: f64,
    /// Real-frequency half-difference, when the cross-check ran.
    pub half_difference: Option<f64>,
    /// Propagating-minus-evanescent term, when the cross-check ran.
    pub delta_f: Option<f64>,
    /// Equilibrium-like term of the alternative split, when the cross-check ran.
    pub f_term: Option<f64>,
}

/// Occupation difference `n(ω, T_E) − n(ω, T_g)`; a zero temperature
/// contributes zero.
pub fn theta(omega: f64, t_e: f64, t_g: f64, consts: &PhysicalConstants) -> f64 {
    if t_e == t_g {
        return 0.0;
    }
    let reduced = |t: f64| {
        if t > 0.0 {
            consts.hbar * omega / (consts.k_b * t)
        } else {
            f64::INFINITY
        }
    };
    let (xe, xg) = (reduced(t_e), reduced(t_g));
    if xe < THETA_SERIES_THRESHOLD && xg < THETA_SERIES_THRESHOLD {
        // n(x) = 1/x − 1/2 + x/12 − x³/720 + O(x⁵)
        return consts.k_b * (t_e - t_g) / (consts.hbar * omega) + (xe - xg) / 12.0 - (xe.powi(3) - xg.powi(3)) / 720.0;
    }
    occupation(xe) - occupation(xg)
}

fn occupation(x: f64) -> f64 {
    if x.is_infinite() {
        0.0
    } else {
        1.0 / x.exp_m1()
    }
}

/// `(A_TM, A_TE) = (2k²c² − ω², ω²)`.
pub fn angular_factors(omega: f64, k_perp: f64, consts: &PhysicalConstants) -> (f64, f64) {
    let kc = k_perp * consts.c;
    (2.0 * kc * kc - omega * omega, omega * omega)
}

/// Representation cross-check, all forces in newtons.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConsistencyReport {
    pub f_tilde_tg_tg: f64,
    pub f_tilde_te_tg: f64,
    /// Half-difference from the real-frequency integral.
    pub half_difference_real: f64,
    /// Half-difference `(F̃(T_g; T_g) − F̃(T_E; T_g))/2` from two Matsubara sums.
    pub half_difference_matsubara: f64,
    pub f_term: f64,
    pub delta_f: f64,
    /// `F_term + ΔF`.
    pub assembly: f64,
    /// Evanescent-only result.
    pub f_neq: f64,
    pub representation_gap: f64,
    pub matsubara_gap: f64,
    pub tolerance: f64,
}

impl ConsistencyReport {
    pub fn consistent(&self) -> bool {
        self.representation_gap <= self.tolerance && self.matsubara_gap <= self.tolerance
    }

    pub fn breakdown(&self) -> NoneqBreakdown {
        NoneqBreakdown {
            f_tilde_te_tg: self.f_tilde_te_tg,
            delta_evanescent: self.f_neq - self.f_tilde_te_tg,
            half_difference: Some(self.half_difference_real),
            delta_f: Some(self.delta_f),
            f_term: Some(self.f_term),
        }
    }
}

fn relative_gap(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(a.abs())
    }
}

/// Zeros of `Re den` on `(lo, hi)` with Lorentzian half-widths
/// `|Im den| / |d Re den|`.
fn resonances<F>(den: F, lo: f64, hi: f64) -> Result<Vec<(f64, f64)>>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let span = hi - lo;
    if !(span > 0.0) {
        return Ok(Vec::new());
    }
    let mut grid: Vec<f64> = (0..SCAN_LOG)
        .map(|i| lo + span * 10f64.powf(-6.0 + 6.0 * i as f64 / SCAN_LOG as f64))
        .chain((0..SCAN_LIN).map(|i| lo + span * (i as f64 + 0.5) / SCAN_LIN as f64))
        .filter(|&s| s > lo && s < hi)
        .collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let values = grid.iter().map(|&s| den(s).map(|d| d.re)).collect::<Result<Vec<_>>>()?;

    let mut found = Vec::new();
    for i in 1..grid.len() {
        let (mut a, mut b) = (grid[i - 1], grid[i]);
        let (fa, fb) = (values[i - 1], values[i]);
        if fa == 0.0 || fa.signum() == fb.signum() {
            continue;
        }
        for _ in 0..BISECTIONS {
            let m = 0.5 * (a + b);
            if !(m > a && m < b) {
                break;
            }
            if den(m)?.re.signum() == fa.signum() {
                a = m;
            } else {
                b = m;
            }
        }
        let centre = 0.5 * (a + b);
        let h = 1e-3 * (centre - lo).min(hi - centre);
        let slope = (den(centre + h)?.re - den(centre - h)?.re) / (2.0 * h);
        let width = (den(centre)?.im / slope).abs();
        let width = if width.is_finite() { width.max(1e-12 * centre.abs()) } else { h };
        found.push((centre, width));
    }
    Ok(found)
}

fn resonance_breakpoints(res: &[(f64, f64)], lo: f64, hi: f64) -> Vec<f64> {
    let mut pts = Vec::new();
    for &(c, w) in res {
        pts.push(c);
        for m in [1.0, 4.0, 16.0, 64.0] {
            pts.push(c - m * w);
            pts.push(c + m * w);
        }
    }
    pts.retain(|&p| p > lo && p < hi);
    pts
}

fn sorted_points(lo: f64, hi: f64, mut interior: Vec<f64>) -> Vec<f64> {
    interior.retain(|&p| p > lo && p < hi);
    interior.push(lo);
    interior.push(hi);
    interior.sort_by(f64::total_cmp);
    interior.dedup();
    interior
}

/// Runs `body` with an integrand whose failures are recorded instead of
/// aborting the quadrature, then reports the first failure.
fn guarded<T, G>(body: G) -> Result<T>
where
    G: FnOnce(&dyn Fn(Result<f64>) -> f64) -> Result<T>,
{
    let failure = Cell::new(None);
    let record = |r: Result<f64>| match r {
        Ok(v) => v,
        Err(e) => {
            failure.set(Some(e));
            f64::NAN
        }
    };
    let out = body(&record);
    if let Some(e) = failure.take() {
        return Err(e);
    }
    out
}

/// Reduced-variable integrands at fixed separation and graphene temperature.
struct Reduced<'m> {
    model: &'m ForceModel,
    a: f64,
    t_g: f64,
    omega_a: f64,
    /// `v_F/c`.
    beta_f: f64,
}

struct Sample {
    /// `qΠ₀₀ + 2ħk²`.
    den_tm: Complex64,
    r: ReflectionPair,
}

impl<'m> Reduced<'m> {
    fn new(model: &'m ForceModel, a: f64, t_g: f64) -> Self {
        let c = model.constants();
        Self { model, a, t_g, omega_a: c.c / (2.0 * a), beta_f: c.v_f / c.c }
    }

    fn sample(&self, p: &SpectralPoint) -> Result<Sample> {
        let g = self.model.graphene();
        let tensor = g.polarization(p)?;
        let r = g.reflection_from(p, &tensor)?;
        let k = p.k_perp();
        let den_tm = p.q() * tensor.pi00 + 2.0 * g.constants().hbar * k * k;
        Ok(Sample { den_tm, r })
    }

    /// Samples at wavenumber `v`; a node that rounds exactly onto the band
    /// edge is moved a few ulps outward, where the response is continuous.
    fn off_edge(&self, v: f64, point: impl Fn(f64) -> Result<SpectralPoint>) -> Result<Sample> {
        match point(v).and_then(|p| self.sample(&p)) {
            Err(Error::Boundary(_)) => self.sample(&point(v * (1.0 + 4.0 * f64::EPSILON))?),
            other => other,
        }
    }

    fn at_y(&self, x: f64, y: f64) -> Result<Sample> {
        self.off_edge(y / (2.0 * self.a), |v| {
            SpectralPoint::evanescent(x * self.omega_a, v, self.t_g, self.model.constants())
        })
    }

    fn at_k(&self, x: f64, big_k: f64) -> Result<Sample> {
        self.off_edge(big_k / (2.0 * self.a), |v| {
            SpectralPoint::real(x * self.omega_a, v, self.t_g, self.model.constants())
        })
    }

    /// `y` of the band edge `k = ω/v_F`.
    fn band_edge_y(&self, x: f64) -> f64 {
        x * ((1.0 - self.beta_f) * (1.0 + self.beta_f)).sqrt() / self.beta_f
    }

    /// `∫₀^∞ y e^{−y} Im[(2y² + x²)R_TM + x²R_TE] dy`.
    fn evanescent_y(&self, x: f64, cfg: &QuadConfig) -> Result<IntegralEstimate<f64>> {
        let yb = self.band_edge_y(x);
        let top = yb.min(Y_CUT);
        let res = resonances(|y| self.at_y(x, y).map(|s| s.den_tm), 0.0, top)?;
        let points = sorted_points(0.0, top, resonance_breakpoints(&res, 0.0, top));
        let x2 = x * x;
        guarded(|record| {
            let f = |y: f64| {
                record(self.at_y(x, y).map(|s| y * (-y).exp() * ((2.0 * y * y + x2) * s.r.r_tm.im + x2 * s.r.r_te.im)))
            };
            // At small x the band below y_b carries a sharp but tiny plasmon
            // peak; it only needs to be resolved against the far tail.
            let tail = if yb < Y_CUT { integrate_decaying_tail(&f, yb, 1.0, cfg)? } else { IntegralEstimate::zero() };
            let band_cfg = cfg.with_abs_tol(cfg.abs_tol.max(0.5 * cfg.rel_tol * tail.value.abs()));
            Ok(integrate_adaptive(&f, &points, &band_cfg)?.join(tail))
        })
    }

    /// `A`-weighted reflection sum in reduced units at `(x, K)`.
    fn weighted(x: f64, big_k: f64, r: &ReflectionPair) -> Complex64 {
        let x2 = x * x;
        r.r_tm * (2.0 * big_k * big_k - x2) + r.r_te * x2
    }

    /// `∫_x^∞ K e^{−sqrt(K² − x²)} Im[(2K² − x²)R_TM + x²R_TE] dK`, the same
    /// evanescent integral as [`Self::evanescent_y`] taken in `K`.
    fn evanescent_k(&self, x: f64, cfg: &QuadConfig) -> Result<IntegralEstimate<f64>> {
        let kb = x / self.beta_f;
        let k_cut = x.hypot(Y_CUT);
        let top = kb.min(k_cut);
        let res = resonances(|k| self.at_k(x, k).map(|s| s.den_tm), x, top)?;
        let points = sorted_points(x, top, resonance_breakpoints(&res, x, top));
        guarded(|record| {
            let f = |k: f64, off: f64| {
                let dist = if off > 0.0 { off } else { k - x };
                let kz = (dist * (k + x)).sqrt();
                record(self.at_k(x, k).map(|s| k * (-kz).exp() * Self::weighted(x, k, &s.r).im))
            };
            let g = |k: f64| f(k, 0.0);
            let tail = if kb < k_cut { integrate_decaying_tail(&g, kb, 1.0, cfg)? } else { IntegralEstimate::zero() };
            let band_cfg = cfg.with_abs_tol(cfg.abs_tol.max(0.5 * cfg.rel_tol * tail.value.abs()));
            // The light-line end has a square-root edge.
            let mut est = integrate_endpoint_singular_with(&f, points[0], points[1], true, false, &band_cfg)?;
            if points.len() > 2 {
                est = est.join(integrate_adaptive(&g, &points[1..], &band_cfg)?);
            }
            Ok(est.join(tail))
        })
    }

    /// `∫₀^x K Im[e^{i sqrt(x² − K²)} ((2K² − x²)R_TM + x²R_TE)] dK` over
    /// propagating waves.
    fn propagating_k(&self, x: f64, cfg: &QuadConfig) -> Result<IntegralEstimate<f64>> {
        let res = resonances(|k| self.at_k(x, k).map(|s| s.den_tm), 0.0, x)?;
        let points = sorted_points(0.0, x, resonance_breakpoints(&res, 0.0, x));
        guarded(|record| {
            let f = |k: f64, off: f64| {
                let dist = if off < 0.0 { -off } else { x - k };
                let phase = Complex64::from_polar(1.0, (dist * (x + k)).sqrt());
                record(self.at_k(x, k).map(|s| k * (phase * Self::weighted(x, k, &s.r)).im))
            };
            let n = points.len();
            let mut est = IntegralEstimate::zero();
            if n > 2 {
                let g = |k: f64| f(k, 0.0);
                est = integrate_adaptive(&g, &points[..n - 1], cfg)?;
            }
            // The light-line end has a square-root edge.
            Ok(est.join(integrate_endpoint_singular_with(&f, points[n - 2], points[n - 1], false, true, cfg)?))
        })
    }
}

impl ForceModel {
    /// Upper reduced frequency and outer breakpoints.
    fn frequency_range(&self, a: f64, t_e: f64, t_g: f64) -> Result<(f64, Vec<f64>)> {
        let c = self.constants();
        let t_max = t_e.max(t_g);
        let omega_max = OMEGA_MAX_THERMAL * c.k_b * t_max / c.hbar;
        if c.hbar * omega_max > DIRAC_MODEL_LIMIT_EV * ELECTRON_VOLT {
            return Err(Error::Domain(format!(
                "frequency cutoff {:.3} eV exceeds the Dirac-model range ({DIRAC_MODEL_LIMIT_EV} eV); T = {t_max} K is too hot",
                c.hbar * omega_max / ELECTRON_VOLT
            )));
        }
        let omega_a = c.c / (2.0 * a);
        let x_max = omega_max / omega_a;
        let mut points = Vec::new();
        for t in [t_e, t_g] {
            if t > 0.0 {
                let xt = c.k_b * t / (c.hbar * omega_a);
                points.extend([0.1, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0].map(|m| m * xt));
            }
        }
        // Where the band edge leaves the e^{−y} window.
        let xb = Y_CUT * c.v_f / c.c;
        points.extend([0.01 * xb, 0.1 * xb, xb]);
        points.retain(|&p| p > 0.0 && p < x_max);
        points.sort_by(f64::total_cmp);
        points.dedup();
        Ok((x_max, points))
    }

    fn check_separation(a: f64, t_e: f64, t_g: f64) -> Result<()> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::Domain(format!("separation must be positive, got {a}")));
        }
        for t in [t_e, t_g] {
            if !(t >= 0.0) || !t.is_finite() {
                return Err(Error::Domain(format!("temperature must be >= 0, got {t}")));
            }
        }
        Ok(())
    }

    /// Evanescent-wave addition to `F̃(a, T_E; T_g)`, with its error.
    /// Exactly zero, without quadrature, when `T_E = T_g`.
    pub fn noneq_delta(&self, a: f64, t_e: f64, t_g: f64, spec: &NanoparticleSpec) -> Result<IntegralEstimate<f64>> {
        Self::check_separation(a, t_e, t_g)?;
        let alpha0 = spec.polarizability()?;
        if t_e == t_g {
            return Ok(IntegralEstimate::zero());
        }
        let (x_max, points) = self.frequency_range(a, t_e, t_g)?;
        let reduced = Reduced::new(self, a, t_g);
        let inner = self.inner_cfg();
        let consts = *self.constants();
        let outer = |x: f64| -> Result<IntegralEstimate<f64>> {
            let th = theta(x * reduced.omega_a, t_e, t_g, &consts);
            Ok(reduced.evanescent_y(x, &inner)?.scale(th))
        };
        let est = integrate_double(outer, 0.0, x_max, &points, &self.outer_cfg())?;
        let pre = 2.0 * consts.hbar * consts.c * alpha0 / (std::f64::consts::PI * (2.0 * a).powi(5));
        Ok(est.scale(pre))
    }

    /// `F̃(a, T_E; T_g)` plus the evanescent addition. Equals
    /// [`ForceModel::equilibrium_force`] exactly when `T_E = T_g`.
    pub fn noneq_force(&self, a: f64, t_e: f64, t_g: f64, spec: &NanoparticleSpec) -> Result<ForceResult> {
        let delta = self.noneq_delta(a, t_e, t_g, spec)?;
        let tilde = self.lifshitz_tilde_force(a, t_e, t_g, spec)?;
        Ok(ForceResult {
            force: tilde.force + delta.value,
            equilibrium_like: tilde.force,
            nonequilibrium: delta.value,
            error: tilde.error + delta.abs_error,
            matsubara_terms: tilde.matsubara_terms,
            breakdown: Some(NoneqBreakdown {
                f_tilde_te_tg: tilde.force,
                delta_evanescent: delta.value,
                ..NoneqBreakdown::default()
            }),
        })
    }

    /// Rebuilds the force from the propagating-plus-evanescent split and
    /// compares it with [`ForceModel::noneq_force`]; also compares the
    /// real-frequency half-difference with two Matsubara sums.
    ///
    /// Needs `T_g > 0` because `F̃(a, T_g; T_g)` is a Matsubara sum at `T_g`.
    pub fn cross_check_representation(
        &self,
        a: f64,
        t_e: f64,
        t_g: f64,
        spec: &NanoparticleSpec,
    ) -> Result<ConsistencyReport> {
        Self::check_separation(a, t_e, t_g)?;
        if !(t_g > 0.0) || !(t_e > 0.0) {
            return Err(Error::Domain("cross-check needs positive temperatures".into()));
        }
        let alpha0 = spec.polarizability()?;
        let f_neq = self.noneq_force(a, t_e, t_g, spec)?;
        let tilde_gg = self.equilibrium_force(a, t_g, spec)?.force;
        let tilde_eg = f_neq.equilibrium_like;
        let consts = *self.constants();

        // Pair of integrals (propagating, evanescent) packed in one complex.
        let (prop, evan) = if t_e == t_g {
            (0.0, 0.0)
        } else {
            let (x_max, mut points) = self.frequency_range(a, t_e, t_g)?;
            // The propagating phase turns over once per 2π in x.
            let mut turn = 2.0 * std::f64::consts::PI;
            while turn < x_max {
                points.push(turn);
                turn += 2.0 * std::f64::consts::PI;
            }
            points.sort_by(f64::total_cmp);
            let reduced = Reduced::new(self, a, t_g);
            let inner = self.inner_cfg();
            let outer = |x: f64| -> Result<IntegralEstimate<Complex64>> {
                let th = theta(x * reduced.omega_a, t_e, t_g, &consts);
                let p = reduced.propagating_k(x, &inner)?;
                let e = reduced.evanescent_k(x, &inner)?;
                Ok(IntegralEstimate {
                    value: Complex64::new(p.value, e.value) * th,
                    abs_error: (p.abs_error + e.abs_error) * th.abs(),
                    evaluations: p.evaluations + e.evaluations,
                })
            };
            let est = integrate_double(outer, 0.0, x_max, &points, &self.outer_cfg())?;
            (est.value.re, est.value.im)
        };
        let pre = consts.hbar * consts.c * alpha0 / (std::f64::consts::PI * (2.0 * a).powi(5));
        let half_real = pre * (prop + evan);
        let delta_f = -pre * (prop - evan);
        let f_term = tilde_eg + half_real;
        let assembly = f_term + delta_f;
        let half_matsubara = 0.5 * (tilde_gg - tilde_eg);
        Ok(ConsistencyReport {
            f_tilde_tg_tg: tilde_gg,
            f_tilde_te_tg: tilde_eg,
            half_difference_real: half_real,
            half_difference_matsubara: half_matsubara,
            f_term,
            delta_f,
            assembly,
            f_neq: f_neq.force,
            representation_gap: relative_gap(assembly, f_neq.force),
            matsubara_gap: relative_gap(half_real, half_matsubara),
            tolerance: CROSS_CHECK_TOLERANCE,
        })
    }
}

/// [`ForceModel::noneq_delta`] with default constants and tolerances.
pub fn noneq_delta(a: f64, t_e: f64, t_g: f64, spec: &NanoparticleSpec) -> Result<f64> {
    Ok(ForceModel::default().noneq_delta(a, t_e, t_g, spec)?.value)
}

/// [`ForceModel::noneq_force`] with default constants and tolerances.
pub fn noneq_force(a: f64, t_e: f64, t_g: f64, spec: &NanoparticleSpec) -> Result<ForceResult> {
    ForceModel::default().noneq_force(a, t_e, t_g, spec)
}

/// [`ForceModel::cross_check_representation`] with default constants and tolerances.
pub fn cross_check_representation(a: f64, t_e: f64, t_g: f64, spec: &NanoparticleSpec) -> Result<ConsistencyReport> {
    ForceModel::default().cross_check_representation(a, t_e, t_g, spec)
}
