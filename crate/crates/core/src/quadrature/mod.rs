//! Adaptive integration engine.
//!
//! Three entry points cover every integral in the crate:
//!
//! * [`integrate_decaying_tail`] for `[lower, ∞)` integrands that eventually
//!   decay exponentially (Fermi and Bose weights, the `exp(-2aq)` factor);
//! * [`integrate_endpoint_singular`] for finite intervals with integrable
//!   (at worst inverse-square-root) endpoint singularities, by tanh-sinh;
//! * [`integrate_double`] for an outer adaptive integral whose integrand is
//!   itself a quadrature carrying its own error estimate.
//!
//! All routines are generic over [`Quadrand`], so the same code integrates
//! real, complex and composite (tensor pair) integrands. Evaluation order
//! is fixed, so results are bit-reproducible.

mod gauss_kronrod;
mod tanh_sinh;

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use thiserror::Error;

pub use gauss_kronrod::{integrate_adaptive, integrate_adaptive_with_error};
pub use tanh_sinh::{integrate_endpoint_singular, integrate_endpoint_singular_with};

/// Value type that can be integrated.
pub trait Quadrand:
    Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + fmt::Debug
{
    /// A norm used for error control.
    fn magnitude(&self) -> f64;

    fn is_finite(&self) -> bool;
}

impl Quadrand for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }

    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

impl Quadrand for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }

    fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralEstimate<T> {
    pub value: T,
    pub abs_error: f64,
    pub evaluations: usize,
}

impl<T: Quadrand> IntegralEstimate<T> {
    pub fn zero() -> Self {
        Self { value: T::default(), abs_error: 0.0, evaluations: 0 }
    }

    /// Combine two estimates of disjoint pieces of one integral.
    pub fn join(self, other: Self) -> Self {
        Self {
            value: self.value + other.value,
            abs_error: self.abs_error + other.abs_error,
            evaluations: self.evaluations + other.evaluations,
        }
    }

    pub fn map<U: Quadrand>(self, f: impl FnOnce(T) -> U) -> IntegralEstimate<U> {
        IntegralEstimate { value: f(self.value), abs_error: self.abs_error, evaluations: self.evaluations }
    }

    pub fn scale(self, factor: f64) -> Self {
        Self { value: self.value * factor, abs_error: self.abs_error * factor.abs(), evaluations: self.evaluations }
    }
}

pub const DEFAULT_BUDGET: usize = 1_000_000;
pub const TENSOR_REL_TOL: f64 = 1e-8;
pub const FORCE_REL_TOL: f64 = 1e-6;

/// Stopping rule shared by all integrators: stop once the error estimate is
/// below `max(abs_tol, rel_tol * |I|)`; fail once more than
/// `max_evaluations` integrand calls would be needed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_evaluations: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self::new(TENSOR_REL_TOL)
    }
}

impl QuadConfig {
    pub fn new(rel_tol: f64) -> Self {
        Self { rel_tol, abs_tol: 0.0, max_evaluations: DEFAULT_BUDGET }
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_budget(mut self, max_evaluations: usize) -> Self {
        self.max_evaluations = max_evaluations;
        self
    }

    pub(crate) fn target(&self, value_magnitude: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value_magnitude)
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum QuadError<T: fmt::Debug> {
    #[error("evaluation budget {budget} exceeded; best estimate {:?} +- {:.3e}", best.value, best.abs_error)]
    BudgetExceeded { best: IntegralEstimate<T>, budget: usize },
    #[error("non-integrable endpoint singularity at x = {at}")]
    Singularity { at: f64 },
    #[error("integrand is not finite at x = {at}")]
    NonFinite { at: f64 },
    #[error("invalid integration range [{lower}, {upper}]")]
    InvalidRange { lower: f64, upper: f64 },
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum<T> {
    sum: T,
    correction: T,
}

impl<T: Quadrand> CompensatedSum<T> {
    pub(crate) fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.magnitude() >= x.magnitude() {
            self.correction = self.correction + ((self.sum - t) + x);
        } else {
            self.correction = self.correction + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    pub(crate) fn total(&self) -> T {
        self.sum + self.correction
    }
}

/// Number of decay lengths integrated explicitly before the exponential
/// tail bound takes over; `exp(-45) ≈ 2.9e-20`.
const TAIL_DECAY_LENGTHS: f64 = 45.0;

/// `∫_lower^∞ f(x) dx` for an integrand with `|f| ≲ C exp(-x / decay_scale)`
/// eventually.
pub fn integrate_decaying_tail<T, F>(
    f: F,
    lower: f64,
    decay_scale: f64,
    cfg: &QuadConfig,
) -> Result<IntegralEstimate<T>, QuadError<T>>
where
    T: Quadrand,
    F: Fn(f64) -> T,
{
    integrate_decaying_tail_with_breakpoints(f, lower, decay_scale, &[], cfg)
}

/// As [`integrate_decaying_tail`], with extra interior breakpoints where the
/// integrand has kinks or sharp features.
///
/// The range `[lower, lower + 45·decay_scale]` (extended while the integrand
/// is still large there) is integrated adaptively. What is left beyond the
/// cut is bounded by `|f(X)| · decay_scale`, which is added to the error.
pub fn integrate_decaying_tail_with_breakpoints<T, F>(
    f: F,
    lower: f64,
    decay_scale: f64,
    breakpoints: &[f64],
    cfg: &QuadConfig,
) -> Result<IntegralEstimate<T>, QuadError<T>>
where
    T: Quadrand,
    F: Fn(f64) -> T,
{
    if !(decay_scale > 0.0) || !lower.is_finite() {
        return Err(QuadError::InvalidRange { lower, upper: f64::INFINITY });
    }
    let mut upper = lower + TAIL_DECAY_LENGTHS * decay_scale;
    if let Some(&last) = breakpoints.iter().filter(|b| b.is_finite()).max_by(|a, b| a.total_cmp(b)) {
        if last >= upper {
            upper = last + TAIL_DECAY_LENGTHS * decay_scale;
        }
    }

    let mut points = vec![lower];
    let mut width = 0.5 * decay_scale;
    while lower + width < upper {
        points.push(lower + width);
        width *= 2.0;
    }
    points.extend(breakpoints.iter().copied().filter(|&b| b > lower && b < upper));
    points.push(upper);
    points.sort_by(f64::total_cmp);
    points.dedup();

    let mut result = integrate_adaptive(&f, &points, cfg)?;
    let mut tail = f(upper).magnitude() * decay_scale;
    result.evaluations += 1;

    // Extend while the tail is not negligible against the tolerance.
    let mut extensions = 0;
    while tail > 0.1 * cfg.target(result.value.magnitude()) && extensions < 8 {
        let next = upper + TAIL_DECAY_LENGTHS * decay_scale * f64::from(1u32 << extensions);
        let extra = integrate_adaptive(&f, &[upper, next], cfg)?;
        result = result.join(extra);
        upper = next;
        tail = f(upper).magnitude() * decay_scale;
        result.evaluations += 1;
        extensions += 1;
    }
    if !tail.is_finite() {
        return Err(QuadError::NonFinite { at: upper });
    }
    result.abs_error += tail;
    Ok(result)
}

/// Outer adaptive integral `∫_lower^upper g(x) dx` where each `g(x)` is itself
/// an [`IntegralEstimate`]. The returned error adds the outer Gauss-Kronrod
/// estimate and the weighted inner errors in quadrature. An infinite
/// `upper` is handled through `x = lower + L t / (1 - t)`, with `L` the
/// distance to the first breakpoint (1 without breakpoints).
pub fn integrate_double<T, F, E>(
    outer: F,
    lower: f64,
    upper: f64,
    breakpoints: &[f64],
    cfg: &QuadConfig,
) -> Result<IntegralEstimate<T>, E>
where
    T: Quadrand,
    F: Fn(f64) -> Result<IntegralEstimate<T>, E>,
    E: From<QuadError<T>>,
{
    if upper.is_infinite() {
        // The first breakpoint sets the length scale of the map.
        let scale = breakpoints
            .iter()
            .copied()
            .filter(|&b| b > lower && b.is_finite())
            .min_by(f64::total_cmp)
            .map_or(1.0, |b| b - lower);
        let mapped = |t: f64| -> Result<(T, f64), E> {
            let s = 1.0 - t;
            let jac = scale / (s * s);
            let inner = outer(lower + scale * t / s)?;
            Ok((inner.value * jac, inner.abs_error * jac))
        };
        let mut points: Vec<f64> = vec![0.0];
        points.extend(
            breakpoints.iter().filter(|&&b| b > lower && b.is_finite()).map(|&b| (b - lower) / (scale + b - lower)),
        );
        points.push(1.0);
        points.sort_by(f64::total_cmp);
        points.dedup();
        return integrate_adaptive_with_error(&mapped, &points, cfg);
    }
    let mut points = vec![lower];
    points.extend(breakpoints.iter().copied().filter(|&b| b > lower && b < upper));
    points.push(upper);
    points.sort_by(f64::total_cmp);
    points.dedup();
    let wrapped = |x: f64| -> Result<(T, f64), E> {
        let inner = outer(x)?;
        Ok((inner.value, inner.abs_error))
    };
    integrate_adaptive_with_error(&wrapped, &points, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cfg(rel: f64) -> QuadConfig {
        QuadConfig::new(rel)
    }

    #[test]
    fn decaying_tail_analytic_values() {
        let r = integrate_decaying_tail(|x: f64| (-x).exp(), 0.0, 1.0, &cfg(1e-10)).unwrap();
        assert!((r.value - 1.0).abs() < 1e-10, "{r:?}");
        let r = integrate_decaying_tail(|x: f64| x * (-2.0 * x).exp(), 0.0, 0.5, &cfg(1e-10)).unwrap();
        assert!((r.value - 0.25).abs() < 0.25e-10, "{r:?}");
        let r = integrate_decaying_tail(|x: f64| (-x).exp() * x.sin(), 0.0, 1.0, &cfg(1e-10)).unwrap();
        assert!((r.value - 0.5).abs() < 0.5e-10, "{r:?}");
    }

    #[test]
    fn decaying_tail_shifted_lower_limit() {
        // ∫_3^∞ e^{-x} = e^{-3}
        let r = integrate_decaying_tail(|x: f64| (-x).exp(), 3.0, 1.0, &cfg(1e-10)).unwrap();
        assert!((r.value / (-3.0f64).exp() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn decaying_tail_complex() {
        // ∫_0^∞ e^{-(1-i)x} dx = 1/(1-i) = (1+i)/2
        let r =
            integrate_decaying_tail(|x: f64| Complex64::new(0.0, x).exp() * (-x).exp(), 0.0, 1.0, &cfg(1e-10)).unwrap();
        assert!((r.value - Complex64::new(0.5, 0.5)).norm() < 1e-10);
    }

    #[test]
    fn decaying_tail_underestimated_scale_extends() {
        // Scale claims 1 but the integrand decays on a scale of 20.
        let r = integrate_decaying_tail(|x: f64| (-x / 20.0).exp(), 0.0, 1.0, &cfg(1e-9)).unwrap();
        assert!((r.value - 20.0).abs() < 20.0 * 1e-8, "{r:?}");
    }

    #[test]
    fn double_separable() {
        // ∫_0^2 x dx · ∫_0^∞ e^{-y} dy = 2
        let q = cfg(1e-10);
        let r = integrate_double(
            |x: f64| -> Result<_, QuadError<f64>> {
                Ok(integrate_decaying_tail(|y: f64| (-y).exp(), 0.0, 1.0, &q)?.scale(x))
            },
            0.0,
            2.0,
            &[],
            &cfg(1e-8),
        )
        .unwrap();
        assert!((r.value - 2.0).abs() < 2e-8, "{r:?}");
    }

    #[test]
    fn double_inner_reciprocal() {
        // inner ∫_0^∞ e^{-ωy} dy = 1/ω, outer weight ω e^{-ω} over (0, ∞)
        let q = cfg(1e-11);
        let r = integrate_double(
            |w: f64| -> Result<_, QuadError<f64>> {
                let inner = integrate_decaying_tail(|y: f64| (-w * y).exp(), 0.0, 1.0 / w, &q)?;
                Ok(inner.scale(w * (-w).exp()))
            },
            0.0,
            f64::INFINITY,
            &[1.0],
            &cfg(1e-8),
        )
        .unwrap();
        assert!((r.value - 1.0).abs() < 1e-8, "{r:?}");
    }

    #[test]
    fn double_zero_integrand_is_exact() {
        let r = integrate_double(
            |_x: f64| -> Result<_, QuadError<f64>> { Ok(IntegralEstimate::zero()) },
            0.0,
            5.0,
            &[],
            &cfg(1e-6),
        )
        .unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.abs_error, 0.0);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::default();
        s.add(1.0);
        for _ in 0..10 {
            s.add(1e-17);
        }
        s.add(-1.0);
        assert!((s.total() - 1e-16).abs() < 1e-30);
    }

    #[test]
    fn singular_examples() {
        let r = integrate_endpoint_singular(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, true, false, &cfg(1e-10)).unwrap();
        assert!((r.value - 2.0).abs() < 2e-10, "{r:?}");
        let r = integrate_endpoint_singular(|x: f64| 1.0 / (x * (1.0 - x)).sqrt(), 0.0, 1.0, true, true, &cfg(1e-8))
            .unwrap();
        assert!((r.value - PI).abs() < PI * 1e-8, "{r:?}");
        // With the endpoint offset the integrand keeps full precision next to x = 1.
        let r = integrate_endpoint_singular_with(
            |x: f64, off: f64| {
                let one_minus = if off < 0.0 { -off } else { 1.0 - x };
                x * x / (one_minus * (1.0 + x)).sqrt()
            },
            0.0,
            1.0,
            false,
            true,
            &cfg(1e-10),
        )
        .unwrap();
        assert!((r.value - PI / 4.0).abs() < PI / 4.0 * 1e-10, "{r:?}");
    }

    #[test]
    fn singular_plain_closure_near_right_end() {
        let r = integrate_endpoint_singular(|x: f64| x * x / (1.0 - x * x).sqrt(), 0.0, 1.0, false, true, &cfg(1e-7))
            .unwrap();
        assert!((r.value - PI / 4.0).abs() < PI / 4.0 * 1e-7, "{r:?}");
    }

    #[test]
    fn non_integrable_singularity_is_reported() {
        let r = integrate_endpoint_singular(|x: f64| 1.0 / x, 0.0, 1.0, true, false, &cfg(1e-8));
        assert!(matches!(r, Err(QuadError::Singularity { .. })), "{r:?}");
    }
}
