//! Tensor on the imaginary frequency axis `ω = iξ`.
//!
//! Continuing the far-evanescent expressions to `ω = iξ` gives
//! `Ω̃ = sqrt(v_F²k² + ξ²)`, `γ = ξ/Ω̃ < 1` and
//! `S_λ = sqrt(1 − v² − 2iλγv)`. The two `λ` terms are complex conjugates,
//! so only the real part survives:
//!
//! ```text
//! Π₀₀ = παħk²c/Ω̃   + (8αħcΩ̃/v_F²)  ∫ f(Dv) [1 − Re S₊] dv
//! Π   = παħk²Ω̃/c   + (8αħΩ̃³/cv_F²) ∫ f(Dv) [−γ² − Re((v + iγ)²/S₊)] dv
//! ```
//!
//! At `ξ = 0`, `Π` is evaluated in the form
//! `(8αħΩ̃³/cv_F²) ∫₀¹ v²/sqrt(1 − v²) · ½tanh(Dv/2) dv`, which is manifestly
//! positive and avoids cancelling the vacuum term at high temperature.

use num_complex::Complex64;

use super::{csqrt, fermi, Frequency, GrapheneResponse, MatsubaraPolarization, SpectralPoint};
use crate::error::{Error, Result};
use crate::quadrature::{
    integrate_adaptive, integrate_decaying_tail_with_breakpoints, integrate_endpoint_singular_with, QuadConfig,
};

#[derive(Debug, Clone, Copy, Default)]
struct Pair {
    pi00: f64,
    pi: f64,
}

impl std::ops::Add for Pair {
    type Output = Self;
    fn add(self, r: Self) -> Self {
        Pair { pi00: self.pi00 + r.pi00, pi: self.pi + r.pi }
    }
}

impl std::ops::Sub for Pair {
    type Output = Self;
    fn sub(self, r: Self) -> Self {
        Pair { pi00: self.pi00 - r.pi00, pi: self.pi - r.pi }
    }
}

impl std::ops::Mul<f64> for Pair {
    type Output = Self;
    fn mul(self, r: f64) -> Self {
        Pair { pi00: self.pi00 * r, pi: self.pi * r }
    }
}

impl crate::quadrature::Quadrand for Pair {
    fn magnitude(&self) -> f64 {
        self.pi00.abs() + self.pi.abs()
    }
    fn is_finite(&self) -> bool {
        self.pi00.is_finite() && self.pi.is_finite()
    }
}

struct Kernel {
    gamma: f64,
    /// `1 − γ² = (v_F k/Ω̃)²`, kept separately because both brackets are
    /// `O(ε)` differences of `O(1)` terms when `ξ ≫ v_F k`.
    eps: f64,
    d: f64,
}

impl Kernel {
    /// Brackets at `v`. The `λ = ±1` terms are complex conjugates, so with
    /// `R = 1 − v² − 2iγv` and `S = sqrt(R)` the sums are
    /// `2(1 − Re S)` and `2[−(1 − Re S) + ε(1 − Re S/|R|)]`.
    ///
    /// Both are `O(εv²)` at small `v`, where the Fermi weight of cold
    /// graphene sits, so the differences are taken in closed form:
    /// `1 − Re S = b/(1 + Re S)` with `b = 2εv²/(1 + v² + |R|)`, and
    /// `1 − |R| = v²(4ε − 2 − v²)/(1 + |R|)`.
    fn brackets(&self, v: f64) -> Pair {
        let (g, eps) = (self.gamma, self.eps);
        let re_r = (1.0 - v) * (1.0 + v);
        let abs_r = re_r.hypot(2.0 * g * v);
        let re_s = csqrt(Complex64::new(re_r, -2.0 * g * v)).re;
        let b = 2.0 * eps * v * v / (1.0 + v * v + abs_r);
        let one_minus_re_s = b / (1.0 + re_s);
        let s00 = 2.0 * one_minus_re_s;
        // At ξ = 0 the transverse bracket has a bare 1/sqrt(1 − v) edge and
        // is evaluated separately.
        let spi = if g > 0.0 {
            let one_minus_abs_r = v * v * (4.0 * eps - 2.0 - v * v) / (1.0 + abs_r);
            2.0 * (-one_minus_re_s + eps * (one_minus_re_s - one_minus_abs_r) / abs_r)
        } else {
            0.0
        };
        let f = fermi(self.d * v);
        Pair { pi00: 0.5 * f * s00, pi: 0.5 * f * spi }
    }
}

fn thermal_brackets(k: &Kernel, cfg: &QuadConfig) -> Result<Pair> {
    let piece_cfg = QuadConfig { rel_tol: 0.5 * cfg.rel_tol, ..*cfg };
    // The radicand comes closest to zero at v = 1, within γ; place
    // breakpoints at 1 ± γ·{1, 4, 16} when γ is small.
    let mut points = vec![0.0];
    let g = k.gamma;
    if g < 0.25 {
        for m in [16.0, 4.0, 1.0] {
            points.push(1.0 - m * g);
        }
    }
    points.push(1.0);
    points.retain(|&p| p >= 0.0);
    points.sort_by(f64::total_cmp);
    points.dedup();

    let f = |v: f64| k.brackets(v);
    let below = integrate_adaptive(&f, &points, &piece_cfg);
    let mut tail_points = Vec::new();
    if g < 0.25 {
        for m in [1.0, 4.0, 16.0] {
            tail_points.push(1.0 + m * g);
        }
    }
    let above = integrate_decaying_tail_with_breakpoints(&f, 1.0, 1.0 / k.d, &tail_points, &piece_cfg);
    Ok(below?.value + above?.value)
}

/// `∫₀¹ v²/sqrt(1 − v²) · (½ − f(Dv)) dv`, the `ξ = 0` form of `Π` with the
/// vacuum term included.
fn static_transverse(d: f64, cfg: &QuadConfig) -> Result<f64> {
    let est = integrate_endpoint_singular_with(
        |v, off| {
            let one_minus = if off < 0.0 { -off } else { 1.0 - v };
            let h = 0.5 * (0.5 * d * v).tanh();
            v * v / (one_minus * (1.0 + v)).sqrt() * h
        },
        0.0,
        1.0,
        false,
        true,
        cfg,
    )?;
    Ok(est.value)
}

pub(crate) fn evaluate(resp: &GrapheneResponse, point: &SpectralPoint) -> Result<MatsubaraPolarization> {
    let xi = match point.frequency() {
        Frequency::Imaginary(xi) => xi,
        Frequency::Real(_) => {
            return Err(Error::Domain("imaginary-axis tensor needs ω = iξ".into()));
        }
    };
    let consts = resp.constants();
    let k_perp = point.k_perp();
    let vk = consts.v_f * k_perp;
    let cpt = vk.hypot(xi);
    let scale = std::f64::consts::PI * consts.alpha_fs * consts.hbar * k_perp * k_perp;
    let mut pi00 = scale * consts.c / cpt;
    let mut pi = scale * cpt / consts.c;
    let t = point.temperature();
    if t == 0.0 {
        return Ok(MatsubaraPolarization { pi00, pi });
    }
    let d = cpt / resp.fermi_frequency(t);
    let k = Kernel { gamma: xi / cpt, eps: (vk / cpt).powi(2), d };
    let pre = resp.thermal_prefactor() * cpt;
    let brackets = thermal_brackets(&k, resp.quad())?;
    pi00 += pre * consts.c * brackets.pi00;
    if xi == 0.0 {
        pi = pre * cpt * cpt / consts.c * static_transverse(d, resp.quad())?;
    } else {
        pi += pre * cpt * cpt / consts.c * brackets.pi;
    }
    Ok(MatsubaraPolarization { pi00, pi })
}
