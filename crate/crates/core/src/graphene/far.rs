//! Tensor for `k > ω/v_F` on the real axis.
//!
//! With `Ω̃ = c p̃ = sqrt(v_F²k² − ω²)`, `g = ω/Ω̃` and `D = Ω̃/(2k_BT/ħ)`
//! the thermal corrections are
//!
//! ```text
//! Π₀₀⁽¹⁾ = (8αħcΩ̃/v_F²)  ∫₀^∞ dv f(Dv) [1 − ½ Σ_λ S_λ]
//! Π⁽¹⁾   = (8αħΩ̃³/cv_F²) ∫₀^∞ dv f(Dv) [g² − ½ Σ_λ (v + λg)²/S_λ]
//! S_λ    = sqrt(1 − v² − 2λgv)
//! ```
//!
//! `S₊` vanishes at `v₊ = 1/(sqrt(1+g²) + g)` and `S₋` at
//! `v₋ = sqrt(1+g²) + g`. Past its root each radicand is negative; for
//! `ω + i0` the retarded branch is `S_λ = −iλ sqrt(|·|)`, which makes the
//! sum continuous in `v` and the `ω → 0` limit real.

use num_complex::Complex64;

use super::{fermi, GrapheneResponse, PolarizationPair, SpectralPoint};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_decaying_tail, integrate_endpoint_singular_with, IntegralEstimate, QuadConfig};

struct Kernel {
    /// `c p̃`
    cpt: f64,
    g: f64,
    /// `Ω̃ / τ`
    d: f64,
    v_plus: f64,
    v_minus: f64,
}

impl Kernel {
    fn new(resp: &GrapheneResponse, point: &SpectralPoint) -> Result<Self> {
        let omega =
            point.omega().ok_or_else(|| Error::Domain("far-evanescent tensor needs a real frequency".into()))?;
        let vk = resp.consts.v_f * point.k_perp();
        if vk <= omega {
            return Err(Error::Boundary(format!(
                "far-evanescent expressions need v_F k > omega (omega = {omega:e}, v_F k = {vk:e})"
            )));
        }
        let cpt = ((vk - omega) * (vk + omega)).sqrt();
        let g = omega / cpt;
        let root = g.hypot(1.0);
        let tau = resp.fermi_frequency(point.temperature());
        Ok(Self { cpt, g, d: cpt / tau, v_plus: 1.0 / (root + g), v_minus: root + g })
    }

    /// Brackets at `v`, given the exact signed distances `a = v₊ − v` and
    /// `b = v₋ − v`.
    fn brackets(&self, v: f64, a: f64, b: f64) -> PolarizationPair {
        let s_plus = branch(a * (self.v_minus + v), 1.0);
        let s_minus = branch(b * (v + self.v_plus), -1.0);
        let g = self.g;
        let b00 = Complex64::new(1.0, 0.0) - (s_plus + s_minus) * 0.5;
        let bpi = Complex64::new(g * g, 0.0) - ((v + g) * (v + g) / s_plus + (v - g) * (v - g) / s_minus) * 0.5;
        PolarizationPair::new(b00, bpi) * fermi(self.d * v)
    }
}

/// `S_λ` from its radicand.
fn branch(radicand: f64, lambda: f64) -> Complex64 {
    if radicand >= 0.0 {
        Complex64::new(radicand.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, -lambda * (-radicand).sqrt())
    }
}

/// Fermi decay lengths covered by tanh-sinh past `v₋`.
const OUTER_DE_SPAN: f64 = 40.0;

fn integrate_brackets(k: &Kernel, cfg: &QuadConfig) -> Result<IntegralEstimate<PolarizationPair>> {
    let piece_cfg = QuadConfig { rel_tol: 0.25 * cfg.rel_tol, ..*cfg };
    let (vp, vm) = (k.v_plus, k.v_minus);
    // [0, v₊]: right half offsets are v − v₊.
    let inner = integrate_endpoint_singular_with(
        |v, off| {
            if off < 0.0 {
                k.brackets(vp + off, -off, vm - vp - off)
            } else {
                k.brackets(v, vp - v, vm - v)
            }
        },
        0.0,
        vp,
        false,
        true,
        &piece_cfg,
    )?;
    let middle = integrate_endpoint_singular_with(
        |_v, off| {
            if off > 0.0 {
                k.brackets(vp + off, -off, vm - vp - off)
            } else {
                k.brackets(vm + off, vp - vm - off, -off)
            }
        },
        vp,
        vm,
        true,
        true,
        &piece_cfg,
    )?;
    let span = vm.min(OUTER_DE_SPAN / k.d);
    let outer_near = integrate_endpoint_singular_with(
        |v, off| {
            if off > 0.0 {
                k.brackets(vm + off, vp - vm - off, -off)
            } else {
                k.brackets(v, vp - v, vm - v)
            }
        },
        vm,
        vm + span,
        true,
        false,
        &piece_cfg,
    )?;
    let outer_far = integrate_decaying_tail(|v| k.brackets(v, vp - v, vm - v), vm + span, 1.0 / k.d, &piece_cfg)?;
    Ok(inner.join(middle).join(outer_near).join(outer_far))
}

/// `Π₀₀⁽⁰⁾ = παħk²/p̃`, `Π⁽⁰⁾ = παħk²p̃`.
pub(crate) fn zero_temperature_parts(resp: &GrapheneResponse, k_perp: f64, cpt: f64) -> PolarizationPair {
    let c = &resp.consts;
    let scale = std::f64::consts::PI * c.alpha_fs * c.hbar * k_perp * k_perp;
    PolarizationPair::new(Complex64::new(scale * c.c / cpt, 0.0), Complex64::new(scale * cpt / c.c, 0.0))
}

pub(crate) fn zero_temperature(resp: &GrapheneResponse, point: &SpectralPoint) -> PolarizationPair {
    let vk = resp.consts.v_f * point.k_perp();
    let omega = point.omega().unwrap_or(0.0);
    let cpt = ((vk - omega) * (vk + omega)).sqrt();
    zero_temperature_parts(resp, point.k_perp(), cpt)
}

pub(crate) fn thermal(resp: &GrapheneResponse, point: &SpectralPoint) -> Result<PolarizationPair> {
    let k = Kernel::new(resp, point)?;
    if point.temperature() == 0.0 {
        return Ok(PolarizationPair::default());
    }
    let est = integrate_brackets(&k, &resp.quad)?;
    let c = resp.consts.c;
    let pre = resp.thermal_prefactor() * k.cpt;
    Ok(PolarizationPair::new(est.value.pi00 * (pre * c), est.value.pi * (pre * k.cpt * k.cpt / c)))
}

pub(crate) fn total(resp: &GrapheneResponse, point: &SpectralPoint) -> Result<PolarizationPair> {
    Ok(zero_temperature(resp, point) + thermal(resp, point)?)
}
