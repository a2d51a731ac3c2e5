//! Tensor for `ω > v_F k`: the plasmonic band `ω/c ≤ k < ω/v_F` and, by
//! the same expressions, the propagating region `k < ω/c`.
//!
//! The thermal corrections are Fermi-weighted integrals over
//! `u ∈ [0, ∞)`. We integrate in `y = 2cu − ω`, for which the square roots
//! `B₁(y) = sqrt(y² − v_F²k²)` change character at `y = ±v_F k`:
//!
//! * `y < −v_F k`: `B₁` real, enters with `+`;
//! * `|y| < v_F k`: `B₁ = i sqrt(v_F²k² − y²)`, giving the imaginary parts;
//! * `y > v_F k`: `B₁` real, enters with `−`.
//!
//! The `Π` integrand carries `y² / B₁`, which diverges as an inverse square
//! root at both `y = ±v_F k`. Each of the three pieces is therefore written
//! in the distance `s ≥ 0` from the nearest branch point and integrated by
//! tanh-sinh, with an exponential tail beyond.

use num_complex::Complex64;

use super::{fermi, GrapheneResponse, PolarizationPair, SpectralPoint};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_decaying_tail, integrate_endpoint_singular_with, IntegralEstimate, QuadConfig};

/// Everything the integrands need at one `(ω, k, T)`.
struct Kernel {
    omega: f64,
    /// `v_F k`
    vk: f64,
    /// `c p = sqrt(ω² − v_F²k²)`
    cp: f64,
    /// `2 k_B T / ħ`
    tau: f64,
}

#[derive(Clone, Copy, PartialEq)]
enum Weighting {
    /// Fermi weight everywhere: the thermal correction alone.
    Thermal,
    /// Fermi weight on real parts, `(f − 1/2)` on imaginary parts: the
    /// zero-temperature part is folded into the thermal integral, which
    /// avoids cancelling the interband absorption against its Pauli blocking.
    Total,
}

impl Kernel {
    fn new(resp: &GrapheneResponse, point: &SpectralPoint) -> Result<Self> {
        let omega = point.omega().ok_or_else(|| Error::Domain("plasmonic tensor needs a real frequency".into()))?;
        let vk = resp.consts.v_f * point.k_perp();
        if vk >= omega {
            return Err(Error::Boundary(format!(
                "plasmonic expressions need omega > v_F k (omega = {omega:e}, v_F k = {vk:e})"
            )));
        }
        Ok(Self { omega, vk, cp: ((omega - vk) * (omega + vk)).sqrt(), tau: resp.fermi_frequency(point.temperature()) })
    }

    fn weight(&self, y: f64) -> f64 {
        fermi((y + self.omega) / self.tau)
    }

    /// `B₁(y + 2ω)`; its argument always exceeds `v_F k`.
    fn b1_shifted(&self, y: f64) -> f64 {
        let x = y + 2.0 * self.omega;
        ((x - self.vk) * (x + self.vk)).sqrt()
    }

    /// `ω − cp = v_F²k²/(ω + cp)`.
    fn defect(&self) -> f64 {
        self.vk * self.vk / (self.omega + self.cp)
    }

    /// `z²/r − z` for `r = sqrt(z² − v_F²k²)`, without cancellation.
    fn excess(&self, z: f64, r: f64) -> f64 {
        z * self.vk * self.vk / ((z + r) * r)
    }

    /// Piece `y ∈ [−ω, −v_F k]`, parametrized by `s = −v_F k − y`.
    ///
    /// Both brackets are `O(v_F²k²/ω²)` near the light line, so they are
    /// assembled from the defects `ω − cp`, `z − sqrt(z² − v_F²k²)` rather
    /// than from the `O(1)` terms.
    fn lower_piece(&self, s: f64) -> PolarizationPair {
        let y = -self.vk - s;
        let z = self.vk + s;
        let root = (s * (s + 2.0 * self.vk)).sqrt();
        let x = y + 2.0 * self.omega;
        let b1 = self.b1_shifted(y);
        let (w, cp, v2) = (self.omega, self.cp, self.vk * self.vk);
        let e = 1.0 / (x + b1) + 1.0 / (z + root);
        let b00 = v2 * (e - 2.0 / (w + cp)) / (2.0 * cp);
        let bpi = (2.0 * w * self.defect() - cp * (self.excess(x, b1) + self.excess(z, root))) / (2.0 * w * w);
        PolarizationPair::new(Complex64::new(b00, 0.0), Complex64::new(bpi, 0.0)) * self.weight(y)
    }

    /// Piece `y ∈ [−v_F k, v_F k]`, folded onto `s ∈ [0, v_F k]` so that both
    /// branch points sit at `s = 0`.
    fn middle_piece(&self, s: f64, weighting: Weighting) -> PolarizationPair {
        let root = (s * (2.0 * self.vk - s)).sqrt();
        let (w, cp, v2) = (self.omega, self.cp, self.vk * self.vk);
        let d = self.defect();
        let mut acc = PolarizationPair::default();
        for y in [-self.vk + s, self.vk - s] {
            let x = y + 2.0 * w;
            let b1 = self.b1_shifted(y);
            let b00 = Complex64::new((-y - 2.0 * d + v2 / (x + b1)) / (2.0 * cp), -root / (2.0 * cp));
            let bpi = Complex64::new(
                (2.0 * w * d - cp * (y + self.excess(x, b1))) / (2.0 * w * w),
                y * y / root * cp / (2.0 * w * w),
            );
            let wt = self.weight(y);
            let w_im = match weighting {
                Weighting::Thermal => wt,
                Weighting::Total => wt - 0.5,
            };
            acc = acc
                + PolarizationPair::new(
                    Complex64::new(wt * b00.re, w_im * b00.im),
                    Complex64::new(wt * bpi.re, w_im * bpi.im),
                );
        }
        acc
    }

    /// Piece `y ≥ v_F k`, parametrized by `s = y − v_F k`.
    fn upper_piece(&self, s: f64) -> PolarizationPair {
        let y = self.vk + s;
        let root = (s * (s + 2.0 * self.vk)).sqrt();
        let x = y + 2.0 * self.omega;
        let b1 = self.b1_shifted(y);
        let (w, cp, v2) = (self.omega, self.cp, self.vk * self.vk);
        let e = 1.0 / (x + b1) + 1.0 / (y + root);
        let b00 = -v2 * ((2.0 * y + 2.0 * w) / (w + cp) + cp * e) / (cp * (b1 + root));
        let bpi = (2.0 * w * self.defect() + cp * (self.excess(y, root) - self.excess(x, b1))) / (2.0 * w * w);
        PolarizationPair::new(Complex64::new(b00, 0.0), Complex64::new(bpi, 0.0)) * self.weight(y)
    }
}

/// Number of Fermi decay lengths handed to tanh-sinh on the upper piece
/// before switching to the exponential-tail integrator.
const UPPER_DE_SPAN: f64 = 40.0;

fn integrate_brackets(
    k: &Kernel,
    weighting: Weighting,
    cfg: &QuadConfig,
) -> Result<IntegralEstimate<PolarizationPair>> {
    let piece_cfg = QuadConfig { rel_tol: 0.25 * cfg.rel_tol, ..*cfg };
    // The edge singularity only extends over `s ≲ v_F k`; below the light
    // line that is a small part of the lower piece.
    let lower_len = k.omega - k.vk;
    let lower_edge = lower_len.min(k.vk);
    let lower = integrate_endpoint_singular_with(
        |s, off| k.lower_piece(if off > 0.0 { off } else { s }),
        0.0,
        lower_edge,
        true,
        false,
        &piece_cfg,
    )?
    .join(integrate_endpoint_singular_with(
        |s, _| k.lower_piece(s),
        lower_edge,
        lower_len,
        false,
        false,
        &piece_cfg,
    )?);
    let middle = integrate_endpoint_singular_with(
        |s, off| k.middle_piece(if off > 0.0 { off } else { s }, weighting),
        0.0,
        k.vk,
        true,
        false,
        &piece_cfg,
    )?;
    let span = k.vk.min(UPPER_DE_SPAN * k.tau);
    let upper_near = integrate_endpoint_singular_with(
        |s, off| k.upper_piece(if off > 0.0 { off } else { s }),
        0.0,
        span,
        true,
        false,
        &piece_cfg,
    )?;
    let upper_far = integrate_decaying_tail(|s| k.upper_piece(s), span, k.tau, &piece_cfg)?;
    Ok(lower.join(middle).join(upper_near).join(upper_far))
}

/// `Π₀₀⁽⁰⁾ = iπαħk²/p`, `Π⁽⁰⁾ = −iπαħk²p`.
pub(crate) fn zero_temperature(resp: &GrapheneResponse, point: &SpectralPoint) -> Result<PolarizationPair> {
    let k = Kernel::new(resp, point)?;
    let c = &resp.consts;
    let scale = std::f64::consts::PI * c.alpha_fs * c.hbar * point.k_perp() * point.k_perp();
    Ok(PolarizationPair::new(Complex64::new(0.0, scale * c.c / k.cp), Complex64::new(0.0, -scale * k.cp / c.c)))
}

fn scaled(resp: &GrapheneResponse, k: &Kernel, brackets: PolarizationPair) -> PolarizationPair {
    let c = resp.consts.c;
    let pre = resp.thermal_prefactor();
    PolarizationPair::new(brackets.pi00 * (pre * c), brackets.pi * (pre * k.omega * k.omega / c))
}

/// Thermal corrections `(Π₀₀⁽¹⁾, Π⁽¹⁾)`; exactly zero at `T = 0`.
pub(crate) fn thermal(resp: &GrapheneResponse, point: &SpectralPoint) -> Result<PolarizationPair> {
    let k = Kernel::new(resp, point)?;
    if point.temperature() == 0.0 {
        return Ok(PolarizationPair::default());
    }
    let est = integrate_brackets(&k, Weighting::Thermal, &resp.quad)?;
    Ok(scaled(resp, &k, est.value))
}

pub(crate) fn total(resp: &GrapheneResponse, point: &SpectralPoint) -> Result<PolarizationPair> {
    if point.temperature() == 0.0 {
        return zero_temperature(resp, point);
    }
    let k = Kernel::new(resp, point)?;
    let est = integrate_brackets(&k, Weighting::Total, &resp.quad)?;
    Ok(scaled(resp, &k, est.value))
}
