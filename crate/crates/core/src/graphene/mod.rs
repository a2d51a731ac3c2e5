//! Polarization tensor of gapless, undoped graphene (Dirac model) at
//! nonzero temperature, and the TM/TE reflection coefficients built from it.
//!
//! The tensor enters through two scalars: `Π₀₀` and the combination
//! `Π = k²Π_i^i − q²Π₀₀`. Each splits into a zero-temperature part and a
//! thermal correction. Different closed forms apply in different parts of
//! the `(ω, k)` plane, so every evaluation starts from a [`SpectralPoint`]
//! that records its [`Regime`]:
//!
//! | regime          | condition            | module        |
//! |-----------------|----------------------|---------------|
//! | `Propagating`   | `k < ω/c`            | [`plasmonic`] (continued) |
//! | `Plasmonic`     | `ω/c ≤ k < ω/v_F`    | [`plasmonic`] |
//! | `FarEvanescent` | `k > ω/v_F`          | [`far`]       |
//! | `MatsubaraAxis` | `ω = iξ`             | [`matsubara`] |
//!
//! Units are SI throughout: `Π₀₀` in J·s/m, `Π` in J·s/m³.

pub mod far;
pub mod matsubara;
pub mod plasmonic;

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::{QuadConfig, Quadrand};
use crate::units::PhysicalConstants;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    MatsubaraAxis,
    Plasmonic,
    FarEvanescent,
    Propagating,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Frequency {
    /// Real angular frequency `ω ≥ 0`, rad/s.
    Real(f64),
    /// Imaginary frequency `ω = iξ`, `ξ ≥ 0` in rad/s.
    Imaginary(f64),
}

/// An evaluation point `(ω, k_⊥, T)` with its regime and the normal
/// wavenumber `q = sqrt(k² − ω²/c²)`.
///
/// On the real axis `q` is real for evanescent waves and equal to
/// `−i sqrt(ω²/c² − k²)` for propagating ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint {
    frequency: Frequency,
    k_perp: f64,
    q: Complex64,
    temperature: f64,
    regime: Regime,
}

fn check_common(k_perp: f64, temperature: f64) -> Result<()> {
    if !(k_perp > 0.0) || !k_perp.is_finite() {
        return Err(Error::Domain(format!("k_perp must be positive, got {k_perp}")));
    }
    if !(temperature >= 0.0) || !temperature.is_finite() {
        return Err(Error::Domain(format!("temperature must be >= 0, got {temperature}")));
    }
    Ok(())
}

fn classify(omega: f64, k_perp: f64, consts: &PhysicalConstants) -> Result<Regime> {
    let boundary = omega / consts.v_f;
    if k_perp > boundary {
        Ok(Regime::FarEvanescent)
    } else if k_perp == boundary {
        Err(Error::Boundary(format!(
            "k_perp = omega / v_F = {k_perp:e} separates the plasmonic and far-evanescent regimes"
        )))
    } else if k_perp >= omega / consts.c {
        Ok(Regime::Plasmonic)
    } else {
        Ok(Regime::Propagating)
    }
}

impl SpectralPoint {
    /// Point on the real frequency axis, classified by `k_perp`.
    pub fn real(omega: f64, k_perp: f64, temperature: f64, consts: &PhysicalConstants) -> Result<Self> {
        check_common(k_perp, temperature)?;
        if !(omega >= 0.0) || !omega.is_finite() {
            return Err(Error::Domain(format!("omega must be >= 0, got {omega}")));
        }
        let regime = classify(omega, k_perp, consts)?;
        let kc = omega / consts.c;
        let q = if k_perp >= kc {
            Complex64::new(((k_perp - kc) * (k_perp + kc)).sqrt(), 0.0)
        } else {
            Complex64::new(0.0, -((kc - k_perp) * (kc + k_perp)).sqrt())
        };
        Ok(Self { frequency: Frequency::Real(omega), k_perp, q, temperature, regime })
    }

    /// Evanescent point parametrized by its real normal wavenumber `q > 0`,
    /// which keeps `q` exact near the light line.
    pub fn evanescent(omega: f64, q: f64, temperature: f64, consts: &PhysicalConstants) -> Result<Self> {
        if !(q > 0.0) || !q.is_finite() {
            return Err(Error::Domain(format!("normal wavenumber must be positive, got {q}")));
        }
        let kc = omega / consts.c;
        let k_perp = q.hypot(kc);
        check_common(k_perp, temperature)?;
        let regime = classify(omega, k_perp, consts)?;
        Ok(Self { frequency: Frequency::Real(omega), k_perp, q: Complex64::new(q, 0.0), temperature, regime })
    }

    /// Point on the imaginary axis `ω = iξ`.
    pub fn imaginary(xi: f64, k_perp: f64, temperature: f64, consts: &PhysicalConstants) -> Result<Self> {
        check_common(k_perp, temperature)?;
        if !(xi >= 0.0) || !xi.is_finite() {
            return Err(Error::Domain(format!("xi must be >= 0, got {xi}")));
        }
        Ok(Self {
            frequency: Frequency::Imaginary(xi),
            k_perp,
            q: Complex64::new(k_perp.hypot(xi / consts.c), 0.0),
            temperature,
            regime: Regime::MatsubaraAxis,
        })
    }

    /// Matsubara point `ξ_l = 2π k_B T_sum l / ħ`; the tensor itself is taken
    /// at `temperature`.
    pub fn matsubara(l: u32, t_sum: f64, k_perp: f64, temperature: f64, consts: &PhysicalConstants) -> Result<Self> {
        Self::imaginary(consts.matsubara_frequency(l, t_sum), k_perp, temperature, consts)
    }

    pub fn frequency(&self) -> Frequency {
        self.frequency
    }

    /// Real angular frequency, or `None` on the imaginary axis.
    pub fn omega(&self) -> Option<f64> {
        match self.frequency {
            Frequency::Real(w) => Some(w),
            Frequency::Imaginary(_) => None,
        }
    }

    pub fn k_perp(&self) -> f64 {
        self.k_perp
    }

    pub fn q(&self) -> Complex64 {
        self.q
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }
}

/// `(Π₀₀, Π)` at one spectral point.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PolarizationPair {
    pub pi00: Complex64,
    pub pi: Complex64,
}

impl PolarizationPair {
    pub fn new(pi00: Complex64, pi: Complex64) -> Self {
        Self { pi00, pi }
    }
}

impl Add for PolarizationPair {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.pi00 + rhs.pi00, self.pi + rhs.pi)
    }
}

impl Sub for PolarizationPair {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.pi00 - rhs.pi00, self.pi - rhs.pi)
    }
}

impl Mul<f64> for PolarizationPair {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        Self::new(self.pi00 * rhs, self.pi * rhs)
    }
}

/// Integration is done on dimensionless brackets of comparable size, so the
/// plain sum of moduli is a fair norm.
impl Quadrand for PolarizationPair {
    fn magnitude(&self) -> f64 {
        self.pi00.norm() + self.pi.norm()
    }

    fn is_finite(&self) -> bool {
        self.pi00.is_finite() && self.pi.is_finite()
    }
}

/// `(Π₀₀, Π)` on the imaginary frequency axis, where both are real.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MatsubaraPolarization {
    pub pi00: f64,
    pub pi: f64,
}

impl From<MatsubaraPolarization> for PolarizationPair {
    fn from(m: MatsubaraPolarization) -> Self {
        Self::new(Complex64::new(m.pi00, 0.0), Complex64::new(m.pi, 0.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectionPair {
    pub r_tm: Complex64,
    pub r_te: Complex64,
}

/// Fermi occupation `1 / (e^x + 1)` without overflow.
pub(crate) fn fermi(x: f64) -> f64 {
    if x > 0.0 {
        let e = (-x).exp();
        e / (1.0 + e)
    } else {
        1.0 / (x.exp() + 1.0)
    }
}

/// Principal square root, written out so that the conjugate symmetry
/// `sqrt(conj z) = conj(sqrt z)` holds bit for bit.
pub(crate) fn csqrt(z: Complex64) -> Complex64 {
    let (x, y) = (z.re, z.im);
    if x == 0.0 && y == 0.0 {
        return Complex64::new(0.0, y);
    }
    let r = x.hypot(y);
    if x >= 0.0 {
        let t = (0.5 * (r + x)).sqrt();
        Complex64::new(t, y / (2.0 * t))
    } else {
        let t = (0.5 * (r - x)).sqrt();
        let t = if y.is_sign_negative() { -t } else { t };
        Complex64::new(y / (2.0 * t), t)
    }
}

/// Dirac-model response of a freestanding graphene sheet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrapheneResponse {
    consts: PhysicalConstants,
    quad: QuadConfig,
}

impl GrapheneResponse {
    pub fn new(consts: PhysicalConstants) -> Self {
        Self { consts, quad: QuadConfig::default() }
    }

    /// Relative tolerance for the thermal integrals (default `1e-8`).
    pub fn with_tolerance(mut self, rel_tol: f64) -> Self {
        self.quad = QuadConfig::new(rel_tol);
        self
    }

    pub fn constants(&self) -> &PhysicalConstants {
        &self.consts
    }

    pub fn quad(&self) -> &QuadConfig {
        &self.quad
    }

    pub fn real_point(&self, omega: f64, k_perp: f64, temperature: f64) -> Result<SpectralPoint> {
        SpectralPoint::real(omega, k_perp, temperature, &self.consts)
    }

    /// Full tensor (zero-temperature part plus thermal correction) in any
    /// regime.
    pub fn polarization(&self, point: &SpectralPoint) -> Result<PolarizationPair> {
        match point.regime {
            Regime::Plasmonic | Regime::Propagating => plasmonic::total(self, point),
            Regime::FarEvanescent => far::total(self, point),
            Regime::MatsubaraAxis => matsubara::evaluate(self, point).map(Into::into),
        }
    }

    /// `Π₀₀⁽⁰⁾` and `Π⁽⁰⁾` for `ω/c ≤ k < ω/v_F`; both purely imaginary.
    pub fn pi_zero_t_plasmonic(&self, point: &SpectralPoint) -> Result<PolarizationPair> {
        self.require(point, &[Regime::Plasmonic, Regime::Propagating])?;
        plasmonic::zero_temperature(self, point)
    }

    /// Thermal correction `Π₀₀⁽¹⁾` in the plasmonic region.
    pub fn pi00_thermal_plasmonic(&self, point: &SpectralPoint) -> Result<Complex64> {
        self.require(point, &[Regime::Plasmonic, Regime::Propagating])?;
        Ok(plasmonic::thermal(self, point)?.pi00)
    }

    /// Thermal correction `Π⁽¹⁾` in the plasmonic region.
    pub fn pi_thermal_plasmonic(&self, point: &SpectralPoint) -> Result<Complex64> {
        self.require(point, &[Regime::Plasmonic, Regime::Propagating])?;
        Ok(plasmonic::thermal(self, point)?.pi)
    }

    /// Full tensor for `k > ω/v_F`.
    pub fn pi_far_evanescent(&self, point: &SpectralPoint) -> Result<PolarizationPair> {
        self.require(point, &[Regime::FarEvanescent])?;
        far::total(self, point)
    }

    /// Zero-temperature part and thermal correction for `k > ω/v_F`.
    pub fn pi_far_evanescent_parts(&self, point: &SpectralPoint) -> Result<(PolarizationPair, PolarizationPair)> {
        self.require(point, &[Regime::FarEvanescent])?;
        Ok((far::zero_temperature(self, point), far::thermal(self, point)?))
    }

    /// Real tensor at the Matsubara frequency `ξ_l` computed at the same
    /// temperature `T` that sets the graphene occupations.
    pub fn pi_matsubara(&self, l: u32, k_perp: f64, temperature: f64) -> Result<MatsubaraPolarization> {
        let point = SpectralPoint::matsubara(l, temperature, k_perp, temperature, &self.consts)?;
        matsubara::evaluate(self, &point)
    }

    /// Real tensor at `ω = iξ` with graphene at `temperature`.
    pub fn pi_imaginary_axis(&self, xi: f64, k_perp: f64, temperature: f64) -> Result<MatsubaraPolarization> {
        let point = SpectralPoint::imaginary(xi, k_perp, temperature, &self.consts)?;
        matsubara::evaluate(self, &point)
    }

    pub fn reflection(&self, point: &SpectralPoint) -> Result<ReflectionPair> {
        let tensor = self.polarization(point)?;
        self.reflection_from(point, &tensor)
    }

    /// TM and TE reflection coefficients from a known tensor.
    pub fn reflection_from(&self, point: &SpectralPoint, tensor: &PolarizationPair) -> Result<ReflectionPair> {
        let k2 = point.k_perp * point.k_perp;
        let q = point.q;
        let hbar2k2 = 2.0 * self.consts.hbar * k2;
        let num_tm = q * tensor.pi00;
        let den_tm = num_tm + hbar2k2;
        let den_te = tensor.pi + hbar2k2 * q;
        if den_tm.norm() == 0.0 || den_te.norm() == 0.0 || !den_tm.is_finite() || !den_te.is_finite() {
            return Err(Error::Singular(format!(
                "reflection denominator vanished at k = {:e}, frequency {:?}",
                point.k_perp, point.frequency
            )));
        }
        Ok(ReflectionPair { r_tm: num_tm / den_tm, r_te: -tensor.pi / den_te })
    }

    fn require(&self, point: &SpectralPoint, allowed: &[Regime]) -> Result<()> {
        if allowed.contains(&point.regime) {
            Ok(())
        } else {
            Err(Error::Domain(format!("operation not defined in regime {:?}", point.regime)))
        }
    }

    /// `8 α ħ / v_F²`, the common scale of every thermal correction.
    pub(crate) fn thermal_prefactor(&self) -> f64 {
        8.0 * self.consts.alpha_fs * self.consts.hbar / (self.consts.v_f * self.consts.v_f)
    }

    /// Frequency scale `2 k_B T / ħ` of the Fermi weight.
    pub(crate) fn fermi_frequency(&self, temperature: f64) -> f64 {
        2.0 * self.consts.k_b * temperature / self.consts.hbar
    }
}
