//! Nanoparticle polarizability and the Matsubara-sum (Lifshitz) force
//! `F̃(a, T_sum; T_g)`: Matsubara frequencies at `T_sum`, graphene
//! reflection coefficients at `T_g`.
//!
//! In reduced variables `y = 2aq_l`, `ζ_l = 2aξ_l/c`
//!
//! ```text
//! F̃ = −(2k_B T_sum α₀/(2a)⁴) Σ'_l ∫_{ζ_l}^∞ y e^{−y} [(2y² − ζ_l²)R_TM − ζ_l² R_TE] dy
//! ```
//!
//! where the prime halves the `l = 0` term. Attraction is negative.

use crate::error::{Error, Result};
use crate::graphene::{GrapheneResponse, SpectralPoint};
use crate::nonequilibrium::NoneqBreakdown;
use crate::quadrature::{integrate_decaying_tail, QuadConfig, DEFAULT_BUDGET, FORCE_REL_TOL, TENSOR_REL_TOL};
use crate::units::PhysicalConstants;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Material {
    Metal,
    /// Static permittivity `ε > 1`.
    Dielectric {
        epsilon: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NanoparticleSpec {
    pub radius: f64,
    pub material: Material,
}

impl NanoparticleSpec {
    pub fn metal(radius: f64) -> Self {
        Self { radius, material: Material::Metal }
    }

    pub fn dielectric(radius: f64, epsilon: f64) -> Self {
        Self { radius, material: Material::Dielectric { epsilon } }
    }

    /// Static polarizability volume `α₀` (m³): `R³` for a metal,
    /// `R³(ε − 1)/(ε + 2)` for a dielectric.
    pub fn polarizability(&self) -> Result<f64> {
        if !(self.radius > 0.0) || !self.radius.is_finite() {
            return Err(Error::Domain(format!("radius must be positive, got {}", self.radius)));
        }
        let r3 = self.radius.powi(3);
        match self.material {
            Material::Metal => Ok(r3),
            Material::Dielectric { epsilon } => {
                if !(epsilon > 1.0) || epsilon.is_nan() {
                    return Err(Error::Domain(format!("dielectric needs epsilon > 1, got {epsilon}")));
                }
                if epsilon.is_infinite() {
                    return Ok(r3);
                }
                Ok(r3 * (epsilon - 1.0) / (epsilon + 2.0))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceResult {
    /// Total force in newtons; negative is attractive.
    pub force: f64,
    /// Matsubara-sum part.
    pub equilibrium_like: f64,
    /// Real-frequency nonequilibrium addition (zero in equilibrium).
    pub nonequilibrium: f64,
    /// Absolute error estimate, N.
    pub error: f64,
    /// Matsubara terms summed.
    pub matsubara_terms: usize,
    pub breakdown: Option<NoneqBreakdown>,
}

impl ForceResult {
    pub(crate) fn matsubara(force: f64, error: f64, terms: usize) -> Self {
        Self { force, equilibrium_like: force, nonequilibrium: 0.0, error, matsubara_terms: terms, breakdown: None }
    }
}

/// Tolerances for force evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative tolerance of each force (default `1e-6`).
    pub force: f64,
    /// Relative tolerance of inner (wavenumber) integrals, default `1e-7`.
    pub inner: f64,
    /// Relative tolerance of the polarization tensor, default `1e-8`.
    pub tensor: f64,
    /// Evaluation budget per quadrature call.
    pub budget: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { force: FORCE_REL_TOL, inner: 0.1 * FORCE_REL_TOL, tensor: TENSOR_REL_TOL, budget: DEFAULT_BUDGET }
    }
}

impl Tolerances {
    /// All tolerances multiplied by `factor`.
    pub fn scaled(self, factor: f64) -> Self {
        Self {
            force: self.force * factor,
            inner: self.inner * factor,
            tensor: self.tensor * factor,
            budget: self.budget,
        }
    }
}

/// Everything needed to evaluate forces: constants, graphene response and
/// tolerances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceModel {
    consts: PhysicalConstants,
    tol: Tolerances,
    graphene: GrapheneResponse,
}

impl Default for ForceModel {
    fn default() -> Self {
        Self::new(PhysicalConstants::default(), Tolerances::default())
    }
}

/// Consecutive negligible Matsubara terms required before stopping.
const NEGLIGIBLE_RUN: usize = 3;
/// Relative size below which a Matsubara term counts as negligible.
const NEGLIGIBLE_TERM: f64 = 1e-10;
/// Hard cap on the Matsubara index.
const MAX_MATSUBARA: u32 = 200_000;

impl ForceModel {
    pub fn new(consts: PhysicalConstants, tol: Tolerances) -> Self {
        let graphene = GrapheneResponse::new(consts).with_tolerance(tol.tensor);
        Self { consts, tol, graphene }
    }

    pub fn constants(&self) -> &PhysicalConstants {
        &self.consts
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    pub fn graphene(&self) -> &GrapheneResponse {
        &self.graphene
    }

    pub(crate) fn inner_cfg(&self) -> QuadConfig {
        QuadConfig::new(self.tol.inner).with_budget(self.tol.budget)
    }

    pub(crate) fn outer_cfg(&self) -> QuadConfig {
        QuadConfig::new(self.tol.force).with_budget(self.tol.budget)
    }

    /// `∫_{ζ}^∞ y e^{−y} [(2y² − ζ²)R_TM − ζ²R_TE] dy` for Matsubara index `l`.
    fn matsubara_term(&self, l: u32, a: f64, t_sum: f64, t_g: f64, cfg: &QuadConfig) -> Result<(f64, f64)> {
        let xi = self.consts.matsubara_frequency(l, t_sum);
        let zeta = 2.0 * a * xi / self.consts.c;
        let scale = 1.0 / (2.0 * a);
        let failure = std::cell::Cell::new(None);
        let integrand = |y: f64| -> f64 {
            let k = ((y - zeta) * (y + zeta)).sqrt() * scale;
            let r = SpectralPoint::imaginary(xi, k, t_g, &self.consts).and_then(|p| self.graphene.reflection(&p));
            match r {
                Ok(r) => y * (-y).exp() * ((2.0 * y * y - zeta * zeta) * r.r_tm.re - zeta * zeta * r.r_te.re),
                Err(e) => {
                    failure.set(Some(e));
                    f64::NAN
                }
            }
        };
        let est = integrate_decaying_tail(integrand, zeta, 1.0, cfg);
        if let Some(e) = failure.take() {
            return Err(e);
        }
        let est = est?;
        Ok((est.value, est.abs_error))
    }

    /// `F̃(a, T_sum; T_g)`.
    pub fn lifshitz_tilde_force(&self, a: f64, t_sum: f64, t_g: f64, spec: &NanoparticleSpec) -> Result<ForceResult> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::Domain(format!("separation must be positive, got {a}")));
        }
        if !(t_sum > 0.0) || !t_sum.is_finite() {
            return Err(Error::Domain(format!("summation temperature must be positive, got {t_sum}")));
        }
        if !(t_g >= 0.0) || !t_g.is_finite() {
            return Err(Error::Domain(format!("graphene temperature must be >= 0, got {t_g}")));
        }
        let alpha0 = spec.polarizability()?;
        let zeta1 = 2.0 * a * self.consts.matsubara_frequency(1, t_sum) / self.consts.c;
        let rel = self.tol.force;

        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        let mut err = 0.0f64;
        let mut run = 0usize;
        let mut l = 0u32;
        loop {
            // Each term only needs to be accurate relative to the total.
            let cfg = QuadConfig::new(self.tol.inner)
                .with_budget(self.tol.budget)
                .with_abs_tol(0.1 * rel * (sum + comp).abs());
            let (mut term, mut term_err) = self.matsubara_term(l, a, t_sum, t_g, &cfg)?;
            if l == 0 {
                term *= 0.5;
                term_err *= 0.5;
            }
            // Neumaier summation.
            let t = sum + term;
            comp += if sum.abs() >= term.abs() { (sum - t) + term } else { (term - t) + sum };
            sum = t;
            err += term_err;

            let total = (sum + comp).abs();
            if l > 0 && term.abs() < NEGLIGIBLE_TERM * total {
                run += 1;
            } else {
                run = 0;
            }
            if run >= NEGLIGIBLE_RUN {
                // Terms fall at least like e^{−ζ₁ l} times a cubic in l.
                let ratio = (-zeta1).exp() * ((f64::from(l) + 2.0) / (f64::from(l) + 1.0)).powi(3);
                if ratio < 1.0 {
                    let tail = term.abs() * ratio / (1.0 - ratio);
                    if tail < 0.1 * rel * total {
                        err += tail;
                        break;
                    }
                }
            }
            l += 1;
            if l > MAX_MATSUBARA {
                return Err(Error::Budget {
                    detail: format!("Matsubara sum did not converge by l = {MAX_MATSUBARA}"),
                    evaluations: MAX_MATSUBARA as usize,
                });
            }
        }
        let pre = -2.0 * self.consts.k_b * t_sum * alpha0 / (2.0 * a).powi(4);
        Ok(ForceResult::matsubara(pre * (sum + comp), (pre * err).abs(), l as usize + 1))
    }

    /// Proper equilibrium force `F̃(a, T; T)`.
    pub fn equilibrium_force(&self, a: f64, t: f64, spec: &NanoparticleSpec) -> Result<ForceResult> {
        self.lifshitz_tilde_force(a, t, t, spec)
    }
}

/// [`ForceModel::lifshitz_tilde_force`] with default constants and tolerances.
pub fn lifshitz_tilde_force(a: f64, t_sum: f64, t_g: f64, spec: &NanoparticleSpec) -> Result<ForceResult> {
    ForceModel::default().lifshitz_tilde_force(a, t_sum, t_g, spec)
}

/// [`ForceModel::equilibrium_force`] with default constants and tolerances.
pub fn equilibrium_force(a: f64, t: f64, spec: &NanoparticleSpec) -> Result<ForceResult> {
    ForceModel::default().equilibrium_force(a, t, spec)
}
