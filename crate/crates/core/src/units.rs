//! Physical constants, thermal scales and geometry checks.
//!
//! All inputs and outputs are SI. The force modules reduce frequencies to
//! `c / (2a)` and wavenumbers to `1 / (2a)` internally; see
//! [`SeparationScale`].

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// CODATA 2018 values. The Fermi velocity is the Dirac-model convention
/// `c / 300`.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const HBAR: f64 = 1.054_571_817e-34;
pub const BOLTZMANN: f64 = 1.380_649e-23;
pub const FINE_STRUCTURE: f64 = 7.297_352_569_3e-3;
pub const ELECTRON_VOLT: f64 = 1.602_176_634e-19;
pub const DEFAULT_FERMI_VELOCITY: f64 = SPEED_OF_LIGHT / 300.0;

/// Upper end of the energy window where the Dirac description of graphene
/// holds.
pub const DIRAC_MODEL_LIMIT_EV: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub c: f64,
    pub hbar: f64,
    pub k_b: f64,
    pub alpha_fs: f64,
    pub v_f: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self { c: SPEED_OF_LIGHT, hbar: HBAR, k_b: BOLTZMANN, alpha_fs: FINE_STRUCTURE, v_f: DEFAULT_FERMI_VELOCITY }
    }
}

impl PhysicalConstants {
    /// Replace the Fermi velocity. It must stay strictly below `c`.
    pub fn with_fermi_velocity(mut self, v_f: f64) -> Result<Self> {
        if !(v_f > 0.0 && v_f < self.c) {
            return Err(Error::Domain(format!("Fermi velocity must lie in (0, c), got {v_f}")));
        }
        self.v_f = v_f;
        Ok(self)
    }

    /// `ħc / (k_B T)`.
    pub fn thermal_wavelength(&self, temperature: f64) -> Result<f64> {
        if !(temperature > 0.0) || !temperature.is_finite() {
            return Err(Error::Domain(format!("thermal wavelength needs T > 0, got {temperature}")));
        }
        Ok(self.hbar * self.c / (self.k_b * temperature))
    }

    /// Matsubara frequency `ξ_l = 2π k_B T l / ħ` in rad/s.
    pub fn matsubara_frequency(&self, l: u32, temperature: f64) -> f64 {
        2.0 * PI * self.k_b * temperature * f64::from(l) / self.hbar
    }

    /// Thermal frequency `k_B T / ħ`.
    pub fn thermal_frequency(&self, temperature: f64) -> f64 {
        self.k_b * temperature / self.hbar
    }

    /// Ordered name/value table, echoed into output metadata.
    pub fn table(&self) -> [(&'static str, f64); 5] {
        [("c", self.c), ("hbar", self.hbar), ("k_B", self.k_b), ("alpha", self.alpha_fs), ("v_F", self.v_f)]
    }
}

/// Separation plus the two temperatures of the nonequilibrium setup.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalState {
    pub separation: f64,
    pub t_env: f64,
    pub t_graphene: f64,
}

impl ThermalState {
    pub fn new(separation: f64, t_env: f64, t_graphene: f64) -> Result<Self> {
        if !(separation > 0.0) || !separation.is_finite() {
            return Err(Error::Domain(format!("separation must be positive, got {separation}")));
        }
        for (name, t) in [("T_E", t_env), ("T_g", t_graphene)] {
            if !(t >= 0.0) || !t.is_finite() {
                return Err(Error::Domain(format!("{name} must be >= 0, got {t}")));
            }
        }
        if t_env == 0.0 && t_graphene == 0.0 {
            return Err(Error::Domain("at least one temperature must be positive".into()));
        }
        Ok(Self { separation, t_env, t_graphene })
    }

    pub fn max_temperature(&self) -> f64 {
        self.t_env.max(self.t_graphene)
    }
}

/// Frequency and wavenumber units attached to a separation `a`:
/// `ω_a = c / (2a)` and `k_a = 1 / (2a)`. In these units the evanescent
/// weight `exp(-2 a q)` becomes `exp(-y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparationScale {
    pub separation: f64,
    pub omega_unit: f64,
    pub k_unit: f64,
}

impl SeparationScale {
    pub fn new(separation: f64, consts: &PhysicalConstants) -> Self {
        Self { separation, omega_unit: consts.c / (2.0 * separation), k_unit: 1.0 / (2.0 * separation) }
    }
}

pub const RADIUS_SEPARATION_LIMIT: f64 = 0.1;
pub const RADIUS_WAVELENGTH_LIMIT: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeometryWarning {
    /// `R / a` above [`RADIUS_SEPARATION_LIMIT`].
    DipoleApproximation,
    /// `R / λ_T` above [`RADIUS_WAVELENGTH_LIMIT`] for one of the temperatures.
    ThermalWavelength,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeometryReport {
    pub radius_over_separation: f64,
    /// Largest `R / λ_T` over the positive temperatures.
    pub radius_over_wavelength: f64,
    pub warnings: Vec<GeometryWarning>,
}

impl GeometryReport {
    pub fn passes(&self) -> bool {
        self.warnings.is_empty()
    }
}

pub fn validate_geometry(radius: f64, state: &ThermalState, consts: &PhysicalConstants) -> Result<GeometryReport> {
    if !(radius > 0.0) {
        return Err(Error::Domain(format!("radius must be positive, got {radius}")));
    }
    let radius_over_separation = radius / state.separation;
    let radius_over_wavelength = [state.t_env, state.t_graphene]
        .into_iter()
        .filter(|&t| t > 0.0)
        .map(|t| consts.thermal_wavelength(t).map(|lambda| radius / lambda))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);

    let mut warnings = Vec::new();
    if radius_over_separation > RADIUS_SEPARATION_LIMIT {
        warnings.push(GeometryWarning::DipoleApproximation);
    }
    if radius_over_wavelength > RADIUS_WAVELENGTH_LIMIT {
        warnings.push(GeometryWarning::ThermalWavelength);
    }
    Ok(GeometryReport { radius_over_separation, radius_over_wavelength, warnings })
}
