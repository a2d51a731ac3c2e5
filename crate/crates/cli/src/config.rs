//! Run configuration: flat `key = value` files with `#` comments, SI units.
//!
//! Recognised keys: `material` (`metal` or `dielectric:EPS`), `radius`,
//! `T_E`, `T_g` (comma-separated list), `a_min`, `a_max`, `points`,
//! `spacing` (`log` or `linear`), `tol_force`, `tol_tensor`, `verify`,
//! `emit_ratio`, `v_F`.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use neqcp_core::equilibrium::{ForceModel, Material, NanoparticleSpec, Tolerances};
use neqcp_core::quadrature::DEFAULT_BUDGET;
use neqcp_core::units::{PhysicalConstants, DEFAULT_FERMI_VELOCITY};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

/// Bumped whenever a change to the physics would alter cached numbers.
pub const MODEL_TAG: &str = "neqcp-model-1";

pub const MAX_TOLERANCE: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Logarithmic,
}

impl FromStr for Spacing {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "linear" | "lin" => Ok(Spacing::Linear),
            "log" | "logarithmic" => Ok(Spacing::Logarithmic),
            other => Err(CliError::Config(format!("unknown spacing {other:?}"))),
        }
    }
}

impl fmt::Display for Spacing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Spacing::Linear => "linear",
            Spacing::Logarithmic => "log",
        })
    }
}

pub fn parse_material(s: &str) -> Result<Material> {
    let s = s.trim();
    if s.eq_ignore_ascii_case("metal") {
        return Ok(Material::Metal);
    }
    match s.split_once(':') {
        Some((kind, eps)) if kind.trim().eq_ignore_ascii_case("dielectric") => {
            let epsilon = parse_f64("material", eps)?;
            if !(epsilon > 1.0) {
                return Err(CliError::Config(format!("dielectric needs epsilon > 1, got {epsilon}")));
            }
            Ok(Material::Dielectric { epsilon })
        }
        _ => Err(CliError::Config(format!("material must be metal or dielectric:EPS, got {s:?}"))),
    }
}

pub fn format_material(m: &Material) -> String {
    match m {
        Material::Metal => "metal".into(),
        Material::Dielectric { epsilon } => format!("dielectric:{epsilon}"),
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64> {
    let v: f64 = value.trim().parse().map_err(|_| CliError::Config(format!("{key}: not a number: {value:?}")))?;
    if !v.is_finite() {
        return Err(CliError::Config(format!("{key}: must be finite, got {value:?}")));
    }
    Ok(v)
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        other => Err(CliError::Config(format!("{key}: expected a boolean, got {other:?}"))),
    }
}

pub fn parse_temperature_list(value: &str) -> Result<Vec<f64>> {
    value.split(',').filter(|s| !s.trim().is_empty()).map(|s| parse_f64("T_g", s)).collect()
}

fn detail(e: CliError) -> String {
    match e {
        CliError::Config(m) => m,
        other => other.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub spec: NanoparticleSpec,
    /// Environment temperature, K.
    pub t_e: f64,
    /// Graphene temperatures, K; one table block per entry.
    pub t_g: Vec<f64>,
    pub a_min: f64,
    pub a_max: f64,
    pub points: usize,
    pub spacing: Spacing,
    /// Relative tolerance of each force.
    pub tol_force: f64,
    /// Relative tolerance of the polarization tensor.
    pub tol_tensor: f64,
    /// Run the representation cross-check at every point.
    pub verify: bool,
    /// Compute `F_eq(a, T_E)` and the ratio column.
    pub emit_ratio: bool,
    pub v_f: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let tol = Tolerances::default();
        Self {
            spec: NanoparticleSpec::metal(2.5e-9),
            t_e: 300.0,
            t_g: vec![77.0],
            a_min: 0.2e-6,
            a_max: 2e-6,
            points: 60,
            spacing: Spacing::Logarithmic,
            tol_force: tol.force,
            tol_tensor: tol.tensor,
            verify: false,
            emit_ratio: true,
            v_f: DEFAULT_FERMI_VELOCITY,
        }
    }
}

impl RunConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key.trim() {
            "material" => self.spec.material = parse_material(value)?,
            "radius" => self.spec.radius = parse_f64(key, value)?,
            "T_E" => self.t_e = parse_f64(key, value)?,
            "T_g" => self.t_g = parse_temperature_list(value)?,
            "a_min" => self.a_min = parse_f64(key, value)?,
            "a_max" => self.a_max = parse_f64(key, value)?,
            "points" => {
                self.points =
                    value.trim().parse().map_err(|_| CliError::Config(format!("points: not an integer: {value:?}")))?
            }
            "spacing" => self.spacing = value.parse()?,
            "tol_force" => self.tol_force = parse_f64(key, value)?,
            "tol_tensor" => self.tol_tensor = parse_f64(key, value)?,
            "verify" => self.verify = parse_bool(key, value)?,
            "emit_ratio" => self.emit_ratio = parse_bool(key, value)?,
            "v_F" => self.v_f = parse_f64(key, value)?,
            other => return Err(CliError::Config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    /// Applies every setting in `text` on top of `self`.
    pub fn apply_str(&mut self, text: &str) -> Result<()> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", n + 1)))?;
            self.set(key, value).map_err(|e| CliError::Config(format!("line {}: {}", n + 1, detail(e))))?;
        }
        Ok(())
    }

    /// Applies a config file on top of `self`. An unreadable file is a
    /// config error.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        self.apply_str(&text).map_err(|e| CliError::Config(format!("{}: {}", path.display(), detail(e))))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_file(path)?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let err = |m: String| Err(CliError::Config(m));
        if !(self.a_min > 0.0 && self.a_min < self.a_max) {
            return err(format!("need 0 < a_min < a_max, got {:e}, {:e}", self.a_min, self.a_max));
        }
        if self.points < 2 {
            return err(format!("grid needs at least 2 points, got {}", self.points));
        }
        for (name, tol) in [("tol_force", self.tol_force), ("tol_tensor", self.tol_tensor)] {
            if !(tol > 0.0 && tol <= MAX_TOLERANCE) {
                return err(format!("{name} must lie in (0, {MAX_TOLERANCE:e}], got {tol:e}"));
            }
        }
        if !(self.t_e >= 0.0) {
            return err(format!("T_E must be >= 0, got {}", self.t_e));
        }
        if self.t_g.is_empty() {
            return err("T_g list is empty".into());
        }
        if let Some(t) = self.t_g.iter().find(|t| !(**t >= 0.0)) {
            return err(format!("T_g must be >= 0, got {t}"));
        }
        self.spec.polarizability().map_err(|e| CliError::Config(e.to_string()))?;
        self.constants()?;
        Ok(())
    }

    pub fn constants(&self) -> Result<PhysicalConstants> {
        PhysicalConstants::default().with_fermi_velocity(self.v_f).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Tolerances with the inner integrals a decade tighter than the force.
    pub fn tolerances(&self) -> Tolerances {
        Tolerances {
            force: self.tol_force,
            inner: 0.1 * self.tol_force,
            tensor: self.tol_tensor,
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn model(&self) -> Result<ForceModel> {
        Ok(ForceModel::new(self.constants()?, self.tolerances()))
    }

    /// Separations in ascending order, endpoints exact.
    pub fn grid(&self) -> Vec<f64> {
        let n = self.points;
        let last = (n - 1) as f64;
        (0..n)
            .map(|i| {
                if i == 0 {
                    return self.a_min;
                }
                if i == n - 1 {
                    return self.a_max;
                }
                let t = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.a_min + t * (self.a_max - self.a_min),
                    Spacing::Logarithmic => self.a_min * (self.a_max / self.a_min).powf(t),
                }
            })
            .collect()
    }

    /// Physics-relevant settings as ordered name/value pairs. Floats are
    /// written in shortest round-trip form.
    pub fn settings(&self) -> Vec<(&'static str, String)> {
        let temps: Vec<String> = self.t_g.iter().map(|t| format!("{t:?}")).collect();
        vec![
            ("material", format_material(&self.spec.material)),
            ("radius", format!("{:?}", self.spec.radius)),
            ("T_E", format!("{:?}", self.t_e)),
            ("T_g", temps.join(",")),
            ("a_min", format!("{:?}", self.a_min)),
            ("a_max", format!("{:?}", self.a_max)),
            ("points", self.points.to_string()),
            ("spacing", self.spacing.to_string()),
            ("tol_force", format!("{:?}", self.tol_force)),
            ("tol_tensor", format!("{:?}", self.tol_tensor)),
            ("verify", self.verify.to_string()),
            ("emit_ratio", self.emit_ratio.to_string()),
        ]
    }

    /// SHA-256 over the settings, the constant table and the code version.
    pub fn hash(&self) -> Result<String> {
        let mut h = Sha256::new();
        h.update(format!("version={}\nmodel={MODEL_TAG}\n", env!("CARGO_PKG_VERSION")));
        for (k, v) in self.settings() {
            h.update(format!("{k}={v}\n"));
        }
        for (k, v) in self.constants()?.table() {
            h.update(format!("{k}={:016x}\n", v.to_bits()));
        }
        Ok(hex::encode(h.finalize()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_is_sixty_log_points() {
        let g = RunConfig::default().grid();
        assert_eq!(g.len(), 60);
        assert_eq!(g[0], 0.2e-6);
        assert_eq!(g[59], 2e-6);
        let r0 = g[1] / g[0];
        assert!(g.windows(2).all(|w| (w[1] / w[0] / r0 - 1.0).abs() < 1e-12));
    }

    #[test]
    fn comments_and_overrides() {
        let mut c = RunConfig::default();
        c.apply_str("# sweep\nT_g = 500, 700 # heated\nmaterial=dielectric:4\n\nspacing = linear\n").unwrap();
        assert_eq!(c.t_g, vec![500.0, 700.0]);
        assert_eq!(c.spec.material, Material::Dielectric { epsilon: 4.0 });
        assert_eq!(c.spacing, Spacing::Linear);
        c.set("T_g", "77").unwrap();
        assert_eq!(c.t_g, vec![77.0]);
    }

    #[test]
    fn invalid_settings_are_config_errors() {
        let mut c = RunConfig::default();
        assert!(c.apply_str("bogus = 1").is_err());
        assert!(c.apply_str("no equals sign").is_err());
        assert!(c.apply_str("material = dielectric:0.5").is_err());
        for (k, v) in [("a_min", "3e-6"), ("points", "1"), ("tol_force", "0.02"), ("tol_tensor", "0")] {
            let mut c = RunConfig::default();
            c.set(k, v).unwrap();
            assert!(matches!(c.validate(), Err(CliError::Config(_))), "{k} = {v}");
        }
        let mut c = RunConfig::default();
        c.set("v_F", "3e8").unwrap();
        assert!(c.validate().is_err());
    }

    #[test]
    fn hash_tracks_physics_settings() {
        let base = RunConfig::default();
        let h = base.hash().unwrap();
        assert_eq!(h, base.clone().hash().unwrap());
        let mut c = base.clone();
        c.tol_force *= 0.5;
        assert_ne!(c.hash().unwrap(), h);
        let mut c = base.clone();
        c.v_f *= 1.01;
        assert_ne!(c.hash().unwrap(), h);
        let mut c = base;
        c.t_g = vec![77.0, 500.0];
        assert_ne!(c.hash().unwrap(), h);
    }
}
