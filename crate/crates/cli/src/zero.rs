//! Bisection for the separation where the force changes sign.

use crate::config::RunConfig;
use crate::error::{CliError, Result};

/// Bracket width relative to the midpoint below which bisection stops.
pub const RELATIVE_WIDTH: f64 = 1e-3;
const MAX_STEPS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroCrossing {
    /// Midpoint of the final bracket, m.
    pub separation: f64,
    pub lo: f64,
    pub hi: f64,
    /// Forces at the final bracket ends, N; they have opposite signs.
    pub f_lo: f64,
    pub f_hi: f64,
    /// Width in `a` over which the combined force errors hide the sign.
    pub noise_width: f64,
    pub evaluations: usize,
}

impl ZeroCrossing {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Bisects `force(a) -> (value, abs_error)` on `[lo, hi]`.
///
/// Stops once the bracket is narrower than `max(1e-3·a, w)`, where `w` is
/// the separation range the summed endpoint errors span at the secant
/// slope, or as soon as a midpoint force is smaller than its own error.
/// With honest error estimates every kept bracket contains the root.
pub fn find_zero_crossing<F>(mut force: F, lo: f64, hi: f64) -> Result<ZeroCrossing>
where
    F: FnMut(f64) -> Result<(f64, f64)>,
{
    if !(lo > 0.0 && lo < hi) {
        return Err(CliError::Config(format!("bracket needs 0 < lo < hi, got [{lo:e}, {hi:e}]")));
    }
    let (mut lo, mut hi) = (lo, hi);
    let (mut f_lo, mut e_lo) = force(lo)?;
    let (mut f_hi, mut e_hi) = force(hi)?;
    let mut evaluations = 2;
    if f_lo.signum() == f_hi.signum() && f_lo != 0.0 && f_hi != 0.0 || f_lo.is_nan() || f_hi.is_nan() {
        return Err(CliError::Bracket { lo, hi, f_lo, f_hi });
    }
    for _ in 0..MAX_STEPS {
        let mid = 0.5 * (lo + hi);
        let slope = (f_hi - f_lo).abs() / (hi - lo);
        let noise_width = (e_lo + e_hi) / slope;
        let done = f_lo == 0.0 || f_hi == 0.0 || hi - lo < (RELATIVE_WIDTH * mid).max(noise_width);
        if done {
            let separation = if f_lo == 0.0 {
                lo
            } else if f_hi == 0.0 {
                hi
            } else {
                mid
            };
            return Ok(ZeroCrossing { separation, lo, hi, f_lo, f_hi, noise_width, evaluations });
        }
        let (f_mid, e_mid) = force(mid)?;
        evaluations += 1;
        if f_mid.abs() <= e_mid {
            // Sign of the midpoint is within its error; the root is in the
            // current bracket but cannot be located more closely.
            return Ok(ZeroCrossing { separation: mid, lo, hi, f_lo, f_hi, noise_width, evaluations });
        }
        if f_mid.signum() == f_lo.signum() && f_mid != 0.0 {
            (lo, f_lo, e_lo) = (mid, f_mid, e_mid);
        } else {
            (hi, f_hi, e_hi) = (mid, f_mid, e_mid);
        }
    }
    Err(CliError::Config(format!("bisection did not converge in {MAX_STEPS} steps")))
}

/// Zero of `F_neq(a; T_E, t_g)` for the configured particle, tolerances
/// and constants. Repulsion is positive. Heated graphene keeps the force
/// attractive, so `t_g > T_E` ends in a bracket error.
pub fn find_force_zero(config: &RunConfig, t_g: f64, lo: f64, hi: f64) -> Result<ZeroCrossing> {
    config.validate()?;
    let model = config.model()?;
    let mut row = 0;
    find_zero_crossing(
        |a| {
            let f = model.noneq_force(a, config.t_e, t_g, &config.spec).map_err(|source| CliError::Physics {
                row,
                a,
                t_g,
                source,
            })?;
            log::info!("F_neq({a:e} m) = {:e} +- {:e} N", f.force, f.error);
            row += 1;
            Ok((f.force, f.error))
        },
        lo,
        hi,
    )
}
