use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    /// The zero-crossing bracket holds no sign change.
    #[error("no sign change in [{lo:e}, {hi:e}] m: F({lo:e}) = {f_lo:e} N, F({hi:e}) = {f_hi:e} N")]
    Bracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    /// A physics evaluation failed; `row` is the grid index.
    #[error("row {row} (a = {a:e} m, T_g = {t_g} K): {source}")]
    Physics {
        row: usize,
        a: f64,
        t_g: f64,
        #[source]
        source: neqcp_core::Error,
    },

    #[error("representation cross-check failed at a = {a:e} m, T_g = {t_g} K: gaps {representation:e}, {matsubara:e}")]
    Inconsistent { a: f64, t_g: f64, representation: f64, matsubara: f64 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed table: {0}")]
    Parse(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// Process exit status: 2 bracket, 3 quadrature budget, 4 config, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Bracket { .. } => 2,
            CliError::Physics { source: neqcp_core::Error::Budget { .. }, .. } => 3,
            CliError::Config(_) => 4,
            CliError::Physics { source: neqcp_core::Error::Domain(_), .. } => 4,
            _ => 1,
        }
    }
}
