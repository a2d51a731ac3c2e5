//! Command-line front end for the nanoparticle-graphene Casimir-Polder
//! force: configuration, sweeps over separation and graphene temperature,
//! zero-crossing search, CSV output and a result cache.

pub mod cache;
pub mod config;
pub mod error;
pub mod sweep;
pub mod table;
pub mod zero;

pub use cache::{sweep_cached, Cache, SweepOutput};
pub use config::{RunConfig, Spacing};
pub use error::{CliError, Result};
pub use sweep::{run_sweep, verify_grid, PhysicsEvaluator, PointEvaluator};
pub use table::{emit_csv, parse_csv, to_csv_string, Row, Table};
pub use zero::{find_force_zero, find_zero_crossing, ZeroCrossing};
