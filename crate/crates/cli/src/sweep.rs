//! Grid sweeps over separation and graphene temperature.

use neqcp_core::equilibrium::{ForceModel, NanoparticleSpec};
use neqcp_core::nonequilibrium::ConsistencyReport;
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::table::{Row, Table};

/// Produces one table row. Implementations must be deterministic.
pub trait PointEvaluator: Sync {
    /// `index` is the row position, used to identify failures.
    fn evaluate(&self, index: usize, a: f64, t_g: f64) -> Result<Row>;
}

/// The physics: `F_neq(a, T_E, T_g)`, optionally `F_eq(a, T_E)` and the
/// representation cross-check.
#[derive(Debug, Clone, Copy)]
pub struct PhysicsEvaluator {
    pub model: ForceModel,
    pub spec: NanoparticleSpec,
    pub t_e: f64,
    pub emit_ratio: bool,
    pub verify: bool,
}

impl PhysicsEvaluator {
    pub fn new(config: &RunConfig) -> Result<Self> {
        Ok(Self {
            model: config.model()?,
            spec: config.spec,
            t_e: config.t_e,
            emit_ratio: config.emit_ratio,
            verify: config.verify,
        })
    }

    pub fn cross_check(&self, index: usize, a: f64, t_g: f64) -> Result<ConsistencyReport> {
        self.model.cross_check_representation(a, self.t_e, t_g, &self.spec).map_err(|source| CliError::Physics {
            row: index,
            a,
            t_g,
            source,
        })
    }
}

impl PointEvaluator for PhysicsEvaluator {
    fn evaluate(&self, index: usize, a: f64, t_g: f64) -> Result<Row> {
        let physics = |source| CliError::Physics { row: index, a, t_g, source };
        let f = self.model.noneq_force(a, self.t_e, t_g, &self.spec).map_err(physics)?;
        if self.verify {
            let r = self.cross_check(index, a, t_g)?;
            if !r.consistent() {
                return Err(CliError::Inconsistent {
                    a,
                    t_g,
                    representation: r.representation_gap,
                    matsubara: r.matsubara_gap,
                });
            }
        }
        let f_eq = if self.emit_ratio {
            Some(self.model.equilibrium_force(a, self.t_e, &self.spec).map_err(physics)?.force)
        } else {
            None
        };
        Ok(Row {
            a,
            f_neq: f.force,
            f_eq,
            ratio: f_eq.map(|eq| f.force / eq),
            f_tilde: f.equilibrium_like,
            delta: f.nonequilibrium,
            err: f.error,
            t_g,
        })
    }
}

/// Metadata lines: tool version, config hash, constants, settings.
pub fn metadata(config: &RunConfig) -> Result<Vec<(String, String)>> {
    let mut m = vec![
        ("tool".to_string(), format!("neqcp {}", env!("CARGO_PKG_VERSION"))),
        ("model".to_string(), crate::config::MODEL_TAG.to_string()),
        ("config_hash".to_string(), config.hash()?),
        ("sign".to_string(), "attraction negative, repulsion positive".to_string()),
    ];
    for (k, v) in config.constants()?.table() {
        m.push((k.to_string(), format!("{v:?}")));
    }
    let tol = config.tolerances();
    m.push(("tol_inner".to_string(), format!("{:?}", tol.inner)));
    m.push(("budget".to_string(), tol.budget.to_string()));
    for (k, v) in config.settings() {
        m.push((k.to_string(), v));
    }
    Ok(m)
}

/// `(a, T_g)` pairs in row order: ascending `a`, then `T_g` as listed.
pub fn row_points(config: &RunConfig) -> Vec<(f64, f64)> {
    config.grid().into_iter().flat_map(|a| config.t_g.iter().map(move |&t| (a, t))).collect()
}

fn thread_pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))
}

/// Evaluates every row on up to `jobs` threads; rows come back in grid
/// order whatever the scheduling. The first failing row aborts the sweep.
pub fn run_sweep_with(config: &RunConfig, evaluator: &dyn PointEvaluator, jobs: usize) -> Result<Table> {
    config.validate()?;
    let points = row_points(config);
    let pool = thread_pool(jobs)?;
    let results: Vec<Result<Row>> = pool.install(|| {
        points
            .par_iter()
            .enumerate()
            .map(|(i, &(a, t_g))| {
                log::debug!("row {i}: a = {a:e} m, T_g = {t_g} K");
                evaluator.evaluate(i, a, t_g)
            })
            .collect()
    });
    let rows = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(Table { metadata: metadata(config)?, rows })
}

pub fn run_sweep(config: &RunConfig, jobs: usize) -> Result<Table> {
    config.validate()?;
    run_sweep_with(config, &PhysicsEvaluator::new(config)?, jobs)
}

/// Representation cross-check at every row point, in row order.
pub fn verify_grid(config: &RunConfig, jobs: usize) -> Result<Vec<(f64, f64, ConsistencyReport)>> {
    config.validate()?;
    let evaluator = PhysicsEvaluator::new(config)?;
    let points = row_points(config);
    thread_pool(jobs)?
        .install(|| {
            points
                .par_iter()
                .enumerate()
                .map(|(i, &(a, t_g))| Ok((a, t_g, evaluator.cross_check(i, a, t_g)?)))
                .collect::<Vec<Result<_>>>()
        })
        .into_iter()
        .collect()
}
