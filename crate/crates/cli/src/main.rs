use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use neqcp::cache::{sweep_cached, Cache, CACHE_ENV};
use neqcp::config::{parse_material, parse_temperature_list, RunConfig};
use neqcp::sweep::{metadata, PhysicsEvaluator, PointEvaluator};
use neqcp::table::{format_number, to_csv_string, Table};
use neqcp::{find_force_zero, verify_grid, CliError, Result};

/// Casimir-Polder force between a nanoparticle and a graphene sheet held at
/// a different temperature than the environment. Attraction is negative.
#[derive(Debug, Parser)]
#[command(name = "neqcp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Options,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Force at a single separation.
    Force {
        /// Separation, m.
        #[arg(long)]
        a: f64,
    },
    /// Force table over the separation grid for each graphene temperature.
    Sweep,
    /// Separation where the force turns from attraction to repulsion
    /// (repulsion is positive). Uses the first graphene temperature.
    ZeroCross {
        /// Lower bracket end, m (default a_min).
        #[arg(long)]
        lo: Option<f64>,
        /// Upper bracket end, m (default a_max).
        #[arg(long)]
        hi: Option<f64>,
    },
    /// Compare the two representations of the force on the grid.
    Verify,
    /// Ratio F_neq/F_eq over the grid; graphene at 77, 500 and 700 K unless
    /// set otherwise.
    Ratio,
}

#[derive(Debug, Args)]
struct Options {
    /// Key-value config file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (default stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Relative force tolerance; the tensor tolerance follows at 1/100 of it.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Cross-check the representations at every point.
    #[arg(long, global = true)]
    verify: bool,
    #[arg(long, global = true, env = CACHE_ENV)]
    cache_dir: Option<PathBuf>,
    /// Fermi velocity, m/s.
    #[arg(long, global = true)]
    vf: Option<f64>,
    /// Graphene temperatures, K, comma-separated.
    #[arg(long, global = true)]
    tg: Option<String>,
    /// Environment temperature, K.
    #[arg(long, global = true)]
    te: Option<f64>,
    /// Nanoparticle radius, m.
    #[arg(long, global = true)]
    radius: Option<f64>,
    /// metal or dielectric:EPS.
    #[arg(long, global = true)]
    material: Option<String>,
    #[arg(long, global = true)]
    amin: Option<f64>,
    #[arg(long, global = true)]
    amax: Option<f64>,
    #[arg(long, global = true)]
    points: Option<usize>,
    /// log or linear.
    #[arg(long, global = true)]
    spacing: Option<String>,
}

impl Options {
    fn config(&self, command: &Command) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        if matches!(command, Command::Ratio) {
            cfg.t_g = vec![77.0, 500.0, 700.0];
        }
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        if matches!(command, Command::Ratio) {
            cfg.emit_ratio = true;
        }
        if let Some(t) = self.tol {
            cfg.tol_force = t;
            cfg.tol_tensor = 0.01 * t;
        }
        if self.verify {
            cfg.verify = true;
        }
        if let Some(v) = self.vf {
            cfg.v_f = v;
        }
        if let Some(list) = &self.tg {
            cfg.t_g = parse_temperature_list(list)?;
        }
        if let Some(t) = self.te {
            cfg.t_e = t;
        }
        if let Some(r) = self.radius {
            cfg.spec.radius = r;
        }
        if let Some(m) = &self.material {
            cfg.spec.material = parse_material(m)?;
        }
        if let Some(a) = self.amin {
            cfg.a_min = a;
        }
        if let Some(a) = self.amax {
            cfg.a_max = a;
        }
        if let Some(n) = self.points {
            cfg.points = n;
        }
        if let Some(s) = &self.spacing {
            cfg.spacing = s.parse()?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn jobs(&self) -> usize {
        self.jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
    }
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::io(p, e)),
        None => std::io::stdout().lock().write_all(text.as_bytes()).map_err(|e| CliError::io("<stdout>", e)),
    }
}

fn run(cli: Cli) -> Result<()> {
    let cfg = cli.opts.config(&cli.command)?;
    let out = cli.opts.out.as_deref();
    let jobs = cli.opts.jobs();
    match cli.command {
        Command::Force { a } => {
            if !(a > 0.0) {
                return Err(CliError::Config(format!("separation must be positive, got {a}")));
            }
            let evaluator = PhysicsEvaluator::new(&cfg)?;
            let rows =
                cfg.t_g.iter().enumerate().map(|(i, &t)| evaluator.evaluate(i, a, t)).collect::<Result<Vec<_>>>()?;
            let table = Table { metadata: metadata(&cfg)?, rows };
            write_out(out, &to_csv_string(&table)?)
        }
        Command::Sweep | Command::Ratio => {
            let cache = cli.opts.cache_dir.as_ref().map(Cache::new).transpose()?;
            let result = sweep_cached(&cfg, jobs, cache.as_ref())?;
            write_out(out, &result.csv)
        }
        Command::ZeroCross { lo, hi } => {
            let t_g = cfg.t_g[0];
            let z = find_force_zero(&cfg, t_g, lo.unwrap_or(cfg.a_min), hi.unwrap_or(cfg.a_max))?;
            let mut text = String::new();
            for (k, v) in metadata(&cfg)? {
                text.push_str(&format!("# {k}: {v}\n"));
            }
            text.push_str("separation_m,lo_m,hi_m,F_lo_N,F_hi_N,noise_width_m,T_g_K\n");
            let cols = [z.separation, z.lo, z.hi, z.f_lo, z.f_hi, z.noise_width, t_g];
            text.push_str(&cols.map(format_number).join(","));
            text.push('\n');
            write_out(out, &text)
        }
        Command::Verify => {
            let reports = verify_grid(&cfg, jobs)?;
            let mut text = String::new();
            for (k, v) in metadata(&cfg)? {
                text.push_str(&format!("# {k}: {v}\n"));
            }
            text.push_str("a_m,T_g_K,F_neq_N,assembly_N,representation_gap,half_difference_real_N,half_difference_matsubara_N,matsubara_gap,consistent\n");
            let mut failed = None;
            for (a, t_g, r) in &reports {
                let nums = [
                    *a,
                    *t_g,
                    r.f_neq,
                    r.assembly,
                    r.representation_gap,
                    r.half_difference_real,
                    r.half_difference_matsubara,
                    r.matsubara_gap,
                ];
                text.push_str(&nums.map(format_number).join(","));
                text.push_str(&format!(",{}\n", r.consistent()));
                if !r.consistent() && failed.is_none() {
                    failed = Some(CliError::Inconsistent {
                        a: *a,
                        t_g: *t_g,
                        representation: r.representation_gap,
                        matsubara: r.matsubara_gap,
                    });
                }
            }
            write_out(out, &text)?;
            failed.map_or(Ok(()), Err)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(4);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("neqcp: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
