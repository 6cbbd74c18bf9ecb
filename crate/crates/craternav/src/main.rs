//! Command-line front end: generate crater fields, run single scenarios, and
//! sweep Monte Carlo evaluations. Set `CRATERNAV_LOG` (e.g. `info`, `debug`)
//! to control log verbosity.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use craternav::config::{load_config, ScenarioConfig};
use craternav::error::{Error, Result};
use craternav::eval::{
    aggregate_to_csv, compute_metrics, final_errors_to_csv, masking_sweep, monte_carlo,
    plot_data, run_scenario, AggregateStats,
};
use craternav::sim::generate_crater_field;
use craternav::types::{crater_db_to_csv, load_crater_db};

#[derive(Parser)]
#[command(name = "craternav", version, about = "Crater-landmark localization experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Scenario configuration file (flat `key = value` lines).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; created if absent, refused if non-empty unless --force.
    #[arg(long)]
    out: PathBuf,
    /// Override the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Write into an existing non-empty output directory.
    #[arg(long)]
    force: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a crater field and write it as a database CSV.
    Gen(CommonArgs),
    /// Run one scenario and write the trajectory log and metrics.
    Run(CommonArgs),
    /// Run a Monte Carlo evaluation (optionally sweeping orbital masking).
    Eval {
        #[command(flatten)]
        common: CommonArgs,
        /// Number of seeded runs.
        #[arg(long, default_value_t = 50)]
        runs: usize,
        /// Worker threads (default: all processors).
        #[arg(long)]
        jobs: Option<usize>,
        /// Comma-separated orbital masking fractions to sweep.
        #[arg(long, value_delimiter = ',')]
        masking: Option<Vec<f64>>,
    },
    /// Print the version.
    Version,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("CRATERNAV_LOG")).init();
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen(common) => cmd_gen(&common),
        Command::Run(common) => cmd_run(&common),
        Command::Eval { common, runs, jobs, masking } => cmd_eval(&common, runs, jobs, masking),
        Command::Version => {
            println!("craternav {}", env!("CARGO_PKG_VERSION"));
            Ok(())
        }
    }
}

fn load_resolved_config(common: &CommonArgs) -> Result<ScenarioConfig> {
    let mut cfg = load_config(&common.config)?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    // Crater database paths are relative to the config file.
    if let (Some(db), Some(dir)) = (&cfg.crater_db, common.config.parent()) {
        if db.is_relative() {
            cfg.crater_db = Some(dir.join(db));
        }
    }
    Ok(cfg)
}

fn prepare_out_dir(dir: &Path, force: bool) -> Result<()> {
    if dir.exists() {
        let occupied = fs::read_dir(dir)?.next().is_some();
        if occupied && !force {
            return Err(Error::Validation(format!(
                "output directory {} is not empty (use --force to overwrite)",
                dir.display()
            )));
        }
    } else {
        fs::create_dir_all(dir)?;
    }
    Ok(())
}

fn cmd_gen(common: &CommonArgs) -> Result<()> {
    let cfg = load_resolved_config(common)?;
    prepare_out_dir(&common.out, common.force)?;

    let db = match &cfg.crater_db {
        Some(path) => load_crater_db(path)?,
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            generate_crater_field(&cfg, &mut rng)?
        }
    };
    fs::write(common.out.join("craters.csv"), crater_db_to_csv(&db))?;
    fs::write(common.out.join("config_echo.cfg"), cfg.to_config_string())?;
    println!(
        "wrote {} craters to {}",
        db.len(),
        common.out.join("craters.csv").display()
    );
    Ok(())
}

fn cmd_run(common: &CommonArgs) -> Result<()> {
    let cfg = load_resolved_config(common)?;
    prepare_out_dir(&common.out, common.force)?;

    let log = run_scenario(&cfg)?;
    let metrics = compute_metrics(&log);
    fs::write(common.out.join("trajectory.csv"), log.to_csv())?;

    let mut metrics_csv = String::from("step,dr_err_m,pf_err_m,gmm_err_m,baseline_m\n");
    for k in 0..metrics.dr_error.len() {
        use std::fmt::Write as _;
        let _ = writeln!(
            metrics_csv,
            "{},{},{},{},{}",
            k, metrics.dr_error[k], metrics.pf_error[k], metrics.gmm_error[k], metrics.baseline_2pct[k]
        );
    }
    fs::write(common.out.join("metrics.csv"), metrics_csv)?;
    fs::write(common.out.join("config_echo.cfg"), cfg.to_config_string())?;

    println!(
        "final error [m]: dr={:.3} pf={:.3} gmm={:.3} baseline={:.3}",
        metrics.final_dr(),
        metrics.final_pf(),
        metrics.final_gmm(),
        metrics.final_baseline()
    );
    Ok(())
}

fn write_aggregate(dir: &Path, stats: &AggregateStats, seed0: u64) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("aggregate.csv"), aggregate_to_csv(stats))?;
    fs::write(dir.join("final_errors.csv"), final_errors_to_csv(stats, seed0))?;
    fs::write(dir.join("plot_dr.dat"), plot_data(&stats.dead_reckoning.mean_step_error))?;
    fs::write(dir.join("plot_pf.dat"), plot_data(&stats.particle_filter.mean_step_error))?;
    fs::write(dir.join("plot_gmm.dat"), plot_data(&stats.gmm.mean_step_error))?;
    fs::write(dir.join("plot_baseline.dat"), plot_data(&stats.baseline_curve))?;
    Ok(())
}

fn cmd_eval(
    common: &CommonArgs,
    runs: usize,
    jobs: Option<usize>,
    masking: Option<Vec<f64>>,
) -> Result<()> {
    if runs == 0 {
        return Err(Error::Validation("--runs must be >= 1".into()));
    }
    let cfg = load_resolved_config(common)?;
    prepare_out_dir(&common.out, common.force)?;

    if let Some(jobs) = jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Error::Validation(format!("failed to size worker pool: {e}")))?;
    }

    fs::write(common.out.join("config_echo.cfg"), cfg.to_config_string())?;
    let seed0 = cfg.seed;

    match masking {
        None => {
            let stats = monte_carlo(&cfg, runs, seed0)?;
            write_aggregate(&common.out, &stats, seed0)?;
            print_stats(&cfg, &stats, None);
        }
        Some(fractions) => {
            let sweep = masking_sweep(&cfg, &fractions, runs, seed0)?;
            let mut summary =
                String::from("mask_frac,method,n,mean_final_m,median_final_m,std_final_m,win_rate\n");
            for (frac, stats) in &sweep {
                let sub = common.out.join(format!("mask_{frac}"));
                write_aggregate(&sub, stats, seed0)?;
                for line in aggregate_to_csv(stats).lines().skip(1) {
                    use std::fmt::Write as _;
                    let _ = writeln!(summary, "{frac},{line}");
                }
                print_stats(&cfg, stats, Some(*frac));
            }
            fs::write(common.out.join("masking_summary.csv"), summary)?;
        }
    }
    Ok(())
}

fn print_stats(cfg: &ScenarioConfig, stats: &AggregateStats, mask: Option<f64>) {
    let header = match mask {
        Some(f) => format!("orbital masking {:.0}%", f * 100.0),
        None => "evaluation".to_string(),
    };
    println!(
        "{header}: n={} runs, path {:.0} m, corrections fed back: {}",
        stats.n_runs, stats.path_length, cfg.gmm_feedback
    );
    for (name, m) in [
        ("dead reckoning ", &stats.dead_reckoning),
        ("particle filter", &stats.particle_filter),
        ("gmm matcher    ", &stats.gmm),
    ] {
        println!(
            "  {name}: mean {:7.3} m  median {:7.3} m  std {:7.3} m  rel {:6.4}  win rate {:.2}",
            m.mean_final,
            m.median_final,
            m.std_final,
            m.mean_final / stats.path_length,
            m.win_rate
        );
    }
}
