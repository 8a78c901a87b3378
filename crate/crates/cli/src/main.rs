use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use skypath::experiment::{
    compare, export_coverage, export_environment, format_comparison, rollout_saved, run_experiment, Environment,
    ExperimentConfig,
};

/// Urban cellular coverage simulator and UAV path planners.
#[derive(Parser)]
#[command(name = "skypath", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the building layout and write buildings.csv.
    GenerateEnv(ConfigArgs),
    /// Evaluate the coverage map on the planning lattice.
    CoverageMap(ConfigArgs),
    /// Run one planner and write its artifacts.
    Solve(ConfigArgs),
    /// Fly greedily on a saved value matrix.
    Rollout {
        #[command(flatten)]
        config: ConfigArgs,
        /// value_<solver>.csv written by `solve`.
        #[arg(long)]
        values: PathBuf,
        /// Never step straight back to the previous state.
        #[arg(long)]
        exclude_backtrack: bool,
    },
    /// Tabulate finished runs over the same environment.
    Compare {
        #[arg(required = true, num_args = 2..)]
        runs: Vec<PathBuf>,
    },
}

/// Config file plus per-key overrides; flags win over the file.
#[derive(Args)]
struct ConfigArgs {
    /// `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<String>,
    /// x_lo,y_lo,x_hi,y_hi in metres.
    #[arg(long, allow_hyphen_values = true)]
    area: Option<String>,
    #[arg(long)]
    altitude: Option<String>,
    #[arg(long)]
    alpha_bd: Option<String>,
    #[arg(long)]
    beta_bd: Option<String>,
    #[arg(long)]
    sigma_bd: Option<String>,
    #[arg(long)]
    clip: Option<String>,
    #[arg(long)]
    isd: Option<String>,
    #[arg(long)]
    antenna_height: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    tx_dbm: Option<String>,
    #[arg(long)]
    carrier_ghz: Option<String>,
    /// sir or max-power.
    #[arg(long)]
    metric: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    gamma_th_db: Option<String>,
    #[arg(long)]
    step: Option<String>,
    #[arg(long)]
    actions: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<String>,
    /// x,y in metres.
    #[arg(long)]
    start: Option<String>,
    /// x,y in metres.
    #[arg(long)]
    goal: Option<String>,
    /// dp, td, td-tile or direct.
    #[arg(long)]
    solver: Option<String>,
    #[arg(long)]
    episodes: Option<String>,
    #[arg(long)]
    max_steps: Option<String>,
    #[arg(long)]
    n_alpha: Option<String>,
    #[arg(long)]
    n_eps: Option<String>,
    #[arg(long)]
    tilings: Option<String>,
    /// Side in metres, or w,h.
    #[arg(long)]
    tile_size: Option<String>,
    #[arg(long)]
    output: Option<String>,
}

impl ConfigArgs {
    fn overrides(&self) -> Vec<(&'static str, &str)> {
        [
            ("seed", &self.seed),
            ("area", &self.area),
            ("altitude", &self.altitude),
            ("alpha_bd", &self.alpha_bd),
            ("beta_bd", &self.beta_bd),
            ("sigma_bd", &self.sigma_bd),
            ("clip", &self.clip),
            ("isd", &self.isd),
            ("antenna_height", &self.antenna_height),
            ("tx_dbm", &self.tx_dbm),
            ("carrier_ghz", &self.carrier_ghz),
            ("metric", &self.metric),
            ("gamma_th_db", &self.gamma_th_db),
            ("step", &self.step),
            ("actions", &self.actions),
            ("mu", &self.mu),
            ("start", &self.start),
            ("goal", &self.goal),
            ("solver", &self.solver),
            ("episodes", &self.episodes),
            ("max_steps", &self.max_steps),
            ("n_alpha", &self.n_alpha),
            ("n_eps", &self.n_eps),
            ("tilings", &self.tilings),
            ("tile_size", &self.tile_size),
            ("output", &self.output),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.as_deref().map(|v| (k, v)))
        .collect()
    }

    fn load(&self) -> Result<ExperimentConfig> {
        let base = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        Ok(base.with_overrides(self.overrides())?)
    }
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::GenerateEnv(args) => {
            let cfg = args.load()?;
            let environment = Environment::generate(&cfg)?;
            export_environment(&environment, &cfg.output)?;
            println!("buildings: {}", environment.env.buildings().len());
            println!("cells: {}", environment.env.cells().cells.len());
            println!("env_fingerprint: {}", environment.fingerprint);
            println!("wrote {}", cfg.output.join("buildings.csv").display());
        }
        Command::CoverageMap(args) => {
            let cfg = args.load()?;
            let environment = Environment::generate(&cfg)?;
            let mdp = cfg.mdp()?;
            export_environment(&environment, &cfg.output)?;
            let field = export_coverage(&environment, &mdp, &cfg.output)?;
            println!(
                "grid: {} x {} at {} m",
                field.grid.nx, field.grid.ny, field.grid.spacing
            );
            println!("disconnected fraction: {:.4}", field.disconnected_fraction());
            println!("env_fingerprint: {}", environment.fingerprint);
        }
        Command::Solve(args) => {
            let cfg = args.load()?;
            let summary = run_experiment(&cfg).with_context(|| format!("solver {}", cfg.solver))?;
            println!("solver: {}", summary.solver);
            println!("return: {}", summary.total_return);
            println!("steps: {}", summary.steps);
            println!("disconnected steps: {}", summary.disconnected_steps);
            if summary.truncated {
                println!("truncated: step cap reached before the goal");
            }
            println!("wall time: {:.2} s", summary.wall_time_s);
            println!("artifacts: {}", summary.dir.display());
        }
        Command::Rollout {
            config,
            values,
            exclude_backtrack,
        } => {
            let cfg = config.load()?;
            let ro = rollout_saved(&cfg, &values, exclude_backtrack)?;
            println!("return: {}", ro.total_return);
            println!("steps: {}", ro.steps());
            println!("disconnected steps: {}", ro.disconnected_steps);
            if ro.truncated {
                println!("truncated: step cap reached before the goal");
            }
            println!("wrote {}", cfg.output.join("path_rollout.csv").display());
        }
        Command::Compare { runs } => {
            print!("{}", format_comparison(&compare(&runs)?));
        }
    }
    Ok(())
}
