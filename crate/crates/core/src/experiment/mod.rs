//! Experiment driver: generate the environment, run one planner, export
//! artifacts, and compare finished runs.

mod artifacts;
mod config;
mod seeds;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use artifacts::{
    env_fingerprint, read_matrix, read_summary, write_buildings, write_matrix, write_path, write_pgm, write_rewards,
    write_summary, write_theta, Matrix,
};
pub use config::{ExperimentConfig, Solver, KEYS};
pub use seeds::{derive_seed, ENVIRONMENT, TIE_BREAKING, TRAINING};

use crate::baseline::run_direct;
use crate::dp::{greedy_rollout, value_iteration, Rollout, RolloutOptions, StateValue, ValueTable, DEFAULT_TOLERANCE};
use crate::error::{Error, Result};
use crate::mdp::GridMdp;
use crate::radio::{build_coverage_field, CachedProbe, CoverageField, RadioEnv};
use crate::td::{greedy_episode, learning_rate, train, TrainStats};
use crate::tile::{train_tile, TileOptions};

/// Sweep cap for value iteration.
pub const MAX_SWEEPS: usize = 100_000;

/// Generated environment with its fingerprint.
#[derive(Debug, Clone)]
pub struct Environment {
    pub env: RadioEnv,
    pub fingerprint: String,
}

impl Environment {
    pub fn generate(cfg: &ExperimentConfig) -> Result<Self> {
        let env = RadioEnv::generate(&cfg.env_config()?)?;
        let fingerprint = env_fingerprint(&env);
        Ok(Self { env, fingerprint })
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Writes `buildings.csv`.
pub fn export_environment(environment: &Environment, dir: &Path) -> Result<()> {
    create_dir(dir)?;
    write_buildings(&dir.join("buildings.csv"), &environment.fingerprint, &environment.env)
}

/// Evaluates the coverage map on the planning lattice and writes
/// `coverage.csv` (1 = disconnected), `quality.csv` (dB) and `coverage.pgm`.
pub fn export_coverage(environment: &Environment, mdp: &GridMdp, dir: &Path) -> Result<CoverageField> {
    create_dir(dir)?;
    let field = build_coverage_field(&environment.env, *mdp.lattice());
    let fp = &environment.fingerprint;
    write_matrix(&dir.join("coverage.csv"), fp, &field.grid, |i, j| field.indicator(i, j))?;
    write_matrix(&dir.join("quality.csv"), fp, &field.grid, |i, j| field.quality(i, j))?;
    write_pgm(&dir.join("coverage.pgm"), fp, &field)?;
    Ok(field)
}

/// Outcome of one run, as recorded in `summary.txt`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub dir: PathBuf,
    pub solver: String,
    pub total_return: f64,
    pub steps: usize,
    pub disconnected_steps: usize,
    pub truncated: bool,
    pub wall_time_s: f64,
    pub fingerprint: String,
    pub seed: u64,
}

impl RunSummary {
    pub fn load(dir: &Path) -> Result<Self> {
        let path = dir.join("summary.txt");
        let map = read_summary(&path)?;
        let field = |key: &str| {
            map.get(key).cloned().ok_or_else(|| Error::Parse {
                path: path.clone(),
                reason: format!("missing `{key}`"),
            })
        };
        let number = |key: &str| -> Result<f64> {
            field(key)?.parse().map_err(|_| Error::Parse {
                path: path.clone(),
                reason: format!("`{key}` is not a number"),
            })
        };
        Ok(Self {
            dir: dir.to_path_buf(),
            solver: field("solver")?,
            total_return: number("return")?,
            steps: number("steps")? as usize,
            disconnected_steps: number("disconnected_steps")? as usize,
            truncated: field("truncated")? == "true",
            wall_time_s: number("wall_time_s")?,
            fingerprint: field("env_fingerprint")?,
            seed: number("seed")? as u64,
        })
    }
}

/// Final path of a finished run plus whatever the planner learned.
pub struct SolveOutput {
    pub rollout: Rollout,
    pub stats: Option<TrainStats>,
}

fn tie_rng(cfg: &ExperimentConfig) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, TIE_BREAKING))
}

fn write_values(path: &Path, fp: &str, mdp: &GridMdp, value: &impl StateValue) -> Result<()> {
    write_matrix(path, fp, mdp.lattice(), |i, j| {
        value.value(mdp, crate::mdp::State::new(i, j))
    })
}

/// Runs the configured planner and writes its artifacts into `dir`.
///
/// `dp` and `direct` plan on the coverage map. The learners only query the
/// environment at the states they visit; their final path is one greedy
/// episode that keeps learning at the next episode's rate.
pub fn solve(
    cfg: &ExperimentConfig,
    environment: &Environment,
    mdp: &GridMdp,
    field: &CoverageField,
    dir: &Path,
) -> Result<SolveOutput> {
    let fp = &environment.fingerprint;
    let name = cfg.solver.name();
    let mut rng = tie_rng(cfg);
    let options = RolloutOptions::new(cfg.max_steps);
    let probe = CachedProbe::new(&environment.env);
    let final_alpha = learning_rate(cfg.episodes + 1, cfg.n_alpha);
    let (rollout, stats) = match cfg.solver {
        Solver::Dp => {
            let table = value_iteration(mdp, field, DEFAULT_TOLERANCE, MAX_SWEEPS)?;
            write_values(&dir.join(format!("value_{name}.csv")), fp, mdp, &table)?;
            (greedy_rollout(&table, mdp, field, options, &mut rng), None)
        }
        Solver::Direct => (run_direct(mdp, field, cfg.max_steps), None),
        Solver::Td => {
            let (mut table, stats) = train(mdp, &probe, &cfg.td_config())?;
            let rollout = greedy_episode(&mut table, mdp, &probe, final_alpha, options, &mut rng);
            write_values(&dir.join(format!("value_{name}.csv")), fp, mdp, &table)?;
            (rollout, Some(stats))
        }
        Solver::TdTile => {
            let tile_options = TileOptions::default();
            let (mut value, stats) = train_tile(mdp, &probe, &cfg.td_config(), cfg.tiling()?, &tile_options)?;
            let options = RolloutOptions {
                exclude_backtrack: tile_options.cycle_exclusion,
                ..options
            };
            let rollout = greedy_episode(&mut value, mdp, &probe, final_alpha, options, &mut rng);
            write_theta(&dir.join(format!("theta_{name}.csv")), fp, value.spec(), &value.theta)?;
            write_values(&dir.join(format!("value_{name}.csv")), fp, mdp, &value)?;
            (rollout, Some(stats))
        }
    };
    if let Some(stats) = &stats {
        write_rewards(&dir.join(format!("rewards_{name}.csv")), fp, stats)?;
    }
    write_path(&dir.join(format!("path_{name}.csv")), fp, mdp, &rollout)?;
    Ok(SolveOutput { rollout, stats })
}

/// Full pipeline for one configuration: environment, coverage map, planner,
/// artifacts and `summary.txt` in `cfg.output`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunSummary> {
    cfg.validate()?;
    let started = Instant::now();
    let dir = cfg.output.clone();
    let environment = Environment::generate(cfg)?;
    let mdp = cfg.mdp()?;
    export_environment(&environment, &dir)?;
    let field = export_coverage(&environment, &mdp, &dir)?;
    let out = solve(cfg, &environment, &mdp, &field, &dir)?;
    let summary = RunSummary {
        dir: dir.clone(),
        solver: cfg.solver.to_string(),
        total_return: out.rollout.total_return,
        steps: out.rollout.steps(),
        disconnected_steps: out.rollout.disconnected_steps,
        truncated: out.rollout.truncated,
        wall_time_s: started.elapsed().as_secs_f64(),
        fingerprint: environment.fingerprint.clone(),
        seed: cfg.seed,
    };
    let mut entries: Vec<(String, String)> = vec![
        ("solver".into(), summary.solver.clone()),
        ("return".into(), summary.total_return.to_string()),
        ("steps".into(), summary.steps.to_string()),
        ("disconnected_steps".into(), summary.disconnected_steps.to_string()),
        ("truncated".into(), summary.truncated.to_string()),
        ("wall_time_s".into(), format!("{:.3}", summary.wall_time_s)),
        ("env_fingerprint".into(), summary.fingerprint.clone()),
        ("seed".into(), cfg.seed.to_string()),
    ];
    for label in [ENVIRONMENT, TRAINING, TIE_BREAKING] {
        entries.push((format!("seed.{label}"), derive_seed(cfg.seed, label).to_string()));
    }
    for key in KEYS {
        entries.push((format!("config.{key}"), cfg.get(key).expect("listed key")));
    }
    write_summary(&dir.join("summary.txt"), &entries)?;
    Ok(summary)
}

/// Loads finished runs; all must share one environment fingerprint.
pub fn compare(run_dirs: &[PathBuf]) -> Result<Vec<RunSummary>> {
    if run_dirs.len() < 2 {
        return Err(Error::param("run_dirs", "need at least two runs to compare"));
    }
    let runs = run_dirs
        .iter()
        .map(|d| RunSummary::load(d))
        .collect::<Result<Vec<_>>>()?;
    let reference = &runs[0];
    if let Some(other) = runs.iter().find(|r| r.fingerprint != reference.fingerprint) {
        return Err(Error::FingerprintMismatch(format!(
            "{} has {}, {} has {}",
            reference.dir.display(),
            reference.fingerprint,
            other.dir.display(),
            other.fingerprint
        )));
    }
    Ok(runs)
}

/// Fixed-width table of solver, return, steps and disconnected steps.
pub fn format_comparison(runs: &[RunSummary]) -> String {
    let mut out = format!(
        "{:<10} {:>10} {:>7} {:>13}  {}\n",
        "solver", "return", "steps", "disconnected", "run"
    );
    for r in runs {
        let flag = if r.truncated { " (truncated)" } else { "" };
        let _ = writeln!(
            out,
            "{:<10} {:>10} {:>7} {:>13}  {}{flag}",
            r.solver,
            r.total_return,
            r.steps,
            r.disconnected_steps,
            r.dir.display()
        );
    }
    out
}

/// Greedy rollout on a saved value matrix over the environment of `cfg`.
/// Writes `path_rollout.csv` into `cfg.output`.
pub fn rollout_saved(cfg: &ExperimentConfig, values_path: &Path, exclude_backtrack: bool) -> Result<Rollout> {
    let environment = Environment::generate(cfg)?;
    let mdp = cfg.mdp()?;
    let matrix = read_matrix(values_path)?;
    if matrix.fingerprint != environment.fingerprint {
        return Err(Error::FingerprintMismatch(format!(
            "{} was saved for {}, configuration gives {}",
            values_path.display(),
            matrix.fingerprint,
            environment.fingerprint
        )));
    }
    let lattice = mdp.lattice();
    if matrix.xs.len() != lattice.nx || matrix.ys.len() != lattice.ny {
        return Err(Error::Parse {
            path: values_path.to_path_buf(),
            reason: format!(
                "{}x{} values do not match the {}x{} lattice",
                matrix.xs.len(),
                matrix.ys.len(),
                lattice.nx,
                lattice.ny
            ),
        });
    }
    let table = ValueTable::from_values(&mdp, matrix.values)?;
    let probe = CachedProbe::new(&environment.env);
    let options = RolloutOptions {
        max_steps: cfg.max_steps,
        exclude_backtrack,
    };
    let rollout = greedy_rollout(&table, &mdp, &probe, options, &mut tie_rng(cfg));
    create_dir(&cfg.output)?;
    write_path(
        &cfg.output.join("path_rollout.csv"),
        &environment.fingerprint,
        &mdp,
        &rollout,
    )?;
    Ok(rollout)
}
