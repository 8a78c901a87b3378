//! Model-free, table-based TD(0) learning of the state-value function.
//!
//! The learner only ever sees the connectivity measured at the states it
//! visits. Actions come from an epsilon-greedy policy built by one-step
//! lookahead on the current value estimate (transitions are known and
//! deterministic), so no action values are stored.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dp::{greedy_choice, Rollout, RolloutOptions, StateValue, ValueTable};
use crate::error::{Error, Result};
use crate::mdp::{GridMdp, State};
use crate::radio::CoverageProbe;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TdConfig {
    pub max_episodes: usize,
    pub max_steps: usize,
    /// Learning-rate schedule constant.
    pub n_alpha: f64,
    /// Exploration schedule constant.
    pub n_eps: f64,
    pub rng_seed: u64,
}

impl Default for TdConfig {
    fn default() -> Self {
        Self {
            max_episodes: 6000,
            max_steps: 1000,
            n_alpha: 2000.0,
            n_eps: 300.0,
            rng_seed: 0,
        }
    }
}

impl TdConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_episodes == 0 {
            return Err(Error::param("episodes", "must be positive"));
        }
        if self.max_steps == 0 {
            return Err(Error::param("max_steps", "must be positive"));
        }
        if !(self.n_alpha > 0.0) {
            return Err(Error::param(
                "n_alpha",
                format!("must be positive, got {}", self.n_alpha),
            ));
        }
        if !(self.n_eps > 0.0) {
            return Err(Error::param("n_eps", format!("must be positive, got {}", self.n_eps)));
        }
        Ok(())
    }
}

/// Learning rate for episode `n_epi` (1-based): `N_a / (N_a + n_epi)`.
pub fn learning_rate(n_epi: usize, n_alpha: f64) -> f64 {
    n_alpha / (n_alpha + n_epi as f64)
}

/// Exploration probability for episode `n_epi` (1-based): `0.5 N_e / (N_e + n_epi)`.
pub fn exploration_rate(n_epi: usize, n_eps: f64) -> f64 {
    0.5 * n_eps / (n_eps + n_epi as f64)
}

/// `V(s) = -||s - goal||`, which makes the first episode fly towards the goal.
pub fn init_distance(mdp: &GridMdp) -> ValueTable {
    ValueTable::from_fn(mdp, |s| -mdp.distance_to_goal(s))
}

/// With probability `eps` a uniformly random action, otherwise the greedy
/// action over `scores` (ties uniform, `excluded` actions skipped).
pub fn epsilon_greedy<R: Rng + ?Sized>(scores: &[f64], excluded: &[bool], eps: f64, rng: &mut R) -> usize {
    if rng.gen::<f64>() < eps {
        rng.gen_range(0..scores.len())
    } else {
        greedy_choice(scores, excluded, rng)
    }
}

/// `V(s) <- V(s) + alpha [R + V(s') - V(s)]`.
pub fn td_update(table: &mut ValueTable, s: State, reward: f64, s_next: State, alpha: f64) {
    let v = table.get(s);
    table.set(s, v + alpha * (reward + table.get(s_next) - v));
}

/// Per-episode learning curve.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainStats {
    pub returns: Vec<f64>,
    pub steps: Vec<usize>,
    pub disconnected_steps: Vec<usize>,
}

impl TrainStats {
    pub fn episodes(&self) -> usize {
        self.returns.len()
    }

    fn push(&mut self, ret: f64, steps: usize, disconnected: usize) {
        self.returns.push(ret);
        self.steps.push(steps);
        self.disconnected_steps.push(disconnected);
    }
}

/// A value estimate that can absorb one TD(0) transition.
pub trait TdLearner: StateValue {
    fn td_step(&mut self, mdp: &GridMdp, s: State, reward: f64, s_next: State, alpha: f64);
}

impl TdLearner for ValueTable {
    fn td_step(&mut self, _mdp: &GridMdp, s: State, reward: f64, s_next: State, alpha: f64) {
        td_update(self, s, reward, s_next, alpha);
    }
}

/// Episode loop shared by the table and tile-coded learners.
///
/// Each step measures the reward at the current state, picks an action,
/// moves, and updates the estimate. Episodes end at the goal or after
/// `max_steps` moves. With `exclude_backtrack` the greedy branch never picks
/// the action returning to the previous state (unless nothing else is left).
pub fn run_td<L, P>(
    learner: &mut L,
    mdp: &GridMdp,
    probe: &P,
    cfg: &TdConfig,
    exclude_backtrack: bool,
    mut on_step: impl FnMut(usize, State, f64, State),
) -> Result<TrainStats>
where
    L: TdLearner + ?Sized,
    P: CoverageProbe + ?Sized,
{
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let k = mdp.num_actions();
    let mut scores = vec![0.0; k];
    let mut excluded = vec![false; k];
    let mut stats = TrainStats::default();
    for n_epi in 1..=cfg.max_episodes {
        let alpha = learning_rate(n_epi, cfg.n_alpha);
        let eps = exploration_rate(n_epi, cfg.n_eps);
        let mut s = mdp.start();
        let mut prev: Option<State> = None;
        let (mut ret, mut steps, mut disconnected) = (0.0, 0usize, 0usize);
        loop {
            let disc = probe.is_disconnected(mdp.xy(s));
            let reward = if disc { -1.0 - mdp.mu() } else { -1.0 };
            for (a, next) in mdp.successors(s).enumerate() {
                scores[a] = reward + learner.value(mdp, next);
                excluded[a] = exclude_backtrack && Some(next) == prev;
            }
            let action = epsilon_greedy(&scores, &excluded, eps, &mut rng);
            let next = mdp.transition(s, action);
            learner.td_step(mdp, s, reward, next, alpha);
            on_step(n_epi, s, reward, next);
            ret += reward;
            steps += 1;
            disconnected += usize::from(disc);
            prev = Some(s);
            s = next;
            if mdp.is_terminal(s) || steps == cfg.max_steps {
                break;
            }
        }
        stats.push(ret, steps, disconnected);
    }
    Ok(stats)
}

/// Table-based TD(0) from the distance initialisation.
pub fn train<P: CoverageProbe + ?Sized>(mdp: &GridMdp, probe: &P, cfg: &TdConfig) -> Result<(ValueTable, TrainStats)> {
    let mut table = init_distance(mdp);
    let stats = run_td(&mut table, mdp, probe, cfg, false, |_, _, _, _| {})?;
    Ok((table, stats))
}

/// Greedy flight from the start that keeps applying TD updates at `alpha`.
///
/// A frozen, partially trained table can hold flat plateaus where two
/// neighbours each look best from the other, so a pure lookahead rollout
/// oscillates until the step cap. Learning during the flight lowers each
/// revisited estimate and breaks such loops, as it does during training.
pub fn greedy_episode<L, P, R>(
    learner: &mut L,
    mdp: &GridMdp,
    probe: &P,
    alpha: f64,
    options: RolloutOptions,
    rng: &mut R,
) -> Rollout
where
    L: TdLearner + ?Sized,
    P: CoverageProbe + ?Sized,
    R: Rng + ?Sized,
{
    let k = mdp.num_actions();
    let mut scores = vec![0.0; k];
    let mut excluded = vec![false; k];
    let mut s = mdp.start();
    let mut prev: Option<State> = None;
    let mut path = vec![s];
    let mut rewards = Vec::new();
    let mut disconnected = 0;
    while !mdp.is_terminal(s) && rewards.len() < options.max_steps {
        let disc = probe.is_disconnected(mdp.xy(s));
        let reward = if disc { -1.0 - mdp.mu() } else { -1.0 };
        disconnected += usize::from(disc);
        for (a, next) in mdp.successors(s).enumerate() {
            scores[a] = reward + learner.value(mdp, next);
            excluded[a] = options.exclude_backtrack && Some(next) == prev;
        }
        let next = mdp.transition(s, greedy_choice(&scores, &excluded, rng));
        learner.td_step(mdp, s, reward, next, alpha);
        rewards.push(reward);
        prev = Some(s);
        s = next;
        path.push(s);
    }
    Rollout::record(path, rewards, disconnected, mdp.is_terminal(s))
}
