//! Model-based baseline: value iteration on the full coverage map, and greedy
//! one-step-lookahead rollouts shared by every value-based planner.

use rand::Rng;

use crate::error::{Error, Result};
use crate::mdp::{GridMdp, State};
use crate::radio::CoverageProbe;

/// Anything that assigns a value to lattice states.
pub trait StateValue {
    fn value(&self, mdp: &GridMdp, s: State) -> f64;
}

/// One value per lattice node, row-major, with the goal pinned to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueTable {
    nx: usize,
    ny: usize,
    values: Vec<f64>,
}

impl ValueTable {
    pub fn from_fn(mdp: &GridMdp, mut f: impl FnMut(State) -> f64) -> Self {
        let lattice = mdp.lattice();
        let mut values: Vec<f64> = mdp.states().map(&mut f).collect();
        values[mdp.index(mdp.goal())] = 0.0;
        Self {
            nx: lattice.nx,
            ny: lattice.ny,
            values,
        }
    }

    pub fn from_values(mdp: &GridMdp, values: Vec<f64>) -> Result<Self> {
        if values.len() != mdp.num_states() {
            return Err(Error::param(
                "values",
                format!("expected {} entries, got {}", mdp.num_states(), values.len()),
            ));
        }
        Ok(Self::from_fn(mdp, |s| values[mdp.index(s)]))
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn get(&self, s: State) -> f64 {
        self.values[s.iy * self.nx + s.ix]
    }

    pub fn set(&mut self, s: State, v: f64) {
        self.values[s.iy * self.nx + s.ix] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }
}

impl StateValue for ValueTable {
    fn value(&self, _mdp: &GridMdp, s: State) -> f64 {
        self.get(s)
    }
}

/// Default convergence tolerance on the sup-norm residual.
pub const DEFAULT_TOLERANCE: f64 = 1e-6;

/// Gauss-Seidel value iteration: row-major in-place sweeps of
/// `V(s) <- max_k R(s) + V(s'_k)` with `V(goal) = 0`, until the largest
/// change in a sweep drops below `tol`. Returns the table and the residual
/// of every sweep.
///
/// `model` is the full coverage map; values start from minus the Manhattan
/// step count to the goal.
pub fn value_iteration_traced<P: CoverageProbe + ?Sized>(
    mdp: &GridMdp,
    model: &P,
    tol: f64,
    max_sweeps: usize,
) -> Result<(ValueTable, Vec<f64>)> {
    if !(tol > 0.0) {
        return Err(Error::param("tol", format!("must be positive, got {tol}")));
    }
    let rewards: Vec<f64> = mdp.states().map(|s| mdp.reward(s, model)).collect();
    let mut table = ValueTable::from_fn(mdp, |s| -(mdp.manhattan_steps_to_goal(s) as f64));
    let goal = mdp.goal();
    let mut residuals = Vec::new();
    for _ in 0..max_sweeps {
        let mut residual = 0.0_f64;
        for n in 0..mdp.num_states() {
            let s = mdp.state_at(n);
            if s == goal {
                continue;
            }
            let best = mdp
                .successors(s)
                .map(|next| table.get(next))
                .fold(f64::NEG_INFINITY, f64::max);
            let updated = rewards[n] + best;
            residual = residual.max((updated - table.values[n]).abs());
            table.values[n] = updated;
        }
        residuals.push(residual);
        if residual < tol {
            return Ok((table, residuals));
        }
    }
    Err(Error::NotConverged {
        sweeps: max_sweeps,
        residual: residuals.last().copied().unwrap_or(f64::INFINITY),
    })
}

pub fn value_iteration<P: CoverageProbe + ?Sized>(
    mdp: &GridMdp,
    model: &P,
    tol: f64,
    max_sweeps: usize,
) -> Result<ValueTable> {
    value_iteration_traced(mdp, model, tol, max_sweeps).map(|(table, _)| table)
}

/// Index of the largest score, ties broken uniformly with `rng`. Entries
/// flagged in `excluded` are skipped unless every entry is excluded.
pub fn greedy_choice<R: Rng + ?Sized>(scores: &[f64], excluded: &[bool], rng: &mut R) -> usize {
    let use_mask = excluded.len() == scores.len() && excluded.iter().any(|&x| !x);
    let allowed = |k: usize| !use_mask || !excluded[k];
    let best = scores
        .iter()
        .enumerate()
        .filter(|&(k, _)| allowed(k))
        .map(|(_, &v)| v)
        .fold(f64::NEG_INFINITY, f64::max);
    let ties: Vec<usize> = (0..scores.len()).filter(|&k| allowed(k) && scores[k] == best).collect();
    match ties.len() {
        0 => 0,
        1 => ties[0],
        n => ties[rng.gen_range(0..n)],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RolloutOptions {
    pub max_steps: usize,
    /// Never choose the action leading straight back to the previous state
    /// (unless it is the only option).
    pub exclude_backtrack: bool,
}

impl RolloutOptions {
    pub fn new(max_steps: usize) -> Self {
        Self {
            max_steps,
            exclude_backtrack: false,
        }
    }
}

/// Path flown by a policy, with the reward collected at each departure.
#[derive(Debug, Clone, PartialEq)]
pub struct Rollout {
    /// Visited states, starting state first.
    pub path: Vec<State>,
    pub rewards: Vec<f64>,
    pub total_return: f64,
    pub disconnected_steps: usize,
    /// `true` when the step cap stopped the flight before the goal.
    pub truncated: bool,
}

impl Rollout {
    pub fn steps(&self) -> usize {
        self.rewards.len()
    }

    pub(crate) fn record(path: Vec<State>, rewards: Vec<f64>, disconnected_steps: usize, reached_goal: bool) -> Self {
        Self {
            total_return: rewards.iter().sum(),
            path,
            rewards,
            disconnected_steps,
            truncated: !reached_goal,
        }
    }
}

/// Flies from the start by one-step lookahead on `value` until the goal or
/// the step cap.
pub fn greedy_rollout<V, P, R>(value: &V, mdp: &GridMdp, probe: &P, options: RolloutOptions, rng: &mut R) -> Rollout
where
    V: StateValue + ?Sized,
    P: CoverageProbe + ?Sized,
    R: Rng + ?Sized,
{
    let mut s = mdp.start();
    let mut prev: Option<State> = None;
    let mut path = vec![s];
    let mut rewards = Vec::new();
    let mut disconnected = 0;
    let mut scores = vec![0.0; mdp.num_actions()];
    let mut excluded = vec![false; mdp.num_actions()];
    while !mdp.is_terminal(s) && rewards.len() < options.max_steps {
        let disc = probe.is_disconnected(mdp.xy(s));
        let r = if disc { -1.0 - mdp.mu() } else { -1.0 };
        disconnected += usize::from(disc);
        for (k, next) in mdp.successors(s).enumerate() {
            scores[k] = r + value.value(mdp, next);
            excluded[k] = options.exclude_backtrack && Some(next) == prev;
        }
        let k = greedy_choice(&scores, &excluded, rng);
        let next = mdp.transition(s, k);
        rewards.push(r);
        prev = Some(s);
        s = next;
        path.push(s);
    }
    Rollout::record(path, rewards, disconnected, mdp.is_terminal(s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radio::AreaSpec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    struct Covered;
    impl CoverageProbe for Covered {
        fn is_disconnected(&self, _: [f64; 2]) -> bool {
            false
        }
    }

    #[test]
    fn corridor_backward_induction() {
        let area = AreaSpec::new(0.0, 0.0, 20.0, 0.0 + 1e-9, 100.0).unwrap();
        let mdp = GridMdp::new(area, 10.0, 4, 30.0, [0.0, 0.0], [20.0, 0.0]).unwrap();
        assert_eq!(mdp.num_states(), 3);
        let v = value_iteration(&mdp, &Covered, DEFAULT_TOLERANCE, 100).unwrap();
        assert_eq!(v.as_slice(), &[-2.0, -1.0, 0.0]);
    }

    #[test]
    fn all_covered_values_are_manhattan() {
        let area = AreaSpec::new(0.0, 0.0, 40.0, 40.0, 100.0).unwrap();
        let mdp = GridMdp::new(area, 10.0, 4, 7.0, [0.0, 0.0], [30.0, 10.0]).unwrap();
        let v = value_iteration(&mdp, &Covered, DEFAULT_TOLERANCE, 100).unwrap();
        for s in mdp.states() {
            assert_eq!(v.get(s), -(mdp.manhattan_steps_to_goal(s) as f64));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let ro = greedy_rollout(&v, &mdp, &Covered, RolloutOptions::new(100), &mut rng);
        assert!(!ro.truncated);
        assert_eq!(ro.steps(), 4);
        assert_eq!(ro.total_return, v.get(mdp.start()));
    }

    #[test]
    fn unreachable_goal_fails_to_converge() {
        // Two actions only move along x; the goal is on another row.
        let area = AreaSpec::new(0.0, 0.0, 30.0, 30.0, 100.0).unwrap();
        let mdp = GridMdp::new(area, 10.0, 2, 1.0, [0.0, 0.0], [0.0, 30.0]).unwrap();
        let err = value_iteration(&mdp, &Covered, DEFAULT_TOLERANCE, 50).unwrap_err();
        assert!(matches!(err, Error::NotConverged { sweeps: 50, .. }));
    }

    #[test]
    fn greedy_choice_ties_and_exclusion() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut counts = [0usize; 4];
        for _ in 0..4000 {
            counts[greedy_choice(&[-5.0, -3.0, -9.0, -3.0], &[], &mut rng)] += 1;
        }
        assert_eq!(counts[0] + counts[2], 0);
        assert!(counts[1] > 1800 && counts[3] > 1800);
        assert_eq!(
            greedy_choice(&[-5.0, -3.0, -9.0, -4.0], &[false, true, false, false], &mut rng),
            3
        );
        // Everything excluded: fall back to the unrestricted argmax.
        assert_eq!(greedy_choice(&[-5.0, -3.0], &[true, true], &mut rng), 1);
    }

    #[test]
    fn bad_tolerance_rejected() {
        let area = AreaSpec::new(0.0, 0.0, 20.0, 20.0, 100.0).unwrap();
        let mdp = GridMdp::new(area, 10.0, 4, 1.0, [0.0, 0.0], [20.0, 20.0]).unwrap();
        assert!(value_iteration(&mdp, &Covered, 0.0, 10).is_err());
    }
}
