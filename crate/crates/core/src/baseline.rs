//! Communication-unaware benchmark: always step towards the goal.

use crate::dp::Rollout;
use crate::mdp::GridMdp;
use crate::radio::CoverageProbe;

/// Greedy-to-goal lattice walk: each step takes the action whose successor is
/// closest to the goal (lowest action index on ties). Stops at the goal or
/// after `max_steps`.
pub fn run_direct<P: CoverageProbe + ?Sized>(mdp: &GridMdp, probe: &P, max_steps: usize) -> Rollout {
    let mut s = mdp.start();
    let mut path = vec![s];
    let mut rewards = Vec::new();
    let mut disconnected = 0;
    while !mdp.is_terminal(s) && rewards.len() < max_steps {
        let disc = probe.is_disconnected(mdp.xy(s));
        disconnected += usize::from(disc);
        rewards.push(if disc { -1.0 - mdp.mu() } else { -1.0 });
        let mut best = s;
        let mut best_d = f64::INFINITY;
        for next in mdp.successors(s) {
            let d = mdp.distance_to_goal(next);
            if d < best_d {
                best = next;
                best_d = d;
            }
        }
        s = best;
        path.push(s);
    }
    Rollout::record(path, rewards, disconnected, mdp.is_terminal(s))
}
