//! The flight as an episodic MDP on a square lattice.
//!
//! States are lattice nodes spaced one flight step apart, actions are `K`
//! evenly spaced headings, and a move that would leave the area keeps the UAV
//! in place. Every step costs 1, plus `mu` when the departure state is
//! disconnected. Reaching the goal ends the episode.

use crate::error::{Error, Result};
use crate::radio::{AreaSpec, CoverageProbe, GridSpec};

/// A lattice node, addressed by column `ix` and row `iy`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State {
    pub ix: usize,
    pub iy: usize,
}

impl State {
    pub const fn new(ix: usize, iy: usize) -> Self {
        Self { ix, iy }
    }
}

/// Unit heading of action `k` (0-based): `[cos phi, sin phi]`, `phi = 2 pi k / K`.
pub fn action_direction(k: usize, num_actions: usize) -> Result<[f64; 2]> {
    if k >= num_actions {
        return Err(Error::ActionOutOfRange { index: k, num_actions });
    }
    let phi = 2.0 * std::f64::consts::PI * k as f64 / num_actions as f64;
    Ok([phi.cos(), phi.sin()])
}

/// Lattice displacement of each action: the heading scaled by one step and
/// rounded to the nearest node. Exact for `K = 4`.
fn lattice_moves(num_actions: usize) -> Vec<(isize, isize)> {
    (0..num_actions)
        .map(|k| {
            let [dx, dy] = action_direction(k, num_actions).expect("k < K");
            (dx.round() as isize, dy.round() as isize)
        })
        .collect()
}

/// Problem data: area, step length, action count, disconnection weight and
/// the start and goal nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct GridMdp {
    area: AreaSpec,
    lattice: GridSpec,
    num_actions: usize,
    mu: f64,
    start: State,
    goal: State,
    moves: Vec<(isize, isize)>,
}

impl GridMdp {
    /// Builds the MDP, snapping `start_xy` and `goal_xy` onto the lattice.
    /// Snapping further than half a step is an error.
    pub fn new(
        area: AreaSpec,
        step_m: f64,
        num_actions: usize,
        mu: f64,
        start_xy: [f64; 2],
        goal_xy: [f64; 2],
    ) -> Result<Self> {
        area.validate()?;
        if !(step_m > 0.0 && step_m.is_finite()) {
            return Err(Error::param("step", format!("must be positive, got {step_m}")));
        }
        if num_actions < 2 {
            return Err(Error::param(
                "actions",
                format!("need at least 2 actions, got {num_actions}"),
            ));
        }
        if !(mu >= 0.0 && mu.is_finite()) {
            return Err(Error::param("mu", format!("must be non-negative, got {mu}")));
        }
        let lattice = GridSpec::covering(&area, step_m)?;
        let snap = |name: &'static str, xy: [f64; 2]| -> Result<State> {
            if !area.contains(xy[0], xy[1]) {
                return Err(Error::param(
                    name,
                    format!("({}, {}) lies outside the area", xy[0], xy[1]),
                ));
            }
            let (ix, iy) = lattice
                .nearest(xy)
                .ok_or_else(|| Error::param(name, "not near any lattice node"))?;
            let p = lattice.point(ix, iy);
            if (p[0] - xy[0]).abs() > 0.5 * step_m || (p[1] - xy[1]).abs() > 0.5 * step_m {
                return Err(Error::param(
                    name,
                    format!("({}, {}) is more than half a step from the lattice", xy[0], xy[1]),
                ));
            }
            Ok(State::new(ix, iy))
        };
        let start = snap("start", start_xy)?;
        let goal = snap("goal", goal_xy)?;
        if start == goal {
            return Err(Error::param("goal", "start and goal coincide"));
        }
        Ok(Self {
            area,
            lattice,
            num_actions,
            mu,
            start,
            goal,
            moves: lattice_moves(num_actions),
        })
    }

    pub fn area(&self) -> &AreaSpec {
        &self.area
    }

    pub fn lattice(&self) -> &GridSpec {
        &self.lattice
    }

    pub fn step_m(&self) -> f64 {
        self.lattice.spacing
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn start(&self) -> State {
        self.start
    }

    pub fn goal(&self) -> State {
        self.goal
    }

    pub fn num_states(&self) -> usize {
        self.lattice.len()
    }

    pub fn index(&self, s: State) -> usize {
        s.iy * self.lattice.nx + s.ix
    }

    pub fn state_at(&self, index: usize) -> State {
        State::new(index % self.lattice.nx, index / self.lattice.nx)
    }

    pub fn states(&self) -> impl Iterator<Item = State> + '_ {
        (0..self.num_states()).map(|n| self.state_at(n))
    }

    pub fn xy(&self, s: State) -> [f64; 2] {
        self.lattice.point(s.ix, s.iy)
    }

    pub fn is_terminal(&self, s: State) -> bool {
        s == self.goal
    }

    /// Deterministic successor; a move leaving the area keeps `s`.
    pub fn transition(&self, s: State, k: usize) -> State {
        let (dx, dy) = self.moves[k];
        let nx = s.ix as isize + dx;
        let ny = s.iy as isize + dy;
        if nx < 0 || ny < 0 || nx >= self.lattice.nx as isize || ny >= self.lattice.ny as isize {
            s
        } else {
            State::new(nx as usize, ny as usize)
        }
    }

    /// Successor of every action, in action order.
    pub fn successors(&self, s: State) -> impl Iterator<Item = State> + '_ {
        (0..self.num_actions).map(move |k| self.transition(s, k))
    }

    /// Reward for departing `s`: `-1` when connected, `-1 - mu` otherwise.
    pub fn reward<P: CoverageProbe + ?Sized>(&self, s: State, probe: &P) -> f64 {
        if probe.is_disconnected(self.xy(s)) {
            -1.0 - self.mu
        } else {
            -1.0
        }
    }

    /// Euclidean distance from `s` to the goal, in metres.
    pub fn distance_to_goal(&self, s: State) -> f64 {
        let p = self.xy(s);
        let g = self.xy(self.goal);
        (p[0] - g[0]).hypot(p[1] - g[1])
    }

    /// Manhattan distance to the goal counted in lattice steps.
    pub fn manhattan_steps_to_goal(&self, s: State) -> usize {
        s.ix.abs_diff(self.goal.ix) + s.iy.abs_diff(self.goal.iy)
    }

    /// One step: reward at `s`, then move.
    pub fn step<P: CoverageProbe + ?Sized>(&self, s: State, k: usize, probe: &P) -> StepOutcome {
        let reward = self.reward(s, probe);
        let next_state = self.transition(s, k);
        StepOutcome {
            next_state,
            reward,
            terminal: self.is_terminal(next_state),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub next_state: State,
    pub reward: f64,
    pub terminal: bool,
}

/// Undiscounted return of an episode.
pub fn episode_return(rewards: &[f64]) -> f64 {
    rewards.iter().sum()
}
