#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use skypath::mdp::GridMdp;
use skypath::radio::{AreaSpec, CoverageProbe};

/// Square lattice of `n x n` nodes at spacing `step` with a set of holes.
pub struct HoleMap {
    pub n: usize,
    pub step: f64,
    pub holes: Vec<bool>,
}

impl HoleMap {
    pub fn random(n: usize, step: f64, density: f64, rng: &mut impl Rng) -> Self {
        let holes = (0..n * n).map(|_| rng.gen_bool(density)).collect();
        Self { n, step, holes }
    }

    pub fn is_hole(&self, i: usize, j: usize) -> bool {
        self.holes[j * self.n + i]
    }

    pub fn area(&self) -> AreaSpec {
        let side = (self.n - 1) as f64 * self.step;
        AreaSpec::new(0.0, 0.0, side, side, 100.0).unwrap()
    }
}

impl CoverageProbe for HoleMap {
    fn is_disconnected(&self, xy: [f64; 2]) -> bool {
        let i = (xy[0] / self.step).round() as usize;
        let j = (xy[1] / self.step).round() as usize;
        self.is_hole(i, j)
    }
}

/// Random lattice problem with distinct start and goal.
pub fn random_instance(
    n: usize,
    density: f64,
    mu: f64,
    seed: u64,
) -> (HoleMap, GridMdp, (usize, usize), (usize, usize)) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let map = HoleMap::random(n, 10.0, density, &mut rng);
    let start = (rng.gen_range(0..n), rng.gen_range(0..n));
    let mut goal = start;
    while goal == start {
        goal = (rng.gen_range(0..n), rng.gen_range(0..n));
    }
    let xy = |p: (usize, usize)| [p.0 as f64 * 10.0, p.1 as f64 * 10.0];
    let mdp = GridMdp::new(map.area(), 10.0, 4, mu, xy(start), xy(goal)).unwrap();
    (map, mdp, start, goal)
}

/// Smallest total cost (1 per step, `1 + mu` for leaving a hole) over every
/// path of at most `max_len` moves from `start` to `goal`. Moves are the
/// four compass steps; a move off the lattice stays put.
///
/// Exhaustive depth-first enumeration, pruned only by exact arguments: a
/// Manhattan lower bound against the incumbent, and dropping a partial path
/// when the same node was already reached no later and no dearer.
pub fn brute_force_cost(
    map: &HoleMap,
    mu: i64,
    start: (usize, usize),
    goal: (usize, usize),
    max_len: usize,
) -> Option<i64> {
    struct Search<'a> {
        map: &'a HoleMap,
        mu: i64,
        goal: (usize, usize),
        max_len: usize,
        best: i64,
        reached: Vec<Vec<i64>>,
    }
    impl Search<'_> {
        fn go(&mut self, p: (usize, usize), depth: usize, cost: i64) {
            if p == self.goal {
                self.best = self.best.min(cost);
                return;
            }
            let manhattan = (p.0.abs_diff(self.goal.0) + p.1.abs_diff(self.goal.1)) as i64;
            if depth as i64 + manhattan > self.max_len as i64 || cost + manhattan >= self.best {
                return;
            }
            let node = p.1 * self.map.n + p.0;
            if self.reached[node][..=depth].iter().any(|&c| c <= cost) {
                return;
            }
            self.reached[node][depth] = cost;
            let leave = 1 + if self.map.is_hole(p.0, p.1) { self.mu } else { 0 };
            let n = self.map.n as isize;
            for (dx, dy) in [(1isize, 0isize), (0, 1), (-1, 0), (0, -1)] {
                let (x, y) = (p.0 as isize + dx, p.1 as isize + dy);
                let next = if x < 0 || y < 0 || x >= n || y >= n {
                    p
                } else {
                    (x as usize, y as usize)
                };
                self.go(next, depth + 1, cost + leave);
            }
        }
    }
    let mut search = Search {
        map,
        mu,
        goal,
        max_len,
        best: i64::MAX,
        reached: vec![vec![i64::MAX; max_len + 1]; map.n * map.n],
    };
    search.go(start, 0, 0);
    (search.best != i64::MAX).then_some(search.best)
}
