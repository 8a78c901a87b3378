//! Tile coding and linear semi-gradient TD(0).
//!
//! `N1` tilings of `X0 x Y0` tiles cover the flight area; tiling `t` is shifted
//! by `(-t X0 / N1, -t Y0 / N1)`. A position activates exactly one tile per
//! tiling, giving a binary feature vector with `N1` ones, and the value
//! estimate is the sum of the weights of the active tiles.

use crate::dp::StateValue;
use crate::error::{Error, Result};
use crate::mdp::{GridMdp, State};
use crate::radio::{AreaSpec, CoverageProbe};
use crate::td::{run_td, TdConfig, TdLearner, TrainStats};

/// Ridge damping used by [`lsq_init`].
pub const LSQ_RIDGE: f64 = 1e-6;

/// Tiles per tiling along one axis of length `extent`:
/// `ceil(extent / tile - 1 / n_tilings) + 1`, raised by one when the closed
/// far edge of the area would otherwise fall just outside the last tile of
/// the unshifted tiling.
pub fn tiles_along(extent: f64, tile: f64, n_tilings: usize) -> usize {
    let n = n_tilings as f64;
    let open = (extent / tile - 1.0 / n).ceil() as usize + 1;
    let closed = ((extent + (n - 1.0) * tile / n) / tile + 1e-9).floor() as usize + 1;
    open.max(closed)
}

/// `(L_X, L_Y, N2)` for an area of `width x height`.
pub fn tiling_dims(width: f64, height: f64, tile_w: f64, tile_h: f64, n_tilings: usize) -> (usize, usize, usize) {
    let lx = tiles_along(width, tile_w, n_tilings);
    let ly = tiles_along(height, tile_h, n_tilings);
    (lx, ly, lx * ly)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TilingSpec {
    pub area: AreaSpec,
    pub n_tilings: usize,
    pub tile_w: f64,
    pub tile_h: f64,
    lx: usize,
    ly: usize,
}

/// Active feature indices, one per tiling, strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseFeatures(pub Vec<usize>);

impl SparseFeatures {
    pub fn indices(&self) -> &[usize] {
        &self.0
    }
}

impl TilingSpec {
    pub fn new(area: AreaSpec, n_tilings: usize, tile_w: f64, tile_h: f64) -> Result<Self> {
        area.validate()?;
        if n_tilings == 0 {
            return Err(Error::param("tilings", "need at least one tiling"));
        }
        if !(tile_w > 0.0 && tile_h > 0.0 && tile_w.is_finite() && tile_h.is_finite()) {
            return Err(Error::param(
                "tile_size",
                format!("must be positive, got {tile_w} x {tile_h}"),
            ));
        }
        let (lx, ly, _) = tiling_dims(area.width(), area.height(), tile_w, tile_h, n_tilings);
        Ok(Self {
            area,
            n_tilings,
            tile_w,
            tile_h,
            lx,
            ly,
        })
    }

    pub fn offsets(&self) -> (f64, f64) {
        (self.tile_w / self.n_tilings as f64, self.tile_h / self.n_tilings as f64)
    }

    pub fn tiles_x(&self) -> usize {
        self.lx
    }

    pub fn tiles_y(&self) -> usize {
        self.ly
    }

    pub fn tiles_per_tiling(&self) -> usize {
        self.lx * self.ly
    }

    pub fn num_features(&self) -> usize {
        self.n_tilings * self.tiles_per_tiling()
    }

    /// Active tile `(col, row)` of tiling `t` for a position inside the area.
    pub fn tile_of(&self, xy: [f64; 2], t: usize) -> (usize, usize) {
        let (dx, dy) = self.offsets();
        // Lattice points sitting exactly on a tile edge go to the upper tile.
        let u = (xy[0] - self.area.x_lo + t as f64 * dx) / self.tile_w + 1e-9;
        let v = (xy[1] - self.area.y_lo + t as f64 * dy) / self.tile_h + 1e-9;
        let col = (u.floor() as usize).min(self.lx - 1);
        let row = (v.floor() as usize).min(self.ly - 1);
        (col, row)
    }

    pub fn encode(&self, xy: [f64; 2]) -> Result<SparseFeatures> {
        if !self.area.contains(xy[0], xy[1]) {
            return Err(Error::OutsideArea { x: xy[0], y: xy[1] });
        }
        let per = self.tiles_per_tiling();
        Ok(SparseFeatures(
            (0..self.n_tilings)
                .map(|t| {
                    let (col, row) = self.tile_of(xy, t);
                    t * per + row * self.lx + col
                })
                .collect(),
        ))
    }
}

/// `x(s)^T theta`.
pub fn v_hat(features: &SparseFeatures, theta: &[f64]) -> f64 {
    features.0.iter().fold(0.0, |acc, &i| acc + theta[i])
}

/// `theta <- theta + alpha_tilde (R + v_next - x(s)^T theta) x(s)`, with
/// `v_next` the (already goal-overridden) value of the successor.
pub fn semi_gradient_update(theta: &mut [f64], x_s: &SparseFeatures, reward: f64, v_next: f64, alpha_tilde: f64) {
    let v = v_hat(x_s, theta);
    let step = alpha_tilde * (reward + v_next - v);
    for &i in &x_s.0 {
        theta[i] += step;
    }
}

/// Least-squares fit of `v_hat(s) ~ -||s - goal||` over `samples`, with ridge
/// damping so the rank-deficient tile basis gives a unique answer.
///
/// Solves `(X X^T + lambda I) theta = -X d` by conjugate gradients.
pub fn lsq_init(spec: &TilingSpec, samples: &[[f64; 2]], goal_xy: [f64; 2]) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::DegenerateSampleSet);
    }
    let n1 = spec.n_tilings;
    let mut active = Vec::with_capacity(samples.len() * n1);
    let mut targets = Vec::with_capacity(samples.len());
    for &xy in samples {
        active.extend(spec.encode(xy)?.0);
        targets.push(-(xy[0] - goal_xy[0]).hypot(xy[1] - goal_xy[1]));
    }
    let dim = spec.num_features();
    let apply = |v: &[f64], out: &mut [f64]| {
        for (o, &x) in out.iter_mut().zip(v) {
            *o = LSQ_RIDGE * x;
        }
        for feats in active.chunks_exact(n1) {
            let dot: f64 = feats.iter().map(|&i| v[i]).sum();
            for &i in feats {
                out[i] += dot;
            }
        }
    };
    let mut b = vec![0.0; dim];
    for (feats, &y) in active.chunks_exact(n1).zip(&targets) {
        for &i in feats {
            b[i] += y;
        }
    }
    let b_norm = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut theta = vec![0.0; dim];
    if b_norm == 0.0 {
        return Ok(theta);
    }
    let mut r = b.clone();
    let mut p = r.clone();
    let mut ap = vec![0.0; dim];
    let mut rr: f64 = r.iter().map(|x| x * x).sum();
    for _ in 0..(10 * dim).max(100) {
        apply(&p, &mut ap);
        let step = rr / p.iter().zip(&ap).map(|(a, b)| a * b).sum::<f64>();
        for i in 0..dim {
            theta[i] += step * p[i];
            r[i] -= step * ap[i];
        }
        let rr_next: f64 = r.iter().map(|x| x * x).sum();
        if rr_next.sqrt() <= 1e-12 * b_norm {
            break;
        }
        let beta = rr_next / rr;
        for i in 0..dim {
            p[i] = r[i] + beta * p[i];
        }
        rr = rr_next;
    }
    Ok(theta)
}

/// Tile-coded value estimate over the lattice of one MDP; the goal's value is
/// pinned to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct TileValue {
    spec: TilingSpec,
    goal: State,
    nx: usize,
    /// Active indices of every lattice state, `n_tilings` per state.
    lattice_features: Vec<u32>,
    pub theta: Vec<f64>,
}

impl TileValue {
    pub fn new(spec: TilingSpec, mdp: &GridMdp, theta: Vec<f64>) -> Result<Self> {
        if theta.len() != spec.num_features() {
            return Err(Error::param(
                "theta",
                format!("expected {} weights, got {}", spec.num_features(), theta.len()),
            ));
        }
        let mut lattice_features = Vec::with_capacity(mdp.num_states() * spec.n_tilings);
        for s in mdp.states() {
            lattice_features.extend(spec.encode(mdp.xy(s))?.0.into_iter().map(|i| i as u32));
        }
        Ok(Self {
            spec,
            goal: mdp.goal(),
            nx: mdp.lattice().nx,
            lattice_features,
            theta,
        })
    }

    pub fn spec(&self) -> &TilingSpec {
        &self.spec
    }

    fn active(&self, s: State) -> &[u32] {
        let n1 = self.spec.n_tilings;
        let at = (s.iy * self.nx + s.ix) * n1;
        &self.lattice_features[at..at + n1]
    }

    pub fn features(&self, s: State) -> SparseFeatures {
        SparseFeatures(self.active(s).iter().map(|&i| i as usize).collect())
    }

    /// Value at a lattice state: zero at the goal, `x(s)^T theta` elsewhere.
    pub fn get(&self, s: State) -> f64 {
        if s == self.goal {
            0.0
        } else {
            self.active(s).iter().fold(0.0, |acc, &i| acc + self.theta[i as usize])
        }
    }
}

impl StateValue for TileValue {
    fn value(&self, _mdp: &GridMdp, s: State) -> f64 {
        self.get(s)
    }
}

impl TdLearner for TileValue {
    fn td_step(&mut self, _mdp: &GridMdp, s: State, reward: f64, s_next: State, alpha: f64) {
        let alpha_tilde = alpha / self.spec.n_tilings as f64;
        let step = alpha_tilde * (reward + self.get(s_next) - self.get(s));
        let n1 = self.spec.n_tilings;
        let at = (s.iy * self.nx + s.ix) * n1;
        for k in at..at + n1 {
            self.theta[self.lattice_features[k] as usize] += step;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TileInit {
    /// Least-squares fit of minus the distance to the goal over every lattice state.
    LeastSquares,
    Theta(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TileOptions {
    pub init: TileInit,
    /// Greedy choices never return to the previous state.
    pub cycle_exclusion: bool,
}

impl Default for TileOptions {
    fn default() -> Self {
        Self {
            init: TileInit::LeastSquares,
            cycle_exclusion: true,
        }
    }
}

/// Semi-gradient TD(0) with tile coding, learning rate `alpha / N1` per weight.
pub fn train_tile<P: CoverageProbe + ?Sized>(
    mdp: &GridMdp,
    probe: &P,
    cfg: &TdConfig,
    spec: TilingSpec,
    options: &TileOptions,
) -> Result<(TileValue, TrainStats)> {
    let theta = match &options.init {
        TileInit::LeastSquares => {
            let samples: Vec<[f64; 2]> = mdp.states().map(|s| mdp.xy(s)).collect();
            lsq_init(&spec, &samples, mdp.xy(mdp.goal()))?
        }
        TileInit::Theta(theta) => theta.clone(),
    };
    let mut value = TileValue::new(spec, mdp, theta)?;
    let stats = run_td(&mut value, mdp, probe, cfg, options.cycle_exclusion, |_, _, _, _| {})?;
    Ok((value, stats))
}
