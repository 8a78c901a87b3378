//! Statistical urban building layout and line-of-sight blockage.

use rand::distributions::{Distribution, Open01};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::AreaSpec;
use crate::error::{Error, Result};

/// Parameters of the three-parameter statistical built-up area model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildingModelParams {
    /// Fraction of land covered by buildings.
    pub alpha_bd: f64,
    /// Mean number of buildings per square kilometre.
    pub beta_bd: f64,
    /// Mean building height in metres (Rayleigh distributed).
    pub sigma_bd_m: f64,
    /// Heights above this value are clipped to it.
    pub height_clip_m: f64,
    pub rng_seed: u64,
}

impl Default for BuildingModelParams {
    fn default() -> Self {
        Self {
            alpha_bd: 0.3,
            beta_bd: 300.0,
            sigma_bd_m: 50.0,
            height_clip_m: 90.0,
            rng_seed: 0,
        }
    }
}

impl BuildingModelParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha_bd > 0.0 && self.alpha_bd < 1.0) {
            return Err(Error::param(
                "alpha_bd",
                format!("must lie in (0, 1), got {}", self.alpha_bd),
            ));
        }
        if !(self.beta_bd > 0.0 && self.beta_bd.is_finite()) {
            return Err(Error::param(
                "beta_bd",
                format!("must be positive, got {}", self.beta_bd),
            ));
        }
        if !(self.sigma_bd_m > 0.0 && self.sigma_bd_m.is_finite()) {
            return Err(Error::param(
                "sigma_bd",
                format!("must be positive, got {}", self.sigma_bd_m),
            ));
        }
        if !(self.height_clip_m > 0.0 && self.height_clip_m.is_finite()) {
            return Err(Error::param(
                "clip",
                format!("must be positive, got {}", self.height_clip_m),
            ));
        }
        Ok(())
    }

    /// Side of the square building footprint, `1000 * sqrt(alpha / beta)` metres.
    pub fn building_side_m(&self) -> f64 {
        1000.0 * (self.alpha_bd / self.beta_bd).sqrt()
    }

    /// Pitch of the street grid, one building per `1000 / sqrt(beta)` metre block.
    pub fn block_pitch_m(&self) -> f64 {
        1000.0 / self.beta_bd.sqrt()
    }

    /// Rayleigh scale whose distribution mean equals `sigma_bd_m`.
    pub fn rayleigh_scale(&self) -> f64 {
        self.sigma_bd_m * (2.0 / std::f64::consts::PI).sqrt()
    }
}

/// A building: an axis-aligned box standing on the ground.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Building {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub height_m: f64,
}

impl Building {
    /// Whether a horizontal position lies on the (closed) footprint.
    pub fn footprint_contains(&self, x: f64, y: f64) -> bool {
        x >= self.x_min && x <= self.x_max && y >= self.y_min && y <= self.y_max
    }

    /// Whether a 3D point lies inside the closed building volume.
    pub fn contains(&self, p: [f64; 3]) -> bool {
        self.footprint_contains(p[0], p[1]) && p[2] >= 0.0 && p[2] <= self.height_m
    }

    /// Exact segment/box test (slab method) for the segment `a -> b`.
    pub fn blocks_segment(&self, a: [f64; 3], b: [f64; 3]) -> bool {
        let lo = [self.x_min, self.y_min, 0.0];
        let hi = [self.x_max, self.y_max, self.height_m];
        let mut t_enter = 0.0_f64;
        let mut t_exit = 1.0_f64;
        for axis in 0..3 {
            let d = b[axis] - a[axis];
            if d == 0.0 {
                if a[axis] < lo[axis] || a[axis] > hi[axis] {
                    return false;
                }
                continue;
            }
            let inv = 1.0 / d;
            let mut t0 = (lo[axis] - a[axis]) * inv;
            let mut t1 = (hi[axis] - a[axis]) * inv;
            if t0 > t1 {
                std::mem::swap(&mut t0, &mut t1);
            }
            t_enter = t_enter.max(t0);
            t_exit = t_exit.min(t1);
            if t_enter > t_exit {
                return false;
            }
        }
        true
    }
}

/// Uniform bucket grid over the area used to prune LoS tests.
#[derive(Debug, Clone)]
struct BucketIndex {
    x0: f64,
    y0: f64,
    cell: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<u32>>,
}

impl BucketIndex {
    fn build(area: &AreaSpec, cell: f64, buildings: &[Building]) -> Self {
        let nx = ((area.width() / cell).ceil() as usize).max(1);
        let ny = ((area.height() / cell).ceil() as usize).max(1);
        let mut buckets = vec![Vec::new(); nx * ny];
        let mut index = Self {
            x0: area.x_lo,
            y0: area.y_lo,
            cell,
            nx,
            ny,
            buckets: Vec::new(),
        };
        for (id, b) in buildings.iter().enumerate() {
            let (i0, j0) = index.bucket_of(b.x_min, b.y_min);
            let (i1, j1) = index.bucket_of(b.x_max, b.y_max);
            for j in j0..=j1 {
                for i in i0..=i1 {
                    buckets[j * nx + i].push(id as u32);
                }
            }
        }
        index.buckets = buckets;
        index
    }

    fn bucket_of(&self, x: f64, y: f64) -> (usize, usize) {
        let i = ((x - self.x0) / self.cell).floor().clamp(0.0, (self.nx - 1) as f64) as usize;
        let j = ((y - self.y0) / self.cell).floor().clamp(0.0, (self.ny - 1) as f64) as usize;
        (i, j)
    }

    /// Visits every bucket touched by the horizontal segment `a -> b`
    /// (grid traversal in the style of Amanatides and Woo). Stops early when
    /// `visit` returns `true`.
    fn walk(&self, a: [f64; 2], b: [f64; 2], mut visit: impl FnMut(&[u32]) -> bool) -> bool {
        let (mut i, mut j) = self.bucket_of(a[0], a[1]);
        let (i_end, j_end) = self.bucket_of(b[0], b[1]);
        let dx = b[0] - a[0];
        let dy = b[1] - a[1];
        let step_i: isize = if dx > 0.0 { 1 } else { -1 };
        let step_j: isize = if dy > 0.0 { 1 } else { -1 };
        let axis_params = |pos: f64, origin: f64, idx: usize, d: f64| -> (f64, f64) {
            if d == 0.0 {
                return (f64::INFINITY, f64::INFINITY);
            }
            let edge = if d > 0.0 {
                origin + (idx as f64 + 1.0) * self.cell
            } else {
                origin + idx as f64 * self.cell
            };
            ((edge - pos) / d, self.cell / d.abs())
        };
        let (mut t_max_x, t_delta_x) = axis_params(a[0], self.x0, i, dx);
        let (mut t_max_y, t_delta_y) = axis_params(a[1], self.y0, j, dy);
        // A segment crosses at most nx + ny buckets; the bound guards against
        // rounding at bucket corners.
        for _ in 0..(self.nx + self.ny + 2) {
            if visit(&self.buckets[j * self.nx + i]) {
                return true;
            }
            if i == i_end && j == j_end {
                break;
            }
            if t_max_x < t_max_y {
                let next = i as isize + step_i;
                if next < 0 || next >= self.nx as isize || t_max_x > 1.0 {
                    break;
                }
                i = next as usize;
                t_max_x += t_delta_x;
            } else {
                let next = j as isize + step_j;
                if next < 0 || next >= self.ny as isize || t_max_y > 1.0 {
                    break;
                }
                j = next as usize;
                t_max_y += t_delta_y;
            }
        }
        false
    }
}

/// A realisation of the urban building layout.
#[derive(Debug, Clone)]
pub struct BuildingMap {
    buildings: Vec<Building>,
    params: BuildingModelParams,
    area: AreaSpec,
    max_height: f64,
    index: BucketIndex,
}

impl BuildingMap {
    /// Wraps an explicit building list. Footprints must lie inside the area.
    pub fn from_buildings(buildings: Vec<Building>, params: BuildingModelParams, area: AreaSpec) -> Result<Self> {
        for (n, b) in buildings.iter().enumerate() {
            let valid = b.x_min < b.x_max
                && b.y_min < b.y_max
                && b.height_m > 0.0
                && b.x_min >= area.x_lo
                && b.x_max <= area.x_hi
                && b.y_min >= area.y_lo
                && b.y_max <= area.y_hi;
            if !valid {
                return Err(Error::param(
                    "buildings",
                    format!("building {n} is malformed or outside the area: {b:?}"),
                ));
            }
        }
        let max_height = buildings.iter().map(|b| b.height_m).fold(0.0, f64::max);
        let cell = params.block_pitch_m().clamp(10.0, area.width().max(area.height()));
        let index = BucketIndex::build(&area, cell, &buildings);
        Ok(Self {
            buildings,
            params,
            area,
            max_height,
            index,
        })
    }

    pub fn empty(area: AreaSpec) -> Self {
        Self::from_buildings(Vec::new(), BuildingModelParams::default(), area)
            .expect("an empty building list is always valid")
    }

    pub fn buildings(&self) -> &[Building] {
        &self.buildings
    }

    pub fn params(&self) -> &BuildingModelParams {
        &self.params
    }

    pub fn area(&self) -> &AreaSpec {
        &self.area
    }

    pub fn len(&self) -> usize {
        self.buildings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buildings.is_empty()
    }

    /// Drops every building whose footprint contains one of `points`.
    pub fn without_footprints_at(&self, points: &[[f64; 2]]) -> Self {
        let kept = self
            .buildings
            .iter()
            .copied()
            .filter(|b| !points.iter().any(|p| b.footprint_contains(p[0], p[1])))
            .collect();
        Self::from_buildings(kept, self.params, self.area).expect("subset of a valid map is valid")
    }

    /// `true` iff the straight segment between the two points crosses no
    /// building volume.
    pub fn is_los(&self, a: [f64; 3], b: [f64; 3]) -> bool {
        if self.buildings.is_empty() {
            return true;
        }
        // Only the part of the segment at or below the tallest roof can be blocked.
        let (lo, hi) = if a[2] <= b[2] { (a, b) } else { (b, a) };
        if lo[2] > self.max_height {
            return true;
        }
        let clipped_hi = if hi[2] > self.max_height {
            let t = (self.max_height - lo[2]) / (hi[2] - lo[2]);
            [
                lo[0] + t * (hi[0] - lo[0]),
                lo[1] + t * (hi[1] - lo[1]),
                self.max_height,
            ]
        } else {
            hi
        };
        let blocked = self.index.walk([lo[0], lo[1]], [clipped_hi[0], clipped_hi[1]], |ids| {
            ids.iter().any(|&id| self.buildings[id as usize].blocks_segment(a, b))
        });
        !blocked
    }

    /// Reference LoS test against every building, without the bucket index.
    pub fn is_los_exhaustive(&self, a: [f64; 3], b: [f64; 3]) -> bool {
        !self.buildings.iter().any(|bd| bd.blocks_segment(a, b))
    }
}

/// Generates one realisation of the building layout.
///
/// Buildings are square blocks of side `1000 * sqrt(alpha / beta)` centred in
/// the cells of a regular street grid of pitch `1000 / sqrt(beta)`; the grid is
/// centred in the area. Heights are Rayleigh with mean `sigma_bd_m`, clipped.
pub fn generate_buildings(params: &BuildingModelParams, area: &AreaSpec) -> Result<BuildingMap> {
    params.validate()?;
    area.validate()?;
    let pitch = params.block_pitch_m();
    let side = params.building_side_m();
    let nx = (area.width() / pitch).floor() as usize;
    let ny = (area.height() / pitch).floor() as usize;
    if nx == 0 || ny == 0 {
        return Err(Error::EmptyBuildingMap {
            width: area.width(),
            height: area.height(),
        });
    }
    let x_start = area.x_lo + 0.5 * (area.width() - nx as f64 * pitch);
    let y_start = area.y_lo + 0.5 * (area.height() - ny as f64 * pitch);
    let scale = params.rayleigh_scale();
    let mut rng = ChaCha8Rng::seed_from_u64(params.rng_seed);
    let mut buildings = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let cx = x_start + (i as f64 + 0.5) * pitch;
            let cy = y_start + (j as f64 + 0.5) * pitch;
            let u: f64 = Open01.sample(&mut rng);
            let height = (scale * (-2.0 * u.ln()).sqrt()).min(params.height_clip_m);
            buildings.push(Building {
                x_min: cx - 0.5 * side,
                x_max: cx + 0.5 * side,
                y_min: cy - 0.5 * side,
                y_max: cy + 0.5 * side,
                height_m: height,
            });
        }
    }
    BuildingMap::from_buildings(buildings, *params, *area)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn area() -> AreaSpec {
        AreaSpec::new(0.0, 0.0, 2000.0, 2000.0, 100.0).unwrap()
    }

    #[test]
    fn building_side_matches_coverage_ratio() {
        let p = BuildingModelParams::default();
        assert!((p.building_side_m() - 31.6228).abs() < 1e-3);
        let map = generate_buildings(&p, &area()).unwrap();
        let covered: f64 = map
            .buildings()
            .iter()
            .map(|b| (b.x_max - b.x_min) * (b.y_max - b.y_min))
            .sum();
        let block_area = p.block_pitch_m().powi(2) * map.len() as f64;
        assert!((covered / block_area - 0.3).abs() < 1e-9);
        // 34 x 34 blocks fit in 2 km at a pitch of 57.7 m; 1200 expected.
        assert_eq!(map.len(), 34 * 34);
    }

    #[test]
    fn heights_are_positive_and_clipped() {
        let map = generate_buildings(&BuildingModelParams::default(), &area()).unwrap();
        assert!(map.buildings().iter().all(|b| b.height_m > 0.0 && b.height_m <= 90.0));
        assert!(map.buildings().iter().any(|b| b.height_m == 90.0));
    }

    #[test]
    fn rayleigh_mean_matches_sigma_without_clip() {
        let params = BuildingModelParams {
            height_clip_m: 1e9,
            beta_bd: 3000.0,
            alpha_bd: 0.1,
            ..BuildingModelParams::default()
        };
        let big = AreaSpec::new(0.0, 0.0, 4000.0, 4000.0, 100.0).unwrap();
        let map = generate_buildings(&params, &big).unwrap();
        let mean = map.buildings().iter().map(|b| b.height_m).sum::<f64>() / map.len() as f64;
        assert!((mean - 50.0).abs() < 1.0, "mean height {mean}");
    }

    #[test]
    fn same_seed_same_map() {
        let p = BuildingModelParams {
            rng_seed: 42,
            ..Default::default()
        };
        let a = generate_buildings(&p, &area()).unwrap();
        let b = generate_buildings(&p, &area()).unwrap();
        assert_eq!(a.buildings(), b.buildings());
        let c = generate_buildings(&BuildingModelParams { rng_seed: 43, ..p }, &area()).unwrap();
        assert_ne!(a.buildings(), c.buildings());
    }

    #[test]
    fn too_small_area_is_an_error() {
        let tiny = AreaSpec::new(0.0, 0.0, 40.0, 40.0, 100.0).unwrap();
        let err = generate_buildings(&BuildingModelParams::default(), &tiny).unwrap_err();
        assert!(matches!(err, Error::EmptyBuildingMap { .. }));
    }

    #[test]
    fn footprints_do_not_overlap() {
        let map = generate_buildings(&BuildingModelParams::default(), &area()).unwrap();
        let bs = map.buildings();
        for (n, a) in bs.iter().enumerate() {
            for b in &bs[n + 1..] {
                let overlap = a.x_min < b.x_max && b.x_min < a.x_max && a.y_min < b.y_max && b.y_min < a.y_max;
                assert!(!overlap);
            }
        }
    }

    #[test]
    fn slab_test_basic_cases() {
        let b = Building {
            x_min: 10.0,
            x_max: 20.0,
            y_min: 10.0,
            y_max: 20.0,
            height_m: 30.0,
        };
        // Straight through.
        assert!(b.blocks_segment([0.0, 15.0, 10.0], [30.0, 15.0, 10.0]));
        // Over the roof.
        assert!(!b.blocks_segment([0.0, 15.0, 40.0], [30.0, 15.0, 35.0]));
        // Passing beside.
        assert!(!b.blocks_segment([0.0, 25.0, 10.0], [30.0, 25.0, 10.0]));
        // Stops short.
        assert!(!b.blocks_segment([0.0, 15.0, 10.0], [9.0, 15.0, 10.0]));
        // Rising segment that clears the roof before reaching it.
        assert!(!b.blocks_segment([0.0, 15.0, 25.0], [20.0, 15.0, 45.0]));
        // Rising segment that clips the roof edge region.
        assert!(b.blocks_segment([0.0, 15.0, 15.0], [30.0, 15.0, 45.0]));
    }

    #[test]
    fn empty_map_is_always_los() {
        let map = BuildingMap::empty(area());
        assert!(map.is_los([0.0, 0.0, 0.0], [2000.0, 2000.0, 100.0]));
    }

    #[test]
    fn indexed_los_matches_exhaustive() {
        use rand::Rng;
        let map = generate_buildings(
            &BuildingModelParams {
                rng_seed: 9,
                ..Default::default()
            },
            &area(),
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..3000 {
            let a = [rng.gen_range(0.0..2000.0), rng.gen_range(0.0..2000.0), 25.0];
            let b = [rng.gen_range(0.0..2000.0), rng.gen_range(0.0..2000.0), 100.0];
            assert_eq!(map.is_los(a, b), map.is_los_exhaustive(a, b), "{a:?} -> {b:?}");
            assert_eq!(map.is_los(b, a), map.is_los_exhaustive(b, a));
        }
    }

    #[test]
    fn site_clearing_removes_only_covering_buildings() {
        let map = generate_buildings(&BuildingModelParams::default(), &area()).unwrap();
        let b0 = map.buildings()[0];
        let cleared = map.without_footprints_at(&[[0.5 * (b0.x_min + b0.x_max), 0.5 * (b0.y_min + b0.y_max)]]);
        assert_eq!(cleared.len(), map.len() - 1);
    }
}
