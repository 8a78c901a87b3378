//! Global coverage map over a regular grid; model-based consumers only.

use super::{AreaSpec, CoverageProbe, RadioEnv};
use crate::error::{Error, Result};

/// Regular grid of sample points; node `(i, j)` sits at
/// `origin + (i * spacing, j * spacing)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub origin: [f64; 2],
    pub spacing: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    /// Grid covering the area, both boundaries included.
    pub fn covering(area: &AreaSpec, spacing: f64) -> Result<Self> {
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::param("spacing", format!("must be positive, got {spacing}")));
        }
        let nx = (area.width() / spacing + 1e-9).floor() as usize + 1;
        let ny = (area.height() / spacing + 1e-9).floor() as usize + 1;
        Ok(Self {
            origin: [area.x_lo, area.y_lo],
            spacing,
            nx,
            ny,
        })
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, i: usize, j: usize) -> [f64; 2] {
        [
            self.origin[0] + i as f64 * self.spacing,
            self.origin[1] + j as f64 * self.spacing,
        ]
    }

    /// Nearest node to a position, if it lies within half a spacing of one.
    pub fn nearest(&self, xy: [f64; 2]) -> Option<(usize, usize)> {
        let fi = ((xy[0] - self.origin[0]) / self.spacing).round();
        let fj = ((xy[1] - self.origin[1]) / self.spacing).round();
        if fi < 0.0 || fj < 0.0 || fi >= self.nx as f64 || fj >= self.ny as f64 {
            return None;
        }
        Some((fi as usize, fj as usize))
    }
}

/// Per-node signal quality and disconnection indicator, row-major with row
/// `j` holding the nodes at `y = origin_y + j * spacing`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageField {
    pub grid: GridSpec,
    pub threshold: f64,
    quality: Vec<f64>,
    indicator: Vec<u8>,
}

impl CoverageField {
    pub fn from_quality(grid: GridSpec, threshold: f64, quality: Vec<f64>) -> Self {
        assert_eq!(quality.len(), grid.len(), "one quality value per grid node");
        let indicator = quality.iter().map(|&q| u8::from(q < threshold)).collect();
        Self {
            grid,
            threshold,
            quality,
            indicator,
        }
    }

    pub fn quality(&self, i: usize, j: usize) -> f64 {
        self.quality[j * self.grid.nx + i]
    }

    /// 1 when node `(i, j)` is disconnected.
    pub fn indicator(&self, i: usize, j: usize) -> u8 {
        self.indicator[j * self.grid.nx + i]
    }

    pub fn indicators(&self) -> &[u8] {
        &self.indicator
    }

    pub fn qualities(&self) -> &[f64] {
        &self.quality
    }

    pub fn disconnected_fraction(&self) -> f64 {
        self.indicator.iter().map(|&v| v as f64).sum::<f64>() / self.indicator.len() as f64
    }
}

impl CoverageProbe for CoverageField {
    /// Looks up the nearest node; positions off the grid count as disconnected.
    fn is_disconnected(&self, xy: [f64; 2]) -> bool {
        match self.grid.nearest(xy) {
            Some((i, j)) => self.indicator(i, j) == 1,
            None => true,
        }
    }
}

/// Evaluates signal quality at every grid node.
pub fn build_coverage_field(env: &RadioEnv, grid: GridSpec) -> CoverageField {
    let threshold = env.metric().threshold;
    let nx = grid.nx;
    let rows: Vec<Vec<f64>> = std::thread::scope(|scope| {
        let workers = std::thread::available_parallelism()
            .map_or(1, |n| n.get())
            .min(grid.ny)
            .max(1);
        let chunk = grid.ny.div_ceil(workers);
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                scope.spawn(move || {
                    let j_end = ((w + 1) * chunk).min(grid.ny);
                    (w * chunk..j_end)
                        .map(|j| (0..nx).map(|i| env.quality_db(grid.point(i, j))).collect::<Vec<_>>())
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("coverage worker panicked"))
            .collect()
    });
    CoverageField::from_quality(grid, threshold, rows.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radio::EnvConfig;

    #[test]
    fn grid_counts_include_both_edges() {
        let area = AreaSpec::new(0.0, 0.0, 2000.0, 2000.0, 100.0).unwrap();
        let g = GridSpec::covering(&area, 10.0).unwrap();
        assert_eq!((g.nx, g.ny), (201, 201));
        assert_eq!(g.point(200, 200), [2000.0, 2000.0]);
        assert_eq!(g.nearest([1400.0, 1600.0]), Some((140, 160)));
        assert_eq!(g.nearest([-10.0, 0.0]), None);
        assert!(GridSpec::covering(&area, 0.0).is_err());
    }

    #[test]
    fn indicator_matches_threshold_and_point_queries() {
        let cfg = EnvConfig {
            area: AreaSpec::new(0.0, 0.0, 2000.0, 2000.0, 100.0).unwrap(),
            ..EnvConfig::default()
        };
        let env = RadioEnv::generate(&cfg).unwrap();
        let grid = GridSpec::covering(env.area(), 100.0).unwrap();
        let field = build_coverage_field(&env, grid);
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let q = field.quality(i, j);
                assert_eq!(field.indicator(i, j) == 1, q < field.threshold);
                assert_eq!(field.indicator(i, j), env.coverage_indicator(grid.point(i, j)));
                assert_eq!(q.to_bits(), env.quality_db(grid.point(i, j)).to_bits());
            }
        }
        assert_eq!(field, build_coverage_field(&env, grid));
    }
}
