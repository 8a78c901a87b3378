//! Deterministic urban radio environment seen by a UAV at fixed altitude.

mod antenna;
mod buildings;
mod coverage;
mod pathloss;
mod probe;
mod sites;

pub use antenna::{angles_to, antenna_gain_db, AntennaConfig};
pub use buildings::{generate_buildings, Building, BuildingMap, BuildingModelParams};
pub use coverage::{build_coverage_field, CoverageField, GridSpec};
pub use pathloss::{path_loss_db, MAX_AERIAL_HEIGHT_M, MIN_AERIAL_HEIGHT_M};
pub use probe::{CachedProbe, CountingProbe, CoverageProbe};
pub use sites::{place_sites, Cell, CellGrid, SECTOR_AZIMUTHS_DEG};

use crate::error::{Error, Result};

/// Flight rectangle and the UAV's constant altitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AreaSpec {
    pub x_lo: f64,
    pub y_lo: f64,
    pub x_hi: f64,
    pub y_hi: f64,
    pub uav_altitude_m: f64,
}

impl AreaSpec {
    pub fn new(x_lo: f64, y_lo: f64, x_hi: f64, y_hi: f64, uav_altitude_m: f64) -> Result<Self> {
        let area = Self {
            x_lo,
            y_lo,
            x_hi,
            y_hi,
            uav_altitude_m,
        };
        area.validate()?;
        Ok(area)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.x_lo, self.y_lo, self.x_hi, self.y_hi, self.uav_altitude_m]
            .iter()
            .all(|v| v.is_finite());
        if !finite || self.x_lo >= self.x_hi || self.y_lo >= self.y_hi {
            return Err(Error::param(
                "area",
                format!("need x_lo < x_hi and y_lo < y_hi, got {self:?}"),
            ));
        }
        if self.uav_altitude_m <= 0.0 {
            return Err(Error::param(
                "altitude",
                format!("must be positive, got {}", self.uav_altitude_m),
            ));
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        self.x_hi - self.x_lo
    }

    pub fn height(&self) -> f64 {
        self.y_hi - self.y_lo
    }

    pub fn center(&self) -> [f64; 2] {
        [0.5 * (self.x_lo + self.x_hi), 0.5 * (self.y_lo + self.y_hi)]
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x_lo && x <= self.x_hi && y >= self.y_lo && y <= self.y_hi
    }
}

pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

pub fn mw_to_dbm(mw: f64) -> f64 {
    10.0 * mw.log10()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MetricKind {
    /// Strongest received power, dBm.
    MaxPower,
    /// Strongest cell over the sum of all others, dB.
    Sir,
}

/// Connectivity metric and its threshold (dBm for `MaxPower`, dB for `Sir`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualityMetric {
    pub kind: MetricKind,
    pub threshold: f64,
}

impl QualityMetric {
    pub fn sir(threshold_db: f64) -> Self {
        Self {
            kind: MetricKind::Sir,
            threshold: threshold_db,
        }
    }

    pub fn max_power(threshold_dbm: f64) -> Self {
        Self {
            kind: MetricKind::MaxPower,
            threshold: threshold_dbm,
        }
    }

    /// Strict comparison: a quality equal to the threshold is connected.
    pub fn is_disconnected(&self, quality: f64) -> bool {
        quality < self.threshold
    }
}

/// Signal quality from per-cell received powers. A single cell has infinite SIR.
pub fn signal_quality_db(powers_dbm: &[f64], kind: MetricKind) -> Result<f64> {
    if powers_dbm.is_empty() {
        return Err(Error::NoPowers);
    }
    let (best, strongest) =
        powers_dbm.iter().enumerate().fold(
            (0, f64::NEG_INFINITY),
            |acc, (m, &p)| if p > acc.1 { (m, p) } else { acc },
        );
    Ok(match kind {
        MetricKind::MaxPower => strongest,
        MetricKind::Sir => {
            let interference: f64 = powers_dbm
                .iter()
                .enumerate()
                .filter(|&(m, _)| m != best)
                .map(|(_, &p)| dbm_to_mw(p))
                .sum();
            if interference == 0.0 {
                f64::INFINITY
            } else {
                mw_to_dbm(dbm_to_mw(strongest) / interference)
            }
        }
    })
}

/// Average received power from one cell at a horizontal UAV position.
///
/// Deterministic large-scale term: transmit power plus antenna gain minus
/// LoS/NLoS path loss, the LoS state decided by building blockage.
pub fn rx_power_dbm(
    cell: &Cell,
    cfg: &AntennaConfig,
    map: &BuildingMap,
    uav_xy: [f64; 2],
    altitude_m: f64,
) -> Result<f64> {
    let bs = [cell.site_xy[0], cell.site_xy[1], cell.antenna_height_m];
    let uav = [uav_xy[0], uav_xy[1], altitude_m];
    let d3d = ((uav[0] - bs[0]).powi(2) + (uav[1] - bs[1]).powi(2) + (uav[2] - bs[2]).powi(2)).sqrt();
    let los = map.is_los(bs, uav);
    let loss = path_loss_db(d3d, altitude_m, cell.carrier_ghz, los)?;
    Ok(cell.tx_power_dbm + antenna_gain_db(cell, cfg, uav) - loss)
}

/// Everything needed to generate a [`RadioEnv`].
#[derive(Debug, Clone, PartialEq)]
pub struct EnvConfig {
    pub area: AreaSpec,
    pub buildings: BuildingModelParams,
    pub inter_site_distance_m: f64,
    pub antenna_height_m: f64,
    pub tx_power_dbm: f64,
    pub carrier_ghz: f64,
    pub antenna: AntennaConfig,
    pub metric: QualityMetric,
}

impl Default for EnvConfig {
    fn default() -> Self {
        Self {
            area: AreaSpec {
                x_lo: 0.0,
                y_lo: 0.0,
                x_hi: 2000.0,
                y_hi: 2000.0,
                uav_altitude_m: 100.0,
            },
            buildings: BuildingModelParams::default(),
            inter_site_distance_m: 800.0,
            antenna_height_m: 25.0,
            tx_power_dbm: 20.0,
            carrier_ghz: 2.0,
            antenna: AntennaConfig::default(),
            metric: QualityMetric::sir(0.0),
        }
    }
}

/// Immutable radio environment: buildings, cells and the connectivity metric.
#[derive(Debug, Clone)]
pub struct RadioEnv {
    area: AreaSpec,
    buildings: BuildingMap,
    cells: CellGrid,
    metric: QualityMetric,
}

impl RadioEnv {
    /// Generates buildings and sites. Buildings standing on a site's lot are
    /// removed so every base-station antenna is outdoors.
    pub fn generate(cfg: &EnvConfig) -> Result<Self> {
        let map = generate_buildings(&cfg.buildings, &cfg.area)?;
        let cells = place_sites(
            &cfg.area,
            cfg.inter_site_distance_m,
            cfg.antenna_height_m,
            cfg.tx_power_dbm,
            cfg.carrier_ghz,
            cfg.antenna,
        )?;
        let map = map.without_footprints_at(&cells.sites());
        Self::new(cfg.area, map, cells, cfg.metric)
    }

    pub fn new(area: AreaSpec, buildings: BuildingMap, cells: CellGrid, metric: QualityMetric) -> Result<Self> {
        area.validate()?;
        if cells.is_empty() {
            return Err(Error::param("cells", "at least one cell is required"));
        }
        let h = area.uav_altitude_m;
        if !(h > MIN_AERIAL_HEIGHT_M && h <= MAX_AERIAL_HEIGHT_M) {
            return Err(Error::AltitudeOutOfRange(h));
        }
        for c in &cells.cells {
            let bs = [c.site_xy[0], c.site_xy[1], c.antenna_height_m];
            if buildings.buildings().iter().any(|b| b.contains(bs)) {
                return Err(Error::param(
                    "cells",
                    format!("antenna at {:?} is inside a building", c.site_xy),
                ));
            }
        }
        Ok(Self {
            area,
            buildings,
            cells,
            metric,
        })
    }

    pub fn area(&self) -> &AreaSpec {
        &self.area
    }

    pub fn buildings(&self) -> &BuildingMap {
        &self.buildings
    }

    pub fn cells(&self) -> &CellGrid {
        &self.cells
    }

    pub fn metric(&self) -> &QualityMetric {
        &self.metric
    }

    /// Received power from every cell, in cell order.
    pub fn powers_dbm(&self, uav_xy: [f64; 2]) -> Vec<f64> {
        self.cells
            .cells
            .iter()
            .map(|c| {
                rx_power_dbm(
                    c,
                    &self.cells.antenna,
                    &self.buildings,
                    uav_xy,
                    self.area.uav_altitude_m,
                )
                .expect("altitude validated at construction")
            })
            .collect()
    }

    pub fn quality_db(&self, uav_xy: [f64; 2]) -> f64 {
        signal_quality_db(&self.powers_dbm(uav_xy), self.metric.kind).expect("at least one cell")
    }

    /// 1 when disconnected (quality strictly below threshold), else 0.
    pub fn coverage_indicator(&self, uav_xy: [f64; 2]) -> u8 {
        u8::from(self.metric.is_disconnected(self.quality_db(uav_xy)))
    }
}

impl CoverageProbe for RadioEnv {
    fn is_disconnected(&self, xy: [f64; 2]) -> bool {
        self.coverage_indicator(xy) == 1
    }
}
