//! Hexagonal macro-site layout with three sectors per site.

use super::{AntennaConfig, AreaSpec};
use crate::error::{Error, Result};

/// One sector (cell) of a macro site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub site_xy: [f64; 2],
    pub antenna_height_m: f64,
    /// Boresight azimuth, counter-clockwise from the +x axis, in [0, 360).
    pub sector_azimuth_deg: f64,
    pub tx_power_dbm: f64,
    pub carrier_ghz: f64,
}

/// All cells in a fixed order; index `m` is stable.
#[derive(Debug, Clone, PartialEq)]
pub struct CellGrid {
    pub cells: Vec<Cell>,
    pub antenna: AntennaConfig,
}

impl CellGrid {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Distinct site positions in cell order.
    pub fn sites(&self) -> Vec<[f64; 2]> {
        let mut out: Vec<[f64; 2]> = Vec::new();
        for c in &self.cells {
            if !out.contains(&c.site_xy) {
                out.push(c.site_xy);
            }
        }
        out
    }
}

pub const SECTOR_AZIMUTHS_DEG: [f64; 3] = [0.0, 120.0, 240.0];

/// Seven sites (centre plus a ring of six at the inter-site distance), three
/// sectors each: 21 cells.
pub fn place_sites(
    area: &AreaSpec,
    inter_site_distance_m: f64,
    antenna_height_m: f64,
    tx_power_dbm: f64,
    carrier_ghz: f64,
    antenna: AntennaConfig,
) -> Result<CellGrid> {
    if !(inter_site_distance_m > 0.0 && inter_site_distance_m.is_finite()) {
        return Err(Error::param(
            "isd",
            format!("must be positive, got {inter_site_distance_m}"),
        ));
    }
    if !(antenna_height_m > 0.0) {
        return Err(Error::param(
            "antenna_height",
            format!("must be positive, got {antenna_height_m}"),
        ));
    }
    if !tx_power_dbm.is_finite() {
        return Err(Error::param("tx_dbm", "must be finite"));
    }
    antenna.validate()?;
    let [cx, cy] = area.center();
    let mut sites = vec![[cx, cy]];
    for k in 0..6 {
        let phi = (60.0 * k as f64).to_radians();
        sites.push([
            cx + inter_site_distance_m * phi.cos(),
            cy + inter_site_distance_m * phi.sin(),
        ]);
    }
    for (n, s) in sites.iter().enumerate() {
        if !area.contains(s[0], s[1]) {
            return Err(Error::SiteOutsideArea {
                site: n,
                x: s[0],
                y: s[1],
            });
        }
    }
    let cells = sites
        .iter()
        .flat_map(|&site_xy| {
            SECTOR_AZIMUTHS_DEG.iter().map(move |&az| Cell {
                site_xy,
                antenna_height_m,
                sector_azimuth_deg: az,
                tx_power_dbm,
                carrier_ghz,
            })
        })
        .collect();
    Ok(CellGrid { cells, antenna })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn area() -> AreaSpec {
        AreaSpec::new(0.0, 0.0, 2000.0, 2000.0, 100.0).unwrap()
    }

    #[test]
    fn seven_sites_twenty_one_cells() {
        let grid = place_sites(&area(), 800.0, 25.0, 20.0, 2.0, AntennaConfig::default()).unwrap();
        assert_eq!(grid.len(), 21);
        assert_eq!(grid.sites().len(), 7);
        assert!(grid.cells.iter().all(|c| c.antenna_height_m == 25.0));
        assert_eq!(grid.cells[0].site_xy, [1000.0, 1000.0]);
        for s in &grid.sites()[1..] {
            let d = (s[0] - 1000.0).hypot(s[1] - 1000.0);
            assert!((d - 800.0).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_isd_is_rejected() {
        assert!(place_sites(&area(), 0.0, 25.0, 20.0, 2.0, AntennaConfig::default()).is_err());
    }

    #[test]
    fn ring_outside_area_is_rejected() {
        let err = place_sites(&area(), 1200.0, 25.0, 20.0, 2.0, AntennaConfig::default()).unwrap_err();
        assert!(matches!(err, Error::SiteOutsideArea { site: 1, .. }));
    }
}
