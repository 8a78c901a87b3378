//! Sector antenna: directional element pattern combined with a vertical
//! uniform linear array electrically steered below the horizon.

use std::f64::consts::PI;

use super::Cell;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntennaConfig {
    pub num_elements: usize,
    pub element_spacing_wavelengths: f64,
    /// Electrical downtilt of the main lobe below the horizon.
    pub downtilt_deg: f64,
    pub element_max_gain_dbi: f64,
    pub vertical_hpbw_deg: f64,
    pub horizontal_hpbw_deg: f64,
    pub sidelobe_floor_db: f64,
    pub front_back_db: f64,
}

impl Default for AntennaConfig {
    fn default() -> Self {
        Self {
            num_elements: 8,
            element_spacing_wavelengths: 0.5,
            downtilt_deg: 10.0,
            element_max_gain_dbi: 8.0,
            vertical_hpbw_deg: 65.0,
            horizontal_hpbw_deg: 65.0,
            sidelobe_floor_db: 30.0,
            front_back_db: 30.0,
        }
    }
}

impl AntennaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_elements == 0 {
            return Err(Error::param("num_elements", "must be at least 1"));
        }
        if !(self.downtilt_deg > 0.0 && self.downtilt_deg < 90.0) {
            return Err(Error::param(
                "downtilt_deg",
                format!("must lie in (0, 90), got {}", self.downtilt_deg),
            ));
        }
        if !(self.vertical_hpbw_deg > 0.0 && self.horizontal_hpbw_deg > 0.0) {
            return Err(Error::param("hpbw", "beamwidths must be positive"));
        }
        Ok(())
    }

    /// Zenith angle of the steered main lobe (90 deg is the horizon).
    pub fn boresight_zenith_deg(&self) -> f64 {
        90.0 + self.downtilt_deg
    }

    /// Element pattern in dBi. `zenith_deg` in [0, 180], `azimuth_offset_deg`
    /// relative to the sector boresight in [-180, 180].
    ///
    /// The vertical cut is centred on the steered boresight so that element
    /// and array peak in the same direction.
    pub fn element_gain_db(&self, zenith_deg: f64, azimuth_offset_deg: f64) -> f64 {
        let v = (zenith_deg - self.boresight_zenith_deg()) / self.vertical_hpbw_deg;
        let a_v = -(12.0 * v * v).min(self.sidelobe_floor_db);
        let h = azimuth_offset_deg / self.horizontal_hpbw_deg;
        let a_h = -(12.0 * h * h).min(self.front_back_db);
        self.element_max_gain_dbi - (-(a_v + a_h)).min(self.front_back_db)
    }

    /// Normalised array power gain in dB, `10 log10 |sum_m w_m a_m(theta)|^2`
    /// with unit-norm conjugate steering weights.
    pub fn array_factor_db(&self, zenith_deg: f64) -> f64 {
        let n = self.num_elements as f64;
        let psi = 2.0
            * PI
            * self.element_spacing_wavelengths
            * (zenith_deg.to_radians().cos() - self.boresight_zenith_deg().to_radians().cos());
        let (mut re, mut im) = (0.0, 0.0);
        for m in 0..self.num_elements {
            let phase = psi * m as f64;
            re += phase.cos();
            im += phase.sin();
        }
        10.0 * ((re * re + im * im) / n).log10()
    }

    /// Composite element + array gain.
    pub fn gain_db(&self, zenith_deg: f64, azimuth_offset_deg: f64) -> f64 {
        self.element_gain_db(zenith_deg, azimuth_offset_deg) + self.array_factor_db(zenith_deg)
    }

    /// Gain in the steered boresight direction.
    pub fn peak_gain_db(&self) -> f64 {
        self.gain_db(self.boresight_zenith_deg(), 0.0)
    }
}

/// Wraps an angle in degrees to [-180, 180).
pub(crate) fn wrap_deg(a: f64) -> f64 {
    (a + 180.0).rem_euclid(360.0) - 180.0
}

/// Zenith angle and sector-relative azimuth from the cell antenna to a point.
pub fn angles_to(cell: &Cell, p: [f64; 3]) -> (f64, f64) {
    let dx = p[0] - cell.site_xy[0];
    let dy = p[1] - cell.site_xy[1];
    let dz = p[2] - cell.antenna_height_m;
    let horizontal = dx.hypot(dy);
    let zenith = horizontal.atan2(dz).to_degrees();
    let azimuth = dy.atan2(dx).to_degrees();
    (zenith, wrap_deg(azimuth - cell.sector_azimuth_deg))
}

/// Antenna gain of `cell` towards a 3D UAV position.
pub fn antenna_gain_db(cell: &Cell, cfg: &AntennaConfig, uav_pos: [f64; 3]) -> f64 {
    let (zenith, azimuth) = angles_to(cell, uav_pos);
    cfg.gain_db(zenith, azimuth)
}
