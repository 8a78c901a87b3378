//! Urban-macro path loss for aerial users.

use crate::error::{Error, Result};

/// Lowest UAV height (exclusive) for which the aerial UMa model applies.
pub const MIN_AERIAL_HEIGHT_M: f64 = 22.5;
/// Highest UAV height (inclusive) for which the aerial UMa model applies.
pub const MAX_AERIAL_HEIGHT_M: f64 = 300.0;

/// Path loss in dB between a macro site and an aerial user at `h_ut_m`.
///
/// LoS: `28 + 22 log10(d) + 20 log10(fc)`.
/// NLoS: `-17.5 + (46 - 7 log10(h)) log10(d) + 20 log10(40 pi fc / 3)`.
pub fn path_loss_db(d3d_m: f64, h_ut_m: f64, carrier_ghz: f64, los: bool) -> Result<f64> {
    if !(h_ut_m > MIN_AERIAL_HEIGHT_M && h_ut_m <= MAX_AERIAL_HEIGHT_M) {
        return Err(Error::AltitudeOutOfRange(h_ut_m));
    }
    if !(d3d_m > 0.0) {
        return Err(Error::param("d3d_m", format!("distance must be positive, got {d3d_m}")));
    }
    if !(carrier_ghz > 0.0) {
        return Err(Error::param(
            "carrier_ghz",
            format!("must be positive, got {carrier_ghz}"),
        ));
    }
    Ok(if los {
        28.0 + 22.0 * d3d_m.log10() + 20.0 * carrier_ghz.log10()
    } else {
        -17.5
            + (46.0 - 7.0 * h_ut_m.log10()) * d3d_m.log10()
            + 20.0 * (40.0 * std::f64::consts::PI * carrier_ghz / 3.0).log10()
    })
}
