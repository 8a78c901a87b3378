//! Plain-text artifacts. Every CSV starts with a `# env_fingerprint=<hex>`
//! comment line followed by a header row; numbers use Rust's shortest
//! round-trip formatting so identical runs give identical bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::dp::Rollout;
use crate::error::{Error, Result};
use crate::mdp::GridMdp;
use crate::radio::{CoverageField, GridSpec, MetricKind, RadioEnv};
use crate::td::TrainStats;
use crate::tile::TilingSpec;

const FINGERPRINT_PREFIX: &str = "# env_fingerprint=";

/// SHA-256 over buildings, cells, antenna, metric and flight altitude.
pub fn env_fingerprint(env: &RadioEnv) -> String {
    let mut h = Sha256::new();
    let mut put = |v: f64| h.update(v.to_le_bytes());
    put(env.area().uav_altitude_m);
    put(env.buildings().len() as f64);
    for b in env.buildings().buildings() {
        for v in [b.x_min, b.x_max, b.y_min, b.y_max, b.height_m] {
            put(v);
        }
    }
    let cells = env.cells();
    put(cells.cells.len() as f64);
    for c in &cells.cells {
        for v in [
            c.site_xy[0],
            c.site_xy[1],
            c.antenna_height_m,
            c.sector_azimuth_deg,
            c.tx_power_dbm,
            c.carrier_ghz,
        ] {
            put(v);
        }
    }
    let a = &cells.antenna;
    for v in [
        a.num_elements as f64,
        a.element_spacing_wavelengths,
        a.downtilt_deg,
        a.element_max_gain_dbi,
        a.vertical_hpbw_deg,
        a.horizontal_hpbw_deg,
        a.sidelobe_floor_db,
        a.front_back_db,
    ] {
        put(v);
    }
    let metric = env.metric();
    put(match metric.kind {
        MetricKind::MaxPower => 0.0,
        MetricKind::Sir => 1.0,
    });
    put(metric.threshold);
    h.finalize().iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn csv_with_header(fingerprint: &str, header: &str) -> String {
    format!("{FINGERPRINT_PREFIX}{fingerprint}\n{header}\n")
}

pub fn write_buildings(path: &Path, fingerprint: &str, env: &RadioEnv) -> Result<()> {
    let mut out = csv_with_header(fingerprint, "x_min,x_max,y_min,y_max,height");
    for b in env.buildings().buildings() {
        let _ = writeln!(out, "{},{},{},{},{}", b.x_min, b.x_max, b.y_min, b.y_max, b.height_m);
    }
    write_file(path, out.as_bytes())
}

/// Grid matrix: header `y\x,<x_0>,...`, then one row per `y` index (south
/// first) led by its `y` coordinate.
pub fn write_matrix<T: std::fmt::Display>(
    path: &Path,
    fingerprint: &str,
    grid: &GridSpec,
    value: impl Fn(usize, usize) -> T,
) -> Result<()> {
    let xs: Vec<String> = (0..grid.nx).map(|i| grid.point(i, 0)[0].to_string()).collect();
    let mut out = csv_with_header(fingerprint, &format!("y\\x,{}", xs.join(",")));
    for j in 0..grid.ny {
        let _ = write!(out, "{}", grid.point(0, j)[1]);
        for i in 0..grid.nx {
            let _ = write!(out, ",{}", value(i, j));
        }
        out.push('\n');
    }
    write_file(path, out.as_bytes())
}

/// A matrix read back from [`write_matrix`].
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub fingerprint: String,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// Row-major, row `j` at `ys[j]`.
    pub values: Vec<f64>,
}

pub fn read_matrix(path: &Path) -> Result<Matrix> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let bad = |reason: String| Error::Parse {
        path: path.to_path_buf(),
        reason,
    };
    let mut lines = text.lines();
    let fingerprint = lines
        .next()
        .and_then(|l| l.strip_prefix(FINGERPRINT_PREFIX))
        .ok_or_else(|| bad("missing env_fingerprint line".into()))?
        .to_string();
    let number = |s: &str, line: usize| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| bad(format!("line {line}: bad number `{s}`")))
    };
    let header = lines.next().ok_or_else(|| bad("missing header".into()))?;
    let xs = header
        .split(',')
        .skip(1)
        .map(|s| number(s, 2))
        .collect::<Result<Vec<_>>>()?;
    let (mut ys, mut values) = (Vec::new(), Vec::new());
    for (n, line) in lines.enumerate() {
        let mut fields = line.split(',');
        ys.push(number(fields.next().unwrap_or(""), n + 3)?);
        let row = fields.map(|s| number(s, n + 3)).collect::<Result<Vec<_>>>()?;
        if row.len() != xs.len() {
            return Err(bad(format!(
                "line {}: expected {} values, got {}",
                n + 3,
                xs.len(),
                row.len()
            )));
        }
        values.extend(row);
    }
    Ok(Matrix {
        fingerprint,
        xs,
        ys,
        values,
    })
}

/// Binary greyscale map, north row first: 0 disconnected, 255 connected.
pub fn write_pgm(path: &Path, fingerprint: &str, field: &CoverageField) -> Result<()> {
    let (nx, ny) = (field.grid.nx, field.grid.ny);
    let mut out = format!("P5\n{FINGERPRINT_PREFIX}{fingerprint}\n{nx} {ny}\n255\n").into_bytes();
    for j in (0..ny).rev() {
        out.extend((0..nx).map(|i| if field.indicator(i, j) == 1 { 0u8 } else { 255u8 }));
    }
    write_file(path, &out)
}

/// One row per visited state; `reward` is collected on leaving it, so the
/// final (arrival) row carries 0.
pub fn write_path(path: &Path, fingerprint: &str, mdp: &GridMdp, rollout: &Rollout) -> Result<()> {
    let mut out = csv_with_header(fingerprint, "step,x,y,reward");
    for (k, s) in rollout.path.iter().enumerate() {
        let [x, y] = mdp.xy(*s);
        let r = rollout.rewards.get(k).copied().unwrap_or(0.0);
        let _ = writeln!(out, "{k},{x},{y},{r}");
    }
    write_file(path, out.as_bytes())
}

pub fn write_rewards(path: &Path, fingerprint: &str, stats: &TrainStats) -> Result<()> {
    let mut out = csv_with_header(fingerprint, "episode,return,steps,disconnected_steps");
    for e in 0..stats.episodes() {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            e + 1,
            stats.returns[e],
            stats.steps[e],
            stats.disconnected_steps[e]
        );
    }
    write_file(path, out.as_bytes())
}

/// Tile weights with their tiling and tile position.
pub fn write_theta(path: &Path, fingerprint: &str, spec: &TilingSpec, theta: &[f64]) -> Result<()> {
    let mut out = csv_with_header(fingerprint, "index,tiling,row,col,theta");
    let per = spec.tiles_per_tiling();
    let lx = spec.tiles_x();
    for (idx, w) in theta.iter().enumerate() {
        let (t, local) = (idx / per, idx % per);
        let _ = writeln!(out, "{idx},{t},{},{},{w}", local / lx, local % lx);
    }
    write_file(path, out.as_bytes())
}

/// `key = value` lines, in insertion order of `entries`.
pub fn write_summary(path: &Path, entries: &[(String, String)]) -> Result<()> {
    let text: String = entries.iter().map(|(k, v)| format!("{k} = {v}\n")).collect();
    write_file(path, text.as_bytes())
}

pub fn read_summary(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text
        .lines()
        .filter_map(|l| l.split_once(" = "))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect())
}
