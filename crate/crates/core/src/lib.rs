//! Path planning for a cellular-connected UAV flying at fixed altitude over a
//! dense urban area.
//!
//! The crate has two halves:
//!
//! * [`radio`] builds a deterministic urban radio environment (buildings,
//!   three-sector macro sites with downtilted arrays, UMa aerial path loss)
//!   and answers "is the UAV connected here?" queries.
//! * [`mdp`], [`dp`], [`td`], [`tile`] and [`baseline`] cast the flight as an
//!   episodic lattice MDP whose reward charges one unit per step plus a
//!   weight `mu` per disconnected step, and solve it with value iteration,
//!   table-based TD(0), tile-coded semi-gradient TD(0) and a straight-to-goal
//!   baseline.
//!
//! [`experiment`] ties everything together and writes the CSV / PGM
//! artifacts used by the `skypath` command-line tool.

pub mod baseline;
pub mod dp;
pub mod error;
pub mod experiment;
pub mod mdp;
pub mod radio;
pub mod td;
pub mod tile;

pub use error::{Error, Result};
