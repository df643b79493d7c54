//! Coupled-mode networks, their resonances and antiresonances, and the
//! estimators and simulations used to measure them.

pub mod error;
pub mod fit;
pub mod heterodyne;
pub mod io;
pub mod netfile;
pub mod network;
pub mod oracle;
pub mod scenario;
pub mod spectral;

pub use error::{Error, Result};
pub use network::{Mode, ModeKind, ModeNetwork, ProbeGrid};
