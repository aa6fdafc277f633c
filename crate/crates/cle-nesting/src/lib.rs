//! Nesting statistics of conformal loop ensembles.
//!
//! A nested CLE exploration of the unit disk decrements the log conformal
//! radius seen from an interior point by an i.i.d. jump at every loop level.
//! Everything in this crate is built around that jump law:
//!
//! * [`radius_law`] implements the jump distribution itself (cumulant
//!   generating function, density, CDF, tilted sampling),
//! * [`ldp`] provides generic large-deviation machinery (Fenchel-Legendre
//!   conjugation, interval rates for renewal counts),
//! * [`dimension`] converts nesting rates into Hausdorff dimension curves,
//! * [`weighted`] extends the rates to weighted nestings and their Gaussian
//!   free field limit at kappa = 4.
//!
//! The numerical conventions (tolerances, bracketing strategies, series
//! truncation rules) are documented on the individual functions and are
//! pinned by the test suite.

pub mod dimension;
pub mod error;
pub mod ext;
pub mod ldp;
pub mod quad;
pub mod radius_law;
pub mod weighted;

mod interp;
mod numeric;

pub use error::{Error, Result};
pub use ext::Extended;
