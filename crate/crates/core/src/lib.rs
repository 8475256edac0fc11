//! Cramér-Rao bounds for joint angle/range estimation with extremely large
//! arrays in the radiating near field.
//!
//! The crate has three independent routes to a bound:
//!
//! - [`fim::fim_numeric`] + [`fim::crb_from_fim`]: brute-force Fisher
//!   information of the stacked observation vector.
//! - [`fim::crb_exact_sum`]: element sums pushed through the closed-form
//!   algebra.
//! - [`closedform`]: integral approximations, asymptotes, Taylor and
//!   plane-wave references.
//!
//! [`signalsim`] and [`estimator`] generate data and measure estimator RMSE
//! against those bounds; [`cli`] drives sweeps and writes CSV.
//!
//! ```
//! use nfcrb::closedform::crb_closed_form;
//! use nfcrb::{ArrayGeometry, Carrier, Mode, NoiseAndPowerConfig, TargetLocation, Topology};
//!
//! let geom = ArrayGeometry::monostatic(257, 0.0628)?;
//! let target = TargetLocation::new(10.0, 30f64.to_radians())?;
//! let carrier = Carrier::from_frequency(2.37e9)?;
//! let power = NoiseAndPowerConfig::from_snr_db(0.0, 1.0)?;
//! let crb = crb_closed_form(&geom, &target, &carrier, &power, Mode::Mimo, Topology::Monostatic)?;
//! assert!(crb.identifiable && crb.crb_range.is_finite());
//! # Ok::<(), nfcrb::Error>(())
//! ```

// comparisons are written `!(a < b)` so that NaN falls on the error side
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod closedform;
pub mod estimator;
pub mod error;
pub mod fim;
pub mod geometry;
pub mod scenario;
pub mod signalsim;
pub mod steering;
pub mod warning;

pub use error::{Error, Result};
pub use fim::{CrbResult, FimMatrix, Method, NoiseAndPowerConfig};
pub use geometry::{ArrayGeometry, Carrier, TargetLocation};
pub use scenario::{Mode, SensingScenario, Topology};
pub use warning::Warning;
