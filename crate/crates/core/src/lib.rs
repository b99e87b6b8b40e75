//! Measures how programmable a discrete dynamical system is.
//!
//! A system is fed an enumeration of initial configurations; each space-time
//! evolution is compressed, and the spread of compressed lengths across inputs
//! (the variability `f`) is tracked as runtime grows. The least-squares slope of
//! `f` against runtime is the coefficient reported by [`measure::coefficient`],
//! and [`taxonomy`] turns coefficients into threshold labels and rankings.
//!
//! ```
//! use progcoef::compress::CompressorSpec;
//! use progcoef::measure::{coefficient, MeasureParams};
//! use progcoef::systems::{Boundary, RuleSystem};
//!
//! let rule = RuleSystem::elementary(110, 21, Boundary::Cyclic).unwrap();
//! let params = MeasureParams::new(4, vec![10, 20, 30]).unwrap();
//! let c = coefficient(&rule, &params, &CompressorSpec::default()).unwrap();
//! assert!(c.value.is_finite());
//! ```

pub mod compress;
pub mod error;
pub mod io;
pub mod measure;
pub mod systems;
pub mod taxonomy;

pub use error::{Error, ErrorCategory, Result};
