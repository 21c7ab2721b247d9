//! Accelerometer gesture recognition.
//!
//! Tri-axial g-value sequences are reduced to a fixed 33-value feature set
//! (time-domain moments and correlations, Fourier energy, Hilbert-domain
//! statistics) and classified by Extra Trees, Gradient Boosting or a Ridge
//! classifier. The [`evaluation`] module runs the three end-user modes
//! (user-dependent, mixed-user, leave-one-user-out) and reports accuracy,
//! confusion matrices and per-sample classification time.

pub mod classifiers;
pub mod cli;
pub mod data;
pub mod dsp;
pub mod error;
pub mod evaluation;
pub mod features;
pub mod synth;

pub use error::{Error, Result};
