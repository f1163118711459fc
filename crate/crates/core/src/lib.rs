//! Warped-product metrics for tube and cusp interpolation, their curvature defects and
//! scalar-curvature integrals, and the volume-change bounds for drilling and Dehn filling that
//! follow from them.
//!
//! Module overview:
//!
//! - [`profiles`]: smooth bump functions and C² radial profiles with closed-form derivatives.
//! - [`warped`]: metrics `dr² + a²dθ² + b²dy²`, curvature and radial quadrature.
//! - [`drill`]: tube to cusp profiles and the shell integral.
//! - [`fill`]: cusp to tube profiles and the solid torus built from flat torus data.
//! - [`yamabe`]: Einstein–Hilbert functional, conformal change, Hölder lower bound.
//! - [`bounds`]: theorem-level volume bounds and geometry constants.

// `!(x > y)` is used deliberately so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod drill;
pub mod error;
pub mod fill;
pub mod profiles;
pub mod quadrature;
mod search;
pub mod warped;
pub mod yamabe;

pub use error::{Error, Result};
pub use profiles::{BumpFunction, Interval, Jet, SmoothProfile};
pub use warped::{CurvatureSample, WarpedMetric};
