//! sc-lab: a numerical laboratory for scale calculus at desk scale.
//!
//! The crate realizes, on finite truncations, the standard scale structures
//! of symplectic analysis — weighted ℓ² sequence scales, Sobolev loop
//! spaces, exponentially weighted path spaces and their intersections — and
//! verifies the quantitative behavior of the shift map on them: isometry in
//! the loop variable, the √2 norm-topology discontinuity in the time
//! variable, pointwise (compact-open) convergence, the closed-form iterated
//! scale differentials with their finite-difference convergence orders, the
//! chain rule, operator-norm decay of compactness certificates, and the
//! doubling correspondence for boundary-condition path spaces.
//!
//! Entry points: the modules below for the library surface, and the
//! [`experiments`] module (wrapped by the `sc-lab` binary) for reproducible
//! experiment runs emitting JSON/CSV reports.

pub mod compactness;
pub mod error;
pub mod experiments;
pub mod lagrangian;
pub mod loops;
pub mod paths;
pub mod shift_calculus;
pub mod stencil;
pub mod tolerances;
pub mod weights;

pub use error::{Result, ScError};
