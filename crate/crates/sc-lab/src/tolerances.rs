//! Pinned tolerances used by the library, the experiment runner, and the
//! acceptance suite. Every threshold lives here so no check carries an
//! ad-hoc magic number.

/// Absolute error allowed on the step-function discontinuity constants
/// (witness norm 1 and shift defect √2). The quadrature is exact for the
/// grid-aligned step data, so only f64 roundoff accumulates.
pub const DISCONTINUITY_ABS: f64 = 1e-9;

/// Relative deviation allowed when a shift must preserve a Sobolev norm.
/// Shifting multiplies Fourier modes by unit phases, so deviations are
/// pure roundoff.
pub const ISOMETRY_REL: f64 = 1e-12;

/// Coefficientwise tolerance for the shift group law Ψ_σ∘Ψ_τ = Ψ_{σ+τ}.
pub const GROUP_LAW_ABS: f64 = 1e-12;

/// Error allowed on finite differences of the shift along pure-v
/// perturbations. The map is linear in v, so central differences are exact
/// up to cancellation roundoff.
pub const SC_LINEARITY_ABS: f64 = 1e-12;

/// Relative tolerance for symmetry of the second scale differential and
/// permutation symmetry of the third. The closed forms differ only in
/// summation order.
pub const SC_SYMMETRY_REL: f64 = 1e-12;

/// Tolerance for the two independently computed sides of the chain rule
/// T(Ψ_σ∘Ψ) = TΨ_σ∘TΨ, measured in the level-0 norm.
pub const CHAIN_RULE_ABS: f64 = 1e-10;

/// Minimum fitted convergence order for central finite differences against
/// the closed-form scale differentials (theoretical order 2).
pub const FD_MIN_ORDER: f64 = 1.9;

/// Relative slack allowed when a measured operator defect is compared with
/// its certified bound. The discrete inequalities are exact in real
/// arithmetic; the slack absorbs roundoff only.
pub const CERT_SLACK_REL: f64 = 1e-9;

/// Absolute error allowed on the doubling/halving round trips
/// (path samples one way, Fourier coefficients the other).
pub const DOUBLING_ROUNDTRIP_ABS: f64 = 1e-9;

/// Largest imaginary coefficient magnitude accepted from doubling a
/// boundary-compliant path, and the default threshold for claiming a loop
/// symmetric.
pub const SYMMETRY_DEFECT_ABS: f64 = 1e-8;

/// Absolute tolerance on the endpoint-real precondition of the doubling map.
pub const ENDPOINT_REAL_ABS: f64 = 1e-8;

/// Relative tolerance for the levelwise isometry of the basis-rescaling
/// maps between scale levels, and for their round trips.
pub const PHI_ISOMETRY_REL: f64 = 1e-12;

/// Relative error allowed on the Fourier/grid round trip for band-limited
/// loops sampled at or above the Nyquist resolution.
pub const ROUNDTRIP_REL: f64 = 1e-10;

/// Minimum measured convergence order for grid-based norms under
/// resolution doubling on smooth inputs (trapezoid rule and order-2
/// stencils are both second order).
pub const REFINEMENT_MIN_ORDER: f64 = 1.9;
