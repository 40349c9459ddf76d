//! Discretized exponentially weighted Sobolev spaces of Hilbert-space-valued
//! paths on the real line — the trajectory spaces of gradient-flow theory.
//!
//! A path is a function ℝ → H truncated to [−L, L] on a uniform grid whose
//! values are coefficient vectors over a shared weight function. The level
//! structure combines two mechanisms: differentiation order together with the
//! exponential weight γ_δ(s) = e^{δβ(s)s} on the time axis, and the weighted
//! sequence-space levels of [`crate::weights`] on the target. The level-k
//! space intersects k+1 constituent spaces and carries the maximum of their
//! norms.
//!
//! Discretization choices: trapezoid quadrature (interior weight h, endpoint
//! weight h/2), central first differences in the interior with order-2
//! one-sided stencils at the two boundary samples. Both are second order, as
//! the refinement experiments measure.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Result, ScError};
use crate::weights::{ScaleVector, WeightFunction};

/// Monotone cutoff profile β with β(s) = −1 for s ≤ −1, β(s) = 1 for s ≥ 1.
///
/// The default is the odd quintic smoothstep β(s) = (15s − 10s³ + 3s⁵)/8 on
/// [−1, 1], which is C², monotone, and odd, so the exponential weight built
/// from it is even and equals e^{δ|s|} outside [−1, 1].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CutoffProfile {
    /// Odd polynomial smoothstep of the given order (1, 3, or 5).
    SmoothstepPoly { order: u8 },
    /// β(s) = clamp(s, −1, 1).
    PiecewiseLinear,
}

impl Default for CutoffProfile {
    fn default() -> Self {
        CutoffProfile::SmoothstepPoly { order: 5 }
    }
}

impl CutoffProfile {
    pub fn eval(&self, s: f64) -> f64 {
        if s <= -1.0 {
            return -1.0;
        }
        if s >= 1.0 {
            return 1.0;
        }
        match self {
            CutoffProfile::PiecewiseLinear => s,
            CutoffProfile::SmoothstepPoly { order: 1 } => s,
            CutoffProfile::SmoothstepPoly { order: 3 } => 0.5 * s * (3.0 - s * s),
            CutoffProfile::SmoothstepPoly { order: 5 } => {
                let s2 = s * s;
                s * (15.0 - s2 * (10.0 - 3.0 * s2)) / 8.0
            }
            CutoffProfile::SmoothstepPoly { order } => {
                panic!("unsupported smoothstep order {order}; use 1, 3, or 5")
            }
        }
    }
}

/// The exponential weight γ_δ(s) = e^{δ·β(s)·s}. Equals e^{δ|s|} for
/// |s| ≥ 1, is identically 1 for δ = 0, and is ≥ 1 everywhere because
/// β(s)·s ≥ 0 for the odd profiles used here.
pub fn gamma_delta(s: f64, delta: f64, beta: &CutoffProfile) -> f64 {
    (delta * beta.eval(s) * s).exp()
}

/// Level specification for the intersection spaces: strictly increasing
/// exponential weights starting at δ₀ = 0, an integrability exponent
/// p ∈ (1,∞), and the target weight function.
#[derive(Debug, Clone)]
pub struct LevelSpec {
    p: f64,
    deltas: Vec<f64>,
    weight: Arc<WeightFunction>,
}

impl LevelSpec {
    pub fn new(p: f64, deltas: Vec<f64>, weight: Arc<WeightFunction>) -> Result<Self> {
        if p <= 1.0 || !p.is_finite() {
            return Err(ScError::Domain(format!(
                "exponent p must lie in (1,∞), got {p}"
            )));
        }
        if deltas.is_empty() || deltas[0] != 0.0 {
            return Err(ScError::Domain(
                "the δ sequence must start at δ₀ = 0".into(),
            ));
        }
        if deltas.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ScError::Domain(
                "the δ sequence must be strictly increasing".into(),
            ));
        }
        Ok(Self { p, deltas, weight })
    }

    /// δ_k = k/10, the default experiment parameter (any strictly increasing
    /// sequence works; nothing downstream depends on this choice).
    pub fn default_deltas(p: f64, max_level: usize, weight: Arc<WeightFunction>) -> Result<Self> {
        Self::new(
            p,
            (0..=max_level).map(|k| k as f64 / 10.0).collect(),
            weight,
        )
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn delta(&self, k: usize) -> Result<f64> {
        self.deltas.get(k).copied().ok_or_else(|| {
            ScError::Contract(format!(
                "level {k} exceeds the specified maximum {}",
                self.deltas.len() - 1
            ))
        })
    }

    pub fn max_level(&self) -> usize {
        self.deltas.len() - 1
    }

    pub fn weight(&self) -> &Arc<WeightFunction> {
        &self.weight
    }
}

/// A function ℝ → H truncated to [−L, L] on a uniform grid of P samples
/// (both endpoints included), each sample a coefficient vector over the
/// shared weight function.
///
/// `derivative_budget` records how many discrete derivatives the
/// representation is trusted for; the scale-calculus operations consume it.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPath {
    half_width: f64,
    samples: Vec<Vec<f64>>,
    weight: Arc<WeightFunction>,
    derivative_budget: usize,
}

pub const DEFAULT_DERIVATIVE_BUDGET: usize = 2;

impl GridPath {
    /// Build from explicit samples; all must share the weight function and
    /// coefficient length.
    pub fn from_samples(half_width: f64, samples: Vec<ScaleVector>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(ScError::Domain("paths need at least two samples".into()));
        }
        if half_width <= 0.0 || !half_width.is_finite() {
            return Err(ScError::Domain(
                "the domain half-width must be positive".into(),
            ));
        }
        let weight = Arc::clone(samples[0].weight());
        let truncation = samples[0].truncation();
        for s in &samples[1..] {
            if s.weight() != &weight {
                return Err(ScError::Contract(
                    "all samples of a path must share one weight function".into(),
                ));
            }
            if s.truncation() != truncation {
                return Err(ScError::Contract(
                    "all samples of a path must share one truncation length".into(),
                ));
            }
        }
        Ok(Self {
            half_width,
            samples: samples
                .into_iter()
                .map(|s| s.coefficients().to_vec())
                .collect(),
            weight,
            derivative_budget: DEFAULT_DERIVATIVE_BUDGET,
        })
    }

    /// Sample an analytic path t ↦ coefficients on the uniform grid.
    pub fn sample(
        half_width: f64,
        resolution: usize,
        weight: Arc<WeightFunction>,
        f: impl Fn(f64) -> Vec<f64>,
    ) -> Result<Self> {
        if resolution < 2 {
            return Err(ScError::Domain("paths need at least two samples".into()));
        }
        if half_width <= 0.0 || !half_width.is_finite() {
            return Err(ScError::Domain(
                "the domain half-width must be positive".into(),
            ));
        }
        let h = 2.0 * half_width / (resolution - 1) as f64;
        let samples: Vec<Vec<f64>> = (0..resolution)
            .map(|i| f(-half_width + i as f64 * h))
            .collect();
        let truncation = samples[0].len();
        if samples.iter().any(|s| s.len() != truncation) {
            return Err(ScError::Contract(
                "the sampled coefficient vectors must share one length".into(),
            ));
        }
        Ok(Self {
            half_width,
            samples,
            weight,
            derivative_budget: DEFAULT_DERIVATIVE_BUDGET,
        })
    }

    /// Scalar path t ↦ x(t)·e₁.
    pub fn sample_scalar(
        half_width: f64,
        resolution: usize,
        weight: Arc<WeightFunction>,
        f: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        Self::sample(half_width, resolution, weight, |t| vec![f(t)])
    }

    pub fn with_derivative_budget(mut self, budget: usize) -> Self {
        self.derivative_budget = budget;
        self
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn resolution(&self) -> usize {
        self.samples.len()
    }

    pub fn step(&self) -> f64 {
        2.0 * self.half_width / (self.samples.len() - 1) as f64
    }

    pub fn grid_point(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.step()
    }

    pub fn truncation(&self) -> usize {
        self.samples[0].len()
    }

    pub fn weight(&self) -> &Arc<WeightFunction> {
        &self.weight
    }

    pub fn derivative_budget(&self) -> usize {
        self.derivative_budget
    }

    pub fn sample_vector(&self, i: usize) -> ScaleVector {
        ScaleVector::new(self.samples[i].clone(), Arc::clone(&self.weight))
            .expect("stored samples are finite")
    }

    /// Raw coefficient rows, one per grid point.
    pub fn rows(&self) -> &[Vec<f64>] {
        &self.samples
    }

    /// Trapezoid quadrature weights: h in the interior, h/2 at the ends.
    fn quad_weights(&self) -> impl Iterator<Item = f64> + '_ {
        let h = self.step();
        let p = self.samples.len();
        (0..p).map(move |i| if i == 0 || i == p - 1 { 0.5 * h } else { h })
    }

    fn level_norm_sq_table(&self, level: usize) -> Vec<f64> {
        let m = self.truncation();
        self.weight
            .values_upto(m)
            .into_iter()
            .map(|f| f.powi(level as i32))
            .collect()
    }

    fn row_level_norm(row: &[f64], level_weights: &[f64]) -> f64 {
        row.iter()
            .zip(level_weights)
            .map(|(x, w)| w * x * x)
            .sum::<f64>()
            .sqrt()
    }

    /// Discrete weak derivative: central differences in the interior,
    /// order-2 one-sided stencils at the two boundary samples. Exact on
    /// linear data; second order on smooth data.
    pub fn weak_derivative(&self) -> Result<Self> {
        let p = self.samples.len();
        if p < 3 {
            return Err(ScError::Contract(
                "the derivative stencils need at least three samples".into(),
            ));
        }
        let h = self.step();
        let m = self.truncation();
        let mut out = Vec::with_capacity(p);
        for i in 0..p {
            let mut row = vec![0.0; m];
            for (nu, slot) in row.iter_mut().enumerate() {
                *slot = if i == 0 {
                    (-3.0 * self.samples[0][nu] + 4.0 * self.samples[1][nu] - self.samples[2][nu])
                        / (2.0 * h)
                } else if i == p - 1 {
                    (3.0 * self.samples[p - 1][nu] - 4.0 * self.samples[p - 2][nu]
                        + self.samples[p - 3][nu])
                        / (2.0 * h)
                } else {
                    (self.samples[i + 1][nu] - self.samples[i - 1][nu]) / (2.0 * h)
                };
            }
            out.push(row);
        }
        Ok(Self {
            half_width: self.half_width,
            samples: out,
            weight: Arc::clone(&self.weight),
            derivative_budget: self.derivative_budget.saturating_sub(1),
        })
    }

    /// Pointwise multiplication by γ_δ along the time axis.
    fn weighted_by_gamma(&self, delta: f64, beta: &CutoffProfile) -> Self {
        if delta == 0.0 {
            return self.clone();
        }
        let samples = self
            .samples
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let g = gamma_delta(self.grid_point(i), delta, beta);
                row.iter().map(|x| g * x).collect()
            })
            .collect();
        Self {
            half_width: self.half_width,
            samples,
            weight: Arc::clone(&self.weight),
            derivative_budget: self.derivative_budget,
        }
    }

    /// The weighted Sobolev norm
    /// (Σ_{i=0..k} Σ_grid ‖D^i(γ_δ v)(t)‖_{H_level}^p · w_t)^{1/p}.
    /// With k = 0, δ = 0, level = 0 this is the plain discrete L^p norm.
    pub fn wkp_delta_norm(
        &self,
        k: usize,
        p: f64,
        delta: f64,
        level: usize,
        beta: &CutoffProfile,
    ) -> Result<f64> {
        if p < 1.0 || !p.is_finite() {
            return Err(ScError::Domain(format!(
                "exponent p must lie in [1,∞), got {p}"
            )));
        }
        if self.samples.len() < k + 1 || (k >= 1 && self.samples.len() < 3) {
            return Err(ScError::Contract(format!(
                "order {k} needs more samples than the path has ({})",
                self.samples.len()
            )));
        }
        let level_weights = self.level_norm_sq_table(level);
        let mut acc = 0.0;
        let mut current = self.weighted_by_gamma(delta, beta);
        for order in 0..=k {
            if order > 0 {
                current = current.weak_derivative_unbudgeted()?;
            }
            for (w, row) in current.quad_weights().zip(current.samples.iter()) {
                let value = Self::row_level_norm(row, &level_weights);
                acc += w * value.powf(p);
            }
        }
        Ok(acc.powf(1.0 / p))
    }

    // Norms may differentiate freely; the budget only meters the
    // scale-calculus operations.
    fn weak_derivative_unbudgeted(&self) -> Result<Self> {
        let mut d = self.weak_derivative()?;
        d.derivative_budget = self.derivative_budget;
        Ok(d)
    }

    /// The intersection-space norm at scale level k:
    /// max over i = 0..k of the order-i norm with weight δ_k measured in
    /// target level k−i. Monotone nondecreasing in k for the nested spec.
    pub fn ek_norm(&self, k: usize, spec: &LevelSpec, beta: &CutoffProfile) -> Result<f64> {
        if spec.weight() != &self.weight {
            return Err(ScError::Contract(
                "the level spec and the path use different weight functions".into(),
            ));
        }
        let delta_k = spec.delta(k)?;
        let mut worst = 0.0f64;
        for i in 0..=k {
            let piece = self.wkp_delta_norm(i, spec.p(), delta_k, k - i, beta)?;
            worst = worst.max(piece);
        }
        Ok(worst)
    }

    /// Discrete L^p norm of the restriction to |t| ≥ T. Satisfies
    /// tail ≤ e^{−δT}·‖v‖_{W^{1,p}_δ} for T ≥ 1 exactly in the discrete
    /// model, because the tail quadrature weights never exceed the full-grid
    /// ones and γ_δ ≥ e^{δT} on every tail sample.
    pub fn tail_mass(&self, t_cut: f64, p: f64) -> Result<f64> {
        if t_cut >= self.half_width {
            return Err(ScError::Contract(format!(
                "tail cut T = {t_cut} lies outside the represented domain (L = {})",
                self.half_width
            )));
        }
        if t_cut <= 0.0 || !t_cut.is_finite() {
            return Err(ScError::Domain("the tail cut must be positive".into()));
        }
        let level_weights = self.level_norm_sq_table(0);
        let h = self.step();
        let n = self.samples.len();
        let mut acc = 0.0;
        // Two sub-intervals, each integrated by its own trapezoid rule: the
        // sample closest to ±T from outside gets weight h/2, as do ±L.
        let mut tail_indices: Vec<usize> = Vec::new();
        for i in 0..n {
            if self.grid_point(i).abs() >= t_cut - 1e-12 {
                tail_indices.push(i);
            }
        }
        for &i in &tail_indices {
            let t = self.grid_point(i);
            let boundary = i == 0
                || i == n - 1
                || (t < 0.0 && self.grid_point(i + 1).abs() < t_cut - 1e-12)
                || (t > 0.0 && i > 0 && self.grid_point(i - 1).abs() < t_cut - 1e-12);
            let w = if boundary { 0.5 * h } else { h };
            let value = Self::row_level_norm(&self.samples[i], &level_weights);
            acc += w * value.powf(p);
        }
        Ok(acc.powf(1.0 / p))
    }

    /// Zero out the coefficients above the given rank in every sample —
    /// the complement of the finite-rank projection, applied pointwise.
    pub fn project_tail(&self, rank: usize) -> Self {
        let samples = self
            .samples
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .map(|(idx, x)| if idx < rank { 0.0 } else { *x })
                    .collect()
            })
            .collect();
        Self {
            half_width: self.half_width,
            samples,
            weight: Arc::clone(&self.weight),
            derivative_budget: self.derivative_budget,
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let samples = self
            .samples
            .iter()
            .map(|row| row.iter().map(|x| factor * x).collect())
            .collect();
        Self {
            half_width: self.half_width,
            samples,
            weight: Arc::clone(&self.weight),
            derivative_budget: self.derivative_budget,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
            .collect();
        Ok(Self {
            half_width: self.half_width,
            samples,
            weight: Arc::clone(&self.weight),
            derivative_budget: self.derivative_budget.min(other.derivative_budget),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scaled(-1.0))
    }

    pub(crate) fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.weight != other.weight {
            return Err(ScError::Contract(
                "paths use different weight functions".into(),
            ));
        }
        if self.samples.len() != other.samples.len()
            || self.truncation() != other.truncation()
            || self.half_width != other.half_width
        {
            return Err(ScError::Contract("paths use different grids".into()));
        }
        Ok(())
    }

    /// Cyclic-free shift (τ_*v)(t) = v(t+τ) for grid-aligned τ; data moved
    /// past ±L is replaced by zero, matching the decaying-path model.
    pub fn shifted(&self, tau: f64) -> Result<Self> {
        let h = self.step();
        let raw = tau / h;
        let steps = raw.round();
        if (raw - steps).abs() > 1e-9 {
            return Err(ScError::Contract(format!(
                "shift τ = {tau} is not aligned to the grid step h = {h}"
            )));
        }
        let steps = steps as i64;
        let p = self.samples.len() as i64;
        let m = self.truncation();
        let samples = (0..p)
            .map(|i| {
                let src = i + steps;
                if (0..p).contains(&src) {
                    self.samples[src as usize].clone()
                } else {
                    vec![0.0; m]
                }
            })
            .collect();
        Ok(Self {
            half_width: self.half_width,
            samples,
            weight: Arc::clone(&self.weight),
            derivative_budget: self.derivative_budget,
        })
    }
}

// ---------------------------------------------------------------------------
// JSON round trips
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct GridPathJson {
    #[serde(rename = "L")]
    half_width: f64,
    #[serde(rename = "P")]
    resolution: usize,
    weight_name: String,
    samples: Vec<Vec<f64>>,
}

impl GridPath {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(GridPathJson {
            half_width: self.half_width,
            resolution: self.samples.len(),
            weight_name: self.weight.name().to_string(),
            samples: self.samples.clone(),
        })
        .expect("plain struct serializes")
    }

    pub fn from_json(value: &serde_json::Value, weight: Arc<WeightFunction>) -> Result<Self> {
        let j: GridPathJson = serde_json::from_value(value.clone())?;
        if j.weight_name != weight.name() {
            return Err(ScError::Contract(format!(
                "path was saved over weight '{}' but '{}' was supplied",
                j.weight_name,
                weight.name()
            )));
        }
        if j.samples.len() != j.resolution {
            return Err(ScError::Contract(
                "sample count must equal the resolution".into(),
            ));
        }
        let samples = j
            .samples
            .into_iter()
            .map(|row| ScaleVector::new(row, Arc::clone(&weight)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_samples(j.half_width, samples)
    }
}

#[derive(Serialize, Deserialize)]
struct LevelSpecJson {
    p: f64,
    deltas: Vec<f64>,
    weight: WeightFunction,
    #[serde(rename = "K")]
    max_level: usize,
}

impl Serialize for LevelSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        LevelSpecJson {
            p: self.p,
            deltas: self.deltas.clone(),
            weight: (*self.weight).clone(),
            max_level: self.max_level(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LevelSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = LevelSpecJson::deserialize(d)?;
        if j.max_level != j.deltas.len().saturating_sub(1) {
            return Err(serde::de::Error::custom(
                "K must equal the index of the last δ entry",
            ));
        }
        LevelSpec::new(j.p, j.deltas, Arc::new(j.weight)).map_err(serde::de::Error::custom)
    }
}
