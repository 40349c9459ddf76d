//! Band-limited Fourier model of loops on the circle, Sobolev-level norms,
//! the shift operator, and the two desk demonstrations that motivate scale
//! calculus: the shift family converges to the identity pointwise (compact-
//! open topology) yet stays at uniform distance √2 from it on the unit ball
//! (norm topology).
//!
//! A loop is stored by its Fourier coefficients v_ℓ for ℓ = −M..M, so
//! v(t) = Σ_ℓ v_ℓ e^{2πiℓt} is 1-periodic by construction and the level-k
//! norm is the exactly computable weighted sum Σ (1+ℓ²)^k |v_ℓ|². Functions
//! that are not band-limited (the discontinuous witness below) live on a
//! uniform sample grid instead, where the left-endpoint Riemann sum is exact
//! for integrands that are constant on grid cells.
//!
//! The pointwise-convergence argument classically passes through density of
//! smooth loops; its discretized analogue here is demonstration by grid and
//! bandwidth refinement, not a proof.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Result, ScError};

/// A loop S¹ → ℂⁿ held as complex Fourier coefficients on modes −M..M.
/// Most uses are scalar (n = 1); n > 1 stores the n coefficients of each
/// mode contiguously.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierLoop {
    bandwidth: usize,
    components: usize,
    modes: Vec<Complex64>,
}

impl FourierLoop {
    pub fn new(bandwidth: usize, modes: Vec<Complex64>) -> Result<Self> {
        Self::with_components(bandwidth, 1, modes)
    }

    pub fn with_components(
        bandwidth: usize,
        components: usize,
        modes: Vec<Complex64>,
    ) -> Result<Self> {
        if components == 0 {
            return Err(ScError::Domain("loops need at least one component".into()));
        }
        let expect = (2 * bandwidth + 1) * components;
        if modes.len() != expect {
            return Err(ScError::Domain(format!(
                "bandwidth {bandwidth} with {components} component(s) needs {expect} \
                 coefficients, got {}",
                modes.len()
            )));
        }
        Ok(Self {
            bandwidth,
            components,
            modes,
        })
    }

    pub fn zero(bandwidth: usize) -> Self {
        Self {
            bandwidth,
            components: 1,
            modes: vec![Complex64::new(0.0, 0.0); 2 * bandwidth + 1],
        }
    }

    /// The constant loop t ↦ c (mode 0 only).
    pub fn constant(c: Complex64) -> Self {
        Self {
            bandwidth: 0,
            components: 1,
            modes: vec![c],
        }
    }

    /// The single-mode loop t ↦ amplitude · e^{2πiℓt}.
    pub fn single_mode(ell: i64, amplitude: Complex64) -> Self {
        let bandwidth = ell.unsigned_abs() as usize;
        let mut v = Self::zero(bandwidth);
        *v.mode_mut(ell) = amplitude;
        v
    }

    /// Random loop with independent standard-normal real and imaginary
    /// parts on every mode.
    pub fn random(bandwidth: usize, rng: &mut impl Rng) -> Self {
        let modes = (0..2 * bandwidth + 1)
            .map(|_| Complex64::new(standard_normal(rng), standard_normal(rng)))
            .collect();
        Self {
            bandwidth,
            components: 1,
            modes,
        }
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn modes(&self) -> &[Complex64] {
        &self.modes
    }

    fn idx(&self, ell: i64, component: usize) -> usize {
        debug_assert!(ell.unsigned_abs() as usize <= self.bandwidth);
        ((ell + self.bandwidth as i64) as usize) * self.components + component
    }

    /// Coefficient of mode ℓ (scalar loops).
    pub fn mode(&self, ell: i64) -> Complex64 {
        if ell.unsigned_abs() as usize > self.bandwidth {
            return Complex64::new(0.0, 0.0);
        }
        self.modes[self.idx(ell, 0)]
    }

    pub fn mode_mut(&mut self, ell: i64) -> &mut Complex64 {
        let i = self.idx(ell, 0);
        &mut self.modes[i]
    }

    fn mode_indices(&self) -> impl Iterator<Item = i64> + '_ {
        -(self.bandwidth as i64)..=self.bandwidth as i64
    }

    /// Pointwise evaluation Σ_ℓ v_ℓ e^{2πiℓt} of a scalar loop.
    pub fn eval(&self, t: f64) -> Complex64 {
        debug_assert!(self.components == 1, "eval is for scalar loops");
        let mut acc = Complex64::new(0.0, 0.0);
        for ell in self.mode_indices() {
            let phase = Complex64::from_polar(1.0, 2.0 * PI * ell as f64 * t);
            acc += self.modes[self.idx(ell, 0)] * phase;
        }
        acc
    }

    /// Level-k Sobolev norm (Σ_ℓ (1+ℓ²)^k |v_ℓ|²)^{1/2}; nondecreasing in k.
    pub fn sobolev_norm(&self, level: usize) -> f64 {
        let mut acc = 0.0;
        for ell in self.mode_indices() {
            let w = (1.0 + (ell * ell) as f64).powi(level as i32);
            for c in 0..self.components {
                acc += w * self.modes[self.idx(ell, c)].norm_sqr();
            }
        }
        acc.sqrt()
    }

    pub fn l2_norm(&self) -> f64 {
        self.sobolev_norm(0)
    }

    /// The shift (τ_*v)(t) = v(t+τ): mode ℓ picks up the phase e^{2πiℓτ}.
    /// Preserves every Sobolev level exactly.
    pub fn shifted(&self, tau: f64) -> Self {
        let mut out = self.clone();
        for ell in self.mode_indices() {
            let phase = Complex64::from_polar(1.0, 2.0 * PI * ell as f64 * tau);
            for c in 0..self.components {
                let i = self.idx(ell, c);
                out.modes[i] = self.modes[i] * phase;
            }
        }
        out
    }

    /// Spectral derivative v′: mode ℓ multiplied by 2πiℓ. Exact for the
    /// band-limited model at every order.
    pub fn derivative(&self) -> Self {
        let mut out = self.clone();
        for ell in self.mode_indices() {
            let factor = Complex64::new(0.0, 2.0 * PI * ell as f64);
            for c in 0..self.components {
                let i = self.idx(ell, c);
                out.modes[i] = self.modes[i] * factor;
            }
        }
        out
    }

    pub fn derivative_n(&self, order: usize) -> Self {
        let mut out = self.clone();
        for _ in 0..order {
            out = out.derivative();
        }
        out
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for m in &mut out.modes {
            *m *= factor;
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let mut out = self.clone();
        for (a, b) in out.modes.iter_mut().zip(&other.modes) {
            *a += b;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let mut out = self.clone();
        for (a, b) in out.modes.iter_mut().zip(&other.modes) {
            *a -= b;
        }
        Ok(out)
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if self.bandwidth != other.bandwidth || self.components != other.components {
            return Err(ScError::Contract(format!(
                "loop shapes differ: bandwidth {} vs {}, components {} vs {}",
                self.bandwidth, other.bandwidth, self.components, other.components
            )));
        }
        Ok(())
    }

    /// Sample the loop on the uniform grid t_j = j/resolution.
    pub fn to_grid(&self, resolution: usize) -> GridLoop {
        let samples = (0..resolution)
            .map(|j| self.eval(j as f64 / resolution as f64))
            .collect();
        GridLoop {
            resolution,
            samples,
        }
    }
}

// Box-Muller; avoids pulling rand_distr for one distribution.
pub(crate) fn standard_normal(rng: &mut impl Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

/// A 1-periodic function held by its samples at t_j = j/P, j = 0..P−1.
/// Used for functions that are not band-limited; the quadrature norm is the
/// uniform Riemann sum with weight 1/P, which is exact for functions that
/// are constant on the grid cells [j/P, (j+1)/P).
#[derive(Debug, Clone, PartialEq)]
pub struct GridLoop {
    resolution: usize,
    samples: Vec<Complex64>,
}

impl GridLoop {
    pub fn new(samples: Vec<Complex64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(ScError::Domain(
                "grid loops need at least one sample".into(),
            ));
        }
        Ok(Self {
            resolution: samples.len(),
            samples,
        })
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    /// Quadrature L² norm (Σ_j |v(t_j)|² / P)^{1/2}.
    pub fn quadrature_l2_norm(&self) -> f64 {
        let acc: f64 = self.samples.iter().map(|s| s.norm_sqr()).sum();
        (acc / self.resolution as f64).sqrt()
    }

    /// Cyclic shift by τ; requires τ·P to be an integer so the rotated
    /// samples are again exact values of the shifted function.
    pub fn shifted(&self, tau: f64) -> Result<Self> {
        let steps = grid_steps(tau, self.resolution)?;
        let p = self.resolution;
        let samples = (0..p).map(|j| self.samples[(j + steps) % p]).collect();
        Ok(Self {
            resolution: p,
            samples,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.resolution != other.resolution {
            return Err(ScError::Contract(format!(
                "grid resolutions differ: {} vs {}",
                self.resolution, other.resolution
            )));
        }
        Ok(Self {
            resolution: self.resolution,
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// Discrete Fourier analysis up to the requested bandwidth. When
    /// P < 2M+1 the coefficients alias and the result is flagged.
    pub fn to_fourier(&self, bandwidth: usize) -> FourierAnalysis {
        let p = self.resolution;
        let mut modes = Vec::with_capacity(2 * bandwidth + 1);
        for ell in -(bandwidth as i64)..=bandwidth as i64 {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, s) in self.samples.iter().enumerate() {
                let phase =
                    Complex64::from_polar(1.0, -2.0 * PI * ell as f64 * j as f64 / p as f64);
                acc += s * phase;
            }
            modes.push(acc / p as f64);
        }
        FourierAnalysis {
            loop_: FourierLoop {
                bandwidth,
                components: 1,
                modes,
            },
            aliased: p < 2 * bandwidth + 1,
        }
    }
}

/// Result of grid → Fourier analysis together with its sampling metadata.
#[derive(Debug, Clone)]
pub struct FourierAnalysis {
    pub loop_: FourierLoop,
    /// True when the grid resolution was below Nyquist (P < 2M+1) and the
    /// recovered coefficients are aliased.
    pub aliased: bool,
}

impl FourierAnalysis {
    pub fn into_loop(self) -> FourierLoop {
        self.loop_
    }
}

fn grid_steps(tau: f64, resolution: usize) -> Result<usize> {
    let raw = tau * resolution as f64;
    let rounded = raw.round();
    if (raw - rounded).abs() > 1e-9 {
        return Err(ScError::Contract(format!(
            "shift τ = {tau} is not aligned to the grid: τ·P = {raw} must be an integer \
             (granularity 1/{resolution})"
        )));
    }
    Ok((rounded.rem_euclid(resolution as f64)) as usize)
}

/// The norm-topology discontinuity witness: the step function
/// v_τ = √(2/τ) on [1−τ/2, 1) and 0 on [0, 1−τ/2), of unit L² norm, whose
/// shift defect ‖Ψ_τ v_τ − v_τ‖ equals √2 for every 0 < τ ≤ 1/2.
#[derive(Debug, Clone)]
pub struct DiscontinuityWitness {
    pub witness: GridLoop,
    /// Quadrature L² norm of the witness (→ 1, exactly on aligned grids).
    pub norm: f64,
    /// Quadrature L² norm of Ψ_τ v_τ − v_τ (→ √2, exactly on aligned grids).
    pub defect: f64,
}

/// Build the witness on a grid of the given resolution. Both τ·P and
/// (τ/2)·P must be integers so the step edge and the shift are grid aligned
/// and the Riemann sums are exact.
pub fn discontinuity_witness(tau: f64, resolution: usize) -> Result<DiscontinuityWitness> {
    if !(tau > 0.0 && tau <= 0.5) {
        return Err(ScError::Domain(format!(
            "the witness is defined for 0 < τ ≤ 1/2, got {tau}"
        )));
    }
    let p = resolution;
    let half_span = tau / 2.0 * p as f64;
    if (half_span - half_span.round()).abs() > 1e-9 {
        return Err(ScError::Contract(format!(
            "(τ/2)·P = {half_span} must be an integer so the step edge is grid aligned"
        )));
    }
    let half_span = half_span.round() as usize;
    let height = (2.0 / tau).sqrt();
    let mut samples = vec![Complex64::new(0.0, 0.0); p];
    for s in samples.iter_mut().skip(p - half_span) {
        *s = Complex64::new(height, 0.0);
    }
    let witness = GridLoop {
        resolution: p,
        samples,
    };
    let norm = witness.quadrature_l2_norm();
    let defect = witness.shifted(tau)?.sub(&witness)?.quadrature_l2_norm();
    Ok(DiscontinuityWitness {
        witness,
        norm,
        defect,
    })
}

/// One row of a compact-open decay table.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DecayRow {
    pub tau: f64,
    /// ‖Ψ_τ v − v‖_{L²} = (Σ_ℓ |e^{2πiℓτ}−1|² |v_ℓ|²)^{1/2}, in closed form.
    pub defect: f64,
    /// The Lipschitz majorant 2πτ·(Σ ℓ²|v_ℓ|²)^{1/2} = τ·‖v′‖_{L²}.
    pub bound: f64,
}

/// Pointwise (compact-open) convergence of the shift family to the
/// identity: for a fixed band-limited loop the defect ‖Ψ_τ v − v‖ decays to
/// zero with τ, and is dominated by τ·‖v′‖ throughout.
pub fn compact_open_decay(v: &FourierLoop, taus: &[f64]) -> Vec<DecayRow> {
    let mut deriv_sq = 0.0;
    for ell in -(v.bandwidth as i64)..=v.bandwidth as i64 {
        for c in 0..v.components {
            deriv_sq += ((ell * ell) as f64) * v.modes[v.idx(ell, c)].norm_sqr();
        }
    }
    let deriv_mass = deriv_sq.sqrt();
    taus.iter()
        .map(|&tau| {
            let mut acc = 0.0;
            for ell in -(v.bandwidth as i64)..=v.bandwidth as i64 {
                // |e^{2πiℓτ} − 1| = 2|sin(πℓτ)|
                let gap = 2.0 * (PI * ell as f64 * tau).sin();
                for c in 0..v.components {
                    acc += gap * gap * v.modes[v.idx(ell, c)].norm_sqr();
                }
            }
            DecayRow {
                tau,
                defect: acc.sqrt(),
                bound: 2.0 * PI * tau * deriv_mass,
            }
        })
        .collect()
}

/// CSV mirror of a decay table: columns tau, defect.
pub fn decay_table_csv(rows: &[DecayRow]) -> String {
    let mut out = String::from("tau,defect\n");
    for r in rows {
        out.push_str(&format!("{},{}\n", r.tau, r.defect));
    }
    out
}

// ---------------------------------------------------------------------------
// JSON round trips
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct FourierLoopJson {
    bandwidth: usize,
    modes: Vec<[f64; 2]>,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    components: usize,
}

fn one() -> usize {
    1
}

fn is_one(v: &usize) -> bool {
    *v == 1
}

impl Serialize for FourierLoop {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FourierLoopJson {
            bandwidth: self.bandwidth,
            modes: self.modes.iter().map(|m| [m.re, m.im]).collect(),
            components: self.components,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FourierLoop {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = FourierLoopJson::deserialize(d)?;
        FourierLoop::with_components(
            j.bandwidth,
            j.components,
            j.modes
                .iter()
                .map(|[re, im]| Complex64::new(*re, *im))
                .collect(),
        )
        .map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct GridLoopJson {
    resolution: usize,
    samples: Vec<[f64; 2]>,
}

impl Serialize for GridLoop {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GridLoopJson {
            resolution: self.resolution,
            samples: self.samples.iter().map(|m| [m.re, m.im]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GridLoop {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = GridLoopJson::deserialize(d)?;
        if j.samples.len() != j.resolution {
            return Err(serde::de::Error::custom(
                "sample count must equal resolution",
            ));
        }
        GridLoop::new(
            j.samples
                .iter()
                .map(|[re, im]| Complex64::new(*re, *im))
                .collect(),
        )
        .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use crate::tolerances;

    const SQRT_2: f64 = std::f64::consts::SQRT_2;

    #[test]
    fn sobolev_norm_frozen_values() {
        let constant = FourierLoop::constant(Complex64::new(1.0, 0.0));
        for k in 0..5 {
            assert_eq!(constant.sobolev_norm(k), 1.0);
        }
        let mode1 = FourierLoop::single_mode(1, Complex64::new(1.0, 0.0));
        assert!((mode1.sobolev_norm(1) - SQRT_2).abs() < 1e-15);
        let mode2 = FourierLoop::single_mode(2, Complex64::new(1.0, 0.0));
        assert!((mode2.sobolev_norm(2) - 5.0).abs() < 1e-15);
    }

    #[test]
    fn shift_phases_and_periodicity() {
        let v = FourierLoop::single_mode(1, Complex64::new(1.0, 0.0));
        assert_eq!(v.shifted(0.0), v);
        let negated = v.shifted(0.5);
        assert!((negated.mode(1) - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
        let full_turn = v.shifted(1.0);
        assert!((full_turn.mode(1) - v.mode(1)).norm() < 1e-12);
    }

    #[test]
    fn grid_shift_rotates_samples() {
        let samples: Vec<Complex64> = (0..8).map(|j| Complex64::new(j as f64, 0.0)).collect();
        let v = GridLoop::new(samples).unwrap();
        assert_eq!(v.shifted(0.0).unwrap(), v);
        assert_eq!(v.shifted(1.0).unwrap(), v);
        let rotated = v.shifted(0.25).unwrap();
        assert_eq!(rotated.samples()[0], Complex64::new(2.0, 0.0));
        assert!(matches!(v.shifted(0.3), Err(ScError::Contract(_))));
    }

    #[test]
    fn witness_norm_one_defect_sqrt_two() {
        // The integrands are constant on grid cells, so the Riemann sums
        // reproduce the closed-form integrals exactly.
        for (tau, p) in [(0.5, 8), (0.25, 8), (0.125, 64), (0.5, 64)] {
            let w = discontinuity_witness(tau, p).unwrap();
            assert!((w.norm - 1.0).abs() < 1e-12, "norm at tau={tau}");
            assert!((w.defect - SQRT_2).abs() < 1e-12, "defect at tau={tau}");
        }
    }

    #[test]
    fn witness_preconditions() {
        assert!(matches!(
            discontinuity_witness(0.6, 64),
            Err(ScError::Domain(_))
        ));
        // τ/2·P = 1.6 is not an integer
        assert!(matches!(
            discontinuity_witness(0.1, 32),
            Err(ScError::Contract(_))
        ));
    }

    #[test]
    fn compact_open_closed_form() {
        let constant = FourierLoop::constant(Complex64::new(3.0, -1.0));
        for row in compact_open_decay(&constant, &[0.5, 0.25, 0.1]) {
            assert_eq!(row.defect, 0.0);
        }

        let mode1 = FourierLoop::single_mode(1, Complex64::new(1.0, 0.0));
        let rows = compact_open_decay(&mode1, &[0.5, 0.01]);
        assert!((rows[0].defect - 2.0).abs() < 1e-15);
        let expect = 2.0 * (PI * 0.01).sin().abs();
        assert!((rows[1].defect - expect).abs() < 1e-15);
        for row in &rows {
            assert!(row.defect <= row.bound * (1.0 + 1e-12));
        }
    }

    #[test]
    fn constant_loop_samples_are_constant() {
        let c = Complex64::new(0.3, -0.8);
        for p in [1usize, 5, 16] {
            let grid = FourierLoop::constant(c).to_grid(p);
            assert!(grid.samples().iter().all(|s| (s - c).norm() < 1e-15));
        }
        // and a pure mode samples to its phases
        let grid = FourierLoop::single_mode(1, Complex64::new(1.0, 0.0)).to_grid(8);
        for (j, s) in grid.samples().iter().enumerate() {
            let expect = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / 8.0);
            assert!((s - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn grid_round_trip_recovers_modes() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let v = FourierLoop::random(4, &mut rng);
        let analysis = v.to_grid(16).to_fourier(4);
        assert!(!analysis.aliased);
        let back = analysis.into_loop();
        for ell in -4..=4 {
            assert!((back.mode(ell) - v.mode(ell)).norm() < 1e-10 * v.l2_norm());
        }
        // below Nyquist the analysis flags aliasing
        assert!(v.to_grid(7).to_fourier(4).aliased);
    }

    #[test]
    fn parseval_on_aligned_grids() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let v = FourierLoop::random(5, &mut rng);
        let grid = v.to_grid(11);
        let rel = (grid.quadrature_l2_norm() - v.l2_norm()).abs() / v.l2_norm();
        assert!(rel < tolerances::ROUNDTRIP_REL);
    }

    #[test]
    fn loop_json_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v = FourierLoop::random(3, &mut rng);
        let json = serde_json::to_string(&v).unwrap();
        let back: FourierLoop = serde_json::from_str(&json).unwrap();
        assert_eq!(back, v);

        let g = v.to_grid(9);
        let json = serde_json::to_string(&g).unwrap();
        let back: GridLoop = serde_json::from_str(&json).unwrap();
        assert_eq!(back, g);
    }

    proptest! {
        #[test]
        fn shift_is_isometry_at_all_levels(seed in 0u64..500, tau in -2.0f64..2.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let v = FourierLoop::random(6, &mut rng);
            let shifted = v.shifted(tau);
            for k in 0..4 {
                let a = v.sobolev_norm(k);
                let b = shifted.sobolev_norm(k);
                prop_assert!((a - b).abs() <= tolerances::ISOMETRY_REL * a.max(1.0));
            }
        }

        #[test]
        fn shift_group_law(seed in 0u64..500, sigma in -1.0f64..1.0, tau in -1.0f64..1.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let v = FourierLoop::random(5, &mut rng);
            let twice = v.shifted(tau).shifted(sigma);
            let once = v.shifted(sigma + tau);
            let gap = twice.sub(&once).unwrap().sobolev_norm(0);
            prop_assert!(gap <= tolerances::GROUP_LAW_ABS * v.sobolev_norm(0).max(1.0));
        }
    }
}
