//! Paths in ℂ with real-line boundary conditions on all derivatives up to a
//! declared level, the doubling map that turns them into loops symmetric
//! about the real axis, and the halving inverse.
//!
//! The level-k space consists of paths γ: [0,1] → ℂ with γ^{(ℓ)}(0) and
//! γ^{(ℓ)}(1) in i^ℓ·ℝ for ℓ = 0..k. Reflect-and-conjugate doubling,
//! Γ(t) = γ(2t) on the first half and conj γ(2−2t) on the second, produces a
//! loop with Γ(t) = conj Γ(1−t), which in Fourier terms means all
//! coefficients are real. Sorting the loop weights (1+ℓ²) over ℓ ∈ ℤ into a
//! single nondecreasing list recovers a weight equivalent to ν², so this
//! model is a fractal sequence scale in disguise.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ScError};
use crate::loops::{FourierLoop, GridLoop};
use crate::stencil::fd_weights;
use crate::tolerances::{ENDPOINT_REAL_ABS, SYMMETRY_DEFECT_ABS};

/// A path [0,1] → ℂ on a uniform grid of P points including both endpoints,
/// with a declared boundary-condition level. The declared level is metadata;
/// [`boundary_residuals`] measures how well the samples honor it.
#[derive(Debug, Clone, PartialEq)]
pub struct LagPath {
    samples: Vec<Complex64>,
    level: usize,
}

impl LagPath {
    pub fn new(samples: Vec<Complex64>, level: usize) -> Result<Self> {
        if samples.len() < 2 {
            return Err(ScError::Domain("paths need at least two samples".into()));
        }
        Ok(Self { samples, level })
    }

    /// Sample an analytic path on the uniform grid t_i = i/(P−1).
    pub fn sample(resolution: usize, level: usize, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        if resolution < 2 {
            return Err(ScError::Domain("paths need at least two samples".into()));
        }
        let samples = (0..resolution)
            .map(|i| f(i as f64 / (resolution - 1) as f64))
            .collect();
        Ok(Self { samples, level })
    }

    pub fn resolution(&self) -> usize {
        self.samples.len()
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn step(&self) -> f64 {
        1.0 / (self.samples.len() - 1) as f64
    }
}

/// A loop flagged as symmetric about the real axis, together with the
/// measured size of the claim's violation (the largest imaginary part among
/// its Fourier coefficients).
#[derive(Debug, Clone)]
pub struct SymLoop {
    inner: FourierLoop,
    defect: f64,
}

impl SymLoop {
    /// Claim symmetry for a loop; rejected when the coefficient defect
    /// exceeds the default threshold.
    pub fn claim(loop_: FourierLoop) -> Result<Self> {
        Self::claim_with_tol(loop_, SYMMETRY_DEFECT_ABS)
    }

    pub fn claim_with_tol(loop_: FourierLoop, tol: f64) -> Result<Self> {
        let defect = symmetry_defect(&loop_);
        if defect > tol {
            return Err(ScError::Contract(format!(
                "loop is not symmetric about the real axis: coefficient defect {defect} > {tol}"
            )));
        }
        Ok(Self {
            inner: loop_,
            defect,
        })
    }

    pub fn as_loop(&self) -> &FourierLoop {
        &self.inner
    }

    pub fn into_loop(self) -> FourierLoop {
        self.inner
    }

    pub fn defect(&self) -> f64 {
        self.defect
    }
}

/// max_ℓ |Im v_ℓ|: zero exactly when the loop satisfies the time-domain
/// symmetry Γ(t) = conj Γ(1−t).
pub fn symmetry_defect(loop_: &FourierLoop) -> f64 {
    loop_.modes().iter().map(|m| m.im.abs()).fold(0.0, f64::max)
}

/// Largest pointwise violation of Γ(t) = conj Γ(1−t) on a sample grid of
/// the given resolution. Differs from the coefficient defect only by a
/// factor between 2 and 2·(number of modes).
pub fn time_domain_symmetry_defect(loop_: &FourierLoop, resolution: usize) -> f64 {
    (0..resolution)
        .map(|j| {
            let t = j as f64 / resolution as f64;
            (loop_.eval(t) - loop_.eval(1.0 - t).conj()).norm()
        })
        .fold(0.0, f64::max)
}

/// Double a path into the loop Γ(t) = γ(2t) on [0,½], conj γ(2−2t) on
/// [½,1], sampled on 2(P−1) grid points and analyzed into Fourier modes.
///
/// Requires γ(0) and γ(1) real (within tolerance) so the doubled loop is
/// continuous at 0 and ½. When γ honors its declared boundary conditions
/// the resulting coefficients are real up to discretization noise.
pub fn double(path: &LagPath) -> Result<SymLoop> {
    let p = path.samples.len();
    if p < 3 {
        // the doubled grid 2(P−1) must resolve at least one mode alias-free
        return Err(ScError::Contract(format!(
            "doubling needs at least 3 path samples, got {p}"
        )));
    }
    let start = path.samples[0];
    let end = path.samples[p - 1];
    if start.im.abs() > ENDPOINT_REAL_ABS {
        return Err(ScError::Contract(format!(
            "γ(0) = {start} violates the level-0 boundary condition (must be real)"
        )));
    }
    if end.im.abs() > ENDPOINT_REAL_ABS {
        return Err(ScError::Contract(format!(
            "γ(1) = {end} violates the level-0 boundary condition (must be real)"
        )));
    }
    let q = 2 * (p - 1);
    let mut samples = Vec::with_capacity(q);
    for j in 0..q {
        if j < p {
            samples.push(path.samples[j]);
        } else {
            samples.push(path.samples[q - j].conj());
        }
    }
    let grid = GridLoop::new(samples)?;
    let bandwidth = p.saturating_sub(2).max(1);
    let analysis = grid.to_fourier(bandwidth);
    let loop_ = analysis.into_loop();
    let defect = symmetry_defect(&loop_);
    Ok(SymLoop {
        inner: loop_,
        defect,
    })
}

/// Halve a symmetric loop back into the path γ(t) = Γ(t/2) on [0,1],
/// sampled at the requested resolution with the given declared level.
pub fn halve(sym: &SymLoop, resolution: usize, level: usize) -> Result<LagPath> {
    if sym.defect > SYMMETRY_DEFECT_ABS {
        return Err(ScError::Contract(format!(
            "cannot halve an asymmetric loop (defect {})",
            sym.defect
        )));
    }
    LagPath::sample(resolution, level, |t| sym.inner.eval(t / 2.0))
}

/// Which end of the path a residual belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Endpoint {
    Start,
    End,
}

/// Measured violation of the boundary condition γ^{(ℓ)}(endpoint) ∈ i^ℓ·ℝ.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BoundaryResidual {
    pub level: usize,
    pub endpoint: Endpoint,
    pub l: usize,
    pub residual: f64,
    pub stencil_order: usize,
}

/// One-sided finite-difference residuals |Im(γ^{(ℓ)}(endpoint)/i^ℓ)| for
/// ℓ = 0..k at both endpoints. Stencils are order 2 (ℓ+2 points), upgraded
/// to order 4 (ℓ+4 points) when the resolution permits.
pub fn boundary_residuals(path: &LagPath, k: usize) -> Result<Vec<BoundaryResidual>> {
    let p = path.samples.len();
    if p < 2 * k + 2 {
        return Err(ScError::Contract(format!(
            "resolution {p} is too small for order-{k} boundary stencils (need ≥ {})",
            2 * k + 2
        )));
    }
    let h = path.step();
    let mut out = Vec::with_capacity(2 * (k + 1));
    for l in 0..=k {
        let points = if p >= l + 4 { l + 4 } else { l + 2 };
        let stencil_order = points - l;
        let nodes: Vec<f64> = (0..points).map(|i| i as f64 * h).collect();
        let w = fd_weights(0.0, &nodes, l);

        let start: Complex64 = w
            .iter()
            .zip(&path.samples[..points])
            .map(|(w, s)| s * *w)
            .sum();
        // 3-point mirror at t = 1: nodes 1−(points−1)h .. 1
        let end_nodes: Vec<f64> = (0..points)
            .map(|i| 1.0 - (points - 1 - i) as f64 * h)
            .collect();
        let w_end = fd_weights(1.0, &end_nodes, l);
        let end: Complex64 = w_end
            .iter()
            .zip(&path.samples[p - points..])
            .map(|(w, s)| s * *w)
            .sum();

        let inv = inverse_i_power(l);
        out.push(BoundaryResidual {
            level: path.level,
            endpoint: Endpoint::Start,
            l,
            residual: (start * inv).im.abs(),
            stencil_order,
        });
        out.push(BoundaryResidual {
            level: path.level,
            endpoint: Endpoint::End,
            l,
            residual: (end * inv).im.abs(),
            stencil_order,
        });
    }
    Ok(out)
}

fn inverse_i_power(l: usize) -> Complex64 {
    match l % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

// ---------------------------------------------------------------------------
// JSON round trips
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct LagPathJson {
    #[serde(rename = "P")]
    resolution: usize,
    samples: Vec<[f64; 2]>,
    level: usize,
}

impl Serialize for LagPath {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        LagPathJson {
            resolution: self.samples.len(),
            samples: self.samples.iter().map(|z| [z.re, z.im]).collect(),
            level: self.level,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LagPath {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = LagPathJson::deserialize(d)?;
        if j.samples.len() != j.resolution {
            return Err(serde::de::Error::custom("sample count must equal P"));
        }
        LagPath::new(
            j.samples
                .iter()
                .map(|[re, im]| Complex64::new(*re, *im))
                .collect(),
            j.level,
        )
        .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    use crate::tolerances;
    use crate::weights::{weights_equivalent, TableExtension, WeightFunction};

    /// Random loop with real coefficients — an exactly symmetric input.
    fn random_real_loop(bandwidth: usize, rng: &mut impl Rng) -> FourierLoop {
        let mut v = FourierLoop::zero(bandwidth);
        for ell in -(bandwidth as i64)..=bandwidth as i64 {
            *v.mode_mut(ell) = Complex64::new(rng.gen_range(-1.0..1.0), 0.0);
        }
        v
    }

    #[test]
    fn doubling_a_real_constant() {
        let c = 2.5;
        let path = LagPath::sample(64, 0, |_| Complex64::new(c, 0.0)).unwrap();
        let sym = double(&path).unwrap();
        assert!((sym.as_loop().mode(0) - Complex64::new(c, 0.0)).norm() < 1e-12);
        for ell in 1..=5i64 {
            assert!(sym.as_loop().mode(ell).norm() < 1e-12);
        }
        assert!(sym.defect() < 1e-13);
    }

    #[test]
    fn doubling_cosine_gives_half_modes() {
        // γ(t) = cos(πt) doubles to cos(2πt): real coefficients ½ on ±1.
        let path = LagPath::sample(257, 1, |t| Complex64::new((PI * t).cos(), 0.0)).unwrap();
        let sym = double(&path).unwrap();
        assert!((sym.as_loop().mode(1) - Complex64::new(0.5, 0.0)).norm() < 1e-10);
        assert!((sym.as_loop().mode(-1) - Complex64::new(0.5, 0.0)).norm() < 1e-10);
        assert!(sym.defect() < 1e-12);
    }

    #[test]
    fn doubling_imaginary_sine() {
        // γ(t) = i·sin(πt) is compliant (real endpoints, γ′(0) = iπ ∈ iℝ)
        // and doubles to i·sin(2πt) = ½e^{2πit} − ½e^{−2πit}: real
        // coefficients +½ at mode 1 and −½ at mode −1.
        let path = LagPath::sample(257, 1, |t| Complex64::new(0.0, (PI * t).sin())).unwrap();
        let sym = double(&path).unwrap();
        assert!((sym.as_loop().mode(1) - Complex64::new(0.5, 0.0)).norm() < 1e-10);
        assert!((sym.as_loop().mode(-1) - Complex64::new(-0.5, 0.0)).norm() < 1e-10);
        assert!(sym.defect() < 1e-12);
    }

    #[test]
    fn doubling_rejects_complex_endpoints() {
        let path = LagPath::sample(64, 0, |t| Complex64::new(t, 1.0)).unwrap();
        let err = double(&path).unwrap_err();
        assert!(matches!(err, ScError::Contract(_)));
        assert!(err.to_string().contains("γ(0)"));
    }

    #[test]
    fn halving_substitutes_the_argument() {
        let mut v = FourierLoop::zero(1);
        *v.mode_mut(1) = Complex64::new(0.5, 0.0);
        *v.mode_mut(-1) = Complex64::new(0.5, 0.0);
        let sym = SymLoop::claim(v).unwrap();
        let path = halve(&sym, 101, 1).unwrap();
        for (i, s) in path.samples().iter().enumerate() {
            let t = i as f64 / 100.0;
            assert!((s.re - (PI * t).cos()).abs() < 1e-12);
            assert!(s.im.abs() < 1e-12);
        }
    }

    #[test]
    fn round_trips_on_compliant_data() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..10 {
            let gamma = random_real_loop(6, &mut rng);
            let sym = SymLoop::claim(gamma.clone()).unwrap();
            let path = halve(&sym, 256, 3).unwrap();
            let doubled = double(&path).unwrap();
            // double ∘ halve reproduces the coefficients
            for ell in -6..=6i64 {
                let gap = (doubled.as_loop().mode(ell) - gamma.mode(ell)).norm();
                assert!(
                    gap < tolerances::DOUBLING_ROUNDTRIP_ABS,
                    "mode {ell}: {gap}"
                );
            }
            // halve ∘ double reproduces the samples
            let back = halve(&doubled, 256, 3).unwrap();
            for (a, b) in back.samples().iter().zip(path.samples()) {
                assert!((a - b).norm() < tolerances::DOUBLING_ROUNDTRIP_ABS);
            }
        }
    }

    #[test]
    fn symmetry_defect_measures_imaginary_mass() {
        let real = FourierLoop::single_mode(2, Complex64::new(0.7, 0.0));
        assert_eq!(symmetry_defect(&real), 0.0);
        let skew = FourierLoop::single_mode(1, Complex64::new(0.0, 1.0));
        assert_eq!(symmetry_defect(&skew), 1.0);
        assert!(SymLoop::claim(skew).is_err());
    }

    #[test]
    fn coefficient_and_time_domain_defects_are_equivalent() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..10 {
            let mut v = random_real_loop(5, &mut rng);
            // sprinkle imaginary mass on a few modes
            for ell in [-3i64, 0, 2] {
                let old = v.mode(ell);
                *v.mode_mut(ell) = old + Complex64::new(0.0, rng.gen_range(-0.1..0.1));
            }
            let coef = symmetry_defect(&v);
            let time = time_domain_symmetry_defect(&v, 256);
            let mode_count = (2 * v.bandwidth() + 1) as f64;
            assert!(time <= 2.0 * mode_count * coef + 1e-12);
            assert!(coef <= 0.5 * time + 1e-12);
        }
        // exactly real coefficients ⇒ time-domain symmetry to roundoff
        let real = random_real_loop(6, &mut rng);
        let scale: f64 = 1.0 + real.l2_norm();
        assert!(time_domain_symmetry_defect(&real, 128) <= 1e-10 * scale);
    }

    #[test]
    fn residuals_frozen_cases() {
        // real constant: every residual vanishes
        let constant = LagPath::sample(64, 2, |_| Complex64::new(1.25, 0.0)).unwrap();
        for r in boundary_residuals(&constant, 2).unwrap() {
            assert!(r.residual < 1e-12);
        }

        // γ(t) = cos(πt): γ′(0) = 0 ∈ iℝ, compliant at level 1
        let cosine = LagPath::sample(512, 1, |t| Complex64::new((PI * t).cos(), 0.0)).unwrap();
        for r in boundary_residuals(&cosine, 1).unwrap() {
            assert!(
                r.residual < 1e-6,
                "ℓ = {} at {:?}: {}",
                r.l,
                r.endpoint,
                r.residual
            );
        }

        // γ(t) = t: endpoints real (ℓ = 0 fine) but γ′ = 1 ∉ iℝ:
        // the ℓ = 1 residual is exactly 1 (stencils are exact on linears)
        let linear = LagPath::sample(64, 1, |t| Complex64::new(t, 0.0)).unwrap();
        let rs = boundary_residuals(&linear, 1).unwrap();
        for r in &rs {
            match r.l {
                0 => assert!(r.residual < 1e-12),
                1 => assert!((r.residual - 1.0).abs() < 1e-10),
                _ => unreachable!(),
            }
        }
    }

    #[test]
    fn residuals_need_enough_points() {
        let tiny = LagPath::sample(5, 2, |t| Complex64::new(t, 0.0)).unwrap();
        assert!(matches!(
            boundary_residuals(&tiny, 2),
            Err(ScError::Contract(_))
        ));
    }

    #[test]
    fn doubled_compliant_paths_have_small_defect() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..5 {
            let gamma = random_real_loop(8, &mut rng);
            let sym = SymLoop::claim(gamma).unwrap();
            let path = halve(&sym, 512, 2).unwrap();
            let doubled = double(&path).unwrap();
            assert!(doubled.defect() <= tolerances::SYMMETRY_DEFECT_ABS);
            // residuals vanish up to the one-sided stencil truncation
            // error, which scales like (πk)^{ℓ+5}h⁵ for frequency-k data
            for r in boundary_residuals(&path, 2).unwrap() {
                assert!(r.residual < 1e-3, "ℓ = {}: {}", r.l, r.residual);
            }
        }
        // low-frequency compliant data reaches the headline tolerance
        let gamma = random_real_loop(2, &mut rng);
        let path = halve(&SymLoop::claim(gamma).unwrap(), 512, 2).unwrap();
        for r in boundary_residuals(&path, 2).unwrap() {
            assert!(r.residual < 1e-8, "ℓ = {}: {}", r.l, r.residual);
        }
    }

    #[test]
    fn sorted_loop_weights_match_the_square_scale() {
        // Sort (1+ℓ²) over ℓ = 0, ±1, ±2, ... into a table weight and
        // compare with ν² over a finite range: the ratio stabilizes
        // (max 5 at ν = 5), witnessing equivalence of the two models.
        let mut values: Vec<f64> = Vec::new();
        values.push(1.0);
        for l in 1..=40i64 {
            let w = 1.0 + (l * l) as f64;
            values.push(w);
            values.push(w);
        }
        let sorted = WeightFunction::table(
            "sorted-loop-weights",
            values,
            TableExtension::Linear { slope: 1.0 },
        )
        .unwrap();
        let square = WeightFunction::power("nu^2", 2.0).unwrap();
        let eq = weights_equivalent(&square, &sorted, 60).unwrap();
        assert!(eq.stable, "constant kept growing: {}", eq.constant);
        assert!((eq.constant - 5.0).abs() < 1e-12);
    }

    #[test]
    fn doubled_loop_sobolev_norm_stable_under_refinement() {
        // the numerical shadow of "doubling lands one level higher":
        // the level-(k+1) norm of the doubled loop converges as the path
        // grid refines instead of blowing up
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        let gamma = random_real_loop(6, &mut rng);
        let k = 2usize;
        let norm_at = |p: usize| {
            let sym = SymLoop::claim(gamma.clone()).unwrap();
            let path = halve(&sym, p, k).unwrap();
            double(&path).unwrap().as_loop().sobolev_norm(k + 1)
        };
        let coarse = norm_at(128);
        let fine = norm_at(256);
        let finer = norm_at(512);
        assert!((fine - finer).abs() <= (coarse - fine).abs() + 1e-9);
        assert!((finer - coarse).abs() / finer < 1e-6);
    }

    #[test]
    fn lag_path_json_round_trip() {
        let path = LagPath::sample(33, 1, |t| Complex64::new(t, t * t)).unwrap();
        let json = serde_json::to_string(&path).unwrap();
        let back: LagPath = serde_json::from_str(&json).unwrap();
        assert_eq!(back, path);
    }
}
