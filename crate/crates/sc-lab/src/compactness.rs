//! Numerical compactness certificates: measured operator norms of the
//! defects between scale inclusions and their finite-rank or domain-truncated
//! approximants, checked against certified decay bounds.
//!
//! The structural fact behind every certificate is that a norm limit of
//! compact operators is compact, so exhibiting approximants whose defect
//! norms decay to zero is the computational shadow of the compactness of the
//! inclusions. Three families are covered:
//!
//! * rank-N spectral cutoffs on the weighted sequence scale, where the
//!   defect norm is exactly f(N+1)^{−1/2} (attained on the basis direction
//!   N+1);
//! * domain truncations of exponentially weighted paths, bounded by
//!   e^{−δT};
//! * pointwise rank-N cutoffs on paths with values in the weighted scale,
//!   bounded by f(N+1)^{−1/2} relative to the weighted H₁-valued norm.
//!
//! A widely quoted form of the first two estimates states the cutoff bound
//! with constant 1/f(N). The extremal basis vector shows the sharp constant
//! is f(N+1)^{−1/2}, which exceeds 1/f(N) for e.g. f(ν) = ν² and N ≥ 2, so
//! certificates record both constants and pass/fail against the sharp
//! derived one; the tabulated comparison flags where the 1/f(N) form fails.
//!
//! Density rationale (why finite truncations probe the scale faithfully):
//! finitely supported sequences are dense in every weighted level, and
//! smooth compactly supported paths with finitely supported values are
//! dense in every intersection space, so the truncated models used here
//! exhaust the spaces the certificates speak about. This is documentation,
//! not something the certificates compute.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ScError};
use crate::loops::standard_normal;
use crate::paths::{CutoffProfile, GridPath};
use crate::tolerances::CERT_SLACK_REL;
use crate::weights::{ScaleVector, WeightFunction};

/// A diagonal operator between two levels of one weighted scale.
/// Its operator norm is sup_ν |d_ν|·f(ν)^{(target−source)/2}, computable
/// exactly over the represented indices.
#[derive(Debug, Clone)]
pub struct DiagonalOperator {
    diagonal: Vec<f64>,
    source_level: usize,
    target_level: usize,
    weight: Arc<WeightFunction>,
}

impl DiagonalOperator {
    pub fn new(
        diagonal: Vec<f64>,
        source_level: usize,
        target_level: usize,
        weight: Arc<WeightFunction>,
    ) -> Result<Self> {
        if diagonal.is_empty() {
            return Err(ScError::Domain(
                "diagonal operators need at least one entry".into(),
            ));
        }
        Ok(Self {
            diagonal,
            source_level,
            target_level,
            weight,
        })
    }

    /// Identity on the first `dim` coordinates between equal levels.
    pub fn identity(dim: usize, level: usize, weight: Arc<WeightFunction>) -> Result<Self> {
        Self::new(vec![1.0; dim], level, level, weight)
    }

    /// The defect Id − π_N of the rank-N cutoff, represented on `dim`
    /// coordinates, viewed from level `source` to level `target`.
    pub fn projection_defect_operator(
        rank: usize,
        dim: usize,
        source_level: usize,
        target_level: usize,
        weight: Arc<WeightFunction>,
    ) -> Result<Self> {
        if dim <= rank {
            return Err(ScError::Contract(format!(
                "the representation must extend past the rank ({dim} ≤ {rank})"
            )));
        }
        let diagonal = (0..dim).map(|i| if i < rank { 0.0 } else { 1.0 }).collect();
        Self::new(diagonal, source_level, target_level, weight)
    }

    pub fn source_level(&self) -> usize {
        self.source_level
    }

    pub fn target_level(&self) -> usize {
        self.target_level
    }

    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    pub fn weight(&self) -> &Arc<WeightFunction> {
        &self.weight
    }

    pub fn apply(&self, x: &ScaleVector) -> Result<ScaleVector> {
        if x.weight() != &self.weight {
            return Err(ScError::Contract(
                "operator and vector use different weight functions".into(),
            ));
        }
        let coeffs = (0..x.truncation().max(self.diagonal.len()))
            .map(|i| {
                self.diagonal.get(i).copied().unwrap_or(0.0)
                    * x.coefficients().get(i).copied().unwrap_or(0.0)
            })
            .collect();
        ScaleVector::new(coeffs, Arc::clone(&self.weight))
    }

    /// Exact operator norm over the represented indices:
    /// max_ν |d_ν| f(ν)^{(target−source)/2}, attained on a basis direction.
    pub fn exact_norm(&self) -> (f64, usize) {
        let fs = self.weight.values_upto(self.diagonal.len());
        let shift = (self.target_level as f64 - self.source_level as f64) / 2.0;
        let mut best = (0.0f64, 1usize);
        for (i, (d, f)) in self.diagonal.iter().zip(&fs).enumerate() {
            let gain = d.abs() * f.powf(shift);
            if gain > best.0 {
                best = (gain, i + 1);
            }
        }
        best
    }
}

/// Certified lower bound for an operator norm between two represented
/// levels, from scanning all basis directions plus random unit vectors.
#[derive(Debug, Clone)]
pub struct NormEstimate {
    pub lower_bound: f64,
    pub witness: ScaleVector,
}

/// Maximize ‖A x‖_target / ‖x‖_source over every basis direction and
/// `trials` random Gaussian vectors normalized in the source-level norm.
/// For diagonal operators the basis scan already attains the exact norm;
/// in general the result is a certified lower bound.
pub fn operator_norm_estimate(
    op: &DiagonalOperator,
    trials: usize,
    seed: u64,
) -> Result<NormEstimate> {
    let dim = op.dim();
    let mut best: Option<(f64, ScaleVector)> = None;
    let mut consider = |x: ScaleVector| -> Result<()> {
        let denom = x.norm_at_level(op.source_level());
        if denom == 0.0 {
            return Ok(());
        }
        let quotient = op.apply(&x)?.norm_at_level(op.target_level()) / denom;
        if best.as_ref().is_none_or(|(b, _)| quotient > *b) {
            best = Some((quotient, x));
        }
        Ok(())
    };
    for i in 1..=dim {
        consider(ScaleVector::basis(i, 0, Arc::clone(op.weight()))?)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let coeffs: Vec<f64> = (0..dim).map(|_| standard_normal(&mut rng)).collect();
        consider(ScaleVector::new(coeffs, Arc::clone(op.weight()))?)?;
    }
    let (lower_bound, witness) = best.expect("dim ≥ 1 provides a candidate");
    Ok(NormEstimate {
        lower_bound,
        witness,
    })
}

/// Exact defect of the rank-N cutoff as an operator from the weighted level
/// into the unweighted one.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ProjectionDefect {
    pub rank: usize,
    /// The exact operator norm f(N+1)^{−1/2}, attained on basis direction
    /// N+1 (nondecreasing weights push the supremum to the first cut
    /// coordinate).
    pub exact: f64,
    /// The frequently quoted constant 1/f(N), tabulated for comparison.
    pub paper_bound: f64,
    /// Whether the exact norm respects the 1/f(N) form.
    pub paper_bound_holds: bool,
}

/// Exact operator norm of Id − π_N from the level-1 space to level 0.
pub fn projection_defect_norm(rank: usize, weight: &WeightFunction) -> Result<ProjectionDefect> {
    if rank == 0 {
        return Err(ScError::Domain("the cutoff rank must be at least 1".into()));
    }
    let exact = weight.eval(rank + 1)?.powf(-0.5);
    let paper_bound = 1.0 / weight.eval(rank)?;
    Ok(ProjectionDefect {
        rank,
        exact,
        paper_bound,
        paper_bound_holds: exact <= paper_bound * (1.0 + CERT_SLACK_REL),
    })
}

/// A decay experiment: per parameter the worst measured defect, the derived
/// bound it must respect, and the 1/f(N)-style reference where one exists.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecayCertificate {
    pub kind: String,
    pub params: Vec<f64>,
    pub measured: Vec<f64>,
    pub bound_paper: Vec<f64>,
    pub bound_derived: Vec<f64>,
    pub pass: bool,
    /// Norm gaps ‖I^{N_i} − I^{N_{i+1}}‖ between consecutive approximants —
    /// the Cauchy-in-norm record behind the limit argument.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cauchy_gaps: Option<Vec<f64>>,
}

impl DecayCertificate {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("param,measured,bound_paper,bound_derived\n");
        for i in 0..self.params.len() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                self.params[i], self.measured[i], self.bound_paper[i], self.bound_derived[i]
            ));
        }
        out
    }

    fn decays(values: &[f64]) -> bool {
        values
            .windows(2)
            .all(|w| w[1] <= w[0] * (1.0 + CERT_SLACK_REL))
    }
}

/// Certificate for the rank cutoffs on the sequence scale: exact defect
/// norms, strictly decaying, with the 1/f(N) reference tabulated.
pub fn projection_defect_sweep(
    ranks: &[usize],
    weight: &Arc<WeightFunction>,
) -> Result<DecayCertificate> {
    if ranks.is_empty() {
        return Err(ScError::Contract("the rank list must be nonempty".into()));
    }
    if ranks.windows(2).any(|w| w[1] <= w[0]) {
        return Err(ScError::Contract(
            "the rank list must be strictly increasing".into(),
        ));
    }
    let mut params = Vec::new();
    let mut measured = Vec::new();
    let mut bound_paper = Vec::new();
    let mut bound_derived = Vec::new();
    for &n in ranks {
        let defect = projection_defect_norm(n, weight)?;
        params.push(n as f64);
        measured.push(defect.exact);
        bound_paper.push(defect.paper_bound);
        bound_derived.push(defect.exact);
    }
    // ‖I^N − I^{N'}‖ for N < N' is the norm of the projection onto the
    // coordinates N+1..N', again attained at the first index: f(N+1)^{−1/2}.
    let cauchy_gaps = ranks
        .windows(2)
        .map(|w| weight.eval(w[0] + 1).map(|f| f.powf(-0.5)))
        .collect::<Result<Vec<_>>>()?;
    let pass = DecayCertificate::decays(&measured) && DecayCertificate::decays(&cauchy_gaps);
    Ok(DecayCertificate {
        kind: "finite-rank-defect".into(),
        params,
        measured,
        bound_paper,
        bound_derived,
        pass,
        cauchy_gaps: Some(cauchy_gaps),
    })
}

/// Certificate for domain truncation on weighted paths: for every sample
/// path and every cut T the tail mass beyond ±T must stay below
/// e^{−δT}·‖v‖_{W^{1,p}_δ}. The recorded `measured` value per T is the worst
/// tail-to-norm ratio over the samples; the bound columns hold e^{−δT}.
pub fn truncation_defect(
    t_values: &[f64],
    delta: f64,
    p: f64,
    samples: &[GridPath],
    beta: &CutoffProfile,
) -> Result<DecayCertificate> {
    if samples.is_empty() {
        return Err(ScError::Contract("the sample list must be nonempty".into()));
    }
    if t_values.is_empty() || t_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(ScError::Contract(
            "the T list must be nonempty and increasing".into(),
        ));
    }
    if t_values[0] < 1.0 {
        return Err(ScError::Domain(
            "the tail estimate needs T ≥ 1 so the exponential weight is in force".into(),
        ));
    }
    if delta <= 0.0 || !delta.is_finite() {
        return Err(ScError::Domain(
            "the truncation certificate needs δ > 0".into(),
        ));
    }
    let mut params = Vec::new();
    let mut measured = Vec::new();
    let mut bounds = Vec::new();
    let mut pass = true;
    for &t_cut in t_values {
        let bound = (-delta * t_cut).exp();
        let mut worst = 0.0f64;
        for v in samples {
            let tail = v.tail_mass(t_cut, p)?;
            let weighted = v.wkp_delta_norm(1, p, delta, 0, beta)?;
            if weighted == 0.0 {
                continue;
            }
            let ratio = tail / weighted;
            if ratio > bound * (1.0 + CERT_SLACK_REL) {
                pass = false;
            }
            worst = worst.max(ratio);
        }
        params.push(t_cut);
        measured.push(worst);
        bounds.push(bound);
    }
    pass = pass && DecayCertificate::decays(&measured);
    Ok(DecayCertificate {
        kind: "domain-truncation-defect".into(),
        params,
        measured,
        bound_paper: bounds.clone(),
        bound_derived: bounds,
        pass,
        cauchy_gaps: None,
    })
}

/// Certificate for pointwise rank cutoffs on paths with values in the
/// weighted scale: ‖(Id−π_N)∘v‖_{L^p(ℝ,H₀)} against the derived bound
/// f(N+1)^{−1/2}·‖v‖_{L^p_δ(ℝ,H₁)} per sample, with the 1/f(N) reference
/// tabulated alongside. `measured` records the worst defect-to-norm ratio.
pub fn floer_projection_defect(
    ranks: &[usize],
    delta: f64,
    p: f64,
    samples: &[GridPath],
    beta: &CutoffProfile,
) -> Result<DecayCertificate> {
    if samples.is_empty() {
        return Err(ScError::Contract("the sample list must be nonempty".into()));
    }
    if ranks.is_empty() || ranks.windows(2).any(|w| w[1] <= w[0]) {
        return Err(ScError::Contract(
            "the rank list must be nonempty and increasing".into(),
        ));
    }
    let weight = Arc::clone(samples[0].weight());
    for v in samples {
        if v.weight() != &weight {
            return Err(ScError::Contract(
                "samples must share one weight function".into(),
            ));
        }
        if v.truncation() <= *ranks.last().expect("nonempty") {
            return Err(ScError::Contract(format!(
                "sample truncation {} does not extend past the largest rank {}",
                v.truncation(),
                ranks.last().expect("nonempty")
            )));
        }
    }
    let mut params = Vec::new();
    let mut measured = Vec::new();
    let mut bound_paper = Vec::new();
    let mut bound_derived = Vec::new();
    let mut pass = true;
    for &n in ranks {
        let derived = weight.eval(n + 1)?.powf(-0.5);
        let paper = 1.0 / weight.eval(n)?;
        let mut worst = 0.0f64;
        for v in samples {
            let defect = v.project_tail(n).wkp_delta_norm(0, p, 0.0, 0, beta)?;
            let weighted_h1 = v.wkp_delta_norm(0, p, delta, 1, beta)?;
            if weighted_h1 == 0.0 {
                continue;
            }
            let ratio = defect / weighted_h1;
            if ratio > derived * (1.0 + CERT_SLACK_REL) {
                pass = false;
            }
            worst = worst.max(ratio);
        }
        params.push(n as f64);
        measured.push(worst);
        bound_paper.push(paper);
        bound_derived.push(derived);
    }
    pass = pass && DecayCertificate::decays(&measured);
    Ok(DecayCertificate {
        kind: "floer-projection-defect".into(),
        params,
        measured,
        bound_paper,
        bound_derived,
        pass,
        cauchy_gaps: None,
    })
}
