//! The shift map Ψ(τ, v) = v(·+τ) on loop and path spaces, its iterated
//! scale differentials, and numerical verification machinery.
//!
//! Ψ is linear and norm-preserving in v but loses one derivative per
//! differentiation in τ: the k-th differential at (τ, v) applied to tangent
//! directions (T_1,V_1),...,(T_k,V_k) is
//!
//! ```text
//! τ_*(v^{(k)})·T_1⋯T_k + Σ_j τ_*(V_j^{(k−1)})·T_1⋯T̂_j⋯T_k
//! ```
//!
//! (hat = omit). Every V enters linearly — there are no V·V products — which
//! is why the formula is insensitive to the growth type of the underlying
//! weight. `fd_verify` checks the formula against symmetric finite
//! differences of Ψ itself and estimates the convergence order, which is the
//! numerical substance behind the smoothness claims this crate demonstrates.
//!
//! Two backends share the interface: band-limited loops (shifts and
//! derivatives exact in the Fourier coefficients, any τ allowed) and grid
//! paths (shifts restricted to grid multiples, derivatives by stencils with
//! an explicit budget of trustworthy orders).

use serde::{Deserialize, Serialize};

use crate::error::{Result, ScError};
use crate::loops::FourierLoop;
use crate::paths::{CutoffProfile, GridPath};

/// A loop or a path — the two representations Ψ acts on.
#[derive(Debug, Clone)]
pub enum ShiftTarget {
    Loop(FourierLoop),
    Path(GridPath),
}

impl ShiftTarget {
    pub fn shifted(&self, tau: f64) -> Result<Self> {
        Ok(match self {
            ShiftTarget::Loop(v) => ShiftTarget::Loop(v.shifted(tau)),
            ShiftTarget::Path(p) => ShiftTarget::Path(p.shifted(tau)?),
        })
    }

    pub fn derivative_n(&self, order: usize) -> Result<Self> {
        Ok(match self {
            ShiftTarget::Loop(v) => ShiftTarget::Loop(v.derivative_n(order)),
            ShiftTarget::Path(p) => {
                let mut out = p.clone();
                for _ in 0..order {
                    out = out.weak_derivative()?;
                }
                ShiftTarget::Path(out)
            }
        })
    }

    pub fn scaled(&self, factor: f64) -> Self {
        match self {
            ShiftTarget::Loop(v) => ShiftTarget::Loop(v.scaled(factor)),
            ShiftTarget::Path(p) => ShiftTarget::Path(p.scaled(factor)),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (ShiftTarget::Loop(a), ShiftTarget::Loop(b)) => Ok(ShiftTarget::Loop(a.add(b)?)),
            (ShiftTarget::Path(a), ShiftTarget::Path(b)) => Ok(ShiftTarget::Path(a.add(b)?)),
            _ => Err(ScError::Contract(
                "cannot mix the loop and path representations".into(),
            )),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scaled(-1.0))
    }

    pub fn zero_like(&self) -> Self {
        self.scaled(0.0)
    }

    /// Norm at scale level j: the Sobolev level for loops, the
    /// L²(ℝ, H_j) norm for paths.
    pub fn norm_at_level(&self, j: usize) -> Result<f64> {
        match self {
            ShiftTarget::Loop(v) => Ok(v.sobolev_norm(j)),
            ShiftTarget::Path(p) => p.wkp_delta_norm(0, 2.0, 0.0, j, &CutoffProfile::default()),
        }
    }

    /// How many derivatives the representation supports faithfully.
    /// `None` means unlimited (the band-limited model is entire).
    pub fn regularity(&self) -> Option<usize> {
        match self {
            ShiftTarget::Loop(_) => None,
            ShiftTarget::Path(p) => Some(p.derivative_budget()),
        }
    }

    fn require_regularity(&self, needed: usize, what: &str) -> Result<()> {
        if let Some(budget) = self.regularity() {
            if budget < needed {
                return Err(ScError::Contract(format!(
                    "{what} needs {needed} derivative(s) but the representation budgets {budget}"
                )));
            }
        }
        Ok(())
    }
}

/// A point (τ, v) in the domain ℝ ⊕ E of the shift map. The ℝ factor
/// carries the constant scale structure: all its levels agree.
#[derive(Debug, Clone)]
pub struct ShiftPoint {
    pub tau: f64,
    pub value: ShiftTarget,
}

impl ShiftPoint {
    pub fn new(tau: f64, value: ShiftTarget) -> Self {
        Self { tau, value }
    }

    pub fn loop_point(tau: f64, v: FourierLoop) -> Self {
        Self::new(tau, ShiftTarget::Loop(v))
    }

    pub fn path_point(tau: f64, p: GridPath) -> Self {
        Self::new(tau, ShiftTarget::Path(p))
    }
}

/// A tangent direction (T, V) with V in the same representation as the base
/// value. Tangent pairs add and scale componentwise.
#[derive(Debug, Clone)]
pub struct TangentVector {
    pub tau_dir: f64,
    pub value_dir: ShiftTarget,
}

impl TangentVector {
    pub fn new(tau_dir: f64, value_dir: ShiftTarget) -> Self {
        Self { tau_dir, value_dir }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            tau_dir: factor * self.tau_dir,
            value_dir: self.value_dir.scaled(factor),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            tau_dir: self.tau_dir + other.tau_dir,
            value_dir: self.value_dir.add(&other.value_dir)?,
        })
    }
}

/// Ψ(τ, v) = τ_*v. Linear in v; the identity at τ = 0.
pub fn psi(point: &ShiftPoint) -> Result<ShiftTarget> {
    point.value.shifted(point.tau)
}

/// First scale differential DΨ(τ,v)(T,V) = τ_*(v′)·T + τ_*V.
pub fn d1_psi(point: &ShiftPoint, tv: &TangentVector) -> Result<ShiftTarget> {
    dk_psi(point, std::slice::from_ref(tv))
}

/// Second scale differential
/// D²Ψ(τ,v)((T₁,V₁),(T₂,V₂)) = τ_*v″·T₁T₂ + τ_*V₁′·T₂ + τ_*V₂′·T₁.
/// Bilinear and symmetric; note the absence of any V·V term.
pub fn d2_psi(point: &ShiftPoint, tv1: &TangentVector, tv2: &TangentVector) -> Result<ShiftTarget> {
    dk_psi(point, &[tv1.clone(), tv2.clone()])
}

/// k-th scale differential, k = directions.len():
/// τ_*(v^{(k)})·ΠT_j + Σ_j τ_*(V_j^{(k−1)})·Π_{i≠j}T_i.
/// Multilinear and symmetric under permutations of the directions.
pub fn dk_psi(point: &ShiftPoint, directions: &[TangentVector]) -> Result<ShiftTarget> {
    let k = directions.len();
    if k == 0 {
        return Err(ScError::Domain(
            "the differential order must be at least 1".into(),
        ));
    }
    point.value.require_regularity(k, "the base value")?;
    for (j, tv) in directions.iter().enumerate() {
        tv.value_dir
            .require_regularity(k - 1, &format!("tangent direction {}", j + 1))?;
    }

    let t_product: f64 = directions.iter().map(|tv| tv.tau_dir).product();
    let mut acc = point
        .value
        .derivative_n(k)?
        .shifted(point.tau)?
        .scaled(t_product);
    for (j, tv) in directions.iter().enumerate() {
        let others: f64 = directions
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != j)
            .map(|(_, o)| o.tau_dir)
            .product();
        let term = tv
            .value_dir
            .derivative_n(k - 1)?
            .shifted(point.tau)?
            .scaled(others);
        acc = acc.add(&term)?;
    }
    Ok(acc)
}

/// Tangent map TΨ(point, tv) = (Ψ(point), DΨ(point)tv). Inputs one level
/// of regularity above the output, as the tangent filtration prescribes.
pub fn tangent_map(point: &ShiftPoint, tv: &TangentVector) -> Result<(ShiftTarget, ShiftTarget)> {
    Ok((psi(point)?, d1_psi(point, tv)?))
}

/// Both sides of the chain rule T(Ψ_σ∘Ψ) = TΨ_σ∘TΨ at (point, tv),
/// computed independently; returns the sum of the level-0 norms of the
/// base and tangent discrepancies.
///
/// The outer map Ψ_σ is the fixed shift v ↦ σ_*v, which is linear, so its
/// tangent map is (w, W) ↦ (σ_*w, σ_*W). The composite Ψ_σ∘Ψ is the shift
/// map with offset σ, whose differential is evaluated via `d1_psi` at
/// (τ+σ, v).
pub fn chain_rule_check(sigma: f64, point: &ShiftPoint, tv: &TangentVector) -> Result<f64> {
    let composite_point = ShiftPoint::new(point.tau + sigma, point.value.clone());
    let lhs_base = psi(&composite_point)?;
    let lhs_tangent = d1_psi(&composite_point, tv)?;

    let (base, tangent) = tangent_map(point, tv)?;
    let rhs_base = base.shifted(sigma)?;
    let rhs_tangent = tangent.shifted(sigma)?;

    Ok(lhs_base.sub(&rhs_base)?.norm_at_level(0)?
        + lhs_tangent.sub(&rhs_tangent)?.norm_at_level(0)?)
}

/// Per-level finite-difference errors and the fitted convergence order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FdLevelReport {
    pub j: usize,
    /// ‖FD_ε − D^mΨ‖ at level j, one entry per ε (largest ε first).
    pub errors: Vec<f64>,
    /// Least-squares slope of log error against log ε over the smaller
    /// (asymptotic) half of the ε list; `None` when the errors sit at the
    /// roundoff floor, i.e. the finite difference is exact.
    pub order: Option<f64>,
}

/// Report of a finite-difference verification run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FdReport {
    pub m: usize,
    pub eps: Vec<f64>,
    pub levels: Vec<FdLevelReport>,
    /// True when every level was exact to roundoff, so no order could be
    /// estimated anywhere (e.g. pure-v directions, where Ψ is linear).
    pub degenerate: bool,
}

impl FdReport {
    pub fn max_error(&self) -> f64 {
        self.levels
            .iter()
            .flat_map(|l| l.errors.iter().copied())
            .fold(0.0, f64::max)
    }

    pub fn min_order(&self) -> Option<f64> {
        self.levels
            .iter()
            .filter_map(|l| l.order)
            .min_by(|a, b| a.total_cmp(b))
    }

    /// CSV mirror: one row per (level, ε) pair.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("j,eps,error,order\n");
        for level in &self.levels {
            for (e, err) in self.eps.iter().zip(&level.errors) {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    level.j,
                    e,
                    err,
                    level.order.map_or(String::new(), |o| o.to_string())
                ));
            }
        }
        out
    }
}

/// Default geometric step list 2^{−3}..2^{−10} for the spectral backend.
pub fn default_eps_spectral() -> Vec<f64> {
    (3..=10).map(|j| 2f64.powi(-j)).collect()
}

/// Compare symmetric finite differences of Ψ along the given directions
/// with the closed-form m-th differential, at every level the
/// representation supports (levels 0..=3 for the entire band-limited
/// model), and estimate the convergence order per level.
///
/// The m-th mixed difference uses the full symmetric stencil
/// (2ε)^{−m} Σ_{s∈{±1}^m} (Π s_j) Ψ((τ,v) + ε Σ s_j (T_j,V_j)),
/// which is second-order accurate for smooth data.
pub fn fd_verify(
    point: &ShiftPoint,
    m: usize,
    directions: &[TangentVector],
    eps_list: &[f64],
) -> Result<FdReport> {
    if m == 0 || m != directions.len() {
        return Err(ScError::Domain(format!(
            "order {m} needs exactly {m} tangent direction(s), got {}",
            directions.len()
        )));
    }
    if eps_list.is_empty() || eps_list.iter().any(|e| *e <= 0.0 || !e.is_finite()) {
        return Err(ScError::Domain(
            "the ε list must be nonempty and positive".into(),
        ));
    }

    let analytic = dk_psi(point, directions)?;
    let max_level = match point.value.regularity() {
        None => 3,
        Some(budget) => budget.saturating_sub(m),
    };

    let mut eps = eps_list.to_vec();
    eps.sort_by(|a, b| b.total_cmp(a));

    let mut per_eps_diffs: Vec<ShiftTarget> = Vec::with_capacity(eps.len());
    for &e in &eps {
        let mut fd: Option<ShiftTarget> = None;
        for mask in 0..(1u32 << m) {
            let mut tau = point.tau;
            let mut value = point.value.clone();
            let mut parity = 1.0;
            for (j, tv) in directions.iter().enumerate() {
                let sign = if mask & (1 << j) != 0 { 1.0 } else { -1.0 };
                parity *= sign;
                tau += sign * e * tv.tau_dir;
                value = value.add(&tv.value_dir.scaled(sign * e))?;
            }
            let sample = ShiftPoint::new(tau, value);
            let term = psi(&sample)?.scaled(parity / (2.0 * e).powi(m as i32));
            fd = Some(match fd {
                None => term,
                Some(acc) => acc.add(&term)?,
            });
        }
        per_eps_diffs.push(fd.expect("at least one stencil term").sub(&analytic)?);
    }

    let mut levels = Vec::new();
    for j in 0..=max_level {
        let scale = 1.0 + analytic.norm_at_level(j)?;
        let errors: Vec<f64> = per_eps_diffs
            .iter()
            .map(|d| d.norm_at_level(j))
            .collect::<Result<Vec<_>>>()?;
        let window = eps.len().div_ceil(2);
        let tail_eps = &eps[eps.len() - window..];
        let tail_err = &errors[errors.len() - window..];
        let order = if tail_err.iter().any(|e| *e <= 1e-13 * scale) {
            None
        } else {
            fit_log_slope(tail_eps, tail_err)
        };
        levels.push(FdLevelReport { j, errors, order });
    }
    let degenerate = levels.iter().all(|l| l.order.is_none());
    Ok(FdReport {
        m,
        eps,
        levels,
        degenerate,
    })
}

fn fit_log_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() < 2 {
        return None;
    }
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(_, y)| **y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    (denom.abs() > 1e-300).then(|| (n * sxy - sx * sy) / denom)
}
