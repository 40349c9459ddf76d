//! Weight functions and the fractal scale of weighted ℓ² sequence spaces.
//!
//! A weight function is a monotone nondecreasing unbounded map
//! f: {1,2,...} → (0,∞). Raising it to the power k produces the level-k
//! inner product ⟨x,y⟩_k = Σ_ν f(ν)^k x_ν y_ν on coefficient sequences, so a
//! single weight generates the whole nested family of levels. Rescaling the
//! canonical basis vector e_i by f(i)^{-k/2} maps the level-j unit sphere onto
//! the level-(j+k) unit sphere for every j; this self-similarity between
//! levels is what makes the scale "fractal".
//!
//! All vectors here are finite truncations. Any statement about the infinite
//! sequence space is phrased as behavior of the truncated model under
//! refinement of the truncation length.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Result, ScError};

/// Continuation rule for a table weight past its stored values.
///
/// A table by itself is bounded, so the constructor requires a continuation
/// that is declared unbounded. `Constant` is offered for completeness and is
/// rejected at construction time.
#[derive(Debug, Clone, PartialEq)]
pub enum TableExtension {
    /// Repeat the last stored value. Bounded, hence rejected.
    Constant,
    /// `last + slope·k` for the k-th entry past the table; `slope > 0`.
    Linear { slope: f64 },
    /// `last · ratio^k` for the k-th entry past the table; `ratio > 1`.
    Geometric { ratio: f64 },
    /// Continue the two-pointer sort-merge of `left` and `right`, each
    /// having already contributed its first `skip_left` / `skip_right`
    /// values to the stored table. Unbounded because both sources are.
    Merge {
        left: Arc<WeightFunction>,
        right: Arc<WeightFunction>,
        skip_left: usize,
        skip_right: usize,
    },
}

/// Closed-form rule of a weight function.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightRule {
    /// f(ν) = ν^exponent with exponent > 0.
    Power { exponent: f64 },
    /// Explicit positive nondecreasing values for ν = 1..=len, continued by
    /// the extension rule beyond.
    Table {
        values: Vec<f64>,
        extension: TableExtension,
    },
}

/// A monotone nondecreasing unbounded weight f: {1,2,...} → (0,∞),
/// normalized so that f(1) ≥ 1.
///
/// The normalization makes the level inclusions norm-nonincreasing
/// (level-(k+1) norms dominate level-k norms). If the raw input has
/// f(1) < 1 the constructor rescales every value by 1/f(1) and records the
/// factor in [`WeightFunction::normalization`].
#[derive(Debug, Clone, PartialEq)]
pub struct WeightFunction {
    name: String,
    rule: WeightRule,
    normalization: f64,
}

impl WeightFunction {
    /// Power weight f(ν) = ν^exponent. Requires exponent > 0 so the weight
    /// is unbounded; f(1) = 1 so no normalization is ever applied.
    pub fn power(name: impl Into<String>, exponent: f64) -> Result<Self> {
        if exponent <= 0.0 || !exponent.is_finite() {
            return Err(ScError::Domain(format!(
                "power weight needs a positive finite exponent, got {exponent}"
            )));
        }
        Ok(Self {
            name: name.into(),
            rule: WeightRule::Power { exponent },
            normalization: 1.0,
        })
    }

    /// Table weight from explicit values with a declared-unbounded extension.
    pub fn table(
        name: impl Into<String>,
        values: Vec<f64>,
        extension: TableExtension,
    ) -> Result<Self> {
        if values.is_empty() {
            return Err(ScError::Domain(
                "table weight needs at least one value".into(),
            ));
        }
        for (i, v) in values.iter().enumerate() {
            if *v <= 0.0 || !v.is_finite() {
                return Err(ScError::Domain(format!(
                    "table weight value at position {} must be positive and finite, got {v}",
                    i + 1
                )));
            }
        }
        if values.windows(2).any(|w| w[1] < w[0]) {
            return Err(ScError::Domain(
                "table weight values must be nondecreasing".into(),
            ));
        }
        match &extension {
            TableExtension::Constant => {
                return Err(ScError::Domain(
                    "constant extension keeps the table bounded; declare an unbounded extension"
                        .into(),
                ));
            }
            TableExtension::Linear { slope } => {
                if *slope <= 0.0 || !slope.is_finite() {
                    return Err(ScError::Domain(format!(
                        "linear extension needs slope > 0, got {slope}"
                    )));
                }
            }
            TableExtension::Geometric { ratio } => {
                if *ratio <= 1.0 || !ratio.is_finite() {
                    return Err(ScError::Domain(format!(
                        "geometric extension needs ratio > 1, got {ratio}"
                    )));
                }
            }
            TableExtension::Merge {
                left,
                right,
                skip_left,
                skip_right,
            } => {
                // The merge state must be consistent: the table holds
                // skip_left + skip_right values taken from the sources.
                if skip_left + skip_right != values.len() {
                    return Err(ScError::Domain(format!(
                        "merge extension state ({skip_left} + {skip_right}) does not match \
                         table length {}",
                        values.len()
                    )));
                }
                let _ = (left, right);
            }
        }
        let first = values[0];
        let (values, normalization) = if first < 1.0 {
            let factor = 1.0 / first;
            (values.iter().map(|v| v * factor).collect(), factor)
        } else {
            (values, 1.0)
        };
        Ok(Self {
            name: name.into(),
            rule: WeightRule::Table { values, extension },
            normalization,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rule(&self) -> &WeightRule {
        &self.rule
    }

    /// Factor the constructor multiplied into the raw values to enforce
    /// f(1) ≥ 1; equals 1.0 when the input already satisfied it.
    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    /// Evaluate f(ν). ν = 0 is a domain error (indices are 1-based).
    pub fn eval(&self, nu: usize) -> Result<f64> {
        if nu == 0 {
            return Err(ScError::Domain(
                "weight functions are indexed from ν = 1".into(),
            ));
        }
        Ok(self.eval_unchecked(nu))
    }

    fn eval_unchecked(&self, nu: usize) -> f64 {
        debug_assert!(nu >= 1);
        match &self.rule {
            WeightRule::Power { exponent } => (nu as f64).powf(*exponent),
            WeightRule::Table { values, extension } => {
                if nu <= values.len() {
                    values[nu - 1]
                } else {
                    let last = *values.last().expect("table is nonempty");
                    let past = nu - values.len();
                    match extension {
                        TableExtension::Constant => last,
                        TableExtension::Linear { slope } => last + slope * past as f64,
                        TableExtension::Geometric { ratio } => last * ratio.powi(past as i32),
                        TableExtension::Merge {
                            left,
                            right,
                            skip_left,
                            skip_right,
                        } => {
                            // clamped from below by the stored prefix: the
                            // forced 2n-value prefix can overshoot the
                            // continued merge, and the weight must stay
                            // nondecreasing
                            merge_tail(left, right, *skip_left, *skip_right, past).max(last)
                        }
                    }
                }
            }
        }
    }

    /// f(1), f(2), ..., f(m) as a vector. Cheaper than repeated `eval` for
    /// table weights with merge extensions.
    pub fn values_upto(&self, m: usize) -> Vec<f64> {
        match &self.rule {
            WeightRule::Table {
                values,
                extension:
                    TableExtension::Merge {
                        left,
                        right,
                        skip_left,
                        skip_right,
                    },
            } if m > values.len() => {
                let mut out = values.clone();
                let last = *values.last().expect("table is nonempty");
                out.extend(
                    merge_run(left, right, *skip_left, *skip_right, m - values.len())
                        .into_iter()
                        .map(|v| v.max(last)),
                );
                out
            }
            _ => (1..=m).map(|nu| self.eval_unchecked(nu)).collect(),
        }
    }
}

/// k-th continuation value of the sort-merge of `left` and `right` after
/// each has already contributed `skip_left` / `skip_right` values.
fn merge_tail(
    left: &WeightFunction,
    right: &WeightFunction,
    skip_left: usize,
    skip_right: usize,
    k: usize,
) -> f64 {
    *merge_run(left, right, skip_left, skip_right, k)
        .last()
        .expect("k >= 1")
}

fn merge_run(
    left: &WeightFunction,
    right: &WeightFunction,
    skip_left: usize,
    skip_right: usize,
    count: usize,
) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    let mut i = skip_left + 1;
    let mut j = skip_right + 1;
    for _ in 0..count {
        let a = left.eval_unchecked(i);
        let b = right.eval_unchecked(j);
        if a <= b {
            out.push(a);
            i += 1;
        } else {
            out.push(b);
            j += 1;
        }
    }
    out
}

/// Product weight f*g: the ν-th value is the ν-th smallest member of the
/// merged multiset {f(1)..f(n)} ∪ {g(1)..g(n)}, materialized as a table of
/// length 2n and continued past it by merging the sources further. The
/// scale it generates is the direct sum of the scales of f and g.
pub fn merge_weights(
    f: &Arc<WeightFunction>,
    g: &Arc<WeightFunction>,
    n: usize,
) -> Result<WeightFunction> {
    if n == 0 {
        return Err(ScError::Domain("merge length must be at least 1".into()));
    }
    // sort-merge of the two finite prefixes; both pointers end at n+1, which
    // is exactly the state the merge extension continues from
    let (fv, gv) = (f.values_upto(n), g.values_upto(n));
    let mut values = Vec::with_capacity(2 * n);
    let (mut i, mut j) = (0, 0);
    while i < n || j < n {
        if j >= n || (i < n && fv[i] <= gv[j]) {
            values.push(fv[i]);
            i += 1;
        } else {
            values.push(gv[j]);
            j += 1;
        }
    }
    WeightFunction::table(
        format!("{}*{}", f.name(), g.name()),
        values,
        TableExtension::Merge {
            left: Arc::clone(f),
            right: Arc::clone(g),
            skip_left: n,
            skip_right: n,
        },
    )
}

/// Finite-range equivalence probe for two weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Equivalence {
    /// Smallest c with (1/c)·f ≤ g ≤ c·f on ν = 1..=n.
    pub constant: f64,
    /// Whether the constant was stable when the range was halved. A
    /// constant that keeps growing with the range is heuristic evidence the
    /// weights are not equivalent; a finite range can never prove they are.
    pub stable: bool,
}

/// Smallest constant witnessing (1/c)·f ≤ g ≤ c·f over ν = 1..=n, together
/// with a stability flag from comparing against the half range. This is a
/// necessary-condition sample, not a decision procedure.
pub fn weights_equivalent(f: &WeightFunction, g: &WeightFunction, n: usize) -> Result<Equivalence> {
    if n == 0 {
        return Err(ScError::Domain(
            "equivalence range must be at least 1".into(),
        ));
    }
    let fv = f.values_upto(n);
    let gv = g.values_upto(n);
    let c_upto = |m: usize| -> f64 {
        let mut c = 1.0f64;
        for nu in 0..m {
            c = c.max(fv[nu] / gv[nu]).max(gv[nu] / fv[nu]);
        }
        c
    };
    let full = c_upto(n);
    let half = c_upto(n.div_ceil(2));
    Ok(Equivalence {
        constant: full,
        stable: full <= half * (1.0 + 1e-12),
    })
}

/// A finitely supported coefficient sequence over a weight function; the
/// truncated stand-in for an element of the weighted ℓ² scale. Coefficient
/// index ν runs from 1 to the truncation length.
///
/// Coefficients are real. Complex-coefficient models (loops on the circle)
/// live in [`crate::loops`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleVector {
    coeffs: Vec<f64>,
    weight: Arc<WeightFunction>,
}

impl ScaleVector {
    pub fn new(coeffs: Vec<f64>, weight: Arc<WeightFunction>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(ScError::Domain("coefficients must be finite".into()));
        }
        Ok(Self { coeffs, weight })
    }

    pub fn zero(truncation: usize, weight: Arc<WeightFunction>) -> Self {
        Self {
            coeffs: vec![0.0; truncation],
            weight,
        }
    }

    /// The level-k unit basis vector in direction i: f(i)^{-k/2}·e_i.
    pub fn basis(i: usize, level: usize, weight: Arc<WeightFunction>) -> Result<Self> {
        if i == 0 {
            return Err(ScError::Domain(
                "basis directions are indexed from 1".into(),
            ));
        }
        let mut coeffs = vec![0.0; i];
        coeffs[i - 1] = weight.eval(i)?.powf(-(level as f64) / 2.0);
        Ok(Self { coeffs, weight })
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.len()
    }

    pub fn weight(&self) -> &Arc<WeightFunction> {
        &self.weight
    }

    fn check_same_weight(&self, other: &Self) -> Result<()> {
        if self.weight != other.weight {
            return Err(ScError::Contract(format!(
                "vectors live over different weight functions ({} vs {})",
                self.weight.name(),
                other.weight.name()
            )));
        }
        Ok(())
    }

    /// Level-k inner product Σ_ν f(ν)^k x_ν y_ν. The shorter vector is
    /// padded with zeros; both must share the weight function.
    pub fn inner_at_level(&self, other: &Self, level: usize) -> Result<f64> {
        self.check_same_weight(other)?;
        let m = self.coeffs.len().min(other.coeffs.len());
        let mut acc = 0.0;
        for nu in 1..=m {
            let x = self.coeffs[nu - 1];
            let y = other.coeffs[nu - 1];
            if x != 0.0 && y != 0.0 {
                acc += self.weight.eval_unchecked(nu).powi(level as i32) * x * y;
            }
        }
        Ok(acc)
    }

    /// Level-k norm (Σ_ν f(ν)^k x_ν²)^{1/2}.
    pub fn norm_at_level(&self, level: usize) -> f64 {
        let mut acc = 0.0;
        for nu in 1..=self.coeffs.len() {
            let x = self.coeffs[nu - 1];
            if x != 0.0 {
                acc += self.weight.eval_unchecked(nu).powi(level as i32) * x * x;
            }
        }
        acc.sqrt()
    }

    /// The canonical scale isomorphism raising by k levels:
    /// x_i ↦ f(i)^{-k/2} x_i. For every j the level-(j+k) norm of the output
    /// equals the level-j norm of the input.
    pub fn promote(&self, k: usize) -> Self {
        self.rescaled(-(k as f64) / 2.0)
    }

    /// Inverse of [`ScaleVector::promote`]: x_i ↦ f(i)^{k/2} x_i.
    pub fn demote(&self, k: usize) -> Self {
        self.rescaled(k as f64 / 2.0)
    }

    fn rescaled(&self, half_power: f64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(idx, x)| self.weight.eval_unchecked(idx + 1).powf(half_power) * x)
            .collect();
        Self {
            coeffs,
            weight: Arc::clone(&self.weight),
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|x| factor * x).collect(),
            weight: Arc::clone(&self.weight),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_weight(other)?;
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = vec![0.0; n];
        for (i, slot) in coeffs.iter_mut().enumerate() {
            *slot = self.coeffs.get(i).copied().unwrap_or(0.0)
                + other.coeffs.get(i).copied().unwrap_or(0.0);
        }
        Ok(Self {
            coeffs,
            weight: Arc::clone(&self.weight),
        })
    }
}

// ---------------------------------------------------------------------------
// JSON round trips
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct WeightJson {
    name: String,
    rule: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    exponent: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    extension: Option<ExtensionJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    normalization: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct ExtensionJson {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    slope: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    left: Option<Box<WeightJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    right: Option<Box<WeightJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    skip_left: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    skip_right: Option<usize>,
}

fn weight_to_json(w: &WeightFunction) -> WeightJson {
    let (rule, exponent, values, extension) = match &w.rule {
        WeightRule::Power { exponent } => ("power", Some(*exponent), None, None),
        WeightRule::Table { values, extension } => {
            let ext = match extension {
                TableExtension::Constant => ExtensionJson {
                    kind: "constant".into(),
                    slope: None,
                    ratio: None,
                    left: None,
                    right: None,
                    skip_left: None,
                    skip_right: None,
                },
                TableExtension::Linear { slope } => ExtensionJson {
                    kind: "linear".into(),
                    slope: Some(*slope),
                    ratio: None,
                    left: None,
                    right: None,
                    skip_left: None,
                    skip_right: None,
                },
                TableExtension::Geometric { ratio } => ExtensionJson {
                    kind: "geometric".into(),
                    slope: None,
                    ratio: Some(*ratio),
                    left: None,
                    right: None,
                    skip_left: None,
                    skip_right: None,
                },
                TableExtension::Merge {
                    left,
                    right,
                    skip_left,
                    skip_right,
                } => ExtensionJson {
                    kind: "merge".into(),
                    slope: None,
                    ratio: None,
                    left: Some(Box::new(weight_to_json(left))),
                    right: Some(Box::new(weight_to_json(right))),
                    skip_left: Some(*skip_left),
                    skip_right: Some(*skip_right),
                },
            };
            ("table", None, Some(values.clone()), Some(ext))
        }
    };
    WeightJson {
        name: w.name.clone(),
        rule: rule.into(),
        exponent,
        values,
        extension,
        normalization: (w.normalization != 1.0).then_some(w.normalization),
    }
}

fn weight_from_json(j: &WeightJson) -> Result<WeightFunction> {
    let mut w = weight_from_json_rule(j)?;
    // stored table values are already normalized; carry the recorded factor
    if let Some(factor) = j.normalization {
        w.normalization = factor;
    }
    Ok(w)
}

fn weight_from_json_rule(j: &WeightJson) -> Result<WeightFunction> {
    match j.rule.as_str() {
        "power" => {
            let exponent = j
                .exponent
                .ok_or_else(|| ScError::Domain("power rule needs an exponent".into()))?;
            WeightFunction::power(j.name.clone(), exponent)
        }
        "table" => {
            let values = j
                .values
                .clone()
                .ok_or_else(|| ScError::Domain("table rule needs values".into()))?;
            let ext = j
                .extension
                .as_ref()
                .ok_or_else(|| ScError::Domain("table rule needs an extension".into()))?;
            let extension = match ext.kind.as_str() {
                "constant" => TableExtension::Constant,
                "linear" => TableExtension::Linear {
                    slope: ext
                        .slope
                        .ok_or_else(|| ScError::Domain("linear extension needs a slope".into()))?,
                },
                "geometric" => TableExtension::Geometric {
                    ratio: ext.ratio.ok_or_else(|| {
                        ScError::Domain("geometric extension needs a ratio".into())
                    })?,
                },
                "merge" => {
                    let left = ext
                        .left
                        .as_ref()
                        .ok_or_else(|| ScError::Domain("merge extension needs left".into()))?;
                    let right = ext
                        .right
                        .as_ref()
                        .ok_or_else(|| ScError::Domain("merge extension needs right".into()))?;
                    TableExtension::Merge {
                        left: Arc::new(weight_from_json(left)?),
                        right: Arc::new(weight_from_json(right)?),
                        skip_left: ext.skip_left.unwrap_or(0),
                        skip_right: ext.skip_right.unwrap_or(0),
                    }
                }
                other => {
                    return Err(ScError::Domain(format!("unknown extension kind '{other}'")));
                }
            };
            WeightFunction::table(j.name.clone(), values, extension)
        }
        other => Err(ScError::Domain(format!("unknown weight rule '{other}'"))),
    }
}

impl Serialize for WeightFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        weight_to_json(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for WeightFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = WeightJson::deserialize(d)?;
        weight_from_json(&j).map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct ScaleVectorJson {
    weight_name: String,
    coefficients: Vec<f64>,
}

impl ScaleVector {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(ScaleVectorJson {
            weight_name: self.weight.name().to_string(),
            coefficients: self.coeffs.clone(),
        })
        .expect("plain struct serializes")
    }

    /// Rebuild from JSON against a known weight; the stored name must match.
    pub fn from_json(value: &serde_json::Value, weight: Arc<WeightFunction>) -> Result<Self> {
        let j: ScaleVectorJson = serde_json::from_value(value.clone())?;
        if j.weight_name != weight.name() {
            return Err(ScError::Contract(format!(
                "vector was saved over weight '{}' but '{}' was supplied",
                j.weight_name,
                weight.name()
            )));
        }
        Self::new(j.coefficients, weight)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn power(e: f64) -> Arc<WeightFunction> {
        Arc::new(WeightFunction::power(format!("nu^{e}"), e).unwrap())
    }

    #[test]
    fn power_weight_evaluates() {
        let f = power(2.0);
        assert_eq!(f.eval(3).unwrap(), 9.0);
        let g = power(2.0 / 3.0);
        assert_eq!(g.eval(1).unwrap(), 1.0);
        let h = power(4.0);
        assert_eq!(h.eval(2).unwrap(), 16.0);
    }

    #[test]
    fn eval_at_zero_is_domain_error() {
        let f = power(2.0);
        assert!(matches!(f.eval(0), Err(ScError::Domain(_))));
    }

    #[test]
    fn nonpositive_exponent_rejected() {
        assert!(WeightFunction::power("bad", 0.0).is_err());
        assert!(WeightFunction::power("bad", -1.0).is_err());
    }

    #[test]
    fn bounded_extension_rejected() {
        let err = WeightFunction::table("flat", vec![1.0, 2.0], TableExtension::Constant);
        assert!(matches!(err, Err(ScError::Domain(_))));
    }

    #[test]
    fn table_is_normalized_to_start_at_one() {
        let w = WeightFunction::table(
            "small",
            vec![0.5, 1.0, 2.0],
            TableExtension::Linear { slope: 1.0 },
        )
        .unwrap();
        assert_eq!(w.normalization(), 2.0);
        assert_eq!(w.eval(1).unwrap(), 1.0);
        assert_eq!(w.eval(3).unwrap(), 4.0);
        // linear continuation runs from the stored (normalized) last value
        assert_eq!(w.eval(5).unwrap(), 6.0);
    }

    #[test]
    fn level_inner_matches_hand_sum() {
        // Σ f(ν)² x_ν y_ν with f(ν) = ν²: 1·1 + 16·(−1) + 81·2 = 147.
        let f = power(2.0);
        let x = ScaleVector::new(vec![1.0, 1.0, 1.0], Arc::clone(&f)).unwrap();
        let y = ScaleVector::new(vec![1.0, -1.0, 2.0], Arc::clone(&f)).unwrap();
        assert_eq!(x.inner_at_level(&y, 2).unwrap(), 147.0);
    }

    #[test]
    fn level_inner_basis_directions() {
        let f = power(2.0);
        let e1 = ScaleVector::basis(1, 0, Arc::clone(&f)).unwrap();
        let e2 = ScaleVector::basis(2, 0, Arc::clone(&f)).unwrap();
        // ⟨e₂,e₂⟩_f = f(2) = 4; disjoint supports pair to zero.
        assert_eq!(e2.inner_at_level(&e2, 1).unwrap(), 4.0);
        assert_eq!(e1.inner_at_level(&e2, 3).unwrap(), 0.0);
    }

    #[test]
    fn mismatched_weights_are_contract_error() {
        let x = ScaleVector::new(vec![1.0], power(2.0)).unwrap();
        let y = ScaleVector::new(vec![1.0], power(1.0)).unwrap();
        assert!(matches!(x.inner_at_level(&y, 0), Err(ScError::Contract(_))));
    }

    #[test]
    fn basis_vectors_are_level_unit() {
        let f = power(2.0);
        let b = ScaleVector::basis(2, 1, Arc::clone(&f)).unwrap();
        assert_eq!(b.coefficients(), &[0.0, 0.5]);
        assert!((b.norm_at_level(1) - 1.0).abs() < 1e-15);

        let b3 = ScaleVector::basis(3, 2, Arc::clone(&f)).unwrap();
        assert_eq!(b3.coefficients(), &[0.0, 0.0, 1.0 / 9.0]);

        let e1 = ScaleVector::basis(1, 7, f).unwrap();
        assert_eq!(e1.coefficients(), &[1.0]);
    }

    #[test]
    fn promote_is_levelwise_isometry() {
        let f = power(2.0);
        let e2 = ScaleVector::basis(2, 0, Arc::clone(&f)).unwrap();
        let up = e2.promote(1);
        assert_eq!(up.coefficients(), &[0.0, 0.5]);
        assert!((up.norm_at_level(1) - e2.norm_at_level(0)).abs() < 1e-15);
        // identity at k = 0
        assert_eq!(e2.promote(0), e2);
    }

    #[test]
    fn merge_matches_sort_merge_oracle() {
        let p1 = power(1.0);
        let p2 = power(2.0);
        let same = merge_weights(&p1, &p1, 3).unwrap();
        assert_eq!(same.values_upto(6), vec![1.0, 1.0, 2.0, 2.0, 3.0, 3.0]);
        let mixed = merge_weights(&p1, &p2, 3).unwrap();
        assert_eq!(mixed.values_upto(6), vec![1.0, 1.0, 2.0, 3.0, 4.0, 9.0]);
    }

    #[test]
    fn merge_extension_continues_monotonically() {
        let p1 = power(1.0);
        let p2 = power(2.0);
        let merged = merge_weights(&p1, &p2, 3).unwrap();
        // the stored prefix ends at 9 while the continued merge restarts at
        // f(4) = 4, so the continuation is clamped until it catches up
        let vals = merged.values_upto(13);
        assert_eq!(&vals[6..10], &[9.0, 9.0, 9.0, 9.0]);
        assert_eq!(vals[12], 10.0);
        assert!(vals.windows(2).all(|w| w[1] >= w[0]));
        for (nu, v) in vals.iter().enumerate() {
            assert_eq!(merged.eval(nu + 1).unwrap(), *v);
        }
    }

    #[test]
    fn merge_prefix_dominated_by_smaller_weight() {
        let f = power(1.0);
        let big = Arc::new(
            WeightFunction::table(
                "big",
                vec![100.0, 200.0, 300.0],
                TableExtension::Linear { slope: 100.0 },
            )
            .unwrap(),
        );
        let merged = merge_weights(&f, &big, 3).unwrap();
        assert_eq!(&merged.values_upto(3), &[1.0, 2.0, 3.0]);
    }

    #[test]
    fn equivalence_reports_constants() {
        let f = power(2.0);
        let tripled = Arc::new(
            WeightFunction::table(
                "3f",
                (1..=10).map(|nu| 3.0 * (nu * nu) as f64).collect(),
                TableExtension::Linear { slope: 1.0 },
            )
            .unwrap(),
        );
        let same = weights_equivalent(&f, &f, 10).unwrap();
        assert_eq!(same.constant, 1.0);
        assert!(same.stable);

        let three = weights_equivalent(&f, &tripled, 10).unwrap();
        assert_eq!(three.constant, 3.0);
        assert!(three.stable);

        let growing = weights_equivalent(&power(1.0), &power(2.0), 10).unwrap();
        assert_eq!(growing.constant, 10.0);
        assert!(!growing.stable);
    }

    proptest::proptest! {
        #[test]
        fn cauchy_schwarz_at_every_level(
            xs in proptest::collection::vec(-10.0f64..10.0, 1..8),
            ys in proptest::collection::vec(-10.0f64..10.0, 1..8),
            k in 0usize..4,
        ) {
            let f = power(2.0);
            let x = ScaleVector::new(xs, Arc::clone(&f)).unwrap();
            let y = ScaleVector::new(ys, Arc::clone(&f)).unwrap();
            let inner = x.inner_at_level(&y, k).unwrap();
            let bound = x.norm_at_level(k) * y.norm_at_level(k);
            proptest::prop_assert!(inner.abs() <= bound * (1.0 + 1e-12));
        }

        #[test]
        fn level_norms_are_nondecreasing(
            xs in proptest::collection::vec(-10.0f64..10.0, 1..8),
        ) {
            let f = power(2.0);
            let x = ScaleVector::new(xs, Arc::clone(&f)).unwrap();
            let mut prev = x.norm_at_level(0);
            for k in 1..5 {
                let here = x.norm_at_level(k);
                proptest::prop_assert!(here >= prev * (1.0 - 1e-12));
                prev = here;
            }
        }
    }

    #[test]
    fn weight_json_round_trip_is_binary_exact() {
        let merged = merge_weights(&power(1.0), &power(2.0), 4).unwrap();
        for w in [
            WeightFunction::power("p", 2.0 / 3.0).unwrap(),
            WeightFunction::table(
                "t",
                vec![0.5, 0.75, 3.0],
                TableExtension::Geometric { ratio: 1.5 },
            )
            .unwrap(),
            merged,
        ] {
            let json = serde_json::to_string(&w).unwrap();
            let back: WeightFunction = serde_json::from_str(&json).unwrap();
            assert_eq!(back, w);
            for nu in 1..=12 {
                assert_eq!(back.eval(nu).unwrap(), w.eval(nu).unwrap());
            }
        }
    }

    #[test]
    fn demote_realizes_level_norms_at_level_zero() {
        let f = power(2.0);
        let x = ScaleVector::new(vec![0.3, -1.1, 0.7, 2.0], Arc::clone(&f)).unwrap();
        for j in 0..5 {
            let direct = x.norm_at_level(j);
            let through_zero = x.demote(j).norm_at_level(0);
            assert!((direct - through_zero).abs() <= 1e-12 * direct.max(1.0));
        }
    }

    #[test]
    fn promote_composes_additively() {
        let f = power(2.0);
        let x = ScaleVector::new(vec![1.0, -0.5, 0.25], Arc::clone(&f)).unwrap();
        let twice = x.promote(1).promote(2);
        let once = x.promote(3);
        for (a, b) in twice.coefficients().iter().zip(once.coefficients()) {
            assert!((a - b).abs() <= 1e-12 * b.abs().max(1e-300));
        }
    }

    #[test]
    fn scale_vector_json_round_trip() {
        let f = power(2.0);
        let x = ScaleVector::new(vec![0.25, -1.5, 3.0], Arc::clone(&f)).unwrap();
        let json = x.to_json();
        let back = ScaleVector::from_json(&json, Arc::clone(&f)).unwrap();
        assert_eq!(back, x);

        let other = power(1.0);
        assert!(matches!(
            ScaleVector::from_json(&json, other),
            Err(ScError::Contract(_))
        ));
    }
}
