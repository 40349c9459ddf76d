//! Acceptance suite: every quantitative claim the laboratory is built to
//! demonstrate, one test per criterion, each at its pinned tolerance.
//! Run with `cargo test --test acceptance -- --nocapture` to see the
//! per-criterion pass/fail lines.

use std::f64::consts::{PI, SQRT_2};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sc_lab::compactness::{floer_projection_defect, projection_defect_norm};
use sc_lab::experiments::{
    growth_table, run_doubling, run_scale_axioms, DoublingConfig, GrowthRow, ScaleAxiomsConfig,
};
use sc_lab::lagrangian::{double, halve, SymLoop};
use sc_lab::loops::{compact_open_decay, discontinuity_witness, FourierLoop};
use sc_lab::paths::{CutoffProfile, GridPath};
use sc_lab::shift_calculus::{
    chain_rule_check, d2_psi, default_eps_spectral, dk_psi, fd_verify, ShiftPoint, ShiftTarget,
    TangentVector,
};
use sc_lab::tolerances::*;
use sc_lab::weights::WeightFunction;

fn verdict(criterion: usize, pass: bool, detail: &str) {
    println!(
        "criterion {criterion:2}: {} - {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} failed: {detail}");
}

fn square_weight() -> Arc<WeightFunction> {
    Arc::new(WeightFunction::power("nu^2", 2.0).unwrap())
}

fn random_loop(bandwidth: usize, rng: &mut impl Rng) -> FourierLoop {
    FourierLoop::random(bandwidth, rng)
}

fn unit_loop_at(bandwidth: usize, level: usize, rng: &mut impl Rng) -> FourierLoop {
    let v = FourierLoop::random(bandwidth, rng);
    let n = v.sobolev_norm(level);
    v.scaled(1.0 / n)
}

/// Smooth decaying path with random bump/oscillation structure, built from
/// public constructors only.
fn random_path(
    half_width: f64,
    resolution: usize,
    truncation: usize,
    weight: &Arc<WeightFunction>,
    rng: &mut impl Rng,
) -> GridPath {
    let bumps: Vec<(f64, f64, f64, Vec<f64>)> = (0..3)
        .map(|_| {
            (
                rng.gen_range(-2.0..2.0),
                rng.gen_range(0.4..1.2),
                rng.gen_range(0.0..2.5),
                (0..truncation).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            )
        })
        .collect();
    GridPath::sample(half_width, resolution, Arc::clone(weight), move |t| {
        let mut row = vec![0.0; truncation];
        for (center, spread, freq, coeffs) in &bumps {
            let profile = (-((t - center) / spread).powi(2)).exp() * (freq * t).cos();
            for (slot, c) in row.iter_mut().zip(coeffs) {
                *slot += profile * c;
            }
        }
        row
    })
    .unwrap()
}

#[test]
fn criterion_01_discontinuity_constant() {
    let mut worst = 0.0f64;
    for tau in [0.5, 0.25, 0.125] {
        let w = discontinuity_witness(tau, 64).unwrap();
        worst = worst
            .max((w.norm - 1.0).abs())
            .max((w.defect - SQRT_2).abs());
    }
    verdict(
        1,
        worst <= DISCONTINUITY_ABS,
        &format!("step witnesses have norm 1 and shift defect sqrt(2); worst error {worst:.2e}"),
    );
}

#[test]
fn criterion_02_compact_open_continuity() {
    let taus: Vec<f64> = (1..=10).map(|j| 2f64.powi(-j)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut pass = true;
    let mut worst_ratio = 0.0f64;
    for i in 0..20 {
        let v = random_loop(16, &mut rng);
        let deriv_norm = v.derivative().l2_norm();
        let rows = compact_open_decay(&v, &taus);
        for row in &rows {
            // the criterion's Lipschitz form
            let bound = 2.0 * PI * row.tau * deriv_norm;
            worst_ratio = worst_ratio.max(row.defect / bound);
            pass &= row.defect <= bound * (1.0 + 1e-12);
        }
        // per-mode defects shrink under halving once ℓτ ≤ 2/3: from
        // τ = 2^{-5} on for bandwidth 16
        pass &= rows[4..]
            .windows(2)
            .all(|w| w[1].defect <= w[0].defect * (1.0 + 1e-12));
        // decay to zero across the monotone regime
        pass &= rows[9].defect <= 0.1 * rows[4].defect;
        if i == 0 {
            // closed form against a materialized shift (independent route)
            for &tau in &[0.5, 0.125, 0.015625] {
                let direct = v.shifted(tau).sub(&v).unwrap().l2_norm();
                let table = rows.iter().find(|r| r.tau == tau).unwrap().defect;
                pass &= (direct - table).abs() <= 1e-12 * direct.max(1.0);
            }
        }
    }
    verdict(
        2,
        pass,
        &format!("defects obey 2πτ·|v'| and decay to zero (worst defect/bound {worst_ratio:.3})"),
    );
}

#[test]
fn criterion_03_shift_isometry() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let v = random_loop(16, &mut rng);
        let tau = rng.gen_range(-1.0..1.0);
        let shifted = v.shifted(tau);
        for k in 0..=3 {
            let a = v.sobolev_norm(k);
            worst = worst.max((a - shifted.sobolev_norm(k)).abs() / a);
        }
    }
    verdict(
        3,
        worst <= ISOMETRY_REL,
        &format!("shifts preserve levels 0..3 (worst relative deviation {worst:.2e})"),
    );
}

#[test]
fn criterion_04_sc_differential_formulas() {
    let eps = default_eps_spectral();
    let mut min_order = f64::INFINITY;
    let mut pure_v_worst = 0.0f64;
    for m in 1..=3usize {
        let bandwidth = if m < 3 { 4 } else { 2 };
        for trial in 0..5 {
            let mut rng = ChaCha8Rng::seed_from_u64(400 + (m * 10 + trial) as u64);
            let point = ShiftPoint::loop_point(
                rng.gen_range(-0.5..0.5),
                unit_loop_at(bandwidth, 3, &mut rng),
            );
            let dirs: Vec<TangentVector> = (0..m)
                .map(|_| {
                    TangentVector::new(
                        rng.gen_range(0.5..1.0),
                        ShiftTarget::Loop(unit_loop_at(bandwidth, 3, &mut rng)),
                    )
                })
                .collect();
            let report = fd_verify(&point, m, &dirs, &eps).unwrap();
            min_order = min_order.min(report.min_order().unwrap());

            // pure-v directions: exact by linearity; probed at the large
            // steps where the 1/(2ε)^m cancellation roundoff is smallest
            let pure: Vec<TangentVector> = (0..m)
                .map(|_| {
                    TangentVector::new(0.0, ShiftTarget::Loop(unit_loop_at(bandwidth, 3, &mut rng)))
                })
                .collect();
            let linear = fd_verify(&point, m, &pure, &eps[..2]).unwrap();
            pure_v_worst = pure_v_worst.max(linear.max_error());
        }
    }
    verdict(
        4,
        min_order >= FD_MIN_ORDER && pure_v_worst <= SC_LINEARITY_ABS,
        &format!(
            "finite differences converge to the differential formulas at order {min_order:.3}; \
             pure-v error {pure_v_worst:.2e}"
        ),
    );
}

#[test]
fn criterion_05_differential_symmetry() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut d2_worst, mut d3_worst) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let point = ShiftPoint::loop_point(rng.gen_range(-0.5..0.5), random_loop(4, &mut rng));
        let mk = |rng: &mut ChaCha8Rng| {
            TangentVector::new(
                rng.gen_range(-1.0..1.0),
                ShiftTarget::Loop(random_loop(4, rng)),
            )
        };
        let (a, b, c) = (mk(&mut rng), mk(&mut rng), mk(&mut rng));

        let ab = d2_psi(&point, &a, &b).unwrap();
        let ba = d2_psi(&point, &b, &a).unwrap();
        let scale = ab.norm_at_level(0).unwrap().max(1e-300);
        d2_worst = d2_worst.max(ab.sub(&ba).unwrap().norm_at_level(0).unwrap() / scale);

        let base = dk_psi(&point, &[a.clone(), b.clone(), c.clone()]).unwrap();
        let scale3 = base.norm_at_level(0).unwrap().max(1e-300);
        let perms: [[&TangentVector; 3]; 5] = [
            [&a, &c, &b],
            [&b, &a, &c],
            [&b, &c, &a],
            [&c, &a, &b],
            [&c, &b, &a],
        ];
        for p in perms {
            let permuted = dk_psi(&point, &[p[0].clone(), p[1].clone(), p[2].clone()]).unwrap();
            d3_worst =
                d3_worst.max(base.sub(&permuted).unwrap().norm_at_level(0).unwrap() / scale3);
        }
    }
    verdict(
        5,
        d2_worst <= SC_SYMMETRY_REL && d3_worst <= SC_SYMMETRY_REL,
        &format!("D2 symmetric ({d2_worst:.2e}) and D3 permutation symmetric ({d3_worst:.2e})"),
    );
}

#[test]
fn criterion_06_chain_rule() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let sigma = rng.gen_range(-1.0..1.0);
        let point = ShiftPoint::loop_point(rng.gen_range(-0.5..0.5), random_loop(8, &mut rng));
        let tv = TangentVector::new(
            rng.gen_range(-1.0..1.0),
            ShiftTarget::Loop(random_loop(8, &mut rng)),
        );
        worst = worst.max(chain_rule_check(sigma, &point, &tv).unwrap());
    }
    verdict(
        6,
        worst <= CHAIN_RULE_ABS,
        &format!("tangent maps compose (worst discrepancy {worst:.2e} over 50 triples)"),
    );
}

#[test]
fn criterion_07_finite_rank_decay() {
    let weight = square_weight();
    let ranks = [1usize, 2, 4, 8, 16];
    let mut pass = true;
    let mut prev = f64::INFINITY;
    let mut flags = Vec::new();
    for &n in &ranks {
        let d = projection_defect_norm(n, &weight).unwrap();
        // exact extremizer value 1/(N+1) for the square weight
        pass &= (d.exact - 1.0 / (n as f64 + 1.0)).abs() <= 1e-15;
        pass &= d.exact < prev;
        prev = d.exact;
        flags.push(d.paper_bound_holds);
    }
    // the tabulated 1/f(N) reference holds only at N = 1 for this weight;
    // the comparison must be flagged, not silently passed
    pass &= flags == [true, false, false, false, false];
    verdict(
        7,
        pass,
        "rank-N defects equal 1/(N+1), strictly decreasing; 1/f(N) reference tabulated and flagged",
    );
}

#[test]
fn criterion_08_exponential_tail() {
    let weight = square_weight();
    let beta = CutoffProfile::default();
    let p = 2.0;
    let mut worst_slack = 0.0f64;
    let mut pass = true;
    for (di, delta) in [0.5, 1.0].into_iter().enumerate() {
        for i in 0..100 {
            let mut rng = ChaCha8Rng::seed_from_u64(800 + (di * 100 + i) as u64);
            let raw = random_path(8.0, 641, 4, &weight, &mut rng);
            let norm = raw.wkp_delta_norm(1, p, delta, 0, &beta).unwrap();
            let v = raw.scaled(1.0 / norm);
            for t_cut in [1.0, 2.0, 4.0] {
                let tail = v.tail_mass(t_cut, p).unwrap();
                let bound = (-delta * t_cut).exp();
                worst_slack = worst_slack.max(tail / bound);
                pass &= tail <= bound * (1.0 + CERT_SLACK_REL);
            }
        }
    }
    verdict(
        8,
        pass,
        &format!(
            "unit-norm path tails stay under e^(-δT) for δ in {{0.5,1}}, T in {{1,2,4}} \
             (worst tail/bound {worst_slack:.3})"
        ),
    );
}

#[test]
fn criterion_09_floer_projection_decay() {
    let weight = square_weight();
    let beta = CutoffProfile::default();
    let (delta, p) = (0.5, 2.0);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let samples: Vec<GridPath> = (0..50)
        .map(|_| random_path(6.0, 241, 16, &weight, &mut rng))
        .collect();

    // direct per-sample check of the derived pointwise bound
    let mut pass = true;
    let mut maxima = Vec::new();
    for n in [2usize, 4, 8] {
        let constant = (weight.eval(n + 1).unwrap()).powf(-0.5);
        let mut worst = 0.0f64;
        for v in &samples {
            let defect = v
                .project_tail(n)
                .wkp_delta_norm(0, p, 0.0, 0, &beta)
                .unwrap();
            let weighted_h1 = v.wkp_delta_norm(0, p, delta, 1, &beta).unwrap();
            pass &= defect <= constant * weighted_h1 * (1.0 + CERT_SLACK_REL);
            worst = worst.max(defect / weighted_h1);
        }
        maxima.push(worst);
    }
    pass &= maxima.windows(2).all(|w| w[1] < w[0]);

    // and the certificate agrees
    let cert = floer_projection_defect(&[2, 4, 8], delta, p, &samples, &beta).unwrap();
    pass &= cert.pass;
    for (a, b) in cert.measured.iter().zip(&maxima) {
        pass &= (a - b).abs() <= 1e-14;
    }
    verdict(
        9,
        pass,
        &format!("pointwise rank defects under f(N+1)^(-1/2) bound, maxima decreasing {maxima:?}"),
    );
}

#[test]
fn criterion_10_doubling_round_trips() {
    let out = run_doubling(&DoublingConfig {
        count: 50,
        bandwidth: 8,
        resolution: 512,
        seed: 10,
    })
    .unwrap();
    let report = out.report;
    let coeff = report["max_coefficient_roundtrip"].as_f64().unwrap();
    let sample = report["max_sample_roundtrip"].as_f64().unwrap();
    let sym = report["max_symmetry_defect"].as_f64().unwrap();
    verdict(
        10,
        out.pass,
        &format!(
            "halve∘double and double∘halve identities (coeff {coeff:.2e}, sample {sample:.2e}); \
             symmetry defect {sym:.2e}"
        ),
    );
}

#[test]
fn criterion_11_scale_axioms() {
    let out = run_scale_axioms(&ScaleAxiomsConfig {
        vectors: 100,
        paths: 100,
        merge_pairs: 20,
        levels: 4,
        truncation: 12,
        path_resolution: 161,
        seed: 11,
        level_spec: None,
    })
    .unwrap();
    let r = &out.report;
    let pass = r["vector_monotone_violations"].as_u64().unwrap() == 0
        && r["path_monotone_violations"].as_u64().unwrap() == 0
        && r["phi_isometry_max_rel"].as_f64().unwrap() <= PHI_ISOMETRY_REL
        && r["merge_mismatches"].as_u64().unwrap() == 0;
    verdict(
        11,
        pass,
        &format!(
            "levels nest monotonically, rescaling is a levelwise isometry ({:.2e}), \
             merge matches the sort oracle",
            r["phi_isometry_max_rel"].as_f64().unwrap()
        ),
    );
}

#[test]
fn criterion_12_growth_table() {
    // library rows
    let rows = growth_table();
    let expect = [
        ("periodic", "nu^2"),
        ("lagrangian", "nu^2"),
        ("hyperkahler", "nu^(2/3)"),
        ("heat_flow", "nu^4"),
    ];
    let mut pass = rows.len() == 4;
    for (row, (name, growth)) in rows.iter().zip(&expect) {
        pass &= row.name == *name && row.growth == *growth;
    }
    pass &= rows[2].growth_exponent == 2.0 / 3.0;

    // and the CLI emission, byte for byte on the CSV table
    let dir = tempfile::tempdir().unwrap();
    let status = std::process::Command::new(env!("CARGO_BIN_EXE_sc-lab"))
        .args(["growth-table", "--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    pass &= status.success();
    let csv = std::fs::read_to_string(dir.path().join("growth-table.csv")).unwrap();
    pass &= csv
        == "name,order,mapping_space,growth\nperiodic,1st,loop space,nu^2\n\
            lagrangian,1st,path space,nu^2\nhyperkahler,1st,Map(M^3,R^{2n}),nu^(2/3)\n\
            heat_flow,2nd,loop space,nu^4\n";
    let json: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("growth-table.json")).unwrap(),
    )
    .unwrap();
    let emitted: Vec<GrowthRow> = serde_json::from_value(json["rows"].clone()).unwrap();
    pass &= emitted == rows;
    verdict(12, pass, "CLI emits the four growth-type rows exactly");
}

#[test]
fn criterion_13_refinement_soundness() {
    let out = run_scale_axioms(&ScaleAxiomsConfig {
        vectors: 1,
        paths: 1,
        merge_pairs: 1,
        levels: 4,
        truncation: 12,
        path_resolution: 161,
        seed: 13,
        level_spec: None,
    })
    .unwrap();
    let rows = out.report["refinement"].as_array().unwrap().clone();
    let mut pass = rows.len() == 3;
    let mut detail = String::new();
    for row in &rows {
        let order = row["fitted_order"].as_f64().unwrap();
        let name = row["norm"].as_str().unwrap();
        detail.push_str(&format!("{name} {order:.2}; "));
        pass &= order >= REFINEMENT_MIN_ORDER;
    }
    verdict(
        13,
        pass,
        &format!("grid norms converge at second order under resolution doubling: {detail}"),
    );
}

#[test]
fn doubling_halving_direct_spot_checks() {
    // structural cross-check kept with the acceptance suite: the doubling
    // of an explicitly compliant analytic path reproduces the closed-form
    // coefficients (cos(πt) ↦ half-weight modes ±1)
    let path = sc_lab::lagrangian::LagPath::sample(257, 1, |t| {
        num_complex::Complex64::new((PI * t).cos(), 0.0)
    })
    .unwrap();
    let sym = double(&path).unwrap();
    assert!((sym.as_loop().mode(1).re - 0.5).abs() < 1e-10);
    assert!((sym.as_loop().mode(-1).re - 0.5).abs() < 1e-10);

    // and halving a symmetric loop evaluates Γ(t/2)
    let mut v = FourierLoop::zero(1);
    *v.mode_mut(1) = num_complex::Complex64::new(0.5, 0.0);
    *v.mode_mut(-1) = num_complex::Complex64::new(0.5, 0.0);
    let back = halve(&SymLoop::claim(v).unwrap(), 65, 1).unwrap();
    for (i, s) in back.samples().iter().enumerate() {
        let t = i as f64 / 64.0;
        assert!((s.re - (PI * t).cos()).abs() < 1e-12);
    }
}
