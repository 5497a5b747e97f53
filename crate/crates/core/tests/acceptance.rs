//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line. All ground truth comes from the enumeration oracle;
//! coefficient draws are uniform in [-3, 3] under fixed seeds.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

mod common;

use std::collections::BTreeMap;

use common::{chain_random, k1_random, rng, K1Shape};
use logitpath::model::{self, ConfounderModel, TreatmentKind};
use logitpath::numeric::logistic;
use logitpath::{binary, chain, decomp, oracle};
use rand::Rng;

fn report(criterion: &str, worst: f64, tolerance: f64) {
    let status = if worst <= tolerance { "PASS" } else { "FAIL" };
    println!("criterion {criterion}: {status} (worst {worst:.3e}, tolerance {tolerance:.1e})");
    assert!(
        worst <= tolerance,
        "criterion {criterion}: worst residual {worst:.3e} exceeds {tolerance:.1e}"
    );
}

fn report_count(criterion: &str, failures: usize, total: usize) {
    let status = if failures == 0 { "PASS" } else { "FAIL" };
    println!("criterion {criterion}: {status} ({failures}/{total} violations)");
    assert_eq!(
        failures, 0,
        "criterion {criterion}: {failures}/{total} violations"
    );
}

#[test]
fn criterion_1_slope_decomposition_matches_oracle() {
    let mut r = rng(0xC1);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let (spec, _) = k1_random(&mut r, K1Shape::plain(TreatmentKind::Continuous));
        for x in [-2.0, -1.0, 0.0, 1.0, 2.0] {
            let total = decomp::marginal_slope(&spec, x, &[]).unwrap().total;
            let numeric =
                oracle::marginal_slope_numeric(&spec, x, &[], oracle::DEFAULT_STEP).unwrap();
            worst = worst.max((total - numeric).abs());
        }
    }
    report("1 (slope vs oracle derivative)", worst, 1e-6);
}

#[test]
fn criterion_2_covariate_slope_matches_oracle() {
    let mut r = rng(0xC2);
    let mut worst: f64 = 0.0;
    for _ in 0..500 {
        let (spec, c) = k1_random(
            &mut r,
            K1Shape::with_covariates(TreatmentKind::Continuous, 2),
        );
        for x in [-2.0, -1.0, 0.0, 1.0, 2.0] {
            let total = decomp::marginal_slope(&spec, x, &c).unwrap().total;
            let numeric =
                oracle::marginal_slope_numeric(&spec, x, &c, oracle::DEFAULT_STEP).unwrap();
            worst = worst.max((total - numeric).abs());
        }
    }
    // mediator-covariate interactions alone change nothing in the shape
    for _ in 0..200 {
        let (spec, c) = k1_random(
            &mut r,
            K1Shape {
                beta_xc: false,
                gamma_xc: false,
                ..K1Shape::with_covariates(TreatmentKind::Continuous, 2)
            },
        );
        let x = r.random_range(-2.0..2.0);
        let d = decomp::marginal_slope(&spec, x, &c).unwrap();
        assert_eq!(d.covariate_treatment, 0.0);
        let numeric = oracle::marginal_slope_numeric(&spec, x, &c, oracle::DEFAULT_STEP).unwrap();
        worst = worst.max((d.total - numeric).abs());
    }
    report("2 (covariate slope vs oracle derivative)", worst, 1e-6);
}

#[test]
fn criterion_3_cpr_decomposition_matches_oracle() {
    let mut r = rng(0xC3);
    let mut worst: f64 = 0.0;
    for trial in 0..1000 {
        let p = trial % 3;
        let (spec, c) = k1_random(&mut r, K1Shape::with_covariates(TreatmentKind::Binary, p));
        let total = binary::marginal_log_cpr(&spec, &c).unwrap().total;
        let numeric = oracle::log_cpr_numeric(&spec, &c).unwrap();
        worst = worst.max((total - numeric).abs());
    }
    report("3 (log cpr vs oracle)", worst, 1e-9);
}

#[test]
fn criterion_4_special_case_identities() {
    let mut r = rng(0xC4);
    let mut failures = 0usize;
    let total_checks = 200 * 7;

    // collapsibility: no mediator-outcome coupling gives total = beta_x
    for _ in 0..200 {
        let (mut spec, _) = k1_random(&mut r, K1Shape::plain(TreatmentKind::Continuous));
        spec.outcome.beta_w[0] = 0.0;
        spec.outcome.beta_xw[0] = 0.0;
        let d = decomp::marginal_slope(&spec, r.random_range(-2.0..2.0), &[]).unwrap();
        if d.total != spec.outcome.beta_x {
            failures += 1;
        }
    }

    // attenuation: treatment-independent mediator without interaction
    for _ in 0..200 {
        let (mut spec, _) = k1_random(&mut r, K1Shape::plain(TreatmentKind::Continuous));
        spec.mediators[0].gamma_x = 0.0;
        spec.outcome.beta_xw[0] = 0.0;
        let d = decomp::marginal_slope(&spec, r.random_range(-2.0..2.0), &[]).unwrap();
        if d.total.abs() > spec.outcome.beta_x.abs() + 1e-15 {
            failures += 1;
        }
    }

    // no reversal: positive direct and interaction coefficients
    for _ in 0..200 {
        let (mut spec, _) = k1_random(&mut r, K1Shape::plain(TreatmentKind::Continuous));
        spec.mediators[0].gamma_x = 0.0;
        spec.outcome.beta_x = r.random_range(0.01..3.0);
        spec.outcome.beta_xw[0] = r.random_range(0.01..3.0);
        let d = decomp::marginal_slope(&spec, r.random_range(-2.0..2.0), &[]).unwrap();
        if d.total <= 0.0 {
            failures += 1;
        }
    }

    // gap range and bracket ranges
    for _ in 0..200 {
        let (spec, _) = k1_random(&mut r, K1Shape::plain(TreatmentKind::Continuous));
        let x = r.random_range(-2.0..2.0);
        let gy = decomp::outcome_gap(&spec, x, &[]).unwrap();
        let gw = decomp::mediator_gap(&spec, x, &[]).unwrap();
        if !(-1.0..=1.0).contains(&gw) {
            failures += 1;
        }
        let bracket_gap = 1.0 - gy * gw;
        let g1 = model::mediator_posterior_logit(&spec, true, x, &[]).unwrap();
        let eta1 = model::outcome_logit(&spec, x, &[true], &[]).unwrap();
        let bracket_mean = logistic(g1) - gw * logistic(eta1);
        if !(0.0..=1.0).contains(&bracket_gap) || !(-1e-15..=1.0 + 1e-15).contains(&bracket_mean) {
            failures += 1;
        }
    }

    // four-relative-risk interaction identity
    for _ in 0..200 {
        let (spec, _) = k1_random(&mut r, K1Shape::plain(TreatmentKind::Binary));
        if binary::interaction_identity_residual(&spec).unwrap().abs() > 1e-9 {
            failures += 1;
        }
    }

    // reversed-view consistency on oracle-constructed joints
    for _ in 0..200 {
        let (mut spec, _) = k1_random(&mut r, K1Shape::plain(TreatmentKind::Binary));
        let gamma0 = spec.mediators[0].gamma0;
        let gamma_x = spec.mediators[0].gamma_x;
        let pi = r.random_range(0.05..0.95);
        let p_w1_x = |x: f64| logistic(gamma0 + gamma_x * x);
        let joint = |x: f64, w: bool| {
            let px = if x == 1.0 { pi } else { 1.0 - pi };
            px * if w { p_w1_x(x) } else { 1.0 - p_w1_x(x) }
        };
        let p_x1_w = |w: bool| joint(1.0, w) / (joint(1.0, w) + joint(0.0, w));
        let delta0 = (p_x1_w(false) / (1.0 - p_x1_w(false))).ln();
        let delta_w = (p_x1_w(true) / (1.0 - p_x1_w(true))).ln() - delta0;
        spec.confounder_view = Some(ConfounderModel { delta0, delta_w });
        let ok = model::check_confounder_consistency(&spec)
            .unwrap()
            .expect("view present")
            .consistent;
        if !ok {
            failures += 1;
        }
    }

    // gap signs agree when no interaction is present
    for _ in 0..200 {
        let (spec, _) = k1_random(
            &mut r,
            K1Shape {
                beta_xw: false,
                ..K1Shape::plain(TreatmentKind::Continuous)
            },
        );
        let x = r.random_range(-2.0..2.0);
        let gy = decomp::outcome_gap(&spec, x, &[]).unwrap();
        let gw = decomp::mediator_gap(&spec, x, &[]).unwrap();
        if gy.signum() != gw.signum() && gy != 0.0 && gw != 0.0 {
            failures += 1;
        }
    }

    report_count("4 (special-case identities)", failures, total_checks);
}

#[test]
fn criterion_5_chain_reduction_exactness() {
    let mut r = rng(0xC5);
    let mut worst: f64 = 0.0;

    // k = 2: starred logit at every design point, and the total
    for _ in 0..500 {
        let spec = chain_random(&mut r, 2, TreatmentKind::Binary);
        let (reduced, _) = chain::reduce_inner_mediator(&spec).unwrap();
        for x in [0.0, 1.0] {
            for w2 in [false, true] {
                let starred = model::outcome_logit(&reduced, x, &[w2], &[]).unwrap();
                let numeric = oracle::conditional_logit_numeric(&spec, x, &[], &[(2, w2)]).unwrap();
                worst = worst.max((starred - numeric).abs());
            }
        }
        let report = chain::total_log_cpr(&spec).unwrap();
        let numeric = oracle::log_cpr_numeric(&spec, &[]).unwrap();
        worst = worst.max((report.total - numeric).abs());
    }

    // k = 3..6: iterated reductions against full enumeration
    for k in 3..=6usize {
        for _ in 0..50 {
            let spec = chain_random(&mut r, k, TreatmentKind::Binary);
            let report = chain::total_log_cpr(&spec).unwrap();
            let numeric = oracle::log_cpr_numeric(&spec, &[]).unwrap();
            worst = worst.max((report.total - numeric).abs());

            // every intermediate starred model stays exact
            let mut current = spec.clone();
            let mut inner_removed = 0;
            while current.k() >= 2 {
                let (next, _) = chain::reduce_inner_mediator(&current).unwrap();
                inner_removed += 1;
                let rem = next.k();
                for pt in 0..1usize << rem {
                    let w: Vec<bool> = (0..rem).map(|i| pt & (1 << i) != 0).collect();
                    let fixed: Vec<(usize, bool)> =
                        (1..=rem).map(|j| (j + inner_removed, w[j - 1])).collect();
                    for x in [0.0, 1.0] {
                        let starred = model::outcome_logit(&next, x, &w, &[]).unwrap();
                        let numeric =
                            oracle::conditional_logit_numeric(&spec, x, &[], &fixed).unwrap();
                        worst = worst.max((starred - numeric).abs());
                    }
                }
                current = next;
            }
        }
    }

    // mixed conditioning: keep an upper set, marginalize the rest
    for _ in 0..100 {
        let spec = chain_random(&mut r, 3, TreatmentKind::Binary);
        let keep: BTreeMap<usize, bool> = [(2, true), (3, false)].into();
        let report = chain::partial_log_cpr(&spec, &keep, &[]).unwrap();
        let fixed = [(2usize, true), (3usize, false)];
        let numeric = oracle::conditional_logit_numeric(&spec, 1.0, &[], &fixed).unwrap()
            - oracle::conditional_logit_numeric(&spec, 0.0, &[], &fixed).unwrap();
        worst = worst.max((report.total - numeric).abs());
    }

    report("5 (chain reduction exactness)", worst, 1e-9);
}

#[test]
fn criterion_6_taylor_linearization() {
    let mut r = rng(0xC6);
    let mut anchor_worst: f64 = 0.0;
    let mut in_window = 0usize;
    let mut usable = 0usize;
    let mut draws = 0usize;

    while usable < 100 && draws < 400 {
        draws += 1;
        let spec = chain_random(&mut r, 2, TreatmentKind::Continuous);
        let x0 = r.random_range(-1.0..1.0);
        let (tilde, coeffs) = chain::taylor_reduce(&spec, x0).unwrap();

        // anchoring: the linearization reproduces the reduced logit at x0
        for w2 in [false, true] {
            let lin = model::outcome_logit(&tilde, x0, &[w2], &[]).unwrap();
            let numeric = oracle::conditional_logit_numeric(&spec, x0, &[], &[(2, w2)]).unwrap();
            anchor_worst = anchor_worst.max((lin - numeric).abs());
        }
        assert_eq!(coeffs.x0, x0);

        // remainder decay: signed slope errors averaged over the symmetric
        // pair; the odd order cancels and the ratio approaches 4
        let err = |d: f64| {
            let e = |x: f64| {
                let approx = decomp::marginal_slope(&tilde, x, &[]).unwrap().total;
                let exact =
                    oracle::marginal_slope_numeric(&spec, x, &[], oracle::DEFAULT_STEP).unwrap();
                approx - exact
            };
            (e(x0 + d) + e(x0 - d)) / 2.0
        };
        let e1 = err(0.1).abs();
        if e1 < 1e-7 {
            continue; // degenerate: nothing to measure
        }
        usable += 1;
        let ratio = err(0.2).abs() / e1;
        if (3.0..=5.0).contains(&ratio) {
            in_window += 1;
        }
    }

    let frac = in_window as f64 / usable as f64;
    println!(
        "criterion 6 (taylor): anchoring worst {anchor_worst:.3e} (tolerance 1e-9), \
         quadratic-decay window {in_window}/{usable} = {:.1}%",
        frac * 100.0
    );
    assert!(anchor_worst <= 1e-9, "anchoring worst {anchor_worst:.3e}");
    assert!(usable >= 100, "not enough non-degenerate draws: {usable}");
    assert!(
        frac >= 0.9,
        "criterion 6: only {:.1}% of draws inside the [3, 5] decay window",
        frac * 100.0
    );
    println!("criterion 6 (taylor behavior): PASS");
}

#[test]
fn criterion_7_bounds_soundness() {
    let mut r = rng(0xC7);
    let mut violations = 0usize;
    for _ in 0..1000 {
        let (spec, _) = k1_random(&mut r, K1Shape::plain(TreatmentKind::Continuous));
        let x = r.random_range(-2.0..2.0);
        let slope = oracle::marginal_slope_numeric(&spec, x, &[], oracle::DEFAULT_STEP).unwrap();
        let b = decomp::slope_bounds(
            decomp::CoefInput::Known(spec.outcome.beta_x),
            decomp::CoefInput::Known(spec.outcome.beta_xw[0]),
            decomp::CoefInput::Known(spec.mediators[0].gamma_x),
        )
        .unwrap();
        if !(b.lower - 1e-9 <= slope && slope <= b.upper + 1e-9) {
            violations += 1;
        }
    }
    // interval-valued coefficients must keep containment as well
    for _ in 0..200 {
        let (mut spec, _) = k1_random(&mut r, K1Shape::plain(TreatmentKind::Continuous));
        let lo = spec.outcome.beta_xw[0].min(0.0) - r.random_range(0.0..0.5);
        let hi = spec.outcome.beta_xw[0].max(0.0) + r.random_range(0.0..0.5);
        spec.outcome.beta_xw[0] = r.random_range(lo..hi);
        let x = r.random_range(-2.0..2.0);
        let slope = oracle::marginal_slope_numeric(&spec, x, &[], oracle::DEFAULT_STEP).unwrap();
        let b = decomp::slope_bounds(
            decomp::CoefInput::Known(spec.outcome.beta_x),
            decomp::CoefInput::Interval {
                lower: lo,
                upper: hi,
            },
            decomp::CoefInput::Known(spec.mediators[0].gamma_x),
        )
        .unwrap();
        if !(b.lower - 1e-9 <= slope && slope <= b.upper + 1e-9) {
            violations += 1;
        }
    }
    report_count("7 (bounds soundness)", violations, 1200);
}
