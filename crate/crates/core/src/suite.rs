//! The full verification suite: every identity, group law, conjugation,
//! flow, and quadrature check, aggregated into deterministic reports.

use crate::autgroups::{
    catalog, conjugate_through, elliptic_pullback, extendability_probe, faithfulness_check,
    group_law_check, halfplane_iso, hyperbolic_target, parabolic_target, plane_translation,
    probe_sequence, scaling_pullback_k1, semidirect_check, ExtendClass,
};
use crate::bkstructure::{
    generator, is_bk_automorphism, vanishes_to_order, DEFAULT_AUT_TOL, DEFAULT_NV_THRESHOLD,
};
use crate::dynamics::{
    flow_endpoint, mobius_generator, mobius_reference, one_parameter_check, strip_example_check,
};
use crate::geometry::{
    compose, jacobian, map_max_diff, ComplexVectorField, DomainTag, PlanarMap, Point,
};
use crate::holospaces::{
    b_bargmann_member, catalog_bholo, flat_function, grid, norm_convergence, residual_sup,
    u_function, Membership, QuadratureSpec,
};
use crate::report::VerificationReport;
use crate::symexpr::{parse_expr, semantically_equal, simplify, Expr, Sampler, Var};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_4, PI};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Runs every check for the requested `k` values and returns the reports
/// sorted by check name. Individual failures (including panics) never abort
/// the run.
pub fn run_suite(k_values: &[u32], seed: u64) -> Vec<VerificationReport> {
    let mut reports = Vec::new();
    let mut run = |name: &str, f: &mut dyn FnMut() -> VerificationReport| {
        let name = name.to_string();
        let report = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|payload| {
            let msg = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic with non-string payload".to_string());
            let mut r = VerificationReport::new(&name, "internal");
            r.fail("check panicked", "", &msg, "no panic");
            r
        });
        reports.push(report);
    };

    // expression-layer properties
    run("symexpr/parse-roundtrip", &mut || parse_roundtrip_check(seed));
    run("symexpr/derivative-fd", &mut || derivative_fd_check(seed));
    run("symexpr/simplify-semantics", &mut || {
        simplify_semantics_check(seed)
    });

    // pushforward example: the shear (e^y x, y) relates ∂y to x∂x + ∂y
    run("pushforward/shear-example", &mut || shear_example_check());

    for &k in k_values {
        run(&format!("generator/vanishing-order/k={k}"), &mut || {
            generator_vanishing_check(k, seed)
        });
        run(&format!("aut-criterion/catalog/k={k}"), &mut || {
            aut_catalog_check(k, seed)
        });
        run(&format!("aut-criterion/counterexamples/k={k}"), &mut || {
            counterexamples_check(k, seed)
        });
        run(&format!("halfplane-iso/k={k}"), &mut || {
            halfplane_iso_check(k, seed)
        });
        run(&format!("conjugation/k={k}"), &mut || {
            conjugation_check(k, seed)
        });
        run(&format!("extendability/elliptic/k={k}"), &mut || {
            elliptic_extendability_check(k)
        });
        if k == 1 {
            run("extendability/scaling/k=1", &mut || {
                scaling_extendability_check()
            });
        }
        let cat = match catalog(k) {
            Ok(c) => c,
            Err(e) => {
                let msg = e.to_string();
                run(&format!("group-law/catalog/k={k}"), &mut || {
                    let mut r = VerificationReport::new(
                        &format!("group-law/catalog/k={k}"),
                        "classified automorphism groups",
                    );
                    r.fail("catalog construction failed", "", &msg, "");
                    r
                });
                continue;
            }
        };
        let s = Sampler::generic(seed);
        let params = [(0.7, -0.4), (-1.3, 0.5), (2.0, 1.0)];
        for fam in &cat.families {
            run(&format!("group-law/{}/k={k}", fam.name), &mut || {
                let mut r = group_law_check(fam, &params, &s, 1e-10);
                r.check_name = format!("group-law/{}/k={k}", fam.name);
                r
            });
            run(&format!("one-parameter/{}/k={k}", fam.name), &mut || {
                let v = family_generator(k, &fam.name);
                let mut r = one_parameter_check(&v, fam, &s);
                r.check_name = format!("one-parameter/{}/k={k}", fam.name);
                r
            });
        }
        run(&format!("group-relations/k={k}"), &mut || {
            group_relations_check(k, seed)
        });
        run(&format!("semidirect/k={k}"), &mut || {
            semidirect_report(k, seed)
        });
        run(&format!("faithfulness-on-z/k={k}"), &mut || {
            faithfulness_check(k).unwrap_or_else(|e| {
                let mut r = VerificationReport::new(
                    &format!("faithfulness-on-z/k={k}"),
                    "action on the singular locus",
                );
                r.fail("check errored", "", &e.to_string(), "");
                r
            })
        });
    }

    // flows
    run("flow/mobius-reference", &mut || mobius_flow_check(seed));
    run("strip-mobius-example", &mut || strip_example_check(seed));

    // b-holomorphic functions and norms
    run("residual/bholo", &mut || residual_check());
    run("flatness/bholo", &mut || flatness_check());
    run("bargmann/norms", &mut || norms_check());
    run("bargmann/membership", &mut || membership_check());

    reports.sort_by(|a, b| a.check_name.cmp(&b.check_name));
    reports
}

/// The infinitesimal generator of each catalog family.
fn family_generator(k: u32, name: &str) -> ComplexVectorField {
    match name {
        "vertical-translations" => ComplexVectorField::new(Expr::zero(), Expr::one()),
        "horizontal-scalings" => ComplexVectorField::new(Expr::x(), Expr::zero()),
        "hyperbolic" => ComplexVectorField::new(
            -(Expr::x() / Expr::num((k - 1) as f64)),
            Expr::y(),
        ),
        other => panic!("unknown family {other}"),
    }
}

// ---- expression-layer checks ----

const GENERIC_EXPRS: &[&str] = &[
    "x^2*y - 3*x + 1",
    "sin(x)*cos(y) + tan(x*y/4)",
    "exp(i*y)*x",
    "(x+i*y)^3",
    "-x^-2",
    "2*e + pi*x",
    "conj(x+i*y)*w",
    "sqrt(x^2+y^2+1)",
    "x/(1+y^2)",
    "ifpos(x, exp(-1/x), 0)",
    "re(w^2) + i*im(w^2)",
];

const POSITIVE_X_EXPRS: &[&str] = &["log(x)*x", "x^0.5", "log(x)/(1+log(x)^2)", "x^(1/3)*y"];

fn parse_roundtrip_check(seed: u64) -> VerificationReport {
    let mut report =
        VerificationReport::new("symexpr/parse-roundtrip", "expression grammar round trip");
    let generic = Sampler::generic(seed);
    let positive = Sampler::right_half_plane(seed);
    for (list, s) in [(GENERIC_EXPRS, &generic), (POSITIVE_X_EXPRS, &positive)] {
        for src in list {
            let e = match parse_expr(src) {
                Ok(e) => e,
                Err(err) => {
                    report.fail("parse failed", src, &err.to_string(), "parses");
                    continue;
                }
            };
            let printed = e.to_string();
            match parse_expr(&printed) {
                Ok(e2) => match semantically_equal(&e, &e2, s, 1e-10) {
                    Ok(()) => {}
                    Err(f) => report.fail(
                        "round trip changed the value",
                        src,
                        &format!("{f:?}"),
                        "semantically equal",
                    ),
                },
                Err(err) => report.fail(
                    "printed form does not reparse",
                    &printed,
                    &err.to_string(),
                    "parses",
                ),
            }
        }
    }
    report
}

fn derivative_fd_check(seed: u64) -> VerificationReport {
    let mut report = VerificationReport::new(
        "symexpr/derivative-fd",
        "symbolic derivative vs finite differences",
    );
    let s = Sampler::generic(seed).with_count(24);
    let h = 1e-6;
    for src in [
        "x^2*y",
        "sin(x*y)",
        "exp(x)*cos(y)",
        "x/(1+y^2)",
        "(x+i*y)^2",
        "sqrt(x^2+y^2+1)",
    ] {
        let e = parse_expr(src).expect("test expression parses");
        for var in [Var::X, Var::Y] {
            let d = e.differentiate(var);
            for (x, y) in s.points() {
                let (xp, xm, yp, ym) = match var {
                    Var::X => (x + h, x - h, y, y),
                    _ => (x, x, y + h, y - h),
                };
                let (fp, fm, dv) = match (
                    e.eval_at(xp, yp, None),
                    e.eval_at(xm, ym, None),
                    d.eval_at(x, y, None),
                ) {
                    (Ok(a), Ok(b), Ok(c)) => (a, b, c),
                    _ => {
                        report.fail("evaluation failed", src, &format!("({x}, {y})"), "");
                        continue;
                    }
                };
                let fd = (fp - fm) / (2.0 * h);
                let err = (fd - dv).norm() / (1.0 + dv.norm());
                report.record_error(err);
                if err > 1e-5 {
                    report.fail(
                        "derivative disagrees with centered difference",
                        &format!("{src} d/d{} at ({x}, {y})", var.name()),
                        &format!("{err:.3e}"),
                        "<= 1e-5 (relative)",
                    );
                }
            }
        }
    }
    report
}

fn simplify_semantics_check(seed: u64) -> VerificationReport {
    let mut report = VerificationReport::new(
        "symexpr/simplify-semantics",
        "simplifier preserves semantics",
    );
    let generic = Sampler::generic(seed);
    let positive = Sampler::right_half_plane(seed);
    for (list, s) in [(GENERIC_EXPRS, &generic), (POSITIVE_X_EXPRS, &positive)] {
        for src in list {
            let e = parse_expr(src).expect("test expression parses");
            let simplified = simplify(&e);
            if let Err(f) = semantically_equal(&e, &simplified, s, 1e-10) {
                report.fail(
                    "simplify changed the value",
                    src,
                    &format!("{f:?}"),
                    "semantically equal",
                );
            }
        }
    }
    report
}

// ---- pushforward example ----

/// `(x, y) ↦ (e^y x, y)` carries `∂y` to `x ∂x + ∂y`, with the residual
/// vanishing symbolically.
fn shear_example_check() -> VerificationReport {
    let mut report = VerificationReport::new(
        "pushforward/shear-example",
        "pushforward preserving the real b-module",
    );
    let m = PlanarMap::new(Expr::y().exp() * Expr::x(), Expr::y(), DomainTag::Plane);
    let dy = ComplexVectorField::new(Expr::zero(), Expr::one());
    let target = ComplexVectorField::new(Expr::x(), Expr::one());
    // symbolic pushforward: Dm · ∂y, compared with the target at m(p)
    let j = jacobian(&m);
    let pushed = (
        simplify(&(j[0][0].clone() * dy.a.clone() + j[0][1].clone() * dy.b.clone())),
        simplify(&(j[1][0].clone() * dy.a.clone() + j[1][1].clone() * dy.b.clone())),
    );
    let target_at_m = (
        simplify(&target.a.subst_xy(&m.u, &m.v)),
        simplify(&target.b.subst_xy(&m.u, &m.v)),
    );
    for (name, lhs, rhs) in [
        ("x-component", &pushed.0, &target_at_m.0),
        ("y-component", &pushed.1, &target_at_m.1),
    ] {
        let residual = simplify(&(lhs.clone() - rhs.clone()));
        if !residual.is_zero() {
            report.fail(
                "symbolic pushforward residual is not zero",
                name,
                &residual.to_string(),
                "0",
            );
        }
    }
    report
}

// ---- b^k checks ----

fn generator_vanishing_check(k: u32, seed: u64) -> VerificationReport {
    let mut report = VerificationReport::new(
        &format!("generator/vanishing-order/k={k}"),
        "standard generator and vanishing order",
    );
    let s = Sampler::generic(seed).with_count(16);
    let lk = generator(k);
    match vanishes_to_order(&lk.a, k, &s, 1e-12) {
        Ok(true) => {}
        Ok(false) => report.fail(
            "x^k does not vanish to order k on the axis",
            &format!("k={k}"),
            "false",
            "true",
        ),
        Err(e) => report.fail("vanishing check errored", "", &e.to_string(), ""),
    }
    // one order higher must fail: x^k does not vanish to order k+1
    match vanishes_to_order(&lk.a, k + 1, &s, 1e-12) {
        Ok(false) => {}
        Ok(true) => report.fail(
            "x^k reported as vanishing to order k+1",
            &format!("k={k}"),
            "true",
            "false",
        ),
        Err(e) => report.fail("vanishing check errored", "", &e.to_string(), ""),
    }
    report
}

fn aut_catalog_check(k: u32, seed: u64) -> VerificationReport {
    let mut report = VerificationReport::new(
        &format!("aut-criterion/catalog/k={k}"),
        "catalog families satisfy the automorphism criterion",
    );
    let s = Sampler::near_z(seed);
    let cat = match catalog(k) {
        Ok(c) => c,
        Err(e) => {
            report.fail("catalog construction failed", "", &e.to_string(), "");
            return report;
        }
    };
    for fam in &cat.families {
        for t in [-1.0, -0.3, 0.7, 2.0] {
            match is_bk_automorphism(&fam.at(t), k, &s, DEFAULT_AUT_TOL, DEFAULT_NV_THRESHOLD) {
                Ok(v) => {
                    report.record_error(v.max_cross_det);
                    if !v.holds {
                        report.fail(
                            "catalog family fails the criterion",
                            &format!("{} at t={t}", fam.name),
                            v.failure_reason.as_deref().unwrap_or("unknown"),
                            "holds",
                        );
                    }
                }
                Err(e) => report.fail(
                    "criterion check errored",
                    &format!("{} at t={t}", fam.name),
                    &e.to_string(),
                    "",
                ),
            }
        }
    }
    // the flip holds with constant λ = (-1)^(k+1)
    let expected_lambda = if k % 2 == 1 { 1.0 } else { -1.0 };
    match is_bk_automorphism(&cat.flip, k, &s, DEFAULT_AUT_TOL, DEFAULT_NV_THRESHOLD) {
        Ok(v) => {
            if !v.holds {
                report.fail(
                    "flip fails the criterion",
                    "flip",
                    v.failure_reason.as_deref().unwrap_or("unknown"),
                    "holds",
                );
            }
            for (p, (lr, li)) in &v.lambda_samples {
                let err = ((lr - expected_lambda).powi(2) + li.powi(2)).sqrt();
                report.record_error(err);
                if err > 1e-8 {
                    report.fail(
                        "flip proportionality factor is not constant",
                        &format!("({}, {})", p.x, p.y),
                        &format!("λ = {lr} + {li}i"),
                        &format!("λ = {expected_lambda}"),
                    );
                }
            }
        }
        Err(e) => report.fail("flip check errored", "flip", &e.to_string(), ""),
    }
    report
}

fn counterexamples_check(k: u32, seed: u64) -> VerificationReport {
    let mut report = VerificationReport::new(
        &format!("aut-criterion/counterexamples/k={k}"),
        "maps preserving only the real b-module are rejected",
    );
    let s = Sampler::near_z(seed);
    let shear = PlanarMap::new(Expr::y().exp() * Expr::x(), Expr::y(), DomainTag::Plane);
    let vertical_shear = PlanarMap::new(Expr::x(), Expr::y() + Expr::x(), DomainTag::Plane);
    for (name, m) in [("(e^y x, y)", &shear), ("(x, y+x)", &vertical_shear)] {
        match is_bk_automorphism(m, k, &s, DEFAULT_AUT_TOL, DEFAULT_NV_THRESHOLD) {
            Ok(v) => {
                if v.holds {
                    report.fail(
                        "counterexample passed the criterion",
                        name,
                        "holds",
                        "fails",
                    );
                } else {
                    report.note(
                        "counterexample correctly rejected",
                        name,
                        v.failure_reason.as_deref().unwrap_or(""),
                        "fails",
                    );
                }
            }
            Err(e) => report.fail("criterion check errored", name, &e.to_string(), ""),
        }
    }
    report
}

fn halfplane_iso_check(k: u32, seed: u64) -> VerificationReport {
    let mut report = VerificationReport::new(
        &format!("halfplane-iso/k={k}"),
        "half-plane model isomorphism",
    );
    let iso = match halfplane_iso(k) {
        Ok(i) => i,
        Err(e) => {
            report.fail(
                "construction-time intertwining check failed",
                "",
                &e.to_string(),
                "intertwines",
            );
            return report;
        }
    };
    // inverse round trip on the right half-plane
    let s = Sampler::right_half_plane(seed);
    let id = PlanarMap::identity();
    match map_max_diff(&compose(&iso.inverse, &iso.map), &id, &s) {
        Ok(err) => {
            report.record_error(err);
            if err > 1e-9 {
                report.fail(
                    "inverse ∘ map is not the identity",
                    "right half-plane",
                    &format!("{err:.3e}"),
                    "<= 1e-9",
                );
            }
        }
        Err(e) => report.fail("round trip errored", "", &e.to_string(), ""),
    }
    // and on the target model
    let target_sampler = match iso.target {
        DomainTag::UpperHalfPlane => Sampler {
            y_min: 0.1,
            y_max: 3.0,
            seed,
            ..Sampler::default()
        },
        _ => Sampler::generic(seed),
    };
    match map_max_diff(&compose(&iso.map, &iso.inverse), &id, &target_sampler) {
        Ok(err) => {
            report.record_error(err);
            if err > 1e-9 {
                report.fail(
                    "map ∘ inverse is not the identity",
                    "target model",
                    &format!("{err:.3e}"),
                    "<= 1e-9",
                );
            }
        }
        Err(e) => report.fail("round trip errored", "", &e.to_string(), ""),
    }
    report
}

fn conjugation_check(k: u32, seed: u64) -> VerificationReport {
    let mut report = VerificationReport::new(
        &format!("conjugation/k={k}"),
        "conjugation of model automorphisms to the half-plane",
    );
    let iso = match halfplane_iso(k) {
        Ok(i) => i,
        Err(e) => {
            report.fail("isomorphism construction failed", "", &e.to_string(), "");
            return report;
        }
    };
    let s = Sampler::right_half_plane(seed);
    let expect = |name: &str, got: &PlanarMap, want: &PlanarMap, report: &mut VerificationReport| {
        match map_max_diff(got, want, &s) {
            Ok(err) => {
                report.record_error(err);
                if err > 1e-10 {
                    report.fail(name, "", &format!("{err:.3e}"), "<= 1e-10");
                }
            }
            Err(e) => report.fail(name, "", &e.to_string(), ""),
        }
    };
    if k == 1 {
        for s0 in [0.7, -1.2] {
            let got = conjugate_through(&iso, &plane_translation(s0, 0.0));
            let want = PlanarMap::new(
                Expr::num(s0).exp() * Expr::x(),
                Expr::y(),
                DomainTag::RightHalfPlane,
            );
            expect(
                &format!("pullback of z ↦ z + {s0} is (e^{s0} x, y)"),
                &got,
                &want,
                &mut report,
            );
        }
        for t0 in [0.9, -0.5] {
            let got = conjugate_through(&iso, &plane_translation(0.0, t0));
            let want = PlanarMap::new(
                Expr::x(),
                Expr::y() + Expr::num(t0),
                DomainTag::RightHalfPlane,
            );
            expect(
                &format!("pullback of z ↦ z + {t0}i is (x, y + {t0})"),
                &got,
                &want,
                &mut report,
            );
        }
        report.note(
            "real translations of the model pull back to horizontal scalings",
            "z ↦ z + s",
            "(e^s x, y)",
            "(e^s x, y) — derived with the conjugation engine",
        );
    } else {
        let km1 = (k - 1) as f64;
        let got_h = conjugate_through(&iso, &hyperbolic_target());
        let want_h = PlanarMap::new(
            (-(Expr::t() / Expr::num(km1))).exp() * Expr::x(),
            Expr::t().exp() * Expr::y(),
            DomainTag::RightHalfPlane,
        );
        expect(
            "hyperbolic action pulls back to (e^{-t/(k-1)} x, e^t y)",
            &got_h,
            &want_h,
            &mut report,
        );
        let got_p = conjugate_through(&iso, &parabolic_target());
        let want_p = PlanarMap::new(
            Expr::x(),
            Expr::y() + Expr::t(),
            DomainTag::RightHalfPlane,
        );
        expect(
            "parabolic action pulls back to (x, y + t)",
            &got_p,
            &want_p,
            &mut report,
        );
    }
    report
}

fn elliptic_extendability_check(k: u32) -> VerificationReport {
    let mut report = VerificationReport::new(
        &format!("extendability/elliptic/k={k}"),
        "elliptic pullbacks do not extend across the singular locus",
    );
    if k < 2 {
        report.undecided("elliptic pullback requires k >= 2; skipped for k = 1");
        return report;
    }
    let iso = match halfplane_iso(k) {
        Ok(i) => i,
        Err(e) => {
            report.fail("isomorphism construction failed", "", &e.to_string(), "");
            return report;
        }
    };
    let t = FRAC_PI_4;
    let cot_t = 1.0 / t.tan();
    let xs = probe_sequence();
    for y0 in [0.0, 1.0] {
        match extendability_probe(|p| elliptic_pullback(&iso, t, p), y0, &xs) {
            Ok(probe) => match probe.classification {
                ExtendClass::Diverges {
                    second_component_trend,
                } => {
                    let (last_x, last) = *probe.samples.last().expect("nonempty probe");
                    if last.x <= 1e3 {
                        report.fail(
                            "first component did not escape",
                            &format!("y0={y0}, x={last_x:.1e}"),
                            &format!("{}", last.x),
                            "> 1e3",
                        );
                    }
                    match second_component_trend {
                        Some(v) => {
                            let err = (v - cot_t).abs();
                            report.record_error(err);
                            if err > 1e-3 {
                                report.fail(
                                    "second component does not settle at cot(t)",
                                    &format!("y0={y0}"),
                                    &format!("{v}"),
                                    &format!("{cot_t} ± 1e-3"),
                                );
                            }
                        }
                        None => report.fail(
                            "second component has no settled trend",
                            &format!("y0={y0}"),
                            "none",
                            &format!("≈ {cot_t}"),
                        ),
                    }
                }
                ExtendClass::Extends { limit } => report.fail(
                    "elliptic pullback classified as extending",
                    &format!("y0={y0}"),
                    &format!("limit ({}, {})", limit.x, limit.y),
                    "diverges",
                ),
            },
            Err(e) => report.fail("probe errored", &format!("y0={y0}"), &e.to_string(), ""),
        }
    }
    report
}

fn scaling_extendability_check() -> VerificationReport {
    let mut report = VerificationReport::new(
        "extendability/scaling/k=1",
        "non-real scalings of the model do not extend",
    );
    let xs = probe_sequence();
    for (s0, t0) in [(1.0, 1.0), (1.0, 0.5)] {
        let m = scaling_pullback_k1(s0, t0);
        match extendability_probe(|p| m.apply(p), 0.3, &xs) {
            Ok(probe) => {
                if let ExtendClass::Extends { limit } = probe.classification {
                    report.fail(
                        "pullback with t ≠ 0 classified as extending",
                        &format!("c = {s0} + {t0}i"),
                        &format!("limit ({}, {})", limit.x, limit.y),
                        "diverges",
                    );
                }
            }
            Err(e) => report.fail(
                "probe errored",
                &format!("c = {s0} + {t0}i"),
                &e.to_string(),
                "",
            ),
        }
    }
    // the real scaling (t = 0) does extend: it is the horizontal scaling
    let m = scaling_pullback_k1(std::f64::consts::E, 0.0);
    match extendability_probe(|p| m.apply(p), 0.3, &xs) {
        Ok(probe) => {
            if let ExtendClass::Diverges { .. } = probe.classification {
                report.fail(
                    "real scaling pullback classified as diverging",
                    "c = e",
                    "diverges",
                    "extends to (0, 0.3)",
                );
            }
        }
        Err(e) => report.fail("probe errored", "c = e", &e.to_string(), ""),
    }
    report
}

fn group_relations_check(k: u32, seed: u64) -> VerificationReport {
    let mut report = VerificationReport::new(
        &format!("group-relations/k={k}"),
        "commutation relations of the catalog families",
    );
    let cat = match catalog(k) {
        Ok(c) => c,
        Err(e) => {
            report.fail("catalog construction failed", "", &e.to_string(), "");
            return report;
        }
    };
    let s = Sampler::generic(seed);
    let translations = &cat.families[0];
    let second = &cat.families[1];
    for (s0, t0) in [(0.8, -0.6), (-1.1, 1.4)] {
        if k == 1 {
            // abelian: T_s ∘ S_t = S_t ∘ T_s
            let lhs = compose(&translations.at(s0), &second.at(t0));
            let rhs = compose(&second.at(t0), &translations.at(s0));
            match map_max_diff(&lhs, &rhs, &s) {
                Ok(err) => {
                    report.record_error(err);
                    if err > 1e-10 {
                        report.fail(
                            "k=1 families do not commute",
                            &format!("s={s0}, t={t0}"),
                            &format!("{err:.3e}"),
                            "<= 1e-10",
                        );
                    }
                }
                Err(e) => report.fail("comparison errored", "", &e.to_string(), ""),
            }
        } else {
            // semidirect relation: H_t ∘ T_s ∘ H_{-t} = T_{e^t s}
            let lhs = compose(&second.at(t0), &compose(&translations.at(s0), &second.at(-t0)));
            let rhs = translations.at(t0.exp() * s0);
            match map_max_diff(&lhs, &rhs, &s) {
                Ok(err) => {
                    report.record_error(err);
                    if err > 1e-10 {
                        report.fail(
                            "H_t T_s H_{-t} differs from T_{e^t s}",
                            &format!("s={s0}, t={t0}"),
                            &format!("{err:.3e}"),
                            "<= 1e-10",
                        );
                    }
                }
                Err(e) => report.fail("comparison errored", "", &e.to_string(), ""),
            }
        }
    }
    report
}

fn semidirect_report(k: u32, seed: u64) -> VerificationReport {
    let s = Sampler::generic(seed);
    semidirect_check(k, &s, 1e-10).unwrap_or_else(|e| {
        let mut r = VerificationReport::new(
            &format!("semidirect/k={k}"),
            "full group as semidirect product with the flip",
        );
        r.fail("check errored", "", &e.to_string(), "");
        r
    })
}

// ---- flow checks ----

fn mobius_flow_check(seed: u64) -> VerificationReport {
    let mut report = VerificationReport::new(
        "flow/mobius-reference",
        "RK4 flow of the quadratic field matches the Möbius action",
    );
    let v = mobius_generator();
    let t = 0.5;
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(0x666f)); // distinct stream
    let mut produced = 0usize;
    while produced < 20 {
        let p = Point::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if (num_complex::Complex64::new(1.0, 0.0) - t * p.as_complex()).norm() <= 0.2 {
            continue;
        }
        produced += 1;
        match (flow_endpoint(&v, p, t, 1e-3), mobius_reference(p, t)) {
            (Ok(flowed), Ok(reference)) => {
                let err = flowed.dist(reference);
                report.record_error(err);
                if err > 1e-8 {
                    report.fail(
                        "RK4 endpoint differs from z/(1-tz)",
                        &format!("z0 = ({}, {})", p.x, p.y),
                        &format!("{err:.3e}"),
                        "<= 1e-8",
                    );
                }
            }
            (Err(e), _) | (_, Err(e)) => report.fail(
                "flow or reference evaluation errored",
                &format!("z0 = ({}, {})", p.x, p.y),
                &e.to_string(),
                "",
            ),
        }
    }
    report
}

// ---- function-space checks ----

fn residual_check() -> VerificationReport {
    let mut report = VerificationReport::new(
        "residual/bholo",
        "catalog functions are annihilated by the structure generator",
    );
    let g = grid(1e-3, 1.0, 0.05, -0.7, 0.7, 0.1);
    let u = u_function();
    for n in 1..=3i64 {
        let f = if n == 1 { u.clone() } else { u.clone().powi(n) };
        match residual_sup(&f, 1, &g) {
            Ok(r) => {
                report.record_error(r.sup);
                if !r.symbolic_zero {
                    report.fail(
                        "residual did not simplify to zero",
                        &format!("u^{n}"),
                        &format!("sup = {:.3e}", r.sup),
                        "symbolic 0",
                    );
                }
            }
            Err(e) => report.fail("residual errored", &format!("u^{n}"), &e.to_string(), ""),
        }
    }
    match residual_sup(&flat_function(), 1, &g) {
        Ok(r) => {
            report.record_error(r.sup);
            if r.sup > 1e-10 {
                report.fail(
                    "flat function residual too large",
                    "flat",
                    &format!("{:.3e}", r.sup),
                    "<= 1e-10",
                );
            }
        }
        Err(e) => report.fail("residual errored", "flat", &e.to_string(), ""),
    }
    // sanity: the anti-holomorphic conj(u) is not annihilated
    match residual_sup(&u.conj(), 1, &g) {
        Ok(r) => {
            if r.symbolic_zero || r.sup < 1e-6 {
                report.fail(
                    "conj(u) reported as b-holomorphic",
                    "conj(u)",
                    &format!("sup = {:.3e}", r.sup),
                    "nonzero residual",
                );
            }
        }
        Err(e) => report.fail("residual errored", "conj(u)", &e.to_string(), ""),
    }
    report
}

fn flatness_check() -> VerificationReport {
    let mut report = VerificationReport::new(
        "flatness/bholo",
        "all derivatives of the flat function vanish at the singular locus",
    );
    let f = flat_function();
    let mut d = f;
    for order in 1..=3u32 {
        d = d.differentiate(Var::X);
        for y in [-0.5, 0.0, 0.5] {
            match d.eval_at(1e-3, y, None) {
                Ok(v) => {
                    report.record_error(v.norm());
                    if v.norm() >= 1e-40 {
                        report.fail(
                            "x-derivative not flat near the axis",
                            &format!("order {order}, y={y}"),
                            &format!("{:.3e}", v.norm()),
                            "< 1e-40",
                        );
                    }
                }
                Err(e) => report.fail(
                    "derivative evaluation errored",
                    &format!("order {order}, y={y}"),
                    &e.to_string(),
                    "",
                ),
            }
        }
    }
    report
}

fn norms_check() -> VerificationReport {
    let mut report = VerificationReport::new(
        "bargmann/norms",
        "quadrature reproduces closed-form Gaussian norms",
    );
    let w = Expr::x() + Expr::i() * Expr::y();
    let cases: [(&str, Expr, f64); 3] = [
        ("1", Expr::one(), PI),
        ("e^w", w.clone().exp(), PI * 1f64.exp()),
        ("e^{2w}", (Expr::int(2) * w).exp(), PI * 4f64.exp()),
    ];
    for (name, f, want) in cases {
        match norm_convergence(&f, 64) {
            Ok((value, rel)) => {
                let err = (value - want).abs() / want;
                report.record_error(err);
                if err > 1e-6 {
                    report.fail(
                        "norm differs from the closed form",
                        name,
                        &format!("{value}"),
                        &format!("{want} (rel 1e-6)"),
                    );
                }
                if rel >= 1e-8 {
                    report.fail(
                        "N vs 2N quadrature values disagree",
                        name,
                        &format!("{rel:.3e}"),
                        "< 1e-8",
                    );
                }
            }
            Err(e) => report.fail("quadrature errored", name, &e.to_string(), ""),
        }
    }
    report
}

fn membership_check() -> VerificationReport {
    let mut report = VerificationReport::new(
        "bargmann/membership",
        "membership in the b-Segal-Bargmann space",
    );
    let q = QuadratureSpec::default();
    for f in catalog_bholo() {
        if f.name == "flat" {
            report.note(
                "flat function handled by residual/flatness checks only",
                &f.name,
                "skipped",
                "skipped (pushforward overflows at far quadrature nodes)",
            );
            continue;
        }
        let expect_member = f.name.starts_with("u^");
        let expected_norm = match f.name.as_str() {
            "u^1" => Some(PI * 1f64.exp()),
            "u^2" => Some(PI * 4f64.exp()),
            "u^3" => Some(PI * 9f64.exp()),
            _ => None,
        };
        match b_bargmann_member(&f, &q) {
            Ok(Membership::Member { norm_sq }) => {
                if !expect_member {
                    report.fail("unexpected member", &f.name, "member", "not member");
                } else if let Some(want) = expected_norm {
                    let err = (norm_sq - want).abs() / want;
                    report.record_error(err);
                    if err > 1e-6 {
                        report.fail(
                            "member norm differs from the closed form",
                            &f.name,
                            &format!("{norm_sq}"),
                            &format!("{want} (rel 1e-6)"),
                        );
                    }
                }
            }
            Ok(Membership::NotMember { rel_change }) => {
                if expect_member {
                    report.fail(
                        "member misclassified",
                        &f.name,
                        &format!("not member (rel {rel_change:.3e})"),
                        "member",
                    );
                } else {
                    report.note(
                        "divergent norm detected",
                        &f.name,
                        &format!("rel change {rel_change:.3e}"),
                        "not member",
                    );
                }
            }
            Ok(Membership::Undecided { rel_change }) => {
                if expect_member {
                    report.fail(
                        "member came back undecided",
                        &f.name,
                        &format!("rel {rel_change:.3e}"),
                        "member",
                    );
                } else {
                    report.note(
                        "quadrature undecided",
                        &f.name,
                        &format!("rel {rel_change:.3e}"),
                        "not member",
                    );
                }
            }
            Err(e) => {
                if expect_member {
                    report.fail("membership check errored", &f.name, &e.to_string(), "");
                } else {
                    report.note(
                        "quadrature rejected the integrand",
                        &f.name,
                        &e.to_string(),
                        "not member",
                    );
                }
            }
        }
    }
    report
}
