//! Acceptance gate: one test per criterion, each printing a single
//! pass/fail line. Criterion 9 (the CLI end-to-end run) lives in the CLI
//! crate's integration tests.

use bkplane::autgroups::{
    catalog, conjugate_through, elliptic_pullback, extendability_probe, faithfulness_check,
    group_law_check, halfplane_iso, hyperbolic_target, parabolic_target, plane_translation,
    probe_sequence, scaling_pullback_k1, semidirect_check, ExtendClass,
};
use bkplane::bkstructure::is_bk_automorphism;
use bkplane::dynamics::{
    flow_endpoint, integrate_flow, mobius_generator, mobius_reference, strip_field,
    strip_seed_grid, FlowProblem,
};
use bkplane::geometry::{
    compose, jacobian, map_max_diff, relates, ComplexVectorField, DomainTag, PlanarMap, Point,
};
use bkplane::holospaces::{flat_function, grid, norm_convergence, residual_sup, u_function};
use bkplane::symexpr::{simplify, Expr, Sampler, Var};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

fn criterion(n: u32, name: &str, result: Result<(), String>) {
    match result {
        Ok(()) => println!("criterion {n} ({name}): pass"),
        Err(msg) => {
            println!("criterion {n} ({name}): FAIL — {msg}");
            panic!("criterion {n} failed: {msg}");
        }
    }
}

#[test]
fn criterion_1_module_preserving_shear() {
    criterion(1, "module-preserving shear", (|| {
        let m = PlanarMap::new(Expr::y().exp() * Expr::x(), Expr::y(), DomainTag::Plane);
        let dy = ComplexVectorField::new(Expr::zero(), Expr::one());
        let target = ComplexVectorField::new(Expr::x(), Expr::one());
        // symbolic: Dm·∂y minus the target at m(p) must simplify to zero
        let j = jacobian(&m);
        let pushed = (
            simplify(&(j[0][1].clone() * dy.b.clone())),
            simplify(&(j[1][1].clone() * dy.b.clone())),
        );
        let expected = (
            simplify(&target.a.subst_xy(&m.u, &m.v)),
            simplify(&target.b.subst_xy(&m.u, &m.v)),
        );
        for (lhs, rhs) in [(&pushed.0, &expected.0), (&pushed.1, &expected.1)] {
            let res = simplify(&(lhs.clone() - rhs.clone()));
            if !res.is_zero() {
                return Err(format!("symbolic residual {res} is not zero"));
            }
        }
        // numeric confirmation of the intertwining
        let s = Sampler::generic(0);
        relates(&m, &dy, &target, &s, 1e-10)
            .map_err(|f| format!("numeric intertwining failed: {f:?}"))?;
        // but the same map is not a b^k-automorphism
        for k in [1u32, 2] {
            let v = is_bk_automorphism(&m, k, &Sampler::near_z(0), 1e-8, 1e-2)
                .map_err(|e| e.to_string())?;
            if v.holds {
                return Err(format!("(e^y x, y) wrongly accepted for k = {k}"));
            }
        }
        Ok(())
    })());
}

#[test]
fn criterion_2_catalog_families_and_counterexamples() {
    criterion(2, "automorphism criterion on the catalog", (|| {
        let s = Sampler::near_z(0);
        for k in [1u32, 2, 3] {
            let cat = catalog(k).map_err(|e| e.to_string())?;
            for fam in &cat.families {
                for t in [-1.0, -0.3, 0.7, 2.0] {
                    let v = is_bk_automorphism(&fam.at(t), k, &s, 1e-8, 1e-2)
                        .map_err(|e| e.to_string())?;
                    if !v.holds {
                        return Err(format!(
                            "{} (k={k}, t={t}) rejected: {:?}",
                            fam.name, v.failure_reason
                        ));
                    }
                    if v.max_cross_det > 1e-9 {
                        return Err(format!(
                            "{} (k={k}, t={t}) cross-determinant {:.3e} > 1e-9",
                            fam.name, v.max_cross_det
                        ));
                    }
                }
            }
            let expected_lambda = if k % 2 == 1 { 1.0 } else { -1.0 };
            let v = is_bk_automorphism(&cat.flip, k, &s, 1e-8, 1e-2).map_err(|e| e.to_string())?;
            if !v.holds {
                return Err(format!("flip rejected for k={k}"));
            }
            for (p, (lr, li)) in &v.lambda_samples {
                let err = ((lr - expected_lambda).powi(2) + li * li).sqrt();
                if err > 1e-8 {
                    return Err(format!(
                        "flip λ = {lr}+{li}i at ({}, {}) differs from {expected_lambda}",
                        p.x, p.y
                    ));
                }
            }
            for (name, m) in [
                (
                    "(e^y x, y)",
                    PlanarMap::new(Expr::y().exp() * Expr::x(), Expr::y(), DomainTag::Plane),
                ),
                (
                    "(x, y+x)",
                    PlanarMap::new(Expr::x(), Expr::y() + Expr::x(), DomainTag::Plane),
                ),
            ] {
                let v = is_bk_automorphism(&m, k, &s, 1e-8, 1e-2).map_err(|e| e.to_string())?;
                if v.holds {
                    return Err(format!("counterexample {name} accepted for k={k}"));
                }
            }
        }
        Ok(())
    })());
}

#[test]
fn criterion_3_conjugation_identities() {
    criterion(3, "half-plane conjugations", (|| {
        let s = Sampler::right_half_plane(0);
        // k = 2: the hyperbolic and parabolic actions pull back to the
        // catalog families
        let iso2 = halfplane_iso(2).map_err(|e| e.to_string())?;
        let got_h = conjugate_through(&iso2, &hyperbolic_target());
        let want_h = PlanarMap::new(
            (-Expr::t()).exp() * Expr::x(),
            Expr::t().exp() * Expr::y(),
            DomainTag::RightHalfPlane,
        );
        let err = map_max_diff(&got_h, &want_h, &s).map_err(|e| e.to_string())?;
        if err > 1e-10 {
            return Err(format!("hyperbolic conjugation error {err:.3e} > 1e-10"));
        }
        let got_p = conjugate_through(&iso2, &parabolic_target());
        let want_p = PlanarMap::new(Expr::x(), Expr::y() + Expr::t(), DomainTag::RightHalfPlane);
        let err = map_max_diff(&got_p, &want_p, &s).map_err(|e| e.to_string())?;
        if err > 1e-10 {
            return Err(format!("parabolic conjugation error {err:.3e} > 1e-10"));
        }
        // k = 1: z ↦ z + s pulls back to the horizontal scaling (e^s x, y)
        let iso1 = halfplane_iso(1).map_err(|e| e.to_string())?;
        for s0 in [0.7, -1.2] {
            let got = conjugate_through(&iso1, &plane_translation(s0, 0.0));
            let want = PlanarMap::new(
                Expr::num(s0).exp() * Expr::x(),
                Expr::y(),
                DomainTag::RightHalfPlane,
            );
            let err = map_max_diff(&got, &want, &s).map_err(|e| e.to_string())?;
            if err > 1e-10 {
                return Err(format!(
                    "k=1 translation conjugation (s={s0}) error {err:.3e} > 1e-10"
                ));
            }
        }
        Ok(())
    })());
}

#[test]
fn criterion_4_non_extendability() {
    criterion(4, "non-extendability across Z", (|| {
        let iso = halfplane_iso(2).map_err(|e| e.to_string())?;
        let t = FRAC_PI_4;
        let xs = probe_sequence();
        for y0 in [0.0, 1.0] {
            let probe = extendability_probe(|p| elliptic_pullback(&iso, t, p), y0, &xs)
                .map_err(|e| e.to_string())?;
            let (x_last, last) = *probe.samples.last().unwrap();
            assert!((x_last - 1e-6).abs() < 1e-12);
            if last.x <= 1e3 {
                return Err(format!("first component {} at x=1e-6 not > 1e3", last.x));
            }
            if (last.y - 1.0).abs() > 1e-3 {
                return Err(format!(
                    "second component {} at x=1e-6 not within 1e-3 of cot(π/4) = 1",
                    last.y
                ));
            }
            if !matches!(probe.classification, ExtendClass::Diverges { .. }) {
                return Err(format!("elliptic pullback (y0={y0}) not classified diverges"));
            }
        }
        let m = scaling_pullback_k1(1.0, 1.0);
        let probe =
            extendability_probe(|p| m.apply(p), 0.5, &xs).map_err(|e| e.to_string())?;
        if !matches!(probe.classification, ExtendClass::Diverges { .. }) {
            return Err("k=1 scaling pullback with t ≠ 0 not classified diverges".to_string());
        }
        Ok(())
    })());
}

#[test]
fn criterion_5_group_structure() {
    criterion(5, "group structure", (|| {
        let s = Sampler::generic(0);
        let params = [(0.7, -0.4), (-1.3, 0.5), (2.0, 1.0)];
        for k in [1u32, 2, 3] {
            let cat = catalog(k).map_err(|e| e.to_string())?;
            for fam in &cat.families {
                let r = group_law_check(fam, &params, &s, 1e-10);
                if !r.passed() || r.max_error > 1e-10 {
                    return Err(format!(
                        "group law failed for {} (k={k}), max error {:.3e}",
                        fam.name, r.max_error
                    ));
                }
            }
            let r = semidirect_check(k, &s, 1e-10).map_err(|e| e.to_string())?;
            if !r.passed() {
                return Err(format!("semidirect relations failed for k={k}"));
            }
            let r = faithfulness_check(k).map_err(|e| e.to_string())?;
            if !r.passed() {
                return Err(format!("faithfulness check failed for k={k}"));
            }
            if k == 1 {
                // the scalings fix Z pointwise: the action on Z is not faithful
                let scalings = &cat.families[1];
                for t in [-1.0, 0.8] {
                    let q = scalings.at(t).apply(Point::new(0.0, 1.3)).map_err(|e| e.to_string())?;
                    if q.dist(Point::new(0.0, 1.3)) > 1e-12 {
                        return Err("k=1 scaling moved a point of Z".to_string());
                    }
                }
                // and the two families commute
                let lhs = compose(&cat.families[0].at(0.8), &scalings.at(-0.6));
                let rhs = compose(&scalings.at(-0.6), &cat.families[0].at(0.8));
                let err = map_max_diff(&lhs, &rhs, &s).map_err(|e| e.to_string())?;
                if err > 1e-10 {
                    return Err(format!("k=1 families do not commute: {err:.3e}"));
                }
            }
            if k == 2 {
                // H_t T_s H_{-t} = T_{e^t s}
                let (s0, t0) = (0.8, -0.6);
                let h = &cat.families[1];
                let tfam = &cat.families[0];
                let lhs = compose(&h.at(t0), &compose(&tfam.at(s0), &h.at(-t0)));
                let rhs = tfam.at(t0.exp() * s0);
                let err = map_max_diff(&lhs, &rhs, &s).map_err(|e| e.to_string())?;
                if err > 1e-10 {
                    return Err(format!("H_t T_s H_-t ≠ T_(e^t s): {err:.3e}"));
                }
            }
        }
        Ok(())
    })());
}

#[test]
fn criterion_6_mobius_flow() {
    criterion(6, "Möbius flow", (|| {
        let v = mobius_generator();
        let t = 0.5;
        // 20 deterministic seeds with |1 - t z0| > 0.2
        let mut seeds = Vec::new();
        let mut i = 0;
        while seeds.len() < 20 {
            let x = -0.9 + 0.23 * (i % 9) as f64;
            let y = -0.8 + 0.37 * (i / 9) as f64;
            i += 1;
            let z = num_complex::Complex64::new(x, y);
            if (num_complex::Complex64::new(1.0, 0.0) - t * z).norm() > 0.2 {
                seeds.push(Point::new(x, y));
            }
        }
        for p in &seeds {
            let flowed = flow_endpoint(&v, *p, t, 1e-3).map_err(|e| e.to_string())?;
            let reference = mobius_reference(*p, t).map_err(|e| e.to_string())?;
            let err = flowed.dist(reference);
            if err > 1e-8 {
                return Err(format!(
                    "RK4 error {err:.3e} > 1e-8 at z0 = ({}, {})",
                    p.x, p.y
                ));
            }
        }
        // 4th-order convergence: halving h divides the error by 8-32
        let p = Point::new(0.6, 0.5);
        let reference = mobius_reference(p, t).map_err(|e| e.to_string())?;
        let err_h = flow_endpoint(&v, p, t, 0.1)
            .map_err(|e| e.to_string())?
            .dist(reference);
        let err_h2 = flow_endpoint(&v, p, t, 0.05)
            .map_err(|e| e.to_string())?
            .dist(reference);
        let factor = err_h / err_h2;
        if !(8.0..=32.0).contains(&factor) {
            return Err(format!(
                "error ratio {factor:.2} outside [8, 32] (errors {err_h:.3e} / {err_h2:.3e})"
            ));
        }
        // strip confinement for |t| <= 2 from the seed grid
        let w = strip_field();
        let strip = DomainTag::Strip {
            y0: -FRAC_PI_2,
            y1: FRAC_PI_2,
        };
        let seeds = strip_seed_grid();
        if seeds.len() < 10 {
            return Err("fewer than 10 strip seeds".to_string());
        }
        for p in &seeds {
            for time in [-2.0, 2.0] {
                let fp = FlowProblem::new(w.clone(), *p, time, 1e-3).in_domain(strip);
                let r = integrate_flow(&fp, false).map_err(|e| e.to_string())?;
                if let Some(ev) = r.event {
                    return Err(format!(
                        "strip trajectory from ({}, {}) left the strip: {ev:?}",
                        p.x, p.y
                    ));
                }
            }
        }
        Ok(())
    })());
}

#[test]
fn criterion_7_b_holomorphy() {
    criterion(7, "b-holomorphy residuals and flatness", (|| {
        let g = grid(1e-3, 1.0, 0.05, -0.7, 0.7, 0.1);
        let u = u_function();
        for n in 1..=3i64 {
            let f = if n == 1 { u.clone() } else { u.clone().powi(n) };
            let r = residual_sup(&f, 1, &g).map_err(|e| e.to_string())?;
            if !r.symbolic_zero {
                return Err(format!("residual of u^{n} not symbolically zero"));
            }
        }
        let r = residual_sup(&flat_function(), 1, &g).map_err(|e| e.to_string())?;
        if r.sup > 1e-10 {
            return Err(format!("flat residual {:.3e} > 1e-10", r.sup));
        }
        let mut d = flat_function();
        for order in 1..=3u32 {
            d = d.differentiate(Var::X);
            let v = d.eval_at(1e-3, 0.2, None).map_err(|e| e.to_string())?;
            if v.norm() >= 1e-40 {
                return Err(format!(
                    "order-{order} x-derivative at x=1e-3 has magnitude {:.3e}",
                    v.norm()
                ));
            }
        }
        Ok(())
    })());
}

#[test]
fn criterion_8_bargmann_norms() {
    criterion(8, "b-Segal-Bargmann norms", (|| {
        let w = Expr::x() + Expr::i() * Expr::y();
        for (name, f, want) in [
            ("1", Expr::one(), PI),
            ("e^w", w.clone().exp(), PI * 1f64.exp()),
            ("e^{2w}", (Expr::int(2) * w.clone()).exp(), PI * 4f64.exp()),
        ] {
            let (value, rel) = norm_convergence(&f, 64).map_err(|e| e.to_string())?;
            let err = (value - want).abs() / want;
            if err > 1e-6 {
                return Err(format!("norm of {name} = {value}, want {want} (rel {err:.3e})"));
            }
            if rel >= 1e-8 {
                return Err(format!("N vs 2N disagreement {rel:.3e} for {name}"));
            }
        }
        Ok(())
    })());
}
