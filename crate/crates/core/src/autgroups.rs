//! The classified automorphism groups of the standard b^k-planes: catalog
//! families with their group laws, the half-plane conjugation maps, and
//! extension/non-extension probes near the singular locus.

use crate::error::GeomError;
use crate::geometry::{
    compose, map_max_diff, relates, ComplexVectorField, DomainTag, PlanarMap, Point,
};
use crate::bkstructure::generator;
use crate::report::VerificationReport;
use crate::symexpr::{Expr, Sampler};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A 1-parameter family of automorphisms `t ↦ fam(t)` with additive group
/// law: `fam(s) ∘ fam(t) = fam(s + t)` and `fam(0) = id`.
#[derive(Debug, Clone)]
pub struct AutFamily {
    pub name: String,
    /// smallest `k` the family is valid for (all catalog families remain
    /// valid for every larger `k` of their branch)
    pub k: u32,
    pub map_of_t: PlanarMap,
}

impl AutFamily {
    pub fn at(&self, t0: f64) -> PlanarMap {
        self.map_of_t.at_parameter(t0)
    }

    /// The map with `t` replaced by an arbitrary expression (e.g. `-t`).
    pub fn with_t_expr(&self, t: &Expr) -> PlanarMap {
        PlanarMap::new(
            self.map_of_t.u.subst(None, None, Some(t)),
            self.map_of_t.v.subst(None, None, Some(t)),
            self.map_of_t.domain,
        )
    }
}

/// The catalog of 1-parameter subgroups for a given `k`, plus the order-two
/// flip `(x, y) ↦ (-x, (-1)^(k+1) y)`.
#[derive(Debug, Clone)]
pub struct Catalog {
    pub k: u32,
    pub families: Vec<AutFamily>,
    pub flip: PlanarMap,
}

/// Catalog of `Aut₊`: vertical translations plus horizontal scalings for
/// `k = 1`, vertical translations plus hyperbolic transformations for
/// `k >= 2`. Rejects `k < 1`.
pub fn catalog(k: u32) -> Result<Catalog, GeomError> {
    if k < 1 {
        return Err(GeomError::Other(
            "catalog requires k >= 1".to_string(),
        ));
    }
    let mut families = vec![AutFamily {
        name: "vertical-translations".to_string(),
        k,
        map_of_t: PlanarMap::new(Expr::x(), Expr::y() + Expr::t(), DomainTag::Plane),
    }];
    if k == 1 {
        families.push(AutFamily {
            name: "horizontal-scalings".to_string(),
            k,
            map_of_t: PlanarMap::new(Expr::t().exp() * Expr::x(), Expr::y(), DomainTag::Plane),
        });
    } else {
        families.push(AutFamily {
            name: "hyperbolic".to_string(),
            k,
            map_of_t: PlanarMap::new(
                (-(Expr::t() / Expr::num((k - 1) as f64))).exp() * Expr::x(),
                Expr::t().exp() * Expr::y(),
                DomainTag::Plane,
            ),
        });
    }
    let flip_v = if k % 2 == 1 {
        Expr::y()
    } else {
        -Expr::y()
    };
    Ok(Catalog {
        k,
        families,
        flip: PlanarMap::new(-Expr::x(), flip_v, DomainTag::Plane),
    })
}

/// The coordinate change identifying the right half-plane carrying `L_k`
/// with a standard complex model: the full plane for `k = 1`, the upper
/// half-plane for `k >= 2`.
#[derive(Debug, Clone)]
pub struct HalfPlaneIso {
    pub k: u32,
    pub map: PlanarMap,
    pub inverse: PlanarMap,
    pub target: DomainTag,
    /// the constant multiple of `L₀ = ∂x + i∂y` that `L_k` pushes to
    pub lambda: Complex64,
}

/// Builds the half-plane isomorphism for `k >= 1` and verifies at
/// construction that it intertwines `L_k` with a constant multiple of `L₀`.
pub fn halfplane_iso(k: u32) -> Result<HalfPlaneIso, GeomError> {
    if k < 1 {
        return Err(GeomError::Other("halfplane_iso requires k >= 1".to_string()));
    }
    let (map, inverse, target, lambda) = if k == 1 {
        (
            PlanarMap::new(Expr::x().log(), Expr::y(), DomainTag::RightHalfPlane),
            PlanarMap::new(Expr::x().exp(), Expr::y(), DomainTag::Plane),
            DomainTag::Plane,
            Complex64::new(1.0, 0.0),
        )
    } else {
        let km1 = (k - 1) as f64;
        (
            PlanarMap::new(
                Expr::y(),
                Expr::one() / (Expr::num(km1) * Expr::x().powi(km1 as i64)),
                DomainTag::RightHalfPlane,
            ),
            PlanarMap::new(
                (Expr::num(km1) * Expr::y()).pow(Expr::num(-1.0 / km1)),
                Expr::x(),
                DomainTag::UpperHalfPlane,
            ),
            DomainTag::UpperHalfPlane,
            Complex64::new(0.0, 1.0),
        )
    };
    // construction-time contract: map intertwines L_k with λ·L₀
    let target_field = ComplexVectorField::new(
        Expr::Num(lambda),
        Expr::Num(lambda * Complex64::new(0.0, 1.0)),
    );
    let s = Sampler::right_half_plane(0);
    relates(&map, &generator(k), &target_field, &s, 1e-9).map_err(|f| {
        GeomError::Other(format!("halfplane_iso self-check failed: {f:?}"))
    })?;
    Ok(HalfPlaneIso {
        k,
        map,
        inverse,
        target,
        lambda,
    })
}

/// Conjugates an automorphism of the target model back to the right
/// half-plane: `inverse ∘ target_aut ∘ map`, simplified symbolically.
pub fn conjugate_through(iso: &HalfPlaneIso, target_aut: &PlanarMap) -> PlanarMap {
    let mut m = compose(&iso.inverse, &compose(target_aut, &iso.map));
    m.domain = DomainTag::RightHalfPlane;
    m
}

// ---- target-model automorphism constructors ----

/// Translation of the plane by the complex number `s + i t`.
pub fn plane_translation(s: f64, t: f64) -> PlanarMap {
    PlanarMap::new(Expr::x() + Expr::num(s), Expr::y() + Expr::num(t), DomainTag::Plane)
}

/// Scaling of the plane by the complex number `c = s + i t`.
pub fn plane_scaling(s: f64, t: f64) -> PlanarMap {
    PlanarMap::new(
        Expr::num(s) * Expr::x() - Expr::num(t) * Expr::y(),
        Expr::num(t) * Expr::x() + Expr::num(s) * Expr::y(),
        DomainTag::Plane,
    )
}

/// Hyperbolic action `z ↦ e^t z` on the upper half-plane, with `t` symbolic.
pub fn hyperbolic_target() -> PlanarMap {
    PlanarMap::new(
        Expr::t().exp() * Expr::x(),
        Expr::t().exp() * Expr::y(),
        DomainTag::UpperHalfPlane,
    )
}

/// Parabolic action `z ↦ z + t` on the upper half-plane, with `t` symbolic.
pub fn parabolic_target() -> PlanarMap {
    PlanarMap::new(Expr::x() + Expr::t(), Expr::y(), DomainTag::UpperHalfPlane)
}

/// Elliptic action `z ↦ (z cos t - sin t)/(z sin t + cos t)` evaluated
/// numerically at a point of the upper half-plane.
pub fn elliptic_target_at(t: f64, z: Complex64) -> Result<Complex64, GeomError> {
    let (st, ct) = t.sin_cos();
    let den = z * st + ct;
    if den.norm() < 1e-300 {
        return Err(GeomError::Other(
            "elliptic action undefined: denominator vanishes".to_string(),
        ));
    }
    Ok((z * ct - st) / den)
}

/// The elliptic automorphism of the upper half-plane pulled back to the
/// right half-plane through the `k >= 2` isomorphism, evaluated numerically
/// (symbolic simplification of the fractional linear composite is noisy;
/// only its limit behavior matters).
pub fn elliptic_pullback(iso: &HalfPlaneIso, t: f64, p: Point) -> Result<Point, GeomError> {
    let q = iso.map.apply(p)?;
    let z = Complex64::new(q.x, q.y);
    let w = elliptic_target_at(t, z)?;
    if w.im <= 0.0 {
        return Err(GeomError::OutsideDomain { x: w.re, y: w.im });
    }
    iso.inverse.apply(Point::new(w.re, w.im))
}

/// The `k = 1` pullback of the scaling `z ↦ (s + i t) z` of the plane:
/// `(x, y) ↦ (e^{s log x - t y}, t log x + s y)` on the right half-plane.
pub fn scaling_pullback_k1(s: f64, t: f64) -> PlanarMap {
    PlanarMap::new(
        (Expr::num(s) * Expr::x().log() - Expr::num(t) * Expr::y()).exp(),
        Expr::num(t) * Expr::x().log() + Expr::num(s) * Expr::y(),
        DomainTag::RightHalfPlane,
    )
}

// ---- extendability ----

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum ExtendClass {
    Extends { limit: Point },
    Diverges { second_component_trend: Option<f64> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtendProbe {
    pub y0: f64,
    pub classification: ExtendClass,
    /// `(x, image point)` rows, decreasing x
    pub samples: Vec<(f64, Point)>,
}

/// Divergence threshold: first component magnitude beyond this counts as
/// escaping to infinity.
pub const DIVERGENCE_THRESHOLD: f64 = 1e3;
/// A Cauchy tail with successive differences below this counts as
/// convergent.
/// (A map linear in x with slope up to ~10 still has tail differences of a
/// few times 1e-6 when the probe sequence bottoms out at x = 1e-6.)
pub const CONVERGENCE_TOL: f64 = 1e-5;

/// Classifies the limit behavior of `m(x, y0)` as `x → 0⁺` along the given
/// decreasing sequence.
pub fn extendability_probe<F>(m: F, y0: f64, xs: &[f64]) -> Result<ExtendProbe, GeomError>
where
    F: Fn(Point) -> Result<Point, GeomError>,
{
    let mut samples = Vec::with_capacity(xs.len());
    for &x in xs {
        let q = m(Point::new(x, y0))?;
        samples.push((x, q));
    }
    let last = samples.last().map(|&(_, q)| q).expect("xs must be nonempty");
    let tail_ok = samples
        .windows(2)
        .rev()
        .take(2)
        .all(|w| w[0].1.dist(w[1].1) < CONVERGENCE_TOL);
    let classification = if last.x.abs() > DIVERGENCE_THRESHOLD || !tail_ok {
        // record the trend of the second component when it settles
        let second_trend = samples
            .windows(2)
            .rev()
            .take(2)
            .all(|w| (w[0].1.y - w[1].1.y).abs() < 1e-3)
            .then_some(last.y);
        ExtendClass::Diverges {
            second_component_trend: second_trend,
        }
    } else {
        ExtendClass::Extends { limit: last }
    };
    Ok(ExtendProbe {
        y0,
        classification,
        samples,
    })
}

/// The standard probe sequence: decades from 1 down to 1e-6.
pub fn probe_sequence() -> Vec<f64> {
    (0..=12).map(|i| 10f64.powf(-(i as f64) / 2.0)).collect()
}

// ---- group-structure checks ----

/// Verifies `fam(s) ∘ fam(t) ≡ fam(s + t)` and `fam(0) ≡ id` at the given
/// parameter pairs.
pub fn group_law_check(
    fam: &AutFamily,
    params: &[(f64, f64)],
    s: &Sampler,
    tol: f64,
) -> VerificationReport {
    let mut report = VerificationReport::new(
        &format!("group-law/{}", fam.name),
        "one-parameter subgroup law",
    );
    let id = PlanarMap::identity();
    match map_max_diff(&fam.at(0.0), &id, s) {
        Ok(err) => {
            report.record_error(err);
            if err > tol {
                report.fail("fam(0) is not the identity", "t=0", &format!("{err:.3e}"), "0");
            }
        }
        Err(e) => report.fail("fam(0) evaluation failed", "t=0", &e.to_string(), ""),
    }
    for &(sp, tp) in params {
        let lhs = compose(&fam.at(sp), &fam.at(tp));
        let rhs = fam.at(sp + tp);
        match map_max_diff(&lhs, &rhs, s) {
            Ok(err) => {
                report.record_error(err);
                if err > tol {
                    report.fail(
                        "fam(s)∘fam(t) differs from fam(s+t)",
                        &format!("s={sp}, t={tp}"),
                        &format!("{err:.3e}"),
                        &format!("<= {tol:.1e}"),
                    );
                }
            }
            Err(e) => report.fail(
                "composition evaluation failed",
                &format!("s={sp}, t={tp}"),
                &e.to_string(),
                "",
            ),
        }
    }
    report
}

/// Verifies the semidirect-product relations with the flip: `flip² = id`,
/// `flip ∘ T_t ∘ flip = T_{(-1)^{k+1} t}`, `flip` commutes with the scaling
/// (k = 1) and hyperbolic (k >= 2) families, and `flip` carries the right
/// half-plane onto the left.
pub fn semidirect_check(k: u32, s: &Sampler, tol: f64) -> Result<VerificationReport, GeomError> {
    let cat = catalog(k)?;
    let mut report = VerificationReport::new(
        &format!("semidirect/k={k}"),
        "full group as semidirect product with the flip",
    );
    let flip = &cat.flip;
    let id = PlanarMap::identity();

    let check = |name: &str, lhs: &PlanarMap, rhs: &PlanarMap, report: &mut VerificationReport| {
        match map_max_diff(lhs, rhs, s) {
            Ok(err) => {
                report.record_error(err);
                if err > tol {
                    report.fail(name, "", &format!("{err:.3e}"), &format!("<= {tol:.1e}"));
                }
            }
            Err(e) => report.fail(name, "", &e.to_string(), ""),
        }
    };

    check("flip∘flip = id", &compose(flip, flip), &id, &mut report);

    let translations = &cat.families[0];
    let conj_t = compose(flip, &compose(&translations.map_of_t, flip));
    let expected_t = if k % 2 == 1 {
        translations.map_of_t.clone()
    } else {
        translations.with_t_expr(&-Expr::t())
    };
    check(
        "flip∘T_t∘flip = T_{(-1)^{k+1} t}",
        &conj_t,
        &expected_t,
        &mut report,
    );

    let second = &cat.families[1];
    let conj_h = compose(flip, &compose(&second.map_of_t, flip));
    check(
        if k == 1 {
            "flip∘S_t∘flip = S_t"
        } else {
            "flip∘H_t∘flip = H_t"
        },
        &conj_h,
        &second.map_of_t,
        &mut report,
    );

    for &(x, y) in &[(0.5, -1.0), (1.5, 0.3), (2.5, 2.0)] {
        let q = flip.apply(Point::new(x, y))?;
        if q.x >= 0.0 {
            report.fail(
                "flip does not exchange the half-planes",
                &format!("({x}, {y})"),
                &format!("x' = {}", q.x),
                "x' < 0",
            );
        }
    }
    Ok(report)
}

/// Faithfulness of the `Aut₊` action on the singular locus: distinct
/// parameters act distinctly on `Z` for `k >= 2`, while the `k = 1`
/// horizontal scalings fix `Z` pointwise.
pub fn faithfulness_check(k: u32) -> Result<VerificationReport, GeomError> {
    let cat = catalog(k)?;
    let mut report = VerificationReport::new(
        &format!("faithfulness-on-z/k={k}"),
        "action on the singular locus",
    );
    let z_points = [Point::new(0.0, -1.5), Point::new(0.0, 0.7), Point::new(0.0, 2.0)];
    let params = [-1.0, 0.4, 1.3];
    for fam in &cat.families {
        let fixes_z = params.iter().all(|&t| {
            z_points.iter().all(|&p| {
                fam.at(t)
                    .apply(p)
                    .map(|q| q.dist(p) < 1e-12)
                    .unwrap_or(false)
            })
        });
        if k == 1 && fam.name == "horizontal-scalings" {
            if !fixes_z {
                report.fail(
                    "k=1 scalings should fix Z pointwise",
                    &fam.name,
                    "moves Z",
                    "fixes Z",
                );
            } else {
                report.note(
                    "k=1 scalings fix Z pointwise (action on Z not faithful)",
                    &fam.name,
                    "fixes Z",
                    "fixes Z",
                );
            }
        } else if fixes_z {
            report.fail(
                "family acts trivially on Z but should not",
                &fam.name,
                "fixes Z",
                "moves Z",
            );
        }
    }
    if k >= 2 {
        // distinct parameters must act distinctly on Z
        for fam in &cat.families {
            let p = Point::new(0.0, 1.0);
            let q1 = fam.at(0.3).apply(p)?;
            let q2 = fam.at(1.1).apply(p)?;
            if q1.dist(q2) < 1e-9 {
                report.fail(
                    "distinct parameters act identically on Z",
                    &fam.name,
                    &format!("dist = {:.3e}", q1.dist(q2)),
                    "> 1e-9",
                );
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::maps_equal;
    use std::f64::consts::E;

    #[test]
    fn catalog_contents() {
        let s = Sampler::generic(0);
        let c1 = catalog(1).unwrap();
        assert_eq!(c1.families.len(), 2);
        assert!(maps_equal(
            &c1.families[0].at(0.7),
            &PlanarMap::new(Expr::x(), Expr::y() + Expr::num(0.7), DomainTag::Plane),
            &s,
            1e-12
        ));
        assert!(maps_equal(
            &c1.families[1].at(0.7),
            &PlanarMap::new(Expr::num(0.7f64.exp()) * Expr::x(), Expr::y(), DomainTag::Plane),
            &s,
            1e-12
        ));
        // flip is (-x, y) for odd k
        assert!(maps_equal(
            &c1.flip,
            &PlanarMap::new(-Expr::x(), Expr::y(), DomainTag::Plane),
            &s,
            1e-12
        ));

        let c2 = catalog(2).unwrap();
        assert!(maps_equal(
            &c2.families[1].at(1.0),
            &PlanarMap::new(
                Expr::num((-1.0f64).exp()) * Expr::x(),
                Expr::num(E) * Expr::y(),
                DomainTag::Plane
            ),
            &s,
            1e-12
        ));
        assert!(maps_equal(
            &c2.flip,
            &PlanarMap::new(-Expr::x(), -Expr::y(), DomainTag::Plane),
            &s,
            1e-12
        ));

        // k = 3: hyperbolic exponent is t/2, flip flips back to (-x, y)
        let c3 = catalog(3).unwrap();
        assert!(maps_equal(
            &c3.families[1].at(1.0),
            &PlanarMap::new(
                Expr::num((-0.5f64).exp()) * Expr::x(),
                Expr::num(E) * Expr::y(),
                DomainTag::Plane
            ),
            &s,
            1e-12
        ));
        assert!(maps_equal(
            &c3.flip,
            &PlanarMap::new(-Expr::x(), Expr::y(), DomainTag::Plane),
            &s,
            1e-12
        ));

        assert!(catalog(0).is_err());
    }

    #[test]
    fn halfplane_iso_contracts() {
        // construction itself verifies the intertwining; check the inverse
        let s = Sampler::right_half_plane(0);
        for k in [1u32, 2, 3] {
            let iso = halfplane_iso(k).unwrap();
            let round = compose(&iso.inverse, &iso.map);
            assert!(maps_equal(&round, &PlanarMap::identity(), &s, 1e-10), "k = {k}");
        }
        // and map ∘ inverse on the upper half-plane for k = 2
        let iso = halfplane_iso(2).unwrap();
        let upper = Sampler {
            y_min: 0.1,
            y_max: 3.0,
            ..Sampler::default()
        };
        let round = compose(&iso.map, &iso.inverse);
        assert!(maps_equal(&round, &PlanarMap::identity(), &upper, 1e-10));
    }

    #[test]
    fn conjugation_k2_examples() {
        let s = Sampler::right_half_plane(0);
        let iso = halfplane_iso(2).unwrap();
        let got = conjugate_through(&iso, &hyperbolic_target());
        let want = PlanarMap::new(
            (-Expr::t()).exp() * Expr::x(),
            Expr::t().exp() * Expr::y(),
            DomainTag::RightHalfPlane,
        );
        assert!(map_max_diff(&got, &want, &s).unwrap() < 1e-10);

        let got = conjugate_through(&iso, &parabolic_target());
        let want = PlanarMap::new(Expr::x(), Expr::y() + Expr::t(), DomainTag::RightHalfPlane);
        assert!(map_max_diff(&got, &want, &s).unwrap() < 1e-10);
    }

    #[test]
    fn conjugation_k1_translation() {
        let s = Sampler::right_half_plane(0);
        let iso = halfplane_iso(1).unwrap();
        let got = conjugate_through(&iso, &plane_translation(0.8, 0.0));
        let want = PlanarMap::new(
            Expr::num(0.8f64.exp()) * Expr::x(),
            Expr::y(),
            DomainTag::RightHalfPlane,
        );
        assert!(map_max_diff(&got, &want, &s).unwrap() < 1e-10);
    }

    #[test]
    fn conjugation_consistency_with_catalog() {
        // iso.map ∘ F(t) = (target family at t) ∘ iso.map on x > 0
        let s = Sampler::right_half_plane(0);
        let iso = halfplane_iso(2).unwrap();
        let cat = catalog(2).unwrap();
        for t in [-0.8, 0.5] {
            let lhs = compose(&iso.map, &cat.families[0].at(t));
            let rhs = compose(&parabolic_target().at_parameter(t), &iso.map);
            assert!(map_max_diff(&lhs, &rhs, &s).unwrap() < 1e-9);
            let lhs = compose(&iso.map, &cat.families[1].at(t));
            let rhs = compose(&hyperbolic_target().at_parameter(t), &iso.map);
            assert!(map_max_diff(&lhs, &rhs, &s).unwrap() < 1e-9);
        }
    }

    #[test]
    fn extendability_probes() {
        let xs = probe_sequence();
        // hyperbolic pullback extends with limit (0, e·y0)
        let cat = catalog(2).unwrap();
        let m = cat.families[1].at(1.0);
        let probe = extendability_probe(|p| m.apply(p), 0.5, &xs).unwrap();
        match probe.classification {
            ExtendClass::Extends { limit } => {
                assert!(limit.x.abs() < 1e-6);
                assert!((limit.y - E * 0.5).abs() < 1e-9);
            }
            other => panic!("hyperbolic pullback classified {other:?}"),
        }
        // non-real k=1 scaling diverges (second component → -∞)
        let m = scaling_pullback_k1(1.0, 1.0);
        let probe = extendability_probe(|p| m.apply(p), 0.0, &xs).unwrap();
        assert!(matches!(probe.classification, ExtendClass::Diverges { .. }));
    }

    #[test]
    fn elliptic_action_preserves_upper_half_plane() {
        let z = Complex64::new(0.3, 1.2);
        let w = elliptic_target_at(0.7, z).unwrap();
        assert!(w.im > 0.0);
        // t = 0 is the identity
        let w0 = elliptic_target_at(0.0, z).unwrap();
        assert!((w0 - z).norm() < 1e-15);
    }

    #[test]
    fn group_law_and_semidirect_reports() {
        let s = Sampler::generic(0);
        let params = [(0.3, -0.9), (1.1, 0.4)];
        for k in [1u32, 2] {
            let cat = catalog(k).unwrap();
            for fam in &cat.families {
                assert!(group_law_check(fam, &params, &s, 1e-10).passed(), "{} k={k}", fam.name);
            }
            assert!(semidirect_check(k, &s, 1e-10).unwrap().passed(), "k={k}");
            assert!(faithfulness_check(k).unwrap().passed(), "k={k}");
        }
    }
}
