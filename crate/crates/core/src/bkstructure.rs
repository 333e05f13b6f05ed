//! The b^k-specific layer: generators `L_k = x^k ∂x + i ∂y`, vanishing-order
//! membership, proportionality modulo nowhere-vanishing factors, and the
//! automorphism-membership criterion.

use crate::error::GeomError;
use crate::geometry::{jacobian_at, pushforward_at, ComplexVectorField, PlanarMap, Point};
use crate::symexpr::{simplify, Expr, Sampler, Var};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Default nonvanishing threshold for the proportionality factor.
pub const DEFAULT_NV_THRESHOLD: f64 = 1e-2;
/// Default tolerance for the cross-determinant test.
pub const DEFAULT_AUT_TOL: f64 = 1e-8;

/// The generator of the standard b^k-complex structure: `(x^k, i)`.
/// `k = 0` is permitted and yields the ordinary Cauchy-Riemann generator
/// `(1, i)`.
pub fn generator(k: u32) -> ComplexVectorField {
    let a = if k == 0 {
        Expr::one()
    } else if k == 1 {
        Expr::x()
    } else {
        Expr::x().powi(k as i64)
    };
    ComplexVectorField::new(a, Expr::i())
}

/// The conjugate generator `(x^k, -i)`.
pub fn conj_generator(k: u32) -> ComplexVectorField {
    let g = generator(k);
    ComplexVectorField::new(g.a, -Expr::i())
}

/// Tests whether `a` vanishes to order `k` along `x = 0`: each of the first
/// `k - 1` x-derivatives (and the value itself) must vanish identically on
/// the axis, checked at sampled `y`.
pub fn vanishes_to_order(a: &Expr, k: u32, s: &Sampler, tol: f64) -> Result<bool, GeomError> {
    let mut d = a.clone();
    for _ in 0..k {
        let restricted = simplify(&d.subst(Some(&Expr::zero()), None, None));
        for (_, y) in s.points() {
            let v = restricted
                .eval_at(0.0, y, None)
                .map_err(|e| GeomError::eval_at(0.0, y, e))?;
            if v.norm() > tol {
                return Ok(false);
            }
        }
        d = simplify(&d.differentiate(Var::X));
    }
    Ok(true)
}

/// Structured outcome of a proportionality or automorphism check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProportionalityVerdict {
    pub holds: bool,
    /// sampled proportionality factors `(point, λ)`
    pub lambda_samples: Vec<(Point, (f64, f64))>,
    pub min_abs_lambda: f64,
    /// largest cross-determinant magnitude seen
    pub max_cross_det: f64,
    pub failure_point: Option<Point>,
    pub failure_reason: Option<String>,
    /// whether sampled points of `x = 0` were carried into `|x| <= 1e-9`
    /// (populated by the automorphism check only)
    pub z_preserved: Option<bool>,
}

impl ProportionalityVerdict {
    fn failed(p: Point, reason: String) -> ProportionalityVerdict {
        ProportionalityVerdict {
            holds: false,
            lambda_samples: Vec::new(),
            min_abs_lambda: 0.0,
            max_cross_det: 0.0,
            failure_point: Some(p),
            failure_reason: Some(reason),
            z_preserved: None,
        }
    }
}

fn lambda_of(
    xv: (Complex64, Complex64),
    yv: (Complex64, Complex64),
) -> Option<Complex64> {
    // ratio read off the component of larger magnitude, avoiding division by
    // small components
    let (num, den) = if yv.0.norm() >= yv.1.norm() {
        (xv.0, yv.0)
    } else {
        (xv.1, yv.1)
    };
    if den.norm() == 0.0 {
        None
    } else {
        Some(num / den)
    }
}

/// Tests `X ∼ λ·Y` with `λ` nowhere vanishing, via the cross-determinant
/// `a_X b_Y - a_Y b_X` and a `|λ| >= nv_threshold` floor at every sampled
/// point. The sampler should reach near-Z points on both sides of the axis.
pub fn is_proportional(
    x_field: &ComplexVectorField,
    y_field: &ComplexVectorField,
    s: &Sampler,
    tol: f64,
    nv_threshold: f64,
) -> Result<ProportionalityVerdict, GeomError> {
    let pts: Vec<Point> = s.points().iter().map(|&(x, y)| Point::new(x, y)).collect();
    let evals = pts
        .iter()
        .map(|&p| Ok((p, x_field.eval(p)?, y_field.eval(p)?)))
        .collect::<Result<Vec<_>, GeomError>>()?;
    Ok(verdict_from_values(&evals, tol, nv_threshold))
}

type SampleValue = (Point, (Complex64, Complex64), (Complex64, Complex64));

fn verdict_from_values(
    samples: &[SampleValue],
    tol: f64,
    nv_threshold: f64,
) -> ProportionalityVerdict {
    let mut lambda_samples = Vec::new();
    let mut min_abs_lambda = f64::INFINITY;
    let mut max_cross_det: f64 = 0.0;
    for &(p, xv, yv) in samples {
        let mag = |v: (Complex64, Complex64)| v.0.norm().max(v.1.norm());
        if mag(xv) == 0.0 && mag(yv) == 0.0 {
            return ProportionalityVerdict::failed(
                p,
                "both fields vanish: proportionality indeterminate".to_string(),
            );
        }
        let cross = (xv.0 * yv.1 - yv.0 * xv.1).norm();
        max_cross_det = max_cross_det.max(cross);
        let scale = 1.0 + mag(xv) * mag(yv);
        if cross > tol * scale {
            let mut v = ProportionalityVerdict::failed(
                p,
                format!("cross-determinant {cross:.3e} exceeds tolerance"),
            );
            v.max_cross_det = max_cross_det;
            return v;
        }
        let lambda = match lambda_of(xv, yv) {
            Some(l) => l,
            None => {
                return ProportionalityVerdict::failed(
                    p,
                    "target field vanishes while source does not".to_string(),
                )
            }
        };
        min_abs_lambda = min_abs_lambda.min(lambda.norm());
        lambda_samples.push((p, (lambda.re, lambda.im)));
        if lambda.norm() < nv_threshold {
            return ProportionalityVerdict {
                holds: false,
                lambda_samples,
                min_abs_lambda,
                max_cross_det,
                failure_point: Some(p),
                failure_reason: Some(format!(
                    "|λ| = {:.3e} below nonvanishing threshold {nv_threshold:.1e}",
                    lambda.norm()
                )),
                z_preserved: None,
            };
        }
    }
    ProportionalityVerdict {
        holds: true,
        lambda_samples,
        min_abs_lambda,
        max_cross_det,
        failure_point: None,
        failure_reason: None,
        z_preserved: None,
    }
}

/// The automorphism criterion: `θ ∈ Aut(b^k ℝ²)` iff `θ_* L_k ∼ L_k`.
/// Evaluates `θ_* L_k` at `θ(p)` pointwise and tests proportionality against
/// `L_k` there; also records whether sampled Z-points stay on Z and that the
/// Jacobian is nonsingular at every sample.
pub fn is_bk_automorphism(
    m: &PlanarMap,
    k: u32,
    s: &Sampler,
    tol: f64,
    nv_threshold: f64,
) -> Result<ProportionalityVerdict, GeomError> {
    let lk = generator(k);
    let mut samples = Vec::new();
    for (px, py) in s.points() {
        let p = Point::new(px, py);
        let j = jacobian_at(m, p)?;
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det.abs() < 1e-12 {
            return Err(GeomError::SingularJacobian { x: p.x, y: p.y });
        }
        let pushed = pushforward_at(m, &lk, p)?;
        let q = m.apply(p)?;
        let target = lk.eval(q)?;
        samples.push((p, pushed, target));
    }
    let mut verdict = verdict_from_values(&samples, tol, nv_threshold);

    // θ_*(Z) = Z clause: sampled axis points must land back on the axis
    let mut z_ok = true;
    for y in [-2.0, -0.5, 0.0, 1.0, 2.5] {
        let q = m.apply(Point::new(0.0, y))?;
        if q.x.abs() > 1e-9 {
            z_ok = false;
        }
    }
    verdict.z_preserved = Some(z_ok);
    if verdict.holds && !z_ok {
        verdict.holds = false;
        verdict.failure_reason = Some("map does not preserve the singular locus".to_string());
    }
    Ok(verdict)
}
