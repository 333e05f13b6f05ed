//! Planar differential geometry: complex vector fields, planar maps,
//! Jacobians, pointwise and symbolic pushforwards, Lie brackets, and numeric
//! inversion by Newton iteration.

use crate::error::GeomError;
use crate::symexpr::{semantically_equal, simplify, EqualityFailure, Expr, Sampler, Var};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Point {
        Point { x, y }
    }

    pub fn dist(self, other: Point) -> f64 {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2)).sqrt()
    }

    pub fn as_complex(self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }

    pub fn from_complex(z: Complex64) -> Point {
        Point { x: z.re, y: z.im }
    }
}

/// Coarse named regions of the plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DomainTag {
    Plane,
    RightHalfPlane,
    LeftHalfPlane,
    UpperHalfPlane,
    Strip { y0: f64, y1: f64 },
}

impl DomainTag {
    pub fn contains(self, p: Point) -> bool {
        self.contains_with_margin(p, 0.0)
    }

    /// Membership shrunk by `margin` toward the interior.
    pub fn contains_with_margin(self, p: Point, margin: f64) -> bool {
        match self {
            DomainTag::Plane => true,
            DomainTag::RightHalfPlane => p.x > margin,
            DomainTag::LeftHalfPlane => p.x < -margin,
            DomainTag::UpperHalfPlane => p.y > margin,
            DomainTag::Strip { y0, y1 } => p.y > y0 + margin && p.y < y1 - margin,
        }
    }
}

/// A complex vector field `a ∂x + b ∂y` with symbolic coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVectorField {
    pub a: Expr,
    pub b: Expr,
}

impl ComplexVectorField {
    pub fn new(a: Expr, b: Expr) -> ComplexVectorField {
        ComplexVectorField { a, b }
    }

    pub fn eval(&self, p: Point) -> Result<(Complex64, Complex64), GeomError> {
        let a = self
            .a
            .eval_at(p.x, p.y, None)
            .map_err(|e| GeomError::eval_at(p.x, p.y, e))?;
        let b = self
            .b
            .eval_at(p.x, p.y, None)
            .map_err(|e| GeomError::eval_at(p.x, p.y, e))?;
        Ok((a, b))
    }

    /// The real vector field `(re a, re b)`.
    pub fn real_part(&self) -> ComplexVectorField {
        ComplexVectorField {
            a: simplify(&self.a.clone().re()),
            b: simplify(&self.b.clone().re()),
        }
    }

    /// Multiplies both coefficients by a scalar function.
    pub fn scale(&self, f: &Expr) -> ComplexVectorField {
        ComplexVectorField {
            a: simplify(&(f.clone() * self.a.clone())),
            b: simplify(&(f.clone() * self.b.clone())),
        }
    }

    /// Applies the field as a derivation to a scalar function.
    pub fn apply_to(&self, f: &Expr) -> Expr {
        simplify(
            &(self.a.clone() * f.differentiate(Var::X) + self.b.clone() * f.differentiate(Var::Y)),
        )
    }
}

/// A smooth map of (a region of) the plane with real components `(u, v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarMap {
    pub u: Expr,
    pub v: Expr,
    pub domain: DomainTag,
}

impl PlanarMap {
    pub fn new(u: Expr, v: Expr, domain: DomainTag) -> PlanarMap {
        PlanarMap { u, v, domain }
    }

    pub fn identity() -> PlanarMap {
        PlanarMap::new(Expr::x(), Expr::y(), DomainTag::Plane)
    }

    pub fn apply(&self, p: Point) -> Result<Point, GeomError> {
        let u = self
            .u
            .eval_at(p.x, p.y, None)
            .map_err(|e| GeomError::eval_at(p.x, p.y, e))?;
        let v = self
            .v
            .eval_at(p.x, p.y, None)
            .map_err(|e| GeomError::eval_at(p.x, p.y, e))?;
        Ok(Point::new(u.re, v.re))
    }

    /// Substitutes a concrete value for the family parameter `t`.
    pub fn at_parameter(&self, t0: f64) -> PlanarMap {
        PlanarMap {
            u: simplify(&self.u.subst_t(t0)),
            v: simplify(&self.v.subst_t(t0)),
            domain: self.domain,
        }
    }
}

/// Symbolic Jacobian `[[∂u/∂x, ∂u/∂y], [∂v/∂x, ∂v/∂y]]`.
pub fn jacobian(m: &PlanarMap) -> [[Expr; 2]; 2] {
    [
        [
            simplify(&m.u.differentiate(Var::X)),
            simplify(&m.u.differentiate(Var::Y)),
        ],
        [
            simplify(&m.v.differentiate(Var::X)),
            simplify(&m.v.differentiate(Var::Y)),
        ],
    ]
}

/// Numeric Jacobian at a point.
pub fn jacobian_at(m: &PlanarMap, p: Point) -> Result<[[f64; 2]; 2], GeomError> {
    let j = jacobian(m);
    let mut out = [[0.0; 2]; 2];
    for (r, row) in j.iter().enumerate() {
        for (c, entry) in row.iter().enumerate() {
            out[r][c] = entry
                .eval_at(p.x, p.y, None)
                .map_err(|e| GeomError::eval_at(p.x, p.y, e))?
                .re;
        }
    }
    Ok(out)
}

/// The value of the pushforward `m_* X` at `m(p)`, computed as `Dm(p)·X(p)`.
/// No inverse map is needed.
pub fn pushforward_at(
    m: &PlanarMap,
    x_field: &ComplexVectorField,
    p: Point,
) -> Result<(Complex64, Complex64), GeomError> {
    let j = jacobian_at(m, p)?;
    let (a, b) = x_field.eval(p)?;
    Ok((j[0][0] * a + j[0][1] * b, j[1][0] * a + j[1][1] * b))
}

/// Why a `relates` check failed.
#[derive(Debug, Clone)]
pub enum RelatesFailure {
    Mismatch {
        p: Point,
        pushed: (Complex64, Complex64),
        target: (Complex64, Complex64),
        error: f64,
    },
    Error(GeomError),
}

/// Checks that `m` intertwines `X` with `Y`: `Dm(p)·X(p) = Y(m(p))` within
/// `tol` at every sampled point.
pub fn relates(
    m: &PlanarMap,
    x_field: &ComplexVectorField,
    y_field: &ComplexVectorField,
    s: &Sampler,
    tol: f64,
) -> Result<(), RelatesFailure> {
    for (px, py) in s.points() {
        let p = Point::new(px, py);
        let pushed = pushforward_at(m, x_field, p).map_err(RelatesFailure::Error)?;
        let q = m.apply(p).map_err(RelatesFailure::Error)?;
        let target = y_field.eval(q).map_err(RelatesFailure::Error)?;
        let err = ((pushed.0 - target.0).norm_sqr() + (pushed.1 - target.1).norm_sqr()).sqrt();
        let mag = |v: (Complex64, Complex64)| (v.0.norm_sqr() + v.1.norm_sqr()).sqrt();
        let scale = 1.0 + mag(pushed).max(mag(target));
        if err > tol * scale {
            return Err(RelatesFailure::Mismatch {
                p,
                pushed,
                target,
                error: err,
            });
        }
    }
    Ok(())
}

/// Symbolic Lie bracket `[X, Y]`.
pub fn lie_bracket(x: &ComplexVectorField, y: &ComplexVectorField) -> ComplexVectorField {
    ComplexVectorField {
        a: simplify(&(x.apply_to(&y.a) - y.apply_to(&x.a))),
        b: simplify(&(x.apply_to(&y.b) - y.apply_to(&x.b))),
    }
}

/// Symbolic composition `m2 ∘ m1` (substitution of `m1`'s components into
/// `m2`). The caller is responsible for the image of `m1` lying inside the
/// domain of `m2`; [`compose_domains_compatible`] spot-checks this.
pub fn compose(m2: &PlanarMap, m1: &PlanarMap) -> PlanarMap {
    PlanarMap {
        u: simplify(&m2.u.subst_xy(&m1.u, &m1.v)),
        v: simplify(&m2.v.subst_xy(&m1.u, &m1.v)),
        domain: m1.domain,
    }
}

/// Samples `m1`'s domain and reports points whose image misses `m2`'s domain.
pub fn compose_domains_compatible(m2: &PlanarMap, m1: &PlanarMap, s: &Sampler) -> Vec<Point> {
    let mut bad = Vec::new();
    for (px, py) in s.points() {
        let p = Point::new(px, py);
        if !m1.domain.contains(p) {
            continue;
        }
        if let Ok(q) = m1.apply(p) {
            if !m2.domain.contains(q) {
                bad.push(p);
            }
        }
    }
    bad
}

/// Newton inversion: solves `m(p) = q` from `seed`, stopping when
/// `‖m(p) - q‖ < 1e-12` or after 50 iterations.
pub fn invert_numerically(m: &PlanarMap, q: Point, seed: Point) -> Result<Point, GeomError> {
    let mut p = seed;
    for _ in 0..50 {
        let mq = m.apply(p)?;
        let rx = mq.x - q.x;
        let ry = mq.y - q.y;
        let res = (rx * rx + ry * ry).sqrt();
        if res < 1e-12 {
            return Ok(p);
        }
        let j = jacobian_at(m, p)?;
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det.abs() < 1e-300 {
            return Err(GeomError::SingularJacobian { x: p.x, y: p.y });
        }
        let dx = (j[1][1] * rx - j[0][1] * ry) / det;
        let dy = (-j[1][0] * rx + j[0][0] * ry) / det;
        p = Point::new(p.x - dx, p.y - dy);
    }
    let mq = m.apply(p)?;
    let res = ((mq.x - q.x).powi(2) + (mq.y - q.y).powi(2)).sqrt();
    if res < 1e-12 {
        Ok(p)
    } else {
        Err(GeomError::NewtonDiverged {
            x: p.x,
            y: p.y,
            residual: res,
        })
    }
}

/// Relative comparison of two semantic expressions under a sampler, used by
/// map-level identity checks.
pub fn maps_equal(m1: &PlanarMap, m2: &PlanarMap, s: &Sampler, tol: f64) -> bool {
    map_equality(m1, m2, s, tol).is_ok()
}

/// Maximum componentwise deviation of two maps over the sampler (sampling
/// `t` alongside when either map mentions it).
pub fn map_max_diff(m1: &PlanarMap, m2: &PlanarMap, s: &Sampler) -> Result<f64, GeomError> {
    let needs_t = m1.u.contains(Var::T)
        || m1.v.contains(Var::T)
        || m2.u.contains(Var::T)
        || m2.v.contains(Var::T);
    let pts = s.points();
    let ts = if needs_t {
        Some(s.t_values(pts.len()))
    } else {
        None
    };
    let mut max_err: f64 = 0.0;
    for (idx, &(x, y)) in pts.iter().enumerate() {
        let t = ts.as_ref().map(|v| v[idx]);
        for (a, b) in [(&m1.u, &m2.u), (&m1.v, &m2.v)] {
            let va = a.eval_at(x, y, t).map_err(|e| GeomError::eval_at(x, y, e))?;
            let vb = b.eval_at(x, y, t).map_err(|e| GeomError::eval_at(x, y, e))?;
            max_err = max_err.max((va - vb).norm());
        }
    }
    Ok(max_err)
}

pub fn map_equality(
    m1: &PlanarMap,
    m2: &PlanarMap,
    s: &Sampler,
    tol: f64,
) -> Result<(), EqualityFailure> {
    semantically_equal(&m1.u, &m2.u, s, tol)?;
    semantically_equal(&m1.v, &m2.v, s, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bkstructure::{conj_generator, generator};
    use crate::symexpr::exprs_equal;
    use std::f64::consts::E;

    fn shear() -> PlanarMap {
        PlanarMap::new(Expr::y().exp() * Expr::x(), Expr::y(), DomainTag::Plane)
    }

    #[test]
    fn jacobian_of_identity() {
        let j = jacobian(&PlanarMap::identity());
        let s = Sampler::generic(0);
        assert!(exprs_equal(&j[0][0], &Expr::one(), &s, 1e-12));
        assert!(j[0][1].is_zero() && j[1][0].is_zero());
        assert!(exprs_equal(&j[1][1], &Expr::one(), &s, 1e-12));
    }

    #[test]
    fn jacobian_of_shear() {
        let j = jacobian(&shear());
        let s = Sampler::generic(0);
        assert!(exprs_equal(&j[0][0], &Expr::y().exp(), &s, 1e-10));
        assert!(exprs_equal(&j[0][1], &(Expr::x() * Expr::y().exp()), &s, 1e-10));
        assert!(j[1][0].is_zero());
        assert!(exprs_equal(&j[1][1], &Expr::one(), &s, 1e-10));
    }

    #[test]
    fn jacobian_of_log_chart() {
        let m = PlanarMap::new(Expr::x().log(), Expr::y(), DomainTag::RightHalfPlane);
        let j = jacobian(&m);
        let s = Sampler::right_half_plane(0);
        assert!(exprs_equal(&j[0][0], &(Expr::one() / Expr::x()), &s, 1e-10));
        assert!(j[0][1].is_zero() && j[1][0].is_zero());
    }

    #[test]
    fn pushforward_shear_dy() {
        let dy = ComplexVectorField::new(Expr::zero(), Expr::one());
        let (a, b) = pushforward_at(&shear(), &dy, Point::new(1.0, 0.0)).unwrap();
        assert!((a - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((b - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn pushforward_identity_is_identity() {
        let v = ComplexVectorField::new(Expr::x() * Expr::y(), Expr::i() * Expr::x());
        let p = Point::new(1.3, -0.7);
        let (a, b) = pushforward_at(&PlanarMap::identity(), &v, p).unwrap();
        let (a0, b0) = v.eval(p).unwrap();
        assert!((a - a0).norm() < 1e-14 && (b - b0).norm() < 1e-14);
    }

    #[test]
    fn pushforward_inversion_chart_l2() {
        // (y, 1/x) carries L₂ = (x², i) at (1, 0) to (i, -1) at (0, 1)
        let m = PlanarMap::new(
            Expr::y(),
            Expr::one() / Expr::x(),
            DomainTag::RightHalfPlane,
        );
        let (a, b) = pushforward_at(&m, &generator(2), Point::new(1.0, 0.0)).unwrap();
        assert!((a - Complex64::new(0.0, 1.0)).norm() < 1e-12);
        assert!((b - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn relates_examples() {
        let s = Sampler::generic(0);
        let dy = ComplexVectorField::new(Expr::zero(), Expr::one());
        let target = ComplexVectorField::new(Expr::x(), Expr::one());
        assert!(relates(&shear(), &dy, &target, &s, 1e-10).is_ok());

        let log_chart = PlanarMap::new(Expr::x().log(), Expr::y(), DomainTag::RightHalfPlane);
        let l0 = ComplexVectorField::new(Expr::one(), Expr::i());
        let s_pos = Sampler::right_half_plane(0);
        assert!(relates(&log_chart, &generator(1), &l0, &s_pos, 1e-10).is_ok());

        assert!(relates(
            &PlanarMap::identity(),
            &generator(1),
            &conj_generator(1),
            &s,
            1e-10
        )
        .is_err());
    }

    #[test]
    fn lie_bracket_examples() {
        let s = Sampler::generic(0);
        for k in [1u32, 2, 3] {
            let b = lie_bracket(
                &ComplexVectorField::new(generator(k).a, Expr::zero()),
                &ComplexVectorField::new(Expr::zero(), Expr::one()),
            );
            assert!(simplify(&b.a).is_zero() && simplify(&b.b).is_zero());

            let b = lie_bracket(&generator(k), &conj_generator(k));
            assert!(exprs_equal(&b.a, &Expr::zero(), &s, 1e-10));
            assert!(exprs_equal(&b.b, &Expr::zero(), &s, 1e-10));
        }
        // [x∂x, x²∂x] = x²∂x
        let x_dx = ComplexVectorField::new(Expr::x(), Expr::zero());
        let x2_dx = ComplexVectorField::new(Expr::x().powi(2), Expr::zero());
        let b = lie_bracket(&x_dx, &x2_dx);
        assert!(exprs_equal(&b.a, &Expr::x().powi(2), &s, 1e-10));
        assert!(exprs_equal(&b.b, &Expr::zero(), &s, 1e-10));
    }

    #[test]
    fn newton_inversion() {
        let m = shear();
        let p = invert_numerically(&m, Point::new(2.0, 0.0), Point::new(1.0, 0.0)).unwrap();
        assert!(p.dist(Point::new(2.0, 0.0)) < 1e-10);
        let p = invert_numerically(&m, Point::new(E, 1.0), Point::new(1.0, 1.5)).unwrap();
        assert!(p.dist(Point::new(1.0, 1.0)) < 1e-10);
        let p =
            invert_numerically(&PlanarMap::identity(), Point::new(0.3, -0.4), Point::new(0.0, 0.0))
                .unwrap();
        assert!(p.dist(Point::new(0.3, -0.4)) < 1e-12);
    }

    #[test]
    fn compose_examples() {
        let s = Sampler::generic(0);
        let m = shear();
        assert!(maps_equal(&compose(&PlanarMap::identity(), &m), &m, &s, 1e-10));

        let t1 = PlanarMap::new(Expr::x(), Expr::y() + Expr::num(0.4), DomainTag::Plane);
        let t2 = PlanarMap::new(Expr::x(), Expr::y() + Expr::num(1.1), DomainTag::Plane);
        let want = PlanarMap::new(Expr::x(), Expr::y() + Expr::num(1.5), DomainTag::Plane);
        assert!(maps_equal(&compose(&t1, &t2), &want, &s, 1e-10));

        let flip = PlanarMap::new(-Expr::x(), -Expr::y(), DomainTag::Plane);
        assert!(maps_equal(&compose(&flip, &flip), &PlanarMap::identity(), &s, 1e-10));
    }

    #[test]
    fn jacobian_chain_rule() {
        // D(m2 ∘ m1)(p) = Dm2(m1(p)) · Dm1(p) at sample points
        let m1 = shear();
        let m2 = PlanarMap::new(Expr::x() * Expr::y(), Expr::y().powi(2) + Expr::x(), DomainTag::Plane);
        let c = compose(&m2, &m1);
        for &(x, y) in &[(0.5, -1.0), (1.2, 0.3), (-0.8, 2.0)] {
            let p = Point::new(x, y);
            let j1 = jacobian_at(&m1, p).unwrap();
            let q = m1.apply(p).unwrap();
            let j2 = jacobian_at(&m2, q).unwrap();
            let jc = jacobian_at(&c, p).unwrap();
            for r in 0..2 {
                for cc in 0..2 {
                    let want = j2[r][0] * j1[0][cc] + j2[r][1] * j1[1][cc];
                    assert!((jc[r][cc] - want).abs() < 1e-9, "entry ({r}, {cc})");
                }
            }
        }
    }

    #[test]
    fn functoriality_of_relates() {
        // shear relates ∂y to x∂x+∂y; log chart relates x∂x+∂y to ∂x+∂y
        let s = Sampler::right_half_plane(0);
        let dy = ComplexVectorField::new(Expr::zero(), Expr::one());
        let mid = ComplexVectorField::new(Expr::x(), Expr::one());
        let flat = ComplexVectorField::new(Expr::one(), Expr::one());
        let m1 = shear();
        let m2 = PlanarMap::new(Expr::x().log(), Expr::y(), DomainTag::RightHalfPlane);
        assert!(relates(&m1, &dy, &mid, &s, 1e-9).is_ok());
        assert!(relates(&m2, &mid, &flat, &s, 1e-9).is_ok());
        assert!(relates(&compose(&m2, &m1), &dy, &flat, &s, 1e-9).is_ok());
    }
}
