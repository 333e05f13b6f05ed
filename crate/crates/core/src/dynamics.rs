//! Numeric flows of real planar vector fields: fixed-step RK4 integration,
//! 1-parameter-group verification, and the strip/Möbius example.

use crate::autgroups::AutFamily;
use crate::bkstructure::generator;
use crate::error::GeomError;
use crate::geometry::{relates, ComplexVectorField, DomainTag, PlanarMap, Point};
use crate::report::VerificationReport;
use crate::symexpr::{Expr, Sampler, Var};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A flow integration task for a real vector field.
#[derive(Debug, Clone)]
pub struct FlowProblem {
    pub field: ComplexVectorField,
    pub start: Point,
    pub time: f64,
    pub step: f64,
    pub domain: DomainTag,
    /// margin used for the trajectory-confinement check
    pub boundary_margin: f64,
}

impl FlowProblem {
    pub fn new(field: ComplexVectorField, start: Point, time: f64, step: f64) -> FlowProblem {
        FlowProblem {
            field,
            start,
            time,
            step,
            domain: DomainTag::Plane,
            boundary_margin: 1e-9,
        }
    }

    pub fn in_domain(mut self, domain: DomainTag) -> FlowProblem {
        self.domain = domain;
        self
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "kebab-case")]
pub enum FlowEvent {
    /// trajectory left the domain (with the exit time)
    Boundary { time: f64, point: Point },
    /// numeric overflow
    Divergence { time: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FlowResult {
    pub endpoint: Point,
    pub event: Option<FlowEvent>,
    /// `(t, x, y)` rows when tracing was requested
    pub trajectory: Vec<(f64, f64, f64)>,
}

/// Classical fixed-step 4th-order Runge-Kutta over time `fp.time` (either
/// sign). Global error is O(h^4).
pub fn integrate_flow(fp: &FlowProblem, trace: bool) -> Result<FlowResult, GeomError> {
    let f = |p: Point| -> Result<(f64, f64), GeomError> {
        let (a, b) = fp.field.eval(p)?;
        Ok((a.re, b.re))
    };
    let n = (fp.time.abs() / fp.step).round().max(1.0) as usize;
    let h = fp.time / n as f64;
    let mut p = fp.start;
    let mut trajectory = Vec::new();
    if trace {
        trajectory.push((0.0, p.x, p.y));
    }
    for i in 0..n {
        let k1 = f(p)?;
        let k2 = f(Point::new(p.x + 0.5 * h * k1.0, p.y + 0.5 * h * k1.1))?;
        let k3 = f(Point::new(p.x + 0.5 * h * k2.0, p.y + 0.5 * h * k2.1))?;
        let k4 = f(Point::new(p.x + h * k3.0, p.y + h * k3.1))?;
        p = Point::new(
            p.x + h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
            p.y + h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
        );
        let t = (i + 1) as f64 * h;
        if !p.x.is_finite() || !p.y.is_finite() || p.x.abs() > 1e150 || p.y.abs() > 1e150 {
            return Ok(FlowResult {
                endpoint: p,
                event: Some(FlowEvent::Divergence { time: t }),
                trajectory,
            });
        }
        if !fp.domain.contains_with_margin(p, fp.boundary_margin) {
            return Ok(FlowResult {
                endpoint: p,
                event: Some(FlowEvent::Boundary { time: t, point: p }),
                trajectory,
            });
        }
        if trace {
            trajectory.push((t, p.x, p.y));
        }
    }
    Ok(FlowResult {
        endpoint: p,
        event: None,
        trajectory,
    })
}

/// Endpoint-only convenience wrapper.
pub fn flow_endpoint(
    field: &ComplexVectorField,
    start: Point,
    time: f64,
    step: f64,
) -> Result<Point, GeomError> {
    let r = integrate_flow(&FlowProblem::new(field.clone(), start, time, step), false)?;
    match r.event {
        None => Ok(r.endpoint),
        Some(FlowEvent::Boundary { time, .. }) => Err(GeomError::Other(format!(
            "trajectory left the domain at t = {time}"
        ))),
        Some(FlowEvent::Divergence { time }) => Err(GeomError::Other(format!(
            "trajectory diverged at t = {time}"
        ))),
    }
}

/// The Möbius transformation `z ↦ z / (1 - t z)` in real coordinates.
pub fn mobius_reference(z0: Point, t: f64) -> Result<Point, GeomError> {
    let z = z0.as_complex();
    let den = Complex64::new(1.0, 0.0) - t * z;
    if den.norm() < 1e-12 {
        return Err(GeomError::Other(format!(
            "Möbius pole: 1 - t z vanishes at z = {} + {}i, t = {t}",
            z0.x, z0.y
        )));
    }
    Ok(Point::from_complex(z / den))
}

/// Generator of the Möbius 1-parameter group: `(x² - y²) ∂x + 2xy ∂y`.
pub fn mobius_generator() -> ComplexVectorField {
    ComplexVectorField::new(
        Expr::x().powi(2) - Expr::y().powi(2),
        Expr::int(2) * Expr::x() * Expr::y(),
    )
}

/// Verifies that `V` generates the family: `d/dt|₀ fam(t)(p) = V(p)` at
/// sampled points, and that the RK4 flow of `V` tracks `fam(t)` for a few
/// times.
pub fn one_parameter_check(
    v: &ComplexVectorField,
    fam: &AutFamily,
    s: &Sampler,
) -> VerificationReport {
    let mut report = VerificationReport::new(
        &format!("one-parameter/{}", fam.name),
        "generator of a 1-parameter subgroup",
    );
    let du = fam.map_of_t.u.differentiate(Var::T).subst_t(0.0);
    let dv = fam.map_of_t.v.differentiate(Var::T).subst_t(0.0);
    for (x, y) in s.points() {
        let p = Point::new(x, y);
        let gen = match (du.eval_at(x, y, None), dv.eval_at(x, y, None)) {
            (Ok(a), Ok(b)) => (a, b),
            _ => {
                report.fail("generator evaluation failed", &format!("({x}, {y})"), "", "");
                continue;
            }
        };
        match v.eval(p) {
            Ok((a, b)) => {
                let err = ((gen.0 - a).norm_sqr() + (gen.1 - b).norm_sqr()).sqrt();
                report.record_error(err);
                if err > 1e-9 * (1.0 + a.norm().max(b.norm())) {
                    report.fail(
                        "d/dt|₀ fam(t)(p) does not match V(p)",
                        &format!("({x}, {y})"),
                        &format!("{err:.3e}"),
                        "<= 1e-9 (relative)",
                    );
                }
            }
            Err(e) => report.fail("field evaluation failed", &format!("({x}, {y})"), &e.to_string(), ""),
        }
    }
    // flow-vs-family agreement at a few times from a few seeds
    for &(x, y) in &[(0.8, -0.4), (1.5, 1.0), (-1.2, 0.6)] {
        for t in [0.1, 0.5, 1.0] {
            let p = Point::new(x, y);
            let flowed = flow_endpoint(v, p, t, 1e-3);
            let mapped = fam.at(t).apply(p);
            match (flowed, mapped) {
                (Ok(a), Ok(b)) => {
                    let err = a.dist(b);
                    report.record_error(err);
                    if err > 1e-6 {
                        report.fail(
                            "flow of V disagrees with fam(t)",
                            &format!("p=({x}, {y}), t={t}"),
                            &format!("{err:.3e}"),
                            "<= 1e-6",
                        );
                    }
                }
                (Err(e), _) | (_, Err(e)) => report.fail(
                    "flow/family evaluation failed",
                    &format!("p=({x}, {y}), t={t}"),
                    &e.to_string(),
                    "",
                ),
            }
        }
    }
    report
}

/// The map `u(x, y) = x e^{iy}` of the strip viewed as a planar map.
pub fn strip_chart() -> PlanarMap {
    PlanarMap::new(
        Expr::x() * Expr::y().cos(),
        Expr::x() * Expr::y().sin(),
        DomainTag::Strip {
            y0: -std::f64::consts::FRAC_PI_2,
            y1: std::f64::consts::FRAC_PI_2,
        },
    )
}

/// The real vector field on the strip obtained by pulling the Möbius
/// generator back through `u`: `x² cos y ∂x + x sin y ∂y`. Derived with the
/// pushforward engine as the real part of `(x e^{-iy})·L₁`.
pub fn strip_field() -> ComplexVectorField {
    let multiplier = Expr::x() * (-(Expr::i() * Expr::y())).exp();
    generator(1).scale(&multiplier).real_part()
}

/// The strip/Möbius example checks: (1) `u` intertwines `L₁` with `z̄ ∂z̄`
/// and the scaled generator with the Möbius generator; (2) the strip flow is
/// confined to the strip for |t| <= 2 from a seed grid; (3) the time-t flow
/// map is numerically conjugate to the Möbius action through `u`.
pub fn strip_example_check(seed: u64) -> VerificationReport {
    let mut report =
        VerificationReport::new("strip-mobius-example", "strip flow of local automorphisms");
    let u = strip_chart();
    let strip = u.domain;

    // (1a) u intertwines L₁ with z̄·(∂x + i∂y)
    let zbar = Expr::x() - Expr::i() * Expr::y();
    let target1 = ComplexVectorField::new(zbar.clone(), Expr::i() * zbar);
    let s = Sampler {
        x_min: -2.0,
        x_max: 2.0,
        y_min: -1.4,
        y_max: 1.4,
        seed,
        ..Sampler::default()
    };
    if let Err(f) = relates(&u, &generator(1), &target1, &s, 1e-9) {
        report.fail("u_*(L₁) ≠ z̄(∂x + i∂y)", "", &format!("{f:?}"), "relates");
    }

    // (1b) the derived real field pushes to the Möbius generator
    let w = strip_field();
    if let Err(f) = relates(&u, &w, &mobius_generator(), &s, 1e-9) {
        report.fail(
            "u_*(strip field) ≠ Möbius generator",
            "",
            &format!("{f:?}"),
            "relates",
        );
    }

    // (2) confinement: flow from a seed grid stays inside the strip
    let seeds = strip_seed_grid();
    for &p in &seeds {
        for t in [-2.0, -1.0, 1.0, 2.0] {
            let fp = FlowProblem::new(w.clone(), p, t, 1e-3).in_domain(strip);
            match integrate_flow(&fp, false) {
                Ok(r) => {
                    if let Some(ev) = r.event {
                        report.fail(
                            "strip flow left the strip",
                            &format!("p=({}, {}), t={t}", p.x, p.y),
                            &format!("{ev:?}"),
                            "confined",
                        );
                    }
                }
                Err(e) => report.fail(
                    "strip flow failed",
                    &format!("p=({}, {}), t={t}", p.x, p.y),
                    &e.to_string(),
                    "",
                ),
            }
        }
    }

    // (3) numeric conjugation to the Möbius action through u
    for &p in &seeds {
        for t in [0.25, 0.8] {
            let direct = (|| -> Result<f64, GeomError> {
                let flowed = flow_endpoint(&w, p, t, 1e-3)?;
                let through_u = u.apply(flowed)?;
                let reference = mobius_reference(u.apply(p)?, t)?;
                Ok(through_u.dist(reference))
            })();
            match direct {
                Ok(err) => {
                    report.record_error(err);
                    if err > 1e-6 {
                        report.fail(
                            "flow map is not conjugate to the Möbius action",
                            &format!("p=({}, {}), t={t}", p.x, p.y),
                            &format!("{err:.3e}"),
                            "<= 1e-6",
                        );
                    }
                }
                Err(e) => report.fail(
                    "conjugation check failed",
                    &format!("p=({}, {}), t={t}", p.x, p.y),
                    &e.to_string(),
                    "",
                ),
            }
        }
    }
    report
}

/// Seeds for the strip-confinement check, chosen so the conjugated Möbius
/// trajectory stays inside one half-plane for |t| <= 2 (|x| < cos(y)/2).
pub fn strip_seed_grid() -> Vec<Point> {
    let mut seeds = Vec::new();
    for &x in &[0.1, 0.2] {
        for &y in &[-0.4, -0.1, 0.15, 0.35] {
            seeds.push(Point::new(x, y));
        }
    }
    seeds.push(Point::new(-0.15, 0.25));
    seeds.push(Point::new(-0.1, -0.3));
    seeds
}
