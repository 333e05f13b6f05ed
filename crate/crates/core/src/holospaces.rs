//! b-holomorphic functions and function-space numerics: the example catalog,
//! the L_k-residual checker, and b-Segal-Bargmann norms via tensor
//! Gauss-Hermite quadrature with weight `e^{-x²}` per axis.

use crate::error::{EvalError, GeomError};
use crate::geometry::DomainTag;
use crate::symexpr::{semantically_equal, simplify, Expr, Sampler, Var};
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_4;
use thiserror::Error;

/// A b-holomorphic function with an optional entire pushforward `F` through
/// `(x, y) ↦ (log x, y)`. In `F` the variables `(x, y)` stand for the real
/// and imaginary parts of `w`.
#[derive(Debug, Clone)]
pub struct BHoloFunction {
    pub name: String,
    pub expr: Expr,
    pub domain: DomainTag,
    pub pushforward: Option<Expr>,
}

/// Tensor Gauss-Hermite quadrature settings.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureSpec {
    /// nodes per axis
    pub nodes: usize,
    /// when set, the result is recomputed at `2 * nodes` and the two values
    /// must agree to 1e-8 relative
    pub check_convergence: bool,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            nodes: 64,
            check_convergence: true,
        }
    }
}

#[derive(Debug, Clone, Error)]
pub enum NormError {
    #[error("integrand evaluation failed at node ({x}, {y}): {source}")]
    Eval {
        x: f64,
        y: f64,
        #[source]
        source: EvalError,
    },
    #[error("quadrature did not converge: relative change {rel_change:.3e} between N and 2N; divergence suspected")]
    NotConverged { rel_change: f64, value: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormResult {
    pub value: f64,
    pub nodes: usize,
    pub converged: bool,
    pub rel_change: f64,
}

/// Nodes and weights for n-point Gauss-Hermite quadrature with weight
/// `e^{-x²}` (Newton iteration on the orthonormal Hermite recurrence).
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    let mut z = 0.0_f64;
    for i in 0..m {
        // initial guesses: largest root first, then march inward
        z = match i {
            0 => {
                let a = (2 * n + 1) as f64;
                a.sqrt() - 1.85575 * a.powf(-1.0 / 6.0)
            }
            1 => z - 1.14 * (n as f64).powf(0.426) / z,
            2 => 1.86 * z - 0.86 * nodes[0],
            3 => 1.91 * z - 0.91 * nodes[1],
            _ => 2.0 * z - nodes[i - 2],
        };
        let mut dp = 0.0;
        for _ in 0..200 {
            let (p, d) = hermite_orthonormal(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-15 * (1.0 + z.abs()) {
                break;
            }
        }
        nodes[i] = z;
        nodes[n - 1 - i] = -z;
        let w = 2.0 / (dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[m - 1] = 0.0;
        let (_, d) = hermite_orthonormal(n, 0.0);
        weights[m - 1] = 2.0 / (d * d);
    }
    (nodes, weights)
}

/// Value and derivative of the orthonormal Hermite polynomial of degree `n`
/// (orthonormal with respect to `e^{-x²}` on the line).
fn hermite_orthonormal(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 0.0_f64;
    let mut p = std::f64::consts::PI.powf(-0.25);
    for k in 0..n {
        let kf = k as f64;
        let next = x * (2.0 / (kf + 1.0)).sqrt() * p - (kf / (kf + 1.0)).sqrt() * p_prev;
        p_prev = p;
        p = next;
    }
    let dp = (2.0 * n as f64).sqrt() * p_prev;
    (p, dp)
}

fn quad_norm_sq_at(f: &Expr, n: usize) -> Result<f64, NormError> {
    let (nodes, weights) = gauss_hermite(n);
    let mut total = 0.0;
    for (i, &xi) in nodes.iter().enumerate() {
        let mut row = 0.0;
        for (j, &yj) in nodes.iter().enumerate() {
            let v = f
                .eval_at(xi, yj, None)
                .map_err(|source| NormError::Eval {
                    x: xi,
                    y: yj,
                    source,
                })?;
            row += weights[j] * v.norm_sqr();
        }
        total += weights[i] * row;
    }
    Ok(total)
}

/// Approximates `∬ |F(X + iY)|² e^{-X² - Y²} dX dY` for an entire function
/// expression `F` in the variables `(x, y)` standing for `(Re w, Im w)`.
pub fn bargmann_norm_sq(f: &Expr, q: &QuadratureSpec) -> Result<NormResult, NormError> {
    let v1 = quad_norm_sq_at(f, q.nodes)?;
    if !q.check_convergence {
        return Ok(NormResult {
            value: v1,
            nodes: q.nodes,
            converged: false,
            rel_change: f64::NAN,
        });
    }
    let v2 = quad_norm_sq_at(f, q.nodes * 2)?;
    let rel = (v2 - v1).abs() / v2.abs().max(1e-300);
    if rel >= 1e-8 {
        return Err(NormError::NotConverged {
            rel_change: rel,
            value: v2,
        });
    }
    Ok(NormResult {
        value: v2,
        nodes: q.nodes * 2,
        converged: true,
        rel_change: rel,
    })
}

/// The raw N-vs-2N relative change, for membership classification.
pub fn norm_convergence(f: &Expr, nodes: usize) -> Result<(f64, f64), NormError> {
    let v1 = quad_norm_sq_at(f, nodes)?;
    let v2 = quad_norm_sq_at(f, nodes * 2)?;
    let rel = (v2 - v1).abs() / v2.abs().max(1e-300);
    Ok((v2, rel))
}

/// Result of the residual check `sup |x^k ∂f/∂x + i ∂f/∂y|`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResidualResult {
    pub sup: f64,
    /// the residual simplified to the zero expression
    pub symbolic_zero: bool,
    pub points_checked: usize,
}

/// The symbolic L_k residual of `f`.
pub fn residual_expr(f: &Expr, k: u32) -> Expr {
    let xk = if k == 0 {
        Expr::one()
    } else {
        Expr::x().powi(k as i64)
    };
    simplify(&(xk * f.differentiate(Var::X) + Expr::i() * f.differentiate(Var::Y)))
}

/// Maximum of `|L_k f|` over the grid; exactly zero when the residual
/// simplifies away symbolically.
pub fn residual_sup(f: &Expr, k: u32, grid: &[(f64, f64)]) -> Result<ResidualResult, GeomError> {
    let r = residual_expr(f, k);
    if r.is_zero() {
        return Ok(ResidualResult {
            sup: 0.0,
            symbolic_zero: true,
            points_checked: 0,
        });
    }
    let mut sup = 0.0_f64;
    for &(x, y) in grid {
        let v = r
            .eval_at(x, y, None)
            .map_err(|e| GeomError::eval_at(x, y, e))?;
        sup = sup.max(v.norm());
    }
    Ok(ResidualResult {
        sup,
        symbolic_zero: false,
        points_checked: grid.len(),
    })
}

/// Uniform rectangular grid helper for residual checks.
pub fn grid(x_min: f64, x_max: f64, x_step: f64, y_min: f64, y_max: f64, y_step: f64) -> Vec<(f64, f64)> {
    let mut pts = Vec::new();
    let mut x = x_min;
    while x <= x_max + 1e-12 {
        let mut y = y_min;
        while y <= y_max + 1e-12 {
            pts.push((x, y));
            y += y_step;
        }
        x += x_step;
    }
    pts
}

/// `u(x, y) = x e^{iy}`, the basic b-holomorphic function.
pub fn u_function() -> Expr {
    Expr::x() * (Expr::i() * Expr::y()).exp()
}

/// The flat b-holomorphic function `exp(-1/u)` glued with 0 across the
/// singular locus, defined on the strip `-π/4 < y < π/4`.
pub fn flat_function() -> Expr {
    Expr::ifpos(
        Expr::x(),
        (-(Expr::one() / u_function())).exp(),
        Expr::zero(),
    )
}

/// The catalog of example b-holomorphic functions: `u`, `u²`, `u³`,
/// `h ∘ u` for `h(w) = w/(1-w)`, and the flat function.
pub fn catalog_bholo() -> Vec<BHoloFunction> {
    let u = u_function();
    let mut out = Vec::new();
    for n in 1..=3i64 {
        let expr = if n == 1 { u.clone() } else { u.clone().powi(n) };
        out.push(BHoloFunction {
            name: format!("u^{n}"),
            expr,
            domain: DomainTag::Plane,
            pushforward: Some((Expr::num(n as f64) * (Expr::x() + Expr::i() * Expr::y())).exp()),
        });
    }
    out.push(BHoloFunction {
        name: "h∘u, h(w)=w/(1-w)".to_string(),
        expr: u.clone() / (Expr::one() - u),
        domain: DomainTag::Plane, // away from the pole u = 1
        pushforward: None,
    });
    out.push(BHoloFunction {
        name: "flat".to_string(),
        expr: flat_function(),
        domain: DomainTag::Strip {
            y0: -FRAC_PI_4,
            y1: FRAC_PI_4,
        },
        pushforward: None,
    });
    out
}

/// Outcome of pushing a b-holomorphic function to an entire expression.
#[derive(Debug, Clone)]
pub struct EntirePushforward {
    pub expr: Expr,
    /// round-trip identity `F(log x, y) = f(x, y)` verified on `x > 0`
    pub verified: bool,
}

/// Pushes `f` through `(x, y) ↦ (log x, y)`: returns `F` with
/// `F(X, Y) = f(e^X, Y)`, simplified, with the round-trip identity checked
/// on the right half-plane.
pub fn b_to_entire(f: &Expr) -> EntirePushforward {
    let pushed = simplify(&f.subst(Some(&Expr::x().exp()), None, None));
    let back = pushed.subst(Some(&Expr::x().log()), None, None);
    let s = Sampler::right_half_plane(0);
    let verified = semantically_equal(&back, f, &s, 1e-9).is_ok();
    EntirePushforward {
        expr: pushed,
        verified,
    }
}

/// Membership verdict in the b-Segal-Bargmann space.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Membership {
    Member { norm_sq: f64 },
    NotMember { rel_change: f64 },
    Undecided { rel_change: f64 },
}

/// Decides membership by pushing forward and testing quadrature
/// convergence: agreement to 1e-6 is membership, disagreement beyond 1e-2
/// is non-membership, in between is undecided. Quadrature cannot prove
/// divergence, only suspect it.
pub fn b_bargmann_member(f: &BHoloFunction, q: &QuadratureSpec) -> Result<Membership, NormError> {
    let entire = match &f.pushforward {
        Some(p) => p.clone(),
        None => b_to_entire(&f.expr).expr,
    };
    let (value, rel) = norm_convergence(&entire, q.nodes)?;
    Ok(if rel <= 1e-6 {
        Membership::Member { norm_sq: value }
    } else if rel < 1e-2 {
        Membership::Undecided { rel_change: rel }
    } else {
        Membership::NotMember { rel_change: rel }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gauss_hermite_low_orders() {
        let (nodes, weights) = gauss_hermite(1);
        assert!(nodes[0].abs() < 1e-14);
        assert!((weights[0] - PI.sqrt()).abs() < 1e-13);

        // ∫ e^{-x²} dx = √π and ∫ x² e^{-x²} dx = √π/2, exact for n >= 2
        for n in [2usize, 5, 16, 64] {
            let (nodes, weights) = gauss_hermite(n);
            let total: f64 = weights.iter().sum();
            assert!((total - PI.sqrt()).abs() < 1e-12, "n = {n}");
            let second: f64 = nodes.iter().zip(&weights).map(|(x, w)| w * x * x).sum();
            assert!((second - PI.sqrt() / 2.0).abs() < 1e-12, "n = {n}");
            // symmetry
            for i in 0..n {
                assert!((nodes[i] + nodes[n - 1 - i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn residual_examples() {
        let g = grid(-2.0, 2.0, 0.25, -3.0, 3.0, 0.5);
        let r = residual_sup(&u_function(), 1, &g).unwrap();
        assert!(r.symbolic_zero && r.sup == 0.0);

        // L₁x = x, maximized at |x| = 2 on this grid
        let r = residual_sup(&Expr::x(), 1, &g).unwrap();
        assert!(!r.symbolic_zero);
        assert!((r.sup - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rational_composition_is_b_holomorphic() {
        // h ∘ u for h(w) = w/(1-w): L₁(h∘u) = h'(u)·L₁u = 0
        let u = u_function();
        let f = u.clone() / (Expr::one() - u);
        let g = grid(0.1, 0.9, 0.1, -0.5, 0.5, 0.25);
        let r = residual_sup(&f, 1, &g).unwrap();
        assert!(
            r.symbolic_zero || r.sup < 1e-12,
            "residual sup {:.3e}, symbolic_zero = {}",
            r.sup,
            r.symbolic_zero
        );
    }

    #[test]
    fn b_to_entire_examples() {
        let s = Sampler::generic(0);
        let w = Expr::x() + Expr::i() * Expr::y();

        let p = b_to_entire(&u_function());
        assert!(p.verified);
        assert!(crate::symexpr::exprs_equal(&p.expr, &w.clone().exp(), &s, 1e-9));

        let p = b_to_entire(&Expr::one());
        assert!(p.verified);
        assert!(crate::symexpr::exprs_equal(&p.expr, &Expr::one(), &s, 1e-12));

        let p = b_to_entire(&u_function().powi(3));
        assert!(p.verified);
        assert!(crate::symexpr::exprs_equal(
            &p.expr,
            &(Expr::int(3) * w).exp(),
            &s,
            1e-9
        ));
    }

    #[test]
    fn norm_of_constant_is_pi() {
        let r = bargmann_norm_sq(&Expr::one(), &QuadratureSpec::default()).unwrap();
        assert!((r.value - PI).abs() < 1e-10);
        assert!(r.converged);
    }

    #[test]
    fn norm_of_exponentials() {
        let w = Expr::x() + Expr::i() * Expr::y();
        for (n, want) in [(1i64, PI * 1f64.exp()), (2, PI * 4f64.exp())] {
            let f = (Expr::int(n) * w.clone()).exp();
            let r = bargmann_norm_sq(&f, &QuadratureSpec::default()).unwrap();
            assert!((r.value - want).abs() / want < 1e-6, "n = {n}");
        }
    }

    #[test]
    fn norm_scaling_is_quadratic() {
        let w = Expr::x() + Expr::i() * Expr::y();
        let f = w.clone().exp();
        let cf = Expr::complex(0.0, 2.5) * w.exp();
        let q = QuadratureSpec::default();
        let base = bargmann_norm_sq(&f, &q).unwrap().value;
        let scaled = bargmann_norm_sq(&cf, &q).unwrap().value;
        assert!((scaled - 6.25 * base).abs() / scaled < 1e-10);
    }

    #[test]
    fn quadrature_converges_by_64_nodes() {
        // Once the doubling error hits the roundoff floor it can fluctuate, so
        // only require that the 64-node estimate is fully converged and no
        // worse than the 16-node one.
        let w = Expr::x() + Expr::i() * Expr::y();
        for n in 1..=3i64 {
            let f = (Expr::int(n) * w.clone()).exp();
            let (_, coarse) = norm_convergence(&f, 16).unwrap();
            let (_, fine) = norm_convergence(&f, 64).unwrap();
            assert!(fine < 1e-8, "n = {n}, rel = {fine:.3e}");
            assert!(fine <= coarse.max(1e-12), "n = {n}");
        }
    }

    #[test]
    fn membership_catalog_verdicts() {
        let q = QuadratureSpec::default();
        for f in catalog_bholo() {
            match f.name.as_str() {
                "u^1" | "u^2" | "u^3" => {
                    let n: f64 = f.name[2..].parse().unwrap();
                    match b_bargmann_member(&f, &q).unwrap() {
                        Membership::Member { norm_sq } => {
                            let want = PI * (n * n).exp();
                            assert!((norm_sq - want).abs() / want < 1e-6, "{}", f.name);
                        }
                        other => panic!("{} not classified as member: {other:?}", f.name),
                    }
                }
                _ => {}
            }
        }
    }

    #[test]
    fn flat_catalog_entry_shape() {
        let cat = catalog_bholo();
        let flat = cat.iter().find(|f| f.name == "flat").unwrap();
        assert!(matches!(flat.domain, DomainTag::Strip { .. }));
        // vanishes left of the axis, nonzero to the right
        assert_eq!(flat.expr.eval_at(-0.5, 0.0, None).unwrap().norm(), 0.0);
        assert!(flat.expr.eval_at(0.5, 0.0, None).unwrap().norm() > 0.0);
    }
}
