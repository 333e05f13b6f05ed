//! Randomized invariants for the expression layer and the Lie bracket.

use bkplane::geometry::{lie_bracket, ComplexVectorField};
use bkplane::symexpr::{parse_expr, simplify, Expr, Var};
use num_complex::Complex64;
use proptest::prelude::*;

/// Random expression trees built only from total operations, so every tree is
/// finite at every sample point in the box [-2, 2]².
fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (-2.0..2.0f64).prop_map(Expr::num),
        ((-2.0..2.0f64), (-2.0..2.0f64)).prop_map(|(a, b)| Expr::complex(a, b)),
        Just(Expr::x()),
        Just(Expr::y()),
    ];
    leaf.prop_recursive(4, 64, 8, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a - b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
            inner.clone().prop_map(|a| -a),
            inner.clone().prop_map(Expr::sin),
            inner.prop_map(Expr::cos),
        ]
    })
}

fn sample_points() -> Vec<(f64, f64)> {
    vec![
        (0.3, -0.7),
        (1.2, 0.9),
        (-1.5, 0.25),
        (0.11, 1.9),
        (-0.4, -1.3),
    ]
}

fn eval(e: &Expr, x: f64, y: f64) -> Complex64 {
    e.eval_at(x, y, None).expect("total expression")
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn print_parse_round_trip(e in arb_expr()) {
        let back = parse_expr(&e.to_string()).unwrap();
        for (x, y) in sample_points() {
            prop_assert!(
                close(eval(&e, x, y), eval(&back, x, y), 1e-10),
                "at ({x}, {y}): {e}"
            );
        }
    }

    #[test]
    fn derivative_matches_finite_differences(e in arb_expr()) {
        let h = 1e-6;
        let dx = e.differentiate(Var::X);
        let dy = e.differentiate(Var::Y);
        for (x, y) in sample_points() {
            let fd_x = (eval(&e, x + h, y) - eval(&e, x - h, y)) / (2.0 * h);
            let fd_y = (eval(&e, x, y + h) - eval(&e, x, y - h)) / (2.0 * h);
            prop_assert!(close(eval(&dx, x, y), fd_x, 1e-5), "d/dx of {e} at ({x}, {y})");
            prop_assert!(close(eval(&dy, x, y), fd_y, 1e-5), "d/dy of {e} at ({x}, {y})");
        }
    }

    #[test]
    fn simplify_preserves_values(e in arb_expr()) {
        let s = simplify(&e);
        for (x, y) in sample_points() {
            prop_assert!(
                close(eval(&e, x, y), eval(&s, x, y), 1e-9),
                "at ({x}, {y}): {e}  ~/~>  {s}"
            );
        }
    }

    #[test]
    fn differentiation_is_linear(a in arb_expr(), b in arb_expr(), c in -2.0..2.0f64) {
        let lhs = (a.clone() + Expr::num(c) * b.clone()).differentiate(Var::X);
        let rhs = a.differentiate(Var::X) + Expr::num(c) * b.differentiate(Var::X);
        for (x, y) in sample_points() {
            prop_assert!(close(eval(&lhs, x, y), eval(&rhs, x, y), 1e-9));
        }
    }
}

/// Polynomial vector fields with small integer coefficients, used to exercise
/// the bracket identities without floating-point noise in the coefficients.
fn arb_poly() -> impl Strategy<Value = Expr> {
    (
        -2i64..3,
        -2i64..3,
        -2i64..3,
        -2i64..3,
    )
        .prop_map(|(c0, cx, cy, cxy)| {
            Expr::int(c0)
                + Expr::int(cx) * Expr::x()
                + Expr::int(cy) * Expr::y()
                + Expr::int(cxy) * Expr::x() * Expr::y()
        })
}

fn arb_field() -> impl Strategy<Value = ComplexVectorField> {
    (arb_poly(), arb_poly()).prop_map(|(a, b)| ComplexVectorField::new(a, b))
}

fn fields_agree(u: &ComplexVectorField, v: &ComplexVectorField) -> bool {
    sample_points().into_iter().all(|(x, y)| {
        let p = bkplane::geometry::Point::new(x, y);
        let (ua, ub) = u.eval(p).unwrap();
        let (va, vb) = v.eval(p).unwrap();
        close(ua, va, 1e-8) && close(ub, vb, 1e-8)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bracket_is_antisymmetric(u in arb_field(), v in arb_field()) {
        let uv = lie_bracket(&u, &v);
        let vu = lie_bracket(&v, &u);
        let neg = ComplexVectorField::new(-vu.a.clone(), -vu.b.clone());
        prop_assert!(fields_agree(&uv, &neg));
    }

    #[test]
    fn bracket_satisfies_jacobi(u in arb_field(), v in arb_field(), w in arb_field()) {
        let t1 = lie_bracket(&u, &lie_bracket(&v, &w));
        let t2 = lie_bracket(&v, &lie_bracket(&w, &u));
        let t3 = lie_bracket(&w, &lie_bracket(&u, &v));
        let total = ComplexVectorField::new(
            t1.a.clone() + t2.a.clone() + t3.a.clone(),
            t1.b.clone() + t2.b.clone() + t3.b.clone(),
        );
        let zero = ComplexVectorField::new(Expr::zero(), Expr::zero());
        prop_assert!(fields_agree(&total, &zero));
    }
}
