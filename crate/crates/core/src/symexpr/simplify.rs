//! Terminating rewrite system: constant folding, 0/1 absorption, like-term
//! collection over flattened sums, power collection over flattened products,
//! merging of `exp` factors, and exp/log cancellation. The output is
//! semantically equal to the input; no polynomial expansion is attempted.

use super::{complex_pow, BinOp, Expr, UnaryOp};
use num_complex::Complex64;
use std::collections::BTreeMap;

pub fn simplify(e: &Expr) -> Expr {
    norm(e)
}

fn c_one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn c_zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn norm(e: &Expr) -> Expr {
    match e {
        Expr::Num(_) | Expr::Var(_) => e.clone(),
        Expr::IfPos(g, a, b) => {
            let (g, a, b) = (norm(g), norm(a), norm(b));
            if let Some(c) = g.as_const() {
                return if c.re > 0.0 { a } else { b };
            }
            if a == b {
                return a;
            }
            Expr::ifpos(g, a, b)
        }
        Expr::Unary(UnaryOp::Neg, a) => norm(&(Expr::num(-1.0) * a.as_ref().clone())),
        Expr::Unary(op, a) => norm_unary(*op, a),
        Expr::Binary(BinOp::Add | BinOp::Sub, _, _) => norm_sum(e),
        Expr::Binary(BinOp::Mul | BinOp::Div, _, _) => {
            let mut p = Product::new();
            p.absorb(e, 1.0, false);
            p.build()
        }
        Expr::Binary(BinOp::Pow, b, c) => norm_pow(b, c),
    }
}

fn norm_unary(op: UnaryOp, a: &Expr) -> Expr {
    let a = norm(a);
    if let Some(c) = a.as_const() {
        if let Some(v) = fold_unary(op, c) {
            return Expr::Num(v);
        }
    }
    match op {
        UnaryOp::Exp => {
            let mut p = Product::new();
            p.absorb_exp_arg(1.0, a);
            p.build()
        }
        UnaryOp::Log => {
            if let Expr::Unary(UnaryOp::Exp, g) = &a {
                if g.is_real_valued() {
                    return g.as_ref().clone();
                }
            }
            Expr::Unary(UnaryOp::Log, a.into())
        }
        UnaryOp::Conj => match &a {
            _ if a.is_real_valued() => a,
            Expr::Unary(UnaryOp::Conj, inner) => inner.as_ref().clone(),
            _ => Expr::Unary(UnaryOp::Conj, a.into()),
        },
        UnaryOp::Re if a.is_real_valued() => a,
        UnaryOp::Im if a.is_real_valued() => Expr::zero(),
        _ => Expr::Unary(op, a.into()),
    }
}

fn fold_unary(op: UnaryOp, c: Complex64) -> Option<Complex64> {
    match op {
        UnaryOp::Neg => Some(-c),
        UnaryOp::Exp => Some(c.exp()),
        UnaryOp::Log => {
            if c.im == 0.0 && c.re <= 0.0 {
                None
            } else {
                Some(c.ln())
            }
        }
        UnaryOp::Sin => Some(c.sin()),
        UnaryOp::Cos => Some(c.cos()),
        UnaryOp::Tan => Some(c.tan()),
        UnaryOp::Sqrt => {
            if c.im == 0.0 && c.re < 0.0 {
                None
            } else {
                Some(c.sqrt())
            }
        }
        UnaryOp::Conj => Some(c.conj()),
        UnaryOp::Re => Some(Complex64::new(c.re, 0.0)),
        UnaryOp::Im => Some(Complex64::new(c.im, 0.0)),
    }
}

fn norm_pow(base: &Expr, expo: &Expr) -> Expr {
    let expo = norm(expo);
    match expo.as_const() {
        Some(c) if c == c_zero() => Expr::one(),
        Some(c) if c == c_one() => norm(base),
        Some(c) if c.im == 0.0 => {
            let mut p = Product::new();
            p.absorb(base, c.re, false);
            p.build()
        }
        _ => {
            let base = norm(base);
            if let (Some(b), Some(c)) = (base.as_const(), expo.as_const()) {
                if let Ok(v) = complex_pow(b, c, 0.0, 0.0) {
                    return Expr::Num(v);
                }
            }
            Expr::Binary(BinOp::Pow, base.into(), expo.into())
        }
    }
}

// ---- sums ----

fn norm_sum(e: &Expr) -> Expr {
    let mut terms: BTreeMap<String, (Complex64, Expr)> = BTreeMap::new();
    let mut konst = c_zero();
    flatten_sum(e, c_one(), false, &mut terms, &mut konst);
    build_sum(terms, konst)
}

fn flatten_sum(
    e: &Expr,
    sign: Complex64,
    normalized: bool,
    terms: &mut BTreeMap<String, (Complex64, Expr)>,
    konst: &mut Complex64,
) {
    match e {
        Expr::Binary(BinOp::Add, a, b) => {
            flatten_sum(a, sign, normalized, terms, konst);
            flatten_sum(b, sign, normalized, terms, konst);
        }
        Expr::Binary(BinOp::Sub, a, b) => {
            flatten_sum(a, sign, normalized, terms, konst);
            flatten_sum(b, -sign, normalized, terms, konst);
        }
        Expr::Unary(UnaryOp::Neg, a) => flatten_sum(a, -sign, normalized, terms, konst),
        Expr::Num(c) => *konst += sign * c,
        _ => {
            let t = if normalized { e.clone() } else { norm(e) };
            // a normalized subterm may itself be a sum
            if matches!(
                t,
                Expr::Binary(BinOp::Add | BinOp::Sub, _, _) | Expr::Unary(UnaryOp::Neg, _)
            ) {
                flatten_sum(&t.clone(), sign, true, terms, konst);
                return;
            }
            if let Some(c) = t.as_const() {
                *konst += sign * c;
                return;
            }
            let (coeff, rest) = split_coeff(&t);
            let key = rest.to_string();
            let entry = terms.entry(key).or_insert_with(|| (c_zero(), rest));
            entry.0 += sign * coeff;
        }
    }
}

fn split_coeff(e: &Expr) -> (Complex64, Expr) {
    match e {
        Expr::Num(c) => (*c, Expr::one()),
        Expr::Binary(BinOp::Mul, a, b) => {
            if let Expr::Num(c) = a.as_ref() {
                (*c, b.as_ref().clone())
            } else {
                (c_one(), e.clone())
            }
        }
        _ => (c_one(), e.clone()),
    }
}

fn build_sum(terms: BTreeMap<String, (Complex64, Expr)>, konst: Complex64) -> Expr {
    let mut acc: Option<Expr> = None;
    for (_, (coeff, rest)) in terms {
        if coeff == c_zero() {
            continue;
        }
        let term = if rest == Expr::one() {
            Expr::Num(coeff)
        } else if coeff == c_one() {
            rest
        } else {
            Expr::Num(coeff) * rest
        };
        acc = Some(match acc {
            None => term,
            Some(s) => s + term,
        });
    }
    match acc {
        None => Expr::Num(konst),
        Some(s) if konst == c_zero() => s,
        Some(s) => s + Expr::Num(konst),
    }
}

// ---- products ----

struct Product {
    coeff: Complex64,
    factors: BTreeMap<String, (Expr, f64)>,
    /// factors that cannot be merged (non-constant exponents, branch-unsafe)
    opaque: Vec<Expr>,
    /// accumulated `exp` argument, as (scale, arg) addends
    exp_terms: Vec<(f64, Expr)>,
}

impl Product {
    fn new() -> Product {
        Product {
            coeff: c_one(),
            factors: BTreeMap::new(),
            opaque: Vec::new(),
            exp_terms: Vec::new(),
        }
    }

    /// Multiplies `e^s` into the accumulator. `normalized` marks subtrees that
    /// are already in normal form.
    fn absorb(&mut self, e: &Expr, s: f64, normalized: bool) {
        if s == 0.0 {
            return;
        }
        match e {
            Expr::Binary(BinOp::Mul, a, b) => {
                // distributing a non-integer exponent over a product is only
                // branch-safe for positive real factors
                if s.fract() == 0.0 || (is_positive_real(a) && is_positive_real(b)) {
                    self.absorb(a, s, normalized);
                    self.absorb(b, s, normalized);
                } else {
                    let f = if normalized { e.clone() } else { norm(e) };
                    self.push_pow(f, s);
                }
            }
            Expr::Binary(BinOp::Div, a, b) => {
                if s.fract() == 0.0 || (is_positive_real(a) && is_positive_real(b)) {
                    self.absorb(a, s, normalized);
                    self.absorb(b, -s, normalized);
                } else {
                    let f = if normalized { e.clone() } else { norm(e) };
                    self.push_pow(f, s);
                }
            }
            Expr::Unary(UnaryOp::Neg, a) => {
                self.absorb(&Expr::num(-1.0), s, true);
                self.absorb(a, s, normalized);
            }
            Expr::Num(c) => match complex_pow(*c, Complex64::new(s, 0.0), 0.0, 0.0) {
                Ok(v) => self.coeff *= v,
                Err(_) => self.push_factor(e.clone(), s),
            },
            Expr::Unary(UnaryOp::Exp, a) => {
                let a = if normalized {
                    a.as_ref().clone()
                } else {
                    norm(a)
                };
                // (e^a)^s = e^(s a): exact for integer s, principal-safe for real a
                if s.fract() == 0.0 || a.is_real_valued() {
                    self.absorb_exp_arg(s, a);
                } else {
                    self.push_factor(Expr::Unary(UnaryOp::Exp, a.into()), s);
                }
            }
            Expr::Binary(BinOp::Pow, b, c) => {
                let c = if normalized {
                    c.as_ref().clone()
                } else {
                    norm(c)
                };
                match c.as_const() {
                    Some(cc) if cc.im == 0.0 && merge_exponent_safe(cc.re, s, b) => {
                        self.absorb(b, s * cc.re, normalized);
                    }
                    _ => {
                        let b = if normalized {
                            b.as_ref().clone()
                        } else {
                            norm(b)
                        };
                        self.push_pow(Expr::Binary(BinOp::Pow, b.into(), c.into()), s);
                    }
                }
            }
            _ => {
                let f = if normalized { e.clone() } else { norm(e) };
                if !normalized
                    && matches!(
                        f,
                        Expr::Num(_)
                            | Expr::Binary(BinOp::Mul | BinOp::Div | BinOp::Pow, _, _)
                            | Expr::Unary(UnaryOp::Neg | UnaryOp::Exp, _)
                    )
                {
                    self.absorb(&f.clone(), s, true);
                } else {
                    self.push_factor(f, s);
                }
            }
        }
    }

    fn absorb_exp_arg(&mut self, s: f64, arg: Expr) {
        self.exp_terms.push((s, arg));
    }

    fn push_factor(&mut self, base: Expr, s: f64) {
        let key = base.to_string();
        let entry = self.factors.entry(key).or_insert((base, 0.0));
        entry.1 += s;
    }

    fn push_pow(&mut self, whole: Expr, s: f64) {
        if s == 1.0 {
            self.push_factor(whole, 1.0);
        } else {
            self.opaque
                .push(Expr::Binary(BinOp::Pow, whole.into(), Expr::num(s).into()));
        }
    }

    fn build(mut self) -> Expr {
        if self.coeff == c_zero() {
            return Expr::zero();
        }
        // merge the exp-argument sum, extracting log addends as factors
        if !self.exp_terms.is_empty() {
            let mut arg = None;
            for (s, a) in std::mem::take(&mut self.exp_terms) {
                let piece = if s == 1.0 { a } else { Expr::num(s) * a };
                arg = Some(match arg {
                    None => piece,
                    Some(acc) => acc + piece,
                });
            }
            let arg = norm(&arg.unwrap());
            if let Some(c) = arg.as_const() {
                self.coeff *= c.exp();
            } else {
                let (extracted, rest) = extract_logs(&arg);
                for (g, c) in extracted {
                    self.push_factor(g, c);
                }
                if let Some(rest) = rest {
                    if let Some(c) = rest.as_const() {
                        self.coeff *= c.exp();
                    } else {
                        self.push_factor(Expr::Unary(UnaryOp::Exp, rest.into()), 1.0);
                    }
                }
            }
        }
        let mut pieces: Vec<Expr> = Vec::new();
        for (_, (base, exp)) in std::mem::take(&mut self.factors) {
            if exp == 0.0 {
                continue;
            }
            if exp == 1.0 {
                pieces.push(base);
            } else {
                pieces.push(Expr::Binary(
                    BinOp::Pow,
                    base.into(),
                    Expr::num(exp).into(),
                ));
            }
        }
        pieces.extend(std::mem::take(&mut self.opaque));
        if pieces.is_empty() {
            return Expr::Num(self.coeff);
        }
        let mut iter = pieces.into_iter();
        let mut acc = iter.next().unwrap();
        for p in iter {
            acc = acc * p;
        }
        if self.coeff == c_one() {
            acc
        } else {
            Expr::Num(self.coeff) * acc
        }
    }
}

/// Exponent merging `(b^c)^s -> b^(c*s)` is branch-safe when both exponents
/// are integers, when the inner exponent is 1, or when the base is known to
/// be a positive real.
fn merge_exponent_safe(c: f64, s: f64, base: &Expr) -> bool {
    c == 1.0
        || (c.fract() == 0.0 && s.fract() == 0.0)
        || is_positive_real(base)
}

/// Syntactic positivity: enough for the coordinate formulas that arise here.
fn is_positive_real(e: &Expr) -> bool {
    match e {
        Expr::Num(c) => c.im == 0.0 && c.re > 0.0,
        Expr::Unary(UnaryOp::Exp, a) => a.is_real_valued(),
        Expr::Binary(BinOp::Mul | BinOp::Div, a, b) => is_positive_real(a) && is_positive_real(b),
        Expr::Binary(BinOp::Pow, b, c) => is_positive_real(b) && c.is_real_valued(),
        _ => false,
    }
}

/// Splits a normalized sum into log-addends with real coefficients (returned
/// as `(g, c)` meaning the factor `g^c`) and the remaining addends.
fn extract_logs(arg: &Expr) -> (Vec<(Expr, f64)>, Option<Expr>) {
    let mut addends = Vec::new();
    collect_addends(arg, &mut addends);
    let mut extracted = Vec::new();
    let mut rest: Option<Expr> = None;
    for a in addends {
        let (coeff, core) = split_coeff(&a);
        if coeff.im == 0.0 {
            if let Expr::Unary(UnaryOp::Log, g) = &core {
                extracted.push((g.as_ref().clone(), coeff.re));
                continue;
            }
        }
        rest = Some(match rest {
            None => a,
            Some(r) => r + a,
        });
    }
    (extracted, rest)
}

fn collect_addends(e: &Expr, out: &mut Vec<Expr>) {
    match e {
        Expr::Binary(BinOp::Add, a, b) => {
            collect_addends(a, out);
            collect_addends(b, out);
        }
        _ => out.push(e.clone()),
    }
}
