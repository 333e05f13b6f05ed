//! Symbolic expression core: complex-valued expression trees over the real
//! variables `x`, `y` and an optional parameter `t`, with exact
//! differentiation, a terminating simplifier, and double-precision evaluation.

mod parser;
mod sampler;
mod simplify;

pub use parser::parse_expr;
pub use sampler::{exprs_equal, semantically_equal, EqualityFailure, Sampler, DEFAULT_TOL};
pub use simplify::simplify;

use crate::error::EvalError;
use num_complex::Complex64;
use std::fmt;
use std::sync::Arc;

/// The variables an [`Expr`] may mention. `T` is the family parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    X,
    Y,
    T,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::Y => "y",
            Var::T => "t",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Neg,
    Exp,
    Log,
    Sin,
    Cos,
    Tan,
    Sqrt,
    Conj,
    Re,
    Im,
}

impl UnaryOp {
    fn fn_name(self) -> &'static str {
        match self {
            UnaryOp::Neg => "-",
            UnaryOp::Exp => "exp",
            UnaryOp::Log => "log",
            UnaryOp::Sin => "sin",
            UnaryOp::Cos => "cos",
            UnaryOp::Tan => "tan",
            UnaryOp::Sqrt => "sqrt",
            UnaryOp::Conj => "conj",
            UnaryOp::Re => "re",
            UnaryOp::Im => "im",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

/// A symbolic expression tree. Values are immutable; subtrees are shared
/// through `Arc`, so cloning is cheap and trees may be used from any thread.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    /// A complex constant. Real literals and the named constants `pi`, `e`,
    /// `i` all normalize to this variant.
    Num(Complex64),
    Var(Var),
    Unary(UnaryOp, Arc<Expr>),
    Binary(BinOp, Arc<Expr>, Arc<Expr>),
    /// `ifpos(g, a, b)`: evaluates to `a` where `re(g) > 0` (strictly) and to
    /// `b` otherwise. Differentiation is branchwise.
    IfPos(Arc<Expr>, Arc<Expr>, Arc<Expr>),
}

impl Expr {
    pub fn num(v: f64) -> Expr {
        Expr::Num(Complex64::new(v, 0.0))
    }

    pub fn int(v: i64) -> Expr {
        Expr::num(v as f64)
    }

    pub fn complex(re: f64, im: f64) -> Expr {
        Expr::Num(Complex64::new(re, im))
    }

    pub fn i() -> Expr {
        Expr::Num(Complex64::new(0.0, 1.0))
    }

    pub fn x() -> Expr {
        Expr::Var(Var::X)
    }

    pub fn y() -> Expr {
        Expr::Var(Var::Y)
    }

    pub fn t() -> Expr {
        Expr::Var(Var::T)
    }

    pub fn zero() -> Expr {
        Expr::num(0.0)
    }

    pub fn one() -> Expr {
        Expr::num(1.0)
    }

    fn unary(op: UnaryOp, e: Expr) -> Expr {
        Expr::Unary(op, Arc::new(e))
    }

    fn binary(op: BinOp, a: Expr, b: Expr) -> Expr {
        Expr::Binary(op, Arc::new(a), Arc::new(b))
    }

    pub fn exp(self) -> Expr {
        Expr::unary(UnaryOp::Exp, self)
    }

    pub fn log(self) -> Expr {
        Expr::unary(UnaryOp::Log, self)
    }

    pub fn sin(self) -> Expr {
        Expr::unary(UnaryOp::Sin, self)
    }

    pub fn cos(self) -> Expr {
        Expr::unary(UnaryOp::Cos, self)
    }

    pub fn tan(self) -> Expr {
        Expr::unary(UnaryOp::Tan, self)
    }

    pub fn sqrt(self) -> Expr {
        Expr::unary(UnaryOp::Sqrt, self)
    }

    pub fn conj(self) -> Expr {
        Expr::unary(UnaryOp::Conj, self)
    }

    pub fn re(self) -> Expr {
        Expr::unary(UnaryOp::Re, self)
    }

    pub fn im(self) -> Expr {
        Expr::unary(UnaryOp::Im, self)
    }

    pub fn pow(self, e: Expr) -> Expr {
        Expr::binary(BinOp::Pow, self, e)
    }

    pub fn powi(self, n: i64) -> Expr {
        self.pow(Expr::int(n))
    }

    pub fn ifpos(guard: Expr, then: Expr, otherwise: Expr) -> Expr {
        Expr::IfPos(Arc::new(guard), Arc::new(then), Arc::new(otherwise))
    }

    /// True if the tree is the literal zero constant.
    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Num(c) if c.re == 0.0 && c.im == 0.0)
    }

    pub fn as_const(&self) -> Option<Complex64> {
        match self {
            Expr::Num(c) => Some(*c),
            _ => None,
        }
    }

    pub fn contains(&self, v: Var) -> bool {
        match self {
            Expr::Num(_) => false,
            Expr::Var(u) => *u == v,
            Expr::Unary(_, a) => a.contains(v),
            Expr::Binary(_, a, b) => a.contains(v) || b.contains(v),
            Expr::IfPos(g, a, b) => g.contains(v) || a.contains(v) || b.contains(v),
        }
    }

    /// Conservative syntactic check that the expression is real-valued for
    /// real variable assignments (no complex constants anywhere).
    pub fn is_real_valued(&self) -> bool {
        match self {
            Expr::Num(c) => c.im == 0.0,
            Expr::Var(_) => true,
            Expr::Unary(UnaryOp::Re | UnaryOp::Im, _) => true,
            Expr::Unary(_, a) => a.is_real_valued(),
            Expr::Binary(_, a, b) => a.is_real_valued() && b.is_real_valued(),
            Expr::IfPos(_, a, b) => a.is_real_valued() && b.is_real_valued(),
        }
    }

    /// Simultaneous substitution of expressions for variables.
    pub fn subst(&self, x: Option<&Expr>, y: Option<&Expr>, t: Option<&Expr>) -> Expr {
        match self {
            Expr::Num(_) => self.clone(),
            Expr::Var(Var::X) => x.cloned().unwrap_or_else(|| self.clone()),
            Expr::Var(Var::Y) => y.cloned().unwrap_or_else(|| self.clone()),
            Expr::Var(Var::T) => t.cloned().unwrap_or_else(|| self.clone()),
            Expr::Unary(op, a) => Expr::unary(*op, a.subst(x, y, t)),
            Expr::Binary(op, a, b) => Expr::binary(*op, a.subst(x, y, t), b.subst(x, y, t)),
            Expr::IfPos(g, a, b) => {
                Expr::ifpos(g.subst(x, y, t), a.subst(x, y, t), b.subst(x, y, t))
            }
        }
    }

    /// Substitutes a concrete value for the parameter `t`.
    pub fn subst_t(&self, t0: f64) -> Expr {
        self.subst(None, None, Some(&Expr::num(t0)))
    }

    /// Substitutes expressions for both `x` and `y` (map composition).
    pub fn subst_xy(&self, u: &Expr, v: &Expr) -> Expr {
        self.subst(Some(u), Some(v), None)
    }

    /// Exact symbolic derivative with respect to `v`. `ifpos` nodes are
    /// differentiated branchwise, valid away from the guard boundary.
    pub fn differentiate(&self, v: Var) -> Expr {
        match self {
            Expr::Num(_) => Expr::zero(),
            Expr::Var(u) => {
                if *u == v {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Expr::Unary(op, a) => {
                let da = a.differentiate(v);
                let a = a.as_ref().clone();
                match op {
                    UnaryOp::Neg => -da,
                    UnaryOp::Exp => a.exp() * da,
                    UnaryOp::Log => da / a,
                    UnaryOp::Sin => a.cos() * da,
                    UnaryOp::Cos => -(a.sin() * da),
                    UnaryOp::Tan => da / a.cos().powi(2),
                    UnaryOp::Sqrt => da / (Expr::int(2) * a.sqrt()),
                    UnaryOp::Conj => da.conj(),
                    UnaryOp::Re => da.re(),
                    UnaryOp::Im => da.im(),
                }
            }
            Expr::Binary(op, a, b) => {
                let (da, db) = (a.differentiate(v), b.differentiate(v));
                let (a, b) = (a.as_ref().clone(), b.as_ref().clone());
                match op {
                    BinOp::Add => da + db,
                    BinOp::Sub => da - db,
                    BinOp::Mul => da * b + a * db,
                    BinOp::Div => (da * b.clone() - a * db) / b.powi(2),
                    BinOp::Pow => match b.as_const() {
                        Some(c) => {
                            // c * a^(c-1) * a'
                            Expr::Num(c) * a.pow(Expr::Num(c - 1.0)) * da
                        }
                        None => {
                            // a^b * (b' log a + b a'/a)
                            a.clone().pow(b.clone())
                                * (db * a.clone().log() + b * da / a)
                        }
                    },
                }
            }
            Expr::IfPos(g, a, b) => Expr::ifpos(
                g.as_ref().clone(),
                a.differentiate(v),
                b.differentiate(v),
            ),
        }
    }

    /// Evaluates the expression at `(x0, y0)` with optional parameter `t0`.
    /// Domain violations (log of a nonpositive real, division by zero, ...)
    /// are reported as errors, never as silent NaN.
    pub fn eval_at(&self, x0: f64, y0: f64, t0: Option<f64>) -> Result<Complex64, EvalError> {
        let v = self.eval_inner(x0, y0, t0)?;
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite { x: x0, y: y0 })
        }
    }

    fn eval_inner(&self, x0: f64, y0: f64, t0: Option<f64>) -> Result<Complex64, EvalError> {
        match self {
            Expr::Num(c) => Ok(*c),
            Expr::Var(Var::X) => Ok(Complex64::new(x0, 0.0)),
            Expr::Var(Var::Y) => Ok(Complex64::new(y0, 0.0)),
            Expr::Var(Var::T) => t0
                .map(|t| Complex64::new(t, 0.0))
                .ok_or(EvalError::UnboundParameter),
            Expr::Unary(op, a) => {
                let v = a.eval_inner(x0, y0, t0)?;
                match op {
                    UnaryOp::Neg => Ok(-v),
                    UnaryOp::Exp => Ok(v.exp()),
                    UnaryOp::Log => {
                        if v.im == 0.0 && v.re <= 0.0 {
                            Err(EvalError::LogDomain {
                                value: v.re,
                                x: x0,
                                y: y0,
                            })
                        } else {
                            Ok(v.ln())
                        }
                    }
                    UnaryOp::Sin => Ok(v.sin()),
                    UnaryOp::Cos => Ok(v.cos()),
                    UnaryOp::Tan => Ok(v.tan()),
                    UnaryOp::Sqrt => {
                        if v.im == 0.0 && v.re < 0.0 {
                            Err(EvalError::SqrtDomain {
                                value: v.re,
                                x: x0,
                                y: y0,
                            })
                        } else {
                            Ok(v.sqrt())
                        }
                    }
                    UnaryOp::Conj => Ok(v.conj()),
                    UnaryOp::Re => Ok(Complex64::new(v.re, 0.0)),
                    UnaryOp::Im => Ok(Complex64::new(v.im, 0.0)),
                }
            }
            Expr::Binary(op, a, b) => {
                let va = a.eval_inner(x0, y0, t0)?;
                let vb = b.eval_inner(x0, y0, t0)?;
                match op {
                    BinOp::Add => Ok(va + vb),
                    BinOp::Sub => Ok(va - vb),
                    BinOp::Mul => Ok(va * vb),
                    BinOp::Div => {
                        if vb.norm() == 0.0 {
                            Err(EvalError::DivisionByZero { x: x0, y: y0 })
                        } else {
                            Ok(va / vb)
                        }
                    }
                    BinOp::Pow => complex_pow(va, vb, x0, y0),
                }
            }
            Expr::IfPos(g, a, b) => {
                let vg = g.eval_inner(x0, y0, t0)?;
                if vg.re > 0.0 {
                    a.eval_inner(x0, y0, t0)
                } else {
                    b.eval_inner(x0, y0, t0)
                }
            }
        }
    }
}

/// Integer powers use exact repeated multiplication; non-integer exponents
/// use the principal branch and require the base to be off the closed
/// negative real axis.
pub(crate) fn complex_pow(
    base: Complex64,
    expo: Complex64,
    x0: f64,
    y0: f64,
) -> Result<Complex64, EvalError> {
    if let Some(n) = as_integer(expo) {
        if base.norm() == 0.0 {
            return if n > 0 {
                Ok(Complex64::new(0.0, 0.0))
            } else if n == 0 {
                Ok(Complex64::new(1.0, 0.0))
            } else {
                Err(EvalError::DivisionByZero { x: x0, y: y0 })
            };
        }
        return Ok(powi_complex(base, n));
    }
    if base.im == 0.0 && base.re <= 0.0 {
        return Err(EvalError::PowDomain {
            base: base.re,
            x: x0,
            y: y0,
        });
    }
    Ok(base.powc(expo))
}

pub(crate) fn as_integer(c: Complex64) -> Option<i64> {
    if c.im == 0.0 && c.re.fract() == 0.0 && c.re.abs() < 9.0e15 {
        Some(c.re as i64)
    } else {
        None
    }
}

fn powi_complex(base: Complex64, n: i64) -> Complex64 {
    let mut result = Complex64::new(1.0, 0.0);
    let mut b = if n < 0 { 1.0 / base } else { base };
    let mut m = n.unsigned_abs();
    while m > 0 {
        if m & 1 == 1 {
            result *= b;
        }
        b *= b;
        m >>= 1;
    }
    result
}

// ---- operator overloads for tree construction ----

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::binary(BinOp::Add, self, rhs)
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::binary(BinOp::Sub, self, rhs)
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::binary(BinOp::Mul, self, rhs)
    }
}

impl std::ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::binary(BinOp::Div, self, rhs)
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::unary(UnaryOp::Neg, self)
    }
}

// ---- printing ----

const PREC_ADD: u8 = 1;
const PREC_MUL: u8 = 2;
const PREC_NEG: u8 = 3;
const PREC_POW: u8 = 4;
const PREC_ATOM: u8 = 5;

impl Expr {
    fn precedence(&self) -> u8 {
        match self {
            Expr::Num(c) => {
                if c.im != 0.0 {
                    PREC_ATOM // printed fully parenthesized
                } else if c.re < 0.0 {
                    PREC_NEG
                } else {
                    PREC_ATOM
                }
            }
            Expr::Var(_) => PREC_ATOM,
            Expr::Unary(UnaryOp::Neg, _) => PREC_NEG,
            Expr::Unary(_, _) | Expr::IfPos(_, _, _) => PREC_ATOM,
            Expr::Binary(BinOp::Add | BinOp::Sub, _, _) => PREC_ADD,
            Expr::Binary(BinOp::Mul | BinOp::Div, _, _) => PREC_MUL,
            Expr::Binary(BinOp::Pow, _, _) => PREC_POW,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        let prec = self.precedence();
        let need_parens = prec < min_prec;
        if need_parens {
            write!(f, "(")?;
        }
        match self {
            Expr::Num(c) => fmt_num(f, *c)?,
            Expr::Var(v) => write!(f, "{}", v.name())?,
            Expr::Unary(UnaryOp::Neg, a) => {
                write!(f, "-")?;
                a.fmt_prec(f, PREC_NEG + 1)?;
            }
            Expr::Unary(op, a) => {
                write!(f, "{}(", op.fn_name())?;
                a.fmt_prec(f, 0)?;
                write!(f, ")")?;
            }
            Expr::Binary(op, a, b) => {
                let (sym, lp, rp) = match op {
                    BinOp::Add => ("+", PREC_ADD, PREC_ADD),
                    BinOp::Sub => ("-", PREC_ADD, PREC_ADD + 1),
                    BinOp::Mul => ("*", PREC_MUL, PREC_MUL),
                    BinOp::Div => ("/", PREC_MUL, PREC_MUL + 1),
                    // right-associative; base must be atomic-or-parenthesized
                    BinOp::Pow => ("^", PREC_POW + 1, PREC_POW),
                };
                a.fmt_prec(f, lp)?;
                write!(f, "{sym}")?;
                b.fmt_prec(f, rp)?;
            }
            Expr::IfPos(g, a, b) => {
                write!(f, "ifpos(")?;
                g.fmt_prec(f, 0)?;
                write!(f, ", ")?;
                a.fmt_prec(f, 0)?;
                write!(f, ", ")?;
                b.fmt_prec(f, 0)?;
                write!(f, ")")?;
            }
        }
        if need_parens {
            write!(f, ")")?;
        }
        Ok(())
    }
}

fn fmt_num(f: &mut fmt::Formatter<'_>, c: Complex64) -> fmt::Result {
    if c.im == 0.0 {
        write!(f, "{:?}", c.re)
    } else if c.re == 0.0 {
        if c.im == 1.0 {
            write!(f, "i")
        } else {
            write!(f, "({:?}*i)", c.im)
        }
    } else {
        write!(f, "({:?}+{:?}*i)", c.re, c.im)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}
