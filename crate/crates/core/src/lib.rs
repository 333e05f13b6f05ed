//! Symbolic-numeric calculus for the degenerate complex structures on the
//! plane generated by `L_k = x^k ∂x + i ∂y`.
//!
//! The crate provides an expression tree with exact differentiation and a
//! terminating simplifier ([`symexpr`]), planar maps with pushforwards and
//! Lie brackets ([`geometry`]), the automorphism-membership criterion
//! ([`bkstructure`]), the classified automorphism groups and half-plane
//! conjugation maps ([`autgroups`]), RK4 flows ([`dynamics`]),
//! b-holomorphic functions with quadrature norms ([`holospaces`]), and a
//! deterministic verification suite ([`suite`]).

pub mod autgroups;
pub mod bkstructure;
pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod holospaces;
pub mod report;
pub mod suite;
pub mod symexpr;

pub use error::{EvalError, GeomError, ParseError};
pub use geometry::{ComplexVectorField, DomainTag, PlanarMap, Point};
pub use report::{Status, VerificationReport};
pub use suite::run_suite;
pub use symexpr::{parse_expr, simplify, Expr, Sampler, Var};
