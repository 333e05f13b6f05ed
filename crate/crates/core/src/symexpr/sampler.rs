//! Randomized point sampling and the project-wide semantic-equality oracle.

use super::{Expr, Var};
use crate::error::EvalError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Default relative tolerance for semantic equality.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Rectangle sampler for `(x, y)` with an exclusion band around the singular
/// locus `x = 0`. Identical seeds reproduce identical point sets.
#[derive(Debug, Clone)]
pub struct Sampler {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    /// points with `|x| < exclude` are rejected
    pub exclude: f64,
    /// restrict to `x > 0`
    pub positive_x: bool,
    pub count: usize,
    pub seed: u64,
    /// append a deterministic sweep of log-spaced `|x|` values down to
    /// `near_z_min` (both signs unless `positive_x`)
    pub near_z_min: Option<f64>,
    /// range used for the parameter `t` when an expression mentions it
    pub t_min: f64,
    pub t_max: f64,
}

impl Default for Sampler {
    fn default() -> Self {
        Sampler {
            x_min: -3.0,
            x_max: 3.0,
            y_min: -3.0,
            y_max: 3.0,
            exclude: 0.1,
            positive_x: false,
            count: 64,
            seed: 0,
            near_z_min: None,
            t_min: -2.0,
            t_max: 2.0,
        }
    }
}

impl Sampler {
    /// Generic identity-check sampler: 64 points, seed 0, `|x| >= 0.1`.
    pub fn generic(seed: u64) -> Sampler {
        Sampler {
            seed,
            ..Sampler::default()
        }
    }

    /// Sampler restricted to the right half-plane `x > 0`.
    pub fn right_half_plane(seed: u64) -> Sampler {
        Sampler {
            x_min: 0.1,
            x_max: 3.0,
            positive_x: true,
            seed,
            ..Sampler::default()
        }
    }

    /// Near-singular sampler for automorphism checks: both half-planes with
    /// log-spaced `|x|` reaching `1e-4`.
    pub fn near_z(seed: u64) -> Sampler {
        Sampler {
            exclude: 1e-4,
            near_z_min: Some(1e-4),
            seed,
            ..Sampler::default()
        }
    }

    pub fn with_range(mut self, x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Sampler {
        self.x_min = x_min;
        self.x_max = x_max;
        self.y_min = y_min;
        self.y_max = y_max;
        self
    }

    pub fn with_count(mut self, count: usize) -> Sampler {
        self.count = count;
        self
    }

    /// Emits the sample points. Random points first, then the deterministic
    /// near-Z sweep when configured.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut pts = Vec::with_capacity(self.count);
        let mut guard = 0usize;
        while pts.len() < self.count && guard < self.count * 1000 {
            guard += 1;
            let x = rng.gen_range(self.x_min..self.x_max);
            let y = rng.gen_range(self.y_min..self.y_max);
            if x.abs() < self.exclude {
                continue;
            }
            if self.positive_x && x <= 0.0 {
                continue;
            }
            pts.push((x, y));
        }
        if let Some(min) = self.near_z_min {
            let mut mag = min;
            let ys = [-1.7, 0.4, 2.3];
            let mut i = 0usize;
            while mag < 1.0 {
                let y = ys[i % ys.len()];
                pts.push((mag, y));
                if !self.positive_x {
                    pts.push((-mag, y));
                }
                mag *= 10.0;
                i += 1;
            }
        }
        pts
    }

    /// Parameter values for `t`, drawn from the same stream discipline.
    pub fn t_values(&self, n: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed.wrapping_add(0x7455)); // distinct stream
        (0..n).map(|_| rng.gen_range(self.t_min..self.t_max)).collect()
    }
}

/// Why a semantic-equality check failed.
#[derive(Debug, Clone)]
pub enum EqualityFailure {
    Mismatch {
        x: f64,
        y: f64,
        t: Option<f64>,
        lhs: num_complex::Complex64,
        rhs: num_complex::Complex64,
        error: f64,
    },
    Eval {
        x: f64,
        y: f64,
        source: EvalError,
    },
}

/// Project-wide semantic-equality contract: `|e1 - e2| <= tol * (1 +
/// max(|e1|, |e2|))` at every sampled point. If either expression mentions
/// `t`, parameter values are sampled alongside the points.
pub fn semantically_equal(
    e1: &Expr,
    e2: &Expr,
    s: &Sampler,
    tol: f64,
) -> Result<(), EqualityFailure> {
    let needs_t = e1.contains(Var::T) || e2.contains(Var::T);
    let pts = s.points();
    let ts = if needs_t {
        Some(s.t_values(pts.len()))
    } else {
        None
    };
    for (idx, &(x, y)) in pts.iter().enumerate() {
        let t = ts.as_ref().map(|v| v[idx]);
        let v1 = e1
            .eval_at(x, y, t)
            .map_err(|source| EqualityFailure::Eval { x, y, source })?;
        let v2 = e2
            .eval_at(x, y, t)
            .map_err(|source| EqualityFailure::Eval { x, y, source })?;
        let err = (v1 - v2).norm();
        let scale = 1.0 + v1.norm().max(v2.norm());
        if err > tol * scale {
            return Err(EqualityFailure::Mismatch {
                x,
                y,
                t,
                lhs: v1,
                rhs: v2,
                error: err,
            });
        }
    }
    Ok(())
}

/// Convenience wrapper returning a bool with the default contract.
pub fn exprs_equal(e1: &Expr, e2: &Expr, s: &Sampler, tol: f64) -> bool {
    semantically_equal(e1, e2, s, tol).is_ok()
}
