use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::grid::Field;
use crate::params::norm_sq;

use super::operator::GreenOperator;

/// Starting iterate of [`nonlinear_power_solve`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Init {
    /// `v ≡ 1`.
    Flat,
    /// `v = 1 - |x|²` (ball) or `x_n e^{-|x|²}` (slab).
    Bump,
    Custom(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields, default))]
pub struct SolveOptions {
    pub max_iter: usize,
    /// Stop once `‖N(T(v^p)) - v‖∞ ≤ tol` for `v` normalized to unit maximum.
    pub tol: f64,
    /// `v ← (1-d) v + d N(T(v^p))`; `1` is the plain iteration. Lower it if
    /// the residual history settles into a two-cycle.
    pub damping: f64,
    pub init: Init,
    /// On non-convergence, solve the shell-averaged problem and accept it if
    /// it satisfies the full-grid residual.
    pub radial_fallback: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            max_iter: 500,
            tol: 1e-8,
            damping: 1.0,
            init: Init::Flat,
            radial_fallback: true,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        if self.max_iter < 1 {
            return Err(Error::param("max_iter", "need at least one iteration"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::param("tol", "tolerance must be positive"));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::param("damping", "damping must lie in (0, 1]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct PowerSolution {
    pub u: Field,
    /// `λ* = max T(v^p)` for the normalized fixed point `v`.
    pub lambda_star: f64,
    pub iterations: usize,
    /// `‖N(T(v^p)) - v‖∞` per step.
    pub residuals: Vec<f64>,
    /// `‖u - T(u^p)‖∞ / ‖u‖∞` of the returned solution.
    pub residual: f64,
    pub radial_fallback_used: bool,
}

fn powp(v: &[f64], p: f64) -> Vec<f64> {
    v.iter().map(|x| x.max(0.0).powf(p)).collect()
}

fn normalize(w: &[f64]) -> Result<(Vec<f64>, f64)> {
    let lam = w.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x));
    if !(lam > 0.0) || !lam.is_finite() {
        return Err(Error::Degenerate("iterate vanished or lost positivity"));
    }
    Ok((w.iter().map(|x| x / lam).collect(), lam))
}

fn sup_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Positive solution of `u = T(u_+^p)` by normalized fixed-point iteration
/// `v ← N(T(v^p))`, `N` scaling to unit maximum. With `λ* = max T(v^p)` at the
/// fixed point, `u = λ*^{-1/(p-1)} v` solves the unnormalized equation because
/// `c v` is a solution iff `c^{p-1} λ* = 1`.
pub fn nonlinear_power_solve(
    op: &GreenOperator,
    p: f64,
    opts: &SolveOptions,
) -> Result<PowerSolution> {
    opts.validate()?;
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::param("p", "exponent must exceed 1"));
    }
    let grid = op.grid().clone();
    let m = grid.len();
    let v0: Vec<f64> = match &opts.init {
        Init::Flat => vec![1.0; m],
        Init::Bump => grid
            .points()
            .map(|x| {
                if grid.is_ball() {
                    1.0 - norm_sq(x)
                } else {
                    x[x.len() - 1] * (-norm_sq(x)).exp()
                }
            })
            .collect(),
        Init::Custom(v) => {
            if v.len() != m {
                return Err(Error::Dimension {
                    expected: m,
                    found: v.len(),
                });
            }
            v.clone()
        }
    };
    let (mut v, _) = normalize(&v0)?;
    let mut residuals = Vec::new();
    for _ in 0..opts.max_iter {
        let (raw, lam) = normalize(&op.apply(&powp(&v, p)))?;
        let r = sup_gap(&raw, &v);
        residuals.push(r);
        if !r.is_finite() {
            break;
        }
        if r <= opts.tol {
            return finish(op, v, lam, p, residuals.len(), residuals, r, false);
        }
        v = if opts.damping < 1.0 {
            let mixed: Vec<f64> = v
                .iter()
                .zip(&raw)
                .map(|(a, b)| (1.0 - opts.damping) * a + opts.damping * b)
                .collect();
            normalize(&mixed)?.0
        } else {
            raw
        };
    }
    let iterations = residuals.len();
    if opts.radial_fallback {
        if let Some(sol) = radial_fallback(op, p, opts)? {
            let (v, lam, residual) = sol;
            return finish(op, v, lam, p, iterations, residuals, residual, true);
        }
    }
    Err(Error::NonConvergence {
        iterations,
        last: residuals.last().copied().unwrap_or(f64::NAN),
        residuals,
    })
}

#[allow(clippy::too_many_arguments)]
fn finish(
    op: &GreenOperator,
    v: Vec<f64>,
    lam: f64,
    p: f64,
    iterations: usize,
    residuals: Vec<f64>,
    residual: f64,
    radial_fallback_used: bool,
) -> Result<PowerSolution> {
    let c = lam.powf(-1.0 / (p - 1.0));
    let u = Field::new(op.grid().clone(), v.iter().map(|x| c * x).collect())?;
    Ok(PowerSolution {
        u,
        lambda_star: lam,
        iterations,
        residuals,
        residual,
        radial_fallback_used,
    })
}

/// Iterate on shell values with the shell-averaged operator, then check the
/// expanded field against the full operator.
fn radial_fallback(
    op: &GreenOperator,
    p: f64,
    opts: &SolveOptions,
) -> Result<Option<(Vec<f64>, f64, f64)>> {
    let Some(red) = op.radial_reduction() else {
        return Ok(None);
    };
    let grid = op.grid();
    let nr = grid.radial_nodes().len();
    let na = grid.angular_count();
    let mut v = vec![1.0; nr];
    let mut ok = false;
    for _ in 0..opts.max_iter.max(1000) {
        let vp = powp(&v, p);
        let w: Vec<f64> = (0..nr)
            .map(|s| crate::sum::cdot(&red[s * nr..(s + 1) * nr], &vp))
            .collect();
        let (next, _) = normalize(&w)?;
        let r = sup_gap(&next, &v);
        v = next;
        if r <= 0.1 * opts.tol {
            ok = true;
            break;
        }
    }
    if !ok {
        return Ok(None);
    }
    let full: Vec<f64> = (0..grid.len()).map(|i| v[i / na]).collect();
    let (w, lam) = normalize(&op.apply(&powp(&full, p)))?;
    let residual = sup_gap(&full, &w);
    Ok((residual <= opts.tol).then_some((full, lam, residual)))
}
