use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::geom::{reflect, Hyperplane};
use crate::grid::{Field, GridKind};
use crate::interp::{BallInterpolator, SlabInterpolator};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields, default))]
pub struct SweepOptions {
    /// A point violates when `w_λ < -tol ‖u‖∞`.
    pub tol: f64,
    /// Bisection steps refining `λ₀` past the last passing grid value.
    pub bisection_levels: usize,
    /// Ball grids: pin the radial profiles to zero at `r = 1`.
    pub vanish_on_boundary: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            bisection_levels: 3,
            vanish_on_boundary: true,
        }
    }
}

/// Per-λ diagnostics of `w_λ(x) = u(x^λ) - u(x)` on `Σ_λ`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SweepReport {
    pub axis: usize,
    pub lambda_values: Vec<f64>,
    /// `None` where `Σ_λ` holds no grid point (the step is skipped).
    pub min_w: Vec<Option<f64>>,
    pub violation_counts: Vec<usize>,
    pub skipped: Vec<bool>,
    /// Points of `Σ_λ` whose reflection left the interpolation range.
    pub unreflectable: Vec<usize>,
    /// Largest λ up to which every step passes, refined by bisection.
    pub lambda0_estimate: f64,
    /// Rough size of the interpolation error in `u(x^λ)`.
    pub interp_error: f64,
    pub u_max: f64,
    pub tol: f64,
}

impl SweepReport {
    pub fn worst_min_w(&self) -> Option<f64> {
        self.min_w.iter().flatten().copied().reduce(f64::min)
    }

    pub fn total_violations(&self) -> usize {
        self.violation_counts.iter().sum()
    }
}

/// `count` uniform values in `(-1, 0]` for ball grids, or in `(0, top]` for
/// slabs swept along `x_n`.
pub fn default_lambda_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (1..=count)
        .map(|k| lo + (hi - lo) * k as f64 / count as f64)
        .collect()
}

enum Interp {
    Ball(BallInterpolator),
    Slab(SlabInterpolator),
}

impl Interp {
    fn eval(&self, x: &[f64]) -> Option<f64> {
        match self {
            Interp::Ball(b) => Some(b.eval(x)),
            Interp::Slab(s) => s.eval(x),
        }
    }
}

struct Step {
    min_w: Option<f64>,
    violations: usize,
    unreflectable: usize,
}

fn step(u: &Field, interp: &Interp, plane: Hyperplane, threshold: f64) -> Step {
    let grid = u.grid();
    let domain = grid.domain();
    let mut min_w: Option<f64> = None;
    let mut violations = 0;
    let mut unreflectable = 0;
    for (x, &ux) in grid.points().zip(u.values()) {
        if !crate::geom::in_sigma(x, plane, domain) {
            continue;
        }
        let xr = reflect(x, plane);
        match interp.eval(&xr) {
            Some(v) => {
                let w = v - ux;
                min_w = Some(min_w.map_or(w, |m: f64| m.min(w)));
                if w < threshold {
                    violations += 1;
                }
            }
            None => unreflectable += 1,
        }
    }
    Step {
        min_w,
        violations,
        unreflectable,
    }
}

/// Moving-plane diagnostic along `axis` (1-based) over the increasing `lambdas`.
pub fn moving_plane_sweep(
    u: &Field,
    axis: usize,
    lambdas: &[f64],
    opts: &SweepOptions,
) -> Result<SweepReport> {
    let grid = u.grid();
    Hyperplane::new(axis, 0.0).validate(grid.dim())?;
    if lambdas.is_empty() {
        return Err(Error::param(
            "lambda_grid",
            "need at least one plane position",
        ));
    }
    if lambdas.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::param("lambda_grid", "plane positions must increase"));
    }
    let (interp, interp_error) = match grid.kind() {
        GridKind::Ball { .. } => {
            let b = if opts.vanish_on_boundary {
                BallInterpolator::new(u)?
            } else {
                BallInterpolator::new_unpinned(u)?
            };
            let e = b.error_estimate();
            (Interp::Ball(b), e)
        }
        GridKind::Slab { .. } => (Interp::Slab(SlabInterpolator::new(u)?), 0.0),
    };
    let u_max = u.max_abs();
    let threshold = -opts.tol * u_max;
    let steps = crate::par::map_indices(lambdas.len(), |k| {
        step(u, &interp, Hyperplane::new(axis, lambdas[k]), threshold)
    });

    let passes = |s: &Step| s.min_w.map_or(true, |m| m >= threshold);
    let mut last_ok: Option<usize> = None;
    for (k, s) in steps.iter().enumerate() {
        if passes(s) {
            last_ok = Some(k);
        } else {
            break;
        }
    }
    let lambda0_estimate = match last_ok {
        None => lambdas[0],
        Some(k) if k + 1 == lambdas.len() => lambdas[k],
        Some(k) => {
            let (mut lo, mut hi) = (lambdas[k], lambdas[k + 1]);
            for _ in 0..opts.bisection_levels {
                let mid = 0.5 * (lo + hi);
                if passes(&step(u, &interp, Hyperplane::new(axis, mid), threshold)) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            lo
        }
    };
    Ok(SweepReport {
        axis,
        lambda_values: lambdas.to_vec(),
        min_w: steps.iter().map(|s| s.min_w).collect(),
        violation_counts: steps.iter().map(|s| s.violations).collect(),
        skipped: steps.iter().map(|s| s.min_w.is_none()).collect(),
        unreflectable: steps.iter().map(|s| s.unreflectable).collect(),
        lambda0_estimate,
        interp_error,
        u_max,
        tol: opts.tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{AngularScheme, Grid};
    use crate::params::norm_sq;
    use alloc::sync::Arc;
    use alloc::vec;

    fn ball() -> Arc<Grid> {
        Arc::new(Grid::ball(3, 10, 120, AngularScheme::IcosahedralOrbit).unwrap())
    }

    #[test]
    fn radial_decreasing_field_passes_everywhere() {
        let u = Field::from_fn(ball(), |x| (1.0 - norm_sq(x)).sqrt()).unwrap();
        let lams = default_lambda_grid(-1.0, 0.0, 64);
        assert_eq!(lams.len(), 64);
        for axis in 1..=3 {
            let rep = moving_plane_sweep(&u, axis, &lams, &SweepOptions::default()).unwrap();
            assert_eq!(rep.total_violations(), 0);
            assert!(rep.worst_min_w().unwrap() >= -1e-6 * rep.u_max);
            assert_eq!(rep.lambda0_estimate, 0.0);
            assert_eq!(rep.min_w.len(), 64);
        }
    }

    #[test]
    fn field_decreasing_in_x1_is_caught() {
        let u = Field::from_fn(ball(), |x| 2.0 - x[0]).unwrap();
        let opts = SweepOptions {
            vanish_on_boundary: false,
            ..Default::default()
        };
        let lams = default_lambda_grid(-1.0, 0.0, 16);
        let rep = moving_plane_sweep(&u, 1, &lams, &opts).unwrap();
        assert!(rep.total_violations() > 0);
        assert!(rep.worst_min_w().unwrap() < 0.0);
        assert!(rep.lambda0_estimate < -0.5);

        // Increasing in x1 gives w = 2(λ - x1) > 0 on Σ_λ: no violation.
        let v = Field::from_fn(ball(), |x| 2.0 + x[0]).unwrap();
        let rep = moving_plane_sweep(&v, 1, &lams, &opts).unwrap();
        assert_eq!(rep.total_violations(), 0);
    }

    #[test]
    fn empty_sigma_is_skipped_and_bad_grids_rejected() {
        let u = Field::from_fn(ball(), |x| 1.0 - norm_sq(x)).unwrap();
        let rep = moving_plane_sweep(&u, 1, &[-0.9999, -0.5], &SweepOptions::default()).unwrap();
        assert_eq!(rep.skipped, vec![true, false]);
        assert!(moving_plane_sweep(&u, 1, &[0.0, -0.5], &SweepOptions::default()).is_err());
        assert!(moving_plane_sweep(&u, 4, &[-0.5], &SweepOptions::default()).is_err());
        assert!(moving_plane_sweep(&u, 1, &[], &SweepOptions::default()).is_err());
    }

    #[test]
    fn half_space_profile_increasing_in_xn_passes() {
        let g = Arc::new(
            Grid::slab(vec![-1.0, -1.0, 0.0], vec![1.0, 1.0, 2.0], vec![6, 6, 20]).unwrap(),
        );
        // Increasing in x_n near the boundary, as (x_n)^{α/2} is.
        let u = Field::from_fn(g.clone(), |x| x[2].sqrt()).unwrap();
        let lams = default_lambda_grid(0.0, 1.0, 10);
        let rep = moving_plane_sweep(&u, 3, &lams, &SweepOptions::default()).unwrap();
        assert_eq!(rep.total_violations(), 0);
        let v = Field::from_fn(g, |x| (-x[2]).exp()).unwrap();
        let rep = moving_plane_sweep(&v, 3, &lams, &SweepOptions::default()).unwrap();
        assert!(rep.total_violations() > 0);
    }
}
