//! Interpolation of grid fields at off-grid points.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::grid::{Field, GridKind};
use crate::params::norm_sq;

/// Monotone piecewise cubic Hermite interpolant (Fritsch–Carlson slopes).
/// Constant extrapolation on both sides.
#[derive(Debug, Clone)]
pub struct Pchip {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl Pchip {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let m = x.len();
        if m < 2 || y.len() != m {
            return Err(Error::param(
                "knots",
                "need at least two knots with matching values",
            ));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::param(
                "knots",
                "abscissae must be strictly increasing",
            ));
        }
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..m - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
        let mut d = vec![0.0; m];
        for i in 1..m - 1 {
            if delta[i - 1] * delta[i] > 0.0 {
                let w1 = 2.0 * h[i] + h[i - 1];
                let w2 = h[i] + 2.0 * h[i - 1];
                d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        d[0] = end_slope(
            h[0],
            h.get(1).copied().unwrap_or(h[0]),
            delta[0],
            delta.get(1).copied().unwrap_or(delta[0]),
        );
        d[m - 1] = end_slope(
            h[m - 2],
            if m > 2 { h[m - 3] } else { h[m - 2] },
            delta[m - 2],
            if m > 2 { delta[m - 3] } else { delta[m - 2] },
        );
        Ok(Self { x, y, d })
    }

    pub fn eval(&self, t: f64) -> f64 {
        let m = self.x.len();
        if t <= self.x[0] {
            return self.y[0];
        }
        if t >= self.x[m - 1] {
            return self.y[m - 1];
        }
        let i = self.x.partition_point(|&v| v <= t) - 1;
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = -s * s * (1.0 - s);
        h00 * self.y[i] + h10 * h * self.d[i] + h01 * self.y[i + 1] + h11 * h * self.d[i + 1]
    }

    /// Largest gap between the cubic and the chord at interval midpoints; a
    /// cheap proxy for the interpolation error.
    pub fn midpoint_spread(&self) -> f64 {
        self.x
            .windows(2)
            .zip(self.y.windows(2))
            .map(|(xw, yw)| (self.eval(0.5 * (xw[0] + xw[1])) - 0.5 * (yw[0] + yw[1])).abs())
            .fold(0.0, f64::max)
    }
}

fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if s.signum() != d0.signum() {
        0.0
    } else if d0.signum() != d1.signum() && s.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        s
    }
}

/// Interpolation on a ball grid: monotone cubic in the radius along the
/// nearest grid direction. By default the profile is pinned to `0` at `r = 1`.
#[derive(Debug, Clone)]
pub struct BallInterpolator {
    n: usize,
    directions: Vec<f64>,
    profiles: Vec<Pchip>,
    error_estimate: f64,
}

impl BallInterpolator {
    pub fn new(field: &Field) -> Result<Self> {
        Self::build(field, true)
    }

    /// Constant extrapolation past the outermost shell instead of the zero pin.
    pub fn new_unpinned(field: &Field) -> Result<Self> {
        Self::build(field, false)
    }

    fn build(field: &Field, pinned: bool) -> Result<Self> {
        let grid = field.grid();
        if !grid.is_ball() {
            return Err(Error::param("grid", "ball interpolation needs a ball grid"));
        }
        let n = grid.dim();
        let na = grid.angular_count();
        let radial = grid.radial_nodes();
        let mut x = radial.to_vec();
        if pinned {
            x.push(1.0);
        }
        let mut profiles = Vec::with_capacity(na);
        let mut spread: f64 = 0.0;
        for a in 0..na {
            let mut y: Vec<f64> = (0..radial.len())
                .map(|i| field.values()[grid.ball_index(i, a)])
                .collect();
            if pinned {
                y.push(0.0);
            }
            let p = Pchip::new(x.clone(), y)?;
            spread = spread.max(p.midpoint_spread());
            profiles.push(p);
        }
        // Angular part: spread of each shell around its mean.
        let mut angular: f64 = 0.0;
        for i in 0..radial.len() {
            let vals = (0..na).map(|a| field.values()[grid.ball_index(i, a)]);
            let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| {
                (l.min(v), h.max(v))
            });
            angular = angular.max(hi - lo);
        }
        let directions = (0..na).flat_map(|a| grid.direction(a).to_vec()).collect();
        Ok(Self {
            n,
            directions,
            profiles,
            error_estimate: spread + angular,
        })
    }

    /// Value at `x`; zero outside the open ball.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let r2 = norm_sq(x);
        if r2 >= 1.0 {
            return 0.0;
        }
        let r = r2.sqrt();
        let a = if r == 0.0 {
            0
        } else {
            let mut best = 0;
            let mut best_dot = f64::NEG_INFINITY;
            for (k, d) in self.directions.chunks_exact(self.n).enumerate() {
                let dot: f64 = d.iter().zip(x).map(|(u, v)| u * v).sum();
                if dot > best_dot {
                    best_dot = dot;
                    best = k;
                }
            }
            best
        };
        self.profiles[a].eval(r)
    }

    /// Rough bound on the interpolation error (radial midpoint spread plus angular variation per shell).
    pub fn error_estimate(&self) -> f64 {
        self.error_estimate
    }
}

/// Multilinear interpolation between slab cell centers, clamped at the outer
/// centers. Points outside the slab box return `None`.
#[derive(Debug, Clone)]
pub struct SlabInterpolator {
    lo: Vec<f64>,
    hi: Vec<f64>,
    counts: Vec<usize>,
    values: Vec<f64>,
}

impl SlabInterpolator {
    pub fn new(field: &Field) -> Result<Self> {
        match field.grid().kind() {
            GridKind::Slab { lo, hi, counts } => Ok(Self {
                lo: lo.clone(),
                hi: hi.clone(),
                counts: counts.clone(),
                values: field.values().to_vec(),
            }),
            _ => Err(Error::param(
                "grid",
                "multilinear interpolation needs a slab grid",
            )),
        }
    }

    pub fn eval(&self, x: &[f64]) -> Option<f64> {
        let n = self.lo.len();
        let mut base = vec![0usize; n];
        let mut frac = vec![0.0; n];
        for i in 0..n {
            if x[i] < self.lo[i] || x[i] > self.hi[i] {
                return None;
            }
            let h = (self.hi[i] - self.lo[i]) / self.counts[i] as f64;
            let c = ((x[i] - self.lo[i]) / h - 0.5).clamp(0.0, (self.counts[i] - 1) as f64);
            let b = (c.floor() as usize).min(self.counts[i] - 2);
            base[i] = b;
            frac[i] = c - b as f64;
        }
        let mut acc = 0.0;
        for corner in 0..(1usize << n) {
            let mut w = 1.0;
            let mut idx = 0usize;
            for i in 0..n {
                let bit = (corner >> (n - 1 - i)) & 1;
                w *= if bit == 1 { frac[i] } else { 1.0 - frac[i] };
                idx = idx * self.counts[i] + base[i] + bit;
            }
            if w != 0.0 {
                acc += w * self.values[idx];
            }
        }
        Some(acc)
    }
}

/// Radial profile `u(r) = (1-r²)^{γ} v(r)` where `v` is a not-a-knot cubic
/// spline in `z = r²` through the shell averages. Working in `z` keeps the
/// profile even and smooth at the origin.
/// Zero for `r ≥ 1`.
#[derive(Debug, Clone)]
pub struct ShellProfile {
    nodes: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
    gamma: f64,
}

impl ShellProfile {
    /// Shell averages of `field` (weighted by the angular weights), divided by
    /// `(1-r²)^{gamma}`.
    pub fn from_field(field: &Field, gamma: f64) -> Result<Self> {
        let grid = field.grid();
        if !grid.is_ball() {
            return Err(Error::param("grid", "shell profiles need a ball grid"));
        }
        let na = grid.angular_count();
        let radial = grid.radial_nodes();
        let mut r = Vec::with_capacity(radial.len());
        let mut v = Vec::with_capacity(radial.len());
        for (i, &ri) in radial.iter().enumerate() {
            let mean = (0..na)
                .map(|a| field.values()[grid.ball_index(i, a)])
                .sum::<f64>()
                / na as f64;
            r.push(ri);
            v.push(mean / (1.0 - ri * ri).powf(gamma));
        }
        Self::new(r, v, gamma)
    }

    pub fn new(radii: Vec<f64>, reduced: Vec<f64>, gamma: f64) -> Result<Self> {
        if radii.is_empty() || radii.len() != reduced.len() {
            return Err(Error::param(
                "profile",
                "need matching non-empty radii and values",
            ));
        }
        let nodes: Vec<f64> = radii.iter().map(|r| r * r).collect();
        if nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::param("profile", "radii must be strictly increasing"));
        }
        let slopes = not_a_knot_slopes(&nodes, &reduced);
        Ok(Self {
            nodes,
            values: reduced,
            slopes,
            gamma,
        })
    }

    /// The smooth factor `v` at radius `r` (cubic spline in `r²`).
    pub fn reduced(&self, r: f64) -> f64 {
        let z = r * r;
        let m = self.nodes.len();
        if m == 1 {
            return self.values[0];
        }
        let k = self.nodes.partition_point(|&x| x <= z).clamp(1, m - 1) - 1;
        hermite(
            self.nodes[k],
            self.nodes[k + 1],
            self.values[k],
            self.values[k + 1],
            self.slopes[k],
            self.slopes[k + 1],
            z,
        )
    }

    pub fn eval_radius(&self, r: f64) -> f64 {
        if r >= 1.0 {
            return 0.0;
        }
        (1.0 - r * r).powf(self.gamma) * self.reduced(r)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.eval_radius(norm_sq(x).sqrt())
    }
}

fn hermite(x0: f64, x1: f64, y0: f64, y1: f64, d0: f64, d1: f64, x: f64) -> f64 {
    let h = x1 - x0;
    let t = (x - x0) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0) * y0
        + (t3 - 2.0 * t2 + t) * h * d0
        + (-2.0 * t3 + 3.0 * t2) * y1
        + (t3 - t2) * h * d1
}

// Knot slopes of the C² cubic spline with not-a-knot ends. Falls back to
// lower order for fewer than four points.
fn not_a_knot_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let m = x.len();
    if m == 1 {
        return vec![0.0];
    }
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let del: Vec<f64> = (0..m - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
    if m == 2 {
        return vec![del[0]; 2];
    }
    if m == 3 {
        // Single parabola through the three points.
        let c = (del[1] - del[0]) / (x[2] - x[0]);
        return vec![del[0] - c * h[0], del[0] + c * h[0], del[1] + c * h[1]];
    }
    let mut sub = vec![0.0; m];
    let mut diag = vec![0.0; m];
    let mut sup = vec![0.0; m];
    let mut rhs = vec![0.0; m];
    diag[0] = h[1];
    sup[0] = h[0] + h[1];
    rhs[0] = ((h[0] + 2.0 * sup[0]) * h[1] * del[0] + h[0] * h[0] * del[1]) / sup[0];
    for i in 1..m - 1 {
        sub[i] = h[i];
        diag[i] = 2.0 * (h[i - 1] + h[i]);
        sup[i] = h[i - 1];
        rhs[i] = 3.0 * (h[i] * del[i - 1] + h[i - 1] * del[i]);
    }
    let (a, b) = (h[m - 2], h[m - 3]);
    sub[m - 1] = a + b;
    diag[m - 1] = b;
    rhs[m - 1] = (a * a * del[m - 3] + (2.0 * (a + b) + a) * b * del[m - 2]) / (a + b);
    // Thomas elimination.
    for i in 1..m {
        let w = sub[i] / diag[i - 1];
        diag[i] -= w * sup[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    let mut s = vec![0.0; m];
    s[m - 1] = rhs[m - 1] / diag[m - 1];
    for i in (0..m - 1).rev() {
        s[i] = (rhs[i] - sup[i] * s[i + 1]) / diag[i];
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{AngularScheme, Grid};
    use alloc::sync::Arc;

    #[test]
    fn pchip_reproduces_knots_and_preserves_monotonicity() {
        let x: Vec<f64> = (0..8).map(|i| i as f64 / 7.0).collect();
        let y: Vec<f64> = x.iter().map(|t| 1.0 - t * t * t).collect();
        let p = Pchip::new(x.clone(), y.clone()).unwrap();
        for (a, b) in x.iter().zip(&y) {
            assert!((p.eval(*a) - b).abs() < 1e-15);
        }
        let mut last = f64::INFINITY;
        for k in 0..=200 {
            let v = p.eval(k as f64 / 200.0);
            assert!(v <= last + 1e-15);
            last = v;
        }
        assert!((p.eval(0.5) - 0.875).abs() < 5e-3);
        assert!(Pchip::new(vec![0.0, 0.0], vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn slab_interpolation_is_exact_for_affine() {
        let g = Arc::new(Grid::slab(vec![0.0, 0.0], vec![2.0, 1.0], vec![8, 6]).unwrap());
        let f = Field::from_fn(g, |p| 3.0 * p[0] - 2.0 * p[1] + 1.0).unwrap();
        let it = SlabInterpolator::new(&f).unwrap();
        let v = it.eval(&[0.77, 0.31]).unwrap();
        assert!((v - (3.0 * 0.77 - 0.62 + 1.0)).abs() < 1e-13);
        assert!(it.eval(&[2.5, 0.5]).is_none());
    }

    #[test]
    fn ball_interpolator_on_radial_field() {
        let g = Arc::new(Grid::ball(3, 16, 60, AngularScheme::Fibonacci).unwrap());
        let f = Field::from_fn(g, |p| 1.0 - norm_sq(p)).unwrap();
        let it = BallInterpolator::new(&f).unwrap();
        assert!((it.eval(&[0.3, -0.2, 0.4]) - (1.0 - 0.29)).abs() < 1e-3);
        assert_eq!(it.eval(&[1.0, 0.0, 0.0]), 0.0);
    }

    #[test]
    fn shell_profile_recovers_smooth_factor() {
        let g = Arc::new(Grid::ball(3, 12, 40, AngularScheme::Fibonacci).unwrap());
        let f = Field::from_fn(g, |p| {
            let r2 = norm_sq(p);
            (1.0 - r2).sqrt() * (1.0 + r2 * r2)
        })
        .unwrap();
        let sp = ShellProfile::from_field(&f, 0.5).unwrap();
        for r in [0.0, 0.25, 0.6, 0.95] {
            let want = (1.0 - r * r).sqrt() * (1.0 + r.powi(4));
            assert!(
                (sp.eval_radius(r) - want).abs() < 1e-10,
                "r={r}: {}",
                sp.eval_radius(r) - want
            );
        }
    }
}
