//! Discretized nonlocal operators: the Riesz potential, the principal-value
//! fractional Laplacian, and the Hardy–Littlewood–Sobolev ratio.

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::params::{check_dim, dist_sq, sphere_area, ModelParams};
use crate::quadrature::{adaptive_quad, gauss_legendre, SphereRule};
use crate::shell::ShellCorrection;
use crate::sum::CompensatedSum;

/// `∫_{B_r} |z|^{α-n} dz = σ_{n-1} r^α / α`.
fn self_cell(params: &ModelParams, radius: f64) -> f64 {
    sphere_area(params.n) * radius.powf(params.alpha) / params.alpha
}

/// `∫_{B_1} |x-y|^{α-n} dy` for `|x| = a < 1`, from polar coordinates about `x`:
/// `(σ_{n-2}/α) ∫_{-1}^{1} (√(1-a²+a²μ²) - aμ)^α (1-μ²)^{(n-3)/2} dμ`.
pub fn ball_constant_potential(params: &ModelParams, a: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&a) {
        return Err(Error::Domain(
            "constant potential needs a point inside the unit ball",
        ));
    }
    let alpha = params.alpha;
    let c = (params.dim() - 3.0) / 2.0;
    let f = |mu: f64| {
        let len = (1.0 - a * a + a * a * mu * mu).sqrt() - a * mu;
        len.powf(alpha) * (1.0 - mu * mu).max(0.0).powf(c)
    };
    // The chord length has its sharpest bend at μ = 0.
    let v = adaptive_quad(f, -1.0, 0.0, 1e-13)? + adaptive_quad(f, 0.0, 1.0, 1e-13)?;
    Ok(sphere_area(params.n - 1) / alpha * v)
}

/// `∫_{|y|=ρ} |x-y|^{α-n} dS(y) / ρ^{n-1}` for `|x| = r ≠ ρ`:
/// `σ_{n-2} ∫_{-1}^{1} (r²+ρ²-2rρμ)^{(α-n)/2} (1-μ²)^{(n-3)/2} dμ`.
pub fn riesz_sphere_mean(params: &ModelParams, r: f64, rho: f64) -> Result<f64> {
    let n = params.dim();
    let expo = (params.alpha - n) / 2.0;
    let c = (n - 3.0) / 2.0;
    let f = |mu: f64| {
        (r * r + rho * rho - 2.0 * r * rho * mu).powf(expo) * (1.0 - mu * mu).max(0.0).powf(c)
    };
    Ok(sphere_area(params.n - 1) * sphere_mean_quad(f, r, rho)?)
}

/// `∫_{-1}^{1} f(μ) dμ` for an integrand peaked at `μ = 1` with width `(r-ρ)²/(2rρ)`.
pub(crate) fn sphere_mean_quad<F: Fn(f64) -> f64>(f: F, r: f64, rho: f64) -> Result<f64> {
    let width = ((r - rho) * (r - rho) / (2.0 * r * rho)).min(0.5);
    let mut breaks = alloc::vec![-1.0, 0.0];
    let mut b = 1.0 - 0.5;
    while b > 1.0 - width {
        breaks.push(b);
        b = 1.0 - 0.5 * (1.0 - b);
        if 1.0 - b < 0.25 * width {
            break;
        }
    }
    breaks.push(1.0 - width);
    breaks.push(1.0);
    breaks.dedup();
    breaks.retain(|v| (-1.0..=1.0).contains(v));
    let mut acc = CompensatedSum::new();
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            acc.add(adaptive_quad(&f, w[0], w[1], 1e-12)?);
        }
    }
    Ok(acc.value())
}

/// `Tg(x_i) = ∫ |x_i - y|^{α-n} g(y) dy` over the grid's domain.
///
/// Slab grids: `Σ_{j≠i} w_j |x_i - x_j|^{α-n} g_j + g_i σ_{n-1} r_i^α / α`, with
/// `r_i` the volume-equivalent cell radius. Ball grids are far from round
/// cells, so a ball-shaped self cell misweights the nearest radial
/// neighbours; there the singular part is removed shell by shell against the
/// exact sphere means and the exact potential of a constant.
pub fn riesz_apply(g: &Field, params: &ModelParams) -> Result<Field> {
    params.validate()?;
    let grid = g.grid().clone();
    if grid.dim() != params.n {
        return Err(Error::Dimension {
            expected: params.n,
            found: grid.dim(),
        });
    }
    let vals = g.values();
    let expo = (params.alpha - params.dim()) / 2.0;
    let out = if grid.is_ball() {
        let corr = ShellCorrection::new(
            &grid,
            |r, rho| riesz_sphere_mean(params, r, rho),
            |r| ball_constant_potential(params, r),
        )?;
        crate::par::map_indices(grid.len(), |i| {
            let xi = grid.point(i);
            let mut row = alloc::vec![0.0; grid.len()];
            corr.row(
                &grid,
                i,
                |q| dist_sq(xi, grid.point(q)).powf(expo),
                &mut row,
            );
            crate::sum::cdot(&row, vals)
        })
    } else {
        crate::par::map_indices(grid.len(), |i| {
            let xi = grid.point(i);
            let mut acc = CompensatedSum::new();
            for (j, (yj, wj)) in grid.points().zip(grid.weights()).enumerate() {
                if j != i {
                    acc.add(wj * dist_sq(xi, yj).powf(expo) * vals[j]);
                }
            }
            acc.add(vals[i] * self_cell(params, grid.cell_radius()[i]));
            acc.value()
        })
    };
    Field::new(grid, out)
}

/// `Tg(x)` at an arbitrary point; a grid point that coincides with `x` gets the self-cell term.
pub fn riesz_at(g: &Field, x: &[f64], params: &ModelParams) -> Result<f64> {
    check_dim(params.n, x)?;
    let grid: &Grid = g.grid();
    let expo = (params.alpha - params.dim()) / 2.0;
    let mut acc = CompensatedSum::new();
    for (j, (yj, wj)) in grid.points().zip(grid.weights()).enumerate() {
        let s = dist_sq(x, yj);
        if s == 0.0 {
            acc.add(g.values()[j] * self_cell(params, grid.cell_radius()[j]));
        } else {
            acc.add(wj * s.powf(expo) * g.values()[j]);
        }
    }
    Ok(acc.value())
}

/// Where the integrand of the principal-value integral can be non-zero.
#[derive(Debug, Clone, PartialEq)]
pub enum Support {
    /// `u = 0` outside the closed ball.
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    /// `u = 0` on `{x_n ≤ 0}`.
    HalfSpace,
    Everywhere,
}

/// Support and far-field growth `|u(y)| ≲ |y|^γ` of the function being differentiated.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayHint {
    pub support: Support,
    pub growth: f64,
}

impl DecayHint {
    pub fn compact_ball(center: Vec<f64>, radius: f64) -> Self {
        Self {
            support: Support::Ball { center, radius },
            growth: 0.0,
        }
    }

    pub fn half_space(growth: f64) -> Self {
        Self {
            support: Support::HalfSpace,
            growth,
        }
    }

    pub fn everywhere(growth: f64) -> Self {
        Self {
            support: Support::Everywhere,
            growth,
        }
    }

    /// `[a, b]` (b possibly infinite) of `r ≥ 0` with `x + rω` in the support.
    fn chord(&self, x: &[f64], w: &[f64]) -> Option<(f64, f64)> {
        match &self.support {
            Support::Everywhere => Some((0.0, f64::INFINITY)),
            Support::HalfSpace => {
                let n = x.len();
                let (xn, wn) = (x[n - 1], w[n - 1]);
                if xn > 0.0 {
                    Some((0.0, if wn < 0.0 { -xn / wn } else { f64::INFINITY }))
                } else if wn > 0.0 {
                    Some((-xn / wn, f64::INFINITY))
                } else {
                    None
                }
            }
            Support::Ball { center, radius } => {
                let d: Vec<f64> = x.iter().zip(center).map(|(a, b)| a - b).collect();
                let b: f64 = d.iter().zip(w).map(|(a, b)| a * b).sum();
                let c = d.iter().map(|v| v * v).sum::<f64>() - radius * radius;
                let disc = b * b - c;
                if disc <= 0.0 {
                    return None;
                }
                let sq = disc.sqrt();
                let hi = -b + sq;
                if hi <= 0.0 {
                    return None;
                }
                Some(((-b - sq).max(0.0), hi))
            }
        }
    }
}

/// Quadrature resolution of [`frac_laplacian_pv`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PvOptions {
    /// Gauss–Jacobi nodes per polar angle of the sphere rule.
    pub polar: usize,
    /// Midpoint nodes on the azimuthal circle.
    pub azimuth: usize,
    /// Gauss–Legendre nodes per radial panel.
    pub panel_nodes: usize,
    /// Halving levels toward a support boundary crossed by a ray.
    pub end_levels: usize,
}

impl Default for PvOptions {
    fn default() -> Self {
        Self {
            polar: 24,
            azimuth: 48,
            panel_nodes: 8,
            end_levels: 14,
        }
    }
}

/// Value and estimated truncation error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PvEstimate {
    pub value: f64,
    pub error: f64,
}

/// Radial breakpoints of `[a, b]`: geometric from `a` when `a` is the inner
/// cutoff, graded toward each endpoint that is a support boundary.
fn radial_breaks(
    a: f64,
    b: f64,
    from_inner: bool,
    grade_a: bool,
    grade_b: bool,
    levels: usize,
) -> Vec<f64> {
    let mid = 0.5 * (a + b);
    let mut out = Vec::new();
    if from_inner {
        let mut r = a;
        while r < mid {
            out.push(r);
            r *= 2.0;
        }
    } else if grade_a {
        out.push(a);
        for k in (1..=levels).rev() {
            out.push(a + (mid - a) * 0.5f64.powi(k as i32));
        }
    } else {
        out.push(a);
    }
    out.push(mid);
    if grade_b {
        for k in 1..=levels {
            out.push(b - (b - mid) * 0.5f64.powi(k as i32));
        }
    }
    out.push(b);
    out.dedup();
    out
}

/// `C_{n,α} PV ∫ (u(x) - u(z)) |x - z|^{-n-α} dz`.
///
/// Inside `inner_radius` the integrand is replaced by its second-order Taylor
/// model, giving `-C_{n,α} σ_{n-1} Δu(x) ε^{2-α} / (2n(2-α))` with `Δu` from
/// Richardson-extrapolated central differences of step `ε`. Each ray of a
/// product sphere rule is integrated on `[ε, min(b, R)]`, where `b` is the
/// support exit from `hint`; past `b` the integrand is `u(x) r^{-1-α}`, done
/// in closed form. Rays still inside the support at `R = outer_radius` use the
/// growth model `u(x + rω) ≈ u(x + Rω)(r/R)^γ`, which needs `γ < α`.
pub fn frac_laplacian_pv<F>(
    u: F,
    x: &[f64],
    params: &ModelParams,
    inner_radius: f64,
    outer_radius: f64,
    hint: &DecayHint,
    opts: &PvOptions,
) -> Result<PvEstimate>
where
    F: Fn(&[f64]) -> f64,
{
    params.validate()?;
    check_dim(params.n, x)?;
    if !(inner_radius > 0.0 && outer_radius > inner_radius && outer_radius.is_finite()) {
        return Err(Error::param(
            "radii",
            "need 0 < inner_radius < outer_radius < inf",
        ));
    }
    if opts.polar == 0 || opts.azimuth == 0 || opts.panel_nodes == 0 {
        return Err(Error::param("pv_options", "node counts must be positive"));
    }
    let n = params.n;
    let alpha = params.alpha;
    let eps = inner_radius;
    let ux = u(x);

    // Inner Taylor region.
    let laplacian = |h: f64| -> f64 {
        let mut y = x.to_vec();
        let mut acc = 0.0;
        for i in 0..n {
            y[i] = x[i] + h;
            let up = u(&y);
            y[i] = x[i] - h;
            let dn = u(&y);
            y[i] = x[i];
            acc += (up - 2.0 * ux + dn) / (h * h);
        }
        acc
    };
    let lap_h = laplacian(eps);
    let lap_half = laplacian(0.5 * eps);
    let lap = (4.0 * lap_half - lap_h) / 3.0;
    let inner_factor = sphere_area(n) * eps.powf(2.0 - alpha) / (2.0 * n as f64 * (2.0 - alpha));
    let inner = -lap * inner_factor;
    let inner_err =
        (lap_half - lap_h).abs() / 3.0 * inner_factor + lap.abs() * inner_factor * eps * eps;

    let sphere = SphereRule::product(n, opts.polar, opts.azimuth);
    let leg = gauss_legendre(opts.panel_nodes);
    let power = |r: f64| r.powf(-1.0 - alpha);
    let mut total = CompensatedSum::new();
    let mut tail_err = 0.0;
    let mut y = x.to_vec();
    for (w, ws) in sphere.iter() {
        let mut ray = CompensatedSum::new();
        let (a, b) = match hint.chord(x, w) {
            Some((a, b)) if b > eps => (a.max(eps), b),
            _ => {
                // The whole ray beyond ε sees u = 0.
                total.add(ws * ux * eps.powf(-alpha) / alpha);
                continue;
            }
        };
        // u = 0 on [ε, a).
        if a > eps {
            ray.add(ux * (eps.powf(-alpha) - a.powf(-alpha)) / alpha);
        }
        let bounded = b <= outer_radius;
        let hi = if bounded { b } else { outer_radius.max(a) };
        if hi > a {
            let breaks = radial_breaks(
                a,
                hi,
                a == eps,
                a > eps,
                bounded && b.is_finite(),
                opts.end_levels,
            );
            for seg in breaks.windows(2) {
                let (lo, len) = (seg[0], seg[1] - seg[0]);
                for (&v, &wv) in leg.nodes().iter().zip(leg.weights()) {
                    let r = lo + len * v;
                    for k in 0..n {
                        y[k] = x[k] + r * w[k];
                    }
                    ray.add(wv * len * (ux - u(&y)) * power(r));
                }
            }
        }
        if bounded {
            ray.add(ux * b.powf(-alpha) / alpha);
        } else {
            if hint.growth >= alpha {
                return Err(Error::Truncation(format!(
                    "growth exponent {} is not below alpha = {alpha}; the tail integral diverges",
                    hint.growth
                )));
            }
            let big_r = hi;
            for k in 0..n {
                y[k] = x[k] + big_r * w[k];
            }
            let u_far = u(&y);
            let far = u_far * big_r.powf(-alpha) / (alpha - hint.growth);
            ray.add(ux * big_r.powf(-alpha) / alpha - far);
            tail_err += ws * far.abs();
        }
        total.add(ws * ray.value());
    }
    let c = params.frac_laplacian_constant();
    Ok(PvEstimate {
        value: c * (inner + total.value()),
        error: c * (inner_err + tail_err),
    })
}

/// `‖Tg‖_{L^p} / ‖g‖_{L^{np/(n+αp)}}` by grid quadrature; needs `p > n/(n-α)`.
pub fn hls_ratio(g: &Field, p: f64, params: &ModelParams) -> Result<f64> {
    params.validate()?;
    let n = params.dim();
    let alpha = params.alpha;
    let threshold = n / (n - alpha);
    if !(p > threshold && p.is_finite()) {
        return Err(Error::param(
            "p",
            format!("HLS needs n/(n-alpha) = {threshold} < p < inf"),
        ));
    }
    let q = n * p / (n + alpha * p);
    let tg = riesz_apply(g, params)?;
    let norm = |f: &Field, e: f64| -> f64 {
        let s: CompensatedSum = f
            .values()
            .iter()
            .zip(f.grid().weights())
            .map(|(v, w)| w * v.abs().powf(e))
            .collect();
        s.value().powf(1.0 / e)
    };
    let den = norm(g, q);
    if den == 0.0 {
        return Err(Error::Degenerate("HLS ratio of the zero function"));
    }
    Ok(norm(&tg, p) / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{AngularScheme, Grid};
    use crate::params::norm_sq;
    use alloc::sync::Arc;
    use core::f64::consts::PI;

    fn p31() -> ModelParams {
        ModelParams::new(3, 1.0).unwrap()
    }

    /// `∫_{B_1} |x-y|^{-2} dy = (2π/a) ∫_0^1 ρ ln((a+ρ)/|a-ρ|) dρ` for `|x| = a`, n = 3.
    fn indicator_potential(a: f64) -> f64 {
        let f = |r: f64| r * ((a + r) / (a - r).abs()).ln();
        let lo = adaptive_quad(f, 0.0, a, 1e-13).unwrap();
        let hi = adaptive_quad(f, a, 1.0, 1e-13).unwrap();
        2.0 * PI / a * (lo + hi)
    }

    /// `∫_{B_1} |x-y|^{-2} (1-|y|²) dy` by nested adaptive quadrature in polar
    /// coordinates about `x`, n = 3.
    fn bump_potential(a: f64) -> f64 {
        let outer = |mu: f64| {
            let len = (1.0 - a * a + a * a * mu * mu).sqrt() - a * mu;
            let inner = |r: f64| 1.0 - (a * a + r * r + 2.0 * a * r * mu);
            adaptive_quad(inner, 0.0, len, 1e-13).unwrap()
        };
        2.0 * PI
            * (adaptive_quad(outer, -1.0, 0.0, 1e-12).unwrap()
                + adaptive_quad(outer, 0.0, 1.0, 1e-12).unwrap())
    }

    #[test]
    fn constant_potential_matches_radial_oracle() {
        for a in [0.0, 0.3, 0.7, 0.99] {
            let got = ball_constant_potential(&p31(), a).unwrap();
            let want = if a == 0.0 {
                4.0 * PI
            } else {
                indicator_potential(a)
            };
            assert!((got - want).abs() < 1e-10 * want, "a={a}: {got} vs {want}");
        }
    }

    #[test]
    fn riesz_of_smooth_field_converges() {
        let mut errs = Vec::new();
        for (nr, na) in [(6, 40), (12, 160)] {
            let g = Arc::new(Grid::ball(3, nr, na, AngularScheme::Fibonacci).unwrap());
            let f = Field::from_fn(g.clone(), |p| 1.0 - norm_sq(p)).unwrap();
            let t = riesz_apply(&f, &p31()).unwrap();
            let mut worst: f64 = 0.0;
            let mut scale: f64 = 0.0;
            for i in 0..nr {
                let k = g.ball_index(i, 0);
                let want = bump_potential(norm_sq(g.point(k)).sqrt());
                worst = worst.max((t.values()[k] - want).abs());
                scale = scale.max(want);
            }
            let worst = worst / scale;
            errs.push(worst);
        }
        assert!(errs[0] < 5e-3 && errs[1] < 0.25 * errs[0], "{errs:?}");
    }

    #[test]
    fn riesz_linear_and_zero() {
        let g = Arc::new(Grid::ball(3, 4, 20, AngularScheme::Fibonacci).unwrap());
        let z = Field::zeros(g.clone());
        assert_eq!(riesz_apply(&z, &p31()).unwrap().max_abs(), 0.0);
        let f = Field::from_fn(g, |p| p[0] + 2.0).unwrap();
        let a = riesz_apply(&f, &p31()).unwrap();
        let b = riesz_apply(&f.scaled(-3.5), &p31()).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((y + 3.5 * x).abs() <= 1e-13 * x.abs().max(1.0));
        }
    }

    #[test]
    fn pv_of_constant_vanishes() {
        let v = frac_laplacian_pv(
            |_| 2.0,
            &[0.1, 0.2, 0.3],
            &p31(),
            0.05,
            50.0,
            &DecayHint::everywhere(0.0),
            &PvOptions::default(),
        )
        .unwrap();
        assert!(v.value.abs() < 1e-12, "{v:?}");
    }

    #[test]
    fn pv_of_gaussian_at_origin() {
        // (-Δ)^{α/2} e^{-|x|²} at 0 = 2^α Γ((n+α)/2)/Γ(n/2).
        let want = 2.0 * libm::tgamma(2.0) / libm::tgamma(1.5);
        let v = frac_laplacian_pv(
            |y| (-norm_sq(y)).exp(),
            &[0.0; 3],
            &p31(),
            0.02,
            12.0,
            &DecayHint::everywhere(0.0),
            &PvOptions::default(),
        )
        .unwrap();
        assert!((v.value - want).abs() < 1e-4 * want, "{v:?} vs {want}");
    }

    #[test]
    fn pv_rejects_fast_growth() {
        let r = frac_laplacian_pv(
            |y| y[2],
            &[0.0, 0.0, 1.0],
            &p31(),
            0.1,
            10.0,
            &DecayHint::everywhere(1.0),
            &PvOptions::default(),
        );
        assert!(matches!(r, Err(Error::Truncation(_))));
    }

    #[test]
    fn hls_ratio_homogeneous_and_range() {
        let g = Arc::new(Grid::ball(3, 6, 40, AngularScheme::Fibonacci).unwrap());
        let f = Field::from_fn(g, |p| (1.0 - norm_sq(p)).powi(2)).unwrap();
        let r1 = hls_ratio(&f, 4.0, &p31()).unwrap();
        let r2 = hls_ratio(&f.scaled(2.0), 4.0, &p31()).unwrap();
        assert!((r1 - r2).abs() < 1e-12 * r1);
        assert!(matches!(
            hls_ratio(&f, 1.5, &p31()),
            Err(Error::Parameter { .. })
        ));
    }
}
