//! Moving-plane reflections, the regions `Σ_λ`, and the Kelvin inversion about
//! a point of the half-space boundary.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::params::{dist_sq, DomainKind, ModelParams};

/// The plane `{x_axis = λ}`; `axis` is 1-based.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Hyperplane {
    pub axis: usize,
    pub level: f64,
}

impl Hyperplane {
    pub fn new(axis: usize, level: f64) -> Self {
        Self { axis, level }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.axis == 0 || self.axis > n {
            return Err(Error::param(
                "axis",
                alloc::format!("axis must lie in 1..={n}"),
            ));
        }
        if !self.level.is_finite() {
            return Err(Error::param("level", "plane level must be finite"));
        }
        Ok(())
    }

    fn index(&self) -> usize {
        self.axis - 1
    }
}

/// `x^λ`: the mirror image of `x` in the plane.
pub fn reflect(x: &[f64], plane: Hyperplane) -> Vec<f64> {
    let mut y = x.to_vec();
    reflect_in_place(&mut y, plane);
    y
}

pub fn reflect_in_place(x: &mut [f64], plane: Hyperplane) {
    let i = plane.index();
    x[i] = 2.0 * plane.level - x[i];
}

/// `x ∈ Σ_λ`: `x` lies in the open domain and strictly below the plane.
pub fn in_sigma(x: &[f64], plane: Hyperplane, domain: DomainKind) -> bool {
    plane.axis >= 1
        && plane.axis <= x.len()
        && domain.contains_open(x)
        && x[plane.index()] < plane.level
}

/// A point `z⁰` of `∂R^n_+` about which inversions are taken.
#[derive(Debug, Clone, PartialEq)]
pub struct InversionCenter {
    z0: Vec<f64>,
}

impl InversionCenter {
    pub fn new(z0: Vec<f64>) -> Result<Self> {
        match z0.last() {
            None => Err(Error::Dimension {
                expected: 1,
                found: 0,
            }),
            Some(&zn) if zn != 0.0 => Err(Error::Domain(
                "inversion center must lie on the boundary x_n = 0",
            )),
            Some(_) if z0.iter().any(|v| !v.is_finite()) => {
                Err(Error::param("z0", "center must be finite"))
            }
            Some(_) => Ok(Self { z0 }),
        }
    }

    pub fn origin(n: usize) -> Self {
        Self {
            z0: alloc::vec![0.0; n],
        }
    }

    pub fn point(&self) -> &[f64] {
        &self.z0
    }

    fn check(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.z0.len() {
            return Err(Error::Dimension {
                expected: self.z0.len(),
                found: x.len(),
            });
        }
        let r2 = dist_sq(x, &self.z0);
        if r2 == 0.0 {
            return Err(Error::Singularity("inversion is singular at its center"));
        }
        Ok(r2)
    }
}

/// `x̂ = (x - z⁰)/|x - z⁰|² + z⁰`.
pub fn kelvin_point(x: &[f64], c: &InversionCenter) -> Result<Vec<f64>> {
    let r2 = c.check(x)?;
    Ok(x.iter()
        .zip(&c.z0)
        .map(|(xi, zi)| (xi - zi) / r2 + zi)
        .collect())
}

/// `ū(x) = |x - z⁰|^{α-n} u(x̂)` given `u(x̂)`.
pub fn kelvin_value(
    u_at_xhat: f64,
    x: &[f64],
    c: &InversionCenter,
    params: &ModelParams,
) -> Result<f64> {
    let r2 = c.check(x)?;
    Ok(r2.powf((params.alpha - params.dim()) / 2.0) * u_at_xhat)
}

/// Kelvin transform of an evaluator.
pub fn kelvin_transform<'a, F>(
    u: F,
    c: &'a InversionCenter,
    params: &'a ModelParams,
) -> impl Fn(&[f64]) -> Result<f64> + 'a
where
    F: Fn(&[f64]) -> f64 + 'a,
{
    move |x: &[f64]| {
        let xh = kelvin_point(x, c)?;
        kelvin_value(u(&xh), x, c, params)
    }
}

/// Relative residual of `G_∞(x̂, ŷ) = (|x-z⁰| |y-z⁰|)^{n-α} G_∞(x, y)`.
pub fn kelvin_kernel_residual(
    kernel: &Kernel,
    x: &[f64],
    y: &[f64],
    c: &InversionCenter,
) -> Result<f64> {
    let params = kernel.params();
    let rx = c.check(x)?.sqrt();
    let ry = c.check(y)?.sqrt();
    let xh = kelvin_point(x, c)?;
    let yh = kelvin_point(y, c)?;
    let lhs = kernel.green(DomainKind::HalfSpace, &xh, &yh)?;
    let rhs =
        (rx * ry).powf(params.dim() - params.alpha) * kernel.green(DomainKind::HalfSpace, x, y)?;
    if rhs == 0.0 {
        return Err(Error::Domain("Kelvin residual needs interior points"));
    }
    Ok((lhs - rhs).abs() / rhs)
}

/// Weight exponent `β = (n-α)(τ-p) = n+α-p(n-α)` of the inverted source term;
/// zero exactly at the critical exponent.
pub fn kelvin_weight_exponent(params: &ModelParams) -> Result<f64> {
    let p = params.exponent()?;
    let n = params.dim();
    let beta = (n - params.alpha) * (params.critical_exponent() - p);
    // The validated range allows p a hair above τ; that is β = 0.
    Ok(beta.max(0.0))
}
