//! Model parameters, domain tags and the closed-form constants shared by every
//! kernel and operator.

use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Dimension `n`, order `α` and (optionally) the power exponent `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ModelParams {
    pub n: usize,
    pub alpha: f64,
    #[cfg_attr(feature = "serde", serde(skip_serializing_if = "Option::is_none"))]
    pub p: Option<f64>,
}

impl ModelParams {
    /// Validated `(n, α)` with no exponent.
    pub fn new(n: usize, alpha: f64) -> Result<Self> {
        let params = Self { n, alpha, p: None };
        params.validate()?;
        Ok(params)
    }

    /// Validated `(n, α, p)` with `1 < p ≤ (n+α)/(n-α)`.
    pub fn with_exponent(n: usize, alpha: f64, p: f64) -> Result<Self> {
        let params = Self {
            n,
            alpha,
            p: Some(p),
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::param("n", "dimension must be at least 3"));
        }
        if !(self.alpha > 0.0 && self.alpha < 2.0) {
            return Err(Error::param("alpha", "order must satisfy 0 < alpha < 2"));
        }
        if let Some(p) = self.p {
            let crit = self.critical_exponent();
            if !(p > 1.0 && p <= crit * (1.0 + 1e-14)) {
                return Err(Error::param(
                    "p",
                    alloc::format!("exponent must satisfy 1 < p <= (n+alpha)/(n-alpha) = {crit}"),
                ));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> f64 {
        self.n as f64
    }

    /// `τ = (n+α)/(n-α)`.
    pub fn critical_exponent(&self) -> f64 {
        (self.dim() + self.alpha) / (self.dim() - self.alpha)
    }

    /// The exponent, or a parameter error if none was supplied.
    pub fn exponent(&self) -> Result<f64> {
        self.p
            .ok_or_else(|| Error::param("p", "this operation needs a power exponent p"))
    }

    /// Riesz-kernel coefficient `Γ((n-α)/2) / (2^α π^{n/2} Γ(α/2))`.
    pub fn riesz_coefficient(&self) -> f64 {
        let n = self.dim();
        let a = self.alpha;
        libm::tgamma((n - a) / 2.0) / (2f64.powf(a) * PI.powf(n / 2.0) * libm::tgamma(a / 2.0))
    }

    /// Normalization of the singular-integral definition for which the Fourier
    /// symbol is `|ξ|^α`: `2^α Γ((n+α)/2) / (π^{n/2} |Γ(-α/2)|)`.
    pub fn frac_laplacian_constant(&self) -> f64 {
        let n = self.dim();
        let a = self.alpha;
        2f64.powf(a) * libm::tgamma((n + a) / 2.0)
            / (PI.powf(n / 2.0) * libm::tgamma(-a / 2.0).abs())
    }

    /// `∫_{B_1} G_1(x,y) dy = κ (1-|x|²)^{α/2}` with
    /// `κ = Γ(n/2) / (2^α Γ(1+α/2) Γ((n+α)/2))`.
    pub fn torsion_constant(&self) -> f64 {
        let n = self.dim();
        let a = self.alpha;
        libm::tgamma(n / 2.0)
            / (2f64.powf(a) * libm::tgamma(1.0 + a / 2.0) * libm::tgamma((n + a) / 2.0))
    }
}

/// Where a kernel lives.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum DomainKind {
    /// `B_1(0)`.
    UnitBall,
    /// `{x_n > 0}`.
    HalfSpace,
    /// `B_R(P_R)` with `P_R = (0, …, 0, R)`; tangent to the half-space boundary at the origin.
    BallRadiusR(f64),
}

impl DomainKind {
    pub fn validate(&self) -> Result<()> {
        match *self {
            DomainKind::BallRadiusR(r) if !(r > 0.0 && r.is_finite()) => {
                Err(Error::param("R", "radius must be finite and positive"))
            }
            _ => Ok(()),
        }
    }

    /// Boundary factor: `1-|x|²` (ball), `x_n` (half-space), `(2R x_n - |x|²)/R²` (shifted ball).
    /// Positive exactly on the open domain.
    pub fn boundary_factor(&self, x: &[f64]) -> f64 {
        let n = x.len();
        match *self {
            DomainKind::UnitBall => 1.0 - norm_sq(x),
            DomainKind::HalfSpace => x[n - 1],
            DomainKind::BallRadiusR(r) => (2.0 * r * x[n - 1] - norm_sq(x)) / (r * r),
        }
    }

    pub fn contains_open(&self, x: &[f64]) -> bool {
        self.boundary_factor(x) > 0.0
    }

    pub fn contains_closed(&self, x: &[f64]) -> bool {
        self.boundary_factor(x) >= 0.0
    }
}

/// Surface area `σ_{d-1} = 2 π^{d/2} / Γ(d/2)` of the unit sphere in `R^d`.
pub fn sphere_area(d: usize) -> f64 {
    let d = d as f64;
    2.0 * PI.powf(d / 2.0) / libm::tgamma(d / 2.0)
}

/// Volume `π^{d/2} / Γ(d/2 + 1)` of the unit ball in `R^d`.
pub fn ball_volume(d: usize) -> f64 {
    let d = d as f64;
    PI.powf(d / 2.0) / libm::tgamma(d / 2.0 + 1.0)
}

/// `B(a, b)` through log-gamma.
pub fn beta_fn(a: f64, b: f64) -> f64 {
    (libm::lgamma(a) + libm::lgamma(b) - libm::lgamma(a + b)).exp()
}

pub(crate) fn norm_sq(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

pub(crate) fn dist_sq(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

pub(crate) fn check_dim(n: usize, x: &[f64]) -> Result<()> {
    if x.len() != n {
        return Err(Error::Dimension {
            expected: n,
            found: x.len(),
        });
    }
    Ok(())
}
