use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::sum::CompensatedSum;

/// Exponents of the half-space lower-bound bootstrap and the sign data that
/// close the nonexistence argument.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CascadeReport {
    pub n: usize,
    pub alpha: f64,
    pub p: f64,
    /// Smallest admissible number of bootstrap rounds: `⌊(3-α²)/α⌋ + 1`, at least 0.
    pub m_min: usize,
    /// `exponents[k]` is the growth exponent after `k` rounds, from
    /// `e_0 = α/2 - 1`, `e_{k+1} = p e_k + α`; length `m_min + 1`.
    pub exponents: Vec<f64>,
    /// `p^k (α/2 - 1) + α (p^k - 1)/(p - 1)` for the same `k`.
    pub closed_form: Vec<f64>,
    pub max_recursion_gap: f64,
    /// `τ(p) = e_m p + α/2`.
    pub tau_p: f64,
    /// `f(p) = τ(p)(p-1)` from its polynomial form.
    pub f_p: f64,
    pub fprime_p: f64,
    /// `|τ(p)(p-1) - f(p)|`.
    pub f_identity_gap: f64,
}

impl CascadeReport {
    pub fn passes(&self) -> bool {
        self.tau_p >= 0.0 && self.fprime_p > 0.0 && self.max_recursion_gap <= 1e-12 * self.scale()
    }

    fn scale(&self) -> f64 {
        self.exponents.iter().fold(1.0f64, |m, e| m.max(e.abs()))
    }
}

pub fn cascade_m_min(alpha: f64) -> usize {
    let m = ((3.0 - alpha * alpha) / alpha).floor() + 1.0;
    if m <= 0.0 {
        0
    } else {
        m as usize
    }
}

fn closed_form_exponent(p: f64, alpha: f64, k: usize) -> f64 {
    let pk = p.powi(k as i32);
    pk * (alpha / 2.0 - 1.0) + alpha * (pk - 1.0) / (p - 1.0)
}

pub fn liouville_cascade(params: &ModelParams) -> Result<CascadeReport> {
    params.validate()?;
    let p = params.exponent()?;
    let alpha = params.alpha;
    let m = cascade_m_min(alpha);
    let mut exponents = Vec::with_capacity(m + 1);
    exponents.push(alpha / 2.0 - 1.0);
    for k in 0..m {
        exponents.push(p * exponents[k] + alpha);
    }
    let closed_form: Vec<f64> = (0..=m).map(|k| closed_form_exponent(p, alpha, k)).collect();
    let max_recursion_gap = exponents
        .iter()
        .zip(&closed_form)
        .fold(0.0, |g, (a, b)| f64::max(g, (a - b).abs()));
    let h = alpha / 2.0;
    let em = exponents[m];
    let tau_p = em * p + h;
    let pm = p.powi(m as i32);
    let f_p = pm * p * p * (h - 1.0) + (h + 1.0) * pm * p - h * p - h;
    let fprime_p = pm * ((m as f64 + 2.0) * (h - 1.0) * p + (m as f64 + 1.0) * (h + 1.0)) - h;
    Ok(CascadeReport {
        n: params.n,
        alpha,
        p,
        m_min: m,
        exponents,
        closed_form,
        max_recursion_gap,
        tau_p,
        f_p,
        fprime_p,
        f_identity_gap: (tau_p * (p - 1.0) - f_p).abs(),
    })
}

/// A nonnegative profile `u(y_n)` sampled at increasing nodes of `(0, Y]`
/// with quadrature weights for `∫ · dy_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub values: Vec<f64>,
}

impl Profile {
    /// Log-spaced nodes on `[lo, hi]` with trapezoid weights in `ln y`.
    pub fn geometric<F: Fn(f64) -> f64>(lo: f64, hi: f64, count: usize, f: F) -> Result<Self> {
        if !(lo > 0.0 && hi > lo) || count < 2 {
            return Err(Error::param(
                "profile",
                "need 0 < lo < hi and at least two nodes",
            ));
        }
        let h = (hi / lo).ln() / (count - 1) as f64;
        let nodes: Vec<f64> = (0..count).map(|k| lo * (h * k as f64).exp()).collect();
        let weights = nodes
            .iter()
            .enumerate()
            .map(|(k, y)| {
                if k == 0 || k + 1 == count {
                    0.5 * h * y
                } else {
                    h * y
                }
            })
            .collect();
        let values = nodes.iter().map(|&y| f(y)).collect();
        Ok(Self {
            nodes,
            weights,
            values,
        })
    }

    fn with_values(&self, values: Vec<f64>) -> Self {
        Self {
            nodes: self.nodes.clone(),
            weights: self.weights.clone(),
            values,
        }
    }
}

/// Value of the bound and whether a node equal to `x_n` was dropped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBound {
    pub value: f64,
    pub excluded_node: bool,
}

/// `C₀ x_n^{α/2} ∫ u^p(y_n) y_n^{α/2} |x_n - y_n|^{-1} dy_n` over the profile nodes.
pub fn halfspace_profile_lowerbound(
    profile: &Profile,
    params: &ModelParams,
    x_n: f64,
    c0: f64,
) -> Result<LowerBound> {
    params.validate()?;
    let p = params.exponent()?;
    if !(x_n > 0.0 && x_n.is_finite()) {
        return Err(Error::param("x_n", "evaluation point must be positive"));
    }
    if profile.values.iter().any(|&v| !(v >= 0.0)) {
        return Err(Error::param("profile", "profile must be nonnegative"));
    }
    let h = params.alpha / 2.0;
    let mut acc = CompensatedSum::new();
    let mut excluded_node = false;
    for ((&y, &w), &u) in profile
        .nodes
        .iter()
        .zip(&profile.weights)
        .zip(&profile.values)
    {
        if y == x_n {
            excluded_node = true;
            continue;
        }
        if u > 0.0 {
            acc.add(w * u.powf(p) * y.powf(h) / (x_n - y).abs());
        }
    }
    Ok(LowerBound {
        value: c0 * x_n.powf(h) * acc.value(),
        excluded_node,
    })
}

/// One bootstrap round evaluated at every profile node.
pub fn cascade_iterate(profile: &Profile, params: &ModelParams, c0: f64) -> Result<Profile> {
    let values = profile
        .nodes
        .iter()
        .map(|&x| halfspace_profile_lowerbound(profile, params, x, c0).map(|b| b.value))
        .collect::<Result<Vec<_>>>()?;
    Ok(profile.with_values(values))
}

/// Least-squares slope of `ln u` against `ln y_n` over nodes in `[lo, hi]`.
pub fn log_log_slope(profile: &Profile, lo: f64, hi: f64) -> Result<f64> {
    let pts: Vec<(f64, f64)> = profile
        .nodes
        .iter()
        .zip(&profile.values)
        .filter(|(&y, &u)| y >= lo && y <= hi && u > 0.0)
        .map(|(&y, &u)| (y.ln(), u.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::Degenerate(
            "fewer than two positive samples in the fit window",
        ));
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Ok(sxy / sxx)
}
