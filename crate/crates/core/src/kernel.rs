//! Green's functions of `(-Δ)^{α/2}` on the unit ball, on `B_R(P_R)` and on
//! the half-space.
//!
//! All three share one closed form in the variables `s = |x-y|²` and a
//! domain factor `t`:
//!
//! ```text
//! G(x,y) = A s^{-(n-α)/2} [1 - B I₁(s,t)],
//! I₁(s,t) = (s+t)^{-(n-2)/2} ∫_0^{s/t} (s-tb)^{(n-2)/2} b^{-α/2} (1+b)^{-1} db.
//! ```
//!
//! `I₁` depends on `s` and `t` only through `ρ = s/t`. With `b = ρu` it
//! becomes `(ρ/(1+ρ))^{k} ρ^{1-α/2} ∫_0^1 u^{-α/2} (1-u)^{k} / (1+ρu) du`,
//! `k = (n-2)/2`, whose endpoint factors are absorbed by Gauss–Jacobi
//! weights. For large `ρ` the rational factor has a pole at `u = -1/ρ`, so
//! `(0,1)` is cut into fixed geometric panels `[4^{-j-1}, 4^{-j}]` and only
//! as many panels are used as `ρ` requires. Every node, weight and endpoint
//! factor is precomputed once per `(n, α)`; an evaluation costs one division
//! per node.
//!
//! For `ρ > 1` the bracket `1 - B I₁` is small and is evaluated from the
//! complementary representation
//!
//! ```text
//! 1 - B I₁ = B [ ∫_0^ρ (1 - q^k) b^{-α/2}/(1+b) db + ∫_ρ^∞ b^{-α/2}/(1+b) db ],
//! q = (1 - b/ρ)/(1 + 1/ρ),
//! ```
//!
//! which has no cancellation.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::params::{beta_fn, check_dim, dist_sq, norm_sq, DomainKind, ModelParams};
use crate::quadrature::{gauss_legendre, JacobiRule};
use crate::sum::CompensatedSum;

/// Default Gauss–Jacobi node count.
pub const DEFAULT_NODES: usize = 48;

/// Deepest geometric panel level; `ρ` beyond `4^{MAX_LEVEL+1}` reuses the last level.
const MAX_LEVEL: usize = 60;

/// The normalization constants `A_{n,α}` and `B_{n,α}`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct GreenConstants {
    pub a: f64,
    pub b: f64,
}

impl GreenConstants {
    /// `B = 1/∫_0^∞ b^{-α/2}(1+b)^{-1} db = sin(πα/2)/π` and the Riesz coefficient `A`.
    pub fn for_params(params: &ModelParams) -> Self {
        let b = (core::f64::consts::PI * params.alpha / 2.0).sin() / core::f64::consts::PI;
        Self {
            a: params.riesz_coefficient(),
            b,
        }
    }
}

/// Validated constants for `params`.
pub fn green_constants(params: &ModelParams) -> Result<GreenConstants> {
    params.validate()?;
    Ok(GreenConstants::for_params(params))
}

/// `s = |x-y|²` and the domain factor `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct KernelCoords {
    pub s: f64,
    pub t: f64,
}

impl KernelCoords {
    pub fn new(s: f64, t: f64) -> Self {
        Self { s, t }
    }

    /// `ρ = s/t` (infinite on the boundary).
    pub fn ratio(&self) -> f64 {
        if self.t == 0.0 {
            f64::INFINITY
        } else {
            self.s / self.t
        }
    }
}

/// Kernel coordinates of a pair of points in the closed domain.
pub fn coords(domain: DomainKind, x: &[f64], y: &[f64]) -> Result<KernelCoords> {
    domain.validate()?;
    if x.len() != y.len() {
        return Err(Error::Dimension {
            expected: x.len(),
            found: y.len(),
        });
    }
    if x.is_empty() {
        return Err(Error::Dimension {
            expected: 1,
            found: 0,
        });
    }
    let fx = domain.boundary_factor(x);
    let fy = domain.boundary_factor(y);
    if fx < 0.0 || fy < 0.0 {
        return Err(Error::Domain(
            "kernel coordinates need points in the closed domain",
        ));
    }
    let s = dist_sq(x, y);
    Ok(match domain {
        DomainKind::UnitBall => KernelCoords { s, t: fx * fy },
        DomainKind::HalfSpace => KernelCoords {
            s,
            t: 4.0 * fx * fy,
        },
        DomainKind::BallRadiusR(r) => KernelCoords {
            s: s / (r * r),
            t: fx * fy,
        },
    })
}

/// `I₁(s,t)` with a flag for the boundary limit `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerIntegral {
    pub value: f64,
    /// `true` when `t = 0` and the value is the limit `1/B`.
    pub limit: bool,
}

#[derive(Debug, Clone, Copy)]
struct Node {
    u: f64,
    /// Quadrature weight including `u^{-α/2}` (and `(1-u)^k` where the rule carries it).
    w: f64,
    /// `(1-u)^k`, or 1 where the weight already contains it.
    pk: f64,
    /// `ln(1-u)`.
    log1m: f64,
}

/// Evaluator for `G_1`, `G_R`, `G_∞` and their building blocks.
///
/// Immutable after construction and `Send + Sync`.
#[derive(Debug, Clone)]
pub struct Kernel {
    params: ModelParams,
    consts: GreenConstants,
    nodes: usize,
    k: f64,
    /// `∫_0^1 u^{-α/2}(1-u)^{k-1} du` evaluated with a Jacobi rule.
    deriv_moment: f64,
    single: Vec<Node>,
    heads: Vec<Vec<Node>>,
    mids: Vec<Vec<Node>>,
    tail_legendre: Vec<Node>,
    tail_jacobi: Vec<Node>,
    complement: Vec<Node>,
}

impl Kernel {
    /// Kernel with the standard constants and [`DEFAULT_NODES`] nodes.
    pub fn new(params: ModelParams) -> Self {
        Self::with_nodes(params, DEFAULT_NODES).expect("default node count is valid")
    }

    pub fn with_nodes(params: ModelParams, nodes: usize) -> Result<Self> {
        params.validate()?;
        Self::with_constants(params, GreenConstants::for_params(&params), nodes)
    }

    /// Kernel with caller-supplied constants (used for fault injection).
    pub fn with_constants(
        params: ModelParams,
        consts: GreenConstants,
        nodes: usize,
    ) -> Result<Self> {
        params.validate()?;
        if nodes < 2 {
            return Err(Error::param("nodes", "need at least 2 quadrature nodes"));
        }
        let half_alpha = params.alpha / 2.0;
        let k = (params.dim() - 2.0) / 2.0;
        let panel_nodes = nodes.div_ceil(2).max(8);

        let single_rule = JacobiRule::new(nodes, -half_alpha, k)?;
        let single = single_rule
            .nodes()
            .iter()
            .zip(single_rule.complements())
            .zip(single_rule.weights())
            .map(|((&u, &c), &w)| Node {
                u,
                w,
                pk: 1.0,
                log1m: c.ln(),
            })
            .collect();

        let head_rule = JacobiRule::new(panel_nodes, -half_alpha, 0.0)?;
        let heads = (0..=MAX_LEVEL)
            .map(|level| {
                let h = 0.25f64.powi(level as i32);
                let scale = h.powf(1.0 - half_alpha);
                head_rule
                    .nodes()
                    .iter()
                    .zip(head_rule.weights())
                    .map(|(&v, &w)| {
                        let u = h * v;
                        let log1m = (-u).ln_1p();
                        Node {
                            u,
                            w: w * scale,
                            pk: (k * log1m).exp(),
                            log1m,
                        }
                    })
                    .collect()
            })
            .collect();

        let leg = gauss_legendre(panel_nodes);
        let legendre_panel = |lo: f64, hi: f64| -> Vec<Node> {
            let len = hi - lo;
            leg.nodes()
                .iter()
                .zip(leg.weights())
                .map(|(&v, &w)| {
                    let u = lo + len * v;
                    let log1m = (-u).ln_1p();
                    Node {
                        u,
                        w: w * len * u.powf(-half_alpha),
                        pk: (k * log1m).exp(),
                        log1m,
                    }
                })
                .collect()
        };
        let mids = (0..=MAX_LEVEL)
            .map(|j| {
                if j == 0 {
                    Vec::new()
                } else {
                    legendre_panel(0.25f64.powi(j as i32 + 1), 0.25f64.powi(j as i32))
                }
            })
            .collect();
        let tail_legendre = legendre_panel(0.25, 1.0);

        let tj = JacobiRule::new(panel_nodes, 0.0, k)?;
        let tail_scale = 0.75f64.powf(1.0 + k);
        let tail_jacobi = tj
            .nodes()
            .iter()
            .zip(tj.complements())
            .zip(tj.weights())
            .map(|((&v, &c), &w)| {
                let u = 0.25 + 0.75 * v;
                Node {
                    u,
                    w: w * tail_scale * u.powf(-half_alpha),
                    pk: 1.0,
                    log1m: (0.75 * c).ln(),
                }
            })
            .collect();

        let cr = JacobiRule::new(nodes, half_alpha - 1.0, 0.0)?;
        let complement = cr
            .nodes()
            .iter()
            .zip(cr.weights())
            .map(|(&u, &w)| Node {
                u,
                w,
                pk: 1.0,
                log1m: 0.0,
            })
            .collect();

        let dr = JacobiRule::new(nodes, -half_alpha, k - 1.0)?;
        let deriv_moment = dr.integrate(|_| 1.0);

        Ok(Self {
            params,
            consts,
            nodes,
            k,
            deriv_moment,
            single,
            heads,
            mids,
            tail_legendre,
            tail_jacobi,
            complement,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn constants(&self) -> GreenConstants {
        self.consts
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    /// Panel depth used for a given `ρ`.
    fn level(rho: f64) -> usize {
        if rho <= 4.0 {
            return 0;
        }
        let j = ((rho / 4.0).ln() / 4f64.ln()).ceil();
        (j as usize).clamp(1, MAX_LEVEL)
    }

    /// `∫_0^1 u^{-α/2}(1-u)^k / (1+ρu) du`.
    fn inner_moment(&self, rho: f64) -> f64 {
        let level = Self::level(rho);
        let mut acc = CompensatedSum::new();
        if level == 0 {
            for nd in &self.single {
                acc.add(nd.w / (1.0 + rho * nd.u));
            }
            return acc.value();
        }
        for nd in &self.heads[level] {
            acc.add(nd.w * nd.pk / (1.0 + rho * nd.u));
        }
        for panel in &self.mids[1..level] {
            for nd in panel {
                acc.add(nd.w * nd.pk / (1.0 + rho * nd.u));
            }
        }
        for nd in &self.tail_jacobi {
            acc.add(nd.w / (1.0 + rho * nd.u));
        }
        acc.value()
    }

    /// `I₁` as a function of `ρ = s/t ∈ (0, ∞)`.
    pub fn inner_integral_ratio(&self, rho: f64) -> f64 {
        if rho == 0.0 {
            return 0.0;
        }
        if rho == f64::INFINITY {
            return 1.0 / self.consts.b;
        }
        let half_alpha = self.params.alpha / 2.0;
        // (ρ/(1+ρ))^k without overflow for large ρ.
        let pref = (-self.k * (1.0 / rho).ln_1p()).exp();
        pref * rho.powf(1.0 - half_alpha) * self.inner_moment(rho)
    }

    /// `I₁(s,t)`. `t = 0` returns the flagged limit `1/B`; `s = 0` returns 0.
    pub fn inner_integral(&self, c: KernelCoords) -> Result<InnerIntegral> {
        check_coords(c)?;
        if c.t == 0.0 {
            return Ok(InnerIntegral {
                value: 1.0 / self.consts.b,
                limit: true,
            });
        }
        Ok(InnerIntegral {
            value: self.inner_integral_ratio(c.s / c.t),
            limit: false,
        })
    }

    /// The boundary-correction bracket `1 - B I₁` as a function of `ρ`.
    pub fn bracket_ratio(&self, rho: f64) -> f64 {
        if rho <= 0.0 {
            return 1.0;
        }
        if rho == f64::INFINITY {
            return 0.0;
        }
        if rho <= 1.0 {
            return 1.0 - self.consts.b * self.inner_integral_ratio(rho);
        }
        let half_alpha = self.params.alpha / 2.0;
        let k = self.k;
        let level = Self::level(rho).max(1);
        let eps = 1.0 / rho;
        let log1p_eps = eps.ln_1p();

        // ∫_0^1 (1 - q^k) u^{-α/2} / (1+ρu) du with q = (1-u)/(1+ε).
        let mut d = CompensatedSum::new();
        let one_minus_qk = |nd: &Node| -(k * (nd.log1m - log1p_eps)).exp_m1();
        for nd in &self.heads[level] {
            d.add(nd.w * one_minus_qk(nd) / (1.0 + rho * nd.u));
        }
        for panel in &self.mids[1..level] {
            for nd in panel {
                d.add(nd.w * one_minus_qk(nd) / (1.0 + rho * nd.u));
            }
        }
        for nd in &self.tail_legendre {
            d.add(nd.w / (1.0 + rho * nd.u));
        }
        let qscale = (-k * log1p_eps).exp();
        for nd in &self.tail_jacobi {
            d.add(-qscale * nd.w / (1.0 + rho * nd.u));
        }
        // ∫_0^1 v^{α/2-1} / (1 + v/ρ) dv
        let e: f64 = self
            .complement
            .iter()
            .map(|nd| nd.w / (1.0 + nd.u * eps))
            .collect::<CompensatedSum>()
            .value();
        self.consts.b * (rho.powf(1.0 - half_alpha) * d.value() + rho.powf(-half_alpha) * e)
    }

    /// `1 - B I₁(s,t)`.
    pub fn bracket(&self, c: KernelCoords) -> Result<f64> {
        check_coords(c)?;
        if c.s == 0.0 && c.t == 0.0 {
            return Err(Error::Singularity("bracket undefined at s = t = 0"));
        }
        Ok(self.bracket_ratio(c.ratio()))
    }

    /// `H(s,t) = s^{-(n-α)/2} [1 - B I₁(s,t)]`, so that `G = A H`.
    pub fn h(&self, c: KernelCoords) -> Result<f64> {
        if c.s == 0.0 {
            return Err(Error::Singularity("H is singular at s = 0"));
        }
        let br = self.bracket(c)?;
        Ok(c.s.powf(-(self.params.dim() - self.params.alpha) / 2.0) * br)
    }

    /// `A H(s,t)`.
    pub fn green_from_coords(&self, c: KernelCoords) -> Result<f64> {
        Ok(self.consts.a * self.h(c)?)
    }

    /// Green's function of the given domain; zero when either point lies outside the open domain.
    pub fn green(&self, domain: DomainKind, x: &[f64], y: &[f64]) -> Result<f64> {
        check_dim(self.params.n, x)?;
        check_dim(self.params.n, y)?;
        domain.validate()?;
        if x == y {
            return Err(Error::Singularity("G(x, x) is infinite"));
        }
        if !domain.contains_open(x) || !domain.contains_open(y) {
            return Ok(0.0);
        }
        let s = dist_sq(x, y);
        let c = coords(domain, x, y)?;
        // Same value as A H(s_R, t_R) R^{α-n}, written in unscaled s.
        let br = self.bracket_ratio(c.ratio());
        Ok(self.consts.a * s.powf(-(self.params.dim() - self.params.alpha) / 2.0) * br)
    }

    /// Green's function of `B_R(P_R)`, `P_R = (0,…,0,R)`, computed as
    /// `R^{α-n} G_1((x-P_R)/R, (y-P_R)/R)`.
    pub fn green_scaled(&self, r: f64, x: &[f64], y: &[f64]) -> Result<f64> {
        check_dim(self.params.n, x)?;
        check_dim(self.params.n, y)?;
        let domain = DomainKind::BallRadiusR(r);
        domain.validate()?;
        if !domain.contains_closed(x) || !domain.contains_closed(y) {
            return Err(Error::Domain(
                "green_scaled needs points in the closed ball B_R(P_R)",
            ));
        }
        if x == y {
            return Err(Error::Singularity("G(x, x) is infinite"));
        }
        let n = self.params.n;
        let to_unit = |p: &[f64]| -> Vec<f64> {
            let mut q: Vec<f64> = p.iter().map(|v| v / r).collect();
            q[n - 1] -= 1.0;
            q
        };
        let (xu, yu) = (to_unit(x), to_unit(y));
        if norm_sq(&xu) >= 1.0 || norm_sq(&yu) >= 1.0 {
            return Ok(0.0);
        }
        // Domain factors from the cancellation-free form (2 R x_n - |x|²)/R².
        let fx = domain.boundary_factor(x);
        let fy = domain.boundary_factor(y);
        let s_unit = dist_sq(x, y) / (r * r);
        let g1 = self.consts.a
            * s_unit.powf(-(self.params.dim() - self.params.alpha) / 2.0)
            * self.bracket_ratio(s_unit / (fx * fy));
        Ok(r.powf(self.params.alpha - self.params.dim()) * g1)
    }

    /// `(∂H/∂s, ∂H/∂t)` from the analytic formulas
    ///
    /// ```text
    /// ∂I₁/∂s =  (n-2) t / (2 (s+t)^{n/2}) ∫_0^{s/t} (s-tb)^{(n-4)/2} b^{-α/2} db
    /// ∂I₁/∂t = -(n-2) s / (2 (s+t)^{n/2}) ∫_0^{s/t} (s-tb)^{(n-4)/2} b^{-α/2} db
    /// ```
    ///
    /// whose inner integral is `s^{k-1} ρ^{1-α/2} ∫_0^1 u^{-α/2}(1-u)^{k-1} du`.
    pub fn green_partials(&self, c: KernelCoords) -> Result<(f64, f64)> {
        check_coords(c)?;
        if c.s == 0.0 || c.t == 0.0 {
            return Err(Error::Singularity("partials need s > 0 and t > 0"));
        }
        let (s, t) = (c.s, c.t);
        let n = self.params.dim();
        let alpha = self.params.alpha;
        let rho = s / t;
        let st = s + t;
        let k = self.k;
        // k t s^{k-1} / (s+t)^{k+1} = k/(s+t) · t/(s+t) · (s/(s+t))^{k-1}
        let di_ds =
            k * self.deriv_moment * rho.powf(1.0 - alpha / 2.0) * (t / st) * (s / st).powf(k - 1.0)
                / st;
        let di_dt = -rho * di_ds;
        let s_pow = s.powf(-(n - alpha) / 2.0);
        let br = self.bracket_ratio(rho);
        let dh_ds = -(n - alpha) / 2.0 * s_pow / s * br - self.consts.b * s_pow * di_ds;
        let dh_dt = -self.consts.b * s_pow * di_dt;
        Ok((dh_ds, dh_dt))
    }

    /// `G_∞ s^{n/2} / t^{α/2}` as a function of `(s, t)`.
    pub fn asymptotic_ratio(&self, s: f64, t: f64) -> Result<f64> {
        let c = KernelCoords::new(s, t);
        check_coords(c)?;
        if s == 0.0 || t == 0.0 {
            return Err(Error::Singularity("asymptotic ratio needs s > 0 and t > 0"));
        }
        let rho = s / t;
        Ok(self.consts.a * rho.powf(self.params.alpha / 2.0) * self.bracket_ratio(rho))
    }

    /// `A s^{-(n-α)/2} [1 - B I₁]` from `s > 0`, `t ≥ 0` without argument checks.
    pub fn green_st(&self, s: f64, t: f64) -> f64 {
        let rho = if t > 0.0 { s / t } else { f64::INFINITY };
        self.consts.a
            * s.powf(-(self.params.dim() - self.params.alpha) / 2.0)
            * self.bracket_ratio(rho)
    }

    /// `A s^{-(n-α)/2}`, the free-space kernel that bounds `G`.
    pub fn riesz_bound(&self, s: f64) -> f64 {
        self.consts.a * s.powf(-(self.params.dim() - self.params.alpha) / 2.0)
    }
}

/// Closed-form inner derivative moment `B(1-α/2, k)`; test oracle for the Jacobi route.
pub fn derivative_moment_closed_form(params: &ModelParams) -> f64 {
    beta_fn(1.0 - params.alpha / 2.0, (params.dim() - 2.0) / 2.0)
}

fn check_coords(c: KernelCoords) -> Result<()> {
    if !(c.s >= 0.0 && c.t >= 0.0) || c.s.is_nan() || c.t.is_nan() {
        return Err(Error::param("coords", "s and t must be non-negative"));
    }
    Ok(())
}
