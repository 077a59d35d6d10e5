use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::sum::CompensatedSum;

/// Gauss–Jacobi rule on `(0, 1)` for the weight `u^exp_at_zero (1-u)^exp_at_one`.
///
/// `m` nodes integrate `u^a (1-u)^b q(u)` exactly for polynomials `q` of
/// degree `2m - 1`. Nodes are stored together with their complements `1 - u`
/// so that factors like `(1-u)^k` near the right endpoint keep full relative
/// precision.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiRule {
    nodes: Vec<f64>,
    complements: Vec<f64>,
    weights: Vec<f64>,
    exp_at_zero: f64,
    exp_at_one: f64,
}

/// Builds an `m`-node Gauss–Jacobi rule on `(0,1)`.
pub fn jacobi_rule(m: usize, exp_at_zero: f64, exp_at_one: f64) -> Result<JacobiRule> {
    JacobiRule::new(m, exp_at_zero, exp_at_one)
}

/// Gauss–Legendre rule on `(0,1)`.
pub fn gauss_legendre(m: usize) -> JacobiRule {
    JacobiRule::new(m, 0.0, 0.0).expect("Legendre exponents are admissible")
}

impl JacobiRule {
    pub fn new(m: usize, exp_at_zero: f64, exp_at_one: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::param("m", "node count must be at least 1"));
        }
        for (name, e) in [("exp_at_zero", exp_at_zero), ("exp_at_one", exp_at_one)] {
            if !(e > -1.0) || !e.is_finite() {
                return Err(Error::param(name, "exponent must be finite and > -1"));
            }
        }
        // Work on [-1, 1] with weight (1-x)^a (1+x)^b, x = 2u - 1.
        let a = exp_at_one;
        let b = exp_at_zero;
        let xs = golub_welsch_nodes(m, a, b);
        let log_scale = libm::lgamma(m as f64 + a + 1.0) + libm::lgamma(m as f64 + b + 1.0)
            - libm::lgamma(m as f64 + a + b + 1.0)
            - libm::lgamma(m as f64 + 1.0);
        let scale = log_scale.exp();

        let mut nodes = Vec::with_capacity(m);
        let mut complements = Vec::with_capacity(m);
        let mut weights = Vec::with_capacity(m);
        for x0 in xs {
            let mut x = x0;
            // Newton polish; GW eigenvalues are already close.
            for _ in 0..3 {
                let (p, dp) = jacobi_p_and_derivative(m, a, b, x);
                let step = p / dp;
                x -= step;
                if step.abs() <= 4.0 * f64::EPSILON * x.abs().max(1e-300) {
                    break;
                }
            }
            x = x.clamp(-1.0, 1.0);
            let (_, dp) = jacobi_p_and_derivative(m, a, b, x);
            // On (0,1) the 2^{a+b+1} factors of the [-1,1] weight cancel.
            let w = scale / ((1.0 - x) * (1.0 + x) * dp * dp);
            nodes.push(0.5 * (1.0 + x));
            complements.push(0.5 * (1.0 - x));
            weights.push(w);
        }
        // Pin the zeroth moment to B(b+1, a+1); removes the drift of large rules.
        let mass =
            (libm::lgamma(a + 1.0) + libm::lgamma(b + 1.0) - libm::lgamma(a + b + 2.0)).exp();
        let total: f64 = crate::sum::csum(weights.iter().copied());
        let fix = mass / total;
        for w in &mut weights {
            *w *= fix;
        }
        Ok(Self {
            nodes,
            complements,
            weights,
            exp_at_zero,
            exp_at_one,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// `1 - u` for each node, computed without cancellation.
    pub fn complements(&self) -> &[f64] {
        &self.complements
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn exp_at_zero(&self) -> f64 {
        self.exp_at_zero
    }

    pub fn exp_at_one(&self) -> f64 {
        self.exp_at_one
    }

    /// `∫_0^1 u^a (1-u)^b f(u) du`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        let mut acc = CompensatedSum::new();
        for (&u, &w) in self.nodes.iter().zip(&self.weights) {
            acc.add(w * f(u));
        }
        acc.value()
    }

    /// `∫_lo^hi (x-lo)^a (hi-x)^b f(x) dx`.
    pub fn integrate_on<F: FnMut(f64) -> f64>(&self, lo: f64, hi: f64, mut f: F) -> f64 {
        let h = hi - lo;
        let jac = h.powf(self.exp_at_zero + self.exp_at_one + 1.0);
        jac * self.integrate(|u| f(lo + h * u))
    }
}

/// Jacobi polynomial `P_m^{(a,b)}(x)` and its derivative via the three-term recurrence.
fn jacobi_p_and_derivative(m: usize, a: f64, b: f64, x: f64) -> (f64, f64) {
    let ab = a + b;
    let mut p_prev = 1.0;
    let mut p = 0.5 * (a - b + (ab + 2.0) * x);
    if m == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=m {
        let k = k as f64;
        let c = 2.0 * k + ab;
        let a1 = 2.0 * k * (k + ab) * (c - 2.0);
        let a2 = (c - 1.0) * (a * a - b * b);
        let a3 = (c - 2.0) * (c - 1.0) * c;
        let a4 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * c;
        let next = ((a2 + a3 * x) * p - a4 * p_prev) / a1;
        p_prev = p;
        p = next;
    }
    let mf = m as f64;
    let c = 2.0 * mf + ab;
    let dp = (mf * (a - b - c * x) * p + 2.0 * (mf + a) * (mf + b) * p_prev) / (c * (1.0 - x * x));
    (p, dp)
}

/// Eigenvalues of the Jacobi matrix of the weight `(1-x)^a (1+x)^b`, ascending.
fn golub_welsch_nodes(m: usize, a: f64, b: f64) -> Vec<f64> {
    let ab = a + b;
    let mut diag = vec![0.0; m];
    let mut off = vec![0.0; m];
    for (k, d) in diag.iter_mut().enumerate() {
        let kf = k as f64;
        let c = 2.0 * kf + ab;
        *d = if k == 0 {
            (b - a) / (ab + 2.0)
        } else {
            (b * b - a * a) / (c * (c + 2.0))
        };
    }
    for (k, o) in off.iter_mut().enumerate().skip(1) {
        let kf = k as f64;
        let c = 2.0 * kf + ab;
        let beta = if k == 1 {
            4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab))
        } else {
            4.0 * kf * (kf + a) * (kf + b) * (kf + ab) / (c * c * (c + 1.0) * (c - 1.0))
        };
        *o = beta.sqrt();
    }
    tridiagonal_eigenvalues(&mut diag, &mut off);
    diag.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
    diag
}

/// Implicit QL on a symmetric tridiagonal matrix. `off[k]` couples rows `k-1`
/// and `k`; on return `diag` holds the eigenvalues.
fn tridiagonal_eigenvalues(diag: &mut [f64], off: &mut [f64]) {
    let n = diag.len();
    if n < 2 {
        return;
    }
    for i in 1..n {
        off[i - 1] = off[i];
    }
    off[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter < 60, "tridiagonal QL failed to converge");
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + off[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * off[i];
                let bb = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    off[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * bb;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - bb;
            }
            if underflow {
                continue;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }
}
