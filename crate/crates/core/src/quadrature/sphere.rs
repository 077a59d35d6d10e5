use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use super::jacobi::JacobiRule;

/// Product quadrature on the unit sphere `S^{d-1} ⊂ R^d`.
///
/// The last coordinate is the polar axis. Each polar angle uses a
/// Gauss–Jacobi rule in `μ = cos θ` with weight `(1-μ²)^{(k-3)/2}`, and the
/// final circle uses the (spectrally accurate) midpoint rule.
#[derive(Debug, Clone)]
pub struct SphereRule {
    dim: usize,
    directions: Vec<f64>,
    weights: Vec<f64>,
}

impl SphereRule {
    /// `polar` nodes per polar angle, `azimuth` nodes on the circle.
    pub fn product(dim: usize, polar: usize, azimuth: usize) -> Self {
        assert!(dim >= 2, "sphere rule needs dimension >= 2");
        assert!(polar >= 1 && azimuth >= 1);
        let mut directions = Vec::with_capacity(azimuth * 2);
        let mut weights = Vec::with_capacity(azimuth);
        let dphi = 2.0 * PI / azimuth as f64;
        for j in 0..azimuth {
            let phi = (j as f64 + 0.5) * dphi;
            directions.push(phi.cos());
            directions.push(phi.sin());
            weights.push(dphi);
        }
        let mut rule = SphereRule {
            dim: 2,
            directions,
            weights,
        };
        while rule.dim < dim {
            rule = rule.lift(polar);
        }
        rule
    }

    fn lift(&self, polar: usize) -> Self {
        let d = self.dim + 1;
        let c = (d as f64 - 3.0) / 2.0;
        let jr = JacobiRule::new(polar, c, c).expect("admissible exponents");
        let mass = 2f64.powf(2.0 * c + 1.0);
        let mut directions = Vec::with_capacity(self.len() * polar * d);
        let mut weights = Vec::with_capacity(self.len() * polar);
        for ((&u, &cu), &wu) in jr.nodes().iter().zip(jr.complements()).zip(jr.weights()) {
            let mu = u - cu;
            let sin_t = 2.0 * (u * cu).sqrt();
            for (i, &w) in self.weights.iter().enumerate() {
                let base = &self.directions[i * self.dim..(i + 1) * self.dim];
                directions.extend(base.iter().map(|x| x * sin_t));
                directions.push(mu);
                weights.push(w * wu * mass);
            }
        }
        SphereRule {
            dim: d,
            directions,
            weights,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn direction(&self, i: usize) -> &[f64] {
        &self.directions[i * self.dim..(i + 1) * self.dim]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.directions
            .chunks_exact(self.dim)
            .zip(self.weights.iter().copied())
    }
}
