//! Singular-integral rows on tensor ball grids.
//!
//! For a kernel `k(x, y)` that depends only on `|x|`, `|y|` and `x·y`, the
//! integral `∫_{B_1} k(x_i, y) g(y) dy` is split as
//!
//! ```text
//!   Σ_j Σ_{b ≠ a_i} W_{jb} k(x_i, y_{jb}) (g_{jb} - g_{j a_i})     angular, per shell
//! + Σ_{j ≠ s_i} w_j M(r_{s_i}, r_j) (g_{j a_i} - g_i)              radial, shell means
//! + g_i C(r_{s_i})                                                  constant part
//! ```
//!
//! where `a_i`, `s_i` are the direction and shell of `x_i`, `M(r, ρ)` is the
//! exact integral of `k(x, ·)` over the sphere of radius `ρ` (per unit radial
//! measure) and `C(r) = ∫_{B_1} k(x, y) dy`. Every summand vanishes at its own
//! singular point, so no self-cell model is needed.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::Result;
use crate::grid::Grid;
use crate::params::sphere_area;
use crate::sum::CompensatedSum;

#[derive(Debug, Clone)]
pub(crate) struct ShellCorrection {
    nr: usize,
    na: usize,
    constant: Vec<f64>,
    /// `w_j M(r_s, r_j)` for shells `s`, `j`; row-major `nr × nr`.
    radial: Vec<f64>,
}

impl ShellCorrection {
    /// `mean(r, ρ)` is the sphere integral `∫_{|y|=ρ} k(x, y) dS(y) / ρ^{n-1}` at `|x| = r`.
    pub(crate) fn new<M, C>(grid: &Grid, mean: M, constant: C) -> Result<Self>
    where
        M: Fn(f64, f64) -> Result<f64>,
        C: Fn(f64) -> Result<f64>,
    {
        let nr = grid.radial_nodes().len();
        let na = grid.angular_count();
        let ang = sphere_area(grid.dim()) / na as f64;
        let radii = grid.radial_nodes();
        let constant = radii
            .iter()
            .map(|&r| constant(r))
            .collect::<Result<Vec<_>>>()?;
        let mut radial = vec![0.0; nr * nr];
        for s in 0..nr {
            for j in 0..nr {
                if j != s {
                    // Radial weight w_j ρ_j^{n-1} recovered from the point weight.
                    let wj = grid.weights()[grid.ball_index(j, 0)] / ang;
                    radial[s * nr + j] = wj * mean(radii[s], radii[j])?;
                }
            }
        }
        Ok(Self {
            nr,
            na,
            constant,
            radial,
        })
    }

    /// Fill `row` so that `Σ_q row[q] g_q` is the integral at grid point `i`;
    /// `k(q)` is the kernel between points `i` and `q ≠ i`.
    pub(crate) fn row<K: Fn(usize) -> f64>(&self, grid: &Grid, i: usize, k: K, row: &mut [f64]) {
        let (nr, na) = (self.nr, self.na);
        let (si, ai) = (i / na, i % na);
        let mut shell_sums: Vec<CompensatedSum> = (0..nr).map(|_| CompensatedSum::new()).collect();
        let weights = grid.weights();
        for q in 0..row.len() {
            if q % na == ai {
                row[q] = 0.0;
                continue;
            }
            let v = weights[q] * k(q);
            row[q] = v;
            shell_sums[q / na].add(v);
        }
        let mut diag = CompensatedSum::new();
        diag.add(self.constant[si]);
        diag.add(-shell_sums[si].value());
        for j in 0..nr {
            if j != si {
                let rad = self.radial[si * nr + j];
                row[j * na + ai] = rad - shell_sums[j].value();
                diag.add(-rad);
            }
        }
        row[i] = diag.value();
    }
}
