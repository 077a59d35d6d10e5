use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::grid::{Field, Grid, GridKind};
use crate::kernel::Kernel;
use crate::ops::sphere_mean_quad;
use crate::params::{dist_sq, sphere_area, DomainKind};
use crate::shell::ShellCorrection;
use crate::sum::{cdot, CompensatedSum};

/// `∫_{|y|=ρ} G_1(x, y) dS(y) / ρ^{n-1}` for `|x| = r ≠ ρ`.
pub fn green_sphere_mean(kernel: &Kernel, r: f64, rho: f64) -> Result<f64> {
    let params = kernel.params();
    let c = (params.dim() - 3.0) / 2.0;
    let t = (1.0 - r * r) * (1.0 - rho * rho);
    let f = |mu: f64| {
        let s = (r * r + rho * rho - 2.0 * r * rho * mu).max(0.0);
        kernel.green_st(s, t) * (1.0 - mu * mu).max(0.0).powf(c)
    };
    Ok(sphere_area(params.n - 1) * sphere_mean_quad(f, r, rho)?)
}

enum RowRule {
    Ball(ShellCorrection),
    /// Self cell `A σ_{n-1} r^α / α` from the `s → 0` form of the kernel.
    Slab(Vec<f64>),
}

/// Row generator for `u(x_i) = ∫ G(x_i, y) g(y) dy` on a grid.
struct Rows<'a> {
    kernel: &'a Kernel,
    grid: &'a Grid,
    factor: Vec<f64>,
    domain: DomainKind,
    rule: RowRule,
}

impl<'a> Rows<'a> {
    fn new(kernel: &'a Kernel, grid: &'a Grid) -> Result<Self> {
        let params = kernel.params();
        if grid.dim() != params.n {
            return Err(Error::Dimension {
                expected: params.n,
                found: grid.dim(),
            });
        }
        let domain = grid.domain();
        if let GridKind::Slab { lo, .. } = grid.kind() {
            if lo[lo.len() - 1] < 0.0 {
                return Err(Error::Domain("half-space slabs must lie in x_n >= 0"));
            }
        }
        let factor: Vec<f64> = grid.points().map(|p| domain.boundary_factor(p)).collect();
        let rule = if grid.is_ball() {
            let kappa = params.torsion_constant();
            let half_alpha = params.alpha / 2.0;
            RowRule::Ball(ShellCorrection::new(
                grid,
                |r, rho| green_sphere_mean(kernel, r, rho),
                |r| Ok(kappa * (1.0 - r * r).powf(half_alpha)),
            )?)
        } else {
            let a = kernel.constants().a;
            let sa = sphere_area(params.n);
            RowRule::Slab(
                grid.cell_radius()
                    .iter()
                    .map(|r| a * sa * r.powf(params.alpha) / params.alpha)
                    .collect(),
            )
        };
        Ok(Self {
            kernel,
            grid,
            factor,
            domain,
            rule,
        })
    }

    fn pair(&self, i: usize, q: usize) -> f64 {
        let s = dist_sq(self.grid.point(i), self.grid.point(q));
        let t = match self.domain {
            DomainKind::HalfSpace => 4.0 * self.factor[i] * self.factor[q],
            _ => self.factor[i] * self.factor[q],
        };
        self.kernel.green_st(s, t)
    }

    fn row(&self, i: usize, row: &mut [f64]) {
        match &self.rule {
            RowRule::Ball(corr) => corr.row(self.grid, i, |q| self.pair(i, q), row),
            RowRule::Slab(cells) => {
                for (q, (r, w)) in row.iter_mut().zip(self.grid.weights()).enumerate() {
                    *r = if q == i {
                        cells[i]
                    } else {
                        w * self.pair(i, q)
                    };
                }
            }
        }
    }
}

/// `u(x_i) = ∫ G(x_i, y) g(y) dy`, with the domain taken from the grid (unit
/// ball for ball grids, half-space for slabs in `x_n ≥ 0`).
///
/// Ball grids remove the kernel singularity shell by shell and add back the
/// exact torsion `∫ G_1(x, y) dy = κ (1-|x|²)^{α/2}`; slab grids use the
/// self-cell value of the `s → 0` form `A s^{-(n-α)/2}`.
pub fn dirichlet_solve(kernel: &Kernel, g: &Field) -> Result<Field> {
    let grid = g.grid().clone();
    let rows = Rows::new(kernel, &grid)?;
    let vals = g.values();
    let out = crate::par::map_indices(grid.len(), |i| {
        let mut row = vec![0.0; grid.len()];
        rows.row(i, &mut row);
        cdot(&row, vals)
    });
    Field::new(grid, out)
}

/// Assembled matrix of [`dirichlet_solve`] for repeated application.
#[derive(Debug, Clone)]
pub struct GreenOperator {
    grid: Arc<Grid>,
    matrix: Vec<f64>,
}

impl GreenOperator {
    pub fn assemble(kernel: &Kernel, grid: Arc<Grid>) -> Result<Self> {
        let rows = Rows::new(kernel, &grid)?;
        let m = grid.len();
        let blocks = crate::par::map_indices(m, |i| {
            let mut row = vec![0.0; m];
            rows.row(i, &mut row);
            row
        });
        let matrix = blocks.concat();
        Ok(Self { grid, matrix })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let m = self.len();
        &self.matrix[i * m..(i + 1) * m]
    }

    pub fn apply(&self, g: &[f64]) -> Vec<f64> {
        crate::par::map_indices(self.len(), |i| cdot(self.row(i), g))
    }

    pub fn apply_field(&self, g: &Field) -> Result<Field> {
        if !Arc::ptr_eq(g.grid(), &self.grid) && **g.grid() != *self.grid {
            return Err(Error::param("field", "field lives on a different grid"));
        }
        Field::new(self.grid.clone(), self.apply(g.values()))
    }

    /// Shell-averaged operator on a ball grid: entry `(s, j)` is the mean over
    /// points of shell `s` of the summed coefficients on shell `j`.
    pub(crate) fn radial_reduction(&self) -> Option<Vec<f64>> {
        let nr = self.grid.radial_nodes().len();
        let na = self.grid.angular_count();
        if !self.grid.is_ball() {
            return None;
        }
        let mut out = vec![0.0; nr * nr];
        for s in 0..nr {
            for j in 0..nr {
                let mut acc = CompensatedSum::new();
                for a in 0..na {
                    let row = self.row(s * na + a);
                    for b in 0..na {
                        acc.add(row[j * na + b]);
                    }
                }
                out[s * nr + j] = acc.value() / na as f64;
            }
        }
        Some(out)
    }
}
