//! Quadrature grids on the unit ball and on axis-aligned slabs, and fields
//! sampled on them.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::params::{ball_volume, sphere_area, DomainKind};
use crate::quadrature::gauss_legendre;
use crate::sum::csum;

/// How the directions of a ball grid are chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum AngularScheme {
    /// Spherical Fibonacci lattice (n = 3 only); equal-area cells.
    Fibonacci,
    /// Orbits of generic points under the full icosahedral group (n = 3 only,
    /// 120 directions per orbit). The grid is then exactly invariant under
    /// that group.
    IcosahedralOrbit,
    /// Seeded uniformly random directions; any dimension.
    QuasiRandom { seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum GridKind {
    Ball {
        radial: usize,
        angular: usize,
        scheme: AngularScheme,
    },
    /// Midpoint cells of the box `[lo, hi]`.
    Slab {
        lo: Vec<f64>,
        hi: Vec<f64>,
        counts: Vec<usize>,
    },
}

/// Points, positive weights and volume-equivalent cell radii.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    kind: GridKind,
    n: usize,
    points: Vec<f64>,
    weights: Vec<f64>,
    cell_radius: Vec<f64>,
    /// Ball grids: radial nodes; slab grids: empty.
    radial: Vec<f64>,
    /// Ball grids: unit directions, flat.
    directions: Vec<f64>,
}

impl Grid {
    /// Tensor grid: Gauss–Legendre radii on `(0,1)` times `angular` directions.
    /// Point `(i, a)` has index `i * angular + a`.
    pub fn ball(n: usize, radial: usize, angular: usize, scheme: AngularScheme) -> Result<Self> {
        if n < 2 {
            return Err(Error::param("n", "ball grids need n >= 2"));
        }
        if radial < 2 || angular < 2 {
            return Err(Error::param("grid", "resolutions must be at least 2"));
        }
        let directions = match scheme {
            AngularScheme::Fibonacci => fibonacci_directions(n, angular)?,
            AngularScheme::IcosahedralOrbit => icosahedral_directions(n, angular)?,
            AngularScheme::QuasiRandom { seed } => random_directions(n, angular, seed),
        };
        let rule = gauss_legendre(radial);
        let ang_w = sphere_area(n) / angular as f64;
        let mut points = Vec::with_capacity(radial * angular * n);
        let mut weights = Vec::with_capacity(radial * angular);
        for (&r, &w) in rule.nodes().iter().zip(rule.weights()) {
            let wr = w * r.powi(n as i32 - 1) * ang_w;
            for d in directions.chunks_exact(n) {
                points.extend(d.iter().map(|v| r * v));
                weights.push(wr);
            }
        }
        Ok(Self::assemble(
            GridKind::Ball {
                radial,
                angular,
                scheme,
            },
            n,
            points,
            weights,
            rule.nodes().to_vec(),
            directions,
        ))
    }

    /// Midpoint cells of `[lo, hi]` with `counts[i]` cells along axis `i`.
    pub fn slab(lo: Vec<f64>, hi: Vec<f64>, counts: Vec<usize>) -> Result<Self> {
        let n = lo.len();
        if n == 0 || hi.len() != n || counts.len() != n {
            return Err(Error::Dimension {
                expected: n,
                found: hi.len().min(counts.len()),
            });
        }
        for i in 0..n {
            if !(hi[i] > lo[i]) || !lo[i].is_finite() || !hi[i].is_finite() {
                return Err(Error::param("slab", "each axis needs lo < hi"));
            }
            if counts[i] < 2 {
                return Err(Error::param("grid", "resolutions must be at least 2"));
            }
        }
        let h: Vec<f64> = (0..n).map(|i| (hi[i] - lo[i]) / counts[i] as f64).collect();
        let total: usize = counts.iter().product();
        let cell = h.iter().product::<f64>();
        let mut points = Vec::with_capacity(total * n);
        let mut idx = vec![0usize; n];
        for _ in 0..total {
            for i in 0..n {
                points.push(lo[i] + (idx[i] as f64 + 0.5) * h[i]);
            }
            // Last axis fastest.
            for i in (0..n).rev() {
                idx[i] += 1;
                if idx[i] < counts[i] {
                    break;
                }
                idx[i] = 0;
            }
        }
        Ok(Self::assemble(
            GridKind::Slab { lo, hi, counts },
            n,
            points,
            vec![cell; total],
            Vec::new(),
            Vec::new(),
        ))
    }

    fn assemble(
        kind: GridKind,
        n: usize,
        points: Vec<f64>,
        weights: Vec<f64>,
        radial: Vec<f64>,
        directions: Vec<f64>,
    ) -> Self {
        let vn = ball_volume(n);
        let cell_radius = weights
            .iter()
            .map(|w| (w / vn).powf(1.0 / n as f64))
            .collect();
        Self {
            kind,
            n,
            points,
            weights,
            cell_radius,
            radial,
            directions,
        }
    }

    /// The same grid with every point and direction multiplied by the
    /// orthogonal `n×n` matrix `q` (row-major).
    pub fn rotated(&self, q: &[f64]) -> Result<Self> {
        let n = self.n;
        if q.len() != n * n {
            return Err(Error::Dimension {
                expected: n * n,
                found: q.len(),
            });
        }
        let rot = |v: &[f64]| -> Vec<f64> {
            (0..n)
                .map(|i| (0..n).map(|j| q[i * n + j] * v[j]).sum())
                .collect()
        };
        let points = self.points.chunks_exact(n).flat_map(rot).collect();
        let directions = self.directions.chunks_exact(n).flat_map(rot).collect();
        Ok(Self {
            points,
            directions,
            ..self.clone()
        })
    }

    pub fn kind(&self) -> &GridKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.n..(i + 1) * self.n]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.points.chunks_exact(self.n)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn cell_radius(&self) -> &[f64] {
        &self.cell_radius
    }

    pub fn total_weight(&self) -> f64 {
        csum(self.weights.iter().copied())
    }

    /// The domain whose kernel a solve on this grid uses.
    pub fn domain(&self) -> DomainKind {
        match self.kind {
            GridKind::Ball { .. } => DomainKind::UnitBall,
            GridKind::Slab { .. } => DomainKind::HalfSpace,
        }
    }

    pub fn is_ball(&self) -> bool {
        matches!(self.kind, GridKind::Ball { .. })
    }

    /// Radial nodes of a ball grid (empty for slabs).
    pub fn radial_nodes(&self) -> &[f64] {
        &self.radial
    }

    pub fn angular_count(&self) -> usize {
        if self.radial.is_empty() {
            0
        } else {
            self.directions.len() / self.n
        }
    }

    pub fn direction(&self, a: usize) -> &[f64] {
        &self.directions[a * self.n..(a + 1) * self.n]
    }

    /// Index of point `(radial i, direction a)` on a ball grid.
    pub fn ball_index(&self, i: usize, a: usize) -> usize {
        i * self.angular_count() + a
    }
}

/// Values aligned with the points of a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Dimension {
                expected: grid.len(),
                found: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("values", "field values must be finite"));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Arc<Grid>) -> Self {
        let values = vec![0.0; grid.len()];
        Self { grid, values }
    }

    pub fn from_fn<F: FnMut(&[f64]) -> f64>(grid: Arc<Grid>, mut f: F) -> Result<Self> {
        let values = grid.points().map(&mut f).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    /// `∫ f` by the grid weights.
    pub fn integral(&self) -> f64 {
        csum(
            self.values
                .iter()
                .zip(self.grid.weights())
                .map(|(v, w)| v * w),
        )
    }
}

fn fibonacci_directions(n: usize, count: usize) -> Result<Vec<f64>> {
    if n != 3 {
        return Err(Error::param(
            "angular_scheme",
            "the Fibonacci lattice exists only for n = 3",
        ));
    }
    let golden = core::f64::consts::PI * (3.0 - 5f64.sqrt());
    let mut out = Vec::with_capacity(3 * count);
    for k in 0..count {
        let z = 1.0 - (2.0 * k as f64 + 1.0) / count as f64;
        let rho = (1.0 - z * z).sqrt();
        let phi = golden * k as f64;
        out.extend_from_slice(&[rho * phi.cos(), rho * phi.sin(), z]);
    }
    Ok(out)
}

type Mat3 = [[f64; 3]; 3];

fn axis_rotation(axis: [f64; 3], angle: f64) -> Mat3 {
    let norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    let [x, y, z] = [axis[0] / norm, axis[1] / norm, axis[2] / norm];
    let (s, c) = angle.sin_cos();
    let t = 1.0 - c;
    [
        [t * x * x + c, t * x * y - s * z, t * x * z + s * y],
        [t * x * y + s * z, t * y * y + c, t * y * z - s * x],
        [t * x * z - s * y, t * y * z + s * x, t * z * z + c],
    ]
}

fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut c = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

/// The 60 rotations of the icosahedron with vertices at cyclic permutations of `(0, ±1, ±φ)`.
fn icosahedral_rotations() -> Vec<Mat3> {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let gens = [
        axis_rotation([0.0, 1.0, phi], 2.0 * core::f64::consts::PI / 5.0),
        axis_rotation([1.0, 1.0, 1.0], 2.0 * core::f64::consts::PI / 3.0),
    ];
    let ident = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let mut group = vec![ident];
    let mut frontier = 0;
    while frontier < group.len() {
        let g = group[frontier];
        frontier += 1;
        for h in &gens {
            let m = mat_mul(h, &g);
            let known = group.iter().any(|e| {
                e.iter()
                    .flatten()
                    .zip(m.iter().flatten())
                    .all(|(a, b)| (a - b).abs() < 1e-9)
            });
            if !known {
                group.push(m);
            }
        }
    }
    group
}

fn icosahedral_directions(n: usize, count: usize) -> Result<Vec<f64>> {
    if n != 3 {
        return Err(Error::param(
            "angular_scheme",
            "icosahedral orbits exist only for n = 3",
        ));
    }
    if count % 120 != 0 {
        return Err(Error::param(
            "angular",
            "icosahedral grids need a multiple of 120 directions",
        ));
    }
    let rotations = icosahedral_rotations();
    debug_assert_eq!(rotations.len(), 60);
    let apply = |sign: f64, r: &Mat3, v: &[f64]| -> [f64; 3] {
        let mut w = [0.0; 3];
        for (wi, row) in w.iter_mut().zip(r) {
            *wi = sign * (row[0] * v[0] + row[1] * v[1] + row[2] * v[2]);
        }
        w
    };
    let dist2 = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>();
    // Greedy seeds from a fixed candidate lattice: each new orbit maximizes
    // the smallest gap to itself and to the orbits already placed. The
    // placed set is invariant, so one image of the candidate suffices.
    let candidates = fibonacci_directions(3, 1999)?;
    let mut out: Vec<f64> = Vec::with_capacity(3 * count);
    for _ in 0..count / 120 {
        let mut best = (f64::NEG_INFINITY, 0);
        for (c, v) in candidates.chunks_exact(3).enumerate() {
            let mut gap = f64::INFINITY;
            for sign in [1.0, -1.0] {
                // rotations[0] is the identity
                for (k, r) in rotations.iter().enumerate() {
                    if sign > 0.0 && k == 0 {
                        continue;
                    }
                    gap = gap.min(dist2(&apply(sign, r, v), v));
                }
            }
            for q in out.chunks_exact(3) {
                gap = gap.min(dist2(q, v));
            }
            if gap > best.0 {
                best = (gap, c);
            }
        }
        let v = &candidates[3 * best.1..3 * best.1 + 3];
        for sign in [1.0, -1.0] {
            for r in &rotations {
                out.extend_from_slice(&apply(sign, r, v));
            }
        }
    }
    Ok(out)
}

fn random_directions(n: usize, count: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n * count);
    let mut buf = vec![0.0; n];
    for _ in 0..count {
        loop {
            for b in buf.iter_mut() {
                *b = standard_normal(&mut rng);
            }
            let norm = buf.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 1e-12 {
                out.extend(buf.iter().map(|v| v / norm));
                break;
            }
        }
    }
    out
}

/// Box–Muller normal deviate.
pub(crate) fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * core::f64::consts::PI * u2).cos()
}
