//! Quadrature primitives: Gauss–Jacobi rules for endpoint-singular weights,
//! an adaptive Gauss–Kronrod integrator used as an independent oracle, and
//! product rules on spheres.

mod adaptive;
mod jacobi;
mod sphere;

pub use adaptive::{adaptive_quad, AdaptiveQuad, Estimate};
pub use jacobi::{gauss_legendre, jacobi_rule, JacobiRule};
pub use sphere::SphereRule;
