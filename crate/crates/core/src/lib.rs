//! Explicit Green's functions of the fractional Laplacian `(-Δ)^{α/2}` on the
//! unit ball and on the half-space, together with the machinery that uses them:
//! endpoint-singular quadrature, reflections and Kelvin inversions, discretized
//! nonlocal operators, linear and power-nonlinearity integral-equation solvers,
//! moving-plane diagnostics, the half-space Liouville exponent cascade, and
//! seeded property suites that certify the kernel inequalities numerically.
//!
//! The crate is `no_std` + `alloc`. The default `std` feature only switches the
//! error types to `std::error::Error`; `parallel` enables row-parallel kernel
//! assembly through rayon.
//!
//! ```
//! use fracgreen_core::{DomainKind, Kernel, ModelParams};
//!
//! let params = ModelParams::new(3, 1.0)?;
//! let kernel = Kernel::new(params);
//! let g = kernel.green(DomainKind::UnitBall, &[0.3, 0.0, 0.0], &[-0.2, 0.1, 0.0])?;
//! assert!(g > 0.0);
//! # Ok::<(), fracgreen_core::Error>(())
//! ```

#![cfg_attr(not(feature = "std"), no_std)]
// Validation writes `!(x > 0.0)` on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

mod error;
pub mod geom;
pub mod grid;
pub mod interp;
pub mod kernel;
pub mod ops;
mod par;
pub mod params;
pub mod quadrature;
mod shell;
pub mod solver;
pub mod sum;
pub mod verify;

pub use error::{Error, Result};
pub use geom::{Hyperplane, InversionCenter};
pub use grid::{AngularScheme, Field, Grid, GridKind};
pub use kernel::{GreenConstants, Kernel, KernelCoords};
pub use params::{DomainKind, ModelParams};
pub use quadrature::{adaptive_quad, jacobi_rule, JacobiRule};
