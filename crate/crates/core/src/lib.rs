//! Edmundson-Lah-Ribarič type bounds for 3-convex functions.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is pure numerics:
//!
//! - [`divided_diff`]: recursive and confluent third-order divided differences,
//!   plus a sampling certificate for 3-convexity.
//! - [`functional`]: the discrete positive linear functional `A` with `A(1) = 1`.
//! - [`elr`]: the three bound pairs for the ELR difference and the Jensen gap.
//! - [`divergence`]: the generalized Csiszár f-divergence and its bounds.
//! - [`zipf`]: Zipf-Mandelbrot laws and the specialised divergence bounds.
//! - [`expconv`]: the functionals Γ₁..Γ₁₀, exponential convexity and log-convexity checks.
//! - [`means`]: the families Υ₁, Υ₂, mean-value points and Stolarsky-type means.
//!
//! ```
//! use elr_core::{bundle::FunctionBundle, elr, functional::DiscreteFunctional, Direction};
//!
//! let point_mass = DiscreteFunctional::new(vec![0.5], vec![1.0]).unwrap();
//! let cube = FunctionBundle::monomial(3);
//! let report = elr::bounds_secant(&point_mass, &cube, 0.0, 1.0, Direction::ThreeConvex).unwrap();
//! assert!((report.lower - 0.25).abs() < 1e-12);
//! assert!((report.mid - 0.375).abs() < 1e-12);
//! assert!((report.upper - 0.5).abs() < 1e-12);
//! ```

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod bundle;
pub mod divergence;
pub mod divided_diff;
pub mod elr;
pub mod error;
pub mod expconv;
pub mod functional;
pub mod means;
mod special;
pub mod zipf;

pub use bundle::FunctionBundle;
pub use divided_diff::{ConvexityCertificate, Verdict};
pub use elr::{BoundKind, BoundReport, Direction, Orientation};
pub use error::{Error, Result};
pub use functional::DiscreteFunctional;
