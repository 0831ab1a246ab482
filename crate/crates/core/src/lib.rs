//! Smoothed analysis of conic condition numbers.
//!
//! The crate evaluates the closed-form tail, expectation and tube-volume
//! bounds for conic condition numbers whose ill-posed set lies in a real
//! algebraic variety of bounded degree, and checks them empirically:
//!
//! * [`sphere_geom`]: volumes of spheres, balls and subsphere tubes, the
//!   trigonometric moment integrals `J_{p,k}`, kinematic constants and
//!   distances on `S^p`.
//! * [`sampling`]: reproducible random streams, uniform points on spheres
//!   and caps, Haar rotations.
//! * [`bounds`]: the theoretical bounds and their per-problem corollaries.
//! * [`condition`]: condition numbers for matrix inversion, Moore–Penrose
//!   inversion, eigenvalues and polynomial systems under the Weyl product.
//! * [`tubes`]: varieties with distance oracles, Monte Carlo tube/cap
//!   ratios, curvature integrals of geodesic spheres and the kinematic and
//!   tube-volume verifications.
//! * [`cli`]: the batch experiment runner behind the `conicond` binary.

pub mod bounds;
pub mod cli;
pub mod condition;
pub mod error;
pub mod mc;
pub mod quadrature;
pub mod sampling;
pub mod sphere_geom;
pub mod tubes;

pub use error::{Error, Result};
