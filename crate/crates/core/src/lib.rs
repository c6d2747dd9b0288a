//! Numerical laboratory for Fourier decay of measures on restricted
//! `(d,k)`-sets: sets containing a unit `k`-cube along every subspace of an
//! orientation family `Γ ⊆ G(d,k)`.
//!
//! The pieces:
//!
//! * [`grassmannian`]: frames, the sphere-Hausdorff metric, invariant sampling, greedy nets;
//! * [`bump`]: the mollifier `φ` and its Fourier transform;
//! * [`orientation`]: discrete orientation measures and translation assignment;
//! * [`scaling`]: slab masses `γ(S_{ξ,η})` and fitted scaling exponents;
//! * [`kakeya_measure`]: exact `μ̂` through the product of `φ̂` factors;
//! * [`decay`]: shell maxima and Fourier-decay exponent fits;
//! * [`cli`]: config-driven experiment runner.

// `!(x > 0.0)` is used throughout on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bump;
pub mod cli;
pub mod decay;
pub mod error;
pub mod fit;
pub mod grassmannian;
pub mod kakeya_measure;
pub mod linalg;
pub mod orientation;
pub mod quadrature;
pub mod rng;
pub mod scaling;
pub mod sphere_points;

pub use error::{Error, Result};
