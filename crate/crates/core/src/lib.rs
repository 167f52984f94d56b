//! Schur-class functions on the symmetrized skew bidisc
//! `G_r = {(λ₁ + rλ₂, rλ₁λ₂) : λ₁, λ₂ ∈ D}` and its core `r·G`.
//!
//! The crate evaluates unitary-colligation realizations, synthesizes models
//! on `r·G` from σ-symmetric bidisc models, and numerically certifies the
//! kernel factorizations, model identities and norm bounds that tie them
//! together.

pub mod catalog;
pub mod cli;
pub mod colligation;
pub mod domains;
pub mod error;
pub mod io;
pub mod kernels;
pub mod linalg;
pub mod realization;
pub mod synthesis;

pub use error::{Error, Result};
