//! Exact computational models of pseudo-Kählerian holonomy algebras of signature (2, 2n+2).

// Index loops mirror the tensor formulas.
#![allow(clippy::needless_range_loop)]

pub mod ambient;
pub mod campaign;
pub mod curvature;
pub mod error;
pub mod family;
pub mod holonomy;
pub mod invariance;
pub mod lie;
pub mod metric;
pub mod linalg;
pub mod poly;
pub mod scalar;
pub mod standard;

pub use error::{ForgeError, Result};
