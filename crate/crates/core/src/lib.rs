//! Spectral toolkit for alpha-modulation norms and nonlinear Schrödinger
//! experiments on a periodic box.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod construct;
pub mod decomp;
pub mod error;
pub mod estimates;
pub mod evolve;
pub mod fit;
pub mod grid;
pub mod norms;
pub mod quadrature;
pub mod report;

pub use error::{BlowupCause, Error, Result};
pub use grid::{Field, FieldSpec, GridSpec, SpectralField};
