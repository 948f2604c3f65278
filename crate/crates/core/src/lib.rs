//! Numerical laboratory for SL(2,R) harmonic analysis and the Teichmüller
//! flow on square-tiled surfaces.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod lattice;
pub mod origami;
pub mod quadrature;
pub mod sl2;
pub mod specfit;
pub mod special;
pub mod spherical;
pub mod transforms;

pub use error::{Error, Result};
