//! Torsion algebra, interval decompositions and oscillatory extension
//! operators for polynomial curves in `R^d` carrying affine arclength measure.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure
//! function of its inputs; IO, file formats and parallel field evaluation
//! live in the `torsionlab` companion crate.
//!
//! Module map:
//!
//! * [`poly`]: univariate real polynomials, complex roots, polynomial-matrix
//!   determinants and a tiny expression parser.
//! * [`curve`]: polynomial curves, torsion `L = det(γ', …, γ^(d))`, affine
//!   arclength, Jacobians, affine maps, normalization and offspring curves.
//! * [`decompose`]: nearest-zero cells, gap/dyadic splitting, the combined
//!   curve decomposition and dyadic torsion level sets.
//! * [`lab`]: sampled checks of the geometric inequality, offspring torsion,
//!   injectivity, frequency bands, multilinear forms and decay fits.
//! * [`oscillatory`]: extension operators on quadrature grids, grid norms,
//!   Knapp examples, stationary phase and norm lower-bound search.
//! * [`exponents`]: exact rational exponent arithmetic.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop, clippy::too_many_arguments)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod curve;
pub mod decompose;
mod error;
pub mod exec;
pub mod exponents;
pub mod fit;
pub mod interval;
pub mod lab;
pub mod linalg;
pub mod oscillatory;
pub mod poly;
pub mod quad;
pub mod rng;

pub use num_complex::Complex64;

pub use curve::{AffineMap, OffspringSpec, PolyCurve};
pub use decompose::{CurveDecomposition, DecompositionPiece};
pub use error::{Error, Result};
pub use exponents::{ExponentPair, ExtRational, TorsionProfile};
pub use interval::Interval;
pub use oscillatory::GridSpec;
pub use poly::{ComplexRootSet, Polynomial};
