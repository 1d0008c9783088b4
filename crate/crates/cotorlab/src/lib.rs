//! Exact-arithmetic workbench for graded coalgebra homology, formal group
//! laws, and truncated Witt-ring representation theory.
//!
//! Everything here computes over `F_q` or `Z/p^N` with exact integer
//! arithmetic: there is no floating point and no randomized algorithm on
//! the result path, so identical inputs always produce identical outputs.
//!
//! The crate is organized bottom-up:
//!
//! - [`coeffring`]: finite fields, truncated Witt rings, graded sparse
//!   linear algebra, Smith normal form, cochain complexes.
//! - [`coalgebra`]: graded coalgebras and comodules, the reduced cobar
//!   complex, derived cotensor groups, and cotensor powers.
//! - [`annular`]: filtration strata of cotensor powers, tangent-line
//!   comodules, the associated second-page assembly, and Koszul-type
//!   round-trip checks.
//! - [`fgl`]: one-dimensional formal group laws of finite height,
//!   multiplication-by-p-power series, and their torsion coalgebras.
//! - [`stabilizer`]: the twisted matrix algebra acting on a height-d
//!   formal group, with determinant and top-exterior-power actions.
//! - [`dieudonne`]: semilinear module data for the torsion coalgebras and
//!   exterior powers thereof.
//! - [`prolim`]: towers of comodules, their limits, derived limits, and
//!   a Mittag-Leffler detector.
//!
//! Computations that iterate over independent internal degrees accept an
//! [`par::ExecMode`] selecting a sequential or work-stealing parallel
//! driver; both produce bit-identical results.

// Dense linear algebra walks several arrays with one index; iterator
// rewrites of those loops hide the row/column bookkeeping they share.
#![allow(clippy::needless_range_loop)]

pub mod annular;
pub mod coalgebra;
pub mod dieudonne;
pub mod fgl;
pub mod prolim;
pub mod stabilizer;
pub mod coeffring;
pub mod error;
pub mod par;

pub use error::{Error, Result};
pub use par::ExecMode;
