//! Non-Abelian geometric phases of two-photon states evolving under passive
//! linear optics.
//!
//! A polarization-dependent two-channel interferometer acts on the four optical
//! modes `aH, aV, bH, bV` as an element of U(4). On two-photon states this is the
//! ten-dimensional symmetric representation, and the four states with one photon
//! per spatial channel form a dual-rail two-qubit space. Local operations
//! (block-diagonal U(2) x U(2)) act as gauge transformations on that space; closed
//! pseudotime paths through the coset U(4)/LO carry a U(4)-valued holonomy.
//!
//! Layout:
//! - [`fockspace`]: modes, two-photon basis, the sixteen u(4) generators and the
//!   lift of U(4) onto the two-photon space.
//! - [`lie`]: matrix exponentials, Euler parametrization of local operations, the
//!   `P0` family and Maurer-Cartan forms.
//! - [`decompose`]: cosine-sine and `K P0 K'` decompositions, locality checks and
//!   compilation of one-parameter subgroups into phase shifts plus fixed optics.
//! - [`holonomy`]: piecewise paths, gauge potential, Wilson loop, closure solver
//!   and the triangle-path construction.
//! - [`pathio`]: path-spec parsing, presets, reports and CSV output.

pub mod decompose;
pub mod error;
pub mod exec;
pub mod fockspace;
pub mod holonomy;
pub mod lie;
pub mod linalg;
pub mod pathio;
pub mod sampling;

pub use error::{Error, Result};
pub use linalg::{Mat10, Mat2, Mat4, C64};
