//! Waring decompositions of binary forms and ternary quartics.
//!
//! A form `f` is written as `sum c_i l_i^d` with linear forms `l_i`. Binary
//! forms are handled by Sylvester's algorithm; ternary quartics by a
//! constructive search through apolar products of linear forms, which always
//! returns at most seven terms.

pub mod apolarity;
pub mod binary;
pub mod cli;
pub mod decomposition;
pub mod error;
pub mod numerics;
pub mod oracle;
pub mod ternary;

pub use apolarity::{apolar_space, contract, pair, polarization, power, DualForm, Form};
pub use decomposition::{Decomposition, Provenance, Term};
pub use error::{Error, Result};
pub use numerics::{Scalar, Tolerance};
