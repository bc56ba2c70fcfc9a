//! Compile unitary matrices into sequences of elementary quantum operations
//! (SEOs) through a binary tree of cosine-sine decompositions.
//!
//! Bit 0 is the least significant bit of a state index, and programs are
//! listed in the order their instructions act on a state.

pub mod bits;
pub mod central;
pub mod cli;
pub mod compiler;
pub mod decompositions;
pub mod error;
pub mod matrix;
pub mod reference;
pub mod seo;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use matrix::{ComplexMatrix, Tolerance};
pub use compiler::{compile, CompileOptions, PermSearch};
pub use seo::{Instruction, Program};
