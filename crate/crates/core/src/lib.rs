//! Exact p-adic arithmetic and finite-volume p-adic Gibbs measures for the
//! nearest-neighbour lambda-model, and its Ising specialisation, on Cayley trees.

pub mod cli;
pub mod config;
pub mod error;
pub mod ising;
pub mod model;
pub mod padic;
pub mod recursion;
pub mod tree;

pub use error::{Error, PadicError, Result};
pub use padic::{NormValue, Order, Padic};
pub use tree::{TreeAddress, TreeSlice};
