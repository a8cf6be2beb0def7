//! Decision procedures for XML-grammars and related families of balanced
//! context-free grammars.

pub mod automata;
pub mod cfg;
pub mod dyck;
pub mod error;
pub mod hedge;
pub mod regular;
pub mod xml;

pub use error::{Error, Result};
