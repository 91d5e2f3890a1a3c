//! Poisson enveloping algebras of finitely presented Poisson algebras over the rationals.

pub mod criteria;
pub mod error;
pub mod groebner;
pub mod parse;
pub mod pea;
pub mod poly;
pub mod presentation;
pub mod structure;

pub use error::{Error, Result};
