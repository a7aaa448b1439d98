pub mod arith;
pub mod classnum;
pub mod data;
pub mod engine;
pub mod error;
pub mod facts;
pub mod frontend;
pub mod hecke;
pub mod modgenus;
pub mod p1;
pub mod rules;

pub use error::{Error, Result};
