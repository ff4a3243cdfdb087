pub mod bj;
pub mod cstar;
pub mod error;
pub mod geometry;
pub mod io;
pub mod linalg;
pub mod maps;
pub mod random;
pub mod sampling;
pub mod tol;
pub mod verify;

pub use error::{BjError, Result};
