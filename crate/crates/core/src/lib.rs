pub mod error;
mod eigen;
pub mod matrix;
pub mod spectrum;

pub use error::{Error, ErrorKind, Result};
pub mod entropy;
mod modp;
pub mod asymptotics;
pub mod quadrature;
pub mod generator;
pub mod stats;
pub mod geodesic;
