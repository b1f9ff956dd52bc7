#![no_std]

extern crate alloc;

pub mod airy;
pub mod boundary_layer;
pub mod error;
pub mod estimates;
pub mod exec;
pub mod force;
pub mod grid;
pub mod inequality_lab;
mod jet;
pub mod linalg;
pub mod mode;
pub mod nonlinear;

/// Crate version, echoed into run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use error::{Error, Result};
pub use exec::{Executor, Sequential};
pub use grid::ChebyshevGrid;
