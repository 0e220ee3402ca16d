//! Quaternion orders of level p and p^2, Brandt matrices, ternary theta lifts
//! to weight 3/2, and twisted central L-values of weight-2 newforms.

pub mod arith;
pub mod brandt;
pub mod dd;
pub mod error;
pub mod ideals;
pub mod lseries;
pub mod linalg;
pub mod par;
pub mod pipeline;
pub mod enumerate;
pub mod qalg;
pub mod shimura;
pub mod ternary;
pub mod verify;

pub use error::{Error, Result};
