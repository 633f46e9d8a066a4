// Negated comparisons deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod functions;
pub mod geom;
pub mod hypergroup;
pub mod io;
pub mod opcalc;
pub mod quad;
pub mod rng;
pub mod slode;
pub mod specfun;
pub mod transforms;
pub mod verify;

pub use error::{Error, Result};
