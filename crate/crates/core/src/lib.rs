//! Distance sets of well-distributed planar point sets under polygonal norms.
pub mod construction;
pub mod distset;
pub mod error;
pub mod exactnum;
pub mod exec;
pub mod io;
pub mod modelset;
pub mod polynorm;
pub mod repro;
pub mod sumsetlab;
pub use error::{Error, Result};
pub use exec::Exec;
