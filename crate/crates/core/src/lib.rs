pub mod alist;
pub mod analysis;
pub mod channel;
pub mod cli;
pub mod construct;
pub mod decoder;
pub mod density;
pub mod error;
pub mod gf2;
pub mod numeric;
pub mod sampling;

pub use error::{Error, Result};
