pub mod band;
pub mod cli;
pub mod dp;
pub mod error;
pub mod ou;
pub mod sim;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
