pub mod analysis;
pub mod cli;
pub mod error;
pub mod formulation;
pub mod model;
pub mod oracle;
pub mod par;
pub mod pdsg;

pub use error::{Error, Result};
