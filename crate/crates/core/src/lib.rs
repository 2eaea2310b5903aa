pub mod error;
pub mod freegroup;
pub mod group;
pub mod kcomplex;
pub mod modules;
pub mod oracle;
pub mod orbits;
pub mod pipeline;
pub mod report;
pub mod ring;
pub mod verdict;
pub mod zlinalg;

pub use error::{Error, Result};
