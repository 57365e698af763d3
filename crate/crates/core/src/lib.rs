//! Pattern counting and induced-pattern detection parameterized by matched
//! treedepth and matched treewidth.
//!
//! The crate is `no_std` with `alloc`. File formats, the CLI and anything
//! touching the OS live in the companion `matchwidth` crate.

#![no_std]
extern crate alloc;

pub mod canon;
pub mod decomp;
pub mod error;
pub mod graph;
pub mod homcount;
pub mod induced;
pub mod named;
pub mod oracle;
pub mod patterns;
pub mod spasm;

pub use error::{Error, Result};
pub use graph::Graph;
