#![no_std]

extern crate alloc;

mod error;

pub mod arith;
pub mod dworkmat;
pub mod dworksym;
pub mod experiments;
pub mod ff;
pub mod lfun;
pub mod linalg;
pub mod nt;
pub mod padic;
pub mod polygon;
pub mod ratfun;
pub mod ring;
pub mod suites;

pub use error::{Error, Result};
