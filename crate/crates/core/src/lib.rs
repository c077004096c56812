//! Blowup criteria for the radial parabolic-elliptic Keller-Segel system.
//!
//! The crate is `no_std` and only needs `alloc`. Everything here is a pure
//! function of its inputs, so results are bit-reproducible for fixed inputs.
//!
//! - [`radial`]: dimensions, orders, profiles, mass functions, concentrations.
//! - [`kernels`]: Gaussian and fractional heat kernels on radial arguments.
//! - [`criteria`]: criterion constants, the sup-over-T functional, verdicts.
//! - [`solver`]: method-of-lines integration of the radial mass equation.

#![no_std]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod criteria;
mod error;
pub mod interp;
pub mod kernels;
pub mod quad;
pub mod radial;
pub mod solver;
pub mod special;

pub use error::{Error, Result};

mod prelude {
    // Float methods for no_std. When std is in the crate graph (dev builds)
    // its inherent methods win and imports of this module look unused.
    #[allow(unused_imports)]
    pub(crate) use num_traits::Float;
}
