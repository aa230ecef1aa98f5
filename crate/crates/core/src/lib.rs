//! Numerics for harmonic maps between surfaces with conic singularities.
//!
//! Everything lives on a log-polar grid `(t, θ)` around a single cone point at the
//! origin. The crate is `no_std` and only needs an allocator.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod diagnostics;
pub mod error;
pub mod field;
pub mod geometry;
pub mod linearization;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub(crate) mod prelude {
    #[allow(unused_imports)]
    pub use alloc::boxed::Box;
    pub use alloc::format;
    #[allow(unused_imports)]
    pub use alloc::string::String;
    pub use alloc::vec;
    pub use alloc::vec::Vec;
    pub use core::f64::consts::PI;
    pub use num_complex::Complex64 as C64;
    pub use num_traits::Float;

    pub const I: C64 = C64::new(0.0, 1.0);
    pub const ZERO: C64 = C64::new(0.0, 0.0);
    pub const ONE: C64 = C64::new(1.0, 0.0);
    pub const TAU: f64 = 2.0 * PI;
}
