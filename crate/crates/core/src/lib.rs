//! Discrete laboratory for variation-norm Fourier analysis on the torus.
//!
//! Everything here is a pure function of its inputs and works on the cyclic
//! grid of `N = 2^L` points identified with `[0, 1)`. Integrals are Riemann
//! sums with step `1/N`; signals are treated as step functions on the cells
//! `[i/N, (i+1)/N)` whenever an interval with non-grid endpoints is needed.
//!
//! The crate is `no_std` and only needs `alloc`. IO, file formats and the
//! experiment harness live in the companion `carleson-lab` crate.
//!
//! Modules:
//! - [`fourier`]: transforms, partial sums, variation norms, variational
//!   Carleson operators.
//! - [`weights`]: weights, Muckenhoupt constants, doubling exponents, maximal
//!   and sharp functions.
//! - [`phaseplane`]: tiles, bitiles, wave packets, trees, size, density and the
//!   model operators.
//! - [`decomposition`]: greedy tree selection by size and by density,
//!   counting functions, well-separatedness, tree-estimate monitors.
//! - [`lepingle`]: Littlewood–Paley families and the variational square
//!   function monitor.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
pub mod math;

pub mod decomposition;
pub mod fourier;
pub mod lepingle;
pub mod phaseplane;
pub mod weights;

pub use error::{Error, Result};
pub use fourier::{Signal, Spectrum};
pub use num_complex::Complex64;
pub use weights::Weight;
