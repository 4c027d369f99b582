//! Transport by position-dependent random walks.
//!
//! A walker takes steps of length `dx(x)` that cost `dt(x)` of clock time,
//! both set by the location where the step starts. The continuum limit of
//! that walk is the flux law
//!
//! ```text
//! F = -(D/S) d(S u)/dx,   D = dx^2 / (2 n dt),   S = dx / dt
//! ```
//!
//! whose steady state on a periodic domain is `u ~ 1/S`: walkers pile up
//! where they move slowly. Rival closures (Fick, Chapman, van Kampen, and
//! an explicit thermophoretic drift form) predict different steady states
//! from the same coefficient fields, so the two routes - sampling the walk
//! directly and integrating each flux law on a grid - can be played against
//! each other to tell the closures apart.
//!
//! The crate is `no_std` (with `alloc`) when built without the default
//! `std` feature; everything that touches files, threads or a command
//! line lives in the companion `thermowalk` crate. The `std` feature
//! only swaps scalar math to the hardware-backed implementations; the
//! API is identical either way.

#![cfg_attr(not(any(test, feature = "std")), no_std)]

extern crate alloc;

pub mod analysis;
pub mod error;
pub mod fields;
pub mod fvm;
pub mod grid;
pub mod mc;
mod num;

pub use error::{Error, Result};
pub use grid::{DomainSpec, FieldGrid};
