//! Certified bounds on nonclassicality monotones of continuous-variable
//! quantum states.
//!
//! States live on a truncated Fock space with a per-mode cutoff `d`. The
//! crate provides the linear algebra for that space ([`fock_core`]), the
//! state families used throughout ([`states`]), entropic functionals
//! ([`entropies`]), lower and upper bound engines for the relative entropy
//! of nonclassicality and its measured variant ([`nonclassicality`]), and
//! exact simulations of linear-optics protocols together with rate bounds
//! ([`rates_protocols`]).
//!
//! All reported monotone values are in bits. Every lower bound is produced
//! by a feasible point of a variational program, so intermediate iterates
//! are already valid; every upper bound comes from an explicit classical
//! state or a closed form.
//!
//! The crate is `no_std` and only needs `alloc`. Float methods come from
//! `num_traits::Float` (libm); when std is linked elsewhere in the build its
//! inherent methods take precedence, hence the `allow(unused_imports)` on
//! those imports.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod entropies;
pub mod error;
pub mod fock_core;
pub mod nonclassicality;
pub mod optim;
pub mod rates_protocols;
pub mod serde_ext;
pub mod special;
pub mod states;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// `log2(e)`, the conversion factor from nats to bits.
pub const LOG2_E: f64 = core::f64::consts::LOG2_E;
