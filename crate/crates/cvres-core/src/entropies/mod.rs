//! Entropic functionals in bits: von Neumann and relative entropy, the
//! classical divergence, the measured relative entropy and the
//! Husimi/Wehrl phase-space quantities.

mod husimi;
mod measured;

pub use husimi::{husimi_kl, husimi_q, husimi_sup, wehrl_entropy, PhaseSpaceValue, QuadratureGrid};
pub use measured::{measured_relative_entropy, OptimizerReport};

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::usage;
use crate::fock_core::{eigh, DensityOperator};
use crate::special::neg_xlog2x;
use crate::Result;

/// Probabilities at or below this count as zero in [`kl_divergence`].
pub const KL_ZERO: f64 = 1e-15;
/// Eigenvalues of `σ` below this fraction of its largest one are treated as
/// outside its support.
pub const SUPPORT_REL_TOL: f64 = 1e-14;
/// Weight of `ρ` outside the support of `σ` above which `D = +∞`.
pub const SUPPORT_WEIGHT_TOL: f64 = 1e-10;

/// `−Σ λ log₂ λ` over the spectrum, with `0 log 0 = 0`.
pub fn von_neumann_entropy(rho: &DensityOperator) -> f64 {
    if rho.is_fock_diagonal() {
        return rho.diagonal().iter().map(|&x| neg_xlog2x(x.max(0.0))).sum();
    }
    eigh(rho.matrix()).values.iter().map(|&x| neg_xlog2x(x.max(0.0))).sum::<f64>().max(0.0)
}

/// Classical divergence `Σ p log₂(p/q)`; zero-`p` bins contribute nothing,
/// `p > 0 = q` gives `+∞`.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi <= KL_ZERO {
            continue;
        }
        if qi <= KL_ZERO {
            return f64::INFINITY;
        }
        acc += pi * (pi / qi).log2();
    }
    acc
}

pub(crate) fn check_shape(rho: &DensityOperator, sigma: &DensityOperator) -> Result<()> {
    if rho.modes() != sigma.modes() || rho.cutoff() != sigma.cutoff() {
        return Err(usage("states must have matching modes and cutoff"));
    }
    Ok(())
}

/// `Tr[ρ(log₂ρ − log₂σ)]`, or `+∞` when `ρ` has weight outside the numerical
/// support of `σ`. Eigenvalues of `σ` that are treated as zero but carry
/// negligible weight are charged at `-log₂` of the smallest positive double,
/// so the result never undershoots.
pub fn relative_entropy(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    check_shape(rho, sigma)?;
    if rho.is_fock_diagonal() && sigma.is_fock_diagonal() {
        let p = rho.diagonal();
        let q = sigma.diagonal();
        let mut acc = 0.0;
        for (&pi, &qi) in p.iter().zip(&q) {
            if pi <= 0.0 {
                continue;
            }
            if qi <= 0.0 {
                return Ok(f64::INFINITY);
            }
            acc += pi * (pi.log2() - qi.log2());
        }
        return Ok(acc);
    }
    let es = eigh(sigma.matrix());
    let smax = es.max_value();
    let floor = smax * SUPPORT_REL_TOL;
    let mut cross = 0.0;
    for (k, &s) in es.values.iter().enumerate() {
        let w = rho.matrix().quad_form(&es.vectors.column(k));
        if s <= floor {
            if w > SUPPORT_WEIGHT_TOL {
                return Ok(f64::INFINITY);
            }
            cross += w.max(0.0) * -(s.max(f64::MIN_POSITIVE)).log2();
        } else {
            cross += w * -s.log2();
        }
    }
    Ok(cross - von_neumann_entropy(rho))
}

#[cfg(test)]
mod tests;
