//! Rate upper bounds from ratios of monotone bounds, the thermodynamic
//! analogue, and exact simulations of explicit conversion protocols.

mod figure;
mod protocols;

pub use figure::{cat_interval, protocol_figure_data, ProtocolRow, ProtocolTask};
pub use protocols::{
    cat_amplification, cat_dilution, closed_form_ps, closed_form_ps_derived, fock_dilution, lund_probability,
    ours_amplification_probability, CatAmplification, CatDilution, ProtocolOutcome,
};

use alloc::string::String;

#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::entropies::von_neumann_entropy;
use crate::error::usage;
use crate::fock_core::DensityOperator;
use crate::nonclassicality::{fock_closed_form, Certificate, MonotoneBound, Quantity};
use crate::Result;

/// Denominators at or below this are treated as zero.
pub const RATE_ZERO_TOL: f64 = 1e-12;

/// `numerator / denominator` with both error bars already folded into the
/// endpoint values; `value = None` flags an undefined ratio.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateBound {
    pub numerator: MonotoneBound,
    pub denominator: MonotoneBound,
    #[serde(with = "crate::serde_ext::extended_opt_f64")]
    pub value: Option<f64>,
    pub undefined: bool,
}

/// Upper bound on a transformation rate from an upper bound on the source
/// and a lower bound on the target.
pub fn rate_upper_bound(src_upper: MonotoneBound, tgt_lower: MonotoneBound) -> RateBound {
    let num = src_upper.value.max(0.0);
    let den = tgt_lower.value;
    let value = (den > RATE_ZERO_TOL && num.is_finite()).then(|| num / den);
    let value = if den > RATE_ZERO_TOL && num == f64::INFINITY { Some(f64::INFINITY) } else { value };
    RateBound { undefined: value.is_none(), numerator: src_upper, denominator: tgt_lower, value }
}

/// Mean occupation `1/(e^β − 1)` of the Gibbs state of `a†a`.
pub fn gibbs_occupation(beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(usage("inverse temperature must be positive and finite"));
    }
    Ok(beta.exp_m1().recip())
}

/// `D(ρ‖γ_β)` in bits for the Gibbs state of `a†a`; exact for the
/// normalized truncation because `log γ_β` is diagonal.
pub fn free_energy(rho: &DensityOperator, beta: f64) -> Result<f64> {
    let nu = gibbs_occupation(beta)?;
    if rho.modes() != 1 {
        return Err(usage("free energy is implemented for single-mode states"));
    }
    let rn = rho.normalized();
    let e = rn.energy();
    let s = von_neumann_entropy(&rn);
    // −Tr ρ log₂γ = log₂(1+ν) + E·β·log₂e
    Ok((-s + (1.0 + nu).log2() + e * beta * crate::LOG2_E).max(0.0))
}

/// `D(ρ‖γ_β)/D(σ‖γ_β)`.
pub fn thermo_rate_bound(rho: &DensityOperator, sigma: &DensityOperator, beta: f64) -> Result<RateBound> {
    let cert = |s: &str| Certificate::closed_form(String::from(s));
    let num = MonotoneBound::upper(Quantity::ThermalDivergence, free_energy(rho, beta)?, cert("relative entropy to the Gibbs state"));
    let den = MonotoneBound::lower(Quantity::ThermalDivergence, free_energy(sigma, beta)?, cert("relative entropy to the Gibbs state"));
    Ok(rate_upper_bound(num, den))
}

/// `p·N(|n⟩) / N(|n−1⟩)`, the rate bound for `ρ_{n,0}(p) → |n−1⟩`.
pub fn noisy_fock_dilution_upper(n: usize, p: f64) -> Result<RateBound> {
    if n < 2 || !(0.0..=1.0).contains(&p) {
        return Err(usage("noisy Fock dilution needs n >= 2 and p in [0, 1]"));
    }
    let num = MonotoneBound::upper(Quantity::Nc, p * fock_closed_form(n), Certificate::closed_form("convexity and the Fock closed form"));
    let den = MonotoneBound::lower(Quantity::Ncm, fock_closed_form(n - 1), Certificate::closed_form("Fock closed form"));
    Ok(rate_upper_bound(num, den))
}

#[cfg(test)]
mod tests;
