//! Interval sandwich `[best lower on N^M, best upper on N]` for the
//! regularized measured monotone, single states and explicit products.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::upper::{
    classical_ansatz_upper_bound, energy_upper_bound, gaussian_bounds, husimi_lower_bound, wehrl_upper_bound, AnsatzFamily,
};
use super::{basel_divergence_bound, cat_lower_bound, fock_diagonal_ncm, gamma_lower_bound, Certificate, MonotoneBound, Quantity};
use crate::entropies::{von_neumann_entropy, QuadratureGrid};
use crate::error::{usage, Error};
use crate::optim::OptimizerConfig;
use crate::states::{gaussian_descriptor, make_state, Family, StateSpec};
use crate::Result;

/// Lower and upper endpoints may cross by at most this much before the
/// result is reported as inconsistent.
pub const CONSISTENCY_TOL: f64 = 1e-6;
/// Largest dimension at which the generic Γ program joins the sandwich.
pub const GENERIC_GAMMA_MAX_DIM: usize = 120;

/// A certified interval together with every bound that entered it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sandwich {
    pub lower: MonotoneBound,
    pub upper: MonotoneBound,
    pub lowers: Vec<MonotoneBound>,
    pub uppers: Vec<MonotoneBound>,
}

impl Sandwich {
    pub fn width(&self) -> f64 {
        self.upper.value - self.lower.value
    }

    pub fn converged(&self) -> bool {
        self.lower.certificate.converged && self.upper.certificate.converged
    }

    /// Picks the best endpoints; fails when they cross by more than `tol`.
    pub fn from_bounds(lowers: Vec<MonotoneBound>, uppers: Vec<MonotoneBound>, tol: f64) -> Result<Self> {
        let lower = lowers
            .iter()
            .filter(|b| b.value.is_finite())
            .max_by(|a, b| a.value.total_cmp(&b.value))
            .cloned()
            .unwrap_or_else(|| MonotoneBound::lower(Quantity::Ncm, 0.0, Certificate::closed_form("nonnegativity")));
        let upper = uppers
            .iter()
            .filter(|b| !b.value.is_nan())
            .min_by(|a, b| a.value.total_cmp(&b.value))
            .cloned()
            .unwrap_or_else(|| MonotoneBound::upper(Quantity::Nc, f64::INFINITY, Certificate::closed_form("no finite upper bound")));
        if lower.value > upper.value + tol {
            return Err(Error::Inconsistent { lower: lower.value, upper: upper.value });
        }
        Ok(Self { lower, upper, lowers, uppers })
    }
}

fn zero_lower() -> MonotoneBound {
    MonotoneBound::lower(Quantity::Ncm, 0.0, Certificate::closed_form("nonnegativity"))
}

/// Every applicable bound for a single-mode state family.
pub fn bound_sandwich(spec: &StateSpec, cfg: &OptimizerConfig) -> Result<Sandwich> {
    spec.validate()?;
    cfg.validate()?;
    let mut lowers = vec![zero_lower()];
    let mut uppers = Vec::new();
    let energy = spec.ideal_energy();
    if energy.is_finite() {
        uppers.push(energy_upper_bound(energy, 1)?);
    }
    match spec.family {
        Family::Basel { n_max } => {
            let b = basel_divergence_bound(n_max as u64);
            let cert = Certificate::closed_form(format!("diagonal witness on levels 2^n, n <= {n_max}"));
            lowers.push(MonotoneBound::lower(Quantity::Ncm, b.value_bits.max(0.0), cert));
            return Sandwich::from_bounds(lowers, uppers, CONSISTENCY_TOL + cfg.tol);
        }
        Family::Fock { .. } | Family::Thermal { .. } | Family::NoisyFock { .. } => {
            let rho = make_state(spec)?;
            let (lo, up) = fock_diagonal_ncm(&rho, cfg)?;
            lowers.push(lo);
            uppers.push(up);
            uppers.push(classical_ansatz_upper_bound(spec, &AnsatzFamily::Thermal { nus: vec![] })?.bound);
        }
        Family::Coherent { alpha, alpha_im } => {
            let rho = make_state(spec)?;
            lowers.push(husimi_lower_bound(&rho)?);
            let fam = AnsatzFamily::CoherentMixture { points: vec![(alpha, alpha_im)] };
            uppers.push(classical_ansatz_upper_bound(spec, &fam)?.bound);
        }
        Family::Cat { alpha, sign } => {
            if alpha > 0.0 {
                lowers.push(cat_lower_bound(alpha, sign, cfg)?);
                let fam = AnsatzFamily::CoherentMixture { points: vec![(alpha, 0.0), (-alpha, 0.0), (0.0, 0.0)] };
                uppers.push(classical_ansatz_upper_bound(spec, &fam)?.bound);
            }
            generic_bounds(spec, cfg, &mut lowers, &mut uppers)?;
        }
        Family::Squeezed { r } => {
            let gd = gaussian_descriptor(spec)?;
            let (lo, up) = gaussian_bounds(&gd, 0.0)?;
            lowers.push(lo);
            uppers.push(up);
            if r != 0.0 {
                uppers.push(classical_ansatz_upper_bound(spec, &AnsatzFamily::SqueezedThermal)?.bound);
            }
            uppers.push(classical_ansatz_upper_bound(spec, &AnsatzFamily::Thermal { nus: vec![] })?.bound);
            generic_bounds(spec, cfg, &mut lowers, &mut uppers)?;
        }
    }
    Sandwich::from_bounds(lowers, uppers, CONSISTENCY_TOL + cfg.tol)
}

/// Truncated-state bounds shared by the non-diagonal families.
fn generic_bounds(spec: &StateSpec, cfg: &OptimizerConfig, lowers: &mut Vec<MonotoneBound>, uppers: &mut Vec<MonotoneBound>) -> Result<()> {
    let rho = make_state(spec)?;
    lowers.push(husimi_lower_bound(&rho)?);
    if rho.dim() <= GENERIC_GAMMA_MAX_DIM {
        lowers.push(gamma_lower_bound(&rho, cfg)?);
    }
    let grid = QuadratureGrid::for_energy(spec.ideal_energy().max(rho.energy()));
    uppers.push(wehrl_upper_bound(&rho, &grid)?);
    Ok(())
}

/// Sandwich for `⊗ᵢ ρᵢ`: lower endpoints add by the product ansatz
/// `L_A ⊗ L_B`, upper endpoints add by product reference states.
pub fn bound_sandwich_product(specs: &[StateSpec], cfg: &OptimizerConfig) -> Result<Sandwich> {
    if specs.is_empty() {
        return Err(usage("a product needs at least one factor"));
    }
    let parts: Vec<Sandwich> = specs.iter().map(|s| bound_sandwich(s, cfg)).collect::<Result<_>>()?;
    let combine = |pick: &dyn Fn(&Sandwich) -> &MonotoneBound, lower: bool| {
        let mut cert = Certificate::closed_form(String::from("sum over factors"));
        let mut value = 0.0;
        for p in &parts {
            let b = pick(p);
            value += b.value;
            cert.truncation_epsilon = cert.truncation_epsilon.max(b.certificate.truncation_epsilon);
            cert.truncation_correction_bits += b.certificate.truncation_correction_bits;
            cert.inner_sup_grid_error += b.certificate.inner_sup_grid_error;
            cert.inner_sup_radius = cert.inner_sup_radius.max(b.certificate.inner_sup_radius);
            cert.converged &= b.certificate.converged;
        }
        if lower {
            MonotoneBound::lower(Quantity::Ncm, value, cert)
        } else {
            MonotoneBound::upper(Quantity::Nc, value, cert)
        }
    };
    let lower = combine(&|p| &p.lower, true);
    let upper = combine(&|p| &p.upper, false);
    let lowers = parts.iter().map(|p| p.lower.clone()).collect();
    let uppers = parts.iter().map(|p| p.upper.clone()).collect();
    if lower.value > upper.value + CONSISTENCY_TOL * specs.len() as f64 + cfg.tol {
        return Err(Error::Inconsistent { lower: lower.value, upper: upper.value });
    }
    Ok(Sandwich { lower, upper, lowers, uppers })
}

/// Entropy of the normalized truncation, in bits.
pub fn state_entropy(spec: &StateSpec) -> Result<f64> {
    if spec.is_pure() {
        return Ok(0.0);
    }
    Ok(von_neumann_entropy(&make_state(spec)?.normalized()))
}
