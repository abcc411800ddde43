//! Upper bounds from explicit classical states and closed forms, and the
//! phase-space (Husimi/Wehrl) estimates.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use super::cat::coherent_overlap;
use super::{truncation_correction, Certificate, MonotoneBound, Quantity};
use crate::entropies::{husimi_sup, von_neumann_entropy, wehrl_entropy, QuadratureGrid};
use crate::error::usage;
use crate::fock_core::{eigh, CMatrix, DensityOperator};
use crate::optim::{golden_max, nelder_mead, NelderMead};
use crate::special::g_bits;
use crate::states::{make_state, Family, GaussianDescriptor, Sign, StateSpec};
use crate::{Result, C64, LOG2_E};

/// `m·g(E/m)`: no state of mean photon number `E` exceeds this.
pub fn energy_upper_bound(energy: f64, modes: usize) -> Result<MonotoneBound> {
    if energy.is_nan() || energy < 0.0 || modes == 0 {
        return Err(usage("energy bound needs E >= 0 and m >= 1"));
    }
    let m = modes as f64;
    Ok(MonotoneBound::upper(Quantity::Nc, m * g_bits(energy / m), Certificate::closed_form("thermal state of equal energy")))
}

/// `S_W(ρ) − S(ρ)` plus the quadrature tail, an upper bound on the
/// regularized measured monotone. Computed on the normalized truncation and
/// widened by the truncation correction.
pub fn wehrl_upper_bound(rho: &DensityOperator, grid: &QuadratureGrid) -> Result<MonotoneBound> {
    let rn = rho.normalized();
    let sw = wehrl_entropy(&rn, grid)?;
    let s = von_neumann_entropy(&rn);
    let (eps, corr) = truncation_correction(rho)?;
    let cert = Certificate {
        truncation_epsilon: eps,
        truncation_correction_bits: corr,
        inner_sup_radius: grid.outer_radius * grid.outer_radius,
        inner_sup_grid_error: sw.error_bits,
        ansatz_description: String::from("Wehrl entropy minus von Neumann entropy"),
        converged: true,
    };
    Ok(MonotoneBound::upper(Quantity::NcmRegularizedInterval, sw.value_bits - s + sw.error_bits + corr, cert))
}

/// `−log₂(π‖Q_ρ‖_∞) − S(ρ)`, floored at zero, with the certified Husimi
/// supremum.
pub fn husimi_lower_bound(rho: &DensityOperator) -> Result<MonotoneBound> {
    let rn = rho.normalized();
    let q = husimi_sup(&rn)?;
    let s = von_neumann_entropy(&rn);
    let (eps, corr) = truncation_correction(rho)?;
    let cert = Certificate {
        truncation_epsilon: eps,
        truncation_correction_bits: corr,
        inner_sup_radius: 0.0,
        inner_sup_grid_error: 0.0,
        ansatz_description: String::from("L = ρ"),
        converged: true,
    };
    let value = -(core::f64::consts::PI * q).log2() - s - corr;
    Ok(MonotoneBound::lower(Quantity::Ncm, value.max(0.0), cert))
}

/// Closed-form pair for Gaussian states:
/// lower `½log₂det(V+𝟙) − S − m` (floored), upper `½log₂det(V+𝟙) − S + m·log₂e`.
pub fn gaussian_bounds(gd: &GaussianDescriptor, entropy_bits: f64) -> Result<(MonotoneBound, MonotoneBound)> {
    gd.validate()?;
    let m = gd.modes() as f64;
    let half_log_det = 0.5 * gd.det_v_plus_identity().log2();
    let lower = (half_log_det - entropy_bits - m).max(0.0);
    let upper = half_log_det - entropy_bits + m * LOG2_E;
    Ok((
        MonotoneBound::lower(Quantity::Ncm, lower, Certificate::closed_form("Gaussian covariance bound")),
        MonotoneBound::upper(Quantity::NcmRegularizedInterval, upper, Certificate::closed_form("Gaussian covariance bound")),
    ))
}

/// Classical reference families for [`classical_ansatz_upper_bound`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AnsatzFamily {
    /// Thermal states `τ_ν` for the listed `ν` (the optimum `ν = E` is
    /// always added).
    Thermal { nus: Vec<f64> },
    /// Squeezed thermal states `σ_s` with `N(s) = (e^{2s} − 1)/2`, optimized
    /// over `s` (squeezed inputs only).
    SqueezedThermal,
    /// Mixtures of the listed coherent states with optimized weights
    /// (coherent and cat inputs only).
    CoherentMixture { points: Vec<(f64, f64)> },
}

/// An ansatz upper bound, with the printed closed form where one exists.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnsatzUpper {
    pub bound: MonotoneBound,
    pub printed_closed_form: Option<f64>,
}

/// `D(ζ_r‖σ_s)` with the mean photon number `sinh²(r − s)` of the relative
/// squeezing, `factor` multiplying that term.
pub fn squeezed_thermal_divergence(r: f64, s: f64, factor: f64) -> f64 {
    let n = 0.5 * (2.0 * s).exp_m1();
    if n <= 0.0 {
        return if r == 0.0 { 0.0 } else { f64::INFINITY };
    }
    (1.0 + n).log2() + factor * (r - s).sinh().powi(2) * (1.0 / n).ln_1p() * LOG2_E
}

/// `inf_{s >= 0} D(ζ_r‖σ_s)` for the given factor, with the minimizer.
pub fn squeezed_thermal_minimum(r: f64, factor: f64) -> (f64, f64) {
    let r = r.abs();
    if r == 0.0 {
        return (0.0, 0.0);
    }
    let f = |s: f64| -squeezed_thermal_divergence(r, s, factor);
    let hi = r.max(1e-3) * 1.5 + 1.0;
    let n = 400;
    let mut best = (hi, f(hi));
    for i in 1..=n {
        let s = hi * i as f64 / n as f64;
        let v = f(s);
        if v > best.1 {
            best = (s, v);
        }
    }
    let step = hi / n as f64;
    let (s, v) = golden_max(f, (best.0 - step).max(1e-12), best.0 + step, 1e-13);
    (s, -v)
}

/// Upper bound on `N` from the best member of a classical family.
pub fn classical_ansatz_upper_bound(spec: &StateSpec, family: &AnsatzFamily) -> Result<AnsatzUpper> {
    spec.validate()?;
    match family {
        AnsatzFamily::Thermal { nus } => thermal_family(spec, nus),
        AnsatzFamily::SqueezedThermal => {
            let Family::Squeezed { r } = spec.family else {
                return Err(usage("squeezed-thermal ansatz applies to squeezed inputs"));
            };
            let (s, v) = squeezed_thermal_minimum(r, 1.0);
            let (_, printed) = squeezed_thermal_minimum(r, 2.0);
            let cert = Certificate::closed_form(format!("squeezed thermal state, s = {s:.9}"));
            Ok(AnsatzUpper { bound: MonotoneBound::upper(Quantity::Nc, v, cert), printed_closed_form: Some(printed) })
        }
        AnsatzFamily::CoherentMixture { points } => {
            let pts: Vec<C64> = points.iter().map(|&(re, im)| C64::new(re, im)).collect();
            let psi: Vec<(C64, C64)> = match spec.family {
                Family::Coherent { alpha, alpha_im } => vec![(C64::new(1.0, 0.0), C64::new(alpha, alpha_im))],
                Family::Cat { alpha, sign } => {
                    let t = alpha * alpha;
                    let n = match sign {
                        Sign::Plus => (2.0 * (1.0 + (-2.0 * t).exp())).sqrt().recip(),
                        Sign::Minus => (2.0 * -(-2.0 * t).exp_m1()).sqrt().recip(),
                    };
                    vec![(C64::new(n, 0.0), C64::new(alpha, 0.0)), (C64::new(n * sign.as_f64(), 0.0), C64::new(-alpha, 0.0))]
                }
                _ => return Err(usage("coherent-mixture ansatz applies to coherent and cat inputs")),
            };
            let (value, w) = coherent_mixture_minimum(&psi, &pts)?;
            let cert = Certificate::closed_form(format!("coherent mixture with weights {w:?}"));
            Ok(AnsatzUpper { bound: MonotoneBound::upper(Quantity::Nc, value, cert), printed_closed_form: None })
        }
    }
}

fn thermal_family(spec: &StateSpec, nus: &[f64]) -> Result<AnsatzUpper> {
    // D(ρ‖τ_ν) = −S(ρ) + log₂(1+ν) − E log₂(ν/(1+ν)), exact for ρ on any cutoff
    let div = |s: f64, e: f64, nu: f64| {
        if nu == 0.0 {
            return if e == 0.0 { -s } else { f64::INFINITY };
        }
        -s + (1.0 + nu).log2() - e * (nu / (1.0 + nu)).log2()
    };
    let best_over = |s: f64, e: f64| nus.iter().copied().chain([e]).map(|nu| div(s, e, nu)).fold(f64::INFINITY, f64::min);
    if spec.is_pure() {
        let e = spec.ideal_energy();
        let cert = Certificate::closed_form(String::from("thermal state τ_ν"));
        return Ok(AnsatzUpper { bound: MonotoneBound::upper(Quantity::Nc, best_over(0.0, e), cert), printed_closed_form: None });
    }
    let rho = make_state(spec)?;
    let rn = rho.normalized();
    let (eps, corr) = truncation_correction(&rho)?;
    let value = best_over(von_neumann_entropy(&rn), rn.energy()) + corr;
    let cert = Certificate {
        truncation_epsilon: eps,
        truncation_correction_bits: corr,
        inner_sup_radius: 0.0,
        inner_sup_grid_error: 0.0,
        ansatz_description: String::from("thermal state τ_ν"),
        converged: true,
    };
    Ok(AnsatzUpper { bound: MonotoneBound::upper(Quantity::Nc, value, cert), printed_closed_form: None })
}

/// Coordinates of a set of coherent vectors in an orthonormal basis of
/// their span (columns of `Λ^{1/2}U†` from the Gram matrix `UΛU†`).
pub(crate) fn span_coordinates(points: &[C64]) -> Vec<Vec<C64>> {
    let k = points.len();
    let gram = CMatrix::from_fn(k, |i, j| coherent_overlap(points[i], points[j]));
    let e = eigh(&gram);
    let top = e.max_value();
    let keep: Vec<usize> = (0..k).filter(|&a| e.values[a] > 1e-14 * top).collect();
    (0..k)
        .map(|j| keep.iter().map(|&a| e.vectors[(j, a)].conj() * e.values[a].sqrt()).collect())
        .collect()
}

/// `min_w D(ψ‖Σ wᵢ|βᵢ⟩⟨βᵢ|)` for `ψ = Σ c_j|γ_j⟩`, evaluated exactly in the
/// span of all coherent vectors involved.
pub fn coherent_mixture_minimum(psi: &[(C64, C64)], points: &[C64]) -> Result<(f64, Vec<f64>)> {
    if points.is_empty() {
        return Err(usage("coherent mixture needs at least one point"));
    }
    let mut all: Vec<C64> = points.to_vec();
    all.extend(psi.iter().map(|p| p.1));
    let coords = span_coordinates(&all);
    let dim = coords[0].len();
    let mut v = vec![C64::new(0.0, 0.0); dim];
    for (j, (c, _)) in psi.iter().enumerate() {
        for (a, x) in coords[points.len() + j].iter().enumerate() {
            v[a] += c * x;
        }
    }
    let nv: f64 = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= nv);
    let k = points.len();
    let divergence = |w: &[f64]| -> f64 {
        let mut sigma = CMatrix::zeros(dim);
        for (i, &wi) in w.iter().enumerate() {
            sigma = &sigma + &CMatrix::outer(&coords[i]).scale(wi);
        }
        let e = eigh(&sigma);
        let top = e.max_value();
        let mut acc = 0.0;
        for (a, &lam) in e.values.iter().enumerate() {
            let col = e.vectors.column(a);
            let ov: C64 = col.iter().zip(&v).map(|(c, x)| c.conj() * x).sum();
            let wgt = ov.norm_sqr();
            if lam <= 1e-14 * top {
                if wgt > 1e-10 {
                    return f64::INFINITY;
                }
                continue;
            }
            acc -= wgt * lam.log2();
        }
        acc
    };
    let softmax = |x: &[f64]| -> Vec<f64> {
        let m = x.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        let e: Vec<f64> = x.iter().map(|&xi| (xi - m).exp()).collect();
        let s: f64 = e.iter().sum();
        e.into_iter().map(|x| x / s).collect()
    };
    if k == 1 {
        return Ok((divergence(&[1.0]), vec![1.0]));
    }
    let cfg = NelderMead { max_evals: 600 * k, ftol: 1e-13, initial_step: 1.0 };
    let (x, _) = nelder_mead(|x| divergence(&softmax(x)), &vec![0.0; k], cfg);
    let (x, fx) = nelder_mead(|x| divergence(&softmax(x)), &x, NelderMead { initial_step: 0.1, ..cfg });
    Ok((fx, softmax(&x)))
}
