use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use super::check_shape;
use crate::error::{usage, Error};
use crate::fock_core::{coherent_amplitudes, DensityOperator};
use crate::nonclassicality::coherent_sup_certified;
use crate::optim::OptimizerConfig;
use crate::special::{gauss_laguerre, neg_xlog2x};
use crate::{Result, C64};

/// Polar product rule on the complex plane: Gauss–Laguerre in `t = |α|²`
/// times a uniform angular rule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureGrid {
    /// Nodes in `t = |α|²`.
    pub radial_nodes: Vec<f64>,
    /// `∫₀^∞ f(t) dt ≈ Σ wᵢ f(tᵢ)`.
    pub radial_weights: Vec<f64>,
    pub angular: usize,
    /// `√` of the largest radial node.
    pub outer_radius: f64,
}

/// A phase-space integral with its certified error bar, both in bits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpaceValue {
    pub value_bits: f64,
    pub error_bits: f64,
}

impl Default for QuadratureGrid {
    fn default() -> Self {
        Self::new(64, 128, 1.0).expect("default grid is valid")
    }
}

impl QuadratureGrid {
    /// `order` radial nodes stretched by `scale`, `angular` equally spaced
    /// angles. Angular integration is exact for operators on fewer than
    /// `angular / 2` levels.
    pub fn new(order: usize, angular: usize, scale: f64) -> Result<Self> {
        if order < 8 || angular < 8 {
            return Err(usage("quadrature node counts must be at least 8"));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(usage("quadrature scale must be positive"));
        }
        let (x, w) = gauss_laguerre(order);
        let radial_nodes: Vec<f64> = x.iter().map(|&t| t * scale).collect();
        let radial_weights = x.iter().zip(&w).map(|(&t, &wi)| scale * (wi.ln() + t).exp()).collect();
        let outer_radius = radial_nodes.last().copied().unwrap_or(0.0).sqrt();
        Ok(Self { radial_nodes, radial_weights, angular, outer_radius })
    }

    /// Default node counts, stretched when the energy demands a larger radius.
    pub fn for_energy(energy: f64) -> Self {
        let base = Self::default();
        let need = 4.0 * (energy + 1.0);
        let have = base.outer_radius * base.outer_radius;
        if need <= have {
            base
        } else {
            Self::new(64, 128, need / have).expect("scaled grid is valid")
        }
    }

    /// Markov bound `E/R²` on the mass beyond the outer radius, mapped
    /// through the increasing branch of `−x log₂ x`.
    pub fn tail_bound_bits(&self, energy: f64) -> f64 {
        let mass = energy / (self.outer_radius * self.outer_radius);
        neg_xlog2x(mass.min(core::f64::consts::E.recip()))
    }

    fn check_radius(&self, energy: f64) -> Result<()> {
        let required = 2.0 * (energy + 1.0).sqrt();
        if self.outer_radius < required {
            return Err(Error::InsufficientRadius { required, got: self.outer_radius });
        }
        Ok(())
    }

    /// Nodes `α` with weights for `∫ d²α`.
    pub fn points(&self) -> impl Iterator<Item = (C64, f64)> + '_ {
        let dtheta = 2.0 * core::f64::consts::PI / self.angular as f64;
        self.radial_nodes.iter().zip(&self.radial_weights).flat_map(move |(&t, &w)| {
            let r = t.sqrt();
            (0..self.angular).map(move |j| (C64::from_polar(r, j as f64 * dtheta), 0.5 * w * dtheta))
        })
    }
}

fn product_coherent(alpha: &[C64], d: usize) -> Vec<C64> {
    let mut v = alloc::vec![C64::new(1.0, 0.0)];
    for &a in alpha {
        let amps = coherent_amplitudes(a, d);
        v = v.iter().flat_map(|&x| amps.iter().map(move |&y| x * y)).collect();
    }
    v
}

/// `π^{−m}⟨α|ρ|α⟩` with truncated coherent vectors.
pub fn husimi_q(rho: &DensityOperator, alpha: &[C64]) -> Result<f64> {
    if alpha.len() != rho.modes() {
        return Err(usage("one amplitude per mode is required"));
    }
    let v = product_coherent(alpha, rho.cutoff());
    let pi_m = core::f64::consts::PI.powi(rho.modes() as i32);
    Ok(rho.matrix().quad_form(&v).max(0.0) / pi_m)
}

fn single_mode(rho: &DensityOperator) -> Result<()> {
    if rho.modes() != 1 {
        return Err(usage("phase-space quadrature is implemented for single-mode states"));
    }
    Ok(())
}

/// `−∫ Q log₂(πQ) d²α` on the grid plus the energy tail bound.
pub fn wehrl_entropy(rho: &DensityOperator, grid: &QuadratureGrid) -> Result<PhaseSpaceValue> {
    single_mode(rho)?;
    grid.check_radius(rho.energy())?;
    let d = rho.cutoff();
    let mut acc = 0.0;
    for (a, w) in grid.points() {
        let f = rho.matrix().quad_form(&coherent_amplitudes(a, d)).max(0.0);
        acc += w * neg_xlog2x(f) / core::f64::consts::PI;
    }
    Ok(PhaseSpaceValue { value_bits: acc, error_bits: grid.tail_bound_bits(rho.energy()) })
}

/// `∫ Q_ρ log₂(Q_ρ/Q_σ) d²α` on the grid, the outcome divergence of
/// heterodyne detection.
pub fn husimi_kl(rho: &DensityOperator, sigma: &DensityOperator, grid: &QuadratureGrid) -> Result<PhaseSpaceValue> {
    check_shape(rho, sigma)?;
    single_mode(rho)?;
    let energy = rho.energy().max(sigma.energy());
    grid.check_radius(energy)?;
    let d = rho.cutoff();
    let mut acc = 0.0;
    for (a, w) in grid.points() {
        let c = coherent_amplitudes(a, d);
        let p = rho.matrix().quad_form(&c).max(0.0);
        if p <= 0.0 {
            continue;
        }
        let q = sigma.matrix().quad_form(&c).max(0.0);
        if q <= 0.0 {
            return Ok(PhaseSpaceValue { value_bits: f64::INFINITY, error_bits: 0.0 });
        }
        acc += w * p * (p / q).log2() / core::f64::consts::PI;
    }
    Ok(PhaseSpaceValue { value_bits: acc, error_bits: grid.tail_bound_bits(energy) })
}

/// Certified upper bound on `sup_α Q_ρ(α)` for single-mode `ρ`.
pub fn husimi_sup(rho: &DensityOperator) -> Result<f64> {
    single_mode(rho)?;
    let cert = coherent_sup_certified(rho.op(), &OptimizerConfig::default())?;
    Ok(cert.upper / core::f64::consts::PI)
}
