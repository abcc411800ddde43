#[allow(unused_imports)]
use num_traits::Float;

use crate::error::usage;
use crate::fock_core::DensityOperator;
use crate::special::g_bits;
use crate::Result;

/// Continuity bound for an `ε`-close truncation of an `m`-mode state with
/// energy at most `E`: `mε·g(2E/(mε)) + g(ε)`.
pub fn truncation_certificate(epsilon: f64, energy: f64, modes: usize) -> Result<f64> {
    check(epsilon, energy, modes)?;
    if epsilon == 0.0 {
        return Ok(0.0);
    }
    let m = modes as f64;
    Ok(m * epsilon * g_bits(2.0 * energy / (m * epsilon)) + g_bits(epsilon))
}

/// Same bound with the energy of `|ρ − σ|` supplied directly:
/// `mε·g(E_abs/(mε)) + g(ε)`.
pub fn truncation_certificate_abs(epsilon: f64, abs_energy: f64, modes: usize) -> Result<f64> {
    check(epsilon, abs_energy, modes)?;
    if epsilon == 0.0 {
        return Ok(0.0);
    }
    let m = modes as f64;
    Ok(m * epsilon * g_bits(abs_energy / (m * epsilon)) + g_bits(epsilon))
}

fn check(epsilon: f64, energy: f64, modes: usize) -> Result<()> {
    if !(0.0..=1.0).contains(&epsilon) || energy.is_nan() || energy < 0.0 || modes == 0 {
        return Err(usage("truncation certificate needs ε in [0, 1], E >= 0 and m >= 1"));
    }
    Ok(())
}

/// Trace distance `ε` between the ideal state and the normalized truncated
/// one, and the resulting correction in bits.
///
/// Fock-diagonal states lose exactly their deficit `δ`, so `ε = δ` with the
/// commuting energy bound. For pure states `ε = √δ` and the energy of
/// `|ψψ† − φφ†|` is bounded by `ε(E_φ + E_tail/δ)`, where `E_tail` is the
/// energy carried by the discarded levels. Operators without recorded ideal
/// data get no correction.
pub fn truncation_correction(rho: &DensityOperator) -> Result<(f64, f64)> {
    let Some(ideal) = rho.ideal() else {
        return Ok((0.0, 0.0));
    };
    let delta = rho.trace_deficit().max(0.0);
    if delta == 0.0 {
        return Ok((0.0, 0.0));
    }
    if !ideal.energy.is_finite() {
        return Err(usage("truncation correction needs a finite ideal energy"));
    }
    let m = rho.modes();
    let kept = 1.0 - delta;
    let e_phi = rho.energy() / kept;
    if ideal.fock_diagonal {
        let e = ideal.energy.max(e_phi);
        return Ok((delta, truncation_certificate(delta, e, m)?));
    }
    let eps = delta.sqrt().min(1.0);
    let e_tail = (ideal.energy - kept * e_phi).max(0.0);
    let e_abs = eps * (e_phi + e_tail / delta);
    Ok((eps, truncation_certificate_abs(eps, e_abs, m)?))
}
