//! Exact branch-norm simulations of the conversion protocols on truncated
//! Fock spaces.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{usage, Error};
use crate::fock_core::{coherent_amplitudes, BeamSplitter, CMatrix};
use crate::states::{pure_amplitudes, Family, Sign, StateSpec};
use crate::{Result, C64};

/// Deficit allowed for the largest cat state a protocol touches.
pub const PROTOCOL_DEFICIT_TOL: f64 = 1e-12;

/// Heralded outcome of one protocol run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolOutcome {
    pub success_probability: f64,
    pub copies_in: u32,
    pub copies_out: u32,
    /// `success_probability · copies_out / copies_in`.
    pub rate_lower_bound: f64,
    /// Overlap of the normalized heralded state with the target.
    pub output_fidelity_check: f64,
    /// Cutoff per mode used by the simulation.
    pub cutoff: usize,
}

impl ProtocolOutcome {
    fn new(success_probability: f64, copies_in: u32, copies_out: u32, fidelity: f64, cutoff: usize) -> Self {
        Self {
            success_probability,
            copies_in,
            copies_out,
            rate_lower_bound: success_probability * copies_out as f64 / copies_in as f64,
            output_fidelity_check: fidelity,
            cutoff,
        }
    }
}

/// The success probability as printed for the feed-forward dilution loop.
pub fn closed_form_ps(n: usize, p: f64, lambda: f64) -> f64 {
    let nf = n as f64;
    let ln = lambda.powi(n as i32);
    p * nf * (1.0 - lambda) * lambda.powi(2 * n as i32 - 1) / ((1.0 - ln) * (p * ln + 1.0 - p))
}

/// The success probability obtained by summing the loop's geometric series:
/// `pn(1−λ)λ^{n−1}/(1−λⁿ)`.
pub fn closed_form_ps_derived(n: usize, p: f64, lambda: f64) -> f64 {
    let nf = n as f64;
    p * nf * (1.0 - lambda) * lambda.powi(n as i32 - 1) / (1.0 - lambda.powi(n as i32))
}

/// `p|n⟩⟨n| + (1−p)|0⟩⟨0| → |n−1⟩` by splitting off a mode, counting its
/// photons, retrying on 0, succeeding on 1 and aborting on 2 or more.
pub fn fock_dilution(n: usize, p: f64, lambda: f64) -> Result<ProtocolOutcome> {
    if n < 2 {
        return Err(usage("Fock dilution needs n >= 2"));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(usage("Fock dilution needs p in (0, 1]"));
    }
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(usage("Fock dilution needs a transmissivity strictly between 0 and 1"));
    }
    let d = n + 1;
    let bs = BeamSplitter::new(lambda, d)?;
    let mut input = vec![C64::new(0.0, 0.0); d * d];
    input[n * d] = C64::new(1.0, 0.0);
    let out = bs.apply(&input);
    // ancilla count distribution for the |n⟩ branch; vacuum never clicks
    let count = |k: usize| (0..d).map(|i| out[i * d + k].norm_sqr()).sum::<f64>();
    let (zero, one) = (count(0), count(1));
    // each retry multiplies the surviving |n⟩ weight by `zero`
    let success = p * one / (1.0 - zero);
    let heralded: Vec<C64> = (0..d).map(|i| out[i * d + 1]).collect();
    let norm: f64 = heralded.iter().map(|x| x.norm_sqr()).sum();
    let fidelity = heralded[n - 1].norm_sqr() / norm;
    Ok(ProtocolOutcome::new(success, 1, 1, fidelity, d))
}

/// `e^{−α²}cosh(2α²)sinh²(α²/2)/cosh²(α²)`.
pub fn lund_probability(alpha: f64) -> f64 {
    let t = alpha * alpha;
    (-t).exp() * (2.0 * t).cosh() * (0.5 * t).sinh().powi(2) / t.cosh().powi(2)
}

/// `½tanh²(α²)`.
pub fn ours_amplification_probability(alpha: f64) -> f64 {
    0.5 * (alpha * alpha).tanh().powi(2)
}

/// Both amplification protocols `ψ⁺_α ⊗ ψ⁺_α → ψ⁺_{√2α}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatAmplification {
    pub lund: ProtocolOutcome,
    pub ours: ProtocolOutcome,
}

/// Balanced dilution `ψ⁺_{√2α} → ψ⁺_α ⊗ ψ⁻_α` with both branch
/// probabilities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatDilution {
    pub outcome: ProtocolOutcome,
    pub p_plus: f64,
    pub p_minus: f64,
    /// Overlap of the `+` branch with `ψ⁺_α`.
    pub plus_fidelity: f64,
}

fn cat(alpha: f64, sign: Sign, d: usize) -> Vec<C64> {
    pure_amplitudes(&StateSpec::new(Family::Cat { alpha, sign }, d)).expect("cat states are pure")
}

fn protocol_cutoff(alpha: f64, cutoff: Option<usize>) -> Result<usize> {
    let spec = StateSpec::new(Family::Cat { alpha: core::f64::consts::SQRT_2 * alpha, sign: Sign::Plus }, 1);
    let required = spec.required_cutoff(PROTOCOL_DEFICIT_TOL).ok_or_else(|| usage("amplitude too large to simulate"))?;
    match cutoff {
        None => Ok(required.max(4)),
        Some(d) if d >= required => Ok(d),
        Some(d) => Err(Error::InsufficientCutoff { required, got: d }),
    }
}

/// Heralded mode-1 state `c·Gᵀ·c†` for the two-mode vector `c` (row index
/// mode 1) when mode 2 is hit by a measurement with Gram matrix
/// `G_{j'j} = ⟨F j'|F j⟩`.
fn herald(psi: &[C64], gram: &CMatrix, d: usize) -> CMatrix {
    let c = CMatrix::from_fn(d, |i, j| psi[i * d + j]);
    let gt = CMatrix::from_fn(d, |j, k| gram[(k, j)]);
    c.matmul(&gt).matmul(&c.adjoint())
}

/// `G = v v†` for the projection onto `⟨v|` (so `F|j⟩ = ⟨v|j⟩`).
fn projection_gram(v: &[C64]) -> CMatrix {
    CMatrix::from_fn(v.len(), |j2, j| v[j2] * v[j].conj())
}

fn outcome_of(rho1: &CMatrix, target: &[C64]) -> (f64, f64) {
    let p = rho1.trace().re;
    (p, rho1.quad_form(target) / p)
}

/// Simulates both amplification protocols. The first splits mode 2 against
/// vacuum, displaces both outputs by `α` and heralds on two on/off clicks;
/// the second measures mode 2 against `χ ∝ √cosh(2α²)|0⟩ − ψ⁺_{√2α}`.
pub fn cat_amplification(alpha: f64, cutoff: Option<usize>) -> Result<CatAmplification> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(usage("cat amplification needs a positive finite alpha"));
    }
    let d = protocol_cutoff(alpha, cutoff)?;
    let a = cat(alpha, Sign::Plus, d);
    let input: Vec<C64> = (0..d * d).map(|i| a[i / d] * a[i % d]).collect();
    let bs = BeamSplitter::new(0.5, d)?;
    let out = bs.apply(&input);
    let target = cat(core::f64::consts::SQRT_2 * alpha, Sign::Plus, d);

    let t = alpha * alpha;
    let mut chi: Vec<C64> = target.iter().map(|x| -x).collect();
    chi[0] += C64::new((2.0 * t).cosh().sqrt(), 0.0);
    let s = core::f64::consts::SQRT_2 * t.sinh();
    chi.iter_mut().for_each(|x| *x /= s);
    let (p_ours, f_ours) = outcome_of(&herald(&out, &projection_gram(&chi), d), &target);

    let (p_lund, f_lund) = outcome_of(&herald(&out, &lund_gram(alpha, d)?, d), &target);
    Ok(CatAmplification {
        lund: ProtocolOutcome::new(p_lund, 2, 1, f_lund, d),
        ours: ProtocolOutcome::new(p_ours, 2, 1, f_ours, d),
    })
}

/// Gram matrix of `F|j⟩ = (𝟙 − P)⊗(𝟙 − P) U_{1/2}|j, 0⟩` with `P` the
/// projector on `|−α⟩`: a click on both outputs after displacing each by `α`.
fn lund_gram(alpha: f64, d: usize) -> Result<CMatrix> {
    let bs = BeamSplitter::new(0.5, d)?;
    let c = coherent_amplitudes(C64::new(-alpha, 0.0), d);
    let m = &CMatrix::identity(d) - &CMatrix::outer(&c);
    let mt = CMatrix::from_fn(d, |i, j| m[(j, i)]);
    let cols: Vec<CMatrix> = (0..d)
        .map(|j| {
            let mut e = vec![C64::new(0.0, 0.0); d * d];
            e[j * d] = C64::new(1.0, 0.0);
            let v = bs.apply(&e);
            m.matmul(&CMatrix::from_fn(d, |a, b| v[a * d + b])).matmul(&mt)
        })
        .collect();
    Ok(CMatrix::from_fn(d, |j2, j| {
        let (x, y) = (cols[j2].as_slice(), cols[j].as_slice());
        x.iter().zip(y).map(|(u, v)| u.conj() * v).sum()
    }))
}

/// Splits `ψ⁺_{√2α}` against vacuum and measures mode 2 in a basis starting
/// with `ψ^±_α`; the `−` branch leaves mode 1 in `ψ⁻_α`, which pairs with a
/// `+` output into the target.
pub fn cat_dilution(alpha: f64, cutoff: Option<usize>) -> Result<CatDilution> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(usage("cat dilution needs a positive finite alpha"));
    }
    let d = protocol_cutoff(alpha, cutoff)?;
    let src = cat(core::f64::consts::SQRT_2 * alpha, Sign::Plus, d);
    let mut input = vec![C64::new(0.0, 0.0); d * d];
    for (i, &x) in src.iter().enumerate() {
        input[i * d] = x;
    }
    let out = BeamSplitter::new(0.5, d)?.apply(&input);
    let plus = cat(alpha, Sign::Plus, d);
    let minus = cat(alpha, Sign::Minus, d);
    let (p_plus, f_plus) = outcome_of(&herald(&out, &projection_gram(&plus), d), &plus);
    let (p_minus, f_minus) = outcome_of(&herald(&out, &projection_gram(&minus), d), &minus);
    Ok(CatDilution { outcome: ProtocolOutcome::new(p_minus, 2, 1, f_minus, d), p_plus, p_minus, plus_fidelity: f_plus })
}
