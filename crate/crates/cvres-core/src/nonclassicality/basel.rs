//! Certified lower bound on the measured monotone of the Basel-type state
//! `Σ_n (6/π²)(n+1)^{−2}|2ⁿ⟩⟨2ⁿ|` from the diagonal witness
//! `L_N = 𝟙 + Σ_{1<=n<=N} (2^{n/3} − 1)|2ⁿ⟩⟨2ⁿ|`. Every quantity is handled in
//! the log domain because the Fock indices reach `2^N`.

#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::special::ln_gamma;
use crate::LOG2_E;

const LN2: f64 = core::f64::consts::LN_2;
const BASEL_NORM: f64 = 6.0 / (core::f64::consts::PI * core::f64::consts::PI);
/// Terms with `|n − log₂t| <= NEAR` are evaluated individually.
const NEAR: f64 = 6.0;
/// Fine bins (in `log₂t`) below this exponent, coarse bins above.
const FINE_LIMIT: f64 = 24.0;
const FINE_WIDTH: f64 = 1.0 / 64.0;
const COARSE_WIDTH: f64 = 0.5;
const LOW_START: f64 = -4.0;

/// Components of the Basel bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaselBound {
    /// `Tr[ρ log₂L_N]`.
    pub witness_bits: f64,
    /// Certified upper bound on `sup_t Σ_n a_n Poi_{2ⁿ}(t)`.
    pub sup_excess: f64,
    /// `witness_bits − log₂(1 + sup_excess)`.
    pub value_bits: f64,
}

/// `Tr[ρ log₂L_N] = (2/π²) Σ_{n<=N} n/(n+1)²`.
pub fn basel_witness_bits(n_max: u64) -> f64 {
    let mut acc = 0.0;
    // summing small terms first limits rounding drift
    for n in (1..=n_max).rev() {
        let x = n as f64;
        acc += x / ((x + 1.0) * (x + 1.0));
    }
    BASEL_NORM / 3.0 * acc
}

/// `ln a_n` with `a_n = 2^{n/3} − 1`.
fn ln_coefficient(n: f64) -> f64 {
    (n * LN2 / 3.0).exp_m1().ln()
}

/// Upper bound on `ln Poi_{2ⁿ}(2^u)` from Robbins' lower bound on `k!`:
/// `ln Poi_k(t) <= −k·v(t/k) − ½ln(2πk) − 1/(12k+1)`, `v(x) = x − 1 − ln x`.
fn ln_poisson_upper(n: f64, u: f64) -> f64 {
    let ln_k = n * LN2;
    let k = ln_k.exp();
    let d = (u - n) * LN2;
    let v = if d.abs() < 1.0 {
        let y = d.exp_m1();
        y - y.ln_1p()
    } else {
        d.exp() - 1.0 - d
    };
    let kv = if v <= 0.0 { 0.0 } else { (ln_k + v.ln()).exp() };
    -kv - 0.5 * (2.0 * core::f64::consts::PI).ln() - 0.5 * ln_k - (12.0 * k + 1.0).recip()
}

/// Upper bound on `Σ_{1<=n<=N} a_n Poi_{2ⁿ}(t)` for `log₂t ∈ [u0, u1]`;
/// `u0 = −∞` covers `[0, 2^{u1}]`.
fn bin_bound(n_max: u64, u0: f64, u1: f64) -> f64 {
    let nf = n_max as f64;
    let lo = if u0.is_finite() { (u0 - NEAR).floor().max(1.0) } else { 1.0 };
    let hi = (u1 + NEAR).ceil().min(nf);
    let mut acc = 0.0;
    let mut n = lo;
    while n <= hi {
        // Poi_k(t) is unimodal in t with its peak at t = k
        let u = if n > u1 {
            u1
        } else if n < u0 {
            u0
        } else {
            n
        };
        acc += (ln_coefficient(n) + ln_poisson_upper(n, u)).exp();
        n += 1.0;
    }
    // far side above: v(x) >= (n − u1)ln2 − 1 >= c for every n > hi
    let n_hi = hi + 1.0;
    if n_hi <= nf {
        let c = (n_hi - u1) * LN2 - 1.0;
        let first = (n_hi * LN2 / 3.0 - c * (n_hi * LN2).exp()).exp();
        let ratio = (LN2 / 3.0 - c * (n_hi * LN2).exp()).exp();
        acc += first / (1.0 - ratio);
    }
    // far side below: k·v(t/k) >= t/2 once t/k >= 2⁶, and at most u0 terms
    if u0.is_finite() && lo > 1.0 {
        let count = lo - 1.0;
        acc += (count.ln() + (lo - 1.0) * LN2 / 3.0 - 0.5 * (u0 * LN2).exp()).exp();
    }
    acc
}

/// Certified upper bound on `sup_t Σ_n a_n Poi_{2ⁿ}(t)` over all `t >= 0`.
pub fn basel_sup_excess(n_max: u64) -> f64 {
    if n_max == 0 {
        return 0.0;
    }
    let mut best = bin_bound(n_max, f64::NEG_INFINITY, LOW_START);
    let end = n_max as f64 + NEAR + 1.5;
    let mut u = LOW_START;
    while u < end {
        let w = if u < FINE_LIMIT { FINE_WIDTH } else { COARSE_WIDTH };
        best = best.max(bin_bound(n_max, u, u + w));
        u += w;
    }
    // beyond the last bin every term sits below its mode by a factor >= 2^{7.5}
    let nf = n_max as f64;
    let tail = (nf.ln() + nf * LN2 / 3.0 - 0.5 * (end * LN2).exp()).exp();
    best.max(tail)
}

/// Certified lower bound (bits) on the measured monotone of the Basel-type
/// state using the witness `L_N`.
pub fn basel_divergence_bound(n_max: u64) -> BaselBound {
    let witness_bits = basel_witness_bits(n_max);
    let sup_excess = basel_sup_excess(n_max);
    BaselBound { witness_bits, sup_excess, value_bits: witness_bits - LOG2_E * sup_excess.ln_1p() }
}

/// The coarser variant that bounds the supremum by the sum of per-term
/// suprema with coefficients `2^{n/3}`:
/// `Tr[ρ log₂L_N] − log₂(1 + Σ_{n<=N} 2^{n/3} Poi_{2ⁿ}(2ⁿ))`.
pub fn basel_divergence_sum_of_sups(n_max: u64) -> f64 {
    let mut s = 0.0;
    for n in 0..=n_max {
        let nf = n as f64;
        let ln_peak = if n < 40 {
            let k = (nf * LN2).exp();
            k * k.ln() - k - ln_gamma(k + 1.0)
        } else {
            ln_poisson_upper(nf, nf)
        };
        s += (nf * LN2 / 3.0 + ln_peak).exp();
    }
    basel_witness_bits(n_max) - LOG2_E * s.ln_1p()
}
