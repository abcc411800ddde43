#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;


use crate::special::{ln_factorial, ln_poisson};
use crate::C64;

/// Truncated coherent-state amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct CoherentVector {
    pub amplitudes: Vec<C64>,
    /// `1 − Σ|amplitude|²`, the Poisson mass on levels `>= d`.
    pub norm_deficit: f64,
}

impl CoherentVector {
    /// Flags a deficit above the caller's tolerance.
    pub fn exceeds(&self, tol: f64) -> bool {
        self.norm_deficit > tol
    }
}

/// `e^{-|α|²/2} α^k / √(k!)` for `k < d`.
pub fn coherent_vector(alpha: C64, d: usize) -> CoherentVector {
    CoherentVector { amplitudes: coherent_amplitudes(alpha, d), norm_deficit: poisson_tail(alpha.norm_sqr(), d) }
}

pub fn coherent_amplitudes(alpha: C64, d: usize) -> Vec<C64> {
    let t = alpha.norm_sqr();
    if t == 0.0 {
        let mut v = alloc::vec![C64::new(0.0, 0.0); d];
        if d > 0 {
            v[0] = C64::new(1.0, 0.0);
        }
        return v;
    }
    let (r, theta) = alpha.to_polar();
    let lr = r.ln();
    (0..d)
        .map(|k| {
            let mag = (-0.5 * t + k as f64 * lr - 0.5 * ln_factorial(k)).exp();
            C64::from_polar(mag, k as f64 * theta)
        })
        .collect()
}

/// Poisson mass `Σ_{k>=d} e^{-t} t^k / k!`, summed directly.
pub fn poisson_tail(t: f64, d: usize) -> f64 {
    if t == 0.0 {
        return if d == 0 { 1.0 } else { 0.0 };
    }
    let mode = t.floor() as usize;
    if d <= mode {
        let head: f64 = (0..d).map(|k| ln_poisson(k, t).exp()).sum();
        return (1.0 - head).max(0.0);
    }
    let mut acc = 0.0;
    let mut k = d;
    loop {
        let term = ln_poisson(k, t).exp();
        acc += term;
        if term <= acc * 1e-18 || term == 0.0 {
            break;
        }
        k += 1;
    }
    acc
}

/// `(a† − ᾱ)|α>` restricted to levels `< d`; exact when `d` is the support
/// size of the operator it is paired with.
pub fn displaced_one(alpha: C64, amps: &[C64]) -> Vec<C64> {
    let ac = alpha.conj();
    (0..amps.len())
        .map(|k| {
            let up = if k > 0 { amps[k - 1] * (k as f64).sqrt() } else { C64::new(0.0, 0.0) };
            up - amps[k] * ac
        })
        .collect()
}
