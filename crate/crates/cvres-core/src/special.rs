//! Scalar special functions: log-gamma, the thermal entropy `g`, Poisson
//! weights in the log domain, and Gauss–Laguerre nodes.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;

use crate::fock_core::eigh_real_symmetric;
use crate::LOG2_E;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural logarithm of the gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection keeps the series in its accurate range
        let pi = core::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    0.5 * (2.0 * core::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// `ln(n!)`, summed exactly for small `n`.
pub fn ln_factorial(n: usize) -> f64 {
    if n < 32 {
        (2..=n).map(|k| (k as f64).ln()).sum()
    } else {
        ln_gamma(n as f64 + 1.0)
    }
}

/// `ln C(n, k)`.
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// Lower bound on `ln(k!)` valid for every real `k >= 1`.
pub fn ln_factorial_lower(k: f64) -> f64 {
    k * k.ln() - k + 0.5 * (2.0 * core::f64::consts::PI * k).ln() + 1.0 / (12.0 * k + 1.0)
}

/// `ln` of the Poisson weight `e^{-t} t^k / k!`.
pub fn ln_poisson(k: usize, t: f64) -> f64 {
    if t == 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    -t + k as f64 * t.ln() - ln_factorial(k)
}

/// Poisson weights `e^{-t} t^k / k!` for `k < n`.
pub fn poisson_weights(t: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| ln_poisson(k, t).exp()).collect()
}

/// `-x log2 x` with the convention `0 log 0 = 0`.
pub fn neg_xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.log2()
    }
}

/// Entropy in bits of a single-mode thermal state with mean photon number `x`:
/// `g(x) = (x+1) log2(x+1) - x log2 x`, with `g(0) = 0`.
pub fn g_bits(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if !x.is_finite() {
        return f64::INFINITY;
    }
    // log1p form avoids cancellation for large x
    LOG2_E * (x.ln_1p() + x * (1.0 / x).ln_1p())
}

/// Numerically stable `ln(sum(exp(v)))`.
pub fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Nodes and weights of the `n`-point Gauss–Laguerre rule for the weight
/// `e^{-t}` on `[0, ∞)`.
pub fn gauss_laguerre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut a = alloc::vec![0.0; n * n];
    for i in 0..n {
        a[i * n + i] = (2 * i + 1) as f64;
        if i + 1 < n {
            a[i * n + i + 1] = (i + 1) as f64;
            a[(i + 1) * n + i] = (i + 1) as f64;
        }
    }
    let mut nodes = eigh_real_symmetric(&a, n);
    nodes.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut weights = Vec::with_capacity(n);
    for x in nodes.iter_mut() {
        for _ in 0..3 {
            let (ln, lnm1) = laguerre_pair(n, *x);
            let deriv = n as f64 * (ln - lnm1) / *x;
            if deriv != 0.0 && deriv.is_finite() {
                *x -= ln / deriv;
            }
        }
        // x/((n+1)² L_{n+1}²) and x/(n² L_{n-1}²) err in opposite directions
        // under a perturbed node; their geometric mean cancels the first order
        let (lnp1, _) = laguerre_pair(n + 1, *x);
        let (_, lnm1) = laguerre_pair(n, *x);
        let nf = n as f64;
        weights.push(*x / (nf * (nf + 1.0) * (lnp1 * lnm1).abs()));
    }
    (nodes, weights)
}

/// `(L_n(x), L_{n-1}(x))` by the three-term recurrence.
fn laguerre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut prev = 1.0;
    let mut cur = 1.0 - x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - x) * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ln_gamma_matches_factorials() {
        let mut f = 1.0f64;
        for n in 1..25 {
            f *= n as f64;
            assert_relative_eq!(ln_gamma(n as f64 + 1.0), f.ln(), max_relative = 1e-13);
        }
        assert_relative_eq!(ln_gamma(0.5), 0.5 * core::f64::consts::PI.ln(), epsilon = 1e-13);
    }

    #[test]
    fn stirling_lower_bound_holds() {
        for k in [1usize, 2, 5, 10, 50, 200, 1000] {
            assert!(ln_factorial_lower(k as f64) <= ln_factorial(k) + 1e-12);
            assert!(ln_factorial(k) - ln_factorial_lower(k as f64) < 5e-3 / k as f64);
        }
    }

    #[test]
    fn g_values() {
        assert_eq!(g_bits(0.0), 0.0);
        assert_relative_eq!(g_bits(1.0), 2.0, epsilon = 1e-14);
        let x: f64 = 20.0;
        let direct = 21.0 * 21f64.log2() - x * x.log2();
        assert_relative_eq!(g_bits(x), direct, epsilon = 1e-12);
    }

    #[test]
    fn laguerre_rule_integrates_polynomials() {
        let (x, w) = gauss_laguerre(64);
        let s0: f64 = w.iter().sum();
        assert_relative_eq!(s0, 1.0, epsilon = 1e-13);
        // ∫ t^5 e^{-t} = 120
        let s5: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(5)).sum();
        assert_relative_eq!(s5, 120.0, max_relative = 1e-12);
        let s20: f64 = x.iter().zip(&w).map(|(x, w)| w * (x.powi(20) / 2.43290200817664e18)).sum();
        assert_relative_eq!(s20, 1.0, max_relative = 1e-10);
    }

    #[test]
    fn poisson_weights_sum_to_one() {
        let p = poisson_weights(3.0, 60);
        assert_relative_eq!(p.iter().sum::<f64>(), 1.0, epsilon = 1e-14);
    }
}
