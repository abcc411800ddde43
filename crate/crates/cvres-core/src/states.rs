//! State families and Gaussian descriptors.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{usage, Error, Result};
use crate::fock_core::{coherent_amplitudes, eigh, poisson_tail, CMatrix, DensityOperator, IdealInfo};
use crate::special::{ln_binomial, ln_poisson};
use crate::C64;

/// Default bound on the truncation deficit accepted by [`make_state`].
pub const DEFAULT_DEFICIT_TOL: f64 = 1e-8;
/// Largest cutoff for which a Basel state is materialized densely.
pub const BASEL_DENSE_LIMIT: usize = 4096;
const MAX_SEARCH_CUTOFF: usize = 20_000;

/// Parity label of a cat state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+", alias = "even", alias = "plus")]
    Plus,
    #[serde(rename = "-", alias = "odd", alias = "minus")]
    Minus,
}

impl Sign {
    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// State family with its parameters. Cat amplitudes and squeezing are real.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum Family {
    Fock { n: usize },
    Coherent {
        alpha: f64,
        #[serde(default)]
        alpha_im: f64,
    },
    Thermal { nu: f64 },
    NoisyFock { n: usize, nu: f64, p: f64 },
    Cat { alpha: f64, sign: Sign },
    Squeezed { r: f64 },
    Basel { n_max: usize },
}

fn one() -> usize {
    1
}

/// A family, a per-mode cutoff and a mode count.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateSpec {
    #[serde(flatten)]
    pub family: Family,
    pub cutoff: usize,
    #[serde(default = "one")]
    pub modes: usize,
}

impl StateSpec {
    pub fn new(family: Family, cutoff: usize) -> Self {
        Self { family, cutoff, modes: 1 }
    }

    pub fn with_cutoff(self, cutoff: usize) -> Self {
        Self { cutoff, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |x: f64, name: &str| {
            if x.is_finite() {
                Ok(())
            } else {
                Err(usage(format!("parameter {name} must be finite")))
            }
        };
        if self.modes != 1 {
            return Err(usage("state families are single-mode; build products with tensor_states"));
        }
        if self.cutoff == 0 {
            return Err(usage("cutoff must be positive"));
        }
        match self.family {
            Family::Fock { .. } | Family::Basel { .. } => Ok(()),
            Family::Coherent { alpha, alpha_im } => finite(alpha, "alpha").and(finite(alpha_im, "alpha_im")),
            Family::Thermal { nu } => {
                finite(nu, "nu")?;
                (nu >= 0.0).then_some(()).ok_or_else(|| usage("nu must be nonnegative"))
            }
            Family::NoisyFock { nu, p, .. } => {
                finite(nu, "nu")?;
                finite(p, "p")?;
                if nu < 0.0 {
                    return Err(usage("nu must be nonnegative"));
                }
                (0.0..=1.0).contains(&p).then_some(()).ok_or_else(|| usage("p must lie in [0, 1]"))
            }
            Family::Cat { alpha, sign } => {
                finite(alpha, "alpha")?;
                if sign == Sign::Minus && alpha == 0.0 {
                    return Err(usage("odd cat state is undefined at alpha = 0"));
                }
                Ok(())
            }
            Family::Squeezed { r } => finite(r, "r"),
        }
    }

    /// Mean photon number of the untruncated state.
    pub fn ideal_energy(&self) -> f64 {
        match self.family {
            Family::Fock { n } => n as f64,
            Family::Coherent { alpha, alpha_im } => alpha * alpha + alpha_im * alpha_im,
            Family::Thermal { nu } => nu,
            Family::NoisyFock { n, nu, p } => p * n as f64 + (1.0 - p) * nu,
            Family::Cat { alpha, sign } => {
                let t = alpha * alpha;
                match sign {
                    Sign::Plus => t * t.tanh(),
                    Sign::Minus => t / t.tanh(),
                }
            }
            Family::Squeezed { r } => r.sinh().powi(2),
            Family::Basel { .. } => f64::INFINITY,
        }
    }

    pub fn is_pure(&self) -> bool {
        match self.family {
            Family::Fock { .. } | Family::Coherent { .. } | Family::Cat { .. } | Family::Squeezed { .. } => true,
            Family::Thermal { nu } => nu == 0.0,
            Family::NoisyFock { n, nu, p } => p == 1.0 || (nu == 0.0 && (p == 0.0 || n == 0)),
            Family::Basel { .. } => false,
        }
    }

    pub fn is_fock_diagonal(&self) -> bool {
        match self.family {
            Family::Fock { .. } | Family::Thermal { .. } | Family::NoisyFock { .. } | Family::Basel { .. } => true,
            Family::Coherent { alpha, alpha_im } => alpha == 0.0 && alpha_im == 0.0,
            Family::Cat { alpha, .. } => alpha == 0.0,
            Family::Squeezed { r } => r == 0.0,
        }
    }

    /// Weight of the untruncated state on Fock levels `>= d`.
    pub fn deficit_at(&self, d: usize) -> f64 {
        match self.family {
            Family::Fock { n } => (n >= d) as u8 as f64,
            Family::Coherent { alpha, alpha_im } => poisson_tail(alpha * alpha + alpha_im * alpha_im, d),
            Family::Thermal { nu } => thermal_tail(nu, d),
            Family::NoisyFock { n, nu, p } => p * (n >= d) as u8 as f64 + (1.0 - p) * thermal_tail(nu, d),
            Family::Cat { alpha, sign } => cat_tail(alpha, sign, d),
            Family::Squeezed { r } => squeezed_tail(r, d),
            Family::Basel { n_max } => basel_weights(n_max).iter().filter(|w| w.0 >= d as u128).map(|w| w.1).sum(),
        }
    }

    /// Smallest cutoff with deficit at most `tol`.
    pub fn required_cutoff(&self, tol: f64) -> Option<usize> {
        match self.family {
            Family::Fock { n } => return Some(n + 1),
            Family::Basel { n_max } => return 1usize.checked_shl(n_max as u32).map(|k| k + 1),
            _ => {}
        }
        (1..=MAX_SEARCH_CUTOFF).find(|&d| self.deficit_at(d) <= tol)
    }
}

fn thermal_tail(nu: f64, d: usize) -> f64 {
    if nu == 0.0 {
        0.0
    } else {
        (nu / (1.0 + nu)).powi(d as i32)
    }
}

fn thermal_weights(nu: f64, d: usize) -> Vec<f64> {
    let q = nu / (1.0 + nu);
    (0..d).map(|k| if k == 0 { 1.0 / (1.0 + nu) } else { q.powi(k as i32) / (1.0 + nu) }).collect()
}

fn cat_norm_sqr(alpha: f64, sign: Sign) -> f64 {
    // N² = 1/(2(1 ± e^{-2α²}))
    let e = (-2.0 * alpha * alpha).exp();
    match sign {
        Sign::Plus => 1.0 / (2.0 * (1.0 + e)),
        Sign::Minus => 1.0 / (2.0 * (-(-2.0 * alpha * alpha).exp_m1())),
    }
}

fn cat_tail(alpha: f64, sign: Sign, d: usize) -> f64 {
    let t = alpha * alpha;
    let parity = if sign == Sign::Plus { 0 } else { 1 };
    let n2 = cat_norm_sqr(alpha, sign);
    let mut acc = 0.0;
    let mut k = d;
    loop {
        if k % 2 == parity {
            let term = 4.0 * n2 * ln_poisson(k, t).exp();
            acc += term;
            if k as f64 > t && (term <= acc * 1e-18 || term == 0.0) {
                break;
            }
        }
        k += 1;
    }
    acc
}

fn squeezed_ln_amp(r: f64, n: usize) -> f64 {
    if n == 0 {
        return -0.5 * r.cosh().ln();
    }
    -0.5 * r.cosh().ln() + 0.5 * ln_binomial(2 * n, n) + n as f64 * (0.5 * r.tanh().abs()).ln()
}

fn squeezed_tail(r: f64, d: usize) -> f64 {
    if r == 0.0 {
        return 0.0;
    }
    let mut acc = 0.0;
    let mut n = d.div_ceil(2);
    loop {
        let term = (2.0 * squeezed_ln_amp(r, n)).exp();
        acc += term;
        // terms decay geometrically with ratio below tanh²r
        let ratio = r.tanh().powi(2);
        if term <= acc * 1e-17 * (1.0 - ratio) || term == 0.0 {
            let rest = term * ratio / (1.0 - ratio);
            return acc + rest;
        }
        n += 1;
    }
}

/// Basel weights `(6/π²)/(n+1)²` on Fock levels `2^n`, `n <= n_max`; the
/// levels are kept as integers and the list is never densified here.
pub fn basel_weights(n_max: usize) -> Vec<(u128, f64)> {
    let c = 6.0 / (core::f64::consts::PI * core::f64::consts::PI);
    (0..=n_max.min(127)).map(|n| (1u128 << n, c / ((n + 1) as f64).powi(2))).collect()
}

/// Truncated Fock amplitudes of the pure families.
pub fn pure_amplitudes(spec: &StateSpec) -> Option<Vec<C64>> {
    let d = spec.cutoff;
    let mut v = vec![C64::new(0.0, 0.0); d];
    match spec.family {
        Family::Fock { n } => {
            if n < d {
                v[n] = C64::new(1.0, 0.0);
            }
        }
        Family::Coherent { alpha, alpha_im } => v = coherent_amplitudes(C64::new(alpha, alpha_im), d),
        Family::Cat { alpha, sign } => {
            let n = cat_norm_sqr(alpha, sign).sqrt();
            let plus = coherent_amplitudes(C64::new(alpha, 0.0), d);
            for (k, a) in plus.iter().enumerate() {
                let s = if k % 2 == 0 { 1.0 } else { -1.0 };
                v[k] = a * (n * (1.0 + sign.as_f64() * s));
            }
        }
        Family::Squeezed { r } => {
            let s = if r > 0.0 { -1.0 } else { 1.0 };
            for n in 0..d.div_ceil(2) {
                let mag = squeezed_ln_amp(r, n).exp();
                v[2 * n] = C64::new(if n % 2 == 0 { mag } else { s * mag }, 0.0);
                if r == 0.0 && n > 0 {
                    v[2 * n] = C64::new(0.0, 0.0);
                }
            }
        }
        _ => return None,
    }
    Some(v)
}

/// Builds the truncated, subnormalized state; see [`make_state_with_tol`].
pub fn make_state(spec: &StateSpec) -> Result<DensityOperator> {
    make_state_with_tol(spec, DEFAULT_DEFICIT_TOL)
}

/// Builds the truncated state without renormalizing. Fails with the required
/// cutoff when the trace deficit would exceed `tol` (finite-energy families).
pub fn make_state_with_tol(spec: &StateSpec, tol: f64) -> Result<DensityOperator> {
    spec.validate()?;
    let d = spec.cutoff;
    let ideal = IdealInfo { energy: spec.ideal_energy(), pure: spec.is_pure(), fock_diagonal: spec.is_fock_diagonal() };
    if let Family::Basel { n_max } = spec.family {
        let need = spec.required_cutoff(0.0).ok_or_else(|| usage("basel level 2^n_max overflows"))?;
        if d < need {
            return Err(Error::InsufficientCutoff { required: need, got: d });
        }
        if d > BASEL_DENSE_LIMIT {
            return Err(usage(format!(
                "basel state with cutoff {d} exceeds the dense limit {BASEL_DENSE_LIMIT}; use basel_weights"
            )));
        }
        let mut w = vec![0.0; d];
        for (k, p) in basel_weights(n_max) {
            w[k as usize] = p;
        }
        return Ok(DensityOperator::from_diagonal(1, d, &w)?.with_ideal(ideal));
    }
    let deficit = spec.deficit_at(d);
    if deficit > tol {
        let required = spec.required_cutoff(tol).unwrap_or(MAX_SEARCH_CUTOFF);
        return Err(Error::InsufficientCutoff { required, got: d });
    }
    let rho = match spec.family {
        Family::Thermal { nu } => DensityOperator::from_diagonal(1, d, &thermal_weights(nu, d))?,
        Family::NoisyFock { n, nu, p } => {
            let mut w: Vec<f64> = thermal_weights(nu, d).iter().map(|x| (1.0 - p) * x).collect();
            w[n] += p;
            DensityOperator::from_diagonal(1, d, &w)?
        }
        _ => {
            let psi = pure_amplitudes(spec).expect("pure family");
            DensityOperator::from_pure(1, d, &psi)?
        }
    };
    Ok(rho.with_ideal(ideal))
}

/// Mean vector and covariance `V_jk = Tr[ρ{R_j,R_k}] − 2 s_j s_k` with
/// `R = (x, p)`, `x = (a + a†)/√2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianDescriptor {
    pub s: Vec<f64>,
    /// Row-major `2m × 2m`.
    pub v: Vec<f64>,
}

impl GaussianDescriptor {
    pub fn modes(&self) -> usize {
        self.s.len() / 2
    }

    /// Checks symmetry and `V + iΩ ⪰ 0` within `1e-10`.
    pub fn validate(&self) -> Result<()> {
        let n = self.s.len();
        if !n.is_multiple_of(2) || self.v.len() != n * n {
            return Err(usage("descriptor dimensions must be 2m and 2m x 2m"));
        }
        for i in 0..n {
            for j in 0..n {
                if (self.v[i * n + j] - self.v[j * n + i]).abs() > 1e-10 {
                    return Err(usage("covariance must be symmetric"));
                }
            }
        }
        let m = CMatrix::from_fn(n, |i, j| {
            let omega = if i / 2 == j / 2 && i != j {
                if i % 2 == 0 {
                    1.0
                } else {
                    -1.0
                }
            } else {
                0.0
            };
            C64::new(self.v[i * n + j], omega)
        });
        let min = eigh(&m).values[0];
        if min < -1e-10 {
            return Err(usage(format!("covariance violates the uncertainty relation (eigenvalue {min:e})")));
        }
        Ok(())
    }

    /// `det(V + 1)`.
    pub fn det_v_plus_identity(&self) -> f64 {
        let n = self.s.len();
        let mut a: Vec<f64> = self.v.clone();
        for i in 0..n {
            a[i * n + i] += 1.0;
        }
        determinant(&mut a, n)
    }
}

fn determinant(a: &mut [f64], n: usize) -> f64 {
    let mut det = 1.0;
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i * n + col].abs().partial_cmp(&a[j * n + col].abs()).unwrap()).unwrap();
        if a[piv * n + col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            for k in 0..n {
                a.swap(piv * n + k, col * n + k);
            }
            det = -det;
        }
        let p = a[col * n + col];
        det *= p;
        for i in col + 1..n {
            let f = a[i * n + col] / p;
            for k in col..n {
                a[i * n + k] -= f * a[col * n + k];
            }
        }
    }
    det
}

/// Closed-form descriptor of the Gaussian families (squeezing along `x`
/// for `r > 0`, matching the amplitude convention of [`make_state`]).
pub fn gaussian_descriptor(spec: &StateSpec) -> Result<GaussianDescriptor> {
    spec.validate()?;
    let gd = match spec.family {
        Family::Coherent { alpha, alpha_im } => GaussianDescriptor {
            s: vec![core::f64::consts::SQRT_2 * alpha, core::f64::consts::SQRT_2 * alpha_im],
            v: vec![1.0, 0.0, 0.0, 1.0],
        },
        Family::Thermal { nu } => {
            let x = 2.0 * nu + 1.0;
            GaussianDescriptor { s: vec![0.0, 0.0], v: vec![x, 0.0, 0.0, x] }
        }
        Family::Squeezed { r } => {
            GaussianDescriptor { s: vec![0.0, 0.0], v: vec![(-2.0 * r).exp(), 0.0, 0.0, (2.0 * r).exp()] }
        }
        _ => return Err(usage("gaussian descriptor needs a coherent, thermal or squeezed family")),
    };
    Ok(gd)
}

/// First and second moments of a single-mode truncated state.
pub fn moments_descriptor(rho: &DensityOperator) -> Result<GaussianDescriptor> {
    if rho.modes() != 1 {
        return Err(usage("moments are implemented for single-mode states"));
    }
    let m = rho.matrix();
    let d = rho.cutoff();
    let tr = rho.trace();
    let mut a1 = C64::new(0.0, 0.0);
    let mut a2 = C64::new(0.0, 0.0);
    for k in 1..d {
        a1 += m[(k, k - 1)] * (k as f64).sqrt();
        if k >= 2 {
            a2 += m[(k, k - 2)] * ((k * (k - 1)) as f64).sqrt();
        }
    }
    let n = rho.energy();
    let sq2 = core::f64::consts::SQRT_2;
    let x = sq2 * a1.re;
    let p = sq2 * a1.im;
    let vxx = 2.0 * a2.re + 2.0 * n + tr - 2.0 * x * x;
    let vpp = -2.0 * a2.re + 2.0 * n + tr - 2.0 * p * p;
    let vxp = 2.0 * a2.im - 2.0 * x * p;
    Ok(GaussianDescriptor { s: vec![x, p], v: vec![vxx, vxp, vxp, vpp] })
}

#[cfg(test)]
mod tests;
