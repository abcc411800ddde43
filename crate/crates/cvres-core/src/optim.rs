//! Small derivative-free optimizers used for low-dimensional subproblems.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

/// Symmetry used to restrict variational operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Symmetry {
    #[default]
    None,
    /// Phase-covariant: Fock-diagonal operators.
    Phase,
    /// Parity-covariant: real operators commuting with `(-1)^n`.
    Reflection,
}

/// How far the coherent supremum search reaches in `t = |α|²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RadiusPolicy {
    /// Extend past `d − 1` until the decreasing tail envelope is dominated.
    #[default]
    Auto,
    /// Search `t <= T` exactly; the tail envelope is evaluated at `T`.
    Fixed(f64),
}

/// Settings shared by the variational programs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    /// Per-mode cutoff used when a program builds its own state.
    pub cutoff: Option<usize>,
    pub max_iters: usize,
    /// Stop when successive objective gains fall below this (bits).
    pub tol: f64,
    /// Points per unit length of the coarse coherent-amplitude grid.
    pub grid_resolution: f64,
    pub radius: RadiusPolicy,
    pub symmetry: Symmetry,
    /// Relative tolerance of the certified coherent supremum.
    pub sup_rtol: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            cutoff: None,
            max_iters: 400,
            tol: 1e-10,
            grid_resolution: 6.0,
            radius: RadiusPolicy::Auto,
            symmetry: Symmetry::None,
            sup_rtol: 1e-7,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> crate::Result<()> {
        if !(self.tol > 0.0 && self.sup_rtol > 0.0 && self.grid_resolution > 0.0) {
            return Err(crate::error::usage("optimizer tolerances and grid resolution must be positive"));
        }
        if let RadiusPolicy::Fixed(t) = self.radius {
            if t.is_nan() || t <= 0.0 {
                return Err(crate::error::usage("fixed search radius must be positive"));
            }
        }
        Ok(())
    }
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a maximizer of a unimodal `f` on `[a, b]`.
pub fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        // ties move right so the leftmost maximizer survives
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    [(c, fc), (d, fd), (x, fx)].into_iter().fold((x, fx), |best, p| if p.1 > best.1 { p } else { best })
}

/// Settings for [`nelder_mead`].
#[derive(Clone, Copy, Debug)]
pub struct NelderMead {
    pub max_evals: usize,
    /// Stop when the simplex spread in `f` falls below this.
    pub ftol: f64,
    pub initial_step: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self { max_evals: 4000, ftol: 1e-12, initial_step: 0.5 }
    }
}

/// Minimizes `f` from `x0`; returns the best vertex and its value.
pub fn nelder_mead(f: impl Fn(&[f64]) -> f64, x0: &[f64], cfg: NelderMead) -> (Vec<f64>, f64) {
    let n = x0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), f(x0)));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += cfg.initial_step;
        let fx = f(&x);
        simplex.push((x, fx));
    }
    let mut evals = n + 1;
    let by_value = |a: &(Vec<f64>, f64), b: &(Vec<f64>, f64)| a.1.partial_cmp(&b.1).unwrap_or(core::cmp::Ordering::Equal);
    while evals < cfg.max_evals {
        simplex.sort_by(by_value);
        if (simplex[n].1 - simplex[0].1).abs() <= cfg.ftol * (1.0 + simplex[0].1.abs()) {
            break;
        }
        let centroid: Vec<f64> =
            (0..n).map(|j| simplex[..n].iter().map(|v| v.0[j]).sum::<f64>() / n as f64).collect();
        let along = |t: f64| -> Vec<f64> { (0..n).map(|j| centroid[j] + t * (simplex[n].0[j] - centroid[j])).collect() };
        let xr = along(-1.0);
        let fr = f(&xr);
        evals += 1;
        if fr < simplex[0].1 {
            let xe = along(-2.0);
            let fe = f(&xe);
            evals += 1;
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let xc = if fr < simplex[n].1 { along(-0.5) } else { along(0.5) };
            let fc = f(&xc);
            evals += 1;
            if fc < simplex[n].1.min(fr) {
                simplex[n] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for v in simplex.iter_mut().skip(1) {
                    for (x, b) in v.0.iter_mut().zip(&best) {
                        *x = b + 0.5 * (*x - b);
                    }
                    v.1 = f(&v.0);
                }
                evals += n;
            }
        }
    }
    simplex.sort_by(by_value);
    simplex.swap_remove(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    #[allow(unused_imports)]
    use num_traits::Float;

    #[test]
    fn golden_finds_interior_max() {
        let (x, fx) = golden_max(|t| t * (-t).exp(), 0.0, 5.0, 1e-10);
        assert!((x - 1.0).abs() < 1e-7);
        assert!((fx - (-1.0f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn nelder_mead_rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let (x, fx) = nelder_mead(f, &[-1.2, 1.0], NelderMead { max_evals: 20_000, ftol: 1e-16, initial_step: 0.5 });
        assert!(fx < 1e-10, "{fx}");
        assert!((x[0] - 1.0).abs() < 1e-4);
    }
}
