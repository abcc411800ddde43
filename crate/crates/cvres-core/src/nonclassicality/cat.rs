//! Reflection-symmetric programs for cat states, solved exactly on
//! `span{|α⟩, |−α⟩, |0⟩}` without Fock truncation.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::sup::{certify_sup, SupProblem};
use super::{Certificate, MonotoneBound, Quantity};
use crate::error::usage;
use crate::optim::{nelder_mead, NelderMead, OptimizerConfig};
use crate::states::Sign;
use crate::{Result, C64, LOG2_E};

/// `⟨γ|β⟩` for coherent states.
pub(crate) fn coherent_overlap(gamma: C64, beta: C64) -> C64 {
    (-0.5 * gamma.norm_sqr() - 0.5 * beta.norm_sqr() + gamma.conj() * beta).exp()
}

/// Orthonormal basis `(ψ⁺, χ, ψ⁻)` of the symmetric span, each written as
/// real combinations of `(|α⟩, |−α⟩, |0⟩)`; `χ` is `|0⟩` orthogonalized
/// against `ψ⁺`.
pub(crate) struct CatBasis {
    pub alpha: f64,
    pub coef: [[f64; 3]; 3],
}

impl CatBasis {
    pub fn new(alpha: f64) -> Self {
        let t = alpha * alpha;
        let np = (2.0 * (1.0 + (-2.0 * t).exp())).sqrt().recip();
        let nm = (2.0 * -(-2.0 * t).exp_m1()).sqrt().recip();
        let ov = 2.0 * np * (-0.5 * t).exp();
        let nchi = (1.0 - ov * ov).max(0.0).sqrt();
        let plus = [np, np, 0.0];
        let chi = [-ov * np / nchi, -ov * np / nchi, 1.0 / nchi];
        let minus = [nm, -nm, 0.0];
        Self { alpha, coef: [plus, chi, minus] }
    }

    fn points(&self) -> [C64; 3] {
        [C64::new(self.alpha, 0.0), C64::new(-self.alpha, 0.0), C64::new(0.0, 0.0)]
    }

    /// `⟨e_a|β⟩` and `⟨e_a|(a† − β̄)|β⟩` for the three basis vectors.
    fn overlaps(&self, beta: C64) -> ([C64; 3], [C64; 3]) {
        let pts = self.points();
        let mut v = [C64::new(0.0, 0.0); 3];
        let mut dv = [C64::new(0.0, 0.0); 3];
        for (a, row) in self.coef.iter().enumerate() {
            for (g, &c) in pts.iter().zip(row) {
                let o = coherent_overlap(*g, beta);
                v[a] += o * c;
                dv[a] += o * (g.conj() - beta.conj()) * c;
            }
        }
        (v, dv)
    }

    /// Decreasing bound on `Σ_a |⟨e_a|β⟩|²` for `|β| >= α`.
    fn envelope(&self, t: f64) -> f64 {
        let r = t.sqrt();
        let pts = self.points();
        self.coef
            .iter()
            .map(|row| {
                let s: f64 = pts.iter().zip(row).map(|(g, c)| c.abs() * (-0.5 * (r - g.norm()).max(0.0).powi(2)).exp()).sum();
                s * s
            })
            .sum()
    }
}

/// `L = e^K ⊕ e^w` on `span{ψ⁺, χ} ⊕ span{ψ⁻}` with `K` real symmetric.
#[derive(Clone, Copy, Debug)]
struct CatAnsatz {
    l: [[f64; 3]; 3],
    /// `⟨ψ^±|log L|ψ^±⟩` in nats for both parities.
    log_plus: f64,
    log_minus: f64,
    norm: f64,
}

impl CatAnsatz {
    fn new(x: &[f64]) -> Self {
        let (k11, k12, k22, w) = (x[0], x[1], x[2], x[3]);
        // eigendecomposition of the 2×2 block
        let mean = 0.5 * (k11 + k22);
        let diff = 0.5 * (k11 - k22);
        let rad = (diff * diff + k12 * k12).sqrt();
        let (l1, l2) = (mean + rad, mean - rad);
        let theta = 0.5 * k12.atan2(diff);
        let (c, s) = (theta.cos(), theta.sin());
        let top = l1.max(w);
        let (e1, e2, ew) = ((l1 - top).exp(), (l2 - top).exp(), (w - top).exp());
        let a11 = e1 * c * c + e2 * s * s;
        let a12 = (e1 - e2) * c * s;
        let a22 = e1 * s * s + e2 * c * c;
        Self {
            l: [[a11, a12, 0.0], [a12, a22, 0.0], [0.0, 0.0, ew]],
            log_plus: k11 - top,
            log_minus: w - top,
            norm: e1.max(ew),
        }
    }

    fn eval(&self, basis: &CatBasis, beta: C64) -> (f64, f64) {
        let (v, dv) = basis.overlaps(beta);
        let mut f = 0.0;
        let mut g = C64::new(0.0, 0.0);
        for a in 0..3 {
            for b in 0..3 {
                if self.l[a][b] != 0.0 {
                    f += (v[a].conj() * v[b]).re * self.l[a][b];
                    g += v[a].conj() * dv[b] * self.l[a][b];
                }
            }
        }
        (f, 2.0 * g.norm())
    }
}

fn approximate_sup(ansatz: &CatAnsatz, basis: &CatBasis) -> (C64, f64) {
    let reach = basis.alpha + 3.0;
    let n = 48;
    let h = reach / n as f64;
    let mut best = (C64::new(0.0, 0.0), ansatz.eval(basis, C64::new(0.0, 0.0)).0);
    // reflection symmetry: the first quadrant suffices for the search
    for i in 0..=n {
        for j in 0..=n / 2 {
            let b = C64::new(i as f64 * h, j as f64 * h);
            let f = ansatz.eval(basis, b).0;
            if f > best.1 {
                best = (b, f);
            }
        }
    }
    let cfg = NelderMead { max_evals: 200, ftol: 1e-15, initial_step: 0.5 * h };
    let (x, fx) = nelder_mead(|v: &[f64]| -ansatz.eval(basis, C64::new(v[0], v[1])).0, &[best.0.re, best.0.im], cfg);
    if -fx > best.1 {
        (C64::new(x[0], x[1]), -fx)
    } else {
        best
    }
}

/// Certified Γ lower bound for `ψ^±_α` with `L` supported on the
/// reflection-symmetric span. Works with exact overlaps, so no truncation
/// correction is involved.
pub fn cat_lower_bound(alpha: f64, sign: Sign, cfg: &OptimizerConfig) -> Result<MonotoneBound> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(usage("cat bound needs a positive finite alpha"));
    }
    cfg.validate()?;
    let basis = CatBasis::new(alpha);
    let target = |a: &CatAnsatz| if sign == Sign::Plus { a.log_plus } else { a.log_minus };
    let objective = |x: &[f64]| {
        let a = CatAnsatz::new(x);
        -(LOG2_E * target(&a) - approximate_sup(&a, &basis).1.log2())
    };
    let starts: [[f64; 4]; 4] = if sign == Sign::Plus {
        [[0.0, 0.0, -6.0, -6.0], [0.0, 0.0, -1.0, -1.0], [0.0, 0.5, -2.0, -3.0], [0.0, -0.5, -2.0, -0.5]]
    } else {
        [[-6.0, 0.0, -6.0, 0.0], [-1.0, 0.0, -1.0, 0.0], [-2.0, 0.5, -3.0, 0.0], [-0.5, -0.5, -2.0, 0.0]]
    };
    let nm = NelderMead { max_evals: 1500, ftol: 1e-12, initial_step: 0.5 };
    let mut best: Option<(Vec<f64>, f64)> = None;
    for s in starts {
        let (x, _) = nelder_mead(objective, &s, nm);
        let (x, fx) = nelder_mead(objective, &x, NelderMead { initial_step: 0.05, ..nm });
        if best.as_ref().is_none_or(|b| fx < b.1) {
            best = Some((x, fx));
        }
    }
    let (x, _) = best.expect("starts");
    let a = CatAnsatz::new(&x);
    let seed = approximate_sup(&a, &basis);
    let seeds = vec![seed, (seed.0.conj(), seed.1), (-seed.0, seed.1)];
    let problem = SupProblem {
        eval: |b: C64| a.eval(&basis, b),
        m2: (2.0 + 2.0 * core::f64::consts::SQRT_2) * a.norm,
        t_env: alpha * alpha,
        envelope: |t: f64| a.norm * basis.envelope(t),
    };
    let cert = certify_sup(&problem, &seeds, cfg.radius, cfg.sup_rtol);
    let value = LOG2_E * target(&a) - cert.upper.log2();
    let certificate = Certificate {
        truncation_epsilon: 0.0,
        truncation_correction_bits: 0.0,
        inner_sup_radius: cert.radius_sq,
        inner_sup_grid_error: (cert.upper / cert.lower).log2(),
        ansatz_description: format!("L on span(|α⟩,|−α⟩,|0⟩), K = {:?}", &x[..]),
        converged: true,
    };
    Ok(MonotoneBound::lower(Quantity::Ncm, value.max(0.0), certificate))
}
