use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::sup::{certify_sup_radial, fast_sup_radial, poisson_mixture, SupProblem};
use super::{truncation_correction, Certificate, MonotoneBound, Quantity};
use crate::error::usage;
use crate::fock_core::DensityOperator;
use crate::optim::OptimizerConfig;
use crate::special::{ln_factorial, ln_poisson};
use crate::{Result, LOG2_E};

/// `log₂(n! eⁿ / nⁿ)`, the value of both monotones on `|n⟩`.
pub fn fock_closed_form(n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let nf = n as f64;
    LOG2_E * (ln_factorial(n) + nf - nf * nf.ln())
}

/// Result of the exact program for a Fock-diagonal distribution.
#[derive(Clone, Debug, PartialEq)]
pub struct FockDiagonalSolution {
    /// `Σ p log₂(p/q)` for the optimal Poisson mixture `q` (upper bound).
    pub upper: f64,
    /// `upper − log₂ sup_t Σ (p_n/q_n) Poi_t(n)`, certified (lower bound).
    pub lower: f64,
    /// Mixture atoms `t = |β|²` and their weights.
    pub atoms: Vec<(f64, f64)>,
    pub iterations: usize,
    pub converged: bool,
    pub radius_sq: f64,
}

struct Mixture<'a> {
    rows: &'a [usize],
    p: &'a [f64],
}

impl Mixture<'_> {
    fn column(&self, t: f64) -> Vec<f64> {
        self.rows.iter().map(|&n| ln_poisson(n, t).exp()).collect()
    }

    fn q(&self, cols: &[Vec<f64>], w: &[f64]) -> Vec<f64> {
        let mut q = vec![0.0; self.rows.len()];
        for (col, &wj) in cols.iter().zip(w) {
            for (qi, a) in q.iter_mut().zip(col) {
                *qi += wj * a;
            }
        }
        q
    }

    fn phi(&self, cols: &[Vec<f64>], w: &[f64]) -> f64 {
        let q = self.q(cols, w);
        let mut acc = -w.iter().sum::<f64>();
        for (pi, qi) in self.p.iter().zip(&q) {
            if *qi <= 0.0 {
                return f64::NEG_INFINITY;
            }
            acc += pi * qi.ln();
        }
        acc
    }

    /// Maximizes `Σ p ln(Aw) − Σ w` over `w >= 0` by projected Newton steps.
    fn optimize_weights(&self, cols: &[Vec<f64>], w: &mut [f64]) {
        let k = w.len();
        for _ in 0..200 {
            let q = self.q(cols, w);
            let r: Vec<f64> = self.p.iter().zip(&q).map(|(p, q)| p / q).collect();
            let g: Vec<f64> = cols.iter().map(|c| c.iter().zip(&r).map(|(a, ri)| a * ri).sum::<f64>() - 1.0).collect();
            let free: Vec<usize> = (0..k).filter(|&j| w[j] > 0.0 || g[j] > 0.0).collect();
            let kkt = (0..k).all(|j| if w[j] > 0.0 { g[j].abs() < 1e-14 } else { g[j] <= 1e-14 });
            if kkt || free.is_empty() {
                return;
            }
            let nf = free.len();
            let mut h = vec![0.0; nf * nf];
            for (a, &ja) in free.iter().enumerate() {
                for (b, &jb) in free.iter().enumerate() {
                    h[a * nf + b] = self
                        .p
                        .iter()
                        .zip(&q)
                        .enumerate()
                        .map(|(n, (p, qn))| p * cols[ja][n] * cols[jb][n] / (qn * qn))
                        .sum();
                }
            }
            let rhs: Vec<f64> = free.iter().map(|&j| g[j]).collect();
            let dir = solve_spd(&mut h, &rhs, nf).unwrap_or_else(|| rhs.clone());
            let base = self.phi(cols, w);
            let mut improved = false;
            // Newton direction first, projected gradient as the fallback
            for d in [&dir, &rhs_copy(&free, &g)] {
                let mut s = 1.0;
                for _ in 0..60 {
                    let mut trial = w.to_vec();
                    for (a, &j) in free.iter().enumerate() {
                        trial[j] = (w[j] + s * d[a]).max(0.0);
                    }
                    let v = self.phi(cols, &trial);
                    if v > base {
                        w.copy_from_slice(&trial);
                        improved = true;
                        break;
                    }
                    s *= 0.5;
                }
                if improved {
                    break;
                }
            }
            if !improved {
                return;
            }
        }
    }
}

impl Mixture<'_> {
    /// Gauss–Newton ascent on atom positions and weights jointly; both stay
    /// nonnegative.
    fn refine(&self, atoms: &mut Vec<f64>, w: &mut Vec<f64>) {
        let m = self.rows.len();
        for _ in 0..100 {
            let keep: Vec<usize> = (0..atoms.len()).filter(|&j| w[j] > 0.0).collect();
            *atoms = keep.iter().map(|&j| atoms[j]).collect();
            *w = keep.iter().map(|&j| w[j]).collect();
            let k = atoms.len();
            if k == 0 {
                return;
            }
            let cols: Vec<Vec<f64>> = atoms.iter().map(|&t| self.column(t)).collect();
            let q = self.q(&cols, w);
            let base = self.phi(&cols, w);
            // Jacobian of q: columns for positions then weights
            let mut jac = vec![0.0; m * 2 * k];
            for j in 0..k {
                for (i, &n) in self.rows.iter().enumerate() {
                    // d/dt Poi_t(n) = Poi_t(n−1) − Poi_t(n), finite at t = 0
                    let prev = if n == 0 { 0.0 } else { ln_poisson(n - 1, atoms[j]).exp() };
                    jac[i * 2 * k + j] = w[j] * (prev - cols[j][i]);
                    jac[i * 2 * k + k + j] = cols[j][i];
                }
            }
            let nv = 2 * k;
            let mut g = vec![0.0; nv];
            let mut h = vec![0.0; nv * nv];
            for i in 0..m {
                let r = self.p[i] / q[i];
                let s2 = self.p[i] / (q[i] * q[i]);
                let row = &jac[i * nv..(i + 1) * nv];
                for a in 0..nv {
                    g[a] += r * row[a];
                    if row[a] != 0.0 {
                        for b in 0..nv {
                            h[a * nv + b] += s2 * row[a] * row[b];
                        }
                    }
                }
            }
            for gj in g.iter_mut().skip(k) {
                *gj -= 1.0;
            }
            // projected step: bound variables pushing outward stay fixed
            let free: Vec<usize> =
                (0..nv).filter(|&a| !(g[a] <= 0.0 && if a < k { atoms[a] == 0.0 } else { w[a - k] == 0.0 })).collect();
            let nf = free.len();
            let mut hf: Vec<f64> = free.iter().flat_map(|&a| free.iter().map(move |&b| (a, b))).map(|(a, b)| h[a * nv + b]).collect();
            let gf: Vec<f64> = free.iter().map(|&a| g[a]).collect();
            let Some(df) = solve_spd(&mut hf, &gf, nf) else { return };
            let mut dir = vec![0.0; nv];
            for (x, &a) in df.iter().zip(&free) {
                dir[a] = *x;
            }
            let mut step = 1.0;
            let mut accepted = false;
            for _ in 0..40 {
                let ta: Vec<f64> = (0..k).map(|j| (atoms[j] + step * dir[j]).max(0.0)).collect();
                let tw: Vec<f64> = (0..k).map(|j| (w[j] + step * dir[k + j]).max(0.0)).collect();
                let tc: Vec<Vec<f64>> = ta.iter().map(|&t| self.column(t)).collect();
                let v = self.phi(&tc, &tw);
                if v > base {
                    let gain = v - base;
                    atoms.copy_from_slice(&ta);
                    w.copy_from_slice(&tw);
                    accepted = gain > 1e-16 * base.abs().max(1.0);
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                return;
            }
        }
    }
}

impl Mixture<'_> {
    /// Expectation-maximization sweeps on weights and Poisson means; each
    /// sweep does not decrease the likelihood.
    fn em(&self, atoms: &mut [f64], w: &mut [f64], sweeps: usize) {
        for _ in 0..sweeps {
            let cols: Vec<Vec<f64>> = atoms.iter().map(|&t| self.column(t)).collect();
            let q = self.q(&cols, w);
            for j in 0..atoms.len() {
                let mut mass = 0.0;
                let mut first = 0.0;
                for (i, &n) in self.rows.iter().enumerate() {
                    let r = self.p[i] * w[j] * cols[j][i] / q[i];
                    mass += r;
                    first += r * n as f64;
                }
                w[j] = mass;
                if mass > 0.0 {
                    atoms[j] = first / mass;
                }
            }
        }
    }
}

/// Merges atoms closer than a relative `1e-7`, summing their weights.
fn merge_atoms(atoms: &mut Vec<f64>, w: &mut Vec<f64>) {
    let mut order: Vec<usize> = (0..atoms.len()).collect();
    order.sort_by(|&a, &b| atoms[a].total_cmp(&atoms[b]));
    let mut na: Vec<f64> = Vec::with_capacity(atoms.len());
    let mut nw: Vec<f64> = Vec::with_capacity(atoms.len());
    for j in order {
        match na.last() {
            Some(&t) if (atoms[j] - t).abs() <= 1e-7 * t.max(1.0) => {
                let last = nw.len() - 1;
                let tot = nw[last] + w[j];
                if tot > 0.0 {
                    na[last] = (t * nw[last] + atoms[j] * w[j]) / tot;
                }
                nw[last] = tot;
            }
            _ => {
                na.push(atoms[j]);
                nw.push(w[j]);
            }
        }
    }
    *atoms = na;
    *w = nw;
}

fn rhs_copy(free: &[usize], g: &[f64]) -> Vec<f64> {
    free.iter().map(|&j| g[j]).collect()
}

/// Cholesky solve of a symmetric positive definite system with a small ridge.
fn solve_spd(a: &mut [f64], b: &[f64], n: usize) -> Option<Vec<f64>> {
    let ridge = 1e-14 * (0..n).map(|i| a[i * n + i]).fold(0.0, f64::max);
    for i in 0..n {
        a[i * n + i] += ridge;
    }
    for j in 0..n {
        let mut s = a[j * n + j];
        for k in 0..j {
            s -= a[j * n + k] * a[j * n + k];
        }
        if s <= 0.0 {
            return None;
        }
        let djj = s.sqrt();
        a[j * n + j] = djj;
        for i in j + 1..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = s / djj;
        }
    }
    let mut y = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            y[i] -= a[i * n + k] * y[k];
        }
        y[i] /= a[i * n + i];
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            y[i] -= a[k * n + i] * y[k];
        }
        y[i] /= a[i * n + i];
    }
    Some(y)
}

/// Rows below this fraction of the largest probability cannot move the
/// likelihood in double precision; they are left out of the mixture fit.
const ROW_TRIM: f64 = 1e-12;

/// Caps tried for the witness entries on trimmed rows.
const TRIM_CAPS: [f64; 5] = [1.0, 1e-2, 1e-4, 1e-7, 1e-10];

/// Solves the phase-symmetric program for a Fock distribution `p`
/// (renormalized) by support reduction over Poisson mixtures: Newton steps
/// on the weights, atoms inserted at local maxima of `Σ (p_n/q_n) Poi_t(n)`
/// until that function is at most one.
pub fn fock_diagonal_program(p: &[f64], cfg: &OptimizerConfig) -> Result<FockDiagonalSolution> {
    cfg.validate()?;
    let total: f64 = p.iter().filter(|x| **x > 0.0).sum();
    let support: Vec<usize> = (0..p.len()).filter(|&n| p[n] > 0.0).collect();
    if support.is_empty() || total.is_nan() || total <= 0.0 {
        return Err(usage("Fock-diagonal program needs a nonempty support"));
    }
    let pmax = support.iter().fold(0.0f64, |m, &n| m.max(p[n]));
    let rows: Vec<usize> = support.iter().copied().filter(|&n| p[n] >= ROW_TRIM * pmax).collect();
    let pn: Vec<f64> = rows.iter().map(|&n| p[n] / total).collect();
    let top = *rows.last().expect("largest entry is kept");
    let mix = Mixture { rows: &rows, p: &pn };
    let mut atoms: Vec<f64> = rows.iter().map(|&n| n as f64).collect();
    let mut w = vec![1.0 / atoms.len() as f64; atoms.len()];
    let mut converged = false;
    let mut iterations = 0;
    let mut c = vec![0.0; top + 1];
    for it in 0..cfg.max_iters.max(1) {
        iterations = it + 1;
        let cols: Vec<Vec<f64>> = atoms.iter().map(|&t| mix.column(t)).collect();
        mix.optimize_weights(&cols, &mut w);
        let keep: Vec<usize> = (0..atoms.len()).filter(|&j| w[j] > 0.0).collect();
        atoms = keep.iter().map(|&j| atoms[j]).collect();
        w = keep.iter().map(|&j| w[j]).collect();
        mix.refine(&mut atoms, &mut w);
        mix.em(&mut atoms, &mut w, 200);
        mix.refine(&mut atoms, &mut w);
        merge_atoms(&mut atoms, &mut w);
        let cols: Vec<Vec<f64>> = atoms.iter().map(|&t| mix.column(t)).collect();
        mix.optimize_weights(&cols, &mut w);
        let q = mix.q(&cols, &w);
        c.iter_mut().for_each(|x| *x = 0.0);
        for (i, &n) in rows.iter().enumerate() {
            c[n] = pn[i] / q[i];
        }
        let maxima = fast_sup_radial(&c, (top as f64).max(1.0), 64.0);
        let peak = maxima.iter().fold(0.0f64, |m, x| m.max(x.1));
        // normalizing q rescales c by Σw, so the certified gap is log₂(peak·Σw)
        if (peak * w.iter().sum::<f64>()).log2() <= cfg.tol.max(1e-9) {
            converged = true;
            break;
        }
        for (t, v) in maxima {
            if v > 1.0 + 1e-13 && atoms.iter().all(|a| (a - t).abs() > 1e-9) {
                atoms.push(t);
                w.push(0.0);
            }
        }
    }
    // any probability mixture is a classical state
    let wsum: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= wsum);
    let full = Mixture { rows: &support, p: &[] };
    let cols: Vec<Vec<f64>> = atoms.iter().map(|&t| full.column(t)).collect();
    let q = full.q(&cols, &w);
    let pfull: Vec<f64> = support.iter().map(|&n| p[n] / total).collect();
    let upper: f64 = pfull.iter().zip(&q).map(|(p, q)| p * (p / q).log2()).sum();
    let last = *support.last().expect("nonempty");
    let mut best: Option<(f64, f64)> = None;
    let caps: &[f64] = if rows.len() == support.len() { &[f64::INFINITY] } else { &TRIM_CAPS };
    for &cap in caps {
        // any positive diagonal witness gives a valid lower bound
        let mut c = vec![0.0; last + 1];
        let mut gain = 0.0;
        for (i, &n) in support.iter().enumerate() {
            let ratio = pfull[i] / q[i];
            c[n] = if p[n] >= ROW_TRIM * pmax { ratio } else { ratio.min(cap) };
            gain += pfull[i] * c[n].log2();
        }
        let cmax = c.iter().fold(0.0f64, |a, &b| a.max(b));
        let problem = SupProblem {
            eval: |t: f64| {
                let (f, df) = poisson_mixture(&c, t);
                (f, df.abs())
            },
            m2: 4.0 * cmax,
            t_env: last as f64,
            envelope: |t: f64| poisson_mixture(&c, t).0,
        };
        let cert = certify_sup_radial(&problem, &atoms, cfg.radius, cfg.sup_rtol.min(1e-9));
        let lower = gain - cert.upper.log2();
        if best.is_none_or(|b| lower > b.0) {
            best = Some((lower, cert.radius_sq));
        }
    }
    let (lower, radius_sq) = best.expect("at least one cap");
    Ok(FockDiagonalSolution {
        upper,
        lower,
        atoms: atoms.into_iter().zip(w).collect(),
        iterations,
        converged,
        radius_sq,
    })
}

/// Exact two-sided value for a single-mode Fock-diagonal state: both
/// monotones coincide on this class, so the pair brackets one number. The
/// truncation correction is applied when the state carries ideal data.
pub fn fock_diagonal_ncm(rho: &DensityOperator, cfg: &OptimizerConfig) -> Result<(MonotoneBound, MonotoneBound)> {
    if rho.modes() != 1 || !rho.is_fock_diagonal() {
        return Err(usage("the exact program needs a single-mode Fock-diagonal state"));
    }
    let sol = fock_diagonal_program(&rho.diagonal(), cfg)?;
    let (eps, corr) = truncation_correction(rho)?;
    let cert = Certificate {
        truncation_epsilon: eps,
        truncation_correction_bits: corr,
        inner_sup_radius: sol.radius_sq,
        inner_sup_grid_error: 0.0,
        ansatz_description: format!("diagonal L = p/q for a Poisson mixture with {} atoms", sol.atoms.len()),
        converged: sol.converged,
    };
    Ok((
        MonotoneBound::lower(Quantity::Ncm, (sol.lower - corr).max(0.0), cert.clone()),
        MonotoneBound::upper(Quantity::Nc, sol.upper + corr, cert),
    ))
}
