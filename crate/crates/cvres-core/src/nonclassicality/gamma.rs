use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::sup::{fast_sup, fast_sup_radial, SupCertificate};
use super::{coherent_sup_certified, truncation_correction, Certificate, MonotoneBound, Quantity};
use crate::error::usage;
use crate::fock_core::{
    coherent_amplitudes, eigh, frechet_exp, hermitian_function, CMatrix, DensityOperator, Eigh, ScalarFn, TruncatedOperator,
};
use crate::optim::{OptimizerConfig, Symmetry};
use crate::special::ln_poisson;
use crate::{Result, C64, LOG2_E};

/// Raw outcome of the Γ ascent before truncation correction.
#[derive(Clone, Debug)]
pub struct GammaSolution {
    /// `Tr[ρ log₂ L] − log₂(certified sup)` for the normalized input.
    pub value: f64,
    pub sup: SupCertificate,
    /// The maximizing operator `L`, scaled to unit norm. It vanishes off
    /// the parity sector that supports the input.
    pub operator: CMatrix,
    pub symmetry: Symmetry,
    pub iterations: usize,
    pub converged: bool,
}

/// Symmetry implied by the input: Fock-diagonal states are phase
/// invariant; real states without odd-parity coherences are reflection
/// invariant.
pub fn detect_symmetry(rho: &DensityOperator) -> Symmetry {
    if rho.is_fock_diagonal() {
        return Symmetry::Phase;
    }
    let m = rho.matrix();
    let d = m.dim();
    let tol = 1e-14;
    let reflect = (0..d).all(|i| (0..d).all(|j| m[(i, j)].im.abs() <= tol && ((i + j) % 2 == 0 || m[(i, j)].re.abs() <= tol)));
    if reflect {
        Symmetry::Reflection
    } else {
        Symmetry::None
    }
}

/// Projects onto Hermitian matrices with the symmetry; `idx` maps rows to
/// Fock levels.
fn project(g: &mut CMatrix, sym: Symmetry, idx: &[usize]) {
    let d = g.dim();
    g.hermitize();
    match sym {
        Symmetry::None => {}
        Symmetry::Phase => {
            for i in 0..d {
                for j in 0..d {
                    if i != j {
                        g[(i, j)] = C64::new(0.0, 0.0);
                    } else {
                        g[(i, j)].im = 0.0;
                    }
                }
            }
        }
        Symmetry::Reflection => {
            for i in 0..d {
                for j in 0..d {
                    g[(i, j)] = if (idx[i] + idx[j]).is_multiple_of(2) { C64::new(g[(i, j)].re, 0.0) } else { C64::new(0.0, 0.0) };
                }
            }
        }
    }
}

/// Fock levels of the parity sector that supports `ρ`, or all levels.
/// Setting `L` to zero on the other sector only lowers `⟨α|L|α⟩`, so the
/// ascent runs on this block alone.
fn support_sector(m: &CMatrix) -> Vec<usize> {
    let d = m.dim();
    let tol = 1e-14;
    for parity in [0, 1] {
        if (0..d).all(|i| (0..d).all(|j| (i % 2 == parity && j % 2 == parity) || m[(i, j)].norm() <= tol)) {
            return (parity..d).step_by(2).collect();
        }
    }
    (0..d).collect()
}

fn embed(m: &CMatrix, idx: &[usize], d: usize) -> CMatrix {
    let mut full = CMatrix::zeros(d);
    for (a, &i) in idx.iter().enumerate() {
        for (b, &j) in idx.iter().enumerate() {
            full[(i, j)] = m[(a, b)];
        }
    }
    full
}

struct Program {
    /// `ρ` restricted to the sector `idx` of the full cutoff `d`.
    rho: CMatrix,
    idx: Vec<usize>,
    d: usize,
    sym: Symmetry,
    t_search: f64,
    resolution: f64,
}

struct Iterate {
    h: CMatrix,
    value: f64,
    grad: CMatrix,
}

/// Probe vectors `|α⟩` (Poisson weight vectors under phase symmetry) at
/// which the supremum is tracked.
struct Probes {
    phase: bool,
    vecs: Vec<Vec<C64>>,
    diag: Vec<Vec<f64>>,
}

impl Probes {
    fn len(&self) -> usize {
        if self.phase {
            self.diag.len()
        } else {
            self.vecs.len()
        }
    }

    fn value(&self, l: &CMatrix, k: usize) -> f64 {
        if self.phase {
            self.diag[k].iter().enumerate().map(|(i, p)| p * l[(i, i)].re).sum()
        } else {
            l.quad_form(&self.vecs[k])
        }
    }

    fn projector(&self, k: usize) -> CMatrix {
        if self.phase {
            CMatrix::from_diag(&self.diag[k])
        } else {
            CMatrix::outer(&self.vecs[k])
        }
    }
}

impl Program {
    fn shifted_exp(&self, h: &CMatrix) -> (Eigh, f64, CMatrix) {
        let mut e: Eigh = eigh(h);
        let top = e.max_value();
        e.values.iter_mut().for_each(|v| *v -= top);
        let l = e.map(f64::exp);
        (e, top, l)
    }

    /// Local maxima of `⟨α|L|α⟩` on the search disk, with their values.
    fn maxima(&self, l: &CMatrix) -> Vec<(f64, Vec<C64>, Vec<f64>)> {
        let full = embed(l, &self.idx, self.d);
        if self.sym == Symmetry::Phase {
            fast_sup_radial(&full.diag_re(), self.t_search, self.resolution * 4.0)
                .into_iter()
                .map(|(t, f)| (f, Vec::new(), self.idx.iter().map(|&k| ln_poisson(k, t).exp()).collect()))
                .collect()
        } else {
            fast_sup(&full, self.t_search, self.resolution, 4)
                .into_iter()
                .map(|(a, f)| {
                    let amp = coherent_amplitudes(a, self.d);
                    (f, self.idx.iter().map(|&k| amp[k]).collect(), Vec::new())
                })
                .collect()
        }
    }

    /// Adds maxima that beat every probe; returns whether any were added.
    fn extend(&self, probes: &mut Probes, l: &CMatrix) -> bool {
        let best = (0..probes.len()).map(|k| probes.value(l, k)).fold(0.0f64, f64::max);
        let mut added = false;
        for (f, v, p) in self.maxima(l) {
            if f > best * (1.0 + 1e-12) {
                if probes.phase {
                    probes.diag.push(p);
                } else {
                    probes.vecs.push(v);
                }
                added = true;
            }
        }
        added
    }

    /// Smooth surrogate `log₂e·Tr[ρH] − T-softmax of log₂⟨α_k|e^H|α_k⟩` over
    /// the probes, with its exact projected gradient.
    fn eval(&self, h: CMatrix, probes: &Probes, temp: f64) -> Iterate {
        let (e, top, l) = self.shifted_exp(&h);
        let logs: Vec<f64> = (0..probes.len()).map(|k| probes.value(&l, k).max(1e-300).log2()).collect();
        let smax = logs.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x));
        let w: Vec<f64> = logs.iter().map(|&x| ((x - smax) / temp).exp()).collect();
        let wsum: f64 = w.iter().sum();
        let lse = smax + temp * wsum.ln();
        let d = h.dim();
        let mut proj = CMatrix::zeros(d);
        for (k, &wk) in w.iter().enumerate() {
            if wk > 1e-16 * wsum {
                let fk = 2f64.powf(logs[k]);
                proj = &proj + &probes.projector(k).scale(wk / (wsum * fk));
            }
        }
        let value = LOG2_E * (self.rho.trace_product_re(&h) - top) - lse;
        let mut grad = (&self.rho - &frechet_exp(&e, &proj)).scale(LOG2_E);
        project(&mut grad, self.sym, &self.idx);
        Iterate { h, value, grad }
    }
}

/// Barzilai–Borwein ascent on the surrogate with an Armijo safeguard. The
/// coherent maxima are recomputed periodically and any that overtake the
/// probe set join it; the temperature is annealed toward the
/// hard maximum. Returns the exponent, the iteration count and whether the
/// final stage stopped at a stationary point.
fn ascend(prog: &Program, h0: CMatrix, cfg: &OptimizerConfig) -> (CMatrix, usize, bool) {
    let (_, _, l0) = prog.shifted_exp(&h0);
    let mut probes = Probes { phase: prog.sym == Symmetry::Phase, vecs: Vec::new(), diag: Vec::new() };
    prog.extend(&mut probes, &l0);
    let mut h = h0;
    let mut total = 0;
    let mut stationary = false;
    for temp in TEMPERATURES {
        let mut cur = prog.eval(h, &probes, temp);
        let mut step = 1.0;
        let mut since_scan = 0;
        stationary = false;
        for _ in 0..cfg.max_iters {
            total += 1;
            let gn2 = cur.grad.frobenius().powi(2);
            if gn2 < 1e-24 {
                stationary = true;
                break;
            }
            let mut next = None;
            while step > 1e-14 {
                let trial = prog.eval(&cur.h + &cur.grad.scale(step), &probes, temp);
                if trial.value >= cur.value + 1e-4 * step * gn2 {
                    next = Some(trial);
                    break;
                }
                step *= 0.5;
            }
            let Some(mut next) = next else {
                stationary = true;
                break;
            };
            let s = &next.h - &cur.h;
            let y = &next.grad - &cur.grad;
            let sy = s.trace_product_re(&y);
            let ss = s.trace_product_re(&s);
            step = if sy < 0.0 { (ss / -sy).clamp(1e-6, 1e6) } else { (step * 2.0).min(1e6) };
            let gain = next.value - cur.value;
            since_scan += 1;
            if since_scan >= SCAN_EVERY || gain < cfg.tol {
                since_scan = 0;
                let (_, _, l) = prog.shifted_exp(&next.h);
                if prog.extend(&mut probes, &l) {
                    next = prog.eval(next.h, &probes, temp);
                } else if gain < cfg.tol {
                    cur = next;
                    stationary = true;
                    break;
                }
            }
            cur = next;
        }
        h = cur.h;
    }
    (h, total, stationary)
}

/// Accepted steps between full scans for new coherent maxima; a stage only
/// stops after a scan finds none.
const SCAN_EVERY: usize = 10;

/// Softmax temperatures in bits, annealed toward the hard maximum.
const TEMPERATURES: [f64; 4] = [1e-2, 1e-3, 1e-4, 1e-6];

fn exp_operator(h: &CMatrix, idx: &[usize], d: usize) -> (TruncatedOperator, f64) {
    let e = eigh(h);
    let top = e.max_value();
    let mut l = embed(&e.map(|x| (x - top).exp()), idx, d);
    l.hermitize();
    (TruncatedOperator::new(1, d, l, true).expect("exponential is Hermitian"), top)
}

/// `Tr[ρ̂ log₂ L] − log₂ sup_α⟨α|L|α⟩` with the certified supremum, where
/// `ρ̂` is `ρ` normalized to unit trace. Invariant under `L → cL`.
pub fn gamma_objective(rho: &DensityOperator, l: &TruncatedOperator, cfg: &OptimizerConfig) -> Result<f64> {
    if rho.modes() != 1 || l.modes() != 1 || l.cutoff() != rho.cutoff() {
        return Err(usage("Γ objective needs a single-mode state and operator of equal cutoff"));
    }
    let rn = rho.normalized();
    let log_l = hermitian_function(l.entries(), ScalarFn::Log2).matrix;
    let cert = coherent_sup_certified(l, cfg)?;
    Ok(rn.matrix().trace_product_re(&log_l) - cert.upper.log2())
}

/// Maximizes the Γ objective over `L = e^H` for the normalized single-mode
/// input, then certifies the final supremum.
pub fn gamma_program(rho: &DensityOperator, cfg: &OptimizerConfig) -> Result<GammaSolution> {
    if rho.modes() != 1 {
        return Err(usage("the Γ program is implemented for single-mode states"));
    }
    cfg.validate()?;
    let rn = rho.normalized();
    let sym = if cfg.symmetry == Symmetry::None { detect_symmetry(&rn) } else { cfg.symmetry };
    let d = rn.cutoff();
    let t_search = (d as f64 - 1.0).max(1.0) + 2.0 * (d as f64).sqrt();
    let idx = support_sector(rn.matrix());
    let rho = CMatrix::from_fn(idx.len(), |a, b| rn.matrix()[(idx[a], idx[b])]);
    let prog = Program { rho, idx, d, sym, t_search, resolution: cfg.grid_resolution };
    let mut best: Option<(f64, TruncatedOperator, SupCertificate, bool)> = None;
    let mut iterations = 0;
    for shift in [1e-6, 1e-2] {
        let mut h0 = eigh(&prog.rho).map(|x| (x.max(0.0) + shift).ln());
        project(&mut h0, sym, &prog.idx);
        let (h, n, conv) = ascend(&prog, h0, cfg);
        iterations += n;
        let (l, top) = exp_operator(&h, &prog.idx, d);
        let sup = coherent_sup_certified(&l, cfg)?;
        let value = LOG2_E * (prog.rho.trace_product_re(&h) - top) - sup.upper.log2();
        if best.as_ref().is_none_or(|b| value > b.0) {
            best = Some((value, l, sup, conv));
        }
    }
    let (value, l, sup, converged) = best.expect("two starts");
    Ok(GammaSolution { value, sup, operator: l.entries().clone(), symmetry: sym, iterations, converged })
}

/// Certified lower bound on the measured monotone from the Γ program, with
/// the truncation correction subtracted and the result floored at zero.
pub fn gamma_lower_bound(rho: &DensityOperator, cfg: &OptimizerConfig) -> Result<MonotoneBound> {
    let sol = gamma_program(rho, cfg)?;
    let (eps, corr) = truncation_correction(rho)?;
    let cert = Certificate {
        truncation_epsilon: eps,
        truncation_correction_bits: corr,
        inner_sup_radius: sol.sup.radius_sq,
        inner_sup_grid_error: (sol.sup.upper / sol.sup.lower).log2(),
        ansatz_description: format!("L = exp(H), {:?} symmetry, {} iterations", sol.symmetry, sol.iterations),
        converged: sol.converged,
    };
    Ok(MonotoneBound::lower(Quantity::Ncm, (sol.value - corr).max(0.0), cert))
}
