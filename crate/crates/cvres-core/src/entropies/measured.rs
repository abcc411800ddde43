use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use super::check_shape;
use crate::fock_core::{eigh, frechet_exp, CMatrix, DensityOperator, Eigh};
use crate::optim::OptimizerConfig;
use crate::{Result, LOG2_E};

/// Outcome of a variational ascent; `value_bits` is always attained by an
/// explicit feasible operator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerReport {
    pub value_bits: f64,
    pub iterations: usize,
    pub converged: bool,
    pub gradient_norm: f64,
}

const START_SHIFT: f64 = 1e-9;
const RATIO_FLOOR: f64 = 1e-30;

/// Objective `log₂e·Tr[ρH] − log₂Tr[σe^H]` and its gradient in `H`.
struct Objective<'a> {
    rho: &'a CMatrix,
    sigma: &'a CMatrix,
}

struct Point {
    h: CMatrix,
    value: f64,
    grad: CMatrix,
}

impl Objective<'_> {
    fn eval(&self, h: CMatrix) -> Point {
        let mut e: Eigh = eigh(&h);
        let top = e.max_value();
        for v in &mut e.values {
            *v -= top;
        }
        let mut z = 0.0;
        for (k, &lam) in e.values.iter().enumerate() {
            z += lam.exp() * self.sigma.quad_form(&e.vectors.column(k));
        }
        let value = LOG2_E * self.rho.trace_product_re(&h) - LOG2_E * top - z.log2();
        let d = frechet_exp(&e, self.sigma);
        let mut grad = self.rho - &d.scale(1.0 / z);
        grad.hermitize();
        Point { h, value, grad: grad.scale(LOG2_E) }
    }
}

fn ascend(obj: &Objective, start: CMatrix, cfg: &OptimizerConfig) -> (Point, usize, bool) {
    let mut cur = obj.eval(start);
    let mut step = 1.0;
    let mut stalls = 0;
    for it in 0..cfg.max_iters {
        let gn2 = cur.grad.frobenius().powi(2);
        if gn2 < 1e-28 {
            return (cur, it, true);
        }
        let mut accepted = None;
        while step > 1e-14 {
            let trial = obj.eval(&cur.h + &cur.grad.scale(step));
            if trial.value >= cur.value + 1e-4 * step * gn2 {
                accepted = Some(trial);
                break;
            }
            step *= 0.5;
        }
        let Some(next) = accepted else {
            return (cur, it, true);
        };
        let s = &next.h - &cur.h;
        let y = &next.grad - &cur.grad;
        let sy = s.trace_product_re(&y);
        let ss = s.trace_product_re(&s);
        // ascent: curvature along s is −sy
        step = if sy < 0.0 { (ss / -sy).clamp(1e-6, 1e6) } else { (step * 2.0).min(1e6) };
        let gain = next.value - cur.value;
        cur = next;
        if gain < cfg.tol {
            stalls += 1;
            if stalls >= 3 {
                return (cur, it + 1, true);
            }
        } else {
            stalls = 0;
        }
    }
    (cur, cfg.max_iters, false)
}

fn projective_start(rho: &CMatrix, sigma: &CMatrix, basis: &CMatrix) -> CMatrix {
    let n = rho.dim();
    let logs: Vec<f64> = (0..n)
        .map(|k| {
            let v = basis.column(k);
            let p = rho.quad_form(&v).max(0.0);
            let q = sigma.quad_form(&v).max(0.0);
            if q <= 0.0 {
                -RATIO_FLOOR.ln()
            } else {
                (p / q).max(RATIO_FLOOR).ln()
            }
        })
        .collect();
    Eigh { values: logs, vectors: basis.clone() }.map(|x| x)
}

fn shifted_log(a: &CMatrix) -> CMatrix {
    eigh(a).map(|x| (x.max(0.0) + START_SHIFT).ln())
}

/// Lower bound on the measured relative entropy from the variational form
/// `sup_H log₂e·Tr[ρH] − log₂Tr[σe^H]`.
///
/// Several starting operators are ascended (the shifted-log difference and
/// the likelihood ratios of four projective measurements: Helstrom, both
/// eigenbases and the Fock basis); the best value wins. Returns `+∞` when
/// `ρ` has weight outside the support of `σ`.
pub fn measured_relative_entropy(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    cfg: &OptimizerConfig,
) -> Result<OptimizerReport> {
    check_shape(rho, sigma)?;
    cfg.validate()?;
    let (r, s) = (rho.matrix(), sigma.matrix());
    let es = eigh(s);
    let floor = es.max_value() * super::SUPPORT_REL_TOL;
    for (k, &lam) in es.values.iter().enumerate() {
        if lam <= floor && r.quad_form(&es.vectors.column(k)) > super::SUPPORT_WEIGHT_TOL {
            return Ok(OptimizerReport { value_bits: f64::INFINITY, iterations: 0, converged: true, gradient_norm: 0.0 });
        }
    }
    let obj = Objective { rho: r, sigma: s };
    let n = r.dim();
    let starts = vec![
        &shifted_log(r) - &shifted_log(s),
        projective_start(r, s, &eigh(&(r - s)).vectors),
        projective_start(r, s, &eigh(r).vectors),
        projective_start(r, s, &es.vectors),
        projective_start(r, s, &CMatrix::identity(n)),
    ];
    let mut best: Option<(Point, usize, bool)> = None;
    let mut total = 0;
    for h in starts {
        let (p, it, conv) = ascend(&obj, h, cfg);
        total += it;
        if best.as_ref().is_none_or(|b| p.value > b.0.value) {
            best = Some((p, it, conv));
        }
    }
    let (p, _, conv) = best.expect("at least one start");
    Ok(OptimizerReport { value_bits: p.value, iterations: total, converged: conv, gradient_norm: p.grad.frobenius() })
}
