//! Certified suprema of coherent expectation values `⟨α|L|α⟩`.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::usage;
use crate::fock_core::{coherent_amplitudes, displaced_one, eigh, CMatrix, TruncatedOperator};
use crate::optim::{nelder_mead, NelderMead, OptimizerConfig, RadiusPolicy};
use crate::special::{ln_factorial, ln_poisson, log_sum_exp};
use crate::{Result, C64};

/// A certified enclosure of `sup_α ⟨α|L|α⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupCertificate {
    /// Upper bound on the supremum over all of `ℂ`.
    pub upper: f64,
    /// Value attained at `argmax`.
    pub lower: f64,
    pub argmax_re: f64,
    pub argmax_im: f64,
    /// `T` such that `|α|² <= T` was searched and the rest bounded analytically.
    pub radius_sq: f64,
    pub evaluations: usize,
}

impl SupCertificate {
    pub fn grid_error(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn argmax(&self) -> C64 {
        C64::new(self.argmax_re, self.argmax_im)
    }
}

const MAX_EVALS: usize = 4_000_000;
const INITIAL_CELL: f64 = 0.5;

#[derive(PartialEq)]
struct Cell {
    ub: f64,
    x: f64,
    y: f64,
    half: f64,
}

impl Eq for Cell {}

impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.ub.total_cmp(&other.ub)
    }
}

/// A smooth nonnegative function on `ℂ` with a uniform bound `m2` on its
/// second directional derivatives and a decreasing envelope beyond `t_env`.
pub(crate) struct SupProblem<F, G> {
    /// `α ↦ (f(α), |∇f(α)|)`.
    pub eval: F,
    pub m2: f64,
    pub t_env: f64,
    /// Bound on `f` over `|α|² >= t` for `t >= t_env`.
    pub envelope: G,
}

fn search_radius(policy: RadiusPolicy, t_env: f64, best: f64, rtol: f64, envelope: &impl Fn(f64) -> f64) -> f64 {
    match policy {
        RadiusPolicy::Fixed(t) => t.max(t_env),
        RadiusPolicy::Auto => {
            let mut t = t_env.max(0.0);
            while envelope(t) > best * (1.0 + rtol) && t < t_env + 1e4 {
                t = t * 1.2 + 1.0;
            }
            t
        }
    }
}

/// Branch and bound over squares covering `|α|² <= T`, seeded with known
/// good points. Each cell is bounded by `f(c) + |∇f(c)|h + m2 h²/2` with `h`
/// its half-diagonal.
pub(crate) fn certify_sup<F, G>(p: &SupProblem<F, G>, seeds: &[(C64, f64)], policy: RadiusPolicy, rtol: f64) -> SupCertificate
where
    F: Fn(C64) -> (f64, f64),
    G: Fn(f64) -> f64,
{
    let mut best = (C64::new(0.0, 0.0), (p.eval)(C64::new(0.0, 0.0)).0);
    for &(a, _) in seeds {
        let v = (p.eval)(a).0;
        if v > best.1 {
            best = (a, v);
        }
    }
    let t = search_radius(policy, p.t_env, best.1, rtol, &p.envelope);
    let r = t.sqrt();
    let atol = 1e-15 * p.m2.max(f64::MIN_POSITIVE);
    let n0 = ((2.0 * r / INITIAL_CELL).ceil() as usize).max(1);
    let side = 2.0 * r / n0 as f64;
    let mut heap = BinaryHeap::new();
    let mut evals = 0usize;
    let push = |heap: &mut BinaryHeap<Cell>, x: f64, y: f64, half: f64, best: &mut (C64, f64), evals: &mut usize| {
        // nearest point of the square to the origin
        let nx = (x.abs() - half).max(0.0);
        let ny = (y.abs() - half).max(0.0);
        if nx * nx + ny * ny > t {
            return;
        }
        let c = C64::new(x, y);
        let (f, g) = (p.eval)(c);
        *evals += 1;
        if f > best.1 {
            *best = (c, f);
        }
        let h = half * core::f64::consts::SQRT_2;
        heap.push(Cell { ub: f + g * h + 0.5 * p.m2 * h * h, x, y, half });
    };
    for i in 0..n0 {
        for j in 0..n0 {
            let x = -r + (i as f64 + 0.5) * side;
            let y = -r + (j as f64 + 0.5) * side;
            push(&mut heap, x, y, 0.5 * side, &mut best, &mut evals);
        }
    }
    let mut upper = best.1;
    while let Some(cell) = heap.pop() {
        if cell.ub <= best.1 * (1.0 + rtol) + atol || evals >= MAX_EVALS {
            upper = upper.max(cell.ub);
            break;
        }
        let q = 0.5 * cell.half;
        for (dx, dy) in [(-q, -q), (-q, q), (q, -q), (q, q)] {
            push(&mut heap, cell.x + dx, cell.y + dy, q, &mut best, &mut evals);
        }
    }
    upper = upper.max(best.1).max((p.envelope)(t));
    SupCertificate { upper, lower: best.1, argmax_re: best.0.re, argmax_im: best.0.im, radius_sq: t, evaluations: evals }
}

/// One-dimensional variant for phase-invariant `f(t)`, `t = |α|²`, with
/// `|f''(t)| <= m2`; the derivative is supplied by `eval`.
pub(crate) fn certify_sup_radial<F, G>(p: &SupProblem<F, G>, seeds: &[f64], policy: RadiusPolicy, rtol: f64) -> SupCertificate
where
    F: Fn(f64) -> (f64, f64),
    G: Fn(f64) -> f64,
{
    let mut best = (0.0, (p.eval)(0.0).0);
    for &s in seeds {
        let v = (p.eval)(s).0;
        if v > best.1 {
            best = (s, v);
        }
    }
    let t = search_radius(policy, p.t_env, best.1, rtol, &p.envelope);
    let atol = 1e-15 * p.m2.max(f64::MIN_POSITIVE);
    let n0 = ((t / INITIAL_CELL).ceil() as usize).max(1);
    let w = t / n0 as f64;
    let mut heap = BinaryHeap::new();
    let mut evals = 0usize;
    let push = |heap: &mut BinaryHeap<Cell>, x: f64, half: f64, best: &mut (f64, f64), evals: &mut usize| {
        let (f, g) = (p.eval)(x);
        *evals += 1;
        if f > best.1 {
            *best = (x, f);
        }
        heap.push(Cell { ub: f + g * half + 0.5 * p.m2 * half * half, x, y: 0.0, half });
    };
    for i in 0..n0 {
        push(&mut heap, (i as f64 + 0.5) * w, 0.5 * w, &mut best, &mut evals);
    }
    let mut upper = best.1;
    while let Some(cell) = heap.pop() {
        if cell.ub <= best.1 * (1.0 + rtol) + atol || evals >= MAX_EVALS {
            upper = upper.max(cell.ub);
            break;
        }
        let q = 0.5 * cell.half;
        push(&mut heap, cell.x - q, q, &mut best, &mut evals);
        push(&mut heap, cell.x + q, q, &mut best, &mut evals);
    }
    upper = upper.max(best.1).max((p.envelope)(t));
    SupCertificate {
        upper,
        lower: best.1,
        argmax_re: best.0.sqrt(),
        argmax_im: 0.0,
        radius_sq: t,
        evaluations: evals,
    }
}

/// `f(t) = Σ c_k e^{−t} t^k/k!` and `f'(t) = Σ (c_{k+1} − c_k) e^{−t} t^k/k!`.
pub(crate) fn poisson_mixture(c: &[f64], t: f64) -> (f64, f64) {
    let mut f = 0.0;
    let mut df = 0.0;
    for (k, &ck) in c.iter().enumerate() {
        let w = ln_poisson(k, t).exp();
        let next = c.get(k + 1).copied().unwrap_or(0.0);
        f += ck * w;
        df += (next - ck) * w;
    }
    (f, df)
}

/// `e^{−t} Σ_{jk} |L_jk| t^{(j+k)/2}/√(j!k!)`, decreasing for `t >= d − 1`.
fn fock_envelope(l: &CMatrix, t: f64) -> f64 {
    let d = l.dim();
    if t == 0.0 {
        return l[(0, 0)].norm();
    }
    let lt = t.ln();
    let mut terms = Vec::with_capacity(d * d);
    for j in 0..d {
        for k in 0..d {
            let a = l[(j, k)].norm();
            if a > 0.0 {
                terms.push(a.ln() - t + 0.5 * (j + k) as f64 * lt - 0.5 * (ln_factorial(j) + ln_factorial(k)));
            }
        }
    }
    if terms.is_empty() {
        0.0
    } else {
        log_sum_exp(&terms).exp()
    }
}

fn is_diagonal(l: &CMatrix) -> bool {
    let d = l.dim();
    (0..d).all(|i| (0..d).all(|j| i == j || l[(i, j)] == C64::new(0.0, 0.0)))
}

/// `(⟨α|L|α⟩, |∇_α⟨α|L|α⟩|)` for `L` on levels `< d`.
pub(crate) fn fock_eval(l: &CMatrix, a: C64) -> (f64, f64) {
    let c = coherent_amplitudes(a, l.dim());
    let y = l.mul_vec(&c);
    let f: f64 = c.iter().zip(&y).map(|(ci, yi)| (ci.conj() * yi).re).sum();
    let u = displaced_one(a, &c);
    let g: C64 = y.iter().zip(&u).map(|(yi, ui)| yi.conj() * ui).sum();
    (f, 2.0 * g.norm())
}

/// Second-derivative bound for `⟨α|L|α⟩` along any real direction.
pub(crate) fn curvature_bound(l: &CMatrix) -> f64 {
    let e = eigh(l);
    let top = e.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let neg = e.values.first().copied().unwrap_or(0.0) < -1e-12 * top.max(1e-300);
    if neg {
        (4.0 + 2.0 * core::f64::consts::SQRT_2) * top
    } else {
        (2.0 + 2.0 * core::f64::consts::SQRT_2) * top
    }
}

/// Values of `⟨α|L|α⟩` on the ring `|α| = r` at `n` equally spaced angles,
/// from the trigonometric expansion `Σ_m c_m(r) e^{imθ}`.
fn ring_values(l: &CMatrix, r: f64, n: usize) -> Vec<f64> {
    let d = l.dim();
    let w = coherent_amplitudes(C64::new(r, 0.0), d);
    let mut coef = vec![C64::new(0.0, 0.0); d];
    for j in 0..d {
        for k in j..d {
            coef[k - j] += l[(j, k)] * (w[j].re * w[k].re);
        }
    }
    (0..n)
        .map(|i| {
            let theta = 2.0 * core::f64::consts::PI * i as f64 / n as f64;
            let step = C64::from_polar(1.0, theta);
            let mut z = C64::new(1.0, 0.0);
            let mut acc = coef[0].re;
            for c in &coef[1..] {
                z *= step;
                acc += 2.0 * (c * z).re;
            }
            acc
        })
        .collect()
}

/// Approximate local maximizers of `⟨α|L|α⟩`: a polar grid over
/// `|α|² <= T` followed by Nelder–Mead polishing of the best few cells.
pub(crate) fn fast_sup(l: &CMatrix, t: f64, resolution: f64, keep: usize) -> Vec<(C64, f64)> {
    let h = 1.0 / resolution;
    let rings = (t.sqrt() / h).ceil() as usize + 1;
    let mut pts: Vec<(C64, f64)> = Vec::new();
    for i in 0..=rings {
        let r = i as f64 * h;
        let n = if i == 0 { 1 } else { ((2.0 * core::f64::consts::PI * r / h).ceil() as usize).max(8) };
        for (k, v) in ring_values(l, r, n).into_iter().enumerate() {
            pts.push((C64::from_polar(r, 2.0 * core::f64::consts::PI * k as f64 / n as f64), v));
        }
    }
    pts.sort_by(|a, b| b.1.total_cmp(&a.1));
    let mut chosen: Vec<(C64, f64)> = Vec::new();
    for p in pts {
        if chosen.len() >= keep {
            break;
        }
        if chosen.iter().all(|c| (c.0 - p.0).norm() > 3.0 * h) {
            chosen.push(p);
        }
    }
    let cfg = NelderMead { max_evals: 200, ftol: 1e-14, initial_step: 0.3 * h };
    chosen
        .into_iter()
        .map(|(a, _)| {
            let (x, fx) = nelder_mead(|v: &[f64]| -fock_eval(l, C64::new(v[0], v[1])).0, &[a.re, a.im], cfg);
            (C64::new(x[0], x[1]), -fx)
        })
        .collect()
}

/// Approximate maximizers in `t` for a Fock-diagonal `L` with entries `c`.
pub(crate) fn fast_sup_radial(c: &[f64], t: f64, resolution: f64) -> Vec<(f64, f64)> {
    let n = ((t * resolution).ceil() as usize).max(8);
    let mut best = (0.0, poisson_mixture(c, 0.0).0);
    let mut pts = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let x = t * i as f64 / n as f64;
        let v = poisson_mixture(c, x).0;
        pts.push((x, v));
        if v > best.1 {
            best = (x, v);
        }
    }
    let mut out = Vec::new();
    for i in 0..pts.len() {
        let left = if i > 0 { pts[i - 1].1 } else { f64::NEG_INFINITY };
        let right = pts.get(i + 1).map_or(f64::NEG_INFINITY, |p| p.1);
        if pts[i].1 >= left && pts[i].1 >= right && pts[i].1 >= best.1 * (1.0 - 1e-2) {
            let a = if i > 0 { pts[i - 1].0 } else { 0.0 };
            let b = pts.get(i + 1).map_or(pts[i].0, |p| p.0);
            out.push(crate::optim::golden_max(|x| poisson_mixture(c, x).0, a, b, 1e-12));
        }
    }
    if out.is_empty() {
        out.push(best);
    }
    out
}

/// Upper bound on `sup_{α∈ℂ} ⟨α|L|α⟩` for a single-mode Hermitian `L`.
///
/// Searches `|α|² <= T` (with `T >= d − 1`, grown under
/// [`RadiusPolicy::Auto`] until the tail envelope is dominated) by branch and
/// bound to relative accuracy `cfg.sup_rtol`. Beyond `T` the envelope
/// `e^{−t} Σ|L_jk| t^{(j+k)/2}/√(j!k!)` is decreasing, so its value at `T`
/// bounds the tail.
pub fn coherent_sup_certified(l: &TruncatedOperator, cfg: &OptimizerConfig) -> Result<SupCertificate> {
    if l.modes() != 1 {
        return Err(usage("certified coherent suprema are implemented for single-mode operators"));
    }
    cfg.validate()?;
    let m = l.entries();
    let d = l.cutoff();
    let t_env = (d as f64 - 1.0).max(0.0);
    if is_diagonal(m) {
        let c: Vec<f64> = m.diag_re();
        let cmax = c.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        let seeds: Vec<f64> = fast_sup_radial(&c, t_env.max(1.0), cfg.grid_resolution * 4.0).iter().map(|p| p.0).collect();
        let abs_c: Vec<f64> = c.iter().map(|x| x.abs()).collect();
        let problem = SupProblem {
            eval: |t: f64| {
                let (f, df) = poisson_mixture(&c, t);
                (f, df.abs())
            },
            m2: 4.0 * cmax,
            t_env,
            envelope: |t: f64| poisson_mixture(&abs_c, t).0,
        };
        return Ok(certify_sup_radial(&problem, &seeds, cfg.radius, cfg.sup_rtol));
    }
    let seeds = fast_sup(m, t_env.max(1.0), cfg.grid_resolution, 4);
    let problem = SupProblem {
        eval: |a: C64| fock_eval(m, a),
        m2: curvature_bound(m),
        t_env,
        envelope: |t: f64| fock_envelope(m, t),
    };
    Ok(certify_sup(&problem, &seeds, cfg.radius, cfg.sup_rtol))
}
