#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;


use super::CMatrix;
use crate::C64;

const MAX_SWEEPS: usize = 100;

/// Spectral decomposition `A = V diag(values) V†` of a Hermitian matrix.
///
/// Eigenvalues are sorted ascending; column `k` of `vectors` belongs to
/// `values[k]`.
#[derive(Clone, Debug)]
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl Eigh {
    /// `V diag(f(λ)) V†`.
    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> CMatrix {
        let fv: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        self.reconstruct(&fv)
    }

    pub fn reconstruct(&self, diag: &[f64]) -> CMatrix {
        let n = self.values.len();
        let v = &self.vectors;
        let mut out = CMatrix::zeros(n);
        for k in 0..n {
            let w = diag[k];
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let a = v[(i, k)] * w;
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * v[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn max_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
///
/// Only the Hermitian part of `a` is used.
pub fn eigh(a: &CMatrix) -> Eigh {
    let n = a.dim();
    let mut m = a.clone();
    m.hermitize();
    let mut v = CMatrix::identity(n);
    let scale = m.frobenius().max(f64::MIN_POSITIVE);
    for sweep in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)].norm_sqr())
            .sum();
        if off.sqrt() <= 1e-17 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let b = m[(p, q)];
                let babs = b.norm();
                if babs == 0.0 {
                    continue;
                }
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                if sweep > 3 && babs < 1e-18 * (app.abs() + aqq.abs()) {
                    m[(p, q)] = C64::new(0.0, 0.0);
                    m[(q, p)] = C64::new(0.0, 0.0);
                    continue;
                }
                rotate(&mut m, &mut v, p, q, app, aqq, b, babs);
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.partial_cmp(&m[(j, j)].re).unwrap_or(core::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, |i, k| v[(i, order[k])]);
    Eigh { values, vectors }
}

#[allow(clippy::too_many_arguments)]
fn rotate(m: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize, app: f64, aqq: f64, b: C64, babs: f64) {
    let n = m.dim();
    let phase = b / babs; // e^{iφ}
    let tau = (aqq - app) / (2.0 * babs);
    let t = if tau >= 0.0 { 1.0 } else { -1.0 } / (tau.abs() + (tau * tau + 1.0).sqrt());
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let ph_conj = phase.conj();
    // columns: A <- A J
    for k in 0..n {
        let x = m[(k, p)];
        let y = m[(k, q)];
        m[(k, p)] = x * c - y * ph_conj * s;
        m[(k, q)] = x * s + y * ph_conj * c;
    }
    // rows: A <- J† A
    for k in 0..n {
        let x = m[(p, k)];
        let y = m[(q, k)];
        m[(p, k)] = x * c - y * phase * s;
        m[(q, k)] = x * s + y * phase * c;
    }
    m[(p, q)] = C64::new(0.0, 0.0);
    m[(q, p)] = C64::new(0.0, 0.0);
    m[(p, p)].im = 0.0;
    m[(q, q)].im = 0.0;
    for k in 0..n {
        let x = v[(k, p)];
        let y = v[(k, q)];
        v[(k, p)] = x * c - y * ph_conj * s;
        v[(k, q)] = x * s + y * ph_conj * c;
    }
}

/// Eigenvalues (unsorted) of a real symmetric `n x n` row-major matrix.
pub fn eigh_real_symmetric(a: &[f64], n: usize) -> Vec<f64> {
    let m = CMatrix::from_fn(n, |i, j| C64::new(a[i * n + j], 0.0));
    eigh(&m).values
}
