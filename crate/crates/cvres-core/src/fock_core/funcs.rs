
#[allow(unused_imports)]
use num_traits::Float;
use super::{eigh, CMatrix, Eigh};

/// Eigenvalues below this are clamped before taking logarithms.
pub const LOG_FLOOR: f64 = 1e-12;

/// Scalar functions that can be lifted to Hermitian operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalarFn {
    Log2,
    Exp2,
    Exp,
    Ln,
}

impl ScalarFn {
    fn apply(self, x: f64) -> f64 {
        match self {
            ScalarFn::Log2 => x.log2(),
            ScalarFn::Exp2 => x.exp2(),
            ScalarFn::Exp => x.exp(),
            ScalarFn::Ln => x.ln(),
        }
    }

    fn is_log(self) -> bool {
        matches!(self, ScalarFn::Log2 | ScalarFn::Ln)
    }
}

/// Result of lifting a scalar function; `floored` is set when eigenvalues
/// had to be clamped to [`LOG_FLOOR`].
#[derive(Clone, Debug)]
pub struct FunctionOutput {
    pub matrix: CMatrix,
    pub floored: bool,
}

/// Applies `f` on the spectrum of the Hermitian matrix `a`.
pub fn hermitian_function(a: &CMatrix, f: ScalarFn) -> FunctionOutput {
    let e = eigh(a);
    hermitian_function_eig(&e, f)
}

pub fn hermitian_function_eig(e: &Eigh, f: ScalarFn) -> FunctionOutput {
    let mut floored = false;
    let matrix = e.map(|x| {
        if f.is_log() && x < LOG_FLOOR {
            floored = true;
            f.apply(LOG_FLOOR)
        } else {
            f.apply(x)
        }
    });
    FunctionOutput { matrix, floored }
}

/// First divided difference of `exp` at `(a, b)`.
pub fn exp_divided_difference(a: f64, b: f64) -> f64 {
    let d = a - b;
    if d.abs() < 1e-12 {
        (0.5 * (a + b)).exp()
    } else {
        b.exp() * d.exp_m1() / d
    }
}

/// Fréchet derivative of `exp` at `H = V diag(λ) V†` in direction `m`:
/// `V (Φ ∘ (V† M V)) V†` with `Φ` the divided differences of `exp`.
pub fn frechet_exp(e: &Eigh, m: &CMatrix) -> CMatrix {
    let n = e.values.len();
    let mt = m.conjugate_by(&e.vectors);
    let inner = CMatrix::from_fn(n, |i, j| mt[(i, j)] * exp_divided_difference(e.values[i], e.values[j]));
    let v = &e.vectors;
    v.matmul(&inner).matmul(&v.adjoint())
}

/// `Tr[ρ f(A)]` evaluated in the eigenbasis of `A`.
pub fn trace_with_function(rho: &CMatrix, e: &Eigh, f: impl Fn(f64) -> f64) -> f64 {
    let n = e.values.len();
    let mut acc = 0.0;
    for k in 0..n {
        let col = e.vectors.column(k);
        let w = rho.quad_form(&col);
        let fk = f(e.values[k]);
        if w != 0.0 {
            acc += w * fk;
        }
    }
    acc
}

/// `exp(H)` for Hermitian `H`, with the decomposition reused by callers.
pub fn expm_hermitian(h: &CMatrix) -> (CMatrix, Eigh) {
    let e = eigh(h);
    (e.map(f64::exp), e)
}

/// Projector onto the span of eigenvectors whose eigenvalue satisfies `keep`.
pub fn spectral_projector(e: &Eigh, keep: impl Fn(f64) -> bool) -> CMatrix {
    let d: alloc::vec::Vec<f64> = e.values.iter().map(|&x| if keep(x) { 1.0 } else { 0.0 }).collect();
    e.reconstruct(&d)
}
