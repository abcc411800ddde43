use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::funcs::{hermitian_function, ScalarFn};
use super::{eigh, CMatrix};
use crate::error::{config, usage, Result};
use crate::C64;

/// Max-norm tolerance for the Hermitian flag.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Most negative eigenvalue accepted in a density operator.
pub const PSD_TOL: f64 = -1e-10;

/// Operator on `m` modes, each truncated to Fock levels `0..d`.
///
/// Multi-indices are row-major over modes: the last mode's Fock index runs
/// fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedOperator {
    modes: usize,
    cutoff: usize,
    entries: CMatrix,
    hermitian: bool,
}

impl TruncatedOperator {
    pub fn new(modes: usize, cutoff: usize, entries: CMatrix, hermitian: bool) -> Result<Self> {
        if modes == 0 || cutoff == 0 {
            return Err(usage("modes and cutoff must be positive"));
        }
        let dim = checked_dim(modes, cutoff)?;
        if entries.dim() != dim {
            return Err(config(format!("expected {dim}x{dim} entries, got {0}x{0}", entries.dim())));
        }
        if hermitian {
            let defect = entries.hermiticity_defect();
            if defect > HERMITIAN_TOL {
                return Err(usage(format!("operator flagged hermitian but defect is {defect:e}")));
            }
        }
        Ok(Self { modes, cutoff, entries, hermitian })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.entries.dim()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    /// Fock multi-index of a flat basis index.
    pub fn multi_index(&self, flat: usize) -> Vec<usize> {
        multi_index(flat, self.modes, self.cutoff)
    }
}

pub(crate) fn checked_dim(modes: usize, cutoff: usize) -> Result<usize> {
    let mut dim = 1usize;
    for _ in 0..modes {
        dim = dim
            .checked_mul(cutoff)
            .filter(|&d| d <= 1 << 16)
            .ok_or_else(|| usage(format!("dense dimension {cutoff}^{modes} is too large")))?;
    }
    Ok(dim)
}

pub(crate) fn multi_index(mut flat: usize, modes: usize, cutoff: usize) -> Vec<usize> {
    let mut idx = alloc::vec![0; modes];
    for slot in idx.iter_mut().rev() {
        *slot = flat % cutoff;
        flat /= cutoff;
    }
    idx
}

/// Provenance of a truncated state, consumed by truncation certificates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdealInfo {
    /// Mean photon number of the untruncated state (may be infinite).
    pub energy: f64,
    /// The untruncated state is pure.
    pub pure: bool,
    /// The untruncated state is diagonal in the Fock basis.
    pub fock_diagonal: bool,
}

/// A (possibly subnormalized) state on the truncated space.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    op: TruncatedOperator,
    trace_deficit: f64,
    energy: f64,
    ideal: Option<IdealInfo>,
}

impl DensityOperator {
    /// Validates positivity and trace and records deficit and energy.
    pub fn new(op: TruncatedOperator) -> Result<Self> {
        if !op.hermitian {
            return Err(usage("density operator must be hermitian"));
        }
        let e = eigh(&op.entries);
        if let Some(&min) = e.values.first() {
            if min < PSD_TOL {
                return Err(usage(format!("density operator has eigenvalue {min:e}")));
            }
        }
        Self::unchecked(op)
    }

    fn unchecked(op: TruncatedOperator) -> Result<Self> {
        let tr = op.entries.trace().re;
        if !(tr > 0.0 && tr <= 1.0 + 1e-9) {
            return Err(usage(format!("density operator trace {tr} outside (0, 1]")));
        }
        let energy = photon_number_expectation(&op);
        Ok(Self { trace_deficit: (1.0 - tr).max(0.0), energy, op, ideal: None })
    }

    /// `|ψ><ψ|` from amplitudes in multi-index order.
    pub fn from_pure(modes: usize, cutoff: usize, psi: &[C64]) -> Result<Self> {
        let op = TruncatedOperator::new(modes, cutoff, CMatrix::outer(psi), true)?;
        Self::unchecked(op)
    }

    /// Fock-diagonal single- or multi-mode state from its weights.
    pub fn from_diagonal(modes: usize, cutoff: usize, weights: &[f64]) -> Result<Self> {
        if weights.iter().any(|&w| w < 0.0 || !w.is_finite()) {
            return Err(usage("diagonal weights must be finite and nonnegative"));
        }
        let op = TruncatedOperator::new(modes, cutoff, CMatrix::from_diag(weights), true)?;
        Self::unchecked(op)
    }

    pub fn with_ideal(mut self, ideal: IdealInfo) -> Self {
        self.ideal = Some(ideal);
        self
    }

    pub fn ideal(&self) -> Option<IdealInfo> {
        self.ideal
    }

    pub fn op(&self) -> &TruncatedOperator {
        &self.op
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.op.entries
    }

    pub fn modes(&self) -> usize {
        self.op.modes
    }

    pub fn cutoff(&self) -> usize {
        self.op.cutoff
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn trace(&self) -> f64 {
        self.op.entries.trace().re
    }

    pub fn trace_deficit(&self) -> f64 {
        self.trace_deficit
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.op.entries.diag_re()
    }

    /// Largest off-diagonal modulus in the Fock basis.
    pub fn off_diagonal_norm(&self) -> f64 {
        let m = &self.op.entries;
        let n = m.dim();
        let mut w = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    w = w.max(m[(i, j)].norm());
                }
            }
        }
        w
    }

    pub fn is_fock_diagonal(&self) -> bool {
        self.off_diagonal_norm() == 0.0
    }

    /// Unit-trace copy; provenance is kept so certificates can still refer
    /// to the ideal state.
    pub fn normalized(&self) -> Self {
        let tr = self.trace();
        let entries = self.op.entries.scale(1.0 / tr);
        let op = TruncatedOperator { entries, ..self.op.clone() };
        let energy = photon_number_expectation(&op);
        Self { op, trace_deficit: 0.0, energy, ideal: self.ideal }
    }

    /// Tr[ρ²].
    pub fn purity(&self) -> f64 {
        self.op.entries.trace_product_re(&self.op.entries)
    }
}

fn photon_number_expectation(op: &TruncatedOperator) -> f64 {
    let diag = op.entries.diag_re();
    diag.iter()
        .enumerate()
        .map(|(k, w)| w * multi_index(k, op.modes, op.cutoff).iter().sum::<usize>() as f64)
        .sum()
}

/// `A ⊗ B` with `A`'s modes first.
pub fn tensor_product(a: &TruncatedOperator, b: &TruncatedOperator) -> Result<TruncatedOperator> {
    if a.cutoff != b.cutoff {
        return Err(config(format!("cutoff mismatch: {} vs {}", a.cutoff, b.cutoff)));
    }
    let modes = a.modes + b.modes;
    checked_dim(modes, a.cutoff)?;
    TruncatedOperator::new(modes, a.cutoff, a.entries.kron(&b.entries), a.hermitian && b.hermitian)
}

/// Tensor product of states; provenance is combined additively.
pub fn tensor_states(a: &DensityOperator, b: &DensityOperator) -> Result<DensityOperator> {
    let op = tensor_product(&a.op, &b.op)?;
    let mut out = DensityOperator::unchecked(op)?;
    out.ideal = match (a.ideal, b.ideal) {
        (Some(x), Some(y)) => Some(IdealInfo {
            energy: x.energy + y.energy,
            pure: x.pure && y.pure,
            fock_diagonal: x.fock_diagonal && y.fock_diagonal,
        }),
        _ => None,
    };
    Ok(out)
}

/// Traces out every mode not listed in `keep` (indices from 0).
pub fn partial_trace(rho: &DensityOperator, keep: &[usize]) -> Result<DensityOperator> {
    let m = rho.modes();
    let d = rho.cutoff();
    if keep.is_empty() {
        return Err(usage("partial trace needs a nonempty set of kept modes"));
    }
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if keep.iter().any(|&k| k >= m) {
        return Err(usage(format!("mode index out of range for {m} modes")));
    }
    let traced: Vec<usize> = (0..m).filter(|i| !keep.contains(i)).collect();
    let kd = checked_dim(keep.len(), d)?;
    let td = checked_dim(traced.len(), d).unwrap_or(1);
    let full = rho.matrix();
    let mut out = CMatrix::zeros(kd);
    let compose = |kept: &[usize], tr: &[usize]| -> usize {
        let mut idx = alloc::vec![0usize; m];
        for (slot, &mode) in keep.iter().enumerate() {
            idx[mode] = kept[slot];
        }
        for (slot, &mode) in traced.iter().enumerate() {
            idx[mode] = tr[slot];
        }
        idx.iter().fold(0, |acc, &k| acc * d + k)
    };
    for i in 0..kd {
        let ki = multi_index(i, keep.len(), d);
        for j in 0..kd {
            let kj = multi_index(j, keep.len(), d);
            let mut acc = C64::new(0.0, 0.0);
            for t in 0..td {
                let tt = multi_index(t, traced.len(), d);
                acc += full[(compose(&ki, &tt), compose(&kj, &tt))];
            }
            out[(i, j)] = acc;
        }
    }
    let op = TruncatedOperator::new(keep.len(), d, out, true)?;
    DensityOperator::unchecked(op)
}

/// Total dephasing in the Fock basis.
pub fn dephase(rho: &DensityOperator) -> DensityOperator {
    let op = TruncatedOperator {
        entries: CMatrix::from_diag(&rho.diagonal()),
        ..rho.op.clone()
    };
    DensityOperator { op, ideal: rho.ideal.map(|i| IdealInfo { pure: false, fock_diagonal: true, ..i }), ..rho.clone() }
}

/// `‖ρ − σ‖₁`.
pub fn trace_distance(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    if rho.modes() != sigma.modes() || rho.cutoff() != sigma.cutoff() {
        return Err(usage("trace distance needs matching modes and cutoff"));
    }
    let diff = rho.matrix() - sigma.matrix();
    Ok(eigh(&diff).values.iter().map(|x| x.abs()).sum())
}

/// Lifts `f` to the Hermitian operator `a`; the flag reports eigenvalue
/// clamping for logarithms.
pub fn operator_function(a: &TruncatedOperator, f: ScalarFn) -> Result<(TruncatedOperator, bool)> {
    if !a.hermitian {
        return Err(usage("operator functions need a hermitian argument"));
    }
    let out = hermitian_function(&a.entries, f);
    let mut entries = out.matrix;
    entries.hermitize();
    Ok((TruncatedOperator { entries, ..a.clone() }, out.floored))
}
