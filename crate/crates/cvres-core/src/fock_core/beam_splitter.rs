#[allow(unused_imports)]
use num_traits::Float;
use alloc::format;
use alloc::vec::Vec;


use super::{eigh, CMatrix, TruncatedOperator};
use crate::error::{usage, Result};
use crate::C64;

/// Block-diagonal representation of `U_λ = exp(θ(a†b − ab†))`, `θ = arccos√λ`,
/// on two modes with cutoff `d`.
///
/// Block `N` acts on `{|N−ℓ, ℓ> : ℓ ∈ lo(N)..=hi(N)}`. Blocks with `N >= d`
/// are only partially inside the truncated space; there the generator is
/// restricted before exponentiation so the result stays unitary.
#[derive(Clone, Debug)]
pub struct BeamSplitter {
    lambda: f64,
    cutoff: usize,
    blocks: Vec<CMatrix>,
}

impl BeamSplitter {
    pub fn new(lambda: f64, cutoff: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) || lambda.is_nan() {
            return Err(usage(format!("transmissivity {lambda} outside [0, 1]")));
        }
        if cutoff == 0 {
            return Err(usage("cutoff must be positive"));
        }
        let theta = lambda.sqrt().acos();
        let blocks = (0..2 * cutoff - 1).map(|n| block(n, cutoff, theta)).collect();
        Ok(Self { lambda, cutoff, blocks })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// Range of mode-2 occupations in block `n`.
    pub fn block_range(&self, n: usize) -> (usize, usize) {
        block_range(n, self.cutoff)
    }

    pub fn block(&self, n: usize) -> &CMatrix {
        &self.blocks[n]
    }

    /// Applies `U_λ` to a two-mode amplitude vector in multi-index order.
    pub fn apply(&self, psi: &[C64]) -> Vec<C64> {
        let d = self.cutoff;
        assert_eq!(psi.len(), d * d);
        let mut out = alloc::vec![C64::new(0.0, 0.0); d * d];
        for (n, b) in self.blocks.iter().enumerate() {
            let (lo, hi) = block_range(n, d);
            let idx: Vec<usize> = (lo..=hi).map(|l| (n - l) * d + l).collect();
            let local: Vec<C64> = idx.iter().map(|&i| psi[i]).collect();
            let moved = b.mul_vec(&local);
            for (&i, v) in idx.iter().zip(moved) {
                out[i] = v;
            }
        }
        out
    }

    /// Dense unitary on the `d² × d²` two-mode space.
    pub fn to_operator(&self) -> TruncatedOperator {
        let d = self.cutoff;
        let mut u = CMatrix::zeros(d * d);
        for (n, b) in self.blocks.iter().enumerate() {
            let (lo, hi) = block_range(n, d);
            for (r, lr) in (lo..=hi).enumerate() {
                for (c, lc) in (lo..=hi).enumerate() {
                    u[((n - lr) * d + lr, (n - lc) * d + lc)] = b[(r, c)];
                }
            }
        }
        TruncatedOperator::new(2, d, u, false).expect("dimension checked at construction")
    }
}

fn block_range(n: usize, d: usize) -> (usize, usize) {
    (n.saturating_sub(d - 1), n.min(d - 1))
}

fn block(n: usize, d: usize, theta: f64) -> CMatrix {
    let (lo, hi) = block_range(n, d);
    let size = hi - lo + 1;
    if theta == 0.0 {
        return CMatrix::identity(size);
    }
    // iG with G|N−ℓ,ℓ> = √((N−ℓ+1)ℓ)|N−ℓ+1,ℓ−1> − √((N−ℓ)(ℓ+1))|N−ℓ−1,ℓ+1>
    let mut ig = CMatrix::zeros(size);
    for r in 0..size.saturating_sub(1) {
        let l = lo + r;
        let c = (((n - l) * (l + 1)) as f64).sqrt();
        ig[(r + 1, r)] = C64::new(0.0, -c);
        ig[(r, r + 1)] = C64::new(0.0, c);
    }
    // exp(θG) = exp(−iθ·iG)
    let e = eigh(&ig);
    let v = &e.vectors;
    let mut out = CMatrix::zeros(size);
    for k in 0..size {
        let ph = C64::from_polar(1.0, -theta * e.values[k]);
        for i in 0..size {
            let a = v[(i, k)] * ph;
            for j in 0..size {
                out[(i, j)] += a * v[(j, k)].conj();
            }
        }
    }
    out
}

/// Dense beam-splitter unitary with transmissivity `λ`.
pub fn beam_splitter_unitary(lambda: f64, cutoff: usize) -> Result<TruncatedOperator> {
    Ok(BeamSplitter::new(lambda, cutoff)?.to_operator())
}
