//! Truncated Fock-space linear algebra.
//!
//! Dense Hermitian eigendecomposition, matrix functions and their Fréchet
//! derivatives, operators and states on `m` modes with cutoff `d`, coherent
//! vectors, the two-mode beam splitter and the dephasing channel.

mod beam_splitter;
mod coherent;
mod eigh;
mod funcs;
mod matrix;
mod operator;

pub use beam_splitter::{beam_splitter_unitary, BeamSplitter};
pub use coherent::{coherent_amplitudes, coherent_vector, displaced_one, poisson_tail, CoherentVector};
pub use eigh::{eigh, eigh_real_symmetric, Eigh};
pub use funcs::{
    exp_divided_difference, expm_hermitian, frechet_exp, hermitian_function, hermitian_function_eig,
    spectral_projector, trace_with_function, FunctionOutput, ScalarFn, LOG_FLOOR,
};
pub use matrix::{inner, norm_sqr, CMatrix};
pub use operator::{
    dephase, operator_function, partial_trace, tensor_product, tensor_states, trace_distance, DensityOperator,
    IdealInfo, TruncatedOperator, HERMITIAN_TOL, PSD_TOL,
};
