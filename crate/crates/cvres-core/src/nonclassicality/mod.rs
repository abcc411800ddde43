//! Bound engines for the relative entropy of nonclassicality `N` and its
//! measured variant `N^M`: the Γ program with a certified inner supremum,
//! the exact Fock-diagonal program, closed forms, classical-ansatz upper
//! bounds, truncation certificates and the interval sandwich.

mod basel;
mod bound;
mod cat;
mod fock_diagonal;
mod gamma;
mod sup;
mod sandwich;
mod truncation;
mod upper;

pub use cat::cat_lower_bound;
pub use basel::{basel_divergence_bound, basel_divergence_sum_of_sups, basel_sup_excess, basel_witness_bits, BaselBound};
pub use bound::{Certificate, Direction, MonotoneBound, Quantity};
pub use fock_diagonal::{fock_closed_form, fock_diagonal_ncm, fock_diagonal_program, FockDiagonalSolution};
pub use gamma::{detect_symmetry, gamma_lower_bound, gamma_objective, gamma_program, GammaSolution};
pub use sup::{coherent_sup_certified, SupCertificate};
pub use sandwich::{bound_sandwich, bound_sandwich_product, state_entropy, Sandwich, CONSISTENCY_TOL, GENERIC_GAMMA_MAX_DIM};
pub use truncation::{truncation_certificate, truncation_certificate_abs, truncation_correction};
pub use upper::{
    classical_ansatz_upper_bound, coherent_mixture_minimum, energy_upper_bound, gaussian_bounds, husimi_lower_bound,
    squeezed_thermal_divergence, squeezed_thermal_minimum, wehrl_upper_bound, AnsatzFamily, AnsatzUpper,
};
