use super::*;
use crate::fock_core::{dephase, trace_distance, CMatrix, TruncatedOperator};
use crate::optim::OptimizerConfig;
use crate::states::{make_state, Family, StateSpec};
use crate::{C64, LOG2_E};
use alloc::vec::Vec;
use approx::assert_abs_diff_eq;
use proptest::prelude::*;

fn density(d: usize, raw: &[f64]) -> DensityOperator {
    // ρ = GG†/Tr with a small full-rank admixture
    let g = CMatrix::from_fn(d, |i, j| C64::new(raw[2 * (i * d + j)], raw[2 * (i * d + j) + 1]));
    let mut m = &g.matmul(&g.adjoint()) + &CMatrix::identity(d).scale(1e-3);
    m.hermitize();
    let tr = m.trace().re;
    DensityOperator::new(TruncatedOperator::new(1, d, m.scale(1.0 / tr), true).unwrap()).unwrap()
}

fn diagonal(p: &[f64]) -> DensityOperator {
    let s: f64 = p.iter().sum();
    let w: Vec<f64> = p.iter().map(|x| x / s).collect();
    DensityOperator::from_diagonal(1, w.len(), &w).unwrap()
}

fn raw(d: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-1.0f64..1.0, 2 * d * d)
}

#[test]
fn entropy_of_thermal_state() {
    let rho = make_state(&StateSpec::new(Family::Thermal { nu: 1.0 }, 80)).unwrap();
    assert_abs_diff_eq!(von_neumann_entropy(&rho), 2.0, epsilon = 1e-9);
}

#[test]
fn kl_conventions() {
    assert_eq!(kl_divergence(&[0.0, 1.0], &[0.5, 0.5]), 1.0);
    assert_eq!(kl_divergence(&[0.5, 0.5], &[1.0, 0.0]), f64::INFINITY);
}

#[test]
fn relative_entropy_support_and_vacuum() {
    let vac = diagonal(&[1.0, 0.0]);
    let mix = diagonal(&[0.5, 0.5]);
    assert_eq!(relative_entropy(&mix, &vac).unwrap(), f64::INFINITY);
    assert_abs_diff_eq!(relative_entropy(&vac, &mix).unwrap(), 1.0, epsilon = 1e-12);
}

#[test]
fn wehrl_of_vacuum_is_log2e() {
    let vac = make_state(&StateSpec::new(Family::Fock { n: 0 }, 10)).unwrap();
    let w = wehrl_entropy(&vac, &QuadratureGrid::default()).unwrap();
    assert_abs_diff_eq!(w.value_bits, LOG2_E, epsilon = 1e-6);
}

#[test]
fn wehrl_radius_is_checked() {
    let grid = QuadratureGrid::new(8, 8, 0.01).unwrap();
    let rho = make_state(&StateSpec::new(Family::Fock { n: 3 }, 5)).unwrap();
    assert!(matches!(wehrl_entropy(&rho, &grid), Err(crate::Error::InsufficientRadius { .. })));
}

#[test]
fn husimi_of_vacuum_at_origin() {
    let vac = make_state(&StateSpec::new(Family::Fock { n: 0 }, 10)).unwrap();
    assert_abs_diff_eq!(husimi_q(&vac, &[C64::new(0.0, 0.0)]).unwrap(), 1.0 / core::f64::consts::PI, epsilon = 1e-15);
    // certified from above within the default relative tolerance
    let sup = husimi_sup(&vac).unwrap() * core::f64::consts::PI;
    assert!((1.0..=1.0 + 1e-6).contains(&sup), "{sup}");
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 50, ..ProptestConfig::default() })]

    #[test]
    fn measured_equals_relative_on_commuting_pairs(
        p in proptest::collection::vec(0.01f64..1.0, 5),
        q in proptest::collection::vec(0.01f64..1.0, 5),
    ) {
        let (rho, sigma) = (diagonal(&p), diagonal(&q));
        let dm = measured_relative_entropy(&rho, &sigma, &OptimizerConfig::default()).unwrap().value_bits;
        let d = relative_entropy(&rho, &sigma).unwrap();
        prop_assert!((dm - d).abs() <= 1e-6, "{} vs {}", dm, d);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn measured_entropy_inequalities(a in raw(4), b in raw(4)) {
        let (rho, sigma) = (density(4, &a), density(4, &b));
        let dm = measured_relative_entropy(&rho, &sigma, &OptimizerConfig::default()).unwrap().value_bits;
        let d = relative_entropy(&rho, &sigma).unwrap();
        prop_assert!(dm <= d + 1e-8, "D^M {} above D {}", dm, d);
        let t = trace_distance(&rho, &sigma).unwrap();
        prop_assert!(dm >= t * t / (2.0 * core::f64::consts::LN_2) - 1e-8, "Pinsker fails: {} vs {}", dm, t);
        let dephased = kl_divergence(&dephase(&rho).diagonal(), &dephase(&sigma).diagonal());
        prop_assert!(dephased <= dm + 1e-8, "data processing fails: {} vs {}", dephased, dm);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 20, ..ProptestConfig::default() })]

    #[test]
    fn heterodyne_outcomes_bound_measured_entropy(a in raw(8), b in raw(8)) {
        let (rho, sigma) = (density(8, &a), density(8, &b));
        let dm = measured_relative_entropy(&rho, &sigma, &OptimizerConfig::default()).unwrap().value_bits;
        let h = husimi_kl(&rho, &sigma, &QuadratureGrid::default()).unwrap();
        prop_assert!(dm >= h.value_bits - h.error_bits, "{} vs {}", dm, h.value_bits);
    }
}
