use super::*;
use crate::fock_core::DensityOperator;
use crate::nonclassicality::fock_closed_form;
use crate::optim::OptimizerConfig;
use approx::assert_abs_diff_eq;
use proptest::prelude::*;

fn fock_bound(n: usize, lower: bool) -> MonotoneBound {
    let c = Certificate::closed_form("Fock closed form");
    if lower {
        MonotoneBound::lower(Quantity::Ncm, fock_closed_form(n), c)
    } else {
        MonotoneBound::upper(Quantity::Nc, fock_closed_form(n), c)
    }
}

#[test]
fn identity_rate_is_one() {
    let r = rate_upper_bound(fock_bound(3, false), fock_bound(3, true));
    assert_abs_diff_eq!(r.value.unwrap(), 1.0, epsilon = 3e-4);
}

#[test]
fn zero_denominator_is_undefined() {
    let c = Certificate::closed_form("x");
    let r = rate_upper_bound(MonotoneBound::upper(Quantity::Nc, 0.0, c.clone()), MonotoneBound::lower(Quantity::Ncm, 0.0, c));
    assert!(r.undefined && r.value.is_none());
}

#[test]
fn noisy_fock_rate_bound_is_tight() {
    let r = noisy_fock_dilution_upper(100, 1.0).unwrap().value.unwrap();
    assert!((1.0..=1.01).contains(&r), "{r}");
}

#[test]
fn free_energy_examples() {
    let beta = core::f64::consts::LN_2;
    let vac = DensityOperator::from_diagonal(1, 4, &[1.0, 0.0, 0.0, 0.0]).unwrap();
    assert_abs_diff_eq!(free_energy(&vac, beta).unwrap(), 1.0, epsilon = 1e-12);
    let w: alloc::vec::Vec<f64> = (0..200).map(|k| 0.5f64.powi(k + 1)).collect();
    let gibbs = DensityOperator::from_diagonal(1, 200, &w).unwrap();
    assert_abs_diff_eq!(free_energy(&gibbs, beta).unwrap(), 0.0, epsilon = 1e-9);
    let one = DensityOperator::from_diagonal(1, 3, &[0.0, 1.0, 0.0]).unwrap();
    assert_abs_diff_eq!(thermo_rate_bound(&one, &one, 0.7).unwrap().value.unwrap(), 1.0, epsilon = 1e-12);
    assert!(thermo_rate_bound(&one, &gibbs, beta).unwrap().undefined);
}

proptest! {
    #[test]
    fn free_energy_is_additive(p in proptest::collection::vec(0.01f64..1.0, 4), q in proptest::collection::vec(0.01f64..1.0, 4)) {
        let beta = 0.8;
        let norm = |v: &[f64]| { let s: f64 = v.iter().sum(); v.iter().map(|x| x / s).collect::<alloc::vec::Vec<_>>() };
        let (p, q) = (norm(&p), norm(&q));
        let a = DensityOperator::from_diagonal(1, 4, &p).unwrap();
        let b = DensityOperator::from_diagonal(1, 4, &q).unwrap();
        // D(ρ⊗σ‖γ⊗γ) from the joint distribution: entropies and energies add
        let joint: alloc::vec::Vec<f64> = p.iter().flat_map(|x| q.iter().map(move |y| x * y)).collect();
        let s: f64 = joint.iter().map(|&x| crate::special::neg_xlog2x(x)).sum();
        let e: f64 = (0..16).map(|i| joint[i] * ((i / 4) + (i % 4)) as f64).sum();
        let nu = gibbs_occupation(beta).unwrap();
        let joint_d = -s + 2.0 * (1.0 + nu).log2() + e * beta * crate::LOG2_E;
        let sum = free_energy(&a, beta).unwrap() + free_energy(&b, beta).unwrap();
        prop_assert!((joint_d - sum).abs() <= 1e-8);
    }
}

#[test]
fn fock_dilution_matches_closed_forms() {
    assert_abs_diff_eq!(closed_form_ps(2, 1.0, 0.5), 2.0 / 3.0, epsilon = 1e-15);
    for n in 2..=4 {
        for &lambda in &[0.3, 0.5, 0.7] {
            for &p in &[0.5, 1.0] {
                let o = fock_dilution(n, p, lambda).unwrap();
                assert_abs_diff_eq!(o.success_probability, closed_form_ps_derived(n, p, lambda), epsilon = 1e-12);
                assert!(o.output_fidelity_check >= 1.0 - 1e-10);
                if p == 1.0 {
                    assert_abs_diff_eq!(o.success_probability, closed_form_ps(n, p, lambda), epsilon = 1e-12);
                }
            }
        }
    }
    let o = fock_dilution(3, 0.5, 0.999).unwrap();
    assert!((o.success_probability - 0.5).abs() <= 0.005);
    assert!(fock_dilution(3, 0.5, 1.0).is_err());
}

#[test]
fn cat_protocols_match_closed_forms() {
    for &alpha in &[0.5, 1.0, 1.5, 2.0] {
        let a = cat_amplification(alpha, None).unwrap();
        assert_abs_diff_eq!(a.ours.success_probability, ours_amplification_probability(alpha), epsilon = 1e-8);
        assert_abs_diff_eq!(a.lund.success_probability, lund_probability(alpha), epsilon = 1e-8);
        assert!(a.ours.output_fidelity_check >= 1.0 - 1e-9);
        assert!(a.lund.output_fidelity_check >= 1.0 - 1e-9);
        let d = cat_dilution(alpha, None).unwrap();
        let t = alpha * alpha;
        assert_abs_diff_eq!(d.p_plus, t.cosh().powi(2) / (2.0 * t).cosh(), epsilon = 1e-8);
        assert_abs_diff_eq!(d.p_minus, t.sinh().powi(2) / (2.0 * t).cosh(), epsilon = 1e-8);
        assert_abs_diff_eq!(d.p_plus + d.p_minus, 1.0, epsilon = 1e-10);
        assert!(d.outcome.output_fidelity_check >= 1.0 - 1e-9 && d.plus_fidelity >= 1.0 - 1e-9);
    }
    assert_abs_diff_eq!(ours_amplification_probability(1.0), 0.290013, epsilon = 1e-6);
    // the formula evaluates to 0.1578352; the quoted reference value is rounded
    assert_abs_diff_eq!(lund_probability(1.0), 0.157840, epsilon = 1e-5);
    assert_abs_diff_eq!(lund_probability(1.0), 0.157_835_241_474, epsilon = 1e-11);
    assert_abs_diff_eq!(cat_dilution(1.0, None).unwrap().outcome.rate_lower_bound, 0.183550, epsilon = 1e-6);
    assert!(matches!(cat_amplification(2.0, Some(5)), Err(crate::Error::InsufficientCutoff { .. })));
}

#[test]
fn figure_rows_are_sound() {
    let cfg = OptimizerConfig::default();
    for task in [ProtocolTask::Amplify, ProtocolTask::Dilute] {
        for row in protocol_figure_data(task, &[0.5, 1.0, 2.0], &cfg).unwrap() {
            std::println!("{:?} {} {} {:?}", task, row.alpha, row.lower_rate, row.upper_rate);
            assert!(row.upper_rate.unwrap() >= row.lower_rate);
        }
    }
}
