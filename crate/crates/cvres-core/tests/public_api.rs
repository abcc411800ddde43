use approx::assert_abs_diff_eq;
use cvres_core::nonclassicality::{bound_sandwich, bound_sandwich_product, gamma_lower_bound, gamma_program, gaussian_bounds};
use cvres_core::optim::OptimizerConfig;
use cvres_core::rates_protocols::{closed_form_ps_derived, fock_dilution, noisy_fock_dilution_upper};
use cvres_core::states::{gaussian_descriptor, make_state, Family, Sign, StateSpec};
use cvres_core::LOG2_E;

#[test]
fn gamma_operator_lives_on_the_parity_sector() {
    let spec = StateSpec::new(Family::Squeezed { r: 0.5 }, 30);
    let sol = gamma_program(&make_state(&spec).unwrap(), &OptimizerConfig::default()).unwrap();
    let l = &sol.operator;
    for i in 0..30 {
        for j in 0..30 {
            if i % 2 == 1 || j % 2 == 1 {
                assert_eq!(l[(i, j)].norm(), 0.0);
            }
        }
    }
    // beats the covariance bound ½log₂det(V+𝟙) − 1
    let (cov, _) = gaussian_bounds(&gaussian_descriptor(&spec).unwrap(), 0.0).unwrap();
    assert!(sol.value > cov.value + 0.1, "{} vs {}", sol.value, cov.value);
}

#[test]
fn gamma_is_stable_in_the_cutoff() {
    let cfg = OptimizerConfig::default();
    let at = |d| gamma_lower_bound(&make_state(&StateSpec::new(Family::Cat { alpha: 1.0, sign: Sign::Minus }, d)).unwrap(), &cfg).unwrap().value;
    let (a, b) = (at(25), at(35));
    assert!((a - b).abs() < 1e-3, "{a} vs {b}");
}

#[test]
fn sandwich_orders_endpoints() {
    let cfg = OptimizerConfig::default();
    for f in [Family::Thermal { nu: 0.3 }, Family::Coherent { alpha: 1.0, alpha_im: -0.5 }, Family::NoisyFock { n: 2, nu: 0.1, p: 0.6 }] {
        let s = bound_sandwich(&StateSpec::new(f, 40), &cfg).unwrap();
        assert!(s.lower.value <= s.upper.value + 1e-9, "{f:?}");
        assert!(s.lowers.iter().all(|b| b.value <= s.lower.value));
        assert!(s.uppers.iter().all(|b| b.value >= s.upper.value));
    }
}

#[test]
fn product_lower_endpoints_add() {
    let cfg = OptimizerConfig::default();
    let one = StateSpec::new(Family::Fock { n: 1 }, 10);
    let s = bound_sandwich_product(&[one, one], &cfg).unwrap();
    assert!(s.lower.value >= 2.0 * LOG2_E - 1e-6, "{}", s.lower.value);
    assert!(s.lower.value <= s.upper.value + 1e-9);
}

#[test]
fn dilution_simulation_and_rate_bound_agree() {
    let n = 4;
    let out = fock_dilution(n, 1.0, 0.999).unwrap();
    assert_abs_diff_eq!(out.success_probability, closed_form_ps_derived(n, 1.0, 0.999), epsilon = 1e-10);
    let up = noisy_fock_dilution_upper(n, 1.0).unwrap().value.unwrap();
    assert!(out.rate_lower_bound <= up + 1e-12, "{} vs {up}", out.rate_lower_bound);
}
