use super::*;
use crate::fock_core::{coherent_amplitudes, dephase, inner};
use approx::assert_abs_diff_eq;
use proptest::prelude::*;

fn spec(family: Family, d: usize) -> StateSpec {
    StateSpec::new(family, d)
}

#[test]
fn fock_two() {
    let rho = make_state(&spec(Family::Fock { n: 2 }, 5)).unwrap();
    assert_eq!(rho.diagonal(), vec![0.0, 0.0, 1.0, 0.0, 0.0]);
    assert_eq!(rho.trace_deficit(), 0.0);
}

#[test]
fn fock_needs_cutoff() {
    let err = make_state(&spec(Family::Fock { n: 5 }, 5)).unwrap_err();
    assert_eq!(err, Error::InsufficientCutoff { required: 6, got: 5 });
}

#[test]
fn thermal_one() {
    let rho = make_state_with_tol(&spec(Family::Thermal { nu: 1.0 }, 40), 1e-11).unwrap();
    for (k, w) in rho.diagonal().iter().enumerate() {
        assert_abs_diff_eq!(*w, 0.5f64.powi(k as i32 + 1), epsilon = 1e-16);
    }
    assert_abs_diff_eq!(rho.trace_deficit(), 2f64.powi(-40), epsilon = 1e-15);
}

#[test]
fn thermal_insufficient_names_cutoff() {
    match make_state(&spec(Family::Thermal { nu: 1.0 }, 10)) {
        Err(Error::InsufficientCutoff { required, got }) => {
            assert_eq!(got, 10);
            assert_eq!(required, 27);
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn cat_overlaps_symmetric() {
    let s = spec(Family::Cat { alpha: 1.0, sign: Sign::Plus }, 30);
    let psi = pure_amplitudes(&s).unwrap();
    let plus = coherent_amplitudes(C64::new(1.0, 0.0), 30);
    let minus = coherent_amplitudes(C64::new(-1.0, 0.0), 30);
    let a = inner(&plus, &psi);
    let b = inner(&minus, &psi);
    assert_abs_diff_eq!(a.re, b.re, epsilon = 1e-14);
    assert_abs_diff_eq!(a.im, b.im, epsilon = 1e-14);
    let rho = make_state(&s).unwrap();
    assert!(rho.purity() >= 1.0 - 2.0 * rho.trace_deficit() - 1e-12);
}

#[test]
fn cat_parity_and_dephasing() {
    for sign in [Sign::Plus, Sign::Minus] {
        let rho = make_state(&spec(Family::Cat { alpha: 1.0, sign }, 30)).unwrap();
        let diag = dephase(&rho).diagonal();
        for (k, w) in diag.iter().enumerate() {
            if (k % 2 == 0) != (sign == Sign::Plus) {
                assert_eq!(*w, 0.0);
            }
        }
    }
}

#[test]
fn squeezed_zero_is_vacuum() {
    let rho = make_state(&spec(Family::Squeezed { r: 0.0 }, 6)).unwrap();
    assert_eq!(rho.diagonal(), vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
}

#[test]
fn energies_match_ideal() {
    let cases = [
        Family::Coherent { alpha: 1.5, alpha_im: -0.5 },
        Family::Cat { alpha: 1.2, sign: Sign::Plus },
        Family::Cat { alpha: 1.2, sign: Sign::Minus },
        Family::Squeezed { r: 0.7 },
        Family::NoisyFock { n: 3, nu: 0.5, p: 0.3 },
    ];
    for f in cases {
        let s = spec(f, 80);
        let rho = make_state(&s).unwrap();
        assert_abs_diff_eq!(rho.energy(), s.ideal_energy(), epsilon = 1e-6);
        assert_abs_diff_eq!(rho.trace_deficit(), s.deficit_at(80), epsilon = 1e-12);
    }
}

#[test]
fn basel_trace_partial_sum() {
    let n_max = 10;
    let s = spec(Family::Basel { n_max }, (1 << n_max) + 1);
    let rho = make_state(&s).unwrap();
    let c = 6.0 / (core::f64::consts::PI * core::f64::consts::PI);
    let expected: f64 = (0..=n_max).map(|n| c / ((n + 1) as f64).powi(2)).sum();
    assert_abs_diff_eq!(rho.trace(), expected, epsilon = 1e-15);
    let w20: f64 = basel_weights(20).iter().map(|w| w.1).sum();
    let e20: f64 = (0..=20).map(|n| c / ((n + 1) as f64).powi(2)).sum();
    assert_eq!(w20, e20);
    assert!(make_state(&s.with_cutoff(1 << n_max)).is_err());
}

#[test]
fn descriptors_closed_form() {
    let vac = gaussian_descriptor(&spec(Family::Coherent { alpha: 0.0, alpha_im: 0.0 }, 1)).unwrap();
    assert_eq!(vac.s, vec![0.0, 0.0]);
    assert_eq!(vac.v, vec![1.0, 0.0, 0.0, 1.0]);
    let th = gaussian_descriptor(&spec(Family::Thermal { nu: 1.0 }, 1)).unwrap();
    assert_eq!(th.v, vec![3.0, 0.0, 0.0, 3.0]);
    assert!(gaussian_descriptor(&spec(Family::Fock { n: 1 }, 3)).is_err());
}

#[test]
fn descriptors_match_moments() {
    let cases = [
        Family::Squeezed { r: 1.0 },
        Family::Squeezed { r: -1.5 },
        Family::Thermal { nu: 3.0 },
        Family::Coherent { alpha: 3.0, alpha_im: 0.0 },
        Family::Coherent { alpha: 1.0, alpha_im: 2.0 },
    ];
    for f in cases {
        let probe = spec(f, 1);
        let s = probe.with_cutoff(probe.required_cutoff(1e-10).unwrap().max(60));
        let rho = make_state(&s).unwrap();
        let m = moments_descriptor(&rho).unwrap();
        let g = gaussian_descriptor(&s).unwrap();
        g.validate().unwrap();
        for i in 0..2 {
            assert_abs_diff_eq!(m.s[i], g.s[i], epsilon = 1e-6);
        }
        for i in 0..4 {
            assert_abs_diff_eq!(m.v[i], g.v[i], epsilon = 1e-6);
        }
    }
}

#[test]
fn descriptor_rejects_unphysical() {
    let bad = GaussianDescriptor { s: vec![0.0, 0.0], v: vec![0.5, 0.0, 0.0, 0.5] };
    assert!(bad.validate().is_err());
    let gd = GaussianDescriptor { s: vec![0.0, 0.0], v: vec![1.0, 0.0, 0.0, 1.0] };
    assert_abs_diff_eq!(gd.det_v_plus_identity(), 4.0, epsilon = 1e-14);
}

#[test]
fn invalid_parameters() {
    assert!(make_state(&spec(Family::NoisyFock { n: 1, nu: 0.0, p: 1.5 }, 5)).is_err());
    assert!(make_state(&spec(Family::Thermal { nu: -1.0 }, 5)).is_err());
    assert!(make_state(&spec(Family::Squeezed { r: f64::NAN }, 5)).is_err());
    let mut s = spec(Family::Fock { n: 0 }, 2);
    s.modes = 2;
    assert!(make_state(&s).is_err());
}

proptest! {
    #[test]
    fn pure_families_are_pure(alpha in 0.1f64..2.5, r in -1.0f64..1.0, plus in any::<bool>()) {
        let sign = if plus { Sign::Plus } else { Sign::Minus };
        for f in [Family::Coherent { alpha, alpha_im: 0.3 }, Family::Cat { alpha, sign }, Family::Squeezed { r }] {
            let rho = make_state(&spec(f, 70)).unwrap();
            prop_assert!(rho.purity() >= 1.0 - 2.0 * rho.trace_deficit() - 1e-12);
            prop_assert!(rho.trace_deficit() <= DEFAULT_DEFICIT_TOL);
        }
    }

    #[test]
    fn required_cutoff_is_minimal(nu in 0.1f64..3.0, alpha in 0.2f64..3.0) {
        for f in [Family::Thermal { nu }, Family::Coherent { alpha, alpha_im: 0.0 }] {
            let s = spec(f, 1);
            let d = s.required_cutoff(1e-8).unwrap();
            prop_assert!(s.deficit_at(d) <= 1e-8);
            prop_assert!(d == 1 || s.deficit_at(d - 1) > 1e-8);
        }
    }
}
