//! Acceptance harness: one PASS/FAIL line per criterion, each checked at its
//! numeric tolerance and wall-clock budget. Exits nonzero if any fails.

use std::f64::consts::{LN_2, LOG2_E};
use std::time::{Duration, Instant};

use cvres_core::entropies::{
    husimi_kl, kl_divergence, measured_relative_entropy, relative_entropy, wehrl_entropy, QuadratureGrid,
};
use cvres_core::fock_core::{
    beam_splitter_unitary, coherent_amplitudes, dephase, trace_distance, BeamSplitter, CMatrix, DensityOperator,
    TruncatedOperator,
};
use cvres_core::nonclassicality::{
    basel_divergence_bound, bound_sandwich, fock_closed_form, fock_diagonal_ncm, gamma_lower_bound,
    truncation_certificate, Sandwich,
};
use cvres_core::optim::OptimizerConfig;
use cvres_core::rates_protocols::{
    cat_amplification, cat_dilution, closed_form_ps, fock_dilution, lund_probability, noisy_fock_dilution_upper,
    ours_amplification_probability,
};
use cvres_core::states::{make_state, Family, Sign, StateSpec, DEFAULT_DEFICIT_TOL};
use cvres_core::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: String) -> Check {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn state(family: Family, d: usize) -> DensityOperator {
    make_state(&StateSpec::new(family, d)).expect("valid state")
}

fn random_density(rng: &mut ChaCha8Rng, d: usize) -> DensityOperator {
    // ρ = GG†/Tr with a small full-rank admixture
    let g = CMatrix::from_fn(d, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let mut m = &g.matmul(&g.adjoint()) + &CMatrix::identity(d).scale(1e-3);
    m.hermitize();
    let tr = m.trace().re;
    DensityOperator::new(TruncatedOperator::new(1, d, m.scale(1.0 / tr), true).unwrap()).unwrap()
}

fn random_diagonal(rng: &mut ChaCha8Rng, d: usize) -> DensityOperator {
    let w: Vec<f64> = (0..d).map(|_| rng.gen_range(0.01..1.0)).collect();
    let s: f64 = w.iter().sum();
    DensityOperator::from_diagonal(1, d, &w.iter().map(|x| x / s).collect::<Vec<_>>()).unwrap()
}

fn c1_fock_closed_form() -> Check {
    let cfg = OptimizerConfig::default();
    let mut worst = 0.0f64;
    for n in 1..=6usize {
        let exact = LOG2_E * ((1..=n).map(|k| (k as f64).ln()).sum::<f64>() + n as f64 - n as f64 * (n as f64).ln());
        let (lo, up) = fock_diagonal_ncm(&state(Family::Fock { n }, n + 1), &cfg).map_err(|e| e.to_string())?;
        worst = worst.max((lo.value - exact).abs()).max((up.value - exact).abs());
        worst = worst.max((fock_closed_form(n) - exact).abs());
    }
    ensure(worst <= 1e-6, format!("max deviation {worst:.2e} (tol 1e-6)"))
}

fn c2_noisy_fock_curve() -> Check {
    let cfg = OptimizerConfig::default();
    let mut worst = 0.0f64;
    for i in 1..=19 {
        let p = 0.05 * i as f64;
        let exact = p * LOG2_E + (1.0 - p) * (1.0 - p).log2();
        let rho = state(Family::NoisyFock { n: 1, nu: 0.0, p }, 20);
        let (lo, up) = fock_diagonal_ncm(&rho, &cfg).map_err(|e| e.to_string())?;
        worst = worst.max((lo.value - exact).abs()).max((up.value - exact).abs());
    }
    ensure(worst <= 1e-6, format!("max deviation {worst:.2e} over 19 points (tol 1e-6)"))
}

fn c3_generic_gamma() -> Check {
    let lb = gamma_lower_bound(&state(Family::Fock { n: 1 }, 20), &OptimizerConfig::default()).map_err(|e| e.to_string())?;
    ensure(lb.value >= LOG2_E - 1e-4, format!("Γ lower bound {:.8} vs log₂e {:.8}", lb.value, LOG2_E))
}

fn c4_vacuum_wehrl() -> Check {
    let w = wehrl_entropy(&state(Family::Fock { n: 0 }, 10), &QuadratureGrid::default()).map_err(|e| e.to_string())?;
    let dev = (w.value_bits - LOG2_E).abs();
    ensure(dev <= 1e-6, format!("S_W = {:.10} bits, deviation {dev:.2e}", w.value_bits))
}

fn c5_measured_entropy() -> Check {
    let cfg = OptimizerConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut eq_worst = 0.0f64;
    for _ in 0..50 {
        let (r, s) = (random_diagonal(&mut rng, 5), random_diagonal(&mut rng, 5));
        let dm = measured_relative_entropy(&r, &s, &cfg).map_err(|e| e.to_string())?.value_bits;
        eq_worst = eq_worst.max((dm - relative_entropy(&r, &s).map_err(|e| e.to_string())?).abs());
    }
    let mut violations = 0;
    for _ in 0..200 {
        let (r, s) = (random_density(&mut rng, 4), random_density(&mut rng, 4));
        let dm = measured_relative_entropy(&r, &s, &cfg).map_err(|e| e.to_string())?.value_bits;
        let d = relative_entropy(&r, &s).map_err(|e| e.to_string())?;
        let t = trace_distance(&r, &s).map_err(|e| e.to_string())?;
        let dephased = kl_divergence(&dephase(&r).diagonal(), &dephase(&s).diagonal());
        let pinsker = t * t / (2.0 * LN_2);
        if dm > d + 1e-8 || dm < pinsker - 1e-8 || dephased > dm + 1e-8 {
            violations += 1;
        }
    }
    ensure(
        eq_worst <= 1e-6 && violations == 0,
        format!("commuting max |D^M − D| {eq_worst:.2e}; {violations} of 200 random pairs violate an inequality"),
    )
}

fn c6_heterodyne() -> Check {
    let cfg = OptimizerConfig::default();
    let grid = QuadratureGrid::default();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut min_slack = f64::INFINITY;
    for _ in 0..20 {
        let (r, s) = (random_density(&mut rng, 8), random_density(&mut rng, 8));
        let dm = measured_relative_entropy(&r, &s, &cfg).map_err(|e| e.to_string())?.value_bits;
        let h = husimi_kl(&r, &s, &grid).map_err(|e| e.to_string())?;
        min_slack = min_slack.min(dm - (h.value_bits - h.error_bits));
    }
    ensure(min_slack >= 0.0, format!("min D^M − (KL_Q − grid error) = {min_slack:.3e} over 20 pairs"))
}

fn c7_beam_splitter() -> Check {
    let d = 40;
    let mut worst = 0.0f64;
    for &lambda in &[0.3, 0.5, 0.8] {
        let bs = BeamSplitter::new(lambda, d).map_err(|e| e.to_string())?;
        for n in 0..=6usize {
            let mut ket = vec![C64::new(0.0, 0.0); d * d];
            ket[n * d] = C64::new(1.0, 0.0);
            let out = bs.apply(&ket);
            // expansion of (√λ a† − √(1−λ) b†)ⁿ/√n! on vacuum
            let mut expected = vec![C64::new(0.0, 0.0); d * d];
            for l in 0..=n {
                let binom: f64 = (0..l).map(|k| (n - k) as f64 / (k + 1) as f64).product();
                let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
                let amp = sign * binom.sqrt() * lambda.powf((n - l) as f64 / 2.0) * (1.0 - lambda).powf(l as f64 / 2.0);
                expected[(n - l) * d + l] = C64::new(amp, 0.0);
            }
            worst = worst.max(out.iter().zip(&expected).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max));
        }
    }
    let bs = BeamSplitter::new(0.5, d).map_err(|e| e.to_string())?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for &a in &[0.5, 1.0] {
        for &b in &[0.5, 1.0] {
            let va = coherent_amplitudes(C64::new(a, 0.0), d);
            let vb = coherent_amplitudes(C64::new(b, 0.0), d);
            let input: Vec<C64> = (0..d * d).map(|i| va[i / d] * vb[i % d]).collect();
            let out = bs.apply(&input);
            let wa = coherent_amplitudes(C64::new((a + b) * s, 0.0), d);
            let wb = coherent_amplitudes(C64::new((b - a) * s, 0.0), d);
            worst = worst.max((0..d * d).map(|i| (out[i] - wa[i / d] * wb[i % d]).norm()).fold(0.0, f64::max));
        }
    }
    let mut unitarity = 0.0f64;
    let mut leaks = 0usize;
    for &lambda in &[0.0, 0.25, 0.5, 0.75, 1.0] {
        let u = beam_splitter_unitary(lambda, d).map_err(|e| e.to_string())?;
        let bs = BeamSplitter::new(lambda, d).map_err(|e| e.to_string())?;
        for n in 0..2 * d - 1 {
            let blk = bs.block(n);
            let uu = blk.matmul(&blk.adjoint());
            unitarity = unitarity.max((&uu - &CMatrix::identity(blk.dim())).max_abs());
        }
        let m = u.entries();
        for i in 0..d * d {
            for j in 0..d * d {
                if i / d + i % d != j / d + j % d && m[(i, j)] != C64::new(0.0, 0.0) {
                    leaks += 1;
                }
            }
        }
    }
    ensure(
        worst <= 1e-10 && unitarity <= 1e-10 && leaks == 0,
        format!("amplitude error {worst:.2e}, unitarity defect {unitarity:.2e}, {leaks} entries across photon-number blocks"),
    )
}

fn c8_protocols() -> Check {
    let mut fock_worst = 0.0f64;
    let mut fock_worst_at = (0, 0.0, 0.0);
    for n in 2..=4usize {
        for &p in &[0.5, 1.0] {
            for &lambda in &[0.3, 0.5, 0.7] {
                let sim = fock_dilution(n, p, lambda).map_err(|e| e.to_string())?.success_probability;
                let dev = (sim - closed_form_ps(n, p, lambda)).abs();
                if dev > fock_worst {
                    fock_worst = dev;
                    fock_worst_at = (n, p, lambda);
                }
            }
        }
    }
    let mut limit_worst = 0.0f64;
    for n in 2..=4usize {
        for &p in &[0.5, 1.0] {
            let sim = fock_dilution(n, p, 0.999).map_err(|e| e.to_string())?.success_probability;
            limit_worst = limit_worst.max((sim - p).abs() / p);
        }
    }
    let mut cat_worst = 0.0f64;
    for &alpha in &[0.5, 1.0, 1.5, 2.0] {
        let a = cat_amplification(alpha, None).map_err(|e| e.to_string())?;
        cat_worst = cat_worst.max((a.lund.success_probability - lund_probability(alpha)).abs());
        cat_worst = cat_worst.max((a.ours.success_probability - ours_amplification_probability(alpha)).abs());
        cat_worst = cat_worst.max((ours_amplification_probability(alpha) - 0.5 * (alpha * alpha).tanh().powi(2)).abs());
        let dl = cat_dilution(alpha, None).map_err(|e| e.to_string())?;
        let t = alpha * alpha;
        cat_worst = cat_worst.max((dl.p_plus - t.cosh().powi(2) / (2.0 * t).cosh()).abs());
        cat_worst = cat_worst.max((dl.p_minus - t.sinh().powi(2) / (2.0 * t).cosh()).abs());
    }
    let (n, p, lambda) = fock_worst_at;
    ensure(
        fock_worst <= 1e-8 && limit_worst <= 0.01 && cat_worst <= 1e-8,
        format!(
            "Fock dilution vs printed P_s max {fock_worst:.2e} (at n={n}, p={p}, λ={lambda}); λ=0.999 relative gap to p {limit_worst:.2e}; cat protocols max {cat_worst:.2e}"
        ),
    )
}

fn c9_rate_tightness() -> Check {
    let r = noisy_fock_dilution_upper(100, 1.0).map_err(|e| e.to_string())?;
    let ratio = r.value.ok_or("undefined rate")? / 1.0;
    ensure((1.0..=1.01).contains(&ratio), format!("upper bound / p = {ratio:.6}"))
}

fn suite() -> Vec<Family> {
    let mut v: Vec<Family> = (0..=4).map(|n| Family::Fock { n }).collect();
    v.extend([
        Family::NoisyFock { n: 1, nu: 0.0, p: 0.5 },
        Family::NoisyFock { n: 2, nu: 0.1, p: 0.7 },
        Family::Thermal { nu: 0.5 },
        Family::Coherent { alpha: 1.0, alpha_im: 0.0 },
    ]);
    for alpha in [0.5, 1.0, 2.0] {
        v.push(Family::Cat { alpha, sign: Sign::Plus });
        v.push(Family::Cat { alpha, sign: Sign::Minus });
    }
    v.extend([0.25, 0.5, 1.0].map(|r| Family::Squeezed { r }));
    v
}

fn sound(s: &Sandwich) -> bool {
    s.lowers.iter().all(|lo| {
        s.uppers.iter().all(|up| lo.value - lo.folded_error() <= up.value + up.folded_error() + 1e-9)
    })
}

fn c10_sandwich() -> Check {
    let cfg = OptimizerConfig::default();
    let mut bad = Vec::new();
    for f in suite() {
        // d = 50 unless the family needs more levels to be representable
        let need = StateSpec::new(f, 1).required_cutoff(DEFAULT_DEFICIT_TOL).ok_or("no feasible cutoff")?;
        let s = bound_sandwich(&StateSpec::new(f, need.max(50)), &cfg).map_err(|e| format!("{f:?}: {e}"))?;
        if !sound(&s) {
            bad.push(format!("{f:?}"));
        }
    }
    let cat = bound_sandwich(&StateSpec::new(Family::Cat { alpha: 2.5, sign: Sign::Plus }, 50), &cfg)
        .map_err(|e| e.to_string())?;
    let (lo, up) = (cat.lower.value, cat.upper.value);
    ensure(
        bad.is_empty() && lo >= 0.5 && up <= 1.5 && up - lo < 0.5,
        format!("{} suite states unsound {bad:?}; cat(2.5,+) interval [{lo:.6}, {up:.6}]", bad.len()),
    )
}

fn c11_basel() -> Check {
    let values: Vec<f64> = [10u64, 100, 1_000, 10_000, 100_000, 200_000].iter().map(|&n| basel_divergence_bound(n).value_bits).collect();
    let monotone = values.windows(2).all(|w| w[1] >= w[0]);
    let last = *values.last().unwrap();
    ensure(monotone && last > 1.0, format!("bounds {values:.4?}; at N = 2·10⁵ {last:.4} bits"))
}

fn finite_energy_suite() -> Vec<Family> {
    suite()
}

fn c12_truncation() -> Check {
    let cert = truncation_certificate(0.1, 1.0, 1).map_err(|e| e.to_string())?;
    let cfg = OptimizerConfig::default();
    let mut worst = (0.0f64, String::new());
    for f in finite_energy_suite() {
        let base = StateSpec::new(f, 1);
        let d = base.required_cutoff(1e-10).ok_or("no feasible cutoff")?.max(20);
        let a = bound_sandwich(&base.with_cutoff(d), &cfg).map_err(|e| format!("{f:?}: {e}"))?;
        let b = bound_sandwich(&base.with_cutoff(d + 10), &cfg).map_err(|e| format!("{f:?}: {e}"))?;
        let change = (a.lower.value - b.lower.value).abs().max((a.upper.value - b.upper.value).abs());
        if change > worst.0 {
            worst = (change, format!("{f:?} at d={d}"));
        }
    }
    ensure(
        (cert - 1.063457).abs() <= 1e-6 && worst.0 < 1e-3,
        format!("certificate {cert:.7} bits; max endpoint change d→d+10 {:.2e} ({})", worst.0, worst.1),
    )
}

/// Number, name, time budget and check.
type Criterion = (u32, &'static str, Duration, fn() -> Check);

fn main() {
    let criteria: [Criterion; 12] = [
        (1, "Fock closed form", Duration::from_secs(1), c1_fock_closed_form),
        (2, "noisy Fock n=1 curve", Duration::from_secs(5), c2_noisy_fock_curve),
        (3, "generic Γ optimizer on |1⟩", Duration::from_secs(30), c3_generic_gamma),
        (4, "vacuum Wehrl entropy", Duration::from_secs(1), c4_vacuum_wehrl),
        (5, "measured relative entropy properties", Duration::from_secs(60), c5_measured_entropy),
        (6, "heterodyne inequality", Duration::from_secs(60), c6_heterodyne),
        (7, "beam splitter", Duration::from_secs(5), c7_beam_splitter),
        (8, "protocols vs closed forms", Duration::from_secs(60), c8_protocols),
        (9, "rate-bound tightness", Duration::from_secs(1), c9_rate_tightness),
        (10, "sandwich soundness", Duration::from_secs(600), c10_sandwich),
        (11, "Basel divergence", Duration::from_secs(5), c11_basel),
        (12, "truncation certificate", Duration::from_secs(300), c12_truncation),
    ];
    let mut failed = 0;
    for (id, name, budget, check) in criteria {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let (ok, detail) = match result {
            Ok(m) => (elapsed < budget, m),
            Err(m) => (false, m),
        };
        let over = if elapsed >= budget { " [over time budget]" } else { "" };
        println!(
            "criterion {id:>2} {}: {name}: {detail} ({:.2} s of {} s){over}",
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
        failed += usize::from(!ok);
    }
    println!("{} of 12 criteria passed", 12 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
