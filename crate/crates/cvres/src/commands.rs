//! The four subcommands. Each returns its rendered output and exit code.

use cvres_core::entropies::QuadratureGrid;
use cvres_core::fock_core::DensityOperator;
use cvres_core::nonclassicality::{
    bound_sandwich, classical_ansatz_upper_bound, energy_upper_bound, fock_diagonal_ncm, gamma_lower_bound, gaussian_bounds, husimi_lower_bound,
    truncation_certificate, wehrl_upper_bound, AnsatzFamily, MonotoneBound, Sandwich, CONSISTENCY_TOL,
    GENERIC_GAMMA_MAX_DIM,
};
use cvres_core::optim::OptimizerConfig;
use cvres_core::rates_protocols::{
    cat_amplification, cat_dilution, closed_form_ps, closed_form_ps_derived, fock_dilution, lund_probability,
    ours_amplification_probability, protocol_figure_data, ProtocolOutcome, ProtocolTask,
};
use cvres_core::states::{gaussian_descriptor, Family, Sign, StateSpec};
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cli::{CertifyArgs, FigureArgs, Format, GlobalArgs, MonotoneArgs, ProtocolArgs};
use crate::error::CliError;
use crate::format::{fmt_g9, Table};
use crate::io::{auto_cutoff, parse_grid, StateInput};

/// Rendered command output.
#[derive(Clone, Debug, PartialEq)]
pub struct Output {
    pub text: String,
    pub exit_code: i32,
}

impl Output {
    fn new(text: String, converged: bool) -> Self {
        Self { text, exit_code: if converged { 0 } else { 2 } }
    }
}

pub const FIGURE_NAMES: [&str; 5] = ["noisy-fock-fixed-n", "noisy-fock-fixed-nu", "cat", "squeezed", "protocols"];

fn unit_scale(g: &GlobalArgs) -> f64 {
    if g.nats {
        core::f64::consts::LN_2
    } else {
        1.0
    }
}

fn unit_suffix(g: &GlobalArgs) -> &'static str {
    if g.nats {
        "nats"
    } else {
        "bits"
    }
}

fn rescale(mut b: MonotoneBound, s: f64) -> MonotoneBound {
    b.value *= s;
    b.certificate.truncation_correction_bits *= s;
    b.certificate.inner_sup_grid_error *= s;
    b
}

fn to_json<T: Serialize>(v: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| CliError::Numerical(format!("serialization: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// JSON report of `monotone`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonotoneReport {
    pub state: String,
    pub units: String,
    #[serde(with = "cvres_core::serde_ext::extended_f64")]
    pub lower: f64,
    #[serde(with = "cvres_core::serde_ext::extended_f64")]
    pub upper: f64,
    pub bounds: Vec<MonotoneBound>,
    pub converged: bool,
}

/// Sandwich for a raw density matrix: only bounds that need no family
/// information.
pub fn raw_sandwich(rho: &DensityOperator, cfg: &OptimizerConfig) -> Result<Sandwich, CliError> {
    let mut lowers = Vec::new();
    let mut uppers = Vec::new();
    let rn = rho.normalized();
    uppers.push(energy_upper_bound(rn.energy(), rho.modes())?);
    if rho.modes() == 1 {
        if rho.is_fock_diagonal() {
            let (lo, up) = fock_diagonal_ncm(rho, cfg)?;
            lowers.push(lo);
            uppers.push(up);
        } else {
            lowers.push(husimi_lower_bound(rho)?);
            if rho.dim() <= GENERIC_GAMMA_MAX_DIM {
                lowers.push(gamma_lower_bound(rho, cfg)?);
            }
        }
        uppers.push(wehrl_upper_bound(rho, &QuadratureGrid::for_energy(rn.energy()))?);
    }
    Ok(Sandwich::from_bounds(lowers, uppers, CONSISTENCY_TOL + cfg.tol)?)
}

fn sandwich_for(input: &StateInput, cfg: &OptimizerConfig) -> Result<Sandwich, CliError> {
    match input {
        StateInput::Spec(spec) => Ok(bound_sandwich(spec, cfg)?),
        StateInput::Raw(rho) => raw_sandwich(rho, cfg),
    }
}

pub fn monotone(a: &MonotoneArgs, g: &GlobalArgs, cfg: &OptimizerConfig) -> Result<Output, CliError> {
    let input = a.state.parse()?.ok_or_else(|| CliError::usage("monotone needs --state or --state-file"))?;
    let mut which = Vec::new();
    for w in a.which.split(',').map(str::trim).filter(|w| !w.is_empty()) {
        match w {
            "ncm-lower" | "nc-upper" | "all" => which.push(w),
            other => return Err(CliError::usage(format!("unknown bound {other:?}; expected ncm-lower, nc-upper or all"))),
        }
    }
    let s = sandwich_for(&input, cfg)?;
    let mut bounds = Vec::new();
    if which.contains(&"all") {
        bounds.extend(s.lowers.iter().cloned());
        bounds.extend(s.uppers.iter().cloned());
    } else {
        if which.contains(&"ncm-lower") {
            bounds.push(s.lower.clone());
        }
        if which.contains(&"nc-upper") {
            bounds.push(s.upper.clone());
        }
    }
    let scale = unit_scale(g);
    let converged = bounds.iter().all(|b| b.certificate.converged);
    let report = MonotoneReport {
        state: input.describe(),
        units: unit_suffix(g).into(),
        lower: s.lower.value * scale,
        upper: s.upper.value * scale,
        bounds: bounds.into_iter().map(|b| rescale(b, scale)).collect(),
        converged,
    };
    let text = match g.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&report)?,
        Format::Csv => {
            let u = unit_suffix(g);
            let value = format!("value_{u}");
            let corr = format!("truncation_correction_{u}");
            let mut t = Table::new(&[
                "quantity",
                "direction",
                &value,
                "truncation_epsilon",
                &corr,
                "inner_sup_radius",
                "inner_sup_grid_error",
                "converged",
            ]);
            for b in &report.bounds {
                let q = serde_json::to_value(b.quantity).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
                let d = serde_json::to_value(b.direction).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
                let c = &b.certificate;
                t.push(vec![
                    q,
                    d,
                    fmt_g9(b.value),
                    fmt_g9(c.truncation_epsilon),
                    fmt_g9(c.truncation_correction_bits),
                    fmt_g9(c.inner_sup_radius),
                    fmt_g9(c.inner_sup_grid_error),
                    c.converged.to_string(),
                ]);
            }
            t.to_csv()
        }
    };
    Ok(Output::new(text, converged))
}

fn spec_with_cutoff(family: Family, cutoff: Option<usize>) -> Result<StateSpec, CliError> {
    let spec = StateSpec::new(family, 1);
    let d = match cutoff {
        Some(d) => d,
        None => auto_cutoff(&spec)?,
    };
    Ok(spec.with_cutoff(d))
}

fn parse_signs(text: &str) -> Result<Vec<Sign>, CliError> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| match s {
            "+" | "plus" | "even" => Ok(Sign::Plus),
            "-" | "minus" | "odd" => Ok(Sign::Minus),
            other => Err(CliError::usage(format!("sign must be + or -, got {other:?}"))),
        })
        .collect()
}

fn parse_tasks(text: &str) -> Result<Vec<ProtocolTask>, CliError> {
    match text {
        "amplify" => Ok(vec![ProtocolTask::Amplify]),
        "dilute" => Ok(vec![ProtocolTask::Dilute]),
        "both" => Ok(vec![ProtocolTask::Amplify, ProtocolTask::Dilute]),
        other => Err(CliError::usage(format!("task must be amplify, dilute or both, got {other:?}"))),
    }
}

fn parse_counts(text: &str) -> Result<Vec<usize>, CliError> {
    parse_grid(text)?
        .into_iter()
        .map(|x| {
            if x >= 0.0 && x.fract() == 0.0 {
                Ok(x as usize)
            } else {
                Err(CliError::usage(format!("photon numbers must be nonnegative integers, got {x}")))
            }
        })
        .collect()
}

type Row = (Vec<String>, bool);

fn noisy_fock_row(n: usize, nu: f64, p: f64, cutoff: Option<usize>, cfg: &OptimizerConfig, s: f64) -> Result<Row, CliError> {
    let spec = spec_with_cutoff(Family::NoisyFock { n, nu, p }, cutoff)?;
    let spec = spec.with_cutoff(spec.cutoff.max(n + 1));
    let rho = cvres_core::states::make_state(&spec)?;
    let (lo, up) = fock_diagonal_ncm(&rho, cfg)?;
    let cells = vec![
        fmt_g9(p),
        fmt_g9(nu),
        n.to_string(),
        fmt_g9(lo.value * s),
        fmt_g9(up.value * s),
        fmt_g9(up.certificate.truncation_correction_bits * s),
    ];
    Ok((cells, lo.certificate.converged && up.certificate.converged))
}

pub fn figure(a: &FigureArgs, g: &GlobalArgs, cfg: &OptimizerConfig) -> Result<Output, CliError> {
    let s = unit_scale(g);
    let u = unit_suffix(g);
    let h = |base: &str| base.replace("bits", u);
    let (header, rows): (Vec<String>, Vec<Result<Row, CliError>>) = match a.name.as_str() {
        "noisy-fock-fixed-n" | "noisy-fock-fixed-nu" => {
            let ps = parse_grid(&a.p_grid)?;
            let points: Vec<(usize, f64, f64)> = if a.name == "noisy-fock-fixed-n" {
                let nus = parse_grid(&a.nu_grid)?;
                nus.iter().flat_map(|&nu| ps.iter().map(move |&p| (a.n, nu, p))).collect()
            } else {
                let ns = parse_counts(&a.n_grid)?;
                ns.iter().flat_map(|&n| ps.iter().map(move |&p| (n, a.nu, p))).collect()
            };
            let header = ["p", "nu", "n", "lower_bits", "upper_bits", "cert_bits"].map(h).to_vec();
            (header, points.par_iter().map(|&(n, nu, p)| noisy_fock_row(n, nu, p, a.cutoff, cfg, s)).collect())
        }
        "cat" => {
            let alphas = parse_grid(&a.alpha_grid)?;
            let signs = parse_signs(&a.signs)?;
            let points: Vec<(f64, Sign)> = signs.iter().flat_map(|&sg| alphas.iter().map(move |&al| (al, sg))).collect();
            let header = ["alpha", "sign", "lower_bits", "upper_bits"].map(h).to_vec();
            let rows = points
                .par_iter()
                .map(|&(alpha, sign)| {
                    let spec = spec_with_cutoff(Family::Cat { alpha, sign }, a.cutoff)?;
                    let sw = bound_sandwich(&spec, cfg)?;
                    let cells = vec![fmt_g9(alpha), sign.symbol().to_string(), fmt_g9(sw.lower.value * s), fmt_g9(sw.upper.value * s)];
                    Ok((cells, sw.converged()))
                })
                .collect();
            (header, rows)
        }
        "squeezed" => {
            let rs = parse_grid(&a.r_grid)?;
            let header =
                ["r", "lower_bits", "upper_thermal_bits", "upper_sq_thermal_bits", "upper_energy_bits"].map(h).to_vec();
            let rows = rs
                .par_iter()
                .map(|&r| {
                    let spec = spec_with_cutoff(Family::Squeezed { r }, a.cutoff)?;
                    // the figure traces the covariance lower bound; `monotone` reports the full sandwich
                    let (lower, _) = gaussian_bounds(&gaussian_descriptor(&spec)?, 0.0)?;
                    let thermal = classical_ansatz_upper_bound(&spec, &AnsatzFamily::Thermal { nus: vec![] })?.bound.value;
                    let sq = classical_ansatz_upper_bound(&spec, &AnsatzFamily::SqueezedThermal)?.bound.value;
                    let energy = energy_upper_bound(spec.ideal_energy(), 1)?.value;
                    let cells = vec![fmt_g9(r), fmt_g9(lower.value * s), fmt_g9(thermal * s), fmt_g9(sq * s), fmt_g9(energy * s)];
                    Ok((cells, true))
                })
                .collect();
            (header, rows)
        }
        "protocols" => {
            let alphas = parse_grid(&a.alpha_grid)?;
            let tasks = parse_tasks(&a.task)?;
            let points: Vec<(ProtocolTask, f64)> = tasks.iter().flat_map(|&t| alphas.iter().map(move |&al| (t, al))).collect();
            let header = ["alpha", "task", "lower_rate", "upper_rate"].map(String::from).to_vec();
            let rows = points
                .par_iter()
                .map(|&(task, alpha)| {
                    let row = protocol_figure_data(task, &[alpha], cfg)?.remove(0);
                    let upper = row.upper_rate.map(fmt_g9).unwrap_or_default();
                    let converged = row.upper.denominator.certificate.converged;
                    Ok((vec![fmt_g9(alpha), task.name().to_string(), fmt_g9(row.lower_rate), upper], converged))
                })
                .collect();
            (header, rows)
        }
        other => {
            return Err(CliError::usage(format!("unknown figure {other:?}; valid names: {}", FIGURE_NAMES.join(", "))));
        }
    };
    let rows: Vec<Row> = rows.into_iter().collect::<Result<_, _>>()?;
    let converged = rows.iter().all(|r| r.1);
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut table = Table::new(&header_refs);
    for (cells, _) in rows {
        table.push(cells);
    }
    let text = match g.format.unwrap_or(Format::Csv) {
        Format::Csv => table.to_csv(),
        Format::Json => {
            let objs: Vec<serde_json::Map<String, serde_json::Value>> = table
                .rows
                .iter()
                .map(|r| table.header.iter().cloned().zip(r.iter().map(|c| json_cell(c))).collect())
                .collect();
            to_json(&objs)?
        }
    };
    Ok(Output::new(text, converged))
}

/// Numeric cells become JSON numbers, empty cells null.
fn json_cell(c: &str) -> serde_json::Value {
    if c.is_empty() {
        return serde_json::Value::Null;
    }
    match c.parse::<f64>().ok().and_then(serde_json::Number::from_f64) {
        Some(x) => serde_json::Value::Number(x),
        None => serde_json::Value::String(c.to_string()),
    }
}

/// Seeded Bernoulli sampling of a success probability.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarlo {
    pub shots: u64,
    pub seed: u64,
    pub successes: u64,
    pub frequency: f64,
}

pub fn monte_carlo(p: f64, shots: u64, seed: u64) -> MonteCarlo {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let successes = (0..shots).filter(|_| rng.gen::<f64>() < p).count() as u64;
    MonteCarlo { shots, seed, successes, frequency: if shots == 0 { 0.0 } else { successes as f64 / shots as f64 } }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolReport {
    pub protocol: String,
    pub outcomes: Vec<NamedOutcome>,
    /// Closed-form probabilities for comparison, keyed by name.
    pub closed_forms: Vec<(String, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedOutcome {
    pub name: String,
    pub outcome: ProtocolOutcome,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub monte_carlo: Option<MonteCarlo>,
}

pub fn protocol(a: &ProtocolArgs, g: &GlobalArgs) -> Result<Output, CliError> {
    let need_f = |v: Option<f64>, k: &str| v.ok_or_else(|| CliError::usage(format!("{} needs --{k}", a.kind)));
    let named = |name: &str, o: ProtocolOutcome| {
        let mc = a.monte_carlo.map(|shots| monte_carlo(o.success_probability, shots, a.seed));
        NamedOutcome { name: name.into(), outcome: o, monte_carlo: mc }
    };
    let report = match a.kind.as_str() {
        "fock-dilution" => {
            let n = a.n.ok_or_else(|| CliError::usage("fock-dilution needs --n"))?;
            let p = need_f(a.p, "p")?;
            let lambda = need_f(a.lambda, "lambda")?;
            let o = fock_dilution(n, p, lambda)?;
            ProtocolReport {
                protocol: a.kind.clone(),
                outcomes: vec![named("loop", o)],
                closed_forms: vec![
                    ("printed".into(), closed_form_ps(n, p, lambda)),
                    ("geometric_series".into(), closed_form_ps_derived(n, p, lambda)),
                ],
            }
        }
        "cat-amplification" => {
            let alpha = need_f(a.alpha, "alpha")?;
            let o = cat_amplification(alpha, a.cutoff)?;
            ProtocolReport {
                protocol: a.kind.clone(),
                outcomes: vec![named("lund", o.lund), named("ours", o.ours)],
                closed_forms: vec![("lund".into(), lund_probability(alpha)), ("ours".into(), ours_amplification_probability(alpha))],
            }
        }
        "cat-dilution" => {
            let alpha = need_f(a.alpha, "alpha")?;
            let o = cat_dilution(alpha, a.cutoff)?;
            let t = alpha * alpha;
            ProtocolReport {
                protocol: a.kind.clone(),
                outcomes: vec![named("minus_branch", o.outcome)],
                closed_forms: vec![
                    ("p_plus".into(), t.cosh().powi(2) / (2.0 * t).cosh()),
                    ("p_minus".into(), t.sinh().powi(2) / (2.0 * t).cosh()),
                    ("simulated_p_plus".into(), o.p_plus),
                ],
            }
        }
        other => {
            return Err(CliError::usage(format!(
                "unknown protocol {other:?}; valid: fock-dilution, cat-amplification, cat-dilution"
            )))
        }
    };
    let text = match g.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&report)?,
        Format::Csv => {
            let mut t = Table::new(&["name", "success_probability", "rate_lower_bound", "output_fidelity_check", "cutoff"]);
            for o in &report.outcomes {
                let x = &o.outcome;
                t.push(vec![
                    o.name.clone(),
                    fmt_g9(x.success_probability),
                    fmt_g9(x.rate_lower_bound),
                    fmt_g9(x.output_fidelity_check),
                    x.cutoff.to_string(),
                ]);
            }
            t.to_csv()
        }
    };
    Ok(Output::new(text, true))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifyReport {
    pub epsilon: f64,
    pub energy: f64,
    pub modes: usize,
    pub units: String,
    pub certificate: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub state: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub interval: Option<(MonotoneBound, MonotoneBound)>,
}

pub fn certify(a: &CertifyArgs, g: &GlobalArgs, cfg: &OptimizerConfig) -> Result<Output, CliError> {
    let s = unit_scale(g);
    let value = truncation_certificate(a.epsilon, a.energy, a.modes)?;
    let input = a.state.parse()?;
    let (state, interval, converged) = match &input {
        Some(inp) => {
            let sw = sandwich_for(inp, cfg)?;
            let c = sw.converged();
            (Some(inp.describe()), Some((rescale(sw.lower, s), rescale(sw.upper, s))), c)
        }
        None => (None, None, true),
    };
    let report = CertifyReport {
        epsilon: a.epsilon,
        energy: a.energy,
        modes: a.modes,
        units: unit_suffix(g).into(),
        certificate: value * s,
        state,
        interval,
    };
    let text = match g.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&report)?,
        Format::Csv => {
            let u = unit_suffix(g);
            let cols = [format!("certificate_{u}"), format!("lower_{u}"), format!("upper_{u}")];
            let mut t = Table::new(&["epsilon", "energy", "modes", &cols[0], &cols[1], &cols[2]]);
            let (lo, up) = match &report.interval {
                Some((l, u)) => (fmt_g9(l.value), fmt_g9(u.value)),
                None => (String::new(), String::new()),
            };
            t.push(vec![fmt_g9(a.epsilon), fmt_g9(a.energy), a.modes.to_string(), fmt_g9(report.certificate), lo, up]);
            t.to_csv()
        }
    };
    Ok(Output::new(text, converged))
}
