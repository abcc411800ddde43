//! State inputs: family specs as JSON or shorthand, and raw density matrices.

use std::path::Path;

use cvres_core::fock_core::{CMatrix, DensityOperator, TruncatedOperator};
use cvres_core::states::{Family, Sign, StateSpec};
use cvres_core::C64;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Deficit used when a cutoff is chosen automatically.
pub const AUTO_DEFICIT_TOL: f64 = 1e-10;
/// Smallest automatically chosen cutoff.
pub const AUTO_MIN_CUTOFF: usize = 20;

/// Row-major density matrix in multi-index order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawMatrix {
    pub modes: usize,
    pub cutoff: usize,
    pub entries_re: Vec<f64>,
    pub entries_im: Vec<f64>,
}

impl RawMatrix {
    pub fn into_state(self) -> Result<DensityOperator, CliError> {
        let dim = self.cutoff.checked_pow(self.modes as u32).ok_or_else(|| CliError::usage("dimension overflows"))?;
        if self.entries_re.len() != dim * dim || self.entries_im.len() != dim * dim {
            return Err(CliError::usage(format!(
                "entries_re and entries_im need {} values each for modes={} cutoff={}",
                dim * dim,
                self.modes,
                self.cutoff
            )));
        }
        let data = self.entries_re.iter().zip(&self.entries_im).map(|(&re, &im)| C64::new(re, im)).collect();
        let m = CMatrix::from_row_major(dim, data).ok_or_else(|| CliError::usage("matrix shape mismatch"))?;
        let op = TruncatedOperator::new(self.modes, self.cutoff, m, true)?;
        Ok(DensityOperator::new(op)?)
    }

    pub fn from_state(rho: &DensityOperator) -> Self {
        let m = rho.matrix();
        Self {
            modes: rho.modes(),
            cutoff: rho.cutoff(),
            entries_re: m.as_slice().iter().map(|z| z.re).collect(),
            entries_im: m.as_slice().iter().map(|z| z.im).collect(),
        }
    }
}

/// A parsed `--state` argument.
#[derive(Clone, Debug)]
pub enum StateInput {
    Spec(StateSpec),
    Raw(DensityOperator),
}

impl StateInput {
    pub fn describe(&self) -> String {
        match self {
            Self::Spec(s) => serde_json::to_string(s).unwrap_or_default(),
            Self::Raw(r) => format!("raw matrix, modes={}, cutoff={}", r.modes(), r.cutoff()),
        }
    }
}

/// JSON spec, JSON raw matrix, or shorthand such as `cat alpha=2 sign=-`.
pub fn parse_state(text: &str) -> Result<StateInput, CliError> {
    let t = text.trim();
    if t.starts_with('{') {
        let value: serde_json::Value = serde_json::from_str(t).map_err(|e| CliError::usage(format!("state JSON: {e}")))?;
        if value.get("entries_re").is_some() {
            let raw: RawMatrix = serde_json::from_value(value).map_err(|e| CliError::usage(format!("raw matrix: {e}")))?;
            return Ok(StateInput::Raw(raw.into_state()?));
        }
        let spec: StateSpec = serde_json::from_value(value).map_err(|e| CliError::usage(format!("state spec: {e}")))?;
        spec.validate()?;
        return Ok(StateInput::Spec(spec));
    }
    Ok(StateInput::Spec(parse_shorthand(t)?))
}

/// Reads a state from a JSON file.
pub fn read_state_file(path: &Path) -> Result<StateInput, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    parse_state(&text)
}

fn parse_num(key: &str, v: &str) -> Result<f64, CliError> {
    v.parse::<f64>().map_err(|_| CliError::usage(format!("{key} expects a number, got {v:?}")))
}

fn parse_int(key: &str, v: &str) -> Result<usize, CliError> {
    v.parse::<usize>().map_err(|_| CliError::usage(format!("{key} expects a nonnegative integer, got {v:?}")))
}

/// `family key=value ...`; keys may be separated by spaces or commas and
/// `cutoff` defaults to the smallest cutoff with deficit at most
/// [`AUTO_DEFICIT_TOL`].
pub fn parse_shorthand(text: &str) -> Result<StateSpec, CliError> {
    let mut tokens = text.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty());
    let name = tokens.next().ok_or_else(|| CliError::usage("empty state"))?.to_lowercase().replace('-', "_");
    let mut kv = std::collections::BTreeMap::new();
    for tok in tokens {
        let (k, v) = tok.split_once('=').ok_or_else(|| CliError::usage(format!("expected key=value, got {tok:?}")))?;
        let k = match k {
            "α" => "alpha",
            "ν" => "nu",
            other => other,
        };
        kv.insert(k.to_string(), v.to_string());
    }
    let mut take = |k: &str| kv.remove(k);
    let need = |v: Option<String>, k: &str| v.ok_or_else(|| CliError::usage(format!("state {name} needs {k}")));
    let family = match name.as_str() {
        "fock" => Family::Fock { n: parse_int("n", &need(take("n"), "n")?)? },
        "coherent" => Family::Coherent {
            alpha: parse_num("alpha", &need(take("alpha"), "alpha")?)?,
            alpha_im: take("alpha_im").map(|v| parse_num("alpha_im", &v)).transpose()?.unwrap_or(0.0),
        },
        "thermal" => Family::Thermal { nu: parse_num("nu", &need(take("nu"), "nu")?)? },
        "noisy_fock" => Family::NoisyFock {
            n: parse_int("n", &need(take("n"), "n")?)?,
            nu: take("nu").map(|v| parse_num("nu", &v)).transpose()?.unwrap_or(0.0),
            p: parse_num("p", &need(take("p"), "p")?)?,
        },
        "cat" => Family::Cat {
            alpha: parse_num("alpha", &need(take("alpha"), "alpha")?)?,
            sign: match take("sign").as_deref() {
                None | Some("+") | Some("plus") | Some("even") => Sign::Plus,
                Some("-") | Some("minus") | Some("odd") => Sign::Minus,
                Some(s) => return Err(CliError::usage(format!("sign must be + or -, got {s:?}"))),
            },
        },
        "squeezed" => Family::Squeezed { r: parse_num("r", &need(take("r"), "r")?)? },
        "basel" => Family::Basel { n_max: parse_int("n_max", &need(take("n_max"), "n_max")?)? },
        other => {
            return Err(CliError::usage(format!(
                "unknown family {other:?}; expected fock, coherent, thermal, noisy_fock, cat, squeezed or basel"
            )))
        }
    };
    let cutoff = take("cutoff");
    let modes = take("modes").map(|v| parse_int("modes", &v)).transpose()?.unwrap_or(1);
    if let Some(k) = kv.keys().next() {
        return Err(CliError::usage(format!("unknown parameter {k:?} for {name}")));
    }
    let mut spec = StateSpec { family, cutoff: 1, modes };
    spec.cutoff = match cutoff {
        Some(v) if v != "auto" => parse_int("cutoff", &v)?,
        _ => auto_cutoff(&spec)?,
    };
    spec.validate()?;
    Ok(spec)
}

/// Smallest cutoff meeting [`AUTO_DEFICIT_TOL`], at least [`AUTO_MIN_CUTOFF`].
pub fn auto_cutoff(spec: &StateSpec) -> Result<usize, CliError> {
    if let Family::Basel { n_max } = spec.family {
        // only the exact witness is used for this family
        return Ok(1usize.checked_shl(n_max.min(20) as u32).unwrap_or(1) + 1);
    }
    spec.required_cutoff(AUTO_DEFICIT_TOL)
        .map(|d| d.max(AUTO_MIN_CUTOFF))
        .ok_or_else(|| CliError::usage("no feasible cutoff for this state; pass cutoff explicitly"))
}

/// Parses `a,b,c` or `start:stop:step` (inclusive within rounding).
pub fn parse_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let t = text.trim();
    let out: Vec<f64> = if let [a, b, s] = t.split(':').collect::<Vec<_>>()[..] {
        let (a, b, s) = (parse_num("grid start", a)?, parse_num("grid stop", b)?, parse_num("grid step", s)?);
        if s.is_nan() || s <= 0.0 || b < a {
            return Err(CliError::usage("grid needs start <= stop and a positive step"));
        }
        let n = ((b - a) / s + 1e-9).floor() as usize;
        (0..=n).map(|i| a + i as f64 * s).collect()
    } else {
        t.split(',').filter(|s| !s.trim().is_empty()).map(|s| parse_num("grid value", s.trim())).collect::<Result<_, _>>()?
    };
    if out.is_empty() {
        return Err(CliError::usage("grid is empty"));
    }
    Ok(out)
}
