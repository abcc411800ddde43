//! Rate tables for the cat-state conversions: protocol lower bounds against
//! monotone-ratio upper bounds.

use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::protocols::{cat_amplification, cat_dilution};
use super::{rate_upper_bound, RateBound};
use crate::error::usage;
use crate::nonclassicality::{
    cat_lower_bound, classical_ansatz_upper_bound, energy_upper_bound, AnsatzFamily, Certificate, MonotoneBound, Quantity,
};
use crate::optim::OptimizerConfig;
use crate::states::{Family, Sign, StateSpec};
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProtocolTask {
    /// `ψ⁺_α → ψ⁺_{√2α}`.
    Amplify,
    /// `ψ⁺_{√2α} → ψ⁺_α ⊗ ψ⁻_α`.
    Dilute,
}

impl ProtocolTask {
    pub fn name(self) -> &'static str {
        match self {
            Self::Amplify => "amplify",
            Self::Dilute => "dilute",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolRow {
    pub alpha: f64,
    pub task: ProtocolTask,
    pub lower_rate: f64,
    /// `None` when the ratio is undefined.
    #[serde(with = "crate::serde_ext::extended_opt_f64")]
    pub upper_rate: Option<f64>,
    pub upper: RateBound,
}

/// `[lower on N^M, upper on N]` for `ψ^±_α` from the exact-span programs
/// (no truncation involved).
pub fn cat_interval(alpha: f64, sign: Sign, cfg: &OptimizerConfig) -> Result<(MonotoneBound, MonotoneBound)> {
    let lower = cat_lower_bound(alpha, sign, cfg)?;
    let spec = StateSpec::new(Family::Cat { alpha, sign }, 1);
    let fam = AnsatzFamily::CoherentMixture { points: alloc::vec![(alpha, 0.0), (-alpha, 0.0), (0.0, 0.0)] };
    let mixture = classical_ansatz_upper_bound(&spec, &fam)?.bound;
    let energy = energy_upper_bound(spec.ideal_energy(), 1)?;
    let upper = if energy.value < mixture.value { energy } else { mixture };
    Ok((lower, upper))
}

/// One row per `α`, in input order.
pub fn protocol_figure_data(task: ProtocolTask, alphas: &[f64], cfg: &OptimizerConfig) -> Result<Vec<ProtocolRow>> {
    if alphas.is_empty() {
        return Err(usage("the alpha grid is empty"));
    }
    alphas.iter().map(|&alpha| protocol_row(task, alpha, cfg)).collect()
}

pub(crate) fn protocol_row(task: ProtocolTask, alpha: f64, cfg: &OptimizerConfig) -> Result<ProtocolRow> {
    let big = core::f64::consts::SQRT_2 * alpha;
    let (lower_rate, upper) = match task {
        ProtocolTask::Amplify => {
            let p = cat_amplification(alpha, None)?;
            let (_, src_up) = cat_interval(alpha, Sign::Plus, cfg)?;
            let (tgt_lo, _) = cat_interval(big, Sign::Plus, cfg)?;
            (p.ours.rate_lower_bound.max(p.lund.rate_lower_bound), rate_upper_bound(src_up, tgt_lo))
        }
        ProtocolTask::Dilute => {
            let p = cat_dilution(alpha, None)?;
            let (_, src_up) = cat_interval(big, Sign::Plus, cfg)?;
            let (lp, _) = cat_interval(alpha, Sign::Plus, cfg)?;
            let (lm, _) = cat_interval(alpha, Sign::Minus, cfg)?;
            // superadditivity: lower bounds of the two factors add
            let cert = Certificate {
                inner_sup_grid_error: lp.certificate.inner_sup_grid_error + lm.certificate.inner_sup_grid_error,
                converged: lp.certificate.converged && lm.certificate.converged,
                ..Certificate::closed_form(format!("sum of factor bounds {} + {}", lp.value, lm.value))
            };
            let den = MonotoneBound::lower(Quantity::Ncm, lp.value + lm.value, cert);
            (p.outcome.rate_lower_bound, rate_upper_bound(src_up, den))
        }
    };
    Ok(ProtocolRow { alpha, task, lower_rate, upper_rate: upper.value, upper })
}
