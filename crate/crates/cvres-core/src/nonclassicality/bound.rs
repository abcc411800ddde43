use alloc::string::String;

use serde::{Deserialize, Serialize};

/// Which monotone a bound refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Quantity {
    /// Measured relative entropy of nonclassicality.
    #[serde(rename = "NCM")]
    Ncm,
    /// Relative entropy of nonclassicality.
    #[serde(rename = "NC")]
    Nc,
    /// The regularized measured monotone, sandwiched between the two above.
    #[serde(rename = "NCM_regularized_interval")]
    NcmRegularizedInterval,
    /// Relative entropy to the Gibbs state, the thermodynamic monotone.
    #[serde(rename = "thermal_divergence")]
    ThermalDivergence,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Lower,
    Upper,
}

/// How a bound was obtained and which error terms it already contains.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    /// Trace distance between the ideal state and its normalized truncation.
    pub truncation_epsilon: f64,
    /// Continuity correction already folded into `value`.
    pub truncation_correction_bits: f64,
    /// `T` of the certified coherent search `|α|² <= T` (0 when unused).
    pub inner_sup_radius: f64,
    /// Gap between the certified supremum and the best attained value,
    /// relative to the latter, in bits (already folded into `value`).
    pub inner_sup_grid_error: f64,
    pub ansatz_description: String,
    pub converged: bool,
}

impl Certificate {
    pub fn closed_form(description: impl Into<String>) -> Self {
        Self {
            truncation_epsilon: 0.0,
            truncation_correction_bits: 0.0,
            inner_sup_radius: 0.0,
            inner_sup_grid_error: 0.0,
            ansatz_description: description.into(),
            converged: true,
        }
    }
}

/// A certified one-sided bound in bits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonotoneBound {
    pub quantity: Quantity,
    pub direction: Direction,
    #[serde(with = "crate::serde_ext::extended_f64")]
    pub value: f64,
    pub certificate: Certificate,
}

impl MonotoneBound {
    pub fn lower(quantity: Quantity, value: f64, certificate: Certificate) -> Self {
        Self { quantity, direction: Direction::Lower, value, certificate }
    }

    pub fn upper(quantity: Quantity, value: f64, certificate: Certificate) -> Self {
        Self { quantity, direction: Direction::Upper, value, certificate }
    }

    /// Error terms that were folded into `value`.
    pub fn folded_error(&self) -> f64 {
        self.certificate.truncation_correction_bits + self.certificate.inner_sup_grid_error
    }
}
