//! Bias and data-complexity arithmetic. Every probability and bias is carried
//! as an exact base-2 exponent.

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Block size in bits; an attack needing more than `2^64` texts exceeds the
/// full codebook.
pub const CODEBOOK_LOG2: i64 = 64;

/// Piling-up lemma for `n_active` independent approximations that each have
/// bias `2^per_box_bias_log2`: the combined bias is
/// `2^(n-1) * (2^b)^n`, returned as its exponent `(n - 1) + n*b`.
pub fn piling_up_bias(n_active: u32, per_box_bias_log2: i64) -> Result<i64, Error> {
    if n_active == 0 {
        return Err(Error::NoApproximations);
    }
    let n = n_active as i64;
    Ok((n - 1) + n * per_box_bias_log2)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttackComplexity {
    /// `log2` of the number of texts required.
    pub data_log2: i64,
    /// True when the requirement exceeds the `2^64` codebook.
    pub exceeds_codebook: bool,
}

impl AttackComplexity {
    fn new(data_log2: i64) -> Self {
        AttackComplexity {
            data_log2,
            exceeds_codebook: data_log2 > CODEBOOK_LOG2,
        }
    }
}

/// `N_L = 1 / eps^2`.
pub fn linear_attack_complexity(bias_log2: i64) -> Result<AttackComplexity, Error> {
    if bias_log2 >= 0 {
        return Err(Error::NonNegativeBias(bias_log2));
    }
    Ok(AttackComplexity::new(-2 * bias_log2))
}

/// `N_d = 1 / p_d` with `p_d = (2^-2)^n_active`.
pub fn differential_attack_complexity(n_active: u32) -> Result<AttackComplexity, Error> {
    if n_active == 0 {
        return Err(Error::NoApproximations);
    }
    Ok(AttackComplexity::new(2 * n_active as i64))
}

/// Per-S-box bias and differential probability exponent of the cipher's S-box
/// (both `4/16 = 2^-2`).
pub const SBOX_LOG2: i64 = -2;

/// Extrapolated multi-round estimate: a segment of `segment_active` active
/// S-boxes repeated `segments` times.
///
/// This repeats a short-trail count by a constant multiplier. It is not a
/// searched bound and is labeled as an approximation in every report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtrapolatedEstimate {
    pub kind: EstimateKind,
    pub segment_active: u32,
    pub segments: u32,
    pub total_active: u32,
    /// Bias exponent of one segment (linear only).
    pub segment_bias_log2: Option<i64>,
    /// Combined bias (linear) or trail probability (differential) exponent.
    pub combined_log2: i64,
    pub attack: AttackComplexity,
    pub approximation: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateKind {
    Linear,
    Differential,
}

pub fn extrapolate_linear(
    segment_active: u32,
    segments: u32,
) -> Result<ExtrapolatedEstimate, Error> {
    let segment_bias = piling_up_bias(segment_active, SBOX_LOG2)?;
    let combined = piling_up_bias(segments, segment_bias)?;
    Ok(ExtrapolatedEstimate {
        kind: EstimateKind::Linear,
        segment_active,
        segments,
        total_active: segment_active * segments,
        segment_bias_log2: Some(segment_bias),
        combined_log2: combined,
        attack: linear_attack_complexity(combined)?,
        approximation: segments > 1,
    })
}

pub fn extrapolate_differential(
    segment_active: u32,
    segments: u32,
) -> Result<ExtrapolatedEstimate, Error> {
    let total = segment_active * segments;
    let attack = differential_attack_complexity(total)?;
    Ok(ExtrapolatedEstimate {
        kind: EstimateKind::Differential,
        segment_active,
        segments,
        total_active: total,
        segment_bias_log2: None,
        combined_log2: SBOX_LOG2 * total as i64,
        attack,
        approximation: segments > 1,
    })
}
