//! Bit error rate, SNR, and closed-form BER references for coherent detection.

use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::modulation::Scheme;
use crate::signal::{db_to_ratio, ratio_to_db, BitStream};

/// Outcome of comparing a transmitted and a received bit stream.
#[derive(Debug, Clone, PartialEq)]
pub struct BerResult {
    pub total_bits: usize,
    pub error_bits: usize,
    pub ber: f64,
    /// Zero-based indices where the streams differ, ascending.
    pub error_positions: Vec<usize>,
}

/// Counts differing positions between `tx` and `rx`.
pub fn bit_error_rate(tx: &BitStream, rx: &BitStream) -> Result<BerResult> {
    if tx.len() != rx.len() {
        return Err(Error::LengthMismatch {
            left: tx.len(),
            right: rx.len(),
        });
    }
    if tx.is_empty() {
        return Err(Error::EmptyStream);
    }
    let error_positions: Vec<usize> = tx
        .iter()
        .zip(rx.iter())
        .enumerate()
        .filter_map(|(i, (a, b))| (a != b).then_some(i))
        .collect();
    let total_bits = tx.len();
    let error_bits = error_positions.len();
    Ok(BerResult {
        total_bits,
        error_bits,
        ber: error_bits as f64 / total_bits as f64,
        error_positions,
    })
}

/// A power ratio in linear and logarithmic form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Snr {
    pub ratio: f64,
    pub db: f64,
}

pub fn snr_from_powers(signal_power: f64, noise_power: f64) -> Result<Snr> {
    if !(signal_power > 0.0) {
        return Err(Error::NonPositiveRatio(signal_power));
    }
    if !(noise_power > 0.0) {
        return Err(Error::NonPositiveRatio(noise_power));
    }
    let ratio = signal_power / noise_power;
    Ok(Snr {
        ratio,
        db: ratio_to_db(ratio)?,
    })
}

/// Gaussian tail probability `Q(x) = erfc(x / √2) / 2`.
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Channel-only BER of coherent detection at `ebn0_db`, with `Eb` the average
/// energy per bit.
pub fn channel_ber(scheme: Scheme, ebn0_db: f64) -> f64 {
    let gamma = db_to_ratio(ebn0_db);
    match scheme {
        Scheme::Bpsk => q_function((2.0 * gamma).sqrt()),
        // On-off keying at average energy and orthogonal FSK share a distance.
        Scheme::Ask | Scheme::Fsk => q_function(gamma.sqrt()),
    }
}

/// Closed-form BER against the original bits when a bit-flip channel with
/// probability `error_rate` precedes the noisy link: `p(1-q) + (1-p)q`.
pub fn theoretical_ber(scheme: Scheme, ebn0_db: f64, error_rate: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&error_rate) {
        return Err(Error::InvalidProbability(error_rate));
    }
    let q = channel_ber(scheme, ebn0_db);
    let p = error_rate;
    Ok(p * (1.0 - q) + (1.0 - p) * q)
}

/// Two-sided 95% interval for a binomial proportion: normal approximation
/// with a `1/(2n)` continuity correction, clamped to `[0, 1]`.
pub fn binomial_ci95(errors: usize, n: usize) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = errors as f64 / n;
    let half = 1.959_963_984_540_054 * (p * (1.0 - p) / n).sqrt() + 0.5 / n;
    ((p - half).max(0.0), (p + half).min(1.0))
}
