//! Additive white Gaussian noise on waveforms and a binary symmetric channel
//! on bit streams.

use crate::error::{Error, Result};
use crate::signal::{db_to_ratio, mean_power, BitStream, ModemConfig, RandomSource, Waveform};

/// Noise level of an AWGN channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AwgnSpec {
    /// Target Eb/N0 in dB, converted to a per-sample sigma from the measured
    /// power of the waveform being impaired.
    EbN0Db(f64),
    /// Explicit per-sample standard deviation.
    Sigma(f64),
}

impl AwgnSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            AwgnSpec::EbN0Db(db) if db.is_nan() => Err(Error::InvalidNoise(db)),
            AwgnSpec::Sigma(s) if !(s >= 0.0 && s.is_finite()) => Err(Error::InvalidNoise(s)),
            _ => Ok(()),
        }
    }
}

/// Bit-flip probability of a binary symmetric channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BscSpec {
    error_rate: f64,
}

impl BscSpec {
    pub fn new(error_rate: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&error_rate) {
            return Err(Error::InvalidProbability(error_rate));
        }
        Ok(Self { error_rate })
    }

    pub fn error_rate(&self) -> f64 {
        self.error_rate
    }
}

/// Per-sample noise sigma giving `ebn0_db` for waveform `w`.
///
/// `Eb` is the measured mean power times the bit duration, `N0 = Eb / γ`, and
/// the discrete-time noise variance is `N0 fs / 2`.
pub fn noise_sigma_for_ebn0(w: &Waveform, cfg: &ModemConfig, ebn0_db: f64) -> Result<f64> {
    let power = mean_power(w)?;
    sigma_from_power(power, cfg.bit_rate_hz, w.sample_rate_hz(), ebn0_db)
}

pub(crate) fn sigma_from_power(
    power: f64,
    bit_rate_hz: f64,
    sample_rate_hz: f64,
    ebn0_db: f64,
) -> Result<f64> {
    if !(power > 0.0) {
        return Err(Error::NoSignalEnergy);
    }
    let eb = power / bit_rate_hz;
    let n0 = eb / db_to_ratio(ebn0_db);
    Ok((n0 * sample_rate_hz / 2.0).sqrt())
}

/// Adds independent zero-mean Gaussian noise to every sample of `w`.
pub fn apply_awgn(
    w: &Waveform,
    spec: AwgnSpec,
    cfg: &ModemConfig,
    rng: &mut RandomSource,
) -> Result<Waveform> {
    spec.validate()?;
    let sigma = match spec {
        AwgnSpec::Sigma(s) => s,
        AwgnSpec::EbN0Db(db) => noise_sigma_for_ebn0(w, cfg, db)?,
    };
    if sigma == 0.0 {
        return Ok(w.clone());
    }
    let samples = w.samples().iter().map(|x| x + sigma * rng.normal()).collect();
    Waveform::new(w.sample_rate_hz(), samples)
}

/// Flips each bit independently with the spec's error rate.
pub fn apply_bsc(bits: &BitStream, spec: BscSpec, rng: &mut RandomSource) -> BitStream {
    let p = spec.error_rate;
    BitStream::from_bools(bits.iter().map(|b| (b == 1) ^ (rng.uniform() < p)))
}
