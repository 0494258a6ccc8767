//! Bits, sampled waveforms, modem configuration and the seeded random source
//! shared by every other module.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::modulation::Scheme;

/// An ordered sequence of binary symbols, each stored as `0` or `1`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct BitStream(Vec<u8>);

impl BitStream {
    /// Builds a stream from raw symbols, rejecting anything other than 0 or 1.
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(&b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::InvalidBit(char::from_digit(b as u32 % 36, 36).unwrap_or('?')));
        }
        Ok(Self(bits))
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        Self(bits.into_iter().map(u8::from).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = u8> + '_ {
        self.0.iter().copied()
    }

    pub fn into_inner(self) -> Vec<u8> {
        self.0
    }

    /// Every bit inverted.
    pub fn complement(&self) -> Self {
        Self(self.0.iter().map(|b| b ^ 1).collect())
    }

    /// Fraction of symbols equal to one. Zero for an empty stream.
    pub fn ones_fraction(&self) -> f64 {
        if self.0.is_empty() {
            return 0.0;
        }
        self.0.iter().map(|&b| b as usize).sum::<usize>() as f64 / self.0.len() as f64
    }
}

impl FromStr for BitStream {
    type Err = Error;

    /// Parses ASCII `'0'`/`'1'`; surrounding whitespace is ignored.
    fn from_str(s: &str) -> Result<Self> {
        s.trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::InvalidBit(other)),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }
}

impl fmt::Display for BitStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// A uniformly sampled real-valued signal.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    sample_rate_hz: f64,
    samples: Vec<f64>,
}

impl Waveform {
    pub fn new(sample_rate_hz: f64, samples: Vec<f64>) -> Result<Self> {
        if !(sample_rate_hz.is_finite() && sample_rate_hz > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "sample rate must be positive and finite, got {sample_rate_hz}"
            )));
        }
        if let Some(i) = samples.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFiniteSample(i));
        }
        Ok(Self {
            sample_rate_hz,
            samples,
        })
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_sec(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate_hz
    }

    /// Time of sample `i` relative to the first sample.
    pub fn time_of(&self, i: usize) -> f64 {
        i as f64 / self.sample_rate_hz
    }

    /// Multiplies every sample by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.sample_rate_hz,
            self.samples.iter().map(|x| x * factor).collect(),
        )
    }
}

/// Carrier amplitudes, frequencies, phases and bit timing for all three schemes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModemConfig {
    /// Carrier amplitude `A`.
    pub amplitude: f64,
    /// ASK and BPSK carrier frequency.
    pub carrier_hz: f64,
    /// FSK mark frequency, sent for bit 1.
    pub mark_hz: f64,
    /// FSK space frequency, sent for bit 0.
    pub space_hz: f64,
    pub mark_phase_rad: f64,
    pub space_phase_rad: f64,
    /// Bits per second, the reciprocal of the bit duration.
    pub bit_rate_hz: f64,
    pub samples_per_bit: usize,
}

impl Default for ModemConfig {
    /// A=1, 1 bit/s, fc=4 Hz, FSK 5 Hz / 1 Hz at zero phase, 64 samples per bit.
    fn default() -> Self {
        Self {
            amplitude: 1.0,
            carrier_hz: 4.0,
            mark_hz: 5.0,
            space_hz: 1.0,
            mark_phase_rad: 0.0,
            space_phase_rad: 0.0,
            bit_rate_hz: 1.0,
            samples_per_bit: 64,
        }
    }
}

impl ModemConfig {
    /// Smallest accepted samples-per-bit value.
    pub const MIN_SAMPLES_PER_BIT: usize = 8;

    pub fn sample_rate_hz(&self) -> f64 {
        self.bit_rate_hz * self.samples_per_bit as f64
    }

    pub fn bit_duration_sec(&self) -> f64 {
        1.0 / self.bit_rate_hz
    }

    /// Carrier frequencies the given scheme transmits on.
    pub fn carriers_for(&self, scheme: Scheme) -> Vec<f64> {
        match scheme {
            Scheme::Ask | Scheme::Bpsk => vec![self.carrier_hz],
            Scheme::Fsk => vec![self.mark_hz, self.space_hz],
        }
    }

    /// Checks the configuration for use with `scheme`.
    ///
    /// Every carrier the scheme uses must satisfy
    /// `samples_per_bit >= 4 * f / bit_rate` (twice Nyquist), and FSK needs two
    /// distinct tones.
    pub fn validate(&self, scheme: Scheme) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidConfig(format!("{name} must be positive and finite, got {v}")))
            }
        };
        positive("amplitude", self.amplitude)?;
        positive("bit rate", self.bit_rate_hz)?;
        if self.samples_per_bit < Self::MIN_SAMPLES_PER_BIT {
            return Err(Error::InvalidConfig(format!(
                "samples per bit must be at least {}, got {}",
                Self::MIN_SAMPLES_PER_BIT,
                self.samples_per_bit
            )));
        }
        match scheme {
            Scheme::Ask | Scheme::Bpsk => positive("carrier frequency", self.carrier_hz)?,
            Scheme::Fsk => {
                positive("mark frequency", self.mark_hz)?;
                positive("space frequency", self.space_hz)?;
                if !(self.mark_phase_rad.is_finite() && self.space_phase_rad.is_finite()) {
                    return Err(Error::InvalidConfig("FSK phases must be finite".into()));
                }
            }
        }
        for freq_hz in self.carriers_for(scheme) {
            let required = 4.0 * freq_hz / self.bit_rate_hz;
            if (self.samples_per_bit as f64) < required {
                return Err(Error::UndersampledCarrier {
                    freq_hz,
                    samples_per_bit: self.samples_per_bit,
                    required,
                });
            }
        }
        if scheme == Scheme::Fsk && self.mark_hz == self.space_hz {
            return Err(Error::DegenerateFskPair(self.mark_hz));
        }
        Ok(())
    }
}

/// Seeded, portable pseudo-random source.
///
/// Backed by ChaCha with 8 rounds; normal variates use the ziggurat method.
/// Independent streams for parallel work come from [`RandomSource::derived`].
#[derive(Debug, Clone)]
pub struct RandomSource {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        Self::derived(seed, 0)
    }

    /// Stream `stream` of the generator keyed by `seed`. Distinct stream
    /// indices never overlap.
    pub fn derived(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { seed, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform real in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Standard normal variate (zero mean, unit variance).
    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn coin(&mut self) -> bool {
        self.rng.random::<bool>()
    }
}

/// `n` equiprobable bits drawn from `rng`.
pub fn generate_bits(n: usize, rng: &mut RandomSource) -> BitStream {
    BitStream::from_bools((0..n).map(|_| rng.coin()))
}

/// Average of the squared samples.
pub fn mean_power(w: &Waveform) -> Result<f64> {
    if w.is_empty() {
        return Err(Error::EmptySignal);
    }
    Ok(energy(w.samples()) / w.len() as f64)
}

pub(crate) fn energy(samples: &[f64]) -> f64 {
    samples.iter().map(|x| x * x).sum()
}

/// `10 log10(r)`.
pub fn ratio_to_db(r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::NonPositiveRatio(r));
    }
    Ok(10.0 * r.log10())
}

/// Inverse of [`ratio_to_db`].
pub fn db_to_ratio(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}
