//! Passband modulators for on-off ASK, switched-oscillator FSK and BPSK.
//!
//! All carriers are free-running cosines referenced to the absolute stream
//! time `t = n / fs`; nothing is restarted at bit boundaries.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::signal::{BitStream, ModemConfig, Waveform};

/// Binary keying scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    Ask,
    Fsk,
    Bpsk,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Ask, Scheme::Fsk, Scheme::Bpsk];

    /// Lowercase name used in files and on the command line.
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Ask => "ask",
            Scheme::Fsk => "fsk",
            Scheme::Bpsk => "bpsk",
        }
    }

    pub(crate) fn index(self) -> u64 {
        match self {
            Scheme::Ask => 0,
            Scheme::Fsk => 1,
            Scheme::Bpsk => 2,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ask" | "ook" => Ok(Scheme::Ask),
            "fsk" => Ok(Scheme::Fsk),
            "bpsk" | "psk" => Ok(Scheme::Bpsk),
            other => Err(Error::Format {
                kind: "scheme",
                msg: format!("unknown scheme {other:?} (expected ask, fsk or bpsk)"),
            }),
        }
    }
}

/// A free-running cosine `A cos(2π f t + θ)` sampled in bit-sized blocks.
#[derive(Debug, Clone)]
pub(crate) struct Carrier {
    amplitude: f64,
    freq_hz: f64,
    phase_rad: f64,
    sample_rate_hz: f64,
    samples_per_bit: usize,
    // Filled when every bit holds a whole number of cycles, in which case all
    // blocks are identical.
    periodic_block: Option<Vec<f64>>,
}

impl Carrier {
    pub(crate) fn new(amplitude: f64, freq_hz: f64, phase_rad: f64, cfg: &ModemConfig) -> Self {
        let mut carrier = Self {
            amplitude,
            freq_hz,
            phase_rad,
            sample_rate_hz: cfg.sample_rate_hz(),
            samples_per_bit: cfg.samples_per_bit,
            periodic_block: None,
        };
        let cycles_per_bit = freq_hz / cfg.bit_rate_hz;
        if (cycles_per_bit - cycles_per_bit.round()).abs() < 1e-12 * cycles_per_bit.max(1.0) {
            let mut block = vec![0.0; cfg.samples_per_bit];
            carrier.evaluate(0, &mut block);
            carrier.periodic_block = Some(block);
        }
        carrier
    }

    fn evaluate(&self, bit_index: usize, out: &mut [f64]) {
        let first = bit_index * self.samples_per_bit;
        for (i, x) in out.iter_mut().enumerate() {
            let t = (first + i) as f64 / self.sample_rate_hz;
            *x = self.amplitude * (TAU * self.freq_hz * t + self.phase_rad).cos();
        }
    }

    /// Writes the carrier samples of bit interval `bit_index` into `out`.
    pub(crate) fn fill(&self, bit_index: usize, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.samples_per_bit);
        match &self.periodic_block {
            Some(block) => out.copy_from_slice(block),
            None => self.evaluate(bit_index, out),
        }
    }

    /// Carrier block for `bit_index`, borrowed when it is periodic.
    pub(crate) fn block<'a>(&'a self, bit_index: usize, scratch: &'a mut [f64]) -> &'a [f64] {
        match &self.periodic_block {
            Some(block) => block,
            None => {
                self.evaluate(bit_index, scratch);
                scratch
            }
        }
    }
}

/// The carriers a scheme transmits on: one for ASK/BPSK, mark then space for FSK.
#[derive(Debug, Clone)]
pub(crate) struct CarrierSet {
    pub(crate) scheme: Scheme,
    pub(crate) primary: Carrier,
    pub(crate) space: Option<Carrier>,
}

impl CarrierSet {
    pub(crate) fn new(scheme: Scheme, cfg: &ModemConfig) -> Result<Self> {
        cfg.validate(scheme)?;
        let a = cfg.amplitude;
        Ok(match scheme {
            Scheme::Ask | Scheme::Bpsk => Self {
                scheme,
                primary: Carrier::new(a, cfg.carrier_hz, 0.0, cfg),
                space: None,
            },
            Scheme::Fsk => Self {
                scheme,
                primary: Carrier::new(a, cfg.mark_hz, cfg.mark_phase_rad, cfg),
                space: Some(Carrier::new(a, cfg.space_hz, cfg.space_phase_rad, cfg)),
            },
        })
    }

    /// Transmitted samples for bit `bit` in interval `bit_index`.
    pub(crate) fn modulate_block(&self, bit: u8, bit_index: usize, out: &mut [f64]) {
        match (self.scheme, bit) {
            (Scheme::Ask, 0) => out.fill(0.0),
            (Scheme::Ask, _) | (Scheme::Bpsk, 1) => self.primary.fill(bit_index, out),
            (Scheme::Bpsk, _) => {
                self.primary.fill(bit_index, out);
                out.iter_mut().for_each(|x| *x = -*x);
            }
            (Scheme::Fsk, 1) => self.primary.fill(bit_index, out),
            (Scheme::Fsk, _) => self
                .space
                .as_ref()
                .expect("FSK carrier set has a space tone")
                .fill(bit_index, out),
        }
    }
}

fn modulate_with(scheme: Scheme, bits: &BitStream, cfg: &ModemConfig) -> Result<Waveform> {
    let carriers = CarrierSet::new(scheme, cfg)?;
    if bits.is_empty() {
        return Err(Error::EmptyStream);
    }
    let spb = cfg.samples_per_bit;
    let mut samples = vec![0.0; bits.len() * spb];
    for (k, (bit, block)) in bits.iter().zip(samples.chunks_exact_mut(spb)).enumerate() {
        carriers.modulate_block(bit, k, block);
    }
    Waveform::new(cfg.sample_rate_hz(), samples)
}

/// On-off keying: `d A cos(2π fc t)` with `d ∈ {0, 1}`.
pub fn modulate_ask(bits: &BitStream, cfg: &ModemConfig) -> Result<Waveform> {
    modulate_with(Scheme::Ask, bits, cfg)
}

/// Bit 1 sends `A cos(2π f1 t + θ1)`, bit 0 sends `A cos(2π f2 t + θ2)`.
///
/// Both oscillators run continuously; switching between them can leave a
/// phase discontinuity unless both tones hold whole cycles per bit.
pub fn modulate_fsk(bits: &BitStream, cfg: &ModemConfig) -> Result<Waveform> {
    modulate_with(Scheme::Fsk, bits, cfg)
}

/// Antipodal keying: `m A cos(2π fc t)` with `m = +1` for bit 1, `-1` for bit 0.
pub fn modulate_bpsk(bits: &BitStream, cfg: &ModemConfig) -> Result<Waveform> {
    modulate_with(Scheme::Bpsk, bits, cfg)
}

pub fn modulate(scheme: Scheme, bits: &BitStream, cfg: &ModemConfig) -> Result<Waveform> {
    modulate_with(scheme, bits, cfg)
}
