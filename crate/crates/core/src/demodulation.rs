//! Coherent correlation receivers.
//!
//! Each bit interval is correlated against the reference carrier(s) the
//! transmitter used; the receiver is assumed to know frequencies, phases and
//! bit timing exactly.

use crate::error::{Error, Result};
use crate::modulation::{CarrierSet, Scheme};
use crate::signal::{BitStream, ModemConfig, Waveform};

/// Per-bit decision statistics.
///
/// ASK and BPSK decide 1 iff `stat1 >= threshold`. FSK records the mark and
/// space correlations in `stat1` and `stat2` and decides 1 iff
/// `stat1 - stat2 >= threshold`, with a threshold of zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecisionTrace {
    pub stat1: f64,
    pub stat2: Option<f64>,
    pub threshold: f64,
    pub decision: u8,
}

impl DecisionTrace {
    fn decide(stat1: f64, stat2: Option<f64>, threshold: f64) -> Self {
        let mut trace = Self { stat1, stat2, threshold, decision: 0 };
        trace.decision = u8::from(trace.statistic() >= threshold);
        trace
    }

    /// The scalar compared against the threshold.
    pub fn statistic(&self) -> f64 {
        self.stat1 - self.stat2.unwrap_or(0.0)
    }

    /// Whether `decision` agrees with the statistic/threshold rule (ties decide 1).
    pub fn is_consistent(&self) -> bool {
        self.decision == u8::from(self.statistic() >= self.threshold)
    }
}

/// Recovered bits plus one trace entry per bit.
#[derive(Debug, Clone, PartialEq)]
pub struct Demodulated {
    pub bits: BitStream,
    pub traces: Vec<DecisionTrace>,
}

/// Unnormalized inner product of two equal-length blocks.
pub fn correlate_bit(segment: &[f64], reference: &[f64]) -> Result<f64> {
    if segment.len() != reference.len() {
        return Err(Error::LengthMismatch {
            left: segment.len(),
            right: reference.len(),
        });
    }
    if segment.is_empty() {
        return Err(Error::EmptySignal);
    }
    Ok(dot(segment, reference))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Block-wise receiver shared by the public demodulators and the sweep engine.
#[derive(Debug, Clone)]
pub(crate) struct Receiver {
    carriers: CarrierSet,
    ask_threshold: f64,
    scratch: Vec<f64>,
}

impl Receiver {
    pub(crate) fn new(scheme: Scheme, cfg: &ModemConfig) -> Result<Self> {
        let carriers = CarrierSet::new(scheme, cfg)?;
        Ok(Self {
            carriers,
            ask_threshold: cfg.amplitude * cfg.amplitude * cfg.samples_per_bit as f64 / 4.0,
            scratch: vec![0.0; cfg.samples_per_bit],
        })
    }

    pub(crate) fn decide(&mut self, block: &[f64], bit_index: usize) -> DecisionTrace {
        let primary = dot(block, self.carriers.primary.block(bit_index, &mut self.scratch));
        match self.carriers.scheme {
            Scheme::Ask => DecisionTrace::decide(primary, None, self.ask_threshold),
            Scheme::Bpsk => DecisionTrace::decide(primary, None, 0.0),
            Scheme::Fsk => {
                let space = self.carriers.space.as_ref().expect("FSK carrier set has a space tone");
                let secondary = dot(block, space.block(bit_index, &mut self.scratch));
                DecisionTrace::decide(primary, Some(secondary), 0.0)
            }
        }
    }
}

fn check_alignment(w: &Waveform, cfg: &ModemConfig) -> Result<()> {
    let expected = cfg.sample_rate_hz();
    if (w.sample_rate_hz() - expected).abs() > 1e-9 * expected {
        return Err(Error::SampleRateMismatch {
            waveform_hz: w.sample_rate_hz(),
            config_hz: expected,
        });
    }
    if !w.len().is_multiple_of(cfg.samples_per_bit) {
        return Err(Error::NotBitAligned {
            len: w.len(),
            samples_per_bit: cfg.samples_per_bit,
        });
    }
    Ok(())
}

/// Demodulates `w` with the receiver for `scheme`.
pub fn demodulate(scheme: Scheme, w: &Waveform, cfg: &ModemConfig) -> Result<Demodulated> {
    let mut receiver = Receiver::new(scheme, cfg)?;
    check_alignment(w, cfg)?;
    let traces: Vec<DecisionTrace> = w
        .samples()
        .chunks_exact(cfg.samples_per_bit)
        .enumerate()
        .map(|(k, block)| receiver.decide(block, k))
        .collect();
    let bits = BitStream::from_bools(traces.iter().map(|t| t.decision == 1));
    Ok(Demodulated { bits, traces })
}

/// Correlates against `A cos(2π fc t)` and slices at `A² spb / 4`.
pub fn demod_ask(w: &Waveform, cfg: &ModemConfig) -> Result<Demodulated> {
    demodulate(Scheme::Ask, w, cfg)
}

/// Compares mark and space correlations; bit 1 wins ties.
pub fn demod_fsk(w: &Waveform, cfg: &ModemConfig) -> Result<Demodulated> {
    demodulate(Scheme::Fsk, w, cfg)
}

/// Sign of the correlation with `+A cos(2π fc t)`.
pub fn demod_bpsk(w: &Waveform, cfg: &ModemConfig) -> Result<Demodulated> {
    demodulate(Scheme::Bpsk, w, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{apply_awgn, AwgnSpec};
    use crate::modulation::{modulate, modulate_ask, modulate_bpsk, modulate_fsk};
    use crate::signal::{generate_bits, RandomSource};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn bits(s: &str) -> BitStream {
        s.parse().unwrap()
    }

    fn tone(amplitude: f64, cycles: usize, len: usize) -> Vec<f64> {
        (0..len)
            .map(|i| amplitude * (2.0 * PI * (cycles * i) as f64 / len as f64).cos())
            .collect()
    }

    #[test]
    fn autocorrelation_of_cosine() {
        let (a, len) = (1.5, 64);
        let block = tone(a, 4, len);
        // Summation oracle, accumulated independently of correlate_bit.
        let mut oracle = 0.0;
        for x in &block {
            oracle += x * x;
        }
        let expected = a * a * len as f64 / 2.0;
        assert!((oracle - expected).abs() < 1e-9 * a * a * len as f64);
        let c = correlate_bit(&block, &block).unwrap();
        assert!((c - expected).abs() < 1e-9 * a * a * len as f64);
    }

    #[test]
    fn orthogonal_tones() {
        let (x, y) = (tone(1.0, 5, 64), tone(1.0, 1, 64));
        let c = correlate_bit(&x, &y).unwrap();
        assert!(c.abs() < 1e-9 * 32.0, "cross-correlation {c}");
    }

    #[test]
    fn zero_segment_and_errors() {
        assert_eq!(correlate_bit(&[0.0; 8], &tone(1.0, 1, 8)).unwrap(), 0.0);
        assert!(matches!(
            correlate_bit(&[0.0; 8], &[0.0; 7]),
            Err(Error::LengthMismatch { left: 8, right: 7 })
        ));
        assert!(correlate_bit(&[], &[]).is_err());
    }

    #[test]
    fn ask_reference_loopback() {
        let cfg = ModemConfig::default();
        let b = bits("1011010");
        let out = demod_ask(&modulate_ask(&b, &cfg).unwrap(), &cfg).unwrap();
        assert_eq!(out.bits, b);
        assert_eq!(out.traces.len(), 7);
        assert!(out.traces.iter().all(|t| t.threshold == 16.0 && t.stat2.is_none()));
        assert!((out.traces[0].stat1 - 32.0).abs() < 1e-9);
    }

    #[test]
    fn ask_silence_is_zeros() {
        let cfg = ModemConfig::default();
        let w = Waveform::new(64.0, vec![0.0; 640]).unwrap();
        assert_eq!(demod_ask(&w, &cfg).unwrap().bits, BitStream::from_bools(vec![false; 10]));
    }

    #[test]
    fn ask_high_snr_is_error_free() {
        let cfg = ModemConfig::default();
        let ones = BitStream::from_bools(vec![true; 1000]);
        let w = modulate_ask(&ones, &cfg).unwrap();
        let noisy = apply_awgn(&w, AwgnSpec::EbN0Db(40.0), &cfg, &mut RandomSource::new(6)).unwrap();
        assert_eq!(demod_ask(&noisy, &cfg).unwrap().bits, ones);
    }

    #[test]
    fn fsk_loopbacks() {
        let cfg = ModemConfig::default();
        let b = bits("1001");
        assert_eq!(demod_fsk(&modulate_fsk(&b, &cfg).unwrap(), &cfg).unwrap().bits, b);

        let random = generate_bits(1000, &mut RandomSource::new(12));
        let w = modulate_fsk(&random, &cfg).unwrap();
        assert_eq!(demod_fsk(&w, &cfg).unwrap().bits, random);
    }

    #[test]
    fn fsk_mark_tone_is_ones() {
        let cfg = ModemConfig::default();
        let len = 5 * 64;
        let w = Waveform::new(
            64.0,
            (0..len).map(|i| (2.0 * PI * 5.0 * i as f64 / 64.0).cos()).collect(),
        )
        .unwrap();
        let out = demod_fsk(&w, &cfg).unwrap();
        assert_eq!(out.bits.to_string(), "11111");
        assert!(out.traces.iter().all(|t| t.stat2.is_some() && t.threshold == 0.0));
    }

    #[test]
    fn bpsk_loopback_and_phase() {
        let cfg = ModemConfig::default();
        let b = bits("101");
        let w = modulate_bpsk(&b, &cfg).unwrap();
        assert_eq!(demod_bpsk(&w, &cfg).unwrap().bits, b);
        let negated = w.scaled(-1.0).unwrap();
        assert_eq!(demod_bpsk(&negated, &cfg).unwrap().bits, b.complement());
        let block = modulate_ask(&bits("1"), &cfg).unwrap().scaled(-1.0).unwrap();
        assert_eq!(demod_bpsk(&block, &cfg).unwrap().bits, bits("0"));
    }

    #[test]
    fn alignment_errors() {
        let cfg = ModemConfig::default();
        let w = Waveform::new(64.0, vec![0.0; 100]).unwrap();
        let err = demod_bpsk(&w, &cfg).unwrap_err();
        assert!(matches!(err, Error::NotBitAligned { len: 100, samples_per_bit: 64 }));
        assert!(err.to_string().starts_with("length not bit-aligned"));
        let w = Waveform::new(32.0, vec![0.0; 64]).unwrap();
        assert!(matches!(demod_bpsk(&w, &cfg), Err(Error::SampleRateMismatch { .. })));
    }

    #[test]
    fn ties_decide_one() {
        let t = DecisionTrace::decide(4.0, None, 4.0);
        assert_eq!(t.decision, 1);
        let t = DecisionTrace::decide(2.0, Some(2.0), 0.0);
        assert_eq!(t.decision, 1);
        // Silence into the BPSK receiver correlates to exactly zero.
        let cfg = ModemConfig::default();
        let w = Waveform::new(64.0, vec![0.0; 64]).unwrap();
        assert_eq!(demod_bpsk(&w, &cfg).unwrap().bits, bits("1"));
    }

    #[test]
    fn ask_needs_matching_amplitude() {
        let cfg = ModemConfig::default();
        let loud = ModemConfig { amplitude: 2.0, ..cfg };
        let b = bits("0110");
        // Doubling the transmit amplitude with a matching receiver still loops back.
        let w = modulate_ask(&b, &loud).unwrap();
        assert_eq!(demod_ask(&w, &loud).unwrap().bits, b);
        // A receiver expecting A=4 slices above a half-amplitude bit 1.
        let quiet = modulate_ask(&b, &cfg).unwrap();
        let deaf = ModemConfig { amplitude: 4.0, ..cfg };
        assert_eq!(demod_ask(&quiet, &deaf).unwrap().bits, bits("0000"));
    }

    #[test]
    fn exhaustive_short_patterns() {
        let cfg = ModemConfig::default();
        for scheme in Scheme::ALL {
            for len in 1..=10usize {
                for pattern in 0u32..(1 << len) {
                    let b = BitStream::from_bools((0..len).map(|i| pattern >> i & 1 == 1));
                    let w = modulate(scheme, &b, &cfg).unwrap();
                    assert_eq!(demodulate(scheme, &w, &cfg).unwrap().bits, b, "{scheme} {b}");
                }
            }
        }
    }

    fn scheme() -> impl Strategy<Value = Scheme> {
        prop_oneof![Just(Scheme::Ask), Just(Scheme::Fsk), Just(Scheme::Bpsk)]
    }

    fn config() -> impl Strategy<Value = ModemConfig> {
        (0.1f64..5.0, 1usize..8, 1usize..8, 1usize..4, 0.5f64..8.0, 0.0f64..6.3, 0.0f64..6.3)
            .prop_map(|(amplitude, fc, f2, gap, bit_rate, th1, th2)| {
                let f1 = f2 + gap;
                ModemConfig {
                    amplitude,
                    carrier_hz: fc as f64 * bit_rate,
                    mark_hz: f1 as f64 * bit_rate,
                    space_hz: f2 as f64 * bit_rate,
                    mark_phase_rad: th1,
                    space_phase_rad: th2,
                    bit_rate_hz: bit_rate,
                    samples_per_bit: 4 * fc.max(f1) + 3,
                }
            })
    }

    proptest! {
        #[test]
        fn noiseless_loopback(
            s in scheme(),
            cfg in config(),
            raw in prop::collection::vec(any::<bool>(), 1..200),
        ) {
            let b = BitStream::from_bools(raw);
            let w = modulate(s, &b, &cfg).unwrap();
            let out = demodulate(s, &w, &cfg).unwrap();
            prop_assert_eq!(&out.bits, &b);
            prop_assert!(out.traces.iter().all(DecisionTrace::is_consistent));
        }

        #[test]
        fn bpsk_scale_invariant(
            cfg in config(),
            scale in 0.01f64..100.0,
            seed in any::<u64>(),
        ) {
            let b = generate_bits(64, &mut RandomSource::new(seed));
            let w = modulate_bpsk(&b, &cfg).unwrap();
            let noisy = apply_awgn(&w, AwgnSpec::EbN0Db(0.0), &cfg, &mut RandomSource::new(seed)).unwrap();
            let base = demod_bpsk(&noisy, &cfg).unwrap().bits;
            prop_assert_eq!(demod_bpsk(&noisy.scaled(scale).unwrap(), &cfg).unwrap().bits, base);
        }

        #[test]
        fn fsk_swap_complements(cfg in config(), seed in any::<u64>()) {
            let b = generate_bits(64, &mut RandomSource::new(seed));
            let w = modulate_fsk(&b, &cfg).unwrap();
            let noisy = apply_awgn(&w, AwgnSpec::EbN0Db(2.0), &cfg, &mut RandomSource::new(seed)).unwrap();
            let swapped = ModemConfig {
                mark_hz: cfg.space_hz,
                space_hz: cfg.mark_hz,
                mark_phase_rad: cfg.space_phase_rad,
                space_phase_rad: cfg.mark_phase_rad,
                ..cfg
            };
            let direct = demod_fsk(&noisy, &cfg).unwrap();
            let flipped = demod_fsk(&noisy, &swapped).unwrap();
            // Ties are measure-zero under noise; skip the rare exact ones.
            prop_assume!(direct.traces.iter().all(|t| t.statistic() != 0.0));
            prop_assert_eq!(flipped.bits, direct.bits.complement());
        }

        #[test]
        fn traces_follow_rule(s in scheme(), seed in any::<u64>(), ebn0 in -5.0f64..10.0) {
            let cfg = ModemConfig::default();
            let b = generate_bits(128, &mut RandomSource::new(seed));
            let w = modulate(s, &b, &cfg).unwrap();
            prop_assume!(b.iter().any(|x| x == 1));
            let noisy = apply_awgn(&w, AwgnSpec::EbN0Db(ebn0), &cfg, &mut RandomSource::new(seed ^ 1)).unwrap();
            let out = demodulate(s, &noisy, &cfg).unwrap();
            prop_assert!(out.traces.iter().all(DecisionTrace::is_consistent));
            prop_assert_eq!(out.bits.len(), b.len());
        }
    }
}
