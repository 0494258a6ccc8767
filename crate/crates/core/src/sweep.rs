//! Monte Carlo BER-versus-Eb/N0 sweeps.
//!
//! Each grid point runs the full chain
//! `bits -> bit-flip channel -> modulator -> AWGN -> receiver` and scores the
//! decisions against the bits *before* the bit-flip channel, so a nonzero
//! error rate shows up as a floor under the AWGN waterfall.
//!
//! Waveforms are streamed one bit interval at a time instead of being
//! materialized, so 10^6-bit points run in constant memory. Noise power is
//! set from the measured power of the whole transmitted waveform, which takes
//! a first pass over the blocks before the noisy pass.

use rayon::prelude::*;

use crate::channel::{apply_bsc, sigma_from_power, BscSpec};
use crate::demodulation::Receiver;
use crate::error::{Error, Result};
use crate::metrics::binomial_ci95;
use crate::modulation::{CarrierSet, Scheme};
use crate::signal::{generate_bits, ModemConfig, RandomSource};

/// Whether the AWGN channel is active during a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SweepNoise {
    /// Noise sigma follows each grid point's Eb/N0.
    #[default]
    EbN0,
    /// Noise switched off; grid values only label the points.
    Disabled,
}

/// Parameters of a single-scheme sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRequest {
    pub scheme: Scheme,
    pub ebn0_grid_db: Vec<f64>,
    /// Flip probability of the bit-flip channel in front of the modulator.
    pub error_rate: f64,
    pub bits_per_point: usize,
    pub config: ModemConfig,
    pub seed: u64,
    pub noise: SweepNoise,
}

/// One Monte Carlo measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub scheme: Scheme,
    pub ebn0_db: f64,
    pub error_rate: f64,
    pub bits_sent: usize,
    pub bit_errors: usize,
    pub ber: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl SweepRequest {
    /// Random stream used for grid point `index`. Depends only on the seed,
    /// scheme and index, so points may be evaluated in any order.
    pub fn point_source(&self, index: usize) -> RandomSource {
        RandomSource::derived(self.seed, (self.scheme.index() << 32) | index as u64)
    }

    fn validate(&self) -> Result<()> {
        if self.ebn0_grid_db.is_empty() {
            return Err(Error::InvalidSweep("empty Eb/N0 grid".into()));
        }
        if let Some(db) = self.ebn0_grid_db.iter().find(|db| !db.is_finite()) {
            return Err(Error::InvalidSweep(format!("non-finite grid value {db}")));
        }
        if self.bits_per_point == 0 {
            return Err(Error::InvalidSweep("bits per point must be at least 1".into()));
        }
        BscSpec::new(self.error_rate)?;
        self.config.validate(self.scheme)
    }
}

/// Runs every grid point of `req`, in parallel when threads are available.
/// The result does not depend on evaluation order.
pub fn run_sweep(req: &SweepRequest) -> Result<Vec<SweepPoint>> {
    req.validate()?;
    req.ebn0_grid_db
        .par_iter()
        .enumerate()
        .map(|(index, &ebn0_db)| run_point(req, index, ebn0_db))
        .collect()
}

fn run_point(req: &SweepRequest, index: usize, ebn0_db: f64) -> Result<SweepPoint> {
    let cfg = &req.config;
    let spb = cfg.samples_per_bit;
    let mut rng = req.point_source(index);

    let message = generate_bits(req.bits_per_point, &mut rng);
    let sent = apply_bsc(&message, BscSpec::new(req.error_rate)?, &mut rng);

    let carriers = CarrierSet::new(req.scheme, cfg)?;
    let mut receiver = Receiver::new(req.scheme, cfg)?;
    let mut block = vec![0.0; spb];

    let sigma = match req.noise {
        SweepNoise::Disabled => 0.0,
        SweepNoise::EbN0 => {
            let mut energy = 0.0;
            for (k, bit) in sent.iter().enumerate() {
                carriers.modulate_block(bit, k, &mut block);
                for x in &block {
                    energy += x * x;
                }
            }
            let power = energy / (sent.len() * spb) as f64;
            sigma_from_power(power, cfg.bit_rate_hz, cfg.sample_rate_hz(), ebn0_db)?
        }
    };

    let mut bit_errors = 0;
    for (k, (bit, original)) in sent.iter().zip(message.iter()).enumerate() {
        carriers.modulate_block(bit, k, &mut block);
        if sigma > 0.0 {
            for x in block.iter_mut() {
                *x += sigma * rng.normal();
            }
        }
        if receiver.decide(&block, k).decision != original {
            bit_errors += 1;
        }
    }

    let bits_sent = req.bits_per_point;
    let (ci_low, ci_high) = binomial_ci95(bit_errors, bits_sent);
    Ok(SweepPoint {
        scheme: req.scheme,
        ebn0_db,
        error_rate: req.error_rate,
        bits_sent,
        bit_errors,
        ber: bit_errors as f64 / bits_sent as f64,
        ci_low,
        ci_high,
    })
}
