//! Simulation of binary ASK, FSK and BPSK over a cosine carrier.
//!
//! The pipeline is the usual link-level chain:
//!
//! ```text
//! bits -> [bit-flip channel] -> modulator -> [AWGN] -> correlation receiver -> BER
//! ```
//!
//! [`sweep::run_sweep`] drives that chain over a grid of Eb/N0 values and
//! reports Monte Carlo BER with confidence intervals, which
//! [`metrics::theoretical_ber`] gives in closed form.

// `!(x > 0.0)` is deliberate: NaN has to fail positivity checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod demodulation;
pub mod error;
pub mod io;
pub mod metrics;
pub mod modulation;
pub mod signal;
pub mod sweep;

pub use channel::{apply_awgn, apply_bsc, noise_sigma_for_ebn0, AwgnSpec, BscSpec};
pub use demodulation::{
    correlate_bit, demod_ask, demod_bpsk, demod_fsk, demodulate, DecisionTrace, Demodulated,
};
pub use error::{Error, Result};
pub use metrics::{bit_error_rate, q_function, snr_from_powers, theoretical_ber, BerResult, Snr};
pub use modulation::{modulate, modulate_ask, modulate_bpsk, modulate_fsk, Scheme};
pub use signal::{
    db_to_ratio, generate_bits, mean_power, ratio_to_db, BitStream, ModemConfig, RandomSource,
    Waveform,
};
pub use sweep::{run_sweep, SweepNoise, SweepPoint, SweepRequest};
