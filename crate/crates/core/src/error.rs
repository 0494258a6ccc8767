use thiserror::Error;

/// Errors raised by the modem library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty signal")]
    EmptySignal,
    #[error("empty bit stream")]
    EmptyStream,
    #[error("non-positive ratio: {0}")]
    NonPositiveRatio(f64),
    #[error("invalid bit symbol {0:?} (expected '0' or '1')")]
    InvalidBit(char),
    #[error("non-finite sample at index {0}")]
    NonFiniteSample(usize),
    #[error("invalid modem configuration: {0}")]
    InvalidConfig(String),
    #[error("undersampled carrier: {freq_hz} Hz needs at least {required:.1} samples per bit, got {samples_per_bit}")]
    UndersampledCarrier {
        freq_hz: f64,
        samples_per_bit: usize,
        required: f64,
    },
    #[error("degenerate FSK pair: f1 = f2 = {0} Hz")]
    DegenerateFskPair(f64),
    #[error("sample rate mismatch: waveform has {waveform_hz} Hz, configuration implies {config_hz} Hz")]
    SampleRateMismatch { waveform_hz: f64, config_hz: f64 },
    #[error("no signal energy")]
    NoSignalEnergy,
    #[error("streams differ in length ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("length not bit-aligned: {len} samples is not a multiple of {samples_per_bit}")]
    NotBitAligned { len: usize, samples_per_bit: usize },
    #[error("probability out of range [0, 1]: {0}")]
    InvalidProbability(f64),
    #[error("invalid noise level: {0}")]
    InvalidNoise(f64),
    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
    #[error("malformed {kind} file: {msg}")]
    Format { kind: &'static str, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
