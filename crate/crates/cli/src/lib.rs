//! `keysim` command-line front end.
//!
//! Exit codes: 0 on success, 2 on usage errors, 1 on runtime errors. All
//! diagnostics go to the error stream; given the same arguments and `--seed`
//! every output file is byte-identical between runs.

pub mod figures;
pub mod plot;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use keysim_core::{
    apply_awgn, apply_bsc, demodulate, io, metrics, modulate, run_sweep, AwgnSpec, BitStream,
    BscSpec, ModemConfig, RandomSource, Scheme, SweepNoise, SweepRequest, Waveform,
};

use crate::plot::{BerSeries, Panel, PlotKind, PlotSpec, Trace};

/// Environment variable naming the default output directory of `figures`.
pub const OUT_DIR_ENV: &str = "KEYSIM_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "keysim", version, about = "ASK/FSK/BPSK modem and BER simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Modulate a bit stream into a waveform CSV.
    Modulate(ModulateArgs),
    /// Recover bits from a waveform CSV with a coherent receiver.
    Demodulate(DemodulateArgs),
    /// Impair a waveform (AWGN) or a bit stream (bit flips).
    #[command(subcommand)]
    Channel(ChannelCommand),
    /// Monte Carlo BER sweep over an Eb/N0 grid.
    Sweep(SweepArgs),
    /// Render waveform or sweep CSVs as SVG.
    Plot(PlotArgs),
    /// Regenerate the full figure set (waveforms and BER curves) into a directory.
    Figures(FiguresArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SchemeArg {
    Ask,
    Fsk,
    Bpsk,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Ask => Scheme::Ask,
            SchemeArg::Fsk => Scheme::Fsk,
            SchemeArg::Bpsk => Scheme::Bpsk,
        }
    }
}

#[derive(Debug, Clone, Args)]
struct ModemArgs {
    /// Carrier amplitude A.
    #[arg(long, default_value_t = 1.0)]
    amplitude: f64,
    /// ASK/BPSK carrier frequency in Hz.
    #[arg(long, default_value_t = 4.0)]
    fc: f64,
    /// FSK mark frequency (bit 1) in Hz.
    #[arg(long, default_value_t = 5.0)]
    f1: f64,
    /// FSK space frequency (bit 0) in Hz.
    #[arg(long, default_value_t = 1.0)]
    f2: f64,
    /// FSK mark phase in radians.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    theta1: f64,
    /// FSK space phase in radians.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    theta2: f64,
    /// Bits per second.
    #[arg(long, default_value_t = 1.0)]
    bit_rate: f64,
    /// Samples per bit.
    #[arg(long, default_value_t = 64)]
    spb: usize,
}

impl ModemArgs {
    fn config(&self) -> ModemConfig {
        ModemConfig {
            amplitude: self.amplitude,
            carrier_hz: self.fc,
            mark_hz: self.f1,
            space_hz: self.f2,
            mark_phase_rad: self.theta1,
            space_phase_rad: self.theta2,
            bit_rate_hz: self.bit_rate,
            samples_per_bit: self.spb,
        }
    }
}

#[derive(Debug, Clone, Args)]
#[group(id = "source", required = true, multiple = false)]
struct BitSource {
    /// Inline bit string, e.g. 1011010.
    #[arg(long, group = "source")]
    bits: Option<String>,
    /// File of ASCII 0/1 characters.
    #[arg(long, group = "source")]
    bits_file: Option<PathBuf>,
    /// Generate this many random bits from --seed.
    #[arg(long, group = "source")]
    random: Option<usize>,
}

impl BitSource {
    fn load(&self, seed: u64) -> Result<BitStream> {
        if let Some(s) = &self.bits {
            return Ok(s.parse::<BitStream>()?);
        }
        if let Some(path) = &self.bits_file {
            let file = fs::File::open(path).with_context(|| format!("reading {}", path.display()))?;
            return Ok(io::read_bits(file)?);
        }
        let n = self.random.unwrap_or(0);
        Ok(keysim_core::generate_bits(n, &mut RandomSource::new(seed)))
    }
}

#[derive(Debug, Args)]
struct ModulateArgs {
    #[arg(long, value_enum)]
    scheme: SchemeArg,
    #[command(flatten)]
    source: BitSource,
    #[command(flatten)]
    modem: ModemArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output waveform CSV (stdout when omitted).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DemodulateArgs {
    #[arg(long, value_enum)]
    scheme: SchemeArg,
    /// Waveform CSV to demodulate.
    #[arg(short, long)]
    input: PathBuf,
    #[command(flatten)]
    modem: ModemArgs,
    /// Also write the recovered bits to this file.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Write per-bit decision statistics as CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum ChannelCommand {
    /// Add white Gaussian noise to a waveform CSV.
    Awgn(AwgnArgs),
    /// Flip bits independently with a fixed probability.
    Bsc(BscArgs),
}

#[derive(Debug, Args)]
#[group(id = "level", required = true, multiple = false)]
struct NoiseLevel {
    /// Target Eb/N0 in dB (noise set from the measured signal power).
    #[arg(long, group = "level", allow_hyphen_values = true)]
    ebn0: Option<f64>,
    /// Explicit per-sample noise standard deviation.
    #[arg(long, group = "level")]
    sigma: Option<f64>,
}

#[derive(Debug, Args)]
struct AwgnArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[command(flatten)]
    level: NoiseLevel,
    #[command(flatten)]
    modem: ModemArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BscArgs {
    #[command(flatten)]
    source: BitSource,
    /// Flip probability in [0, 1].
    #[arg(long)]
    error_rate: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Comma-separated schemes.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "ask,fsk,bpsk")]
    schemes: Vec<SchemeArg>,
    /// Eb/N0 grid as start:step:stop in dB (stop included when reachable), or a single value.
    #[arg(long, default_value = "0:1:10", allow_hyphen_values = true)]
    ebn0: String,
    /// Bit-flip probability applied to the message before modulation.
    #[arg(long, default_value_t = 0.0)]
    error_rate: f64,
    /// Bits simulated per grid point.
    #[arg(long, default_value_t = 100_000)]
    bits: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Disable the AWGN channel (grid values only label the points).
    #[arg(long)]
    noiseless: bool,
    #[command(flatten)]
    modem: ModemArgs,
    /// Output sweep CSV (stdout when omitted).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PlotKindArg {
    /// Stacked waveform panels, one per input CSV.
    Waveform,
    /// BER waterfall from sweep CSVs.
    Ber,
}

#[derive(Debug, Args)]
struct PlotArgs {
    #[arg(long, value_enum)]
    kind: PlotKindArg,
    /// Input CSV files (waveform or sweep, matching --kind).
    #[arg(short, long = "input", required = true, num_args = 1..)]
    inputs: Vec<PathBuf>,
    /// Panel labels for waveform plots (defaults to file stems).
    #[arg(long, value_delimiter = ',')]
    labels: Vec<String>,
    #[arg(long)]
    title: Option<String>,
    /// Overlay closed-form BER curves on waterfalls.
    #[arg(long)]
    theory: bool,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct FiguresArgs {
    /// Output directory (default: $KEYSIM_OUT_DIR, else ./figures).
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Bits per sweep point.
    #[arg(long, default_value_t = 20_000)]
    bits: usize,
    #[arg(long, default_value = "0:1:10", allow_hyphen_values = true)]
    ebn0: String,
}

/// Parses `start:step:stop` (inclusive of `stop` when reachable) or a single value.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').map(str::trim).collect();
    let num = |s: &str| -> Result<f64> {
        let v: f64 = s.parse().with_context(|| format!("bad number {s:?} in grid {spec:?}"))?;
        if !v.is_finite() {
            bail!("non-finite value in grid {spec:?}");
        }
        Ok(v)
    };
    match parts.as_slice() {
        [single] => Ok(vec![num(single)?]),
        [start, step, stop] => {
            let (start, step, stop) = (num(start)?, num(step)?, num(stop)?);
            if step <= 0.0 {
                bail!("grid step must be positive in {spec:?}");
            }
            if start > stop {
                bail!("grid start exceeds stop in {spec:?}");
            }
            let n = ((stop - start) / step + 1e-9).floor() as usize;
            if n > 100_000 {
                bail!("grid {spec:?} has too many points");
            }
            // Round away accumulated binary error so 0.1 steps print as 0.3, not 0.30000000000000004.
            Ok((0..=n)
                .map(|k| ((start + k as f64 * step) * 1e9).round() / 1e9)
                .collect())
        }
        _ => bail!("grid must be start:step:stop or a single value, got {spec:?}"),
    }
}

fn emit(out: &mut dyn Write, path: Option<&Path>, contents: &str) -> Result<()> {
    match path {
        Some(p) => write_file(p, contents),
        None => {
            out.write_all(contents.as_bytes())?;
            Ok(())
        }
    }
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn read_waveform(path: &Path) -> Result<Waveform> {
    let file = fs::File::open(path).with_context(|| format!("reading {}", path.display()))?;
    io::read_waveform(file).with_context(|| format!("parsing {}", path.display()))
}

/// Runs the CLI with `args` (including the program name), writing normal
/// output to `out` and diagnostics to `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                let _ = err.write_all(rendered.as_bytes());
                2
            } else {
                let _ = out.write_all(rendered.as_bytes());
                0
            };
        }
    };
    match execute(cli.command, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            1
        }
    }
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    match command {
        Command::Modulate(a) => {
            let bits = a.source.load(a.seed)?;
            let w = modulate(a.scheme.into(), &bits, &a.modem.config())?;
            emit(out, a.output.as_deref(), &io::waveform_csv(&w))
        }
        Command::Demodulate(a) => {
            let w = read_waveform(&a.input)?;
            let result = demodulate(a.scheme.into(), &w, &a.modem.config())?;
            writeln!(out, "{}", result.bits)?;
            if let Some(path) = &a.output {
                write_file(path, &format!("{}\n", result.bits))?;
            }
            if let Some(path) = &a.trace {
                write_file(path, &io::trace_csv(&result.traces))?;
            }
            Ok(())
        }
        Command::Channel(ChannelCommand::Awgn(a)) => {
            let w = read_waveform(&a.input)?;
            let spec = match (a.level.ebn0, a.level.sigma) {
                (Some(db), _) => AwgnSpec::EbN0Db(db),
                (None, Some(s)) => AwgnSpec::Sigma(s),
                (None, None) => unreachable!("clap enforces one noise level"),
            };
            let noisy = apply_awgn(&w, spec, &a.modem.config(), &mut RandomSource::new(a.seed))?;
            emit(out, a.output.as_deref(), &io::waveform_csv(&noisy))
        }
        Command::Channel(ChannelCommand::Bsc(a)) => {
            let bits = a.source.load(a.seed)?;
            // Flips use a stream separate from random message generation.
            let mut rng = RandomSource::derived(a.seed, 1);
            let flipped = apply_bsc(&bits, BscSpec::new(a.error_rate)?, &mut rng);
            let positions = metrics::bit_error_rate(&bits, &flipped)
                .map(|r| r.error_positions)
                .unwrap_or_default();
            writeln!(err, "flipped {} of {} bits", positions.len(), bits.len())?;
            emit(out, a.output.as_deref(), &format!("{flipped}\n"))
        }
        Command::Sweep(a) => {
            let grid = parse_grid(&a.ebn0)?;
            let mut rows = Vec::new();
            for scheme in &a.schemes {
                let req = SweepRequest {
                    scheme: (*scheme).into(),
                    ebn0_grid_db: grid.clone(),
                    error_rate: a.error_rate,
                    bits_per_point: a.bits,
                    config: a.modem.config(),
                    seed: a.seed,
                    noise: if a.noiseless { SweepNoise::Disabled } else { SweepNoise::EbN0 },
                };
                rows.extend(run_sweep(&req)?);
            }
            emit(out, a.output.as_deref(), &io::sweep_csv(&rows))
        }
        Command::Plot(a) => plot_command(&a),
        Command::Figures(a) => {
            let dir = a
                .out_dir
                .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("figures"));
            let written = figures::write_all(&dir, a.seed, a.bits, &parse_grid(&a.ebn0)?)?;
            for path in written {
                writeln!(err, "wrote {}", path.display())?;
            }
            Ok(())
        }
    }
}

fn plot_command(a: &PlotArgs) -> Result<()> {
    let stem = |p: &PathBuf| {
        p.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    };
    let svg = match a.kind {
        PlotKindArg::Waveform => {
            let mut panels = Vec::new();
            for path in &a.inputs {
                let w = read_waveform(path)?;
                panels.push(Panel {
                    times: (0..w.len()).map(|i| w.time_of(i)).collect(),
                    values: w.into_samples(),
                    trace: Trace::Line,
                    highlights: vec![],
                });
            }
            let labels = if a.labels.is_empty() {
                a.inputs.iter().map(stem).collect()
            } else {
                a.labels.clone()
            };
            let spec = PlotSpec {
                kind: PlotKind::WaveformStack,
                title: a.title.clone().unwrap_or_else(|| "Waveforms".into()),
                labels,
                log_y: false,
            };
            plot::waveform_stack(&spec, &panels)?
        }
        PlotKindArg::Ber => {
            let mut points = Vec::new();
            for path in &a.inputs {
                let file = fs::File::open(path).with_context(|| format!("reading {}", path.display()))?;
                points.extend(io::read_sweep(file).with_context(|| format!("parsing {}", path.display()))?);
            }
            let groups = plot::group_series(&points);
            let labels = groups.iter().map(|(l, _)| l.clone()).collect();
            let series = groups
                .into_iter()
                .map(|(_, pts)| {
                    let theory = a.theory.then(|| theory_curve(&pts));
                    BerSeries { points: pts, theory }
                })
                .collect::<Vec<_>>();
            let spec = PlotSpec {
                kind: PlotKind::BerWaterfall,
                title: a.title.clone().unwrap_or_else(|| "BER vs. Eb/N0".into()),
                labels,
                log_y: true,
            };
            plot::ber_waterfall(&spec, &series)?
        }
    };
    write_file(&a.output, &svg)
}

/// Closed-form curve over the span of `points`, sampled every 0.1 dB.
pub(crate) fn theory_curve(points: &[keysim_core::SweepPoint]) -> Vec<(f64, f64)> {
    let Some(first) = points.first() else { return vec![] };
    let lo = points.iter().map(|p| p.ebn0_db).fold(f64::INFINITY, f64::min);
    let hi = points.iter().map(|p| p.ebn0_db).fold(f64::NEG_INFINITY, f64::max);
    let steps = ((hi - lo) / 0.1).round() as usize;
    (0..=steps)
        .map(|i| {
            let x = lo + i as f64 * 0.1;
            let y = keysim_core::theoretical_ber(first.scheme, x, first.error_rate).unwrap_or(f64::NAN);
            (x, y)
        })
        .filter(|(_, y)| y.is_finite() && *y > 0.0)
        .collect()
}
