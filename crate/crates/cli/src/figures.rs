//! One-shot regeneration of the waveform and BER figure set.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use keysim_core::{
    apply_bsc, bit_error_rate, demodulate, generate_bits, io, modulate, run_sweep, BitStream,
    BscSpec, ModemConfig, RandomSource, Scheme, SweepNoise, SweepRequest, Waveform,
};

use crate::plot::{self, BerSeries, Panel, PlotKind, PlotSpec, Trace};
use crate::{theory_curve, write_file};

/// Message used for the single-scheme modulation/demodulation figures.
pub const REFERENCE_BITS: &str = "1011010";
/// Bit-flip probabilities of the error-rate figure pairs, with the figure
/// numbers of their bit-pattern and BER plots.
pub const ERROR_RATE_FIGURES: [(f64, u32, u32); 4] = [(0.0, 6, 7), (0.2, 8, 9), (0.4, 10, 11), (0.6, 12, 13)];
const PATTERN_BITS: usize = 16;

fn bits_panel(bits: &BitStream, cfg: &ModemConfig, highlight: &[usize]) -> Panel {
    let t = cfg.bit_duration_sec();
    Panel {
        times: (0..bits.len()).map(|k| k as f64 * t).collect(),
        values: bits.iter().map(f64::from).collect(),
        trace: Trace::Step,
        highlights: highlight.iter().map(|&k| (k as f64 * t, (k + 1) as f64 * t)).collect(),
    }
}

fn wave_panel(w: &Waveform) -> Panel {
    Panel {
        times: (0..w.len()).map(|i| w.time_of(i)).collect(),
        values: w.samples().to_vec(),
        trace: Trace::Line,
        highlights: vec![],
    }
}

fn stack(title: String, labels: &[&str], panels: &[Panel]) -> Result<String> {
    let spec = PlotSpec {
        kind: PlotKind::WaveformStack,
        title,
        labels: labels.iter().map(|s| s.to_string()).collect(),
        log_y: false,
    };
    plot::waveform_stack(&spec, panels)
}

fn label(scheme: Scheme) -> String {
    scheme.as_str().to_uppercase()
}

/// Writes every figure and its data into `dir`; returns the paths written.
pub fn write_all(dir: &Path, seed: u64, bits_per_point: usize, grid: &[f64]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let cfg = ModemConfig::default();
    let mut written = Vec::new();
    let mut put = |name: String, contents: String| -> Result<()> {
        let path = dir.join(name);
        write_file(&path, &contents)?;
        written.push(path);
        Ok(())
    };

    // Modulation and demodulation of the reference stream, one scheme per figure.
    let reference: BitStream = REFERENCE_BITS.parse()?;
    for (fig, scheme) in [(3, Scheme::Ask), (4, Scheme::Fsk), (5, Scheme::Bpsk)] {
        let w = modulate(scheme, &reference, &cfg)?;
        let recovered = demodulate(scheme, &w, &cfg)?;
        let name = scheme.as_str();
        put(format!("fig{fig:02}_{name}_modulated.csv"), io::waveform_csv(&w))?;
        put(format!("fig{fig:02}_{name}_trace.csv"), io::trace_csv(&recovered.traces))?;
        let svg = stack(
            format!("{} modulation and demodulation of {}", label(scheme), reference),
            &["message", &format!("{} modulated", label(scheme)), &format!("demodulated: {}", recovered.bits)],
            &[
                bits_panel(&reference, &cfg, &[]),
                wave_panel(&w),
                bits_panel(&recovered.bits, &cfg, &[]),
            ],
        )?;
        put(format!("fig{fig:02}_{name}.svg"), svg)?;
    }

    let message = generate_bits(PATTERN_BITS, &mut RandomSource::derived(seed, 100));
    for (i, &(p, pattern_fig, ber_fig)) in ERROR_RATE_FIGURES.iter().enumerate() {
        // Bit pattern before and after the bit-flip channel, and its modulations.
        let mut rng = RandomSource::derived(seed, 200 + i as u64);
        let sent = apply_bsc(&message, BscSpec::new(p)?, &mut rng);
        let flipped = bit_error_rate(&message, &sent)?.error_positions;
        let mut panels = vec![bits_panel(&message, &cfg, &[]), bits_panel(&sent, &cfg, &flipped)];
        let mut labels = vec![
            "input bit stream".to_string(),
            format!("after error rate {p}: flipped bits {flipped:?}"),
        ];
        for scheme in Scheme::ALL {
            panels.push(wave_panel(&modulate(scheme, &sent, &cfg)?));
            labels.push(format!("{} modulated", label(scheme)));
        }
        let labels: Vec<&str> = labels.iter().map(String::as_str).collect();
        let svg = stack(format!("Input and modulated bit pattern, error rate {p}"), &labels, &panels)?;
        put(format!("fig{pattern_fig:02}_bits_p{p}.svg"), svg)?;

        // BER waterfall for all three schemes.
        let mut rows = Vec::new();
        let mut series = Vec::new();
        for scheme in Scheme::ALL {
            let points = run_sweep(&SweepRequest {
                scheme,
                ebn0_grid_db: grid.to_vec(),
                error_rate: p,
                bits_per_point,
                config: cfg,
                seed,
                noise: SweepNoise::EbN0,
            })?;
            series.push(BerSeries { theory: Some(theory_curve(&points)), points: points.clone() });
            rows.extend(points);
        }
        put(format!("fig{ber_fig:02}_ber_p{p}.csv"), io::sweep_csv(&rows))?;
        let spec = PlotSpec {
            kind: PlotKind::BerWaterfall,
            title: format!("BER vs. Eb/N0, error rate {p} (dashed: closed form)"),
            labels: Scheme::ALL.iter().map(|&s| label(s)).collect(),
            log_y: true,
        };
        put(format!("fig{ber_fig:02}_ber_p{p}.svg"), plot::ber_waterfall(&spec, &series)?)?;
    }
    Ok(written)
}
