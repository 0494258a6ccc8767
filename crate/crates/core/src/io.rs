//! File formats: bit files, waveform CSV, sweep CSV and decision-trace CSV.
//!
//! Writers emit floats with Rust's shortest round-trip formatting, so a file
//! read back yields the exact same values and reruns are byte-identical.

use std::fmt::Write as _;
use std::io::{Read, Write};

use crate::demodulation::DecisionTrace;
use crate::error::{Error, Result};
use crate::modulation::Scheme;
use crate::signal::{BitStream, Waveform};
use crate::sweep::SweepPoint;

pub const WAVEFORM_HEADER: &str = "t_sec,amplitude";
pub const SWEEP_HEADER: &str = "scheme,ebn0_db,error_rate_p,bits_sent,bit_errors,ber,ci_low,ci_high";
pub const TRACE_HEADER: &str = "bit_index,stat1,stat2,threshold,decision";

fn format_err(kind: &'static str, msg: impl Into<String>) -> Error {
    Error::Format { kind, msg: msg.into() }
}

/// Bits as ASCII `0`/`1` followed by a newline.
pub fn write_bits<W: Write>(mut out: W, bits: &BitStream) -> Result<()> {
    writeln!(out, "{bits}")?;
    Ok(())
}

/// Reads ASCII `0`/`1`; one trailing newline (LF or CRLF) is allowed.
pub fn read_bits<R: Read>(mut input: R) -> Result<BitStream> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let body = text
        .strip_suffix("\r\n")
        .or_else(|| text.strip_suffix('\n'))
        .unwrap_or(&text);
    body.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(Error::InvalidBit(other)),
        })
        .collect::<Result<Vec<_>>>()
        .map(BitStream::from_bools)
}

pub fn waveform_csv(w: &Waveform) -> String {
    let mut s = String::with_capacity(24 * (w.len() + 1));
    s.push_str(WAVEFORM_HEADER);
    s.push('\n');
    for (i, x) in w.samples().iter().enumerate() {
        let _ = writeln!(s, "{},{}", w.time_of(i), x);
    }
    s
}

pub fn write_waveform<W: Write>(mut out: W, w: &Waveform) -> Result<()> {
    out.write_all(waveform_csv(w).as_bytes())?;
    Ok(())
}

/// Reads a waveform CSV, inferring the sample rate from the time column.
pub fn read_waveform<R: Read>(input: R) -> Result<Waveform> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    check_header(&mut reader, WAVEFORM_HEADER, "waveform")?;
    let mut times = Vec::new();
    let mut samples = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != 2 {
            return Err(format_err("waveform", format!("row {} has {} fields", row + 1, record.len())));
        }
        times.push(parse_f64(&record[0], "waveform", row)?);
        samples.push(parse_f64(&record[1], "waveform", row)?);
    }
    if times.len() < 2 {
        return Err(format_err("waveform", "at least two samples are needed to infer the sample rate"));
    }
    let span = times[times.len() - 1] - times[0];
    if !(span > 0.0) {
        return Err(format_err("waveform", "time column must increase"));
    }
    let sample_rate_hz = (times.len() - 1) as f64 / span;
    let dt = 1.0 / sample_rate_hz;
    for (i, t) in times.iter().enumerate() {
        if (t - times[0] - i as f64 * dt).abs() > 1e-6 * dt {
            return Err(format_err("waveform", format!("non-uniform time step at row {}", i + 1)));
        }
    }
    Waveform::new(sample_rate_hz, samples)
}

pub fn sweep_csv(points: &[SweepPoint]) -> String {
    let mut s = String::from(SWEEP_HEADER);
    s.push('\n');
    for p in points {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            p.scheme, p.ebn0_db, p.error_rate, p.bits_sent, p.bit_errors, p.ber, p.ci_low, p.ci_high
        );
    }
    s
}

pub fn write_sweep<W: Write>(mut out: W, points: &[SweepPoint]) -> Result<()> {
    out.write_all(sweep_csv(points).as_bytes())?;
    Ok(())
}

pub fn read_sweep<R: Read>(input: R) -> Result<Vec<SweepPoint>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    check_header(&mut reader, SWEEP_HEADER, "sweep")?;
    let mut points = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != 8 {
            return Err(format_err("sweep", format!("row {} has {} fields", row + 1, record.len())));
        }
        let f = |i: usize| parse_f64(&record[i], "sweep", row);
        let n = |i: usize| {
            record[i]
                .parse::<usize>()
                .map_err(|e| format_err("sweep", format!("row {}: {e}", row + 1)))
        };
        points.push(SweepPoint {
            scheme: record[0].parse::<Scheme>()?,
            ebn0_db: f(1)?,
            error_rate: f(2)?,
            bits_sent: n(3)?,
            bit_errors: n(4)?,
            ber: f(5)?,
            ci_low: f(6)?,
            ci_high: f(7)?,
        });
    }
    Ok(points)
}

pub fn trace_csv(traces: &[DecisionTrace]) -> String {
    let mut s = String::from(TRACE_HEADER);
    s.push('\n');
    for (i, t) in traces.iter().enumerate() {
        let stat2 = t.stat2.map(|v| v.to_string()).unwrap_or_default();
        let _ = writeln!(s, "{i},{},{stat2},{},{}", t.stat1, t.threshold, t.decision);
    }
    s
}

pub fn write_traces<W: Write>(mut out: W, traces: &[DecisionTrace]) -> Result<()> {
    out.write_all(trace_csv(traces).as_bytes())?;
    Ok(())
}

fn check_header<R: Read>(reader: &mut csv::Reader<R>, expected: &str, kind: &'static str) -> Result<()> {
    let header = reader.headers()?.iter().collect::<Vec<_>>().join(",");
    if header != expected {
        return Err(format_err(kind, format!("expected header `{expected}`, found `{header}`")));
    }
    Ok(())
}

fn parse_f64(field: &str, kind: &'static str, row: usize) -> Result<f64> {
    field
        .parse::<f64>()
        .map_err(|e| format_err(kind, format!("row {}: {e} ({field:?})", row + 1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demodulation::demod_fsk;
    use crate::modulation::{modulate_ask, modulate_fsk};
    use crate::signal::ModemConfig;
    use proptest::prelude::*;

    #[test]
    fn bits_file() {
        let b: BitStream = "1011010".parse().unwrap();
        let mut buf = Vec::new();
        write_bits(&mut buf, &b).unwrap();
        assert_eq!(buf, b"1011010\n");
        assert_eq!(read_bits(&buf[..]).unwrap(), b);
        assert_eq!(read_bits(&b"0110"[..]).unwrap().to_string(), "0110");
        assert_eq!(read_bits(&b"01\r\n"[..]).unwrap().to_string(), "01");
        assert!(read_bits(&b"01 1\n"[..]).is_err());
        assert!(read_bits(&b"01\n\n"[..]).is_err());
    }

    #[test]
    fn waveform_file() {
        let cfg = ModemConfig::default();
        let w = modulate_ask(&"1011010".parse().unwrap(), &cfg).unwrap();
        let text = waveform_csv(&w);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(WAVEFORM_HEADER));
        assert_eq!(lines.next(), Some("0,1"));
        assert_eq!(text.lines().count(), 7 * 64 + 1);
        let back = read_waveform(text.as_bytes()).unwrap();
        assert_eq!(back, w);
    }

    #[test]
    fn waveform_file_errors() {
        assert!(read_waveform(&b"time,amplitude\n0,1\n1,2\n"[..]).is_err());
        assert!(read_waveform(&b"t_sec,amplitude\n0,1\n"[..]).is_err());
        assert!(read_waveform(&b"t_sec,amplitude\n0,1\n1,x\n"[..]).is_err());
        assert!(read_waveform(&b"t_sec,amplitude\n0,1\n1,2\n5,3\n"[..]).is_err());
    }

    #[test]
    fn sweep_file() {
        let points = vec![SweepPoint {
            scheme: Scheme::Bpsk,
            ebn0_db: 2.5,
            error_rate: 0.2,
            bits_sent: 1000,
            bit_errors: 210,
            ber: 0.21,
            ci_low: 0.18,
            ci_high: 0.24,
        }];
        let text = sweep_csv(&points);
        assert_eq!(text, format!("{SWEEP_HEADER}\nbpsk,2.5,0.2,1000,210,0.21,0.18,0.24\n"));
        assert_eq!(read_sweep(text.as_bytes()).unwrap(), points);
        assert!(read_sweep(&b"scheme\nask\n"[..]).is_err());
    }

    #[test]
    fn trace_file() {
        let cfg = ModemConfig::default();
        let w = modulate_fsk(&"10".parse().unwrap(), &cfg).unwrap();
        let traces = demod_fsk(&w, &cfg).unwrap().traces;
        let text = trace_csv(&traces);
        let rows: Vec<&str> = text.lines().collect();
        assert_eq!(rows[0], TRACE_HEADER);
        assert_eq!(rows.len(), 3);
        assert!(rows[1].starts_with("0,32"));
        assert!(rows[1].ends_with(",0,1"));
        assert!(rows[2].ends_with(",0,0"));
    }

    proptest! {
        #[test]
        fn waveform_csv_round_trips(
            samples in prop::collection::vec(-1e3f64..1e3, 2..300),
            rate in prop::sample::select(vec![1.0, 3.0, 8.0, 64.0, 44_100.0, 96.5]),
        ) {
            let w = Waveform::new(rate, samples).unwrap();
            let back = read_waveform(waveform_csv(&w).as_bytes()).unwrap();
            prop_assert_eq!(back.samples(), w.samples());
            prop_assert!((back.sample_rate_hz() - rate).abs() < 1e-9 * rate);
        }
    }
}
