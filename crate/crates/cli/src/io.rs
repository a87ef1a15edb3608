//! Line-oriented trace files.
//!
//! Line 1 is a header of space-separated `key=value` fields:
//! `format=wicross-trace/1 sample_rate_hz=... carrier_hz=...
//! num_antennas=... tx_pos=x,y rx_pos=x,y rx_antenna_offsets=x,y;x,y;...
//! meta=k:v,k:v`. Every following line is one frame: the timestamp, the
//! AGC value, then a re/im pair per antenna, all space-separated. Floats
//! are printed with the shortest representation that parses back to the
//! same 64-bit value, so a round-trip is lossless.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use wicross_core::{CsiFrame, CsiTrace, Geometry, Vec2};

use crate::error::{CliError, Result};

pub const TRACE_FORMAT: &str = "wicross-trace/1";

fn check_meta_token(s: &str, what: &str) -> Result<()> {
    if s.is_empty()
        || s.chars()
            .any(|c| c.is_whitespace() || c == ',' || c == ':' || c == ';' || c == '=')
    {
        return Err(CliError::Invalid(format!(
            "meta {what} {s:?} must be non-empty and free of whitespace and ',:;=' characters"
        )));
    }
    Ok(())
}

fn fmt_point(p: Vec2) -> String {
    format!("{},{}", p.x, p.y)
}

/// Serialize a trace. The trace is validated first.
pub fn trace_to_string(trace: &CsiTrace) -> Result<String> {
    trace.validate()?;
    for (k, v) in &trace.meta {
        check_meta_token(k, "key")?;
        check_meta_token(v, "value")?;
    }
    let offsets = trace
        .geometry
        .rx_antenna_offsets
        .iter()
        .map(|&o| fmt_point(o))
        .collect::<Vec<_>>()
        .join(";");
    let meta = trace
        .meta
        .iter()
        .map(|(k, v)| format!("{k}:{v}"))
        .collect::<Vec<_>>()
        .join(",");
    let mut out = String::new();
    out.push_str(&format!(
        "format={TRACE_FORMAT} sample_rate_hz={} carrier_hz={} num_antennas={} tx_pos={} rx_pos={} rx_antenna_offsets={} meta={}\n",
        trace.sample_rate_hz,
        trace.geometry.carrier_hz,
        trace.num_antennas(),
        fmt_point(trace.geometry.tx_pos),
        fmt_point(trace.geometry.rx_pos),
        offsets,
        meta,
    ));
    for frame in &trace.frames {
        out.push_str(&format!("{} {}", frame.t, frame.agc));
        for s in &frame.samples {
            out.push_str(&format!(" {} {}", s.re, s.im));
        }
        out.push('\n');
    }
    Ok(out)
}

fn parse_f64(s: &str, line: usize, what: &str) -> Result<f64> {
    s.parse::<f64>()
        .map_err(|_| CliError::parse(line, format!("bad {what}: {s:?}")))
}

fn parse_point(s: &str, line: usize, what: &str) -> Result<Vec2> {
    let (x, y) = s
        .split_once(',')
        .ok_or_else(|| CliError::parse(line, format!("bad {what}: expected x,y got {s:?}")))?;
    Ok(Vec2::new(
        parse_f64(x, line, what)?,
        parse_f64(y, line, what)?,
    ))
}

/// Parse a trace file body.
pub fn trace_from_str(text: &str) -> Result<CsiTrace> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| CliError::parse(1, "empty file"))?;

    let mut fields: BTreeMap<&str, &str> = BTreeMap::new();
    for tok in header.split_whitespace() {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| CliError::parse(1, format!("bad header field {tok:?}")))?;
        fields.insert(k, v);
    }
    let get = |k: &str| -> Result<&str> {
        fields
            .get(k)
            .copied()
            .ok_or_else(|| CliError::parse(1, format!("missing header field {k:?}")))
    };

    let format = get("format")?;
    if format != TRACE_FORMAT {
        return Err(CliError::parse(1, format!("unsupported format {format:?}")));
    }
    let sample_rate_hz = parse_f64(get("sample_rate_hz")?, 1, "sample_rate_hz")?;
    let carrier_hz = parse_f64(get("carrier_hz")?, 1, "carrier_hz")?;
    let num_antennas: usize = get("num_antennas")?
        .parse()
        .map_err(|_| CliError::parse(1, "bad num_antennas"))?;
    let tx_pos = parse_point(get("tx_pos")?, 1, "tx_pos")?;
    let rx_pos = parse_point(get("rx_pos")?, 1, "rx_pos")?;
    let offsets_str = get("rx_antenna_offsets")?;
    let rx_antenna_offsets = offsets_str
        .split(';')
        .map(|s| parse_point(s, 1, "rx_antenna_offsets"))
        .collect::<Result<Vec<_>>>()?;
    if rx_antenna_offsets.len() != num_antennas {
        return Err(CliError::parse(
            1,
            format!(
                "num_antennas={} but {} antenna offsets listed",
                num_antennas,
                rx_antenna_offsets.len()
            ),
        ));
    }
    let mut meta = BTreeMap::new();
    let meta_str = get("meta")?;
    if !meta_str.is_empty() {
        for pair in meta_str.split(',') {
            let (k, v) = pair
                .split_once(':')
                .ok_or_else(|| CliError::parse(1, format!("bad meta entry {pair:?}")))?;
            meta.insert(k.to_string(), v.to_string());
        }
    }

    let geometry = Geometry::new(tx_pos, rx_pos, rx_antenna_offsets, carrier_hz)
        .map_err(|e| CliError::parse(1, e.to_string()))?;

    let mut frames = Vec::new();
    let mut prev_t: Option<f64> = None;
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let expected = 2 + 2 * num_antennas;
        if tokens.len() != expected {
            return Err(CliError::parse(
                lineno,
                format!(
                    "expected {expected} fields ({} antennas), got {}",
                    num_antennas,
                    tokens.len()
                ),
            ));
        }
        let t = parse_f64(tokens[0], lineno, "timestamp")?;
        let agc = parse_f64(tokens[1], lineno, "agc")?;
        if let Some(p) = prev_t {
            if t <= p {
                return Err(CliError::parse(
                    lineno,
                    format!("non-monotonic timestamp {t} after {p}"),
                ));
            }
        }
        prev_t = Some(t);
        let mut samples = Vec::with_capacity(num_antennas);
        for k in 0..num_antennas {
            let re = parse_f64(tokens[2 + 2 * k], lineno, "sample re")?;
            let im = parse_f64(tokens[3 + 2 * k], lineno, "sample im")?;
            if !re.is_finite() || !im.is_finite() {
                return Err(CliError::parse(lineno, "non-finite sample"));
            }
            samples.push(Complex64::new(re, im));
        }
        frames.push(CsiFrame { t, agc, samples });
    }

    let trace = CsiTrace { geometry, sample_rate_hz, frames, meta };
    trace
        .validate()
        .map_err(|e| CliError::parse(1, format!("inconsistent trace: {e}")))?;
    Ok(trace)
}

pub fn write_trace(trace: &CsiTrace, path: impl AsRef<Path>) -> Result<()> {
    let text = trace_to_string(trace)?;
    fs::write(path, text)?;
    Ok(())
}

pub fn read_trace(path: impl AsRef<Path>) -> Result<CsiTrace> {
    let text = fs::read_to_string(path)?;
    trace_from_str(&text)
}
