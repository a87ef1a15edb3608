//! Plain-text numeric tables for plotting tools.

use std::collections::BTreeMap;
use std::str::FromStr;

use wicross_core::{detect, CsiTrace, DetectParams};

use crate::error::{CliError, Result};
use crate::eval::parse_log_line;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    PhaseSum,
    Agc,
    Extrema,
    AccuracyByCondition,
}

impl FromStr for PlotKind {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "phase_sum" => Ok(PlotKind::PhaseSum),
            "agc" => Ok(PlotKind::Agc),
            "extrema" => Ok(PlotKind::Extrema),
            "accuracy_by_condition" => Ok(PlotKind::AccuracyByCondition),
            other => Err(CliError::Invalid(format!(
                "unknown series {other:?}; expected phase_sum, agc, extrema or accuracy_by_condition"
            ))),
        }
    }
}

/// Cumulative-phase series of every activity window in a trace.
pub fn export_phase_sum(trace: &CsiTrace, params: &DetectParams) -> Result<String> {
    let detections = detect(trace, params)?;
    let mut out = String::from("# columns: segment sample phase_sum_rad\n");
    for (si, d) in detections.iter().enumerate() {
        for (i, v) in d.pattern.phase_sum.iter().enumerate() {
            out.push_str(&format!("{si} {i} {v}\n"));
        }
    }
    Ok(out)
}

/// Per-frame gain-indicator series.
pub fn export_agc(trace: &CsiTrace) -> String {
    let mut out = String::from("# columns: t_s agc_db\n");
    for f in &trace.frames {
        out.push_str(&format!("{} {}\n", f.t, f.agc));
    }
    out
}

/// Extrema of every activity window: one row per maximum or minimum.
pub fn export_extrema(trace: &CsiTrace, params: &DetectParams) -> Result<String> {
    let detections = detect(trace, params)?;
    let mut out = String::from("# columns: segment index value kind\n");
    for (si, d) in detections.iter().enumerate() {
        let mut rows: Vec<(usize, f64, &str)> = d
            .pattern
            .maxima
            .iter()
            .map(|&(i, v)| (i, v, "max"))
            .chain(d.pattern.minima.iter().map(|&(i, v)| (i, v, "min")))
            .collect();
        rows.sort_by_key(|&(i, _, _)| i);
        for (i, v, kind) in rows {
            out.push_str(&format!("{si} {i} {v} {kind}\n"));
        }
    }
    Ok(out)
}

const CONDITION_KEYS: &[(&str, &str)] = &[
    ("distance", "los"),
    ("offset", "offset_frac"),
    ("angle", "angle"),
    ("body_len", "body_len"),
    ("nearest", "nearest"),
    ("standoff", "standoff"),
];

/// Accuracy table grouped by one trial condition, recomputed from a
/// per-trial detection log.
pub fn export_accuracy_by_condition(log_text: &str, condition: &str) -> Result<String> {
    let key = CONDITION_KEYS
        .iter()
        .find(|(name, _)| *name == condition)
        .map(|(_, key)| *key)
        .ok_or_else(|| {
            CliError::Invalid(format!(
                "unknown condition {condition:?}; expected one of {}",
                CONDITION_KEYS
                    .iter()
                    .map(|(n, _)| *n)
                    .collect::<Vec<_>>()
                    .join(", ")
            ))
        })?;

    let mut groups: BTreeMap<u64, (f64, usize, usize, usize, usize)> = BTreeMap::new();
    for (idx, line) in log_text.lines().enumerate() {
        let Some(fields) = parse_log_line(line) else {
            continue;
        };
        let Some(raw) = fields.get(key) else {
            return Err(CliError::parse(idx + 1, format!("log line missing field {key:?}")));
        };
        if raw == "-" {
            continue; // condition not applicable to this trial kind
        }
        let value: f64 = raw
            .parse()
            .map_err(|_| CliError::parse(idx + 1, format!("bad {key} value {raw:?}")))?;
        let correct = fields.get("correct").map(|s| s == "true").ok_or_else(|| {
            CliError::parse(idx + 1, "log line missing field \"correct\"")
        })?;
        let expected = fields.get("expected").map(|s| s == "true").ok_or_else(|| {
            CliError::parse(idx + 1, "log line missing field \"expected\"")
        })?;
        let predicted = fields.get("predicted").map(|s| s == "true").ok_or_else(|| {
            CliError::parse(idx + 1, "log line missing field \"predicted\"")
        })?;
        let entry = groups.entry(value.to_bits()).or_insert((value, 0, 0, 0, 0));
        entry.1 += 1;
        if correct {
            entry.2 += 1;
        }
        if !expected {
            entry.3 += 1;
            if predicted {
                entry.4 += 1;
            }
        }
    }
    if groups.is_empty() {
        return Err(CliError::Invalid(format!(
            "no trials in the log carry condition {condition:?}"
        )));
    }

    let mut rows: Vec<_> = groups.into_values().collect();
    rows.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut out = format!("# columns: {condition} trials accuracy false_alarm_rate\n");
    for (value, n, correct, negatives, fp) in rows {
        let accuracy = correct as f64 / n as f64;
        let fa = if negatives > 0 {
            fp as f64 / negatives as f64
        } else {
            0.0
        };
        out.push_str(&format!("{value} {n} {accuracy:.6} {fa:.6}\n"));
    }
    Ok(out)
}
