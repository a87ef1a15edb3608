//! Deterministic evaluation suites: synthesize a grid of trials, run the
//! detector, and aggregate a confusion matrix with per-condition tables.

use std::collections::BTreeMap;

use wicross_core::{
    detect, free_space_los_gain, make_crossing, make_turnback, make_walkby, synthesize_trace,
    with_margins, BehaviorLabel, DetectParams, Geometry, MotionParams, SynthConfig,
};

use crate::error::{CliError, Result};

/// Hardware deployments of this detector family report these figures;
/// the suite prints them next to its own results for comparison.
pub const REFERENCE_ACCURACY: f64 = 0.957;
pub const REFERENCE_FALSE_ALARM: f64 = 0.049;
pub const TARGET_ACCURACY: f64 = 0.95;
pub const TARGET_FALSE_ALARM: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrialKind {
    Crossing,
    TurnBack,
    WalkBy,
}

impl TrialKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            TrialKind::Crossing => "crossing",
            TrialKind::TurnBack => "turnback",
            TrialKind::WalkBy => "walkby",
        }
    }
}

/// One synthesized experiment.
#[derive(Debug, Clone)]
pub struct TrialSpec {
    pub idx: usize,
    pub kind: TrialKind,
    pub los_m: f64,
    /// Crossing point offset as a fraction of the LoS length (crossings).
    pub offset_frac: Option<f64>,
    /// Walk direction vs. the LoS normal (crossings and turn-backs).
    pub angle_rad: Option<f64>,
    pub nearest_m: Option<f64>,
    pub standoff_m: Option<f64>,
    pub body_len_m: f64,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct TrialRecord {
    pub spec: TrialSpec,
    pub segments: usize,
    pub labels: Vec<BehaviorLabel>,
    pub predicted_crossing: bool,
    pub expected_crossing: bool,
}

impl TrialRecord {
    pub fn correct(&self) -> bool {
        self.predicted_crossing == self.expected_crossing
    }
}

/// Suite parameters; `Default` mirrors the 816-trial protocol shape
/// (409 crossings, 209 turn-backs, 198 walk-bys), noiseless.
#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub master_seed: u64,
    pub carrier_hz: f64,
    pub sample_rate_hz: f64,
    pub los_distances_m: Vec<f64>,
    pub n_crossing: usize,
    pub n_turnback: usize,
    pub n_walkby: usize,
    pub offsets_frac: Vec<f64>,
    pub angles_rad: Vec<f64>,
    pub turnback_nearest_m: Vec<f64>,
    pub turnback_angles_rad: Vec<f64>,
    pub walkby_standoff_m: Vec<f64>,
    pub body_len_m: Vec<f64>,
    pub speed_mps: f64,
    pub approach_dist_m: f64,
    pub turn_duration_s: f64,
    pub lead_in_s: f64,
    pub lead_out_s: f64,
    pub e0: f64,
    pub snr_db: Option<f64>,
    pub drift_per_frame_rad: f64,
    pub prominence_rel: f64,
    pub gate_rel: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            master_seed: 42,
            carrier_hz: 5.24e9,
            sample_rate_hz: 1000.0,
            los_distances_m: vec![1.0, 1.5, 2.0, 2.5],
            n_crossing: 409,
            n_turnback: 209,
            n_walkby: 198,
            offsets_frac: vec![-0.3, -0.15, 0.0, 0.15, 0.3],
            angles_rad: vec![-0.6, -0.4, -0.2, 0.0, 0.2, 0.4, 0.6],
            turnback_nearest_m: vec![0.3, 0.4, 0.5],
            turnback_angles_rad: vec![-0.35, -0.15, 0.0, 0.15, 0.35],
            walkby_standoff_m: vec![1.0, 1.3, 1.6, 2.0],
            body_len_m: vec![0.4],
            speed_mps: 1.2,
            approach_dist_m: 1.5,
            turn_duration_s: 1.6,
            lead_in_s: 1.0,
            lead_out_s: 0.2,
            e0: 1.0,
            snr_db: None,
            drift_per_frame_rad: 0.0,
            prominence_rel: 0.15,
            gate_rel: 0.1,
        }
    }
}

impl SuiteConfig {
    /// The 816-trial protocol-shaped suite under noise and clock drift.
    pub fn noisy_protocol() -> Self {
        SuiteConfig {
            snr_db: Some(20.0),
            drift_per_frame_rad: 0.2,
            ..SuiteConfig::default()
        }
    }

    /// Full clean classification grid: every offset × angle × distance
    /// crossing plus matched turn-back and walk-by counts.
    pub fn clean_grid() -> Self {
        let base = SuiteConfig::default();
        let per_distance = base.offsets_frac.len() * base.angles_rad.len(); // 35
        let n = per_distance * base.los_distances_m.len();
        SuiteConfig {
            n_crossing: n,
            n_turnback: n,
            n_walkby: n,
            ..base
        }
    }

    pub fn validate(&self) -> Result<()> {
        let non_empty = [
            ("los_distances_m", self.los_distances_m.is_empty()),
            ("offsets_frac", self.offsets_frac.is_empty()),
            ("angles_rad", self.angles_rad.is_empty()),
            ("turnback_nearest_m", self.turnback_nearest_m.is_empty()),
            ("turnback_angles_rad", self.turnback_angles_rad.is_empty()),
            ("walkby_standoff_m", self.walkby_standoff_m.is_empty()),
            ("body_len_m", self.body_len_m.is_empty()),
        ];
        for (name, empty) in non_empty {
            if empty {
                return Err(CliError::Invalid(format!("{name} must not be empty")));
            }
        }
        if self.n_crossing + self.n_turnback + self.n_walkby == 0 {
            return Err(CliError::Invalid("suite has zero trials".into()));
        }
        Ok(())
    }

    pub fn detect_params(&self) -> DetectParams {
        DetectParams {
            prominence_rel: self.prominence_rel,
            gate_rel: self.gate_rel,
            ..DetectParams::default()
        }
    }

    /// The deterministic trial list.
    pub fn trials(&self) -> Vec<TrialSpec> {
        let nd = self.los_distances_m.len();
        let mut out = Vec::with_capacity(self.n_crossing + self.n_turnback + self.n_walkby);
        let mut idx = 0;
        for i in 0..self.n_crossing {
            let no = self.offsets_frac.len();
            let na = self.angles_rad.len();
            out.push(TrialSpec {
                idx,
                kind: TrialKind::Crossing,
                los_m: self.los_distances_m[i % nd],
                offset_frac: Some(self.offsets_frac[(i / nd) % no]),
                angle_rad: Some(self.angles_rad[(i / (nd * no)) % na]),
                nearest_m: None,
                standoff_m: None,
                body_len_m: self.body_len_m[i % self.body_len_m.len()],
                seed: trial_seed(self.master_seed, idx),
            });
            idx += 1;
        }
        for i in 0..self.n_turnback {
            let nn = self.turnback_nearest_m.len();
            let na = self.turnback_angles_rad.len();
            out.push(TrialSpec {
                idx,
                kind: TrialKind::TurnBack,
                los_m: self.los_distances_m[i % nd],
                offset_frac: Some(0.0),
                angle_rad: Some(self.turnback_angles_rad[(i / (nd * nn)) % na]),
                nearest_m: Some(self.turnback_nearest_m[(i / nd) % nn]),
                standoff_m: None,
                body_len_m: self.body_len_m[i % self.body_len_m.len()],
                seed: trial_seed(self.master_seed, idx),
            });
            idx += 1;
        }
        for i in 0..self.n_walkby {
            let ns = self.walkby_standoff_m.len();
            out.push(TrialSpec {
                idx,
                kind: TrialKind::WalkBy,
                los_m: self.los_distances_m[i % nd],
                offset_frac: None,
                angle_rad: None,
                nearest_m: None,
                standoff_m: Some(self.walkby_standoff_m[(i / nd) % ns]),
                body_len_m: self.body_len_m[i % self.body_len_m.len()],
                seed: trial_seed(self.master_seed, idx),
            });
            idx += 1;
        }
        out
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn trial_seed(master: u64, idx: usize) -> u64 {
    splitmix64(master ^ splitmix64(idx as u64))
}

/// Row of a per-condition breakdown table.
#[derive(Debug, Clone, PartialEq)]
pub struct CondRow {
    pub value: f64,
    pub trials: usize,
    pub correct: usize,
    pub accuracy: f64,
    pub negatives: usize,
    pub false_positives: usize,
    pub false_alarm_rate: f64,
}

/// Sweep cell for the prominence/SNR frontier.
#[derive(Debug, Clone)]
pub struct FrontierRow {
    pub prominence_rel: f64,
    pub snr_db: f64,
    pub trials: usize,
    pub accuracy: f64,
    pub false_alarm_rate: f64,
}

#[derive(Debug, Clone, Default)]
pub struct EvalReport {
    pub trials: usize,
    pub true_positive: usize,
    pub false_negative: usize,
    pub false_positive: usize,
    pub true_negative: usize,
    pub accuracy: f64,
    pub false_alarm_rate: f64,
    pub by_distance: Vec<CondRow>,
    pub by_offset: Vec<CondRow>,
    pub by_angle: Vec<CondRow>,
    pub by_body_len: Vec<CondRow>,
    pub by_snr: Vec<CondRow>,
    pub frontier: Vec<FrontierRow>,
}

/// Run one trial: build the trajectory, synthesize, detect.
pub fn run_trial(spec: &TrialSpec, cfg: &SuiteConfig) -> Result<TrialRecord> {
    let geometry = Geometry::doorway(spec.los_m, cfg.carrier_hz)?;
    let params = MotionParams {
        speed_mps: cfg.speed_mps,
        approach_dist_m: cfg.approach_dist_m,
        body_len_m: spec.body_len_m,
        sample_rate_hz: cfg.sample_rate_hz,
    };
    let traj = match spec.kind {
        TrialKind::Crossing => make_crossing(
            &geometry,
            spec.offset_frac.unwrap_or(0.0) * spec.los_m,
            spec.angle_rad.unwrap_or(0.0),
            &params,
        )?,
        TrialKind::TurnBack => make_turnback(
            &geometry,
            spec.offset_frac.unwrap_or(0.0) * spec.los_m,
            spec.angle_rad.unwrap_or(0.0),
            spec.nearest_m.expect("turn-back trial without nearest"),
            cfg.turn_duration_s,
            &params,
        )?,
        TrialKind::WalkBy => make_walkby(
            &geometry,
            spec.standoff_m.expect("walk-by trial without standoff"),
            &params,
        )?,
    };
    let traj = with_margins(&traj, cfg.lead_in_s, cfg.lead_out_s)?;
    let synth = SynthConfig {
        e0: cfg.e0,
        los_gain: free_space_los_gain(&geometry),
        noise_snr_db: cfg.snr_db,
        phase_drift_per_frame_rad: cfg.drift_per_frame_rad,
        rng_seed: spec.seed,
        ..SynthConfig::default()
    };
    let trace = synthesize_trace(&geometry, &traj, &synth, spec.kind.as_str())?;
    let detections = detect(&trace, &cfg.detect_params())?;
    Ok(TrialRecord {
        segments: detections.len(),
        labels: detections.iter().map(|d| d.label).collect(),
        predicted_crossing: detections.iter().any(|d| d.binary),
        expected_crossing: spec.kind == TrialKind::Crossing,
        spec: spec.clone(),
    })
}

fn cond_rows(records: &[TrialRecord], key: impl Fn(&TrialRecord) -> Option<f64>) -> Vec<CondRow> {
    let mut groups: BTreeMap<u64, (f64, Vec<&TrialRecord>)> = BTreeMap::new();
    for r in records {
        if let Some(v) = key(r) {
            groups
                .entry(v.to_bits())
                .or_insert_with(|| (v, Vec::new()))
                .1
                .push(r);
        }
    }
    let mut rows: Vec<CondRow> = groups
        .into_values()
        .map(|(value, rs)| {
            let trials = rs.len();
            let correct = rs.iter().filter(|r| r.correct()).count();
            let negatives = rs.iter().filter(|r| !r.expected_crossing).count();
            let false_positives = rs
                .iter()
                .filter(|r| !r.expected_crossing && r.predicted_crossing)
                .count();
            CondRow {
                value,
                trials,
                correct,
                accuracy: correct as f64 / trials as f64,
                negatives,
                false_positives,
                false_alarm_rate: if negatives > 0 {
                    false_positives as f64 / negatives as f64
                } else {
                    0.0
                },
            }
        })
        .collect();
    rows.sort_by(|a, b| a.value.partial_cmp(&b.value).unwrap());
    rows
}

/// Aggregate trial records into a report.
pub fn aggregate(records: &[TrialRecord], cfg: &SuiteConfig) -> EvalReport {
    let mut r = EvalReport {
        trials: records.len(),
        ..EvalReport::default()
    };
    for rec in records {
        match (rec.expected_crossing, rec.predicted_crossing) {
            (true, true) => r.true_positive += 1,
            (true, false) => r.false_negative += 1,
            (false, true) => r.false_positive += 1,
            (false, false) => r.true_negative += 1,
        }
    }
    let correct = r.true_positive + r.true_negative;
    r.accuracy = if r.trials > 0 {
        correct as f64 / r.trials as f64
    } else {
        0.0
    };
    let negatives = r.false_positive + r.true_negative;
    r.false_alarm_rate = if negatives > 0 {
        r.false_positive as f64 / negatives as f64
    } else {
        0.0
    };
    r.by_distance = cond_rows(records, |t| Some(t.spec.los_m));
    r.by_offset = cond_rows(records, |t| {
        (t.spec.kind == TrialKind::Crossing)
            .then_some(t.spec.offset_frac)
            .flatten()
    });
    r.by_angle = cond_rows(records, |t| t.spec.angle_rad);
    r.by_body_len = cond_rows(records, |t| Some(t.spec.body_len_m));
    r.by_snr = cond_rows(records, |_| cfg.snr_db);
    r
}

/// Run the whole suite. Trials are independent and processed in index
/// order, so the aggregation is deterministic in the master seed.
pub fn run_eval(cfg: &SuiteConfig) -> Result<(EvalReport, Vec<TrialRecord>)> {
    cfg.validate()?;
    let specs = cfg.trials();
    let mut records = Vec::with_capacity(specs.len());
    for spec in &specs {
        records.push(run_trial(spec, cfg)?);
    }
    let report = aggregate(&records, cfg);
    Ok((report, records))
}

/// Reduced-size sweep over prominence and SNR, used when the noisy suite
/// misses its target: shows where the detector's operating frontier sits.
pub fn run_frontier_sweep(
    base: &SuiteConfig,
    prominences: &[f64],
    snrs_db: &[f64],
) -> Result<Vec<FrontierRow>> {
    let mut rows = Vec::new();
    for &prominence_rel in prominences {
        for &snr in snrs_db {
            let cell = SuiteConfig {
                prominence_rel,
                snr_db: Some(snr),
                n_crossing: 48,
                n_turnback: 24,
                n_walkby: 24,
                ..base.clone()
            };
            let (report, _) = run_eval(&cell)?;
            rows.push(FrontierRow {
                prominence_rel,
                snr_db: snr,
                trials: report.trials,
                accuracy: report.accuracy,
                false_alarm_rate: report.false_alarm_rate,
            });
        }
    }
    Ok(rows)
}

/// Render the report as stable structured text.
pub fn render_report(report: &EvalReport, cfg: &SuiteConfig) -> String {
    let mut out = String::new();
    out.push_str("format=wicross-report/1\n");
    out.push_str(&format!("master_seed={}\n", cfg.master_seed));
    out.push_str(&format!("trials={}\n", report.trials));
    out.push_str(&format!(
        "snr_db={}\n",
        cfg.snr_db.map_or("none".to_string(), |v| v.to_string())
    ));
    out.push_str(&format!("drift_per_frame_rad={}\n", cfg.drift_per_frame_rad));
    out.push_str(&format!("prominence_rel={}\n", cfg.prominence_rel));
    out.push_str(&format!("gate_rel={}\n", cfg.gate_rel));
    out.push_str("[confusion]\n");
    out.push_str(&format!(
        "tp={} fn={} fp={} tn={}\n",
        report.true_positive, report.false_negative, report.false_positive, report.true_negative
    ));
    out.push_str(&format!("accuracy={:.6}\n", report.accuracy));
    out.push_str(&format!("false_alarm_rate={:.6}\n", report.false_alarm_rate));
    out.push_str(&format!(
        "# reference: hardware deployments of this detector family report accuracy {REFERENCE_ACCURACY} / false alarm {REFERENCE_FALSE_ALARM}\n"
    ));
    out.push_str(&format!(
        "target_accuracy={TARGET_ACCURACY} target_false_alarm={TARGET_FALSE_ALARM}\n"
    ));

    let table = |name: &str, rows: &[CondRow], out: &mut String| {
        if rows.is_empty() {
            return;
        }
        out.push_str(&format!("[{name}]\n"));
        out.push_str("# value trials correct accuracy negatives false_positives false_alarm_rate\n");
        for r in rows {
            out.push_str(&format!(
                "{} {} {} {:.6} {} {} {:.6}\n",
                r.value, r.trials, r.correct, r.accuracy, r.negatives, r.false_positives,
                r.false_alarm_rate
            ));
        }
    };
    table("by_distance", &report.by_distance, &mut out);
    table("by_offset", &report.by_offset, &mut out);
    table("by_angle", &report.by_angle, &mut out);
    table("by_body_len", &report.by_body_len, &mut out);
    table("by_snr", &report.by_snr, &mut out);

    if !report.frontier.is_empty() {
        out.push_str("[frontier]\n");
        out.push_str("# prominence_rel snr_db trials accuracy false_alarm_rate\n");
        for row in &report.frontier {
            out.push_str(&format!(
                "{} {} {} {:.6} {:.6}\n",
                row.prominence_rel, row.snr_db, row.trials, row.accuracy, row.false_alarm_rate
            ));
        }
    }
    out
}

/// Render the per-trial detection log, one parseable line per trial.
pub fn render_trial_log(records: &[TrialRecord]) -> String {
    let mut out = String::new();
    out.push_str(
        "# trial kind los offset_frac angle nearest standoff body_len seed segments labels predicted expected correct\n",
    );
    for r in records {
        let opt = |v: Option<f64>| v.map_or("-".to_string(), |x| x.to_string());
        let labels = if r.labels.is_empty() {
            "-".to_string()
        } else {
            r.labels
                .iter()
                .map(|l| l.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        out.push_str(&format!(
            "trial={} kind={} los={} offset_frac={} angle={} nearest={} standoff={} body_len={} seed={} segments={} labels={} predicted={} expected={} correct={}\n",
            r.spec.idx,
            r.spec.kind.as_str(),
            r.spec.los_m,
            opt(r.spec.offset_frac),
            opt(r.spec.angle_rad),
            opt(r.spec.nearest_m),
            opt(r.spec.standoff_m),
            r.spec.body_len_m,
            r.spec.seed,
            r.segments,
            labels,
            r.predicted_crossing,
            r.expected_crossing,
            r.correct(),
        ));
    }
    out
}

/// Parse the `key=value` fields of one trial-log line.
pub fn parse_log_line(line: &str) -> Option<BTreeMap<String, String>> {
    if line.starts_with('#') || line.trim().is_empty() {
        return None;
    }
    let mut map = BTreeMap::new();
    for tok in line.split_whitespace() {
        let (k, v) = tok.split_once('=')?;
        map.insert(k.to_string(), v.to_string());
    }
    Some(map)
}

/// Parse a suite-config file: `key=value` lines over [`SuiteConfig`]
/// defaults; `#` starts a comment.
pub fn parse_suite_config(text: &str) -> Result<SuiteConfig> {
    let mut cfg = SuiteConfig::default();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::parse(lineno, format!("expected key=value, got {line:?}")))?;
        let key = key.trim();
        let value = value.trim();
        let f64_field = |v: &str| -> Result<f64> {
            v.parse()
                .map_err(|_| CliError::parse(lineno, format!("bad number {v:?} for {key}")))
        };
        let list_field = |v: &str| -> Result<Vec<f64>> {
            v.split(',')
                .map(|x| {
                    x.trim().parse().map_err(|_| {
                        CliError::parse(lineno, format!("bad number {x:?} in {key}"))
                    })
                })
                .collect()
        };
        let usize_field = |v: &str| -> Result<usize> {
            v.parse()
                .map_err(|_| CliError::parse(lineno, format!("bad count {v:?} for {key}")))
        };
        match key {
            "master_seed" => {
                cfg.master_seed = value.parse().map_err(|_| {
                    CliError::parse(lineno, format!("bad seed {value:?}"))
                })?;
            }
            "carrier_hz" => cfg.carrier_hz = f64_field(value)?,
            "sample_rate_hz" => cfg.sample_rate_hz = f64_field(value)?,
            "los_distances_m" => cfg.los_distances_m = list_field(value)?,
            "n_crossing" => cfg.n_crossing = usize_field(value)?,
            "n_turnback" => cfg.n_turnback = usize_field(value)?,
            "n_walkby" => cfg.n_walkby = usize_field(value)?,
            "offsets_frac" => cfg.offsets_frac = list_field(value)?,
            "angles_rad" => cfg.angles_rad = list_field(value)?,
            "turnback_nearest_m" => cfg.turnback_nearest_m = list_field(value)?,
            "turnback_angles_rad" => cfg.turnback_angles_rad = list_field(value)?,
            "walkby_standoff_m" => cfg.walkby_standoff_m = list_field(value)?,
            "body_len_m" => cfg.body_len_m = list_field(value)?,
            "speed_mps" => cfg.speed_mps = f64_field(value)?,
            "approach_dist_m" => cfg.approach_dist_m = f64_field(value)?,
            "turn_duration_s" => cfg.turn_duration_s = f64_field(value)?,
            "lead_in_s" => cfg.lead_in_s = f64_field(value)?,
            "lead_out_s" => cfg.lead_out_s = f64_field(value)?,
            "e0" => cfg.e0 = f64_field(value)?,
            "snr_db" => {
                cfg.snr_db = if value.eq_ignore_ascii_case("none") || value.is_empty() {
                    None
                } else {
                    Some(f64_field(value)?)
                };
            }
            "drift_per_frame_rad" => cfg.drift_per_frame_rad = f64_field(value)?,
            "prominence_rel" => cfg.prominence_rel = f64_field(value)?,
            "gate_rel" => cfg.gate_rel = f64_field(value)?,
            other => {
                return Err(CliError::parse(lineno, format!("unknown config key {other:?}")));
            }
        }
    }
    Ok(cfg)
}
