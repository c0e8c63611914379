//! Line-delimited JSON files for stimulus streams, session traces and
//! analysis reports.
//!
//! Every file starts with a header object carrying `schema_version` and
//! `kind`, followed by one object per line. Fields are emitted in declaration
//! order and floats in shortest round-trip form, so writing the same value
//! twice yields identical bytes. Unknown fields are rejected when reading.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::analysis::{InteractionMetrics, MatchMismatchReport};
use crate::error::{Error, Result};
use crate::model::{
    HumanProfile, ParadigmKind, PhaseDurations, RobotProfileKind, SessionConfig, SessionTrace, StimulusFrame,
    StimulusSource, TraceRecord,
};
use crate::scalar::Scalar;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FileKind {
    Trace,
    Stimuli,
    Metrics,
    MatchMismatchReport,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TraceHeader<T> {
    schema_version: u32,
    kind: FileKind,
    seed: Option<u64>,
    config: SessionConfig<T>,
}

/// Header of a stimulus stream file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StimuliHeader<T> {
    pub schema_version: u32,
    pub kind: FileKind,
    pub seed: Option<u64>,
    pub human: Option<HumanProfile>,
    pub paradigm: ParadigmKind,
    pub tick_hz: u32,
    pub durations: PhaseDurations<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StimulusSet<T> {
    pub header: StimuliHeader<T>,
    pub frames: Vec<StimulusFrame<T>>,
}

impl<T: Scalar> StimulusSet<T> {
    pub fn synthetic(
        human: HumanProfile,
        paradigm: ParadigmKind,
        seed: u64,
        tick_hz: u32,
        durations: PhaseDurations<T>,
        frames: Vec<StimulusFrame<T>>,
    ) -> Self {
        StimulusSet {
            header: StimuliHeader {
                schema_version: SCHEMA_VERSION,
                kind: FileKind::Stimuli,
                seed: Some(seed),
                human: Some(human),
                paradigm,
                tick_hz,
                durations,
            },
            frames,
        }
    }

    /// Session config replaying these stimuli through `profile`.
    pub fn session_config(&self, profile: crate::model::ProfileParams<T>, source: StimulusSource) -> SessionConfig<T> {
        SessionConfig {
            paradigm: self.header.paradigm,
            robot_profile: profile,
            stimulus_source: source,
            tick_hz: self.header.tick_hz,
            durations: self.header.durations,
        }
    }
}

/// Pulls the offending field name out of a serde error message.
fn serde_field(err: &serde_json::Error) -> String {
    let msg = err.to_string();
    for marker in [
        "unknown field `",
        "missing field `",
        "unknown variant `",
        "duplicate field `",
    ] {
        if let Some(start) = msg.find(marker) {
            let rest = &msg[start + marker.len()..];
            if let Some(end) = rest.find('`') {
                return rest[..end].to_string();
            }
        }
    }
    format!("record ({msg})")
}

fn parse_line<V: DeserializeOwned>(line: &str, line_no: usize) -> Result<V> {
    serde_json::from_str(line).map_err(|e| Error::schema(Some(line_no), serde_field(&e)))
}

fn write_line<W: Write, V: Serialize>(w: &mut W, value: &V) -> Result<()> {
    serde_json::to_writer(&mut *w, value).map_err(std::io::Error::from)?;
    w.write_all(b"\n")?;
    Ok(())
}

/// Reads the numbered non-empty lines of a file; blank lines are only
/// tolerated at the very end.
fn numbered_lines<R: BufRead>(reader: R) -> Result<Vec<(usize, String)>> {
    let mut lines = Vec::new();
    let mut blank_at = None;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            blank_at.get_or_insert(i + 1);
            continue;
        }
        if let Some(b) = blank_at {
            return Err(Error::schema(Some(b), "blank line"));
        }
        lines.push((i + 1, line));
    }
    Ok(lines)
}

fn check_header(version: u32, kind: FileKind, expected: FileKind) -> Result<()> {
    if version != SCHEMA_VERSION {
        return Err(Error::schema(Some(1), "schema_version"));
    }
    if kind != expected {
        return Err(Error::schema(Some(1), "kind"));
    }
    Ok(())
}

fn header_seed(source: &StimulusSource) -> Option<u64> {
    match source {
        StimulusSource::Synthetic { seed, .. } => Some(*seed),
        _ => None,
    }
}

pub fn write_trace<T, W>(trace: &SessionTrace<T>, mut w: W) -> Result<()>
where
    T: Scalar + Serialize,
    W: Write,
{
    trace.validate()?;
    let header = TraceHeader {
        schema_version: SCHEMA_VERSION,
        kind: FileKind::Trace,
        seed: header_seed(&trace.config.stimulus_source),
        config: trace.config.clone(),
    };
    write_line(&mut w, &header)?;
    for record in &trace.records {
        write_line(&mut w, record)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_trace<T, R>(reader: R) -> Result<SessionTrace<T>>
where
    T: Scalar + DeserializeOwned,
    R: BufRead,
{
    let lines = numbered_lines(reader)?;
    let Some(((_, first), rest)) = lines.split_first() else {
        return Err(Error::schema(None, "no records"));
    };
    let header: TraceHeader<T> = parse_line(first, 1)?;
    check_header(header.schema_version, header.kind, FileKind::Trace)?;
    if header.seed != header_seed(&header.config.stimulus_source) {
        return Err(Error::schema(Some(1), "seed"));
    }
    header.config.validate().map_err(|_| Error::schema(Some(1), "config"))?;

    let mut records = Vec::with_capacity(rest.len());
    let mut line_of = Vec::with_capacity(rest.len());
    for (no, line) in rest {
        let record: TraceRecord<T> = parse_line(line, *no)?;
        record
            .frame
            .validate()
            .map_err(|e| Error::schema(Some(*no), e.field()))?;
        records.push(record);
        line_of.push(*no);
    }
    let trace = SessionTrace {
        config: header.config,
        records,
    };
    trace.validate_with(|i, err| match err {
        Error::SchemaViolation { field, .. } => Error::schema(Some(line_of[i]), field),
        other => other,
    })?;
    Ok(trace)
}

pub fn write_stimuli<T, W>(set: &StimulusSet<T>, mut w: W) -> Result<()>
where
    T: Scalar + Serialize,
    W: Write,
{
    if set.frames.is_empty() {
        return Err(Error::schema(None, "no records"));
    }
    for frame in &set.frames {
        frame.validate()?;
    }
    write_line(&mut w, &set.header)?;
    for frame in &set.frames {
        write_line(&mut w, frame)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_stimuli<T, R>(reader: R) -> Result<StimulusSet<T>>
where
    T: Scalar + DeserializeOwned,
    R: BufRead,
{
    let lines = numbered_lines(reader)?;
    let Some(((_, first), rest)) = lines.split_first() else {
        return Err(Error::schema(None, "no records"));
    };
    let header: StimuliHeader<T> = parse_line(first, 1)?;
    check_header(header.schema_version, header.kind, FileKind::Stimuli)?;
    if header.tick_hz == 0 {
        return Err(Error::schema(Some(1), "tick_hz"));
    }
    if rest.is_empty() {
        return Err(Error::schema(None, "no records"));
    }
    let frames = rest
        .iter()
        .map(|(no, line)| {
            let frame: StimulusFrame<T> = parse_line(line, *no)?;
            frame.validate().map_err(|e| Error::schema(Some(*no), e.field()))?;
            Ok(frame)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(StimulusSet { header, frames })
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path)?))
}

pub fn save_trace<T: Scalar + Serialize>(trace: &SessionTrace<T>, path: &Path) -> Result<()> {
    write_trace(trace, BufWriter::new(File::create(path)?))
}

pub fn load_trace<T: Scalar + DeserializeOwned>(path: &Path) -> Result<SessionTrace<T>> {
    read_trace(open(path)?)
}

pub fn save_stimuli<T: Scalar + Serialize>(set: &StimulusSet<T>, path: &Path) -> Result<()> {
    write_stimuli(set, BufWriter::new(File::create(path)?))
}

pub fn load_stimuli<T: Scalar + DeserializeOwned>(path: &Path) -> Result<StimulusSet<T>> {
    read_stimuli(open(path)?)
}

/// Frames from either a stimulus file or a recorded trace.
pub fn load_frames<T: Scalar + DeserializeOwned>(path: &Path) -> Result<Vec<StimulusFrame<T>>> {
    #[derive(Deserialize)]
    struct Kind {
        kind: FileKind,
    }
    let mut first = String::new();
    open(path)?.read_line(&mut first)?;
    let kind: Kind = serde_json::from_str(&first).map_err(|_| Error::schema(Some(1), "kind"))?;
    match kind.kind {
        FileKind::Stimuli => Ok(load_stimuli(path)?.frames),
        FileKind::Trace => Ok(load_trace(path)?.frames()),
        _ => Err(Error::schema(Some(1), "kind")),
    }
}

/// One `analyze` output line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsReport<T> {
    pub schema_version: u32,
    pub kind: FileKind,
    pub source: String,
    pub profile: RobotProfileKind,
    pub paradigm: ParadigmKind,
    pub seed: Option<u64>,
    pub records: usize,
    pub metrics: InteractionMetrics<T>,
}

impl<T: Scalar> MetricsReport<T> {
    pub fn from_trace(source: impl Into<String>, trace: &SessionTrace<T>) -> Result<Self> {
        Ok(MetricsReport {
            schema_version: SCHEMA_VERSION,
            kind: FileKind::Metrics,
            source: source.into(),
            profile: trace.config.robot_profile.kind,
            paradigm: trace.config.paradigm,
            seed: header_seed(&trace.config.stimulus_source),
            records: trace.records.len(),
            metrics: InteractionMetrics::from_trace(trace)?,
        })
    }
}

#[derive(Serialize)]
struct ReportEnvelope<'a, T> {
    schema_version: u32,
    kind: FileKind,
    report: &'a MatchMismatchReport<T>,
}

pub fn write_metrics<T: Scalar + Serialize, W: Write>(report: &MetricsReport<T>, mut w: W) -> Result<()> {
    write_line(&mut w, report)
}

pub fn write_match_report<T: Scalar + Serialize, W: Write>(report: &MatchMismatchReport<T>, mut w: W) -> Result<()> {
    write_line(
        &mut w,
        &ReportEnvelope {
            schema_version: SCHEMA_VERSION,
            kind: FileKind::MatchMismatchReport,
            report,
        },
    )
}
