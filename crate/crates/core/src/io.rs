//! Trace CSV import and export.
//!
//! The long format has one row per scroll event:
//!
//! ```text
//! participant_id,stimulus_id,timestamp_ms,value
//! p01,qa-visual,0,0
//! p01,qa-visual,350,1
//! ```
//!
//! Rows of one (participant, stimulus) pair must be in time order but pairs
//! may interleave. Traces are returned sorted by participant, then stimulus.
//!
//! Per-session exports with only `timestamp_ms,value` columns are read with
//! [`read_two_column`]. The participant and stimulus come from the file name
//! `<participant_id>__<stimulus_id>.csv`; when the name has no `__`, the whole
//! stem is the stimulus id and the participant id is left empty for the
//! caller to fill in.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{EventTrace, TraceEvent};

pub const LONG_HEADER: [&str; 4] = ["participant_id", "stimulus_id", "timestamp_ms", "value"];

#[derive(Debug, Serialize, Deserialize)]
struct LongRow {
    participant_id: String,
    stimulus_id: String,
    timestamp_ms: u64,
    value: f64,
}

#[derive(Debug, Deserialize)]
struct ShortRow {
    timestamp_ms: u64,
    value: f64,
}

fn csv_error(e: csv::Error) -> Error {
    Error::Parse(format!("trace CSV: {e}"))
}

pub fn read_long<R: Read>(reader: R) -> Result<Vec<EventTrace>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(csv_error)?.clone();
    if headers.iter().collect::<Vec<_>>() != LONG_HEADER {
        return Err(Error::Parse(format!(
            "trace CSV header must be `{}`",
            LONG_HEADER.join(",")
        )));
    }
    let mut grouped: BTreeMap<(String, String), Vec<TraceEvent>> = BTreeMap::new();
    for row in rdr.deserialize::<LongRow>() {
        let row = row.map_err(csv_error)?;
        grouped
            .entry((row.participant_id, row.stimulus_id))
            .or_default()
            .push(TraceEvent::new(row.timestamp_ms, row.value));
    }
    grouped
        .into_iter()
        .map(|((participant, stimulus), events)| EventTrace::new(participant, stimulus, events))
        .collect()
}

pub fn read_long_str(text: &str) -> Result<Vec<EventTrace>> {
    read_long(text.as_bytes())
}

pub fn write_long<W: Write>(writer: W, traces: &[EventTrace]) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(writer);
    wtr.write_record(LONG_HEADER).map_err(csv_error)?;
    for trace in traces {
        for event in &trace.events {
            wtr.serialize(LongRow {
                participant_id: trace.participant_id.clone(),
                stimulus_id: trace.stimulus_id.clone(),
                timestamp_ms: event.timestamp_ms,
                value: event.value,
            })
            .map_err(csv_error)?;
        }
    }
    wtr.flush().map_err(|e| Error::Parse(e.to_string()))
}

pub fn long_to_string(traces: &[EventTrace]) -> String {
    let mut buf = Vec::new();
    write_long(&mut buf, traces).expect("writing to a Vec");
    String::from_utf8(buf).expect("CSV is UTF-8")
}

/// Splits `<participant>__<stimulus>.csv` into its ids.
pub fn ids_from_file_name(file_name: &str) -> (String, String) {
    let stem = file_name
        .rsplit(['/', '\\'])
        .next()
        .unwrap_or(file_name)
        .trim_end_matches(".csv");
    match stem.split_once("__") {
        Some((p, s)) => (p.to_string(), s.to_string()),
        None => (String::new(), stem.to_string()),
    }
}

/// Reads a `timestamp_ms,value` file, taking ids from its name.
pub fn read_two_column<R: Read>(reader: R, file_name: &str) -> Result<EventTrace> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(csv_error)?.clone();
    if headers.iter().collect::<Vec<_>>() != ["timestamp_ms", "value"] {
        return Err(Error::Parse(
            "two-column trace CSV header must be `timestamp_ms,value`".into(),
        ));
    }
    let events = rdr
        .deserialize::<ShortRow>()
        .map(|r| {
            r.map(|r| TraceEvent::new(r.timestamp_ms, r.value))
                .map_err(csv_error)
        })
        .collect::<Result<Vec<_>>>()?;
    let (participant, stimulus) = ids_from_file_name(file_name);
    EventTrace::new(participant, stimulus, events)
}
