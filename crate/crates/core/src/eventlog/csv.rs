//! CSV event tables (RFC 4180, header row required).

use std::collections::HashMap;
use std::io::Read;

use chrono::{DateTime, NaiveDate, NaiveDateTime};

use super::{Activity, EventLog, Trace};
use crate::{Error, Result};

/// Column mapping for [`parse_csv`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CsvConfig {
    pub case_id: String,
    pub activity: String,
    pub timestamp: Option<String>,
    pub delimiter: u8,
}

impl Default for CsvConfig {
    fn default() -> Self {
        CsvConfig {
            case_id: "case_id".into(),
            activity: "activity".into(),
            timestamp: None,
            delimiter: b',',
        }
    }
}

impl CsvConfig {
    pub fn new(case_id: impl Into<String>, activity: impl Into<String>) -> Self {
        CsvConfig { case_id: case_id.into(), activity: activity.into(), ..Default::default() }
    }

    pub fn with_timestamp(mut self, column: impl Into<String>) -> Self {
        self.timestamp = Some(column.into());
        self
    }
}

const NAIVE_FORMATS: &[&str] = &[
    "%Y-%m-%dT%H:%M:%S%.f",
    "%Y-%m-%d %H:%M:%S%.f",
    "%Y/%m/%d %H:%M:%S%.f",
    "%d-%m-%Y %H:%M:%S%.f",
    "%Y-%m-%dT%H:%M",
    "%Y-%m-%d %H:%M",
];

fn parse_timestamp(s: &str) -> Option<NaiveDateTime> {
    let s = s.trim();
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Some(dt.naive_utc());
    }
    for f in NAIVE_FORMATS {
        if let Ok(dt) = NaiveDateTime::parse_from_str(s, f) {
            return Some(dt);
        }
    }
    NaiveDate::parse_from_str(s, "%Y-%m-%d").ok().and_then(|d| d.and_hms_opt(0, 0, 0))
}

/// Groups rows into one trace per case id. Events are ordered by timestamp
/// when a timestamp column is mapped (stable, so equal timestamps keep file
/// order), otherwise by file order.
pub fn parse_csv<R: Read>(input: R, config: &CsvConfig) -> Result<EventLog> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .delimiter(config.delimiter)
        .from_reader(input);

    let headers = rdr.headers().map_err(|e| Error::Csv(e.to_string()))?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::Config(format!("column {name:?} not found in CSV header")))
    };
    let case_col = column(&config.case_id)?;
    let act_col = column(&config.activity)?;
    let ts_col = config.timestamp.as_deref().map(column).transpose()?;

    // case id -> index into `cases`, cases kept in first-seen order
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut cases: Vec<Vec<(Option<NaiveDateTime>, Activity)>> = Vec::new();

    for record in rdr.records() {
        let record = record.map_err(|e| Error::Csv(e.to_string()))?;
        let row = record.position().map(|p| p.line()).unwrap_or(0);
        let field = |i: usize| {
            record
                .get(i)
                .ok_or_else(|| Error::Csv(format!("row {row}: missing field {i}")))
        };
        let case = field(case_col)?;
        let activity = field(act_col)?;
        if activity.is_empty() {
            return Err(Error::Csv(format!("row {row}: empty activity label")));
        }
        let ts = match ts_col {
            Some(c) => {
                let raw = field(c)?;
                Some(parse_timestamp(raw).ok_or_else(|| Error::Timestamp { row, value: raw.to_string() })?)
            }
            None => None,
        };
        let slot = *index.entry(case.to_string()).or_insert_with(|| {
            cases.push(Vec::new());
            cases.len() - 1
        });
        cases[slot].push((ts, Activity::new(activity)));
    }

    let mut log = EventLog::new();
    for mut events in cases {
        if ts_col.is_some() {
            events.sort_by_key(|(ts, _)| *ts);
        }
        log.push(events.into_iter().map(|(_, a)| a).collect::<Trace>());
    }
    Ok(log)
}
