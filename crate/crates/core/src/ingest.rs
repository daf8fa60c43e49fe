//! Event logs, member attribute tables, windowed snapshots and leave labels.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chrono::{DateTime, Duration, NaiveDate, NaiveDateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

pub type Timestamp = DateTime<Utc>;

/// Accepts RFC 3339 (`2020-01-05T12:00:00Z`), a naive date-time taken as
/// UTC (`2020-01-05T12:00:00` or with a space), or a bare date.
pub fn parse_timestamp(s: &str) -> Option<Timestamp> {
    let s = s.trim();
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Some(dt.with_timezone(&Utc));
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S"] {
        if let Ok(naive) = NaiveDateTime::parse_from_str(s, fmt) {
            return Some(naive.and_utc());
        }
    }
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .ok()
        .and_then(|d| d.and_hms_opt(0, 0, 0))
        .map(|naive| naive.and_utc())
}

pub fn format_timestamp(ts: &Timestamp) -> String {
    ts.format("%Y-%m-%dT%H:%M:%SZ").to_string()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Comment,
    Answer,
    Other,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Comment => "comment",
            EventKind::Answer => "answer",
            EventKind::Other => "other",
        }
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EventKind {
    type Err = std::convert::Infallible;

    /// Anything other than `comment` or `answer` is kept as `Other`.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "comment" => EventKind::Comment,
            "answer" => EventKind::Answer,
            _ => EventKind::Other,
        })
    }
}

/// One timestamped interaction between two members.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteractionEvent {
    pub timestamp: Timestamp,
    pub actor: String,
    pub target: String,
    pub kind: EventKind,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EventLog {
    /// Sorted by timestamp (stable for equal timestamps).
    pub events: Vec<InteractionEvent>,
    /// Rows dropped because actor and target were the same member.
    pub self_loops_dropped: usize,
}

pub const EVENTS_HEADER: [&str; 4] = ["timestamp", "actor", "target", "kind"];

fn check_header(path: &Path, found: &csv::StringRecord, expected: &[&str]) -> Result<()> {
    let found: Vec<&str> = found.iter().map(str::trim).collect();
    if found != expected {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            message: format!("expected header {}, got {}", expected.join(","), found.join(",")),
        });
    }
    Ok(())
}

fn row_error(path: &Path, record: &csv::StringRecord, message: String) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line: record.position().map(|p| p.line() as usize).unwrap_or(0),
        message,
    }
}

fn open_csv(path: &Path) -> Result<csv::Reader<fs::File>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new().has_headers(true).from_reader(file))
}

/// Reads an events CSV (`timestamp,actor,target,kind`).
pub fn parse_events(path: &Path) -> Result<EventLog> {
    let mut reader = open_csv(path)?;
    let mut log = EventLog::default();
    if reader.headers()?.is_empty() {
        log::warn!("{}: empty events file", path.display());
        return Ok(log);
    }
    check_header(path, reader.headers()?, &EVENTS_HEADER)?;
    for record in reader.records() {
        let record = record?;
        if record.len() != 4 {
            return Err(row_error(path, &record, format!("expected 4 fields, got {}", record.len())));
        }
        let timestamp = parse_timestamp(&record[0]).ok_or_else(|| {
            row_error(path, &record, format!("unparseable timestamp {:?}", &record[0]))
        })?;
        let (actor, target) = (record[1].trim(), record[2].trim());
        if actor.is_empty() || target.is_empty() {
            return Err(row_error(path, &record, "empty member id".into()));
        }
        if actor == target {
            log.self_loops_dropped += 1;
            continue;
        }
        log.events.push(InteractionEvent {
            timestamp,
            actor: actor.to_owned(),
            target: target.to_owned(),
            kind: record[3].parse().unwrap_or(EventKind::Other),
        });
    }
    if log.self_loops_dropped > 0 {
        log::warn!("{}: dropped {} self-interaction rows", path.display(), log.self_loops_dropped);
    }
    log.events.sort_by_key(|e| e.timestamp);
    Ok(log)
}

pub fn write_events<W: std::io::Write>(events: &[InteractionEvent], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(EVENTS_HEADER)?;
    for e in events {
        w.write_record([format_timestamp(&e.timestamp).as_str(), &e.actor, &e.target, e.kind.as_str()])?;
    }
    w.flush().map_err(|e| Error::io("<events>", e))?;
    Ok(())
}

/// Exogenous attributes of one member.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberAttributes {
    pub member_id: String,
    pub registration_date: Timestamp,
    pub last_login_date: Timestamp,
    pub upvotes: u64,
    pub downvotes: u64,
    pub views: u64,
    pub reputation: i64,
}

pub type AttributeTable = BTreeMap<String, MemberAttributes>;

pub const ATTRIBUTES_HEADER: [&str; 7] = [
    "member_id",
    "registration_date",
    "last_login_date",
    "upvotes",
    "downvotes",
    "views",
    "reputation",
];

pub fn parse_attributes(path: &Path) -> Result<AttributeTable> {
    let mut reader = open_csv(path)?;
    check_header(path, reader.headers()?, &ATTRIBUTES_HEADER)?;
    let mut table = AttributeTable::new();
    for record in reader.records() {
        let record = record?;
        if record.len() != 7 {
            return Err(row_error(path, &record, format!("expected 7 fields, got {}", record.len())));
        }
        let date = |i: usize| {
            parse_timestamp(&record[i]).ok_or_else(|| {
                row_error(path, &record, format!("unparseable {} {:?}", ATTRIBUTES_HEADER[i], &record[i]))
            })
        };
        fn num<T: FromStr>(path: &Path, record: &csv::StringRecord, i: usize) -> Result<T> {
            record[i].trim().parse().map_err(|_| {
                row_error(path, record, format!("invalid {} {:?}", ATTRIBUTES_HEADER[i], &record[i]))
            })
        }
        let attrs = MemberAttributes {
            member_id: record[0].trim().to_owned(),
            registration_date: date(1)?,
            last_login_date: date(2)?,
            upvotes: num(path, &record, 3)?,
            downvotes: num(path, &record, 4)?,
            views: num(path, &record, 5)?,
            reputation: num(path, &record, 6)?,
        };
        table.insert(attrs.member_id.clone(), attrs);
    }
    Ok(table)
}

pub fn write_attributes<W: std::io::Write>(table: &AttributeTable, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(ATTRIBUTES_HEADER)?;
    for a in table.values() {
        w.write_record([
            a.member_id.clone(),
            format_timestamp(&a.registration_date),
            format_timestamp(&a.last_login_date),
            a.upvotes.to_string(),
            a.downvotes.to_string(),
            a.views.to_string(),
            a.reputation.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<attributes>", e))?;
    Ok(())
}

/// Graph of one time window `[window_start, window_start + window_days)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub graph: Graph,
    pub window_start: Timestamp,
    pub window_days: u32,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnapshotMeta {
    pub window_start: String,
    pub window_days: u32,
    pub label: String,
}

impl Snapshot {
    pub fn window_end(&self) -> Timestamp {
        self.window_start + Duration::days(self.window_days as i64)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn meta(&self) -> SnapshotMeta {
        SnapshotMeta {
            window_start: format_timestamp(&self.window_start),
            window_days: self.window_days,
            label: self.label.clone(),
        }
    }

    /// Writes `<stem>.edges` and the `<stem>.json` sidecar into `dir`.
    pub fn save(&self, dir: &Path, stem: &str) -> Result<(PathBuf, PathBuf)> {
        let edges = dir.join(format!("{stem}.edges"));
        let sidecar = dir.join(format!("{stem}.json"));
        self.graph.write_edge_list(&edges)?;
        let json = serde_json::to_string_pretty(&self.meta())?;
        fs::write(&sidecar, json + "\n").map_err(|e| Error::io(&sidecar, e))?;
        Ok((edges, sidecar))
    }

    pub fn load(dir: &Path, stem: &str) -> Result<Self> {
        let sidecar = dir.join(format!("{stem}.json"));
        let text = fs::read_to_string(&sidecar).map_err(|e| Error::io(&sidecar, e))?;
        let meta: SnapshotMeta = serde_json::from_str(&text)?;
        let window_start = parse_timestamp(&meta.window_start).ok_or_else(|| {
            Error::invalid(format!("{}: bad window_start {:?}", sidecar.display(), meta.window_start))
        })?;
        let graph = Graph::read_edge_list(&dir.join(format!("{stem}.edges")))?;
        Ok(Snapshot { graph, window_start, window_days: meta.window_days, label: meta.label })
    }
}

/// Collapses every actor/target pair with at least one event in the
/// half-open window into a single undirected edge. Nodes are edge endpoints
/// only. `events` may be in any order.
pub fn build_snapshot(
    events: &[InteractionEvent],
    window_start: Timestamp,
    window_days: u32,
) -> Result<Snapshot> {
    build_snapshot_filtered(events, window_start, window_days, None)
}

/// Like [`build_snapshot`], keeping only events whose kind is in `kinds`.
pub fn build_snapshot_filtered(
    events: &[InteractionEvent],
    window_start: Timestamp,
    window_days: u32,
    kinds: Option<&[EventKind]>,
) -> Result<Snapshot> {
    if window_days < 1 {
        return Err(Error::invalid("window length must be at least one day"));
    }
    let end = window_start + Duration::days(window_days as i64);
    let edges = events
        .iter()
        .filter(|e| e.timestamp >= window_start && e.timestamp < end)
        .filter(|e| kinds.is_none_or(|k| k.contains(&e.kind)))
        .map(|e| (e.actor.as_str(), e.target.as_str()));
    Ok(Snapshot {
        graph: Graph::from_edges(edges),
        window_start,
        window_days,
        label: format_timestamp(&window_start),
    })
}

/// Initial nodes of the first snapshot and which of them are gone later.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeaveLabeling {
    pub initial_nodes: BTreeSet<String>,
    pub departed: BTreeSet<String>,
    /// Nodes present only in the later snapshot; never labeled.
    pub ignored: BTreeSet<String>,
    pub horizon_tag: String,
}

impl LeaveLabeling {
    pub fn is_departed(&self, id: &str) -> bool {
        self.departed.contains(id)
    }
}

/// `departed = V_t \ V_future`, where presence means being an endpoint of at
/// least one edge in the snapshot.
pub fn label_leaves(snap_t: &Snapshot, snap_future: &Snapshot) -> Result<LeaveLabeling> {
    if snap_future.window_start <= snap_t.window_start {
        return Err(Error::invalid(format!(
            "future snapshot must start after {} (got {})",
            format_timestamp(&snap_t.window_start),
            format_timestamp(&snap_future.window_start)
        )));
    }
    let initial: BTreeSet<String> = snap_t.graph.nodes().iter().cloned().collect();
    let future: BTreeSet<String> = snap_future.graph.nodes().iter().cloned().collect();
    Ok(LeaveLabeling {
        departed: initial.difference(&future).cloned().collect(),
        ignored: future.difference(&initial).cloned().collect(),
        initial_nodes: initial,
        horizon_tag: snap_future.label.clone(),
    })
}

/// Node-set view of a prediction: there are no true negatives here, so only
/// precision, recall and F1 are defined.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeSetConfusion {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
}

impl NodeSetConfusion {
    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    pub fn f1(&self) -> f64 {
        let (p, r) = (self.precision(), self.recall());
        if p + r == 0.0 {
            0.0
        } else {
            2.0 * p * r / (p + r)
        }
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn node_prediction_confusion(
    observed: &BTreeSet<String>,
    predicted: &BTreeSet<String>,
    initial: &BTreeSet<String>,
) -> Result<NodeSetConfusion> {
    if let Some(stray) = predicted.iter().find(|v| !initial.contains(*v)) {
        return Err(Error::invalid(format!("predicted node `{stray}` is not an initial node")));
    }
    if let Some(stray) = observed.iter().find(|v| !initial.contains(*v)) {
        return Err(Error::invalid(format!("observed node `{stray}` is not an initial node")));
    }
    Ok(NodeSetConfusion {
        tp: observed.intersection(predicted).count(),
        fp: predicted.difference(observed).count(),
        fn_: observed.difference(predicted).count(),
    })
}
