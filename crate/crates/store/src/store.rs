use std::collections::{BTreeMap, BTreeSet};
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{RwLock, RwLockReadGuard, RwLockWriteGuard};

use percent_encoding::{percent_decode_str, utf8_percent_encode, AsciiSet, NON_ALPHANUMERIC};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use teaming_core::evaluation::FeedbackEvent;
use thiserror::Error;

use crate::entity::{Entity, Kind};

pub const SCHEMA_VERSION: u32 = 1;
/// Events per log segment before a new segment is started.
pub const SEGMENT_CAPACITY: usize = 4096;

const VERSION_FILE: &str = "VERSION";
const EVENTS_DIR: &str = "events";
const ID_ESCAPES: &AsciiSet = &NON_ALPHANUMERIC.remove(b'-').remove(b'_').remove(b'.').remove(b'~');

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("io error at {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("store schema version {found}, expected {expected}")]
    VersionMismatch { found: String, expected: u32 },
    #[error("integrity violation: {0}")]
    IntegrityViolation(String),
    #[error("unknown filter key {key:?} for {kind}")]
    UnknownFilter { kind: Kind, key: String },
    #[error("no {kind} record with id {id:?}")]
    NotFound { kind: Kind, id: String },
    #[error("corrupt record {kind}/{id}: {reason}")]
    CorruptRecord { kind: Kind, id: String, reason: String },
    #[error("corrupt event log {segment} line {line}: {reason}")]
    CorruptLog { segment: String, line: usize, reason: String },
    #[error("empty id for {0}")]
    EmptyId(Kind),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> StoreError + '_ {
    move |source| StoreError::Io { path: path.to_path_buf(), source }
}

/// A feedback event with its position in the log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoggedEvent {
    pub seq: u64,
    pub event: FeedbackEvent,
}

/// The full logical contents of a store.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoreSnapshot {
    pub version: u32,
    pub entities: BTreeMap<Kind, BTreeMap<String, Value>>,
    pub events: Vec<LoggedEvent>,
}

#[derive(Default)]
struct Inner {
    records: BTreeMap<Kind, BTreeMap<String, Value>>,
    events: Vec<LoggedEvent>,
}

pub struct Store {
    root: PathBuf,
    inner: RwLock<Inner>,
}

fn encode_id(id: &str) -> String {
    utf8_percent_encode(id, ID_ESCAPES).to_string()
}

fn segment_name(n: usize) -> String {
    format!("feedback-{n:06}.jsonl")
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), StoreError> {
    let tmp = path.with_extension("tmp");
    let mut file = File::create(&tmp).map_err(io_err(&tmp))?;
    file.write_all(bytes).map_err(io_err(&tmp))?;
    file.sync_all().map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(io_err(path))
}

fn field<'v>(value: &'v Value, path: &str) -> Option<&'v Value> {
    path.split('.').try_fold(value, |v, part| v.get(part))
}

fn field_matches(value: Option<&Value>, wanted: &str) -> bool {
    match value {
        Some(Value::String(s)) => s == wanted,
        Some(Value::Null) | None => false,
        Some(Value::Number(n)) => n.to_string() == wanted,
        Some(Value::Bool(b)) => b.to_string() == wanted,
        Some(_) => false,
    }
}

impl Store {
    /// Opens the store at `root`, creating an empty one if needed.
    pub fn open(root: impl Into<PathBuf>) -> Result<Store, StoreError> {
        let root = root.into();
        fs::create_dir_all(&root).map_err(io_err(&root))?;
        let version_path = root.join(VERSION_FILE);
        match fs::read_to_string(&version_path) {
            Ok(found) => {
                if found.trim() != SCHEMA_VERSION.to_string() {
                    return Err(StoreError::VersionMismatch { found: found.trim().to_string(), expected: SCHEMA_VERSION });
                }
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                write_atomic(&version_path, format!("{SCHEMA_VERSION}\n").as_bytes())?;
            }
            Err(e) => return Err(io_err(&version_path)(e)),
        }
        let mut inner = Inner::default();
        for kind in Kind::ALL {
            let dir = root.join(kind.dir_name());
            fs::create_dir_all(&dir).map_err(io_err(&dir))?;
            let records = inner.records.entry(kind).or_default();
            for entry in fs::read_dir(&dir).map_err(io_err(&dir))? {
                let path = entry.map_err(io_err(&dir))?.path();
                if path.extension().and_then(|e| e.to_str()) != Some("json") {
                    continue;
                }
                let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
                let id = percent_decode_str(stem).decode_utf8_lossy().into_owned();
                let text = fs::read_to_string(&path).map_err(io_err(&path))?;
                let value: Value = serde_json::from_str(&text).map_err(|e| StoreError::CorruptRecord {
                    kind,
                    id: id.clone(),
                    reason: e.to_string(),
                })?;
                records.insert(id, value);
            }
        }
        inner.events = read_log(&root.join(EVENTS_DIR))?;
        Ok(Store { root, inner: RwLock::new(inner) })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn read(&self) -> RwLockReadGuard<'_, Inner> {
        self.inner.read().unwrap_or_else(|e| e.into_inner())
    }

    fn write(&self) -> RwLockWriteGuard<'_, Inner> {
        self.inner.write().unwrap_or_else(|e| e.into_inner())
    }

    fn record_path(&self, kind: Kind, id: &str) -> PathBuf {
        self.root.join(kind.dir_name()).join(format!("{}.json", encode_id(id)))
    }

    fn persist(&self, inner: &mut Inner, kind: Kind, id: String, value: Value) -> Result<(), StoreError> {
        if id.is_empty() {
            return Err(StoreError::EmptyId(kind));
        }
        let text = serde_json::to_string_pretty(&value).expect("json value serializes");
        write_atomic(&self.record_path(kind, &id), text.as_bytes())?;
        inner.records.entry(kind).or_default().insert(id, value);
        Ok(())
    }

    /// Inserts or replaces a record.
    pub fn put<T: Entity>(&self, record: &T) -> Result<String, StoreError> {
        let value = serde_json::to_value(record).expect("entity serializes");
        let id = record.id();
        let mut inner = self.write();
        check_integrity(&inner, T::KIND, &value)?;
        self.persist(&mut inner, T::KIND, id.clone(), value)?;
        Ok(id)
    }

    pub fn get<T: Entity>(&self, id: &str) -> Result<Option<T>, StoreError> {
        let inner = self.read();
        inner.records.get(&T::KIND).and_then(|r| r.get(id)).map(|v| decode(T::KIND, id, v)).transpose()
    }

    /// Records whose fields equal every `(key, value)` filter, ordered by id.
    pub fn query<T: Entity>(&self, filters: &[(&str, &str)]) -> Result<Vec<T>, StoreError> {
        let paths = filters
            .iter()
            .map(|(key, wanted)| {
                T::FILTERS
                    .iter()
                    .find(|(k, _)| k == key)
                    .map(|(_, path)| (*path, *wanted))
                    .ok_or_else(|| StoreError::UnknownFilter { kind: T::KIND, key: key.to_string() })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let inner = self.read();
        let Some(records) = inner.records.get(&T::KIND) else {
            return Ok(Vec::new());
        };
        records
            .iter()
            .filter(|(_, v)| paths.iter().all(|(path, wanted)| field_matches(field(v, path), wanted)))
            .map(|(id, v)| decode(T::KIND, id, v))
            .collect()
    }

    pub fn all<T: Entity>(&self) -> Result<Vec<T>, StoreError> {
        self.query(&[])
    }

    pub fn count(&self, kind: Kind) -> usize {
        self.read().records.get(&kind).map_or(0, BTreeMap::len)
    }

    pub fn remove<T: Entity>(&self, id: &str) -> Result<bool, StoreError> {
        let mut inner = self.write();
        self.remove_locked(&mut inner, T::KIND, id)
    }

    fn remove_locked(&self, inner: &mut Inner, kind: Kind, id: &str) -> Result<bool, StoreError> {
        if inner.records.get_mut(&kind).and_then(|r| r.remove(id)).is_none() {
            return Ok(false);
        }
        let path = self.record_path(kind, id);
        fs::remove_file(&path).map_err(io_err(&path))?;
        Ok(true)
    }

    /// Replaces every record of `T`'s kind with `records`.
    pub fn replace_all<T: Entity>(&self, records: &[T]) -> Result<(), StoreError> {
        let mut inner = self.write();
        let mut fresh = BTreeMap::new();
        for r in records {
            let value = serde_json::to_value(r).expect("entity serializes");
            check_integrity(&inner, T::KIND, &value)?;
            fresh.insert(r.id(), value);
        }
        let stale: Vec<String> = inner
            .records
            .get(&T::KIND)
            .map(|r| r.keys().filter(|k| !fresh.contains_key(*k)).cloned().collect())
            .unwrap_or_default();
        for id in stale {
            self.remove_locked(&mut inner, T::KIND, &id)?;
        }
        for (id, value) in fresh {
            if inner.records.get(&T::KIND).and_then(|r| r.get(&id)) != Some(&value) {
                self.persist(&mut inner, T::KIND, id, value)?;
            }
        }
        Ok(())
    }

    /// Read-modify-write of one record under the writer lock. Nothing is
    /// written when `f` fails.
    pub fn update<T, E>(&self, id: &str, f: impl FnOnce(&mut T) -> Result<(), E>) -> Result<T, E>
    where
        T: Entity,
        E: From<StoreError>,
    {
        let mut inner = self.write();
        let current = inner
            .records
            .get(&T::KIND)
            .and_then(|r| r.get(id))
            .ok_or_else(|| StoreError::NotFound { kind: T::KIND, id: id.to_string() })?;
        let mut record: T = decode(T::KIND, id, current)?;
        f(&mut record)?;
        if record.id() != id {
            return Err(StoreError::IntegrityViolation(format!("update changed id {id:?}")).into());
        }
        let value = serde_json::to_value(&record).expect("entity serializes");
        check_integrity(&inner, T::KIND, &value)?;
        self.persist(&mut inner, T::KIND, id.to_string(), value)?;
        Ok(record)
    }

    /// Appends a feedback event and returns its sequence number.
    pub fn append_event(&self, event: &FeedbackEvent) -> Result<u64, StoreError> {
        let mut inner = self.write();
        let seq = inner.events.last().map_or(1, |e| e.seq + 1);
        let logged = LoggedEvent { seq, event: event.clone() };
        let dir = self.root.join(EVENTS_DIR);
        fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        let path = dir.join(segment_name(inner.events.len() / SEGMENT_CAPACITY + 1));
        let mut file = OpenOptions::new().create(true).append(true).open(&path).map_err(io_err(&path))?;
        let mut line = serde_json::to_string(&logged).expect("event serializes");
        line.push('\n');
        file.write_all(line.as_bytes()).map_err(io_err(&path))?;
        file.sync_data().map_err(io_err(&path))?;
        inner.events.push(logged);
        Ok(seq)
    }

    /// Every logged event in sequence order.
    pub fn replay_events(&self) -> Vec<LoggedEvent> {
        self.read().events.clone()
    }

    pub fn snapshot(&self) -> StoreSnapshot {
        let inner = self.read();
        StoreSnapshot { version: SCHEMA_VERSION, entities: inner.records.clone(), events: inner.events.clone() }
    }

    pub fn write_snapshot(&self, path: &Path) -> Result<(), StoreError> {
        let text = serde_json::to_string_pretty(&self.snapshot()).expect("snapshot serializes");
        write_atomic(path, text.as_bytes())
    }

    /// Rebuilds a store at `root` (which must be empty or absent) from a
    /// snapshot file.
    pub fn load(snapshot_path: &Path, root: impl Into<PathBuf>) -> Result<Store, StoreError> {
        let text = fs::read_to_string(snapshot_path).map_err(io_err(snapshot_path))?;
        let snapshot: StoreSnapshot = serde_json::from_str(&text).map_err(|e| StoreError::CorruptLog {
            segment: snapshot_path.display().to_string(),
            line: e.line(),
            reason: e.to_string(),
        })?;
        if snapshot.version != SCHEMA_VERSION {
            return Err(StoreError::VersionMismatch { found: snapshot.version.to_string(), expected: SCHEMA_VERSION });
        }
        let root = root.into();
        if root.exists() && fs::read_dir(&root).map_err(io_err(&root))?.next().is_some() {
            return Err(StoreError::IntegrityViolation(format!("{} is not empty", root.display())));
        }
        let store = Store::open(root)?;
        {
            let mut inner = store.write();
            for (kind, records) in snapshot.entities {
                for (id, value) in records {
                    store.persist(&mut inner, kind, id, value)?;
                }
            }
        }
        for logged in &snapshot.events {
            let seq = store.append_event(&logged.event)?;
            if seq != logged.seq {
                return Err(StoreError::CorruptLog {
                    segment: snapshot_path.display().to_string(),
                    line: 0,
                    reason: format!("event seq {} is not contiguous", logged.seq),
                });
            }
        }
        Ok(store)
    }
}

fn decode<T: Entity>(kind: Kind, id: &str, value: &Value) -> Result<T, StoreError> {
    T::deserialize(value).map_err(|e| StoreError::CorruptRecord { kind, id: id.to_string(), reason: e.to_string() })
}

/// Recommendations must reference a stored call and stored users; outbox
/// entries must reference a stored team.
fn check_integrity(inner: &Inner, kind: Kind, value: &Value) -> Result<(), StoreError> {
    let has = |k: Kind, id: &str| inner.records.get(&k).is_some_and(|r| r.contains_key(id));
    match kind {
        Kind::Recommendations => {
            let call = value.get("call_id").and_then(Value::as_str).unwrap_or_default();
            if !has(Kind::Calls, call) {
                return Err(StoreError::IntegrityViolation(format!("recommendation references unknown call {call:?}")));
            }
            let user_ids: BTreeSet<&str> = inner
                .records
                .get(&Kind::Users)
                .into_iter()
                .flat_map(|r| r.values())
                .filter_map(|u| u.get("user_id").and_then(Value::as_str))
                .collect();
            let lead = value.get("lead").and_then(Value::as_str).unwrap_or_default();
            let members = value.get("members").and_then(Value::as_array).into_iter().flatten();
            for user in std::iter::once(lead).chain(members.filter_map(|m| m.get("user_id").and_then(Value::as_str))) {
                if !user_ids.contains(user) {
                    return Err(StoreError::IntegrityViolation(format!("recommendation references unknown user {user:?}")));
                }
            }
        }
        Kind::Outbox => {
            let team = value.get("team_id").and_then(Value::as_str).unwrap_or_default();
            if !has(Kind::Recommendations, team) {
                return Err(StoreError::IntegrityViolation(format!("notification references unknown team {team:?}")));
            }
        }
        _ => {}
    }
    Ok(())
}

fn read_log(dir: &Path) -> Result<Vec<LoggedEvent>, StoreError> {
    if !dir.exists() {
        return Ok(Vec::new());
    }
    let mut segments: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io_err(dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().and_then(|e| e.to_str()) == Some("jsonl"))
        .collect();
    segments.sort();
    let mut events: Vec<LoggedEvent> = Vec::new();
    for (i, path) in segments.iter().enumerate() {
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default().to_string();
        if name != segment_name(i + 1) {
            return Err(StoreError::CorruptLog { segment: name, line: 0, reason: "unexpected segment name".into() });
        }
        let file = File::open(path).map_err(io_err(path))?;
        for (n, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(io_err(path))?;
            if line.trim().is_empty() {
                continue;
            }
            let corrupt = |reason: String| StoreError::CorruptLog { segment: name.clone(), line: n + 1, reason };
            let logged: LoggedEvent = serde_json::from_str(&line).map_err(|e| corrupt(e.to_string()))?;
            let expected = events.last().map_or(1, |e| e.seq + 1);
            if logged.seq != expected {
                return Err(corrupt(format!("expected seq {expected}, found {}", logged.seq)));
            }
            events.push(logged);
        }
    }
    Ok(events)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use serde_json::json;

    #[test]
    fn dotted_field_lookup() {
        let v = json!({"state": {"status": "notified"}, "year": 2015});
        assert!(field_matches(field(&v, "state.status"), "notified"));
        assert!(field_matches(field(&v, "year"), "2015"));
        assert!(!field_matches(field(&v, "state.missing"), ""));
    }

    #[test]
    fn safe_ids_stay_readable() {
        assert_eq!(encode_id("nsf-aics~amara"), "nsf-aics~amara");
        assert_eq!(encode_id("a/b"), "a%2Fb");
    }

    proptest! {
        #[test]
        fn id_encoding_round_trips(id in "\\PC{1,24}") {
            let encoded = encode_id(&id);
            prop_assert!(!encoded.contains('/'));
            prop_assert_eq!(percent_decode_str(&encoded).decode_utf8().unwrap(), id);
        }
    }
}
