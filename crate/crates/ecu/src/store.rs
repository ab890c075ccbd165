//! Append-only event log with periodic snapshots.
//!
//! The store directory holds `events.jsonl` (one [`EventRecord`] per line,
//! for every session of the deployment) and `snapshot.json`. A snapshot
//! records each session's state and last sequence number; on open, log
//! records at or below that number are skipped and the rest replayed.
//!
//! A crash can leave a partial final line. Opening the store truncates it,
//! so the session resumes at the last complete event.

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::content::Content;
use crate::session::{EventRecord, Session, SessionError};

pub const LOG_FILE: &str = "events.jsonl";
pub const SNAPSHOT_FILE: &str = "snapshot.json";
pub const DEFAULT_SNAPSHOT_EVERY: u64 = 500;

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("store io at {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("corrupt log line {line}: {message}")]
    Corrupt { line: usize, message: String },
    #[error("corrupt snapshot: {0}")]
    Snapshot(String),
    #[error("replaying session {id}: {source}")]
    Replay { id: String, source: SessionError },
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> StoreError + '_ {
    move |source| StoreError::Io { path: path.display().to_string(), source }
}

#[derive(Debug, Serialize, Deserialize)]
struct Snapshot {
    sessions: Vec<Session>,
}

/// What [`Store::open`] found on disk.
#[derive(Debug, Default)]
pub struct Recovery {
    pub sessions: BTreeMap<String, Session>,
    /// Bytes of a partial trailing line that were cut off.
    pub truncated_bytes: u64,
    /// Log records applied on top of the snapshot.
    pub replayed: usize,
}

#[derive(Debug)]
pub struct Store {
    dir: PathBuf,
    log: Mutex<File>,
    since_snapshot: Mutex<u64>,
    snapshot_every: u64,
}

/// Reads every complete record; returns them with the byte length of the
/// valid prefix. Only the final line may be malformed.
fn read_log(path: &Path) -> Result<(Vec<EventRecord>, u64, u64), StoreError> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok((Vec::new(), 0, 0)),
        Err(e) => return Err(io(path)(e)),
    };
    let mut reader = BufReader::new(file);
    let mut records = Vec::new();
    let mut good = 0u64;
    let mut total = 0u64;
    let mut buf = Vec::new();
    let mut torn: Option<(usize, String)> = None;
    let mut line_no = 0;
    loop {
        buf.clear();
        let n = reader.read_until(b'\n', &mut buf).map_err(io(path))?;
        if n == 0 {
            break;
        }
        line_no += 1;
        total += n as u64;
        if let Some((line, message)) = torn.take() {
            // A bad line followed by more data is not a torn tail.
            return Err(StoreError::Corrupt { line, message });
        }
        let complete = buf.last() == Some(&b'\n');
        match serde_json::from_slice::<EventRecord>(&buf) {
            Ok(r) if complete => {
                records.push(r);
                good = total;
            }
            Ok(_) => torn = Some((line_no, "missing newline".into())),
            Err(e) => torn = Some((line_no, e.to_string())),
        }
    }
    Ok((records, good, total))
}

impl Store {
    /// Opens (creating if needed) the store at `dir` and rebuilds every
    /// session.
    pub fn open(dir: &Path, content: &Content) -> Result<(Self, Recovery), StoreError> {
        fs::create_dir_all(dir).map_err(io(dir))?;
        let log_path = dir.join(LOG_FILE);
        let (records, good, total) = read_log(&log_path)?;

        let mut sessions: BTreeMap<String, Session> = BTreeMap::new();
        let snap_path = dir.join(SNAPSHOT_FILE);
        match fs::read(&snap_path) {
            Ok(bytes) => {
                let snap: Snapshot = serde_json::from_slice(&bytes).map_err(|e| StoreError::Snapshot(e.to_string()))?;
                sessions.extend(snap.sessions.into_iter().map(|s| (s.id.clone(), s)));
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
            Err(e) => return Err(io(&snap_path)(e)),
        }

        let mut replayed = 0;
        for r in records {
            let replay = |source| StoreError::Replay { id: r.session_id.clone(), source };
            match sessions.get_mut(&r.session_id) {
                Some(s) if r.seq <= s.seq => continue,
                Some(s) => s.apply(content, &r).map_err(replay)?,
                None => {
                    let s = Session::create(&r.session_id, &r).map_err(replay)?;
                    sessions.insert(r.session_id.clone(), s);
                }
            }
            replayed += 1;
        }

        let mut file = OpenOptions::new().create(true).read(true).write(true).truncate(false).open(&log_path).map_err(io(&log_path))?;
        if good < total {
            file.set_len(good).map_err(io(&log_path))?;
        }
        file.seek(SeekFrom::End(0)).map_err(io(&log_path))?;
        let store = Self {
            dir: dir.to_path_buf(),
            log: Mutex::new(file),
            since_snapshot: Mutex::new(0),
            snapshot_every: DEFAULT_SNAPSHOT_EVERY,
        };
        Ok((store, Recovery { sessions, truncated_bytes: total - good, replayed }))
    }

    pub fn with_snapshot_every(mut self, events: u64) -> Self {
        self.snapshot_every = events.max(1);
        self
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Appends records as complete lines in one write.
    pub fn append(&self, records: &[EventRecord]) -> Result<(), StoreError> {
        let mut bytes = Vec::new();
        for r in records {
            serde_json::to_writer(&mut bytes, r).expect("records always serialize");
            bytes.push(b'\n');
        }
        let path = self.dir.join(LOG_FILE);
        let mut log = self.log.lock().expect("log lock poisoned");
        log.write_all(&bytes).map_err(io(&path))?;
        log.flush().map_err(io(&path))?;
        drop(log);
        *self.since_snapshot.lock().expect("snapshot lock poisoned") += records.len() as u64;
        Ok(())
    }

    /// Whether enough events were appended since the last snapshot.
    pub fn snapshot_due(&self) -> bool {
        *self.since_snapshot.lock().expect("snapshot lock poisoned") >= self.snapshot_every
    }

    /// Writes a snapshot atomically (temporary file, then rename).
    pub fn write_snapshot(&self, sessions: Vec<Session>) -> Result<(), StoreError> {
        let mut pending = self.since_snapshot.lock().expect("snapshot lock poisoned");
        let tmp = self.dir.join("snapshot.json.tmp");
        let bytes = serde_json::to_vec(&Snapshot { sessions }).expect("sessions always serialize");
        fs::write(&tmp, bytes).map_err(io(&tmp))?;
        let path = self.dir.join(SNAPSHOT_FILE);
        fs::rename(&tmp, &path).map_err(io(&path))?;
        *pending = 0;
        Ok(())
    }

    /// Every complete record in the log, in append order.
    pub fn records(&self) -> Result<Vec<EventRecord>, StoreError> {
        let _guard = self.log.lock().expect("log lock poisoned");
        Ok(read_log(&self.dir.join(LOG_FILE))?.0)
    }
}

/// Groups log records by session, keeping append order within each.
pub fn by_session(records: Vec<EventRecord>) -> BTreeMap<String, Vec<EventRecord>> {
    let mut map: BTreeMap<String, Vec<EventRecord>> = BTreeMap::new();
    for r in records {
        map.entry(r.session_id.clone()).or_default().push(r);
    }
    map
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::session::Event;

    fn created(id: &str) -> EventRecord {
        EventRecord {
            session_id: id.into(),
            seq: 1,
            timestamp_ms: 5,
            event: Event::Created { content_id: "default-v1".into(), seed: 9, token: "tok".into(), gender: None },
        }
    }

    fn quiz(id: &str, seq: u64) -> EventRecord {
        EventRecord { session_id: id.into(), seq, timestamp_ms: 6, event: Event::QuizSubmitted { answers: vec![0], passed: false } }
    }

    #[test]
    fn torn_tail_is_truncated() {
        let dir = tempfile::tempdir().unwrap();
        let c = Content::default();
        {
            let (store, rec) = Store::open(dir.path(), &c).unwrap();
            assert!(rec.sessions.is_empty());
            store.append(&[created("a"), quiz("a", 2)]).unwrap();
        }
        let path = dir.path().join(LOG_FILE);
        let mut f = OpenOptions::new().append(true).open(&path).unwrap();
        f.write_all(br#"{"session_id":"a","seq":3,"timest"#).unwrap();
        drop(f);
        let (store, rec) = Store::open(dir.path(), &c).unwrap();
        assert!(rec.truncated_bytes > 0);
        assert_eq!(rec.sessions["a"].seq, 2);
        store.append(&[quiz("a", 3)]).unwrap();
        let seqs: Vec<u64> = store.records().unwrap().iter().map(|r| r.seq).collect();
        assert_eq!(seqs, vec![1, 2, 3]);
    }

    #[test]
    fn corrupt_middle_line_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let c = Content::default();
        fs::write(dir.path().join(LOG_FILE), "garbage\n{}\n").unwrap();
        assert!(matches!(Store::open(dir.path(), &c), Err(StoreError::Corrupt { line: 1, .. })));
    }

    #[test]
    fn snapshot_then_log_tail() {
        let dir = tempfile::tempdir().unwrap();
        let c = Content::default();
        let (store, _) = Store::open(dir.path(), &c).unwrap();
        store.append(&[created("a"), quiz("a", 2)]).unwrap();
        let snap = Store::open(dir.path(), &c).unwrap().1.sessions;
        store.write_snapshot(snap.into_values().collect()).unwrap();
        store.append(&[quiz("a", 3)]).unwrap();
        let rec = Store::open(dir.path(), &c).unwrap().1;
        assert_eq!(rec.replayed, 1);
        assert_eq!(rec.sessions["a"].quiz_attempts_used, 2);
    }
}
