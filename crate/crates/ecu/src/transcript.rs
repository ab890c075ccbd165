//! Session transcript CSV.
//!
//! One `task` row per answered task, then one `estimates` row per session
//! carrying the recorded thresholds, gender and flags. Lotteries use the
//! `prize:probability` text form.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use ecu_core::experiment::{Choice, ChoiceTask, Estimate, SessionFlag, SimulatedSession};
use ecu_core::stats::report::{Gender, ParticipantRecord};
use serde::{Deserialize, Serialize};

use crate::session::Session;

pub const HEADER: [&str; 12] = [
    "session_id",
    "kind",
    "stage",
    "row",
    "option_a",
    "option_b",
    "choice",
    "d_point",
    "tau_point",
    "gender",
    "flags",
    "timestamp",
];

#[derive(Debug, thiserror::Error)]
pub enum TranscriptError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("header does not match the transcript schema: {0}")]
    Header(String),
    #[error("session {id}: {message}")]
    Session { id: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowKind {
    Task,
    Estimates,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptRow {
    pub session_id: String,
    pub kind: RowKind,
    pub stage: Option<u8>,
    pub row: Option<usize>,
    pub option_a: String,
    pub option_b: String,
    pub choice: Option<Choice>,
    pub d_point: Option<f64>,
    pub tau_point: Option<f64>,
    pub gender: Option<Gender>,
    pub flags: String,
    pub timestamp: Option<u64>,
}

fn flag_name(f: SessionFlag) -> String {
    match serde_json::to_value(f) {
        Ok(serde_json::Value::String(s)) => s,
        _ => unreachable!("flags serialize as strings"),
    }
}

/// What a transcript needs from one participant.
pub struct TranscriptSource<'a> {
    pub id: &'a str,
    pub answers: Vec<(&'a ChoiceTask, Choice, Option<u64>)>,
    pub d: Option<Estimate>,
    pub tau: Option<Estimate>,
    pub gender: Option<Gender>,
    pub flags: &'a [SessionFlag],
    pub timestamp: Option<u64>,
}

impl<'a> TranscriptSource<'a> {
    pub fn from_session(s: &'a Session) -> Self {
        Self {
            id: &s.id,
            answers: s.answers.iter().map(|a| (&a.task, a.choice, Some(a.timestamp_ms))).collect(),
            d: s.d,
            tau: s.tau,
            gender: s.gender,
            flags: &s.flags,
            timestamp: Some(s.created_at_ms),
        }
    }

    pub fn from_simulation(id: &'a str, s: &'a SimulatedSession, gender: Option<Gender>) -> Self {
        Self {
            id,
            answers: s.tasks.iter().zip(&s.choices).map(|(t, &c)| (t, c, None)).collect(),
            d: Some(s.estimates.d),
            tau: s.estimates.tau,
            gender,
            flags: &s.flags,
            timestamp: None,
        }
    }

    fn rows(&self) -> impl Iterator<Item = TranscriptRow> + '_ {
        let tasks = self.answers.iter().map(|&(t, c, ts)| TranscriptRow {
            session_id: self.id.into(),
            kind: RowKind::Task,
            stage: Some(t.stage),
            row: Some(t.row),
            option_a: t.option_a.to_string(),
            option_b: t.option_b.to_string(),
            choice: Some(c),
            d_point: None,
            tau_point: None,
            gender: None,
            flags: String::new(),
            timestamp: ts,
        });
        let estimates = TranscriptRow {
            session_id: self.id.into(),
            kind: RowKind::Estimates,
            stage: None,
            row: None,
            option_a: String::new(),
            option_b: String::new(),
            choice: None,
            d_point: self.d.and_then(|e| e.point),
            tau_point: self.tau.and_then(|e| e.point),
            gender: self.gender,
            flags: self.flags.iter().map(|&f| flag_name(f)).collect::<Vec<_>>().join(";"),
            timestamp: self.timestamp,
        };
        tasks.chain(std::iter::once(estimates))
    }
}

/// Writes sources in the given order, header first.
pub fn write<W: Write>(out: W, sources: &[TranscriptSource<'_>]) -> Result<(), TranscriptError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(HEADER)?;
    for s in sources {
        for row in s.rows() {
            w.serialize(row)?;
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn to_string(sources: &[TranscriptSource<'_>]) -> String {
    let mut buf = Vec::new();
    write(&mut buf, sources).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("csv output is utf-8")
}

/// Reads all rows, checking the header.
pub fn read_rows<R: Read>(input: R) -> Result<Vec<TranscriptRow>, TranscriptError> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    if header.iter().ne(HEADER) {
        return Err(TranscriptError::Header(header.iter().collect::<Vec<_>>().join(",")));
    }
    Ok(r.deserialize().collect::<Result<Vec<TranscriptRow>, _>>()?)
}

/// Groups rows into one analysis record per session, in order of first
/// appearance. Choices within a stage are ordered by row.
pub fn records<R: Read>(input: R) -> Result<Vec<ParticipantRecord>, TranscriptError> {
    struct Acc {
        stages: [BTreeMap<usize, Choice>; 3],
        d: Option<f64>,
        tau: Option<f64>,
        gender: Option<Gender>,
        estimates: bool,
    }
    let mut order = Vec::new();
    let mut acc: BTreeMap<String, Acc> = BTreeMap::new();
    for row in read_rows(input)? {
        let bad = |message: String| TranscriptError::Session { id: row.session_id.clone(), message };
        let a = acc.entry(row.session_id.clone()).or_insert_with(|| {
            order.push(row.session_id.clone());
            Acc { stages: Default::default(), d: None, tau: None, gender: None, estimates: false }
        });
        match row.kind {
            RowKind::Task => {
                let (Some(stage @ 1..=3), Some(r), Some(c)) = (row.stage, row.row, row.choice) else {
                    return Err(bad("task row needs stage 1-3, row and choice".into()));
                };
                if a.stages[stage as usize - 1].insert(r, c).is_some() {
                    return Err(bad(format!("stage {stage} row {r} appears twice")));
                }
            }
            RowKind::Estimates => {
                if a.estimates {
                    return Err(bad("more than one estimates row".into()));
                }
                a.estimates = true;
                a.d = row.d_point;
                a.tau = row.tau_point;
                a.gender = row.gender;
            }
        }
    }
    Ok(order
        .into_iter()
        .map(|id| {
            let a = acc.remove(&id).expect("every ordered id was inserted");
            let [s1, s2, s3] = a.stages.map(|m| m.into_values().collect::<Vec<_>>());
            ParticipantRecord { id, stage1: s1, stage2: s2, stage3: s3, gender: a.gender, d: a.d, tau: a.tau }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ecu_core::experiment::{agents, simulate_session, ExperimentConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn empty_transcript_is_header_only() {
        let text = to_string(&[]);
        assert_eq!(text, format!("{}\n", HEADER.join(",")));
        assert!(records(text.as_bytes()).unwrap().is_empty());
    }

    #[test]
    fn simulated_session_round_trips() {
        let config = ExperimentConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let model = agents::switching_binary(&mut rng, &config);
        let sim = simulate_session(&model, &config, 11).unwrap();
        let text = to_string(&[TranscriptSource::from_simulation("p1", &sim, Some(Gender::Female))]);
        let rows = read_rows(text.as_bytes()).unwrap();
        assert_eq!(rows.iter().filter(|r| r.kind == RowKind::Task).count(), 28);
        assert_eq!(rows.len(), 29);
        let rec = &records(text.as_bytes()).unwrap()[0];
        assert_eq!(rec.stage1, sim.stage_choices(1).collect::<Vec<_>>());
        assert_eq!(rec.stage3, sim.stage_choices(3).collect::<Vec<_>>());
        assert_eq!(rec.d, sim.estimates.d.point);
        assert_eq!(rec.gender, Some(Gender::Female));
    }

    #[test]
    fn wrong_header_is_rejected() {
        assert!(matches!(records("a,b\n1,2\n".as_bytes()), Err(TranscriptError::Header(_))));
    }
}
