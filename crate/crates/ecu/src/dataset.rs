//! Raw-matrix CSV for pilot data.
//!
//! ```text
//! session,participant,s1_1,...,s1_10,s2_1,...,s2_10
//! session-1,1,1,1,1,0,0,0,1,1,1,1,...
//! ```
//!
//! Entries are the printed 0/1 digits. Which option a digit stands for is
//! not recorded, so matrices are built with [`Coding::Unknown`].

use std::io::{Read, Write};

use ecu_core::stats::pilot::PilotSession;
use ecu_core::stats::{ChoiceMatrix, Coding, StatsError};

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("header must be session,participant followed by s1_* then s2_* columns")]
    Header,
    #[error("line {line}: {message}")]
    Row { line: u64, message: String },
    #[error("session {session}: {source}")]
    Matrix { session: String, source: StatsError },
}

fn task_columns(header: &csv::StringRecord) -> Result<(usize, usize), DatasetError> {
    let cols: Vec<&str> = header.iter().collect();
    if cols.len() < 4 || cols[0] != "session" || cols[1] != "participant" {
        return Err(DatasetError::Header);
    }
    let s1 = cols[2..].iter().take_while(|c| c.starts_with("s1_")).count();
    let s2 = cols[2 + s1..].iter().take_while(|c| c.starts_with("s2_")).count();
    if s1 == 0 || s2 == 0 || 2 + s1 + s2 != cols.len() {
        return Err(DatasetError::Header);
    }
    Ok((s1, s2))
}

/// Reads pilot sessions; rows are grouped by the `session` column in
/// order of first appearance.
pub fn read_pilot<R: Read>(input: R) -> Result<Vec<PilotSession>, DatasetError> {
    let mut r = csv::Reader::from_reader(input);
    let (n1, n2) = task_columns(r.headers()?)?;
    type Rows = (Vec<String>, Vec<Vec<u8>>, Vec<Vec<u8>>);
    let mut sessions: Vec<(String, Rows)> = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let digits = rec
            .iter()
            .skip(2)
            .map(|f| match f.trim() {
                "0" => Ok(0u8),
                "1" => Ok(1u8),
                other => Err(DatasetError::Row { line, message: format!("entry {other:?} is not 0 or 1") }),
            })
            .collect::<Result<Vec<u8>, _>>()?;
        let name = rec[0].to_string();
        let idx = match sessions.iter().position(|(n, _)| *n == name) {
            Some(i) => i,
            None => {
                sessions.push((name, Default::default()));
                sessions.len() - 1
            }
        };
        let (ids, s1, s2) = &mut sessions[idx].1;
        ids.push(rec[1].to_string());
        s1.push(digits[..n1].to_vec());
        s2.push(digits[n1..n1 + n2].to_vec());
    }
    sessions
        .into_iter()
        .map(|(name, (ids, s1, s2))| {
            let err = |source| DatasetError::Matrix { session: name.clone(), source };
            Ok(PilotSession {
                stage1: ChoiceMatrix::new(ids.clone(), s1, Coding::Unknown).map_err(err)?,
                stage2: ChoiceMatrix::new(ids, s2, Coding::Unknown).map_err(err)?,
                name,
            })
        })
        .collect()
}

/// Writes sessions in the raw-matrix layout.
pub fn write_pilot<W: Write>(out: W, sessions: &[PilotSession]) -> Result<(), DatasetError> {
    let mut w = csv::Writer::from_writer(out);
    let (n1, n2) = sessions
        .first()
        .and_then(|s| Some((s.stage1.rows().first()?.len(), s.stage2.rows().first()?.len())))
        .unwrap_or((10, 10));
    let mut header = vec!["session".to_string(), "participant".to_string()];
    header.extend((1..=n1).map(|i| format!("s1_{i}")));
    header.extend((1..=n2).map(|i| format!("s2_{i}")));
    w.write_record(&header)?;
    for s in sessions {
        for ((id, a), b) in s.stage1.row_ids.iter().zip(s.stage1.rows()).zip(s.stage2.rows()) {
            let mut rec = vec![s.name.clone(), id.clone()];
            rec.extend(a.iter().chain(b).map(|d| d.to_string()));
            w.write_record(&rec)?;
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
