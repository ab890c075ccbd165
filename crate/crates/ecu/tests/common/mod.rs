//! Service scenarios shared by the persistence tests and the acceptance run.
//! Each returns a one-line summary or a description of the first mismatch.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::Path;

use ecu::content::Content;
use ecu::service::Engine;
use ecu::session::{Session, Stage};
use ecu::simulate::{self, Agent, Population};
use ecu::store::{Store, LOG_FILE};
use ecu::transcript;
use ecu_core::stats::report::{main_report, ParticipantRecord};

pub type Outcome = Result<String, String>;

fn fixed_clock() -> ecu::service::Clock {
    Box::new(|| 1_700_000_000_000)
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond { Ok(()) } else { Err(msg()) }
}

pub fn agents(n: usize, seed: u64) -> Vec<Agent> {
    simulate::population(Population::Mixed, n, seed, &Content::default().config)
}

/// Records the offline simulator produces for `agents`.
pub fn offline_records(agents: &[Agent]) -> Vec<ParticipantRecord> {
    let config = Content::default().config;
    agents.iter().map(|a| simulate::record(a, &simulate::run_offline(a, &config).expect("offline run"))).collect()
}

/// Records parsed back from the engine's export, renamed to agent ids and
/// put in agent order.
pub fn exported_records(engine: &Engine, ids: &BTreeMap<String, String>, agents: &[Agent]) -> Result<Vec<ParticipantRecord>, String> {
    let csv = engine.export_csv();
    let mut by_agent: BTreeMap<String, ParticipantRecord> = BTreeMap::new();
    for mut r in transcript::records(csv.as_bytes()).map_err(|e| e.to_string())? {
        let agent = ids.get(&r.id).ok_or_else(|| format!("export has unknown session {}", r.id))?.clone();
        r.id = agent.clone();
        by_agent.insert(agent, r);
    }
    agents.iter().map(|a| by_agent.remove(&a.id).ok_or_else(|| format!("{} missing from export", a.id))).collect()
}

fn compare_records(live: &[ParticipantRecord], offline: &[ParticipantRecord]) -> Result<(), String> {
    for (l, o) in live.iter().zip(offline) {
        check(l == o, || format!("{}: live {l:?} != offline {o:?}", l.id))?;
    }
    check(live.len() == offline.len(), || format!("{} live records, {} offline", live.len(), offline.len()))
}

fn open(dir: &Path, snapshot_every: u64) -> Result<(Engine, ecu::store::Recovery), String> {
    let content = Content::default();
    let (store, recovery) = Store::open(dir, &content).map_err(|e| e.to_string())?;
    let sessions = recovery.sessions.clone();
    Ok((Engine::with_store(content, store.with_snapshot_every(snapshot_every), sessions).clock(fixed_clock()), recovery))
}

/// Drives `n` agents to completion over a persistent store, then checks
/// that reopening the store and replaying each session's log both rebuild
/// exactly the live sessions.
pub fn replay_equality(dir: &Path, n: usize) -> Outcome {
    let agents = agents(n, 17);
    let (engine, _) = open(dir, 64)?;
    for a in &agents {
        simulate::drive(&engine, a).map_err(|e| e.to_string())?;
    }
    let live: BTreeMap<String, Session> = engine.sessions().into_iter().map(|s| (s.id.clone(), s)).collect();
    let records = engine.store().expect("store").records().map_err(|e| e.to_string())?;
    drop(engine);

    let content = Content::default();
    for (id, log) in ecu::store::by_session(records) {
        let replayed = Session::replay(&content, &log).map_err(|e| format!("{id}: {e}"))?;
        check(live.get(&id) == Some(&replayed), || format!("{id}: replay differs from the live session"))?;
    }
    let (_, recovery) = open(dir, 64)?;
    check(recovery.sessions == live, || "reopened store differs from the live sessions".into())?;
    check(live.values().all(|s| s.stage == Stage::Done), || "not every session finished".into())?;
    Ok(format!("{n} sessions rebuilt identically from log and snapshot"))
}

/// Interrupts `n` interleaved sessions part way, tears the last log line,
/// resumes on a reopened store and compares every finished session with
/// the offline simulator.
pub fn crash_resume(dir: &Path, n: usize) -> Outcome {
    let agents = agents(n, 29);
    let mut ids = BTreeMap::new();
    let mut handles = Vec::new();
    {
        let (engine, _) = open(dir, 40)?;
        for a in &agents {
            let (id, token) = simulate::start(&engine, a).map_err(|e| e.to_string())?;
            ids.insert(id.clone(), a.id.clone());
            handles.push((id, token));
        }
        // Uneven progress: agent i takes i % 9 steps before the crash.
        for (i, (a, (id, token))) in agents.iter().zip(&handles).enumerate() {
            for _ in 0..i % 9 {
                simulate::step(&engine, a, id, token).map_err(|e| e.to_string())?;
            }
        }
    }
    let mut log = OpenOptions::new().append(true).open(dir.join(LOG_FILE)).map_err(|e| e.to_string())?;
    log.write_all(br#"{"session_id":"torn","seq":1,"timestamp_ms":"#).map_err(|e| e.to_string())?;
    drop(log);

    let (engine, recovery) = open(dir, 40)?;
    check(recovery.truncated_bytes > 0, || "torn tail was not detected".into())?;
    check(recovery.sessions.len() == n, || format!("recovered {} of {n} sessions", recovery.sessions.len()))?;
    for (a, (id, token)) in agents.iter().zip(&handles) {
        while simulate::step(&engine, a, id, token).map_err(|e| format!("{}: {e}", a.id))? {}
    }
    compare_records(&exported_records(&engine, &ids, &agents)?, &offline_records(&agents))?;
    for (a, (id, token)) in agents.iter().zip(&handles) {
        let sim = simulate::run_offline(a, &engine.content().config).map_err(|e| e.to_string())?;
        let view = engine.view(id, Some(token)).map_err(|e| format!("{e:?}"))?;
        check(view.payment.as_ref() == Some(&sim.payment), || format!("{}: payment differs after resume", a.id))?;
    }
    Ok(format!("{n} sessions resumed after a torn write ({} bytes cut) and match offline runs", recovery.truncated_bytes))
}

/// Exports finished live sessions, parses the CSV back and checks the
/// analysis equals the one computed from offline records.
pub fn export_analyze(n: usize) -> Outcome {
    let agents = agents(n, 41);
    let engine = Engine::in_memory(Content::default()).clock(fixed_clock());
    let mut ids = BTreeMap::new();
    for a in &agents {
        let (id, _) = simulate::drive(&engine, a).map_err(|e| e.to_string())?;
        ids.insert(id, a.id.clone());
    }
    let live = exported_records(&engine, &ids, &agents)?;
    let offline = offline_records(&agents);
    compare_records(&live, &offline)?;
    let (from_export, expected) = (main_report(&live), main_report(&offline));
    check(from_export == expected, || "report from the export differs from the offline report".into())?;
    Ok(format!(
        "{n} exported sessions: stage 1 switchers {}/{}, stage 2 {}/{}, identical report",
        from_export.stage1_switchers.count,
        from_export.stage1_switchers.of,
        from_export.stage2_switchers.count,
        from_export.stage2_switchers.of
    ))
}

/// Sessions stepped from many threads at once must end exactly as when
/// they run one after another.
pub fn concurrent_independence(n: usize) -> Outcome {
    let agents = agents(n, 53);
    let serial = Engine::in_memory(Content::default()).clock(fixed_clock());
    let mut serial_ids = BTreeMap::new();
    for a in &agents {
        let (id, _) = simulate::drive(&serial, a).map_err(|e| e.to_string())?;
        serial_ids.insert(id, a.id.clone());
    }

    let shared = Engine::in_memory(Content::default()).clock(fixed_clock());
    let handles: Vec<(String, String)> =
        agents.iter().map(|a| simulate::start(&shared, a)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    let shared_ids: BTreeMap<String, String> = handles.iter().zip(&agents).map(|((id, _), a)| (id.clone(), a.id.clone())).collect();
    std::thread::scope(|scope| {
        let workers: Vec<_> = (0..8)
            .map(|w| {
                let (shared, agents, handles) = (&shared, &agents, &handles);
                scope.spawn(move || -> Result<(), String> {
                    // Each worker steps its sessions round-robin so steps interleave.
                    let mine: Vec<usize> = (w..agents.len()).step_by(8).collect();
                    let mut live = mine.clone();
                    while !live.is_empty() {
                        let mut next = Vec::new();
                        for &i in &live {
                            let (id, token) = &handles[i];
                            if simulate::step(shared, &agents[i], id, token).map_err(|e| e.to_string())? {
                                next.push(i);
                            }
                        }
                        live = next;
                    }
                    Ok(())
                })
            })
            .collect();
        workers.into_iter().try_for_each(|w| w.join().expect("worker panicked"))
    })?;
    let a = exported_records(&serial, &serial_ids, &agents)?;
    let b = exported_records(&shared, &shared_ids, &agents)?;
    check(a == b, || "interleaved sessions diverge from serial ones".into())?;
    Ok(format!("{n} sessions across 8 threads match serial execution"))
}
