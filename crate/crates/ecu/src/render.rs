//! Plain-text and JSON renderings of verification, audit and analysis
//! results.

use std::fmt::Write;

use ecu_core::audit::{AuditReport, CheckResult};
use ecu_core::reference::{ExampleReport, Status};
use ecu_core::stats::report::{GenderTable, LogitOutcome, MainReport, PilotReport, Proportion, LOGIT_COLUMNS};
use serde::Serialize;
use serde_json::{json, Value};

fn status_label(s: Status) -> &'static str {
    match s {
        Status::Pass => "PASS",
        Status::PassWithDiscrepancy => "PASS (printed value differs)",
        Status::FailAsPrinted => "FAIL-AS-PRINTED",
    }
}

pub fn examples_text(reports: &[ExampleReport]) -> String {
    let mut out = String::new();
    for r in reports {
        let _ = writeln!(out, "{}: {}", r.name, status_label(r.status()));
        for c in &r.comparisons {
            for v in [&c.first, &c.second] {
                let printed = v.printed.map_or(String::new(), |p| format!("  printed {p}"));
                let _ = writeln!(out, "    V({}) = {:.6}{printed}    [{}]", v.name, v.computed, v.lottery);
            }
            let _ = writeln!(
                out,
                "    claimed {:?}, computed {:?}: {}",
                c.claimed,
                c.computed,
                status_label(c.status)
            );
        }
        for n in &r.notes {
            let _ = writeln!(out, "    note: {n}");
        }
    }
    out
}

fn check(name: &str, c: Option<&CheckResult>) -> Value {
    match c {
        Some(c) => json!({
            "axiom": name,
            "status": if c.passed { "pass" } else { "fail" },
            "witnesses": c.witnesses,
        }),
        None => json!({"axiom": name, "status": "skipped", "witnesses": []}),
    }
}

/// Machine-readable audit: a list of `{axiom, status, witnesses}` plus the
/// recovered threshold.
pub fn audit_json(report: &AuditReport) -> Value {
    json!({
        "axioms": [
            check("monotonicity", Some(&report.monotonicity)),
            check("replacement_monotonicity", Some(&report.replacement)),
            check("solvability", Some(&report.solvability)),
            check("contextual_substitutability", report.substitutability.as_ref()),
            check("context_variation", report.context_variation.as_ref()),
        ],
        "dtilde": report.dtilde,
        "dtilde_error": report.dtilde_error,
        "phi": report.phi,
        "grid_limited": report.grid_limited,
        "passed": report.passed(),
    })
}

pub fn audit_text(report: &AuditReport) -> String {
    let doc = audit_json(report);
    let mut out = String::new();
    for a in doc["axioms"].as_array().into_iter().flatten() {
        let n = a["witnesses"].as_array().map_or(0, Vec::len);
        let _ = writeln!(out, "{:<30} {:<8} {n} witness(es)", a["axiom"].as_str().unwrap_or(""), a["status"].as_str().unwrap_or(""));
        for w in a["witnesses"].as_array().into_iter().flatten().take(3) {
            let _ = writeln!(out, "    {w}");
        }
    }
    match (&report.dtilde, &report.dtilde_error) {
        (Some(d), _) => {
            let _ = writeln!(out, "threshold d~ in ({}, {}]{}", d.lower, d.upper, if d.all_members { " (every grid prize is a member)" } else { "" });
        }
        (None, Some(e)) => {
            let _ = writeln!(out, "threshold not recovered: {e}");
        }
        _ => {}
    }
    let _ = writeln!(out, "overall: {}", if report.passed() { "PASS" } else { "FAIL" });
    if report.grid_limited {
        let _ = writeln!(out, "checks certify the evaluated grids only");
    }
    out
}

fn proportion(label: &str, p: &Proportion) -> String {
    let share = p.share.map_or("-".into(), |s| format!("{:.1}%", 100.0 * s));
    let test = p.test.as_ref().map_or(String::new(), |t| format!("  p = {:.4e}  95% CI [{:.4}, 1]", t.p_value, t.ci_lower));
    format!("{label:<44} {:>4} / {:<4} {share:>7}{test}\n", p.count, p.of)
}

fn gender_table(title: &str, g: &GenderTable) -> String {
    let t = &g.table;
    let mut out = format!("{title}\n              Female   Male\n");
    let _ = writeln!(out, "  no switch   {:>6} {:>6}", t.a, t.b);
    let _ = writeln!(out, "  switch      {:>6} {:>6}", t.c, t.d);
    if let Some(f) = &g.fisher {
        let _ = writeln!(out, "  Fisher exact: two-sided {:.3}, one-sided {:.3}", f.p_two_sided, f.p_one_sided);
    }
    out
}

pub fn main_text(r: &MainReport) -> String {
    let mut out = format!("participants: {}\n", r.participants);
    out += &proportion("switched in stage 1", &r.stage1_switchers);
    out += &proportion("switched in stage 2", &r.stage2_switchers);
    out += &proportion("stage-2 switch | stage-1 switch", &r.stage2_given_stage1_switch);
    out += &proportion("stage-2 switch | no stage-1 switch", &r.stage2_given_no_stage1_switch);
    out += &proportion("switched in neither stage", &r.dual_non_switchers);
    let _ = writeln!(out, "switched in both stages: {}", r.dual_switchers);
    out += "stage-3 reversals\n";
    for p in &r.stage3 {
        out += &proportion(&format!("  {:?}", p.kind), &p.overall);
        out += &proportion("    among dual switchers", &p.among_dual_switchers);
    }
    if let Some(g) = &r.gender {
        out += &gender_table("stage 1 by gender", &g.stage1);
        out += &gender_table("stage 2 by gender", &g.stage2);
        out += &gender_table("stage 2 by gender, stage-1 switchers", &g.stage2_among_stage1_switchers);
    }
    match &r.logit {
        Some(LogitOutcome::Fitted(f)) => {
            let _ = writeln!(out, "reversal logit (clustered SEs){}", if f.converged { "" } else { " NOT CONVERGED" });
            for (i, name) in LOGIT_COLUMNS.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "  {name:<18} {:>10.4} {:>10.4} {:>8.3} {:>8.4}",
                    f.coefficients[i], f.std_errors[i], f.z_values[i], f.p_values[i]
                );
            }
        }
        Some(LogitOutcome::Failed { reason }) => {
            let _ = writeln!(out, "reversal logit failed: {reason}");
        }
        None => {}
    }
    out
}

pub fn pilot_text(r: &PilotReport) -> String {
    let mut out = String::new();
    for s in &r.sessions {
        let _ = writeln!(out, "{}", s.name);
        for (label, st) in [("stage 1", &s.stage1), ("stage 2", &s.stage2)] {
            let mean = st.mean_switches_conditional.map_or("-".into(), |m| format!("{m:.2}"));
            let _ = writeln!(
                out,
                "  {label}: {} of {} switched, {} once, mean switches among switchers {mean}",
                st.n_switchers, st.participants, st.n_single_switchers
            );
        }
        let _ = writeln!(out, "  switched in both stages: {}, in neither: {}", s.switched_both, s.switched_neither);
    }
    out
}

/// Pretty JSON of any serializable report.
pub fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports always serialize")
}
