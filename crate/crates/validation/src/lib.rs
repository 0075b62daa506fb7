//! Reporting for the acceptance suite in `tests/acceptance.rs`.
//!
//! The suite lives in its own package so that `cargo test --workspace`
//! runs it after every other test binary: a failing criterion stops cargo,
//! and it should not hide the unit and integration results.

use std::time::{Duration, Instant};

/// Result of one criterion's numerical check.
pub struct Outcome {
    pub ok: bool,
    pub detail: String,
}

pub fn check(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

pub fn secs(s: u64) -> Option<Duration> {
    Some(Duration::from_secs(s))
}

/// Line printed for a finished criterion. Passing needs both the check and
/// the wall time within `limit`.
pub fn report_line(
    id: u32,
    title: &str,
    out: &Outcome,
    took: Duration,
    limit: Option<Duration>,
) -> (bool, String) {
    let in_time = limit.is_none_or(|l| took <= l);
    let ok = out.ok && in_time;
    let limit_text = limit.map_or("no limit".to_string(), |l| {
        format!("limit {}s", l.as_secs())
    });
    let time_flag = if in_time { "" } else { " OVER TIME" };
    let line = format!(
        "criterion {id:>2} {}: {title}: {} [{:.1}s, {limit_text}{time_flag}]",
        if ok { "PASS" } else { "FAIL" },
        out.detail,
        took.as_secs_f64()
    );
    (ok, line)
}

/// Times `f`, prints its line and returns whether it passed.
pub fn run(id: u32, title: &str, limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = f();
    let (ok, line) = report_line(id, title, &out, start.elapsed(), limit);
    println!("{line}");
    ok
}
