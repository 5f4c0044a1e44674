//! CSV output for runs, sweeps and the reproduction checks.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so every
//! value parses back to the identical `f64`. Undefined values are empty
//! fields.

use std::io::Write;

use crate::analysis::{brute_force_qber_oracle, faked_state_qber};
use crate::attacks::AttackStrategy;
use crate::engine::{receiver_quadruple, Scenario, SimResult};
use crate::error::Result;
use crate::protocol::ReceiverConfig;
use crate::types::Bit;

pub const SWEEP_HEADER: [&str; 8] = [
    "parameter_value",
    "qber",
    "qber_stderr",
    "sifted_rate",
    "eve_info",
    "key_rate_bound",
    "insecure_flag",
    "analytic_qber",
];

pub const RUN_HEADER: [&str; 14] = [
    "emitted",
    "detected",
    "sifted",
    "qber",
    "qber_stderr",
    "sifted_rate",
    "eve_info",
    "key_rate_bound",
    "insecure_flag",
    "analytic_qber",
    "guess_error",
    "rate_alarm",
    "window_alarm",
    "estimated_ratio",
];

pub const CHECK_HEADER: [&str; 5] = ["check_name", "expected", "observed", "tolerance", "pass"];

fn num(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn flag(v: Option<bool>) -> String {
    v.map(|b| b.to_string()).unwrap_or_default()
}

/// Closed-form QBER for the scenario's attack where one exists: the
/// faked-state expression, zero for the time shift, and the enumeration
/// oracle for shift-and-flip when the shifted photons cannot reach a
/// neighbouring slot's gates.
pub fn analytic_qber(s: &Scenario) -> Option<f64> {
    let receiver = s.receiver.build().ok()?;
    match (&s.attack, &receiver) {
        (AttackStrategy::FakedState, _) => faked_state_qber(&receiver_quadruple(&receiver).ok()?).ok(),
        (AttackStrategy::TimeShift { .. }, _) => Some(0.0),
        (AttackStrategy::ShiftAndFlip { delta }, ReceiverConfig::TimeMux(c)) => {
            let wraps = c.gate_efficiency(Bit::Zero, c.gate1_offset + delta - c.pulse_period) > 0.0
                || c.gate_efficiency(Bit::One, c.gate0_offset - delta + c.pulse_period) > 0.0;
            if wraps || (*delta - c.delta_t()).abs() > 1e-12 {
                return None;
            }
            brute_force_qber_oracle(&receiver_quadruple(&receiver).ok()?, &s.attack)
                .ok()
                .map(|o| o.qber)
        }
        _ => None,
    }
}

fn common_fields(s: &Scenario, r: &SimResult) -> [String; 7] {
    [
        num(r.qber),
        num(r.qber.map(|_| r.stderr_qber)),
        r.sifted_rate.to_string(),
        num(r.empirical_eve_info),
        num(r.assessment.map(|a| a.key_rate_upper_bound)),
        flag(r.assessment.map(|a| a.insecure)),
        num(analytic_qber(s)),
    ]
}

pub fn write_run_csv<W: Write>(out: W, s: &Scenario, r: &SimResult) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RUN_HEADER)?;
    let mut row = vec![r.emitted.to_string(), r.detected.to_string(), r.sifted.to_string()];
    row.extend(common_fields(s, r));
    row.push(num(r.guess_error));
    row.push(flag(r.monitor.map(|m| m.rate_alarm)));
    row.push(flag(r.monitor.map(|m| m.window_alarm)));
    row.push(num(r.estimated_ratio));
    w.write_record(&row)?;
    w.flush()?;
    Ok(())
}

/// One row per sweep point; `scenarios[i]` is the scenario that produced
/// `points[i]`.
pub fn write_sweep_csv<W: Write>(out: W, scenarios: &[Scenario], points: &[(f64, SimResult)]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for (s, (value, r)) in scenarios.iter().zip(points) {
        let mut row = vec![value.to_string()];
        row.extend(common_fields(s, r));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub name: String,
    pub expected: f64,
    pub observed: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckRow {
    /// Passes iff `|observed - expected| <= tolerance`.
    pub fn within(name: &str, expected: f64, observed: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            // adding 0.0 turns -0.0 into 0.0 for output
            expected: expected + 0.0,
            observed: observed + 0.0,
            tolerance: tolerance + 0.0,
            pass: (observed - expected).abs() <= tolerance,
        }
    }
}

pub fn write_check_csv<W: Write>(out: W, rows: &[CheckRow]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CHECK_HEADER)?;
    for c in rows {
        w.write_record([
            c.name.clone(),
            c.expected.to_string(),
            c.observed.to_string(),
            c.tolerance.to_string(),
            c.pass.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Short human-readable summary of a run.
pub fn summary(s: &Scenario, r: &SimResult) -> String {
    let mut lines = vec![format!(
        "attack {}: {} emitted, {} detected, {} sifted",
        s.attack.name(),
        r.emitted,
        r.detected,
        r.sifted
    )];
    lines.push(match r.qber {
        Some(q) => format!("QBER {q} (stderr {})", r.stderr_qber),
        None => "QBER undefined (nothing sifted)".to_string(),
    });
    if let Some(a) = analytic_qber(s) {
        lines.push(format!("analytic QBER {a}"));
    }
    if let Some(i) = r.empirical_eve_info {
        lines.push(format!("Eve info {i} (guess error {})", num(r.guess_error)));
    }
    if let Some(a) = r.assessment {
        lines.push(format!(
            "key rate bound {} vs naive rate {}: {}",
            a.key_rate_upper_bound,
            a.naive_key_rate,
            if a.insecure { "INSECURE" } else { "not shown insecure" }
        ));
        if s.countermeasures.four_value {
            lines.push("(the bound assumes no four-value assignment; see Eve info above)".to_string());
        }
    }
    if let Some(m) = r.monitor {
        lines.push(format!(
            "monitor: detection rate {} vs baseline {}, {} out-of-window; rate alarm {}, window alarm {}",
            m.detection_rate, m.baseline_rate, m.out_of_window_count, m.rate_alarm, m.window_alarm
        ));
    }
    if let Some(x) = r.estimated_ratio {
        lines.push(format!("probed mismatch ratio {x}"));
    }
    lines.join("\n")
}
