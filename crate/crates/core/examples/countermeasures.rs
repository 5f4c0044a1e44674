//! Defences against the time-shift attack side by side.
//!
//! ```bash
//! cargo run --release --example countermeasures
//! ```

use qkd_timeshift::analysis::MismatchRatio;
use qkd_timeshift::attacks::AttackStrategy;
use qkd_timeshift::engine::{run_scenario, Countermeasures, ReceiverSpec, Scenario};

fn show(label: &str, s: &Scenario) -> qkd_timeshift::Result<()> {
    let res = run_scenario(s)?;
    let monitor = res
        .monitor
        .map(|m| format!("rate {:.4} vs {:.4}, alarms {}/{}", m.detection_rate, m.baseline_rate, m.rate_alarm, m.window_alarm))
        .unwrap_or_else(|| "off".into());
    println!(
        "{label:<22} I(B:E) {:.4}  QBER {:.4}  monitor: {monitor}",
        res.empirical_eve_info.unwrap_or(f64::NAN),
        res.qber.unwrap_or(f64::NAN)
    );
    Ok(())
}

fn main() -> qkd_timeshift::Result<()> {
    let receiver = ReceiverSpec::SymmetricTwoDetector {
        r: MismatchRatio::new(0.2)?,
        peak: 0.8,
        t0: -1.0,
        t1: 1.0,
        gate_halfwidth: 2.0,
        dark_count_prob: 0.0,
    };
    let attack = AttackStrategy::TimeShift { shift_to_t0_prob: 0.5 };
    let base = Scenario::new(receiver, attack, 200_000, 11);

    show("undefended", &base)?;

    let mut s = base.clone();
    s.countermeasures = Countermeasures { four_value: true, ..Default::default() };
    show("four-value", &s)?;

    let mut s = base.clone();
    s.countermeasures.monitors = true;
    show("monitors", &s)?;

    // extra loss during calibration lowers the baseline Bob compares against
    let mut s = base.clone();
    s.countermeasures.monitors = true;
    s.eve_loss_mask = 0.75;
    show("monitors, loss masked", &s)?;

    let mut s = base.clone();
    s.countermeasures.gate_jitter_halfwidth = 1.0;
    show("gate jitter 1.0", &s)?;
    Ok(())
}
