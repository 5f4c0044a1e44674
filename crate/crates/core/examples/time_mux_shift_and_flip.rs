//! Shift-and-flip on a time-multiplexed receiver. With the gates at most
//! half a period apart the attack is error-free; at exactly half a period
//! photons shifted into the next slot's gate add a 25% QBER.
//!
//! ```bash
//! cargo run --release --example time_mux_shift_and_flip
//! ```

use qkd_timeshift::attacks::AttackStrategy;
use qkd_timeshift::detector::TimeMuxConfig;
use qkd_timeshift::engine::{run_scenario, ReceiverSpec, Scenario};
use qkd_timeshift::types::EfficiencyCurve;

fn main() -> qkd_timeshift::Result<()> {
    let period = 10.0;
    for (peak, delta_t) in [(0.3, 2.0), (0.3, 3.0), (0.3, 4.0), (0.1, 5.0)] {
        let receiver = ReceiverSpec::TimeMux(TimeMuxConfig {
            curve: EfficiencyCurve::triangle(0.0, 0.5, peak)?,
            gate0_offset: 0.0,
            gate1_offset: delta_t,
            pulse_period: period,
            dark_count_prob: 0.0,
        });
        let s = Scenario::new(receiver, AttackStrategy::ShiftAndFlip { delta: delta_t }, 100_000, 3);
        let res = run_scenario(&s)?;
        println!(
            "delta_t = {delta_t} of {period}: QBER {:.4} ± {:.4} over {} sifted, Eve's guess error {:.4}",
            res.qber.unwrap_or(f64::NAN),
            res.stderr_qber,
            res.sifted,
            res.guess_error.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
