//! Time-shift attack on a two-detector receiver: no errors, yet Eve learns
//! part of the key.
//!
//! ```bash
//! cargo run --release --example time_shift_attack
//! ```

use qkd_timeshift::analysis::{eve_information, MismatchRatio};
use qkd_timeshift::attacks::AttackStrategy;
use qkd_timeshift::engine::{run_scenario, ReceiverSpec, Scenario};

fn main() -> qkd_timeshift::Result<()> {
    for r in [0.0, 0.25, 0.5, 1.0] {
        let ratio = MismatchRatio::new(r)?;
        let receiver = ReceiverSpec::SymmetricTwoDetector {
            r: ratio,
            peak: 1.0,
            t0: -1.0,
            t1: 1.0,
            gate_halfwidth: 2.0,
            dark_count_prob: 0.0,
        };
        let s = Scenario::new(receiver, AttackStrategy::TimeShift { shift_to_t0_prob: 0.5 }, 200_000, 7);
        let res = run_scenario(&s)?;
        let a = res.assessment.expect("time shift is assessed");
        println!(
            "r = {r:<4}  QBER {:?}  guess error {:.4} (expect {:.4})  I(B:E) {:.4} (expect {:.4})  insecure {}",
            res.qber,
            res.guess_error.unwrap_or(f64::NAN),
            ratio.guess_error_rate(),
            res.empirical_eve_info.unwrap_or(f64::NAN),
            eve_information(ratio),
            a.insecure
        );
    }
    Ok(())
}
