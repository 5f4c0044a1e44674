//! Faked-state attack: simulated QBER against the closed form and the
//! enumeration oracle, over a sweep of `r`. Writes the sweep as CSV to stdout.
//!
//! ```bash
//! cargo run --release --example faked_state_sweep > faked.csv
//! ```

use qkd_timeshift::analysis::{brute_force_qber_oracle, MismatchRatio};
use qkd_timeshift::attacks::AttackStrategy;
use qkd_timeshift::engine::{receiver_quadruple, sweep, sweep_scenarios, ReceiverSpec, Scenario, SweepParam};
use qkd_timeshift::report::write_sweep_csv;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let receiver = ReceiverSpec::SymmetricTwoDetector {
        r: MismatchRatio::new(0.0)?,
        peak: 0.5,
        t0: -1.0,
        t1: 1.0,
        gate_halfwidth: 2.0,
        dark_count_prob: 0.0,
    };
    let base = Scenario::new(receiver, AttackStrategy::FakedState, 100_000, 42);
    let values: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();

    let scenarios = sweep_scenarios(&base, SweepParam::R, &values)?;
    let points = sweep(&base, SweepParam::R, &values)?;

    for (s, (r, res)) in scenarios.iter().zip(&points) {
        let q = receiver_quadruple(&s.receiver.build()?)?;
        let oracle = brute_force_qber_oracle(&q, &AttackStrategy::FakedState)?;
        eprintln!(
            "r = {r:.1}: simulated {:.4} ± {:.4}, oracle {:.4}, sifted fraction {:.4} (oracle {:.4})",
            res.qber.unwrap_or(f64::NAN),
            res.stderr_qber,
            oracle.qber,
            res.sifted_rate,
            oracle.sifted_probability
        );
    }
    write_sweep_csv(std::io::stdout().lock(), &scenarios, &points)?;
    Ok(())
}
