//! Eve maps Bob's efficiency curves with faked pulses and reads off `r`.
//!
//! ```bash
//! cargo run --release --example efficiency_probe
//! ```

use qkd_timeshift::analysis::MismatchRatio;
use qkd_timeshift::attacks::{run_probe, Receiver};
use qkd_timeshift::engine::build_symmetric_receiver;
use qkd_timeshift::protocol::{MeasureOptions, ReceiverConfig};
use qkd_timeshift::rng::RandomStream;

fn main() -> qkd_timeshift::Result<()> {
    let cfg = build_symmetric_receiver(MismatchRatio::new(0.5)?, 0.5, -1.0, 1.0, 2.0)?;
    let mut bob = Receiver { config: ReceiverConfig::TwoDetector(cfg), opts: MeasureOptions::default() };
    let grid: Vec<f64> = (-8..=8).map(|i| i as f64 * 0.25).collect();
    let mut rng = RandomStream::new(2024, 0);

    let (est, samples) = run_probe(&grid, 40_000, &mut bob, &mut rng)?;
    println!("{} faked pulses", samples.len());
    println!("{:>6} {:>8} {:>8}", "delay", "eta0", "eta1");
    for ((d, e0), e1) in est.delays.iter().zip(&est.eta0).zip(&est.eta1) {
        println!("{d:>6.2} {e0:>8.4} {e1:>8.4}");
    }
    println!("t0 = {}, t1 = {}, estimated r = {:.4} (true 0.5)", est.t0, est.t1, est.ratio.value());
    Ok(())
}
