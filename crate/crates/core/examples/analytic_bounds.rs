//! Closed-form security figures as a function of the mismatch ratio `r`.
//!
//! ```bash
//! cargo run --example analytic_bounds
//! ```

use qkd_timeshift::analysis::{
    assess, eve_information, faked_state_qber_symmetric, key_rate_upper_bound, MismatchRatio,
};

fn main() -> qkd_timeshift::Result<()> {
    println!("{:>5} {:>12} {:>10} {:>10} {:>9}", "r", "faked QBER", "I(B:E)", "bound", "insecure");
    for i in 0..=10 {
        let r = MismatchRatio::new(i as f64 / 10.0)?;
        let verdict = assess(r, 1.0);
        println!(
            "{:>5.1} {:>12.4} {:>10.4} {:>10.4} {:>9}",
            r.value(),
            faked_state_qber_symmetric(r),
            eve_information(r),
            key_rate_upper_bound(r),
            verdict.insecure
        );
    }

    // r > 1 just means the labels of the two detectors are swapped
    let r = MismatchRatio::new(2.0)?;
    println!("\nr = 2: bound {:.4}, insecure with naive rate 1: {}", key_rate_upper_bound(r), assess(r, 1.0).insecure);
    Ok(())
}
