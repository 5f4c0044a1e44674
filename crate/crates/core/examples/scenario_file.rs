//! Scenarios as JSON: load a canned one, tweak it, write it back out and
//! run it.
//!
//! ```bash
//! cargo run --example scenario_file
//! cargo run --example scenario_file -- path/to/scenario.json
//! ```

use qkd_timeshift::engine::run_scenario;
use qkd_timeshift::report::{summary, write_run_csv};
use qkd_timeshift::scenario::{load_scenario, parse_scenario, to_json, CANNED};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("canned: {}", CANNED.iter().map(|(n, _)| *n).collect::<Vec<_>>().join(", "));

    let source = std::env::args().nth(1).unwrap_or_else(|| "timeshift_r0".into());
    let mut s = load_scenario(&source)?;
    s.n_pulses = 20_000;
    s.countermeasures.four_value = true;

    let text = to_json(&s);
    println!("{text}");
    assert_eq!(parse_scenario(&text)?, s);

    match parse_scenario(&text.replace("\"seed\"", "\"sed\"")) {
        Err(e) => println!("typo rejected: {e}"),
        Ok(_) => unreachable!(),
    }

    let res = run_scenario(&s)?;
    println!("{}", summary(&s, &res));
    write_run_csv(std::io::stdout().lock(), &s, &res)?;
    Ok(())
}
