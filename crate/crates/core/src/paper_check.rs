//! The reference figures of the attack analysis plus the statistical
//! acceptance checks, at fixed seeds.

use crate::analysis::{
    assess, binary_entropy, brute_force_qber_oracle, eve_info_band, faked_state_qber, faked_state_qber_symmetric,
    EfficiencyQuadruple, MismatchRatio,
};
use crate::attacks::{run_probe, AttackStrategy, Receiver};
use crate::detector::TimeMuxConfig;
use crate::engine::{binomial_stderr, build_symmetric_receiver, run_scenario, ReceiverSpec, Scenario, SimResult};
use crate::error::Result;
use crate::protocol::{MeasureOptions, ReceiverConfig};
use crate::report::{write_run_csv, CheckRow};
use crate::rng::{derive_seed, RandomStream};
use crate::types::EfficiencyCurve;

/// Root seed of every Monte Carlo check; individual checks derive from it.
pub const CHECK_SEED: u64 = 20_080_331;
pub const MC_PULSES: usize = 100_000;
pub const K_SIGMA: f64 = 3.0;
pub const EXACT_TOL: f64 = 1e-12;

fn symmetric(r: f64, peak: f64) -> Result<ReceiverSpec> {
    Ok(ReceiverSpec::SymmetricTwoDetector {
        r: MismatchRatio::new(r)?,
        peak,
        t0: -1.0,
        t1: 1.0,
        gate_halfwidth: 2.0,
        dark_count_prob: 0.0,
    })
}

fn time_mux(peak: f64, delta_t: f64) -> Result<ReceiverSpec> {
    Ok(ReceiverSpec::TimeMux(TimeMuxConfig {
        curve: EfficiencyCurve::triangle(0.0, 0.5, peak)?,
        gate0_offset: 0.0,
        gate1_offset: delta_t,
        pulse_period: 10.0,
        dark_count_prob: 0.0,
    }))
}

fn qber_of(r: &SimResult) -> f64 {
    r.qber.unwrap_or(f64::NAN)
}

fn analytic(rows: &mut Vec<CheckRow>) -> Result<()> {
    rows.push(CheckRow::within("h_two_thirds", 0.9183, binary_entropy(2.0 / 3.0)?, 5e-5));
    rows.push(CheckRow::within(
        "closed_form_qber_r0",
        0.0,
        faked_state_qber(&EfficiencyQuadruple::symmetric(0.5, 0.0)?)?,
        EXACT_TOL,
    ));
    rows.push(CheckRow::within(
        "closed_form_qber_r1",
        0.5,
        faked_state_qber(&EfficiencyQuadruple::symmetric(0.5, 1.0)?)?,
        EXACT_TOL,
    ));
    rows.push(CheckRow::within(
        "crossover_r02_symmetric",
        0.25,
        faked_state_qber_symmetric(MismatchRatio::new(0.2)?),
        EXACT_TOL,
    ));
    rows.push(CheckRow::within(
        "crossover_r02_quadruple",
        0.25,
        faked_state_qber(&EfficiencyQuadruple::symmetric(0.5, 0.2)?)?,
        EXACT_TOL,
    ));

    let mut rng = RandomStream::new(derive_seed(CHECK_SEED, 4), 0);
    let mut worst = 0.0f64;
    for _ in 0..32 {
        let q = EfficiencyQuadruple::new(
            rng.uniform_range(0.01, 1.0),
            rng.uniform_range(0.01, 1.0),
            rng.uniform_range(0.01, 1.0),
            rng.uniform_range(0.01, 1.0),
        )?;
        let oracle = brute_force_qber_oracle(&q, &AttackStrategy::FakedState)?.qber;
        worst = worst.max((oracle - faked_state_qber(&q)?).abs());
    }
    rows.push(CheckRow::within("oracle_vs_closed_form_max_diff", 0.0, worst, EXACT_TOL));

    let a = assess(MismatchRatio::new(2.0)?, 1.0);
    rows.push(CheckRow::within("insecure_r2_bound", 0.9183, a.key_rate_upper_bound, 5e-5));
    rows.push(CheckRow::within("insecure_r2_flag", 1.0, a.insecure as u8 as f64, 0.0));
    Ok(())
}

fn faked_state_mc(rows: &mut Vec<CheckRow>) -> Result<()> {
    for (i, r) in [0.0, 0.1, 0.2, 0.5, 1.0].into_iter().enumerate() {
        let spec = symmetric(r, 0.5)?;
        let expected = brute_force_qber_oracle(&receiver_quad(&spec)?, &AttackStrategy::FakedState)?.qber;
        let s = Scenario::new(spec, AttackStrategy::FakedState, MC_PULSES, derive_seed(CHECK_SEED, 50 + i as u64));
        let res = run_scenario(&s)?;
        let tol = K_SIGMA * binomial_stderr(expected, res.sifted);
        rows.push(CheckRow::within(&format!("qber_r{r}_faked"), expected, qber_of(&res), tol));
    }
    Ok(())
}

fn receiver_quad(spec: &ReceiverSpec) -> Result<EfficiencyQuadruple> {
    crate::engine::receiver_quadruple(&spec.build()?)
}

fn zero_error(rows: &mut Vec<CheckRow>) -> Result<()> {
    let s = Scenario::new(
        symmetric(0.5, 0.5)?,
        AttackStrategy::TimeShift { shift_to_t0_prob: 0.5 },
        MC_PULSES,
        derive_seed(CHECK_SEED, 60),
    );
    rows.push(CheckRow::within("time_shift_qber_zero", 0.0, qber_of(&run_scenario(&s)?), 0.0));
    let s = Scenario::new(
        time_mux(0.3, 3.0)?,
        AttackStrategy::ShiftAndFlip { delta: 3.0 },
        MC_PULSES,
        derive_seed(CHECK_SEED, 61),
    );
    rows.push(CheckRow::within("shift_and_flip_qber_zero", 0.0, qber_of(&run_scenario(&s)?), 0.0));
    Ok(())
}

fn guess_statistics(rows: &mut Vec<CheckRow>) -> Result<()> {
    for (i, r) in [0.0, 0.5, 1.0].into_iter().enumerate() {
        let s = Scenario::new(
            symmetric(r, 1.0)?,
            AttackStrategy::TimeShift { shift_to_t0_prob: 0.5 },
            MC_PULSES,
            derive_seed(CHECK_SEED, 70 + i as u64),
        );
        let res = run_scenario(&s)?;
        let expected = r / (r + 1.0);
        let observed = res.guess_error.unwrap_or(f64::NAN);
        let tol = K_SIGMA * binomial_stderr(expected, res.guessed);
        rows.push(CheckRow::within(&format!("guess_error_r{r}"), expected, observed, tol));

        let point = 1.0 - binary_entropy(expected)?;
        let (lo, hi) = eve_info_band(expected, res.guessed.max(1), K_SIGMA)?;
        let info = res.empirical_eve_info.unwrap_or(f64::NAN);
        let mut row = CheckRow::within(&format!("eve_info_r{r}"), point, info, (hi - lo).max(0.0));
        row.pass = info >= lo && info <= hi;
        rows.push(row);
    }
    Ok(())
}

/// Exact QBER of the wraparound shift-and-flip attack on a time-multiplexed
/// receiver with gate efficiency `eta` and shift `delta_t = period / 2`.
pub fn wraparound_qber_model(eta: f64) -> f64 {
    let a = eta / 2.0;
    let w = eta / 4.0;
    let fire = 1.0 - (1.0 - a) * (1.0 - w);
    let error = w * (1.0 - a) * (1.0 - w) + fire * w / 2.0;
    let detect = fire * (1.0 - w) + w * (1.0 - a) * (1.0 - w) + fire * w;
    error / detect
}

fn wraparound(rows: &mut Vec<CheckRow>) -> Result<()> {
    let s = Scenario::new(
        time_mux(0.1, 5.0)?,
        AttackStrategy::ShiftAndFlip { delta: 5.0 },
        MC_PULSES,
        derive_seed(CHECK_SEED, 90),
    );
    let res = run_scenario(&s)?;
    let tol = K_SIGMA * binomial_stderr(0.25, res.sifted);
    rows.push(CheckRow::within("timemux_wraparound", 0.25, qber_of(&res), tol));
    Ok(())
}

/// Repetitions, faked pulses per grid point and relative tolerance of the
/// probing check.
pub const PROBE_REPS: u64 = 10;
pub const PROBE_PULSES_PER_POINT: usize = 200_000;
pub const PROBE_REL_TOL: f64 = 0.1;

fn probing(rows: &mut Vec<CheckRow>) -> Result<()> {
    let r = 0.5;
    let cfg = build_symmetric_receiver(MismatchRatio::new(r)?, 0.5, -1.0, 1.0, 2.0)?;
    let grid = [-1.0, 0.0, 1.0];
    let mut ok = 0;
    for rep in 0..PROBE_REPS {
        let mut target = Receiver { config: ReceiverConfig::TwoDetector(cfg.clone()), opts: MeasureOptions::default() };
        let mut rng = RandomStream::new(derive_seed(CHECK_SEED, 100 + rep), 0);
        let (est, _) = run_probe(&grid, PROBE_PULSES_PER_POINT, &mut target, &mut rng)?;
        if ((est.ratio.value() - r) / r).abs() <= PROBE_REL_TOL {
            ok += 1;
        }
    }
    rows.push(CheckRow::within("probe_convergence_count", PROBE_REPS as f64, ok as f64, 1.0));
    Ok(())
}

fn countermeasures(rows: &mut Vec<CheckRow>) -> Result<()> {
    let mut s = Scenario::new(
        symmetric(0.0, 1.0)?,
        AttackStrategy::TimeShift { shift_to_t0_prob: 0.5 },
        440_000,
        derive_seed(CHECK_SEED, 110),
    );
    s.countermeasures.four_value = true;
    let res = run_scenario(&s)?;
    let (lo, hi) = eve_info_band(0.5, res.guessed.max(1), K_SIGMA)?;
    let info = res.empirical_eve_info.unwrap_or(f64::NAN);
    let mut row = CheckRow::within("four_value_eve_info", 0.0, info, hi);
    row.pass = info >= lo && info <= hi && res.guessed >= 100_000;
    rows.push(row);

    let mut s = Scenario::new(
        symmetric(0.5, 0.5)?,
        AttackStrategy::TimeShift { shift_to_t0_prob: 0.5 },
        MC_PULSES,
        derive_seed(CHECK_SEED, 120),
    );
    s.countermeasures.monitors = true;
    let alarm = run_scenario(&s)?.monitor.map(|m| m.rate_alarm).unwrap_or(false);
    rows.push(CheckRow::within("monitor_time_shift_rate_alarm", 1.0, alarm as u8 as f64, 0.0));

    let mut quiet = 0;
    for rep in 0..10 {
        let mut s = Scenario::new(symmetric(0.5, 0.5)?, AttackStrategy::NoAttack, MC_PULSES, derive_seed(CHECK_SEED, 130 + rep));
        s.countermeasures.monitors = true;
        if let Some(m) = run_scenario(&s)?.monitor {
            if !m.rate_alarm && !m.window_alarm {
                quiet += 1;
            }
        }
    }
    rows.push(CheckRow::within("monitor_no_attack_quiet_runs", 10.0, quiet as f64, 0.0));
    Ok(())
}

fn determinism(rows: &mut Vec<CheckRow>) -> Result<()> {
    let s = Scenario::new(symmetric(0.2, 0.5)?, AttackStrategy::FakedState, 20_000, derive_seed(CHECK_SEED, 140));
    let render = || -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        write_run_csv(&mut buf, &s, &run_scenario(&s)?)
            .map_err(|e| crate::Error::Config(format!("csv output failed: {e}")))?;
        Ok(buf)
    };
    let same = render()? == render()?;
    rows.push(CheckRow::within("run_csv_deterministic", 1.0, same as u8 as f64, 0.0));
    Ok(())
}

/// Runs every check. Errors only on internal failures; a failing check is a
/// row with `pass == false`.
pub fn run_checks() -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    analytic(&mut rows)?;
    faked_state_mc(&mut rows)?;
    zero_error(&mut rows)?;
    guess_statistics(&mut rows)?;
    wraparound(&mut rows)?;
    probing(&mut rows)?;
    countermeasures(&mut rows)?;
    determinism(&mut rows)?;
    Ok(rows)
}
