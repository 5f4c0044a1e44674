use qkd_timeshift::analysis::MismatchRatio;
use qkd_timeshift::attacks::AttackStrategy;
use qkd_timeshift::engine::{run_scenario, sweep, sweep_scenarios, ReceiverSpec, Scenario, SweepParam};
use qkd_timeshift::report::{write_sweep_csv, SWEEP_HEADER};

fn symmetric(r: f64) -> ReceiverSpec {
    ReceiverSpec::SymmetricTwoDetector {
        r: MismatchRatio::new(r).unwrap(),
        peak: 0.5,
        t0: -1.0,
        t1: 1.0,
        gate_halfwidth: 2.0,
        dark_count_prob: 0.0,
    }
}

#[test]
fn faked_state_sweep_csv_carries_the_analytic_curve() {
    let base = Scenario::new(symmetric(0.0), AttackStrategy::FakedState, 20_000, 11);
    let values = [0.0, 0.25, 0.5, 0.75, 1.0];
    let scenarios = sweep_scenarios(&base, SweepParam::R, &values).unwrap();
    let points = sweep(&base, SweepParam::R, &values).unwrap();
    let mut buf = Vec::new();
    write_sweep_csv(&mut buf, &scenarios, &points).unwrap();

    let mut rdr = csv::Reader::from_reader(&buf[..]);
    assert_eq!(rdr.headers().unwrap().iter().collect::<Vec<_>>(), SWEEP_HEADER);
    let rows: Vec<_> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), values.len());
    for (row, r) in rows.iter().zip(values) {
        assert_eq!(row[0].parse::<f64>().unwrap(), r);
        let analytic: f64 = row[7].parse().unwrap();
        assert!((analytic - 2.0 * r / (1.0 + 3.0 * r)).abs() < 1e-12);
        let qber: f64 = row[1].parse().unwrap();
        let se: f64 = row[2].parse().unwrap();
        assert!((qber - analytic).abs() <= 4.0 * se.max(1e-9), "r = {r}: {qber} vs {analytic}");
    }
}

#[test]
fn time_shift_sweep_is_error_free_and_flags_insecurity() {
    let base = Scenario::new(symmetric(0.0), AttackStrategy::TimeShift { shift_to_t0_prob: 0.5 }, 20_000, 12);
    let points = sweep(&base, SweepParam::R, &[0.0, 0.3, 0.7, 0.9]).unwrap();
    for (r, res) in &points {
        assert_eq!(res.qber, Some(0.0), "r = {r}");
        let a = res.assessment.unwrap();
        assert!(a.insecure, "r = {r}");
        assert!((a.key_rate_upper_bound - h(r / (r + 1.0))).abs() < 1e-12);
    }
}

fn h(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        -(x * x.log2() + (1.0 - x) * (1.0 - x).log2())
    }
}

#[test]
fn sweep_points_are_reproducible_and_independent() {
    let base = Scenario::new(symmetric(0.3), AttackStrategy::FakedState, 10_000, 13);
    let a = sweep(&base, SweepParam::NPulses, &[5_000.0, 10_000.0]).unwrap();
    let b = sweep(&base, SweepParam::NPulses, &[5_000.0, 10_000.0]).unwrap();
    assert_eq!(a, b);
    assert_eq!(a[0].1.emitted, 5_000);
    assert_eq!(a[1].1.emitted, 10_000);
}

#[test]
fn faked_state_lowers_the_detection_rate() {
    for r in [0.0, 0.5] {
        let honest = run_scenario(&Scenario::new(symmetric(r), AttackStrategy::NoAttack, 50_000, 14)).unwrap();
        let faked = run_scenario(&Scenario::new(symmetric(r), AttackStrategy::FakedState, 50_000, 15)).unwrap();
        assert!(faked.detection_rate < honest.detection_rate, "r = {r}");
    }
}

#[test]
fn probe_scenario_recovers_the_ratio() {
    let text = qkd_timeshift::scenario::canned("probe_r05").unwrap();
    let s = qkd_timeshift::scenario::parse_scenario(text).unwrap();
    let mut estimates: Vec<f64> = (0..5)
        .map(|i| {
            let mut s = s.clone();
            s.seed = 1000 + i;
            run_scenario(&s).unwrap().estimated_ratio.unwrap()
        })
        .collect();
    estimates.sort_by(f64::total_cmp);
    assert!((estimates[2] - 0.5).abs() < 0.1, "{estimates:?}");
}

#[test]
fn asymmetric_receiver_runs_without_an_assessment() {
    use qkd_timeshift::detector::TwoDetectorConfig;
    use qkd_timeshift::types::EfficiencyCurve;
    let cfg = TwoDetectorConfig {
        curve_bit0: EfficiencyCurve::new(vec![(-2.0, 0.0), (-1.0, 0.45), (1.0, 0.08), (2.0, 0.0)]).unwrap(),
        curve_bit1: EfficiencyCurve::new(vec![(-2.0, 0.0), (-1.0, 0.12), (1.0, 0.40), (2.0, 0.0)]).unwrap(),
        gate_center_offset: 0.0,
        t0: -1.0,
        t1: 1.0,
        dark_count_prob: 0.0,
    };
    let res = run_scenario(&Scenario::new(ReceiverSpec::TwoDetector(cfg), AttackStrategy::FakedState, 20_000, 16)).unwrap();
    assert!(res.assessment.is_none());
    assert!(res.qber.is_some());
}

#[test]
fn empty_sweep_is_empty() {
    let base = Scenario::new(symmetric(0.3), AttackStrategy::FakedState, 1_000, 17);
    assert!(sweep(&base, SweepParam::R, &[]).unwrap().is_empty());
}

#[test]
fn analytic_column_to_four_figures() {
    let base = Scenario::new(symmetric(0.0), AttackStrategy::FakedState, 1_000, 18);
    let values = [0.0, 0.25, 0.5, 0.75, 1.0];
    let scenarios = sweep_scenarios(&base, SweepParam::R, &values).unwrap();
    let got: Vec<String> = scenarios
        .iter()
        .map(|s| format!("{:.4}", qkd_timeshift::report::analytic_qber(s).unwrap()))
        .collect();
    assert_eq!(got, ["0.0000", "0.2857", "0.4000", "0.4615", "0.5000"]);
}
