//! Seeded Monte Carlo runs: source, channel, adversary, receiver, sifting
//! and analysis bound into one scenario.

use std::collections::HashMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analysis::{
    assess, empirical_eve_information, mismatch_ratio, EfficiencyQuadruple, MismatchRatio,
    SecurityAssessment, DEFAULT_NAIVE_RATE, DEFAULT_SYMMETRY_TOL,
};
use crate::attacks::{
    apply_faked_state, apply_shift_and_flip, apply_time_shift, estimate_from_samples, faked_probe_pulse,
    AttackStrategy, EveLog, ProbeSample,
};
use crate::detector::{TimeMuxConfig, TwoDetectorConfig};
use crate::error::{Error, Result};
use crate::protocol::{
    alice_emit, bob_measure_time_mux, bob_measure_two_spd, compute_qber, run_monitors, sift, AliceRecord,
    BobRecord, MeasureOptions, MonitorConfig, MonitorReport, ReceiverConfig,
};
use crate::rng::{derive_seed, RandomStream};
use crate::types::{Bit, EfficiencyCurve, Pulse, TimeNs};


/// Two-detector receiver whose channels realise a chosen mismatch ratio.
///
/// Both detectors share the open window `[c - w, c + w]` around the nominal
/// arrival `c = (t0 + t1) / 2`. SPD0 reaches `peak` at `t0` and `r * peak` at
/// `t1`; SPD1 is its mirror image. Both take `peak * (3 + r) / 4` at `c`, so
/// an on-time pulse sees the same efficiency on either channel and a pulse
/// moved to `t0` or `t1` is detected less often on average (for `r < 1`).
pub fn build_symmetric_receiver(
    r: MismatchRatio,
    peak: f64,
    t0: TimeNs,
    t1: TimeNs,
    gate_halfwidth: TimeNs,
) -> Result<TwoDetectorConfig> {
    let r = r.value();
    if !(peak > 0.0 && peak <= 1.0) {
        return Err(Error::Config(format!("peak efficiency must lie in (0, 1], got {peak}")));
    }
    if !(t0 < t1) {
        return Err(Error::Config(format!("t0 must precede t1 (t0 = {t0}, t1 = {t1})")));
    }
    let center = 0.5 * (t0 + t1);
    if !(gate_halfwidth > 0.5 * (t1 - t0)) {
        return Err(Error::Config(format!(
            "gate_halfwidth {gate_halfwidth} must exceed (t1 - t0) / 2 = {} so both attack times fall inside the gate",
            0.5 * (t1 - t0)
        )));
    }
    let low = r * peak;
    let mid = peak * (3.0 + r) / 4.0;
    if low > 1.0 || mid > 1.0 {
        return Err(Error::Config(format!("r = {r} with peak {peak} needs an efficiency above 1")));
    }
    let (lo, hi) = (center - gate_halfwidth, center + gate_halfwidth);
    Ok(TwoDetectorConfig {
        curve_bit0: EfficiencyCurve::new(vec![(lo, 0.0), (t0, peak), (center, mid), (t1, low), (hi, 0.0)])?,
        curve_bit1: EfficiencyCurve::new(vec![(lo, 0.0), (t0, low), (center, mid), (t1, peak), (hi, 0.0)])?,
        gate_center_offset: center,
        t0,
        t1,
        dark_count_prob: 0.0,
    })
}

/// Receiver description as it appears in a scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ReceiverSpec {
    /// Built by [`build_symmetric_receiver`]; the only form `r` can be swept on.
    SymmetricTwoDetector {
        r: MismatchRatio,
        peak: f64,
        t0: TimeNs,
        t1: TimeNs,
        gate_halfwidth: TimeNs,
        #[serde(default)]
        dark_count_prob: f64,
    },
    TwoDetector(TwoDetectorConfig),
    TimeMux(TimeMuxConfig),
}

impl ReceiverSpec {
    pub fn build(&self) -> Result<ReceiverConfig> {
        let cfg = match self {
            ReceiverSpec::SymmetricTwoDetector { r, peak, t0, t1, gate_halfwidth, dark_count_prob } => {
                let mut c = build_symmetric_receiver(*r, *peak, *t0, *t1, *gate_halfwidth)?;
                c.dark_count_prob = *dark_count_prob;
                ReceiverConfig::TwoDetector(c)
            }
            ReceiverSpec::TwoDetector(c) => ReceiverConfig::TwoDetector(c.clone()),
            ReceiverSpec::TimeMux(c) => ReceiverConfig::TimeMux(c.clone()),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn dark_count_prob_mut(&mut self) -> &mut f64 {
        match self {
            ReceiverSpec::SymmetricTwoDetector { dark_count_prob, .. } => dark_count_prob,
            ReceiverSpec::TwoDetector(c) => &mut c.dark_count_prob,
            ReceiverSpec::TimeMux(c) => &mut c.dark_count_prob,
        }
    }
}

fn default_rate_tolerance() -> f64 {
    0.1
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Countermeasures {
    #[serde(default)]
    pub four_value: bool,
    #[serde(default)]
    pub monitors: bool,
    #[serde(default)]
    pub gate_jitter_halfwidth: TimeNs,
    /// Relative detection-rate drop that trips the rate alarm.
    #[serde(default = "default_rate_tolerance")]
    pub rate_tolerance: f64,
    /// Slack around the gate windows for the timing monitor; negative values
    /// narrow the accepted window.
    #[serde(default)]
    pub guard_band: TimeNs,
}

impl Default for Countermeasures {
    fn default() -> Self {
        Self {
            four_value: false,
            monitors: false,
            gate_jitter_halfwidth: 0.0,
            rate_tolerance: default_rate_tolerance(),
            guard_band: 0.0,
        }
    }
}

fn one() -> f64 {
    1.0
}

fn default_naive_rate() -> f64 {
    DEFAULT_NAIVE_RATE
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub receiver: ReceiverSpec,
    pub attack: AttackStrategy,
    #[serde(default)]
    pub countermeasures: Countermeasures,
    pub n_pulses: usize,
    pub seed: u64,
    #[serde(default = "one")]
    pub channel_transmittance: f64,
    /// Factor applied to the calibrated baseline rate; below 1 when Eve added
    /// loss during calibration to hide her own.
    #[serde(default = "one")]
    pub eve_loss_mask: f64,
    /// Key rate an unaware Alice and Bob would extract.
    #[serde(default = "default_naive_rate")]
    pub naive_rate: f64,
}

impl Scenario {
    pub fn new(receiver: ReceiverSpec, attack: AttackStrategy, n_pulses: usize, seed: u64) -> Self {
        Self {
            receiver,
            attack,
            countermeasures: Countermeasures::default(),
            n_pulses,
            seed,
            channel_transmittance: 1.0,
            eve_loss_mask: 1.0,
            naive_rate: DEFAULT_NAIVE_RATE,
        }
    }

    pub fn validate(&self) -> Result<ReceiverConfig> {
        let receiver = self.receiver.build()?;
        self.attack.validate()?;
        if self.n_pulses == 0 {
            return Err(Error::Config("n_pulses must be at least 1".into()));
        }
        let in_unit = |name: &str, v: f64| {
            if v > 0.0 && v <= 1.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must lie in (0, 1], got {v}")))
            }
        };
        in_unit("channel_transmittance", self.channel_transmittance)?;
        in_unit("eve_loss_mask", self.eve_loss_mask)?;
        if !(0.0..=1.0).contains(&self.naive_rate) {
            return Err(Error::Config(format!("naive_rate must lie in [0, 1], got {}", self.naive_rate)));
        }
        let cm = &self.countermeasures;
        if !(0.0..=1.0).contains(&cm.rate_tolerance) {
            return Err(Error::Config(format!(
                "countermeasures.rate_tolerance must lie in [0, 1], got {}",
                cm.rate_tolerance
            )));
        }
        if !cm.guard_band.is_finite() {
            return Err(Error::Config("countermeasures.guard_band must be finite".into()));
        }
        if !(cm.gate_jitter_halfwidth >= 0.0) {
            return Err(Error::Config("countermeasures.gate_jitter_halfwidth must be nonnegative".into()));
        }
        if let ReceiverConfig::TimeMux(c) = &receiver {
            if cm.gate_jitter_halfwidth >= 0.5 * c.pulse_period {
                return Err(Error::Config(
                    "countermeasures.gate_jitter_halfwidth must stay below half the pulse period".into(),
                ));
            }
        }
        match (&self.attack, &receiver) {
            (AttackStrategy::TimeShift { .. } | AttackStrategy::FakedState, ReceiverConfig::TimeMux(_)) => {
                Err(Error::Config(format!(
                    "attack {} needs a two-detector receiver",
                    self.attack.name()
                )))
            }
            (AttackStrategy::ShiftAndFlip { .. }, ReceiverConfig::TwoDetector(_)) => Err(Error::Config(
                "attack shift_and_flip needs a time_mux receiver".into(),
            )),
            _ => Ok(receiver),
        }
    }

    fn measure_options(&self) -> MeasureOptions {
        MeasureOptions {
            four_value: self.countermeasures.four_value,
            gate_jitter_halfwidth: self.countermeasures.gate_jitter_halfwidth,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub emitted: u64,
    pub detected: u64,
    pub sifted: u64,
    /// `None` when nothing was sifted.
    pub qber: Option<f64>,
    /// Binomial standard error of `qber`.
    pub stderr_qber: f64,
    pub detection_rate: f64,
    pub sifted_rate: f64,
    /// Sifted pairs on which Eve logged a guess.
    pub guessed: u64,
    /// Fraction of guessed pairs where Eve's guess differs from Bob's bit.
    pub guess_error: Option<f64>,
    pub empirical_eve_info: Option<f64>,
    pub assessment: Option<SecurityAssessment>,
    pub monitor: Option<MonitorReport>,
    /// Mismatch ratio recovered by the probe attack.
    pub estimated_ratio: Option<f64>,
}

/// Standard error of a binomial proportion `p` over `n` trials.
pub fn binomial_stderr(p: f64, n: u64) -> f64 {
    if n == 0 {
        0.0
    } else {
        (p * (1.0 - p) / n as f64).sqrt()
    }
}

/// Raw logs of one simulated shard.
#[derive(Debug, Clone, Default)]
pub struct RunLogs {
    pub alice: Vec<AliceRecord>,
    pub bob: Vec<BobRecord>,
    pub eve: EveLog,
}

fn simulate_shard(
    s: &Scenario,
    receiver: &ReceiverConfig,
    attack: &AttackStrategy,
    start: u64,
    count: usize,
    rng: &mut RandomStream,
) -> RunLogs {
    let (alice, mut pulses): (Vec<AliceRecord>, Vec<Pulse>) = alice_emit(count, rng)
        .into_iter()
        .map(|(mut a, mut p)| {
            a.pulse_index += start;
            p.pulse_index += start;
            (a, p)
        })
        .unzip();

    if s.channel_transmittance < 1.0 {
        for p in &mut pulses {
            p.blocked = !rng.bernoulli(s.channel_transmittance);
        }
    }

    let mut eve = EveLog::default();
    let attack_times = match receiver {
        ReceiverConfig::TwoDetector(c) => (c.displacement_to(c.t0), c.displacement_to(c.t1)),
        ReceiverConfig::TimeMux(_) => (0.0, 0.0),
    };
    let mut probe_points = Vec::new();
    for p in &mut pulses {
        match attack {
            AttackStrategy::NoAttack => {}
            AttackStrategy::TimeShift { shift_to_t0_prob } => {
                if !p.blocked {
                    let (out, guess) = apply_time_shift(*shift_to_t0_prob, p, attack_times.0, attack_times.1, rng);
                    *p = out;
                    eve.guesses.insert(p.pulse_index, guess);
                }
            }
            AttackStrategy::FakedState => {
                if !p.blocked {
                    let (out, entry) = apply_faked_state(p, attack_times.0, attack_times.1, rng);
                    *p = out;
                    eve.guesses.insert(p.pulse_index, entry.result);
                    eve.measured.insert(p.pulse_index, (entry.basis, entry.result));
                }
            }
            AttackStrategy::ShiftAndFlip { delta } => {
                if !p.blocked {
                    let (out, guess) = apply_shift_and_flip(*delta, p, rng);
                    *p = out;
                    eve.guesses.insert(p.pulse_index, guess);
                }
            }
            AttackStrategy::Probe { block_fraction, delay_grid, pulses_per_point } => {
                // round-robin over the grid until every point has its quota
                let budget = delay_grid.len() * pulses_per_point;
                if probe_points.len() < budget && rng.bernoulli(*block_fraction) {
                    let delay = delay_grid[probe_points.len() % delay_grid.len()];
                    *p = faked_probe_pulse(p.pulse_index, delay, rng);
                    probe_points.push((p.pulse_index, delay, p.basis, p.bit));
                }
            }
        }
    }

    let opts = s.measure_options();
    let bob: Vec<BobRecord> = match receiver {
        ReceiverConfig::TwoDetector(c) => pulses.iter().map(|p| bob_measure_two_spd(c, p, opts, rng)).collect(),
        ReceiverConfig::TimeMux(c) => bob_measure_time_mux(c, &pulses, opts, rng),
    };

    if !probe_points.is_empty() {
        let by_index: HashMap<u64, &BobRecord> = bob.iter().map(|b| (b.pulse_index, b)).collect();
        eve.probe_stats = probe_points
            .into_iter()
            .map(|(idx, delay, basis, bit)| {
                let b = by_index[&idx];
                ProbeSample { delay, announced_basis_match: b.basis == basis, faked_bit: bit, detected: b.detected() }
            })
            .collect();
    }

    RunLogs { alice, bob, eve }
}

/// Simulates the scenario split over `shards` independent random streams
/// (`RandomStream::new(seed, shard)`), shards running on separate threads.
/// Logs are merged in pulse-index order.
pub fn simulate(s: &Scenario, shards: usize) -> Result<RunLogs> {
    let receiver = s.validate()?;
    simulate_with(s, &receiver, &s.attack, s.seed, shards)
}

fn simulate_with(
    s: &Scenario,
    receiver: &ReceiverConfig,
    attack: &AttackStrategy,
    seed: u64,
    shards: usize,
) -> Result<RunLogs> {
    let shards = shards.clamp(1, s.n_pulses);
    let base = s.n_pulses / shards;
    let extra = s.n_pulses % shards;
    let ranges: Vec<(u64, usize)> = (0..shards)
        .scan(0u64, |start, k| {
            let len = base + usize::from(k < extra);
            let r = (*start, len);
            *start += len as u64;
            Some(r)
        })
        .collect();

    let parts: Vec<RunLogs> = if shards == 1 {
        let mut rng = RandomStream::new(seed, 0);
        vec![simulate_shard(s, receiver, attack, 0, s.n_pulses, &mut rng)]
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = ranges
                .iter()
                .enumerate()
                .map(|(k, &(start, len))| {
                    scope.spawn(move || {
                        let mut rng = RandomStream::new(seed, k as u64);
                        simulate_shard(s, receiver, attack, start, len, &mut rng)
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("shard panicked")).collect()
        })
    };

    let mut merged = RunLogs::default();
    for part in parts {
        merged.alice.extend(part.alice);
        merged.bob.extend(part.bob);
        merged.eve.guesses.extend(part.eve.guesses);
        merged.eve.measured.extend(part.eve.measured);
        merged.eve.probe_stats.extend(part.eve.probe_stats);
    }
    Ok(merged)
}

/// Efficiencies of the receiver's channels at its attack times.
pub fn receiver_quadruple(receiver: &ReceiverConfig) -> Result<EfficiencyQuadruple> {
    match receiver {
        ReceiverConfig::TwoDetector(c) => EfficiencyQuadruple::new(
            c.curve_bit0.evaluate(c.t0),
            c.curve_bit0.evaluate(c.t1),
            c.curve_bit1.evaluate(c.t0),
            c.curve_bit1.evaluate(c.t1),
        ),
        ReceiverConfig::TimeMux(c) => EfficiencyQuadruple::new(
            c.gate_efficiency(Bit::Zero, c.gate0_offset),
            c.gate_efficiency(Bit::Zero, c.gate1_offset),
            c.gate_efficiency(Bit::One, c.gate0_offset),
            c.gate_efficiency(Bit::One, c.gate1_offset),
        ),
    }
}

pub fn run_scenario(s: &Scenario) -> Result<SimResult> {
    run_scenario_sharded(s, 1)
}

pub fn run_scenario_sharded(s: &Scenario, shards: usize) -> Result<SimResult> {
    let receiver = s.validate()?;
    let logs = simulate_with(s, &receiver, &s.attack, s.seed, shards)?;
    summarize(s, &receiver, &logs)
}

fn summarize(s: &Scenario, receiver: &ReceiverConfig, logs: &RunLogs) -> Result<SimResult> {
    let pairs = sift(&logs.alice, &logs.bob, &logs.eve.guesses)?;
    let emitted = logs.alice.len() as u64;
    let detected = logs.bob.iter().filter(|b| b.detected()).count() as u64;
    let sifted = pairs.len() as u64;
    let qber = compute_qber(&pairs).ok();

    let guessed: Vec<_> = pairs.iter().filter(|p| p.eve_guess.is_some()).collect();
    let guess_error = (!guessed.is_empty()).then(|| {
        guessed.iter().filter(|p| p.eve_guess != Some(p.bob_bit)).count() as f64 / guessed.len() as f64
    });
    let empirical_eve_info = if guessed.is_empty() { None } else { Some(empirical_eve_information(&pairs)?) };

    let assessment = match s.attack {
        AttackStrategy::TimeShift { .. } | AttackStrategy::FakedState | AttackStrategy::ShiftAndFlip { .. } => {
            // asymmetric receivers have no single r to assess
            mismatch_ratio(&receiver_quadruple(receiver)?, DEFAULT_SYMMETRY_TOL).ok().map(|r| {
                let mut a = assess(r, s.naive_rate);
                a.qber = qber.unwrap_or(0.0);
                a
            })
        }
        _ => None,
    };

    let estimated_ratio = match &s.attack {
        AttackStrategy::Probe { delay_grid, .. } => {
            Some(estimate_from_samples(delay_grid, &logs.eve.probe_stats)?.ratio.value())
        }
        _ => None,
    };

    let monitor = if s.countermeasures.monitors {
        let calibration = simulate_with(s, receiver, &AttackStrategy::NoAttack, derive_seed(s.seed, u64::MAX), 1)?;
        let calibrated = calibration.bob.iter().filter(|b| b.detected()).count() as f64 / s.n_pulses as f64;
        let cfg = MonitorConfig {
            baseline_rate: calibrated * s.eve_loss_mask,
            rate_tolerance: s.countermeasures.rate_tolerance,
            guard_band: s.countermeasures.guard_band,
        };
        Some(run_monitors(&logs.bob, &receiver.gate_windows(), &cfg))
    } else {
        None
    };

    Ok(SimResult {
        emitted,
        detected,
        sifted,
        qber,
        stderr_qber: qber.map_or(0.0, |q| binomial_stderr(q, sifted)),
        detection_rate: detected as f64 / emitted as f64,
        sifted_rate: sifted as f64 / emitted as f64,
        guessed: guessed.len() as u64,
        guess_error,
        empirical_eve_info,
        assessment,
        monitor,
        estimated_ratio,
    })
}

/// Scalars a sweep can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    /// Mismatch ratio of a `symmetric_two_detector` receiver.
    R,
    /// Gate separation of a `time_mux` receiver; also the shift of a
    /// shift-and-flip attack.
    DeltaT,
    DarkCountProb,
    NPulses,
    BlockFraction,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::R => "r",
            SweepParam::DeltaT => "delta_t",
            SweepParam::DarkCountProb => "dark_count_prob",
            SweepParam::NPulses => "n_pulses",
            SweepParam::BlockFraction => "block_fraction",
        }
    }

    /// Copy of `base` with this parameter set to `value`.
    pub fn apply(self, base: &Scenario, value: f64) -> Result<Scenario> {
        let mut s = base.clone();
        match self {
            SweepParam::R => match &mut s.receiver {
                ReceiverSpec::SymmetricTwoDetector { r, .. } => *r = MismatchRatio::new(value)?,
                _ => return Err(Error::Config("sweeping r needs a symmetric_two_detector receiver".into())),
            },
            SweepParam::DeltaT => match &mut s.receiver {
                ReceiverSpec::TimeMux(c) => {
                    c.gate1_offset = c.gate0_offset + value;
                    if let AttackStrategy::ShiftAndFlip { delta } = &mut s.attack {
                        *delta = value;
                    }
                }
                _ => return Err(Error::Config("sweeping delta_t needs a time_mux receiver".into())),
            },
            SweepParam::DarkCountProb => *s.receiver.dark_count_prob_mut() = value,
            SweepParam::NPulses => {
                if !(value >= 1.0 && value.fract() == 0.0 && value <= usize::MAX as f64) {
                    return Err(Error::Config(format!("n_pulses must be a positive integer, got {value}")));
                }
                s.n_pulses = value as usize;
            }
            SweepParam::BlockFraction => match &mut s.attack {
                AttackStrategy::Probe { block_fraction, .. } => *block_fraction = value,
                _ => return Err(Error::Config("sweeping block_fraction needs a probe attack".into())),
            },
        }
        Ok(s)
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "r" => SweepParam::R,
            "delta_t" => SweepParam::DeltaT,
            "dark_count_prob" => SweepParam::DarkCountProb,
            "n_pulses" => SweepParam::NPulses,
            "block_fraction" => SweepParam::BlockFraction,
            other => return Err(Error::Config(format!("unknown sweep parameter `{other}`"))),
        })
    }
}

/// One scenario per value, seeded `derive_seed(base.seed, index)`; points
/// run concurrently and come back in input order.
pub fn sweep(base: &Scenario, param: SweepParam, values: &[f64]) -> Result<Vec<(f64, SimResult)>> {
    let scenarios = sweep_scenarios(base, param, values)?;
    run_sweep_points(&scenarios, values)
}

/// The validated scenarios [`sweep`] runs, one per value.
pub fn sweep_scenarios(base: &Scenario, param: SweepParam, values: &[f64]) -> Result<Vec<Scenario>> {
    values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let mut s = param.apply(base, v)?;
            s.seed = derive_seed(base.seed, i as u64);
            s.validate()?;
            Ok(s)
        })
        .collect()
}

/// Runs prepared sweep points concurrently; `scenarios[i]` is labelled
/// `values[i]`.
pub fn run_sweep_points(scenarios: &[Scenario], values: &[f64]) -> Result<Vec<(f64, SimResult)>> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = scenarios.iter().map(|s| scope.spawn(move || run_scenario(s))).collect();
        values
            .iter()
            .zip(handles)
            .map(|(&v, h)| Ok((v, h.join().expect("sweep point panicked")?)))
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(x: f64) -> MismatchRatio {
        MismatchRatio::new(x).unwrap()
    }

    fn symmetric(x: f64) -> ReceiverSpec {
        ReceiverSpec::SymmetricTwoDetector { r: r(x), peak: 0.1, t0: -1.0, t1: 1.0, gate_halfwidth: 2.0, dark_count_prob: 0.0 }
    }

    #[test]
    fn symmetric_receiver_examples() {
        let c = build_symmetric_receiver(r(0.0), 0.1, -1.0, 1.0, 2.0).unwrap();
        assert_eq!(c.curve_bit1.evaluate(-1.0), 0.0);
        assert!(c.curve_bit1.support().unwrap().0 >= -1.0);
        assert_eq!(c.curve_bit0.evaluate(1.0), 0.0);

        let c = build_symmetric_receiver(r(1.0), 0.1, -1.0, 1.0, 2.0).unwrap();
        assert_eq!(c.curve_bit0, c.curve_bit1);

        let c = build_symmetric_receiver(r(0.5), 0.1, -1.0, 1.0, 2.0).unwrap();
        let q = receiver_quadruple(&ReceiverConfig::TwoDetector(c.clone())).unwrap();
        assert_eq!(q, EfficiencyQuadruple { eta0_t0: 0.1, eta0_t1: 0.05, eta1_t0: 0.05, eta1_t1: 0.1 });
        assert_eq!(mismatch_ratio(&q, DEFAULT_SYMMETRY_TOL).unwrap().value(), 0.5);
        assert_eq!(c.curve_bit0.evaluate(0.0), c.curve_bit1.evaluate(0.0));
    }

    #[test]
    fn symmetric_receiver_rejects_overlap() {
        assert!(matches!(build_symmetric_receiver(r(0.0), 0.1, -1.0, 1.0, 1.0), Err(Error::Config(_))));
        assert!(build_symmetric_receiver(r(0.0), 0.1, 1.0, -1.0, 3.0).is_err());
        assert!(build_symmetric_receiver(r(20.0), 0.1, -1.0, 1.0, 3.0).is_err());
        assert!(build_symmetric_receiver(r(0.5), 0.0, -1.0, 1.0, 3.0).is_err());
    }

    #[test]
    fn ratio_round_trips_through_construction() {
        for i in 0..=40 {
            let x = i as f64 / 20.0;
            let c = build_symmetric_receiver(r(x), 0.2, -1.0, 1.0, 2.0).unwrap();
            let q = receiver_quadruple(&ReceiverConfig::TwoDetector(c)).unwrap();
            let got = mismatch_ratio(&q, DEFAULT_SYMMETRY_TOL).unwrap().value();
            assert!((got - x).abs() <= 1e-15 * x.max(1.0), "{x} -> {got}");
        }
    }

    #[test]
    fn no_attack_is_clean() {
        let mut s = Scenario::new(symmetric(0.5), AttackStrategy::NoAttack, 50_000, 1);
        s.countermeasures.monitors = true;
        let res = run_scenario(&s).unwrap();
        assert_eq!(res.qber, Some(0.0));
        assert!(res.assessment.is_none());
        assert!(res.empirical_eve_info.is_none());
        let m = res.monitor.unwrap();
        assert!(!m.rate_alarm && !m.window_alarm);
        assert!(res.sifted <= res.detected && res.detected <= res.emitted);
    }

    #[test]
    fn time_shift_r0_is_invisible_and_complete() {
        let s = Scenario::new(symmetric(0.0), AttackStrategy::TimeShift { shift_to_t0_prob: 0.5 }, 50_000, 2);
        let res = run_scenario(&s).unwrap();
        assert_eq!(res.qber, Some(0.0));
        assert_eq!(res.empirical_eve_info, Some(1.0));
        let a = res.assessment.unwrap();
        assert_eq!(a.eve_info, 1.0);
        assert!(a.insecure);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let s = Scenario::new(symmetric(0.3), AttackStrategy::FakedState, 20_000, 99);
        assert_eq!(run_scenario(&s).unwrap(), run_scenario(&s).unwrap());
        let mut other = s.clone();
        other.seed = 100;
        assert_ne!(run_scenario(&s).unwrap(), run_scenario(&other).unwrap());
    }

    #[test]
    fn shards_cover_every_pulse() {
        let s = Scenario::new(symmetric(0.3), AttackStrategy::TimeShift { shift_to_t0_prob: 0.5 }, 10_001, 5);
        let logs = simulate(&s, 4).unwrap();
        let idx: Vec<u64> = logs.alice.iter().map(|a| a.pulse_index).collect();
        assert_eq!(idx, (0..10_001).collect::<Vec<_>>());
        assert_eq!(logs.bob.len(), 10_001);
        let res = run_scenario_sharded(&s, 4).unwrap();
        assert_eq!(res.qber, Some(0.0));
        assert_eq!(res, run_scenario_sharded(&s, 4).unwrap());
    }

    #[test]
    fn lossy_channel_reduces_detection() {
        let mut s = Scenario::new(symmetric(1.0), AttackStrategy::NoAttack, 100_000, 6);
        let full = run_scenario(&s).unwrap().detection_rate;
        s.channel_transmittance = 0.5;
        let half = run_scenario(&s).unwrap().detection_rate;
        assert!((half / full - 0.5).abs() < 0.05);
    }

    #[test]
    fn incompatible_attack_and_receiver() {
        let s = Scenario::new(symmetric(0.5), AttackStrategy::ShiftAndFlip { delta: 1.0 }, 10, 0);
        assert!(matches!(run_scenario(&s), Err(Error::Config(_))));
        let mut s = Scenario::new(symmetric(0.5), AttackStrategy::NoAttack, 0, 0);
        assert!(run_scenario(&s).is_err());
        s.n_pulses = 10;
        s.channel_transmittance = 0.0;
        assert!(run_scenario(&s).is_err());
    }

    #[test]
    fn sweep_shapes() {
        let base = Scenario::new(symmetric(0.5), AttackStrategy::FakedState, 2_000, 3);
        assert!(sweep(&base, SweepParam::R, &[]).unwrap().is_empty());
        let out = sweep(&base, SweepParam::R, &[0.0, 1.0]).unwrap();
        assert_eq!(out.iter().map(|p| p.0).collect::<Vec<_>>(), vec![0.0, 1.0]);
        assert_eq!(out[0].1.qber, Some(0.0));
        assert!("bogus".parse::<SweepParam>().is_err());
        assert!(sweep(&base, SweepParam::DeltaT, &[1.0]).is_err());
        assert!(sweep(&base, SweepParam::NPulses, &[1.5]).is_err());
        let n = sweep(&base, SweepParam::NPulses, &[10.0]).unwrap();
        assert_eq!(n[0].1.emitted, 10);
    }
}
