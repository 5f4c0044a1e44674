//! Eve's strategies against the efficiency mismatch.
//!
//! * time shift: move each pulse to `t0` or `t1` without measuring it;
//! * faked state: measure, then resend the opposite state at the time that
//!   favours the measured bit;
//! * shift and flip: flip the bit and shift by `±dt` against a
//!   time-multiplexed detector;
//! * probe: replace a few pulses with faked ones at chosen delays and learn
//!   the efficiency curves from the public basis announcements.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::analysis::MismatchRatio;
use crate::error::{Error, Result};
use crate::protocol::{bob_measure_time_mux, bob_measure_two_spd, MeasureOptions, ReceiverConfig};
use crate::rng::RandomStream;
use crate::types::{Basis, Bit, EfficiencyCurve, Pulse, TimeNs};

/// Fewest basis-matched faked pulses per bit value a probe point needs.
pub const MIN_MATCHED_PER_BIT: usize = 20;

fn default_shift_prob() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AttackStrategy {
    #[serde(rename = "none")]
    NoAttack,
    TimeShift {
        #[serde(default = "default_shift_prob")]
        shift_to_t0_prob: f64,
    },
    FakedState,
    ShiftAndFlip {
        delta: TimeNs,
    },
    Probe {
        block_fraction: f64,
        delay_grid: Vec<TimeNs>,
        pulses_per_point: usize,
    },
}

impl AttackStrategy {
    pub fn name(&self) -> &'static str {
        match self {
            AttackStrategy::NoAttack => "none",
            AttackStrategy::TimeShift { .. } => "time_shift",
            AttackStrategy::FakedState => "faked_state",
            AttackStrategy::ShiftAndFlip { .. } => "shift_and_flip",
            AttackStrategy::Probe { .. } => "probe",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            AttackStrategy::TimeShift { shift_to_t0_prob: p } if !(0.0..=1.0).contains(p) => Err(
                Error::Config(format!("attack.shift_to_t0_prob must lie in [0, 1], got {p}")),
            ),
            AttackStrategy::ShiftAndFlip { delta } if !delta.is_finite() => {
                Err(Error::Config("attack.delta must be finite".into()))
            }
            AttackStrategy::Probe { block_fraction, delay_grid, pulses_per_point } => {
                if !(*block_fraction > 0.0 && *block_fraction <= 1.0) {
                    return Err(Error::Config(format!(
                        "attack.block_fraction must lie in (0, 1], got {block_fraction}"
                    )));
                }
                if delay_grid.is_empty() {
                    return Err(Error::Config("attack.delay_grid must not be empty".into()));
                }
                if delay_grid.iter().any(|d| !d.is_finite()) {
                    return Err(Error::Config("attack.delay_grid entries must be finite".into()));
                }
                let mut sorted = delay_grid.clone();
                sorted.sort_by(f64::total_cmp);
                if sorted.windows(2).any(|w| w[0] == w[1]) {
                    return Err(Error::Config("attack.delay_grid entries must be distinct".into()));
                }
                if *pulses_per_point == 0 {
                    return Err(Error::Config("attack.pulses_per_point must be at least 1".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// One faked pulse sent while probing, as Eve sees it after sifting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeSample {
    pub delay: TimeNs,
    pub announced_basis_match: bool,
    pub faked_bit: Bit,
    pub detected: bool,
}

/// Everything Eve recorded during a run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EveLog {
    /// Eve's guess of Bob's bit, only for pulses she acted on.
    pub guesses: HashMap<u64, Bit>,
    /// Faked-state measurement basis and result.
    pub measured: HashMap<u64, (Basis, Bit)>,
    pub probe_stats: Vec<ProbeSample>,
}

/// Shifts an unmeasured pulse to `t0` (guess 0) with probability
/// `shift_to_t0_prob`, else to `t1` (guess 1). Times are arrival offsets.
pub fn apply_time_shift(
    shift_to_t0_prob: f64,
    pulse: &Pulse,
    t0: TimeNs,
    t1: TimeNs,
    rng: &mut RandomStream,
) -> (Pulse, Bit) {
    let guess = if rng.bernoulli(shift_to_t0_prob) { Bit::Zero } else { Bit::One };
    let mut out = *pulse;
    out.arrival_offset = if guess == Bit::Zero { t0 } else { t1 };
    (out, guess)
}

/// Eve's measurement in the faked-state attack.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FakedStateEntry {
    pub basis: Basis,
    pub result: Bit,
}

/// Intercept-resend with faked states: measure in a random basis, then send
/// the opposite bit in the opposite basis, timed to `t0` for result 0 and
/// `t1` for result 1.
pub fn apply_faked_state(pulse: &Pulse, t0: TimeNs, t1: TimeNs, rng: &mut RandomStream) -> (Pulse, FakedStateEntry) {
    let basis = rng.basis();
    let result = if basis == pulse.basis { pulse.bit } else { rng.bit() };
    let out = Pulse {
        basis: basis.other(),
        bit: !result,
        arrival_offset: if result == Bit::Zero { t0 } else { t1 },
        ..*pulse
    };
    (out, FakedStateEntry { basis, result })
}

/// Flips the bit and shifts by `+delta` or `-delta` with equal probability.
/// After `+delta` only gate 1 can fire, so the guess is 1; after `-delta` it
/// is 0.
pub fn apply_shift_and_flip(delta: TimeNs, pulse: &Pulse, rng: &mut RandomStream) -> (Pulse, Bit) {
    let forward = rng.bit() == Bit::One;
    let out = Pulse {
        bit: !pulse.bit,
        arrival_offset: pulse.arrival_offset + if forward { delta } else { -delta },
        ..*pulse
    };
    (out, Bit::from_bool(forward))
}

/// What Bob makes public about one slot: whether it clicked and which basis
/// he used.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Announcement {
    pub detected: bool,
    pub bob_basis: Basis,
}

/// A receiver Eve can only observe through the public announcements.
pub trait ProbeTarget {
    fn announce(&mut self, pulse: &Pulse, rng: &mut RandomStream) -> Announcement;
}

/// Bob's receiver with fixed countermeasure settings, as a probe target.
#[derive(Debug, Clone)]
pub struct Receiver {
    pub config: ReceiverConfig,
    pub opts: MeasureOptions,
}

impl ProbeTarget for Receiver {
    fn announce(&mut self, pulse: &Pulse, rng: &mut RandomStream) -> Announcement {
        let rec = match &self.config {
            ReceiverConfig::TwoDetector(c) => bob_measure_two_spd(c, pulse, self.opts, rng),
            ReceiverConfig::TimeMux(c) => bob_measure_time_mux(c, std::slice::from_ref(pulse), self.opts, rng)[0],
        };
        Announcement { detected: rec.detected(), bob_basis: rec.basis }
    }
}

/// A random BB84 state delayed by `delay`.
pub fn faked_probe_pulse(pulse_index: u64, delay: TimeNs, rng: &mut RandomStream) -> Pulse {
    let basis = rng.basis();
    let bit = rng.bit();
    Pulse { basis, bit, arrival_offset: delay, pulse_index, blocked: false }
}

/// Efficiency curves and mismatch ratio reconstructed from probe data.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeEstimate {
    pub delays: Vec<TimeNs>,
    pub eta0: Vec<f64>,
    pub eta1: Vec<f64>,
    pub curve0: EfficiencyCurve,
    pub curve1: EfficiencyCurve,
    /// Delay where channel 0 peaks.
    pub t0: TimeNs,
    /// Delay where channel 1 peaks.
    pub t1: TimeNs,
    pub ratio: MismatchRatio,
}

/// Estimates both channel efficiencies at every delay from basis-matched
/// samples, then the ratio at the channel peaks. The two ratios
/// `eta1(t0)/eta0(t0)` and `eta0(t1)/eta1(t1)` are averaged.
pub fn estimate_from_samples(delay_grid: &[TimeNs], samples: &[ProbeSample]) -> Result<ProbeEstimate> {
    let mut delays = delay_grid.to_vec();
    delays.sort_by(f64::total_cmp);
    delays.dedup();
    if delays.is_empty() {
        return Err(Error::Estimation("empty probe delay grid".into()));
    }
    let position: HashMap<u64, usize> = delays.iter().enumerate().map(|(i, d)| (d.to_bits(), i)).collect();

    // [point][bit] -> (matched, detected)
    let mut counts = vec![[(0usize, 0usize); 2]; delays.len()];
    for s in samples.iter().filter(|s| s.announced_basis_match) {
        let Some(&i) = position.get(&s.delay.to_bits()) else { continue };
        let c = &mut counts[i][s.faked_bit.index()];
        c.0 += 1;
        c.1 += s.detected as usize;
    }

    let mut eta = [Vec::with_capacity(delays.len()), Vec::with_capacity(delays.len())];
    for (d, point) in delays.iter().zip(&counts) {
        for bit in Bit::ALL {
            let (n, k) = point[bit.index()];
            if n < MIN_MATCHED_PER_BIT {
                return Err(Error::ProbePoint {
                    delay: *d,
                    reason: format!("{n} basis-matched samples for bit {bit}, need {MIN_MATCHED_PER_BIT}"),
                });
            }
            eta[bit.index()].push(k as f64 / n as f64);
        }
    }
    let [eta0, eta1] = eta;

    let argmax = |v: &[f64]| {
        v.iter()
            .enumerate()
            .fold(0, |best, (i, &x)| if x > v[best] { i } else { best })
    };
    let (i0, i1) = (argmax(&eta0), argmax(&eta1));
    if !(eta0[i0] > 0.0 && eta1[i1] > 0.0) {
        return Err(Error::Estimation("a detector channel never clicked on matched probes".into()));
    }
    let ratio = 0.5 * (eta1[i0] / eta0[i0] + eta0[i1] / eta1[i1]);

    let curve = |v: &[f64]| EfficiencyCurve::new(delays.iter().copied().zip(v.iter().copied()).collect());
    Ok(ProbeEstimate {
        curve0: curve(&eta0)?,
        curve1: curve(&eta1)?,
        t0: delays[i0],
        t1: delays[i1],
        ratio: MismatchRatio::new(ratio)?,
        delays,
        eta0,
        eta1,
    })
}

/// Sends `pulses_per_point` faked pulses at every delay of the grid into
/// `target` and estimates the efficiency curves from the announcements.
pub fn run_probe(
    delay_grid: &[TimeNs],
    pulses_per_point: usize,
    target: &mut dyn ProbeTarget,
    rng: &mut RandomStream,
) -> Result<(ProbeEstimate, Vec<ProbeSample>)> {
    let mut samples = Vec::with_capacity(delay_grid.len() * pulses_per_point);
    let mut index = 0u64;
    for &delay in delay_grid {
        for _ in 0..pulses_per_point {
            let pulse = faked_probe_pulse(index, delay, rng);
            index += 1;
            let a = target.announce(&pulse, rng);
            samples.push(ProbeSample {
                delay,
                announced_basis_match: a.bob_basis == pulse.basis,
                faked_bit: pulse.bit,
                detected: a.detected,
            });
        }
    }
    let estimate = estimate_from_samples(delay_grid, &samples)?;
    Ok((estimate, samples))
}
