//! Alice's source, Bob's receivers, sifting and the countermeasure monitors.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::detector::{
    assemble_time_mux_slot, detect_two_spd, propagate_time_mux, ClickRecord, GateHit,
    TimeMuxConfig, TwoDetectorConfig,
};
use crate::error::{Error, Result};
use crate::rng::RandomStream;
use crate::types::{Basis, Bit, Pulse, TimeNs};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AliceRecord {
    pub pulse_index: u64,
    pub basis: Basis,
    pub bit: Bit,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BobRecord {
    pub pulse_index: u64,
    pub basis: Basis,
    pub click: ClickRecord,
    /// Under the four-value countermeasure: `One` when the channel-to-bit
    /// labels are swapped for this pulse. Never shown to the adversary.
    pub secret_assignment: Option<Bit>,
}

impl BobRecord {
    /// Bob's key bit for this pulse, decoded through the secret assignment.
    pub fn bit(&self) -> Option<Bit> {
        let raw = self.click.resolved_bit?;
        Some(match self.secret_assignment {
            Some(a) => raw.xor(a),
            None => raw,
        })
    }

    pub fn detected(&self) -> bool {
        self.click.clicked()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SiftedPair {
    pub pulse_index: u64,
    pub alice_bit: Bit,
    pub bob_bit: Bit,
    pub eve_guess: Option<Bit>,
}

/// The two receiver designs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReceiverConfig {
    TwoDetector(TwoDetectorConfig),
    TimeMux(TimeMuxConfig),
}

impl ReceiverConfig {
    pub fn validate(&self) -> Result<()> {
        match self {
            ReceiverConfig::TwoDetector(c) => c.validate(),
            ReceiverConfig::TimeMux(c) => c.validate(),
        }
    }

    pub fn gate_windows(&self) -> Vec<(TimeNs, TimeNs)> {
        match self {
            ReceiverConfig::TwoDetector(c) => c.gate_windows(),
            ReceiverConfig::TimeMux(c) => c.gate_windows(),
        }
    }
}

/// Receiver-side countermeasure switches.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MeasureOptions {
    /// Secret per-pulse channel-to-bit assignment.
    pub four_value: bool,
    /// Half-width of the uniform random shift applied to each slot's gates.
    pub gate_jitter_halfwidth: TimeNs,
}

impl MeasureOptions {
    fn draw_assignment(&self, rng: &mut RandomStream) -> Option<Bit> {
        self.four_value.then(|| rng.bit())
    }

    fn draw_jitter(&self, rng: &mut RandomStream) -> TimeNs {
        let h = self.gate_jitter_halfwidth;
        if h > 0.0 {
            rng.uniform_range(-h, h)
        } else {
            0.0
        }
    }
}

/// `n` pulses with independent uniform basis and bit, on time and unblocked.
pub fn alice_emit(n: usize, rng: &mut RandomStream) -> Vec<(AliceRecord, Pulse)> {
    (0..n as u64)
        .map(|i| {
            let basis = rng.basis();
            let bit = rng.bit();
            (
                AliceRecord { pulse_index: i, basis, bit },
                Pulse::new(i, basis, bit),
            )
        })
        .collect()
}

/// Which channel a photon reaches given Bob's basis: the pulse's bit when
/// the bases agree, a fair coin otherwise.
fn route(pulse: &Pulse, bob_basis: Basis, rng: &mut RandomStream) -> Bit {
    if pulse.basis == bob_basis {
        pulse.bit
    } else {
        rng.bit()
    }
}

/// Bob's measurement of one pulse on the two-detector receiver.
pub fn bob_measure_two_spd(
    cfg: &TwoDetectorConfig,
    pulse: &Pulse,
    opts: MeasureOptions,
    rng: &mut RandomStream,
) -> BobRecord {
    let basis = rng.basis();
    let assignment = opts.draw_assignment(rng);
    let jitter = opts.draw_jitter(rng);
    let routed = (!pulse.blocked).then(|| {
        let bit = route(pulse, basis, rng);
        assignment.map_or(bit, |a| bit.xor(a))
    });
    let arrival = cfg.gate_center_offset + pulse.arrival_offset;
    let mut click = detect_two_spd(cfg, routed, arrival - jitter, rng);
    if click.clicked() && routed.is_some() {
        click.detection_offset += jitter;
    }
    BobRecord {
        pulse_index: pulse.pulse_index,
        basis,
        click: click.with_index(pulse.pulse_index),
        secret_assignment: assignment,
    }
}

/// Bob's measurements of a run of consecutive pulses on the time-multiplexed
/// receiver.
///
/// A photon pushed past its own slot's gates may fire a gate of a
/// neighbouring slot; that click is credited to the neighbour's record. Hits
/// on slots outside `pulses` are lost.
pub fn bob_measure_time_mux(
    cfg: &TimeMuxConfig,
    pulses: &[Pulse],
    opts: MeasureOptions,
    rng: &mut RandomStream,
) -> Vec<BobRecord> {
    let position: HashMap<u64, usize> = pulses
        .iter()
        .enumerate()
        .map(|(i, p)| (p.pulse_index, i))
        .collect();

    let setup: Vec<(Basis, Option<Bit>, TimeNs)> = pulses
        .iter()
        .map(|_| {
            let basis = rng.basis();
            let assignment = opts.draw_assignment(rng);
            let jitter = opts.draw_jitter(rng);
            (basis, assignment, jitter)
        })
        .collect();

    let mut hits: Vec<Vec<GateHit>> = vec![Vec::new(); pulses.len()];
    for (i, pulse) in pulses.iter().enumerate() {
        if pulse.blocked {
            continue;
        }
        let (basis, assignment, _) = setup[i];
        let bit = route(pulse, basis, rng);
        let path = assignment.map_or(bit, |a| bit.xor(a));
        let slot_of = |m: i64| {
            pulse
                .pulse_index
                .checked_add_signed(m)
                .and_then(|idx| position.get(&idx).copied())
        };
        let mut gate_shift = |m: i64| slot_of(m).map_or(0.0, |j| setup[j].2);
        if let Some(hit) = propagate_time_mux(cfg, path, pulse.arrival_offset, &mut gate_shift, rng) {
            if let Some(j) = slot_of(hit.slot_delta) {
                hits[j].push(hit);
            }
        }
    }

    pulses
        .iter()
        .zip(setup)
        .zip(hits)
        .map(|((pulse, (basis, assignment, jitter)), slot_hits)| {
            BobRecord {
                pulse_index: pulse.pulse_index,
                basis,
                click: assemble_time_mux_slot(cfg, pulse.pulse_index, &slot_hits, jitter, rng),
                secret_assignment: assignment,
            }
        })
        .collect()
}

/// Keeps detected pulses where Alice's and Bob's announced bases agree.
pub fn sift(
    alice: &[AliceRecord],
    bob: &[BobRecord],
    eve_guesses: &HashMap<u64, Bit>,
) -> Result<Vec<SiftedPair>> {
    if alice.len() != bob.len() {
        return Err(Error::Alignment(format!(
            "{} Alice records vs {} Bob records",
            alice.len(),
            bob.len()
        )));
    }
    let mut pairs = Vec::new();
    for (a, b) in alice.iter().zip(bob) {
        if a.pulse_index != b.pulse_index {
            return Err(Error::Alignment(format!(
                "Alice pulse {} paired with Bob pulse {}",
                a.pulse_index, b.pulse_index
            )));
        }
        if a.basis != b.basis {
            continue;
        }
        if let Some(bob_bit) = b.bit() {
            pairs.push(SiftedPair {
                pulse_index: a.pulse_index,
                alice_bit: a.bit,
                bob_bit,
                eve_guess: eve_guesses.get(&a.pulse_index).copied(),
            });
        }
    }
    Ok(pairs)
}

/// Fraction of sifted pairs where Alice's and Bob's bits differ.
pub fn compute_qber(pairs: &[SiftedPair]) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::UndefinedQber);
    }
    let errors = pairs.iter().filter(|p| p.alice_bit != p.bob_bit).count();
    Ok(errors as f64 / pairs.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonitorReport {
    pub detection_rate: f64,
    pub baseline_rate: f64,
    pub out_of_window_count: u64,
    pub rate_alarm: bool,
    pub window_alarm: bool,
}

/// Thresholds for [`run_monitors`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonitorConfig {
    /// Detection rate expected without an attack, already scaled by any loss
    /// introduced during calibration.
    pub baseline_rate: f64,
    /// Relative drop below the baseline that raises the rate alarm.
    pub rate_tolerance: f64,
    /// Slack added on both sides of every gate window. Negative values narrow
    /// the accepted window.
    pub guard_band: TimeNs,
}

/// Detection-rate and timing-window checks over Bob's log.
pub fn run_monitors(bob: &[BobRecord], windows: &[(TimeNs, TimeNs)], cfg: &MonitorConfig) -> MonitorReport {
    let detected: Vec<&BobRecord> = bob.iter().filter(|b| b.detected()).collect();
    let detection_rate = if bob.is_empty() {
        0.0
    } else {
        detected.len() as f64 / bob.len() as f64
    };
    let g = cfg.guard_band;
    let out_of_window_count = detected
        .iter()
        .filter(|b| {
            let t = b.click.detection_offset;
            !windows.iter().any(|&(lo, hi)| t >= lo - g && t <= hi + g)
        })
        .count() as u64;
    MonitorReport {
        detection_rate,
        baseline_rate: cfg.baseline_rate,
        out_of_window_count,
        rate_alarm: detection_rate < cfg.baseline_rate * (1.0 - cfg.rate_tolerance),
        window_alarm: out_of_window_count > 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::EfficiencyCurve;

    fn flat_two_spd(eta: f64) -> TwoDetectorConfig {
        let c = EfficiencyCurve::new(vec![(-5.0, eta), (5.0, eta)]).unwrap();
        TwoDetectorConfig {
            curve_bit0: c.clone(),
            curve_bit1: c,
            gate_center_offset: 0.0,
            t0: -1.0,
            t1: 1.0,
            dark_count_prob: 0.0,
        }
    }

    fn mux() -> TimeMuxConfig {
        TimeMuxConfig {
            curve: EfficiencyCurve::triangle(0.0, 1.0, 1.0).unwrap(),
            gate0_offset: 0.0,
            gate1_offset: 3.0,
            pulse_period: 10.0,
            dark_count_prob: 0.0,
        }
    }

    fn sigma(p: f64, n: usize) -> f64 {
        (p * (1.0 - p) / n as f64).sqrt()
    }

    #[test]
    fn emission_is_uniform_over_states() {
        let n = 400_000;
        let mut rng = RandomStream::new(11, 0);
        let pulses = alice_emit(n, &mut rng);
        let mut counts = HashMap::new();
        for (a, p) in &pulses {
            assert_eq!(p.arrival_offset, 0.0);
            assert!(!p.blocked);
            assert_eq!((a.basis, a.bit), (p.basis, p.bit));
            *counts.entry((a.basis, a.bit)).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 4);
        for &c in counts.values() {
            let f = c as f64 / n as f64;
            assert!((f - 0.25).abs() < 3.0 * sigma(0.25, n), "{f}");
        }
    }

    #[test]
    fn emission_edge_cases() {
        let mut rng = RandomStream::new(12, 0);
        assert!(alice_emit(0, &mut rng).is_empty());
        let one = alice_emit(1, &mut rng);
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].1.arrival_offset, 0.0);
        let a: Vec<_> = alice_emit(100, &mut RandomStream::new(5, 0));
        let b: Vec<_> = alice_emit(100, &mut RandomStream::new(5, 0));
        assert_eq!(a, b);
    }

    #[test]
    fn matched_basis_r0_never_fires_spd0_at_t1() {
        let cfg = TwoDetectorConfig {
            curve_bit0: EfficiencyCurve::new(vec![(-2.0, 0.0), (-1.0, 0.5), (0.0, 0.0)]).unwrap(),
            curve_bit1: EfficiencyCurve::new(vec![(0.0, 0.0), (1.0, 0.5), (2.0, 0.0)]).unwrap(),
            gate_center_offset: 0.0,
            t0: -1.0,
            t1: 1.0,
            dark_count_prob: 0.0,
        };
        let mut rng = RandomStream::new(13, 0);
        let mut pulse = Pulse::new(0, Basis::Z, Bit::Zero);
        pulse.arrival_offset = cfg.displacement_to(cfg.t1);
        for _ in 0..20_000 {
            let b = bob_measure_two_spd(&cfg, &pulse, MeasureOptions::default(), &mut rng);
            if b.basis == Basis::Z {
                assert!(!b.click.clicked_bit0);
            }
        }
    }

    #[test]
    fn blocked_pulse_never_clicks() {
        let cfg = flat_two_spd(1.0);
        let mut rng = RandomStream::new(14, 0);
        let mut pulse = Pulse::new(0, Basis::X, Bit::One);
        pulse.blocked = true;
        for _ in 0..1000 {
            assert!(!bob_measure_two_spd(&cfg, &pulse, MeasureOptions::default(), &mut rng).detected());
        }
        let recs = bob_measure_time_mux(&mux(), &[pulse], MeasureOptions::default(), &mut rng);
        assert!(!recs[0].detected());
    }

    #[test]
    fn mismatched_basis_routes_evenly() {
        let eta = 0.4;
        let cfg = flat_two_spd(eta);
        let mut rng = RandomStream::new(15, 0);
        let pulse = Pulse::new(0, Basis::Z, Bit::Zero);
        let (mut trials, mut clicks, mut ones) = (0usize, 0usize, 0usize);
        while trials < 1_000_000 {
            let b = bob_measure_two_spd(&cfg, &pulse, MeasureOptions::default(), &mut rng);
            if b.basis != Basis::X {
                continue;
            }
            trials += 1;
            if let Some(bit) = b.bit() {
                clicks += 1;
                ones += (bit == Bit::One) as usize;
            }
        }
        let rate = clicks as f64 / trials as f64;
        assert!((rate - eta).abs() < 3.0 * sigma(eta, trials));
        let f1 = ones as f64 / clicks as f64;
        assert!((f1 - 0.5).abs() < 3.0 * sigma(0.5, clicks));
    }

    #[test]
    fn time_mux_nominal_bit_zero_uses_gate_zero() {
        let mut rng = RandomStream::new(16, 0);
        let pulses: Vec<Pulse> = (0..2000).map(|i| Pulse::new(i, Basis::Z, Bit::Zero)).collect();
        let recs = bob_measure_time_mux(&mux(), &pulses, MeasureOptions::default(), &mut rng);
        for r in recs.iter().filter(|r| r.basis == Basis::Z) {
            assert!(r.click.clicked_bit0 && !r.click.clicked_bit1);
            assert_eq!(r.bit(), Some(Bit::Zero));
        }
    }

    #[test]
    fn time_mux_spill_credits_next_slot() {
        let mut cfg = mux();
        cfg.gate1_offset = 5.0;
        let mut rng = RandomStream::new(17, 0);
        // Z1 shifted by +period/2 lands in gate 0 of the following slot.
        let mut first = Pulse::new(0, Basis::Z, Bit::One);
        first.arrival_offset = 5.0;
        let mut second = Pulse::new(1, Basis::Z, Bit::One);
        second.blocked = true;
        for _ in 0..200 {
            let recs = bob_measure_time_mux(&cfg, &[first, second], MeasureOptions::default(), &mut rng);
            if recs[0].basis == Basis::Z {
                assert!(!recs[0].detected());
                assert_eq!(recs[1].click.resolved_bit, Some(Bit::Zero));
                assert_eq!(recs[1].click.detection_offset, 0.0);
            }
        }
    }

    #[test]
    fn four_value_decodes_through_assignment() {
        let cfg = flat_two_spd(1.0);
        let mut rng = RandomStream::new(18, 0);
        let opts = MeasureOptions { four_value: true, gate_jitter_halfwidth: 0.0 };
        let mut swapped = 0;
        let n = 20_000;
        for i in 0..n {
            let pulse = Pulse::new(i, Basis::X, Bit::One);
            let b = bob_measure_two_spd(&cfg, &pulse, opts, &mut rng);
            let a = b.secret_assignment.unwrap();
            swapped += (a == Bit::One) as usize;
            if b.basis == Basis::X {
                assert_eq!(b.bit(), Some(Bit::One));
                assert_eq!(b.click.resolved_bit, Some(Bit::One.xor(a)));
            }
        }
        let f = swapped as f64 / n as f64;
        assert!((f - 0.5).abs() < 3.0 * sigma(0.5, n as usize));
    }

    fn alice(n: u64) -> Vec<AliceRecord> {
        (0..n).map(|i| AliceRecord { pulse_index: i, basis: Basis::Z, bit: Bit::Zero }).collect()
    }

    fn bob(idx: u64, basis: Basis, bit: Option<Bit>) -> BobRecord {
        BobRecord {
            pulse_index: idx,
            basis,
            click: ClickRecord {
                pulse_index: idx,
                clicked_bit0: bit == Some(Bit::Zero),
                clicked_bit1: bit == Some(Bit::One),
                resolved_bit: bit,
                detection_offset: 0.0,
            },
            secret_assignment: None,
        }
    }

    #[test]
    fn sift_keeps_matched_detections() {
        let a = alice(4);
        let b = vec![
            bob(0, Basis::Z, Some(Bit::Zero)),
            bob(1, Basis::X, Some(Bit::Zero)),
            bob(2, Basis::Z, None),
            bob(3, Basis::Z, Some(Bit::One)),
        ];
        let guesses = HashMap::from([(3u64, Bit::One)]);
        let pairs = sift(&a, &b, &guesses).unwrap();
        assert_eq!(pairs.len(), 2);
        assert_eq!(pairs[0].eve_guess, None);
        assert_eq!(pairs[1].eve_guess, Some(Bit::One));
        assert_eq!(compute_qber(&pairs).unwrap(), 0.5);
        assert_eq!(compute_qber(&pairs[..1]).unwrap(), 0.0);
    }

    #[test]
    fn sift_rejects_misaligned_logs() {
        let a = alice(2);
        assert!(matches!(
            sift(&a, &[bob(0, Basis::Z, None)], &HashMap::new()),
            Err(Error::Alignment(_))
        ));
        assert!(matches!(
            sift(&a, &[bob(0, Basis::Z, None), bob(5, Basis::Z, None)], &HashMap::new()),
            Err(Error::Alignment(_))
        ));
    }

    #[test]
    fn empty_qber_is_undefined() {
        assert_eq!(compute_qber(&[]), Err(Error::UndefinedQber));
    }

    #[test]
    fn lossless_sifted_fraction_is_half() {
        let cfg = flat_two_spd(1.0);
        let n = 200_000;
        let mut rng = RandomStream::new(19, 0);
        let emitted = alice_emit(n, &mut rng);
        let bob: Vec<BobRecord> = emitted
            .iter()
            .map(|(_, p)| bob_measure_two_spd(&cfg, p, MeasureOptions::default(), &mut rng))
            .collect();
        let alice: Vec<AliceRecord> = emitted.iter().map(|(a, _)| *a).collect();
        let pairs = sift(&alice, &bob, &HashMap::new()).unwrap();
        let f = pairs.len() as f64 / n as f64;
        assert!((f - 0.5).abs() < 3.0 * sigma(0.5, n));
        assert_eq!(compute_qber(&pairs).unwrap(), 0.0);
        // set identity: sifted = detected restricted to basis matches
        let expected: Vec<u64> = alice
            .iter()
            .zip(&bob)
            .filter(|(a, b)| a.basis == b.basis && b.detected())
            .map(|(a, _)| a.pulse_index)
            .collect();
        assert_eq!(pairs.iter().map(|p| p.pulse_index).collect::<Vec<_>>(), expected);
    }

    #[test]
    fn all_blocked_gives_empty_sift() {
        let cfg = flat_two_spd(1.0);
        let mut rng = RandomStream::new(20, 0);
        let emitted = alice_emit(1000, &mut rng);
        let bob: Vec<BobRecord> = emitted
            .iter()
            .map(|(_, p)| {
                let mut p = *p;
                p.blocked = true;
                bob_measure_two_spd(&cfg, &p, MeasureOptions::default(), &mut rng)
            })
            .collect();
        let alice: Vec<AliceRecord> = emitted.iter().map(|(a, _)| *a).collect();
        assert!(sift(&alice, &bob, &HashMap::new()).unwrap().is_empty());
    }

    #[test]
    fn monitors_are_deterministic_threshold_checks() {
        let recs = vec![
            bob(0, Basis::Z, Some(Bit::Zero)),
            bob(1, Basis::Z, None),
            bob(2, Basis::Z, Some(Bit::One)),
            bob(3, Basis::Z, None),
        ];
        let windows = [(-1.0, 1.0)];
        let cfg = MonitorConfig { baseline_rate: 0.5, rate_tolerance: 0.1, guard_band: 0.0 };
        let r = run_monitors(&recs, &windows, &cfg);
        assert_eq!(r.detection_rate, 0.5);
        assert!(!r.rate_alarm && !r.window_alarm);
        assert_eq!(r, run_monitors(&recs, &windows, &cfg));

        let high = MonitorConfig { baseline_rate: 0.6, ..cfg };
        assert!(run_monitors(&recs, &windows, &high).rate_alarm);

        let mut late = recs.clone();
        late[2].click.detection_offset = 1.5;
        let r = run_monitors(&late, &windows, &cfg);
        assert_eq!(r.out_of_window_count, 1);
        assert!(r.window_alarm);
        let wide = MonitorConfig { guard_band: 0.5, ..cfg };
        assert!(!run_monitors(&late, &windows, &wide).window_alarm);
        // narrowed acceptance window
        let narrow = MonitorConfig { guard_band: -0.5, ..cfg };
        let mut edge = recs.clone();
        edge[0].click.detection_offset = 0.8;
        assert!(run_monitors(&edge, &windows, &narrow).window_alarm);
    }
}
