//! Gated single-photon detector models.
//!
//! Two receivers are modeled: the standard one with a separate detector per
//! bit value, and the time-multiplexed one where a single detector is gated
//! twice per slot and the bit value is read from which gate fired.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RandomStream;
use crate::types::{Bit, EfficiencyCurve, TimeNs};

fn check_probability(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must lie in [0, 1], got {p}")))
    }
}

/// Receiver with one detector per bit value (SPD0 and SPD1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoDetectorConfig {
    pub curve_bit0: EfficiencyCurve,
    pub curve_bit1: EfficiencyCurve,
    /// Nominal signal arrival time, normally the middle of the open window.
    pub gate_center_offset: TimeNs,
    /// Arrival time at which SPD0 is favored over SPD1.
    pub t0: TimeNs,
    /// Arrival time at which SPD1 is favored over SPD0.
    pub t1: TimeNs,
    #[serde(default)]
    pub dark_count_prob: f64,
}

impl TwoDetectorConfig {
    pub fn validate(&self) -> Result<()> {
        check_probability("dark_count_prob", self.dark_count_prob)?;
        for (name, t) in [("gate_center_offset", self.gate_center_offset), ("t0", self.t0), ("t1", self.t1)] {
            if !t.is_finite() {
                return Err(Error::Config(format!("{name} must be finite")));
            }
        }
        Ok(())
    }

    pub fn curve(&self, channel: Bit) -> &EfficiencyCurve {
        match channel {
            Bit::Zero => &self.curve_bit0,
            Bit::One => &self.curve_bit1,
        }
    }

    /// Displacement from the nominal arrival that makes a photon land at
    /// absolute slot time `t`.
    pub fn displacement_to(&self, t: TimeNs) -> TimeNs {
        t - self.gate_center_offset
    }

    /// Union of the channel supports, used as the accepted detection window.
    pub fn gate_windows(&self) -> Vec<(TimeNs, TimeNs)> {
        [self.curve_bit0.support(), self.curve_bit1.support()]
            .into_iter()
            .flatten()
            .collect()
    }
}

/// Receiver with a single detector gated at `gate0_offset` (bit 0) and
/// `gate1_offset` (bit 1) in every slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeMuxConfig {
    /// Gate response relative to the gate's nominal arrival time.
    pub curve: EfficiencyCurve,
    pub gate0_offset: TimeNs,
    pub gate1_offset: TimeNs,
    pub pulse_period: TimeNs,
    #[serde(default)]
    pub dark_count_prob: f64,
}

impl TimeMuxConfig {
    pub fn validate(&self) -> Result<()> {
        check_probability("dark_count_prob", self.dark_count_prob)?;
        if !(self.pulse_period > 0.0 && self.pulse_period.is_finite()) {
            return Err(Error::Config(format!(
                "pulse_period must be positive, got {}",
                self.pulse_period
            )));
        }
        let dt = self.delta_t();
        if !(dt > 0.0 && dt < self.pulse_period) {
            return Err(Error::Config(format!(
                "gate1_offset - gate0_offset must lie in (0, pulse_period), got {dt}"
            )));
        }
        Ok(())
    }

    /// Gate separation t1 - t0.
    pub fn delta_t(&self) -> TimeNs {
        self.gate1_offset - self.gate0_offset
    }

    pub fn gate_offset(&self, gate: Bit) -> TimeNs {
        match gate {
            Bit::Zero => self.gate0_offset,
            Bit::One => self.gate1_offset,
        }
    }

    /// Efficiency of `gate` (of the slot whose frame `t` is expressed in) for
    /// a photon arriving at slot time `t`.
    pub fn gate_efficiency(&self, gate: Bit, t: TimeNs) -> f64 {
        self.curve.evaluate(t - self.gate_offset(gate))
    }

    pub fn gate_windows(&self) -> Vec<(TimeNs, TimeNs)> {
        match self.curve.support() {
            Some((lo, hi)) => Bit::ALL
                .iter()
                .map(|&g| (self.gate_offset(g) + lo, self.gate_offset(g) + hi))
                .collect(),
            None => Vec::new(),
        }
    }
}

/// Outcome of one detection slot, in detector-channel terms.
///
/// For the two-detector receiver channel `b` is SPDb; for the time-multiplexed
/// receiver it is gate `b`. Mapping channels to key bits is the protocol's job.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClickRecord {
    pub pulse_index: u64,
    pub clicked_bit0: bool,
    pub clicked_bit1: bool,
    pub resolved_bit: Option<Bit>,
    /// Click time relative to the slot's sync reference.
    pub detection_offset: TimeNs,
}

impl ClickRecord {
    pub fn no_click(pulse_index: u64, detection_offset: TimeNs) -> Self {
        Self {
            pulse_index,
            clicked_bit0: false,
            clicked_bit1: false,
            resolved_bit: None,
            detection_offset,
        }
    }

    pub fn clicked(&self) -> bool {
        self.resolved_bit.is_some()
    }

    pub fn with_index(mut self, pulse_index: u64) -> Self {
        self.pulse_index = pulse_index;
        self
    }
}

/// Combines per-channel click flags. A double click is resolved to a fair
/// random bit. `times[b]` is the detection time reported when channel `b`
/// wins.
fn resolve(clicks: [bool; 2], times: [TimeNs; 2], idle_time: TimeNs, rng: &mut RandomStream) -> ClickRecord {
    let resolved = match clicks {
        [false, false] => None,
        [true, false] => Some(Bit::Zero),
        [false, true] => Some(Bit::One),
        [true, true] => Some(rng.bit()),
    };
    ClickRecord {
        pulse_index: 0,
        clicked_bit0: clicks[0],
        clicked_bit1: clicks[1],
        resolved_bit: resolved,
        detection_offset: resolved.map_or(idle_time, |b| times[b.index()]),
    }
}

/// One slot of the two-detector receiver.
///
/// `routed_bit` is the channel the photon was steered to (`None` for a
/// blocked or empty slot); `arrival` is its absolute time in the slot.
pub fn detect_two_spd(
    cfg: &TwoDetectorConfig,
    routed_bit: Option<Bit>,
    arrival: TimeNs,
    rng: &mut RandomStream,
) -> ClickRecord {
    let mut clicks = [false; 2];
    let mut times = [cfg.gate_center_offset; 2];
    if let Some(ch) = routed_bit {
        if rng.bernoulli(cfg.curve(ch).evaluate(arrival)) {
            clicks[ch.index()] = true;
            times[ch.index()] = arrival;
        }
    }
    for ch in Bit::ALL {
        if rng.bernoulli(cfg.dark_count_prob) {
            clicks[ch.index()] = true;
        }
    }
    resolve(clicks, times, cfg.gate_center_offset, rng)
}

/// A photon registered by some gate of the time-multiplexed detector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateHit {
    /// Slot that owns the gate, relative to the slot the photon was sent in.
    pub slot_delta: i64,
    pub gate: Bit,
    /// Arrival time in the frame of the owning slot.
    pub offset: TimeNs,
}

/// Propagates one photon through the gate sequence of the time-multiplexed
/// detector. `path` selects the nominal arrival (gate0 or gate1 offset) and
/// `shift` is added to it. `jitter(m)` is the gate shift of the slot `m`
/// periods after the sending slot; it must stay below half a period.
///
/// Gates are tried in chronological order and a photon can fire at most one.
pub fn propagate_time_mux(
    cfg: &TimeMuxConfig,
    path: Bit,
    shift: TimeNs,
    jitter: &mut dyn FnMut(i64) -> TimeNs,
    rng: &mut RandomStream,
) -> Option<GateHit> {
    let (lo, hi) = cfg.curve.support()?;
    let period = cfg.pulse_period;
    let arrival = cfg.gate_offset(path) + shift;
    if !arrival.is_finite() {
        return None;
    }

    let mut gates: Vec<(TimeNs, i64, Bit)> = Vec::with_capacity(4);
    for gate in Bit::ALL {
        let g = cfg.gate_offset(gate);
        let first = ((arrival - g - hi) / period).floor() as i64 - 1;
        let last = ((arrival - g - lo) / period).ceil() as i64 + 1;
        for m in first..=last {
            let open = m as f64 * period + g + jitter(m);
            let rel = arrival - open;
            if rel >= lo && rel <= hi {
                gates.push((open, m, gate));
            }
        }
    }
    gates.sort_by(|a, b| a.0.total_cmp(&b.0));

    for (open, m, gate) in gates {
        if rng.bernoulli(cfg.curve.evaluate(arrival - open)) {
            return Some(GateHit {
                slot_delta: m,
                gate,
                offset: arrival - m as f64 * period,
            });
        }
    }
    None
}

/// Builds one slot's record from the photon hits that landed in it plus
/// per-gate dark counts. `gate_shift` is that slot's gate jitter.
pub fn assemble_time_mux_slot(
    cfg: &TimeMuxConfig,
    pulse_index: u64,
    hits: &[GateHit],
    gate_shift: TimeNs,
    rng: &mut RandomStream,
) -> ClickRecord {
    let mut clicks = [false; 2];
    let mut times = [cfg.gate0_offset + gate_shift, cfg.gate1_offset + gate_shift];
    for hit in hits {
        let g = hit.gate.index();
        if !clicks[g] {
            times[g] = hit.offset;
        }
        clicks[g] = true;
    }
    for g in Bit::ALL {
        if rng.bernoulli(cfg.dark_count_prob) {
            clicks[g.index()] = true;
        }
    }
    resolve(clicks, times, cfg.gate0_offset + gate_shift, rng).with_index(pulse_index)
}

/// Result of sending one pulse into the time-multiplexed receiver in
/// isolation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeMuxDetection {
    /// The sending slot's own record, including its dark counts.
    pub record: ClickRecord,
    /// A hit that landed in a neighbouring slot's gate, if any.
    pub spill: Option<GateHit>,
}

/// One pulse through the time-multiplexed receiver. Hits in other slots are
/// returned as `spill` rather than merged.
pub fn detect_time_mux(
    cfg: &TimeMuxConfig,
    encoded_bit: Option<Bit>,
    arrival_shift: TimeNs,
    rng: &mut RandomStream,
) -> TimeMuxDetection {
    let hit = encoded_bit.and_then(|path| propagate_time_mux(cfg, path, arrival_shift, &mut |_| 0.0, rng));
    let (own, spill) = match hit {
        Some(h) if h.slot_delta == 0 => (Some(h), None),
        other => (None, other),
    };
    let record = assemble_time_mux_slot(cfg, 0, own.as_slice(), 0.0, rng);
    TimeMuxDetection { record, spill }
}
