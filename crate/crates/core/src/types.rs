//! Shared vocabulary: bases, bits, pulses and time-resolved detector
//! efficiency curves.

use std::fmt;
use std::ops::Not;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Time in nanoseconds.
pub type TimeNs = f64;

/// BB84 preparation / measurement basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    Z,
    X,
}

impl Basis {
    pub const ALL: [Basis; 2] = [Basis::Z, Basis::X];

    pub fn from_bool(b: bool) -> Self {
        if b {
            Basis::X
        } else {
            Basis::Z
        }
    }

    pub fn other(self) -> Self {
        match self {
            Basis::Z => Basis::X,
            Basis::X => Basis::Z,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Bit {
    Zero,
    One,
}

impl Bit {
    pub const ALL: [Bit; 2] = [Bit::Zero, Bit::One];

    pub fn from_bool(b: bool) -> Self {
        if b {
            Bit::One
        } else {
            Bit::Zero
        }
    }

    pub fn as_bool(self) -> bool {
        self == Bit::One
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn xor(self, other: Bit) -> Bit {
        Bit::from_bool(self.as_bool() ^ other.as_bool())
    }
}

impl Not for Bit {
    type Output = Bit;

    fn not(self) -> Bit {
        match self {
            Bit::Zero => Bit::One,
            Bit::One => Bit::Zero,
        }
    }
}

impl fmt::Display for Bit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.as_bool() { "1" } else { "0" })
    }
}

/// One BB84 signal as seen on the quantum channel.
///
/// `arrival_offset` is the displacement of the photon from the receiver's
/// nominal arrival time for this slot. Alice's unmodified pulses carry 0;
/// an adversary may move it in either direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pulse {
    pub basis: Basis,
    pub bit: Bit,
    pub arrival_offset: TimeNs,
    pub pulse_index: u64,
    /// A blocked pulse carries no photon. Kept in the stream so indices stay
    /// aligned across the Alice, Eve and Bob logs.
    pub blocked: bool,
}

impl Pulse {
    pub fn new(pulse_index: u64, basis: Basis, bit: Bit) -> Self {
        Self {
            basis,
            bit,
            arrival_offset: 0.0,
            pulse_index,
            blocked: false,
        }
    }
}

/// Time-resolved detection efficiency of one gated detector channel.
///
/// Piecewise-linear between samples and zero outside the sampled span.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(TimeNs, f64)>", into = "Vec<(TimeNs, f64)>")]
pub struct EfficiencyCurve {
    samples: Vec<(TimeNs, f64)>,
}

impl EfficiencyCurve {
    pub fn new(samples: Vec<(TimeNs, f64)>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Config("efficiency curve needs at least one sample".into()));
        }
        for &(t, eta) in &samples {
            if !t.is_finite() {
                return Err(Error::Config(format!("efficiency curve time {t} is not finite")));
            }
            if !(0.0..=1.0).contains(&eta) {
                return Err(Error::Config(format!(
                    "efficiency {eta} at t = {t} ns is outside [0, 1]"
                )));
            }
        }
        if let Some(w) = samples.windows(2).find(|w| w[1].0 <= w[0].0) {
            return Err(Error::Config(format!(
                "efficiency curve times must be strictly increasing ({} then {})",
                w[0].0, w[1].0
            )));
        }
        Ok(Self { samples })
    }

    /// Symmetric triangular gate: zero at `center ± halfwidth`, `peak` at `center`.
    pub fn triangle(center: TimeNs, halfwidth: TimeNs, peak: f64) -> Result<Self> {
        if !(halfwidth > 0.0) {
            return Err(Error::Config(format!("gate halfwidth must be positive, got {halfwidth}")));
        }
        Self::new(vec![
            (center - halfwidth, 0.0),
            (center, peak),
            (center + halfwidth, 0.0),
        ])
    }

    pub fn samples(&self) -> &[(TimeNs, f64)] {
        &self.samples
    }

    /// First and last sample times.
    pub fn span(&self) -> (TimeNs, TimeNs) {
        (self.samples[0].0, self.samples[self.samples.len() - 1].0)
    }

    /// Smallest interval outside of which the efficiency is zero, or `None`
    /// for an identically zero curve.
    pub fn support(&self) -> Option<(TimeNs, TimeNs)> {
        let s = &self.samples;
        let first = s.iter().position(|&(_, e)| e > 0.0)?;
        let last = s.iter().rposition(|&(_, e)| e > 0.0)?;
        let lo = if first > 0 { s[first - 1].0 } else { s[first].0 };
        let hi = if last + 1 < s.len() { s[last + 1].0 } else { s[last].0 };
        Some((lo, hi))
    }

    pub fn evaluate(&self, t: TimeNs) -> f64 {
        let s = &self.samples;
        let (start, end) = self.span();
        if !(t >= start && t <= end) {
            return 0.0;
        }
        // index of the first sample strictly after t
        let hi = s.partition_point(|&(ts, _)| ts <= t);
        if hi == 0 {
            return 0.0;
        }
        let (t_lo, e_lo) = s[hi - 1];
        if t == t_lo || hi == s.len() {
            return e_lo;
        }
        let (t_hi, e_hi) = s[hi];
        let frac = (t - t_lo) / (t_hi - t_lo);
        (e_lo + frac * (e_hi - e_lo)).clamp(0.0, 1.0)
    }

    pub fn peak(&self) -> f64 {
        self.samples.iter().map(|&(_, e)| e).fold(0.0, f64::max)
    }
}

impl TryFrom<Vec<(TimeNs, f64)>> for EfficiencyCurve {
    type Error = Error;

    fn try_from(samples: Vec<(TimeNs, f64)>) -> Result<Self> {
        Self::new(samples)
    }
}

impl From<EfficiencyCurve> for Vec<(TimeNs, f64)> {
    fn from(c: EfficiencyCurve) -> Self {
        c.samples
    }
}

/// Free-function form of [`EfficiencyCurve::evaluate`].
pub fn evaluate_efficiency(curve: &EfficiencyCurve, t: TimeNs) -> f64 {
    curve.evaluate(t)
}
