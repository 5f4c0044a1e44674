//! Closed-form expressions for the efficiency-mismatch attacks, with an
//! exact enumeration oracle over the attack outcome trees.

use serde::{Deserialize, Serialize};

use crate::attacks::AttackStrategy;
use crate::error::{Error, Result};
use crate::protocol::SiftedPair;
use crate::types::{Basis, Bit};

/// Default relative tolerance for the symmetric-mismatch check.
pub const DEFAULT_SYMMETRY_TOL: f64 = 1e-6;

/// Key rate Alice and Bob would use when they see no errors.
pub const DEFAULT_NAIVE_RATE: f64 = 1.0;

/// Finite-size key rate `1 - h(epsilon)` for a security parameter epsilon.
pub fn finite_size_naive_rate(epsilon: f64) -> Result<f64> {
    Ok(1.0 - binary_entropy(epsilon)?)
}

/// Binary Shannon entropy in bits, with `h(0) = h(1) = 0`.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("binary entropy argument {x} outside [0, 1]")));
    }
    let term = |p: f64| if p > 0.0 { -p * p.log2() } else { 0.0 };
    Ok(term(x) + term(1.0 - x))
}

/// Efficiency ratio `r` between the disfavoured and the favoured detector
/// channel at the attack times. `r` and `1/r` describe the same mismatch with
/// the bit roles exchanged.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct MismatchRatio(f64);

impl MismatchRatio {
    pub fn new(r: f64) -> Result<Self> {
        if r >= 0.0 && r.is_finite() {
            Ok(Self(r))
        } else {
            Err(Error::Domain(format!("mismatch ratio must be finite and nonnegative, got {r}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Probability that a time-shift guess disagrees with Bob's bit: `r/(r+1)`.
    pub fn guess_error_rate(self) -> f64 {
        self.0 / (self.0 + 1.0)
    }
}

impl TryFrom<f64> for MismatchRatio {
    type Error = Error;

    fn try_from(r: f64) -> Result<Self> {
        Self::new(r)
    }
}

impl From<MismatchRatio> for f64 {
    fn from(r: MismatchRatio) -> f64 {
        r.0
    }
}

/// Detector efficiencies at the two attack times. `eta{b}_t{k}` is channel
/// `b` at time `t_k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyQuadruple {
    pub eta0_t0: f64,
    pub eta0_t1: f64,
    pub eta1_t0: f64,
    pub eta1_t1: f64,
}

impl EfficiencyQuadruple {
    pub fn new(eta0_t0: f64, eta0_t1: f64, eta1_t0: f64, eta1_t1: f64) -> Result<Self> {
        let q = Self { eta0_t0, eta0_t1, eta1_t0, eta1_t1 };
        if !q.values().iter().all(|e| (0.0..=1.0).contains(e)) {
            return Err(Error::Domain(format!("efficiencies must lie in [0, 1]: {q:?}")));
        }
        if q.values().iter().all(|&e| e == 0.0) {
            return Err(Error::Domain("efficiency quadruple is identically zero".into()));
        }
        Ok(q)
    }

    /// `(eta, r*eta, r*eta, eta)`.
    pub fn symmetric(eta: f64, r: f64) -> Result<Self> {
        Self::new(eta, r * eta, r * eta, eta)
    }

    fn values(&self) -> [f64; 4] {
        [self.eta0_t0, self.eta0_t1, self.eta1_t0, self.eta1_t1]
    }

    /// Efficiency of `channel` for a photon at attack time `t_k`.
    pub fn eta(&self, channel: Bit, time: Bit) -> f64 {
        match (channel, time) {
            (Bit::Zero, Bit::Zero) => self.eta0_t0,
            (Bit::Zero, Bit::One) => self.eta0_t1,
            (Bit::One, Bit::Zero) => self.eta1_t0,
            (Bit::One, Bit::One) => self.eta1_t1,
        }
    }
}

/// Mismatch ratio of a symmetric quadruple, `eta1(t0) / eta0(t0)`.
///
/// Fails if the two ratios `eta1(t0)/eta0(t0)` and `eta0(t1)/eta1(t1)`
/// differ by more than `symmetry_tol` (relative to the larger of them, floored
/// at 1).
pub fn mismatch_ratio(q: &EfficiencyQuadruple, symmetry_tol: f64) -> Result<MismatchRatio> {
    if !(q.eta0_t0 > 0.0 && q.eta1_t1 > 0.0) {
        return Err(Error::Domain(
            "mismatch ratio needs eta0(t0) > 0 and eta1(t1) > 0".into(),
        ));
    }
    let ratio_t0 = q.eta1_t0 / q.eta0_t0;
    let ratio_t1 = q.eta0_t1 / q.eta1_t1;
    let scale = ratio_t0.abs().max(ratio_t1.abs()).max(1.0);
    if (ratio_t0 - ratio_t1).abs() > symmetry_tol * scale {
        return Err(Error::AsymmetricQuadruple { ratio_t0, ratio_t1 });
    }
    MismatchRatio::new(ratio_t0)
}

/// QBER of the faked-state intercept-resend attack:
/// `(2 eta0(t1) + 2 eta1(t0)) / (eta0(t0) + 3 eta0(t1) + 3 eta1(t0) + eta1(t1))`.
pub fn faked_state_qber(q: &EfficiencyQuadruple) -> Result<f64> {
    let den = q.eta0_t0 + 3.0 * q.eta0_t1 + 3.0 * q.eta1_t0 + q.eta1_t1;
    if !(den > 0.0) {
        return Err(Error::Domain("faked-state QBER denominator is zero".into()));
    }
    Ok((2.0 * q.eta0_t1 + 2.0 * q.eta1_t0) / den)
}

/// Faked-state QBER for a symmetric receiver, `2r / (1 + 3r)`.
pub fn faked_state_qber_symmetric(r: MismatchRatio) -> f64 {
    let r = r.value();
    2.0 * r / (1.0 + 3.0 * r)
}

/// Eve's information on Bob's key under the time-shift attack,
/// `I(B:E) = 1 - h(r/(r+1))`.
pub fn eve_information(r: MismatchRatio) -> f64 {
    1.0 - h_unchecked(r.guess_error_rate())
}

/// Upper bound on the secret key rate under the time-shift attack,
/// `I(A:B|E) = h(r/(r+1))`.
pub fn key_rate_upper_bound(r: MismatchRatio) -> f64 {
    h_unchecked(r.guess_error_rate())
}

fn h_unchecked(x: f64) -> f64 {
    binary_entropy(x.clamp(0.0, 1.0)).expect("clamped into domain")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecurityAssessment {
    /// QBER visible to Alice and Bob.
    pub qber: f64,
    pub eve_info: f64,
    pub key_rate_upper_bound: f64,
    pub naive_key_rate: f64,
    pub insecure: bool,
}

/// Compares the rate an unaware Alice and Bob would use with the key-rate
/// bound under the time-shift attack, which introduces no errors.
pub fn assess(r: MismatchRatio, naive_rate: f64) -> SecurityAssessment {
    let bound = key_rate_upper_bound(r);
    SecurityAssessment {
        qber: 0.0,
        eve_info: eve_information(r),
        key_rate_upper_bound: bound,
        naive_key_rate: naive_rate,
        insecure: naive_rate > bound,
    }
}

/// `1 - h(e)` where `e` is the fraction of guessed pairs on which Eve's guess
/// differs from Bob's bit. Pairs without a guess are ignored.
pub fn empirical_eve_information(pairs: &[SiftedPair]) -> Result<f64> {
    let (guessed, wrong) = pairs.iter().fold((0usize, 0usize), |(n, w), p| match p.eve_guess {
        Some(g) => (n + 1, w + (g != p.bob_bit) as usize),
        None => (n, w),
    });
    if guessed == 0 {
        return Err(Error::Estimation("no sifted pair carries an adversary guess".into()));
    }
    let e = (wrong as f64 / guessed as f64).clamp(0.0, 1.0);
    Ok(1.0 - binary_entropy(e)?)
}

/// Range of `1 - h(e')` over `e' in [e - k*sigma, e + k*sigma]` (clipped to
/// `[0, 1]`), where `sigma` is the binomial standard error of a guess-error
/// fraction `e` measured on `n` pairs. `1 - h` is decreasing below 1/2 and
/// increasing above, so the minimum is zero whenever the interval covers 1/2.
pub fn eve_info_band(e: f64, n: u64, k_sigma: f64) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&e) || n == 0 || !(k_sigma >= 0.0) {
        return Err(Error::Domain(format!("eve_info_band needs e in [0, 1], n > 0, k >= 0 (e = {e}, n = {n}, k = {k_sigma})")));
    }
    let sigma = (e * (1.0 - e) / n as f64).sqrt();
    let lo = (e - k_sigma * sigma).max(0.0);
    let hi = (e + k_sigma * sigma).min(1.0);
    let info = |x: f64| 1.0 - h_unchecked(x);
    let max = info(lo).max(info(hi));
    let min = if lo <= 0.5 && hi >= 0.5 { 0.0 } else { info(lo).min(info(hi)) };
    Ok((min, max))
}

/// Exact outcome statistics from [`brute_force_qber_oracle`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOutcome {
    pub qber: f64,
    /// Probability per emitted pulse that Bob registers a click.
    pub detection_probability: f64,
    /// Probability per emitted pulse of a sifted (basis-matched, detected) bit.
    pub sifted_probability: f64,
    /// Probability that Eve's guess differs from Bob's sifted bit.
    pub guess_error: f64,
}

/// One leaf of the enumeration tree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Branch {
    pub weight: f64,
    pub alice_basis: Basis,
    pub alice_bit: Bit,
    pub bob_basis: Basis,
    pub bob_bit: Bit,
    pub eve_guess: Bit,
    /// Signed shift for shift-and-flip leaves (+1 / -1), 0 otherwise.
    pub shift_sign: i8,
}

impl Branch {
    pub fn sifted(&self) -> bool {
        self.alice_basis == self.bob_basis
    }
}

fn routing(photon_basis: Basis, photon_bit: Bit, bob_basis: Basis) -> Vec<(Bit, f64)> {
    if photon_basis == bob_basis {
        vec![(photon_bit, 1.0)]
    } else {
        vec![(Bit::Zero, 0.5), (Bit::One, 0.5)]
    }
}

/// Enumerates every detected outcome of `attack` against a receiver with
/// efficiencies `q`, with exact probabilities.
///
/// For `ShiftAndFlip` the quadruple is read as gate efficiencies of the
/// time-multiplexed detector (`eta{g}_t{k}` = gate `g` at nominal arrival
/// `t_k`), the shift is assumed to equal `t1 - t0`, and arrivals at
/// `t0 - dt` and `t1 + dt` miss every gate. Overlapping gates are tried
/// earliest first.
pub fn enumerate_branches(q: &EfficiencyQuadruple, attack: &AttackStrategy) -> Result<Vec<Branch>> {
    let mut out = Vec::new();
    for alice_basis in Basis::ALL {
        for alice_bit in Bit::ALL {
            let w_alice = 0.25;
            for bob_basis in Basis::ALL {
                let w_bob = w_alice * 0.5;
                let mut leaf = |weight: f64, bob_bit: Bit, eve_guess: Bit, shift_sign: i8| {
                    if weight > 0.0 {
                        out.push(Branch {
                            weight,
                            alice_basis,
                            alice_bit,
                            bob_basis,
                            bob_bit,
                            eve_guess,
                            shift_sign,
                        });
                    }
                };
                match *attack {
                    AttackStrategy::FakedState => {
                        for eve_basis in Basis::ALL {
                            let results = if eve_basis == alice_basis {
                                vec![(alice_bit, 1.0)]
                            } else {
                                vec![(Bit::Zero, 0.5), (Bit::One, 0.5)]
                            };
                            for (result, p_result) in results {
                                // resend the opposite state, timed to favour `result`
                                let sent_basis = eve_basis.other();
                                let sent_bit = !result;
                                for (channel, p_route) in routing(sent_basis, sent_bit, bob_basis) {
                                    let w = w_bob * 0.5 * p_result * p_route * q.eta(channel, result);
                                    leaf(w, channel, result, 0);
                                }
                            }
                        }
                    }
                    AttackStrategy::TimeShift { shift_to_t0_prob } => {
                        for (time, p_time) in [(Bit::Zero, shift_to_t0_prob), (Bit::One, 1.0 - shift_to_t0_prob)] {
                            for (channel, p_route) in routing(alice_basis, alice_bit, bob_basis) {
                                leaf(w_bob * p_time * p_route * q.eta(channel, time), channel, time, 0);
                            }
                        }
                    }
                    AttackStrategy::ShiftAndFlip { .. } => {
                        for sign in [-1i8, 1] {
                            for (path, p_route) in routing(alice_basis, !alice_bit, bob_basis) {
                                // -dt moves path 1 onto t0, +dt moves path 0 onto t1
                                let landing = match (path, sign) {
                                    (Bit::One, -1) => Some(Bit::Zero),
                                    (Bit::Zero, 1) => Some(Bit::One),
                                    _ => None,
                                };
                                let Some(time) = landing else { continue };
                                let p_gate0 = q.eta(Bit::Zero, time);
                                let p_gate1 = (1.0 - p_gate0) * q.eta(Bit::One, time);
                                let guess = if sign > 0 { Bit::One } else { Bit::Zero };
                                let w = w_bob * 0.5 * p_route;
                                leaf(w * p_gate0, Bit::Zero, guess, sign);
                                leaf(w * p_gate1, Bit::One, guess, sign);
                            }
                        }
                    }
                    AttackStrategy::NoAttack | AttackStrategy::Probe { .. } => {
                        return Err(Error::UnsupportedAttack(attack.name().into()));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Exact QBER and detection statistics by full enumeration of the outcome
/// tree, with no sampling.
pub fn brute_force_qber_oracle(q: &EfficiencyQuadruple, attack: &AttackStrategy) -> Result<OracleOutcome> {
    let branches = enumerate_branches(q, attack)?;
    let detection_probability: f64 = branches.iter().map(|b| b.weight).sum();
    let sifted: Vec<&Branch> = branches.iter().filter(|b| b.sifted()).collect();
    let sifted_probability: f64 = sifted.iter().map(|b| b.weight).sum();
    if !(sifted_probability > 0.0) {
        return Err(Error::Domain("attack never produces a sifted detection".into()));
    }
    let errors: f64 = sifted.iter().filter(|b| b.bob_bit != b.alice_bit).map(|b| b.weight).sum();
    let guess_errors: f64 = sifted.iter().filter(|b| b.bob_bit != b.eve_guess).map(|b| b.weight).sum();
    Ok(OracleOutcome {
        qber: errors / sifted_probability + 0.0,
        detection_probability,
        sifted_probability,
        guess_error: guess_errors / sifted_probability,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(x: f64) -> MismatchRatio {
        MismatchRatio::new(x).unwrap()
    }

    #[test]
    fn entropy_values() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!((binary_entropy(2.0 / 3.0).unwrap() - 0.9183).abs() < 5e-5);
        assert!(binary_entropy(-0.1).is_err());
        assert!(binary_entropy(1.1).is_err());
        assert!(binary_entropy(f64::NAN).is_err());
    }

    #[test]
    fn ratio_examples() {
        let q = EfficiencyQuadruple::new(0.1, 0.0, 0.0, 0.1).unwrap();
        assert_eq!(mismatch_ratio(&q, DEFAULT_SYMMETRY_TOL).unwrap().value(), 0.0);
        let q = EfficiencyQuadruple::new(0.1, 0.1, 0.1, 0.1).unwrap();
        assert_eq!(mismatch_ratio(&q, DEFAULT_SYMMETRY_TOL).unwrap().value(), 1.0);
        let q = EfficiencyQuadruple::new(0.1, 0.05, 0.05, 0.1).unwrap();
        assert_eq!(mismatch_ratio(&q, DEFAULT_SYMMETRY_TOL).unwrap().value(), 0.5);
    }

    #[test]
    fn ratio_errors() {
        let q = EfficiencyQuadruple::new(0.1, 0.02, 0.05, 0.1).unwrap();
        match mismatch_ratio(&q, DEFAULT_SYMMETRY_TOL) {
            Err(Error::AsymmetricQuadruple { ratio_t0, ratio_t1 }) => {
                assert_eq!(ratio_t0, 0.5);
                assert!((ratio_t1 - 0.2).abs() < 1e-15);
            }
            other => panic!("{other:?}"),
        }
        let q = EfficiencyQuadruple::new(0.0, 0.1, 0.1, 0.1).unwrap();
        assert!(matches!(mismatch_ratio(&q, 1e-6), Err(Error::Domain(_))));
        assert!(EfficiencyQuadruple::new(0.0, 0.0, 0.0, 0.0).is_err());
        assert!(EfficiencyQuadruple::new(1.5, 0.0, 0.0, 0.0).is_err());
        assert!(MismatchRatio::new(-0.1).is_err());
    }

    #[test]
    fn faked_state_examples() {
        let q0 = EfficiencyQuadruple::symmetric(0.1, 0.0).unwrap();
        assert_eq!(faked_state_qber(&q0).unwrap(), 0.0);
        let q1 = EfficiencyQuadruple::symmetric(0.1, 1.0).unwrap();
        assert!((faked_state_qber(&q1).unwrap() - 0.5).abs() < 1e-12);
        let q = EfficiencyQuadruple::symmetric(0.1, 0.2).unwrap();
        assert!((faked_state_qber(&q).unwrap() - 0.25).abs() < 1e-12);
        assert!((faked_state_qber_symmetric(r(0.2)) - 0.25).abs() < 1e-12);
        let zero_den = EfficiencyQuadruple { eta0_t0: 0.0, eta0_t1: 0.0, eta1_t0: 0.0, eta1_t1: 0.0 };
        assert!(faked_state_qber(&zero_den).is_err());
    }

    #[test]
    fn information_examples() {
        assert_eq!(eve_information(r(0.0)), 1.0);
        assert_eq!(eve_information(r(1.0)), 0.0);
        assert!((eve_information(r(2.0)) - 0.0817).abs() < 5e-5);
        assert!((key_rate_upper_bound(r(2.0)) - 0.9183).abs() < 5e-5);
        assert_eq!(key_rate_upper_bound(r(0.0)), 0.0);
        assert_eq!(key_rate_upper_bound(r(1.0)), 1.0);
    }

    #[test]
    fn assessment_examples() {
        let a = assess(r(2.0), DEFAULT_NAIVE_RATE);
        assert!(a.insecure);
        assert!((a.key_rate_upper_bound - 0.9183).abs() < 5e-5);
        assert!(!assess(r(1.0), 1.0).insecure);
        let a = assess(r(0.5), 0.5);
        assert!(!a.insecure);
        assert!((a.key_rate_upper_bound - binary_entropy(2.0 / 3.0).unwrap()).abs() < 1e-15);
        assert!(finite_size_naive_rate(0.01).unwrap() < 1.0);
    }

    fn pair(bob: Bit, guess: Option<Bit>) -> SiftedPair {
        SiftedPair { pulse_index: 0, alice_bit: bob, bob_bit: bob, eve_guess: guess }
    }

    #[test]
    fn empirical_information() {
        let all_right = vec![pair(Bit::One, Some(Bit::One)), pair(Bit::Zero, Some(Bit::Zero))];
        assert_eq!(empirical_eve_information(&all_right).unwrap(), 1.0);
        let half = vec![pair(Bit::One, Some(Bit::One)), pair(Bit::Zero, Some(Bit::One))];
        assert_eq!(empirical_eve_information(&half).unwrap(), 0.0);
        assert!(empirical_eve_information(&[]).is_err());
        assert!(empirical_eve_information(&[pair(Bit::One, None)]).is_err());
    }

    #[test]
    fn oracle_time_shift_is_error_free() {
        let q = EfficiencyQuadruple::symmetric(0.3, 0.5).unwrap();
        let o = brute_force_qber_oracle(&q, &AttackStrategy::TimeShift { shift_to_t0_prob: 0.5 }).unwrap();
        assert_eq!(o.qber, 0.0);
        assert!((o.guess_error - 1.0 / 3.0).abs() < 1e-15);
        assert!(brute_force_qber_oracle(&q, &AttackStrategy::NoAttack).is_err());
    }

    #[test]
    fn oracle_shift_and_flip_matches_table() {
        // disjoint gates, perfect efficiency
        let q = EfficiencyQuadruple::new(1.0, 0.0, 0.0, 1.0).unwrap();
        let attack = AttackStrategy::ShiftAndFlip { delta: 1.0 };
        let o = brute_force_qber_oracle(&q, &attack).unwrap();
        assert_eq!(o.qber, 0.0);
        assert_eq!(o.guess_error, 0.0);

        // Alice sends Z0, Bob measures in Z.
        let rows: Vec<Branch> = enumerate_branches(&q, &attack)
            .unwrap()
            .into_iter()
            .filter(|b| b.alice_basis == Basis::Z && b.alice_bit == Bit::Zero && b.bob_basis == Basis::Z)
            .collect();
        // conditional on the (Z0, Z) choice, which has weight 1/8
        let joint = |sign: i8, bit: Bit| -> f64 {
            rows.iter().filter(|b| b.shift_sign == sign && b.bob_bit == bit).map(|b| b.weight).sum::<f64>() * 8.0
        };
        assert_eq!(joint(-1, Bit::Zero), 0.5);
        assert_eq!(joint(-1, Bit::One), 0.0);
        assert_eq!(joint(1, Bit::Zero), 0.0);
        assert_eq!(joint(1, Bit::One), 0.0);
    }

    fn arb_quad() -> impl Strategy<Value = EfficiencyQuadruple> {
        (0.001f64..=1.0, 0.0f64..=1.0, 0.0f64..=1.0, 0.001f64..=1.0)
            .prop_map(|(a, b, c, d)| EfficiencyQuadruple::new(a, b, c, d).unwrap())
    }

    proptest! {
        #[test]
        fn complementarity(x in 0.0f64..50.0) {
            let r = r(x);
            prop_assert!((eve_information(r) + key_rate_upper_bound(r) - 1.0).abs() < 1e-12);
        }

        #[test]
        fn entropy_symmetry(x in 0.0f64..=1.0) {
            let a = binary_entropy(x).unwrap();
            let b = binary_entropy(1.0 - x).unwrap();
            prop_assert!((a - b).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&a));
        }

        #[test]
        fn symmetric_qber_closed_form(x in 0.0f64..=1.0, eta in 0.01f64..=1.0, dx in 0.0f64..0.1) {
            let q = EfficiencyQuadruple::symmetric(eta, x).unwrap();
            let direct = faked_state_qber(&q).unwrap();
            let closed = faked_state_qber_symmetric(r(x));
            prop_assert!((direct - closed).abs() < 1e-12);
            prop_assert!((0.0..=0.5 + 1e-15).contains(&closed));
            let y = (x + dx).min(1.0);
            prop_assert!(faked_state_qber_symmetric(r(y)) >= closed - 1e-15);
        }

        #[test]
        fn information_monotone_on_unit_interval(a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
            let (lo, hi) = (r(a.min(b)), r(a.max(b)));
            prop_assert!(eve_information(lo) >= eve_information(hi) - 1e-15);
            prop_assert!(key_rate_upper_bound(lo) <= key_rate_upper_bound(hi) + 1e-15);
        }

        #[test]
        fn oracle_agrees_with_closed_form(q in arb_quad()) {
            let o = brute_force_qber_oracle(&q, &AttackStrategy::FakedState).unwrap();
            prop_assert!((o.qber - faked_state_qber(&q).unwrap()).abs() < 1e-12);
        }

        #[test]
        fn time_shift_oracle_never_errs(q in arb_quad(), p in 0.0f64..=1.0) {
            if let Ok(o) = brute_force_qber_oracle(&q, &AttackStrategy::TimeShift { shift_to_t0_prob: p }) {
                prop_assert_eq!(o.qber, 0.0);
            }
        }
    }

    #[test]
    fn eve_info_band_brackets_the_point_value() {
        let (lo, hi) = eve_info_band(0.5, 100_000, 3.0).unwrap();
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 1e-4);
        assert_eq!(eve_info_band(0.0, 10, 3.0).unwrap(), (1.0, 1.0));
        let (lo, hi) = eve_info_band(0.2, 1000, 3.0).unwrap();
        let point = 1.0 - binary_entropy(0.2).unwrap();
        assert!(lo < point && point < hi);
        assert!(eve_info_band(0.2, 0, 3.0).is_err());
    }
}
