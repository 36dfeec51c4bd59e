//! Closed-form model of the teleportation protocol.
//!
//! With ancilla coefficients `f` and input `α|0⟩ + β|1⟩`, observing `k`
//! photons in the Fourier-transformed modes happens with probability
//! `p_k = |α|²f(k)² + |β|²f(k−1)²` (using `f(−1) = f(n+1) = 0`). For
//! `1 ≤ k ≤ n` the output qubit is `(α·f(k)|0⟩ + β·f(k−1)|1⟩)/√p_k`; `k = 0`
//! and `k = n+1` are failures. The success probability is the expected
//! squared fidelity over the successful outcomes.

use num_complex::Complex64;

use crate::eigen::CoefficientProfile;
use crate::error::{Error, Result};

/// Normalized single-qubit pure state `α|0⟩ + β|1⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    alpha: Complex64,
    beta: Complex64,
}

impl QubitState {
    pub const NORM_TOL: f64 = 1e-12;

    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let norm_sq = alpha.norm_sqr() + beta.norm_sqr();
        if !norm_sq.is_finite() || (norm_sq - 1.0).abs() > Self::NORM_TOL {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(Self { alpha, beta })
    }

    /// Rescales `(alpha, beta)` to unit norm. Fails on the zero vector.
    pub fn normalized(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let norm = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized {
                norm_sq: norm * norm,
            });
        }
        Ok(Self {
            alpha: alpha / norm,
            beta: beta / norm,
        })
    }

    /// `|+⟩ = (|0⟩ + |1⟩)/√2`.
    pub fn plus() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self { alpha: h, beta: h }
    }

    pub fn zero() -> Self {
        Self {
            alpha: Complex64::new(1.0, 0.0),
            beta: Complex64::new(0.0, 0.0),
        }
    }

    pub fn one() -> Self {
        Self {
            alpha: Complex64::new(0.0, 0.0),
            beta: Complex64::new(1.0, 0.0),
        }
    }

    /// Input with `|α|² = weight` and relative phase `phase` on `|1⟩`.
    pub fn from_weight_phase(weight: f64, phase: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&weight) {
            return Err(Error::WeightOutOfRange(weight));
        }
        Ok(Self {
            alpha: Complex64::new(weight.sqrt(), 0.0),
            beta: Complex64::from_polar((1.0 - weight).sqrt(), phase),
        })
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    /// `|α|²`.
    pub fn weight(&self) -> f64 {
        self.alpha.norm_sqr()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &QubitState) -> Complex64 {
        self.alpha.conj() * other.alpha + self.beta.conj() * other.beta
    }
}

/// Everything the closed form says about a single photon-count outcome.
///
/// `state` and `fidelity_sq` are present for successful outcomes
/// (`1 ≤ k ≤ n`) of nonzero probability, and absent for the failure outcomes
/// `k = 0` and `k = n+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeReport {
    pub k: usize,
    pub probability: f64,
    pub state: Option<QubitState>,
    pub fidelity_sq: Option<f64>,
}

fn success_range(profile: &CoefficientProfile, k: usize) -> Result<()> {
    let n = profile.n();
    if k == 0 || k > n {
        return Err(Error::FailureOutcome { k, n });
    }
    Ok(())
}

/// Output qubit heralded by outcome `k` (after phase correction).
pub fn teleported_state(
    psi: &QubitState,
    profile: &CoefficientProfile,
    k: usize,
) -> Result<QubitState> {
    success_range(profile, k)?;
    let ki = k as isize;
    let a = psi.alpha * profile.at(ki);
    let b = psi.beta * profile.at(ki - 1);
    let norm_sq = a.norm_sqr() + b.norm_sqr();
    if norm_sq == 0.0 {
        return Err(Error::DegenerateOutcome { k });
    }
    let norm = norm_sq.sqrt();
    Ok(QubitState {
        alpha: a / norm,
        beta: b / norm,
    })
}

/// `p_k` for `0 ≤ k ≤ n+1`.
pub fn outcome_probability(
    psi: &QubitState,
    profile: &CoefficientProfile,
    k: usize,
) -> Result<f64> {
    let max = profile.n() + 1;
    if k > max {
        return Err(Error::OutcomeOutOfRange { k, max });
    }
    let ki = k as isize;
    Ok(psi.alpha.norm_sqr() * profile.at(ki).powi(2)
        + psi.beta.norm_sqr() * profile.at(ki - 1).powi(2))
}

/// `|⟨psi|out⟩|²`.
pub fn fidelity_sq(psi: &QubitState, out: &QubitState) -> f64 {
    psi.inner(out).norm_sqr()
}

/// Expected squared fidelity `Σ_{k=1}^{n} (|α|²f(k) + |β|²f(k−1))²`.
pub fn success_probability(psi: &QubitState, profile: &CoefficientProfile) -> f64 {
    curve_unchecked(profile, psi.weight())
}

/// Success probability as a function of `x = |α|²` alone.
pub fn success_probability_curve(profile: &CoefficientProfile, x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::WeightOutOfRange(x));
    }
    Ok(curve_unchecked(profile, x))
}

fn curve_unchecked(profile: &CoefficientProfile, x: f64) -> f64 {
    profile
        .coefficients()
        .windows(2)
        .map(|w| (x * w[1] + (1.0 - x) * w[0]).powi(2))
        .sum()
}

/// One report per `k` in `0..=n+1`.
pub fn full_outcome_table(psi: &QubitState, profile: &CoefficientProfile) -> Vec<OutcomeReport> {
    let n = profile.n();
    (0..=n + 1)
        .map(|k| {
            let probability = outcome_probability(psi, profile, k).expect("k is within 0..=n+1");
            let state = if (1..=n).contains(&k) {
                teleported_state(psi, profile, k).ok()
            } else {
                None
            };
            OutcomeReport {
                k,
                probability,
                fidelity_sq: state.as_ref().map(|s| fidelity_sq(psi, s)),
                state,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::{closed_form_lambda, optimal_profile, uniform_profile, DEFAULT_TOL};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn opt(n: usize) -> CoefficientProfile {
        optimal_profile(n, DEFAULT_TOL).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn arb_psi() -> impl Strategy<Value = QubitState> {
        (
            0.0f64..=1.0,
            0.0f64..std::f64::consts::TAU,
            0.0f64..std::f64::consts::TAU,
        )
            .prop_map(|(w, rel, global)| {
                let s = QubitState::from_weight_phase(w, rel).unwrap();
                let g = Complex64::from_polar(1.0, global);
                QubitState::new(s.alpha() * g, s.beta() * g).unwrap()
            })
    }

    fn arb_profile() -> impl Strategy<Value = CoefficientProfile> {
        prop::collection::vec(-1.0f64..1.0, 2..12)
            .prop_filter("nonzero", |v| v.iter().any(|x| x.abs() > 1e-3))
            .prop_map(|v| CoefficientProfile::normalized(v).unwrap().0)
    }

    fn arb_palindrome() -> impl Strategy<Value = CoefficientProfile> {
        prop::collection::vec(0.01f64..1.0, 1..7).prop_flat_map(|half| {
            prop::bool::ANY.prop_map(move |odd| {
                let mut v = half.clone();
                let mirror: Vec<f64> = if odd {
                    half.iter().rev().skip(1).copied().collect()
                } else {
                    half.iter().rev().copied().collect()
                };
                v.extend(mirror);
                if v.len() < 2 {
                    v.push(v[0]);
                }
                CoefficientProfile::normalized(v).unwrap().0
            })
        })
    }

    #[test]
    fn qubit_state_validation() {
        assert!(QubitState::new(c(1.0, 0.0), c(1.0, 0.0)).is_err());
        assert!(QubitState::normalized(c(0.0, 0.0), c(0.0, 0.0)).is_err());
        let s = QubitState::normalized(c(3.0, 0.0), c(0.0, 4.0)).unwrap();
        assert!(close(s.weight(), 0.36, 1e-15));
        assert!(QubitState::from_weight_phase(1.5, 0.0).is_err());
    }

    #[test]
    fn teleported_state_examples() {
        let p2 = opt(2);
        let q = teleported_state(&QubitState::plus(), &p2, 1).unwrap();
        // (α·f(1), β·f(0)) ∝ (2, 1)
        assert!(close(q.alpha().re, 2.0 / 5f64.sqrt(), 1e-12));
        assert!(close(q.beta().re, 1.0 / 5f64.sqrt(), 1e-12));

        for k in 1..=2 {
            let q = teleported_state(&QubitState::zero(), &p2, k).unwrap();
            assert!(close(fidelity_sq(&q, &QubitState::zero()), 1.0, 1e-15));
        }

        let psi = QubitState::new(c(0.6, 0.0), c(0.0, 0.8)).unwrap();
        let u = uniform_profile(5).unwrap();
        for k in 1..=5 {
            let q = teleported_state(&psi, &u, k).unwrap();
            assert!(close(q.alpha().re, 0.6, 1e-15) && close(q.beta().im, 0.8, 1e-15));
        }
    }

    #[test]
    fn teleported_state_errors() {
        let p2 = opt(2);
        let psi = QubitState::plus();
        assert_eq!(
            teleported_state(&psi, &p2, 0),
            Err(Error::FailureOutcome { k: 0, n: 2 })
        );
        assert_eq!(
            teleported_state(&psi, &p2, 3),
            Err(Error::FailureOutcome { k: 3, n: 2 })
        );
        // f(0) = 0 and α = 0 leave nothing at k = 1
        let (hole, _) = CoefficientProfile::normalized(vec![0.0, 1.0, 1.0]).unwrap();
        assert_eq!(
            teleported_state(&QubitState::one(), &hole, 1),
            Err(Error::DegenerateOutcome { k: 1 })
        );
    }

    #[test]
    fn outcome_probability_examples() {
        let p2 = opt(2);
        let plus = QubitState::plus();
        assert!(close(
            outcome_probability(&plus, &p2, 1).unwrap(),
            5.0 / 12.0,
            1e-12
        ));
        assert_eq!(
            outcome_probability(&QubitState::zero(), &p2, 3).unwrap(),
            0.0
        );
        assert_eq!(
            outcome_probability(&plus, &p2, 4),
            Err(Error::OutcomeOutOfRange { k: 4, max: 3 })
        );
        let psi = QubitState::from_weight_phase(0.3, 1.1).unwrap();
        let u = uniform_profile(4).unwrap();
        for k in 1..=4 {
            assert!(close(outcome_probability(&psi, &u, k).unwrap(), 0.2, 1e-15));
        }
    }

    #[test]
    fn fidelity_examples() {
        let p2 = opt(2);
        let plus = QubitState::plus();
        let q = teleported_state(&plus, &p2, 1).unwrap();
        assert!(close(fidelity_sq(&plus, &q), 0.9, 1e-12));
        assert!(close(fidelity_sq(&plus, &plus), 1.0, 1e-15));
        assert_eq!(fidelity_sq(&QubitState::zero(), &QubitState::one()), 0.0);
    }

    #[test]
    fn success_probability_examples() {
        let p2 = opt(2);
        assert!(close(
            success_probability(&QubitState::plus(), &p2),
            0.75,
            1e-12
        ));
        assert!(close(
            success_probability(&QubitState::zero(), &p2),
            5.0 / 6.0,
            1e-12
        ));
        for n in 1..=50 {
            let u = uniform_profile(n).unwrap();
            let want = n as f64 / (n as f64 + 1.0);
            assert!(close(
                success_probability(&QubitState::plus(), &u),
                want,
                1e-12
            ));
        }
        // |+⟩ form ¼Σ(f(k)+f(k−1))²
        let p5 = opt(5);
        let quarter: f64 = p5
            .coefficients()
            .windows(2)
            .map(|w| (w[0] + w[1]).powi(2))
            .sum::<f64>()
            / 4.0;
        assert!(close(
            success_probability(&QubitState::plus(), &p5),
            quarter,
            1e-15
        ));
    }

    #[test]
    fn curve_examples() {
        let p2 = opt(2);
        assert!(close(
            success_probability_curve(&p2, 0.5).unwrap(),
            0.75,
            1e-12
        ));
        assert!(close(
            success_probability_curve(&p2, 0.0).unwrap(),
            5.0 / 6.0,
            1e-12
        ));
        let u = uniform_profile(3).unwrap();
        for x in [0.0, 0.2, 0.5, 0.9, 1.0] {
            assert!(close(
                success_probability_curve(&u, x).unwrap(),
                0.75,
                1e-15
            ));
        }
        assert_eq!(
            success_probability_curve(&p2, -0.1),
            Err(Error::WeightOutOfRange(-0.1))
        );
        assert!(success_probability_curve(&p2, 1.01).is_err());
    }

    #[test]
    fn outcome_table_examples() {
        let table = full_outcome_table(&QubitState::plus(), &opt(2));
        let probs: Vec<f64> = table.iter().map(|r| r.probability).collect();
        let want = [1.0 / 12.0, 5.0 / 12.0, 5.0 / 12.0, 1.0 / 12.0];
        for (p, w) in probs.iter().zip(want) {
            assert!(close(*p, w, 1e-12));
        }
        assert!(table[0].state.is_none() && table[3].state.is_none());
        assert!(table[0].fidelity_sq.is_none() && table[3].fidelity_sq.is_none());
        assert!(close(table[1].fidelity_sq.unwrap(), 0.9, 1e-12));
        assert!(close(table[2].fidelity_sq.unwrap(), 0.9, 1e-12));

        let u1 = full_outcome_table(&QubitState::plus(), &uniform_profile(1).unwrap());
        let probs: Vec<f64> = u1.iter().map(|r| r.probability).collect();
        assert!(close(probs[0], 0.25, 1e-15) && close(probs[1], 0.5, 1e-15));
        assert!(close(probs[2], 0.25, 1e-15));
        let success: f64 = u1
            .iter()
            .filter_map(|r| r.fidelity_sq.map(|f| f * r.probability))
            .sum();
        assert!(close(success, 0.5, 1e-15));
    }

    #[test]
    fn optimal_profile_beats_random_profiles() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let plus = QubitState::plus();
        for n in 1..=12 {
            let best = success_probability(&plus, &opt(n));
            assert!(close(best, closed_form_lambda(n), 1e-10));
            for _ in 0..1000 {
                let v: Vec<f64> = (0..=n).map(|_| rng.random_range(-1.0..1.0)).collect();
                let (q, _) = CoefficientProfile::normalized(v).unwrap();
                assert!(success_probability(&plus, &q) <= best + 1e-12);
            }
        }
    }

    proptest! {
        #[test]
        fn probabilities_are_complete(psi in arb_psi(), profile in arb_profile()) {
            let total: f64 = (0..=profile.n() + 1)
                .map(|k| outcome_probability(&psi, &profile, k).unwrap())
                .sum();
            prop_assert!((total - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn success_is_expected_squared_fidelity(psi in arb_psi(), profile in arb_profile()) {
            let table = full_outcome_table(&psi, &profile);
            let total: f64 = table.iter().map(|r| r.probability).sum();
            prop_assert!((total - 1.0).abs() <= 1e-12);
            let expected: f64 = table
                .iter()
                .filter_map(|r| r.fidelity_sq.map(|f| f * r.probability))
                .sum();
            prop_assert!((expected - success_probability(&psi, &profile)).abs() <= 1e-12);
        }

        #[test]
        fn success_depends_only_on_weight(
            w in 0.0f64..=1.0,
            phases in prop::collection::vec(0.0f64..std::f64::consts::TAU, 4),
            profile in arb_profile(),
        ) {
            let a = QubitState::from_weight_phase(w, phases[0]).unwrap();
            let g = Complex64::from_polar(1.0, phases[2]);
            let b = QubitState::from_weight_phase(w, phases[1]).unwrap();
            let b = QubitState::new(b.alpha() * g, b.beta() * g).unwrap();
            let pa = success_probability(&a, &profile);
            prop_assert!((pa - success_probability(&b, &profile)).abs() <= 1e-12);
            prop_assert!((pa - success_probability_curve(&profile, w).unwrap()).abs() <= 1e-12);
        }

        #[test]
        fn palindromic_curves_are_stationary_at_half(profile in arb_palindrome()) {
            let h = 1e-6;
            let d = (success_probability_curve(&profile, 0.5 + h).unwrap()
                - success_probability_curve(&profile, 0.5 - h).unwrap())
                / (2.0 * h);
            prop_assert!(d.abs() <= 1e-6);
            let curvature: f64 = profile
                .coefficients()
                .windows(2)
                .map(|w| (w[1] - w[0]).powi(2))
                .sum();
            prop_assert!(curvature >= 0.0);
            let mid = success_probability_curve(&profile, 0.5).unwrap();
            for x in [0.0, 0.25, 0.75, 1.0] {
                prop_assert!(success_probability_curve(&profile, x).unwrap() >= mid - 1e-12);
            }
        }

        #[test]
        fn uniform_profile_teleports_perfectly(psi in arb_psi(), n in 1usize..20) {
            let u = uniform_profile(n).unwrap();
            for k in 1..=n {
                let q = teleported_state(&psi, &u, k).unwrap();
                prop_assert!((fidelity_sq(&psi, &q) - 1.0).abs() <= 1e-12);
            }
        }
    }
}
