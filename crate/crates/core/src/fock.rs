//! Brute-force multimode Fock-space simulation of the teleportation protocol.
//!
//! Mode layout for `n` ancilla pairs (`2n + 1` modes in total):
//!
//! - mode `0`: the input qubit, single-rail (`|0⟩` = vacuum, `|1⟩` = one photon);
//! - modes `1..=n`: first half of the ancilla, measured together with mode 0
//!   after the `(n+1)`-point Fourier interferometer;
//! - modes `n+1..=2n`: second half of the ancilla. Observing `k` photons in
//!   total heralds the output qubit in mode `n + k`.
//!
//! Transition amplitudes between occupation patterns are permanents of
//! sub-matrices of the mode unitary. Nothing here uses the closed-form
//! outcome probabilities of [`crate::analytic`]; the two are compared in tests.
//!
//! Cost model: after the interferometer each of the `≤ 2(n+1)` input terms
//! spreads over `C(N+n, n)` patterns of its `N ≤ n+1` measured photons, and
//! every pattern costs one `N×N` Ryser permanent (`O(2^N·N)`). At the default
//! cap `n = 6` that is under 25k terms and ~10⁷ flops.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use std::fmt;

use num_complex::Complex64;

use crate::analytic::{teleported_state, QubitState};
use crate::eigen::CoefficientProfile;
use crate::error::{Error, Result};
use crate::permanent::permanent;

/// Default largest `n` accepted by [`simulate_protocol`].
pub const DEFAULT_ORACLE_CAP: usize = 6;

/// Terms whose amplitude falls below this after evolution are dropped.
pub const PRUNE_THRESHOLD: f64 = 1e-14;

/// Tolerance on `Σ|amplitude|² = 1` for a [`FockState`].
pub const NORM_TOL: f64 = 1e-10;

/// Tolerance on `U·U† = I`.
pub const UNITARITY_TOL: f64 = 1e-12;

/// Photon counts, one per mode. Orders lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OccupationVector(pub Vec<u32>);

impl OccupationVector {
    pub fn vacuum(modes: usize) -> Self {
        Self(vec![0; modes])
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl fmt::Display for OccupationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

/// Superposition of occupation patterns over a fixed number of modes.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    modes: usize,
    terms: BTreeMap<OccupationVector, Complex64>,
}

impl FockState {
    /// Builds a normalized state; repeated patterns are summed and exact
    /// zeros dropped.
    pub fn new<I>(modes: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (OccupationVector, Complex64)>,
    {
        let mut map = BTreeMap::new();
        for (occ, amp) in terms {
            if occ.len() != modes {
                return Err(Error::DimensionMismatch {
                    expected: modes,
                    got: occ.len(),
                });
            }
            *map.entry(occ).or_insert(Complex64::new(0.0, 0.0)) += amp;
        }
        map.retain(|_, a| *a != Complex64::new(0.0, 0.0));
        let state = Self { modes, terms: map };
        let norm_sq = state.norm_sq();
        if (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(state)
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in lexicographic order of their occupation vectors.
    pub fn terms(&self) -> impl Iterator<Item = (&OccupationVector, &Complex64)> {
        self.terms.iter()
    }

    pub fn amplitude(&self, occ: &OccupationVector) -> Complex64 {
        self.terms.get(occ).copied().unwrap_or_default()
    }

    pub fn norm_sq(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum()
    }
}

/// Unitary acting on the creation operators of `dim` modes:
/// `a_j† ↦ Σ_i U[i][j]·a_i†`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeUnitary {
    dim: usize,
    entries: Vec<Complex64>,
}

impl ModeUnitary {
    /// Row-major `dim×dim` entries; rejects non-unitary input.
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        let u = Self { dim, entries };
        let dev = u.unitarity_defect();
        if dev > UNITARITY_TOL {
            return Err(Error::NotUnitary(dev));
        }
        Ok(u)
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        (0..dim).for_each(|i| entries[i * dim + i] = Complex64::new(1.0, 0.0));
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    /// `max |(U·U†)_{ij} − δ_{ij}|`.
    pub fn unitarity_defect(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                let dot: Complex64 = (0..d).map(|l| self.get(i, l) * self.get(j, l).conj()).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).norm());
            }
        }
        worst
    }

    /// Amplitude `⟨t|Û|s⟩` between patterns `s` and `t` of equal photon number.
    pub fn transition_amplitude(&self, input: &[u32], output: &[u32]) -> Complex64 {
        let cols = expand(input);
        let rows = expand(output);
        if cols.len() != rows.len() {
            return Complex64::new(0.0, 0.0);
        }
        let n = cols.len();
        let sub: Vec<Complex64> = rows
            .iter()
            .flat_map(|&r| cols.iter().map(move |&c| (r, c)))
            .map(|(r, c)| self.get(r, c))
            .collect();
        let norm: f64 = input
            .iter()
            .chain(output)
            .map(|&c| factorial(c))
            .product::<f64>()
            .sqrt();
        permanent(&sub, n) / norm
    }
}

/// Mode index `j` repeated `counts[j]` times.
fn expand(counts: &[u32]) -> Vec<usize> {
    counts
        .iter()
        .enumerate()
        .flat_map(|(j, &c)| std::iter::repeat_n(j, c as usize))
        .collect()
}

fn factorial(c: u32) -> f64 {
    (1..=c).map(f64::from).product()
}

/// Every way to place `photons` photons in `modes` modes, lexicographically.
fn compositions(photons: u32, modes: usize) -> Vec<Vec<u32>> {
    fn go(left: u32, modes: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() + 1 == modes {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for c in 0..=left {
            cur.push(c);
            go(left - c, modes, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if modes > 0 {
        go(photons, modes, &mut Vec::with_capacity(modes), &mut out);
    }
    out
}

/// Discrete Fourier matrix `U[j][l] = ω^{jl}/√m` with `ω = e^{2πi/m}`.
pub fn dft_matrix(m: usize) -> ModeUnitary {
    assert!(m >= 1, "Fourier transform needs at least one mode");
    let scale = 1.0 / (m as f64).sqrt();
    let entries = (0..m * m)
        .map(|idx| {
            let (j, l) = (idx / m, idx % m);
            // reduce jl mod m first so the angle stays exact for large m
            let angle = TAU * ((j * l) % m) as f64 / m as f64;
            Complex64::from_polar(scale, angle)
        })
        .collect();
    ModeUnitary { dim: m, entries }
}

/// Ancilla `Σ_i f(i)·|0^{n−i} 1^{i}⟩|0^{i} 1^{n−i}⟩` over `2n` modes.
pub fn build_ancilla(profile: &CoefficientProfile) -> Result<FockState> {
    let n = profile.n();
    let terms = profile.coefficients().iter().enumerate().map(|(i, &f)| {
        let mut occ = vec![0u32; 2 * n];
        occ[n - i..n].iter_mut().for_each(|c| *c = 1);
        occ[n + i..].iter_mut().for_each(|c| *c = 1);
        (OccupationVector(occ), Complex64::new(f, 0.0))
    });
    FockState::new(2 * n, terms)
}

/// Prepends the input qubit as mode 0.
pub fn inject_input(psi: &QubitState, ancilla: &FockState) -> Result<FockState> {
    let mut terms = Vec::with_capacity(2 * ancilla.len());
    for (photon, amp) in [(0u32, psi.alpha()), (1, psi.beta())] {
        if amp == Complex64::new(0.0, 0.0) {
            continue;
        }
        for (occ, a) in ancilla.terms() {
            let mut counts = Vec::with_capacity(occ.len() + 1);
            counts.push(photon);
            counts.extend_from_slice(occ.counts());
            terms.push((OccupationVector(counts), amp * a));
        }
    }
    FockState::new(ancilla.modes() + 1, terms)
}

fn check_modes(modes: &[usize], total: usize) -> Result<()> {
    let mut seen = vec![false; total];
    for &m in modes {
        if m >= total {
            return Err(Error::ModeOutOfRange {
                mode: m,
                modes: total,
            });
        }
        if std::mem::replace(&mut seen[m], true) {
            return Err(Error::DuplicateMode(m));
        }
    }
    Ok(())
}

/// Evolves `state` by `u` acting on `targets` (target `j` of `u` is mode
/// `targets[j]`). Photon number on the targets is conserved term by term.
pub fn apply_mode_unitary(
    state: &FockState,
    u: &ModeUnitary,
    targets: &[usize],
) -> Result<FockState> {
    if targets.len() != u.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            got: targets.len(),
        });
    }
    check_modes(targets, state.modes())?;

    let mut cache: BTreeMap<Vec<u32>, Vec<(Vec<u32>, Complex64)>> = BTreeMap::new();
    let mut out: BTreeMap<OccupationVector, Complex64> = BTreeMap::new();
    for (occ, &amp) in state.terms() {
        let input: Vec<u32> = targets.iter().map(|&m| occ.0[m]).collect();
        let row = cache.entry(input.clone()).or_insert_with(|| {
            let photons = input.iter().sum();
            compositions(photons, u.dim())
                .into_iter()
                .map(|t| {
                    let a = u.transition_amplitude(&input, &t);
                    (t, a)
                })
                .filter(|(_, a)| a.norm() > 0.0)
                .collect()
        });
        for (t, trans) in row.iter() {
            let mut next = occ.clone();
            targets.iter().zip(t).for_each(|(&m, &c)| next.0[m] = c);
            *out.entry(next).or_insert(Complex64::new(0.0, 0.0)) += amp * trans;
        }
    }
    out.retain(|_, a| a.norm() >= PRUNE_THRESHOLD);
    Ok(FockState {
        modes: state.modes(),
        terms: out,
    })
}

/// One photon-counting outcome on the measured modes.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementRecord {
    pub pattern: OccupationVector,
    pub k: usize,
    pub probability: f64,
    /// Output-mode qubit before phase correction (successful outcomes only).
    pub conditional: Option<QubitState>,
    /// Radians; attached by [`simulate_protocol`].
    pub correction_phase: Option<f64>,
}

impl MeasurementRecord {
    /// Conditional state with `|1⟩ ↦ e^{−iφ}|1⟩` applied.
    pub fn corrected_state(&self) -> Option<QubitState> {
        let c = self.conditional?;
        let phi = self.correction_phase.unwrap_or(0.0);
        Some(apply_phase(&c, phi))
    }
}

fn apply_phase(state: &QubitState, phi: f64) -> QubitState {
    QubitState::normalized(
        state.alpha(),
        state.beta() * Complex64::from_polar(1.0, -phi),
    )
    .expect("phase rotation keeps the norm")
}

/// Projects `state` onto every occupation pattern of `measured` (modes
/// `0..=n` of a `2n+1`-mode protocol state), in lexicographic order.
///
/// For `1 ≤ k ≤ n` the unmeasured modes must collapse to a fixed
/// configuration everywhere except mode `n + k`, which must hold 0 or 1
/// photons; anything else is a wiring defect.
pub fn measure_modes(state: &FockState, measured: &[usize]) -> Result<Vec<MeasurementRecord>> {
    check_modes(measured, state.modes())?;
    let n = measured.len().checked_sub(1).ok_or(Error::ZeroN)?;
    if n == 0 {
        return Err(Error::ZeroN);
    }
    if state.modes() != 2 * n + 1 {
        return Err(Error::DimensionMismatch {
            expected: 2 * n + 1,
            got: state.modes(),
        });
    }
    let mut is_measured = vec![false; state.modes()];
    measured.iter().for_each(|&m| is_measured[m] = true);
    let unmeasured: Vec<usize> = (0..state.modes()).filter(|&m| !is_measured[m]).collect();

    let mut groups: BTreeMap<OccupationVector, Vec<(Vec<u32>, Complex64)>> = BTreeMap::new();
    for (occ, &amp) in state.terms() {
        let pattern = OccupationVector(measured.iter().map(|&m| occ.0[m]).collect());
        let rest: Vec<u32> = unmeasured.iter().map(|&m| occ.0[m]).collect();
        groups.entry(pattern).or_default().push((rest, amp));
    }

    let mut records = Vec::with_capacity(groups.len());
    for (pattern, members) in groups {
        let k = pattern.total() as usize;
        let probability: f64 = members.iter().map(|(_, a)| a.norm_sqr()).sum();
        let conditional = if (1..=n).contains(&k) {
            let slot = unmeasured
                .iter()
                .position(|&m| m == n + k)
                .ok_or_else(|| Error::Wiring(format!("output mode {} is measured", n + k)))?;
            Some(extract_output(&pattern, &members, slot)?)
        } else {
            None
        };
        records.push(MeasurementRecord {
            pattern,
            k,
            probability,
            conditional,
            correction_phase: None,
        });
    }
    Ok(records)
}

fn extract_output(
    pattern: &OccupationVector,
    members: &[(Vec<u32>, Complex64)],
    slot: usize,
) -> Result<QubitState> {
    let spectator = |rest: &[u32]| {
        let mut r = rest.to_vec();
        r.remove(slot);
        r
    };
    let reference = spectator(&members[0].0);
    let mut amps = [Complex64::new(0.0, 0.0); 2];
    for (rest, amp) in members {
        if spectator(rest) != reference {
            return Err(Error::Wiring(format!(
                "pattern {pattern}: spectator modes are not in a fixed configuration"
            )));
        }
        match rest[slot] {
            c @ (0 | 1) => amps[c as usize] += amp,
            c => {
                return Err(Error::Wiring(format!(
                    "pattern {pattern}: output mode holds {c} photons"
                )))
            }
        }
    }
    QubitState::normalized(amps[0], amps[1])
}

/// Relative phase `φ` such that `|1⟩ ↦ e^{−iφ}|1⟩` turns the measured
/// conditional state into the closed-form teleported state, in `[0, 2π)`.
/// Degenerate cases (either amplitude vanishing) report 0.
pub fn correction_phase(
    record: &MeasurementRecord,
    profile: &CoefficientProfile,
    psi: &QubitState,
) -> Result<f64> {
    let n = profile.n();
    let conditional = match record.conditional {
        Some(c) if (1..=n).contains(&record.k) => c,
        _ => return Err(Error::FailureOutcome { k: record.k, n }),
    };
    let target = match teleported_state(psi, profile, record.k) {
        Ok(t) => t,
        Err(Error::DegenerateOutcome { .. }) => return Ok(0.0),
        Err(e) => return Err(e),
    };
    const EPS: f64 = 1e-12;
    if [
        conditional.alpha(),
        conditional.beta(),
        target.alpha(),
        target.beta(),
    ]
    .iter()
    .any(|a| a.norm() < EPS)
    {
        return Ok(0.0);
    }
    let measured = (conditional.beta() * conditional.alpha().conj()).arg();
    let wanted = (target.beta() * target.alpha().conj()).arg();
    Ok(wrap_phase(measured - wanted))
}

fn wrap_phase(phi: f64) -> f64 {
    let w = phi.rem_euclid(TAU);
    // fold values that round up to 2π back to 0
    if TAU - w < 1e-15 {
        0.0
    } else {
        w
    }
}

/// Reads the oracle cap from `KLM_HIFI_ORACLE_CAP`, falling back to
/// [`DEFAULT_ORACLE_CAP`].
pub fn oracle_cap_from_env() -> usize {
    std::env::var("KLM_HIFI_ORACLE_CAP")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_ORACLE_CAP)
}

/// End-to-end protocol run with the default cap.
pub fn simulate_protocol(
    psi: &QubitState,
    profile: &CoefficientProfile,
) -> Result<Vec<MeasurementRecord>> {
    simulate_protocol_with_cap(psi, profile, DEFAULT_ORACLE_CAP)
}

/// Ancilla, input injection, Fourier transform on modes `0..=n`, photon
/// counting and phase correction.
pub fn simulate_protocol_with_cap(
    psi: &QubitState,
    profile: &CoefficientProfile,
    cap: usize,
) -> Result<Vec<MeasurementRecord>> {
    let n = profile.n();
    if n > cap {
        return Err(Error::OracleCap { n, cap });
    }
    let ancilla = build_ancilla(profile)?;
    let joint = inject_input(psi, &ancilla)?;
    let measured: Vec<usize> = (0..=n).collect();
    let evolved = apply_mode_unitary(&joint, &dft_matrix(n + 1), &measured)?;
    let norm_sq = evolved.norm_sq();
    if (norm_sq - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized { norm_sq });
    }
    let mut records = measure_modes(&evolved, &measured)?;
    for r in records.iter_mut().filter(|r| r.conditional.is_some()) {
        r.correction_phase = Some(correction_phase(r, profile, psi)?);
    }
    Ok(records)
}

/// Total probability per photon count `k = 0..=n+1`.
pub fn probabilities_by_k(records: &[MeasurementRecord], n: usize) -> Vec<f64> {
    let mut p = vec![0.0; n + 2];
    for r in records {
        p[r.k] += r.probability;
    }
    p
}

/// Expected squared fidelity with `psi` over successful, phase-corrected
/// outcomes.
pub fn expected_fidelity_sq(records: &[MeasurementRecord], psi: &QubitState) -> f64 {
    records
        .iter()
        .filter_map(|r| {
            r.corrected_state()
                .map(|s| r.probability * crate::analytic::fidelity_sq(psi, &s))
        })
        .sum()
}

/// `2π·(Σ_j j·t_j)/m` wrapped to `[0, 2π)`: the phase the `m`-point Fourier
/// transform imprints between the two branches that differ by a cyclic
/// shift of the measured photons.
pub fn fourier_branch_phase(pattern: &OccupationVector) -> f64 {
    let m = pattern.len();
    let weighted: usize = pattern
        .counts()
        .iter()
        .enumerate()
        .map(|(j, &c)| j * c as usize)
        .sum();
    wrap_phase(2.0 * PI * (weighted % m) as f64 / m as f64)
}
