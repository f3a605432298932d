//! The entanglement-assisted qubit amplifier.
//!
//! Closed-form gain and success-probability laws together with a brute-force
//! simulated counterpart that propagates the full three-photon state through
//! the interferometer (PBS → PPBS₁/PPBS₂ → PBS) and post-selects on the
//! heralding coincidences. The two routes must agree and the test suites
//! hold them to that.
//!
//! Circuit registers: the signal enters at `In`, the maximally entangled
//! ancilla pair at `A1`/`A2`. After propagation the signal leaves at `Out`
//! and the heralding detector paths are `D1`/`D2`.

use std::collections::BTreeMap;

use num_complex::Complex;

use crate::elements::{bell_phi_plus, pbs, ppbs1, ppbs2, rotate_to_da};
use crate::error::{Error, Result};
use crate::fock::{FockState, Spatial, StateVector, DEFAULT_N_MAX};
use crate::scalar::{c_zero, Scalar, C};

/// Coefficient triple of the signal: vacuum amplitude α and polarization
/// qubit amplitudes β_H, β_V with |α|²+|β_H|²+|β_V|² = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitVacuumInput<T> {
    alpha: C<T>,
    beta_h: C<T>,
    beta_v: C<T>,
}

impl<T: Scalar> QubitVacuumInput<T> {
    pub fn new(alpha: C<T>, beta_h: C<T>, beta_v: C<T>) -> Result<Self> {
        let norm = alpha.norm_sqr() + beta_h.norm_sqr() + beta_v.norm_sqr();
        if (norm - T::one()).abs() > T::of(1e-12).max(T::epsilon() * T::of(256.0)) {
            return Err(Error::Param(format!(
                "input amplitudes are not normalized: |·|² = {norm}"
            )));
        }
        Ok(Self {
            alpha,
            beta_h,
            beta_v,
        })
    }

    /// Rescales arbitrary amplitudes to a normalized input.
    pub fn from_unnormalized(alpha: C<T>, beta_h: C<T>, beta_v: C<T>) -> Result<Self> {
        let norm = (alpha.norm_sqr() + beta_h.norm_sqr() + beta_v.norm_sqr()).sqrt();
        if norm <= T::of(1e-150) {
            return Err(Error::Param("all input amplitudes are zero".into()));
        }
        let inv = T::one() / norm;
        Ok(Self {
            alpha: alpha.scale(inv),
            beta_h: beta_h.scale(inv),
            beta_v: beta_v.scale(inv),
        })
    }

    /// Real-amplitude input with vacuum weight `alpha_sq` and the qubit part
    /// split evenly between H and V.
    pub fn from_vacuum_weight(alpha_sq: T) -> Result<Self> {
        if alpha_sq < T::zero() || alpha_sq > T::one() {
            return Err(Error::Param(format!("|α|² = {alpha_sq} not in [0,1]")));
        }
        let beta = ((T::one() - alpha_sq) / T::of(2.0)).sqrt();
        let z = T::zero();
        Self::new(
            Complex::new(alpha_sq.sqrt(), z),
            Complex::new(beta, z),
            Complex::new(beta, z),
        )
    }

    pub fn alpha(&self) -> C<T> {
        self.alpha
    }

    pub fn beta_h(&self) -> C<T> {
        self.beta_h
    }

    pub fn beta_v(&self) -> C<T> {
        self.beta_v
    }

    /// |α|².
    pub fn vacuum_weight(&self) -> T {
        self.alpha.norm_sqr()
    }

    /// |β_H|² + |β_V|².
    pub fn qubit_weight(&self) -> T {
        self.beta_h.norm_sqr() + self.beta_v.norm_sqr()
    }

    /// The signal as a Fock-space state on the `In` register.
    pub fn as_state_vector(&self, n_max: u32) -> Result<StateVector<T>> {
        StateVector::superpose(
            n_max,
            &[
                (FockState::vacuum(), self.alpha),
                (FockState::single(Spatial::In.h()), self.beta_h),
                (FockState::single(Spatial::In.v()), self.beta_v),
            ],
        )
    }
}

/// Which heralding coincidences count as success.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoincidencePolicy {
    /// Only DD and AA coincidences herald success.
    DdAaOnly,
    /// DA and AD additionally herald success, combined with the V→−V
    /// feed-forward correction on the output. Only valid at r = 0.
    WithFeedForward,
}

/// Amplifier configuration: PPBS amplitude reflectivity and herald policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplifierConfig<T> {
    r: T,
    policy: CoincidencePolicy,
}

impl<T: Scalar> AmplifierConfig<T> {
    pub fn new(r: T, policy: CoincidencePolicy) -> Result<Self> {
        if r < T::zero() || r > T::one() {
            return Err(Error::Param(format!("reflectivity {r} not in [0,1]")));
        }
        if policy == CoincidencePolicy::WithFeedForward && r != T::zero() {
            return Err(Error::Policy(
                "feed-forward doubling is established only at r = 0".into(),
            ));
        }
        Ok(Self { r, policy })
    }

    pub fn dd_aa(r: T) -> Result<Self> {
        Self::new(r, CoincidencePolicy::DdAaOnly)
    }

    pub fn r(&self) -> T {
        self.r
    }

    pub fn policy(&self) -> CoincidencePolicy {
        self.policy
    }
}

/// Result of one amplification: renormalized output triple, heralding
/// probability and the gain laws evaluated at the configured reflectivity.
#[derive(Debug, Clone, Copy)]
pub struct AmplifierOutcome<T> {
    pub output: QubitVacuumInput<T>,
    pub success_prob: T,
    pub gain: T,
    pub nominal_gain: T,
}

/// Amplification gain G = (3r²−1)²/(4r²); r = 0 yields the infinite-gain
/// sentinel.
pub fn gain<T: Scalar>(r: T) -> T {
    if r == T::zero() {
        return T::infinity();
    }
    let q = T::of(3.0) * r * r - T::one();
    q * q / (T::of(4.0) * r * r)
}

/// Success probability P = r²|α|² + ((3r²−1)/2)²(|β_H|²+|β_V|²) of the
/// DD/AA heralding policy.
pub fn success_probability<T: Scalar>(r: T, input: &QubitVacuumInput<T>) -> T {
    let q = (T::of(3.0) * r * r - T::one()) / T::of(2.0);
    r * r * input.vacuum_weight() + q * q * input.qubit_weight()
}

/// Success probability under an explicit coincidence policy. Feed-forward is
/// only defined at r = 0, where it doubles the heralding rate.
pub fn success_probability_with_policy<T: Scalar>(
    r: T,
    input: &QubitVacuumInput<T>,
    policy: CoincidencePolicy,
) -> Result<T> {
    let base = success_probability(r, input);
    match policy {
        CoincidencePolicy::DdAaOnly => Ok(base),
        CoincidencePolicy::WithFeedForward => {
            if r != T::zero() {
                return Err(Error::Policy(
                    "feed-forward doubling is established only at r = 0".into(),
                ));
            }
            Ok(T::of(2.0) * base)
        }
    }
}

/// Nominal gain G_nom = G/(|α|² + G(|β_H|²+|β_V|²)) = r²G/P, the factor by
/// which the overall qubit-presence probability grows.
pub fn nominal_gain<T: Scalar>(r: T, input: &QubitVacuumInput<T>) -> T {
    let qubit = input.qubit_weight();
    if r == T::zero() {
        // G → ∞ limit
        return if qubit > T::zero() {
            T::one() / qubit
        } else {
            T::infinity()
        };
    }
    let g = gain(r);
    g / (input.vacuum_weight() + g * qubit)
}

/// Inverts the gain law: both roots of 9r⁴ − (6+4G)r² + 1 = 0 in [0,1].
/// The high-reflectivity root exists only for G ≤ 1; the infinite-gain
/// sentinel maps to r = 0.
pub fn reflectivity_for_gain<T: Scalar>(g: T) -> (T, Option<T>) {
    if g.is_infinite() {
        return (T::zero(), None);
    }
    let disc = (g * g + T::of(3.0) * g).sqrt();
    let r2_high = (T::of(2.0) * g + T::of(3.0) + T::of(2.0) * disc) / T::of(9.0);
    // product of the r² roots is 1/9, which avoids cancellation in the low one
    let r2_low = T::one() / (T::of(9.0) * r2_high);
    let r_low = r2_low.sqrt();
    let tol = T::of(1e-12);
    if r2_high <= T::one() + tol {
        (r_low, Some(r2_high.sqrt().min(T::one())))
    } else {
        (r_low, None)
    }
}

/// Closed-form amplification: output amplitudes ∝ (αr, (3r²−1)/2·β_H,
/// (3r²−1)/2·β_V), success probability from the gain law and policy.
pub fn amplify_closed_form<T: Scalar>(
    input: &QubitVacuumInput<T>,
    config: &AmplifierConfig<T>,
) -> Result<AmplifierOutcome<T>> {
    let r = config.r;
    let q = (T::of(3.0) * r * r - T::one()) / T::of(2.0);
    let a0 = input.alpha.scale(r);
    let ah = input.beta_h.scale(q);
    let av = input.beta_v.scale(q);
    let p = success_probability_with_policy(r, input, config.policy)?;
    if p < T::of(1e-26) {
        return Err(Error::ZeroSuccess);
    }
    Ok(AmplifierOutcome {
        output: QubitVacuumInput::from_unnormalized(a0, ah, av)?,
        success_prob: p,
        gain: gain(r),
        nominal_gain: nominal_gain(r, input),
    })
}

/// Runs the interferometer on a state that already carries the ancilla
/// photons on `A1`/`A2`: input PBS, both PPBS elements, output PBS. The
/// returned state lives on `Out`, `D1`, `D2` (still in the H/V basis) plus
/// any spectator registers.
pub fn run_interferometer<T: Scalar>(total: &StateVector<T>, r: T) -> Result<StateVector<T>> {
    const RESERVED: [Spatial; 7] = [
        Spatial::Arm1,
        Spatial::Arm2,
        Spatial::D1,
        Spatial::D2,
        Spatial::Out,
        Spatial::AuxOut,
        Spatial::Anc(0),
    ];
    let occupied = total.occupied_registers();
    for reg in RESERVED {
        if occupied.contains(&reg) {
            return Err(Error::Param(format!(
                "input state occupies reserved circuit register {reg}"
            )));
        }
    }
    let st = pbs(
        total,
        Spatial::In,
        Spatial::Anc(0),
        Spatial::Arm1,
        Spatial::Arm2,
    )?;
    let st = ppbs1(&st, Spatial::Arm1, Spatial::A1, r)?;
    let st = st.rename_spatial(Spatial::A1, Spatial::D1)?;
    let st = ppbs2(&st, Spatial::Arm2, Spatial::A2, r)?;
    let st = st.rename_spatial(Spatial::A2, Spatial::D2)?;
    pbs(
        &st,
        Spatial::Arm1,
        Spatial::Arm2,
        Spatial::Out,
        Spatial::AuxOut,
    )
}

/// Propagates a state through the amplifier optics: tensors in the |Φ⁺⟩
/// ancilla pair on `A1`/`A2` and runs the interferometer. The input
/// truncation must leave room for the two ancilla photons.
pub fn propagate<T: Scalar>(input: &StateVector<T>, r: T) -> Result<StateVector<T>> {
    for reg in [Spatial::A1, Spatial::A2] {
        if input.occupied_registers().contains(&reg) {
            return Err(Error::Param(format!(
                "input state occupies ancilla register {reg}"
            )));
        }
    }
    let ancilla = bell_phi_plus(Spatial::A1, Spatial::A2, input.n_max());
    run_interferometer(&input.tensor(&ancilla)?, r)
}

/// Rotates both heralding detector registers into the D/A basis (the H slot
/// then holds the D amplitude).
pub fn rotate_detectors<T: Scalar>(state: &StateVector<T>) -> Result<StateVector<T>> {
    rotate_to_da(&rotate_to_da(state, Spatial::D1)?, Spatial::D2)
}

/// One heralding coincidence: detector occupation pattern (after the D/A
/// rotation) plus whether the V→−V feed-forward correction applies.
#[derive(Debug, Clone)]
pub struct HeraldPattern {
    pub name: &'static str,
    pub pattern: BTreeMap<crate::fock::ModeLabel, u32>,
    pub v_flip: bool,
}

/// Coincidence patterns heralding success under the given policy, in the
/// fixed order DD, AA (, DA, AD).
pub fn herald_patterns(policy: CoincidencePolicy) -> Vec<HeraldPattern> {
    let pat = |d1_diag: bool, d2_diag: bool| {
        let mut m = BTreeMap::new();
        m.insert(Spatial::D1.h(), u32::from(d1_diag));
        m.insert(Spatial::D1.v(), u32::from(!d1_diag));
        m.insert(Spatial::D2.h(), u32::from(d2_diag));
        m.insert(Spatial::D2.v(), u32::from(!d2_diag));
        m
    };
    let mut out = vec![
        HeraldPattern {
            name: "DD",
            pattern: pat(true, true),
            v_flip: false,
        },
        HeraldPattern {
            name: "AA",
            pattern: pat(false, false),
            v_flip: false,
        },
    ];
    if policy == CoincidencePolicy::WithFeedForward {
        out.push(HeraldPattern {
            name: "DA",
            pattern: pat(true, false),
            v_flip: true,
        });
        out.push(HeraldPattern {
            name: "AD",
            pattern: pat(false, true),
            v_flip: true,
        });
    }
    out
}

fn extract_output<T: Scalar>(
    remainder: &StateVector<T>,
    v_flip: bool,
) -> Result<(C<T>, C<T>, C<T>)> {
    let mut a0 = c_zero();
    let mut ah = c_zero();
    let mut av = c_zero();
    let vac = FockState::vacuum();
    let h_out = FockState::single(Spatial::Out.h());
    let v_out = FockState::single(Spatial::Out.v());
    for (fs, amp) in remainder.terms() {
        if *fs == vac {
            a0 = *amp;
        } else if *fs == h_out {
            ah = *amp;
        } else if *fs == v_out {
            av = if v_flip { -*amp } else { *amp };
        } else if amp.norm() > T::of(1e-9) {
            return Err(Error::Numeric(format!(
                "unexpected heralded output term {fs}"
            )));
        }
    }
    Ok((a0, ah, av))
}

/// Brute-force amplification: full Fock-space evolution of the signal with
/// the ancilla pair, heralded on the coincidences the policy allows.
pub fn amplify_simulated<T: Scalar>(
    input: &QubitVacuumInput<T>,
    config: &AmplifierConfig<T>,
) -> Result<AmplifierOutcome<T>> {
    let sv = input.as_state_vector(DEFAULT_N_MAX)?;
    let st = rotate_detectors(&propagate(&sv, config.r)?)?;

    let mut total_p = T::zero();
    let mut dd_amps: Option<(C<T>, C<T>, C<T>)> = None;
    for hp in herald_patterns(config.policy) {
        let (rem, p) = st.project(&hp.pattern);
        total_p = total_p + p;
        if hp.name == "DD" {
            dd_amps = Some(extract_output(&rem, hp.v_flip)?);
        }
    }
    if total_p < T::of(1e-26) {
        return Err(Error::ZeroSuccess);
    }
    let (a0, ah, av) = dd_amps.expect("DD pattern always present");
    Ok(AmplifierOutcome {
        output: QubitVacuumInput::from_unnormalized(a0, ah, av)?,
        success_prob: total_p,
        gain: gain(config.r),
        nominal_gain: nominal_gain(config.r, input),
    })
}

/// Gain measured from input/output intensity ratios, when defined: the
/// factor multiplying the qubit-to-vacuum probability ratio.
pub fn measured_gain<T: Scalar>(
    input: &QubitVacuumInput<T>,
    output: &QubitVacuumInput<T>,
) -> Option<T> {
    let vin = input.vacuum_weight();
    let qin = input.qubit_weight();
    let vout = output.vacuum_weight();
    let qout = output.qubit_weight();
    let tiny = T::of(1e-200);
    if vin < tiny || qin < tiny || vout < tiny || qout < tiny {
        return None;
    }
    Some((qout / vout) / (qin / vin))
}

/// One row of the gain/success-probability trade-off sweep.
#[derive(Debug, Clone, Copy)]
pub struct GainSweepPoint<T> {
    pub gain: T,
    pub reflectivity: T,
    pub success_prob: T,
    pub nominal_gain: T,
}

/// Evaluates the DD/AA success probability along a gain grid, choosing for
/// each target gain the reflectivity branch with the higher success
/// probability (the larger root when the gain admits two).
pub fn sweep_gain_probability<T: Scalar>(
    input: &QubitVacuumInput<T>,
    gains: &[T],
) -> Vec<GainSweepPoint<T>> {
    gains
        .iter()
        .map(|&g| {
            let (r_low, r_high) = reflectivity_for_gain(g);
            let r = r_high.unwrap_or(r_low);
            GainSweepPoint {
                gain: g,
                reflectivity: r,
                success_prob: success_probability(r, input),
                nominal_gain: nominal_gain(r, input),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    fn qv(alpha: f64, bh: f64, bv: f64) -> QubitVacuumInput<f64> {
        QubitVacuumInput::from_unnormalized(c(alpha, 0.0), c(bh, 0.0), c(bv, 0.0)).unwrap()
    }

    #[test]
    fn gain_anchors() {
        assert!((gain(1.0f64) - 1.0).abs() < 1e-15);
        assert!(gain(0.0f64).is_infinite());
        let r3 = 1.0 / 3.0f64.sqrt();
        assert!(gain(r3).abs() < 1e-15);
        assert!((gain(0.5f64) - 0.0625).abs() < 1e-15);
    }

    #[test]
    fn success_probability_anchors() {
        let input = qv(0.6, 0.64, 0.48);
        assert!((success_probability(1.0, &input) - 1.0).abs() < 1e-12);

        let qubit = qv(0.0, 1.0, 1.0);
        assert!((success_probability(0.0, &qubit) - 0.25).abs() < 1e-15);
        let ff = success_probability_with_policy(0.0, &qubit, CoincidencePolicy::WithFeedForward)
            .unwrap();
        assert!((ff - 0.5).abs() < 1e-15);
    }

    #[test]
    fn feed_forward_rejected_at_positive_reflectivity() {
        let qubit = qv(0.0, 1.0, 0.0);
        let err = success_probability_with_policy(0.3, &qubit, CoincidencePolicy::WithFeedForward)
            .unwrap_err();
        assert!(matches!(err, Error::Policy(_)));
        assert!(AmplifierConfig::new(0.3, CoincidencePolicy::WithFeedForward).is_err());
        assert!(AmplifierConfig::new(0.0, CoincidencePolicy::WithFeedForward).is_ok());
    }

    #[test]
    fn nominal_gain_anchors() {
        // G = 1 at r = 1: denominator is the input norm, so G_nom = 1
        let input = qv(0.7, 0.5, 0.2);
        assert!((nominal_gain(1.0, &input) - 1.0).abs() < 1e-12);
        // |α|² = 0.95: G → ∞ bound 1/|β|² = 20
        let mostly_vacuum = QubitVacuumInput::from_vacuum_weight(0.95f64).unwrap();
        assert!((nominal_gain(0.0, &mostly_vacuum) - 20.0).abs() < 1e-12);
        // |α|² = 0.5: bound 2
        let half = QubitVacuumInput::from_vacuum_weight(0.5f64).unwrap();
        assert!((nominal_gain(0.0, &half) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn reflectivity_inversion() {
        let (lo, hi) = reflectivity_for_gain(1.0f64);
        assert!((lo - 1.0 / 3.0).abs() < 1e-12);
        assert!((hi.unwrap() - 1.0).abs() < 1e-12);

        let (lo, hi) = reflectivity_for_gain(f64::INFINITY);
        assert_eq!(lo, 0.0);
        assert!(hi.is_none());

        let (lo, hi) = reflectivity_for_gain(4.0f64);
        assert!(hi.is_none());
        let expect = ((11.0 - 2.0 * 28.0f64.sqrt()) / 9.0).sqrt();
        assert!((lo - expect).abs() < 1e-12);
        assert!((gain(lo) - 4.0).abs() < 1e-10);
    }

    #[test]
    fn closed_form_r1_is_identity() {
        let input = qv(0.5, 0.7, -0.2);
        let out = amplify_closed_form(&input, &AmplifierConfig::dd_aa(1.0).unwrap()).unwrap();
        assert!((out.success_prob - 1.0).abs() < 1e-12);
        assert!((out.output.alpha() - input.alpha()).norm() < 1e-12);
        assert!((out.output.beta_h() - input.beta_h()).norm() < 1e-12);
        assert!((out.output.beta_v() - input.beta_v()).norm() < 1e-12);
    }

    #[test]
    fn closed_form_r0_strips_vacuum() {
        let input = qv(0.8, 0.4, 0.3);
        let out = amplify_closed_form(&input, &AmplifierConfig::dd_aa(0.0).unwrap()).unwrap();
        assert!(out.output.vacuum_weight() < 1e-24);
        let ratio = out.output.beta_h() / out.output.beta_v();
        let expect = input.beta_h() / input.beta_v();
        assert!((ratio - expect).norm() < 1e-12);
    }

    #[test]
    fn closed_form_vacuum_fraction_at_gain_two() {
        let input = QubitVacuumInput::from_vacuum_weight(0.5f64).unwrap();
        let (r, _) = reflectivity_for_gain(2.0f64);
        let out = amplify_closed_form(&input, &AmplifierConfig::dd_aa(r).unwrap()).unwrap();
        assert!((out.output.vacuum_weight() - 1.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn zero_success_for_pure_qubit_at_degenerate_reflectivity() {
        let input = qv(0.0, 1.0, 1.0);
        let r = 1.0 / 3.0f64.sqrt();
        let err = amplify_closed_form(&input, &AmplifierConfig::dd_aa(r).unwrap()).unwrap_err();
        assert_eq!(err, Error::ZeroSuccess);
        let err = amplify_simulated(&input, &AmplifierConfig::dd_aa(r).unwrap()).unwrap_err();
        assert_eq!(err, Error::ZeroSuccess);
    }

    /// The six post-selected evolutions of the total input state, checked
    /// term by term against the circuit propagation (detectors still in the
    /// H/V basis, exactly one photon per detector path).
    #[test]
    fn six_term_table() {
        use crate::fock::ModeLabel;
        let r = 0.73f64;
        let rr = r * r;

        let h = |s: Spatial| s.h();
        let v = |s: Spatial| s.v();
        let term = |modes: &[ModeLabel]| {
            FockState::from_pairs(&modes.iter().map(|&m| (m, 1)).collect::<Vec<_>>())
        };

        // (input signal mode or vacuum, ancilla pair pol, herald pols, coefficient)
        let cases: Vec<(Option<ModeLabel>, char, f64)> = vec![
            (None, 'H', r),
            (None, 'V', r),
            (Some(h(Spatial::In)), 'H', 2.0 * rr - 1.0),
            (Some(h(Spatial::In)), 'V', rr),
            (Some(v(Spatial::In)), 'H', rr),
            (Some(v(Spatial::In)), 'V', 2.0 * rr - 1.0),
        ];

        for (signal, anc, coeff) in cases {
            let mut modes = Vec::new();
            if let Some(m) = signal {
                modes.push(m);
            }
            let (a1, a2) = match anc {
                'H' => (h(Spatial::A1), h(Spatial::A2)),
                _ => (v(Spatial::A1), v(Spatial::A2)),
            };
            modes.push(a1);
            modes.push(a2);
            let sv = StateVector::superpose(4, &[(term(&modes), c(1.0, 0.0))]).unwrap();
            let out = run_interferometer(&sv, r).unwrap();

            // post-select exactly one photon per detector block with the
            // ancilla polarization, one pattern per term
            let det_pol = anc;
            let mut pattern = BTreeMap::new();
            pattern.insert(Spatial::D1.h(), u32::from(det_pol == 'H'));
            pattern.insert(Spatial::D1.v(), u32::from(det_pol == 'V'));
            pattern.insert(Spatial::D2.h(), u32::from(det_pol == 'H'));
            pattern.insert(Spatial::D2.v(), u32::from(det_pol == 'V'));
            let (rem, _) = out.project(&pattern);

            let expected_fs = match signal {
                None => FockState::vacuum(),
                Some(m) => FockState::single(Spatial::Out.mode(m.pol)),
            };
            let amp = rem.amplitude(&expected_fs);
            assert!(
                (amp - c(coeff, 0.0)).norm() < 1e-12,
                "signal {signal:?}, ancilla {anc}: got {amp}, want {coeff}"
            );
        }
    }

    #[test]
    fn simulated_matches_closed_form_on_sampled_inputs() {
        // deterministic xorshift sampling; the full 1000-pair suite lives in
        // the acceptance tests
        let mut seed = 0x1234_5678_9abc_def0u64;
        let mut next = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..25 {
            let input = QubitVacuumInput::from_unnormalized(
                c(next() - 0.5, next() - 0.5),
                c(next() - 0.5, next() - 0.5),
                c(next() - 0.5, next() - 0.5),
            )
            .unwrap();
            let r = next();
            let config = AmplifierConfig::dd_aa(r).unwrap();
            let cf = amplify_closed_form(&input, &config).unwrap();
            let sim = amplify_simulated(&input, &config).unwrap();
            assert!((cf.success_prob - sim.success_prob).abs() < 1e-10);
            let fid = (cf.output.alpha().conj() * sim.output.alpha()
                + cf.output.beta_h().conj() * sim.output.beta_h()
                + cf.output.beta_v().conj() * sim.output.beta_v())
            .norm_sqr();
            assert!(fid > 1.0 - 1e-10, "fidelity {fid}");
        }
    }

    #[test]
    fn measured_gain_is_input_independent() {
        let r = 0.62f64;
        let config = AmplifierConfig::dd_aa(r).unwrap();
        for input in [qv(0.5, 0.6, 0.4), qv(0.9, 0.1, 0.3), qv(0.3, 0.9, 0.2)] {
            let sim = amplify_simulated(&input, &config).unwrap();
            let meas = measured_gain(&input, &sim.output).unwrap();
            assert!((meas - gain(r)).abs() < 1e-10, "measured {meas}");
        }
    }

    #[test]
    fn qubit_coherence_preserved() {
        let input =
            QubitVacuumInput::from_unnormalized(c(0.5, 0.1), c(0.4, 0.3), c(-0.2, 0.6)).unwrap();
        let config = AmplifierConfig::dd_aa(0.8).unwrap();
        let sim = amplify_simulated(&input, &config).unwrap();
        let ratio_in = input.beta_h() / input.beta_v();
        let ratio_out = sim.output.beta_h() / sim.output.beta_v();
        assert!((ratio_in - ratio_out).norm() < 1e-10);
    }

    #[test]
    fn r0_output_has_no_multiphoton_component_even_for_contaminated_input() {
        // input deliberately contaminated with a two-photon term
        let amp = 1.0 / 3.0f64.sqrt();
        let sv = StateVector::superpose(
            4,
            &[
                (FockState::vacuum(), c(amp, 0.0)),
                (FockState::single(Spatial::In.h()), c(amp, 0.0)),
                (FockState::from_pairs(&[(Spatial::In.h(), 2)]), c(amp, 0.0)),
            ],
        )
        .unwrap();
        let st = rotate_detectors(&propagate(&sv, 0.0).unwrap()).unwrap();
        for hp in herald_patterns(CoincidencePolicy::WithFeedForward) {
            let (rem, p) = st.project(&hp.pattern);
            if p < 1e-30 {
                continue;
            }
            for (fs, amp) in rem.terms() {
                assert!(
                    fs.total_photons() <= 1 || amp.norm() < 1e-12,
                    "herald {} leaves multiphoton term {fs}",
                    hp.name
                );
            }
        }
    }

    #[test]
    fn feed_forward_doubles_success_at_infinite_gain() {
        let input = qv(0.0, 0.6, 0.8);
        let dd = amplify_simulated(&input, &AmplifierConfig::dd_aa(0.0).unwrap()).unwrap();
        let ff = amplify_simulated(
            &input,
            &AmplifierConfig::new(0.0, CoincidencePolicy::WithFeedForward).unwrap(),
        )
        .unwrap();
        assert!((dd.success_prob - 0.25).abs() < 1e-12);
        assert!((ff.success_prob - 0.5).abs() < 1e-12);
    }

    #[test]
    fn feed_forward_branches_match_after_correction() {
        let input = qv(0.4, 0.5, -0.7);
        let sv = input.as_state_vector(4).unwrap();
        let st = rotate_detectors(&propagate(&sv, 0.0).unwrap()).unwrap();
        let mut outputs = Vec::new();
        for hp in herald_patterns(CoincidencePolicy::WithFeedForward) {
            let (rem, p) = st.project(&hp.pattern);
            assert!(p > 0.0);
            let (a0, ah, av) = extract_output(&rem, hp.v_flip).unwrap();
            outputs.push(QubitVacuumInput::from_unnormalized(a0, ah, av).unwrap());
        }
        let first = outputs[0];
        for other in &outputs[1..] {
            let fid = (first.alpha().conj() * other.alpha()
                + first.beta_h().conj() * other.beta_h()
                + first.beta_v().conj() * other.beta_v())
            .norm_sqr();
            assert!(fid > 1.0 - 1e-12);
        }
    }

    #[test]
    fn sweep_has_unit_probability_at_unit_gain_and_correct_limit() {
        let input = QubitVacuumInput::from_vacuum_weight(0.5f64).unwrap();
        let gains = [1.0, 2.0, 10.0, 1e6, f64::INFINITY];
        let rows = sweep_gain_probability(&input, &gains);
        assert!((rows[0].success_prob - 1.0).abs() < 1e-12);
        // P(G→∞) → |β|²/4 = 0.125; the approach is non-monotone but stays
        // strictly positive for |α|² ≠ 1
        assert!((rows[4].success_prob - 0.125).abs() < 1e-12);
        assert!((rows[3].success_prob - 0.125).abs() < 1e-3);
        for w in rows.windows(2) {
            assert!(w[1].gain >= w[0].gain);
            assert!(w[1].success_prob > 0.0);
        }
    }
}
