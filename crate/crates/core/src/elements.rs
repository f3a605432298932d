//! Optical components and channels as transformations on Fock states.
//!
//! The polarizing beam splitters follow one fixed phase convention, matching
//! the partially-polarizing splitter rules: reflection keeps the spatial
//! register and a full reflection of the second port carries a −1, so a
//! two-mode splitter with amplitude reflectivity r acts as
//!
//! ```text
//! a†(x) → r·a†(x) + √(1−r²)·a†(y)
//! a†(y) → √(1−r²)·a†(x) − r·a†(y)
//! ```

use std::collections::BTreeMap;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::fock::{DensityMatrix, FockState, ModeLabel, Polarization, Spatial, StateVector};
use crate::scalar::{Scalar, C};

/// Detector type: bucket (click / no-click) or photon-number resolving.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetectorKind {
    Bucket,
    PhotonNumberResolving,
}

/// Detector model: combined detection×coupling efficiency applied as a
/// beam-splitter loss in front of an ideal detector, and an independent
/// per-gate dark-count probability OR-ed with photon-induced clicks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorModel<T> {
    pub kind: DetectorKind,
    pub efficiency: T,
    pub dark_count_prob: T,
}

impl<T: Scalar> DetectorModel<T> {
    pub fn new(kind: DetectorKind, efficiency: T, dark_count_prob: T) -> Result<Self> {
        if efficiency < T::zero() || efficiency > T::one() {
            return Err(Error::Param(format!(
                "efficiency {efficiency} not in [0,1]"
            )));
        }
        if dark_count_prob < T::zero() || dark_count_prob >= T::one() {
            return Err(Error::Param(format!(
                "dark count probability {dark_count_prob} not in [0,1)"
            )));
        }
        Ok(Self {
            kind,
            efficiency,
            dark_count_prob,
        })
    }

    pub fn ideal_bucket() -> Self {
        Self {
            kind: DetectorKind::Bucket,
            efficiency: T::one(),
            dark_count_prob: T::zero(),
        }
    }

    pub fn ideal_pnr() -> Self {
        Self {
            kind: DetectorKind::PhotonNumberResolving,
            efficiency: T::one(),
            dark_count_prob: T::zero(),
        }
    }

    /// Click probability given `n` photons at the detector input.
    pub fn click_prob(&self, n: u32) -> T {
        let survive_none = (T::one() - self.efficiency).powi(n as i32);
        T::one() - survive_none * (T::one() - self.dark_count_prob)
    }

    /// No-click probability given `n` photons at the detector input.
    pub fn no_click_prob(&self, n: u32) -> T {
        T::one() - self.click_prob(n)
    }
}

/// Lossy channel with intensity transmissivity 0 < T ≤ 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSpec<T> {
    pub transmissivity: T,
}

impl<T: Scalar> ChannelSpec<T> {
    pub fn new(transmissivity: T) -> Result<Self> {
        if transmissivity <= T::zero() || transmissivity > T::one() {
            return Err(Error::Param(format!(
                "transmissivity {transmissivity} not in (0,1]"
            )));
        }
        Ok(Self { transmissivity })
    }

    /// Channel loss expressed in dB (10^(-dB/10) intensity transmission).
    pub fn from_loss_db(db: T) -> Result<Self> {
        if db < T::zero() {
            return Err(Error::Param(format!("channel loss {db} dB is negative")));
        }
        let t = T::of(10.0).powf(-db / T::of(10.0));
        Self::new(t)
    }
}

/// Two-mode splitter matrix with amplitude reflectivity `r` in the fixed
/// phase convention of this module.
pub fn splitter_unitary<T: Scalar>(r: T) -> [[C<T>; 2]; 2] {
    let s = (T::one() - r * r).max(T::zero()).sqrt();
    let z = T::zero();
    [
        [Complex::new(r, z), Complex::new(s, z)],
        [Complex::new(s, z), Complex::new(-r, z)],
    ]
}

fn check_r<T: Scalar>(r: T) -> Result<()> {
    if r < T::zero() || r > T::one() {
        return Err(Error::Param(format!("reflectivity {r} not in [0,1]")));
    }
    Ok(())
}

/// Polarizing beam splitter: H is transmitted (`in1→out1`, `in2→out2`), V is
/// reflected (`in1→out2`, `in2→out1`) with a −1 phase per reflection.
pub fn pbs<T: Scalar>(
    state: &StateVector<T>,
    in1: Spatial,
    in2: Spatial,
    out1: Spatial,
    out2: Spatial,
) -> Result<StateVector<T>> {
    let ports = [in1, in2, out1, out2];
    for i in 0..4 {
        for j in (i + 1)..4 {
            if ports[i] == ports[j] {
                return Err(Error::Param("pbs ports must be pairwise distinct".into()));
            }
        }
    }
    let mut terms: Vec<(FockState, C<T>)> = Vec::with_capacity(state.term_count());
    for (fs, amp) in state.terms() {
        if fs.photons_in(out1) > 0 || fs.photons_in(out2) > 0 {
            return Err(Error::Param("pbs output register already occupied".into()));
        }
        let nh1 = fs.occupation(in1.h());
        let nh2 = fs.occupation(in2.h());
        let nv1 = fs.occupation(in1.v());
        let nv2 = fs.occupation(in2.v());
        let moved = fs
            .with_occupation(in1.h(), 0)
            .with_occupation(in2.h(), 0)
            .with_occupation(in1.v(), 0)
            .with_occupation(in2.v(), 0)
            .with_occupation(out1.h(), nh1)
            .with_occupation(out2.h(), nh2)
            .with_occupation(out2.v(), nv1)
            .with_occupation(out1.v(), nv2);
        let sign = if (nv1 + nv2) % 2 == 0 {
            T::one()
        } else {
            -T::one()
        };
        terms.push((moved, amp.scale(sign)));
    }
    StateVector::superpose(state.n_max(), &terms)
}

/// PPBS₁: fully reflects V (−1 on the ancilla port) and has amplitude
/// reflectivity `r` for H. Acts in place on the `signal` and `ancilla`
/// registers; the ancilla register carries the detector path afterwards.
pub fn ppbs1<T: Scalar>(
    state: &StateVector<T>,
    signal: Spatial,
    ancilla: Spatial,
    r: T,
) -> Result<StateVector<T>> {
    check_r(r)?;
    let u_h = splitter_unitary(r);
    let u_v = splitter_unitary(T::one());
    state
        .apply_two_mode_unitary(signal.h(), ancilla.h(), &u_h)?
        .apply_two_mode_unitary(signal.v(), ancilla.v(), &u_v)
}

/// PPBS₂: the same element with the roles of H and V exchanged.
pub fn ppbs2<T: Scalar>(
    state: &StateVector<T>,
    signal: Spatial,
    ancilla: Spatial,
    r: T,
) -> Result<StateVector<T>> {
    check_r(r)?;
    let u_h = splitter_unitary(T::one());
    let u_v = splitter_unitary(r);
    state
        .apply_two_mode_unitary(signal.h(), ancilla.h(), &u_h)?
        .apply_two_mode_unitary(signal.v(), ancilla.v(), &u_v)
}

/// Couples `mode` to an initially-empty environment mode with amplitude √T,
/// keeping the state pure. Tracing the environment afterwards realizes the
/// lossy channel.
pub fn lossy_coupling<T: Scalar>(
    state: &StateVector<T>,
    mode: ModeLabel,
    env: ModeLabel,
    transmissivity: T,
) -> Result<StateVector<T>> {
    let spec = ChannelSpec::new(transmissivity)?;
    for (fs, _) in state.terms() {
        if fs.occupation(env) > 0 {
            return Err(Error::Param(format!("environment mode {env} is occupied")));
        }
    }
    state.apply_two_mode_unitary(mode, env, &splitter_unitary(spec.transmissivity.sqrt()))
}

/// Lossy channel on both polarization modes of one spatial register.
pub fn loss_channel<T: Scalar>(
    dm: &DensityMatrix<T>,
    spatial: Spatial,
    transmissivity: T,
) -> Result<DensityMatrix<T>> {
    let spec = ChannelSpec::new(transmissivity)?;
    Ok(dm
        .lossy_mode(spatial.h(), spec.transmissivity)
        .lossy_mode(spatial.v(), spec.transmissivity))
}

/// Coherent attenuation: a beam splitter with transmissivity ν on both
/// polarization modes of `spatial`, post-selected on vacuum in the ancillary
/// mode. Returns the renormalized state and the post-selection probability.
pub fn coherent_attenuator<T: Scalar>(
    state: &StateVector<T>,
    spatial: Spatial,
    nu: T,
) -> Result<(StateVector<T>, T)> {
    if nu <= T::zero() || nu > T::one() {
        return Err(Error::Param(format!("attenuation {nu} not in (0,1]")));
    }
    let anc = Spatial::Anc(100);
    for (fs, _) in state.terms() {
        if fs.photons_in(anc) > 0 {
            return Err(Error::Param("attenuator ancilla register occupied".into()));
        }
    }
    let u = splitter_unitary(nu.sqrt());
    let coupled = state
        .apply_two_mode_unitary(spatial.h(), anc.h(), &u)?
        .apply_two_mode_unitary(spatial.v(), anc.v(), &u)?;
    let mut pattern = BTreeMap::new();
    pattern.insert(anc.h(), 0);
    pattern.insert(anc.v(), 0);
    let (remainder, prob) = coupled.project(&pattern);
    if remainder.is_zero() {
        return Err(Error::ZeroSuccess);
    }
    Ok((remainder.normalized()?, prob))
}

/// Rotates the polarization pair of `spatial` from H/V to D/A: afterwards the
/// H slot holds the diagonal (D) amplitude and the V slot the anti-diagonal
/// (A) amplitude. The rotation is involutory.
pub fn rotate_to_da<T: Scalar>(state: &StateVector<T>, spatial: Spatial) -> Result<StateVector<T>> {
    let h = T::FRAC_1_SQRT_2();
    let z = T::zero();
    let u = [
        [Complex::new(h, z), Complex::new(h, z)],
        [Complex::new(h, z), Complex::new(-h, z)],
    ];
    state.apply_two_mode_unitary(spatial.h(), spatial.v(), &u)
}

/// Detection outcome label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetectOutcome {
    Click,
    NoClick,
    Count(u32),
}

/// Measures one mode with the given detector model. Returns every outcome
/// with nonzero probability together with the conditional state, which has
/// the detected mode traced out. Probabilities sum to 1 for a normalized
/// input.
pub fn detect<T: Scalar>(
    dm: &DensityMatrix<T>,
    mode: ModeLabel,
    model: &DetectorModel<T>,
) -> Result<Vec<(DetectOutcome, T, DensityMatrix<T>)>> {
    let rho = dm.lossy_mode(mode, model.efficiency);
    let n_top = rho
        .basis()
        .iter()
        .map(|f| f.occupation(mode))
        .max()
        .unwrap_or(0);
    let blocks: Vec<(DensityMatrix<T>, T)> =
        (0..=n_top).map(|n| rho.occupation_block(mode, n)).collect();
    let d = model.dark_count_prob;
    let tiny = T::of(1e-300);

    let mut out = Vec::new();
    match model.kind {
        DetectorKind::Bucket => {
            let p0 = blocks[0].1;
            let p_noclick = (T::one() - d) * p0;
            if p_noclick > tiny {
                out.push((DetectOutcome::NoClick, p_noclick, blocks[0].0.normalized()?));
            }
            // click: any photon surviving, or a dark count on the empty gate
            let mut click_state = blocks[0].0.scaled(d);
            let mut p_click = d * p0;
            for b in blocks.iter().skip(1) {
                click_state = click_state.add_scaled(&b.0, T::one());
                p_click = p_click + b.1;
            }
            if p_click > tiny {
                out.push((DetectOutcome::Click, p_click, click_state.normalized()?));
            }
        }
        DetectorKind::PhotonNumberResolving => {
            // a dark count adds one to the reported number
            for k in 0..=(n_top + 1) {
                let mut p = T::zero();
                let mut parts: Option<DensityMatrix<T>> = None;
                if k <= n_top {
                    p = p + (T::one() - d) * blocks[k as usize].1;
                    parts = Some(blocks[k as usize].0.scaled(T::one() - d));
                }
                if k > 0 && k - 1 <= n_top {
                    p = p + d * blocks[(k - 1) as usize].1;
                    let dark_part = blocks[(k - 1) as usize].0.scaled(d);
                    parts = Some(match parts {
                        Some(acc) => acc.add_scaled(&dark_part, T::one()),
                        None => dark_part,
                    });
                }
                if p > tiny {
                    out.push((
                        DetectOutcome::Count(k),
                        p,
                        parts
                            .expect("nonzero probability implies a block")
                            .normalized()?,
                    ));
                }
            }
        }
    }
    Ok(out)
}

/// A maximally entangled ancilla pair (|H,H⟩ + |V,V⟩)/√2 on two registers.
pub fn bell_phi_plus<T: Scalar>(reg1: Spatial, reg2: Spatial, n_max: u32) -> StateVector<T> {
    let s = T::FRAC_1_SQRT_2();
    let hh = FockState::from_pairs(&[(reg1.h(), 1), (reg2.h(), 1)]);
    let vv = FockState::from_pairs(&[(reg1.v(), 1), (reg2.v(), 1)]);
    StateVector::superpose(
        n_max,
        &[
            (hh, Complex::new(s, T::zero())),
            (vv, Complex::new(s, T::zero())),
        ],
    )
    .expect("two photons fit any sane truncation")
}

#[allow(unused)]
fn polarization_modes(s: Spatial) -> [ModeLabel; 2] {
    [s.mode(Polarization::H), s.mode(Polarization::V)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    type SV = StateVector<f64>;

    fn single_h(reg: Spatial) -> SV {
        SV::superpose(4, &[(FockState::single(reg.h()), c(1.0, 0.0))]).unwrap()
    }

    fn single_v(reg: Spatial) -> SV {
        SV::superpose(4, &[(FockState::single(reg.v()), c(1.0, 0.0))]).unwrap()
    }

    #[test]
    fn pbs_transmits_h() {
        let sv = single_h(Spatial::In);
        let out = pbs(
            &sv,
            Spatial::In,
            Spatial::Anc(0),
            Spatial::Arm1,
            Spatial::Arm2,
        )
        .unwrap();
        let amp = out.amplitude(&FockState::single(Spatial::Arm1.h()));
        assert!((amp - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn pbs_reflects_v_with_convention_phase() {
        let sv = single_v(Spatial::In);
        let out = pbs(
            &sv,
            Spatial::In,
            Spatial::Anc(0),
            Spatial::Arm1,
            Spatial::Arm2,
        )
        .unwrap();
        let amp = out.amplitude(&FockState::single(Spatial::Arm2.v()));
        assert!((amp - c(-1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn pbs_is_linear_on_superpositions() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let sv = SV::superpose(
            4,
            &[
                (FockState::single(Spatial::In.h()), c(s, 0.0)),
                (FockState::single(Spatial::In.v()), c(s, 0.0)),
            ],
        )
        .unwrap();
        let out = pbs(
            &sv,
            Spatial::In,
            Spatial::Anc(0),
            Spatial::Arm1,
            Spatial::Arm2,
        )
        .unwrap();
        assert!((out.amplitude(&FockState::single(Spatial::Arm1.h())) - c(s, 0.0)).norm() < 1e-14);
        assert!((out.amplitude(&FockState::single(Spatial::Arm2.v())) - c(-s, 0.0)).norm() < 1e-14);
        assert!((out.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn ppbs1_r1_transparent_for_signal_h() {
        let sv = single_h(Spatial::Arm1);
        let out = ppbs1(&sv, Spatial::Arm1, Spatial::A1, 1.0).unwrap();
        let amp = out.amplitude(&FockState::single(Spatial::Arm1.h()));
        assert!((amp - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn ppbs1_r0_diverts_signal_h_to_detector_path() {
        let sv = single_h(Spatial::Arm1);
        let out = ppbs1(&sv, Spatial::Arm1, Spatial::A1, 0.0).unwrap();
        let amp = out.amplitude(&FockState::single(Spatial::A1.h()));
        assert!((amp - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn ppbs1_ancilla_rules() {
        // a†(a1,H) → −r·a†(a1→D1,H) + √(1−r²)·a†(arm,H);  a†(a1,V) → −a†(a1,V)
        let r: f64 = 0.6;
        let s = (1.0 - r * r).sqrt();
        let svh = single_h(Spatial::A1);
        let out = ppbs1(&svh, Spatial::Arm1, Spatial::A1, r).unwrap();
        assert!((out.amplitude(&FockState::single(Spatial::A1.h())) - c(-r, 0.0)).norm() < 1e-14);
        assert!((out.amplitude(&FockState::single(Spatial::Arm1.h())) - c(s, 0.0)).norm() < 1e-14);

        let svv = single_v(Spatial::A1);
        let out = ppbs1(&svv, Spatial::Arm1, Spatial::A1, r).unwrap();
        assert!((out.amplitude(&FockState::single(Spatial::A1.v())) - c(-1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn ppbs_two_photon_interference_coefficient() {
        // |H_sig H_anc⟩: coefficient of |H_sig H_anc⟩ after the element is
        // (1−2r²) from (r a + s b)(s a − r b) = rs a² − sr b² + (s²−r²) ab.
        let r: f64 = 0.37;
        let fs = FockState::from_pairs(&[(Spatial::Arm1.h(), 1), (Spatial::A1.h(), 1)]);
        let sv = SV::superpose(4, &[(fs.clone(), c(1.0, 0.0))]).unwrap();
        let out = ppbs1(&sv, Spatial::Arm1, Spatial::A1, r).unwrap();
        let both = out.amplitude(&fs);
        assert!((both.re - (1.0 - 2.0 * r * r)).abs() < 1e-13, "{}", both.re);
        let s = (1.0 - r * r).sqrt();
        let two_sig = out.amplitude(&FockState::from_pairs(&[(Spatial::Arm1.h(), 2)]));
        let two_det = out.amplitude(&FockState::from_pairs(&[(Spatial::A1.h(), 2)]));
        let rt2 = std::f64::consts::SQRT_2;
        assert!((two_sig.re - rt2 * r * s).abs() < 1e-13);
        assert!((two_det.re + rt2 * r * s).abs() < 1e-13);
        assert!((out.norm() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn ppbs2_is_ppbs1_with_polarizations_swapped() {
        let r = 0.43;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let sv = SV::superpose(
            4,
            &[
                (
                    FockState::from_pairs(&[(Spatial::Arm1.h(), 1), (Spatial::A1.v(), 1)]),
                    c(s, 0.0),
                ),
                (
                    FockState::from_pairs(&[(Spatial::Arm1.v(), 1), (Spatial::A1.h(), 1)]),
                    c(0.0, s),
                ),
            ],
        )
        .unwrap();
        let out1 = ppbs1(&sv, Spatial::Arm1, Spatial::A1, r).unwrap();

        let swap_pol = |state: &SV| -> SV {
            let terms: Vec<_> = state
                .terms()
                .map(|(fs, amp)| {
                    let occ: Vec<_> = fs
                        .modes()
                        .map(|(m, n)| {
                            let pol = match m.pol {
                                Polarization::H => Polarization::V,
                                Polarization::V => Polarization::H,
                            };
                            (m.spatial.mode(pol), n)
                        })
                        .collect();
                    (FockState::from_pairs(&occ), *amp)
                })
                .collect();
            SV::superpose(state.n_max(), &terms).unwrap()
        };

        let out2 = swap_pol(&ppbs2(&swap_pol(&sv), Spatial::Arm1, Spatial::A1, r).unwrap());
        for (fs, amp) in out1.terms() {
            assert!((out2.amplitude(fs) - amp).norm() < 1e-13);
        }
        assert_eq!(out1.term_count(), out2.term_count());
    }

    #[test]
    fn loss_channel_t1_is_identity() {
        let dm = single_h(Spatial::In).to_density_matrix();
        let out = loss_channel(&dm, Spatial::In, 1.0).unwrap();
        let one = FockState::single(Spatial::In.h());
        assert!((out.entry(&one, &one).re - 1.0).abs() < 1e-14);
        assert!((out.trace() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn loss_channel_single_photon_mixture() {
        let dm = single_h(Spatial::In).to_density_matrix();
        let out = loss_channel(&dm, Spatial::In, 0.25).unwrap();
        let vac = FockState::vacuum();
        let one = FockState::single(Spatial::In.h());
        assert!((out.entry(&vac, &vac).re - 0.75).abs() < 1e-14);
        assert!((out.entry(&one, &one).re - 0.25).abs() < 1e-14);
    }

    #[test]
    fn loss_channels_compose_multiplicatively() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let sv = SV::superpose(
            4,
            &[
                (FockState::single(Spatial::In.h()), c(s, 0.0)),
                (FockState::single(Spatial::In.v()), c(0.0, s)),
            ],
        )
        .unwrap();
        let dm = sv.to_density_matrix();
        let (t1, t2) = (0.7, 0.45);
        let seq = loss_channel(
            &loss_channel(&dm, Spatial::In, t1).unwrap(),
            Spatial::In,
            t2,
        )
        .unwrap();
        let joint = loss_channel(&dm, Spatial::In, t1 * t2).unwrap();
        for fi in joint.basis() {
            for fj in joint.basis() {
                assert!((seq.entry(fi, fj) - joint.entry(fi, fj)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn loss_channel_is_completely_positive_on_two_photon_space() {
        // Choi state: maximally entangled pairing of the In register with a
        // reference register over all occupations with ≤ 2 photons.
        let mut terms = Vec::new();
        for nh in 0..=2u32 {
            for nv in 0..=(2 - nh) {
                let fs = FockState::from_pairs(&[
                    (Spatial::In.h(), nh),
                    (Spatial::In.v(), nv),
                    (Spatial::RefMode.h(), nh),
                    (Spatial::RefMode.v(), nv),
                ]);
                terms.push((fs, c(1.0 / 6.0f64.sqrt(), 0.0)));
            }
        }
        let omega = SV::superpose(4, &terms).unwrap();
        let choi = loss_channel(&omega.to_density_matrix(), Spatial::In, 0.35).unwrap();
        assert!((choi.trace() - 1.0).abs() < 1e-12);
        assert!(choi.min_eigenvalue().unwrap() > -1e-10);
    }

    #[test]
    fn attenuator_identity_at_nu_one() {
        let sv = single_h(Spatial::In);
        let (out, p) = coherent_attenuator(&sv, Spatial::In, 1.0).unwrap();
        assert!((p - 1.0).abs() < 1e-14);
        assert!((out.amplitude(&FockState::single(Spatial::In.h())).norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn attenuator_single_photon_success_nu() {
        let sv = single_h(Spatial::In);
        let (out, p) = coherent_attenuator(&sv, Spatial::In, 0.4).unwrap();
        assert!((p - 0.4).abs() < 1e-14);
        assert!((out.amplitude(&FockState::single(Spatial::In.h())).norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn attenuator_disbalances_dual_rail_state() {
        // (|ψ 0⟩ + |0 ψ⟩)/√2 with the In branch attenuated:
        // α' = ν/(ν+1) weight on the attenuated branch.
        let nu = 0.3;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let sv = SV::superpose(
            4,
            &[
                (FockState::single(Spatial::Alice.h()), c(s, 0.0)),
                (FockState::single(Spatial::In.h()), c(s, 0.0)),
            ],
        )
        .unwrap();
        let (out, p) = coherent_attenuator(&sv, Spatial::In, nu).unwrap();
        assert!((p - (1.0 + nu) / 2.0).abs() < 1e-14);
        let attenuated = out
            .amplitude(&FockState::single(Spatial::In.h()))
            .norm_sqr();
        assert!((attenuated - nu / (nu + 1.0)).abs() < 1e-14);
    }

    #[test]
    fn rotation_splits_h_into_d_and_a() {
        let sv = single_h(Spatial::D1);
        let out = rotate_to_da(&sv, Spatial::D1).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((out.amplitude(&FockState::single(Spatial::D1.h())) - c(s, 0.0)).norm() < 1e-14);
        assert!((out.amplitude(&FockState::single(Spatial::D1.v())) - c(s, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn rotation_twice_is_identity() {
        let sv = SV::superpose(
            4,
            &[
                (FockState::single(Spatial::D1.h()), c(0.6, 0.0)),
                (FockState::single(Spatial::D1.v()), c(0.0, 0.8)),
            ],
        )
        .unwrap();
        let twice = rotate_to_da(&rotate_to_da(&sv, Spatial::D1).unwrap(), Spatial::D1).unwrap();
        for (fs, amp) in sv.terms() {
            assert!((twice.amplitude(fs) - amp).norm() < 1e-12);
        }
    }

    #[test]
    fn detect_perfect_bucket_clicks_on_photon() {
        let dm = single_h(Spatial::D1).to_density_matrix();
        let outcomes = detect(&dm, Spatial::D1.h(), &DetectorModel::ideal_bucket()).unwrap();
        assert_eq!(outcomes.len(), 1);
        let (o, p, cond) = &outcomes[0];
        assert_eq!(*o, DetectOutcome::Click);
        assert!((p - 1.0).abs() < 1e-14);
        // detected mode traced out: conditional state is vacuum
        assert_eq!(cond.dim(), 1);
        assert_eq!(cond.basis()[0], FockState::vacuum());
    }

    #[test]
    fn detect_bucket_with_paper_efficiency() {
        let eta = 0.95 * 0.91;
        let model = DetectorModel::new(DetectorKind::Bucket, eta, 0.0).unwrap();
        let dm = single_h(Spatial::D1).to_density_matrix();
        let outcomes = detect(&dm, Spatial::D1.h(), &model).unwrap();
        let click: f64 = outcomes
            .iter()
            .find(|(o, _, _)| *o == DetectOutcome::Click)
            .map(|(_, p, _)| *p)
            .unwrap();
        assert!((click - 0.8645).abs() < 1e-12);
    }

    #[test]
    fn detect_dark_count_on_vacuum() {
        let model = DetectorModel::new(DetectorKind::Bucket, 1.0, 1e-8).unwrap();
        let dm = SV::vacuum().to_density_matrix();
        let outcomes = detect(&dm, Spatial::D1.h(), &model).unwrap();
        let click: f64 = outcomes
            .iter()
            .find(|(o, _, _)| *o == DetectOutcome::Click)
            .map(|(_, p, _)| *p)
            .unwrap();
        assert!((click - 1e-8).abs() < 1e-20);
    }

    #[test]
    fn detect_outcome_probabilities_sum_to_one() {
        let s = 1.0 / 3.0f64.sqrt();
        let sv = SV::superpose(
            4,
            &[
                (FockState::vacuum(), c(s, 0.0)),
                (FockState::single(Spatial::D1.h()), c(0.0, s)),
                (FockState::from_pairs(&[(Spatial::D1.h(), 2)]), c(-s, 0.0)),
            ],
        )
        .unwrap();
        let dm = sv.to_density_matrix();
        for model in [
            DetectorModel::new(DetectorKind::Bucket, 0.7, 0.01).unwrap(),
            DetectorModel::new(DetectorKind::PhotonNumberResolving, 0.8645, 0.0).unwrap(),
            DetectorModel::new(DetectorKind::PhotonNumberResolving, 0.5, 0.02).unwrap(),
        ] {
            let outcomes = detect(&dm, Spatial::D1.h(), &model).unwrap();
            let total: f64 = outcomes.iter().map(|(_, p, _)| *p).sum();
            assert!((total - 1.0).abs() < 1e-12, "total {total}");
            for (_, _, cond) in &outcomes {
                assert!((cond.trace() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn detect_pnr_resolves_photon_number() {
        let model = DetectorModel::new(DetectorKind::PhotonNumberResolving, 0.5, 0.0).unwrap();
        let sv = SV::superpose(
            4,
            &[(FockState::from_pairs(&[(Spatial::D1.h(), 2)]), c(1.0, 0.0))],
        )
        .unwrap();
        let outcomes = detect(&sv.to_density_matrix(), Spatial::D1.h(), &model).unwrap();
        let probs: BTreeMap<u32, f64> = outcomes
            .iter()
            .filter_map(|(o, p, _)| match o {
                DetectOutcome::Count(k) => Some((*k, *p)),
                _ => None,
            })
            .collect();
        // binomial(2, 0.5)
        assert!((probs[&0] - 0.25).abs() < 1e-14);
        assert!((probs[&1] - 0.5).abs() < 1e-14);
        assert!((probs[&2] - 0.25).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(DetectorModel::<f64>::new(DetectorKind::Bucket, 1.2, 0.0).is_err());
        assert!(DetectorModel::<f64>::new(DetectorKind::Bucket, 0.9, 1.0).is_err());
        assert!(ChannelSpec::<f64>::new(0.0).is_err());
        assert!(ChannelSpec::<f64>::new(1.1).is_err());
        let sv = single_h(Spatial::In);
        assert!(ppbs1(&sv, Spatial::In, Spatial::A1, 1.5).is_err());
        assert!(coherent_attenuator(&sv, Spatial::In, 0.0).is_err());
    }
}
