//! Device-independent QKD key-rate simulation.
//!
//! A down-conversion pair source sits near Alice; one photon is measured by
//! her directly, the other travels through a lossy channel to Bob, who runs
//! it through a heralded amplifier before his Bell measurement. The key rate
//! per laser pulse is R = μ_cc[1 − h(Q) − I_E(S, μ)].
//!
//! The μ-dependent eavesdropper bound I_E is a pluggable strategy
//! ([`EveBound`]): the default couples the standard collective-attack CHSH
//! bound with a linear penalty in the inconclusive-to-conclusive ratio μ, so
//! heralds that pass vacuum to the Bell stage (large amplifier reflectivity,
//! dark counts) are charged to the eavesdropper. Absolute rates therefore
//! depend on this documented choice and are locked by regression tests, not
//! by external anchors.

use std::collections::BTreeMap;

use crate::amplifier::{propagate, rotate_detectors};
use crate::elements::{lossy_coupling, ChannelSpec, DetectorModel};
use crate::error::{Error, Result};
use crate::fock::{DensityMatrix, FockState, ModeLabel, Spatial, StateVector};
use crate::optimize::logspace;
use crate::scalar::{Scalar, C};
use num_complex::Complex;

/// Down-conversion source: per-pulse pair probability and the number of
/// simultaneously emitted pairs kept in the truncated state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceModel<T> {
    pub pair_prob: T,
    pub truncation: u32,
}

impl<T: Scalar> SourceModel<T> {
    pub fn new(pair_prob: T, truncation: u32) -> Result<Self> {
        if pair_prob <= T::zero() || pair_prob >= T::one() {
            return Err(Error::Param(format!(
                "pair probability {pair_prob} not in (0,1)"
            )));
        }
        if truncation < 2 {
            return Err(Error::Param("source truncation must be at least 2".into()));
        }
        Ok(Self {
            pair_prob,
            truncation,
        })
    }
}

/// Polarization-analyzer angles (radians) for the CHSH estimate and the key
/// basis. The defaults are the standard settings for a Φ⁺-correlated pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementSettings<T> {
    pub alice: [T; 2],
    pub bob: [T; 2],
    pub key: (T, T),
}

impl<T: Scalar> MeasurementSettings<T> {
    pub fn standard() -> Self {
        Self {
            alice: [T::zero(), T::FRAC_PI_4()],
            bob: [
                T::of(std::f64::consts::FRAC_PI_8),
                T::of(-std::f64::consts::FRAC_PI_8),
            ],
            key: (T::zero(), T::zero()),
        }
    }
}

/// Full protocol configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolParams<T> {
    pub source: SourceModel<T>,
    pub channel_loss_db: T,
    pub herald_detectors: DetectorModel<T>,
    pub bell_detectors: DetectorModel<T>,
    pub amplifier_r: T,
    pub settings: MeasurementSettings<T>,
}

/// One evaluated protocol point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePoint<T> {
    /// Probability per pulse of a conclusive event on both sides.
    pub mu_cc: T,
    /// Quantum bit error rate in the key basis.
    pub qber: T,
    /// CHSH value estimated from conclusive events.
    pub chsh: T,
    /// Inconclusive-to-conclusive ratio after heralding.
    pub mu: T,
    /// Secure key rate per laser pulse, clamped at zero.
    pub rate: T,
}

impl<T: Scalar> RatePoint<T> {
    pub fn zero() -> Self {
        Self {
            mu_cc: T::zero(),
            qber: T::zero(),
            chsh: T::zero(),
            mu: T::zero(),
            rate: T::zero(),
        }
    }
}

/// Entangled two-mode-squeezed-type source state on (`Alice`, `In`),
/// truncated at `truncation` pairs and normalized. The single-pair
/// probability equals `pair_prob`.
pub fn spdc_state<T: Scalar>(source: &SourceModel<T>) -> Result<StateVector<T>> {
    let lambda = (source.pair_prob / T::of(2.0)).sqrt();
    let n_max = 2 * source.truncation + 2;
    let mut terms = Vec::new();
    for n in 0..=source.truncation {
        let amp = lambda.powi(n as i32);
        for k in 0..=n {
            let fs = FockState::from_pairs(&[
                (Spatial::Alice.h(), k),
                (Spatial::In.h(), k),
                (Spatial::Alice.v(), n - k),
                (Spatial::In.v(), n - k),
            ]);
            terms.push((fs, Complex::new(amp, T::zero())));
        }
    }
    StateVector::superpose(n_max, &terms)?.normalized()
}

/// A heralded amplifier usable in the Bob arm of the protocol: consumes the
/// joint pure state (Bob's mode on the `In` register), returns the heralded
/// joint conditional state with Bob's output on `Out`, plus the herald
/// probability. Implementations other than the entangled-ancilla device can
/// be plugged in through this interface.
pub trait HeraldedAmplifier<T: Scalar> {
    fn herald(
        &self,
        joint: &StateVector<T>,
        detectors: &DetectorModel<T>,
    ) -> Result<(DensityMatrix<T>, T)>;
}

/// The entanglement-based amplifier with DD/AA heralding on two
/// polarization-analysis detector blocks.
#[derive(Debug, Clone, Copy)]
pub struct EntangledAncillaAmplifier<T> {
    pub r: T,
}

impl<T: Scalar> HeraldedAmplifier<T> for EntangledAncillaAmplifier<T> {
    fn herald(
        &self,
        joint: &StateVector<T>,
        detectors: &DetectorModel<T>,
    ) -> Result<(DensityMatrix<T>, T)> {
        let st = rotate_detectors(&propagate(joint, self.r)?)?;

        // Group terms by the occupations of everything outside (Alice, Out);
        // distinct groups stay orthogonal through the detector POVM and the
        // trace over environments, so the conditional state is a weighted
        // mixture of the per-group kets.
        let keep = |m: ModeLabel| m.spatial == Spatial::Alice || m.spatial == Spatial::Out;
        let mut groups: BTreeMap<FockState, Vec<(FockState, C<T>)>> = BTreeMap::new();
        for (fs, amp) in st.terms() {
            let (kept, other) = fs.split_by(keep);
            groups.entry(other).or_default().push((kept, *amp));
        }

        // DD or AA coincidence: after the D/A rotation the H slot carries
        // the diagonal amplitude, so DD means clicks on both H detectors
        // with both V detectors silent.
        let weight_of = |other: &FockState| -> T {
            let n1h = other.occupation(Spatial::D1.h());
            let n1v = other.occupation(Spatial::D1.v());
            let n2h = other.occupation(Spatial::D2.h());
            let n2v = other.occupation(Spatial::D2.v());
            let dd = detectors.click_prob(n1h)
                * detectors.no_click_prob(n1v)
                * detectors.click_prob(n2h)
                * detectors.no_click_prob(n2v);
            let aa = detectors.no_click_prob(n1h)
                * detectors.click_prob(n1v)
                * detectors.no_click_prob(n2h)
                * detectors.click_prob(n2v);
            dd + aa
        };

        let n_max = st.n_max();
        let mut parts: Vec<(T, StateVector<T>)> = Vec::new();
        let mut herald_prob = T::zero();
        for (other, kets) in &groups {
            let w = weight_of(other);
            if w <= T::of(1e-300) {
                continue;
            }
            let sv = StateVector::superpose(n_max, kets)?;
            herald_prob = herald_prob + w * sv.norm_sqr();
            parts.push((w, sv));
        }
        if herald_prob < T::of(1e-30) {
            return Err(Error::ZeroSuccess);
        }
        let dm = DensityMatrix::from_weighted_pure(&parts).normalized()?;
        Ok((dm, herald_prob))
    }
}

/// Propagates the source through Bob's lossy channel and the heralded
/// amplifier. Returns the Alice–Bob joint conditional state and the herald
/// probability per pulse.
pub fn herald<T: Scalar>(params: &ProtocolParams<T>) -> Result<(DensityMatrix<T>, T)> {
    let mut st = spdc_state(&params.source)?;
    let chan = ChannelSpec::from_loss_db(params.channel_loss_db)?;
    if chan.transmissivity < T::one() {
        st = lossy_coupling(
            &st,
            Spatial::In.h(),
            Spatial::Env(0).h(),
            chan.transmissivity,
        )?;
        st = lossy_coupling(
            &st,
            Spatial::In.v(),
            Spatial::Env(0).v(),
            chan.transmissivity,
        )?;
    }
    let amp = EntangledAncillaAmplifier {
        r: params.amplifier_r,
    };
    amp.herald(&st, &params.herald_detectors)
}

/// Per-side outcome probabilities of a polarization analysis with
/// photon-number-resolving detectors: conclusive +1 (one photon, first
/// port), conclusive −1 (one photon, second port), or inconclusive.
fn side_outcome_dist<T: Scalar>(nh: u32, nv: u32, model: &DetectorModel<T>) -> [T; 3] {
    let count_dist = |n: u32| -> Vec<T> {
        let eta = model.efficiency;
        let d = model.dark_count_prob;
        let n = n as usize;
        let mut binomial = vec![T::zero(); n + 1];
        for (k, b) in binomial.iter_mut().enumerate() {
            let mut comb = T::one();
            for i in 0..k {
                comb = comb * T::of((n - i) as f64) / T::of((i + 1) as f64);
            }
            *b = comb * eta.powi(k as i32) * (T::one() - eta).powi((n - k) as i32);
        }
        let mut with_dark = vec![T::zero(); n + 2];
        for (k, &b) in binomial.iter().enumerate() {
            with_dark[k] = with_dark[k] + (T::one() - d) * b;
            with_dark[k + 1] = with_dark[k + 1] + d * b;
        }
        with_dark
    };
    let dh = count_dist(nh);
    let dv = count_dist(nv);
    let get = |dist: &[T], k: usize| dist.get(k).copied().unwrap_or_else(T::zero);
    let plus = get(&dh, 1) * get(&dv, 0);
    let minus = get(&dh, 0) * get(&dv, 1);
    let inconclusive = T::one() - plus - minus;
    [plus, minus, inconclusive]
}

struct SettingStats<T> {
    correlator: T,
    conclusive_prob: T,
    disagree_prob: T,
}

fn setting_statistics<T: Scalar>(
    dm: &DensityMatrix<T>,
    theta_a: T,
    theta_b: T,
    model: &DetectorModel<T>,
) -> Result<SettingStats<T>> {
    let rot = |theta: T| -> [[C<T>; 2]; 2] {
        let (s, c) = theta.sin_cos();
        let z = T::zero();
        [
            [Complex::new(c, z), Complex::new(s, z)],
            [Complex::new(-s, z), Complex::new(c, z)],
        ]
    };
    let rotated = dm
        .apply_two_mode_unitary(Spatial::Alice.h(), Spatial::Alice.v(), &rot(theta_a))?
        .apply_two_mode_unitary(Spatial::Out.h(), Spatial::Out.v(), &rot(theta_b))?;

    let mut joint = [[T::zero(); 3]; 3];
    for (i, fs) in rotated.basis().iter().enumerate() {
        let w = rotated.matrix()[(i, i)].re;
        if w <= T::of(1e-300) {
            continue;
        }
        let a = side_outcome_dist(
            fs.occupation(Spatial::Alice.h()),
            fs.occupation(Spatial::Alice.v()),
            model,
        );
        let b = side_outcome_dist(
            fs.occupation(Spatial::Out.h()),
            fs.occupation(Spatial::Out.v()),
            model,
        );
        for (ia, &pa) in a.iter().enumerate() {
            for (ib, &pb) in b.iter().enumerate() {
                joint[ia][ib] = joint[ia][ib] + w * pa * pb;
            }
        }
    }
    let cc = joint[0][0] + joint[0][1] + joint[1][0] + joint[1][1];
    if cc <= T::of(1e-300) {
        return Ok(SettingStats {
            correlator: T::zero(),
            conclusive_prob: T::zero(),
            disagree_prob: T::zero(),
        });
    }
    Ok(SettingStats {
        correlator: (joint[0][0] + joint[1][1] - joint[0][1] - joint[1][0]) / cc,
        conclusive_prob: cc,
        disagree_prob: (joint[0][1] + joint[1][0]) / cc,
    })
}

/// CHSH and key-basis statistics of a heralded joint state.
#[derive(Debug, Clone, Copy)]
pub struct ChshStats<T> {
    pub chsh: T,
    pub qber: T,
    pub mu: T,
    /// Conclusive-conclusive probability in the key setting, conditioned on
    /// the herald.
    pub conclusive_prob: T,
}

/// Applies the configured polarization analyzers with the Bell detectors and
/// estimates the CHSH value S from conclusive coincidences, the key-basis
/// error rate Q, and the inconclusive-to-conclusive ratio μ.
pub fn chsh_and_qber<T: Scalar>(
    joint: &DensityMatrix<T>,
    params: &ProtocolParams<T>,
) -> Result<ChshStats<T>> {
    let set = &params.settings;
    let model = &params.bell_detectors;
    let e00 = setting_statistics(joint, set.alice[0], set.bob[0], model)?;
    let e01 = setting_statistics(joint, set.alice[0], set.bob[1], model)?;
    let e10 = setting_statistics(joint, set.alice[1], set.bob[0], model)?;
    let e11 = setting_statistics(joint, set.alice[1], set.bob[1], model)?;
    let chsh = e00.correlator + e01.correlator + e10.correlator - e11.correlator;

    let key = setting_statistics(joint, set.key.0, set.key.1, model)?;
    let mu = if key.conclusive_prob > T::zero() {
        (T::one() - key.conclusive_prob) / key.conclusive_prob
    } else {
        T::infinity()
    };
    Ok(ChshStats {
        chsh,
        qber: key.disagree_prob,
        mu,
        conclusive_prob: key.conclusive_prob,
    })
}

/// Binary entropy in bits.
pub fn binary_entropy<T: Scalar>(q: T) -> T {
    let q = q.max(T::zero()).min(T::one());
    let ln2 = T::of(2.0).ln();
    let mut h = T::zero();
    if q > T::zero() {
        h = h - q * q.ln() / ln2;
    }
    if q < T::one() {
        h = h - (T::one() - q) * (T::one() - q).ln() / ln2;
    }
    h
}

/// Bound on the eavesdropper information entering the key-rate formula.
pub trait EveBound<T: Scalar> {
    fn information(&self, chsh: T, mu: T) -> T;
}

/// Collective-attack CHSH bound h((1+√((S/2)²−1))/2) plus a linear penalty
/// `mu_weight`·μ for inconclusive results, clamped to [0, 1]. At μ = 0 this
/// is the standard bound; the penalty makes heralds that admit vacuum
/// (large reflectivity, dark counts) pay for the re-opened post-selection.
#[derive(Debug, Clone, Copy)]
pub struct ChshCollectiveBound<T> {
    pub mu_weight: T,
}

impl<T: Scalar> Default for ChshCollectiveBound<T> {
    fn default() -> Self {
        Self {
            mu_weight: T::one(),
        }
    }
}

impl<T: Scalar> EveBound<T> for ChshCollectiveBound<T> {
    fn information(&self, chsh: T, mu: T) -> T {
        if chsh <= T::of(2.0) {
            return T::one();
        }
        let half = chsh / T::of(2.0);
        let x = (half * half - T::one()).max(T::zero()).sqrt().min(T::one());
        let base = binary_entropy((T::one() + x) / T::of(2.0));
        (base + self.mu_weight * mu).min(T::one()).max(T::zero())
    }
}

/// Secure key rate per pulse: R = μ_cc[1 − h(Q) − I_E(S, μ)], clamped at 0.
pub fn key_rate<T: Scalar>(
    mu_cc: T,
    qber: T,
    chsh: T,
    mu: T,
    bound: &impl EveBound<T>,
) -> RatePoint<T> {
    let ie = bound.information(chsh, mu);
    let rate = (mu_cc * (T::one() - binary_entropy(qber) - ie)).max(T::zero());
    RatePoint {
        mu_cc,
        qber,
        chsh,
        mu,
        rate,
    }
}

/// Runs the full pipeline at the configured reflectivity. A herald that can
/// never fire (zero probability) is reported as a zero rate point.
pub fn evaluate<T: Scalar>(
    params: &ProtocolParams<T>,
    bound: &impl EveBound<T>,
) -> Result<RatePoint<T>> {
    let (joint, herald_prob) = match herald(params) {
        Ok(v) => v,
        Err(Error::ZeroSuccess) => return Ok(RatePoint::zero()),
        Err(e) => return Err(e),
    };
    let stats = chsh_and_qber(&joint, params)?;
    let mu_cc = herald_prob * stats.conclusive_prob;
    Ok(key_rate(mu_cc, stats.qber, stats.chsh, stats.mu, bound))
}

/// Default reflectivity search grid: exactly zero plus 50 log-spaced points.
pub fn default_r_grid<T: Scalar>() -> Vec<T> {
    let mut grid = vec![T::zero()];
    grid.extend(logspace(T::of(1e-3), T::one(), 50));
    grid
}

/// Result of the reflectivity optimization.
#[derive(Debug, Clone, Copy)]
pub struct ReflectivityOptimum<T> {
    pub r_star: T,
    pub point: RatePoint<T>,
    /// True when every grid point produced a zero rate.
    pub all_zero: bool,
}

/// Maximizes the key rate over the reflectivity grid; ties break toward the
/// smaller reflectivity.
pub fn optimize_reflectivity<T: Scalar>(
    params: &ProtocolParams<T>,
    r_grid: &[T],
    bound: &impl EveBound<T>,
) -> Result<ReflectivityOptimum<T>> {
    if r_grid.is_empty() {
        return Err(Error::Param("empty reflectivity grid".into()));
    }
    let mut best: Option<(T, RatePoint<T>)> = None;
    for &r in r_grid {
        let mut p = *params;
        p.amplifier_r = r;
        let point = evaluate(&p, bound)?;
        let better = match &best {
            None => true,
            Some((_, b)) => point.rate > b.rate,
        };
        if better {
            best = Some((r, point));
        }
    }
    let (r_star, point) = best.expect("non-empty grid");
    let all_zero = point.rate <= T::zero();
    Ok(ReflectivityOptimum {
        r_star: if all_zero { T::zero() } else { r_star },
        point,
        all_zero,
    })
}

/// One row of the key-rate-versus-loss table.
#[derive(Debug, Clone, Copy)]
pub struct LossRatePoint<T> {
    pub loss_db: T,
    pub r_star: T,
    pub point: RatePoint<T>,
}

/// Optimizes the reflectivity at every channel loss in the grid.
pub fn keyrate_vs_loss<T: Scalar>(
    params: &ProtocolParams<T>,
    loss_grid_db: &[T],
    r_grid: &[T],
    bound: &impl EveBound<T>,
) -> Result<Vec<LossRatePoint<T>>> {
    loss_grid_db
        .iter()
        .map(|&loss| {
            let mut p = *params;
            p.channel_loss_db = loss;
            let opt = optimize_reflectivity(&p, r_grid, bound)?;
            Ok(LossRatePoint {
                loss_db: loss,
                r_star: opt.r_star,
                point: opt.point,
            })
        })
        .collect()
}

/// Reference configuration: pair probability 2×10⁻³ truncated at two pairs,
/// bucket heralding detectors and noiseless photon-number-resolving Bell
/// detectors, both at 0.95×0.91 efficiency, standard settings, zero loss.
pub fn reference_params<T: Scalar>(dark_count_prob: T, amplifier_r: T) -> Result<ProtocolParams<T>> {
    use crate::elements::DetectorKind;
    let eta = T::of(0.95 * 0.91);
    Ok(ProtocolParams {
        source: SourceModel::new(T::of(2e-3), 2)?,
        channel_loss_db: T::zero(),
        herald_detectors: DetectorModel::new(DetectorKind::Bucket, eta, dark_count_prob)?,
        bell_detectors: DetectorModel::new(DetectorKind::PhotonNumberResolving, eta, T::zero())?,
        amplifier_r,
        settings: MeasurementSettings::standard(),
    })
}
