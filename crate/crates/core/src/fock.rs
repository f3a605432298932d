//! Truncated multimode bosonic state engine.
//!
//! States live on labeled spatial×polarization modes. A [`FockState`] records
//! only nonzero occupations, so any mode label is always valid and reads as
//! vacuum when absent. [`StateVector`] is a sparse complex superposition of
//! Fock states with a register-level total-photon truncation;
//! [`DensityMatrix`] is a dense Hermitian matrix over an explicit, ordered
//! Fock basis. All values are immutable; operations return new values.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::{c_zero, Scalar, C};

/// Default register truncation: total photon number across all modes.
/// The amplifier itself needs at most 3; multi-pair sources need more and
/// configure their registers explicitly.
pub const DEFAULT_N_MAX: u32 = 4;

/// Amplitudes below this magnitude are dropped after each operation.
pub const PRUNE_THRESHOLD: f64 = 1e-15;

/// Polarization of an optical mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarization {
    H,
    V,
}

impl Polarization {
    pub const BOTH: [Polarization; 2] = [Polarization::H, Polarization::V];
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Polarization::H => write!(f, "H"),
            Polarization::V => write!(f, "V"),
        }
    }
}

/// Spatial register labels, following the amplifier circuit layout: signal
/// enters at `In`, ancillae at `A1`/`A2`, heralding detectors sit on
/// `D1`/`D2`, the interferometer arms are `Arm1`/`Arm2` and the signal leaves
/// at `Out`. `Alice`/`RefMode` are spectator registers for joint states,
/// `Env`/`Anc` carry loss and attenuator environments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Spatial {
    In,
    Out,
    A1,
    A2,
    D1,
    D2,
    Arm1,
    Arm2,
    AuxOut,
    Alice,
    RefMode,
    Env(u16),
    Anc(u16),
}

impl Spatial {
    /// Horizontal polarization mode of this register.
    pub const fn h(self) -> ModeLabel {
        ModeLabel {
            spatial: self,
            pol: Polarization::H,
        }
    }

    /// Vertical polarization mode of this register.
    pub const fn v(self) -> ModeLabel {
        ModeLabel {
            spatial: self,
            pol: Polarization::V,
        }
    }

    pub const fn mode(self, pol: Polarization) -> ModeLabel {
        ModeLabel { spatial: self, pol }
    }
}

impl fmt::Display for Spatial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Spatial::In => write!(f, "in"),
            Spatial::Out => write!(f, "out"),
            Spatial::A1 => write!(f, "a1"),
            Spatial::A2 => write!(f, "a2"),
            Spatial::D1 => write!(f, "d1"),
            Spatial::D2 => write!(f, "d2"),
            Spatial::Arm1 => write!(f, "arm1"),
            Spatial::Arm2 => write!(f, "arm2"),
            Spatial::AuxOut => write!(f, "aux_out"),
            Spatial::Alice => write!(f, "alice"),
            Spatial::RefMode => write!(f, "ref"),
            Spatial::Env(k) => write!(f, "env{k}"),
            Spatial::Anc(k) => write!(f, "anc{k}"),
        }
    }
}

/// A single optical mode: spatial register plus polarization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeLabel {
    pub spatial: Spatial,
    pub pol: Polarization,
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.spatial, self.pol)
    }
}

/// Occupation-number basis state. Only nonzero occupations are stored and
/// the entries are kept sorted by mode label, which makes the derived
/// ordering lexicographic on (mode, occupation) and fully deterministic.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FockState {
    occ: Vec<(ModeLabel, u32)>,
}

impl FockState {
    /// The vacuum over every mode.
    pub fn vacuum() -> Self {
        Self::default()
    }

    /// Single photon in `mode`.
    pub fn single(mode: ModeLabel) -> Self {
        Self {
            occ: vec![(mode, 1)],
        }
    }

    /// Builds a state from (mode, occupation) pairs; zero occupations are
    /// dropped, duplicate modes are rejected by debug assertion.
    pub fn from_pairs(pairs: &[(ModeLabel, u32)]) -> Self {
        let mut occ: Vec<(ModeLabel, u32)> =
            pairs.iter().copied().filter(|&(_, n)| n > 0).collect();
        occ.sort_by_key(|&(m, _)| m);
        debug_assert!(
            occ.windows(2).all(|w| w[0].0 != w[1].0),
            "duplicate mode in FockState"
        );
        Self { occ }
    }

    /// Occupation of `mode`; absent modes read as vacuum.
    pub fn occupation(&self, mode: ModeLabel) -> u32 {
        match self.occ.binary_search_by_key(&mode, |&(m, _)| m) {
            Ok(i) => self.occ[i].1,
            Err(_) => 0,
        }
    }

    /// Returns a copy with `mode` set to occupation `n` (0 removes it).
    pub fn with_occupation(&self, mode: ModeLabel, n: u32) -> Self {
        let mut occ = self.occ.clone();
        match occ.binary_search_by_key(&mode, |&(m, _)| m) {
            Ok(i) => {
                if n == 0 {
                    occ.remove(i);
                } else {
                    occ[i].1 = n;
                }
            }
            Err(i) => {
                if n > 0 {
                    occ.insert(i, (mode, n));
                }
            }
        }
        Self { occ }
    }

    /// Total photon number.
    pub fn total_photons(&self) -> u32 {
        self.occ.iter().map(|&(_, n)| n).sum()
    }

    /// Iterates over occupied modes.
    pub fn modes(&self) -> impl Iterator<Item = (ModeLabel, u32)> + '_ {
        self.occ.iter().copied()
    }

    /// Splits into the part on modes selected by `keep` and the rest.
    pub fn split_by(&self, keep: impl Fn(ModeLabel) -> bool) -> (FockState, FockState) {
        let (a, b): (Vec<_>, Vec<_>) = self.occ.iter().partition(|&&(m, _)| keep(m));
        (FockState { occ: a }, FockState { occ: b })
    }

    /// Photons in any polarization of spatial register `s`.
    pub fn photons_in(&self, s: Spatial) -> u32 {
        self.occ
            .iter()
            .filter(|&&(m, _)| m.spatial == s)
            .map(|&(_, n)| n)
            .sum()
    }
}

impl fmt::Display for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.occ.is_empty() {
            return write!(f, "|vac⟩");
        }
        write!(f, "|")?;
        for (i, (m, n)) in self.occ.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            if *n == 1 {
                write!(f, "{m}")?;
            } else {
                write!(f, "{n}{m}")?;
            }
        }
        write!(f, "⟩")
    }
}

fn binom(n: u32, k: u32) -> f64 {
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Sparse superposition of Fock states under a total-photon truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T> {
    n_max: u32,
    terms: BTreeMap<FockState, C<T>>,
}

impl<T: Scalar> StateVector<T> {
    /// The vacuum state with the default truncation.
    pub fn vacuum() -> Self {
        Self::vacuum_with(DEFAULT_N_MAX)
    }

    pub fn vacuum_with(n_max: u32) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(FockState::vacuum(), Complex::new(T::one(), T::zero()));
        Self { n_max, terms }
    }

    /// Empty (zero) state vector.
    pub fn zero(n_max: u32) -> Self {
        Self {
            n_max,
            terms: BTreeMap::new(),
        }
    }

    /// Builds an unnormalized superposition; duplicate basis states merge by
    /// amplitude addition, amplitudes below the prune threshold are dropped.
    pub fn superpose(n_max: u32, terms: &[(FockState, C<T>)]) -> Result<Self> {
        let mut sv = Self::zero(n_max);
        for (fs, amp) in terms {
            let photons = fs.total_photons();
            if photons > n_max {
                return Err(Error::Truncation { photons, n_max });
            }
            sv.add_term(fs.clone(), *amp);
        }
        sv.prune();
        Ok(sv)
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    /// Returns a copy with a raised truncation (lowering is rejected if an
    /// existing term would violate it).
    pub fn with_n_max(&self, n_max: u32) -> Result<Self> {
        for fs in self.terms.keys() {
            let photons = fs.total_photons();
            if photons > n_max {
                return Err(Error::Truncation { photons, n_max });
            }
        }
        Ok(Self {
            n_max,
            terms: self.terms.clone(),
        })
    }

    fn add_term(&mut self, fs: FockState, amp: C<T>) {
        let entry = self.terms.entry(fs).or_insert_with(c_zero);
        *entry = *entry + amp;
    }

    fn prune(&mut self) {
        let thr = T::of(PRUNE_THRESHOLD);
        self.terms.retain(|_, amp| amp.norm() >= thr);
    }

    pub fn amplitude(&self, fs: &FockState) -> C<T> {
        self.terms.get(fs).copied().unwrap_or_else(c_zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FockState, &C<T>)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn norm_sqr(&self) -> T {
        self.terms.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    /// Inner product ⟨self|other⟩.
    pub fn dot(&self, other: &Self) -> C<T> {
        let mut acc = c_zero();
        for (fs, a) in &self.terms {
            if let Some(b) = other.terms.get(fs) {
                acc = acc + a.conj() * b;
            }
        }
        acc
    }

    /// Returns the unit-norm version of this state.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n <= T::of(1e-150) {
            return Err(Error::Numeric("cannot normalize a zero state".into()));
        }
        let inv = T::one() / n;
        let terms = self
            .terms
            .iter()
            .map(|(fs, a)| (fs.clone(), a.scale(inv)))
            .collect();
        Ok(Self {
            n_max: self.n_max,
            terms,
        })
    }

    pub fn scaled(&self, s: C<T>) -> Self {
        Self {
            n_max: self.n_max,
            terms: self.terms.iter().map(|(f, a)| (f.clone(), a * s)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.n_max = self.n_max.max(other.n_max);
        for (fs, amp) in &other.terms {
            out.add_term(fs.clone(), *amp);
        }
        out.prune();
        out
    }

    /// Tensor product with a state on disjoint modes.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let n_max = self.n_max.max(other.n_max);
        let mut out = Self::zero(n_max);
        for (fa, aa) in &self.terms {
            for (fb, ab) in &other.terms {
                let mut occ = fa.occ.clone();
                for &(m, n) in &fb.occ {
                    match occ.binary_search_by_key(&m, |&(mm, _)| mm) {
                        Ok(_) => {
                            return Err(Error::Param(format!(
                                "tensor: mode {m} occupied on both factors"
                            )))
                        }
                        Err(i) => occ.insert(i, (m, n)),
                    }
                }
                let fs = FockState { occ };
                let photons = fs.total_photons();
                if photons > n_max {
                    return Err(Error::Truncation { photons, n_max });
                }
                out.add_term(fs, aa * ab);
            }
        }
        out.prune();
        Ok(out)
    }

    /// Rewrites the creation operators of modes `m1`, `m2` by the 2×2 unitary
    /// `u`: a†(m1) → u00·a†(m1) + u01·a†(m2) and a†(m2) → u10·a†(m1) +
    /// u11·a†(m2), carrying the multinomial bosonic factors.
    pub fn apply_two_mode_unitary(
        &self,
        m1: ModeLabel,
        m2: ModeLabel,
        u: &[[C<T>; 2]; 2],
    ) -> Result<Self> {
        if m1 == m2 {
            return Err(Error::Param("two-mode unitary needs distinct modes".into()));
        }
        let dev = unitarity_deviation(u);
        if dev > T::of(1e-12).max(T::epsilon() * T::of(256.0)) {
            return Err(Error::NonUnitary {
                deviation: dev.to_f64().unwrap_or(f64::NAN),
            });
        }

        let mut out = Self::zero(self.n_max);
        for (fs, amp) in &self.terms {
            let n1 = fs.occupation(m1);
            let n2 = fs.occupation(m2);
            if n1 + n2 == 0 {
                out.add_term(fs.clone(), *amp);
                continue;
            }
            let base = fs.with_occupation(m1, 0).with_occupation(m2, 0);
            let norm_in = (factorial(n1) * factorial(n2)).sqrt();
            for j in 0..=n1 {
                for k in 0..=n2 {
                    let p = j + k;
                    let q = n1 + n2 - p;
                    let comb = binom(n1, j) * binom(n2, k);
                    let weight = T::of(comb * (factorial(p) * factorial(q)).sqrt() / norm_in);
                    let coeff = pow_c(u[0][0], j)
                        * pow_c(u[0][1], n1 - j)
                        * pow_c(u[1][0], k)
                        * pow_c(u[1][1], n2 - k);
                    let photons = base.total_photons() + p + q;
                    if photons > self.n_max {
                        return Err(Error::Truncation {
                            photons,
                            n_max: self.n_max,
                        });
                    }
                    let fs_new = base.with_occupation(m1, p).with_occupation(m2, q);
                    out.add_term(fs_new, *amp * coeff.scale(weight));
                }
            }
        }
        out.prune();
        Ok(out)
    }

    /// Projects onto an exact occupation pattern of the given modes and
    /// strips those modes from the surviving terms. Returns the unnormalized
    /// remainder together with the projection probability (valid when the
    /// input state is normalized). An empty match yields probability 0 and
    /// an empty remainder.
    pub fn project(&self, pattern: &BTreeMap<ModeLabel, u32>) -> (Self, T) {
        let mut out = Self::zero(self.n_max);
        let mut prob = T::zero();
        for (fs, amp) in &self.terms {
            if pattern.iter().all(|(&m, &n)| fs.occupation(m) == n) {
                let mut kept = fs.clone();
                for &m in pattern.keys() {
                    kept = kept.with_occupation(m, 0);
                }
                prob = prob + amp.norm_sqr();
                out.add_term(kept, *amp);
            }
        }
        out.prune();
        (out, prob)
    }

    /// Renames a spatial register; fails if the target register is occupied.
    pub fn rename_spatial(&self, from: Spatial, to: Spatial) -> Result<Self> {
        if from == to {
            return Ok(self.clone());
        }
        let mut out = Self::zero(self.n_max);
        for (fs, amp) in &self.terms {
            if fs.photons_in(to) > 0 {
                return Err(Error::Param(format!(
                    "rename: target register {to} already occupied"
                )));
            }
            let occ = fs
                .occ
                .iter()
                .map(|&(m, n)| {
                    if m.spatial == from {
                        (to.mode(m.pol), n)
                    } else {
                        (m, n)
                    }
                })
                .collect::<Vec<_>>();
            out.add_term(FockState::from_pairs(&occ), *amp);
        }
        Ok(out)
    }

    /// Spatial registers occupied anywhere in this state.
    pub fn occupied_registers(&self) -> BTreeSet<Spatial> {
        self.terms
            .keys()
            .flat_map(|fs| fs.occ.iter().map(|&(m, _)| m.spatial))
            .collect()
    }

    /// Density matrix of this (pure) state.
    pub fn to_density_matrix(&self) -> DensityMatrix<T> {
        DensityMatrix::from_pure(self)
    }
}

fn pow_c<T: Scalar>(z: C<T>, n: u32) -> C<T> {
    let mut acc = Complex::new(T::one(), T::zero());
    for _ in 0..n {
        acc = acc * z;
    }
    acc
}

fn unitarity_deviation<T: Scalar>(u: &[[C<T>; 2]; 2]) -> T {
    // max entry of |U†U − I|
    let mut dev = T::zero();
    for i in 0..2 {
        for j in 0..2 {
            let mut s = c_zero();
            for row in u {
                s = s + row[i].conj() * row[j];
            }
            if i == j {
                s = s - Complex::new(T::one(), T::zero());
            }
            if s.norm() > dev {
                dev = s.norm();
            }
        }
    }
    dev
}

/// Mixed state over an explicit, ordered Fock basis.
#[derive(Debug, Clone)]
pub struct DensityMatrix<T> {
    basis: Vec<FockState>,
    mat: CMatrix<T>,
}

impl<T: Scalar> DensityMatrix<T> {
    /// Rank-1 projector |ψ⟩⟨ψ| of a pure state.
    pub fn from_pure(state: &StateVector<T>) -> Self {
        Self::from_weighted_pure(&[(T::one(), state.clone())])
    }

    /// Unnormalized mixture Σ wᵢ |ψᵢ⟩⟨ψᵢ| over possibly unnormalized kets.
    pub fn from_weighted_pure(parts: &[(T, StateVector<T>)]) -> Self {
        let mut basis_set: BTreeSet<FockState> = BTreeSet::new();
        for (_, sv) in parts {
            for fs in sv.terms.keys() {
                basis_set.insert(fs.clone());
            }
        }
        let basis: Vec<FockState> = basis_set.into_iter().collect();
        let index: BTreeMap<&FockState, usize> =
            basis.iter().enumerate().map(|(i, f)| (f, i)).collect();
        let mut mat = CMatrix::zeros(basis.len(), basis.len());
        for (w, sv) in parts {
            let entries: Vec<(usize, C<T>)> =
                sv.terms.iter().map(|(fs, a)| (index[fs], *a)).collect();
            for &(i, ai) in &entries {
                for &(j, aj) in &entries {
                    mat[(i, j)] = mat[(i, j)] + (ai * aj.conj()).scale(*w);
                }
            }
        }
        Self { basis, mat }
    }

    /// Builds a density matrix from an explicit basis and matrix.
    pub fn from_parts(basis: Vec<FockState>, mat: CMatrix<T>) -> Result<Self> {
        if mat.rows() != basis.len() || mat.cols() != basis.len() {
            return Err(Error::Param("density matrix dimension mismatch".into()));
        }
        Ok(Self { basis, mat })
    }

    pub fn basis(&self) -> &[FockState] {
        &self.basis
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn trace(&self) -> T {
        self.mat.trace().re
    }

    /// Matrix element ⟨row|ρ|col⟩; absent basis states read as 0.
    pub fn entry(&self, row: &FockState, col: &FockState) -> C<T> {
        let i = self.basis.binary_search(row);
        let j = self.basis.binary_search(col);
        match (i, j) {
            (Ok(i), Ok(j)) => self.mat[(i, j)],
            _ => c_zero(),
        }
    }

    /// Trace-normalized copy.
    pub fn normalized(&self) -> Result<Self> {
        let tr = self.trace();
        if tr <= T::of(1e-300) {
            return Err(Error::Numeric("cannot normalize zero-trace matrix".into()));
        }
        Ok(Self {
            basis: self.basis.clone(),
            mat: self.mat.scale_re(T::one() / tr),
        })
    }

    /// Partial trace over the given modes; the traced modes disappear from
    /// the basis. Modes that never appear simply trace over vacuum.
    pub fn partial_trace(&self, modes: &BTreeSet<ModeLabel>) -> Self {
        let keep = |m: ModeLabel| !modes.contains(&m);
        let parts: Vec<(FockState, FockState)> =
            self.basis.iter().map(|fs| fs.split_by(keep)).collect();
        let mut basis_set: BTreeSet<FockState> = BTreeSet::new();
        for (kept, _) in &parts {
            basis_set.insert(kept.clone());
        }
        let basis: Vec<FockState> = basis_set.into_iter().collect();
        let index: BTreeMap<&FockState, usize> =
            basis.iter().enumerate().map(|(i, f)| (f, i)).collect();
        let mut mat = CMatrix::zeros(basis.len(), basis.len());
        for i in 0..self.basis.len() {
            for j in 0..self.basis.len() {
                if parts[i].1 == parts[j].1 {
                    let (bi, bj) = (index[&parts[i].0], index[&parts[j].0]);
                    mat[(bi, bj)] = mat[(bi, bj)] + self.mat[(i, j)];
                }
            }
        }
        Self { basis, mat }
    }

    /// Conjugates the state by a two-mode unitary acting on `m1`, `m2` (same
    /// creation-operator convention as [`StateVector::apply_two_mode_unitary`]).
    pub fn apply_two_mode_unitary(
        &self,
        m1: ModeLabel,
        m2: ModeLabel,
        u: &[[C<T>; 2]; 2],
    ) -> Result<Self> {
        // Transform each basis ket, collect the union basis, then M ρ M†.
        let n_max = self
            .basis
            .iter()
            .map(|f| f.total_photons())
            .max()
            .unwrap_or(0);
        let mut images: Vec<StateVector<T>> = Vec::with_capacity(self.basis.len());
        for fs in &self.basis {
            let sv =
                StateVector::superpose(n_max, &[(fs.clone(), Complex::new(T::one(), T::zero()))])?;
            images.push(sv.apply_two_mode_unitary(m1, m2, u)?);
        }
        let mut basis_set: BTreeSet<FockState> = BTreeSet::new();
        for im in &images {
            for fs in im.terms.keys() {
                basis_set.insert(fs.clone());
            }
        }
        let basis: Vec<FockState> = basis_set.into_iter().collect();
        let index: BTreeMap<&FockState, usize> =
            basis.iter().enumerate().map(|(i, f)| (f, i)).collect();
        let mut m = CMatrix::zeros(basis.len(), self.basis.len());
        for (col, im) in images.iter().enumerate() {
            for (fs, amp) in im.terms.iter() {
                m[(index[fs], col)] = *amp;
            }
        }
        let mat = m.mul(&self.mat).mul(&m.adjoint());
        Ok(Self { basis, mat })
    }

    /// Applies a photon-loss (binomial) channel with transmissivity `eta` to
    /// one mode: the standard beam-splitter coupling to a fresh environment
    /// followed by tracing the environment out.
    pub fn lossy_mode(&self, mode: ModeLabel, eta: T) -> Self {
        // Kraus operator A_k removes k photons with amplitude
        // sqrt(C(n,k) eta^(n-k) (1-eta)^k).
        let kraus_amp = |n: u32, k: u32| -> T {
            T::of(binom(n, k)).sqrt()
                * eta.powi((n - k) as i32).sqrt()
                * (T::one() - eta).powi(k as i32).sqrt()
        };
        let mut basis_set: BTreeSet<FockState> = BTreeSet::new();
        for fs in &self.basis {
            let n = fs.occupation(mode);
            for k in 0..=n {
                basis_set.insert(fs.with_occupation(mode, n - k));
            }
        }
        let basis: Vec<FockState> = basis_set.into_iter().collect();
        let index: BTreeMap<&FockState, usize> =
            basis.iter().enumerate().map(|(i, f)| (f, i)).collect();
        let mut mat = CMatrix::zeros(basis.len(), basis.len());
        for (i, fi) in self.basis.iter().enumerate() {
            let ni = fi.occupation(mode);
            for (j, fj) in self.basis.iter().enumerate() {
                let nj = fj.occupation(mode);
                let z = self.mat[(i, j)];
                if z.norm_sqr() == T::zero() {
                    continue;
                }
                for k in 0..=ni.min(nj) {
                    let w = kraus_amp(ni, k) * kraus_amp(nj, k);
                    let bi = index[&fi.with_occupation(mode, ni - k)];
                    let bj = index[&fj.with_occupation(mode, nj - k)];
                    mat[(bi, bj)] = mat[(bi, bj)] + z.scale(w);
                }
            }
        }
        Self { basis, mat }
    }

    /// Keeps only basis states whose occupation of `mode` equals `n`, strips
    /// the mode, and returns the unnormalized block with its trace weight.
    pub fn occupation_block(&self, mode: ModeLabel, n: u32) -> (Self, T) {
        let sel: Vec<usize> = (0..self.basis.len())
            .filter(|&i| self.basis[i].occupation(mode) == n)
            .collect();
        let mut basis_set: BTreeSet<FockState> = BTreeSet::new();
        for &i in &sel {
            basis_set.insert(self.basis[i].with_occupation(mode, 0));
        }
        let basis: Vec<FockState> = basis_set.into_iter().collect();
        let index: BTreeMap<&FockState, usize> =
            basis.iter().enumerate().map(|(i, f)| (f, i)).collect();
        let mut mat = CMatrix::zeros(basis.len(), basis.len());
        let mut weight = T::zero();
        for &i in &sel {
            for &j in &sel {
                let bi = index[&self.basis[i].with_occupation(mode, 0)];
                let bj = index[&self.basis[j].with_occupation(mode, 0)];
                mat[(bi, bj)] = mat[(bi, bj)] + self.mat[(i, j)];
            }
            weight = weight + self.mat[(i, i)].re;
        }
        (Self { basis, mat }, weight)
    }

    /// Scales every entry by `w`.
    pub fn scaled(&self, w: T) -> Self {
        Self {
            basis: self.basis.clone(),
            mat: self.mat.scale_re(w),
        }
    }

    /// Adds another density matrix (basis union), scaled by `w`.
    pub fn add_scaled(&self, other: &Self, w: T) -> Self {
        let mut basis_set: BTreeSet<FockState> = self.basis.iter().cloned().collect();
        basis_set.extend(other.basis.iter().cloned());
        let basis: Vec<FockState> = basis_set.into_iter().collect();
        let index: BTreeMap<&FockState, usize> =
            basis.iter().enumerate().map(|(i, f)| (f, i)).collect();
        let mut mat = CMatrix::zeros(basis.len(), basis.len());
        for (i, fi) in self.basis.iter().enumerate() {
            for (j, fj) in self.basis.iter().enumerate() {
                mat[(index[fi], index[fj])] = mat[(index[fi], index[fj])] + self.mat[(i, j)];
            }
        }
        for (i, fi) in other.basis.iter().enumerate() {
            for (j, fj) in other.basis.iter().enumerate() {
                mat[(index[fi], index[fj])] =
                    mat[(index[fi], index[fj])] + other.mat[(i, j)].scale(w);
            }
        }
        Self { basis, mat }
    }

    /// Smallest eigenvalue (PSD check helper).
    pub fn min_eigenvalue(&self) -> Result<T> {
        if self.basis.is_empty() {
            return Ok(T::zero());
        }
        let vals = self.mat.hermitian_eigenvalues()?;
        Ok(vals[0])
    }

    /// Validates the density-matrix invariants: Hermitian within 1e-12,
    /// unit trace within 1e-12 and positive semidefinite within -1e-10.
    pub fn validate(&self) -> Result<()> {
        let herm = self.mat.hermiticity_deviation();
        if herm > T::of(1e-12).max(T::epsilon() * T::of(256.0)) {
            return Err(Error::Numeric(format!("not Hermitian: deviation {herm}")));
        }
        let tr = self.trace();
        if (tr - T::one()).abs() > T::of(1e-12).max(T::epsilon() * T::of(256.0)) {
            return Err(Error::Numeric(format!("trace {tr} differs from 1")));
        }
        let min = self.min_eigenvalue()?;
        if min < T::of(-1e-10) {
            return Err(Error::Numeric(format!("negative eigenvalue {min}")));
        }
        Ok(())
    }
}
