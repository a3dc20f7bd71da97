//! Truncated atom ⊗ resonator Hilbert space, operators and states.
//!
//! Basis ordering is atom-major: index `atom * N + n` with atom levels
//! `0 = g`, `1 = e`, `2 = f` and Fock number `n < N`.

use crate::linalg::{self, CMatrix};
use crate::scalar::{cone, cx, czero, re, Cx, Real};
use std::fmt;

/// Population allowed in the two highest Fock levels of any resonator state.
pub const TOP_LEVEL_TOLERANCE: f64 = 1e-6;

/// Magnitude of the most negative eigenvalue a density matrix may have.
pub const EIGENVALUE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HilbertError {
    #[error("atom must have 2 or 3 levels, got {0}")]
    AtomLevels(usize),
    #[error("Fock cutoff must be at least 2, got {0}")]
    FockCutoff(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("atom level {level} does not exist in a {levels}-level atom")]
    NoSuchLevel { level: usize, levels: usize },
    #[error("Fock cutoff {cutoff} too small: {reason}")]
    Cutoff { cutoff: usize, reason: String },
    #[error("state is not normalized (norm {0})")]
    Normalization(f64),
    #[error("density matrix invalid: {0}")]
    Density(String),
    #[error("operator is not Hermitian (defect {0})")]
    NotHermitian(f64),
    #[error("operands live on different spaces")]
    SpaceMismatch,
    #[error("selection rule {0:?} needs a three-level atom")]
    SelectionNeedsQutrit(Selection),
}

/// Shape of the truncated space.
///
/// `atom_levels == 1` is reserved for the bare resonator factor produced by
/// projecting the atom out; [`make_space`] only hands out 2 or 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpaceDescriptor {
    atom_levels: usize,
    fock_cutoff: usize,
}

pub fn make_space(atom_levels: usize, fock_cutoff: usize) -> Result<SpaceDescriptor, HilbertError> {
    if !(2..=3).contains(&atom_levels) {
        return Err(HilbertError::AtomLevels(atom_levels));
    }
    if fock_cutoff < 2 {
        return Err(HilbertError::FockCutoff(fock_cutoff));
    }
    Ok(SpaceDescriptor { atom_levels, fock_cutoff })
}

impl SpaceDescriptor {
    /// The resonator on its own.
    pub fn resonator(fock_cutoff: usize) -> Result<Self, HilbertError> {
        if fock_cutoff < 2 {
            return Err(HilbertError::FockCutoff(fock_cutoff));
        }
        Ok(Self { atom_levels: 1, fock_cutoff })
    }

    pub fn atom_levels(&self) -> usize {
        self.atom_levels
    }

    pub fn fock_cutoff(&self) -> usize {
        self.fock_cutoff
    }

    pub fn dim(&self) -> usize {
        self.atom_levels * self.fock_cutoff
    }

    pub fn is_resonator_only(&self) -> bool {
        self.atom_levels == 1
    }

    pub fn resonator_factor(&self) -> SpaceDescriptor {
        SpaceDescriptor { atom_levels: 1, fock_cutoff: self.fock_cutoff }
    }

    #[inline]
    pub fn index(&self, atom: usize, n: usize) -> usize {
        atom * self.fock_cutoff + n
    }

    fn check_level(&self, level: usize) -> Result<(), HilbertError> {
        if level >= self.atom_levels {
            return Err(HilbertError::NoSuchLevel { level, levels: self.atom_levels });
        }
        Ok(())
    }
}

impl fmt::Display for SpaceDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} atom levels x {} Fock states", self.atom_levels, self.fock_cutoff)
    }
}

/// Atomic basis labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AtomLevel {
    G,
    E,
    F,
}

impl AtomLevel {
    pub fn index(self) -> usize {
        match self {
            AtomLevel::G => 0,
            AtomLevel::E => 1,
            AtomLevel::F => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            AtomLevel::G => "g",
            AtomLevel::E => "e",
            AtomLevel::F => "f",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "g" => Some(AtomLevel::G),
            "e" => Some(AtomLevel::E),
            "f" => Some(AtomLevel::F),
            _ => None,
        }
    }
}

/// Which pairs of qutrit levels the drive and coupling connect.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Selection {
    /// Ladder: g↔e and e↔f.
    #[default]
    Cascade,
    /// g↔e and g↔f.
    Vee,
    /// g↔f and e↔f.
    Lambda,
}

impl Selection {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "cascade" | "xi" => Some(Selection::Cascade),
            "vee" | "v" => Some(Selection::Vee),
            "lambda" => Some(Selection::Lambda),
            _ => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Selection::Cascade => "cascade",
            Selection::Vee => "vee",
            Selection::Lambda => "lambda",
        }
    }

    /// (lower, upper) level of the first and second transition.
    pub fn transitions(self) -> [(usize, usize); 2] {
        match self {
            Selection::Cascade => [(0, 1), (1, 2)],
            Selection::Vee => [(0, 1), (0, 2)],
            Selection::Lambda => [(0, 2), (1, 2)],
        }
    }
}

/// Operator on a specific space.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator<T> {
    matrix: CMatrix<T>,
    space: SpaceDescriptor,
}

impl<T: Real> Operator<T> {
    pub fn new(matrix: CMatrix<T>, space: SpaceDescriptor) -> Result<Self, HilbertError> {
        if matrix.rows() != space.dim() || matrix.cols() != space.dim() {
            return Err(HilbertError::Dimension { expected: space.dim(), got: matrix.rows().max(matrix.cols()) });
        }
        Ok(Self { matrix, space })
    }

    pub fn zero(space: SpaceDescriptor) -> Self {
        Self { matrix: CMatrix::zeros(space.dim(), space.dim()), space }
    }

    pub fn identity(space: SpaceDescriptor) -> Self {
        Self { matrix: CMatrix::identity(space.dim()), space }
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.matrix
    }

    pub fn space(&self) -> SpaceDescriptor {
        self.space
    }

    pub fn adjoint(&self) -> Self {
        Self { matrix: self.matrix.adjoint(), space: self.space }
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.matrix.is_hermitian(tol)
    }

    pub fn scale(&self, s: Cx<T>) -> Self {
        Self { matrix: self.matrix.scale(s), space: self.space }
    }

    pub fn scale_real(&self, s: T) -> Self {
        Self { matrix: self.matrix.scale_real(s), space: self.space }
    }

    pub fn add(&self, other: &Self) -> Result<Self, HilbertError> {
        self.same_space(other)?;
        Ok(Self { matrix: &self.matrix + &other.matrix, space: self.space })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, HilbertError> {
        self.same_space(other)?;
        Ok(Self { matrix: &self.matrix - &other.matrix, space: self.space })
    }

    pub fn compose(&self, other: &Self) -> Result<Self, HilbertError> {
        self.same_space(other)?;
        Ok(Self { matrix: self.matrix.matmul(&other.matrix), space: self.space })
    }

    pub fn commutator(&self, other: &Self) -> Result<Self, HilbertError> {
        self.same_space(other)?;
        Ok(Self { matrix: self.matrix.commutator(&other.matrix), space: self.space })
    }

    pub fn apply(&self, psi: &[Cx<T>]) -> Vec<Cx<T>> {
        self.matrix.mul_vec(psi)
    }

    fn same_space(&self, other: &Self) -> Result<(), HilbertError> {
        if self.space != other.space {
            return Err(HilbertError::SpaceMismatch);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StateData<T> {
    Pure(Vec<Cx<T>>),
    Mixed(CMatrix<T>),
}

/// Pure ket or density matrix on a space.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState<T> {
    data: StateData<T>,
    space: SpaceDescriptor,
}

impl<T: Real> QuantumState<T> {
    /// Validates normalization to 1e-9.
    pub fn pure(vector: Vec<Cx<T>>, space: SpaceDescriptor) -> Result<Self, HilbertError> {
        if vector.len() != space.dim() {
            return Err(HilbertError::Dimension { expected: space.dim(), got: vector.len() });
        }
        let nrm = linalg::norm(&vector);
        if (nrm - T::one()).abs() > T::lit(1e-9).max(T::epsilon() * T::lit(64.0)) {
            return Err(HilbertError::Normalization(nrm.as_f64()));
        }
        Ok(Self { data: StateData::Pure(vector), space })
    }

    /// Scales the vector to unit norm first.
    pub fn pure_normalized(mut vector: Vec<Cx<T>>, space: SpaceDescriptor) -> Result<Self, HilbertError> {
        if vector.len() != space.dim() {
            return Err(HilbertError::Dimension { expected: space.dim(), got: vector.len() });
        }
        let nrm = linalg::norm(&vector);
        if !(nrm > T::zero()) {
            return Err(HilbertError::Normalization(0.0));
        }
        vector.iter_mut().for_each(|z| *z /= nrm);
        Ok(Self { data: StateData::Pure(vector), space })
    }

    /// Validates trace 1 to 1e-9, Hermiticity to 1e-10 and eigenvalues down
    /// to -1e-8 (tolerances floored at a few ulps for `f32`).
    pub fn mixed(matrix: CMatrix<T>, space: SpaceDescriptor) -> Result<Self, HilbertError> {
        if matrix.rows() != space.dim() || matrix.cols() != space.dim() {
            return Err(HilbertError::Dimension { expected: space.dim(), got: matrix.rows() });
        }
        let floor = T::epsilon() * T::lit(64.0);
        let tr = matrix.trace();
        let tol = T::lit(1e-9).max(floor);
        if (tr.re - T::one()).abs() > tol || tr.im.abs() > tol {
            return Err(HilbertError::Density(format!("trace {} + {}i", tr.re, tr.im)));
        }
        let defect = matrix.hermitian_defect();
        if defect > T::lit(1e-10).max(floor) {
            return Err(HilbertError::Density(format!("Hermitian defect {defect}")));
        }
        if !linalg::is_positive_after_shift(&matrix, T::lit(EIGENVALUE_TOLERANCE).max(floor)) {
            return Err(HilbertError::Density(format!("eigenvalue below -{EIGENVALUE_TOLERANCE:e}")));
        }
        Ok(Self { data: StateData::Mixed(matrix), space })
    }

    /// Skips validation; integrators use this for intermediate states.
    pub(crate) fn from_parts(data: StateData<T>, space: SpaceDescriptor) -> Self {
        Self { data, space }
    }

    /// Basis state `|atom⟩|n⟩` (on a resonator-only space `atom` must be 0).
    pub fn basis(space: SpaceDescriptor, atom: usize, n: usize) -> Result<Self, HilbertError> {
        if atom >= space.atom_levels() {
            return Err(HilbertError::NoSuchLevel { level: atom, levels: space.atom_levels() });
        }
        if n >= space.fock_cutoff() {
            return Err(HilbertError::Cutoff { cutoff: space.fock_cutoff(), reason: format!("Fock state {n} requested") });
        }
        let mut v = vec![czero(); space.dim()];
        v[space.index(atom, n)] = cone();
        Ok(Self { data: StateData::Pure(v), space })
    }

    /// `|atom⟩ ⊗ resonator`, with `atom` given as amplitudes (normalized here).
    pub fn product(atom: &[Cx<T>], resonator: &QuantumState<T>) -> Result<Self, HilbertError> {
        let rspace = resonator.space();
        if !rspace.is_resonator_only() {
            return Err(HilbertError::SpaceMismatch);
        }
        let space = make_space(atom.len(), rspace.fock_cutoff())?;
        let an = linalg::norm(atom);
        if !(an > T::zero()) {
            return Err(HilbertError::Normalization(0.0));
        }
        let a: Vec<Cx<T>> = atom.iter().map(|z| *z / an).collect();
        Ok(match &resonator.data {
            StateData::Pure(r) => {
                let mut v = Vec::with_capacity(space.dim());
                for ai in &a {
                    v.extend(r.iter().map(|x| *ai * *x));
                }
                Self { data: StateData::Pure(v), space }
            }
            StateData::Mixed(r) => {
                let am = CMatrix::outer(&a, &a);
                Self { data: StateData::Mixed(am.kron(r)), space }
            }
        })
    }

    pub fn space(&self) -> SpaceDescriptor {
        self.space
    }

    pub fn data(&self) -> &StateData<T> {
        &self.data
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.data, StateData::Pure(_))
    }

    pub fn as_vector(&self) -> Option<&[Cx<T>]> {
        match &self.data {
            StateData::Pure(v) => Some(v),
            StateData::Mixed(_) => None,
        }
    }

    pub fn to_density(&self) -> CMatrix<T> {
        match &self.data {
            StateData::Pure(v) => CMatrix::outer(v, v),
            StateData::Mixed(m) => m.clone(),
        }
    }

    pub fn into_mixed(self) -> Self {
        let m = self.to_density();
        Self { data: StateData::Mixed(m), space: self.space }
    }

    /// `‖ψ‖²` or `Tr ρ`.
    pub fn norm_sqr(&self) -> T {
        match &self.data {
            StateData::Pure(v) => v.iter().map(|z| z.norm_sqr()).sum(),
            StateData::Mixed(m) => m.trace().re,
        }
    }

    pub fn purity(&self) -> T {
        match &self.data {
            StateData::Pure(v) => {
                let n: T = v.iter().map(|z| z.norm_sqr()).sum();
                n * n
            }
            StateData::Mixed(m) => m.as_slice().iter().map(|z| z.norm_sqr()).sum(),
        }
    }

    /// `⟨O⟩` (real part; the operators we measure are Hermitian).
    pub fn expectation(&self, op: &Operator<T>) -> Result<T, HilbertError> {
        if op.space() != self.space {
            return Err(HilbertError::SpaceMismatch);
        }
        Ok(expectation_raw(&self.data, op.matrix()))
    }

    /// Population of Fock level `n`, summed over atom levels.
    pub fn fock_population(&self, n: usize) -> T {
        let s = self.space;
        let mut p = T::zero();
        for a in 0..s.atom_levels() {
            let i = s.index(a, n);
            p += match &self.data {
                StateData::Pure(v) => v[i].norm_sqr(),
                StateData::Mixed(m) => m[(i, i)].re,
            };
        }
        p
    }

    /// Population of atom level `level`.
    pub fn atom_population(&self, level: usize) -> T {
        let s = self.space;
        (0..s.fock_cutoff())
            .map(|n| {
                let i = s.index(level, n);
                match &self.data {
                    StateData::Pure(v) => v[i].norm_sqr(),
                    StateData::Mixed(m) => m[(i, i)].re,
                }
            })
            .sum()
    }

    /// Population in the two highest Fock levels.
    pub fn top_fock_population(&self) -> T {
        let n = self.space.fock_cutoff();
        self.fock_population(n - 1) + self.fock_population(n - 2)
    }

    /// Errors when the top two Fock levels hold more than [`TOP_LEVEL_TOLERANCE`].
    pub fn check_cutoff(&self) -> Result<(), HilbertError> {
        let top = self.top_fock_population();
        if top > T::lit(TOP_LEVEL_TOLERANCE) {
            return Err(HilbertError::Cutoff {
                cutoff: self.space.fock_cutoff(),
                reason: format!("top two Fock levels hold population {top:e}"),
            });
        }
        Ok(())
    }

    /// Mean photon number, `Tr[ρ a†a]`.
    pub fn mean_photon_number(&self) -> T {
        (0..self.space.fock_cutoff()).map(|n| T::from_usize_lossy(n) * self.fock_population(n)).sum()
    }
}

pub(crate) fn expectation_raw<T: Real>(data: &StateData<T>, op: &CMatrix<T>) -> T {
    match data {
        StateData::Pure(v) => linalg::inner(v, &op.mul_vec(v)).re,
        StateData::Mixed(m) => {
            // Tr(ρ O) = Σ_ij ρ_ij O_ji
            let n = m.rows();
            let mut acc = czero::<T>();
            for i in 0..n {
                for j in 0..n {
                    let o = op[(j, i)];
                    if o != czero() {
                        acc += m[(i, j)] * o;
                    }
                }
            }
            acc.re
        }
    }
}

fn resonator_lowering<T: Real>(n: usize) -> CMatrix<T> {
    let mut a = CMatrix::zeros(n, n);
    for k in 1..n {
        a[(k - 1, k)] = re(T::from_usize_lossy(k).sqrt());
    }
    a
}

fn lift_resonator<T: Real>(space: SpaceDescriptor, op: &CMatrix<T>) -> Operator<T> {
    let m = CMatrix::identity(space.atom_levels()).kron(op);
    Operator { matrix: m, space }
}

fn lift_atom<T: Real>(space: SpaceDescriptor, op: &CMatrix<T>) -> Operator<T> {
    let m = op.kron(&CMatrix::identity(space.fock_cutoff()));
    Operator { matrix: m, space }
}

/// `I_atom ⊗ a`.
pub fn annihilation<T: Real>(space: SpaceDescriptor) -> Operator<T> {
    lift_resonator(space, &resonator_lowering(space.fock_cutoff()))
}

/// `I_atom ⊗ a†`.
pub fn creation<T: Real>(space: SpaceDescriptor) -> Operator<T> {
    annihilation(space).adjoint()
}

/// `I_atom ⊗ a†a`.
pub fn number<T: Real>(space: SpaceDescriptor) -> Operator<T> {
    let d: Vec<T> = (0..space.fock_cutoff()).map(T::from_usize_lossy).collect();
    lift_resonator(space, &CMatrix::from_real_diag(&d))
}

/// Embeds an atom-sized matrix as `A ⊗ I_N`.
pub fn atom_operator<T: Real>(space: SpaceDescriptor, atom: &CMatrix<T>) -> Result<Operator<T>, HilbertError> {
    if atom.rows() != space.atom_levels() || atom.cols() != space.atom_levels() {
        return Err(HilbertError::Dimension { expected: space.atom_levels(), got: atom.rows() });
    }
    Ok(lift_atom(space, atom))
}

/// Embeds a resonator-sized matrix as `I_atom ⊗ R`.
pub fn resonator_operator<T: Real>(space: SpaceDescriptor, res: &CMatrix<T>) -> Result<Operator<T>, HilbertError> {
    if res.rows() != space.fock_cutoff() || res.cols() != space.fock_cutoff() {
        return Err(HilbertError::Dimension { expected: space.fock_cutoff(), got: res.rows() });
    }
    Ok(lift_resonator(space, res))
}

/// `A ⊗ R` with an atom-sized and a resonator-sized factor.
pub fn tensor<T: Real>(space: SpaceDescriptor, atom: &CMatrix<T>, res: &CMatrix<T>) -> Result<Operator<T>, HilbertError> {
    if atom.rows() != space.atom_levels() || atom.cols() != space.atom_levels() {
        return Err(HilbertError::Dimension { expected: space.atom_levels(), got: atom.rows() });
    }
    if res.rows() != space.fock_cutoff() || res.cols() != space.fock_cutoff() {
        return Err(HilbertError::Dimension { expected: space.fock_cutoff(), got: res.rows() });
    }
    Ok(Operator { matrix: atom.kron(res), space })
}

/// `|i⟩⟨j|` on the atom alone.
pub fn atom_ketbra<T: Real>(levels: usize, i: usize, j: usize) -> CMatrix<T> {
    let mut m = CMatrix::zeros(levels, levels);
    m[(i, j)] = cone();
    m
}

/// Projector `|level⟩⟨level| ⊗ I`.
pub fn projector<T: Real>(space: SpaceDescriptor, level: usize) -> Result<Operator<T>, HilbertError> {
    space.check_level(level)?;
    Ok(lift_atom(space, &atom_ketbra(space.atom_levels(), level, level)))
}

/// `σz = |e⟩⟨e| − |g⟩⟨g|` (leaves `|f⟩` untouched on a qutrit).
pub fn sigma_z_atom<T: Real>(levels: usize) -> CMatrix<T> {
    let mut m = CMatrix::zeros(levels, levels);
    m[(0, 0)] = re(-T::one());
    m[(1, 1)] = re(T::one());
    m
}

pub fn sigma_z<T: Real>(space: SpaceDescriptor) -> Operator<T> {
    lift_atom(space, &sigma_z_atom(space.atom_levels()))
}

/// Raising/lowering operators of the allowed atomic transitions.
#[derive(Debug, Clone)]
pub struct TransitionOps<T> {
    pub sigma1_plus: Operator<T>,
    pub sigma1_minus: Operator<T>,
    pub sigma2_plus: Option<Operator<T>>,
    pub sigma2_minus: Option<Operator<T>>,
}

/// Atom-sized raising matrices of the two transitions (the second is
/// absent on a qubit).
pub fn atom_raising<T: Real>(levels: usize, selection: Selection) -> (CMatrix<T>, Option<CMatrix<T>>) {
    if levels == 2 {
        return (atom_ketbra(2, 1, 0), None);
    }
    let [(l1, u1), (l2, u2)] = selection.transitions();
    (atom_ketbra(3, u1, l1), Some(atom_ketbra(3, u2, l2)))
}

pub fn atom_transition_ops<T: Real>(space: SpaceDescriptor, selection: Selection) -> Result<TransitionOps<T>, HilbertError> {
    if space.atom_levels() == 2 && selection != Selection::Cascade {
        return Err(HilbertError::SelectionNeedsQutrit(selection));
    }
    if space.is_resonator_only() {
        return Err(HilbertError::AtomLevels(1));
    }
    let (r1, r2) = atom_raising::<T>(space.atom_levels(), selection);
    let s1p = lift_atom(space, &r1);
    let s1m = s1p.adjoint();
    let (s2p, s2m) = match r2 {
        Some(r) => {
            let p = lift_atom(space, &r);
            let m = p.adjoint();
            (Some(p), Some(m))
        }
        None => (None, None),
    };
    Ok(TransitionOps { sigma1_plus: s1p, sigma1_minus: s1m, sigma2_plus: s2p, sigma2_minus: s2m })
}

/// Truncation rule for displacing by `alpha`: `|α|² + 5|α| + 10 ≤ N`.
pub fn check_displacement_cutoff<T: Real>(alpha: Cx<T>, fock_cutoff: usize) -> Result<(), HilbertError> {
    let a = alpha.norm();
    let need = a * a + T::lit(5.0) * a + T::lit(10.0);
    if need > T::from_usize_lossy(fock_cutoff) {
        return Err(HilbertError::Cutoff { cutoff: fock_cutoff, reason: format!("|alpha| = {a} needs N >= {}", need.ceil()) });
    }
    Ok(())
}

/// Resonator displacement `exp(α a† − α* a)` on the truncated space,
/// lifted to the whole space.
pub fn displacement<T: Real>(alpha: Cx<T>, space: SpaceDescriptor) -> Result<Operator<T>, HilbertError> {
    check_displacement_cutoff(alpha, space.fock_cutoff())?;
    let a = resonator_lowering::<T>(space.fock_cutoff());
    let gen = &a.adjoint().scale(alpha) - &a.scale(alpha.conj());
    Ok(lift_resonator(space, &gen.expm()))
}

/// Closed-form amplitudes `e^{−|α|²/2} αⁿ/√n!` of a coherent state on the
/// resonator factor of `space`. Not renormalized after truncation.
pub fn coherent_amplitudes<T: Real>(alpha: Cx<T>, fock_cutoff: usize) -> Vec<Cx<T>> {
    let mut v = Vec::with_capacity(fock_cutoff);
    let mut amp = re((-alpha.norm_sqr() * T::lit(0.5)).exp());
    for n in 0..fock_cutoff {
        v.push(amp);
        amp = amp * alpha / T::from_usize_lossy(n + 1).sqrt();
    }
    v
}

pub fn coherent_state<T: Real>(alpha: Cx<T>, space: SpaceDescriptor) -> Result<QuantumState<T>, HilbertError> {
    check_displacement_cutoff(alpha, space.fock_cutoff())?;
    let rspace = space.resonator_factor();
    let v = coherent_amplitudes(alpha, rspace.fock_cutoff());
    let st = QuantumState::from_parts(StateData::Pure(v), rspace);
    st.check_cutoff()?;
    Ok(st)
}

/// Photon-number parity operator `e^{iπ a†a}` on the resonator factor.
pub fn parity_matrix<T: Real>(fock_cutoff: usize) -> CMatrix<T> {
    let d: Vec<T> = (0..fock_cutoff).map(|n| if n % 2 == 0 { T::one() } else { -T::one() }).collect();
    CMatrix::from_real_diag(&d)
}

/// Complex helper used by tests and oracles.
pub fn c<T: Real>(re_: f64, im: f64) -> Cx<T> {
    cx(T::lit(re_), T::lit(im))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(levels: usize, n: usize) -> SpaceDescriptor {
        make_space(levels, n).unwrap()
    }

    #[test]
    fn dimensions() {
        assert_eq!(space(2, 40).dim(), 80);
        assert_eq!(space(3, 40).dim(), 120);
        assert!(matches!(make_space(4, 10), Err(HilbertError::AtomLevels(4))));
        assert!(make_space(2, 1).is_err());
    }

    #[test]
    fn ladder_matrix_elements() {
        let s = space(2, 10);
        let a = annihilation::<f64>(s);
        let ad = creation::<f64>(s);
        assert!((a.matrix()[(s.index(0, 2), s.index(0, 3))].re - 3f64.sqrt()).abs() < 1e-15);
        assert!((ad.matrix()[(s.index(1, 5), s.index(1, 4))].re - 5f64.sqrt()).abs() < 1e-15);
        // a|0⟩ = 0
        for i in 0..s.dim() {
            assert_eq!(a.matrix()[(i, s.index(0, 0))], czero());
        }
    }

    #[test]
    fn truncated_commutator_identity() {
        let n = 12;
        let s = space(2, n);
        let a = annihilation::<f64>(s);
        let ad = creation::<f64>(s);
        let comm = a.commutator(&ad).unwrap();
        for atom in 0..2 {
            for k in 0..n {
                let i = s.index(atom, k);
                let expect = if k + 1 == n { 1.0 - n as f64 } else { 1.0 };
                assert!((comm.matrix()[(i, i)].re - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn vacuum_displacement_is_identity() {
        let s = space(2, 10);
        let d = displacement(c::<f64>(0.0, 0.0), s).unwrap();
        assert!((d.matrix() - &CMatrix::identity(20)).max_abs() < 1e-15);
    }

    #[test]
    fn coherent_state_matches_displaced_vacuum() {
        let alpha = c::<f64>(1.2, -0.7);
        let n = 30;
        let s = SpaceDescriptor::resonator(n).unwrap();
        let d = displacement(alpha, s).unwrap();
        let col: Vec<_> = (0..n).map(|k| d.matrix()[(k, 0)]).collect();
        let coh = coherent_state(alpha, s).unwrap();
        let v = coh.as_vector().unwrap();
        for k in 0..n {
            assert!((col[k] - v[k]).norm() < 1e-12, "n = {k}");
        }
    }

    #[test]
    fn cutoff_guard_rejects_large_alpha() {
        let err = coherent_state(c::<f64>(5.0, 0.0), SpaceDescriptor::resonator(40).unwrap()).unwrap_err();
        assert!(matches!(err, HilbertError::Cutoff { .. }));
        assert!(coherent_state(c::<f64>(3.1, 0.0), SpaceDescriptor::resonator(40).unwrap()).is_ok());
    }

    #[test]
    fn product_state_normalization() {
        let s = SpaceDescriptor::resonator(20).unwrap();
        let coh = coherent_state(c::<f64>(0.5, 0.5), s).unwrap();
        let st = QuantumState::product(&[c(1.0, 0.0), c(0.0, 1.0)], &coh).unwrap();
        assert!((st.norm_sqr() - 1.0).abs() < 1e-12);
        assert!((st.atom_population(1) - 0.5).abs() < 1e-12);
        assert!(QuantumState::pure(vec![c::<f64>(2.0, 0.0), czero()], SpaceDescriptor::resonator(2).unwrap()).is_err());
    }

    #[test]
    fn selection_rules() {
        let s = space(3, 3);
        let cas = atom_transition_ops::<f64>(s, Selection::Cascade).unwrap();
        let p2 = cas.sigma2_plus.unwrap();
        assert_eq!(p2.matrix()[(s.index(2, 0), s.index(1, 0))], cone());
        let vee = atom_transition_ops::<f64>(s, Selection::Vee).unwrap();
        assert_eq!(vee.sigma2_plus.unwrap().matrix()[(s.index(2, 1), s.index(0, 1))], cone());
        let lam = atom_transition_ops::<f64>(s, Selection::Lambda).unwrap();
        assert_eq!(lam.sigma1_plus.matrix()[(s.index(2, 0), s.index(0, 0))], cone());
        assert!(atom_transition_ops::<f64>(space(2, 3), Selection::Vee).is_err());
    }

    #[test]
    fn mixed_state_validation() {
        let s = SpaceDescriptor::resonator(2).unwrap();
        let good = CMatrix::from_real_diag(&[0.25f64, 0.75]);
        assert!(QuantumState::mixed(good, s).is_ok());
        let bad = CMatrix::from_real_diag(&[1.1f64, -0.1]);
        assert!(QuantumState::mixed(bad, s).is_err());
    }
}
