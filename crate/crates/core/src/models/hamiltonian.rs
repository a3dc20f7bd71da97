use crate::hilbert::{Operator, SpaceDescriptor};
use crate::linalg::CMatrix;
use crate::scalar::{czero, phase, re, Cx, Real};
use std::collections::HashMap;

use super::ModelError;

/// Scalar time dependence multiplying one operator term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Modulation<T> {
    Constant,
    /// `cos(ωt + φ)`
    Cos {
        omega: T,
        phase: T,
    },
    /// `sin(ωt + φ)`
    Sin {
        omega: T,
        phase: T,
    },
    /// `e^{iωt}`
    Exp {
        omega: T,
    },
}

impl<T: Real> Modulation<T> {
    pub fn value(&self, t: T) -> Cx<T> {
        match *self {
            Modulation::Constant => re(T::one()),
            Modulation::Cos { omega, phase } => re((omega * t + phase).cos()),
            Modulation::Sin { omega, phase } => re((omega * t + phase).sin()),
            Modulation::Exp { omega } => phase(omega * t),
        }
    }

    pub fn frequency(&self) -> T {
        match *self {
            Modulation::Constant => T::zero(),
            Modulation::Cos { omega, .. } | Modulation::Sin { omega, .. } | Modulation::Exp { omega } => omega.abs(),
        }
    }

    fn simplify(self) -> (Self, Cx<T>) {
        match self {
            Modulation::Cos { omega, phase } if omega == T::zero() => (Modulation::Constant, re(phase.cos())),
            Modulation::Sin { omega, phase } if omega == T::zero() => (Modulation::Constant, re(phase.sin())),
            Modulation::Exp { omega } if omega == T::zero() => (Modulation::Constant, re(T::one())),
            m => (m, re(T::one())),
        }
    }
}

/// Precomputed sparsity pattern: the Hamiltonian at time `t` is
/// `Σ_p vals[p] |rows[p]⟩⟨cols[p]|` where each `vals[p]` collects the
/// per-term contributions.
#[derive(Debug, Clone)]
struct Compiled<T> {
    rows: Vec<usize>,
    cols: Vec<usize>,
    contrib: Vec<(usize, usize, Cx<T>)>,
}

/// Scratch buffers for evaluating a Hamiltonian without allocating.
#[derive(Debug, Clone, Default)]
pub struct Snapshot<T> {
    coefs: Vec<Cx<T>>,
    frame_phase: Vec<Cx<T>>,
    pub(crate) vals: Vec<Cx<T>>,
}

/// `H(t) = Σ_k m_k(t) H_k`, optionally expressed in the rotating frame of a
/// diagonal generator `G`: `e^{iGt} H(t) e^{−iGt} − G`.
#[derive(Debug, Clone)]
pub struct TimeDependentHamiltonian<T> {
    space: SpaceDescriptor,
    label: String,
    terms: Vec<(Modulation<T>, CMatrix<T>)>,
    frame: Option<Vec<T>>,
    compiled: Compiled<T>,
}

impl<T: Real> TimeDependentHamiltonian<T> {
    /// Builds and checks Hermiticity at 16 deterministic sample times.
    pub fn new(space: SpaceDescriptor, label: impl Into<String>, terms: Vec<(Modulation<T>, CMatrix<T>)>) -> Result<Self, ModelError> {
        let mut cleaned = Vec::with_capacity(terms.len());
        for (m, mat) in terms {
            if mat.rows() != space.dim() || mat.cols() != space.dim() {
                return Err(ModelError::Invalid(format!("term of size {} on space of dim {}", mat.rows(), space.dim())));
            }
            if mat.max_abs() == T::zero() {
                continue;
            }
            let (m, s) = m.simplify();
            cleaned.push((m, if s == re(T::one()) { mat } else { mat.scale(s) }));
        }
        let h = Self::assemble(space, label.into(), cleaned, None);
        h.check_hermitian()?;
        Ok(h)
    }

    fn assemble(space: SpaceDescriptor, label: String, terms: Vec<(Modulation<T>, CMatrix<T>)>, frame: Option<Vec<T>>) -> Self {
        let compiled = compile(&terms);
        Self { space, label, terms, frame, compiled }
    }

    fn check_hermitian(&self) -> Result<(), ModelError> {
        let golden = 0.618_033_988_749_894_9_f64;
        for k in 0..16 {
            let t = T::lit(((k as f64) * golden).fract() * 1e-7);
            let h = self.evaluate(t);
            let scale = h.matrix().max_abs().max(T::one());
            let defect = h.matrix().hermitian_defect();
            if defect > T::epsilon() * T::lit(1e4) * scale {
                return Err(ModelError::NotHermitian(defect.as_f64()));
            }
        }
        Ok(())
    }

    pub fn space(&self) -> SpaceDescriptor {
        self.space
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn terms(&self) -> &[(Modulation<T>, CMatrix<T>)] {
        &self.terms
    }

    pub fn frame(&self) -> Option<&[T]> {
        self.frame.as_deref()
    }

    pub fn is_static(&self) -> bool {
        self.frame.is_none() && self.terms.iter().all(|(m, _)| matches!(m, Modulation::Constant))
    }

    pub fn nnz(&self) -> usize {
        self.compiled.rows.len()
    }

    /// Dense `H(t)`.
    pub fn evaluate(&self, t: T) -> Operator<T> {
        let mut snap = Snapshot::default();
        self.snapshot(t, &mut snap);
        let n = self.space.dim();
        let mut m = CMatrix::zeros(n, n);
        for (p, v) in snap.vals.iter().enumerate() {
            m[(self.compiled.rows[p], self.compiled.cols[p])] += *v;
        }
        Operator::new(m, self.space).expect("dimension fixed at construction")
    }

    /// Fills `snap.vals` with the nonzero values of `H(t)`.
    pub fn snapshot(&self, t: T, snap: &mut Snapshot<T>) {
        snap.coefs.clear();
        snap.coefs.extend(self.terms.iter().map(|(m, _)| m.value(t)));
        snap.vals.clear();
        snap.vals.resize(self.compiled.rows.len(), czero());
        for &(p, k, v) in &self.compiled.contrib {
            snap.vals[p] += snap.coefs[k] * v;
        }
        if let Some(g) = &self.frame {
            snap.frame_phase.clear();
            snap.frame_phase.extend(g.iter().map(|e| phase(*e * t)));
            for p in 0..snap.vals.len() {
                let (i, j) = (self.compiled.rows[p], self.compiled.cols[p]);
                if i != j {
                    snap.vals[p] = snap.vals[p] * snap.frame_phase[i] * snap.frame_phase[j].conj();
                }
            }
        }
    }

    /// Nonzero pattern as (row, col) pairs, aligned with `Snapshot::vals`.
    pub fn pattern(&self) -> (&[usize], &[usize]) {
        (&self.compiled.rows, &self.compiled.cols)
    }

    /// Re-expresses the Hamiltonian in the frame of the diagonal generator `G`
    /// (entries in rad/s), i.e. returns `e^{iGt} H e^{−iGt} − G`.
    pub fn in_rotating_frame(&self, generator: &[T]) -> Result<Self, ModelError> {
        if self.frame.is_some() {
            return Err(ModelError::Invalid("Hamiltonian is already in a rotating frame".into()));
        }
        if generator.len() != self.space.dim() {
            return Err(ModelError::Invalid("frame generator has the wrong dimension".into()));
        }
        let mut terms = self.terms.clone();
        let shift: Vec<T> = generator.iter().map(|g| -*g).collect();
        terms.push((Modulation::Constant, CMatrix::from_real_diag(&shift)));
        Ok(Self::assemble(self.space, format!("{} [rotating frame]", self.label), terms, Some(generator.to_vec())))
    }

    /// Moves into the frame generated by the diagonal of the constant terms.
    /// The diagonal is removed exactly rather than subtracted.
    pub fn interaction_frame(&self) -> Result<(Self, Vec<T>), ModelError> {
        if self.frame.is_some() {
            return Err(ModelError::Invalid("Hamiltonian is already in a rotating frame".into()));
        }
        let n = self.space.dim();
        let mut g = vec![T::zero(); n];
        let mut terms = self.terms.clone();
        for (m, mat) in terms.iter_mut() {
            if matches!(m, Modulation::Constant) {
                for i in 0..n {
                    g[i] += mat[(i, i)].re;
                    mat[(i, i)] = czero();
                }
            }
        }
        terms.retain(|(_, m)| m.max_abs() > T::zero());
        let h = Self::assemble(self.space, format!("{} [interaction frame]", self.label), terms, Some(g.clone()));
        Ok((h, g))
    }

    /// Upper bound on the fastest angular frequency present: largest
    /// modulation-plus-frame phase rate plus a row-sum bound on `‖H‖`.
    pub fn max_angular_frequency(&self) -> T {
        let mut rate = T::zero();
        for &(p, k, _) in &self.compiled.contrib {
            let mut r = self.terms[k].0.frequency();
            if let Some(g) = &self.frame {
                r += (g[self.compiled.rows[p]] - g[self.compiled.cols[p]]).abs();
            }
            rate = rate.max(r);
        }
        let bound: T = self.terms.iter().map(|(_, m)| m.norm_inf()).sum();
        rate + bound
    }
}

fn compile<T: Real>(terms: &[(Modulation<T>, CMatrix<T>)]) -> Compiled<T> {
    let mut positions: HashMap<(usize, usize), usize> = HashMap::new();
    let mut raw = Vec::new();
    for (k, (_, m)) in terms.iter().enumerate() {
        for i in 0..m.rows() {
            for (j, v) in m.row(i).iter().enumerate() {
                if *v != czero() {
                    let next = positions.len();
                    positions.entry((i, j)).or_insert(next);
                    raw.push(((i, j), k, *v));
                }
            }
        }
    }
    let mut keys: Vec<(usize, usize)> = positions.keys().copied().collect();
    keys.sort_unstable();
    let index: HashMap<(usize, usize), usize> = keys.iter().enumerate().map(|(p, k)| (*k, p)).collect();
    let mut contrib: Vec<(usize, usize, Cx<T>)> = raw.into_iter().map(|(key, k, v)| (index[&key], k, v)).collect();
    contrib.sort_by_key(|c| (c.0, c.1));
    Compiled { rows: keys.iter().map(|k| k.0).collect(), cols: keys.iter().map(|k| k.1).collect(), contrib }
}
