//! Closed-form predictions used to validate the integrators: coherent
//! amplitudes, dressed bases, analytic cat states, photon envelopes.

use crate::hilbert::Selection;
use crate::hilbert::{check_displacement_cutoff, coherent_amplitudes, make_space, HilbertError, QuantumState, StateData};
use crate::models::{QubitParams, QutritMode, QutritParams};
use crate::scalar::{cx, czero, imag_unit, re, Cx, Real};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("dressed splitting vanishes (Omega = Delta = 0)")]
    NoSplitting,
    #[error("triply degenerate dressed spectrum (p = 0)")]
    Degenerate,
    #[error("dressed eigenvector {0} has zero norm")]
    ZeroNorm(usize),
    #[error("{0}")]
    Precondition(String),
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
}

/// Below this `|δt|` the δ → 0 limit is taken by Taylor series.
const SERIES_THRESHOLD: f64 = 1e-6;

/// `(e^{ix} − 1)/x`, continuous through `x = 0`.
fn expm1_ratio<T: Real>(x: T) -> Cx<T> {
    if x.abs() < T::lit(SERIES_THRESHOLD) {
        // i − x/2 − i x²/6
        cx(-x * T::lit(0.5), T::one() - x * x / T::lit(6.0))
    } else {
        let h = (x * T::lit(0.5)).sin();
        cx(-T::lit(2.0) * h * h, x.sin()) / x
    }
}

/// `α = −g(e^{iδt} − 1)/2δ`, which tends to `−igt/2` as δ → 0.
pub fn alpha_resonant<T: Real>(t: T, g: T, delta: T) -> Cx<T> {
    // −g t/2 · (e^{iδt} − 1)/(δt)
    expm1_ratio(delta * t) * (-g * t * T::lit(0.5))
}

/// `α̃ = (Ω/ε) α` with `ε = √(Ω² + Δ²)`.
pub fn alpha_detuned<T: Real>(t: T, g: T, omega: T, detuning: T, delta: T) -> Result<Cx<T>, OracleError> {
    let eps = omega.hypot(detuning);
    if eps == T::zero() {
        return Err(OracleError::NoSplitting);
    }
    Ok(alpha_resonant(t, g, delta) * (omega / eps))
}

/// Eigenbasis of `Δσz/2 + Ωσx/2`:
/// `|+̃⟩ = sin(θ/2)|g⟩ + cos(θ/2)|e⟩`, `|−̃⟩ = cos(θ/2)|g⟩ − sin(θ/2)|e⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedQubitBasis<T> {
    pub theta: T,
    pub plus_state: [T; 2],
    pub minus_state: [T; 2],
    pub epsilon: T,
}

impl<T: Real> DressedQubitBasis<T> {
    pub fn new(omega: T, detuning: T) -> Result<Self, OracleError> {
        let epsilon = omega.hypot(detuning);
        if epsilon == T::zero() {
            return Err(OracleError::NoSplitting);
        }
        let theta = omega.atan2(detuning);
        let (s, c) = (theta * T::lit(0.5)).sin_cos();
        Ok(Self { theta, plus_state: [s, c], minus_state: [c, -s], epsilon })
    }

    pub fn from_params(p: &QubitParams<T>) -> Result<Self, OracleError> {
        Self::new(p.drive, p.atom_detuning())
    }

    /// Lobe weight ratio `tan⁴(θ/2)` of the `|g⟩`-projected cat from `|g,0⟩`.
    pub fn ground_lobe_ratio(&self) -> T {
        (self.theta * T::lit(0.5)).tan().powi(4)
    }
}

/// Dressed qutrit eigensystem; `eigenvectors[k]` is normalized and belongs
/// to `eigenvalues[k]`, sorted descending.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QutritDressedBasis<T> {
    pub eigenvalues: [T; 3],
    pub eigenvectors: [[T; 3]; 3],
    pub normalizers: [T; 3],
}

/// Harmonic-ladder dressed basis: dark state `v₀ = (−√2|g⟩ + |f⟩)/√3` at 0
/// and `v± = (|g⟩/√2 ± √(3/2)|e⟩ + |f⟩)/√3` at `±√3Ω₁/2`.
pub fn qutrit_dark_basis<T: Real>(omega1: T) -> QutritDressedBasis<T> {
    let s2 = T::lit(2.0).sqrt();
    let s3 = T::lit(3.0).sqrt();
    let h = T::lit(0.5).sqrt() / s3;
    let m = T::lit(1.5).sqrt() / s3;
    let l = s3 * omega1 * T::lit(0.5);
    QutritDressedBasis {
        eigenvalues: [l, T::zero(), -l],
        eigenvectors: [[h, m, T::one() / s3], [-s2 / s3, T::zero(), T::one() / s3], [h, -m, T::one() / s3]],
        normalizers: [T::one(); 3],
    }
}

/// Coefficients `(a, b, c)` of `λ³ + aλ² + bλ + c` for the cascade matrix
/// `Ω₁σ₁x/2 + Ω₂σ₂x/2 + Σ|f⟩⟨f|/2`.
pub fn cubic_coefficients<T: Real>(omega1: T, omega2: T, sigma: T) -> (T, T, T) {
    let a = -sigma * T::lit(0.5);
    let b = -(omega1 * omega1 + omega2 * omega2) * T::lit(0.25);
    let c = sigma * omega1 * omega1 / T::lit(8.0);
    (a, b, c)
}

/// Trigonometric solution of the dressed cubic with closed-form eigenvectors
/// `v ∝ (Ω₁(λ−Σ/2), 2λ(λ−Σ/2), λΩ₂)`.
pub fn cubic_dressed_eigs<T: Real>(omega1: T, omega2: T, sigma: T) -> Result<QutritDressedBasis<T>, OracleError> {
    let (a, b, c) = cubic_coefficients(omega1, omega2, sigma);
    let p2 = a * a - T::lit(3.0) * b;
    let scale = omega1.abs().max(omega2.abs()).max(sigma.abs());
    if !(p2 > T::epsilon() * scale * scale) {
        return Err(OracleError::Degenerate);
    }
    let p = p2.sqrt();
    let mut cos_t = -(T::lit(27.0) * c + T::lit(2.0) * a * a * a - T::lit(9.0) * a * b) / (T::lit(2.0) * p * p * p);
    let tol = T::lit(1e-9);
    if cos_t.abs() > T::one() + tol {
        return Err(OracleError::Precondition(format!("cos(theta) = {cos_t} outside [-1, 1]")));
    }
    cos_t = cos_t.max(-T::one()).min(T::one());
    let th = cos_t.acos();
    let two_pi = T::TAU();
    let mut lam = [T::zero(); 3];
    for (k, l) in lam.iter_mut().enumerate() {
        *l = -a / T::lit(3.0) + T::lit(2.0) * p / T::lit(3.0) * ((th - two_pi * T::from_usize_lossy(k)) / T::lit(3.0)).cos();
    }
    lam.sort_by(|x, y| y.partial_cmp(x).expect("finite eigenvalues"));
    let half_s = sigma * T::lit(0.5);
    let mut vecs = [[T::zero(); 3]; 3];
    let mut norms = [T::zero(); 3];
    for k in 0..3 {
        let l = lam[k];
        let mut v = [omega1 * (l - half_s), T::lit(2.0) * l * (l - half_s), l * omega2];
        let mut n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if !(n > T::lit(1e-6) * scale * scale) {
            // Closed form degenerates (e.g. λ = 0 or λ = Σ/2); take the
            // null vector of M − λI from a cross product of its rows.
            v = null_vector(omega1, omega2, sigma, l);
            n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            if !(n > T::zero()) {
                return Err(OracleError::ZeroNorm(k));
            }
        }
        norms[k] = n;
        // Fix the sign so the largest component is positive.
        let big = v.iter().copied().fold(T::zero(), |m, x| if x.abs() > m.abs() { x } else { m });
        let s = if big < T::zero() { -T::one() } else { T::one() };
        vecs[k] = [s * v[0] / n, s * v[1] / n, s * v[2] / n];
    }
    Ok(QutritDressedBasis { eigenvalues: lam, eigenvectors: vecs, normalizers: norms })
}

fn null_vector<T: Real>(o1: T, o2: T, sigma: T, l: T) -> [T; 3] {
    let h = T::lit(0.5);
    let rows = [[-l, o1 * h, T::zero()], [o1 * h, -l, o2 * h], [T::zero(), o2 * h, sigma * h - l]];
    let cross = |a: [T; 3], b: [T; 3]| [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
    let cands = [cross(rows[0], rows[1]), cross(rows[0], rows[2]), cross(rows[1], rows[2])];
    let n2 = |v: &[T; 3]| v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    cands.into_iter().fold([T::zero(); 3], |best, v| if n2(&v) > n2(&best) { v } else { best })
}

/// Conditional displacement rates `g̃_k = ⟨v_k|g₁σ₁₊ + g₂σ₂₊|v_k⟩`, i.e.
/// `2λ(λ−Σ/2)(g₁Ω₁(λ−Σ/2) + g₂λΩ₂)/N²` for the cascade ladder.
pub fn effective_couplings<T: Real>(basis: &QutritDressedBasis<T>, g1: T, g2: T) -> Result<[T; 3], OracleError> {
    effective_couplings_for(basis, g1, g2, Selection::Cascade)
}

/// As [`effective_couplings`] for any selection rule.
pub fn effective_couplings_for<T: Real>(basis: &QutritDressedBasis<T>, g1: T, g2: T, selection: Selection) -> Result<[T; 3], OracleError> {
    let [(u1, l1), (u2, l2)] = selection.transitions();
    let mut out = [T::zero(); 3];
    for (k, v) in basis.eigenvectors.iter().enumerate() {
        let n = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        if !(n > T::zero()) {
            return Err(OracleError::ZeroNorm(k));
        }
        out[k] = (g1 * v[u1] * v[l1] + g2 * v[u2] * v[l2]) / n;
    }
    Ok(out)
}

/// Dressed-qutrit conditional amplitude for rate `g̃`: `−g̃(e^{iδt}−1)/δ`.
pub fn alpha_dressed<T: Real>(t: T, g_eff: T, delta: T) -> Cx<T> {
    alpha_resonant(t, g_eff, delta) * T::lit(2.0)
}

/// Photon number of a freely growing cat under resonator loss,
/// `g²Ω²t²e^{−κt}/4ε²` (Ω/ε = 1 on resonance).
pub fn photon_envelope<T: Real>(t: T, g: T, omega: T, detuning: T, kappa: T) -> T {
    let ratio = if detuning == T::zero() {
        T::one()
    } else {
        let eps = omega.hypot(detuning);
        omega * omega / (eps * eps)
    };
    g * g * t * t * (-kappa * t).exp() * ratio * T::lit(0.25)
}

/// Time of the envelope maximum, `2/κ` (infinite without loss).
pub fn photon_envelope_peak_time<T: Real>(kappa: T) -> T {
    if kappa > T::zero() {
        T::lit(2.0) / kappa
    } else {
        T::infinity()
    }
}

/// Cat size reached by the qubit-cavity mapping protocol,
/// `(15/2)(χt − π)`, zero before onset.
pub fn qcmap_cat_size<T: Real>(chi: T, t: T) -> T {
    (T::lit(7.5) * (chi * t - T::PI())).max(T::zero())
}

/// Time after which `g²t²/4` stays above the mapping-protocol size; `None`
/// when it is never overtaken.
pub fn qcmap_crossover<T: Real>(g: T, chi: T) -> Option<T> {
    let qa = g * g * T::lit(0.25);
    let qb = -T::lit(7.5) * chi;
    let qc = T::lit(7.5) * T::PI();
    let disc = qb * qb - T::lit(4.0) * qa * qc;
    let onset = T::PI() / chi;
    if disc < T::zero() || -qb / (qa + qa) <= onset {
        return None;
    }
    Some((-qb + disc.sqrt()) / (qa + qa))
}

/// Initial conditions with closed-form evolution under the effective
/// (strong-driving) models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Recipe<T> {
    /// `|g,0⟩` with a resonant drive.
    QubitResonant(QubitParams<T>),
    /// `|g,0⟩` with a detuned drive.
    QubitDetuned(QubitParams<T>),
    /// `(c_g|g⟩ + c_e|e⟩)|0⟩`, any detuning.
    QubitEncode { params: QubitParams<T>, c_g: Cx<T>, c_e: Cx<T> },
    /// Harmonic qutrit from `|g,0⟩`.
    QutritFromG0(QutritParams<T>),
    /// Harmonic qutrit from `|e,0⟩`.
    QutritFromE0(QutritParams<T>),
    /// Harmonic qutrit from `(c_g|g⟩ + c_e|e⟩)|0⟩`.
    QutritEncode { params: QutritParams<T>, c_g: Cx<T>, c_e: Cx<T> },
    /// Anharmonic qutrit from `Σ c_k|v_k⟩|0⟩` in the cubic dressed basis.
    ArbitraryAnharmonic { params: QutritParams<T>, coeffs: [Cx<T>; 3] },
}

/// Analytic joint state at time `t`, in the interaction picture of the
/// dressed free Hamiltonian, on an `N = fock_cutoff` resonator.
pub fn analytic_state<T: Real>(recipe: &Recipe<T>, t: T, fock_cutoff: usize) -> Result<QuantumState<T>, OracleError> {
    match *recipe {
        Recipe::QubitResonant(p) => {
            if p.atom_detuning() != T::zero() {
                return Err(OracleError::Precondition("resonant recipe needs Delta = 0".into()));
            }
            qubit_state(&p, re(T::one()), czero(), t, fock_cutoff)
        }
        Recipe::QubitDetuned(p) => qubit_state(&p, re(T::one()), czero(), t, fock_cutoff),
        Recipe::QubitEncode { params, c_g, c_e } => qubit_state(&params, c_g, c_e, t, fock_cutoff),
        Recipe::QutritFromG0(p) => harmonic_qutrit(&p, [re(T::one()), czero(), czero()], t, fock_cutoff),
        Recipe::QutritFromE0(p) => harmonic_qutrit(&p, [czero(), re(T::one()), czero()], t, fock_cutoff),
        Recipe::QutritEncode { params, c_g, c_e } => harmonic_qutrit(&params, [c_g, c_e, czero()], t, fock_cutoff),
        Recipe::ArbitraryAnharmonic { params, coeffs } => {
            if params.selection != Selection::Cascade {
                return Err(OracleError::Precondition("cubic dressed basis is derived for the cascade ladder".into()));
            }
            let basis = cubic_dressed_eigs(params.drive1, params.drive2, params.sigma())?;
            let gk = effective_couplings(&basis, params.g1, params.g2)?;
            dressed_superposition(&basis, &gk, coeffs, params.resonator_detuning(), t, fock_cutoff)
        }
    }
}

fn qubit_state<T: Real>(p: &QubitParams<T>, c_g: Cx<T>, c_e: Cx<T>, t: T, nf: usize) -> Result<QuantumState<T>, OracleError> {
    let b = DressedQubitBasis::from_params(p)?;
    let alpha = alpha_detuned(t, p.g, p.drive, p.atom_detuning(), p.resonator_detuning())?;
    check_displacement_cutoff(alpha, nf)?;
    let norm = (c_g.norm_sqr() + c_e.norm_sqr()).sqrt();
    let (c_g, c_e) = (c_g / norm, c_e / norm);
    let kp = c_g * b.plus_state[0] + c_e * b.plus_state[1];
    let km = c_g * b.minus_state[0] + c_e * b.minus_state[1];
    let ap = coherent_amplitudes(alpha, nf);
    let am = coherent_amplitudes(-alpha, nf);
    let space = make_space(2, nf)?;
    let mut v = vec![czero(); space.dim()];
    for a in 0..2 {
        for n in 0..nf {
            v[space.index(a, n)] = ap[n] * kp * b.plus_state[a] + am[n] * km * b.minus_state[a];
        }
    }
    Ok(QuantumState::from_parts(StateData::Pure(v), space))
}

fn harmonic_qutrit<T: Real>(p: &QutritParams<T>, atom: [Cx<T>; 3], t: T, nf: usize) -> Result<QuantumState<T>, OracleError> {
    if p.mode != QutritMode::HarmonicToy || p.selection != Selection::Cascade {
        return Err(OracleError::Precondition("dark-state recipes need the harmonic cascade qutrit".into()));
    }
    let basis = qutrit_dark_basis(p.drive1);
    let gk = effective_couplings(&basis, p.g1, p.g2)?;
    let norm = atom.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
    let mut coeffs = [czero(); 3];
    for (k, v) in basis.eigenvectors.iter().enumerate() {
        coeffs[k] = (0..3).fold(czero(), |acc, a| acc + atom[a] * v[a]) / norm;
    }
    dressed_superposition(&basis, &gk, coeffs, p.resonator_detuning(), t, nf)
}

/// `Σ_k c_k |v_k⟩|α_k⟩` with `α_k = −g̃_k(e^{iδt}−1)/δ`.
fn dressed_superposition<T: Real>(
    basis: &QutritDressedBasis<T>,
    gk: &[T; 3],
    coeffs: [Cx<T>; 3],
    delta: T,
    t: T,
    nf: usize,
) -> Result<QuantumState<T>, OracleError> {
    let norm = coeffs.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
    let space = make_space(3, nf)?;
    let mut v = vec![czero(); space.dim()];
    for k in 0..3 {
        let alpha = alpha_dressed(t, gk[k], delta);
        check_displacement_cutoff(alpha, nf)?;
        let amp = coherent_amplitudes(alpha, nf);
        let ck = coeffs[k] / norm;
        for a in 0..3 {
            let w = ck * basis.eigenvectors[k][a];
            for n in 0..nf {
                v[space.index(a, n)] += w * amp[n];
            }
        }
    }
    Ok(QuantumState::from_parts(StateData::Pure(v), space))
}

/// Normalized even/odd cat `(|α⟩ ± |−α⟩)/√(2(1 ± e^{−2|α|²}))` on a
/// resonator space.
pub fn cat_state<T: Real>(alpha: Cx<T>, odd: bool, fock_cutoff: usize) -> Result<QuantumState<T>, OracleError> {
    check_displacement_cutoff(alpha, fock_cutoff)?;
    let s = if odd { -T::one() } else { T::one() };
    let ov = (-T::lit(2.0) * alpha.norm_sqr()).exp();
    let nrm = (T::lit(2.0) * (T::one() + s * ov)).sqrt();
    if !(nrm > T::zero()) {
        return Err(OracleError::Precondition("odd cat with alpha = 0 has no amplitude".into()));
    }
    let a = coherent_amplitudes(alpha, fock_cutoff);
    let b = coherent_amplitudes(-alpha, fock_cutoff);
    let v = a.iter().zip(&b).map(|(x, y)| (*x + *y * s) / nrm).collect();
    Ok(QuantumState::from_parts(StateData::Pure(v), crate::hilbert::SpaceDescriptor::resonator(fock_cutoff)?))
}

/// `(4|0⟩ + |α⟩ + |−α⟩)` normalized: the `|g⟩`-conditioned dark-state cat.
pub fn three_component_state<T: Real>(alpha: Cx<T>, fock_cutoff: usize) -> Result<QuantumState<T>, OracleError> {
    check_displacement_cutoff(alpha, fock_cutoff)?;
    let a = coherent_amplitudes(alpha, fock_cutoff);
    let b = coherent_amplitudes(-alpha, fock_cutoff);
    let mut v: Vec<Cx<T>> = a.iter().zip(&b).map(|(x, y)| *x + *y).collect();
    v[0] += re(T::lit(4.0));
    Ok(QuantumState::pure_normalized(v, crate::hilbert::SpaceDescriptor::resonator(fock_cutoff)?)?)
}

/// Convenience: `−i` as a complex number, the direction of resonant growth.
pub fn growth_direction<T: Real>() -> Cx<T> {
    -imag_unit::<T>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{parity, project_atom, AtomBasis};
    use crate::linalg::{hermitian_eigen, CMatrix};
    use crate::models::qutrit_drive_matrix;
    use std::f64::consts::PI;

    const TAU: f64 = 2.0 * PI;

    #[test]
    fn alpha_limits() {
        let a = alpha_resonant(50e-9, TAU * 20e6, 0.0);
        assert!((a - cx(0.0, -PI)).norm() < 1e-12);
        assert_eq!(alpha_resonant(0.0, 1.0, 3.0), cx(0.0, 0.0));
        let a = alpha_resonant(2.0 * PI, 1.0, 1.0);
        assert!(a.norm() < 1e-15);
        // continuity across the series branch
        let (g, t) = (1.3, 2.0);
        let lo = alpha_resonant(t, g, 0.999e-6 / t);
        let hi = alpha_resonant(t, g, 1.001e-6 / t);
        assert!((lo - hi).norm() < 1e-8);
    }

    #[test]
    fn detuned_scaling() {
        let a = alpha_detuned(1.0f64, 1.0, 3.0, 4.0, 0.0).unwrap();
        assert!((a.norm() - 0.6 * 0.5).abs() < 1e-15);
        let (o, d) = (TAU * 2e9, TAU * 500e6);
        let s = alpha_detuned(1.0, 1.0, o, d, 0.0).unwrap().norm() / 0.5;
        assert!((s - 0.970_14).abs() < 1e-5);
        assert!((s * s - 0.941_18).abs() < 1e-5);
        assert_eq!(alpha_detuned(0.3, 2.0, 5.0, 0.0, 0.1).unwrap(), alpha_resonant(0.3, 2.0, 0.1));
        let near = alpha_detuned(0.3, 2.0, 5.0, 5e-6, 0.1).unwrap();
        assert!((near - alpha_resonant(0.3, 2.0, 0.1)).norm() / near.norm() < 1e-6);
        assert_eq!(alpha_detuned(1.0, 1.0, 0.0, 0.0, 0.0), Err(OracleError::NoSplitting));
    }

    #[test]
    fn dressed_qubit_basis_diagonalizes() {
        let (o, d) = (3.0f64, -1.2);
        let b = DressedQubitBasis::new(o, d).unwrap();
        let h = [[-d / 2.0, o / 2.0], [o / 2.0, d / 2.0]];
        for (v, l) in [(b.plus_state, b.epsilon / 2.0), (b.minus_state, -b.epsilon / 2.0)] {
            for r in 0..2 {
                assert!((h[r][0] * v[0] + h[r][1] * v[1] - l * v[r]).abs() < 1e-12);
            }
        }
        let dot = b.plus_state[0] * b.minus_state[0] + b.plus_state[1] * b.minus_state[1];
        assert!(dot.abs() < 1e-12);
        assert!((DressedQubitBasis::new(1.0, 0.0).unwrap().theta - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn fig2_lobe_ratio() {
        let b = DressedQubitBasis::new(TAU * 2e9, TAU * 500e6).unwrap();
        assert!((b.ground_lobe_ratio() - 0.371_7).abs() < 1e-4);
    }

    fn qubit(delta_a: f64) -> QubitParams<f64> {
        let wd = TAU * 4.5e9;
        QubitParams::new(wd + delta_a, wd, wd, TAU * 20e6, TAU * 2e9).unwrap()
    }

    #[test]
    fn resonant_recipe_projects_to_odd_cat() {
        let p = qubit(0.0);
        let t = 1.0 / 20e6;
        let s0 = analytic_state(&Recipe::QubitResonant(p), 0.0, 40).unwrap();
        assert!((s0.as_vector().unwrap()[0] - cx(1.0, 0.0)).norm() < 1e-15);
        let s = analytic_state(&Recipe::QubitResonant(p), t, 40).unwrap();
        let out = project_atom(&s, &AtomBasis::Level(1)).unwrap();
        let cond = out.conditional.unwrap();
        assert!((parity(&cond) + 1.0).abs() < 1e-6);
        assert!((out.probability - 0.5).abs() < 1e-3);
    }

    #[test]
    fn encode_recipe() {
        let p = qubit(0.0);
        let (cg, ce) = (cx(0.6, 0.0), cx(0.0, 0.8));
        let s = analytic_state(&Recipe::QubitEncode { params: p, c_g: cg, c_e: ce }, 1.0 / 20e6, 40).unwrap();
        // |g⟩ branch: ((c_g+c_e)|α⟩ + (c_g−c_e)|−α⟩)/2
        let out = project_atom(&s, &AtomBasis::Level(0)).unwrap();
        let alpha = cx(0.0, -PI);
        let (wp, wm, _) = crate::analysis::cat_lobe_weights(&out.conditional.unwrap(), alpha).unwrap();
        assert!((wp / wm - 1.0).abs() < 1e-6);
    }

    #[test]
    fn dark_basis_structure() {
        let o1 = 2.5;
        let b = qutrit_dark_basis(o1);
        let m = qutrit_drive_matrix(o1, 2f64.sqrt() * o1, 0.0, Selection::Cascade);
        for k in 0..3 {
            let v = b.eigenvectors[k];
            for r in 0..3 {
                let mv: f64 = (0..3).map(|c| m[(r, c)].re * v[c]).sum();
                assert!((mv - b.eigenvalues[k] * v[r]).abs() < 1e-12);
            }
            for j in 0..3 {
                let d: f64 = (0..3).map(|a| v[a] * b.eigenvectors[j][a]).sum();
                assert!((d - if j == k { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
        assert_eq!(b.eigenvectors[1][1], 0.0);
    }

    #[test]
    fn harmonic_couplings() {
        let g1 = 0.7;
        let b = qutrit_dark_basis(3.0);
        let gk = effective_couplings(&b, g1, 2f64.sqrt() * g1).unwrap();
        let want = 3f64.sqrt() * g1 / 2.0;
        assert!((gk[0] - want).abs() < 1e-12);
        assert!(gk[1].abs() < 1e-12);
        assert!((gk[2] + want).abs() < 1e-12);
        assert_eq!(effective_couplings(&b, 0.0, 0.0).unwrap(), [0.0; 3]);
    }

    #[test]
    fn cubic_matches_dense_and_vieta() {
        let b = cubic_dressed_eigs(2.0f64, 0.0, 0.0).unwrap();
        for (l, w) in b.eigenvalues.iter().zip([1.0, 0.0, -1.0]) {
            assert!((l - w).abs() < 1e-12);
        }
        let (o1, o2, s) = (1.3f64, 0.9, -2.2);
        let b = cubic_dressed_eigs(o1, o2, s).unwrap();
        let m = qutrit_drive_matrix(o1, o2, s, Selection::Cascade);
        let (vals, _) = hermitian_eigen(&m);
        for k in 0..3 {
            assert!((b.eigenvalues[k] - vals[2 - k]).abs() < 1e-12);
        }
        let (a, bb, c) = cubic_coefficients(o1, o2, s);
        let sum: f64 = b.eigenvalues.iter().sum();
        let prod: f64 = b.eigenvalues.iter().product();
        assert!((sum + a).abs() < 1e-12 && (prod + c).abs() < 1e-12);
        for l in b.eigenvalues {
            assert!((l * l * l + a * l * l + bb * l + c).abs() < 1e-12);
        }
        assert_eq!(cubic_dressed_eigs(0.0, 0.0, 0.0), Err(OracleError::Degenerate));
    }

    #[test]
    fn cubic_couplings_match_sandwich() {
        let (o1, o2, s, g1, g2) = (1.1, 0.7, 0.4, 0.05, 0.05 * 0.7 / 1.1);
        let b = cubic_dressed_eigs(o1, o2, s).unwrap();
        let gk = effective_couplings(&b, g1, g2).unwrap();
        let (r1, r2) = crate::hilbert::atom_raising::<f64>(3, Selection::Cascade);
        let mut x = r1.scale_real(g1);
        x.axpy(cx(g2, 0.0), &r2.unwrap());
        for (k, vk) in b.eigenvectors.iter().enumerate() {
            let v: Vec<Cx<f64>> = vk.iter().map(|z| cx(*z, 0.0)).collect();
            let sand = crate::linalg::inner(&v, &x.mul_vec(&v)).re;
            assert!((sand - gk[k]).abs() < 1e-12);
            // closed form with N_k
            let l = b.eigenvalues[k];
            let nk = b.normalizers[k];
            let closed = 2.0 * l * (l - s / 2.0) * (g1 * o1 * (l - s / 2.0) + g2 * l * o2) / (nk * nk);
            assert!((closed.abs() - gk[k].abs()).abs() < 1e-12);
        }
    }

    #[test]
    fn qutrit_g0_probabilities() {
        let wd = TAU * 5e9;
        let g1 = TAU * 20e6;
        let o1 = 50.0 * g1;
        let p = QutritParams::new(wd, wd, wd, wd, g1, 2f64.sqrt() * g1, o1, 2f64.sqrt() * o1, Selection::Cascade, QutritMode::HarmonicToy)
            .unwrap();
        let t = 0.61 / 20e6;
        let s = analytic_state(&Recipe::QutritFromG0(p), t, 40).unwrap();
        let alpha = alpha_dressed(t, 3f64.sqrt() * g1 / 2.0, 0.0);
        let pe = project_atom(&s, &AtomBasis::Level(1)).unwrap().probability;
        let want = (1.0 - (-2.0 * alpha.norm_sqr()).exp()) / 6.0;
        assert!((pe - want).abs() < 1e-9, "{pe} vs {want}");
        let g = project_atom(&s, &AtomBasis::Level(0)).unwrap().conditional.unwrap();
        let f = crate::analysis::fidelity(&g, &three_component_state(alpha, 40).unwrap()).unwrap();
        assert!(f > 1.0 - 1e-9);
        let se = analytic_state(&Recipe::QutritFromE0(p), t, 40).unwrap();
        let signs = [-1.0, 1.0, -1.0];
        for (lvl, sgn) in signs.iter().enumerate() {
            let c = project_atom(&se, &AtomBasis::Level(lvl)).unwrap().conditional.unwrap();
            assert!((parity(&c) - sgn).abs() < 1e-6);
        }
    }

    #[test]
    fn envelope_values() {
        let g = TAU * 20e6;
        assert!((photon_envelope(1.0 / 20e6, g, 1.0, 0.0, 0.0) - PI * PI).abs() < 1e-10);
        let s = photon_envelope(50e-9, g, 1.0, 0.0, 500e3) / photon_envelope(50e-9, g, 1.0, 0.0, 0.0);
        assert!((s - 0.975_31).abs() < 1e-5);
        assert!((photon_envelope_peak_time(500e3f64) - 4e-6).abs() < 1e-18);
        assert!(photon_envelope_peak_time(0.0f64).is_infinite());
    }

    #[test]
    fn qcmap() {
        assert_eq!(qcmap_cat_size(1.0, PI), 0.0);
        assert!((qcmap_cat_size(1.0, PI + 1.0) - 7.5).abs() < 1e-12);
        assert_eq!(qcmap_cat_size(1.0, 0.5), 0.0);
        let (g, chi) = (0.5f64, 1.0);
        let t = qcmap_crossover(g, chi).unwrap();
        assert!((g * g * t * t / 4.0 - qcmap_cat_size(chi, t)).abs() < 1e-9);
        assert!(qcmap_crossover(10.0, 1.0).is_none());
    }

    #[test]
    fn cat_normalization_exact() {
        let c = cat_state(cx(0.3f64, 0.1), true, 30).unwrap();
        assert!((c.norm_sqr() - 1.0).abs() < 1e-12);
        let _ = CMatrix::<f64>::identity(1);
    }
}
