//! Observables on simulated or analytic states: atom-conditioned resonator
//! states, photon parity, Wigner grids, fidelities and cat lobe weights.

use crate::dynamics::{evolve_schrodinger, DynamicsError, IntegratorConfig};
use crate::hilbert::{check_displacement_cutoff, coherent_amplitudes, HilbertError, Operator, QuantumState, SpaceDescriptor, StateData};
use crate::linalg::{self, psd_sqrt, CMatrix};
use crate::models::TimeDependentHamiltonian;
use crate::scalar::{czero, Cx, Real};
use rayon::prelude::*;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalysisError {
    #[error("expected a resonator-only state")]
    NotResonator,
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("atom vector has {got} entries, atom has {levels} levels")]
    AtomVector { got: usize, levels: usize },
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

pub fn expectation<T: Real>(state: &QuantumState<T>, op: &Operator<T>) -> Result<T, AnalysisError> {
    Ok(state.expectation(op)?)
}

/// Atomic measurement basis element.
#[derive(Debug, Clone, PartialEq)]
pub enum AtomBasis<T> {
    Level(usize),
    Vector(Vec<Cx<T>>),
}

/// Outcome of projecting the atom: probability and the normalized
/// resonator state (absent when the probability is below 1e-12).
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementOutcome<T> {
    pub probability: T,
    pub conditional: Option<QuantumState<T>>,
}

pub fn project_atom<T: Real>(state: &QuantumState<T>, basis: &AtomBasis<T>) -> Result<MeasurementOutcome<T>, AnalysisError> {
    let space = state.space();
    let levels = space.atom_levels();
    if space.is_resonator_only() {
        return Err(AnalysisError::AtomVector { got: 0, levels: 0 });
    }
    let c: Vec<Cx<T>> = match basis {
        AtomBasis::Level(l) => {
            if *l >= levels {
                return Err(HilbertError::NoSuchLevel { level: *l, levels }.into());
            }
            (0..levels).map(|k| if k == *l { Cx::new(T::one(), T::zero()) } else { czero() }).collect()
        }
        AtomBasis::Vector(v) => {
            if v.len() != levels {
                return Err(AnalysisError::AtomVector { got: v.len(), levels });
            }
            let n = linalg::norm(v);
            v.iter().map(|z| *z / n).collect()
        }
    };
    let nf = space.fock_cutoff();
    let rspace = space.resonator_factor();
    let (p, data) = match state.data() {
        StateData::Pure(psi) => {
            let mut r = vec![czero(); nf];
            for (a, ca) in c.iter().enumerate() {
                let cc = ca.conj();
                for n in 0..nf {
                    r[n] += cc * psi[space.index(a, n)];
                }
            }
            let p: T = r.iter().map(|z| z.norm_sqr()).sum();
            (p, StateData::Pure(r))
        }
        StateData::Mixed(rho) => {
            let mut r = CMatrix::zeros(nf, nf);
            for (a, ca) in c.iter().enumerate() {
                for (b, cb) in c.iter().enumerate() {
                    let w = ca.conj() * *cb;
                    if w == czero() {
                        continue;
                    }
                    for n in 0..nf {
                        for m in 0..nf {
                            r[(n, m)] += w * rho[(space.index(a, n), space.index(b, m))];
                        }
                    }
                }
            }
            let p = r.trace().re;
            (p, StateData::Mixed(r))
        }
    };
    if !(p > T::lit(1e-12)) {
        return Ok(MeasurementOutcome { probability: p.max(T::zero()), conditional: None });
    }
    let data = match data {
        StateData::Pure(v) => {
            let s = p.sqrt();
            StateData::Pure(v.into_iter().map(|z| z / s).collect())
        }
        StateData::Mixed(m) => {
            let mut m = m.scale_real(T::one() / p);
            m.symmetrize();
            StateData::Mixed(m)
        }
    };
    let cond = QuantumState::from_parts(data, rspace);
    Ok(MeasurementOutcome { probability: p, conditional: Some(cond) })
}

/// Partial trace over the atom.
pub fn reduced_resonator<T: Real>(state: &QuantumState<T>) -> QuantumState<T> {
    let space = state.space();
    if space.is_resonator_only() {
        return state.clone();
    }
    let nf = space.fock_cutoff();
    let rho = state.to_density();
    let mut r = CMatrix::zeros(nf, nf);
    for a in 0..space.atom_levels() {
        for n in 0..nf {
            for m in 0..nf {
                r[(n, m)] += rho[(space.index(a, n), space.index(a, m))];
            }
        }
    }
    QuantumState::from_parts(StateData::Mixed(r), space.resonator_factor())
}

/// Partial trace over the resonator (atom-sized density matrix).
pub fn reduced_atom<T: Real>(state: &QuantumState<T>) -> CMatrix<T> {
    let space = state.space();
    let nf = space.fock_cutoff();
    let rho = state.to_density();
    let l = space.atom_levels();
    CMatrix::from_fn(l, l, |a, b| (0..nf).fold(czero(), |acc, n| acc + rho[(space.index(a, n), space.index(b, n))]))
}

/// Photon-number parity `Tr[ρ e^{iπ a†a}]` (summed over atom levels).
pub fn parity<T: Real>(state: &QuantumState<T>) -> T {
    let nf = state.space().fock_cutoff();
    (0..nf)
        .map(|n| {
            let p = state.fock_population(n);
            if n % 2 == 0 {
                p
            } else {
                -p
            }
        })
        .sum()
}

/// Rectangular phase-space grid; points include both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec<T> {
    pub re_min: T,
    pub re_max: T,
    pub im_min: T,
    pub im_max: T,
    pub points_re: usize,
    pub points_im: usize,
}

/// Default grid resolution per axis.
pub const DEFAULT_GRID_POINTS: usize = 161;

impl<T: Real> GridSpec<T> {
    pub fn square(half_extent: T, points: usize) -> Self {
        Self { re_min: -half_extent, re_max: half_extent, im_min: -half_extent, im_max: half_extent, points_re: points, points_im: points }
    }

    /// Square grid covering 1.25 |α_max| on each side.
    pub fn for_alpha(alpha_max: T, points: usize) -> Self {
        Self::square(T::lit(1.25) * alpha_max.abs().max(T::lit(0.8)), points)
    }

    fn validate(&self) -> Result<(), AnalysisError> {
        if self.points_re < 2 || self.points_im < 2 {
            return Err(AnalysisError::Grid("need at least two points per axis".into()));
        }
        if !(self.re_max > self.re_min) || !(self.im_max > self.im_min) {
            return Err(AnalysisError::Grid("empty range".into()));
        }
        Ok(())
    }

    fn axis(min: T, max: T, n: usize) -> Vec<T> {
        let step = (max - min) / T::from_usize_lossy(n - 1);
        (0..n).map(|k| if k + 1 == n { max } else { min + step * T::from_usize_lossy(k) }).collect()
    }
}

/// Wigner function on a grid, `W(α) = (1/π) Tr[ρ D(2α) e^{iπa†a}]`, so
/// values lie in `[−1/π, 1/π]`. `values` is row-major with the imaginary
/// axis as rows.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid<T> {
    pub re_axis: Vec<T>,
    pub im_axis: Vec<T>,
    pub values: Vec<T>,
    pub convention_scale: T,
}

impl<T: Real> WignerGrid<T> {
    pub fn value(&self, im_index: usize, re_index: usize) -> T {
        self.values[im_index * self.re_axis.len() + re_index]
    }

    /// Trapezoid-free Riemann sum `∫W d²α` (cell area times sum).
    pub fn integral(&self) -> T {
        let dx = (self.re_axis[self.re_axis.len() - 1] - self.re_axis[0]) / T::from_usize_lossy(self.re_axis.len() - 1);
        let dy = (self.im_axis[self.im_axis.len() - 1] - self.im_axis[0]) / T::from_usize_lossy(self.im_axis.len() - 1);
        self.values.iter().copied().sum::<T>() * dx * dy
    }

    pub fn min_max(&self) -> (T, T) {
        self.values.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), v| (lo.min(*v), hi.max(*v)))
    }
}

fn resonator_density<T: Real>(state: &QuantumState<T>) -> CMatrix<T> {
    reduced_resonator(state).to_density()
}

/// Wigner function of the resonator (the atom is traced out first).
///
/// Uses the exact matrix elements of the displaced parity in the Fock basis
/// (associated Laguerre polynomials), so no displacement operator is ever
/// truncated; accuracy is limited only by the state's own truncation,
/// which is checked up front.
pub fn wigner<T: Real>(state: &QuantumState<T>, grid: &GridSpec<T>) -> Result<WignerGrid<T>, AnalysisError> {
    grid.validate()?;
    let red = reduced_resonator(state);
    red.check_cutoff()?;
    let rho = resonator_density(state);
    let nf = rho.rows();
    let rho64: Vec<(f64, f64)> = rho.as_slice().iter().map(|z| (z.re.as_f64(), z.im.as_f64())).collect();
    let ln_fact: Vec<f64> = std::iter::once(0.0)
        .chain((1..=nf).scan(0.0, |acc, k| {
            *acc += (k as f64).ln();
            Some(*acc)
        }))
        .collect();
    let re_axis = GridSpec::axis(grid.re_min, grid.re_max, grid.points_re);
    let im_axis = GridSpec::axis(grid.im_min, grid.im_max, grid.points_im);
    let re64: Vec<f64> = re_axis.iter().map(|x| x.as_f64()).collect();
    let (rho64, ln_fact) = (&rho64, &ln_fact);
    let values: Vec<T> = im_axis
        .par_iter()
        .flat_map_iter(|y| {
            let y = y.as_f64();
            re64.iter().map(move |x| T::lit(wigner_point(rho64, nf, ln_fact, *x, y))).collect::<Vec<_>>()
        })
        .collect();
    Ok(WignerGrid { re_axis, im_axis, values, convention_scale: T::FRAC_1_PI() })
}

/// Wigner value at one point (f64 internally for range safety).
fn wigner_point(rho: &[(f64, f64)], nf: usize, ln_fact: &[f64], x: f64, y: f64) -> f64 {
    let r2 = x * x + y * y;
    let xl = 4.0 * r2;
    let theta = y.atan2(x);
    let ln2r = if r2 > 0.0 { (2.0 * r2.sqrt()).ln() } else { f64::NEG_INFINITY };
    let mut total = 0.0;
    let mut lag = vec![0.0f64; nf];
    for k in 0..nf {
        // L_n^{(k)}(xl) for n = 0..nf-k by forward recurrence.
        let top = nf - k;
        lag[0] = 1.0;
        if top > 1 {
            lag[1] = 1.0 + k as f64 - xl;
        }
        for n in 1..top.saturating_sub(1) {
            let nn = n as f64;
            lag[n + 1] = ((2.0 * nn + 1.0 + k as f64 - xl) * lag[n] - (nn + k as f64) * lag[n - 1]) / (nn + 1.0);
        }
        let (c, s) = ((k as f64) * theta).cos_sin_pair();
        let mut acc_re = 0.0;
        let mut acc_im = 0.0;
        for n in 0..top {
            let m = n + k;
            let ln_mag = if k == 0 { 0.0 } else { k as f64 * ln2r } - 0.5 * xl + 0.5 * (ln_fact[n] - ln_fact[m]);
            if k > 0 && r2 == 0.0 {
                continue;
            }
            let mag = ln_mag.exp() * lag[n] * if n % 2 == 0 { 1.0 } else { -1.0 };
            // A_{mn} = mag · e^{ikθ}; contributes ρ_{nm} A_{mn}.
            let (pr, pi) = rho[n * nf + m];
            let (ar, ai) = (mag * c, mag * s);
            acc_re += pr * ar - pi * ai;
            acc_im += pr * ai + pi * ar;
        }
        let _ = acc_im;
        total += if k == 0 { acc_re } else { 2.0 * acc_re };
    }
    total / std::f64::consts::PI
}

trait CosSinPair {
    fn cos_sin_pair(self) -> (f64, f64);
}

impl CosSinPair for f64 {
    fn cos_sin_pair(self) -> (f64, f64) {
        (self.cos(), self.sin())
    }
}

/// Fidelity, symmetric and clamped into `[0, 1]`: `|⟨a|b⟩|²`, `⟨ψ|ρ|ψ⟩`,
/// or Uhlmann's `(Tr√(√ρ σ √ρ))²`.
pub fn fidelity<T: Real>(a: &QuantumState<T>, b: &QuantumState<T>) -> Result<T, AnalysisError> {
    if a.space() != b.space() {
        return Err(HilbertError::SpaceMismatch.into());
    }
    let f = match (a.data(), b.data()) {
        (StateData::Pure(x), StateData::Pure(y)) => linalg::inner(x, y).norm_sqr(),
        (StateData::Pure(x), StateData::Mixed(r)) | (StateData::Mixed(r), StateData::Pure(x)) => linalg::inner(x, &r.mul_vec(x)).re,
        (StateData::Mixed(r), StateData::Mixed(s)) => {
            let sr = psd_sqrt(r);
            let m = sr.matmul(s).matmul(&sr);
            let (vals, _) = linalg::hermitian_eigen(&m);
            let tr: T = vals.iter().map(|v| v.max(T::zero()).sqrt()).sum();
            tr * tr
        }
    };
    let tol = T::lit(1e-9);
    if f < -tol || f > T::one() + tol {
        log::warn!("fidelity {f} outside [0, 1] beyond round-off; clamping");
    }
    Ok(f.max(T::zero()).min(T::one()))
}

/// `(⟨α|ρ|α⟩, ⟨−α|ρ|−α⟩, ⟨α|ρ|−α⟩)` for a resonator state.
pub fn cat_lobe_weights<T: Real>(state: &QuantumState<T>, alpha_ref: Cx<T>) -> Result<(T, T, Cx<T>), AnalysisError> {
    if !state.space().is_resonator_only() {
        return Err(AnalysisError::NotResonator);
    }
    let nf = state.space().fock_cutoff();
    check_displacement_cutoff(alpha_ref, nf)?;
    let plus = coherent_amplitudes(alpha_ref, nf);
    let minus = coherent_amplitudes(-alpha_ref, nf);
    let m = |u: &[Cx<T>], v: &[Cx<T>]| match state.data() {
        StateData::Pure(psi) => linalg::inner(u, psi) * linalg::inner(v, psi).conj(),
        StateData::Mixed(r) => linalg::inner(u, &r.mul_vec(v)),
    };
    Ok((m(&plus, &plus).re, m(&minus, &minus).re, m(&plus, &minus)))
}

/// Measurement time aligned to a revival of the driven atom.
///
/// Evolves `initial` under `atom_model` (the same model and frame as the
/// full simulation but with the resonator coupling switched off) across
/// `[t_lo, t_hi]` and returns the sampled time of largest return
/// probability `|⟨ψ₀|ψ(t)⟩|²`; ties go to the time nearest `t_nominal`.
/// The revival fixes the dressed-atom phase (including its Bloch-Siegert
/// shift) that projective measurements in the bare basis depend on.
pub fn dressed_revival_time<T: Real>(
    atom_model: &TimeDependentHamiltonian<T>,
    initial: &QuantumState<T>,
    t_nominal: T,
    t_lo: T,
    t_hi: T,
    dt: T,
) -> Result<(T, T), AnalysisError> {
    let start = t_lo.max(T::zero());
    if !(t_hi > start) {
        return Err(AnalysisError::Grid("revival window is empty".into()));
    }
    let v0 = initial.as_vector().ok_or(AnalysisError::Grid("revival search needs a pure initial state".into()))?.to_vec();
    let cfg = IntegratorConfig { dt: Some(dt), store_states: false, check_cutoff: false, ..IntegratorConfig::default() };
    let lead = if start > T::zero() { evolve_schrodinger(atom_model, initial, &cfg, start, &[])?.final_state } else { initial.clone() };
    let cfg2 = IntegratorConfig { t_start: start, store_states: true, ..cfg };
    let traj = evolve_schrodinger(atom_model, &lead, &cfg2, t_hi, &[])?;
    let mut best = (t_nominal, T::neg_infinity());
    for (t, s) in traj.times.iter().zip(&traj.states) {
        let r = linalg::inner(&v0, s.as_vector().expect("pure")).norm_sqr();
        let better =
            r > best.1 + T::lit(1e-12) || ((r - best.1).abs() <= T::lit(1e-12) && (*t - t_nominal).abs() < (best.0 - t_nominal).abs());
        if better {
            best = (*t, r);
        }
    }
    Ok(best)
}

/// The resonator-only space matching a joint space.
pub fn resonator_space(space: SpaceDescriptor) -> SpaceDescriptor {
    space.resonator_factor()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{coherent_state, displacement, parity_matrix, QuantumState};
    use crate::scalar::cx;
    use std::f64::consts::PI;

    fn res(n: usize) -> SpaceDescriptor {
        SpaceDescriptor::resonator(n).unwrap()
    }

    #[test]
    fn vacuum_wigner_peak() {
        let vac = QuantumState::<f64>::basis(res(10), 0, 0).unwrap();
        let w = wigner(&vac, &GridSpec::square(2.0, 5)).unwrap();
        assert!((w.value(2, 2) - 1.0 / PI).abs() < 1e-14);
        // Gaussian: (1/π) e^{-2|α|²}
        assert!((w.value(2, 3) - (-2.0f64).exp() / PI).abs() < 1e-14);
    }

    #[test]
    fn fock_one_wigner_origin() {
        let one = QuantumState::<f64>::basis(res(10), 0, 1).unwrap();
        let w = wigner(&one, &GridSpec::square(1.0, 3)).unwrap();
        assert!((w.value(1, 1) + 1.0 / PI).abs() < 1e-14);
    }

    /// Independent route: displaced parity built from the truncated
    /// displacement operator (valid well inside the cutoff).
    fn wigner_by_displacement(state: &QuantumState<f64>, alpha: Cx<f64>) -> f64 {
        let nf = state.space().fock_cutoff();
        let d = displacement(alpha * 2.0, res(nf)).unwrap();
        let op = d.matrix().matmul(&parity_matrix(nf));
        let rho = state.to_density();
        rho.matmul(&op).trace().re / PI
    }

    #[test]
    fn wigner_matches_displacement_route() {
        let n = 60;
        let a = coherent_amplitudes(cx(1.1, 0.3), n);
        let b = coherent_amplitudes(cx(-1.1, -0.3), n);
        let v: Vec<Cx<f64>> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
        let cat = QuantumState::pure_normalized(v, res(n)).unwrap();
        let pts = [cx(0.0, 0.0), cx(0.4, -0.2), cx(-0.7, 0.9), cx(1.0, 0.1)];
        for p in pts {
            let g = GridSpec { re_min: p.re, re_max: p.re + 1.0, im_min: p.im, im_max: p.im + 1.0, points_re: 2, points_im: 2 };
            let w = wigner(&cat, &g).unwrap().value(0, 0);
            let want = wigner_by_displacement(&cat, p);
            assert!((w - want).abs() < 1e-10, "{p}: {w} vs {want}");
        }
    }

    #[test]
    fn odd_cat_parity_and_lobes() {
        let n = 40;
        let alpha = cx(0.0, -PI);
        let a = coherent_amplitudes(alpha, n);
        let b = coherent_amplitudes(-alpha, n);
        let v: Vec<Cx<f64>> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
        let cat = QuantumState::pure_normalized(v, res(n)).unwrap();
        assert!((parity(&cat) + 1.0).abs() < 1e-12);
        let (wp, wm, cross) = cat_lobe_weights(&cat, alpha).unwrap();
        assert!((wp - wm).abs() < 1e-12);
        assert!((cross.re + 0.5).abs() < 1e-6 && cross.im.abs() < 1e-9);
        assert!((wp - 0.5).abs() < 1e-6);
        let w = wigner(&cat, &GridSpec::square(1.0, 3)).unwrap();
        assert!((w.value(1, 1) + 1.0 / PI).abs() < 1e-9);
    }

    #[test]
    fn projection_probabilities_sum_to_one() {
        let s = crate::hilbert::make_space(3, 16).unwrap();
        let coh = coherent_state(cx(0.8, 0.1), res(16)).unwrap();
        let st = QuantumState::product(&[cx(0.3, 0.0), cx(0.0, 0.5), cx(0.8, 0.0)], &coh).unwrap();
        assert_eq!(st.space(), s);
        let total: f64 = (0..3).map(|l| project_atom(&st, &AtomBasis::Level(l)).unwrap().probability).sum();
        assert!((total - 1.0).abs() < 1e-12);
        let mixed = st.clone().into_mixed();
        let a = project_atom(&st, &AtomBasis::Level(1)).unwrap();
        let b = project_atom(&mixed, &AtomBasis::Level(1)).unwrap();
        assert!((a.probability - b.probability).abs() < 1e-12);
        let f = fidelity(&a.conditional.unwrap().into_mixed(), &b.conditional.unwrap()).unwrap();
        assert!((f - 1.0).abs() < 1e-9);
    }

    #[test]
    fn zero_probability_outcome() {
        let s = crate::hilbert::make_space(2, 4).unwrap();
        let st = QuantumState::<f64>::basis(s, 0, 0).unwrap();
        let out = project_atom(&st, &AtomBasis::Level(1)).unwrap();
        assert!(out.conditional.is_none());
    }

    #[test]
    fn fidelity_of_orthogonal_and_mixed() {
        let s = res(4);
        let a = QuantumState::<f64>::basis(s, 0, 0).unwrap();
        let b = QuantumState::<f64>::basis(s, 0, 1).unwrap();
        assert_eq!(fidelity(&a, &b).unwrap(), 0.0);
        let m = QuantumState::mixed(CMatrix::from_real_diag(&[0.5, 0.5, 0.0, 0.0]), s).unwrap();
        assert!((fidelity(&a, &m).unwrap() - 0.5).abs() < 1e-14);
        let m2 = QuantumState::mixed(CMatrix::from_real_diag(&[0.25, 0.75, 0.0, 0.0]), s).unwrap();
        let want = (0.5f64 * 0.25).sqrt() + (0.5f64 * 0.75).sqrt();
        assert!((fidelity(&m, &m2).unwrap() - want * want).abs() < 1e-10);
        assert!((fidelity(&m2, &m).unwrap() - want * want).abs() < 1e-10);
    }
}
