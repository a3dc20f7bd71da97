//! Fixed-step RK4 propagation of kets (Schrödinger) and density matrices
//! (Lindblad), sampling observables along the way.

use crate::hilbert::{
    annihilation, atom_operator, atom_transition_ops, expectation_raw, sigma_z, HilbertError, Operator, QuantumState, Selection,
    SpaceDescriptor, StateData,
};
use crate::linalg::{self, CMatrix};
use crate::models::{DecoherenceParams, Snapshot, TimeDependentHamiltonian};
use crate::scalar::{czero, imag_unit, phase, re, Cx, Real};

/// Largest tolerated drift of `‖ψ‖²` or `Tr ρ` from one.
pub const DRIFT_LIMIT: f64 = 1e-5;
/// Most states a trajectory may keep in memory.
pub const MAX_STORED_STATES: usize = 10_000;
/// Memory ceiling for stored density matrices, bytes.
pub const MAX_STORED_BYTES: usize = 4 << 30;
/// Negative eigenvalues of ρ beyond this trigger a warning.
pub const POSITIVITY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DynamicsError {
    #[error("state and Hamiltonian live on different spaces")]
    SpaceMismatch,
    #[error("invalid integrator configuration: {0}")]
    Config(String),
    #[error("time step {dt:e} s exceeds the stability bound {bound:e} s (1/20 of the fastest period)")]
    StepTooLarge { dt: f64, bound: f64 },
    #[error("norm drift {drift:e} at t = {time:e} s with dt = {dt:e} s; reduce the time step")]
    NormDrift { time: f64, drift: f64, dt: f64 },
    #[error("Fock cutoff exceeded at t = {time:e} s: top two levels hold {population:e}")]
    Cutoff { time: f64, population: f64 },
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
}

/// Jump operator `L` with rate `γ`, entering as `γ D(L)ρ`.
#[derive(Debug, Clone)]
pub struct CollapseChannel<T> {
    pub label: String,
    pub operator: Operator<T>,
    pub rate: T,
}

/// Relaxation, dephasing and photon loss for a qubit or qutrit:
/// qubit `γ₁D(σ₋) + (γ_φ/2)D(σz) + κD(a)`; qutrit adds `γ₂D(σ₂₋)` and
/// dephases with `σz + 2|f⟩⟨f|`. Zero rates are omitted.
pub fn standard_channels<T: Real>(
    space: SpaceDescriptor,
    rates: &DecoherenceParams<T>,
    selection: Selection,
) -> Result<Vec<CollapseChannel<T>>, DynamicsError> {
    let ops = atom_transition_ops::<T>(space, selection)?;
    let mut out = Vec::new();
    let mut push = |label: &str, operator: Operator<T>, rate: T| {
        if rate > T::zero() {
            out.push(CollapseChannel { label: label.into(), operator, rate });
        }
    };
    push("relaxation", ops.sigma1_minus, rates.gamma1);
    if let Some(s2) = ops.sigma2_minus {
        push("relaxation (second transition)", s2, rates.gamma2);
    }
    let deph = if space.atom_levels() == 3 {
        let d = CMatrix::from_real_diag(&[-T::one(), T::one(), T::lit(2.0)]);
        atom_operator(space, &d)?
    } else {
        sigma_z(space)
    };
    push("dephasing", deph, rates.gamma_phi * T::lit(0.5));
    push("photon loss", annihilation(space), rates.kappa);
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct Observable<T> {
    pub name: String,
    pub operator: Operator<T>,
}

impl<T: Real> Observable<T> {
    pub fn new(name: impl Into<String>, operator: Operator<T>) -> Self {
        Self { name: name.into(), operator }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorConfig<T> {
    /// Step size in seconds; `None` picks 1/(20 f_max).
    pub dt: Option<T>,
    pub t_start: T,
    /// Record every `sample_stride` steps (the last step is always recorded).
    pub sample_stride: usize,
    pub store_states: bool,
    /// Rescale ψ to unit norm after every step (drift is still reported).
    pub renormalize: bool,
    /// Abort when the top Fock levels become populated.
    pub check_cutoff: bool,
}

impl<T: Real> Default for IntegratorConfig<T> {
    fn default() -> Self {
        Self { dt: None, t_start: T::zero(), sample_stride: 1, store_states: false, renormalize: false, check_cutoff: true }
    }
}

impl<T: Real> IntegratorConfig<T> {
    pub fn with_dt(dt: T) -> Self {
        Self { dt: Some(dt), ..Self::default() }
    }
}

/// Sampled evolution.
#[derive(Debug, Clone)]
pub struct Trajectory<T> {
    pub times: Vec<T>,
    /// Named series; always contains `norm` and `purity`, then the observables.
    pub series: Vec<(String, Vec<T>)>,
    pub states: Vec<QuantumState<T>>,
    pub final_state: QuantumState<T>,
    pub dt: T,
    pub steps: usize,
    pub max_drift: T,
    pub positivity_warnings: usize,
}

impl<T: Real> Trajectory<T> {
    pub fn series(&self, name: &str) -> Option<&[T]> {
        self.series.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }
}

/// 1/(20 f_max) for the given Hamiltonian and extra decay rate bound.
pub fn stability_bound<T: Real>(h: &TimeDependentHamiltonian<T>, extra_rate: T) -> T {
    let w = h.max_angular_frequency() + extra_rate;
    if w <= T::zero() {
        return T::infinity();
    }
    T::lit(2.0) * T::PI() / (T::lit(20.0) * w)
}

struct Plan<T> {
    dt: T,
    steps: usize,
}

fn plan<T: Real>(cfg: &IntegratorConfig<T>, t_end: T, bound: T, dim: usize, mixed: bool) -> Result<Plan<T>, DynamicsError> {
    let span = t_end - cfg.t_start;
    if !(span > T::zero()) || !span.is_finite() {
        return Err(DynamicsError::Config("t_end must lie after t_start".into()));
    }
    if cfg.sample_stride == 0 {
        return Err(DynamicsError::Config("sample_stride must be positive".into()));
    }
    let dt_max = match cfg.dt {
        Some(dt) if !(dt > T::zero()) => return Err(DynamicsError::Config("dt must be positive".into())),
        Some(dt) if dt > bound * T::lit(1.0 + 1e-9) => return Err(DynamicsError::StepTooLarge { dt: dt.as_f64(), bound: bound.as_f64() }),
        Some(dt) => dt,
        None => bound,
    };
    let steps = (span / dt_max - T::lit(1e-9)).ceil().to_usize().unwrap_or(usize::MAX).max(1);
    if cfg.store_states {
        let samples = steps / cfg.sample_stride + 2;
        if samples > MAX_STORED_STATES {
            return Err(DynamicsError::Config(format!("{samples} stored states requested (limit {MAX_STORED_STATES})")));
        }
        let per = if mixed { dim * dim } else { dim } * std::mem::size_of::<Cx<T>>();
        if samples.saturating_mul(per) > MAX_STORED_BYTES {
            return Err(DynamicsError::Config("stored states would exceed the memory ceiling".into()));
        }
    }
    Ok(Plan { dt: span / T::from_usize_lossy(steps), steps })
}

struct Recorder<'a, T> {
    observables: &'a [Observable<T>],
    times: Vec<T>,
    series: Vec<(String, Vec<T>)>,
    states: Vec<QuantumState<T>>,
    store: bool,
    check_cutoff: bool,
    positivity_warnings: usize,
}

impl<'a, T: Real> Recorder<'a, T> {
    fn new(observables: &'a [Observable<T>], cfg: &IntegratorConfig<T>) -> Self {
        let mut series = vec![("norm".to_string(), Vec::new()), ("purity".to_string(), Vec::new())];
        series.extend(observables.iter().map(|o| (o.name.clone(), Vec::new())));
        Self {
            observables,
            times: Vec::new(),
            series,
            states: Vec::new(),
            store: cfg.store_states,
            check_cutoff: cfg.check_cutoff,
            positivity_warnings: 0,
        }
    }

    fn record(&mut self, t: T, state: &QuantumState<T>) -> Result<(), DynamicsError> {
        if self.check_cutoff {
            let top = state.top_fock_population();
            if top > T::lit(crate::hilbert::TOP_LEVEL_TOLERANCE) {
                return Err(DynamicsError::Cutoff { time: t.as_f64(), population: top.as_f64() });
            }
        }
        if let StateData::Mixed(m) = state.data() {
            if !linalg::is_positive_after_shift(m, T::lit(POSITIVITY_TOLERANCE)) {
                self.positivity_warnings += 1;
                log::warn!("density matrix has an eigenvalue below -{POSITIVITY_TOLERANCE:e} at t = {t:e} s");
            }
        }
        self.times.push(t);
        self.series[0].1.push(state.norm_sqr());
        self.series[1].1.push(state.purity());
        for (k, o) in self.observables.iter().enumerate() {
            self.series[k + 2].1.push(expectation_raw(state.data(), o.operator.matrix()));
        }
        if self.store {
            self.states.push(state.clone());
        }
        Ok(())
    }
}

fn check_spaces<T: Real>(h: &TimeDependentHamiltonian<T>, state: &QuantumState<T>, obs: &[Observable<T>]) -> Result<(), DynamicsError> {
    if h.space() != state.space() || obs.iter().any(|o| o.operator.space() != state.space()) {
        return Err(DynamicsError::SpaceMismatch);
    }
    Ok(())
}

/// `out = −i H ψ` from a snapshot.
fn schrodinger_rhs<T: Real>(rows: &[usize], cols: &[usize], snap: &Snapshot<T>, psi: &[Cx<T>], out: &mut [Cx<T>]) {
    out.iter_mut().for_each(|z| *z = czero());
    for (p, v) in snap.vals.iter().enumerate() {
        out[rows[p]] += *v * psi[cols[p]];
    }
    let mi = -imag_unit::<T>();
    out.iter_mut().for_each(|z| *z *= mi);
}

/// Upper bound `Σ γ‖L‖²` on the decay rates a set of channels can produce.
pub fn dissipation_rate_bound<T: Real>(channels: &[CollapseChannel<T>]) -> T {
    channels.iter().map(|c| c.rate * c.operator.matrix().norm_inf().powi(2)).sum()
}

/// Integrates `i dψ/dt = H(t)ψ` with classical RK4.
pub fn evolve_schrodinger<T: Real>(
    h: &TimeDependentHamiltonian<T>,
    psi0: &QuantumState<T>,
    cfg: &IntegratorConfig<T>,
    t_end: T,
    observables: &[Observable<T>],
) -> Result<Trajectory<T>, DynamicsError> {
    check_spaces(h, psi0, observables)?;
    let mut psi = match psi0.data() {
        StateData::Pure(v) => v.clone(),
        StateData::Mixed(_) => return Err(DynamicsError::Config("Schrödinger evolution needs a pure state".into())),
    };
    let space = psi0.space();
    let n = space.dim();
    let Plan { dt, steps } = plan(cfg, t_end, stability_bound(h, T::zero()), n, false)?;
    let (rows, cols) = h.pattern();
    let (rows, cols) = (rows.to_vec(), cols.to_vec());
    let mut rec = Recorder::new(observables, cfg);
    let norm0 = linalg::norm(&psi).powi(2);
    rec.record(cfg.t_start, psi0)?;
    let mut s0 = Snapshot::default();
    let mut s1 = Snapshot::default();
    let mut s2 = Snapshot::default();
    let mut k1 = vec![czero(); n];
    let mut k2 = vec![czero(); n];
    let mut k3 = vec![czero(); n];
    let mut k4 = vec![czero(); n];
    let mut tmp = vec![czero(); n];
    let half = T::lit(0.5);
    let sixth = dt / T::lit(6.0);
    let mut max_drift = T::zero();
    for step in 1..=steps {
        let t = cfg.t_start + dt * T::from_usize_lossy(step - 1);
        h.snapshot(t, &mut s0);
        h.snapshot(t + dt * half, &mut s1);
        h.snapshot(t + dt, &mut s2);
        schrodinger_rhs(&rows, &cols, &s0, &psi, &mut k1);
        for i in 0..n {
            tmp[i] = psi[i] + k1[i] * (dt * half);
        }
        schrodinger_rhs(&rows, &cols, &s1, &tmp, &mut k2);
        for i in 0..n {
            tmp[i] = psi[i] + k2[i] * (dt * half);
        }
        schrodinger_rhs(&rows, &cols, &s1, &tmp, &mut k3);
        for i in 0..n {
            tmp[i] = psi[i] + k3[i] * dt;
        }
        schrodinger_rhs(&rows, &cols, &s2, &tmp, &mut k4);
        for i in 0..n {
            psi[i] += (k1[i] + (k2[i] + k3[i]) * T::lit(2.0) + k4[i]) * sixth;
        }
        let nrm = linalg::norm(&psi).powi(2);
        let drift = (nrm - norm0).abs();
        max_drift = max_drift.max(drift);
        let t_now = cfg.t_start + dt * T::from_usize_lossy(step);
        if drift > T::lit(DRIFT_LIMIT) {
            return Err(DynamicsError::NormDrift { time: t_now.as_f64(), drift: drift.as_f64(), dt: dt.as_f64() });
        }
        if cfg.renormalize {
            let s = (norm0 / nrm).sqrt();
            psi.iter_mut().for_each(|z| *z *= s);
        }
        if step % cfg.sample_stride == 0 || step == steps {
            rec.record(t_now, &QuantumState::from_parts(StateData::Pure(psi.clone()), space))?;
        }
    }
    let final_state = QuantumState::from_parts(StateData::Pure(psi), space);
    Ok(Trajectory {
        times: rec.times,
        series: rec.series,
        states: rec.states,
        final_state,
        dt,
        steps,
        max_drift,
        positivity_warnings: rec.positivity_warnings,
    })
}

type Entries<T> = Vec<(usize, usize, Cx<T>)>;

fn sparse_entries<T: Real>(m: &CMatrix<T>) -> Entries<T> {
    let mut v = Vec::new();
    for i in 0..m.rows() {
        for (j, z) in m.row(i).iter().enumerate() {
            if *z != czero() {
                v.push((i, j, *z));
            }
        }
    }
    v
}

/// Static parts of the Lindblad generator.
struct Dissipator<T> {
    /// Entries of `−(i/2) Σ γ L†L`.
    decay: Entries<T>,
    jumps: Vec<(T, Entries<T>)>,
}

impl<T: Real> Dissipator<T> {
    fn new(channels: &[CollapseChannel<T>], n: usize) -> Self {
        let mut acc = CMatrix::zeros(n, n);
        let mut jumps = Vec::new();
        for c in channels {
            let l = c.operator.matrix();
            let ldl = l.adjoint().matmul(l);
            acc.axpy(re(c.rate), &ldl);
            jumps.push((c.rate, sparse_entries(l)));
        }
        let decay = sparse_entries(&acc.scale(Cx::new(T::zero(), -T::lit(0.5))));
        Self { decay, jumps }
    }

    fn rate_bound(&self, channels: &[CollapseChannel<T>]) -> T {
        dissipation_rate_bound(channels)
    }
}

struct LindbladWork<T> {
    x: CMatrix<T>,
    m: CMatrix<T>,
}

/// `out = −i(Kρ − ρK†) + Σ γ LρL†` with `K = H − (i/2)Σ γ L†L`.
fn lindblad_rhs<T: Real>(
    rows: &[usize],
    cols: &[usize],
    snap: &Snapshot<T>,
    diss: &Dissipator<T>,
    rho: &CMatrix<T>,
    work: &mut LindbladWork<T>,
    out: &mut CMatrix<T>,
) {
    let n = rho.rows();
    let zero = czero::<T>();
    let x = work.x.as_mut_slice();
    x.iter_mut().for_each(|z| *z = zero);
    let r = rho.as_slice();
    let axpy_row = |i: usize, j: usize, v: Cx<T>, x: &mut [Cx<T>]| {
        let src = &r[j * n..(j + 1) * n];
        let dst = &mut x[i * n..(i + 1) * n];
        for (d, s) in dst.iter_mut().zip(src) {
            *d += v * *s;
        }
    };
    for (p, v) in snap.vals.iter().enumerate() {
        axpy_row(rows[p], cols[p], *v, x);
    }
    for &(i, j, v) in &diss.decay {
        axpy_row(i, j, v, x);
    }
    // Y = −iX; out = Y + Y†
    let o = out.as_mut_slice();
    for i in 0..n {
        for j in 0..n {
            let yij = x[i * n + j];
            let yji = x[j * n + i];
            // −i·x_ij + conj(−i·x_ji) = −i x_ij + i conj(x_ji)
            o[i * n + j] = Cx::new(yij.im + yji.im, yji.re - yij.re);
        }
    }
    for (rate, entries) in &diss.jumps {
        let m = work.m.as_mut_slice();
        m.iter_mut().for_each(|z| *z = zero);
        for &(i, j, v) in entries {
            let src = &r[j * n..(j + 1) * n];
            let dst = &mut m[i * n..(i + 1) * n];
            for (d, s) in dst.iter_mut().zip(src) {
                *d += v * *s;
            }
        }
        // out += γ M L†: (M L†)[a][b] = Σ_c M[a][c] conj(L[b][c])
        for &(b, c, v) in entries {
            let w = v.conj() * *rate;
            for a in 0..n {
                o[a * n + b] += m[a * n + c] * w;
            }
        }
    }
}

/// Integrates the Lindblad master equation with RK4; ρ is re-symmetrized
/// after every step.
pub fn evolve_lindblad<T: Real>(
    h: &TimeDependentHamiltonian<T>,
    channels: &[CollapseChannel<T>],
    rho0: &QuantumState<T>,
    cfg: &IntegratorConfig<T>,
    t_end: T,
    observables: &[Observable<T>],
) -> Result<Trajectory<T>, DynamicsError> {
    check_spaces(h, rho0, observables)?;
    if channels.iter().any(|c| c.operator.space() != h.space()) {
        return Err(DynamicsError::SpaceMismatch);
    }
    if channels.iter().any(|c| !(c.rate >= T::zero())) {
        return Err(DynamicsError::Config("collapse rates must be non-negative".into()));
    }
    let space = rho0.space();
    let n = space.dim();
    let diss = Dissipator::new(channels, n);
    let Plan { dt, steps } = plan(cfg, t_end, stability_bound(h, diss.rate_bound(channels)), n, true)?;
    let mut rho = rho0.to_density();
    let (rows, cols) = h.pattern();
    let (rows, cols) = (rows.to_vec(), cols.to_vec());
    let mut rec = Recorder::new(observables, cfg);
    let tr0 = rho.trace().re;
    rec.record(cfg.t_start, &QuantumState::from_parts(StateData::Mixed(rho.clone()), space))?;
    let mut work = LindbladWork { x: CMatrix::zeros(n, n), m: CMatrix::zeros(n, n) };
    let mut k = [CMatrix::zeros(n, n), CMatrix::zeros(n, n), CMatrix::zeros(n, n), CMatrix::zeros(n, n)];
    let mut tmp = CMatrix::zeros(n, n);
    let mut snaps = [Snapshot::default(), Snapshot::default(), Snapshot::default()];
    let half = T::lit(0.5);
    let sixth = dt / T::lit(6.0);
    let mut max_drift = T::zero();
    for step in 1..=steps {
        let t = cfg.t_start + dt * T::from_usize_lossy(step - 1);
        h.snapshot(t, &mut snaps[0]);
        h.snapshot(t + dt * half, &mut snaps[1]);
        h.snapshot(t + dt, &mut snaps[2]);
        let [k1, k2, k3, k4] = &mut k;
        lindblad_rhs(&rows, &cols, &snaps[0], &diss, &rho, &mut work, k1);
        combine(&rho, k1, dt * half, &mut tmp);
        lindblad_rhs(&rows, &cols, &snaps[1], &diss, &tmp, &mut work, k2);
        combine(&rho, k2, dt * half, &mut tmp);
        lindblad_rhs(&rows, &cols, &snaps[1], &diss, &tmp, &mut work, k3);
        combine(&rho, k3, dt, &mut tmp);
        lindblad_rhs(&rows, &cols, &snaps[2], &diss, &tmp, &mut work, k4);
        let two = T::lit(2.0);
        for (i, r) in rho.as_mut_slice().iter_mut().enumerate() {
            *r += (k1.as_slice()[i] + (k2.as_slice()[i] + k3.as_slice()[i]) * two + k4.as_slice()[i]) * sixth;
        }
        rho.symmetrize();
        let drift = (rho.trace().re - tr0).abs();
        max_drift = max_drift.max(drift);
        let t_now = cfg.t_start + dt * T::from_usize_lossy(step);
        if drift > T::lit(DRIFT_LIMIT) {
            return Err(DynamicsError::NormDrift { time: t_now.as_f64(), drift: drift.as_f64(), dt: dt.as_f64() });
        }
        if step % cfg.sample_stride == 0 || step == steps {
            rec.record(t_now, &QuantumState::from_parts(StateData::Mixed(rho.clone()), space))?;
        }
    }
    let final_state = QuantumState::from_parts(StateData::Mixed(rho), space);
    Ok(Trajectory {
        times: rec.times,
        series: rec.series,
        states: rec.states,
        final_state,
        dt,
        steps,
        max_drift,
        positivity_warnings: rec.positivity_warnings,
    })
}

fn combine<T: Real>(rho: &CMatrix<T>, k: &CMatrix<T>, h: T, out: &mut CMatrix<T>) {
    for ((o, r), d) in out.as_mut_slice().iter_mut().zip(rho.as_slice()).zip(k.as_slice()) {
        *o = *r + *d * h;
    }
}

/// Applies `e^{+iGt}` to a state (`ψ → Uψ`, `ρ → UρU†`). Diagonal
/// generators take an exact elementwise path; others use a matrix exponential.
pub fn frame_transform<T: Real>(state: &QuantumState<T>, generator: &Operator<T>, t: T) -> Result<QuantumState<T>, DynamicsError> {
    if generator.space() != state.space() {
        return Err(DynamicsError::SpaceMismatch);
    }
    let g = generator.matrix();
    let tol = T::epsilon() * T::lit(1e3) * g.max_abs().max(T::one());
    if !g.is_hermitian(tol) {
        return Err(DynamicsError::Hilbert(HilbertError::NotHermitian(g.hermitian_defect().as_f64())));
    }
    let n = g.rows();
    let diagonal = (0..n).all(|i| (0..n).all(|j| i == j || g[(i, j)] == czero()));
    if diagonal {
        let d: Vec<T> = g.diag().iter().map(|z| z.re).collect();
        return Ok(frame_transform_diagonal(state, &d, t));
    }
    let u = g.scale(Cx::new(T::zero(), t)).expm();
    let data = match state.data() {
        StateData::Pure(v) => StateData::Pure(u.mul_vec(v)),
        StateData::Mixed(m) => StateData::Mixed(u.matmul(m).matmul(&u.adjoint())),
    };
    Ok(QuantumState::from_parts(data, state.space()))
}

/// `e^{+iGt}` for a diagonal generator given by its entries.
pub fn frame_transform_diagonal<T: Real>(state: &QuantumState<T>, g: &[T], t: T) -> QuantumState<T> {
    let u: Vec<Cx<T>> = g.iter().map(|e| phase(*e * t)).collect();
    let data = match state.data() {
        StateData::Pure(v) => StateData::Pure(v.iter().zip(&u).map(|(a, b)| *a * *b).collect()),
        StateData::Mixed(m) => {
            let n = m.rows();
            StateData::Mixed(CMatrix::from_fn(n, n, |i, j| m[(i, j)] * u[i] * u[j].conj()))
        }
    };
    QuantumState::from_parts(data, state.space())
}

/// Applies [`frame_transform`] to every stored state at its own time and to
/// the final state.
pub fn frame_transform_trajectory<T: Real>(traj: &Trajectory<T>, generator: &Operator<T>) -> Result<Trajectory<T>, DynamicsError> {
    let mut out = traj.clone();
    if !traj.states.is_empty() {
        out.states = traj.states.iter().zip(&traj.times).map(|(s, t)| frame_transform(s, generator, *t)).collect::<Result<_, _>>()?;
    }
    let t_final = *traj.times.last().expect("trajectory has samples");
    out.final_state = frame_transform(&traj.final_state, generator, t_final)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{make_space, number, projector};
    use crate::models::{build_driven_qrm_lab, build_rwa_drive_frame, Modulation, QubitParams};
    use std::f64::consts::PI;

    fn rabi_toy() -> (TimeDependentHamiltonian<f64>, SpaceDescriptor) {
        let s = make_space(2, 3).unwrap();
        let p = QubitParams::new(1.0, 1.0, 1.0, 0.0, 0.4).unwrap();
        (build_rwa_drive_frame(&p, s).unwrap(), s)
    }

    #[test]
    fn rabi_oscillation_matches_closed_form() {
        let (h, s) = rabi_toy();
        let psi0 = QuantumState::basis(s, 0, 0).unwrap();
        let obs = [Observable::new("P_e", projector(s, 1).unwrap())];
        let tr = evolve_schrodinger(&h, &psi0, &IntegratorConfig::with_dt(0.01), 10.0, &obs).unwrap();
        for (t, pe) in tr.times.iter().zip(tr.series("P_e").unwrap()) {
            let want = (0.4 * t / 2.0).sin().powi(2);
            assert!((pe - want).abs() < 1e-9, "t = {t}");
        }
    }

    #[test]
    fn rk4_is_fourth_order() {
        let (h, s) = rabi_toy();
        let psi0 = QuantumState::basis(s, 0, 0).unwrap();
        let exact = (0.4f64 * 20.0 / 2.0).cos();
        let err = |dt: f64| {
            let tr = evolve_schrodinger(&h, &psi0, &IntegratorConfig::with_dt(dt), 20.0, &[]).unwrap();
            (tr.final_state.as_vector().unwrap()[0].re - exact).abs()
        };
        let (e1, e2) = (err(0.4), err(0.2));
        let order = (e1 / e2).log2();
        assert!((order - 4.0).abs() < 0.3, "observed order {order}");
    }

    #[test]
    fn lindblad_decay_of_excited_state() {
        let s = make_space(2, 3).unwrap();
        let h = TimeDependentHamiltonian::new(s, "zero", vec![(Modulation::Constant, CMatrix::zeros(6, 6))]).unwrap();
        let rates = DecoherenceParams::new(0.5, 0.0, 0.0, 0.0).unwrap();
        let ch = standard_channels(s, &rates, Selection::Cascade).unwrap();
        let rho0 = QuantumState::basis(s, 1, 0).unwrap();
        let obs = [Observable::new("P_e", projector(s, 1).unwrap())];
        let tr = evolve_lindblad(&h, &ch, &rho0, &IntegratorConfig::with_dt(0.01), 4.0, &obs).unwrap();
        let pe = *tr.series("P_e").unwrap().last().unwrap();
        assert!((pe - (-2.0f64).exp()).abs() < 1e-9);
        assert!(tr.max_drift < 1e-12);
    }

    #[test]
    fn photon_loss_of_fock_state() {
        let s = make_space(2, 6).unwrap();
        let h = TimeDependentHamiltonian::new(s, "zero", vec![(Modulation::Constant, CMatrix::zeros(12, 12))]).unwrap();
        let rates = DecoherenceParams::new(0.0, 0.0, 0.0, 1.0).unwrap();
        let ch = standard_channels(s, &rates, Selection::Cascade).unwrap();
        let rho0 = QuantumState::basis(s, 0, 3).unwrap();
        let obs = [Observable::new("n", number(s))];
        let tr = evolve_lindblad(&h, &ch, &rho0, &IntegratorConfig::with_dt(0.005), 1.0, &obs).unwrap();
        let n = *tr.series("n").unwrap().last().unwrap();
        assert!((n - 3.0 * (-1.0f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn step_bound_is_enforced() {
        let s = make_space(2, 4).unwrap();
        let p = QubitParams::new(2.0 * PI * 5e9, 2.0 * PI * 5e9, 2.0 * PI * 5e9, 2.0 * PI * 2e7, 2.0 * PI * 2e9).unwrap();
        let h = build_driven_qrm_lab(&p, s).unwrap();
        let psi0 = QuantumState::basis(s, 0, 0).unwrap();
        let err = evolve_schrodinger(&h, &psi0, &IntegratorConfig::with_dt(1e-10), 1e-9, &[]).unwrap_err();
        assert!(matches!(err, DynamicsError::StepTooLarge { .. }));
    }

    #[test]
    fn diagonal_frame_transform_matches_expm() {
        let s = make_space(2, 3).unwrap();
        let g = CMatrix::from_real_diag(&[0.3, -1.0, 2.0, 0.0, 0.5, 4.0]);
        let gen = Operator::new(g.clone(), s).unwrap();
        let v: Vec<Cx<f64>> = (0..6).map(|k| Cx::new(k as f64, 1.0)).collect();
        let psi = QuantumState::pure_normalized(v, s).unwrap();
        let a = frame_transform(&psi, &gen, 0.9).unwrap();
        let u = g.scale(Cx::new(0.0, 0.9)).expm();
        let b = u.mul_vec(psi.as_vector().unwrap());
        for (x, y) in a.as_vector().unwrap().iter().zip(&b) {
            assert!((x - y).norm() < 1e-13);
        }
    }
}
