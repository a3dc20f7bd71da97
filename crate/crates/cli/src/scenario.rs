//! Builds, integrates and measures one scenario.

use catsim_core::analysis::{self, AtomBasis, GridSpec, MeasurementOutcome, WignerGrid};
use catsim_core::dynamics::{
    dissipation_rate_bound, evolve_lindblad, evolve_schrodinger, frame_transform, stability_bound, standard_channels, CollapseChannel,
    DynamicsError, IntegratorConfig, Observable, Trajectory,
};
use catsim_core::hilbert::{make_space, number, projector, HilbertError, QuantumState, Selection, SpaceDescriptor};
use catsim_core::linalg::CMatrix;
use catsim_core::models::{
    build_arbitrary_anharmonic, build_deformation_hamiltonian, build_drive_frame_exact, build_driven_qrm_lab, build_effective_detuned,
    build_effective_resonant, build_qutrit_lab, build_qutrit_rwa_harmonic, build_rwa_drive_frame, build_rwa_interaction,
    build_spurious_model, check_rwa_report, dressed_free_hamiltonian, ModelError, QubitParams, QutritParams, TimeDependentHamiltonian,
    ValidityInput, ValidityReport, Verdict,
};
use catsim_core::{Cx, Operator64, State64};
use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use crate::config::{ConfigError, Frame, InitialState, MeasureAtom, Physics, Scenario, Variant};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("configuration error: {0}")]
    Config(#[from] ConfigError),
    #[error("validity check failed (rerun with --force to override):\n{0}")]
    Validity(String),
    #[error("numerical guard tripped: {0}")]
    Numerical(String),
    #[error("model error: {0}")]
    Model(String),
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Model(_) => 2,
            RunError::Validity(_) => 3,
            RunError::Numerical(_) => 4,
            RunError::Io { .. } => 1,
        }
    }
}

impl From<DynamicsError> for RunError {
    fn from(e: DynamicsError) -> Self {
        match e {
            DynamicsError::Config(m) => RunError::Model(m),
            DynamicsError::SpaceMismatch => RunError::Model(e.to_string()),
            other => RunError::Numerical(other.to_string()),
        }
    }
}

impl From<HilbertError> for RunError {
    fn from(e: HilbertError) -> Self {
        match e {
            HilbertError::Cutoff { .. } => RunError::Numerical(e.to_string()),
            other => RunError::Model(other.to_string()),
        }
    }
}

impl From<ModelError> for RunError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Hilbert(h) => h.into(),
            other => RunError::Model(other.to_string()),
        }
    }
}

impl From<analysis::AnalysisError> for RunError {
    fn from(e: analysis::AnalysisError) -> Self {
        match e {
            analysis::AnalysisError::Hilbert(h) => h.into(),
            analysis::AnalysisError::Dynamics(d) => d.into(),
            other => RunError::Model(other.to_string()),
        }
    }
}

pub fn validity_report(s: &Scenario) -> ValidityReport {
    match &s.physics {
        Physics::Qubit(p) => check_rwa_report(ValidityInput::Qubit(p)),
        Physics::Qutrit(p) => check_rwa_report(ValidityInput::Qutrit(p)),
    }
}

/// Error describing every failed inequality, or `None` when none failed.
pub fn validity_gate(report: &ValidityReport) -> Option<RunError> {
    let failed: Vec<String> = report
        .failures()
        .map(|e| format!("  {} ({}): ratio {:.3} exceeds {}", e.name, e.condition, e.ratio, catsim_core::models::FAIL_RATIO))
        .collect();
    if failed.is_empty() {
        None
    } else {
        Some(RunError::Validity(failed.join("\n")))
    }
}

/// Hamiltonian ready for integration, with the frame its states live in.
pub struct BuiltModel {
    pub hamiltonian: TimeDependentHamiltonian<f64>,
    /// Dense generator `G` of the interaction picture the states are
    /// expressed in relative to the drive frame (`ψ = e^{iGt}ψ_drive`);
    /// measurements undo it first.
    pub measurement_frame: Option<Operator64>,
    pub description: String,
}

fn drive_frame_generator(space: SpaceDescriptor, omega_d: f64) -> Vec<f64> {
    let atom: Vec<f64> = match space.atom_levels() {
        2 => vec![-0.5, 0.5],
        _ => vec![-0.5, 0.5, 1.5],
    };
    let mut g = Vec::with_capacity(space.dim());
    for a in &atom {
        for n in 0..space.fock_cutoff() {
            g.push(omega_d * (a + n as f64));
        }
    }
    g
}

fn qubit(s: &Scenario) -> Result<&QubitParams<f64>, RunError> {
    match &s.physics {
        Physics::Qubit(p) => Ok(p),
        Physics::Qutrit(_) => Err(RunError::Model(format!("{} needs qubit parameters", s.variant.label()))),
    }
}

fn qutrit(s: &Scenario) -> Result<&QutritParams<f64>, RunError> {
    match &s.physics {
        Physics::Qutrit(p) => Ok(p),
        Physics::Qubit(_) => Err(RunError::Model(format!("{} needs qutrit parameters", s.variant.label()))),
    }
}

/// Lab model in the requested frame, with the diagonal generator taking the
/// integration frame to the drive frame (none when they coincide).
fn lab_in_frame(
    h: TimeDependentHamiltonian<f64>,
    frame: Frame,
    omega_d: f64,
) -> Result<(TimeDependentHamiltonian<f64>, String, Option<Operator64>), RunError> {
    let space = h.space();
    let drive = drive_frame_generator(space, omega_d);
    match frame {
        Frame::Lab => {
            let (hi, bare) = h.interaction_frame()?;
            let diff: Vec<f64> = bare.iter().zip(&drive).map(|(b, d)| b - d).collect();
            let offset = diff[0];
            let to_drive = if diff.iter().all(|x| (x - offset).abs() <= 1e-12 * omega_d.abs().max(1.0)) {
                None
            } else {
                let m = CMatrix::from_fn(diff.len(), diff.len(), |i, j| if i == j { Cx::new(diff[i], 0.0) } else { Cx::new(0.0, 0.0) });
                Some(Operator64::new(m, space)?)
            };
            Ok((hi, "lab model, integrated in the interaction frame of its bare energies".into(), to_drive))
        }
        _ => Ok((h.in_rotating_frame(&drive)?, "lab model, integrated in the frame rotating at the drive".into(), None)),
    }
}

pub fn build_model(s: &Scenario, space: SpaceDescriptor) -> Result<BuiltModel, RunError> {
    let mut measurement_frame = None;
    let (hamiltonian, description) = match s.variant {
        Variant::QrmLab => {
            let p = qubit(s)?;
            let (h, d, m) = lab_in_frame(build_driven_qrm_lab(p, space)?, s.frame, p.omega_d)?;
            measurement_frame = m;
            (h, d)
        }
        Variant::Spurious => {
            let p = qubit(s)?;
            let sp = s.spurious.expect("spurious variant carries drive parameters");
            let (h, d, m) = lab_in_frame(build_spurious_model(p, &sp, space)?, s.frame, p.omega_d)?;
            measurement_frame = m;
            (h, d)
        }
        Variant::QutritLab => {
            let p = qutrit(s)?;
            let (h, d, m) = lab_in_frame(build_qutrit_lab(p, space)?, s.frame, p.omega_d)?;
            measurement_frame = m;
            (h, d)
        }
        Variant::Rwa => {
            let p = qubit(s)?;
            if s.frame == Frame::Interaction {
                measurement_frame = Some(dressed_free_hamiltonian(p, space)?);
                (build_rwa_interaction(p, space)?, "rotating-wave model, interaction picture".into())
            } else {
                (build_rwa_drive_frame(p, space)?, "rotating-wave model, drive frame".into())
            }
        }
        Variant::Effective => {
            let p = qubit(s)?;
            measurement_frame = Some(dressed_free_hamiltonian(p, space)?);
            let h = if p.atom_detuning() == 0.0 { build_effective_resonant(p, space)? } else { build_effective_detuned(p, space)? };
            (h, "strong-driving effective model, interaction picture".into())
        }
        Variant::Deformation => {
            let p = qubit(s)?;
            measurement_frame = Some(dressed_free_hamiltonian(p, space)?);
            let eff = build_effective_resonant(p, space)?;
            let def = build_deformation_hamiltonian(p, space)?;
            let mut terms = eff.terms().to_vec();
            terms.extend(def.terms().iter().cloned());
            let h = TimeDependentHamiltonian::new(space, "effective model plus deformation term", terms)?;
            (h, "effective model plus deformation term, interaction picture".into())
        }
        Variant::QutritRwa => (build_qutrit_rwa_harmonic(qutrit(s)?, space)?, "harmonic qutrit, rotating-wave, drive frame".into()),
        Variant::ArbitraryAnharmonic => {
            (build_arbitrary_anharmonic(qutrit(s)?, space)?, "anharmonic qutrit, rotating-wave, dressed frame".into())
        }
    };
    Ok(BuiltModel { hamiltonian, measurement_frame, description })
}

/// The drive-frame exact model, used as the closed-system reference.
pub fn reference_model(p: &QubitParams<f64>, space: SpaceDescriptor) -> Result<TimeDependentHamiltonian<f64>, RunError> {
    Ok(build_drive_frame_exact(p, space)?)
}

pub fn initial_state(s: &Scenario, space: SpaceDescriptor) -> Result<State64, RunError> {
    let levels = space.atom_levels();
    let vac = QuantumState::basis(space.resonator_factor(), 0, 0)?;
    let c = |re: f64, im: f64| Cx::new(re, im);
    let mut atom = vec![c(0.0, 0.0); levels];
    match s.initial {
        InitialState::Level(l) => atom[l.index()] = c(1.0, 0.0),
        InitialState::Plus => {
            atom[0] = c(FRAC_1_SQRT_2, 0.0);
            atom[1] = c(FRAC_1_SQRT_2, 0.0);
        }
        InitialState::Minus => {
            atom[0] = c(FRAC_1_SQRT_2, 0.0);
            atom[1] = c(-FRAC_1_SQRT_2, 0.0);
        }
        InitialState::Dark => {
            atom[0] = c(-(2f64 / 3.0).sqrt(), 0.0);
            atom[2] = c((1f64 / 3.0).sqrt(), 0.0);
        }
        InitialState::Encode { c_g, c_e } => {
            atom[0] = c(c_g[0], c_g[1]);
            atom[1] = c(c_e[0], c_e[1]);
        }
    }
    Ok(QuantumState::product(&atom, &vac)?)
}

pub fn observables(space: SpaceDescriptor) -> Result<Vec<Observable<f64>>, RunError> {
    let mut obs = vec![
        Observable::new("P_e", projector(space, 1)?),
        Observable::new("n_phot", number(space)),
        Observable::new("P_g", projector(space, 0)?),
    ];
    if space.atom_levels() == 3 {
        obs.push(Observable::new("P_f", projector(space, 2)?));
    }
    Ok(obs)
}

pub fn channels(s: &Scenario, space: SpaceDescriptor) -> Result<Vec<CollapseChannel<f64>>, RunError> {
    let sel = match &s.physics {
        Physics::Qutrit(p) => p.selection,
        Physics::Qubit(_) => Selection::Cascade,
    };
    Ok(standard_channels(space, &s.decoherence, sel)?)
}

/// Result of the measurement plan.
#[derive(Debug, Clone)]
pub struct Measurement {
    pub atom: MeasureAtom,
    pub nominal_time: f64,
    pub time: f64,
    /// Window searched when the time was aligned.
    pub window: Option<(f64, f64)>,
    pub probability: f64,
    pub parity: Option<f64>,
    /// Joint state at the measurement time, in the measurement frame.
    pub joint_state: State64,
    pub conditional: Option<State64>,
    pub wigner: Option<WignerGrid<f64>>,
}

/// Everything a run produces.
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub scenario: Scenario,
    pub validity: ValidityReport,
    pub description: String,
    pub times: Vec<f64>,
    pub p_e: Vec<f64>,
    pub n_phot: Vec<f64>,
    pub purity: Vec<f64>,
    pub p_g: Vec<f64>,
    pub p_f: Option<Vec<f64>>,
    pub final_state: State64,
    pub dt: f64,
    pub steps: usize,
    pub max_drift: f64,
    pub positivity_warnings: usize,
    pub measurement: Option<Measurement>,
}

/// Default step as a fraction of [`step_bound`]; the bound itself keeps RK4
/// stable but lets the norm drift over long lab-frame runs.
pub const DEFAULT_STEP_FRACTION: f64 = 0.25;

/// Step used when a scenario gives none, and the check for one that does.
pub fn choose_dt(s: &Scenario, bound: f64) -> Result<f64, RunError> {
    match s.dt {
        Some(dt) if dt > bound * (1.0 + 1e-9) => Err(DynamicsError::StepTooLarge { dt, bound }.into()),
        Some(dt) => Ok(dt),
        None => Ok(bound * DEFAULT_STEP_FRACTION),
    }
}

/// Largest step the integrator accepts for this model.
pub fn step_bound(h: &TimeDependentHamiltonian<f64>, ch: &[CollapseChannel<f64>]) -> f64 {
    stability_bound(h, dissipation_rate_bound(ch))
}

/// Evolves `[t0, t1]` with exactly `intervals` recorded intervals and a
/// step no larger than `dt_max`.
#[allow(clippy::too_many_arguments)]
pub fn evolve_segment(
    h: &TimeDependentHamiltonian<f64>,
    ch: &[CollapseChannel<f64>],
    state: &State64,
    t0: f64,
    t1: f64,
    dt_max: f64,
    intervals: usize,
    obs: &[Observable<f64>],
) -> Result<Trajectory<f64>, RunError> {
    let intervals = intervals.max(1);
    let span = t1 - t0;
    let per = ((span / dt_max) / intervals as f64 - 1e-9).ceil().max(1.0) as usize;
    let steps = per * intervals;
    let cfg = IntegratorConfig {
        dt: Some(span / steps as f64),
        t_start: t0,
        sample_stride: per,
        store_states: false,
        renormalize: false,
        check_cutoff: true,
    };
    let traj = if ch.is_empty() && state.is_pure() {
        evolve_schrodinger(h, state, &cfg, t1, obs)?
    } else {
        evolve_lindblad(h, ch, state, &cfg, t1, obs)?
    };
    Ok(traj)
}

fn atom_basis(atom: MeasureAtom) -> AtomBasis<f64> {
    match atom {
        MeasureAtom::Level(l) => AtomBasis::Level(l.index()),
        MeasureAtom::Plus => AtomBasis::Vector(vec![Cx::new(FRAC_1_SQRT_2, 0.0), Cx::new(FRAC_1_SQRT_2, 0.0)]),
        MeasureAtom::Minus => AtomBasis::Vector(vec![Cx::new(FRAC_1_SQRT_2, 0.0), Cx::new(-FRAC_1_SQRT_2, 0.0)]),
    }
}

/// Revival period of the driven atom, used as the alignment window.
fn revival_window(s: &Scenario) -> f64 {
    match &s.physics {
        Physics::Qubit(p) => TAU / p.dressed_splitting(),
        Physics::Qutrit(p) => TAU / p.drive1,
    }
}

/// States inspected per alignment window.
pub const ALIGN_SCAN_POINTS: usize = 200;

/// Time of largest return probability of the driven atom alone (coupling
/// switched off) within one revival window of `nominal`, clamped to the run.
/// This fixes which of the two dressed phases (even or odd cat) is meant.
pub fn bare_revival_time(s: &Scenario, nominal: f64, dt_max: f64) -> Result<f64, RunError> {
    let mut bare = s.clone();
    bare.physics = match s.physics {
        Physics::Qubit(p) => Physics::Qubit(QubitParams { g: 0.0, ..p }),
        Physics::Qutrit(p) => Physics::Qutrit(QutritParams { g1: 0.0, g2: 0.0, ..p }),
    };
    if bare.variant == Variant::Spurious {
        bare.variant = Variant::QrmLab;
    }
    let space = make_space(s.physics.atom_levels(), 2)?;
    let built = build_model(&bare, space)?;
    let init = initial_state(&bare, space)?;
    let w = revival_window(s);
    let dt = dt_max.min(stability_bound(&built.hamiltonian, 0.0));
    let (lo, hi) = ((nominal - w).max(0.0), (nominal + w).min(s.t_end));
    Ok(analysis::dressed_revival_time(&built.hamiltonian, &init, nominal, lo, hi, dt)?.0)
}

/// Search window of the alignment: a quarter revival period either side
/// of the bare-atom revival, clamped to the run.
pub fn align_window(s: &Scenario, nominal: f64, dt_max: f64) -> Result<(f64, f64), RunError> {
    let tb = bare_revival_time(s, nominal, dt_max)?;
    let q = revival_window(s) / 4.0;
    Ok(((tb - q).max(0.0), (tb + q).min(s.t_end)))
}

/// Scans `[lo, hi]` starting from `state_lo` and returns the sampled time at
/// which the conditional resonator state has the largest `|parity|`, i.e.
/// where the dressed-atom phase of the coupled system lines up; ties go to
/// the time nearest `nominal`.
#[allow(clippy::too_many_arguments)]
pub fn aligned_time(
    built: &BuiltModel,
    ch: &[CollapseChannel<f64>],
    state_lo: &State64,
    lo: f64,
    hi: f64,
    atom: MeasureAtom,
    nominal: f64,
    dt_max: f64,
) -> Result<f64, RunError> {
    let per = ((hi - lo) / dt_max / ALIGN_SCAN_POINTS as f64 - 1e-9).ceil().max(1.0) as usize;
    let steps = per * ALIGN_SCAN_POINTS;
    let cfg = IntegratorConfig {
        dt: Some((hi - lo) / steps as f64),
        t_start: lo,
        sample_stride: per,
        store_states: true,
        renormalize: false,
        check_cutoff: true,
    };
    let traj = if ch.is_empty() && state_lo.is_pure() {
        evolve_schrodinger(&built.hamiltonian, state_lo, &cfg, hi, &[])?
    } else {
        evolve_lindblad(&built.hamiltonian, ch, state_lo, &cfg, hi, &[])?
    };
    let basis = atom_basis(atom);
    let mut best = (nominal, f64::NEG_INFINITY);
    for (t, st) in traj.times.iter().zip(&traj.states) {
        let joint = to_measurement_frame(st, &built.measurement_frame, *t)?;
        let Some(c) = analysis::project_atom(&joint, &basis)?.conditional else { continue };
        let q = analysis::parity(&c).abs();
        if q > best.1 + 1e-12 || ((q - best.1).abs() <= 1e-12 && (t - nominal).abs() < (best.0 - nominal).abs()) {
            best = (*t, q);
        }
    }
    Ok(best.0)
}

/// Splits `total` recorded intervals over segments in proportion to their
/// lengths, at least one each.
fn split_intervals(spans: &[f64], total: usize) -> Vec<usize> {
    let sum: f64 = spans.iter().sum();
    let mut k: Vec<usize> = spans.iter().map(|s| ((total as f64 * s / sum).round() as usize).max(1)).collect();
    let used: usize = k[..k.len() - 1].iter().sum();
    if let Some(last) = k.last_mut() {
        *last = total.saturating_sub(used).max(1);
    }
    k
}

fn to_measurement_frame(state: &State64, frame: &Option<Operator64>, t: f64) -> Result<State64, RunError> {
    match frame {
        None => Ok(state.clone()),
        Some(g) => Ok(frame_transform(state, &g.scale_real(-1.0), t)?),
    }
}

pub fn measure(
    s: &Scenario,
    joint: &State64,
    frame: &Option<Operator64>,
    atom: MeasureAtom,
    nominal_time: f64,
    time: f64,
    window: Option<(f64, f64)>,
) -> Result<Measurement, RunError> {
    let joint_state = to_measurement_frame(joint, frame, time)?;
    let MeasurementOutcome { probability, conditional } = analysis::project_atom(&joint_state, &atom_basis(atom))?;
    let parity = conditional.as_ref().map(analysis::parity);
    let wigner = match (&s.wigner, &conditional) {
        (Some(w), Some(c)) => {
            let grid = match w.extent {
                Some(e) => GridSpec::square(e, w.points),
                None => GridSpec::for_alpha(c.mean_photon_number().sqrt(), w.points),
            };
            Some(analysis::wigner(c, &grid)?)
        }
        _ => None,
    };
    Ok(Measurement { atom, nominal_time, time, window, probability, parity, joint_state, conditional, wigner })
}

/// Runs a scenario. Fails on a validity "fail" verdict unless `force`.
pub fn run_scenario(s: &Scenario, force: bool) -> Result<RunArtifacts, RunError> {
    let validity = validity_report(s);
    if !force {
        if let Some(e) = validity_gate(&validity) {
            return Err(e);
        }
    } else if validity.overall() == Verdict::Fail {
        log::warn!("running despite failed validity conditions");
    }
    let space = make_space(s.physics.atom_levels(), s.fock_cutoff)?;
    let built = build_model(s, space)?;
    let ch = channels(s, space)?;
    let obs = observables(space)?;
    let psi0 = initial_state(s, space)?;
    let bound = step_bound(&built.hamiltonian, &ch);
    let dt_max = choose_dt(s, bound)?;
    let state0 = if ch.is_empty() { psi0 } else { psi0.into_mixed() };

    let intervals = s.samples - 1;
    let mut pieces = Vec::new();
    let Some(m) = s.measure else {
        pieces.push(evolve_segment(&built.hamiltonian, &ch, &state0, 0.0, s.t_end, dt_max, intervals, &obs)?);
        return Ok(assemble(s.clone(), validity, built.description, pieces, None));
    };
    let window = if m.align { Some(align_window(s, m.time, dt_max)?) } else { None };
    // Breakpoints: [0, lo] is shared by the scan and the recorded run.
    let mut state = state0;
    let mut t_now = 0.0;
    let t_m = match window {
        Some((lo, hi)) => {
            if lo > 0.0 {
                let k = split_intervals(&[lo, s.t_end - lo], intervals)[0];
                let a = evolve_segment(&built.hamiltonian, &ch, &state, 0.0, lo, dt_max, k, &obs)?;
                state = a.final_state.clone();
                t_now = lo;
                pieces.push(a);
            }
            aligned_time(&built, &ch, &state, lo, hi, m.atom, m.time, dt_max)?
        }
        None => m.time,
    };
    let done: usize = pieces.iter().map(|p: &Trajectory<f64>| p.times.len() - 1).sum();
    let rest = intervals.saturating_sub(done).max(1);
    let spans: Vec<f64> = [t_m - t_now, s.t_end - t_m].into_iter().filter(|x| *x > s.t_end * 1e-12).collect();
    let ks = split_intervals(&spans, rest);
    let mut ki = ks.iter();
    if t_m - t_now > s.t_end * 1e-12 {
        let seg = evolve_segment(&built.hamiltonian, &ch, &state, t_now, t_m, dt_max, *ki.next().expect("segment"), &obs)?;
        state = seg.final_state.clone();
        t_now = t_m;
        pieces.push(seg);
    }
    let measured = Some(measure(s, &state, &built.measurement_frame, m.atom, m.time, t_now, window)?);
    if s.t_end - t_now > s.t_end * 1e-12 {
        pieces.push(evolve_segment(&built.hamiltonian, &ch, &state, t_now, s.t_end, dt_max, *ki.next().expect("segment"), &obs)?);
    }
    Ok(assemble(s.clone(), validity, built.description, pieces, measured))
}

fn assemble(
    scenario: Scenario,
    validity: ValidityReport,
    description: String,
    pieces: Vec<Trajectory<f64>>,
    measurement: Option<Measurement>,
) -> RunArtifacts {
    let mut times = Vec::new();
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); 5];
    let names = ["P_e", "n_phot", "purity", "P_g", "P_f"];
    let mut steps = 0;
    let mut max_drift: f64 = 0.0;
    let mut warnings = 0;
    let mut dt: f64 = 0.0;
    let mut has_f = false;
    for (k, tr) in pieces.iter().enumerate() {
        let skip = usize::from(k > 0);
        times.extend_from_slice(&tr.times[skip..]);
        for (c, name) in cols.iter_mut().zip(names) {
            if let Some(v) = tr.series(name) {
                c.extend_from_slice(&v[skip..]);
                has_f |= name == "P_f";
            }
        }
        steps += tr.steps;
        max_drift = max_drift.max(tr.max_drift);
        warnings += tr.positivity_warnings;
        dt = dt.max(tr.dt);
    }
    let final_state = pieces.last().expect("at least one segment").final_state.clone();
    let [p_e, n_phot, purity, p_g, p_f]: [Vec<f64>; 5] = cols.try_into().expect("five columns");
    RunArtifacts {
        scenario,
        validity,
        description,
        times,
        p_e,
        n_phot,
        purity,
        p_g,
        p_f: has_f.then_some(p_f),
        final_state,
        dt,
        steps,
        max_drift,
        positivity_warnings: warnings,
        measurement,
    }
}
