use crate::hilbert::{atom_ketbra, atom_raising, Operator, Selection, SpaceDescriptor};
use crate::linalg::CMatrix;
use crate::scalar::{cx, imag_unit, re, Cx, Real};

use super::hamiltonian::{Modulation, TimeDependentHamiltonian};
use super::params::{QubitParams, QutritMode, QutritParams, SpuriousDriveParams};
use super::ModelError;

type Terms<T> = Vec<(Modulation<T>, CMatrix<T>)>;

fn lower<T: Real>(n: usize) -> CMatrix<T> {
    let mut a = CMatrix::zeros(n, n);
    for k in 1..n {
        a[(k - 1, k)] = re(T::from_usize_lossy(k).sqrt());
    }
    a
}

fn num<T: Real>(n: usize) -> CMatrix<T> {
    let d: Vec<T> = (0..n).map(T::from_usize_lossy).collect();
    CMatrix::from_real_diag(&d)
}

/// Atom/resonator building blocks for one space.
struct Blocks<T> {
    a: CMatrix<T>,
    ad: CMatrix<T>,
    n: CMatrix<T>,
    id_r: CMatrix<T>,
    id_a: CMatrix<T>,
}

impl<T: Real> Blocks<T> {
    fn new(space: SpaceDescriptor) -> Self {
        let a = lower::<T>(space.fock_cutoff());
        Self {
            ad: a.adjoint(),
            a,
            n: num(space.fock_cutoff()),
            id_r: CMatrix::identity(space.fock_cutoff()),
            id_a: CMatrix::identity(space.atom_levels()),
        }
    }

    fn x(&self) -> CMatrix<T> {
        &self.a + &self.ad
    }
}

fn need_levels(space: SpaceDescriptor, levels: usize, what: &str) -> Result<(), ModelError> {
    if space.atom_levels() != levels {
        return Err(ModelError::Invalid(format!("{what} needs a {levels}-level atom, space has {}", space.atom_levels())));
    }
    Ok(())
}

fn need_resonant<T: Real>(p: &QubitParams<T>, what: &str) -> Result<(), ModelError> {
    if p.atom_detuning() != T::zero() {
        return Err(ModelError::Precondition(format!("{what} is derived for a resonantly driven qubit (Delta = 0)")));
    }
    Ok(())
}

fn sigma_plus<T: Real>() -> CMatrix<T> {
    atom_ketbra(2, 1, 0)
}

fn sigma_x<T: Real>() -> CMatrix<T> {
    let sp = sigma_plus::<T>();
    &sp + &sp.adjoint()
}

fn sigma_z<T: Real>() -> CMatrix<T> {
    crate::hilbert::sigma_z_atom(2)
}

/// `i(σ₊ − σ₋)`: the sign convention under which the deformation term
/// completes the effective Hamiltonian.
fn sigma_y_conv<T: Real>() -> CMatrix<T> {
    let sp = sigma_plus::<T>();
    (&sp - &sp.adjoint()).scale(imag_unit())
}

/// `|±⟩ = (|g⟩ ± |e⟩)/√2`.
fn plus_minus<T: Real>() -> ([Cx<T>; 2], [Cx<T>; 2]) {
    let h = re(T::lit(0.5).sqrt());
    ([h, h], [h, -h])
}

/// Pushes `(e^{iωt} A, e^{−iωt} A†)`.
fn push_with_hc<T: Real>(terms: &mut Terms<T>, omega: T, m: CMatrix<T>) {
    let mh = m.adjoint();
    terms.push((Modulation::Exp { omega }, m));
    terms.push((Modulation::Exp { omega: -omega }, mh));
}

/// Lab-frame driven quantum Rabi model
/// `ω_q σz/2 + ω_r a†a + g σx(a + a†) + Ω cos(ω_d t) σx`.
pub fn build_driven_qrm_lab<T: Real>(p: &QubitParams<T>, space: SpaceDescriptor) -> Result<TimeDependentHamiltonian<T>, ModelError> {
    need_levels(space, 2, "driven Rabi model")?;
    let b = Blocks::<T>::new(space);
    let half = T::lit(0.5);
    let mut h0 = sigma_z::<T>().kron(&b.id_r).scale_real(p.omega_q * half);
    h0.axpy(re(p.omega_r), &b.id_a.kron(&b.n));
    h0.axpy(re(p.g), &sigma_x::<T>().kron(&b.x()));
    let drive = sigma_x::<T>().kron(&b.id_r).scale_real(p.drive);
    TimeDependentHamiltonian::new(
        space,
        "driven Rabi model (lab frame)",
        vec![(Modulation::Constant, h0), (Modulation::Cos { omega: p.omega_d, phase: T::zero() }, drive)],
    )
}

/// Lab model in the frame rotating at the drive frequency, counter-rotating
/// terms kept.
pub fn build_drive_frame_exact<T: Real>(p: &QubitParams<T>, space: SpaceDescriptor) -> Result<TimeDependentHamiltonian<T>, ModelError> {
    need_levels(space, 2, "drive-frame Rabi model")?;
    let b = Blocks::<T>::new(space);
    let half = T::lit(0.5);
    let sp = sigma_plus::<T>();
    let mut terms = vec![(Modulation::Constant, rwa_static(p, &b))];
    let mut fast = sp.kron(&b.ad).scale_real(p.g);
    fast.axpy(re(p.drive * half), &sp.kron(&b.id_r));
    push_with_hc(&mut terms, p.omega_d + p.omega_d, fast);
    TimeDependentHamiltonian::new(space, "driven Rabi model (drive frame, exact)", terms)
}

fn rwa_static<T: Real>(p: &QubitParams<T>, b: &Blocks<T>) -> CMatrix<T> {
    let half = T::lit(0.5);
    let sp = sigma_plus::<T>();
    let mut h = sigma_z::<T>().kron(&b.id_r).scale_real(p.atom_detuning() * half);
    h.axpy(re(p.resonator_detuning()), &b.id_a.kron(&b.n));
    let jc = sp.kron(&b.a);
    h.axpy(re(p.g), &jc);
    h.axpy(re(p.g), &jc.adjoint());
    h.axpy(re(p.drive * half), &sigma_x::<T>().kron(&b.id_r));
    h
}

/// Rotating-wave model in the drive frame:
/// `Δσz/2 + δa†a + g(σ₊a + σ₋a†) + Ω σx/2`.
pub fn build_rwa_drive_frame<T: Real>(p: &QubitParams<T>, space: SpaceDescriptor) -> Result<TimeDependentHamiltonian<T>, ModelError> {
    need_levels(space, 2, "rotating-wave Rabi model")?;
    let b = Blocks::<T>::new(space);
    TimeDependentHamiltonian::new(space, "rotating-wave model (drive frame)", vec![(Modulation::Constant, rwa_static(p, &b))])
}

/// Free part `Δσz/2 + Ωσx/2 + δa†a` of the drive-frame model; the
/// interaction picture used by the analytic cat states is generated by it.
pub fn dressed_free_hamiltonian<T: Real>(p: &QubitParams<T>, space: SpaceDescriptor) -> Result<Operator<T>, ModelError> {
    need_levels(space, 2, "dressed free Hamiltonian")?;
    let b = Blocks::<T>::new(space);
    let half = T::lit(0.5);
    let mut h = sigma_z::<T>().kron(&b.id_r).scale_real(p.atom_detuning() * half);
    h.axpy(re(p.drive * half), &sigma_x::<T>().kron(&b.id_r));
    h.axpy(re(p.resonator_detuning()), &b.id_a.kron(&b.n));
    Ok(Operator::new(h, space)?)
}

/// Dressed-basis pieces `(½(P₊−P₋), 0)`, `(½|+⟩⟨−|, Ω)`, `(−½|−⟩⟨+|, −Ω)`:
/// `σ₊` in the interaction picture is their phase-weighted sum.
fn sigma_plus_interaction<T: Real>(drive: T) -> [(CMatrix<T>, T); 3] {
    let (pl, mi) = plus_minus::<T>();
    let half = T::lit(0.5);
    let diff = &CMatrix::outer(&pl, &pl) - &CMatrix::outer(&mi, &mi);
    [
        (diff.scale_real(half), T::zero()),
        (CMatrix::outer(&pl, &mi).scale_real(half), drive),
        (CMatrix::outer(&mi, &pl).scale_real(-half), -drive),
    ]
}

/// Resonant rotating-wave model in the interaction picture of
/// `Ωσx/2 + δa†a`.
pub fn build_rwa_interaction<T: Real>(p: &QubitParams<T>, space: SpaceDescriptor) -> Result<TimeDependentHamiltonian<T>, ModelError> {
    need_levels(space, 2, "interaction-picture Rabi model")?;
    need_resonant(p, "the interaction-picture model")?;
    let b = Blocks::<T>::new(space);
    let delta = p.resonator_detuning();
    let mut terms = Vec::new();
    for (s, w) in sigma_plus_interaction::<T>(p.drive) {
        push_with_hc(&mut terms, w - delta, s.kron(&b.a).scale_real(p.g));
    }
    TimeDependentHamiltonian::new(space, "rotating-wave model (interaction picture)", terms)
}

/// Interaction-picture model keeping the counter-rotating (Bloch-Siegert)
/// terms: `S(t)·(Ω/2 e^{2iω_d t} + g a† e^{i(2ω_d+δ)t} + g a e^{−iδt}) + h.c.`
pub fn build_bloch_siegert_interaction<T: Real>(
    p: &QubitParams<T>,
    space: SpaceDescriptor,
) -> Result<TimeDependentHamiltonian<T>, ModelError> {
    need_levels(space, 2, "interaction-picture Rabi model")?;
    need_resonant(p, "the Bloch-Siegert interaction model")?;
    let b = Blocks::<T>::new(space);
    let delta = p.resonator_detuning();
    let wd2 = p.omega_d + p.omega_d;
    let pieces = [(b.id_r.scale_real(p.drive * T::lit(0.5)), wd2), (b.ad.scale_real(p.g), wd2 + delta), (b.a.scale_real(p.g), -delta)];
    let mut terms = Vec::new();
    for (s, ws) in sigma_plus_interaction::<T>(p.drive) {
        for (x, wx) in &pieces {
            push_with_hc(&mut terms, ws + *wx, s.kron(x));
        }
    }
    TimeDependentHamiltonian::new(space, "exact model (interaction picture)", terms)
}

/// Strong-driving effective model `(g/2)σx(a† e^{iδt} + a e^{−iδt})`.
pub fn build_effective_resonant<T: Real>(p: &QubitParams<T>, space: SpaceDescriptor) -> Result<TimeDependentHamiltonian<T>, ModelError> {
    need_levels(space, 2, "effective model")?;
    let b = Blocks::<T>::new(space);
    let mut terms = Vec::new();
    push_with_hc(&mut terms, p.resonator_detuning(), sigma_x::<T>().kron(&b.ad).scale_real(p.g * T::lit(0.5)));
    TimeDependentHamiltonian::new(space, "effective conditional displacement", terms)
}

/// Detuned effective model `(gΩ/2ε)(P̃₊ − P̃₋)(a† e^{iδt} + a e^{−iδt})`,
/// with `P̃₊ − P̃₋ = cos θ σz + sin θ σx`, `θ = atan2(Ω, Δ)`.
pub fn build_effective_detuned<T: Real>(p: &QubitParams<T>, space: SpaceDescriptor) -> Result<TimeDependentHamiltonian<T>, ModelError> {
    need_levels(space, 2, "effective model")?;
    let eps = p.dressed_splitting();
    if eps == T::zero() {
        return Err(ModelError::Precondition("dressed splitting vanishes (Omega = Delta = 0)".into()));
    }
    let theta = p.drive.atan2(p.atom_detuning());
    let b = Blocks::<T>::new(space);
    let mut dressed = sigma_z::<T>().scale_real(theta.cos());
    dressed.axpy(re(theta.sin()), &sigma_x::<T>());
    let coupling = p.g * p.drive / (eps + eps);
    let mut terms = Vec::new();
    push_with_hc(&mut terms, p.resonator_detuning(), dressed.kron(&b.ad).scale_real(coupling));
    TimeDependentHamiltonian::new(space, "effective conditional displacement (detuned)", terms)
}

/// The part of the interaction-picture model dropped by the effective model:
/// `(ig/2)[σy cos Ωt + σz sin Ωt](e^{iδt}a† − e^{−iδt}a)` with `σy = i(σ₊ − σ₋)`.
pub fn build_deformation_hamiltonian<T: Real>(
    p: &QubitParams<T>,
    space: SpaceDescriptor,
) -> Result<TimeDependentHamiltonian<T>, ModelError> {
    need_levels(space, 2, "deformation term")?;
    need_resonant(p, "the deformation term")?;
    let b = Blocks::<T>::new(space);
    let i = imag_unit::<T>();
    let sy = sigma_y_conv::<T>();
    let sz = sigma_z::<T>();
    // σy cos Ωt + σz sin Ωt = e^{iΩt}(σy − iσz)/2 + e^{−iΩt}(σy + iσz)/2
    let up = (&sy - &sz.scale(i)).scale_real(T::lit(0.5));
    let down = (&sy + &sz.scale(i)).scale_real(T::lit(0.5));
    let pre = i * p.g * T::lit(0.5);
    let (w, d) = (p.drive, p.resonator_detuning());
    let terms = vec![
        (Modulation::Exp { omega: w + d }, up.kron(&b.ad).scale(pre)),
        (Modulation::Exp { omega: w - d }, up.kron(&b.a).scale(-pre)),
        (Modulation::Exp { omega: d - w }, down.kron(&b.ad).scale(pre)),
        (Modulation::Exp { omega: -w - d }, down.kron(&b.a).scale(-pre)),
    ];
    TimeDependentHamiltonian::new(space, "cat deformation term", terms)
}

/// Lab-frame qubit model with a stray resonator drive and its cancellation
/// tone. The two tones are summed as phasors; a sum below 1e-12 of the
/// larger amplitude counts as exact cancellation and adds no term.
pub fn build_spurious_model<T: Real>(
    p: &QubitParams<T>,
    s: &SpuriousDriveParams<T>,
    space: SpaceDescriptor,
) -> Result<TimeDependentHamiltonian<T>, ModelError> {
    let base = build_driven_qrm_lab(p, space)?;
    let phasor = cx(s.stray * s.stray_phase.cos(), s.stray * s.stray_phase.sin())
        + cx(s.cancel * s.cancel_phase.cos(), s.cancel * s.cancel_phase.sin());
    let scale = s.stray.abs().max(s.cancel.abs());
    let mut terms = base.terms().to_vec();
    if phasor.norm() > T::lit(1e-12) * scale {
        let b = Blocks::<T>::new(space);
        terms
            .push((Modulation::Cos { omega: p.omega_d, phase: phasor.im.atan2(phasor.re) }, b.id_a.kron(&b.x()).scale_real(phasor.norm())));
    }
    TimeDependentHamiltonian::new(space, "driven Rabi model with stray resonator drive", terms)
}

fn qutrit_blocks<T: Real>(p: &QutritParams<T>) -> (CMatrix<T>, CMatrix<T>) {
    let (r1, r2) = atom_raising::<T>(3, p.selection);
    (r1, r2.expect("qutrit has two transitions"))
}

/// Lab-frame driven qutrit coupled to the resonator.
pub fn build_qutrit_lab<T: Real>(p: &QutritParams<T>, space: SpaceDescriptor) -> Result<TimeDependentHamiltonian<T>, ModelError> {
    need_levels(space, 3, "qutrit model")?;
    let b = Blocks::<T>::new(space);
    let half = T::lit(0.5);
    let (r1, r2) = qutrit_blocks(p);
    let x1 = &r1 + &r1.adjoint();
    let x2 = &r2 + &r2.adjoint();
    let atom = CMatrix::from_real_diag(&[-p.omega_eg * half, p.omega_eg * half, p.tilde_omega_f() * half]);
    let mut h0 = atom.kron(&b.id_r);
    h0.axpy(re(p.omega_r), &b.id_a.kron(&b.n));
    let mut cpl = x1.scale_real(p.g1);
    cpl.axpy(re(p.g2), &x2);
    h0.axpy(re(T::one()), &cpl.kron(&b.x()));
    let mut drv = x1.scale_real(p.drive1);
    drv.axpy(re(p.drive2), &x2);
    TimeDependentHamiltonian::new(
        space,
        "driven qutrit model (lab frame)",
        vec![(Modulation::Constant, h0), (Modulation::Cos { omega: p.omega_d, phase: T::zero() }, drv.kron(&b.id_r))],
    )
}

/// Harmonic-ladder qutrit in the drive frame under the rotating-wave
/// approximation: `Ω₁/2(σ₁x + √2σ₂x) + δa†a + g₁(σ₁₊ + √2σ₂₊)a + h.c.`
pub fn build_qutrit_rwa_harmonic<T: Real>(p: &QutritParams<T>, space: SpaceDescriptor) -> Result<TimeDependentHamiltonian<T>, ModelError> {
    need_levels(space, 3, "qutrit model")?;
    if p.mode != QutritMode::HarmonicToy || p.selection != Selection::Cascade {
        return Err(ModelError::Precondition("harmonic qutrit model needs a harmonic cascade ladder".into()));
    }
    let b = Blocks::<T>::new(space);
    let s2 = T::lit(2.0).sqrt();
    let (r1, r2) = qutrit_blocks(p);
    let mut raise = r1.clone();
    raise.axpy(re(s2), &r2);
    let drive_x = &raise + &raise.adjoint();
    let mut h = drive_x.kron(&b.id_r).scale_real(p.drive1 * T::lit(0.5));
    h.axpy(re(p.resonator_detuning()), &b.id_a.kron(&b.n));
    let jc = raise.kron(&b.a).scale_real(p.g1);
    h.axpy(re(T::one()), &jc);
    h.axpy(re(T::one()), &jc.adjoint());
    TimeDependentHamiltonian::new(space, "harmonic qutrit (rotating-wave, drive frame)", vec![(Modulation::Constant, h)])
}

/// Anharmonic qutrit in its dressed frame:
/// `Δ₁/2(|e⟩⟨e|−|g⟩⟨g|) + Σ/2|f⟩⟨f| + δa†a + Ω₁/2σ₁x + Ω₂/2σ₂x + (g₁σ₁₊ + g₂σ₂₊)a + h.c.`
pub fn build_arbitrary_anharmonic<T: Real>(p: &QutritParams<T>, space: SpaceDescriptor) -> Result<TimeDependentHamiltonian<T>, ModelError> {
    need_levels(space, 3, "qutrit model")?;
    let b = Blocks::<T>::new(space);
    let half = T::lit(0.5);
    let (r1, r2) = qutrit_blocks(p);
    let atom = CMatrix::from_real_diag(&[-p.atom_detuning() * half, p.atom_detuning() * half, p.sigma() * half]);
    let mut h = atom.kron(&b.id_r);
    h.axpy(re(p.resonator_detuning()), &b.id_a.kron(&b.n));
    let mut drv = (&r1 + &r1.adjoint()).scale_real(p.drive1 * half);
    drv.axpy(re(p.drive2 * half), &(&r2 + &r2.adjoint()));
    h.axpy(re(T::one()), &drv.kron(&b.id_r));
    let mut raise = r1.scale_real(p.g1);
    raise.axpy(re(p.g2), &r2);
    let jc = raise.kron(&b.a);
    h.axpy(re(T::one()), &jc);
    h.axpy(re(T::one()), &jc.adjoint());
    TimeDependentHamiltonian::new(space, "anharmonic qutrit (dressed frame)", vec![(Modulation::Constant, h)])
}

/// Atom-only 3×3 drive matrix `Ω₁σ₁x/2 + Ω₂σ₂x/2` (plus `Σ/2|f⟩⟨f|`).
pub fn qutrit_drive_matrix<T: Real>(drive1: T, drive2: T, sigma: T, selection: Selection) -> CMatrix<T> {
    let half = T::lit(0.5);
    let (r1, r2) = atom_raising::<T>(3, selection);
    let r2 = r2.expect("qutrit");
    let mut m = (&r1 + &r1.adjoint()).scale_real(drive1 * half);
    m.axpy(re(drive2 * half), &(&r2 + &r2.adjoint()));
    m[(2, 2)] += re(sigma * half);
    m
}

/// Effective coupling between the outer islands of a three-island circuit:
/// `(C⁻¹)₁₃ = (C₁₂C₂₃ − C₁₃C₂₂)/det C`.
pub fn inverse_capacitance_coupling<T: Real>(c: &[[T; 3]; 3]) -> Result<T, ModelError> {
    let det = c[0][0] * (c[1][1] * c[2][2] - c[1][2] * c[2][1]) - c[0][1] * (c[1][0] * c[2][2] - c[1][2] * c[2][0])
        + c[0][2] * (c[1][0] * c[2][1] - c[1][1] * c[2][0]);
    let scale = c.iter().flatten().fold(T::zero(), |m, x| m.max(x.abs()));
    if det.abs() <= T::epsilon() * T::lit(16.0) * scale * scale * scale {
        return Err(ModelError::Invalid("capacitance matrix is singular".into()));
    }
    Ok((c[0][1] * c[1][2] - c[0][2] * c[1][1]) / det)
}
