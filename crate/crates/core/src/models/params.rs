use crate::hilbert::Selection;
use crate::scalar::Real;

use super::ModelError;

fn check_finite<T: Real>(name: &str, x: T) -> Result<(), ModelError> {
    if !x.is_finite() {
        return Err(ModelError::Invalid(format!("{name} is not finite")));
    }
    Ok(())
}

fn check_positive<T: Real>(name: &str, x: T) -> Result<(), ModelError> {
    check_finite(name, x)?;
    if x <= T::zero() {
        return Err(ModelError::Invalid(format!("{name} must be positive")));
    }
    Ok(())
}

fn check_nonneg<T: Real>(name: &str, x: T) -> Result<(), ModelError> {
    check_finite(name, x)?;
    if x < T::zero() {
        return Err(ModelError::Invalid(format!("{name} must be non-negative")));
    }
    Ok(())
}

/// Driven qubit coupled to a resonator. All frequencies in rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitParams<T> {
    pub omega_q: T,
    pub omega_r: T,
    pub omega_d: T,
    pub g: T,
    /// Drive amplitude Ω.
    pub drive: T,
}

impl<T: Real> QubitParams<T> {
    pub fn new(omega_q: T, omega_r: T, omega_d: T, g: T, drive: T) -> Result<Self, ModelError> {
        check_positive("omega_q", omega_q)?;
        check_positive("omega_r", omega_r)?;
        check_positive("omega_d", omega_d)?;
        check_nonneg("g", g)?;
        check_nonneg("Omega", drive)?;
        Ok(Self { omega_q, omega_r, omega_d, g, drive })
    }

    /// Δ = ω_q − ω_d.
    pub fn atom_detuning(&self) -> T {
        self.omega_q - self.omega_d
    }

    /// δ = ω_r − ω_d.
    pub fn resonator_detuning(&self) -> T {
        self.omega_r - self.omega_d
    }

    /// ε = √(Ω² + Δ²).
    pub fn dressed_splitting(&self) -> T {
        self.drive.hypot(self.atom_detuning())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QutritMode {
    /// Harmonic ladder: g₂ = √2 g₁, Ω₂ = √2 Ω₁ and no anharmonic detuning.
    HarmonicToy,
    /// Any anharmonicity; only g₁/g₂ = Ω₁/Ω₂ is required.
    #[default]
    General,
}

/// Driven qutrit coupled to a resonator. All frequencies in rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QutritParams<T> {
    pub omega_eg: T,
    pub omega_fe: T,
    pub omega_r: T,
    pub omega_d: T,
    pub g1: T,
    pub g2: T,
    pub drive1: T,
    pub drive2: T,
    pub selection: Selection,
    pub mode: QutritMode,
}

impl<T: Real> QutritParams<T> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        omega_eg: T,
        omega_fe: T,
        omega_r: T,
        omega_d: T,
        g1: T,
        g2: T,
        drive1: T,
        drive2: T,
        selection: Selection,
        mode: QutritMode,
    ) -> Result<Self, ModelError> {
        check_positive("omega_eg", omega_eg)?;
        check_positive("omega_fe", omega_fe)?;
        check_positive("omega_r", omega_r)?;
        check_positive("omega_d", omega_d)?;
        check_nonneg("g1", g1)?;
        check_nonneg("g2", g2)?;
        check_nonneg("Omega1", drive1)?;
        check_nonneg("Omega2", drive2)?;
        let p = Self { omega_eg, omega_fe, omega_r, omega_d, g1, g2, drive1, drive2, selection, mode };
        let tol = T::lit(1e-9);
        match mode {
            QutritMode::HarmonicToy => {
                let s2 = T::lit(2.0).sqrt();
                if !rel_close(g2, s2 * g1, tol) {
                    return Err(ModelError::Invalid("harmonic mode needs g2 = sqrt(2) g1".into()));
                }
                if !rel_close(drive2, s2 * drive1, tol) {
                    return Err(ModelError::Invalid("harmonic mode needs Omega2 = sqrt(2) Omega1".into()));
                }
                if p.tilde_chi().abs() > tol * omega_d {
                    return Err(ModelError::Invalid("harmonic mode needs a harmonic level ladder (tilde chi = 0)".into()));
                }
            }
            QutritMode::General => {
                if !rel_close(g1 * drive2, g2 * drive1, tol) {
                    return Err(ModelError::Invalid("coupling ratio g1/g2 must equal drive ratio Omega1/Omega2".into()));
                }
            }
        }
        Ok(p)
    }

    /// ξ = ω_fe − ω_eg.
    pub fn anharmonicity(&self) -> T {
        self.omega_fe - self.omega_eg
    }

    /// Δ₁ = ω_eg − ω_d.
    pub fn atom_detuning(&self) -> T {
        self.omega_eg - self.omega_d
    }

    /// δ = ω_r − ω_d.
    pub fn resonator_detuning(&self) -> T {
        self.omega_r - self.omega_d
    }

    /// ω̃_f = 2ω_fe + ω_eg; the bare `|f⟩` energy is ω̃_f/2.
    pub fn tilde_omega_f(&self) -> T {
        self.omega_fe + self.omega_fe + self.omega_eg
    }

    /// χ̃ = ω̃_f − 3ω_d, the `|f⟩` detuning (doubled) in the frame rotating at
    /// the drive frequency.
    pub fn tilde_chi(&self) -> T {
        self.tilde_omega_f() - T::lit(3.0) * self.omega_d
    }

    /// Σ = ω̃_f + ω_d, the `|f⟩` energy (doubled) of the anharmonic dressed frame.
    pub fn sigma(&self) -> T {
        self.tilde_omega_f() + self.omega_d
    }
}

fn rel_close<T: Real>(a: T, b: T, tol: T) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(T::min_positive_value())
}

/// Lindblad rates in 1/s.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DecoherenceParams<T> {
    pub gamma1: T,
    pub gamma2: T,
    pub gamma_phi: T,
    pub kappa: T,
}

impl<T: Real> DecoherenceParams<T> {
    pub fn new(gamma1: T, gamma2: T, gamma_phi: T, kappa: T) -> Result<Self, ModelError> {
        check_nonneg("gamma1", gamma1)?;
        check_nonneg("gamma2", gamma2)?;
        check_nonneg("gamma_phi", gamma_phi)?;
        check_nonneg("kappa", kappa)?;
        Ok(Self { gamma1, gamma2, gamma_phi, kappa })
    }

    /// Qutrit convention γ₂ = 2γ₁ (also harmless for a qubit).
    pub fn with_default_gamma2(gamma1: T, gamma_phi: T, kappa: T) -> Result<Self, ModelError> {
        Self::new(gamma1, gamma1 + gamma1, gamma_phi, kappa)
    }

    pub fn closed() -> Self {
        Self { gamma1: T::zero(), gamma2: T::zero(), gamma_phi: T::zero(), kappa: T::zero() }
    }

    pub fn is_closed(&self) -> bool {
        self.gamma1 == T::zero() && self.gamma2 == T::zero() && self.gamma_phi == T::zero() && self.kappa == T::zero()
    }
}

/// Stray resonator drive and its cancellation tone (phases in rad).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SpuriousDriveParams<T> {
    pub stray: T,
    pub stray_phase: T,
    pub cancel: T,
    pub cancel_phase: T,
}
