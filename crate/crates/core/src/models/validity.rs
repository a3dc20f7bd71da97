use crate::linalg::hermitian_eigen;
use crate::scalar::Real;
use std::fmt;

use super::builders::qutrit_drive_matrix;
use super::params::{QubitParams, QutritParams};

/// Ratio below which a "≪" condition passes; at or above it is marginal.
pub const PASS_RATIO: f64 = 0.1;
/// Ratio above which a condition fails outright.
pub const FAIL_RATIO: f64 = 0.33;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Verdict {
    Pass,
    Marginal,
    Fail,
}

impl Verdict {
    pub fn from_ratio(r: f64) -> Self {
        if r < PASS_RATIO * (1.0 - 1e-9) {
            Verdict::Pass
        } else if r <= FAIL_RATIO {
            Verdict::Marginal
        } else {
            Verdict::Fail
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Marginal => "marginal",
            Verdict::Fail => "fail",
        }
    }
}

/// One `lhs ≪ rhs` inequality evaluated at concrete parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidityEntry {
    pub name: String,
    pub condition: String,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidityReport {
    pub entries: Vec<ValidityEntry>,
    pub notes: Vec<String>,
}

impl ValidityReport {
    fn push(&mut self, name: &str, condition: &str, lhs: f64, rhs: f64) {
        let ratio = if lhs == 0.0 {
            0.0
        } else if rhs == 0.0 {
            f64::INFINITY
        } else {
            lhs.abs() / rhs.abs()
        };
        self.entries.push(ValidityEntry {
            name: name.to_string(),
            condition: condition.to_string(),
            lhs,
            rhs,
            ratio,
            verdict: Verdict::from_ratio(ratio),
        });
    }

    /// Worst verdict over all entries.
    pub fn overall(&self) -> Verdict {
        self.entries.iter().map(|e| e.verdict).max().unwrap_or(Verdict::Pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ValidityEntry> {
        self.entries.iter().filter(|e| e.verdict == Verdict::Fail)
    }

    pub fn entry(&self, name: &str) -> Option<&ValidityEntry> {
        self.entries.iter().find(|e| e.name == name)
    }
}

impl fmt::Display for ValidityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<34} {:<34} {:>12} {:>9}", "condition", "inequality", "ratio", "verdict")?;
        for e in &self.entries {
            writeln!(f, "{:<34} {:<34} {:>12.5e} {:>9}", e.name, e.condition, e.ratio, e.verdict.label())?;
        }
        for n in &self.notes {
            writeln!(f, "note: {n}")?;
        }
        write!(f, "overall: {}", self.overall().label())
    }
}

pub enum ValidityInput<'a, T> {
    Qubit(&'a QubitParams<T>),
    Qutrit(&'a QutritParams<T>),
}

/// Evaluates every approximation inequality that applies to the parameters.
pub fn check_rwa_report<T: Real>(input: ValidityInput<'_, T>) -> ValidityReport {
    match input {
        ValidityInput::Qubit(p) => qubit_report(p),
        ValidityInput::Qutrit(p) => qutrit_report(p),
    }
}

fn qubit_report<T: Real>(p: &QubitParams<T>) -> ValidityReport {
    let f = |x: T| x.as_f64();
    let (wq, wr, wd, g, om) = (f(p.omega_q), f(p.omega_r), f(p.omega_d), f(p.g), f(p.drive));
    let (delta_a, delta_r) = (f(p.atom_detuning()), f(p.resonator_detuning()));
    let mut r = ValidityReport::default();
    r.push("qubit-resonator detuning", "|w_q - w_r| << w_q + w_r", (wq - wr).abs(), wq + wr);
    r.push("weak coupling", "g << min(w_q, w_r)", g, wq.min(wr));
    r.push("counter-rotating coupling", "g << 2 w_d", g, 2.0 * wd);
    r.push("counter-rotating drive", "Omega << 4 w_d", om, 4.0 * wd);
    if delta_a == 0.0 {
        r.push("strong driving (coupling)", "g << Omega", g, om);
        r.push("strong driving (detuning)", "|delta| << Omega", delta_a.abs().max(delta_r.abs()), om);
        if g > 0.0 && Verdict::from_ratio(g / om) != Verdict::Pass {
            r.notes.push("g/Omega is not small: expect a deformed cat (drive too weak to freeze the dressed states)".into());
        }
    } else {
        let eps = om.hypot(delta_a);
        r.push("strong driving (coupling)", "g << eps", g, eps);
        r.push("strong driving (detuning)", "|delta| << eps", delta_r.abs(), eps);
        r.push("counter-rotating dressed drive", "eps << 4 w_d", eps, 4.0 * wd);
        if g > 0.0 && Verdict::from_ratio(g / eps) != Verdict::Pass {
            r.notes.push("g/eps is not small: expect a deformed cat".into());
        }
    }
    r
}

fn qutrit_report<T: Real>(p: &QutritParams<T>) -> ValidityReport {
    let f = |x: T| x.as_f64();
    let (weg, wfe, wr, wd) = (f(p.omega_eg), f(p.omega_fe), f(p.omega_r), f(p.omega_d));
    let (g1, g2, o1, o2) = (f(p.g1), f(p.g2), f(p.drive1), f(p.drive2));
    let mut r = ValidityReport::default();
    r.push("first transition detuning", "|w_eg - w_r| << w_eg + w_r", (weg - wr).abs(), weg + wr);
    r.push("second transition detuning", "|w_fe - w_r| << w_fe + w_r", (wfe - wr).abs(), wfe + wr);
    r.push("weak coupling (first)", "g1 << min(w_eg, w_r)", g1, weg.min(wr));
    r.push("weak coupling (second)", "g2 << min(w_fe, w_r)", g2, wfe.min(wr));
    r.push("counter-rotating coupling (first)", "g1 << 2 w_d", g1, 2.0 * wd);
    r.push("counter-rotating coupling (second)", "g2 << 2 w_d", g2, 2.0 * wd);
    r.push("counter-rotating drive (first)", "Omega1 << 4 w_d", o1, 4.0 * wd);
    r.push("counter-rotating drive (second)", "Omega2 << 4 w_d", o2, 4.0 * wd);
    // Dressed spectrum of the driven qutrit in the drive frame.
    let half = T::lit(0.5);
    let mut m = qutrit_drive_matrix(p.drive1, p.drive2, T::zero(), p.selection);
    m[(0, 0)] += crate::scalar::re(-p.atom_detuning() * half);
    m[(1, 1)] += crate::scalar::re(p.atom_detuning() * half);
    m[(2, 2)] += crate::scalar::re(p.tilde_chi() * half);
    let (vals, _) = hermitian_eigen(&m);
    let gap = vals.windows(2).map(|w| f(w[1] - w[0])).fold(f64::INFINITY, f64::min);
    let lhs = g1.max(g2).max(f(p.resonator_detuning()).abs());
    r.push("strong driving (dressed gaps)", "max(g1, g2, |delta|) << min gap", lhs, gap);
    if lhs > 0.0 && Verdict::from_ratio(lhs / gap) != Verdict::Pass {
        r.notes.push("coupling is not small against the dressed-qutrit gaps: expect a deformed cat".into());
    }
    r
}
