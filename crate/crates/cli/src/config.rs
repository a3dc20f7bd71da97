//! Scenario files: TOML-compatible `key = value` lines under section headers.
//!
//! Frequencies take a unit suffix and are entered as cyclic values
//! (`g_MHz = 20` means g = 2π·20 MHz); `_rad_s` gives angular values
//! directly. Decay rates use `_MHz`, `_kHz` or `_per_s` without any 2π.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;

use catsim_core::hilbert::{AtomLevel, Selection};
use catsim_core::models::{DecoherenceParams, QubitParams, QutritMode, QutritParams, SpuriousDriveParams};
use serde::Deserialize;
use toml::Spanned;

/// Error with the 1-based line it refers to (0 when no line applies).
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line > 0 {
            write!(f, "line {}: {}", self.line, self.message)
        } else {
            write!(f, "{}", self.message)
        }
    }
}

pub const SCHEMA: &str = "\
name = \"...\"
[model]       variant = qrm_lab | rwa | effective | deformation | spurious | qutrit_lab | qutrit_rwa | arbitrary_anharmonic
              frame = lab | drive-rotating | interaction   fock_cutoff = 40
              selection = cascade | vee | lambda   qutrit_mode = general | harmonic
[params]      qubit: omega_q | Delta, omega_r | delta, omega_d, g, Omega
              qutrit: omega_eg | Delta1, omega_fe | xi, omega_r | delta, omega_d, g1, g2, Omega1, Omega2
              spurious: stray, cancel, stray_phase_rad, cancel_phase_rad
              frequency suffixes: _GHz _MHz _kHz (cyclic, times 2 pi) or _rad_s
[decoherence] gamma1 gamma2 gamma_phi kappa with suffix _MHz _kHz or _per_s (no 2 pi)
[initial]     state = g0 | e0 | f0 | plus0 | minus0 | dark0 | encode   c_g = [re, im]   c_e = [re, im]
[time]        t_end_ns | t_end_s | g_t_end_over_2pi   dt_ps | dt_s   samples = 201
[measure]     atom = g | e | f | plus | minus   time_ns | time_s | g_t_over_2pi   align = true
[wigner]      points = 161   extent = 4.0   pgm = true
[sweep]       x_axis, y_axis = kappa | gamma1 | gamma2 | gamma_phi
              x_min_MHz, x_max_MHz, x_points (same for y)";

fn line_of(src: &str, offset: usize) -> usize {
    src[..offset.min(src.len())].bytes().filter(|b| *b == b'\n').count() + 1
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    name: Spanned<String>,
    model: RawModel,
    params: BTreeMap<Spanned<String>, Spanned<f64>>,
    #[serde(default)]
    decoherence: BTreeMap<Spanned<String>, Spanned<f64>>,
    initial: Option<RawInitial>,
    time: RawTime,
    measure: Option<RawMeasure>,
    wigner: Option<RawWigner>,
    sweep: Option<BTreeMap<Spanned<String>, Spanned<toml::Value>>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    variant: Spanned<String>,
    frame: Option<Spanned<String>>,
    fock_cutoff: Option<Spanned<i64>>,
    selection: Option<Spanned<String>>,
    qutrit_mode: Option<Spanned<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInitial {
    state: Spanned<String>,
    c_g: Option<Spanned<[f64; 2]>>,
    c_e: Option<Spanned<[f64; 2]>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTime {
    t_end_ns: Option<Spanned<f64>>,
    t_end_s: Option<Spanned<f64>>,
    g_t_end_over_2pi: Option<Spanned<f64>>,
    dt_ps: Option<Spanned<f64>>,
    dt_s: Option<Spanned<f64>>,
    samples: Option<Spanned<i64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMeasure {
    atom: Spanned<String>,
    time_ns: Option<Spanned<f64>>,
    time_s: Option<Spanned<f64>>,
    g_t_over_2pi: Option<Spanned<f64>>,
    align: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWigner {
    points: Option<Spanned<i64>>,
    extent: Option<Spanned<f64>>,
    pgm: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    QrmLab,
    Rwa,
    Effective,
    Deformation,
    Spurious,
    QutritLab,
    QutritRwa,
    ArbitraryAnharmonic,
}

impl Variant {
    pub const ALL: [(&'static str, Variant); 8] = [
        ("qrm_lab", Variant::QrmLab),
        ("rwa", Variant::Rwa),
        ("effective", Variant::Effective),
        ("deformation", Variant::Deformation),
        ("spurious", Variant::Spurious),
        ("qutrit_lab", Variant::QutritLab),
        ("qutrit_rwa", Variant::QutritRwa),
        ("arbitrary_anharmonic", Variant::ArbitraryAnharmonic),
    ];

    pub fn label(self) -> &'static str {
        Self::ALL.iter().find(|(_, v)| *v == self).map(|(s, _)| *s).expect("listed")
    }

    pub fn is_qutrit(self) -> bool {
        matches!(self, Variant::QutritLab | Variant::QutritRwa | Variant::ArbitraryAnharmonic)
    }

    /// Frames each variant can be integrated in; the first is the default.
    pub fn frames(self) -> &'static [Frame] {
        match self {
            Variant::QrmLab | Variant::Spurious | Variant::QutritLab => &[Frame::Lab, Frame::DriveRotating],
            Variant::Rwa => &[Frame::DriveRotating, Frame::Interaction],
            Variant::Effective | Variant::Deformation => &[Frame::Interaction],
            Variant::QutritRwa | Variant::ArbitraryAnharmonic => &[Frame::DriveRotating],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    Lab,
    DriveRotating,
    Interaction,
}

impl Frame {
    pub fn label(self) -> &'static str {
        match self {
            Frame::Lab => "lab",
            Frame::DriveRotating => "drive-rotating",
            Frame::Interaction => "interaction",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "lab" => Some(Frame::Lab),
            "drive-rotating" | "drive" | "rotating" => Some(Frame::DriveRotating),
            "interaction" => Some(Frame::Interaction),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Physics {
    Qubit(QubitParams<f64>),
    Qutrit(QutritParams<f64>),
}

impl Physics {
    /// Coupling used for `g t / 2π` time entry (g₁ for a qutrit).
    pub fn coupling(&self) -> f64 {
        match self {
            Physics::Qubit(p) => p.g,
            Physics::Qutrit(p) => p.g1,
        }
    }

    pub fn atom_levels(&self) -> usize {
        match self {
            Physics::Qubit(_) => 2,
            Physics::Qutrit(_) => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialState {
    Level(AtomLevel),
    Plus,
    Minus,
    Dark,
    Encode { c_g: [f64; 2], c_e: [f64; 2] },
}

impl InitialState {
    pub fn label(&self) -> String {
        match self {
            InitialState::Level(l) => format!("{}0", l.label()),
            InitialState::Plus => "plus0".into(),
            InitialState::Minus => "minus0".into(),
            InitialState::Dark => "dark0".into(),
            InitialState::Encode { .. } => "encode".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeasureAtom {
    Level(AtomLevel),
    Plus,
    Minus,
}

impl MeasureAtom {
    pub fn label(&self) -> &'static str {
        match self {
            MeasureAtom::Level(l) => l.label(),
            MeasureAtom::Plus => "plus",
            MeasureAtom::Minus => "minus",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurePlan {
    pub atom: MeasureAtom,
    /// Nominal measurement time in seconds.
    pub time: f64,
    /// Shift to the nearest revival of the driven atom.
    pub align: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WignerRequest {
    pub points: usize,
    /// Half-width of the square grid; `None` sizes it from the state.
    pub extent: Option<f64>,
    pub pgm: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateAxis {
    Gamma1,
    Gamma2,
    GammaPhi,
    Kappa,
}

impl RateAxis {
    pub fn label(self) -> &'static str {
        match self {
            RateAxis::Gamma1 => "gamma1",
            RateAxis::Gamma2 => "gamma2",
            RateAxis::GammaPhi => "gamma_phi",
            RateAxis::Kappa => "kappa",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "gamma1" => Some(RateAxis::Gamma1),
            "gamma2" => Some(RateAxis::Gamma2),
            "gamma_phi" => Some(RateAxis::GammaPhi),
            "kappa" => Some(RateAxis::Kappa),
            _ => None,
        }
    }

    pub fn set(self, d: &mut DecoherenceParams<f64>, v: f64) {
        match self {
            RateAxis::Gamma1 => d.gamma1 = v,
            RateAxis::Gamma2 => d.gamma2 = v,
            RateAxis::GammaPhi => d.gamma_phi = v,
            RateAxis::Kappa => d.kappa = v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepAxis {
    pub rate: RateAxis,
    /// Inclusive range in 1/s.
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl SweepAxis {
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.min];
        }
        let step = (self.max - self.min) / (self.points - 1) as f64;
        (0..self.points).map(|k| if k + 1 == self.points { self.max } else { self.min + step * k as f64 }).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub x: SweepAxis,
    pub y: SweepAxis,
}

/// Fully resolved scenario, all quantities in SI with angular frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub variant: Variant,
    pub frame: Frame,
    pub fock_cutoff: usize,
    pub physics: Physics,
    pub spurious: Option<SpuriousDriveParams<f64>>,
    pub decoherence: DecoherenceParams<f64>,
    pub initial: InitialState,
    pub t_end: f64,
    pub dt: Option<f64>,
    pub samples: usize,
    pub measure: Option<MeasurePlan>,
    pub wigner: Option<WignerRequest>,
    pub sweep: Option<SweepSpec>,
}

impl Scenario {
    pub fn is_open(&self) -> bool {
        !self.decoherence.is_closed()
    }
}

struct Ctx<'a> {
    src: &'a str,
}

impl Ctx<'_> {
    fn err<T>(&self, span: std::ops::Range<usize>, msg: impl Into<String>) -> Result<T, ConfigError> {
        Err(ConfigError { line: line_of(self.src, span.start), message: msg.into() })
    }
}

#[derive(Clone, Copy)]
enum Kind {
    Frequency,
    Rate,
}

fn unit_factor(kind: Kind, unit: &str) -> Option<f64> {
    match (kind, unit) {
        (Kind::Frequency, "GHz") => Some(TAU * 1e9),
        (Kind::Frequency, "MHz") => Some(TAU * 1e6),
        (Kind::Frequency, "kHz") => Some(TAU * 1e3),
        (Kind::Frequency, "rad_s") => Some(1.0),
        (Kind::Rate, "MHz") => Some(1e6),
        (Kind::Rate, "kHz") => Some(1e3),
        (Kind::Rate, "per_s") => Some(1.0),
        _ => None,
    }
}

/// Suffixed numeric keys of one section, consumed one by one so that
/// leftovers can be reported as unknown.
struct UnitMap<'a> {
    ctx: &'a Ctx<'a>,
    section: &'static str,
    entries: Vec<(String, Option<String>, f64, std::ops::Range<usize>)>,
    used: Vec<bool>,
}

impl<'a> UnitMap<'a> {
    fn new(ctx: &'a Ctx<'a>, section: &'static str, map: &BTreeMap<Spanned<String>, Spanned<f64>>) -> Self {
        let mut entries = Vec::new();
        for (k, v) in map {
            let key = k.get_ref().as_str();
            let (base, unit) = split_unit(key);
            entries.push((base.to_string(), unit.map(str::to_string), *v.get_ref(), k.span()));
        }
        let used = vec![false; entries.len()];
        Self { ctx, section, entries, used }
    }

    fn take(&mut self, base: &str, kind: Kind) -> Result<Option<f64>, ConfigError> {
        let mut found = None;
        for (i, (b, unit, v, span)) in self.entries.iter().enumerate() {
            if b != base {
                continue;
            }
            if found.is_some() {
                return self.ctx.err(span.clone(), format!("[{}] {base} is given twice", self.section));
            }
            let f = match unit.as_deref().and_then(|u| unit_factor(kind, u)) {
                Some(f) => f,
                None => {
                    let allowed = match kind {
                        Kind::Frequency => "_GHz, _MHz, _kHz or _rad_s",
                        Kind::Rate => "_MHz, _kHz or _per_s",
                    };
                    return self.ctx.err(span.clone(), format!("[{}] {base} needs a unit suffix: {allowed}", self.section));
                }
            };
            if !v.is_finite() {
                return self.ctx.err(span.clone(), format!("[{}] {base} must be finite", self.section));
            }
            self.used[i] = true;
            found = Some((v * f, i));
        }
        Ok(found.map(|(v, _)| v))
    }

    fn take_plain(&mut self, key: &str) -> Option<f64> {
        for (i, (b, unit, v, _)) in self.entries.iter().enumerate() {
            let full = match unit {
                Some(u) => format!("{b}_{u}"),
                None => b.clone(),
            };
            if full == key {
                self.used[i] = true;
                return Some(*v);
            }
        }
        None
    }

    fn require(&mut self, base: &str, kind: Kind, span: std::ops::Range<usize>) -> Result<f64, ConfigError> {
        match self.take(base, kind)? {
            Some(v) => Ok(v),
            None => self.ctx.err(span, format!("[{}] is missing {base}", self.section)),
        }
    }

    fn finish(&self) -> Result<(), ConfigError> {
        for (i, (b, unit, _, span)) in self.entries.iter().enumerate() {
            if !self.used[i] {
                let key = match unit {
                    Some(u) => format!("{b}_{u}"),
                    None => b.clone(),
                };
                return self.ctx.err(span.clone(), format!("[{}] unknown or unused key {key}", self.section));
            }
        }
        Ok(())
    }
}

fn split_unit(key: &str) -> (&str, Option<&str>) {
    for unit in ["rad_s", "per_s", "GHz", "MHz", "kHz"] {
        if let Some(base) = key.strip_suffix(unit).and_then(|b| b.strip_suffix('_')) {
            return (base, Some(unit));
        }
    }
    (key, None)
}

/// Parses and resolves a scenario file.
pub fn parse_scenario(src: &str) -> Result<Scenario, ConfigError> {
    if src.trim().is_empty() {
        return Err(ConfigError { line: 0, message: format!("empty configuration; expected\n{SCHEMA}") });
    }
    let raw: RawConfig = toml::from_str(src).map_err(|e| {
        let line = e.span().map(|s| line_of(src, s.start)).unwrap_or(0);
        ConfigError { line, message: e.message().to_string() }
    })?;
    let ctx = Ctx { src };
    resolve(&ctx, raw)
}

fn resolve(ctx: &Ctx<'_>, raw: RawConfig) -> Result<Scenario, ConfigError> {
    let name = raw.name.get_ref().trim().to_string();
    if name.is_empty() || name.contains(['/', '\\']) {
        return ctx.err(raw.name.span(), "name must be non-empty and contain no path separators");
    }
    let vspan = raw.model.variant.span();
    let variant = match Variant::ALL.iter().find(|(s, _)| *s == raw.model.variant.get_ref()) {
        Some((_, v)) => *v,
        None => {
            let names: Vec<&str> = Variant::ALL.iter().map(|(s, _)| *s).collect();
            return ctx.err(vspan, format!("unknown variant {:?}; expected one of {}", raw.model.variant.get_ref(), names.join(", ")));
        }
    };
    let frame = match &raw.model.frame {
        None => variant.frames()[0],
        Some(f) => match Frame::parse(f.get_ref()) {
            Some(fr) if variant.frames().contains(&fr) => fr,
            Some(fr) => {
                let ok: Vec<&str> = variant.frames().iter().map(|f| f.label()).collect();
                return ctx
                    .err(f.span(), format!("frame {} is not available for {}; use {}", fr.label(), variant.label(), ok.join(" or ")));
            }
            None => return ctx.err(f.span(), format!("unknown frame {:?}", f.get_ref())),
        },
    };
    let fock_cutoff = match &raw.model.fock_cutoff {
        None => 40,
        Some(n) if *n.get_ref() >= 4 && *n.get_ref() <= 400 => *n.get_ref() as usize,
        Some(n) => return ctx.err(n.span(), "fock_cutoff must lie in 4..=400"),
    };
    let selection = match &raw.model.selection {
        None => Selection::Cascade,
        Some(s) => match Selection::parse(s.get_ref()) {
            Some(sel) if variant.is_qutrit() => sel,
            Some(_) => return ctx.err(s.span(), "selection applies to qutrit variants only"),
            None => return ctx.err(s.span(), format!("unknown selection {:?}", s.get_ref())),
        },
    };
    let mode = match &raw.model.qutrit_mode {
        None if variant == Variant::QutritRwa => QutritMode::HarmonicToy,
        None => QutritMode::General,
        Some(s) if !variant.is_qutrit() => return ctx.err(s.span(), "qutrit_mode applies to qutrit variants only"),
        Some(s) => match s.get_ref().as_str() {
            "general" => QutritMode::General,
            "harmonic" => QutritMode::HarmonicToy,
            other => return ctx.err(s.span(), format!("unknown qutrit_mode {other:?}")),
        },
    };

    let section_line = |name: &str| -> std::ops::Range<usize> {
        let off = ctx.src.find(&format!("[{name}]")).unwrap_or(0);
        off..off
    };
    let pspan = section_line("params");
    let mut pm = UnitMap::new(ctx, "params", &raw.params);
    let omega_d = pm.require("omega_d", Kind::Frequency, pspan.clone())?;
    let omega_r = either(ctx, &mut pm, "omega_r", "delta", omega_d, pspan.clone())?;
    let physics = if variant.is_qutrit() {
        let omega_eg = either(ctx, &mut pm, "omega_eg", "Delta1", omega_d, pspan.clone())?;
        let omega_fe = either(ctx, &mut pm, "omega_fe", "xi", omega_eg, pspan.clone())?;
        let g1 = pm.require("g1", Kind::Frequency, pspan.clone())?;
        let o1 = pm.require("Omega1", Kind::Frequency, pspan.clone())?;
        let s2 = 2f64.sqrt();
        let (g2, o2) = match (pm.take("g2", Kind::Frequency)?, pm.take("Omega2", Kind::Frequency)?) {
            (Some(g2), Some(o2)) => (g2, o2),
            (None, None) if mode == QutritMode::HarmonicToy => (s2 * g1, s2 * o1),
            (None, Some(o2)) => (g1 * o2 / o1, o2),
            _ => return ctx.err(pspan, "give Omega2 (and optionally g2) for a general qutrit"),
        };
        let p = QutritParams::new(omega_eg, omega_fe, omega_r, omega_d, g1, g2, o1, o2, selection, mode)
            .or_else(|e| ctx.err(pspan.clone(), e.to_string()))?;
        Physics::Qutrit(p)
    } else {
        let omega_q = either(ctx, &mut pm, "omega_q", "Delta", omega_d, pspan.clone())?;
        let g = pm.require("g", Kind::Frequency, pspan.clone())?;
        let om = pm.require("Omega", Kind::Frequency, pspan.clone())?;
        let p = QubitParams::new(omega_q, omega_r, omega_d, g, om).or_else(|e| ctx.err(pspan.clone(), e.to_string()))?;
        Physics::Qubit(p)
    };
    let spurious = if variant == Variant::Spurious {
        let stray = pm.take("stray", Kind::Frequency)?.unwrap_or(0.0);
        let cancel = pm.take("cancel", Kind::Frequency)?.unwrap_or(0.0);
        let stray_phase = pm.take_plain("stray_phase_rad").unwrap_or(0.0);
        let cancel_phase = pm.take_plain("cancel_phase_rad").unwrap_or(0.0);
        Some(SpuriousDriveParams { stray, stray_phase, cancel, cancel_phase })
    } else {
        None
    };
    pm.finish()?;

    let dspan = section_line("decoherence");
    let mut dm = UnitMap::new(ctx, "decoherence", &raw.decoherence);
    let gamma1 = dm.take("gamma1", Kind::Rate)?.unwrap_or(0.0);
    let gamma_phi = dm.take("gamma_phi", Kind::Rate)?.unwrap_or(0.0);
    let kappa = dm.take("kappa", Kind::Rate)?.unwrap_or(0.0);
    let gamma2 = match dm.take("gamma2", Kind::Rate)? {
        Some(v) => v,
        None if variant.is_qutrit() => 2.0 * gamma1,
        None => 0.0,
    };
    dm.finish()?;
    let decoherence = DecoherenceParams::new(gamma1, gamma2, gamma_phi, kappa).or_else(|e| ctx.err(dspan, e.to_string()))?;

    let levels = physics.atom_levels();
    let initial = match &raw.initial {
        None => InitialState::Level(AtomLevel::G),
        Some(init) => {
            let s = init.state.get_ref().as_str();
            let st = match s {
                "plus0" => InitialState::Plus,
                "minus0" => InitialState::Minus,
                "dark0" if levels == 3 => InitialState::Dark,
                "encode" => {
                    let c_g = init.c_g.as_ref().map(|c| *c.get_ref()).unwrap_or([0.0, 0.0]);
                    let c_e = init.c_e.as_ref().map(|c| *c.get_ref()).unwrap_or([0.0, 0.0]);
                    if c_g.iter().chain(&c_e).all(|x| *x == 0.0) {
                        return ctx.err(init.state.span(), "encode needs a non-zero c_g or c_e");
                    }
                    InitialState::Encode { c_g, c_e }
                }
                _ => match s.strip_suffix('0').and_then(AtomLevel::parse) {
                    Some(l) if l.index() < levels => InitialState::Level(l),
                    _ => return ctx.err(init.state.span(), format!("initial state {s:?} is not valid for a {levels}-level atom")),
                },
            };
            if !matches!(st, InitialState::Encode { .. }) {
                if let Some(c) = init.c_g.as_ref().or(init.c_e.as_ref()) {
                    return ctx.err(c.span(), "c_g / c_e apply to state = \"encode\" only");
                }
            }
            st
        }
    };

    let g = physics.coupling();
    let t_end = one_time(ctx, &raw.time.t_end_ns, 1e-9, &raw.time.t_end_s, &raw.time.g_t_end_over_2pi, g, section_line("time"), "t_end")?;
    let dt = match (&raw.time.dt_ps, &raw.time.dt_s) {
        (Some(_), Some(b)) => return ctx.err(b.span(), "give dt_ps or dt_s, not both"),
        (Some(a), None) => Some(positive(ctx, a, 1e-12)?),
        (None, Some(b)) => Some(positive(ctx, b, 1.0)?),
        (None, None) => None,
    };
    let samples = match &raw.time.samples {
        None => 201,
        Some(s) if *s.get_ref() >= 2 && *s.get_ref() <= 100_000 => *s.get_ref() as usize,
        Some(s) => return ctx.err(s.span(), "samples must lie in 2..=100000"),
    };

    let measure = match &raw.measure {
        None => None,
        Some(m) => {
            let a = m.atom.get_ref().as_str();
            let atom = match a {
                "plus" => MeasureAtom::Plus,
                "minus" => MeasureAtom::Minus,
                _ => match AtomLevel::parse(a) {
                    Some(l) if l.index() < levels => MeasureAtom::Level(l),
                    _ => return ctx.err(m.atom.span(), format!("cannot measure {a:?} on a {levels}-level atom")),
                },
            };
            if levels == 3 && matches!(atom, MeasureAtom::Plus | MeasureAtom::Minus) {
                return ctx.err(m.atom.span(), "plus/minus measurements are defined for a qubit");
            }
            let time = match (&m.time_ns, &m.time_s, &m.g_t_over_2pi) {
                (None, None, None) => t_end,
                _ => one_time(ctx, &m.time_ns, 1e-9, &m.time_s, &m.g_t_over_2pi, g, section_line("measure"), "measurement time")?,
            };
            if time > t_end * (1.0 + 1e-12) {
                return ctx.err(section_line("measure"), "measurement time lies after t_end");
            }
            Some(MeasurePlan { atom, time, align: m.align.unwrap_or(false) })
        }
    };
    let wigner = match &raw.wigner {
        None => None,
        Some(w) => {
            if measure.is_none() {
                return ctx.err(section_line("wigner"), "a [wigner] request needs a [measure] section");
            }
            let points = match &w.points {
                None => 161,
                Some(p) if *p.get_ref() >= 2 && *p.get_ref() <= 2001 => *p.get_ref() as usize,
                Some(p) => return ctx.err(p.span(), "points must lie in 2..=2001"),
            };
            let extent = match &w.extent {
                None => None,
                Some(e) => Some(positive(ctx, e, 1.0)?),
            };
            Some(WignerRequest { points, extent, pgm: w.pgm.unwrap_or(true) })
        }
    };
    let sweep = match &raw.sweep {
        None => None,
        Some(map) => Some(resolve_sweep(ctx, map)?),
    };
    Ok(Scenario { name, variant, frame, fock_cutoff, physics, spurious, decoherence, initial, t_end, dt, samples, measure, wigner, sweep })
}

/// Absolute frequency `key`, or `offset + rel` when the relative key is given.
fn either(
    ctx: &Ctx<'_>,
    pm: &mut UnitMap<'_>,
    key: &str,
    rel: &str,
    offset: f64,
    span: std::ops::Range<usize>,
) -> Result<f64, ConfigError> {
    match (pm.take(key, Kind::Frequency)?, pm.take(rel, Kind::Frequency)?) {
        (Some(v), None) => Ok(v),
        (None, Some(d)) => Ok(offset + d),
        (Some(_), Some(_)) => ctx.err(span, format!("[params] give {key} or {rel}, not both")),
        (None, None) => ctx.err(span, format!("[params] is missing {key} (or {rel})")),
    }
}

fn positive(ctx: &Ctx<'_>, v: &Spanned<f64>, scale: f64) -> Result<f64, ConfigError> {
    let x = *v.get_ref();
    if !x.is_finite() || x <= 0.0 {
        return ctx.err(v.span(), "value must be positive");
    }
    Ok(x * scale)
}

#[allow(clippy::too_many_arguments)]
fn one_time(
    ctx: &Ctx<'_>,
    scaled: &Option<Spanned<f64>>,
    scale: f64,
    seconds: &Option<Spanned<f64>>,
    gt: &Option<Spanned<f64>>,
    g: f64,
    span: std::ops::Range<usize>,
    what: &str,
) -> Result<f64, ConfigError> {
    let given = [scaled.is_some(), seconds.is_some(), gt.is_some()].iter().filter(|b| **b).count();
    if given != 1 {
        return ctx.err(span, format!("give exactly one form of the {what}"));
    }
    if let Some(v) = scaled {
        return positive(ctx, v, scale);
    }
    if let Some(v) = seconds {
        return positive(ctx, v, 1.0);
    }
    let v = gt.as_ref().expect("one form given");
    if g.is_nan() || g <= 0.0 {
        return ctx.err(v.span(), "g t / 2pi needs a non-zero coupling");
    }
    Ok(positive(ctx, v, 1.0)? * TAU / g)
}

fn resolve_sweep(ctx: &Ctx<'_>, map: &BTreeMap<Spanned<String>, Spanned<toml::Value>>) -> Result<SweepSpec, ConfigError> {
    let span = ctx.src.find("[sweep]").map(|o| o..o).unwrap_or(0..0);
    let mut used = vec![false; map.len()];
    let entries: Vec<(&Spanned<String>, &Spanned<toml::Value>)> = map.iter().collect();
    let find = |key: &str| -> Option<(usize, &Spanned<toml::Value>)> {
        entries.iter().enumerate().find(|(_, (k, _))| k.get_ref() == key).map(|(i, (_, v))| (i, *v))
    };
    let axis = |p: &str, used: &mut Vec<bool>| -> Result<SweepAxis, ConfigError> {
        let (i, name) = find(&format!("{p}_axis")).ok_or(()).or_else(|_| ctx.err(span.clone(), format!("[sweep] is missing {p}_axis")))?;
        used[i] = true;
        let rate = match name.get_ref().as_str().and_then(RateAxis::parse) {
            Some(r) => r,
            None => return ctx.err(name.span(), "axis must be one of gamma1, gamma2, gamma_phi, kappa"),
        };
        let (i, pts) =
            find(&format!("{p}_points")).ok_or(()).or_else(|_| ctx.err(span.clone(), format!("[sweep] is missing {p}_points")))?;
        used[i] = true;
        let points = match pts.get_ref().as_integer() {
            Some(n) if (1..=64).contains(&n) => n as usize,
            _ => return ctx.err(pts.span(), "points must be an integer in 1..=64"),
        };
        let mut bound = |which: &str| -> Result<f64, ConfigError> {
            for unit in ["MHz", "kHz", "per_s"] {
                if let Some((i, v)) = find(&format!("{p}_{which}_{unit}")) {
                    used[i] = true;
                    let x = v.get_ref().as_float().or_else(|| v.get_ref().as_integer().map(|n| n as f64));
                    return match x {
                        Some(x) if x >= 0.0 && x.is_finite() => Ok(x * unit_factor(Kind::Rate, unit).expect("rate unit")),
                        _ => ctx.err(v.span(), "rates must be non-negative numbers"),
                    };
                }
            }
            ctx.err(span.clone(), format!("[sweep] is missing {p}_{which}_MHz (or _kHz, _per_s)"))
        };
        let min = bound("min")?;
        let max = bound("max")?;
        if max < min {
            return ctx.err(span.clone(), format!("[sweep] {p} range is reversed"));
        }
        Ok(SweepAxis { rate, min, max, points })
    };
    let x = axis("x", &mut used)?;
    let y = axis("y", &mut used)?;
    if x.rate == y.rate {
        return ctx.err(span, "sweep axes must differ");
    }
    for (i, (k, _)) in map.iter().enumerate() {
        if !used[i] {
            return ctx.err(k.span(), format!("[sweep] unknown key {}", k.get_ref()));
        }
    }
    Ok(SweepSpec { x, y })
}

/// Writes a scenario back as a configuration in SI units (rad/s, 1/s, s).
/// Parsing the result yields an identical [`Scenario`].
pub fn to_manifest(s: &Scenario) -> String {
    let mut o = String::new();
    let mut line = |l: String| {
        o.push_str(&l);
        o.push('\n');
    };
    line(format!("name = {:?}", s.name));
    line(String::new());
    line("[model]".into());
    line(format!("variant = {:?}", s.variant.label()));
    line(format!("frame = {:?}", s.frame.label()));
    line(format!("fock_cutoff = {}", s.fock_cutoff));
    if let Physics::Qutrit(p) = &s.physics {
        line(format!("selection = {:?}", p.selection.label()));
        let mode = match p.mode {
            QutritMode::General => "general",
            QutritMode::HarmonicToy => "harmonic",
        };
        line(format!("qutrit_mode = {mode:?}"));
    }
    line(String::new());
    line("[params]".into());
    match &s.physics {
        Physics::Qubit(p) => {
            line(format!("omega_q_rad_s = {:?}", p.omega_q));
            line(format!("omega_r_rad_s = {:?}", p.omega_r));
            line(format!("omega_d_rad_s = {:?}", p.omega_d));
            line(format!("g_rad_s = {:?}", p.g));
            line(format!("Omega_rad_s = {:?}", p.drive));
        }
        Physics::Qutrit(p) => {
            line(format!("omega_eg_rad_s = {:?}", p.omega_eg));
            line(format!("omega_fe_rad_s = {:?}", p.omega_fe));
            line(format!("omega_r_rad_s = {:?}", p.omega_r));
            line(format!("omega_d_rad_s = {:?}", p.omega_d));
            line(format!("g1_rad_s = {:?}", p.g1));
            line(format!("g2_rad_s = {:?}", p.g2));
            line(format!("Omega1_rad_s = {:?}", p.drive1));
            line(format!("Omega2_rad_s = {:?}", p.drive2));
        }
    }
    if let Some(sp) = &s.spurious {
        line(format!("stray_rad_s = {:?}", sp.stray));
        line(format!("stray_phase_rad = {:?}", sp.stray_phase));
        line(format!("cancel_rad_s = {:?}", sp.cancel));
        line(format!("cancel_phase_rad = {:?}", sp.cancel_phase));
    }
    line(String::new());
    line("[decoherence]".into());
    let d = &s.decoherence;
    line(format!("gamma1_per_s = {:?}", d.gamma1));
    line(format!("gamma2_per_s = {:?}", d.gamma2));
    line(format!("gamma_phi_per_s = {:?}", d.gamma_phi));
    line(format!("kappa_per_s = {:?}", d.kappa));
    line(String::new());
    line("[initial]".into());
    line(format!("state = {:?}", s.initial.label()));
    if let InitialState::Encode { c_g, c_e } = &s.initial {
        line(format!("c_g = [{:?}, {:?}]", c_g[0], c_g[1]));
        line(format!("c_e = [{:?}, {:?}]", c_e[0], c_e[1]));
    }
    line(String::new());
    line("[time]".into());
    line(format!("t_end_s = {:?}", s.t_end));
    if let Some(dt) = s.dt {
        line(format!("dt_s = {dt:?}"));
    }
    line(format!("samples = {}", s.samples));
    if let Some(m) = &s.measure {
        line(String::new());
        line("[measure]".into());
        line(format!("atom = {:?}", m.atom.label()));
        line(format!("time_s = {:?}", m.time));
        line(format!("align = {}", m.align));
    }
    if let Some(w) = &s.wigner {
        line(String::new());
        line("[wigner]".into());
        line(format!("points = {}", w.points));
        if let Some(e) = w.extent {
            line(format!("extent = {e:?}"));
        }
        line(format!("pgm = {}", w.pgm));
    }
    if let Some(sw) = &s.sweep {
        line(String::new());
        line("[sweep]".into());
        for (p, a) in [("x", &sw.x), ("y", &sw.y)] {
            line(format!("{p}_axis = {:?}", a.rate.label()));
            line(format!("{p}_min_per_s = {:?}", a.min));
            line(format!("{p}_max_per_s = {:?}", a.max));
            line(format!("{p}_points = {}", a.points));
        }
    }
    o
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG1: &str = r#"
name = "fig1"

[model]
variant = "qrm_lab"

[params]
omega_q_GHz = 5.0
omega_r_GHz = 5.0
omega_d_GHz = 5.0
g_MHz = 20
Omega_GHz = 2.0

[decoherence]
gamma1_kHz = 100
gamma_phi_kHz = 100
kappa_kHz = 500

[time]
g_t_end_over_2pi = 1.0
dt_ps = 2.5

[measure]
atom = "e"
align = true
"#;

    #[test]
    fn parses_units() {
        let s = parse_scenario(FIG1).unwrap();
        let Physics::Qubit(p) = s.physics else { panic!() };
        assert!((p.g - TAU * 20e6).abs() < 1e-3);
        assert!((s.t_end - 50e-9).abs() < 1e-20);
        assert_eq!(s.decoherence.kappa, 5e5);
        assert_eq!(s.frame, Frame::Lab);
        assert_eq!(s.dt, Some(2.5e-12));
        let m = s.measure.unwrap();
        assert_eq!(m.time, s.t_end);
        assert!(m.align);
    }

    #[test]
    fn manifest_round_trip_is_exact() {
        let s = parse_scenario(FIG1).unwrap();
        let back = parse_scenario(&to_manifest(&s)).unwrap();
        assert_eq!(s, back);
    }

    #[test]
    fn errors_carry_lines() {
        let bad = FIG1.replace("g_MHz = 20", "g = 20");
        let e = parse_scenario(&bad).unwrap_err();
        assert_eq!(e.line, 11, "{e}");
        assert!(e.message.contains("unit suffix"));
        let bad = FIG1.replace("variant = \"qrm_lab\"", "variant = \"nope\"");
        assert_eq!(parse_scenario(&bad).unwrap_err().line, 5);
        let bad = FIG1.replace("atom = \"e\"", "atom = \"f\"");
        assert_eq!(parse_scenario(&bad).unwrap_err().line, 24);
        let bad = FIG1.replace("align = true", "align = true\nbogus = 1");
        assert_eq!(parse_scenario(&bad).unwrap_err().line, 26);
        let bad = FIG1.replace("kappa_kHz = 500", "kappa_kHz = -500");
        assert!(parse_scenario(&bad).is_err());
    }

    #[test]
    fn empty_config_lists_schema() {
        let e = parse_scenario("  \n").unwrap_err();
        assert!(e.message.contains("[params]"));
    }

    #[test]
    fn relative_detunings() {
        let src = FIG1.replace("omega_q_GHz = 5.0", "Delta_MHz = 500");
        let s = parse_scenario(&src).unwrap();
        let Physics::Qubit(p) = s.physics else { panic!() };
        assert!((p.atom_detuning() - TAU * 500e6).abs() < 1e-3);
        let both = FIG1.replace("omega_q_GHz = 5.0", "omega_q_GHz = 5.0\nDelta_MHz = 1");
        assert!(parse_scenario(&both).is_err());
    }

    #[test]
    fn qutrit_defaults() {
        let src = r#"
name = "q"
[model]
variant = "qutrit_rwa"
[params]
omega_eg_GHz = 5
omega_fe_GHz = 5
omega_r_GHz = 5
omega_d_GHz = 5
g1_MHz = 20
Omega1_GHz = 1
[time]
g_t_end_over_2pi = 0.61
"#;
        let s = parse_scenario(src).unwrap();
        let Physics::Qutrit(p) = s.physics else { panic!() };
        assert_eq!(p.mode, QutritMode::HarmonicToy);
        assert!((p.g2 / p.g1 - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(s, parse_scenario(&to_manifest(&s)).unwrap());
    }

    #[test]
    fn sweep_section() {
        let src = format!("{FIG1}\n[sweep]\nx_axis = \"kappa\"\nx_min_MHz = 0\nx_max_MHz = 1\nx_points = 5\ny_axis = \"gamma1\"\ny_min_MHz = 0\ny_max_MHz = 1.0\ny_points = 5\n");
        let s = parse_scenario(&src).unwrap();
        let sw = s.sweep.unwrap();
        assert_eq!(sw.x.values(), vec![0.0, 2.5e5, 5e5, 7.5e5, 1e6]);
        assert_eq!(s, parse_scenario(&to_manifest(&s)).unwrap());
        let bad = src.replace("y_axis = \"gamma1\"", "y_axis = \"kappa\"");
        assert!(parse_scenario(&bad).is_err());
    }
}
