//! Output files: time-series CSV, Wigner grids (text and PGM), state dumps,
//! manifests and small text reports.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use catsim_core::analysis::WignerGrid;
use catsim_core::hilbert::{QuantumState, SpaceDescriptor, StateData};
use catsim_core::linalg::CMatrix;
use catsim_core::{Cx, State64};

use crate::config::{to_manifest, ConfigError};
use crate::scenario::{RunArtifacts, RunError};

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> RunError + '_ {
    move |source| RunError::Io { path: path.display().to_string(), source }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), RunError> {
    let mut f = fs::File::create(path).map_err(io_err(path))?;
    f.write_all(bytes).map_err(io_err(path))
}

/// `t_s,P_e,n_phot,purity`, one row per sample.
pub fn timeseries_csv(a: &RunArtifacts) -> Result<String, RunError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let e = |e: csv::Error| RunError::Model(e.to_string());
    w.write_record(["t_s", "P_e", "n_phot", "purity"]).map_err(e)?;
    for i in 0..a.times.len() {
        w.write_record([a.times[i], a.p_e[i], a.n_phot[i], a.purity[i]].map(|x| format!("{x:?}"))).map_err(e)?;
    }
    let bytes = w.into_inner().map_err(|e| RunError::Model(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("ascii"))
}

/// Text grid: header comments, the two axes, then one row per imaginary
/// coordinate. Values use shortest round-trip formatting.
pub fn wigner_text(w: &WignerGrid<f64>) -> String {
    let mut o = String::new();
    let join = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(" ");
    let _ = writeln!(o, "# Wigner function W(alpha) = (1/pi) Tr[rho D(2 alpha) exp(i pi n)]");
    let _ = writeln!(o, "# rows: Im(alpha) ascending; columns: Re(alpha) ascending");
    let _ = writeln!(o, "convention_scale {:?}", w.convention_scale);
    let _ = writeln!(o, "re_axis {}", join(&w.re_axis));
    let _ = writeln!(o, "im_axis {}", join(&w.im_axis));
    let nx = w.re_axis.len();
    for row in w.values.chunks(nx) {
        let _ = writeln!(o, "{}", join(row));
    }
    o
}

pub fn parse_wigner_text(src: &str) -> Result<WignerGrid<f64>, ConfigError> {
    let mut scale = None;
    let mut re_axis = None;
    let mut im_axis = None;
    let mut values = Vec::new();
    let nums = |s: &str, line: usize| -> Result<Vec<f64>, ConfigError> {
        s.split_whitespace().map(|t| t.parse::<f64>().map_err(|_| ConfigError { line, message: format!("bad number {t:?}") })).collect()
    };
    for (i, l) in src.lines().enumerate() {
        let line = i + 1;
        let l = l.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        if let Some(rest) = l.strip_prefix("convention_scale") {
            scale = nums(rest, line)?.first().copied();
        } else if let Some(rest) = l.strip_prefix("re_axis") {
            re_axis = Some(nums(rest, line)?);
        } else if let Some(rest) = l.strip_prefix("im_axis") {
            im_axis = Some(nums(rest, line)?);
        } else {
            let row = nums(l, line)?;
            let want = re_axis.as_ref().map(Vec::len).unwrap_or(0);
            if row.len() != want {
                return Err(ConfigError { line, message: format!("row has {} values, expected {want}", row.len()) });
            }
            values.extend(row);
        }
    }
    let missing = |what: &str| ConfigError { line: 0, message: format!("missing {what}") };
    let re_axis = re_axis.ok_or_else(|| missing("re_axis"))?;
    let im_axis = im_axis.ok_or_else(|| missing("im_axis"))?;
    if values.len() != re_axis.len() * im_axis.len() {
        return Err(ConfigError { line: 0, message: "grid is incomplete".into() });
    }
    Ok(WignerGrid { re_axis, im_axis, values, convention_scale: scale.ok_or_else(|| missing("convention_scale"))? })
}

/// Binary PGM (P5); `[−1/π, 1/π]` maps linearly onto `[0, 255]`, top row
/// is the largest imaginary coordinate.
pub fn wigner_pgm(w: &WignerGrid<f64>) -> Vec<u8> {
    let (nx, ny) = (w.re_axis.len(), w.im_axis.len());
    let mut out = format!("P5\n{nx} {ny}\n255\n").into_bytes();
    let s = w.convention_scale;
    for r in (0..ny).rev() {
        for c in 0..nx {
            let v = w.values[r * nx + c];
            let x = ((v + s) / (2.0 * s) * 255.0).round().clamp(0.0, 255.0);
            out.push(x as u8);
        }
    }
    out
}

/// Plain-text state dump (`kind`, space, then one `re im` pair per line:
/// vector entries or row-major matrix entries).
pub fn state_dump(s: &State64) -> String {
    let mut o = String::new();
    let sp = s.space();
    let kind = if s.is_pure() { "pure" } else { "mixed" };
    let _ = writeln!(o, "# catsim state");
    let _ = writeln!(o, "kind {kind}");
    let _ = writeln!(o, "atom_levels {}", sp.atom_levels());
    let _ = writeln!(o, "fock_cutoff {}", sp.fock_cutoff());
    let entries: &[Cx<f64>] = match s.data() {
        StateData::Pure(v) => v,
        StateData::Mixed(m) => m.as_slice(),
    };
    for z in entries {
        let _ = writeln!(o, "{:?} {:?}", z.re, z.im);
    }
    o
}

pub fn parse_state_dump(src: &str) -> Result<State64, ConfigError> {
    let mut kind = None;
    let mut levels = None;
    let mut cutoff = None;
    let mut vals = Vec::new();
    for (i, l) in src.lines().enumerate() {
        let line = i + 1;
        let l = l.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        let bad = |m: &str| ConfigError { line, message: m.to_string() };
        let mut parts = l.split_whitespace();
        let a = parts.next().expect("non-empty line");
        let b = parts.next().ok_or_else(|| bad("expected two fields"))?;
        if parts.next().is_some() {
            return Err(bad("expected two fields"));
        }
        match a {
            "kind" => kind = Some(b.to_string()),
            "atom_levels" => levels = Some(b.parse::<usize>().map_err(|_| bad("bad atom_levels"))?),
            "fock_cutoff" => cutoff = Some(b.parse::<usize>().map_err(|_| bad("bad fock_cutoff"))?),
            _ => {
                let re = a.parse::<f64>().map_err(|_| bad("bad real part"))?;
                let im = b.parse::<f64>().map_err(|_| bad("bad imaginary part"))?;
                vals.push(Cx::new(re, im));
            }
        }
    }
    let missing = |m: &str| ConfigError { line: 0, message: format!("missing {m}") };
    let levels = levels.ok_or_else(|| missing("atom_levels"))?;
    let cutoff = cutoff.ok_or_else(|| missing("fock_cutoff"))?;
    let space = if levels == 1 { SpaceDescriptor::resonator(cutoff) } else { catsim_core::hilbert::make_space(levels, cutoff) }
        .map_err(|e| ConfigError { line: 0, message: e.to_string() })?;
    let n = space.dim();
    let to_cfg = |e: catsim_core::hilbert::HilbertError| ConfigError { line: 0, message: e.to_string() };
    match kind.as_deref() {
        Some("pure") if vals.len() == n => QuantumState::pure(vals, space).map_err(to_cfg),
        Some("mixed") if vals.len() == n * n => QuantumState::mixed(CMatrix::from_vec(n, n, vals), space).map_err(to_cfg),
        Some("pure") | Some("mixed") => Err(ConfigError { line: 0, message: format!("wrong number of entries ({})", vals.len()) }),
        _ => Err(missing("kind pure|mixed")),
    }
}

pub fn manifest_text(a: &RunArtifacts) -> String {
    let mut o = String::new();
    let _ = writeln!(o, "# catsim run manifest; rerun with: catsim simulate <this file> --out <dir>");
    let _ = writeln!(o, "# model: {}", a.description);
    let _ = writeln!(o, "# integrator: dt = {:?} s, steps = {}, max drift = {:e}", a.dt, a.steps, a.max_drift);
    if let Some(m) = &a.measurement {
        if (m.time - m.nominal_time).abs() > 0.0 {
            let _ = writeln!(o, "# measurement moved from {:?} s to the atom revival at {:?} s", m.nominal_time, m.time);
        }
    }
    let mut s = a.scenario.clone();
    if let (Some(plan), Some(m)) = (s.measure.as_mut(), &a.measurement) {
        plan.time = m.time;
        plan.align = false;
    }
    o.push_str(&to_manifest(&s));
    o
}

pub fn measurement_text(a: &RunArtifacts) -> String {
    let mut o = String::new();
    if let Some(m) = &a.measurement {
        let _ = writeln!(o, "atom {}", m.atom.label());
        let _ = writeln!(o, "nominal_time_s {:?}", m.nominal_time);
        let _ = writeln!(o, "time_s {:?}", m.time);
        if let Some((lo, hi)) = m.window {
            let _ = writeln!(o, "align_window_s {lo:?} {hi:?}");
        }
        let _ = writeln!(o, "probability {:?}", m.probability);
        if let Some(p) = m.parity {
            let _ = writeln!(o, "parity {p:?}");
        }
        if let Some(w) = &m.wigner {
            let (lo, hi) = w.min_max();
            let _ = writeln!(o, "wigner_min {lo:?}");
            let _ = writeln!(o, "wigner_max {hi:?}");
        }
    }
    o
}

/// Writes every artifact of a run into `dir`; returns the written paths.
pub fn write_run(a: &RunArtifacts, dir: &Path) -> Result<Vec<PathBuf>, RunError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::new();
    let mut put = |name: String, bytes: Vec<u8>| -> Result<(), RunError> {
        let p = dir.join(name);
        write_file(&p, &bytes)?;
        written.push(p);
        Ok(())
    };
    put("timeseries.csv".into(), timeseries_csv(a)?.into_bytes())?;
    put("manifest.toml".into(), manifest_text(a).into_bytes())?;
    put("validity.txt".into(), format!("{}\n", a.validity).into_bytes())?;
    if let Some(m) = &a.measurement {
        put("measurement.txt".into(), measurement_text(a).into_bytes())?;
        let tag = m.atom.label();
        if let Some(c) = &m.conditional {
            put(format!("state_{tag}.txt"), state_dump(c).into_bytes())?;
        }
        if let Some(w) = &m.wigner {
            put(format!("wigner_{tag}.txt"), wigner_text(w).into_bytes())?;
            if a.scenario.wigner.map(|r| r.pgm).unwrap_or(false) {
                put(format!("wigner_{tag}.pgm"), wigner_pgm(w))?;
            }
        }
    }
    Ok(written)
}

pub fn write_text(path: &Path, text: &str) -> Result<(), RunError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(io_err(parent))?;
    }
    write_file(path, text.as_bytes())
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), RunError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(io_err(parent))?;
    }
    write_file(path, bytes)
}
