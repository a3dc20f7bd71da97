//! Fidelity maps over two decoherence rates.

use std::fmt::Write as _;

use catsim_core::analysis::fidelity;
use catsim_core::hilbert::make_space;
use rayon::prelude::*;

use crate::config::{Scenario, SweepSpec};
use crate::scenario::{build_model, channels, choose_dt, evolve_segment, initial_state, step_bound, RunError};

/// Fidelities `values[iy][ix]` of the decohered state with the closed-system
/// state at `time`.
#[derive(Debug, Clone, PartialEq)]
pub struct FidelityMap {
    pub spec: SweepSpec,
    pub x_values: Vec<f64>,
    pub y_values: Vec<f64>,
    pub time: f64,
    pub values: Vec<Vec<f64>>,
}

impl FidelityMap {
    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy][ix]
    }
}

/// Time at which the sweep compares states: the measurement time if one is
/// planned, otherwise `g t / 2π = 1` (capped at `t_end`).
pub fn sweep_time(s: &Scenario) -> f64 {
    match &s.measure {
        Some(m) => m.time,
        None => (std::f64::consts::TAU / s.physics.coupling()).min(s.t_end),
    }
}

/// Final state of `s` at `time` (Lindblad when any rate is non-zero).
pub fn final_state(s: &Scenario, time: f64) -> Result<catsim_core::State64, RunError> {
    let space = make_space(s.physics.atom_levels(), s.fock_cutoff)?;
    let built = build_model(s, space)?;
    let ch = channels(s, space)?;
    let psi0 = initial_state(s, space)?;
    let state0 = if ch.is_empty() { psi0 } else { psi0.into_mixed() };
    let bound = step_bound(&built.hamiltonian, &ch);
    let dt = choose_dt(s, bound)?;
    let traj = evolve_segment(&built.hamiltonian, &ch, &state0, 0.0, time, dt, 1, &[])?;
    Ok(traj.final_state)
}

/// Runs every grid point on a pool of `jobs` threads.
pub fn run_sweep(s: &Scenario, jobs: usize) -> Result<FidelityMap, RunError> {
    let spec = s.sweep.ok_or_else(|| RunError::Model("scenario has no [sweep] section".into()))?;
    let time = sweep_time(s);
    let mut closed = s.clone();
    closed.decoherence = catsim_core::models::DecoherenceParams::closed();
    let reference = final_state(&closed, time)?;
    let x_values = spec.x.values();
    let y_values = spec.y.values();
    let points: Vec<(usize, usize)> = (0..y_values.len()).flat_map(|iy| (0..x_values.len()).map(move |ix| (ix, iy))).collect();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build().map_err(|e| RunError::Model(e.to_string()))?;
    let results: Vec<Result<f64, RunError>> = pool.install(|| {
        points
            .par_iter()
            .map(|&(ix, iy)| {
                let mut p = s.clone();
                spec.x.rate.set(&mut p.decoherence, x_values[ix]);
                spec.y.rate.set(&mut p.decoherence, y_values[iy]);
                let rho = final_state(&p, time)?;
                Ok(fidelity(&rho, &reference)?)
            })
            .collect()
    });
    let mut values = vec![vec![0.0; x_values.len()]; y_values.len()];
    for (&(ix, iy), r) in points.iter().zip(results) {
        values[iy][ix] = r?;
    }
    Ok(FidelityMap { spec, x_values, y_values, time, values })
}

pub fn fidelity_map_text(m: &FidelityMap, s: &Scenario) -> String {
    let mut o = String::new();
    let join = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(" ");
    let d = &s.decoherence;
    let _ = writeln!(o, "# fidelity with the closed-system state; rows: y axis, columns: x axis; rates in 1/s");
    let _ = writeln!(o, "# base rates: gamma1 {:?} gamma2 {:?} gamma_phi {:?} kappa {:?}", d.gamma1, d.gamma2, d.gamma_phi, d.kappa);
    let _ = writeln!(o, "time_s {:?}", m.time);
    let _ = writeln!(o, "x_axis {} {}", m.spec.x.rate.label(), join(&m.x_values));
    let _ = writeln!(o, "y_axis {} {}", m.spec.y.rate.label(), join(&m.y_values));
    for row in &m.values {
        let _ = writeln!(o, "{}", join(row));
    }
    o
}
