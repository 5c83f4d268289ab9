//! Repeated polarization cycles: a drive pulse followed by an ideal optical
//! reset of the electron into m_s = 0 that leaves the nucleus untouched.

use std::f64::consts::PI;

use nalgebra::Matrix6;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{DensityMatrix, Evolution, MasterEquation, NuclearInit, StepControl, Trajectory};
use crate::error::{Error, Result};
use crate::model::{frame_energies, rotating_to_lab, Frame, ModelSwitches, PhysicalParams};
use crate::spin::{BasisLabel, ElectronState, NuclearState, DIM};

/// Rabi frequency of the separate-pulse scheme.
pub const SEQUENTIAL_RABI: f64 = 4.3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "scheme")]
pub enum Scheme {
    /// Both drives on together for `t_pulse`.
    Simultaneous { t_pulse: f64 },
    /// Microwave alone for `t1`, then RF alone for `t2`.
    Sequential { t1: f64, t2: f64 },
}

impl Scheme {
    /// Transfer pulse t = pi / Omega.
    pub fn simultaneous_for(p: &PhysicalParams) -> Scheme {
        Scheme::Simultaneous { t_pulse: PI / p.omega() }
    }

    /// Two-level inversions t_i = pi / (2 Omega_i).
    pub fn sequential_for(p: &PhysicalParams) -> Scheme {
        Scheme::Sequential { t1: PI / (2.0 * p.omega1), t2: PI / (2.0 * p.omega2) }
    }

    pub fn duration(&self) -> f64 {
        match *self {
            Scheme::Simultaneous { t_pulse } => t_pulse,
            Scheme::Sequential { t1, t2 } => t1 + t2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub scheme: Scheme,
    pub n_cycles: usize,
    pub initial_nuclear: NuclearInit,
    pub switches: ModelSwitches,
    pub dt: f64,
    /// Keep the post-reset state of every cycle.
    pub keep_snapshots: bool,
}

impl ProtocolConfig {
    pub fn new(scheme: Scheme, n_cycles: usize) -> Self {
        ProtocolConfig {
            scheme,
            n_cycles,
            initial_nuclear: NuclearInit::Mixed,
            switches: ModelSwitches::full(),
            dt: 1e-3,
            keep_snapshots: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_cycles == 0 {
            return Err(Error::InvalidInput("n_cycles must be at least 1".into()));
        }
        let durations: &[f64] = match &self.scheme {
            Scheme::Simultaneous { t_pulse } => &[*t_pulse],
            Scheme::Sequential { t1, t2 } => &[*t1, *t2],
        };
        if durations.iter().any(|d| !(*d > 0.0) || !d.is_finite()) {
            return Err(Error::InvalidInput("pulse durations must be positive".into()));
        }
        if !(self.dt > 0.0) {
            return Err(Error::InvalidInput("dt must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CycleRecord {
    pub cycle: usize,
    pub p_down: f64,
    pub fidelity: f64,
}

#[derive(Clone, Debug)]
pub struct ProtocolResult {
    pub initial_p_down: f64,
    pub cycles: Vec<CycleRecord>,
    /// Post-reset states, when requested.
    pub snapshots: Option<Vec<DensityMatrix>>,
}

impl ProtocolResult {
    pub fn p_down_series(&self) -> Vec<f64> {
        self.cycles.iter().map(|c| c.p_down).collect()
    }

    pub fn final_p_down(&self) -> f64 {
        self.cycles.last().map_or(self.initial_p_down, |c| c.p_down)
    }
}

/// |0><0| (x) Tr_e(rho).
pub fn reset_electron(rho: &DensityMatrix) -> DensityMatrix {
    let nuc = rho.nuclear_reduced();
    let mut m = Matrix6::<C64>::zeros();
    let base = BasisLabel::new(ElectronState::Zero, NuclearState::Up).index();
    for a in 0..2 {
        for b in 0..2 {
            m[(base + a, base + b)] = nuc[a][b];
        }
    }
    DensityMatrix::from_raw(m)
}

/// Nuclear down population tr[(1 (x) |down><down|) rho].
pub fn nuclear_polarization(rho: &DensityMatrix) -> f64 {
    rho.nuclear_reduced()[1][1].re
}

/// p_down - p_up.
pub fn signed_polarization(rho: &DensityMatrix) -> f64 {
    let n = rho.nuclear_reduced();
    n[1][1].re - n[0][0].re
}

/// Pulse evolution of one cycle in the rotating frame, before the reset.
/// The sequential scheme uses a single clock across both pulses.
pub fn evolve_pulse(
    p: &PhysicalParams,
    cfg: &ProtocolConfig,
    rho: &DensityMatrix,
    control: &StepControl,
) -> Result<Evolution<DensityMatrix>> {
    match cfg.scheme {
        Scheme::Simultaneous { t_pulse } => {
            MasterEquation::new(p, &cfg.switches, Frame::Rotating).evolve(rho, 0.0, t_pulse, control)
        }
        Scheme::Sequential { t1, t2 } => {
            let mw = PhysicalParams { omega2: 0.0, ..*p };
            let rf = PhysicalParams { omega1: 0.0, ..*p };
            let first = MasterEquation::new(&mw, &cfg.switches, Frame::Rotating).evolve(rho, 0.0, t1, control)?;
            let second = MasterEquation::new(&rf, &cfg.switches, Frame::Rotating).evolve(
                &first.final_state,
                t1,
                t1 + t2,
                control,
            )?;
            let mut trajectory: Trajectory = first.trajectory;
            trajectory.extend(&second.trajectory);
            Ok(Evolution { trajectory, final_state: second.final_state, dt: first.dt.min(second.dt) })
        }
    }
}

fn lab_state(p: &PhysicalParams, sw: &ModelSwitches, rho: &DensityMatrix, t: f64) -> DensityMatrix {
    let f: [f64; DIM] = frame_energies(p, sw);
    DensityMatrix::from_raw(rotating_to_lab(rho.entries(), &f, t))
}

/// Pulse, conversion to the lab frame, then electron reset.
pub fn run_cycle(p: &PhysicalParams, cfg: &ProtocolConfig, rho: &DensityMatrix) -> Result<DensityMatrix> {
    p.validate()?;
    cfg.validate()?;
    let control = StepControl::with_dt(cfg.dt).samples(1);
    let run = evolve_pulse(p, cfg, rho, &control)?;
    let lab = lab_state(p, &cfg.switches, &run.final_state, cfg.scheme.duration());
    Ok(reset_electron(&lab))
}

/// Conditional up -> down transfer of one cycle, from pure |0,up>.
pub fn transfer_fidelity(p: &PhysicalParams, cfg: &ProtocolConfig) -> Result<f64> {
    let start = DensityMatrix::pure(BasisLabel::new(ElectronState::Zero, NuclearState::Up));
    Ok(nuclear_polarization(&run_cycle(p, cfg, &start)?))
}

pub fn run_protocol(p: &PhysicalParams, cfg: &ProtocolConfig) -> Result<ProtocolResult> {
    p.validate()?;
    cfg.validate()?;
    let fidelity = transfer_fidelity(p, cfg)?;
    let mut rho = DensityMatrix::product(ElectronState::Zero, cfg.initial_nuclear);
    let initial_p_down = nuclear_polarization(&rho);
    let mut cycles = Vec::with_capacity(cfg.n_cycles);
    let mut snapshots = cfg.keep_snapshots.then(Vec::new);
    for n in 1..=cfg.n_cycles {
        rho = run_cycle(p, cfg, &rho)?;
        cycles.push(CycleRecord { cycle: n, p_down: nuclear_polarization(&rho), fidelity });
        if let Some(s) = snapshots.as_mut() {
            s.push(rho);
        }
    }
    Ok(ProtocolResult { initial_p_down, cycles, snapshots })
}

/// Polarization after `n` cycles when each cycle moves a fraction `f` of the
/// up population to down: 1 - (1 - p0)(1 - f)^n.
pub fn recursion_prediction(p0: f64, f: f64, n: usize) -> f64 {
    1.0 - (1.0 - p0) * (1.0 - f).powi(n as i32)
}
