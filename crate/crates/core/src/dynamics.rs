//! Time evolution: the Lindblad master equation for the six-level density
//! matrix and the non-Hermitian Schroedinger equation for the driven
//! three-level amplitudes. Both use fixed-step fourth-order Runge-Kutta.

use std::ops::{Add, Mul};

use nalgebra::{Matrix3, Matrix6, SymmetricEigen, Vector3};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    self, dephasing_dissipator, driven_hamiltonian, nonhermitian_matrix, DephasingDissipator, DrivenHamiltonian,
    Frame, ModelSwitches, PhysicalParams,
};
use crate::spin::{idx, BasisLabel, ElectronState, NuclearState, DIM};

/// Steps must satisfy dt * (frequency scale) <= this bound.
pub const STEP_SAFETY: f64 = 0.01;
/// Row cap for stored trajectories.
pub const MAX_STORED_SAMPLES: usize = 5000;

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-8;
pub const POSITIVITY_TOL: f64 = 1e-8;
pub const NORM_GROWTH_TOL: f64 = 1e-9;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Mixture of the nuclear spin in the product basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NuclearInit {
    Mixed,
    Up,
    Down,
}

impl NuclearInit {
    fn weights(self) -> [f64; 2] {
        match self {
            NuclearInit::Mixed => [0.5, 0.5],
            NuclearInit::Up => [1.0, 0.0],
            NuclearInit::Down => [0.0, 1.0],
        }
    }
}

/// Six-level density matrix of electron (x) nucleus.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix(Matrix6<C64>);

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(entries: Matrix6<C64>) -> Result<Self> {
        let rho = DensityMatrix(entries);
        rho.check().map_err(Error::InvalidInput)?;
        Ok(rho)
    }

    /// Skips validation; callers guarantee the invariants.
    pub(crate) fn from_raw(entries: Matrix6<C64>) -> Self {
        DensityMatrix(entries)
    }

    pub fn pure(label: BasisLabel) -> Self {
        let mut m = Matrix6::zeros();
        let i = label.index();
        m[(i, i)] = ONE;
        DensityMatrix(m)
    }

    /// |m_s><m_s| (x) rho_nuclear with a diagonal nuclear state.
    pub fn product(electron: ElectronState, nucleus: NuclearInit) -> Self {
        let mut m = Matrix6::zeros();
        for (k, mi) in NuclearState::ALL.iter().enumerate() {
            let i = BasisLabel::new(electron, *mi).index();
            m[(i, i)] = C64::new(nucleus.weights()[k], 0.0);
        }
        DensityMatrix(m)
    }

    pub fn entries(&self) -> &Matrix6<C64> {
        &self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn purity(&self) -> f64 {
        (self.0 * self.0).trace().re
    }

    pub fn hermitian_defect(&self) -> f64 {
        let m = &self.0;
        let mut worst = 0.0f64;
        for i in 0..DIM {
            for j in i..DIM {
                worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (self.0 + self.0.adjoint()) * C64::new(0.5, 0.0);
        SymmetricEigen::new(herm).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Checks the density-matrix invariants.
    pub fn check(&self) -> std::result::Result<(), String> {
        let h = self.hermitian_defect();
        if !(h < HERMITIAN_TOL) {
            return Err(format!("Hermiticity defect {h:.3e}"));
        }
        let tr = self.trace();
        if !((tr - 1.0).abs() < TRACE_TOL) {
            return Err(format!("trace {tr:.12}"));
        }
        let min = self.min_eigenvalue();
        if !(min >= -POSITIVITY_TOL) {
            return Err(format!("negative eigenvalue {min:.3e}"));
        }
        Ok(())
    }

    pub fn populations(&self) -> [f64; DIM] {
        std::array::from_fn(|i| self.0[(i, i)].re)
    }

    pub fn population(&self, label: BasisLabel) -> f64 {
        self.0[(label.index(), label.index())].re
    }

    /// Reduced nuclear state Tr_e(rho) as a 2x2 matrix over (up, down).
    pub fn nuclear_reduced(&self) -> [[C64; 2]; 2] {
        let mut out = [[ZERO; 2]; 2];
        for e in 0..3 {
            for a in 0..2 {
                for b in 0..2 {
                    out[a][b] += self.0[(2 * e + a, 2 * e + b)];
                }
            }
        }
        out
    }

    /// Reduced electron state Tr_n(rho) as a 3x3 matrix over (+1, 0, -1).
    pub fn electron_reduced(&self) -> Matrix3<C64> {
        Matrix3::from_fn(|i, j| (0..2).map(|n| self.0[(2 * i + n, 2 * j + n)]).sum())
    }
}

/// Amplitudes (u, v, w) of |0,up>, |-1,up>, |-1,down>.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Amplitudes3 {
    pub u: C64,
    pub v: C64,
    pub w: C64,
}

impl Amplitudes3 {
    pub fn new(u: C64, v: C64, w: C64) -> Self {
        Amplitudes3 { u, v, w }
    }

    /// psi(0) = |0,up>.
    pub fn initial() -> Self {
        Amplitudes3 { u: ONE, v: ZERO, w: ZERO }
    }

    pub fn as_vector(&self) -> Vector3<C64> {
        Vector3::new(self.u, self.v, self.w)
    }

    pub fn from_vector(v: &Vector3<C64>) -> Self {
        Amplitudes3 { u: v[0], v: v[1], w: v[2] }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.u.norm_sqr() + self.v.norm_sqr() + self.w.norm_sqr()
    }

    pub fn populations(&self) -> [f64; 3] {
        [self.u.norm_sqr(), self.v.norm_sqr(), self.w.norm_sqr()]
    }

    /// Largest componentwise modulus of the difference.
    pub fn max_abs_diff(&self, other: &Amplitudes3) -> f64 {
        (self.u - other.u).norm().max((self.v - other.v).norm()).max((self.w - other.w).norm())
    }
}

/// Anything with basis populations.
pub trait PopulationSource {
    fn labeled_populations(&self) -> Vec<(BasisLabel, f64)>;
}

impl PopulationSource for DensityMatrix {
    fn labeled_populations(&self) -> Vec<(BasisLabel, f64)> {
        BasisLabel::all().map(|l| (l, self.population(l))).collect()
    }
}

impl PopulationSource for Amplitudes3 {
    fn labeled_populations(&self) -> Vec<(BasisLabel, f64)> {
        let p = self.populations();
        idx::DRIVEN
            .iter()
            .zip(p)
            .map(|(&i, v)| (BasisLabel::from_index(i).expect("driven index"), v))
            .collect()
    }
}

pub fn populations<S: PopulationSource>(state: &S) -> Vec<(BasisLabel, f64)> {
    state.labeled_populations()
}

/// Time grid plus named observable series.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub series: Vec<(String, Vec<f64>)>,
}

impl Trajectory {
    fn with_names(names: &[String]) -> Self {
        Trajectory { times: Vec::new(), series: names.iter().map(|n| (n.clone(), Vec::new())).collect() }
    }

    fn record(&mut self, t: f64, values: &[f64]) {
        self.times.push(t);
        for (s, v) in self.series.iter_mut().zip(values) {
            s.1.push(*v);
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&[f64]> {
        self.series.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.series.iter().map(|(n, _)| n.as_str())
    }

    /// Largest value of a series with its time.
    pub fn argmax(&self, name: &str) -> Option<(f64, f64)> {
        let s = self.get(name)?;
        let (i, v) = s.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1))?;
        Some((self.times[i], *v))
    }

    /// Linear interpolation of a series at time `t`.
    pub fn value_at(&self, name: &str, t: f64) -> Option<f64> {
        let s = self.get(name)?;
        if self.times.is_empty() {
            return None;
        }
        let k = self.times.partition_point(|&x| x < t);
        if k == 0 {
            return Some(s[0]);
        }
        if k >= self.times.len() {
            return Some(*s.last().expect("non-empty"));
        }
        let (t0, t1) = (self.times[k - 1], self.times[k]);
        let a = (t - t0) / (t1 - t0);
        Some(s[k - 1] * (1.0 - a) + s[k] * a)
    }

    /// Appends another trajectory that starts where this one ends; the
    /// duplicate boundary sample is dropped.
    pub fn extend(&mut self, other: &Trajectory) {
        let skip = usize::from(!self.is_empty() && !other.is_empty() && other.times[0] <= *self.times.last().unwrap());
        self.times.extend_from_slice(&other.times[skip..]);
        for ((_, a), (_, b)) in self.series.iter_mut().zip(&other.series) {
            a.extend_from_slice(&b[skip..]);
        }
    }
}

/// Result of an integration: stored observables plus the final state.
#[derive(Clone, Debug)]
pub struct Evolution<S> {
    pub trajectory: Trajectory,
    pub final_state: S,
    /// Step actually used.
    pub dt: f64,
}

/// Step and sampling controls.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepControl {
    /// Requested step; refined automatically when too coarse.
    pub dt: f64,
    /// Number of stored intervals; defaults to min(steps, 5000).
    pub samples: Option<usize>,
    /// Verify the state invariants at every stored sample.
    pub check_invariants: bool,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl { dt: 1e-3, samples: None, check_invariants: true }
    }
}

impl StepControl {
    pub fn with_dt(dt: f64) -> Self {
        StepControl { dt, ..Default::default() }
    }

    pub fn samples(mut self, n: usize) -> Self {
        self.samples = Some(n);
        self
    }
}

/// Step layout over a span: `samples` stored intervals of `per_sample` steps.
#[derive(Clone, Copy, Debug)]
struct Schedule {
    dt: f64,
    samples: usize,
    per_sample: usize,
}

fn schedule(span: f64, requested: f64, max_dt: f64, samples: Option<usize>) -> Result<Schedule> {
    if !(requested > 0.0) || !requested.is_finite() {
        return Err(Error::InvalidInput(format!("dt must be positive, got {requested}")));
    }
    if !(span >= 0.0) || !span.is_finite() {
        return Err(Error::InvalidInput(format!("integration span must be non-negative, got {span}")));
    }
    if span == 0.0 {
        return Ok(Schedule { dt: 0.0, samples: 0, per_sample: 0 });
    }
    let dt = requested.min(max_dt);
    let steps = (span / dt).ceil().max(1.0) as usize;
    let samples = samples.unwrap_or(steps.min(MAX_STORED_SAMPLES)).max(1);
    let per_sample = steps.div_ceil(samples);
    Ok(Schedule { dt: span / (samples * per_sample) as f64, samples, per_sample })
}

fn rk4<S>(f: &impl Fn(f64, &S) -> S, t: f64, y: &S, dt: f64) -> S
where
    S: Copy + Add<Output = S> + Mul<C64, Output = S>,
{
    let half = C64::new(0.5 * dt, 0.0);
    let k1 = f(t, y);
    let k2 = f(t + 0.5 * dt, &(*y + k1 * half));
    let k3 = f(t + 0.5 * dt, &(*y + k2 * half));
    let k4 = f(t + dt, &(*y + k3 * C64::new(dt, 0.0)));
    *y + (k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4) * C64::new(dt / 6.0, 0.0)
}

/// Master equation d rho/dt = -i [H(t), rho] + L rho.
#[derive(Clone, Debug)]
pub struct MasterEquation {
    pub hamiltonian: DrivenHamiltonian,
    pub dissipator: DephasingDissipator,
}

pub const MASTER_SERIES: [&str; 8] = ["p_pup", "p_pdown", "p_0up", "p_0down", "p_mup", "p_mdown", "p_down", "trace"];

impl MasterEquation {
    pub fn new(p: &PhysicalParams, switches: &ModelSwitches, frame: Frame) -> Self {
        MasterEquation { hamiltonian: driven_hamiltonian(p, switches, frame), dissipator: dephasing_dissipator(p) }
    }

    pub fn rhs(&self, t: f64, rho: &Matrix6<C64>) -> Matrix6<C64> {
        let h = self.hamiltonian.at(t);
        let comm = h * rho - rho * h;
        comm * C64::new(0.0, -1.0) + self.dissipator.apply(rho)
    }

    /// Largest step allowed by dt <= STEP_SAFETY / (frequency scale + kappa).
    pub fn max_dt(&self) -> f64 {
        STEP_SAFETY / (self.hamiltonian.frequency_scale() + self.dissipator.kappa)
    }

    /// Integrates from `t_start` to `t_end`.
    pub fn evolve(
        &self,
        rho0: &DensityMatrix,
        t_start: f64,
        t_end: f64,
        control: &StepControl,
    ) -> Result<Evolution<DensityMatrix>> {
        let sched = schedule(t_end - t_start, control.dt, self.max_dt(), control.samples)?;
        let names: Vec<String> = MASTER_SERIES.iter().map(|s| s.to_string()).collect();
        let mut traj = Trajectory::with_names(&names);
        let observe = |rho: &Matrix6<C64>| -> [f64; 8] {
            let d: [f64; 6] = std::array::from_fn(|i| rho[(i, i)].re);
            [d[0], d[1], d[2], d[3], d[4], d[5], d[1] + d[3] + d[5], rho.trace().re]
        };
        let check = |t: f64, rho: &Matrix6<C64>| -> Result<()> {
            if control.check_invariants {
                DensityMatrix(*rho).check().map_err(|reason| Error::IntegrationFailure { time: t, reason })?;
            }
            Ok(())
        };

        let mut rho = rho0.0;
        check(t_start, &rho)?;
        traj.record(t_start, &observe(&rho));
        let f = |t: f64, r: &Matrix6<C64>| self.rhs(t, r);
        let mut step = 0usize;
        for s in 0..sched.samples {
            for _ in 0..sched.per_sample {
                let t = t_start + step as f64 * sched.dt;
                rho = rk4(&f, t, &rho, sched.dt);
                step += 1;
            }
            let t = if s + 1 == sched.samples { t_end } else { t_start + step as f64 * sched.dt };
            check(t, &rho)?;
            traj.record(t, &observe(&rho));
        }
        Ok(Evolution { trajectory: traj, final_state: DensityMatrix(rho), dt: sched.dt })
    }
}

/// Master-equation run in the rotating frame from t = 0.
pub fn evolve_master(
    p: &PhysicalParams,
    rho0: &DensityMatrix,
    t_end: f64,
    dt: f64,
    switches: &ModelSwitches,
) -> Result<Evolution<DensityMatrix>> {
    p.validate()?;
    MasterEquation::new(p, switches, Frame::Rotating).evolve(rho0, 0.0, t_end, &StepControl::with_dt(dt))
}

pub const NONHERMITIAN_SERIES: [&str; 4] = ["p_0up", "p_mup", "p_mdown", "norm"];

/// Largest step for the three-level problem: STEP_SAFETY / (||H||_inf + kappa).
pub fn nonhermitian_max_dt(p: &PhysicalParams) -> f64 {
    let h = nonhermitian_matrix(p);
    let row_max = (0..3).map(|r| (0..3).map(|c| h[(r, c)].norm()).sum::<f64>()).fold(0.0, f64::max);
    STEP_SAFETY / (row_max + p.kappa)
}

/// Schroedinger evolution of (u, v, w) under the non-Hermitian Hamiltonian.
pub fn evolve_nonhermitian_with(
    p: &PhysicalParams,
    psi0: &Amplitudes3,
    t_end: f64,
    control: &StepControl,
) -> Result<Evolution<Amplitudes3>> {
    p.validate()?;
    let h = nonhermitian_matrix(p);
    let minus_i_h = h * C64::new(0.0, -1.0);
    let sched = schedule(t_end, control.dt, nonhermitian_max_dt(p), control.samples)?;
    let names: Vec<String> = NONHERMITIAN_SERIES.iter().map(|s| s.to_string()).collect();
    let mut traj = Trajectory::with_names(&names);
    let observe = |y: &Vector3<C64>| -> [f64; 4] {
        let a = Amplitudes3::from_vector(y);
        let pop = a.populations();
        [pop[0], pop[1], pop[2], a.norm_sqr()]
    };
    let f = |_t: f64, y: &Vector3<C64>| minus_i_h * y;
    let mut y = psi0.as_vector();
    traj.record(0.0, &observe(&y));
    let mut norm = y.norm_squared();
    let mut step = 0usize;
    for s in 0..sched.samples {
        for _ in 0..sched.per_sample {
            let t = step as f64 * sched.dt;
            y = rk4(&f, t, &y, sched.dt);
            step += 1;
            let next = y.norm_squared();
            if control.check_invariants && next - norm > NORM_GROWTH_TOL {
                return Err(Error::IntegrationFailure {
                    time: step as f64 * sched.dt,
                    reason: format!("norm grew by {:.3e}", next - norm),
                });
            }
            norm = next;
        }
        let t = if s + 1 == sched.samples { t_end } else { step as f64 * sched.dt };
        traj.record(t, &observe(&y));
    }
    Ok(Evolution { trajectory: traj, final_state: Amplitudes3::from_vector(&y), dt: sched.dt })
}

pub fn evolve_nonhermitian(
    p: &PhysicalParams,
    psi0: &Amplitudes3,
    t_end: f64,
    dt: f64,
) -> Result<Evolution<Amplitudes3>> {
    evolve_nonhermitian_with(p, psi0, t_end, &StepControl::with_dt(dt))
}

/// Embeds driven three-level amplitudes into a six-level pure state.
pub fn embed_amplitudes(a: &Amplitudes3) -> DensityMatrix {
    let mut psi = [ZERO; DIM];
    psi[idx::ZERO_UP] = a.u;
    psi[idx::MINUS_UP] = a.v;
    psi[idx::MINUS_DOWN] = a.w;
    DensityMatrix(Matrix6::from_fn(|i, j| psi[i] * psi[j].conj()))
}

/// Rotating-frame state converted to the lab frame at time `t`.
pub fn to_lab_frame(p: &PhysicalParams, switches: &ModelSwitches, rho: &DensityMatrix, t: f64) -> DensityMatrix {
    let f = model::frame_energies(p, switches);
    DensityMatrix(model::rotating_to_lab(&rho.0, &f, t))
}
