//! Figure-reproduction scenarios, coupling/noise sweeps and the pulse
//! parameter grid search.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::ClosedForm;
use crate::dynamics::{
    evolve_nonhermitian_with, Amplitudes3, DensityMatrix, MasterEquation, NuclearInit, StepControl, Trajectory,
};
use crate::error::{Error, Result};
use crate::model::{Frame, ModelSwitches, PhysicalParams};
use crate::output::{Cell, Table};
use crate::protocol::{evolve_pulse, ProtocolConfig, Scheme, SEQUENTIAL_RABI};
use crate::spin::{BasisLabel, ElectronState, NuclearState};

/// Hyperfine couplings of the three marked carbon shells.
pub const MARKED_COUPLINGS: [f64; 3] = [130.0, 14.8, -7.5];

/// Environment variable capping sweep parallelism.
pub const THREADS_ENV: &str = "DARKPOL_THREADS";

fn zero_up() -> DensityMatrix {
    DensityMatrix::pure(BasisLabel::new(ElectronState::Zero, NuclearState::Up))
}

/// Fig. 2 style comparison of the non-Hermitian model against the master equation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fig2Options {
    pub t_end: f64,
    pub samples: usize,
    pub dt: f64,
    pub switches: ModelSwitches,
}

impl Default for Fig2Options {
    fn default() -> Self {
        Fig2Options { t_end: 0.5, samples: 500, dt: 1e-3, switches: ModelSwitches::full() }
    }
}

#[derive(Clone, Debug)]
pub struct Fig2Result {
    pub table: Table,
    /// (time, value) of the non-Hermitian P(-1,down) maximum.
    pub nh_peak: (f64, f64),
    pub me_peak: (f64, f64),
    /// max_t |P_me(-1,down) - P_nh(-1,down)|.
    pub max_gap: f64,
}

pub const FIG2_COLUMNS: [&str; 7] =
    ["t_us", "p_0up_nh", "p_mup_nh", "p_mdown_nh", "p_0up_me", "p_mup_me", "p_mdown_me"];

pub fn scenario_fig2(p: &PhysicalParams, opts: &Fig2Options) -> Result<Fig2Result> {
    p.validate()?;
    let control = StepControl::with_dt(opts.dt).samples(opts.samples);
    let nh = evolve_nonhermitian_with(p, &Amplitudes3::initial(), opts.t_end, &control)?.trajectory;
    let me = MasterEquation::new(p, &opts.switches, Frame::Rotating)
        .evolve(&zero_up(), 0.0, opts.t_end, &control)?
        .trajectory;
    let series = |t: &Trajectory, name: &str| t.get(name).expect("known series").to_vec();
    let cols = [
        series(&nh, "p_0up"),
        series(&nh, "p_mup"),
        series(&nh, "p_mdown"),
        series(&me, "p_0up"),
        series(&me, "p_mup"),
        series(&me, "p_mdown"),
    ];
    let mut table = Table::new(&FIG2_COLUMNS);
    let mut max_gap = 0.0f64;
    for (i, &t) in nh.times.iter().enumerate() {
        let mut row = vec![Cell::Num(t)];
        row.extend(cols.iter().map(|c| Cell::Num(c[i])));
        table.push(row);
        max_gap = max_gap.max((cols[5][i] - cols[2][i]).abs());
    }
    Ok(Fig2Result {
        table,
        nh_peak: nh.argmax("p_mdown").expect("non-empty"),
        me_peak: me.argmax("p_mdown").expect("non-empty"),
        max_gap,
    })
}

/// Simultaneous versus sequential pulses.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fig3Options {
    pub initial_nuclear: NuclearInit,
    pub samples: usize,
    pub dt: f64,
    pub switches: ModelSwitches,
}

impl Default for Fig3Options {
    fn default() -> Self {
        Fig3Options { initial_nuclear: NuclearInit::Mixed, samples: 1000, dt: 1e-3, switches: ModelSwitches::full() }
    }
}

#[derive(Clone, Debug)]
pub struct Fig3Result {
    pub table: Table,
    pub simultaneous_max: (f64, f64),
    pub sequential_max: (f64, f64),
    /// Sequential p_down at the time of the simultaneous maximum.
    pub sequential_at_sim_max: f64,
}

/// Sequential-scheme parameters derived from the simultaneous ones.
pub fn sequential_params(p: &PhysicalParams) -> PhysicalParams {
    PhysicalParams { omega1: SEQUENTIAL_RABI, omega2: SEQUENTIAL_RABI, ..*p }
}

/// Both curves cover the sequential pulse pair; the simultaneous drive stays on throughout.
pub fn scenario_fig3(p_sim: &PhysicalParams, p_seq: &PhysicalParams, opts: &Fig3Options) -> Result<Fig3Result> {
    p_sim.validate()?;
    p_seq.validate()?;
    let seq_scheme = Scheme::sequential_for(p_seq);
    let t_end = seq_scheme.duration();
    let rho0 = DensityMatrix::product(ElectronState::Zero, opts.initial_nuclear);
    let control = StepControl::with_dt(opts.dt).samples(opts.samples);

    let sim_cfg = ProtocolConfig {
        switches: opts.switches,
        ..ProtocolConfig::new(Scheme::Simultaneous { t_pulse: t_end }, 1)
    };
    let sim = evolve_pulse(p_sim, &sim_cfg, &rho0, &control)?.trajectory;
    let seq_cfg = ProtocolConfig { switches: opts.switches, ..ProtocolConfig::new(seq_scheme, 1) };
    let seq_control = StepControl::with_dt(opts.dt).samples(opts.samples.div_ceil(2));
    let seq = evolve_pulse(p_seq, &seq_cfg, &rho0, &seq_control)?.trajectory;

    let mut table = Table::new(&["t_us", "p_down_simultaneous", "p_down_sequential"]);
    let sim_down = sim.get("p_down").expect("series");
    for (i, &t) in sim.times.iter().enumerate() {
        let s = seq.value_at("p_down", t).expect("series");
        table.push(vec![Cell::Num(t), Cell::Num(sim_down[i]), Cell::Num(s)]);
    }
    let simultaneous_max = sim.argmax("p_down").expect("non-empty");
    Ok(Fig3Result {
        table,
        simultaneous_max,
        sequential_max: seq.argmax("p_down").expect("non-empty"),
        sequential_at_sim_max: seq.value_at("p_down", simultaneous_max.0).expect("series"),
    })
}

/// How drive strengths are chosen at each sweep point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "policy")]
pub enum RabiPolicy {
    /// Omega1 = Omega2 = fraction * |A_par|.
    Fraction { fraction: f64 },
    Fixed { omega1: f64, omega2: f64 },
}

impl RabiPolicy {
    pub fn rabi(&self, a_par: f64) -> (f64, f64) {
        match *self {
            RabiPolicy::Fraction { fraction } => (fraction * a_par.abs(), fraction * a_par.abs()),
            RabiPolicy::Fixed { omega1, omega2 } => (omega1, omega2),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMetric {
    /// Maximum over the window of the nuclear down population.
    MaxDown,
    /// Nuclear down population after one cycle started from |0,up>.
    CycleFidelity,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub a_values: Vec<f64>,
    pub kappas: Vec<f64>,
    pub rabi: RabiPolicy,
    pub metric: SweepMetric,
    /// Window length in units of pi / Omega.
    pub window: f64,
    /// Tie A_perp to A_par; otherwise the base value is kept.
    pub tie_perp: bool,
    /// Other parameters.
    pub base: PhysicalParams,
    pub switches: ModelSwitches,
    pub dt: f64,
    pub samples: usize,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            a_values: vec![-7.5, 14.8, 30.0, 50.0, 70.0, 90.0, 110.0, 130.0],
            kappas: vec![1.0, 1.0 / 5.8, 1.0 / 58.0],
            rabi: RabiPolicy::Fraction { fraction: 0.1 },
            metric: SweepMetric::MaxDown,
            window: 4.0,
            tie_perp: true,
            base: PhysicalParams::default(),
            switches: ModelSwitches::full(),
            dt: 1e-3,
            samples: 2000,
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.a_values.is_empty() || self.kappas.is_empty() {
            return Err(Error::InvalidInput("sweep axes must be non-empty".into()));
        }
        if !(self.window > 0.0) || self.samples == 0 {
            return Err(Error::InvalidInput("sweep window and samples must be positive".into()));
        }
        Ok(())
    }

    /// Parameters of grid point (kappa index, A index).
    pub fn point(&self, kappa: f64, a: f64) -> PhysicalParams {
        let (omega1, omega2) = self.rabi.rabi(a);
        PhysicalParams {
            a_par: a,
            a_perp: if self.tie_perp { a } else { self.base.a_perp },
            omega1,
            omega2,
            kappa,
            ..self.base
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepPoint {
    pub a_par: f64,
    pub kappa: f64,
    pub params: PhysicalParams,
    pub fidelity: f64,
    pub t_at_max: f64,
    pub flags: String,
}

pub const FIG4_COLUMNS: [&str; 9] =
    ["a_par", "a_perp", "kappa", "omega1", "omega2", "fidelity", "t_at_max_us", "flags", "marker"];

#[derive(Clone, Debug)]
pub struct Fig4Result {
    pub points: Vec<SweepPoint>,
    pub table: Table,
}

impl Fig4Result {
    pub fn find(&self, a_par: f64, kappa: f64) -> Option<&SweepPoint> {
        self.points.iter().find(|p| (p.a_par - a_par).abs() < 1e-12 && (p.kappa - kappa).abs() < 1e-12)
    }

    /// Whether the 14.8 shell beats the 130 shell at the given noise strength.
    pub fn second_shell_exceeds_first(&self, kappa: f64) -> Option<bool> {
        Some(self.find(14.8, kappa)?.fidelity > self.find(130.0, kappa)?.fidelity)
    }
}

fn sweep_point(spec: &SweepSpec, kappa: f64, a: f64) -> Result<SweepPoint> {
    let params = spec.point(kappa, a);
    params.validate()?;
    let flags = params.validity().flags();
    let omega = params.omega();
    if !(omega > 0.0) {
        return Err(Error::InvalidInput(format!("zero drive at A_par = {a}")));
    }
    let rho0 = zero_up();
    let (fidelity, t_at_max) = match spec.metric {
        SweepMetric::MaxDown => {
            let len = spec.window * PI / omega;
            let control = StepControl::with_dt(spec.dt).samples(spec.samples);
            let run = MasterEquation::new(&params, &spec.switches, Frame::Rotating).evolve(&rho0, 0.0, len, &control)?;
            let (t, v) = run.trajectory.argmax("p_down").expect("non-empty");
            (v, t)
        }
        SweepMetric::CycleFidelity => {
            let cfg = ProtocolConfig {
                switches: spec.switches,
                dt: spec.dt,
                ..ProtocolConfig::new(Scheme::simultaneous_for(&params), 1)
            };
            (crate::protocol::transfer_fidelity(&params, &cfg)?, PI / omega)
        }
    };
    Ok(SweepPoint { a_par: a, kappa, params, fidelity, t_at_max, flags })
}

/// Runs `f` on a pool capped by `DARKPOL_THREADS` when set.
pub fn with_thread_cap<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .map_err(|_| Error::InvalidInput(format!("{THREADS_ENV} must be a positive integer, got '{v}'")))?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::InvalidInput(e.to_string()))?;
            Ok(pool.install(f))
        }
        Err(_) => Ok(f()),
    }
}

/// Sweep over (kappa, A_par); rows are ordered kappa-major, then by A in input order.
pub fn scenario_fig4(spec: &SweepSpec) -> Result<Fig4Result> {
    spec.validate()?;
    let grid: Vec<(f64, f64)> =
        spec.kappas.iter().flat_map(|&k| spec.a_values.iter().map(move |&a| (k, a))).collect();
    let results: Vec<Result<SweepPoint>> =
        with_thread_cap(|| grid.par_iter().map(|&(k, a)| sweep_point(spec, k, a)).collect())?;
    let points = results.into_iter().collect::<Result<Vec<_>>>()?;

    let mut table = Table::new(&FIG4_COLUMNS);
    for pt in &points {
        let marker = MARKED_COUPLINGS.iter().any(|m| (m - pt.a_par).abs() < 1e-12);
        table.push(vec![
            Cell::Num(pt.a_par),
            Cell::Num(pt.params.a_perp),
            Cell::Num(pt.kappa),
            Cell::Num(pt.params.omega1),
            Cell::Num(pt.params.omega2),
            Cell::Num(pt.fidelity),
            Cell::Num(pt.t_at_max),
            Cell::Text(pt.flags.clone()),
            Cell::Text(if marker { "marked".into() } else { String::new() }),
        ]);
    }
    Ok(Fig4Result { points, table })
}

/// Inclusive uniform grid; `steps` = 1 means the single value `min`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Axis {
    pub fn fixed(v: f64) -> Axis {
        Axis { min: v, max: v, steps: 1 }
    }

    pub fn range(min: f64, max: f64, steps: usize) -> Axis {
        Axis { min, max, steps }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.steps <= 1 {
            return vec![self.min];
        }
        (0..self.steps).map(|i| self.min + (self.max - self.min) * i as f64 / (self.steps - 1) as f64).collect()
    }

    pub fn step(&self) -> f64 {
        if self.steps <= 1 {
            0.0
        } else {
            (self.max - self.min) / (self.steps - 1) as f64
        }
    }

    pub fn contains(&self, v: f64) -> bool {
        let (lo, hi) = (self.min.min(self.max), self.min.max(self.max));
        let slack = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
        v >= lo - slack && v <= hi + slack
    }

    fn validate(&self, name: &str) -> Result<()> {
        if self.steps == 0 || !self.min.is_finite() || !self.max.is_finite() || self.min > self.max {
            return Err(Error::InvalidInput(format!("bad grid for {name}")));
        }
        Ok(())
    }
}

/// Search box; the pulse length is expressed in units of pi / Omega.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub omega1: Axis,
    pub omega2: Axis,
    pub delta: Axis,
    pub delta_two_photon: Axis,
    pub t_scale: Axis,
}

impl Bounds {
    /// Rabi frequencies up to the selective-excitation limit |A_par| / 10,
    /// delta in +-|A_par|/20, Delta as given, t in [0.8, 1.2] pi / Omega.
    pub fn around(p: &PhysicalParams) -> Bounds {
        let top = 0.1 * p.a_par.abs();
        Bounds {
            omega1: Axis::range(0.2 * top, top, 9),
            omega2: Axis::range(0.2 * top, top, 9),
            delta: Axis::range(-0.05 * p.a_par.abs(), 0.05 * p.a_par.abs(), 21),
            delta_two_photon: Axis::fixed(p.delta_two_photon),
            t_scale: Axis::range(0.8, 1.2, 41),
        }
    }

    fn validate(&self) -> Result<()> {
        self.omega1.validate("Omega1")?;
        self.omega2.validate("Omega2")?;
        self.delta.validate("delta")?;
        self.delta_two_photon.validate("Delta")?;
        self.t_scale.validate("t")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Optimum {
    pub params: PhysicalParams,
    pub t: f64,
    /// |w(t)|^2 of the three-level model.
    pub objective: f64,
    /// Six-level master-equation down population at the same point, if requested.
    pub refined: Option<f64>,
    pub evaluated: usize,
}

/// Exhaustive grid search of |w(t)|^2 over points satisfying the
/// selective-excitation conditions. Ties keep the first point in grid order.
pub fn optimize_pulse(p: &PhysicalParams, bounds: &Bounds, refine: Option<&ModelSwitches>) -> Result<Optimum> {
    p.validate()?;
    bounds.validate()?;
    let t_scales = bounds.t_scale.values();
    let mut candidates = Vec::new();
    for &o1 in &bounds.omega1.values() {
        for &o2 in &bounds.omega2.values() {
            for &d in &bounds.delta.values() {
                for &dd in &bounds.delta_two_photon.values() {
                    let q = PhysicalParams { omega1: o1, omega2: o2, delta: d, delta_two_photon: dd, ..*p };
                    let v = q.validity();
                    if v.mw_selective_ok && v.rf_selective_ok && q.omega() > 0.0 {
                        candidates.push(q);
                    }
                }
            }
        }
    }
    if candidates.is_empty() {
        return Err(Error::Infeasible("no grid point satisfies the selective-excitation conditions".into()));
    }

    let scored: Vec<Option<(f64, f64, usize)>> = with_thread_cap(|| {
        candidates
            .par_iter()
            .map(|q| {
                let cf = ClosedForm::new(q).ok()?;
                let base = PI / q.omega();
                let mut best: Option<(f64, f64)> = None;
                for &s in &t_scales {
                    let w = cf.at(s * base).w.norm_sqr();
                    if best.is_none_or(|(b, _)| w > b) {
                        best = Some((w, s * base));
                    }
                }
                best.map(|(w, t)| (w, t, t_scales.len()))
            })
            .collect()
    })?;

    let mut best: Option<(usize, f64, f64)> = None;
    let mut evaluated = 0;
    for (i, s) in scored.iter().enumerate() {
        if let Some((w, t, n)) = *s {
            evaluated += n;
            if best.is_none_or(|(_, b, _)| w > b) {
                best = Some((i, w, t));
            }
        }
    }
    let (i, objective, t) =
        best.ok_or_else(|| Error::Infeasible("every feasible point has degenerate eigen-energies".into()))?;
    let params = candidates[i];
    let refined = match refine {
        Some(sw) => {
            let run = MasterEquation::new(&params, sw, Frame::Rotating).evolve(
                &zero_up(),
                0.0,
                t,
                &StepControl::default().samples(1),
            )?;
            Some(*run.trajectory.get("p_down").expect("series").last().expect("non-empty"))
        }
        None => None,
    };
    Ok(Optimum { params, t, objective, refined, evaluated })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::default_params;

    #[test]
    fn axis_values() {
        assert_eq!(Axis::fixed(2.0).values(), vec![2.0]);
        let a = Axis::range(0.0, 1.0, 5);
        assert_eq!(a.values(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(a.step(), 0.25);
        assert!(a.contains(1.0) && !a.contains(1.1));
    }

    #[test]
    fn rabi_policy() {
        assert_eq!(RabiPolicy::Fraction { fraction: 0.1 }.rabi(-7.5), (0.75, 0.75));
        assert_eq!(RabiPolicy::Fixed { omega1: 1.0, omega2: 2.0 }.rabi(130.0), (1.0, 2.0));
        let spec = SweepSpec::default();
        let q = spec.point(1.0, -7.5);
        assert_eq!(q.a_perp, -7.5);
        assert!(q.validity().mw_selective_ok);
    }

    #[test]
    fn sweep_rejects_empty_axes() {
        let spec = SweepSpec { a_values: vec![], ..SweepSpec::default() };
        assert!(scenario_fig4(&spec).is_err());
    }

    #[test]
    fn optimizer_balanced_resonant() {
        let p = default_params();
        let b = Bounds::around(&p);
        let best = optimize_pulse(&p, &b, None).unwrap();
        assert!(best.params.delta.abs() <= b.delta.step() + 1e-12);
        assert!((best.params.omega1 - 13.0).abs() < 1e-9);
        assert!((best.params.omega2 - 13.0).abs() < 1e-9);
        assert!((best.t - PI / best.params.omega()).abs() <= b.t_scale.step() * PI / best.params.omega() + 1e-12);
        let default_obj = ClosedForm::new(&p).unwrap().at(PI / p.omega()).w.norm_sqr();
        assert!(best.objective >= default_obj);
        for (axis, v) in [(b.omega1, best.params.omega1), (b.omega2, best.params.omega2), (b.delta, best.params.delta)] {
            assert!(axis.contains(v));
        }
    }

    #[test]
    fn optimizer_tracks_half_two_photon_detuning() {
        let p = PhysicalParams { delta_two_photon: 2.0, ..default_params() };
        let b = Bounds {
            omega1: Axis::fixed(13.0),
            omega2: Axis::fixed(13.0),
            delta: Axis::range(-3.0, 3.0, 61),
            delta_two_photon: Axis::fixed(2.0),
            t_scale: Axis::range(0.8, 1.2, 81),
        };
        let best = optimize_pulse(&p, &b, None).unwrap();
        assert!((best.params.delta - 1.0).abs() <= b.delta.step() + 1e-12, "delta = {}", best.params.delta);
    }

    #[test]
    fn optimizer_infeasible() {
        let p = default_params();
        let b = Bounds { omega1: Axis::fixed(100.0), ..Bounds::around(&p) };
        assert!(matches!(optimize_pulse(&p, &b, None), Err(Error::Infeasible(_))));
    }
}
