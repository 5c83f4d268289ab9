//! Acceptance suite: one PASS/FAIL line per criterion plus INFO rows.
//! Run with `cargo test --test acceptance`; exits nonzero when any criterion fails.

use std::f64::consts::PI;
use std::time::Instant;

use darkpol::analytic::{characteristic_residual, characteristic_roots, perturbative_roots, polarization_deficit, ClosedForm};
use darkpol::dynamics::{
    evolve_nonhermitian, evolve_nonhermitian_with, Amplitudes3, DensityMatrix, MasterEquation, NuclearInit, StepControl,
};
use darkpol::experiments::{
    scenario_fig2, scenario_fig3, scenario_fig4, sequential_params, Fig2Options, Fig3Options, SweepSpec,
};
use darkpol::model::{default_params, dephasing_dissipator, Frame, ModelSwitches, PhysicalParams};
use darkpol::protocol::{recursion_prediction, reset_electron, run_protocol, ProtocolConfig, Scheme};
use darkpol::spin::spin_operators;
use nalgebra::{DMatrix, Matrix6};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20240601;

const C1_DRAWS: usize = 50;
const C1_TOL: f64 = 1e-6;
const C1_T_END: f64 = 0.5;
const C1_KAPPA_RATIO: f64 = 0.1;
const C1_SECONDS: f64 = 10.0;

const C2_DRAWS: usize = 1000;
const C2_RESIDUAL: f64 = 1e-9;
const C2_VIETA: f64 = 1e-9;
const C2_PERTURBATIVE: f64 = 5e-5;
const C2_SECONDS: f64 = 5.0;

const C3_TOL: f64 = 1e-9;

const C4_REL_LOW_NOISE: f64 = 0.10;
const C4_REL_HIGH_NOISE: f64 = 0.15;
/// Halving kappa must shrink the absolute discrepancy by at least this factor
/// (4 for a quadratic law, 2 for a linear one).
const C4_SHRINK_MIN: f64 = 3.0;
const C4_SECONDS: f64 = 5.0;

const C5_GAP: f64 = 0.05;
const C5_PEAK: f64 = 0.99;
const C5_PEAK_TIME_TOL: f64 = 0.005;
const C5_SECONDS: f64 = 60.0;

const C6_SECONDS: f64 = 60.0;

const C7_BAND: (f64, f64) = (0.90, 0.96);
const C7_SECONDS: f64 = 60.0;

const C8_TARGET: f64 = 0.99;
const C8_RECURSION_TOL: f64 = 5e-3;
const C8_SECONDS: f64 = 120.0;

const C9_COMMUTATOR: f64 = 1e-12;
const C9_DISSIPATOR_TRACE: f64 = 1e-12;
const C9_TRACE: f64 = 1e-8;
const C9_HERMITIAN: f64 = 1e-10;
const C9_POSITIVITY: f64 = 1e-8;
const C9_NORM_GROWTH: f64 = 1e-12;
const C9_RESET: f64 = 1e-12;
const C9_MONOTONE: f64 = 1e-6;

struct Report {
    failures: usize,
}

impl Report {
    fn criterion(&mut self, id: usize, name: &str, pass: bool, seconds: f64, detail: &str) {
        if !pass {
            self.failures += 1;
        }
        println!("{} {id}. {name} [{seconds:.1} s] {detail}", if pass { "PASS" } else { "FAIL" });
    }

    fn info(&self, detail: &str) {
        println!("INFO    {detail}");
    }
}

fn random_params(rng: &mut ChaCha8Rng) -> PhysicalParams {
    let omega1 = rng.random_range(3.0..20.0);
    let omega2 = rng.random_range(3.0..20.0);
    let om = f64::hypot(omega1, omega2);
    PhysicalParams {
        omega1,
        omega2,
        delta: rng.random_range(-0.3..0.3) * om,
        delta_two_photon: rng.random_range(-0.3..0.3) * om,
        kappa: rng.random_range(0.0..C1_KAPPA_RATIO) * om,
        ..default_params()
    }
}

fn random_density(rng: &mut ChaCha8Rng) -> DensityMatrix {
    let g = Matrix6::<C64>::from_fn(|_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let m = g * g.adjoint();
    let tr = m.trace();
    let m = m / tr;
    let herm = (m + m.adjoint()) * C64::new(0.5, 0.0);
    DensityMatrix::new(herm).expect("random density matrix is valid")
}

fn c1(report: &mut Report) {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    let mut used = 0;
    for _ in 0..C1_DRAWS {
        let p = random_params(&mut rng);
        let cf = ClosedForm::new(&p).expect("random draw is non-degenerate");
        let run = evolve_nonhermitian_with(&p, &Amplitudes3::initial(), C1_T_END, &StepControl::with_dt(1e-3).samples(500))
            .expect("integration");
        let traj = &run.trajectory;
        let (pu, pv, pw) = (traj.get("p_0up").unwrap(), traj.get("p_mup").unwrap(), traj.get("p_mdown").unwrap());
        for (i, &t) in traj.times.iter().enumerate() {
            let [a, b, c] = cf.at(t).populations();
            worst = worst.max((a - pu[i]).abs()).max((b - pv[i]).abs()).max((c - pw[i]).abs());
        }
        let end = cf.at(C1_T_END);
        worst = worst.max(end.max_abs_diff(&run.final_state));
        used += 1;
    }
    let s = start.elapsed().as_secs_f64();
    report.criterion(
        1,
        "closed form vs non-Hermitian integration",
        worst < C1_TOL && used == C1_DRAWS && s < C1_SECONDS,
        s,
        &format!("{used} draws, max deviation {worst:.2e} (tol {C1_TOL:.0e})"),
    );
}

fn c2(report: &mut Report) {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let (mut worst_res, mut worst_vieta) = (0.0f64, 0.0f64);
    for _ in 0..C2_DRAWS {
        let p = PhysicalParams {
            omega1: rng.random_range(0.5..30.0),
            omega2: rng.random_range(0.5..30.0),
            delta: rng.random_range(-30.0..30.0),
            delta_two_photon: rng.random_range(-30.0..30.0),
            kappa: rng.random_range(0.0..10.0),
            ..default_params()
        };
        let om = p.omega();
        let r = characteristic_roots(&p).expect("roots");
        for x in r.x {
            worst_res = worst_res.max(characteristic_residual(&p, x).norm() / om.powi(3));
        }
        let (w1, w2) = p.complex_detunings();
        let scale = om + w1.norm() + w2.norm();
        let [a, b, c] = r.x;
        let e1 = ((a + b + c) - (w1 + w2)).norm() / scale;
        let e2 = ((a * b + a * c + b * c) - (w1 * w2 - om * om)).norm() / scale.powi(2);
        let e3 = (a * b * c + w2 * p.omega1 * p.omega1).norm() / scale.powi(3);
        worst_vieta = worst_vieta.max(e1).max(e2).max(e3);
    }
    let p = default_params();
    let pert = perturbative_roots(&p).unwrap().max_distance(&characteristic_roots(&p).unwrap()) / p.omega();
    let s = start.elapsed().as_secs_f64();
    report.criterion(
        2,
        "cubic roots: residual, Vieta, perturbative",
        worst_res < C2_RESIDUAL && worst_vieta < C2_VIETA && pert < C2_PERTURBATIVE && s < C2_SECONDS,
        s,
        &format!(
            "{C2_DRAWS} draws, residual/Omega^3 {worst_res:.1e}, Vieta {worst_vieta:.1e}, perturbative/Omega {pert:.1e}"
        ),
    );
}

fn c3(report: &mut Report) {
    let start = Instant::now();
    let p = PhysicalParams { kappa: 0.0, delta: 0.0, delta_two_photon: 0.0, ..default_params() };
    let t = PI / p.omega();
    let closed = ClosedForm::new(&p).unwrap().at(t).w.norm_sqr();
    let numeric = evolve_nonhermitian(&p, &Amplitudes3::initial(), t, 1e-4).unwrap().final_state.w.norm_sqr();
    let dev = (closed - 1.0).abs().max((numeric - 1.0).abs());
    report.criterion(
        3,
        "ideal transfer at t = pi/Omega",
        dev < C3_TOL,
        start.elapsed().as_secs_f64(),
        &format!("t = {t:.5} us, |w|^2 closed form {closed:.12}, integrated {numeric:.12}"),
    );
}

fn numeric_deficit(kappa: f64) -> f64 {
    let p = PhysicalParams { kappa, ..default_params() };
    let run = evolve_nonhermitian(&p, &Amplitudes3::initial(), PI / p.omega(), 1e-4).unwrap();
    1.0 - run.final_state.w.norm_sqr()
}

fn c4(report: &mut Report) {
    let start = Instant::now();
    let formula = |kappa: f64| polarization_deficit(&PhysicalParams { kappa, ..default_params() }).unwrap();
    let k_low = 1.0 / 58.0;
    let rel_low = (numeric_deficit(k_low) - formula(k_low)).abs() / formula(k_low);
    let rel_high = (numeric_deficit(1.0) - formula(1.0)).abs() / formula(1.0);
    let diff = |k: f64| (numeric_deficit(k) - formula(k)).abs();
    let shrink = diff(k_low) / diff(k_low / 2.0);
    let s = start.elapsed().as_secs_f64();
    report.criterion(
        4,
        "deficit formula 3 pi kappa / (8 Omega)",
        rel_low < C4_REL_LOW_NOISE && rel_high < C4_REL_HIGH_NOISE && shrink >= C4_SHRINK_MIN && s < C4_SECONDS,
        s,
        &format!(
            "kappa=1/58: numeric {:.4e} vs formula {:.4e} (rel {:.1}%); kappa=1: {:.4e} vs {:.4e} (rel {:.1}%); \
             discrepancy ratio on halving kappa {shrink:.2}",
            numeric_deficit(k_low),
            formula(k_low),
            100.0 * rel_low,
            numeric_deficit(1.0),
            formula(1.0),
            100.0 * rel_high
        ),
    );
    report.info(&format!(
        "numeric / formula deficit ratio: {:.4} (kappa=1/58), {:.4} (kappa=1/580), 5/3 = 1.6667",
        numeric_deficit(k_low) / formula(k_low),
        numeric_deficit(0.1 * k_low) / formula(0.1 * k_low)
    ));
}

fn c5(report: &mut Report) {
    let start = Instant::now();
    let p = default_params();
    let r = scenario_fig2(&p, &Fig2Options::default()).unwrap();
    let s = start.elapsed().as_secs_f64();
    let t_star = PI / p.omega();
    let peak_ok = r.nh_peak.1 >= C5_PEAK && (r.nh_peak.0 - t_star).abs() <= C5_PEAK_TIME_TOL;
    report.criterion(
        5,
        "master equation vs non-Hermitian P(-1,down)",
        r.max_gap < C5_GAP && peak_ok && s < C5_SECONDS,
        s,
        &format!(
            "max gap {:.4} over [0, 0.5] us (tol {C5_GAP}); nh peak {:.5} at {:.3} us; master peak {:.4} at {:.3} us",
            r.max_gap, r.nh_peak.1, r.nh_peak.0, r.me_peak.1, r.me_peak.0
        ),
    );
    let variants = [
        ("full model on [0, pi/Omega]", p, ModelSwitches::full(), t_star),
        ("A_perp = 0", PhysicalParams { a_perp: 0.0, ..p }, ModelSwitches::full(), 0.5),
        ("carriers on exact spacings", p, ModelSwitches { dressed_resonance: true, ..ModelSwitches::full() }, 0.5),
        ("no off-resonant drive terms", p, ModelSwitches { off_resonant: false, ..ModelSwitches::full() }, 0.5),
        ("three-level master equation", p, ModelSwitches::three_level(), 0.5),
    ];
    for (label, q, sw, t_end) in variants {
        let v = scenario_fig2(&q, &Fig2Options { switches: sw, t_end, samples: 500, ..Fig2Options::default() }).unwrap();
        report.info(&format!("fig2 gap, {label}: {:.4} (master peak {:.4})", v.max_gap, v.me_peak.1));
    }
}

fn c6(report: &mut Report) {
    let start = Instant::now();
    let p = default_params();
    let r = scenario_fig3(&p, &sequential_params(&p), &Fig3Options::default()).unwrap();
    let s = start.elapsed().as_secs_f64();
    report.criterion(
        6,
        "simultaneous beats sequential at the simultaneous peak",
        r.simultaneous_max.1 > r.sequential_at_sim_max && s < C6_SECONDS,
        s,
        &format!(
            "simultaneous max {:.4} at {:.3} us, sequential there {:.4} (sequential max {:.4} at {:.3} us)",
            r.simultaneous_max.1, r.simultaneous_max.0, r.sequential_at_sim_max, r.sequential_max.1, r.sequential_max.0
        ),
    );
    report.info(&format!(
        "fig3 pair, mixed nuclear start: {:.3} vs {:.3} (reference 0.90 vs 0.48)",
        r.simultaneous_max.1, r.sequential_at_sim_max
    ));
    let pure = scenario_fig3(
        &p,
        &sequential_params(&p),
        &Fig3Options { initial_nuclear: NuclearInit::Up, ..Fig3Options::default() },
    )
    .unwrap();
    report.info(&format!(
        "fig3 pair, pure |0,up> start: {:.3} vs {:.3} (reference 0.90 vs 0.48)",
        pure.simultaneous_max.1, pure.sequential_at_sim_max
    ));
}

fn c7(report: &mut Report) {
    let start = Instant::now();
    let spec = SweepSpec { a_values: vec![130.0], kappas: vec![1.0], ..SweepSpec::default() };
    let r = scenario_fig4(&spec).unwrap();
    let pt = &r.points[0];
    let s = start.elapsed().as_secs_f64();
    report.criterion(
        7,
        "first-shell fidelity band at kappa = 1",
        pt.fidelity >= C7_BAND.0 && pt.fidelity <= C7_BAND.1 && s < C7_SECONDS,
        s,
        &format!(
            "max down fidelity {:.4} at {:.3} us (band [{}, {}]), Omega1 = Omega2 = {}",
            pt.fidelity, pt.t_at_max, C7_BAND.0, C7_BAND.1, pt.params.omega1
        ),
    );
}

fn c8(report: &mut Report) {
    let start = Instant::now();
    let p = default_params();
    let full = run_protocol(&p, &ProtocolConfig::new(Scheme::simultaneous_for(&p), 10)).unwrap();
    let ideal_cfg =
        ProtocolConfig { switches: ModelSwitches::three_level(), ..ProtocolConfig::new(Scheme::simultaneous_for(&p), 10) };
    let ideal = run_protocol(&p, &ideal_cfg).unwrap();
    let f = ideal.cycles[0].fidelity;
    let worst = ideal
        .cycles
        .iter()
        .map(|c| (c.p_down - recursion_prediction(ideal.initial_p_down, f, c.cycle)).abs())
        .fold(0.0, f64::max);
    let s = start.elapsed().as_secs_f64();
    report.criterion(
        8,
        "protocol convergence after 10 cycles",
        full.final_p_down() > C8_TARGET && worst < C8_RECURSION_TOL && s < C8_SECONDS,
        s,
        &format!(
            "six-level p_down {:.5} (target > {C8_TARGET}, single-shot f {:.4}); three-level p_down {:.6}, \
             recursion deviation {worst:.1e} (f {f:.5})",
            full.final_p_down(),
            full.cycles[0].fidelity,
            ideal.final_p_down()
        ),
    );
    report.info(&format!("six-level p_down series: {:?}", full.p_down_series().iter().map(|v| format!("{v:.5}")).collect::<Vec<_>>()));
    let down = run_protocol(
        &p,
        &ProtocolConfig { initial_nuclear: NuclearInit::Down, ..ProtocolConfig::new(Scheme::simultaneous_for(&p), 1) },
    )
    .unwrap();
    report.info(&format!("six-level, nucleus down, one cycle: p_down {:.5}", down.final_p_down()));
}

fn commutator_defect() -> f64 {
    let mut worst = 0.0f64;
    for s in [0.5, 1.0] {
        let ops = spin_operators(s).unwrap();
        let i = C64::new(0.0, 1.0);
        let comm = |a: &darkpol::spin::Operator, b: &darkpol::spin::Operator| -> DMatrix<C64> {
            a.matmul(b).entries() - b.matmul(a).entries()
        };
        let pairs = [(&ops.x, &ops.y, &ops.z), (&ops.y, &ops.z, &ops.x), (&ops.z, &ops.x, &ops.y)];
        for (a, b, c) in pairs {
            let d = comm(a, b) - c.entries() * i;
            worst = worst.max(d.iter().map(|z| z.norm()).fold(0.0, f64::max));
        }
    }
    worst
}

fn c9(report: &mut Report) {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 9);
    let mut notes = Vec::new();
    let mut ok = true;

    let comm = commutator_defect();
    ok &= comm < C9_COMMUTATOR;
    notes.push(format!("commutators {comm:.1e}"));

    let mut trace_l = 0.0f64;
    for _ in 0..200 {
        let kappa = rng.random_range(0.0..5.0);
        let d = dephasing_dissipator(&PhysicalParams { kappa, ..default_params() });
        let rho = random_density(&mut rng);
        trace_l = trace_l.max(d.apply(rho.entries()).trace().norm());
    }
    ok &= trace_l < C9_DISSIPATOR_TRACE;
    notes.push(format!("tr L(rho) {trace_l:.1e}"));

    let (mut tr, mut herm, mut pos, mut monotone) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..8 {
        let kappa = rng.random_range(0.0..3.0);
        let p = PhysicalParams { kappa, ..random_params(&mut rng) };
        let rho0 = random_density(&mut rng);
        let mut control = StepControl::with_dt(1e-3).samples(20);
        control.check_invariants = false;
        let sw = ModelSwitches::full();
        let run = MasterEquation::new(&p, &sw, Frame::Rotating).evolve(&rho0, 0.0, 0.1, &control).unwrap();
        tr = tr.max(run.trajectory.get("trace").unwrap().iter().map(|t| (t - 1.0).abs()).fold(0.0, f64::max));
        herm = herm.max(run.final_state.hermitian_defect());
        pos = pos.min(run.final_state.min_eigenvalue());

        let nh = evolve_nonhermitian_with(&p, &Amplitudes3::initial(), 0.5, &StepControl::with_dt(1e-3).samples(200))
            .unwrap();
        let norms = nh.trajectory.get("norm").unwrap();
        monotone = monotone.max(norms.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max));
    }
    ok &= tr < C9_TRACE && herm < C9_HERMITIAN && pos >= -C9_POSITIVITY && monotone <= C9_NORM_GROWTH;
    notes.push(format!("trace {tr:.1e}, hermiticity {herm:.1e}, min eigenvalue {pos:.1e}, norm growth {monotone:.1e}"));

    let mut reset = 0.0f64;
    for _ in 0..50 {
        let rho = random_density(&mut rng);
        let once = reset_electron(&rho);
        let twice = reset_electron(&once);
        reset = reset.max((once.entries() - twice.entries()).iter().map(|z| z.norm()).fold(0.0, f64::max));
        let (a, b) = (rho.nuclear_reduced(), once.nuclear_reduced());
        for r in 0..2 {
            for c in 0..2 {
                reset = reset.max((a[r][c] - b[r][c]).norm());
            }
        }
    }
    ok &= reset < C9_RESET;
    notes.push(format!("reset {reset:.1e}"));

    let p = PhysicalParams { a_perp: 0.0, ..default_params() };
    let cfg = ProtocolConfig { switches: ModelSwitches::three_level(), ..ProtocolConfig::new(Scheme::simultaneous_for(&p), 6) };
    let series = run_protocol(&p, &cfg).unwrap().p_down_series();
    let drop = series.windows(2).map(|w| w[0] - w[1]).fold(0.0, f64::max);
    ok &= drop <= C9_MONOTONE;
    notes.push(format!("p_down monotone (max drop {drop:.1e})"));

    let opts = Fig2Options { t_end: 0.05, samples: 50, ..Fig2Options::default() };
    let a = scenario_fig2(&default_params(), &opts).unwrap().table.to_csv();
    let b = scenario_fig2(&default_params(), &opts).unwrap().table.to_csv();
    let full_cfg = ProtocolConfig::new(Scheme::simultaneous_for(&p), 2);
    let same_protocol = run_protocol(&p, &full_cfg).unwrap().cycles == run_protocol(&p, &full_cfg).unwrap().cycles;
    ok &= a == b && same_protocol;
    notes.push(format!("deterministic reruns {}", a == b && same_protocol));

    report.criterion(9, "property suites", ok, start.elapsed().as_secs_f64(), &notes.join("; "));
}

fn informational(report: &Report) {
    let spec = SweepSpec {
        a_values: vec![130.0, 14.8, -7.5],
        kappas: vec![1.0, 1.0 / 5.8, 1.0 / 58.0],
        ..SweepSpec::default()
    };
    let r = scenario_fig4(&spec).unwrap();
    let fid = |a: f64, k: f64| r.find(a, k).map_or(f64::NAN, |p| p.fidelity);
    report.info(&format!(
        "fig4 kappa=1, Omega=|A|/10: A=130 {:.3}, A=14.8 {:.3} (reference 0.85), A=-7.5 {:.3} (reference 0.65)",
        fid(130.0, 1.0),
        fid(14.8, 1.0),
        fid(-7.5, 1.0)
    ));
    report.info(&format!(
        "fig4 kappa=1/5.8: A=130 {:.4}, A=14.8 {:.4}; second shell above first: {}",
        fid(130.0, 1.0 / 5.8),
        fid(14.8, 1.0 / 5.8),
        r.second_shell_exceeds_first(1.0 / 5.8).unwrap_or(false)
    ));
    report.info(&format!(
        "fig4 kappa=1/58: A=130 {:.4}, A=14.8 {:.4}, A=-7.5 {:.4} (reference: more than 0.967 for A=-7.5)",
        fid(130.0, 1.0 / 58.0),
        fid(14.8, 1.0 / 58.0),
        fid(-7.5, 1.0 / 58.0)
    ));
    let weak = PhysicalParams { a_par: -7.5, a_perp: -7.5, omega1: 0.75, omega2: 0.75, ..default_params() };
    let nh = ClosedForm::new(&weak).unwrap().at(PI / weak.omega()).w.norm_sqr();
    let cfg = ProtocolConfig {
        switches: ModelSwitches::three_level(),
        ..ProtocolConfig::new(Scheme::simultaneous_for(&weak), 10)
    };
    let rep = run_protocol(&weak, &cfg).unwrap();
    report.info(&format!(
        "A=-7.5, kappa=1/58, Omega=0.75: single-shot |w|^2 {nh:.4}, three-level p_down after 10 cycles {:.6} \
         (reference: more than 0.967)",
        rep.final_p_down()
    ));
}

fn main() {
    let start = Instant::now();
    let mut report = Report { failures: 0 };
    c1(&mut report);
    c2(&mut report);
    c3(&mut report);
    c4(&mut report);
    c5(&mut report);
    c6(&mut report);
    c7(&mut report);
    c8(&mut report);
    c9(&mut report);
    informational(&report);
    println!(
        "acceptance: {} of 9 criteria passed ({:.1} s)",
        9 - report.failures,
        start.elapsed().as_secs_f64()
    );
    if report.failures > 0 {
        std::process::exit(1);
    }
}
