//! Run configuration: `key = value` files, `--set` overrides and scenario dispatch.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use crate::dynamics::{DensityMatrix, MasterEquation, NuclearInit, StepControl, MASTER_SERIES};
use crate::error::{Error, Result};
use crate::experiments::{
    optimize_pulse, scenario_fig2, scenario_fig3, scenario_fig4, Axis, Bounds, Fig2Options, Fig3Options, RabiPolicy,
    SweepMetric, SweepSpec,
};
use crate::model::{Frame, ModelSwitches, PhysicalParams};
use crate::output::{Cell, Format, Table};
use crate::protocol::{run_protocol, ProtocolConfig, Scheme, SEQUENTIAL_RABI};
use crate::spin::{BasisLabel, ElectronState, NuclearState};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScenarioName {
    Fig2,
    Fig3,
    Fig4,
    Protocol,
    Optimize,
    Custom,
}

pub const SCENARIOS: [(&str, &str); 6] = [
    ("fig2", "non-Hermitian vs master-equation populations from |0,up>"),
    ("fig3", "nuclear down population, simultaneous vs sequential pulses"),
    ("fig4", "maximum down fidelity over an A_par x kappa grid"),
    ("protocol", "repeated pulse + electron reset cycles"),
    ("optimize", "grid search of pulse parameters on the closed-form transfer"),
    ("custom", "single master-equation run, all level populations"),
];

impl FromStr for ScenarioName {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "fig2" => ScenarioName::Fig2,
            "fig3" => ScenarioName::Fig3,
            "fig4" => ScenarioName::Fig4,
            "protocol" => ScenarioName::Protocol,
            "optimize" => ScenarioName::Optimize,
            "custom" => ScenarioName::Custom,
            _ => {
                let names: Vec<&str> = SCENARIOS.iter().map(|s| s.0).collect();
                return Err(format!("unknown scenario '{s}' (expected one of {})", names.join(", ")));
            }
        })
    }
}

impl fmt::Display for ScenarioName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = match self {
            ScenarioName::Fig2 => 0,
            ScenarioName::Fig3 => 1,
            ScenarioName::Fig4 => 2,
            ScenarioName::Protocol => 3,
            ScenarioName::Optimize => 4,
            ScenarioName::Custom => 5,
        };
        f.write_str(SCENARIOS[i].0)
    }
}

/// (key, unit, description) of every accepted configuration key.
pub const KEYS: &[(&str, &str, &str)] = &[
    ("scenario", "-", "scenario to run"),
    ("D", "rad/us", "zero-field splitting"),
    ("gamma_e", "rad/us/G", "electron gyromagnetic ratio"),
    ("gamma_c", "rad/us/G", "13C gyromagnetic ratio"),
    ("Bz", "G", "static field along the NV axis"),
    ("A_par", "rad/us", "longitudinal hyperfine coupling"),
    ("A_perp", "rad/us", "transverse hyperfine coupling"),
    ("Omega1", "rad/us", "microwave Rabi frequency"),
    ("Omega2", "rad/us", "RF Rabi frequency"),
    ("delta", "rad/us", "microwave detuning"),
    ("Delta", "rad/us", "two-photon detuning"),
    ("kappa", "1/us", "dephasing rate of the m_s=-1 manifold"),
    ("dt", "us", "requested integration step (refined automatically)"),
    ("t_end", "us", "end time of time-series scenarios"),
    ("samples", "-", "stored time samples"),
    ("transverse_hyperfine", "bool", "keep the A_perp flip-flop terms"),
    ("plus_manifold", "bool", "keep couplings into m_s=+1"),
    ("off_resonant", "bool", "keep off-resonant drive components"),
    ("dressed_resonance", "bool", "tune carriers to the exact level spacings"),
    ("scheme", "-", "protocol pulse scheme: simultaneous | sequential"),
    ("n_cycles", "-", "protocol cycles"),
    ("t_pulse", "us", "simultaneous pulse length (default pi/Omega)"),
    ("t1", "us", "sequential microwave pulse (default pi/(2 Omega1))"),
    ("t2", "us", "sequential RF pulse (default pi/(2 Omega2))"),
    ("initial_nuclear", "-", "initial nuclear state: mixed | up | down"),
    ("seq_Omega1", "rad/us", "fig3 sequential microwave Rabi frequency"),
    ("seq_Omega2", "rad/us", "fig3 sequential RF Rabi frequency"),
    ("A_values", "rad/us", "fig4 comma-separated A_par values"),
    ("kappas", "1/us", "fig4 comma-separated kappa values"),
    ("rabi_policy", "-", "fig4 drive choice: fraction | fixed (uses Omega1, Omega2)"),
    ("rabi_fraction", "-", "fig4 Omega1 = Omega2 = fraction * |A_par|"),
    ("metric", "-", "fig4 metric: max_down | cycle_fidelity"),
    ("window", "pi/Omega", "fig4 time window per point"),
    ("tie_perp", "bool", "fig4 sets A_perp = A_par"),
    ("Omega1_range", "rad/us", "optimize grid min:max:steps"),
    ("Omega2_range", "rad/us", "optimize grid min:max:steps"),
    ("delta_range", "rad/us", "optimize grid min:max:steps"),
    ("Delta_range", "rad/us", "optimize grid min:max:steps"),
    ("t_range", "pi/Omega", "optimize pulse-length grid min:max:steps"),
    ("refine", "bool", "optimize: master-equation check of the best point"),
];

/// Text block listing scenarios and keys for `--help`.
pub fn help_text() -> String {
    let mut s = String::from("Scenarios:\n");
    for (name, what) in SCENARIOS {
        s.push_str(&format!("  {name:<10} {what}\n"));
    }
    s.push_str("\nConfig keys (key = value in --config files, or --set key=value):\n");
    for (key, unit, what) in KEYS {
        s.push_str(&format!("  {key:<22} [{unit}] {what}\n"));
    }
    s.push_str("\nEnvironment: DARKPOL_THREADS caps sweep parallelism.\n");
    s.push_str("Exit codes: 0 ok, 2 config error, 3 numeric failure, 4 I/O failure.\n");
    s
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub scenario: Option<ScenarioName>,
    pub params: PhysicalParams,
    pub switches: ModelSwitches,
    pub dt: f64,
    pub t_end: Option<f64>,
    pub samples: Option<usize>,
    pub scheme: String,
    pub n_cycles: usize,
    pub t_pulse: Option<f64>,
    pub t1: Option<f64>,
    pub t2: Option<f64>,
    pub initial_nuclear: NuclearInit,
    pub seq_omega1: f64,
    pub seq_omega2: f64,
    pub a_values: Option<Vec<f64>>,
    pub kappas: Option<Vec<f64>>,
    pub rabi_policy: String,
    pub rabi_fraction: f64,
    pub metric: SweepMetric,
    pub window: f64,
    pub tie_perp: bool,
    pub ranges: [Option<Axis>; 5],
    pub refine: bool,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let sweep = SweepSpec::default();
        RunConfig {
            scenario: None,
            params: PhysicalParams::default(),
            switches: ModelSwitches::full(),
            dt: 1e-3,
            t_end: None,
            samples: None,
            scheme: "simultaneous".into(),
            n_cycles: 10,
            t_pulse: None,
            t1: None,
            t2: None,
            initial_nuclear: NuclearInit::Mixed,
            seq_omega1: SEQUENTIAL_RABI,
            seq_omega2: SEQUENTIAL_RABI,
            a_values: None,
            kappas: None,
            rabi_policy: "fraction".into(),
            rabi_fraction: 0.1,
            metric: sweep.metric,
            window: sweep.window,
            tie_perp: sweep.tie_perp,
            ranges: [None; 5],
            refine: false,
            out: None,
            format: None,
        }
    }
}

fn parse_num(line: usize, key: &str, v: &str) -> Result<f64> {
    let x: f64 = v.parse().map_err(|_| Error::config(line, format!("'{key}' expects a number, got '{v}'")))?;
    if !x.is_finite() {
        return Err(Error::config(line, format!("'{key}' must be finite")));
    }
    Ok(x)
}

fn parse_count(line: usize, key: &str, v: &str) -> Result<usize> {
    v.parse().map_err(|_| Error::config(line, format!("'{key}' expects a non-negative integer, got '{v}'")))
}

fn parse_bool(line: usize, key: &str, v: &str) -> Result<bool> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(Error::config(line, format!("'{key}' expects true or false, got '{v}'"))),
    }
}

fn parse_list(line: usize, key: &str, v: &str) -> Result<Vec<f64>> {
    let items: Vec<f64> = v.split(',').map(|s| parse_num(line, key, s.trim())).collect::<Result<_>>()?;
    if items.is_empty() {
        return Err(Error::config(line, format!("'{key}' needs at least one value")));
    }
    Ok(items)
}

fn parse_axis(line: usize, key: &str, v: &str) -> Result<Axis> {
    let parts: Vec<&str> = v.split(':').map(str::trim).collect();
    match parts.as_slice() {
        [x] => Ok(Axis::fixed(parse_num(line, key, x)?)),
        [lo, hi, n] => {
            let axis = Axis::range(parse_num(line, key, lo)?, parse_num(line, key, hi)?, parse_count(line, key, n)?);
            if axis.steps == 0 || axis.min > axis.max {
                return Err(Error::config(line, format!("'{key}' needs min <= max and steps >= 1")));
            }
            Ok(axis)
        }
        _ => Err(Error::config(line, format!("'{key}' expects value or min:max:steps, got '{v}'"))),
    }
}

fn unknown_key(line: usize, key: &str) -> Error {
    let best = KEYS
        .iter()
        .map(|(k, _, _)| (strsim::levenshtein(key, k), *k))
        .min()
        .filter(|(d, _)| *d <= 3)
        .map(|(_, k)| format!(" (did you mean '{k}'?)"))
        .unwrap_or_default();
    let all: Vec<&str> = KEYS.iter().map(|k| k.0).collect();
    Error::config(line, format!("unknown key '{key}'{best}; valid keys: {}", all.join(", ")))
}

impl RunConfig {
    /// Applies one `key = value` setting; `line` is used in diagnostics (0 for flags).
    pub fn set(&mut self, key: &str, value: &str, line: usize) -> Result<()> {
        let v = value.trim();
        let p = &mut self.params;
        let num = || parse_num(line, key, v);
        match key {
            "scenario" => self.scenario = Some(v.parse().map_err(|e| Error::config(line, e))?),
            "D" => p.zfs = num()?,
            "gamma_e" => p.gamma_e = num()?,
            "gamma_c" => p.gamma_c = num()?,
            "Bz" => p.bz = num()?,
            "A_par" => p.a_par = num()?,
            "A_perp" => p.a_perp = num()?,
            "Omega1" => p.omega1 = num()?,
            "Omega2" => p.omega2 = num()?,
            "delta" => p.delta = num()?,
            "Delta" => p.delta_two_photon = num()?,
            "kappa" => p.kappa = num()?,
            "dt" => self.dt = num()?,
            "t_end" => self.t_end = Some(num()?),
            "samples" => self.samples = Some(parse_count(line, key, v)?),
            "transverse_hyperfine" => self.switches.transverse_hyperfine = parse_bool(line, key, v)?,
            "plus_manifold" => self.switches.plus_manifold = parse_bool(line, key, v)?,
            "off_resonant" => self.switches.off_resonant = parse_bool(line, key, v)?,
            "dressed_resonance" => self.switches.dressed_resonance = parse_bool(line, key, v)?,
            "scheme" => match v {
                "simultaneous" | "sequential" => self.scheme = v.to_string(),
                _ => return Err(Error::config(line, format!("'scheme' expects simultaneous or sequential, got '{v}'"))),
            },
            "n_cycles" => self.n_cycles = parse_count(line, key, v)?,
            "t_pulse" => self.t_pulse = Some(num()?),
            "t1" => self.t1 = Some(num()?),
            "t2" => self.t2 = Some(num()?),
            "initial_nuclear" => {
                self.initial_nuclear = match v {
                    "mixed" => NuclearInit::Mixed,
                    "up" => NuclearInit::Up,
                    "down" => NuclearInit::Down,
                    _ => return Err(Error::config(line, format!("'initial_nuclear' expects mixed, up or down, got '{v}'"))),
                }
            }
            "seq_Omega1" => self.seq_omega1 = num()?,
            "seq_Omega2" => self.seq_omega2 = num()?,
            "A_values" => self.a_values = Some(parse_list(line, key, v)?),
            "kappas" => self.kappas = Some(parse_list(line, key, v)?),
            "rabi_policy" => match v {
                "fraction" | "fixed" => self.rabi_policy = v.to_string(),
                _ => return Err(Error::config(line, format!("'rabi_policy' expects fraction or fixed, got '{v}'"))),
            },
            "rabi_fraction" => self.rabi_fraction = num()?,
            "metric" => {
                self.metric = match v {
                    "max_down" => SweepMetric::MaxDown,
                    "cycle_fidelity" => SweepMetric::CycleFidelity,
                    _ => return Err(Error::config(line, format!("'metric' expects max_down or cycle_fidelity, got '{v}'"))),
                }
            }
            "window" => self.window = num()?,
            "tie_perp" => self.tie_perp = parse_bool(line, key, v)?,
            "Omega1_range" => self.ranges[0] = Some(parse_axis(line, key, v)?),
            "Omega2_range" => self.ranges[1] = Some(parse_axis(line, key, v)?),
            "delta_range" => self.ranges[2] = Some(parse_axis(line, key, v)?),
            "Delta_range" => self.ranges[3] = Some(parse_axis(line, key, v)?),
            "t_range" => self.ranges[4] = Some(parse_axis(line, key, v)?),
            "refine" => self.refine = parse_bool(line, key, v)?,
            _ => return Err(unknown_key(line, key)),
        }
        Ok(())
    }

    /// Applies `key=value` as given on the command line.
    pub fn set_pair(&mut self, pair: &str) -> Result<()> {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| Error::config(0, format!("--set expects key=value, got '{pair}'")))?;
        self.set(k.trim(), v, 0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.scenario.is_none() {
            return Err(Error::config(0, "no scenario given (use --scenario or 'scenario = ...')"));
        }
        self.params.validate()?;
        if !(self.dt > 0.0) {
            return Err(Error::InvalidInput("dt must be positive".into()));
        }
        Ok(())
    }

    fn protocol_config(&self) -> ProtocolConfig {
        let p = &self.params;
        let scheme = if self.scheme == "sequential" {
            let d = Scheme::sequential_for(p);
            let Scheme::Sequential { t1, t2 } = d else { unreachable!() };
            Scheme::Sequential { t1: self.t1.unwrap_or(t1), t2: self.t2.unwrap_or(t2) }
        } else {
            Scheme::Simultaneous { t_pulse: self.t_pulse.unwrap_or(std::f64::consts::PI / p.omega()) }
        };
        ProtocolConfig {
            scheme,
            n_cycles: self.n_cycles,
            initial_nuclear: self.initial_nuclear,
            switches: self.switches,
            dt: self.dt,
            keep_snapshots: false,
        }
    }

    fn sweep_spec(&self) -> SweepSpec {
        let d = SweepSpec::default();
        SweepSpec {
            a_values: self.a_values.clone().unwrap_or(d.a_values),
            kappas: self.kappas.clone().unwrap_or(d.kappas),
            rabi: if self.rabi_policy == "fixed" {
                RabiPolicy::Fixed { omega1: self.params.omega1, omega2: self.params.omega2 }
            } else {
                RabiPolicy::Fraction { fraction: self.rabi_fraction }
            },
            metric: self.metric,
            window: self.window,
            tie_perp: self.tie_perp,
            base: self.params,
            switches: self.switches,
            dt: self.dt,
            samples: self.samples.unwrap_or(d.samples),
        }
    }

    fn bounds(&self) -> Bounds {
        let d = Bounds::around(&self.params);
        Bounds {
            omega1: self.ranges[0].unwrap_or(d.omega1),
            omega2: self.ranges[1].unwrap_or(d.omega2),
            delta: self.ranges[2].unwrap_or(d.delta),
            delta_two_photon: self.ranges[3].unwrap_or(d.delta_two_photon),
            t_scale: self.ranges[4].unwrap_or(d.t_scale),
        }
    }
}

/// Parses a configuration file body.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    apply_config(&mut cfg, text)?;
    Ok(cfg)
}

pub fn apply_config(cfg: &mut RunConfig, text: &str) -> Result<()> {
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (k, v) = content
            .split_once('=')
            .ok_or_else(|| Error::config(line, format!("expected 'key = value', got '{content}'")))?;
        cfg.set(k.trim(), v, line)?;
    }
    Ok(())
}

/// Scenario output plus a one-line description of its key metric.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub table: Table,
    pub metric: String,
}

fn g(x: f64) -> String {
    let s = format!("{x:.6}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

pub fn execute(cfg: &RunConfig) -> Result<Outcome> {
    cfg.validate()?;
    let p = &cfg.params;
    match cfg.scenario.expect("validated") {
        ScenarioName::Fig2 => {
            let d = Fig2Options::default();
            let opts = Fig2Options {
                t_end: cfg.t_end.unwrap_or(d.t_end),
                samples: cfg.samples.unwrap_or(d.samples),
                dt: cfg.dt,
                switches: cfg.switches,
            };
            let r = scenario_fig2(p, &opts)?;
            let metric = format!(
                "nh peak P(-1,down) = {} at {} us, master peak = {}, max gap = {}",
                g(r.nh_peak.1),
                g(r.nh_peak.0),
                g(r.me_peak.1),
                g(r.max_gap)
            );
            Ok(Outcome { table: r.table, metric })
        }
        ScenarioName::Fig3 => {
            let p_seq = PhysicalParams { omega1: cfg.seq_omega1, omega2: cfg.seq_omega2, ..*p };
            let d = Fig3Options::default();
            let opts = Fig3Options {
                initial_nuclear: cfg.initial_nuclear,
                samples: cfg.samples.unwrap_or(d.samples),
                dt: cfg.dt,
                switches: cfg.switches,
            };
            let r = scenario_fig3(p, &p_seq, &opts)?;
            let metric = format!(
                "simultaneous max p_down = {} at {} us, sequential there = {}, sequential max = {}",
                g(r.simultaneous_max.1),
                g(r.simultaneous_max.0),
                g(r.sequential_at_sim_max),
                g(r.sequential_max.1)
            );
            Ok(Outcome { table: r.table, metric })
        }
        ScenarioName::Fig4 => {
            let r = scenario_fig4(&cfg.sweep_spec())?;
            let best = r.points.iter().max_by(|a, b| a.fidelity.total_cmp(&b.fidelity)).expect("non-empty grid");
            let flagged = r.points.iter().filter(|p| !p.flags.is_empty()).count();
            let metric = format!(
                "{} points, best fidelity = {} (A_par = {}, kappa = {}), {} flagged",
                r.points.len(),
                g(best.fidelity),
                g(best.a_par),
                g(best.kappa),
                flagged
            );
            Ok(Outcome { table: r.table, metric })
        }
        ScenarioName::Protocol => {
            let res = run_protocol(p, &cfg.protocol_config())?;
            let mut table = Table::new(&["cycle", "p_down", "fidelity"]);
            for c in &res.cycles {
                table.push(vec![Cell::from(c.cycle), Cell::Num(c.p_down), Cell::Num(c.fidelity)]);
            }
            let metric = format!(
                "{} cycles, p_down {} -> {}, single-shot fidelity = {}",
                res.cycles.len(),
                g(res.initial_p_down),
                g(res.final_p_down()),
                g(res.cycles[0].fidelity)
            );
            Ok(Outcome { table, metric })
        }
        ScenarioName::Optimize => {
            let refine = cfg.refine.then_some(&cfg.switches);
            let best = optimize_pulse(p, &cfg.bounds(), refine)?;
            let q = &best.params;
            let mut table = Table::new(&["Omega1", "Omega2", "delta", "Delta", "t_us", "objective", "refined"]);
            table.push(vec![
                Cell::Num(q.omega1),
                Cell::Num(q.omega2),
                Cell::Num(q.delta),
                Cell::Num(q.delta_two_photon),
                Cell::Num(best.t),
                Cell::Num(best.objective),
                Cell::Num(best.refined.unwrap_or(f64::NAN)),
            ]);
            let metric = format!(
                "best |w|^2 = {} at Omega1 = {}, Omega2 = {}, delta = {}, t = {} us ({} evaluations)",
                g(best.objective),
                g(q.omega1),
                g(q.omega2),
                g(q.delta),
                g(best.t),
                best.evaluated
            );
            Ok(Outcome { table, metric })
        }
        ScenarioName::Custom => {
            let rho0 = DensityMatrix::pure(BasisLabel::new(ElectronState::Zero, NuclearState::Up));
            let t_end = cfg.t_end.unwrap_or(std::f64::consts::PI / p.omega());
            let mut control = StepControl::with_dt(cfg.dt);
            control.samples = Some(cfg.samples.unwrap_or(500));
            let run = MasterEquation::new(p, &cfg.switches, Frame::Rotating).evolve(&rho0, 0.0, t_end, &control)?;
            let traj = &run.trajectory;
            let mut cols = vec!["t_us".to_string()];
            cols.extend(MASTER_SERIES.iter().map(|s| s.to_string()));
            let mut table = Table::new(&cols);
            for (i, &t) in traj.times.iter().enumerate() {
                let mut row = vec![Cell::Num(t)];
                row.extend(MASTER_SERIES.iter().map(|s| Cell::Num(traj.get(s).expect("series")[i])));
                table.push(row);
            }
            let (t, v) = traj.argmax("p_down").expect("non-empty");
            Ok(Outcome { table, metric: format!("max p_down = {} at {} us", g(v), g(t)) })
        }
    }
}

/// Runs the configured scenario, writes the output file and returns the summary line.
pub fn run(cfg: &RunConfig) -> Result<String> {
    let start = Instant::now();
    let out = cfg.out.as_ref().ok_or_else(|| Error::config(0, "no output path (use --out)"))?;
    let format = cfg.format.unwrap_or_else(|| {
        if out.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            Format::Json
        } else {
            Format::Csv
        }
    });
    cfg.validate()?;
    let outcome = execute(cfg)?;
    outcome.table.write(out, format)?;
    Ok(format!(
        "{}: {} [{:.2} s, {} rows -> {}]",
        cfg.scenario.expect("validated"),
        outcome.metric,
        start.elapsed().as_secs_f64(),
        outcome.table.rows.len(),
        out.display()
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_scenario_and_overrides() {
        let cfg = parse_config("scenario = fig2\n").unwrap();
        assert_eq!(cfg.scenario, Some(ScenarioName::Fig2));
        assert_eq!(cfg.params, PhysicalParams::default());

        let cfg = parse_config("# noise\nkappa = 0.1724   # strong\n\nscenario=protocol\nn_cycles = 3").unwrap();
        assert_eq!(cfg.params.kappa, 0.1724);
        assert_eq!(cfg.n_cycles, 3);
    }

    #[test]
    fn misspelled_key_suggests_the_right_one() {
        let err = parse_config("\nscnario = fig2").unwrap_err();
        let msg = err.to_string();
        assert!(matches!(err, Error::Config { line: 2, .. }));
        assert!(msg.contains("'scnario'") && msg.contains("did you mean 'scenario'"), "{msg}");
        assert!(msg.contains("A_perp") && msg.contains("t_range"));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn bad_values_are_config_errors() {
        for text in ["kappa = fast", "scenario = fig9", "A_values = 1,,2", "refine = maybe", "just text", "t_range = 1:2"] {
            let err = parse_config(text).unwrap_err();
            assert!(matches!(err, Error::Config { line: 1, .. }), "{text}: {err}");
        }
    }

    #[test]
    fn missing_scenario_rejected() {
        let cfg = parse_config("kappa = 1").unwrap();
        assert!(matches!(cfg.validate(), Err(Error::Config { .. })));
    }

    #[test]
    fn set_pair_and_lists() {
        let mut cfg = RunConfig::default();
        cfg.set_pair("A_values=130, 14.8,-7.5").unwrap();
        cfg.set_pair("Omega1_range=1:13:7").unwrap();
        assert_eq!(cfg.a_values, Some(vec![130.0, 14.8, -7.5]));
        assert_eq!(cfg.ranges[0], Some(Axis::range(1.0, 13.0, 7)));
        assert!(cfg.set_pair("kappa").is_err());
    }

    #[test]
    fn help_lists_everything() {
        let h = help_text();
        for (name, _) in SCENARIOS {
            assert!(h.contains(name));
        }
        for (key, unit, _) in KEYS {
            assert!(h.contains(key) && h.contains(unit));
        }
    }
}
