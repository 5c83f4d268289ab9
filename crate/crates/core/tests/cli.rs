use std::path::Path;
use std::process::{Command, Output};

use darkpol::cli::{parse_config, ScenarioName};
use darkpol::output::Table;
use darkpol::protocol::CycleRecord;

fn darkpol(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_darkpol")).args(args).output().expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn fig2_csv_contract_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let o = darkpol(&["run", "--scenario", "fig2", "--out", path_str(out)]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let summary = String::from_utf8(o.stdout).unwrap();
        assert!(summary.starts_with("fig2:") && summary.contains("max gap") && summary.lines().count() == 1);
    }
    let text = std::fs::read_to_string(&a).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t_us,p_0up_nh,p_mup_nh,p_mdown_nh,p_0up_me,p_mup_me,p_mdown_me");
    assert!(lines.count() >= 200);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn protocol_json_records() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.json");
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# ten cycles in the three-level picture\nscenario = protocol\nn_cycles = 10\n").unwrap();
    let o = darkpol(&[
        "run",
        "--config",
        path_str(&cfg),
        "--set",
        "transverse_hyperfine=false",
        "--set",
        "plus_manifold=false",
        "--set",
        "off_resonant=false",
        "--out",
        path_str(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let records: Vec<CycleRecord> = serde_json::from_str(&text).unwrap();
    assert_eq!(records.len(), 10);
    assert_eq!(records[0].cycle, 1);
    assert!(records[9].p_down > 0.999);
    let back = serde_json::to_string_pretty(&records).unwrap() + "\n";
    assert_eq!(serde_json::from_str::<Vec<CycleRecord>>(&back).unwrap(), records);
    let table = Table::from_json(&text).unwrap();
    assert_eq!(table.columns, ["cycle", "p_down", "fidelity"]);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let o = darkpol(&["run", "--scenario", "fig2", "--set", "scnario=fig2", "--out", path_str(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("did you mean 'scenario'"));

    let o = darkpol(&["run", "--out", path_str(&out)]);
    assert_eq!(o.status.code(), Some(2));

    let o = darkpol(&["run", "--scenario", "optimize", "--set", "Omega1_range=100", "--out", path_str(&out)]);
    assert_eq!(o.status.code(), Some(3));

    let missing = dir.path().join("no/such/dir/x.csv");
    let o = darkpol(&["run", "--scenario", "optimize", "--out", path_str(&missing)]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn help_documents_keys_and_units() {
    let o = darkpol(&["run", "--help"]);
    let text = String::from_utf8(o.stdout).unwrap();
    for needle in ["fig2", "fig3", "fig4", "protocol", "optimize", "custom", "kappa", "[1/us]", "Omega1", "[rad/us]", "Bz", "[G]"] {
        assert!(text.contains(needle), "missing {needle}");
    }
}

#[test]
fn config_file_parsing() {
    let cfg = parse_config("scenario = fig4\nA_values = 130, 14.8\nkappas = 1\nmetric = cycle_fidelity\n").unwrap();
    assert_eq!(cfg.scenario, Some(ScenarioName::Fig4));
    assert_eq!(cfg.a_values.as_deref(), Some(&[130.0, 14.8][..]));
}

#[test]
fn fig4_keeps_flagged_points() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f4.csv");
    let o = darkpol(&[
        "run",
        "--scenario",
        "fig4",
        "--set",
        "A_values=130",
        "--set",
        "kappas=1",
        "--set",
        "rabi_policy=fixed",
        "--set",
        "Omega1=20",
        "--set",
        "Omega2=20",
        "--set",
        "metric=cycle_fidelity",
        "--out",
        path_str(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let row = text.lines().nth(1).unwrap();
    assert!(row.contains("mw_selective;rf_selective") && row.ends_with("marked"), "{row}");
}
