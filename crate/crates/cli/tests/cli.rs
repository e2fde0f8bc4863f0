use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::Arc;

use ede::network::{expand, ExpansionPolicy};
use ede::oracle::{brute_force_derivations, OracleBudget};
use ede::rule::{parse_rule, parse_rules};
use ede::{parse_graph, LabeledGraph};

const DATA: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/data/formose");

const METHANE: &str = r#"graph [
  node [ id 0 label "C" ]
  node [ id 1 label "H" ] node [ id 2 label "H" ] node [ id 3 label "H" ] node [ id 4 label "H" ]
  edge [ source 0 target 1 label "-" ] edge [ source 0 target 2 label "-" ]
  edge [ source 0 target 3 label "-" ] edge [ source 0 target 4 label "-" ]
]"#;

const METHANE_RENUMBERED: &str = r#"graph [
  node [ id 7 label "H" ] node [ id 3 label "H" ] node [ id 5 label "C" ]
  node [ id 1 label "H" ] node [ id 2 label "H" ]
  edge [ source 5 target 7 label "-" ] edge [ source 3 target 5 label "-" ]
  edge [ source 5 target 1 label "-" ] edge [ source 2 target 5 label "-" ]
]"#;

const CARBON: &str = r#"graph [ node [ id 0 label "C" ] ]"#;

const PAIR: &str = r#"graph [ node [ id 0 label "C" ] node [ id 1 label "C" ] edge [ source 0 target 1 label "-" ] ]"#;

const BOND: &str = r#"rule [ ruleID "bond"
  context [ node [ id 1 label "C" ] node [ id 2 label "C" ] ]
  right [ edge [ source 1 target 2 label "-" ] ]
]"#;

fn workdir(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn ede(args: &[&str]) -> Output {
    ede_with_env(args, &[])
}

fn ede_with_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ede"));
    cmd.args(args)
        .env_remove("EDE_JOBS")
        .env_remove("EDE_CONFIG");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Molecule count of the formose files expanded by the library with at
/// most `carbons` carbons per molecule.
fn formose_molecules(carbons: usize) -> usize {
    let read = |f: &str| std::fs::read_to_string(format!("{DATA}/{f}")).unwrap();
    let mut rules = parse_rules(&read("keto_enol.gml")).unwrap();
    rules.extend(parse_rules(&read("aldol.gml")).unwrap());
    let graphs = ["formaldehyde.gml", "glycolaldehyde.gml"].map(|f| parse_graph(&read(f)).unwrap());
    let mut policy = ExpansionPolicy::mode(ede::ede::Mode::EdeSs);
    policy.max_label_counts = vec![("C".into(), carbons)];
    expand(graphs, &rules, &policy).unwrap().molecule_count()
}

fn formose_args(extra: &[&str]) -> Vec<String> {
    let mut a: Vec<String> = vec!["expand".into(), "--rules".into()];
    a.push(format!("{DATA}/keto_enol.gml"));
    a.push(format!("{DATA}/aldol.gml"));
    a.push("--graphs".into());
    a.push(format!("{DATA}/formaldehyde.gml"));
    a.push(format!("{DATA}/glycolaldehyde.gml"));
    a.extend(extra.iter().map(|x| x.to_string()));
    a
}

#[test]
fn iso_exit_codes() {
    let dir = workdir("iso");
    let a = write(&dir, "a.gml", METHANE);
    let b = write(&dir, "b.gml", METHANE_RENUMBERED);
    let c = write(&dir, "c.gml", CARBON);
    assert_eq!(code(&ede(&["iso", s(&a), s(&b)])), 0);
    assert_eq!(code(&ede(&["iso", s(&a), s(&c)])), 1);
}

#[test]
fn canon_prints_code_and_group() {
    let dir = workdir("canon");
    let a = write(&dir, "a.gml", METHANE);
    let b = write(&dir, "b.gml", METHANE_RENUMBERED);
    let (oa, ob) = (ede(&["canon", s(&a)]), ede(&["canon", s(&b)]));
    assert_eq!(code(&oa), 0);
    let (ta, tb) = (stdout(&oa), stdout(&ob));
    assert_eq!(ta.lines().next(), tb.lines().next());
    assert!(ta.lines().any(|l| l == "aut 24"), "{ta}");
    assert!(ta.lines().any(|l| l.starts_with("generator (")), "{ta}");
}

#[test]
fn derive_streams_json_lines_in_every_mode() {
    let dir = workdir("derive");
    let rule = write(&dir, "bond.gml", BOND);
    let c = write(&dir, "c.gml", CARBON);
    let cc = write(&dir, "cc.gml", PAIR);
    let lines = |mode: &str, unique: bool| -> Vec<serde_json::Value> {
        let mut args = vec![
            "derive",
            "--rule",
            s(&rule),
            "--graphs",
            s(&c),
            s(&cc),
            "--mode",
            mode,
        ];
        if unique {
            args.push("--unique");
        }
        let o = ede(&args);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        stdout(&o)
            .lines()
            .map(|l| serde_json::from_str(l).unwrap())
            .collect()
    };
    let graphs: Vec<Arc<LabeledGraph>> = [CARBON, PAIR]
        .iter()
        .map(|t| Arc::new(parse_graph(t).unwrap()))
        .collect();
    let expected = brute_force_derivations(
        &graphs,
        &parse_rule(BOND).unwrap(),
        &OracleBudget::default(),
    )
    .unwrap();
    let oracle = lines("oracle", false);
    assert_eq!(oracle.len(), expected.derivations.len());
    assert_eq!(lines("ede", false).len(), expected.derivations.len());
    let classes: BTreeSet<String> = oracle.iter().map(|l| l["code"].to_string()).collect();
    assert_eq!(classes.len(), expected.classes.len());
    for mode in ["ede", "ede-s", "ede-ss", "oracle"] {
        let u = lines(mode, true);
        let got: BTreeSet<String> = u.iter().map(|l| l["code"].to_string()).collect();
        assert_eq!(u.len(), got.len(), "{mode}");
        assert_eq!(got, classes, "{mode}");
        for l in &u {
            assert_eq!(l["rule"], "bond");
            assert_eq!(l["products"].as_array().unwrap().len(), 1);
            assert_eq!(l["match"].as_array().unwrap().len(), 2);
        }
    }
}

#[test]
fn bench_strings_reaches_the_full_network() {
    let dir = workdir("bench");
    let out = dir.join("stats.csv");
    let o = ede(&[
        "bench",
        "--grammar",
        "strings:2",
        "--modes",
        "ede-ss,ede",
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&o), 0);
    let csv = std::fs::read_to_string(&out).unwrap();
    let rows: Vec<Vec<&str>> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').collect())
        .collect();
    for mode in ["ede-ss", "ede"] {
        let last = rows.iter().rfind(|r| r[1] == mode).unwrap();
        assert_eq!(
            (last[3], last[4], last[7]),
            ("254", "252", "complete"),
            "{mode}"
        );
    }
}

#[test]
fn expand_writes_json_and_dot() {
    let dir = workdir("expand");
    let (json, dot) = (dir.join("net.json"), dir.join("net.dot"));
    let args = formose_args(&["--max-label", "C=3", "--out", s(&json), "--dot", s(&dot)]);
    let o = ede(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let net: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(
        net["molecules"].as_array().unwrap().len(),
        formose_molecules(3)
    );
    assert!(!net["reactions"].as_array().unwrap().is_empty());
    assert!(std::fs::read_to_string(&dot)
        .unwrap()
        .starts_with("digraph"));
}

#[test]
fn expand_limits_set_the_exit_code() {
    let args = formose_args(&["--max-label", "C=5", "--max-molecules", "4"]);
    let o = ede(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(code(&o), 4);
    let args = formose_args(&["--timeout-s", "0.000001"]);
    let o = ede(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(code(&o), 3);
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = workdir("usage");
    let c = write(&dir, "c.gml", CARBON);
    let broken = write(&dir, "broken.gml", "graph [ node [ id 0 ");
    assert_eq!(code(&ede(&["frobnicate"])), 2);
    assert_eq!(code(&ede(&["iso", s(&c)])), 2);
    assert_eq!(code(&ede(&["canon", s(&broken)])), 2);
    assert_eq!(code(&ede(&["canon", s(&dir.join("missing.gml"))])), 2);
    assert_eq!(code(&ede(&["bench", "--grammar", "strings:9"])), 2);
    assert_eq!(
        code(&ede(&[
            "bench",
            "--grammar",
            "strings:2",
            "--modes",
            "fast"
        ])),
        2
    );
    assert_eq!(
        code(&ede(&["bench", "--grammar", "strings:2", "--jobs", "0"])),
        2
    );
}

#[test]
fn jobs_come_from_flag_env_or_config() {
    let dir = workdir("config");
    let bench = ["bench", "--grammar", "strings:2:3", "--modes", "ede-ss"];
    assert_eq!(code(&ede_with_env(&bench, &[("EDE_JOBS", "0")])), 2);
    let mut with_flag = bench.to_vec();
    with_flag.extend(["--jobs", "2"]);
    assert_eq!(code(&ede_with_env(&with_flag, &[("EDE_JOBS", "0")])), 0);

    let bad = write(&dir, "bad.conf", "# defaults\njobs = 0\n");
    let mut args = vec!["--config", s(&bad)];
    args.extend(bench);
    assert_eq!(code(&ede(&args)), 2);
    assert_eq!(code(&ede_with_env(&bench, &[("EDE_CONFIG", s(&bad))])), 2);

    let unknown = write(&dir, "unknown.conf", "colour = red\n");
    let mut args = vec!["--config", s(&unknown)];
    args.extend(bench);
    assert_eq!(code(&ede(&args)), 2);
}

#[test]
fn config_supplies_expansion_caps() {
    let dir = workdir("caps");
    let conf = write(&dir, "caps.conf", "max-label = C=3\nmode = ede-s\n");
    let json = dir.join("net.json");
    let mut args = vec!["--config".to_string(), s(&conf).to_string()];
    args.extend(formose_args(&["--out", s(&json)]));
    let o = ede(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let net: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(
        net["molecules"].as_array().unwrap().len(),
        formose_molecules(3)
    );
    // a flag overrides the config
    let mut args = vec!["--config".to_string(), s(&conf).to_string()];
    args.extend(formose_args(&["--max-label", "C=2", "--out", s(&json)]));
    let o = ede(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(code(&o), 0);
    let net: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(
        net["molecules"].as_array().unwrap().len(),
        formose_molecules(2)
    );
    assert!(formose_molecules(2) < formose_molecules(3));
}
