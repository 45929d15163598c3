use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use envspec::circuit::parse_circuit;
use envspec::protocol::{nk_exact_free, ProtocolConfig};

fn envspec(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_envspec"))
        .args(args)
        .current_dir(dir)
        .env("ENVSPEC_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn ok(out: &Output) {
    assert!(
        out.status.success(),
        "exit {:?}\nstdout:\n{}\nstderr:\n{}",
        out.status,
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn compile_fft_27_imported() {
    let dir = tempfile::tempdir().unwrap();
    let out = envspec(&["compile-fft", "--modes", "27", "--radix", "3", "--interleave", "imported", "--out", "f27.qc"], dir.path());
    ok(&out);
    let circuit = parse_circuit(&fs::read_to_string(dir.path().join("f27.qc")).unwrap()).unwrap();
    assert_eq!(circuit.num_qubits(), 27);
    let meta = json(&dir.path().join("f27.json"));
    assert_eq!(meta["top_level_interleave"]["two_qubit_count"], 60);
    assert_eq!(meta["two_qubit_count"], circuit.two_qubit_count());
    let manifest = json(&dir.path().join("f27.qc.manifest.json"));
    assert_eq!(manifest["subcommand"], "compile-fft");
    assert_eq!(manifest["outputs"].as_object().unwrap().len(), 2);
}

#[test]
fn compile_fft_rejects_bad_size() {
    let dir = tempfile::tempdir().unwrap();
    let out = envspec(&["compile-fft", "--modes", "6", "--out", "x.qc"], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("`modes`"));
}

#[test]
fn optimize_interleave_graph() {
    let dir = tempfile::tempdir().unwrap();
    ok(&envspec(&["optimize-cz", "--interleave-modes", "9", "--out", "g9.qc"], dir.path()));
    let report = json(&dir.path().join("g9.json"));
    assert_eq!(report["edges_in"], 9);
    assert!(report["gates_out"].as_u64().unwrap() <= 9);
    assert!(report["steps"].as_array().is_some());
}

#[test]
fn optimize_edge_list_file() {
    let dir = tempfile::tempdir().unwrap();
    // K4 needs 6 CZs directly
    fs::write(dir.path().join("k4.txt"), "# complete graph\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n").unwrap();
    ok(&envspec(&["optimize-cz", "--graph", "k4.txt", "--depth-penalty", "0", "--out", "k4.qc", "--report", "r.json"], dir.path()));
    let report = json(&dir.path().join("r.json"));
    assert_eq!(report["edges_in"], 6);
    assert!(report["gates_out"].as_u64().unwrap() <= 6);

    fs::write(dir.path().join("bad.txt"), "0 1 2\n").unwrap();
    let out = envspec(&["optimize-cz", "--graph", "bad.txt", "--out", "b.qc"], dir.path());
    assert!(!out.status.success());
}

const FREE_CONFIG: &str = r#"
sites = 8
epsilon = 0.4
t = 5.0
nu = 1.0
omega = { min = -3.0, max = 3.0, count = 13 }
environment = "full"
"#;

#[test]
fn simulate_spectral_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("free.toml"), FREE_CONFIG).unwrap();
    ok(&envspec(&["simulate-spectral", "--config", "free.toml", "--out", "a.csv"], dir.path()));
    let config: ProtocolConfig = toml::from_str(FREE_CONFIG).unwrap();
    let exact = nk_exact_free(&config).unwrap();
    let mut rdr = csv::Reader::from_path(dir.path().join("a.csv")).unwrap();
    assert_eq!(rdr.headers().unwrap(), vec!["k", "omega", "value", "method"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 8 * 13);
    for (row, (k, w, v)) in rows.iter().zip(exact.rows()) {
        assert_eq!(row[0].parse::<f64>().unwrap(), k);
        assert_eq!(row[1].parse::<f64>().unwrap(), w);
        assert_eq!(row[2].parse::<f64>().unwrap(), v);
        assert_eq!(&row[3], "exact");
    }
    let meta = json(&dir.path().join("a.json"));
    assert_eq!(meta["negative_samples"], 0);

    ok(&envspec(&["simulate-spectral", "--config", "free.toml", "--method", "gaussian", "--out", "g.csv"], dir.path()));
    let mut rdr = csv::Reader::from_path(dir.path().join("g.csv")).unwrap();
    for (row, (_, _, v)) in rdr.records().zip(exact.rows()) {
        assert!((row.unwrap()[2].parse::<f64>().unwrap() - v).abs() < 1e-10);
    }
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("free.toml"), FREE_CONFIG).unwrap();
    let args = |out: &'static str| {
        vec!["simulate-spectral", "--config", "free.toml", "--shots", "500", "--seed", "11", "--out", out]
    };
    ok(&envspec(&args("one.csv"), dir.path()));
    ok(&envspec(&args("two.csv"), dir.path()));
    for ext in ["csv", "json"] {
        assert_eq!(
            fs::read(dir.path().join(format!("one.{ext}"))).unwrap(),
            fs::read(dir.path().join(format!("two.{ext}"))).unwrap()
        );
    }
    let m1 = json(&dir.path().join("one.csv.manifest.json"));
    let m2 = json(&dir.path().join("two.csv.manifest.json"));
    assert_eq!(m1["outputs"]["one.csv"], m2["outputs"]["two.csv"]);
    assert_eq!(m1["seed"], 11);
}

#[test]
fn bad_config_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("typo.toml"), "sites = 4\nepsilon = 0.1\nt = 1.0\nepsilonn = 2\n").unwrap();
    let out = envspec(&["simulate-spectral", "--config", "typo.toml"], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("epsilonn"));

    fs::write(dir.path().join("neg.toml"), "sites = 4\nepsilon = 0.1\nt = -1.0\n").unwrap();
    let out = envspec(&["simulate-spectral", "--config", "neg.toml"], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("`t`"));
}

#[test]
fn compare_trotter_table() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("small.toml"), "sites = 3\nepsilon = 0.2\nt = 2.0\nnu = -1.0\nV = 1.5\nomega = [-1.0, 0.0, 1.0]\n")
        .unwrap();
    ok(&envspec(&["compare-trotter", "--config", "small.toml", "--steps", "1,4,0", "--out", "cmp.csv"], dir.path()));
    let mut rdr = csv::Reader::from_path(dir.path().join("cmp.csv")).unwrap();
    let steps: Vec<String> = rdr.records().map(|r| r.unwrap()[0].to_string()).collect();
    assert_eq!(steps, vec!["1", "4", "0"]);
    let meta = json(&dir.path().join("cmp.json"));
    assert_eq!(meta["rows"].as_array().unwrap().len(), 3);
}

#[test]
fn report_table() {
    let dir = tempfile::tempdir().unwrap();
    ok(&envspec(&["report", "--max-modes", "27", "--out", "r.csv"], dir.path()));
    let text = fs::read_to_string(dir.path().join("r.csv")).unwrap();
    assert!(text.lines().any(|l| l.starts_with("27,3,imported,60,")));
    assert!(text.lines().any(|l| l.starts_with("8,2,local-fswap,")));
}

#[test]
fn verify_quick_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = envspec(&["verify", "--quick"], dir.path());
    ok(&out);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("all checks passed"));
    assert!(!text.contains("FAIL"));
}
