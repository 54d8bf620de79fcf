//! End-to-end runs of the binary: the full generate -> partition ->
//! simulate/bound/sweep/benchmark pipeline, file formats, determinism, and
//! exit codes.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pathloc"))
}

struct Workspace {
    dir: PathBuf,
}

impl Workspace {
    fn new(tag: &str) -> Workspace {
        let dir = std::env::temp_dir().join(format!("pathloc-cli-{tag}-{}", std::process::id()));
        let _ = fs::remove_dir_all(&dir);
        fs::create_dir_all(&dir).unwrap();
        Workspace { dir }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn run(&self, args: &[&str]) -> Output {
        let output = bin()
            .arg("--out-dir")
            .arg(&self.dir)
            .args(args)
            .output()
            .expect("binary runs");
        assert!(
            output.status.success(),
            "command {args:?} failed:\nstdout: {}\nstderr: {}",
            String::from_utf8_lossy(&output.stdout),
            String::from_utf8_lossy(&output.stderr)
        );
        output
    }

    fn find(&self, prefix: &str, suffix: &str) -> PathBuf {
        let mut matches: Vec<PathBuf> = fs::read_dir(&self.dir)
            .unwrap()
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| {
                let name = p.file_name().unwrap().to_string_lossy().to_string();
                name.starts_with(prefix) && name.ends_with(suffix)
            })
            .collect();
        matches.sort();
        matches
            .pop()
            .unwrap_or_else(|| panic!("no {prefix}*{suffix} in {}", self.dir.display()))
    }
}

impl Drop for Workspace {
    fn drop(&mut self) {
        let _ = fs::remove_dir_all(&self.dir);
    }
}

fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap()
}

#[test]
fn generation_is_deterministic_per_seed() {
    let ws = Workspace::new("determinism");
    ws.run(&[
        "--seed",
        "9",
        "generate",
        "rgg",
        "--radius",
        "0.1",
        "--fixed-n",
        "300",
        "--out",
        ws.path("a.json").to_str().unwrap(),
    ]);
    ws.run(&[
        "--seed",
        "9",
        "generate",
        "rgg",
        "--radius",
        "0.1",
        "--fixed-n",
        "300",
        "--out",
        ws.path("b.json").to_str().unwrap(),
    ]);
    ws.run(&[
        "--seed",
        "10",
        "generate",
        "rgg",
        "--radius",
        "0.1",
        "--fixed-n",
        "300",
        "--out",
        ws.path("c.json").to_str().unwrap(),
    ]);
    assert_eq!(read(&ws.path("a.json")), read(&ws.path("b.json")));
    assert_ne!(read(&ws.path("a.json")), read(&ws.path("c.json")));
}

#[test]
fn edge_list_ingestion_reports_drops() {
    let ws = Workspace::new("edgelist");
    fs::write(
        ws.path("edges.txt"),
        "# comment\n10 20\n20 10\n10 10\n20 30\n",
    )
    .unwrap();
    let output = ws.run(&[
        "generate",
        "edge-list",
        "--input",
        ws.path("edges.txt").to_str().unwrap(),
        "--out",
        ws.path("g.json").to_str().unwrap(),
    ]);
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("3 nodes, 2 edges"), "stdout: {stdout}");
    assert!(stdout.contains("1 duplicate edges and 1 self-loops dropped"));
}

#[test]
fn full_pipeline_square_partition() {
    let ws = Workspace::new("pipeline");
    ws.run(&[
        "--seed",
        "5",
        "generate",
        "rgg",
        "--radius",
        "0.1",
        "--fixed-n",
        "400",
        "--out",
        ws.path("g.json").to_str().unwrap(),
    ]);
    let g = ws.path("g.json");
    let g = g.to_str().unwrap();

    ws.run(&["partition", "--graph", g, "square", "-b", "5"]);
    let partition = ws.find("partition-", ".txt");
    let summary: serde_json::Value =
        serde_json::from_str(&read(&ws.find("partition-", ".summary.json"))).unwrap();
    assert_eq!(summary["clusters"], 25);

    // The partition file itself imports cleanly.
    ws.run(&[
        "partition",
        "--graph",
        g,
        "import",
        "--file",
        partition.to_str().unwrap(),
    ]);

    let p = partition.to_str().unwrap();
    let output = ws.run(&[
        "--seed",
        "3",
        "simulate",
        "--graph",
        g,
        "--partition",
        p,
        "--decoder",
        "multiscale",
        "-t",
        "50",
        "--snr",
        "6",
        "--trials",
        "8",
        "--dump-chain",
        "--dump-observations",
    ]);
    assert!(String::from_utf8_lossy(&output.stdout).contains("mean normalized Hamming"));
    let csv = read(&ws.find("simulate-", ".csv"));
    let header = csv.lines().next().unwrap();
    assert_eq!(
        header,
        "trial,snr,hamming,hammingNormalized,hammingCoarse,destination,sumSignal,connected,decodeMs,configDigest"
    );
    assert_eq!(csv.lines().count(), 1 + 8);

    let chain_csv = read(&ws.find("chain-", ".csv"));
    assert!(chain_csv.starts_with("t,id\n"));
    assert_eq!(chain_csv.lines().count(), 1 + 50);
    let chain_summary: serde_json::Value =
        serde_json::from_str(&read(&ws.find("chain-", ".json"))).unwrap();
    for key in [
        "sumSignal",
        "connected",
        "hamming",
        "destination",
        "wallTimeMs",
    ] {
        assert!(chain_summary.get(key).is_some(), "missing {key}");
    }
    // Binary observation dump: 24-byte header then T*n doubles.
    let dump = fs::read(ws.find("observations-", ".bin")).unwrap();
    assert_eq!(dump.len(), 24 + 50 * 400 * 8);

    for kind in [
        "hamming-super",
        "hamming-fine",
        "destination-super",
        "destination-fine",
        "rgg-closed-form",
    ] {
        let output = ws.run(&[
            "bound",
            "--graph",
            g,
            "--partition",
            p,
            "--kind",
            kind,
            "-t",
            "40",
            "--snr",
            "6",
        ]);
        let stdout = String::from_utf8_lossy(&output.stdout);
        assert!(stdout.contains("\"kind\""), "bound {kind}: {stdout}");
    }

    ws.run(&[
        "benchmark",
        "--graph",
        g,
        "--partition",
        p,
        "-t",
        "50",
        "--repeats",
        "3",
    ]);
    let bench: serde_json::Value =
        serde_json::from_str(&read(&ws.find("benchmark-", ".json"))).unwrap();
    assert!(bench["speedupPerStep"].as_f64().unwrap() > 1.0);
}

#[test]
fn sweep_emits_schema_and_ordered_thresholds() {
    let ws = Workspace::new("sweep");
    ws.run(&[
        "--seed",
        "8",
        "generate",
        "rgg",
        "--radius",
        "0.1",
        "--fixed-n",
        "400",
        "--out",
        ws.path("g.json").to_str().unwrap(),
    ]);
    let g = ws.path("g.json");
    ws.run(&[
        "--seed",
        "8",
        "sweep",
        "--graph",
        g.to_str().unwrap(),
        "--b-list",
        "4,6",
        "--target",
        "hamming:0.05",
        "-t",
        "40",
        "--trials",
        "10",
    ]);
    let csv = read(&ws.find("sweep-", ".csv"));
    assert_eq!(
        csv.lines().next().unwrap(),
        "m,snr,trials,hammingCoarseMean,hammingCoarseStderr,hammingFineMean,hammingFineStderr,\
         destMean,destStderr,boundHammingFine,boundDestFine,decodeStepMs,configDigest"
            .replace(' ', "")
    );
    assert!(csv.lines().count() > 4);
    let thresholds: serde_json::Value =
        serde_json::from_str(&read(&ws.find("thresholds-", ".json"))).unwrap();
    let list = thresholds.as_array().unwrap();
    assert_eq!(list.len(), 2);
    for entry in list {
        let simulated = entry["simulatedThresholdSnr"].as_f64().unwrap();
        if let Some(bound) = entry["boundThresholdSnr"].as_f64() {
            assert!(
                bound >= simulated,
                "bound-implied threshold {bound} below simulated {simulated}"
            );
        }
    }
}

#[test]
fn naive_and_exact_decoders_run_without_a_partition() {
    let ws = Workspace::new("decoders");
    ws.run(&[
        "--seed",
        "4",
        "generate",
        "rgg",
        "--radius",
        "0.12",
        "--fixed-n",
        "200",
        "--out",
        ws.path("g.json").to_str().unwrap(),
    ]);
    for decoder in ["naive", "exact"] {
        let output = ws.run(&[
            "simulate",
            "--graph",
            ws.path("g.json").to_str().unwrap(),
            "--decoder",
            decoder,
            "-t",
            "40",
            "--snr",
            "6",
            "--trials",
            "3",
        ]);
        assert!(String::from_utf8_lossy(&output.stdout).contains("mean normalized Hamming"));
    }
    // Multiscale without a partition is a validation error.
    let output = bin()
        .arg("--out-dir")
        .arg(&ws.dir)
        .args([
            "simulate",
            "--graph",
            ws.path("g.json").to_str().unwrap(),
            "--decoder",
            "multiscale",
            "--snr",
            "6",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn config_file_drives_a_simulation() {
    let ws = Workspace::new("config");
    let config = serde_json::json!({
        "graph": {
            "kind": "rgg",
            "lambda": 0.0,
            "radius": 0.12,
            "fixedN": 200,
            "seed": 17,
        },
        "partition": {"method": "square", "squaresPerSide": 4},
        "t": 30,
        "trials": 4,
        "snrGrid": [6.0],
        "seed": 99,
        "decoder": "multiscale",
    });
    fs::write(
        ws.path("exp.json"),
        serde_json::to_string_pretty(&config).unwrap(),
    )
    .unwrap();
    ws.run(&[
        "--config",
        ws.path("exp.json").to_str().unwrap(),
        "simulate",
    ]);
    let csv = read(&ws.find("simulate-", ".csv"));
    assert_eq!(csv.lines().count(), 1 + 4);
    // Rerunning the same config reproduces every value except the wall
    // clock, and the digest routes it to the same file.
    let strip_decode_ms = |text: &str| -> Vec<String> {
        text.lines()
            .map(|line| {
                let fields: Vec<&str> = line.split(',').collect();
                let mut kept = fields.clone();
                kept.remove(fields.len() - 2);
                kept.join(",")
            })
            .collect()
    };
    let before = strip_decode_ms(&csv);
    ws.run(&[
        "--config",
        ws.path("exp.json").to_str().unwrap(),
        "simulate",
    ]);
    assert_eq!(
        strip_decode_ms(&read(&ws.find("simulate-", ".csv"))),
        before
    );
}

#[test]
fn multipath_emits_per_k_rows() {
    let ws = Workspace::new("multipath");
    ws.run(&[
        "--seed",
        "2",
        "generate",
        "rgg",
        "--radius",
        "0.12",
        "--fixed-n",
        "300",
        "--out",
        ws.path("g.json").to_str().unwrap(),
    ]);
    ws.run(&[
        "multipath",
        "--graph",
        ws.path("g.json").to_str().unwrap(),
        "-b",
        "5",
        "--k-list",
        "1,2",
        "--snr-list",
        "6",
        "-t",
        "30",
        "--trials",
        "5",
    ]);
    let csv = read(&ws.find("multipath-", ".csv"));
    assert_eq!(
        csv.lines().next().unwrap(),
        "k,snr,trials,setHammingMean,setHammingStderr,configDigest"
    );
    assert_eq!(csv.lines().count(), 1 + 2);
}

#[test]
fn validation_failures_exit_2() {
    let ws = Workspace::new("exitcodes");
    let missing = ws.path("missing.json");
    let output = bin()
        .args([
            "bound",
            "--graph",
            missing.to_str().unwrap(),
            "--partition",
            missing.to_str().unwrap(),
            "--kind",
            "hamming-fine",
            "--snr",
            "5",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));

    // Malformed edge list is a parse error with a line number.
    fs::write(ws.path("bad.txt"), "0 1\noops 2\n").unwrap();
    let output = bin()
        .arg("--out-dir")
        .arg(&ws.dir)
        .args([
            "generate",
            "edge-list",
            "--input",
            ws.path("bad.txt").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("line 2"));

    // Unknown flag values are clap usage errors (also 2).
    let output = bin()
        .args(["simulate", "--decoder", "wrong"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}
