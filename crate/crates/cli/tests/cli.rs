use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn coopnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coopnet"))
        .args(args)
        .output()
        .expect("spawn coopnet")
}

fn ok(args: &[&str]) -> String {
    let out = coopnet(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    coopnet(args).status.code().unwrap()
}

fn schema() -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/run-report.schema.json");
    let schema: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

fn report(args: &[&str]) -> Value {
    let v: Value = serde_json::from_str(&ok(args)).unwrap();
    let errors: Vec<String> = schema().iter_errors(&v).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "schema violations: {errors:?}");
    v
}

fn write_partition(dir: &TempDir, name: &str, blocks: &[Vec<String>]) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, json!({ "blocks": blocks }).to_string()).unwrap();
    path
}

fn labels(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn karate_split(dir: &TempDir, name: &str, side: &[u32]) -> PathBuf {
    let a: Vec<String> = side.iter().map(u32::to_string).collect();
    let b: Vec<String> = (1..=34u32)
        .filter(|x| !side.contains(x))
        .map(|x| x.to_string())
        .collect();
    write_partition(dir, name, &[a, b])
}

const S15: [u32; 15] = [1, 2, 4, 5, 6, 7, 8, 11, 12, 13, 14, 17, 18, 20, 22];

fn blocks(v: &Value) -> Value {
    v["blocks"].clone()
}

#[test]
fn dataset_info_example2() {
    let info: Value =
        serde_json::from_str(&ok(&["dataset", "--name", "example2", "--emit", "info"])).unwrap();
    assert_eq!(info["nodes"], 26);
    assert_eq!(info["edges"], 78);
    assert_eq!(info["clique_sizes"], json!([8, 5, 6, 7]));
    let karate: Value = serde_json::from_str(&ok(&["dataset", "--name", "karate"])).unwrap();
    assert_eq!(karate["nodes"], 34);
    assert_eq!(karate["edges"], 78);
    assert_eq!(karate["max_degree"], 17);
}

#[test]
fn edge_list_file_matches_dataset() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("e1.txt");
    fs::write(
        &path,
        ok(&["dataset", "--name", "example1", "--emit", "edgelist"]),
    )
    .unwrap();
    let file = path.to_str().unwrap();
    let a = report(&["partition", "hedonic", "--graph", file, "--alpha", "1/5"]);
    let b = report(&[
        "partition",
        "hedonic",
        "--graph",
        "example1",
        "--alpha",
        "1/5",
    ]);
    assert_eq!(a["input"]["sha256"], b["input"]["sha256"]);
    assert_eq!(a["input"]["source"], "file");
    assert_eq!(b["input"]["source"], "dataset:example1");
    assert_eq!(a["partition"], b["partition"]);
}

#[test]
fn threshold_karate() {
    let dir = TempDir::new().unwrap();
    let all: Vec<u32> = (1..=34).collect();
    let grand = write_partition(
        &dir,
        "grand.json",
        &[all.iter().map(u32::to_string).collect()],
    );
    let s15 = karate_split(&dir, "s15.json", &S15);
    let (g, s) = (grand.to_str().unwrap(), s15.to_str().unwrap());
    assert_eq!(
        ok(&["threshold", "--graph", "karate", "--p1", g, "--p2", s]),
        "2/57\n"
    );
    assert_eq!(
        ok(&["threshold", "--graph", "karate", "--p1", g, "--p2", g]),
        "always equal\n"
    );
}

#[test]
fn threshold_none_when_parallel() {
    let dir = TempDir::new().unwrap();
    // Equal slopes (one pair inside a block each) and different intercepts.
    let p1 = write_partition(
        &dir,
        "p1.json",
        &[
            labels(&["A", "B"]),
            labels(&["C"]),
            labels(&["D"]),
            labels(&["E"]),
            labels(&["F"]),
        ],
    );
    let p2 = write_partition(
        &dir,
        "p2.json",
        &[
            labels(&["A", "F"]),
            labels(&["B"]),
            labels(&["C"]),
            labels(&["D"]),
            labels(&["E"]),
        ],
    );
    let out = ok(&[
        "threshold",
        "--graph",
        "example1",
        "--p1",
        p1.to_str().unwrap(),
        "--p2",
        p2.to_str().unwrap(),
    ]);
    assert_eq!(out, "none\n");
}

#[test]
fn hedonic_example1_from_singletons() {
    // Round robin joins D to the first triangle; the grand coalition is
    // itself Nash stable at 1/5.
    let v = report(&[
        "partition",
        "hedonic",
        "--graph",
        "example1",
        "--alpha",
        "1/5",
        "--init",
        "singletons",
    ]);
    assert_eq!(
        v["partition"]["blocks"],
        json!([["A", "B", "C", "D", "E", "F"]])
    );
    assert_eq!(v["stability"]["nash_stable"], true);
    assert_eq!(v["trace"]["status"], "stable");

    let v = report(&[
        "partition",
        "hedonic",
        "--graph",
        "example1",
        "--alpha",
        "1/5",
        "--init",
        "singletons",
        "--schedule",
        "greedy",
    ]);
    assert_eq!(
        v["partition"]["blocks"],
        json!([["A", "B", "C"], ["D", "E", "F"]])
    );
    assert_eq!(v["stability"]["nash_stable"], true);
    assert_eq!(v["potential"]["value"], "24/5");
    assert_eq!(v["potential"]["linear"], json!(["6/1", "-6/1"]));
}

#[test]
fn hedonic_karate_reaches_s17() {
    let dir = TempDir::new().unwrap();
    let s15 = karate_split(&dir, "s15.json", &S15);
    let v = report(&[
        "partition",
        "hedonic",
        "--graph",
        "karate",
        "--alpha",
        "1/20",
        "--init",
        s15.to_str().unwrap(),
    ]);
    let steps = v["trace"]["steps"].as_array().unwrap();
    let moved: Vec<&str> = steps.iter().map(|s| s["node"].as_str().unwrap()).collect();
    assert_eq!(moved, ["3", "10"]);
    assert_eq!(steps[0]["gain"], "3/20");
    assert_eq!(v["params"]["init"], "file");
    assert_eq!(v["partition"]["blocks"][0].as_array().unwrap().len(), 17);
    assert_eq!(v["potential"]["linear"], json!(["68/1", "-272/1"]));
}

#[test]
fn modularity_example1() {
    let v = report(&[
        "partition",
        "hedonic",
        "--graph",
        "example1",
        "--modularity",
        "--schedule",
        "greedy",
    ]);
    assert_eq!(v["params"]["model"], "modularity");
    assert_eq!(v["params"]["beta"], "uniform:1/1");
    assert_eq!(v["stability"]["nash_stable"], true);
    let v = report(&[
        "partition",
        "hedonic",
        "--graph",
        "example1",
        "--modularity",
        "--gamma",
        "1/2",
        "--beta",
        "degree-norm",
        "--init",
        "grand",
    ]);
    assert_eq!(v["params"]["gamma"], "1/2");
    assert_eq!(v["params"]["beta"], "degree-norm");
}

#[test]
fn output_partition_round_trips() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("run.json");
    ok(&[
        "partition",
        "hedonic",
        "--graph",
        "example2",
        "--alpha",
        "1/10",
        "--schedule",
        "random",
        "--seed",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    let v: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    let part = dir.path().join("part.json");
    fs::write(&part, v["partition"].to_string()).unwrap();
    let again = report(&[
        "partition",
        "hedonic",
        "--graph",
        "example2",
        "--alpha",
        "1/10",
        "--init",
        part.to_str().unwrap(),
    ]);
    assert_eq!(blocks(&again["initial"]), blocks(&v["partition"]));
    assert_eq!(blocks(&again["partition"]), blocks(&v["partition"]));
    assert_eq!(again["trace"]["steps"], json!([]));
}

#[test]
fn seeded_runs_are_byte_reproducible() {
    let dir = TempDir::new().unwrap();
    let mut texts = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("r{k}.json"));
        ok(&[
            "partition",
            "hedonic",
            "--graph",
            "karate",
            "--alpha",
            "1/30",
            "--schedule",
            "random",
            "--seed",
            "11",
            "--out",
            out.to_str().unwrap(),
        ]);
        let text = fs::read_to_string(&out).unwrap();
        let cut = text.find("\"timing\"").unwrap();
        texts.push(text[..cut].to_string());
    }
    assert_eq!(texts[0], texts[1]);
    assert!(texts[0].contains("\"policy\": \"seeded-random\""));
}

#[test]
fn myerson_value_example1() {
    let v: Value = serde_json::from_str(&ok(&[
        "myerson",
        "value",
        "--graph",
        "example1",
        "--coalition",
        "A,D,E,F",
        "--r",
        "1/2",
        "--oracle",
    ]))
    .unwrap();
    assert_eq!(v["text"], "5 r + 2 r^2");
    assert_eq!(v["at_r"], "3/1");
    let a = &v["allocations"];
    assert_eq!(a[0]["text"], "1/2 r + 2/3 r^2");
    assert_eq!(a[1]["text"], "3/2 r + 2/3 r^2");
    assert_eq!(a[2]["text"], "3/2 r + 1/3 r^2");
    assert_eq!(a[3]["text"], "3/2 r + 1/3 r^2");
    assert_eq!(v["oracle"], v["allocations"]);

    let v: Value = serde_json::from_str(&ok(&[
        "myerson",
        "value",
        "--graph",
        "example1",
        "--coalition",
        "A,B,C,D,E,F",
    ]))
    .unwrap();
    assert_eq!(v["value"], json!(["0/1", "9/1", "4/1", "4/1"]));
    assert!(v.get("at_r").is_none());
}

#[test]
fn myerson_dynamics_threshold() {
    let dir = TempDir::new().unwrap();
    let split = write_partition(
        &dir,
        "split.json",
        &[labels(&["A", "B", "C"]), labels(&["D", "E", "F"])],
    );
    let split = split.to_str().unwrap();
    let low = report(&[
        "partition",
        "myerson",
        "--graph",
        "example1",
        "--r",
        "1/2",
        "--init",
        split,
    ]);
    assert_eq!(
        low["partition"]["blocks"],
        json!([["A", "B", "C"], ["D", "E", "F"]])
    );
    assert_eq!(low["trace"]["steps"], json!([]));
    assert_eq!(low["allocations"].as_array().unwrap().len(), 6);
    let high = report(&[
        "partition",
        "myerson",
        "--graph",
        "example1",
        "--r",
        "7/8",
        "--init",
        split,
    ]);
    assert_eq!(
        high["partition"]["blocks"],
        json!([["A", "B", "C", "D", "E", "F"]])
    );
    assert_eq!(high["params"]["r"], "7/8");
    assert_eq!(high["stability"]["external_stable"], true);
}

#[test]
fn stability_verdicts() {
    let dir = TempDir::new().unwrap();
    let grand = write_partition(
        &dir,
        "grand.json",
        &[labels(&["A", "B", "C", "D", "E", "F"])],
    );
    let grand = grand.to_str().unwrap();
    let v: Value = serde_json::from_str(&ok(&[
        "stability",
        "--graph",
        "example1",
        "--partition",
        grand,
        "--model",
        "hedonic",
        "--alpha",
        "1/2",
    ]))
    .unwrap();
    assert_eq!(v["nash_stable"], false);
    assert_eq!(v["witness"]["to"], "fresh");
    assert_eq!(v["witness"]["gain"], "1/2");

    let v: Value = serde_json::from_str(&ok(&[
        "stability",
        "--graph",
        "example1",
        "--partition",
        grand,
        "--model",
        "myerson",
        "--r",
        "1/2",
        "--external",
    ]))
    .unwrap();
    assert!(v["nash_stable"].is_boolean());
    assert!(v["external_stable"].is_boolean());

    assert_eq!(
        code(&[
            "stability",
            "--graph",
            "example1",
            "--partition",
            grand,
            "--model",
            "hedonic",
            "--alpha",
            "1/2",
            "--external"
        ]),
        2
    );
    assert_eq!(
        code(&[
            "stability",
            "--graph",
            "example1",
            "--partition",
            grand,
            "--model",
            "myerson"
        ]),
        2
    );
}

#[test]
fn sweep_explicit_candidates() {
    let dir = TempDir::new().unwrap();
    let grand = write_partition(
        &dir,
        "grand.json",
        &[labels(&["A", "B", "C", "D", "E", "F"])],
    );
    let split = write_partition(
        &dir,
        "split.json",
        &[labels(&["D", "E", "F"]), labels(&["A", "B", "C"])],
    );
    let out = dir.path().join("t.csv");
    ok(&[
        "sweep",
        "--graph",
        "example1",
        "--candidates",
        grand.to_str().unwrap(),
        split.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    let csv = fs::read_to_string(out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines,
        [
            "alpha_lo,alpha_hi,partition_id,partition_canonical,potential_intercept,potential_slope",
            "0/1,1/9,0,A B C D E F,7/1,-15/1",
            "1/9,1/1,1,A B C|D E F,6/1,-6/1",
        ]
    );
}

#[test]
fn sweep_discovery() {
    let csv = ok(&["sweep", "--graph", "example1", "--grid", "10"]);
    assert!(csv.contains("\n0/1,1/9,"));
    assert!(csv.contains("\n1/9,1/1,"));
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["bogus"]), 2);
    assert_eq!(
        code(&[
            "partition",
            "hedonic",
            "--graph",
            "example1",
            "--alpha",
            "0.5"
        ]),
        2
    );
    assert_eq!(
        code(&[
            "partition",
            "hedonic",
            "--graph",
            "example1",
            "--alpha",
            "3/2"
        ]),
        2
    );
    assert_eq!(code(&["partition", "hedonic", "--graph", "example1"]), 2);
    assert_eq!(
        code(&[
            "partition",
            "hedonic",
            "--graph",
            "nowhere",
            "--alpha",
            "1/2"
        ]),
        2
    );
    assert_eq!(code(&["dataset", "--name", "nowhere"]), 2);
    assert_eq!(
        code(&[
            "myerson",
            "value",
            "--graph",
            "example1",
            "--coalition",
            "A,Z"
        ]),
        2
    );
    let big = (1..=13)
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join(",");
    assert_eq!(
        code(&[
            "myerson",
            "value",
            "--graph",
            "karate",
            "--coalition",
            &big,
            "--oracle"
        ]),
        3
    );
}

#[test]
fn malformed_inputs_report_input_errors() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "A B\nA\n").unwrap();
    let out = coopnet(&[
        "partition",
        "hedonic",
        "--graph",
        bad.to_str().unwrap(),
        "--alpha",
        "1/2",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let part = write_partition(
        &dir,
        "overlap.json",
        &[labels(&["A", "B"]), labels(&["B", "C", "D", "E", "F"])],
    );
    assert_eq!(
        code(&[
            "stability",
            "--graph",
            "example1",
            "--partition",
            part.to_str().unwrap(),
            "--model",
            "hedonic",
            "--alpha",
            "1/2"
        ]),
        2
    );
}
