use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_transship-moo");

const SMALL_RUN: [&str; 10] = [
    "--population",
    "20",
    "--archive",
    "10",
    "--generations",
    "3",
    "--scenarios",
    "50",
    "--objectives",
    "cost,fill",
];

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("TRANSSHIP_MOO_OUT")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn optimize_into(dir: &Path) -> Output {
    let mut args = vec!["optimize", "--preset", "table1", "--output-dir", dir.to_str().unwrap()];
    args.extend(SMALL_RUN);
    run(&args)
}

fn read_tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(dir).unwrap().display().to_string();
                files.push((rel, fs::read(&path).unwrap()));
            }
        }
    }
    files.sort();
    files
}

#[test]
fn validate_accepts_presets() {
    for preset in ["table1", "s1", "s2", "s3", "s4"] {
        let out = run(&["validate", "--preset", preset]);
        assert_eq!(code(&out), 0, "{preset}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn validate_rejects_bad_input() {
    assert_eq!(code(&run(&["validate", "--preset", "nope"])), 1);

    let dir = tempfile::tempdir().unwrap();
    let single = dir.path().join("single.toml");
    fs::write(
        &single,
        "[system]\npreset = \"table1\"\n[run]\nobjectives = [\"cost\"]\n",
    )
    .unwrap();
    assert_eq!(code(&run(&["validate", single.to_str().unwrap()])), 1);

    let negative = dir.path().join("negative.toml");
    fs::write(
        &negative,
        r#"
[system]
tau = [[0.0, -0.5], [0.5, 0.0]]
lead = [[0.0, 5.0], [5.0, 0.0]]

[[system.locations]]
holding_cost = 3.0
shortage_cost = 2.0
demand = { mean = 100.0, std_dev = 20.0 }

[[system.locations]]
holding_cost = 3.0
shortage_cost = 2.0
demand = { mean = 100.0, std_dev = 20.0 }
"#,
    )
    .unwrap();
    assert_eq!(code(&run(&["validate", negative.to_str().unwrap()])), 1);

    let garbled = dir.path().join("garbled.toml");
    fs::write(&garbled, "[system\npreset = ").unwrap();
    let out = run(&["validate", garbled.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));
}

#[test]
fn optimize_rejects_bad_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "optimize",
        "--preset",
        "table1",
        "--population",
        "0",
        "--output-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);
    let out = run(&[
        "optimize",
        "--preset",
        "table1",
        "--objectives",
        "cost",
        "--output-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);
    assert!(
        fs::read_dir(dir.path()).unwrap().next().is_none(),
        "nothing written on rejection"
    );
}

#[test]
fn optimize_writes_outputs_deterministically() {
    let first = tempfile::tempdir().unwrap();
    let second = tempfile::tempdir().unwrap();
    let out = optimize_into(first.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(code(&optimize_into(second.path())), 0);

    let a = read_tree(first.path());
    let b = read_tree(second.path());
    assert_eq!(a, b, "reruns differ");
    let names: Vec<&str> = a.iter().map(|(n, _)| n.as_str()).collect();
    for expected in [
        "front.csv",
        "solutions.csv",
        "summary.txt",
        "snapshots/gen_0.csv",
        "snapshots/gen_2.csv",
    ] {
        assert!(names.contains(&expected), "missing {expected} in {names:?}");
    }

    let front = fs::read_to_string(first.path().join("front.csv")).unwrap();
    let mut lines = front.lines();
    assert_eq!(
        lines.next().unwrap(),
        "cost,fill,cost_stderr,fill_stderr,S_1,S_2,generation"
    );
    let costs: Vec<f64> = lines.map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert!(!costs.is_empty());
    assert!(costs.windows(2).all(|w| w[0] <= w[1]));

    let summary = run(&["summarize", first.path().join("front.csv").to_str().unwrap()]);
    assert_eq!(code(&summary), 0);
    let text = String::from_utf8(summary.stdout).unwrap();
    assert!(text.contains(&format!("records: {}", costs.len())), "{text}");
}

#[test]
fn output_dir_defaults_to_environment() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("from_env");
    let mut args = vec!["optimize", "--preset", "table1"];
    args.extend(SMALL_RUN);
    let out = Command::new(BIN)
        .args(&args)
        .env("TRANSSHIP_MOO_OUT", &target)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(target.join("front.csv").exists());
}

#[test]
fn landscape_grid_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grid.csv");
    let out = run(&[
        "landscape",
        "--preset",
        "table1",
        "--grid",
        "3",
        "--scenarios",
        "20",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 10);
    assert!(text.starts_with("S_1,S_2,cost,fill,lead"));

    assert_eq!(
        code(&run(&[
            "landscape",
            "--preset",
            "table1",
            "--samples",
            "0",
            "--out",
            path.to_str().unwrap()
        ])),
        1
    );
}

#[test]
fn summarize_failures() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.csv");
    assert_eq!(code(&run(&["summarize", missing.to_str().unwrap()])), 2);
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "cost,fill,generation\nabc,1,0\n").unwrap();
    assert_eq!(code(&run(&["summarize", bad.to_str().unwrap()])), 1);
}

#[test]
fn unwritable_output_is_a_runtime_failure() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let out = optimize_into(&blocker.join("sub"));
    assert_eq!(code(&out), 2);
}
