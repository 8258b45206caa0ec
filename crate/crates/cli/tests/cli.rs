use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_phonetic-mt"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn encode_reads_stdin() {
    let o = run_stdin(&["encode", "--codec", "soundex"], "body\n");
    assert_eq!(stdout(&o), "B300\n");
    let o = run_stdin(&["encode", "--codec", "soundex"], "speak 42\n\nbody but bad\n");
    assert_eq!(stdout(&o), "S120 42\n\nB300 B300 B300\n");
}

#[test]
fn encode_with_pinyin_table() {
    let table = data("pinyin.tsv");
    let o = run_stdin(
        &["encode", "--codec", "pinyin", "--table", table.to_str().unwrap()],
        "笑 市\n",
    );
    assert_eq!(stdout(&o), "xiao4 shi4\n");
    let o = run_stdin(&["encode", "--codec", "pinyin"], "笑\n");
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bleu_of_a_file_against_itself() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "h.txt",
        "the cat sat on the mat\na dog barked loudly today\n",
    );
    let out = stdout(&run(&["eval", "bleu", "--hyp", &f, "--ref", &f]));
    assert!(out.starts_with("BLEU = 100.00"), "{out}");
    let json: serde_json::Value = serde_json::from_str(&stdout(&run(&[
        "eval", "bleu", "--hyp", &f, "--ref", &f, "--format", "json",
    ])))
    .unwrap();
    assert_eq!(json["bleu"], 100.0);
    let csv = stdout(&run(&["eval", "bleu", "--hyp", &f, "--ref", &f, "--format", "csv"]));
    assert_eq!(csv.lines().count(), 2);
}

#[test]
fn gamma_hand_example() {
    let dir = tempfile::tempdir().unwrap();
    let points = write(dir.path(), "p.tsv", "a\t0\t0\nb\t2\t0\nc\t0\t2\nd\t2\t2\n");
    let groups = write(dir.path(), "g.tsv", "a\tlow\nb\tlow\nc\thigh\nd\thigh\n");
    let out = stdout(&run(&["geometry", "gamma", "--groups", &groups, "--points", &points]));
    assert_eq!(out.trim(), "0.5");
    let json: serde_json::Value = serde_json::from_str(&stdout(&run(&[
        "geometry", "gamma", "--groups", &groups, "--points", &points, "--format", "json",
    ])))
    .unwrap();
    assert_eq!(json["gamma"], 0.5);
    assert_eq!(json["k"], 2);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["translate"]).status.code(), Some(1));
    assert_eq!(run(&[]).status.code(), Some(1));
    let missing = run(&["eval", "vocab", "--input", "/nonexistent/file.txt"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(!missing.stderr.is_empty());
    // Randomized commands refuse to run without a seed.
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "c.txt", "a b c\n");
    let o = run(&["augment", "perturb", "--k", "1", "--input", &f]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--seed"));
    let o = run(&["augment", "perturb", "--k", "1", "--input", &f, "--seed", "auto"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("seed: "));
}

#[test]
fn help_everywhere() {
    let paths: &[&[&str]] = &[
        &[],
        &["encode"],
        &["cluster"],
        &["bpe"],
        &["bpe", "learn"],
        &["bpe", "apply"],
        &["bpe", "decode"],
        &["pipeline", "run"],
        &["geometry"],
        &["geometry", "embed"],
        &["geometry", "project"],
        &["geometry", "gamma"],
        &["geometry", "density"],
        &["geometry", "cdf"],
        &["geometry", "coverage"],
        &["augment", "noise"],
        &["augment", "perturb"],
        &["eval", "bleu"],
        &["eval", "vocab"],
    ];
    for p in paths {
        let mut args = p.to_vec();
        args.push("--help");
        let o = run(&args);
        assert_eq!(o.status.code(), Some(0), "{p:?}");
        let text = String::from_utf8_lossy(&o.stdout);
        for flag in ["--seed", "--config", "--format"] {
            assert!(text.contains(flag), "{p:?} help lacks {flag}");
        }
    }
}

#[test]
fn seeded_commands_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "c.txt",
        "the cat sat on the mat\nthe dog sat on the log\na bird flew over the house\n",
    );
    let a = stdout(&run(&["augment", "perturb", "--k", "3", "--input", &f, "--seed", "9"]));
    let b = stdout(&run(&["augment", "perturb", "--k", "3", "--input", &f, "--seed", "9"]));
    assert_eq!(a, b);
    assert_eq!(a.lines().count(), 3);

    let m1 = stdout(&run(&[
        "cluster",
        "--corpus",
        &f,
        "--baseline",
        "soundex",
        "--seed",
        "5",
    ]));
    let m2 = stdout(&run(&[
        "cluster",
        "--corpus",
        &f,
        "--baseline",
        "soundex",
        "--seed",
        "5",
    ]));
    assert_eq!(m1, m2);
    assert!(m1.contains("# seed: 5"));
}

#[test]
fn config_file_supplies_flags() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "c.txt", "the cat sat on the mat\nthe dog sat on the log\n");
    let cfg = write(dir.path(), "cfg.json", r#"{"seed": 9, "k": 3}"#);
    let from_config = stdout(&run(&["augment", "perturb", "--input", &f, "--config", &cfg]));
    let explicit = stdout(&run(&["augment", "perturb", "--input", &f, "--k", "3", "--seed", "9"]));
    assert_eq!(from_config, explicit);
    // The command line wins over the file.
    let overridden = stdout(&run(&[
        "augment", "perturb", "--input", &f, "--config", &cfg, "--k", "0",
    ]));
    assert_eq!(overridden, "the cat sat on the mat\nthe dog sat on the log\n");
}

#[test]
fn bpe_learn_apply_decode() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = "lower lowest newer newest wider\nlow low lower new\n";
    let f = write(dir.path(), "c.txt", corpus);
    let merges = dir.path().join("m.bpe");
    stdout(&run(&[
        "bpe",
        "learn",
        "--operations",
        "10",
        "--input",
        &f,
        "--output",
        merges.to_str().unwrap(),
    ]));
    let text = fs::read_to_string(&merges).unwrap();
    assert!(text.starts_with("#version"));
    let pieces = stdout(&run(&[
        "bpe",
        "apply",
        "--merges",
        merges.to_str().unwrap(),
        "--input",
        &f,
    ]));
    assert!(pieces.contains("@@"));
    let back = run_stdin(&["bpe", "decode", "--merges", merges.to_str().unwrap()], &pieces);
    assert_eq!(stdout(&back), corpus);
}

#[test]
fn geometry_chain() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = fs::read_to_string(data("desk.en.txt")).unwrap();
    let small: String = corpus.lines().take(1500).map(|l| format!("{l}\n")).collect();
    let f = write(dir.path(), "c.txt", &small);
    let vec = dir.path().join("v.txt");
    let pts = dir.path().join("p.tsv");
    stdout(&run(&[
        "geometry",
        "embed",
        "--dim",
        "10",
        "--input",
        &f,
        "--output",
        vec.to_str().unwrap(),
        "--seed",
        "1",
    ]));
    stdout(&run(&[
        "geometry",
        "project",
        "--vectors",
        vec.to_str().unwrap(),
        "--output",
        pts.to_str().unwrap(),
    ]));
    let p = pts.to_str().unwrap();
    let gamma: f64 = stdout(&run(&["geometry", "gamma", "--points", p, "--codec", "soundex"]))
        .trim()
        .parse()
        .unwrap();
    assert!(gamma > 0.0);
    let cdf = stdout(&run(&[
        "geometry", "cdf", "--points", p, "--codec", "soundex", "--format", "csv",
    ]));
    assert!(cdf.starts_with("volume,fraction\n"));
    let cov = stdout(&run(&[
        "geometry", "coverage", "--points", p, "--codec", "soundex", "--seed", "3", "--orders", "2",
    ]));
    let last: f64 = cov.lines().last().unwrap().split('\t').nth(1).unwrap().parse().unwrap();
    assert!(last > 0.0);
    let dens = run(&[
        "geometry", "density", "--points", p, "--codec", "soundex", "--seed", "3", "--beta", "0.3", "--radius", "1.0",
    ]);
    let text = stdout(&dens);
    assert_eq!(text.lines().count(), 4);
    let km = stdout(&run(&[
        "cluster",
        "--method",
        "kmeans",
        "--vectors",
        vec.to_str().unwrap(),
        "--k",
        "20",
        "--seed",
        "2",
    ]));
    assert!(km.lines().all(|l| l.contains("\tG")));
}

#[test]
fn noise_writes_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let vec = write(
        dir.path(),
        "v.txt",
        "cat 1 0 0\ndog 0.9 0.1 0\nmat 0 1 0\nlog 0.1 0.9 0\n",
    );
    let f = write(dir.path(), "c.txt", "the cat sat on the mat\nthe dog sat on the log\n");
    let manifest = dir.path().join("noise.json");
    let out = stdout(&run(&[
        "augment",
        "noise",
        "--vectors",
        &vec,
        "--fraction",
        "0.5",
        "--input",
        &f,
        "--seed",
        "4",
        "--manifest",
        manifest.to_str().unwrap(),
    ]));
    assert_eq!(out.lines().count(), 2);
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(manifest).unwrap()).unwrap();
    assert_eq!(m["spec"]["seed"], 4);
}

#[test]
fn pipeline_runs_reproduce() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "train.txt",
        "the cat sat on the mat\nthe dog sat on the log\n",
    );
    write(dir.path(), "test.txt", "a cat on a log\n");
    let cfg = write(
        dir.path(),
        "pipeline.json",
        r#"{"splits": {"train": "train.txt", "test": "test.txt"},
            "encoder": {"kind": "random_cluster", "baseline": "soundex", "seed": 0},
            "word_bpe_operations": 5, "code_bpe_operations": 5, "combine": "concat"}"#,
    );
    let first = dir.path().join("first");
    let vocab = stdout(&run(&[
        "pipeline",
        "run",
        "--from",
        &cfg,
        "--out",
        first.to_str().unwrap(),
        "--seed",
        "12",
    ]));
    assert!(vocab.contains("combined"));
    let manifest = first.join("manifest.json");
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(&manifest).unwrap()).unwrap();
    assert_eq!(m["config"]["encoder"]["seed"], 12);
    let second = dir.path().join("second");
    stdout(&run(&[
        "pipeline",
        "run",
        "--from",
        manifest.to_str().unwrap(),
        "--out",
        second.to_str().unwrap(),
    ]));
    for rel in ["streams/test.input.txt", "models/clusters.tsv", "manifest.json"] {
        assert_eq!(
            fs::read(first.join(rel)).unwrap(),
            fs::read(second.join(rel)).unwrap(),
            "{rel}"
        );
    }
}
