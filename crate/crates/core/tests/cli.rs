mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use common::*;
use cyclecover::graph::{edge_list_string, read_edge_list};
use cyclecover::qubo::{encode, QuboProblem};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cyclecover"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}

fn p(x: &Path) -> &str {
    x.to_str().unwrap()
}

fn write_fig1(dir: &Path) -> (PathBuf, PathBuf) {
    let g = fig1();
    let graph = path(dir, "fig1.el");
    let sol = path(dir, "fig1_solution.el");
    std::fs::write(&graph, edge_list_string(&g)).unwrap();
    std::fs::write(&sol, edge_list_string(&g.subgraph(FIG1_COVER).unwrap())).unwrap();
    (graph, sol)
}

#[test]
fn gen_reference_instance() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "g.el");
    let o = run(&["gen", "--n", "3", "--L", "4", "--n-noise", "6", "--seed", "7", "-o", p(&out)]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "12 18 6\n");
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("12 18\n"));
    let g = read_edge_list(text.as_bytes()).unwrap();
    assert_eq!(g.num_edges(), 18);
    // Byte-identical rewrite.
    assert_eq!(edge_list_string(&g), text);
}

#[test]
fn gen_triangle_and_bad_params() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "t.el");
    let o = run(&["gen", "--n", "1", "--L", "3", "--n-noise", "0", "-o", p(&out)]);
    assert!(o.status.success());
    assert_eq!(std::fs::read_to_string(&out).unwrap(), "3 3\n0 1\n1 2\n2 0\n");

    let o = run(&["gen", "--n", "1", "--L", "2", "--n-noise", "0", "-o", p(&out)]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["gen", "--n", "1", "--L", "3", "--n-noise", "4", "-o", p(&out)]);
    assert_eq!(o.status.code(), Some(2));
    // Both or neither noise flag.
    let o = run(&["gen", "--n", "1", "--L", "3", "--n-noise", "0", "--p-noise", "0", "-o", p(&out)]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["gen", "--n", "1", "--L", "3", "-o", p(&out)]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["gen", "--n", "1", "--L", "3", "--n-noise", "0", "--bogus", "-o", p(&out)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn gen_with_fraction() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "g.el");
    // 0.01 * 40 * 38 = 15.2 -> 15
    let o = run(&["gen", "--n", "10", "--L", "4", "--p-noise", "0.01", "--seed", "3", "-o", p(&out)]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "40 55 15\n");
}

#[test]
fn check_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let (graph, sol) = write_fig1(dir.path());
    let o = run(&["check", "-i", p(&graph), "-s", p(&sol)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "accepted\n");

    let o = run(&["check", "-i", p(&graph), "-s", p(&graph)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("vertex-without-unique-out-edge"));

    let foreign = path(dir.path(), "foreign.el");
    std::fs::write(&foreign, "3 3\n1 2\n2 3\n3 1\n").unwrap();
    let o = run(&["check", "-i", p(&graph), "-s", p(&foreign)]);
    assert_eq!(o.status.code(), Some(2));

    let two = path(dir.path(), "two.el");
    std::fs::write(&two, "2 2\n0 1\n1 0\n").unwrap();
    let o = run(&["check", "-i", p(&two), "-s", p(&two)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("two-cycle"));
}

#[test]
fn encode_exact_and_oracle_on_fig1() {
    let dir = tempfile::tempdir().unwrap();
    let (graph, _) = write_fig1(dir.path());
    let qfile = path(dir.path(), "fig1.qubo");
    let o = run(&["encode", "-i", p(&graph), "-o", p(&qfile)]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&qfile).unwrap();
    let q = QuboProblem::read_text(text.as_bytes()).unwrap();
    assert_eq!(q, encode(&fig1(), 1.0).unwrap());

    let csv = path(dir.path(), "exact.csv");
    let o = run(&["exact", "-i", p(&qfile), "-o", p(&csv)]);
    assert!(o.status.success());
    let rows = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = rows.lines().collect();
    assert_eq!(lines[0], "energy,count,bits");
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("-7,1,"));

    let cover = path(dir.path(), "cover.el");
    let o = run(&["oracle", "-i", p(&graph), "--limit", "10", "-o", p(&cover)]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("1 cover(s)"));
    let c = read_edge_list(std::fs::read_to_string(&cover).unwrap().as_bytes()).unwrap();
    assert_eq!(c.labeled_edges(), fig1().subgraph(FIG1_COVER).unwrap().labeled_edges());

    let two = path(dir.path(), "two.el");
    std::fs::write(&two, "2 2\n0 1\n1 0\n").unwrap();
    assert_eq!(run(&["oracle", "-i", p(&two)]).status.code(), Some(1));
}

#[test]
fn exact_refuses_large_problems() {
    let dir = tempfile::tempdir().unwrap();
    let g = path(dir.path(), "big.el");
    let q = path(dir.path(), "big.qubo");
    let o = run(&["gen", "--n", "4", "--L", "5", "--n-noise", "20", "-o", p(&g)]);
    assert!(o.status.success());
    assert!(run(&["encode", "-i", p(&g), "-o", p(&q)]).status.success());
    let o = run(&["exact", "-i", p(&q)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("30 variables"));
}

#[test]
fn sample_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (graph, _) = write_fig1(dir.path());
    let q = path(dir.path(), "fig1.qubo");
    assert!(run(&["encode", "-i", p(&graph), "-o", p(&q)]).status.success());
    let a = run(&["sample", "-i", p(&q), "--shots", "30", "--sweeps", "200", "--seed", "5"]);
    let b = run(&["sample", "-i", p(&q), "--shots", "30", "--sweeps", "200", "--seed", "5"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let out = stdout(&a);
    assert!(out.starts_with("energy,count,bits\n-7,"));
    let total: usize = out.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse::<usize>().unwrap()).sum();
    assert_eq!(total, 30);
}

#[test]
fn tts_command() {
    let o = run(&["tts", "--p", "0.99"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "300.00 µs\n");
    let o = run(&["tts", "--p", "0.75"]);
    assert_eq!(stdout(&o), "996.58 µs\n");
    let o = run(&["tts", "--p", "0"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["tts", "--p", "1"]);
    assert!(stdout(&o).contains("300.00 µs"));
    assert_eq!(run(&["tts", "--p", "1.5"]).status.code(), Some(2));
}

#[test]
fn experiment_csv_and_fit() {
    let dir = tempfile::tempdir().unwrap();
    let csv = path(dir.path(), "res.csv");
    let o = run(&[
        "experiment", "--n", "2", "--L", "3", "--n-noise", "0,2", "--sampler", "exact", "--shots", "10",
        "--reps", "3", "-o", p(&csv),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,L,N_V,N_E,p_noise,N_noise,shots,reps,p_sol_mean,p_sol_sem,tts_ms");
    assert_eq!(lines[1], "2,3,6,6,0,0,10,3,1,0,0.3");
    assert!(lines[2].starts_with("2,3,6,8,"));

    let fit_in = path(dir.path(), "fit.csv");
    let mut rows = String::from("n,L,N_V,N_E,p_noise,N_noise,shots,reps,p_sol_mean,p_sol_sem,tts_ms\n");
    for n in [300u64, 400, 500, 600] {
        let ms = (1.0f64 + 0.005 * n as f64).exp();
        rows.push_str(&format!("1,4,1000,{},0,{n},100,50,0.5,0.01,{ms}\n", 1000 + n));
    }
    rows.push_str("1,4,1000,1700,0,700,100,50,0,0,\n");
    std::fs::write(&fit_in, rows).unwrap();
    let o = run(&["fit", "-i", p(&fit_in), "--model", "exp"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let line = out.lines().nth(1).unwrap();
    let f: Vec<&str> = line.split(',').collect();
    assert_eq!(f[0], "exp");
    assert!((f[1].parse::<f64>().unwrap() - 1.0).abs() < 1e-9);
    assert!((f[2].parse::<f64>().unwrap() - 0.005).abs() < 1e-12);
    assert!(String::from_utf8_lossy(&o.stderr).contains("skipped 1"));

    let o = run(&["fit", "-i", p(&fit_in), "--model", "power", "--min-noise", "600"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn version_and_help_everywhere() {
    for sub in ["gen", "encode", "sample", "exact", "check", "oracle", "experiment", "tts", "fit"] {
        let o = run(&[sub, "--version"]);
        assert!(o.status.success(), "{sub} --version");
        assert!(stdout(&o).contains(env!("CARGO_PKG_VERSION")));
        assert!(run(&[sub, "--help"]).status.success(), "{sub} --help");
    }
}

#[test]
fn pipeline_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let mut artifacts = Vec::new();
    for round in 0..2 {
        let g = path(dir.path(), &format!("g{round}.el"));
        let q = path(dir.path(), &format!("q{round}.qubo"));
        let s = path(dir.path(), &format!("s{round}.csv"));
        assert!(run(&["gen", "--n", "4", "--L", "4", "--n-noise", "5", "--seed", "21", "-o", p(&g)]).status.success());
        assert!(run(&["encode", "-i", p(&g), "-o", p(&q)]).status.success());
        assert!(run(&["sample", "-i", p(&q), "--shots", "20", "--sweeps", "100", "--seed", "3", "-o", p(&s)]).status.success());
        artifacts.push([g, q, s].map(|f| std::fs::read(f).unwrap()));
    }
    assert_eq!(artifacts[0], artifacts[1]);
}
