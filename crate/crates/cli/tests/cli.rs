use std::path::{Path, PathBuf};

use robust_stable::fixtures::{EXAMPLE_A, EXAMPLE_ERROR};
use robust_stable::oracle::enumerate_stable;
use robust_stable::Instance;
use robust_stable_cli::{run, EXIT_DOMAIN, EXIT_IO, EXIT_USAGE, NO_ROBUST};
use tempfile::TempDir;

struct Output {
    code: i32,
    out: String,
    err: String,
}

fn cli(args: &[&str]) -> Output {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("robust-stable").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    Output {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn file(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn example_files() -> (TempDir, PathBuf, PathBuf) {
    let dir = TempDir::new().unwrap();
    let a = file(&dir, "a.txt", EXAMPLE_A);
    let e = file(&dir, "e.txt", EXAMPLE_ERROR);
    (dir, a, e)
}

#[test]
fn solve_prints_the_optimal_matchings() {
    let (_d, a, _) = example_files();
    let boys = cli(&["solve", "--instance", s(&a), "--side", "boys"]);
    assert_eq!((boys.code, boys.out.as_str()), (0, "{a1,b2,c3,d4}\n"));
    let girls = cli(&["solve", "--instance", s(&a), "--side", "girls"]);
    assert_eq!(girls.out, "{a2,b1,c4,d3}\n");
}

#[test]
fn robust_on_the_example() {
    let (_d, a, e) = example_files();
    let r = cli(&["robust", "--instance", s(&a), "--errors", s(&e)]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert_eq!(r.out, "{a1,b2,c3,d4}\n");
    assert!(r.err.is_empty());

    let traced = cli(&["robust", "--instance", s(&a), "--errors", s(&e), "--trace"]);
    assert_eq!(traced.out, r.out);
    assert!(traced.err.contains("edges (1,2) (1,3)"), "{}", traced.err);
}

#[test]
fn robust_reports_an_empty_set() {
    let (d, a, _) = example_files();
    let e = file(&d, "two.txt", "girl 1: c a b d\nboy 1: 2 1 3 4\n");
    let r = cli(&["robust", "--instance", s(&a), "--errors", s(&e)]);
    assert_eq!(r.code, EXIT_DOMAIN);
    assert_eq!(r.out.trim(), NO_ROBUST);
}

#[test]
fn robust_with_weights() {
    let (d, a, _) = example_files();
    let none = file(&d, "none.txt", "# no errors\n");
    let w = file(&d, "w.txt", "0 5 0 0\n5 0 0 0\n0 0 0 1\n0 0 1 0\n");
    let best = cli(&["robust", "--instance", s(&a), "--errors", s(&none), "--weights", s(&w)]);
    assert_eq!(best.code, 0, "{}", best.err);
    assert_eq!(best.out, "{a2,b1,c4,d3}\nweight 12\n");
    let worst = cli(&["robust", "--instance", s(&a), "--errors", s(&none), "--weights", s(&w), "--minimize"]);
    assert_eq!(worst.out, "{a1,b2,c3,d4}\nweight 0\n");
    let lonely = cli(&["robust", "--instance", s(&a), "--errors", s(&none), "--minimize"]);
    assert_eq!(lonely.code, EXIT_USAGE);
}

#[test]
fn bouquet_prints_flowers() {
    let (_d, a, e) = example_files();
    let r = cli(&["bouquet", "--instance", s(&a), "--error", s(&e), "--trace"]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert_eq!(r.out, "1: 2 3\n");
    for key in ["S = ", "V = ", "X = ", "Y = "] {
        assert!(r.err.contains(key), "trace lacks {key}: {}", r.err);
    }
}

#[test]
fn poset_output_feeds_compress() {
    let (d, a, _) = example_files();
    let p = cli(&["poset", "--instance", s(&a)]);
    assert_eq!(p.code, 0);
    assert!(p.out.contains("2: (1,1) (2,2)\n3: (3,3) (4,4)\n"), "{}", p.out);
    assert_eq!(p.out, cli(&["poset", "--instance", s(&a)]).out);
    let pf = file(&d, "p.txt", &p.out);

    let merge = file(&d, "merge.txt", "3 2\n2 3\n");
    let c = cli(&["compress", "--poset", s(&pf), "--edges", s(&merge)]);
    assert_eq!(c.code, 0, "{}", c.err);
    assert!(c.out.contains("blocks 3\n"), "{}", c.out);
    assert!(c.out.contains(": 2 3\n"), "{}", c.out);

    let redundant = file(&d, "red.txt", "2 0\n1 0\n");
    let m = cli(&["compress", "--poset", s(&pf), "--edges", s(&redundant), "--minimize", "--trace"]);
    assert_eq!(m.code, 0, "{}", m.err);
    assert!(m.err.contains("kept 1 of 2"), "{}", m.err);
    assert!(m.out.contains("blocks 1\n"));

    let outside = file(&d, "bad.txt", "0 9\n");
    assert_eq!(cli(&["compress", "--poset", s(&pf), "--edges", s(&outside)]).code, EXIT_DOMAIN);
}

#[test]
fn enumerate_lists_every_matching() {
    let (_d, a, _) = example_files();
    let r = cli(&["enumerate", "--instance", s(&a)]);
    assert_eq!(r.out.lines().count(), 4);
    assert_eq!(cli(&["enumerate", "--instance", s(&a), "--bound", "3"]).code, EXIT_DOMAIN);
}

#[test]
fn gen_is_deterministic() {
    let one = cli(&["gen", "--n", "6", "--seed", "7"]);
    let two = cli(&["gen", "--n", "6", "--seed", "7"]);
    assert_eq!(one.code, 0);
    assert_eq!(one.out.as_bytes(), two.out.as_bytes());
    assert_ne!(one.out, cli(&["gen", "--n", "6", "--seed", "8"]).out);
    assert_eq!(Instance::parse(&one.out).unwrap().n(), 6);
}

#[test]
fn gen_modes() {
    let count = |mode: &str, n: &str| {
        let r = cli(&["gen", "--n", n, "--seed", "3", "--mode", mode]);
        enumerate_stable(&Instance::parse(&r.out).unwrap()).unwrap().len()
    };
    assert_eq!(count("master-list", "4"), 1);
    assert_eq!(count("adversarial-swap", "3"), 3);
    assert_eq!(count("uniform", "1"), 1);
    assert_eq!(cli(&["gen", "--n", "4", "--mode", "zigzag"]).code, EXIT_USAGE);
}

#[test]
fn exit_codes() {
    let (d, a, e) = example_files();
    assert_eq!(cli(&[]).code, EXIT_USAGE);
    assert_eq!(cli(&["frobnicate"]).code, EXIT_USAGE);
    assert_eq!(cli(&["solve"]).code, EXIT_USAGE);
    assert_eq!(cli(&["--help"]).code, 0);

    let missing = d.path().join("missing.txt");
    let r = cli(&["solve", "--instance", s(&missing)]);
    assert_eq!(r.code, EXIT_IO);
    assert!(r.err.contains("missing.txt"));

    let bad = file(&d, "bad.txt", "2\n1 2\n1 1\n1 2\n2 1\n");
    assert_eq!(cli(&["solve", "--instance", s(&bad)]).code, EXIT_DOMAIN);
    let bad_err = file(&d, "bad_err.txt", "girl 9: a b c d\n");
    assert_eq!(cli(&["robust", "--instance", s(&a), "--errors", s(&bad_err)]).code, EXIT_DOMAIN);
    let two = file(&d, "two.txt", "girl 1: c a b d\ngirl 2: a b c d\n");
    assert_eq!(cli(&["bouquet", "--instance", s(&a), "--error", s(&two)]).code, EXIT_DOMAIN);
    let short = file(&d, "w.txt", "1 2\n");
    assert_eq!(
        cli(&["robust", "--instance", s(&a), "--errors", s(&e), "--weights", s(&short)]).code,
        EXIT_DOMAIN
    );
}
