use std::fs;
use std::path::{Path, PathBuf};

use matchwidth::cli::run;
use tempfile::TempDir;

struct Out {
    code: i32,
    stdout: String,
    stderr: String,
}

fn mw(args: &[&str]) -> Out {
    let mut argv = vec!["matchwidth"];
    argv.extend_from_slice(args);
    let (mut o, mut e) = (Vec::new(), Vec::new());
    let code = run(argv, &mut o, &mut e);
    Out {
        code,
        stdout: String::from_utf8(o).unwrap(),
        stderr: String::from_utf8(e).unwrap(),
    }
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

const K4: &str = "0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n";
const C6: &str = "10 11\n11 12\n12 13\n13 14\n14 15\n15 10\n";

#[test]
fn count_sub_four_cycles_in_k4() {
    let d = TempDir::new().unwrap();
    let k4 = write(d.path(), "k4.el", K4);
    for mode in ["const-space", "poly-space"] {
        let r = mw(&[
            "count-sub",
            "--pattern",
            "cycle:4",
            "--host",
            k4.to_str().unwrap(),
            "--mode",
            mode,
        ]);
        assert_eq!((r.code, r.stdout.as_str()), (0, "3\n"), "{}", r.stderr);
    }
}

#[test]
fn count_hom_matches_closed_walks() {
    let d = TempDir::new().unwrap();
    let k4 = write(d.path(), "k4.el", K4);
    // closed 4-walks in K4: trace(A^4) = 3^4 + 3 * 1
    let r = mw(&[
        "count-hom",
        "--pattern",
        "cycle:4",
        "--host",
        k4.to_str().unwrap(),
    ]);
    assert_eq!(r.stdout, "84\n");
}

#[test]
fn analyze_prints_value_then_witness() {
    let r = mw(&["analyze", "--graph", "cycle:5", "--param", "mtw"]);
    assert_eq!(r.code, 0);
    let mut lines = r.stdout.lines();
    assert_eq!(lines.next(), Some("3"));
    assert_eq!(lines.next(), Some("treedecomp n=5"));
    let r = mw(&["analyze", "--graph", "path:8", "--param", "td"]);
    assert!(r.stdout.starts_with("4\nelimtree n=8 "));
}

#[test]
fn detect_induced_exit_codes() {
    let d = TempDir::new().unwrap();
    let c6 = write(d.path(), "c6.el", C6);
    let r = mw(&[
        "detect-induced",
        "--pattern",
        "c6",
        "--host",
        c6.to_str().unwrap(),
        "--trials",
        "32",
        "--seed",
        "7",
    ]);
    assert_eq!((r.code, r.stdout.as_str()), (0, "found\n"));
    let k6: String = (0..6)
        .flat_map(|a| (a + 1..6).map(move |b| format!("{a} {b}\n")))
        .collect();
    let k6 = write(d.path(), "k6.el", &k6);
    let r = mw(&[
        "detect-induced",
        "--pattern",
        "c6",
        "--host",
        k6.to_str().unwrap(),
    ]);
    assert_eq!((r.code, r.stdout.as_str()), (1, "not-found\n"));
}

#[test]
fn output_does_not_depend_on_threads() {
    let g = mw(&["gen", "--n", "40", "--m", "120", "--seed", "3"]);
    assert_eq!(
        g.stdout,
        mw(&["gen", "--n", "40", "--m", "120", "--seed", "3"]).stdout
    );
    let d = TempDir::new().unwrap();
    let h = write(d.path(), "h.el", &g.stdout);
    let h = h.to_str().unwrap();
    for args in [
        vec![
            "count-sub",
            "--pattern",
            "cycle:6",
            "--host",
            h,
            "--mode",
            "const-space",
        ],
        vec!["count-sub", "--pattern", "named:K4-e", "--host", h],
        vec![
            "detect-induced",
            "--pattern",
            "pbar:5",
            "--host",
            h,
            "--seed",
            "11",
        ],
    ] {
        let one = mw(&[&["--threads", "1"], args.as_slice()].concat());
        let four = mw(&[&["--threads", "4"], args.as_slice()].concat());
        assert_eq!((one.code, &one.stdout), (four.code, &four.stdout));
    }
}

#[test]
fn input_errors_exit_two_with_one_line() {
    let d = TempDir::new().unwrap();
    let bad = write(d.path(), "loop.el", "0 1\n5 5\n");
    let r = mw(&[
        "count-sub",
        "--pattern",
        "cycle:4",
        "--host",
        bad.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 2);
    assert_eq!(r.stderr.lines().count(), 1);
    assert!(
        r.stderr.contains("loop.el:2: self-loop on 5"),
        "{}",
        r.stderr
    );
    let k4 = write(d.path(), "k4.el", K4);
    for args in [
        vec![
            "count-sub",
            "--pattern",
            "cycle:99",
            "--host",
            k4.to_str().unwrap(),
        ],
        vec![
            "count-sub",
            "--pattern",
            "cycle:4",
            "--host",
            "/nonexistent.el",
        ],
        vec![
            "detect-induced",
            "--pattern",
            "cycle:5",
            "--host",
            k4.to_str().unwrap(),
        ],
        vec!["spasm", "--pattern", "cycle:5", "--attach", "depth:3"],
        vec!["frobnicate"],
    ] {
        let r = mw(&args);
        assert_eq!(r.code, 2, "{args:?}");
        assert!(r.stdout.is_empty());
    }
}

#[test]
fn spasm_table_and_cache_reuse() {
    let d = TempDir::new().unwrap();
    let cache = d.path().join("c.cache");
    let r = mw(&[
        "spasm",
        "--pattern",
        "cycle:4",
        "--attach",
        "mtd:4",
        "--out",
        cache.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 0);
    assert_eq!(
        r.stdout,
        "pattern cycle:4 terms=3\nn=4 0-2 0-3 1-2 1-3 coeff 1/8 mtd=4\nn=3 0-2 1-2 coeff -1/4 mtd=2\nn=2 0-1 coeff 1/8 mtd=2\n"
    );
    let k4 = write(d.path(), "k4.el", K4);
    let args = [
        "count-sub",
        "--pattern",
        "cycle:4",
        "--host",
        k4.to_str().unwrap(),
        "--cache",
        cache.to_str().unwrap(),
    ];
    assert_eq!(mw(&args).stdout, "3\n");
    let before = fs::read_to_string(&cache).unwrap();
    assert_eq!(mw(&args).stdout, "3\n");
    assert_eq!(fs::read_to_string(&cache).unwrap(), before);
}

#[test]
fn non_integral_count_exits_three() {
    let d = TempDir::new().unwrap();
    let cache = d.path().join("c.cache");
    mw(&[
        "spasm",
        "--pattern",
        "cycle:4",
        "--out",
        cache.to_str().unwrap(),
    ]);
    let text = fs::read_to_string(&cache)
        .unwrap()
        .replace("coeff 1/8", "coeff 1/7");
    fs::write(&cache, text).unwrap();
    let k4 = write(d.path(), "k4.el", K4);
    let r = mw(&[
        "count-sub",
        "--pattern",
        "cycle:4",
        "--host",
        k4.to_str().unwrap(),
        "--cache",
        cache.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 3, "{}", r.stderr);
    assert!(r.stdout.is_empty());
}

#[test]
fn corrupt_cache_is_an_input_error() {
    let d = TempDir::new().unwrap();
    let cache = write(
        d.path(),
        "c.cache",
        "spasm-cache v1\npattern cycle:4 terms=3\n",
    );
    let k4 = write(d.path(), "k4.el", K4);
    let r = mw(&[
        "count-sub",
        "--pattern",
        "cycle:4",
        "--host",
        k4.to_str().unwrap(),
        "--cache",
        cache.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 2);
}
