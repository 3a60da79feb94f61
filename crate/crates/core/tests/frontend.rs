//! File formats, seeded generation and the command-line contract.

use std::path::Path;
use std::process::{Command, Output};

use limbel::circuit::CircuitBuilder;
use limbel::fixtures::{FATHER_TEXT, ORDER_TEXT};
use limbel::format::{parse_problem, print_problem};
use limbel::gen::{gen_random_instance, GenParams};
use limbel::netlist::{parse_circuit, to_netlist};
use limbel::reduce::{reduce_qbf, reduce_wamcs_complement, reduce_wmcs};
use limbel::solver::{decide, replay, Options};
use limbel::suites::random_qbf;

const SMALL: GenParams = GenParams { terms: 3, names: 2, clauses: 3, width: 2, level: 1 };

const GOLDEN: [(u64, &str); 5] = [
    (1, "level 1\nkb {\n  f1=n1 | f2!=n0\n  f0=n1\n  f0!=n0 | f2!=n1\n}\nquery {\n  (f0=n0 | f2=n1) & f0!=n1\n}\n"),
    (2, "level 1\nkb {\n  f0!=n0 | f0=n1\n  f1=n1 | f2=n0\n  f0!=n0\n}\nquery {\n  f0=n1 & f2=n1\n}\n"),
    (3, "level 1\nkb {\n  f0=n0 | f2=n1\n  f2!=n0\n  f0!=n1 | f1!=n0\n}\nquery {\n  (f0=n1 | f1!=n1) & (f0=n1 | f2=n1)\n}\n"),
    (42, "level 1\nkb {\n  f1=n0 | f2=n0\n  f1=n0\n  f0!=n0 | f2!=n1\n}\nquery {\n  (f0!=n1 | f1=n1) & (f1!=n1 | f2!=n1)\n}\n"),
    (2024, "level 1\nkb {\n  f0=n1 | f2=n0\n  f1!=n0 | f2!=n1\n  f0!=n1 | f2=n0\n}\nquery {\n  f1=n0 | f2!=n0\n}\n"),
];

#[test]
fn golden_seeds() {
    for (seed, text) in GOLDEN {
        let inst = gen_random_instance(seed, SMALL).unwrap();
        assert_eq!(print_problem(&inst).unwrap(), text, "seed {seed}");
    }
}

#[test]
fn generated_corpus_round_trips() {
    let p = GenParams { terms: 4, names: 3, clauses: 6, width: 3, level: 2 };
    for seed in 0..500 {
        let inst = gen_random_instance(seed, p).unwrap();
        let text = print_problem(&inst).unwrap();
        let back = parse_problem(&text).unwrap();
        assert_eq!(print_problem(&back).unwrap(), text, "seed {seed}");
        assert_eq!(back.level, inst.level);
    }
}

#[test]
fn reduced_instances_round_trip() {
    let mut reduced = Vec::new();
    for seed in 0..50 {
        reduced.push(reduce_qbf(&random_qbf(seed)).unwrap());
    }
    let c = parse_circuit("input a block 1\ninput b block 1\nor o = a b\noutput o\nweights 1\n").unwrap();
    reduced.push(reduce_wmcs(&c, 1).unwrap());
    let mut b = CircuitBuilder::new();
    let (a, x) = (b.input("a", 1).unwrap(), b.input("b", 1).unwrap());
    let (na, nb) = (b.not("na", a).unwrap(), b.not("nb", x).unwrap());
    let o = b.and("o", &[na, nb]).unwrap();
    reduced.push(reduce_wamcs_complement(&b.finish(o, vec![1]).unwrap(), 2).unwrap());
    for inst in reduced {
        let text = print_problem(&inst).unwrap();
        let back = parse_problem(&text).unwrap();
        assert_eq!(back, inst);
    }
}

#[test]
fn netlist_round_trip() {
    let c = parse_circuit("input a block 1\ninput b block 2\nnot na = a\nand g = na b\nor o = g a\noutput o\nweights 1 1\n").unwrap();
    assert_eq!(parse_circuit(&to_netlist(&c)).unwrap(), c);
}

#[test]
fn traces_replay_on_fixtures() {
    for text in [FATHER_TEXT, ORDER_TEXT] {
        let inst = parse_problem(text).unwrap();
        for level in 0..=3 {
            let inst = limbel::solver::Instance { level, ..inst.clone() };
            let v = decide(&inst, Options { memo: false, trace: true }).unwrap();
            assert_eq!(replay(&inst, &v), Ok(()));
        }
    }
}

fn limbel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_limbel")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn solve_and_oracle_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let father = write(dir.path(), "father.lb", FATHER_TEXT);
    let out = limbel(&["solve", &father]);
    assert_eq!((out.status.code(), out.stdout.as_slice()), (Some(0), b"YES\n".as_slice()));
    let out = limbel(&["solve", &father, "--level", "0"]);
    assert_eq!((out.status.code(), out.stdout.as_slice()), (Some(1), b"NO\n".as_slice()));
    let out = limbel(&["solve", &dir.path().join("missing.lb").to_string_lossy()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    let bad = write(dir.path(), "bad.lb", "kb {\n f=\n}\nquery { f=T }\n");
    assert_eq!(limbel(&["solve", &bad]).status.code(), Some(2));
    assert_eq!(limbel(&["oracle", &bad]).status.code(), Some(2));
    assert_eq!(limbel(&["oracle", &father]).status.code(), Some(0));
    let no = write(dir.path(), "no.lb", "kb {\n  f=T | g=T\n}\nquery {\n  f=T\n}\n");
    assert_eq!(limbel(&["oracle", &no]).status.code(), Some(1));
    assert_eq!(limbel(&["solve", "--bogus"]).status.code(), Some(2));
}

#[test]
fn trace_output_is_stable() {
    let dir = tempfile::tempdir().unwrap();
    let father = write(dir.path(), "father.lb", FATHER_TEXT);
    let a = limbel(&["solve", &father, "--trace"]);
    let b = limbel(&["solve", &father, "--trace", "--memo"]);
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.starts_with("YES\nbelief 1 yes\n  split fatherOf(Sally)\n"), "{text}");
    for name in ["Frank", "Fred", "@fresh"] {
        assert!(text.contains(&format!("case {name}")), "{text}");
    }
}

#[test]
fn reduce_then_solve() {
    let dir = tempfile::tempdir().unwrap();
    let qbf = write(dir.path(), "q.qdimacs", "p cnf 2 2\na 1 0\ne 2 0\n1 -2 0\n-1 2 0\n");
    let out_path = dir.path().join("q.lb");
    let out = limbel(&["reduce", "qbf", &qbf, "-o", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    // forall x1 exists x2 (x1 <-> x2) is true.
    assert_eq!(limbel(&["solve", out_path.to_str().unwrap()]).status.code(), Some(0));

    let net = write(dir.path(), "c.net", "input a block 1\ninput b block 1\nand o = a b\noutput o\nweights 1\n");
    let lb = dir.path().join("c.lb");
    let lb = lb.to_str().unwrap();
    assert_eq!(limbel(&["reduce", "circuit", &net, "--mode", "wmcs", "-o", lb]).status.code(), Some(0));
    assert_eq!(limbel(&["solve", lb]).status.code(), Some(1));
    assert_eq!(limbel(&["reduce", "circuit", &net, "--mode", "wamcs", "-o", lb]).status.code(), Some(2));
    assert_eq!(limbel(&["reduce", "circuit", &net, "--mode", "qmcs", "-o", lb]).status.code(), Some(0));
}

#[test]
fn gen_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.lb"), dir.path().join("b.lb"));
    for p in [&a, &b] {
        let out = limbel(&[
            "gen", "--seed", "42", "--terms", "3", "--names", "2", "--clauses", "3", "--width", "2", "--level", "1",
            "-o", p.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    assert_eq!(text, GOLDEN[3].1);
    let out = limbel(&["gen", "--seed", "1", "--terms", "0", "--names", "2", "--clauses", "3", "--width", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bench_and_check() {
    let out = limbel(&["bench", "--grid", "sizes=4,8 levels=0,1 seeds=2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "seed,terms,names,clauses,k,answer,wall_ns,closures");
    assert_eq!(lines.len(), 1 + 2 * 2 * 2);
    assert!(lines[1..].iter().all(|l| l.split(',').count() == 8));
    assert_eq!(limbel(&["bench", "--grid", "levels=1"]).status.code(), Some(2));

    let out = limbel(&["check", "lemmas", "--suite", "qbf", "--seed", "3", "--count", "10"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("qbf: "));
    assert_eq!(limbel(&["check", "lemmas", "--suite", "nope"]).status.code(), Some(2));
}
