//! Exact sizes of the reductions and the gadget, and symbol hygiene.

use limbel::circuit::{Circuit, Gate};
use limbel::format::parse_formula;
use limbel::gadget::{build_ordering, build_split_early, Block};
use limbel::lang::{is_generated_symbol, Name, Term};
use limbel::netlist::parse_circuit;
use limbel::qbf::{parse_qdimacs, Quantifier};
use limbel::reduce::{reduce_qbf, reduce_qmcs, reduce_wamcs_complement, reduce_wmcs};
use limbel::solver::Instance;
use limbel::suites::random_qbf;

/// Clauses added by a chained gadget whose stage `s` (from 1) has `l[s-1]` literals.
fn gadget_clauses(l: &[usize]) -> usize {
    l.iter().enumerate().map(|(i, n)| n * (i + 2)).sum()
}

fn generated(inst: &Instance) -> usize {
    inst.terms().iter().filter(|t| is_generated_symbol(t.symbol().as_str())).count()
}

#[test]
fn qbf_sizes() {
    for seed in 0..200 {
        let q = random_qbf(seed);
        let inst = reduce_qbf(&q).unwrap();
        let k = q.prefix().len();
        let e = q.prefix().iter().filter(|(kind, _)| *kind == Quantifier::Exists).count();
        // Stage 1 is the innermost quantifier.
        let l: Vec<usize> = q
            .prefix()
            .iter()
            .rev()
            .map(|(kind, _)| if *kind == Quantifier::Exists { 2 } else { 1 })
            .collect();
        assert_eq!(inst.kb.len(), gadget_clauses(&l), "seed {seed}");
        assert_eq!(inst.level as usize, k);
        assert_eq!(generated(&inst), k * k);
        // x/nx terms mentioned only in the query still count.
        let user: Vec<Term> = inst.terms().into_iter().filter(|t| !is_generated_symbol(t.symbol().as_str())).collect();
        assert_eq!(user.len(), (k - e) + 2 * e, "seed {seed}");
    }
}

#[test]
fn smallest_qbf_exact_clauses() {
    let q = parse_qdimacs("p cnf 1 1\na 1 0\n1 0\n").unwrap();
    let inst = reduce_qbf(&q).unwrap();
    let text: Vec<String> = inst.kb.iter().map(|c| c.to_string()).collect();
    assert_eq!(text, ["@o1_1=@t | x1=W", "@o1_1=@t | x1!=W"]);
    assert_eq!(inst.query.to_string(), "@o1_1=@t & (x1=W | (x1=W | x1=T))");
}

fn gate_clauses(c: &Circuit, per_and: fn(usize) -> usize, per_or: fn(usize) -> usize) -> usize {
    c.nodes()
        .iter()
        .map(|n| match &n.gate {
            Gate::And(a) => per_and(a.len()),
            Gate::Or(a) => per_or(a.len()),
            _ => 0,
        })
        .sum()
}

const QMCS: &str = "\
input a block 1
input b block 1
input c block 2
input d block 2
input e block 3
and g1 = a c
and g2 = b d e
or o = g1 g2 e
output o
weights 2 1 1
";

#[test]
fn qmcs_sizes() {
    let c = parse_circuit(QMCS).unwrap();
    let inst = reduce_qmcs(&c).unwrap();
    // Blocks 1 and 3 universal, block 2 existential.
    let (x1, x2, x3) = (2, 2, 1);
    let (k1, k2, k3) = (2, 1, 1);
    let base = k1 * (x1 + 1) + k2 * x2 + k3 * (x3 + 1) + gate_clauses(&c, |_| 1, |n| n);
    // Selections in split-last-first order: (3,1), (2,1), (1,2), (1,1).
    let l = [1, x2, 1, 1];
    assert_eq!(inst.kb.len(), base + gadget_clauses(&l));
    let total_k = k1 + k2 + k3;
    assert_eq!(inst.level as usize, total_k);
    assert_eq!(generated(&inst), total_k * total_k);
    let selectors = k1 + k2 * x2 + k3;
    assert_eq!(inst.terms().len(), c.nodes().len() + selectors + total_k * total_k);
    let names: Vec<&str> = inst.names().iter().map(|n| n.as_str()).collect();
    assert_eq!(names, ["@t", "T", "W", "nv_a", "nv_b", "nv_e"]);
}

#[test]
fn wmcs_sizes() {
    let c = parse_circuit("input a block 1\ninput b block 1\ninput c block 1\nand g = a b\nor o = g c\noutput o\nweights 2\n").unwrap();
    for k in 1..=3usize {
        let inst = reduce_wmcs(&c, k as u32).unwrap();
        let base = k * 3 + gate_clauses(&c, |_| 1, |n| n);
        assert_eq!(inst.kb.len(), base + gadget_clauses(&vec![3; k]));
        assert_eq!(generated(&inst), k * k);
        let names: Vec<&str> = inst.names().iter().map(|n| n.as_str()).collect();
        assert_eq!(names, ["@t", "T"]);
    }
}

#[test]
fn wamcs_sizes() {
    let c = parse_circuit("input a block 1\ninput b block 1\ninput c block 1\nnot na = a\nnot nb = b\nnot nc = c\nor g = na nb\nand o = g nc\noutput o\nweights 1\n").unwrap();
    let m = 3;
    for k in 0..=3usize {
        let inst = reduce_wamcs_complement(&c, k as u32).unwrap();
        let base = k * (m + 1) + k * k.saturating_sub(1) / 2 * m + gate_clauses(&c, |n| n, |_| 1);
        assert_eq!(inst.kb.len(), base + gadget_clauses(&vec![1; k]), "k={k}");
        assert_eq!(inst.level as usize, k);
        assert_eq!(generated(&inst), k * k);
    }
}

#[test]
fn gadget_symbols_stay_apart_from_input() {
    let s = limbel::fixtures::father_kb();
    let alpha = parse_formula("rich(Frank)=T").unwrap();
    let t = |x: &str| Term::constant(x);
    let blocks = vec![
        Block::new(vec![t("p")], vec![t("p").eq_name(Name::new("T"))], vec![Name::new("T")]).unwrap(),
        Block::new(vec![t("q"), t("r")], vec![t("q").neq_name(Name::new("W")), t("r").eq_name(Name::new("T"))], vec![]).unwrap(),
    ];
    for k in 0..=2u32 {
        let out = build_ordering(&s, &blocks, &alpha, k).unwrap();
        let input = Instance { kb: s.clone(), query: alpha.clone(), level: 0 }.terms();
        for g in out.registry.generated_terms() {
            assert!(!input.contains(&g));
            assert!(is_generated_symbol(g.symbol().as_str()));
        }
        let l: Vec<usize> = blocks[..k as usize].iter().map(|b| b.literals().len()).collect();
        assert_eq!(out.clauses.len(), s.len() + gadget_clauses(&l));
    }
    for k in 1..=3u32 {
        let out = build_split_early(&s, &blocks[1], k, &alpha).unwrap();
        assert_eq!(out.clauses.len(), s.len() + 2 * (k as usize + 1));
        assert_eq!(out.registry.generated_terms().count(), 2 * k as usize - 1);
    }
}
