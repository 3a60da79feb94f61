//! Seeded property suites that check the engine, the gadget and the
//! reductions against independent brute-force oracles. Case `i` of a run
//! with seed `s` draws from its own generator seeded with `s + i`, so any
//! failing case can be replayed alone.

use std::fmt;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::circuit::{qwcs_eval, subsets_of_size, Circuit, CircuitBuilder, Gate, WeightMode};
use crate::engine::Setup;
use crate::gadget::{build_ordering, build_split_early, verify_gadget_preconditions, Block};
use crate::gen::{gen_random_instance, GenParams};
use crate::lang::{Clause, Formula, Literal, Name, Term};
use crate::oracle::entails;
use crate::qbf::{Qbf, Quantifier};
use crate::reduce::{reduce_qbf, reduce_qmcs, reduce_wamcs_complement, reduce_wmcs};
use crate::solver::{decide, holds, Instance, Options, SplitContext};
use crate::threshold::{monotonize, threshold_subcircuit};

pub const SUITES: &[&str] = &[
    "monotonicity",
    "stabilization",
    "soundness",
    "completeness",
    "lemmas",
    "gadget",
    "qbf",
    "threshold",
    "monotonize",
    "qmcs",
    "wmcs",
    "wamcs",
    "weights",
];

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub suite: String,
    pub cases: usize,
    pub skipped: usize,
    /// One line per failing case.
    pub failures: Vec<String>,
    /// Informational lines that do not count as failures.
    pub notes: Vec<String>,
}

impl Report {
    fn new(suite: &str) -> Report {
        Report {
            suite: suite.to_string(),
            ..Report::default()
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn check(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures.push(describe());
        }
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} cases, {} passed, {} failed",
            self.suite,
            self.cases,
            self.cases - self.failures.len(),
            self.failures.len()
        )?;
        if self.skipped > 0 {
            write!(f, ", {} skipped", self.skipped)?;
        }
        Ok(())
    }
}

/// Runs suite `name`; `None` for an unknown name.
pub fn run_suite(name: &str, seed: u64, count: usize) -> Option<Report> {
    Some(match name {
        "monotonicity" => monotonicity(seed, count),
        "stabilization" => stabilization(seed, count),
        "soundness" => soundness(seed, count),
        "completeness" => completeness(seed, count),
        "lemmas" => lemmas(seed, count),
        "gadget" => gadget(seed, count),
        "qbf" => qbf(seed, count),
        "threshold" => threshold(8),
        "monotonize" => monotonize_suite(seed, count),
        "qmcs" => qmcs(seed, count),
        "wmcs" => wmcs(seed, count),
        "wamcs" => wamcs(seed, count),
        "weights" => weight_modes(seed, count),
        _ => return None,
    })
}

struct Pick(ChaCha8Rng);

impl Pick {
    fn new(seed: u64) -> Pick {
        Pick(ChaCha8Rng::seed_from_u64(seed))
    }

    fn below(&mut self, n: usize) -> usize {
        (self.0.next_u64() % n as u64) as usize
    }

    /// Uniform in `lo..=hi`.
    fn range(&mut self, lo: usize, hi: usize) -> usize {
        lo + self.below(hi - lo + 1)
    }

    fn coin(&mut self) -> bool {
        self.below(2) == 0
    }

    fn choose<T: Copy>(&mut self, items: &[T]) -> T {
        items[self.below(items.len())]
    }

    /// `n` distinct items, in draw order.
    fn distinct<T: Copy>(&mut self, items: &[T], n: usize) -> Vec<T> {
        let mut pool = items.to_vec();
        (0..n).map(|_| pool.remove(self.below(pool.len()))).collect()
    }
}

const MEMO: Options = Options { memo: true, trace: false };

fn answer(inst: &Instance) -> bool {
    decide(inst, MEMO).expect("generated instances are valid").answer
}

fn at_level(inst: &Instance, level: u32) -> Instance {
    Instance {
        level,
        ..inst.clone()
    }
}

fn oracle(inst: &Instance) -> bool {
    entails(&inst.kb, &inst.query).expect("objective query")
}

/// Small random engine instance: at most 4 terms, 3 names, 6 clauses of
/// width 3.
pub fn lemma_instance(seed: u64) -> Instance {
    let mut p = Pick::new(seed ^ 0x5eed_0f1e55);
    let params = GenParams {
        terms: p.range(1, 4),
        names: p.range(1, 3),
        clauses: p.range(0, 6),
        width: p.range(1, 3),
        level: 0,
    };
    gen_random_instance(seed, params).expect("params in range")
}

fn show(inst: &Instance) -> String {
    let kb: Vec<String> = inst.kb.iter().map(|c| c.to_string()).collect();
    format!("kb [{}] query {}", kb.join("; "), inst.query)
}

/// YES at level k implies YES at k + 1, for k in 0..=2.
pub fn monotonicity(seed: u64, count: usize) -> Report {
    let mut r = Report::new("monotonicity");
    for i in 0..count as u64 {
        let inst = lemma_instance(seed + i);
        let answers: Vec<bool> = (0..=3).map(|k| answer(&at_level(&inst, k))).collect();
        for k in 0..3 {
            r.check(!answers[k] || answers[k + 1], || {
                format!("seed {}: YES at {k} but NO at {}: {}", seed + i, k + 1, show(&inst))
            });
        }
    }
    r
}

/// Level |F| and |F| + 1 agree.
pub fn stabilization(seed: u64, count: usize) -> Report {
    let mut r = Report::new("stabilization");
    for i in 0..count as u64 {
        let inst = lemma_instance(seed + i);
        let f = inst.terms().len() as u32;
        let (a, b) = (answer(&at_level(&inst, f)), answer(&at_level(&inst, f + 1)));
        r.check(a == b, || format!("seed {}: level {f} {a}, level {} {b}: {}", seed + i, f + 1, show(&inst)));
    }
    r
}

/// YES at any level in 0..=2 implies classical entailment.
pub fn soundness(seed: u64, count: usize) -> Report {
    let mut r = Report::new("soundness");
    for i in 0..count as u64 {
        let inst = lemma_instance(seed + i);
        let truth = oracle(&inst);
        for k in 0..=2 {
            let yes = answer(&at_level(&inst, k));
            r.check(!yes || truth, || format!("seed {}: YES at {k} but not entailed: {}", seed + i, show(&inst)));
        }
    }
    r
}

/// At level |F| the answer equals classical entailment.
pub fn completeness(seed: u64, count: usize) -> Report {
    let mut r = Report::new("completeness");
    let mut yes = 0;
    for i in 0..count as u64 {
        let inst = lemma_instance(seed + i);
        let f = inst.terms().len() as u32;
        let (a, truth) = (answer(&at_level(&inst, f)), oracle(&inst));
        yes += a as usize;
        r.check(a == truth, || format!("seed {}: level {f} says {a}, oracle {truth}: {}", seed + i, show(&inst)));
    }
    r.notes.push(format!("{yes} of {count} instances entailed"));
    r
}

/// All four engine properties over one corpus.
pub fn lemmas(seed: u64, count: usize) -> Report {
    let mut r = Report::new("lemmas");
    for part in [
        monotonicity(seed, count),
        stabilization(seed, count),
        soundness(seed, count),
        completeness(seed, count),
    ] {
        r.cases += part.cases;
        r.notes.push(part.to_string());
        r.notes.extend(part.notes);
        r.failures.extend(part.failures.into_iter().map(|f| format!("{}: {f}", part.suite)));
    }
    r
}

const POOL_TERMS: [&str; 4] = ["a", "b", "c", "d"];
const POOL_NAMES: [&str; 2] = ["T", "U"];

fn pool_literal(p: &mut Pick, terms: &[Term]) -> Literal {
    let t = p.choose(terms);
    let n = Name::new(p.choose(&POOL_NAMES));
    Literal::new(t, n, p.coin())
}

fn pool_block(p: &mut Pick, terms: &[Term]) -> Block {
    let domain: Vec<Name> = POOL_NAMES.iter().map(|n| Name::new(n)).collect();
    let lits = terms
        .iter()
        .map(|&t| Literal::new(t, Name::new(p.choose(&POOL_NAMES)), p.coin()))
        .collect();
    Block::new(terms.to_vec(), lits, domain).expect("one literal per term")
}

/// `∃t ∈ F_i ∀n ... s ∪ {t_1 = n_1, …} ⊨ B_rest phi`, evaluated directly on
/// the original setup without any gadget clauses.
fn nested_splits(s: &Setup, blocks: &[&Block], phi: &Formula, rest: u32, ctx: &SplitContext) -> bool {
    match blocks.split_last() {
        None => {
            let goal = Formula::believe(rest, phi.clone()).expect("objective");
            holds(s, &goal, ctx).expect("valid")
        }
        Some((last, earlier)) => last.terms().iter().any(|&t| {
            ctx.names
                .iter()
                .all(|&n| nested_splits(&s.assert_unit(t.eq_name(n)), earlier, phi, rest, ctx))
        }),
    }
}

fn escape(blocks: &[&Block], alpha: &Formula) -> Formula {
    let c = Clause::new(blocks.iter().flat_map(|b| b.negated_clause().literals().to_vec()));
    Formula::or(Formula::from_clause(&c).expect("non-empty"), alpha.clone())
}

/// The gadget's bi-implications: one block at k in {1, 2}, or two blocks
/// chained at k in {1, 2}. Configurations that miss the side condition are
/// skipped.
pub fn gadget(seed: u64, count: usize) -> Report {
    let mut r = Report::new("gadget");
    let pool: Vec<Term> = POOL_TERMS.iter().map(|t| Term::constant(t)).collect();
    let (mut yes, mut attempts) = (0, 0u64);
    while r.cases < count {
        let case_seed = seed + attempts;
        attempts += 1;
        let mut p = Pick::new(case_seed);
        let chained = p.coin();
        let k = p.range(1, 2) as u32;
        let s: Vec<Clause> = (0..p.range(0, 3))
            .map(|_| Clause::new((0..p.range(1, 2)).map(|_| pool_literal(&mut p, &pool))))
            .collect();
        let alpha = Formula::lit(pool_literal(&mut p, &pool));
        let mut shuffled = p.distinct(&pool, 4);
        let n1 = p.range(1, 2);
        let first = pool_block(&mut p, &shuffled.drain(..n1).collect::<Vec<_>>());
        let blocks = if chained {
            let n2 = p.range(1, 2);
            vec![first, pool_block(&mut p, &shuffled[..n2])]
        } else {
            vec![first]
        };
        if !verify_gadget_preconditions(&s, &blocks) {
            r.skipped += 1;
            continue;
        }
        let (lhs, rhs) = if chained {
            let out = build_ordering(&s, &blocks, &alpha, k).expect("well-formed");
            let lhs = answer(&Instance { kb: out.clauses, query: out.query, level: out.level });
            let used: Vec<&Block> = blocks[..k as usize].iter().collect();
            let phi = escape(&used, &alpha);
            let ctx = SplitContext::for_parts(&s, &phi);
            (lhs, nested_splits(&Setup::close(s.clone()), &used, &phi, 0, &ctx))
        } else {
            let out = build_split_early(&s, &blocks[0], k, &alpha).expect("well-formed");
            let lhs = answer(&Instance { kb: out.clauses, query: out.query, level: out.level });
            let phi = escape(&[&blocks[0]], &alpha);
            let ctx = SplitContext::for_parts(&s, &phi);
            (lhs, nested_splits(&Setup::close(s.clone()), &[&blocks[0]], &phi, k - 1, &ctx))
        };
        yes += lhs as usize;
        r.check(lhs == rhs, || {
            let kb: Vec<String> = s.iter().map(|c| c.to_string()).collect();
            format!(
                "seed {case_seed}: {} k={k} s=[{}] alpha={alpha}: gadget {lhs}, direct {rhs}",
                if chained { "ordering" } else { "split-early" },
                kb.join("; ")
            )
        });
    }
    r.notes.push(format!("{yes} of {count} configurations hold"));
    r
}

/// Random QBF with 1 to 3 variables and 1 to 4 clauses of width at most 3.
pub fn random_qbf(seed: u64) -> Qbf {
    let p = &mut Pick::new(seed);
    let n = p.range(1, 3);
    let vars: Vec<u32> = (1..=n as u32).collect();
    let order = p.distinct(&vars, n);
    let prefix = order
        .into_iter()
        .map(|v| (if p.coin() { Quantifier::Forall } else { Quantifier::Exists }, v))
        .collect();
    let matrix = (0..p.range(1, 4))
        .map(|_| {
            (0..p.range(1, 3))
                .map(|_| {
                    let v = p.choose(&vars) as i32;
                    if p.coin() {
                        v
                    } else {
                        -v
                    }
                })
                .collect()
        })
        .collect();
    Qbf::new(prefix, matrix).expect("all variables quantified")
}

/// Every one-variable QBF whose matrix is a non-empty set of distinct clauses.
pub fn one_variable_qbfs() -> Vec<Qbf> {
    let clauses: [Vec<i32>; 3] = [vec![1], vec![-1], vec![1, -1]];
    let mut out = Vec::new();
    for q in [Quantifier::Forall, Quantifier::Exists] {
        for mask in 1u32..8 {
            let matrix = (0..3).filter(|i| mask >> i & 1 == 1).map(|i| clauses[i].clone()).collect();
            out.push(Qbf::new(vec![(q, 1)], matrix).expect("quantified"));
        }
    }
    out
}

/// The QBF reduction agrees with direct evaluation: `count` random formulas
/// plus every one-variable formula.
pub fn qbf(seed: u64, count: usize) -> Report {
    let mut r = Report::new("qbf");
    let mut cases: Vec<(String, Qbf)> = (0..count as u64)
        .map(|i| (format!("seed {}", seed + i), random_qbf(seed + i)))
        .collect();
    cases.extend(one_variable_qbfs().into_iter().enumerate().map(|(i, q)| (format!("one-variable #{i}"), q)));
    let mut yes = 0;
    for (label, q) in cases {
        let expected = q.eval();
        let got = answer(&reduce_qbf(&q).expect("non-empty matrix"));
        yes += expected as usize;
        r.check(got == expected, || format!("{label}: reduction {got}, direct {expected}: {}", q.to_qdimacs().replace('\n', " ")));
    }
    r.notes.push(format!("{yes} of {} formulas true", r.cases));
    r
}

/// Every threshold circuit with `m <= max_m` inputs on all assignments.
pub fn threshold(max_m: usize) -> Report {
    let mut r = Report::new("threshold");
    for m in 1..=max_m {
        for t in 1..=m {
            let c = threshold_subcircuit(m, t).expect("1 <= t <= m");
            let inputs = c.inputs();
            let ok = c.is_monotone()
                && (0u32..1 << m).all(|mask| {
                    let set: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).map(|i| inputs[i]).collect();
                    c.eval(&set) == (set.len() >= t)
                });
            r.check(ok, || format!("m={m} t={t}"));
        }
    }
    r
}

/// Random circuit over `blocks` with `gates` and/or nodes on top. With
/// `negate`, every input gets a not-node that gates may use instead of it.
fn random_circuit(p: &mut Pick, blocks: &[usize], weights: Vec<u32>, gates: usize, negate: bool, anti: bool) -> Circuit {
    let mut b = CircuitBuilder::new();
    let mut usable = Vec::new();
    let mut n = 0;
    for (i, &size) in blocks.iter().enumerate() {
        for _ in 0..size {
            let x = b.input(&format!("x{n}"), i as u32 + 1).expect("fresh");
            if negate {
                let nx = b.not(&format!("nx{n}"), x).expect("fresh");
                usable.push(nx);
                if !anti {
                    usable.push(x);
                }
            } else {
                usable.push(x);
            }
            n += 1;
        }
    }
    debug_assert!(gates >= 1);
    let mut last = usize::MAX;
    for g in 0..gates {
        let arity = p.range(1, 3.min(usable.len()));
        let args = p.distinct(&usable, arity);
        let id = format!("g{g}");
        last = if p.coin() { b.and(&id, &args) } else { b.or(&id, &args) }.expect("fresh");
        usable.push(last);
    }
    b.finish(last, weights).expect("valid circuit")
}

/// Weight-exact assignments of all blocks, as sets of true inputs.
fn exact_assignments(c: &Circuit) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for (members, &k) in c.blocks().iter().zip(c.weights()) {
        let mut next = Vec::new();
        for prefix in &out {
            for s in subsets_of_size(members, k as usize) {
                next.push(prefix.iter().chain(&s).copied().collect());
            }
        }
        out = next;
    }
    out
}

/// The not-free rewrite matches the original on all weight-exact assignments.
pub fn monotonize_suite(seed: u64, count: usize) -> Report {
    let mut r = Report::new("monotonize");
    for i in 0..count as u64 {
        let mut p = Pick::new(seed + i);
        let blocks: Vec<usize> = (0..p.range(1, 2)).map(|_| p.range(2, 3)).collect();
        let weights: Vec<u32> = blocks.iter().map(|&m| p.range(1, m - 1) as u32).collect();
        let gates = p.range(1, 5);
        let c = random_circuit(&mut p, &blocks, weights, gates, true, false);
        let m = monotonize(&c).expect("weights within 1..|X_i|-1");
        let ok = m.is_monotone()
            && exact_assignments(&c).iter().all(|set| {
                let mapped: Vec<usize> = set.iter().map(|&x| m.find(&c.nodes()[x].id).expect("inputs kept")).collect();
                c.eval(set) == m.eval(&mapped)
            });
        r.check(ok, || format!("seed {}", seed + i));
    }
    r
}

fn random_monotone(p: &mut Pick, max_blocks: usize, max_k: usize) -> Circuit {
    let blocks: Vec<usize> = (0..p.range(1, max_blocks)).map(|_| p.range(1, 2)).collect();
    let weights = blocks.iter().map(|_| p.range(1, max_k) as u32).collect();
    let gates = p.range(1, 6);
    random_circuit(p, &blocks, weights, gates, false, false)
}

/// Alternating monotone reduction against the realizable-weight oracle,
/// with `k_i = 1`.
pub fn qmcs(seed: u64, count: usize) -> Report {
    let mut r = Report::new("qmcs");
    let mut yes = 0;
    for i in 0..count as u64 {
        let c = random_monotone(&mut Pick::new(seed + i), 2, 1);
        let expected = qwcs_eval(&c, WeightMode::Realizable);
        let got = answer(&reduce_qmcs(&c).expect("monotone"));
        yes += expected as usize;
        r.check(got == expected, || format!("seed {}: reduction {got}, oracle {expected}", seed + i));
    }
    r.notes.push(format!("{yes} of {count} circuits satisfiable"));
    r
}

/// Single existential block, weight in 1..=2, against the realizable
/// oracle; divergence from the exact oracle is noted.
pub fn wmcs(seed: u64, count: usize) -> Report {
    let mut r = Report::new("wmcs");
    let mut diverged = 0;
    for i in 0..count as u64 {
        let mut p = Pick::new(seed + i);
        let k = p.range(1, 2) as u32;
        let c = random_circuit(&mut p, &[p_size(seed + i)], vec![k], 4, false, false);
        let realizable = exists_support(&c, k, WeightMode::Realizable);
        let exact = exists_support(&c, k, WeightMode::Exact);
        diverged += (realizable != exact) as usize;
        let got = answer(&reduce_wmcs(&c, k).expect("monotone, one block"));
        r.check(got == realizable, || format!("seed {}: reduction {got}, oracle {realizable}", seed + i));
    }
    r.notes.push(format!("{diverged} of {count} circuits differ between exact and realizable weights"));
    r
}

fn p_size(seed: u64) -> usize {
    Pick::new(seed ^ 0xb10c).range(1, 3)
}

fn exists_support(c: &Circuit, k: u32, mode: WeightMode) -> bool {
    let inputs = c.inputs();
    let sets: Vec<Vec<usize>> = match mode {
        WeightMode::Exact => subsets_of_size(&inputs, k as usize),
        WeightMode::Realizable => (1..=(k as usize).min(inputs.len()))
            .flat_map(|n| subsets_of_size(&inputs, n))
            .collect(),
    };
    sets.iter().any(|s| c.eval(s))
}

/// Anti-monotone complement reduction: YES iff every weight-`k` assignment
/// falsifies the circuit, `k` in 0..=2.
pub fn wamcs(seed: u64, count: usize) -> Report {
    let mut r = Report::new("wamcs");
    let mut yes = 0;
    for i in 0..count as u64 {
        let mut p = Pick::new(seed + i);
        let inputs = p.range(1, 3);
        let k = p.range(0, 2) as u32;
        let gates = p.range(1, 3);
        let c = random_circuit(&mut p, &[inputs], vec![k], gates, true, true);
        let expected = subsets_of_size(&c.inputs(), k as usize).iter().all(|s| !c.eval(s));
        let got = answer(&reduce_wamcs_complement(&c, k).expect("anti-monotone"));
        yes += expected as usize;
        r.check(got == expected, || format!("seed {}: k={k} reduction {got}, oracle {expected}", seed + i));
    }
    r.notes.push(format!("{yes} of {count} circuits falsified by every weight-k assignment"));
    r
}

/// Informational: alternating monotone circuits with `k_i <= 2`, comparing
/// the reduction with both weight readings.
pub fn weight_modes(seed: u64, count: usize) -> Report {
    let mut r = Report::new("weights");
    let (mut diverged, mut matches_exact) = (0, 0);
    for i in 0..count as u64 {
        let c = random_monotone(&mut Pick::new(seed + i), 2, 2);
        let realizable = qwcs_eval(&c, WeightMode::Realizable);
        let exact = qwcs_eval(&c, WeightMode::Exact);
        let got = answer(&reduce_qmcs(&c).expect("monotone"));
        if realizable != exact {
            diverged += 1;
            matches_exact += (got == exact) as usize;
        }
        r.check(got == realizable, || format!("seed {}: reduction {got}, realizable {realizable}, exact {exact}", seed + i));
    }
    r.notes.push(format!(
        "{diverged} of {count} circuits differ between exact and realizable weights; the reduction matched exact on {matches_exact} of those"
    ));
    r
}

/// Whether `c` has any not-node; used by tests of the generators.
pub fn has_negation(c: &Circuit) -> bool {
    c.nodes().iter().any(|n| matches!(n.gate, Gate::Not(_)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_runs_pass() {
        for name in SUITES {
            let r = run_suite(name, 1, 5).unwrap();
            assert!(r.passed(), "{r}: {:?}", r.failures);
        }
        assert!(run_suite("nope", 0, 1).is_none());
    }

    #[test]
    fn generators_have_the_promised_shape() {
        for seed in 0..30 {
            let mut p = Pick::new(seed);
            let c = random_circuit(&mut p, &[2, 1], vec![1, 1], 3, true, true);
            assert!(c.is_anti_monotone());
            let c = random_monotone(&mut p, 2, 2);
            assert!(c.is_monotone() && !has_negation(&c));
            let inst = lemma_instance(seed);
            assert!(inst.terms().len() <= 4 && inst.names().len() <= 3 && inst.kb.len() <= 6);
        }
    }

    #[test]
    fn one_variable_sweep_is_complete() {
        let all = one_variable_qbfs();
        assert_eq!(all.len(), 14);
        // Forall holds only for the tautology alone; exists fails only with both units.
        assert_eq!(all.iter().filter(|q| q.eval()).count(), 1 + 5);
    }
}
