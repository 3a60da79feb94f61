//! The limited-belief truth relation and the top-level decision procedure.
//!
//! A belief `B k+1 α` holds in a setup when some term can be split so that
//! every candidate value (each mentioned name plus one fresh name) yields a
//! setup believing `B k α`. Level 0 reduces to clause membership.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

use crate::engine::Setup;
use crate::lang::{collect_literal_names, Clause, Formula, LangError, Name, Term, FRESH_NAME};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error(transparent)]
    Lang(#[from] LangError),
    #[error("a query with belief atoms takes its levels from the atoms; got level {0}")]
    LevelWithBeliefAtoms(u32),
    #[error("fresh split name `{0}` is mentioned in the instance")]
    FreshNameMentioned(String),
    #[error("holds_after_split expects a belief atom")]
    NotABelief,
}

/// A knowledge base, a query and the level of `B level query` when the
/// query is objective.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub kb: Vec<Clause>,
    pub query: Formula,
    pub level: u32,
}

impl Instance {
    pub fn new(kb: Vec<Clause>, query: Formula, level: u32) -> Result<Instance, SolveError> {
        let inst = Instance { kb, query, level };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<(), SolveError> {
        self.query.check_nesting()?;
        if !self.query.is_objective() && self.level != 0 {
            return Err(SolveError::LevelWithBeliefAtoms(self.level));
        }
        Ok(())
    }

    /// The formula actually evaluated: `B level query` for objective queries.
    pub fn goal(&self) -> Formula {
        if self.query.is_objective() {
            Formula::Believe(self.level, Box::new(self.query.clone()))
        } else {
            self.query.clone()
        }
    }

    pub fn terms(&self) -> BTreeSet<Term> {
        let mut terms: BTreeSet<Term> = self.kb.iter().flat_map(|c| c.terms()).collect();
        self.query.collect_terms(&mut terms);
        terms
    }

    pub fn names(&self) -> BTreeSet<Name> {
        let mut names = BTreeSet::new();
        for c in &self.kb {
            for l in c.iter() {
                collect_literal_names(l, &mut names);
            }
        }
        self.query.collect_names(&mut names);
        names
    }
}

/// The terms that may be split and the values tried for each split.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitContext {
    pub terms: Vec<Term>,
    /// Mentioned names in canonical order, then the fresh name.
    pub names: Vec<Name>,
}

impl SplitContext {
    /// Context for arbitrary clauses and formula, with `@fresh` as the extra name.
    pub fn for_parts(clauses: &[Clause], phi: &Formula) -> SplitContext {
        let inst = Instance {
            kb: clauses.to_vec(),
            query: phi.clone(),
            level: 0,
        };
        split_candidates(&inst)
    }

    /// Like `split_candidates` but with a caller-chosen extra name.
    pub fn with_fresh(inst: &Instance, fresh: Name) -> Result<SplitContext, SolveError> {
        let mentioned = inst.names();
        if mentioned.contains(&fresh) {
            return Err(SolveError::FreshNameMentioned(fresh.to_string()));
        }
        let mut names: Vec<Name> = mentioned.into_iter().collect();
        names.push(fresh);
        Ok(SplitContext {
            terms: inst.terms().into_iter().collect(),
            names,
        })
    }
}

/// Terms and names of the instance, plus `@fresh` as the last name.
pub fn split_candidates(inst: &Instance) -> SplitContext {
    let mut names: Vec<Name> = inst
        .names()
        .into_iter()
        .filter(|n| n.as_str() != FRESH_NAME)
        .collect();
    names.push(Name::fresh());
    SplitContext {
        terms: inst.terms().into_iter().collect(),
        names,
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Options {
    /// Cache belief results per (setup, atom, level).
    pub memo: bool,
    /// Record split trees.
    pub trace: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    /// Setups computed: the initial closure plus one per split case.
    pub closures: u64,
    pub cache_hits: u64,
    pub peak_depth: u32,
}

/// How a belief atom was settled in one setup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SplitTree {
    /// Level 0: the body was evaluated directly.
    Leaf { holds: bool },
    /// The setup is inconsistent, so every belief holds.
    Inconsistent,
    /// The first term whose every case succeeds.
    Split {
        term: Term,
        cases: Vec<(Name, SplitTree)>,
    },
    /// No term works; for each term, the first case that fails.
    Refuted { attempts: Vec<(Term, Name, SplitTree)> },
}

impl SplitTree {
    pub fn holds(&self) -> bool {
        match self {
            SplitTree::Leaf { holds } => *holds,
            SplitTree::Inconsistent | SplitTree::Split { .. } => true,
            SplitTree::Refuted { .. } => false,
        }
    }
}

/// One evaluated belief atom of the query, in evaluation order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BeliefTrace {
    pub level: u32,
    pub tree: SplitTree,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub answer: bool,
    pub trace: Option<Vec<BeliefTrace>>,
    pub stats: Stats,
}

/// Decides `B0 KB ⊃ goal` for the instance.
pub fn decide(inst: &Instance, options: Options) -> Result<Verdict, SolveError> {
    inst.validate()?;
    let ctx = split_candidates(inst);
    Ok(decide_in(inst, &ctx, options))
}

/// `decide` with an explicit split context (used to vary the fresh name).
pub fn decide_with_context(
    inst: &Instance,
    ctx: &SplitContext,
    options: Options,
) -> Result<Verdict, SolveError> {
    inst.validate()?;
    Ok(decide_in(inst, ctx, options))
}

fn decide_in(inst: &Instance, ctx: &SplitContext, options: Options) -> Verdict {
    let setup = Setup::close(inst.kb.iter().cloned());
    let goal = inst.goal();
    let mut eval = Evaluator::new(ctx, options);
    eval.stats.closures = 1;
    let answer = eval.holds(&setup, &goal);
    Verdict {
        answer,
        trace: eval.beliefs,
        stats: eval.stats,
    }
}

/// The truth relation on a closed setup.
pub fn holds(s: &Setup, phi: &Formula, ctx: &SplitContext) -> Result<bool, SolveError> {
    phi.check_nesting()?;
    Ok(Evaluator::new(ctx, Options::default()).holds(s, phi))
}

/// `holds(assert_unit(s, t=n), phi, ctx)` for a belief atom `phi`.
pub fn holds_after_split(
    s: &Setup,
    t: Term,
    n: Name,
    phi: &Formula,
    ctx: &SplitContext,
) -> Result<bool, SolveError> {
    if !matches!(phi, Formula::Believe(..)) {
        return Err(SolveError::NotABelief);
    }
    holds(&s.assert_unit(t.eq_name(n)), phi, ctx)
}

type CacheKey = (Setup, usize, u32);

/// Rule 1 for `phi` (or `~phi`) when it is a clause.
fn clause_value(s: &Setup, phi: &Formula, positive: bool) -> Option<bool> {
    if positive {
        phi.as_clause().map(|c| s.contains(&c))
    } else {
        phi.leaf_literal()
            .map(|l| s.contains(&Clause::unit(l.negate())))
    }
}

struct Evaluator<'a> {
    ctx: &'a SplitContext,
    options: Options,
    cache: HashMap<CacheKey, SplitTree>,
    stats: Stats,
    beliefs: Option<Vec<BeliefTrace>>,
}

impl<'a> Evaluator<'a> {
    fn new(ctx: &'a SplitContext, options: Options) -> Self {
        Evaluator {
            ctx,
            options,
            cache: HashMap::new(),
            stats: Stats::default(),
            beliefs: options.trace.then(Vec::new),
        }
    }

    fn holds(&mut self, s: &Setup, phi: &Formula) -> bool {
        self.eval(s, phi, true)
    }

    /// `holds(s, phi)` when `positive`, else `holds(s, ~phi)`, without
    /// building the negation (memo keys rely on formula addresses).
    fn eval(&mut self, s: &Setup, phi: &Formula, positive: bool) -> bool {
        if let Some(value) = clause_value(s, phi, positive) {
            return value;
        }
        match phi {
            Formula::Or(a, b) if positive => self.eval(s, a, true) || self.eval(s, b, true),
            Formula::Or(a, b) => self.eval(s, a, false) && self.eval(s, b, false),
            Formula::Not(inner) => self.eval(s, inner, !positive),
            Formula::Believe(k, body) => {
                let tree = self.believe(s, body, *k, 0);
                let answer = tree.holds();
                if let Some(beliefs) = &mut self.beliefs {
                    beliefs.push(BeliefTrace { level: *k, tree });
                }
                answer == positive
            }
            Formula::Lit(_) => unreachable!("literals are clauses"),
        }
    }

    /// Objective evaluation; never records traces.
    fn objective(s: &Setup, phi: &Formula, positive: bool) -> bool {
        if let Some(value) = clause_value(s, phi, positive) {
            return value;
        }
        match phi {
            Formula::Or(a, b) if positive => {
                Self::objective(s, a, true) || Self::objective(s, b, true)
            }
            Formula::Or(a, b) => Self::objective(s, a, false) && Self::objective(s, b, false),
            Formula::Not(inner) => Self::objective(s, inner, !positive),
            _ => unreachable!("objective formula"),
        }
    }

    fn believe(&mut self, s: &Setup, body: &Formula, k: u32, depth: u32) -> SplitTree {
        self.stats.peak_depth = self.stats.peak_depth.max(depth);
        if s.is_inconsistent() && !self.ctx.terms.is_empty() {
            return SplitTree::Inconsistent;
        }
        if k == 0 {
            return SplitTree::Leaf {
                holds: Self::objective(s, body, true),
            };
        }
        let key = if self.options.memo {
            let key = (s.clone(), body as *const Formula as usize, k);
            if let Some(tree) = self.cache.get(&key) {
                self.stats.cache_hits += 1;
                return tree.clone();
            }
            Some(key)
        } else {
            None
        };
        let tree = self.search(s, body, k, depth);
        if let Some(key) = key {
            self.cache.insert(key, tree.clone());
        }
        tree
    }

    fn search(&mut self, s: &Setup, body: &Formula, k: u32, depth: u32) -> SplitTree {
        let ctx = self.ctx;
        let mut attempts = Vec::new();
        for &t in &ctx.terms {
            let mut cases = Vec::new();
            let mut failure = None;
            for &n in &ctx.names {
                let next = s.assert_unit(t.eq_name(n));
                self.stats.closures += 1;
                let sub = self.believe(&next, body, k - 1, depth + 1);
                if sub.holds() {
                    if self.options.trace {
                        cases.push((n, sub));
                    }
                } else {
                    failure = Some((n, sub));
                    break;
                }
            }
            match failure {
                None => {
                    return SplitTree::Split { term: t, cases };
                }
                Some((n, sub)) => {
                    if self.options.trace {
                        attempts.push((t, n, sub));
                    }
                }
            }
        }
        SplitTree::Refuted { attempts }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReplayError {
    #[error("verdict carries no trace")]
    MissingTrace,
    #[error("trace has {recorded} belief records but replay consumed {used}")]
    TraceLength { recorded: usize, used: usize },
    #[error("belief record {index}: {reason}")]
    Mismatch { index: usize, reason: String },
    #[error("replayed answer {replayed} differs from recorded answer {recorded}")]
    Answer { replayed: bool, recorded: bool },
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// Re-evaluates the instance following the recorded split trees instead of
/// searching, checking every recorded sub-verdict along the way.
pub fn replay(inst: &Instance, verdict: &Verdict) -> Result<(), ReplayError> {
    inst.validate()?;
    let trace = verdict.trace.as_ref().ok_or(ReplayError::MissingTrace)?;
    let ctx = split_candidates(inst);
    let setup = Setup::close(inst.kb.iter().cloned());
    let mut replayer = Replayer {
        ctx: &ctx,
        trace,
        next: 0,
    };
    let answer = replayer.holds(&setup, &inst.goal(), true)?;
    if replayer.next != trace.len() {
        return Err(ReplayError::TraceLength {
            recorded: trace.len(),
            used: replayer.next,
        });
    }
    if answer != verdict.answer {
        return Err(ReplayError::Answer {
            replayed: answer,
            recorded: verdict.answer,
        });
    }
    Ok(())
}

struct Replayer<'a> {
    ctx: &'a SplitContext,
    trace: &'a [BeliefTrace],
    next: usize,
}

impl Replayer<'_> {
    fn holds(&mut self, s: &Setup, phi: &Formula, positive: bool) -> Result<bool, ReplayError> {
        if let Some(value) = clause_value(s, phi, positive) {
            return Ok(value);
        }
        Ok(match phi {
            Formula::Or(a, b) if positive => self.holds(s, a, true)? || self.holds(s, b, true)?,
            Formula::Or(a, b) => self.holds(s, a, false)? && self.holds(s, b, false)?,
            Formula::Not(inner) => self.holds(s, inner, !positive)?,
            Formula::Believe(k, body) => {
                let index = self.next;
                let record = self.trace.get(index).ok_or(ReplayError::TraceLength {
                    recorded: self.trace.len(),
                    used: index + 1,
                })?;
                self.next += 1;
                if record.level != *k {
                    return Err(ReplayError::Mismatch {
                        index,
                        reason: format!("level {} recorded for B {k}", record.level),
                    });
                }
                let value = self
                    .check(s, body, *k, &record.tree)
                    .map_err(|reason| ReplayError::Mismatch { index, reason })?;
                value == positive
            }
            Formula::Lit(_) => unreachable!("literals are clauses"),
        })
    }

    /// Verifies `tree` as the settlement of `B k body` in `s`; returns its value.
    fn check(&self, s: &Setup, body: &Formula, k: u32, tree: &SplitTree) -> Result<bool, String> {
        match tree {
            SplitTree::Inconsistent => {
                if s.is_inconsistent() {
                    Ok(true)
                } else {
                    Err("setup recorded as inconsistent is consistent".into())
                }
            }
            SplitTree::Leaf { holds } => {
                if k != 0 {
                    return Err(format!("leaf recorded at level {k}"));
                }
                let actual = Evaluator::objective(s, body, true);
                if actual != *holds {
                    return Err(format!("leaf recorded {holds}, body evaluates to {actual}"));
                }
                Ok(actual)
            }
            SplitTree::Split { term, cases } => {
                if k == 0 {
                    return Err("split recorded at level 0".into());
                }
                let names: Vec<Name> = cases.iter().map(|(n, _)| *n).collect();
                if names != self.ctx.names {
                    return Err(format!("split on {term} does not cover every name"));
                }
                for (n, sub) in cases {
                    let next = s.assert_unit(term.eq_name(*n));
                    if !self.check(&next, body, k - 1, sub)? {
                        return Err(format!("case {term}={n} does not hold"));
                    }
                }
                Ok(true)
            }
            SplitTree::Refuted { attempts } => {
                if k == 0 {
                    return Err("refutation recorded at level 0".into());
                }
                let terms: Vec<Term> = attempts.iter().map(|(t, _, _)| *t).collect();
                if terms != self.ctx.terms {
                    return Err("refutation does not cover every term".into());
                }
                for (t, n, sub) in attempts {
                    let next = s.assert_unit(t.eq_name(*n));
                    if self.check(&next, body, k - 1, sub)? {
                        return Err(format!("refuting case {t}={n} holds"));
                    }
                }
                Ok(false)
            }
        }
    }
}

/// Indented rendering: one `belief <k> yes|no` header per evaluated atom,
/// then `split <term>` with `case <name>` children for successes, or
/// `refute` with the failing case of each term.
pub fn render_trace(trace: &[BeliefTrace]) -> String {
    let mut out = String::new();
    for record in trace {
        let verdict = if record.tree.holds() { "yes" } else { "no" };
        let _ = writeln!(out, "belief {} {}", record.level, verdict);
        render_tree(&record.tree, 1, &mut out);
    }
    out
}

fn render_tree(tree: &SplitTree, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match tree {
        SplitTree::Leaf { .. } => {}
        SplitTree::Inconsistent => {
            let _ = writeln!(out, "{pad}inconsistent");
        }
        SplitTree::Split { term, cases } => {
            let _ = writeln!(out, "{pad}split {term}");
            for (n, sub) in cases {
                let _ = writeln!(out, "{pad}  case {n}{}", leaf_suffix(sub));
                if !is_terminal(sub) {
                    render_tree(sub, depth + 2, out);
                }
            }
        }
        SplitTree::Refuted { attempts } => {
            let _ = writeln!(out, "{pad}refute");
            for (t, n, sub) in attempts {
                let _ = writeln!(out, "{pad}  split {t}");
                let _ = writeln!(out, "{pad}    case {n} fails{}", leaf_suffix(sub));
                if !is_terminal(sub) {
                    render_tree(sub, depth + 3, out);
                }
            }
        }
    }
}

fn is_terminal(tree: &SplitTree) -> bool {
    matches!(tree, SplitTree::Leaf { .. } | SplitTree::Inconsistent)
}

fn leaf_suffix(tree: &SplitTree) -> &'static str {
    match tree {
        SplitTree::Inconsistent => " (inconsistent)",
        _ => "",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{father, father_kb, lit, order, order_kb};

    fn rich_goal() -> Formula {
        Formula::or(
            Formula::lit(lit("rich(Frank)=T")),
            Formula::lit(lit("rich(Fred)=T")),
        )
    }

    #[test]
    fn father_levels() {
        for (level, expected) in [(0, false), (1, true), (2, true)] {
            let v = decide(&father(level), Options::default()).unwrap();
            assert_eq!(v.answer, expected, "level {level}");
        }
    }

    #[test]
    fn father_holds_directly() {
        let s = Setup::close(father_kb());
        let ctx = split_candidates(&father(1));
        let b1 = Formula::believe(1, rich_goal()).unwrap();
        let b0 = Formula::believe(0, rich_goal()).unwrap();
        assert!(holds(&s, &b1, &ctx).unwrap());
        assert!(!holds(&s, &b0, &ctx).unwrap());
        let t = Term::new("fatherOf", &[Name::new("Sally")]);
        assert!(holds_after_split(&s, t, Name::new("Anna"), &b0, &ctx).unwrap());
    }

    #[test]
    fn father_candidates() {
        let ctx = split_candidates(&father(1));
        let terms: Vec<String> = ctx.terms.iter().map(|t| t.to_string()).collect();
        assert_eq!(terms, ["fatherOf(Sally)", "rich(Frank)", "rich(Fred)"]);
        let names: Vec<&str> = ctx.names.iter().map(|n| n.as_str()).collect();
        assert_eq!(names, ["Frank", "Fred", "Sally", "T", "@fresh"]);
    }

    #[test]
    fn minimal_candidates() {
        let inst = Instance::new(vec![], Formula::lit(lit("f=T")), 0).unwrap();
        let ctx = split_candidates(&inst);
        assert_eq!(ctx.terms, vec![Term::constant("f")]);
        let names: Vec<&str> = ctx.names.iter().map(|n| n.as_str()).collect();
        assert_eq!(names, ["T", "@fresh"]);
    }

    #[test]
    fn order_example() {
        let v = decide(&order(2), Options::default()).unwrap();
        assert!(v.answer);
        let ctx = split_candidates(&order(2));
        let terms: Vec<String> = ctx.terms.iter().map(|t| t.to_string()).collect();
        assert_eq!(terms, ["f", "g1", "g2", "h"]);

        let s = Setup::close(order_kb());
        let b1 = Formula::believe(1, Formula::lit(lit("h=T"))).unwrap();
        let f = Term::constant("f");
        assert!(holds_after_split(&s, f, Name::new("T"), &b1, &ctx).unwrap());
        // With g1 or g2 pinned first, every value still leaves a level-1
        // proof by splitting the goal term h itself.
        for g in ["g1", "g2"] {
            for &n in &ctx.names {
                assert!(holds_after_split(&s, Term::constant(g), n, &b1, &ctx).unwrap());
            }
        }
        // Only when h is off the table does the order matter.
        let no_goal = SplitContext {
            terms: ctx.terms.iter().copied().filter(|t| *t != Term::constant("h")).collect(),
            names: ctx.names.clone(),
        };
        assert!(holds_after_split(&s, f, Name::new("T"), &b1, &no_goal).unwrap());
        for g in ["g1", "g2"] {
            let g = Term::constant(g);
            assert!(!holds_after_split(&s, g, Name::fresh(), &b1, &no_goal).unwrap());
        }
    }

    #[test]
    fn father_trace_shape() {
        let opts = Options {
            trace: true,
            ..Options::default()
        };
        let v = decide(&father(1), opts).unwrap();
        let text = render_trace(v.trace.as_ref().unwrap());
        let expected = "\
belief 1 yes
  split fatherOf(Sally)
    case Frank
    case Fred
    case Sally (inconsistent)
    case T (inconsistent)
    case @fresh (inconsistent)
";
        assert_eq!(text, expected);
        replay(&father(1), &v).unwrap();

        let v0 = decide(&father(0), opts).unwrap();
        assert_eq!(render_trace(v0.trace.as_ref().unwrap()), "belief 0 no\n");
        replay(&father(0), &v0).unwrap();
    }

    #[test]
    fn tampered_trace_fails_replay() {
        let opts = Options {
            trace: true,
            ..Options::default()
        };
        let mut v = decide(&father(1), opts).unwrap();
        if let SplitTree::Split { cases, .. } = &mut v.trace.as_mut().unwrap()[0].tree {
            cases.pop();
        }
        assert!(replay(&father(1), &v).is_err());
    }

    #[test]
    fn subjective_queries() {
        let b1 = Formula::believe(1, rich_goal()).unwrap();
        let b0 = Formula::believe(0, rich_goal()).unwrap();
        let q = Formula::and(b1, Formula::not(b0));
        let inst = Instance::new(father_kb(), q, 0).unwrap();
        assert!(decide(&inst, Options::default()).unwrap().answer);

        let bad = Instance {
            kb: father_kb(),
            query: inst.query.clone(),
            level: 1,
        };
        assert_eq!(
            decide(&bad, Options::default()),
            Err(SolveError::LevelWithBeliefAtoms(1))
        );
    }

    #[test]
    fn nested_belief_is_an_error() {
        let inner = Formula::believe(0, Formula::lit(lit("f=T"))).unwrap();
        let nested = Formula::Believe(1, Box::new(inner));
        let inst = Instance {
            kb: vec![],
            query: nested,
            level: 0,
        };
        assert!(matches!(
            decide(&inst, Options::default()),
            Err(SolveError::Lang(LangError::NestedBelief(1)))
        ));
    }

    #[test]
    fn empty_clause_query() {
        // The empty clause is not expressible as a formula; an inconsistent
        // KB is the only way level 0 believes everything.
        let kb = vec![Clause::new([lit("f=T")]), Clause::new([lit("f=F")])];
        let inst = Instance::new(kb, Formula::lit(lit("g=T")), 0).unwrap();
        assert!(decide(&inst, Options::default()).unwrap().answer);
    }

    #[test]
    fn memo_is_transparent_on_fixtures() {
        for inst in [father(0), father(1), father(2), order(1), order(2), order(3)] {
            let plain = decide(&inst, Options { memo: false, trace: true }).unwrap();
            let cached = decide(&inst, Options { memo: true, trace: true }).unwrap();
            assert_eq!(plain.answer, cached.answer);
            assert_eq!(plain.trace, cached.trace);
        }
    }

    #[test]
    fn stats_are_counted() {
        let v = decide(&father(1), Options::default()).unwrap();
        assert_eq!(v.stats.closures, 1 + 5);
        assert_eq!(v.stats.peak_depth, 1);
    }
}
