//! The ordering gadget: extra clauses and a wrapped query that force some
//! term of a block to be split no later than a given belief level, chained
//! over several blocks to fix the order in which blocks are split.
//!
//! Generated literals are `@w<i>_<j> = @t` (waste) and `@o<i>_<j> = @t`
//! (order) for stage `i`.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::lang::{collect_literal_names, Clause, Formula, Literal, Name, Term};
use crate::oracle::entails;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GadgetError {
    #[error("a block needs at least one term")]
    EmptyBlock,
    #[error("term {0} of the block must occur in exactly one block literal")]
    TermOccurrence(String),
    #[error("the split-early gadget needs k >= 1")]
    ZeroLevel,
    #[error("{k} stages requested but only {blocks} blocks given")]
    TooFewBlocks { k: u32, blocks: usize },
    #[error("term {0} belongs to more than one block")]
    Overlap(String),
    #[error("generated term {0} already occurs in the input")]
    Collision(String),
}

/// Terms `F` to be split, literals `L` mentioning each term of `F` exactly
/// once (other terms may occur too), and the names the construction
/// intends the terms to range over.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    terms: Vec<Term>,
    literals: Vec<Literal>,
    domain: Vec<Name>,
}

impl Block {
    pub fn new(terms: Vec<Term>, literals: Vec<Literal>, domain: Vec<Name>) -> Result<Block, GadgetError> {
        let terms: Vec<Term> = terms.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        let mut literals: Vec<Literal> = literals;
        literals.sort();
        literals.dedup();
        if terms.is_empty() {
            return Err(GadgetError::EmptyBlock);
        }
        for t in &terms {
            if literals.iter().filter(|l| l.term() == *t).count() != 1 {
                return Err(GadgetError::TermOccurrence(t.to_string()));
            }
        }
        Ok(Block {
            terms,
            literals,
            domain,
        })
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn domain(&self) -> &[Name] {
        &self.domain
    }

    /// `⋁_{ℓ∈L} ¬ℓ` as a clause.
    pub fn negated_clause(&self) -> Clause {
        Clause::new(self.literals.iter().map(|l| l.negate()))
    }
}

/// Symbols introduced by the gadget.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Registry {
    /// Waste terms per stage, stage 1 first.
    pub waste: Vec<Vec<Term>>,
    /// Order terms per stage, stage 1 first.
    pub order: Vec<Vec<Term>>,
    /// Name shared by all generated literals.
    pub designated: Option<Name>,
    /// Skip name used by a reduction, if any.
    pub skip: Option<Name>,
}

impl Registry {
    pub fn generated_terms(&self) -> impl Iterator<Item = Term> + '_ {
        self.waste.iter().chain(self.order.iter()).flatten().copied()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GadgetOut {
    pub clauses: Vec<Clause>,
    pub query: Formula,
    pub level: u32,
    pub registry: Registry,
}

pub fn designated_name() -> Name {
    Name::new("@t")
}

pub fn waste_term(stage: u32, i: u32) -> Term {
    Term::constant(&format!("@w{stage}_{i}"))
}

pub fn order_term(stage: u32, j: u32) -> Term {
    Term::constant(&format!("@o{stage}_{j}"))
}

fn occurring_terms(s: &[Clause], alpha: &Formula) -> BTreeSet<Term> {
    let mut terms: BTreeSet<Term> = s.iter().flat_map(|c| c.terms()).collect();
    alpha.collect_terms(&mut terms);
    terms
}

/// One stage: adds, for every `ℓ ∈ L`, the clauses `¬ℓ ∨ c^o`,
/// `ℓ ∨ w_1 ∨ … ∨ w_{k-1} ∨ c^o` and `ℓ ∨ ¬w_i ∨ c^o`, and returns
/// `c^o ∧ (⋁¬ℓ ∨ α)` at level `k`, where `c^o = o_1 ∨ … ∨ o_k`.
///
/// `⋁¬ℓ` is built as one clause so the query's Or-structure is
/// `c^o ∧ (clause ∨ α)`.
pub fn build_split_early(s: &[Clause], blk: &Block, k: u32, alpha: &Formula) -> Result<GadgetOut, GadgetError> {
    if k == 0 {
        return Err(GadgetError::ZeroLevel);
    }
    let taken = occurring_terms(s, alpha);
    let mut block_terms: BTreeSet<Term> = blk.terms.iter().copied().collect();
    block_terms.extend(blk.literals.iter().map(|l| l.term()));
    let t = designated_name();
    let waste: Vec<Term> = (1..k).map(|i| waste_term(k, i)).collect();
    let order: Vec<Term> = (1..=k).map(|j| order_term(k, j)).collect();
    for g in waste.iter().chain(order.iter()) {
        if taken.contains(g) || block_terms.contains(g) {
            return Err(GadgetError::Collision(g.to_string()));
        }
    }
    let w: Vec<Literal> = waste.iter().map(|&f| f.eq_name(t)).collect();
    let o: Vec<Literal> = order.iter().map(|&f| f.eq_name(t)).collect();

    let mut clauses = s.to_vec();
    for &l in &blk.literals {
        clauses.push(Clause::new(std::iter::once(l.negate()).chain(o.iter().copied())));
        clauses.push(Clause::new(
            std::iter::once(l).chain(w.iter().copied()).chain(o.iter().copied()),
        ));
        for &wi in &w {
            clauses.push(Clause::new([l, wi.negate()].into_iter().chain(o.iter().copied())));
        }
    }
    let c_o = Formula::disjunction(o.iter().map(|&l| Formula::lit(l))).expect("k >= 1");
    let negated = Formula::from_clause(&blk.negated_clause()).expect("non-empty block");
    let query = Formula::and(c_o, Formula::or(negated, alpha.clone()));
    Ok(GadgetOut {
        clauses,
        query,
        level: k,
        registry: Registry {
            waste: vec![waste],
            order: vec![order],
            designated: Some(t),
            skip: None,
        },
    })
}

/// Chains `k` stages. `blocks[0]` is stage 1 (split last); stage `k` is
/// split first.
pub fn build_ordering(s: &[Clause], blocks: &[Block], alpha: &Formula, k: u32) -> Result<GadgetOut, GadgetError> {
    if k as usize > blocks.len() {
        return Err(GadgetError::TooFewBlocks {
            k,
            blocks: blocks.len(),
        });
    }
    let mut seen = BTreeSet::new();
    for blk in blocks {
        for t in &blk.terms {
            if !seen.insert(*t) {
                return Err(GadgetError::Overlap(t.to_string()));
            }
        }
    }
    let mut out = GadgetOut {
        clauses: s.to_vec(),
        query: alpha.clone(),
        level: 0,
        registry: Registry::default(),
    };
    for i in 1..=k {
        let stage = build_split_early(&out.clauses, &blocks[i as usize - 1], i, &out.query)?;
        out.clauses = stage.clauses;
        out.query = stage.query;
        out.level = i;
        out.registry.waste.extend(stage.registry.waste);
        out.registry.order.extend(stage.registry.order);
        out.registry.designated = stage.registry.designated;
    }
    Ok(out)
}

/// Oracle check of the gadget's side condition. For each block `j` and
/// every way of splitting one term of each later block `m > j` (those are
/// split first), some value of each remaining term must leave both `⋁L_j`
/// and `⋁¬L_j` classically unentailed. Remaining terms are those of `s`
/// and of the block literals outside every block, plus one unmentioned
/// term (the "no further split" case).
pub fn verify_gadget_preconditions(s: &[Clause], blocks: &[Block]) -> bool {
    let all_block_terms: BTreeSet<Term> = blocks.iter().flat_map(|b| b.terms.iter().copied()).collect();
    let mut others: BTreeSet<Term> = s.iter().flat_map(|c| c.terms()).collect();
    for b in blocks {
        others.extend(b.literals.iter().map(|l| l.term()));
    }
    let others: Vec<Option<Term>> = std::iter::once(None)
        .chain(others.into_iter().filter(|t| !all_block_terms.contains(t)).map(Some))
        .collect();
    let mut names: BTreeSet<Name> = BTreeSet::new();
    for c in s {
        for l in c.iter() {
            collect_literal_names(l, &mut names);
        }
    }
    for b in blocks {
        for l in &b.literals {
            collect_literal_names(l, &mut names);
        }
    }
    let mut names: Vec<Name> = names.into_iter().collect();
    names.push(Name::fresh());

    for (j, blk) in blocks.iter().enumerate() {
        let positive = Formula::from_clause(&Clause::new(blk.literals.iter().copied())).expect("non-empty");
        let negative = Formula::from_clause(&blk.negated_clause()).expect("non-empty");
        let later = &blocks[j + 1..];
        let ok = for_each_prefix(later, &names, &mut Vec::new(), &mut |prefix| {
            others.iter().all(|t| {
                let undecided = |extra: &[Clause]| {
                    let kb: Vec<Clause> = s.iter().cloned().chain(prefix.iter().cloned()).chain(extra.iter().cloned()).collect();
                    !entails(&kb, &positive).expect("objective") && !entails(&kb, &negative).expect("objective")
                };
                match t {
                    None => undecided(&[]),
                    Some(t) => names.iter().any(|&n| undecided(&[Clause::unit(t.eq_name(n))])),
                }
            })
        });
        if !ok {
            return false;
        }
    }
    true
}

/// Calls `check` on every choice of one unit `t = n` per block; stops at
/// the first failure.
fn for_each_prefix(
    blocks: &[Block],
    names: &[Name],
    acc: &mut Vec<Clause>,
    check: &mut dyn FnMut(&[Clause]) -> bool,
) -> bool {
    let Some((first, rest)) = blocks.split_first() else {
        return check(acc);
    };
    for &t in &first.terms {
        for &n in names {
            acc.push(Clause::unit(t.eq_name(n)));
            let ok = for_each_prefix(rest, names, acc, check);
            acc.pop();
            if !ok {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{father_kb, lit};
    use crate::format::parse_formula;

    fn block(terms: &[&str], lits: &[&str]) -> Block {
        Block::new(
            terms.iter().map(|t| Term::constant(t)).collect(),
            lits.iter().map(|l| lit(l)).collect(),
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn single_stage_instantiation() {
        let alpha = parse_formula("a=T").unwrap();
        let out = build_split_early(&[], &block(&["f"], &["f=T"]), 1, &alpha).unwrap();
        let expected = vec![
            Clause::new([lit("f!=T"), lit("@o1_1=@t")]),
            Clause::new([lit("f=T"), lit("@o1_1=@t")]),
        ];
        assert_eq!(out.clauses, expected);
        assert_eq!(out.query.to_string(), "@o1_1=@t & (f!=T | a=T)");
        assert_eq!(out.level, 1);
    }

    #[test]
    fn clause_counts() {
        let alpha = parse_formula("a=T").unwrap();
        let blk = block(&["f", "g"], &["f=T", "g!=W"]);
        for k in 1..=4 {
            let out = build_split_early(&father_kb(), &blk, k, &alpha).unwrap();
            assert_eq!(out.clauses.len(), 3 + 2 * (k as usize + 1));
        }
    }

    #[test]
    fn generated_term_count_is_k_squared() {
        let alpha = parse_formula("a=T").unwrap();
        let blocks: Vec<Block> = (0..4).map(|i| block(&[&format!("f{i}")], &[&format!("f{i}=T")])).collect();
        for k in 0..=4u32 {
            let out = build_ordering(&[], &blocks, &alpha, k).unwrap();
            assert_eq!(out.registry.generated_terms().count(), (k * k) as usize);
        }
        let out = build_ordering(&father_kb(), &blocks, &alpha, 0).unwrap();
        assert_eq!(out.clauses, father_kb());
        assert_eq!(out.query, alpha);
    }

    #[test]
    fn block_errors() {
        assert_eq!(Block::new(vec![], vec![], vec![]), Err(GadgetError::EmptyBlock));
        assert!(matches!(
            Block::new(vec![Term::constant("f")], vec![lit("f=T"), lit("f=F")], vec![]),
            Err(GadgetError::TermOccurrence(_))
        ));
        assert!(Block::new(vec![Term::constant("f")], vec![lit("f=T"), lit("g=F")], vec![]).is_ok());
        let alpha = parse_formula("a=T").unwrap();
        let b = block(&["f"], &["f=T"]);
        assert_eq!(
            build_ordering(&[], &[b.clone(), b.clone()], &alpha, 1),
            Err(GadgetError::Overlap("f".into()))
        );
        assert_eq!(
            build_ordering(&[], std::slice::from_ref(&b), &alpha, 2),
            Err(GadgetError::TooFewBlocks { k: 2, blocks: 1 })
        );
        let clash = parse_formula("@o1_1=@t").unwrap();
        assert!(matches!(
            build_split_early(&[], &b, 1, &clash),
            Err(GadgetError::Collision(_))
        ));
    }

    #[test]
    fn preconditions() {
        let b = block(&["x"], &["x!=W"]);
        assert!(verify_gadget_preconditions(&[], std::slice::from_ref(&b)));
        // s forces f=T, and f=T is one of the block literals.
        let bad = block(&["g"], &["g=T", "f=T"]);
        assert!(!verify_gadget_preconditions(&[Clause::unit(lit("f=T"))], &[bad]));
        assert!(verify_gadget_preconditions(&father_kb(), &[b]));
    }
}
