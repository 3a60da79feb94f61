//! Instance generators that encode QBF truth and quantified weighted circuit
//! satisfiability as limited-belief problems, using the ordering gadget to
//! make the split order follow the quantifier order.

use thiserror::Error;

use crate::circuit::{Circuit, Gate};
use crate::gadget::{build_ordering, Block, GadgetError};
use crate::lang::{is_identifier, Clause, Formula, Literal, Name, Term};
use crate::qbf::{Qbf, Quantifier};
use crate::solver::Instance;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReduceError {
    #[error("the matrix has no clauses")]
    EmptyMatrix,
    #[error("matrix clause {0} is empty")]
    EmptyClause(usize),
    #[error("the formula has no quantifiers")]
    NoQuantifiers,
    #[error("circuit is not monotone")]
    NotMonotone,
    #[error("circuit is not anti-monotone")]
    NotAntiMonotone,
    #[error("expected a single input block, found {0}")]
    BlockCount(usize),
    #[error("existential block {0} has no inputs to select")]
    EmptyExistentialBlock(usize),
    #[error("node id `{0}` cannot be embedded in a symbol")]
    BadId(String),
    #[error(transparent)]
    Gadget(#[from] GadgetError),
}

fn lit(term: Term, name: Name) -> Literal {
    term.eq_name(name)
}

fn t_name() -> Name {
    Name::new("T")
}

fn w_name() -> Name {
    Name::new("W")
}

/// Variable `v` maps to term `x<v>`; an existential variable also gets
/// `nx<v>`, whose value `T` stands for "v is false". Block 1 is the
/// innermost variable, so the outermost quantifier is split first.
pub fn reduce_qbf(q: &Qbf) -> Result<Instance, ReduceError> {
    if q.prefix().is_empty() {
        return Err(ReduceError::NoQuantifiers);
    }
    if q.matrix().is_empty() {
        return Err(ReduceError::EmptyMatrix);
    }
    let (t, w) = (t_name(), w_name());
    let pos_term = |v: u32| Term::constant(&format!("x{v}"));
    let neg_term = |v: u32| Term::constant(&format!("nx{v}"));
    let kind = |v: u32| {
        q.prefix()
            .iter()
            .find(|&&(_, u)| u == v)
            .map(|&(k, _)| k)
            .expect("matrix variables are quantified")
    };
    let map_literal = |l: i32| -> Literal {
        let v = l.unsigned_abs();
        match (l > 0, kind(v)) {
            (true, _) => lit(pos_term(v), t),
            (false, Quantifier::Forall) => pos_term(v).neq_name(t),
            (false, Quantifier::Exists) => lit(neg_term(v), t),
        }
    };
    let mut clause_formulas = Vec::new();
    for (i, clause) in q.matrix().iter().enumerate() {
        let f = Formula::disjunction(clause.iter().map(|&l| Formula::lit(map_literal(l))))
            .ok_or(ReduceError::EmptyClause(i + 1))?;
        clause_formulas.push(f);
    }
    let psi = Formula::conjunction(clause_formulas).expect("non-empty matrix");

    let blocks: Vec<Block> = q
        .prefix()
        .iter()
        .rev()
        .map(|&(kind, v)| match kind {
            Quantifier::Forall => {
                Block::new(vec![pos_term(v)], vec![pos_term(v).neq_name(w)], vec![t])
            }
            Quantifier::Exists => Block::new(
                vec![pos_term(v), neg_term(v)],
                vec![lit(pos_term(v), t), lit(neg_term(v), t)],
                vec![t],
            ),
        })
        .collect::<Result<_, _>>()?;
    let alpha = escape_or(&blocks, psi);
    let out = build_ordering(&[], &blocks, &alpha, blocks.len() as u32)?;
    Ok(Instance {
        kb: out.clauses,
        query: out.query,
        level: out.level,
    })
}

/// `⋁_{ℓ ∈ L_i} ¬ℓ ∨ goal`, with the negated block literals grouped as one clause.
fn escape_or(blocks: &[Block], goal: Formula) -> Formula {
    let escape = Clause::new(blocks.iter().flat_map(|b| b.literals().iter().map(|l| l.negate())));
    match Formula::from_clause(&escape) {
        Some(e) => Formula::or(e, goal),
        None => goal,
    }
}

fn check_ids(c: &Circuit) -> Result<(), ReduceError> {
    for n in c.nodes() {
        if !is_identifier(&n.id) {
            return Err(ReduceError::BadId(n.id.clone()));
        }
    }
    Ok(())
}

fn node_term(c: &Circuit, v: usize) -> Term {
    Term::constant(&format!("fv_{}", c.nodes()[v].id))
}

/// Quantified monotone circuit satisfiability. Odd blocks are universal and
/// pick `k_i` inputs with repetition through selector terms `fs_<i>_<j>`
/// valued `nv_<x>`; even blocks are existential and pick through terms
/// `fs_<x>_<j>` valued `T`. Node truth is `fv_<v> = T`.
pub fn reduce_qmcs(c: &Circuit) -> Result<Instance, ReduceError> {
    if !c.is_monotone() {
        return Err(ReduceError::NotMonotone);
    }
    let kinds: Vec<Quantifier> = (0..c.blocks().len())
        .map(|i| if i % 2 == 0 { Quantifier::Forall } else { Quantifier::Exists })
        .collect();
    reduce_monotone(c, &kinds)
}

/// Weighted monotone circuit satisfiability: one existential block of weight `k`.
pub fn reduce_wmcs(c: &Circuit, k: u32) -> Result<Instance, ReduceError> {
    if !c.is_monotone() {
        return Err(ReduceError::NotMonotone);
    }
    let blocks = c.blocks().len();
    if blocks != 1 {
        return Err(ReduceError::BlockCount(blocks));
    }
    let single = with_weights(c, vec![k]);
    reduce_monotone(&single, &[Quantifier::Exists])
}

fn with_weights(c: &Circuit, weights: Vec<u32>) -> Circuit {
    let mut b = crate::circuit::CircuitBuilder::new();
    for n in c.nodes() {
        match &n.gate {
            Gate::Input { block } => b.input(&n.id, *block),
            Gate::Not(a) => b.not(&n.id, *a),
            Gate::And(args) => b.and(&n.id, args),
            Gate::Or(args) => b.or(&n.id, args),
        }
        .expect("copy of a valid circuit");
    }
    b.finish(c.output(), weights).expect("same block structure")
}

fn reduce_monotone(c: &Circuit, kinds: &[Quantifier]) -> Result<Instance, ReduceError> {
    check_ids(c)?;
    let (t, w) = (t_name(), w_name());
    let blocks = c.blocks();
    let fv = |v: usize| node_term(c, v);
    let nv = |x: usize| Name::new(&format!("nv_{}", c.nodes()[x].id));
    let mut kb = Vec::new();
    // Selection order: (1,1), (1,2), ..., (l, k_l).
    let mut selection: Vec<Block> = Vec::new();
    for (i, members) in blocks.iter().enumerate() {
        let k = c.weights()[i];
        match kinds[i] {
            Quantifier::Forall => {
                for j in 1..=k {
                    let fs = Term::constant(&format!("fs_{}_{j}", i + 1));
                    for &x in members {
                        kb.push(Clause::new([fs.neq_name(nv(x)), lit(fv(x), t)]));
                    }
                    kb.push(Clause::new(
                        members.iter().map(|&x| lit(fs, nv(x))).chain([lit(fs, w)]),
                    ));
                    let domain = members.iter().map(|&x| nv(x)).collect();
                    selection.push(Block::new(vec![fs], vec![fs.neq_name(w)], domain)?);
                }
            }
            Quantifier::Exists => {
                if k > 0 && members.is_empty() {
                    return Err(ReduceError::EmptyExistentialBlock(i + 1));
                }
                for j in 1..=k {
                    let fs = |x: usize| Term::constant(&format!("fs_{}_{j}", c.nodes()[x].id));
                    for &x in members {
                        kb.push(Clause::new([fs(x).neq_name(t), lit(fv(x), t)]));
                    }
                    selection.push(Block::new(
                        members.iter().map(|&x| fs(x)).collect(),
                        members.iter().map(|&x| lit(fs(x), t)).collect(),
                        vec![t],
                    )?);
                }
            }
        }
    }
    for (v, node) in c.nodes().iter().enumerate() {
        match &node.gate {
            Gate::And(args) => kb.push(Clause::new(
                args.iter().map(|&a| fv(a).neq_name(t)).chain([lit(fv(v), t)]),
            )),
            Gate::Or(args) => {
                for &a in args {
                    kb.push(Clause::new([fv(a).neq_name(t), lit(fv(v), t)]));
                }
            }
            Gate::Input { .. } | Gate::Not(_) => {}
        }
    }
    selection.reverse();
    let alpha = escape_or(&selection, Formula::lit(lit(fv(c.output()), t)));
    wrap(kb, &selection, alpha)
}

/// Complement of weighted anti-monotone circuit satisfiability: YES iff
/// every assignment with exactly `k` true inputs falsifies `c`. Selector
/// terms `fs_<i>` pick inputs by naming their not-node `nv_<x>`; falsity of
/// a non-input node `v` is `fv_<v> = F` and propagates upward.
///
/// A single shared term `f` with `f != nv_<v>` for falsity cannot work here:
/// a gate clause such as `f = nv_w | f != nv_v` is valid, because `f = nv_w`
/// already implies `f != nv_v`, and it subsumes the goal outright. Hence one
/// falsity term per node.
pub fn reduce_wamcs_complement(c: &Circuit, k: u32) -> Result<Instance, ReduceError> {
    if !c.is_anti_monotone() {
        return Err(ReduceError::NotAntiMonotone);
    }
    check_ids(c)?;
    let (w, false_) = (w_name(), Name::new("F"));
    let fv = |v: usize| node_term(c, v);
    let nv = |v: usize| Name::new(&format!("nv_{}", c.nodes()[v].id));
    let fs = |i: u32| Term::constant(&format!("fs_{i}"));
    // The not-node above each input, in input order.
    let not_nodes: Vec<usize> = c
        .inputs()
        .iter()
        .map(|&x| {
            c.nodes()
                .iter()
                .position(|n| n.gate == Gate::Not(x))
                .expect("anti-monotone inputs feed a not-node")
        })
        .collect();
    let mut kb = Vec::new();
    let mut selection = Vec::new();
    for i in 1..=k {
        for &vx in &not_nodes {
            kb.push(Clause::new([fs(i).neq_name(nv(vx)), lit(fv(vx), false_)]));
        }
        kb.push(Clause::new(
            not_nodes.iter().map(|&vx| lit(fs(i), nv(vx))).chain([lit(fs(i), w)]),
        ));
        let domain = not_nodes.iter().map(|&vx| nv(vx)).collect();
        selection.push(Block::new(vec![fs(i)], vec![fs(i).neq_name(w)], domain)?);
    }
    for i in 1..=k {
        for j in i + 1..=k {
            for &vx in &not_nodes {
                kb.push(Clause::new([fs(i).neq_name(nv(vx)), fs(j).neq_name(nv(vx))]));
            }
        }
    }
    for (v, node) in c.nodes().iter().enumerate() {
        match &node.gate {
            Gate::Or(args) => kb.push(Clause::new(
                args.iter().map(|&a| fv(a).neq_name(false_)).chain([lit(fv(v), false_)]),
            )),
            Gate::And(args) => {
                for &a in args {
                    kb.push(Clause::new([fv(a).neq_name(false_), lit(fv(v), false_)]));
                }
            }
            Gate::Input { .. } | Gate::Not(_) => {}
        }
    }
    let alpha = escape_or(&selection, Formula::lit(lit(fv(c.output()), false_)));
    wrap(kb, &selection, alpha)
}

/// Gadget-wraps `alpha` over `selection` (split-last first), or returns the
/// plain level-0 problem when nothing is selected.
fn wrap(kb: Vec<Clause>, selection: &[Block], alpha: Formula) -> Result<Instance, ReduceError> {
    if selection.is_empty() {
        return Ok(Instance {
            kb,
            query: alpha,
            level: 0,
        });
    }
    let out = build_ordering(&kb, selection, &alpha, selection.len() as u32)?;
    Ok(Instance {
        kb: out.clauses,
        query: out.query,
        level: out.level,
    })
}
