#![allow(dead_code)]

use limbel::lang::{Clause, Formula, Literal, Name, Term};
use proptest::prelude::*;

pub const TERMS: [&str; 4] = ["a", "b", "c", "f(N1)"];
pub const NAMES: [&str; 3] = ["N1", "N2", "N3"];

pub fn term(i: usize) -> Term {
    match TERMS[i] {
        "f(N1)" => Term::new("f", &[Name::new("N1")]),
        t => Term::constant(t),
    }
}

pub fn literal() -> impl Strategy<Value = Literal> {
    (0..TERMS.len(), 0..NAMES.len(), any::<bool>())
        .prop_map(|(t, n, pos)| Literal::new(term(t), Name::new(NAMES[n]), pos))
}

pub fn clause(max_width: usize) -> impl Strategy<Value = Clause> {
    prop::collection::vec(literal(), 1..=max_width).prop_map(Clause::new)
}

pub fn clauses(max: usize, max_width: usize) -> impl Strategy<Value = Vec<Clause>> {
    prop::collection::vec(clause(max_width), 0..=max)
}

/// Objective formula: a conjunction of one or two clauses.
pub fn objective() -> impl Strategy<Value = Formula> {
    prop::collection::vec(clause(3), 1..=2).prop_map(|cs| {
        Formula::conjunction(cs.iter().map(|c| Formula::from_clause(c).unwrap())).unwrap()
    })
}

/// Formula mixing belief atoms (levels 0..=2) with negation and disjunction.
pub fn subjective() -> impl Strategy<Value = Formula> {
    let atom = (0u32..=2, objective()).prop_map(|(k, body)| Formula::believe(k, body).unwrap());
    atom.prop_recursive(2, 6, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::or(a, b)),
        ]
    })
}
