//! Classical possible-worlds semantics by brute force.
//!
//! A world maps every mentioned term to a name. Literals only compare terms
//! with mentioned names, so every unmentioned value behaves alike and one
//! extra name (`@fresh`) stands in for all of them.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::lang::{collect_literal_names, Clause, Formula, Literal, Name, Term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("term {0} is not in the world's universe")]
    Unmapped(String),
    #[error("belief operators have no classical reading")]
    NotObjective,
}

/// A total assignment of names to a finite universe of terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct World {
    terms: Vec<Term>,
    values: Vec<Name>,
}

impl World {
    pub fn new(assignment: impl IntoIterator<Item = (Term, Name)>) -> World {
        let mut pairs: Vec<(Term, Name)> = assignment.into_iter().collect();
        pairs.sort_by_key(|p| p.0);
        pairs.dedup_by(|a, b| a.0 == b.0);
        let (terms, values) = pairs.into_iter().unzip();
        World { terms, values }
    }

    pub fn get(&self, t: Term) -> Option<Name> {
        self.terms.binary_search(&t).ok().map(|i| self.values[i])
    }

    fn literal(&self, l: &Literal) -> Result<bool, OracleError> {
        let value = self
            .get(l.term())
            .ok_or_else(|| OracleError::Unmapped(l.term().to_string()))?;
        Ok((value == l.name()) == l.is_positive())
    }

    pub fn satisfies_clause(&self, c: &Clause) -> Result<bool, OracleError> {
        for l in c.iter() {
            if self.literal(l)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

pub fn world_eval(w: &World, phi: &Formula) -> Result<bool, OracleError> {
    match phi {
        Formula::Lit(l) => w.literal(l),
        Formula::Not(f) => Ok(!world_eval(w, f)?),
        Formula::Or(a, b) => Ok(world_eval(w, a)? || world_eval(w, b)?),
        Formula::Believe(..) => Err(OracleError::NotObjective),
    }
}

/// Whether every world satisfying all `clauses` satisfies `phi`, ranging
/// over mentioned names plus `@fresh`.
pub fn entails(clauses: &[Clause], phi: &Formula) -> Result<bool, OracleError> {
    entails_with(clauses, phi, &[Name::fresh()])
}

/// Classical reading of a query that may contain belief atoms: each belief
/// atom and each maximal objective subformula is replaced by whether the
/// KB entails it, ignoring levels.
pub fn entails_query(kb: &[Clause], phi: &Formula) -> Result<bool, OracleError> {
    if phi.is_objective() {
        return entails(kb, phi);
    }
    match phi {
        Formula::Not(f) => Ok(!entails_query(kb, f)?),
        Formula::Or(a, b) => Ok(entails_query(kb, a)? || entails_query(kb, b)?),
        Formula::Believe(_, body) => entails(kb, body),
        Formula::Lit(_) => unreachable!("literals are objective"),
    }
}

/// `entails` with a caller-chosen list of extra names.
pub fn entails_with(clauses: &[Clause], phi: &Formula, extra: &[Name]) -> Result<bool, OracleError> {
    if !phi.is_objective() {
        return Err(OracleError::NotObjective);
    }
    let mut terms: BTreeSet<Term> = clauses.iter().flat_map(|c| c.terms()).collect();
    phi.collect_terms(&mut terms);
    let mut names: BTreeSet<Name> = BTreeSet::new();
    for c in clauses {
        for l in c.iter() {
            collect_literal_names(l, &mut names);
        }
    }
    phi.collect_names(&mut names);
    names.extend(extra.iter().copied());
    let terms: Vec<Term> = terms.into_iter().collect();
    let names: Vec<Name> = names.into_iter().collect();

    let mut digits = vec![0usize; terms.len()];
    let mut world = World {
        values: vec![names[0]; terms.len()],
        terms,
    };
    loop {
        let mut model = true;
        for c in clauses {
            if !world.satisfies_clause(c)? {
                model = false;
                break;
            }
        }
        if model && !world_eval(&world, phi)? {
            return Ok(false);
        }
        // Odometer step over name indices.
        let mut i = 0;
        loop {
            if i == digits.len() {
                return Ok(true);
            }
            digits[i] += 1;
            if digits[i] < names.len() {
                world.values[i] = names[digits[i]];
                break;
            }
            digits[i] = 0;
            world.values[i] = names[0];
            i += 1;
        }
    }
}
