//! Seeded random instances.
//!
//! The generator is ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `seed_from_u64(seed)`. Every draw is `next_u64() % n`, so output depends
//! only on `(seed, params)` and not on the platform. Draws happen in this
//! order: for each KB clause its width in `1..=width`, then per literal the
//! term index, the sign (0 is positive) and the name index; then the number
//! of query clauses in `1..=2` and those clauses drawn the same way. Terms
//! are `f0..`, names `n0..`.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use thiserror::Error;

use crate::lang::{Clause, Formula, Literal, Name, Term};
use crate::solver::Instance;

pub const MAX_TERMS: usize = 64;
pub const MAX_NAMES: usize = 64;
pub const MAX_CLAUSES: usize = 10_000;
pub const MAX_WIDTH: usize = 16;
pub const MAX_LEVEL: u32 = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenParams {
    pub terms: usize,
    pub names: usize,
    pub clauses: usize,
    pub width: usize,
    pub level: u32,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{field} = {value} is outside {min}..={max}")]
pub struct GenError {
    pub field: &'static str,
    pub value: usize,
    pub min: usize,
    pub max: usize,
}

impl GenParams {
    pub fn check(&self) -> Result<(), GenError> {
        let bound = |field, value: usize, min, max| {
            if (min..=max).contains(&value) {
                Ok(())
            } else {
                Err(GenError { field, value, min, max })
            }
        };
        bound("terms", self.terms, 1, MAX_TERMS)?;
        bound("names", self.names, 1, MAX_NAMES)?;
        bound("clauses", self.clauses, 0, MAX_CLAUSES)?;
        bound("width", self.width, 1, MAX_WIDTH)?;
        bound("level", self.level as usize, 0, MAX_LEVEL as usize)
    }
}

struct Draw {
    rng: ChaCha8Rng,
    terms: Vec<Term>,
    names: Vec<Name>,
}

impl Draw {
    fn below(&mut self, n: usize) -> usize {
        (self.rng.next_u64() % n as u64) as usize
    }

    fn clause(&mut self, width: usize) -> Clause {
        let w = 1 + self.below(width);
        Clause::new((0..w).map(|_| {
            let t = self.below(self.terms.len());
            let positive = self.below(2) == 0;
            let n = self.below(self.names.len());
            Literal::new(self.terms[t], self.names[n], positive)
        }))
    }
}

pub fn gen_random_instance(seed: u64, p: GenParams) -> Result<Instance, GenError> {
    p.check()?;
    let mut d = Draw {
        rng: ChaCha8Rng::seed_from_u64(seed),
        terms: (0..p.terms).map(|i| Term::constant(&format!("f{i}"))).collect(),
        names: (0..p.names).map(|i| Name::new(&format!("n{i}"))).collect(),
    };
    let kb: Vec<Clause> = (0..p.clauses).map(|_| d.clause(p.width)).collect();
    let query_clauses = 1 + d.below(2);
    let parts = (0..query_clauses).map(|_| {
        let c = d.clause(p.width);
        Formula::from_clause(&c).expect("width >= 1")
    });
    let query = Formula::conjunction(parts).expect("at least one clause");
    Ok(Instance {
        kb,
        query,
        level: p.level,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::print_problem;

    const SMALL: GenParams = GenParams { terms: 3, names: 2, clauses: 4, width: 2, level: 1 };

    #[test]
    fn deterministic() {
        let a = print_problem(&gen_random_instance(7, SMALL).unwrap()).unwrap();
        let b = print_problem(&gen_random_instance(7, SMALL).unwrap()).unwrap();
        assert_eq!(a, b);
        let c = print_problem(&gen_random_instance(8, SMALL).unwrap()).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn respects_bounds() {
        for seed in 0..50 {
            let inst = gen_random_instance(seed, SMALL).unwrap();
            assert!(inst.terms().len() <= 3);
            assert!(inst.names().len() <= 2);
            assert_eq!(inst.kb.len(), 4);
            assert!(inst.kb.iter().all(|c| (1..=2).contains(&c.len())));
            assert_eq!(inst.level, 1);
        }
    }

    #[test]
    fn rejects_out_of_range() {
        let p = GenParams { width: 0, ..SMALL };
        assert_eq!(gen_random_instance(0, p).unwrap_err().field, "width");
        let p = GenParams { terms: 65, ..SMALL };
        assert!(gen_random_instance(0, p).is_err());
    }
}
