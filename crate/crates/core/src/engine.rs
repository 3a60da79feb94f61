//! Subsumption, unit propagation and the closure of a clause set under both,
//! kept in subsumption-minimal form.

use std::collections::HashMap;
use std::sync::Arc;

use crate::lang::{Clause, Literal, Term};

/// `c1` subsumes `c2` when every positive `t=n` of `c1` is matched in `c2`
/// by `t=n` or by some `t!=n'` with `n' != n`, and every negative literal of
/// `c1` occurs in `c2`. The empty clause subsumes everything.
pub fn subsumes(c1: &Clause, c2: &Clause) -> bool {
    if c1.signature() & !c2.signature() != 0 {
        return false;
    }
    let lits2 = c2.literals();
    c1.iter().all(|l1| {
        // Literals of c2 are sorted by term first.
        let start = lits2.partition_point(|l2| l2.term() < l1.term());
        lits2[start..]
            .iter()
            .take_while(|l2| l2.term() == l1.term())
            .any(|l2| l1.subsumes(l2))
    })
}

/// `c` without the literals complementary to `l`.
pub fn unit_propagate(c: &Clause, l: Literal) -> Clause {
    if !c.iter().any(|m| m.complementary(&l)) {
        return c.clone();
    }
    Clause::from_sorted(c.iter().copied().filter(|m| !m.complementary(&l)).collect())
}

/// Whether `a` should be kept over an equivalent `b` (each subsumes the other):
/// fewer literals first, then canonical order.
fn preferred(a: &Clause, b: &Clause) -> bool {
    (a.len(), a) < (b.len(), b)
}

/// A clause set closed under unit propagation and subsumption.
///
/// Only the subsumption-minimal members are stored. An inconsistent setup is
/// exactly `{∅}`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Setup {
    clauses: Arc<[Clause]>,
    inconsistent: bool,
}

impl Default for Setup {
    fn default() -> Self {
        Setup::empty()
    }
}

impl Setup {
    pub fn empty() -> Setup {
        Setup {
            clauses: Arc::from(Vec::new()),
            inconsistent: false,
        }
    }

    /// Closure of `clauses`. Insertion follows canonical clause order, so the
    /// result does not depend on input order.
    pub fn close(clauses: impl IntoIterator<Item = Clause>) -> Setup {
        let mut input: Vec<Clause> = clauses.into_iter().collect();
        input.sort();
        input.dedup();
        let mut closure = Closure::default();
        for c in input {
            closure.insert(c);
            if closure.inconsistent {
                break;
            }
        }
        closure.finish()
    }

    /// `close(self.minimal() ∪ {{l}})`, computed incrementally.
    pub fn assert_unit(&self, l: Literal) -> Setup {
        if self.inconsistent {
            return self.clone();
        }
        let unit = Clause::unit(l);
        if self.clauses.binary_search(&unit).is_ok() {
            return self.clone();
        }
        let mut closure = Closure::from_setup(self);
        closure.insert(unit);
        closure.finish()
    }

    /// Membership of `c` in the weakening of the closure: true iff some member
    /// subsumes `c`. Always true for an inconsistent setup.
    pub fn contains(&self, c: &Clause) -> bool {
        self.inconsistent || self.clauses.iter().any(|m| subsumes(m, c))
    }

    pub fn is_inconsistent(&self) -> bool {
        self.inconsistent
    }

    /// Minimal members in canonical order.
    pub fn minimal(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }
}

/// Worklist builder behind `Setup::close` and `Setup::assert_unit`.
#[derive(Default)]
struct Closure {
    slots: Vec<Option<Clause>>,
    by_term: HashMap<Term, Vec<usize>>,
    units: HashMap<Term, Vec<(Literal, usize)>>,
    inconsistent: bool,
    pending: Vec<Clause>,
    stamp: Vec<u32>,
    epoch: u32,
}

impl Closure {
    /// Loads an already closed setup without re-checking it.
    fn from_setup(s: &Setup) -> Closure {
        let mut closure = Closure::default();
        for c in s.minimal() {
            closure.add(c.clone());
        }
        closure
    }

    fn add(&mut self, c: Clause) -> usize {
        let slot = self.slots.len();
        let mut last: Option<Term> = None;
        for t in c.terms() {
            if last != Some(t) {
                self.by_term.entry(t).or_default().push(slot);
                last = Some(t);
            }
        }
        if let Some(l) = c.as_unit() {
            self.units.entry(l.term()).or_default().push((l, slot));
        }
        self.slots.push(Some(c));
        self.stamp.push(0);
        slot
    }

    fn remove(&mut self, slot: usize) {
        if let Some(c) = self.slots[slot].take() {
            if let Some(l) = c.as_unit() {
                if let Some(list) = self.units.get_mut(&l.term()) {
                    list.retain(|&(_, s)| s != slot);
                }
            }
        }
    }

    /// Drops literals refuted by a current unit member.
    fn reduce(&self, c: Clause) -> Clause {
        let refuted = |l: &Literal| {
            self.units
                .get(&l.term())
                .is_some_and(|us| us.iter().any(|(u, _)| u.complementary(l)))
        };
        if !c.iter().any(refuted) {
            return c;
        }
        Clause::from_sorted(c.iter().copied().filter(|l| !refuted(l)).collect())
    }

    /// Live slots that share at least one term with `c`, each reported once.
    fn neighbours(&mut self, c: &Clause) -> Vec<usize> {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        let mut out = Vec::new();
        let mut last: Option<Term> = None;
        for t in c.terms() {
            if last == Some(t) {
                continue;
            }
            last = Some(t);
            if let Some(list) = self.by_term.get(&t) {
                for &slot in list {
                    if self.slots[slot].is_some() && self.stamp[slot] != self.epoch {
                        self.stamp[slot] = self.epoch;
                        out.push(slot);
                    }
                }
            }
        }
        out
    }

    fn insert(&mut self, c: Clause) {
        self.pending.push(c);
        while let Some(c) = self.pending.pop() {
            let c = self.reduce(c);
            if c.is_empty() {
                self.inconsistent = true;
                self.pending.clear();
                return;
            }
            let candidates = self.neighbours(&c);
            let mut dominated = false;
            let mut doomed = Vec::new();
            for &slot in &candidates {
                let m = self.slots[slot].as_ref().expect("live slot");
                let m_sub_c = subsumes(m, &c);
                let c_sub_m = subsumes(&c, m);
                if m_sub_c && !(c_sub_m && preferred(&c, m)) {
                    dominated = true;
                    break;
                }
                if c_sub_m {
                    doomed.push(slot);
                }
            }
            if dominated {
                continue;
            }
            for slot in doomed {
                self.remove(slot);
            }
            let unit = c.as_unit();
            let slot = self.add(c);
            if let Some(l) = unit {
                if let Some(list) = self.by_term.get(&l.term()) {
                    let mut derived = Vec::new();
                    for &other in list {
                        if other == slot {
                            continue;
                        }
                        if let Some(m) = &self.slots[other] {
                            if m.iter().any(|x| x.complementary(&l)) {
                                derived.push(unit_propagate(m, l));
                            }
                        }
                    }
                    // Reverse so the worklist pops them in member order.
                    self.pending.extend(derived.into_iter().rev());
                }
            }
        }
    }

    fn finish(self) -> Setup {
        if self.inconsistent {
            return Setup {
                clauses: Arc::from(vec![Clause::empty()]),
                inconsistent: true,
            };
        }
        let mut clauses: Vec<Clause> = self.slots.into_iter().flatten().collect();
        clauses.sort();
        Setup {
            clauses: clauses.into(),
            inconsistent: false,
        }
    }
}
