mod common;

use common::{clause, literal};
use limbel::format::parse_formula;
use limbel::lang::{Clause, Formula};
use proptest::prelude::*;

proptest! {
    #[test]
    fn negate_is_an_involution(l in literal()) {
        prop_assert_eq!(l.negate().negate(), l);
        prop_assert_ne!(l.negate(), l);
    }

    #[test]
    fn complementary_is_symmetric_and_irreflexive(a in literal(), b in literal()) {
        prop_assert_eq!(a.complementary(&b), b.complementary(&a));
        prop_assert!(!a.complementary(&a));
        if a.term() != b.term() {
            prop_assert!(!a.complementary(&b));
        }
        prop_assert!(a.complementary(&a.negate()));
    }

    #[test]
    fn canonical_clause_is_idempotent_and_order_free(
        lits in prop::collection::vec(literal(), 0..6),
        rotate in 0usize..6,
    ) {
        let c = Clause::new(lits.clone());
        prop_assert_eq!(Clause::new(c.literals().to_vec()), c.clone());
        let mut shuffled = lits.clone();
        if !shuffled.is_empty() {
            let r = rotate % shuffled.len();
            shuffled.rotate_left(r);
        }
        shuffled.reverse();
        prop_assert_eq!(Clause::new(shuffled), c);
    }

    #[test]
    fn printed_clause_parses_back(c in clause(4)) {
        let text = Formula::from_clause(&c).unwrap().to_string();
        let parsed = parse_formula(&text).unwrap();
        prop_assert_eq!(parsed.as_clause(), Some(c));
    }
}
