//! Two small worked instances used throughout the tests and the CLI docs.
//!
//! FATHER: Sally's father is Frank or Fred and both are rich, so Sally's
//! father is rich, but only after splitting on `fatherOf(Sally)`.
//!
//! ORDER: `h=T` follows at level 2 only when `f` is split before `g1`/`g2`.

use crate::format::parse_literal;
use crate::lang::{Clause, Formula, Literal};
use crate::solver::Instance;

pub const FATHER_TEXT: &str = "\
level 1
kb {
  fatherOf(Sally)=Frank | fatherOf(Sally)=Fred
  fatherOf(Sally)!=Frank | rich(Frank)=T
  fatherOf(Sally)!=Fred | rich(Fred)=T
}
query {
  rich(Frank)=T | rich(Fred)=T
}
";

pub const ORDER_TEXT: &str = "\
level 2
kb {
  f=T | g1=T | h=T
  f!=T | g2=T | h=T
  f=T | g1!=T | h=T
  f!=T | g2!=T | h=T
}
query {
  h=T
}
";

/// Parses a literal; panics on malformed input.
pub fn lit(text: &str) -> Literal {
    parse_literal(text).unwrap_or_else(|e| panic!("bad literal `{text}`: {e}"))
}

fn clause(text: &str) -> Clause {
    Clause::new(text.split('|').map(|l| lit(l.trim())))
}

pub fn father_kb() -> Vec<Clause> {
    [
        "fatherOf(Sally)=Frank | fatherOf(Sally)=Fred",
        "fatherOf(Sally)!=Frank | rich(Frank)=T",
        "fatherOf(Sally)!=Fred | rich(Fred)=T",
    ]
    .into_iter()
    .map(clause)
    .collect()
}

pub fn father(level: u32) -> Instance {
    let query = Formula::or(
        Formula::lit(lit("rich(Frank)=T")),
        Formula::lit(lit("rich(Fred)=T")),
    );
    Instance {
        kb: father_kb(),
        query,
        level,
    }
}

pub fn order_kb() -> Vec<Clause> {
    [
        "f=T | g1=T | h=T",
        "f!=T | g2=T | h=T",
        "f=T | g1!=T | h=T",
        "f!=T | g2!=T | h=T",
    ]
    .into_iter()
    .map(clause)
    .collect()
}

pub fn order(level: u32) -> Instance {
    Instance {
        kb: order_kb(),
        query: Formula::lit(lit("h=T")),
        level,
    }
}
