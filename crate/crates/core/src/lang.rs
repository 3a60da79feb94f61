//! Vocabulary shared by every other module: interned symbols, standard names,
//! function terms, literals, clauses and formulas.
//!
//! Symbols are interned process-wide. Equality and hashing go through the
//! interned pointer, ordering is lexicographic on the text, so enumeration
//! order never depends on which symbol happened to be interned first.

use std::cmp::Ordering;
use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex, OnceLock};

use thiserror::Error;

/// Name of the extra split value used by the solver and the classical oracle.
pub const FRESH_NAME: &str = "@fresh";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LangError {
    #[error("belief operator nested inside B {0}")]
    NestedBelief(u32),
    #[error("`{0}` is not a valid identifier")]
    BadIdentifier(String),
}

/// An interned identifier.
#[derive(Clone, Copy)]
pub struct Sym(&'static str);

fn symbol_table() -> &'static Mutex<HashSet<&'static str>> {
    static TABLE: OnceLock<Mutex<HashSet<&'static str>>> = OnceLock::new();
    TABLE.get_or_init(|| Mutex::new(HashSet::new()))
}

impl Sym {
    pub fn new(text: &str) -> Sym {
        let mut table = symbol_table().lock().unwrap_or_else(|e| e.into_inner());
        if let Some(&s) = table.get(text) {
            return Sym(s);
        }
        let leaked: &'static str = Box::leak(text.to_owned().into_boxed_str());
        table.insert(leaked);
        Sym(leaked)
    }

    pub fn as_str(&self) -> &'static str {
        self.0
    }

    /// Symbols starting with `@` are reserved for generated vocabulary.
    pub fn is_reserved(&self) -> bool {
        self.0.starts_with('@')
    }
}

impl PartialEq for Sym {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.0.as_ptr(), other.0.as_ptr()) && self.0.len() == other.0.len()
    }
}

impl Eq for Sym {}

impl Hash for Sym {
    fn hash<H: Hasher>(&self, state: &mut H) {
        (self.0.as_ptr() as usize).hash(state)
    }
}

impl Ord for Sym {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            Ordering::Equal
        } else {
            self.0.cmp(other.0)
        }
    }
}

impl PartialOrd for Sym {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.0)
    }
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.0)
    }
}

/// `[A-Za-z_][A-Za-z0-9_]*`
pub fn is_identifier(text: &str) -> bool {
    let mut chars = text.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Reserved symbols emitted by the ordering gadget: `@t`, `@w<i>_<j>`, `@o<i>_<j>`.
pub fn is_generated_symbol(text: &str) -> bool {
    if text == "@t" {
        return true;
    }
    let rest = match text.strip_prefix("@w").or_else(|| text.strip_prefix("@o")) {
        Some(rest) => rest,
        None => return false,
    };
    match rest.split_once('_') {
        Some((stage, index)) => {
            !stage.is_empty()
                && !index.is_empty()
                && stage.bytes().all(|b| b.is_ascii_digit())
                && index.bytes().all(|b| b.is_ascii_digit())
        }
        None => false,
    }
}

/// A standard name. Distinct names denote distinct individuals.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Name(Sym);

impl Name {
    pub fn new(text: &str) -> Name {
        Name(Sym::new(text))
    }

    /// The reserved split value `@fresh`.
    pub fn fresh() -> Name {
        Name::new(FRESH_NAME)
    }

    pub fn sym(&self) -> Sym {
        self.0
    }

    pub fn as_str(&self) -> &'static str {
        self.0.as_str()
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(PartialEq, Eq, Hash)]
struct TermData {
    symbol: Sym,
    args: Box<[Name]>,
}

fn term_table() -> &'static Mutex<HashSet<&'static TermData>> {
    static TABLE: OnceLock<Mutex<HashSet<&'static TermData>>> = OnceLock::new();
    TABLE.get_or_init(|| Mutex::new(HashSet::new()))
}

/// A function symbol applied to standard names, e.g. `fatherOf(Sally)` or a
/// 0-ary `p`. Interned, so copies are free and equality is a pointer compare.
#[derive(Clone, Copy)]
pub struct Term(&'static TermData);

impl Term {
    pub fn new(symbol: &str, args: &[Name]) -> Term {
        let key = TermData {
            symbol: Sym::new(symbol),
            args: args.into(),
        };
        let mut table = term_table().lock().unwrap_or_else(|e| e.into_inner());
        if let Some(&data) = table.get(&key) {
            return Term(data);
        }
        let leaked: &'static TermData = Box::leak(Box::new(key));
        table.insert(leaked);
        Term(leaked)
    }

    pub fn constant(symbol: &str) -> Term {
        Term::new(symbol, &[])
    }

    pub fn symbol(&self) -> Sym {
        self.0.symbol
    }

    pub fn args(&self) -> &'static [Name] {
        &self.0.args
    }

    pub fn arity(&self) -> usize {
        self.0.args.len()
    }

    pub fn eq_name(self, name: Name) -> Literal {
        Literal::new(self, name, true)
    }

    pub fn neq_name(self, name: Name) -> Literal {
        Literal::new(self, name, false)
    }

    /// One bit of a 64-bit clause signature.
    pub(crate) fn signature_bit(&self) -> u64 {
        let addr = self.0 as *const TermData as usize as u64;
        1u64 << ((addr >> 4).wrapping_mul(0x9E37_79B9_7F4A_7C15) >> 58)
    }
}

impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.0, other.0)
    }
}

impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        (self.0 as *const TermData as usize).hash(state)
    }
}

impl Ord for Term {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        self.0
            .symbol
            .cmp(&other.0.symbol)
            .then_with(|| self.0.args.cmp(&other.0.args))
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol().as_str())?;
        if !self.args().is_empty() {
            f.write_str("(")?;
            for (i, arg) in self.args().iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                f.write_str(arg.as_str())?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `t = n` when `positive`, `t != n` otherwise.
///
/// Field order gives the canonical total order (term, sign, name).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    term: Term,
    positive: bool,
    name: Name,
}

impl Literal {
    pub fn new(term: Term, name: Name, positive: bool) -> Literal {
        Literal {
            term,
            positive,
            name,
        }
    }

    pub fn term(&self) -> Term {
        self.term
    }

    pub fn name(&self) -> Name {
        self.name
    }

    pub fn is_positive(&self) -> bool {
        self.positive
    }

    pub fn negate(self) -> Literal {
        Literal {
            positive: !self.positive,
            ..self
        }
    }

    /// `t = n` against `t != n`, or `t = n` against `t = n'` with `n != n'`.
    pub fn complementary(&self, other: &Literal) -> bool {
        if self.term != other.term {
            return false;
        }
        match (self.positive, other.positive) {
            (true, true) => self.name != other.name,
            (true, false) | (false, true) => self.name == other.name,
            (false, false) => false,
        }
    }

    /// Whether the unit clause `{self}` subsumes the unit clause `{other}`.
    pub fn subsumes(&self, other: &Literal) -> bool {
        if self.term != other.term {
            return false;
        }
        match (self.positive, other.positive) {
            (true, true) | (false, false) => self.name == other.name,
            (true, false) => self.name != other.name,
            (false, true) => false,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = if self.positive { "=" } else { "!=" };
        write!(f, "{}{}{}", self.term, op, self.name)
    }
}

impl fmt::Debug for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A set of literals read disjunctively, kept sorted and duplicate-free.
///
/// Carries a precomputed term signature (for subsumption prefilters) and hash.
#[derive(Clone)]
pub struct Clause {
    lits: Arc<[Literal]>,
    sig: u64,
    hash: u64,
}

impl Clause {
    /// Sorts and deduplicates; the result does not depend on input order.
    pub fn new(lits: impl IntoIterator<Item = Literal>) -> Clause {
        let mut lits: Vec<Literal> = lits.into_iter().collect();
        lits.sort_unstable();
        lits.dedup();
        Clause::from_sorted(lits)
    }

    pub fn empty() -> Clause {
        Clause::from_sorted(Vec::new())
    }

    pub fn unit(lit: Literal) -> Clause {
        Clause::from_sorted(vec![lit])
    }

    /// `lits` must already be in canonical order without duplicates.
    pub(crate) fn from_sorted(lits: Vec<Literal>) -> Clause {
        debug_assert!(lits.windows(2).all(|w| w[0] < w[1]));
        let mut sig = 0u64;
        let mut hasher = DefaultHasher::new();
        for l in &lits {
            sig |= l.term.signature_bit();
            l.hash(&mut hasher);
        }
        lits.len().hash(&mut hasher);
        Clause {
            lits: lits.into(),
            sig,
            hash: hasher.finish(),
        }
    }

    pub fn literals(&self) -> &[Literal] {
        &self.lits
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Literal> {
        self.lits.iter()
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn as_unit(&self) -> Option<Literal> {
        match &*self.lits {
            [l] => Some(*l),
            _ => None,
        }
    }

    pub fn contains(&self, lit: &Literal) -> bool {
        self.lits.binary_search(lit).is_ok()
    }

    pub(crate) fn signature(&self) -> u64 {
        self.sig
    }

    pub fn terms(&self) -> impl Iterator<Item = Term> + '_ {
        self.lits.iter().map(|l| l.term)
    }
}

impl PartialEq for Clause {
    fn eq(&self, other: &Self) -> bool {
        self.hash == other.hash && self.lits == other.lits
    }
}

impl Eq for Clause {}

impl Hash for Clause {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.hash)
    }
}

impl Ord for Clause {
    fn cmp(&self, other: &Self) -> Ordering {
        self.lits.cmp(&other.lits)
    }
}

impl PartialOrd for Clause {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("{}");
        }
        for (i, l) in self.lits.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{self}}}")
    }
}

impl FromIterator<Literal> for Clause {
    fn from_iter<I: IntoIterator<Item = Literal>>(iter: I) -> Self {
        Clause::new(iter)
    }
}

/// Objective formulas plus non-nested belief atoms `B k φ`.
///
/// Conjunction is not a variant: `and(a, b)` is stored as `~(~a | ~b)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Lit(Literal),
    Not(Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Believe(u32, Box<Formula>),
}

impl Formula {
    pub fn lit(l: Literal) -> Formula {
        Formula::Lit(l)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::or(Formula::not(a), Formula::not(b)))
    }

    /// `B k body`; the body must be objective.
    pub fn believe(level: u32, body: Formula) -> Result<Formula, LangError> {
        if !body.is_objective() {
            return Err(LangError::NestedBelief(level));
        }
        Ok(Formula::Believe(level, Box::new(body)))
    }

    /// Left-nested disjunction; `None` for an empty iterator.
    pub fn disjunction(items: impl IntoIterator<Item = Formula>) -> Option<Formula> {
        items.into_iter().reduce(Formula::or)
    }

    /// Left-nested conjunction; `None` for an empty iterator.
    pub fn conjunction(items: impl IntoIterator<Item = Formula>) -> Option<Formula> {
        items.into_iter().reduce(Formula::and)
    }

    /// The clause as a disjunction of its literals. `None` for the empty clause.
    pub fn from_clause(c: &Clause) -> Option<Formula> {
        Formula::disjunction(c.iter().map(|&l| Formula::Lit(l)))
    }

    /// Splits `~(~a | ~b)` back into `(a, b)`.
    pub fn as_and(&self) -> Option<(&Formula, &Formula)> {
        if let Formula::Not(inner) = self {
            if let Formula::Or(a, b) = &**inner {
                if let (Formula::Not(a), Formula::Not(b)) = (&**a, &**b) {
                    return Some((a, b));
                }
            }
        }
        None
    }

    pub fn is_objective(&self) -> bool {
        match self {
            Formula::Lit(_) => true,
            Formula::Not(f) => f.is_objective(),
            Formula::Or(a, b) => a.is_objective() && b.is_objective(),
            Formula::Believe(..) => false,
        }
    }

    /// Checks that every belief body is objective.
    pub fn check_nesting(&self) -> Result<(), LangError> {
        match self {
            Formula::Lit(_) => Ok(()),
            Formula::Not(f) => f.check_nesting(),
            Formula::Or(a, b) => {
                a.check_nesting()?;
                b.check_nesting()
            }
            Formula::Believe(k, body) => {
                if body.is_objective() {
                    Ok(())
                } else {
                    Err(LangError::NestedBelief(*k))
                }
            }
        }
    }

    /// The clause view of a disjunction tree whose leaves reduce to literals
    /// once double negations are stripped and `~(t=n)` is read as `t!=n`.
    pub fn as_clause(&self) -> Option<Clause> {
        let mut lits = Vec::new();
        if self.collect_disjuncts(&mut lits) {
            Some(Clause::new(lits))
        } else {
            None
        }
    }

    fn collect_disjuncts(&self, out: &mut Vec<Literal>) -> bool {
        match self {
            Formula::Or(a, b) => a.collect_disjuncts(out) && b.collect_disjuncts(out),
            leaf => match leaf.leaf_literal() {
                Some(l) => {
                    out.push(l);
                    true
                }
                None => false,
            },
        }
    }

    /// The literal this formula denotes after stripping negations, if any.
    pub fn leaf_literal(&self) -> Option<Literal> {
        let mut negated = false;
        let mut f = self;
        loop {
            match f {
                Formula::Lit(l) => return Some(if negated { l.negate() } else { *l }),
                Formula::Not(inner) => {
                    negated = !negated;
                    f = inner;
                }
                _ => return None,
            }
        }
    }

    pub fn for_each_literal(&self, visit: &mut impl FnMut(&Literal)) {
        match self {
            Formula::Lit(l) => visit(l),
            Formula::Not(f) | Formula::Believe(_, f) => f.for_each_literal(visit),
            Formula::Or(a, b) => {
                a.for_each_literal(visit);
                b.for_each_literal(visit);
            }
        }
    }

    pub fn collect_terms(&self, out: &mut BTreeSet<Term>) {
        self.for_each_literal(&mut |l| {
            out.insert(l.term());
        });
    }

    /// Names occurring in the formula, including names inside term arguments.
    pub fn collect_names(&self, out: &mut BTreeSet<Name>) {
        self.for_each_literal(&mut |l| collect_literal_names(l, out));
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        if let Some((a, b)) = self.as_and() {
            if prec > 2 {
                f.write_str("(")?;
            }
            a.fmt_prec(f, 2)?;
            f.write_str(" & ")?;
            b.fmt_prec(f, 3)?;
            if prec > 2 {
                f.write_str(")")?;
            }
            return Ok(());
        }
        match self {
            Formula::Lit(l) => write!(f, "{l}"),
            Formula::Not(inner) => {
                f.write_str("~")?;
                inner.fmt_prec(f, 3)
            }
            Formula::Believe(k, inner) => {
                write!(f, "B {k} ")?;
                inner.fmt_prec(f, 3)
            }
            Formula::Or(a, b) => {
                if prec > 1 {
                    f.write_str("(")?;
                }
                a.fmt_prec(f, 1)?;
                f.write_str(" | ")?;
                b.fmt_prec(f, 2)?;
                if prec > 1 {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

pub(crate) fn collect_literal_names(l: &Literal, out: &mut BTreeSet<Name>) {
    out.insert(l.name());
    out.extend(l.term().args().iter().copied());
}

/// Prints in the problem-file formula syntax, with the minimum parentheses
/// needed to reparse to the same tree.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
