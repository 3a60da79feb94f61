//! Fully quantified Boolean formulas in prenex CNF, a naive evaluator, and
//! QDIMACS reading and writing.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Forall,
    Exists,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QbfError {
    #[error("variable {0} is quantified more than once")]
    Requantified(u32),
    #[error("variable {0} occurs in the matrix but is not quantified")]
    Free(u32),
    #[error("variable 0 is not allowed")]
    ZeroVariable,
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

/// `prefix` is outermost first; each matrix clause is a list of signed
/// variable ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Qbf {
    prefix: Vec<(Quantifier, u32)>,
    matrix: Vec<Vec<i32>>,
}

impl Qbf {
    pub fn new(prefix: Vec<(Quantifier, u32)>, matrix: Vec<Vec<i32>>) -> Result<Qbf, QbfError> {
        let mut seen = BTreeSet::new();
        for &(_, v) in &prefix {
            if v == 0 {
                return Err(QbfError::ZeroVariable);
            }
            if !seen.insert(v) {
                return Err(QbfError::Requantified(v));
            }
        }
        for clause in &matrix {
            for &lit in clause {
                if lit == 0 {
                    return Err(QbfError::ZeroVariable);
                }
                if !seen.contains(&lit.unsigned_abs()) {
                    return Err(QbfError::Free(lit.unsigned_abs()));
                }
            }
        }
        Ok(Qbf { prefix, matrix })
    }

    pub fn prefix(&self) -> &[(Quantifier, u32)] {
        &self.prefix
    }

    pub fn matrix(&self) -> &[Vec<i32>] {
        &self.matrix
    }

    /// Recursive expansion, outermost quantifier first.
    pub fn eval(&self) -> bool {
        let index: HashMap<u32, usize> = self
            .prefix
            .iter()
            .enumerate()
            .map(|(i, &(_, v))| (v, i))
            .collect();
        let matrix: Vec<Vec<(usize, bool)>> = self
            .matrix
            .iter()
            .map(|c| c.iter().map(|&l| (index[&l.unsigned_abs()], l > 0)).collect())
            .collect();
        let mut values = vec![false; self.prefix.len()];
        expand(&self.prefix, &matrix, &mut values, 0)
    }

    /// QDIMACS text with one prefix line per maximal run of equal quantifiers.
    pub fn to_qdimacs(&self) -> String {
        let max_var = self.prefix.iter().map(|&(_, v)| v).max().unwrap_or(0);
        let mut out = format!("p cnf {} {}\n", max_var, self.matrix.len());
        let mut i = 0;
        while i < self.prefix.len() {
            let q = self.prefix[i].0;
            out.push(if q == Quantifier::Forall { 'a' } else { 'e' });
            while i < self.prefix.len() && self.prefix[i].0 == q {
                let _ = write!(out, " {}", self.prefix[i].1);
                i += 1;
            }
            out.push_str(" 0\n");
        }
        for clause in &self.matrix {
            for l in clause {
                let _ = write!(out, "{l} ");
            }
            out.push_str("0\n");
        }
        out
    }
}

fn expand(
    prefix: &[(Quantifier, u32)],
    matrix: &[Vec<(usize, bool)>],
    values: &mut [bool],
    depth: usize,
) -> bool {
    if depth == prefix.len() {
        return matrix
            .iter()
            .all(|c| c.iter().any(|&(v, positive)| values[v] == positive));
    }
    let branch = |value: bool, values: &mut [bool]| {
        values[depth] = value;
        expand(prefix, matrix, values, depth + 1)
    };
    match prefix[depth].0 {
        Quantifier::Forall => branch(false, values) && branch(true, values),
        Quantifier::Exists => branch(false, values) || branch(true, values),
    }
}

pub fn qbf_eval(q: &Qbf) -> bool {
    q.eval()
}

/// Reads QDIMACS: comment lines, a `p cnf V C` header, `a`/`e` prefix
/// lines ending in 0, then clauses ending in 0 (which may span lines).
pub fn parse_qdimacs(text: &str) -> Result<Qbf, QbfError> {
    let syntax = |line: usize, message: String| QbfError::Syntax { line, message };
    let mut header: Option<(u32, usize)> = None;
    let mut prefix = Vec::new();
    let mut matrix = Vec::new();
    let mut current: Vec<i32> = Vec::new();
    let mut in_matrix = false;
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let mut words = line.split_whitespace();
        let first = words.next().expect("non-empty line");
        if first == "p" {
            if header.is_some() {
                return Err(syntax(line_no, "duplicate header".into()));
            }
            let fields: Vec<&str> = words.collect();
            if fields.len() != 3 || fields[0] != "cnf" {
                return Err(syntax(line_no, "expected `p cnf <vars> <clauses>`".into()));
            }
            let vars = fields[1]
                .parse::<u32>()
                .map_err(|_| syntax(line_no, format!("bad variable count `{}`", fields[1])))?;
            let clauses = fields[2]
                .parse::<usize>()
                .map_err(|_| syntax(line_no, format!("bad clause count `{}`", fields[2])))?;
            header = Some((vars, clauses));
            continue;
        }
        let (vars, _) = header.ok_or_else(|| syntax(line_no, "missing `p cnf` header".into()))?;
        let number = |w: &str| -> Result<i32, QbfError> {
            let v = w
                .parse::<i32>()
                .map_err(|_| syntax(line_no, format!("bad literal `{w}`")))?;
            if v.unsigned_abs() > vars {
                return Err(syntax(
                    line_no,
                    format!("variable {} exceeds the declared {vars}", v.unsigned_abs()),
                ));
            }
            Ok(v)
        };
        if first == "a" || first == "e" {
            if in_matrix {
                return Err(syntax(line_no, "quantifier line after clauses".into()));
            }
            let q = if first == "a" {
                Quantifier::Forall
            } else {
                Quantifier::Exists
            };
            let mut terminated = false;
            for w in words {
                if terminated {
                    return Err(syntax(line_no, "text after terminating 0".into()));
                }
                let v = number(w)?;
                if v == 0 {
                    terminated = true;
                } else if v < 0 {
                    return Err(syntax(line_no, "negative variable in prefix".into()));
                } else {
                    prefix.push((q, v as u32));
                }
            }
            if !terminated {
                return Err(syntax(line_no, "prefix line must end with 0".into()));
            }
            continue;
        }
        in_matrix = true;
        for w in std::iter::once(first).chain(words) {
            let v = number(w)?;
            if v == 0 {
                matrix.push(std::mem::take(&mut current));
            } else {
                current.push(v);
            }
        }
    }
    let (_, clauses) = header.ok_or_else(|| syntax(last_line.max(1), "missing `p cnf` header".into()))?;
    if !current.is_empty() {
        return Err(syntax(last_line, "last clause is not terminated by 0".into()));
    }
    if matrix.len() != clauses {
        return Err(syntax(
            last_line,
            format!("header declares {clauses} clauses, found {}", matrix.len()),
        ));
    }
    Qbf::new(prefix, matrix)
}
