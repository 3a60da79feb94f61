//! Circuit netlists:
//!
//! ```text
//! input a block 1
//! not na = a
//! and g = na b
//! or o = g c
//! output o
//! weights 1
//! ```
//!
//! Nodes may be used before their definition line. `#` starts a comment.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::circuit::{Circuit, CircuitBuilder, CircuitError, Gate};
use crate::lang::is_identifier;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetlistError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: node `{id}` is not defined")]
    Undefined { line: usize, id: String },
    #[error("line {line}: node `{id}` is defined twice")]
    Duplicate { line: usize, id: String },
    #[error("nodes {0} form a cycle")]
    Cycle(String),
    #[error("missing `{0}` line")]
    Missing(&'static str),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

enum Kind {
    Input(u32),
    Not,
    And,
    Or,
}

struct Decl {
    line: usize,
    id: String,
    kind: Kind,
    args: Vec<String>,
}

pub fn parse_circuit(text: &str) -> Result<Circuit, NetlistError> {
    let mut decls: Vec<Decl> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut output: Option<(usize, String)> = None;
    let mut weights: Option<Vec<u32>> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let syntax = |message: String| NetlistError::Syntax { line, message };
        let content = raw.split('#').next().unwrap_or("");
        let words: Vec<&str> = content.split_whitespace().collect();
        let Some(&keyword) = words.first() else {
            continue;
        };
        let ident = |w: &str| -> Result<String, NetlistError> {
            if is_identifier(w) {
                Ok(w.to_string())
            } else {
                Err(syntax(format!("`{w}` is not a valid node id")))
            }
        };
        let decl = match keyword {
            "input" => {
                if words.len() != 4 || words[2] != "block" {
                    return Err(syntax("expected `input <id> block <i>`".into()));
                }
                let block = words[3]
                    .parse::<u32>()
                    .map_err(|_| syntax(format!("bad block number `{}`", words[3])))?;
                Decl { line, id: ident(words[1])?, kind: Kind::Input(block), args: vec![] }
            }
            "not" | "and" | "or" => {
                if words.len() < 4 || words[2] != "=" {
                    return Err(syntax(format!("expected `{keyword} <id> = <id>...`")));
                }
                let args = words[3..].iter().map(|w| ident(w)).collect::<Result<Vec<_>, _>>()?;
                let kind = match keyword {
                    "not" if args.len() != 1 => {
                        return Err(syntax("a not-node takes exactly one argument".into()))
                    }
                    "not" => Kind::Not,
                    "and" => Kind::And,
                    _ => Kind::Or,
                };
                Decl { line, id: ident(words[1])?, kind, args }
            }
            "output" => {
                if words.len() != 2 {
                    return Err(syntax("expected `output <id>`".into()));
                }
                if output.is_some() {
                    return Err(syntax("duplicate `output` line".into()));
                }
                output = Some((line, ident(words[1])?));
                continue;
            }
            "weights" => {
                if weights.is_some() {
                    return Err(syntax("duplicate `weights` line".into()));
                }
                let ks = words[1..]
                    .iter()
                    .map(|w| w.parse::<u32>().map_err(|_| syntax(format!("bad weight `{w}`"))))
                    .collect::<Result<Vec<_>, _>>()?;
                weights = Some(ks);
                continue;
            }
            other => return Err(syntax(format!("unknown keyword `{other}`"))),
        };
        if index.insert(decl.id.clone(), decls.len()).is_some() {
            return Err(NetlistError::Duplicate { line, id: decl.id });
        }
        decls.push(decl);
    }
    let (out_line, out_id) = output.ok_or(NetlistError::Missing("output"))?;
    let weights = weights.ok_or(NetlistError::Missing("weights"))?;
    for d in &decls {
        for a in &d.args {
            if !index.contains_key(a) {
                return Err(NetlistError::Undefined { line: d.line, id: a.clone() });
            }
        }
    }
    let out = *index
        .get(&out_id)
        .ok_or(NetlistError::Undefined { line: out_line, id: out_id.clone() })?;

    // Kahn's algorithm, taking ready nodes in line order.
    let mut pending: Vec<usize> = decls.iter().map(|d| d.args.len()).collect();
    let mut users: Vec<Vec<usize>> = vec![Vec::new(); decls.len()];
    for (v, d) in decls.iter().enumerate() {
        for a in &d.args {
            users[index[a]].push(v);
        }
    }
    let mut ready: std::collections::BTreeSet<usize> =
        (0..decls.len()).filter(|&v| pending[v] == 0).collect();
    let mut b = CircuitBuilder::new();
    let mut built = vec![usize::MAX; decls.len()];
    while let Some(v) = ready.pop_first() {
        let d = &decls[v];
        let args: Vec<usize> = d.args.iter().map(|a| built[index[a]]).collect();
        built[v] = match d.kind {
            Kind::Input(block) => b.input(&d.id, block)?,
            Kind::Not => b.not(&d.id, args[0])?,
            Kind::And => b.and(&d.id, &args)?,
            Kind::Or => b.or(&d.id, &args)?,
        };
        for &u in &users[v] {
            pending[u] -= 1;
            if pending[u] == 0 {
                ready.insert(u);
            }
        }
    }
    if built.contains(&usize::MAX) {
        let stuck: Vec<&str> = decls
            .iter()
            .zip(&built)
            .filter(|(_, &b)| b == usize::MAX)
            .map(|(d, _)| d.id.as_str())
            .collect();
        return Err(NetlistError::Cycle(stuck.join(", ")));
    }
    Ok(b.finish(built[out], weights)?)
}

/// Netlist text in node order; `parse_circuit` reads it back unchanged.
pub fn to_netlist(c: &Circuit) -> String {
    let mut out = String::new();
    let ids = |args: &[usize]| -> String {
        args.iter().map(|&a| c.nodes()[a].id.as_str()).collect::<Vec<_>>().join(" ")
    };
    for n in c.nodes() {
        let _ = match &n.gate {
            Gate::Input { block } => writeln!(out, "input {} block {block}", n.id),
            Gate::Not(a) => writeln!(out, "not {} = {}", n.id, c.nodes()[*a].id),
            Gate::And(args) => writeln!(out, "and {} = {}", n.id, ids(args)),
            Gate::Or(args) => writeln!(out, "or {} = {}", n.id, ids(args)),
        };
    }
    let _ = writeln!(out, "output {}", c.nodes()[c.output()].id);
    let weights: Vec<String> = c.weights().iter().map(|k| k.to_string()).collect();
    let _ = writeln!(out, "weights {}", weights.join(" "));
    out
}
