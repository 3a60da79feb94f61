//! Boolean circuits with blocks of weighted inputs.
//!
//! Nodes are stored in topological order, so a node only refers to earlier
//! nodes and acyclicity holds by construction.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CircuitError {
    #[error("node `{0}` is defined twice")]
    Duplicate(String),
    #[error("node `{0}` is not defined")]
    Undefined(String),
    #[error("node `{0}` has no inputs")]
    NoArgs(String),
    #[error("nodes {0} form a cycle")]
    Cycle(String),
    #[error("output node `{0}` feeds other nodes")]
    OutputUsed(String),
    #[error("input `{0}` has block 0; blocks are numbered from 1")]
    BlockZero(String),
    #[error("block {0} has no inputs")]
    EmptyBlock(u32),
    #[error("{weights} weights given for {blocks} blocks")]
    WeightArity { weights: usize, blocks: usize },
    #[error("missing output node")]
    NoOutput,
    #[error("not-node `{0}` is not directly above an input")]
    NotAboveInput(String),
    #[error("{0}")]
    Degenerate(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    Input { block: u32 },
    Not(usize),
    And(Vec<usize>),
    Or(Vec<usize>),
}

impl Gate {
    pub fn args(&self) -> &[usize] {
        match self {
            Gate::Input { .. } => &[],
            Gate::Not(a) => std::slice::from_ref(a),
            Gate::And(args) | Gate::Or(args) => args,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub id: String,
    pub gate: Gate,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    nodes: Vec<Node>,
    output: usize,
    /// `weights[i]` is the target weight of block `i + 1`.
    weights: Vec<u32>,
}

/// Appends nodes in topological order.
#[derive(Default)]
pub struct CircuitBuilder {
    nodes: Vec<Node>,
    ids: HashMap<String, usize>,
}

impl CircuitBuilder {
    pub fn new() -> CircuitBuilder {
        CircuitBuilder::default()
    }

    fn push(&mut self, id: &str, gate: Gate) -> Result<usize, CircuitError> {
        if self.ids.contains_key(id) {
            return Err(CircuitError::Duplicate(id.to_string()));
        }
        let index = self.nodes.len();
        self.ids.insert(id.to_string(), index);
        self.nodes.push(Node {
            id: id.to_string(),
            gate,
        });
        Ok(index)
    }

    fn args(&self, id: &str, args: &[usize]) -> Result<Vec<usize>, CircuitError> {
        if args.is_empty() {
            return Err(CircuitError::NoArgs(id.to_string()));
        }
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for &a in args {
            assert!(a < self.nodes.len(), "argument refers to a later node");
            if seen.insert(a) {
                out.push(a);
            }
        }
        Ok(out)
    }

    pub fn input(&mut self, id: &str, block: u32) -> Result<usize, CircuitError> {
        if block == 0 {
            return Err(CircuitError::BlockZero(id.to_string()));
        }
        self.push(id, Gate::Input { block })
    }

    pub fn not(&mut self, id: &str, arg: usize) -> Result<usize, CircuitError> {
        assert!(arg < self.nodes.len(), "argument refers to a later node");
        self.push(id, Gate::Not(arg))
    }

    pub fn and(&mut self, id: &str, args: &[usize]) -> Result<usize, CircuitError> {
        let args = self.args(id, args)?;
        self.push(id, Gate::And(args))
    }

    pub fn or(&mut self, id: &str, args: &[usize]) -> Result<usize, CircuitError> {
        let args = self.args(id, args)?;
        self.push(id, Gate::Or(args))
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.get(id).copied()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn finish(self, output: usize, weights: Vec<u32>) -> Result<Circuit, CircuitError> {
        let c = Circuit {
            nodes: self.nodes,
            output,
            weights,
        };
        c.validate()?;
        Ok(c)
    }
}

impl Circuit {
    fn validate(&self) -> Result<(), CircuitError> {
        if self.output >= self.nodes.len() {
            return Err(CircuitError::NoOutput);
        }
        if self.out_degrees()[self.output] > 0 {
            return Err(CircuitError::OutputUsed(self.nodes[self.output].id.clone()));
        }
        let blocks = self.block_count();
        for (b, members) in self.blocks().iter().enumerate() {
            if members.is_empty() {
                return Err(CircuitError::EmptyBlock(b as u32 + 1));
            }
        }
        if self.weights.len() != blocks {
            return Err(CircuitError::WeightArity {
                weights: self.weights.len(),
                blocks,
            });
        }
        Ok(())
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn output(&self) -> usize {
        self.output
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn block_count(&self) -> usize {
        self.nodes
            .iter()
            .filter_map(|n| match n.gate {
                Gate::Input { block } => Some(block as usize),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    /// Input node indices per block, in node order; entry `i` is block `i + 1`.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.block_count()];
        for (i, n) in self.nodes.iter().enumerate() {
            if let Gate::Input { block } = n.gate {
                blocks[block as usize - 1].push(i);
            }
        }
        blocks
    }

    pub fn inputs(&self) -> Vec<usize> {
        (0..self.nodes.len())
            .filter(|&i| matches!(self.nodes[i].gate, Gate::Input { .. }))
            .collect()
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.nodes.len()];
        for n in &self.nodes {
            for &a in n.gate.args() {
                deg[a] += 1;
            }
        }
        deg
    }

    pub fn is_monotone(&self) -> bool {
        !self.nodes.iter().any(|n| matches!(n.gate, Gate::Not(_)))
    }

    /// Every input feeds exactly one node, a not-node, and every not-node
    /// sits directly above an input.
    pub fn is_anti_monotone(&self) -> bool {
        let deg = self.out_degrees();
        let mut feeds_not = vec![false; self.nodes.len()];
        for n in &self.nodes {
            if let Gate::Not(a) = n.gate {
                if !matches!(self.nodes[a].gate, Gate::Input { .. }) {
                    return false;
                }
                feeds_not[a] = true;
            }
        }
        self.inputs().iter().all(|&x| deg[x] == 1 && feeds_not[x])
    }

    /// Value of every node given the true inputs (`input_values` is indexed
    /// by node; non-input entries are ignored).
    pub fn eval_all(&self, input_values: &[bool]) -> Vec<bool> {
        let mut values = vec![false; self.nodes.len()];
        for (i, n) in self.nodes.iter().enumerate() {
            values[i] = match &n.gate {
                Gate::Input { .. } => input_values[i],
                Gate::Not(a) => !values[*a],
                Gate::And(args) => args.iter().all(|&a| values[a]),
                Gate::Or(args) => args.iter().any(|&a| values[a]),
            };
        }
        values
    }

    /// Output value when exactly the inputs in `true_inputs` are set.
    pub fn eval(&self, true_inputs: &[usize]) -> bool {
        let mut input_values = vec![false; self.nodes.len()];
        for &x in true_inputs {
            input_values[x] = true;
        }
        self.eval_all(&input_values)[self.output]
    }

    pub fn find(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }
}

pub fn circuit_eval(c: &Circuit, true_inputs: &[usize]) -> bool {
    c.eval(true_inputs)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightMode {
    /// `|S_i| = k_i`.
    Exact,
    /// Supports of `k_i` picks with repetition: `1 <= |S_i| <= k_i`, or
    /// only the empty set when `k_i = 0`.
    Realizable,
}

/// All `size`-subsets of `items`, in lexicographic index order.
pub fn subsets_of_size(items: &[usize], size: usize) -> Vec<Vec<usize>> {
    fn go(items: &[usize], size: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            if items.len() - i < size - cur.len() {
                break;
            }
            cur.push(items[i]);
            go(items, size, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if size <= items.len() {
        go(items, size, 0, &mut Vec::new(), &mut out);
    }
    out
}

fn choices(members: &[usize], k: u32, mode: WeightMode) -> Vec<Vec<usize>> {
    let k = k as usize;
    match mode {
        WeightMode::Exact => subsets_of_size(members, k),
        WeightMode::Realizable if k == 0 => vec![Vec::new()],
        WeightMode::Realizable => (1..=k.min(members.len()))
            .flat_map(|size| subsets_of_size(members, size))
            .collect(),
    }
}

/// Alternating weighted satisfiability: block 1 universal, block 2
/// existential, and so on.
pub fn qwcs_eval(c: &Circuit, mode: WeightMode) -> bool {
    let blocks = c.blocks();
    let mut values = vec![false; c.nodes().len()];
    qwcs_rec(c, &blocks, mode, 0, &mut values)
}

fn qwcs_rec(c: &Circuit, blocks: &[Vec<usize>], mode: WeightMode, i: usize, values: &mut Vec<bool>) -> bool {
    if i == blocks.len() {
        return c.eval_all(values)[c.output()];
    }
    let universal = i % 2 == 0;
    for set in choices(&blocks[i], c.weights()[i], mode) {
        for &x in &set {
            values[x] = true;
        }
        let result = qwcs_rec(c, blocks, mode, i + 1, values);
        for &x in &set {
            values[x] = false;
        }
        if result != universal {
            return result;
        }
    }
    universal
}

/// Equivalent circuit whose not-nodes all sit directly above inputs.
/// Only nodes reachable from the output are kept, plus every input.
pub fn push_negations(c: &Circuit) -> Circuit {
    let mut b = CircuitBuilder::new();
    let mut map: HashMap<(usize, bool), usize> = HashMap::new();
    for x in c.inputs() {
        let node = &c.nodes()[x];
        let Gate::Input { block } = node.gate else {
            unreachable!()
        };
        let idx = b.input(&node.id, block).expect("ids are unique");
        map.insert((x, false), idx);
    }
    let out = build_nnf(c, c.output(), false, &mut b, &mut map);
    let out = ensure_fresh_output(c, out, &mut b);
    b.finish(out, c.weights().to_vec())
        .expect("negation normal form preserves validity")
}

fn build_nnf(
    c: &Circuit,
    v: usize,
    negated: bool,
    b: &mut CircuitBuilder,
    map: &mut HashMap<(usize, bool), usize>,
) -> usize {
    if let Some(&idx) = map.get(&(v, negated)) {
        return idx;
    }
    let node = &c.nodes()[v];
    let idx = match &node.gate {
        Gate::Input { .. } => {
            let pos = map[&(v, false)];
            let id = unique_id(b, &format!("{}_not", node.id));
            b.not(&id, pos).expect("fresh id")
        }
        Gate::Not(a) => build_nnf(c, *a, !negated, b, map),
        Gate::And(args) | Gate::Or(args) => {
            let is_and = matches!(node.gate, Gate::And(_));
            let new_args: Vec<usize> = args.iter().map(|&a| build_nnf(c, a, negated, b, map)).collect();
            let id = if negated {
                unique_id(b, &format!("{}_neg", node.id))
            } else {
                unique_id(b, &node.id)
            };
            if is_and != negated {
                b.and(&id, &new_args).expect("non-empty args")
            } else {
                b.or(&id, &new_args).expect("non-empty args")
            }
        }
    };
    map.insert((v, negated), idx);
    idx
}

/// An id not yet used in the builder, derived from `base`.
pub(crate) fn unique_id(b: &CircuitBuilder, base: &str) -> String {
    if b.index_of(base).is_none() {
        return base.to_string();
    }
    (1..)
        .map(|i| format!("{base}_{i}"))
        .find(|id| b.index_of(id).is_none())
        .expect("unbounded")
}

/// Wraps `out` in a one-argument or-node when it already feeds other nodes
/// or is an input, so the output keeps out-degree 0.
pub(crate) fn ensure_fresh_output(c: &Circuit, out: usize, b: &mut CircuitBuilder) -> usize {
    let used = b.nodes.iter().any(|n| n.gate.args().contains(&out));
    if used {
        let id = unique_id(b, &format!("{}_out", c.nodes()[c.output()].id));
        b.or(&id, &[out]).expect("one argument")
    } else {
        out
    }
}
