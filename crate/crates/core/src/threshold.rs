//! Monotone "at least t of these inputs" subcircuits, and the rewrite that
//! replaces negated inputs by such subcircuits under exact-weight inputs.

use std::collections::HashMap;

use crate::circuit::{ensure_fresh_output, unique_id, Circuit, CircuitBuilder, CircuitError, Gate};

/// Or-nodes `v(i1, i2, t)`: at least `t` of `inputs[i1..=i2]` are true.
/// Each is the disjunction, over split points `i'` and `t' + t'' = t`, of
/// `v(i1, i', t') ∧ v(i'+1, i2, t'')`, where a zero threshold is constant
/// true and collapses the pair to its other side.
struct AtLeast<'a> {
    b: &'a mut CircuitBuilder,
    inputs: Vec<usize>,
    prefix: String,
    memo: HashMap<(usize, usize, usize), usize>,
}

impl AtLeast<'_> {
    /// `None` when the range is too short to reach `t` (constant false).
    fn node(&mut self, i1: usize, i2: usize, t: usize) -> Option<usize> {
        debug_assert!(t >= 1);
        if t > i2 - i1 + 1 {
            return None;
        }
        if i1 == i2 {
            return Some(self.inputs[i1]);
        }
        if let Some(&v) = self.memo.get(&(i1, i2, t)) {
            return Some(v);
        }
        let mut args = Vec::new();
        for ip in i1..i2 {
            for tp in 0..=t {
                let left = if tp == 0 { Some(None) } else { self.node(i1, ip, tp).map(Some) };
                let right = if tp == t {
                    Some(None)
                } else {
                    self.node(ip + 1, i2, t - tp).map(Some)
                };
                let (Some(left), Some(right)) = (left, right) else {
                    continue;
                };
                let arg = match (left, right) {
                    (Some(l), Some(r)) => {
                        let id = unique_id(self.b, &format!("{}a{i1}_{i2}_{t}_{ip}_{tp}", self.prefix));
                        self.b.and(&id, &[l, r]).expect("fresh id")
                    }
                    (Some(x), None) | (None, Some(x)) => x,
                    (None, None) => unreachable!("t >= 1"),
                };
                if !args.contains(&arg) {
                    args.push(arg);
                }
            }
        }
        let id = unique_id(self.b, &format!("{}v{i1}_{i2}_{t}", self.prefix));
        let v = self.b.or(&id, &args).expect("some split reaches t");
        self.memo.insert((i1, i2, t), v);
        Some(v)
    }
}

fn at_least(b: &mut CircuitBuilder, inputs: &[usize], t: usize, prefix: &str) -> usize {
    let mut g = AtLeast {
        b,
        inputs: inputs.to_vec(),
        prefix: prefix.to_string(),
        memo: HashMap::new(),
    };
    g.node(0, inputs.len() - 1, t).expect("t <= number of inputs")
}

/// Monotone circuit over inputs `x1..xm` (one block, weight `t`) whose
/// output is true iff at least `t` inputs are true.
pub fn threshold_subcircuit(m: usize, t: usize) -> Result<Circuit, CircuitError> {
    if t == 0 || t > m {
        return Err(CircuitError::Degenerate(format!(
            "threshold {t} is outside 1..={m}"
        )));
    }
    let mut b = CircuitBuilder::new();
    let inputs: Vec<usize> = (1..=m)
        .map(|i| b.input(&format!("x{i}"), 1).expect("fresh id"))
        .collect();
    let out = at_least(&mut b, &inputs, t, "th_");
    b.finish(out, vec![t as u32])
}

/// Replaces every not-node over an input `x` of block `i` by an at-least-`k_i`
/// subcircuit over the other inputs of block `i`. Under assignments with
/// exactly `k_i` true inputs in block `i`, `x` is false iff at least `k_i`
/// of the others are true, so the result agrees with `c` there.
pub fn monotonize(c: &Circuit) -> Result<Circuit, CircuitError> {
    let blocks = c.blocks();
    let mut b = CircuitBuilder::new();
    let mut map = vec![usize::MAX; c.nodes().len()];
    // Inputs first: a not-node needs every other input of its block.
    for (v, node) in c.nodes().iter().enumerate() {
        if let Gate::Input { block } = node.gate {
            map[v] = b.input(&node.id, block)?;
        }
    }
    for (v, node) in c.nodes().iter().enumerate() {
        map[v] = match &node.gate {
            Gate::Input { .. } => continue,
            Gate::And(args) => {
                let args: Vec<usize> = args.iter().map(|&a| map[a]).collect();
                b.and(&node.id, &args)?
            }
            Gate::Or(args) => {
                let args: Vec<usize> = args.iter().map(|&a| map[a]).collect();
                b.or(&node.id, &args)?
            }
            Gate::Not(x) => {
                let Gate::Input { block } = c.nodes()[*x].gate else {
                    return Err(CircuitError::NotAboveInput(node.id.clone()));
                };
                let k = c.weights()[block as usize - 1] as usize;
                let others: Vec<usize> = blocks[block as usize - 1]
                    .iter()
                    .filter(|&&y| y != *x)
                    .map(|&y| map[y])
                    .collect();
                if k == 0 || k > others.len() {
                    return Err(CircuitError::Degenerate(format!(
                        "not-node `{}` needs 1 <= k <= {} in block {block}, got k = {k}",
                        node.id,
                        others.len()
                    )));
                }
                at_least(&mut b, &others, k, &format!("{}__", node.id))
            }
        };
    }
    let out = ensure_fresh_output(c, map[c.output()], &mut b);
    b.finish(out, c.weights().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::subsets_of_size;

    fn check_threshold(m: usize, t: usize) {
        let c = threshold_subcircuit(m, t).unwrap();
        assert!(c.is_monotone());
        let inputs = c.inputs();
        for mask in 0u32..(1 << m) {
            let set: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).map(|i| inputs[i]).collect();
            assert_eq!(c.eval(&set), set.len() >= t, "m={m} t={t} mask={mask:b}");
        }
    }

    #[test]
    fn small_thresholds() {
        for m in 1..=5 {
            for t in 1..=m {
                check_threshold(m, t);
            }
        }
    }

    #[test]
    fn wire_base_case() {
        let c = threshold_subcircuit(1, 1).unwrap();
        assert_eq!(c.nodes().len(), 1);
        assert_eq!(c.output(), 0);
    }

    #[test]
    fn out_of_range() {
        assert!(threshold_subcircuit(3, 0).is_err());
        assert!(threshold_subcircuit(3, 4).is_err());
    }

    #[test]
    fn monotone_input_is_unchanged() {
        let mut b = CircuitBuilder::new();
        let a = b.input("a", 1).unwrap();
        let x = b.input("b", 1).unwrap();
        let o = b.or("o", &[a, x]).unwrap();
        let c = b.finish(o, vec![1]).unwrap();
        assert_eq!(monotonize(&c).unwrap(), c);
    }

    #[test]
    fn negated_input_becomes_the_other_input() {
        let mut b = CircuitBuilder::new();
        let a = b.input("a", 1).unwrap();
        b.input("b", 1).unwrap();
        let o = b.not("o", a).unwrap();
        let c = b.finish(o, vec![1]).unwrap();
        let m = monotonize(&c).unwrap();
        assert!(m.is_monotone());
        for set in subsets_of_size(&c.inputs(), 1) {
            let mapped: Vec<usize> = set.iter().map(|&x| m.find(&c.nodes()[x].id).unwrap()).collect();
            assert_eq!(c.eval(&set), m.eval(&mapped));
            assert_eq!(m.eval(&mapped), c.nodes()[set[0]].id == "b");
        }
    }

    #[test]
    fn degenerate_weights_are_rejected() {
        let mut b = CircuitBuilder::new();
        let a = b.input("a", 1).unwrap();
        let o = b.not("o", a).unwrap();
        let c = b.finish(o, vec![1]).unwrap();
        assert!(matches!(monotonize(&c), Err(CircuitError::Degenerate(_))));
    }

    #[test]
    fn not_above_gate_is_rejected() {
        let mut b = CircuitBuilder::new();
        let a = b.input("a", 1).unwrap();
        let x = b.input("b", 1).unwrap();
        let g = b.and("g", &[a, x]).unwrap();
        let o = b.not("o", g).unwrap();
        let c = b.finish(o, vec![1]).unwrap();
        assert_eq!(monotonize(&c), Err(CircuitError::NotAboveInput("o".into())));
    }

    #[test]
    fn not_node_before_later_inputs() {
        let mut b = CircuitBuilder::new();
        let a = b.input("a", 1).unwrap();
        let na = b.not("na", a).unwrap();
        let x = b.input("b", 1).unwrap();
        let o = b.and("o", &[na, x]).unwrap();
        let c = b.finish(o, vec![1]).unwrap();
        let m = monotonize(&c).unwrap();
        for set in subsets_of_size(&c.inputs(), 1) {
            let mapped: Vec<usize> = set.iter().map(|&x| m.find(&c.nodes()[x].id).unwrap()).collect();
            assert_eq!(c.eval(&set), m.eval(&mapped));
        }
    }
}
