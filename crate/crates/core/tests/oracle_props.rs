mod common;

use common::{clauses, objective};
use limbel::circuit::{circuit_eval, Circuit, CircuitBuilder};
use limbel::lang::{Formula, Name};
use limbel::oracle::{entails, entails_with};
use proptest::prelude::*;

#[derive(Clone, Debug)]
enum Op {
    And(Vec<usize>),
    Or(Vec<usize>),
}

/// Gate list over `inputs` inputs; each argument indexes an earlier node.
fn gates(inputs: usize) -> impl Strategy<Value = Vec<Op>> {
    prop::collection::vec(
        (any::<bool>(), prop::collection::vec(any::<prop::sample::Index>(), 1..=3)),
        1..=5,
    )
    .prop_map(move |raw| {
        raw.into_iter()
            .enumerate()
            .map(|(g, (is_and, args))| {
                let avail = inputs + g;
                let args: Vec<usize> = args.iter().map(|i| i.index(avail)).collect();
                if is_and { Op::And(args) } else { Op::Or(args) }
            })
            .collect()
    })
}

/// With `anti`, every input is read through its own not-node.
fn build(inputs: usize, ops: &[Op], anti: bool) -> Circuit {
    let mut b = CircuitBuilder::new();
    let mut nodes: Vec<usize> = (0..inputs).map(|i| b.input(&format!("x{i}"), 1).unwrap()).collect();
    if anti {
        nodes = nodes.iter().enumerate().map(|(i, &x)| b.not(&format!("nx{i}"), x).unwrap()).collect();
    }
    for (g, op) in ops.iter().enumerate() {
        let id = format!("g{g}");
        let v = match op {
            Op::And(args) => b.and(&id, &args.iter().map(|&a| nodes[a]).collect::<Vec<_>>()),
            Op::Or(args) => b.or(&id, &args.iter().map(|&a| nodes[a]).collect::<Vec<_>>()),
        };
        nodes.push(v.unwrap());
    }
    b.finish(*nodes.last().unwrap(), vec![1]).unwrap()
}

fn circuit(anti: bool) -> impl Strategy<Value = Circuit> {
    (1usize..=4).prop_flat_map(move |m| gates(m).prop_map(move |ops| build(m, &ops, anti)))
}

fn check_order(c: &Circuit, increasing: bool) -> Result<(), TestCaseError> {
    let inputs = c.inputs();
    let m = inputs.len();
    let set = |mask: u32| -> Vec<usize> { (0..m).filter(|i| mask >> i & 1 == 1).map(|i| inputs[i]).collect() };
    for small in 0u32..1 << m {
        for big in 0u32..1 << m {
            if small & !big == 0 {
                let (lo, hi) = (circuit_eval(c, &set(small)), circuit_eval(c, &set(big)));
                if increasing {
                    prop_assert!(!lo || hi);
                } else {
                    prop_assert!(!hi || lo);
                }
            }
        }
    }
    Ok(())
}

proptest! {
    #[test]
    fn entailment_survives_weakening(kb in clauses(4, 3), phi in objective(), psi in objective()) {
        let weaker = Formula::or(phi.clone(), psi);
        if entails(&kb, &phi).unwrap() {
            prop_assert!(entails(&kb, &weaker).unwrap());
        }
    }

    #[test]
    fn one_extra_name_suffices(kb in clauses(4, 3), phi in objective()) {
        let one = entails(&kb, &phi).unwrap();
        let two = entails_with(&kb, &phi, &[Name::new("@fresh"), Name::new("@fresh2")]).unwrap();
        prop_assert_eq!(one, two);
    }

    #[test]
    fn monotone_circuits_are_monotone(c in circuit(false)) {
        prop_assert!(c.is_monotone());
        check_order(&c, true)?;
    }

    #[test]
    fn anti_monotone_circuits_are_antitone(c in circuit(true)) {
        prop_assert!(c.is_anti_monotone());
        check_order(&c, false)?;
    }
}
