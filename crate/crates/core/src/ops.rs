//! The operator constructions on well-formed automata: deadlock, skip,
//! single action, choice, sequential composition, iteration and framed
//! parallel composition.
//!
//! Every construction allocates fresh state ids. The `*_traced` variants
//! also return where each original state ended up.

use std::collections::HashMap;
use std::sync::Arc;

use crate::alphabet::{ActionId, Alphabet, Frame};
use crate::automaton::{check_compatible, Automaton, StateId};
use crate::error::Result;

/// Old-state to new-state maps for the operands of a construction.
#[derive(Clone, Debug, Default)]
pub struct Provenance {
    pub left: Vec<Option<StateId>>,
    pub right: Vec<Option<StateId>>,
}

#[derive(Clone, Debug)]
pub struct Traced {
    pub automaton: Automaton,
    pub provenance: Provenance,
}

/// Result of a product construction: each new state is a pair of operand states.
#[derive(Clone, Debug)]
pub struct TracedProduct {
    pub automaton: Automaton,
    pub pairs: Vec<(StateId, StateId)>,
}

pub fn zero(alphabet: &Arc<Alphabet>) -> Automaton {
    Automaton::from_succ(alphabet.clone(), vec![Vec::new()], StateId(0), vec![false])
}

pub fn one(alphabet: &Arc<Alphabet>) -> Automaton {
    Automaton::from_succ(alphabet.clone(), vec![Vec::new()], StateId(0), vec![true])
}

pub fn action(alphabet: &Arc<Alphabet>, a: ActionId) -> Automaton {
    Automaton::from_succ(
        alphabet.clone(),
        vec![vec![(a, StateId(1))], Vec::new()],
        StateId(0),
        vec![false, true],
    )
}

pub fn plus(p: &Automaton, q: &Automaton) -> Result<Automaton> {
    Ok(plus_traced(p, q)?.automaton)
}

/// Choice: the two initial states are merged into a fresh one.
pub fn plus_traced(p: &Automaton, q: &Automaton) -> Result<Traced> {
    check_compatible(p, q)?;
    let (ip, iq) = (p.initial(), q.initial());
    let mut next = 1u32;
    let mut fresh = |s: StateId, init: StateId| {
        if s == init {
            StateId(0)
        } else {
            let id = StateId(next);
            next += 1;
            id
        }
    };
    let left: Vec<StateId> = p.states().map(|s| fresh(s, ip)).collect();
    let right: Vec<StateId> = q.states().map(|s| fresh(s, iq)).collect();
    let n = next as usize;

    let mut succ = vec![Vec::new(); n];
    let mut finals = vec![false; n];
    for s in p.states() {
        let ns = left[s.index()];
        succ[ns.index()].extend(p.successors(s).iter().map(|&(a, d)| (a, left[d.index()])));
        finals[ns.index()] |= p.is_final(s);
    }
    for s in q.states() {
        let ns = right[s.index()];
        succ[ns.index()].extend(q.successors(s).iter().map(|&(a, d)| (a, right[d.index()])));
        finals[ns.index()] |= q.is_final(s);
    }
    Ok(Traced {
        automaton: Automaton::from_succ(p.alphabet().clone(), succ, StateId(0), finals),
        provenance: Provenance {
            left: left.into_iter().map(Some).collect(),
            right: right.into_iter().map(Some).collect(),
        },
    })
}

pub fn seq(p: &Automaton, q: &Automaton) -> Result<Automaton> {
    Ok(seq_traced(p, q)?.automaton)
}

/// Sequential composition: the initial transitions of `q` are spliced onto
/// every final state of `p`. A final of `p` stays final iff `q`'s initial
/// state is final.
pub fn seq_traced(p: &Automaton, q: &Automaton) -> Result<Traced> {
    check_compatible(p, q)?;
    let iq = q.initial();
    let np = p.num_states();
    let mut right = vec![None; q.num_states()];
    let mut next = np as u32;
    for s in q.states() {
        if s != iq {
            right[s.index()] = Some(StateId(next));
            next += 1;
        }
    }
    let n = next as usize;
    let map_q = |d: StateId| right[d.index()].expect("no transition enters the initial state");
    let q_initial_edges: Vec<(ActionId, StateId)> =
        q.successors(iq).iter().map(|&(a, d)| (a, map_q(d))).collect();
    let iq_final = q.is_final(iq);

    let mut succ = vec![Vec::new(); n];
    let mut finals = vec![false; n];
    for s in p.states() {
        let edges = &mut succ[s.index()];
        edges.extend_from_slice(p.successors(s));
        if p.is_final(s) {
            edges.extend_from_slice(&q_initial_edges);
            finals[s.index()] = iq_final;
        }
    }
    for s in q.states().filter(|&s| s != iq) {
        let ns = map_q(s);
        succ[ns.index()].extend(q.successors(s).iter().map(|&(a, d)| (a, map_q(d))));
        finals[ns.index()] = q.is_final(s);
    }
    let raw = Automaton::from_succ(p.alphabet().clone(), succ, p.initial(), finals);
    // When p has no final state the copy of q is unreachable.
    let (automaton, map) = raw.prune_unreachable();
    Ok(Traced {
        automaton,
        provenance: Provenance {
            left: (0..np).map(|s| map[s]).collect(),
            right: right.iter().map(|r| r.and_then(|s| map[s.index()])).collect(),
        },
    })
}

pub fn star(p: &Automaton) -> Automaton {
    star_traced(p).automaton
}

/// Iteration: a fresh final initial state takes over the initial
/// transitions of `p`, which are also copied onto every final state.
pub fn star_traced(p: &Automaton) -> Traced {
    let ip = p.initial();
    let mut left = vec![StateId(0); p.num_states()];
    let mut next = 1u32;
    for s in p.states() {
        if s != ip {
            left[s.index()] = StateId(next);
            next += 1;
        }
    }
    let n = next as usize;
    let initial_edges: Vec<(ActionId, StateId)> = p
        .successors(ip)
        .iter()
        .map(|&(a, d)| (a, left[d.index()]))
        .collect();
    let mut succ = vec![Vec::new(); n];
    let mut finals = vec![false; n];
    succ[0] = initial_edges.clone();
    finals[0] = true;
    for s in p.states().filter(|&s| s != ip) {
        let ns = left[s.index()];
        succ[ns.index()].extend(p.successors(s).iter().map(|&(a, d)| (a, left[d.index()])));
        if p.is_final(s) {
            succ[ns.index()].extend_from_slice(&initial_edges);
            finals[ns.index()] = true;
        }
    }
    Traced {
        automaton: Automaton::from_succ(p.alphabet().clone(), succ, StateId(0), finals),
        provenance: Provenance {
            left: left.into_iter().map(Some).collect(),
            right: Vec::new(),
        },
    }
}

pub fn par(p: &Automaton, q: &Automaton, frame: &Frame) -> Result<Automaton> {
    Ok(par_traced(p, q, frame)?.automaton)
}

/// CSP-style parallel composition: frame actions synchronize, everything
/// else interleaves. Only the reachable part of the product is built.
pub fn par_traced(p: &Automaton, q: &Automaton, frame: &Frame) -> Result<TracedProduct> {
    check_compatible(p, q)?;
    p.alphabet().check_frame(frame)?;
    let sync = frame.mask(p.alphabet().len());

    let mut index: HashMap<(StateId, StateId), StateId> = HashMap::new();
    let mut pairs = vec![(p.initial(), q.initial())];
    index.insert(pairs[0], StateId(0));
    let mut succ: Vec<Vec<(ActionId, StateId)>> = Vec::new();
    let mut head = 0;
    while head < pairs.len() {
        let (x, y) = pairs[head];
        head += 1;
        let mut edges = Vec::new();
        let mut visit = |a: ActionId, target: (StateId, StateId), edges: &mut Vec<_>| {
            let id = *index.entry(target).or_insert_with(|| {
                pairs.push(target);
                StateId(pairs.len() as u32 - 1)
            });
            edges.push((a, id));
        };
        for &(a, x2) in p.successors(x) {
            if sync[a.index()] {
                for y2 in q.successors_on(y, a) {
                    visit(a, (x2, y2), &mut edges);
                }
            } else {
                visit(a, (x2, y), &mut edges);
            }
        }
        for &(a, y2) in q.successors(y) {
            if !sync[a.index()] {
                visit(a, (x, y2), &mut edges);
            }
        }
        succ.push(edges);
    }
    let finals = pairs
        .iter()
        .map(|&(x, y)| p.is_final(x) && q.is_final(y))
        .collect();
    Ok(TracedProduct {
        automaton: Automaton::from_succ(p.alphabet().clone(), succ, StateId(0), finals),
        pairs,
    })
}

/// `p` composed with itself `n` times; `power(p, 0)` is skip.
pub fn power(p: &Automaton, n: usize) -> Result<Automaton> {
    let mut acc = one(p.alphabet());
    for _ in 0..n {
        acc = seq(&acc, p)?;
    }
    Ok(acc)
}

/// Choice over any number of operands; the empty sum is deadlock.
pub fn sum<'a>(alphabet: &Arc<Alphabet>, items: impl IntoIterator<Item = &'a Automaton>) -> Result<Automaton> {
    let mut iter = items.into_iter();
    let Some(first) = iter.next() else {
        return Ok(zero(alphabet));
    };
    let mut acc = first.clone();
    for item in iter {
        acc = plus(&acc, item)?;
    }
    Ok(acc)
}

/// Checks whether two automata are identical up to a renaming of states.
/// Exhaustive over bijections, so only meant for small automata.
pub fn isomorphic(p: &Automaton, q: &Automaton) -> bool {
    if p.num_states() != q.num_states()
        || p.num_transitions() != q.num_transitions()
        || p.num_finals() != q.num_finals()
        || !p.alphabet().same_actions(q.alphabet())
    {
        return false;
    }
    let n = p.num_states();
    let mut map: Vec<Option<StateId>> = vec![None; n];
    let mut used = vec![false; n];
    map[p.initial().index()] = Some(q.initial());
    used[q.initial().index()] = true;
    let order: Vec<StateId> = {
        let (_, m) = p.prune_unreachable();
        let mut o: Vec<(StateId, StateId)> = m
            .iter()
            .enumerate()
            .filter_map(|(old, new)| new.map(|nw| (nw, StateId::from_index(old))))
            .collect();
        o.sort();
        o.into_iter().map(|(_, old)| old).collect()
    };
    if order.len() != n {
        return false;
    }

    fn consistent(p: &Automaton, q: &Automaton, map: &[Option<StateId>]) -> bool {
        for s in p.states() {
            let Some(t) = map[s.index()] else { continue };
            if p.is_final(s) != q.is_final(t) {
                return false;
            }
            for &(a, d) in p.successors(s) {
                if let Some(td) = map[d.index()] {
                    if !q.successors_on(t, a).any(|x| x == td) {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn search(
        p: &Automaton,
        q: &Automaton,
        order: &[StateId],
        k: usize,
        map: &mut Vec<Option<StateId>>,
        used: &mut Vec<bool>,
    ) -> bool {
        if k == order.len() {
            return consistent(p, q, map);
        }
        let s = order[k];
        if map[s.index()].is_some() {
            return search(p, q, order, k + 1, map, used);
        }
        for t in q.states() {
            if used[t.index()] {
                continue;
            }
            map[s.index()] = Some(t);
            used[t.index()] = true;
            if consistent(p, q, map) && search(p, q, order, k + 1, map, used) {
                return true;
            }
            map[s.index()] = None;
            used[t.index()] = false;
        }
        false
    }

    search(p, q, &order, 0, &mut map, &mut used)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (Arc<Alphabet>, ActionId, ActionId) {
        let al = Arc::new(Alphabet::from_config("external a, b; internal t;").unwrap());
        let a = al.id("a").unwrap();
        let b = al.id("b").unwrap();
        (al, a, b)
    }

    #[test]
    fn base_automata_shapes() {
        let (al, a, _) = setup();
        let z = zero(&al);
        assert_eq!((z.num_states(), z.num_transitions(), z.num_finals()), (1, 0, 0));
        let o = one(&al);
        assert_eq!((o.num_states(), o.num_transitions(), o.num_finals()), (1, 0, 1));
        assert!(o.is_final(o.initial()));
        let x = action(&al, a);
        assert_eq!((x.num_states(), x.num_transitions(), x.num_finals()), (2, 1, 1));
        for m in [&z, &o, &x] {
            assert!(m.validate().is_ok());
        }
    }

    #[test]
    fn plus_merges_initials() {
        let (al, a, b) = setup();
        let p = plus(&action(&al, a), &action(&al, b)).unwrap();
        assert_eq!(p.num_states(), 3);
        let z = plus(&zero(&al), &action(&al, a)).unwrap();
        assert!(isomorphic(&z, &action(&al, a)));
    }

    #[test]
    fn seq_of_two_actions() {
        let (al, a, b) = setup();
        let p = seq(&action(&al, a), &action(&al, b)).unwrap();
        assert_eq!((p.num_states(), p.num_transitions(), p.num_finals()), (3, 2, 1));
        assert!(p.validate().is_ok());
    }

    #[test]
    fn seq_with_skip_is_identity() {
        let (al, a, b) = setup();
        let x = plus(&seq(&action(&al, a), &action(&al, b)).unwrap(), &one(&al)).unwrap();
        assert!(isomorphic(&seq(&one(&al), &x).unwrap(), &x));
        assert!(isomorphic(&seq(&x, &one(&al)).unwrap(), &x));
    }

    #[test]
    fn seq_after_deadlock_drops_second_operand() {
        let (al, a, _) = setup();
        let p = seq(&zero(&al), &action(&al, a)).unwrap();
        assert!(isomorphic(&p, &zero(&al)));
    }

    #[test]
    fn star_of_zero_is_one() {
        let (al, _, _) = setup();
        assert!(isomorphic(&star(&zero(&al)), &one(&al)));
    }

    #[test]
    fn star_of_action() {
        let (al, a, _) = setup();
        let s = star(&action(&al, a));
        assert_eq!(s.num_states(), 2);
        assert!(s.is_final(s.initial()));
        let f = StateId(1);
        assert!(s.is_final(f));
        assert_eq!(s.successors(s.initial()), &[(a, f)]);
        assert_eq!(s.successors(f), &[(a, f)]);
    }

    #[test]
    fn par_interleaves_outside_frame() {
        let (al, a, b) = setup();
        let p = par(&action(&al, a), &action(&al, b), &Frame::empty()).unwrap();
        assert_eq!(p.num_states(), 4);
        assert_eq!(p.num_transitions(), 4);
        assert_eq!(p.num_finals(), 1);
    }

    #[test]
    fn par_with_skip_blocks_on_frame() {
        let (al, a, _) = setup();
        let frame: Frame = [a].into_iter().collect();
        let p = par(&one(&al), &action(&al, a), &frame).unwrap();
        assert!(isomorphic(&p, &zero(&al)));
        let q = par(&one(&al), &one(&al), &frame).unwrap();
        assert!(isomorphic(&q, &one(&al)));
    }

    #[test]
    fn par_rejects_internal_frame() {
        let (al, a, _) = setup();
        let t = al.id("t").unwrap();
        let frame: Frame = [t].into_iter().collect();
        assert!(par(&action(&al, a), &action(&al, a), &frame).is_err());
    }

    #[test]
    fn power_counts_copies() {
        let (al, a, _) = setup();
        let p = power(&action(&al, a), 3).unwrap();
        assert_eq!(p.num_states(), 4);
        assert!(isomorphic(&power(&action(&al, a), 0).unwrap(), &one(&al)));
    }
}
