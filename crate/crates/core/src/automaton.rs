//! Finite automata `(states, transitions, initial, finals)` over a shared
//! alphabet, with the reachability and initiality well-formedness checks.

use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::alphabet::{ActionId, Alphabet};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StateId(pub(crate) u32);

impl StateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn from_index(i: usize) -> StateId {
        StateId(i as u32)
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transition {
    pub src: StateId,
    pub action: ActionId,
    pub dst: StateId,
}

#[derive(Clone, Debug)]
pub struct Automaton {
    alphabet: Arc<Alphabet>,
    /// Outgoing edges per state, sorted by `(action, dst)` and deduplicated.
    succ: Vec<Vec<(ActionId, StateId)>>,
    initial: StateId,
    finals: Vec<bool>,
}

/// Reachability and initiality violations found by [`Automaton::validate`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Violations {
    pub unreachable: Vec<StateId>,
    pub into_initial: Vec<Transition>,
}

impl Violations {
    pub fn is_empty(&self) -> bool {
        self.unreachable.is_empty() && self.into_initial.is_empty()
    }
}

impl fmt::Display for Violations {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.unreachable.is_empty() {
            let ids: Vec<String> = self.unreachable.iter().map(|s| s.to_string()).collect();
            parts.push(format!("unreachable states [{}]", ids.join(", ")));
        }
        if !self.into_initial.is_empty() {
            let ts: Vec<String> = self
                .into_initial
                .iter()
                .map(|t| format!("{} -> {}", t.src, t.dst))
                .collect();
            parts.push(format!("transitions into the initial state [{}]", ts.join(", ")));
        }
        f.write_str(&parts.join("; "))
    }
}

impl Automaton {
    /// Assembles an automaton without checking well-formedness; see
    /// [`Automaton::validate`].
    pub fn from_parts(
        alphabet: Arc<Alphabet>,
        num_states: usize,
        transitions: impl IntoIterator<Item = Transition>,
        initial: StateId,
        finals: impl IntoIterator<Item = StateId>,
    ) -> Result<Automaton> {
        if initial.index() >= num_states {
            return Err(Error::Format(format!("initial state {initial} out of range")));
        }
        let mut succ = vec![Vec::new(); num_states];
        for t in transitions {
            if t.src.index() >= num_states || t.dst.index() >= num_states {
                return Err(Error::Format(format!(
                    "transition {} -> {} out of range",
                    t.src, t.dst
                )));
            }
            if t.action.index() >= alphabet.len() {
                return Err(Error::Format(format!("unknown action id {}", t.action.0)));
            }
            succ[t.src.index()].push((t.action, t.dst));
        }
        let mut fin = vec![false; num_states];
        for s in finals {
            if s.index() >= num_states {
                return Err(Error::Format(format!("final state {s} out of range")));
            }
            fin[s.index()] = true;
        }
        Ok(Automaton::from_succ(alphabet, succ, initial, fin))
    }

    pub(crate) fn from_succ(
        alphabet: Arc<Alphabet>,
        mut succ: Vec<Vec<(ActionId, StateId)>>,
        initial: StateId,
        finals: Vec<bool>,
    ) -> Automaton {
        debug_assert_eq!(succ.len(), finals.len());
        for edges in &mut succ {
            edges.sort_unstable();
            edges.dedup();
        }
        Automaton {
            alphabet,
            succ,
            initial,
            finals,
        }
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.succ.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        (0..self.succ.len() as u32).map(StateId)
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn is_final(&self, s: StateId) -> bool {
        self.finals[s.index()]
    }

    pub fn finals(&self) -> impl Iterator<Item = StateId> + '_ {
        self.states().filter(|&s| self.finals[s.index()])
    }

    pub fn num_finals(&self) -> usize {
        self.finals.iter().filter(|&&f| f).count()
    }

    pub fn successors(&self, s: StateId) -> &[(ActionId, StateId)] {
        &self.succ[s.index()]
    }

    /// Successors of `s` under action `a`.
    pub fn successors_on(&self, s: StateId, a: ActionId) -> impl Iterator<Item = StateId> + '_ {
        let edges = &self.succ[s.index()];
        let start = edges.partition_point(|&(b, _)| b < a);
        edges[start..]
            .iter()
            .take_while(move |&&(b, _)| b == a)
            .map(|&(_, d)| d)
    }

    pub fn transitions(&self) -> impl Iterator<Item = Transition> + '_ {
        self.succ.iter().enumerate().flat_map(|(src, edges)| {
            edges.iter().map(move |&(action, dst)| Transition {
                src: StateId(src as u32),
                action,
                dst,
            })
        })
    }

    pub fn predecessors(&self) -> Vec<Vec<StateId>> {
        let mut pred = vec![Vec::new(); self.num_states()];
        for t in self.transitions() {
            pred[t.dst.index()].push(t.src);
        }
        for p in &mut pred {
            p.sort_unstable();
            p.dedup();
        }
        pred
    }

    pub fn validate(&self) -> Result<(), Violations> {
        let mut v = Violations::default();
        let reached = self.reachable();
        v.unreachable = self.states().filter(|s| !reached[s.index()]).collect();
        v.into_initial = self.transitions().filter(|t| t.dst == self.initial).collect();
        if v.is_empty() {
            Ok(())
        } else {
            Err(v)
        }
    }

    pub fn is_well_formed(&self) -> bool {
        self.validate().is_ok()
    }

    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.num_states()];
        let mut queue = VecDeque::from([self.initial]);
        seen[self.initial.index()] = true;
        while let Some(s) = queue.pop_front() {
            for &(_, d) in &self.succ[s.index()] {
                if !seen[d.index()] {
                    seen[d.index()] = true;
                    queue.push_back(d);
                }
            }
        }
        seen
    }

    /// Drops unreachable states, renumbering the rest in breadth-first
    /// order. The returned map sends old ids to new ids.
    pub fn prune_unreachable(&self) -> (Automaton, Vec<Option<StateId>>) {
        let mut map = vec![None; self.num_states()];
        let mut order = vec![self.initial];
        map[self.initial.index()] = Some(StateId(0));
        let mut head = 0;
        while head < order.len() {
            let s = order[head];
            head += 1;
            for &(_, d) in &self.succ[s.index()] {
                if map[d.index()].is_none() {
                    map[d.index()] = Some(StateId(order.len() as u32));
                    order.push(d);
                }
            }
        }
        let succ = order
            .iter()
            .map(|s| {
                self.succ[s.index()]
                    .iter()
                    .map(|&(a, d)| (a, map[d.index()].expect("successor reached")))
                    .collect()
            })
            .collect();
        let finals = order.iter().map(|s| self.finals[s.index()]).collect();
        (
            Automaton::from_succ(self.alphabet.clone(), succ, StateId(0), finals),
            map,
        )
    }

    /// True when no cycle is reachable.
    pub fn is_acyclic(&self) -> bool {
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut mark = vec![0u8; self.num_states()];
        let mut stack = vec![(self.initial, 0usize)];
        mark[self.initial.index()] = 1;
        while let Some((s, i)) = stack.pop() {
            let edges = &self.succ[s.index()];
            if i < edges.len() {
                stack.push((s, i + 1));
                let d = edges[i].1;
                match mark[d.index()] {
                    0 => {
                        mark[d.index()] = 1;
                        stack.push((d, 0));
                    }
                    1 => return false,
                    _ => {}
                }
            } else {
                mark[s.index()] = 2;
            }
        }
        true
    }

    /// Length of the longest path from the initial state, if acyclic.
    pub fn longest_path(&self) -> Option<usize> {
        if !self.is_acyclic() {
            return None;
        }
        fn go(a: &Automaton, s: StateId, memo: &mut Vec<Option<usize>>) -> usize {
            if let Some(v) = memo[s.index()] {
                return v;
            }
            let v = a.succ[s.index()]
                .iter()
                .map(|&(_, d)| 1 + go(a, d, memo))
                .max()
                .unwrap_or(0);
            memo[s.index()] = Some(v);
            v
        }
        let mut memo = vec![None; self.num_states()];
        Some(go(self, self.initial, &mut memo))
    }

    /// Same automaton over another alphabet declaring the same actions
    /// (frames may differ).
    pub fn with_alphabet(&self, alphabet: Arc<Alphabet>) -> Result<Automaton> {
        if !self.alphabet.same_actions(&alphabet) {
            return Err(Error::AlphabetMismatch(
                "alphabets declare different actions".into(),
            ));
        }
        Ok(Automaton {
            alphabet,
            ..self.clone()
        })
    }

    /// Structural fingerprint: identical for automata that are equal after
    /// breadth-first renumbering with edges visited in `(action, dst)` order.
    pub fn structural_key(&self) -> Vec<u32> {
        let (pruned, _) = self.prune_unreachable();
        let mut key = Vec::with_capacity(2 + pruned.num_transitions() * 3 + pruned.num_states());
        key.push(pruned.num_states() as u32);
        for s in pruned.states() {
            key.push(u32::MAX);
            key.push(pruned.finals[s.index()] as u32);
            for &(a, d) in pruned.successors(s) {
                key.push(a.0);
                key.push(d.0);
            }
        }
        key
    }
}

pub(crate) fn check_compatible(p: &Automaton, q: &Automaton) -> Result<()> {
    if Arc::ptr_eq(&p.alphabet, &q.alphabet) || p.alphabet.same_actions(&q.alphabet) {
        Ok(())
    } else {
        Err(Error::AlphabetMismatch(
            "automata are over different action sets".into(),
        ))
    }
}

/// Incremental construction of an automaton.
#[derive(Clone, Debug)]
pub struct AutomatonBuilder {
    alphabet: Arc<Alphabet>,
    succ: Vec<Vec<(ActionId, StateId)>>,
    finals: Vec<bool>,
}

impl AutomatonBuilder {
    pub fn new(alphabet: Arc<Alphabet>) -> AutomatonBuilder {
        AutomatonBuilder {
            alphabet,
            succ: Vec::new(),
            finals: Vec::new(),
        }
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn add_state(&mut self) -> StateId {
        self.succ.push(Vec::new());
        self.finals.push(false);
        StateId(self.succ.len() as u32 - 1)
    }

    pub fn set_final(&mut self, s: StateId, fin: bool) {
        self.finals[s.index()] = fin;
    }

    pub fn add_transition(&mut self, src: StateId, action: ActionId, dst: StateId) {
        self.succ[src.index()].push((action, dst));
    }

    pub fn add_named(&mut self, src: StateId, action: &str, dst: StateId) -> Result<()> {
        let a = self.alphabet.require(action)?;
        self.add_transition(src, a, dst);
        Ok(())
    }

    pub fn num_states(&self) -> usize {
        self.succ.len()
    }

    pub fn build(self, initial: StateId) -> Automaton {
        Automaton::from_succ(self.alphabet, self.succ, initial, self.finals)
    }
}
