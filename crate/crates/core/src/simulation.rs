//! Rooted η-simulation between automata, computed as a greatest fixpoint,
//! plus an independent bounded tree-unfolding oracle.

use std::collections::{HashSet, VecDeque};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::automaton::{check_compatible, Automaton, StateId};
use crate::error::{Error, Result};
use crate::exec::Execution;

/// Reflexive-transitive closure of the internal-action edges.
#[derive(Clone, Debug)]
pub struct TauClosure {
    reach: Vec<Vec<StateId>>,
}

impl TauClosure {
    pub fn of(p: &Automaton) -> TauClosure {
        let alphabet = p.alphabet();
        let n = p.num_states();
        let mut reach = Vec::with_capacity(n);
        let mut seen = vec![usize::MAX; n];
        for s in p.states() {
            let mut out = vec![s];
            seen[s.index()] = s.index();
            let mut head = 0;
            while head < out.len() {
                let x = out[head];
                head += 1;
                for &(a, d) in p.successors(x) {
                    if alphabet.is_internal(a) && seen[d.index()] != s.index() {
                        seen[d.index()] = s.index();
                        out.push(d);
                    }
                }
            }
            out.sort_unstable();
            reach.push(out);
        }
        TauClosure { reach }
    }

    /// All `y` with `x ⇒ y`, sorted.
    pub fn from(&self, x: StateId) -> &[StateId] {
        &self.reach[x.index()]
    }

    pub fn reaches(&self, x: StateId, y: StateId) -> bool {
        self.reach[x.index()].binary_search(&y).is_ok()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (StateId, StateId)> + '_ {
        self.reach
            .iter()
            .enumerate()
            .flat_map(|(x, ys)| ys.iter().map(move |&y| (StateId::from_index(x), y)))
    }
}

/// A set of state pairs `(x, y)` with `x` in the left automaton and `y` in
/// the right one.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimRelation {
    pub pairs: Vec<(StateId, StateId)>,
}

impl SimRelation {
    pub fn contains(&self, x: StateId, y: StateId) -> bool {
        self.pairs.binary_search(&(x, y)).is_ok()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

impl FromIterator<(StateId, StateId)> for SimRelation {
    fn from_iter<I: IntoIterator<Item = (StateId, StateId)>>(iter: I) -> Self {
        let mut pairs: Vec<_> = iter.into_iter().collect();
        pairs.sort_unstable();
        pairs.dedup();
        SimRelation { pairs }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Strategy {
    /// Deletion worklist, rechecking only the dependents of a removed pair.
    #[default]
    Worklist,
    /// Worklist with a seeded random initial order.
    Shuffled(u64),
    /// Synchronous rounds: every surviving pair is checked against the
    /// previous round's relation.
    Rounds(Execution),
}

/// Dense bit matrix indexed by `(x, y)`.
#[derive(Clone, Debug)]
pub(crate) struct BitRel {
    words: usize,
    bits: Vec<u64>,
}

impl BitRel {
    pub(crate) fn new(rows: usize, cols: usize) -> BitRel {
        let words = cols.div_ceil(64).max(1);
        BitRel {
            words,
            bits: vec![0; rows * words],
        }
    }

    #[inline]
    pub(crate) fn get(&self, x: usize, y: usize) -> bool {
        self.bits[x * self.words + y / 64] >> (y % 64) & 1 == 1
    }

    #[inline]
    pub(crate) fn set(&mut self, x: usize, y: usize, v: bool) {
        let w = &mut self.bits[x * self.words + y / 64];
        if v {
            *w |= 1 << (y % 64);
        } else {
            *w &= !(1 << (y % 64));
        }
    }
}

/// For each state entered by a probabilistic action: the flip's spec index
/// and the target of each guard, by branch index.
pub(crate) type BranchTable = Vec<Option<(usize, Vec<StateId>)>>;

struct Checker<'a> {
    p: &'a Automaton,
    q: &'a Automaton,
    tau_q: TauClosure,
    branches: Option<(&'a BranchTable, &'a BranchTable)>,
}

impl Checker<'_> {
    fn initial_candidates(&self) -> BitRel {
        let (p, q) = (self.p, self.q);
        let mut rel = BitRel::new(p.num_states(), q.num_states());
        for x in p.states() {
            for y in q.states() {
                let rooted = x != p.initial() || y == q.initial();
                let finals = !p.is_final(x) || q.is_final(y);
                if rooted && finals {
                    rel.set(x.index(), y.index(), true);
                }
            }
        }
        rel
    }

    /// Whether every move of `x` can be answered from `y` within `rel`.
    fn transfers(&self, rel: &BitRel, x: StateId, y: StateId) -> bool {
        if let Some((bp, bq)) = self.branches {
            if let (Some((sp, xs)), Some((sq, ys))) = (&bp[x.index()], &bq[y.index()]) {
                if sp == sq && !xs.iter().zip(ys).all(|(x2, y2)| rel.get(x2.index(), y2.index())) {
                    return false;
                }
            }
        }
        let alphabet = self.p.alphabet();
        let closure = self.tau_q.from(y);
        self.p.successors(x).iter().all(|&(a, x2)| {
            if alphabet.is_internal(a) {
                closure.iter().any(|&y2| rel.get(x2.index(), y2.index()))
            } else {
                closure.iter().any(|&y1| {
                    rel.get(x.index(), y1.index())
                        && self
                            .q
                            .successors_on(y1, a)
                            .any(|y2| rel.get(x2.index(), y2.index()))
                })
            }
        })
    }

    fn worklist(&self, rel: &mut BitRel, shuffle: Option<u64>) {
        let (np, nq) = (self.p.num_states(), self.q.num_states());
        let preds = self.p.predecessors();
        let mut queued = BitRel::new(np, nq);
        let mut initial: Vec<(StateId, StateId)> = Vec::new();
        for x in self.p.states() {
            for y in self.q.states() {
                if rel.get(x.index(), y.index()) {
                    initial.push((x, y));
                    queued.set(x.index(), y.index(), true);
                }
            }
        }
        if let Some(seed) = shuffle {
            initial.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        }
        let mut queue: VecDeque<(StateId, StateId)> = initial.into();
        while let Some((x, y)) = queue.pop_front() {
            queued.set(x.index(), y.index(), false);
            if !rel.get(x.index(), y.index()) || self.transfers(rel, x, y) {
                continue;
            }
            rel.set(x.index(), y.index(), false);
            for &x0 in preds[x.index()].iter().chain(std::iter::once(&x)) {
                for y0 in self.q.states() {
                    if rel.get(x0.index(), y0.index()) && !queued.get(x0.index(), y0.index()) {
                        queued.set(x0.index(), y0.index(), true);
                        queue.push_back((x0, y0));
                    }
                }
            }
        }
    }

    fn rounds(&self, rel: &mut BitRel, exec: Execution) {
        loop {
            let removals: Vec<Vec<StateId>> = exec.map_range(self.p.num_states(), |xi| {
                let x = StateId::from_index(xi);
                self.q
                    .states()
                    .filter(|&y| rel.get(xi, y.index()) && !self.transfers(rel, x, y))
                    .collect()
            });
            let mut changed = false;
            for (xi, ys) in removals.into_iter().enumerate() {
                for y in ys {
                    rel.set(xi, y.index(), false);
                    changed = true;
                }
            }
            if !changed {
                return;
            }
        }
    }
}

/// The largest relation satisfying every clause except the requirement
/// that the initial states be related.
pub(crate) fn largest_relation(p: &Automaton, q: &Automaton, strategy: Strategy) -> Result<BitRel> {
    largest_relation_with(p, q, strategy, None)
}

/// As [`largest_relation`], additionally requiring related post-flip states
/// of the same flip to relate their guard targets branch by branch.
pub(crate) fn largest_relation_with(
    p: &Automaton,
    q: &Automaton,
    strategy: Strategy,
    branches: Option<(&BranchTable, &BranchTable)>,
) -> Result<BitRel> {
    check_compatible(p, q)?;
    let checker = Checker {
        p,
        q,
        tau_q: TauClosure::of(q),
        branches,
    };
    let mut rel = checker.initial_candidates();
    match strategy {
        Strategy::Worklist => checker.worklist(&mut rel, None),
        Strategy::Shuffled(seed) => checker.worklist(&mut rel, Some(seed)),
        Strategy::Rounds(exec) => checker.rounds(&mut rel, exec),
    }
    Ok(rel)
}

/// The greatest rooted η-simulation of `p` by `q`, or `None` when the
/// initial states cannot be related.
pub fn greatest_simulation(p: &Automaton, q: &Automaton) -> Result<Option<SimRelation>> {
    greatest_simulation_with(p, q, Strategy::default())
}

pub fn greatest_simulation_with(
    p: &Automaton,
    q: &Automaton,
    strategy: Strategy,
) -> Result<Option<SimRelation>> {
    let rel = largest_relation(p, q, strategy)?;
    if !rel.get(p.initial().index(), q.initial().index()) {
        return Ok(None);
    }
    Ok(Some(
        p.states()
            .flat_map(|x| q.states().map(move |y| (x, y)))
            .filter(|&(x, y)| rel.get(x.index(), y.index()))
            .collect(),
    ))
}

/// `p ≤ q`.
pub fn leq(p: &Automaton, q: &Automaton) -> Result<bool> {
    let rel = largest_relation(p, q, Strategy::default())?;
    Ok(rel.get(p.initial().index(), q.initial().index()))
}

/// `p ≤ q` and `q ≤ p`.
pub fn equiv(p: &Automaton, q: &Automaton) -> Result<bool> {
    Ok(leq(p, q)? && leq(q, p)?)
}

/// Checks every clause of rooted η-simulation for an explicit relation,
/// including that it relates the two initial states.
pub fn is_simulation(p: &Automaton, q: &Automaton, rel: &SimRelation) -> bool {
    if check_compatible(p, q).is_err() {
        return false;
    }
    let set: HashSet<(StateId, StateId)> = rel.pairs.iter().copied().collect();
    if !set.contains(&(p.initial(), q.initial())) {
        return false;
    }
    let tau = TauClosure::of(q);
    let alphabet = p.alphabet();
    set.iter().all(|&(x, y)| {
        if x.index() >= p.num_states() || y.index() >= q.num_states() {
            return false;
        }
        if x == p.initial() && y != q.initial() {
            return false;
        }
        if p.is_final(x) && !q.is_final(y) {
            return false;
        }
        p.successors(x).iter().all(|&(a, x2)| {
            if alphabet.is_internal(a) {
                tau.from(y).iter().any(|&y2| set.contains(&(x2, y2)))
            } else {
                tau.from(y).iter().any(|&y1| {
                    set.contains(&(x, y1))
                        && q.successors_on(y1, a).any(|y2| set.contains(&(x2, y2)))
                })
            }
        })
    })
}

/// A finite tree: node 0 is the root.
#[derive(Clone, Debug)]
pub struct Tree {
    pub nodes: Vec<TreeNode>,
}

#[derive(Clone, Debug)]
pub struct TreeNode {
    pub is_final: bool,
    pub children: Vec<(crate::alphabet::ActionId, usize)>,
}

const TREE_NODE_CAP: usize = 1 << 20;

/// Unfolds `p` into its tree of paths of length at most `depth`; nodes
/// keep the finality of the state they unfold.
pub fn unfold(p: &Automaton, depth: usize) -> Result<Tree> {
    let mut nodes = vec![TreeNode {
        is_final: p.is_final(p.initial()),
        children: Vec::new(),
    }];
    let mut stack = vec![(0usize, p.initial(), 0usize)];
    while let Some((node, s, d)) = stack.pop() {
        if d == depth {
            continue;
        }
        for &(a, t) in p.successors(s) {
            let child = nodes.len();
            if child >= TREE_NODE_CAP {
                return Err(Error::Guardrail {
                    what: "tree unfolding".into(),
                    states: child,
                    cap: TREE_NODE_CAP,
                });
            }
            nodes.push(TreeNode {
                is_final: p.is_final(t),
                children: Vec::new(),
            });
            nodes[node].children.push((a, child));
            stack.push((child, t, d + 1));
        }
    }
    Ok(Tree { nodes })
}

/// Decides whether `tree ≤ q`. Children are solved before parents; at each
/// node the set of `q` states able to simulate it is a local greatest
/// fixpoint, because a node may stutter against its own `q` partner.
pub fn tree_leq(tree: &Tree, alphabet: &crate::alphabet::Alphabet, q: &Automaton) -> bool {
    let tau = TauClosure::of(q);
    let nq = q.num_states();
    let mut sim: Vec<Vec<bool>> = vec![Vec::new(); tree.nodes.len()];
    // Children always have larger indices than their parent.
    for u in (0..tree.nodes.len()).rev() {
        let node = &tree.nodes[u];
        let mut set: Vec<bool> = (0..nq)
            .map(|y| {
                let y = StateId::from_index(y);
                (!node.is_final || q.is_final(y)) && (u != 0 || y == q.initial())
            })
            .collect();
        loop {
            let mut changed = false;
            for yi in 0..nq {
                if !set[yi] {
                    continue;
                }
                let y = StateId::from_index(yi);
                let ok = node.children.iter().all(|&(a, c)| {
                    let child = &sim[c];
                    if alphabet.is_internal(a) {
                        tau.from(y).iter().any(|y2| child[y2.index()])
                    } else {
                        tau.from(y).iter().any(|&y1| {
                            set[y1.index()] && q.successors_on(y1, a).any(|y2| child[y2.index()])
                        })
                    }
                });
                if !ok {
                    set[yi] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        sim[u] = set;
    }
    sim[0][q.initial().index()]
}

/// Bounded tree-language inclusion: every tree of depth at most `depth`
/// below `p` is below `q`. The depth-`depth` unfolding generates that
/// family, so it is enough to test the unfolding itself.
pub fn bounded_tree_language_leq(p: &Automaton, q: &Automaton, depth: usize) -> Result<bool> {
    check_compatible(p, q)?;
    let tree = unfold(p, depth)?;
    Ok(tree_leq(&tree, p.alphabet(), q))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::alphabet::Alphabet;
    use crate::automaton::AutomatonBuilder;
    use crate::ops;
    use crate::term::compile_str;

    fn alpha() -> Arc<Alphabet> {
        Arc::new(
            Alphabet::from_config("external a, b; internal t; prob flip: 1/2 th, 1/2 tt;").unwrap(),
        )
    }

    fn c(text: &str) -> Automaton {
        compile_str(text, &alpha()).unwrap()
    }

    #[test]
    fn closure_without_internal_edges_is_identity() {
        let p = c("a.b + b");
        let tau = TauClosure::of(&p);
        let pairs: Vec<_> = tau.pairs().collect();
        assert_eq!(pairs.len(), p.num_states());
        assert!(pairs.iter().all(|(x, y)| x == y));
    }

    #[test]
    fn closure_chain_and_cycle() {
        let al = alpha();
        let mut b = AutomatonBuilder::new(al.clone());
        let i = b.add_state();
        let x = b.add_state();
        let y = b.add_state();
        let z = b.add_state();
        b.add_named(i, "a", x).unwrap();
        b.add_named(x, "t", y).unwrap();
        b.add_named(y, "t", z).unwrap();
        b.add_named(z, "t", y).unwrap();
        let p = b.build(i);
        let tau = TauClosure::of(&p);
        assert!(tau.reaches(x, y) && tau.reaches(x, z));
        assert!(tau.reaches(y, z) && tau.reaches(z, y));
        assert!(!tau.reaches(y, x));
        assert!(!tau.reaches(i, x));
        assert_eq!(tau.pairs().count(), 4 + 2 + 1 + 1);
    }

    #[test]
    fn identity_is_contained() {
        let p = c("(a + t.b)*.a");
        let rel = greatest_simulation(&p, &p).unwrap().unwrap();
        for s in p.states() {
            assert!(rel.contains(s, s));
        }
        assert!(is_simulation(&p, &p, &rel));
    }

    #[test]
    fn flip_distribution_is_one_sided() {
        let p = c("flip.(th.a + tt.b)");
        let q = c("flip.th.a + flip.tt.b");
        assert!(leq(&q, &p).unwrap());
        assert!(!leq(&p, &q).unwrap());
    }

    #[test]
    fn internal_choice_asymmetry() {
        let split = c("t.a + t.b");
        let joint = c("t.(a + b)");
        assert!(leq(&split, &joint).unwrap());
        assert!(!leq(&joint, &split).unwrap());
    }

    #[test]
    fn basic_inclusions() {
        assert!(leq(&c("a"), &c("a + b")).unwrap());
        assert!(!leq(&c("a + b"), &c("a")).unwrap());
        assert!(equiv(&c("a*"), &c("1 + a.a*")).unwrap());
        assert!(equiv(&c("a + a"), &c("a")).unwrap());
    }

    #[test]
    fn rootedness_matters() {
        // The root of `a` may only pair with the root of `t.a`, which has no a-move.
        assert!(!leq(&c("a"), &c("t.a")).unwrap());
        assert!(leq(&c("t.a"), &c("a")).unwrap());
    }

    #[test]
    fn strategies_agree() {
        let p = c("(a.t + b)*.(a + t.b)");
        let q = c("(a + b + t)*");
        let base = greatest_simulation(&p, &q).unwrap();
        assert!(base.is_some());
        for strategy in [
            Strategy::Shuffled(1),
            Strategy::Shuffled(99),
            Strategy::Rounds(Execution::Sequential),
            Strategy::Rounds(Execution::Parallel),
        ] {
            assert_eq!(greatest_simulation_with(&p, &q, strategy).unwrap(), base);
        }
    }

    #[test]
    fn tree_oracle_examples() {
        let al = alpha();
        let a = ops::action(&al, al.id("a").unwrap());
        assert!(!bounded_tree_language_leq(&a, &ops::zero(&al), 1).unwrap());
        let p = c("a.(t.b + a)");
        for d in 0..4 {
            assert!(bounded_tree_language_leq(&p, &p, d).unwrap());
        }
        let q = c("a.t.b + a.a");
        assert_eq!(
            bounded_tree_language_leq(&p, &q, 3).unwrap(),
            leq(&p, &q).unwrap()
        );
        assert_eq!(
            bounded_tree_language_leq(&q, &p, 3).unwrap(),
            leq(&q, &p).unwrap()
        );
    }

    #[test]
    fn unfold_counts_paths() {
        let p = c("(a + b)*");
        let tree = unfold(&p, 3).unwrap();
        assert_eq!(tree.nodes.len(), 1 + 2 + 4 + 8);
    }
}
