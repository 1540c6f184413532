//! Seeded random terms and exhaustive enumeration of small automata.

use std::collections::HashSet;
use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::alphabet::{ActionId, Alphabet};
use crate::automaton::{Automaton, StateId, Transition};
use crate::error::Result;
use crate::term::{compile, Term};

/// Relative weights of the term constructors.
#[derive(Clone, Debug, PartialEq)]
pub struct OpWeights {
    pub zero: u32,
    pub one: u32,
    pub act: u32,
    pub plus: u32,
    pub seq: u32,
    pub par: u32,
    pub star: u32,
    /// A probabilistic choice `flip.(g₁.t₁ + … + gₙ.tₙ)`.
    pub flip: u32,
}

impl Default for OpWeights {
    fn default() -> Self {
        OpWeights {
            zero: 1,
            one: 2,
            act: 6,
            plus: 4,
            seq: 4,
            par: 2,
            star: 2,
            flip: 1,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GenConfig {
    pub max_depth: usize,
    pub weights: OpWeights,
    /// Atoms drawn for `act`; guards are never drawn directly.
    pub atoms: Vec<ActionId>,
    /// Automata above this many states are discarded and redrawn.
    pub state_cap: usize,
}

impl GenConfig {
    /// Every non-guard, non-probabilistic action is an atom.
    pub fn for_alphabet(alphabet: &Alphabet) -> GenConfig {
        GenConfig {
            max_depth: 3,
            weights: OpWeights::default(),
            atoms: alphabet
                .ids()
                .filter(|&a| !alphabet.is_guard(a) && !alphabet.is_probabilistic(a))
                .collect(),
            state_cap: 200,
        }
    }

    /// Terms that compile to p-automata whose only internal actions are
    /// guards: no `‖`, no plain internal atoms.
    pub fn p_automata(alphabet: &Alphabet) -> GenConfig {
        let mut cfg = GenConfig::for_alphabet(alphabet);
        cfg.atoms.retain(|&a| !alphabet.is_internal(a));
        cfg.weights.par = 0;
        cfg.weights.flip = 3;
        cfg
    }
}

#[derive(Clone, Debug)]
pub struct TermGenerator {
    alphabet: Arc<Alphabet>,
    config: GenConfig,
    rng: ChaCha8Rng,
}

impl TermGenerator {
    pub fn new(alphabet: Arc<Alphabet>, config: GenConfig, seed: u64) -> TermGenerator {
        TermGenerator {
            alphabet,
            config,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn config(&self) -> &GenConfig {
        &self.config
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn term(&mut self) -> Term {
        let depth = self.config.max_depth;
        self.term_at(depth)
    }

    /// A term together with its automaton, redrawn until it fits the cap.
    pub fn sample(&mut self) -> Result<(Term, Automaton)> {
        loop {
            let t = self.term();
            let m = compile(&t, &self.alphabet)?;
            if m.num_states() <= self.config.state_cap {
                return Ok((t, m));
            }
        }
    }

    fn atom(&mut self) -> Term {
        if self.config.atoms.is_empty() {
            return Term::One;
        }
        let a = self.config.atoms[self.rng.gen_range(0..self.config.atoms.len())];
        Term::act(self.alphabet.name(a))
    }

    fn term_at(&mut self, depth: usize) -> Term {
        let w = &self.config.weights;
        let flips = !self.alphabet.prob_specs().is_empty();
        let leaves = [(0u8, w.zero), (1, w.one), (2, w.act)];
        let inner = [
            (3u8, w.plus),
            (4, w.seq),
            (5, w.par),
            (6, w.star),
            (7, if flips { w.flip } else { 0 }),
        ];
        let choices: Vec<(u8, u32)> = if depth == 0 {
            leaves.to_vec()
        } else {
            leaves.iter().chain(inner.iter()).copied().collect()
        };
        let total: u32 = choices.iter().map(|c| c.1).sum();
        let mut pick = self.rng.gen_range(0..total.max(1));
        let mut op = 2;
        for (k, wt) in choices {
            if pick < wt {
                op = k;
                break;
            }
            pick -= wt;
        }
        let d = depth.saturating_sub(1);
        match op {
            0 => Term::Zero,
            1 => Term::One,
            2 => self.atom(),
            3 => Term::plus(self.term_at(d), self.term_at(d)),
            4 => Term::seq(self.term_at(d), self.term_at(d)),
            5 => Term::par(self.term_at(d), self.term_at(d)),
            6 => Term::star(self.term_at(d)),
            _ => {
                let specs = self.alphabet.prob_specs().to_vec();
                let spec = &specs[self.rng.gen_range(0..specs.len())];
                let branches = spec
                    .branches
                    .iter()
                    .map(|b| Term::seq(Term::act(self.alphabet.name(b.guard)), self.term_at(d)))
                    .reduce(Term::plus)
                    .expect("specs have branches");
                Term::seq(Term::act(self.alphabet.name(spec.flip)), branches)
            }
        }
    }
}

/// Parameters of an exhaustive enumeration of small automata.
#[derive(Clone, Debug)]
pub struct Universe {
    pub max_states: usize,
    pub actions: Vec<ActionId>,
    /// Upper bound on the number of transitions; `None` means unbounded.
    pub max_transitions: Option<usize>,
    pub acyclic_only: bool,
}

/// All well-formed automata of the universe, one per isomorphism class.
/// State 0 is initial.
pub fn enumerate(alphabet: &Arc<Alphabet>, universe: &Universe) -> Vec<Automaton> {
    let mut out = Vec::new();
    for n in 1..=universe.max_states {
        enumerate_exact(alphabet, universe, n, &mut out);
    }
    out
}

fn enumerate_exact(alphabet: &Arc<Alphabet>, universe: &Universe, n: usize, out: &mut Vec<Automaton>) {
    let k = universe.actions.len();
    // Slots (src, action, dst) with dst never the initial state.
    let slots: Vec<(usize, usize, usize)> = (0..n)
        .flat_map(|s| (0..k).flat_map(move |a| (1..n).map(move |t| (s, a, t))))
        .filter(|&(s, _, t)| !universe.acyclic_only || s != t)
        .collect();
    assert!(slots.len() <= 63, "universe too large to enumerate");
    let limit = universe.max_transitions.unwrap_or(slots.len()).min(slots.len());
    let perms = permutations(n);
    let images = slot_images(&slots, &perms);
    let mut seen: HashSet<(u64, u32)> = HashSet::new();

    let mut chosen: Vec<usize> = Vec::new();
    let mut visit = |mask: u64| {
        if !reachable(n, &slots, mask) {
            return;
        }
        if universe.acyclic_only && has_cycle(n, &slots, mask) {
            return;
        }
        for finals in 0u32..(1 << n) {
            let key = canonical(n, &images, &perms, mask, finals);
            if seen.insert(key) {
                let transitions = slots
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &(s, a, t))| Transition {
                        src: StateId::from_index(s),
                        action: universe.actions[a],
                        dst: StateId::from_index(t),
                    });
                let fin = (0..n).filter(|i| finals >> i & 1 == 1).map(StateId::from_index);
                out.push(
                    Automaton::from_parts(alphabet.clone(), n, transitions, StateId::from_index(0), fin)
                        .expect("slots are in range"),
                );
            }
        }
    };
    subsets(slots.len(), limit, 0, 0, &mut chosen, &mut visit);
}

fn subsets(n: usize, limit: usize, start: usize, mask: u64, chosen: &mut Vec<usize>, f: &mut impl FnMut(u64)) {
    f(mask);
    if chosen.len() == limit {
        return;
    }
    for i in start..n {
        chosen.push(i);
        subsets(n, limit, i + 1, mask | 1 << i, chosen, f);
        chosen.pop();
    }
}

fn reachable(n: usize, slots: &[(usize, usize, usize)], mask: u64) -> bool {
    let mut seen = 1u32;
    loop {
        let mut next = seen;
        for (i, &(s, _, t)) in slots.iter().enumerate() {
            if mask >> i & 1 == 1 && seen >> s & 1 == 1 {
                next |= 1 << t;
            }
        }
        if next == seen {
            return seen == (1 << n) - 1;
        }
        seen = next;
    }
}

fn has_cycle(n: usize, slots: &[(usize, usize, usize)], mask: u64) -> bool {
    // Repeatedly strip states without outgoing edges.
    let mut alive = (1u32 << n) - 1;
    loop {
        let mut has_out = 0u32;
        for (i, &(s, _, t)) in slots.iter().enumerate() {
            if mask >> i & 1 == 1 && alive >> s & 1 == 1 && alive >> t & 1 == 1 {
                has_out |= 1 << s;
            }
        }
        let next = alive & has_out;
        if next == alive {
            return alive != 0;
        }
        alive = next;
    }
}

/// Permutations of `0..n` fixing 0.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(rest: &mut Vec<usize>, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(acc.clone());
            return;
        }
        for i in 0..rest.len() {
            let x = rest.remove(i);
            acc.push(x);
            go(rest, acc, out);
            acc.pop();
            rest.insert(i, x);
        }
    }
    let mut out = Vec::new();
    let mut acc = vec![0];
    go(&mut (1..n).collect(), &mut acc, &mut out);
    out
}

/// For each permutation, where each slot goes.
fn slot_images(slots: &[(usize, usize, usize)], perms: &[Vec<usize>]) -> Vec<Vec<usize>> {
    perms
        .iter()
        .map(|p| {
            slots
                .iter()
                .map(|&(s, a, t)| {
                    slots
                        .iter()
                        .position(|&x| x == (p[s], a, p[t]))
                        .expect("permutations preserve slot validity")
                })
                .collect()
        })
        .collect()
}

fn canonical(n: usize, images: &[Vec<usize>], perms: &[Vec<usize>], mask: u64, finals: u32) -> (u64, u32) {
    images
        .iter()
        .zip(perms)
        .map(|(img, p)| {
            let mut m = 0u64;
            let mut rest = mask;
            while rest != 0 {
                let i = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                m |= 1 << img[i];
            }
            let mut f = 0u32;
            for (i, &pi) in p.iter().enumerate().take(n) {
                if finals >> i & 1 == 1 {
                    f |= 1 << pi;
                }
            }
            (m, f)
        })
        .min()
        .expect("identity permutation")
}
