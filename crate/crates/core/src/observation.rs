//! Observations, trace languages and may testing.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use crate::alphabet::{ActionId, Alphabet, Frame};
use crate::automaton::{Automaton, StateId};
use crate::error::{Error, Result};
use crate::term::{compile, Term};

/// What a process can show on its own: no success, success after some
/// steps, or immediate success. Ordered `Zero < Tau < One`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Observation {
    Zero,
    Tau,
    One,
}

impl Observation {
    /// Sequential composition of observations.
    pub fn then(self, other: Observation) -> Observation {
        match (self, other) {
            (Observation::Zero, _) | (_, Observation::Zero) => Observation::Zero,
            (Observation::One, x) | (x, Observation::One) => x,
            (Observation::Tau, Observation::Tau) => Observation::Tau,
        }
    }

    /// Choice of observations.
    pub fn or(self, other: Observation) -> Observation {
        self.max(other)
    }
}

impl fmt::Display for Observation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Observation::Zero => "0",
            Observation::Tau => "τ",
            Observation::One => "1",
        })
    }
}

pub fn observe(p: &Automaton) -> Observation {
    if p.is_final(p.initial()) {
        Observation::One
    } else if p.num_finals() > 0 {
        // Every state of a well-formed automaton is reachable.
        Observation::Tau
    } else {
        Observation::Zero
    }
}

/// Erased NFA: frame actions kept, everything else silent (`None`).
#[derive(Clone, Debug)]
pub struct TraceLanguage {
    alphabet: Arc<Alphabet>,
    succ: Vec<Vec<(Option<ActionId>, StateId)>>,
    initial: StateId,
    finals: Vec<bool>,
}

pub fn trace_language(p: &Automaton) -> TraceLanguage {
    let frame = p.alphabet().frame();
    let succ = p
        .states()
        .map(|s| {
            p.successors(s)
                .iter()
                .map(|&(a, d)| (frame.contains(a).then_some(a), d))
                .collect()
        })
        .collect();
    TraceLanguage {
        alphabet: p.alphabet().clone(),
        succ,
        initial: p.initial(),
        finals: p.states().map(|s| p.is_final(s)).collect(),
    }
}

impl TraceLanguage {
    pub fn num_states(&self) -> usize {
        self.succ.len()
    }

    pub fn frame(&self) -> &Frame {
        self.alphabet.frame()
    }

    fn closure(&self, set: &mut Vec<StateId>) {
        let mut seen: HashSet<StateId> = set.iter().copied().collect();
        let mut i = 0;
        while i < set.len() {
            let s = set[i];
            i += 1;
            for &(a, d) in &self.succ[s.index()] {
                if a.is_none() && seen.insert(d) {
                    set.push(d);
                }
            }
        }
        set.sort_unstable();
    }

    fn step(&self, set: &[StateId], a: ActionId) -> Vec<StateId> {
        let mut out: Vec<StateId> = set
            .iter()
            .flat_map(|s| {
                self.succ[s.index()]
                    .iter()
                    .filter(move |&&(b, _)| b == Some(a))
                    .map(|&(_, d)| d)
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        self.closure(&mut out);
        out
    }

    fn start(&self) -> Vec<StateId> {
        let mut set = vec![self.initial];
        self.closure(&mut set);
        set
    }

    fn accepting(&self, set: &[StateId]) -> bool {
        set.iter().any(|s| self.finals[s.index()])
    }

    pub fn accepts(&self, word: &[ActionId]) -> bool {
        let mut set = self.start();
        for &a in word {
            set = self.step(&set, a);
        }
        self.accepting(&set)
    }

    pub fn accepts_names(&self, word: &[&str]) -> bool {
        let ids: Option<Vec<ActionId>> = word.iter().map(|w| self.alphabet.id(w)).collect();
        ids.is_some_and(|ids| self.accepts(&ids))
    }

    pub fn is_empty(&self) -> bool {
        !self.finals.iter().any(|&f| f)
    }

    /// All accepted words of length at most `max_len`, in length-then-
    /// lexicographic order of action ids.
    pub fn words(&self, max_len: usize) -> Vec<Vec<ActionId>> {
        let frame: Vec<ActionId> = self.frame().iter().collect();
        let mut out = Vec::new();
        let mut layer: Vec<(Vec<ActionId>, Vec<StateId>)> = vec![(Vec::new(), self.start())];
        for len in 0..=max_len {
            let mut next = Vec::new();
            for (word, set) in &layer {
                if self.accepting(set) {
                    out.push(word.clone());
                }
                if len < max_len {
                    for &a in &frame {
                        let s = self.step(set, a);
                        if !s.is_empty() {
                            let mut w = word.clone();
                            w.push(a);
                            next.push((w, s));
                        }
                    }
                }
            }
            layer = next;
        }
        out
    }

    pub fn word_to_string(&self, word: &[ActionId]) -> String {
        if word.is_empty() {
            "ε".into()
        } else {
            word.iter()
                .map(|&a| self.alphabet.name(a))
                .collect::<Vec<_>>()
                .join(".")
        }
    }
}

impl fmt::Display for TraceLanguage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "initial {}", self.initial)?;
        let finals: Vec<String> = (0..self.num_states())
            .filter(|&s| self.finals[s])
            .map(|s| StateId::from_index(s).to_string())
            .collect();
        writeln!(f, "finals {}", finals.join(" "))?;
        for (s, edges) in self.succ.iter().enumerate() {
            for &(a, d) in edges {
                let label = a.map_or("_", |a| self.alphabet.name(a));
                writeln!(f, "{} -{}-> {}", StateId::from_index(s), label, d)?;
            }
        }
        Ok(())
    }
}

fn same_frame(p: &Automaton, q: &Automaton) -> Result<()> {
    if !p.alphabet().same_actions(q.alphabet()) {
        return Err(Error::AlphabetMismatch("alphabets declare different actions".into()));
    }
    if p.alphabet().frame() != q.alphabet().frame() {
        return Err(Error::AlphabetMismatch("frames differ".into()));
    }
    Ok(())
}

/// Exact trace inclusion, by an on-the-fly product of the left NFA with the
/// subset construction of the right one.
pub fn trace_leq(p: &Automaton, q: &Automaton) -> Result<bool> {
    same_frame(p, q)?;
    let (lp, lq) = (trace_language(p), trace_language(q));
    let mut seen: HashSet<(StateId, Vec<StateId>)> = HashSet::new();
    let mut stack = vec![(lp.initial, lq.start())];
    seen.insert(stack[0].clone());
    while let Some((x, set)) = stack.pop() {
        if lp.finals[x.index()] && !lq.accepting(&set) {
            return Ok(false);
        }
        for &(a, x2) in &lp.succ[x.index()] {
            let next = match a {
                None => (x2, set.clone()),
                Some(a) => (x2, lq.step(&set, a)),
            };
            if seen.insert(next.clone()) {
                stack.push(next);
            }
        }
    }
    Ok(true)
}

/// Whether `p ‖ t` can reach a final state, explored without building the
/// product automaton.
pub fn par_can_terminate(p: &Automaton, t: &Automaton, frame: &Frame) -> bool {
    let sync = frame.mask(p.alphabet().len());
    let nt = t.num_states();
    let mut seen = vec![false; p.num_states() * nt];
    let mut stack = vec![(p.initial(), t.initial())];
    seen[p.initial().index() * nt + t.initial().index()] = true;
    while let Some((x, y)) = stack.pop() {
        if p.is_final(x) && t.is_final(y) {
            return true;
        }
        let mut push = |x2: StateId, y2: StateId| {
            let k = x2.index() * nt + y2.index();
            if !seen[k] {
                seen[k] = true;
                stack.push((x2, y2));
            }
        };
        for &(a, x2) in p.successors(x) {
            if sync[a.index()] {
                for y2 in t.successors_on(y, a) {
                    push(x2, y2);
                }
            } else {
                push(x2, y);
            }
        }
        for &(a, y2) in t.successors(y) {
            if !sync[a.index()] {
                push(x, y2);
            }
        }
    }
    false
}

/// Finite test processes over the frame, built from `0`, `1` and frame
/// actions with `+` and `·`. Atoms have depth 1.
#[derive(Clone, Debug)]
pub struct TestSuite {
    alphabet: Arc<Alphabet>,
    terms: Vec<Term>,
    automata: Vec<Automaton>,
}

pub fn test_terms(alphabet: &Alphabet, depth: usize) -> Vec<Term> {
    let mut atoms = vec![Term::Zero, Term::One];
    atoms.extend(alphabet.frame().iter().map(|a| Term::act(alphabet.name(a))));
    if depth == 0 {
        return Vec::new();
    }
    let mut level = atoms.clone();
    for _ in 1..depth {
        let mut next = atoms.clone();
        for s in &level {
            for t in &level {
                next.push(Term::plus(s.clone(), t.clone()));
                next.push(Term::seq(s.clone(), t.clone()));
            }
        }
        level = next;
    }
    level
}

impl TestSuite {
    /// All tests up to `depth`, with tests compiling to the same automaton
    /// kept once.
    pub fn new(alphabet: &Arc<Alphabet>, depth: usize) -> Result<TestSuite> {
        let mut seen: HashMap<Vec<u32>, ()> = HashMap::new();
        let mut terms = Vec::new();
        let mut automata = Vec::new();
        for term in test_terms(alphabet, depth) {
            let m = compile(&term, alphabet)?;
            if seen.insert(m.structural_key(), ()).is_none() {
                terms.push(term);
                automata.push(m);
            }
        }
        Ok(TestSuite {
            alphabet: alphabet.clone(),
            terms,
            automata,
        })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term(&self, i: usize) -> &Term {
        &self.terms[i]
    }

    pub fn passes(&self, p: &Automaton, i: usize) -> bool {
        par_can_terminate(p, &self.automata[i], self.alphabet.frame())
    }

    /// Bit `i` is set when `p` passes test `i`.
    pub fn signature(&self, p: &Automaton) -> Vec<u64> {
        let mut sig = vec![0u64; self.len().div_ceil(64)];
        for i in 0..self.len() {
            if self.passes(p, i) {
                sig[i / 64] |= 1 << (i % 64);
            }
        }
        sig
    }

    /// First test passed by `p` but not by `q`.
    pub fn witness(&self, p: &Automaton, q: &Automaton) -> Option<usize> {
        (0..self.len()).find(|&i| self.passes(p, i) && !self.passes(q, i))
    }
}

/// `true` when every test of depth at most `depth` that `q` fails is also
/// failed by `p`.
pub fn may_leq_bruteforce(p: &Automaton, q: &Automaton, depth: usize) -> Result<bool> {
    Ok(may_witness(p, q, depth)?.is_none())
}

/// A test separating `p` from `q`, if any.
pub fn may_witness(p: &Automaton, q: &Automaton, depth: usize) -> Result<Option<Term>> {
    same_frame(p, q)?;
    let suite = TestSuite::new(p.alphabet(), depth)?;
    Ok(suite.witness(p, q).map(|i| suite.term(i).clone()))
}

/// Bitwise subset test on signatures.
pub fn signature_leq(p: &[u64], q: &[u64]) -> bool {
    p.iter().zip(q).all(|(a, b)| a & !b == 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops;
    use crate::term::compile_str;

    fn alpha() -> Arc<Alphabet> {
        Arc::new(
            Alphabet::from_config(
                "external a, b, coin, tea, coffee; internal t; prob flip: 1/2 th, 1/2 tt; sync {a, b, coin, tea, coffee};",
            )
            .unwrap(),
        )
    }

    fn c(text: &str) -> Automaton {
        compile_str(text, &alpha()).unwrap()
    }

    #[test]
    fn observe_base_cases() {
        let al = alpha();
        assert_eq!(observe(&ops::zero(&al)), Observation::Zero);
        assert_eq!(observe(&ops::one(&al)), Observation::One);
        assert_eq!(observe(&c("a")), Observation::Tau);
        assert_eq!(observe(&c("a.0")), Observation::Zero);
        assert_eq!(observe(&c("a*")), Observation::One);
    }

    #[test]
    fn observation_algebra() {
        use Observation::*;
        assert_eq!(One.then(Tau), Tau);
        assert_eq!(Tau.then(Tau), Tau);
        assert_eq!(Zero.then(One), Zero);
        assert_eq!(Tau.or(One), One);
    }

    #[test]
    fn flip_traces() {
        let l = trace_language(&c("flip"));
        assert!(l.accepts(&[]));
        assert_eq!(l.words(3), vec![Vec::<ActionId>::new()]);
    }

    #[test]
    fn coin_traces() {
        let l = trace_language(&c("coin.tea + coin.coffee"));
        let words: Vec<String> = l.words(3).iter().map(|w| l.word_to_string(w)).collect();
        assert_eq!(words.len(), 2);
        assert!(words.contains(&"coin.tea".to_string()));
        assert!(words.contains(&"coin.coffee".to_string()));
        assert!(trace_language(&ops::zero(&alpha())).words(4).is_empty());
    }

    #[test]
    fn trace_inclusion() {
        assert!(trace_leq(&c("a"), &c("a + b")).unwrap());
        assert!(!trace_leq(&c("a + b"), &c("a")).unwrap());
        let p = c("flip.(th.a + tt.b)");
        let q = c("flip.th.a + flip.tt.b");
        assert!(trace_leq(&p, &q).unwrap() && trace_leq(&q, &p).unwrap());
        assert!(trace_leq(&c("(a.b)*"), &c("(a + b)*")).unwrap());
        assert!(!trace_leq(&c("(a + b)*"), &c("(a.b)*")).unwrap());
    }

    #[test]
    fn frame_mismatch_is_an_error() {
        let other = Arc::new(alpha().with_frame(Frame::empty()).unwrap());
        let q = compile_str("a", &other).unwrap();
        assert!(trace_leq(&c("a"), &q).is_err());
    }

    #[test]
    fn test_universe_size() {
        let al = Arc::new(Alphabet::from_config("external a, b; sync {a, b};").unwrap());
        assert_eq!(test_terms(&al, 1).len(), 4);
        assert_eq!(test_terms(&al, 2).len(), 36);
        assert_eq!(test_terms(&al, 3).len(), 2596);
    }

    #[test]
    fn may_examples() {
        let al = Arc::new(Alphabet::from_config("external a, b; sync {a, b};").unwrap());
        let a = compile_str("a", &al).unwrap();
        let ab = compile_str("a + b", &al).unwrap();
        assert!(may_leq_bruteforce(&a, &ab, 3).unwrap());
        assert_eq!(may_witness(&ab, &a, 3).unwrap(), Some(Term::act("b")));
    }

    #[test]
    fn direct_search_matches_product() {
        let al = alpha();
        let frame = al.frame().clone();
        for (x, y) in [("a.b", "a.b + b"), ("a || b", "b.a"), ("t.a*", "a.a"), ("flip.a", "a.0")] {
            let (px, py) = (c(x), c(y));
            let product = ops::par(&px, &py, &frame).unwrap();
            assert_eq!(
                par_can_terminate(&px, &py, &frame),
                observe(&product) != Observation::Zero
            );
        }
    }
}
