//! Rabin's choice coordination: tourists and places as finite automata,
//! the concurrent specification and its serialised forms.
//!
//! Channel communication is expanded over a finite value domain `0..=B`
//! plus the `here` marker. A read `α?K` becomes a choice over the frame
//! actions `α.K.r`; a write `α!k` is the single frame action `α.k.w`.
//! Bracketed actions are internal.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use log::debug;
use serde::Serialize;

use crate::alphabet::Alphabet;
use crate::automaton::{Automaton, StateId};
use crate::error::{Error, Result};
use crate::ops;
use crate::rational::ratio;
use crate::simulation::{equiv, leq};
use crate::term::{compile, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Place {
    Church,
    Museum,
}

impl Place {
    pub fn channel(self) -> char {
        match self {
            Place::Church => 'c',
            Place::Museum => 'm',
        }
    }

    pub fn other(self) -> Place {
        match self {
            Place::Church => Place::Museum,
            Place::Museum => Place::Church,
        }
    }

    pub fn parse(s: &str) -> Option<Place> {
        match s {
            "c" | "church" => Some(Place::Church),
            "m" | "museum" => Some(Place::Museum),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Value {
    Num(u32),
    Here,
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Num(n) => write!(f, "{n}"),
            Value::Here => f.write_str("here"),
        }
    }
}

/// The update written on the tails branch, applied to the saturated `K+2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Overline {
    /// `n ↦ n xor 1`: the other member of the pair `{2j, 2j+1}`.
    ParityFlip,
    Identity,
}

impl Overline {
    fn apply(self, n: u32) -> u32 {
        match self {
            Overline::ParityFlip => n ^ 1,
            Overline::Identity => n,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Tourist {
    pub place: Place,
    pub notepad: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct RabinConfig {
    pub bound: u32,
    pub tourists: Vec<Tourist>,
    /// Initial church board `L`.
    pub church: Value,
    /// Initial museum board `R`.
    pub museum: Value,
    pub overline: Overline,
    /// Largest automaton any construction may produce.
    pub cap: usize,
}

impl Default for RabinConfig {
    fn default() -> Self {
        RabinConfig {
            bound: 1,
            tourists: vec![
                Tourist {
                    place: Place::Church,
                    notepad: 0,
                },
                Tourist {
                    place: Place::Museum,
                    notepad: 0,
                },
            ],
            church: Value::Num(0),
            museum: Value::Num(0),
            overline: Overline::ParityFlip,
            cap: 200_000,
        }
    }
}

impl RabinConfig {
    pub fn with_bound(bound: u32) -> RabinConfig {
        RabinConfig {
            bound,
            ..RabinConfig::default()
        }
    }

    pub fn values(&self) -> Vec<Value> {
        (0..=self.bound).map(Value::Num).chain([Value::Here]).collect()
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config { line: 0, msg });
        if self.bound == 0 {
            return bad("value bound must be positive".into());
        }
        for (i, t) in self.tourists.iter().enumerate() {
            if t.notepad > self.bound {
                return bad(format!("tourist {i} notepad {} exceeds bound {}", t.notepad, self.bound));
            }
        }
        for v in [self.church, self.museum] {
            if let Value::Num(n) = v {
                if n > self.bound {
                    return bad(format!("board value {n} exceeds bound {}", self.bound));
                }
            }
        }
        Ok(())
    }

    fn saturate(&self, n: u32, what: &str) -> u32 {
        if n > self.bound {
            debug!("{what}: {n} saturates at {}", self.bound);
            self.bound
        } else {
            n
        }
    }

    /// The two values a tourist may write after a tie on `k`.
    pub fn tie_updates(&self, k: u32) -> (u32, u32) {
        let heads = self.saturate(k + 2, "K+2");
        let tails = self.saturate(self.overline.apply(heads), "overline(K+2)");
        (heads, tails)
    }
}

pub fn read_action(place: Place, v: Value) -> String {
    format!("{}.{v}.r", place.channel())
}

pub fn write_action(place: Place, v: Value) -> String {
    format!("{}.{v}.w", place.channel())
}

pub fn move_action(from: Place) -> String {
    format!("[{}:={}]", from.channel(), from.other().channel())
}

pub const GUARDS: [&str; 8] = [
    "[K=here]",
    "[K!=here]",
    "[k>K]",
    "[k<K]",
    "[k=K]",
    "[k:=K]",
    "[k:=K+2]",
    "[k:=~(K+2)]",
];

fn init_actions(cfg: &RabinConfig) -> Vec<String> {
    let mut out = vec![format!("[L:={}]", cfg.church), format!("[R:={}]", cfg.museum)];
    for (i, t) in cfg.tourists.iter().enumerate() {
        out.push(format!("[t{i}:={}/{}]", t.place.channel(), t.notepad));
    }
    out
}

/// Frame: every channel read and write. Internal: the bracketed guards,
/// assignments and moves. One fair coin with guards `th`, `tt`.
pub fn rabin_alphabet(cfg: &RabinConfig) -> Result<Arc<Alphabet>> {
    let mut b = Alphabet::builder();
    let mut frame = Vec::new();
    for place in [Place::Church, Place::Museum] {
        for v in cfg.values() {
            frame.push(read_action(place, v));
            frame.push(write_action(place, v));
        }
        b = b.internal(move_action(place));
    }
    for g in GUARDS {
        b = b.internal(g);
    }
    for a in init_actions(cfg) {
        b = b.internal(a);
    }
    let half = || ratio(1, 2);
    b = b.prob("flip", vec![(half(), "th"), (half(), "tt")]);
    Ok(Arc::new(b.sync(frame).build()?))
}

fn chain(items: Vec<Term>) -> Term {
    items.into_iter().reduce(Term::seq).unwrap_or(Term::One)
}

fn acts(names: &[&str]) -> Vec<Term> {
    names.iter().map(|n| Term::act(*n)).collect()
}

/// `P(α, k)`: read the board, compare, possibly flip, write back and move
/// to the other place; or decide (deadlock) on reading `here`.
pub fn tourist_term(cfg: &RabinConfig, t: Tourist) -> Term {
    let alpha = t.place;
    let k = t.notepad;
    let mv = move_action(alpha);
    let branches = cfg.values().into_iter().map(|kv| {
        let read = Term::act(read_action(alpha, kv));
        let rest = match kv {
            Value::Here => Term::seq(Term::act("[K=here]"), Term::Zero),
            Value::Num(big_k) => {
                let inner = if k > big_k {
                    chain(vec![
                        Term::act("[k>K]"),
                        Term::act(write_action(alpha, Value::Here)),
                        Term::Zero,
                    ])
                } else if k < big_k {
                    let mut v = acts(&["[k<K]", "[k:=K]"]);
                    v.push(Term::act(write_action(alpha, Value::Num(big_k))));
                    v.push(Term::act(&mv));
                    chain(v)
                } else {
                    let (h, tl) = cfg.tie_updates(big_k);
                    let heads = chain(vec![
                        Term::act("th"),
                        Term::act("[k:=K+2]"),
                        Term::act(write_action(alpha, Value::Num(h))),
                        Term::act(&mv),
                    ]);
                    let tails = chain(vec![
                        Term::act("tt"),
                        Term::act("[k:=~(K+2)]"),
                        Term::act(write_action(alpha, Value::Num(tl))),
                        Term::act(&mv),
                    ]);
                    chain(vec![
                        Term::act("[k=K]"),
                        Term::act("flip"),
                        Term::plus(heads, tails),
                    ])
                };
                Term::seq(Term::act("[K!=here]"), inner)
            }
        };
        Term::seq(read, rest)
    });
    branches.reduce(Term::plus).expect("value domain is non-empty")
}

/// `(α!L)*·(α?L)`: serve reads of `value`, then accept one write.
pub fn place_term(cfg: &RabinConfig, place: Place, value: Value) -> Term {
    let writes = cfg
        .values()
        .into_iter()
        .map(|v| Term::act(write_action(place, v)))
        .reduce(Term::plus)
        .expect("value domain is non-empty");
    Term::seq(Term::star(Term::act(read_action(place, value))), writes)
}

fn capped(cfg: &RabinConfig, what: &str, m: Automaton) -> Result<Automaton> {
    if m.num_states() > cfg.cap {
        return Err(Error::Guardrail {
            what: what.to_string(),
            states: m.num_states(),
            cap: cfg.cap,
        });
    }
    debug!("{what}: {} states, {} transitions", m.num_states(), m.num_transitions());
    Ok(m)
}

pub fn build_tourist(cfg: &RabinConfig, alphabet: &Arc<Alphabet>, which: usize) -> Result<Automaton> {
    cfg.validate()?;
    let t = *cfg.tourists.get(which).ok_or_else(|| Error::Config {
        line: 0,
        msg: format!("no tourist {which}"),
    })?;
    capped(cfg, "tourist", compile(&tourist_term(cfg, t), alphabet)?)
}

pub fn build_place(cfg: &RabinConfig, alphabet: &Arc<Alphabet>, place: Place) -> Result<Automaton> {
    cfg.validate()?;
    let value = match place {
        Place::Church => cfg.church,
        Place::Museum => cfg.museum,
    };
    capped(cfg, "place", compile(&place_term(cfg, place, value), alphabet)?)
}

#[derive(Clone, Debug)]
pub struct RabinSystem {
    pub config: RabinConfig,
    pub alphabet: Arc<Alphabet>,
    pub tourists: Vec<Automaton>,
    pub church: Automaton,
    pub museum: Automaton,
    /// `X = P + Q`.
    pub x: Automaton,
    /// `Y = M + C`.
    pub y: Automaton,
    /// `S = X* ‖ Y*`.
    pub system: Automaton,
    /// `[(X ‖ M)*(X ‖ C)*]*`.
    pub serialized: Automaton,
    /// `[X ‖ M + X ‖ C]*`.
    pub summed: Automaton,
    /// `init·S`.
    pub spec: Automaton,
    /// For each state of `X*`, the tourist and tourist state it came from.
    x_star_origin: Vec<Option<(usize, StateId)>>,
    x_star: Automaton,
    y_star: Automaton,
}

pub fn build_system(cfg: &RabinConfig) -> Result<RabinSystem> {
    cfg.validate()?;
    let al = rabin_alphabet(cfg)?;
    let frame = al.frame().clone();
    let tourists = (0..cfg.tourists.len())
        .map(|i| build_tourist(cfg, &al, i))
        .collect::<Result<Vec<_>>>()?;
    let church = build_place(cfg, &al, Place::Church)?;
    let museum = build_place(cfg, &al, Place::Museum)?;

    // X with provenance back to the individual tourists.
    let mut x = ops::zero(&al);
    let mut origin: Vec<Option<(usize, StateId)>> = vec![None];
    for (i, t) in tourists.iter().enumerate() {
        let traced = ops::plus_traced(&x, t)?;
        let mut next = vec![None; traced.automaton.num_states()];
        for (old, new) in traced.provenance.left.iter().enumerate() {
            if let Some(new) = new {
                if old != x.initial().index() {
                    next[new.index()] = origin[old];
                }
            }
        }
        for (old, new) in traced.provenance.right.iter().enumerate() {
            if let Some(new) = new {
                if old != t.initial().index() {
                    next[new.index()] = Some((i, StateId::from_index(old)));
                }
            }
        }
        x = traced.automaton;
        origin = next;
    }
    let x = capped(cfg, "X", x)?;
    let x_star_traced = ops::star_traced(&x);
    let mut x_star_origin = vec![None; x_star_traced.automaton.num_states()];
    for (old, new) in x_star_traced.provenance.left.iter().enumerate() {
        if let Some(new) = new {
            if old != x.initial().index() {
                x_star_origin[new.index()] = origin[old];
            }
        }
    }
    let x_star = x_star_traced.automaton;
    let y = capped(cfg, "Y", ops::plus(&museum, &church)?)?;
    let y_star = ops::star(&y);

    let system = capped(cfg, "S", ops::par(&x_star, &y_star, &frame)?)?;
    let at_museum = capped(cfg, "X || M", ops::par(&x, &museum, &frame)?)?;
    let at_church = capped(cfg, "X || C", ops::par(&x, &church, &frame)?)?;
    let serialized = capped(
        cfg,
        "serialized",
        ops::star(&ops::seq(&ops::star(&at_museum), &ops::star(&at_church))?),
    )?;
    let summed = capped(cfg, "summed", ops::star(&ops::plus(&at_museum, &at_church)?))?;
    let init = init_actions(cfg)
        .iter()
        .map(|a| Ok(ops::action(&al, al.require(a)?)))
        .collect::<Result<Vec<_>>>()?
        .iter()
        .try_fold(ops::one(&al), |acc, a| ops::seq(&acc, a))?;
    let spec = capped(cfg, "init.S", ops::seq(&init, &system)?)?;
    Ok(RabinSystem {
        config: cfg.clone(),
        alphabet: al,
        tourists,
        church,
        museum,
        x,
        y,
        system,
        serialized,
        summed,
        spec,
        x_star_origin,
        x_star,
        y_star,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TheoremReport {
    pub system_states: usize,
    pub serialized_states: usize,
    pub summed_states: usize,
    /// `S ≥ [(X ‖ M)*(X ‖ C)*]*`.
    pub serialized_below: bool,
    /// `S ≡ [(X ‖ M)*(X ‖ C)*]*`.
    pub serialized_equiv: bool,
    /// `S ≡ [X ‖ M + X ‖ C]*`.
    pub summed_equiv: bool,
}

impl TheoremReport {
    pub fn passed(&self) -> bool {
        self.serialized_below && self.serialized_equiv && self.summed_equiv
    }
}

pub fn check_theorems(sys: &RabinSystem) -> Result<TheoremReport> {
    let below = leq(&sys.serialized, &sys.system)?;
    let above = leq(&sys.system, &sys.serialized)?;
    Ok(TheoremReport {
        system_states: sys.system.num_states(),
        serialized_states: sys.serialized.num_states(),
        summed_states: sys.summed.num_states(),
        serialized_below: below,
        serialized_equiv: below && above,
        summed_equiv: equiv(&sys.summed, &sys.system)?,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Identity {
    pub name: String,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct AppendixReport {
    pub identities: Vec<Identity>,
}

impl AppendixReport {
    pub fn passed(&self) -> bool {
        self.identities.iter().all(|i| i.holds)
    }
}

/// The structural properties of `X = P + Q` and `Y = M + C` used in the
/// equality proof, and `T_{m,n} ≡ (1 + [X ‖ Y])^{min(m,n)}` for
/// `m, n ≤ max`.
pub fn check_appendix_identities(sys: &RabinSystem, max: usize) -> Result<AppendixReport> {
    let cfg = &sys.config;
    if max > 3 {
        return Err(Error::Guardrail {
            what: "T_{m,n} exponent".into(),
            states: max,
            cap: 3,
        });
    }
    let al = &sys.alphabet;
    let frame = al.frame().clone();
    let par = |p: &Automaton, q: &Automaton| ops::par(p, q, &frame);
    let one = ops::one(al);
    let zero = ops::zero(al);
    let (x, y) = (&sys.x, &sys.y);
    let mut out = Vec::new();
    let mut record = |name: String, holds: bool| out.push(Identity { name, holds });

    let samples = [("1", &one), ("X", x), ("Y", y)];
    for (an, a) in samples {
        for (bn, b) in samples {
            let lhs = par(&ops::seq(x, a)?, &ops::seq(y, b)?)?;
            let rhs = ops::seq(&par(x, y)?, &par(a, b)?)?;
            let lhs = capped(cfg, "X.A || Y.B", lhs)?;
            record(format!("X.{an} || Y.{bn} = [X || Y].[{an} || {bn}]"), equiv(&lhs, &rhs)?);
        }
        record(format!("X.{an} || 1 = 0"), equiv(&par(&ops::seq(x, a)?, &one)?, &zero)?);
        record(format!("Y.{an} || 1 = 0"), equiv(&par(&ops::seq(y, a)?, &one)?, &zero)?);
    }
    let one_x = ops::plus(&one, x)?;
    let one_y = ops::plus(&one, y)?;
    for n in 0..=max {
        record(
            format!("1 || (1 + X)^{n} = 1"),
            equiv(&par(&one, &ops::power(&one_x, n)?)?, &one)?,
        );
        record(
            format!("1 || (1 + Y)^{n} = 1"),
            equiv(&par(&one, &ops::power(&one_y, n)?)?, &one)?,
        );
    }
    let step = ops::plus(&one, &par(x, y)?)?;
    for m in 0..=max {
        for n in 0..=max {
            let t = capped(cfg, "T_{m,n}", par(&ops::power(&one_x, m)?, &ops::power(&one_y, n)?)?)?;
            let r = ops::power(&step, m.min(n))?;
            record(format!("T_{{{m},{n}}} = (1 + [X || Y])^{}", m.min(n)), equiv(&t, &r)?);
        }
    }
    Ok(AppendixReport { identities: out })
}

#[derive(Clone, Debug, Serialize)]
pub struct AtomicityReport {
    /// Reachable states of `S` in which some tourist is inside its turn.
    pub mid_turn_states: usize,
    /// Of those, states offering a board read.
    pub violations: usize,
}

/// No read on any channel while a tourist is between its read and the end
/// of its turn.
pub fn check_atomicity(sys: &RabinSystem) -> Result<AtomicityReport> {
    let product = ops::par_traced(&sys.x_star, &sys.y_star, sys.alphabet.frame())?;
    let mut mid = 0;
    let mut violations = 0;
    for (s, &(xs, _)) in product.pairs.iter().enumerate() {
        let Some((i, ts)) = sys.x_star_origin[xs.index()] else {
            continue;
        };
        if sys.tourists[i].is_final(ts) {
            continue;
        }
        mid += 1;
        let reads = product
            .automaton
            .successors(StateId::from_index(s))
            .iter()
            .any(|&(a, _)| sys.alphabet.name(a).ends_with(".r"));
        violations += reads as usize;
    }
    Ok(AtomicityReport {
        mid_turn_states: mid,
        violations,
    })
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct PathReport {
    pub paths: usize,
    /// Paths ending in a deadlock after a `here` read or write.
    pub decisions: usize,
    /// Paths ending in a final state right after moving to the other place.
    pub switches: usize,
    pub other: usize,
}

impl PathReport {
    pub fn passed(&self) -> bool {
        self.paths > 0 && self.other == 0
    }
}

/// Classifies every maximal path of an acyclic tourist automaton by how it
/// ends.
pub fn tourist_paths(p: &Automaton) -> PathReport {
    let al = p.alphabet();
    let mut report = PathReport::default();
    if !p.is_acyclic() {
        report.other = 1;
        return report;
    }
    let mut stack: Vec<(StateId, Option<&str>)> = vec![(p.initial(), None)];
    while let Some((s, last)) = stack.pop() {
        let succ = p.successors(s);
        if succ.is_empty() {
            report.paths += 1;
            let last = last.unwrap_or("");
            let moved = [Place::Church, Place::Museum].iter().any(|&pl| move_action(pl) == last);
            if p.is_final(s) && moved {
                report.switches += 1;
            } else if !p.is_final(s) && (last == "[K=here]" || last.contains(".here.w")) {
                report.decisions += 1;
            } else {
                report.other += 1;
            }
            continue;
        }
        if p.is_final(s) {
            report.other += 1;
        }
        for &(a, d) in succ {
            stack.push((d, Some(al.name(a))));
        }
    }
    report
}

/// Every path through a place performs at most one write.
pub fn place_writes_once(p: &Automaton) -> bool {
    let al = p.alphabet();
    // States reachable after a write must have no further write.
    let mut after_write: BTreeSet<StateId> = BTreeSet::new();
    let mut stack = Vec::new();
    for t in p.transitions() {
        if al.name(t.action).ends_with(".w") && after_write.insert(t.dst) {
            stack.push(t.dst);
        }
    }
    while let Some(s) = stack.pop() {
        for &(a, d) in p.successors(s) {
            if al.name(a).ends_with(".w") {
                return false;
            }
            if after_write.insert(d) {
                stack.push(d);
            }
        }
    }
    true
}

#[derive(Clone, Debug, Serialize)]
pub struct RabinReport {
    pub config: RabinConfig,
    pub tourist_states: Vec<usize>,
    pub tourist_paths: Vec<PathReport>,
    pub tourists_are_p_automata: bool,
    pub places_write_once: bool,
    pub theorems: TheoremReport,
    pub appendix: AppendixReport,
    pub atomicity: AtomicityReport,
}

impl RabinReport {
    pub fn passed(&self) -> bool {
        self.tourist_paths.iter().all(PathReport::passed)
            && self.tourists_are_p_automata
            && self.places_write_once
            && self.theorems.passed()
            && self.appendix.passed()
            && self.atomicity.violations == 0
    }

    pub fn to_text(&self) -> String {
        let ok = |b: bool| if b { "ok" } else { "FAILED" };
        let t = &self.theorems;
        let mut out = format!(
            "rabin: bound {} tourists {} | S {} states, serialized {}, summed {}\n",
            self.config.bound,
            self.config.tourists.len(),
            t.system_states,
            t.serialized_states,
            t.summed_states
        );
        for (i, p) in self.tourist_paths.iter().enumerate() {
            out += &format!(
                "  tourist {i}: {} states, {} paths ({} decisions, {} switches) {}\n",
                self.tourist_states[i],
                p.paths,
                p.decisions,
                p.switches,
                ok(p.passed())
            );
        }
        out += &format!("  tourists are p-automata: {}\n", ok(self.tourists_are_p_automata));
        out += &format!("  places write once: {}\n", ok(self.places_write_once));
        out += &format!("  S >= [(X||M)*(X||C)*]*: {}\n", ok(t.serialized_below));
        out += &format!("  S  = [(X||M)*(X||C)*]*: {}\n", ok(t.serialized_equiv));
        out += &format!("  S  = [X||M + X||C]*: {}\n", ok(t.summed_equiv));
        for i in &self.appendix.identities {
            out += &format!("  {}: {}\n", i.name, ok(i.holds));
        }
        out += &format!(
            "  atomicity: {} mid-turn states, {} violations {}\n",
            self.atomicity.mid_turn_states,
            self.atomicity.violations,
            ok(self.atomicity.violations == 0)
        );
        out
    }
}

/// Builds the system and runs every check; `max` bounds the `T_{m,n}`
/// exponents.
pub fn run(cfg: &RabinConfig, max: usize) -> Result<RabinReport> {
    let sys = build_system(cfg)?;
    Ok(RabinReport {
        config: cfg.clone(),
        tourist_states: sys.tourists.iter().map(Automaton::num_states).collect(),
        tourist_paths: sys.tourists.iter().map(tourist_paths).collect(),
        tourists_are_p_automata: sys.tourists.iter().all(crate::probability::is_p_automaton),
        places_write_once: place_writes_once(&sys.church) && place_writes_once(&sys.museum),
        theorems: check_theorems(&sys)?,
        appendix: check_appendix_identities(&sys, max)?,
        atomicity: check_atomicity(&sys)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observation::trace_language;

    fn small() -> (RabinConfig, Arc<Alphabet>) {
        let cfg = RabinConfig::default();
        let al = rabin_alphabet(&cfg).unwrap();
        (cfg, al)
    }

    #[test]
    fn tourist_shape() {
        let (cfg, al) = small();
        let p = build_tourist(&cfg, &al, 0).unwrap();
        assert!(p.validate().is_ok());
        assert!(crate::probability::is_p_automaton(&p));
        let r = tourist_paths(&p);
        // K = here, K = 0 (tie: two coin branches), K = 1 (k < K).
        assert_eq!((r.paths, r.decisions, r.switches, r.other), (4, 1, 3, 0));
        let words: Vec<String> = {
            let l = trace_language(&p);
            l.words(3).iter().map(|w| l.word_to_string(w)).collect()
        };
        assert!(words.contains(&"c.1.r.c.1.w".to_string()));
        assert!(words.contains(&"c.0.r.c.0.w".to_string()));
        assert!(!words.iter().any(|w| w.starts_with("c.here.r")));
    }

    #[test]
    fn greater_notepad_writes_here() {
        let cfg = RabinConfig {
            tourists: vec![Tourist {
                place: Place::Museum,
                notepad: 1,
            }],
            ..RabinConfig::default()
        };
        let al = rabin_alphabet(&cfg).unwrap();
        let p = build_tourist(&cfg, &al, 0).unwrap();
        let r = tourist_paths(&p);
        // here: decide; 0: k > K, write here and decide; 1: tie.
        assert_eq!((r.decisions, r.switches), (2, 2));
        let l = trace_language(&p);
        assert!(l.accepts_names(&["m.1.r", "m.1.w"]));
        assert!(l.accepts_names(&["m.1.r", "m.0.w"]));
        assert!(!l.accepts_names(&["m.0.r", "m.here.w"]));
    }

    #[test]
    fn tie_updates_saturate() {
        let cfg = RabinConfig::default();
        assert_eq!(cfg.tie_updates(0), (1, 0));
        assert_eq!(cfg.tie_updates(1), (1, 0));
        let cfg = RabinConfig::with_bound(4);
        assert_eq!(cfg.tie_updates(0), (2, 3));
        assert_eq!(cfg.tie_updates(1), (3, 2));
        assert_eq!(cfg.tie_updates(3), (4, 4));
    }

    #[test]
    fn place_serves_then_writes() {
        let (cfg, al) = small();
        let c = build_place(&cfg, &al, Place::Church).unwrap();
        assert!(place_writes_once(&c));
        let l = trace_language(&c);
        assert!(l.accepts_names(&["c.0.r", "c.0.r", "c.here.w"]));
        assert!(l.accepts_names(&["c.1.w"]));
        assert!(!l.accepts_names(&["c.1.r", "c.1.w"]));
        assert!(!l.accepts_names(&["c.0.r"]));
        let m = build_place(&cfg, &al, Place::Museum).unwrap();
        assert!(trace_language(&m).accepts_names(&["m.0.r", "m.1.w"]));
    }

    #[test]
    fn theorems_at_bound_one() {
        let sys = build_system(&RabinConfig::default()).unwrap();
        assert!(sys.system.validate().is_ok());
        assert!(sys.serialized.validate().is_ok());
        assert!(sys.summed.validate().is_ok());
        assert!(sys.spec.validate().is_ok());
        let t = check_theorems(&sys).unwrap();
        assert!(t.passed(), "{t:?}");
        let a = check_atomicity(&sys).unwrap();
        assert!(a.mid_turn_states > 0);
        assert_eq!(a.violations, 0);
    }

    #[test]
    fn no_tourists() {
        let cfg = RabinConfig {
            tourists: Vec::new(),
            ..RabinConfig::default()
        };
        let sys = build_system(&cfg).unwrap();
        assert!(equiv(&sys.system, &ops::one(&sys.alphabet)).unwrap());
    }

    #[test]
    fn guardrail() {
        let cfg = RabinConfig {
            cap: 5,
            ..RabinConfig::default()
        };
        assert!(matches!(build_system(&cfg), Err(Error::Guardrail { .. })));
    }

    #[test]
    fn invalid_config() {
        let cfg = RabinConfig {
            church: Value::Num(3),
            ..RabinConfig::default()
        };
        assert!(build_system(&cfg).is_err());
    }
}
