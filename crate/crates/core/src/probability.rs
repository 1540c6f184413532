//! p-automata, p-simulation, the translation into probabilistic automata and
//! bounded probabilistic simulation.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::alphabet::{ActionId, Alphabet};
use crate::automaton::{check_compatible, Automaton, StateId};
use crate::error::{Error, Result};
use crate::lp;
use crate::rational::{format_weight, Weight};
use crate::simulation::{largest_relation_with, BranchTable, SimRelation, Strategy};

/// Finitely supported probability distribution over states.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Distribution {
    support: BTreeMap<StateId, Weight>,
}

impl Distribution {
    pub fn point(s: StateId) -> Distribution {
        Distribution {
            support: BTreeMap::from([(s, Weight::one())]),
        }
    }

    /// Builds a distribution, merging repeated states. Weights must be
    /// positive and sum to one.
    pub fn new(entries: impl IntoIterator<Item = (StateId, Weight)>) -> Result<Distribution> {
        let mut support: BTreeMap<StateId, Weight> = BTreeMap::new();
        for (s, w) in entries {
            if w <= Weight::zero() {
                return Err(Error::Format(format!(
                    "non-positive weight {} on {s}",
                    format_weight(&w)
                )));
            }
            *support.entry(s).or_insert_with(Weight::zero) += w;
        }
        let total: Weight = support.values().sum();
        if !total.is_one() {
            return Err(Error::Format(format!(
                "distribution weights sum to {}",
                format_weight(&total)
            )));
        }
        Ok(Distribution { support })
    }

    /// Convex combination `Σ wᵢ·dᵢ`; the weights must sum to one.
    pub fn mix<'a>(parts: impl IntoIterator<Item = (Weight, &'a Distribution)>) -> Distribution {
        let mut support: BTreeMap<StateId, Weight> = BTreeMap::new();
        for (w, d) in parts {
            for (&s, p) in &d.support {
                *support.entry(s).or_insert_with(Weight::zero) += &w * p;
            }
        }
        support.retain(|_, w| !w.is_zero());
        debug_assert!(support.values().sum::<Weight>().is_one());
        Distribution { support }
    }

    pub fn weight(&self, s: StateId) -> Weight {
        self.support.get(&s).cloned().unwrap_or_else(Weight::zero)
    }

    pub fn support(&self) -> impl Iterator<Item = StateId> + '_ {
        self.support.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (StateId, &Weight)> {
        self.support.iter().map(|(&s, w)| (s, w))
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn as_point(&self) -> Option<StateId> {
        match self.support.iter().next() {
            Some((&s, _)) if self.support.len() == 1 => Some(s),
            _ => None,
        }
    }

    pub fn total(&self) -> Weight {
        self.support.values().sum()
    }

    pub fn map_states(&self, f: impl Fn(StateId) -> StateId) -> Distribution {
        let mut support: BTreeMap<StateId, Weight> = BTreeMap::new();
        for (&s, w) in &self.support {
            *support.entry(f(s)).or_insert_with(Weight::zero) += w;
        }
        Distribution { support }
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .support
            .iter()
            .map(|(s, w)| format!("{}·δ{}", format_weight(w), s))
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// Transition label of a probabilistic automaton; `None` is the silent
/// step produced by collapsing a probabilistic choice.
pub type Label = Option<ActionId>;

#[derive(Clone, Debug)]
pub struct ProbAutomaton {
    alphabet: Arc<Alphabet>,
    succ: Vec<Vec<(Label, Distribution)>>,
    initial: Distribution,
    finals: Vec<bool>,
}

impl ProbAutomaton {
    pub fn new(
        alphabet: Arc<Alphabet>,
        succ: Vec<Vec<(Label, Distribution)>>,
        initial: Distribution,
        finals: Vec<bool>,
    ) -> Result<ProbAutomaton> {
        let n = succ.len();
        if finals.len() != n {
            return Err(Error::Format("finals do not match the state count".into()));
        }
        let in_range = |d: &Distribution| d.support().all(|s| s.index() < n);
        if !in_range(&initial) || !succ.iter().flatten().all(|(_, d)| in_range(d)) {
            return Err(Error::Format("distribution support outside the state space".into()));
        }
        if succ
            .iter()
            .flatten()
            .any(|(a, _)| a.is_some_and(|a| a.index() >= alphabet.len()))
        {
            return Err(Error::Format("unknown action id".into()));
        }
        Ok(ProbAutomaton {
            alphabet,
            succ,
            initial,
            finals,
        })
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.succ.len()
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        (0..self.succ.len()).map(StateId::from_index)
    }

    pub fn transitions(&self, s: StateId) -> &[(Label, Distribution)] {
        &self.succ[s.index()]
    }

    pub fn num_transitions(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn initial(&self) -> &Distribution {
        &self.initial
    }

    pub fn is_final(&self, s: StateId) -> bool {
        self.finals[s.index()]
    }

    pub fn is_silent(&self, label: Label) -> bool {
        label.is_none_or(|a| self.alphabet.is_internal(a))
    }

    pub fn label_name(&self, label: Label) -> &str {
        label.map_or("τ", |a| self.alphabet.name(a))
    }
}

/// The first reason `p` is not a p-automaton, if any.
pub fn p_automaton_violation(p: &Automaton) -> Option<String> {
    let alphabet = p.alphabet();
    let mut flip_into: Vec<Option<usize>> = vec![None; p.num_states()];
    for t in p.transitions() {
        if let Some(spec) = alphabet.label(t.action).prob_group {
            match flip_into[t.dst.index()] {
                Some(other) if other != spec => {
                    return Some(format!("{} is entered by two different probabilistic actions", t.dst))
                }
                _ => flip_into[t.dst.index()] = Some(spec),
            }
        }
    }
    for t in p.transitions() {
        let entered_by_flip = flip_into[t.dst.index()].is_some();
        if entered_by_flip && alphabet.label(t.action).prob_group.is_none() {
            return Some(format!(
                "{} is entered both by a probabilistic action and by `{}`",
                t.dst,
                alphabet.name(t.action)
            ));
        }
    }
    for s in p.states() {
        let guards_here: Vec<(usize, usize)> = p
            .successors(s)
            .iter()
            .filter_map(|&(a, _)| alphabet.guard_info(a))
            .collect();
        match flip_into[s.index()] {
            Some(spec) => {
                let branches = alphabet.prob_specs()[spec].branches.len();
                let moves = p.successors(s);
                let mut seen = vec![0usize; branches];
                for &(a, _) in moves {
                    match alphabet.guard_info(a) {
                        Some((g, i)) if g == spec => seen[i] += 1,
                        _ => {
                            return Some(format!(
                                "`{}` follows `{}` at {s}",
                                alphabet.name(a),
                                alphabet.name(alphabet.prob_specs()[spec].flip)
                            ))
                        }
                    }
                }
                if seen.iter().any(|&k| k != 1) {
                    return Some(format!("{s} does not offer exactly one transition per guard"));
                }
            }
            None => {
                if let Some(&(g, i)) = guards_here.first() {
                    let guard = alphabet.prob_specs()[g].branches[i].guard;
                    return Some(format!(
                        "guard `{}` at {s} does not directly follow its probabilistic action",
                        alphabet.name(guard)
                    ));
                }
            }
        }
    }
    None
}

pub fn is_p_automaton(p: &Automaton) -> bool {
    p_automaton_violation(p).is_none()
}

fn require_p_automaton(p: &Automaton) -> Result<()> {
    match p_automaton_violation(p) {
        Some(msg) => Err(Error::NotPAutomaton(msg)),
        None => Ok(()),
    }
}

/// Guard targets by branch index for every state entered by a flip.
pub(crate) fn branch_table(p: &Automaton) -> BranchTable {
    let alphabet = p.alphabet();
    let mut table: BranchTable = vec![None; p.num_states()];
    for t in p.transitions() {
        if let Some(spec) = alphabet.label(t.action).prob_group {
            let n = alphabet.prob_specs()[spec].branches.len();
            let mut targets = vec![t.dst; n];
            for &(a, d) in p.successors(t.dst) {
                if let Some((g, i)) = alphabet.guard_info(a) {
                    if g == spec {
                        targets[i] = d;
                    }
                }
            }
            table[t.dst.index()] = Some((spec, targets));
        }
    }
    table
}

/// The greatest p-simulation of `p` by `q`, if it relates the initial states.
pub fn greatest_p_simulation(p: &Automaton, q: &Automaton) -> Result<Option<SimRelation>> {
    check_compatible(p, q)?;
    require_p_automaton(p)?;
    require_p_automaton(q)?;
    let (bp, bq) = (branch_table(p), branch_table(q));
    let rel = largest_relation_with(p, q, Strategy::Worklist, Some((&bp, &bq)))?;
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

pub fn p_leq(p: &Automaton, q: &Automaton) -> Result<bool> {
    Ok(greatest_p_simulation(p, q)?.is_some())
}

/// A probabilistic automaton together with where each original state went.
#[derive(Clone, Debug)]
pub struct EpsilonImage {
    pub automaton: ProbAutomaton,
    pub state_map: Vec<Option<StateId>>,
}

pub fn epsilon(p: &Automaton) -> Result<ProbAutomaton> {
    Ok(epsilon_traced(p)?.automaton)
}

/// Collapses each flip-then-guards pattern into one silent transition to the
/// weighted distribution over the guard targets.
pub fn epsilon_traced(p: &Automaton) -> Result<EpsilonImage> {
    require_p_automaton(p)?;
    let alphabet = p.alphabet();
    let table = branch_table(p);
    let raw: Vec<Vec<(Label, Distribution)>> = p
        .states()
        .map(|s| {
            p.successors(s)
                .iter()
                .map(|&(a, d)| match &table[d.index()] {
                    Some((spec, targets)) if alphabet.is_probabilistic(a) => {
                        let branches = &alphabet.prob_specs()[*spec].branches;
                        let dist = Distribution::new(
                            targets.iter().zip(branches).map(|(&t, b)| (t, b.weight.clone())),
                        )
                        .expect("spec weights sum to one");
                        (None, dist)
                    }
                    _ => (Some(a), Distribution::point(d)),
                })
                .collect()
        })
        .collect();

    let mut map: Vec<Option<StateId>> = vec![None; p.num_states()];
    let mut order = vec![p.initial()];
    map[p.initial().index()] = Some(StateId::from_index(0));
    let mut head = 0;
    while head < order.len() {
        let s = order[head];
        head += 1;
        for (_, d) in &raw[s.index()] {
            for t in d.support() {
                if map[t.index()].is_none() {
                    map[t.index()] = Some(StateId::from_index(order.len()));
                    order.push(t);
                }
            }
        }
    }
    let rename = |s: StateId| map[s.index()].expect("reachable");
    let succ = order
        .iter()
        .map(|s| {
            raw[s.index()]
                .iter()
                .map(|(a, d)| (*a, d.map_states(rename)))
                .collect()
        })
        .collect();
    let finals = order.iter().map(|&s| p.is_final(s)).collect();
    let automaton = ProbAutomaton::new(
        alphabet.clone(),
        succ,
        Distribution::point(StateId::from_index(0)),
        finals,
    )?;
    Ok(EpsilonImage {
        automaton,
        state_map: map,
    })
}

/// A relation between states and distributions.
#[derive(Clone, Debug, Default)]
pub struct ProbRelation {
    by_state: BTreeMap<StateId, Vec<Distribution>>,
}

impl ProbRelation {
    pub fn new() -> ProbRelation {
        ProbRelation::default()
    }

    pub fn insert(&mut self, x: StateId, psi: Distribution) {
        let entry = self.by_state.entry(x).or_default();
        if !entry.contains(&psi) {
            entry.push(psi);
        }
    }

    pub fn candidates(&self, x: StateId) -> &[Distribution] {
        self.by_state.get(&x).map_or(&[], Vec::as_slice)
    }

    pub fn contains(&self, x: StateId, psi: &Distribution) -> bool {
        self.candidates(x).contains(psi)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (StateId, &Distribution)> {
        self.by_state
            .iter()
            .flat_map(|(&x, ds)| ds.iter().map(move |d| (x, d)))
    }

    pub fn len(&self) -> usize {
        self.by_state.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl FromIterator<(StateId, Distribution)> for ProbRelation {
    fn from_iter<I: IntoIterator<Item = (StateId, Distribution)>>(iter: I) -> Self {
        let mut rel = ProbRelation::new();
        for (x, d) in iter {
            rel.insert(x, d);
        }
        rel
    }
}

/// Whether `φ` and `ψ` are related by the lifting of `rel`: the mass of
/// each `x` in `φ` is spread over distributions related to `x` so that the
/// mixture is `ψ`. Decided exactly by linear feasibility.
pub fn lift_check(rel: &ProbRelation, phi: &Distribution, psi: &Distribution) -> bool {
    lift_with(|x| rel.candidates(x).iter().collect(), phi, psi)
}

pub(crate) fn lift_with<'a>(
    candidates: impl Fn(StateId) -> Vec<&'a Distribution>,
    phi: &Distribution,
    psi: &Distribution,
) -> bool {
    let cands: Vec<(StateId, &Weight, Vec<&Distribution>)> =
        phi.iter().map(|(x, w)| (x, w, candidates(x))).collect();
    if cands.iter().any(|(_, _, c)| c.is_empty()) {
        return false;
    }
    if let [(_, _, c)] = cands.as_slice() {
        if c.contains(&psi) {
            return true;
        }
    }
    let mut targets: Vec<StateId> = psi.support().collect();
    for (_, _, c) in &cands {
        for d in c {
            targets.extend(d.support());
        }
    }
    targets.sort_unstable();
    targets.dedup();
    let index: HashMap<StateId, usize> = targets.iter().enumerate().map(|(i, &s)| (s, i)).collect();

    let vars: usize = cands.iter().map(|(_, _, c)| c.len()).sum();
    let rows = cands.len() + targets.len();
    let mut a = vec![vec![Weight::zero(); vars]; rows];
    let mut b = vec![Weight::zero(); rows];
    let mut col = 0;
    for (i, (_, w, c)) in cands.iter().enumerate() {
        b[i] = (*w).clone();
        for d in c {
            a[i][col] = Weight::one();
            for (s, p) in d.iter() {
                a[cands.len() + index[&s]][col] = p.clone();
            }
            col += 1;
        }
    }
    for (s, p) in psi.iter() {
        b[cands.len() + index[&s]] = p.clone();
    }
    lp::feasible(&a, &b).is_some()
}

const STEP_CAP: usize = 4096;
const POOL_CAP: usize = 20_000;

fn lifted_steps(q: &ProbAutomaton, psi: &Distribution, pick: impl Fn(Label) -> bool) -> Vec<Distribution> {
    // Each support state picks one matching transition.
    let options: Vec<(&Weight, Vec<&Distribution>)> = psi
        .iter()
        .map(|(y, w)| {
            (
                w,
                q.transitions(y)
                    .iter()
                    .filter(|(a, _)| pick(*a))
                    .map(|(_, d)| d)
                    .collect(),
            )
        })
        .collect();
    if options.iter().any(|(_, o)| o.is_empty()) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut choice = vec![0usize; options.len()];
    loop {
        out.push(Distribution::mix(
            options
                .iter()
                .zip(&choice)
                .map(|((w, o), &k)| ((*w).clone(), o[k])),
        ));
        if out.len() >= STEP_CAP {
            break;
        }
        let mut i = 0;
        loop {
            if i == choice.len() {
                out.sort();
                out.dedup();
                return out;
            }
            choice[i] += 1;
            if choice[i] < options[i].1.len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Distributions reachable from `psi` by at most `bound` lifted silent steps.
pub fn weak_silent(q: &ProbAutomaton, psi: &Distribution, bound: usize) -> Vec<Distribution> {
    let mut all = vec![psi.clone()];
    let mut frontier = vec![psi.clone()];
    for _ in 0..bound {
        let mut next = Vec::new();
        for d in &frontier {
            for e in lifted_steps(q, d, |a| q.is_silent(a)) {
                if !all.contains(&e) {
                    all.push(e.clone());
                    next.push(e);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    all
}

/// Weak successors of `psi` answering a move labelled `label`.
pub fn weak_successors(q: &ProbAutomaton, psi: &Distribution, label: Label, bound: usize) -> Vec<Distribution> {
    let silent = weak_silent(q, psi, bound);
    if q.is_silent(label) {
        return silent;
    }
    let mut out: Vec<Distribution> = silent
        .iter()
        .flat_map(|d| lifted_steps(q, d, |a| a == label))
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Checks that an explicit relation is a probabilistic simulation, with
/// weak moves limited to `bound` silent steps before a labelled one.
pub fn check_prob_simulation(p: &ProbAutomaton, q: &ProbAutomaton, rel: &ProbRelation, bound: usize) -> bool {
    if !lift_check(rel, p.initial(), q.initial()) {
        return false;
    }
    rel.pairs().all(|(x, psi)| {
        if p.is_final(x) && !psi.support().all(|y| q.is_final(y)) {
            return false;
        }
        p.transitions(x).iter().all(|(a, phi)| {
            weak_successors(q, psi, *a, bound)
                .iter()
                .any(|psi2| lift_check(rel, phi, psi2))
        })
    })
}

/// Bounded probabilistic simulation: candidate distributions on the right
/// are those reachable from point distributions, transition targets and
/// the initial distribution by weak moves with at most `weak_bound` silent
/// steps each.
pub fn prob_leq(p: &ProbAutomaton, q: &ProbAutomaton, weak_bound: usize) -> Result<bool> {
    Ok(greatest_prob_simulation(p, q, weak_bound)?.is_some())
}

pub fn greatest_prob_simulation(
    p: &ProbAutomaton,
    q: &ProbAutomaton,
    weak_bound: usize,
) -> Result<Option<ProbRelation>> {
    if !p.alphabet().same_actions(q.alphabet()) {
        return Err(Error::AlphabetMismatch("alphabets declare different actions".into()));
    }
    let mut labels: Vec<Label> = p.states().flat_map(|s| p.transitions(s).iter().map(|(a, _)| *a)).collect();
    labels.sort();
    labels.dedup();

    let mut pool: Vec<Distribution> = Vec::new();
    let mut index: HashMap<Distribution, usize> = HashMap::new();
    let mut add = |d: Distribution, pool: &mut Vec<Distribution>| -> usize {
        *index.entry(d.clone()).or_insert_with(|| {
            pool.push(d);
            pool.len() - 1
        })
    };
    for y in q.states() {
        add(Distribution::point(y), &mut pool);
        for (_, d) in q.transitions(y) {
            add(d.clone(), &mut pool);
        }
    }
    add(q.initial().clone(), &mut pool);

    // succ[k][l] = pool indices answering label l from pool[k].
    let mut succ: Vec<Vec<Vec<usize>>> = Vec::new();
    let mut k = 0;
    while k < pool.len() {
        let mut row = Vec::with_capacity(labels.len());
        for &l in &labels {
            let next = weak_successors(q, &pool[k].clone(), l, weak_bound);
            row.push(next.into_iter().map(|d| add(d, &mut pool)).collect());
        }
        succ.push(row);
        if pool.len() > POOL_CAP {
            return Err(Error::Guardrail {
                what: "candidate distribution pool".into(),
                states: pool.len(),
                cap: POOL_CAP,
            });
        }
        k += 1;
    }
    let label_index: HashMap<Label, usize> = labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();

    let mut rel: Vec<Vec<bool>> = p
        .states()
        .map(|x| {
            pool.iter()
                .map(|psi| !p.is_final(x) || psi.support().all(|y| q.is_final(y)))
                .collect()
        })
        .collect();

    loop {
        let mut removed = Vec::new();
        for x in p.states() {
            for (k, _) in pool.iter().enumerate() {
                if !rel[x.index()][k] {
                    continue;
                }
                let ok = p.transitions(x).iter().all(|(a, phi)| {
                    succ[k][label_index[a]].iter().any(|&k2| {
                        lift_with(
                            |x2| {
                                pool.iter()
                                    .enumerate()
                                    .filter(|(j, _)| rel[x2.index()][*j])
                                    .map(|(_, d)| d)
                                    .collect()
                            },
                            phi,
                            &pool[k2],
                        )
                    })
                });
                if !ok {
                    removed.push((x, k));
                }
            }
        }
        if removed.is_empty() {
            break;
        }
        for (x, k) in removed {
            rel[x.index()][k] = false;
        }
    }

    let relation: ProbRelation = p
        .states()
        .flat_map(|x| {
            let row = &rel[x.index()];
            pool.iter()
                .enumerate()
                .filter(move |(k, _)| row[*k])
                .map(move |(_, d)| (x, d.clone()))
        })
        .collect();
    if lift_check(&relation, p.initial(), q.initial()) {
        Ok(Some(relation))
    } else {
        Ok(None)
    }
}

/// Restricts a p-simulation to the state spaces of the ε images, relating
/// each surviving left state to point distributions.
pub fn restrict_to_epsilon(rel: &SimRelation, p: &EpsilonImage, q: &EpsilonImage) -> ProbRelation {
    rel.pairs
        .iter()
        .filter_map(|&(x, y)| {
            let x2 = p.state_map[x.index()]?;
            let y2 = q.state_map[y.index()]?;
            Some((x2, Distribution::point(y2)))
        })
        .collect()
}
