//! Action alphabets: internal/external classification, probabilistic
//! actions with their guard branches, and the synchronization frame.
//!
//! Actions are stored sorted by name, so two alphabets declaring the same
//! actions assign them the same [`ActionId`]s regardless of declaration
//! order.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{format_weight, parse_weight, Weight};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ActionId(pub(crate) u32);

impl ActionId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ActionKind {
    Internal,
    External,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionLabel {
    pub name: String,
    pub kind: ActionKind,
    /// Index of the [`ProbSpec`] this action flips, for probabilistic actions.
    pub prob_group: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Branch {
    pub weight: Weight,
    pub guard: ActionId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbSpec {
    pub flip: ActionId,
    pub branches: Vec<Branch>,
}

/// The set of external actions synchronized by parallel composition.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Frame(BTreeSet<ActionId>);

impl Frame {
    pub fn empty() -> Frame {
        Frame(BTreeSet::new())
    }

    pub fn contains(&self, a: ActionId) -> bool {
        self.0.contains(&a)
    }

    pub fn iter(&self) -> impl Iterator<Item = ActionId> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub(crate) fn mask(&self, n_actions: usize) -> Vec<bool> {
        let mut mask = vec![false; n_actions];
        for a in &self.0 {
            mask[a.index()] = true;
        }
        mask
    }
}

impl FromIterator<ActionId> for Frame {
    fn from_iter<I: IntoIterator<Item = ActionId>>(iter: I) -> Self {
        Frame(iter.into_iter().collect())
    }
}

#[derive(Clone, Debug)]
pub struct Alphabet {
    actions: Vec<ActionLabel>,
    by_name: HashMap<String, ActionId>,
    probs: Vec<ProbSpec>,
    guard_of: Vec<Option<(usize, usize)>>,
    frame: Frame,
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        self.same_actions(other) && self.frame == other.frame
    }
}

impl Eq for Alphabet {}

impl Alphabet {
    pub fn builder() -> AlphabetBuilder {
        AlphabetBuilder::default()
    }

    /// Parses the line-oriented alphabet configuration format:
    ///
    /// ```text
    /// internal th, tt;
    /// external coin, tea, coffee;
    /// prob flip: 1/2 th, 1/2 tt;
    /// sync {coin, tea, coffee};
    /// ```
    pub fn from_config(text: &str) -> Result<Alphabet> {
        let mut builder = AlphabetBuilder::default();
        for (line, stmt) in statements(text) {
            let err = |msg: String| Error::Config { line, msg };
            let (keyword, rest) = match stmt.split_once(char::is_whitespace) {
                Some((k, r)) => (k, r.trim()),
                None => (stmt.as_str(), ""),
            };
            match keyword {
                "internal" => {
                    for name in name_list(rest).map_err(err)? {
                        builder = builder.internal(name);
                    }
                }
                "external" => {
                    for name in name_list(rest).map_err(err)? {
                        builder = builder.external(name);
                    }
                }
                "sync" => {
                    let inner = rest.trim();
                    let inner = inner
                        .strip_prefix('{')
                        .and_then(|s| s.strip_suffix('}'))
                        .unwrap_or(inner);
                    let names = if inner.trim().is_empty() {
                        Vec::new()
                    } else {
                        name_list(inner).map_err(err)?
                    };
                    builder = builder.sync(names);
                }
                "prob" => {
                    let (flip, branches) = rest
                        .split_once(':')
                        .ok_or_else(|| err("expected `prob name: p guard, ...`".into()))?;
                    let flip = flip.trim();
                    check_name(flip).map_err(err)?;
                    let mut parsed = Vec::new();
                    for branch in branches.split(',') {
                        let mut parts = branch.split_whitespace();
                        let (Some(p), Some(guard), None) = (parts.next(), parts.next(), parts.next())
                        else {
                            return Err(err(format!("malformed branch `{}`", branch.trim())));
                        };
                        let weight = parse_weight(p)
                            .ok_or_else(|| err(format!("invalid probability `{p}`")))?;
                        check_name(guard).map_err(err)?;
                        parsed.push((weight, guard.to_string()));
                    }
                    builder = builder.prob(flip, parsed);
                }
                other => return Err(err(format!("unknown statement `{other}`"))),
            }
        }
        builder.build()
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = ActionId> {
        (0..self.actions.len() as u32).map(ActionId)
    }

    pub fn id(&self, name: &str) -> Option<ActionId> {
        self.by_name.get(name).copied()
    }

    pub fn require(&self, name: &str) -> Result<ActionId> {
        self.id(name)
            .ok_or_else(|| Error::UndeclaredAction(name.to_string()))
    }

    pub fn label(&self, a: ActionId) -> &ActionLabel {
        &self.actions[a.index()]
    }

    pub fn name(&self, a: ActionId) -> &str {
        &self.actions[a.index()].name
    }

    pub fn is_internal(&self, a: ActionId) -> bool {
        self.actions[a.index()].kind == ActionKind::Internal
    }

    pub fn is_probabilistic(&self, a: ActionId) -> bool {
        self.actions[a.index()].prob_group.is_some()
    }

    pub fn prob_specs(&self) -> &[ProbSpec] {
        &self.probs
    }

    pub fn prob_spec(&self, flip: ActionId) -> Option<&ProbSpec> {
        self.actions[flip.index()]
            .prob_group
            .map(|g| &self.probs[g])
    }

    /// `(spec index, branch index)` when `a` guards a probabilistic branch.
    pub fn guard_info(&self, a: ActionId) -> Option<(usize, usize)> {
        self.guard_of[a.index()]
    }

    pub fn is_guard(&self, a: ActionId) -> bool {
        self.guard_of[a.index()].is_some()
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    /// External actions that are not probabilistic, i.e. everything that
    /// may legally be synchronized.
    pub fn synchronizable(&self) -> Vec<ActionId> {
        self.ids()
            .filter(|&a| !self.is_internal(a) && !self.is_probabilistic(a))
            .collect()
    }

    pub fn frame_from_names<S: AsRef<str>>(&self, names: &[S]) -> Result<Frame> {
        let mut ids = BTreeSet::new();
        for name in names {
            let name = name.as_ref();
            let id = self
                .id(name)
                .ok_or_else(|| Error::InvalidFrame(format!("`{name}` is not declared")))?;
            ids.insert(id);
        }
        let frame = Frame(ids);
        self.check_frame(&frame)?;
        Ok(frame)
    }

    pub fn check_frame(&self, frame: &Frame) -> Result<()> {
        for a in frame.iter() {
            if a.index() >= self.actions.len() {
                return Err(Error::InvalidFrame(format!("unknown action id {}", a.0)));
            }
            if self.is_internal(a) {
                return Err(Error::InvalidFrame(format!(
                    "`{}` is internal and cannot be synchronized",
                    self.name(a)
                )));
            }
            if self.is_probabilistic(a) {
                return Err(Error::InvalidFrame(format!(
                    "`{}` is probabilistic and cannot be synchronized",
                    self.name(a)
                )));
            }
        }
        Ok(())
    }

    pub fn with_frame(&self, frame: Frame) -> Result<Alphabet> {
        self.check_frame(&frame)?;
        Ok(Alphabet {
            frame,
            ..self.clone()
        })
    }

    /// Equality of everything except the frame.
    pub fn same_actions(&self, other: &Alphabet) -> bool {
        self.actions == other.actions && self.probs == other.probs
    }

    pub fn frame_names(&self) -> Vec<&str> {
        self.frame.iter().map(|a| self.name(a)).collect()
    }

    /// Renders the alphabet back into the configuration format.
    pub fn to_config(&self) -> String {
        let mut out = String::new();
        let internal: Vec<&str> = self
            .ids()
            .filter(|&a| self.is_internal(a))
            .map(|a| self.name(a))
            .collect();
        let external: Vec<&str> = self
            .ids()
            .filter(|&a| !self.is_internal(a) && !self.is_probabilistic(a))
            .map(|a| self.name(a))
            .collect();
        if !internal.is_empty() {
            out += &format!("internal {};\n", internal.join(", "));
        }
        if !external.is_empty() {
            out += &format!("external {};\n", external.join(", "));
        }
        for spec in &self.probs {
            let branches: Vec<String> = spec
                .branches
                .iter()
                .map(|b| format!("{} {}", format_weight(&b.weight), self.name(b.guard)))
                .collect();
            out += &format!("prob {}: {};\n", self.name(spec.flip), branches.join(", "));
        }
        out += &format!("sync {{{}}};\n", self.frame_names().join(", "));
        out
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_config())
    }
}

#[derive(Clone, Debug, Default)]
pub struct AlphabetBuilder {
    internal: Vec<String>,
    external: Vec<String>,
    probs: Vec<(String, Vec<(Weight, String)>)>,
    sync: Vec<String>,
    sync_all: bool,
}

impl AlphabetBuilder {
    pub fn internal(mut self, name: impl Into<String>) -> Self {
        self.internal.push(name.into());
        self
    }

    pub fn external(mut self, name: impl Into<String>) -> Self {
        self.external.push(name.into());
        self
    }

    pub fn prob<S: Into<String>>(mut self, flip: impl Into<String>, branches: Vec<(Weight, S)>) -> Self {
        let branches = branches.into_iter().map(|(w, g)| (w, g.into())).collect();
        self.probs.push((flip.into(), branches));
        self
    }

    /// Adds names to the frame; undeclared names are declared external.
    pub fn sync<S: Into<String>>(mut self, names: impl IntoIterator<Item = S>) -> Self {
        self.sync.extend(names.into_iter().map(Into::into));
        self
    }

    /// Synchronize on every non-probabilistic external action.
    pub fn sync_all_external(mut self) -> Self {
        self.sync_all = true;
        self
    }

    pub fn build(self) -> Result<Alphabet> {
        // name -> (kind, flip spec index)
        let mut decls: BTreeMap<String, (ActionKind, Option<usize>)> = BTreeMap::new();
        let mut declare = |name: &str, kind: ActionKind, prob: Option<usize>| -> Result<()> {
            check_name(name).map_err(|msg| Error::Config { line: 0, msg })?;
            if decls.insert(name.to_string(), (kind, prob)).is_some() {
                return Err(Error::Duplicate(name.to_string()));
            }
            Ok(())
        };
        for name in &self.internal {
            declare(name, ActionKind::Internal, None)?;
        }
        for name in &self.external {
            declare(name, ActionKind::External, None)?;
        }
        for (i, (flip, _)) in self.probs.iter().enumerate() {
            declare(flip, ActionKind::External, Some(i))?;
        }
        let mut guard_owner: HashMap<&str, usize> = HashMap::new();
        for (i, (flip, branches)) in self.probs.iter().enumerate() {
            if branches.is_empty() {
                return Err(Error::WeightSum {
                    flip: flip.clone(),
                    sum: "0".into(),
                });
            }
            let mut sum = Weight::zero();
            for (weight, guard) in branches {
                if *weight <= Weight::zero() || *weight > Weight::one() {
                    return Err(Error::Config {
                        line: 0,
                        msg: format!(
                            "weight {} of `{flip}` outside (0, 1]",
                            format_weight(weight)
                        ),
                    });
                }
                sum += weight;
                if let Some(prev) = guard_owner.insert(guard, i) {
                    let owner = &self.probs[prev].0;
                    return Err(Error::Config {
                        line: 0,
                        msg: format!("guard `{guard}` already used by `{owner}`"),
                    });
                }
                match decls.get(guard.as_str()) {
                    None => {
                        check_name(guard).map_err(|msg| Error::Config { line: 0, msg })?;
                        decls.insert(guard.clone(), (ActionKind::Internal, None));
                    }
                    Some((ActionKind::Internal, None)) => {}
                    Some(_) => {
                        return Err(Error::Config {
                            line: 0,
                            msg: format!("guard `{guard}` must be an internal action"),
                        })
                    }
                }
            }
            if !sum.is_one() {
                return Err(Error::WeightSum {
                    flip: flip.clone(),
                    sum: format_weight(&sum),
                });
            }
        }
        for name in &self.sync {
            match decls.get(name.as_str()) {
                None => {
                    check_name(name).map_err(|msg| Error::Config { line: 0, msg })?;
                    decls.insert(name.clone(), (ActionKind::External, None));
                }
                Some((ActionKind::Internal, _)) => {
                    return Err(Error::InvalidFrame(format!(
                        "`{name}` is internal and cannot be synchronized"
                    )))
                }
                Some((_, Some(_))) => {
                    return Err(Error::InvalidFrame(format!(
                        "`{name}` is probabilistic and cannot be synchronized"
                    )))
                }
                Some(_) => {}
            }
        }

        let mut actions = Vec::with_capacity(decls.len());
        let mut by_name = HashMap::with_capacity(decls.len());
        for (i, (name, (kind, prob))) in decls.into_iter().enumerate() {
            by_name.insert(name.clone(), ActionId(i as u32));
            actions.push(ActionLabel {
                name,
                kind,
                prob_group: prob,
            });
        }

        // Specs are ordered by flip id so equal alphabets compare equal.
        let mut specs: Vec<(ActionId, usize)> = self
            .probs
            .iter()
            .enumerate()
            .map(|(i, (flip, _))| (by_name[flip.as_str()], i))
            .collect();
        specs.sort();
        let mut probs = Vec::with_capacity(specs.len());
        let mut guard_of = vec![None; actions.len()];
        for (new_index, (flip_id, old_index)) in specs.into_iter().enumerate() {
            actions[flip_id.index()].prob_group = Some(new_index);
            let branches = self.probs[old_index]
                .1
                .iter()
                .enumerate()
                .map(|(b, (weight, guard))| {
                    let guard = by_name[guard.as_str()];
                    guard_of[guard.index()] = Some((new_index, b));
                    Branch {
                        weight: weight.clone(),
                        guard,
                    }
                })
                .collect();
            probs.push(ProbSpec {
                flip: flip_id,
                branches,
            });
        }

        let mut alphabet = Alphabet {
            actions,
            by_name,
            probs,
            guard_of,
            frame: Frame::empty(),
        };
        let frame: Frame = if self.sync_all {
            alphabet.synchronizable().into_iter().collect()
        } else {
            self.sync.iter().map(|n| alphabet.by_name[n.as_str()]).collect()
        };
        alphabet.frame = frame;
        Ok(alphabet)
    }
}

fn check_name(name: &str) -> Result<(), String> {
    if name.is_empty() {
        return Err("empty action name".into());
    }
    if name
        .chars()
        .any(|c| c.is_whitespace() || matches!(c, ',' | ';' | '{' | '}' | '#'))
    {
        return Err(format!("invalid action name `{name}`"));
    }
    Ok(())
}

fn name_list(text: &str) -> Result<Vec<String>, String> {
    let mut names = Vec::new();
    for part in text.split(',') {
        let name = part.trim();
        check_name(name)?;
        if name.contains(':') {
            return Err(format!("invalid action name `{name}`"));
        }
        names.push(name.to_string());
    }
    Ok(names)
}

/// Splits config text into `;`-terminated statements, stripping `#` comments.
/// Each statement carries the line on which it starts.
fn statements(text: &str) -> Vec<(usize, String)> {
    let mut out = Vec::new();
    let mut current = String::new();
    let mut start_line = 1;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        for ch in line.chars() {
            if ch == ';' {
                let stmt = current.trim().to_string();
                if !stmt.is_empty() {
                    out.push((start_line, stmt));
                }
                current.clear();
            } else {
                if current.trim().is_empty() && !ch.is_whitespace() {
                    start_line = i + 1;
                }
                current.push(ch);
            }
        }
        current.push(' ');
    }
    let tail = current.trim();
    if !tail.is_empty() {
        out.push((start_line, tail.to_string()));
    }
    out
}
