//! JSON interchange for automata and probabilistic automata.
//!
//! Every document carries `"format": "wcka/1"` and the alphabet in the
//! configuration syntax understood by [`Alphabet::from_config`].

use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::alphabet::Alphabet;
use crate::automaton::{Automaton, StateId, Transition};
use crate::error::{Error, Result};
use crate::probability::{Distribution, ProbAutomaton};
use crate::rational::{format_weight, parse_weight};

pub const FORMAT: &str = "wcka/1";

#[derive(Serialize, Deserialize)]
struct TransitionDoc {
    src: u32,
    action: String,
    dst: u32,
}

#[derive(Serialize, Deserialize)]
struct AutomatonDoc {
    format: String,
    alphabet: String,
    states: usize,
    initial: u32,
    finals: Vec<u32>,
    transitions: Vec<TransitionDoc>,
}

#[derive(Serialize, Deserialize)]
struct Mass {
    state: u32,
    p: String,
}

#[derive(Serialize, Deserialize)]
struct ProbTransitionDoc {
    src: u32,
    /// `null` for the silent step produced by collapsing a flip.
    action: Option<String>,
    dist: Vec<Mass>,
}

#[derive(Serialize, Deserialize)]
struct ProbDoc {
    format: String,
    alphabet: String,
    states: usize,
    initial_dist: Vec<Mass>,
    finals: Vec<u32>,
    transitions: Vec<ProbTransitionDoc>,
}

fn check_format(found: &str) -> Result<()> {
    if found != FORMAT {
        return Err(Error::Format(format!("expected format `{FORMAT}`, found `{found}`")));
    }
    Ok(())
}

fn state(p: StateId) -> u32 {
    p.index() as u32
}

pub fn automaton_to_json(p: &Automaton) -> String {
    let al = p.alphabet();
    let doc = AutomatonDoc {
        format: FORMAT.into(),
        alphabet: al.to_config(),
        states: p.num_states(),
        initial: state(p.initial()),
        finals: p.finals().map(state).collect(),
        transitions: p
            .transitions()
            .map(|t| TransitionDoc {
                src: state(t.src),
                action: al.name(t.action).to_string(),
                dst: state(t.dst),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("documents serialize") + "\n"
}

/// Parses and validates an automaton document; the result is well formed.
pub fn automaton_from_json(text: &str) -> Result<Automaton> {
    let doc: AutomatonDoc = serde_json::from_str(text)?;
    check_format(&doc.format)?;
    let al = Arc::new(Alphabet::from_config(&doc.alphabet)?);
    let transitions = doc
        .transitions
        .iter()
        .map(|t| {
            Ok(Transition {
                src: StateId::from_index(t.src as usize),
                action: al.require(&t.action)?,
                dst: StateId::from_index(t.dst as usize),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let p = Automaton::from_parts(
        al,
        doc.states,
        transitions,
        StateId::from_index(doc.initial as usize),
        doc.finals.iter().map(|&s| StateId::from_index(s as usize)),
    )?;
    p.validate().map_err(Error::Malformed)?;
    Ok(p)
}

pub fn read_automaton(path: &Path) -> Result<Automaton> {
    automaton_from_json(&fs::read_to_string(path)?)
}

pub fn write_automaton(path: &Path, p: &Automaton) -> Result<()> {
    fs::write(path, automaton_to_json(p))?;
    Ok(())
}

fn masses(d: &Distribution) -> Vec<Mass> {
    d.iter()
        .map(|(s, w)| Mass {
            state: state(s),
            p: format_weight(w),
        })
        .collect()
}

fn distribution(ms: &[Mass]) -> Result<Distribution> {
    ms.iter()
        .map(|m| {
            let w = parse_weight(&m.p).ok_or_else(|| Error::Format(format!("invalid weight `{}`", m.p)))?;
            Ok((StateId::from_index(m.state as usize), w))
        })
        .collect::<Result<Vec<_>>>()
        .and_then(Distribution::new)
}

pub fn prob_to_json(p: &ProbAutomaton) -> String {
    let al = p.alphabet();
    let doc = ProbDoc {
        format: FORMAT.into(),
        alphabet: al.to_config(),
        states: p.num_states(),
        initial_dist: masses(p.initial()),
        finals: p.states().filter(|&s| p.is_final(s)).map(state).collect(),
        transitions: p
            .states()
            .flat_map(|s| {
                p.transitions(s).iter().map(move |(a, d)| ProbTransitionDoc {
                    src: state(s),
                    action: a.map(|a| al.name(a).to_string()),
                    dist: masses(d),
                })
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("documents serialize") + "\n"
}

pub fn prob_from_json(text: &str) -> Result<ProbAutomaton> {
    let doc: ProbDoc = serde_json::from_str(text)?;
    check_format(&doc.format)?;
    let al = Arc::new(Alphabet::from_config(&doc.alphabet)?);
    let mut succ = vec![Vec::new(); doc.states];
    for t in &doc.transitions {
        let label = t.action.as_deref().map(|a| al.require(a)).transpose()?;
        let row = succ
            .get_mut(t.src as usize)
            .ok_or_else(|| Error::Format(format!("source state {} out of range", t.src)))?;
        row.push((label, distribution(&t.dist)?));
    }
    let mut finals = vec![false; doc.states];
    for &f in &doc.finals {
        *finals
            .get_mut(f as usize)
            .ok_or_else(|| Error::Format(format!("final state {f} out of range")))? = true;
    }
    ProbAutomaton::new(al, succ, distribution(&doc.initial_dist)?, finals)
}

pub fn read_prob(path: &Path) -> Result<ProbAutomaton> {
    prob_from_json(&fs::read_to_string(path)?)
}

pub fn write_prob(path: &Path, p: &ProbAutomaton) -> Result<()> {
    fs::write(path, prob_to_json(p))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probability::{epsilon, prob_leq};
    use crate::simulation::equiv;
    use crate::term::compile_str;

    fn alpha() -> Arc<Alphabet> {
        Arc::new(Alphabet::from_config("external a, b; internal t; prob flip: 1/3 h, 2/3 g; sync {a};").unwrap())
    }

    #[test]
    fn automaton_round_trip() {
        let al = alpha();
        let p = compile_str("(a.t + flip.(h.b + g.a))* || a.b", &al).unwrap();
        let text = automaton_to_json(&p);
        assert!(text.contains("\"format\": \"wcka/1\""));
        let q = automaton_from_json(&text).unwrap();
        assert_eq!(q.alphabet().as_ref(), p.alphabet().as_ref());
        assert_eq!(q.num_states(), p.num_states());
        assert!(equiv(&p, &q).unwrap());
        assert_eq!(automaton_to_json(&q), text);
    }

    #[test]
    fn rejects_bad_documents() {
        let al = alpha();
        let text = automaton_to_json(&compile_str("a.b", &al).unwrap());
        let wrong = text.replace("wcka/1", "wcka/0");
        assert!(matches!(automaton_from_json(&wrong), Err(Error::Format(_))));
        // An edge back into the initial state breaks initiality.
        let cyclic = text.replace("\"dst\": 1", "\"dst\": 0");
        assert!(matches!(automaton_from_json(&cyclic), Err(Error::Malformed(_))));
        let unknown = text.replace("\"action\": \"a\"", "\"action\": \"zz\"");
        assert!(automaton_from_json(&unknown).is_err());
        assert!(matches!(automaton_from_json("{"), Err(Error::Json(_))));
    }

    #[test]
    fn prob_round_trip() {
        let al = alpha();
        let e = epsilon(&compile_str("a.flip.(h.b + g.a)", &al).unwrap()).unwrap();
        let text = prob_to_json(&e);
        assert!(text.contains("\"initial_dist\""));
        assert!(text.contains("\"p\": \"1/3\""));
        assert!(text.contains("\"action\": null"));
        let back = prob_from_json(&text).unwrap();
        assert_eq!(prob_to_json(&back), text);
        assert!(prob_leq(&e, &back, 2).unwrap());
        assert!(prob_leq(&back, &e, 2).unwrap());
    }

    #[test]
    fn prob_rejects_bad_weights() {
        let al = alpha();
        let e = epsilon(&compile_str("flip.(h.b + g.a)", &al).unwrap()).unwrap();
        let text = prob_to_json(&e).replace("\"2/3\"", "\"1/3\"");
        assert!(matches!(prob_from_json(&text), Err(Error::Format(_))));
    }
}
