//! Exhaustive agreement sweeps between independent decision procedures.

use std::collections::HashMap;

use serde::Serialize;

use crate::automaton::Automaton;
use crate::error::Result;
use crate::exec::Execution;
use crate::observation::{signature_leq, trace_leq, TestSuite};
use crate::simulation::{leq, tree_leq, unfold};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Disagreement {
    pub left: usize,
    pub right: usize,
    pub first: bool,
    pub second: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct MayTraceReport {
    pub automata: usize,
    pub tests: usize,
    pub classes: usize,
    /// Ordered pairs covered, counting those settled through a class.
    pub pairs: u64,
    /// `first` is the may verdict, `second` the trace verdict.
    pub disagreements: Vec<Disagreement>,
}

/// Compares may testing with trace inclusion on every ordered pair of
/// `automata`.
///
/// Automata passing the same tests are grouped; each member is checked to
/// be trace-equivalent to its group's representative, and representatives
/// are compared pairwise. Since both preorders are transitive this settles
/// every pair.
pub fn may_vs_traces(automata: &[Automaton], depth: usize, exec: Execution) -> Result<MayTraceReport> {
    let Some(first) = automata.first() else {
        return Ok(MayTraceReport {
            automata: 0,
            tests: 0,
            classes: 0,
            pairs: 0,
            disagreements: Vec::new(),
        });
    };
    let suite = TestSuite::new(first.alphabet(), depth)?;
    let signatures = exec.map(automata, |p| suite.signature(p));

    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut by_sig: HashMap<&[u64], usize> = HashMap::new();
    for (i, sig) in signatures.iter().enumerate() {
        let k = *by_sig.entry(sig.as_slice()).or_insert_with(|| {
            classes.push(Vec::new());
            classes.len() - 1
        });
        classes[k].push(i);
    }

    let member_checks: Vec<(usize, usize)> = classes
        .iter()
        .flat_map(|c| c[1..].iter().map(move |&m| (m, c[0])))
        .collect();
    let inner: Vec<Result<Vec<Disagreement>>> = exec.map(&member_checks, |&(m, rep)| {
        let mut out = Vec::new();
        for (l, r) in [(m, rep), (rep, m)] {
            if !trace_leq(&automata[l], &automata[r])? {
                out.push(Disagreement {
                    left: l,
                    right: r,
                    first: true,
                    second: false,
                });
            }
        }
        Ok(out)
    });

    let reps: Vec<usize> = classes.iter().map(|c| c[0]).collect();
    let outer: Vec<Result<Vec<Disagreement>>> = exec.map(&reps, |&a| {
        let mut out = Vec::new();
        for &b in &reps {
            if a == b {
                continue;
            }
            let may = signature_leq(&signatures[a], &signatures[b]);
            let trace = trace_leq(&automata[a], &automata[b])?;
            if may != trace {
                out.push(Disagreement {
                    left: a,
                    right: b,
                    first: may,
                    second: trace,
                });
            }
        }
        Ok(out)
    });

    let mut disagreements = Vec::new();
    for r in inner.into_iter().chain(outer) {
        disagreements.extend(r?);
    }
    let n = automata.len() as u64;
    Ok(MayTraceReport {
        automata: automata.len(),
        tests: suite.len(),
        classes: classes.len(),
        pairs: n * n,
        disagreements,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleReport {
    pub automata: usize,
    pub pairs: u64,
    pub related: u64,
    /// `first` is the simulation verdict, `second` the tree oracle's.
    pub disagreements: Vec<Disagreement>,
}

/// Compares `leq` with the tree-unfolding oracle at saturating depth on
/// every ordered pair of acyclic automata.
pub fn oracle_vs_leq(automata: &[Automaton], exec: Execution) -> Result<OracleReport> {
    let trees = automata
        .iter()
        .map(|p| {
            let depth = p.longest_path().expect("acyclic input");
            unfold(p, depth)
        })
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<Result<(u64, Vec<Disagreement>)>> = exec.map_range(automata.len(), |i| {
        let p = &automata[i];
        let mut related = 0;
        let mut out = Vec::new();
        for (j, q) in automata.iter().enumerate() {
            let sim = leq(p, q)?;
            let oracle = tree_leq(&trees[i], p.alphabet(), q);
            related += sim as u64;
            if sim != oracle {
                out.push(Disagreement {
                    left: i,
                    right: j,
                    first: sim,
                    second: oracle,
                });
            }
        }
        Ok((related, out))
    });
    let mut related = 0;
    let mut disagreements = Vec::new();
    for r in rows {
        let (k, d) = r?;
        related += k;
        disagreements.extend(d);
    }
    let n = automata.len() as u64;
    Ok(OracleReport {
        automata: automata.len(),
        pairs: n * n,
        related,
        disagreements,
    })
}
