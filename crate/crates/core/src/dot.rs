//! Graphviz output. Write-only.

use std::fmt::Write;

use crate::automaton::Automaton;
use crate::probability::ProbAutomaton;
use crate::rational::format_weight;

fn quote(s: &str) -> String {
    let mut out = String::from("\"");
    for c in s.chars() {
        match c {
            '"' | '\\' => {
                out.push('\\');
                out.push(c);
            }
            '\n' => out.push_str("\\n"),
            _ => out.push(c),
        }
    }
    out.push('"');
    out
}

pub fn automaton_to_dot(p: &Automaton, name: &str) -> String {
    let al = p.alphabet();
    let mut out = format!("digraph {} {{\n  rankdir=TB;\n", quote(name));
    out += "  start [shape=point];\n";
    for s in p.states() {
        let shape = if p.is_final(s) { "doublecircle" } else { "circle" };
        let _ = writeln!(out, "  s{} [shape={shape}, label={}];", s.index(), quote(&s.to_string()));
    }
    let _ = writeln!(out, "  start -> s{};", p.initial().index());
    for t in p.transitions() {
        let style = if al.is_internal(t.action) { ", style=dashed" } else { "" };
        let _ = writeln!(
            out,
            "  s{} -> s{} [label={}{style}];",
            t.src.index(),
            t.dst.index(),
            quote(al.name(t.action))
        );
    }
    out += "}\n";
    out
}

/// Transitions to non-point distributions go through a small junction
/// node whose out-edges carry the probabilities.
pub fn prob_to_dot(p: &ProbAutomaton, name: &str) -> String {
    let mut out = format!("digraph {} {{\n", quote(name));
    out += "  start [shape=point];\n";
    for s in p.states() {
        let shape = if p.is_final(s) { "doublecircle" } else { "circle" };
        let _ = writeln!(out, "  s{} [shape={shape}, label={}];", s.index(), quote(&s.to_string()));
    }
    let mut junctions = 0;
    let mut fan = |out: &mut String, from: String, label: String, d: &crate::probability::Distribution| {
        if let Some(t) = d.as_point() {
            let _ = writeln!(out, "  {from} -> s{} [label={}];", t.index(), quote(&label));
            return;
        }
        let j = format!("j{junctions}");
        junctions += 1;
        let _ = writeln!(out, "  {j} [shape=point];");
        let _ = writeln!(out, "  {from} -> {j} [label={}];", quote(&label));
        for (t, w) in d.iter() {
            let _ = writeln!(out, "  {j} -> s{} [label={}, style=dotted];", t.index(), quote(&format_weight(w)));
        }
    };
    fan(&mut out, "start".into(), String::new(), p.initial());
    for s in p.states() {
        for (a, d) in p.transitions(s) {
            fan(&mut out, format!("s{}", s.index()), p.label_name(*a).to_string(), d);
        }
    }
    out += "}\n";
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Alphabet;
    use crate::probability::epsilon;
    use crate::term::compile_str;
    use std::sync::Arc;

    #[test]
    fn escapes_and_marks_finals() {
        let al = Arc::new(Alphabet::from_config("external a; internal t;").unwrap());
        let p = compile_str("a.t", &al).unwrap();
        let d = automaton_to_dot(&p, "with \"quotes\"");
        assert!(d.starts_with("digraph \"with \\\"quotes\\\"\" {"));
        assert!(d.contains("s2 [shape=doublecircle"));
        assert!(d.contains("s1 -> s2 [label=\"t\", style=dashed];"));
    }

    #[test]
    fn junctions_for_distributions() {
        let al = Arc::new(Alphabet::from_config("external a, b; prob flip: 1/4 h, 3/4 g;").unwrap());
        let e = epsilon(&compile_str("flip.(h.a + g.b)", &al).unwrap()).unwrap();
        let d = prob_to_dot(&e, "e");
        assert!(d.contains("j0 [shape=point];"));
        assert!(d.contains("label=\"1/4\""));
        assert!(d.contains("label=\"3/4\""));
    }
}
