//! Executable law suite: axioms, consequences and documented counterexamples
//! checked on compiled terms.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::alphabet::Alphabet;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::gen::{GenConfig, TermGenerator};
use crate::probability::p_leq;
use crate::simulation::leq;
use crate::term::{compile, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    /// Part of the axiomatisation.
    Axiom,
    /// Elementary consequence of the axioms.
    Consequence,
    /// Holds in the finite automata model but is not an axiom.
    Model,
    /// Expected to fail on its documented witness.
    Negative,
}

#[derive(Clone, Copy, Debug)]
pub struct Law {
    pub id: &'static str,
    pub statement: &'static str,
    pub vars: &'static [&'static str],
    pub polarity: Polarity,
}

const X: &[&str] = &["x"];
const XY: &[&str] = &["x", "y"];
const XYZ: &[&str] = &["x", "y", "z"];
const XYUV: &[&str] = &["x", "y", "u", "v"];
const ST: &[&str] = &["s", "t"];

macro_rules! law {
    ($id:literal, $stmt:literal, $vars:expr, $pol:ident) => {
        Law {
            id: $id,
            statement: $stmt,
            vars: $vars,
            polarity: Polarity::$pol,
        }
    };
}

pub const LAWS: &[Law] = &[
    law!("plus_assoc", "x + (y + z) = (x + y) + z", XYZ, Axiom),
    law!("plus_comm", "x + y = y + x", XY, Axiom),
    law!("plus_idem", "x + x = x", X, Axiom),
    law!("plus_zero", "x + 0 = x", X, Axiom),
    law!("seq_assoc", "x(yz) = (xy)z", XYZ, Axiom),
    law!("seq_one_left", "1x = x", X, Axiom),
    law!("seq_one_right", "x1 = x", X, Axiom),
    law!("subdistributivity", "xy + xz <= x(y + z)", XYZ, Axiom),
    law!("left_unfold", "1 + xx* = x*", X, Axiom),
    law!("left_induction", "xy <= y => x*y <= y", XY, Axiom),
    law!("right_distributivity", "(x + y)z = xz + yz", XYZ, Axiom),
    law!("left_annihilation", "0x = 0", X, Axiom),
    law!("par_assoc", "x || (y || z) = (x || y) || z", XYZ, Axiom),
    law!("par_comm", "x || y = y || x", XY, Axiom),
    law!("one_par_one", "1 || 1 = 1", &[], Axiom),
    law!("par_monotonicity", "x || y + x || z <= x || (y + z)", XYZ, Axiom),
    law!("interchange", "(x || y)(u || v) <= (xu) || (yv)", XYUV, Axiom),
    law!("mono_plus", "x <= y => x + z <= y + z", XYZ, Consequence),
    law!("mono_seq_left", "x <= y => xz <= yz", XYZ, Consequence),
    law!("mono_seq_right", "x <= y => zx <= zy", XYZ, Consequence),
    law!("mono_star", "x <= y => x* <= y*", XY, Consequence),
    law!("mono_par", "x <= y => x || z <= y || z", XYZ, Consequence),
    law!("star_par_idem", "(s* || t*)* = s* || t*", ST, Consequence),
    law!("star_par_sub", "(s || t)* <= s* || t*", ST, Consequence),
    law!("star_sum", "(s + t)* = (s*t*)*", ST, Consequence),
    law!("right_unfold_half", "1 + x*x <= x*", X, Model),
    law!("right_induction", "yx <= y => yx* <= y", XY, Model),
    law!("star_approximation", "(1 + x)^n <= x* for n <= 4", X, Model),
    law!("left_distributivity", "x(y + z) <= xy + xz", XYZ, Negative),
    law!("right_annihilation", "x0 = 0", X, Negative),
    law!("one_par_identity", "1 || x = x", X, Negative),
    law!("right_unfold", "1 + x*x = x*", X, Negative),
    law!("par_assoc_mixed_frames", "(x ||{a} y) ||{c} z = x ||{a} (y ||{c} z)", XYZ, Negative),
];

pub fn law(id: &str) -> Result<&'static Law> {
    LAWS.iter()
        .find(|l| l.id == id)
        .ok_or_else(|| Error::UnknownLaw(id.to_string()))
}

/// Which inclusion of a comparison failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// `lhs <= rhs` failed.
    Forward,
    /// `rhs <= lhs` failed.
    Backward,
    Both,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails { direction: Direction },
    /// The hypothesis of an implication is false.
    Vacuous,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Holds => f.write_str("holds"),
            Verdict::Vacuous => f.write_str("vacuous"),
            Verdict::Fails { direction } => write!(f, "fails ({direction:?})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LawInstance {
    pub law: String,
    pub bindings: BTreeMap<String, String>,
    pub verdict: Verdict,
}

pub type Bindings = BTreeMap<String, Term>;

enum Shape {
    Equiv(Term, Term),
    Leq(Term, Term),
    Implies((Term, Term), Box<Shape>),
    Approx(Term, usize),
}

fn shape(id: &str, b: &Bindings) -> Result<Shape> {
    let l = law(id)?;
    for v in l.vars {
        if !b.contains_key(*v) {
            return Err(Error::MissingBinding(v.to_string()));
        }
    }
    let v = |name: &str| b[name].clone();
    let (plus, seq, par, star) = (Term::plus, Term::seq, Term::par, Term::star);
    let one = || Term::One;
    Ok(match id {
        "plus_assoc" => Shape::Equiv(
            plus(v("x"), plus(v("y"), v("z"))),
            plus(plus(v("x"), v("y")), v("z")),
        ),
        "plus_comm" => Shape::Equiv(plus(v("x"), v("y")), plus(v("y"), v("x"))),
        "plus_idem" => Shape::Equiv(plus(v("x"), v("x")), v("x")),
        "plus_zero" => Shape::Equiv(plus(v("x"), Term::Zero), v("x")),
        "seq_assoc" => Shape::Equiv(
            seq(v("x"), seq(v("y"), v("z"))),
            seq(seq(v("x"), v("y")), v("z")),
        ),
        "seq_one_left" => Shape::Equiv(seq(one(), v("x")), v("x")),
        "seq_one_right" => Shape::Equiv(seq(v("x"), one()), v("x")),
        "subdistributivity" => Shape::Leq(
            plus(seq(v("x"), v("y")), seq(v("x"), v("z"))),
            seq(v("x"), plus(v("y"), v("z"))),
        ),
        "left_unfold" => Shape::Equiv(plus(one(), seq(v("x"), star(v("x")))), star(v("x"))),
        "left_induction" => Shape::Implies(
            (seq(v("x"), v("y")), v("y")),
            Box::new(Shape::Leq(seq(star(v("x")), v("y")), v("y"))),
        ),
        "right_distributivity" => Shape::Equiv(
            seq(plus(v("x"), v("y")), v("z")),
            plus(seq(v("x"), v("z")), seq(v("y"), v("z"))),
        ),
        "left_annihilation" => Shape::Equiv(seq(Term::Zero, v("x")), Term::Zero),
        "par_assoc" => Shape::Equiv(
            par(v("x"), par(v("y"), v("z"))),
            par(par(v("x"), v("y")), v("z")),
        ),
        "par_comm" => Shape::Equiv(par(v("x"), v("y")), par(v("y"), v("x"))),
        "one_par_one" => Shape::Equiv(par(one(), one()), one()),
        "par_monotonicity" => Shape::Leq(
            plus(par(v("x"), v("y")), par(v("x"), v("z"))),
            par(v("x"), plus(v("y"), v("z"))),
        ),
        "interchange" => Shape::Leq(
            seq(par(v("x"), v("y")), par(v("u"), v("v"))),
            par(seq(v("x"), v("u")), seq(v("y"), v("v"))),
        ),
        "mono_plus" => Shape::Implies(
            (v("x"), v("y")),
            Box::new(Shape::Leq(plus(v("x"), v("z")), plus(v("y"), v("z")))),
        ),
        "mono_seq_left" => Shape::Implies(
            (v("x"), v("y")),
            Box::new(Shape::Leq(seq(v("x"), v("z")), seq(v("y"), v("z")))),
        ),
        "mono_seq_right" => Shape::Implies(
            (v("x"), v("y")),
            Box::new(Shape::Leq(seq(v("z"), v("x")), seq(v("z"), v("y")))),
        ),
        "mono_star" => Shape::Implies((v("x"), v("y")), Box::new(Shape::Leq(star(v("x")), star(v("y"))))),
        "mono_par" => Shape::Implies(
            (v("x"), v("y")),
            Box::new(Shape::Leq(par(v("x"), v("z")), par(v("y"), v("z")))),
        ),
        "star_par_idem" => {
            let both = par(star(v("s")), star(v("t")));
            Shape::Equiv(star(both.clone()), both)
        }
        "star_par_sub" => Shape::Leq(star(par(v("s"), v("t"))), par(star(v("s")), star(v("t")))),
        "star_sum" => Shape::Equiv(
            star(plus(v("s"), v("t"))),
            star(seq(star(v("s")), star(v("t")))),
        ),
        "right_unfold_half" => Shape::Leq(plus(one(), seq(star(v("x")), v("x"))), star(v("x"))),
        "right_unfold" => Shape::Equiv(plus(one(), seq(star(v("x")), v("x"))), star(v("x"))),
        "right_induction" => Shape::Implies(
            (seq(v("y"), v("x")), v("y")),
            Box::new(Shape::Leq(seq(v("y"), star(v("x"))), v("y"))),
        ),
        "star_approximation" => Shape::Approx(v("x"), 4),
        "left_distributivity" => Shape::Leq(
            seq(v("x"), plus(v("y"), v("z"))),
            plus(seq(v("x"), v("y")), seq(v("x"), v("z"))),
        ),
        "right_annihilation" => Shape::Equiv(seq(v("x"), Term::Zero), Term::Zero),
        "one_par_identity" => Shape::Equiv(par(one(), v("x")), v("x")),
        "par_assoc_mixed_frames" => Shape::Equiv(
            Term::par_with(Term::par_with(v("x"), v("y"), ["a"]), v("z"), ["c"]),
            Term::par_with(v("x"), Term::par_with(v("y"), v("z"), ["c"]), ["a"]),
        ),
        other => return Err(Error::UnknownLaw(other.to_string())),
    })
}

fn holds(l: &Term, r: &Term, alphabet: &Arc<Alphabet>) -> Result<bool> {
    leq(&compile(l, alphabet)?, &compile(r, alphabet)?)
}

fn evaluate(s: &Shape, alphabet: &Arc<Alphabet>) -> Result<Verdict> {
    Ok(match s {
        Shape::Leq(l, r) => {
            if holds(l, r, alphabet)? {
                Verdict::Holds
            } else {
                Verdict::Fails {
                    direction: Direction::Forward,
                }
            }
        }
        Shape::Equiv(l, r) => match (holds(l, r, alphabet)?, holds(r, l, alphabet)?) {
            (true, true) => Verdict::Holds,
            (false, true) => Verdict::Fails {
                direction: Direction::Forward,
            },
            (true, false) => Verdict::Fails {
                direction: Direction::Backward,
            },
            (false, false) => Verdict::Fails {
                direction: Direction::Both,
            },
        },
        Shape::Implies((l, r), concl) => {
            if holds(l, r, alphabet)? {
                evaluate(concl, alphabet)?
            } else {
                Verdict::Vacuous
            }
        }
        Shape::Approx(x, max) => {
            let sx = compile(&Term::star(x.clone()), alphabet)?;
            let step = Term::plus(Term::One, x.clone());
            for n in 0..=*max {
                if !leq(&compile(&Term::power(&step, n), alphabet)?, &sx)? {
                    return Ok(Verdict::Fails {
                        direction: Direction::Forward,
                    });
                }
            }
            Verdict::Holds
        }
    })
}

/// Evaluates one instance of a law.
pub fn check_law(id: &str, bindings: &Bindings, alphabet: &Arc<Alphabet>) -> Result<LawInstance> {
    let s = shape(id, bindings)?;
    Ok(LawInstance {
        law: id.to_string(),
        bindings: bindings.iter().map(|(k, t)| (k.clone(), t.to_string())).collect(),
        verdict: evaluate(&s, alphabet)?,
    })
}

/// The alphabet the suite runs over: `a, b, c` synchronised, one internal
/// action and one fair coin.
pub fn suite_alphabet() -> Arc<Alphabet> {
    Arc::new(
        Alphabet::from_config("external a, b, c; internal tau; prob flip: 1/2 h, 1/2 t; sync {a, b, c};")
            .expect("suite alphabet is well formed"),
    )
}

#[derive(Clone, Debug, Serialize)]
pub struct LawSummary {
    pub law: String,
    pub polarity: Polarity,
    pub instances: usize,
    pub held: usize,
    /// Instances whose hypothesis held; equals `instances` for equations.
    pub hypothesis_held: usize,
    pub failures: Vec<LawInstance>,
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessCheck {
    pub instance: LawInstance,
    /// The instance failed, as documented.
    pub as_expected: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Fact {
    pub name: String,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub trials: usize,
    pub laws: Vec<LawSummary>,
    pub witnesses: Vec<WitnessCheck>,
    pub facts: Vec<Fact>,
    pub passed: bool,
}

impl SuiteReport {
    pub fn to_text(&self) -> String {
        let mut out = format!("law suite: seed {} trials {}\n", self.seed, self.trials);
        for l in &self.laws {
            let hit = if l.hypothesis_held == l.instances {
                String::new()
            } else {
                format!(" (hypothesis {}/{})", l.hypothesis_held, l.instances)
            };
            let status = if l.failures.is_empty() { "ok" } else { "FAILED" };
            out += &format!("  {:<24} {:>4}/{:<4}{hit} {status}\n", l.law, l.held, l.instances);
            for f in &l.failures {
                out += &format!("    counterexample {:?}: {}\n", f.bindings, f.verdict);
            }
        }
        for w in &self.witnesses {
            let status = if w.as_expected { "fails as expected" } else { "UNEXPECTEDLY HOLDS" };
            out += &format!("  witness {:<24} {:?}: {status}\n", w.instance.law, w.instance.bindings);
        }
        for f in &self.facts {
            out += &format!("  fact {}: {}\n", f.name, if f.holds { "ok" } else { "FAILED" });
        }
        out += if self.passed { "all checks passed\n" } else { "some checks FAILED\n" };
        out
    }
}

/// Seed for one `(law, trial)` cell, so that instances do not depend on
/// scheduling.
pub fn cell_seed(seed: u64, law: usize, trial: usize) -> u64 {
    let mut z = seed ^ ((law as u64) << 40) ^ trial as u64;
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn generator_config(alphabet: &Alphabet, l: &Law) -> GenConfig {
    let mut cfg = GenConfig::for_alphabet(alphabet);
    cfg.max_depth = 4;
    cfg.state_cap = if l.statement.contains("||") { 24 } else { 64 };
    cfg
}

/// Draws bindings for one instance. Implications get a biased draw on
/// odd trials so that their hypothesis is not almost always false.
pub fn sample_bindings(l: &Law, alphabet: &Arc<Alphabet>, seed: u64, trial: usize) -> Result<Bindings> {
    let mut g = TermGenerator::new(alphabet.clone(), generator_config(alphabet, l), seed);
    let mut b = Bindings::new();
    for v in l.vars {
        b.insert(v.to_string(), g.sample()?.0);
    }
    if trial % 2 == 1 {
        let fresh = g.sample()?.0;
        match l.id {
            "left_induction" => {
                b.insert("y".into(), Term::seq(Term::star(b["x"].clone()), fresh));
            }
            "right_induction" => {
                b.insert("y".into(), Term::seq(fresh, Term::star(b["x"].clone())));
            }
            _ => {}
        }
    }
    if l.id.starts_with("mono_") {
        let widen = g.sample()?.0;
        b.insert("y".into(), Term::plus(b["x"].clone(), widen));
    }
    Ok(b)
}

/// Documented witnesses for the negative laws.
pub fn witnesses() -> Vec<(&'static str, Bindings)> {
    let bind = |pairs: &[(&str, Term)]| pairs.iter().map(|(k, t)| (k.to_string(), t.clone())).collect();
    let a = || Term::act("a");
    let b = || Term::act("b");
    let coin = Term::seq(Term::act("flip"), Term::plus(Term::act("h"), Term::act("t")));
    vec![
        ("left_distributivity", bind(&[("x", coin), ("y", a()), ("z", b())])),
        ("right_annihilation", bind(&[("x", a())])),
        ("one_par_identity", bind(&[("x", a())])),
        ("right_unfold", bind(&[("x", Term::act("c"))])),
        ("par_assoc_mixed_frames", bind(&[("x", a()), ("y", b()), ("z", a())])),
    ]
}

fn facts(alphabet: &Arc<Alphabet>) -> Result<Vec<Fact>> {
    let c = |s: &str| crate::term::compile_str(s, alphabet);
    let eq = |l: &str, r: &str| -> Result<bool> { crate::simulation::equiv(&c(l)?, &c(r)?) };
    let vm = check_vm_example()?;
    Ok(vec![
        Fact {
            name: "(a ||{a} b) ||{c} a = ab0 + ba0".into(),
            holds: eq("(a ||{a} b) ||{c} a", "a.b.0 + b.a.0")?,
        },
        Fact {
            name: "a ||{a} (b ||{c} a) = ab + ba".into(),
            holds: eq("a ||{a} (b ||{c} a)", "a.b + b.a")?,
        },
        Fact {
            name: "flip.a + flip.b <= flip.(a + b)".into(),
            holds: holds(
                &crate::term::parse("flip.a + flip.b", alphabet)?,
                &crate::term::parse("flip.(a + b)", alphabet)?,
                alphabet,
            )?,
        },
        Fact {
            name: "vending machine inequality".into(),
            holds: vm.passed(),
        },
    ])
}

/// Runs every non-negative law on `trials` seeded instances, then the
/// negative witnesses and the fixed identities.
pub fn run_suite(alphabet: &Arc<Alphabet>, seed: u64, trials: usize, exec: Execution) -> Result<SuiteReport> {
    let positive: Vec<(usize, &Law)> = LAWS
        .iter()
        .enumerate()
        .filter(|(_, l)| l.polarity != Polarity::Negative)
        .collect();
    let cells: Vec<(usize, usize)> = positive
        .iter()
        .flat_map(|&(i, _)| (0..trials).map(move |t| (i, t)))
        .collect();
    let results: Vec<Result<LawInstance>> = exec.map(&cells, |&(i, t)| {
        let l = &LAWS[i];
        let b = sample_bindings(l, alphabet, cell_seed(seed, i, t), t)?;
        check_law(l.id, &b, alphabet)
    });

    let mut by_law: BTreeMap<usize, Vec<LawInstance>> = BTreeMap::new();
    for (&(i, _), r) in cells.iter().zip(results) {
        by_law.entry(i).or_default().push(r?);
    }
    let mut passed = true;
    let mut laws = Vec::new();
    for (&i, instances) in &by_law {
        let failures: Vec<LawInstance> = instances
            .iter()
            .filter(|x| matches!(x.verdict, Verdict::Fails { .. }))
            .cloned()
            .collect();
        passed &= failures.is_empty();
        laws.push(LawSummary {
            law: LAWS[i].id.to_string(),
            polarity: LAWS[i].polarity,
            instances: instances.len(),
            held: instances.iter().filter(|x| x.verdict == Verdict::Holds).count(),
            hypothesis_held: instances.iter().filter(|x| x.verdict != Verdict::Vacuous).count(),
            failures,
        });
    }

    let mut checks = Vec::new();
    for (id, b) in witnesses() {
        let instance = check_law(id, &b, alphabet)?;
        let as_expected = matches!(instance.verdict, Verdict::Fails { .. });
        passed &= as_expected;
        checks.push(WitnessCheck { instance, as_expected });
    }
    let facts = facts(alphabet)?;
    passed &= facts.iter().all(|f| f.holds);
    Ok(SuiteReport {
        seed,
        trials,
        laws,
        witnesses: checks,
        facts,
        passed,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct VmReport {
    /// `U || VM >= coin.flip.(th.(tea + 1) + tt)` under rooted η-simulation.
    pub inequality: bool,
    /// The same inequality under p-simulation.
    pub inequality_p: bool,
    /// The user `coin.(coffee + 1)` against the mirrored right-hand side.
    pub coffee_user: bool,
    /// `coin.flip.(th.(tea + 1) + tt.(tea + 1))` is rejected by p-simulation.
    pub strengthened_rejected: bool,
    /// Plain simulation does not tell the guards apart and accepts it.
    pub strengthened_plain: bool,
    /// `coin.flip.th.tea` is below `U || VM`.
    pub literal_variant: bool,
}

impl VmReport {
    pub fn passed(&self) -> bool {
        self.inequality && self.inequality_p && self.coffee_user && self.strengthened_rejected
    }
}

pub fn vm_alphabet() -> Arc<Alphabet> {
    Arc::new(
        Alphabet::from_config(
            "external coin, tea, coffee; internal th, tt; prob flip: 1/2 th, 1/2 tt; sync {coin, tea, coffee};",
        )
        .expect("vending machine alphabet is well formed"),
    )
}

pub fn check_vm_example() -> Result<VmReport> {
    let al = vm_alphabet();
    let c = |s: &str| crate::term::compile_str(s, &al);
    let vm = "coin.flip.(th.(tea + 1) + tt.(coffee + 1))";
    let system = c(&format!("coin.(tea + 1) || {vm}"))?;
    let coffee = c(&format!("coin.(coffee + 1) || {vm}"))?;
    let rhs = c("coin.flip.(th.(tea + 1) + tt)")?;
    let strong = c("coin.flip.(th.(tea + 1) + tt.(tea + 1))")?;
    Ok(VmReport {
        inequality: leq(&rhs, &system)?,
        inequality_p: p_leq(&rhs, &system)?,
        coffee_user: leq(&c("coin.flip.(th + tt.(coffee + 1))")?, &coffee)?,
        strengthened_rejected: !p_leq(&strong, &system)?,
        strengthened_plain: leq(&strong, &system)?,
        literal_variant: leq(&c("coin.flip.th.tea")?, &system)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::parse;

    fn bind(al: &Alphabet, pairs: &[(&str, &str)]) -> Bindings {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), parse(v, al).unwrap()))
            .collect()
    }

    #[test]
    fn interchange_with_empty_frame() {
        let al = Arc::new(Alphabet::from_config("external a, b, c, d;").unwrap());
        let b = bind(&al, &[("x", "a"), ("y", "b"), ("u", "c"), ("v", "d")]);
        assert_eq!(check_law("interchange", &b, &al).unwrap().verdict, Verdict::Holds);
    }

    #[test]
    fn right_annihilation_witness() {
        let al = suite_alphabet();
        let i = check_law("right_annihilation", &bind(&al, &[("x", "a")]), &al).unwrap();
        assert_eq!(
            i.verdict,
            Verdict::Fails {
                direction: Direction::Forward
            }
        );
        let i = check_law("right_annihilation", &bind(&al, &[("x", "0")]), &al).unwrap();
        assert_eq!(i.verdict, Verdict::Holds);
    }

    #[test]
    fn left_distributivity_witness() {
        let al = suite_alphabet();
        let b = bind(&al, &[("x", "flip.(h + t)"), ("y", "a"), ("z", "b")]);
        assert!(matches!(
            check_law("left_distributivity", &b, &al).unwrap().verdict,
            Verdict::Fails { .. }
        ));
        let b = bind(&al, &[("x", "a"), ("y", "b"), ("z", "b")]);
        assert_eq!(check_law("left_distributivity", &b, &al).unwrap().verdict, Verdict::Holds);
    }

    #[test]
    fn one_par_identity() {
        let al = suite_alphabet();
        let i = check_law("one_par_identity", &bind(&al, &[("x", "a")]), &al).unwrap();
        assert!(matches!(i.verdict, Verdict::Fails { .. }));
        let i = check_law("one_par_identity", &bind(&al, &[("x", "tau")]), &al).unwrap();
        assert_eq!(i.verdict, Verdict::Holds);
        let i = check_law("one_par_one", &Bindings::new(), &al).unwrap();
        assert_eq!(i.verdict, Verdict::Holds);
    }

    #[test]
    fn implication_reports_vacuous() {
        let al = suite_alphabet();
        let i = check_law("left_induction", &bind(&al, &[("x", "a"), ("y", "b")]), &al).unwrap();
        assert_eq!(i.verdict, Verdict::Vacuous);
        let i = check_law("left_induction", &bind(&al, &[("x", "a"), ("y", "a*.b")]), &al).unwrap();
        assert_eq!(i.verdict, Verdict::Holds);
    }

    #[test]
    fn right_unfold_only_one_way() {
        let al = suite_alphabet();
        let i = check_law("right_unfold", &bind(&al, &[("x", "c")]), &al).unwrap();
        assert_eq!(
            i.verdict,
            Verdict::Fails {
                direction: Direction::Backward
            }
        );
        let i = check_law("right_unfold_half", &bind(&al, &[("x", "c")]), &al).unwrap();
        assert_eq!(i.verdict, Verdict::Holds);
    }

    #[test]
    fn star_approximation() {
        let al = suite_alphabet();
        let i = check_law("star_approximation", &bind(&al, &[("x", "a.b + tau")]), &al).unwrap();
        assert_eq!(i.verdict, Verdict::Holds);
    }

    #[test]
    fn unknown_and_missing() {
        let al = suite_alphabet();
        assert!(matches!(
            check_law("nope", &Bindings::new(), &al),
            Err(Error::UnknownLaw(_))
        ));
        assert!(matches!(
            check_law("plus_comm", &bind(&al, &[("x", "a")]), &al),
            Err(Error::MissingBinding(_))
        ));
    }

    #[test]
    fn vending_machine() {
        let r = check_vm_example().unwrap();
        assert!(r.inequality);
        assert!(r.inequality_p);
        assert!(r.coffee_user);
        assert!(r.strengthened_rejected);
        assert!(r.strengthened_plain);
        assert!(r.literal_variant);
    }

    #[test]
    fn suite_is_deterministic() {
        let al = suite_alphabet();
        let a = run_suite(&al, 11, 3, Execution::Parallel).unwrap();
        let b = run_suite(&al, 11, 3, Execution::Sequential).unwrap();
        assert!(a.passed, "{}", a.to_text());
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
}
