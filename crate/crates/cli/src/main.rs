use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;

use wcka::exec::Execution;
use wcka::observation::{may_witness, trace_language, trace_leq};
use wcka::probability::{epsilon, is_p_automaton, p_automaton_violation, p_leq, prob_leq};
use wcka::rabin::{self, Place, RabinConfig, Tourist, Value};
use wcka::simulation::{greatest_simulation, leq};
use wcka::term::{compile, load_term_file, parse};
use wcka::{dot, io, laws, Alphabet, Automaton};

const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (format wcka/1)");

#[derive(Parser)]
#[command(name = "wcka", version = VERSION, about = "Automata for weak concurrent Kleene algebra")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a term to an automaton.
    Compile(CompileArgs),
    /// Compare or validate automata.
    Check(CheckArgs),
    /// May testing against a bounded test suite.
    May(MayArgs),
    /// Print the trace language of an automaton.
    Traces(TracesArgs),
    /// Run the law suite.
    Laws(LawsArgs),
    /// Probabilistic automata: the ε translation and probabilistic simulation.
    Prob(ProbArgs),
    /// The choice coordination case study.
    Rabin(RabinArgs),
}

#[derive(Args)]
struct CompileArgs {
    /// A `.wcka` file: `%alphabet <path>` header followed by a term.
    file: Option<PathBuf>,
    /// Inline term; needs --alphabet.
    #[arg(long)]
    term: Option<String>,
    /// Alphabet configuration file; overrides the file header.
    #[arg(long)]
    alphabet: Option<PathBuf>,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long)]
    dot: Option<PathBuf>,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct CheckMode {
    #[arg(long, num_args = 2, value_names = ["A", "B"])]
    leq: Option<Vec<PathBuf>>,
    #[arg(long, num_args = 2, value_names = ["A", "B"])]
    equiv: Option<Vec<PathBuf>>,
    /// p-simulation between two p-automata.
    #[arg(long, num_args = 2, value_names = ["A", "B"])]
    p_leq: Option<Vec<PathBuf>>,
    #[arg(long, value_name = "A")]
    validate: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    mode: CheckMode,
    /// Print the greatest simulation as JSON.
    #[arg(long)]
    relation: bool,
}

#[derive(Args)]
struct MayArgs {
    #[arg(long, num_args = 2, value_names = ["A", "B"], required = true)]
    leq: Vec<PathBuf>,
    #[arg(long, default_value_t = 3)]
    depth: usize,
    /// Also compare trace languages.
    #[arg(long)]
    traces: bool,
}

#[derive(Args)]
struct TracesArgs {
    file: PathBuf,
    /// Print the erased automaton and, for acyclic inputs, every word.
    #[arg(long)]
    dump: bool,
    /// Word length limit for cyclic inputs.
    #[arg(long, default_value_t = 6)]
    max_len: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct LawsArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    /// Alphabet configuration; defaults to `a, b, c` synchronised, one
    /// internal action and one fair coin.
    #[arg(long)]
    alphabet: Option<PathBuf>,
    /// Also write the JSON report here.
    #[arg(long)]
    json: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct ProbMode {
    /// Translate a p-automaton.
    #[arg(long, value_name = "A")]
    epsilon: Option<PathBuf>,
    /// Probabilistic simulation between two probabilistic automata.
    #[arg(long, num_args = 2, value_names = ["A", "B"])]
    leq: Option<Vec<PathBuf>>,
}

#[derive(Args)]
struct ProbArgs {
    #[command(flatten)]
    mode: ProbMode,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long)]
    dot: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    weak_bound: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RabinCheck {
    All,
    Theorems,
    Appendix,
    Atomicity,
    Paths,
}

#[derive(Args)]
struct RabinArgs {
    #[arg(long, default_value_t = 1)]
    bound: u32,
    #[arg(long, value_enum, default_value_t = RabinCheck::All)]
    check: RabinCheck,
    #[arg(long, default_value_t = 200_000)]
    cap: usize,
    /// Largest exponent for the `T_{m,n}` identities.
    #[arg(long, default_value_t = 2)]
    max_power: usize,
    /// Tourists as `place/notepad`, e.g. `c/0 m/0`.
    #[arg(long, num_args = 0.., default_values_t = ["c/0".to_string(), "m/0".to_string()])]
    tourists: Vec<String>,
    /// Initial church and museum boards (`0..=bound` or `here`).
    #[arg(long, num_args = 2, value_names = ["L", "R"], default_values_t = ["0".to_string(), "0".to_string()])]
    boards: Vec<String>,
    /// Write the first tourist's automaton as DOT.
    #[arg(long)]
    dot: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

/// A check ran to completion; `false` means it failed.
type Outcome = anyhow::Result<bool>;

fn read(path: &Path) -> anyhow::Result<Automaton> {
    io::read_automaton(path).with_context(|| format!("reading {}", path.display()))
}

fn pair(paths: &[PathBuf]) -> anyhow::Result<(Automaton, Automaton)> {
    Ok((read(&paths[0])?, read(&paths[1])?))
}

fn verdict(name: &str, ok: bool) -> bool {
    println!("{name}: {}", if ok { "holds" } else { "fails" });
    ok
}

fn compile_cmd(a: CompileArgs) -> Outcome {
    let (alphabet, term) = match (&a.file, &a.term) {
        (Some(file), None) => match &a.alphabet {
            Some(path) => {
                let al = load_alphabet(path)?;
                let text = fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
                let body: String = text
                    .lines()
                    .filter(|l| !l.trim_start().starts_with('%') && !l.trim_start().starts_with('#'))
                    .collect::<Vec<_>>()
                    .join("\n");
                let t = parse(&body, &al)?;
                (al, t)
            }
            None => {
                let tf = load_term_file(file).with_context(|| format!("reading {}", file.display()))?;
                (tf.alphabet, tf.term)
            }
        },
        (None, Some(text)) => {
            let Some(path) = &a.alphabet else {
                bail!("--term needs --alphabet");
            };
            let al = load_alphabet(path)?;
            let t = parse(text, &al)?;
            (al, t)
        }
        _ => bail!("give either a term file or --term"),
    };
    let m = compile(&term, &alphabet)?;
    info!("compiled {term}");
    println!("{} states, {} transitions, {} final", m.num_states(), m.num_transitions(), m.num_finals());
    match &a.output {
        Some(path) => io::write_automaton(path, &m)?,
        None => print!("{}", io::automaton_to_json(&m)),
    }
    if let Some(path) = &a.dot {
        fs::write(path, dot::automaton_to_dot(&m, &term.to_string()))?;
    }
    Ok(true)
}

fn load_alphabet(path: &Path) -> anyhow::Result<Arc<Alphabet>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(Arc::new(Alphabet::from_config(&text)?))
}

fn check_cmd(a: CheckArgs) -> Outcome {
    let m = a.mode;
    if let Some(path) = m.validate {
        // Reading already validates well-formedness.
        let p = read(&path)?;
        println!("{} states, {} transitions: well formed", p.num_states(), p.num_transitions());
        if let Some(why) = p_automaton_violation(&p) {
            println!("not a p-automaton: {why}");
        } else {
            println!("p-automaton");
        }
        return Ok(true);
    }
    if let Some(paths) = m.p_leq {
        let (p, q) = pair(&paths)?;
        for (name, x) in [("left", &p), ("right", &q)] {
            if !is_p_automaton(x) {
                bail!("{name} operand is not a p-automaton");
            }
        }
        return Ok(verdict("p_leq", p_leq(&p, &q)?));
    }
    let (paths, both) = match (m.leq, m.equiv) {
        (Some(p), _) => (p, false),
        (_, Some(p)) => (p, true),
        _ => unreachable!("clap enforces one mode"),
    };
    let (p, q) = pair(&paths)?;
    let forward = leq(&p, &q)?;
    let ok = if both {
        let backward = leq(&q, &p)?;
        println!("A <= B: {forward}\nB <= A: {backward}");
        verdict("equiv", forward && backward)
    } else {
        verdict("leq", forward)
    };
    if a.relation {
        let rel = greatest_simulation(&p, &q)?;
        println!("{}", serde_json::to_string(&rel)?);
    }
    if !ok {
        if !trace_leq(&p, &q)? {
            if let Some(t) = may_witness(&p, &q, 3)? {
                println!("witness test: {t}");
            }
        } else {
            println!("traces are included; the failure is in the branching structure");
        }
    }
    Ok(ok)
}

fn may_cmd(a: MayArgs) -> Outcome {
    let (p, q) = pair(&a.leq)?;
    let witness = may_witness(&p, &q, a.depth)?;
    let ok = verdict("may_leq", witness.is_none());
    if let Some(t) = witness {
        println!("witness test: {t}");
    }
    if a.traces {
        println!("trace_leq: {}", trace_leq(&p, &q)?);
    }
    Ok(ok)
}

fn traces_cmd(a: TracesArgs) -> Outcome {
    let p = read(&a.file)?;
    let lang = trace_language(&p);
    if a.dump {
        print!("{lang}");
    }
    let (limit, complete) = match p.longest_path() {
        Some(n) => (n, true),
        None => (a.max_len, false),
    };
    let words = lang.words(limit);
    if complete {
        println!("{} words:", words.len());
    } else {
        println!("{} words of length <= {limit} (cyclic, truncated):", words.len());
    }
    for w in &words {
        println!("  {}", lang.word_to_string(w));
    }
    Ok(true)
}

fn laws_cmd(a: LawsArgs) -> Outcome {
    let alphabet = match &a.alphabet {
        Some(path) => load_alphabet(path)?,
        None => laws::suite_alphabet(),
    };
    let exec = if a.sequential { Execution::Sequential } else { Execution::Parallel };
    let report = laws::run_suite(&alphabet, a.seed, a.trials, exec)?;
    let json = serde_json::to_string_pretty(&report)? + "\n";
    match a.format {
        Format::Text => print!("{}", report.to_text()),
        Format::Json => print!("{json}"),
    }
    if let Some(path) = &a.json {
        fs::write(path, &json)?;
    }
    Ok(report.passed)
}

fn prob_cmd(a: ProbArgs) -> Outcome {
    if let Some(path) = a.mode.epsilon {
        let p = read(&path)?;
        let e = epsilon(&p)?;
        println!("{} states, {} transitions", e.num_states(), e.num_transitions());
        match &a.output {
            Some(out) => io::write_prob(out, &e)?,
            None => print!("{}", io::prob_to_json(&e)),
        }
        if let Some(out) = &a.dot {
            fs::write(out, dot::prob_to_dot(&e, &path.display().to_string()))?;
        }
        return Ok(true);
    }
    let paths = a.mode.leq.expect("clap enforces one mode");
    let p = io::read_prob(&paths[0]).with_context(|| format!("reading {}", paths[0].display()))?;
    let q = io::read_prob(&paths[1]).with_context(|| format!("reading {}", paths[1].display()))?;
    Ok(verdict("prob_leq", prob_leq(&p, &q, a.weak_bound)?))
}

fn parse_value(s: &str) -> anyhow::Result<Value> {
    if s == "here" {
        return Ok(Value::Here);
    }
    Ok(Value::Num(s.parse().with_context(|| format!("invalid board value `{s}`"))?))
}

fn rabin_cmd(a: RabinArgs) -> Outcome {
    let tourists = a
        .tourists
        .iter()
        .map(|t| {
            let (place, k) = t.split_once('/').with_context(|| format!("expected place/notepad, got `{t}`"))?;
            Ok(Tourist {
                place: Place::parse(place).with_context(|| format!("unknown place `{place}`"))?,
                notepad: k.parse().with_context(|| format!("invalid notepad `{k}`"))?,
            })
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let cfg = RabinConfig {
        bound: a.bound,
        tourists,
        church: parse_value(&a.boards[0])?,
        museum: parse_value(&a.boards[1])?,
        cap: a.cap,
        ..RabinConfig::default()
    };
    let sys = rabin::build_system(&cfg)?;
    if let Some(path) = &a.dot {
        let Some(first) = sys.tourists.first() else {
            bail!("no tourist to draw");
        };
        fs::write(path, dot::automaton_to_dot(first, "P(alpha,k)"))?;
    }
    let full = rabin::RabinReport {
        config: cfg.clone(),
        tourist_states: sys.tourists.iter().map(Automaton::num_states).collect(),
        tourist_paths: sys.tourists.iter().map(rabin::tourist_paths).collect(),
        tourists_are_p_automata: sys.tourists.iter().all(is_p_automaton),
        places_write_once: rabin::place_writes_once(&sys.church) && rabin::place_writes_once(&sys.museum),
        theorems: rabin::check_theorems(&sys)?,
        appendix: if matches!(a.check, RabinCheck::All | RabinCheck::Appendix) {
            rabin::check_appendix_identities(&sys, a.max_power)?
        } else {
            rabin::AppendixReport { identities: Vec::new() }
        },
        atomicity: rabin::check_atomicity(&sys)?,
    };
    let ok = match a.check {
        RabinCheck::All => full.passed(),
        RabinCheck::Theorems => full.theorems.passed(),
        RabinCheck::Appendix => full.appendix.passed(),
        RabinCheck::Atomicity => full.atomicity.violations == 0,
        RabinCheck::Paths => full.tourist_paths.iter().all(rabin::PathReport::passed),
    };
    match a.format {
        Format::Text => print!("{}", full.to_text()),
        Format::Json => println!("{}", serde_json::to_string_pretty(&full)?),
    }
    Ok(ok)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Compile(a) => compile_cmd(a),
        Command::Check(a) => check_cmd(a),
        Command::May(a) => may_cmd(a),
        Command::Traces(a) => traces_cmd(a),
        Command::Laws(a) => laws_cmd(a),
        Command::Prob(a) => prob_cmd(a),
        Command::Rabin(a) => rabin_cmd(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
