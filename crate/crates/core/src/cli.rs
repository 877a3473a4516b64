//! The `desv` command line.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{ArgGroup, Args, Parser, Subcommand};

use crate::artifact::{build_artifact, Artifact};
use crate::automaton::AnnotatedModel;
use crate::io::{export_dot, parse_model, serialize_model, Timing, VerdictDocument};
use crate::oracle::{bounded_definitional_search, random_lfsa, GeneratorParams, PropertyInstance};
use crate::verify::{verify, PropertyKind, Verdict};
use crate::witness::{projections, PairPath, PairStep, Step, Witness};

#[derive(Parser, Debug)]
#[command(name = "desv", version, about = "Property verification for labeled finite-state automata")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide a property; exit 0 if it holds, 1 if not.
    Verify(VerifyArgs),
    /// Write a derived automaton as DOT, or as JSON when the path ends in `.json`.
    Build(BuildArgs),
    /// Bounded search for a counterexample, straight from the definitions.
    Oracle(OracleArgs),
    /// Print a random model.
    Gen(GenArgs),
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("which").required(true).args(["property", "all_properties"])))]
struct VerifyArgs {
    model: PathBuf,
    #[arg(long)]
    property: Option<PropertyKind>,
    /// Every property, checked in parallel. K-step notions need `--k`.
    #[arg(long)]
    all_properties: bool,
    #[arg(long)]
    k: Option<u64>,
    #[arg(long)]
    json: bool,
    /// Include wall-clock time in the output.
    #[arg(long)]
    timing: bool,
}

#[derive(Args, Debug)]
struct BuildArgs {
    model: PathBuf,
    #[arg(long, value_enum)]
    artifact: Artifact,
    /// Fault event for the legacy constructions.
    #[arg(long)]
    fault: Option<String>,
    /// Output path; DOT on stdout when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct OracleArgs {
    model: PathBuf,
    #[arg(long)]
    property: PropertyKind,
    #[arg(long)]
    k: Option<u64>,
    #[arg(long)]
    bound: usize,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long)]
    states: usize,
    #[arg(long)]
    events: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    live: bool,
    #[arg(long)]
    divergence_free: bool,
    /// Injective labels, one initial state and a single unobservable fault.
    #[arg(long)]
    appendix_scope: bool,
    #[arg(long, default_value_t = 1)]
    initial: usize,
    #[arg(long, default_value_t = 0.6)]
    observable_fraction: f64,
    #[arg(long, default_value_t = 0.12)]
    density: f64,
    #[arg(long, default_value_t = 0.3)]
    secret_density: f64,
    #[arg(long, default_value_t = 0.2)]
    fault_density: f64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

/// A usage or input problem: exit code 2.
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let result = match cli.command {
        Command::Verify(a) => run_verify(a, out),
        Command::Build(a) => run_build(a, out),
        Command::Oracle(a) => run_oracle(a, out),
        Command::Gen(a) => run_gen(a, out),
    };
    match result {
        Ok(code) => code,
        Err(Failure(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

fn load(path: &Path) -> Result<AnnotatedModel, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    parse_model(&text).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes())?;
    Ok(())
}

fn run_verify(a: VerifyArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let model = load(&a.model)?;
    let kinds: Vec<PropertyKind> = match a.property {
        Some(p) => vec![p],
        None => PropertyKind::ALL
            .into_iter()
            .filter(|p| !p.needs_k() || a.k.is_some())
            .collect(),
    };
    let single = a.property.is_some();
    let check = |kind: PropertyKind| {
        let k = if single || kind.needs_k() { a.k } else { None };
        let start = Instant::now();
        let v = verify(&model, kind, k);
        v.map(|v| {
            let t = Timing {
                elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
            };
            (v, t)
        })
    };
    let results: Vec<_> = if single {
        kinds.iter().map(|&k| check(k)).collect()
    } else {
        std::thread::scope(|s| {
            let handles: Vec<_> = kinds.iter().map(|&k| s.spawn(move || check(k))).collect();
            handles.into_iter().map(|h| h.join().expect("verifier thread")).collect()
        })
    };
    let mut verdicts = Vec::new();
    for r in results {
        verdicts.push(r?);
    }
    let docs: Vec<VerdictDocument> = verdicts
        .iter()
        .map(|(v, t)| v.to_document(&model, a.timing.then(|| t.clone())))
        .collect();
    if a.json {
        if single {
            emit(out, &docs[0].to_json())?;
        } else {
            let mut s = serde_json::to_string_pretty(&docs)?;
            s.push('\n');
            emit(out, &s)?;
        }
    } else {
        for (v, t) in &verdicts {
            emit(out, &render_verdict(&model, v, a.timing.then_some(t)))?;
        }
    }
    Ok(if verdicts.iter().all(|(v, _)| v.holds) { 0 } else { 1 })
}

fn render_verdict(model: &AnnotatedModel, v: &Verdict, timing: Option<&Timing>) -> String {
    let m = &model.lfsa;
    let mut s = String::new();
    writeln!(s, "{}: {}", v.property, if v.holds { "holds" } else { "fails" }).unwrap();
    if let (Some(k), Some(eff)) = (v.k, v.effective_k) {
        writeln!(s, "  k = {k} (effective {eff})").unwrap();
    }
    if v.property.uses_faults() {
        let f: Vec<&str> = model.faults.events().map(|e| m.event_name(e)).collect();
        writeln!(s, "  faults: {{{}}}", f.join(",")).unwrap();
    }
    if v.property.uses_secrets() {
        let q: Vec<&str> = model.secrets.states().iter().map(|q| m.state_name(q)).collect();
        writeln!(s, "  secrets: {{{}}}", q.join(",")).unwrap();
    }
    if v.observer_states > 0 {
        writeln!(s, "  observer states: {}", v.observer_states).unwrap();
    }
    writeln!(s, "  product states: {}", v.product_states).unwrap();
    if let Some(t) = timing {
        writeln!(s, "  elapsed: {:.3} ms", t.elapsed_ms).unwrap();
    }
    if let Some(w) = &v.witness {
        s.push_str(&render_witness(w));
    }
    s
}

fn pair_steps(s: &mut String, title: &str, steps: &[PairStep]) {
    if steps.is_empty() {
        return;
    }
    writeln!(s, "    {title}:").unwrap();
    for st in steps {
        writeln!(
            s,
            "      ({},{}) -> ({},{})",
            st.left.as_deref().unwrap_or("-"),
            st.right.as_deref().unwrap_or("-"),
            st.to.left,
            st.to.right
        )
        .unwrap();
    }
}

fn start(s: &mut String, p: &PairPath) {
    writeln!(s, "    start: ({},{})", p.start.left, p.start.right).unwrap();
}

fn plain_steps(s: &mut String, title: &str, from: Option<&str>, steps: &[Step]) {
    let mut line = format!("    {title}:");
    if let Some(q) = from {
        write!(line, " {q}").unwrap();
    }
    for st in steps {
        write!(line, " -{}-> {}", st.event, st.to).unwrap();
    }
    writeln!(s, "{line}").unwrap();
}

fn projection_lines(s: &mut String, parts: &[&[PairStep]]) {
    let all: Vec<PairStep> = parts.iter().flat_map(|p| p.iter().cloned()).collect();
    let (l, r) = projections(&all);
    writeln!(s, "    left projection:  {}", l.join(" ")).unwrap();
    writeln!(s, "    right projection: {}", r.join(" ")).unwrap();
}

fn set(x: &[String]) -> String {
    if x.is_empty() {
        "∅".to_string()
    } else {
        format!("{{{}}}", x.join(","))
    }
}

fn render_witness(w: &Witness) -> String {
    let mut s = String::from("  witness:\n");
    match w {
        Witness::Detectability(d) => {
            start(&mut s, &d.prefix);
            pair_steps(&mut s, "prefix", &d.prefix.steps);
            pair_steps(&mut s, "cycle", &d.cycle);
            pair_steps(&mut s, "suffix", &d.suffix);
            projection_lines(&mut s, &[&d.prefix.steps, &d.cycle, &d.suffix]);
            if let (Some(stem), Some(cycle)) = (&d.tail_stem, &d.tail_cycle) {
                plain_steps(&mut s, "tail stem", Some(&d.prefix.end().left), stem);
                plain_steps(&mut s, "tail cycle", None, cycle);
            }
            writeln!(s, "    pump past: {}", d.pump).unwrap();
        }
        Witness::Diagnosability(d) => {
            start(&mut s, &d.prefix);
            pair_steps(&mut s, "prefix", &d.prefix.steps);
            pair_steps(&mut s, "fault", std::slice::from_ref(&d.fault));
            pair_steps(&mut s, "connector", &d.connector);
            pair_steps(&mut s, "cycle", &d.cycle);
            projection_lines(&mut s, &[&d.prefix.steps, std::slice::from_ref(&d.fault), &d.connector, &d.cycle]);
            writeln!(s, "    pump past: {}", d.pump).unwrap();
        }
        Witness::Predictability(p) => {
            start(&mut s, &p.prefix);
            pair_steps(&mut s, "prefix", &p.prefix.steps);
            projection_lines(&mut s, &[&p.prefix.steps]);
            plain_steps(&mut s, "fault", Some(&p.prefix.end().left), std::slice::from_ref(&p.fault));
            plain_steps(&mut s, "stem", Some(&p.prefix.end().right), &p.stem);
            plain_steps(&mut s, "cycle", None, &p.cycle);
            writeln!(s, "    pump past: {}", p.pump).unwrap();
        }
        Witness::Opacity(o) => {
            writeln!(s, "    observation: {}", o.observation.join(" ")).unwrap();
            plain_steps(&mut s, "run", Some(&o.run.start), &o.run.steps);
            if let (Some(i), Some(split)) = (o.secret_index, o.split) {
                writeln!(
                    s,
                    "    secret {} visited after {split} observed symbols",
                    o.run.states()[i]
                )
                .unwrap();
            }
            if let Some(t) = &o.trace_start {
                writeln!(s, "    estimate trace:").unwrap();
                writeln!(s, "      ({},{})", t.state, set(&t.estimate)).unwrap();
                for st in &o.trace {
                    writeln!(
                        s,
                        "      -{}-> ({},{})",
                        st.label.as_deref().unwrap_or("ε"),
                        st.to.state,
                        set(&st.to.estimate)
                    )
                    .unwrap();
                }
            }
        }
        Witness::TaggedCycle(t) => {
            writeln!(s, "    method: {}", t.method).unwrap();
            writeln!(s, "    path: {}", t.path.join(" -> ")).unwrap();
            writeln!(s, "    cycle: {}", t.cycle.join(" -> ")).unwrap();
        }
        Witness::Counterexample(c) => {
            writeln!(s, "    sequence: {}", c.sequence.join(" ")).unwrap();
            if let Some((at, len)) = c.pump {
                writeln!(s, "    repeatable segment: {len} symbols from position {at}").unwrap();
            }
            if let Some(split) = c.split {
                writeln!(s, "    split after {split} symbols").unwrap();
            }
            writeln!(s, "    {}", c.note).unwrap();
        }
    }
    s
}

fn run_build(a: BuildArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let model = load(&a.model)?;
    let view = build_artifact(&model, a.artifact, a.fault.as_deref())?;
    match &a.output {
        None => emit(out, &export_dot(&view))?,
        Some(path) => {
            let text = if path.extension().is_some_and(|e| e == "json") {
                view.to_json()
            } else {
                export_dot(&view)
            };
            std::fs::write(path, text).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
        }
    }
    Ok(0)
}

fn run_oracle(a: OracleArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let model = load(&a.model)?;
    if a.k.is_some() && !a.property.needs_k() {
        return Err(Failure(format!("{} does not take a step bound", a.property)));
    }
    let inst = PropertyInstance {
        property: a.property,
        k: a.k,
    };
    let found = bounded_definitional_search(&model, inst, a.bound)?;
    if a.json {
        let w = found.clone().map(Witness::Counterexample);
        let mut s = serde_json::to_string_pretty(&w)?;
        s.push('\n');
        emit(out, &s)?;
    } else {
        match &found {
            None => emit(
                out,
                &format!(
                    "{}: no counterexample of length at most {} (evidence, not proof)\n",
                    a.property, a.bound
                ),
            )?,
            Some(c) => emit(
                out,
                &format!(
                    "{}: counterexample found\n{}",
                    a.property,
                    render_witness(&Witness::Counterexample(c.clone()))
                ),
            )?,
        }
    }
    Ok(if found.is_some() { 1 } else { 0 })
}

fn run_gen(a: GenArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let mut p = GeneratorParams::new(a.states, a.events, a.seed);
    p.live = a.live;
    p.divergence_free = a.divergence_free;
    p.appendix_scope = a.appendix_scope;
    p.initial = a.initial;
    p.observable_fraction = a.observable_fraction;
    p.density = a.density;
    p.secret_density = a.secret_density;
    p.fault_density = a.fault_density;
    let text = serialize_model(&random_lfsa(&p)?);
    match &a.output {
        None => emit(out, &text)?,
        Some(path) => std::fs::write(path, text).map_err(|e| Failure(format!("{}: {e}", path.display())))?,
    }
    Ok(0)
}
