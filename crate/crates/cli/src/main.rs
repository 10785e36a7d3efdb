use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use dynaut::afw::{afw_accepts, afw_stats, compile_afw, Stats};
use dynaut::bench::{bench, to_csv, Family};
use dynaut::export::{emit_asp_facts, emit_dot, emit_mona, locate_mona, mona_dfa, AutomatonView};
use dynaut::formula::{parse_formula, random_formula, Formula};
use dynaut::fsa::{
    afw_to_nfa, dfa_accepts, dfa_stats, distinguishing_trace, equivalent, minimize, nfa_accepts, nfa_to_dfa,
    shortest_witness,
};
use dynaut::semantics::{accepts_semantics, enumerate_traces, Trace};
use dynaut::traces::{filter_traces, read_traces, write_traces, Backend, TraceCorpus};

/// Compile LDLf/LTLf formulas to automata, check and filter traces.
#[derive(Parser)]
#[command(name = "dynaut", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a formula and export the chosen representation.
    Compile(CompileArgs),
    /// Print one verdict per trace.
    Check(CheckArgs),
    /// Write the accepted traces; a summary goes to standard error.
    Filter(FilterArgs),
    /// Decide emptiness; prints a shortest witness when there is one.
    Empty(FormulaArg),
    /// Decide language equivalence of two formulas.
    Equiv(EquivArgs),
    /// State and transition counts of the AFW and the minimal DFA.
    Stats(StatsArgs),
    /// Size and throughput table for a formula family, as CSV.
    Bench(BenchArgs),
    /// Compare the MONA-derived DFA with the internal one.
    Crosscheck(CrosscheckArgs),
    /// Run the randomized backend-agreement suite.
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct FormulaArg {
    /// Formula text, or `@path` to read it from a file.
    formula: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Afw,
    Nfa,
    Dfa,
    Mindfa,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Asp,
    Dot,
    Mona,
}

#[derive(Args)]
struct CompileArgs {
    #[command(flatten)]
    formula: FormulaArg,
    /// Representation to build. Not allowed with `--emit mona`, which
    /// translates the formula itself.
    #[arg(long)]
    to: Option<Target>,
    #[arg(long, default_value = "asp")]
    emit: Format,
    /// Output file instead of standard output.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Oracle,
    Afw,
    Dfa,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Oracle => Backend::Oracle,
            BackendArg::Afw => Backend::Afw,
            BackendArg::Dfa => Backend::Dfa,
        }
    }
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    formula: FormulaArg,
    /// Trace file, one JSON trace per line.
    traces: PathBuf,
    #[arg(long, default_value = "dfa")]
    backend: BackendArg,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct FilterArgs {
    #[command(flatten)]
    formula: FormulaArg,
    traces: PathBuf,
    #[arg(long, default_value = "dfa")]
    backend: BackendArg,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Also write the full report as JSON to this file.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct EquivArgs {
    left: String,
    right: String,
}

#[derive(Args)]
struct StatsArgs {
    #[command(flatten)]
    formula: FormulaArg,
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    #[arg(long)]
    csv: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    family: String,
    /// Largest depth; rows are produced for 1..=depth unless `--from` is given.
    #[arg(long)]
    depth: usize,
    #[arg(long, default_value_t = 1)]
    from: usize,
    /// Random traces checked per row.
    #[arg(long, default_value_t = 200)]
    traces: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CrosscheckArgs {
    #[command(flatten)]
    formula: FormulaArg,
    /// MONA binary; defaults to `$DYNAUT_MONA`.
    #[arg(long)]
    mona_bin: Option<PathBuf>,
}

#[derive(Args)]
struct SelftestArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    count: u64,
    #[arg(long, default_value_t = 3)]
    depth: usize,
    #[arg(long, default_value_t = 2)]
    atoms: usize,
    #[arg(long, default_value_t = 4)]
    max_len: usize,
}

enum Failure {
    Usage(String),
    Input(String),
    Negative,
    External(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Input(_) => 2,
            Failure::Negative => 3,
            Failure::External(_) => 4,
        }
    }
}

type Outcome = Result<(), Failure>;

fn input<E: std::fmt::Display>(context: &str) -> impl FnOnce(E) -> Failure + '_ {
    move |e| Failure::Input(format!("{context}: {e}"))
}

fn load_formula(arg: &str) -> Result<Formula, Failure> {
    let (text, origin) = match arg.strip_prefix('@') {
        Some(path) => (
            fs::read_to_string(path).map_err(input(path))?,
            path.to_string(),
        ),
        None => (arg.to_string(), "formula".to_string()),
    };
    parse_formula(text.trim()).map_err(input(&origin))
}

fn load_traces(path: &Path) -> Result<TraceCorpus, Failure> {
    let name = path.display().to_string();
    let file = fs::File::open(path).map_err(input(&name))?;
    read_traces(BufReader::new(file)).map_err(input(&name))
}

fn emit(output: Option<&Path>, text: &str) -> Outcome {
    match output {
        Some(path) => fs::write(path, text).map_err(input(&path.display().to_string())),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(input("standard output")),
    }
}

fn trace_json(t: &Trace) -> String {
    serde_json::to_string(t).expect("traces serialize")
}

fn compile(args: CompileArgs) -> Outcome {
    let f = load_formula(&args.formula.formula)?;
    if args.emit == Format::Mona {
        if args.to.is_some() {
            return Err(Failure::Usage("--to cannot be combined with --emit mona".into()));
        }
        return emit(args.output.as_deref(), &emit_mona(&f));
    }
    let afw = compile_afw(&f);
    let view = match args.to.unwrap_or(Target::Afw) {
        Target::Afw => AutomatonView::from(&afw),
        Target::Nfa => AutomatonView::from(&afw_to_nfa(&afw)),
        Target::Dfa => AutomatonView::from(&nfa_to_dfa(&afw_to_nfa(&afw))),
        Target::Mindfa => AutomatonView::from(&minimize(&nfa_to_dfa(&afw_to_nfa(&afw)))),
    };
    let text = match args.emit {
        Format::Asp => emit_asp_facts(&view),
        Format::Dot => emit_dot(&view),
        Format::Mona => unreachable!(),
    };
    emit(args.output.as_deref(), &text)
}

fn check(args: CheckArgs) -> Outcome {
    let f = load_formula(&args.formula.formula)?;
    let corpus = load_traces(&args.traces)?;
    let (kept, report) = filter_traces(&f, &corpus, args.backend.into(), args.jobs);
    let mut out = String::new();
    for v in &report.verdicts {
        out.push_str(&v.id);
        out.push('\t');
        out.push_str(if v.accepted { "accept" } else { "reject" });
        if let Some(k) = v.failure {
            out.push_str(&format!("\tfails at {k}"));
        }
        out.push('\n');
    }
    emit(None, &out)?;
    if kept.is_empty() {
        return Err(Failure::Negative);
    }
    Ok(())
}

fn filter(args: FilterArgs) -> Outcome {
    let f = load_formula(&args.formula.formula)?;
    let corpus = load_traces(&args.traces)?;
    let (kept, report) = filter_traces(&f, &corpus, args.backend.into(), args.jobs);
    let mut buf = Vec::new();
    write_traces(&kept, &mut buf).map_err(input("output"))?;
    emit(args.output.as_deref(), &String::from_utf8(buf).expect("traces are UTF-8"))?;
    if let Some(path) = &args.report {
        let json = serde_json::to_string_pretty(&report).expect("reports serialize");
        fs::write(path, json + "\n").map_err(input(&path.display().to_string()))?;
    }
    eprintln!("{}", report.summary());
    if kept.is_empty() {
        return Err(Failure::Negative);
    }
    Ok(())
}

fn min_dfa(f: &Formula) -> dynaut::fsa::Dfa {
    minimize(&nfa_to_dfa(&afw_to_nfa(&compile_afw(f))))
}

fn empty(args: FormulaArg) -> Outcome {
    let f = load_formula(&args.formula)?;
    match shortest_witness(&min_dfa(&f)) {
        Some(w) => emit(None, &format!("witness {}\n", trace_json(&w))),
        None => {
            emit(None, "language is empty\n")?;
            Err(Failure::Negative)
        }
    }
}

fn equiv(args: EquivArgs) -> Outcome {
    let left = load_formula(&args.left)?;
    let right = load_formula(&args.right)?;
    match distinguishing_trace(&min_dfa(&left), &min_dfa(&right)) {
        None => emit(None, "equivalent\n"),
        Some(t) => {
            let side = if accepts_semantics(&left, &t) { "first" } else { "second" };
            emit(
                None,
                &format!("not equivalent\ncounterexample {} (accepted by the {side} formula only)\n", trace_json(&t)),
            )?;
            Err(Failure::Negative)
        }
    }
}

fn stats(args: StatsArgs) -> Outcome {
    let f = load_formula(&args.formula.formula)?;
    let afw = compile_afw(&f);
    let min = minimize(&nfa_to_dfa(&afw_to_nfa(&afw)));
    let rows: [(&str, Stats); 2] = [("afw", afw_stats(&afw)), ("mindfa", dfa_stats(&min))];
    let text = if args.json {
        let map: serde_json::Map<String, serde_json::Value> = rows
            .iter()
            .map(|(k, s)| (k.to_string(), serde_json::to_value(s).expect("stats serialize")))
            .collect();
        serde_json::to_string_pretty(&map).expect("stats serialize") + "\n"
    } else if args.csv {
        let mut out = String::from("automaton,states,transitions,max_successors,alphabet\n");
        for (k, s) in rows {
            out.push_str(&format!("{k},{},{},{},{}\n", s.states, s.transitions, s.max_successors, s.alphabet));
        }
        out
    } else {
        let mut out = format!("{:<12}{:>10}{:>10}\n", "", "afw", "mindfa");
        let (a, d) = (rows[0].1, rows[1].1);
        for (name, x, y) in [
            ("states", a.states, d.states),
            ("transitions", a.transitions, d.transitions),
            ("max succ", a.max_successors, d.max_successors),
            ("alphabet", a.alphabet, d.alphabet),
        ] {
            out.push_str(&format!("{name:<12}{x:>10}{y:>10}\n"));
        }
        out
    };
    emit(None, &text)
}

fn run_bench(args: BenchArgs) -> Outcome {
    let family: Family = args.family.parse().map_err(Failure::Usage)?;
    if args.from == 0 || args.from > args.depth {
        return Err(Failure::Usage("need 1 <= --from <= --depth".into()));
    }
    let rows = bench(family, args.from..=args.depth, args.seed, args.traces);
    emit(args.output.as_deref(), &to_csv(&rows))
}

fn crosscheck(args: CrosscheckArgs) -> Outcome {
    let f = load_formula(&args.formula.formula)?;
    let Some(bin) = locate_mona(args.mona_bin.as_deref()) else {
        return Err(Failure::External("no MONA binary: pass --mona-bin or set DYNAUT_MONA".into()));
    };
    let theirs = mona_dfa(&bin, &f).map_err(|e| Failure::External(e.to_string()))?;
    let ours = min_dfa(&f);
    if equivalent(&theirs, &ours) {
        emit(None, "equivalent\n")
    } else {
        let t = distinguishing_trace(&theirs, &ours).expect("inequivalent automata differ somewhere");
        emit(None, &format!("not equivalent\ncounterexample {}\n", trace_json(&t)))?;
        Err(Failure::Negative)
    }
}

fn selftest(args: SelftestArgs) -> Outcome {
    if args.atoms == 0 || args.atoms > 4 || args.max_len == 0 {
        return Err(Failure::Usage("need 1 <= --atoms <= 4 and --max-len >= 1".into()));
    }
    let atoms: Vec<String> = (0..args.atoms).map(|k| ((b'a' + k as u8) as char).to_string()).collect();
    let traces: Vec<Trace> = enumerate_traces(&atoms, args.max_len).collect();
    let mut mismatches = 0;
    for seed in args.seed..args.seed + args.count {
        let f = random_formula(seed, args.depth, &atoms);
        let afw = compile_afw(&f);
        let nfa = afw_to_nfa(&afw);
        let dfa = nfa_to_dfa(&nfa);
        let min = minimize(&dfa);
        for t in &traces {
            let oracle = accepts_semantics(&f, t);
            let verdicts = [afw_accepts(&afw, t), nfa_accepts(&nfa, t), dfa_accepts(&dfa, t), dfa_accepts(&min, t)];
            if verdicts.iter().any(|&v| v != oracle) {
                mismatches += 1;
                eprintln!("mismatch: seed {seed}: {f} on {t}");
            }
        }
    }
    emit(
        None,
        &format!("{} formulas x {} traces, {mismatches} mismatches\n", args.count, traces.len()),
    )?;
    if mismatches > 0 {
        return Err(Failure::Negative);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Compile(a) => compile(a),
        Command::Check(a) => check(a),
        Command::Filter(a) => filter(a),
        Command::Empty(a) => empty(a),
        Command::Equiv(a) => equiv(a),
        Command::Stats(a) => stats(a),
        Command::Bench(a) => run_bench(a),
        Command::Crosscheck(a) => crosscheck(a),
        Command::Selftest(a) => selftest(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Usage(m) | Failure::Input(m) | Failure::External(m) => eprintln!("error: {m}"),
                Failure::Negative => {}
            }
            ExitCode::from(failure.code())
        }
    }
}
