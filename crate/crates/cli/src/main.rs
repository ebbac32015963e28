use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use partm::axioms::check::{model_check_window, AxiomStatus, TraceModel};
use partm::axioms::text::{serialize_theory, Format as TheoryFormat};
use partm::axioms::witness::contradiction_witness;
use partm::axioms::{emit_theory, Variant};
use partm::classical::{dtm_run, ndtm_run_all, ClassicalError};
use partm::entangled::{epartm_run_with, StepOptions, Superposition};
use partm::paraconsistent::{partm_run, ParConfig};
use partm::problems::oracle::{self, OracleFragment};
use partm::problems::{
    build_deutsch, build_deutsch_jozsa, check_parallelizable, classify, random_cnf, run_csat, Cnf, Construction,
};
use partm::track::{compile_partm_to_dtm, simulate_and_compare, CompileOptions};
use partm::{fixtures, json as pjson, modal, parse_machine, serialize, validate, Machine, SymbolId};

mod render;

#[derive(Parser)]
#[command(name = "partm", version, about = "Paraconsistent Turing machine toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a machine under one of the four semantics.
    Run(RunArgs),
    /// Emit the first-order theory of a machine on an input.
    Axioms(AxiomsArgs),
    /// Check a run against its FOL theory.
    CheckModel(MachineArgs),
    /// Find a contradiction caused by an ambiguous configuration.
    Witness(MachineArgs),
    /// Compile to a multi-track DTM and compare it with the paraconsistent run.
    CompileDtm(CompileArgs),
    /// Verify the modal connective catalog.
    ModalCheck(FormatArg),
    /// Deutsch's problem for a one-bit oracle.
    Deutsch(DeutschArgs),
    /// Deutsch-Jozsa for an n-bit oracle.
    Dj(DjArgs),
    /// Decide a CNF formula with the entangled semantics.
    Csat(CsatArgs),
    /// Compare an oracle's superposed run with its classical runs.
    Parallelizable(DjArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Semantics {
    Dtm,
    Ndtm,
    Partm,
    Epartm,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutFormat {
    Text,
    Json,
}

#[derive(Args)]
struct FormatArg {
    #[arg(long, value_enum, default_value = "text")]
    format: OutFormat,
}

#[derive(Args)]
struct MachineArgs {
    /// Machine file in the DSL, or `@name` for a bundled fixture.
    machine: String,
    /// Input string; defaults to the fixture's input or the empty tape.
    #[arg(long)]
    input: Option<String>,
    #[arg(long, env = "PARTM_MAX_STEPS", default_value_t = 1000)]
    max_steps: usize,
    #[arg(long, value_enum, default_value = "text")]
    format: OutFormat,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: MachineArgs,
    #[arg(long, value_enum, default_value = "partm")]
    semantics: Semantics,
    /// Merge equal configurations in the entangled semantics.
    #[arg(long)]
    merge_duplicates: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Fol,
    Lfi1,
    S5,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TheoryFormatArg {
    Text,
    Structured,
}

#[derive(Args)]
struct AxiomsArgs {
    machine: String,
    #[arg(long)]
    input: Option<String>,
    #[arg(long, value_enum, default_value = "fol")]
    variant: VariantArg,
    #[arg(long, value_enum, default_value = "text")]
    format: TheoryFormatArg,
}

#[derive(Args)]
struct CompileArgs {
    #[command(flatten)]
    common: MachineArgs,
    /// Source steps to simulate.
    #[arg(long, default_value_t = 20)]
    steps: usize,
    /// Append the sweep that looks for the accepting state.
    #[arg(long)]
    acceptance_scan: bool,
    /// Print the explored part of the compiled machine instead of the report.
    #[arg(long)]
    emit_dtm: bool,
}

#[derive(Args)]
struct DeutschArgs {
    /// const0, const1, identity, negation, example1 or anomaly.
    #[arg(long, default_value = "identity")]
    oracle: String,
    #[arg(long, env = "PARTM_MAX_STEPS", default_value_t = 1000)]
    max_steps: usize,
    #[arg(long, value_enum, default_value = "text")]
    format: OutFormat,
}

#[derive(Args)]
struct DjArgs {
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// const0, const1, identity, negation, proj:K, neg:K, table:BITS,
    /// example1 or anomaly.
    #[arg(long, default_value = "const0")]
    oracle: String,
    #[arg(long, env = "PARTM_MAX_STEPS", default_value_t = 1000)]
    max_steps: usize,
    #[arg(long, value_enum, default_value = "text")]
    format: OutFormat,
}

#[derive(Args)]
struct CsatArgs {
    /// DIMACS file.
    #[arg(required_unless_present = "random")]
    file: Option<PathBuf>,
    /// Generate a random formula instead of reading one.
    #[arg(long, conflicts_with = "file")]
    random: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    vars: usize,
    #[arg(long, default_value_t = 4)]
    clauses: usize,
    #[arg(long, env = "PARTM_MAX_STEPS", default_value_t = 1000)]
    max_steps: usize,
    #[arg(long, value_enum, default_value = "text")]
    format: OutFormat,
}

/// Why a command did not succeed. `Domain` exits with 1, `Usage` with 2;
/// both carry a JSON diagnostic for stderr.
enum Failure {
    Domain(Value),
    Usage(Value),
}

type Outcome = Result<(), Failure>;

fn diag(kind: &str, message: impl ToString) -> Value {
    json!({"error": kind, "message": message.to_string()})
}

fn domain(kind: &str, message: impl ToString) -> Failure {
    Failure::Domain(diag(kind, message))
}

fn usage(kind: &str, message: impl ToString) -> Failure {
    Failure::Usage(diag(kind, message))
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("values serialize"));
}

/// Loads a machine and picks the input: explicit, the fixture default, or
/// empty.
fn load(spec: &str, input: Option<&str>) -> Result<(Machine, Vec<SymbolId>), Failure> {
    let (m, default) = if let Some(name) = spec.strip_prefix('@') {
        let src = fixtures::source(name).ok_or_else(|| {
            let known: Vec<&str> = fixtures::names().collect();
            usage("unknown-fixture", format!("no fixture {name}; known: {}", known.join(", ")))
        })?;
        (parse_machine(src).expect("bundled fixtures parse"), fixtures::default_input(name))
    } else {
        let src = std::fs::read_to_string(spec).map_err(|e| usage("io", format!("{spec}: {e}")))?;
        (parse_machine(&src).map_err(|e| domain("parse", e))?, None)
    };
    let text = input.or(default).unwrap_or("");
    let input = m.parse_input(text).map_err(|e| usage("input", e))?;
    Ok((m, input))
}

fn classical_failure(m: &Machine, e: ClassicalError) -> Failure {
    let report = validate(m);
    let groups: Vec<Vec<usize>> = report.ambiguous_groups.iter().map(|g| g.iter().map(|k| k + 1).collect()).collect();
    let mut v = diag("precondition", e);
    v["ambiguous_groups"] = json!(groups);
    v["uses_incons_marks"] = json!(report.uses_incons_marks);
    Failure::Usage(v)
}

fn cmd_run(a: RunArgs) -> Outcome {
    let (m, input) = load(&a.common.machine, a.common.input.as_deref())?;
    let steps = a.common.max_steps;
    let json = a.common.format == OutFormat::Json;
    match a.semantics {
        Semantics::Dtm => {
            let tr = dtm_run(&m, &input, steps).map_err(|e| classical_failure(&m, e))?;
            if json {
                print_json(&pjson::trace(&m, &tr));
            } else {
                print!("{}", render::trace(&m, &tr));
            }
        }
        Semantics::Ndtm => {
            let tree = ndtm_run_all(&m, &input, steps).map_err(|e| classical_failure(&m, e))?;
            if json {
                print_json(&pjson::tree(&m, &tree));
            } else {
                print!("{}", render::tree(&m, &tree));
            }
        }
        Semantics::Partm => {
            let tr = partm_run(&m, &input, steps);
            if json {
                print_json(&pjson::par_trace(&m, &tr));
            } else {
                print!("{}", render::par_trace(&m, &tr));
            }
        }
        Semantics::Epartm => {
            let opts = StepOptions { merge_duplicates: a.merge_duplicates };
            let tr = epartm_run_with(&m, Superposition::initial(&m, &input), steps, opts);
            if json {
                print_json(&pjson::epar_trace(&m, &tr));
            } else {
                print!("{}", render::epar_trace(&m, &tr));
            }
        }
    }
    Ok(())
}

fn cmd_axioms(a: AxiomsArgs) -> Outcome {
    let (m, input) = load(&a.machine, a.input.as_deref())?;
    let variant = match a.variant {
        VariantArg::Fol => Variant::Fol,
        VariantArg::Lfi1 => Variant::Lfi1,
        VariantArg::S5 => Variant::S5,
    };
    let format = match a.format {
        TheoryFormatArg::Text => TheoryFormat::Text,
        TheoryFormatArg::Structured => TheoryFormat::Structured,
    };
    print!("{}", serialize_theory(&emit_theory(&m, &input, variant), format));
    Ok(())
}

fn cmd_check_model(a: MachineArgs) -> Outcome {
    let (m, input) = load(&a.machine, a.input.as_deref())?;
    let theory = emit_theory(&m, &input, Variant::Fol);
    let model = if validate(&m).deterministic && !m.has_marks() {
        let tr = dtm_run(&m, &input, a.max_steps).map_err(|e| classical_failure(&m, e))?;
        TraceModel::from_trace(&m, &tr)
    } else {
        TraceModel::from_par_trace(&m, &partm_run(&m, &input, a.max_steps))
    };
    let report = model_check_window(&theory, &model, model.window()).map_err(|e| domain("check", e))?;
    if a.format == OutFormat::Json {
        print_json(&json!({
            "axioms": report.results.len(),
            "last_time": model.last_time,
            "complete": model.complete,
            "results": report.to_json(),
        }));
    } else {
        for (id, st) in &report.results {
            let line = match st {
                AxiomStatus::Pass => "pass".to_owned(),
                AxiomStatus::Fail { instance } => {
                    format!("FAIL at {}", partm::axioms::check::describe_instance(instance))
                }
                AxiomStatus::Partial { instance } => {
                    format!("undecided at {}", partm::axioms::check::describe_instance(instance))
                }
            };
            println!("{id:<8} {line}");
        }
    }
    let failures = report.failures();
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Domain(json!({"error": "model-check", "failed": failures})))
    }
}

fn cmd_witness(a: MachineArgs) -> Outcome {
    let (m, input) = load(&a.machine, a.input.as_deref())?;
    let search = contradiction_witness(&m, &input, a.max_steps);
    if a.format == OutFormat::Json {
        print_json(&json!({
            "witness": search.witness.as_ref().map(|w| w.to_json()),
            "steps": search.steps,
            "truncated": search.truncated,
        }));
    } else {
        match &search.witness {
            Some(w) => {
                println!("{}  and  not({})  at t={}, x={}", w.atom, w.atom, w.time, w.position);
                println!(
                    "  {} derives {} (i{}); {} with {} (i{}) derives the negation",
                    w.producing_axiom,
                    w.atom,
                    w.instructions[1] + 1,
                    w.uniqueness_axiom,
                    w.premise,
                    w.instructions[0] + 1
                );
                println!("  certified: {}", w.certified);
            }
            None if search.truncated => println!("no witness within {} steps", search.steps),
            None => println!("no witness: the run halts after {} steps without ambiguity", search.steps),
        }
    }
    Ok(())
}

fn cmd_compile(a: CompileArgs) -> Outcome {
    let (m, input) = load(&a.common.machine, a.common.input.as_deref())?;
    let opts = CompileOptions { acceptance_scan: a.acceptance_scan, ..CompileOptions::default() };
    if a.emit_dtm {
        let mut dtm = compile_partm_to_dtm(&m, opts).map_err(|e| domain("compile", e))?;
        let (_, mut cfg) = dtm.encode(&ParConfig::initial(&m, &input)).map_err(|e| domain("compile", e))?;
        let names = dtm.to_machine();
        let (lo, hi) = cfg.span();
        let encoded: Vec<String> = (lo..=hi).map(|x| names.symbol_name(cfg.read(x, dtm.blank())).to_owned()).collect();
        let mut cycles = 0;
        while cycles < a.steps {
            match dtm.step(&mut cfg).map_err(|e| domain("compile", e))? {
                None => break,
                Some(_) if dtm.is_cycle_start(cfg.state) => cycles += 1,
                Some(_) => {}
            }
        }
        println!("# encoded input: {}", encoded.join(" "));
        print!("{}", serialize(&dtm.to_machine()));
        return Ok(());
    }
    let r = simulate_and_compare(&m, &input, a.steps, opts).map_err(|e| domain("compile", e))?;
    if a.common.format == OutFormat::Json {
        print_json(&pjson::equivalence(&r));
    } else {
        println!("tracks: {}  control states: {}  tuple symbols: {}", r.tracks, r.control_states, r.tuple_symbols);
        println!("cycles compared: {}  all matched: {}", r.matched.len(), r.all_matched());
        println!("steps per cycle: {:?}", r.steps_per_cycle);
        println!("fit: steps(t) <= {}*t + {}  cumulative <= {:.3}*t^2", r.fit_c, r.fit_d, r.quadratic_c);
        println!("total steps: {}  source halted: {}", r.total_steps(), r.source_halted);
        if let Some(v) = r.verdict {
            println!("verdict: {}", if v { "accept" } else { "reject" });
        }
    }
    if r.all_matched() && r.materialized_agrees {
        Ok(())
    } else {
        Err(Failure::Domain(json!({"error": "mismatch", "first_mismatch": r.first_mismatch})))
    }
}

fn cmd_modal(a: FormatArg) -> Outcome {
    let report = modal::catalog();
    if a.format == OutFormat::Json {
        print_json(&report.to_json());
    } else {
        for e in &report.entries {
            let claim = match e.claim {
                modal::Claim::Valid => "valid",
                modal::Claim::Invalid => "invalid",
            };
            let status = if e.passed { "ok" } else { "FAILED" };
            println!("{:<28} {claim:<8} {status:<6} {}", e.id, e.formula);
        }
    }
    modal::check_catalog().map(|_| ()).map_err(|e| domain("catalog", e))
}

/// Parses an oracle name for arity `n`.
fn parse_oracle(spec: &str, n: usize) -> Result<OracleFragment, Failure> {
    let bad = |msg: String| usage("oracle", msg);
    let index = |k: &str| -> Result<usize, Failure> {
        let k: usize = k.parse().map_err(|_| bad(format!("bad index {k}")))?;
        if k >= n {
            return Err(bad(format!("index {k} out of range for n = {n}")));
        }
        Ok(k)
    };
    let one_bit = |o: OracleFragment| {
        if n == 1 {
            Ok(o)
        } else {
            Err(bad(format!("{spec} is a one-bit oracle")))
        }
    };
    if n == 0 {
        return Err(bad("n must be at least 1".into()));
    }
    match spec {
        "const0" => Ok(oracle::constant(n, 0)),
        "const1" => Ok(oracle::constant(n, 1)),
        "identity" => one_bit(oracle::projection(1, 0, false)),
        "negation" => one_bit(oracle::projection(1, 0, true)),
        "example1" => one_bit(oracle::example1_constant_one()),
        "anomaly" => one_bit(oracle::anomaly()),
        _ => {
            if let Some(k) = spec.strip_prefix("proj:") {
                Ok(oracle::projection(n, index(k)?, false))
            } else if let Some(k) = spec.strip_prefix("neg:") {
                Ok(oracle::projection(n, index(k)?, true))
            } else if let Some(bits) = spec.strip_prefix("table:") {
                let table: Vec<u8> = bits
                    .chars()
                    .map(|c| match c {
                        '0' => Ok(0),
                        '1' => Ok(1),
                        _ => Err(bad(format!("bad table digit {c}"))),
                    })
                    .collect::<Result<_, _>>()?;
                oracle::truth_table(n, &table).map_err(|e| bad(e.to_string()))
            } else {
                Err(bad(format!("unknown oracle {spec}")))
            }
        }
    }
}

/// Runs a construction and, for parallelizable oracles, compares the
/// verdict with the classical classification of the truth table.
fn report_construction(o: &OracleFragment, c: &Construction, max_steps: usize, format: OutFormat) -> Outcome {
    let table = o.validate().map_err(|e| domain("oracle", e))?;
    let parallel = check_parallelizable(o, o.arity, max_steps).map_err(|e| domain("oracle", e))?.parallelizable;
    let out = c.run(max_steps);
    if !out.trace.halted {
        return Err(domain("no-halt", format!("construction did not halt within {max_steps} steps")));
    }
    let expected = parallel.then(|| classify(&table));
    if format == OutFormat::Json {
        let mut v = out.to_json(&c.machine);
        v["truth_table"] = json!(table);
        v["parallelizable"] = json!(parallel);
        v["expected"] = json!(expected);
        print_json(&v);
    } else {
        let cell: Vec<&str> = out.result.iter().map(|&s| c.machine.symbol_name(s)).collect();
        let kind = if out.verdict == 0 { "constant" } else { "not constant" };
        println!("verdict: {} ({kind})", out.verdict);
        println!("result cell {}: {{{}}}", c.result_cell, cell.join(","));
        println!("oracle entered at t = {:?}", out.entry_times);
        let shown: String = table.iter().map(|b| b.to_string()).collect();
        match expected {
            Some(e) => println!("truth table {shown}, classical classification: {e}"),
            None => println!("truth table {shown}; oracle is not parallelizable, so the verdict is not binding"),
        }
    }
    match expected {
        Some(e) if e != out.verdict => {
            Err(Failure::Domain(json!({"error": "verdict-mismatch", "verdict": out.verdict, "expected": e})))
        }
        _ => Ok(()),
    }
}

fn cmd_deutsch(a: DeutschArgs) -> Outcome {
    let o = parse_oracle(&a.oracle, 1)?;
    let c = build_deutsch(&o).map_err(|e| domain("oracle", e))?;
    report_construction(&o, &c, a.max_steps, a.format)
}

fn cmd_dj(a: DjArgs) -> Outcome {
    let o = parse_oracle(&a.oracle, a.n)?;
    let c = build_deutsch_jozsa(a.n, &o).map_err(|e| domain("oracle", e))?;
    report_construction(&o, &c, a.max_steps, a.format)
}

fn cmd_parallelizable(a: DjArgs) -> Outcome {
    let o = parse_oracle(&a.oracle, a.n)?;
    let r = check_parallelizable(&o, a.n, a.max_steps).map_err(|e| domain("oracle", e))?;
    if a.format == OutFormat::Json {
        print_json(&r.to_json(&o));
    } else {
        let v = r.to_json(&o);
        println!("parallelizable (on-domain): {}", r.parallelizable);
        for key in ["superposed", "classical", "spurious", "missing"] {
            println!("{key:<11} result {}  states {}", v[key]["result"], v[key]["states"]);
        }
    }
    Ok(())
}

fn cmd_csat(a: CsatArgs) -> Outcome {
    let cnf = match &a.file {
        Some(path) => {
            let src = std::fs::read_to_string(path).map_err(|e| usage("io", format!("{}: {e}", path.display())))?;
            Cnf::parse_dimacs(&src).map_err(|e| domain("dimacs", e))?
        }
        None => {
            if a.vars == 0 || a.clauses == 0 {
                return Err(usage("csat", "--vars and --clauses must be positive"));
            }
            random_cnf(&mut ChaCha8Rng::seed_from_u64(a.seed), a.vars, a.clauses, a.vars.min(3))
        }
    };
    let out = run_csat(&cnf, a.max_steps);
    let sat = cnf.is_satisfiable();
    if a.format == OutFormat::Json {
        let mut v = out.to_json();
        v["formula"] = json!(cnf.to_string());
        v["brute_force"] = json!(sat);
        print_json(&v);
    } else {
        println!("formula: {cnf}");
        println!("verdict: {}  ({} accepting)", if out.accepted { "accept" } else { "reject" }, out.fraction);
        println!(
            "verdict reached at t = {:?} (uniform: {}), amplification steps: {}",
            out.verdict_time, out.uniform, out.amplification_steps
        );
        println!("brute force: {}", if sat { "satisfiable" } else { "unsatisfiable" });
    }
    if !out.trace.halted {
        return Err(domain("no-halt", format!("did not halt within {} steps", a.max_steps)));
    }
    if out.accepted != sat {
        return Err(Failure::Domain(
            json!({"error": "verdict-mismatch", "accepted": out.accepted, "satisfiable": sat}),
        ));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Axioms(a) => cmd_axioms(a),
        Command::CheckModel(a) => cmd_check_model(a),
        Command::Witness(a) => cmd_witness(a),
        Command::CompileDtm(a) => cmd_compile(a),
        Command::ModalCheck(a) => cmd_modal(a),
        Command::Deutsch(a) => cmd_deutsch(a),
        Command::Dj(a) => cmd_dj(a),
        Command::Csat(a) => cmd_csat(a),
        Command::Parallelizable(a) => cmd_parallelizable(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(v)) => {
            eprintln!("{v}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(v)) => {
            eprintln!("{v}");
            ExitCode::from(2)
        }
    }
}
