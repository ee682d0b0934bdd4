//! `htc`: command-line front end for the here-and-there reference solver.

mod valuation;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value as Json};

use htc_core::denote::denote;
use htc_core::semantics::{eval_atom, reduct, satisfies, EvalContext, World};
use htc_core::solver::{enumerate_stable, SolverConfig, StableModelSet};
use htc_core::syntax::{
    occurrences, parse_program_with, retag_occurrence, Atom, Formula, ParseOptions, Printer,
};
use htc_core::transform::{
    pi_translate, rewrite_agg_function, stratification_check, OccSelector, Stratification,
};
use htc_core::{
    Error, EvalError, EvalMode, Interpretation, ModelError, Program, SumVariant, Valuation,
    Value,
};

use valuation::parse_valuation;

const EXIT_OK: u8 = 0;
const EXIT_FAILURE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_PRECONDITION: u8 = 3;
const EXIT_CAP: u8 = 4;
const EXIT_NO_MODELS: u8 = 10;

#[derive(Parser, Debug)]
#[command(name = "htc", version, about = "Stable models of programs with conditional terms and aggregates")]
struct Cli {
    #[command(flatten)]
    run: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct RunConfig {
    /// Evaluation mode of conditional terms and aggregate elements written
    /// without explicit brackets.
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Vc)]
    mode: ModeArg,
    /// Variant denoted by the bare `sum` keyword unless the file has a
    /// `#sum_variant` directive.
    #[arg(long, global = true, value_enum, default_value_t = SumArg::Strict)]
    sum: SumArg,
    /// Largest number of candidate valuations the solver may enumerate.
    #[arg(long, global = true, env = "HTC_CAP", default_value_t = htc_core::model::DEFAULT_CAP,
          value_parser = clap::value_parser!(u64).range(1..))]
    cap: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Enumerate the stable models.
    Solve { path: PathBuf },
    /// Print the program with sums replaced by linear terms.
    Translate { path: PathBuf },
    /// Look for a level mapping for one occurrence, or for all occurrences
    /// outside negation when `--occ` is omitted.
    Stratify {
        path: PathBuf,
        #[arg(long)]
        occ: Option<usize>,
    },
    /// Print the reduct of the program with respect to a total valuation.
    Reduct {
        path: PathBuf,
        /// Valuation such as `x=1, y="a"`.
        #[arg(long)]
        model: String,
    },
    /// Retag occurrences and compare the stable models before and after.
    Compare {
        path: PathBuf,
        /// Occurrence id, or `all` for every occurrence outside negation.
        #[arg(long)]
        occ: OccArg,
        #[arg(long, value_enum)]
        to: ModeArg,
    },
    /// Replace one sum variant by another and compare the stable models.
    Rewrite {
        path: PathBuf,
        #[arg(long, value_enum)]
        from: SumArg,
        #[arg(long, value_enum)]
        to: SumArg,
    },
    /// Evaluate every rule and atom in an interpretation.
    Eval {
        path: PathBuf,
        #[arg(long)]
        there: String,
        /// Defaults to the there-valuation.
        #[arg(long)]
        here: Option<String>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Vc,
    Df,
}

impl From<ModeArg> for EvalMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Vc => EvalMode::Vc,
            ModeArg::Df => EvalMode::Df,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SumArg {
    Strict,
    Cl,
    Gz,
    StrictTyped,
}

impl From<SumArg> for SumVariant {
    fn from(s: SumArg) -> Self {
        match s {
            SumArg::Strict => SumVariant::Strict,
            SumArg::Cl => SumVariant::Cl,
            SumArg::Gz => SumVariant::Gz,
            SumArg::StrictTyped => SumVariant::StrictTyped,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum OccArg {
    One(usize),
    All,
}

impl std::str::FromStr for OccArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s == "all" {
            return Ok(OccArg::All);
        }
        s.parse()
            .map(OccArg::One)
            .map_err(|_| format!("expected an occurrence id or `all`, found `{s}`"))
    }
}

/// A failure together with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Parse(_) => EXIT_INPUT,
            Error::Model(ModelError::EnumerationTooLarge { .. }) => EXIT_CAP,
            Error::Model(_) => EXIT_INPUT,
            Error::Precondition(_)
            | Error::Unsupported(_)
            | Error::UnknownOccurrence(_)
            | Error::Nesting(_) => EXIT_PRECONDITION,
            Error::Eval(_) => EXIT_FAILURE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<EvalError> for Failure {
    fn from(e: EvalError) -> Self {
        Error::from(e).into()
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        Error::from(e).into()
    }
}

fn input_error(message: String) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message,
    }
}

/// Text printed on stdout and the exit code of a successful run.
struct Outcome {
    text: String,
    code: u8,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome {
            text,
            code: EXIT_OK,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn load(path: &PathBuf, cfg: &RunConfig) -> Result<Program, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    let opts = ParseOptions {
        default_mode: cfg.mode.into(),
        default_sum: cfg.sum.into(),
    };
    parse_program_with(&text, opts)
        .map_err(|e| input_error(format!("{}:{e}", path.display())))
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let cfg = &cli.run;
    let solver = SolverConfig { cap: cfg.cap };
    let json = cfg.format == Format::Json;
    match &cli.command {
        Command::Solve { path } => {
            let prog = load(path, cfg)?;
            let models = enumerate_stable(&prog, &solver)?;
            let text = if json {
                json_line(&json!({
                    "count": models.len(),
                    "models": models_json(&models),
                    "semantics": "per-occurrence",
                }))
            } else {
                let mut s = format!("models: {}\n", models.len());
                for m in &models.models {
                    s.push_str(&format!("{m}\n"));
                }
                s
            };
            let code = if models.is_empty() { EXIT_NO_MODELS } else { EXIT_OK };
            Ok(Outcome { text, code })
        }
        Command::Translate { path } => {
            let prog = load(path, cfg)?;
            Ok(Outcome::ok(program_output(&pi_translate(&prog)?, json)))
        }
        Command::Stratify { path, occ } => {
            let prog = load(path, cfg)?;
            let sel = occ.map_or(OccSelector::AllPositive, OccSelector::One);
            let s = stratification_check(&prog, sel)?;
            Ok(Outcome::ok(if json {
                json_line(&stratification_json(&s))
            } else {
                stratification_text(&s)
            }))
        }
        Command::Reduct { path, model } => {
            let prog = load(path, cfg)?;
            let t = parse_valuation(model, &prog.domain).map_err(input_error)?;
            let printer = Printer::for_program(&prog);
            let reduced = prog
                .formulas()
                .iter()
                .map(|f| reduct(f, &t).map(|r| printer.formula(&r)))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Outcome::ok(if json {
                json_line(&json!({ "model": valuation_json(&t), "reduct": reduced }))
            } else {
                reduced.iter().map(|f| format!("{f}\n")).collect()
            }))
        }
        Command::Compare { path, occ, to } => {
            let prog = load(path, cfg)?;
            let mode = EvalMode::from(*to);
            let (sel, retagged) = match occ {
                OccArg::One(id) => (OccSelector::One(*id), retag_occurrence(&prog, *id, mode)?),
                OccArg::All => {
                    let mut p = prog.clone();
                    for o in occurrences(&prog).iter().filter(|o| !o.negated) {
                        p = retag_occurrence(&p, o.id, mode)?;
                    }
                    (OccSelector::AllPositive, p)
                }
            };
            let strat = stratification_check(&prog, sel)?;
            let before = enumerate_stable(&prog, &solver)?;
            let after = enumerate_stable(&retagged, &solver)?;
            compare_outcome(&strat, &before, &after, json)
        }
        Command::Rewrite { path, from, to } => {
            let prog = load(path, cfg)?;
            let rewritten = rewrite_agg_function(&prog, (*from).into(), (*to).into())?;
            let strat = stratification_check(&prog, OccSelector::AllPositive)?;
            let before = enumerate_stable(&prog, &solver)?;
            let after = enumerate_stable(&rewritten, &solver)?;
            let mut out = compare_outcome(&strat, &before, &after, json)?;
            let program = Printer::for_program(&rewritten).program(&rewritten);
            out.text = if json {
                let mut v: Json = serde_json::from_str(&out.text).expect("own output");
                v["program"] = Json::String(program);
                json_line(&v)
            } else {
                format!("{program}{}", out.text)
            };
            Ok(out)
        }
        Command::Eval { path, there, here } => {
            let prog = load(path, cfg)?;
            let t = parse_valuation(there, &prog.domain).map_err(input_error)?;
            let h = match here {
                Some(h) => parse_valuation(h, &prog.domain).map_err(input_error)?,
                None => t.clone(),
            };
            let interp = Interpretation::new(h, t)?;
            eval_outcome(&prog, &interp, json)
        }
    }
}

fn json_line(v: &Json) -> String {
    let mut s = serde_json::to_string(v).expect("serialisable");
    s.push('\n');
    s
}

fn value_json(v: &Value) -> Json {
    match v {
        Value::Int(n) => json!(n),
        Value::Str(s) => json!(s),
    }
}

/// Undefined variables are left out.
fn valuation_json(v: &Valuation) -> Json {
    let m: Map<String, Json> = v
        .bindings()
        .iter()
        .map(|(k, x)| (k.name().to_string(), value_json(x)))
        .collect();
    Json::Object(m)
}

fn models_json(ms: &StableModelSet) -> Json {
    Json::Array(ms.models.iter().map(valuation_json).collect())
}

fn program_output(p: &Program, json: bool) -> String {
    let text = Printer::for_program(p).program(p);
    if json {
        json_line(&json!({ "program": text }))
    } else {
        text
    }
}

fn stratification_json(s: &Stratification) -> Json {
    match s {
        Stratification::Stratified(l) => {
            let m: BTreeMap<&str, u32> = l.0.iter().map(|(k, v)| (k.name(), *v)).collect();
            json!({ "stratified": true, "levels": m })
        }
        Stratification::NotStratified { cycle } => {
            let c: Vec<&str> = cycle.iter().map(|v| v.name()).collect();
            json!({ "stratified": false, "cycle": c })
        }
    }
}

fn stratification_text(s: &Stratification) -> String {
    match s {
        Stratification::Stratified(l) => format!("STRATIFIED {l}\n"),
        Stratification::NotStratified { cycle } => {
            let c: Vec<&str> = cycle.iter().map(|v| v.name()).collect();
            format!("NOT_STRATIFIED cycle {{{}}}\n", c.join(", "))
        }
    }
}

/// Differing model sets on a stratified program contradict the
/// retagging guarantee and are reported with a failing exit code.
fn compare_outcome(
    strat: &Stratification,
    before: &StableModelSet,
    after: &StableModelSet,
    json: bool,
) -> Result<Outcome, Failure> {
    let equal = before.same_models(after);
    let verdict = if equal { "EQUAL" } else { "DIFFER" };
    let code = if !equal && strat.is_stratified() {
        EXIT_FAILURE
    } else {
        EXIT_OK
    };
    let text = if json {
        json_line(&json!({
            "before": models_json(before),
            "after": models_json(after),
            "stratification": stratification_json(strat),
            "verdict": verdict,
        }))
    } else {
        format!(
            "{}before: {before}\nafter: {after}\n{verdict}\n",
            stratification_text(strat)
        )
    };
    Ok(Outcome { text, code })
}

fn collect_atoms<'a>(f: &'a Formula, out: &mut Vec<&'a Atom>) {
    match f {
        Formula::Bot => {}
        Formula::Atom(a) => out.push(a),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Impl(a, b) => {
            collect_atoms(a, out);
            collect_atoms(b, out);
        }
    }
}

fn eval_outcome(prog: &Program, interp: &Interpretation, json: bool) -> Result<Outcome, Failure> {
    let printer = Printer::for_program(prog);
    let mut all = true;
    let mut rules_json = Vec::new();
    let mut text = format!("interpretation: {interp}\n");
    for (i, r) in prog.rules.iter().enumerate() {
        let f = r.to_formula();
        let holds = satisfies(interp, &f)?;
        all &= holds;
        text.push_str(&format!("rule {i}: {} -> {holds}\n", printer.rule(r)));
        let mut atoms = Vec::new();
        collect_atoms(&f, &mut atoms);
        let mut atoms_json = Vec::new();
        for a in atoms {
            let mut worlds = Map::new();
            for (name, world) in [("here", World::Here), ("there", World::There)] {
                let basic = eval_atom(a, EvalContext::new(interp, world))?;
                let v = match world {
                    World::Here => interp.here(),
                    World::There => interp.there(),
                };
                let truth = denote(&basic, v)?;
                text.push_str(&format!(
                    "  {name:<5} {} ~> {basic} = {truth}\n",
                    printer.atom(a)
                ));
                worlds.insert(
                    name.into(),
                    json!({ "basic": basic.to_string(), "value": truth }),
                );
            }
            atoms_json.push(json!({ "atom": printer.atom(a), "worlds": worlds }));
        }
        rules_json.push(json!({ "rule": printer.rule(r), "value": holds, "atoms": atoms_json }));
    }
    text.push_str(&format!("value: {all}\n"));
    if json {
        text = json_line(&json!({
            "here": valuation_json(interp.here()),
            "there": valuation_json(interp.there()),
            "rules": rules_json,
            "value": all,
        }));
    }
    Ok(Outcome::ok(text))
}
