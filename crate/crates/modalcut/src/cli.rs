//! The command-line front end: parse an expression or sequent from a file
//! or stdin, then check, reduce, translate, or sweep it, with
//! human-readable or `--json` output.
//!
//! Exit status: 0 for success and ok-verdicts, 1 for failed checks and
//! fail or inconclusive verdicts, 2 for usage, parse, and input errors.

use std::fmt;
use std::fs;
use std::io::{self, Read};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::analysis::{
    check_confluence, check_simulation, check_subject_reduction, gen_typed, normalize,
    reduction_graph, GraphReport, RuleSet, Strategy, TranslationKind, Verdict,
    DEFAULT_FUEL, DEFAULT_NODE_BOUND,
};
use crate::calc_lmmt::Fragment;
use crate::syntax::{parse_expr, parse_sequent, Calculus, Expr, Session};
use crate::translate::{
    cm, cm_sequent, cps, cps_sequent, embed_cbn, embed_cbn_sequent, embed_cbv,
    embed_cbv_sequent, forget_vc, forget_vc_sequent, forget_vn, forget_vn_sequent, mtr,
    mtr_sequent,
};
use crate::typing::{infer_type, Sequent};

#[derive(Parser)]
#[command(
    name = "modalcut",
    version,
    about = "Typecheckers, reduction engines, and translations for five value/computation calculi"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Typecheck a sequent and print its derivation
    Check {
        #[command(flatten)]
        input: InputArgs,
        /// Monadic λμ only: applications must land in an M-type
        #[arg(long)]
        restricted: bool,
        #[arg(long)]
        json: bool,
    },
    /// List the redexes of an expression and fire the chosen one
    Step {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        rules: RuleArgs,
        #[command(flatten)]
        pick: StrategyArgs,
        #[arg(long)]
        json: bool,
    },
    /// Reduce an expression until it is normal or fuel runs out
    Normalize {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        rules: RuleArgs,
        #[command(flatten)]
        pick: StrategyArgs,
        /// Step budget
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: usize,
        #[arg(long)]
        json: bool,
    },
    /// Map an expression or sequent through one of the translations
    Translate {
        #[command(flatten)]
        input: InputArgs,
        /// Which map: mtr, cm, cps, forget, embed-cbv, or embed-cbn
        #[arg(long)]
        to: TranslateOp,
        /// Print the whole image sequent with its translated types
        /// (requires sequent input)
        #[arg(long)]
        emit_type: bool,
        #[arg(long)]
        json: bool,
    },
    /// Explore every reduction of an expression breadth-first
    Graph {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        rules: RuleArgs,
        /// Node budget for the exploration
        #[arg(long, default_value_t = DEFAULT_NODE_BOUND)]
        bound: usize,
        #[arg(long)]
        json: bool,
    },
    /// Decide confluence of one expression from its bounded graph
    Confluence {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        rules: RuleArgs,
        /// Node budget for the exploration
        #[arg(long, default_value_t = DEFAULT_NODE_BOUND)]
        bound: usize,
        #[arg(long)]
        json: bool,
    },
    /// Fire one step and check that its translated image rejoins
    Simulate {
        #[command(flatten)]
        input: InputArgs,
        /// Which map: mtr, cm, or cps
        #[arg(long)]
        to: TranslationKind,
        #[command(flatten)]
        pick: StrategyArgs,
        /// Step budget for the search in the target calculus
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: usize,
        /// Node budget for the search in the target calculus
        #[arg(long, default_value_t = DEFAULT_NODE_BOUND)]
        bound: usize,
        #[arg(long)]
        json: bool,
    },
    /// Check that every reachable reduct keeps the sequent's statement
    Sr {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        rules: RuleArgs,
        /// Node budget for the exploration
        #[arg(long, default_value_t = DEFAULT_NODE_BOUND)]
        bound: usize,
        #[arg(long)]
        json: bool,
    },
    /// Run a built-in demonstration (available: lafont)
    Demo {
        /// Name of the demonstration
        which: String,
        #[arg(long)]
        json: bool,
    },
    /// Generate a random well-typed sequent
    Gen {
        /// Calculus to generate in: lmmt, lmmt-vn, lm-M, vc, ivc, or stlc
        #[arg(long, short = 'c')]
        calculus: Calculus,
        /// Size budget for the generated expression
        #[arg(long, default_value_t = 8)]
        budget: usize,
        #[arg(long, env = "MODALCUT_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct InputArgs {
    /// Calculus of the input: lmmt, lmmt-vn, lm-M, vc, ivc, or stlc
    #[arg(long, short = 'c')]
    calculus: Calculus,
    /// File to read, or '-' for stdin (the default)
    input: Option<PathBuf>,
}

#[derive(Args)]
struct RuleArgs {
    /// Fragment of the unmoded sequent calculus: full, cbn, or cbv
    #[arg(long, default_value = "full")]
    fragment: Fragment,
    /// Monadic λμ only: β expands into a bind instead of substituting
    #[arg(long)]
    restricted: bool,
}

#[derive(Args)]
struct StrategyArgs {
    /// How to choose among redexes
    #[arg(long, value_enum, default_value = "leftmost-outermost")]
    strategy: StrategyArg,
    /// Seed for the random strategy
    #[arg(long, env = "MODALCUT_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    LeftmostOutermost,
    RightmostInnermost,
    Random,
}

impl StrategyArgs {
    fn strategy(&self) -> Strategy {
        match self.strategy {
            StrategyArg::LeftmostOutermost => Strategy::LeftmostOutermost,
            StrategyArg::RightmostInnermost => Strategy::RightmostInnermost,
            StrategyArg::Random => Strategy::Random(self.seed),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum TranslateOp {
    Mtr,
    Cm,
    Cps,
    Forget,
    EmbedCbv,
    EmbedCbn,
}

impl FromStr for TranslateOp {
    type Err = String;

    fn from_str(s: &str) -> Result<TranslateOp, String> {
        match s {
            "mtr" => Ok(TranslateOp::Mtr),
            "cm" => Ok(TranslateOp::Cm),
            "cps" => Ok(TranslateOp::Cps),
            "forget" => Ok(TranslateOp::Forget),
            "embed-cbv" => Ok(TranslateOp::EmbedCbv),
            "embed-cbn" => Ok(TranslateOp::EmbedCbn),
            _ => Err(format!(
                "unknown translation {s:?} (expected mtr, cm, cps, forget, embed-cbv, or embed-cbn)"
            )),
        }
    }
}

pub fn run() -> ExitCode {
    match Cli::parse().command {
        Command::Check { input, restricted, json } => run_check(&input, restricted, json),
        Command::Step { input, rules, pick, json } => run_step(&input, &rules, &pick, json),
        Command::Normalize { input, rules, pick, fuel, json } => {
            run_normalize(&input, &rules, &pick, fuel, json)
        }
        Command::Translate { input, to, emit_type, json } => {
            run_translate(&input, to, emit_type, json)
        }
        Command::Graph { input, rules, bound, json } => run_graph(&input, &rules, bound, json),
        Command::Confluence { input, rules, bound, json } => {
            run_confluence(&input, &rules, bound, json)
        }
        Command::Simulate { input, to, pick, fuel, bound, json } => {
            run_simulate(&input, to, &pick, fuel, bound, json)
        }
        Command::Sr { input, rules, bound, json } => run_sr(&input, &rules, bound, json),
        Command::Demo { which, json } => run_demo(&which, json),
        Command::Gen { calculus, budget, seed, json } => run_gen(calculus, budget, seed, json),
    }
}

// ---- plumbing -------------------------------------------------------

fn fail(code: u8, msg: impl fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn read_text(input: &Option<PathBuf>) -> Result<String, ExitCode> {
    match input {
        Some(p) if p.as_os_str() != "-" => fs::read_to_string(p)
            .map_err(|e| fail(2, format!("cannot read {}: {e}", p.display()))),
        _ => {
            let mut text = String::new();
            io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| fail(2, format!("cannot read stdin: {e}")))?;
            Ok(text)
        }
    }
}

fn expr_input(args: &InputArgs) -> Result<Expr, ExitCode> {
    let text = read_text(&args.input)?;
    parse_expr(args.calculus, &text).map_err(|e| fail(2, e))
}

fn sequent_input(args: &InputArgs) -> Result<Sequent, ExitCode> {
    let text = read_text(&args.input)?;
    let syn = match parse_sequent(args.calculus, &text) {
        Ok(syn) => syn,
        // A bare expression reads as a subject under empty environments.
        Err(e) => match text.contains("|-") {
            true => return Err(fail(2, e)),
            false => parse_sequent(args.calculus, &format!("|- {text}")).map_err(|_| fail(2, e))?,
        },
    };
    Sequent::from_syntax(syn).map_err(|e| fail(2, e))
}

fn rule_set(calculus: Calculus, args: &RuleArgs) -> Result<RuleSet, ExitCode> {
    if args.fragment != Fragment::Full && calculus != Calculus::Lmmt {
        return Err(fail(2, format!("--fragment {} applies only to lmmt", args.fragment)));
    }
    if args.restricted && calculus != Calculus::LmM {
        return Err(fail(2, "--restricted applies only to lm-M"));
    }
    Ok(RuleSet { calculus, fragment: args.fragment, restricted: args.restricted })
}

fn print_json(value: &Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("every export serializes"));
}

fn indent(s: &str) -> String {
    s.lines().map(|l| format!("  {l}")).collect::<Vec<_>>().join("\n")
}

fn verdict_exit(v: &Verdict, json: bool) -> ExitCode {
    if json {
        print_json(&v.to_json());
    } else {
        println!("{}: {}", v.kind, v.note);
        for w in &v.witnesses {
            println!("witness:\n{}", indent(&w.render()));
        }
    }
    if v.kind.is_ok() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn render_graph(g: &GraphReport) -> String {
    let mut out = format!("calculus: {}\nnodes: {}", g.calculus, g.nodes.len());
    if g.exhausted {
        out.push_str(" (node bound hit; exploration cut short)");
    }
    for (i, n) in g.nodes.iter().enumerate() {
        out.push_str(&format!("\n  [{i}] {n}"));
    }
    out.push_str(&format!("\nedges: {}", g.edges.len()));
    for e in &g.edges {
        out.push_str(&format!("\n  [{}] --{} @ {:?}--> [{}]", e.from, e.rule.name(), e.path, e.to));
    }
    let nfs: Vec<String> = g.normal_forms.iter().map(|i| format!("[{i}]")).collect();
    out.push_str(&format!("\nnormal forms: {}", nfs.join(" ")));
    out
}

// ---- the commands ---------------------------------------------------

fn run_check(input: &InputArgs, restricted: bool, json: bool) -> ExitCode {
    if restricted && input.calculus != Calculus::LmM {
        return fail(2, "--restricted applies only to lm-M");
    }
    let seq = match sequent_input(input) {
        Ok(s) => s,
        Err(code) => return code,
    };
    match infer_type(&seq, restricted) {
        Ok((ty, derivation)) => {
            if json {
                print_json(&json!({
                    "calculus": input.calculus.id(),
                    "sequent": seq.to_string(),
                    "ok": true,
                    "type": ty.as_ref().map(|t| t.to_string()),
                }));
            } else {
                print!("{}", derivation.render());
                match ty {
                    Some(t) => println!("type: {t}"),
                    None => println!("the command checks"),
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            if json {
                print_json(&json!({
                    "calculus": input.calculus.id(),
                    "sequent": seq.to_string(),
                    "ok": false,
                    "error": e.to_string(),
                }));
            } else {
                println!("check failed: {e}");
            }
            ExitCode::from(1)
        }
    }
}

fn run_step(input: &InputArgs, rules: &RuleArgs, pick: &StrategyArgs, json: bool) -> ExitCode {
    let rules = match rule_set(input.calculus, rules) {
        Ok(r) => r,
        Err(code) => return code,
    };
    let start = match expr_input(input) {
        Ok(e) => e,
        Err(code) => return code,
    };
    let redexes = match rules.redexes(&start) {
        Ok(r) => r,
        Err(e) => return fail(2, e),
    };
    let trace = match normalize(&rules, &start, pick.strategy(), 1) {
        Ok(t) => t,
        Err(e) => return fail(2, e),
    };
    if json {
        print_json(&trace.to_json());
        return ExitCode::SUCCESS;
    }
    if redexes.is_empty() {
        println!("normal form: {start}");
        return ExitCode::SUCCESS;
    }
    println!("redexes:");
    for (rule, path) in &redexes {
        println!("  {} @ {:?}", rule.name(), path);
    }
    let step = &trace.steps[0];
    println!("{start}");
    println!("  --{} @ {:?}--> {}", step.rule.name(), step.path, step.result);
    ExitCode::SUCCESS
}

fn run_normalize(
    input: &InputArgs,
    rules: &RuleArgs,
    pick: &StrategyArgs,
    fuel: usize,
    json: bool,
) -> ExitCode {
    let rules = match rule_set(input.calculus, rules) {
        Ok(r) => r,
        Err(code) => return code,
    };
    let start = match expr_input(input) {
        Ok(e) => e,
        Err(code) => return code,
    };
    let trace = match normalize(&rules, &start, pick.strategy(), fuel) {
        Ok(t) => t,
        Err(e) => return fail(2, e),
    };
    if json {
        print_json(&trace.to_json());
    } else {
        println!("{}", trace.render());
    }
    ExitCode::SUCCESS
}

fn run_translate(input: &InputArgs, to: TranslateOp, emit_type: bool, json: bool) -> ExitCode {
    let text = match read_text(&input.input) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let mut session = Session::new();
    if text.contains("|-") {
        let seq = match parse_sequent(input.calculus, &text)
            .map_err(|e| fail(2, e))
            .and_then(|syn| Sequent::from_syntax(syn).map_err(|e| fail(2, e)))
        {
            Ok(s) => s,
            Err(code) => return code,
        };
        let image = match to {
            TranslateOp::Mtr => mtr_sequent(&seq, &mut session),
            TranslateOp::Cm => cm_sequent(&seq, &mut session),
            TranslateOp::Cps => cps_sequent(&seq, &mut session),
            TranslateOp::Forget => match input.calculus {
                Calculus::LmmtVn => forget_vn_sequent(&seq),
                Calculus::Vc => forget_vc_sequent(&seq),
                _ => return fail(2, "forget maps lmmt-vn or vc"),
            },
            TranslateOp::EmbedCbv => embed_cbv_sequent(&seq),
            TranslateOp::EmbedCbn => embed_cbn_sequent(&seq),
        };
        let image = match image {
            Ok(s) => s,
            Err(e) => return fail(2, e),
        };
        if json {
            print_json(&json!({
                "calculus": image.subject.calculus.id(),
                "result": image.subject.to_string(),
                "class": image.subject.class().to_string(),
                "sequent": image.to_string(),
            }));
        } else if emit_type {
            println!("{image}");
        } else {
            println!("{}", image.subject);
        }
        return ExitCode::SUCCESS;
    }
    if emit_type {
        return fail(2, "--emit-type needs a sequent input (Γ |- subject : A); types come from it");
    }
    let e = match parse_expr(input.calculus, &text) {
        Ok(e) => e,
        Err(e) => return fail(2, e),
    };
    let image = match to {
        TranslateOp::Mtr => mtr(&e, &mut session),
        TranslateOp::Cm => cm(&e, &mut session),
        TranslateOp::Cps => cps(&e, &mut session),
        TranslateOp::Forget => match input.calculus {
            Calculus::LmmtVn => forget_vn(&e),
            Calculus::Vc => forget_vc(&e),
            _ => return fail(2, "forget maps lmmt-vn or vc"),
        },
        TranslateOp::EmbedCbv => embed_cbv(&e),
        TranslateOp::EmbedCbn => embed_cbn(&e),
    };
    let image = match image {
        Ok(out) => out,
        Err(e) => return fail(2, e),
    };
    if json {
        print_json(&json!({
            "calculus": image.result.calculus.id(),
            "result": image.result.to_string(),
            "class": image.result.class().to_string(),
        }));
    } else {
        println!("{}", image.result);
    }
    ExitCode::SUCCESS
}

fn run_graph(input: &InputArgs, rules: &RuleArgs, bound: usize, json: bool) -> ExitCode {
    let rules = match rule_set(input.calculus, rules) {
        Ok(r) => r,
        Err(code) => return code,
    };
    let start = match expr_input(input) {
        Ok(e) => e,
        Err(code) => return code,
    };
    let graph = match reduction_graph(&rules, &start, bound) {
        Ok(g) => g,
        Err(e) => return fail(2, e),
    };
    if json {
        print_json(&graph.to_json());
    } else {
        println!("{}", render_graph(&graph));
    }
    ExitCode::SUCCESS
}

fn run_confluence(input: &InputArgs, rules: &RuleArgs, bound: usize, json: bool) -> ExitCode {
    let rules = match rule_set(input.calculus, rules) {
        Ok(r) => r,
        Err(code) => return code,
    };
    let start = match expr_input(input) {
        Ok(e) => e,
        Err(code) => return code,
    };
    match check_confluence(&rules, &start, bound) {
        Ok(v) => verdict_exit(&v, json),
        Err(e) => fail(2, e),
    }
}

fn run_simulate(
    input: &InputArgs,
    to: TranslationKind,
    pick: &StrategyArgs,
    fuel: usize,
    bound: usize,
    json: bool,
) -> ExitCode {
    if input.calculus != to.source() {
        return fail(2, format!("{to} translates {}, not {}", to.source(), input.calculus));
    }
    let rules = RuleSet::full(input.calculus);
    let start = match expr_input(input) {
        Ok(e) => e,
        Err(code) => return code,
    };
    let source = match normalize(&rules, &start, pick.strategy(), 1) {
        Ok(t) => t,
        Err(e) => return fail(2, e),
    };
    if source.steps.is_empty() {
        return fail(2, "the expression is a normal form; there is no step to simulate");
    }
    let verdict = match check_simulation(&source, to, fuel, bound) {
        Ok(v) => v,
        Err(e) => return fail(2, e),
    };
    if !json {
        let step = &source.steps[0];
        println!(
            "source step: {} --{} @ {:?}--> {}",
            source.start,
            step.rule.name(),
            step.path,
            step.result
        );
    }
    verdict_exit(&verdict, json)
}

fn run_sr(input: &InputArgs, rules: &RuleArgs, bound: usize, json: bool) -> ExitCode {
    let rules = match rule_set(input.calculus, rules) {
        Ok(r) => r,
        Err(code) => return code,
    };
    let seq = match sequent_input(input) {
        Ok(s) => s,
        Err(code) => return code,
    };
    match check_subject_reduction(&rules, &seq, bound) {
        Ok(v) => verdict_exit(&v, json),
        Err(e) => fail(2, format!("the subject does not typecheck: {e}")),
    }
}

fn run_demo(which: &str, json: bool) -> ExitCode {
    match which {
        "lafont" => demo_lafont(json),
        other => fail(2, format!("unknown demo {other:?} (available: lafont)")),
    }
}

/// One typed command whose two root redexes race to different normal
/// forms, and the four ways of disciplining it — restricting the rules to
/// a fragment, or moving to the moded calculus under either mode choice —
/// each of which leaves exactly one normal form.
fn demo_lafont(json: bool) -> ExitCode {
    let start = parse_expr(Calculus::Lmmt, "< mu @a. < y | @b > | mt x. < z | @b > >")
        .expect("the demo command parses");
    let full = reduction_graph(&RuleSet::lmmt(Fragment::Full), &start, 1000)
        .expect("the demo command explores");
    let rescues: Vec<(&str, RuleSet, Expr)> = vec![
        ("call-by-name fragment", RuleSet::lmmt(Fragment::Cbn), start.clone()),
        ("call-by-value fragment", RuleSet::lmmt(Fragment::Cbv), start.clone()),
        (
            "call-by-name mode embedding",
            RuleSet::full(Calculus::LmmtVn),
            embed_cbn(&start).expect("the demo command embeds").result,
        ),
        (
            "call-by-value mode embedding",
            RuleSet::full(Calculus::LmmtVn),
            embed_cbv(&start).expect("the demo command embeds").result,
        ),
    ];
    let mut ok = full.normal_forms.len() == 2 && !full.exhausted;
    let mut graphs = vec![("full rules", full)];
    for (label, rules, e) in rescues {
        let g = reduction_graph(&rules, &e, 1000).expect("the demo command explores");
        ok = ok && g.normal_forms.len() == 1 && !g.exhausted;
        graphs.push((label, g));
    }
    if json {
        let mut obj = serde_json::Map::new();
        for (label, g) in &graphs {
            obj.insert(label.replace(' ', "-"), g.to_json());
        }
        print_json(&Value::Object(obj));
    } else {
        let (_, full) = &graphs[0];
        println!("one typed command, full rules:");
        println!("  {start}");
        for e in &full.edges {
            println!(
                "  --{} @ {:?}--> {}",
                e.rule.name(),
                e.path,
                full.nodes[e.to]
            );
        }
        println!(
            "{} normal forms — reduction stops at either ending.\n",
            full.normal_forms.len()
        );
        println!("the same command, four disciplined ways:");
        for (label, g) in &graphs[1..] {
            let nfs: Vec<String> =
                g.normal_forms.iter().map(|i| g.nodes[*i].to_string()).collect();
            println!("  {label:<30} {} normal form: {}", g.normal_forms.len(), nfs.join(", "));
        }
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run_gen(calculus: Calculus, budget: usize, seed: u64, json: bool) -> ExitCode {
    if budget == 0 {
        return fail(2, "--budget must be at least 1");
    }
    let seq = gen_typed(calculus, budget, seed);
    if json {
        print_json(&json!({
            "calculus": calculus.id(),
            "sequent": seq.to_string(),
        }));
    } else {
        println!("{seq}");
    }
    ExitCode::SUCCESS
}
