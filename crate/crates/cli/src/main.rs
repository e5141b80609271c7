//! `formdepth`: run depth-reduction passes and checkers on formula files.
//!
//! Formulas go to stdout (or `-o`), one JSON report per line goes to stderr
//! (or `--report`). Exit codes: 0 success, 1 verification failure, 2 usage
//! error, 3 budget exceeded.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use formdepth_bench::{fit_constants, run_batch, write_csv, BenchError, Experiment, Family};
use formdepth_core::hardpoly::{check_gate_counts, check_prefix_property_of, gen_hard, HardParams};
use formdepth_core::pit::PitConfig;
use formdepth_core::poly::expand;
use formdepth_core::stack::with_large_stack;
use formdepth_core::text::parse_with_default_prime;
use formdepth_core::transforms::{binarize, homogenize, run_pass};
use formdepth_core::{
    metrics, serialize, Delta, Epsilon, Error, Formula, Mode, PassSpec, Report, VerifyMethod, VerifyOptions,
    DEFAULT_TABLE_BUDGET, MERSENNE_61,
};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "formdepth", version, about = "Depth reduction for algebraic formulas")]
struct Cli {
    /// Prime used for a bare `field: Fp` header.
    #[arg(long, global = true, env = "FORMDEPTH_PRIME", default_value_t = MERSENNE_61)]
    prime: u64,
    /// Seed for identity testing and random families.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Render reports for people instead of as JSON lines.
    #[arg(long, global = true)]
    human: bool,
    /// Append reports to this file instead of stderr.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// Expansion table budget.
    #[arg(long, global = true, default_value_t = DEFAULT_TABLE_BUDGET)]
    budget: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Write the formula here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Structural metrics of a formula.
    Stats { file: PathBuf },
    /// Parse and check well-formedness.
    Validate { file: PathBuf },
    /// Print the exact expansion.
    Expand { file: PathBuf },
    /// Run a depth-reduction pass and check the result.
    Reduce {
        file: PathBuf,
        /// bb, main, nearlinear, homogeneous or pipeline.
        #[arg(long, default_value = "main")]
        method: String,
        #[arg(long, default_value = "auto")]
        delta: Delta,
        #[arg(long, default_value = "auto")]
        epsilon: Epsilon,
        #[arg(long)]
        no_verify: bool,
        /// expand, pit or auto.
        #[arg(long, default_value = "auto")]
        verify_method: VerifyMethod,
        #[command(flatten)]
        out: Output,
    },
    /// Extract one homogeneous component.
    Homogenize {
        file: PathBuf,
        #[arg(long)]
        degree: u64,
        #[arg(long)]
        no_verify: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Rewrite every product gate to fan-in 2.
    Prodfanin2 {
        file: PathBuf,
        #[arg(long)]
        no_verify: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Emit the canonical formula for the nested inner product.
    GenHard {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        r: u32,
        #[command(flatten)]
        out: Output,
    },
    /// Run the hard-polynomial checkers on the canonical formula or a given one.
    CheckHard {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        r: u32,
        file: Option<PathBuf>,
    },
    /// Compare two formulas.
    VerifyEqual {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value = "auto")]
        method: VerifyMethod,
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
    /// Run experiments and print a frontier table as CSV.
    Bench {
        /// comb:N, random-homogeneous:VARS:D:S, random-skew:S:SUMDEPTH, hard:K:R,
        /// elementary-symmetric:N:D or file:PATH. Repeatable.
        #[arg(long, required = true)]
        family: Vec<String>,
        /// Pass as NAME or NAME:PARAM, e.g. main:auto, bb:1/2. Repeatable.
        #[arg(long, required = true)]
        pass: Vec<String>,
        #[arg(long, default_value_t = 1)]
        repetitions: usize,
        #[arg(long)]
        noncommutative: bool,
        #[arg(long, default_value = "auto")]
        verify: VerifyMethod,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Write zero durations so reruns are byte-identical.
        #[arg(long)]
        no_timing: bool,
    },
}

enum Failure {
    Verification(String),
    Usage(String),
    Budget(String),
    Other(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Verification(_) | Failure::Other(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Budget(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Verification(m) | Failure::Usage(m) | Failure::Budget(m) | Failure::Other(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let m = e.to_string();
        match e {
            Error::BudgetExceeded { .. } => Failure::Budget(m),
            Error::Syntax { .. }
            | Error::WellFormedness(_)
            | Error::InvalidParams(_)
            | Error::ParamOutOfRange(_)
            | Error::ModeMismatch
            | Error::FieldMismatch
            | Error::FieldUnordered
            | Error::NotFanIn2(_)
            | Error::NotSemanticallyHomogeneous
            | Error::UniverseTooLarge { .. }
            | Error::InfeasibleShape(_) => Failure::Usage(m),
            _ => Failure::Other(m),
        }
    }
}

impl From<BenchError> for Failure {
    fn from(e: BenchError) -> Self {
        match e {
            BenchError::Core(e) => e.into(),
            BenchError::Usage(m) => Failure::Usage(m),
            other => Failure::Other(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

struct Ctx {
    prime: u64,
    seed: u64,
    human: bool,
    report: Option<PathBuf>,
    budget: usize,
}

impl Ctx {
    fn load(&self, path: &Path) -> Result<Formula, Failure> {
        let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        Ok(parse_with_default_prime(&text, self.prime)?)
    }

    fn emit_report(&self, value: &Value) -> Outcome {
        let line = if self.human {
            serde_json::to_string_pretty(value).expect("json value")
        } else {
            value.to_string()
        };
        self.emit_line(&line)
    }

    fn emit_pass_report(&self, r: &Report) -> Outcome {
        let line = if self.human { r.to_human() } else { r.to_json_line() };
        self.emit_line(line.trim_end())
    }

    fn emit_line(&self, line: &str) -> Outcome {
        match &self.report {
            Some(path) => {
                let mut f = fs::OpenOptions::new().create(true).append(true).open(path)?;
                writeln!(f, "{line}")?;
            }
            None => eprintln!("{line}"),
        }
        Ok(())
    }

    fn verify_options(&self, method: VerifyMethod, trials: usize) -> VerifyOptions {
        VerifyOptions {
            method,
            table_budget: self.budget,
            pit: PitConfig { trials, seed: self.seed, ..PitConfig::default() },
        }
    }
}

fn write_out(out: &Output, text: &str) -> Outcome {
    match &out.output {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run_checked(ctx: &Ctx, f: &Formula, pass: PassSpec, no_verify: bool, method: VerifyMethod, out: &Output) -> Outcome {
    let opts = ctx.verify_options(method, 20);
    let run = run_pass(f, pass, ctx.budget, (!no_verify).then_some(&opts))?;
    write_out(out, &serialize(&run.output))?;
    ctx.emit_pass_report(&run.report)?;
    match &run.report.verification {
        Some(v) if !v.passed() => Err(Failure::Verification(format!("output is not equivalent to the input ({})", v.verdict))),
        _ => Ok(()),
    }
}

fn check_hard(ctx: &Ctx, k: u32, r: u32, file: Option<&Path>) -> Outcome {
    let p = HardParams::new(k, r)?;
    let f = match file {
        Some(path) => ctx.load(path)?,
        None => gen_hard(&p)?,
    };
    let monomials = expand(&f, ctx.budget)?.len() as u128;
    let prefix = check_prefix_property_of(&f, &p, ctx.budget)?;
    let gates = match check_gate_counts(&f, &p, ctx.budget) {
        Ok(v) => json!({ "holds": v.holds, "gates_checked": v.gates_checked, "violations": v.violations.len() }),
        Err(Error::NotComputingH) => json!({ "holds": false, "error": Error::NotComputingH.to_string() }),
        Err(e) => return Err(e.into()),
    };
    let pass = monomials == p.monomial_count() && prefix.is_none() && gates["holds"] == true;
    ctx.emit_report(&json!({
        "pass": "check-hard",
        "k": k,
        "r": r,
        "monomials": monomials.to_string(),
        "expected_monomials": p.monomial_count().to_string(),
        "prefix_violation": prefix,
        "gate_counts": gates,
        "holds": pass,
    }))?;
    if pass {
        Ok(())
    } else {
        Err(Failure::Verification("hard-polynomial checks failed".into()))
    }
}

fn homogenize_cmd(ctx: &Ctx, f: &Formula, degree: u64, no_verify: bool, out: &Output) -> Outcome {
    let g = binarize(f);
    let mut report = Report::new("homogenize", metrics(f));
    let start = std::time::Instant::now();
    let mut comps = homogenize(&g, degree)?;
    let comp = comps.pop().flatten();
    report.duration_us = start.elapsed().as_micros() as u64;
    report.output = comp.as_ref().map(metrics);
    let mut value = serde_json::to_value(&report).expect("report serializes");
    if !no_verify {
        let want = expand(f, ctx.budget)?.homogeneous_parts().remove(&(degree as usize));
        let got = comp.as_ref().map(|c| expand(c, ctx.budget)).transpose()?;
        let equal = want.filter(|p| !p.is_empty()) == got;
        value["verification"] = json!({ "verdict": if equal { "equal" } else { "unequal" }, "method": "expand" });
        if !equal {
            ctx.emit_report(&value)?;
            return Err(Failure::Verification("component does not match the expansion".into()));
        }
    }
    match &comp {
        Some(c) => write_out(out, &serialize(c))?,
        None => value["zero"] = json!(true),
    }
    ctx.emit_report(&value)
}

#[allow(clippy::too_many_arguments)]
fn bench(
    ctx: &Ctx,
    families: &[String],
    passes: &[String],
    repetitions: usize,
    noncommutative: bool,
    verify: VerifyMethod,
    csv: Option<&Path>,
    no_timing: bool,
) -> Outcome {
    let mut experiments = Vec::new();
    for fam in families {
        let family: Family = fam.parse()?;
        for p in passes {
            let pass: PassSpec = p.parse()?;
            let mut e = Experiment::new(family.clone(), pass, ctx.seed);
            e.repetitions = repetitions;
            e.mode = if noncommutative { Mode::NonCommutative } else { Mode::Commutative };
            e.verify = verify;
            e.table_budget = ctx.budget;
            experiments.push(e);
        }
    }
    let rows = run_batch(&experiments);
    match csv {
        Some(path) => write_csv(&rows, fs::File::create(path)?, !no_timing)?,
        None => write_csv(&rows, std::io::stdout().lock(), !no_timing)?,
    }
    let constants = fit_constants(&rows, 1.5);
    ctx.emit_report(&json!({ "pass": "bench", "seed": ctx.seed, "constants": constants }))?;
    if constants.failed > 0 {
        return Err(Failure::Verification(format!("{} of {} rows failed", constants.failed, rows.len())));
    }
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    let ctx = Ctx { prime: cli.prime, seed: cli.seed, human: cli.human, report: cli.report, budget: cli.budget };
    match cli.command {
        Command::Stats { file } => {
            let f = ctx.load(&file)?;
            let mut v = serde_json::to_value(metrics(&f)).expect("metrics serialize");
            v["pass"] = json!("stats");
            v["mode"] = json!(f.mode.to_string());
            v["field"] = json!(f.field.to_string());
            v["fanin2"] = json!(f.is_fanin2());
            ctx.emit_report(&v)
        }
        Command::Validate { file } => {
            let f = ctx.load(&file)?;
            ctx.emit_report(&json!({ "pass": "validate", "valid": true, "size": f.size() }))
        }
        Command::Expand { file } => {
            let f = ctx.load(&file)?;
            let p = expand(&f, ctx.budget)?;
            println!("{p}");
            ctx.emit_report(&json!({ "pass": "expand", "terms": p.len() }))
        }
        Command::Reduce { file, method, delta, epsilon, no_verify, verify_method, out } => {
            let f = ctx.load(&file)?;
            if !matches!(method.as_str(), "bb" | "main" | "nearlinear" | "homogeneous" | "pipeline") {
                return Err(Failure::Usage(format!("unknown method `{method}`")));
            }
            let pass = PassSpec::from_method(&method, delta, epsilon)?;
            run_checked(&ctx, &f, pass, no_verify, verify_method, &out)
        }
        Command::Homogenize { file, degree, no_verify, out } => {
            let f = ctx.load(&file)?;
            homogenize_cmd(&ctx, &f, degree, no_verify, &out)
        }
        Command::Prodfanin2 { file, no_verify, out } => {
            let f = ctx.load(&file)?;
            run_checked(&ctx, &f, PassSpec::Prodfanin2, no_verify, VerifyMethod::Auto, &out)
        }
        Command::GenHard { k, r, out } => {
            let m = gen_hard(&HardParams::new(k, r)?)?;
            write_out(&out, &serialize(&m))?;
            let mut v = serde_json::to_value(metrics(&m)).expect("metrics serialize");
            v["pass"] = json!("gen-hard");
            ctx.emit_report(&v)
        }
        Command::CheckHard { k, r, file } => check_hard(&ctx, k, r, file.as_deref()),
        Command::VerifyEqual { a, b, method, trials } => {
            let (f, g) = (ctx.load(&a)?, ctx.load(&b)?);
            let v = formdepth_core::verify::verify_equal(&f, &g, &ctx.verify_options(method, trials))?;
            let mut value = serde_json::to_value(&v).expect("verification serializes");
            value["pass"] = json!("verify-equal");
            ctx.emit_report(&value)?;
            if v.passed() {
                Ok(())
            } else {
                Err(Failure::Verification("formulas differ".into()))
            }
        }
        Command::Bench { family, pass, repetitions, noncommutative, verify, csv, no_timing } => {
            bench(&ctx, &family, &pass, repetitions, noncommutative, verify, csv.as_deref(), no_timing)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match with_large_stack(move || run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("formdepth: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
