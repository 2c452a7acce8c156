use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use selrec::harness::check::{evaluate, NATIVE};
use selrec::harness::demo::{demo_game, demo_search, random_payoffs, random_predicate};
use selrec::harness::instance::{parse_instance, InstanceSpec, DEFAULT_DEPTH};
use selrec::harness::random::RandomParams;
use selrec::harness::suite::{run_suite, Suite, SuiteConfig};
use selrec::harness::HarnessError;
use selrec::spector::{solve_spector_equations, verify_spector};
use selrec::{EvalError, Fuel, DEFAULT_FUEL};

const CHECK_FAILED: u8 = 1;
const INVALID_INPUT: u8 = 2;
const OUT_OF_FUEL: u8 = 3;

#[derive(Parser)]
#[command(name = "selrec", version, about = "Selection functions and bar recursion, run and cross-checked")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run property suites and the derived-vs-native equivalence matrix.
    Check {
        #[arg(long, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 50)]
        seeds: u64,
        #[arg(long, env = "SELREC_DEPTH", default_value_t = DEFAULT_DEPTH)]
        depth: usize,
        #[arg(long, env = "SELREC_FUEL", default_value_t = DEFAULT_FUEL)]
        fuel: u64,
        /// Write the TOML report here instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Evaluate one recursor (native or derived) on an instance file.
    Eval {
        #[arg(long)]
        recursor: String,
        #[arg(long)]
        instance: PathBuf,
        /// Index range of a sequence output, e.g. `0..20`.
        #[arg(long)]
        indices: Option<String>,
    },
    /// Solve and verify Spector's equations for an instance file.
    SolveSpector {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Worked examples with an independent oracle.
    Demo {
        which: DemoKind,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Parse and validate an instance file.
    Validate {
        #[arg(long)]
        instance: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DemoKind {
    Game,
    Search,
}

fn env_fuel() -> Option<u64> {
    std::env::var("SELREC_FUEL").ok()?.parse().ok()
}

fn env_depth() -> Option<usize> {
    std::env::var("SELREC_DEPTH").ok()?.parse().ok()
}

fn load(path: &PathBuf) -> Result<InstanceSpec, HarnessError> {
    parse_instance(&fs::read_to_string(path)?)
}

fn parse_range(text: &str) -> Result<(usize, usize), HarnessError> {
    let bad = || HarnessError::Parse(format!("index range {text:?} is not of the form A..B"));
    let (a, b) = text.split_once("..").ok_or_else(bad)?;
    let (a, b): (usize, usize) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    if a > b {
        return Err(bad());
    }
    Ok((a, b))
}

fn fail(e: HarnessError) -> ExitCode {
    eprintln!("selrec: {e}");
    match e {
        HarnessError::Eval(EvalError::FuelExhausted { .. }) => ExitCode::from(OUT_OF_FUEL),
        HarnessError::Eval(_) => ExitCode::from(CHECK_FAILED),
        _ => ExitCode::from(INVALID_INPUT),
    }
}

fn pass_code(pass: bool) -> ExitCode {
    if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(CHECK_FAILED)
    }
}

fn run(cli: Cli) -> Result<ExitCode, HarnessError> {
    match cli.command {
        Command::Check { suite, seeds, depth, fuel, report } => {
            let cfg = SuiteConfig {
                suite,
                seeds,
                depth,
                fuel,
                params: RandomParams::default(),
            };
            let result = run_suite(&cfg);
            let text = result.to_toml();
            match report {
                Some(path) => fs::write(path, &text)?,
                None => print!("{text}"),
            }
            eprintln!(
                "{} properties, {} pairs, {} failing",
                result.properties.len(),
                result.pairs.len(),
                result.failures()
            );
            Ok(pass_code(result.pass))
        }
        Command::Eval { recursor, instance, indices } => {
            let spec = load(&instance)?;
            let known = NATIVE.contains(&recursor.as_str())
                || selrec::harness::check::find_pair(&recursor).is_some();
            if !known {
                return Err(HarnessError::Parse(format!(
                    "unknown recursor {recursor:?}; natives are {}",
                    NATIVE.join(", ")
                )));
            }
            let inst = spec.build();
            let (from, to) = match indices {
                Some(r) => parse_range(&r)?,
                None => (0, env_depth().unwrap_or(inst.depth)),
            };
            let fuel = Fuel::new(spec.fuel.or_else(env_fuel).unwrap_or(DEFAULT_FUEL));
            let out = evaluate(&recursor, &inst, &fuel, from, to)?;
            println!("recursor = {recursor:?}");
            println!("output = {out}");
            println!("fuel_used = {}", fuel.used());
            Ok(ExitCode::SUCCESS)
        }
        Command::SolveSpector { instance } => {
            let spec = load(&instance)?;
            let inst = spec.build();
            let fuel = Fuel::new(spec.fuel.or_else(env_fuel).unwrap_or(DEFAULT_FUEL));
            let sol = solve_spector_equations(&inst.selections, &inst.outcome, &inst.omega, &inst.domain(), &fuel)?;
            let report = verify_spector(&sol, &inst.selections, &inst.outcome, &inst.omega)?;
            let depth = env_depth().unwrap_or(inst.depth).max(sol.n + 1);
            let alpha: Vec<String> = sol.alpha.prefix(depth)?.iter().map(|v| v.to_string()).collect();
            let p: Vec<String> = sol.p.iter().map(|(x, r)| format!("{x} -> {r}")).collect();
            println!("n = {}", sol.n);
            println!("alpha = [{}]", alpha.join(", "));
            println!("p = [{}]", p.join(", "));
            for eq in &report.equations {
                let verdict = if eq.pass { "ok" } else { "FAIL" };
                println!("{verdict}: {}  ({} = {})", eq.name, eq.lhs, eq.rhs);
            }
            Ok(pass_code(report.all_pass()))
        }
        Command::Demo { which, depth, seed } => {
            let (text, agrees) = match which {
                DemoKind::Game => {
                    let r = demo_game(depth, &random_payoffs(depth, seed))?;
                    (toml::to_string(&r).expect("serializable"), r.agrees)
                }
                DemoKind::Search => {
                    let fuel = Fuel::new(env_fuel().unwrap_or(DEFAULT_FUEL));
                    let r = demo_search(depth, &random_predicate(depth, seed), &fuel)?;
                    (toml::to_string(&r).expect("serializable"), r.agrees)
                }
            };
            print!("{text}");
            Ok(pass_code(agrees))
        }
        Command::Validate { instance } => {
            load(&instance)?;
            println!("ok");
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { INVALID_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    run(cli).unwrap_or_else(fail)
}
