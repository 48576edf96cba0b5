use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cpwb::denotations::{denote_set, set_to_json_string, tuple_to_json, ObsTuple};
use cpwb::harness::{run_suite, SuiteConfig};
use cpwb::oracle::{observe, ConfigError};
use cpwb::syntax::{Name, Process};
use cpwb::text::{parse_config, parse_context, parse_process, print_context, print_process, SyntaxError};
use cpwb::transformers::check_transformer_context;
use cpwb::translation::{translate_context, translate_process};
use cpwb::typing::{check, fill, show_ctx, Context, System, TypeError};

const EXIT_PROPERTY: u8 = 1;
const EXIT_PARSE: u8 = 3;
const EXIT_TYPE: u8 = 4;
const EXIT_IO: u8 = 5;

#[derive(Parser)]
#[command(name = "cpwb", version, about = "Classical Processes workbench")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Type-check a process and print its derivation summary.
    Check {
        file: PathBuf,
        #[arg(long, default_value = "")]
        ctx: String,
        #[arg(long, default_value = "cp")]
        sys: System,
    },
    /// Print the bounded denotation as JSON.
    Denote {
        file: PathBuf,
        #[arg(long, default_value = "")]
        ctx: String,
        #[arg(short = 'K', default_value_t = 2)]
        k: usize,
        #[arg(long, default_value = "cp02")]
        sys: System,
    },
    /// Run a configuration to completion along every reduction path.
    Observe {
        file: PathBuf,
        /// Types of the free names of the configuration.
        #[arg(long, default_value = "")]
        ctx: String,
        #[arg(short = 'K', default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 10_000)]
        depth: usize,
        #[arg(long, default_value = "cp02")]
        sys: System,
    },
    /// Print the negative translation of a process, with its context as a comment.
    Translate {
        file: PathBuf,
        #[arg(long, default_value = "")]
        ctx: String,
        #[arg(long, default_value = "cp02")]
        sys: System,
        /// Also print the typing derivation of the translated process.
        #[arg(long)]
        emit_typing: bool,
    },
    /// Print the process placed in its transformer context.
    Transform {
        file: PathBuf,
        #[arg(long, default_value = "")]
        ctx: String,
        #[arg(long, default_value = "cp02")]
        sys: System,
    },
    /// Decide observational equivalence; exits 1 and prints the difference otherwise.
    Equiv {
        left: PathBuf,
        right: PathBuf,
        #[arg(long, default_value = "")]
        ctx: String,
        #[arg(short = 'K', default_value_t = 2)]
        k: usize,
        #[arg(long, default_value = "cp02")]
        sys: System,
    },
    /// Run the property suites.
    Suite {
        /// JSON suite configuration; defaults apply to omitted fields.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
}

enum Failure {
    Io(String),
    Parse(String, SyntaxError),
    Type(String),
    Property(String),
}

impl Failure {
    fn report(&self) -> ExitCode {
        let (code, msg) = match self {
            Failure::Io(m) => (EXIT_IO, m.clone()),
            Failure::Parse(what, e) => (EXIT_PARSE, format!("{}: {}", what, e)),
            Failure::Type(m) => (EXIT_TYPE, format!("type error: {}", m)),
            Failure::Property(m) => (EXIT_PROPERTY, m.clone()),
        };
        if !msg.is_empty() {
            eprintln!("{}", msg);
        }
        ExitCode::from(code)
    }
}

impl From<TypeError> for Failure {
    fn from(e: TypeError) -> Self {
        Failure::Type(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {}", path.display(), e)))
}

fn load_process(path: &Path) -> Result<Process, Failure> {
    parse_process(&read(path)?).map_err(|e| Failure::Parse(path.display().to_string(), e))
}

fn load_ctx(src: &str) -> Result<Context, Failure> {
    parse_context(src).map_err(|e| Failure::Parse("--ctx".into(), e))
}

fn diff_lines(sign: char, xs: &BTreeSet<ObsTuple>) {
    for t in xs {
        println!("{} {}", sign, tuple_to_json(t));
    }
}

fn run(cmd: Cmd) -> Result<(), Failure> {
    match cmd {
        Cmd::Check { file, ctx, sys } => {
            let d = check(&load_process(&file)?, &load_ctx(&ctx)?, sys)?;
            print!("{}", d.summary());
        }
        Cmd::Denote { file, ctx, k, sys } => {
            let d = check(&load_process(&file)?, &load_ctx(&ctx)?, sys)?;
            println!("{}", set_to_json_string(&denote_set(&d, k)));
        }
        Cmd::Observe { file, ctx, k, depth, sys } => {
            let raw = parse_config(&read(&file)?).map_err(|e| Failure::Parse(file.display().to_string(), e))?;
            let c = raw.resolve(&load_ctx(&ctx)?, sys).map_err(config_failure)?;
            let obs = observe(&c, k, depth).map_err(config_failure)?;
            println!("{}", set_to_json_string(&obs));
        }
        Cmd::Translate { file, ctx, sys, emit_typing } => {
            let ctx = load_ctx(&ctx)?;
            let d = check(&load_process(&file)?, &ctx, sys)?;
            let lp = translate_process(&d);
            let lctx = translate_context(&ctx, &Name::new("w"));
            println!("{}", print_process(&lp));
            println!("# {}", print_context(&lctx));
            if emit_typing {
                let ld = check(&lp, &lctx, System::Cp02)?;
                for line in ld.summary().lines() {
                    println!("# {}", line);
                }
            }
        }
        Cmd::Transform { file, ctx, sys } => {
            let ctx = load_ctx(&ctx)?;
            let p = load_process(&file)?;
            check(&p, &ctx, sys)?;
            let z = Name::new("z");
            let (k, cd) = check_transformer_context(&ctx, &z)?;
            println!("{}", print_process(&fill(&k, &p)));
            println!("# {}", print_context(cd.result()));
        }
        Cmd::Equiv { left, right, ctx, k, sys } => {
            let ctx = load_ctx(&ctx)?;
            let (p, q) = (load_process(&left)?, load_process(&right)?);
            let at = |side: &str, e: TypeError| Failure::Type(format!("{} process at {}: {}", side, show_ctx(&ctx), e));
            let dp = check(&p, &ctx, sys).map_err(|e| at("left", e))?;
            let dq = check(&q, &ctx, sys).map_err(|e| at("right", e))?;
            let (sp, sq) = (denote_set(&dp, k), denote_set(&dq, k));
            if sp == sq {
                println!("equivalent");
            } else {
                println!("not equivalent");
                diff_lines('-', &sp.difference(&sq).cloned().collect());
                diff_lines('+', &sq.difference(&sp).cloned().collect());
                return Err(Failure::Property(String::new()));
            }
        }
        Cmd::Suite { config, json } => {
            let mut cfg = match config {
                Some(path) => serde_json::from_str::<SuiteConfig>(&read(&path)?)
                    .map_err(|e| Failure::Io(format!("{}: {}", path.display(), e)))?,
                None => SuiteConfig::default(),
            };
            if let Ok(seed) = std::env::var("CPWB_SEED") {
                cfg.seed = seed.trim().parse().map_err(|_| Failure::Io(format!("CPWB_SEED is not an integer: {}", seed)))?;
            }
            let report = run_suite(&cfg).map_err(|e| Failure::Io(e.to_string()))?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report.to_json()).expect("report serializes"));
            } else {
                print!("{}", report);
            }
            if !report.passed() {
                return Err(Failure::Property("some suites failed".into()));
            }
        }
    }
    Ok(())
}

fn config_failure(e: ConfigError) -> Failure {
    match e {
        ConfigError::Type(t) => Failure::Type(t.to_string()),
        ConfigError::CutTypeMismatch(_) | ConfigError::NameClash(_) | ConfigError::Untypable(_) | ConfigError::OpenConfiguration(_) => {
            Failure::Type(e.to_string())
        }
        ConfigError::DepthExceeded { .. } => Failure::Property(e.to_string()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => f.report(),
    }
}
