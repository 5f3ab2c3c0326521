//! Command-line front end.
//!
//! Machine-readable results go to `out`, diagnostics to `err`. Exit codes:
//! 0 ok or pass, 1 usage, 2 invalid input, 3 failing verdict.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::automata::{lts_to_fsa, parse_regex, Fsa};
use crate::conformance::{check_conf, check_ioco, Outcome, Verdict};
use crate::models::{validate_model, Iolts, RawModel};
use crate::runner::{count_lower_bound, defeat_acyclic_fault_model, run_fault_model, Aggregate};
use crate::testgen::{
    complete_test_purpose, gen_fault_model, gen_scheme_suite, model_sha256, purpose_for_word, ArtifactKind,
    FaultModel, GenOptions, Provenance, TestgenError,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_FAIL: i32 = 3;

/// Purposes generated without `--max-purposes` before giving up.
pub const DEFAULT_BUDGET: usize = 100_000;

#[derive(Parser, Debug)]
#[command(name = "ioconf", version, about = "ioco and (D,F)-conformance checking and test generation for IOLTS models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    Faultmodel,
    Schemes,
    Singletp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Transform {
    InputEnabled,
    OutputDeterministic,
    All,
    None,
}

#[derive(Args, Debug)]
struct GenArgs {
    spec: PathBuf,
    #[arg(long, default_value_t = 1)]
    m: usize,
    #[arg(long, value_enum, default_value_t = Kind::Faultmodel)]
    kind: Kind,
    #[arg(long, value_enum, value_delimiter = ',')]
    transforms: Vec<Transform>,
    #[arg(long)]
    out: PathBuf,
    /// Keep at most N purposes (in enumeration order), warning when some are dropped.
    #[arg(long)]
    max_purposes: Option<usize>,
    /// Refuse to generate more purposes than this unless --max-purposes is given.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
    /// Only the purposes for these words (labels separated by ',' or spaces, or run together).
    #[arg(long)]
    word: Vec<String>,
    /// Order in which spec states are numbered (comma separated).
    #[arg(long, value_delimiter = ',')]
    enumeration: Option<Vec<String>>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a model file; with --normalize, drop internal self-loops and unreachable states.
    Validate {
        model: PathBuf,
        #[arg(long)]
        normalize: bool,
        /// Where to write the normalized model (default: rewrite the input file).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// (D,F)-conformance; D and F are regexes over the spec's labels or @file.json automata.
    Conf {
        spec: PathBuf,
        imp: PathBuf,
        #[arg(long = "D", visible_alias = "d", default_value = "")]
        d: String,
        #[arg(long = "F", visible_alias = "f", default_value = "")]
        f: String,
    },
    /// ioco conformance.
    Ioco { spec: PathBuf, imp: PathBuf },
    /// Generate a fault model, a scheme suite or the single complete test purpose.
    Gen(GenArgs),
    /// Run an implementation against a generated directory.
    Run {
        imp: PathBuf,
        dir: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Count of words of length m in (0+11)* against the golden-ratio bound.
    Lowerbound {
        #[arg(long)]
        m: usize,
    },
    /// Implementation that passes an acyclic fault model of the one-state spec yet violates ioco.
    Defeat { dir: PathBuf },
    /// Structural class report of a model.
    Classify { model: PathBuf },
    /// Quiescence extension of a model.
    Delta {
        model: PathBuf,
        #[arg(long)]
        dot: bool,
    },
    /// Observable-trace automaton of a model.
    Otr {
        model: PathBuf,
        #[arg(long)]
        dot: bool,
    },
}

enum Failure {
    Usage(String),
    Invalid(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Invalid(_) => EXIT_INVALID,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Invalid(m) => m,
        }
    }
}

fn invalid(e: impl std::fmt::Display) -> Failure {
    Failure::Invalid(e.to_string())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_model(path: &Path) -> Result<Iolts, Failure> {
    Iolts::from_json(&read(path)?, false).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable") + "\n"
}

fn language(arg: &str, alphabet: &[String]) -> Result<Fsa, Failure> {
    if let Some(file) = arg.strip_prefix('@') {
        let a = Fsa::from_json(&read(Path::new(file))?).map_err(|e| Failure::Invalid(format!("{file}: {e}")))?;
        return a.widen(alphabet).map_err(|e| Failure::Invalid(format!("{file}: {e}")));
    }
    if arg.trim().is_empty() {
        return Ok(Fsa::empty(alphabet.iter().cloned()));
    }
    parse_regex(arg, alphabet).map_err(|e| Failure::Invalid(format!("{arg:?}: {e}")))
}

/// Splits a word on ',' or whitespace; a single chunk that is not a label
/// is split by longest match over the labels.
fn split_word(word: &str, labels: &[String]) -> Result<Vec<String>, Failure> {
    let chunks: Vec<&str> = word.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
    if chunks.len() != 1 || labels.iter().any(|l| l == chunks[0]) {
        return Ok(chunks.into_iter().map(String::from).collect());
    }
    let mut rest = chunks[0];
    let mut out = vec![];
    while !rest.is_empty() {
        let best = labels.iter().filter(|l| !l.is_empty() && rest.starts_with(l.as_str())).max_by_key(|l| l.len());
        match best {
            Some(l) => {
                out.push(l.clone());
                rest = &rest[l.len()..];
            }
            None => return Err(Failure::Invalid(format!("word {word:?}: no label matches {rest:?}"))),
        }
    }
    Ok(out)
}

fn verdict_exit(v: &Verdict) -> i32 {
    match v.outcome {
        Outcome::Conforms => EXIT_OK,
        Outcome::Violates => EXIT_FAIL,
    }
}

#[derive(Serialize)]
struct GenSummary {
    out: String,
    kind: ArtifactKind,
    purposes: usize,
    paths: u128,
    truncated: bool,
}

fn generate(args: GenArgs, err: &mut dyn Write) -> Result<String, Failure> {
    let GenArgs { spec: spec_path, m, kind, transforms, out, max_purposes, budget, word: words, enumeration } = args;
    let spec = load_model(&spec_path)?;
    let mut opts = GenOptions { enumeration, ..GenOptions::default() };
    for t in &transforms {
        match t {
            Transform::InputEnabled => opts.input_enabled = true,
            Transform::OutputDeterministic => opts.output_deterministic = true,
            Transform::All => {
                opts.input_enabled = true;
                opts.output_deterministic = true;
            }
            Transform::None => {}
        }
    }
    let gen_err = |e: TestgenError| match e {
        TestgenError::BudgetExceeded { paths, cap } => Failure::Invalid(format!(
            "{paths} purposes exceed the budget of {cap}; pass --max-purposes N to keep the first N, or --word W"
        )),
        e => invalid(e),
    };
    let fm = match kind {
        Kind::Singletp => {
            let tp = complete_test_purpose(&spec).map_err(gen_err)?;
            let mut fm = FaultModel::empty(ArtifactKind::Singletp);
            fm.provenance.spec_sha256 = model_sha256(&spec);
            fm.provenance.paths = 1;
            fm.purposes = if max_purposes == Some(0) { vec![] } else { vec![tp] };
            fm
        }
        _ if !words.is_empty() => {
            let mut purposes = vec![];
            for w in &words {
                let word = split_word(w, spec.labels())?;
                let tp = purpose_for_word(&spec, m, &word, &opts).map_err(|e| match e {
                    TestgenError::NoSuchPath => Failure::Invalid(format!("word {w:?} is not a path to fail for m = {m}")),
                    e => gen_err(e),
                })?;
                purposes.push(tp);
            }
            purposes.truncate(max_purposes.unwrap_or(usize::MAX));
            let mut transforms = vec![];
            if opts.input_enabled {
                transforms.push("input-enabled".to_string());
            }
            if opts.output_deterministic {
                transforms.push("output-deterministic".to_string());
            }
            FaultModel {
                provenance: Provenance {
                    kind: ArtifactKind::Faultmodel,
                    spec_sha256: model_sha256(&spec),
                    m,
                    transforms,
                    enumeration: opts.enumeration.clone().unwrap_or_default(),
                    paths: purposes.len() as u128,
                    truncated: true,
                },
                purposes,
            }
        }
        _ => {
            opts.cap = Some(max_purposes.unwrap_or(budget));
            opts.truncate = max_purposes.is_some();
            let fm = if kind == Kind::Schemes {
                gen_scheme_suite(&spec, m, &opts)
            } else {
                gen_fault_model(&spec, m, &opts)
            }
            .map_err(gen_err)?;
            if fm.provenance.truncated {
                let _ = writeln!(
                    err,
                    "warning: kept {} of {} purposes; the result is not m-complete",
                    fm.purposes.len(),
                    fm.provenance.paths
                );
            }
            fm
        }
    };
    fm.save(&out).map_err(invalid)?;
    Ok(json(&GenSummary {
        out: out.display().to_string(),
        kind: fm.provenance.kind,
        purposes: fm.purposes.len(),
        paths: fm.provenance.paths,
        truncated: fm.provenance.truncated,
    }))
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let text = match command {
        Command::Validate { model, normalize, out: target } => {
            let raw: RawModel = serde_json::from_str(&read(&model)?)
                .map_err(|e| Failure::Invalid(format!("{}: {e}", model.display())))?;
            let m = validate_model(&raw, normalize).map_err(|e| Failure::Invalid(format!("{}: {e}", model.display())))?;
            if normalize {
                let target = target.unwrap_or(model);
                fs::write(&target, m.to_json() + "\n").map_err(|e| Failure::Usage(format!("{}: {e}", target.display())))?;
            }
            format!("valid: {} states, {} transitions\n", m.states().len(), m.transitions().len())
        }
        Command::Conf { spec, imp, d, f } => {
            let (s, i) = (load_model(&spec)?, load_model(&imp)?);
            let d = language(&d, s.labels())?;
            let f = language(&f, s.labels())?;
            let v = check_conf(&s, &i, &d, &f).map_err(invalid)?;
            write!(out, "{}", json(&v)).ok();
            return Ok(verdict_exit(&v));
        }
        Command::Ioco { spec, imp } => {
            let v = check_ioco(&load_model(&spec)?, &load_model(&imp)?).map_err(invalid)?;
            write!(out, "{}", json(&v)).ok();
            return Ok(verdict_exit(&v));
        }
        Command::Gen(args) => generate(args, err)?,
        Command::Run { imp, dir, jobs } => {
            let i = load_model(&imp)?;
            if !dir.is_dir() {
                return Err(Failure::Usage(format!("{} is not a directory", dir.display())));
            }
            let fm = FaultModel::load(&dir).map_err(invalid)?;
            let report = run_fault_model(&i, &fm, jobs).map_err(invalid)?;
            write!(out, "{}", json(&report)).ok();
            return Ok(if report.aggregate == Aggregate::Pass { EXIT_OK } else { EXIT_FAIL });
        }
        Command::Lowerbound { m } => json(&count_lower_bound(m)),
        Command::Defeat { dir } => {
            let fm = FaultModel::load(&dir).map_err(invalid)?;
            defeat_acyclic_fault_model(&fm).map_err(invalid)?.to_json() + "\n"
        }
        Command::Classify { model } => json(&load_model(&model)?.classify()),
        Command::Delta { model, dot } => {
            let ext = load_model(&model)?.delta_extend().map_err(invalid)?;
            if dot {
                ext.model().to_dot()
            } else {
                ext.model().to_json() + "\n"
            }
        }
        Command::Otr { model, dot } => {
            let a = lts_to_fsa(&load_model(&model)?);
            if dot {
                a.to_dot()
            } else {
                a.to_json() + "\n"
            }
        }
    };
    write!(out, "{text}").ok();
    Ok(EXIT_OK)
}

/// Parses `args` (including the program name) and runs one subcommand.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    write!(out, "{text}").ok();
                    EXIT_OK
                }
                _ => {
                    write!(err, "{text}").ok();
                    EXIT_USAGE
                }
            };
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(f) => {
            writeln!(err, "error: {}", f.message()).ok();
            f.code()
        }
    }
}
