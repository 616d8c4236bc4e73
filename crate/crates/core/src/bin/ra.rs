use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ra_core::compiler::{compile, compile_deterministic, COMPILED_MAX_WEIGHT};
use ra_core::complexity::{profile_boundedness, to_nfa};
use ra_core::dot::{emit_diagram, DiagramSpec};
use ra_core::io::{format_ra_document, parse_ra_document, parse_sm, RaDocument};
use ra_core::process::{accepts, enumerate_language, verdict_line, SearchBudget, Verdict};
use ra_core::stackmachine::MachineVerdict;
use ra_core::word::{format_word, parse_word};
use ra_core::{Error, Result, Symbol};

/// Reaction automata toolkit.
#[derive(Parser)]
#[command(name = "ra", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct BudgetArgs {
    /// Largest configuration weight (default 10000, or 65536 for compiled automata)
    #[arg(long)]
    max_weight: Option<u64>,
    /// Longest process, in steps
    #[arg(long, default_value_t = 10_000)]
    max_steps: usize,
    /// Most distinct states explored
    #[arg(long, default_value_t = 1_000_000)]
    max_states: usize,
}

impl BudgetArgs {
    fn budget(&self, doc: &RaDocument) -> SearchBudget {
        let default = SearchBudget::default();
        let weight = if doc.is_compiled() {
            COMPILED_MAX_WEIGHT
        } else {
            default.max_weight
        };
        SearchBudget {
            max_weight: self.max_weight.unwrap_or(weight),
            max_steps: self.max_steps,
            max_states: self.max_states,
            ..default
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether the automaton accepts a string (exit 0 accepted, 1 rejected, 2 undecided)
    Accept {
        file: PathBuf,
        string: String,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Print a shortest accepting process for a string
    Trace {
        file: PathBuf,
        string: String,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// List verdicts for every string up to a length
    Enumerate {
        file: PathBuf,
        #[arg(long)]
        max_len: usize,
        /// Print accepted strings only
        #[arg(long)]
        accepted: bool,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Check a `.ra` automaton or a `.sm` machine for well-formedness
    Validate { file: PathBuf },
    /// Compile a restricted two-stack machine into a reaction automaton
    Compile {
        file: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Emit the deterministic variant
        #[arg(long)]
        deterministic: bool,
        /// Where to write the reaction category table (default: <output>.categories)
        #[arg(long)]
        categories: Option<PathBuf>,
    },
    /// Run a stack machine on a string
    RunSm {
        file: PathBuf,
        string: String,
        #[arg(long, default_value_t = 10_000)]
        max_steps: usize,
        /// Print every configuration
        #[arg(long)]
        trace: bool,
    },
    /// Measure the workspace of each string in a file (one per line, `λ` for the empty string)
    Profile {
        file: PathBuf,
        #[arg(long)]
        strings: PathBuf,
        /// Largest weight bound tried
        #[arg(long, default_value_t = 1 << 16)]
        cap: u64,
        /// Write the CSV report here instead of standard output
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Build the NFA of a k-bounded automaton and write it as DOT
    ToNfa {
        file: PathBuf,
        #[arg(long)]
        k: u64,
        #[arg(short, long)]
        output: PathBuf,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Draw all processes on the given strings as a DOT reaction diagram
    Diagram {
        file: PathBuf,
        /// Comma-separated strings
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        strings: Vec<String>,
        #[arg(short, long)]
        output: PathBuf,
        /// Omit reaction bags from edge labels
        #[arg(long)]
        no_bags: bool,
        /// Keep converged non-accepting configurations as separate nodes
        #[arg(long)]
        no_collapse: bool,
        #[command(flatten)]
        budget: BudgetArgs,
    },
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Usage(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Usage(format!("cannot write {}: {e}", path.display())))
}

fn load_ra(path: &Path) -> Result<RaDocument> {
    parse_ra_document(&read(path)?)
}

fn word(doc: &RaDocument, text: &str) -> Result<Vec<Symbol>> {
    parse_word(text, doc.automaton.input_alphabet())
}

fn verdict_exit(v: &Verdict) -> u8 {
    v.exit_code() as u8
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Accept { file, string, budget } => {
            let doc = load_ra(&file)?;
            let w = word(&doc, &string)?;
            let v = accepts(&doc.automaton, &w, &budget.budget(&doc))?;
            println!("{}", verdict_line(&w, &v));
            Ok(verdict_exit(&v))
        }
        Command::Trace { file, string, budget } => {
            let doc = load_ra(&file)?;
            let w = word(&doc, &string)?;
            let v = accepts(&doc.automaton, &w, &budget.budget(&doc))?;
            println!("{}", verdict_line(&w, &v));
            if let Some(t) = v.witness() {
                println!("0\t-\t-\t{}", t.initial);
                for (i, s) in t.steps.iter().enumerate() {
                    let fed = s.fed.as_ref().map_or("-".into(), ToString::to_string);
                    let bag = s.bag.as_ref().map_or("-".into(), ToString::to_string);
                    println!("{}\t{fed}\t{bag}\t{}", i + 1, s.config);
                }
            }
            Ok(verdict_exit(&v))
        }
        Command::Enumerate {
            file,
            max_len,
            accepted,
            budget,
        } => {
            let doc = load_ra(&file)?;
            for (w, v) in enumerate_language(&doc.automaton, max_len, &budget.budget(&doc))? {
                if !accepted || v.is_accepted() {
                    println!("{}", verdict_line(&w, &v));
                }
            }
            Ok(0)
        }
        Command::Validate { file } => {
            let text = read(&file)?;
            if file.extension().is_some_and(|e| e == "sm") {
                let m = parse_sm(&text)?;
                let diags = m.validate_restricted();
                if !diags.is_empty() {
                    return Err(Error::Invalid(diags.iter().map(ToString::to_string).collect()));
                }
                println!(
                    "valid restricted {}-stack machine: {} states, {} rules",
                    m.k(),
                    m.states.len(),
                    m.rules.len()
                );
            } else {
                let ra = parse_ra_document(&text)?.automaton;
                println!(
                    "valid reaction automaton: {} symbols, {} reactions, deterministic: {}",
                    ra.background().len(),
                    ra.reactions().len(),
                    if ra.is_deterministic() { "yes" } else { "no" }
                );
            }
            Ok(0)
        }
        Command::Compile {
            file,
            output,
            deterministic,
            categories,
        } => {
            let m = parse_sm(&read(&file)?)?;
            let out = if deterministic {
                compile_deterministic(&m)?
            } else {
                compile(&m)?
            };
            let doc = RaDocument {
                automaton: out.automaton.clone(),
                origin: Some("compiled".into()),
            };
            write(&output, &format_ra_document(&doc))?;
            let table = categories.unwrap_or_else(|| {
                let mut p = output.clone().into_os_string();
                p.push(".categories");
                p.into()
            });
            write(&table, &out.format_categories())?;
            println!(
                "{} symbols, {} reactions{}",
                out.automaton.background().len(),
                out.automaton.reactions().len(),
                if deterministic { ", deterministic" } else { "" }
            );
            for (c, n) in out.category_counts() {
                println!("{c}\t{n}");
            }
            eprintln!(
                "note: configuration weight grows as 2^(stack height); compiled automata run with --max-weight {COMPILED_MAX_WEIGHT} by default"
            );
            Ok(0)
        }
        Command::RunSm {
            file,
            string,
            max_steps,
            trace,
        } => {
            let m = parse_sm(&read(&file)?)?;
            let w = parse_word(&string, &m.input)?;
            let run = m.run_trace(&w, max_steps)?;
            if trace {
                for (i, c) in run.configs.iter().enumerate() {
                    let rule = if i == 0 { "-" } else { run.rules[i - 1].as_str() };
                    println!("{i}\t{rule}\t{c}");
                }
            }
            println!("{}\t{}", format_word(&w), run.verdict);
            Ok(match run.verdict {
                MachineVerdict::Accepted => 0,
                MachineVerdict::Rejected => 1,
                MachineVerdict::Undecided => 2,
            })
        }
        Command::Profile {
            file,
            strings,
            cap,
            output,
            budget,
        } => {
            let doc = load_ra(&file)?;
            let words = read(&strings)?
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(|l| word(&doc, l))
                .collect::<Result<Vec<_>>>()?;
            let report = profile_boundedness(&doc.automaton, &words, cap, &budget.budget(&doc))?;
            let csv = report.to_csv()?;
            match output {
                Some(p) => write(&p, &csv)?,
                None => print!("{csv}"),
            }
            eprint!("{}", report.summary());
            Ok(0)
        }
        Command::ToNfa {
            file,
            k,
            output,
            budget,
        } => {
            let doc = load_ra(&file)?;
            let nfa = to_nfa(&doc.automaton, k, &budget.budget(&doc))?;
            write(&output, &nfa.to_dot())?;
            let edges: usize = nfa.transitions.values().map(|t| t.len()).sum();
            println!(
                "{} states, {} transitions, {} final",
                nfa.states.len(),
                edges,
                nfa.finals.len()
            );
            Ok(0)
        }
        Command::Diagram {
            file,
            strings,
            output,
            no_bags,
            no_collapse,
            budget,
        } => {
            let doc = load_ra(&file)?;
            let words = strings
                .iter()
                .map(|s| word(&doc, s))
                .collect::<Result<Vec<_>>>()?;
            let spec = DiagramSpec {
                strings: words,
                show_bags: !no_bags,
                collapse_rejected: !no_collapse,
            };
            write(&output, &emit_diagram(&doc.automaton, &spec, &budget.budget(&doc))?)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 64 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
