//! Batch command-line interface: parse → materialize → check → query /
//! ingest / export.
//!
//! Exit codes: 0 success (no violations); 1 violations found, or a query
//! answered false/empty under `--expect-nonempty`; 2 parse or usage errors.
//! Machine-consumable results go to standard output; diagnostics and other
//! human-readable text go to standard error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use ssao::catalog::{ingest_tle_text, IngestConfig};
use ssao::dsl::{load_files, serialize, ParseDiagnostic, Severity};
use ssao::model::{KnowledgeBase, TermKind};
use ssao::query::{ask, instances_of, match_pattern, parse_query, Query};
use ssao::reasoner::{check, export_closure, materialize, DomainRangeMode, ReasonerConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DomainRangeArg {
    Infer,
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExportFormat {
    Ssao,
    Triples,
}

/// Knowledge-base engine for the space situational awareness domain.
#[derive(Parser)]
#[command(name = "ssao", version)]
struct Cli {
    /// How relation domain/range declarations are enforced
    #[arg(long, global = true, value_enum, default_value_t = DomainRangeArg::Validate)]
    domain_range: DomainRangeArg,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse ontology files, materialize, and report integrity violations
    Validate {
        /// `.ssao` files, loaded in order (SSAO_SEED supplies a default)
        files: Vec<PathBuf>,
    },
    /// Materialize the deductive closure and write the fact export
    Reason {
        files: Vec<PathBuf>,
        /// output path for the closure export (standard output if omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Answer a query over the materialized closure
    Query {
        files: Vec<PathBuf>,
        /// ground atom, e.g. "instance_of(SensorA, Sensor)"
        #[arg(long, conflicts_with_all = ["instances_of", "match_"])]
        ask: Option<String>,
        /// class name for instance retrieval
        #[arg(long = "instances-of", conflicts_with = "match_")]
        instances_of: Option<String>,
        /// with --instances-of: only direct instances
        #[arg(long, requires = "instances_of")]
        direct: bool,
        /// pattern with ?variables, e.g. "has_orbit(?s, ?o)"
        #[arg(long = "match")]
        match_: Option<String>,
        /// exit 1 when the answer is false or no rows match
        #[arg(long)]
        expect_nonempty: bool,
    },
    /// Ingest a TLE catalog and emit the generated facts
    Ingest {
        /// TLE file (2-line or 3-line variant)
        tlefile: PathBuf,
        /// seed ontology `.ssao` files (SSAO_SEED supplies a default)
        #[arg(long, num_args = 1..)]
        ontology: Vec<PathBuf>,
        /// sensor individual asserted as tracking each ingested satellite
        #[arg(long)]
        sensor: Option<String>,
        /// output path for the generated `.ssao` facts (standard output if
        /// omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Serialize the knowledge base canonically
    Export {
        files: Vec<PathBuf>,
        #[arg(long, value_enum)]
        format: ExportFormat,
    },
}

const EXIT_VIOLATIONS: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn usage_error(message: &str) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(EXIT_USAGE)
}

/// Applies the SSAO_SEED default: used only when no files were given.
fn effective_files(files: Vec<PathBuf>) -> Result<Vec<PathBuf>, String> {
    if !files.is_empty() {
        return Ok(files);
    }
    match std::env::var_os("SSAO_SEED") {
        Some(seed) => Ok(vec![PathBuf::from(seed)]),
        None => Err("no input files (set SSAO_SEED or pass paths)".to_string()),
    }
}

fn load(files: &[PathBuf]) -> Result<KnowledgeBase, ExitCode> {
    let (kb, diagnostics) = match load_files(files) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {e}");
            return Err(ExitCode::from(EXIT_USAGE));
        }
    };
    let mut errors = false;
    for d in &diagnostics {
        eprintln!("{d}");
        errors |= matches!(d.severity, Severity::Error);
    }
    if errors {
        return Err(ExitCode::from(EXIT_USAGE));
    }
    let _: &[ParseDiagnostic] = &diagnostics;
    Ok(kb)
}

fn reasoner_config(mode: DomainRangeArg) -> ReasonerConfig {
    ReasonerConfig {
        domain_range_mode: match mode {
            DomainRangeArg::Infer => DomainRangeMode::Infer,
            DomainRangeArg::Validate => DomainRangeMode::Validate,
        },
        ..ReasonerConfig::default()
    }
}

fn write_out(out: Option<&PathBuf>, content: &str) -> Result<(), ExitCode> {
    match out {
        Some(path) => std::fs::write(path, content).map_err(|e| {
            eprintln!("error: cannot write {}: {e}", path.display());
            ExitCode::from(EXIT_USAGE)
        }),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = reasoner_config(cli.domain_range);

    match cli.command {
        Command::Validate { files } => {
            let files = match effective_files(files) {
                Ok(f) => f,
                Err(m) => return usage_error(&m),
            };
            let kb = match load(&files) {
                Ok(kb) => kb,
                Err(code) => return code,
            };
            let closure = match materialize(&kb, &cfg) {
                Ok(c) => c,
                Err(e) => return usage_error(&e.to_string()),
            };
            let violations = check(&closure, &cfg);
            for v in &violations {
                let locations: Vec<String> =
                    v.locations.iter().map(|o| format!("{}:{}", o.file, o.line)).collect();
                println!("{}\t{}\t{}", v.code, locations.join(","), v.message);
            }
            eprintln!("{} violation(s)", violations.len());
            if violations.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_VIOLATIONS)
            }
        }

        Command::Reason { files, out } => {
            let files = match effective_files(files) {
                Ok(f) => f,
                Err(m) => return usage_error(&m),
            };
            let kb = match load(&files) {
                Ok(kb) => kb,
                Err(code) => return code,
            };
            let closure = match materialize(&kb, &cfg) {
                Ok(c) => c,
                Err(e) => return usage_error(&e.to_string()),
            };
            match write_out(out.as_ref(), &export_closure(&closure)) {
                Ok(()) => ExitCode::SUCCESS,
                Err(code) => code,
            }
        }

        Command::Query { files, ask: ask_q, instances_of: inst_q, direct, match_: match_q, expect_nonempty } => {
            let files = match effective_files(files) {
                Ok(f) => f,
                Err(m) => return usage_error(&m),
            };
            let kb = match load(&files) {
                Ok(kb) => kb,
                Err(code) => return code,
            };
            // reconstruct the textual form so all three flags share one parser
            let text = match (&ask_q, &inst_q, &match_q) {
                (Some(a), None, None) => format!("ask {a}"),
                (None, Some(c), None) => {
                    format!("instances-of {c}{}", if direct { " --direct" } else { "" })
                }
                (None, None, Some(m)) => format!("match {m}"),
                _ => return usage_error("exactly one of --ask, --instances-of, --match required"),
            };
            let query = match parse_query(&kb, &text) {
                Ok(q) => q,
                Err(e) => return usage_error(&e.to_string()),
            };
            let closure = match materialize(&kb, &cfg) {
                Ok(c) => c,
                Err(e) => return usage_error(&e.to_string()),
            };
            let nonempty = match query {
                Query::Ask(atom) => {
                    let answer = ask(&closure, &atom);
                    println!("{answer}");
                    answer
                }
                Query::InstancesOf { class, direct } => {
                    let hits = instances_of(&closure, class, direct);
                    for id in &hits {
                        println!("{}", kb.name(*id));
                    }
                    !hits.is_empty()
                }
                Query::Match(pattern) => match match_pattern(&closure, &pattern) {
                    Ok(bindings) => {
                        print!("{}", bindings.render());
                        !bindings.rows.is_empty()
                    }
                    Err(e) => return usage_error(&e.to_string()),
                },
            };
            if expect_nonempty && !nonempty {
                ExitCode::from(EXIT_VIOLATIONS)
            } else {
                ExitCode::SUCCESS
            }
        }

        Command::Ingest { tlefile, ontology, sensor, out } => {
            let ontology = match effective_files(ontology) {
                Ok(f) => f,
                Err(m) => return usage_error(&m),
            };
            let mut kb = match load(&ontology) {
                Ok(kb) => kb,
                Err(code) => return code,
            };
            let text = match std::fs::read_to_string(&tlefile) {
                Ok(t) => t,
                Err(e) => return usage_error(&format!("cannot read {}: {e}", tlefile.display())),
            };
            let mut cfg = IngestConfig::default();
            if let Some(name) = &sensor {
                match kb.get(name) {
                    Some(id) if kb.kind(id) == TermKind::Individual => {
                        cfg.tracked_by_sensor = Some(id)
                    }
                    _ => return usage_error(&format!("`{name}` is not a declared individual")),
                }
            }
            let source = tlefile.display().to_string();
            let report = match ingest_tle_text(&mut kb, &text, &source, &cfg) {
                Ok(r) => r,
                Err(e) => return usage_error(&e.to_string()),
            };
            eprint!("{report}");
            let mut facts = report.generated.join("\n");
            if !facts.is_empty() {
                facts.push('\n');
            }
            match write_out(out.as_ref(), &facts) {
                Ok(()) => ExitCode::SUCCESS,
                Err(code) => code,
            }
        }

        Command::Export { files, format } => {
            let files = match effective_files(files) {
                Ok(f) => f,
                Err(m) => return usage_error(&m),
            };
            let kb = match load(&files) {
                Ok(kb) => kb,
                Err(code) => return code,
            };
            match format {
                ExportFormat::Ssao => {
                    print!("{}", serialize(&kb));
                    ExitCode::SUCCESS
                }
                ExportFormat::Triples => {
                    let closure = match materialize(&kb, &cfg) {
                        Ok(c) => c,
                        Err(e) => return usage_error(&e.to_string()),
                    };
                    print!("{}", export_closure(&closure));
                    ExitCode::SUCCESS
                }
            }
        }
    }
}
