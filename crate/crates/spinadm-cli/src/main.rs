//! Command-line driver for the verification suites: run them with
//! machine-readable reports, or dump the raw enumerations for scripting.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::io::IsTerminal;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use spinadm::alcove::admissible_set;
use spinadm::error::{Error, Result};
use spinadm::permissible::{
    enumerate_perm, enumerate_perm_general, omega, orbit_classify, IsoSubset, Sign,
};
use spinadm::report::{self, IndexSelection, Suite, SuiteConfig};

#[derive(Parser)]
#[command(
    name = "spinadm",
    version,
    about = "Exact verification of the Schubert-cell combinatorics of even \
             orthogonal similitude local models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites and emit a report.
    Verify(VerifyArgs),
    /// Dump raw enumerations, one item per line.
    Enumerate(EnumerateArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// Suites to run: cells, perm-adm, vertexwise, strata, lifts,
    /// parahoric, or "all".
    #[arg(value_name = "SUITE", default_value = "all")]
    suites: Vec<String>,

    /// Half-ranks to verify at, comma separated (e.g. 4,5).
    #[arg(long = "n", value_name = "LIST", value_delimiter = ',', default_value = "4")]
    n: Vec<usize>,

    /// Index sets for the index-driven suites: "all" or semicolon-separated
    /// comma lists (e.g. "0,2;1").
    #[arg(long, value_name = "SPEC", default_value = "all")]
    index_sets: String,

    /// Spin sign: +, -, or both.
    #[arg(long, value_name = "SIGN", default_value = "both")]
    sign: String,

    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Write the report to this file instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Worker threads for the parallel suites.
    #[arg(long, value_name = "K", default_value_t = 1)]
    jobs: usize,

    /// Unlock the searches that are expensive at higher rank.
    #[arg(long)]
    allow_large: bool,

    /// Fault injection: corrupt each admissible set by one spurious
    /// translation to exercise failure reporting.
    #[arg(long, hide = true)]
    mutate_adm: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args)]
struct EnumerateArgs {
    #[command(subcommand)]
    what: EnumerateWhat,
}

#[derive(Subcommand)]
enum EnumerateWhat {
    /// Cell classes (canonical double-coset representatives).
    Perm {
        /// Half-rank.
        #[arg(long = "n")]
        n: usize,
        /// Single chain index (mutually exclusive with --index-set).
        #[arg(long, value_name = "I")]
        vertex: Option<usize>,
        /// General index set as a comma list (e.g. 0,2).
        #[arg(long, value_name = "LIST", conflicts_with = "vertex")]
        index_set: Option<String>,
        /// Spin sign: +, -, or both.
        #[arg(long, default_value = "both")]
        sign: String,
    },
    /// Elements of the admissible set of a spin cocharacter.
    Adm {
        /// Half-rank.
        #[arg(long = "n")]
        n: usize,
        /// Spin sign: +, -, or both.
        #[arg(long, default_value = "both")]
        sign: String,
    },
    /// Permissible faces at a vertex, as vectors.
    Faces {
        /// Half-rank.
        #[arg(long = "n")]
        n: usize,
        /// Chain index.
        #[arg(long, value_name = "I")]
        vertex: usize,
    },
    /// Permissible totally isotropic subsets with their orbit class.
    Subsets {
        /// Half-rank.
        #[arg(long = "n")]
        n: usize,
        /// Chain index.
        #[arg(long, value_name = "I")]
        vertex: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Verify(args) => cmd_verify(args),
        Command::Enumerate(args) => cmd_enumerate(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn parse_suites(names: &[String]) -> Result<Vec<Suite>> {
    if names.iter().any(|s| s.eq_ignore_ascii_case("all")) {
        return Ok(Suite::ALL.to_vec());
    }
    names.iter().map(|s| Suite::parse(s)).collect()
}

fn parse_signs(spec: &str) -> Result<Vec<Sign>> {
    match spec.trim() {
        "+" | "plus" => Ok(vec![Sign::Plus]),
        "-" | "minus" => Ok(vec![Sign::Minus]),
        "both" => Ok(Sign::ALL.to_vec()),
        other => Err(Error::Config(format!("unknown sign {other:?} (use +, -, or both)"))),
    }
}

fn parse_index_list(part: &str) -> Result<BTreeSet<usize>> {
    let mut set = BTreeSet::new();
    for token in part.split(',') {
        let token = token.trim();
        let index: usize = token
            .parse()
            .map_err(|_| Error::Config(format!("bad chain index {token:?} in index set")))?;
        set.insert(index);
    }
    Ok(set)
}

fn parse_index_sets(spec: &str) -> Result<IndexSelection> {
    if spec.trim().eq_ignore_ascii_case("all") {
        return Ok(IndexSelection::All);
    }
    let mut sets = Vec::new();
    for part in spec.split(';') {
        let part = part.trim();
        if part.is_empty() {
            return Err(Error::Config("empty index set in --index-sets".into()));
        }
        sets.push(parse_index_list(part)?);
    }
    Ok(IndexSelection::Sets(sets))
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode> {
    let config = SuiteConfig {
        suites: parse_suites(&args.suites)?,
        n_range: args.n.clone(),
        index_sets: parse_index_sets(&args.index_sets)?,
        signs: parse_signs(&args.sign)?,
        parallelism: args.jobs,
        allow_large: args.allow_large,
        mutate_adm: args.mutate_adm,
    };
    let records = report::run_suites(&config)?;
    let to_stdout = args.out.is_none();
    let color = to_stdout
        && args.format == Format::Text
        && std::io::stdout().is_terminal()
        && std::env::var_os("NO_COLOR").is_none();
    let rendered = match args.format {
        Format::Json => report::to_json(&config, &records),
        Format::Csv => report::to_csv(&records),
        Format::Text => report::to_text(&records, color),
    };
    if let Some(path) = &args.out {
        fs::write(path, &rendered)
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
        let (mut passed, mut failed, mut skipped) = (0usize, 0usize, 0usize);
        for r in &records {
            match r.status {
                report::Status::Pass => passed += 1,
                report::Status::Fail => failed += 1,
                report::Status::Skipped => skipped += 1,
            }
        }
        println!(
            "report written to {} ({passed} passed, {failed} failed, {skipped} skipped)",
            path.display()
        );
    } else {
        print!("{rendered}");
    }
    Ok(if report::all_passed(&records) { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn signs_for(spec: &str) -> Result<Vec<Sign>> {
    parse_signs(spec)
}

fn cmd_enumerate(args: EnumerateArgs) -> Result<ExitCode> {
    let mut out = String::new();
    match args.what {
        EnumerateWhat::Perm { n, vertex, index_set, sign } => {
            let indices = match (vertex, index_set) {
                (Some(i), None) => BTreeSet::from([i]),
                (None, Some(spec)) => parse_index_list(&spec)?,
                (None, None) => {
                    return Err(Error::Config(
                        "enumerate perm needs --vertex or --index-set".into(),
                    ))
                }
                (Some(_), Some(_)) => unreachable!("clap rejects conflicting flags"),
            };
            for s in signs_for(&sign)? {
                let classes = if indices.len() == 1 {
                    let &i = indices.iter().next().expect("nonempty");
                    enumerate_perm(i, s, n)?
                } else {
                    enumerate_perm_general(&indices, s, n)?
                };
                for c in classes {
                    writeln!(out, "{s}\t{}", c.rep).expect("string write");
                }
            }
        }
        EnumerateWhat::Adm { n, sign } => {
            for s in signs_for(&sign)? {
                for w in admissible_set(&s.cochar(n)?, n)? {
                    writeln!(out, "{s}\t{w}").expect("string write");
                }
            }
        }
        EnumerateWhat::Faces { n, vertex } => {
            let base = omega(vertex as i64, n)?;
            for e in IsoSubset::enumerate_permissible(vertex, n)? {
                let mu = e.mu();
                let coords: Vec<String> = base
                    .iter()
                    .zip(mu.entries())
                    .map(|(a, b)| (a + b).to_string())
                    .collect();
                writeln!(out, "({})", coords.join(",")).expect("string write");
            }
        }
        EnumerateWhat::Subsets { n, vertex } => {
            for e in IsoSubset::enumerate_permissible(vertex, n)? {
                let (ell, d) = orbit_classify(&e)?;
                let elems: Vec<String> = e.elements().iter().map(|x| x.to_string()).collect();
                writeln!(out, "{{{}}}\tell={ell}\td={d}", elems.join(",")).expect("string write");
            }
        }
    }
    print!("{out}");
    Ok(ExitCode::SUCCESS)
}
