//! Command-line front end.
//!
//! Exit codes: `0` success or positive verdict, `1` negative verdict,
//! `2` unusable input or flags. Paths equal to `-` mean stdin or stdout.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Read, Write};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bench::bench_recognize;
use crate::evaluate::{evaluate, explains, EvalError};
use crate::generalized::{recognize, RecognitionReport};
use crate::io::{read_map, read_tree, read_triples, write_map, write_tree, write_triples};
use crate::oracle::random_tree_like_instance;
use crate::triples::{aho_build, informative_triples, TripleError};
use crate::verify::{verify_exhaustive, verify_samples};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "genfitch",
    version,
    about = "Recognize tree-like edge-labeled Fitch maps"
)]
struct Cli {
    /// Suppress informational messages on stderr.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide tree-likeness and write the least-resolved tree.
    Recognize {
        map: String,
        #[arg(short = 'o', long = "output")]
        output: Option<String>,
        /// Format of the verdict report written to stderr.
        #[arg(long, value_enum, default_value = "text")]
        report: ReportFormat,
    },
    /// Write the map a labeled tree explains.
    Evaluate {
        tree: String,
        #[arg(short = 'o', long = "output")]
        output: Option<String>,
    },
    /// Exit 0 iff the tree explains the map.
    Check { tree: String, map: String },
    /// Write the informative triples of a map.
    Triples {
        map: String,
        #[arg(short = 'o', long = "output")]
        output: Option<String>,
    },
    /// Run BUILD on a triple list.
    Aho {
        triples: String,
        /// Comma-separated leaf set; defaults to the leaves of the triples.
        #[arg(long, value_delimiter = ',')]
        leaves: Option<Vec<String>>,
        #[arg(short = 'o', long = "output")]
        output: Option<String>,
    },
    /// Emit a seeded random tree and the map it explains.
    GenRandom {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        leaves: usize,
        #[arg(long)]
        symbols: usize,
        /// Write PREFIX.lnw and PREFIX.fm instead of printing both.
        #[arg(long = "o-prefix", value_name = "PREFIX")]
        o_prefix: Option<String>,
    },
    /// Compare the recognizer with the brute-force oracle.
    OracleVerify {
        #[arg(long)]
        leaves: usize,
        #[arg(long)]
        symbols: usize,
        #[arg(long, conflicts_with = "samples")]
        exhaustive: bool,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Median wall time of recognition on seeded instances.
    Bench {
        #[arg(long)]
        leaves: usize,
        #[arg(long)]
        symbols: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        repeat: usize,
    },
}

#[derive(Debug, Serialize)]
struct JsonReport {
    v: u32,
    verdict: &'static str,
    reason: Option<&'static str>,
    message: Option<String>,
    witness: Witness,
    tree: Option<String>,
}

#[derive(Debug, Serialize)]
struct Witness {
    leaves: Vec<String>,
    symbols: Vec<String>,
}

/// Input failure: message for stderr, always exit code 2.
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    quiet: bool,
}

impl Io<'_> {
    fn read(&mut self, path: &str) -> Result<String, InputError> {
        if path == "-" {
            let mut s = String::new();
            io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| InputError(format!("stdin: {e}")))?;
            Ok(s)
        } else {
            fs::read_to_string(path).map_err(|e| InputError(format!("{path}: {e}")))
        }
    }

    fn write(&mut self, path: Option<&str>, text: &str) -> Result<(), InputError> {
        match path {
            None | Some("-") => self
                .out
                .write_all(text.as_bytes())
                .map_err(|e| InputError(format!("stdout: {e}"))),
            Some(p) => fs::write(p, text).map_err(|e| InputError(format!("{p}: {e}"))),
        }
    }

    fn note(&mut self, msg: &str) {
        if !self.quiet {
            let _ = writeln!(self.err, "{msg}");
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    EXIT_INPUT
                }
            };
        }
    };
    let mut io = Io {
        out,
        err,
        quiet: cli.quiet,
    };
    match dispatch(cli.command, &mut io) {
        Ok(code) => code,
        Err(InputError(msg)) => {
            let _ = writeln!(io.err, "error: {msg}");
            EXIT_INPUT
        }
    }
}

/// Entry point for the binary.
pub fn main() -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    let mut out = stdout.lock();
    let mut err = stderr.lock();
    let code = run(std::env::args_os(), &mut out, &mut err);
    let _ = out.flush();
    code
}

fn dispatch(command: Command, io: &mut Io) -> Result<i32, InputError> {
    match command {
        Command::Recognize {
            map,
            output,
            report,
        } => {
            let map = read_map(&io.read(&map)?)?;
            let result = recognize(&map);
            if let RecognitionReport::TreeLike(t) = &result {
                io.write(output.as_deref(), &write_tree(t))?;
            }
            match report {
                ReportFormat::Json => {
                    let json = json_report(&result);
                    let _ = writeln!(io.err, "{}", serde_json::to_string(&json)?);
                }
                ReportFormat::Text => match &result {
                    RecognitionReport::TreeLike(_) => io.note("tree-like"),
                    RecognitionReport::NotTreeLike(v) => {
                        let _ = writeln!(io.err, "not tree-like: {}: {v}", v.kind());
                    }
                },
            }
            Ok(if result.is_tree_like() {
                EXIT_OK
            } else {
                EXIT_NEGATIVE
            })
        }
        Command::Evaluate { tree, output } => {
            let tree = read_tree(&io.read(&tree)?)?;
            match evaluate(&tree) {
                Ok(m) => {
                    io.write(output.as_deref(), &write_map(&m))?;
                    Ok(EXIT_OK)
                }
                Err(e @ EvalError::LabelConflict { .. }) => {
                    let _ = writeln!(io.err, "label conflict: {e}");
                    Ok(EXIT_NEGATIVE)
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Check { tree, map } => {
            let tree = read_tree(&io.read(&tree)?)?;
            let map = read_map(&io.read(&map)?)?;
            if explains(&tree, &map)? {
                io.note("tree explains map");
                Ok(EXIT_OK)
            } else {
                io.note("tree does not explain map");
                Ok(EXIT_NEGATIVE)
            }
        }
        Command::Triples { map, output } => {
            let map = read_map(&io.read(&map)?)?;
            io.write(
                output.as_deref(),
                &write_triples(&informative_triples(&map)),
            )?;
            Ok(EXIT_OK)
        }
        Command::Aho {
            triples,
            leaves,
            output,
        } => {
            let set = read_triples(&io.read(&triples)?)?;
            let leaves: Vec<String> = match leaves {
                Some(l) => l,
                None => set.leaf_universe().into_iter().collect(),
            };
            match aho_build(&set, &leaves) {
                Ok(t) => {
                    io.write(output.as_deref(), &write_tree(&t))?;
                    Ok(EXIT_OK)
                }
                Err(e @ TripleError::Inconsistent(_)) => {
                    let _ = writeln!(io.err, "{e}");
                    Ok(EXIT_NEGATIVE)
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::GenRandom {
            seed,
            leaves,
            symbols,
            o_prefix,
        } => {
            require(leaves >= 2, "--leaves must be at least 2")?;
            require(symbols >= 1, "--symbols must be at least 1")?;
            let (tree, map) = random_tree_like_instance(seed, leaves, symbols);
            match o_prefix {
                Some(p) => {
                    io.write(Some(&format!("{p}.lnw")), &write_tree(&tree))?;
                    io.write(Some(&format!("{p}.fm")), &write_map(&map))?;
                }
                None => {
                    io.write(None, &write_tree(&tree))?;
                    io.write(None, &write_map(&map))?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::OracleVerify {
            leaves,
            symbols,
            exhaustive: _,
            samples,
            seed,
        } => {
            let report = match samples {
                Some(m) => verify_samples(leaves, symbols, m, seed)?,
                None => verify_exhaustive(leaves, symbols)?,
            };
            let text = format!(
                "maps\t{}\ntree_like\t{}\nverdict_mismatches\t{}\ntree_mismatches\t{}\n",
                report.maps, report.tree_like, report.verdict_mismatches, report.tree_mismatches
            );
            io.write(None, &text)?;
            for e in &report.examples {
                let _ = writeln!(io.err, "mismatch: {e}");
            }
            Ok(if report.all_agree() {
                EXIT_OK
            } else {
                EXIT_NEGATIVE
            })
        }
        Command::Bench {
            leaves,
            symbols,
            seed,
            repeat,
        } => {
            require(leaves >= 2, "--leaves must be at least 2")?;
            require(symbols >= 1, "--symbols must be at least 1")?;
            require(repeat >= 1, "--repeat must be at least 1")?;
            let r = bench_recognize(leaves, symbols, seed, repeat);
            io.write(None, &format!("{}\t{:.6}\n", r.leaves, r.median()))?;
            Ok(EXIT_OK)
        }
    }
}

fn require(cond: bool, msg: &str) -> Result<(), InputError> {
    if cond {
        Ok(())
    } else {
        Err(InputError(msg.to_string()))
    }
}

fn json_report(result: &RecognitionReport) -> JsonReport {
    match result {
        RecognitionReport::TreeLike(t) => JsonReport {
            v: 1,
            verdict: "TreeLike",
            reason: None,
            message: None,
            witness: Witness {
                leaves: Vec::new(),
                symbols: Vec::new(),
            },
            tree: Some(crate::io::newick_string(t)),
        },
        RecognitionReport::NotTreeLike(v) => JsonReport {
            v: 1,
            verdict: "NotTreeLike",
            reason: Some(v.kind()),
            message: Some(v.to_string()),
            witness: Witness {
                leaves: v.witness_leaves(),
                symbols: v.witness_symbols(),
            },
            tree: None,
        },
    }
}
