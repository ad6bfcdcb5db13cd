use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use fmtree::bench::{self, BenchConfig, BenchEngine};
use fmtree::locate::{InjectedFault, DEFAULT_THRESHOLD};
use fmtree::selftest::{self, SelftestConfig};
use fmtree::{load_text, normalize, Engine, FmIndex, FmTreeConfig, PackedText, Pattern, SamplingStrategy, SourceFormat};

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_INVARIANT: u8 = 3;

#[derive(Parser)]
#[command(name = "fmtree", version, about = "FM-index for DNA texts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an index from a plain or FASTA text.
    Build {
        #[arg(long)]
        input: PathBuf,
        /// Input format; guessed from the first byte when omitted.
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long)]
        output: PathBuf,
        /// Sampling distance.
        #[arg(short = 'D')]
        distance: usize,
        #[arg(long, value_enum, default_value_t = Sampling::Value)]
        sampling: Sampling,
        /// Seed for replacing non-ACGT bases.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the sorted occurrences of each pattern in a file.
    Locate {
        #[arg(long)]
        index: PathBuf,
        /// One pattern per line.
        #[arg(long)]
        patterns: PathBuf,
        #[arg(long, value_enum, default_value_t = LocateEngine::Fmtree)]
        engine: LocateEngine,
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: usize,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Time count and locate over a sweep of sampling distances.
    Bench {
        #[arg(long)]
        text: PathBuf,
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long, value_delimiter = ',', default_value = "5")]
        pattern_lengths: Vec<usize>,
        #[arg(long, default_value_t = 10)]
        patterns_per_length: usize,
        #[arg(long = "D-list", value_delimiter = ',', default_value = "2,3,4,5,6,7,8")]
        d_list: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "fmtree,original_v,original_s")]
        engines: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; standard output when omitted.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: usize,
        /// Re-run every configuration on this many threads and compare answers.
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Compare every engine with a naive scan on random texts.
    Selftest {
        #[arg(long, default_value_t = 2000)]
        max_n: usize,
        #[arg(long, default_value_t = 200)]
        iterations: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Plain,
    Fasta,
}

#[derive(Clone, Copy, ValueEnum)]
enum Sampling {
    Value,
    Subscript,
}

#[derive(Clone, Copy, ValueEnum)]
enum LocateEngine {
    Fmtree,
    Original,
}

/// Failures that end the run with a specific exit code.
#[derive(Debug)]
struct Exit(u8);

impl std::fmt::Display for Exit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "exit {}", self.0)
    }
}

impl std::error::Error for Exit {}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if let Some(Exit(code)) = e.downcast_ref::<Exit>() {
                return ExitCode::from(*code);
            }
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    use fmtree::Error;
    match e.downcast_ref::<Error>() {
        Some(Error::InvalidArgument(_) | Error::SamplingDistance(_)) => EXIT_USAGE,
        Some(Error::InvariantViolation(_)) => EXIT_INVARIANT,
        _ => EXIT_DATA,
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Build {
            input,
            format,
            output,
            distance,
            sampling,
            seed,
        } => {
            let text = read_text(&input, format, seed)?;
            let strategy = match sampling {
                Sampling::Value => SamplingStrategy::Value,
                Sampling::Subscript => SamplingStrategy::Subscript,
            };
            let index = FmIndex::build(&text, distance, strategy)?;
            let bytes = index
                .save(&output)
                .with_context(|| format!("writing {}", output.display()))?;
            eprintln!(
                "indexed {} characters into {} ({bytes} bytes)",
                text.len(),
                output.display()
            );
            Ok(())
        }
        Command::Locate {
            index,
            patterns,
            engine,
            threshold,
            threads,
        } => locate(&index, &patterns, engine, threshold, threads),
        Command::Bench {
            text,
            format,
            pattern_lengths,
            patterns_per_length,
            d_list,
            engines,
            seed,
            csv,
            threshold,
            threads,
        } => {
            let engines = engines
                .iter()
                .map(|e| e.parse::<BenchEngine>())
                .collect::<fmtree::Result<Vec<_>>>()?;
            let text = read_text(&text, format, seed)?;
            let config = BenchConfig {
                pattern_lengths,
                patterns_per_length,
                distances: d_list,
                engines,
                seed,
                threshold,
                threads,
            };
            let records = bench::run(&text, &config)?;
            match csv {
                Some(path) => {
                    let file = File::create(&path)
                        .with_context(|| format!("creating {}", path.display()))?;
                    bench::write_csv(&records, BufWriter::new(file))?;
                }
                None => bench::write_csv(&records, io::stdout().lock())?,
            }
            Ok(())
        }
        Command::Selftest {
            max_n,
            iterations,
            seed,
            inject_fault,
        } => {
            let report = selftest::run(&SelftestConfig {
                max_n,
                iterations,
                seed,
                fault: inject_fault.then_some(InjectedFault::InclusiveSampleEnd),
            })?;
            match report.failure {
                None => {
                    println!(
                        "selftest passed: {} iterations, {} checks",
                        report.iterations, report.checks
                    );
                    Ok(())
                }
                Some(case) => {
                    println!("selftest FAILED after {} checks", report.checks);
                    println!("{case}");
                    Err(Exit(EXIT_INVARIANT).into())
                }
            }
        }
    }
}

fn read_text(path: &Path, format: Option<Format>, seed: u64) -> Result<PackedText> {
    let format = match format {
        Some(Format::Plain) => SourceFormat::Plain,
        Some(Format::Fasta) => SourceFormat::Fasta,
        None => sniff(path)?,
    };
    let raw = load_text(path, format)?;
    Ok(normalize(&raw, seed))
}

fn sniff(path: &Path) -> Result<SourceFormat> {
    let bytes = std::fs::read(path).map_err(|source| fmtree::Error::Read {
        path: path.to_owned(),
        source,
    })?;
    let first = bytes.iter().find(|b| !b.is_ascii_whitespace());
    Ok(if first == Some(&b'>') {
        SourceFormat::Fasta
    } else {
        SourceFormat::Plain
    })
}

fn locate(
    index_path: &Path,
    patterns_path: &Path,
    engine: LocateEngine,
    threshold: usize,
    threads: usize,
) -> Result<()> {
    let index = FmIndex::load(index_path)?;
    let engine = match engine {
        LocateEngine::Original => Engine::Original,
        LocateEngine::Fmtree => {
            if index.strategy() != SamplingStrategy::Value {
                return Err(fmtree::Error::UnsupportedStrategy {
                    engine: "fmtree",
                    found: index.strategy(),
                }
                .into());
            }
            Engine::FmTree(FmTreeConfig::with_threshold(threshold))
        }
    };
    let input = std::fs::read_to_string(patterns_path).map_err(|source| fmtree::Error::Read {
        path: patterns_path.to_owned(),
        source,
    })?;
    let lines: Vec<&str> = input.lines().map(|l| l.trim_end_matches('\r')).collect();

    let answer = |line: &str| -> fmtree::Result<String> {
        let pattern: Pattern = line.parse()?;
        let result = index.locate(&pattern, engine)?;
        let positions: Vec<String> = result
            .sorted_positions()
            .iter()
            .map(|p| p.to_string())
            .collect();
        Ok(format!("{line}\t{}\t{}", positions.len(), positions.join(" ")))
    };

    let chunk = lines.len().div_ceil(threads.max(1)).max(1);
    let answers: Vec<fmtree::Result<String>> = if threads > 1 {
        std::thread::scope(|scope| {
            let handles: Vec<_> = lines
                .chunks(chunk)
                .map(|part| scope.spawn(|| part.iter().map(|l| answer(l)).collect::<Vec<_>>()))
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("query thread panicked"))
                .collect()
        })
    } else {
        lines.iter().map(|l| answer(l)).collect()
    };

    let mut out = BufWriter::new(io::stdout().lock());
    let mut failed = false;
    for (n, answer) in answers.into_iter().enumerate() {
        match answer {
            Ok(line) => writeln!(out, "{line}")?,
            Err(e) => {
                failed = true;
                eprintln!("line {}: {e}", n + 1);
            }
        }
    }
    out.flush()?;
    if failed {
        return Err(Exit(EXIT_DATA).into());
    }
    Ok(())
}
