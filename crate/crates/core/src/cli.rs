//! Command-line driver behind the `envelope` binary.
//!
//! Exit codes: 0 on success, 1 when `verify` finds a disagreement, 2 on
//! usage, input or I/O errors. `ENVELOPE_THREADS` sets the worker count for
//! parallel group solves (0 or unset means one per core).

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::chain::Envelope;
use crate::formats::{parse_chains, parse_segments, print_segments, EnvelopeDoc};
use crate::geom::{eval_at, Rational};
use crate::merge::{merge_envelopes, MergeCounters, MergeOutcome};
use crate::solver::{
    envelope_bruteforce, envelope_divide_conquer, envelope_output_sensitive, SegmentSet,
};
use crate::svg::render_svg;
use crate::workload::{generate, report_csv, scaling_report, BBox, GenKind, GenSpec, SplitMix64};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "envelope",
    version,
    about = "Exact lower envelopes of line segments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Algo {
    /// Pointwise minimum over all breakpoints.
    Oracle,
    /// Divide and conquer with two-chain merges.
    Dc,
    /// Output-sensitive grouping with the doubling schedule.
    Chan,
}

// Parsed once per process, so variant size does not matter.
#[allow(clippy::large_enum_variant)]
#[derive(Subcommand, Debug)]
enum Command {
    /// Compute the lower envelope of a segment file.
    Compute {
        #[arg(long, value_enum, default_value = "chan")]
        algo: Algo,
        #[arg(short, long)]
        input: PathBuf,
        /// Output path for the JSON document; stdout if omitted or `-`.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Also render an SVG to this path.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Include operation counters in the document.
        #[arg(long)]
        stats: bool,
    },
    /// Merge the chains of a chain file.
    MergeChains {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Give up once the output has more than this many vertices.
        #[arg(long)]
        abort: Option<u64>,
    },
    /// Write a generated segment file.
    Gen {
        #[arg(long, value_parser = parse_kind)]
        kind: GenKind,
        #[arg(short = 'n', long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Bounding box as `xmin,ymin,xmax,ymax`.
        #[arg(long, value_parser = parse_bbox)]
        bbox: Option<BBox>,
    },
    /// Check that all three algorithms agree, and sample the result.
    Verify {
        #[arg(short, long)]
        input: PathBuf,
        /// Number of abscissae at which the envelope is checked against
        /// every segment.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Solve generated instances and write a CSV of counters.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "1000,2000,4000,8000")]
        sizes: Vec<usize>,
        #[arg(long, value_delimiter = ',', value_parser = parse_kind,
              default_value = "random,small-k,parabola,disjoint-spans")]
        kinds: Vec<GenKind>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Add a wall-time column; the output is then no longer reproducible.
        #[arg(long)]
        timing: bool,
    },
}

fn parse_kind(s: &str) -> Result<GenKind, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn parse_bbox(s: &str) -> Result<BBox, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [a, b, c, d] = parts.as_slice() else {
        return Err("expected xmin,ymin,xmax,ymax".into());
    };
    let num = |t: &str| t.parse::<Rational>().map_err(|e| e.to_string());
    let bbox = BBox::new(num(a)?, num(b)?, num(c)?, num(d)?);
    if !bbox.is_well_formed() {
        return Err("need xmin < xmax and ymin < ymax".into());
    }
    Ok(bbox)
}

/// A failure that ends the command with the given exit code.
struct Failure {
    code: i32,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write_output(path: Option<&Path>, content: &str) -> Result<(), Failure> {
    match path {
        Some(p) if p != Path::new("-") => {
            fs::write(p, content).map_err(|e| usage(format!("{}: {e}", p.display())))
        }
        _ => io::stdout()
            .write_all(content.as_bytes())
            .map_err(|e| usage(format!("stdout: {e}"))),
    }
}

fn load_segments(path: &Path) -> Result<SegmentSet, Failure> {
    let set = parse_segments(&read_input(path)?)
        .map_err(|e| usage(format!("{}: {e}", path.display())))?;
    if set.is_empty() {
        return Err(usage(format!("{}: no segments", path.display())));
    }
    Ok(set)
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("ENVELOPE_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .map_err(|_| usage(format!("ENVELOPE_THREADS: `{raw}` is not a count")))?;
    // A second call in the same process keeps the first pool.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global();
    Ok(())
}

/// Parses `args` (program name first) and runs the command.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match configure_threads().and_then(|()| dispatch(cli.command)) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(command: Command) -> Result<i32, Failure> {
    match command {
        Command::Compute {
            algo,
            input,
            output,
            svg,
            stats,
        } => compute(algo, &input, output.as_deref(), svg.as_deref(), stats),
        Command::MergeChains {
            input,
            output,
            abort,
        } => merge_chains(&input, output.as_deref(), abort),
        Command::Gen {
            kind,
            n,
            seed,
            output,
            bbox,
        } => {
            let mut spec = GenSpec::new(kind, n, seed);
            if let Some(b) = bbox {
                spec.bbox = b;
            }
            let set = generate(&spec).map_err(|e| usage(e.to_string()))?;
            write_output(output.as_deref(), &print_segments(&set))?;
            Ok(EXIT_OK)
        }
        Command::Verify { input, samples } => verify(&input, samples),
        Command::Bench {
            sizes,
            kinds,
            seed,
            output,
            timing,
        } => {
            let rows = scaling_report(&sizes, &kinds, seed).map_err(|e| usage(e.to_string()))?;
            write_output(output.as_deref(), &report_csv(&rows, timing))?;
            Ok(EXIT_OK)
        }
    }
}

fn compute(
    algo: Algo,
    input: &Path,
    output: Option<&Path>,
    svg: Option<&Path>,
    stats: bool,
) -> Result<i32, Failure> {
    let set = load_segments(input)?;
    let solve_err = |e: crate::solver::SolverError| usage(e.to_string());
    let (env, doc) = match algo {
        Algo::Oracle => {
            let env = envelope_bruteforce(&set).map_err(solve_err)?;
            let doc = EnvelopeDoc::new(&env);
            (env, doc)
        }
        Algo::Dc => {
            let (env, counters) = envelope_divide_conquer(&set).map_err(solve_err)?;
            let mut doc = EnvelopeDoc::new(&env);
            if stats {
                doc = doc.with_counters(counters);
            }
            (env, doc)
        }
        Algo::Chan => {
            let (env, report) = envelope_output_sensitive(&set).map_err(solve_err)?;
            let mut doc = EnvelopeDoc::new(&env);
            if stats {
                doc = doc.with_counters(report.totals).with_report(&report);
            }
            (env, doc)
        }
    };
    write_output(output, &doc.to_json())?;
    if let Some(path) = svg {
        write_output(Some(path), &render_svg(&env, Some(&set)))?;
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct AbortDoc {
    aborted: bool,
    counters: MergeCounters,
}

fn merge_chains(input: &Path, output: Option<&Path>, abort: Option<u64>) -> Result<i32, Failure> {
    let chains = parse_chains(&read_input(input)?)
        .map_err(|e| usage(format!("{}: {e}", input.display())))?;
    let outcome = merge_envelopes(&chains, abort).map_err(|e| usage(e.to_string()))?;
    let json = match outcome {
        MergeOutcome::Completed(env, counters) => {
            EnvelopeDoc::new(&env).with_counters(counters).to_json()
        }
        MergeOutcome::Aborted(counters) => {
            let mut s = serde_json::to_string_pretty(&AbortDoc {
                aborted: true,
                counters,
            })
            .expect("serializable");
            s.push('\n');
            s
        }
    };
    write_output(output, &json)?;
    Ok(EXIT_OK)
}

/// Abscissae spread over the input's x-range, reproducible for a given input.
fn sample_xs(set: &SegmentSet, samples: usize) -> Vec<Rational> {
    let segs = set.segments();
    let lo = segs.iter().map(|s| &s.a.x).min().expect("non-empty");
    let hi = segs.iter().map(|s| &s.b.x).max().expect("non-empty");
    let mut rng = SplitMix64::new(segs.len() as u64);
    let denom = 1i64 << 20;
    (0..samples)
        .map(|_| {
            let t = Rational::new(rng.below(denom as u64 + 1) as i64, denom);
            lo + &((hi - lo) * t)
        })
        .collect()
}

fn pointwise_min(set: &SegmentSet, x: &Rational) -> Option<Rational> {
    set.segments()
        .iter()
        .filter_map(|s| eval_at(s, x).ok())
        .min()
}

fn verify(input: &Path, samples: usize) -> Result<i32, Failure> {
    let set = load_segments(input)?;
    let solve_err = |e: crate::solver::SolverError| usage(e.to_string());
    let oracle = envelope_bruteforce(&set).map_err(solve_err)?;
    let (dc, _) = envelope_divide_conquer(&set).map_err(solve_err)?;
    let (chan, _) = envelope_output_sensitive(&set).map_err(solve_err)?;

    let mut problems = Vec::new();
    for (name, env) in [("dc", &dc), ("chan", &chan)] {
        if env != &oracle {
            problems.push(format!("{name} differs from the oracle"));
        }
    }
    let check = |name: &str, env: &Envelope, problems: &mut Vec<String>| {
        let d = env.validate();
        if !d.is_empty() {
            problems.push(format!("{name} output is malformed: {:?}", d));
        }
    };
    check("oracle", &oracle, &mut problems);
    check("dc", &dc, &mut problems);
    check("chan", &chan, &mut problems);
    for x in sample_xs(&set, samples) {
        if chan.eval(&x) != pointwise_min(&set, &x) {
            problems.push(format!("envelope is not the minimum at x = {x}"));
            break;
        }
    }

    if problems.is_empty() {
        println!(
            "ok: {} segments, {} envelope vertices, {samples} samples",
            set.len(),
            oracle.len()
        );
        Ok(EXIT_OK)
    } else {
        for p in &problems {
            println!("mismatch: {p}");
        }
        Ok(EXIT_MISMATCH)
    }
}
