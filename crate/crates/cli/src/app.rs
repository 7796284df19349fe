//! Command-line front end.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use hoplab_core::hgroup::{parse_letters, parse_word, Letter};
use hoplab_core::ops::{gen, Side};
use hoplab_core::reps::RepKind;

use crate::config::{parse_window, ConfigError, Format, RunConfig, Suite};
use crate::report::Report;
use crate::run::{run, run_single};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "hoplab",
    version,
    about = "Deterministic checks for semicrossed-product operator algebras"
)]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Opts {
    /// Window `w_min,w_max,u_max,v_max`.
    #[arg(long, global = true, default_value = "-10,10,5,5")]
    window: String,
    #[arg(long, global = true)]
    theta: Option<f64>,
    /// Run seed; the HOPLAB_SEED environment variable takes precedence.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long = "tol-rank", global = true)]
    tol_rank: Option<f64>,
    #[arg(long = "tol-mem", global = true)]
    tol_mem: Option<f64>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    #[arg(long, global = true)]
    nmax: Option<u32>,
    #[arg(long, global = true)]
    dim: Option<usize>,
    #[arg(long, global = true)]
    cap: Option<usize>,
    /// Restrict the reps suite to `lebesgue`, `atomic` or `nonreflexive`.
    #[arg(long, global = true)]
    kind: Option<String>,
    #[arg(long = "fiber-degree", global = true)]
    fiber_degree: Option<usize>,
    /// Record wall times (reports then differ between runs).
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print normal forms of words, or run the group suite.
    Group {
        words: Vec<String>,
    },
    /// Run the ops suite; `--dump` also writes the compressed generators.
    Ops {
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    Averaging,
    Hulls,
    Spectral,
    Fibers,
    Reps,
    All,
    /// Re-run one check with the configuration stored in a report.
    Replay {
        report: PathBuf,
        check: String,
    },
    /// List check ids.
    List,
}

fn build_config(opts: &Opts, suites: Vec<Suite>) -> Result<RunConfig, ConfigError> {
    let mut c = RunConfig {
        window: parse_window(&opts.window)?,
        suites,
        timings: opts.timings,
        output: opts.out.clone(),
        format: opts.format,
        ..RunConfig::default()
    };
    if let Some(t) = opts.theta {
        c.theta = t;
    }
    if let Some(s) = opts.seed {
        c.seed = s;
    }
    if let Ok(s) = std::env::var("HOPLAB_SEED") {
        c.seed = s.trim().parse().map_err(|_| {
            ConfigError::new("HOPLAB_SEED", format!("{s:?} is not a 64-bit integer"))
        })?;
    }
    if let Some(t) = opts.tol_rank {
        c.tolerances.rank = t;
    }
    if let Some(t) = opts.tol_mem {
        c.tolerances.membership = t;
    }
    if let Some(n) = opts.nmax {
        c.nmax = n;
    }
    if let Some(d) = opts.dim {
        c.dim = d;
    }
    c.cap = opts.cap.or(c.cap);
    if let Some(k) = &opts.kind {
        c.kind = Some(
            k.parse::<RepKind>()
                .map_err(|e| ConfigError::new("kind", e.to_string()))?,
        );
    }
    if let Some(d) = opts.fiber_degree {
        c.fiber_degree = d;
    }
    c.validate()?;
    Ok(c)
}

fn render(report: &Report, format: Format) -> anyhow::Result<String> {
    Ok(match format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv()?,
        Format::Text => report.to_text(),
    })
}

fn emit(text: &str, out: Option<&Path>) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn dump_generators(config: &RunConfig, path: &Path) -> anyhow::Result<()> {
    let mut w =
        csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(["op", "row", "col", "re", "im"])?;
    for side in [Side::Left, Side::Right] {
        for letter in [Letter::U, Letter::V, Letter::W] {
            let op = gen(side, letter, &config.window);
            for j in 0..op.dim() {
                for i in 0..op.dim() {
                    let z = op.matrix[(i, j)];
                    if z.norm() != 0.0 {
                        w.write_record([
                            op.label.clone(),
                            i.to_string(),
                            j.to_string(),
                            z.re.to_string(),
                            z.im.to_string(),
                        ])?;
                    }
                }
            }
        }
    }
    w.flush()
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn print_normal_forms(words: &[String]) -> i32 {
    for word in words {
        match parse_word(word) {
            Ok(g) => {
                let letters = parse_letters(word).map(|l| l.len()).unwrap_or(0);
                println!(
                    "{word}\t{g}\t(n={}, k={}, m={}, letters={letters})",
                    g.n, g.k, g.m
                );
            }
            Err(e) => {
                eprintln!("error: {word:?}: {e}");
                return EXIT_CONFIG;
            }
        }
    }
    EXIT_PASS
}

fn replay(opts: &Opts, path: &Path, id: &str) -> anyhow::Result<i32> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let stored: Report =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let Some(fresh) = run_single(&stored.config, id) else {
        eprintln!("error: no check {id:?}");
        return Ok(EXIT_CONFIG);
    };
    let mut config = stored.config.clone();
    config.suites = vec![fresh.suite];
    let report = Report::new(config, vec![fresh.clone()]);
    emit(&render(&report, opts.format)?, opts.out.as_deref())?;
    if let Some(old) = stored.check(id) {
        if old.verdict != fresh.verdict {
            eprintln!(
                "note: stored verdict {} differs from replayed {}",
                old.verdict.label(),
                fresh.verdict.label()
            );
        }
    }
    Ok(if fresh.verdict.is_failure() {
        EXIT_FAIL
    } else {
        EXIT_PASS
    })
}

/// Runs the command line and returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_CONFIG
            } else {
                EXIT_PASS
            };
            let _ = e.print();
            return code;
        }
    };
    let suites = match &cli.command {
        Command::Group { words } if !words.is_empty() => return print_normal_forms(words),
        Command::Group { .. } => vec![Suite::Group],
        Command::Ops { .. } => vec![Suite::Ops],
        Command::Averaging => vec![Suite::Averaging],
        Command::Hulls => vec![Suite::Hulls],
        Command::Spectral => vec![Suite::Spectral],
        Command::Fibers => vec![Suite::Fibers],
        Command::Reps => vec![Suite::Reps],
        Command::All => Suite::ALL.to_vec(),
        Command::List => {
            for id in crate::run::check_ids() {
                println!("{id}");
            }
            return EXIT_PASS;
        }
        Command::Replay { report, check } => {
            return replay(&cli.opts, report, check).unwrap_or_else(|e| {
                eprintln!("error: {e:#}");
                EXIT_CONFIG
            });
        }
    };
    let config = match build_config(&cli.opts, suites) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let result = (|| -> anyhow::Result<i32> {
        if let Command::Ops { dump: Some(path) } = &cli.command {
            dump_generators(&config, path)?;
        }
        let report = run(&config);
        emit(&render(&report, config.format)?, config.output.as_deref())?;
        Ok(if report.success { EXIT_PASS } else { EXIT_FAIL })
    })();
    result.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        EXIT_CONFIG
    })
}
