//! Command-line orchestration for the `normality` toolkit.
//!
//! Every run prints (or writes to `--output`) one report. JSON reports are
//! `{"config": <RunConfig>, "report": <payload>}`; CSV reports carry the same
//! config as JSON in a trailing `config` column. Exit codes: 0 success,
//! 1 a `verify-lemma` checkpoint failed, 2 usage or input error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use normality::discrepancy::{phi_envelope, prefix_discrepancies};
use normality::generators::parse_digit_text;
use normality::{
    default_checkpoints, exhaustive_min_with, extreme_discrepancy, lemma1_verify,
    normality_fast_parallel, normality_naive, orbit_points, parse_bits, parse_points, typical_scan,
    BitSequence, DigitStream, GeneratorSpec, SearchOptions, DEFAULT_WINDOW_BITS,
};

/// Longest sequence accepted inline through `--bits`.
pub const MAX_INLINE_BITS: usize = 1 << 16;

#[derive(Parser, Debug)]
#[command(
    name = "normality",
    version,
    about = "Exact normality measure and orbit discrepancy toolkit"
)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Algorithm {
    Fast,
    Naive,
}

#[derive(Args, Debug, Clone, Default)]
struct Source {
    /// Digit generator: champernowne, rational:P/Q, random:SEED or file:PATH.
    #[arg(long = "gen")]
    generator: Option<String>,
    /// Sequence length or point count.
    #[arg(long = "n")]
    n: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Normality measure of one sequence.
    Measure {
        /// Inline digits, `0110` or `hex:<digits>/<length>`.
        #[arg(long, conflicts_with_all = ["input", "generator"])]
        bits: Option<String>,
        /// File of digits (whitespace ignored) or a hex form.
        #[arg(long, conflicts_with = "generator")]
        input: Option<PathBuf>,
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum, default_value_t = Algorithm::Fast)]
        algorithm: Algorithm,
    },
    /// Extreme and star discrepancy of a point file or a truncated orbit.
    Discrepancy {
        /// File of `num/2^w` lines.
        #[arg(long, conflicts_with = "generator")]
        points: Option<PathBuf>,
        #[command(flatten)]
        source: Source,
        /// Window bits per orbit point.
        #[arg(long = "w", default_value_t = DEFAULT_WINDOW_BITS)]
        w: u32,
        /// Also report D_M and Φ(M) for every prefix.
        #[arg(long)]
        prefix: bool,
    },
    /// Check N(Z_M) <= Φ(M) at checkpoints.
    VerifyLemma {
        #[command(flatten)]
        source: Source,
        #[arg(long = "w", default_value_t = DEFAULT_WINDOW_BITS)]
        w: u32,
        /// Comma-separated checkpoints (default: powers of two and N).
        #[arg(long, value_delimiter = ',')]
        checkpoints: Option<Vec<usize>>,
    },
    /// Exact minimum of the measure over all sequences of length N.
    SearchMin {
        #[arg(long = "n")]
        n: usize,
        /// Tabulate every length from this one up to N.
        #[arg(long)]
        from: Option<usize>,
        #[arg(long, default_value_t = 16)]
        cap: usize,
        #[arg(long)]
        no_pruning: bool,
        #[arg(long, default_value_t = 8)]
        split_depth: usize,
    },
    /// Quantiles of N(E)/sqrt(N) over seeded random sequences.
    Scan {
        #[arg(long = "n")]
        n: usize,
        #[arg(long)]
        samples: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Emit the digits of a generator.
    Generate {
        #[command(flatten)]
        source: Source,
    },
}

/// Provenance block embedded in every report.
#[derive(Serialize, Debug, Default)]
struct RunConfig {
    subcommand: &'static str,
    generator: Option<String>,
    input: Option<String>,
    n: Option<usize>,
    w: Option<u32>,
    seed: Option<u64>,
    samples: Option<usize>,
    checkpoints: Option<Vec<usize>>,
    algorithm: Option<Algorithm>,
    cap: Option<usize>,
    pruning: Option<bool>,
    split_depth: Option<usize>,
    from: Option<usize>,
    prefix: Option<bool>,
    threads: Option<usize>,
    format: Option<Format>,
    output: Option<String>,
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

/// A rendered report plus whether it counts as a pass.
struct Outcome {
    json: serde_json::Value,
    csv: Csv,
    pass: bool,
}

struct Csv {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

fn required<T>(v: Option<T>, flag: &str) -> Result<T, Failure> {
    v.ok_or_else(|| Failure(format!("missing required --{flag}")))
}

fn open_stream(source: &Source) -> Result<(GeneratorSpec, DigitStream), Failure> {
    let text = required(source.generator.as_deref(), "gen")?;
    let spec: GeneratorSpec = text.parse()?;
    let stream = DigitStream::open(&spec)?;
    Ok((spec, stream))
}

fn exact_cells(v: normality::ExactValue) -> [String; 3] {
    [
        v.numerator().to_string(),
        v.log2_denominator().to_string(),
        format_decimal(v.to_f64()),
    ]
}

fn format_decimal(x: f64) -> String {
    serde_json::Number::from_f64(x).map_or_else(|| x.to_string(), |n| n.to_string())
}

fn read_sequence(path: &PathBuf) -> Result<BitSequence, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure(format!("cannot read {}: {e}", path.display())))?;
    let trimmed = text.trim();
    Ok(if trimmed.starts_with("hex:") {
        parse_bits(trimmed)?
    } else {
        parse_digit_text(&text)?
    })
}

fn measure(
    config: &mut RunConfig,
    bits: Option<String>,
    input: Option<PathBuf>,
    source: Source,
    algorithm: Algorithm,
) -> Result<Outcome, Failure> {
    config.algorithm = Some(algorithm);
    let seq = if let Some(text) = bits {
        if text.len() > MAX_INLINE_BITS {
            return Err(Failure(format!(
                "--bits accepts at most {MAX_INLINE_BITS} characters; use --input"
            )));
        }
        parse_bits(&text)?
    } else if let Some(path) = input {
        config.input = Some(path.display().to_string());
        read_sequence(&path)?
    } else if source.generator.is_some() {
        let n = required(source.n, "n")?;
        let (spec, stream) = open_stream(&source)?;
        config.generator = Some(spec.to_string());
        config.n = Some(n);
        stream.digits(n)?
    } else {
        return Err(Failure("measure needs --bits, --input or --gen".into()));
    };
    config.n = Some(seq.len());
    let report = match algorithm {
        Algorithm::Fast => normality_fast_parallel(&seq),
        Algorithm::Naive => normality_naive(&seq),
    };
    let rows = report
        .per_k_max
        .iter()
        .map(|&(k, v)| {
            let [num, den, dec] = exact_cells(v);
            vec![k.to_string(), num, den, dec]
        })
        .collect();
    Ok(Outcome {
        json: serde_json::to_value(&report)?,
        csv: Csv {
            header: vec!["k", "num", "log2_den", "decimal"],
            rows,
        },
        pass: true,
    })
}

fn discrepancy(
    config: &mut RunConfig,
    points: Option<PathBuf>,
    source: Source,
    w: u32,
    prefix: bool,
) -> Result<Outcome, Failure> {
    config.prefix = Some(prefix);
    let set = if let Some(path) = points {
        config.input = Some(path.display().to_string());
        let text = std::fs::read_to_string(&path)
            .map_err(|e| Failure(format!("cannot read {}: {e}", path.display())))?;
        parse_points(&text)?
    } else {
        let n = required(source.n, "n")?;
        let (spec, stream) = open_stream(&source)?;
        config.generator = Some(spec.to_string());
        config.n = Some(n);
        config.w = Some(w);
        orbit_points(&stream, n, w)?
    };
    config.n = Some(set.len());
    let report = extreme_discrepancy(&set)?;
    let mut json = serde_json::to_value(&report)?;
    let rational = |r: &normality::Rational| {
        vec![
            r.numerator().to_string(),
            r.denominator().to_string(),
            format_decimal(r.to_f64()),
        ]
    };
    let csv = if prefix {
        let ds = prefix_discrepancies(&set);
        let phi = phi_envelope(&ds);
        let table: Vec<serde_json::Value> = ds
            .iter()
            .zip(&phi.values)
            .enumerate()
            .map(|(i, (d, p))| {
                serde_json::json!({
                    "m": i + 1,
                    "d_num": d.numerator(), "d_den": d.denominator(), "d_decimal": d.to_f64(),
                    "phi_num": p.numerator(), "phi_den": p.denominator(), "phi_decimal": p.to_f64(),
                })
            })
            .collect();
        json["prefix"] = serde_json::Value::Array(table);
        let rows = ds
            .iter()
            .zip(&phi.values)
            .enumerate()
            .map(|(i, (d, p))| {
                let mut row = vec![(i + 1).to_string()];
                row.extend(rational(d));
                row.extend(rational(p));
                row
            })
            .collect();
        Csv {
            header: vec![
                "m",
                "d_num",
                "d_den",
                "d_decimal",
                "phi_num",
                "phi_den",
                "phi_decimal",
            ],
            rows,
        }
    } else {
        let mut row = vec![report.n.to_string()];
        row.extend(rational(&report.extreme));
        row.extend(rational(&report.star));
        Csv {
            header: vec![
                "n",
                "extreme_num",
                "extreme_den",
                "extreme_decimal",
                "star_num",
                "star_den",
                "star_decimal",
            ],
            rows: vec![row],
        }
    };
    Ok(Outcome {
        json,
        csv,
        pass: true,
    })
}

fn verify(
    config: &mut RunConfig,
    source: Source,
    w: u32,
    checkpoints: Option<Vec<usize>>,
) -> Result<Outcome, Failure> {
    let n = required(source.n, "n")?;
    let (spec, stream) = open_stream(&source)?;
    let checkpoints = checkpoints.unwrap_or_else(|| default_checkpoints(n));
    config.generator = Some(spec.to_string());
    config.n = Some(n);
    config.w = Some(w);
    config.checkpoints = Some(checkpoints.clone());
    let report = lemma1_verify(&stream, n, w, &checkpoints)?;
    let rows = report
        .checkpoints
        .iter()
        .map(|c| {
            let mut row = vec![c.n.to_string()];
            row.extend(exact_cells(c.normality));
            row.extend(exact_cells(c.phi));
            row.extend(exact_cells(c.margin));
            row.push(c.pass.to_string());
            row
        })
        .collect();
    Ok(Outcome {
        json: serde_json::to_value(&report)?,
        csv: Csv {
            header: vec![
                "n",
                "normality_num",
                "normality_log2_den",
                "normality_decimal",
                "phi_num",
                "phi_log2_den",
                "phi_decimal",
                "margin_num",
                "margin_log2_den",
                "margin_decimal",
                "pass",
            ],
            rows,
        },
        pass: report.overall_pass,
    })
}

fn search(
    config: &mut RunConfig,
    n: usize,
    from: Option<usize>,
    options: SearchOptions,
) -> Result<Outcome, Failure> {
    config.n = Some(n);
    config.from = from;
    config.cap = Some(options.cap);
    config.pruning = Some(options.pruning);
    config.split_depth = Some(options.split_depth);
    let first = from.unwrap_or(n);
    if first > n {
        return Err(Failure(format!("--from {first} exceeds --n {n}")));
    }
    let results = (first..=n)
        .map(|len| exhaustive_min_with(len, options))
        .collect::<Result<Vec<_>, _>>()?;
    let rows = results
        .iter()
        .map(|r| {
            let mut row = vec![r.n.to_string()];
            row.extend(exact_cells(r.min_value));
            row.push(
                r.witnesses
                    .first()
                    .map(|w| w.to_string())
                    .unwrap_or_default(),
            );
            row
        })
        .collect();
    let json = if from.is_some() {
        serde_json::to_value(&results)?
    } else {
        serde_json::to_value(&results[0])?
    };
    Ok(Outcome {
        json,
        csv: Csv {
            header: vec!["N", "min_num", "min_log2_den", "min_decimal", "witness"],
            rows,
        },
        pass: true,
    })
}

fn scan(config: &mut RunConfig, n: usize, samples: usize, seed: u64) -> Result<Outcome, Failure> {
    config.n = Some(n);
    config.samples = Some(samples);
    config.seed = Some(seed);
    let stats = typical_scan(n, samples, seed)?;
    let row = [
        stats.min,
        stats.q05,
        stats.q25,
        stats.median,
        stats.q75,
        stats.q95,
        stats.max,
    ];
    let mut cells = vec![n.to_string(), samples.to_string(), seed.to_string()];
    cells.extend(row.iter().map(|&x| format_decimal(x)));
    Ok(Outcome {
        json: serde_json::to_value(&stats)?,
        csv: Csv {
            header: vec![
                "n", "samples", "seed", "min", "q05", "q25", "median", "q75", "q95", "max",
            ],
            rows: vec![cells],
        },
        pass: true,
    })
}

fn generate(config: &mut RunConfig, source: Source) -> Result<Outcome, Failure> {
    let n = required(source.n, "n")?;
    let (spec, stream) = open_stream(&source)?;
    config.generator = Some(spec.to_string());
    config.n = Some(n);
    let digits = stream.digits(n)?.to_string();
    Ok(Outcome {
        json: serde_json::json!({ "generator": stream.label(), "n": n, "digits": digits }),
        csv: Csv {
            header: vec!["n", "digits"],
            rows: vec![vec![n.to_string(), digits]],
        },
        pass: true,
    })
}

fn dispatch(command: Command, config: &mut RunConfig) -> Result<Outcome, Failure> {
    match command {
        Command::Measure {
            bits,
            input,
            source,
            algorithm,
        } => {
            config.subcommand = "measure";
            measure(config, bits, input, source, algorithm)
        }
        Command::Discrepancy {
            points,
            source,
            w,
            prefix,
        } => {
            config.subcommand = "discrepancy";
            discrepancy(config, points, source, w, prefix)
        }
        Command::VerifyLemma {
            source,
            w,
            checkpoints,
        } => {
            config.subcommand = "verify-lemma";
            verify(config, source, w, checkpoints)
        }
        Command::SearchMin {
            n,
            from,
            cap,
            no_pruning,
            split_depth,
        } => {
            config.subcommand = "search-min";
            let options = SearchOptions {
                cap,
                pruning: !no_pruning,
                split_depth,
            };
            search(config, n, from, options)
        }
        Command::Scan { n, samples, seed } => {
            config.subcommand = "scan";
            scan(config, n, samples, seed)
        }
        Command::Generate { source } => {
            config.subcommand = "generate";
            generate(config, source)
        }
    }
}

fn render(outcome: &Outcome, config: &RunConfig, format: Format) -> Result<Vec<u8>, Failure> {
    match format {
        Format::Json => {
            let doc = serde_json::json!({ "config": config, "report": outcome.json });
            let mut out = serde_json::to_vec_pretty(&doc)?;
            out.push(b'\n');
            Ok(out)
        }
        Format::Csv => {
            let config_json = serde_json::to_string(config)?;
            let mut writer = csv::Writer::from_writer(Vec::new());
            let mut header = outcome.csv.header.clone();
            header.push("config");
            writer.write_record(&header)?;
            for row in &outcome.csv.rows {
                let mut row = row.clone();
                row.push(config_json.clone());
                writer.write_record(&row)?;
            }
            writer.into_inner().map_err(|e| Failure(e.to_string()))
        }
    }
}

fn execute(cli: Cli) -> Result<(Vec<u8>, Option<PathBuf>, bool), Failure> {
    let mut config = RunConfig {
        threads: cli.threads,
        format: Some(cli.format),
        output: cli.output.as_ref().map(|p| p.display().to_string()),
        ..RunConfig::default()
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(Failure("--threads must be at least 1".into()));
        }
        builder = builder.num_threads(t);
    }
    let pool = builder.build()?;
    let outcome = pool.install(|| dispatch(cli.command, &mut config))?;
    let bytes = render(&outcome, &config, cli.format)?;
    Ok((bytes, cli.output, outcome.pass))
}

/// Runs one command line and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
                2
            } else {
                let _ = stdout.write_all(text.as_bytes());
                0
            };
        }
    };
    match execute(cli) {
        Ok((bytes, output, pass)) => {
            let written = match output {
                Some(path) => std::fs::write(&path, &bytes)
                    .map_err(|e| format!("cannot write {}: {e}", path.display())),
                None => stdout.write_all(&bytes).map_err(|e| e.to_string()),
            };
            if let Err(message) = written {
                let _ = writeln!(stderr, "error: {message}");
                return 2;
            }
            if pass {
                0
            } else {
                1
            }
        }
        Err(Failure(message)) => {
            let _ = writeln!(stderr, "error: {}", message.lines().next().unwrap_or(""));
            2
        }
    }
}
