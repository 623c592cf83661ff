//! Command line front end for the box-basket-ball simulator.
//!
//! Four subcommands: `evolve` prints orbit rows, `scatter` collides two
//! solitons and checks the phase shifts against the prediction table,
//! `verify` runs the named identity suites, and `classify` reports the
//! soliton content of a vacuum-free word. Output is a pure function of
//! (input, flags, seed). Exit code 0 means everything checked out, 1 is a
//! verification failure, 2 a usage error.

use std::fs;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use bbbs::evolve::orbit;
use bbbs::minplus::MinPlus;
use bbbs::scatter::{build_experiment, run_and_verify};
use bbbs::soliton::{
    chunk_decompose, classify_basic, pure_limit, Classification, NotBasicReason, PureSoliton,
};
use bbbs::state::{
    parse_word as parse_word_tokens, render_ascii, render_rows, render_triples, Configuration,
    Token, VACUUM,
};
use bbbs::verify::{run_suite, SuiteReport, SUITES};

#[derive(Parser)]
#[command(
    name = "bbbs",
    version,
    about = "Box-basket-ball simulator and verification laboratory"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the orbit of a configuration, one row per time step.
    Evolve(EvolveArgs),
    /// Collide two solitons and check the measured phase shifts.
    Scatter(ScatterArgs),
    /// Run verification suites and report their counts.
    Verify(VerifyArgs),
    /// Report the soliton content of a vacuum-free word.
    Classify(ClassifyArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Tokens,
    Triples,
    Ascii,
    Json,
}

fn parse_capacity(s: &str) -> Result<MinPlus, String> {
    if s == "inf" {
        return Ok(MinPlus::Infinity);
    }
    match s.parse::<i64>() {
        Ok(n) if n >= 1 => Ok(MinPlus::Finite(n)),
        _ => Err(format!(
            "capacity is a positive integer or \"inf\", got {s:?}"
        )),
    }
}

#[derive(Args)]
struct InputArgs {
    /// Configuration text, letter tokens or (a,b,c) triples.
    text: Option<String>,
    /// Read the input from this file instead.
    #[arg(long, value_name = "PATH", conflicts_with = "text")]
    file: Option<PathBuf>,
    /// Read the input from standard input instead.
    #[arg(long, conflicts_with_all = ["text", "file"])]
    stdin: bool,
}

impl InputArgs {
    fn read(&self) -> Result<String, String> {
        if let Some(t) = &self.text {
            return Ok(t.clone());
        }
        if let Some(p) = &self.file {
            return fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()));
        }
        if self.stdin {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| format!("stdin: {e}"))?;
            return Ok(buf);
        }
        Err("no input: pass text, --file, or --stdin".into())
    }
}

#[derive(Args)]
struct EvolveArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Carrier capacity, a positive integer or "inf".
    #[arg(long = "l", value_parser = parse_capacity, default_value = "inf", value_name = "CAPACITY")]
    capacity: MinPlus,
    /// Number of steps; the initial row is printed too.
    #[arg(long, default_value_t = 1)]
    steps: usize,
    #[arg(long, value_enum, default_value_t = Format::Tokens)]
    format: Format,
}

#[derive(Args)]
struct ScatterArgs {
    /// The probe, a fast word such as F3.
    fast: String,
    /// The target, any slower basic word such as B1U3F or F2.
    target: String,
    /// Carrier capacity, a positive integer or "inf".
    #[arg(long = "l", value_parser = parse_capacity, default_value = "inf", value_name = "CAPACITY")]
    capacity: MinPlus,
    /// Vacuum sites between the two solitons; 0 picks a safe default.
    #[arg(long, default_value_t = 0)]
    gap: i64,
    /// Step budget; 0 picks a generous default.
    #[arg(long, default_value_t = 0)]
    horizon: u64,
    #[arg(long, value_enum, default_value_t = Format::Tokens)]
    format: Format,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name; omit to run every suite.
    suite: Option<String>,
    /// Random cases per suite, on top of each suite's fixed sweep.
    #[arg(long, default_value_t = 200)]
    count: u64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Tokens)]
    format: Format,
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum, default_value_t = Format::Tokens)]
    format: Format,
}

fn parse_word(s: &str) -> Result<Vec<Token>, String> {
    parse_word_tokens(s).map_err(|e| e.to_string())
}

fn cmd_evolve(args: &EvolveArgs) -> Result<bool, String> {
    let text = args.input.read()?;
    let config: Configuration = text.trim().parse().map_err(|e| format!("{e}"))?;
    let rows = orbit(&config, args.capacity, args.steps).map_err(|e| e.to_string())?;
    match args.format {
        Format::Tokens => print!("{}", render_rows(&rows)),
        Format::Triples => {
            for row in &rows {
                println!("{}", render_triples(row));
            }
        }
        Format::Ascii => {
            // Pad every row to the leftmost origin so columns line up.
            let min = rows.iter().map(|r| r.origin).min().unwrap_or(0);
            for (i, row) in rows.iter().enumerate() {
                if i > 0 {
                    println!();
                }
                let mut sites = vec![VACUUM; (row.origin - min) as usize];
                sites.extend(row.sites.iter().copied());
                print!("{}", render_ascii(&Configuration::new(min, sites)));
            }
        }
        Format::Json => {
            println!(
                "{}",
                serde_json::to_string(&rows).map_err(|e| e.to_string())?
            )
        }
    }
    Ok(true)
}

fn cmd_scatter(args: &ScatterArgs) -> Result<bool, String> {
    let probe = parse_word(&args.fast)?;
    let target = parse_word(&args.target)?;
    let gap = if args.gap == 0 {
        2 * probe.len() as i64 + 2
    } else {
        args.gap
    };
    let experiment = build_experiment(&[probe, target], &[gap], args.capacity, args.horizon)
        .map_err(|e| e.to_string())?;
    let outcome = run_and_verify(&experiment).map_err(|e| e.to_string())?;
    if args.format == Format::Json {
        println!(
            "{}",
            serde_json::to_string(&outcome).map_err(|e| e.to_string())?
        );
        return Ok(outcome.pass);
    }
    // The probe overtakes the target, so the final spatial order is the
    // reverse of the experiment order.
    let probe_d = &outcome.measured.solitons[0];
    let target_d = &outcome.measured.solitons[1];
    println!(
        "measured  {} [{:+}]  {} [{:+}]",
        target_d.tokens, target_d.delta, probe_d.tokens, probe_d.delta
    );
    println!(
        "predicted {} [{:+}]  {} [{:+}]",
        target_d.tokens,
        outcome.predicted.solitons[1],
        probe_d.tokens,
        outcome.predicted.solitons[0]
    );
    println!("delta ({:+}, {:+})", target_d.delta, probe_d.delta);
    let entities: Vec<String> = outcome
        .measured
        .entities
        .iter()
        .map(|(id, shift)| format!("{id}[{shift:+}]"))
        .collect();
    println!("entities {}", entities.join(" "));
    if outcome.pass {
        println!("verdict pass");
    } else {
        println!("verdict FAIL");
        for m in &outcome.mismatches {
            println!("  {m}");
        }
    }
    Ok(outcome.pass)
}

fn cmd_verify(args: &VerifyArgs) -> Result<bool, String> {
    let names: Vec<&str> = match &args.suite {
        Some(s) => {
            if !SUITES.contains(&s.as_str()) {
                return Err(format!(
                    "unknown suite {s:?}; available: {}",
                    SUITES.join(", ")
                ));
            }
            vec![SUITES[SUITES.iter().position(|n| *n == s.as_str()).unwrap()]]
        }
        None => SUITES.to_vec(),
    };
    let reports: Vec<SuiteReport> = names
        .iter()
        .map(|n| run_suite(n, args.seed, args.count).expect("name comes from the list"))
        .collect();
    let pass = reports.iter().all(SuiteReport::pass);
    if args.format == Format::Json {
        println!(
            "{}",
            serde_json::to_string(&reports).map_err(|e| e.to_string())?
        );
        return Ok(pass);
    }
    for report in &reports {
        println!("{}", report.summary());
        for note in &report.notes {
            println!("  {note}");
        }
        for failure in &report.failures {
            println!("  counterexample {failure}");
        }
    }
    Ok(pass)
}

#[derive(Serialize)]
struct ClassifyOut {
    classification: String,
    blocks: Vec<String>,
    ball_solitons: usize,
    basket_solitons: usize,
    fast_amplitudes: Vec<u32>,
    basket_amplitudes: Vec<u32>,
    chunks: Vec<String>,
}

fn format_word(tokens: &[Token]) -> String {
    let parts: Vec<String> = tokens.iter().map(Token::to_string).collect();
    parts.join(" ")
}

fn cmd_classify(args: &ClassifyArgs) -> Result<bool, String> {
    let text = args.input.read()?;
    let word = parse_word(text.trim())?;
    // Maximal vacuum-free runs with their starting positions.
    let mut blocks: Vec<(usize, Vec<Token>)> = Vec::new();
    let mut run: Vec<Token> = Vec::new();
    let mut start = 0usize;
    for (i, t) in word.iter().enumerate() {
        if *t == Token::Vacuum {
            if !run.is_empty() {
                blocks.push((start, std::mem::take(&mut run)));
            }
        } else {
            if run.is_empty() {
                start = i;
            }
            run.push(*t);
        }
    }
    if !run.is_empty() {
        blocks.push((start, run));
    }

    let mut out = ClassifyOut {
        classification: "vacuum".into(),
        blocks: Vec::new(),
        ball_solitons: 0,
        basket_solitons: 0,
        fast_amplitudes: Vec::new(),
        basket_amplitudes: Vec::new(),
        chunks: Vec::new(),
    };
    // Amplitudes are reported in occurrence order, left to right.
    for (pos, tokens) in &blocks {
        match classify_basic(tokens).expect("runs are vacuum-free") {
            Classification::NotBasic(reason) => {
                out.classification = format!(
                    "NotBasic({})",
                    match reason {
                        NotBasicReason::ConsecutiveFf => "FF",
                        NotBasicReason::ConsecutiveFu => "FU",
                        NotBasicReason::Empty => "empty",
                    }
                );
                out.blocks.clear();
                out.blocks.push(format!("{} @{pos}", format_word(tokens)));
                if args.format == Format::Json {
                    println!(
                        "{}",
                        serde_json::to_string(&out).map_err(|e| e.to_string())?
                    );
                } else {
                    println!("{}", out.classification);
                }
                return Ok(true);
            }
            Classification::Fast(k) => {
                out.blocks.push(format!("Fast({k}) @{pos}"));
                out.ball_solitons += 1;
                out.fast_amplitudes.push(k);
            }
            Classification::Slow => {
                out.blocks
                    .push(format!("Slow({}) @{pos}", format_word(tokens)));
                let chunks = chunk_decompose(tokens);
                for chunk in &chunks {
                    for pure in pure_limit(chunk) {
                        match pure {
                            PureSoliton::Fast(k) => {
                                out.ball_solitons += 1;
                                out.fast_amplitudes.push(k);
                            }
                            PureSoliton::Baskets(v) => out.basket_amplitudes.extend(v),
                        }
                    }
                }
                out.chunks.extend(chunks.iter().map(|c| c.to_string()));
            }
        }
    }
    out.basket_solitons = out.basket_amplitudes.len();
    out.classification = match blocks.len() {
        0 => "vacuum".into(),
        1 => match classify_basic(&blocks[0].1).expect("runs are vacuum-free") {
            Classification::Fast(k) => format!("Fast({k})"),
            _ => "Slow".into(),
        },
        _ => "union".into(),
    };
    if args.format == Format::Json {
        println!(
            "{}",
            serde_json::to_string(&out).map_err(|e| e.to_string())?
        );
        return Ok(true);
    }
    println!("{}", out.classification);
    if out.classification == "vacuum" || out.classification.starts_with("Fast(") {
        return Ok(true);
    }
    if out.blocks.len() > 1 {
        for block in &out.blocks {
            println!("  {block}");
        }
    }
    let amps: Vec<String> = out.basket_amplitudes.iter().map(u32::to_string).collect();
    println!(
        "{} ball soliton{}, {} basket soliton{}, basket amplitudes {}",
        out.ball_solitons,
        if out.ball_solitons == 1 { "" } else { "s" },
        out.basket_solitons,
        if out.basket_solitons == 1 { "" } else { "s" },
        amps.join(",")
    );
    if !out.chunks.is_empty() {
        println!("chunks {}", out.chunks.join(" "));
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Evolve(args) => cmd_evolve(args),
        Command::Scatter(args) => cmd_scatter(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Classify(args) => cmd_classify(args),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
