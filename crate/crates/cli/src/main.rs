use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;

use hkperiod::arith::is_prime;
use hkperiod::lattice::{build_k3n_lattice, lemma21_check};
use hkperiod::report::{
    parse_scenario_document, parse_vector_arg, records_to_csv, records_to_jsonl, run_certify,
    run_oracle_check, run_survey, OptionOverrides, EXIT_FAILURE, EXIT_NONE_PATH, EXIT_OK,
};
use hkperiod::witness::PipelineOrder;

#[derive(Parser)]
#[command(name = "hkperiod", version, about = "Period-index certificates for K3^[n]-type lattices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Order {
    #[value(name = "thm04-first")]
    Thm04First,
    #[value(name = "thm02-first")]
    Thm02First,
}

impl From<Order> for PipelineOrder {
    fn from(o: Order) -> Self {
        match o {
            Order::Thm04First => PipelineOrder::Thm04First,
            Order::Thm02First => PipelineOrder::Thm02First,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Jsonl,
    Csv,
}

#[derive(clap::Args)]
struct SearchFlags {
    /// Pipeline order.
    #[arg(long, value_enum)]
    order: Option<Order>,
    /// Candidates tried per u search.
    #[arg(long)]
    cap: Option<usize>,
    /// Node budget of the congruence lift search.
    #[arg(long)]
    budget: Option<u64>,
}

impl SearchFlags {
    fn overrides(&self) -> OptionOverrides {
        OptionOverrides {
            order: self.order.map(Into::into),
            cap: self.cap,
            budget: self.budget,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Certify every scenario in the given files.
    Certify {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        #[command(flatten)]
        search: SearchFlags,
        #[arg(long, value_enum, default_value = "jsonl")]
        format: Format,
        /// Record wall time per scenario.
        #[arg(long)]
        timing: bool,
        /// Write the report here instead of stdout.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Tabulate certification paths over random B-fields of a template.
    Survey {
        /// Scenario file whose lattice data is reused.
        #[arg(long)]
        template: PathBuf,
        /// Comma-separated values or an inclusive range `a..b`.
        #[arg(long)]
        ells: String,
        /// Keep only prime values of ell.
        #[arg(long)]
        primes: bool,
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        search: SearchFlags,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Compare the congruence solver with the brute-force oracle.
    OracleCheck {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        count: usize,
    },
    /// Pairing and divisibility queries in the K3^[n] lattice.
    Lattice {
        #[arg(long)]
        n: u32,
        /// 23 comma-separated integers or sparse `index=value` pairs.
        #[arg(long, allow_hyphen_values = true)]
        v: String,
        #[arg(long, allow_hyphen_values = true)]
        w: Option<String>,
    },
}

fn parse_ells(text: &str, primes: bool) -> anyhow::Result<Vec<BigInt>> {
    let mut out = Vec::new();
    if let Some((a, b)) = text.split_once("..") {
        let a: u64 = a.trim().parse().context("bad range start")?;
        let b: u64 = b.trim().parse().context("bad range end")?;
        out.extend((a..=b).map(BigInt::from));
    } else {
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            out.push(part.parse::<BigInt>().with_context(|| format!("bad ell {part:?}"))?);
        }
    }
    if primes {
        out.retain(is_prime);
    }
    Ok(out)
}

fn emit(output: Option<&PathBuf>, text: &str) -> anyhow::Result<()> {
    match output {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    match cli.command {
        Command::Certify {
            paths,
            search,
            format,
            timing,
            output,
        } => {
            let run = run_certify(&paths, &search.overrides(), timing);
            for e in &run.errors {
                eprintln!("error: {e}");
            }
            let text = match format {
                Format::Jsonl => records_to_jsonl(&run.records),
                Format::Csv => records_to_csv(&run.records),
            };
            emit(output.as_ref(), &text)?;
            Ok(run.exit_code)
        }
        Command::Survey {
            template,
            ells,
            primes,
            count,
            seed,
            search,
            format,
        } => {
            let bytes = std::fs::read(&template).with_context(|| format!("reading {}", template.display()))?;
            let doc = parse_scenario_document(&bytes).with_context(|| template.display().to_string())?;
            let ells = parse_ells(&ells, primes)?;
            let opts = search.overrides().apply(doc.options.as_ref());
            let survey = run_survey(&doc.scenario, &ells, count, seed, &opts)?;
            let text = match format {
                Format::Csv => survey.to_csv(),
                Format::Jsonl => survey.to_jsonl(),
            };
            emit(None, &text)?;
            Ok(EXIT_OK)
        }
        Command::OracleCheck { seed, count } => {
            let s = run_oracle_check(seed, count);
            println!(
                "problems={} solvable={} unsolvable={} disagreements={}",
                s.problems,
                s.solvable,
                s.unsolvable,
                s.disagreements.len()
            );
            for d in &s.disagreements {
                eprintln!("disagreement: {d}");
            }
            Ok(if s.disagreements.is_empty() { EXIT_OK } else { EXIT_NONE_PATH })
        }
        Command::Lattice { n, v, w } => {
            if n < 2 {
                bail!("n must be at least 2");
            }
            let lat = build_k3n_lattice(n)?;
            let v = parse_vector_arg(&v)?;
            println!("q(v) = {}", lat.norm(&v)?);
            if v.is_zero() {
                println!("div(v) = 0");
            } else {
                println!("div(v) = {}", lat.divisibility(&v)?);
                println!("primitive = {}", lat.is_primitive(&v)?);
                if lat.is_primitive(&v)? {
                    println!("div(v) | 2n-2 = {}", lemma21_check(&lat, n, &v)?);
                }
            }
            if let Some(w) = w {
                let w = parse_vector_arg(&w)?;
                println!("q(w) = {}", lat.norm(&w)?);
                println!("q(v,w) = {}", lat.pairing(&v, &w)?);
            }
            Ok(EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_FAILURE as u8)
        }
    }
}
