use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use ffgrowth::field::list_subfields;
use ffgrowth::harness::{
    default_verify_config, generate_set, run_experiment, to_csv, to_json, verify_suite, ExperimentConfig, Family,
};
use ffgrowth::make_field;

#[derive(Parser)]
#[command(name = "ffgrowth", version, about = "Exact growth and energy counts over finite fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(clap::Args)]
struct RunArgs {
    /// TOML experiment config
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the config seed
    #[arg(long)]
    seed: Option<u64>,
    /// Write output files here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiments of a config and emit one row per trial
    Run(RunArgs),
    /// Check every certificate of a config (a built-in desk config by default)
    Verify(RunArgs),
    /// Print a generated set
    Gen {
        #[arg(long)]
        family: String,
        #[arg(long)]
        size: usize,
        #[arg(long)]
        seed: u64,
        #[arg(short, long)]
        p: u64,
        #[arg(short, long, default_value_t = 1)]
        n: u32,
        /// Allow 0 in the set
        #[arg(long)]
        allow_zero: bool,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Describe F_{p^n}: modulus, primitive element, subfields
    FieldInfo {
        #[arg(short, long)]
        p: u64,
        #[arg(short, long, default_value_t = 1)]
        n: u32,
    },
}

fn load_config(args: &RunArgs, required: bool) -> Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            ExperimentConfig::from_toml(&text)?
        }
        None if required => bail!("--config is required"),
        None => default_verify_config(),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn write_out(dir: &Path, name: &str, text: &str) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
}

fn run(args: RunArgs) -> Result<ExitCode> {
    let cfg = load_config(&args, true)?;
    let out = run_experiment(&cfg)?;
    match args.format {
        Format::Json => {
            let doc = to_json(&out);
            match &args.out {
                Some(dir) => write_out(dir, "results.json", &doc)?,
                None => print!("{doc}"),
            }
        }
        Format::Csv => {
            for exp in &out.experiments {
                let csv = to_csv(&out, exp)?;
                match &args.out {
                    Some(dir) => write_out(dir, &format!("{}.csv", exp.experiment.name()), &csv)?,
                    None => {
                        if out.experiments.len() > 1 {
                            println!("# {}", exp.experiment.name());
                        }
                        print!("{csv}");
                    }
                }
            }
        }
    }
    for exp in &out.experiments {
        for fit in &exp.fits {
            let reference = fit
                .reference_exponent
                .map_or(String::new(), |r| format!(" (reference exponent {r:.4})"));
            eprintln!(
                "{} {} {}: slope {:.4} over {} samples{reference}",
                exp.experiment.name(),
                fit.family.name(),
                fit.quantity,
                fit.slope,
                fit.samples
            );
        }
    }
    let failures = out.certificate_failures();
    if failures > 0 {
        eprintln!("{failures} certificate failure(s)");
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn verify(args: RunArgs) -> Result<ExitCode> {
    let cfg = load_config(&args, false)?;
    let summary = verify_suite(&cfg)?;
    let text = match args.format {
        Format::Json => serde_json::to_string_pretty(&summary)? + "\n",
        Format::Csv => {
            let mut s = format!(
                "checks_run,skipped,failures\n{},{},{}\n",
                summary.checks_run,
                summary.skipped,
                summary.failures.len()
            );
            for f in &summary.failures {
                let set: Vec<String> = f.set.iter().map(|v| v.to_string()).collect();
                s += &format!(
                    "# FAIL {} {} p={} n={} family={} size={} trial={} seed={} set=[{}]\n",
                    f.experiment.name(),
                    f.check,
                    f.p,
                    f.n,
                    f.family.name(),
                    f.size,
                    f.trial,
                    f.seed,
                    set.join(" ")
                );
            }
            s
        }
    };
    match &args.out {
        Some(dir) => write_out(
            dir,
            if args.format == Format::Json { "verify.json" } else { "verify.csv" },
            &text,
        )?,
        None => print!("{text}"),
    }
    Ok(if summary.failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Verify(args) => verify(args),
        Command::Gen {
            family,
            size,
            seed,
            p,
            n,
            allow_zero,
            format,
        } => (|| {
            let fam = Family::parse(&family).with_context(|| format!("unknown family {family:?}"))?;
            let field = make_field(p, n)?;
            let set = generate_set(fam, size, seed, &field, !allow_zero)?;
            match format {
                Format::Json => println!("{}", serde_json::to_string(&set.raw())?),
                Format::Csv => {
                    let items: Vec<String> = set.iter().map(|e| field.format(e)).collect();
                    println!("{}", items.join(","));
                }
            }
            Ok(ExitCode::SUCCESS)
        })(),
        Command::FieldInfo { p, n } => (|| {
            let field = make_field(p, n)?;
            println!("order {}", field.order());
            if let Some(m) = field.modulus() {
                let coeffs: Vec<String> = m.iter().map(|c| c.to_string()).collect();
                println!("modulus {} (constant term first)", coeffs.join(" "));
            }
            println!("primitive element {}", field.format(field.primitive_element()));
            for s in list_subfields(&field) {
                println!("subfield degree {} order {}", s.degree, s.order());
            }
            Ok(ExitCode::SUCCESS)
        })(),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
