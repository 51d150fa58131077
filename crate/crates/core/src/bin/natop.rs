use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use natop::cli::{self, Command, Config, Family, Format, Mode, Settings};

#[derive(Parser)]
#[command(name = "natop", version, about = "Natural operators of linear connections: dimensions, kernels and identity checks")]
struct Cli {
    /// Defaults file with `key = value` lines (m, trials, mode, seed).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Dimension of the operator space for `d` vector-field arguments.
    Dim {
        #[arg(long)]
        d: usize,
        /// Also compute the jet-evaluation rank in this manifold dimension.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        trials: Option<usize>,
    },
    /// `Kr(n)` and whether a generator family spans it.
    Kernel {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = FamilyArg::Classical)]
        family: FamilyArg,
    },
    /// Check an identity residual or a negative control.
    Verify {
        #[arg(long)]
        identity: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        #[arg(long)]
        trials: Option<usize>,
        /// Random mode only; `NATOP_SEED` takes precedence.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Symmetries of the ideal operators of degree `n`.
    VerifyIdeal {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: Option<usize>,
    },
    /// Basis of the decorated graph space.
    Basis {
        #[arg(long)]
        d: usize,
    },
    /// Parse and pretty-print a term.
    Parse {
        #[arg(long)]
        expr: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Latex,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Classical,
    Canonical,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Random,
}

fn main() -> ExitCode {
    let args = Cli::parse();
    let format = match args.format {
        FormatArg::Json => Format::Json,
        FormatArg::Latex => Format::Latex,
        FormatArg::Text => Format::Text,
    };
    let config = match args.config.as_deref().map(Config::load).transpose() {
        Ok(c) => c.unwrap_or_default(),
        Err(e) => {
            print!("{}", cli::render(&cli::error_json(&e), format));
            return ExitCode::from(2);
        }
    };
    let mut settings = Settings { format, ..Settings::default() };
    if let Some(t) = config.trials {
        settings.trials = t;
    }
    if let Some(s) = config.seed {
        settings.seed = s;
    }
    let default_m = config.m.unwrap_or(3);
    let cmd = match args.command {
        Sub::Dim { d, m, trials } => {
            if let Some(t) = trials {
                settings.trials = t;
            }
            Command::Dim { d, m: m.or(config.m) }
        }
        Sub::Kernel { n, family } => Command::Kernel {
            n,
            family: match family {
                FamilyArg::Classical => Family::Classical,
                FamilyArg::Canonical => Family::Canonical,
            },
        },
        Sub::Verify { identity, n, m, mode, trials, seed } => {
            if let Some(t) = trials {
                settings.trials = t;
            }
            if let Some(s) = seed {
                settings.seed = s;
            }
            if let Some(s) = std::env::var("NATOP_SEED").ok().and_then(|v| v.trim().parse().ok()) {
                settings.seed = s;
            }
            let mode = match mode {
                Some(ModeArg::Exact) => Mode::Exact,
                Some(ModeArg::Random) => Mode::Random,
                None => config.mode.unwrap_or(Mode::Exact),
            };
            Command::Verify { identity, n, m: m.unwrap_or(default_m), mode }
        }
        Sub::VerifyIdeal { n, m } => Command::VerifyIdeal { n, m: m.unwrap_or(default_m) },
        Sub::Basis { d } => Command::Basis { d },
        Sub::Parse { expr } => Command::Parse { expr },
    };
    let outcome = cli::run(&cmd, &settings);
    print!("{}", cli::render(&outcome.report, settings.format));
    ExitCode::from(outcome.status as u8)
}
