use clap::{Args, Parser, Subcommand};

use curvlab_cli::commands::{
    cmd_betti, cmd_bounds, cmd_identities, cmd_spectrum, cmd_verify_all, render, Format,
};
use curvlab_cli::report::{ReportEnvelope, Status};

#[derive(Parser)]
#[command(
    name = "curvlab",
    version,
    about = "Curvature operators, structure-form identities, eigenvalue bounds \
             and vanishing criteria on model spaces"
)]
struct Cli {
    /// Output format: json, csv or pretty
    #[arg(long, global = true, default_value = "pretty")]
    format: String,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Residuals of the structure-form contraction identity suites
    Identities {
        /// Structure type: g2 or su3
        #[arg(long)]
        structure: String,
    },
    /// Eigenvalues of a curvature or Weyl operator on a subspace
    Spectrum {
        /// Built-in space id (aw-su3xsu2, s3xs3) or a JSON file path
        #[arg(long)]
        space: String,
        /// Operator: rhat, rring, what or wring
        #[arg(long)]
        operator: String,
        /// Subspace label such as omega2_full, omega2_14, s2_0, s2_minus
        #[arg(long)]
        subspace: Option<String>,
    },
    /// Closed eigenvalue intervals from the bound theorems
    Bounds(BoundsArgs),
    /// Sufficient conditions for vanishing of the Betti numbers
    Betti(BettiArgs),
    /// Run the full check suite
    VerifyAll {
        /// Sampling seed; defaults to CURVLAB_SEED or 0
        #[arg(long)]
        seed: Option<u64>,
        /// Random planes per space for the sectional checks; 0 skips them
        #[arg(long)]
        samples: Option<usize>,
    },
}

#[derive(Args)]
struct BoundsArgs {
    /// Theorem id: hat-general, hat-special, ring-general, ring-einstein,
    /// nk-ring-plus or nk-intersections
    #[arg(long)]
    theorem: String,
    /// Lower sectional curvature bound
    #[arg(long)]
    delta: f64,
    /// Upper sectional curvature bound
    #[arg(long = "Delta")]
    delta_cap: f64,
    /// Dimension, where the theorem needs it
    #[arg(long)]
    n: Option<usize>,
    /// Einstein constant, where the theorem needs it
    #[arg(long)]
    k: Option<f64>,
}

#[derive(Args)]
struct BettiArgs {
    /// Built-in space id
    #[arg(long)]
    space: String,
    /// Input mode: spectral or sectional
    #[arg(long)]
    mode: String,
    /// Lower sectional bound (sectional mode)
    #[arg(long)]
    delta: Option<f64>,
    /// Upper sectional bound (sectional mode)
    #[arg(long = "Delta")]
    delta_cap: Option<f64>,
}

fn env_seed() -> u64 {
    std::env::var("CURVLAB_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0)
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help and version requests are not usage errors
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let Some(format) = Format::parse(&cli.format) else {
        eprintln!("unknown format '{}', expected json, csv or pretty", cli.format);
        std::process::exit(1);
    };
    let outcome = match cli.command {
        Cmd::Identities { structure } => cmd_identities(&structure),
        Cmd::Spectrum {
            space,
            operator,
            subspace,
        } => cmd_spectrum(&space, &operator, subspace.as_deref()),
        Cmd::Bounds(args) => cmd_bounds(&args.theorem, args.delta, args.delta_cap, args.n, args.k),
        Cmd::Betti(args) => cmd_betti(&args.space, &args.mode, args.delta, args.delta_cap),
        Cmd::VerifyAll { seed, samples } => Ok(cmd_verify_all(
            seed.unwrap_or_else(env_seed),
            samples.unwrap_or(100_000),
        )),
    };
    match outcome {
        Ok(envelope) => {
            print!("{}", render(&envelope, format));
            if format == Format::Json {
                println!();
            }
            std::process::exit(envelope.exit_code());
        }
        Err(error) => {
            let envelope = ReportEnvelope {
                command: "error".into(),
                inputs: serde_json::json!({}),
                tolerances: serde_json::json!({}),
                status: Status::Error,
                results: serde_json::json!({ "message": error.to_string() }),
            };
            eprintln!("error: {error}");
            if format == Format::Json {
                println!("{}", envelope.to_json());
            }
            std::process::exit(1);
        }
    }
}
