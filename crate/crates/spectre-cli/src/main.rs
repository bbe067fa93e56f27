//! Command-line front end: exact spectral invariants of tame polynomials and
//! abstract lattice pairs, with JSON or human-readable output.

mod job;

use clap::{Args, Parser, Subcommand, ValueEnum};
use job::{run_job, JobSpec, Outcome, EXIT_OK, EXIT_USAGE};
use serde_json::Value;

#[derive(Parser)]
#[command(
    name = "spectre",
    about = "Exact spectral invariants of tame polynomials: Milnor numbers, Brieskorn lattices, spectra, Birkhoff normal forms and Mellin determinants",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Skip the Newton nondegeneracy check where it applies.
    #[arg(long, global = true)]
    skip_nondegeneracy_check: bool,
    /// Cap for the V-filtration window extension.
    #[arg(long, global = true)]
    window_cap: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Human,
}

#[derive(Args, Clone)]
struct InputArgs {
    /// Polynomial text, e.g. "x^3 + y^3" or "1/3x^3 - x + 1/2y^2".
    #[arg(short = 'f', long = "poly")]
    poly: Option<String>,
    /// Comma-separated variable names, e.g. x,y.
    #[arg(long, value_delimiter = ',')]
    vars: Option<Vec<String>>,
    /// Abstract lattice pair as a JSON file (mu and the theta-matrix of t).
    #[arg(long)]
    lattice: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Milnor number and the standard monomial basis of the Milnor algebra.
    Milnor(InputArgs),
    /// Spectrum by the Newton filtration, by the V-filtration, or both.
    Spectrum {
        #[command(flatten)]
        input: InputArgs,
        /// newton | vfilt | both (default: both for polynomials, vfilt for lattices).
        #[arg(long)]
        method: Option<String>,
    },
    /// The matrix of t = theta^2 d/dtheta on the Brieskorn lattice.
    Tmatrix(InputArgs),
    /// Solve the Birkhoff problem: basis with t-matrix A0 + theta A1 and
    /// spec(A1) = spectrum.
    Goodbasis(InputArgs),
    /// Characteristic polynomial of the monodromy from the spectrum.
    Monodromy(InputArgs),
    /// Mellin-transform data computed from a good basis.
    Mellin {
        /// det-t | aomoto | dim.
        op: String,
        #[command(flatten)]
        input: InputArgs,
    },
    /// The dual spectrum (beta -> -beta).
    Dual(InputArgs),
    /// Thom-Sebastiani convolution of two spectra.
    Convolve {
        #[command(flatten)]
        input: InputArgs,
        /// Second polynomial.
        #[arg(short = 'g', long = "poly2")]
        poly2: Option<String>,
        /// Variables of the second polynomial.
        #[arg(long, value_delimiter = ',')]
        vars2: Option<Vec<String>>,
        /// Second lattice file.
        #[arg(long)]
        lattice2: Option<String>,
    },
    /// Twist the lattice pair by e^{c tau}: A0 shifts by c I.
    Twist {
        #[command(flatten)]
        input: InputArgs,
        /// The twist constant, e.g. -1 or 3/7.
        #[arg(short = 'c', long = "constant", allow_hyphen_values = true)]
        c: String,
    },
    /// Run the symmetry / positivity / degree / newton-vs-vfilt checks.
    Check(InputArgs),
    /// Run a JSON manifest of jobs; one job's failure never aborts the others.
    Batch {
        /// Path to a JSON array of job specifications.
        manifest: String,
    },
}

fn job_from_input(command: &str, input: &InputArgs, cli_flags: (bool, Option<usize>)) -> JobSpec {
    JobSpec {
        command: command.to_string(),
        poly: input.poly.clone(),
        vars: input.vars.clone(),
        lattice: input.lattice.clone(),
        skip_nondegeneracy_check: Some(cli_flags.0),
        window_cap: cli_flags.1,
        ..Default::default()
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version are not usage errors.
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                std::process::exit(EXIT_OK);
            }
            eprint!("{e}");
            std::process::exit(EXIT_USAGE);
        }
    };
    let flags = (cli.skip_nondegeneracy_check, cli.window_cap);

    let outcome = match &cli.command {
        Command::Milnor(input) => run_job(&job_from_input("milnor", input, flags)),
        Command::Spectrum { input, method } => {
            let mut job = job_from_input("spectrum", input, flags);
            job.method = method.clone();
            run_job(&job)
        }
        Command::Tmatrix(input) => run_job(&job_from_input("tmatrix", input, flags)),
        Command::Goodbasis(input) => run_job(&job_from_input("goodbasis", input, flags)),
        Command::Monodromy(input) => run_job(&job_from_input("monodromy", input, flags)),
        Command::Mellin { op, input } => {
            let mut job = job_from_input("mellin", input, flags);
            job.op = Some(op.clone());
            run_job(&job)
        }
        Command::Dual(input) => run_job(&job_from_input("dual", input, flags)),
        Command::Convolve {
            input,
            poly2,
            vars2,
            lattice2,
        } => {
            let mut job = job_from_input("convolve", input, flags);
            job.poly_b = poly2.clone();
            job.vars_b = vars2.clone();
            job.lattice_b = lattice2.clone();
            run_job(&job)
        }
        Command::Twist { input, c } => {
            let mut job = job_from_input("twist", input, flags);
            job.c = Some(c.clone());
            run_job(&job)
        }
        Command::Check(input) => run_job(&job_from_input("check", input, flags)),
        Command::Batch { manifest } => run_batch(manifest, flags),
    };

    match outcome {
        Outcome::Ok(value) => {
            match cli.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&value).unwrap()),
                Format::Human => print_human(&value, 0),
            }
            std::process::exit(EXIT_OK);
        }
        Outcome::Fail { class, message } => {
            eprintln!("error: {message}");
            std::process::exit(class);
        }
    }
}

fn run_batch(manifest: &str, flags: (bool, Option<usize>)) -> Outcome {
    let text = match std::fs::read_to_string(manifest) {
        Ok(t) => t,
        Err(e) => {
            return Outcome::Fail {
                class: EXIT_USAGE,
                message: format!("cannot read manifest {manifest}: {e}"),
            }
        }
    };
    let jobs: Vec<JobSpec> = match serde_json::from_str(&text) {
        Ok(j) => j,
        Err(e) => {
            return Outcome::Fail {
                class: EXIT_USAGE,
                message: format!("malformed manifest: {e}"),
            }
        }
    };
    let mut results = Vec::new();
    for (index, job) in jobs.iter().enumerate() {
        let mut job = job.clone();
        if job.skip_nondegeneracy_check.is_none() {
            job.skip_nondegeneracy_check = Some(flags.0);
        }
        if job.window_cap.is_none() {
            job.window_cap = flags.1;
        }
        let record = match run_job(&job) {
            Outcome::Ok(output) => serde_json::json!({
                "index": index,
                "command": job.command,
                "exit_class": 0,
                "output": output,
            }),
            Outcome::Fail { class, message } => serde_json::json!({
                "index": index,
                "command": job.command,
                "exit_class": class,
                "error": message,
            }),
        };
        results.push(record);
    }
    Outcome::Ok(Value::Array(results))
}

fn print_human(value: &Value, indent: usize) {
    let pad = "  ".repeat(indent);
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                match v {
                    Value::Object(_) | Value::Array(_) => {
                        println!("{pad}{k}:");
                        print_human(v, indent + 1);
                    }
                    _ => println!("{pad}{k}: {}", scalar_str(v)),
                }
            }
        }
        Value::Array(items) => {
            // Spectrum-style arrays get one line per item.
            for item in items {
                match item {
                    Value::Object(map) if map.contains_key("beta") => {
                        println!(
                            "{pad}beta = {} (mult {})",
                            scalar_str(&map["beta"]),
                            scalar_str(&map["mult"])
                        );
                    }
                    Value::Array(_) | Value::Object(_) => print_human(item, indent),
                    _ => println!("{pad}{}", scalar_str(item)),
                }
            }
        }
        _ => println!("{pad}{}", scalar_str(value)),
    }
}

fn scalar_str(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
