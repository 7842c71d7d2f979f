use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use antisym::eigen::DEFAULT_REALITY_TOL;
use antisym::format::sig_digits;
use antisym::report::{spectrum_summary, AnalysisOptions, AnalysisReport, Meta};
use antisym::sweep::{sweep_with_tol, Figure, FigureTable, DEFAULT_EP_GRID};
use antisym::{figure_data, load_graph, resolve_model, Error, HamiltonianFamily, BUILTIN_MODELS};

#[derive(Parser)]
#[command(
    name = "antisym",
    version,
    about = "Antiunitary symmetry analysis of non-Hermitian lattice Hamiltonians"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List built-in models
    Models {
        #[arg(long)]
        verbose: bool,
    },
    /// Symmetry, point group, perturbation prediction and exceptional points
    Analyze {
        /// Built-in model name or path to a lattice file
        model: String,
        /// Range searched for exceptional points
        #[arg(
            long,
            value_name = "LO:HI",
            allow_hyphen_values = true,
            default_value = "0:2"
        )]
        ep_range: String,
        /// Grid size for the exceptional-point scan
        #[arg(long, default_value_t = DEFAULT_EP_GRID)]
        grid: usize,
        /// Also report the spectrum at this gamma (repeatable)
        #[arg(long, allow_hyphen_values = true)]
        gamma: Vec<f64>,
        /// Compare against another model and look for a site relabeling
        #[arg(long)]
        compare: Option<String>,
        #[command(flatten)]
        common: Common,
        /// Include tool version and a timestamp in the JSON output
        #[arg(long)]
        meta: bool,
    },
    /// Eigenvalues at one gamma
    Spectrum {
        model: String,
        #[arg(long, allow_hyphen_values = true)]
        gamma: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Spectra over a uniform gamma grid as CSV
    Sweep {
        model: String,
        #[arg(
            long,
            value_name = "LO:HI",
            allow_hyphen_values = true,
            default_value = "0:2"
        )]
        range: String,
        #[arg(long, default_value_t = 201)]
        steps: usize,
        #[arg(long, default_value_t = DEFAULT_REALITY_TOL)]
        tol: f64,
        #[arg(short = 'o', default_value = "-")]
        output: String,
    },
    /// Eigenvalue tables for the fig2 (ring4) and fig4 (chain4) plots
    Figure {
        fig: String,
        #[arg(short = 'o', default_value = "-")]
        output: String,
    },
}

#[derive(Args)]
struct Common {
    /// Relative tolerance for calling an eigenvalue real
    #[arg(long, default_value_t = DEFAULT_REALITY_TOL)]
    tol: f64,
    /// Machine-readable output
    #[arg(long)]
    json: bool,
    #[arg(short = 'o', default_value = "-")]
    output: String,
}

enum Failure {
    Usage(String),
    Solver(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Solver(_) => 3,
            Failure::Io(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Solver(m) | Failure::Io(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_solver_failure() {
            Failure::Solver(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

fn parse_range(text: &str) -> Result<(f64, f64), Failure> {
    let bad = || Failure::Usage(format!("invalid range '{text}', expected LO:HI"));
    let (lo, hi) = text.split_once(':').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(bad());
    }
    Ok((lo, hi))
}

/// Lattice file if the path exists, otherwise a built-in name.
fn resolve(model: &str) -> Result<HamiltonianFamily, Failure> {
    let path = Path::new(model);
    if path.is_file() {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read {model}: {e}")))?;
        let graph = load_graph(&text).map_err(|e| Failure::Usage(format!("{model}: {e}")))?;
        return Ok(HamiltonianFamily::new(graph));
    }
    Ok(resolve_model(model)?)
}

fn emit(output: &str, text: &str) -> Result<(), Failure> {
    if output == "-" {
        let mut stdout = std::io::stdout().lock();
        stdout
            .write_all(text.as_bytes())
            .and_then(|_| stdout.flush())
            .map_err(|e| Failure::Io(format!("cannot write to standard output: {e}")))
    } else {
        std::fs::write(output, text).map_err(|e| Failure::Io(format!("cannot write {output}: {e}")))
    }
}

fn models(verbose: bool) -> String {
    let mut out = String::new();
    for (name, description) in BUILTIN_MODELS {
        out.push_str(&format!("{name:<10} {description}\n"));
        if verbose {
            if let Ok(f) = resolve_model(name) {
                let edges: Vec<String> = f
                    .graph()
                    .edges()
                    .iter()
                    .map(|e| format!("{}-{}:{}", e.i, e.j, e.w))
                    .collect();
                out.push_str(&format!("           edges: {}\n", edges.join(" ")));
                out.push_str(&format!(
                    "           signature: {:?}\n",
                    f.graph().signature()
                ));
            }
        }
    }
    out
}

fn table_csv(table: &FigureTable) -> String {
    table.to_csv()
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Models { verbose } => emit("-", &models(verbose)),
        Command::Analyze {
            model,
            ep_range,
            grid,
            gamma,
            compare,
            common,
            meta,
        } => {
            let family = resolve(&model)?;
            let compare = match compare {
                Some(name) => Some((name.clone(), resolve(&name)?)),
                None => None,
            };
            let opts = AnalysisOptions {
                ep_range: Some(parse_range(&ep_range)?),
                ep_grid: grid,
                gammas: gamma,
                tol: common.tol,
                compare,
            };
            let mut report = AnalysisReport::build(&model, &family, &opts)?;
            if meta {
                report.meta = Some(Meta {
                    tool_version: env!("CARGO_PKG_VERSION").to_string(),
                    generated_unix: std::time::SystemTime::now()
                        .duration_since(std::time::UNIX_EPOCH)
                        .map(|d| d.as_secs())
                        .unwrap_or(0),
                });
            }
            let text = if common.json {
                report.to_json()
            } else {
                report.to_text()
            };
            emit(&common.output, &text)
        }
        Command::Spectrum {
            model,
            gamma,
            common,
        } => {
            let family = resolve(&model)?;
            let summary = spectrum_summary(&family, gamma, common.tol)?;
            let text = if common.json {
                let mut s = serde_json::to_string_pretty(&summary).expect("serializable");
                s.push('\n');
                s
            } else {
                let mut s = format!(
                    "gamma = {}: {:?}, {} real, {} conjugate pairs\n",
                    sig_digits(gamma, 10),
                    summary.phase,
                    summary.real_count,
                    summary.pair_count
                );
                for [re, im] in &summary.values {
                    s.push_str(&format!(
                        "{:>16} {:>16}i\n",
                        sig_digits(*re, 10),
                        sig_digits(*im, 10)
                    ));
                }
                s
            };
            emit(&common.output, &text)
        }
        Command::Sweep {
            model,
            range,
            steps,
            tol,
            output,
        } => {
            let family = resolve(&model)?;
            let (lo, hi) = parse_range(&range)?;
            let result = sweep_with_tol(&family, lo, hi, steps, tol)?;
            let rows = result
                .gammas
                .iter()
                .zip(&result.spectra)
                .map(|(&g, s)| {
                    let mut row = vec![g];
                    row.extend(s.values().iter().map(|z| z.re));
                    row.extend(s.values().iter().map(|z| z.im));
                    row
                })
                .collect();
            emit(
                &output,
                &table_csv(&FigureTable {
                    n: family.n(),
                    rows,
                }),
            )
        }
        Command::Figure { fig, output } => {
            let fig: Figure = fig.parse()?;
            emit(&output, &table_csv(&figure_data(fig)?))
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("ANTISYM_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("antisym: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}
