//! `fockcap` — benchmark single-photon sources by their Fock-state
//! capability.
//!
//! One static binary with file-based subcommands; every report is
//! byte-deterministic for fixed inputs and seeds. Exit codes: 0 success,
//! 1 validation error, 2 numerical failure.

mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fockcap::{
    capability, capability_simplified, fit_attenuated_fock, heralded_source_model, io,
    loss_depth_sweep, merge_bruteforce, merge_convolution, negative_regions, radial_wigner,
    reconstruct_em, report, synthesize_quadratures, DataSet, Error, Result, SweepSource,
};

use config::Defaults;

const CONVENTIONS: &str = "Units and conventions: quadratures are scaled so the vacuum state has \
variance 1; Wigner values are reported as 2piW (so 2piW(0,0) = sum (-1)^m p_m, and the ideal \
single photon reaches -1); attenuation eta is the transmissivity of a binomial loss channel; \
root locations are reported in u = r^2. Distribution files are JSON \
{\"probs\": [p0, p1, ...], \"normalized\": true} or CSV with one probability per line. \
Config precedence: command-line flags > --config JSON > built-in defaults.";

#[derive(Parser)]
#[command(
    name = "fockcap",
    version,
    about = "Fock-state capability benchmarking for single-photon sources",
    after_help = CONVENTIONS
)]
struct Cli {
    /// JSON config file supplying defaults for omitted flags
    /// (keys: n_max, choices, seed, backend, etas, iterations,
    /// efficiency, renormalize, threads).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Worker thread count (also read from FOCKCAP_THREADS; default: all
    /// cores). Results are identical for any thread count.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Backend {
    /// Exhaustive tuple enumeration (exponential; the reference path).
    Oracle,
    /// Generating-function convolution (polynomial; the default).
    Fast,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Args)]
struct OutputArg {
    /// Write the primary report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Merge input statistics through a balanced multiport and report the
    /// bunched output (Q, success probability, normalized output).
    #[command(after_help = CONVENTIONS)]
    Bunch {
        /// Distribution files, one per input mode.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Backend: oracle (brute force) or fast (convolution).
        #[arg(long, value_enum)]
        backend: Option<Backend>,
        /// Accept and renormalize inputs that do not sum to one.
        #[arg(long)]
        renormalize: bool,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Emit a radial cut (r, 2piW) of a state's Wigner function as CSV,
    /// plus its negative-region structure as JSON.
    #[command(after_help = CONVENTIONS)]
    Wigner {
        /// Distribution file.
        input: PathBuf,
        /// Largest radius of the cut (default: past the outermost root).
        #[arg(long)]
        r_max: Option<f64>,
        /// Number of radial grid points.
        #[arg(long, default_value_t = 512)]
        points: usize,
        /// Write the negative-region JSON here ("-" for stdout).
        #[arg(long)]
        regions_out: Option<PathBuf>,
        #[arg(long)]
        renormalize: bool,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Full capability quantifier on a dataset: partition, merge, average
    /// over random choices, test each n up to n-max.
    #[command(after_help = CONVENTIONS)]
    Capability {
        /// Dataset directory or manifest JSON.
        #[arg(long, conflicts_with = "inputs")]
        dataset: Option<PathBuf>,
        /// Alternatively, the run files themselves.
        inputs: Vec<PathBuf>,
        /// Largest n to test (set higher to exceed the default ceiling).
        #[arg(long)]
        n_max: Option<usize>,
        /// Random partition choices averaged per n.
        #[arg(long)]
        choices: Option<usize>,
        /// Seed for the partition shuffles (required: reports must be
        /// reproducible).
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        renormalize: bool,
        /// table (human) or json (machine).
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Identical-copy capability of a single distribution (no
    /// partitioning, no averaging).
    #[command(after_help = CONVENTIONS)]
    CapabilitySimple {
        /// Distribution file.
        input: PathBuf,
        #[arg(long)]
        n_max: Option<usize>,
        #[arg(long)]
        renormalize: bool,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Capability as a function of attenuation eta (CSV staircase).
    #[command(after_help = CONVENTIONS)]
    SweepLoss {
        /// Single distribution file (identical-copy sweep).
        #[arg(long, conflicts_with = "dataset")]
        input: Option<PathBuf>,
        /// Dataset directory or manifest (full-quantifier sweep).
        #[arg(long)]
        dataset: Option<PathBuf>,
        #[arg(long)]
        n_max: Option<usize>,
        /// Attenuation grid as start:stop:step, e.g. 1.0:0.8:0.02.
        #[arg(long)]
        etas: Option<String>,
        /// Truncate multi-photon content before attenuating.
        #[arg(long)]
        truncated: bool,
        /// Choices per n (dataset mode).
        #[arg(long)]
        choices: Option<usize>,
        /// Seed (required in dataset mode).
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        renormalize: bool,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Fit an attenuated Fock state |n> to a distribution; reports eta and
    /// the least-squares residual.
    #[command(after_help = CONVENTIONS)]
    FitFock {
        /// Distribution file.
        input: PathBuf,
        /// Fock state to fit.
        #[arg(long)]
        n: usize,
        #[arg(long)]
        renormalize: bool,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Second-order autocorrelation g2(0) of a distribution.
    #[command(after_help = CONVENTIONS)]
    G2 {
        /// Distribution file.
        input: PathBuf,
        #[arg(long)]
        renormalize: bool,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Push a distribution through a loss channel of transmissivity eta.
    #[command(after_help = CONVENTIONS)]
    Attenuate {
        /// Distribution file.
        input: PathBuf,
        /// Transmissivity in [0, 1].
        #[arg(long)]
        eta: f64,
        #[arg(long)]
        renormalize: bool,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Maximum-likelihood reconstruction of photon statistics from
    /// phase-randomized quadrature samples (CSV, one per line; optional
    /// JSON header line {"efficiency": ...}).
    #[command(after_help = CONVENTIONS)]
    Reconstruct {
        /// Quadrature CSV file.
        input: PathBuf,
        /// Largest photon number in the reconstruction.
        #[arg(long)]
        cutoff: usize,
        /// EM iteration budget.
        #[arg(long)]
        iterations: Option<usize>,
        /// Assumed detection efficiency (overrides the file header;
        /// 1 = no loss correction).
        #[arg(long)]
        efficiency: Option<f64>,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Photon statistics of a heralded pair source (pump, escape
    /// efficiency, herald efficiency), as a distribution JSON or, with
    /// --samples, as synthetic quadrature CSV.
    #[command(after_help = CONVENTIONS)]
    SimulateSource {
        /// Squeezing parameter; the pair statistics fall off as
        /// tanh(pump)^(2m).
        #[arg(long)]
        pump: f64,
        /// Escape efficiency of the signal path.
        #[arg(long, default_value_t = 1.0)]
        escape: f64,
        /// Herald detector efficiency (non-number-resolving).
        #[arg(long, default_value_t = 1.0)]
        herald_eff: f64,
        /// Cutoff of the emitted distribution.
        #[arg(long, default_value_t = 10)]
        cutoff: usize,
        /// Emit this many synthetic quadrature samples instead of the
        /// distribution itself.
        #[arg(long)]
        samples: Option<usize>,
        /// Detection efficiency used when sampling quadratures.
        #[arg(long)]
        eta_det: Option<f64>,
        /// Seed for quadrature sampling (required with --samples).
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        output: OutputArg,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let defaults = match &cli.config {
        Some(path) => Defaults::load(path)?,
        None => Defaults::default(),
    };
    let threads = cli
        .threads
        .or(defaults.threads)
        .or_else(|| {
            std::env::var("FOCKCAP_THREADS")
                .ok()
                .and_then(|v| v.parse().ok())
        });
    if let Some(n) = threads {
        // A second build in the same process is fine to ignore.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }

    match cli.command {
        Command::Bunch {
            inputs,
            backend,
            renormalize,
            output,
        } => {
            let renormalize = renormalize || defaults.renormalize.unwrap_or(false);
            let dists = inputs
                .iter()
                .map(|p| io::read_distribution(p, renormalize))
                .collect::<Result<Vec<_>>>()?;
            let backend = backend.or(defaults.backend()).unwrap_or(Backend::Fast);
            let result = match backend {
                Backend::Oracle => merge_bruteforce(&dists)?,
                Backend::Fast => merge_convolution(&dists)?,
            };
            if result.precision_warning() {
                eprintln!(
                    "warning: relative error estimate {:e} exceeds 1e-8",
                    result.relative_error_estimate()
                );
            }
            emit(&output, &report::bunching_json(&result))
        }
        Command::Wigner {
            input,
            r_max,
            points,
            regions_out,
            renormalize,
            output,
        } => {
            let renormalize = renormalize || defaults.renormalize.unwrap_or(false);
            let d = io::read_distribution(&input, renormalize)?;
            let w = radial_wigner(&d)?;
            if points < 2 {
                return Err(Error::InvalidParameter("need at least 2 grid points".into()));
            }
            let r_max = r_max.unwrap_or_else(|| (4.0 * w.degree() as f64 + 20.0).sqrt());
            let cut: Vec<(f64, f64)> = (0..points)
                .map(|i| {
                    let r = r_max * i as f64 / (points - 1) as f64;
                    (r, w.two_pi_w(r))
                })
                .collect();
            emit(&output, &report::wigner_csv(&cut))?;
            if let Some(path) = regions_out {
                let regions = negative_regions(&w)?;
                let text = report::regions_json(&regions);
                if path.as_os_str() == "-" {
                    println!("{text}");
                } else {
                    io::write_text(&path, &text)?;
                }
            }
            Ok(())
        }
        Command::Capability {
            dataset,
            inputs,
            n_max,
            choices,
            seed,
            renormalize,
            format,
            output,
        } => {
            let renormalize = renormalize || defaults.renormalize.unwrap_or(false);
            let ds = match (&dataset, inputs.is_empty()) {
                (Some(path), _) => io::load_dataset(path, renormalize)?,
                (None, false) => {
                    let runs = inputs
                        .iter()
                        .map(|p| io::read_distribution(p, renormalize))
                        .collect::<Result<Vec<_>>>()?;
                    DataSet::new(runs, "file-list")?
                }
                (None, true) => {
                    return Err(Error::InvalidParameter(
                        "provide --dataset or run files".into(),
                    ))
                }
            };
            let seed = seed.or(defaults.seed).ok_or_else(|| {
                Error::InvalidParameter("--seed is required for dataset mode".into())
            })?;
            let n_max = n_max.or(defaults.n_max).unwrap_or(14);
            let choices = choices.or(defaults.choices).unwrap_or(30);
            let rep = capability(&ds, n_max, choices, seed)?;
            emit_capability(&rep, format, &output)
        }
        Command::CapabilitySimple {
            input,
            n_max,
            renormalize,
            format,
            output,
        } => {
            let renormalize = renormalize || defaults.renormalize.unwrap_or(false);
            let d = io::read_distribution(&input, renormalize)?;
            let n_max = n_max.or(defaults.n_max).unwrap_or(14);
            let rep = capability_simplified(&d, n_max)?;
            emit_capability(&rep, format, &output)
        }
        Command::SweepLoss {
            input,
            dataset,
            n_max,
            etas,
            truncated,
            choices,
            seed,
            renormalize,
            output,
        } => {
            let renormalize = renormalize || defaults.renormalize.unwrap_or(false);
            let n_max = n_max.or(defaults.n_max).unwrap_or(14);
            let etas = etas
                .or(defaults.etas.clone())
                .unwrap_or_else(|| "1.0:0.8:0.02".to_string());
            let grid = parse_eta_grid(&etas)?;
            let table = match (&input, &dataset) {
                (Some(path), None) => {
                    let d = io::read_distribution(path, renormalize)?;
                    loss_depth_sweep(SweepSource::Single(&d), n_max, &grid, truncated)?
                }
                (None, Some(path)) => {
                    let ds = io::load_dataset(path, renormalize)?;
                    let seed = seed.or(defaults.seed).ok_or_else(|| {
                        Error::InvalidParameter("--seed is required for dataset mode".into())
                    })?;
                    let choices = choices.or(defaults.choices).unwrap_or(1);
                    loss_depth_sweep(
                        SweepSource::Dataset {
                            ds: &ds,
                            choices,
                            seed,
                        },
                        n_max,
                        &grid,
                        truncated,
                    )?
                }
                _ => {
                    return Err(Error::InvalidParameter(
                        "provide exactly one of --input or --dataset".into(),
                    ))
                }
            };
            emit(&output, &report::sweep_csv(&table))
        }
        Command::FitFock {
            input,
            n,
            renormalize,
            output,
        } => {
            let renormalize = renormalize || defaults.renormalize.unwrap_or(false);
            let d = io::read_distribution(&input, renormalize)?;
            let fit = fit_attenuated_fock(&d, n)?;
            emit(&output, &report::fit_json(&fit, n))
        }
        Command::G2 {
            input,
            renormalize,
            output,
        } => {
            let renormalize = renormalize || defaults.renormalize.unwrap_or(false);
            let d = io::read_distribution(&input, renormalize)?;
            emit(&output, &report::g2_json(d.g2_zero()?))
        }
        Command::Attenuate {
            input,
            eta,
            renormalize,
            output,
        } => {
            let renormalize = renormalize || defaults.renormalize.unwrap_or(false);
            let d = io::read_distribution(&input, renormalize)?;
            emit(&output, &report::distribution_json(&d.apply_loss(eta)?))
        }
        Command::Reconstruct {
            input,
            cutoff,
            iterations,
            efficiency,
            output,
        } => {
            let efficiency = efficiency.or(defaults.efficiency);
            let qd = io::read_quadratures(&input, efficiency)?;
            let iterations = iterations.or(defaults.iterations).unwrap_or(500);
            let rec = reconstruct_em(&qd, cutoff, iterations)?;
            if rec.boundary_warning {
                eprintln!(
                    "warning: {:.3} of the reconstructed mass sits at the cutoff; \
                     the cutoff is probably too small",
                    rec.boundary_mass
                );
            }
            emit(&output, &report::distribution_json(&rec.distribution))
        }
        Command::SimulateSource {
            pump,
            escape,
            herald_eff,
            cutoff,
            samples,
            eta_det,
            seed,
            output,
        } => {
            let d = heralded_source_model(pump, escape, herald_eff, cutoff)?;
            match samples {
                None => emit(&output, &report::distribution_json(&d)),
                Some(count) => {
                    let seed = seed.or(defaults.seed).ok_or_else(|| {
                        Error::InvalidParameter("--seed is required with --samples".into())
                    })?;
                    let eta_det = eta_det.unwrap_or(1.0);
                    let qd = synthesize_quadratures(&d, count, eta_det, seed)?;
                    let mut text =
                        format!("{{\"efficiency\":{}}}\n", report::fmt_float(eta_det));
                    for &x in qd.samples() {
                        text.push_str(&report::fmt_float(x));
                        text.push('\n');
                    }
                    emit(&output, &text)
                }
            }
        }
    }
}

/// start:stop:step grid, inclusive of both ends; a bare float is a
/// single-point grid.
fn parse_eta_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = |msg: &str| Error::InvalidParameter(format!("eta grid {spec:?}: {msg}"));
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [single] => {
            let eta: f64 = single.trim().parse().map_err(|_| bad("not a number"))?;
            Ok(vec![eta])
        }
        [start, stop, step] => {
            let start: f64 = start.trim().parse().map_err(|_| bad("bad start"))?;
            let stop: f64 = stop.trim().parse().map_err(|_| bad("bad stop"))?;
            let step: f64 = step.trim().parse().map_err(|_| bad("bad step"))?;
            if step <= 0.0 {
                return Err(bad("step must be > 0"));
            }
            let span = (stop - start).abs();
            let count = (span / step).round() as usize;
            let direction = if stop >= start { 1.0 } else { -1.0 };
            let mut grid = Vec::with_capacity(count + 1);
            for i in 0..=count {
                grid.push(start + direction * step * i as f64);
            }
            Ok(grid)
        }
        _ => Err(bad("expected start:stop:step")),
    }
}

fn emit(output: &OutputArg, text: &str) -> Result<()> {
    let text = if text.ends_with('\n') {
        text.to_string()
    } else {
        format!("{text}\n")
    };
    match &output.out {
        Some(path) => io::write_text(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_capability(
    rep: &fockcap::CapabilityReport,
    format: Format,
    output: &OutputArg,
) -> Result<()> {
    let json = report::capability_json(rep);
    match format {
        Format::Json => emit(output, &json),
        Format::Table => {
            print!("{}", report::capability_table(rep));
            if let Some(path) = &output.out {
                io::write_text(path, &format!("{json}\n"))?;
            }
            Ok(())
        }
    }
}

impl Defaults {
    fn backend(&self) -> Option<Backend> {
        match self.backend_name.as_deref() {
            Some("oracle") => Some(Backend::Oracle),
            Some("fast") => Some(Backend::Fast),
            _ => None,
        }
    }
}
