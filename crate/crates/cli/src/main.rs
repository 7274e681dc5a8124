//! `strichartz`: batch entry point for the experiments in `strichartz-core`.
//!
//! Reports go to stdout, or to `--out`, as JSON (with a top-level
//! `"schema": 1`) or CSV. Exit status is 0 when the experiment's verdict
//! passes, 2 when it fails and 1 on usage or parameter errors.
//! `STRICHARTZ_THREADS` sets the worker count (default 1).

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use strichartz_core::counterexamples::gaussian::GaussianExperiment;
use strichartz_core::counterexamples::wave::wave_necessity;
use strichartz_core::counterexamples::write_series_csv;
use strichartz_core::dyadic_summation::{extremal_family, optimal_split, verify_summation, DyadicBounds};
use strichartz_core::error::Error;
use strichartz_core::exponent_geometry::{
    beta, classify_pair, corollary_schrodinger, corollary_wave, recip, region_samples, theorem_hypotheses,
    write_region_csv, ExponentPoint, SigmaContext, WeakCaseParams,
};
use strichartz_core::extremizer_search::{coordinate_search, preset, write_trace_csv, PRESETS};
use strichartz_core::grid_fields::{make_test_function, GridField, LPPartition, SpatialGrid, TestFunction};
use strichartz_core::propagators::{
    besov_dispersive_check, dispersive_check, schrodinger_gaussian_limit, write_besov_dispersive_csv,
    write_dispersive_csv, PropagatorKind,
};
use strichartz_core::regression::logspace;

const SCHEMA: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "strichartz", version, about = "Numerical experiments for inhomogeneous Strichartz estimates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
struct OutputArgs {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Equation {
    Schrodinger,
    Wave,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify `(q, r)` against the σ-regions.
    Classify {
        #[arg(long)]
        sigma: f64,
        #[arg(long)]
        q: f64,
        #[arg(long)]
        r: f64,
    },
    /// Sample the `(1/r, 1/q)` square on an `n × n` grid.
    Region {
        #[arg(long)]
        sigma: f64,
        #[arg(long)]
        n: usize,
    },
    /// Check the hypotheses of the abstract weak-type estimate.
    CheckTheorem {
        #[arg(long)]
        sigma: f64,
        #[arg(long)]
        theta: f64,
        #[arg(long = "theta-tilde")]
        theta_tilde: f64,
        #[arg(long)]
        q: f64,
        #[arg(long)]
        qtilde: f64,
    },
    /// Weak-type region for the Schrödinger or wave equation.
    Corollary {
        equation: Equation,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        q: f64,
        #[arg(long)]
        r: f64,
        #[arg(long)]
        qtilde: f64,
        #[arg(long)]
        rtilde: f64,
    },
    /// Dispersive ratios up to `--tmax`.
    Dispersive {
        equation: Equation,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        tmax: f64,
    },
    /// Weak-norm decay of the Gaussian response and, at `r = 2d/(d-2)`,
    /// logarithmic growth of its time integral.
    GaussianCounterexample {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        r: f64,
        #[arg(long)]
        tmax: f64,
    },
    /// The radial wave construction concentrating on the light cone.
    WaveNecessary {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        r: f64,
    },
    /// Dyadic summation on the extremal family for two bound sequences.
    SummationDemo {
        #[arg(long)]
        eps1: f64,
        #[arg(long)]
        eps2: f64,
        #[arg(long)]
        q1: f64,
        #[arg(long)]
        q2: f64,
        #[arg(long, default_value_t = 1.0)]
        m1: f64,
        #[arg(long, default_value_t = 1.0)]
        m2: f64,
        /// Family indices run over `-span..=span`.
        #[arg(long, default_value_t = 24)]
        span: i32,
    },
    /// Coordinate search for large Duhamel ratios.
    Search {
        #[arg(long)]
        preset: String,
        #[arg(long, default_value_t = 8)]
        iters: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 16.0)]
        horizon: f64,
    },
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema: u32,
    command: &'a str,
    pass: bool,
    #[serde(flatten)]
    report: T,
}

type CsvWriter = Box<dyn FnOnce(&mut dyn Write) -> Result<(), Error>>;

/// A finished run: the verdict, the JSON body and a CSV writer.
struct Outcome {
    command: &'static str,
    pass: bool,
    json: serde_json::Value,
    csv: CsvWriter,
}

impl Outcome {
    fn new<T: Serialize>(
        command: &'static str,
        pass: bool,
        report: &T,
        csv: impl FnOnce(&mut dyn Write) -> Result<(), Error> + 'static,
    ) -> Result<Self, Error> {
        let json = serde_json::to_value(report)?;
        Ok(Self { command, pass, json, csv: Box::new(csv) })
    }
}

fn csv_rows<W: Write + ?Sized>(out: &mut W, header: &[&str], rows: &[Vec<String>]) -> Result<(), Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct Classified {
    sigma: f64,
    q: f64,
    r: f64,
    #[serde(flatten)]
    class: strichartz_core::exponent_geometry::RegionClass,
}

#[derive(Serialize)]
struct Theorem {
    sigma: f64,
    beta: f64,
    #[serde(flatten)]
    report: strichartz_core::exponent_geometry::HypothesisReport,
}

#[derive(Serialize)]
struct Dispersive {
    equation: &'static str,
    d: usize,
    grid_points_per_axis: usize,
    half_extent: f64,
    times: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    limit: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    plain: Option<strichartz_core::propagators::DispersiveReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    besov: Option<strichartz_core::propagators::BesovDispersiveReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rescaling_mismatch: Option<f64>,
}

#[derive(Serialize)]
struct SummationDemo {
    bounds: DyadicBounds,
    optimal_split_at_one: i64,
    #[serde(flatten)]
    report: strichartz_core::dyadic_summation::SummationReport,
}

#[derive(Serialize)]
struct Search {
    preset: String,
    horizon: f64,
    seed: u64,
    parameters: Vec<String>,
    #[serde(flatten)]
    result: strichartz_core::extremizer_search::SearchResult,
}

/// Largest grid the dispersive runs will allocate.
const MAX_GRID_POINTS: usize = 1 << 22;

fn sized_grid(d: usize, half: f64, spacing: f64) -> Result<SpatialGrid, Error> {
    if !(1..=3).contains(&d) {
        return Err(Error::Domain(format!("dimension must be 1, 2 or 3, got {d}")));
    }
    let n = ((2.0 * half / spacing).ceil() as usize).next_power_of_two().max(16);
    if n.checked_pow(d as u32).is_none_or(|v| v > MAX_GRID_POINTS) {
        return Err(Error::Domain(format!(
            "a {d}-dimensional grid of half-width {half} needs {n} points per axis; reduce --tmax"
        )));
    }
    SpatialGrid::new(d, n, half)
}

fn dispersive(equation: Equation, d: usize, tmax: f64) -> Result<Outcome, Error> {
    if !(tmax >= 2.0 && tmax.is_finite()) {
        return Err(Error::Domain(format!("--tmax must be at least 2, got {tmax}")));
    }
    match equation {
        Equation::Schrodinger => {
            // Gaussian data of width 5/2 spreads like t/w; the box keeps the
            // periodic images negligible up to tmax.
            let grid = sized_grid(d, 2.0 * tmax + 16.0, 0.5)?;
            let f = make_test_function(&TestFunction::gaussian(2.5), grid)?;
            let times = logspace(1.0, tmax, 8);
            let rep = dispersive_check(PropagatorKind::Schrodinger, &f, &times)?;
            let limit = schrodinger_gaussian_limit(d);
            // (4π|t|)^{-d/2} is the exact L¹ → L^∞ norm.
            let pass = rep.sup <= limit * (1.0 + 1e-9);
            let body = Dispersive {
                equation: "schrodinger",
                d,
                grid_points_per_axis: grid.points_per_axis(),
                half_extent: grid.half_extent(),
                times,
                limit: Some(limit),
                plain: Some(rep.clone()),
                besov: None,
                rescaling_mismatch: None,
            };
            Outcome::new("dispersive", pass, &body, move |w| write_dispersive_csv(&rep, w))
        }
        Equation::Wave => {
            let grid = sized_grid(d, tmax + 24.0, 0.375)?;
            let f = make_test_function(&TestFunction::AnnularBump { level: 0 }, grid)?;
            let part = LPPartition::new(-3, 3)?;
            let times = logspace(1.0, tmax, 4);
            let rep = besov_dispersive_check(&f, &times, &part)?;
            // Same data compressed by 2 at half the time: the per-level
            // ratios must shift by one level and otherwise agree.
            let g2 = grid.dilated(1);
            let s = 2f64.powi(d as i32);
            let f2 = GridField::new(g2, f.values().iter().map(|v| v * s).collect())?;
            let part2 = LPPartition::new(part.j_min() + 1, part.j_max() + 1)?;
            let half: Vec<f64> = times.iter().map(|t| t / 2.0).collect();
            let rep2 = besov_dispersive_check(&f2, &half, &part2)?;
            let mismatch = rep
                .rows
                .iter()
                .zip(&rep2.rows)
                .map(|(a, b)| if a.j + 1 == b.j { (a.ratio - b.ratio).abs() } else { f64::INFINITY })
                .fold(0.0, f64::max)
                / rep.sup;
            let pass = rep.sup.is_finite() && mismatch <= 1e-6;
            let body = Dispersive {
                equation: "wave",
                d,
                grid_points_per_axis: grid.points_per_axis(),
                half_extent: grid.half_extent(),
                times,
                limit: None,
                plain: None,
                besov: Some(rep.clone()),
                rescaling_mismatch: Some(mismatch),
            };
            Outcome::new("dispersive", pass, &body, move |w| write_besov_dispersive_csv(&rep, w))
        }
    }
}

fn execute(cmd: Command) -> Result<Outcome, Error> {
    match cmd {
        Command::Classify { sigma, q, r } => {
            let ctx = SigmaContext::abstract_decay(sigma)?;
            let class = classify_pair(ExponentPoint::from_exponents(q, r)?, ctx);
            let body = Classified { sigma, q, r, class };
            let row = vec![
                sigma.to_string(),
                q.to_string(),
                r.to_string(),
                class.sharp_admissible.to_string(),
                class.acceptable.to_string(),
                class.critical.to_string(),
                class.outside.to_string(),
            ];
            Outcome::new("classify", true, &body, move |w| {
                csv_rows(w, &["sigma", "q", "r", "sharp_admissible", "acceptable", "critical", "outside"], &[row])
            })
        }
        Command::Region { sigma, n } => {
            let samples = region_samples(sigma, n)?;
            #[derive(Serialize)]
            struct Region {
                sigma: f64,
                n: usize,
                samples: Vec<strichartz_core::exponent_geometry::RegionSample>,
            }
            let body = Region { sigma, n, samples: samples.clone() };
            Outcome::new("region", true, &body, move |w| write_region_csv(&samples, w))
        }
        Command::CheckTheorem { sigma, theta, theta_tilde, q, qtilde } => {
            let w = WeakCaseParams { theta, theta_tilde, inv_q: recip(q), inv_q_tilde: recip(qtilde) };
            let report = theorem_hypotheses(w, sigma)?;
            let body = Theorem { sigma, beta: beta(sigma, theta, theta_tilde, w.inv_q, w.inv_q_tilde), report };
            let row = vec![
                sigma.to_string(),
                theta.to_string(),
                theta_tilde.to_string(),
                q.to_string(),
                qtilde.to_string(),
                body.beta.to_string(),
                report.holds.to_string(),
            ];
            Outcome::new("check-theorem", report.holds, &body, move |w| {
                csv_rows(w, &["sigma", "theta", "theta_tilde", "q", "qtilde", "beta", "holds"], &[row])
            })
        }
        Command::Corollary { equation, d, q, r, qtilde, rtilde } => {
            let header = ["equation", "d", "q", "r", "qtilde", "rtilde", "holds"];
            let mut row = vec![
                String::new(),
                d.to_string(),
                q.to_string(),
                r.to_string(),
                qtilde.to_string(),
                rtilde.to_string(),
            ];
            match equation {
                Equation::Schrodinger => {
                    let c = corollary_schrodinger(d, q, r, qtilde, rtilde);
                    row[0] = "schrodinger".into();
                    row.push(c.holds.to_string());
                    Outcome::new("corollary", c.holds, &c, move |w| csv_rows(w, &header, &[row]))
                }
                Equation::Wave => {
                    let c = corollary_wave(d, q, r, qtilde, rtilde);
                    row[0] = "wave".into();
                    row.push(c.holds.to_string());
                    Outcome::new("corollary", c.holds, &c, move |w| csv_rows(w, &header, &[row]))
                }
            }
        }
        Command::Dispersive { equation, d, tmax } => dispersive(equation, d, tmax),
        Command::GaussianCounterexample { d, r, tmax } => {
            let rep = GaussianExperiment::new(d, r, 10.0, tmax, 9)?.run()?;
            let series = rep.decay.series.clone();
            Outcome::new("gaussian-counterexample", rep.pass, &rep, move |w| write_series_csv(&series, w))
        }
        Command::WaveNecessary { d, r } => {
            let rep = wave_necessity(d, r, &logspace(100.0, 1000.0, 6))?;
            let series = rep.growth.series.clone();
            Outcome::new("wave-necessary", rep.pass, &rep, move |w| write_series_csv(&series, w))
        }
        Command::SummationDemo { eps1, eps2, q1, q2, m1, m2, span } => {
            if !(1..=200).contains(&span) {
                return Err(Error::Domain(format!("--span must lie in 1..=200, got {span}")));
            }
            let bounds = DyadicBounds::new(m1, eps1, q1, m2, eps2, q2)?;
            let family = extremal_family(&bounds, span)?;
            let report = verify_summation(&family, &bounds)?;
            let pass = report.ratio.is_finite()
                && report.split_levels.iter().all(|s| s.level_set <= s.chebyshev_bound * (1.0 + 1e-12));
            let levels = report.split_levels.clone();
            let body = SummationDemo { bounds, optimal_split_at_one: optimal_split(&bounds, 1.0)?, report };
            Outcome::new("summation-demo", pass, &body, move |w| {
                let rows: Vec<Vec<String>> = levels
                    .iter()
                    .map(|s| {
                        vec![
                            format!("{:e}", s.lambda),
                            s.n.to_string(),
                            format!("{:e}", s.level_set),
                            format!("{:e}", s.chebyshev_bound),
                        ]
                    })
                    .collect();
                csv_rows(w, &["lambda", "n", "level_set", "chebyshev_bound"], &rows)
            })
        }
        Command::Search { preset: name, iters, seed, horizon } => {
            if !PRESETS.contains(&name.as_str()) {
                return Err(Error::Domain(format!("unknown preset {name:?}; known: {}", PRESETS.join(", "))));
            }
            let problem = preset(&name, horizon)?;
            let result = coordinate_search(&problem, iters, seed)?;
            let parameters: Vec<String> = problem.bounds.iter().map(|b| b.name.clone()).collect();
            let pass = result.trace.windows(2).all(|w| w[1].ratio >= w[0].ratio);
            let body = Search { preset: name, horizon, seed, parameters: parameters.clone(), result: result.clone() };
            Outcome::new("search", pass, &body, move |w| write_trace_csv(&result, &parameters, w))
        }
    }
}

fn emit(outcome: Outcome, output: &OutputArgs) -> Result<(), Error> {
    let mut sink: Box<dyn Write> = match &output.out {
        Some(path) => Box::new(io::BufWriter::new(File::create(path)?)),
        None => Box::new(io::stdout().lock()),
    };
    match output.format {
        Format::Json => {
            let env = Envelope { schema: SCHEMA, command: outcome.command, pass: outcome.pass, report: outcome.json };
            let text = serde_json::to_string_pretty(&env)?;
            writeln!(sink, "{text}")?;
        }
        Format::Csv => (outcome.csv)(&mut sink)?,
    }
    Ok(sink.flush()?)
}

fn threads() -> Result<usize, String> {
    match std::env::var("STRICHARTZ_THREADS") {
        Err(_) => Ok(1),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(format!("STRICHARTZ_THREADS must be a positive integer, got {v:?}")),
        },
    }
}

fn run(argv: impl IntoIterator<Item = std::ffi::OsString>) -> u8 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let n = match threads() {
        Ok(n) => n,
        Err(msg) => {
            eprintln!("error: {msg}");
            return 1;
        }
    };
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
        eprintln!("error: {e}");
        return 1;
    }
    let outcome = match execute(cli.command) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let pass = outcome.pass;
    if let Err(e) = emit(outcome, &cli.output) {
        eprintln!("error: {e}");
        return 1;
    }
    if pass {
        0
    } else {
        2
    }
}

fn main() -> ExitCode {
    ExitCode::from(run(std::env::args_os()))
}
