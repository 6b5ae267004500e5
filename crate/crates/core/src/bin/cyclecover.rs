//! Command-line front end.
//!
//! Exit codes: 0 success, 1 negative domain outcome (rejected cover, no cover
//! found), 2 usage or parameter error.

use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};

use cyclecover::experiment::{self, ExperimentConfig, FitModel, Sampler, Tts};
use cyclecover::graph::{self, GeneratorParams, Noise};
use cyclecover::solver::{self, AnnealParams, SampleSet};
use cyclecover::{is_cycle_cover, qubo, DirectedGraph, Error, QuboProblem};

#[derive(Parser)]
#[command(name = "cyclecover", version, about = "Vertex 3-cycle covers of directed graphs via QUBO")]
#[command(propagate_version = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate disjoint cycles plus random noise edges
    #[command(group(ArgGroup::new("noise").required(true).args(["p_noise", "n_noise"])))]
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long = "L")]
        cycle_len: usize,
        #[arg(long)]
        p_noise: Option<f64>,
        #[arg(long)]
        n_noise: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Encode an edge-list graph as a QUBO
    Encode {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value_t = qubo::DEFAULT_EPSILON)]
        epsilon: f64,
    },
    /// Sample a QUBO with simulated annealing
    Sample {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        shots: usize,
        #[arg(long, default_value_t = 1000)]
        sweeps: usize,
        #[arg(long, default_value_t = 0.1)]
        beta_min: f64,
        #[arg(long, default_value_t = 10.0)]
        beta_max: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Minimise a QUBO exhaustively (at most 30 variables)
    Exact {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check whether a subgraph is a vertex 3-cycle cover of a graph
    Check {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        solution: PathBuf,
    },
    /// Enumerate cycle covers by depth-first search
    Oracle {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        limit: usize,
        /// Write the first cover found as an edge list
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the repeated generate/encode/sample/check protocol
    #[command(group(ArgGroup::new("noise").required(true).args(["p_noise", "n_noise"])))]
    Experiment {
        /// Comma-separated values form a sweep; one CSV row per combination.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long = "L", value_delimiter = ',', required = true)]
        cycle_len: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        p_noise: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        n_noise: Option<Vec<usize>>,
        #[arg(long, value_enum, default_value_t = SamplerKind::Sa)]
        sampler: SamplerKind,
        #[arg(long, default_value_t = 100)]
        shots: usize,
        #[arg(long, default_value_t = 50)]
        reps: usize,
        #[arg(long, default_value_t = 1000)]
        sweeps: usize,
        #[arg(long, default_value_t = 0.1)]
        beta_min: f64,
        #[arg(long, default_value_t = 10.0)]
        beta_max: f64,
        #[arg(long, default_value_t = qubo::DEFAULT_EPSILON)]
        epsilon: f64,
        #[arg(long, default_value_t = 200.0)]
        t_anneal_us: f64,
        #[arg(long, default_value_t = 100.0)]
        t_pause_us: f64,
        #[arg(long, default_value_t = 0.99)]
        target: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Time to solution for a single-run success probability
    Tts {
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 200.0)]
        t_anneal_us: f64,
        #[arg(long, default_value_t = 100.0)]
        t_pause_us: f64,
        #[arg(long, default_value_t = 0.99)]
        target: f64,
    },
    /// Fit TTS against N_noise from a results CSV
    Fit {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        model: ModelKind,
        #[arg(long, default_value_t = 400)]
        min_noise: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SamplerKind {
    Exact,
    Sa,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelKind {
    Exp,
    Power,
}

enum Outcome {
    Ok,
    Negative,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Negative) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn open(path: &Path) -> Result<BufReader<File>, Error> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn read_graph(path: &Path) -> Result<DirectedGraph, Error> {
    graph::read_edge_list(open(path)?)
}

fn read_qubo(path: &Path) -> Result<QuboProblem, Error> {
    QuboProblem::read_text(open(path)?)
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), Error> {
    match output {
        Some(p) => std::fs::write(p, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn micros(us: f64) -> Result<Duration, Error> {
    Duration::try_from_secs_f64(us * 1e-6)
        .map_err(|_| Error::Domain(format!("invalid duration {us} us")))
}

fn format_duration(d: Duration) -> String {
    let us = d.as_secs_f64() * 1e6;
    if us < 1e3 {
        format!("{us:.2} µs")
    } else if us < 1e6 {
        format!("{:.2} ms", us / 1e3)
    } else {
        format!("{:.3} s", us / 1e6)
    }
}

fn run(cmd: Command) -> Result<Outcome, Error> {
    match cmd {
        Command::Gen {
            n,
            cycle_len,
            p_noise,
            n_noise,
            seed,
            output,
        } => {
            let noise = match (p_noise, n_noise) {
                (Some(p), None) => Noise::Fraction(p),
                (None, Some(k)) => Noise::Count(k),
                _ => unreachable!("clap enforces exactly one noise flag"),
            };
            let params = GeneratorParams {
                cycles: n,
                cycle_len,
                noise,
                seed,
            };
            let g = params.generate()?;
            std::fs::write(&output, graph::edge_list_string(&g))?;
            println!("{} {} {}", g.num_vertices(), g.num_edges(), params.noise_edges()?);
        }
        Command::Encode {
            input,
            output,
            epsilon,
        } => {
            let g = read_graph(&input)?;
            let q = qubo::encode(&g, epsilon)?;
            std::fs::write(&output, q.to_text())?;
            println!(
                "{} variables, {} quadratic terms",
                q.num_vars(),
                q.quadratic().len()
            );
        }
        Command::Sample {
            input,
            output,
            shots,
            sweeps,
            beta_min,
            beta_max,
            seed,
        } => {
            let q = read_qubo(&input)?;
            let params = AnnealParams {
                shots,
                sweeps,
                beta_min,
                beta_max,
                seed,
            };
            let s = solver::sample_sa(&q, &params)?;
            emit(output.as_deref(), &s.to_csv())?;
            if output.is_some() {
                if let Some(best) = s.lowest() {
                    println!(
                        "{} distinct states, lowest energy {} seen {} times",
                        s.records.len(),
                        best.energy,
                        best.count
                    );
                }
            }
        }
        Command::Exact { input, output } => {
            let q = read_qubo(&input)?;
            let sol = solver::solve_exact(&q)?;
            let set = SampleSet::from_shots(&q, sol.minimizers.iter().cloned());
            emit(output.as_deref(), &set.to_csv())?;
            if output.is_some() {
                println!(
                    "minimum energy {} with {} minimizer(s)",
                    sol.min_energy,
                    sol.minimizers.len()
                );
            }
        }
        Command::Check { input, solution } => {
            let g = read_graph(&input)?;
            let sub = read_graph(&solution)?;
            // Isolated vertices of g may be absent from the solution file.
            let sub = g.subgraph(sub.labeled_edges())?;
            let verdict = is_cycle_cover(&g, &sub)?;
            println!("{verdict}");
            if !verdict.is_accepted() {
                return Ok(Outcome::Negative);
            }
        }
        Command::Oracle {
            input,
            limit,
            output,
        } => {
            let g = read_graph(&input)?;
            let covers = solver::enumerate_covers(&g, limit.max(1));
            println!("{} cover(s) found (limit {limit})", covers.len());
            match covers.first() {
                Some(c) => {
                    if let Some(p) = output {
                        std::fs::write(p, graph::edge_list_string(c))?;
                    }
                }
                None => return Ok(Outcome::Negative),
            }
        }
        Command::Experiment {
            n,
            cycle_len,
            p_noise,
            n_noise,
            sampler,
            shots,
            reps,
            sweeps,
            beta_min,
            beta_max,
            epsilon,
            t_anneal_us,
            t_pause_us,
            target,
            seed,
            threads,
            output,
        } => {
            let noises: Vec<Noise> = match (p_noise, n_noise) {
                (Some(ps), None) => ps.into_iter().map(Noise::Fraction).collect(),
                (None, Some(ks)) => ks.into_iter().map(Noise::Count).collect(),
                _ => unreachable!("clap enforces exactly one noise flag"),
            };
            let sampler = match sampler {
                SamplerKind::Exact => Sampler::Exact,
                SamplerKind::Sa => Sampler::Anneal(AnnealParams {
                    shots,
                    sweeps,
                    beta_min,
                    beta_max,
                    seed: 0,
                }),
            };
            let mut csv = format!("{}\n", experiment::RESULTS_HEADER);
            for &cycles in &n {
                for &len in &cycle_len {
                    for &noise in &noises {
                        let config = ExperimentConfig {
                            shots,
                            repetitions: reps,
                            epsilon,
                            t_anneal: micros(t_anneal_us)?,
                            t_pause: micros(t_pause_us)?,
                            target_probability: target,
                            master_seed: seed,
                            ..ExperimentConfig::new(
                                GeneratorParams {
                                    cycles,
                                    cycle_len: len,
                                    noise,
                                    seed: 0,
                                },
                                sampler,
                            )
                        };
                        let r = experiment::run_experiment(&config, threads)?;
                        csv.push_str(&r.csv_row());
                        csv.push('\n');
                        let mut line = format!(
                            "n={cycles} L={len} N_V={} N_noise={}: P_sol = {:.4} ± {:.4}",
                            r.meta.num_vertices, r.meta.n_noise, r.p_sol_mean, r.p_sol_sem
                        );
                        if !r.sem_defined {
                            line.push_str(" (single repetition, SEM undefined)");
                        }
                        match r.tts {
                            Tts::Unreachable => line.push_str(", TTS undefined"),
                            t => line.push_str(&format!(
                                ", TTS {}",
                                format_duration(t.duration().unwrap())
                            )),
                        }
                        if output.is_some() {
                            println!("{line}");
                        } else {
                            eprintln!("{line}");
                        }
                    }
                }
            }
            emit(output.as_deref(), &csv)?;
        }
        Command::Tts {
            p,
            t_anneal_us,
            t_pause_us,
            target,
        } => match experiment::tts(p, micros(t_anneal_us)?, micros(t_pause_us)?, target)? {
            Tts::Finite(d) => println!("{}", format_duration(d)),
            Tts::SingleRun(d) => println!("{} (single run, p = 1)", format_duration(d)),
            Tts::Unreachable => {
                println!("undefined (p = 0)");
                return Ok(Outcome::Negative);
            }
        },
        Command::Fit {
            input,
            model,
            min_noise,
        } => {
            let points = read_tts_points(open(&input)?)?;
            let model = match model {
                ModelKind::Exp => FitModel::Exponential,
                ModelKind::Power => FitModel::PowerLaw,
            };
            let fit = experiment::fit_tts(&points, model, min_noise)?;
            println!("model,a,b,rms_residual");
            println!("{}", fit.csv_line());
        }
    }
    Ok(Outcome::Ok)
}

/// `(N_noise, TTS in ms)` pairs from a results CSV; rows with an empty `tts_ms`
/// are skipped and reported on stderr.
fn read_tts_points<R: BufRead>(reader: R) -> Result<Vec<(u64, f64)>, Error> {
    let mut lines = reader.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Parse { line: 1, msg: "empty results file".into() })?;
    let header = header?;
    let cols: Vec<&str> = header.trim().split(',').collect();
    let col = |name: &str| {
        cols.iter().position(|c| *c == name).ok_or_else(|| Error::Parse {
            line: 1,
            msg: format!("missing column `{name}`"),
        })
    };
    let (noise_col, tts_col) = (col("N_noise")?, col("tts_ms")?);
    let mut points = Vec::new();
    let mut skipped = 0usize;
    for (i, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.trim().split(',').collect();
        let bad = |msg: &str| Error::Parse { line: i + 1, msg: msg.into() };
        let noise: u64 = fields
            .get(noise_col)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("bad N_noise"))?;
        match fields.get(tts_col) {
            Some(s) if !s.is_empty() => {
                let ms: f64 = s.parse().map_err(|_| bad("bad tts_ms"))?;
                points.push((noise, ms));
            }
            _ => skipped += 1,
        }
    }
    if skipped > 0 {
        eprintln!("skipped {skipped} row(s) with undefined TTS");
    }
    Ok(points)
}
