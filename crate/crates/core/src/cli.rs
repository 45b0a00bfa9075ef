//! Command-line front end. Every subcommand writes CSV; diagnostics and role
//! legends go to stderr.
//!
//! Exit codes: 0 success, 2 I/O failure, 3 invalid graph data (including a
//! graph on which α = 1 is not well defined), 4 usage error.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::csv;
use crate::digraph::{parse_graph, serialize_graph, Digraph};
use crate::discrepancy::{
    self, brute_search, default_grid, limit_table, sweep, write_limit_csv, write_search,
    DiscrepancyError, SearchConfig,
};
use crate::gamma::{argmax_discrepancy, build_gamma_general, predict_c_mass, predict_discrepancy};
use crate::pagerank::{
    self, simulate_walk, solve_exact, solve_power, SolveError, DEFAULT_POWER_MAX_ITER,
    DEFAULT_POWER_TOL,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 2;
pub const EXIT_GRAPH: i32 = 3;
pub const EXIT_USAGE: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "pagerank-extremal",
    version,
    about = "PageRank across jumping parameters and extremal ladder graphs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Solver {
    Exact,
    Power,
    Walk,
    Auto,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the PageRank vector of a graph file as CSV.
    Pagerank {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        alpha: f64,
        #[arg(long, value_enum, default_value_t = Solver::Auto)]
        solver: Solver,
        #[arg(long, default_value_t = DEFAULT_POWER_TOL)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_POWER_MAX_ITER)]
        max_iter: usize,
        #[arg(long, default_value_t = 1_000_000)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write the ladder graph Γ(k, m) in the graph file format.
    Gamma {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        m: usize,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Discrepancy of every grid point against a reference jumping parameter.
    Sweep {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        alpha_ref: f64,
        /// Comma-separated values in [0, 1], or "default".
        #[arg(long, default_value = "default")]
        grid: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convergence table for Γ(k, m) at α = 1 versus α = 1 − 1/k.
    Limit {
        /// Comma-separated ladder lengths, each at least 2.
        #[arg(long, value_delimiter = ',', required = true)]
        k_list: Vec<usize>,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate the predicted limit f(m) and C-vertex mass m/(1+m²).
    Predict {
        #[arg(long, default_value_t = 10.0)]
        m_max: f64,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustive search over all digraphs on n vertices.
    Search {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "default")]
        grid: String,
        #[arg(long, default_value_t = 10)]
        top: usize,
        #[arg(long, default_value_t = 0)]
        refine_rounds: usize,
        /// Allow n = 5 (2^25 graphs, long-running).
        #[arg(long)]
        allow_large: bool,
    },
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn io(path: &Path, err: io::Error) -> Self {
        Self {
            code: EXIT_IO,
            message: format!("{}: {err}", path.display()),
        }
    }

    fn graph(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_GRAPH,
            message: message.into(),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(err: io::Error) -> Self {
        Self {
            code: EXIT_IO,
            message: err.to_string(),
        }
    }
}

impl From<SolveError> for CliError {
    fn from(err: SolveError) -> Self {
        match err {
            SolveError::AlphaOutOfRange(_) | SolveError::BadTolerance(_) | SolveError::NoSteps => {
                Self::usage(err.to_string())
            }
            _ => Self::graph(err.to_string()),
        }
    }
}

impl From<DiscrepancyError> for CliError {
    fn from(err: DiscrepancyError) -> Self {
        match err {
            DiscrepancyError::Solve(e) => e.into(),
            DiscrepancyError::Graph(_) => Self::graph(err.to_string()),
            _ => Self::usage(err.to_string()),
        }
    }
}

/// Parses `args` (program name first) and runs the command. Returns the exit
/// code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(stdout, "{text}")
            } else {
                write!(stderr, "{text}")
            };
            return code;
        }
    };
    match execute(cli.command, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message);
            e.code
        }
    }
}

fn check_alpha(alpha: f64) -> Result<(), CliError> {
    if (0.0..=1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(CliError::usage(format!("alpha {alpha} outside [0, 1]")))
    }
}

fn parse_grid(text: &str) -> Result<Vec<f64>, CliError> {
    if text.trim() == "default" {
        return Ok(default_grid());
    }
    let values = text
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::usage(format!("invalid grid value {s:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    for &a in &values {
        check_alpha(a)?;
    }
    Ok(values)
}

fn read_graph(path: &Path) -> Result<Digraph, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_graph(&text).map_err(|e| CliError::graph(format!("{}: {e}", path.display())))
}

/// Writes `body` into the file at `out`, or to stdout.
fn emit(
    out: Option<&Path>,
    stdout: &mut dyn Write,
    body: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> Result<(), CliError> {
    match out {
        Some(path) => {
            let file = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
            let mut w = io::BufWriter::new(file);
            body(&mut w).map_err(|e| CliError::io(path, e))?;
            w.flush().map_err(|e| CliError::io(path, e))
        }
        None => Ok(body(stdout)?),
    }
}

fn execute(cmd: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    match cmd {
        Command::Pagerank {
            graph,
            alpha,
            solver,
            tol,
            max_iter,
            steps,
            seed,
        } => {
            check_alpha(alpha)?;
            let g = read_graph(&graph)?;
            let pi = match solver {
                Solver::Exact | Solver::Auto => solve_exact(&g, alpha)?,
                Solver::Power if alpha == 1.0 => pagerank::solve_alpha1(&g)?,
                Solver::Power => {
                    let out = solve_power(&g, alpha, tol, max_iter)?;
                    if !out.converged {
                        writeln!(
                            stderr,
                            "warning: power iteration stopped after {} iterations (last l1 change {:e})",
                            out.iterations, out.last_delta
                        )?;
                    }
                    out.vector
                }
                Solver::Walk => simulate_walk(&g, alpha, steps, seed)?,
            };
            pi.write_csv(stdout)?;
        }
        Command::Gamma { k, m, out } => {
            if k == 0 || m == 0 {
                return Err(CliError::usage("k and m must both be at least 1"));
            }
            let (g, labels) =
                build_gamma_general(k, m).map_err(|e| CliError::usage(e.to_string()))?;
            let text = serialize_graph(&g);
            emit(out.as_deref(), stdout, |w| w.write_all(text.as_bytes()))?;
            for v in 0..g.n() {
                writeln!(stderr, "{v}\t{}", labels.role(v))?;
            }
        }
        Command::Sweep {
            graph,
            alpha_ref,
            grid,
            out,
        } => {
            check_alpha(alpha_ref)?;
            let grid = parse_grid(&grid)?;
            let g = read_graph(&graph)?;
            let result = sweep(&g, alpha_ref, &grid)?;
            emit(out.as_deref(), stdout, |w| result.write_csv(w))?;
        }
        Command::Limit { k_list, m, out } => {
            if let Some(k) = k_list.iter().find(|&&k| k < 2) {
                return Err(CliError::usage(format!(
                    "every k must be at least 2, got {k}"
                )));
            }
            if m == 0 {
                return Err(CliError::usage("m must be at least 1"));
            }
            let rows = limit_table(&k_list, m)?;
            emit(out.as_deref(), stdout, |w| write_limit_csv(w, &rows))?;
        }
        Command::Predict { m_max, step, out } => {
            if !m_max.is_finite() || m_max < 1.0 || !step.is_finite() || step <= 0.0 {
                return Err(CliError::usage("need m_max >= 1 and step > 0"));
            }
            let count = (m_max / step + 1e-9).floor() as usize;
            emit(out.as_deref(), stdout, |w| {
                csv::write_header(w, &["m", "f_m", "c_mass"])?;
                for i in 1..=count {
                    let m = i as f64 * step;
                    csv::write_row(
                        w,
                        &[m, predict_discrepancy(m), predict_c_mass(m)].map(csv::fmt_f64),
                    )?;
                }
                Ok(())
            })?;
            let int_max = m_max.floor() as usize;
            let mut best = (1, predict_discrepancy(1.0));
            writeln!(stderr, "# integer m: m,f_m,c_mass")?;
            for m in 1..=int_max {
                let f = predict_discrepancy(m as f64);
                if f > best.1 {
                    best = (m, f);
                }
                writeln!(
                    stderr,
                    "# {m},{},{}",
                    csv::fmt_f64(f),
                    csv::fmt_f64(predict_c_mass(m as f64))
                )?;
            }
            writeln!(
                stderr,
                "# integer maximizer: m = {}, f = {:.6}",
                best.0, best.1
            )?;
            let (x, f) = argmax_discrepancy(1e-3, m_max.max(10.0), 1e-10);
            writeln!(
                stderr,
                "# continuous maximizer: m = {x:.6}, f = {f:.6} (f^2 = {:.6})",
                f * f
            )?;
        }
        Command::Search {
            n,
            grid,
            top,
            refine_rounds,
            allow_large,
        } => {
            let limit = if allow_large {
                discrepancy::SEARCH_HARD_CAP
            } else {
                discrepancy::SEARCH_DEFAULT_CAP
            };
            if n == 0 || n > limit {
                return Err(CliError::usage(format!(
                    "n must be in 1..={limit}{}",
                    if allow_large {
                        ""
                    } else {
                        " (use --allow-large for 5)"
                    }
                )));
            }
            let config = SearchConfig {
                grid: parse_grid(&grid)?,
                top,
                refine_rounds,
                allow_large,
            };
            let records = brute_search(n, &config)?;
            write_search(stdout, &records)?;
        }
    }
    Ok(())
}
