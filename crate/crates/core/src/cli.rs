//! Command-line front end.
//!
//! Exit status: 0 when the checked statement holds (or the command simply
//! reports values), 1 when it does not hold, 2 on any input error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::approx::{
    flat_approximation, smin_eps_exact, smoothed_divergences, steep_approximation, ApproxIndices,
    ApproxState,
};
use crate::error::Error;
use crate::fmt::g17;
use crate::harness::{self, SamplerConfig};
use crate::lorenz::{approx_transition, exact_transition, lorenz_curve, TransitionVerdict};
use crate::measures::{
    marginals, measures, monotone_m, trace_distance, Dichotomy, Spectrum, DEFAULT_DIM_CAP,
};
use crate::spectral::spectrum_from_renyi;
use crate::transitions::{
    catalyst_bound, entropy_production_bound, iid_error_bound, iid_rate_bound, landauer_capped,
    marginal_budget, sufficiency_certificate, sufficient_condition,
};

/// Environment variable overriding the dimension cap for explicit tensor
/// constructions.
pub const DIM_CAP_VAR: &str = "SURPRISAL_DIM_CAP";

#[derive(Debug, Parser)]
#[command(name = "surprisal", version, about = "Relative entropy, relative variance and majorization of dichotomies")]
struct Cli {
    /// Layout of tabular output.
    #[arg(long, value_enum, default_value_t = Format::Kv, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Kv,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Relative entropy, relative variance and related quantities.
    Measures { file: PathBuf },
    /// Lorenz curve breakpoints as `x,y` text.
    Lorenz {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decides `from -> to`, exactly or up to trace distance `--eps`.
    Check {
        from: PathBuf,
        to: PathBuf,
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Flat or steep approximation within trace distance `--eps`.
    Approx {
        file: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long)]
        eps: f64,
    },
    /// Smoothed max/min relative entropies and their variance bounds.
    Smooth {
        file: PathBuf,
        #[arg(long)]
        eps: f64,
        /// Also run the exact subset search for the smoothed min entropy.
        #[arg(long)]
        exact: bool,
    },
    /// Evaluates the variance-based sufficient condition for `from -> to`.
    Suffice {
        from: PathBuf,
        to: PathBuf,
        #[arg(long)]
        eps: f64,
    },
    /// Thermodynamic bounds.
    #[command(subcommand)]
    Bounds(Bounds),
    /// Second-order rate bound for i.i.d. copies.
    IidRate {
        from: PathBuf,
        to: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        eps: f64,
    },
    /// Recovers a spectrum from Rényi entropies of orders 2, 3, ...
    SpectrumFromRenyi {
        file: PathBuf,
        #[arg(long)]
        dim: usize,
    },
    /// Runs the seeded property suites.
    Proptest(ProptestArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Flat,
    Steep,
}

#[derive(Debug, Subcommand)]
enum Bounds {
    /// Battery size needed to erase a state.
    Landauer {
        file: PathBuf,
        #[arg(long, default_value_t = 12)]
        n_max: usize,
    },
    /// Correction term for catalytic transitions.
    Catalyst {
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        dim_s: usize,
        #[arg(long)]
        dim_e: usize,
        /// Value of the monotone for the initial system state.
        #[arg(long, conflicts_with = "from", required_unless_present = "from")]
        m_from: Option<f64>,
        /// Dichotomy file from which the monotone is computed.
        #[arg(long)]
        from: Option<PathBuf>,
    },
    /// Entropy production versus its variance lower bound.
    Production { from: PathBuf, to: PathBuf },
    /// Marginal entropy production of a bipartite process. The joint file
    /// holds the final state in row-major order with a product reference.
    Marginal {
        from_s: PathBuf,
        from_e: PathBuf,
        joint: PathBuf,
    },
}

#[derive(Debug, Args)]
struct ProptestArgs {
    /// Run a single suite instead of all of them.
    #[arg(long)]
    suite: Option<String>,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Run the deliberately weakened inequalities.
    #[arg(long)]
    weakened: bool,
    /// Append wall-clock runtime to each report line.
    #[arg(long)]
    timing: bool,
}

/// A failure that maps to exit status 2.
#[derive(Debug)]
struct InputError(String);

impl InputError {
    fn flag(name: &str, e: Error) -> Self {
        InputError(format!("--{name}: {e}"))
    }
}

type CliResult<T> = std::result::Result<T, InputError>;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DichotomyFile {
    p: Vec<f64>,
    #[serde(default)]
    s: Option<Vec<f64>>,
}

/// Line of the first occurrence of the key `"name"`, or 1.
fn field_line(text: &str, name: &str) -> usize {
    let key = format!("\"{name}\"");
    text.find(&key)
        .map(|at| text[..at].matches('\n').count() + 1)
        .unwrap_or(1)
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn load_dichotomy(path: &Path) -> CliResult<Dichotomy> {
    let text = read(path)?;
    let file: DichotomyFile = serde_json::from_str(&text).map_err(|e| {
        InputError(format!("{}:{}:{}: {e}", path.display(), e.line(), e.column()))
    })?;
    let located = |field: &str, e: Error| {
        InputError(format!(
            "{}:{}: field \"{field}\": {e}",
            path.display(),
            field_line(&text, field)
        ))
    };
    let p = Spectrum::new(file.p).map_err(|e| located("p", e))?;
    match file.s {
        None => Dichotomy::unital(p).map_err(|e| located("p", e)),
        Some(s) => {
            let s = Spectrum::new(s).map_err(|e| located("s", e))?;
            Dichotomy::new(p, s).map_err(|e| located("s", e))
        }
    }
}

fn load_renyi(path: &Path) -> CliResult<Vec<f64>> {
    let text = read(path)?;
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let v: f64 = line.parse().map_err(|e| {
            InputError(format!(
                "{}:{}: field \"renyi[{}]\": {e}",
                path.display(),
                i + 1,
                values.len()
            ))
        })?;
        values.push(v);
    }
    Ok(values)
}

fn dim_cap() -> CliResult<usize> {
    match std::env::var(DIM_CAP_VAR) {
        Err(_) => Ok(DEFAULT_DIM_CAP),
        Ok(raw) => raw
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&c| c > 0)
            .ok_or_else(|| InputError(format!("{DIM_CAP_VAR}: not a positive integer: {raw:?}"))),
    }
}

struct Emitter<'a> {
    out: &'a mut dyn Write,
    format: Format,
}

impl Emitter<'_> {
    fn kv(&mut self, key: &str, value: impl std::fmt::Display) -> std::io::Result<()> {
        writeln!(self.out, "{key}: {value}")
    }

    fn num(&mut self, key: &str, x: f64) -> std::io::Result<()> {
        self.kv(key, g17(x))
    }

    fn vector(&mut self, key: &str, values: &[f64]) -> std::io::Result<()> {
        match self.format {
            Format::Kv => {
                let joined: Vec<String> = values.iter().map(|&x| g17(x)).collect();
                self.kv(key, joined.join(","))
            }
            Format::Csv => {
                writeln!(self.out, "index,{key}")?;
                for (i, &x) in values.iter().enumerate() {
                    writeln!(self.out, "{i},{}", g17(x))?;
                }
                Ok(())
            }
        }
    }

    fn verdict(&mut self, v: &TransitionVerdict) -> std::io::Result<()> {
        self.kv("feasible", v.decision)?;
        self.num("worst_gap", v.worst_gap)?;
        self.num("witness_x", v.witness_x)
    }
}

/// Parses `argv` (including the program name), runs the command and returns
/// the exit status.
pub fn dispatch<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    2
                }
            };
        }
    };
    let mut emit = Emitter {
        out,
        format: cli.format,
    };
    match run(cli.command, &mut emit) {
        Ok(Ok(holds)) => {
            if holds {
                0
            } else {
                1
            }
        }
        Ok(Err(e)) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
        Err(InputError(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

fn run(command: Command, emit: &mut Emitter) -> CliResult<std::io::Result<bool>> {
    match command {
        Command::Measures { file } => {
            let d = load_dichotomy(&file)?;
            Ok(emit_measures(&d, emit).map(|_| true))
        }
        Command::Lorenz { file, out } => {
            let curve = lorenz_curve(&load_dichotomy(&file)?);
            let csv = curve.to_csv();
            Ok(match out {
                Some(path) => std::fs::write(&path, csv)
                    .map_err(|e| InputError(format!("{}: {e}", path.display())))
                    .map(|_| {
                        emit.kv("points", curve.breakpoints().len())
                            .and_then(|_| emit.kv("written", path.display()))
                            .map(|_| true)
                    })?,
                None => emit.out.write_all(csv.as_bytes()).map(|_| true),
            })
        }
        Command::Check { from, to, eps } => {
            let (a, b) = (load_dichotomy(&from)?, load_dichotomy(&to)?);
            let verdict = match eps {
                None => exact_transition(&a, &b),
                Some(e) => approx_transition(&a, &b, e).map_err(|e| InputError::flag("eps", e))?,
            };
            Ok(emit.verdict(&verdict).map(|_| verdict.decision))
        }
        Command::Approx { file, mode, eps } => {
            let d = load_dichotomy(&file)?;
            let state = match mode {
                Mode::Flat => flat_approximation(&d, eps),
                Mode::Steep => steep_approximation(&d, eps),
            }
            .map_err(|e| InputError::flag("eps", e))?;
            Ok(emit_approx(&d, &state, emit).map(|_| true))
        }
        Command::Smooth { file, eps, exact } => {
            let d = load_dichotomy(&file)?;
            let exact_value = if exact {
                Some(smin_eps_exact(&d, eps).map_err(|e| InputError::flag("eps", e))?)
            } else {
                None
            };
            let b = smoothed_divergences(&d, eps).map_err(|e| InputError::flag("eps", e))?;
            Ok((|| {
                emit.num("relative_entropy", measures(&d).relative_entropy)?;
                emit.num("smax_eps", b.smax_eps)?;
                emit.num("smin_eps_lower", b.smin_eps_lower)?;
                if let Some(x) = exact_value {
                    emit.num("smin_eps_exact", x)?;
                }
                emit.num("f_sigma", b.f_sigma)?;
                Ok(true)
            })())
        }
        Command::Suffice { from, to, eps } => {
            let (a, b) = (load_dichotomy(&from)?, load_dichotomy(&to)?);
            let v = sufficient_condition(&a, &b, eps).map_err(|e| InputError::flag("eps", e))?;
            let cert = sufficiency_certificate(&a, &b, eps).map_err(|e| InputError::flag("eps", e))?;
            Ok((|| {
                emit.kv("sufficient", v.sufficient)?;
                emit.num("lhs", v.lhs)?;
                emit.num("rhs", v.rhs)?;
                match v.certified_eps {
                    Some(x) => emit.num("certified_eps", x)?,
                    None => emit.kv("certified_eps", "none")?,
                }
                emit.kv("certificate_feasible", cert.decision)?;
                emit.num("certificate_gap", cert.worst_gap)?;
                Ok(v.sufficient)
            })())
        }
        Command::Bounds(b) => run_bounds(b, emit),
        Command::IidRate { from, to, n, eps } => {
            let (a, b) = (load_dichotomy(&from)?, load_dichotomy(&to)?);
            let r = iid_rate_bound(&a, &b, n, eps).map_err(|e| InputError(format!("{e}")))?;
            let error_bound = iid_error_bound(&a, &b, n).ok();
            Ok((|| {
                emit.kv("n", r.n)?;
                emit.num("eps_n", r.eps_n)?;
                emit.num("rate_lower", r.rate_lower)?;
                emit.num("resonance_gap", r.resonance_gap)?;
                emit.num("k", r.k)?;
                emit.num("k_prime", r.k_prime)?;
                if let Some(x) = error_bound {
                    emit.num("error_bound", x)?;
                }
                Ok(true)
            })())
        }
        Command::SpectrumFromRenyi { file, dim } => {
            let values = load_renyi(&file)?;
            let p = spectrum_from_renyi(&values, dim)
                .map_err(|e| InputError(format!("{}: {e}", file.display())))?;
            Ok(emit.vector("spectrum", p.values()).map(|_| true))
        }
        Command::Proptest(args) => run_proptest(args, emit),
    }
}

fn emit_measures(d: &Dichotomy, emit: &mut Emitter) -> std::io::Result<()> {
    let m = measures(d);
    emit.kv("dim", d.dim())?;
    emit.num("relative_entropy", m.relative_entropy)?;
    emit.num("relative_variance", m.variance)?;
    emit.num("second_moment", m.second_moment)?;
    emit.num("smin", m.smin)?;
    emit.num("smax", m.smax)?;
    emit.num(
        "monotone",
        monotone_m(d, d.s_min()).expect("reference eigenvalues lie in (0, 1]"),
    )
}

fn emit_approx(d: &Dichotomy, state: &ApproxState, emit: &mut Emitter) -> std::io::Result<()> {
    emit.num("eps", state.eps)?;
    match state.indices {
        ApproxIndices::Saturated => emit.kv("indices", "saturated")?,
        ApproxIndices::Flat { m, n } => {
            emit.kv("m", m)?;
            emit.kv("n", n)?;
        }
        ApproxIndices::Steep { r, tail_mass } => {
            emit.kv("r", r)?;
            emit.num("tail_mass", tail_mass)?;
        }
    }
    let dist = trace_distance(&state.spectrum, d.p()).expect("same dimension");
    emit.num("trace_distance", dist)?;
    emit.vector("spectrum", state.spectrum.values())
}

fn run_bounds(b: Bounds, emit: &mut Emitter) -> CliResult<std::io::Result<bool>> {
    match b {
        Bounds::Landauer { file, n_max } => {
            let d = load_dichotomy(&file)?;
            let cap = dim_cap()?;
            let r = landauer_capped(d.p(), n_max, cap).map_err(|e| InputError::flag("n-max", e))?;
            let holds = r.n_exact.is_some_and(|n| n as f64 >= r.n_bound - 1e-9);
            Ok((|| {
                match r.n_exact {
                    Some(n) => emit.kv("n_exact", n)?,
                    None => emit.kv("n_exact", "none")?,
                }
                emit.num("n_bound", r.n_bound)?;
                emit.kv("holds", holds)?;
                Ok(holds)
            })())
        }
        Bounds::Catalyst {
            delta,
            dim_s,
            dim_e,
            m_from,
            from,
        } => {
            let m = match (m_from, from) {
                (Some(m), _) => m,
                (None, Some(path)) => {
                    let d = load_dichotomy(&path)?;
                    monotone_m(&d, d.s_min()).expect("reference eigenvalues lie in (0, 1]")
                }
                (None, None) => unreachable!("clap requires one of the two"),
            };
            let bound = catalyst_bound(delta, dim_s, dim_e, m).map_err(|e| InputError(format!("{e}")))?;
            Ok(emit.num("bound", bound).map(|_| true))
        }
        Bounds::Production { from, to } => {
            let (a, b) = (load_dichotomy(&from)?, load_dichotomy(&to)?);
            let realized = measures(&a).relative_entropy - measures(&b).relative_entropy;
            let bound = entropy_production_bound(&a, &b);
            let majorizes = exact_transition(&a, &b).decision;
            let holds = realized >= bound;
            Ok((|| {
                emit.kv("majorizes", majorizes)?;
                emit.num("entropy_drop", realized)?;
                emit.num("bound", bound)?;
                emit.kv("holds", holds)?;
                Ok(holds)
            })())
        }
        Bounds::Marginal {
            from_s,
            from_e,
            joint,
        } => {
            let (a, b) = (load_dichotomy(&from_s)?, load_dichotomy(&from_e)?);
            let j = load_dichotomy(&joint)?;
            let dims = (a.dim(), b.dim());
            let located = |e: Error| InputError(format!("{}: {e}", joint.display()));
            let (ref_s, ref_e) = marginals(j.s(), dims).map_err(located)?;
            let product = ref_s.kron(&ref_e);
            let spread = trace_distance(&product, j.s()).map_err(located)?;
            if spread > 1e-9 {
                return Err(InputError(format!(
                    "{}:{}: field \"s\": reference is not a product state (distance {})",
                    joint.display(),
                    field_line(&read(&joint)?, "s"),
                    g17(spread)
                )));
            }
            let budget = marginal_budget(j.p(), dims, &a, &b, (&ref_s, &ref_e)).map_err(located)?;
            let holds = budget.holds();
            Ok((|| {
                emit.num("lhs", budget.lhs)?;
                emit.num("rhs", budget.rhs)?;
                emit.num("mutual_information", budget.mutual_information)?;
                emit.num("k", budget.k)?;
                emit.kv("holds", holds)?;
                Ok(holds)
            })())
        }
    }
}

fn run_proptest(args: ProptestArgs, emit: &mut Emitter) -> CliResult<std::io::Result<bool>> {
    let names: Vec<&str> = match &args.suite {
        Some(name) => vec![name.as_str()],
        None => harness::suite_names(),
    };
    let cfg = SamplerConfig::new(args.seed, args.trials);
    let mut reports = Vec::new();
    for name in names {
        let r = if args.weakened {
            harness::run_suite_weakened(name, &cfg)
        } else {
            harness::run_suite(name, &cfg)
        }
        .map_err(|e| InputError::flag("suite", e))?;
        reports.push(r);
    }
    let passed = reports.iter().all(|r| r.passed());
    Ok((|| {
        if emit.format == Format::Csv {
            writeln!(
                emit.out,
                "suite,weakened,trials,violations,worst_slack,first_offset,first_digest{}",
                if args.timing { ",runtime" } else { "" }
            )?;
            for r in &reports {
                let first = r.violations.first();
                write!(
                    emit.out,
                    "{},{},{},{},{},{},{}",
                    r.suite,
                    r.weakened,
                    r.trials,
                    r.violations.len(),
                    g17(r.worst_slack),
                    first.map(|v| v.offset.to_string()).unwrap_or_default(),
                    first.map(|v| format!("{:016x}", v.digest)).unwrap_or_default(),
                )?;
                if args.timing {
                    write!(emit.out, ",{:.3}", r.runtime_secs)?;
                }
                writeln!(emit.out)?;
            }
        } else {
            for r in &reports {
                writeln!(emit.out, "{}", r.render(args.timing))?;
            }
        }
        Ok(passed)
    })())
}
