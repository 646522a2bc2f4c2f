use std::collections::HashMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use logseries::csvio::{fit_rows, simulation_table, umvue_row, Table, ESTIMATE_HEADER};
use logseries::simulation::{run_study, true_mse_umvue, Estimator, StudyConfig};
use logseries::stirling::{LogStirlingTable, DEFAULT_ROW_CAP};
use logseries::umvue::{umvue_cdf, umvue_pmf};
use logseries::{fit, Error, LogSeries, Sample};

const EXIT_USAGE: u8 = 2;
const EXIT_CAPACITY: u8 = 3;

#[derive(Parser)]
#[command(
    name = "logseries",
    version,
    about = "Logarithmic series PMF/CDF estimation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a sample, one integer per line.
    Sample {
        /// Parameter, 0 < p < 1.
        #[arg(long)]
        p: f64,
        /// Number of draws.
        #[arg(long)]
        n: usize,
        /// Generator seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate f(x) and F(x) from a sample file.
    Estimate {
        /// File with one positive integer per line.
        #[arg(long)]
        input: PathBuf,
        /// Comma-separated subset of UMVUE,MLE,LSE,WLSE,PCE.
        #[arg(long, default_value = "UMVUE,MLE,LSE,WLSE,PCE")]
        methods: String,
        /// Comma-separated evaluation points.
        #[arg(long, default_value = "1")]
        x: String,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the Monte Carlo MSE study.
    Simulate(SimulateArgs),
}

#[derive(Args, Default)]
struct SimulateArgs {
    /// key=value file mirroring the flags below; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// True parameter [default: 0.6].
    #[arg(long)]
    p: Option<f64>,
    /// Evaluation point [default: 12].
    #[arg(long)]
    x: Option<u64>,
    /// Comma-separated sample sizes [default: 20,50,100,200,500].
    #[arg(long)]
    n: Option<String>,
    /// Replications per sample size [default: 1000].
    #[arg(long)]
    replications: Option<usize>,
    /// Base seed [default: 20190601].
    #[arg(long)]
    seed: Option<u64>,
    /// Tail mass tolerance for exact variances [default: 1e-10].
    #[arg(long)]
    eps: Option<f64>,
    /// Comma-separated methods [default: all five].
    #[arg(long)]
    methods: Option<String>,
    /// Worker threads, 0 = auto. Falls back to LOGSERIES_THREADS.
    #[arg(long)]
    threads: Option<usize>,
    /// Add exact UMVUE variance columns.
    #[arg(long)]
    true_variance: bool,
    /// Maximum rows of the Stirling table [default: 50000].
    #[arg(long)]
    stirling_cap: Option<usize>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A failure with its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Capacity { .. } => Failure {
                code: EXIT_CAPACITY,
                message: format!(
                    "{e}; raise --stirling-cap or loosen --eps to truncate the series earlier"
                ),
            },
            other => usage(other.to_string()),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Sample { p, n, seed, out } => cmd_sample(p, n, seed, out.as_deref()),
        Command::Estimate {
            input,
            methods,
            x,
            out,
        } => cmd_estimate(&input, &methods, &x, out.as_deref()),
        Command::Simulate(args) => cmd_simulate(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn emit(bytes: &[u8], out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, bytes)
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display()))),
        None => io::stdout()
            .lock()
            .write_all(bytes)
            .map_err(|e| usage(format!("cannot write to stdout: {e}"))),
    }
}

fn cmd_sample(p: f64, n: usize, seed: u64, out: Option<&Path>) -> Result<(), Failure> {
    let dist = LogSeries::new(p)?;
    if n == 0 {
        return Err(usage("--n must be >= 1"));
    }
    let mut text = String::with_capacity(n * 3);
    for v in dist.sample(n, seed) {
        text.push_str(&v.to_string());
        text.push('\n');
    }
    emit(text.as_bytes(), out)
}

fn parse_list<T: std::str::FromStr>(raw: &str, what: &str) -> Result<Vec<T>, Failure> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<T>()
                .map_err(|_| usage(format!("invalid {what} `{s}`")))
        })
        .collect()
}

fn parse_methods(raw: &str) -> Result<Vec<Estimator>, Failure> {
    let methods = raw
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<Estimator>().map_err(Failure::from))
        .collect::<Result<Vec<_>, _>>()?;
    if methods.is_empty() {
        return Err(usage("no methods given"));
    }
    Ok(methods)
}

fn read_sample(path: &Path) -> Result<Sample, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let values = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.trim().parse::<u64>().map_err(|_| {
                usage(format!(
                    "line {}: `{}` is not a positive integer",
                    i + 1,
                    l.trim()
                ))
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Sample::new(values)?)
}

fn cmd_estimate(input: &Path, methods: &str, xs: &str, out: Option<&Path>) -> Result<(), Failure> {
    let methods = parse_methods(methods)?;
    let xs: Vec<u64> = parse_list(xs, "evaluation point")?;
    if xs.is_empty() || xs.contains(&0) {
        return Err(usage("evaluation points must be integers >= 1"));
    }
    let sample = read_sample(input)?;
    let (n, t) = (sample.len(), sample.total());
    let table = LogStirlingTable::new();
    let mut csv = Table::new(ESTIMATE_HEADER);
    for method in methods {
        match method {
            Estimator::Umvue => {
                for &x in &xs {
                    let pmf = umvue_pmf(&sample, x, &table)?;
                    let cdf = umvue_cdf(&sample, x, &table)?;
                    csv.push(umvue_row(n, t, x, pmf, cdf));
                }
            }
            Estimator::Fit(m) => {
                let fitted = fit(m, &sample)?;
                for row in fit_rows(&fitted, n, t, &xs) {
                    csv.push(row);
                }
            }
        }
    }
    emit(&csv.to_bytes(), out)
}

fn read_config(path: &Path) -> Result<HashMap<String, String>, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut map = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("config line {}: expected key=value", i + 1)))?;
        let key = k.trim().replace('_', "-");
        const KNOWN: [&str; 11] = [
            "p",
            "x",
            "n",
            "replications",
            "seed",
            "eps",
            "methods",
            "threads",
            "true-variance",
            "stirling-cap",
            "out",
        ];
        if !KNOWN.contains(&key.as_str()) {
            return Err(usage(format!(
                "config line {}: unknown key `{}`",
                i + 1,
                k.trim()
            )));
        }
        map.insert(key, v.trim().to_owned());
    }
    Ok(map)
}

fn from_file<T: std::str::FromStr>(
    file: &HashMap<String, String>,
    key: &str,
) -> Result<Option<T>, Failure> {
    file.get(key)
        .map(|v| {
            v.parse::<T>()
                .map_err(|_| usage(format!("config key `{key}`: invalid value `{v}`")))
        })
        .transpose()
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), Failure> {
    let file = match &args.config {
        Some(path) => read_config(path)?,
        None => HashMap::new(),
    };
    let defaults = StudyConfig::default();

    let p = match args.p.or(from_file(&file, "p")?) {
        Some(p) => LogSeries::new(p)?,
        None => defaults.p_true,
    };
    let sample_sizes = match args.n.clone().or_else(|| file.get("n").cloned()) {
        Some(raw) => parse_list(&raw, "sample size")?,
        None => defaults.sample_sizes.clone(),
    };
    let methods = match args
        .methods
        .clone()
        .or_else(|| file.get("methods").cloned())
    {
        Some(raw) => parse_methods(&raw)?,
        None => defaults.methods.clone(),
    };
    let threads = match args.threads.or(from_file(&file, "threads")?) {
        Some(t) => t,
        None => match std::env::var("LOGSERIES_THREADS") {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| usage(format!("LOGSERIES_THREADS: invalid value `{v}`")))?,
            Err(_) => 0,
        },
    };
    let config = StudyConfig {
        p_true: p,
        x_eval: args.x.or(from_file(&file, "x")?).unwrap_or(defaults.x_eval),
        sample_sizes,
        replications: args
            .replications
            .or(from_file(&file, "replications")?)
            .unwrap_or(defaults.replications),
        seed: args
            .seed
            .or(from_file(&file, "seed")?)
            .unwrap_or(defaults.seed),
        eps: args
            .eps
            .or(from_file(&file, "eps")?)
            .unwrap_or(defaults.eps),
        methods,
        threads,
    };
    config.validate()?;
    let true_variance =
        args.true_variance || from_file::<bool>(&file, "true-variance")?.unwrap_or(false);
    let cap = args
        .stirling_cap
        .or(from_file(&file, "stirling-cap")?)
        .unwrap_or(DEFAULT_ROW_CAP);
    let out = args
        .out
        .clone()
        .or_else(|| file.get("out").map(PathBuf::from));

    let table = LogStirlingTable::with_cap(cap);
    let result = run_study(&config, &table)?;
    let exact = if true_variance {
        Some(true_mse_umvue(&config, &table)?)
    } else {
        None
    };
    let csv = simulation_table(&result, config.p_true.p(), config.x_eval, exact.as_deref());
    emit(&csv.to_bytes(), out.as_deref())
}
