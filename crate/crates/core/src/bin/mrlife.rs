use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mrlife::io::{self, RunConfig, RunMode, SimSpec};
use mrlife::mixture::elicit_hyperparameters;
use mrlife::numeric::Grid;
use mrlife::sampler::ew_prior_from_quantiles;
use mrlife::survival::DistSpec;
use mrlife::{Error, Result};

/// Mean residual life inference with gamma Dirichlet process mixtures.
#[derive(Parser)]
#[command(name = "mrlife", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Draw a dataset from a gamma mixture and write it as CSV.
    Simulate(SimulateArgs),
    /// Fit the configured model to every group.
    Fit(RunArgs),
    /// Fit both models to every group and tabulate D_k.
    Compare(RunArgs),
    /// Tabulate f, S, h and m of a parametric law.
    Catalog(CatalogArgs),
    /// Prior hyperparameters from a data center and range, or EW prior
    /// means from three quantiles.
    Elicit(ElicitArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Built-in setup: sim1 or sim2.
    #[arg(long, conflicts_with = "spec")]
    preset: Option<String>,
    /// JSON simulation spec.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Override the sample size.
    #[arg(long)]
    n: Option<usize>,
    /// Output CSV (stdout if omitted).
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration.
    #[arg(long, short)]
    config: PathBuf,
    /// Override the output directory.
    #[arg(long, short)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct CatalogArgs {
    /// gamma, weibull, lognormal, loglogistic, gompertz, exp_weibull or linear_mrl.
    #[arg(long)]
    family: String,
    /// Comma-separated parameters in the family's order.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    params: Vec<f64>,
    #[arg(long)]
    lo: Option<f64>,
    #[arg(long)]
    hi: Option<f64>,
    #[arg(long, default_value_t = 200)]
    n: usize,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ElicitArgs {
    #[arg(long, requires_all = ["range", "q_e", "q_v"])]
    center: Option<f64>,
    #[arg(long)]
    range: Option<f64>,
    #[arg(long)]
    q_e: Option<f64>,
    #[arg(long)]
    q_v: Option<f64>,
    /// Three probability levels for an EW prior.
    #[arg(long, value_delimiter = ',', requires = "values", conflicts_with = "center")]
    probs: Option<Vec<f64>>,
    /// The quantiles at those levels.
    #[arg(long, value_delimiter = ',')]
    values: Option<Vec<f64>>,
}

fn simulate(a: SimulateArgs) -> Result<()> {
    let mut spec = match (&a.preset, &a.spec) {
        (Some(p), None) => SimSpec::preset(p, a.seed.unwrap_or(1))?,
        (None, Some(path)) => serde_json::from_str(&std::fs::read_to_string(path)?)?,
        _ => return Err(Error::Config("give one of --preset or --spec".into())),
    };
    if let Some(s) = a.seed {
        spec.seed = s;
    }
    if let Some(n) = a.n {
        spec.n = n;
    }
    let d = io::simulate(&spec)?;
    match a.out {
        Some(p) => io::save_dataset(&p, [&d])?,
        None => io::write_dataset(std::io::stdout().lock(), [&d])?,
    }
    Ok(())
}

fn run(a: RunArgs, mode: RunMode) -> Result<()> {
    let mut cfg = RunConfig::from_file(&a.config)?;
    if let Some(o) = a.out {
        cfg.output_dir = o;
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    let rep = io::run(&cfg, mode)?;
    eprintln!("{}", io::STATUS_MAPPING);
    for (g, m, c) in &rep.comparisons {
        let ds: Vec<String> = c.curve.iter().map(|p| format!("D_{}={:.6}", p.k, p.d)).collect();
        println!("{g} {}: G={:.6} P={:.6} {}", m.as_str(), c.g, c.p, ds.join(" "));
    }
    println!("wrote {} in {:.1}s", rep.output_dir.display(), rep.seconds);
    Ok(())
}

fn catalog(a: CatalogArgs) -> Result<()> {
    let dist = DistSpec::from_parts(&a.family, &a.params)?;
    let lo = match a.lo {
        Some(v) => v,
        None => dist.quantile(1e-3)?,
    };
    let hi = match a.hi {
        Some(v) => v,
        None => dist.quantile(0.999)?,
    };
    let cat = io::catalog(&dist, &Grid::log_spaced(lo, hi, a.n)?)?;
    match a.out {
        Some(p) => io::write_catalog(std::fs::File::create(p)?, &cat)?,
        None => io::write_catalog(std::io::stdout().lock(), &cat)?,
    }
    eprintln!("shape {} (detected {})", cat.shape, cat.detected);
    if cat.undefined_mrl {
        eprintln!("mean residual life undefined: the law has no finite mean");
    }
    Ok(())
}

fn elicit(a: ElicitArgs) -> Result<()> {
    let out = if let (Some(c), Some(r), Some(qe), Some(qv)) = (a.center, a.range, a.q_e, a.q_v) {
        serde_json::to_string_pretty(&elicit_hyperparameters(c, r, qe, qv)?)?
    } else if let (Some(p), Some(q)) = (a.probs, a.values) {
        if p.len() != 3 || q.len() != 3 {
            return Err(Error::Config("--probs and --values take three numbers each".into()));
        }
        let s = ew_prior_from_quantiles([p[0], p[1], p[2]], [q[0], q[1], q[2]])?;
        serde_json::to_string_pretty(&s)?
    } else {
        return Err(Error::Config(
            "give --center/--range/--q-e/--q-v or --probs/--values".into(),
        ));
    };
    println!("{out}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let r = match cli.cmd {
        Cmd::Simulate(a) => simulate(a),
        Cmd::Fit(a) => run(a, RunMode::Fit),
        Cmd::Compare(a) => run(a, RunMode::Compare),
        Cmd::Catalog(a) => catalog(a),
        Cmd::Elicit(a) => elicit(a),
    };
    match r {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
