//! Fits, comparisons and the files they leave behind.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::json;

use super::config::{Model, RunConfig};
use crate::analytics::{
    atom_correlation, compare_replicates, dpmm_functional_draws, ew_functional_draws,
    gg_replicates_dpmm, gg_replicates_ew, mrl_difference, prob_greater_from_values, prob_mrl_greater, ComparisonResult,
    CurveSource, FunctionalBands, FunctionalGrid,
};
use crate::error::{Error, Result};
use crate::mixture::{Hyperparams, MixtureParams};
use crate::numeric::RngStream;
use crate::sampler::{fit_exp_weibull, prior_mixtures, run_chain, Dataset, EwDraws, EwPrior, PosteriorDraws};

/// `fit` runs the configured model; `compare` runs both models on every
/// group and adds the posterior predictive loss table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RunMode {
    Fit,
    Compare,
}

pub const STATUS_MAPPING: &str =
    "input status 1 = event observed (delta = 0); status 0 = right-censored (delta = 1)";

enum Prior {
    Dpmm(Hyperparams),
    Ew(EwPrior),
}

enum Fitted {
    Dpmm(PosteriorDraws),
    Ew(EwDraws),
}

struct Job<'a> {
    group: &'a Dataset,
    gi: usize,
    model: Model,
    prior: Prior,
}

struct Done {
    fit: Fitted,
    seconds: f64,
}

/// Sub-stream layout: four streams per group, two per model.
fn stream(gi: usize, model: Model, replicate: bool) -> u64 {
    let m = match model {
        Model::Dpmm => 0,
        Model::ExpWeibull => 1,
    };
    (4 * gi + 2 * usize::from(replicate) + m) as u64
}

fn run_job(job: &Job<'_>, cfg: &RunConfig) -> Result<Done> {
    let start = Instant::now();
    let fit = match &job.prior {
        Prior::Dpmm(h) => {
            let mut sc = cfg.sampler;
            sc.seed = cfg.seed;
            sc.stream = stream(job.gi, job.model, false);
            Fitted::Dpmm(run_chain(job.group, h, &sc)?)
        }
        Prior::Ew(p) => {
            let mut ec = cfg.ew_sampler;
            ec.seed = cfg.seed;
            ec.stream = stream(job.gi, job.model, false);
            Fitted::Ew(fit_exp_weibull(job.group, p, &ec)?)
        }
    };
    Ok(Done {
        fit,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// Folder-safe version of a group name.
/// Per-draw MRL values on the run grid.
type MrlRows = Vec<Vec<Option<f64>>>;

pub fn group_dir(name: &str) -> String {
    let s: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect();
    if s.is_empty() {
        "_".into()
    } else {
        s
    }
}

fn num(x: f64) -> String {
    x.to_string()
}

pub fn write_grid_csv(path: &Path, g: &FunctionalGrid) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["t", "median", "lower", "upper", "n_valid"])?;
    for (j, &t) in g.grid.points().iter().enumerate() {
        w.write_record([num(t), num(g.median[j]), num(g.lower[j]), num(g.upper[j]), g.valid[j].to_string()])?;
    }
    w.flush()?;
    Ok(())
}

fn write_bands(dir: &Path, b: &FunctionalBands) -> Result<()> {
    write_grid_csv(&dir.join("density.csv"), &b.density)?;
    write_grid_csv(&dir.join("survival.csv"), &b.survival)?;
    write_grid_csv(&dir.join("hazard.csv"), &b.hazard)?;
    write_grid_csv(&dir.join("mrl.csv"), &b.mrl)
}

fn write_dpmm_draws(path: &Path, post: &PosteriorDraws) -> Result<()> {
    let l = post.config.truncation;
    let mut w = csv::Writer::from_path(path)?;
    let mut head: Vec<String> = ["draw", "alpha", "mu_theta", "mu_phi", "sigma_11", "sigma_12", "sigma_22"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for prefix in ["w", "theta", "phi"] {
        head.extend((1..=l).map(|i| format!("{prefix}_{i}")));
    }
    w.write_record(&head)?;
    for (b, d) in post.draws.iter().enumerate() {
        let mut row = vec![
            b.to_string(),
            num(d.alpha),
            num(d.mu[0]),
            num(d.mu[1]),
            num(d.sigma.get(0, 0)),
            num(d.sigma.get(0, 1)),
            num(d.sigma.get(1, 1)),
        ];
        row.extend(d.weights.iter().map(|x| num(*x)));
        row.extend(d.atoms.iter().map(|a| num(a.theta)));
        row.extend(d.atoms.iter().map(|a| num(a.phi)));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn write_ew_draws(path: &Path, post: &EwDraws) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["draw", "alpha", "theta", "sigma"])?;
    for (b, d) in post.draws.iter().enumerate() {
        w.write_record([b.to_string(), num(d.alpha), num(d.theta), num(d.sigma)])?;
    }
    w.flush()?;
    Ok(())
}

fn write_column(path: &Path, name: &str, xs: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["draw", name])?;
    for (b, x) in xs.iter().enumerate() {
        w.write_record([b.to_string(), num(*x)])?;
    }
    w.flush()?;
    Ok(())
}

fn write_json(path: &Path, v: &impl Serialize) -> Result<()> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    fs::write(path, s)?;
    Ok(())
}

fn flagged(b: &FunctionalBands) -> serde_json::Value {
    json!({
        "density": b.density.n_flagged(),
        "survival": b.survival.n_flagged(),
        "hazard": b.hazard.n_flagged(),
        "mrl": b.mrl.n_flagged(),
    })
}

/// What a finished run reports back.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub output_dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub comparisons: Vec<(String, Model, ComparisonResult)>,
    pub seconds: f64,
}

/// Validates everything, fits every group (concurrently), then writes the
/// run directory. Only `timing.json` differs between repeated runs.
pub fn run(cfg: &RunConfig, mode: RunMode) -> Result<RunReport> {
    let start = Instant::now();
    cfg.validate()?;
    let sets = cfg.load_data()?;
    let grid = cfg.grid.build(sets.values())?;
    let models: Vec<Model> = match mode {
        RunMode::Fit => vec![cfg.model],
        RunMode::Compare => vec![Model::Dpmm, Model::ExpWeibull],
    };
    if cfg.two_group.is_some() && !models.contains(&Model::Dpmm) {
        return Err(Error::Config("two_group comparisons need the dpmm model".into()));
    }

    let mut jobs = Vec::new();
    for (gi, d) in sets.values().enumerate() {
        for &model in &models {
            let prior = match model {
                Model::Dpmm => Prior::Dpmm(cfg.dpmm_prior.resolve(d)?),
                Model::ExpWeibull => Prior::Ew(cfg.ew_prior.resolve(d)?),
            };
            jobs.push(Job {
                group: d,
                gi,
                model,
                prior,
            });
        }
    }

    let results: Vec<Result<Done>> = std::thread::scope(|s| {
        let handles: Vec<_> = jobs.iter().map(|j| s.spawn(|| run_job(j, cfg))).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sampler thread panicked"))
            .collect()
    });

    let out = &cfg.output_dir;
    fs::create_dir_all(out)?;
    let mut files = Vec::new();
    let mut group_summaries: BTreeMap<String, serde_json::Value> = BTreeMap::new();
    let mut timing = Vec::new();
    let mut comparisons = Vec::new();
    let mut mixtures: BTreeMap<String, (Vec<MixtureParams>, MrlRows)> = BTreeMap::new();

    for (job, res) in jobs.iter().zip(results) {
        let done = res?;
        let name = &job.group.group;
        let dir = out.join(group_dir(name)).join(job.model.as_str());
        fs::create_dir_all(&dir)?;
        let mut rng = RngStream::with_stream(cfg.seed, stream(job.gi, job.model, true));
        let (bands, rep, model_summary) = match (&done.fit, &job.prior) {
            (Fitted::Dpmm(post), Prior::Dpmm(h)) => {
                let mix = post.mixtures();
                let fd = dpmm_functional_draws(&mix, &grid, &cfg.mrl)?;
                let bands = fd.bands(cfg.band_level)?;
                write_dpmm_draws(&dir.join("draws.csv"), post)?;
                let corr = atom_correlation(&post.draws);
                write_column(&dir.join("correlation.csv"), "correlation", &corr)?;
                let positive = corr.iter().filter(|c| **c > 0.0).count() as f64 / corr.len() as f64;
                let rep = (mode == RunMode::Compare)
                    .then(|| gg_replicates_dpmm(&post.draws, job.group, &mut rng))
                    .transpose()?;
                let mean_alpha = post.draws.iter().map(|d| d.alpha).sum::<f64>() / post.draws.len() as f64;
                let summary = json!({
                    "hyperparameters": h,
                    "draws": post.draws.len(),
                    "atom_acceptance": post.acceptance.rate(),
                    "pilot_acceptance": post.pilot_acceptance.rate(),
                    "proposal_cov": post.proposal_cov,
                    "posterior_mean_alpha": mean_alpha,
                    "correlation_positive_share": positive,
                    "flagged_points": flagged(&bands),
                });
                mixtures.insert(name.clone(), (mix, fd.mrl));
                (bands, rep, summary)
            }
            (Fitted::Ew(post), Prior::Ew(p)) => {
                let fd = ew_functional_draws(&post.draws, &grid, cfg.mrl.survival_floor)?;
                let bands = fd.bands(cfg.band_level)?;
                write_ew_draws(&dir.join("draws.csv"), post)?;
                let rep = (mode == RunMode::Compare)
                    .then(|| gg_replicates_ew(&post.draws, job.group.len(), &mut rng))
                    .transpose()?;
                let summary = json!({
                    "prior": p,
                    "draws": post.draws.len(),
                    "acceptance": post.acceptance.rate(),
                    "proposal_sd": post.proposal_sd,
                    "warnings": post.warnings,
                    "flagged_points": flagged(&bands),
                });
                (bands, rep, summary)
            }
            _ => unreachable!("fit and prior kinds always match"),
        };
        write_bands(&dir, &bands)?;
        files.push(dir.clone());
        let mut model_summary = model_summary;
        if let Some(rep) = rep {
            let ks: Vec<f64> = cfg.k_grid.iter().map(|k| k.0).collect();
            let c = compare_replicates(&rep, job.group.times(), &ks)?;
            model_summary["gelfand_ghosh"] = json!({ "g": c.g, "p": c.p });
            comparisons.push((name.clone(), job.model, c));
        }
        let entry = group_summaries.entry(name.clone()).or_insert_with(|| {
            json!({
                "n": job.group.len(),
                "n_censored": job.group.n_censored(),
                "models": {},
            })
        });
        entry["models"][job.model.as_str()] = model_summary;
        timing.push(json!({ "group": name, "model": job.model.as_str(), "seconds": done.seconds }));
    }

    let mut two_group_summary = serde_json::Value::Null;
    if let Some(tg) = &cfg.two_group {
        let ((a, ma), (b, mb)) = (&mixtures[&tg.a], &mixtures[&tg.b]);
        if a.len() != b.len() {
            return Err(Error::Config("two-group chains must keep equal numbers of draws".into()));
        }
        let floor = cfg.mrl.survival_floor;
        let diff = mrl_difference(a, b, &tg.t_points, floor)?;
        let mut w = csv::Writer::from_path(out.join("difference.csv"))?;
        w.write_record(["t", "draw", "difference"])?;
        for (t, vals) in diff.t.iter().zip(&diff.values) {
            for (i, v) in vals.iter().enumerate() {
                w.write_record([num(*t), i.to_string(), num(*v)])?;
            }
        }
        w.flush()?;

        let post = prob_greater_from_values(ma, mb, &grid, CurveSource::Posterior)?;
        let hyper = |g: &str| cfg.dpmm_prior.resolve(&sets[g]);
        let (ha, hb) = (hyper(&tg.a)?, hyper(&tg.b)?);
        let prior_stream = |k: u64| RngStream::with_stream(cfg.seed, (4 * sets.len()) as u64 + k);
        let l = cfg.sampler.truncation;
        let pa = prior_mixtures(&ha, l, tg.prior_draws, &mut prior_stream(0))?;
        let pb = prior_mixtures(&hb, l, tg.prior_draws, &mut prior_stream(1))?;
        let prior = prob_mrl_greater(&pa, &pb, &grid, CurveSource::Prior, floor)?;
        let mut w = csv::Writer::from_path(out.join("prob_greater.csv"))?;
        w.write_record(["t", "posterior", "prior", "posterior_pairs", "prior_pairs"])?;
        for (j, t) in grid.points().iter().enumerate() {
            w.write_record([
                num(*t),
                num(post.prob[j]),
                num(prior.prob[j]),
                post.pairs[j].to_string(),
                prior.pairs[j].to_string(),
            ])?;
        }
        w.flush()?;
        files.push(out.join("difference.csv"));
        files.push(out.join("prob_greater.csv"));
        two_group_summary = json!({
            "a": tg.a,
            "b": tg.b,
            "t_points": diff.t,
            "missing_pairs": diff.missing,
            "prior_draws": tg.prior_draws,
        });
    }

    if !comparisons.is_empty() {
        let mut w = csv::Writer::from_path(out.join("dk.csv"))?;
        w.write_record(["group", "model", "k", "d", "g", "p"])?;
        for (g, m, c) in &comparisons {
            for pt in &c.curve {
                w.write_record([g.clone(), m.as_str().into(), pt.k.to_string(), num(pt.d), num(c.g), num(c.p)])?;
            }
        }
        w.flush()?;
        files.push(out.join("dk.csv"));
    }

    let summary = json!({
        "mode": mode,
        "seed": cfg.seed,
        "status_mapping": STATUS_MAPPING,
        "grid": { "lo": grid.points()[0], "hi": grid.points()[grid.len() - 1], "n": grid.len() },
        "band_level": cfg.band_level,
        "groups": group_summaries,
        "two_group": two_group_summary,
        "config": cfg,
    });
    write_json(&out.join("config.json"), cfg)?;
    write_json(&out.join("summary.json"), &summary)?;
    let seconds = start.elapsed().as_secs_f64();
    write_json(&out.join("timing.json"), &json!({ "total_seconds": seconds, "jobs": timing }))?;
    files.extend(["config.json", "summary.json", "timing.json"].map(|f| out.join(f)));
    Ok(RunReport {
        output_dir: out.clone(),
        files,
        comparisons,
        seconds,
    })
}
