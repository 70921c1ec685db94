//! Posterior summaries: bands, correlations, two-group comparisons and the
//! posterior predictive loss criterion.

mod bands;
mod compare;
mod functionals;
mod gg;

pub use bands::{pointwise_bands, quantile_sorted, FunctionalGrid};
pub use compare::{
    atom_correlation, mrl_difference, prob_greater_from_values, prob_mrl_greater, CurveSource, DifferenceSamples,
    ProbabilityCurve,
};
pub use functionals::{dpmm_functional_draws, ew_functional_draws, FunctionalBands, FunctionalDraws};
pub use gg::{
    compare_replicates, default_k_grid, ew_inverse_cdf, gelfand_ghosh, gg_replicates_dpmm,
    gg_replicates_ew, ComparisonResult, DkPoint, Replicates, K,
};

/// Number of prior draws behind prior comparison curves.
pub const PRIOR_CURVE_DRAWS: usize = 2000;

/// Order-preserving map over scoped worker threads.
pub(crate) fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    if workers < 2 || items.len() < 2 {
        return items.iter().map(&f).collect();
    }
    let chunk = items.len().div_ceil(workers);
    std::thread::scope(|s| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|c| s.spawn(|| c.iter().map(&f).collect::<Vec<_>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker thread panicked"))
            .collect()
    })
}
