//! Posterior simulation: blocked Gibbs for the gamma DPMM and random-walk
//! Metropolis-Hastings for the exponentiated Weibull.

mod chain;
mod data;
mod ew;
mod gibbs;
mod prior;

pub use chain::{run_chain, Draw, PilotScale, PosteriorDraws, SamplerConfig};
pub use data::Dataset;
pub use ew::{
    ew_log_posterior, ew_prior_from_quantiles, fit_exp_weibull, EwConfig, EwDraws, EwPrior,
    EwState, ParamPrior,
};
pub use gibbs::{
    atom_log_ratio, atom_log_target, gibbs_sweep, initial_state, label_log_weights, update_atoms,
    update_hypers, update_labels, update_weights, ChainState, MhStats,
};
pub use prior::{draw_prior_state, draw_times, prior_mixtures};
