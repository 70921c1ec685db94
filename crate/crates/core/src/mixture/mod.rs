//! Truncated Dirichlet-process mixtures of gamma kernels.

mod elicit;
mod functionals;
mod params;

pub use elicit::{
    elicit_hyperparameters, approx_prior_variance, approx_prior_mean, Elicitation, Hyperparams,
};
pub use functionals::{
    mixture_functionals, mixture_mrl_grid, mixture_summary, MixtureFunctionals, MrlGrid, MrlMethod, MrlOptions,
};
pub use params::{
    expected_clusters, finiteness_a, stick_break, truncation_level, Atom, MixtureParams,
};

pub(crate) use functionals::GammaKernel;
