//! Forward simulation from the DPMM prior.

use super::gibbs::ChainState;
use crate::error::Result;
use crate::mixture::{stick_break, Atom, Hyperparams, MixtureParams};
use crate::numeric::random::{
    draw_beta, draw_categorical, draw_gamma, draw_inv_wishart2, draw_mvn2, sampling_factor,
    draw_mvn2_chol,
};
use crate::numeric::RngStream;

/// A full prior draw of the truncated model with `n` labels.
pub fn draw_prior_state(
    hyper: &Hyperparams,
    truncation: usize,
    n: usize,
    rng: &mut RngStream,
) -> Result<ChainState> {
    hyper.validate()?;
    let alpha = draw_gamma(hyper.a_alpha, hyper.b_alpha, rng)?;
    let mu = draw_mvn2(&hyper.a_mu, &hyper.b_mu, rng)?;
    let sigma = draw_inv_wishart2(hyper.a_sigma, &hyper.b_sigma, rng)?;
    let chol = sampling_factor(&sigma)?;
    let atoms = (0..truncation)
        .map(|_| {
            let x = draw_mvn2_chol(&mu, &chol, rng);
            Atom::new(x[0], x[1])
        })
        .collect();
    let mut sticks = Vec::with_capacity(truncation.saturating_sub(1));
    for _ in 1..truncation {
        sticks.push(draw_beta(1.0, alpha, rng)?.min(1.0 - f64::EPSILON / 2.0));
    }
    let weights = stick_break(&sticks)?;
    let labels = (0..n)
        .map(|_| draw_categorical(&weights, rng))
        .collect::<Result<_>>()?;
    Ok(ChainState {
        weights,
        atoms,
        labels,
        mu,
        sigma,
        alpha,
        sticks,
    })
}

/// `n_draws` mixtures from the prior, e.g. for prior functional curves.
pub fn prior_mixtures(
    hyper: &Hyperparams,
    truncation: usize,
    n_draws: usize,
    rng: &mut RngStream,
) -> Result<Vec<MixtureParams>> {
    (0..n_draws)
        .map(|_| draw_prior_state(hyper, truncation, 0, rng)?.mixture())
        .collect()
}

/// `t_i ~ Gamma(e^{θ_{w_i}}, e^{φ_{w_i}})` for every label of `state`.
pub fn draw_times(state: &ChainState, rng: &mut RngStream) -> Result<Vec<f64>> {
    state
        .labels
        .iter()
        .map(|&w| {
            let a = state.atoms[w];
            Ok(draw_gamma(a.shape(), a.rate(), rng)?.max(f64::MIN_POSITIVE))
        })
        .collect()
}
