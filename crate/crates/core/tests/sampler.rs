mod common;

use common::{batch_means_se, mean, oracle, variance};
use mrlife::mixture::{Atom, Hyperparams};
use mrlife::numeric::linalg::Mat2;
use mrlife::numeric::random::{draw_gamma, draw_inv_wishart2, draw_mvn2};
use mrlife::numeric::RngStream;
use mrlife::sampler::*;
use proptest::prelude::*;

fn state_with(weights: Vec<f64>, atoms: Vec<Atom>, labels: Vec<usize>) -> ChainState {
    let l = weights.len();
    let mut sticks = Vec::new();
    let mut rest = 1.0;
    for p in &weights[..l - 1] {
        sticks.push(if rest > 0.0 { p / rest } else { 0.0 });
        rest -= p;
    }
    ChainState {
        weights,
        atoms,
        labels,
        mu: [0.0, 0.0],
        sigma: Mat2::IDENTITY,
        alpha: 1.0,
        sticks,
    }
}

fn normalized(lw: &[f64]) -> Vec<f64> {
    let m = lw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let s: f64 = lw.iter().map(|v| (v - m).exp()).sum();
    lw.iter().map(|v| (v - m).exp() / s).collect()
}

#[test]
fn identical_proposal_has_unit_ratio() {
    let data = Dataset::new("g", vec![1.0, 2.5], vec![false, true]).unwrap();
    let a = Atom::new(0.3, -0.2);
    let r = atom_log_ratio(&a, &a, &[0, 1], &data, &[0.0, 0.0], &Mat2::IDENTITY).unwrap();
    assert_eq!(r, 0.0);
}

#[test]
fn censored_factor_is_gamma_survival() {
    let data = Dataset::new("g", vec![1.0], vec![true]).unwrap();
    let a = Atom::new(0.0, 0.0);
    let with = atom_log_target(&a, &[0], &data, &[0.0, 0.0], &Mat2::IDENTITY).unwrap();
    let without = atom_log_target(&a, &[], &data, &[0.0, 0.0], &Mat2::IDENTITY).unwrap();
    assert!((with - without + 1.0).abs() < 1e-14);
}

#[test]
fn no_active_components_means_fresh_prior_atoms() {
    let data = Dataset::empty("g");
    let mut s = state_with(vec![0.5, 0.5], vec![Atom::new(9.0, 9.0); 2], vec![]);
    let mut rng = RngStream::new(3);
    let st = update_atoms(&mut s, &data, 2.0, &Mat2::IDENTITY, &mut rng).unwrap();
    assert_eq!(st.proposed, 0);
    let mut r2 = RngStream::new(3);
    for a in &s.atoms {
        let x = draw_mvn2(&[0.0, 0.0], &Mat2::IDENTITY, &mut r2).unwrap();
        assert_eq!([a.theta, a.phi], x);
    }
}

#[test]
fn atom_update_rejects_small_multiplier() {
    let data = Dataset::empty("g");
    let mut s = state_with(vec![1.0], vec![Atom::new(0.0, 0.0)], vec![]);
    let mut rng = RngStream::new(1);
    assert!(update_atoms(&mut s, &data, 1.0, &Mat2::IDENTITY, &mut rng).is_err());
}

#[test]
fn weight_update_without_data_gives_prior_sticks() {
    let alpha = 1.7;
    let mut s = state_with(vec![0.25; 4], vec![Atom::new(0.0, 0.0); 4], vec![]);
    s.alpha = alpha;
    let mut rng = RngStream::new(4);
    let mut v1 = Vec::new();
    for _ in 0..40_000 {
        update_weights(&mut s, &mut rng).unwrap();
        v1.push(s.sticks[1]);
    }
    let m = mean(&v1);
    let se = (variance(&v1) / v1.len() as f64).sqrt();
    assert!((m - 1.0 / (1.0 + alpha)).abs() < 4.0 * se, "{m}");
}

#[test]
fn weight_update_with_all_data_in_first_component() {
    let n = 7;
    let mut s = state_with(vec![0.5, 0.5], vec![Atom::new(0.0, 0.0); 2], vec![0; n]);
    let mut rng = RngStream::new(5);
    let mut v = Vec::new();
    for _ in 0..40_000 {
        update_weights(&mut s, &mut rng).unwrap();
        v.push(s.weights[0]);
    }
    let want = (n as f64 + 1.0) / (n as f64 + 2.0);
    let se = (variance(&v) / v.len() as f64).sqrt();
    assert!((mean(&v) - want).abs() < 4.0 * se);
}

#[test]
fn label_weight_examples() {
    let data = Dataset::observed("g", vec![0.7, 3.0]).unwrap();
    let a = Atom::from_shape_rate(2.0, 1.0).unwrap();
    let s = state_with(vec![0.5, 0.5], vec![a, a], vec![0, 0]);
    for i in 0..2 {
        let p = normalized(&label_log_weights(&s, &data, i));
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15);
    }
    let s = state_with(vec![0.3, 0.7], vec![a, a], vec![0, 0]);
    let p = normalized(&label_log_weights(&s, &data, 0));
    assert!((p[0] - 0.3).abs() < 1e-15 && (p[1] - 0.7).abs() < 1e-15);

    // second atom puts essentially no density near t = 0.7
    let far = Atom::from_shape_rate(5000.0, 1.0).unwrap();
    let mut s = state_with(vec![0.5, 0.5], vec![a, far], vec![1, 1]);
    let mut rng = RngStream::new(6);
    update_labels(&mut s, &data, &mut rng).unwrap();
    assert_eq!(s.labels[0], 0);
}

#[test]
fn all_zero_label_weights_are_a_hard_error() {
    let data = Dataset::observed("g", vec![1.0]).unwrap();
    let mut s = state_with(vec![0.5, 0.5], vec![Atom::new(0.0, 0.0); 2], vec![0]);
    s.weights = vec![0.0, 0.0];
    let mut rng = RngStream::new(7);
    assert!(update_labels(&mut s, &data, &mut rng).is_err());
}

#[test]
fn label_update_matches_enumeration() {
    // joint over (w_1, w_2) given p and atoms is proportional to
    // p_{w_1} k_{w_1}(t_1) p_{w_2} k_{w_2}(t_2); enumerate all four
    let data = Dataset::new("g", vec![0.8, 4.0], vec![false, true]).unwrap();
    let comps = [(0.35, 2.0, 2.0), (0.65, 6.0, 1.0)];
    let atoms: Vec<Atom> = comps.iter().map(|c| Atom::from_shape_rate(c.1, c.2).unwrap()).collect();
    let k = |l: usize, i: usize| -> f64 {
        let ln_f = oracle::gamma_mixture_ln_density(&[(1.0, comps[l].1, comps[l].2)]);
        if data.censored()[i] {
            oracle::tail_integrals(&ln_f, data.times()[i], 1e-3, 400, 1e-11).ln_mass().exp()
        } else {
            ln_f(data.times()[i]).exp()
        }
    };
    let mut joint = [[0.0; 2]; 2];
    let mut z = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            joint[a][b] = comps[a].0 * k(a, 0) * comps[b].0 * k(b, 1);
            z += joint[a][b];
        }
    }
    let mut s = state_with(vec![0.35, 0.65], atoms, vec![0, 0]);
    let mut rng = RngStream::new(8);
    let n = 200_000;
    let mut counts = [[0usize; 2]; 2];
    for _ in 0..n {
        update_labels(&mut s, &data, &mut rng).unwrap();
        counts[s.labels[0]][s.labels[1]] += 1;
    }
    for a in 0..2 {
        for b in 0..2 {
            let p = joint[a][b] / z;
            let f = counts[a][b] as f64 / n as f64;
            assert!((f - p).abs() < 4.0 * (p * (1.0 - p) / n as f64).sqrt(), "({a},{b}) {f} vs {p}");
        }
    }
}

#[test]
fn hyper_update_without_atoms_is_the_prior() {
    let h = Hyperparams {
        a_mu: [1.0, -0.5],
        b_mu: Mat2::sym(0.4, 0.1, 0.3),
        a_sigma: 12.0,
        b_sigma: Mat2::scaled_identity(4.5),
        a_alpha: 2.0,
        b_alpha: 1.0,
    };
    let mut s = state_with(vec![0.25; 3].into_iter().chain([0.25]).collect(), vec![Atom::new(0.0, 0.0); 4], vec![]);
    s.sticks = vec![0.5; 3];
    s.weights = vec![0.5, 0.25, 0.125, 0.125];
    let mut rng = RngStream::new(9);
    let (mut m0, mut s11, mut al) = (Vec::new(), Vec::new(), Vec::new());
    for _ in 0..40_000 {
        update_hypers(&mut s, &h, &mut rng).unwrap();
        m0.push(s.mu[0]);
        s11.push(s.sigma.get(0, 0));
        al.push(s.alpha);
    }
    let check = |xs: &[f64], want: f64| {
        let se = (variance(xs) / xs.len() as f64).sqrt();
        assert!((mean(xs) - want).abs() < 4.0 * se, "{} vs {want}", mean(xs));
    };
    check(&m0, 1.0);
    check(&s11, 4.5 / 9.0);
    // L = 4 here: Gamma(4 + 2 - 1, 1 + 3 log 2)
    check(&al, 5.0 / (1.0 + 3.0 * 2f64.ln()));
}

#[test]
fn alpha_plug_in_example() {
    let h = Hyperparams::isotropic([0.0, 0.0], 1.0);
    let mut s = state_with(vec![0.5, 0.25, 0.25], vec![Atom::new(0.0, 0.0); 3], vec![]);
    s.sticks = vec![0.5, 0.5];
    let mut rng = RngStream::new(10);
    let al: Vec<f64> = (0..40_000)
        .map(|_| {
            update_hypers(&mut s, &h, &mut rng).unwrap();
            s.alpha
        })
        .collect();
    let rate = 1.0 + 2.0 * 2f64.ln();
    let se = (variance(&al) / al.len() as f64).sqrt();
    assert!((mean(&al) - 4.0 / rate).abs() < 4.0 * se);
    assert!((variance(&al) - 4.0 / (rate * rate)).abs() < 0.05 * 4.0 / (rate * rate));
}

fn geweke_hyper() -> Hyperparams {
    Hyperparams {
        a_mu: [0.7, 0.2],
        b_mu: Mat2::scaled_identity(0.2),
        a_sigma: 12.0,
        b_sigma: Mat2::scaled_identity(2.7),
        a_alpha: 2.0,
        b_alpha: 1.0,
    }
}

#[test]
fn geweke_prior_vs_successive_conditional() {
    let h = geweke_hyper();
    let (n, l, m) = (3, 3, 10_000);
    let mut rng = RngStream::new(11);

    let mut prior = [Vec::new(), Vec::new(), Vec::new()];
    for _ in 0..m {
        prior[0].push(draw_mvn2(&h.a_mu, &h.b_mu, &mut rng).unwrap()[0]);
        prior[1].push(draw_inv_wishart2(h.a_sigma, &h.b_sigma, &mut rng).unwrap().get(0, 0));
        prior[2].push(draw_gamma(h.a_alpha, h.b_alpha, &mut rng).unwrap());
    }

    let mut state = draw_prior_state(&h, l, n, &mut rng).unwrap();
    let mut data = Dataset::observed("g", draw_times(&state, &mut rng).unwrap()).unwrap();
    let s2 = Mat2::scaled_identity(0.3);
    let mut chain = [Vec::new(), Vec::new(), Vec::new()];
    for _ in 0..m {
        for _ in 0..5 {
            gibbs_sweep(&mut state, &data, &h, 2.0, &s2, &mut rng).unwrap();
            data.set_times(draw_times(&state, &mut rng).unwrap()).unwrap();
        }
        chain[0].push(state.mu[0]);
        chain[1].push(state.sigma.get(0, 0));
        chain[2].push(state.alpha);
    }
    for (k, name) in ["mu1", "sigma11", "alpha"].iter().enumerate() {
        let se = (variance(&prior[k]) / m as f64 + batch_means_se(&chain[k]).powi(2)).sqrt();
        let d = mean(&chain[k]) - mean(&prior[k]);
        assert!(d.abs() < 4.0 * se, "{name}: prior {} vs chain {} (se {se})", mean(&prior[k]), mean(&chain[k]));
    }
}

#[test]
fn zero_data_chain_reproduces_the_prior() {
    let h = geweke_hyper();
    let cfg = SamplerConfig {
        truncation: 5,
        burn_in: 200,
        thin: 2,
        n_save: 5000,
        pilot_iters: 0,
        seed: 12,
        ..Default::default()
    };
    let d = run_chain(&Dataset::empty("g"), &h, &cfg).unwrap();
    let mu: Vec<f64> = d.draws.iter().map(|x| x.mu[1]).collect();
    let al: Vec<f64> = d.draws.iter().map(|x| x.alpha).collect();
    let p1: Vec<f64> = d.draws.iter().map(|x| x.weights[0]).collect();
    assert!((mean(&mu) - 0.2).abs() < 4.0 * batch_means_se(&mu));
    assert!((mean(&al) - 2.0).abs() < 4.0 * batch_means_se(&al));
    // E(p_1) = E(1/(1 + α)) under α ~ Gamma(2, 1), by quadrature
    let e_p1 = oracle::simpson(|a: f64| a * (-a).exp() / (1.0 + a), 0.0, 60.0, 400, 1e-12);
    assert!((mean(&p1) - e_p1).abs() < 4.0 * batch_means_se(&p1));
}

#[test]
fn seeded_runs_are_identical() {
    let data = Dataset::new("g", vec![1.0, 2.0, 2.5, 7.0, 0.4], vec![false, false, true, false, true]).unwrap();
    let h = Hyperparams::isotropic([1.0, 0.0], 0.5);
    let cfg = SamplerConfig {
        truncation: 8,
        burn_in: 50,
        thin: 2,
        n_save: 40,
        pilot_iters: 30,
        seed: 99,
        ..Default::default()
    };
    let a = run_chain(&data, &h, &cfg).unwrap();
    let b = run_chain(&data, &h, &cfg).unwrap();
    assert_eq!(a, b);
    let c = run_chain(&data, &h, &SamplerConfig { seed: 100, ..cfg }).unwrap();
    assert_ne!(a.draws, c.draws);
}

#[test]
fn all_observed_flags_match_the_uncensored_path_bit_for_bit() {
    let times = vec![0.3, 1.2, 2.2, 5.0, 9.1, 3.3];
    let flagged = Dataset::new("g", times.clone(), vec![false; 6]).unwrap();
    let plain = Dataset::observed("g", times).unwrap();
    let h = Hyperparams::isotropic([1.0, 0.0], 0.4);
    let cfg = SamplerConfig {
        truncation: 6,
        burn_in: 30,
        thin: 1,
        n_save: 30,
        pilot_iters: 20,
        seed: 5,
        ..Default::default()
    };
    let a = run_chain(&flagged, &h, &cfg).unwrap();
    let b = run_chain(&plain, &h, &cfg).unwrap();
    for (x, y) in a.draws.iter().zip(&b.draws) {
        for (p, q) in x.atoms.iter().zip(&y.atoms) {
            assert_eq!(p.theta.to_bits(), q.theta.to_bits());
            assert_eq!(p.phi.to_bits(), q.phi.to_bits());
        }
        assert_eq!(x.labels, y.labels);
    }
}

#[test]
fn detailed_balance_of_the_atom_step() {
    let data = Dataset::new("g", vec![0.6, 1.9, 3.4], vec![false, true, false]).unwrap();
    let mu = [0.5, 0.1];
    let sigma = Mat2::sym(0.6, 0.2, 0.5);
    let members = [0usize, 1, 2];
    // independent target: bivariate normal by hand, gamma factors by quadrature
    let prec = sigma.inverse().unwrap();
    let ln_target = |a: &Atom| -> f64 {
        let d = [a.theta - mu[0], a.phi - mu[1]];
        let q = prec.get(0, 0) * d[0] * d[0] + 2.0 * prec.get(0, 1) * d[0] * d[1] + prec.get(1, 1) * d[1] * d[1];
        let mut v = -(2.0 * std::f64::consts::PI).ln() - 0.5 * sigma.det().ln() - 0.5 * q;
        let ln_f = oracle::gamma_mixture_ln_density(&[(1.0, a.shape(), a.rate())]);
        for &i in &members {
            let t = data.times()[i];
            v += if data.censored()[i] {
                oracle::tail_integrals(&ln_f, t, 1e-3 * t, 400, 1e-11).ln_mass()
            } else {
                ln_f(t)
            };
        }
        v
    };
    let mut rng = RngStream::new(13);
    for _ in 0..100 {
        let x = Atom::new(0.4 + 0.8 * rng.std_normal(), 0.8 * rng.std_normal());
        let y = Atom::new(0.4 + 0.8 * rng.std_normal(), 0.8 * rng.std_normal());
        let rxy = atom_log_ratio(&x, &y, &members, &data, &mu, &sigma).unwrap();
        let ryx = atom_log_ratio(&y, &x, &members, &data, &mu, &sigma).unwrap();
        let (px, py) = (ln_target(&x), ln_target(&y));
        assert!((rxy - (py - px)).abs() < 1e-6 * (1.0 + (py - px).abs()), "{rxy} vs {}", py - px);
        // π(x) min(1, r(x→y)) = π(y) min(1, r(y→x))
        let flow_xy = px + rxy.min(0.0);
        let flow_yx = py + ryx.min(0.0);
        assert!((flow_xy - flow_yx).abs() < 1e-6 * (1.0 + flow_xy.abs()));
        assert!((rxy + ryx).abs() < 1e-12 * (1.0 + rxy.abs()));
    }
}

#[test]
fn sim1_configuration_acceptance_band() {
    let comps = [(0.35, 10.0, 0.5), (0.4, 20.0, 1.0), (0.15, 30.0, 5.0), (0.1, 40.0, 8.0)];
    let mut rng = RngStream::new(14);
    let w: Vec<f64> = comps.iter().map(|c| c.0).collect();
    let times: Vec<f64> = (0..200)
        .map(|_| {
            let k = mrlife::numeric::random::draw_categorical(&w, &mut rng).unwrap();
            draw_gamma(comps[k].1, comps[k].2, &mut rng).unwrap()
        })
        .collect();
    let data = Dataset::observed("sim1", times).unwrap();
    let h = Hyperparams::isotropic([1.6, 0.4], 0.39);
    let cfg = SamplerConfig::default();
    assert_eq!((cfg.truncation, cfg.n_save), (40, 2000));
    let d = run_chain(&data, &h, &cfg).unwrap();
    assert_eq!(d.draws.len(), 2000);
    let r = d.acceptance.rate();
    assert!((0.1..=0.6).contains(&r), "acceptance {r}");
}

#[test]
fn trajectory_and_spread_pilots_both_run() {
    let data = Dataset::observed("g", vec![1.0, 1.5, 2.0, 8.0, 9.0, 11.0]).unwrap();
    let h = Hyperparams::isotropic([1.0, 0.0], 0.5);
    for scale in [PilotScale::AtomSpread, PilotScale::Trajectory] {
        let cfg = SamplerConfig {
            truncation: 6,
            burn_in: 20,
            thin: 1,
            n_save: 20,
            pilot_iters: 100,
            pilot_scale: scale,
            ..Default::default()
        };
        let d = run_chain(&data, &h, &cfg).unwrap();
        assert!(d.proposal_cov.is_spd());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn weights_stay_on_the_simplex(labels in prop::collection::vec(0usize..6, 0..40), alpha in 0.01f64..20.0, seed in 0u64..1000) {
        let mut s = state_with(vec![1.0 / 6.0; 6], vec![Atom::new(0.0, 0.0); 6], labels);
        s.alpha = alpha;
        let mut rng = RngStream::new(seed);
        update_weights(&mut s, &mut rng).unwrap();
        prop_assert!(s.weights.iter().all(|p| *p >= 0.0));
        prop_assert!((s.weights.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        let rate = 1.0 - s.sticks.iter().map(|v| (-v).ln_1p()).sum::<f64>();
        prop_assert!(rate > 0.0 && rate.is_finite());
        prop_assert!(s.validate().is_ok());
    }
}
