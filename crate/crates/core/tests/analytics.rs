mod common;

use common::{mean, variance};
use mrlife::analytics::*;
use mrlife::mixture::{Atom, Hyperparams, MixtureParams, MrlOptions};
use mrlife::numeric::linalg::Mat2;
use mrlife::numeric::{Grid, RngStream};
use mrlife::sampler::{prior_mixtures, run_chain, Dataset, Draw, EwState, SamplerConfig};
use mrlife::survival::{moment_from_survival, DistSpec, SurvivalSource};
use proptest::prelude::*;

const FLOOR: f64 = 1e-10;

fn draw_with(sigma: Mat2, weights: Vec<f64>, atoms: Vec<Atom>, labels: Vec<u32>) -> Draw {
    Draw {
        alpha: 1.0,
        mu: [0.0, 0.0],
        sigma,
        weights,
        atoms,
        labels,
    }
}

fn tight_hyper() -> Hyperparams {
    Hyperparams {
        a_mu: [1.0, 0.0],
        b_mu: Mat2::scaled_identity(0.1),
        a_sigma: 20.0,
        b_sigma: Mat2::scaled_identity(0.5),
        a_alpha: 2.0,
        b_alpha: 1.0,
    }
}

#[test]
fn identical_draws_collapse_the_band() {
    let grid = Grid::linear(0.1, 5.0, 8).unwrap();
    let p = MixtureParams::new(vec![0.4, 0.6], vec![Atom::new(0.5, 0.0), Atom::new(1.5, 0.2)]).unwrap();
    let fd = dpmm_functional_draws(&vec![p; 20], &grid, &MrlOptions::default()).unwrap();
    let b = fd.bands(0.95).unwrap();
    for g in [&b.density, &b.survival, &b.hazard, &b.mrl] {
        for j in 0..grid.len() {
            assert_eq!(g.lower[j], g.median[j]);
            assert_eq!(g.upper[j], g.median[j]);
        }
    }
}

#[test]
fn single_component_functionals_match_the_gamma() {
    let grid = Grid::new(vec![0.5, 2.0, 6.0]).unwrap();
    let fd = dpmm_functional_draws(&[MixtureParams::single(3.0, 1.5).unwrap()], &grid, &MrlOptions::default()).unwrap();
    let d = DistSpec::Gamma { shape: 3.0, rate: 1.5 };
    for (j, &t) in grid.points().iter().enumerate() {
        let c = d.eval_core(t).unwrap();
        assert!((fd.density[0][j].unwrap() / c.density - 1.0).abs() < 1e-10);
        assert!((fd.survival[0][j].unwrap() / c.survival - 1.0).abs() < 1e-10);
        assert!((fd.hazard[0][j].unwrap() / c.hazard - 1.0).abs() < 1e-10);
        assert!((fd.mrl[0][j].unwrap() / d.mrl(t).unwrap() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn ew_functionals_match_the_distribution() {
    let grid = Grid::new(vec![0.5, 2.0, 4.0]).unwrap();
    let s = EwState::new(2.0, 5.0, 2.0).unwrap();
    let fd = ew_functional_draws(&[s], &grid, FLOOR).unwrap();
    let d = DistSpec::ExpWeibull { alpha: 2.0, theta: 5.0, sigma: 2.0 };
    for (j, &t) in grid.points().iter().enumerate() {
        assert!((fd.survival[0][j].unwrap() / d.survival(t) - 1.0).abs() < 1e-12);
        assert!((fd.mrl[0][j].unwrap() / d.mrl(t).unwrap() - 1.0).abs() < 1e-12);
    }
    // far tail: survival below the floor
    let far = Grid::new(vec![40.0, 50.0]).unwrap();
    assert_eq!(ew_functional_draws(&[s], &far, FLOOR).unwrap().mrl[0][1], None);
}

#[test]
fn ew_grid_mrl_matches_pointwise_on_dense_grids() {
    for (a, th, sg) in [(2.0, 5.0, 2.0), (0.5, 3.0, 1.0), (3.0, 0.4, 10.0), (1.0, 1.0, 1.0)] {
        let d = DistSpec::ExpWeibull { alpha: a, theta: th, sigma: sg };
        let grid = Grid::log_spaced(d.quantile(1e-4).unwrap(), d.quantile(1.0 - 1e-9).unwrap(), 300).unwrap();
        let fd = ew_functional_draws(&[EwState::new(a, th, sg).unwrap()], &grid, FLOOR).unwrap();
        for (j, &t) in grid.points().iter().enumerate() {
            let got = fd.mrl[0][j].unwrap();
            assert!((got / d.mrl(t).unwrap() - 1.0).abs() < 1e-8, "({a}, {th}, {sg}) t={t}");
        }
    }
}

#[test]
fn correlation_examples() {
    let a = vec![Atom::new(0.0, 0.0)];
    let draws = vec![
        draw_with(Mat2::diag(2.0, 3.0), vec![1.0], a.clone(), vec![]),
        draw_with(Mat2::sym(1.0, 0.9, 1.0), vec![1.0], a, vec![]),
    ];
    let c = atom_correlation(&draws);
    assert_eq!(c[0], 0.0);
    assert!((c[1] - 0.9).abs() < 1e-15);
}

#[test]
fn difference_of_identical_sets_is_zero() {
    let mut rng = RngStream::new(3);
    let a = prior_mixtures(&tight_hyper(), 10, 50, &mut rng).unwrap();
    let d = mrl_difference(&a, &a, &[0.0, 0.5, 2.0], FLOOR).unwrap();
    for j in 0..3 {
        assert!(d.values[j].iter().all(|x| *x == 0.0));
    }
}

#[test]
fn difference_at_zero_is_difference_of_means() {
    let mut rng = RngStream::new(4);
    let a = prior_mixtures(&tight_hyper(), 10, 100, &mut rng).unwrap();
    let b = prior_mixtures(&tight_hyper(), 10, 100, &mut rng).unwrap();
    let d = mrl_difference(&a, &b, &[0.0], FLOOR).unwrap();
    assert_eq!(d.missing[0], 0);
    for (i, x) in d.values[0].iter().enumerate() {
        let means = |p: &MixtureParams| -> f64 {
            p.weights().iter().zip(p.atoms()).map(|(w, a)| w * (a.theta - a.phi).exp()).sum()
        };
        assert!((x - (means(&a[i]) - means(&b[i]))).abs() <= 1e-12 * (1.0 + x.abs()));
    }
}

#[test]
fn same_law_difference_is_centered() {
    let h = tight_hyper();
    let a = prior_mixtures(&h, 20, 2000, &mut RngStream::with_stream(8, 0)).unwrap();
    let b = prior_mixtures(&h, 20, 2000, &mut RngStream::with_stream(8, 1)).unwrap();
    let d = mrl_difference(&a, &b, &[0.5, 2.0], FLOOR).unwrap();
    for v in &d.values {
        let pos = v.iter().filter(|x| **x > 0.0).count() as f64 / v.len() as f64;
        assert!((pos - 0.5).abs() < 3.0 * (0.25 / v.len() as f64).sqrt(), "{pos}");
        let m = mean(v);
        assert!(m.abs() < 4.0 * (variance(v) / v.len() as f64).sqrt(), "{m}");
    }
}

#[test]
fn dominating_group_gives_curve_of_one() {
    let grid = Grid::linear(0.1, 20.0, 15).unwrap();
    let a: Vec<_> = (0..30).map(|i| MixtureParams::single(4.0 + i as f64 * 0.1, 1.0).unwrap()).collect();
    let b: Vec<_> = (0..30).map(|i| MixtureParams::single(1.5 + i as f64 * 0.05, 1.0).unwrap()).collect();
    let c = prob_mrl_greater(&a, &b, &grid, CurveSource::Posterior, FLOOR).unwrap();
    assert!(c.prob.iter().all(|p| *p == 1.0), "{:?}", c.prob);
}

#[test]
fn prior_curve_is_flat_at_one_half() {
    let h = Hyperparams::isotropic([1.6, 0.4], 0.39);
    let n = PRIOR_CURVE_DRAWS;
    let a = prior_mixtures(&h, 40, n, &mut RngStream::with_stream(21, 0)).unwrap();
    let b = prior_mixtures(&h, 40, n, &mut RngStream::with_stream(21, 1)).unwrap();
    let grid = Grid::linear(0.01, 10.0, 6).unwrap();
    let c = prob_mrl_greater(&a, &b, &grid, CurveSource::Prior, FLOOR).unwrap();
    for (p, k) in c.prob.iter().zip(&c.pairs) {
        assert!((p - 0.5).abs() < 3.0 * (0.25 / *k as f64).sqrt(), "{:?}", c.prob);
    }
    let swapped = prob_mrl_greater(&b, &a, &grid, CurveSource::Prior, FLOOR).unwrap();
    for (x, y) in c.prob.iter().zip(&swapped.prob) {
        assert!((x + y - 1.0).abs() < 1e-15);
    }
}

#[test]
fn mismatched_draw_counts_are_rejected() {
    let a = vec![MixtureParams::single(2.0, 1.0).unwrap(); 3];
    let grid = Grid::new(vec![1.0, 2.0]).unwrap();
    assert!(prob_mrl_greater(&a, &a[..2], &grid, CurveSource::Posterior, FLOOR).is_err());
    assert!(mrl_difference(&a, &a[..2], &[1.0], FLOOR).is_err());
}

#[test]
fn gelfand_ghosh_examples() {
    let t = [1.0, 2.0, 3.0];
    let r = gelfand_ghosh(&t, &[0.0; 3], &t, &default_k_grid()).unwrap();
    assert!(r.curve.iter().all(|d| d.d == 0.0));

    let r = gelfand_ghosh(&[1.5, 2.0], &[0.5, 0.25], &[1.0, 3.0], &[0.0, 1.0, f64::INFINITY]).unwrap();
    assert_eq!((r.g, r.p), (1.25, 0.75));
    assert_eq!(r.curve[0].d, r.p);
    assert_eq!(r.curve[1].d, 0.75 + 0.625);
    assert_eq!(r.curve[2].d, 2.0);

    let r = ComparisonResult { g: 1615787.0, p: 1568967.0, curve: vec![] };
    assert_eq!(r.d(f64::INFINITY), 3184754.0);

    assert!(gelfand_ghosh(&[1.0], &[1.0, 2.0], &[1.0], &[1.0]).is_err());
    assert!(gelfand_ghosh(&[1.0], &[1.0], &[1.0], &[-1.0]).is_err());
}

#[test]
fn k_values_round_trip_through_json() {
    let r = gelfand_ghosh(&[1.0], &[2.0], &[0.0], &default_k_grid()).unwrap();
    let s = serde_json::to_string(&r).unwrap();
    assert!(s.contains("\"inf\""));
    let back: ComparisonResult = serde_json::from_str(&s).unwrap();
    assert_eq!(back, r);
}

#[test]
fn stuck_chain_replicates_match_the_gamma_moments() {
    let atom = Atom::from_shape_rate(4.0, 2.0).unwrap();
    let d = draw_with(Mat2::diag(1.0, 1.0), vec![0.5, 0.5], vec![atom, Atom::new(3.0, 0.0)], vec![0, 0, 0]);
    let draws = vec![d; 20000];
    let data = Dataset::observed("x", vec![1.0, 2.0, 3.0]).unwrap();
    let rep = gg_replicates_dpmm(&draws, &data, &mut RngStream::new(5)).unwrap();
    let se = (2.0f64 / 20000.0).sqrt();
    for i in 0..3 {
        assert!((rep.mean[i] - 2.0).abs() < 4.0 * se, "{}", rep.mean[i]);
        assert!((rep.var[i] - 1.0).abs() < 0.06, "{}", rep.var[i]);
    }
}

#[test]
fn replicates_follow_the_labels() {
    let atoms = vec![Atom::from_shape_rate(2.0, 1.0).unwrap(), Atom::from_shape_rate(50.0, 1.0).unwrap()];
    let draws = vec![draw_with(Mat2::diag(1.0, 1.0), vec![0.5, 0.5], atoms, vec![0, 1]); 2000];
    let data = Dataset::observed("x", vec![1.0, 2.0]).unwrap();
    let rep = gg_replicates_dpmm(&draws, &data, &mut RngStream::new(6)).unwrap();
    assert!((rep.mean[0] - 2.0).abs() < 0.2 && (rep.mean[1] - 50.0).abs() < 1.0);
    assert!(rep.var.iter().all(|v| *v >= 0.0));
    let short = Dataset::observed("x", vec![1.0]).unwrap();
    assert!(gg_replicates_dpmm(&draws, &short, &mut RngStream::new(6)).is_err());
}

#[test]
fn ew_inverse_cdf_special_cases() {
    let w = EwState::new(1.7, 1.0, 2.5).unwrap();
    for u in [0.01, 0.3, 0.9, 0.999] {
        let weib = 2.5 * (-(1.0f64 - u).ln()).powf(1.0 / 1.7);
        assert!((ew_inverse_cdf(&w, u) / weib - 1.0).abs() < 1e-12);
    }
    let s = EwState::new(2.0, 5.0, 2.0).unwrap();
    for u in [0.05, 0.5, 0.95] {
        assert!((ew_inverse_cdf(&s, u) / s.quantile(u) - 1.0).abs() < 1e-8);
    }
}

#[test]
fn ew_replicate_means() {
    let n_draws = 40000;
    let e = vec![EwState::new(1.0, 1.0, 3.0).unwrap(); n_draws];
    let rep = gg_replicates_ew(&e, 2, &mut RngStream::new(7)).unwrap();
    let se = 3.0 / (n_draws as f64).sqrt();
    assert!((rep.mean[0] - 3.0).abs() < 4.0 * se && (rep.mean[1] - 3.0).abs() < 4.0 * se);

    let s = EwState::new(2.0, 5.0, 2.0).unwrap();
    let d = DistSpec::ExpWeibull { alpha: 2.0, theta: 5.0, sigma: 2.0 };
    let m1 = moment_from_survival(SurvivalSource::Dist(&d), 1).unwrap();
    let m2 = moment_from_survival(SurvivalSource::Dist(&d), 2).unwrap();
    let rep = gg_replicates_ew(&vec![s; n_draws], 1, &mut RngStream::new(8)).unwrap();
    let se = ((m2 - m1 * m1) / n_draws as f64).sqrt();
    assert!((rep.mean[0] - m1).abs() < 4.0 * se, "{} vs {m1}", rep.mean[0]);
}

#[test]
fn band_width_does_not_grow_with_more_draws() {
    let mut rng = RngStream::new(31);
    let times: Vec<f64> = (0..60)
        .map(|_| mrlife::numeric::random::draw_gamma(3.0, 1.0, &mut rng).unwrap())
        .collect();
    let data = Dataset::observed("x", times).unwrap();
    let cfg = SamplerConfig {
        burn_in: 300,
        pilot_iters: 200,
        thin: 1,
        n_save: 2000,
        truncation: 20,
        ..SamplerConfig::default()
    };
    let post = run_chain(&data, &Hyperparams::isotropic([1.1, 0.0], 0.3), &cfg).unwrap();
    let mix = post.mixtures();
    let sub: Vec<_> = mix.iter().step_by(10).cloned().collect();
    let grid = Grid::linear(0.01, 6.0, 25).unwrap();
    let full = dpmm_functional_draws(&mix, &grid, &MrlOptions::default()).unwrap().bands(0.95).unwrap();
    let few = dpmm_functional_draws(&sub, &grid, &MrlOptions::default()).unwrap().bands(0.95).unwrap();
    let width = |g: &FunctionalGrid| -> f64 { (0..g.valid.len()).map(|j| g.upper[j] - g.lower[j]).sum() };
    assert!(width(&full.mrl) <= 1.1 * width(&few.mrl), "{} vs {}", width(&full.mrl), width(&few.mrl));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dk_is_nondecreasing_and_concave(
        rows in prop::collection::vec((0.1f64..100.0, 0.0f64..50.0, 0.1f64..100.0), 1..30),
    ) {
        let e: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let v: Vec<f64> = rows.iter().map(|r| r.1).collect();
        let t: Vec<f64> = rows.iter().map(|r| r.2).collect();
        let ks: Vec<f64> = (0..40).map(|i| i as f64 * 0.5).collect();
        let r = gelfand_ghosh(&e, &v, &t, &ks).unwrap();
        let d: Vec<f64> = r.curve.iter().map(|p| p.d).collect();
        let tol = 1e-9 * (r.g + r.p + 1.0);
        prop_assert!((d[0] - r.p).abs() <= tol);
        for w in d.windows(3) {
            prop_assert!(w[1] + tol >= w[0]);
            prop_assert!(w[1] - w[0] + tol >= w[2] - w[1]);
        }
        prop_assert!((r.d(1e12) - r.d(f64::INFINITY)).abs() <= 1e-6 * (r.g + r.p + 1.0));
    }

    #[test]
    fn swapping_groups_complements_the_curve(seed in 0u64..500) {
        let mut rng = RngStream::new(seed);
        let h = tight_hyper();
        let a = prior_mixtures(&h, 8, 30, &mut rng).unwrap();
        let b = prior_mixtures(&h, 8, 30, &mut rng).unwrap();
        let grid = Grid::linear(0.01, 8.0, 9).unwrap();
        let ab = prob_mrl_greater(&a, &b, &grid, CurveSource::Prior, FLOOR).unwrap();
        let ba = prob_mrl_greater(&b, &a, &grid, CurveSource::Prior, FLOOR).unwrap();
        for (x, y) in ab.prob.iter().zip(&ba.prob) {
            if x.is_finite() {
                prop_assert!((x + y - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn bands_are_ordered(
        vals in prop::collection::vec(prop::collection::vec(prop::option::of(-1e3f64..1e3), 4), 2..60),
        level in 0.01f64..0.99,
    ) {
        let grid = Grid::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let b = pointwise_bands(&vals, &grid, level).unwrap();
        for j in 0..4 {
            if !b.is_flagged(j) {
                prop_assert!(b.lower[j] <= b.median[j] && b.median[j] <= b.upper[j]);
            } else {
                prop_assert!(b.median[j].is_nan());
            }
        }
    }
}
