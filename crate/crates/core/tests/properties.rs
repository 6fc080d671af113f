use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use softgeo::analytic::{self, MassForm, Regime, Term};
use softgeo::geometry::{sample_binomial, Obstacle};
use softgeo::graph::{connectivity_outcome, sample_graph};
use softgeo::quadrature::{connectivity_mass, pfc_numeric};
use softgeo::{ChannelModel, Domain, Point};

fn domains() -> impl Strategy<Value = Domain> {
    prop_oneof![
        (1.0..8.0f64).prop_map(|r| Domain::disk(r).unwrap()),
        (0.1..2.0f64, 2.5..8.0f64).prop_map(|(a, b)| Domain::annulus(a, b).unwrap()),
        (1.0..5.0f64).prop_map(|r| Domain::sphere(r).unwrap()),
        (0.1..2.0f64, 2.5..5.0f64).prop_map(|(a, b)| Domain::spherical_shell(a, b).unwrap()),
        (0.2..1.5f64, 3.0..4.5f64).prop_map(|(a, c)| Domain::square(12.0, vec![Obstacle::new(c, c, a), Obstacle::new(12.0 - c, c, a)]).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 32,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn sampled_points_lie_in_free_space(d in domains(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..200 {
            prop_assert!(d.contains(d.sample_point(&mut rng)));
        }
    }

    #[test]
    fn fast_outcome_matches_full_graph(d in domains(), n in 0usize..60, beta in 0.2..4.0f64, seed in any::<u64>()) {
        let c = ChannelModel::free_space(beta).unwrap();
        let nodes = sample_binomial(&d, n, seed);
        let g = sample_graph(&nodes, &d, &c, seed ^ 1);
        let o = connectivity_outcome(&nodes, &d, &c, seed ^ 1);
        prop_assert_eq!(o.connected, g.is_connected());
        prop_assert_eq!(o.isolated, g.count_isolated());
    }

    #[test]
    fn mass_is_bounded_by_bulk(d in domains(), beta in 0.3..3.0f64, seed in any::<u64>()) {
        let c = ChannelModel::free_space(beta).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = d.sample_point(&mut rng);
        let m = connectivity_mass(&d, &c, p, 1e-8).unwrap();
        let bulk = if d.dimension() == 2 {
            std::f64::consts::PI / beta
        } else {
            (std::f64::consts::PI / beta).powf(1.5)
        };
        prop_assert!(m > 0.0 && m <= bulk * (1.0 + 1e-8));
    }

    #[test]
    fn breakdown_totals_and_signs(rho in 0.1..60.0f64, beta in 0.2..5.0f64, outer in 5.0..60.0f64) {
        let r0 = 1.0 / beta.sqrt();
        let cases = [
            analytic::pfc_disk(outer, beta, rho).unwrap(),
            analytic::pfc_annulus(0.1 * r0, outer, beta, rho, None).unwrap(),
            analytic::pfc_annulus((6.0 * r0).min(0.9 * outer), outer, beta, rho, Some(Regime::LargeObstacle)).unwrap(),
            analytic::pfc_annulus_large_domain(1.0, outer, beta, rho).unwrap(),
            analytic::pfc_square(outer, beta, rho).unwrap(),
            analytic::pfc_shell(0.1 * r0, outer, beta, rho, None).unwrap(),
        ];
        for b in cases {
            prop_assert!(b.terms.values().all(|&v| v >= 0.0));
            let sum: f64 = b.terms.values().sum();
            prop_assert_eq!(b.total, 1.0 - sum);
            prop_assert!(b.total <= 1.0);
        }
    }

    #[test]
    fn dominance_ratio_grows_with_n(rho in 0.5..20.0f64, r in 0.05..8.0f64, n in 0usize..60) {
        let a = analytic::obstacle_dominance_ratio(100.0, n, r, 1.0, rho).unwrap();
        let b = analytic::obstacle_dominance_ratio(100.0, n + 1, r, 1.0, rho).unwrap();
        prop_assert!(a >= 0.0 && b > a);
    }

    #[test]
    fn obstacle_terms_scale_linearly(n in 1usize..40, rho in 1.0..20.0f64) {
        let one = analytic::pfc_square_obstacles(100.0, &[0.5], 1.0, rho, None).unwrap();
        let many = analytic::pfc_square_obstacles(100.0, &vec![0.5; n], 1.0, rho, None).unwrap();
        let (a, b) = (one.term(Term::Obstacle).unwrap(), many.term(Term::Obstacle).unwrap());
        prop_assert!((b / (n as f64 * a) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn series_follow_closed_forms_near_small_obstacles(r in 0.02..0.2f64, frac in 0.0..1.0f64) {
        // within ε ≤ 0.05·min(r, r0) the truncated series are 1e-3 accurate
        let eps = frac * 0.05 * r.min(1.0);
        let pairs = [
            (analytic::mass_annulus_small(eps, r, 1.0, MassForm::Closed).unwrap(), analytic::mass_annulus_small(eps, r, 1.0, MassForm::Series).unwrap()),
            (analytic::mass_shell_small(eps, r, 1.0, MassForm::Closed).unwrap(), analytic::mass_shell_small(eps, r, 1.0, MassForm::Series).unwrap()),
        ];
        for (closed, series) in pairs {
            prop_assert!((series / closed - 1.0).abs() <= 1e-3);
        }
    }

    #[test]
    fn visibility_is_symmetric(d in domains(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..50 {
            let (a, b) = (d.sample_point(&mut rng), d.sample_point(&mut rng));
            prop_assert_eq!(d.visible(a, b), d.visible(b, a));
            prop_assert!(d.visible(a, a));
        }
    }
}

#[test]
fn mass_nondecreasing_away_from_obstacle() {
    let c = ChannelModel::free_space(1.0).unwrap();
    for (d, dim3) in [
        (Domain::annulus(0.05, 30.0).unwrap(), false),
        (Domain::annulus(2.0, 30.0).unwrap(), false),
        (Domain::spherical_shell(0.5, 30.0).unwrap(), true),
    ] {
        let inner = d.inner_radius().unwrap();
        let mut prev = 0.0;
        for k in 0..=60 {
            let eps = 0.05 * k as f64;
            let p = if dim3 { Point::spatial(inner + eps, 0.0, 0.0) } else { Point::planar(inner + eps, 0.0) };
            let m = connectivity_mass(&d, &c, p, 1e-10).unwrap();
            assert!(m >= prev - 1e-9, "{} eps {eps}", d.label());
            prev = m;
        }
    }
}

#[test]
fn numeric_pfc_never_exceeds_one_and_tends_to_it() {
    let c = ChannelModel::free_space(1.0).unwrap();
    let d = Domain::annulus(1.0, 5.0).unwrap();
    let mut prev = f64::NEG_INFINITY;
    for rho in [0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0] {
        let p = pfc_numeric(&d, &c, rho, 1e-6).unwrap();
        assert!(p <= 1.0 && p >= prev);
        prev = p;
    }
    assert!(1.0 - prev < 1e-12);
}
