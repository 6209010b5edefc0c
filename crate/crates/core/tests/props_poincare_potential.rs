mod common;

use common::*;
use epschain::chain::step_integral;
use epschain::poincare::{chain_width, pointwise_pi_check, riesz_weights};
use epschain::potential::{chain_potential, potential_gradient_check, PotentialSpec};
use epschain::space::{build_epsilon_graph, default_radii, doubling_constant, joining_scale, Metric, PointCloudSpace};
use epschain::{slope_field, Error, ScalarField};
use proptest::prelude::*;

fn arb_with_g(max_n: usize) -> impl Strategy<Value = (PointCloudSpace, Vec<f64>)> {
    arb_space(max_n).prop_flat_map(|s| {
        let n = s.len();
        (Just(s), proptest::collection::vec(0u32..6, n))
    })
    .prop_map(|(s, g)| (s, g.into_iter().map(|v| v as f64 / 2.0).collect()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn riesz_mass_is_doubling_bounded(s in arb_space(8), x in 0usize..8, dy in 1usize..8, l in prop::sample::select(vec![1.0, 2.0, 3.0])) {
        let n = s.len();
        let (x, y) = (x % n, (x + dy) % n);
        prop_assume!(x != y);
        let cd = doubling_constant(&s, &default_radii(&s)).unwrap().constant;
        let r = riesz_weights(&s, x, y, l).unwrap();
        prop_assert_eq!(r.weights[x], 0.0);
        prop_assert_eq!(r.weights[y], 0.0);
        prop_assert!(r.total <= 8.0 * cd * l * s.dist(x, y));
    }

    #[test]
    fn pointwise_lhs_is_monotone((s, g) in arb_with_g(6), x in 0usize..6, dy in 1usize..6) {
        let n = s.len();
        let (x, y) = (x % n, (x + dy) % n);
        prop_assume!(x != y);
        let eps = joining_scale(&s, x, y).unwrap() * 1.5;
        let lhs = |c: f64, e: f64| match pointwise_pi_check(&s, x, y, &g, 1.0, c, 1.0, 0.5, Some(e), None) {
            Ok(r) => r.lhs,
            Err(Error::NoChainWithinBudget { .. }) => f64::INFINITY,
            Err(e) => panic!("{e}"),
        };
        let mut prev = f64::INFINITY;
        for c in [1.0, 1.5, 2.0, 4.0] {
            let v = lhs(c, eps);
            prop_assert!(v <= prev);
            prev = v;
            prop_assert!(lhs(c, eps / 1.5) >= v);
        }
    }

    #[test]
    fn width_is_below_any_chain((s, g) in arb_with_g(6), walk in proptest::collection::vec(0usize..64, 1..6)) {
        let n = s.len();
        let eps = connecting_eps(&s);
        let a: Vec<usize> = (0..n).filter(|&i| g[i] > 1.0).collect();
        let chi: Vec<f64> = (0..n).map(|i| if a.contains(&i) { 1.0 } else { 0.0 }).collect();
        let graph = build_epsilon_graph(&s, eps).unwrap();
        let mut chain = vec![0];
        for k in walk {
            let nb = graph.neighbors(*chain.last().unwrap());
            chain.push(nb[k % nb.len()].0);
        }
        let end = *chain.last().unwrap();
        prop_assume!(end != 0);
        let w = chain_width(&s, 0, end, &a, eps).unwrap();
        prop_assert!(w <= chain_cost(&s, &chi, 0.5, &chain) + 1e-12);
    }

    #[test]
    fn potential_contract((s, g) in arb_with_g(8), seeds in proptest::collection::vec(0usize..8, 1..4), vals in proptest::collection::vec(-4i32..4, 4), lambda in prop::sample::select(vec![0.0, 0.5, 1.0]), cap in prop::option::of(0u32..6), shift in -3i32..3) {
        let n = s.len();
        let mut seeds: Vec<usize> = seeds.iter().map(|i| i % n).collect();
        seeds.sort_unstable();
        seeds.dedup();
        let values: Vec<f64> = seeds.iter().zip(&vals).map(|(_, &v)| v as f64).collect();
        let eps = connecting_eps(&s) * 1.2;
        let spec = PotentialSpec { seeds: seeds.clone(), values: values.clone(), g: g.clone(), eps, lambda, cap: cap.map(|c| c as f64) };
        prop_assert!(potential_gradient_check(&s, &spec, 1e-12).unwrap().accepted);

        let pot = chain_potential(&s, &spec).unwrap().values;
        let graph = build_epsilon_graph(&s, eps).unwrap();
        for (i, j, d) in graph.edges() {
            prop_assert!(pot[j] <= pot[i] + step_integral(g[i], g[j], lambda, d));
        }

        let free = PotentialSpec { cap: None, ..spec.clone() };
        let base = chain_potential(&s, &free).unwrap().values;
        let moved = PotentialSpec { values: values.iter().map(|v| v + shift as f64).collect(), ..free };
        let up = chain_potential(&s, &moved).unwrap().values;
        for (a, b) in base.iter().zip(&up) {
            prop_assert!((b - a - shift as f64).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }

    #[test]
    fn potential_from_everywhere_is_below_u(s in arb_space(8), u in proptest::collection::vec(-8i32..8, 8)) {
        let n = s.len();
        let u: Vec<f64> = u[..n].iter().map(|&v| v as f64 / 4.0).collect();
        let eps = connecting_eps(&s);
        let g = slope_field(&s, &ScalarField::function(u.clone()).unwrap(), eps).unwrap();
        let spec = PotentialSpec { seeds: (0..n).collect(), values: u.clone(), g: g.values().to_vec(), eps, lambda: 0.5, cap: None };
        let pot = chain_potential(&s, &spec).unwrap().values;
        for (p, v) in pot.iter().zip(&u) {
            prop_assert!(p <= v);
        }
    }
}
