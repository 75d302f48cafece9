use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use resource_kan::bf_oracle::{bf_extension, random_toy_problem, GridSpec};
use resource_kan::kan::{maximal_extension, minimal_extension, verify_reduction, ExtensionProblem, FunctorMap};
use resource_kan::lp::{exists_deterministic_map, exists_joint_stochastic_map, exists_uniform_map};
use resource_kan::pcat::{preorder_collapse, ReachabilityOracle, Variance};
use resource_kan::prob::{apply, is_deterministic, is_uniform_matrix, kl_divergence, majorizes, shannon_entropy, Dist};
use resource_kan::quantum::{
    apply_channel, eig_hermitian, embed_classical, embed_stochastic, haar_unitary, is_unital, schmidt_coefficients,
    schmidt_rank, C64,
};
use resource_kan::sample::{
    random_density, random_dist, random_doubly_stochastic, random_pure, random_stochastic,
};
use resource_kan::theories::{dist, shannon_monotone, RandUniformOracle, RAND_UNIFORM};
use resource_kan::ExtValue;

fn dist_strategy(max_len: usize) -> impl Strategy<Value = Dist> {
    prop::collection::vec(prop_oneof![4 => 0.0f64..1.0, 1 => Just(0.0)], 1..=max_len)
        .prop_filter("some mass", |w| w.iter().sum::<f64>() > 1e-3)
        .prop_map(|w| Dist::from_unnormalized(w).unwrap())
}

fn same_len_pair(max_len: usize) -> impl Strategy<Value = (Dist, Dist)> {
    (1..=max_len).prop_flat_map(|n| {
        let one = prop::collection::vec(0.0f64..1.0, n)
            .prop_filter("some mass", |w| w.iter().sum::<f64>() > 1e-3)
            .prop_map(|w| Dist::from_unnormalized(w).unwrap());
        (one.clone(), one)
    })
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn majorization_is_a_preorder(p in dist_strategy(5), seed in any::<u64>()) {
        let mut r = rng(seed);
        prop_assert!(majorizes(&p, &p));
        let n = p.len();
        let q = apply(&p, &random_doubly_stochastic(&mut r, n, 3)).unwrap();
        let s = apply(&q, &random_doubly_stochastic(&mut r, n, 3)).unwrap();
        prop_assert!(majorizes(&p, &q));
        prop_assert!(majorizes(&q, &s));
        prop_assert!(majorizes(&p, &s));
        prop_assert!(majorizes(&p, &Dist::uniform(n)));
        prop_assert!(majorizes(&Dist::point_mass(n, 0), &p));
    }

    #[test]
    fn entropy_is_bounded(p in dist_strategy(8)) {
        let h = shannon_entropy(&p).finite().unwrap();
        prop_assert!(h >= 0.0);
        prop_assert!(h <= (p.len() as f64).log2() + 1e-12);
    }

    #[test]
    fn stochastic_images_are_distributions(p in dist_strategy(6), cols in 1usize..6, seed in any::<u64>()) {
        let m = random_stochastic(&mut rng(seed), p.len(), cols);
        let q = apply(&p, &m).unwrap();
        prop_assert_eq!(q.len(), cols);
        prop_assert!((q.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(q.weights().iter().all(|&w| w >= 0.0));
    }

    #[test]
    fn kl_is_nonnegative((p, q) in same_len_pair(6)) {
        prop_assert!(kl_divergence(&p, &q).unwrap() >= ExtValue::ZERO);
        prop_assert_eq!(kl_divergence(&p, &p).unwrap(), ExtValue::ZERO);
    }

    #[test]
    fn lorenz_decision_matches_uniform_lp((p, q) in same_len_pair(5)) {
        let lp = exists_uniform_map(&p, &q).unwrap();
        prop_assert_eq!(majorizes(&p, &q), lp.is_feasible());
        if let Some(w) = lp.witness {
            prop_assert!(is_uniform_matrix(&w));
            prop_assert!(apply(&p, &w).unwrap().approx_eq(&q, 1e-8));
        }
    }

    #[test]
    fn uniform_lp_across_lengths(p in dist_strategy(4), q in dist_strategy(4)) {
        if let Some(w) = exists_uniform_map(&p, &q).unwrap().witness {
            prop_assert!(is_uniform_matrix(&w));
            prop_assert!(apply(&p, &w).unwrap().approx_eq(&q, 1e-8));
        }
    }

    #[test]
    fn deterministic_witnesses_are_functions(p in dist_strategy(6), seed in any::<u64>(), cols in 1usize..5) {
        let f = resource_kan::sample::random_deterministic(&mut rng(seed), p.len(), cols);
        let q = apply(&p, &f).unwrap();
        let res = exists_deterministic_map(&p, &q).unwrap();
        let w = res.witness.expect("a pushforward is always reachable");
        prop_assert!(is_deterministic(&w));
        prop_assert!(apply(&p, &w).unwrap().approx_eq(&q, 1e-9));
    }

    #[test]
    fn data_processing((p, q) in same_len_pair(5), cols in 1usize..5, seed in any::<u64>()) {
        let m = random_stochastic(&mut rng(seed), p.len(), cols);
        let (p2, q2) = (apply(&p, &m).unwrap(), apply(&q, &m).unwrap());
        let before = kl_divergence(&p, &q).unwrap();
        let after = kl_divergence(&p2, &q2).unwrap();
        prop_assert!(after.le_with_slack(&before, 1e-9), "{after} > {before}");
        prop_assert!(exists_joint_stochastic_map((&p, &q), (&p2, &q2)).unwrap().is_feasible());
    }

    #[test]
    fn embedding_commutes_with_processing(p in dist_strategy(4), cols in 1usize..4, seed in any::<u64>()) {
        let m = random_stochastic(&mut rng(seed), p.len(), cols);
        let via_channel = apply_channel(&embed_stochastic(&m), &embed_classical(&p)).unwrap();
        prop_assert!(via_channel.approx_eq(&embed_classical(&apply(&p, &m).unwrap()), 1e-9));
    }

    #[test]
    fn unital_iff_uniform(n in 1usize..5, seed in any::<u64>(), doubly in any::<bool>()) {
        let mut r = rng(seed);
        let m = if doubly { random_doubly_stochastic(&mut r, n, 3) } else { random_stochastic(&mut r, n, n) };
        prop_assert_eq!(is_unital(&embed_stochastic(&m)), is_uniform_matrix(&m));
    }

    #[test]
    fn schmidt_rank_survives_local_unitaries(da in 1usize..4, db in 1usize..4, seed in any::<u64>()) {
        let psi = random_pure(&mut rng(seed), (da, db));
        let moved = psi.apply_local(&haar_unitary(da, seed, 1), &haar_unitary(db, seed, 2)).unwrap();
        prop_assert_eq!(schmidt_rank(&psi).unwrap(), schmidt_rank(&moved).unwrap());
        prop_assert!(schmidt_coefficients(&psi).unwrap().approx_eq(&schmidt_coefficients(&moved).unwrap(), 1e-8));
    }

    #[test]
    fn eigendecomposition_reconstructs(d in 1usize..6, seed in any::<u64>()) {
        let rho = random_density(&mut rng(seed), d);
        let spec = eig_hermitian(&rho).unwrap();
        let lam = spec.eigenvalues.weights();
        prop_assert!(lam.windows(2).all(|w| w[0] >= w[1]));
        let v = &spec.eigenvectors;
        let mut diag = resource_kan::quantum::CMatrix::zeros(d, d);
        for i in 0..d {
            diag[(i, i)] = C64::new(lam[i], 0.0);
        }
        let back = v * diag * v.adjoint();
        prop_assert!((back - rho.matrix()).iter().all(|z| z.norm() < 1e-9));
    }

    #[test]
    fn majorization_collapse_is_transitive(seed in any::<u64>(), n in 2usize..4) {
        let mut r = rng(seed);
        let objs = (0..8).map(|_| dist(RAND_UNIFORM, random_dist(&mut r, n))).collect();
        prop_assert!(preorder_collapse(&RandUniformOracle::default(), objs).is_ok());
    }

    #[test]
    fn engine_matches_brute_force(seed in any::<u64>()) {
        let toy = random_toy_problem(&mut rng(seed));
        for y in &toy.targets {
            prop_assert_eq!(bf_extension(&toy.problem, y, true).unwrap(), minimal_extension(&toy.problem, y).unwrap().value);
            prop_assert_eq!(bf_extension(&toy.problem, y, false).unwrap(), maximal_extension(&toy.problem, y).unwrap().value);
        }
        prop_assert!(verify_reduction(&toy.problem, &toy.problem.candidates).unwrap().passed);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    // Nested simplex grids: more candidates can only move an extension outward.
    #[test]
    fn grid_refinement_is_monotone(y in dist_strategy(3), covariant in any::<bool>()) {
        let variance = if covariant { Variance::Covariant } else { Variance::Contravariant };
        let y = dist(RAND_UNIFORM, y);
        let n = y.as_dist().unwrap().len();
        let oracle: Arc<dyn ReachabilityOracle> = Arc::new(RandUniformOracle::default());
        let mut prev: Option<(ExtValue, ExtValue)> = None;
        for step in [0.5, 0.25, 0.125] {
            let cands = GridSpec::new(step).unwrap().points(n).unwrap().into_iter().map(|p| dist(RAND_UNIFORM, p)).collect();
            let prob = ExtensionProblem::new(shannon_monotone(variance), FunctorMap::identity(), oracle.clone(), cands);
            let lo = minimal_extension(&prob, &y).unwrap().value;
            let hi = maximal_extension(&prob, &y).unwrap().value;
            if let Some((plo, phi)) = prev {
                // covariant: min is an inf (falls), max a sup (rises); contravariant swaps
                if covariant {
                    prop_assert!(lo <= plo && hi >= phi);
                } else {
                    prop_assert!(lo >= plo && hi <= phi);
                }
            }
            prev = Some((lo, hi));
        }
    }
}
