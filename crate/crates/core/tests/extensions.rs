use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use resource_kan::bf_oracle::GridSpec;
use resource_kan::kan::{
    maximal_extension, minimal_extension, verify_monotonicity, verify_reduction, ExtensionProblem, FunctorMap,
};
use resource_kan::pcat::{Payload, ReachabilityOracle, ResourceRef, Variance};
use resource_kan::prob::{apply, shannon_entropy, Dist};
use resource_kan::quantum::{apply_channel, embed_classical, BipartitePure, DensityMatrix};
use resource_kan::sample::{random_density, random_dist, random_doubly_stochastic, random_unital_channel};
use resource_kan::theories::{
    classical_to_quantum, density, dist, kl_monotone, schmidt_monotone, shannon_monotone, spectral_candidates, CDistinguishOracle, PureBipLoccOracle,
    QRandQUniformOracle, RandUniformOracle, CDISTINGUISH, PUREBIP_LOCC, QRAND_QUNIFORM, RAND_UNIFORM,
};
use resource_kan::ExtValue;

fn d(w: &[f64]) -> Dist {
    Dist::new(w.to_vec()).unwrap()
}

fn h(w: &[f64]) -> f64 {
    shannon_entropy(&d(w)).finite().unwrap()
}

fn grid(n: usize, step: f64) -> Vec<ResourceRef> {
    GridSpec::new(step)
        .unwrap()
        .points(n)
        .unwrap()
        .into_iter()
        .map(|p| dist(RAND_UNIFORM, p))
        .collect()
}

fn quantum_problem(variance: Variance, candidates: Vec<ResourceRef>) -> ExtensionProblem {
    ExtensionProblem::new(
        shannon_monotone(variance),
        classical_to_quantum(),
        Arc::new(QRandQUniformOracle { witnesses: true }),
        candidates,
    )
}

fn classical_problem(variance: Variance, candidates: Vec<ResourceRef>) -> ExtensionProblem {
    ExtensionProblem::new(
        shannon_monotone(variance),
        FunctorMap::identity(),
        Arc::new(RandUniformOracle::default()),
        candidates,
    )
}

#[test]
fn shannon_along_embedding_at_maximally_mixed_qubit() {
    let prob = quantum_problem(Variance::Covariant, grid(2, 0.05));
    let y = density(QRAND_QUNIFORM, DensityMatrix::maximally_mixed(2));
    let lo = minimal_extension(&prob, &y).unwrap();
    let hi = maximal_extension(&prob, &y).unwrap();
    assert!(lo.value.approx_eq(&ExtValue::Finite(1.0), 1e-12));
    assert!(hi.value.approx_eq(&ExtValue::Finite(1.0), 1e-12));
    assert!(!lo.exact);
}

#[test]
fn shannon_along_embedding_on_fine_grid() {
    let prob = quantum_problem(Variance::Covariant, grid(2, 0.01));
    let y = density(QRAND_QUNIFORM, embed_classical(&d(&[0.9, 0.1])));
    let hi = maximal_extension(&prob, &y).unwrap().value.finite().unwrap();
    let lo = minimal_extension(&prob, &y).unwrap().value.finite().unwrap();
    // the grid contains (0.9, 0.1); neighbours differ in entropy by < 0.05
    assert!((hi - h(&[0.9, 0.1])).abs() < 1e-9);
    assert!((lo - h(&[0.9, 0.1])).abs() < 1e-9);
}

#[test]
fn spectral_candidate_makes_extension_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for dim in 2..=4 {
        let rho = random_density(&mut rng, dim);
        let target = spectral_entropy_value(&rho);
        let prob = quantum_problem(Variance::Covariant, spectral_candidates(&rho).unwrap()).complete(true);
        let y = density(QRAND_QUNIFORM, rho);
        let lo = minimal_extension(&prob, &y).unwrap();
        let hi = maximal_extension(&prob, &y).unwrap();
        assert!(lo.exact && hi.exact);
        assert!(lo.value.approx_eq(&target, 1e-9));
        assert!(hi.value.approx_eq(&target, 1e-9));
        assert!(lo.witness.unwrap().transformation.is_some());
    }
}

fn spectral_entropy_value(rho: &DensityMatrix) -> ExtValue {
    resource_kan::quantum::spectral_entropy(rho).unwrap()
}

#[test]
fn contravariant_shannon_from_uniform_has_empty_admissible_set() {
    let prob = classical_problem(
        Variance::Contravariant,
        vec![dist(RAND_UNIFORM, d(&[1.0, 0.0])), dist(RAND_UNIFORM, d(&[0.75, 0.25]))],
    );
    let res = minimal_extension(&prob, &dist(RAND_UNIFORM, d(&[0.5, 0.5]))).unwrap();
    assert_eq!(res.value, ExtValue::ZERO);
    assert!(res.witness.is_none());
}

#[test]
fn schmidt_extensions_at_bell_target() {
    let bell = ResourceRef::new(PUREBIP_LOCC, Payload::Pure(BipartitePure::maximally_entangled((2, 2), 2).unwrap()));
    let product = ResourceRef::new(
        PUREBIP_LOCC,
        Payload::Pure(BipartitePure::from_real(&[1.0, 0.0, 0.0, 0.0], (2, 2)).unwrap()),
    );
    let prob = ExtensionProblem::new(
        schmidt_monotone(),
        FunctorMap::identity(),
        Arc::new(PureBipLoccOracle),
        vec![product, bell.clone()],
    );
    let hi = maximal_extension(&prob, &bell).unwrap();
    assert_eq!(hi.value, ExtValue::Finite(2.0));
    assert_eq!(hi.witness.unwrap().candidate_index, 1);
    // Bell reaches both candidates; the op-monotone minimal extension takes the sup
    assert_eq!(minimal_extension(&prob, &bell).unwrap().value, ExtValue::Finite(2.0));
}

#[test]
fn reduction_is_tight_for_identity_and_embedding() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let samples: Vec<ResourceRef> = (0..10).map(|_| dist(RAND_UNIFORM, random_dist(&mut rng, 3))).collect();
    let report = verify_reduction(&classical_problem(Variance::Covariant, samples.clone()), &samples).unwrap();
    assert!(report.passed && report.entries.iter().all(|e| e.tight));
    let report = verify_reduction(&quantum_problem(Variance::Covariant, samples.clone()), &samples).unwrap();
    assert!(report.passed && report.entries.iter().all(|e| e.tight));
}

#[test]
fn reduction_for_kl_under_joint_processing() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let pairs: Vec<ResourceRef> = (0..8)
        .map(|_| {
            let (p, q) = (random_dist(&mut rng, 2), random_dist(&mut rng, 2));
            ResourceRef::new(CDISTINGUISH, Payload::DistPair(p, q))
        })
        .collect();
    let prob = ExtensionProblem::new(kl_monotone(), FunctorMap::identity(), Arc::new(CDistinguishOracle), pairs.clone());
    let report = verify_reduction(&prob, &pairs).unwrap();
    assert!(report.passed && report.entries.iter().all(|e| e.tight));
}

#[test]
fn reduction_holds_with_extra_candidates() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let samples: Vec<ResourceRef> = (0..10).map(|_| dist(RAND_UNIFORM, random_dist(&mut rng, 2))).collect();
    let mut cands = grid(2, 0.1);
    cands.extend(samples.iter().cloned());
    let report = verify_reduction(&quantum_problem(Variance::Covariant, cands), &samples).unwrap();
    assert!(report.passed && report.entries.iter().all(|e| e.tight));
}

#[test]
fn reduction_can_fail_when_sample_is_not_a_candidate() {
    // (0.7, 0.3) reaches no point of the coarse grid except the uniform one,
    // whose entropy exceeds H(0.7, 0.3)
    let prob = classical_problem(Variance::Covariant, grid(2, 0.5));
    let sample = dist(RAND_UNIFORM, d(&[0.7, 0.3]));
    let report = verify_reduction(&prob, &[sample]).unwrap();
    assert!(!report.passed);
    assert_eq!(report.entries[0].minimal, ExtValue::Finite(1.0));
}

#[test]
fn extensions_grow_along_unital_channels() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let prob = quantum_problem(Variance::Covariant, grid(2, 0.02));
    let pairs: Vec<_> = (0..10)
        .map(|_| {
            let rho = random_density(&mut rng, 2);
            let out = apply_channel(&random_unital_channel(&mut rng, 2, 3), &rho).unwrap();
            (density(QRAND_QUNIFORM, rho), density(QRAND_QUNIFORM, out))
        })
        .collect();
    let report = verify_monotonicity(&prob, &pairs).unwrap();
    assert!(report.passed, "{:?}", report.violations);
    assert_eq!(report.checked, 10);
}

#[test]
fn contravariant_extensions_shrink_along_uniform_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let prob = classical_problem(Variance::Contravariant, grid(3, 0.1));
    let pairs: Vec<_> = (0..10)
        .map(|_| {
            let p = random_dist(&mut rng, 3);
            let pu = apply(&p, &random_doubly_stochastic(&mut rng, 3, 2)).unwrap();
            (dist(RAND_UNIFORM, p), dist(RAND_UNIFORM, pu))
        })
        .collect();
    assert!(verify_monotonicity(&prob, &pairs).unwrap().passed);
}

#[test]
fn monotonicity_rejects_non_free_pairs() {
    let prob = classical_problem(Variance::Covariant, grid(2, 0.5));
    let pair = (dist(RAND_UNIFORM, d(&[0.5, 0.5])), dist(RAND_UNIFORM, d(&[1.0, 0.0])));
    assert!(verify_monotonicity(&prob, &[pair]).is_err());
}

#[test]
fn kind_mismatch_is_reported() {
    let prob = quantum_problem(Variance::Covariant, grid(2, 0.5));
    assert!(minimal_extension(&prob, &dist(RAND_UNIFORM, d(&[0.5, 0.5]))).is_err());
    let oracle = QRandQUniformOracle::default();
    assert!(oracle.check_kind(&dist(RAND_UNIFORM, d(&[1.0]))).is_err());
}

#[test]
fn extension_result_json() {
    let empty = classical_problem(Variance::Contravariant, vec![]);
    let y = dist(RAND_UNIFORM, d(&[0.5, 0.5]));
    let hi = serde_json::to_value(maximal_extension(&empty, &y).unwrap()).unwrap();
    assert_eq!(hi, serde_json::json!({"value": "inf", "examined": 0, "exact": false}));
    let lo = serde_json::to_value(minimal_extension(&empty.complete(true), &y).unwrap()).unwrap();
    assert_eq!(lo, serde_json::json!({"value": 0.0, "examined": 0, "exact": true}));
}
