//! The concrete resource theories, their monotones and the functors between them.
//!
//! | id                       | objects              | free transformations                  |
//! |--------------------------|----------------------|---------------------------------------|
//! | `rand_detmn`             | distributions        | deterministic maps                    |
//! | `rand_uniform`           | distributions        | uniform (uniform-preserving) matrices |
//! | `qrand_quniform`         | density matrices     | unital channels                       |
//! | `cdistinguish`           | distribution pairs   | one stochastic map applied to both    |
//! | `distinguish_restricted` | density-matrix pairs | one channel applied to both           |
//! | `purebip_locc`           | pure bipartite       | LOCC                                  |

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::kan::FunctorMap;
use crate::lp::{exists_deterministic_map, exists_joint_stochastic_map, exists_uniform_map};
use crate::pcat::{
    Decision, MonotoneSpec, ObjectKind, Payload, ReachabilityOracle, ResourceRef, Transformation, Variance,
};
use crate::prob::{kl_divergence, majorizes, shannon_entropy, Dist, StochMatrix};
use crate::quantum::{
    eig_hermitian, embed_classical, embed_stochastic, hermitian_eigen, locc_convertible_pure, schmidt_rank,
    spectral_entropy, CMatrix, DensityMatrix, KrausChannel, Spectrum, C64,
};
use crate::value::ExtValue;

pub const RAND_DETMN: &str = "rand_detmn";
pub const RAND_UNIFORM: &str = "rand_uniform";
pub const QRAND_QUNIFORM: &str = "qrand_quniform";
pub const CDISTINGUISH: &str = "cdistinguish";
pub const DISTINGUISH_RESTRICTED: &str = "distinguish_restricted";
pub const PUREBIP_LOCC: &str = "purebip_locc";

pub fn dist(theory: &str, p: Dist) -> ResourceRef {
    ResourceRef::new(theory, Payload::Dist(p))
}

pub fn density(theory: &str, rho: DensityMatrix) -> ResourceRef {
    ResourceRef::new(theory, Payload::Density(rho))
}

fn same_object(a: &ResourceRef, b: &ResourceRef) -> Option<Decision> {
    (a.payload == b.payload).then(|| Decision::reachable(Some(Transformation::Identity), true))
}

/// Deterministic maps between distributions.
#[derive(Debug, Clone, Copy, Default)]
pub struct RandDetmnOracle;

impl ReachabilityOracle for RandDetmnOracle {
    fn kind(&self) -> ObjectKind {
        ObjectKind::Dist
    }

    fn is_exact(&self) -> bool {
        true
    }

    fn decide(&self, from: &ResourceRef, to: &ResourceRef) -> Result<Decision> {
        let (p, q) = (from.as_dist()?, to.as_dist()?);
        if let Some(d) = same_object(from, to) {
            return Ok(d);
        }
        let res = exists_deterministic_map(p, q)?;
        Ok(match res.witness {
            Some(m) => Decision::reachable(Some(Transformation::Stochastic(m)), true),
            None => Decision::unreachable(true),
        })
    }
}

/// Uniform matrices between distributions, i.e. majorization for equal lengths.
#[derive(Debug, Clone, Copy, Default)]
pub struct RandUniformOracle {
    /// Solve for an explicit uniform matrix when reachable.
    pub witnesses: bool,
}

impl ReachabilityOracle for RandUniformOracle {
    fn kind(&self) -> ObjectKind {
        ObjectKind::Dist
    }

    fn is_exact(&self) -> bool {
        true
    }

    fn decide(&self, from: &ResourceRef, to: &ResourceRef) -> Result<Decision> {
        let (p, q) = (from.as_dist()?, to.as_dist()?);
        if let Some(d) = same_object(from, to) {
            return Ok(d);
        }
        if p.len() == q.len() && !self.witnesses {
            return Ok(if majorizes(p, q) {
                Decision::reachable(None, true)
            } else {
                Decision::unreachable(true)
            });
        }
        if p.len() == q.len() && !majorizes(p, q) {
            return Ok(Decision::unreachable(true));
        }
        let res = exists_uniform_map(p, q)?;
        Ok(match res.witness {
            Some(u) => Decision::reachable(Some(Transformation::Stochastic(u)), true),
            // majorization holds with slack but the solver found no matrix
            None if p.len() == q.len() => Decision::reachable(None, true),
            None => Decision::unreachable(true),
        })
    }
}

/// Unital channels between density matrices.
///
/// A unital channel `ρ → σ` exists iff a uniform matrix carries the spectrum
/// of `ρ` to that of `σ`: conjugating such a matrix's Kraus form by the two
/// eigenbases gives the channel, and conversely `T_ij = ⟨f_j|Φ(|e_i⟩⟨e_i|)|f_j⟩`
/// is uniform. For equal dimensions this is majorization of spectra.
#[derive(Debug, Clone, Copy, Default)]
pub struct QRandQUniformOracle {
    pub witnesses: bool,
}

fn conjugated_channel(m: &StochMatrix, input: &Spectrum, output: &Spectrum) -> KrausChannel {
    let ops = embed_stochastic(m)
        .kraus_ops()
        .iter()
        .map(|b| &output.eigenvectors * b * input.eigenvectors.adjoint())
        .collect();
    KrausChannel::new(ops).expect("unitary conjugation keeps trace preservation")
}

impl ReachabilityOracle for QRandQUniformOracle {
    fn kind(&self) -> ObjectKind {
        ObjectKind::Density
    }

    fn is_exact(&self) -> bool {
        true
    }

    fn decide(&self, from: &ResourceRef, to: &ResourceRef) -> Result<Decision> {
        let (rho, sigma) = (from.as_density()?, to.as_density()?);
        if let Some(d) = same_object(from, to) {
            return Ok(d);
        }
        let (sr, ss) = (eig_hermitian(rho)?, eig_hermitian(sigma)?);
        let (lr, ls) = (&sr.eigenvalues, &ss.eigenvalues);
        if lr.len() == ls.len() && !majorizes(lr, ls) {
            return Ok(Decision::unreachable(true));
        }
        if lr.len() == ls.len() && !self.witnesses {
            return Ok(Decision::reachable(None, true));
        }
        let res = exists_uniform_map(lr, ls)?;
        Ok(match res.witness {
            Some(u) => Decision::reachable(
                Some(Transformation::Channel(conjugated_channel(&u, &sr, &ss))),
                true,
            ),
            None if lr.len() == ls.len() => Decision::reachable(None, true),
            None => Decision::unreachable(true),
        })
    }
}

/// One stochastic map processing both members of a distribution pair.
#[derive(Debug, Clone, Copy, Default)]
pub struct CDistinguishOracle;

impl ReachabilityOracle for CDistinguishOracle {
    fn kind(&self) -> ObjectKind {
        ObjectKind::DistPair
    }

    fn is_exact(&self) -> bool {
        true
    }

    fn decide(&self, from: &ResourceRef, to: &ResourceRef) -> Result<Decision> {
        let (pair, target) = (from.as_dist_pair()?, to.as_dist_pair()?);
        if let Some(d) = same_object(from, to) {
            return Ok(d);
        }
        let res = exists_joint_stochastic_map(pair, target)?;
        Ok(match res.witness {
            Some(m) => Decision::reachable(Some(Transformation::Stochastic(m)), true),
            None => Decision::unreachable(true),
        })
    }
}

/// One channel processing both members of a density-matrix pair, searched
/// over a restricted family: identity, replacement channels, and stochastic
/// maps between commuting pairs in their joint eigenbases. A negative answer
/// only means no channel in that family was found.
#[derive(Debug, Clone, Copy, Default)]
pub struct DistinguishRestrictedOracle;

const COMMUTE_TOL: f64 = 1e-9;

// An eigenbasis shared by both states, if they commute.
fn joint_eigenbasis(a: &DensityMatrix, b: &DensityMatrix) -> Result<Option<CMatrix>> {
    // eigenvectors of a generic combination diagonalize both when [a, b] = 0
    let mix = a.matrix() + b.matrix() * C64::new(std::f64::consts::FRAC_1_SQRT_2 * 1.1, 0.0);
    let (_, v) = hermitian_eigen(&mix)?;
    let diagonal = |m: &CMatrix| {
        let t = v.adjoint() * m * &v;
        (0..t.nrows()).all(|i| (0..t.ncols()).all(|j| i == j || t[(i, j)].norm() <= COMMUTE_TOL))
    };
    Ok((diagonal(a.matrix()) && diagonal(b.matrix())).then_some(v))
}

fn diagonal_in(v: &CMatrix, rho: &DensityMatrix) -> Result<Dist> {
    let t = v.adjoint() * rho.matrix() * v;
    Dist::from_unnormalized((0..t.nrows()).map(|i| t[(i, i)].re).collect())
}

impl ReachabilityOracle for DistinguishRestrictedOracle {
    fn kind(&self) -> ObjectKind {
        ObjectKind::DensityPair
    }

    fn is_exact(&self) -> bool {
        false
    }

    fn decide(&self, from: &ResourceRef, to: &ResourceRef) -> Result<Decision> {
        let (rho, sigma) = from.as_density_pair()?;
        let (rho2, sigma2) = to.as_density_pair()?;
        if rho.dim() != sigma.dim() || rho2.dim() != sigma2.dim() {
            return Err(Error::Input("pair members must share a dimension".into()));
        }
        if rho.approx_eq(rho2, 1e-12) && sigma.approx_eq(sigma2, 1e-12) {
            return Ok(Decision::reachable(Some(Transformation::Identity), true));
        }
        if rho2.approx_eq(sigma2, 1e-12) {
            let chan = KrausChannel::replacement(rho.dim(), rho2)?;
            return Ok(Decision::reachable(Some(Transformation::Channel(chan)), true));
        }
        let (Some(vin), Some(vout)) = (joint_eigenbasis(rho, sigma)?, joint_eigenbasis(rho2, sigma2)?) else {
            return Ok(Decision::unreachable(false));
        };
        let (p, q) = (diagonal_in(&vin, rho)?, diagonal_in(&vin, sigma)?);
        let (p2, q2) = (diagonal_in(&vout, rho2)?, diagonal_in(&vout, sigma2)?);
        let res = exists_joint_stochastic_map((&p, &q), (&p2, &q2))?;
        let Some(m) = res.witness else {
            return Ok(Decision::unreachable(false));
        };
        let ops = embed_stochastic(&m)
            .kraus_ops()
            .iter()
            .map(|b| &vout * b * vin.adjoint())
            .collect();
        let chan = KrausChannel::new(ops)?;
        Ok(Decision::reachable(Some(Transformation::Channel(chan)), true))
    }
}

/// LOCC between pure bipartite states, by Nielsen's majorization criterion.
#[derive(Debug, Clone, Copy, Default)]
pub struct PureBipLoccOracle;

impl ReachabilityOracle for PureBipLoccOracle {
    fn kind(&self) -> ObjectKind {
        ObjectKind::Pure
    }

    fn is_exact(&self) -> bool {
        true
    }

    fn decide(&self, from: &ResourceRef, to: &ResourceRef) -> Result<Decision> {
        let (phi, psi) = (from.as_pure()?, to.as_pure()?);
        if let Some(d) = same_object(from, to) {
            return Ok(d);
        }
        Ok(if locc_convertible_pure(phi, psi)? {
            Decision::reachable(
                Some(Transformation::Criterion("schmidt coefficients majorized".into())),
                true,
            )
        } else {
            Decision::unreachable(true)
        })
    }
}

/// Shannon entropy on distributions: covariant under uniform matrices,
/// contravariant under deterministic maps.
pub fn shannon_monotone(variance: Variance) -> MonotoneSpec {
    MonotoneSpec::new("shannon", variance, |x| Ok(shannon_entropy(x.as_dist()?)))
}

/// Spectral entropy of density matrices.
pub fn spectral_entropy_monotone(variance: Variance) -> MonotoneSpec {
    MonotoneSpec::new("spectral_entropy", variance, |x| spectral_entropy(x.as_density()?))
}

/// KL divergence of a distribution pair, an op-monotone under joint processing.
pub fn kl_monotone() -> MonotoneSpec {
    MonotoneSpec::new("kl", Variance::Contravariant, |x| {
        let (p, q) = x.as_dist_pair()?;
        kl_divergence(p, q)
    })
}

/// Schmidt rank of a pure bipartite state, an op-monotone under LOCC.
pub fn schmidt_monotone() -> MonotoneSpec {
    MonotoneSpec::new("schmidt_rank", Variance::Contravariant, |x| {
        Ok(ExtValue::Finite(schmidt_rank(x.as_pure()?)? as f64))
    })
}

pub fn monotone_by_id(id: &str, variance: Option<Variance>) -> Result<MonotoneSpec> {
    match id {
        "shannon" => Ok(shannon_monotone(variance.unwrap_or(Variance::Covariant))),
        "spectral_entropy" => Ok(spectral_entropy_monotone(variance.unwrap_or(Variance::Covariant))),
        "kl" => Ok(kl_monotone()),
        "schmidt" | "schmidt_rank" => Ok(schmidt_monotone()),
        other => Err(Error::UnknownId(format!("monotone {other}"))),
    }
}

/// The diagonal embedding of classical theories into quantum ones:
/// distributions go to `qrand_quniform`, pairs to `distinguish_restricted`.
pub fn classical_to_quantum() -> FunctorMap {
    FunctorMap::new("classical_to_quantum", |x| match &x.payload {
        Payload::Dist(p) => Ok(density(QRAND_QUNIFORM, embed_classical(p))),
        Payload::DistPair(p, q) => Ok(ResourceRef::new(
            DISTINGUISH_RESTRICTED,
            Payload::DensityPair(embed_classical(p), embed_classical(q)),
        )),
        other => Err(Error::KindMismatch {
            expected: "dist or dist_pair",
            got: other.kind().name(),
        }),
    })
}

pub fn functor_by_id(id: &str) -> Result<FunctorMap> {
    match id {
        "identity" => Ok(FunctorMap::identity()),
        "classical_to_quantum" | "i" => Ok(classical_to_quantum()),
        other => Err(Error::UnknownId(format!("functor {other}"))),
    }
}

/// The classical distribution on the spectrum of `rho`, as a `rand_uniform`
/// object. Along the diagonal embedding it attains both Shannon extensions.
pub fn spectral_candidates(rho: &DensityMatrix) -> Result<Vec<ResourceRef>> {
    Ok(vec![dist(RAND_UNIFORM, eig_hermitian(rho)?.eigenvalues)])
}

#[derive(Clone)]
pub struct TheoryEntry {
    pub id: &'static str,
    pub kind: ObjectKind,
    pub exact: bool,
    pub description: &'static str,
    pub oracle: Arc<dyn ReachabilityOracle>,
}

/// Immutable lookup of theories by id.
#[derive(Clone)]
pub struct TheoryRegistry {
    entries: BTreeMap<&'static str, TheoryEntry>,
}

impl TheoryRegistry {
    pub fn standard() -> Self {
        let list: [(&'static str, &'static str, Arc<dyn ReachabilityOracle>); 6] = [
            (RAND_DETMN, "distributions under deterministic maps", Arc::new(RandDetmnOracle)),
            (
                RAND_UNIFORM,
                "distributions under uniform matrices",
                Arc::new(RandUniformOracle { witnesses: true }),
            ),
            (
                QRAND_QUNIFORM,
                "density matrices under unital channels",
                Arc::new(QRandQUniformOracle { witnesses: true }),
            ),
            (CDISTINGUISH, "distribution pairs under joint stochastic processing", Arc::new(CDistinguishOracle)),
            (
                DISTINGUISH_RESTRICTED,
                "density-matrix pairs under a restricted channel family",
                Arc::new(DistinguishRestrictedOracle),
            ),
            (PUREBIP_LOCC, "pure bipartite states under LOCC", Arc::new(PureBipLoccOracle)),
        ];
        let entries = list
            .into_iter()
            .map(|(id, description, oracle)| {
                let entry = TheoryEntry {
                    id,
                    kind: oracle.kind(),
                    exact: oracle.is_exact(),
                    description,
                    oracle,
                };
                (id, entry)
            })
            .collect();
        TheoryRegistry { entries }
    }

    pub fn get(&self, id: &str) -> Result<&TheoryEntry> {
        self.entries
            .get(id)
            .ok_or_else(|| Error::UnknownId(format!("theory {id}")))
    }

    pub fn ids(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries.keys().copied()
    }

    /// Parses a JSON object for theory `id`.
    pub fn object(&self, id: &str, value: &serde_json::Value) -> Result<ResourceRef> {
        let entry = self.get(id)?;
        Ok(ResourceRef::new(entry.id, Payload::from_json(entry.kind, value)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{apply_channel, haar_unitary, is_unital, BipartitePure};

    fn d(w: &[f64]) -> Dist {
        Dist::new(w.to_vec()).unwrap()
    }

    fn rd(w: &[f64]) -> ResourceRef {
        dist(RAND_UNIFORM, d(w))
    }

    fn pair(p: &[f64], q: &[f64]) -> ResourceRef {
        ResourceRef::new(CDISTINGUISH, Payload::DistPair(d(p), d(q)))
    }

    #[test]
    fn detmn_examples() {
        let o = RandDetmnOracle;
        assert!(o.decide(&rd(&[0.2, 0.3, 0.5]), &rd(&[1.0])).unwrap().reachable);
        assert!(o.decide(&rd(&[0.5, 0.5]), &rd(&[0.5, 0.5])).unwrap().reachable);
        assert!(!o.decide(&rd(&[0.5, 0.5]), &rd(&[0.7, 0.3])).unwrap().reachable);
        assert!(o.decide(&rd(&[1.0; 13].map(|x| x / 13.0)), &rd(&[1.0])).is_err());
    }

    #[test]
    fn uniform_examples() {
        for o in [RandUniformOracle { witnesses: false }, RandUniformOracle { witnesses: true }] {
            let p = rd(&[0.6, 0.4]);
            let same = o.decide(&p, &p).unwrap();
            assert!(same.reachable && matches!(same.witness, Some(Transformation::Identity)));
            assert!(o.decide(&rd(&[0.7, 0.3]), &rd(&[0.5, 0.5])).unwrap().reachable);
            assert!(!o.decide(&rd(&[0.5, 0.5]), &rd(&[0.7, 0.3])).unwrap().reachable);
        }
        let o = RandUniformOracle { witnesses: true };
        let dec = o.decide(&rd(&[0.7, 0.3]), &rd(&[0.6, 0.4])).unwrap();
        match dec.witness {
            Some(Transformation::Stochastic(u)) => assert!(crate::prob::is_uniform_matrix(&u)),
            other => panic!("expected a uniform matrix, got {other:?}"),
        }
        // across lengths the LP decides
        assert!(o.decide(&rd(&[0.25, 0.25, 0.25, 0.25]), &rd(&[0.5, 0.5])).unwrap().reachable);
        assert!(!o.decide(&rd(&[1.0, 0.0]), &rd(&[1.0, 0.0, 0.0, 0.0])).unwrap().reachable);
    }

    #[test]
    fn unital_examples() {
        let o = QRandQUniformOracle { witnesses: true };
        let pure = density(QRAND_QUNIFORM, embed_classical(&d(&[1.0, 0.0])));
        let mixed = density(QRAND_QUNIFORM, DensityMatrix::maximally_mixed(2));
        assert!(o.decide(&pure, &pure).unwrap().reachable);
        let dec = o.decide(&pure, &mixed).unwrap();
        assert!(dec.reachable);
        assert!(!o.decide(&mixed, &pure).unwrap().reachable);
        match dec.witness {
            Some(Transformation::Channel(chan)) => {
                assert!(is_unital(&chan));
                let out = apply_channel(&chan, pure.as_density().unwrap()).unwrap();
                assert!(out.approx_eq(mixed.as_density().unwrap(), 1e-9));
            }
            other => panic!("expected a channel, got {other:?}"),
        }
    }

    #[test]
    fn unital_witness_on_rotated_states() {
        let o = QRandQUniformOracle { witnesses: true };
        let rho = embed_classical(&d(&[0.7, 0.2, 0.1])).conjugate(&haar_unitary(3, 1, 0)).unwrap();
        let sigma = embed_classical(&d(&[0.5, 0.3, 0.2])).conjugate(&haar_unitary(3, 2, 0)).unwrap();
        let dec = o
            .decide(&density(QRAND_QUNIFORM, rho.clone()), &density(QRAND_QUNIFORM, sigma.clone()))
            .unwrap();
        let Some(Transformation::Channel(chan)) = dec.witness else {
            panic!("no witness")
        };
        assert!(is_unital(&chan));
        assert!(apply_channel(&chan, &rho).unwrap().approx_eq(&sigma, 1e-9));
    }

    #[test]
    fn unital_across_dimensions() {
        let o = QRandQUniformOracle { witnesses: true };
        let big = density(QRAND_QUNIFORM, DensityMatrix::maximally_mixed(4));
        let small = density(QRAND_QUNIFORM, DensityMatrix::maximally_mixed(2));
        let pure2 = density(QRAND_QUNIFORM, embed_classical(&d(&[1.0, 0.0])));
        assert!(o.decide(&big, &small).unwrap().reachable);
        assert!(o.decide(&small, &big).unwrap().reachable);
        assert!(!o.decide(&big, &pure2).unwrap().reachable);
    }

    #[test]
    fn unital_agrees_with_classical_on_diagonals() {
        let qo = QRandQUniformOracle { witnesses: false };
        let co = RandUniformOracle { witnesses: false };
        let pts = [[0.5, 0.5], [0.7, 0.3], [1.0, 0.0], [0.1, 0.9], [0.35, 0.65]];
        for a in &pts {
            for b in &pts {
                let classical = co.decide(&rd(a), &rd(b)).unwrap().reachable;
                let quantum = qo
                    .decide(
                        &density(QRAND_QUNIFORM, embed_classical(&d(a))),
                        &density(QRAND_QUNIFORM, embed_classical(&d(b))),
                    )
                    .unwrap()
                    .reachable;
                assert_eq!(classical, quantum, "{a:?} -> {b:?}");
            }
        }
    }

    #[test]
    fn cdistinguish_examples() {
        let o = CDistinguishOracle;
        let a = pair(&[0.9, 0.1], &[0.1, 0.9]);
        assert!(o.decide(&a, &a).unwrap().reachable);
        assert!(o.decide(&a, &pair(&[0.5, 0.5], &[0.5, 0.5])).unwrap().reachable);
        assert!(!o.decide(&a, &pair(&[1.0, 0.0], &[0.0, 1.0])).unwrap().reachable);
    }

    #[test]
    fn distinguish_restricted_certifies_only() {
        let o = DistinguishRestrictedOracle;
        assert!(!o.is_exact());
        let i = classical_to_quantum();
        let a = i.map_object(&pair(&[0.9, 0.1], &[0.1, 0.9])).unwrap();
        let b = i.map_object(&pair(&[0.6, 0.4], &[0.4, 0.6])).unwrap();
        let dec = o.decide(&a, &b).unwrap();
        assert!(dec.reachable && dec.exact);
        let Some(Transformation::Channel(chan)) = dec.witness else {
            panic!("no channel")
        };
        let (r, s) = a.as_density_pair().unwrap();
        let (r2, s2) = b.as_density_pair().unwrap();
        assert!(apply_channel(&chan, r).unwrap().approx_eq(r2, 1e-9));
        assert!(apply_channel(&chan, s).unwrap().approx_eq(s2, 1e-9));

        let back = o.decide(&b, &a).unwrap();
        assert!(!back.reachable && !back.exact);

        // rotated commuting pair into a replacement target
        let u = haar_unitary(2, 3, 0);
        let rot = ResourceRef::new(
            DISTINGUISH_RESTRICTED,
            Payload::DensityPair(
                embed_classical(&d(&[0.8, 0.2])).conjugate(&u).unwrap(),
                embed_classical(&d(&[0.3, 0.7])).conjugate(&u).unwrap(),
            ),
        );
        let same = ResourceRef::new(
            DISTINGUISH_RESTRICTED,
            Payload::DensityPair(DensityMatrix::maximally_mixed(2), DensityMatrix::maximally_mixed(2)),
        );
        assert!(o.decide(&rot, &same).unwrap().reachable);
        assert!(o.decide(&rot, &b).unwrap().reachable);
    }

    #[test]
    fn locc_examples() {
        let o = PureBipLoccOracle;
        let bell = ResourceRef::new(PUREBIP_LOCC, Payload::Pure(BipartitePure::maximally_entangled((2, 2), 2).unwrap()));
        let prod = ResourceRef::new(
            PUREBIP_LOCC,
            Payload::Pure(BipartitePure::from_real(&[1.0, 0.0, 0.0, 0.0], (2, 2)).unwrap()),
        );
        assert!(o.decide(&bell, &bell).unwrap().reachable);
        assert!(o.decide(&bell, &prod).unwrap().reachable);
        assert!(!o.decide(&prod, &bell).unwrap().reachable);
    }

    #[test]
    fn functor_i_examples() {
        let i = classical_to_quantum();
        let img = i.map_object(&rd(&[1.0, 0.0])).unwrap();
        assert_eq!(img.theory_id, QRAND_QUNIFORM);
        assert_eq!(img.as_density().unwrap().diagonal(), vec![1.0, 0.0]);
        let img = i.map_object(&pair(&[0.5, 0.5], &[1.0, 0.0])).unwrap();
        let (a, b) = img.as_density_pair().unwrap();
        assert_eq!(a.diagonal(), vec![0.5, 0.5]);
        assert_eq!(b.diagonal(), vec![1.0, 0.0]);
        assert!(a.is_diagonal(0.0) && b.is_diagonal(0.0));
        assert_eq!(i.map_object(&rd(&[0.2, 0.8])).unwrap().as_density().unwrap().diagonal(), vec![0.2, 0.8]);
        assert!(i.map_object(&ResourceRef::new("toy", Payload::Finite(0))).is_err());
    }

    #[test]
    fn registry_lookup() {
        let reg = TheoryRegistry::standard();
        assert_eq!(reg.ids().count(), 6);
        assert!(!reg.get(DISTINGUISH_RESTRICTED).unwrap().exact);
        assert_eq!(reg.get(PUREBIP_LOCC).unwrap().kind, ObjectKind::Pure);
        assert!(matches!(reg.get("nope"), Err(Error::UnknownId(_))));
        let obj = reg.object(RAND_UNIFORM, &serde_json::json!([0.7, 0.3])).unwrap();
        assert_eq!(obj.as_dist().unwrap(), &d(&[0.7, 0.3]));
        assert!(monotone_by_id("bogus", None).is_err());
        assert!(functor_by_id("bogus").is_err());
    }
}
