//! Resource theories as partitioned categories, seen through reachability.
//!
//! Objects are [`ResourceRef`]s; the free transformations between them are
//! only ever consulted through a [`ReachabilityOracle`]. A [`MonotoneSpec`]
//! assigns `[0, ∞]` values and carries its variance explicitly.

use std::fmt;
use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::prob::{Dist, StochMatrix};
use crate::quantum::{BipartitePure, DensityMatrix, KrausChannel};
use crate::value::ExtValue;

/// Slack for monotonicity checks.
pub const MONOTONE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectKind {
    Dist,
    DistPair,
    Density,
    DensityPair,
    Pure,
    Finite,
}

impl ObjectKind {
    pub fn name(self) -> &'static str {
        match self {
            ObjectKind::Dist => "dist",
            ObjectKind::DistPair => "dist_pair",
            ObjectKind::Density => "density",
            ObjectKind::DensityPair => "density_pair",
            ObjectKind::Pure => "pure",
            ObjectKind::Finite => "finite",
        }
    }
}

impl fmt::Display for ObjectKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Payload {
    Dist(Dist),
    DistPair(Dist, Dist),
    Density(DensityMatrix),
    DensityPair(DensityMatrix, DensityMatrix),
    Pure(BipartitePure),
    /// A point of a finite, fully enumerated theory.
    Finite(usize),
}

impl Payload {
    pub fn kind(&self) -> ObjectKind {
        match self {
            Payload::Dist(_) => ObjectKind::Dist,
            Payload::DistPair(..) => ObjectKind::DistPair,
            Payload::Density(_) => ObjectKind::Density,
            Payload::DensityPair(..) => ObjectKind::DensityPair,
            Payload::Pure(_) => ObjectKind::Pure,
            Payload::Finite(_) => ObjectKind::Finite,
        }
    }

    /// Parses the JSON form of an object of the given kind.
    pub fn from_json(kind: ObjectKind, value: &Value) -> Result<Payload> {
        let bad = |e: serde_json::Error| Error::Input(format!("malformed {kind} object: {e}"));
        let payload = match kind {
            ObjectKind::Dist => Payload::Dist(Dist::deserialize(value).map_err(bad)?),
            ObjectKind::DistPair => {
                let (p, q) = <(Dist, Dist)>::deserialize(value).map_err(bad)?;
                Payload::DistPair(p, q)
            }
            ObjectKind::Density => Payload::Density(DensityMatrix::deserialize(value).map_err(bad)?),
            ObjectKind::DensityPair => {
                let (a, b) = <(DensityMatrix, DensityMatrix)>::deserialize(value).map_err(bad)?;
                Payload::DensityPair(a, b)
            }
            ObjectKind::Pure => Payload::Pure(BipartitePure::deserialize(value).map_err(bad)?),
            ObjectKind::Finite => Payload::Finite(usize::deserialize(value).map_err(bad)?),
        };
        Ok(payload)
    }
}

/// An object of a named resource theory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResourceRef {
    pub theory_id: String,
    pub payload: Payload,
}

impl ResourceRef {
    pub fn new(theory_id: impl Into<String>, payload: Payload) -> Self {
        ResourceRef {
            theory_id: theory_id.into(),
            payload,
        }
    }

    pub fn kind(&self) -> ObjectKind {
        self.payload.kind()
    }

    pub fn as_dist(&self) -> Result<&Dist> {
        match &self.payload {
            Payload::Dist(p) => Ok(p),
            other => Err(kind_mismatch(ObjectKind::Dist, other)),
        }
    }

    pub fn as_dist_pair(&self) -> Result<(&Dist, &Dist)> {
        match &self.payload {
            Payload::DistPair(p, q) => Ok((p, q)),
            other => Err(kind_mismatch(ObjectKind::DistPair, other)),
        }
    }

    pub fn as_density(&self) -> Result<&DensityMatrix> {
        match &self.payload {
            Payload::Density(r) => Ok(r),
            other => Err(kind_mismatch(ObjectKind::Density, other)),
        }
    }

    pub fn as_density_pair(&self) -> Result<(&DensityMatrix, &DensityMatrix)> {
        match &self.payload {
            Payload::DensityPair(a, b) => Ok((a, b)),
            other => Err(kind_mismatch(ObjectKind::DensityPair, other)),
        }
    }

    pub fn as_pure(&self) -> Result<&BipartitePure> {
        match &self.payload {
            Payload::Pure(psi) => Ok(psi),
            other => Err(kind_mismatch(ObjectKind::Pure, other)),
        }
    }

    pub fn as_finite(&self) -> Result<usize> {
        match &self.payload {
            Payload::Finite(i) => Ok(*i),
            other => Err(kind_mismatch(ObjectKind::Finite, other)),
        }
    }
}

fn kind_mismatch(expected: ObjectKind, got: &Payload) -> Error {
    Error::KindMismatch {
        expected: expected.name(),
        got: got.kind().name(),
    }
}

/// A free transformation certifying reachability.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Transformation {
    Identity,
    Stochastic(StochMatrix),
    Channel(KrausChannel),
    /// A transformation known to exist by a criterion rather than constructed.
    Criterion(String),
}

#[derive(Debug, Clone, Serialize)]
pub struct Decision {
    pub reachable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Transformation>,
    pub exact: bool,
}

impl Decision {
    pub fn reachable(witness: Option<Transformation>, exact: bool) -> Self {
        Decision {
            reachable: true,
            witness,
            exact,
        }
    }

    pub fn unreachable(exact: bool) -> Self {
        Decision {
            reachable: false,
            witness: None,
            exact,
        }
    }
}

/// Decides whether one object converts into another by free transformations.
///
/// Implementations are reflexive and safe to call concurrently. Oracles that
/// only certify reachability over a restricted family report `exact = false`.
pub trait ReachabilityOracle: Send + Sync {
    fn kind(&self) -> ObjectKind;

    fn is_exact(&self) -> bool;

    fn decide(&self, from: &ResourceRef, to: &ResourceRef) -> Result<Decision>;

    fn check_kind(&self, obj: &ResourceRef) -> Result<()> {
        if obj.kind() == self.kind() {
            Ok(())
        } else {
            Err(Error::KindMismatch {
                expected: self.kind().name(),
                got: obj.kind().name(),
            })
        }
    }
}

/// A theory over points `0..n` with an explicitly stored preorder.
#[derive(Debug, Clone)]
pub struct FinitePreorderOracle {
    relation: Vec<Vec<bool>>,
}

impl FinitePreorderOracle {
    /// Validates that `relation` is reflexive and transitive.
    pub fn new(relation: Vec<Vec<bool>>) -> Result<Self> {
        let n = relation.len();
        if relation.iter().any(|r| r.len() != n) {
            return Err(Error::Input("relation matrix must be square".into()));
        }
        check_preorder(&relation)?;
        Ok(FinitePreorderOracle { relation })
    }

    /// Reflexive-transitive closure of the given arrows.
    pub fn generated_by(n: usize, arrows: &[(usize, usize)]) -> Result<Self> {
        let mut rel = vec![vec![false; n]; n];
        for (i, row) in rel.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(a, b) in arrows {
            if a >= n || b >= n {
                return Err(Error::Input(format!("arrow {a}->{b} outside 0..{n}")));
            }
            rel[a][b] = true;
        }
        for k in 0..n {
            let via = rel[k].clone();
            for row in rel.iter_mut().filter(|row| row[k]) {
                for (r, &v) in row.iter_mut().zip(&via) {
                    *r |= v;
                }
            }
        }
        Ok(FinitePreorderOracle { relation: rel })
    }

    pub fn len(&self) -> usize {
        self.relation.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relation.is_empty()
    }

    pub fn relation(&self) -> &[Vec<bool>] {
        &self.relation
    }

    pub fn reaches(&self, a: usize, b: usize) -> bool {
        self.relation[a][b]
    }
}

impl ReachabilityOracle for FinitePreorderOracle {
    fn kind(&self) -> ObjectKind {
        ObjectKind::Finite
    }

    fn is_exact(&self) -> bool {
        true
    }

    fn decide(&self, from: &ResourceRef, to: &ResourceRef) -> Result<Decision> {
        let (a, b) = (from.as_finite()?, to.as_finite()?);
        let n = self.relation.len();
        if a >= n || b >= n {
            return Err(Error::Input(format!("point outside 0..{n}")));
        }
        Ok(if a == b {
            Decision::reachable(Some(Transformation::Identity), true)
        } else if self.relation[a][b] {
            Decision::reachable(None, true)
        } else {
            Decision::unreachable(true)
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variance {
    /// Values never decrease along free arrows.
    Covariant,
    /// Values never increase along free arrows (an op-monotone).
    Contravariant,
}

type Evaluator = dyn Fn(&ResourceRef) -> Result<ExtValue> + Send + Sync;

/// A `[0, ∞]`-valued assignment on objects together with its variance.
#[derive(Clone)]
pub struct MonotoneSpec {
    name: String,
    variance: Variance,
    evaluate: Arc<Evaluator>,
}

impl MonotoneSpec {
    pub fn new<F>(name: impl Into<String>, variance: Variance, evaluate: F) -> Self
    where
        F: Fn(&ResourceRef) -> Result<ExtValue> + Send + Sync + 'static,
    {
        MonotoneSpec {
            name: name.into(),
            variance,
            evaluate: Arc::new(evaluate),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn variance(&self) -> Variance {
        self.variance
    }

    pub fn evaluate(&self, obj: &ResourceRef) -> Result<ExtValue> {
        (self.evaluate)(obj)
    }

    /// Whether `from → to` is consistent with the variance, with slack.
    pub fn respects(&self, from: ExtValue, to: ExtValue) -> bool {
        match self.variance {
            Variance::Covariant => from.le_with_slack(&to, MONOTONE_SLACK),
            Variance::Contravariant => to.le_with_slack(&from, MONOTONE_SLACK),
        }
    }
}

impl fmt::Debug for MonotoneSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MonotoneSpec")
            .field("name", &self.name)
            .field("variance", &self.variance)
            .finish()
    }
}

/// Reachability among a fixed list of objects.
#[derive(Debug, Clone, Serialize)]
pub struct PreorderRelation {
    pub objects: Vec<ResourceRef>,
    /// `relation[i][j]`: object `i` reaches object `j`.
    pub relation: Vec<Vec<bool>>,
}

impl PreorderRelation {
    pub fn reaches(&self, i: usize, j: usize) -> bool {
        self.relation[i][j]
    }

    pub fn to_json(&self) -> Value {
        serde_json::json!({
            "objects": self.objects.iter().map(|o| &o.payload).collect::<Vec<_>>(),
            "adjacency": self.relation,
        })
    }

    /// Graphviz digraph with one edge per strict reachability.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph preorder {\n");
        for (i, obj) in self.objects.iter().enumerate() {
            let label = match &obj.payload {
                Payload::Dist(p) => p
                    .label()
                    .map(str::to_owned)
                    .unwrap_or_else(|| format!("{:?}", p.weights())),
                Payload::Finite(k) => k.to_string(),
                other => other.kind().name().to_owned(),
            };
            let _ = writeln!(out, "  n{i} [label=\"{}\"];", label.replace('"', "'"));
        }
        for (i, row) in self.relation.iter().enumerate() {
            for (j, &r) in row.iter().enumerate() {
                if r && i != j {
                    let _ = writeln!(out, "  n{i} -> n{j};");
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

fn check_preorder(rel: &[Vec<bool>]) -> Result<()> {
    let n = rel.len();
    if let Some(i) = (0..n).find(|&i| !rel[i][i]) {
        return Err(Error::OracleSoundness(format!("object {i} does not reach itself")));
    }
    for (i, row) in rel.iter().enumerate() {
        for j in (0..n).filter(|&j| row[j]) {
            for k in 0..n {
                if rel[j][k] && !row[k] {
                    return Err(Error::OracleSoundness(format!(
                        "intransitive triple: {i} -> {j} -> {k} but not {i} -> {k}"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Collapses a theory onto its reachability preorder over `objects`.
pub fn preorder_collapse(
    oracle: &dyn ReachabilityOracle,
    objects: Vec<ResourceRef>,
) -> Result<PreorderRelation> {
    if !oracle.is_exact() {
        return Err(Error::Input(
            "preorder collapse needs an exact reachability oracle".into(),
        ));
    }
    for obj in &objects {
        oracle.check_kind(obj)?;
    }
    let mut relation = vec![vec![false; objects.len()]; objects.len()];
    for (i, a) in objects.iter().enumerate() {
        for (j, b) in objects.iter().enumerate() {
            relation[i][j] = oracle.decide(a, b)?.reachable;
        }
    }
    check_preorder(&relation)?;
    Ok(PreorderRelation { objects, relation })
}

/// A reachable pair whose values contradict the monotone's variance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotoneViolation {
    pub pair_index: usize,
    pub from_value: ExtValue,
    pub to_value: ExtValue,
}

pub fn check_monotone(
    oracle: &dyn ReachabilityOracle,
    mono: &MonotoneSpec,
    pairs: &[(ResourceRef, ResourceRef)],
) -> Result<Vec<MonotoneViolation>> {
    let mut violations = Vec::new();
    for (pair_index, (a, b)) in pairs.iter().enumerate() {
        if !oracle.decide(a, b)?.reachable {
            continue;
        }
        let (from_value, to_value) = (mono.evaluate(a)?, mono.evaluate(b)?);
        if !mono.respects(from_value, to_value) {
            violations.push(MonotoneViolation {
                pair_index,
                from_value,
                to_value,
            });
        }
    }
    Ok(violations)
}
