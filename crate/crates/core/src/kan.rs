//! Pointwise minimal and maximal extensions of a monotone along a functor.
//!
//! With `[0, ∞]` as codomain, the limits and colimits over comma categories
//! collapse to infima and suprema over admissible source objects:
//!
//! | variance      | minimal extension at `Y`           | maximal extension at `Y`           |
//! |---------------|------------------------------------|------------------------------------|
//! | covariant     | `inf { M(X) : Y → K(X) free }`     | `sup { M(X) : K(X) → Y free }`     |
//! | contravariant | `sup { M(X) : Y → K(X) free }`     | `inf { M(X) : K(X) → Y free }`     |
//!
//! The empty infimum is `∞` and the empty supremum is `0`.
//!
//! Source objects are supplied as a finite candidate list. Over an infinite
//! source theory the result is the extension restricted to those candidates,
//! flagged `exact = false` unless the caller marks the list as capturing the
//! optimum.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pcat::{MonotoneSpec, ReachabilityOracle, ResourceRef, Transformation, Variance};
use crate::value::ExtValue;

/// Slack for the reduction and monotonicity inequalities.
pub const PROPERTY_SLACK: f64 = 1e-9;

const PARALLEL_THRESHOLD: usize = 256;

type ObjectMap = dyn Fn(&ResourceRef) -> Result<ResourceRef> + Send + Sync;

/// The object part of a functor between resource theories.
#[derive(Clone)]
pub struct FunctorMap {
    name: String,
    map: Arc<ObjectMap>,
}

impl FunctorMap {
    pub fn new<F>(name: impl Into<String>, map: F) -> Self
    where
        F: Fn(&ResourceRef) -> Result<ResourceRef> + Send + Sync + 'static,
    {
        FunctorMap {
            name: name.into(),
            map: Arc::new(map),
        }
    }

    pub fn identity() -> Self {
        FunctorMap::new("identity", |x| Ok(x.clone()))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn map_object(&self, x: &ResourceRef) -> Result<ResourceRef> {
        (self.map)(x)
    }

    /// Indices of source-free pairs whose images are not free in the target.
    pub fn free_arrow_violations(
        &self,
        source: &dyn ReachabilityOracle,
        target: &dyn ReachabilityOracle,
        pairs: &[(ResourceRef, ResourceRef)],
    ) -> Result<Vec<usize>> {
        let mut bad = Vec::new();
        for (i, (a, b)) in pairs.iter().enumerate() {
            if source.decide(a, b)?.reachable
                && !target.decide(&self.map_object(a)?, &self.map_object(b)?)?.reachable
            {
                bad.push(i);
            }
        }
        Ok(bad)
    }
}

impl fmt::Debug for FunctorMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctorMap").field("name", &self.name).finish()
    }
}

/// A monotone on a source theory, a functor into a target theory, the
/// target's reachability oracle and the source objects to range over.
#[derive(Clone)]
pub struct ExtensionProblem {
    pub mono: MonotoneSpec,
    pub functor: FunctorMap,
    pub target_oracle: Arc<dyn ReachabilityOracle>,
    pub candidates: Vec<ResourceRef>,
    /// The candidate list provably attains the extension over the whole source theory.
    pub candidates_complete: bool,
}

impl ExtensionProblem {
    pub fn new(
        mono: MonotoneSpec,
        functor: FunctorMap,
        target_oracle: Arc<dyn ReachabilityOracle>,
        candidates: Vec<ResourceRef>,
    ) -> Self {
        ExtensionProblem {
            mono,
            functor,
            target_oracle,
            candidates,
            candidates_complete: false,
        }
    }

    pub fn complete(mut self, complete: bool) -> Self {
        self.candidates_complete = complete;
        self
    }

    pub fn with_candidates(&self, candidates: Vec<ResourceRef>) -> Self {
        ExtensionProblem {
            candidates,
            ..self.clone()
        }
    }
}

impl fmt::Debug for ExtensionProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExtensionProblem")
            .field("mono", &self.mono)
            .field("functor", &self.functor)
            .field("candidates", &self.candidates.len())
            .field("candidates_complete", &self.candidates_complete)
            .finish()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtensionWitness {
    pub candidate_index: usize,
    pub candidate: ResourceRef,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transformation: Option<Transformation>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtensionResult {
    pub value: ExtValue,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<ExtensionWitness>,
    pub examined: usize,
    pub exact: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Minimal,
    Maximal,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Reduce {
    Inf,
    Sup,
}

fn reduction(side: Side, variance: Variance) -> Reduce {
    match (side, variance) {
        (Side::Minimal, Variance::Covariant) | (Side::Maximal, Variance::Contravariant) => Reduce::Inf,
        (Side::Minimal, Variance::Contravariant) | (Side::Maximal, Variance::Covariant) => Reduce::Sup,
    }
}

struct Admitted {
    value: ExtValue,
    transformation: Option<Transformation>,
}

// None for candidates whose image is not connected to `y` in the required direction.
fn examine(prob: &ExtensionProblem, side: Side, y: &ResourceRef, x: &ResourceRef) -> Result<(Option<Admitted>, bool)> {
    let image = prob.functor.map_object(x)?;
    let decision = match side {
        Side::Minimal => prob.target_oracle.decide(y, &image)?,
        Side::Maximal => prob.target_oracle.decide(&image, y)?,
    };
    if !decision.reachable {
        return Ok((None, decision.exact));
    }
    let value = prob.mono.evaluate(x)?;
    Ok((
        Some(Admitted {
            value,
            transformation: decision.witness,
        }),
        decision.exact,
    ))
}

fn examine_all(prob: &ExtensionProblem, side: Side, y: &ResourceRef) -> Result<Vec<(Option<Admitted>, bool)>> {
    let n = prob.candidates.len();
    let threads = std::thread::available_parallelism().map_or(1, |t| t.get());
    if n < PARALLEL_THRESHOLD || threads < 2 {
        return prob.candidates.iter().map(|x| examine(prob, side, y, x)).collect();
    }
    let chunk = n.div_ceil(threads);
    std::thread::scope(|scope| {
        let handles: Vec<_> = prob
            .candidates
            .chunks(chunk)
            .map(|part| {
                scope.spawn(move || {
                    part.iter()
                        .map(|x| examine(prob, side, y, x))
                        .collect::<Result<Vec<_>>>()
                })
            })
            .collect();
        let mut out = Vec::with_capacity(n);
        for h in handles {
            out.extend(h.join().expect("candidate worker panicked")?);
        }
        Ok(out)
    })
}

fn extend(prob: &ExtensionProblem, side: Side, y: &ResourceRef) -> Result<ExtensionResult> {
    prob.target_oracle.check_kind(y)?;
    let mode = reduction(side, prob.mono.variance());
    let examined = examine_all(prob, side, y)?;

    let mut exact = prob.target_oracle.is_exact() && prob.candidates_complete;
    let mut best: Option<(usize, Admitted)> = None;
    for (i, (admitted, decided_exactly)) in examined.into_iter().enumerate() {
        exact &= decided_exactly;
        let Some(adm) = admitted else { continue };
        let better = match &best {
            None => true,
            Some((_, b)) => match mode {
                Reduce::Inf => adm.value < b.value,
                Reduce::Sup => adm.value > b.value,
            },
        };
        // strict comparison keeps the first optimal candidate
        if better {
            best = Some((i, adm));
        }
    }

    let n = prob.candidates.len();
    Ok(match best {
        Some((i, adm)) => ExtensionResult {
            value: adm.value,
            witness: Some(ExtensionWitness {
                candidate_index: i,
                candidate: prob.candidates[i].clone(),
                transformation: adm.transformation,
            }),
            examined: n,
            exact,
        },
        None => ExtensionResult {
            value: match mode {
                Reduce::Inf => ExtValue::INFINITY,
                Reduce::Sup => ExtValue::ZERO,
            },
            witness: None,
            examined: n,
            exact,
        },
    })
}

/// Right Kan extension, evaluated at `y`.
pub fn minimal_extension(prob: &ExtensionProblem, y: &ResourceRef) -> Result<ExtensionResult> {
    extend(prob, Side::Minimal, y)
}

/// Left Kan extension, evaluated at `y`.
pub fn maximal_extension(prob: &ExtensionProblem, y: &ResourceRef) -> Result<ExtensionResult> {
    extend(prob, Side::Maximal, y)
}

/// Values at the image `K(X)` of one source sample.
#[derive(Debug, Clone, Serialize)]
pub struct ReductionEntry {
    pub minimal: ExtValue,
    pub value: ExtValue,
    pub maximal: ExtValue,
    pub holds: bool,
    /// Both extensions reproduce `M(X)` exactly up to slack.
    pub tight: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReductionReport {
    pub entries: Vec<ReductionEntry>,
    pub passed: bool,
}

/// Checks `min(K X) ≤ M(X) ≤ max(K X)` (reversed for contravariant monotones).
pub fn verify_reduction(prob: &ExtensionProblem, samples: &[ResourceRef]) -> Result<ReductionReport> {
    require_exact(prob)?;
    let mut entries = Vec::with_capacity(samples.len());
    for x in samples {
        let y = prob.functor.map_object(x)?;
        let minimal = minimal_extension(prob, &y)?.value;
        let maximal = maximal_extension(prob, &y)?.value;
        let value = prob.mono.evaluate(x)?;
        let (lower, upper) = match prob.mono.variance() {
            Variance::Covariant => (minimal, maximal),
            Variance::Contravariant => (maximal, minimal),
        };
        let holds = lower.le_with_slack(&value, PROPERTY_SLACK) && value.le_with_slack(&upper, PROPERTY_SLACK);
        let tight = minimal.approx_eq(&value, PROPERTY_SLACK) && maximal.approx_eq(&value, PROPERTY_SLACK);
        entries.push(ReductionEntry {
            minimal,
            value,
            maximal,
            holds,
            tight,
        });
    }
    let passed = entries.iter().all(|e| e.holds);
    Ok(ReductionReport { entries, passed })
}

#[derive(Debug, Clone, Serialize)]
pub struct MonotonicityViolation {
    pub pair_index: usize,
    pub side: &'static str,
    pub from_value: ExtValue,
    pub to_value: ExtValue,
}

#[derive(Debug, Clone, Serialize)]
pub struct MonotonicityReport {
    pub checked: usize,
    pub violations: Vec<MonotonicityViolation>,
    pub passed: bool,
}

/// Checks that both extensions respect the variance along each free target pair.
pub fn verify_monotonicity(
    prob: &ExtensionProblem,
    pairs: &[(ResourceRef, ResourceRef)],
) -> Result<MonotonicityReport> {
    let mut violations = Vec::new();
    for (i, (a, b)) in pairs.iter().enumerate() {
        if !prob.target_oracle.decide(a, b)?.reachable {
            return Err(Error::Input(format!("target pair {i} is not connected by a free arrow")));
        }
        for (side, name) in [(Side::Minimal, "minimal"), (Side::Maximal, "maximal")] {
            let from_value = extend(prob, side, a)?.value;
            let to_value = extend(prob, side, b)?.value;
            let ok = match prob.mono.variance() {
                Variance::Covariant => from_value.le_with_slack(&to_value, PROPERTY_SLACK),
                Variance::Contravariant => to_value.le_with_slack(&from_value, PROPERTY_SLACK),
            };
            if !ok {
                violations.push(MonotonicityViolation {
                    pair_index: i,
                    side: name,
                    from_value,
                    to_value,
                });
            }
        }
    }
    Ok(MonotonicityReport {
        checked: pairs.len(),
        passed: violations.is_empty(),
        violations,
    })
}

/// Largest target theory accepted by [`verify_optimality_bruteforce`].
pub const MAX_OPTIMALITY_TARGETS: usize = 8;

#[derive(Debug, Clone, Serialize)]
pub struct OptimalityReport {
    pub minimal: Vec<ExtValue>,
    pub maximal: Vec<ExtValue>,
    /// Competitors `G` satisfying the hypothesis for the minimal extension.
    pub lower_competitors: usize,
    /// Competitors `G` satisfying the hypothesis for the maximal extension.
    pub upper_competitors: usize,
    pub violations: usize,
    /// The minimal extension is itself one of the enumerated competitors.
    pub minimal_attained: bool,
    pub maximal_attained: bool,
    pub passed: bool,
}

/// Enumerates every monotone `G` on a finite target with values in `grid`
/// and confirms that the extensions bound all admissible competitors.
///
/// For the minimal extension the competitors satisfy `G(K X) ≤ M(X)` and must
/// stay below it; for the maximal one `M(X) ≤ G(K X)` and they must stay
/// above. Contravariant monotones swap every inequality.
pub fn verify_optimality_bruteforce(
    prob: &ExtensionProblem,
    targets: &[ResourceRef],
    grid: &[ExtValue],
    budget: usize,
) -> Result<OptimalityReport> {
    require_exact(prob)?;
    if targets.len() > MAX_OPTIMALITY_TARGETS {
        return Err(Error::SizeLimit {
            what: "target objects",
            size: targets.len(),
            limit: MAX_OPTIMALITY_TARGETS,
        });
    }
    let n = targets.len();
    let mut relation = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            relation[i][j] = prob.target_oracle.decide(&targets[i], &targets[j])?.reachable;
        }
    }
    let mut anchors = Vec::with_capacity(prob.candidates.len());
    for x in &prob.candidates {
        let image = prob.functor.map_object(x)?;
        let t = targets
            .iter()
            .position(|t| *t == image)
            .ok_or_else(|| Error::Input("candidate image is not among the target objects".into()))?;
        anchors.push((t, prob.mono.evaluate(x)?));
    }
    let minimal: Vec<ExtValue> = targets
        .iter()
        .map(|y| minimal_extension(prob, y).map(|r| r.value))
        .collect::<Result<_>>()?;
    let maximal: Vec<ExtValue> = targets
        .iter()
        .map(|y| maximal_extension(prob, y).map(|r| r.value))
        .collect::<Result<_>>()?;

    let covariant = prob.mono.variance() == Variance::Covariant;
    // `below(a, b)`: a sits under b in the codomain order of the monotone
    let below = |a: ExtValue, b: ExtValue| if covariant { a <= b } else { a >= b };

    let mut lower = Enumeration::new(&relation, &anchors, grid, budget, covariant, true);
    let mut violations = 0;
    let mut lower_competitors = 0;
    lower.run(&mut |g| {
        lower_competitors += 1;
        if !(0..n).all(|y| below(g[y], minimal[y])) {
            violations += 1;
        }
    })?;
    let mut upper = Enumeration::new(&relation, &anchors, grid, budget, covariant, false);
    let mut upper_competitors = 0;
    upper.run(&mut |g| {
        upper_competitors += 1;
        if !(0..n).all(|y| below(maximal[y], g[y])) {
            violations += 1;
        }
    })?;

    let on_grid = |vals: &[ExtValue]| vals.iter().all(|v| grid.contains(v));
    let minimal_attained = lower.admits(&minimal);
    let maximal_attained = upper.admits(&maximal);
    let passed = violations == 0
        && (minimal_attained || !on_grid(&minimal))
        && (maximal_attained || !on_grid(&maximal));
    Ok(OptimalityReport {
        minimal,
        maximal,
        lower_competitors,
        upper_competitors,
        violations,
        minimal_attained,
        maximal_attained,
        passed,
    })
}

fn require_exact(prob: &ExtensionProblem) -> Result<()> {
    if prob.target_oracle.is_exact() {
        Ok(())
    } else {
        Err(Error::Input("property verification needs an exact target oracle".into()))
    }
}

// Backtracking over assignments of grid values to target objects, pruning on
// the monotone law and on the hypothesis tying G to M along K.
struct Enumeration<'a> {
    relation: &'a [Vec<bool>],
    anchors: &'a [(usize, ExtValue)],
    grid: &'a [ExtValue],
    budget: usize,
    covariant: bool,
    // true: G(K X) under M(X); false: M(X) under G(K X)
    lower: bool,
    visited: usize,
}

impl<'a> Enumeration<'a> {
    fn new(
        relation: &'a [Vec<bool>],
        anchors: &'a [(usize, ExtValue)],
        grid: &'a [ExtValue],
        budget: usize,
        covariant: bool,
        lower: bool,
    ) -> Self {
        Enumeration {
            relation,
            anchors,
            grid,
            budget,
            covariant,
            lower,
            visited: 0,
        }
    }

    fn below(&self, a: ExtValue, b: ExtValue) -> bool {
        if self.covariant {
            a <= b
        } else {
            a >= b
        }
    }

    fn consistent(&self, g: &[ExtValue], t: usize) -> bool {
        for s in 0..t {
            if self.relation[s][t] && !self.below(g[s], g[t]) {
                return false;
            }
            if self.relation[t][s] && !self.below(g[t], g[s]) {
                return false;
            }
        }
        self.anchors.iter().filter(|(a, _)| *a == t).all(|&(_, m)| {
            if self.lower {
                self.below(g[t], m)
            } else {
                self.below(m, g[t])
            }
        })
    }

    fn admits(&self, g: &[ExtValue]) -> bool {
        (0..g.len()).all(|t| self.consistent(g, t))
    }

    fn run(&mut self, visit: &mut dyn FnMut(&[ExtValue])) -> Result<()> {
        let n = self.relation.len();
        let mut g = vec![ExtValue::ZERO; n];
        self.step(&mut g, 0, visit)
    }

    fn step(&mut self, g: &mut Vec<ExtValue>, t: usize, visit: &mut dyn FnMut(&[ExtValue])) -> Result<()> {
        if t == g.len() {
            visit(g);
            return Ok(());
        }
        for &v in self.grid {
            self.visited += 1;
            if self.visited > self.budget {
                return Err(Error::Budget(self.budget));
            }
            g[t] = v;
            if self.consistent(g, t) {
                self.step(g, t + 1, visit)?;
            }
        }
        Ok(())
    }
}
