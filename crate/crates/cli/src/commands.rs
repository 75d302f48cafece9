use anyhow::{anyhow, bail, Context, Result};
use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use resource_kan::bf_oracle::GridSpec;
use resource_kan::kan::{maximal_extension, minimal_extension, ExtensionProblem, ExtensionResult, FunctorMap};
use resource_kan::pcat::{preorder_collapse, Decision, MonotoneSpec, ObjectKind, Payload, ResourceRef, Variance};
use resource_kan::prob::{lorenz_curve, majorizes, Dist};
use resource_kan::sample::{random_density, random_dist, random_pure};
use resource_kan::theories::{
    functor_by_id, monotone_by_id, spectral_candidates, TheoryEntry, TheoryRegistry, CDISTINGUISH,
    DISTINGUISH_RESTRICTED, QRAND_QUNIFORM, RAND_DETMN, RAND_UNIFORM,
};

use crate::config::{check_grid_step, CandidateSpec, Command, RunConfig};
use crate::verify;

pub enum Output {
    Json(Value),
    Text(String),
}

/// What a command produced and whether it reports success.
pub struct Run {
    pub output: Output,
    pub passed: bool,
}

impl Run {
    fn json<T: Serialize>(value: &T) -> Result<Run> {
        Run::report(value, true)
    }

    pub fn report<T: Serialize>(value: &T, passed: bool) -> Result<Run> {
        Ok(Run {
            output: Output::Json(serde_json::to_value(value)?),
            passed,
        })
    }
}

pub fn run(cfg: &RunConfig, seed: u64) -> Result<Run> {
    let reg = TheoryRegistry::standard();
    match cfg.command {
        Command::Reach => reach(cfg, &reg),
        Command::Collapse => collapse(cfg, &reg),
        Command::Extend => extend(cfg, &reg),
        Command::Verify => verify::run(cfg, &reg, seed),
        Command::Lorenz => lorenz(cfg),
    }
}

pub fn require<'a, T>(field: &'a Option<T>, name: &str) -> Result<&'a T> {
    field.as_ref().ok_or_else(|| anyhow!("config field `{name}` is required"))
}

#[derive(Serialize)]
struct ReachOutput<'a> {
    command: &'static str,
    theory: &'a str,
    #[serde(flatten)]
    decision: Decision,
}

fn reach(cfg: &RunConfig, reg: &TheoryRegistry) -> Result<Run> {
    let theory = require(&cfg.theory, "theory")?;
    let entry = reg.get(theory)?;
    let from = reg.object(theory, require(&cfg.from, "from")?).context("parsing `from`")?;
    let to = reg.object(theory, require(&cfg.to, "to")?).context("parsing `to`")?;
    let decision = entry.oracle.decide(&from, &to)?;
    Run::json(&ReachOutput {
        command: "reach",
        theory,
        decision,
    })
}

fn collapse(cfg: &RunConfig, reg: &TheoryRegistry) -> Result<Run> {
    let theory = require(&cfg.theory, "theory")?;
    let entry = reg.get(theory)?;
    let objects = require(&cfg.objects, "objects")?
        .iter()
        .enumerate()
        .map(|(i, v)| reg.object(theory, v).with_context(|| format!("parsing object {i}")))
        .collect::<Result<Vec<_>>>()?;
    let rel = preorder_collapse(entry.oracle.as_ref(), objects)?;
    match cfg.format.as_deref().unwrap_or("json") {
        "json" => {
            let mut out = json!({"command": "collapse", "theory": theory});
            if let (Value::Object(out), Value::Object(body)) = (&mut out, rel.to_json()) {
                out.extend(body);
            }
            Ok(Run {
                output: Output::Json(out),
                passed: true,
            })
        }
        "dot" => Ok(Run {
            output: Output::Text(rel.to_dot()),
            passed: true,
        }),
        other => bail!("unknown collapse format `{other}` (expected json or dot)"),
    }
}

/// Monotone, functor and both theories of an extension problem.
pub struct Setup {
    pub mono: MonotoneSpec,
    pub functor: FunctorMap,
    pub source: &'static str,
    pub source_kind: ObjectKind,
    pub target: TheoryEntry,
}

fn embedding_partner(id: &str, forward: bool) -> Option<&'static str> {
    match (id, forward) {
        (RAND_UNIFORM | RAND_DETMN, true) => Some(QRAND_QUNIFORM),
        (CDISTINGUISH, true) => Some(DISTINGUISH_RESTRICTED),
        (QRAND_QUNIFORM, false) => Some(RAND_UNIFORM),
        (DISTINGUISH_RESTRICTED, false) => Some(CDISTINGUISH),
        _ => None,
    }
}

fn default_monotone(kind: ObjectKind) -> &'static str {
    match kind {
        ObjectKind::DistPair => "kl",
        ObjectKind::Pure => "schmidt_rank",
        ObjectKind::Density => "spectral_entropy",
        _ => "shannon",
    }
}

pub fn setup(cfg: &RunConfig, reg: &TheoryRegistry) -> Result<Setup> {
    let functor_id = cfg.functor.as_deref().unwrap_or("identity");
    let functor = functor_by_id(functor_id)?;
    let embeds = functor.name() != "identity";
    let target_hint = cfg.target_theory.as_deref().or(cfg.theory.as_deref());
    let source_hint = cfg.source_theory.as_deref();
    let (source_id, target_id) = match (source_hint, target_hint) {
        (Some(s), Some(t)) => (s.to_owned(), t.to_owned()),
        (Some(s), None) if !embeds => (s.to_owned(), s.to_owned()),
        (None, Some(t)) if !embeds => (t.to_owned(), t.to_owned()),
        (Some(s), None) => {
            let t = embedding_partner(s, true).ok_or_else(|| anyhow!("functor `{functor_id}` does not apply to `{s}`"))?;
            (s.to_owned(), t.to_owned())
        }
        (None, Some(t)) => {
            let s = embedding_partner(t, false).ok_or_else(|| anyhow!("functor `{functor_id}` does not land in `{t}`"))?;
            (s.to_owned(), t.to_owned())
        }
        (None, None) => bail!("config needs `theory`, `source_theory` or `target_theory`"),
    };
    let source = reg.get(&source_id)?;
    let target = reg.get(&target_id)?.clone();
    let monotone = cfg.monotone.as_deref().unwrap_or(default_monotone(source.kind));
    Ok(Setup {
        mono: monotone_by_id(monotone, cfg.variance)?,
        functor,
        source: source.id,
        source_kind: source.kind,
        target,
    })
}

impl Setup {
    pub fn problem(&self, candidates: Vec<ResourceRef>, complete: bool) -> ExtensionProblem {
        ExtensionProblem::new(self.mono.clone(), self.functor.clone(), self.target.oracle.clone(), candidates)
            .complete(complete)
    }
}

pub const MAX_PAIR_GRID: usize = 200_000;

/// Candidate list and completeness flag; spectral specs need the target.
pub fn candidates(
    spec: &CandidateSpec,
    reg: &TheoryRegistry,
    setup: &Setup,
    target: Option<&ResourceRef>,
) -> Result<(Vec<ResourceRef>, bool)> {
    match spec {
        CandidateSpec::List { items, complete } => {
            let objs = items
                .iter()
                .enumerate()
                .map(|(i, v)| reg.object(setup.source, v).with_context(|| format!("parsing candidate {i}")))
                .collect::<Result<Vec<_>>>()?;
            Ok((objs, *complete))
        }
        CandidateSpec::Grid { step, dim } => {
            check_grid_step(*step)?;
            let points = GridSpec::new(*step)?.points(*dim)?;
            let objs = match setup.source_kind {
                ObjectKind::Dist => points
                    .into_iter()
                    .map(|p| ResourceRef::new(setup.source, Payload::Dist(p)))
                    .collect(),
                ObjectKind::DistPair => {
                    let n = points.len().saturating_mul(points.len());
                    if n > MAX_PAIR_GRID {
                        bail!("grid of pairs has {n} points, limit {MAX_PAIR_GRID}");
                    }
                    points
                        .iter()
                        .flat_map(|p| {
                            points
                                .iter()
                                .map(|q| ResourceRef::new(setup.source, Payload::DistPair(p.clone(), q.clone())))
                        })
                        .collect()
                }
                other => bail!("grid candidates need distributions, source theory holds {other}"),
            };
            Ok((objs, false))
        }
        CandidateSpec::Spectral => {
            let y = target.ok_or_else(|| anyhow!("spectral candidates need explicit targets"))?;
            Ok((spectral_candidates(y.as_density()?)?, true))
        }
    }
}

#[derive(Serialize)]
struct TargetResult {
    target_index: usize,
    minimal: ExtensionResult,
    maximal: ExtensionResult,
}

#[derive(Serialize)]
struct ExtendOutput<'a> {
    command: &'static str,
    source_theory: &'a str,
    target_theory: &'a str,
    functor: &'a str,
    monotone: &'a str,
    variance: Variance,
    results: Vec<TargetResult>,
}

fn extend(cfg: &RunConfig, reg: &TheoryRegistry) -> Result<Run> {
    let setup = setup(cfg, reg)?;
    let spec = require(&cfg.candidates, "candidates")?;
    let targets = require(&cfg.targets, "targets")?
        .iter()
        .enumerate()
        .map(|(i, v)| reg.object(setup.target.id, v).with_context(|| format!("parsing target {i}")))
        .collect::<Result<Vec<_>>>()?;
    let shared = match spec {
        CandidateSpec::Spectral => None,
        _ => Some(candidates(spec, reg, &setup, None)?),
    };
    let mut results = Vec::with_capacity(targets.len());
    for (i, y) in targets.iter().enumerate() {
        let (cands, complete) = match &shared {
            Some((c, complete)) => (c.clone(), *complete),
            None => candidates(spec, reg, &setup, Some(y))?,
        };
        let prob = setup.problem(cands, complete);
        results.push(TargetResult {
            target_index: i,
            minimal: minimal_extension(&prob, y)?,
            maximal: maximal_extension(&prob, y)?,
        });
    }
    Run::json(&ExtendOutput {
        command: "extend",
        source_theory: setup.source,
        target_theory: setup.target.id,
        functor: setup.functor.name(),
        monotone: setup.mono.name(),
        variance: setup.mono.variance(),
        results,
    })
}

fn lorenz(cfg: &RunConfig) -> Result<Run> {
    let p = Dist::new(require(&cfg.p, "p")?.clone()).context("parsing `p`")?;
    let text = match &cfg.q {
        None => lorenz_curve(&p).to_csv(),
        Some(q) => {
            let q = Dist::new(q.clone()).context("parsing `q`")?;
            format!(
                "# q_majorized_by_p: {}\n# curve: p\n{}# curve: q\n{}",
                majorizes(&p, &q),
                lorenz_curve(&p).to_csv(),
                lorenz_curve(&q).to_csv()
            )
        }
    };
    Ok(Run {
        output: Output::Text(text),
        passed: true,
    })
}

/// A random object of `kind` labelled with `theory`.
pub fn random_object<R: Rng>(rng: &mut R, theory: &str, kind: ObjectKind, dim: usize) -> Result<ResourceRef> {
    let payload = match kind {
        ObjectKind::Dist => Payload::Dist(random_dist(rng, dim)),
        ObjectKind::DistPair => Payload::DistPair(random_dist(rng, dim), random_dist(rng, dim)),
        ObjectKind::Density => Payload::Density(random_density(rng, dim)),
        ObjectKind::DensityPair => Payload::DensityPair(random_density(rng, dim), random_density(rng, dim)),
        ObjectKind::Pure => Payload::Pure(random_pure(rng, (dim, dim))),
        ObjectKind::Finite => bail!("cannot sample objects of a finite toy theory"),
    };
    Ok(ResourceRef::new(theory, payload))
}
