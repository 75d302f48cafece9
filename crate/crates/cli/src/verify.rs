use anyhow::{bail, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use resource_kan::bf_oracle::{bf_extension, random_toy_problem, GridSpec, TOY_VALUES};
use resource_kan::kan::{
    maximal_extension, minimal_extension, verify_monotonicity, verify_optimality_bruteforce, verify_reduction,
};
use resource_kan::lp::exists_uniform_map;
use resource_kan::pcat::{Payload, ResourceRef, Variance};
use resource_kan::prob::{apply, kl_divergence, majorizes};
use resource_kan::quantum::{apply_channel, measurement_entropy_search, spectral_entropy, BipartitePure, C64};
use resource_kan::sample::{
    random_density, random_deterministic, random_dist, random_doubly_stochastic, random_stochastic,
    random_unital_channel, random_unitary,
};
use resource_kan::theories::{
    classical_to_quantum, shannon_monotone, spectral_candidates, CDistinguishOracle, TheoryRegistry, CDISTINGUISH,
    DISTINGUISH_RESTRICTED, PUREBIP_LOCC, QRAND_QUNIFORM, RAND_DETMN, RAND_UNIFORM,
};
use resource_kan::{pcat::ReachabilityOracle, ExtValue};

use crate::commands::{candidates, random_object, require, setup, Run};
use crate::config::{check_grid_step, CandidateSpec, Property, RunConfig};

/// Budget for competitor enumeration per toy problem.
const OPTIMALITY_BUDGET: usize = 5_000_000;

#[derive(Serialize)]
struct Report {
    command: &'static str,
    property: &'static str,
    passed: bool,
    checked: usize,
    violations: usize,
    details: Value,
}

pub fn run(cfg: &RunConfig, reg: &TheoryRegistry, seed: u64) -> Result<Run> {
    let property = *require(&cfg.property, "property")?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (checked, violations, details) = match property {
        Property::Reduction => reduction(cfg, reg, &mut rng)?,
        Property::Monotonicity => monotonicity(cfg, reg, &mut rng)?,
        Property::Optimality => optimality(cfg, &mut rng)?,
        Property::HlpAgreement => hlp_agreement(cfg)?,
        Property::DataProcessing => data_processing(cfg, &mut rng)?,
        Property::Coincidence => coincidence(cfg, &mut rng)?,
    };
    let report = Report {
        command: "verify",
        property: property.name(),
        passed: violations == 0,
        checked,
        violations,
        details,
    };
    Run::report(&report, report.passed)
}

type Tally = (usize, usize, Value);

fn extra_candidates(cfg: &RunConfig, reg: &TheoryRegistry, s: &crate::commands::Setup) -> Result<Vec<ResourceRef>> {
    match &cfg.candidates {
        None => Ok(Vec::new()),
        Some(CandidateSpec::Spectral) => bail!("spectral candidates are only available to `extend`"),
        Some(spec) => Ok(candidates(spec, reg, s, None)?.0),
    }
}

fn reduction(cfg: &RunConfig, reg: &TheoryRegistry, rng: &mut ChaCha8Rng) -> Result<Tally> {
    let s = setup(cfg, reg)?;
    let n = cfg.samples.unwrap_or(50);
    let dim = cfg.dim.unwrap_or(3);
    let samples = (0..n)
        .map(|_| random_object(rng, s.source, s.source_kind, dim))
        .collect::<Result<Vec<_>>>()?;
    let mut cands = if cfg.include_samples.unwrap_or(true) {
        samples.clone()
    } else {
        Vec::new()
    };
    cands.extend(extra_candidates(cfg, reg, &s)?);
    let report = verify_reduction(&s.problem(cands, false), &samples)?;
    let violations = report.entries.iter().filter(|e| !e.holds).count();
    let tight = report.entries.iter().filter(|e| e.tight).count();
    Ok((n, violations, json!({"tight": tight, "entries": report.entries})))
}

// A random pair connected by a free transformation of `theory`.
fn free_pair(rng: &mut ChaCha8Rng, theory: &str, dim: usize) -> Result<(ResourceRef, ResourceRef)> {
    let obj = |p| ResourceRef::new(theory, p);
    Ok(match theory {
        RAND_DETMN => {
            let p = random_dist(rng, dim);
            let q = apply(&p, &random_deterministic(rng, dim, dim))?;
            (obj(Payload::Dist(p)), obj(Payload::Dist(q)))
        }
        RAND_UNIFORM => {
            let p = random_dist(rng, dim);
            let q = apply(&p, &random_doubly_stochastic(rng, dim, 3))?;
            (obj(Payload::Dist(p)), obj(Payload::Dist(q)))
        }
        QRAND_QUNIFORM => {
            let rho = random_density(rng, dim);
            let out = apply_channel(&random_unital_channel(rng, dim, 3), &rho)?;
            (obj(Payload::Density(rho)), obj(Payload::Density(out)))
        }
        CDISTINGUISH | DISTINGUISH_RESTRICTED => {
            let (p, q) = (random_dist(rng, dim), random_dist(rng, dim));
            let m = random_stochastic(rng, dim, dim);
            let (p2, q2) = (apply(&p, &m)?, apply(&q, &m)?);
            if theory == CDISTINGUISH {
                (obj(Payload::DistPair(p, q)), obj(Payload::DistPair(p2, q2)))
            } else {
                let i = classical_to_quantum();
                let a = i.map_object(&ResourceRef::new(CDISTINGUISH, Payload::DistPair(p, q)))?;
                let b = i.map_object(&ResourceRef::new(CDISTINGUISH, Payload::DistPair(p2, q2)))?;
                (a, b)
            }
        }
        PUREBIP_LOCC => {
            // Schmidt coefficients of the source are majorized by those of the target
            let lam = random_dist(rng, dim);
            let mu = apply(&lam, &random_doubly_stochastic(rng, dim, 3))?;
            let state = |c: &[f64], rng: &mut ChaCha8Rng| -> Result<BipartitePure> {
                let mut amps = vec![C64::new(0.0, 0.0); dim * dim];
                for (i, w) in c.iter().enumerate() {
                    amps[i * dim + i] = C64::new(w.sqrt(), 0.0);
                }
                let psi = BipartitePure::new(amps, (dim, dim))?;
                Ok(psi.apply_local(&random_unitary(rng, dim), &random_unitary(rng, dim))?)
            };
            let from = state(mu.weights(), rng)?;
            let to = state(lam.weights(), rng)?;
            (obj(Payload::Pure(from)), obj(Payload::Pure(to)))
        }
        other => bail!("no sampler of free pairs for theory `{other}`"),
    })
}

fn monotonicity(cfg: &RunConfig, reg: &TheoryRegistry, rng: &mut ChaCha8Rng) -> Result<Tally> {
    let s = setup(cfg, reg)?;
    let n = cfg.samples.unwrap_or(20);
    let dim = cfg.dim.unwrap_or(2);
    let mut cands = extra_candidates(cfg, reg, &s)?;
    if cands.is_empty() {
        for _ in 0..n {
            cands.push(random_object(rng, s.source, s.source_kind, dim)?);
        }
    }
    let pairs = (0..n)
        .map(|_| free_pair(rng, s.target.id, dim))
        .collect::<Result<Vec<_>>>()?;
    let report = verify_monotonicity(&s.problem(cands, false), &pairs)?;
    Ok((report.checked, report.violations.len(), json!({"violations": report.violations})))
}

fn optimality(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> Result<Tally> {
    let n = cfg.samples.unwrap_or(50);
    let (mut failed, mut competitors) = (Vec::new(), 0usize);
    for k in 0..n {
        let toy = random_toy_problem(rng);
        let prob = &toy.problem;
        let mut ok = true;
        for y in &toy.targets {
            ok &= bf_extension(prob, y, true)? == minimal_extension(prob, y)?.value;
            ok &= bf_extension(prob, y, false)? == maximal_extension(prob, y)?.value;
        }
        ok &= verify_reduction(prob, &prob.candidates)?.passed;
        let opt = verify_optimality_bruteforce(prob, &toy.targets, &TOY_VALUES, OPTIMALITY_BUDGET)?;
        competitors += opt.lower_competitors + opt.upper_competitors;
        if !(ok && opt.passed) {
            failed.push(k);
        }
    }
    Ok((n, failed.len(), json!({"competitors": competitors, "failed_problems": failed})))
}

fn hlp_agreement(cfg: &RunConfig) -> Result<Tally> {
    let dim = cfg.dim.unwrap_or(3);
    let step = cfg.step.unwrap_or(0.05);
    check_grid_step(step)?;
    let points = GridSpec::new(step)?.points(dim)?;
    let mut disagreements = 0;
    for p in &points {
        for q in &points {
            if majorizes(p, q) != exists_uniform_map(p, q)?.is_feasible() {
                disagreements += 1;
            }
        }
    }
    let pairs = points.len() * points.len();
    Ok((pairs, disagreements, json!({"dim": dim, "step": step})))
}

fn data_processing(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> Result<Tally> {
    let n = cfg.samples.unwrap_or(200);
    let dim = cfg.dim.unwrap_or(3);
    let tol = cfg.tolerance.unwrap_or(1e-9);
    let (mut violations, mut worst) = (0, None::<f64>);
    for _ in 0..n {
        let (p, q) = (random_dist(rng, dim), random_dist(rng, dim));
        let cols = rng.gen_range(1..=dim.max(1));
        let m = random_stochastic(rng, dim, cols);
        let (p2, q2) = (apply(&p, &m)?, apply(&q, &m)?);
        let reachable = CDistinguishOracle
            .decide(
                &ResourceRef::new(CDISTINGUISH, Payload::DistPair(p.clone(), q.clone())),
                &ResourceRef::new(CDISTINGUISH, Payload::DistPair(p2.clone(), q2.clone())),
            )?
            .reachable;
        let (before, after) = (kl_divergence(&p, &q)?, kl_divergence(&p2, &q2)?);
        if !reachable || !after.le_with_slack(&before, tol) {
            violations += 1;
        }
        if let (Some(a), Some(b)) = (after.finite(), before.finite()) {
            worst = Some(worst.map_or(a - b, |w| w.max(a - b)));
        }
    }
    Ok((n, violations, json!({"max_increase": worst, "tolerance": tol})))
}

fn coincidence(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> Result<Tally> {
    let n = cfg.samples.unwrap_or(20);
    let bases = cfg.bases.unwrap_or(200);
    let tol = cfg.tolerance.unwrap_or(1e-6);
    let oracle = TheoryRegistry::standard().get(QRAND_QUNIFORM)?.oracle.clone();
    let (mut violations, mut worst, mut advantage) = (0, 0.0f64, 0.0f64);
    for k in 0..n {
        let dim = cfg.dim.unwrap_or(2 + k % 3);
        let rho = random_density(rng, dim);
        let s = spectral_entropy(&rho)?;
        let prob = resource_kan::kan::ExtensionProblem::new(
            shannon_monotone(Variance::Covariant),
            classical_to_quantum(),
            oracle.clone(),
            spectral_candidates(&rho)?,
        )
        .complete(true);
        let basis_seed: u64 = rng.gen();
        let y = ResourceRef::new(QRAND_QUNIFORM, Payload::Density(rho.clone()));
        let lo = minimal_extension(&prob, &y)?.value;
        let hi = maximal_extension(&prob, &y)?.value;
        let searched = measurement_entropy_search(&rho, bases, basis_seed)?;
        let dev = |v: ExtValue| (v.to_f64() - s.to_f64()).abs();
        worst = worst.max(dev(lo)).max(dev(hi));
        let adv = s.to_f64() - searched.to_f64();
        advantage = advantage.max(adv);
        if dev(lo) > tol || dev(hi) > tol || adv > tol {
            violations += 1;
        }
    }
    Ok((
        n,
        violations,
        json!({"max_deviation": worst, "max_search_advantage": advantage, "bases": bases, "tolerance": tol}),
    ))
}
