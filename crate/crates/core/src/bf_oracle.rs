//! Brute-force references for cross-checking the engine.
//!
//! Nothing here reuses the engine's reduction code: extensions are recomputed
//! with plain `f64` loops, deterministic maps by exhaustive enumeration.

use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::kan::{ExtensionProblem, FunctorMap};
use crate::pcat::{FinitePreorderOracle, MonotoneSpec, Payload, ResourceRef, Variance};
use crate::prob::{apply, Dist, StochMatrix};
use crate::quantum::{eig_hermitian, haar_unitary, schmidt_rank, BipartitePure, DensityMatrix, C64};
use crate::value::ExtValue;

/// Largest candidate list [`bf_extension`] will walk.
pub const BF_BUDGET: usize = 10_000;
/// Largest number of simplex points a [`GridSpec`] will produce.
pub const MAX_GRID_POINTS: usize = 200_000;
/// Largest domain for exhaustive function enumeration.
pub const MAX_ENUMERATED_FUNCTIONS: usize = 1 << 20;

/// A regular grid on the probability simplex with spacing `step`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    step: f64,
    divisions: usize,
}

impl GridSpec {
    pub fn new(step: f64) -> Result<Self> {
        if !(step > 0.0 && step <= 1.0) {
            return Err(Error::Input(format!("grid step {step} outside (0, 1]")));
        }
        let k = (1.0 / step).round();
        if (k * step - 1.0).abs() > 1e-12 {
            return Err(Error::Input(format!("grid step {step} does not divide 1")));
        }
        Ok(GridSpec {
            step,
            divisions: k as usize,
        })
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn divisions(&self) -> usize {
        self.divisions
    }

    /// Number of grid points on the `n`-simplex: `C(k + n - 1, n - 1)`.
    pub fn count(&self, n: usize) -> usize {
        if n == 0 {
            return 0;
        }
        let (mut c, k) = (1u128, self.divisions as u128);
        for i in 1..n as u128 {
            c = c * (k + i) / i;
            if c > usize::MAX as u128 {
                return usize::MAX;
            }
        }
        c as usize
    }

    /// Every distribution on `n` outcomes with weights in multiples of `step`,
    /// in lexicographic order of the integer counts.
    pub fn points(&self, n: usize) -> Result<Vec<Dist>> {
        let count = self.count(n);
        if count > MAX_GRID_POINTS {
            return Err(Error::SizeLimit {
                what: "simplex grid points",
                size: count,
                limit: MAX_GRID_POINTS,
            });
        }
        let k = self.divisions;
        let mut out = Vec::with_capacity(count);
        let mut counts = vec![0usize; n];
        compositions(&mut counts, 0, k, &mut |c| {
            let w = c.iter().map(|&i| i as f64 / k as f64).collect();
            out.push(Dist::new(w).expect("grid weights sum to one"));
        });
        Ok(out)
    }
}

fn compositions(counts: &mut [usize], at: usize, left: usize, emit: &mut dyn FnMut(&[usize])) {
    if at + 1 == counts.len() {
        counts[at] = left;
        emit(counts);
        return;
    }
    for i in 0..=left {
        counts[at] = i;
        compositions(counts, at + 1, left - i, emit);
    }
}

/// Recomputes the minimal (`minimal = true`) or maximal extension at `y` by a
/// direct loop over the candidates.
pub fn bf_extension(prob: &ExtensionProblem, y: &ResourceRef, minimal: bool) -> Result<ExtValue> {
    if prob.candidates.len() > BF_BUDGET {
        return Err(Error::Budget(BF_BUDGET));
    }
    if !prob.target_oracle.is_exact() {
        return Err(Error::Input("brute force needs an exact oracle".into()));
    }
    let covariant = prob.mono.variance() == Variance::Covariant;
    let take_inf = minimal == covariant;
    let mut acc = if take_inf { f64::INFINITY } else { 0.0 };
    for x in &prob.candidates {
        let kx = prob.functor.map_object(x)?;
        let ok = if minimal {
            prob.target_oracle.decide(y, &kx)?.reachable
        } else {
            prob.target_oracle.decide(&kx, y)?.reachable
        };
        if ok {
            let v = prob.mono.evaluate(x)?.to_f64();
            acc = if take_inf { acc.min(v) } else { acc.max(v) };
        }
    }
    Ok(if acc.is_infinite() {
        ExtValue::INFINITY
    } else {
        ExtValue::Finite(acc)
    })
}

/// Whether some function `f` on outcomes pushes `p` forward to `q`, trying all
/// `|q|^|p|` functions.
pub fn bf_deterministic_map(p: &Dist, q: &Dist, tol: f64) -> Result<Option<Vec<usize>>> {
    let (n, m) = (p.len(), q.len());
    let total = (m as f64).powi(n as i32);
    if total > MAX_ENUMERATED_FUNCTIONS as f64 {
        return Err(Error::SizeLimit {
            what: "enumerated functions",
            size: total.min(usize::MAX as f64) as usize,
            limit: MAX_ENUMERATED_FUNCTIONS,
        });
    }
    let mut f = vec![0usize; n];
    loop {
        let mut pushed = vec![0.0; m];
        for (i, &t) in f.iter().enumerate() {
            pushed[t] += p.weights()[i];
        }
        if pushed.iter().zip(q.weights()).all(|(a, b)| (a - b).abs() <= tol) {
            return Ok(Some(f));
        }
        // odometer increment
        let mut i = 0;
        loop {
            if i == n {
                return Ok(None);
            }
            f[i] += 1;
            if f[i] < m {
                break;
            }
            f[i] = 0;
            i += 1;
        }
    }
}

/// All `n × n` doubly stochastic matrices whose entries are multiples of `step`.
pub fn doubly_stochastic_grid(n: usize, step: f64) -> Result<Vec<StochMatrix>> {
    let grid = GridSpec::new(step)?;
    let k = grid.divisions();
    let rows = grid.count(n);
    if n == 0 || (rows as f64).powi(n as i32 - 1) > MAX_GRID_POINTS as f64 * 10.0 {
        return Err(Error::SizeLimit {
            what: "doubly stochastic grid",
            size: rows,
            limit: MAX_GRID_POINTS,
        });
    }
    let mut row_counts = Vec::with_capacity(rows);
    compositions(&mut vec![0; n], 0, k, &mut |c| row_counts.push(c.to_vec()));
    let mut out = Vec::new();
    let mut chosen: Vec<&[usize]> = Vec::with_capacity(n);
    fill_rows(&row_counts, &mut chosen, &mut vec![0; n], n, k, &mut out);
    Ok(out)
}

fn fill_rows<'a>(
    rows: &'a [Vec<usize>],
    chosen: &mut Vec<&'a [usize]>,
    col: &mut Vec<usize>,
    n: usize,
    k: usize,
    out: &mut Vec<StochMatrix>,
) {
    if chosen.len() + 1 == n {
        // the last row is forced by the column sums
        let last: Vec<usize> = col.iter().map(|&c| k - c).collect();
        let m = chosen
            .iter()
            .copied()
            .chain(std::iter::once(last.as_slice()))
            .map(|r| r.iter().map(|&c| c as f64 / k as f64).collect())
            .collect();
        out.push(StochMatrix::new(m).expect("grid rows are distributions"));
        return;
    }
    for r in rows {
        if r.iter().zip(col.iter()).all(|(a, c)| a + c <= k) {
            for (c, a) in col.iter_mut().zip(r) {
                *c += a;
            }
            chosen.push(r);
            fill_rows(rows, chosen, col, n, k, out);
            chosen.pop();
            for (c, a) in col.iter_mut().zip(r) {
                *c -= a;
            }
        }
    }
}

/// Whether some doubly stochastic grid matrix carries `p` to `q` within `tol`.
/// Sufficient for majorization, not necessary.
pub fn grid_uniform_map(p: &Dist, q: &Dist, step: f64, tol: f64) -> Result<bool> {
    for m in doubly_stochastic_grid(p.len(), step)? {
        if apply(p, &m)?.approx_eq(q, tol) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Upper bound on the Schmidt number of `rho`: the smallest, over sampled
/// pure-state decompositions, of the largest Schmidt rank appearing.
///
/// Trial 0 is the eigendecomposition; trial `t > 0` mixes the weighted
/// eigenvectors by a Haar unitary.
pub fn schmidt_number_upper_bound(rho: &DensityMatrix, dims: (usize, usize), trials: usize, seed: u64) -> Result<usize> {
    if dims.0 > 4 || dims.1 > 4 {
        return Err(Error::SizeLimit {
            what: "local dimension",
            size: dims.0.max(dims.1),
            limit: 4,
        });
    }
    if rho.dim() != dims.0 * dims.1 {
        return Err(Error::Dimension {
            expected: dims.0 * dims.1,
            got: rho.dim(),
        });
    }
    let spec = eig_hermitian(rho)?;
    let support: Vec<usize> = (0..rho.dim())
        .filter(|&i| spec.eigenvalues.weights()[i] > 1e-12)
        .collect();
    let r = support.len();
    // columns: sqrt(lambda_i) v_i
    let weighted: Vec<Vec<C64>> = support
        .iter()
        .map(|&i| {
            let s = spec.eigenvalues.weights()[i].sqrt();
            spec.eigenvectors.column(i).iter().map(|z| z * s).collect()
        })
        .collect();
    let mut best = usize::MAX;
    for t in 0..trials.max(1) {
        let mix = if t == 0 { None } else { Some(haar_unitary(r, seed, t as u64)) };
        let mut worst = 0;
        for k in 0..r {
            let v: Vec<C64> = (0..rho.dim())
                .map(|a| match &mix {
                    None => weighted[k][a],
                    Some(u) => (0..r).map(|i| u[(k, i)] * weighted[i][a]).sum(),
                })
                .collect();
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm <= 1e-9 {
                continue;
            }
            let psi = BipartitePure::new(v.into_iter().map(|z| z / norm).collect(), dims)?;
            worst = worst.max(schmidt_rank(&psi)?);
        }
        best = best.min(worst);
    }
    Ok(best)
}

/// Value grid used for enumerable toy problems.
pub const TOY_VALUES: [ExtValue; 5] = [
    ExtValue::Finite(0.0),
    ExtValue::Finite(0.5),
    ExtValue::Finite(1.0),
    ExtValue::Finite(2.0),
    ExtValue::Infinity,
];

pub const TOY_SOURCE: &str = "toy_source";
pub const TOY_TARGET: &str = "toy_target";

/// A randomly generated finite extension problem.
#[derive(Debug, Clone)]
pub struct ToyProblem {
    pub problem: ExtensionProblem,
    pub targets: Vec<ResourceRef>,
    pub source_oracle: Arc<FinitePreorderOracle>,
    /// `K` on source points.
    pub images: Vec<usize>,
    pub values: Vec<ExtValue>,
}

fn closure_arrows<R: Rng + ?Sized>(rng: &mut R, n: usize, density: f64, allowed: impl Fn(usize, usize) -> bool) -> Vec<(usize, usize)> {
    let mut arrows = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if a != b && allowed(a, b) && rng.gen_bool(density) {
                arrows.push((a, b));
            }
        }
    }
    arrows
}

/// Draws a target preorder on 1 to 8 points, 0 to 6 source points with a
/// random functor into it, a source preorder whose arrows map to target
/// arrows, and a monotone with values in [`TOY_VALUES`].
pub fn random_toy_problem<R: Rng + ?Sized>(rng: &mut R) -> ToyProblem {
    let nt = rng.gen_range(1..=8);
    let density = rng.gen_range(0.05..0.4);
    let target = FinitePreorderOracle::generated_by(nt, &closure_arrows(rng, nt, density, |_, _| true))
        .expect("arrows within range");

    let ns = rng.gen_range(0..=6);
    let images: Vec<usize> = (0..ns).map(|_| rng.gen_range(0..nt)).collect();
    let source_density = rng.gen_range(0.1..0.8);
    let source = FinitePreorderOracle::generated_by(
        ns,
        &closure_arrows(rng, ns, source_density, |a, b| target.reaches(images[a], images[b])),
    )
    .expect("arrows within range");

    let variance = if rng.gen_bool(0.5) {
        Variance::Covariant
    } else {
        Variance::Contravariant
    };
    let raw: Vec<ExtValue> = (0..ns).map(|_| TOY_VALUES[rng.gen_range(0..TOY_VALUES.len())]).collect();
    // push values along the source order until the monotone law holds
    let values: Vec<ExtValue> = (0..ns)
        .map(|j| {
            let preds = (0..ns).filter(|&i| source.reaches(i, j)).map(|i| raw[i]);
            match variance {
                Variance::Covariant => preds.max(),
                Variance::Contravariant => preds.min(),
            }
            .expect("reflexive")
        })
        .collect();

    let table = values.clone();
    let mono = MonotoneSpec::new("toy", variance, move |x| {
        table
            .get(x.as_finite()?)
            .copied()
            .ok_or_else(|| Error::Input("source point out of range".into()))
    });
    let map = images.clone();
    let functor = FunctorMap::new("toy", move |x| {
        let i = x.as_finite()?;
        let t = *map.get(i).ok_or_else(|| Error::Input("source point out of range".into()))?;
        Ok(ResourceRef::new(TOY_TARGET, Payload::Finite(t)))
    });
    let candidates = (0..ns).map(|i| ResourceRef::new(TOY_SOURCE, Payload::Finite(i))).collect();
    let targets = (0..nt).map(|t| ResourceRef::new(TOY_TARGET, Payload::Finite(t))).collect();
    let problem = ExtensionProblem::new(mono, functor, Arc::new(target), candidates).complete(true);
    ToyProblem {
        problem,
        targets,
        source_oracle: Arc::new(source),
        images,
        values,
    }
}
