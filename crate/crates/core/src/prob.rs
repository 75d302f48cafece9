//! Finite probability distributions, row-stochastic matrices, Lorenz curves,
//! majorization, Shannon entropy and KL divergence.
//!
//! Distributions are row vectors: a stochastic matrix `M` with `|X|` rows and
//! `|Y|` columns sends `p` on `X` to `pM` on `Y`. Logarithms are base 2.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::value::ExtValue;

/// Absolute tolerance for normalization and stochasticity checks.
pub const NORM_TOL: f64 = 1e-12;
/// Inputs within this distance of summing to one are renormalized.
pub const RENORMALIZE_TOL: f64 = 1e-9;
/// Slack in the Lorenz-curve comparison.
pub const MAJORIZATION_SLACK: f64 = 1e-10;

/// A finite probability distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Dist {
    weights: Vec<f64>,
    label: Option<String>,
}

impl Dist {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidDist("empty weight vector".into()));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::InvalidDist(format!("weight {w} is not a probability")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() >= RENORMALIZE_TOL {
            return Err(Error::InvalidDist(format!("weights sum to {total}")));
        }
        let weights = if total != 1.0 {
            weights.into_iter().map(|w| w / total).collect()
        } else {
            weights
        };
        Ok(Dist {
            weights,
            label: None,
        })
    }

    /// Clips round-off negatives to zero and renormalizes. Used for vectors
    /// produced by this crate's own arithmetic (solver witnesses, spectra).
    pub fn from_unnormalized(weights: Vec<f64>) -> Result<Self> {
        let clipped: Vec<f64> = weights.into_iter().map(|w| w.max(0.0)).collect();
        let total: f64 = clipped.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::InvalidDist(format!("cannot normalize total {total}")));
        }
        Dist::new(clipped.into_iter().map(|w| w / total).collect())
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0, "uniform distribution needs at least one outcome");
        Dist {
            weights: vec![1.0 / n as f64; n],
            label: None,
        }
    }

    pub fn point_mass(n: usize, at: usize) -> Self {
        assert!(at < n);
        let mut weights = vec![0.0; n];
        weights[at] = 1.0;
        Dist {
            weights,
            label: None,
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Appends zero-probability outcomes up to length `n`.
    pub fn padded(&self, n: usize) -> Dist {
        let mut weights = self.weights.clone();
        if weights.len() < n {
            weights.resize(n, 0.0);
        }
        Dist {
            weights,
            label: self.label.clone(),
        }
    }

    pub fn is_point_mass(&self) -> bool {
        self.weights.iter().any(|w| (w - 1.0).abs() <= NORM_TOL)
    }

    pub fn approx_eq(&self, other: &Dist, tol: f64) -> bool {
        self.len() == other.len()
            && self
                .weights
                .iter()
                .zip(&other.weights)
                .all(|(a, b)| (a - b).abs() <= tol)
    }

    /// Weights rearranged in increasing order.
    pub fn sorted_increasing(&self) -> Vec<f64> {
        let mut w = self.weights.clone();
        w.sort_by(f64::total_cmp);
        w
    }

    /// Weights rearranged in decreasing order.
    pub fn sorted_decreasing(&self) -> Vec<f64> {
        let mut w = self.weights.clone();
        w.sort_by(|a, b| b.total_cmp(a));
        w
    }
}

impl TryFrom<Vec<f64>> for Dist {
    type Error = Error;

    fn try_from(weights: Vec<f64>) -> Result<Self> {
        Dist::new(weights)
    }
}

impl From<Dist> for Vec<f64> {
    fn from(d: Dist) -> Self {
        d.weights
    }
}

/// A row-stochastic matrix, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct StochMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl StochMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let m = Self::from_rows_unchecked(rows)?;
        for (i, row) in m.entries.chunks(m.cols).enumerate() {
            if let Some(x) = row.iter().find(|x| !x.is_finite() || **x < 0.0) {
                return Err(Error::InvalidStochMatrix(format!("row {i} has entry {x}")));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > NORM_TOL {
                return Err(Error::InvalidStochMatrix(format!("row {i} sums to {s}")));
            }
        }
        Ok(m)
    }

    /// Clips negatives and rescales each row to sum to one. Rejects rows that
    /// were far from stochastic to begin with.
    pub fn from_rows_normalized(rows: Vec<Vec<f64>>, tol: f64) -> Result<Self> {
        let mut m = Self::from_rows_unchecked(rows)?;
        let cols = m.cols;
        for (i, row) in m.entries.chunks_mut(cols).enumerate() {
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > tol || row.iter().any(|x| *x < -tol) {
                return Err(Error::InvalidStochMatrix(format!("row {i} sums to {s}")));
            }
            row.iter_mut().for_each(|x| *x = x.max(0.0));
            let s: f64 = row.iter().sum();
            row.iter_mut().for_each(|x| *x /= s);
        }
        Ok(m)
    }

    fn from_rows_unchecked(rows: Vec<Vec<f64>>) -> Result<Self> {
        let r = rows.len();
        if r == 0 {
            return Err(Error::InvalidStochMatrix("no rows".into()));
        }
        let c = rows[0].len();
        if c == 0 {
            return Err(Error::InvalidStochMatrix("no columns".into()));
        }
        if let Some(bad) = rows.iter().find(|row| row.len() != c) {
            return Err(Error::Dimension {
                expected: c,
                got: bad.len(),
            });
        }
        Ok(StochMatrix {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1.0;
        }
        StochMatrix {
            rows: n,
            cols: n,
            entries,
        }
    }

    /// Every row equal to `row`: the map that forgets its input.
    pub fn constant(rows: usize, row: &Dist) -> Self {
        StochMatrix {
            rows,
            cols: row.len(),
            entries: (0..rows).flat_map(|_| row.weights().iter().copied()).collect(),
        }
    }

    /// The deterministic matrix of a function `x -> f[x]` into `cols` outcomes.
    pub fn from_function(f: &[usize], cols: usize) -> Self {
        let mut entries = vec![0.0; f.len() * cols];
        for (x, &y) in f.iter().enumerate() {
            entries[x * cols + y] = 1.0;
        }
        StochMatrix {
            rows: f.len(),
            cols,
            entries,
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.entries[x * self.cols + y]
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.entries[x * self.cols..(x + 1) * self.cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.entries.chunks(self.cols)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }

    pub fn column_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.cols];
        for row in self.rows() {
            for (s, x) in sums.iter_mut().zip(row) {
                *s += x;
            }
        }
        sums
    }

    /// Matrix product `self · other`, i.e. first `self`, then `other`.
    pub fn compose(&self, other: &StochMatrix) -> Result<StochMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension {
                expected: self.cols,
                got: other.rows,
            });
        }
        let mut entries = vec![0.0; self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    entries[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        Ok(StochMatrix {
            rows: self.rows,
            cols: other.cols,
            entries,
        })
    }
}

impl TryFrom<Vec<Vec<f64>>> for StochMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        StochMatrix::new(rows)
    }
}

impl From<StochMatrix> for Vec<Vec<f64>> {
    fn from(m: StochMatrix) -> Self {
        m.to_rows()
    }
}

/// Piecewise-linear cumulative curve of the increasingly sorted weights.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LorenzCurve {
    points: Vec<(f64, f64)>,
}

impl LorenzCurve {
    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// Linear interpolation of the curve at `x ∈ [0, 1]`.
    pub fn ordinate_at(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        let idx = self.points.partition_point(|&(px, _)| px < x);
        if idx == 0 {
            return self.points[0].1;
        }
        if idx >= self.points.len() {
            return self.points[self.points.len() - 1].1;
        }
        let (x0, y0) = self.points[idx - 1];
        let (x1, y1) = self.points[idx];
        if x1 == x {
            return y1;
        }
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y\n");
        for (x, y) in &self.points {
            let _ = writeln!(out, "{x},{y}");
        }
        out
    }
}

/// `H(p) = -Σ p_i log2 p_i`, with `0 log 0 = 0`.
pub fn shannon_entropy(p: &Dist) -> ExtValue {
    let h: f64 = p
        .weights()
        .iter()
        .filter(|&&w| w > 0.0)
        .map(|&w| -w * w.log2())
        .sum();
    ExtValue::from_nonneg(h)
}

/// `D(p||q) = Σ p_i log2(p_i / q_i)`; infinite when `p` puts mass where `q` has none.
pub fn kl_divergence(p: &Dist, q: &Dist) -> Result<ExtValue> {
    if p.len() != q.len() {
        return Err(Error::Dimension {
            expected: p.len(),
            got: q.len(),
        });
    }
    let mut d = 0.0;
    for (&a, &b) in p.weights().iter().zip(q.weights()) {
        if a == 0.0 {
            continue;
        }
        if b == 0.0 {
            return Ok(ExtValue::INFINITY);
        }
        d += a * (a / b).log2();
    }
    Ok(ExtValue::from_nonneg(d))
}

pub fn lorenz_curve(p: &Dist) -> LorenzCurve {
    let n = p.len() as f64;
    let mut points = Vec::with_capacity(p.len() + 1);
    points.push((0.0, 0.0));
    let mut acc = 0.0;
    let sorted = p.sorted_increasing();
    let last = sorted.len() - 1;
    for (i, w) in sorted.into_iter().enumerate() {
        acc += w;
        // pin the endpoint against round-off in the running sum
        let y = if i == last { 1.0 } else { acc.min(1.0) };
        points.push(((i + 1) as f64 / n, y));
    }
    LorenzCurve { points }
}

/// True iff `q ⪯ p`: the Lorenz curve of `p` nowhere lies above that of `q`.
///
/// Distributions of different lengths are compared after zero-padding the
/// shorter one, which puts both curves on the same knots.
pub fn majorizes(p: &Dist, q: &Dist) -> bool {
    let n = p.len().max(q.len());
    let lp = lorenz_curve(&p.padded(n));
    let lq = lorenz_curve(&q.padded(n));
    lp.points()
        .iter()
        .zip(lq.points())
        .all(|(&(_, yp), &(_, yq))| yp <= yq + MAJORIZATION_SLACK)
}

/// Pushes `p` through `m`: the row vector `pM`.
pub fn apply(p: &Dist, m: &StochMatrix) -> Result<Dist> {
    let (rows, cols) = m.shape();
    if rows != p.len() {
        return Err(Error::Dimension {
            expected: rows,
            got: p.len(),
        });
    }
    let mut out = vec![0.0; cols];
    for (w, row) in p.weights().iter().zip(m.rows()) {
        for (o, x) in out.iter_mut().zip(row) {
            *o += w * x;
        }
    }
    Dist::from_unnormalized(out)
}

pub fn is_deterministic(m: &StochMatrix) -> bool {
    m.rows()
        .flatten()
        .all(|&x| x.abs() <= NORM_TOL || (x - 1.0).abs() <= NORM_TOL)
}

/// Every column sums to `|X| / |Y|`, i.e. the uniform distribution is preserved.
pub fn is_uniform_matrix(m: &StochMatrix) -> bool {
    let (rows, cols) = m.shape();
    let target = rows as f64 / cols as f64;
    m.column_sums()
        .iter()
        .all(|s| (s - target).abs() <= NORM_TOL)
}
