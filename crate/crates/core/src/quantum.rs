//! Dense complex linear algebra for small quantum systems: density matrices,
//! Kraus channels, the diagonal embedding of classical data, spectra,
//! entropies, partial traces and pure bipartite states.

use nalgebra::{Complex, DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prob::{majorizes, shannon_entropy, Dist, StochMatrix};
use crate::value::ExtValue;

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

/// Largest Hilbert-space dimension handled.
pub const MAX_DIM: usize = 16;
/// Hermiticity, trace and positivity tolerance for density matrices.
pub const STATE_TOL: f64 = 1e-10;
/// Trace-preservation and unitality tolerance for channels.
pub const CHANNEL_TOL: f64 = 1e-9;
/// Schmidt coefficients below this count as zero.
pub const RANK_TOL: f64 = 1e-8;

const MAX_SWEEPS: usize = 100;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn hermiticity_defect(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations. Eigenvalues come back in decreasing order, eigenvectors as the
/// matching columns of a unitary.
pub fn hermitian_eigen(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::Dimension {
            expected: n,
            got: m.ncols(),
        });
    }
    if n > MAX_DIM {
        return Err(Error::SizeLimit {
            what: "matrix dimension",
            size: n,
            limit: MAX_DIM,
        });
    }
    let mut a = (m + m.adjoint()) * c(0.5);
    let mut v = CMatrix::identity(n, n);
    let scale = a.iter().map(|z| z.norm_sqr()).sum::<f64>().max(f64::MIN_POSITIVE);

    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)].norm_sqr())
            .sum();
        if off <= 1e-32 * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::Numerical(format!(
            "Jacobi did not converge in {MAX_SWEEPS} sweeps"
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |r, k| v[(r, order[k])]);
    Ok((values, vectors))
}

// One rotation G = diag-phase · real Givens, chosen so (G† A G)[p][q] = 0.
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let abs = apq.norm();
    if abs < 1e-300 {
        return;
    }
    let n = a.nrows();
    let phase = (apq / abs).conj();
    let tau = (a[(q, q)].re - a[(p, p)].re) / (2.0 * abs);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let cs = 1.0 / (1.0 + t * t).sqrt();
    let sn = t * cs;
    let (g_pp, g_pq, g_qp, g_qq) = (c(cs), c(sn), phase * (-sn), phase * cs);

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * g_pp + akq * g_qp;
        a[(k, q)] = akp * g_pq + akq * g_qq;
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = c(a[(p, p)].re);
    a[(q, q)] = c(a[(q, q)].re);
}

/// A Hermitian, positive semidefinite, unit-trace matrix.
///
/// Serialized as rows of `[re, im]` pairs; rows of plain reals are also accepted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DensityJson", into = "Vec<Vec<[f64; 2]>>")]
pub struct DensityMatrix {
    m: CMatrix,
}

impl DensityMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        let d = m.nrows();
        if d == 0 || d != m.ncols() {
            return Err(Error::InvalidDensity(format!("{}x{} is not square", d, m.ncols())));
        }
        if d > MAX_DIM {
            return Err(Error::SizeLimit {
                what: "density-matrix dimension",
                size: d,
                limit: MAX_DIM,
            });
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidDensity("non-finite entry".into()));
        }
        let herm = hermiticity_defect(&m);
        if herm > STATE_TOL {
            return Err(Error::InvalidDensity(format!("not Hermitian (defect {herm:e})")));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidDensity(format!("trace {tr}")));
        }
        let m = (&m + m.adjoint()) * c(0.5);
        let (values, _) = hermitian_eigen(&m)?;
        if let Some(low) = values.last().filter(|l| **l < -STATE_TOL) {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {low:e}")));
        }
        Ok(DensityMatrix { m })
    }

    /// For matrices produced by trace- and positivity-preserving arithmetic:
    /// restores exact Hermiticity and unit trace without the eigenvalue check.
    pub(crate) fn from_computed(m: CMatrix) -> Self {
        let m = (&m + m.adjoint()) * c(0.5);
        let tr = m.trace().re;
        DensityMatrix { m: m / c(tr) }
    }

    pub fn from_real(rows: &[&[f64]]) -> Result<Self> {
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidDensity("ragged rows".into()));
        }
        Self::new(CMatrix::from_fn(d, d, |i, j| c(rows[i][j])))
    }

    pub fn maximally_mixed(d: usize) -> Self {
        DensityMatrix {
            m: CMatrix::identity(d, d) / c(d as f64),
        }
    }

    /// Projector onto the normalized `psi`.
    pub fn pure(psi: &DVector<C64>) -> Result<Self> {
        let norm = psi.norm();
        if norm.is_nan() || norm <= 0.0 {
            return Err(Error::InvalidPureState("zero vector".into()));
        }
        let psi = psi / c(norm);
        Self::new(&psi * psi.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        let d = self.dim();
        (0..d).all(|i| (0..d).all(|j| i == j || self.m[(i, j)].norm() <= tol))
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.m[(i, i)].re).collect()
    }

    pub fn approx_eq(&self, other: &DensityMatrix, tol: f64) -> bool {
        self.dim() == other.dim() && max_abs(&(&self.m - &other.m)) <= tol
    }

    pub fn kron(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix {
            m: self.m.kronecker(&other.m),
        }
    }

    /// `U ρ U†`.
    pub fn conjugate(&self, u: &CMatrix) -> Result<DensityMatrix> {
        if u.ncols() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: u.ncols(),
            });
        }
        Ok(DensityMatrix::from_computed(u * &self.m * u.adjoint()))
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum DensityJson {
    Complex(Vec<Vec<[f64; 2]>>),
    Real(Vec<Vec<f64>>),
}

impl TryFrom<DensityJson> for DensityMatrix {
    type Error = Error;

    fn try_from(raw: DensityJson) -> Result<Self> {
        match raw {
            DensityJson::Complex(rows) => DensityMatrix::try_from(rows),
            DensityJson::Real(rows) => {
                let rows: Vec<&[f64]> = rows.iter().map(Vec::as_slice).collect();
                DensityMatrix::from_real(&rows)
            }
        }
    }
}

impl TryFrom<Vec<Vec<[f64; 2]>>> for DensityMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<[f64; 2]>>) -> Result<Self> {
        DensityMatrix::new(cmatrix_from_pairs(&rows)?)
    }
}

impl From<DensityMatrix> for Vec<Vec<[f64; 2]>> {
    fn from(d: DensityMatrix) -> Self {
        cmatrix_to_pairs(&d.m)
    }
}

/// Row-major nested `[re, im]` pairs.
pub fn cmatrix_to_pairs(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn cmatrix_from_pairs(rows: &[Vec<[f64; 2]>]) -> Result<CMatrix> {
    let r = rows.len();
    let cols = rows.first().map_or(0, Vec::len);
    if let Some(bad) = rows.iter().find(|row| row.len() != cols) {
        return Err(Error::Dimension {
            expected: cols,
            got: bad.len(),
        });
    }
    Ok(CMatrix::from_fn(r, cols, |i, j| C64::new(rows[i][j][0], rows[i][j][1])))
}

/// Eigenvalues (as a distribution, decreasing) and eigenvectors of a state.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Dist,
    pub eigenvectors: CMatrix,
}

pub fn eig_hermitian(rho: &DensityMatrix) -> Result<Spectrum> {
    let (values, vectors) = hermitian_eigen(rho.matrix())?;
    let clipped: Vec<f64> = values.iter().map(|v| v.clamp(0.0, 1.0)).collect();
    let eigenvalues = Dist::from_unnormalized(clipped)?;
    Ok(Spectrum {
        eigenvalues,
        eigenvectors: vectors,
    })
}

/// A channel `ρ ↦ Σ B ρ B†`; each Kraus operator is `out_dim × in_dim`.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    ops: Vec<CMatrix>,
    in_dim: usize,
    out_dim: usize,
}

impl KrausChannel {
    pub fn new(ops: Vec<CMatrix>) -> Result<Self> {
        let first = ops
            .first()
            .ok_or_else(|| Error::InvalidChannel("no Kraus operators".into()))?;
        let (out_dim, in_dim) = first.shape();
        if let Some(bad) = ops.iter().find(|b| b.shape() != (out_dim, in_dim)) {
            return Err(Error::InvalidChannel(format!(
                "Kraus operator of shape {:?}, expected {:?}",
                bad.shape(),
                (out_dim, in_dim)
            )));
        }
        let chan = KrausChannel {
            ops,
            in_dim,
            out_dim,
        };
        let defect = max_abs(&(chan.completeness() - CMatrix::identity(in_dim, in_dim)));
        if defect > CHANNEL_TOL {
            return Err(Error::InvalidChannel(format!(
                "Σ B†B deviates from identity by {defect:e}"
            )));
        }
        Ok(chan)
    }

    fn completeness(&self) -> CMatrix {
        self.ops
            .iter()
            .fold(CMatrix::zeros(self.in_dim, self.in_dim), |acc, b| acc + b.adjoint() * b)
    }

    pub fn identity(d: usize) -> Self {
        Self::unitary(CMatrix::identity(d, d))
    }

    /// Conjugation by `u`; callers supply a unitary.
    pub fn unitary(u: CMatrix) -> Self {
        let (out_dim, in_dim) = u.shape();
        KrausChannel {
            ops: vec![u],
            in_dim,
            out_dim,
        }
    }

    /// Projective measurement in the computational basis.
    pub fn measure_computational(d: usize) -> Self {
        let ops = (0..d)
            .map(|i| {
                let mut b = CMatrix::zeros(d, d);
                b[(i, i)] = c(1.0);
                b
            })
            .collect();
        KrausChannel {
            ops,
            in_dim: d,
            out_dim: d,
        }
    }

    /// Discards the input and prepares `sigma`.
    pub fn replacement(in_dim: usize, sigma: &DensityMatrix) -> Result<Self> {
        let spec = eig_hermitian(sigma)?;
        let out_dim = sigma.dim();
        let mut ops = Vec::new();
        for (k, &lam) in spec.eigenvalues.weights().iter().enumerate() {
            if lam <= 0.0 {
                continue;
            }
            let ket = spec.eigenvectors.column(k) * c(lam.sqrt());
            for i in 0..in_dim {
                let mut b = CMatrix::zeros(out_dim, in_dim);
                b.set_column(i, &ket);
                ops.push(b);
            }
        }
        Ok(KrausChannel {
            ops,
            in_dim,
            out_dim,
        })
    }

    pub fn kraus_ops(&self) -> &[CMatrix] {
        &self.ops
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    /// `other ∘ self`: first this channel, then `other`.
    pub fn then(&self, other: &KrausChannel) -> Result<KrausChannel> {
        if self.out_dim != other.in_dim {
            return Err(Error::Dimension {
                expected: self.out_dim,
                got: other.in_dim,
            });
        }
        let ops = other
            .ops
            .iter()
            .flat_map(|b2| self.ops.iter().map(move |b1| b2 * b1))
            .collect();
        Ok(KrausChannel {
            ops,
            in_dim: self.in_dim,
            out_dim: other.out_dim,
        })
    }

    fn act(&self, m: &CMatrix) -> CMatrix {
        self.ops
            .iter()
            .fold(CMatrix::zeros(self.out_dim, self.out_dim), |acc, b| {
                acc + b * m * b.adjoint()
            })
    }
}

#[derive(Serialize)]
struct KrausJson {
    in_dim: usize,
    out_dim: usize,
    kraus: Vec<Vec<Vec<[f64; 2]>>>,
}

impl Serialize for KrausChannel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        KrausJson {
            in_dim: self.in_dim,
            out_dim: self.out_dim,
            kraus: self.ops.iter().map(cmatrix_to_pairs).collect(),
        }
        .serialize(s)
    }
}

/// Diagonal density matrix carrying `p`.
pub fn embed_classical(p: &Dist) -> DensityMatrix {
    let n = p.len();
    let mut m = CMatrix::zeros(n, n);
    for (i, &w) in p.weights().iter().enumerate() {
        m[(i, i)] = c(w);
    }
    DensityMatrix { m }
}

/// Kraus form of a stochastic matrix: `B_xy = √M_xy |y⟩⟨x|`.
pub fn embed_stochastic(m: &StochMatrix) -> KrausChannel {
    let (rows, cols) = m.shape();
    let mut ops = Vec::with_capacity(rows * cols);
    for x in 0..rows {
        for y in 0..cols {
            let mut b = CMatrix::zeros(cols, rows);
            b[(y, x)] = c(m.get(x, y).sqrt());
            ops.push(b);
        }
    }
    KrausChannel {
        ops,
        in_dim: rows,
        out_dim: cols,
    }
}

pub fn apply_channel(chan: &KrausChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if chan.in_dim != rho.dim() {
        return Err(Error::Dimension {
            expected: chan.in_dim,
            got: rho.dim(),
        });
    }
    Ok(DensityMatrix::from_computed(chan.act(rho.matrix())))
}

/// Maps the maximally mixed input to the maximally mixed output.
pub fn is_unital(chan: &KrausChannel) -> bool {
    let input = CMatrix::identity(chan.in_dim, chan.in_dim) / c(chan.in_dim as f64);
    let expected = CMatrix::identity(chan.out_dim, chan.out_dim) / c(chan.out_dim as f64);
    max_abs(&(chan.act(&input) - expected)) <= CHANNEL_TOL
}

pub fn spectral_entropy(rho: &DensityMatrix) -> Result<ExtValue> {
    Ok(shannon_entropy(&eig_hermitian(rho)?.eigenvalues))
}

/// Haar-distributed `d × d` unitary, a pure function of `(seed, index)`.
///
/// Gram-Schmidt on a complex Gaussian matrix; stream `index` of a ChaCha
/// generator keyed by `seed` feeds the entries.
pub fn haar_unitary(d: usize, seed: u64, index: u64) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    loop {
        let mut g = CMatrix::from_fn(d, d, |_, _| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            C64::new(re, im)
        });
        if gram_schmidt(&mut g) {
            return g;
        }
    }
}

// Orthonormalizes columns in place; false if they were numerically dependent.
fn gram_schmidt(g: &mut CMatrix) -> bool {
    let d = g.ncols();
    for k in 0..d {
        for j in 0..k {
            let proj = g.column(j).dotc(&g.column(k));
            let cj = g.column(j).clone_owned();
            let mut ck = g.column_mut(k);
            ck -= cj * proj;
        }
        let norm = g.column(k).norm();
        if norm < 1e-10 {
            return false;
        }
        let mut ck = g.column_mut(k);
        ck /= c(norm);
    }
    true
}

/// Outcome statistics `q_j = ⟨b_j|ρ|b_j⟩` of measuring in the columns of `basis`.
pub fn measurement_statistics(rho: &DensityMatrix, basis: &CMatrix) -> Result<Dist> {
    if basis.nrows() != rho.dim() {
        return Err(Error::Dimension {
            expected: rho.dim(),
            got: basis.nrows(),
        });
    }
    let q = (0..basis.ncols())
        .map(|j| {
            let b = basis.column(j);
            (b.adjoint() * rho.matrix() * b)[(0, 0)].re
        })
        .collect();
    Dist::from_unnormalized(q)
}

/// Smallest outcome entropy over the spectral basis and `samples` Haar-random
/// orthonormal bases. Sample `k` depends only on `(seed, k)`, so raising
/// `samples` never raises the result.
pub fn measurement_entropy_search(rho: &DensityMatrix, samples: usize, seed: u64) -> Result<ExtValue> {
    if samples == 0 {
        return Err(Error::Input("at least one sampled basis is required".into()));
    }
    let mut best = spectral_entropy(rho)?;
    for k in 0..samples {
        let basis = haar_unitary(rho.dim(), seed, k as u64);
        let h = shannon_entropy(&measurement_statistics(rho, &basis)?);
        best = best.min(h);
    }
    Ok(best)
}

/// Entropy of the weights of an orthogonal pure-state decomposition. Every
/// such decomposition diagonalizes `rho`, so this is the spectral entropy.
pub fn preparation_entropy(rho: &DensityMatrix) -> Result<ExtValue> {
    spectral_entropy(rho)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subsystem {
    A,
    B,
}

pub fn partial_trace(rho: &DensityMatrix, dims: (usize, usize), keep: Subsystem) -> Result<DensityMatrix> {
    let (da, db) = dims;
    if da * db != rho.dim() {
        return Err(Error::Dimension {
            expected: rho.dim(),
            got: da * db,
        });
    }
    let m = rho.matrix();
    let out = match keep {
        Subsystem::A => CMatrix::from_fn(da, da, |a, a2| {
            (0..db).map(|b| m[(a * db + b, a2 * db + b)]).sum()
        }),
        Subsystem::B => CMatrix::from_fn(db, db, |b, b2| {
            (0..da).map(|a| m[(a * db + b, a * db + b2)]).sum()
        }),
    };
    Ok(DensityMatrix::from_computed(out))
}

/// A unit vector in `C^{d_A} ⊗ C^{d_B}`, indexed `a * d_B + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartitePure {
    amplitudes: DVector<C64>,
    dims: (usize, usize),
}

#[derive(Serialize, Deserialize)]
struct PureJson {
    dims: (usize, usize),
    amplitudes: Vec<[f64; 2]>,
}

impl BipartitePure {
    pub fn new(amplitudes: Vec<C64>, dims: (usize, usize)) -> Result<Self> {
        let (da, db) = dims;
        if da == 0 || db == 0 || da * db != amplitudes.len() {
            return Err(Error::InvalidPureState(format!(
                "{} amplitudes for dimensions {da}x{db}",
                amplitudes.len()
            )));
        }
        if da * db > MAX_DIM {
            return Err(Error::SizeLimit {
                what: "bipartite dimension",
                size: da * db,
                limit: MAX_DIM,
            });
        }
        let v = DVector::from_vec(amplitudes);
        let norm = v.norm();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidPureState(format!("norm {norm}")));
        }
        Ok(BipartitePure {
            amplitudes: v,
            dims,
        })
    }

    /// Normalizes real amplitudes before validating.
    pub fn from_real(amps: &[f64], dims: (usize, usize)) -> Result<Self> {
        let norm = amps.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm.is_nan() || norm <= 0.0 {
            return Err(Error::InvalidPureState("zero vector".into()));
        }
        Self::new(amps.iter().map(|a| c(a / norm)).collect(), dims)
    }

    pub fn product(a: &DVector<C64>, b: &DVector<C64>) -> Result<Self> {
        let v = a.kronecker(b);
        let norm = v.norm();
        Self::new((v / c(norm)).iter().copied().collect(), (a.len(), b.len()))
    }

    /// `Σ_k |kk⟩ / √r` with `r ≤ min(d_A, d_B)` terms.
    pub fn maximally_entangled(dims: (usize, usize), r: usize) -> Result<Self> {
        let (da, db) = dims;
        if r == 0 || r > da.min(db) {
            return Err(Error::InvalidPureState(format!("rank {r} in {da}x{db}")));
        }
        let mut amps = vec![0.0; da * db];
        for k in 0..r {
            amps[k * db + k] = 1.0;
        }
        Self::from_real(&amps, dims)
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn projector(&self) -> DensityMatrix {
        DensityMatrix::from_computed(&self.amplitudes * self.amplitudes.adjoint())
    }

    /// `(u ⊗ v) |ψ⟩` for unitaries `u`, `v` on the two factors.
    pub fn apply_local(&self, u: &CMatrix, v: &CMatrix) -> Result<Self> {
        let (da, db) = self.dims;
        if u.shape() != (da, da) || v.shape() != (db, db) {
            return Err(Error::Dimension {
                expected: da * db,
                got: u.nrows() * v.nrows(),
            });
        }
        let out = u.kronecker(v) * &self.amplitudes;
        Self::new(out.iter().copied().collect(), self.dims)
    }

    pub fn approx_eq(&self, other: &BipartitePure, tol: f64) -> bool {
        self.dims == other.dims
            && self
                .amplitudes
                .iter()
                .zip(other.amplitudes.iter())
                .all(|(a, b)| (a - b).norm() <= tol)
    }
}

impl Serialize for BipartitePure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PureJson {
            dims: self.dims,
            amplitudes: self.amplitudes.iter().map(|z| [z.re, z.im]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BipartitePure {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = PureJson::deserialize(d)?;
        let amps = raw.amplitudes.iter().map(|[re, im]| C64::new(*re, *im)).collect();
        BipartitePure::new(amps, raw.dims).map_err(serde::de::Error::custom)
    }
}

/// Spectrum of the reduced state on `A`, decreasing.
pub fn schmidt_coefficients(psi: &BipartitePure) -> Result<Dist> {
    let reduced = partial_trace(&psi.projector(), psi.dims, Subsystem::A)?;
    Ok(eig_hermitian(&reduced)?.eigenvalues)
}

pub fn schmidt_rank(psi: &BipartitePure) -> Result<usize> {
    Ok(schmidt_coefficients(psi)?
        .weights()
        .iter()
        .filter(|&&w| w >= RANK_TOL)
        .count())
}

/// Pure-state LOCC convertibility `φ → ψ` by Nielsen's criterion: the Schmidt
/// coefficients of `φ` are majorized by those of `ψ`.
pub fn locc_convertible_pure(phi: &BipartitePure, psi: &BipartitePure) -> Result<bool> {
    Ok(majorizes(&schmidt_coefficients(psi)?, &schmidt_coefficients(phi)?))
}
