//! Dense complex linear algebra with subsystem-aware operations.
//!
//! Everything here is double-precision and dense: matrices are row-major
//! `Vec<Complex64>`, tensor-product structure is carried as an ordered list
//! of subsystem dimensions, and the Hermitian eigensolver is a cyclic Jacobi
//! iteration (the matrices in this crate are small, at most a few hundred on
//! a side, and Jacobi is both simple and extremely accurate at that scale).

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default cap on the number of entries of any dense object built here.
pub const DEFAULT_SIZE_CAP: usize = 1 << 26;

/// Tolerance used when validating Hermiticity / trace / positivity of
/// constructed states.
pub const STATE_TOL: f64 = 1e-10;

/// Logarithm base for entropies. Bound-chain arithmetic uses natural log
/// (the Pinsker constant 1/2 lives in nats); reporting usually uses bits.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum LogBase {
    Two,
    Nat,
}

impl LogBase {
    #[inline]
    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Two => x.log2(),
            LogBase::Nat => x.ln(),
        }
    }
}

/// Dense complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_data(rows: usize, cols: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(rows * cols, data.len(), "entry count must equal rows*cols");
        CMatrix { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
    }

    pub fn diag(entries: &[Complex64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &e) in entries.iter().enumerate() {
            m.set(i, i, e);
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn add_at(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] += v;
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn trace(&self) -> Complex64 {
        debug_assert!(self.is_square());
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    /// Entrywise complex conjugate (no transpose).
    pub fn conj(&self) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn transpose(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn scale(&self, s: Complex64) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                let row_off = i * other.cols;
                let src_off = k * other.cols;
                for j in 0..other.cols {
                    out.data[row_off + j] += a * other.data[src_off + j];
                }
            }
        }
        out
    }

    /// y = A x
    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, x.len());
        let mut y = vec![Complex64::new(0.0, 0.0); self.rows];
        for i in 0..self.rows {
            let mut acc = Complex64::new(0.0, 0.0);
            let off = i * self.cols;
            for j in 0..self.cols {
                acc += self.data[off + j] * x[j];
            }
            y[i] = acc;
        }
        y
    }

    /// y = A† x
    pub fn adjoint_matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.rows, x.len());
        let mut y = vec![Complex64::new(0.0, 0.0); self.cols];
        for i in 0..self.rows {
            let xi = x[i];
            let off = i * self.cols;
            for j in 0..self.cols {
                y[j] += self.data[off + j].conj() * xi;
            }
        }
        y
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        debug_assert!(self.is_square());
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                let d = (self.get(i, j) - self.get(j, i).conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.hermiticity_defect() <= tol
    }

    /// (A + A†)/2
    pub fn hermitize(&self) -> CMatrix {
        debug_assert!(self.is_square());
        CMatrix::from_fn(self.rows, self.cols, |i, j| {
            0.5 * (self.get(i, j) + self.get(j, i).conj())
        })
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }
}

/// Tensor (Kronecker) product with the default size cap.
pub fn kron(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    kron_with_cap(a, b, DEFAULT_SIZE_CAP)
}

/// Tensor product; errors if the result would exceed `cap` entries.
pub fn kron_with_cap(a: &CMatrix, b: &CMatrix, cap: usize) -> Result<CMatrix> {
    let rows = (a.rows() as u128) * (b.rows() as u128);
    let cols = (a.cols() as u128) * (b.cols() as u128);
    let needed = rows * cols;
    if needed > cap as u128 {
        return Err(Error::Size {
            needed,
            cap: cap as u128,
        });
    }
    let (ra, ca) = (a.rows(), a.cols());
    let (rb, cb) = (b.rows(), b.cols());
    let mut out = CMatrix::zeros(ra * rb, ca * cb);
    for i1 in 0..ra {
        for j1 in 0..ca {
            let av = a.get(i1, j1);
            if av.norm_sqr() == 0.0 {
                continue;
            }
            for i2 in 0..rb {
                for j2 in 0..cb {
                    out.set(i1 * rb + i2, j1 * cb + j2, av * b.get(i2, j2));
                }
            }
        }
    }
    Ok(out)
}

/// Result of a Hermitian eigendecomposition: `A = V diag(values) V†` with
/// eigenvalues sorted descending and `V` unitary (eigenvectors as columns).
#[derive(Clone, Debug)]
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl Eigh {
    /// Rebuild `V diag(values) V†`.
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.values.len();
        let v = &self.vectors;
        CMatrix::from_fn(n, n, |i, j| {
            (0..n)
                .map(|k| v.get(i, k) * self.values[k] * v.get(j, k).conj())
                .sum()
        })
    }
}

/// Hermiticity tolerance accepted by [`eigh`].
pub const EIGH_HERMITICITY_TOL: f64 = 1e-8;

/// Hermitian eigendecomposition by cyclic Jacobi rotations.
///
/// The input must be Hermitian within `1e-8` (it is re-symmetrized before
/// iterating, so the decomposition is of `(A+A†)/2`). Eigenvalues come back
/// sorted descending.
pub fn eigh(h: &CMatrix) -> Result<Eigh> {
    if !h.is_square() {
        return Err(Error::arg(format!(
            "eigh requires a square matrix, got {}x{}",
            h.rows(),
            h.cols()
        )));
    }
    if h.hermiticity_defect() > EIGH_HERMITICITY_TOL {
        return Err(Error::arg(format!(
            "eigh requires a Hermitian matrix (defect {:.3e})",
            h.hermiticity_defect()
        )));
    }
    let n = h.rows();
    if n == 0 {
        return Ok(Eigh {
            values: vec![],
            vectors: CMatrix::zeros(0, 0),
        });
    }
    let mut a = h.hermitize();
    let mut v = CMatrix::identity(n);

    let scale: f64 = a.frobenius_norm().max(1e-300);
    let stop = 1e-15 * scale;
    const MAX_SWEEPS: usize = 60;

    for _sweep in 0..MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a.get(p, q).norm_sqr();
            }
        }
        if off.sqrt() <= stop {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                let r = apq.norm();
                if r <= 1e-300 {
                    continue;
                }
                // Phase factor pulls the pivot onto the real axis, then a
                // real Jacobi rotation annihilates it.
                let u = apq / r;
                let app = a.get(p, p).re;
                let aqq = a.get(q, q).re;
                let tau = (aqq - app) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // G restricted to the (p,q) plane:
                //   [ u*c   u*s ]
                //   [ -s    c   ]
                let gpp = u * c;
                let gpq = u * s;
                let gqp = Complex64::new(-s, 0.0);
                let gqq = Complex64::new(c, 0.0);

                // A <- G† A G: rows p,q then columns p,q.
                for j in 0..n {
                    let apj = a.get(p, j);
                    let aqj = a.get(q, j);
                    a.set(p, j, gpp.conj() * apj + gqp.conj() * aqj);
                    a.set(q, j, gpq.conj() * apj + gqq.conj() * aqj);
                }
                for i in 0..n {
                    let aip = a.get(i, p);
                    let aiq = a.get(i, q);
                    a.set(i, p, aip * gpp + aiq * gqp);
                    a.set(i, q, aip * gpq + aiq * gqq);
                }
                // Clean the pivot pair exactly.
                a.set(p, q, Complex64::new(0.0, 0.0));
                a.set(q, p, Complex64::new(0.0, 0.0));
                let dpp = a.get(p, p);
                let dqq = a.get(q, q);
                a.set(p, p, Complex64::new(dpp.re, 0.0));
                a.set(q, q, Complex64::new(dqq.re, 0.0));

                // V <- V G
                for i in 0..n {
                    let vip = v.get(i, p);
                    let viq = v.get(i, q);
                    v.set(i, p, vip * gpp + viq * gqp);
                    v.set(i, q, vip * gpq + viq * gqq);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a.get(i, i).re).collect();
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| v.get(i, order[j]));
    Ok(Eigh { values, vectors })
}

/// Eigenvalues only, descending.
pub fn eigvalsh(h: &CMatrix) -> Result<Vec<f64>> {
    Ok(eigh(h)?.values)
}

/// Trace norm (sum of absolute eigenvalues) of a Hermitian matrix.
pub fn trace_norm(h: &CMatrix) -> Result<f64> {
    if !h.is_hermitian(EIGH_HERMITICITY_TOL) {
        return Err(Error::arg("trace_norm requires a Hermitian matrix"));
    }
    Ok(eigvalsh(h)?.iter().map(|l| l.abs()).sum())
}

/// Binary entropy h(x) = -x log x - (1-x) log(1-x) in the given base.
pub fn binary_entropy(x: f64, base: LogBase) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::arg(format!(
            "binary_entropy requires x in [0,1], got {x}"
        )));
    }
    let mut h = 0.0;
    if x > 0.0 {
        h -= x * base.log(x);
    }
    if x < 1.0 {
        h -= (1.0 - x) * base.log(1.0 - x);
    }
    Ok(h)
}

/// A pure state on a tensor product of subsystems.
#[derive(Clone, Debug)]
pub struct PureState {
    amps: Vec<Complex64>,
    dims: Vec<usize>,
}

impl PureState {
    /// Build a state, checking that the dims multiply out to the amplitude
    /// count and that the norm is 1 within `1e-10`.
    pub fn new(amps: Vec<Complex64>, dims: Vec<usize>) -> Result<Self> {
        let total: usize = dims.iter().product();
        if total != amps.len() || dims.iter().any(|&d| d == 0) {
            return Err(Error::arg(format!(
                "dims {:?} do not match amplitude count {}",
                dims,
                amps.len()
            )));
        }
        if !amps.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::arg("amplitudes must be finite"));
        }
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::arg(format!("state norm {norm} differs from 1")));
        }
        Ok(PureState { amps, dims })
    }

    /// Normalize an arbitrary nonzero vector into a state.
    pub fn normalized(mut amps: Vec<Complex64>, dims: Vec<usize>) -> Result<Self> {
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-150 {
            return Err(Error::arg("cannot normalize a (near-)zero vector"));
        }
        for z in &mut amps {
            *z /= norm;
        }
        PureState::new(amps, dims)
    }

    /// Computational basis state |word⟩ for the given local words.
    pub fn basis_state(word: &[usize], dims: Vec<usize>) -> Result<Self> {
        if word.len() != dims.len() || word.iter().zip(&dims).any(|(&w, &d)| w >= d) {
            return Err(Error::arg("basis word out of range"));
        }
        let total: usize = dims.iter().product();
        let idx = linear_index(word, &dims);
        let mut amps = vec![Complex64::new(0.0, 0.0); total];
        amps[idx] = Complex64::new(1.0, 0.0);
        PureState::new(amps, dims)
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim_total(&self) -> usize {
        self.amps.len()
    }

    pub fn num_sites(&self) -> usize {
        self.dims.len()
    }

    pub fn inner(&self, other: &PureState) -> Complex64 {
        assert_eq!(self.dim_total(), other.dim_total());
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// |ψ⟩⟨ψ| as a density matrix.
    pub fn density(&self) -> DensityMatrix {
        let n = self.dim_total();
        let mat = CMatrix::from_fn(n, n, |i, j| self.amps[i] * self.amps[j].conj());
        DensityMatrix {
            mat,
            dims: self.dims.clone(),
        }
    }

    pub fn max_abs_diff(&self, other: &PureState) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// A density matrix on a tensor product of subsystems.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    mat: CMatrix,
    dims: Vec<usize>,
}

impl DensityMatrix {
    /// Validates Hermiticity and unit trace within `1e-10` and a minimum
    /// eigenvalue of at least `-1e-10`.
    pub fn new(mat: CMatrix, dims: Vec<usize>) -> Result<Self> {
        let total: usize = dims.iter().product();
        if !mat.is_square() || mat.rows() != total || dims.iter().any(|&d| d == 0) {
            return Err(Error::arg(format!(
                "dims {:?} do not match a {}x{} matrix",
                dims,
                mat.rows(),
                mat.cols()
            )));
        }
        if !mat.all_finite() {
            return Err(Error::arg("density matrix entries must be finite"));
        }
        if mat.hermiticity_defect() > STATE_TOL {
            return Err(Error::arg(format!(
                "density matrix is not Hermitian (defect {:.3e})",
                mat.hermiticity_defect()
            )));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::arg(format!("density matrix trace {} is not 1", tr)));
        }
        let min_eig = eigvalsh(&mat)?
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -STATE_TOL {
            return Err(Error::arg(format!(
                "density matrix has negative eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(DensityMatrix { mat, dims })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim_total(&self) -> usize {
        self.mat.rows()
    }

    /// Maximally mixed state I/d on the given dims.
    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let total: usize = dims.iter().product();
        let mat = CMatrix::identity(total).scale(Complex64::new(1.0 / total as f64, 0.0));
        DensityMatrix { mat, dims }
    }

    /// Convex mixture t·self + (1-t)·other.
    pub fn mix(&self, other: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
        if self.dims != other.dims {
            return Err(Error::arg("mix requires identical dims"));
        }
        let mat = self
            .mat
            .scale(Complex64::new(t, 0.0))
            .add(&other.mat.scale(Complex64::new(1.0 - t, 0.0)));
        DensityMatrix::new(mat, self.dims.clone())
    }
}

/// Von Neumann entropy -Σ λ log λ with eigenvalues in [-1e-10, 0) clamped
/// to zero (tiny negatives are floating-point dust from partial traces).
pub fn vn_entropy(rho: &DensityMatrix, base: LogBase) -> f64 {
    let eigs = eigvalsh(rho.matrix()).expect("density matrix is Hermitian by construction");
    entropy_of_spectrum(&eigs, base)
}

/// Entropy of a (sub)normalized spectrum, clamping tiny negatives.
pub fn entropy_of_spectrum(eigs: &[f64], base: LogBase) -> f64 {
    let mut s = 0.0;
    for &l in eigs {
        let l = if l < 0.0 { 0.0 } else { l };
        if l > 0.0 {
            s -= l * base.log(l);
        }
    }
    s
}

/// Schmidt decomposition of a bipartition of a pure state.
#[derive(Clone, Debug)]
pub struct SchmidtDecomposition {
    /// Descending nonnegative coefficients (trailing numerical zeros dropped);
    /// squares sum to 1.
    pub coefficients: Vec<f64>,
    /// Orthonormal left vectors, one column per kept coefficient.
    pub left_vectors: CMatrix,
    /// Orthonormal right vectors, one column per kept coefficient.
    pub right_vectors: CMatrix,
}

impl SchmidtDecomposition {
    /// Largest squared coefficient.
    pub fn top_weight(&self) -> f64 {
        self.coefficients.first().map(|c| c * c).unwrap_or(0.0)
    }

    pub fn squared_coefficients(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c * c).collect()
    }
}

/// Schmidt decomposition across the bipartition (`left_sites`, complement).
///
/// `left_sites` must be a nonempty strict subset of the site indices; sites
/// are reordered so the requested part comes first, then the amplitude
/// vector is reshaped and factored through the Gram matrix of the smaller
/// side.
pub fn schmidt(psi: &PureState, left_sites: &[usize]) -> Result<SchmidtDecomposition> {
    let m = psi.num_sites();
    let mut seen = vec![false; m];
    for &s in left_sites {
        if s >= m || seen[s] {
            return Err(Error::arg("left part must be a set of distinct site indices"));
        }
        seen[s] = true;
    }
    if left_sites.is_empty() || left_sites.len() == m {
        return Err(Error::arg(
            "schmidt cut must be a bipartition into two nonempty parts",
        ));
    }
    let right_sites: Vec<usize> = (0..m).filter(|i| !seen[*i]).collect();
    let mut order: Vec<usize> = left_sites.to_vec();
    order.extend_from_slice(&right_sites);
    let reordered = reorder_sites(psi, &order);

    let d_left: usize = left_sites.iter().map(|&s| psi.dims()[s]).product();
    let d_right: usize = right_sites.iter().map(|&s| psi.dims()[s]).product();

    // A[i,j] amplitude matrix; work with the smaller Gram side.
    let a = CMatrix::from_data(d_left, d_right, reordered.amps().to_vec());
    schmidt_of_matrix(&a)
}

/// Schmidt data of an explicit amplitude matrix A (rows = left index).
pub fn schmidt_of_matrix(a: &CMatrix) -> Result<SchmidtDecomposition> {
    let (dl, dr) = (a.rows(), a.cols());
    let left_small = dl <= dr;
    // Gram matrix of the smaller side.
    let g = if left_small {
        let mut g = CMatrix::zeros(dl, dl);
        for i in 0..dl {
            for j in 0..dl {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..dr {
                    acc += a.get(i, k) * a.get(j, k).conj();
                }
                g.set(i, j, acc);
            }
        }
        g
    } else {
        let mut g = CMatrix::zeros(dr, dr);
        for i in 0..dr {
            for j in 0..dr {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..dl {
                    acc += a.get(k, i).conj() * a.get(k, j);
                }
                g.set(i, j, acc);
            }
        }
        g
    };
    let dec = eigh(&g.hermitize())?;
    // Truncate on the eigenvalue scale: square-rooting rank-deficiency
    // noise (~1e-16) would otherwise fabricate ~1e-8 "coefficients".
    let total: f64 = dec.values.iter().map(|l| l.max(0.0)).sum();
    let keep_tol = 1e-13 * total.max(1e-300);
    let mut coefficients = Vec::new();
    for &l in &dec.values {
        if l > keep_tol || coefficients.is_empty() {
            coefficients.push(l.max(0.0).sqrt());
        }
    }
    let k = coefficients.len();

    // Small-side vectors come straight from the Gram eigenvectors; the other
    // side is recovered through A (or A†) and rescaled by 1/c.
    let mut left_vectors = CMatrix::zeros(dl, k);
    let mut right_vectors = CMatrix::zeros(dr, k);
    for t in 0..k {
        let c = coefficients[t].max(1e-300);
        if left_small {
            let u: Vec<Complex64> = dec.vectors.column(t);
            // right singular vector v = A† u / c; the Schmidt vector on the
            // right side is its entrywise conjugate (so that
            // psi = sum_t c_t left_t ⊗ right_t).
            let v = a.adjoint_matvec(&u);
            for i in 0..dl {
                left_vectors.set(i, t, u[i]);
            }
            for j in 0..dr {
                right_vectors.set(j, t, v[j].conj() / c);
            }
        } else {
            // Gram over right side: G = A†A, eigenvectors are (conjugated)
            // right vectors; u = A v / c.
            let v: Vec<Complex64> = dec.vectors.column(t);
            let u = a.matvec(&v);
            for j in 0..dr {
                right_vectors.set(j, t, v[j].conj());
            }
            for i in 0..dl {
                left_vectors.set(i, t, u[i] / c);
            }
        }
    }
    Ok(SchmidtDecomposition {
        coefficients,
        left_vectors,
        right_vectors,
    })
}

/// Partial trace keeping the listed subsystems (in their original order).
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let dims = rho.dims();
    let m = dims.len();
    if keep.is_empty() {
        return Err(Error::arg("partial_trace requires a nonempty keep set"));
    }
    let mut sorted = keep.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != keep.len() || sorted.iter().any(|&s| s >= m) {
        return Err(Error::arg("keep set must be distinct valid site indices"));
    }
    let keep = sorted;
    let kept_dims: Vec<usize> = keep.iter().map(|&s| dims[s]).collect();
    let d_keep: usize = kept_dims.iter().product();
    let total = rho.dim_total();

    // Precompute each full index's (kept, rest) split.
    let mut kept_part = vec![0usize; total];
    let mut rest_part = vec![0usize; total];
    let is_kept: Vec<bool> = (0..m).map(|s| keep.contains(&s)).collect();
    for idx in 0..total {
        let word = digits(idx, dims);
        let mut kp = 0usize;
        let mut rp = 0usize;
        for s in 0..m {
            if is_kept[s] {
                kp = kp * dims[s] + word[s];
            } else {
                rp = rp * dims[s] + word[s];
            }
        }
        kept_part[idx] = kp;
        rest_part[idx] = rp;
    }

    let mut out = CMatrix::zeros(d_keep, d_keep);
    for i in 0..total {
        for j in 0..total {
            if rest_part[i] == rest_part[j] {
                out.add_at(kept_part[i], kept_part[j], rho.matrix().get(i, j));
            }
        }
    }
    DensityMatrix::new(out.hermitize(), kept_dims)
}

/// Partial transpose of the listed subsystems, as a raw matrix.
pub fn partial_transpose_matrix(mat: &CMatrix, dims: &[usize], part: &[usize]) -> CMatrix {
    let m = dims.len();
    let total: usize = dims.iter().product();
    debug_assert_eq!(mat.rows(), total);
    let flip: Vec<bool> = (0..m).map(|s| part.contains(&s)).collect();
    let mut out = CMatrix::zeros(total, total);
    for i in 0..total {
        let wi = digits(i, dims);
        for j in 0..total {
            let wj = digits(j, dims);
            let mut ii = 0usize;
            let mut jj = 0usize;
            for s in 0..m {
                let (a, b) = if flip[s] { (wj[s], wi[s]) } else { (wi[s], wj[s]) };
                ii = ii * dims[s] + a;
                jj = jj * dims[s] + b;
            }
            out.set(ii, jj, mat.get(i, j));
        }
    }
    out
}

/// Reorder the sites of a pure state: site `k` of the output is site
/// `order[k]` of the input.
pub fn reorder_sites(psi: &PureState, order: &[usize]) -> PureState {
    let dims = psi.dims();
    let m = dims.len();
    assert_eq!(order.len(), m);
    let new_dims: Vec<usize> = order.iter().map(|&s| dims[s]).collect();
    let total = psi.dim_total();
    let mut amps = vec![Complex64::new(0.0, 0.0); total];
    for idx in 0..total {
        let word = digits(idx, dims);
        let mut new_idx = 0usize;
        for k in 0..m {
            new_idx = new_idx * new_dims[k] + word[order[k]];
        }
        amps[new_idx] = psi.amps()[idx];
    }
    PureState {
        amps,
        dims: new_dims,
    }
}

/// Mixed-radix digits of `idx` for the given dims (most significant first).
pub fn digits(idx: usize, dims: &[usize]) -> Vec<usize> {
    let mut word = vec![0usize; dims.len()];
    let mut rem = idx;
    for s in (0..dims.len()).rev() {
        word[s] = rem % dims[s];
        rem /= dims[s];
    }
    word
}

/// Linear index of a mixed-radix word (most significant first).
pub fn linear_index(word: &[usize], dims: &[usize]) -> usize {
    word.iter()
        .zip(dims)
        .fold(0usize, |acc, (&w, &d)| acc * d + w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    const TOL: f64 = 1e-10;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_matrix(rng: &mut impl Rng, n: usize) -> CMatrix {
        CMatrix::from_fn(n, n, |_, _| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
    }

    fn random_hermitian(rng: &mut impl Rng, n: usize) -> CMatrix {
        random_matrix(rng, n).hermitize()
    }

    fn random_state(rng: &mut impl Rng, dims: Vec<usize>) -> PureState {
        let total: usize = dims.iter().product();
        let amps: Vec<Complex64> = (0..total)
            .map(|_| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        PureState::normalized(amps, dims).unwrap()
    }

    #[test]
    fn kron_identity_case() {
        let i2 = CMatrix::identity(2);
        let i4 = kron(&i2, &i2).unwrap();
        assert_eq!(i4.max_abs_diff(&CMatrix::identity(4)), 0.0);
    }

    #[test]
    fn kron_diagonal_product() {
        let a = CMatrix::diag(&[c(1.0, 0.0), c(2.0, 0.0)]);
        let b = CMatrix::diag(&[c(3.0, 0.0), c(4.0, 0.0)]);
        let k = kron(&a, &b).unwrap();
        let expected = CMatrix::diag(&[c(3.0, 0.0), c(4.0, 0.0), c(6.0, 0.0), c(8.0, 0.0)]);
        assert!(k.max_abs_diff(&expected) < TOL);
    }

    #[test]
    fn kron_matches_index_loop_oracle() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let a = random_matrix(&mut rng, 3);
        let b = random_matrix(&mut rng, 2);
        let k = kron(&a, &b).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                for p in 0..2 {
                    for q in 0..2 {
                        let expect = a.get(i, j) * b.get(p, q);
                        assert!((k.get(i * 2 + p, j * 2 + q) - expect).norm() < 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn kron_size_cap_errors() {
        let a = CMatrix::identity(1 << 7);
        let err = kron_with_cap(&a, &a, 1 << 10).unwrap_err();
        assert!(matches!(err, Error::Size { .. }));
    }

    #[test]
    fn eigh_pauli_z() {
        let z = CMatrix::diag(&[c(1.0, 0.0), c(-1.0, 0.0)]);
        let dec = eigh(&z).unwrap();
        assert!((dec.values[0] - 1.0).abs() < TOL);
        assert!((dec.values[1] + 1.0).abs() < TOL);
    }

    #[test]
    fn eigh_identity_multiplicity() {
        let dec = eigh(&CMatrix::identity(5)).unwrap();
        for v in dec.values {
            assert!((v - 1.0).abs() < TOL);
        }
    }

    #[test]
    fn eigh_reconstructs_random_hermitian() {
        let mut rng = ChaCha12Rng::seed_from_u64(42);
        for _ in 0..10 {
            let h = random_hermitian(&mut rng, 8);
            let dec = eigh(&h).unwrap();
            assert!(dec.reconstruct().max_abs_diff(&h) < 1e-12);
            // eigenvectors orthonormal
            let vtv = dec.vectors.adjoint().matmul(&dec.vectors);
            assert!(vtv.max_abs_diff(&CMatrix::identity(8)) < 1e-12);
            // descending
            for w in dec.values.windows(2) {
                assert!(w[0] >= w[1] - 1e-12);
            }
        }
    }

    #[test]
    fn eigh_rejects_non_hermitian() {
        let mut m = CMatrix::zeros(2, 2);
        m.set(0, 1, c(1.0, 0.0));
        assert!(matches!(eigh(&m), Err(Error::Argument(_))));
    }

    #[test]
    fn trace_norm_examples() {
        let d = CMatrix::diag(&[c(1.0, 0.0), c(-1.0, 0.0)]);
        assert!((trace_norm(&d).unwrap() - 2.0).abs() < TOL);

        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let h = random_hermitian(&mut rng, 4);
        let zero = h.sub(&h);
        assert!(trace_norm(&zero).unwrap() < TOL);

        let mut skew = CMatrix::zeros(2, 2);
        skew.set(0, 1, c(1.0, 0.0));
        assert!(trace_norm(&skew).is_err());
    }

    #[test]
    fn trace_norm_dominates_trace() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        for _ in 0..20 {
            let h = random_hermitian(&mut rng, 6);
            assert!(trace_norm(&h).unwrap() >= h.trace().re.abs() - 1e-12);
        }
    }

    #[test]
    fn binary_entropy_values() {
        assert_eq!(binary_entropy(0.0, LogBase::Two).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0, LogBase::Two).unwrap(), 0.0);
        assert!((binary_entropy(0.5, LogBase::Two).unwrap() - 1.0).abs() < TOL);
        // direct high-precision evaluation of h2(0.9)
        assert!((binary_entropy(0.9, LogBase::Two).unwrap() - 0.4689955935892812).abs() < 1e-12);
        // symmetry
        for &x in &[0.1, 0.25, 0.7] {
            let a = binary_entropy(x, LogBase::Nat).unwrap();
            let b = binary_entropy(1.0 - x, LogBase::Nat).unwrap();
            assert!((a - b).abs() < 1e-14);
        }
        assert!(binary_entropy(-0.1, LogBase::Two).is_err());
        assert!(binary_entropy(1.1, LogBase::Two).is_err());
    }

    #[test]
    fn vn_entropy_examples() {
        // pure state
        let psi = PureState::basis_state(&[0, 0], vec![2, 2]).unwrap();
        assert!(vn_entropy(&psi.density(), LogBase::Two).abs() < TOL);
        // maximally mixed
        let mm = DensityMatrix::maximally_mixed(vec![4]);
        assert!((vn_entropy(&mm, LogBase::Two) - 2.0).abs() < TOL);
        // diag(1/2, 1/2, 0)
        let mat = CMatrix::diag(&[c(0.5, 0.0), c(0.5, 0.0), c(0.0, 0.0)]);
        let rho = DensityMatrix::new(mat, vec![3]).unwrap();
        assert!((vn_entropy(&rho, LogBase::Two) - 1.0).abs() < TOL);
    }

    #[test]
    fn vn_entropy_unitary_invariant() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        for _ in 0..5 {
            let h = random_hermitian(&mut rng, 8);
            // build a density matrix out of h's normalized softmax-free spectrum
            let dec = eigh(&h).unwrap();
            let mut vals: Vec<f64> = dec.values.iter().map(|v| v.abs() + 0.01).collect();
            let s: f64 = vals.iter().sum();
            for v in &mut vals {
                *v /= s;
            }
            let diag = CMatrix::diag(&vals.iter().map(|&v| c(v, 0.0)).collect::<Vec<_>>());
            let rho_mat = dec.vectors.matmul(&diag).matmul(&dec.vectors.adjoint());
            let rho = DensityMatrix::new(rho_mat.hermitize(), vec![8]).unwrap();

            // conjugate by the eigenvectors of a different random Hermitian
            let u = eigh(&random_hermitian(&mut rng, 8)).unwrap().vectors;
            let rotated = u.matmul(rho.matrix()).matmul(&u.adjoint());
            let rho2 = DensityMatrix::new(rotated.hermitize(), vec![8]).unwrap();
            let s1 = vn_entropy(&rho, LogBase::Nat);
            let s2 = vn_entropy(&rho2, LogBase::Nat);
            assert!((s1 - s2).abs() < 1e-9, "entropy moved: {s1} vs {s2}");
        }
    }

    #[test]
    fn partial_trace_bell_state() {
        let amps = vec![
            c(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(std::f64::consts::FRAC_1_SQRT_2, 0.0),
        ];
        let bell = PureState::new(amps, vec![2, 2]).unwrap();
        let reduced = partial_trace(&bell.density(), &[0]).unwrap();
        let expected = DensityMatrix::maximally_mixed(vec![2]);
        assert!(reduced.matrix().max_abs_diff(expected.matrix()) < TOL);
    }

    #[test]
    fn partial_trace_product_recovers_factor() {
        let mut rng = ChaCha12Rng::seed_from_u64(13);
        let psi1 = random_state(&mut rng, vec![3]);
        let psi2 = random_state(&mut rng, vec![2]);
        let rho1 = psi1.density();
        let rho2 = psi2.density();
        let joint_mat = kron(rho1.matrix(), rho2.matrix()).unwrap();
        let joint = DensityMatrix::new(joint_mat, vec![3, 2]).unwrap();
        let back = partial_trace(&joint, &[0]).unwrap();
        assert!(back.matrix().max_abs_diff(rho1.matrix()) < 1e-12);
    }

    #[test]
    fn partial_trace_matches_summation_oracle() {
        let mut rng = ChaCha12Rng::seed_from_u64(17);
        let psi = random_state(&mut rng, vec![2, 2, 2]);
        let reduced = partial_trace(&psi.density(), &[0, 2]).unwrap();
        // explicit triple-loop oracle over the discarded middle site
        let mut oracle = CMatrix::zeros(4, 4);
        let amp = |a: usize, b: usize, c_: usize| psi.amps()[a * 4 + b * 2 + c_];
        for a in 0..2 {
            for c_ in 0..2 {
                for a2 in 0..2 {
                    for c2 in 0..2 {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for b in 0..2 {
                            acc += amp(a, b, c_) * amp(a2, b, c2).conj();
                        }
                        oracle.set(a * 2 + c_, a2 * 2 + c2, acc);
                    }
                }
            }
        }
        assert!(reduced.matrix().max_abs_diff(&oracle) < 1e-12);
        assert_eq!(reduced.dims(), &[2, 2]);
    }

    #[test]
    fn partial_trace_empty_keep_errors() {
        let psi = PureState::basis_state(&[0, 0], vec![2, 2]).unwrap();
        assert!(partial_trace(&psi.density(), &[]).is_err());
    }

    #[test]
    fn schmidt_examples() {
        let psi = PureState::basis_state(&[0, 0], vec![2, 2]).unwrap();
        let dec = schmidt(&psi, &[0]).unwrap();
        assert_eq!(dec.coefficients.len(), 1);
        assert!((dec.coefficients[0] - 1.0).abs() < TOL);

        let bell = PureState::new(
            vec![
                c(std::f64::consts::FRAC_1_SQRT_2, 0.0),
                c(0.0, 0.0),
                c(0.0, 0.0),
                c(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            ],
            vec![2, 2],
        )
        .unwrap();
        let dec = schmidt(&bell, &[0]).unwrap();
        assert_eq!(dec.coefficients.len(), 2);
        for c_ in &dec.coefficients {
            assert!((c_ - std::f64::consts::FRAC_1_SQRT_2).abs() < TOL);
        }
    }

    #[test]
    fn schmidt_squares_match_marginal_eigenvalues() {
        let mut rng = ChaCha12Rng::seed_from_u64(23);
        let psi = random_state(&mut rng, vec![4, 4]);
        let dec = schmidt(&psi, &[0]).unwrap();
        let marginal = partial_trace(&psi.density(), &[0]).unwrap();
        let eigs = eigvalsh(marginal.matrix()).unwrap();
        for (i, c_) in dec.coefficients.iter().enumerate() {
            assert!((c_ * c_ - eigs[i]).abs() < 1e-9);
        }
        // reconstruction: psi = sum_i c_i |u_i>|v_i>
        let mut rebuilt = vec![Complex64::new(0.0, 0.0); 16];
        for t in 0..dec.coefficients.len() {
            for i in 0..4 {
                for j in 0..4 {
                    rebuilt[i * 4 + j] += Complex64::new(dec.coefficients[t], 0.0)
                        * dec.left_vectors.get(i, t)
                        * dec.right_vectors.get(j, t);
                }
            }
        }
        let overlap: Complex64 = rebuilt
            .iter()
            .zip(psi.amps())
            .map(|(a, b)| a.conj() * b)
            .sum();
        assert!((overlap.norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn schmidt_cut_validation() {
        let psi = PureState::basis_state(&[0, 0], vec![2, 2]).unwrap();
        assert!(schmidt(&psi, &[]).is_err());
        assert!(schmidt(&psi, &[0, 1]).is_err());
        assert!(schmidt(&psi, &[5]).is_err());
    }

    #[test]
    fn reorder_sites_roundtrip() {
        let mut rng = ChaCha12Rng::seed_from_u64(29);
        let psi = random_state(&mut rng, vec![2, 3, 2]);
        let fwd = reorder_sites(&psi, &[2, 0, 1]);
        assert_eq!(fwd.dims(), &[2, 2, 3]);
        let back = reorder_sites(&fwd, &[1, 2, 0]);
        assert!(back.max_abs_diff(&psi) < 1e-15);
    }

    #[test]
    fn density_matrix_validation() {
        // non-unit trace
        let m = CMatrix::identity(2);
        assert!(DensityMatrix::new(m, vec![2]).is_err());
        // negative eigenvalue
        let m = CMatrix::diag(&[c(1.5, 0.0), c(-0.5, 0.0)]);
        assert!(DensityMatrix::new(m, vec![2]).is_err());
    }
}
