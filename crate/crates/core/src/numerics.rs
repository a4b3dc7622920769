//! Dense complex linear algebra: matrices, vectors, a cyclic Jacobi
//! eigensolver for Hermitian matrices, Kronecker products and the
//! matrix exponential of a Hermitian generator.
//!
//! Everything here is sized for desk-scale quantum systems (dimension up to
//! a few dozen, occasionally a thousand for diagonal operators), so storage is
//! plain row-major `Vec<Complex64>`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Default tolerances shared by the whole crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Max entrywise |M - M^dagger|, scaled by max(1, max|M|).
    pub hermitian: f64,
    /// Relative eigenvalue gap below which two eigenvalues are one outcome.
    pub cluster_rel: f64,
    /// Max entrywise |V^dagger V - I| for an orthonormal set.
    pub ortho: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            hermitian: 1e-10,
            cluster_rel: 1e-8,
            ortho: 1e-10,
        }
    }
}

/// Absolute floor on the cluster tolerance so that a zero (or nearly zero)
/// spectrum still groups its rounding noise together.
const CLUSTER_ABS_FLOOR: f64 = 1e-14;

/// Cluster tolerance for a spectrum whose largest magnitude is `max_abs`.
pub fn cluster_tolerance(max_abs: f64, rel: f64) -> f64 {
    (rel * max_abs).max(CLUSTER_ABS_FLOOR)
}

fn check_finite(z: Complex64) -> Result<Complex64> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::NonFinite)
    }
}

// ---------------------------------------------------------------------------
// Vectors
// ---------------------------------------------------------------------------

#[derive(Clone, PartialEq)]
pub struct ComplexVector {
    entries: Vec<Complex64>,
}

impl ComplexVector {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::BadShape);
        }
        for z in &entries {
            check_finite(*z)?;
        }
        Ok(ComplexVector { entries })
    }

    pub(crate) fn from_vec_unchecked(entries: Vec<Complex64>) -> Self {
        ComplexVector { entries }
    }

    pub fn zeros(dim: usize) -> Self {
        ComplexVector {
            entries: vec![ZERO; dim],
        }
    }

    /// The `k`-th standard basis vector.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.entries[k] = ONE;
        v
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.entries
    }

    /// Inner product (self|other), conjugate-linear in `self`.
    pub fn inner(&self, other: &ComplexVector) -> Complex64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.entries.iter().zip(&other.entries).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, s: Complex64) -> ComplexVector {
        ComplexVector {
            entries: self.entries.iter().map(|z| z * s).collect(),
        }
    }

    /// Kronecker product of two vectors; `self` is the slow index.
    pub fn kron(&self, other: &ComplexVector) -> ComplexVector {
        let mut out = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.entries {
            for b in &other.entries {
                out.push(a * b);
            }
        }
        ComplexVector { entries: out }
    }

    /// |self><other|
    pub fn outer(&self, other: &ComplexVector) -> ComplexMatrix {
        let (n, m) = (self.dim(), other.dim());
        let mut out = ComplexMatrix::zeros(n, m);
        for (i, a) in self.entries.iter().enumerate() {
            if *a == ZERO {
                continue;
            }
            for (j, b) in other.entries.iter().enumerate() {
                out.data[i * m + j] = a * b.conj();
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &ComplexVector) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Index<usize> for ComplexVector {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.entries[i]
    }
}

impl fmt::Debug for ComplexVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.entries).finish()
    }
}

// ---------------------------------------------------------------------------
// Matrices
// ---------------------------------------------------------------------------

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 || rows * cols != data.len() {
            return Err(Error::BadShape);
        }
        for z in &data {
            check_finite(*z)?;
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    /// Builds a matrix from nested rows. All rows must have equal length.
    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::BadShape);
        }
        Self::new(n, m, rows.into_iter().flatten().collect())
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
                .collect(),
        )
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    pub fn from_diagonal(values: &[Complex64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, v) in values.iter().enumerate() {
            m.data[i * n + i] = *v;
        }
        m
    }

    pub fn from_real_diagonal(values: &[f64]) -> Self {
        let c: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_diagonal(&c)
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[ComplexVector]) -> Result<Self> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, ComplexVector::dim);
        if cols == 0 || columns.iter().any(|c| c.dim() != rows) {
            return Err(Error::BadShape);
        }
        let mut m = Self::zeros(rows, cols);
        for (j, c) in columns.iter().enumerate() {
            for i in 0..rows {
                m.data[i * cols + j] = c[i];
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn ensure_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    pub fn column(&self, j: usize) -> ComplexVector {
        ComplexVector {
            entries: (0..self.rows).map(|i| self.data[i * self.cols + j]).collect(),
        }
    }

    pub fn columns(&self) -> Vec<ComplexVector> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn row_vec(&self, i: usize) -> Vec<Complex64> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    /// Sub-matrix made of the columns in `range`.
    pub fn column_block(&self, range: std::ops::Range<usize>) -> ComplexMatrix {
        let w = range.len();
        let mut out = Self::zeros(self.rows, w);
        for i in 0..self.rows {
            for (jj, j) in range.clone().enumerate() {
                out.data[i * w + jj] = self.data[i * self.cols + j];
            }
        }
        out
    }

    pub fn adjoint(&self) -> ComplexMatrix {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j].conj();
            }
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> ComplexMatrix {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols))
            .map(|i| self.data[i * self.cols + i])
            .sum()
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.rows.min(self.cols))
            .map(|i| self.data[i * self.cols + i])
            .collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// ||self - other||_F / max(||other||_F, 1).
    pub fn relative_frobenius_diff(&self, reference: &ComplexMatrix) -> f64 {
        (self - reference).frobenius_norm() / reference.frobenius_norm().max(1.0)
    }

    pub fn mul_vec(&self, v: &ComplexVector) -> ComplexVector {
        assert_eq!(self.cols, v.dim());
        let entries = (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v.as_slice())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect();
        ComplexVector { entries }
    }

    /// Tr(self * other) without forming the product.
    pub fn trace_product(&self, other: &ComplexMatrix) -> Complex64 {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.rows, other.cols);
        let mut acc = ZERO;
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += self.data[i * self.cols + k] * other.data[k * other.cols + i];
            }
        }
        acc
    }

    /// (u| self |v)
    pub fn sandwich(&self, u: &ComplexVector, v: &ComplexVector) -> Complex64 {
        u.inner(&self.mul_vec(v))
    }

    pub fn commutator(&self, other: &ComplexMatrix) -> ComplexMatrix {
        &(self * other) - &(other * self)
    }

    /// Max entrywise deviation from Hermitian symmetry.
    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.rows;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let d = (self.data[i * n + j] - self.data[j * n + i].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Fails with `NotSquare` or `NotHermitian`; tolerance scales with max(1, max|M|).
    pub fn ensure_hermitian(&self, tol: f64) -> Result<()> {
        self.ensure_square()?;
        let deviation = self.hermitian_deviation();
        if deviation > tol * self.max_abs().max(1.0) {
            Err(Error::NotHermitian { deviation })
        } else {
            Ok(())
        }
    }

    /// Max entrywise |self^dagger self - I|: the orthonormality defect of the columns.
    pub fn orthonormality_defect(&self) -> f64 {
        let g = &self.adjoint() * self;
        g.max_abs_diff(&ComplexMatrix::identity(self.cols))
    }

    /// Exact Hermitian part (M + M^dagger)/2.
    pub fn hermitian_part(&self) -> ComplexMatrix {
        let n = self.rows;
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                out.data[i * n + j] = (self.data[i * n + j] + self.data[j * n + i].conj()) * 0.5;
            }
        }
        out
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let (n, m, p) = (self.rows, self.cols, rhs.cols);
        let mut out = ComplexMatrix::zeros(n, p);
        for i in 0..n {
            for k in 0..m {
                let a = self.data[i * m + k];
                if a == ZERO {
                    continue;
                }
                let row = &rhs.data[k * p..(k + 1) * p];
                let dst = &mut out.data[i * p..(i + 1) * p];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self.data[i * self.cols + j];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

// ---------------------------------------------------------------------------
// Eigendecomposition
// ---------------------------------------------------------------------------

/// Eigenvalues (ascending) and the unitary whose columns are the eigenvectors.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigenSystem {
    /// Sum of lambda_k v_k v_k^dagger.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let lambda: Vec<Complex64> = self.eigenvalues.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        &(v * &ComplexMatrix::from_diagonal(&lambda)) * &v.adjoint()
    }
}

const MAX_SWEEPS: usize = 100;

/// Diagonalizes a Hermitian matrix with cyclic complex Jacobi rotations.
///
/// Eigenvectors sharing a degenerate cluster (relative gap below
/// `Tolerances::default().cluster_rel`) are re-orthonormalized after the
/// sweep; within such a cluster only the spanned subspace is meaningful.
pub fn hermitian_eigendecompose(m: &ComplexMatrix, tol: f64) -> Result<EigenSystem> {
    let tols = Tolerances {
        hermitian: tol,
        ..Tolerances::default()
    };
    hermitian_eigendecompose_with(m, &tols)
}

pub fn hermitian_eigendecompose_with(m: &ComplexMatrix, tols: &Tolerances) -> Result<EigenSystem> {
    let n = m.ensure_square()?;
    m.ensure_hermitian(tols.hermitian)?;

    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);

    let scale = a.frobenius_norm();
    if scale > 0.0 {
        for _ in 0..MAX_SWEEPS {
            let off = off_diagonal_norm(&a);
            if off <= f64::EPSILON * 1e-2 * scale {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    jacobi_rotate(&mut a, &mut v, p, q);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));

    let eigenvalues: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    for (new_j, &old_j) in order.iter().enumerate() {
        for i in 0..n {
            eigenvectors[(i, new_j)] = v[(i, old_j)];
        }
    }

    let max_abs = eigenvalues.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    let groups = cluster_eigenvalues(&eigenvalues, cluster_tolerance(max_abs, tols.cluster_rel));
    for group in groups.iter().filter(|g| g.len() > 1) {
        orthonormalize_columns(&mut eigenvectors, group);
    }

    Ok(EigenSystem {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows;
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a.data[i * n + j].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// One two-sided rotation zeroing a[p,q]. The rotation is a phase fix on
/// column q (making a[p,q] real) followed by a real Jacobi rotation.
fn jacobi_rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let n = a.rows;
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Skip rotations that cannot change the diagonal in floating point.
    if mag < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[(p, q)] = ZERO;
        a[(q, p)] = ZERO;
        return;
    }
    let phase = apq / mag; // e^{i phi}
    let theta = (aqq - app) / (2.0 * mag);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let ph_conj = phase.conj();

    // a <- a G ; v <- v G
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * ph_conj * s;
        a[(k, q)] = akp * s + akq * ph_conj * c;
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * ph_conj * s;
        v[(k, q)] = vkp * s + vkq * ph_conj * c;
    }
    // a <- G^dagger a
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * phase * s;
        a[(q, k)] = apk * s + aqk * phase * c;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = Complex64::new(app - t * mag, 0.0);
    a[(q, q)] = Complex64::new(aqq + t * mag, 0.0);
}

/// Modified Gram-Schmidt on the listed columns, in place.
pub(crate) fn orthonormalize_columns(m: &mut ComplexMatrix, columns: &[usize]) {
    let rows = m.rows;
    for (idx, &j) in columns.iter().enumerate() {
        let mut col = m.column(j).into_vec();
        // two passes for numerical orthogonality
        for _ in 0..2 {
            for &prev in &columns[..idx] {
                let proj: Complex64 = (0..rows).map(|i| m[(i, prev)].conj() * col[i]).sum();
                for (i, c) in col.iter_mut().enumerate() {
                    *c -= proj * m[(i, prev)];
                }
            }
        }
        let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            for (i, c) in col.iter().enumerate() {
                m[(i, j)] = c / norm;
            }
        }
    }
}

/// Groups ascending values so that a new group starts exactly where the gap
/// to the previous value exceeds `tol_cluster`.
pub fn cluster_eigenvalues(values: &[f64], tol_cluster: f64) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, &x) in values.iter().enumerate() {
        match groups.last_mut() {
            Some(g) if x - values[i - 1] <= tol_cluster => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    groups
}

/// Kronecker product; block (i, j) of the result is a[i, j] * b.
pub fn kronecker(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = ComplexMatrix::zeros(rows, cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let s = a.data[i * a.cols + j];
            if s == ZERO {
                continue;
            }
            for k in 0..b.rows {
                for l in 0..b.cols {
                    out.data[(i * b.rows + k) * cols + j * b.cols + l] = s * b.data[k * b.cols + l];
                }
            }
        }
    }
    out
}

/// e^{-itH} through the eigendecomposition of H.
pub fn unitary_exp(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eigendecompose(h, Tolerances::default().hermitian)?;
    let phases: Vec<Complex64> = eig
        .eigenvalues
        .iter()
        .map(|&l| Complex64::from_polar(1.0, -t * l))
        .collect();
    let v = &eig.eigenvectors;
    Ok(&(v * &ComplexMatrix::from_diagonal(&phases)) * &v.adjoint())
}

/// Which defining identities a square matrix satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StructuralFlags {
    pub hermitian: bool,
    pub unitary: bool,
    pub projector: bool,
    pub positive_semidefinite: bool,
}

pub fn structural_checks(m: &ComplexMatrix, tol: f64) -> Result<StructuralFlags> {
    let n = m.ensure_square()?;
    let hermitian = m.hermitian_deviation() <= tol;
    let unitary = (&m.adjoint() * m).max_abs_diff(&ComplexMatrix::identity(n)) <= tol;
    let projector = hermitian && (m * m).max_abs_diff(m) <= tol;
    let positive_semidefinite = hermitian
        && hermitian_eigendecompose(m, tol.max(Tolerances::default().hermitian))?
            .eigenvalues
            .first()
            .is_some_and(|&l| l >= -tol);
    Ok(StructuralFlags {
        hermitian,
        unitary,
        projector,
        positive_semidefinite,
    })
}
