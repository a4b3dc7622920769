//! Hermitian observables and their projection-valued spectral measures.

use std::ops::Range;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{
    cluster_eigenvalues, cluster_tolerance, hermitian_eigendecompose_with, unitary_exp, ComplexMatrix, ComplexVector,
    Tolerances,
};
use crate::state::{DensityMatrix, StateVector};

/// A Hermitian operator. Any Hermitian matrix is accepted.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    matrix: ComplexMatrix,
}

impl Observable {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        matrix.ensure_hermitian(Tolerances::default().hermitian)?;
        Ok(Observable {
            matrix: matrix.hermitian_part(),
        })
    }

    pub fn diagonal(values: &[f64]) -> Self {
        Observable {
            matrix: ComplexMatrix::from_real_diagonal(values),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Observable {
            matrix: ComplexMatrix::identity(dim),
        }
    }

    pub(crate) fn from_trusted(matrix: ComplexMatrix) -> Self {
        Observable { matrix }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// Real polynomial p(A) = sum_k coeffs[k] A^k.
    pub fn polynomial(&self, coeffs: &[f64]) -> Observable {
        let n = self.dim();
        let mut acc = ComplexMatrix::zeros(n, n);
        let mut power = ComplexMatrix::identity(n);
        for (k, &c) in coeffs.iter().enumerate() {
            if k > 0 {
                power = &power * &self.matrix;
            }
            acc = &acc + &power.scale_real(c);
        }
        Observable::from_trusted(acc.hermitian_part())
    }
}

/// Distinct outcomes (ascending) with their mutually orthogonal spectral projectors.
#[derive(Debug, Clone)]
pub struct ProjectionValuedMeasure {
    pub outcomes: Vec<f64>,
    pub projectors: Vec<ComplexMatrix>,
    /// Orthonormal columns spanning each projector's range.
    eigenspaces: Vec<ComplexMatrix>,
}

impl ProjectionValuedMeasure {
    pub fn dim(&self) -> usize {
        self.projectors[0].rows()
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn multiplicities(&self) -> Vec<usize> {
        self.eigenspaces.iter().map(ComplexMatrix::cols).collect()
    }

    pub fn eigenspace(&self, k: usize) -> &ComplexMatrix {
        &self.eigenspaces[k]
    }

    /// PVM of rank-one projectors onto the columns of an orthonormal basis.
    pub fn from_basis(basis: &ComplexMatrix, outcomes: &[f64]) -> Result<Self> {
        if basis.cols() != outcomes.len() {
            return Err(Error::DimMismatch {
                expected: basis.cols(),
                found: outcomes.len(),
            });
        }
        let mut pairs: Vec<(f64, ComplexVector)> = outcomes.iter().copied().zip(basis.columns()).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(ProjectionValuedMeasure {
            outcomes: pairs.iter().map(|p| p.0).collect(),
            projectors: pairs.iter().map(|(_, v)| v.outer(v)).collect(),
            eigenspaces: pairs
                .iter()
                .map(|(_, v)| ComplexMatrix::from_columns(std::slice::from_ref(v)))
                .collect::<Result<_>>()?,
        })
    }

    /// Sum_k lambda_k E_k.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.dim();
        self.outcomes
            .iter()
            .zip(&self.projectors)
            .fold(ComplexMatrix::zeros(n, n), |acc, (l, e)| &acc + &e.scale_real(*l))
    }
}

/// Spectral resolution of `a`; eigenvalues closer than the cluster
/// tolerance become one outcome with a higher-rank projector.
pub fn spectral_decomposition(a: &Observable, tol_cluster_rel: Option<f64>) -> Result<ProjectionValuedMeasure> {
    let tols = Tolerances {
        cluster_rel: tol_cluster_rel.unwrap_or(Tolerances::default().cluster_rel),
        ..Tolerances::default()
    };
    let eig = hermitian_eigendecompose_with(&a.matrix, &tols)?;
    let max_abs = eig.eigenvalues.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let groups = cluster_eigenvalues(&eig.eigenvalues, cluster_tolerance(max_abs, tols.cluster_rel));

    let mut outcomes = Vec::with_capacity(groups.len());
    let mut projectors = Vec::with_capacity(groups.len());
    let mut eigenspaces = Vec::with_capacity(groups.len());
    for g in groups {
        let value = g.iter().map(|&i| eig.eigenvalues[i]).sum::<f64>() / g.len() as f64;
        let block = eig.eigenvectors.column_block(g[0]..g[g.len() - 1] + 1);
        outcomes.push(value);
        projectors.push(&block * &block.adjoint());
        eigenspaces.push(block);
    }
    Ok(ProjectionValuedMeasure {
        outcomes,
        projectors,
        eigenspaces,
    })
}

/// Half-open interval [lo, hi). Infinite endpoints are allowed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x < self.hi
    }
}

/// A finite union of half-open intervals on the real line.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BorelSet {
    intervals: Vec<Interval>,
}

impl BorelSet {
    pub fn empty() -> Self {
        BorelSet::default()
    }

    pub fn real_line() -> Self {
        BorelSet {
            intervals: vec![Interval {
                lo: f64::NEG_INFINITY,
                hi: f64::INFINITY,
            }],
        }
    }

    pub fn interval(lo: f64, hi: f64) -> Self {
        BorelSet {
            intervals: vec![Interval { lo, hi }],
        }
    }

    pub fn union(mut self, other: &BorelSet) -> Self {
        self.intervals.extend_from_slice(&other.intervals);
        self
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|i| i.contains(x))
    }
}

/// E(B): the sum of the spectral projectors whose outcome lies in `set`.
pub fn pvm_restrict(pvm: &ProjectionValuedMeasure, set: &BorelSet) -> ComplexMatrix {
    let n = pvm.dim();
    pvm.outcomes
        .iter()
        .zip(&pvm.projectors)
        .filter(|(l, _)| set.contains(**l))
        .fold(ComplexMatrix::zeros(n, n), |acc, (_, e)| &acc + e)
}

fn ensure_same_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimMismatch { expected, found })
    }
}

/// Norm of [A, B] relative to ||A||_F ||B||_F.
fn relative_commutator(a: &Observable, b: &Observable) -> f64 {
    let scale = a.matrix.frobenius_norm() * b.matrix.frobenius_norm();
    let c = a.matrix.commutator(&b.matrix).max_abs();
    if scale == 0.0 {
        c
    } else {
        c / scale
    }
}

pub fn commutes(a: &Observable, b: &Observable, tol: f64) -> Result<bool> {
    ensure_same_dim(a.dim(), b.dim())?;
    Ok(relative_commutator(a, b) <= tol)
}

/// A common orthonormal eigenbasis of a commuting family.
#[derive(Debug, Clone)]
pub struct JointEigenbasis {
    pub basis: ComplexMatrix,
    /// One value per input observable, for every column.
    pub value_tuples: Vec<Vec<f64>>,
    /// Column ranges of the joint eigenspaces, in lexicographic tuple order.
    pub blocks: Vec<Range<usize>>,
}

/// Simultaneously diagonalizes a commuting family.
///
/// The first observable is decomposed; each of its eigenspaces is then
/// refined by diagonalizing the next observable compressed to that block,
/// and so on. Blocks come out in lexicographic order of their value tuples.
pub fn joint_eigenbasis(observables: &[Observable], tol: f64) -> Result<JointEigenbasis> {
    let first = observables
        .first()
        .ok_or_else(|| Error::InvalidArgument("joint_eigenbasis needs at least one observable".into()))?;
    let n = first.dim();
    for (i, a) in observables.iter().enumerate() {
        ensure_same_dim(n, a.dim())?;
        for (j, b) in observables.iter().enumerate().skip(i + 1) {
            let norm = relative_commutator(a, b);
            if norm > tol {
                return Err(Error::NotCommuting {
                    first: i,
                    second: j,
                    norm,
                });
            }
        }
    }

    let tols = Tolerances::default();
    // (orthonormal columns, values so far)
    let mut blocks: Vec<(ComplexMatrix, Vec<f64>)> = vec![(ComplexMatrix::identity(n), Vec::new())];
    for obs in observables {
        let mut decomposed = Vec::with_capacity(blocks.len());
        let mut max_abs = 0.0f64;
        for (q, values) in blocks {
            let compressed = &(&q.adjoint() * &obs.matrix) * &q;
            let eig = hermitian_eigendecompose_with(&compressed.hermitian_part(), &tols)?;
            max_abs = eig.eigenvalues.iter().fold(max_abs, |m, x| m.max(x.abs()));
            decomposed.push((&q * &eig.eigenvectors, eig.eigenvalues, values));
        }
        let tol_cluster = cluster_tolerance(max_abs, tols.cluster_rel);
        blocks = Vec::new();
        for (cols, eigenvalues, values) in decomposed {
            for g in cluster_eigenvalues(&eigenvalues, tol_cluster) {
                let value = g.iter().map(|&i| eigenvalues[i]).sum::<f64>() / g.len() as f64;
                let mut sub = cols.column_block(g[0]..g[g.len() - 1] + 1);
                if sub.cols() > 1 {
                    let all: Vec<usize> = (0..sub.cols()).collect();
                    crate::numerics::orthonormalize_columns(&mut sub, &all);
                }
                let mut v = values.clone();
                v.push(value);
                blocks.push((sub, v));
            }
        }
    }

    let mut columns = Vec::with_capacity(n);
    let mut value_tuples = Vec::with_capacity(n);
    let mut ranges = Vec::with_capacity(blocks.len());
    for (q, values) in blocks {
        let start = columns.len();
        for j in 0..q.cols() {
            columns.push(q.column(j));
            value_tuples.push(values.clone());
        }
        ranges.push(start..columns.len());
    }
    Ok(JointEigenbasis {
        basis: ComplexMatrix::from_columns(&columns)?,
        value_tuples,
        blocks: ranges,
    })
}

/// Outcomes with their probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    pub outcomes: Vec<f64>,
    pub probabilities: Vec<f64>,
}

impl OutcomeDistribution {
    pub fn new(outcomes: Vec<f64>, probabilities: Vec<f64>) -> Result<Self> {
        if outcomes.len() != probabilities.len() {
            return Err(Error::DimMismatch {
                expected: outcomes.len(),
                found: probabilities.len(),
            });
        }
        if let Some(p) = probabilities.iter().find(|p| !p.is_finite() || **p < -1e-12) {
            return Err(Error::InvariantViolation(format!("negative probability {p}")));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvariantViolation(format!("probabilities sum to {total}")));
        }
        Ok(OutcomeDistribution {
            outcomes,
            probabilities,
        })
    }

    /// Sum_k lambda_k p_k.
    pub fn mean(&self) -> f64 {
        self.outcomes.iter().zip(&self.probabilities).map(|(l, p)| l * p).sum()
    }
}

/// p_k = Tr(rho E_k).
pub fn born_distribution(rho: &DensityMatrix, pvm: &ProjectionValuedMeasure) -> Result<OutcomeDistribution> {
    ensure_same_dim(pvm.dim(), rho.dim())?;
    let probabilities = pvm
        .projectors
        .iter()
        .map(|e| rho.matrix().trace_product(e).re)
        .collect();
    OutcomeDistribution::new(pvm.outcomes.clone(), probabilities)
}

/// p_k = ||E_k psi||^2, evaluated through the eigenspace coordinates.
pub fn born_distribution_pure(psi: &StateVector, pvm: &ProjectionValuedMeasure) -> Result<OutcomeDistribution> {
    ensure_same_dim(pvm.dim(), psi.dim())?;
    let probabilities = pvm
        .eigenspaces
        .iter()
        .map(|q| q.adjoint().mul_vec(psi.amplitudes()).norm_sqr())
        .collect();
    OutcomeDistribution::new(pvm.outcomes.clone(), probabilities)
}

/// Tr(rho A). Fails when the trace has a non-negligible imaginary part.
pub fn expectation(rho: &DensityMatrix, a: &Observable) -> Result<f64> {
    ensure_same_dim(a.dim(), rho.dim())?;
    let z: Complex64 = rho.matrix().trace_product(&a.matrix);
    if z.im.abs() > 1e-10 * a.matrix.max_abs().max(1.0) {
        return Err(Error::NonRealExpectation { imag: z.im });
    }
    Ok(z.re)
}

/// <A^2> - <A>^2
pub fn dispersion(rho: &DensityMatrix, a: &Observable) -> Result<f64> {
    let mean = expectation(rho, a)?;
    let sq = Observable::from_trusted((&a.matrix * &a.matrix).hermitian_part());
    Ok(expectation(rho, &sq)? - mean * mean)
}

/// psi(t) = e^{-itH} psi
pub fn evolve(psi: &StateVector, h: &Observable, t: f64) -> Result<StateVector> {
    ensure_same_dim(h.dim(), psi.dim())?;
    let u = unitary_exp(&h.matrix, t)?;
    let out = u.mul_vec(psi.amplitudes());
    // renormalize away rounding drift; unitarity holds to ~1e-14
    StateVector::normalized(out)
}
