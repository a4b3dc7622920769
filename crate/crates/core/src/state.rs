//! Pure and mixed states, tensor composition and partial trace.
//!
//! Composite ordering: for a system of dimension `dS` and an apparatus of
//! dimension `dA`, the composite index is `i_system * dA + i_apparatus`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{hermitian_eigendecompose, ComplexMatrix, ComplexVector, ZERO};

pub const NORM_TOL: f64 = 1e-10;
pub const DENSITY_TOL: f64 = 1e-10;

/// A normalized state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: ComplexVector,
}

impl StateVector {
    pub fn new(amplitudes: ComplexVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(StateVector { amplitudes })
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        Self::new(ComplexVector::new(amplitudes)?)
    }

    /// Rescales to unit norm. Fails on the zero vector.
    pub fn normalized(amplitudes: ComplexVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroVector);
        }
        Ok(StateVector {
            amplitudes: amplitudes.scale(Complex64::new(1.0 / norm, 0.0)),
        })
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        StateVector {
            amplitudes: ComplexVector::basis(dim, k),
        }
    }

    pub(crate) fn from_unit_vector(amplitudes: ComplexVector) -> Self {
        debug_assert!((amplitudes.norm() - 1.0).abs() < 1e-8);
        StateVector { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.dim()
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amplitudes
    }

    /// Expansion coefficients c_n = (psi_n|self) against the columns of `basis`.
    pub fn coefficients(&self, basis: &ComplexMatrix) -> Result<Vec<Complex64>> {
        if basis.rows() != self.dim() {
            return Err(Error::DimMismatch {
                expected: basis.rows(),
                found: self.dim(),
            });
        }
        Ok(basis.adjoint().mul_vec(&self.amplitudes).into_vec())
    }
}

/// A Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        validate_density(&matrix, DENSITY_TOL)
    }

    /// For internal results that are valid by construction (rank-one
    /// projectors, partial traces, convex combinations of valid states).
    pub(crate) fn from_trusted(matrix: ComplexMatrix) -> Self {
        DensityMatrix { matrix }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix {
            matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// Tr rho^2
    pub fn purity(&self) -> f64 {
        self.matrix.trace_product(&self.matrix).re
    }
}

/// Which tensor factor to keep in a partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    System,
    Apparatus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompositeDims {
    pub dim_system: usize,
    pub dim_apparatus: usize,
}

impl CompositeDims {
    pub fn new(dim_system: usize, dim_apparatus: usize) -> Result<Self> {
        if dim_system == 0 || dim_apparatus == 0 {
            return Err(Error::InvalidArgument(
                "composite factor dimensions must be positive".into(),
            ));
        }
        Ok(CompositeDims {
            dim_system,
            dim_apparatus,
        })
    }

    pub fn total(&self) -> usize {
        self.dim_system * self.dim_apparatus
    }

    pub fn index(&self, i_system: usize, i_apparatus: usize) -> usize {
        i_system * self.dim_apparatus + i_apparatus
    }

    fn kept(&self, keep: Subsystem) -> usize {
        match keep {
            Subsystem::System => self.dim_system,
            Subsystem::Apparatus => self.dim_apparatus,
        }
    }
}

pub fn validate_density(m: &ComplexMatrix, tol: f64) -> Result<DensityMatrix> {
    m.ensure_square()?;
    let deviation = m.hermitian_deviation();
    if deviation > tol {
        return Err(Error::NotHermitian { deviation });
    }
    let eig = hermitian_eigendecompose(m, tol)?;
    let min_eigenvalue = eig.eigenvalues[0];
    if min_eigenvalue < -tol {
        return Err(Error::NotPositive { min_eigenvalue });
    }
    let trace = m.trace().re;
    if (trace - 1.0).abs() > tol {
        return Err(Error::TraceNotOne { trace });
    }
    Ok(DensityMatrix { matrix: m.clone() })
}

/// |psi><psi|
pub fn projector_of(psi: &StateVector) -> DensityMatrix {
    DensityMatrix::from_trusted(psi.amplitudes.outer(&psi.amplitudes))
}

/// Convex combination sum_k w_k rho_k.
pub fn mix(weights: &[f64], states: &[DensityMatrix]) -> Result<DensityMatrix> {
    if weights.is_empty() || weights.len() != states.len() {
        return Err(Error::BadWeights(format!(
            "{} weights for {} states",
            weights.len(),
            states.len()
        )));
    }
    if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
        return Err(Error::BadWeights(format!("weight {w} is negative or not finite")));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::BadWeights(format!("weights sum to {total}")));
    }
    let dim = states[0].dim();
    if let Some(s) = states.iter().find(|s| s.dim() != dim) {
        return Err(Error::DimMismatch {
            expected: dim,
            found: s.dim(),
        });
    }
    let mut acc = ComplexMatrix::zeros(dim, dim);
    for (w, s) in weights.iter().zip(states) {
        acc = &acc + &s.matrix.scale_real(*w);
    }
    Ok(DensityMatrix::from_trusted(acc))
}

pub fn tensor_state(psi: &StateVector, phi: &StateVector) -> StateVector {
    StateVector::from_unit_vector(psi.amplitudes.kron(&phi.amplitudes))
}

pub fn tensor_density(a: &DensityMatrix, b: &DensityMatrix) -> DensityMatrix {
    DensityMatrix::from_trusted(crate::numerics::kronecker(&a.matrix, &b.matrix))
}

/// Traces out one factor of a bipartite density matrix by direct index summation.
pub fn partial_trace(rho: &DensityMatrix, dims: CompositeDims, keep: Subsystem) -> Result<DensityMatrix> {
    if rho.dim() != dims.total() {
        return Err(Error::DimMismatch {
            expected: dims.total(),
            found: rho.dim(),
        });
    }
    let m = &rho.matrix;
    let (ds, da) = (dims.dim_system, dims.dim_apparatus);
    let mut out = ComplexMatrix::zeros(dims.kept(keep), dims.kept(keep));
    match keep {
        Subsystem::System => {
            for i in 0..ds {
                for j in 0..ds {
                    let mut acc = ZERO;
                    for a in 0..da {
                        acc += m[(i * da + a, j * da + a)];
                    }
                    out[(i, j)] = acc;
                }
            }
        }
        Subsystem::Apparatus => {
            for a in 0..da {
                for b in 0..da {
                    let mut acc = ZERO;
                    for s in 0..ds {
                        acc += m[(s * da + a, s * da + b)];
                    }
                    out[(a, b)] = acc;
                }
            }
        }
    }
    Ok(DensityMatrix::from_trusted(out))
}

/// Reduced state of one factor of a bipartite pure state, computed from
/// amplitudes without forming the composite projector.
pub fn reduced_pure_state(psi: &StateVector, dims: CompositeDims, keep: Subsystem) -> Result<DensityMatrix> {
    if psi.dim() != dims.total() {
        return Err(Error::DimMismatch {
            expected: dims.total(),
            found: psi.dim(),
        });
    }
    let amp = psi.amplitudes.as_slice();
    let (ds, da) = (dims.dim_system, dims.dim_apparatus);
    let n = dims.kept(keep);
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = ZERO;
            match keep {
                Subsystem::System => {
                    for a in 0..da {
                        acc += amp[i * da + a] * amp[j * da + a].conj();
                    }
                }
                Subsystem::Apparatus => {
                    for s in 0..ds {
                        acc += amp[s * da + i] * amp[s * da + j].conj();
                    }
                }
            }
            out[(i, j)] = acc;
        }
    }
    Ok(DensityMatrix::from_trusted(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn plus() -> StateVector {
        StateVector::from_amplitudes(vec![c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)]).unwrap()
    }

    #[test]
    fn projector_examples() {
        let p = projector_of(&StateVector::basis(2, 0));
        assert_eq!(p.matrix(), &ComplexMatrix::from_real_diagonal(&[1.0, 0.0]));

        let half = ComplexMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]).unwrap();
        assert!(projector_of(&plus()).matrix().max_abs_diff(&half) < 1e-15);

        let phased = StateVector::new(plus().amplitudes().scale(Complex64::from_polar(1.0, 0.77))).unwrap();
        assert!(projector_of(&phased).matrix().max_abs_diff(&half) < 1e-12);
    }

    #[test]
    fn unnormalized_rejected() {
        let err = StateVector::from_amplitudes(vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap_err();
        assert!(matches!(err, Error::NotNormalized { .. }));
        assert_eq!(StateVector::normalized(ComplexVector::zeros(3)), Err(Error::ZeroVector));
    }

    #[test]
    fn mix_examples() {
        let e0 = projector_of(&StateVector::basis(2, 0));
        let e1 = projector_of(&StateVector::basis(2, 1));
        assert_eq!(mix(&[1.0], std::slice::from_ref(&e0)).unwrap(), e0);
        let m = mix(&[0.5, 0.5], &[e0.clone(), e1.clone()]).unwrap();
        assert!(m.matrix().max_abs_diff(&ComplexMatrix::from_real_diagonal(&[0.5, 0.5])) < 1e-15);
        let m = mix(&[0.36, 0.64], &[e0.clone(), e1.clone()]).unwrap();
        assert!(
            m.matrix()
                .max_abs_diff(&ComplexMatrix::from_real_diagonal(&[0.36, 0.64]))
                < 1e-15
        );
    }

    #[test]
    fn mix_errors() {
        let e0 = projector_of(&StateVector::basis(2, 0));
        let big = projector_of(&StateVector::basis(3, 0));
        assert!(matches!(
            mix(&[0.5, 0.4], &[e0.clone(), e0.clone()]),
            Err(Error::BadWeights(_))
        ));
        assert!(matches!(
            mix(&[1.5, -0.5], &[e0.clone(), e0.clone()]),
            Err(Error::BadWeights(_))
        ));
        assert!(matches!(mix(&[0.5, 0.5], &[e0, big]), Err(Error::DimMismatch { .. })));
    }

    #[test]
    fn tensor_examples() {
        let e = tensor_state(&StateVector::basis(2, 0), &StateVector::basis(2, 0));
        assert_eq!(e, StateVector::basis(4, 0));
        let t = tensor_state(&plus(), &StateVector::basis(2, 0));
        let expected = [FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2, 0.0];
        for (a, b) in t.amplitudes().as_slice().iter().zip(expected) {
            assert!((a - c(b, 0.0)).norm() < 1e-15);
        }
        assert!((t.amplitudes().norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn partial_trace_product_state() {
        let a = DensityMatrix::new(
            ComplexMatrix::from_rows(vec![vec![c(0.7, 0.0), c(0.1, 0.2)], vec![c(0.1, -0.2), c(0.3, 0.0)]]).unwrap(),
        )
        .unwrap();
        let b = projector_of(&plus());
        let dims = CompositeDims::new(2, 2).unwrap();
        let ab = tensor_density(&a, &b);
        assert!(
            partial_trace(&ab, dims, Subsystem::System)
                .unwrap()
                .matrix()
                .max_abs_diff(a.matrix())
                < 1e-12
        );
        assert!(
            partial_trace(&ab, dims, Subsystem::Apparatus)
                .unwrap()
                .matrix()
                .max_abs_diff(b.matrix())
                < 1e-12
        );
    }

    #[test]
    fn partial_trace_bell() {
        let bell =
            StateVector::from_amplitudes(vec![c(FRAC_1_SQRT_2, 0.0), ZERO, ZERO, c(FRAC_1_SQRT_2, 0.0)]).unwrap();
        let dims = CompositeDims::new(2, 2).unwrap();
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        for keep in [Subsystem::System, Subsystem::Apparatus] {
            let r = partial_trace(&projector_of(&bell), dims, keep).unwrap();
            assert!(r.matrix().max_abs_diff(&half) < 1e-15);
            assert!((r.matrix().trace().re - 1.0).abs() < 1e-15);
            let r2 = reduced_pure_state(&bell, dims, keep).unwrap();
            assert!(r2.matrix().max_abs_diff(r.matrix()) < 1e-15);
        }
    }

    #[test]
    fn partial_trace_dim_mismatch() {
        let dims = CompositeDims::new(2, 3).unwrap();
        let r = projector_of(&StateVector::basis(4, 0));
        assert!(matches!(
            partial_trace(&r, dims, Subsystem::System),
            Err(Error::DimMismatch { .. })
        ));
    }

    #[test]
    fn validate_examples() {
        assert!(validate_density(&ComplexMatrix::from_real_diagonal(&[0.5, 0.5]), 1e-10).is_ok());
        assert!(matches!(
            validate_density(&ComplexMatrix::from_real_diagonal(&[2.0, -1.0]), 1e-10),
            Err(Error::NotPositive { .. })
        ));
        assert!(matches!(
            validate_density(&ComplexMatrix::from_real_diagonal(&[0.6, 0.6]), 1e-10),
            Err(Error::TraceNotOne { .. })
        ));
        let skew = ComplexMatrix::from_real_rows(&[&[0.5, 0.1], &[0.0, 0.5]]).unwrap();
        assert!(matches!(
            validate_density(&skew, 1e-10),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn purity() {
        assert!((projector_of(&plus()).purity() - 1.0).abs() < 1e-12);
        assert!((DensityMatrix::maximally_mixed(2).purity() - 0.5).abs() < 1e-15);
    }
}
