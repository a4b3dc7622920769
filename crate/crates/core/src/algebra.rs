//! Commutative operator algebras in finite dimension.
//!
//! An abelian algebra generated by commuting observables is represented by
//! its minimal projections: the joint eigenspace projectors `Pi_k`. Every
//! element is `sum_k v_k Pi_k`, the pure states (characters) are the points
//! `k`, and a state restricted to the algebra is a probability vector over
//! those points. That vector is a point of a simplex, so its decomposition
//! into point masses is unique. The full state space of a matrix algebra has
//! no such property, which [`nonunique_decomposition_demo`] exhibits.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, ComplexVector};
use crate::observable::{joint_eigenbasis, Observable};
use crate::state::{mix, projector_of, DensityMatrix, StateVector};

#[derive(Debug, Clone)]
pub struct AbelianAlgebra {
    generators: Vec<Observable>,
    joint_projectors: Vec<ComplexMatrix>,
    characters: Vec<Vec<f64>>,
    /// Orthonormal columns spanning each Pi_k.
    block_bases: Vec<ComplexMatrix>,
}

/// A pure state of the algebra: one joint eigenvalue per generator.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumPoint {
    pub index: usize,
    pub character: Vec<f64>,
    pub multiplicity: usize,
}

/// A probability measure on the (finite) spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralProbabilityMeasure {
    weights: Vec<f64>,
}

impl SpectralProbabilityMeasure {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::BadWeights("empty measure".into()));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < -1e-12) {
            return Err(Error::BadWeights(format!("weight {w} is negative or not finite")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::BadWeights(format!("weights sum to {total}")));
        }
        Ok(SpectralProbabilityMeasure { weights })
    }

    pub fn point_mass(n_points: usize, k: usize) -> Self {
        let mut weights = vec![0.0; n_points];
        weights[k] = 1.0;
        SpectralProbabilityMeasure { weights }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// mu(S) for a set of spectrum points.
    pub fn mass(&self, points: &[usize]) -> f64 {
        points.iter().map(|&k| self.weights[k]).sum()
    }
}

/// The algebra generated by the identity and the given commuting observables.
pub fn generate_algebra(generators: &[Observable], tol: f64) -> Result<AbelianAlgebra> {
    let joint = joint_eigenbasis(generators, tol)?;
    let mut joint_projectors = Vec::with_capacity(joint.blocks.len());
    let mut characters = Vec::with_capacity(joint.blocks.len());
    let mut block_bases = Vec::with_capacity(joint.blocks.len());
    for range in &joint.blocks {
        let q = joint.basis.column_block(range.clone());
        joint_projectors.push(&q * &q.adjoint());
        characters.push(joint.value_tuples[range.start].clone());
        block_bases.push(q);
    }
    Ok(AbelianAlgebra {
        generators: generators.to_vec(),
        joint_projectors,
        characters,
        block_bases,
    })
}

impl AbelianAlgebra {
    pub fn dim(&self) -> usize {
        self.joint_projectors[0].rows()
    }

    pub fn generators(&self) -> &[Observable] {
        &self.generators
    }

    pub fn joint_projectors(&self) -> &[ComplexMatrix] {
        &self.joint_projectors
    }

    pub fn characters(&self) -> &[Vec<f64>] {
        &self.characters
    }

    pub fn n_points(&self) -> usize {
        self.joint_projectors.len()
    }

    /// Points in lexicographic order of their characters.
    pub fn spectrum(&self) -> Vec<SpectrumPoint> {
        self.characters
            .iter()
            .zip(&self.block_bases)
            .enumerate()
            .map(|(index, (character, q))| SpectrumPoint {
                index,
                character: character.clone(),
                multiplicity: q.cols(),
            })
            .collect()
    }

    /// The algebra element sum_k values[k] Pi_k.
    pub fn element(&self, values: &[f64]) -> Result<Observable> {
        if values.len() != self.n_points() {
            return Err(Error::DimMismatch {
                expected: self.n_points(),
                found: values.len(),
            });
        }
        let n = self.dim();
        let m = values
            .iter()
            .zip(&self.joint_projectors)
            .fold(ComplexMatrix::zeros(n, n), |acc, (v, p)| &acc + &p.scale_real(*v));
        Ok(Observable::from_trusted(m.hermitian_part()))
    }

    /// Index of the spectrum point whose projector contains `v`, if any.
    pub fn point_containing(&self, v: &ComplexVector, tol: f64) -> Option<usize> {
        self.block_bases
            .iter()
            .position(|q| (q.adjoint().mul_vec(v).norm_sqr() - v.norm_sqr()).abs() <= tol)
    }

    /// Character values of `element`, or `NotInAlgebra` when it is not
    /// constant on every joint eigenspace.
    pub fn gelfand_transform(&self, element: &Observable, tol: f64) -> Result<Vec<f64>> {
        if element.dim() != self.dim() {
            return Err(Error::DimMismatch {
                expected: self.dim(),
                found: element.dim(),
            });
        }
        let scale = element.matrix().max_abs().max(1.0);
        let mut residual = 0.0f64;
        let mut values = Vec::with_capacity(self.n_points());
        for (k, qk) in self.block_bases.iter().enumerate() {
            let xq = element.matrix() * qk;
            for (l, ql) in self.block_bases.iter().enumerate() {
                let block = &ql.adjoint() * &xq;
                if k == l {
                    let diag = block.diagonal();
                    let mean = diag.iter().map(|z| z.re).sum::<f64>() / diag.len() as f64;
                    let identity = ComplexMatrix::identity(block.rows()).scale_real(mean);
                    residual = residual.max(block.max_abs_diff(&identity));
                    values.push(mean);
                } else {
                    residual = residual.max(block.max_abs());
                }
            }
        }
        if residual > tol * scale {
            return Err(Error::NotInAlgebra { residual });
        }
        Ok(values)
    }

    fn ensure_dim(&self, found: usize) -> Result<()> {
        if found == self.dim() {
            Ok(())
        } else {
            Err(Error::DimMismatch {
                expected: self.dim(),
                found,
            })
        }
    }

    /// mu_k = Tr(rho Pi_k)
    pub fn restrict_state(&self, rho: &DensityMatrix) -> Result<SpectralProbabilityMeasure> {
        self.ensure_dim(rho.dim())?;
        let weights = self
            .block_bases
            .iter()
            .map(|q| q.columns().iter().map(|v| rho.matrix().sandwich(v, v).re).sum())
            .collect();
        SpectralProbabilityMeasure::new(weights)
    }

    /// mu_k = ||Pi_k psi||^2 for a pure state.
    pub fn restrict_pure(&self, psi: &StateVector) -> Result<SpectralProbabilityMeasure> {
        self.ensure_dim(psi.dim())?;
        let weights = self
            .block_bases
            .iter()
            .map(|q| q.adjoint().mul_vec(psi.amplitudes()).norm_sqr())
            .collect();
        SpectralProbabilityMeasure::new(weights)
    }

    /// |(u| a |v)| for every generator a.
    pub fn cross_terms(&self, u: &ComplexVector, v: &ComplexVector) -> Vec<f64> {
        self.generators
            .iter()
            .map(|a| a.matrix().sandwich(u, v).norm())
            .collect()
    }
}

/// sum_k mu_k Pi_k / rank(Pi_k).
///
/// Inside a degenerate block the weight is spread uniformly; the restricted
/// state does not determine anything finer than that.
pub fn proper_mixture_representative(
    measure: &SpectralProbabilityMeasure,
    algebra: &AbelianAlgebra,
) -> Result<DensityMatrix> {
    if measure.len() != algebra.n_points() {
        return Err(Error::DimMismatch {
            expected: algebra.n_points(),
            found: measure.len(),
        });
    }
    let n = algebra.dim();
    let mut m = ComplexMatrix::zeros(n, n);
    for ((w, p), q) in measure
        .weights
        .iter()
        .zip(&algebra.joint_projectors)
        .zip(&algebra.block_bases)
    {
        m = &m + &p.scale_real(w / q.cols() as f64);
    }
    Ok(DensityMatrix::from_trusted(m.hermitian_part()))
}

/// Coordinates of a measure in the simplex of measures on the spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionRecord {
    pub points: Vec<usize>,
    pub weights: Vec<f64>,
}

impl DecompositionRecord {
    /// Rebuilds the measure as sum_k w_k delta_k.
    pub fn recombine(&self, n_points: usize) -> Vec<f64> {
        let mut out = vec![0.0; n_points];
        for (&k, &w) in self.points.iter().zip(&self.weights) {
            out[k] += w;
        }
        out
    }
}

/// Decomposes a measure into point masses. The weight of point k can only be
/// mu({k}), so the decomposition is the unique one.
pub fn verify_unique_decomposition(measure: &SpectralProbabilityMeasure) -> DecompositionRecord {
    let points: Vec<usize> = (0..measure.len()).collect();
    let weights = points.iter().map(|&k| measure.mass(&[k])).collect();
    DecompositionRecord { points, weights }
}

/// A convex decomposition of a density matrix into pure states.
#[derive(Debug, Clone)]
pub struct PureDecomposition {
    pub weights: Vec<f64>,
    pub states: Vec<StateVector>,
}

impl PureDecomposition {
    pub fn combine(&self) -> Result<DensityMatrix> {
        let projectors: Vec<DensityMatrix> = self.states.iter().map(projector_of).collect();
        mix(&self.weights, &projectors)
    }
}

/// Two different pure-state decompositions of the maximally mixed qubit:
/// {e1, e2} and {(e1 + e2)/sqrt 2, (e1 - e2)/sqrt 2}, each with weights 1/2.
pub fn nonunique_decomposition_demo() -> [PureDecomposition; 2] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let r = |x: f64| Complex64::new(x, 0.0);
    let computational = PureDecomposition {
        weights: vec![0.5, 0.5],
        states: vec![StateVector::basis(2, 0), StateVector::basis(2, 1)],
    };
    let hadamard = PureDecomposition {
        weights: vec![0.5, 0.5],
        states: vec![
            StateVector::from_unit_vector(ComplexVector::from_vec_unchecked(vec![r(h), r(h)])),
            StateVector::from_unit_vector(ComplexVector::from_vec_unchecked(vec![r(h), r(-h)])),
        ],
    };
    [computational, hadamard]
}
