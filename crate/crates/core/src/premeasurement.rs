//! Measurement as a unitary coupling between the measured system S and a
//! pointer apparatus M, next to the collapse map it is compared against.
//!
//! Outcome `j` of the measured observable is registered on the apparatus as
//! the pointer state `Phi_j`, which is pointer-basis column
//! `(ready_index + j) mod dim_apparatus`. Outcome 0 therefore shares its
//! pointer state with the ready state `Phi_0`, as in a controlled-NOT.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::numerics::{kronecker, ComplexMatrix, ComplexVector, Tolerances};
use crate::observable::{spectral_decomposition, Observable, ProjectionValuedMeasure};
use crate::state::{reduced_pure_state, CompositeDims, DensityMatrix, StateVector, Subsystem};

#[derive(Debug, Clone, PartialEq)]
pub struct ApparatusModel {
    dim: usize,
    pointer_basis: ComplexMatrix,
    ready_index: usize,
    pointer_values: Vec<f64>,
}

/// Standard-basis pointer with ready state at column 0.
///
/// `pointer_values` are the eigenvalues of the pointer observable on the
/// registered pointer states; `None` means `0, 1, ..., n_outcomes - 1`.
pub fn build_apparatus(
    n_outcomes: usize,
    dim_apparatus: usize,
    pointer_values: Option<Vec<f64>>,
) -> Result<ApparatusModel> {
    if n_outcomes == 0 {
        return Err(Error::InvalidArgument("an apparatus needs at least one outcome".into()));
    }
    if dim_apparatus < n_outcomes {
        return Err(Error::TooSmall {
            n_outcomes,
            dim_apparatus,
        });
    }
    let pointer_values = pointer_values.unwrap_or_else(|| (0..n_outcomes).map(|j| j as f64).collect());
    if pointer_values.len() != n_outcomes {
        return Err(Error::DimMismatch {
            expected: n_outcomes,
            found: pointer_values.len(),
        });
    }
    if pointer_values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let mut sorted = pointer_values.clone();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidArgument("pointer values must be distinct".into()));
    }
    Ok(ApparatusModel {
        dim: dim_apparatus,
        pointer_basis: ComplexMatrix::identity(dim_apparatus),
        ready_index: 0,
        pointer_values,
    })
}

impl ApparatusModel {
    pub fn with_pointer_basis(mut self, basis: ComplexMatrix) -> Result<Self> {
        if basis.rows() != self.dim || basis.cols() != self.dim {
            return Err(Error::DimMismatch {
                expected: self.dim,
                found: basis.rows(),
            });
        }
        let deviation = basis.orthonormality_defect();
        if deviation > Tolerances::default().ortho {
            return Err(Error::NotOrthonormal { deviation });
        }
        self.pointer_basis = basis;
        Ok(self)
    }

    pub fn with_ready_index(mut self, ready_index: usize) -> Result<Self> {
        if ready_index >= self.dim {
            return Err(Error::InvalidArgument(format!(
                "ready index {ready_index} out of range for dimension {}",
                self.dim
            )));
        }
        self.ready_index = ready_index;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_outcomes(&self) -> usize {
        self.pointer_values.len()
    }

    pub fn pointer_values(&self) -> &[f64] {
        &self.pointer_values
    }

    pub fn pointer_basis(&self) -> &ComplexMatrix {
        &self.pointer_basis
    }

    pub fn ready_index(&self) -> usize {
        self.ready_index
    }

    /// Basis column holding pointer label `k` (any k, taken mod dim).
    fn column_of(&self, k: usize) -> usize {
        (self.ready_index + k) % self.dim
    }

    /// Phi_j, the pointer state registering outcome `j`.
    pub fn pointer_state(&self, j: usize) -> ComplexVector {
        self.pointer_basis.column(self.column_of(j))
    }

    pub fn ready_state(&self) -> StateVector {
        StateVector::from_unit_vector(self.pointer_state(0))
    }

    /// Value assigned to pointer states that register no outcome.
    pub fn idle_value(&self) -> f64 {
        self.pointer_values.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v)) + 1.0
    }

    /// The copied observable on M: `sum_j v_j |Phi_j><Phi_j|`, plus
    /// [`idle_value`](Self::idle_value) on the unused pointer states.
    pub fn pointer_observable(&self) -> Observable {
        let mut m = ComplexMatrix::zeros(self.dim, self.dim);
        let idle = self.idle_value();
        for k in 0..self.dim {
            let value = self.pointer_values.get(k).copied().unwrap_or(idle);
            let phi = self.pointer_state(k);
            m = &m + &phi.outer(&phi).scale_real(value);
        }
        Observable::from_trusted(m.hermitian_part())
    }

    /// Cyclic shift by `j` pointer labels: |Phi_k> -> |Phi_{k+j}>.
    pub fn shift(&self, j: usize) -> ComplexMatrix {
        let mut s = ComplexMatrix::zeros(self.dim, self.dim);
        for c in 0..self.dim {
            let to = self.pointer_basis.column((c + j) % self.dim);
            let from = self.pointer_basis.column(c);
            s = &s + &to.outer(&from);
        }
        s
    }

    /// Per-outcome weights (Phi_j| rho |Phi_j) of an apparatus state.
    pub fn pointer_distribution(&self, rho: &DensityMatrix) -> Result<Vec<f64>> {
        if rho.dim() != self.dim {
            return Err(Error::DimMismatch {
                expected: self.dim,
                found: rho.dim(),
            });
        }
        Ok((0..self.n_outcomes())
            .map(|j| {
                let phi = self.pointer_state(j);
                rho.matrix().sandwich(&phi, &phi).re
            })
            .collect())
    }
}

/// Measured basis psi_j of S, the apparatus, and the coupling unitary U on S (x) M.
#[derive(Debug, Clone)]
pub struct MeasurementModel {
    measured_basis: ComplexMatrix,
    outcomes: Vec<f64>,
    apparatus: ApparatusModel,
    coupling: ComplexMatrix,
}

fn ensure_orthonormal_basis(basis: &ComplexMatrix) -> Result<usize> {
    let n = basis.ensure_square()?;
    let deviation = basis.orthonormality_defect();
    if deviation > Tolerances::default().ortho {
        return Err(Error::NotOrthonormal { deviation });
    }
    Ok(n)
}

/// Builds U as the controlled shift `psi_j (x) Phi_k -> psi_j (x) Phi_{k+j}`.
///
/// The outcome attached to column `j` of `measured_basis` is the apparatus
/// pointer value `j`.
pub fn build_coupling(measured_basis: &ComplexMatrix, apparatus: &ApparatusModel) -> Result<MeasurementModel> {
    let n = ensure_orthonormal_basis(measured_basis)?;
    if apparatus.n_outcomes() != n {
        return Err(Error::DimMismatch {
            expected: n,
            found: apparatus.n_outcomes(),
        });
    }
    let da = apparatus.dim();
    let mut coupling = ComplexMatrix::zeros(n * da, n * da);
    for j in 0..n {
        let psi = measured_basis.column(j);
        coupling = &coupling + &kronecker(&psi.outer(&psi), &apparatus.shift(j));
    }
    Ok(MeasurementModel {
        measured_basis: measured_basis.clone(),
        outcomes: apparatus.pointer_values().to_vec(),
        apparatus: apparatus.clone(),
        coupling,
    })
}

impl MeasurementModel {
    /// Measurement of a nondegenerate observable with a standard pointer of
    /// dimension `dim_apparatus`. Pointer values default to the eigenvalues.
    pub fn for_observable(
        observable: &Observable,
        dim_apparatus: usize,
        pointer_values: Option<Vec<f64>>,
    ) -> Result<Self> {
        let pvm = spectral_decomposition(observable, None)?;
        if let Some((k, &m)) = pvm.multiplicities().iter().enumerate().find(|(_, &m)| m > 1) {
            return Err(Error::Degenerate {
                outcome: pvm.outcomes[k],
                multiplicity: m,
            });
        }
        let columns: Vec<ComplexVector> = (0..pvm.len()).map(|k| pvm.eigenspace(k).column(0)).collect();
        let basis = ComplexMatrix::from_columns(&columns)?;
        let apparatus = build_apparatus(
            pvm.len(),
            dim_apparatus,
            Some(pointer_values.unwrap_or_else(|| pvm.outcomes.clone())),
        )?;
        let mut model = build_coupling(&basis, &apparatus)?;
        model.outcomes = pvm.outcomes;
        Ok(model)
    }

    pub fn measured_basis(&self) -> &ComplexMatrix {
        &self.measured_basis
    }

    /// Eigenvalue lambda_j attached to column j of the measured basis.
    pub fn outcomes(&self) -> &[f64] {
        &self.outcomes
    }

    pub fn apparatus(&self) -> &ApparatusModel {
        &self.apparatus
    }

    pub fn coupling(&self) -> &ComplexMatrix {
        &self.coupling
    }

    pub fn system_dim(&self) -> usize {
        self.measured_basis.rows()
    }

    pub fn dims(&self) -> CompositeDims {
        CompositeDims {
            dim_system: self.system_dim(),
            dim_apparatus: self.apparatus.dim(),
        }
    }

    pub fn measured_pvm(&self) -> Result<ProjectionValuedMeasure> {
        ProjectionValuedMeasure::from_basis(&self.measured_basis, &self.outcomes)
    }

    fn ensure_system_dim(&self, found: usize) -> Result<()> {
        if found == self.system_dim() {
            Ok(())
        } else {
            Err(Error::DimMismatch {
                expected: self.system_dim(),
                found,
            })
        }
    }
}

/// U (psi (x) Phi_0) = sum_j c_j psi_j (x) Phi_j with c_j = (psi_j|psi).
pub fn premeasure(psi: &StateVector, model: &MeasurementModel) -> Result<StateVector> {
    model.ensure_system_dim(psi.dim())?;
    let input = psi.amplitudes().kron(model.apparatus.ready_state().amplitudes());
    StateVector::new(model.coupling.mul_vec(&input))
}

/// U (rho (x) P_Phi0) U^dagger on the composite.
pub fn premeasure_density(rho: &DensityMatrix, model: &MeasurementModel) -> Result<DensityMatrix> {
    model.ensure_system_dim(rho.dim())?;
    let ready = model.apparatus.ready_state();
    let input = kronecker(rho.matrix(), &ready.amplitudes().outer(ready.amplitudes()));
    let u = &model.coupling;
    Ok(DensityMatrix::from_trusted(
        (&(u * &input) * &u.adjoint()).hermitian_part(),
    ))
}

/// Diagonal (psi_n| rho |psi_n) in the measured basis.
pub fn collapse_diagonal(rho: &DensityMatrix, measured_basis: &ComplexMatrix) -> Result<Vec<f64>> {
    let n = ensure_orthonormal_basis(measured_basis)?;
    if rho.dim() != n {
        return Err(Error::DimMismatch {
            expected: n,
            found: rho.dim(),
        });
    }
    Ok(measured_basis
        .columns()
        .iter()
        .map(|psi| rho.matrix().sandwich(psi, psi).re)
        .collect())
}

/// rho -> sum_n (psi_n| rho |psi_n) P_psi_n
pub fn collapse(rho: &DensityMatrix, measured_basis: &ComplexMatrix) -> Result<DensityMatrix> {
    let weights = collapse_diagonal(rho, measured_basis)?;
    let n = rho.dim();
    let mut out = ComplexMatrix::zeros(n, n);
    for (w, psi) in weights.iter().zip(measured_basis.columns()) {
        out = &out + &psi.outer(&psi).scale_real(*w);
    }
    Ok(DensityMatrix::from_trusted(out.hermitian_part()))
}

/// Reduced state of M after tracing out S.
pub fn apparatus_reduced_state(composite: &StateVector, dims: CompositeDims) -> Result<DensityMatrix> {
    reduced_pure_state(composite, dims, Subsystem::Apparatus)
}

/// One simulated run.
///
/// `post_state` is the measured eigenvector for the drawn outcome. It is a
/// reporting convention only; the simulator makes no claim that S continues
/// its evolution in that state.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledOutcome {
    pub index: usize,
    pub value: f64,
    pub post_state: StateVector,
}

/// Index drawn from a discrete distribution with one uniform variate.
pub fn sample_index<R: Rng + ?Sized>(probabilities: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last_nonzero = 0;
    for (k, &p) in probabilities.iter().enumerate() {
        if p > 0.0 {
            last_nonzero = k;
        }
        acc += p;
        if u < acc {
            return k;
        }
    }
    last_nonzero
}

pub fn outcome_probabilities(psi: &StateVector, model: &MeasurementModel) -> Result<Vec<f64>> {
    model.ensure_system_dim(psi.dim())?;
    Ok(psi
        .coefficients(&model.measured_basis)?
        .iter()
        .map(Complex64::norm_sqr)
        .collect())
}

pub fn sample_outcome<R: Rng + ?Sized>(
    psi: &StateVector,
    model: &MeasurementModel,
    rng: &mut R,
) -> Result<SampledOutcome> {
    let probabilities = outcome_probabilities(psi, model)?;
    let index = sample_index(&probabilities, rng);
    Ok(SampledOutcome {
        index,
        value: model.outcomes[index],
        post_state: StateVector::from_unit_vector(model.measured_basis.column(index)),
    })
}

/// Coupling on M (x) M1 by which `relay` copies the pointer reading of `source`:
/// `Phi_k (x) Phi'_m -> Phi_k (x) Phi'_{m+k}`.
pub fn relay_coupling(source: &ApparatusModel, relay: &ApparatusModel) -> ComplexMatrix {
    let (ds, dr) = (source.dim(), relay.dim());
    let mut u = ComplexMatrix::zeros(ds * dr, ds * dr);
    for k in 0..ds {
        let phi = source.pointer_state(k);
        u = &u + &kronecker(&phi.outer(&phi), &relay.shift(k));
    }
    u
}

/// Premeasurement followed by a relay apparatus reading M. The result lives
/// on S (x) M (x) M1 with S the slowest index.
pub fn premeasure_chain(psi: &StateVector, model: &MeasurementModel, relay: &ApparatusModel) -> Result<StateVector> {
    if relay.n_outcomes() != model.apparatus.n_outcomes() {
        return Err(Error::DimMismatch {
            expected: model.apparatus.n_outcomes(),
            found: relay.n_outcomes(),
        });
    }
    let stage_one = premeasure(psi, model)?;
    let extended = stage_one.amplitudes().kron(relay.ready_state().amplitudes());
    let u = kronecker(
        &ComplexMatrix::identity(model.system_dim()),
        &relay_coupling(&model.apparatus, relay),
    );
    StateVector::new(u.mul_vec(&extended))
}

/// Reduced state of the final relay apparatus after tracing out S and M.
pub fn relay_reduced_state(
    chain_state: &StateVector,
    model: &MeasurementModel,
    relay: &ApparatusModel,
) -> Result<DensityMatrix> {
    let dims = CompositeDims::new(model.system_dim() * model.apparatus.dim(), relay.dim())?;
    reduced_pure_state(chain_state, dims, Subsystem::Apparatus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::structural_checks;
    use crate::rng::master_stream;
    use crate::state::projector_of;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn qubit_model() -> MeasurementModel {
        let app = build_apparatus(2, 2, None).unwrap();
        build_coupling(&ComplexMatrix::identity(2), &app).unwrap()
    }

    #[test]
    fn apparatus_examples() {
        let a = build_apparatus(2, 2, None).unwrap();
        assert_eq!(a.pointer_state(0), ComplexVector::basis(2, 0));
        assert_eq!(a.pointer_state(1), ComplexVector::basis(2, 1));
        assert_eq!(a.ready_state().amplitudes(), &ComplexVector::basis(2, 0));

        let a = build_apparatus(2, 5, None).unwrap();
        assert_eq!(a.pointer_state(1), ComplexVector::basis(5, 1));
        assert_eq!(a.dim(), 5);

        assert_eq!(
            build_apparatus(3, 2, None),
            Err(Error::TooSmall {
                n_outcomes: 3,
                dim_apparatus: 2
            })
        );
        assert!(build_apparatus(2, 2, Some(vec![1.0, 1.0])).is_err());
    }

    #[test]
    fn ready_index_moves_pointer_labels() {
        let a = build_apparatus(2, 3, None).unwrap().with_ready_index(2).unwrap();
        assert_eq!(a.pointer_state(0), ComplexVector::basis(3, 2));
        assert_eq!(a.pointer_state(1), ComplexVector::basis(3, 0));
        let m = build_coupling(&ComplexMatrix::identity(2), &a).unwrap();
        let out = premeasure(&StateVector::basis(2, 1), &m).unwrap();
        assert_eq!(out.amplitudes(), &ComplexVector::basis(6, 3));
        assert!(a.clone().with_ready_index(3).is_err());
    }

    #[test]
    fn cnot_pattern_for_two_outcomes() {
        // psi_0 (x) Phi_k -> psi_0 (x) Phi_k ; psi_1 (x) Phi_k -> psi_1 (x) Phi_{k+1}
        let expected = ComplexMatrix::from_real_rows(&[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
            &[0.0, 0.0, 1.0, 0.0],
        ])
        .unwrap();
        let m = qubit_model();
        assert_eq!(m.coupling(), &expected);
        assert!(structural_checks(m.coupling(), 1e-10).unwrap().unitary);
    }

    #[test]
    fn single_outcome_coupling_is_identity() {
        let app = build_apparatus(1, 1, None).unwrap();
        let m = build_coupling(&ComplexMatrix::identity(1), &app).unwrap();
        assert_eq!(m.coupling(), &ComplexMatrix::identity(1));
        let app = build_apparatus(1, 3, None).unwrap();
        let m = build_coupling(&ComplexMatrix::identity(1), &app).unwrap();
        assert_eq!(m.coupling(), &ComplexMatrix::identity(3));
    }

    #[test]
    fn coupling_rejects_bad_basis() {
        let app = build_apparatus(2, 2, None).unwrap();
        let skew = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]).unwrap();
        assert!(matches!(build_coupling(&skew, &app), Err(Error::NotOrthonormal { .. })));
    }

    #[test]
    fn premeasure_examples() {
        let m = qubit_model();
        let out = premeasure(&StateVector::basis(2, 1), &m).unwrap();
        assert_eq!(out.amplitudes(), &ComplexVector::basis(4, 3));

        let plus = StateVector::from_amplitudes(vec![c(FRAC_1_SQRT_2); 2]).unwrap();
        let out = premeasure(&plus, &m).unwrap();
        let expected = [FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2];
        for (a, b) in out.amplitudes().as_slice().iter().zip(expected) {
            assert!((a - c(b)).norm() < 1e-15);
        }
        assert!((out.amplitudes().norm() - 1.0).abs() < 1e-15);
        assert!(matches!(
            premeasure(&StateVector::basis(3, 0), &m),
            Err(Error::DimMismatch { .. })
        ));
    }

    #[test]
    fn collapse_examples() {
        let id = ComplexMatrix::identity(2);
        let diag = DensityMatrix::new(ComplexMatrix::from_real_diagonal(&[0.3, 0.7])).unwrap();
        assert_eq!(collapse(&diag, &id).unwrap().matrix(), diag.matrix());

        let plus = StateVector::from_amplitudes(vec![c(FRAC_1_SQRT_2); 2]).unwrap();
        let col = collapse(&projector_of(&plus), &id).unwrap();
        assert!(
            col.matrix()
                .max_abs_diff(&ComplexMatrix::from_real_diagonal(&[0.5, 0.5]))
                < 1e-15
        );

        let psi = StateVector::from_amplitudes(vec![c(0.6), c(0.8)]).unwrap();
        let col = collapse(&projector_of(&psi), &id).unwrap();
        assert!(
            col.matrix()
                .max_abs_diff(&ComplexMatrix::from_real_diagonal(&[0.36, 0.64]))
                < 1e-15
        );

        let again = collapse(&col, &id).unwrap();
        assert!(again.matrix().max_abs_diff(col.matrix()) < 1e-15);

        assert!(matches!(
            collapse(&diag, &ComplexMatrix::identity(3)),
            Err(Error::DimMismatch { .. })
        ));
    }

    #[test]
    fn reduced_state_examples() {
        let m = qubit_model();
        let dims = m.dims();
        let r = apparatus_reduced_state(&premeasure(&StateVector::basis(2, 1), &m).unwrap(), dims).unwrap();
        assert_eq!(r.matrix(), &ComplexMatrix::from_real_diagonal(&[0.0, 1.0]));

        let plus = StateVector::from_amplitudes(vec![c(FRAC_1_SQRT_2); 2]).unwrap();
        let r = apparatus_reduced_state(&premeasure(&plus, &m).unwrap(), dims).unwrap();
        assert!(r.matrix().max_abs_diff(&ComplexMatrix::from_real_diagonal(&[0.5, 0.5])) < 1e-15);

        let psi = StateVector::from_amplitudes(vec![c(0.6), Complex64::new(0.0, 0.8)]).unwrap();
        let r = apparatus_reduced_state(&premeasure(&psi, &m).unwrap(), dims).unwrap();
        let weights = m.apparatus().pointer_distribution(&r).unwrap();
        let born = outcome_probabilities(&psi, &m).unwrap();
        for (w, b) in weights.iter().zip(&born) {
            assert!((w - b).abs() < 1e-10);
        }
    }

    #[test]
    fn degenerate_observable_rejected() {
        let err = MeasurementModel::for_observable(&Observable::diagonal(&[1.0, 1.0, 2.0]), 3, None).unwrap_err();
        assert!(matches!(err, Error::Degenerate { multiplicity: 2, .. }));
    }

    #[test]
    fn pointer_values_copy_eigenvalues() {
        let m = MeasurementModel::for_observable(&Observable::diagonal(&[2.5, -1.0]), 3, None).unwrap();
        assert_eq!(m.outcomes(), &[-1.0, 2.5]);
        assert_eq!(m.apparatus().pointer_values(), &[-1.0, 2.5]);
        let a = m.apparatus().pointer_observable();
        assert_eq!(a.matrix(), &ComplexMatrix::from_real_diagonal(&[-1.0, 2.5, 3.5]));
    }

    #[test]
    fn sampling_eigenstate_is_certain() {
        let m = qubit_model();
        let mut rng = master_stream(1);
        for _ in 0..100 {
            let s = sample_outcome(&StateVector::basis(2, 1), &m, &mut rng).unwrap();
            assert_eq!(s.index, 1);
            assert_eq!(s.post_state, StateVector::basis(2, 1));
        }
    }

    #[test]
    fn sampling_frequencies_within_three_sigma() {
        let m = qubit_model();
        for (amps, p) in [([FRAC_1_SQRT_2, FRAC_1_SQRT_2], 0.5), ([0.6, 0.8], 0.36)] {
            let psi = StateVector::from_amplitudes(amps.iter().map(|&a| c(a)).collect()).unwrap();
            let mut rng = master_stream(2024);
            let n = 100_000;
            let hits = (0..n)
                .filter(|_| sample_outcome(&psi, &m, &mut rng).unwrap().index == 0)
                .count();
            let sigma = (n as f64 * p * (1.0 - p)).sqrt();
            assert!(
                (hits as f64 - n as f64 * p).abs() <= 3.0 * sigma,
                "{hits} vs {}",
                n as f64 * p
            );
        }
    }

    #[test]
    fn sample_index_never_picks_zero_weight_tail() {
        let mut rng = master_stream(5);
        for _ in 0..1000 {
            assert_ne!(sample_index(&[0.5, 0.5 - 1e-17, 0.0], &mut rng), 2);
        }
    }

    #[test]
    fn chain_copies_pointer() {
        let m = qubit_model();
        let relay = build_apparatus(2, 2, None).unwrap();
        let psi = StateVector::from_amplitudes(vec![c(0.6), c(0.8)]).unwrap();
        let chain = premeasure_chain(&psi, &m, &relay).unwrap();
        // sum_j c_j psi_j (x) Phi_j (x) Phi'_j
        let mut expected = vec![Complex64::new(0.0, 0.0); 8];
        expected[0] = c(0.6);
        expected[7] = c(0.8);
        assert!(chain.amplitudes().max_abs_diff(&ComplexVector::new(expected).unwrap()) < 1e-15);
        let r = relay_reduced_state(&chain, &m, &relay).unwrap();
        assert!(
            r.matrix()
                .max_abs_diff(&ComplexMatrix::from_real_diagonal(&[0.36, 0.64]))
                < 1e-15
        );
    }
}
