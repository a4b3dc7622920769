//! Random states, bases and observables for property checks and the
//! comparison harness. Complex entries are standard complex Gaussians.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::numerics::{orthonormalize_columns, ComplexMatrix, ComplexVector};
use crate::observable::Observable;
use crate::state::{DensityMatrix, StateVector};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn gaussian_matrix<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(n, m);
    for i in 0..n {
        for j in 0..m {
            out[(i, j)] = gaussian(rng);
        }
    }
    out
}

pub fn random_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> StateVector {
    let v = ComplexVector::from_vec_unchecked((0..dim).map(|_| gaussian(rng)).collect());
    StateVector::normalized(v).expect("gaussian vector is nonzero")
}

/// Gram-Schmidt of a Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let mut m = gaussian_matrix(dim, dim, rng);
    let all: Vec<usize> = (0..dim).collect();
    orthonormalize_columns(&mut m, &all);
    m
}

/// (G + G^dagger) / 2 for a Gaussian G.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Observable {
    Observable::from_trusted(gaussian_matrix(dim, dim, rng).hermitian_part())
}

/// G G^dagger / Tr, full rank almost surely.
pub fn random_density<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityMatrix {
    let g = gaussian_matrix(dim, dim, rng);
    let m = &g * &g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::from_trusted(m.scale_real(1.0 / tr).hermitian_part())
}

/// Random real polynomial of degree <= 3 in `a`.
pub fn random_polynomial<R: Rng + ?Sized>(a: &Observable, rng: &mut R) -> Observable {
    let coeffs: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
    a.polynomial(&coeffs)
}
