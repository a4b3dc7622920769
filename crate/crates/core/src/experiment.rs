//! Experiment orchestration: scenario runs, the cat scenario and the
//! randomized collapse-versus-restriction comparison.

use rayon::prelude::*;

use crate::algebra::{generate_algebra, AbelianAlgebra, SpectralProbabilityMeasure};
use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, ComplexVector};
use crate::observable::{
    born_distribution, born_distribution_pure, spectral_decomposition, Observable, OutcomeDistribution,
};
use crate::premeasurement::{
    apparatus_reduced_state, build_apparatus, build_coupling, collapse_diagonal, outcome_probabilities, premeasure,
    premeasure_density, sample_index, ApparatusModel, MeasurementModel,
};
use crate::random::{random_state, random_unitary};
use crate::rng::substream;
use crate::scenario::{InitialState, Scenario};
use crate::state::{partial_trace, projector_of, DensityMatrix, StateVector, Subsystem};
use crate::Complex64;

/// Largest chain the cat scenario will build (dimension 2^10).
pub const MAX_CHAIN_LENGTH: u32 = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct RestrictedMeasure {
    pub characters: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl RestrictedMeasure {
    fn new(algebra: &AbelianAlgebra, measure: &SpectralProbabilityMeasure) -> Self {
        RestrictedMeasure {
            characters: algebra.characters().to_vec(),
            weights: measure.weights().to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Empirical {
    pub trials: u64,
    pub counts: Vec<u64>,
    pub frequencies: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub born: OutcomeDistribution,
    pub collapsed_diag: Vec<f64>,
    pub restricted: RestrictedMeasure,
    pub empirical: Option<Empirical>,
    pub max_deviation: f64,
    pub cross_terms: Vec<f64>,
}

impl Report {
    /// Largest |count - T p| in units of the binomial standard deviation.
    /// Infinite when an outcome with p in {0, 1} is missed or hit wrongly.
    pub fn max_sigma_deviation(&self) -> Option<f64> {
        let e = self.empirical.as_ref()?;
        let t = e.trials as f64;
        let worst = self
            .born
            .probabilities
            .iter()
            .zip(&e.counts)
            .map(|(&p, &count)| {
                let p = p.clamp(0.0, 1.0);
                let sigma = (t * p * (1.0 - p)).sqrt();
                let gap = (count as f64 - t * p).abs();
                if sigma > 0.0 {
                    gap / sigma
                } else if gap < 0.5 {
                    0.0
                } else {
                    f64::INFINITY
                }
            })
            .fold(0.0, f64::max);
        Some(worst)
    }
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Per-outcome weights of a restricted measure, one spectrum point per
/// registered pointer state, plus the total mass on points holding no
/// pointer state.
fn pull_back(
    algebra: &AbelianAlgebra,
    measure: &SpectralProbabilityMeasure,
    apparatus: &ApparatusModel,
) -> Result<(Vec<f64>, f64)> {
    let mut used = vec![false; algebra.n_points()];
    let mut per_outcome = Vec::with_capacity(apparatus.n_outcomes());
    for j in 0..apparatus.n_outcomes() {
        let k = algebra
            .point_containing(&apparatus.pointer_state(j), 1e-9)
            .ok_or_else(|| {
                Error::InvariantViolation(format!("pointer state {j} is not a joint eigenvector of the algebra"))
            })?;
        if used[k] {
            return Err(Error::InvariantViolation(format!(
                "algebra does not separate pointer state {j}"
            )));
        }
        used[k] = true;
        per_outcome.push(measure.weights()[k]);
    }
    let stray = used
        .iter()
        .zip(measure.weights())
        .filter(|(u, _)| !**u)
        .map(|(_, w)| w.abs())
        .sum();
    Ok((per_outcome, stray))
}

fn cross_terms(algebra: &AbelianAlgebra, apparatus: &ApparatusModel) -> Vec<f64> {
    let n = apparatus.n_outcomes();
    let mut out = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            out.extend(algebra.cross_terms(&apparatus.pointer_state(i), &apparatus.pointer_state(j)));
        }
    }
    out
}

/// Reduced apparatus state after premeasuring `state`.
fn premeasured_apparatus(state: &InitialState, model: &MeasurementModel) -> Result<DensityMatrix> {
    match state {
        InitialState::Vector(psi) => apparatus_reduced_state(&premeasure(psi, model)?, model.dims()),
        InitialState::Density(rho) => {
            partial_trace(&premeasure_density(rho, model)?, model.dims(), Subsystem::Apparatus)
        }
    }
}

/// Outcome counts for `trials` runs; trial t draws from `substream(seed, t)`.
pub fn sample_counts(probabilities: &[f64], trials: u64, seed: u64) -> Vec<u64> {
    let n = probabilities.len();
    (0..trials)
        .into_par_iter()
        .fold(
            || vec![0u64; n],
            |mut acc, t| {
                acc[sample_index(probabilities, &mut substream(seed, t))] += 1;
                acc
            },
        )
        .reduce(|| vec![0u64; n], |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect())
}

pub fn run_scenario(s: &Scenario) -> Result<Report> {
    let model = s.measurement_model()?;
    let pvm = model.measured_pvm()?;
    let rho = s.initial_state.density();

    let born = match &s.initial_state {
        InitialState::Vector(psi) => born_distribution_pure(psi, &pvm)?,
        InitialState::Density(rho) => born_distribution(rho, &pvm)?,
    };
    let collapsed_diag = collapse_diagonal(&rho, model.measured_basis())?;

    let reduced = premeasured_apparatus(&s.initial_state, &model)?;
    let algebra = s.algebra()?;
    let measure = algebra.restrict_state(&reduced)?;
    let (restricted_per_outcome, stray) = pull_back(&algebra, &measure, model.apparatus())?;

    let max_deviation = max_gap(&born.probabilities, &collapsed_diag)
        .max(max_gap(&born.probabilities, &restricted_per_outcome))
        .max(max_gap(&collapsed_diag, &restricted_per_outcome))
        .max(stray);

    let empirical = (s.trials > 0)
        .then(|| -> Result<Empirical> {
            let probabilities = match &s.initial_state {
                InitialState::Vector(psi) => outcome_probabilities(psi, &model)?,
                InitialState::Density(_) => collapsed_diag.clone(),
            };
            let counts = sample_counts(&probabilities, s.trials, s.seed);
            let frequencies = counts.iter().map(|&c| c as f64 / s.trials as f64).collect();
            Ok(Empirical {
                trials: s.trials,
                counts,
                frequencies,
            })
        })
        .transpose()?;

    Ok(Report {
        born,
        collapsed_diag,
        restricted: RestrictedMeasure::new(&algebra, &measure),
        empirical,
        max_deviation,
        cross_terms: cross_terms(&algebra, model.apparatus()),
    })
}

/// Space hosting the two macroscopically distinct states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CatGeometry {
    /// Spin chain of the given length; Psi_1 is all-down, Psi_2 all-up, and
    /// the algebra is generated by the total magnetization.
    SpinChain { length: u32 },
    /// A `dim`-level pointer; Psi_1 = e_0, Psi_2 = e_{dim-1}, algebra
    /// generated by diag(0, 1, ..., dim-1).
    Macro { dim: usize },
}

impl CatGeometry {
    fn build(self) -> Result<(Observable, usize, usize)> {
        match self {
            CatGeometry::SpinChain { length } => {
                if length == 0 || length > MAX_CHAIN_LENGTH {
                    return Err(Error::InvalidArgument(format!(
                        "chain length must be in 1..={MAX_CHAIN_LENGTH}"
                    )));
                }
                let dim = 1usize << length;
                let total: Vec<f64> = (0..dim)
                    .map(|i| length as f64 - 2.0 * (i as u32).count_ones() as f64)
                    .collect();
                Ok((Observable::diagonal(&total), dim - 1, 0))
            }
            CatGeometry::Macro { dim } => {
                if dim < 2 {
                    return Err(Error::InvalidArgument("macro dimension must be at least 2".into()));
                }
                let values: Vec<f64> = (0..dim).map(|k| k as f64).collect();
                Ok((Observable::diagonal(&values), 0, dim - 1))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpectationCheck {
    /// (Psi| a |Psi)
    pub superposition: f64,
    /// |c1|^2 (Psi_1| a |Psi_1) + |c2|^2 (Psi_2| a |Psi_2)
    pub mixture: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatReport {
    pub report: Report,
    pub labels: [String; 2],
    /// Restricted weights of the two spectrum points holding Psi_1 and Psi_2.
    pub weights: [f64; 2],
    pub expectation: Vec<ExpectationCheck>,
    pub max_expectation_gap: f64,
}

/// Everything a cat run needs, for callers that want to probe further.
#[derive(Debug, Clone)]
pub struct CatSetup {
    pub alive: StateVector,
    pub dead: StateVector,
    pub superposition: StateVector,
    pub algebra: AbelianAlgebra,
    pub pointer: Observable,
}

pub fn cat_setup(c1: Complex64, c2: Complex64, geometry: CatGeometry) -> Result<CatSetup> {
    let norm_sq = c1.norm_sqr() + c2.norm_sqr();
    if !norm_sq.is_finite() || (norm_sq - 1.0).abs() > 1e-10 {
        return Err(Error::BadAmplitudes { norm_sq });
    }
    let (pointer, i_alive, i_dead) = geometry.build()?;
    let dim = pointer.dim();
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    amps[i_alive] += c1;
    amps[i_dead] += c2;
    let superposition = StateVector::new(ComplexVector::new(amps)?)?;
    let algebra = generate_algebra(std::slice::from_ref(&pointer), 1e-10)?;
    Ok(CatSetup {
        alive: StateVector::basis(dim, i_alive),
        dead: StateVector::basis(dim, i_dead),
        superposition,
        algebra,
        pointer,
    })
}

/// The superposition c1 Psi_1 + c2 Psi_2 of two orthogonal macroscopic states,
/// read through the commutative algebra of the total pointer observable.
pub fn run_cat(c1: Complex64, c2: Complex64, geometry: CatGeometry) -> Result<CatReport> {
    let setup = cat_setup(c1, c2, geometry)?;
    let CatSetup {
        alive,
        dead,
        superposition,
        algebra,
        pointer,
    } = &setup;

    let pvm = spectral_decomposition(pointer, None)?;
    let born = born_distribution_pure(superposition, &pvm)?;

    // collapse in the configuration basis, grouped by outcome
    let configuration = ComplexMatrix::identity(pointer.dim());
    let diag = collapse_diagonal(&projector_of(superposition), &configuration)?;
    let mut collapsed_diag = vec![0.0; pvm.len()];
    for (i, w) in diag.iter().enumerate() {
        let value = pointer.matrix()[(i, i)].re;
        let k = pvm
            .outcomes
            .iter()
            .position(|o| (o - value).abs() < 1e-9)
            .ok_or_else(|| Error::InvariantViolation("configuration value missing from spectrum".into()))?;
        collapsed_diag[k] += w;
    }

    let measure = algebra.restrict_pure(superposition)?;
    let max_deviation = max_gap(&born.probabilities, &collapsed_diag)
        .max(max_gap(&born.probabilities, measure.weights()))
        .max(max_gap(&collapsed_diag, measure.weights()));

    let point = |v: &StateVector| {
        algebra
            .point_containing(v.amplitudes(), 1e-9)
            .ok_or_else(|| Error::InvariantViolation("cat state is not a joint eigenvector".into()))
    };
    let weights = [measure.weights()[point(alive)?], measure.weights()[point(dead)?]];

    let (p1, p2) = (c1.norm_sqr(), c2.norm_sqr());
    let expectation: Vec<ExpectationCheck> = algebra
        .generators()
        .iter()
        .map(|a| {
            let m = a.matrix();
            let sandwich = |v: &StateVector| m.sandwich(v.amplitudes(), v.amplitudes()).re;
            ExpectationCheck {
                superposition: sandwich(superposition),
                mixture: p1 * sandwich(alive) + p2 * sandwich(dead),
            }
        })
        .collect();
    let max_expectation_gap = expectation
        .iter()
        .map(|e| (e.superposition - e.mixture).abs())
        .fold(0.0, f64::max);

    Ok(CatReport {
        report: Report {
            born,
            collapsed_diag,
            restricted: RestrictedMeasure::new(algebra, &measure),
            empirical: None,
            max_deviation,
            cross_terms: algebra.cross_terms(alive.amplitudes(), dead.amplitudes()),
        },
        labels: ["alive".to_string(), "dead".to_string()],
        weights,
        expectation,
        max_expectation_gap,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonSummary {
    pub dim: usize,
    pub n_random: usize,
    pub seed: u64,
    /// Deviation for the scenario's own state and observable.
    pub scenario_deviation: f64,
    pub worst_deviation: f64,
    pub mean_deviation: f64,
    /// Case index of the worst deviation; it used `substream(seed, worst_case)`.
    pub worst_case: usize,
}

/// max_j |collapse diagonal_j - restricted weight_j| for one (state, basis) pair.
pub fn collapse_restriction_gap(
    rho: &InitialState,
    basis: &ComplexMatrix,
    apparatus: &ApparatusModel,
    extra_generators: &[Observable],
) -> Result<f64> {
    let model = build_coupling(basis, apparatus)?;
    let collapsed = collapse_diagonal(&rho.density(), basis)?;
    let reduced = premeasured_apparatus(rho, &model)?;
    let mut generators = vec![apparatus.pointer_observable()];
    generators.extend(extra_generators.iter().cloned());
    let algebra = generate_algebra(&generators, 1e-10)?;
    let measure = algebra.restrict_state(&reduced)?;
    let (restricted, stray) = pull_back(&algebra, &measure, apparatus)?;
    Ok(max_gap(&collapsed, &restricted).max(stray))
}

/// Random (state, measured basis) pairs at the scenario's dimensions; case
/// `i` draws from `substream(seed, i)`.
pub fn compare_collapse_vs_restriction(s: &Scenario, n_random: usize, seed: u64) -> Result<ComparisonSummary> {
    if n_random == 0 {
        return Err(Error::InvalidArgument("n_random must be at least 1".into()));
    }
    let model = s.measurement_model()?;
    let scenario_deviation = collapse_restriction_gap(
        &s.initial_state,
        model.measured_basis(),
        model.apparatus(),
        &s.algebra_generators,
    )?;

    let dim = s.system_dim;
    let apparatus = build_apparatus(dim, s.apparatus_dim, s.pointer_values.clone())?;
    let deviations: Vec<f64> = (0..n_random)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, i as u64);
            let basis = random_unitary(dim, &mut rng);
            let psi = random_state(dim, &mut rng);
            collapse_restriction_gap(&InitialState::Vector(psi), &basis, &apparatus, &s.algebra_generators)
        })
        .collect::<Result<_>>()?;

    let (worst_case, worst_deviation) = deviations.iter().copied().enumerate().fold(
        (0, f64::NEG_INFINITY),
        |best, (i, d)| if d > best.1 { (i, d) } else { best },
    );
    let mean_deviation = deviations.iter().sum::<f64>() / n_random as f64;
    Ok(ComparisonSummary {
        dim,
        n_random,
        seed,
        scenario_deviation,
        worst_deviation,
        mean_deviation,
        worst_case,
    })
}
