//! Built-in invariant suite behind the `verify` verb.
//!
//! Every property is measured as a single worst-case number and compared
//! against a bound. Counting properties (distinctness, byte equality) use a
//! bound of zero.

use rand::Rng;
use rayon::prelude::*;

use crate::algebra::{nonunique_decomposition_demo, verify_unique_decomposition, SpectralProbabilityMeasure};
use crate::error::Result;
use crate::experiment::{cat_setup, collapse_restriction_gap, run_cat, run_scenario, CatGeometry};
use crate::numerics::{unitary_exp, ComplexMatrix};
use crate::observable::{evolve, joint_eigenbasis, spectral_decomposition, Observable};
use crate::premeasurement::{
    apparatus_reduced_state, build_apparatus, build_coupling, collapse_diagonal, premeasure, premeasure_chain,
    relay_reduced_state,
};
use crate::random::{random_density, random_hermitian, random_polynomial, random_state, random_unitary};
use crate::report::{emit_report, Format};
use crate::rng::{master_stream, substream, RngStream};
use crate::scenario::{parse_scenario, InitialState};
use crate::state::DensityMatrix;
use crate::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub worst: f64,
    pub bound: f64,
}

impl PropertyOutcome {
    fn new(name: &'static str, worst: f64, bound: f64) -> Self {
        PropertyOutcome {
            name,
            passed: worst <= bound,
            worst,
            bound,
        }
    }
}

/// Case counts and seed for the suite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Replaces every floating-point bound when set.
    pub tol: Option<f64>,
    pub collapse_cases_per_dim: usize,
    pub coupling_cases: usize,
    pub born_trials: u64,
    pub pvm_cases: usize,
    pub joint_cases: usize,
    pub cat_elements: usize,
    pub dynamics_cases: usize,
    pub chain_cases: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 7,
            tol: None,
            collapse_cases_per_dim: 200,
            coupling_cases: 100,
            born_trials: 100_000,
            pvm_cases: 100,
            joint_cases: 100,
            cat_elements: 50,
            dynamics_cases: 50,
            chain_cases: 50,
        }
    }
}

/// Runs `f` on cases 0..n in parallel, each with its own substream, and
/// returns the componentwise maximum of the K measured numbers.
fn worst_over<const K: usize, F>(n: usize, seed: u64, f: F) -> Result<[f64; K]>
where
    F: Fn(usize, &mut RngStream) -> Result<[f64; K]> + Sync,
{
    let per_case: Vec<[f64; K]> = (0..n)
        .into_par_iter()
        .map(|i| f(i, &mut substream(seed, i as u64)))
        .collect::<Result<_>>()?;
    Ok(per_case.iter().fold([0.0; K], |mut acc, x| {
        for (a, b) in acc.iter_mut().zip(x) {
            // NaN must surface as a failure, so it wins over any number
            *a = if b.is_nan() || a.is_nan() { f64::NAN } else { a.max(*b) };
        }
        acc
    }))
}

fn max_abs_gap(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Collapse diagonal against restricted weights over random states (pure
/// and mixed) and random measured bases at dims 2..=10. The collapse
/// diagonal is also checked against (b_j| rho |b_j) computed directly.
pub fn collapse_restriction_equivalence(cases_per_dim: usize, seed: u64) -> Result<f64> {
    let [w] = worst_over(9 * cases_per_dim, seed, |i, rng| {
        let dim = 2 + i / cases_per_dim;
        let basis = random_unitary(dim, rng);
        let state = if i % 3 == 2 {
            InitialState::Density(random_density(dim, rng))
        } else {
            InitialState::Vector(random_state(dim, rng))
        };
        // every other case leaves an idle pointer state in the apparatus
        let apparatus = build_apparatus(dim, dim + i % 2, None)?;
        let gap = collapse_restriction_gap(&state, &basis, &apparatus, &[])?;
        let rho = state.density();
        let oracle: Vec<f64> = basis.columns().iter().map(|b| rho.matrix().sandwich(b, b).re).collect();
        let collapsed = collapse_diagonal(&rho, &basis)?;
        Ok([gap.max(max_abs_gap(&oracle, &collapsed))])
    })?;
    Ok(w)
}

/// Returns (amplitude error, unitarity defect). The premeasured state must
/// carry c_j = (psi_j|psi) on psi_j (x) Phi_j and nothing elsewhere.
pub fn coupling_fidelity(cases: usize, seed: u64) -> Result<(f64, f64)> {
    let [amp, unit] = worst_over(cases, seed, |i, rng| {
        let dim = 2 + i % 7;
        let dim_app = dim + (i / 7) % 2;
        let basis = random_unitary(dim, rng);
        let mut apparatus = build_apparatus(dim, dim_app, None)?;
        if i % 2 == 1 {
            let ready = rng.random_range(0..dim_app);
            apparatus = apparatus
                .with_pointer_basis(random_unitary(dim_app, rng))?
                .with_ready_index(ready)?;
        }
        let psi = random_state(dim, rng);
        let model = build_coupling(&basis, &apparatus)?;
        let out = premeasure(&psi, &model)?;

        let pointers = apparatus.pointer_basis().columns();
        let mut amp = 0.0f64;
        for (j, b) in basis.columns().iter().enumerate() {
            let c_j = b.inner(psi.amplitudes());
            let slot = (apparatus.ready_index() + j) % dim_app;
            for (m, phi) in pointers.iter().enumerate() {
                let expected = if m == slot { c_j } else { Complex64::new(0.0, 0.0) };
                let found = b.kron(phi).inner(out.amplitudes());
                amp = amp.max((found - expected).norm());
            }
        }
        let u = model.coupling();
        let unit = (&u.adjoint() * u).max_abs_diff(&ComplexMatrix::identity(u.rows()));
        Ok([amp, unit])
    })?;
    Ok((amp, unit))
}

/// The c = (0.6, 0.8) scenario with `trials` trials under a pinned seed.
pub fn born_scenario_document(trials: u64, seed: u64) -> String {
    format!(
        r#"{{
  "system_dim": 2,
  "initial_state": {{ "kind": "vector", "data": [[0.6, 0], [0.8, 0]] }},
  "observable": [[[0, 0], [0, 0]], [[0, 0], [1, 0]]],
  "apparatus": {{ "dim": 2 }},
  "trials": {trials},
  "seed": {seed}
}}"#
    )
}

/// Returns (largest deviation from (0.36, 0.64) in binomial sigmas, number
/// of output formats whose rerun differed).
pub fn born_statistics(trials: u64, seed: u64) -> Result<(f64, f64)> {
    let s = parse_scenario(&born_scenario_document(trials, seed))?;
    let first = run_scenario(&s)?;
    let second = run_scenario(&s)?;
    let expected = [0.36, 0.64];
    let sigmas = match &first.empirical {
        Some(e) => e
            .frequencies
            .iter()
            .zip(expected)
            .map(|(f, p)| (f - p).abs() / (p * (1.0 - p) / trials as f64).sqrt())
            .fold(0.0, f64::max),
        None => f64::INFINITY,
    };
    let mismatches = [Format::Json, Format::Table]
        .iter()
        .filter(|&&f| emit_report(&first, f) != emit_report(&second, f))
        .count();
    Ok((sigmas, mismatches as f64))
}

/// Returns (orthogonality and idempotency, completeness, reconstruction)
/// for random Hermitian matrices at dims 1..=12; every other case has a
/// deliberately degenerate spectrum.
pub fn spectral_axioms(cases: usize, seed: u64) -> Result<(f64, f64, f64)> {
    let [ortho, complete, recon] = worst_over(cases, seed, |i, rng| {
        let dim = 1 + i % 12;
        let a = if i % 2 == 0 {
            random_hermitian(dim, rng)
        } else {
            let levels = 1 + dim / 3;
            let values: Vec<Complex64> = (0..dim)
                .map(|k| Complex64::new((k % levels) as f64 - 1.5, 0.0))
                .collect();
            let u = random_unitary(dim, rng);
            Observable::new(&(&u * &ComplexMatrix::from_diagonal(&values)) * &u.adjoint())?
        };
        let pvm = spectral_decomposition(&a, None)?;
        let mut ortho = 0.0f64;
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for (j, ej) in pvm.projectors.iter().enumerate() {
            sum = &sum + ej;
            for (k, ek) in pvm.projectors.iter().enumerate() {
                let product = ej * ek;
                let target = if j == k {
                    ej.clone()
                } else {
                    ComplexMatrix::zeros(dim, dim)
                };
                ortho = ortho.max(product.max_abs_diff(&target));
            }
        }
        let complete = sum.max_abs_diff(&ComplexMatrix::identity(dim));
        let recon = pvm.reconstruct().max_abs_diff(a.matrix());
        Ok([ortho, complete, recon])
    })?;
    Ok((ortho, complete, recon))
}

/// Returns (largest off-diagonal entry of any member in the joint basis,
/// largest gap between a diagonal entry and its character value, number of
/// coinciding character tuples) over families of polynomials in a random
/// Hermitian matrix.
pub fn joint_diagonalization(cases: usize, seed: u64) -> Result<(f64, f64, f64)> {
    let [off, value_gap, collisions] = worst_over(cases, seed, |i, rng| {
        let dim = 2 + i % 11;
        let a = random_hermitian(dim, rng);
        let mut family: Vec<Observable> = (0..3).map(|_| random_polynomial(&a, rng)).collect();
        if i % 2 == 0 {
            family.push(a.clone());
        }
        let joint = joint_eigenbasis(&family, 1e-10)?;
        let q = &joint.basis;
        let mut off = 0.0f64;
        let mut value_gap = 0.0f64;
        for (m, member) in family.iter().enumerate() {
            let d = &(&q.adjoint() * member.matrix()) * q;
            for r in 0..dim {
                for c in 0..dim {
                    if r == c {
                        value_gap = value_gap.max((d[(r, r)].re - joint.value_tuples[r][m]).abs());
                    } else {
                        off = off.max(d[(r, c)].norm());
                    }
                }
            }
        }
        let scale = family.iter().map(|m| m.matrix().max_abs()).fold(1.0, f64::max);
        let block_tuples: Vec<&Vec<f64>> = joint.blocks.iter().map(|b| &joint.value_tuples[b.start]).collect();
        let mut collisions = 0usize;
        for (x, tx) in block_tuples.iter().enumerate() {
            for ty in &block_tuples[x + 1..] {
                if max_abs_gap(tx, ty) <= 1e-12 * scale {
                    collisions += 1;
                }
            }
        }
        Ok([off, value_gap, collisions as f64])
    })?;
    Ok((off, value_gap, collisions))
}

/// Returns (cross terms, restricted weight error, expectation identity gap)
/// for the spin-chain cat with c = (0.6, 0.8i), over random elements of
/// the pointer algebra.
pub fn cat_scenario(chain_length: u32, elements: usize, seed: u64) -> Result<(f64, f64, f64)> {
    let (c1, c2) = (Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8));
    let geometry = CatGeometry::SpinChain { length: chain_length };
    let report = run_cat(c1, c2, geometry)?;
    let weight_err = max_abs_gap(&report.weights, &[0.36, 0.64]).max(report.max_expectation_gap);

    let setup = cat_setup(c1, c2, geometry)?;
    let mut rng = master_stream(seed);
    let mut cross = 0.0f64;
    let mut identity = 0.0f64;
    for _ in 0..elements {
        let values: Vec<f64> = (0..setup.algebra.n_points())
            .map(|_| rng.random_range(-1.0..1.0))
            .collect();
        let a = setup.algebra.element(&values)?;
        let m = a.matrix();
        let (alive, dead, cat) = (
            setup.alive.amplitudes(),
            setup.dead.amplitudes(),
            setup.superposition.amplitudes(),
        );
        cross = cross
            .max(m.sandwich(alive, dead).norm())
            .max(m.sandwich(dead, alive).norm());
        let lhs = m.sandwich(cat, cat).re;
        let rhs = 0.36 * m.sandwich(alive, alive).re + 0.64 * m.sandwich(dead, dead).re;
        identity = identity.max((lhs - rhs).abs());
    }
    Ok((cross, weight_err, identity))
}

/// Returns (largest distance of either decomposition from I/2, 0 when the
/// two decompositions use different pure states and 1 otherwise).
pub fn simplex_contrast() -> Result<(f64, f64)> {
    let half = DensityMatrix::maximally_mixed(2);
    let demo = nonunique_decomposition_demo();
    let mut err = 0.0f64;
    for d in &demo {
        err = err.max(d.combine()?.matrix().max_abs_diff(half.matrix()));
    }
    // some state of the second decomposition must be far from every state of the first
    let separation = demo[1]
        .states
        .iter()
        .map(|b| {
            demo[0]
                .states
                .iter()
                .map(|a| 1.0 - a.amplitudes().inner(b.amplitudes()).norm_sqr())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    Ok((err, if separation > 0.1 { 0.0 } else { 1.0 }))
}

/// Largest |recombined - original| when point masses are read off random
/// spectral measures. Expected to be exactly zero.
pub fn unique_weight_recovery(cases: usize, seed: u64) -> Result<f64> {
    let [w] = worst_over(cases, seed, |i, rng| {
        let n = 1 + i % 10;
        let mut raw: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        if i % 4 == 0 {
            // degenerate measures with empty points
            raw.iter_mut().step_by(2).for_each(|x| *x = 0.0);
            raw[0] = 1.0;
        }
        let total: f64 = raw.iter().sum();
        let measure = SpectralProbabilityMeasure::new(raw.iter().map(|x| x / total).collect())?;
        let record = verify_unique_decomposition(&measure);
        Ok([max_abs_gap(&record.recombine(n), measure.weights())])
    })?;
    Ok(w)
}

/// Returns (group-law error, norm drift of the raw propagator).
pub fn dynamics_group_law(cases: usize, seed: u64) -> Result<(f64, f64)> {
    let [law, norm] = worst_over(cases, seed, |i, rng| {
        let dim = 2 + i % 7;
        let h = random_hermitian(dim, rng);
        let psi = random_state(dim, rng);
        let s = rng.random_range(-3.0..3.0);
        let t = rng.random_range(-3.0..3.0);
        let two_steps = evolve(&evolve(&psi, &h, t)?, &h, s)?;
        let one_step = evolve(&psi, &h, s + t)?;
        let law = two_steps.amplitudes().max_abs_diff(one_step.amplitudes());
        let mut norm = 0.0f64;
        for time in [s, t, s + t] {
            let raw = unitary_exp(h.matrix(), time)?.mul_vec(psi.amplitudes());
            norm = norm.max((raw.norm() - 1.0).abs());
        }
        Ok([law, norm])
    })?;
    Ok((law, norm))
}

/// Pointer distribution of a relay apparatus reading M against that of M
/// itself, for random states and measured bases at dim 4. Both are also
/// checked against |c_j|^2.
pub fn chain_reduction(cases: usize, seed: u64) -> Result<f64> {
    let [w] = worst_over(cases, seed, |_, rng| {
        let dim = 4;
        let basis = random_unitary(dim, rng);
        let psi = random_state(dim, rng);
        let model = build_coupling(&basis, &build_apparatus(dim, dim, None)?)?;
        let relay = build_apparatus(dim, dim, None)?;
        let single = model
            .apparatus()
            .pointer_distribution(&apparatus_reduced_state(&premeasure(&psi, &model)?, model.dims())?)?;
        let chained = relay.pointer_distribution(&relay_reduced_state(
            &premeasure_chain(&psi, &model, &relay)?,
            &model,
            &relay,
        )?)?;
        let born: Vec<f64> = basis
            .columns()
            .iter()
            .map(|b| b.inner(psi.amplitudes()).norm_sqr())
            .collect();
        Ok([max_abs_gap(&single, &chained).max(max_abs_gap(&born, &chained))])
    })?;
    Ok(w)
}

/// Runs every property with the given configuration.
pub fn run_all(config: &SuiteConfig) -> Result<Vec<PropertyOutcome>> {
    let bound = |b: f64| config.tol.unwrap_or(b);
    let seed = config.seed;
    let mut out = Vec::new();

    let w = collapse_restriction_equivalence(config.collapse_cases_per_dim, seed)?;
    out.push(PropertyOutcome::new("collapse equals restriction", w, bound(1e-9)));

    let (amp, unit) = coupling_fidelity(config.coupling_cases, seed)?;
    out.push(PropertyOutcome::new("coupling amplitudes", amp, bound(1e-10)));
    out.push(PropertyOutcome::new("coupling unitarity", unit, bound(1e-10)));

    let (sigmas, mismatches) = born_statistics(config.born_trials, seed)?;
    out.push(PropertyOutcome::new("born frequencies (sigmas)", sigmas, 4.0));
    out.push(PropertyOutcome::new("report rerun mismatches", mismatches, 0.0));

    let (ortho, complete, recon) = spectral_axioms(config.pvm_cases, seed)?;
    out.push(PropertyOutcome::new("pvm orthogonality", ortho, bound(1e-9)));
    out.push(PropertyOutcome::new("pvm completeness", complete, bound(1e-9)));
    out.push(PropertyOutcome::new("pvm reconstruction", recon, bound(1e-9)));

    let (off, value_gap, collisions) = joint_diagonalization(config.joint_cases, seed)?;
    out.push(PropertyOutcome::new("joint basis off-diagonal", off, bound(1e-8)));
    out.push(PropertyOutcome::new(
        "joint basis character values",
        value_gap,
        bound(1e-8),
    ));
    out.push(PropertyOutcome::new("joint character collisions", collisions, 0.0));

    let (cross, weights, identity) = cat_scenario(8, config.cat_elements, seed)?;
    out.push(PropertyOutcome::new("cat cross terms", cross, bound(1e-12)));
    out.push(PropertyOutcome::new("cat restricted weights", weights, bound(1e-10)));
    out.push(PropertyOutcome::new("cat expectation identity", identity, bound(1e-10)));

    let (demo_err, same) = simplex_contrast()?;
    out.push(PropertyOutcome::new(
        "mixed qubit decompositions",
        demo_err,
        bound(1e-12),
    ));
    out.push(PropertyOutcome::new("mixed qubit decompositions coincide", same, 0.0));
    out.push(PropertyOutcome::new(
        "unique weight recovery",
        unique_weight_recovery(100, seed)?,
        0.0,
    ));

    let (law, norm) = dynamics_group_law(config.dynamics_cases, seed)?;
    out.push(PropertyOutcome::new("evolution group law", law, bound(1e-9)));
    out.push(PropertyOutcome::new("evolution norm", norm, bound(1e-10)));

    out.push(PropertyOutcome::new(
        "chain reduction",
        chain_reduction(config.chain_cases, seed)?,
        bound(1e-10),
    ));
    Ok(out)
}
