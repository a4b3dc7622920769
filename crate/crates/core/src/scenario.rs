//! Scenario documents.
//!
//! ```json
//! {
//!   "system_dim": 2,
//!   "initial_state": { "kind": "vector", "data": [[0.6, 0], [0.8, 0]], "normalize": false },
//!   "observable": [[[0, 0], [0, 0]], [[0, 0], [1, 0]]],
//!   "apparatus": { "dim": 2, "pointer_values": [0, 1] },
//!   "algebra_generators": [],
//!   "trials": 100000,
//!   "seed": 42
//! }
//! ```
//!
//! Complex numbers are `[re, im]` pairs and matrices are row-major nested
//! arrays. `normalize`, `pointer_values` and `algebra_generators` are
//! optional; unknown fields are rejected. Algebra generators act on the
//! apparatus space and are added to the pointer observable, which is always
//! part of the algebra.

use serde::Deserialize;

use crate::algebra::{generate_algebra, AbelianAlgebra};
use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, ComplexVector};
use crate::observable::Observable;
use crate::premeasurement::MeasurementModel;
use crate::state::{projector_of, DensityMatrix, StateVector};
use crate::Complex64;

type ComplexPair = [f64; 2];
type MatrixDoc = Vec<Vec<ComplexPair>>;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    system_dim: usize,
    initial_state: InitialStateDoc,
    observable: MatrixDoc,
    apparatus: ApparatusDoc,
    #[serde(default)]
    algebra_generators: Option<Vec<MatrixDoc>>,
    trials: u64,
    seed: u64,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "lowercase")]
enum StateKind {
    Vector,
    Density,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct InitialStateDoc {
    kind: StateKind,
    data: serde_json::Value,
    #[serde(default)]
    normalize: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ApparatusDoc {
    dim: usize,
    #[serde(default)]
    pointer_values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    Vector(StateVector),
    Density(DensityMatrix),
}

impl InitialState {
    pub fn dim(&self) -> usize {
        match self {
            InitialState::Vector(v) => v.dim(),
            InitialState::Density(d) => d.dim(),
        }
    }

    pub fn density(&self) -> DensityMatrix {
        match self {
            InitialState::Vector(v) => projector_of(v),
            InitialState::Density(d) => d.clone(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub system_dim: usize,
    pub initial_state: InitialState,
    pub measured_observable: Observable,
    pub apparatus_dim: usize,
    pub pointer_values: Option<Vec<f64>>,
    /// Extra generators on the apparatus space; the pointer observable is always included.
    pub algebra_generators: Vec<Observable>,
    pub trials: u64,
    pub seed: u64,
}

fn complex(p: &ComplexPair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

fn matrix(doc: &MatrixDoc) -> Result<ComplexMatrix> {
    ComplexMatrix::from_rows(doc.iter().map(|r| r.iter().map(complex).collect()).collect())
}

fn validation(field: &str, reason: impl Into<String>) -> Error {
    Error::Validation {
        field: field.to_string(),
        reason: reason.into(),
    }
}

fn from_json_error(e: serde_json::Error) -> Error {
    Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let doc: ScenarioDoc = serde_json::from_str(text).map_err(from_json_error)?;
    let scenario = doc.into_scenario()?;
    // model and algebra construction check the remaining invariants
    scenario.measurement_model()?;
    scenario.algebra()?;
    Ok(scenario)
}

impl ScenarioDoc {
    fn into_scenario(self) -> Result<Scenario> {
        if self.system_dim == 0 {
            return Err(validation("system_dim", "must be positive"));
        }
        let normalize = self.initial_state.normalize.unwrap_or(false);
        let initial_state = match self.initial_state.kind {
            StateKind::Vector => {
                let data: Vec<ComplexPair> = serde_json::from_value(self.initial_state.data)
                    .map_err(|e| validation("initial_state.data", e.to_string()))?;
                let v = ComplexVector::new(data.iter().map(complex).collect())
                    .map_err(|e| e.at_field("initial_state.data"))?;
                let psi = if normalize {
                    StateVector::normalized(v)
                } else {
                    StateVector::new(v)
                };
                InitialState::Vector(psi.map_err(|e| e.at_field("initial_state.data"))?)
            }
            StateKind::Density => {
                let data: MatrixDoc = serde_json::from_value(self.initial_state.data)
                    .map_err(|e| validation("initial_state.data", e.to_string()))?;
                let mut m = matrix(&data).map_err(|e| e.at_field("initial_state.data"))?;
                if normalize {
                    let tr = m.trace().re;
                    if tr <= 0.0 {
                        return Err(validation("initial_state.data", "trace is not positive"));
                    }
                    m = m.scale_real(1.0 / tr);
                }
                InitialState::Density(DensityMatrix::new(m).map_err(|e| e.at_field("initial_state.data"))?)
            }
        };
        if initial_state.dim() != self.system_dim {
            return Err(validation(
                "initial_state.data",
                format!(
                    "dimension {} does not match system_dim {}",
                    initial_state.dim(),
                    self.system_dim
                ),
            ));
        }

        let measured_observable = matrix(&self.observable)
            .and_then(Observable::new)
            .map_err(|e| e.at_field("observable"))?;
        if measured_observable.dim() != self.system_dim {
            return Err(validation(
                "observable",
                format!(
                    "dimension {} does not match system_dim {}",
                    measured_observable.dim(),
                    self.system_dim
                ),
            ));
        }

        let algebra_generators = self
            .algebra_generators
            .unwrap_or_default()
            .iter()
            .enumerate()
            .map(|(i, g)| {
                let field = format!("algebra_generators[{i}]");
                let obs = matrix(g).and_then(Observable::new).map_err(|e| e.at_field(&field))?;
                if obs.dim() != self.apparatus.dim {
                    return Err(validation(
                        &field,
                        format!(
                            "dimension {} does not match apparatus.dim {}",
                            obs.dim(),
                            self.apparatus.dim
                        ),
                    ));
                }
                Ok(obs)
            })
            .collect::<Result<Vec<_>>>()?;

        Ok(Scenario {
            system_dim: self.system_dim,
            initial_state,
            measured_observable,
            apparatus_dim: self.apparatus.dim,
            pointer_values: self.apparatus.pointer_values,
            algebra_generators,
            trials: self.trials,
            seed: self.seed,
        })
    }
}

impl Scenario {
    pub fn measurement_model(&self) -> Result<MeasurementModel> {
        MeasurementModel::for_observable(
            &self.measured_observable,
            self.apparatus_dim,
            self.pointer_values.clone(),
        )
        .map_err(|e| match e {
            Error::TooSmall { .. } => e.at_field("apparatus.dim"),
            Error::DimMismatch { .. } | Error::InvalidArgument(_) | Error::NonFinite => {
                e.at_field("apparatus.pointer_values")
            }
            other => other.at_field("observable"),
        })
    }

    /// Pointer observable first, then the user-supplied generators.
    pub fn algebra(&self) -> Result<AbelianAlgebra> {
        let model = self.measurement_model()?;
        let mut generators = vec![model.apparatus().pointer_observable()];
        generators.extend(self.algebra_generators.iter().cloned());
        generate_algebra(&generators, 1e-10).map_err(|e| e.at_field("algebra_generators"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "system_dim": 2,
        "initial_state": {"kind": "vector", "data": [[1, 0], [0, 0]]},
        "observable": [[[0, 0], [0, 0]], [[0, 0], [1, 0]]],
        "apparatus": {"dim": 2},
        "trials": 0,
        "seed": 1
    }"#;

    #[test]
    fn minimal_document() {
        let s = parse_scenario(MINIMAL).unwrap();
        assert_eq!(s.system_dim, 2);
        assert_eq!(s.initial_state, InitialState::Vector(StateVector::basis(2, 0)));
        assert!(s.algebra_generators.is_empty());
    }

    #[test]
    fn non_hermitian_observable() {
        let doc = MINIMAL.replace(
            r#"[[[0, 0], [0, 0]], [[0, 0], [1, 0]]]"#,
            r#"[[[0, 0], [1, 0]], [[0, 0], [1, 0]]]"#,
        );
        match parse_scenario(&doc).unwrap_err() {
            Error::Validation { field, reason } => {
                assert_eq!(field, "observable");
                assert!(reason.contains("Hermitian"), "{reason}");
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn normalize_flag() {
        let doc = MINIMAL.replace(
            r#""data": [[1, 0], [0, 0]]"#,
            r#""data": [[3, 0], [4, 0]], "normalize": true"#,
        );
        let s = parse_scenario(&doc).unwrap();
        match s.initial_state {
            InitialState::Vector(v) => assert!((v.amplitudes()[0].re - 0.6).abs() < 1e-15),
            _ => unreachable!(),
        }
        let unnormalized = MINIMAL.replace(r#""data": [[1, 0], [0, 0]]"#, r#""data": [[3, 0], [4, 0]]"#);
        assert!(matches!(parse_scenario(&unnormalized), Err(Error::Validation { .. })));
    }

    #[test]
    fn unknown_field_rejected_with_position() {
        let doc = MINIMAL.replace(r#""seed": 1"#, r#""seed": 1, "colour": "red""#);
        match parse_scenario(&doc).unwrap_err() {
            Error::Parse { line, message, .. } => {
                assert_eq!(line, 7);
                assert!(message.contains("colour"));
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn density_state_and_generators() {
        let doc = r#"{
            "system_dim": 2,
            "initial_state": {"kind": "density", "data": [[[0.5, 0], [0, 0]], [[0, 0], [0.5, 0]]]},
            "observable": [[[1, 0], [0, 0]], [[0, 0], [-1, 0]]],
            "apparatus": {"dim": 3, "pointer_values": [10, 20]},
            "algebra_generators": [[[[1, 0], [0, 0], [0, 0]], [[0, 0], [1, 0], [0, 0]], [[0, 0], [0, 0], [5, 0]]]],
            "trials": 10,
            "seed": 9
        }"#;
        let s = parse_scenario(doc).unwrap();
        assert!(matches!(s.initial_state, InitialState::Density(_)));
        assert_eq!(s.algebra().unwrap().n_points(), 3);
    }

    #[test]
    fn dimension_errors() {
        let small = MINIMAL.replace(r#""dim": 2"#, r#""dim": 1"#);
        match parse_scenario(&small).unwrap_err() {
            Error::Validation { field, .. } => assert_eq!(field, "apparatus.dim"),
            e => panic!("unexpected {e:?}"),
        }
        let wrong = MINIMAL.replace(r#""system_dim": 2"#, r#""system_dim": 3"#);
        assert!(matches!(parse_scenario(&wrong), Err(Error::Validation { .. })));
        assert!(matches!(parse_scenario("{"), Err(Error::Parse { .. })));
    }

    #[test]
    fn degenerate_observable_rejected() {
        let doc = MINIMAL.replace(
            r#"[[[0, 0], [0, 0]], [[0, 0], [1, 0]]]"#,
            r#"[[[1, 0], [0, 0]], [[0, 0], [1, 0]]]"#,
        );
        match parse_scenario(&doc).unwrap_err() {
            Error::Validation { field, reason } => {
                assert_eq!(field, "observable");
                assert!(reason.contains("degenerate"));
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn noncommuting_generator_rejected() {
        let doc = MINIMAL.replace(
            r#""trials": 0"#,
            r#""algebra_generators": [[[[0, 0], [1, 0]], [[1, 0], [0, 0]]]], "trials": 0"#,
        );
        match parse_scenario(&doc).unwrap_err() {
            Error::Validation { field, .. } => assert_eq!(field, "algebra_generators"),
            e => panic!("unexpected {e:?}"),
        }
    }
}
