//! JSON ingestion/emission of systems and CSV emission of trajectories.
//!
//! System schema (all matrices row-major):
//! ```json
//! { "group": "heisenberg" | "r2" | "sl2" | "su2" | "so3" | "so21" | {"gl_plus": n},
//!   "derivation": {"inner": [x1, ...]} | {"matrix": [[...], ...]},
//!   "control_fields": [[y1, ...], ...],
//!   "control_range": {"min": [...], "max": [...]},   // optional
//!   "control": [{"duration": t, "u": [u1, ...]}, ...] }
//! ```
//! When `"control"` is absent or empty, a single unit-duration segment with
//! `u = 0` is supplied so simulation commands have something to run.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::catalog;
use crate::error::{Error, Result};
use crate::matcore::{C64, Scalar};
use crate::models::{
    derivation_from_inner, ControlRange, ControlSegment, Derivation, LieGroupModel,
    LinearControlSystem, PiecewiseControl, Trajectory,
};
use std::sync::Arc;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupSpec {
    Named(String),
    GlPlus { gl_plus: usize },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum DerivationSpec {
    Inner { inner: Vec<f64> },
    Matrix { matrix: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RangeSpec {
    min: Vec<f64>,
    max: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SegmentSpec {
    duration: f64,
    u: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemDoc {
    group: GroupSpec,
    derivation: DerivationSpec,
    control_fields: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    control_range: Option<RangeSpec>,
    #[serde(default)]
    control: Vec<SegmentSpec>,
}

/// A loaded system, dispatched on the ambient scalar field of the model.
pub enum LoadedSystem {
    Real { system: LinearControlSystem<f64>, control: PiecewiseControl },
    Complex { system: LinearControlSystem<C64>, control: PiecewiseControl },
}

impl LoadedSystem {
    pub fn group_name(&self) -> &str {
        match self {
            LoadedSystem::Real { system, .. } => &system.model.name,
            LoadedSystem::Complex { system, .. } => &system.model.name,
        }
    }

    pub fn control(&self) -> &PiecewiseControl {
        match self {
            LoadedSystem::Real { control, .. } => control,
            LoadedSystem::Complex { control, .. } => control,
        }
    }
}

fn rows_to_matrix(rows: &[Vec<f64>], what: &str) -> Result<DMatrix<f64>> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != rows[0].len()) {
        return Err(Error::InvalidInput(format!("{what}: ragged or empty matrix")));
    }
    Ok(DMatrix::from_fn(n, rows[0].len(), |i, j| rows[i][j]))
}

fn assemble<T: Scalar>(
    model: Arc<LieGroupModel<T>>,
    doc: &SystemDoc,
) -> Result<(LinearControlSystem<T>, PiecewiseControl)> {
    let derivation = match &doc.derivation {
        DerivationSpec::Inner { inner } => {
            derivation_from_inner(model.clone(), &DVector::from_vec(inner.clone()))?
        }
        DerivationSpec::Matrix { matrix } => {
            Derivation::new(model.clone(), rows_to_matrix(matrix, "derivation")?)?
        }
    };
    let fields: Vec<DVector<f64>> = doc
        .control_fields
        .iter()
        .map(|y| DVector::from_vec(y.clone()))
        .collect();
    let range = doc.control_range.as_ref().map(|r| ControlRange {
        min: DVector::from_vec(r.min.clone()),
        max: DVector::from_vec(r.max.clone()),
    });
    let system = LinearControlSystem::new(model, derivation, fields, range)?;
    let m = system.num_controls();
    let control = if doc.control.is_empty() {
        PiecewiseControl::constant(1.0, DVector::zeros(m))?
    } else {
        for (i, s) in doc.control.iter().enumerate() {
            if s.u.len() != m {
                return Err(Error::DimensionMismatch(format!(
                    "control segment {i}: expected {m} channels, got {}",
                    s.u.len()
                )));
            }
        }
        PiecewiseControl::new(
            doc.control
                .iter()
                .map(|s| ControlSegment {
                    duration: s.duration,
                    u: DVector::from_vec(s.u.clone()),
                })
                .collect(),
        )?
    };
    Ok((system, control))
}

/// Parses and fully validates a system document.
pub fn load_system(json_text: &str) -> Result<LoadedSystem> {
    let doc: SystemDoc = serde_json::from_str(json_text)
        .map_err(|e| Error::InvalidInput(format!("system document: {e}")))?;
    match &doc.group {
        GroupSpec::Named(name) => match name.as_str() {
            "heisenberg" => {
                let (system, control) = assemble(catalog::heisenberg(), &doc)?;
                Ok(LoadedSystem::Real { system, control })
            }
            "r2" => {
                let (system, control) = assemble(catalog::r2(), &doc)?;
                Ok(LoadedSystem::Real { system, control })
            }
            "sl2" => {
                let (system, control) = assemble(catalog::sl2(), &doc)?;
                Ok(LoadedSystem::Real { system, control })
            }
            "so3" => {
                let (system, control) = assemble(catalog::so3(), &doc)?;
                Ok(LoadedSystem::Real { system, control })
            }
            "so21" => {
                let (system, control) = assemble(catalog::so21(), &doc)?;
                Ok(LoadedSystem::Real { system, control })
            }
            "su2" => {
                let (system, control) = assemble(catalog::su2(), &doc)?;
                Ok(LoadedSystem::Complex { system, control })
            }
            other => Err(Error::InvalidInput(format!("unknown group name {other:?}"))),
        },
        GroupSpec::GlPlus { gl_plus } => {
            let (system, control) = assemble(catalog::gl_plus(*gl_plus)?, &doc)?;
            Ok(LoadedSystem::Real { system, control })
        }
    }
}

fn doc_of<T: Scalar>(
    system: &LinearControlSystem<T>,
    control: &PiecewiseControl,
) -> SystemDoc {
    let group = if system.model.name == "gl_plus" {
        GroupSpec::GlPlus { gl_plus: system.model.ambient }
    } else {
        GroupSpec::Named(system.model.name.clone())
    };
    let derivation = match &system.derivation.inner_generator {
        Some(x) => DerivationSpec::Inner { inner: x.iter().copied().collect() },
        None => DerivationSpec::Matrix {
            matrix: system
                .derivation
                .matrix
                .row_iter()
                .map(|r| r.iter().copied().collect())
                .collect(),
        },
    };
    SystemDoc {
        group,
        derivation,
        control_fields: system
            .control_fields
            .iter()
            .map(|y| y.iter().copied().collect())
            .collect(),
        control_range: system.control_range.as_ref().map(|r| RangeSpec {
            min: r.min.iter().copied().collect(),
            max: r.max.iter().copied().collect(),
        }),
        control: control
            .segments
            .iter()
            .map(|s| SegmentSpec {
                duration: s.duration,
                u: s.u.iter().copied().collect(),
            })
            .collect(),
    }
}

/// Serializes a system + control back to the document schema (pretty JSON).
pub fn emit<T: Scalar>(
    system: &LinearControlSystem<T>,
    control: &PiecewiseControl,
) -> String {
    let doc = doc_of(system, control);
    serde_json::to_string_pretty(&doc).expect("system document serializes")
}

/// Scalar-specific CSV column layout for trajectory output.
pub trait CsvScalar: Scalar {
    fn column_names(i: usize, j: usize) -> Vec<String>;
    fn column_values(&self) -> Vec<f64>;
}

impl CsvScalar for f64 {
    fn column_names(i: usize, j: usize) -> Vec<String> {
        vec![format!("m_{i}{j}")]
    }
    fn column_values(&self) -> Vec<f64> {
        vec![*self]
    }
}

impl CsvScalar for C64 {
    fn column_names(i: usize, j: usize) -> Vec<String> {
        vec![format!("m_{i}{j}_re"), format!("m_{i}{j}_im")]
    }
    fn column_values(&self) -> Vec<f64> {
        vec![self.re, self.im]
    }
}

/// Trajectory as CSV: header `t,m_00,m_01,...` (row-major ambient matrix),
/// one row per sample, 17 significant digits.
pub fn trajectory_csv<T: CsvScalar>(traj: &Trajectory<T>) -> String {
    let n = traj.points[0].matrix.nrows();
    let mut header = vec!["t".to_string()];
    for i in 0..n {
        for j in 0..n {
            header.extend(T::column_names(i, j));
        }
    }
    let mut out = header.join(",");
    out.push('\n');
    for (t, p) in traj.times.iter().zip(&traj.points) {
        let mut row = vec![format!("{t:.16e}")];
        for i in 0..n {
            for j in 0..n {
                row.extend(
                    p.matrix[(i, j)]
                        .column_values()
                        .iter()
                        .map(|v| format!("{v:.16e}")),
                );
            }
        }
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
