use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::geometry::Convention;

/// Outcome of one verification check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub surface: String,
    pub convention: Convention,
    pub seed: u64,
    pub points: usize,
    pub tolerance: f64,
    pub max_residual: f64,
    pub per_component: BTreeMap<String, f64>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CheckReport {
    pub(crate) fn from_components(
        check: &str,
        surface: &str,
        convention: Convention,
        seed: u64,
        points: usize,
        tolerance: f64,
        per_component: BTreeMap<String, f64>,
    ) -> CheckReport {
        let max_residual = per_component.values().copied().fold(0.0, f64::max);
        CheckReport {
            check: check.to_string(),
            surface: surface.to_string(),
            convention,
            seed,
            points,
            tolerance,
            max_residual,
            per_component,
            pass: max_residual < tolerance,
            notes: Vec::new(),
        }
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} on {}: {} (max residual {:e}, tolerance {:e})",
            self.check,
            self.surface,
            if self.pass { "PASS" } else { "FAIL" },
            self.max_residual,
            self.tolerance
        )?;
        writeln!(
            f,
            "  convention {}  seed {}  points {}",
            self.convention, self.seed, self.points
        )?;
        for (name, r) in &self.per_component {
            writeln!(f, "  {name:<12} {r:e}")?;
        }
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        Ok(())
    }
}

/// Solved space of constant geometric potentials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullspaceReport {
    pub check: String,
    pub surface: String,
    pub convention: Convention,
    pub seed: u64,
    pub points: usize,
    pub tolerance: f64,
    pub rows: usize,
    pub cols: usize,
    pub singular_values: Vec<f64>,
    pub dimension: usize,
    /// Orthonormal basis in `(a0, ax, ay, az)` coordinates.
    pub basis: Vec<[f64; 4]>,
    pub span: Vec<String>,
    /// Largest constraint residual of any basis vector.
    pub max_residual: f64,
    pub per_component: BTreeMap<String, f64>,
    /// Largest principal angle between the nullspaces of two disjoint samples.
    pub principal_angle: f64,
    pub stable: bool,
    /// Residual of the wedge condition for `H` alone.
    pub hamiltonian_residual: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl NullspaceReport {
    /// `dimension 2: span{I, sigma_z}`.
    pub fn summary(&self) -> String {
        format!("dimension {}: span{{{}}}", self.dimension, self.span.join(", "))
    }
}

impl fmt::Display for NullspaceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} on {}: {} ({})",
            self.check,
            self.surface,
            if self.pass { "PASS" } else { "FAIL" },
            self.summary()
        )?;
        writeln!(
            f,
            "  convention {}  seed {}  points {}  matrix {}x{}  tolerance {:e}",
            self.convention, self.seed, self.points, self.rows, self.cols, self.tolerance
        )?;
        let mut sv = String::new();
        for (k, s) in self.singular_values.iter().enumerate() {
            if k > 0 {
                sv.push_str(", ");
            }
            let _ = write!(sv, "{s:e}");
        }
        writeln!(f, "  singular values [{sv}]")?;
        for (b, label) in self.basis.iter().zip(&self.span) {
            writeln!(f, "  basis {label:<10} ({}, {}, {}, {})", b[0], b[1], b[2], b[3])?;
        }
        writeln!(
            f,
            "  max residual {:e}  principal angle {:e}  stable {}  H-alone residual {:e}",
            self.max_residual, self.principal_angle, self.stable, self.hamiltonian_residual
        )?;
        for w in &self.warnings {
            writeln!(f, "  warning: {w}")?;
        }
        Ok(())
    }
}
