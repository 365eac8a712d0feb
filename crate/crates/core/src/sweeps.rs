//! Grid evaluation of the discriminant, phase label and decay rate.
//!
//! Cells are independent, so the grid is a plain parallel map. Output is
//! always row-major with `gamma_t1` as the slow (row) index and `omega_t0`
//! as the fast (column) index, whatever the worker count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::floquet::{classify, discriminant, ep_boundary, point_spectrum, PhaseLabel};
use crate::models::DimensionlessPoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, count: usize) -> Self {
        Self { min, max, count }
    }

    pub fn value(&self, i: usize, spacing: Spacing) -> f64 {
        if i == 0 {
            return self.min;
        }
        if i + 1 == self.count {
            return self.max;
        }
        let frac = i as f64 / (self.count - 1) as f64;
        match spacing {
            Spacing::Linear => self.min + (self.max - self.min) * frac,
            Spacing::Log => (self.min.ln() + (self.max.ln() - self.min.ln()) * frac).exp(),
        }
    }

    pub fn values(&self, spacing: Spacing) -> Vec<f64> {
        (0..self.count).map(|i| self.value(i, spacing)).collect()
    }

    fn validate(&self, name: &str, spacing: Spacing) -> Result<()> {
        if self.count < 2 {
            return Err(Error::InvalidGrid(format!(
                "{name}: count must be at least 2"
            )));
        }
        if !(self.min.is_finite() && self.max.is_finite()) {
            return Err(Error::InvalidGrid(format!("{name}: bounds must be finite")));
        }
        if self.min >= self.max {
            return Err(Error::InvalidGrid(format!("{name}: min must be below max")));
        }
        if self.min < 0.0 {
            return Err(Error::InvalidGrid(format!(
                "{name}: bounds must be non-negative"
            )));
        }
        if spacing == Spacing::Log && self.min <= 0.0 {
            return Err(Error::InvalidGrid(format!(
                "{name}: log spacing needs a positive minimum"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub omega_t0: Axis,
    pub gamma_t1: Axis,
    pub spacing: Spacing,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            omega_t0: Axis::new(0.0, std::f64::consts::PI, 256),
            gamma_t1: Axis::new(0.0, 2.0, 256),
            spacing: Spacing::Linear,
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        self.omega_t0.validate("omega_t0", self.spacing)?;
        self.gamma_t1.validate("gamma_t1", self.spacing)
    }

    pub fn len(&self) -> usize {
        self.omega_t0.count * self.gamma_t1.count
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid node for a row-major cell index.
    pub fn point(&self, index: usize) -> DimensionlessPoint {
        let row = index / self.omega_t0.count;
        let col = index % self.omega_t0.count;
        DimensionlessPoint {
            omega_t0: self.omega_t0.value(col, self.spacing),
            gamma_t1: self.gamma_t1.value(row, self.spacing),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub omega_t0: f64,
    pub gamma_t1: f64,
    pub discriminant: f64,
    pub phase: PhaseLabel,
    /// Per-period decay rate `−2·ln|η₊|`.
    pub kappa: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseDiagram {
    pub spec: GridSpec,
    pub tolerance: f64,
    pub cells: Vec<Cell>,
}

impl PhaseDiagram {
    pub fn cell(&self, row: usize, col: usize) -> &Cell {
        &self.cells[row * self.spec.omega_t0.count + col]
    }
}

fn evaluate(point: DimensionlessPoint, tol: f64) -> Cell {
    Cell {
        omega_t0: point.omega_t0,
        gamma_t1: point.gamma_t1,
        discriminant: discriminant(point),
        phase: classify(point, tol),
        kappa: point_spectrum(point).kappa(),
    }
}

/// Evaluates every node of `spec` with the default EP tolerance on the
/// global rayon pool.
pub fn phase_diagram(spec: &GridSpec) -> Result<PhaseDiagram> {
    phase_diagram_with(spec, crate::floquet::DEFAULT_TOLERANCE, None)
}

/// Like [`phase_diagram`] with an explicit tolerance and worker count
/// (`None` uses the global pool).
pub fn phase_diagram_with(
    spec: &GridSpec,
    tolerance: f64,
    workers: Option<usize>,
) -> Result<PhaseDiagram> {
    spec.validate()?;
    let run = || -> Vec<Cell> {
        (0..spec.len())
            .into_par_iter()
            .map(|i| evaluate(spec.point(i), tolerance))
            .collect()
    };
    let cells = match workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::InvalidGrid(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    };
    Ok(PhaseDiagram {
        spec: *spec,
        tolerance,
        cells,
    })
}

/// Decay-rate map over the grid. The cells carry the same channels as
/// [`phase_diagram`]; this entry point exists for the kappa view.
pub fn decay_map(spec: &GridSpec) -> Result<PhaseDiagram> {
    phase_diagram(spec)
}

pub fn decay_map_with(
    spec: &GridSpec,
    tolerance: f64,
    workers: Option<usize>,
) -> Result<PhaseDiagram> {
    phase_diagram_with(spec, tolerance, workers)
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BoundaryCurve {
    /// `(Ωt₀, γt₁*)` pairs in input order.
    pub points: Vec<(f64, f64)>,
    /// Inputs outside `(0, π)`.
    pub skipped: Vec<f64>,
}

pub fn boundary_curve(omega_t0_samples: &[f64]) -> BoundaryCurve {
    let mut curve = BoundaryCurve::default();
    for &a in omega_t0_samples {
        match ep_boundary(a) {
            Ok(g) => curve.points.push((a, g)),
            Err(_) => curve.skipped.push(a),
        }
    }
    curve
}

/// `count` evenly spaced samples in the open interval `(lo, hi)`.
pub fn open_interval_samples(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (1..=count)
        .map(|i| lo + (hi - lo) * i as f64 / (count + 1) as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn small_spec() -> GridSpec {
        GridSpec {
            omega_t0: Axis::new(0.0, PI, 33),
            gamma_t1: Axis::new(0.0, 2.0, 21),
            spacing: Spacing::Linear,
        }
    }

    #[test]
    fn unitary_row_never_broken() {
        let d = phase_diagram(&small_spec()).unwrap();
        for col in 0..33 {
            let c = d.cell(0, col);
            assert_eq!(c.gamma_t1, 0.0);
            assert!(c.discriminant <= 1.0);
            assert_ne!(c.phase, PhaseLabel::Ptbp);
            assert_eq!(c.kappa, 0.0);
        }
    }

    #[test]
    fn pure_measurement_column_is_broken() {
        let d = phase_diagram(&small_spec()).unwrap();
        for row in 1..21 {
            let c = d.cell(row, 0);
            assert_eq!(c.omega_t0, 0.0);
            assert_eq!(c.phase, PhaseLabel::Ptbp);
        }
    }

    #[test]
    fn labels_flip_across_boundary() {
        let d = phase_diagram(&small_spec()).unwrap();
        for col in 1..32 {
            let a = d.cell(0, col).omega_t0;
            let g_star = ep_boundary(a).unwrap();
            for row in 0..21 {
                let c = d.cell(row, col);
                if c.gamma_t1 < g_star * (1.0 - 1e-9) {
                    assert_eq!(c.phase, PhaseLabel::Ptsp, "({a}, {})", c.gamma_t1);
                } else if c.gamma_t1 > g_star * (1.0 + 1e-9) {
                    assert_eq!(c.phase, PhaseLabel::Ptbp, "({a}, {})", c.gamma_t1);
                }
            }
        }
    }

    #[test]
    fn grid_validation() {
        let mut spec = small_spec();
        spec.omega_t0.count = 1;
        assert!(phase_diagram(&spec).is_err());
        let mut spec = small_spec();
        spec.gamma_t1 = Axis::new(1.0, 1.0, 4);
        assert!(spec.validate().is_err());
        let mut spec = small_spec();
        spec.spacing = Spacing::Log;
        assert!(spec.validate().is_err());
        spec.omega_t0.min = 0.01;
        spec.gamma_t1.min = 0.01;
        assert!(spec.validate().is_ok());
    }

    #[test]
    fn log_axis_hits_endpoints() {
        let axis = Axis::new(0.01, 10.0, 4);
        let v = axis.values(Spacing::Log);
        assert_eq!(v[0], 0.01);
        assert_eq!(v[3], 10.0);
        assert!((v[1] - 0.1).abs() < 1e-12);
    }

    #[test]
    fn boundary_skips_out_of_domain() {
        let curve = boundary_curve(&[-1.0, 0.1, PI, 3.5, 1.0]);
        assert_eq!(curve.points.len(), 2);
        assert_eq!(curve.skipped, vec![-1.0, PI, 3.5]);
        assert!((curve.points[0].1 - 0.100_04).abs() < 1e-5);
    }

    #[test]
    fn worker_count_does_not_change_output() {
        let a = phase_diagram_with(&small_spec(), 1e-12, Some(1)).unwrap();
        let b = phase_diagram_with(&small_spec(), 1e-12, Some(3)).unwrap();
        assert_eq!(a, b);
    }
}
