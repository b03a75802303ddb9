//! Flat torus from a period lattice, as two triangles.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::develop::{DualLoop, DualStep};
use crate::surface::{EdgeRef, Gluing, SurfaceComplex, TriangleChart};

use super::{BuildError, BuildParams, BuiltModel, ModelBuilder};

/// The torus ℂ/(ω₁ℤ + ω₂ℤ), split along the diagonal of its fundamental
/// parallelogram. Its only vertex is regular (β = 0), so there is no
/// classification marking; the builder ships the two period loops `a`, `b`
/// instead.
pub struct FlatTorus;

impl ModelBuilder for FlatTorus {
    fn kind(&self) -> &'static str {
        "flat_torus"
    }

    fn describe(&self) -> &'static str {
        "flat torus with periods ω1, ω2 (two triangles; ships loops a, b)"
    }

    fn build(&self, params: &BuildParams) -> Result<BuiltModel, BuildError> {
        let (w1, w2) = params
            .periods
            .unwrap_or((Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)));
        let ratio = w2 / w1;
        if !ratio.im.is_finite() || ratio.im <= 0.0 {
            return Err(BuildError::DegenerateSpec(format!(
                "periods must satisfy Im(ω2/ω1) > 0, got {}",
                ratio.im
            )));
        }
        let zero = Complex64::new(0.0, 0.0);
        let charts = vec![
            TriangleChart::new("t0", [zero, w1, w1 + w2]),
            TriangleChart::new("t1", [zero, w1 + w2, w2]),
        ];
        let gluings = vec![
            Gluing::new(EdgeRef::new("t0", 2), EdgeRef::new("t1", 0)),
            Gluing::new(EdgeRef::new("t0", 0), EdgeRef::new("t1", 1)),
            Gluing::new(EdgeRef::new("t0", 1), EdgeRef::new("t1", 2)),
        ];
        let surface = SurfaceComplex::from_parts(charts, gluings, crate::geom::DEFAULT_TOL)?;

        let mut loops = BTreeMap::new();
        loops.insert(
            "a".to_string(),
            DualLoop::new("t0", vec![DualStep::new("t0", 1), DualStep::new("t1", 0)]),
        );
        loops.insert(
            "b".to_string(),
            DualLoop::new("t0", vec![DualStep::new("t0", 0), DualStep::new("t1", 0)]),
        );
        Ok(BuiltModel {
            surface,
            marking: None,
            beta: None,
            loops,
        })
    }
}
