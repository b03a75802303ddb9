//! Boundary of the regular tetrahedron.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::surface::{EdgeRef, Gluing, SurfaceComplex, TriangleChart};

use super::{measured_beta, peripheral_marking, positive_edge, BuildError, BuildParams, BuiltModel, ModelBuilder};

/// Four equilateral faces; every vertex has cone angle π (β = −1/2).
///
/// Faces: t0 is the base (v1, v2, v3); t1, t2, t3 are attached across its
/// edges and share the apex v4 at their corner 2.
pub struct Tetrahedron;

/// Puncture order and star start triangles giving a freely trivial
/// relator word: the apex star read from t2 spells the product that the
/// three base-vertex stars then peel off letter by letter.
const STARS: [(&str, &str); 4] = [
    ("t1:2", "t2"), // apex v4
    ("t0:2", "t0"), // v3
    ("t0:0", "t0"), // v1
    ("t0:1", "t0"), // v2
];

impl ModelBuilder for Tetrahedron {
    fn kind(&self) -> &'static str {
        "tetrahedron"
    }

    fn describe(&self) -> &'static str {
        "boundary of the regular tetrahedron (4 cone points of angle π)"
    }

    fn build(&self, params: &BuildParams) -> Result<BuiltModel, BuildError> {
        let edge = positive_edge(params)?;
        let corner = Complex64::from_polar(edge, std::f64::consts::PI / 3.0);
        let chart = [
            Complex64::new(0.0, 0.0),
            Complex64::new(edge, 0.0),
            corner,
        ];
        let charts = (0..4)
            .map(|i| TriangleChart::new(format!("t{i}"), chart))
            .collect();
        let gluings = vec![
            Gluing::new(EdgeRef::new("t0", 0), EdgeRef::new("t1", 0)),
            Gluing::new(EdgeRef::new("t0", 1), EdgeRef::new("t2", 0)),
            Gluing::new(EdgeRef::new("t0", 2), EdgeRef::new("t3", 0)),
            Gluing::new(EdgeRef::new("t1", 1), EdgeRef::new("t3", 2)),
            Gluing::new(EdgeRef::new("t2", 1), EdgeRef::new("t1", 2)),
            Gluing::new(EdgeRef::new("t3", 1), EdgeRef::new("t2", 2)),
        ];
        let surface = SurfaceComplex::from_parts(charts, gluings, crate::geom::DEFAULT_TOL)?;
        let stars: Vec<(String, String)> = STARS
            .iter()
            .map(|&(c, t)| (c.to_string(), t.to_string()))
            .collect();
        let marking = peripheral_marking(&surface, "t0", &stars)?;
        let beta = measured_beta(&surface, &marking.punctures)?;
        Ok(BuiltModel {
            surface,
            marking: Some(marking),
            beta: Some(beta),
            loops: BTreeMap::new(),
        })
    }
}
