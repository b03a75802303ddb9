//! Reference models with markings, one builder per kind.
//!
//! Every model variant implements [`ModelBuilder`] and is registered by
//! name; the CLI `build` subcommand selects one at runtime. Builders are
//! deterministic: ids, gluings, and marking loops come out identical on
//! every run.
//!
//! Marking construction: the c-loops are vertex star loops conjugated to
//! the base by paths in a breadth-first spanning tree of the dual graph.
//! Tree crossings are silent in the co-tree word of a loop, so the chosen
//! puncture order and star start triangles (fixed per model) make the
//! product c₁…c_n freely trivial, which the builder tests verify with the
//! word oracle.

pub mod cube;
pub mod double_polygon;
pub mod flat_torus;
pub mod tetrahedron;

use std::collections::BTreeMap;

use num_complex::Complex64;
use thiserror::Error;

use crate::develop::{attach_basepath, vertex_star_loop, DevelopError, DualLoop, SpanningTree};
use crate::rep::{BetaVector, Marking, RepError};
use crate::surface::{SurfaceComplex, SurfaceError};

pub use cube::Cube;
pub use double_polygon::DoublePolygon;
pub use flat_torus::FlatTorus;
pub use tetrahedron::Tetrahedron;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BuildError {
    #[error("unknown model kind {0:?}")]
    UnknownKind(String),
    #[error("degenerate model parameters: {0}")]
    DegenerateSpec(String),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Develop(#[from] DevelopError),
    #[error(transparent)]
    Rep(#[from] RepError),
}

/// Kind-specific parameters; each builder reads the fields it needs.
#[derive(Debug, Clone, Default)]
pub struct BuildParams {
    pub edge: Option<f64>,
    pub periods: Option<(Complex64, Complex64)>,
    pub polygon: Option<Vec<Complex64>>,
}

/// A kind name plus its parameters.
#[derive(Debug, Clone)]
pub struct ModelSpec {
    pub kind: String,
    pub params: BuildParams,
}

/// A built model: the surface, a classification marking with measured
/// orders when the model admits one, and any extra named loops.
#[derive(Debug, Clone)]
pub struct BuiltModel {
    pub surface: SurfaceComplex,
    pub marking: Option<Marking>,
    pub beta: Option<BetaVector>,
    pub loops: BTreeMap<String, DualLoop>,
}

/// One model variant, selected by name at runtime.
pub trait ModelBuilder: Sync {
    fn kind(&self) -> &'static str;
    fn describe(&self) -> &'static str;
    fn build(&self, params: &BuildParams) -> Result<BuiltModel, BuildError>;
}

static REGISTRY: [&dyn ModelBuilder; 4] = [&Tetrahedron, &Cube, &FlatTorus, &DoublePolygon];

/// All registered builders.
pub fn registry() -> &'static [&'static dyn ModelBuilder] {
    &REGISTRY
}

/// Finds a builder by kind name.
pub fn lookup(kind: &str) -> Option<&'static dyn ModelBuilder> {
    registry().iter().copied().find(|b| b.kind() == kind)
}

/// Dispatches a spec to its registered builder.
pub fn build_model(spec: &ModelSpec) -> Result<BuiltModel, BuildError> {
    lookup(&spec.kind)
        .ok_or_else(|| BuildError::UnknownKind(spec.kind.clone()))?
        .build(&spec.params)
}

fn positive_edge(params: &BuildParams) -> Result<f64, BuildError> {
    let edge = params.edge.unwrap_or(1.0);
    if !edge.is_finite() || edge <= 0.0 {
        return Err(BuildError::DegenerateSpec(format!(
            "edge length must be positive, got {edge}"
        )));
    }
    Ok(edge)
}

/// Assembles a genus-zero marking from an ordered list of
/// (vertex class, star start triangle) pairs: each c-loop is the star loop
/// conjugated to the base by its spanning-tree path.
fn peripheral_marking(
    s: &SurfaceComplex,
    base: &str,
    stars: &[(String, String)],
) -> Result<Marking, BuildError> {
    let tree = SpanningTree::new(s, base)?;
    let mut c_loops = Vec::with_capacity(stars.len());
    let mut punctures = Vec::with_capacity(stars.len());
    for (class, start) in stars {
        let star = vertex_star_loop(s, class, start)?;
        let path = tree.path_to(start)?;
        c_loops.push(attach_basepath(s, &path, &star)?);
        punctures.push(class.clone());
    }
    Ok(Marking {
        base: base.to_string(),
        a_loops: Vec::new(),
        b_loops: Vec::new(),
        c_loops,
        punctures,
    })
}

/// Measured singularity orders in puncture order.
fn measured_beta(s: &SurfaceComplex, punctures: &[String]) -> Result<BetaVector, BuildError> {
    let mut values = Vec::with_capacity(punctures.len());
    for p in punctures {
        values.push(s.singularity_order(s.vertex_class(p)?));
    }
    BetaVector::new(values).map_err(BuildError::Rep)
}

/// Vertices of the regular k-gon with unit circumradius, counterclockwise.
pub fn regular_polygon(k: usize) -> Vec<Complex64> {
    (0..k)
        .map(|j| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / k as f64))
        .collect()
}

/// Ready-made reference surfaces for tests and examples.
pub mod fixtures {
    use super::*;

    pub fn tetrahedron(edge: f64) -> SurfaceComplex {
        Tetrahedron
            .build(&BuildParams {
                edge: Some(edge),
                ..Default::default()
            })
            .expect("tetrahedron builds")
            .surface
    }

    pub fn cube(edge: f64) -> SurfaceComplex {
        Cube.build(&BuildParams {
            edge: Some(edge),
            ..Default::default()
        })
        .expect("cube builds")
        .surface
    }

    pub fn flat_torus(omega1: Complex64, omega2: Complex64) -> SurfaceComplex {
        FlatTorus
            .build(&BuildParams {
                periods: Some((omega1, omega2)),
                ..Default::default()
            })
            .expect("flat torus builds")
            .surface
    }

    /// The doubled unit square with its marking and measured orders.
    pub fn pillowcase() -> (SurfaceComplex, Marking, BetaVector) {
        let square = vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 1.0),
            Complex64::new(0.0, 1.0),
        ];
        let model = DoublePolygon
            .build(&BuildParams {
                polygon: Some(square),
                ..Default::default()
            })
            .expect("pillowcase builds");
        (
            model.surface,
            model.marking.expect("pillowcase has a marking"),
            model.beta.expect("pillowcase has orders"),
        )
    }

    /// The doubled regular k-gon with its marking and measured orders.
    pub fn double_regular(k: usize) -> (SurfaceComplex, Marking, BetaVector) {
        let model = DoublePolygon
            .build(&BuildParams {
                polygon: Some(regular_polygon(k)),
                ..Default::default()
            })
            .expect("doubled regular polygon builds");
        (
            model.surface,
            model.marking.expect("doubled polygon has a marking"),
            model.beta.expect("doubled polygon has orders"),
        )
    }

    /// The cube with its marking and measured orders.
    pub fn cube_marked(edge: f64) -> (SurfaceComplex, Marking, BetaVector) {
        let model = Cube
            .build(&BuildParams {
                edge: Some(edge),
                ..Default::default()
            })
            .expect("cube builds");
        (
            model.surface,
            model.marking.expect("cube has a marking"),
            model.beta.expect("cube has orders"),
        )
    }

    /// The tetrahedron with its marking and measured orders.
    pub fn tetrahedron_marked(edge: f64) -> (SurfaceComplex, Marking, BetaVector) {
        let model = Tetrahedron
            .build(&BuildParams {
                edge: Some(edge),
                ..Default::default()
            })
            .expect("tetrahedron builds");
        (
            model.surface,
            model.marking.expect("tetrahedron has a marking"),
            model.beta.expect("tetrahedron has orders"),
        )
    }

    /// A genus-two surface: the regular octagon with opposite-side pattern
    /// a b a⁻¹ b⁻¹ c d c⁻¹ d⁻¹, fan-triangulated. One vertex of order 2.
    pub fn octagon_genus_two() -> SurfaceComplex {
        use crate::surface::{EdgeRef, Gluing, TriangleChart};
        let p: Vec<Complex64> = regular_polygon(8);
        let mut charts = Vec::new();
        for i in 1..=6 {
            charts.push(TriangleChart::new(
                format!("g{i}"),
                [p[0], p[i], p[i + 1]],
            ));
        }
        let mut gluings = Vec::new();
        // fan diagonals
        for i in 1..=5 {
            gluings.push(Gluing::new(
                EdgeRef::new(format!("g{}", i + 1), 0),
                EdgeRef::new(format!("g{i}"), 2),
            ));
        }
        // side s_i lives on (g1,0) for i=0, (g_i,1) for 1..=6, (g6,2) for 7
        let side = |i: usize| -> EdgeRef {
            match i {
                0 => EdgeRef::new("g1", 0),
                7 => EdgeRef::new("g6", 2),
                _ => EdgeRef::new(format!("g{i}"), 1),
            }
        };
        for (a, b) in [(0, 2), (1, 3), (4, 6), (5, 7)] {
            gluings.push(Gluing::new(side(a), side(b)));
        }
        SurfaceComplex::from_parts(charts, gluings, crate::geom::DEFAULT_TOL)
            .expect("octagon builds")
    }
}
