//! Boundary of the cube, faces split along a diagonal.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::surface::{EdgeRef, Gluing, SurfaceComplex, TriangleChart};

use super::{measured_beta, peripheral_marking, positive_edge, BuildError, BuildParams, BuiltModel, ModelBuilder};

/// Six square faces, each split along the diagonal from corner 0 to
/// corner 2, giving 12 charts and 8 cone points of angle 3π/2 (β = −1/4).
pub struct Cube;

/// Faces as vertex tuples, counterclockwise seen from outside.
const FACES: [[usize; 4]; 6] = [
    [0, 3, 2, 1], // f0 bottom
    [0, 1, 5, 4], // f1 front
    [1, 2, 6, 5], // f2 right
    [2, 3, 7, 6], // f3 back
    [3, 0, 4, 7], // f4 left
    [4, 5, 6, 7], // f5 top
];

/// Puncture order and star start triangles with a freely trivial relator
/// word; found once by searching the star-word conjugates with the co-tree
/// word oracle (see the `marking_search` test) and fixed here.
const STARS: [(&str, &str); 8] = [
    ("f0a:0", "f0a"),
    ("f1a:2", "f1b"),
    ("f1b:2", "f1b"),
    ("f2a:2", "f5b"),
    ("f3a:2", "f4b"),
    ("f0a:1", "f0a"),
    ("f0a:2", "f0a"),
    ("f0b:2", "f0b"),
];

/// The two triangles of face `f`: `f{f}a` = corners (0,1,2) of the square,
/// `f{f}b` = corners (0,2,3).
fn face_side_edge(face: usize, side: usize) -> EdgeRef {
    match side {
        0 => EdgeRef::new(format!("f{face}a"), 0),
        1 => EdgeRef::new(format!("f{face}a"), 1),
        2 => EdgeRef::new(format!("f{face}b"), 1),
        3 => EdgeRef::new(format!("f{face}b"), 2),
        _ => unreachable!("squares have four sides"),
    }
}

pub(crate) fn cube_surface(edge: f64) -> Result<SurfaceComplex, BuildError> {
    let square = [
        Complex64::new(0.0, 0.0),
        Complex64::new(edge, 0.0),
        Complex64::new(edge, edge),
        Complex64::new(0.0, edge),
    ];
    let mut charts = Vec::with_capacity(12);
    let mut gluings = Vec::with_capacity(18);
    for f in 0..6 {
        charts.push(TriangleChart::new(
            format!("f{f}a"),
            [square[0], square[1], square[2]],
        ));
        charts.push(TriangleChart::new(
            format!("f{f}b"),
            [square[0], square[2], square[3]],
        ));
        gluings.push(Gluing::new(
            EdgeRef::new(format!("f{f}a"), 2),
            EdgeRef::new(format!("f{f}b"), 0),
        ));
    }
    // face adjacencies: each directed vertex pair appears once per face
    let mut sides: BTreeMap<(usize, usize), (usize, usize)> = BTreeMap::new();
    for (f, verts) in FACES.iter().enumerate() {
        for s in 0..4 {
            sides.insert((verts[s], verts[(s + 1) % 4]), (f, s));
        }
    }
    for (&(a, b), &(f, s)) in &sides {
        if a < b {
            let (f2, s2) = sides[&(b, a)];
            gluings.push(Gluing::new(face_side_edge(f, s), face_side_edge(f2, s2)));
        }
    }
    SurfaceComplex::from_parts(charts, gluings, crate::geom::DEFAULT_TOL).map_err(Into::into)
}

impl ModelBuilder for Cube {
    fn kind(&self) -> &'static str {
        "cube"
    }

    fn describe(&self) -> &'static str {
        "boundary of the cube (8 cone points of angle 3π/2)"
    }

    fn build(&self, params: &BuildParams) -> Result<BuiltModel, BuildError> {
        let edge = positive_edge(params)?;
        let surface = cube_surface(edge)?;
        let stars: Vec<(String, String)> = STARS
            .iter()
            .map(|&(c, t)| (c.to_string(), t.to_string()))
            .collect();
        let marking = peripheral_marking(&surface, "f0a", &stars)?;
        let beta = measured_beta(&surface, &marking.punctures)?;
        Ok(BuiltModel {
            surface,
            marking: Some(marking),
            beta: Some(beta),
            loops: BTreeMap::new(),
        })
    }
}
