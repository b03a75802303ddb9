//! Developing maps and holonomy along dual-graph paths.
//!
//! A path is a sequence of edge crossings in the dual graph. Developing a
//! path unfolds each hinge in turn: the next triangle is placed by the
//! unique isometry matching its chart edge onto the placed edge with
//! opposite traversal. The holonomy of a loop is the isometry carrying the
//! base placement to the final placement of the base triangle; with
//! left-to-right concatenation ("first γ₁, then γ₂") it satisfies
//! φ(γ₁γ₂) = φ(γ₁)∘φ(γ₂).

use std::collections::{BTreeMap, VecDeque};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{isometry_from_edge_pair, GeomError, SE2};
use crate::surface::{SurfaceComplex, SurfaceError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DevelopError {
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error("step {index} starts at {found:?}, expected {expected:?}")]
    BrokenChain {
        index: usize,
        expected: String,
        found: String,
    },
    #[error("loop does not return to its base triangle {base:?} (ends at {end:?})")]
    NotClosed { base: String, end: String },
    #[error("loops are based at {0:?} and {1:?}")]
    BaseMismatch(String, String),
    #[error("triangle {triangle:?} is not incident to vertex class {class:?}")]
    NotIncident { class: String, triangle: String },
}

/// One crossing: leave `triangle` through `edge`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualStep {
    pub triangle: String,
    pub edge: u8,
}

impl DualStep {
    pub fn new(triangle: impl Into<String>, edge: u8) -> Self {
        DualStep {
            triangle: triangle.into(),
            edge,
        }
    }
}

/// A closed dual path based at a triangle; the empty loop is allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualLoop {
    pub base: String,
    pub steps: Vec<DualStep>,
}

impl DualLoop {
    pub fn new(base: impl Into<String>, steps: Vec<DualStep>) -> Self {
        DualLoop {
            base: base.into(),
            steps,
        }
    }

    pub fn trivial(base: impl Into<String>) -> Self {
        DualLoop::new(base, Vec::new())
    }

    /// Checks that the steps chain from the base and return to it.
    pub fn validate(&self, s: &SurfaceComplex) -> Result<(), DevelopError> {
        let end = walk(s, &self.base, &self.steps)?;
        if end != self.base {
            return Err(DevelopError::NotClosed {
                base: self.base.clone(),
                end,
            });
        }
        Ok(())
    }
}

/// Where the chain of crossings starting at `base` ends up.
fn walk(s: &SurfaceComplex, base: &str, steps: &[DualStep]) -> Result<String, DevelopError> {
    let mut current = base.to_string();
    for (i, step) in steps.iter().enumerate() {
        if step.triangle != current {
            return Err(DevelopError::BrokenChain {
                index: i,
                expected: current,
                found: step.triangle.clone(),
            });
        }
        current = s.glued_partner(&step.triangle, step.edge)?.triangle;
    }
    Ok(current)
}

/// A triangle placed in the developed plane: the isometry is applied to the
/// chart to obtain the placed position.
#[derive(Debug, Clone, PartialEq)]
pub struct Placement {
    pub triangle: String,
    pub iso: SE2,
}

/// The sequence of placements along a developed path.
#[derive(Debug, Clone, PartialEq)]
pub struct DevelopedChain {
    pub placements: Vec<Placement>,
}

impl DevelopedChain {
    pub fn final_iso(&self) -> SE2 {
        self.placements
            .last()
            .map(|p| p.iso)
            .unwrap_or_else(SE2::identity)
    }

    pub fn placed_corners(&self, s: &SurfaceComplex, i: usize) -> [Complex64; 3] {
        let p = &self.placements[i];
        let chart = s.chart(&p.triangle).expect("placement names a chart");
        [
            p.iso.apply(chart.corners[0]),
            p.iso.apply(chart.corners[1]),
            p.iso.apply(chart.corners[2]),
        ]
    }

    /// JSON export: `{"placements":[{"triangle":"t0","points":[[x,y],…]},…]}`.
    pub fn to_json(&self, s: &SurfaceComplex) -> String {
        #[derive(Serialize)]
        struct PlacementOut {
            triangle: String,
            points: [[f64; 2]; 3],
        }
        #[derive(Serialize)]
        struct ChainOut {
            placements: Vec<PlacementOut>,
        }
        let placements = (0..self.placements.len())
            .map(|i| {
                let pts = self.placed_corners(s, i);
                PlacementOut {
                    triangle: self.placements[i].triangle.clone(),
                    points: [
                        [pts[0].re, pts[0].im],
                        [pts[1].re, pts[1].im],
                        [pts[2].re, pts[2].im],
                    ],
                }
            })
            .collect();
        serde_json::to_string(&ChainOut { placements }).expect("chain serialization cannot fail")
    }

    /// SVG export: one polygon per placement, 2-decimal coordinates,
    /// y axis flipped to keep the mathematical orientation on screen.
    pub fn to_svg(&self, s: &SurfaceComplex, scale: f64) -> String {
        let mut pts: Vec<(f64, f64)> = Vec::new();
        for i in 0..self.placements.len() {
            for c in self.placed_corners(s, i) {
                pts.push((c.re * scale, -c.im * scale));
            }
        }
        let (mut min_x, mut min_y, mut max_x, mut max_y) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for (i, &(x, y)) in pts.iter().enumerate() {
            if i == 0 {
                (min_x, min_y, max_x, max_y) = (x, y, x, y);
            }
            min_x = min_x.min(x);
            min_y = min_y.min(y);
            max_x = max_x.max(x);
            max_y = max_y.max(y);
        }
        let pad = 0.05 * ((max_x - min_x).max(max_y - min_y)).max(1.0);
        let mut out = String::new();
        out.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{:.2} {:.2} {:.2} {:.2}\">\n",
            min_x - pad,
            min_y - pad,
            (max_x - min_x) + 2.0 * pad,
            (max_y - min_y) + 2.0 * pad
        ));
        for i in 0..self.placements.len() {
            let corners = self.placed_corners(s, i);
            let coords: Vec<String> = corners
                .iter()
                .map(|c| format!("{:.2},{:.2}", c.re * scale, -c.im * scale))
                .collect();
            out.push_str(&format!(
                "  <polygon points=\"{}\" fill=\"#dce6f2\" stroke=\"#333333\" stroke-width=\"{:.2}\"><title>{}</title></polygon>\n",
                coords.join(" "),
                0.01 * scale,
                self.placements[i].triangle
            ));
        }
        out.push_str("</svg>\n");
        out
    }
}

/// Continues a placement across one glued edge.
///
/// The next triangle's chart edge is matched onto the placed edge with
/// opposite traversal, so the two placed triangles share the edge
/// endpoint-for-endpoint and lie on opposite sides of it.
pub fn unfold_hinge(
    s: &SurfaceComplex,
    current: &Placement,
    crossed_edge: u8,
) -> Result<Placement, DevelopError> {
    let chart = s
        .chart(&current.triangle)
        .ok_or_else(|| SurfaceError::UnknownTriangle(current.triangle.clone()))?;
    let partner = s.glued_partner(&current.triangle, crossed_edge)?;
    let next_chart = s.chart(&partner.triangle).expect("partner chart exists");
    let (a, b) = chart.edge_endpoints(crossed_edge);
    let (pa, pb) = (current.iso.apply(a), current.iso.apply(b));
    let (qa, qb) = next_chart.edge_endpoints(partner.edge);
    let iso = isometry_from_edge_pair(qa, qb, pb, pa, s.tol() * chart.max_edge_length().max(1.0))?;
    Ok(Placement {
        triangle: partner.triangle,
        iso,
    })
}

/// Develops a chain of crossings starting from (base, base_iso).
pub fn develop_path(
    s: &SurfaceComplex,
    base: &str,
    base_iso: SE2,
    steps: &[DualStep],
) -> Result<DevelopedChain, DevelopError> {
    if s.chart(base).is_none() {
        return Err(SurfaceError::UnknownTriangle(base.to_string()).into());
    }
    let mut placements = Vec::with_capacity(steps.len() + 1);
    placements.push(Placement {
        triangle: base.to_string(),
        iso: base_iso,
    });
    for (i, step) in steps.iter().enumerate() {
        let last = placements.last().unwrap();
        if step.triangle != last.triangle {
            return Err(DevelopError::BrokenChain {
                index: i,
                expected: last.triangle.clone(),
                found: step.triangle.clone(),
            });
        }
        let next = unfold_hinge(s, last, step.edge)?;
        placements.push(next);
    }
    Ok(DevelopedChain { placements })
}

/// Holonomy of a loop: the final placement isometry when the base is placed
/// by the identity.
pub fn holonomy_of_loop(s: &SurfaceComplex, l: &DualLoop) -> Result<SE2, DevelopError> {
    holonomy_with_base(s, l, SE2::identity()).map(|(h, _)| h)
}

/// Holonomy together with the developed chain, for an arbitrary base
/// placement. Returns the final placement isometry, which equals
/// g·φ(γ)·g⁻¹ for base placement g.
pub fn holonomy_with_base(
    s: &SurfaceComplex,
    l: &DualLoop,
    base_iso: SE2,
) -> Result<(SE2, DevelopedChain), DevelopError> {
    let chain = develop_path(s, &l.base, base_iso, &l.steps)?;
    let last = chain.placements.last().unwrap();
    if last.triangle != l.base {
        return Err(DevelopError::NotClosed {
            base: l.base.clone(),
            end: last.triangle.clone(),
        });
    }
    Ok((last.iso.compose(&base_iso.inverse()), chain))
}

/// Concatenation, left to right: first `l1`, then `l2`.
pub fn loop_concat(l1: &DualLoop, l2: &DualLoop) -> Result<DualLoop, DevelopError> {
    if l1.base != l2.base {
        return Err(DevelopError::BaseMismatch(l1.base.clone(), l2.base.clone()));
    }
    let mut steps = l1.steps.clone();
    steps.extend(l2.steps.iter().cloned());
    Ok(DualLoop::new(l1.base.clone(), steps))
}

/// The reversed loop: the same edges crossed in the opposite order and
/// direction.
pub fn loop_inverse(s: &SurfaceComplex, l: &DualLoop) -> Result<DualLoop, DevelopError> {
    let mut steps = Vec::with_capacity(l.steps.len());
    for step in l.steps.iter().rev() {
        let partner = s.glued_partner(&step.triangle, step.edge)?;
        steps.push(DualStep::new(partner.triangle, partner.edge));
    }
    Ok(DualLoop::new(l.base.clone(), steps))
}

/// Reverses a non-closed chain of crossings.
pub fn reverse_path(s: &SurfaceComplex, path: &[DualStep]) -> Result<Vec<DualStep>, DevelopError> {
    let mut steps = Vec::with_capacity(path.len());
    for step in path.iter().rev() {
        let partner = s.glued_partner(&step.triangle, step.edge)?;
        steps.push(DualStep::new(partner.triangle, partner.edge));
    }
    Ok(steps)
}

/// The loop crossing, in counterclockwise order around a vertex class, each
/// edge of its star exactly once, based at `start_triangle`.
///
/// At the corner holding the vertex the crossing leaves through the edge
/// arriving at that corner, which sweeps the star counterclockwise in the
/// positively oriented charts. Its holonomy is a rotation by the cone angle.
pub fn vertex_star_loop(
    s: &SurfaceComplex,
    class_id: &str,
    start_triangle: &str,
) -> Result<DualLoop, DevelopError> {
    let class = s.vertex_class(class_id)?;
    let start_corner = class
        .members
        .iter()
        .filter(|(tid, _)| tid == start_triangle)
        .map(|&(_, c)| c)
        .min()
        .ok_or_else(|| DevelopError::NotIncident {
            class: class_id.to_string(),
            triangle: start_triangle.to_string(),
        })?;
    let mut steps = Vec::new();
    let (mut t, mut c) = (start_triangle.to_string(), start_corner);
    let limit = 3 * s.charts().len() + 1;
    loop {
        let crossing = (c + 2) % 3;
        let partner = s.glued_partner(&t, crossing)?;
        steps.push(DualStep::new(t.clone(), crossing));
        t = partner.triangle;
        c = partner.edge;
        if t == start_triangle && c == start_corner {
            break;
        }
        if steps.len() > limit {
            unreachable!("star traversal did not close");
        }
    }
    Ok(DualLoop::new(start_triangle, steps))
}

/// Conjugates a loop to the global base: path · loop · path⁻¹.
pub fn attach_basepath(
    s: &SurfaceComplex,
    path: &[DualStep],
    l: &DualLoop,
) -> Result<DualLoop, DevelopError> {
    if path.is_empty() {
        return Ok(l.clone());
    }
    let base = path[0].triangle.clone();
    let end = walk(s, &base, path)?;
    if end != l.base {
        return Err(DevelopError::BrokenChain {
            index: path.len(),
            expected: l.base.clone(),
            found: end,
        });
    }
    let mut steps = path.to_vec();
    steps.extend(l.steps.iter().cloned());
    steps.extend(reverse_path(s, path)?);
    Ok(DualLoop::new(base, steps))
}

/// A breadth-first spanning tree of the dual graph, with the complementary
/// gluings indexed as free generators. Words of loops in those generators
/// decide admissible homotopy, since the punctured surface retracts onto
/// the dual graph.
pub struct SpanningTree {
    base: String,
    parent: BTreeMap<String, DualStep>,
    depth: BTreeMap<String, usize>,
    cotree: Vec<((String, u8), (String, u8))>,
    side: BTreeMap<(String, u8), (usize, i8)>,
}

impl SpanningTree {
    pub fn new(s: &SurfaceComplex, base: &str) -> Result<Self, DevelopError> {
        if s.chart(base).is_none() {
            return Err(SurfaceError::UnknownTriangle(base.to_string()).into());
        }
        let mut parent: BTreeMap<String, DualStep> = BTreeMap::new();
        let mut depth: BTreeMap<String, usize> = BTreeMap::new();
        let mut tree_pairs: Vec<((String, u8), (String, u8))> = Vec::new();
        depth.insert(base.to_string(), 0);
        let mut queue = VecDeque::from([base.to_string()]);
        while let Some(t) = queue.pop_front() {
            for e in 0..3u8 {
                let p = s.glued_partner(&t, e)?;
                if !depth.contains_key(&p.triangle) {
                    depth.insert(p.triangle.clone(), depth[&t] + 1);
                    parent.insert(p.triangle.clone(), DualStep::new(t.clone(), e));
                    let a = (t.clone(), e);
                    let b = (p.triangle.clone(), p.edge);
                    tree_pairs.push(if a < b { (a, b) } else { (b, a) });
                    queue.push_back(p.triangle.clone());
                }
            }
        }
        let mut cotree = Vec::new();
        let mut side = BTreeMap::new();
        for g in s.gluings() {
            let a = (g.left.triangle.clone(), g.left.edge);
            let b = (g.right.triangle.clone(), g.right.edge);
            let pair = if a < b { (a, b) } else { (b, a) };
            if tree_pairs.contains(&pair) {
                continue;
            }
            let idx = cotree.len();
            side.insert(pair.0.clone(), (idx, 1));
            side.insert(pair.1.clone(), (idx, -1));
            cotree.push(pair);
        }
        Ok(SpanningTree {
            base: base.to_string(),
            parent,
            depth,
            cotree,
            side,
        })
    }

    pub fn base(&self) -> &str {
        &self.base
    }

    /// Number of co-tree generators: E − F + 1.
    pub fn generator_count(&self) -> usize {
        self.cotree.len()
    }

    /// The tree path of crossings from the base to `triangle`.
    pub fn path_to(&self, triangle: &str) -> Result<Vec<DualStep>, DevelopError> {
        if !self.depth.contains_key(triangle) {
            return Err(SurfaceError::UnknownTriangle(triangle.to_string()).into());
        }
        let mut rev = Vec::new();
        let mut current = triangle.to_string();
        while current != self.base {
            let step = self.parent[&current].clone();
            current = step.triangle.clone();
            rev.push(step);
        }
        rev.reverse();
        Ok(rev)
    }

    /// The freely reduced word of a loop over the co-tree generators.
    /// Tree crossings are silent; the word characterizes the admissible
    /// homotopy class of the loop.
    pub fn loop_word(&self, l: &DualLoop) -> Vec<(usize, i8)> {
        let mut word: Vec<(usize, i8)> = Vec::new();
        for step in &l.steps {
            if let Some(&(idx, sign)) = self.side.get(&(step.triangle.clone(), step.edge)) {
                if let Some(&(last_idx, last_sign)) = word.last() {
                    if last_idx == idx && last_sign == -sign {
                        word.pop();
                        continue;
                    }
                }
                word.push((idx, sign));
            }
        }
        word
    }
}
