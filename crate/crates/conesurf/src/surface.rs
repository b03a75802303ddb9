//! Euclidean triangulations with gluing data.
//!
//! A surface is a stock of positively oriented plane triangles (charts)
//! together with a pairing of their edges. Edge k of a chart runs from
//! corner k to corner (k+1) mod 3, and every gluing identifies two edges
//! with opposite traversal, so the glued surface is closed and oriented.
//! Vertex classes are the orbits of (triangle, corner) pairs under the
//! corner identifications induced by the gluings.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::develop::{DualLoop, DualStep};
use crate::geom::DEFAULT_TOL;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SurfaceError {
    #[error("surface file is not valid JSON: {0}")]
    Syntax(String),
    #[error("tolerance must be positive and finite, got {0}")]
    BadTolerance(f64),
    #[error("surface has no triangles")]
    Empty,
    #[error("duplicate triangle id {0:?}")]
    DuplicateId(String),
    #[error("corner coordinates of triangle {0:?} are not finite")]
    NonFiniteCorner(String),
    #[error("triangle {id:?} is degenerate or negatively oriented (signed area {area})")]
    DegenerateTriangle { id: String, area: f64 },
    #[error("gluing references unknown triangle {0:?}")]
    UnknownTriangle(String),
    #[error("edge index {edge} out of range for triangle {triangle:?}")]
    BadEdgeIndex { triangle: String, edge: u8 },
    #[error("edge {triangle}:{edge} is glued to itself")]
    SelfGluedEdge { triangle: String, edge: u8 },
    #[error("edge {triangle}:{edge} appears in more than one gluing")]
    EdgeGluedTwice { triangle: String, edge: u8 },
    #[error("open surface: edge {triangle}:{edge} is not glued")]
    OpenSurface { triangle: String, edge: u8 },
    #[error("glued edges {left} and {right} have mismatched lengths {len_left} vs {len_right}")]
    LengthMismatch {
        left: String,
        right: String,
        len_left: f64,
        len_right: f64,
    },
    #[error("dual graph is disconnected: triangle {0:?} is unreachable from {1:?}")]
    Disconnected(String, String),
    #[error("euler characteristic {chi} is not that of a closed oriented surface")]
    NonOrientableOrInvalid { chi: i64 },
    #[error("unknown edge {triangle}:{edge}")]
    InvalidEdge { triangle: String, edge: u8 },
    #[error("split parameter must lie strictly between 0 and 1, got {0}")]
    BadSplitParameter(f64),
    #[error("hinge of {triangle}:{edge} has both sides on one triangle; cannot split it symmetrically")]
    SelfHinge { triangle: String, edge: u8 },
    #[error("unknown vertex class {0:?}")]
    UnknownVertexClass(String),
    #[error("cannot remap step {triangle}:{edge}: not an edge of the recorded complex")]
    UnmappedStep { triangle: String, edge: u8 },
}

/// One chart: a positively oriented euclidean triangle with an id.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleChart {
    pub id: String,
    pub corners: [Complex64; 3],
}

impl TriangleChart {
    pub fn new(id: impl Into<String>, corners: [Complex64; 3]) -> Self {
        TriangleChart {
            id: id.into(),
            corners,
        }
    }

    /// Twice-signed-area convention: positive for counterclockwise corners.
    pub fn signed_area(&self) -> f64 {
        let a = self.corners[1] - self.corners[0];
        let b = self.corners[2] - self.corners[0];
        0.5 * (a.re * b.im - a.im * b.re)
    }

    /// Edge k joins corner k to corner (k+1) mod 3.
    pub fn edge_endpoints(&self, edge: u8) -> (Complex64, Complex64) {
        let k = edge as usize % 3;
        (self.corners[k], self.corners[(k + 1) % 3])
    }

    pub fn edge_length(&self, edge: u8) -> f64 {
        let (a, b) = self.edge_endpoints(edge);
        (b - a).norm()
    }

    pub fn max_edge_length(&self) -> f64 {
        (0..3).map(|k| self.edge_length(k)).fold(0.0, f64::max)
    }

    /// Interior angle at a corner, in (0, π) for a valid chart.
    pub fn angle_at(&self, corner: u8) -> f64 {
        let k = corner as usize % 3;
        let a = self.corners[(k + 1) % 3] - self.corners[k];
        let b = self.corners[(k + 2) % 3] - self.corners[k];
        (b / a).arg()
    }
}

/// A directed reference to an edge of a chart.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeRef {
    pub triangle: String,
    pub edge: u8,
}

impl EdgeRef {
    pub fn new(triangle: impl Into<String>, edge: u8) -> Self {
        EdgeRef {
            triangle: triangle.into(),
            edge,
        }
    }
}

impl std::fmt::Display for EdgeRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.triangle, self.edge)
    }
}

/// An unordered identification of two edges (opposite traversal).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gluing {
    pub left: EdgeRef,
    pub right: EdgeRef,
}

impl Gluing {
    pub fn new(left: EdgeRef, right: EdgeRef) -> Self {
        Gluing { left, right }
    }
}

/// An orbit of (triangle, corner) incidences; its id is the
/// lexicographically smallest member written as `triangle:corner`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexClass {
    pub id: String,
    pub members: Vec<(String, u8)>,
}

#[derive(Debug, Serialize, Deserialize)]
struct TriangleFile {
    id: String,
    corners: [[f64; 2]; 3],
}

#[derive(Debug, Serialize, Deserialize)]
struct SurfaceFile {
    #[serde(default)]
    tol: Option<f64>,
    triangles: Vec<TriangleFile>,
    gluings: Vec<[(String, u8); 2]>,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // deterministic: smaller index wins as root
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// A closed, oriented, connected euclidean triangulation.
#[derive(Debug, Clone)]
pub struct SurfaceComplex {
    charts: Vec<TriangleChart>,
    index: BTreeMap<String, usize>,
    pairs: Vec<((usize, u8), (usize, u8))>,
    partner: Vec<[(usize, u8); 3]>,
    classes: Vec<VertexClass>,
    corner_class: Vec<[usize; 3]>,
    tol: f64,
}

impl SurfaceComplex {
    /// Validates the full set of invariants and derives the vertex classes.
    pub fn from_parts(
        mut charts: Vec<TriangleChart>,
        gluings: Vec<Gluing>,
        tol: f64,
    ) -> Result<Self, SurfaceError> {
        if !tol.is_finite() || tol <= 0.0 {
            return Err(SurfaceError::BadTolerance(tol));
        }
        if charts.is_empty() {
            return Err(SurfaceError::Empty);
        }
        charts.sort_by(|a, b| a.id.cmp(&b.id));
        let mut index = BTreeMap::new();
        for (i, c) in charts.iter().enumerate() {
            if index.insert(c.id.clone(), i).is_some() {
                return Err(SurfaceError::DuplicateId(c.id.clone()));
            }
            if c.corners.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(SurfaceError::NonFiniteCorner(c.id.clone()));
            }
            let area = c.signed_area();
            let scale = c.max_edge_length();
            if area <= tol * scale * scale {
                return Err(SurfaceError::DegenerateTriangle {
                    id: c.id.clone(),
                    area,
                });
            }
        }

        let resolve = |e: &EdgeRef| -> Result<(usize, u8), SurfaceError> {
            let t = *index
                .get(&e.triangle)
                .ok_or_else(|| SurfaceError::UnknownTriangle(e.triangle.clone()))?;
            if e.edge > 2 {
                return Err(SurfaceError::BadEdgeIndex {
                    triangle: e.triangle.clone(),
                    edge: e.edge,
                });
            }
            Ok((t, e.edge))
        };

        let mut partner: Vec<[Option<(usize, u8)>; 3]> = vec![[None; 3]; charts.len()];
        let mut pairs = Vec::with_capacity(gluings.len());
        for g in &gluings {
            let a = resolve(&g.left)?;
            let b = resolve(&g.right)?;
            if a == b {
                return Err(SurfaceError::SelfGluedEdge {
                    triangle: g.left.triangle.clone(),
                    edge: g.left.edge,
                });
            }
            for &(t, e) in &[a, b] {
                if partner[t][e as usize].is_some() {
                    return Err(SurfaceError::EdgeGluedTwice {
                        triangle: charts[t].id.clone(),
                        edge: e,
                    });
                }
            }
            partner[a.0][a.1 as usize] = Some(b);
            partner[b.0][b.1 as usize] = Some(a);
            let la = charts[a.0].edge_length(a.1);
            let lb = charts[b.0].edge_length(b.1);
            if (la - lb).abs() > tol * la.max(lb) {
                return Err(SurfaceError::LengthMismatch {
                    left: format!("{}:{}", charts[a.0].id, a.1),
                    right: format!("{}:{}", charts[b.0].id, b.1),
                    len_left: la,
                    len_right: lb,
                });
            }
            let pair = if a < b { (a, b) } else { (b, a) };
            pairs.push(pair);
        }
        pairs.sort();

        let mut solid = Vec::with_capacity(charts.len());
        for (t, slots) in partner.iter().enumerate() {
            let mut row = [(0usize, 0u8); 3];
            for (e, slot) in slots.iter().enumerate() {
                match slot {
                    Some(p) => row[e] = *p,
                    None => {
                        return Err(SurfaceError::OpenSurface {
                            triangle: charts[t].id.clone(),
                            edge: e as u8,
                        })
                    }
                }
            }
            solid.push(row);
        }

        // dual-graph connectivity
        let mut seen = vec![false; charts.len()];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(t) = queue.pop_front() {
            for &(t2, _) in &solid[t] {
                if !seen[t2] {
                    seen[t2] = true;
                    queue.push_back(t2);
                }
            }
        }
        if let Some(t) = seen.iter().position(|s| !s) {
            return Err(SurfaceError::Disconnected(
                charts[t].id.clone(),
                charts[0].id.clone(),
            ));
        }

        // vertex classes: gluing (t1,e)~(t2,e') identifies corner e of t1 with
        // corner (e'+1)%3 of t2, and corner (e+1)%3 of t1 with corner e' of t2
        let mut uf = UnionFind::new(3 * charts.len());
        let key = |t: usize, c: u8| 3 * t + c as usize;
        for &(a, b) in &pairs {
            uf.union(key(a.0, a.1), key(b.0, (b.1 + 1) % 3));
            uf.union(key(a.0, (a.1 + 1) % 3), key(b.0, b.1));
        }
        let mut groups: BTreeMap<usize, Vec<(usize, u8)>> = BTreeMap::new();
        for t in 0..charts.len() {
            for c in 0..3u8 {
                groups.entry(uf.find(key(t, c))).or_default().push((t, c));
            }
        }
        let mut classes = Vec::new();
        let mut corner_class = vec![[usize::MAX; 3]; charts.len()];
        let mut named: Vec<VertexClass> = groups
            .into_values()
            .map(|members| {
                let named: Vec<(String, u8)> = members
                    .iter()
                    .map(|&(t, c)| (charts[t].id.clone(), c))
                    .collect();
                let rep = named.iter().min().unwrap();
                VertexClass {
                    id: format!("{}:{}", rep.0, rep.1),
                    members: {
                        let mut m = named.clone();
                        m.sort();
                        m
                    },
                }
            })
            .collect();
        named.sort_by(|a, b| a.id.cmp(&b.id));
        for (ci, class) in named.iter().enumerate() {
            for (tid, c) in &class.members {
                corner_class[index[tid]][*c as usize] = ci;
            }
        }
        classes.extend(named);

        Ok(SurfaceComplex {
            charts,
            index,
            pairs,
            partner: solid,
            classes,
            corner_class,
            tol,
        })
    }

    /// Parses the JSON surface format, using the file's tolerance if present.
    pub fn parse(bytes: &[u8]) -> Result<Self, SurfaceError> {
        Self::parse_with_tol(bytes, None)
    }

    /// Parses with an explicit tolerance override.
    pub fn parse_with_tol(bytes: &[u8], tol: Option<f64>) -> Result<Self, SurfaceError> {
        let file: SurfaceFile =
            serde_json::from_slice(bytes).map_err(|e| SurfaceError::Syntax(e.to_string()))?;
        let charts = file
            .triangles
            .into_iter()
            .map(|t| {
                TriangleChart::new(
                    t.id,
                    [
                        Complex64::new(t.corners[0][0], t.corners[0][1]),
                        Complex64::new(t.corners[1][0], t.corners[1][1]),
                        Complex64::new(t.corners[2][0], t.corners[2][1]),
                    ],
                )
            })
            .collect();
        let gluings = file
            .gluings
            .into_iter()
            .map(|[l, r]| Gluing::new(EdgeRef::new(l.0, l.1), EdgeRef::new(r.0, r.1)))
            .collect();
        let tol = tol.or(file.tol).unwrap_or(DEFAULT_TOL);
        Self::from_parts(charts, gluings, tol)
    }

    /// Canonical JSON: triangles sorted by id, gluings normalized and sorted,
    /// floats in shortest round-trip form.
    pub fn to_json(&self) -> String {
        let triangles = self
            .charts
            .iter()
            .map(|c| TriangleFile {
                id: c.id.clone(),
                corners: [
                    [c.corners[0].re, c.corners[0].im],
                    [c.corners[1].re, c.corners[1].im],
                    [c.corners[2].re, c.corners[2].im],
                ],
            })
            .collect();
        let gluings = self
            .pairs
            .iter()
            .map(|&(a, b)| {
                [
                    (self.charts[a.0].id.clone(), a.1),
                    (self.charts[b.0].id.clone(), b.1),
                ]
            })
            .collect();
        let file = SurfaceFile {
            tol: Some(self.tol),
            triangles,
            gluings,
        };
        serde_json::to_string(&file).expect("surface serialization cannot fail")
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn charts(&self) -> &[TriangleChart] {
        &self.charts
    }

    pub fn chart(&self, id: &str) -> Option<&TriangleChart> {
        self.index.get(id).map(|&i| &self.charts[i])
    }

    pub fn chart_index(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn gluings(&self) -> Vec<Gluing> {
        self.pairs
            .iter()
            .map(|&(a, b)| {
                Gluing::new(
                    EdgeRef::new(self.charts[a.0].id.clone(), a.1),
                    EdgeRef::new(self.charts[b.0].id.clone(), b.1),
                )
            })
            .collect()
    }

    pub fn gluing_count(&self) -> usize {
        self.pairs.len()
    }

    /// The edge glued to `(triangle, edge)`.
    pub fn glued_partner(&self, triangle: &str, edge: u8) -> Result<EdgeRef, SurfaceError> {
        let t = self
            .index
            .get(triangle)
            .ok_or_else(|| SurfaceError::UnknownTriangle(triangle.to_string()))?;
        if edge > 2 {
            return Err(SurfaceError::BadEdgeIndex {
                triangle: triangle.to_string(),
                edge,
            });
        }
        let (t2, e2) = self.partner[*t][edge as usize];
        Ok(EdgeRef::new(self.charts[t2].id.clone(), e2))
    }

    pub fn vertex_classes(&self) -> &[VertexClass] {
        &self.classes
    }

    pub fn vertex_class(&self, id: &str) -> Result<&VertexClass, SurfaceError> {
        self.classes
            .iter()
            .find(|c| c.id == id)
            .ok_or_else(|| SurfaceError::UnknownVertexClass(id.to_string()))
    }

    /// The class id of a (triangle, corner) incidence.
    pub fn class_of_corner(&self, triangle: &str, corner: u8) -> Result<&VertexClass, SurfaceError> {
        let t = self
            .index
            .get(triangle)
            .ok_or_else(|| SurfaceError::UnknownTriangle(triangle.to_string()))?;
        let ci = self.corner_class[*t][corner as usize % 3];
        Ok(&self.classes[ci])
    }

    /// χ = V − E + F.
    pub fn euler_characteristic(&self) -> i64 {
        self.classes.len() as i64 - self.pairs.len() as i64 + self.charts.len() as i64
    }

    /// Genus from χ = 2 − 2g.
    pub fn genus(&self) -> Result<u32, SurfaceError> {
        let chi = self.euler_characteristic();
        if chi % 2 != 0 || chi > 2 {
            return Err(SurfaceError::NonOrientableOrInvalid { chi });
        }
        Ok(((2 - chi) / 2) as u32)
    }

    /// Total cone angle θ at a vertex class.
    pub fn cone_angle(&self, class: &VertexClass) -> f64 {
        class
            .members
            .iter()
            .map(|(tid, c)| self.charts[self.index[tid]].angle_at(*c))
            .sum()
    }

    /// β = θ/2π − 1, the angular excess in turns.
    pub fn singularity_order(&self, class: &VertexClass) -> f64 {
        self.cone_angle(class) / (2.0 * std::f64::consts::PI) - 1.0
    }

    /// χ + Σβ; zero for every valid closed complex up to angle roundoff.
    pub fn gauss_bonnet_residual(&self) -> f64 {
        let beta_sum: f64 = self
            .classes
            .iter()
            .map(|c| self.singularity_order(c))
            .sum();
        self.euler_characteristic() as f64 + beta_sum
    }

    pub fn total_area(&self) -> f64 {
        self.charts.iter().map(|c| c.signed_area()).sum()
    }

    /// Mean length of the chart edges incident to a vertex class, one pair
    /// of edges per incidence.
    pub fn mean_incident_edge_length(&self, class: &VertexClass) -> f64 {
        let mut total = 0.0;
        let mut count = 0usize;
        for (tid, c) in &class.members {
            let chart = &self.charts[self.index[tid]];
            total += chart.edge_length(*c) + chart.edge_length((*c + 2) % 3);
            count += 2;
        }
        total / count.max(1) as f64
    }

    pub fn max_chart_edge_length(&self) -> f64 {
        self.charts
            .iter()
            .map(|c| c.max_edge_length())
            .fold(0.0, f64::max)
    }

    /// Homothety: all chart coordinates scaled by λ > 0.
    pub fn scaled(&self, lambda: f64) -> Result<SurfaceComplex, SurfaceError> {
        assert!(lambda > 0.0, "homothety factor must be positive");
        let charts = self
            .charts
            .iter()
            .map(|c| {
                TriangleChart::new(c.id.clone(), [
                    c.corners[0] * lambda,
                    c.corners[1] * lambda,
                    c.corners[2] * lambda,
                ])
            })
            .collect();
        SurfaceComplex::from_parts(charts, self.gluings(), self.tol)
    }

    /// Splits both triangles of the hinge of `edge` at the matching point
    /// q = (1−t)·start + t·end of the shared edge, each by the segment from
    /// q to its opposite corner. The result is again a valid closed complex
    /// with one new vertex of cone angle 2π.
    pub fn hinge_subdivide(
        &self,
        edge: &EdgeRef,
        t_param: f64,
    ) -> Result<(SurfaceComplex, SubdivisionRecord), SurfaceError> {
        if !(t_param > 0.0 && t_param < 1.0) {
            return Err(SurfaceError::BadSplitParameter(t_param));
        }
        let t1 = *self
            .index
            .get(&edge.triangle)
            .ok_or_else(|| SurfaceError::InvalidEdge {
                triangle: edge.triangle.clone(),
                edge: edge.edge,
            })?;
        if edge.edge > 2 {
            return Err(SurfaceError::InvalidEdge {
                triangle: edge.triangle.clone(),
                edge: edge.edge,
            });
        }
        let e1 = edge.edge;
        let (t2, e2) = self.partner[t1][e1 as usize];
        if t1 == t2 {
            return Err(SurfaceError::SelfHinge {
                triangle: edge.triangle.clone(),
                edge: e1,
            });
        }

        let taken: BTreeSet<String> = self.index.keys().cloned().collect();
        let fresh_pair = |base: &str, taken: &BTreeSet<String>| {
            let mut out = Vec::with_capacity(2);
            let mut n = 0usize;
            while out.len() < 2 {
                let cand = format!("{base}.{n}");
                if !taken.contains(&cand) {
                    out.push(cand);
                }
                n += 1;
            }
            (out[0].clone(), out[1].clone())
        };
        let (id1a, id1b) = fresh_pair(&self.charts[t1].id, &taken);
        let (id2a, id2b) = fresh_pair(&self.charts[t2].id, &{
            let mut taken = taken.clone();
            taken.insert(id1a.clone());
            taken.insert(id1b.clone());
            taken
        });

        let split = |chart: &TriangleChart, e: u8, q: Complex64, ida: &str, idb: &str| {
            let a = chart.corners[e as usize];
            let b = chart.corners[(e as usize + 1) % 3];
            let c = chart.corners[(e as usize + 2) % 3];
            (
                TriangleChart::new(ida, [a, q, c]),
                TriangleChart::new(idb, [q, b, c]),
            )
        };
        let chart1 = &self.charts[t1];
        let chart2 = &self.charts[t2];
        let (a1, b1) = chart1.edge_endpoints(e1);
        let q1 = (1.0 - t_param) * a1 + t_param * b1;
        // opposite traversal: start of one side matches the end of the other
        let (a2, b2) = chart2.edge_endpoints(e2);
        let q2 = (1.0 - t_param) * b2 + t_param * a2;
        let (p1a, p1b) = split(chart1, e1, q1, &id1a, &id1b);
        let (p2a, p2b) = split(chart2, e2, q2, &id2a, &id2b);

        let name1 = chart1.id.clone();
        let name2 = chart2.id.clone();

        let mut edge_map: BTreeMap<(String, u8), Vec<(String, u8)>> = BTreeMap::new();
        edge_map.insert(
            (name1.clone(), e1),
            vec![(id1a.clone(), 0), (id1b.clone(), 0)],
        );
        edge_map.insert((name1.clone(), (e1 + 1) % 3), vec![(id1b.clone(), 1)]);
        edge_map.insert((name1.clone(), (e1 + 2) % 3), vec![(id1a.clone(), 2)]);
        edge_map.insert(
            (name2.clone(), e2),
            vec![(id2a.clone(), 0), (id2b.clone(), 0)],
        );
        edge_map.insert((name2.clone(), (e2 + 1) % 3), vec![(id2b.clone(), 1)]);
        edge_map.insert((name2.clone(), (e2 + 2) % 3), vec![(id2a.clone(), 2)]);

        let mut charts: Vec<TriangleChart> = self
            .charts
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != t1 && i != t2)
            .map(|(_, c)| c.clone())
            .collect();
        charts.extend([p1a, p1b, p2a, p2b]);

        let mut gluings = Vec::new();
        for &(a, b) in &self.pairs {
            if (a == (t1, e1) && b == (t2, e2)) || (a == (t2, e2) && b == (t1, e1)) {
                continue; // replaced by the two half gluings below
            }
            let remap = |(t, e): (usize, u8)| -> EdgeRef {
                let id = &self.charts[t].id;
                match edge_map.get(&(id.clone(), e)) {
                    Some(images) => EdgeRef::new(images[0].0.clone(), images[0].1),
                    None => EdgeRef::new(id.clone(), e),
                }
            };
            gluings.push(Gluing::new(remap(a), remap(b)));
        }
        // split-edge halves; the matching point lands on the matching point
        gluings.push(Gluing::new(
            EdgeRef::new(id1a.clone(), 0),
            EdgeRef::new(id2b.clone(), 0),
        ));
        gluings.push(Gluing::new(
            EdgeRef::new(id1b.clone(), 0),
            EdgeRef::new(id2a.clone(), 0),
        ));
        // interior segments from q to the opposite corners
        gluings.push(Gluing::new(
            EdgeRef::new(id1a.clone(), 1),
            EdgeRef::new(id1b.clone(), 2),
        ));
        gluings.push(Gluing::new(
            EdgeRef::new(id2a.clone(), 1),
            EdgeRef::new(id2b.clone(), 2),
        ));

        let refined = SurfaceComplex::from_parts(charts, gluings, self.tol)?;

        let mut pieces = BTreeMap::new();
        pieces.insert(name1.clone(), (id1a.clone(), id1b.clone()));
        pieces.insert(name2.clone(), (id2a.clone(), id2b.clone()));
        let mut interior = BTreeMap::new();
        interior.insert(name1.clone(), (id1a.clone(), 1u8, id1b.clone(), 2u8));
        interior.insert(name2.clone(), (id2a.clone(), 1u8, id2b.clone(), 2u8));

        let mut new_partner = BTreeMap::new();
        for g in refined.gluings() {
            new_partner.insert(
                (g.left.triangle.clone(), g.left.edge),
                (g.right.triangle.clone(), g.right.edge),
            );
            new_partner.insert(
                (g.right.triangle.clone(), g.right.edge),
                (g.left.triangle.clone(), g.left.edge),
            );
        }
        let new_vertex = refined.class_of_corner(&id1a, 1)?.id.clone();

        let record = SubdivisionRecord {
            pieces,
            edge_map,
            interior,
            new_partner,
            new_vertex,
        };
        Ok((refined, record))
    }
}

/// Bookkeeping produced by [`SurfaceComplex::hinge_subdivide`], sufficient to
/// carry dual loops over to the refined complex.
#[derive(Debug, Clone)]
pub struct SubdivisionRecord {
    /// old id → (piece at the edge start, piece at the edge end)
    pieces: BTreeMap<String, (String, String)>,
    /// old edge → new edges along its traversal
    edge_map: BTreeMap<(String, u8), Vec<(String, u8)>>,
    /// old id → the crossing (a_id, a_edge, b_id, b_edge) between its pieces
    interior: BTreeMap<String, (String, u8, String, u8)>,
    /// full partner map of the refined complex
    new_partner: BTreeMap<(String, u8), (String, u8)>,
    /// vertex class id of the split point in the refined complex
    new_vertex: String,
}

impl SubdivisionRecord {
    pub fn new_vertex_class(&self) -> &str {
        &self.new_vertex
    }

    /// The pieces an old triangle was split into, if it was.
    pub fn pieces_of(&self, old_id: &str) -> Option<(&str, &str)> {
        self.pieces
            .get(old_id)
            .map(|(a, b)| (a.as_str(), b.as_str()))
    }

    fn triangle_known(&self, id: &str) -> bool {
        self.pieces.contains_key(id) || self.new_partner.contains_key(&(id.to_string(), 0))
    }

    /// Rewrites a loop across the subdivision. Crossings of untouched edges
    /// are kept; crossings into the split hinge are routed through the
    /// matching half edge, inserting interior crossings between the pieces
    /// as needed. The split point has cone angle 2π, so the rerouting leaves
    /// the holonomy unchanged.
    pub fn remap_loop(&self, l: &DualLoop) -> Result<DualLoop, SurfaceError> {
        if !self.triangle_known(&l.base) {
            return Err(SurfaceError::UnmappedStep {
                triangle: l.base.clone(),
                edge: 0,
            });
        }
        let new_base = match self.pieces.get(&l.base) {
            Some((a, _)) => a.clone(),
            None => l.base.clone(),
        };
        let mut current = new_base.clone();
        let mut steps: Vec<DualStep> = Vec::with_capacity(l.steps.len());

        let cross = |from: String, edge: u8, steps: &mut Vec<DualStep>| -> Result<String, SurfaceError> {
            let landing = self
                .new_partner
                .get(&(from.clone(), edge))
                .ok_or_else(|| SurfaceError::UnmappedStep {
                    triangle: from.clone(),
                    edge,
                })?
                .0
                .clone();
            steps.push(DualStep::new(from, edge));
            Ok(landing)
        };

        for step in &l.steps {
            match self.pieces.get(&step.triangle) {
                None => {
                    if current != step.triangle {
                        return Err(SurfaceError::UnmappedStep {
                            triangle: step.triangle.clone(),
                            edge: step.edge,
                        });
                    }
                    current = cross(step.triangle.clone(), step.edge, &mut steps)?;
                }
                Some((a, b)) => {
                    if current != *a && current != *b {
                        return Err(SurfaceError::UnmappedStep {
                            triangle: step.triangle.clone(),
                            edge: step.edge,
                        });
                    }
                    let images = self
                        .edge_map
                        .get(&(step.triangle.clone(), step.edge))
                        .ok_or_else(|| SurfaceError::UnmappedStep {
                            triangle: step.triangle.clone(),
                            edge: step.edge,
                        })?;
                    let on_current = images.iter().find(|(tid, _)| *tid == current).cloned();
                    let (tid, e) = match on_current {
                        Some(hit) => hit,
                        None => {
                            // hop to the other piece through the interior edge
                            let (a_id, a_e, b_id, b_e) = &self.interior[&step.triangle];
                            current = if current == *a_id {
                                cross(a_id.clone(), *a_e, &mut steps)?
                            } else {
                                cross(b_id.clone(), *b_e, &mut steps)?
                            };
                            images
                                .iter()
                                .find(|(tid, _)| *tid == current)
                                .cloned()
                                .expect("edge of a split triangle lies on one of its pieces")
                        }
                    };
                    current = cross(tid, e, &mut steps)?;
                }
            }
        }

        // close up onto the canonical piece of the base
        if current != new_base {
            if self.pieces.contains_key(&l.base) {
                let (a_id, a_e, b_id, b_e) = &self.interior[&l.base];
                current = if current == *a_id {
                    cross(a_id.clone(), *a_e, &mut steps)?
                } else {
                    cross(b_id.clone(), *b_e, &mut steps)?
                };
            }
            if current != new_base {
                return Err(SurfaceError::UnmappedStep {
                    triangle: l.base.clone(),
                    edge: 0,
                });
            }
        }

        Ok(DualLoop::new(new_base, steps))
    }
}
