//! Doubled convex polygons: cone spheres with all orders in (−1, 0).

use std::collections::BTreeMap;

use crate::surface::{EdgeRef, Gluing, SurfaceComplex, TriangleChart};

use super::{measured_beta, peripheral_marking, BuildError, BuildParams, BuiltModel, ModelBuilder};

/// Two copies of a convex k-gon glued along their boundary. Corner j gets
/// cone angle twice the interior angle, so β_j = (interior angle)/π − 1.
///
/// The front copy is fan-triangulated from vertex 0 (charts f1…f{k−2} in
/// the polygon's own coordinates); the back copy uses the reflected
/// coordinates (b1…b{k−2}) so both sides are positively oriented. With the
/// breadth-first tree rooted at f1, the only co-tree crossings are the
/// front-to-back rungs away from side 0, and in the puncture order
/// p₁, …, p_{k−1}, p₀ the c-loop words telescope to the empty word.
pub struct DoublePolygon;

impl ModelBuilder for DoublePolygon {
    fn kind(&self) -> &'static str {
        "double_polygon"
    }

    fn describe(&self) -> &'static str {
        "doubled convex polygon (a cone sphere with n = k corner points)"
    }

    fn build(&self, params: &BuildParams) -> Result<BuiltModel, BuildError> {
        let polygon = params
            .polygon
            .as_ref()
            .ok_or_else(|| BuildError::DegenerateSpec("double_polygon needs a polygon".into()))?;
        let k = polygon.len();
        if k < 3 {
            return Err(BuildError::DegenerateSpec(format!(
                "polygon needs at least 3 vertices, got {k}"
            )));
        }
        for j in 0..k {
            let a = polygon[j];
            let b = polygon[(j + 1) % k];
            let c = polygon[(j + 2) % k];
            let (u, v) = (b - a, c - b);
            let cross = u.re * v.im - u.im * v.re;
            if cross.is_nan() || cross <= 0.0 {
                return Err(BuildError::DegenerateSpec(format!(
                    "polygon must be strictly convex and counterclockwise (corner {})",
                    (j + 1) % k
                )));
            }
        }

        let mut charts = Vec::with_capacity(2 * (k - 2));
        for i in 1..=k - 2 {
            charts.push(TriangleChart::new(
                format!("f{i}"),
                [polygon[0], polygon[i], polygon[i + 1]],
            ));
            charts.push(TriangleChart::new(
                format!("b{i}"),
                [
                    polygon[0].conj(),
                    polygon[i + 1].conj(),
                    polygon[i].conj(),
                ],
            ));
        }
        let mut gluings = Vec::new();
        for i in 2..=k - 2 {
            // interior fan diagonals, front and back
            gluings.push(Gluing::new(
                EdgeRef::new(format!("f{i}"), 0),
                EdgeRef::new(format!("f{}", i - 1), 2),
            ));
            gluings.push(Gluing::new(
                EdgeRef::new(format!("b{}", i - 1), 0),
                EdgeRef::new(format!("b{i}"), 2),
            ));
        }
        // polygon sides: side 0 and side k−1 live on the extreme fan
        // triangles, the rest are the f_i ↔ b_i rungs
        gluings.push(Gluing::new(EdgeRef::new("f1", 0), EdgeRef::new("b1", 2)));
        for i in 1..=k - 2 {
            gluings.push(Gluing::new(
                EdgeRef::new(format!("f{i}"), 1),
                EdgeRef::new(format!("b{i}"), 1),
            ));
        }
        gluings.push(Gluing::new(
            EdgeRef::new(format!("f{}", k - 2), 2),
            EdgeRef::new(format!("b{}", k - 2), 0),
        ));

        let surface = SurfaceComplex::from_parts(charts, gluings, crate::geom::DEFAULT_TOL)?;

        // punctures in the telescoping order p_1, …, p_{k−1}, p_0
        let mut stars = Vec::with_capacity(k);
        for j in 1..=k - 2 {
            let tri = format!("f{j}");
            let class = surface.class_of_corner(&tri, 1)?.id.clone();
            stars.push((class, tri));
        }
        let last = format!("f{}", k - 2);
        stars.push((surface.class_of_corner(&last, 2)?.id.clone(), last));
        stars.push((surface.class_of_corner("f1", 0)?.id.clone(), "f1".to_string()));

        let marking = peripheral_marking(&surface, "f1", &stars)?;
        let beta = measured_beta(&surface, &marking.punctures)?;
        Ok(BuiltModel {
            surface,
            marking: Some(marking),
            beta: Some(beta),
            loops: BTreeMap::new(),
        })
    }
}
