//! Holonomy representations of marked surfaces and their classification.
//!
//! A marking fixes loops realizing the generators a₁…b_g, c₁…c_n of the
//! punctured-surface presentation, with c_j encircling puncture j. The
//! holonomy of the marking is a character ρ into U(1) together with a
//! translation cocycle τ. Modulo similarity conjugation and rescaling, the
//! class of (ρ, τ) is a point of 𝕋^{2g} × ℂP^{2g+n−3}: the character on the
//! a, b generators plus the projective H¹ class of τ on the reduced free
//! generating set (a₁,…,b_g, c₁,…,c_{n−1}).

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cohomology::{coboundary_vector, h1_representative, perp_coordinates, Character, CocycleVector};
use crate::develop::{holonomy_with_base, DevelopError, DualLoop, DualStep};
use crate::geom::{Sim2, SE2};
use crate::surface::{SurfaceComplex, SurfaceError};

/// Window for the integrality test of the Deligne–Mostow condition.
pub const DM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RepError {
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Develop(#[from] DevelopError),
    #[error("marking file is not valid JSON: {0}")]
    Syntax(String),
    #[error("marking is malformed: {0}")]
    MarkingShape(String),
    #[error("beta[{index}] = {value} is not > -1")]
    BetaOutOfRange { index: usize, value: f64 },
    #[error("scale factor must be positive, got {0}")]
    NonpositiveScale(f64),
    #[error("beta[{index}] = {value} is an integer; the classification requires non-integer orders")]
    IntegerOrder { index: usize, value: f64 },
    #[error("character is trivial on the reduced generating set")]
    TrivialCharacter,
    #[error("projected cohomology class is null: norm {norm} <= bound {bound}")]
    NullCohomologyClass { norm: f64, bound: f64 },
    #[error("marking fails validation checks: {0:?}")]
    MarkingInvalid(Vec<String>),
    #[error("classification points have different shapes: ({g1},{n1}) vs ({g2},{n2})")]
    ShapeMismatch {
        g1: usize,
        n1: usize,
        g2: usize,
        n2: usize,
    },
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
}

/// Orders β_j > −1, one per puncture.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaVector(Vec<f64>);

impl BetaVector {
    pub fn new(values: Vec<f64>) -> Result<Self, RepError> {
        for (index, &value) in values.iter().enumerate() {
            if !value.is_finite() || value <= -1.0 {
                return Err(RepError::BetaOutOfRange { index, value });
            }
        }
        Ok(BetaVector(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }
}

/// Loops realizing the canonical presentation generators, all based at one
/// triangle; c_j encircles puncture j.
#[derive(Debug, Clone, PartialEq)]
pub struct Marking {
    pub base: String,
    pub a_loops: Vec<DualLoop>,
    pub b_loops: Vec<DualLoop>,
    pub c_loops: Vec<DualLoop>,
    pub punctures: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct MarkingFile {
    base: String,
    a: Vec<Vec<(String, u8)>>,
    b: Vec<Vec<(String, u8)>>,
    c: Vec<Vec<(String, u8)>>,
    punctures: Vec<String>,
}

impl Marking {
    pub fn genus(&self) -> usize {
        self.a_loops.len()
    }

    pub fn puncture_count(&self) -> usize {
        self.c_loops.len()
    }

    /// Structural checks: loop shapes, common base, loops valid and closed,
    /// punctures named by existing vertex classes.
    pub fn validate_shape(&self, s: &SurfaceComplex) -> Result<(), RepError> {
        if self.a_loops.len() != self.b_loops.len() {
            return Err(RepError::MarkingShape(format!(
                "{} a-loops vs {} b-loops",
                self.a_loops.len(),
                self.b_loops.len()
            )));
        }
        if self.c_loops.is_empty() {
            return Err(RepError::MarkingShape("need at least one c-loop".into()));
        }
        if self.c_loops.len() != self.punctures.len() {
            return Err(RepError::MarkingShape(format!(
                "{} c-loops vs {} punctures",
                self.c_loops.len(),
                self.punctures.len()
            )));
        }
        let (g, n) = (self.genus(), self.puncture_count());
        if 2 * g + n < 3 {
            return Err(RepError::MarkingShape(format!(
                "need 2g+n-2 > 0, got g={g}, n={n}"
            )));
        }
        for l in self.a_loops.iter().chain(&self.b_loops).chain(&self.c_loops) {
            if l.base != self.base {
                return Err(RepError::MarkingShape(format!(
                    "loop based at {:?}, marking base is {:?}",
                    l.base, self.base
                )));
            }
            l.validate(s)?;
        }
        for p in &self.punctures {
            s.vertex_class(p)?;
        }
        Ok(())
    }

    pub fn parse(bytes: &[u8]) -> Result<Self, RepError> {
        let file: MarkingFile =
            serde_json::from_slice(bytes).map_err(|e| RepError::Syntax(e.to_string()))?;
        let lift = |steps: Vec<(String, u8)>, base: &str| {
            DualLoop::new(
                base,
                steps
                    .into_iter()
                    .map(|(t, e)| DualStep::new(t, e))
                    .collect(),
            )
        };
        let base = file.base.clone();
        Ok(Marking {
            a_loops: file.a.into_iter().map(|s| lift(s, &base)).collect(),
            b_loops: file.b.into_iter().map(|s| lift(s, &base)).collect(),
            c_loops: file.c.into_iter().map(|s| lift(s, &base)).collect(),
            punctures: file.punctures,
            base,
        })
    }

    pub fn to_json(&self) -> String {
        let drop = |loops: &[DualLoop]| {
            loops
                .iter()
                .map(|l| {
                    l.steps
                        .iter()
                        .map(|s| (s.triangle.clone(), s.edge))
                        .collect()
                })
                .collect()
        };
        let file = MarkingFile {
            base: self.base.clone(),
            a: drop(&self.a_loops),
            b: drop(&self.b_loops),
            c: drop(&self.c_loops),
            punctures: self.punctures.clone(),
        };
        serde_json::to_string(&file).expect("marking serialization cannot fail")
    }
}

/// The holonomy of a marking: (ρ, τ) on the ordered generators
/// a₁…a_g, b₁…b_g, c₁…c_n.
#[derive(Debug, Clone, PartialEq)]
pub struct Representation {
    pub genus: usize,
    pub punctures: usize,
    pub names: Vec<String>,
    pub rho: Character,
    pub tau: CocycleVector,
}

impl Representation {
    pub fn generator_count(&self) -> usize {
        2 * self.genus + self.punctures
    }

    /// The SE(2) value of generator k.
    pub fn se2(&self, k: usize) -> SE2 {
        SE2::new(self.rho.values()[k], self.tau.values()[k])
    }

    /// Holonomy of the relator Π[a_i,b_i]·(Πc_j)⁻¹; the identity for every
    /// honest marking.
    pub fn relator_holonomy(&self) -> SE2 {
        let g = self.genus;
        let mut acc = SE2::identity();
        for i in 0..g {
            let a = self.se2(i);
            let b = self.se2(g + i);
            let comm = a
                .compose(&b)
                .compose(&a.inverse())
                .compose(&b.inverse());
            acc = acc.compose(&comm);
        }
        let mut cs = SE2::identity();
        for j in 0..self.punctures {
            cs = cs.compose(&self.se2(2 * g + j));
        }
        acc.compose(&cs.inverse())
    }
}

fn generator_names(g: usize, n: usize) -> Vec<String> {
    let mut names = Vec::with_capacity(2 * g + n);
    for i in 1..=g {
        names.push(format!("a{i}"));
    }
    for i in 1..=g {
        names.push(format!("b{i}"));
    }
    for j in 1..=n {
        names.push(format!("c{j}"));
    }
    names
}

/// Holonomy representation of a marking, developed from the identity base
/// placement.
pub fn extract_representation(
    s: &SurfaceComplex,
    m: &Marking,
) -> Result<Representation, RepError> {
    extract_representation_based(s, m, SE2::identity())
}

/// Holonomy with an arbitrary base placement; the result is the conjugate
/// of the identity-based representation by that placement.
pub fn extract_representation_based(
    s: &SurfaceComplex,
    m: &Marking,
    base_iso: SE2,
) -> Result<Representation, RepError> {
    m.validate_shape(s)?;
    let (g, n) = (m.genus(), m.puncture_count());
    let mut rho = Vec::with_capacity(2 * g + n);
    let mut tau = Vec::with_capacity(2 * g + n);
    for l in m.a_loops.iter().chain(&m.b_loops).chain(&m.c_loops) {
        let (h, _) = holonomy_with_base(s, l, base_iso)?;
        rho.push(h.u());
        tau.push(h.v());
    }
    Ok(Representation {
        genus: g,
        punctures: n,
        names: generator_names(g, n),
        rho: Character::new(rho),
        tau: CocycleVector::new(tau),
    })
}

/// Outcome of one validation check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub ok: bool,
    pub deviation: f64,
}

/// Per-check report of [`validate_marking`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarkingReport {
    /// Π[a_i,b_i]·(Πc_j)⁻¹ is the identity.
    pub relator: CheckOutcome,
    /// ρ(c_j) = e^{iθ_j} with θ_j = 2π(β_j+1), one per puncture.
    pub angles: Vec<CheckOutcome>,
    /// Fixed point of φ(c_j) sits on a placed copy of puncture j; absent
    /// when β_j is an integer.
    pub fixed_points: Vec<Option<CheckOutcome>>,
    /// |Σβ − (2g−2)| within tolerance.
    pub beta_sum: CheckOutcome,
    /// The marking genus matches the surface genus.
    pub genus_match: bool,
}

impl MarkingReport {
    pub fn passed(&self) -> bool {
        self.relator.ok
            && self.angles.iter().all(|c| c.ok)
            && self
                .fixed_points
                .iter()
                .all(|c| c.as_ref().map(|c| c.ok).unwrap_or(true))
            && self.beta_sum.ok
            && self.genus_match
    }

    pub fn failed_checks(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.relator.ok {
            out.push(format!("relator (deviation {})", self.relator.deviation));
        }
        for (j, c) in self.angles.iter().enumerate() {
            if !c.ok {
                out.push(format!("angle c{} (deviation {})", j + 1, c.deviation));
            }
        }
        for (j, c) in self.fixed_points.iter().enumerate() {
            if let Some(c) = c {
                if !c.ok {
                    out.push(format!("fixed point c{} (deviation {})", j + 1, c.deviation));
                }
            }
        }
        if !self.beta_sum.ok {
            out.push(format!("beta sum (deviation {})", self.beta_sum.deviation));
        }
        if !self.genus_match {
            out.push("genus mismatch".into());
        }
        out
    }
}

fn is_integer(x: f64, tol: f64) -> bool {
    (x - x.round()).abs() <= tol
}

/// Checks a marking against the metric: relator holonomy, cone angles of
/// the c-loops, fixed-point positions, Gauss–Bonnet of the orders.
pub fn validate_marking(
    s: &SurfaceComplex,
    m: &Marking,
    beta: &BetaVector,
) -> Result<MarkingReport, RepError> {
    m.validate_shape(s)?;
    let (g, n) = (m.genus(), m.puncture_count());
    if beta.len() != n {
        return Err(RepError::MarkingShape(format!(
            "{} beta values for {} punctures",
            beta.len(),
            n
        )));
    }
    let tol = s.tol();
    let rep = extract_representation(s, m)?;

    let rel = rep.relator_holonomy();
    let scale = s.max_chart_edge_length();
    let rel_dev = (rel.u() - Complex64::new(1.0, 0.0))
        .norm()
        .max(rel.v().norm() / scale.max(1.0));
    let relator = CheckOutcome {
        ok: (rel.u() - Complex64::new(1.0, 0.0)).norm() <= tol && rel.v().norm() <= tol * scale,
        deviation: rel_dev,
    };

    let mut angles = Vec::with_capacity(n);
    let mut fixed_points = Vec::with_capacity(n);
    for j in 0..n {
        let b = beta.values()[j];
        let rho_cj = rep.rho.values()[2 * g + j];
        let expected = Complex64::from_polar(1.0, 2.0 * PI * (b + 1.0));
        let dev = (rho_cj - expected).norm();
        angles.push(CheckOutcome {
            ok: dev <= tol,
            deviation: dev,
        });

        if is_integer(b, tol) {
            fixed_points.push(None);
            continue;
        }
        let class = s.vertex_class(&m.punctures[j])?;
        let mean_len = s.mean_incident_edge_length(class);
        let phi = rep.se2(2 * g + j);
        let outcome = match phi.fixed_point(tol) {
            Err(_) => CheckOutcome {
                ok: false,
                deviation: f64::INFINITY,
            },
            Ok(fp) => {
                // the fixed point must appear among the loop's placed
                // copies of the puncture vertex
                let (_, chain) = holonomy_with_base(s, &m.c_loops[j], SE2::identity())?;
                let mut best = f64::INFINITY;
                for (i, p) in chain.placements.iter().enumerate() {
                    for (tid, corner) in &class.members {
                        if tid == &p.triangle {
                            let placed = chain.placed_corners(s, i)[*corner as usize];
                            best = best.min((placed - fp).norm());
                        }
                    }
                }
                CheckOutcome {
                    ok: best <= tol * mean_len,
                    deviation: best,
                }
            }
        };
        fixed_points.push(Some(outcome));
    }

    let target = 2.0 * g as f64 - 2.0;
    let beta_dev = (beta.sum() - target).abs();
    let beta_sum = CheckOutcome {
        ok: beta_dev <= 1e-9,
        deviation: beta_dev,
    };
    let genus_match = s.genus().map(|sg| sg as usize == g).unwrap_or(false);

    Ok(MarkingReport {
        relator,
        angles,
        fixed_points,
        beta_sum,
        genus_match,
    })
}

/// The ℝ₊ action: ρ unchanged, τ scaled.
pub fn rescale_representation(r: &Representation, lambda: f64) -> Result<Representation, RepError> {
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(RepError::NonpositiveScale(lambda));
    }
    Ok(Representation {
        tau: CocycleVector::new(r.tau.values().iter().map(|t| t * lambda).collect()),
        ..r.clone()
    })
}

/// Conjugation by a similarity: every generator value becomes g φ g⁻¹,
/// i.e. ρ is unchanged and τ ↦ a·τ + b·(1−ρ) componentwise.
pub fn conjugate_representation(r: &Representation, g: &Sim2) -> Representation {
    let mut rho = Vec::with_capacity(r.generator_count());
    let mut tau = Vec::with_capacity(r.generator_count());
    for k in 0..r.generator_count() {
        let conj = g.conjugate_se2(&r.se2(k));
        rho.push(conj.u());
        tau.push(conj.v());
    }
    Representation {
        rho: Character::new(rho),
        tau: CocycleVector::new(tau),
        ..r.clone()
    }
}

/// A common fixed point of all generator isometries, if one exists.
#[derive(Debug, Clone, PartialEq)]
pub struct CommonFixedPoint {
    pub point: Complex64,
    /// All generators are the identity; any point is fixed and the origin
    /// is reported.
    pub degenerate: bool,
}

/// Solves for a point fixed by every generator: nontrivial rotations force
/// their own fixed point, genuine translations force none.
pub fn common_fixed_point(r: &Representation, tol: f64) -> Option<CommonFixedPoint> {
    let one = Complex64::new(1.0, 0.0);
    let mut candidate: Option<Complex64> = None;
    for k in 0..r.generator_count() {
        let phi = r.se2(k);
        if (phi.u() - one).norm() <= tol {
            if phi.v().norm() > tol {
                return None; // a genuine translation fixes nothing
            }
        } else if candidate.is_none() {
            candidate = phi.fixed_point(tol).ok();
        }
    }
    match candidate {
        None => Some(CommonFixedPoint {
            point: Complex64::new(0.0, 0.0),
            degenerate: true,
        }),
        Some(z) => {
            for k in 0..r.generator_count() {
                let phi = r.se2(k);
                if (phi.apply(z) - z).norm() > tol * (1.0 + z.norm()) {
                    return None;
                }
            }
            Some(CommonFixedPoint {
                point: z,
                degenerate: false,
            })
        }
    }
}

/// A point of Ξ = 𝕋^{2g} × ℂP^{2g+n−3}: the character on the a, b
/// generators and the homogeneous coordinates of the projective H¹ class
/// in a canonical orthonormal basis of the complement of the coboundary
/// line.
#[derive(Debug, Clone, PartialEq)]
pub struct XiPoint {
    pub genus: usize,
    pub punctures: usize,
    pub torus: Vec<Complex64>,
    pub proj: Vec<Complex64>,
}

impl XiPoint {
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct XiOut {
            g: usize,
            n: usize,
            torus: Vec<[f64; 2]>,
            proj: Vec<[f64; 2]>,
        }
        let out = XiOut {
            g: self.genus,
            n: self.punctures,
            torus: self.torus.iter().map(|z| [z.re, z.im]).collect(),
            proj: self.proj.iter().map(|z| [z.re, z.im]).collect(),
        };
        serde_json::to_string(&out).expect("xi serialization cannot fail")
    }
}

/// The reduced free generating set drops c_n; its ρ and τ restrictions.
fn reduced_parts(r: &Representation) -> (Vec<Complex64>, Vec<Complex64>) {
    let (g, n) = (r.genus, r.punctures);
    let s = 2 * g + n - 1;
    let rho = r.rho.values()[..s].to_vec();
    let tau = r.tau.values()[..s].to_vec();
    (rho, tau)
}

/// Classification of a representation at given orders.
///
/// Rejects integer orders, projects τ off the coboundary line of the
/// reduced generating set, and returns the torus character together with
/// the canonically normalized projective vector (unit norm, largest-modulus
/// entry real positive, ties to the lowest index within tolerance).
pub fn classify_representation(
    r: &Representation,
    beta: &BetaVector,
    tol: f64,
) -> Result<XiPoint, RepError> {
    let (g, n) = (r.genus, r.punctures);
    if beta.len() != n {
        return Err(RepError::MarkingShape(format!(
            "{} beta values for {} punctures",
            beta.len(),
            n
        )));
    }
    for (index, &value) in beta.values().iter().enumerate() {
        if is_integer(value, tol) {
            return Err(RepError::IntegerOrder { index, value });
        }
    }
    let (rho_g, tau_g) = reduced_parts(r);
    let rho_g = Character::new(rho_g);
    let tau_g = CocycleVector::new(tau_g);
    if rho_g.is_trivial(tol) {
        return Err(RepError::TrivialCharacter);
    }
    let delta = coboundary_vector(&rho_g);
    let w = h1_representative(&rho_g, &tau_g);
    let bound = tol * tau_g.norm();
    if w.norm() <= bound {
        return Err(RepError::NullCohomologyClass {
            norm: w.norm(),
            bound,
        });
    }
    let mut coords = perp_coordinates(delta.values(), w.values());
    let norm: f64 = coords.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut coords {
        *z /= norm;
    }
    // canonical phase: largest modulus entry real positive, ties to the
    // lowest index within tolerance
    let max_mod = coords.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let lead = coords
        .iter()
        .position(|z| z.norm() >= max_mod - tol)
        .expect("unit vector has a largest entry");
    let phase = coords[lead] / coords[lead].norm();
    for z in &mut coords {
        *z *= phase.conj();
    }
    Ok(XiPoint {
        genus: g,
        punctures: n,
        torus: r.rho.values()[..2 * g].to_vec(),
        proj: coords,
    })
}

/// Full classification of a marked surface: validates the marking, extracts
/// the holonomy, and classifies it.
pub fn classify_xi(
    s: &SurfaceComplex,
    m: &Marking,
    beta: &BetaVector,
) -> Result<XiPoint, RepError> {
    let report = validate_marking(s, m, beta)?;
    if !report.passed() {
        return Err(RepError::MarkingInvalid(report.failed_checks()));
    }
    let rep = extract_representation(s, m)?;
    classify_representation(&rep, beta, s.tol())
}

/// max of torus angle differences (mod 2π) and the Fubini–Study distance
/// arccos min(1, |⟨x, y⟩|) of the projective parts.
///
/// The angle is evaluated as atan2(‖y − ⟨x,y⟩x‖, |⟨x,y⟩|), which equals the
/// arccos for unit vectors but stays accurate near coincident classes,
/// where arccos would amplify last-bit noise to ~1e−8.
pub fn xi_distance(x: &XiPoint, y: &XiPoint) -> Result<f64, RepError> {
    if x.genus != y.genus || x.punctures != y.punctures {
        return Err(RepError::ShapeMismatch {
            g1: x.genus,
            n1: x.punctures,
            g2: y.genus,
            n2: y.punctures,
        });
    }
    let mut d = 0.0f64;
    for (u, w) in x.torus.iter().zip(&y.torus) {
        d = d.max((u * w.conj()).arg().abs());
    }
    let ip: Complex64 = x
        .proj
        .iter()
        .zip(&y.proj)
        .map(|(a, b)| a.conj() * b)
        .sum();
    let residual: f64 = y
        .proj
        .iter()
        .zip(&x.proj)
        .map(|(b, a)| (b - ip * a).norm_sqr())
        .sum::<f64>()
        .sqrt();
    d = d.max(residual.atan2(ip.norm()));
    Ok(d)
}

/// The integrality condition for cone spheres: every pair with
/// β_i + β_j > −1 must have (1 + β_i + β_j)⁻¹ within the window of a
/// positive integer. Requires all β in (−1, 0) with Σβ = −2.
pub fn dm_condition(beta: &BetaVector) -> Result<bool, RepError> {
    for (i, &b) in beta.values().iter().enumerate() {
        if !(b > -1.0 && b < 0.0) {
            return Err(RepError::HypothesisViolated(format!(
                "beta[{i}] = {b} is not in (-1, 0)"
            )));
        }
    }
    if (beta.sum() + 2.0).abs() > DM_TOL {
        return Err(RepError::HypothesisViolated(format!(
            "sum of orders is {}, expected -2",
            beta.sum()
        )));
    }
    let values = beta.values();
    for i in 0..values.len() {
        for j in (i + 1)..values.len() {
            let pair = values[i] + values[j];
            if pair > -1.0 + DM_TOL {
                let inv = 1.0 / (1.0 + pair);
                let nearest = inv.round();
                if nearest < 1.0 || (inv - nearest).abs() > DM_TOL {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}
