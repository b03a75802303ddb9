//! Scalar group cohomology over ℂ for finitely presented groups.
//!
//! A character ρ sends each generator to U(1); a cocycle σ assigns a complex
//! number to each generator subject to σ(γ₁γ₂) = σ(γ₁) + ρ(γ₁)σ(γ₂). For a
//! relator word r the value σ(r) is a linear form λ_r in the generator values,
//! and Z¹ is the common kernel of those forms. Coboundaries are the scalar
//! multiples of (ρ(a₁)−1, …, ρ(a_s)−1).
//!
//! Words may contain inverse letters; these are evaluated with the forced
//! rule σ(a⁻¹) = −ρ(a)⁻¹σ(a), the unique extension keeping σ a cocycle.

use num_complex::Complex64;
use thiserror::Error;

/// Relative threshold on singular values when computing ranks.
pub const RANK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CohomologyError {
    #[error("word references generator {index}, but only {count} exist")]
    UnknownGenerator { index: usize, count: usize },
    #[error("letter exponent must be +1 or -1, got {0}")]
    BadExponent(i8),
    #[error("character is inconsistent on relator {relator}: |rho(r) - 1| = {deviation}")]
    InconsistentCharacter { relator: usize, deviation: f64 },
    #[error("expected {expected} generator values, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
}

/// A letter of a word: generator index and exponent ±1.
pub type Letter = (usize, i8);

/// A word in the generators, e.g. `[(0,1),(1,1),(0,-1),(1,-1)]` for aba⁻¹b⁻¹.
pub type Word = Vec<Letter>;

/// A finite presentation ⟨ generators | relators ⟩.
#[derive(Debug, Clone)]
pub struct Presentation {
    pub generators: Vec<String>,
    pub relators: Vec<Word>,
}

impl Presentation {
    pub fn new(generators: Vec<String>, relators: Vec<Word>) -> Self {
        assert!(!generators.is_empty(), "need at least one generator");
        Presentation {
            generators,
            relators,
        }
    }

    /// Free group on `s` anonymous generators.
    pub fn free(s: usize) -> Self {
        Presentation::new((0..s).map(|i| format!("g{i}")).collect(), Vec::new())
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    fn check_word(&self, w: &[Letter]) -> Result<(), CohomologyError> {
        for &(g, e) in w {
            if g >= self.rank() {
                return Err(CohomologyError::UnknownGenerator {
                    index: g,
                    count: self.rank(),
                });
            }
            if e != 1 && e != -1 {
                return Err(CohomologyError::BadExponent(e));
            }
        }
        Ok(())
    }
}

/// A character: one unit complex number per generator.
#[derive(Debug, Clone, PartialEq)]
pub struct Character(Vec<Complex64>);

impl Character {
    /// Renormalizes every value to unit modulus. Panics on zero values.
    pub fn new(values: Vec<Complex64>) -> Self {
        Character(
            values
                .into_iter()
                .map(|z| {
                    let n = z.norm();
                    assert!(n > 0.0, "character values must be nonzero");
                    z / n
                })
                .collect(),
        )
    }

    pub fn trivial(s: usize) -> Self {
        Character(vec![Complex64::new(1.0, 0.0); s])
    }

    pub fn values(&self) -> &[Complex64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_trivial(&self, tol: f64) -> bool {
        self.0
            .iter()
            .all(|z| (z - Complex64::new(1.0, 0.0)).norm() <= tol)
    }
}

/// A cocycle given by its values on the generators.
#[derive(Debug, Clone, PartialEq)]
pub struct CocycleVector(Vec<Complex64>);

impl CocycleVector {
    pub fn new(values: Vec<Complex64>) -> Self {
        CocycleVector(values)
    }

    pub fn zero(s: usize) -> Self {
        CocycleVector(vec![Complex64::new(0.0, 0.0); s])
    }

    pub fn values(&self) -> &[Complex64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

fn check_shapes(rho: &Character, sigma: &CocycleVector) -> Result<(), CohomologyError> {
    if rho.len() != sigma.len() {
        return Err(CohomologyError::ShapeMismatch {
            expected: rho.len(),
            got: sigma.len(),
        });
    }
    Ok(())
}

fn letter_value(rho: &Character, sigma: &CocycleVector, letter: Letter) -> (Complex64, Complex64) {
    let (g, e) = letter;
    let r = rho.values()[g];
    let s = sigma.values()[g];
    if e == 1 {
        (r, s)
    } else {
        // inverse-letter rule: sigma(a⁻¹) = −rho(a)⁻¹ sigma(a)
        let ri = r.conj();
        (ri, -ri * s)
    }
}

/// Evaluates (ρ(w), σ(w)) by the SE(2) product of the letters.
pub fn eval_word(
    rho: &Character,
    sigma: &CocycleVector,
    word: &[Letter],
) -> Result<(Complex64, Complex64), CohomologyError> {
    check_shapes(rho, sigma)?;
    for &(g, e) in word {
        if g >= rho.len() {
            return Err(CohomologyError::UnknownGenerator {
                index: g,
                count: rho.len(),
            });
        }
        if e != 1 && e != -1 {
            return Err(CohomologyError::BadExponent(e));
        }
    }
    let mut acc_r = Complex64::new(1.0, 0.0);
    let mut acc_s = Complex64::new(0.0, 0.0);
    for &letter in word {
        let (r, s) = letter_value(rho, sigma, letter);
        // (acc_r, acc_s)·(r, s) = (acc_r·r, acc_s + acc_r·s)
        acc_s += acc_r * s;
        acc_r *= r;
        acc_r /= acc_r.norm();
    }
    Ok((acc_r, acc_s))
}

/// Character value of a word alone.
pub fn eval_character(rho: &Character, word: &[Letter]) -> Result<Complex64, CohomologyError> {
    let sigma = CocycleVector::zero(rho.len());
    eval_word(rho, &sigma, word).map(|(r, _)| r)
}

/// Coefficients c with σ(r) = Σ_k c_k σ(a_k) for every cocycle σ.
pub fn lambda_form(rho: &Character, relator: &[Letter]) -> Result<Vec<Complex64>, CohomologyError> {
    let s = rho.len();
    let mut coeff = vec![Complex64::new(0.0, 0.0); s];
    let mut prefix = Complex64::new(1.0, 0.0);
    for &(g, e) in relator {
        if g >= s {
            return Err(CohomologyError::UnknownGenerator { index: g, count: s });
        }
        match e {
            1 => {
                coeff[g] += prefix;
                prefix *= rho.values()[g];
            }
            -1 => {
                let ri = rho.values()[g].conj();
                coeff[g] -= prefix * ri;
                prefix *= ri;
            }
            other => return Err(CohomologyError::BadExponent(other)),
        }
        prefix /= prefix.norm();
    }
    Ok(coeff)
}

fn check_consistent(
    p: &Presentation,
    rho: &Character,
    tol: f64,
) -> Result<(), CohomologyError> {
    if rho.len() != p.rank() {
        return Err(CohomologyError::ShapeMismatch {
            expected: p.rank(),
            got: rho.len(),
        });
    }
    for (i, r) in p.relators.iter().enumerate() {
        p.check_word(r)?;
        let val = eval_character(rho, r)?;
        let dev = (val - Complex64::new(1.0, 0.0)).norm();
        if dev > tol {
            return Err(CohomologyError::InconsistentCharacter {
                relator: i,
                deviation: dev,
            });
        }
    }
    Ok(())
}

/// dim Z¹(π, ℂ_ρ) = s − rank Λ.
pub fn z1_dimension(
    p: &Presentation,
    rho: &Character,
    tol: f64,
) -> Result<usize, CohomologyError> {
    check_consistent(p, rho, tol)?;
    let s = p.rank();
    if p.relators.is_empty() {
        return Ok(s);
    }
    let mut rows = Vec::with_capacity(p.relators.len());
    for r in &p.relators {
        rows.push(lambda_form(rho, r)?);
    }
    Ok(s - matrix_rank(&rows, RANK_TOL))
}

/// The generator (ρ(a₁)−1, …, ρ(a_s)−1) of B¹; zero iff ρ is trivial.
pub fn coboundary_vector(rho: &Character) -> CocycleVector {
    let one = Complex64::new(1.0, 0.0);
    CocycleVector::new(rho.values().iter().map(|r| r - one).collect())
}

/// dim H¹ = dim Z¹ − dim B¹.
pub fn h1_dimension(
    p: &Presentation,
    rho: &Character,
    tol: f64,
) -> Result<usize, CohomologyError> {
    let z1 = z1_dimension(p, rho, tol)?;
    let b1 = if rho.is_trivial(tol) { 0 } else { 1 };
    Ok(z1 - b1)
}

/// The representative of [τ] in the Hermitian orthogonal complement of B¹.
///
/// Subtracts the projection of τ onto the coboundary line; idempotent, and
/// the identity map when ρ is trivial.
pub fn h1_representative(rho: &Character, tau: &CocycleVector) -> CocycleVector {
    let delta = coboundary_vector(rho);
    let dd: f64 = delta.values().iter().map(|z| z.norm_sqr()).sum();
    if dd == 0.0 {
        return tau.clone();
    }
    let dt: Complex64 = delta
        .values()
        .iter()
        .zip(tau.values())
        .map(|(d, t)| d.conj() * t)
        .sum();
    let coeff = dt / dd;
    CocycleVector::new(
        tau.values()
            .iter()
            .zip(delta.values())
            .map(|(t, d)| t - coeff * d)
            .collect(),
    )
}

/// True iff |λ_r(τ)| ≤ tol·(1+‖τ‖) for every relator.
pub fn is_cocycle(
    p: &Presentation,
    rho: &Character,
    tau: &CocycleVector,
    tol: f64,
) -> Result<bool, CohomologyError> {
    check_consistent(p, rho, tol)?;
    check_shapes(rho, tau)?;
    let bound = tol * (1.0 + tau.norm());
    for r in &p.relators {
        let coeff = lambda_form(rho, r)?;
        let val: Complex64 = coeff
            .iter()
            .zip(tau.values())
            .map(|(c, t)| c * t)
            .sum();
        if val.norm() > bound {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Rank of a complex matrix given as rows, singular values below
/// `rel_tol`·σ_max counted as zero.
pub fn matrix_rank(rows: &[Vec<Complex64>], rel_tol: f64) -> usize {
    if rows.is_empty() || rows[0].is_empty() {
        return 0;
    }
    let sv = singular_values(rows);
    let max = sv.first().copied().unwrap_or(0.0);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * max).count()
}

/// Singular values (descending) by one-sided Jacobi orthogonalization of the
/// columns. Suited to the small dense matrices this crate produces.
pub fn singular_values(rows: &[Vec<Complex64>]) -> Vec<f64> {
    let m = rows.len();
    let n = if m == 0 { 0 } else { rows[0].len() };
    if m == 0 || n == 0 {
        return Vec::new();
    }
    // column-major copy
    let mut cols: Vec<Vec<Complex64>> = (0..n)
        .map(|j| (0..m).map(|i| rows[i][j]).collect())
        .collect();
    let eps = 1e-15;
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha: f64 = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: Complex64 = cols[p]
                    .iter()
                    .zip(&cols[q])
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                let g = gamma.norm();
                if g <= eps * (alpha * beta).sqrt() || alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                rotated = true;
                // absorb the phase so the 2x2 Gram block becomes real
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                #[allow(clippy::needless_range_loop)]
                for i in 0..m {
                    let ap = cols[p][i];
                    let aq = cols[q][i] * phase.conj();
                    cols[p][i] = c * ap - s * aq;
                    cols[q][i] = s * ap + c * aq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = cols
        .iter()
        .map(|col| col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

/// Coordinates of `w` in a canonical orthonormal basis of the hyperplane
/// Hermitian-orthogonal to `delta`.
///
/// The basis is the image of e₂…e_s under the Householder reflector taking
/// delta/‖delta‖ to a multiple of e₁; the reflector is Hermitian and unitary,
/// so the coordinates are read off the reflected vector.
pub fn perp_coordinates(delta: &[Complex64], w: &[Complex64]) -> Vec<Complex64> {
    assert_eq!(delta.len(), w.len());
    let s = delta.len();
    assert!(s >= 1);
    let dn: f64 = delta.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    assert!(dn > 0.0, "delta must be nonzero");
    let d: Vec<Complex64> = delta.iter().map(|z| z / dn).collect();
    let hw = reflect(&d, w);
    hw[1..].to_vec()
}

/// Inverse of [`perp_coordinates`]: embeds hyperplane coordinates back into
/// the ambient space (the reflector is an involution).
pub fn perp_embed(delta: &[Complex64], coords: &[Complex64]) -> Vec<Complex64> {
    let s = delta.len();
    assert_eq!(coords.len() + 1, s);
    let dn: f64 = delta.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    assert!(dn > 0.0, "delta must be nonzero");
    let d: Vec<Complex64> = delta.iter().map(|z| z / dn).collect();
    let mut padded = vec![Complex64::new(0.0, 0.0); s];
    padded[1..].copy_from_slice(coords);
    reflect(&d, &padded)
}

/// Applies the Householder reflector H = I − 2uuᴴ/‖u‖² with u = d + α·e₁,
/// α the phase of d₀ (H maps d to −α·e₁).
fn reflect(d: &[Complex64], x: &[Complex64]) -> Vec<Complex64> {
    let s = d.len();
    let alpha = if d[0].norm() > 0.0 {
        d[0] / d[0].norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let mut u = d.to_vec();
    u[0] += alpha;
    let uu: f64 = u.iter().map(|z| z.norm_sqr()).sum();
    if uu == 0.0 {
        return x.to_vec();
    }
    let ux: Complex64 = u.iter().zip(x).map(|(a, b)| a.conj() * b).sum();
    let factor = 2.0 * ux / uu;
    (0..s).map(|i| x[i] - factor * u[i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::DEFAULT_TOL;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn commutator() -> Word {
        vec![(0, 1), (1, 1), (0, -1), (1, -1)]
    }

    #[test]
    fn eval_word_examples() {
        let rho = Character::new(vec![c(0.0, 1.0), c(-1.0, 0.0)]);
        let sigma = CocycleVector::new(vec![c(1.0, 2.0), c(-0.5, 0.0)]);
        // empty word
        let (r, s) = eval_word(&rho, &sigma, &[]).unwrap();
        assert!((r - c(1.0, 0.0)).norm() <= 1e-15 && s.norm() <= 1e-15);

        // commutator closed form (1−β)x − (1−α)y against the SE(2) product
        let (alpha, beta) = (rho.values()[0], rho.values()[1]);
        let (x, y) = (sigma.values()[0], sigma.values()[1]);
        let (r, s) = eval_word(&rho, &sigma, &commutator()).unwrap();
        let expected = (c(1.0, 0.0) - beta) * x - (c(1.0, 0.0) - alpha) * y;
        assert!((r - c(1.0, 0.0)).norm() <= 1e-12);
        assert!((s - expected).norm() <= 1e-12);

        // w = [a,a], rho(a) = −1, sigma(a) = 5 → (1, 0)
        let rho = Character::new(vec![c(-1.0, 0.0)]);
        let sigma = CocycleVector::new(vec![c(5.0, 0.0)]);
        let (r, s) = eval_word(&rho, &sigma, &[(0, 1), (0, 1)]).unwrap();
        assert!((r - c(1.0, 0.0)).norm() <= 1e-15 && s.norm() <= 1e-15);
    }

    #[test]
    fn lambda_form_examples() {
        // r = [a]: coefficient vector e_a
        let rho = Character::new(vec![c(0.0, 1.0), c(1.0, 0.0)]);
        let l = lambda_form(&rho, &[(0, 1)]).unwrap();
        assert!((l[0] - c(1.0, 0.0)).norm() <= 1e-15 && l[1].norm() <= 1e-15);

        // r = [a,a], rho(a) = −1: zero form
        let rho = Character::new(vec![c(-1.0, 0.0)]);
        let l = lambda_form(&rho, &[(0, 1), (0, 1)]).unwrap();
        assert!(l[0].norm() <= 1e-15);

        // commutator: (1−β at a, −(1−α) at b)
        let (alpha, beta) = (c(0.0, 1.0), Complex64::from_polar(1.0, 2.2));
        let rho = Character::new(vec![alpha, beta]);
        let l = lambda_form(&rho, &commutator()).unwrap();
        assert!((l[0] - (c(1.0, 0.0) - beta)).norm() <= 1e-12);
        assert!((l[1] + (c(1.0, 0.0) - alpha)).norm() <= 1e-12);
    }

    #[test]
    fn z1_dimension_examples() {
        let tol = DEFAULT_TOL;
        // free group
        let p = Presentation::free(4);
        let rho = Character::new(vec![c(0.0, 1.0); 4]);
        assert_eq!(z1_dimension(&p, &rho, tol).unwrap(), 4);

        // ⟨a | a²⟩ with rho(a) = −1
        let p = Presentation::new(vec!["a".into()], vec![vec![(0, 1), (0, 1)]]);
        let rho = Character::new(vec![c(-1.0, 0.0)]);
        assert_eq!(z1_dimension(&p, &rho, tol).unwrap(), 1);

        // torus relation ⟨a,b | aba⁻¹b⁻¹⟩, nontrivial character:
        // the single form (1−β, −(1−α)) has rank 1, so Z¹ is one-dimensional
        let p = Presentation::new(vec!["a".into(), "b".into()], vec![commutator()]);
        let rho = Character::new(vec![Complex64::from_polar(1.0, 0.8), c(0.0, 1.0)]);
        assert_eq!(z1_dimension(&p, &rho, tol).unwrap(), 1);

        // inconsistent character rejected: rho(a²) = −1 ≠ 1 for rho(a) = i
        let p = Presentation::new(vec!["a".into()], vec![vec![(0, 1), (0, 1)]]);
        let rho = Character::new(vec![c(0.0, 1.0)]);
        assert!(matches!(
            z1_dimension(&p, &rho, tol),
            Err(CohomologyError::InconsistentCharacter { .. })
        ));
    }

    #[test]
    fn coboundary_examples() {
        let rho = Character::trivial(3);
        assert!(coboundary_vector(&rho).norm() <= 1e-15);
        let rho = Character::new(vec![c(-1.0, 0.0), c(-1.0, 0.0)]);
        let d = coboundary_vector(&rho);
        assert!((d.values()[0] - c(-2.0, 0.0)).norm() <= 1e-15);
        assert!((d.values()[1] - c(-2.0, 0.0)).norm() <= 1e-15);
        let rho = Character::new(vec![c(0.0, 1.0), c(1.0, 0.0)]);
        let d = coboundary_vector(&rho);
        assert!((d.values()[0] - c(-1.0, 1.0)).norm() <= 1e-15);
        assert!(d.values()[1].norm() <= 1e-15);
    }

    #[test]
    fn h1_dimension_examples() {
        let tol = DEFAULT_TOL;
        let p = Presentation::free(3);
        let rho = Character::new(vec![c(0.0, 1.0), c(1.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(h1_dimension(&p, &rho, tol).unwrap(), 2);
        assert_eq!(h1_dimension(&p, &Character::trivial(3), tol).unwrap(), 3);

        let p = Presentation::new(vec!["a".into()], vec![vec![(0, 1), (0, 1)]]);
        let rho = Character::new(vec![c(-1.0, 0.0)]);
        assert_eq!(h1_dimension(&p, &rho, tol).unwrap(), 0);
    }

    #[test]
    fn h1_representative_examples() {
        // multiples of the coboundary project to zero
        let rho = Character::new(vec![c(0.0, 1.0), c(-1.0, 0.0)]);
        let d = coboundary_vector(&rho);
        let scaled = CocycleVector::new(d.values().iter().map(|z| z * c(2.0, -3.0)).collect());
        assert!(h1_representative(&rho, &scaled).norm() <= 1e-12);

        // rho = (−1,−1), tau = (1,0) → (1/2, −1/2)
        let rho = Character::new(vec![c(-1.0, 0.0), c(-1.0, 0.0)]);
        let tau = CocycleVector::new(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let w = h1_representative(&rho, &tau);
        assert!((w.values()[0] - c(0.5, 0.0)).norm() <= 1e-12);
        assert!((w.values()[1] - c(-0.5, 0.0)).norm() <= 1e-12);
        // Hermitian-orthogonal to the coboundary
        let d = coboundary_vector(&rho);
        let ip: Complex64 = d
            .values()
            .iter()
            .zip(w.values())
            .map(|(a, b)| a.conj() * b)
            .sum();
        assert!(ip.norm() <= 1e-12);

        // trivial character: unchanged
        let rho = Character::trivial(2);
        let tau = CocycleVector::new(vec![c(3.0, 0.0), c(4.0, 0.0)]);
        assert_eq!(h1_representative(&rho, &tau), tau);
    }

    #[test]
    fn is_cocycle_examples() {
        let tol = DEFAULT_TOL;
        // free group: everything is a cocycle
        let p = Presentation::free(2);
        let rho = Character::new(vec![c(0.0, 1.0), c(0.0, -1.0)]);
        let tau = CocycleVector::new(vec![c(1.0, 5.0), c(-2.0, 0.0)]);
        assert!(is_cocycle(&p, &rho, &tau, tol).unwrap());

        // torus relation: (1−β)τ_a = (1−α)τ_b
        let p = Presentation::new(vec!["a".into(), "b".into()], vec![commutator()]);
        let (alpha, beta) = (c(0.0, 1.0), c(-1.0, 0.0));
        let rho = Character::new(vec![alpha, beta]);
        let one = c(1.0, 0.0);
        // pick tau_a = (1−α), tau_b = (1−β): (1−β)(1−α) − (1−α)(1−β) = 0
        let tau = CocycleVector::new(vec![one - alpha, one - beta]);
        assert!(is_cocycle(&p, &rho, &tau, tol).unwrap());
        // tau = (1,0) with alpha = beta = i fails: (1−i)·1 ≠ 0
        let rho = Character::new(vec![c(0.0, 1.0), c(0.0, 1.0)]);
        let tau = CocycleVector::new(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        assert!(!is_cocycle(&p, &rho, &tau, tol).unwrap());
    }

    #[test]
    fn coboundaries_are_cocycles() {
        let tol = DEFAULT_TOL;
        let p = Presentation::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![commutator(), vec![(2, 1), (2, 1), (2, 1)]],
        );
        // rho must be consistent: rho(c)³ = 1
        let rho = Character::new(vec![
            Complex64::from_polar(1.0, 1.3),
            Complex64::from_polar(1.0, -0.4),
            Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0),
        ]);
        let d = coboundary_vector(&rho);
        assert!(is_cocycle(&p, &rho, &d, tol).unwrap());
    }

    #[test]
    fn singular_values_known_cases() {
        // diag(3, 4i) has singular values {4, 3}
        let rows = vec![
            vec![c(3.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 4.0)],
        ];
        let sv = singular_values(&rows);
        assert!((sv[0] - 4.0).abs() <= 1e-12 && (sv[1] - 3.0).abs() <= 1e-12);

        // rank-1 outer product
        let rows = vec![
            vec![c(1.0, 0.0), c(2.0, 0.0)],
            vec![c(2.0, 0.0), c(4.0, 0.0)],
        ];
        assert_eq!(matrix_rank(&rows, RANK_TOL), 1);

        // wide matrix: [1 0 i] has sv {sqrt(2)}... padded row of zeros
        let rows = vec![vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)]];
        let sv = singular_values(&rows);
        assert!((sv[0] - 2.0f64.sqrt()).abs() <= 1e-12);
    }

    #[test]
    fn perp_coordinates_roundtrip_and_orthonormality() {
        let delta = vec![c(-2.0, 0.0), c(-2.0, 1.0), c(0.5, -3.0)];
        let w = vec![c(1.0, 2.0), c(-0.5, 0.3), c(2.0, -1.0)];
        // project w orthogonal to delta first
        let dd: f64 = delta.iter().map(|z| z.norm_sqr()).sum();
        let dw: Complex64 = delta.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
        let wperp: Vec<Complex64> = w
            .iter()
            .zip(&delta)
            .map(|(x, d)| x - dw / dd * d)
            .collect();
        let coords = perp_coordinates(&delta, &wperp);
        assert_eq!(coords.len(), 2);
        // norms agree (basis is orthonormal)
        let n1: f64 = wperp.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let n2: f64 = coords.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!((n1 - n2).abs() <= 1e-12);
        // embed back
        let back = perp_embed(&delta, &coords);
        for (a, b) in back.iter().zip(&wperp) {
            assert!((a - b).norm() <= 1e-12);
        }
        // the embedding is orthogonal to delta
        let ip: Complex64 = delta.iter().zip(&back).map(|(a, b)| a.conj() * b).sum();
        assert!(ip.norm() <= 1e-12);
    }

    proptest! {
        #[test]
        fn eval_word_respects_concatenation(
            letters1 in proptest::collection::vec((0usize..3, prop_oneof![Just(1i8), Just(-1i8)]), 0..8),
            letters2 in proptest::collection::vec((0usize..3, prop_oneof![Just(1i8), Just(-1i8)]), 0..8),
            angles in proptest::collection::vec(-3.15..3.15f64, 3),
            taus in proptest::collection::vec((-4.0..4.0f64, -4.0..4.0f64), 3),
        ) {
            let rho = Character::new(angles.iter().map(|&a| Complex64::from_polar(1.0, a)).collect());
            let sigma = CocycleVector::new(taus.iter().map(|&(x, y)| c(x, y)).collect());
            let (r1, s1) = eval_word(&rho, &sigma, &letters1).unwrap();
            let (r2, s2) = eval_word(&rho, &sigma, &letters2).unwrap();
            let w: Word = letters1.iter().chain(&letters2).copied().collect();
            let (r, s) = eval_word(&rho, &sigma, &w).unwrap();
            prop_assert!((r - r1 * r2).norm() <= 1e-12);
            prop_assert!((s - (s1 + r1 * s2)).norm() <= 1e-12);
        }

        #[test]
        fn lambda_form_is_linear_and_matches_eval(
            relator in proptest::collection::vec((0usize..3, prop_oneof![Just(1i8), Just(-1i8)]), 0..10),
            angles in proptest::collection::vec(-3.15..3.15f64, 3),
            taus in proptest::collection::vec((-4.0..4.0f64, -4.0..4.0f64), 3),
        ) {
            let rho = Character::new(angles.iter().map(|&a| Complex64::from_polar(1.0, a)).collect());
            let sigma = CocycleVector::new(taus.iter().map(|&(x, y)| c(x, y)).collect());
            let coeff = lambda_form(&rho, &relator).unwrap();
            let form: Complex64 = coeff.iter().zip(sigma.values()).map(|(a, b)| a * b).sum();
            let (_, direct) = eval_word(&rho, &sigma, &relator).unwrap();
            prop_assert!((form - direct).norm() <= 1e-12 * (1.0 + direct.norm()));
        }

        #[test]
        fn h1_representative_is_idempotent(
            angles in proptest::collection::vec(-3.15..3.15f64, 4),
            taus in proptest::collection::vec((-4.0..4.0f64, -4.0..4.0f64), 4),
        ) {
            let rho = Character::new(angles.iter().map(|&a| Complex64::from_polar(1.0, a)).collect());
            let tau = CocycleVector::new(taus.iter().map(|&(x, y)| c(x, y)).collect());
            let once = h1_representative(&rho, &tau);
            let twice = h1_representative(&rho, &once);
            for (a, b) in once.values().iter().zip(twice.values()) {
                prop_assert!((a - b).norm() <= 1e-12);
            }
        }

        #[test]
        fn free_group_dimension_law(
            s in 2usize..8,
            seed_angles in proptest::collection::vec(-3.15..3.15f64, 8),
            trivial in proptest::bool::ANY,
        ) {
            let p = Presentation::free(s);
            let rho = if trivial {
                Character::trivial(s)
            } else {
                Character::new(seed_angles[..s].iter().map(|&a| Complex64::from_polar(1.0, a)).collect())
            };
            let expected = if rho.is_trivial(DEFAULT_TOL) { s } else { s - 1 };
            prop_assert_eq!(h1_dimension(&p, &rho, DEFAULT_TOL).unwrap(), expected);
        }

        #[test]
        fn one_relator_dimension_law(
            s in 3usize..7,
            word_seed in proptest::collection::vec((0usize..6, prop_oneof![Just(1i8), Just(-1i8)]), 0..8),
            angles in proptest::collection::vec(-3.0..3.0f64, 6),
        ) {
            // relator over the first s−1 generators, then the last generator
            // once, so a consistent character always exists
            let mut relator: Word = word_seed.into_iter().map(|(g, e)| (g % (s - 1), e)).collect();
            relator.push((s - 1, 1));
            let mut values: Vec<Complex64> = angles[..s - 1]
                .iter()
                .map(|&a| Complex64::from_polar(1.0, a))
                .collect();
            values.push(c(1.0, 0.0));
            let prefix = eval_character(&Character::new(values.clone()), &relator).unwrap();
            values[s - 1] = prefix.conj();
            let rho = Character::new(values);
            prop_assume!(!rho.is_trivial(DEFAULT_TOL));
            let p = Presentation::new(
                (0..s).map(|i| format!("g{i}")).collect(),
                vec![relator.clone()],
            );
            let h1 = h1_dimension(&p, &rho, DEFAULT_TOL).unwrap();
            // brute-force oracle: rank of the 2-row matrix [λ_r; conj(δ)]
            let lambda = lambda_form(&rho, &relator).unwrap();
            let delta: Vec<Complex64> = coboundary_vector(&rho)
                .values()
                .iter()
                .map(|z| z.conj())
                .collect();
            let rank2 = matrix_rank(&[lambda.clone(), delta], RANK_TOL);
            if rank2 == 2 {
                prop_assert_eq!(h1, s - 2);
            } else {
                prop_assert_eq!(h1, s - 1 - matrix_rank(&[lambda], RANK_TOL));
            }
        }
    }
}
