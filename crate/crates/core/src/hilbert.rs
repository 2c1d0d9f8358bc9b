//! Finite-dimensional complex inner-product geometry: subspaces as
//! orthonormal frames, projections, joins, the `⊖` operation, relative
//! orthogonality, and a randomized suite for the independence axioms the
//! relation satisfies.
//!
//! Frames are kept orthonormal by two-pass Gram-Schmidt (a single pass
//! drifts); vectors whose residual after projection is below the drop
//! tolerance are discarded when building frames. Subspace equality is
//! decided by mutual projection residuals, never by comparing frames.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec;

/// Drop tolerance for rank decisions while orthonormalizing.
pub const DROP_TOL: f64 = 1e-10;

pub type Scalar = Complex64;

#[derive(Clone, Debug, PartialEq)]
pub struct Vector {
    coords: Vec<Scalar>,
}

impl Vector {
    pub fn new(coords: Vec<Scalar>) -> Vector {
        Vector { coords }
    }

    pub fn zero(dim: usize) -> Vector {
        Vector {
            coords: vec![Scalar::new(0.0, 0.0); dim],
        }
    }

    pub fn basis(dim: usize, i: usize) -> Vector {
        let mut v = Vector::zero(dim);
        v.coords[i] = Scalar::new(1.0, 0.0);
        v
    }

    pub fn from_real(coords: &[f64]) -> Vector {
        Vector {
            coords: coords.iter().map(|&x| Scalar::new(x, 0.0)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Scalar] {
        &self.coords
    }

    pub fn coords_mut(&mut self) -> &mut [Scalar] {
        &mut self.coords
    }

    /// Inner product, linear in `self`, conjugate-linear in `other`.
    pub fn inner(&self, other: &Vector) -> Scalar {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(x, y)| x * y.conj())
            .sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.coords.iter().map(|x| x.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scale(&self, s: Scalar) -> Vector {
        Vector {
            coords: self.coords.iter().map(|x| x * s).collect(),
        }
    }

    pub fn add(&self, other: &Vector) -> Vector {
        Vector {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(x, y)| x + y)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        Vector {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(x, y)| x - y)
                .collect(),
        }
    }

    /// `self -= s * other`, in place.
    pub fn axpy_sub(&mut self, s: Scalar, other: &Vector) {
        for (x, y) in self.coords.iter_mut().zip(&other.coords) {
            *x -= s * y;
        }
    }

    pub fn normalized(&self) -> Option<Vector> {
        let n = self.norm();
        if n == 0.0 {
            None
        } else {
            Some(self.scale(Scalar::new(1.0 / n, 0.0)))
        }
    }

    /// Random vector with independent complex standard-normal entries.
    pub fn random<R: Rng>(dim: usize, rng: &mut R) -> Vector {
        let dist = rand::distr::StandardUniform;
        let mut gauss = || {
            // Box-Muller from two uniforms; plenty for test geometry.
            let u1: f64 = rng.sample::<f64, _>(dist).max(1e-12);
            let u2: f64 = rng.sample(dist);
            (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
        };
        Vector {
            coords: (0..dim).map(|_| Scalar::new(gauss(), gauss())).collect(),
        }
    }
}

/// A subspace given by an orthonormal frame (empty frame = `{0}`).
#[derive(Clone, Debug)]
pub struct Subspace {
    ambient: usize,
    frame: Vec<Vector>,
}

impl Subspace {
    pub fn trivial(ambient: usize) -> Subspace {
        Subspace {
            ambient,
            frame: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Subspace {
        Subspace {
            ambient,
            frame: (0..ambient).map(|i| Vector::basis(ambient, i)).collect(),
        }
    }

    /// Orthonormalizes the given spanning vectors.
    pub fn from_vectors(ambient: usize, vectors: &[Vector]) -> Result<Subspace> {
        let mut s = Subspace::trivial(ambient);
        s.extend_with(vectors)?;
        Ok(s)
    }

    /// Wraps a frame already known to be orthonormal (checked in debug).
    pub fn from_orthonormal_frame(ambient: usize, frame: Vec<Vector>) -> Subspace {
        let s = Subspace { ambient, frame };
        debug_assert!(s.gram_residual() < 1e-8);
        s
    }

    /// Wraps a frame without any orthonormality check. Verification
    /// paths use this to carry deliberately corrupted frames through
    /// the machinery that is expected to flag them.
    pub fn from_frame_unchecked(ambient: usize, frame: Vec<Vector>) -> Subspace {
        Subspace { ambient, frame }
    }

    /// Extends the frame with more vectors, two-pass Gram-Schmidt.
    fn extend_with(&mut self, vectors: &[Vector]) -> Result<()> {
        for v in vectors {
            if v.dim() != self.ambient {
                return Err(Error::DimensionMismatch {
                    left: self.ambient,
                    right: v.dim(),
                });
            }
            let mut w = v.clone();
            for _ in 0..2 {
                for f in &self.frame {
                    let c = w.inner(f);
                    w.axpy_sub(c, f);
                }
            }
            let n = w.norm();
            if n > DROP_TOL {
                self.frame.push(w.scale(Scalar::new(1.0 / n, 0.0)));
            }
        }
        Ok(())
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.frame.len()
    }

    pub fn frame(&self) -> &[Vector] {
        &self.frame
    }

    fn check_ambient(&self, other: usize) -> Result<()> {
        if self.ambient != other {
            return Err(Error::DimensionMismatch {
                left: self.ambient,
                right: other,
            });
        }
        Ok(())
    }

    /// Orthogonal projection onto the subspace.
    pub fn project(&self, v: &Vector) -> Result<Vector> {
        self.check_ambient(v.dim())?;
        let mut out = Vector::zero(self.ambient);
        for f in &self.frame {
            let c = v.inner(f);
            for (o, y) in out.coords.iter_mut().zip(&f.coords) {
                *o += c * y;
            }
        }
        Ok(out)
    }

    /// Distance from `v` to the subspace.
    pub fn residual(&self, v: &Vector) -> Result<f64> {
        Ok(v.sub(&self.project(v)?).norm())
    }

    /// The closed span of both subspaces.
    pub fn join(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other.ambient)?;
        let mut s = self.clone();
        s.extend_with(&other.frame)?;
        Ok(s)
    }

    /// `self ⊖ other`: projection of `self` to the orthogonal
    /// complement of `other`.
    pub fn ominus(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other.ambient)?;
        let mut out = Subspace::trivial(self.ambient);
        let residuals: Vec<Vector> = self
            .frame
            .iter()
            .map(|f| Ok(f.sub(&other.project(f)?)))
            .collect::<Result<_>>()?;
        out.extend_with(&residuals)?;
        Ok(out)
    }

    /// Orthogonal complement inside the ambient space.
    pub fn complement(&self) -> Subspace {
        Subspace::full(self.ambient)
            .ominus(self)
            .expect("same ambient")
    }

    /// Intersection via complements: (S1^⊥ ∨ S2^⊥)^⊥.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other.ambient)?;
        Ok(self.complement().join(&other.complement())?.complement())
    }

    /// Max distance from the other frame to this subspace; zero iff
    /// `other ⊆ self`.
    pub fn containment_residual(&self, other: &Subspace) -> Result<f64> {
        let mut worst = 0.0f64;
        for f in &other.frame {
            worst = worst.max(self.residual(f)?);
        }
        Ok(worst)
    }

    /// Symmetric distance: max of the two containment residuals.
    pub fn equality_residual(&self, other: &Subspace) -> Result<f64> {
        Ok(self
            .containment_residual(other)?
            .max(other.containment_residual(self)?))
    }

    pub fn equals(&self, other: &Subspace, tol: f64) -> bool {
        matches!(self.equality_residual(other), Ok(r) if r <= tol)
    }

    /// Deviation of the frame Gram matrix from the identity.
    pub fn gram_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, f) in self.frame.iter().enumerate() {
            for (j, g) in self.frame.iter().enumerate() {
                let expect = if i == j {
                    Scalar::new(1.0, 0.0)
                } else {
                    Scalar::new(0.0, 0.0)
                };
                worst = worst.max((f.inner(g) - expect).norm());
            }
        }
        worst
    }

    /// Random `dim`-dimensional subspace.
    pub fn random<R: Rng>(ambient: usize, dim: usize, rng: &mut R) -> Subspace {
        let vectors: Vec<Vector> = (0..dim).map(|_| Vector::random(ambient, rng)).collect();
        Subspace::from_vectors(ambient, &vectors).expect("matching ambient")
    }
}

/// Residual of the relative-orthogonality relation `H0 ⊥_{H1} H2`:
/// the worst deviation, over the frame of `H0`, between projecting onto
/// the join `H1 ∨ H2` and projecting onto `H1` alone. The relation
/// holds when the residual vanishes.
pub fn rel_orth_residual(h0: &Subspace, h1: &Subspace, h2: &Subspace) -> Result<f64> {
    let joined = h1.join(h2)?;
    let mut worst = 0.0f64;
    for f in h0.frame() {
        let through_join = joined.project(f)?;
        let through_base = h1.project(f)?;
        worst = worst.max(through_join.sub(&through_base).norm());
    }
    Ok(worst)
}

/// `H0 ⊥_{H1} H2` at tolerance `tol`.
pub fn rel_orth(h0: &Subspace, h1: &Subspace, h2: &Subspace, tol: f64) -> Result<bool> {
    Ok(rel_orth_residual(h0, h1, h2)? <= tol)
}

#[derive(Debug, Clone, Serialize)]
pub struct AxiomResult {
    pub name: &'static str,
    pub checked: usize,
    pub violations: usize,
    pub first_failure: Option<String>,
}

/// Outcome of the randomized independence-axiom suite.
#[derive(Debug, Clone, Serialize)]
pub struct AxiomReport {
    pub trials: usize,
    pub dim: usize,
    pub seed: u64,
    pub tol: f64,
    pub pass: bool,
    pub axioms: Vec<AxiomResult>,
}

struct TrialOutcome {
    checked: [usize; 5],
    failures: [Option<String>; 5],
}

const AXIOM_NAMES: [&str; 5] = [
    "monotonicity",
    "transitivity",
    "weak-symmetry",
    "anti-reflexivity",
    "triviality",
];

/// Randomized verification that relative orthogonality satisfies the
/// independence axioms: monotonicity, transitivity along a tower,
/// symmetry over a common base, anti-reflexivity, and the vector-wise
/// (triviality) characterization. Each trial mixes constructed positive
/// instances with unconstrained random triples.
pub fn check_independence_axioms(trials: usize, dim: usize, seed: u64, tol: f64) -> AxiomReport {
    let outcomes = exec::map_indexed(trials, |t| {
        let mut rng =
            ChaCha8Rng::seed_from_u64(seed ^ (t as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        run_trial(dim, tol, &mut rng)
    });
    let mut axioms = Vec::new();
    for (k, name) in AXIOM_NAMES.iter().enumerate() {
        let checked = outcomes.iter().map(|o| o.checked[k]).sum();
        let violations = outcomes.iter().filter(|o| o.failures[k].is_some()).count();
        let first_failure = outcomes.iter().find_map(|o| o.failures[k].clone());
        axioms.push(AxiomResult {
            name,
            checked,
            violations,
            first_failure,
        });
    }
    let pass = axioms.iter().all(|a| a.violations == 0);
    AxiomReport {
        trials,
        dim,
        seed,
        tol,
        pass,
        axioms,
    }
}

/// Builds `H0` satisfying `H0 ⊥_{H1} H2` by spanning it with vectors of
/// the form (component in `H1`) + (component orthogonal to `H1 ∨ H2`).
fn positive_instance<R: Rng>(
    h1: &Subspace,
    h2: &Subspace,
    dim0: usize,
    rng: &mut R,
) -> Result<Subspace> {
    let ambient = h1.ambient_dim();
    let outside = h1.join(h2)?.complement();
    let mut vectors = Vec::with_capacity(dim0);
    for _ in 0..dim0 {
        let inside = h1.project(&Vector::random(ambient, rng))?;
        let beyond = outside.project(&Vector::random(ambient, rng))?;
        vectors.push(inside.add(&beyond));
    }
    Subspace::from_vectors(ambient, &vectors)
}

fn run_trial<R: Rng>(dim: usize, tol: f64, rng: &mut R) -> TrialOutcome {
    let mut checked = [0usize; 5];
    let mut failures: [Option<String>; 5] = Default::default();
    let mut record = |k: usize, msg: Option<String>| {
        if let Some(m) = msg {
            failures[k].get_or_insert(m);
        }
        checked[k] += 1;
    };

    let small = || 1 + dim / 6;

    // -- monotonicity: shrink H0 and H2 inside a positive instance.
    (|| -> Result<()> {
        let h1 = Subspace::random(dim, small(), rng);
        let h2 = h1.join(&Subspace::random(dim, small(), rng))?;
        let h0 = positive_instance(&h1, &h2, 2, rng)?;
        let base = rel_orth_residual(&h0, &h1, &h2)?;
        if base > tol {
            record(
                0,
                Some(format!("constructed instance failed, residual {base:.3e}")),
            );
            return Ok(());
        }
        let h0_small = shrink(&h0, rng)?;
        let h2_small = shrink(&h2, rng)?;
        let r = rel_orth_residual(&h0_small, &h1, &h2_small)?;
        record(
            0,
            (r > tol).then(|| format!("shrunken instance residual {r:.3e}")),
        );
        Ok(())
    })()
    .expect("ambient dimensions agree");

    // -- transitivity: H1 ⊆ H2 ⊆ H2', iff in both directions.
    (|| -> Result<()> {
        let h1 = Subspace::random(dim, small(), rng);
        let h2 = h1.join(&Subspace::random(dim, small(), rng))?;
        let h2p = h2.join(&Subspace::random(dim, small(), rng))?;
        for h0 in [
            Subspace::random(dim, small(), rng),
            positive_instance(&h1, &h2p, 2, rng)?,
        ] {
            let whole = rel_orth(&h0, &h1, &h2p, tol)?;
            let lower = rel_orth(&h0, &h1, &h2, tol)?;
            let upper = rel_orth(&h0, &h2, &h2p, tol)?;
            record(
                1,
                (whole != (lower && upper))
                    .then(|| format!("tower gave {whole} but steps gave {lower} and {upper}")),
            );
        }
        Ok(())
    })()
    .expect("ambient dimensions agree");

    // -- weak symmetry: H1 ⊆ H0 ∩ H2 and H0 ⊥_{H1} H2 imply H2 ⊥_{H1} H0.
    (|| -> Result<()> {
        let h1 = Subspace::random(dim, small(), rng);
        let rest = h1.complement();
        let a = project_random(&rest, small(), rng)?;
        let b = project_random(&rest.ominus(&a)?, small(), rng)?;
        let h0 = h1.join(&a)?;
        let h2 = h1.join(&b)?;
        let forward = rel_orth_residual(&h0, &h1, &h2)?;
        if forward > tol {
            record(
                2,
                Some(format!(
                    "constructed instance failed, residual {forward:.3e}"
                )),
            );
            return Ok(());
        }
        let backward = rel_orth_residual(&h2, &h1, &h0)?;
        record(
            2,
            (backward > tol).then(|| format!("reverse residual {backward:.3e}")),
        );
        Ok(())
    })()
    .expect("ambient dimensions agree");

    // -- anti-reflexivity: H1 ⊆ H2 and H0 ⊥_{H1} H2 force H0 ∩ H2 ⊆ H1.
    (|| -> Result<()> {
        let h1 = Subspace::random(dim, small(), rng);
        let h2 = h1.join(&Subspace::random(dim, small(), rng))?;
        // H0 contains a chunk of H1, so the intersection is nontrivial.
        let h0 = positive_instance(&h1, &h2, 2, rng)?.join(&shrink(&h1, rng)?)?;
        if rel_orth_residual(&h0, &h1, &h2)? > tol {
            record(3, Some("constructed instance failed".to_string()));
            return Ok(());
        }
        let meet = h0.intersect(&h2)?;
        let r = h1.containment_residual(&meet)?;
        record(
            3,
            (r > tol.max(1e-7))
                .then(|| format!("intersection leaks out of the base, residual {r:.3e}")),
        );
        // cross-check the intersection dimension against the rank identity
        let join_dim = h0.join(&h2)?.dim();
        let expect = h0.dim() + h2.dim() - join_dim;
        record(
            3,
            (meet.dim() != expect).then(|| {
                format!(
                    "intersection dim {} vs rank identity {}",
                    meet.dim(),
                    expect
                )
            }),
        );
        Ok(())
    })()
    .expect("ambient dimensions agree");

    // -- triviality: the relation is equivalent to its frame-wise form.
    (|| -> Result<()> {
        let h1 = Subspace::random(dim, small(), rng);
        for h0_h2 in [
            (
                Subspace::random(dim, small(), rng),
                Subspace::random(dim, small(), rng),
            ),
            {
                let h2 = h1.join(&Subspace::random(dim, small(), rng))?;
                (positive_instance(&h1, &h2, 2, rng)?, h2)
            },
        ] {
            let (h0, h2) = h0_h2;
            let bulk = rel_orth(&h0, &h1, &h2, tol)?;
            let mut framewise = true;
            for a in h0.frame() {
                for b in h2.frame() {
                    let sa = Subspace::from_orthonormal_frame(dim, vec![a.clone()]);
                    let sb = Subspace::from_orthonormal_frame(dim, vec![b.clone()]);
                    framewise &= rel_orth(&sa, &h1, &sb, tol)?;
                }
            }
            record(
                4,
                (bulk != framewise)
                    .then(|| format!("bulk relation {bulk} but frame-wise {framewise}")),
            );
        }
        Ok(())
    })()
    .expect("ambient dimensions agree");

    TrialOutcome { checked, failures }
}

fn shrink<R: Rng>(s: &Subspace, rng: &mut R) -> Result<Subspace> {
    project_random(s, s.dim().max(1).div_ceil(2), rng)
}

fn project_random<R: Rng>(s: &Subspace, dim: usize, rng: &mut R) -> Result<Subspace> {
    let vectors: Vec<Vector> = (0..dim)
        .map(|_| s.project(&Vector::random(s.ambient_dim(), rng)))
        .collect::<Result<_>>()?;
    Subspace::from_vectors(s.ambient_dim(), &vectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn real(coords: &[f64]) -> Vector {
        Vector::from_real(coords)
    }

    #[test]
    fn orthonormalize_collinear() {
        let s = Subspace::from_vectors(2, &[real(&[1.0, 0.0]), real(&[2.0, 0.0])]).unwrap();
        assert_eq!(s.dim(), 1);
        assert!(s.frame()[0].sub(&real(&[1.0, 0.0])).norm() < 1e-12);
    }

    #[test]
    fn orthonormalize_empty() {
        let s = Subspace::from_vectors(4, &[]).unwrap();
        assert_eq!(s.dim(), 0);
    }

    #[test]
    fn orthonormalize_full_rank_random() {
        let mut r = rng(7);
        let vectors: Vec<Vector> = (0..50).map(|_| Vector::random(20, &mut r)).collect();
        let s = Subspace::from_vectors(20, &vectors).unwrap();
        assert_eq!(s.dim(), 20, "50 generic vectors span dimension 20");
        // independent rank oracle via nalgebra SVD on the stacked matrix
        let m = nalgebra::DMatrix::from_fn(20, 50, |i, j| vectors[j].coords()[i]);
        let rank = m.rank(1e-9);
        assert_eq!(rank, s.dim());
        assert!(s.gram_residual() < 1e-10);
    }

    #[test]
    fn projection_examples() {
        let e1 = Subspace::from_vectors(2, &[real(&[1.0, 0.0])]).unwrap();
        let inv_sqrt2 = 1.0 / 2.0f64.sqrt();
        let p = e1.project(&real(&[inv_sqrt2, inv_sqrt2])).unwrap();
        assert!(p.sub(&real(&[inv_sqrt2, 0.0])).norm() < 1e-12);

        let full = Subspace::full(3);
        let v = real(&[0.3, -0.7, 2.0]);
        assert!(full.project(&v).unwrap().sub(&v).norm() < 1e-12);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let e1 = Subspace::from_vectors(2, &[real(&[1.0, 0.0])]).unwrap();
        assert!(matches!(
            e1.project(&real(&[1.0, 0.0, 0.0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn join_and_ominus_examples() {
        let e1 = Subspace::from_vectors(3, &[real(&[1.0, 0.0, 0.0])]).unwrap();
        let e2 = Subspace::from_vectors(3, &[real(&[0.0, 1.0, 0.0])]).unwrap();
        let joined = e1.join(&e2).unwrap();
        assert_eq!(joined.dim(), 2);
        assert!(e1.join(&e1).unwrap().equals(&e1, 1e-12));

        let plane =
            Subspace::from_vectors(3, &[real(&[1.0, 0.0, 0.0]), real(&[0.0, 1.0, 0.0])]).unwrap();
        let diff = plane.ominus(&e1).unwrap();
        assert!(diff.equals(&e2, 1e-12));
        assert_eq!(plane.ominus(&plane).unwrap().dim(), 0);
    }

    #[test]
    fn rel_orth_examples() {
        let e1 = Subspace::from_vectors(3, &[real(&[1.0, 0.0, 0.0])]).unwrap();
        let e2 = Subspace::from_vectors(3, &[real(&[0.0, 1.0, 0.0])]).unwrap();
        let zero = Subspace::trivial(3);
        assert!(rel_orth(&e1, &zero, &e2, 1e-10).unwrap());
        assert!(!rel_orth(&e1, &zero, &e1, 1e-10).unwrap());
    }

    #[test]
    fn rel_orth_constructed_positive() {
        // H0 spanned by e1 + e3, H1 = span e3, H2 = span {e2, e3}
        let h0 = Subspace::from_vectors(4, &[real(&[1.0, 0.0, 1.0, 0.0])]).unwrap();
        let h1 = Subspace::from_vectors(4, &[real(&[0.0, 0.0, 1.0, 0.0])]).unwrap();
        let h2 = Subspace::from_vectors(
            4,
            &[real(&[0.0, 1.0, 0.0, 0.0]), real(&[0.0, 0.0, 1.0, 0.0])],
        )
        .unwrap();
        assert!(rel_orth(&h0, &h1, &h2, 1e-10).unwrap());
        // and against the full space over itself the relation is trivial
        assert!(rel_orth(&h0, &Subspace::full(4), &h2, 1e-10).unwrap());
    }

    #[test]
    fn intersect_via_complements() {
        let mut r = rng(11);
        let plane1 = Subspace::from_vectors(
            4,
            &[real(&[1.0, 0.0, 0.0, 0.0]), real(&[0.0, 1.0, 0.0, 0.0])],
        )
        .unwrap();
        let plane2 = Subspace::from_vectors(
            4,
            &[real(&[0.0, 1.0, 0.0, 0.0]), real(&[0.0, 0.0, 1.0, 0.0])],
        )
        .unwrap();
        let meet = plane1.intersect(&plane2).unwrap();
        assert_eq!(meet.dim(), 1);
        assert!(
            meet.frame()[0].sub(&real(&[0.0, 1.0, 0.0, 0.0])).norm() < 1e-9
                || meet.frame()[0].add(&real(&[0.0, 1.0, 0.0, 0.0])).norm() < 1e-9
                || meet.residual(&real(&[0.0, 1.0, 0.0, 0.0])).unwrap() < 1e-9
        );
        // rank identity on random pairs
        for _ in 0..10 {
            let s1 = Subspace::random(8, 3, &mut r);
            let s2 = Subspace::random(8, 4, &mut r);
            let meet = s1.intersect(&s2).unwrap();
            let join = s1.join(&s2).unwrap();
            assert_eq!(meet.dim() + join.dim(), s1.dim() + s2.dim());
        }
    }

    #[test]
    fn axiom_suite_small_run() {
        let report = check_independence_axioms(200, 8, 42, 1e-8);
        assert!(report.pass, "{report:?}");
        for axiom in &report.axioms {
            assert!(axiom.checked >= 200, "{} barely ran", axiom.name);
        }
    }

    #[test]
    fn axiom_suite_is_deterministic() {
        let a = check_independence_axioms(50, 6, 9, 1e-8);
        let b = check_independence_axioms(50, 6, 9, 1e-8);
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn pythagoras(seed in 0u64..1000) {
            let mut r = rng(seed);
            let s = Subspace::random(9, 4, &mut r);
            let v = Vector::random(9, &mut r);
            let p = s.project(&v).unwrap();
            let q = v.sub(&p);
            prop_assert!((p.norm_sq() + q.norm_sq() - v.norm_sq()).abs() < 1e-9);
        }

        #[test]
        fn projection_idempotent_and_self_adjoint(seed in 0u64..1000) {
            let mut r = rng(seed);
            let s = Subspace::random(8, 3, &mut r);
            let v = Vector::random(8, &mut r);
            let u = Vector::random(8, &mut r);
            let pv = s.project(&v).unwrap();
            prop_assert!(s.project(&pv).unwrap().sub(&pv).norm() < 1e-10);
            let pu = s.project(&u).unwrap();
            prop_assert!((pv.inner(&u) - v.inner(&pu)).norm() < 1e-10);
        }

        #[test]
        fn join_dimension_matches_rank_oracle(seed in 0u64..1000) {
            let mut r = rng(seed);
            let v1: Vec<Vector> = (0..3).map(|_| Vector::random(7, &mut r)).collect();
            let v2: Vec<Vector> = (0..4).map(|_| Vector::random(7, &mut r)).collect();
            let s1 = Subspace::from_vectors(7, &v1).unwrap();
            let s2 = Subspace::from_vectors(7, &v2).unwrap();
            let joined = s1.join(&s2).unwrap();
            let stacked: Vec<&Vector> = v1.iter().chain(v2.iter()).collect();
            let m = nalgebra::DMatrix::from_fn(7, stacked.len(), |i, j| stacked[j].coords()[i]);
            prop_assert_eq!(joined.dim(), m.rank(1e-9));
            prop_assert!(joined.gram_residual() < 1e-10);
        }

        #[test]
        fn ominus_rebuilds_join(seed in 0u64..1000) {
            let mut r = rng(seed);
            let s1 = Subspace::random(8, 3, &mut r);
            let s2 = Subspace::random(8, 3, &mut r);
            let diff = s2.ominus(&s1).unwrap();
            let rebuilt = s1.join(&diff).unwrap();
            let joined = s1.join(&s2).unwrap();
            prop_assert!(rebuilt.equals(&joined, 1e-9));
            // the difference lives inside the join
            prop_assert!(joined.containment_residual(&diff).unwrap() < 1e-9);
        }

        #[test]
        fn rel_orth_matches_reduced_orthogonality(seed in 0u64..1000) {
            // the relation holds iff (H0 ⊖ H1) ⊥ (H2 ⊖ H1)
            let mut r = rng(seed);
            let dim = 8;
            let h1 = Subspace::random(dim, 2, &mut r);
            let (h0, h2) = if seed % 2 == 0 {
                (Subspace::random(dim, 2, &mut r), Subspace::random(dim, 2, &mut r))
            } else {
                let h2 = h1.join(&Subspace::random(dim, 2, &mut r)).unwrap();
                (positive_instance(&h1, &h2, 2, &mut r).unwrap(), h2)
            };
            let direct = rel_orth(&h0, &h1, &h2, 1e-8).unwrap();
            let zero = Subspace::trivial(dim);
            let reduced = rel_orth(
                &h0.ominus(&h1).unwrap(),
                &zero,
                &h2.ominus(&h1).unwrap(),
                1e-8,
            )
            .unwrap();
            prop_assert_eq!(direct, reduced);
        }

        #[test]
        fn plain_orthogonality_agrees_with_inner_products(seed in 0u64..1000) {
            let mut r = rng(seed);
            let s1 = Subspace::random(6, 2, &mut r);
            let s2 = Subspace::random(6, 2, &mut r);
            let zero = Subspace::trivial(6);
            let related = rel_orth(&s1, &zero, &s2, 1e-8).unwrap();
            let mut max_inner = 0.0f64;
            for a in s1.frame() {
                for b in s2.frame() {
                    max_inner = max_inner.max(a.inner(b).norm());
                }
            }
            prop_assert_eq!(related, max_inner <= 1e-8);
        }
    }
}
