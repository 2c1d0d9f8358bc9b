//! Sparse spectral computations on Cayley balls of the free group: the
//! adjacency operator given by the four letter shifts, top-eigenvalue
//! estimation by restarted Lanczos, convergence tables against the
//! 2*sqrt(3) norm bound, and the displacement constant
//! eta = sqrt(2 - sqrt(3)).
//!
//! Truncation is by compression to the ball: boundary nodes simply have
//! degree < 4, which can only lower the top eigenvalue, so the upper
//! bound check stays meaningful. Statements about shift displacements
//! are restricted to vectors supported in the interior, where the
//! truncation is exact.

use std::io::Write;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec;
use crate::freegroup::{ball, Letter, Word};
use crate::report::ser_f64;

/// Adjacency of a Cayley ball, stored as one step table per letter.
/// `step[i][l]` is the node index of `l * w_i`, or -1 outside the ball.
pub struct SparseOperator {
    radius: usize,
    words: Vec<Word>,
    step: Vec<[i32; 4]>,
}

impl SparseOperator {
    /// Builds the ball of the given radius with its four shift tables.
    pub fn cayley(radius: usize, cap: usize) -> Result<SparseOperator> {
        if radius > cap {
            return Err(Error::Resource {
                what: "spectral radius cap",
                requested: radius,
                cap,
            });
        }
        let words = ball(radius, cap)?;
        let index: std::collections::HashMap<&Word, i32> = words
            .iter()
            .enumerate()
            .map(|(i, w)| (w, i as i32))
            .collect();
        let step = words
            .iter()
            .map(|w| {
                let mut row = [-1i32; 4];
                for l in Letter::ALL {
                    let moved = w.left_mul(l);
                    row[l.index()] = index.get(&moved).copied().unwrap_or(-1);
                }
                row
            })
            .collect();
        Ok(SparseOperator {
            radius,
            words,
            step,
        })
    }

    pub fn dim(&self) -> usize {
        self.words.len()
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn degree(&self, i: usize) -> usize {
        self.step[i].iter().filter(|&&j| j >= 0).count()
    }

    /// `y = A x` where `A` sums the four letter shifts.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.dim());
        assert_eq!(y.len(), self.dim());
        let step = &self.step;
        exec::fill_chunks(y, 4096, |offset, out| {
            for (k, o) in out.iter_mut().enumerate() {
                let row = &step[offset + k];
                let mut acc = 0.0;
                for &j in row {
                    if j >= 0 {
                        acc += x[j as usize];
                    }
                }
                *o = acc;
            }
        });
    }

    /// The unitary shift by `l`: `(shift_l x)(w) = x(l^-1 w)`, with
    /// zero where the preimage leaves the ball.
    pub fn shift(&self, l: Letter, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.dim());
        assert_eq!(y.len(), self.dim());
        let inv = l.inverse().index();
        let step = &self.step;
        exec::fill_chunks(y, 4096, |offset, out| {
            for (k, o) in out.iter_mut().enumerate() {
                let pre = step[offset + k][inv];
                *o = if pre >= 0 { x[pre as usize] } else { 0.0 };
            }
        });
    }

    /// Indices of the interior nodes (length < radius), where all four
    /// shifts stay inside the ball.
    pub fn interior(&self) -> Vec<usize> {
        self.words
            .iter()
            .enumerate()
            .filter(|(_, w)| w.len() < self.radius)
            .map(|(i, _)| i)
            .collect()
    }

    /// Writes the edge list as `u v` word pairs, one edge per line,
    /// shortlex serialization, each edge once.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (i, row) in self.step.iter().enumerate() {
            for &j in row {
                if j >= 0 && i < j as usize {
                    writeln!(
                        out,
                        "{} {}",
                        self.words[i].render(),
                        self.words[j as usize].render()
                    )?;
                }
            }
        }
        Ok(())
    }

    pub fn edge_count(&self) -> usize {
        self.step
            .iter()
            .map(|row| row.iter().filter(|&&j| j >= 0).count())
            .sum::<usize>()
            / 2
    }

    /// Dense copy for small-radius oracles.
    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        assert!(self.dim() <= 2000, "dense oracle reserved for small balls");
        let mut m = nalgebra::DMatrix::zeros(self.dim(), self.dim());
        for (i, row) in self.step.iter().enumerate() {
            for &j in row {
                if j >= 0 {
                    m[(i, j as usize)] += 1.0;
                }
            }
        }
        m
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EigEstimate {
    #[serde(serialize_with = "ser_f64")]
    pub value: f64,
    #[serde(serialize_with = "ser_f64")]
    pub residual: f64,
    pub matvecs: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Top eigenvalue of the (symmetric) ball adjacency by restarted
/// Lanczos with full reorthogonalization inside each cycle. Convergence
/// is decided on the explicit residual `||A v - theta v||`, which is
/// the certifiable quantity; the Rayleigh value is returned with it.
pub fn top_eigenvalue(
    op: &SparseOperator,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<EigEstimate> {
    let n = op.dim();
    if n == 1 {
        return Ok(EigEstimate {
            value: 0.0,
            residual: 0.0,
            matvecs: 0,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // positive start vector: nonzero overlap with the top eigenvector
    // of a connected nonnegative matrix
    let mut v: Vec<f64> = (0..n).map(|_| 0.5 + rng.random::<f64>()).collect();
    let inv = 1.0 / norm(&v);
    v.iter_mut().for_each(|x| *x *= inv);

    let cycle = n.min(if n > 400_000 { 16 } else { 40 });
    let mut matvecs = 0usize;
    let mut last_residual = f64::INFINITY;

    while matvecs < max_iter {
        // one Lanczos cycle from v
        let mut basis: Vec<Vec<f64>> = vec![v.clone()];
        let mut alphas: Vec<f64> = Vec::with_capacity(cycle);
        let mut betas: Vec<f64> = Vec::with_capacity(cycle);
        let mut w = vec![0.0; n];
        for j in 0..cycle {
            op.matvec(&basis[j], &mut w);
            matvecs += 1;
            let alpha = dot(&w, &basis[j]);
            alphas.push(alpha);
            // full reorthogonalization, two passes
            for _ in 0..2 {
                for q in &basis {
                    let c = dot(&w, q);
                    w.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
                }
            }
            let beta = norm(&w);
            if beta < 1e-13 || j + 1 == cycle {
                break;
            }
            betas.push(beta);
            let mut next = w.clone();
            next.iter_mut().for_each(|x| *x /= beta);
            basis.push(next);
        }

        // top Ritz pair of the small tridiagonal
        let k = alphas.len();
        let mut t = nalgebra::DMatrix::zeros(k, k);
        for i in 0..k {
            t[(i, i)] = alphas[i];
            if i + 1 < k {
                t[(i, i + 1)] = betas[i];
                t[(i + 1, i)] = betas[i];
            }
        }
        let eig = nalgebra::SymmetricEigen::new(t);
        let (top_idx, _) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("nonempty spectrum");
        let s = eig.eigenvectors.column(top_idx);

        let mut ritz = vec![0.0; n];
        for (j, q) in basis.iter().enumerate() {
            let c = s[j];
            ritz.iter_mut().zip(q).for_each(|(x, y)| *x += c * y);
        }
        let inv = 1.0 / norm(&ritz);
        ritz.iter_mut().for_each(|x| *x *= inv);

        op.matvec(&ritz, &mut w);
        matvecs += 1;
        let theta = dot(&w, &ritz); // Rayleigh refinement
        let residual = {
            let mut r = w.clone();
            r.iter_mut().zip(&ritz).for_each(|(x, y)| *x -= theta * y);
            norm(&r)
        };
        last_residual = residual;
        if residual <= tol {
            return Ok(EigEstimate {
                value: theta,
                residual,
                matvecs,
            });
        }
        v = ritz;
    }
    Err(Error::NoConvergence {
        residual: last_residual,
        iterations: max_iter,
        tol,
    })
}

/// One row of the norm-bound convergence table.
#[derive(Debug, Clone, Serialize)]
pub struct KestenRow {
    pub radius: usize,
    pub dimension: usize,
    #[serde(serialize_with = "ser_f64")]
    pub lambda_max: f64,
    #[serde(serialize_with = "ser_f64")]
    pub gap: f64,
}

/// The norm of the four-shift sum on the full group, `2 * sqrt(3)`.
pub fn four_shift_norm() -> f64 {
    2.0 * 3.0f64.sqrt()
}

/// Ball-by-ball top eigenvalues and their gaps to `2 * sqrt(3)`.
pub fn kesten_report(max_radius: usize, cap: usize, seed: u64) -> Result<Vec<KestenRow>> {
    let bound = four_shift_norm();
    (0..=max_radius)
        .map(|radius| {
            let op = SparseOperator::cayley(radius, cap)?;
            let est = top_eigenvalue(&op, 1e-10, 40_000, seed)?;
            Ok(KestenRow {
                radius,
                dimension: op.dim(),
                lambda_max: est.value,
                gap: bound - est.value,
            })
        })
        .collect()
}

/// The displacement constant and its algebraically linked companions.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct KazhdanConstant {
    #[serde(serialize_with = "ser_f64")]
    pub eta: f64,
    #[serde(serialize_with = "ser_f64")]
    pub eta_squared: f64,
    #[serde(serialize_with = "ser_f64")]
    pub kesten_norm: f64,
}

/// eta = sqrt(2 - sqrt(3)), with eta^2 + norm/2 = 2 by construction.
pub fn kazhdan_eta() -> KazhdanConstant {
    let eta_squared = 2.0 - 3.0f64.sqrt();
    KazhdanConstant {
        eta: eta_squared.sqrt(),
        eta_squared,
        kesten_norm: four_shift_norm(),
    }
}

/// Squared displacements of `x` under the `a` and `b` shifts:
/// `||shift_l x - x||^2` for `l` in `{a, b}`.
pub fn shift_displacements(op: &SparseOperator, x: &[f64]) -> [f64; 2] {
    let mut out = [0.0; 2];
    let mut y = vec![0.0; op.dim()];
    for (k, l) in [Letter::A, Letter::B].into_iter().enumerate() {
        op.shift(l, x, &mut y);
        out[k] = y.iter().zip(x).map(|(u, v)| (u - v) * (u - v)).sum::<f64>();
    }
    out
}

/// Both sides of the averaging identity
/// `sum_l ||shift_l x - x||^2 = 4 ||x||^2 - <A x, x>`,
/// exact for interior-supported `x`.
pub fn averaging_identity(op: &SparseOperator, x: &[f64]) -> (f64, f64) {
    let [ga, gb] = shift_displacements(op, x);
    let mut ax = vec![0.0; op.dim()];
    op.matvec(x, &mut ax);
    let quad = dot(&ax, x);
    let nsq = dot(x, x);
    (ga + gb, 4.0 * nsq - quad)
}

/// Random unit vector supported on the interior of the ball.
pub fn random_interior_unit(op: &SparseOperator, rng: &mut impl Rng) -> Vec<f64> {
    let mut x = vec![0.0; op.dim()];
    for i in op.interior() {
        x[i] = rng.random::<f64>() * 2.0 - 1.0;
    }
    let inv = 1.0 / norm(&x);
    x.iter_mut().for_each(|v| *v *= inv);
    x
}

/// Direct minimax search: projected subgradient descent on
/// `max_l ||shift_l x - x||` over unit vectors supported in the
/// interior, restarted from random points. Returns the smallest value
/// found; a successful search certifies that the optimizer could not
/// beat the displacement bound, not a proof of the minimum.
pub fn minimax_displacement(
    op: &SparseOperator,
    restarts: usize,
    iters: usize,
    seed: u64,
) -> Result<f64> {
    if op.radius() == 0 {
        return Err(Error::Resource {
            what: "minimax search radius",
            requested: 0,
            cap: 0,
        });
    }
    let n = op.dim();
    let interior = op.interior();
    let best_per_restart = exec::map_indexed(restarts, |r| {
        let mut rng =
            ChaCha8Rng::seed_from_u64(seed ^ (r as u64).wrapping_mul(0xD134_2543_DE82_EF95));
        let mut x = random_interior_unit(op, &mut rng);
        let mut best = f64::INFINITY;
        let mut ya = vec![0.0; n];
        let mut yb = vec![0.0; n];
        for it in 0..iters {
            // displacement gradients: d/dx ||S x - x||^2 = 2 (S - I)^T (S - I) x
            op.shift(Letter::A, &x, &mut ya);
            op.shift(Letter::B, &x, &mut yb);
            let ga: f64 = ya.iter().zip(&x).map(|(u, v)| (u - v) * (u - v)).sum();
            let gb: f64 = yb.iter().zip(&x).map(|(u, v)| (u - v) * (u - v)).sum();
            best = best.min(ga.max(gb).sqrt());

            // subgradient of the active branch
            let (y, l) = if ga >= gb {
                (&ya, Letter::A)
            } else {
                (&yb, Letter::B)
            };
            let mut diff: Vec<f64> = y.iter().zip(&x).map(|(u, v)| u - v).collect();
            // (S - I)^T d = S^T d - d, and S^T = S^{-1} is the inverse shift
            let mut back = vec![0.0; n];
            op.shift(l.inverse(), &diff, &mut back);
            diff.iter_mut().zip(&back).for_each(|(d, b)| *d = *b - *d);
            // diff now holds (S - I)^T (S - I) x; descend against it
            let step = 0.4 / (1.0 + it as f64).sqrt();
            for (xi, di) in x.iter_mut().zip(&diff) {
                *xi -= step * di;
            }
            // project back to interior support and the unit sphere
            let mut projected = vec![0.0; n];
            for &i in &interior {
                projected[i] = x[i];
            }
            let nrm = norm(&projected);
            if nrm < 1e-12 {
                projected = random_interior_unit(op, &mut rng);
            } else {
                projected.iter_mut().for_each(|v| *v /= nrm);
            }
            x = projected;
        }
        best
    });
    Ok(best_per_restart.into_iter().fold(f64::INFINITY, f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn op(radius: usize) -> SparseOperator {
        SparseOperator::cayley(radius, 12).unwrap()
    }

    #[test]
    fn ball_zero_and_one() {
        let o = op(0);
        assert_eq!(o.dim(), 1);
        assert_eq!(o.edge_count(), 0);
        let o = op(1);
        assert_eq!(o.dim(), 5);
        assert_eq!(o.edge_count(), 4);
        assert_eq!(o.degree(0), 4, "center of the star has full degree");
    }

    #[test]
    fn balls_are_trees() {
        for r in 1..=6 {
            let o = op(r);
            assert_eq!(o.edge_count(), o.dim() - 1, "radius {r}");
        }
    }

    #[test]
    fn adjacency_is_symmetric() {
        let o = op(3);
        let d = o.to_dense();
        assert_eq!(d.clone().transpose(), d);
        for i in 0..o.dim() {
            let row_sum: f64 = d.row(i).iter().sum();
            assert_eq!(row_sum as usize, o.degree(i));
            assert!(o.degree(i) <= 4);
            if o.words()[i].len() < 3 {
                assert_eq!(o.degree(i), 4, "interior degree");
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            SparseOperator::cayley(13, 12),
            Err(Error::Resource { .. })
        ));
    }

    #[test]
    fn star_eigenvalue_is_two() {
        let o = op(1);
        let est = top_eigenvalue(&o, 1e-10, 1000, 0).unwrap();
        assert!((est.value - 2.0).abs() < 1e-8, "star gives sqrt(4) = 2");
        assert!(est.residual <= 1e-10);
    }

    #[test]
    fn radius_zero_eigenvalue() {
        let o = op(0);
        let est = top_eigenvalue(&o, 1e-10, 10, 0).unwrap();
        assert_eq!(est.value, 0.0);
    }

    #[test]
    fn dense_oracle_agrees_small_radius() {
        for r in 1..=4 {
            let o = op(r);
            let est = top_eigenvalue(&o, 1e-10, 20_000, 1).unwrap();
            let dense = o.to_dense();
            let eig = nalgebra::SymmetricEigen::new(dense);
            let exact = eig.eigenvalues.iter().fold(f64::MIN, |a, &b| a.max(b));
            assert!(
                (est.value - exact).abs() < 1e-7,
                "radius {r}: {} vs {exact}",
                est.value
            );
        }
    }

    #[test]
    fn estimates_increase_and_stay_below_bound() {
        let bound = four_shift_norm();
        let mut prev = -1.0;
        for r in 0..=6 {
            let est = top_eigenvalue(&op(r), 1e-9, 20_000, 0).unwrap();
            assert!(est.value > prev, "strict growth at radius {r}");
            assert!(est.value <= bound + 1e-9, "bound at radius {r}");
            prev = est.value;
        }
    }

    #[test]
    fn eigenvalue_deterministic_given_seed() {
        let o = op(4);
        let a = top_eigenvalue(&o, 1e-10, 20_000, 7).unwrap();
        let b = top_eigenvalue(&o, 1e-10, 20_000, 7).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }

    #[test]
    fn kesten_rows() {
        let rows = kesten_report(3, 12, 0).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[1].dimension, 5);
        assert!((rows[1].lambda_max - 2.0).abs() < 1e-8);
        assert!((rows[1].gap - (four_shift_norm() - 2.0)).abs() < 1e-8);
        assert!(rows.iter().all(|r| r.gap > 0.0));
    }

    #[test]
    fn constants() {
        let k = kazhdan_eta();
        assert!((k.eta - 0.517638).abs() < 1e-6);
        assert!((k.eta_squared - 0.267949).abs() < 1e-6);
        assert!((k.eta * k.eta - k.eta_squared).abs() < 1e-15);
        assert!((k.eta_squared + k.kesten_norm / 2.0 - 2.0).abs() < 1e-12);
        assert!((4.0 - k.kesten_norm - 2.0 * k.eta_squared).abs() < 1e-12);
    }

    #[test]
    fn averaging_identity_at_delta_e() {
        let o = op(2);
        let mut x = vec![0.0; o.dim()];
        x[0] = 1.0; // identity word is first in shortlex order
        let (lhs, rhs) = averaging_identity(&o, &x);
        assert!((lhs - 4.0).abs() < 1e-12);
        assert!((rhs - 4.0).abs() < 1e-12);
    }

    #[test]
    fn averaging_identity_random_interior() {
        let o = op(5);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let x = random_interior_unit(&o, &mut rng);
            let (lhs, rhs) = averaging_identity(&o, &x);
            assert!((lhs - rhs).abs() < 1e-10, "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn shifts_are_isometries_on_interior_support() {
        let o = op(4);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = random_interior_unit(&o, &mut rng);
        let mut y = vec![0.0; o.dim()];
        for l in Letter::ALL {
            o.shift(l, &x, &mut y);
            assert!((norm(&y) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn shift_then_inverse_is_identity_inside() {
        let o = op(3);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let x = random_interior_unit(&o, &mut rng);
        let mut y = vec![0.0; o.dim()];
        let mut z = vec![0.0; o.dim()];
        // interior support of radius-3 ball can leave radius 2, so go
        // through the embedding once and come back
        o.shift(Letter::A, &x, &mut y);
        o.shift(Letter::AInv, &y, &mut z);
        let diff: f64 = z
            .iter()
            .zip(&x)
            .map(|(u, v)| (u - v).abs())
            .fold(0.0, f64::max);
        assert!(diff < 1e-14);
    }

    #[test]
    fn minimax_never_beats_eta_small_radius() {
        let eta = kazhdan_eta().eta;
        for r in [2, 3] {
            let o = op(r);
            let found = minimax_displacement(&o, 10, 150, 0).unwrap();
            assert!(
                found >= eta - 1e-3,
                "radius {r}: optimizer found {found} < eta"
            );
        }
    }

    #[test]
    fn edge_list_format() {
        let o = op(1);
        let mut buf = Vec::new();
        o.write_edge_list(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines: Vec<&str> = text.lines().collect();
        lines.sort_unstable();
        assert_eq!(lines, vec!["e A", "e B", "e a", "e b"]);
    }
}
