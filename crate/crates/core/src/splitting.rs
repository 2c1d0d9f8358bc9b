//! Level decomposition of the graded model and its regularity
//! certificate: level spaces joined from low-rank subspaces, reduced
//! blocks obtained by projecting away the previous level, the direct-sum
//! splitting of the whole space, and the combinatorial facts (block
//! permutation, transitive index action, trivial stabilizers) that make
//! the shift action on each level a permutation of isometric blocks.
//! The certificate states exactly the windowed claim; the unbounded
//! statement is its limit and is not asserted.
//!
//! The level space at rank `n` joins the subspaces of all window
//! subintervals of rank at most `n`. Using translate-based levels
//! instead would let boundary translates poke out of the window and
//! leave spurious mass in the reduced blocks.

use serde::Serialize;

use crate::cairn::{Cairn, GradedCairn};
use crate::error::{Error, Result};
use crate::exec;
use crate::freegroup::Letter;
use crate::hilbert::{Subspace, Vector};
use crate::intervals::Interval;
use crate::report::ser_f64;
use crate::spectral::{
    averaging_identity, kazhdan_eta, random_interior_unit, top_eigenvalue, SparseOperator,
};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Join of `H_J` over all window subintervals `J` of rank at most `n`;
/// `n = -1` gives the zero subspace.
pub fn level_space(cairn: &Cairn, n: i32) -> Result<Subspace> {
    let mut level = Subspace::trivial(cairn.ambient_dim());
    if n < 0 {
        return Ok(level);
    }
    for j in cairn.index() {
        if j.rank() <= n {
            level = level.join(&cairn.subspace_of(j)?)?;
        }
    }
    Ok(level)
}

/// `H_I` projected to the orthogonal complement of the previous level.
pub fn reduced_block(cairn: &Cairn, interval: &Interval) -> Result<Subspace> {
    let h = cairn.subspace_of(interval)?;
    let below = level_space(cairn, interval.rank() - 1)?;
    h.ominus(&below)
}

#[derive(Clone)]
pub struct Level {
    pub n: usize,
    pub blocks: Vec<(Interval, Subspace)>,
    pub tilde_e: Subspace,
    pub worst_orthogonality_residual: f64,
}

impl Level {
    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|(_, b)| b.dim()).sum()
    }
}

pub struct Decomposition {
    pub window_rank: usize,
    pub ambient_dim: usize,
    pub levels: Vec<Level>,
    /// residual of reconstructing random probes from all blocks
    pub completeness_residual: f64,
    /// worst frame inner product between blocks of different levels
    pub cross_level_residual: f64,
    /// worst gap between the two routes to the level space quotient
    pub tilde_route_residual: f64,
}

impl Decomposition {
    pub fn level_dims(&self) -> Vec<usize> {
        self.levels.iter().map(Level::dim).collect()
    }

    pub fn block_counts(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.blocks.len()).collect()
    }
}

fn frame_coupling(a: &Subspace, b: &Subspace) -> f64 {
    let mut worst = 0.0f64;
    for f in a.frame() {
        for g in b.frame() {
            worst = worst.max(f.inner(g).norm());
        }
    }
    worst
}

/// Splits the graded model into levels of reduced blocks, checking the
/// invariants as it goes: blocks pairwise orthogonal within and across
/// levels, both routes to the level quotient agree, dimensions add up
/// to the ambient dimension, and random probes are reconstructed by the
/// block projections. Any residual above `tol` aborts with the worst
/// offender.
pub fn decompose(cairn: &GradedCairn, tol: f64) -> Result<Decomposition> {
    let ambient = cairn.ambient_dim();
    let mut levels: Vec<Level> = Vec::new();
    let mut previous = Subspace::trivial(ambient);
    let mut tilde_route_residual = 0.0f64;

    for n in 0..=cairn.window_rank() {
        let rank_members: Vec<&Interval> = cairn
            .index()
            .iter()
            .filter(|j| j.rank() == n as i32)
            .collect();
        let blocks: Vec<(Interval, Subspace)> = exec::map_indexed(rank_members.len(), |k| {
            let j = rank_members[k];
            let h = cairn.subspace_of(j)?;
            Ok::<_, Error>((j.clone(), h.ominus(&previous)?))
        })
        .into_iter()
        .collect::<Result<_>>()?;

        let mut worst = 0.0f64;
        for (p, (_, a)) in blocks.iter().enumerate() {
            for (_, b) in blocks.iter().skip(p + 1) {
                worst = worst.max(frame_coupling(a, b));
            }
        }

        // the same law in its un-reduced form: distinct same-rank
        // subspaces are relatively orthogonal over the previous level
        for (p, i) in rank_members.iter().enumerate() {
            for j in rank_members.iter().skip(p + 1) {
                let hi = cairn.subspace_of(i)?;
                let hj = cairn.subspace_of(j)?;
                worst = worst.max(crate::hilbert::rel_orth_residual(&hi, &previous, &hj)?);
            }
        }

        // two routes to the level quotient: join the reduced blocks, or
        // take E_n ominus E_{n-1}
        let mut joined_blocks = Subspace::trivial(ambient);
        for (_, b) in &blocks {
            joined_blocks = joined_blocks.join(b)?;
        }
        let mut e_n = previous.clone();
        for j in &rank_members {
            e_n = e_n.join(&cairn.subspace_of(j)?)?;
        }
        let quotient = e_n.ominus(&previous)?;
        let route_gap = joined_blocks.equality_residual(&quotient)?;
        tilde_route_residual = tilde_route_residual.max(route_gap);
        if route_gap > tol {
            return Err(Error::Decomposition {
                residual: route_gap,
                tol,
                context: format!("level {n} quotient routes disagree"),
            });
        }
        if worst > tol {
            return Err(Error::Decomposition {
                residual: worst,
                tol,
                context: format!("blocks of level {n} are not orthogonal"),
            });
        }
        levels.push(Level {
            n,
            blocks,
            tilde_e: joined_blocks,
            worst_orthogonality_residual: worst,
        });
        previous = e_n;
    }

    let mut cross = 0.0f64;
    for (p, la) in levels.iter().enumerate() {
        for lb in levels.iter().skip(p + 1) {
            for (_, a) in &la.blocks {
                for (_, b) in &lb.blocks {
                    cross = cross.max(frame_coupling(a, b));
                }
            }
        }
    }
    if cross > tol {
        return Err(Error::Decomposition {
            residual: cross,
            tol,
            context: "blocks of different levels are not orthogonal".into(),
        });
    }

    let total: usize = levels.iter().map(Level::dim).sum();
    if total != ambient {
        return Err(Error::Decomposition {
            residual: total.abs_diff(ambient) as f64,
            tol,
            context: format!("level dimensions sum to {total}, ambient is {ambient}"),
        });
    }

    // completeness: the blocks reconstruct random probes
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ cairn.seed());
    let mut completeness = 0.0f64;
    for _ in 0..8 {
        let v = Vector::random(ambient, &mut rng);
        let mut rebuilt = Vector::zero(ambient);
        for level in &levels {
            for (_, b) in &level.blocks {
                rebuilt = rebuilt.add(&b.project(&v)?);
            }
        }
        completeness = completeness.max(rebuilt.sub(&v).norm() / v.norm());
    }
    if completeness > tol {
        return Err(Error::Decomposition {
            residual: completeness,
            tol,
            context: "block projections do not reconstruct the identity".into(),
        });
    }

    Ok(Decomposition {
        window_rank: cairn.window_rank(),
        ambient_dim: ambient,
        levels,
        completeness_residual: completeness,
        cross_level_residual: cross,
        tilde_route_residual,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelCertificate {
    pub n: usize,
    pub block_count: usize,
    /// worst residual of (shifted block) vs (block of the shifted
    /// interval) over the shift domain
    #[serde(serialize_with = "ser_f64")]
    pub permutation_residual: f64,
    /// translates of the rank-n base interval reachable from it by
    /// letter steps inside the window
    pub reached: usize,
    pub total: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilizerEntry {
    pub n: usize,
    pub elements: Vec<String>,
}

/// The windowed regularity certificate: shifts permute the reduced
/// blocks isometrically, the index action is transitive on each level,
/// and base-interval stabilizers are trivial.
#[derive(Debug, Clone, Serialize)]
pub struct RegularCertificate {
    pub valid: bool,
    pub window_rank: usize,
    #[serde(serialize_with = "ser_f64")]
    pub tol: f64,
    pub levels: Vec<LevelCertificate>,
    pub stabilizers: Vec<StabilizerEntry>,
    pub witnesses: Vec<String>,
}

pub fn certify_regular_multiple(
    cairn: &GradedCairn,
    decomposition: &Decomposition,
    tol: f64,
) -> Result<RegularCertificate> {
    let chain = cairn.chain().clone();
    // the partial interval map of the window: I -> l I when both sides
    // are window subintervals
    let shift_interval = |l: Letter, j: &Interval| -> Option<Interval> {
        let moved = chain.translate(&crate::freegroup::Word::from_letter(l), j);
        cairn.position(&moved).map(|_| moved)
    };
    let mut witnesses = Vec::new();
    let mut levels = Vec::new();

    for level in &decomposition.levels {
        let members: Vec<&Interval> = level.blocks.iter().map(|(j, _)| j).collect();
        let lookup = |i: &Interval| level.blocks.iter().find(|(j, _)| j == i).map(|(_, b)| b);

        // (i) shifts map blocks onto blocks, isometrically within tol
        let mut permutation_residual = 0.0f64;
        for l in Letter::ALL {
            for (j, block) in &level.blocks {
                let Some(moved) = shift_interval(l, j) else {
                    continue;
                };
                let target = lookup(&moved).expect("translate of same rank is in the level");
                let shifted = Subspace::from_frame_unchecked(
                    cairn.ambient_dim(),
                    block
                        .frame()
                        .iter()
                        .map(|f| cairn.shift_vector(l, f))
                        .collect(),
                );
                let residual = target.equality_residual(&shifted)?;
                permutation_residual = permutation_residual.max(residual);
                if residual > tol {
                    witnesses.push(format!(
                        "level {}: shift {} of block {} misses block {} by {residual:.3e}",
                        level.n,
                        l,
                        j.label(),
                        moved.label()
                    ));
                }
            }
        }

        // (ii) transitivity of the index action within the window:
        // breadth-first search by letter steps from the base interval
        let base = chain.base(level.n)?;
        let start = members
            .iter()
            .position(|j| **j == base)
            .expect("base interval is its own window subinterval");
        let mut seen = vec![false; members.len()];
        seen[start] = true;
        let mut queue = vec![start];
        while let Some(p) = queue.pop() {
            for l in Letter::ALL {
                if let Some(moved) = shift_interval(l, members[p]) {
                    if let Some(q) = members.iter().position(|j| **j == moved) {
                        if !seen[q] {
                            seen[q] = true;
                            queue.push(q);
                        }
                    }
                }
            }
        }
        let reached = seen.iter().filter(|&&s| s).count();
        if reached != members.len() {
            witnesses.push(format!(
                "level {}: only {reached} of {} translates reachable from {}",
                level.n,
                members.len(),
                base.label()
            ));
        }

        levels.push(LevelCertificate {
            n: level.n,
            block_count: members.len(),
            permutation_residual,
            reached,
            total: members.len(),
        });
    }

    // (iii) trivial stabilizers up to the window rank
    let mut stabilizers = Vec::new();
    for n in 0..=cairn.window_rank() {
        let stab = chain.stabilizer(n)?;
        if stab.len() != 1 || !stab[0].is_identity() {
            witnesses.push(format!(
                "base interval of rank {n} has nontrivial stabilizer of size {}",
                stab.len()
            ));
        }
        stabilizers.push(StabilizerEntry {
            n,
            elements: stab.iter().map(|w| w.render()).collect(),
        });
    }

    Ok(RegularCertificate {
        valid: witnesses.is_empty(),
        window_rank: cairn.window_rank(),
        tol,
        levels,
        stabilizers,
        witnesses,
    })
}

/// Serializable summary of a decomposition with an optional certificate.
#[derive(Debug, Clone, Serialize)]
pub struct SplitReport {
    pub window_rank: usize,
    pub ambient_dim: usize,
    pub seed: u64,
    pub levels: Vec<SplitLevelSummary>,
    #[serde(serialize_with = "ser_f64")]
    pub completeness_residual: f64,
    #[serde(serialize_with = "ser_f64")]
    pub cross_level_residual: f64,
    #[serde(serialize_with = "ser_f64")]
    pub tilde_route_residual: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<RegularCertificate>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SplitLevelSummary {
    pub n: usize,
    pub dim: usize,
    pub block_count: usize,
    #[serde(serialize_with = "ser_f64")]
    pub worst_orthogonality_residual: f64,
}

impl SplitReport {
    pub fn from_decomposition(
        d: &Decomposition,
        seed: u64,
        certificate: Option<RegularCertificate>,
    ) -> SplitReport {
        let pass = certificate.as_ref().map(|c| c.valid).unwrap_or(true);
        SplitReport {
            window_rank: d.window_rank,
            ambient_dim: d.ambient_dim,
            seed,
            levels: d
                .levels
                .iter()
                .map(|l| SplitLevelSummary {
                    n: l.n,
                    dim: l.dim(),
                    block_count: l.blocks.len(),
                    worst_orthogonality_residual: l.worst_orthogonality_residual,
                })
                .collect(),
            completeness_residual: d.completeness_residual,
            cross_level_residual: d.cross_level_residual,
            tilde_route_residual: d.tilde_route_residual,
            pass,
            certificate,
        }
    }

    /// CSV rows of the per-level sizes, for plotting.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,dim,block_count,worst_orthogonality_residual\n");
        for l in &self.levels {
            out.push_str(&format!(
                "{},{},{},{}\n",
                l.n,
                l.dim,
                l.block_count,
                crate::report::fmt_sig12(l.worst_orthogonality_residual)
            ));
        }
        out
    }
}

/// Outcome of the spectral displacement bound at one radius.
#[derive(Debug, Clone, Serialize)]
pub struct DisplacementReport {
    pub radius: usize,
    pub dimension: usize,
    #[serde(serialize_with = "ser_f64")]
    pub lambda_max: f64,
    /// smallest eigenvalue of 4*Id - A on the ball
    #[serde(serialize_with = "ser_f64")]
    pub min_eig: f64,
    /// the certified threshold 4 - 2*sqrt(3) - 1e-9
    #[serde(serialize_with = "ser_f64")]
    pub threshold: f64,
    #[serde(serialize_with = "ser_f64")]
    pub eta: f64,
    /// worst deviation in the averaging identity on random
    /// interior-supported unit vectors
    #[serde(serialize_with = "ser_f64")]
    pub identity_residual: f64,
    pub pass: bool,
}

/// Checks `min eig(4*Id - A_R) >= 4 - 2*sqrt(3) - 1e-9` and cross-checks
/// the averaging identity
/// `sum_l ||shift_l x - x||^2 = 4 - <A x, x>` on seeded random
/// interior-supported unit vectors (where the ball truncation is exact).
pub fn displacement_bound(radius: usize, cap: usize, seed: u64) -> Result<DisplacementReport> {
    let op = SparseOperator::cayley(radius, cap)?;
    let est = top_eigenvalue(&op, 1e-10, 60_000, seed)?;
    let min_eig = 4.0 - est.value;
    let threshold = 4.0 - 2.0 * 3.0f64.sqrt() - 1e-9;

    let mut identity_residual = 0.0f64;
    if radius >= 1 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
        for _ in 0..8 {
            let x = random_interior_unit(&op, &mut rng);
            let (lhs, rhs) = averaging_identity(&op, &x);
            identity_residual = identity_residual.max((lhs - rhs).abs());
        }
    }

    Ok(DisplacementReport {
        radius,
        dimension: op.dim(),
        lambda_max: est.value,
        min_eig,
        threshold,
        eta: kazhdan_eta().eta,
        identity_residual,
        pass: min_eig >= threshold && identity_residual <= 1e-10,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cairn::CoordinateCairn;
    use crate::intervals::Chain;
    use std::sync::Arc;

    fn chain() -> Arc<Chain> {
        Arc::new(Chain::new(8))
    }

    fn graded(window: usize, seed: u64) -> GradedCairn {
        GradedCairn::build(chain(), window, None, seed, 4096).unwrap()
    }

    #[test]
    fn level_space_examples() {
        let c = Cairn::Graded(graded(3, 0));
        assert_eq!(level_space(&c, -1).unwrap().dim(), 0);
        assert_eq!(
            level_space(&c, 0).unwrap().dim(),
            6,
            "one block per window word"
        );
        assert_eq!(level_space(&c, 3).unwrap().dim(), 13, "full space");
    }

    #[test]
    fn reduced_block_is_the_fresh_block() {
        let g = graded(3, 7);
        let positions: Vec<usize> = (0..g.index().len()).collect();
        let c = Cairn::Graded(graded(3, 7));
        for p in positions {
            let interval = g.index()[p].clone();
            let reduced = reduced_block(&c, &interval).unwrap();
            let fresh = g.block(p);
            assert!(
                reduced.equals(&fresh, 1e-8),
                "reduced block of {} differs from its fresh block",
                interval.label()
            );
        }
    }

    #[test]
    fn reduced_singleton_is_its_own_block() {
        let g = graded(2, 0);
        let c = Cairn::Graded(graded(2, 0));
        let singleton = g.index()[0].clone();
        assert_eq!(singleton.rank(), 0);
        let reduced = reduced_block(&c, &singleton).unwrap();
        assert!(reduced.equals(&g.block(0), 1e-12));
    }

    #[test]
    fn coordinate_model_degenerates_above_rank_zero() {
        // in the coordinate model the singletons already span everything,
        // so all higher reduced blocks vanish; the graded model is the
        // one carrying the level structure
        let co = CoordinateCairn::build(chain(), 3, 1, 4096).unwrap();
        let c = Cairn::Coordinate(co);
        let i1 = c.chain().base(1).unwrap();
        let reduced = reduced_block(&c, &i1).unwrap();
        assert_eq!(reduced.dim(), 0);
    }

    #[test]
    fn decompose_window_three() {
        let d = decompose(&graded(3, 0), 1e-8).unwrap();
        assert_eq!(d.level_dims(), vec![6, 4, 2, 1]);
        assert_eq!(d.block_counts(), vec![6, 4, 2, 1]);
        assert_eq!(d.level_dims().iter().sum::<usize>(), 13);
    }

    #[test]
    fn decompose_window_zero() {
        let d = decompose(&graded(0, 0), 1e-10).unwrap();
        assert_eq!(d.level_dims(), vec![1]);
        assert_eq!(d.block_counts(), vec![1]);
    }

    #[test]
    fn rotation_leaves_dimensions_alone() {
        let plain = decompose(&graded(4, 0), 1e-8).unwrap();
        let rotated = decompose(&graded(4, 123), 1e-8).unwrap();
        assert_eq!(plain.level_dims(), rotated.level_dims());
        assert_eq!(plain.block_counts(), rotated.block_counts());
        assert_eq!(plain.level_dims(), vec![9, 6, 3, 2, 1]);
    }

    #[test]
    fn certificate_window_four() {
        let g = graded(4, 3);
        let d = decompose(&g, 1e-8).unwrap();
        let cert = certify_regular_multiple(&g, &d, 1e-8).unwrap();
        assert!(cert.valid, "witnesses: {:?}", cert.witnesses);
        for level in &cert.levels {
            assert_eq!(level.reached, level.total, "level {} transitive", level.n);
        }
        for stab in &cert.stabilizers {
            assert_eq!(stab.elements, vec!["e".to_string()]);
        }
    }

    #[test]
    fn merged_block_invalidates_certificate() {
        let g = graded(4, 0);
        // merge two singleton blocks, then decompose with a loose
        // tolerance so the corruption travels into certification
        let broken = g.with_straddled_block(0, 1);
        let d = decompose(&broken, 10.0).unwrap();
        let cert = certify_regular_multiple(&broken, &d, 1e-8).unwrap();
        assert!(!cert.valid);
        assert!(!cert.witnesses.is_empty(), "witness must be named");
    }

    #[test]
    fn corrupted_decomposition_errors_at_strict_tol() {
        let broken = graded(3, 0).with_straddled_block(0, 1);
        assert!(matches!(
            decompose(&broken, 1e-8),
            Err(Error::Decomposition { .. })
        ));
    }

    #[test]
    fn displacement_star() {
        let r = displacement_bound(1, 12, 0).unwrap();
        assert!((r.min_eig - 2.0).abs() < 1e-8, "star spectrum gives 4 - 2");
        assert!(r.pass);
        assert!((r.eta - (2.0f64 - 3.0f64.sqrt()).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn displacement_radius_zero() {
        let r = displacement_bound(0, 12, 0).unwrap();
        assert_eq!(r.dimension, 1);
        assert!((r.min_eig - 4.0).abs() < 1e-12);
        assert!(r.pass);
    }

    #[test]
    fn displacement_sweep_small() {
        for radius in 1..=5 {
            let r = displacement_bound(radius, 12, 0).unwrap();
            assert!(
                r.pass,
                "radius {radius}: min_eig {} below threshold",
                r.min_eig
            );
            assert!(r.identity_residual <= 1e-10);
        }
    }

    #[test]
    fn split_report_csv_shape() {
        let g = graded(3, 0);
        let d = decompose(&g, 1e-8).unwrap();
        let report = SplitReport::from_decomposition(&d, 0, None);
        let csv = report.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "n,dim,block_count,worst_orthogonality_residual");
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("0,6,6,"));
    }
}
