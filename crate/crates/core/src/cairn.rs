//! Interval-indexed systems of subspaces with shift maps, in three
//! concrete finite models, and verifiers for the laws they satisfy:
//! monotone inclusion, relative orthogonality over meets, and shift
//! equivariance.
//!
//! * [`GradedCairn`]: every nonempty subinterval of the window `I_N`
//!   owns a fresh orthogonal block; `H_I` joins the blocks below `I`.
//!   An optional seeded global rotation moves the blocks off the
//!   coordinate axes so the verification exercises real numerics.
//! * [`CoordinateCairn`]: the square-summable model over
//!   (window words) x (fiber); `H_I` spans the coordinates of `I`.
//! * [`ProductMeasureCairn`]: one fair binary coordinate per window
//!   word; interval algebras are checked for exact conditional
//!   independence over their meets, in integer arithmetic.
//!
//! The window makes the shifts partial: equivariance is verified
//! exactly where both an interval and its translate live inside the
//! window.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec;
use crate::freegroup::{Letter, Word};
use crate::hilbert::{rel_orth_residual, Subspace, Vector};
use crate::intervals::{Chain, Interval};
use crate::report::ser_f64;

/// The graded model: one fresh block per window subinterval.
pub struct GradedCairn {
    chain: Arc<Chain>,
    window_rank: usize,
    window: Interval,
    index: Vec<Interval>,
    position: BTreeMap<Interval, usize>,
    dims: Vec<usize>,
    offsets: Vec<usize>,
    ambient: usize,
    basis: Vec<Vector>,
    seed: u64,
}

impl GradedCairn {
    /// Builds the graded model over the subintervals of `I_N`. Block
    /// dimensions may be overridden per rank (they must be constant on
    /// translates for the shifts to act block-to-block, so the key is
    /// the rank). A nonzero seed applies a global random rotation.
    pub fn build(
        chain: Arc<Chain>,
        window_rank: usize,
        dims_by_rank: Option<&BTreeMap<usize, usize>>,
        seed: u64,
        ambient_cap: usize,
    ) -> Result<GradedCairn> {
        let window = chain.base(window_rank)?;
        let index = chain.subintervals_base(window_rank)?;
        let dims: Vec<usize> = index
            .iter()
            .map(|j| {
                dims_by_rank
                    .and_then(|m| m.get(&(j.rank() as usize)).copied())
                    .unwrap_or(1)
                    .max(1)
            })
            .collect();
        let ambient: usize = dims.iter().sum();
        if ambient > ambient_cap {
            return Err(Error::Resource {
                what: "graded ambient dimension",
                requested: ambient,
                cap: ambient_cap,
            });
        }
        let mut offsets = Vec::with_capacity(index.len());
        let mut acc = 0;
        for d in &dims {
            offsets.push(acc);
            acc += d;
        }
        let basis = if seed == 0 {
            (0..ambient).map(|i| Vector::basis(ambient, i)).collect()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let vectors: Vec<Vector> = (0..ambient)
                .map(|_| Vector::random(ambient, &mut rng))
                .collect();
            let rotation = Subspace::from_vectors(ambient, &vectors)?;
            assert_eq!(rotation.dim(), ambient, "random rotation has full rank");
            rotation.frame().to_vec()
        };
        let position = index
            .iter()
            .enumerate()
            .map(|(p, j)| (j.clone(), p))
            .collect();
        Ok(GradedCairn {
            chain,
            window_rank,
            window,
            index,
            position,
            dims,
            offsets,
            ambient,
            basis,
            seed,
        })
    }

    pub fn chain(&self) -> &Arc<Chain> {
        &self.chain
    }

    pub fn window_rank(&self) -> usize {
        self.window_rank
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn index(&self) -> &[Interval] {
        &self.index
    }

    pub fn position(&self, i: &Interval) -> Option<usize> {
        self.position.get(i).copied()
    }

    pub fn block_dim(&self, p: usize) -> usize {
        self.dims[p]
    }

    /// The fresh block attached to index position `p`.
    pub fn block(&self, p: usize) -> Subspace {
        let frame = self.basis[self.offsets[p]..self.offsets[p] + self.dims[p]].to_vec();
        Subspace::from_frame_unchecked(self.ambient, frame)
    }

    /// `H_I`: join of the blocks of all subintervals of `I`.
    pub fn subspace_of(&self, interval: &Interval) -> Result<Subspace> {
        if interval.is_empty() {
            return Ok(Subspace::trivial(self.ambient));
        }
        if !interval.is_subset_of(&self.window) {
            return Err(Error::OutOfWindow {
                interval: interval.label(),
                window_rank: self.window_rank,
            });
        }
        let mut frame = Vec::new();
        for (p, j) in self.index.iter().enumerate() {
            if j.is_subset_of(interval) {
                frame.extend_from_slice(
                    &self.basis[self.offsets[p]..self.offsets[p] + self.dims[p]],
                );
            }
        }
        Ok(Subspace::from_frame_unchecked(self.ambient, frame))
    }

    /// Applies the block permutation induced by the shift `I -> l I`
    /// to a vector. Coefficient mass on blocks without an image inside
    /// the window is dropped; callers apply the map on its domain,
    /// where that mass is zero.
    pub fn shift_vector(&self, l: Letter, v: &Vector) -> Vector {
        let word = Word::from_letter(l);
        let mut out = Vector::zero(self.ambient);
        for (p, j) in self.index.iter().enumerate() {
            let moved = self.chain.translate(&word, j);
            let Some(q) = self.position(&moved) else {
                continue;
            };
            debug_assert_eq!(self.dims[p], self.dims[q]);
            for k in 0..self.dims[p] {
                let c = v.inner(&self.basis[self.offsets[p] + k]);
                let target = &self.basis[self.offsets[q] + k];
                for (o, t) in out.coords_mut().iter_mut().zip(target.coords()) {
                    *o += c * t;
                }
            }
        }
        out
    }

    /// Test hook: replace the first frame vector of block `p` by a unit
    /// vector straddling blocks `p` and `q`, breaking the grading on
    /// purpose. Verification is expected to flag it.
    pub fn with_straddled_block(mut self, p: usize, q: usize) -> GradedCairn {
        let v = self.basis[self.offsets[p]]
            .add(&self.basis[self.offsets[q]])
            .normalized()
            .expect("nonzero");
        self.basis[self.offsets[p]] = v;
        self
    }
}

/// The coordinate model over (window words) x (fiber of dimension d).
pub struct CoordinateCairn {
    chain: Arc<Chain>,
    window_rank: usize,
    index: Vec<Interval>,
    words: Vec<Word>,
    word_pos: BTreeMap<Word, usize>,
    fiber_dim: usize,
    ambient: usize,
}

impl CoordinateCairn {
    pub fn build(
        chain: Arc<Chain>,
        window_rank: usize,
        fiber_dim: usize,
        ambient_cap: usize,
    ) -> Result<CoordinateCairn> {
        let window = chain.base(window_rank)?;
        let words: Vec<Word> = window.elements().iter().cloned().collect();
        let fiber_dim = fiber_dim.max(1);
        let ambient = words.len() * fiber_dim;
        if ambient > ambient_cap {
            return Err(Error::Resource {
                what: "coordinate ambient dimension",
                requested: ambient,
                cap: ambient_cap,
            });
        }
        let word_pos = words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i))
            .collect();
        let index = chain.subintervals_base(window_rank)?;
        Ok(CoordinateCairn {
            chain,
            window_rank,
            index,
            words,
            word_pos,
            fiber_dim,
            ambient,
        })
    }

    pub fn window_rank(&self) -> usize {
        self.window_rank
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber_dim
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn index(&self) -> &[Interval] {
        &self.index
    }

    fn coord(&self, word_idx: usize, k: usize) -> usize {
        word_idx * self.fiber_dim + k
    }

    /// `H_I`: the coordinates of `I ∩ window`, exactly.
    pub fn subspace_of(&self, interval: &Interval) -> Result<Subspace> {
        let mut frame = Vec::new();
        for w in interval.elements() {
            if let Some(&wi) = self.word_pos.get(w) {
                for k in 0..self.fiber_dim {
                    frame.push(Vector::basis(self.ambient, self.coord(wi, k)));
                }
            }
        }
        Ok(Subspace::from_frame_unchecked(self.ambient, frame))
    }

    /// Coordinate permutation `(w, k) -> (l w, k)`; mass on words whose
    /// image leaves the window is dropped.
    pub fn shift_vector(&self, l: Letter, v: &Vector) -> Vector {
        let mut out = Vector::zero(self.ambient);
        for (wi, w) in self.words.iter().enumerate() {
            let moved = w.left_mul(l);
            if let Some(&ti) = self.word_pos.get(&moved) {
                for k in 0..self.fiber_dim {
                    out.coords_mut()[self.coord(ti, k)] = v.coords()[self.coord(wi, k)];
                }
            }
        }
        out
    }
}

/// A Hilbert-space model that can be verified uniformly.
pub enum Cairn {
    Graded(GradedCairn),
    Coordinate(CoordinateCairn),
}

impl Cairn {
    pub fn model_name(&self) -> &'static str {
        match self {
            Cairn::Graded(_) => "graded",
            Cairn::Coordinate(_) => "coordinate",
        }
    }

    pub fn chain(&self) -> &Arc<Chain> {
        match self {
            Cairn::Graded(c) => &c.chain,
            Cairn::Coordinate(c) => &c.chain,
        }
    }

    pub fn window_rank(&self) -> usize {
        match self {
            Cairn::Graded(c) => c.window_rank(),
            Cairn::Coordinate(c) => c.window_rank(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        match self {
            Cairn::Graded(c) => c.ambient_dim(),
            Cairn::Coordinate(c) => c.ambient_dim(),
        }
    }

    pub fn index(&self) -> &[Interval] {
        match self {
            Cairn::Graded(c) => c.index(),
            Cairn::Coordinate(c) => c.index(),
        }
    }

    pub fn subspace_of(&self, interval: &Interval) -> Result<Subspace> {
        match self {
            Cairn::Graded(c) => c.subspace_of(interval),
            Cairn::Coordinate(c) => c.subspace_of(interval),
        }
    }

    pub fn shift_vector(&self, l: Letter, v: &Vector) -> Vector {
        match self {
            Cairn::Graded(c) => c.shift_vector(l, v),
            Cairn::Coordinate(c) => c.shift_vector(l, v),
        }
    }

    pub fn shift_subspace(&self, l: Letter, s: &Subspace) -> Subspace {
        let frame: Vec<Vector> = s.frame().iter().map(|f| self.shift_vector(l, f)).collect();
        Subspace::from_frame_unchecked(self.ambient_dim(), frame)
    }

    /// The partial interval map `I -> l I`, defined where both sides
    /// live in the window index.
    pub fn shift_interval(&self, l: Letter, interval: &Interval) -> Option<Interval> {
        let moved = self.chain().translate(&Word::from_letter(l), interval);
        if self.index().iter().any(|j| j == &moved) {
            Some(moved)
        } else {
            None
        }
    }

    /// The full domain of the shift by `l`: pairs `(I, l I)` with both
    /// in the index.
    pub fn shift_domain(&self, l: Letter) -> Vec<(Interval, Interval)> {
        self.index()
            .iter()
            .filter_map(|i| self.shift_interval(l, i).map(|m| (i.clone(), m)))
            .collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CairnCheck {
    pub kind: &'static str,
    #[serde(rename = "I")]
    pub i: String,
    #[serde(rename = "J")]
    pub j: Option<String>,
    #[serde(serialize_with = "ser_f64")]
    pub residual: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CairnReport {
    pub model: &'static str,
    pub window_rank: usize,
    pub ambient_dim: usize,
    #[serde(serialize_with = "ser_f64")]
    pub tol: f64,
    #[serde(serialize_with = "ser_f64")]
    pub worst_residual: f64,
    pub pass: bool,
    pub checks: Vec<CairnCheck>,
}

impl CairnReport {
    pub fn failures(&self) -> impl Iterator<Item = &CairnCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

enum Task {
    RelOrth(usize, usize),
    Inclusion(usize, usize),
    Shift(Letter, usize),
}

/// Sweeps the model: relative orthogonality `H_I ⊥_{H_{I∩J}} H_J` over
/// all index pairs, monotone inclusion over all nested pairs, and shift
/// equivariance over the domain of each letter.
pub fn verify_cairn(cairn: &Cairn, tol: f64) -> Result<CairnReport> {
    let index = cairn.index();
    let mut tasks = Vec::new();
    for p in 0..index.len() {
        for q in p..index.len() {
            tasks.push(Task::RelOrth(p, q));
            if index[q].is_subset_of(&index[p]) {
                tasks.push(Task::Inclusion(p, q));
            }
            if index[p].is_subset_of(&index[q]) && p != q {
                tasks.push(Task::Inclusion(q, p));
            }
        }
    }
    for l in Letter::ALL {
        for p in 0..index.len() {
            tasks.push(Task::Shift(l, p));
        }
    }

    let checks: Vec<Option<CairnCheck>> = exec::map_indexed(tasks.len(), |t| {
        let check = |kind, i: &Interval, j: Option<&Interval>, residual: f64| CairnCheck {
            kind,
            i: i.label(),
            j: j.map(|j| j.label()),
            residual,
            pass: residual <= tol,
        };
        match &tasks[t] {
            Task::RelOrth(p, q) => {
                let (i, j) = (&index[*p], &index[*q]);
                let meet = cairn.chain().intersect(i, j)?;
                let hi = cairn.subspace_of(i)?;
                let hj = cairn.subspace_of(j)?;
                let hk = cairn.subspace_of(&meet)?;
                let residual = rel_orth_residual(&hi, &hk, &hj)?;
                Ok::<_, Error>(Some(check("relative-orthogonality", i, Some(j), residual)))
            }
            Task::Inclusion(p, q) => {
                let (i, j) = (&index[*p], &index[*q]);
                let hi = cairn.subspace_of(i)?;
                let hj = cairn.subspace_of(j)?;
                let residual = hi.containment_residual(&hj)?;
                Ok(Some(check("inclusion", i, Some(j), residual)))
            }
            Task::Shift(l, p) => {
                let i = &index[*p];
                let Some(moved) = cairn.shift_interval(*l, i) else {
                    return Ok(None);
                };
                let expected = cairn.subspace_of(&moved)?;
                let shifted = cairn.shift_subspace(*l, &cairn.subspace_of(i)?);
                let residual = expected.equality_residual(&shifted)?;
                Ok(Some(check("shift-equivariance", i, Some(&moved), residual)))
            }
        }
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let checks: Vec<CairnCheck> = checks.into_iter().flatten().collect();

    let worst = checks.iter().map(|c| c.residual).fold(0.0, f64::max);
    let pass = checks.iter().all(|c| c.pass);
    Ok(CairnReport {
        model: cairn.model_name(),
        window_rank: cairn.window_rank(),
        ambient_dim: cairn.ambient_dim(),
        tol,
        worst_residual: worst,
        pass,
        checks,
    })
}

/// The product-measure model: one fair binary coordinate per window
/// word, all probabilities exact multiples of `2^-coords`.
pub struct ProductMeasureCairn {
    window_rank: usize,
    coords: Vec<Word>,
    index: Vec<Interval>,
    masks: Vec<u64>,
}

impl ProductMeasureCairn {
    pub fn build(
        chain: &Chain,
        window_rank: usize,
        coord_cap: usize,
    ) -> Result<ProductMeasureCairn> {
        let window = chain.base(window_rank)?;
        let coords: Vec<Word> = window.elements().iter().cloned().collect();
        if coords.len() > coord_cap {
            return Err(Error::Resource {
                what: "measure coordinates",
                requested: coords.len(),
                cap: coord_cap,
            });
        }
        let index = chain.subintervals_base(window_rank)?;
        let masks = index
            .iter()
            .map(|i| {
                coords
                    .iter()
                    .enumerate()
                    .filter(|(_, w)| i.contains(w))
                    .fold(0u64, |m, (k, _)| m | (1 << k))
            })
            .collect();
        Ok(ProductMeasureCairn {
            window_rank,
            coords,
            index,
            masks,
        })
    }

    pub fn window_rank(&self) -> usize {
        self.window_rank
    }

    pub fn coord_count(&self) -> usize {
        self.coords.len()
    }

    pub fn atom_count(&self) -> usize {
        1 << self.coords.len()
    }

    pub fn index(&self) -> &[Interval] {
        &self.index
    }

    /// Coordinate mask of the algebra generated by an interval.
    pub fn algebra_mask(&self, interval: &Interval) -> u64 {
        self.coords
            .iter()
            .enumerate()
            .filter(|(_, w)| interval.contains(w))
            .fold(0u64, |m, (k, _)| m | (1 << k))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MeasureCheck {
    #[serde(rename = "I")]
    pub i: String,
    #[serde(rename = "J")]
    pub j: String,
    pub atom_pairs: usize,
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MeasureReport {
    pub model: &'static str,
    pub window_rank: usize,
    pub coords: usize,
    pub atoms: usize,
    pub atom_pairs_checked: usize,
    pub pass: bool,
    pub checks: Vec<MeasureCheck>,
}

/// Exact conditional independence of `algebra(I)` and `algebra(J)` over
/// `algebra(I ∩ J)`, for every pair of index intervals, checked on all
/// atom pairs by direct counting over the global sample space. For
/// atoms `A`, `B` refining a common atom `C` of the meet algebra the
/// identity `#(A∩B) * #C = #A * #B` is required in exact integers
/// (equivalent to `P(A∩B∩C) P(C) = P(A∩C) P(B∩C)`); incompatible atom
/// pairs must have empty intersection.
pub fn verify_measure_independence(
    cairn: &ProductMeasureCairn,
    chain: &Chain,
) -> Result<MeasureReport> {
    let n = cairn.index.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|p| (p..n).map(move |q| (p, q))).collect();
    let total_atoms = cairn.atom_count() as u64;

    let checks: Vec<MeasureCheck> = exec::map_indexed(pairs.len(), |t| {
        let (p, q) = pairs[t];
        let (i, j) = (&cairn.index[p], &cairn.index[q]);
        let (mi, mj) = (cairn.masks[p], cairn.masks[q]);
        let meet = chain.intersect(i, j)?;
        let mk = cairn.algebra_mask(&meet);
        let mut violations = Vec::new();
        if mk != mi & mj {
            violations.push(format!(
                "coordinate mask of {} is not the intersection of masks",
                meet.label()
            ));
        }

        let mut joint: BTreeMap<(u64, u64), u64> = BTreeMap::new();
        let mut count_i: BTreeMap<u64, u64> = BTreeMap::new();
        let mut count_j: BTreeMap<u64, u64> = BTreeMap::new();
        let mut count_k: BTreeMap<u64, u64> = BTreeMap::new();
        for g in 0..total_atoms {
            *joint.entry((g & mi, g & mj)).or_default() += 1;
            *count_i.entry(g & mi).or_default() += 1;
            *count_j.entry(g & mj).or_default() += 1;
            *count_k.entry(g & mk).or_default() += 1;
        }

        let mut atom_pairs = 0usize;
        for (&a, &na) in &count_i {
            for (&b, &nb) in &count_j {
                atom_pairs += 1;
                let nab = joint.get(&(a, b)).copied().unwrap_or(0);
                if a & mk == b & mk {
                    let nc = count_k[&(a & mk)];
                    if nab * nc != na * nb {
                        violations.push(format!(
                            "atoms A={a:b} of {}, B={b:b} of {}: #(A∩B)*#C = {} but #A*#B = {}",
                            i.label(),
                            j.label(),
                            nab * nc,
                            na * nb
                        ));
                    }
                } else if nab != 0 {
                    violations.push(format!(
                        "atoms A={a:b}, B={b:b} disagree on the meet coordinates yet intersect"
                    ));
                }
            }
        }
        Ok::<_, Error>(MeasureCheck {
            i: i.label(),
            j: j.label(),
            atom_pairs,
            violations,
        })
    })
    .into_iter()
    .collect::<Result<_>>()?;

    let pass = checks.iter().all(|c| c.violations.is_empty());
    Ok(MeasureReport {
        model: "measure",
        window_rank: cairn.window_rank,
        coords: cairn.coord_count(),
        atoms: cairn.atom_count(),
        atom_pairs_checked: checks.iter().map(|c| c.atom_pairs).sum(),
        pass,
        checks,
    })
}
