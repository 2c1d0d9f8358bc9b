//! The interval system of the free group: an inductively grown base
//! chain, its translates, recognition, meets, subinterval enumeration,
//! stabilizers, and an exhaustive verifier for the interval laws.
//!
//! The base chain starts at `I_0 = {e}` and grows by
//! `I_{n+1} = I_n ∪ l_n I_n` with the period-four letter schedule. An
//! interval is any left translate `w I_n`, plus the empty set. Empty is
//! encoded as rank -1; every nonempty interval carries its rank (base
//! sizes are strictly increasing, so the rank is determined by the
//! cardinality) and the shortlex-least translate `u` with
//! `u I_rank = elements` as a canonical key.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exec;
use crate::freegroup::{letter_schedule, Letter, Word};

pub type WordSet = BTreeSet<Word>;

/// A finite interval `w I_n` (or the empty set) with its canonical key.
#[derive(Clone)]
pub struct Interval {
    rank: i32,
    translate: Word,
    elements: Arc<WordSet>,
}

impl Interval {
    /// The empty interval, rank -1.
    pub fn empty() -> Interval {
        Interval {
            rank: -1,
            translate: Word::identity(),
            elements: Arc::new(WordSet::new()),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.rank < 0
    }

    /// Rank, with -1 encoding the empty interval.
    pub fn rank(&self) -> i32 {
        self.rank
    }

    /// Canonical translate: the shortlex-least `u` with `u I_rank` equal
    /// to the element set (`e` for the empty interval).
    pub fn translate_word(&self) -> &Word {
        &self.translate
    }

    pub fn elements(&self) -> &WordSet {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.elements.contains(w)
    }

    pub fn is_subset_of(&self, other: &Interval) -> bool {
        self.elements.is_subset(&other.elements)
    }

    /// Human-readable key, also the CLI literal: `In`, `w*In`, `empty`.
    pub fn label(&self) -> String {
        if self.is_empty() {
            "empty".to_string()
        } else if self.translate.is_identity() {
            format!("I{}", self.rank)
        } else {
            format!("{}*I{}", self.translate.render(), self.rank)
        }
    }

    fn key(&self) -> (i32, &Word) {
        (self.rank, &self.translate)
    }
}

impl PartialEq for Interval {
    fn eq(&self, other: &Interval) -> bool {
        self.key() == other.key()
    }
}

impl Eq for Interval {}

impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Interval) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Interval {
    fn cmp(&self, other: &Interval) -> std::cmp::Ordering {
        self.rank
            .cmp(&other.rank)
            .then_with(|| self.translate.cmp(&other.translate))
    }
}

impl std::hash::Hash for Interval {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.rank.hash(state);
        self.translate.hash(state);
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Interval({})", self.label())
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Interval", 3)?;
        s.serialize_field("rank", &self.rank)?;
        s.serialize_field("translate", &self.translate)?;
        // BTreeSet iterates in shortlex order already.
        let elements: Vec<&Word> = self.elements.iter().collect();
        s.serialize_field("elements", &elements)?;
        s.end()
    }
}

/// The cached base chain `I_0 .. I_cap` with all derived operations.
///
/// Built once, immutable afterwards; all operations are pure and safe
/// for concurrent readers.
pub struct Chain {
    cap: usize,
    base: Vec<Arc<WordSet>>,
    sizes: Vec<usize>,
}

impl Chain {
    pub fn new(cap: usize) -> Chain {
        let mut base: Vec<Arc<WordSet>> = Vec::with_capacity(cap + 1);
        let mut current: WordSet = WordSet::new();
        current.insert(Word::identity());
        base.push(Arc::new(current.clone()));
        for n in 0..cap {
            let l = letter_schedule(n);
            let shifted: WordSet = current.iter().map(|w| w.left_mul(l)).collect();
            current.extend(shifted);
            base.push(Arc::new(current.clone()));
        }
        let sizes = base.iter().map(|s| s.len()).collect();
        Chain { cap, base, sizes }
    }

    pub fn with_default_cap() -> Chain {
        Chain::new(crate::config::Caps::default().interval_rank)
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// Cardinalities of the cached base intervals.
    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    fn check_rank(&self, n: usize) -> Result<()> {
        if n > self.cap {
            Err(Error::Resource {
                what: "interval rank",
                requested: n,
                cap: self.cap,
            })
        } else {
            Ok(())
        }
    }

    pub fn base_set(&self, n: usize) -> Result<&Arc<WordSet>> {
        self.check_rank(n)?;
        Ok(&self.base[n])
    }

    /// The base interval `I_n` (translate `e`).
    pub fn base(&self, n: usize) -> Result<Interval> {
        self.check_rank(n)?;
        Ok(Interval {
            rank: n as i32,
            translate: Word::identity(),
            elements: Arc::clone(&self.base[n]),
        })
    }

    /// Canonicalizes a set already known to be `u I_n` for some `u`.
    /// Any valid `u` lies in the set itself (since `e` is in every base
    /// interval), so scanning the set in shortlex order and returning
    /// the first match yields the canonical translate.
    fn canonical_from_set(&self, rank: usize, elements: WordSet) -> Option<Interval> {
        let base = &self.base[rank];
        let translate = elements
            .iter()
            .find(|u| base.iter().all(|x| elements.contains(&u.mul(x))))?
            .clone();
        Some(Interval {
            rank: rank as i32,
            translate,
            elements: Arc::new(elements),
        })
    }

    /// Decides whether a word set is an interval; returns its canonical
    /// form if so. Recognition is performed within the chain cap.
    pub fn recognize(&self, set: &WordSet) -> Option<Interval> {
        if set.is_empty() {
            return Some(Interval::empty());
        }
        let rank = self.sizes.binary_search(&set.len()).ok()?;
        self.canonical_from_set(rank, set.clone())
    }

    /// The left translate `w I`, re-canonicalized.
    pub fn translate(&self, w: &Word, interval: &Interval) -> Interval {
        if interval.is_empty() {
            return Interval::empty();
        }
        let elements: WordSet = interval.elements.iter().map(|x| w.mul(x)).collect();
        self.canonical_from_set(interval.rank as usize, elements)
            .expect("translate of an interval is an interval")
    }

    /// Set intersection, recognized as an interval. Meet closure says
    /// recognition always succeeds; failure is reported as an internal
    /// consistency error.
    pub fn intersect(&self, left: &Interval, right: &Interval) -> Result<Interval> {
        let meet: WordSet = left
            .elements
            .intersection(&right.elements)
            .cloned()
            .collect();
        self.recognize(&meet).ok_or_else(|| Error::MeetNotInterval {
            left: left.label(),
            right: right.label(),
        })
    }

    /// All nonempty subintervals of the base interval `I_n`, via the
    /// splitting recursion `Sub(I_{n+1}) = Sub(I_n) ∪ l_n Sub(I_n) ∪ {I_{n+1}}`,
    /// sorted by canonical key.
    pub fn subintervals_base(&self, n: usize) -> Result<Vec<Interval>> {
        self.check_rank(n)?;
        let mut subs: BTreeSet<Interval> = BTreeSet::new();
        subs.insert(self.base(0)?);
        for m in 0..n {
            let l = letter_schedule(m);
            let shifted: Vec<Interval> = subs
                .iter()
                .map(|j| self.translate(&Word::from_letter(l), j))
                .collect();
            subs.extend(shifted);
            subs.insert(self.base(m + 1)?);
        }
        Ok(subs.into_iter().collect())
    }

    /// All subintervals of an arbitrary interval, optionally with the
    /// empty interval prepended.
    pub fn subintervals(&self, interval: &Interval, include_empty: bool) -> Result<Vec<Interval>> {
        let mut out = Vec::new();
        if include_empty {
            out.push(Interval::empty());
        }
        if interval.is_empty() {
            return Ok(out);
        }
        let base_subs = self.subintervals_base(interval.rank as usize)?;
        let w = &interval.translate;
        let mut translated: Vec<Interval> =
            base_subs.iter().map(|j| self.translate(w, j)).collect();
        translated.sort();
        out.extend(translated);
        Ok(out)
    }

    /// Independent enumerator for the subintervals of `I_n`: for every
    /// rank `m <= n`, every candidate translate is scanned directly
    /// (any `u` with `u I_m ⊆ I_n` satisfies `u = u e ∈ I_n`). Does not
    /// use the splitting recursion; serves as its oracle.
    pub fn subintervals_scan(&self, n: usize) -> Result<Vec<Interval>> {
        self.check_rank(n)?;
        let big = &self.base[n];
        let mut out: BTreeSet<Interval> = BTreeSet::new();
        for m in 0..=n {
            let base = &self.base[m];
            for u in big.iter() {
                if base.iter().all(|x| big.contains(&u.mul(x))) {
                    let elements: WordSet = base.iter().map(|x| u.mul(x)).collect();
                    let found = self
                        .canonical_from_set(m, elements)
                        .expect("scanned translate is an interval");
                    out.insert(found);
                }
            }
        }
        Ok(out.into_iter().collect())
    }

    /// Third enumeration route for small `n`: run every subset of `I_n`
    /// through recognition. Exponential in `|I_n|`; callers keep `n`
    /// tiny.
    pub fn subintervals_powerset(&self, n: usize) -> Result<Vec<Interval>> {
        self.check_rank(n)?;
        let elements: Vec<Word> = self.base[n].iter().cloned().collect();
        assert!(elements.len() <= 20, "powerset enumeration out of range");
        let mut out: BTreeSet<Interval> = BTreeSet::new();
        for mask in 1u32..(1 << elements.len()) {
            let subset: WordSet = elements
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, w)| w.clone())
                .collect();
            if let Some(interval) = self.recognize(&subset) {
                out.insert(interval);
            }
        }
        Ok(out.into_iter().collect())
    }

    /// The setwise stabilizer of `I_n`, by exhausting the candidate set
    /// `{s x^-1 : s, x ∈ I_n}`.
    pub fn stabilizer(&self, n: usize) -> Result<Vec<Word>> {
        self.check_rank(n)?;
        let base = &self.base[n];
        let mut stab: BTreeSet<Word> = BTreeSet::new();
        for s in base.iter() {
            for x in base.iter() {
                let w = s.mul(&x.inverse());
                if !stab.contains(&w) && base.iter().all(|y| base.contains(&w.mul(y))) {
                    stab.insert(w);
                }
            }
        }
        Ok(stab.into_iter().collect())
    }

    /// Runs the full exhaustive suite of interval laws up to `max_n`.
    pub fn verify(&self, max_n: usize) -> Result<SectionReport> {
        self.check_rank(max_n)?;
        let statements = vec![
            self.verify_factor_closure(max_n),
            self.verify_first_letter(max_n),
            self.verify_scheduled_intersections(max_n),
            self.verify_subinterval_split(max_n)?,
            self.verify_meet_closure(max_n)?,
        ];
        let pass = statements.iter().all(|s| s.pass);
        Ok(SectionReport {
            max_n,
            pass,
            statements,
        })
    }

    /// Every reduced factorization of every element of `I_n` stays in
    /// `I_n`.
    fn verify_factor_closure(&self, max_n: usize) -> StatementReport {
        let per_n = (0..=max_n)
            .map(|n| {
                let set = &self.base[n];
                let mut instances = 0usize;
                let mut failures = Vec::new();
                for w in set.iter() {
                    for pos in 0..=w.len() {
                        instances += 1;
                        let (u, v) = w.split_at(pos);
                        if !set.contains(&u) || !set.contains(&v) {
                            failures.push(format!(
                                "w={} splits as {} * {} leaving I_{}",
                                w.render(),
                                u.render(),
                                v.render(),
                                n
                            ));
                        }
                    }
                }
                LevelResult {
                    n,
                    instances,
                    failures,
                }
            })
            .collect();
        StatementReport::new("factor-closure", per_n)
    }

    /// Every element of `l I_n \ I_n` begins with `l`, for all four
    /// letters.
    fn verify_first_letter(&self, max_n: usize) -> StatementReport {
        let per_n = (0..=max_n)
            .map(|n| {
                let set = &self.base[n];
                let mut instances = 0usize;
                let mut failures = Vec::new();
                for l in Letter::ALL {
                    for x in set.iter() {
                        let w = x.left_mul(l);
                        if set.contains(&w) {
                            continue;
                        }
                        instances += 1;
                        if !w.begins_with(l) {
                            failures.push(format!(
                                "w={} in {}I_{} \\ I_{} does not begin with {}",
                                w.render(),
                                l,
                                n,
                                n,
                                l
                            ));
                        }
                    }
                }
                LevelResult {
                    n,
                    instances,
                    failures,
                }
            })
            .collect();
        StatementReport::new("first-letter", per_n)
    }

    /// `I_n ∩ l_n I_n` equals `I_{n-3}` (n even) or `I_{n-1}` (n odd),
    /// with negative indices denoting the empty set.
    fn verify_scheduled_intersections(&self, max_n: usize) -> StatementReport {
        let per_n = (0..=max_n)
            .map(|n| {
                let set = &self.base[n];
                let l = letter_schedule(n);
                let shifted: WordSet = set.iter().map(|w| w.left_mul(l)).collect();
                let meet: WordSet = set.intersection(&shifted).cloned().collect();
                let k: i64 = if n % 2 == 0 {
                    n as i64 - 3
                } else {
                    n as i64 - 1
                };
                let expected: WordSet = if k < 0 {
                    WordSet::new()
                } else {
                    (*self.base[k as usize]).clone()
                };
                let mut failures = Vec::new();
                if meet != expected {
                    let extra: Vec<String> =
                        meet.difference(&expected).map(|w| w.render()).collect();
                    let missing: Vec<String> =
                        expected.difference(&meet).map(|w| w.render()).collect();
                    failures.push(format!(
                        "I_{n} ∩ {l}I_{n}: unexpected {{{}}}, missing {{{}}}",
                        extra.join(","),
                        missing.join(",")
                    ));
                }
                LevelResult {
                    n,
                    instances: 1,
                    failures,
                }
            })
            .collect();
        StatementReport::new("scheduled-intersection", per_n)
    }

    /// Every proper subinterval of `I_{n+1}` is a subinterval of `I_n`
    /// or of `l_n I_n`. The recursion-based enumerator is checked
    /// against the scan oracle for `n+1 <= 7` and against powerset
    /// recognition for `n+1 <= 4`.
    fn verify_subinterval_split(&self, max_n: usize) -> Result<StatementReport> {
        let mut per_n = Vec::new();
        for np1 in 1..=max_n {
            let n = np1 - 1;
            let subs = self.subintervals_base(np1)?;
            let mut instances = 0usize;
            let mut failures = Vec::new();
            if np1 <= 7 {
                let scanned = self.subintervals_scan(np1)?;
                instances += 1;
                if subs != scanned {
                    failures.push(format!(
                        "recursion gives {} subintervals of I_{np1}, scan gives {}",
                        subs.len(),
                        scanned.len()
                    ));
                }
            }
            if np1 <= 4 {
                let brute = self.subintervals_powerset(np1)?;
                instances += 1;
                if subs != brute {
                    failures.push(format!(
                        "recursion gives {} subintervals of I_{np1}, powerset gives {}",
                        subs.len(),
                        brute.len()
                    ));
                }
            }
            let big = self.base(np1)?;
            let small = self.base(n)?;
            let shifted = self.translate(&Word::from_letter(letter_schedule(n)), &small);
            for j in &subs {
                if j == &big {
                    continue;
                }
                instances += 1;
                if !(j.is_subset_of(&small) || j.is_subset_of(&shifted)) {
                    failures.push(format!(
                        "{} <= I_{np1} proper but inside neither I_{n} nor {}",
                        j.label(),
                        shifted.label()
                    ));
                }
            }
            per_n.push(LevelResult {
                n: np1,
                instances,
                failures,
            });
        }
        Ok(StatementReport::new("subinterval-split", per_n))
    }

    /// Every pairwise meet of subintervals of `I_n` is again a
    /// subinterval of `I_n`.
    fn verify_meet_closure(&self, max_n: usize) -> Result<StatementReport> {
        let mut per_n = Vec::new();
        for n in 0..=max_n {
            let subs = self.subintervals_base(n)?;
            let known: BTreeSet<Interval> = subs.iter().cloned().collect();
            let pairs: Vec<(usize, usize)> = (0..subs.len())
                .flat_map(|i| (i..subs.len()).map(move |j| (i, j)))
                .collect();
            let failures: Vec<String> = exec::map_indexed(pairs.len(), |p| {
                let (i, j) = pairs[p];
                match self.intersect(&subs[i], &subs[j]) {
                    Ok(meet) => {
                        if meet.is_empty() || known.contains(&meet) {
                            None
                        } else {
                            Some(format!(
                                "{} ∩ {} = {} is not a subinterval of I_{n}",
                                subs[i].label(),
                                subs[j].label(),
                                meet.label()
                            ))
                        }
                    }
                    Err(_) => Some(format!(
                        "{} ∩ {} is not an interval",
                        subs[i].label(),
                        subs[j].label()
                    )),
                }
            })
            .into_iter()
            .flatten()
            .collect();
            per_n.push(LevelResult {
                n,
                instances: pairs.len(),
                failures,
            });
        }
        Ok(StatementReport::new("meet-closure", per_n))
    }
}

/// Per-`n` outcome of one verified statement.
#[derive(Debug, Clone, Serialize)]
pub struct LevelResult {
    pub n: usize,
    pub instances: usize,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StatementReport {
    pub name: &'static str,
    pub pass: bool,
    pub per_n: Vec<LevelResult>,
}

impl StatementReport {
    fn new(name: &'static str, per_n: Vec<LevelResult>) -> StatementReport {
        let pass = per_n.iter().all(|r| r.failures.is_empty());
        StatementReport { name, pass, per_n }
    }

    pub fn total_instances(&self) -> usize {
        self.per_n.iter().map(|r| r.instances).sum()
    }
}

/// Outcome of the exhaustive interval-law suite.
#[derive(Debug, Clone, Serialize)]
pub struct SectionReport {
    pub max_n: usize,
    pub pass: bool,
    pub statements: Vec<StatementReport>,
}

/// Parses an interval literal: `In` for base intervals, `w*In` for
/// translates, `empty` for the empty interval. The translate accepts
/// the compact serialization (`B*I3`) and the spelled-out inverses
/// (`b^-1*I3`).
pub fn parse_interval_literal(chain: &Chain, literal: &str) -> Result<Interval> {
    let bad = |reason: &str| Error::ParseInterval {
        literal: literal.to_string(),
        reason: reason.to_string(),
    };
    let trimmed = literal.trim();
    if trimmed == "empty" || trimmed == "0" {
        return Ok(Interval::empty());
    }
    let (word_part, base_part) = match trimmed.rsplit_once('*') {
        Some((w, b)) => (Some(w), b),
        None => (None, trimmed),
    };
    let rank: usize = base_part
        .strip_prefix('I')
        .ok_or_else(|| bad("expected a base part of the form In"))?
        .parse()
        .map_err(|_| bad("rank is not a number"))?;
    let base = chain.base(rank)?;
    match word_part {
        None => Ok(base),
        Some(raw) => {
            let compact = raw.replace("a^-1", "A").replace("b^-1", "B");
            let w = Word::parse(&compact)?;
            Ok(chain.translate(&w, &base))
        }
    }
}
