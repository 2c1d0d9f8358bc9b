//! Acceptance suite: one test per criterion, each printing a pass line
//! with its elapsed time. Tolerances are pinned here and nowhere else.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the
//! per-criterion lines.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use cairncheck::cairn::{
    verify_cairn, verify_measure_independence, Cairn, GradedCairn, ProductMeasureCairn,
};
use cairncheck::freegroup::Word;
use cairncheck::hilbert::check_independence_axioms;
use cairncheck::intervals::{Chain, WordSet};
use cairncheck::spectral::{kazhdan_eta, kesten_report, minimax_displacement, SparseOperator};
use cairncheck::splitting::{certify_regular_multiple, decompose, displacement_bound};

fn report(criterion: usize, what: &str, started: Instant) {
    println!(
        "[PASS] criterion {criterion}: {what} ({:.2?})",
        started.elapsed()
    );
}

fn shared_chain() -> Arc<Chain> {
    Arc::new(Chain::new(14))
}

#[test]
fn criterion_1_interval_law_suite_to_n12() {
    let started = Instant::now();
    let chain = shared_chain();
    let outcome = chain.verify(12).unwrap();
    for statement in &outcome.statements {
        assert!(statement.pass, "statement {} failed", statement.name);
        assert!(statement.total_instances() > 0);
    }
    assert!(outcome.pass);

    // the scheduled intersections at the three displayed parities
    let meet = |n: usize, shift: &str| {
        let base = chain.base(n).unwrap();
        let moved = chain.translate(&Word::parse(shift).unwrap(), &base);
        chain.intersect(&base, &moved).unwrap()
    };
    assert!(meet(2, "b").is_empty());
    assert_eq!(meet(3, "B"), chain.base(2).unwrap());
    assert_eq!(meet(4, "a"), chain.base(1).unwrap());

    assert!(
        started.elapsed().as_secs() <= 120,
        "suite exceeded its two-minute budget"
    );
    report(1, "exhaustive interval laws up to n = 12", started);
}

#[test]
fn criterion_2_displayed_base_sets() {
    let started = Instant::now();
    let chain = shared_chain();
    let expect: Vec<WordSet> = [
        vec!["e"],
        vec!["e", "a"],
        vec!["A", "e", "a"],
        vec!["A", "e", "a", "bA", "b", "ba"],
        vec!["BA", "B", "Ba", "A", "e", "a", "bA", "b", "ba"],
        vec![
            "BA", "B", "Ba", "aBA", "aB", "aBa", "A", "e", "a", "aa", "bA", "b", "ba", "abA", "ab",
            "aba",
        ],
    ]
    .iter()
    .map(|words| words.iter().map(|w| Word::parse(w).unwrap()).collect())
    .collect();
    for (n, want) in expect.iter().enumerate() {
        assert_eq!(**chain.base_set(n).unwrap(), *want, "base set at n={n}");
    }
    assert_eq!(chain.sizes()[..6], [1, 2, 3, 6, 9, 16]);
    report(2, "six displayed base sets match verbatim", started);
}

#[test]
fn criterion_3_size_recurrence_to_n12() {
    let started = Instant::now();
    let chain = shared_chain();
    let sizes = chain.sizes();
    for n in 0..12 {
        let expected = if n % 2 == 0 {
            2 * sizes[n] - if n >= 3 { sizes[n - 3] } else { 0 }
        } else {
            2 * sizes[n] - sizes[n - 1]
        };
        assert_eq!(sizes[n + 1], expected, "recurrence at n={n}");
    }
    assert_eq!(sizes[12], 337);
    report(3, "size recurrence holds exactly, |I_12| = 337", started);
}

#[test]
fn criterion_4_stabilizers_trivial_to_n10() {
    let started = Instant::now();
    let chain = shared_chain();
    for n in 0..=10 {
        assert_eq!(
            chain.stabilizer(n).unwrap(),
            vec![Word::identity()],
            "stabilizer at n={n}"
        );
    }
    report(4, "setwise stabilizers trivial for n <= 10", started);
}

#[test]
fn criterion_5_cairn_verification() {
    let started = Instant::now();
    let chain = shared_chain();

    // graded model, window 6, seeded rotation, all residuals <= 1e-9
    let graded = GradedCairn::build(Arc::clone(&chain), 6, None, 20260809, 4096).unwrap();
    let hilbert_report = verify_cairn(&Cairn::Graded(graded), 1e-9).unwrap();
    assert!(
        hilbert_report.pass,
        "first failure: {:?}",
        hilbert_report.failures().next()
    );
    assert!(hilbert_report.worst_residual <= 1e-9);

    // measure model, window 4: exact conditional independence, 512 atoms
    let measure = ProductMeasureCairn::build(&chain, 4, 12).unwrap();
    assert_eq!(measure.atom_count(), 512);
    let measure_report = verify_measure_independence(&measure, &chain).unwrap();
    assert!(
        measure_report.pass,
        "first failure: {:?}",
        measure_report
            .checks
            .iter()
            .find(|c| !c.violations.is_empty())
    );

    assert!(
        started.elapsed().as_secs() <= 60,
        "cairn verification exceeded its one-minute budget"
    );
    report(
        5,
        "graded window 6 within 1e-9 and measure window 4 exact",
        started,
    );
}

#[test]
fn criterion_6_decomposition_window_4() {
    let started = Instant::now();
    let chain = shared_chain();
    let cairn = GradedCairn::build(Arc::clone(&chain), 4, None, 4242, 4096).unwrap();
    let decomposition = decompose(&cairn, 1e-8).unwrap();

    for level in &decomposition.levels {
        assert!(
            level.worst_orthogonality_residual <= 1e-9,
            "within-level orthogonality at level {}",
            level.n
        );
    }
    assert!(decomposition.cross_level_residual <= 1e-9);
    assert!(decomposition.completeness_residual <= 1e-8);
    assert_eq!(
        decomposition.level_dims().iter().sum::<usize>(),
        decomposition.ambient_dim
    );

    let certificate = certify_regular_multiple(&cairn, &decomposition, 1e-8).unwrap();
    assert!(certificate.valid, "witnesses: {:?}", certificate.witnesses);
    for level in &certificate.levels {
        assert!(level.permutation_residual <= 1e-8);
        assert_eq!(level.reached, level.total);
    }
    report(
        6,
        "window-4 splitting orthogonal, complete, and certified",
        started,
    );
}

#[test]
fn criterion_7_norm_bound_sweep() {
    let started = Instant::now();
    let bound = 2.0 * 3.0f64.sqrt();
    let rows = kesten_report(10, 12, 0).unwrap();
    assert_eq!(rows.len(), 11);
    assert!(
        (rows[1].lambda_max - 2.0).abs() <= 1e-8,
        "radius 1 is the star"
    );
    for pair in rows.windows(2) {
        assert!(
            pair[0].lambda_max < pair[1].lambda_max,
            "strict growth {} -> {}",
            pair[0].radius,
            pair[1].radius
        );
    }
    for row in &rows[1..] {
        assert!(row.lambda_max <= bound + 1e-9, "radius {}", row.radius);
        assert!(row.gap > 0.0, "radius {}", row.radius);
    }
    // gap threshold at radius 10 locked from an independent dense/sparse
    // oracle run (measured gap 0.1023, provisional bound was 0.17)
    assert!(rows[10].gap <= 0.11, "gap at radius 10: {}", rows[10].gap);

    assert!(
        started.elapsed().as_secs() <= 60,
        "sweep exceeded its one-minute budget"
    );
    report(7, "top-eigenvalue sweep bounded by 2 sqrt 3", started);
}

#[test]
fn criterion_8_displacement_bound() {
    let started = Instant::now();
    let eta = kazhdan_eta().eta;
    assert!((eta - 0.517638).abs() < 1e-6);

    for radius in 0..=10 {
        let outcome = displacement_bound(radius, 12, 0).unwrap();
        assert!(
            outcome.pass,
            "radius {radius}: min_eig {} threshold {}",
            outcome.min_eig, outcome.threshold
        );
        assert!(outcome.min_eig >= 4.0 - 2.0 * 3.0f64.sqrt() - 1e-9);
    }

    // direct minimax search over interior-supported unit vectors
    for radius in 1..=5 {
        let op = SparseOperator::cayley(radius, 12).unwrap();
        let found = minimax_displacement(&op, 50, 300, 0).unwrap();
        assert!(
            found >= eta - 1e-3,
            "radius {radius}: optimizer reached {found}, below eta"
        );
    }
    report(
        8,
        "displacement bound certified; minimax never beats eta",
        started,
    );
}

#[test]
fn criterion_9_independence_axiom_suite() {
    let started = Instant::now();
    let outcome = check_independence_axioms(10_000, 12, 0, 1e-8);
    assert!(outcome.pass);
    for axiom in &outcome.axioms {
        assert_eq!(
            axiom.violations, 0,
            "{}: {:?}",
            axiom.name, axiom.first_failure
        );
        assert!(axiom.checked >= 10_000);
    }
    assert!(
        started.elapsed().as_secs() <= 30,
        "axiom suite exceeded its half-minute budget"
    );
    report(9, "10^4 random triples, zero axiom violations", started);
}

/// The graded model is the faithful carrier of the level structure;
/// custom block dimensions keyed by rank keep the shifts block-to-block.
#[test]
fn extra_graded_with_wider_blocks_still_certifies() {
    let started = Instant::now();
    let chain = shared_chain();
    let dims: BTreeMap<usize, usize> = [(0usize, 2usize), (1, 3)].into_iter().collect();
    let cairn = GradedCairn::build(Arc::clone(&chain), 3, Some(&dims), 7, 4096).unwrap();
    assert_eq!(cairn.ambient_dim(), 6 * 2 + 4 * 3 + 2 + 1);
    let decomposition = decompose(&cairn, 1e-8).unwrap();
    assert_eq!(decomposition.level_dims(), vec![12, 12, 2, 1]);
    let certificate = certify_regular_multiple(&cairn, &decomposition, 1e-8).unwrap();
    assert!(certificate.valid, "witnesses: {:?}", certificate.witnesses);
    report(0, "wider blocks keep the certificate valid", started);
}
