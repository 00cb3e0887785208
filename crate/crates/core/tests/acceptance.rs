//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the observed numbers once its assertions hold (run with `--nocapture` to
//! see them). Criterion 11 (byte-identical CLI reports) lives with the
//! command-line crate's integration tests.

use oapcert_core::construction::{beta_diff, group_by_blocks, sparse_sum, z_vector, DualForm};
use oapcert_core::dyadic::Dyadic;
use oapcert_core::enflo::{check_condition_i, full_report, telescoping_exact_at};
use oapcert_core::index::{expand_y, level};
use oapcert_core::linalg::DenseMatrix;
use oapcert_core::normbounds::{
    beta_tilde_analysis, condition_ii_bound, condition_iii_bound, derive_seed, factorization_check,
    oh_row_proj_norm, psi_sample_check,
};
use oapcert_core::partition::{
    generate_partitions, verify_lemma2, m_floor, Lemma2Violation, Strategy,
};
use oapcert_core::report::ReportOptions;
use oapcert_core::Error;

fn pass(criterion: u32, detail: &str) {
    println!("ACCEPTANCE {criterion}: PASS — {detail}");
}

fn assert_close(a: f64, b: f64, tol: f64, what: &str) {
    assert!(
        (a - b).abs() <= tol * b.abs().max(1.0),
        "{what}: {a} vs {b} (tol {tol})"
    );
}

/// Criterion 1: the trace of every level operator is the dyadic rational 1,
/// exactly, in both dual forms, for 2 <= n <= 12.
#[test]
fn criterion_01_exact_unit_traces() {
    let rows = check_condition_i(12).expect("traces certify");
    assert_eq!(rows.len(), 11);
    for r in &rows {
        assert!(r.pair.is_one() && r.quad.is_one(), "n = {}", r.n);
    }
    // Per-term contribution: each dual functional evaluates its own
    // generating vector to exactly 1.
    use oapcert_core::construction::z_dual;
    for i in [4u64, 100, 4096] {
        for form in [DualForm::Pair, DualForm::Quad] {
            assert!(z_dual(i, form).unwrap().inner(&z_vector(i).unwrap()).is_one());
        }
    }
    pass(1, "trace = 1 exactly for n = 2..=12, both dual forms");
}

/// Criterion 2: for 2 <= n <= 8 the positive singular values of the
/// averaging window matrix are mutually equal within 1e-10 relative and
/// match (1/2^n)(sqrt(2)/2)sqrt(6) within 1e-10; the remaining half of the
/// spectrum is numerically zero; the report flags the stated value as off
/// by a factor 2.
#[test]
fn criterion_02_averaging_norm_oracle() {
    for n in 2..=8u32 {
        let a = beta_tilde_analysis(n).unwrap();
        let closed = (0.5 * (2f64).sqrt()) * (6f64).sqrt() / (1u64 << n) as f64;
        assert_eq!(a.rank, 1usize << n, "positive group size at n = {n}");
        assert!(a.rel_spread <= 1e-10, "spread {} at n = {n}", a.rel_spread);
        assert_close(a.op_norm, closed, 1e-10, "norm vs closed form");
        assert!(a.null_leak <= 1e-12, "null leak {} at n = {n}", a.null_leak);
        assert_close(a.ratio_to_stated, 2.0, 1e-9, "factor vs stated value");
    }
    // The discrepancy reaches the report as a flag and a note.
    let parts = generate_partitions(5, Strategy::Singleton, 0).unwrap();
    let opts = ReportOptions {
        n_max: 2,
        cyclicity_trials: 2,
        psi_samples: 2,
        ..ReportOptions::default()
    };
    let report = full_report(&parts, &opts).unwrap();
    assert!(report.passed);
    assert!(report.levels[0]
        .flags
        .iter()
        .any(|f| f == "factor_two_vs_stated"));
    assert!(report
        .discrepancy_notes
        .iter()
        .any(|d| d.contains("twice the stated")));
    pass(
        2,
        "2^n equal singular values match the closed form to 1e-10 for n = 2..=8; \
         factor-2 discrepancy vs the stated value flagged in the report",
    );
}

/// Criterion 3: the Hilbert operator norm of each level operator stays below
/// the certified bound for 2 <= n <= 8, and under singleton partitions the
/// bound chain is strictly decreasing with ratio sqrt(2) per level (1e-9).
#[test]
fn criterion_03_norm_decay_sandwich() {
    let parts = generate_partitions(11, Strategy::Singleton, 0).unwrap();
    let mut bounds = Vec::new();
    for n in 2..=8u32 {
        let a = beta_tilde_analysis(n).unwrap();
        let bound = condition_ii_bound(n, &parts, a.op_norm).unwrap();
        assert!(
            a.op_norm <= bound,
            "sandwich at n = {n}: {} vs {bound}",
            a.op_norm
        );
        bounds.push(bound);
    }
    for w in bounds.windows(2) {
        assert!(w[1] < w[0], "strict decrease");
        assert_close(w[0] / w[1], (2f64).sqrt(), 1e-9, "ratio per level");
    }
    pass(
        3,
        "operator norm <= bound for n = 2..=8; singleton bound chain strictly \
         decreasing with ratio sqrt(2) to 1e-9",
    );
}

/// Criterion 4: the Schatten-4/3 norm of the d-point identity is d^{3/4}
/// within 1e-9 for d in {1, 2, 4, 16, 64}.
#[test]
fn criterion_04_identity_schatten_norm() {
    for d in [1usize, 2, 4, 16, 64] {
        let got = oh_row_proj_norm(&DenseMatrix::identity(d)).unwrap();
        assert_close(got, (d as f64).powf(0.75), 1e-9, "identity norm");
    }
    pass(4, "identity Schatten-4/3 norm equals d^{3/4} to 1e-9 for d in {1,2,4,16,64}");
}

/// Criterion 5: every difference vector y_j for 4 <= j < 2^13 has exactly
/// nine nonzero coefficients — eight of absolute value 1 and one of absolute
/// value 2 — squared length 12, and equals
/// (-1)^l z_{2i + floor(l/2)} - z_i for j = 4i + l.
#[test]
fn criterion_05_difference_vector_structure() {
    let twelve = Dyadic::from_int(12);
    for j in 4..(1u64 << 13) {
        let y = expand_y(j).unwrap();
        assert_eq!(y.support_len(), 9, "support at j = {j}");
        let mut ones = 0;
        let mut twos = 0;
        for (_, c) in y.iter() {
            match c.abs() {
                a if a.is_one() => ones += 1,
                a if a == Dyadic::from_int(2) => twos += 1,
                other => panic!("unexpected coefficient {} at j = {j}", other.render()),
            }
        }
        assert_eq!((ones, twos), (8, 1), "coefficient profile at j = {j}");
        assert_eq!(y.norm_sq(), twelve, "length at j = {j}");

        let (i, l) = (j / 4, j % 4);
        let mut want = z_vector(2 * i + l / 2).unwrap().scaled(if l % 2 == 0 {
            Dyadic::ONE
        } else {
            -Dyadic::ONE
        });
        want.add_scaled(&z_vector(i).unwrap(), -Dyadic::ONE);
        assert_eq!(y, want, "z-combination at j = {j}");
    }
    pass(
        5,
        "y_j has 9 nonzeros (eight +-1, one +-2), |y_j|^2 = 12, and matches its \
         z-combination exactly for every j in 4..2^13",
    );
}

/// Criterion 6: the telescoping identity holds entrywise in exact dyadic
/// arithmetic for 3 <= n <= 10, and regrouping the difference operator by
/// partition blocks re-sums to it exactly.
#[test]
fn criterion_06_telescoping_and_regrouping() {
    for n in 3..=10u32 {
        assert!(telescoping_exact_at(n).unwrap(), "matrix identity at n = {n}");
    }
    let parts = generate_partitions(11, Strategy::Greedy, 0).unwrap();
    for n in 3..=8u32 {
        let diff = beta_diff(n).unwrap();
        let blocks = &parts.level(n + 1).unwrap().nabla;
        let pieces = group_by_blocks(&diff, blocks).unwrap();
        let mats: Vec<_> = pieces.iter().map(|(_, op)| op.sparse_matrix()).collect();
        assert_eq!(
            sparse_sum(mats.iter()),
            diff.sparse_matrix(),
            "regrouped re-sum at n = {n}"
        );
    }
    pass(
        6,
        "pair minus previous quad equals the difference operator exactly for \
         n = 3..=10; blockwise regrouping re-sums exactly for n = 3..=8",
    );
}

/// Criterion 7: generated partitions certify all three properties for
/// n <= 20 with m_n at or above the floor max(1, ceil(2^{n/8 - 2})), and a
/// mutated partition is rejected with a correct witness.
#[test]
fn criterion_07_partition_certification() {
    let parts = generate_partitions(21, Strategy::Greedy, 0).unwrap();
    for n in 1..=20u32 {
        let report = verify_lemma2(&parts, n).unwrap();
        assert!(report.passed(), "level {n}: {:?}", report.violations.first());
        let m = parts.level(n).unwrap().m;
        assert!(m >= m_floor(n), "floor at level {n}: m = {m}");
    }
    // The floor actually binds from level 17 on.
    assert!(m_floor(17) == 2 && parts.level(17).unwrap().m >= 2);

    // Mutation: merge two grouping blocks and demand a witness that names
    // the merged block.
    let mut bad = generate_partitions(8, Strategy::Greedy, 0).unwrap();
    let lvl = bad.levels.iter_mut().find(|p| p.n == 5).unwrap();
    let moved = lvl.nabla.remove(1);
    let mut merged = lvl.nabla[0].clone();
    merged.extend(moved);
    merged.sort_unstable();
    lvl.nabla[0] = merged.clone();
    let report = verify_lemma2(&bad, 5).unwrap();
    assert!(!report.passed());
    assert!(
        report.violations.iter().any(|v| matches!(
            v,
            Lemma2Violation::ImageSplit { block, .. } if block == &merged
        )),
        "witness names the merged block; got {:?}",
        report.violations.first()
    );
    pass(
        7,
        "greedy partitions certify properties (1)-(3) with m_n >= max(1, ceil(2^{n/8-2})) \
         for n <= 20; a merged block is rejected with a correct image-split witness",
    );
}

/// Criterion 8: for every block of the level-(n+1) grouping, 3 <= n <= 8,
/// the lift-restrict-embed composite equals the restricted difference
/// operator exactly, and 20 seeded random trace probes per block stay below
/// residual 1e-10.
#[test]
fn criterion_08_block_factorization() {
    let parts = generate_partitions(11, Strategy::Greedy, 0).unwrap();
    let mut blocks_total = 0usize;
    let mut worst = 0.0f64;
    for n in 3..=8u32 {
        for block in &parts.level(n + 1).unwrap().nabla {
            let cert = factorization_check(
                block,
                n,
                &parts,
                20,
                derive_seed(0xACCE97, &[n as u64, block[0]]),
            )
            .unwrap();
            assert!(cert.exact_match, "composite = target at n = {n}, {block:?}");
            assert!(cert.membership_verified);
            assert!(
                cert.max_cyclicity_residual < 1e-10,
                "residual {} at n = {n}, {block:?}",
                cert.max_cyclicity_residual
            );
            worst = worst.max(cert.max_cyclicity_residual);
            blocks_total += 1;
        }
    }
    pass(
        8,
        &format!(
            "factorization exact on all {blocks_total} blocks for n = 3..=8; \
             worst cyclicity residual {worst:.2e} over 20 probes per block"
        ),
    );
}

/// Criterion 9: 200 seeded families per block (dimension up to 8, block
/// cardinality up to 16) never push the regrouping ratio above 18.
#[test]
fn criterion_09_regrouping_inequality_sampling() {
    let mut max_seen = 0.0f64;
    let mut blocks_run = 0usize;

    // Real generated blocks: singletons at level 5 (dimension 8) and paired
    // blocks at level 9 (dimension 4).
    let greedy = generate_partitions(11, Strategy::Greedy, 0).unwrap();
    for (lvl, dim, count) in [(5u32, 8usize, 2usize), (9, 4, 4)] {
        let nabla = &greedy.level(lvl).unwrap().nabla;
        for block in nabla.iter().take(count) {
            let out = psi_sample_check(block, &greedy, dim, 200, derive_seed(9, &[lvl as u64, block[0]]))
                .unwrap();
            assert!(out.within_bound, "ratio {} on {block:?}", out.max_ratio);
            max_seen = max_seen.max(out.max_ratio);
            blocks_run += 1;
        }
    }

    // Synthetic 16-element block: coarsen the partition so one level-5 block
    // of cardinality 16 satisfies the image property, then sample at
    // dimension 8. This exercises nontrivial group collapses (shared image
    // indices with mixed coefficients).
    let mut coarse = generate_partitions(6, Strategy::Singleton, 0).unwrap();
    for lvl in [4u32, 5, 6] {
        let pair = coarse.levels.iter_mut().find(|p| p.n == lvl).unwrap();
        let whole: Vec<u64> = pair.delta.iter().flatten().copied().collect();
        pair.delta = vec![whole];
    }
    let big_block: Vec<u64> = (32..48).collect();
    let out = psi_sample_check(&big_block, &coarse, 8, 200, 0xBEEF).unwrap();
    assert!(out.within_bound, "ratio {} on the 16-block", out.max_ratio);
    assert!(
        out.max_ratio > 10.0,
        "collapsing groups should exceed the coefficient-mass ratio; got {}",
        out.max_ratio
    );
    max_seen = max_seen.max(out.max_ratio);
    blocks_run += 1;

    pass(
        9,
        &format!(
            "no ratio above 18 over {blocks_run} blocks x 200 seeded families \
             (max observed {max_seen:.6})"
        ),
    );
}

/// Criterion 10: the per-level middle bound stays below 36/m^{1/4} for
/// 3 <= n <= 12; with singleton groupings the level bound is exactly
/// 18 <= 36; partial sums are reported with the asymptotic-only caveat.
#[test]
fn criterion_10_difference_bound_chain() {
    let greedy = generate_partitions(14, Strategy::Greedy, 0).unwrap();
    let mut partial_middle = 0.0f64;
    let mut partial_final = 0.0f64;
    for n in 3..=12u32 {
        let b = condition_iii_bound(n, &greedy).unwrap();
        assert!(
            b.holds(),
            "middle {} vs final {} at n = {n}",
            b.middle,
            b.final_bound
        );
        partial_middle += b.middle;
        partial_final += b.final_bound;
        assert!(partial_middle <= partial_final);
    }

    let singleton = generate_partitions(14, Strategy::Singleton, 0).unwrap();
    for n in 3..=12u32 {
        let b = condition_iii_bound(n, &singleton).unwrap();
        assert_eq!(b.middle, 18.0, "singleton middle at n = {n}");
        assert_eq!(b.final_bound, 36.0, "singleton final at n = {n}");
    }

    // The report carries the partial sums and the honesty caveat.
    let opts = ReportOptions {
        n_max: 4,
        cyclicity_trials: 2,
        psi_samples: 2,
        ..ReportOptions::default()
    };
    let report = full_report(&generate_partitions(7, Strategy::Singleton, 0).unwrap(), &opts).unwrap();
    let top = report.levels.last().unwrap();
    assert!(top.partial_sum_middle.is_some() && top.partial_sum_final.is_some());
    assert!(report
        .informational
        .iter()
        .any(|i| i.contains("asymptotic") && i.contains("reported, not certified")));
    pass(
        10,
        &format!(
            "middle <= 36/m^(1/4) for n = 3..=12 (greedy partial sums: middle {partial_middle:.4}, \
             final {partial_final:.4}); singleton levels give exactly 18 <= 36; caveat present"
        ),
    );
}

/// Supporting check for the factorization criterion: foreign blocks and
/// wrong levels are rejected before any arithmetic runs.
#[test]
fn factorization_rejects_bad_inputs() {
    let parts = generate_partitions(8, Strategy::Greedy, 0).unwrap();
    let err = factorization_check(&[40, 41], 4, &parts, 5, 0).unwrap_err();
    assert!(matches!(err, Error::Precondition(_) | Error::Input(_)));
    let block = parts.level(5).unwrap().nabla[0].clone();
    assert_eq!(level(block[0]).unwrap(), 5);
    let err = factorization_check(&block, 5, &parts, 5, 0).unwrap_err();
    assert!(matches!(err, Error::Input(_)));
}

/// Supporting check: the degenerate all-zero family is always evaluated
/// first and contributes ratio 0 by convention.
#[test]
fn zero_family_convention_holds() {
    let parts = generate_partitions(6, Strategy::Singleton, 0).unwrap();
    let out = psi_sample_check(&[16], &parts, 3, 1, 0).unwrap();
    // One random family plus the zero family; the max comes from the random
    // one and the zero family cannot produce NaN or inflate the ratio.
    assert!(out.max_ratio.is_finite());
    assert!(out.within_bound);
}

/// Supporting check: an all-zero vector never sneaks into the generating
/// family (windows, scaling, and supports are consistent).
#[test]
fn generating_vectors_are_well_formed() {
    for i in [1u64, 2, 3, 4, 31, 32, 1023] {
        let z = z_vector(i).unwrap();
        assert_eq!(z.support_len(), 6);
        assert_eq!(z.norm_sq(), Dyadic::from_int(6));
        let lo = z.min_index().unwrap();
        let hi = z.max_index().unwrap();
        assert_eq!(lo, 2 * i);
        assert_eq!(hi, 4 * i + 3);
    }
}
