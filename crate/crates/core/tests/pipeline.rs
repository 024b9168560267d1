//! End-to-end checks across the public modules.

use primpair::bounds::{best_sieve, best_sieve_with, CoreMode};
use primpair::charsums::{nf_char_formula, property_audit};
use primpair::ffcore::{factorize, prime_power_iter, FieldCtx};
use primpair::polyrat::{enumerate_family, Family};
use primpair::search::{exception_scan, pair_exists, q_in_q, PairWitness, ScanConfig, Verdict};

#[test]
fn witnesses_are_primitive() {
    for q in [7u64, 16, 27, 49, 64, 81] {
        let ctx = FieldCtx::from_order(q).unwrap();
        for f in enumerate_family(&ctx, 1, 1).unwrap().step_by(97).take(40) {
            if let PairWitness::Found { alpha, f_alpha, alpha_dlog, falpha_dlog } = pair_exists(&ctx, &f).unwrap() {
                assert!(ctx.is_primitive(alpha) && ctx.is_primitive(f_alpha));
                assert_eq!(f.eval(alpha, &ctx), Some(f_alpha));
                assert_eq!(ctx.exp_of(alpha_dlog), alpha);
                assert_eq!(ctx.exp_of(falpha_dlog), f_alpha);
            }
        }
    }
}

#[test]
fn pair_count_matches_character_expansion() {
    // N_f(q-1, q-1) is the number of primitive pairs
    let ctx = FieldCtx::from_order(25).unwrap();
    let m = ctx.order();
    for f in enumerate_family(&ctx, 2, 0).unwrap().step_by(131).take(30) {
        let n = nf_char_formula(&ctx, &f, m, m).unwrap();
        let found = pair_exists(&ctx, &f).unwrap().is_found();
        assert_eq!(n > 0, found, "{}", f.display(&ctx));
    }
}

#[test]
fn scan_verdicts_agree_with_bounds() {
    let (records, summary) = exception_scan(3, 5000, &ScanConfig { candidates_only: false, ..ScanConfig::default() }).unwrap();
    assert_eq!(summary.scanned as usize, records.len());
    assert_eq!(records.len(), prime_power_iter(3, 5000).count());
    for r in &records {
        let sieve = best_sieve(r.q, 2).unwrap().pass;
        match r.verdict {
            Verdict::Candidate => assert!(!sieve),
            Verdict::PassSieve => assert!(sieve),
            Verdict::PassThm31 => {}
        }
    }
}

#[test]
fn prefix_cores_never_beat_exact_cores() {
    for pp in prime_power_iter(3, 20000) {
        let fact = factorize(pp.q - 1).unwrap();
        let exact = best_sieve_with(pp.q, &fact, 2, CoreMode::Exact).unwrap();
        let prefix = best_sieve_with(pp.q, &fact, 2, CoreMode::Prefix).unwrap();
        assert!(exact.pass || !prefix.pass, "q={}", pp.q);
    }
}

#[test]
fn membership_of_small_exceptions() {
    for (q, member) in [(3u64, false), (29, false), (47, true), (53, true)] {
        let ctx = FieldCtx::from_order(q).unwrap();
        assert_eq!(q_in_q(&ctx, Family::LINEAR_FRACTIONAL).unwrap().member, member, "q={q}");
    }
}

#[test]
fn audit_runs_clean() {
    assert!(property_audit(7, 100).ok());
}
