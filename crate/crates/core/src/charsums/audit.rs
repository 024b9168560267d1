use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{nf_char_formula_all, nf_direct_count, rho_u, weil_bound_check, MultChar};
use crate::ffcore::arith::gcd;
use crate::ffcore::{prime_power_iter, Elem, FieldCtx};
use crate::polyrat::{is_constant_times_power, is_exceptional, Poly, RationalFunc};

/// Fields audited: every `q ≤ AUDIT_Q_MAX`.
pub const AUDIT_Q_MAX: u64 = 121;

#[derive(Clone, Debug, Default, Serialize)]
pub struct AuditReport {
    pub seed: u64,
    pub weil_checked: u64,
    /// Largest `|S| / bound` seen.
    pub weil_worst_ratio: f64,
    pub nf_checked: u64,
    pub rho_checked: u64,
    pub failures: Vec<String>,
}

impl AuditReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

fn random_poly(ctx: &FieldCtx, rng: &mut ChaCha8Rng, deg: usize, monic: bool) -> Poly {
    let mut c: Vec<Elem> = (0..deg).map(|_| ctx.from_index(rng.gen_range(0..ctx.q())).expect("in range")).collect();
    c.push(if monic { Elem::ONE } else { ctx.from_index(rng.gen_range(1..ctx.q())).expect("in range") });
    Poly::new(c)
}

fn random_func(ctx: &FieldCtx, rng: &mut ChaCha8Rng) -> Option<RationalFunc> {
    let n1 = rng.gen_range(0..=4);
    let n2 = rng.gen_range(0..=4 - n1);
    let num = random_poly(ctx, rng, n1, false);
    let den = random_poly(ctx, rng, n2, true);
    RationalFunc::new(num, den, ctx).ok().filter(|f| f.degree() > 0)
}

/// Draws `cases` random `(q, χ, F)` and checks the Weil bound on each; every
/// tenth case also checks the `N_f` expansion against a direct count and
/// `ρ_u` against the u-free test. Fully determined by `seed`.
pub fn property_audit(seed: u64, cases: u64) -> AuditReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fields: Vec<FieldCtx> = prime_power_iter(3, AUDIT_Q_MAX)
        .map(|pp| FieldCtx::from_order(pp.q).expect("small field"))
        .collect();
    let mut report = AuditReport { seed, ..AuditReport::default() };
    while report.weil_checked < cases {
        let ctx = &fields[rng.gen_range(0..fields.len())];
        let Some(f) = random_func(ctx, &mut rng) else { continue };
        let orders: Vec<u64> = ctx.order_factorization().squarefree_divisors().into_iter().filter(|&d| d > 1).collect();
        let d = orders[rng.gen_range(0..orders.len())];
        if is_constant_times_power(ctx, &f, d) {
            continue;
        }
        let k = loop {
            let k = rng.gen_range(1..d);
            if gcd(k, d) == 1 {
                break k;
            }
        };
        let chi = MultChar::new(ctx, d, k).expect("d divides q-1");
        let tag = format!("q={} F={} d={d} k={k}", ctx.q(), f.display(ctx));
        match weil_bound_check(ctx, &chi, &f) {
            Ok(w) => {
                if !w.ok {
                    report.failures.push(format!("weil: {tag}: |S|={:.6} > {:.6}", w.abs, w.bound));
                }
                if w.bound > 0.0 {
                    report.weil_worst_ratio = report.weil_worst_ratio.max(w.abs / w.bound);
                }
            }
            Err(e) => report.failures.push(format!("weil: {tag}: {e}")),
        }
        report.weil_checked += 1;
        if report.weil_checked % 10 != 0 {
            continue;
        }
        if !is_exceptional(ctx, &f).0 {
            match nf_char_formula_all(ctx, &f) {
                Ok(rows) => {
                    for (l1, l2, n) in rows {
                        let direct = nf_direct_count(ctx, &f, l1, l2).expect("divisors of q-1");
                        if n != direct as i64 {
                            report.failures.push(format!("nf: {tag} l=({l1},{l2}): {n} != {direct}"));
                        }
                    }
                    report.nf_checked += 1;
                }
                Err(e) => report.failures.push(format!("nf: {tag}: {e}")),
            }
        }
        let alpha = ctx.from_index(rng.gen_range(1..ctx.q())).expect("in range");
        for u in ctx.order_factorization().divisors() {
            let rho = rho_u(ctx, alpha, u).expect("u divides q-1");
            let free = ctx.is_ufree(alpha, u).expect("u divides q-1");
            if rho != num_rational::Ratio::from_integer(i128::from(free)) {
                report.failures.push(format!("rho: q={} alpha={} u={u}: {rho}", ctx.q(), alpha.index()));
            }
            report.rho_checked += 1;
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn audit_is_clean_and_reproducible() {
        let a = property_audit(0, 200);
        assert!(a.ok(), "{:?}", a.failures);
        assert!(a.nf_checked > 10 && a.nf_checked <= 20);
        assert!(a.weil_worst_ratio <= 1.0 + 1e-9, "{}", a.weil_worst_ratio);
        let json = |r: &AuditReport| serde_json::to_string(r).unwrap();
        assert_eq!(json(&a), json(&property_audit(0, 200)));
        assert_ne!(json(&a), json(&property_audit(1, 200)));
    }
}
