//! Multiplicative characters of `F_q*` and the character sums built on them:
//! the u-free indicator `ρ_u`, the mixed sums `χ_f(χ1, χ2)`, the expansion of
//! `N_f(l1, l2)`, and an empirical audit of the Weil bound.
//!
//! Convention: every character, the trivial one included, vanishes at 0. Sums
//! over `α` skip poles of `f`, `α = 0` wherever `α` itself is an argument, and
//! `f(α) = 0`.

mod audit;
mod cyclo;

pub use audit::{property_audit, AuditReport, AUDIT_Q_MAX};
pub use cyclo::CycloSum;

use num_rational::Ratio;
use serde::Serialize;
use thiserror::Error;

use crate::ffcore::arith::{gcd, lcm};
use crate::ffcore::{Elem, FieldCtx, FieldError};
use crate::polyrat::{is_constant_times_power, is_exceptional, squarefree_decomp, RationalFunc};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CharError {
    #[error("characters belong to different fields")]
    MismatchedField,
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("character order {order} with index {index} is invalid here: {reason}")]
    BadCharacter { order: u64, index: u64, reason: &'static str },
    #[error("Weil bound inapplicable: {0}")]
    Inapplicable(String),
    #[error("rational function is exceptional")]
    Exceptional,
    #[error("ρ_u is defined on F_q* only")]
    ZeroArgument,
}

/// The character `χ(g^t) = ζ_d^{k t}` of order dividing `d`; its precise
/// order is `d` iff `gcd(k, d) = 1`.
#[derive(Clone, Copy, Debug)]
pub struct MultChar<'a> {
    ctx: &'a FieldCtx,
    order: u64,
    index: u64,
}

impl<'a> MultChar<'a> {
    pub fn new(ctx: &'a FieldCtx, order: u64, index: u64) -> Result<MultChar<'a>, CharError> {
        if order == 0 || ctx.order() % order != 0 {
            return Err(FieldError::NotDivisor { u: order, order: ctx.order() }.into());
        }
        if index >= order {
            return Err(CharError::BadCharacter { order, index, reason: "index must be below the order" });
        }
        Ok(MultChar { ctx, order, index })
    }

    pub fn trivial(ctx: &'a FieldCtx) -> MultChar<'a> {
        MultChar { ctx, order: 1, index: 0 }
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn is_precise(&self) -> bool {
        gcd(self.index, self.order) == 1
    }

    /// `r` with `χ(a) = ζ_d^r`; `None` at zero.
    pub fn exponent(&self, a: Elem) -> Option<u64> {
        self.ctx
            .dlog(a)
            .map(|t| (t % self.order) * self.index % self.order)
    }

    fn same_field(&self, other: &FieldCtx) -> bool {
        std::ptr::eq(self.ctx, other)
    }
}

/// `χ_f(χ1, χ2) = Σ_{α ∉ S} χ1(α) χ2(f(α))`, accumulated mod `lcm(d1, d2)`.
pub fn chi_f(
    ctx: &FieldCtx,
    chi1: &MultChar<'_>,
    chi2: &MultChar<'_>,
    f: &RationalFunc,
) -> Result<CycloSum, CharError> {
    if !chi1.same_field(ctx) || !chi2.same_field(ctx) {
        return Err(CharError::MismatchedField);
    }
    let m = lcm(chi1.order, chi2.order);
    let (s1, s2) = (m / chi1.order, m / chi2.order);
    let mut sum = CycloSum::new(m);
    for alpha in ctx.nonzero() {
        let Some(v) = f.eval(alpha, ctx) else { continue };
        let (Some(e1), Some(e2)) = (chi1.exponent(alpha), chi2.exponent(v)) else { continue };
        sum.push(e1 * s1 + e2 * s2);
    }
    Ok(sum)
}

#[derive(Clone, Debug, Serialize)]
pub struct WeilCheck {
    pub sum: CycloSum,
    pub abs: f64,
    /// `(deg rad(F1·F2) − 1)·√q`.
    pub bound: f64,
    pub ok: bool,
}

/// Evaluates `|Σ_{F(α) ≠ ∞} χ(F(α))|` and compares it with
/// `(Σ deg F_j − 1)·√q`, where `F_j` runs over the distinct irreducible
/// factors of numerator and denominator. `χ` must have precise square-free
/// order `d > 1` and `F` must not be `c·G^d`.
pub fn weil_bound_check(
    ctx: &FieldCtx,
    chi: &MultChar<'_>,
    func: &RationalFunc,
) -> Result<WeilCheck, CharError> {
    if !chi.same_field(ctx) {
        return Err(CharError::MismatchedField);
    }
    let d = chi.order;
    if d <= 1 || !crate::ffcore::factorize(d)?.is_squarefree() || !chi.is_precise() {
        return Err(CharError::BadCharacter {
            order: d,
            index: chi.index,
            reason: "need precise square-free order d > 1",
        });
    }
    if is_constant_times_power(ctx, func, d) {
        return Err(CharError::Inapplicable(format!("F is a constant times a {d}-th power")));
    }
    let mut sum = CycloSum::new(d);
    for alpha in ctx.elements() {
        if let Some(e) = func.eval(alpha, ctx).and_then(|v| chi.exponent(v)) {
            sum.push(e);
        }
    }
    let distinct: usize = [func.num(), func.den()]
        .iter()
        .map(|p| squarefree_decomp(p, ctx).expect("nonzero").radical_degree())
        .sum();
    let bound = (distinct as f64 - 1.0) * (ctx.q() as f64).sqrt();
    let abs = sum.abs();
    Ok(WeilCheck { ok: abs <= bound + 1e-6, abs, bound, sum })
}

/// `Σ_{χ of precise order d} χ(g^t)`, exactly: the residues `k·t mod d` over
/// units `k` form a Galois-stable multiset.
pub fn character_family_sum(d: u64, t: u64) -> i64 {
    let mut s = CycloSum::new(d);
    for k in (0..d).filter(|&k| gcd(k, d) == 1) {
        s.push(k * (t % d) % d);
    }
    s.exact_integer().expect("Galois-stable by construction")
}

/// Table `S_d(t mod d)` for every square-free `d | q−1`, with `μ(d)` and `φ(d)`.
struct FamilyTables {
    entries: Vec<(u64, i64, u64, Vec<i64>)>,
}

impl FamilyTables {
    fn new(ctx: &FieldCtx) -> FamilyTables {
        let fact = ctx.order_factorization();
        let entries = fact
            .squarefree_divisors()
            .into_iter()
            .map(|d| {
                let df = fact.of_divisor(d).expect("divisor");
                let table = (0..d).map(|t| character_family_sum(d, t)).collect();
                (d, df.mu(), df.phi(), table)
            })
            .collect();
        FamilyTables { entries }
    }

    fn for_divisor(&self, l: u64) -> impl Iterator<Item = &(u64, i64, u64, Vec<i64>)> {
        self.entries.iter().filter(move |(d, ..)| l % d == 0)
    }
}

fn theta(ctx: &FieldCtx, l: u64) -> Result<Ratio<i128>, CharError> {
    let lf = ctx
        .order_factorization()
        .of_divisor(l)
        .ok_or(FieldError::NotDivisor { u: l, order: ctx.order() })?;
    Ok(Ratio::new(lf.phi() as i128, l as i128))
}

/// `ρ_u(α) = θ(u) Σ_{d|u} μ(d)/φ(d) Σ_{χ_d} χ_d(α)`, evaluated exactly.
/// The result is 1 when `α` is u-free and 0 otherwise.
pub fn rho_u(ctx: &FieldCtx, alpha: Elem, u: u64) -> Result<Ratio<i128>, CharError> {
    let th = theta(ctx, u)?;
    let t = ctx.dlog(alpha).ok_or(CharError::ZeroArgument)?;
    let fact = ctx.order_factorization().of_divisor(u).expect("checked by theta");
    let mut acc = Ratio::from_integer(0i128);
    for d in fact.squarefree_divisors() {
        let df = fact.of_divisor(d).expect("divisor");
        let inner = character_family_sum(d, t);
        acc += Ratio::new(df.mu() as i128 * inner as i128, df.phi() as i128);
    }
    Ok(th * acc)
}

fn check_nf_inputs(ctx: &FieldCtx, f: &RationalFunc, l1: u64, l2: u64) -> Result<(Ratio<i128>, Ratio<i128>), CharError> {
    let t1 = theta(ctx, l1)?;
    let t2 = theta(ctx, l2)?;
    if is_exceptional(ctx, f).0 {
        return Err(CharError::Exceptional);
    }
    Ok((t1, t2))
}

/// `(dlog α, dlog f(α))` over the admissible `α`: not a pole, `α ≠ 0`,
/// `f(α) ≠ 0`.
fn admissible_logs(ctx: &FieldCtx, f: &RationalFunc) -> Vec<(u64, u64)> {
    ctx.nonzero()
        .filter_map(|a| {
            let v = f.eval(a, ctx)?;
            Some((ctx.dlog(a)?, ctx.dlog(v)?))
        })
        .collect()
}

fn into_integer(v: Ratio<i128>) -> i64 {
    assert!(v.is_integer(), "character expansion produced a non-integer {v}");
    *v.numer() as i64
}

/// `N_f(l1, l2)` from its character expansion
/// `θ(l1)θ(l2) Σ_{d1|l1, d2|l2} μ(d1)μ(d2)/(φ(d1)φ(d2)) Σ_{χ_d1, χ_d2} χ_f(χ_d1, χ_d2)`,
/// with each inner family sum factored as `Σ_α S_d1(dlog α)·S_d2(dlog f(α))`.
pub fn nf_char_formula(ctx: &FieldCtx, f: &RationalFunc, l1: u64, l2: u64) -> Result<i64, CharError> {
    let (t1, t2) = check_nf_inputs(ctx, f, l1, l2)?;
    let logs = admissible_logs(ctx, f);
    let tables = FamilyTables::new(ctx);
    Ok(nf_from_tables(&tables, &logs, l1, l2, t1 * t2))
}

fn nf_from_tables(tables: &FamilyTables, logs: &[(u64, u64)], l1: u64, l2: u64, theta: Ratio<i128>) -> i64 {
    let mut acc = Ratio::from_integer(0i128);
    for (d1, mu1, phi1, s1) in tables.for_divisor(l1) {
        for (d2, mu2, phi2, s2) in tables.for_divisor(l2) {
            let inner: i64 = logs
                .iter()
                .map(|&(a, b)| s1[(a % d1) as usize] * s2[(b % d2) as usize])
                .sum();
            acc += Ratio::new((mu1 * mu2) as i128 * inner as i128, (*phi1 * *phi2) as i128);
        }
    }
    into_integer(theta * acc)
}

/// `N_f(l1, l2)` for every pair of divisors of `q−1`, sharing one table
/// build. Returned in `(l1, l2)` order over the sorted divisor list.
pub fn nf_char_formula_all(ctx: &FieldCtx, f: &RationalFunc) -> Result<Vec<(u64, u64, i64)>, CharError> {
    if is_exceptional(ctx, f).0 {
        return Err(CharError::Exceptional);
    }
    let logs = admissible_logs(ctx, f);
    let tables = FamilyTables::new(ctx);
    let divs = ctx.order_factorization().divisors();
    let mut out = Vec::with_capacity(divs.len() * divs.len());
    for &l1 in &divs {
        for &l2 in &divs {
            let th = theta(ctx, l1)? * theta(ctx, l2)?;
            out.push((l1, l2, nf_from_tables(&tables, &logs, l1, l2, th)));
        }
    }
    Ok(out)
}

/// The same expansion, summing `χ_f` literally over every pair of characters
/// of precise orders `d1`, `d2`. Quadratic in `q`; intended for small fields.
pub fn nf_char_formula_by_characters(
    ctx: &FieldCtx,
    f: &RationalFunc,
    l1: u64,
    l2: u64,
) -> Result<i64, CharError> {
    let (t1, t2) = check_nf_inputs(ctx, f, l1, l2)?;
    let fact = ctx.order_factorization();
    let mut acc = Ratio::from_integer(0i128);
    for d1 in fact.squarefree_divisors().into_iter().filter(|d| l1 % d == 0) {
        for d2 in fact.squarefree_divisors().into_iter().filter(|d| l2 % d == 0) {
            let f1 = fact.of_divisor(d1).expect("divisor");
            let f2 = fact.of_divisor(d2).expect("divisor");
            let mut family = CycloSum::new(lcm(d1, d2));
            for k1 in (0..d1).filter(|&k| gcd(k, d1) == 1) {
                for k2 in (0..d2).filter(|&k| gcd(k, d2) == 1) {
                    let c1 = MultChar::new(ctx, d1, k1)?;
                    let c2 = MultChar::new(ctx, d2, k2)?;
                    family.merge(&chi_f(ctx, &c1, &c2, f)?);
                }
            }
            let inner = family.exact_integer().expect("sum over full Galois orbits");
            acc += Ratio::new(
                (f1.mu() * f2.mu()) as i128 * inner as i128,
                (f1.phi() * f2.phi()) as i128,
            );
        }
    }
    Ok(into_integer(t1 * t2 * acc))
}

/// `|{α ∉ S : α is l1-free and f(α) is l2-free}|` by direct counting.
pub fn nf_direct_count(ctx: &FieldCtx, f: &RationalFunc, l1: u64, l2: u64) -> Result<u64, CharError> {
    let r1 = ctx.radical_of_divisor(l1)?;
    let r2 = ctx.radical_of_divisor(l2)?;
    let mut n = 0;
    for alpha in ctx.nonzero() {
        let Some(v) = f.eval(alpha, ctx) else { continue };
        let (Some(a), Some(b)) = (ctx.dlog(alpha), ctx.dlog(v)) else { continue };
        if gcd(a, r1) == 1 && gcd(b, r2) == 1 {
            n += 1;
        }
    }
    Ok(n)
}
