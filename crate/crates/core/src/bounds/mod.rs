//! Closed-form sufficient conditions for `q ∈ Q_n`: the `W(q−1)` test, the
//! prime sieve with an exact factorization of `q−1`, the analytic worst-case
//! passes over a range of `ω(q−1)`, and the generic constant `C_n`.
//!
//! Every certifying comparison is done on integers: `√q > T` is checked as
//! `q·den² > num²` for `T = num/den`.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use std::cmp::Ordering;
use std::fmt;
use thiserror::Error;

use crate::ffcore::sieve::small_primes;
use crate::ffcore::{factorize, prime_power, Factorization, FieldError};

/// Supremum of `c_m` over all `m`, as printed to three decimals.
pub const C_M_SUP: f64 = 37.469;
/// Supremum of `c_m` over odd `m`.
pub const C_M_ODD_SUP: f64 = 21.029;
/// Largest `ω(q−1)` for which all core subsets are enumerated.
pub const MAX_SUBSET_OMEGA: u32 = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoundsError {
    #[error("{0}")]
    Domain(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("ω(q−1) = {0} is above the subset enumeration cap of {MAX_SUBSET_OMEGA}")]
    TooManyPrimes(u32),
}

/// `√q > n·W(q−1)²`, evaluated as `q > n²·W⁴`.
pub fn theorem31_check(n: u64, q: u64, w: u64) -> bool {
    let rhs = (n as u128)
        .checked_mul(n as u128)
        .and_then(|v| v.checked_mul((w as u128).pow(2)))
        .and_then(|v| v.checked_mul((w as u128).pow(2)));
    match rhs {
        Some(r) => (q as u128) > r,
        None => false,
    }
}

/// `c_m = 2^s / (p_1⋯p_s)^{1/6}` over the distinct primes `p_i < 64` dividing `m`.
pub fn c_m(m: &Factorization) -> f64 {
    c_m_of_primes(m.primes())
}

/// `c_m` from the distinct primes of `m`, for `m` beyond `u64`.
pub fn c_m_of_primes(primes: impl IntoIterator<Item = u64>) -> f64 {
    let small: Vec<u64> = primes.into_iter().filter(|&p| p < 64).collect();
    let prod: f64 = small.iter().map(|&p| p as f64).product();
    2f64.powi(small.len() as i32) / prod.powf(1.0 / 6.0)
}

/// `W(m) ≤ c_m·m^{1/6}`, checked exactly as `2^{6(ω−s)}·P ≤ m` where `P` is
/// the product of the primes of `m` below 64 and `s` their number.
pub fn wm_bound_check(m: &Factorization) -> bool {
    let big: u32 = m.primes().filter(|&p| p >= 64).count() as u32;
    let small: u128 = m.primes().filter(|&p| p < 64).map(|p| p as u128).product();
    let lhs = BigUint::from(2u32).pow(6 * big) * BigUint::from(small);
    lhs <= BigUint::from(m.value())
}

/// The generic constant `n⁶·C_M_SUP¹²`; reporting only.
pub fn generic_cn(n: u64) -> Result<f64, BoundsError> {
    if n < 2 {
        return Err(BoundsError::Domain(format!("C_n needs n >= 2, got {n}")));
    }
    Ok((n as f64).powi(6) * C_M_SUP.powi(12))
}

/// Product `Π a_i` compared with `Π b_i`, widening to big integers only when
/// a `u128` product overflows.
fn cmp_products(a: &[u128], b: &[u128]) -> Ordering {
    fn narrow(v: &[u128]) -> Option<u128> {
        v.iter().try_fold(1u128, |acc, &x| acc.checked_mul(x))
    }
    fn wide(v: &[u128]) -> BigUint {
        v.iter().fold(BigUint::one(), |acc, &x| acc * BigUint::from(x))
    }
    match (narrow(a), narrow(b)) {
        (Some(x), Some(y)) => x.cmp(&y),
        _ => wide(a).cmp(&wide(b)),
    }
}

/// `Δ = M/N` for a set of sieved primes, with `D = Π p_i`,
/// `N = D·δ = D − 2Σ D/p_i` and `M = (2s−1)·D + 2N`. `None` when `δ ≤ 0`.
/// `s = 0` gives `Δ = 1`.
fn delta_terms(sieved: &[u64]) -> Option<(u128, u128)> {
    if sieved.is_empty() {
        return Some((1, 1));
    }
    let d: u128 = sieved.iter().map(|&p| p as u128).product();
    let sub: u128 = sieved.iter().map(|&p| 2 * (d / p as u128)).sum();
    if sub >= d {
        return None;
    }
    let nn = d - sub;
    let s = sieved.len() as u128;
    Some(((2 * s - 1) * d + 2 * nn, nn))
}

/// Criterion data for one core: `T = weight·M/N = n·Δ·W(l)²`.
#[derive(Clone, Copy, Debug)]
struct Threshold {
    weight: u128,
    m: u128,
    n: u128,
}

impl Threshold {
    fn new(n: u64, core_len: usize, sieved: &[u64]) -> Option<Threshold> {
        let (m, nn) = delta_terms(sieved)?;
        Some(Threshold { weight: (n as u128) << (2 * core_len), m, n: nn })
    }

    /// `√q > T`.
    fn passes(&self, q: u64) -> bool {
        cmp_products(&[q as u128, self.n, self.n], &[self.weight, self.m, self.weight, self.m])
            == Ordering::Greater
    }

    fn cmp(&self, other: &Threshold) -> Ordering {
        cmp_products(&[self.weight, self.m, other.n], &[other.weight, other.m, self.n])
    }

    fn value(&self) -> BigRational {
        BigRational::new(
            BigInt::from(self.weight) * BigInt::from(self.m),
            BigInt::from(self.n),
        )
    }
}

/// Which cores the sieve may use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoreMode {
    /// Every subset of the primes of `q−1`, the empty core included.
    #[default]
    Exact,
    /// Only the `r` least primes of `q−1` for `1 ≤ r ≤ ω(q−1)`.
    Prefix,
}

impl fmt::Display for CoreMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CoreMode::Exact => "exact",
            CoreMode::Prefix => "prefix",
        })
    }
}

/// A split of the primes of `q−1` into the core (primes of `l`) and the
/// sieved primes `p_1, …, p_s`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SieveParams {
    pub q: u64,
    pub factorization: Factorization,
    pub core: Vec<u64>,
    pub sieved: Vec<u64>,
}

impl SieveParams {
    /// Splits the primes of `q−1` by `core`, which must be a subset of them.
    pub fn new(q: u64, factorization: Factorization, core: &[u64]) -> Result<SieveParams, BoundsError> {
        if factorization.value() != q - 1 {
            return Err(BoundsError::Domain(format!(
                "factorization of {} given for q = {q}",
                factorization.value()
            )));
        }
        let primes: Vec<u64> = factorization.primes().collect();
        if let Some(p) = core.iter().find(|p| !primes.contains(p)) {
            return Err(BoundsError::Domain(format!("{p} does not divide q−1 = {}", q - 1)));
        }
        let core: Vec<u64> = primes.iter().copied().filter(|p| core.contains(p)).collect();
        let sieved = primes.iter().copied().filter(|p| !core.contains(p)).collect();
        Ok(SieveParams { q, factorization, core, sieved })
    }

    pub fn s(&self) -> usize {
        self.sieved.len()
    }

    /// `W(l) = 2^{|core|}`.
    pub fn w_l(&self) -> u64 {
        1 << self.core.len()
    }

    /// `δ = 1 − 2Σ 1/p_i`.
    pub fn delta(&self) -> BigRational {
        self.sieved.iter().fold(BigRational::one(), |acc, &p| {
            acc - BigRational::new(BigInt::from(2), BigInt::from(p))
        })
    }

    /// `Δ`, or `None` when `δ ≤ 0`.
    pub fn big_delta(&self) -> Option<BigRational> {
        let (m, n) = delta_terms(&self.sieved)?;
        Some(BigRational::new(BigInt::from(m), BigInt::from(n)))
    }

    fn threshold_terms(&self, n: u64) -> Option<Threshold> {
        Threshold::new(n, self.core.len(), &self.sieved)
    }

    /// `n·Δ·W(l)²`, or `None` when `δ ≤ 0`.
    pub fn threshold(&self, n: u64) -> Option<BigRational> {
        self.threshold_terms(n).map(|t| t.value())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SieveOutcome {
    Pass,
    Fail,
    Inapplicable,
}

#[derive(Clone, Debug, Serialize)]
pub struct SieveReport {
    pub outcome: SieveOutcome,
    /// `√q / (n·Δ·W(l)²)`; above 1 exactly when the criterion passes.
    pub margin: Option<f64>,
}

fn margin(q: u64, t: &BigRational) -> f64 {
    (q as f64).sqrt() / t.to_f64().unwrap_or(f64::INFINITY)
}

/// Evaluates `√q > n·Δ·W(l)²` for one split.
pub fn sieve_check(params: &SieveParams, n: u64) -> SieveReport {
    match params.threshold_terms(n) {
        None => SieveReport { outcome: SieveOutcome::Inapplicable, margin: None },
        Some(t) => SieveReport {
            outcome: if t.passes(params.q) { SieveOutcome::Pass } else { SieveOutcome::Fail },
            margin: Some(margin(params.q, &t.value())),
        },
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BestSieve {
    pub pass: bool,
    pub params: SieveParams,
    pub report: SieveReport,
}

fn core_masks(omega: u32, mode: CoreMode) -> Vec<u32> {
    match mode {
        CoreMode::Exact => (0..1u32 << omega).collect(),
        CoreMode::Prefix => (1..=omega).map(|r| (1u32 << r) - 1).collect(),
    }
}

fn mask_primes(primes: &[u64], mask: u32) -> Vec<u64> {
    primes.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p).collect()
}

/// Whether some admissible core passes; cheaper than [`best_sieve_with`].
pub fn sieve_passes(q: u64, factorization: &Factorization, n: u64, mode: CoreMode) -> Result<bool, BoundsError> {
    let primes: Vec<u64> = factorization.primes().collect();
    let omega = primes.len() as u32;
    if omega > MAX_SUBSET_OMEGA && mode == CoreMode::Exact {
        return Err(BoundsError::TooManyPrimes(omega));
    }
    let mut sieved = Vec::with_capacity(primes.len());
    for mask in core_masks(omega, mode) {
        sieved.clear();
        sieved.extend(primes.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 0).map(|(_, &p)| p));
        if let Some(t) = Threshold::new(n, mask.count_ones() as usize, &sieved) {
            if t.passes(q) {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// The core with the smallest `n·Δ·W(l)²` (largest margin) among the
/// admissible ones, ties going to the lexicographically smallest core;
/// cores with `δ ≤ 0` are skipped.
pub fn best_sieve_with(
    q: u64,
    factorization: &Factorization,
    n: u64,
    mode: CoreMode,
) -> Result<BestSieve, BoundsError> {
    let primes: Vec<u64> = factorization.primes().collect();
    let omega = primes.len() as u32;
    if omega > MAX_SUBSET_OMEGA && mode == CoreMode::Exact {
        return Err(BoundsError::TooManyPrimes(omega));
    }
    let mut best: Option<(Threshold, Vec<u64>)> = None;
    for mask in core_masks(omega, mode) {
        let sieved: Vec<u64> = mask_primes(&primes, !mask);
        let Some(t) = Threshold::new(n, mask.count_ones() as usize, &sieved) else { continue };
        let better = match &best {
            None => true,
            Some((bt, bcore)) => match t.cmp(bt) {
                Ordering::Less => true,
                Ordering::Equal => mask_primes(&primes, mask) < *bcore,
                Ordering::Greater => false,
            },
        };
        if better {
            best = Some((t, mask_primes(&primes, mask)));
        }
    }
    let (_, core) = best.expect("the full core is always admissible");
    let params = SieveParams::new(q, factorization.clone(), &core)?;
    let report = sieve_check(&params, n);
    Ok(BestSieve { pass: report.outcome == SieveOutcome::Pass, params, report })
}

/// [`best_sieve_with`] in exact mode, factorizing `q−1`.
pub fn best_sieve(q: u64, n: u64) -> Result<BestSieve, BoundsError> {
    if q < 3 || prime_power(q).is_none() {
        return Err(FieldError::NotPrimePower(q).into());
    }
    best_sieve_with(q, &factorize(q - 1)?, n, CoreMode::Exact)
}

/// The analytic pass for `a ≤ ω(q−1) ≤ b` with the `r` least primes in `l`:
/// the sieved primes are taken as small as possible, i.e. the `(r+1)`-th
/// through `b`-th primes.
#[derive(Clone, Debug, Serialize)]
pub struct PassSpec {
    pub n: u64,
    pub a: u32,
    pub b: u32,
    pub r: u32,
    pub sieved: Vec<u64>,
    #[serde(serialize_with = "ser_ratio")]
    pub delta_min: BigRational,
    #[serde(serialize_with = "ser_opt_ratio")]
    pub big_delta_max: Option<BigRational>,
    /// `n·Δ_max·W(l)²`.
    #[serde(serialize_with = "ser_opt_ratio")]
    pub threshold: Option<BigRational>,
}

fn ser_ratio<S: serde::Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn ser_opt_ratio<S: serde::Serializer>(v: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.serialize_str(&v.to_string()),
        None => s.serialize_none(),
    }
}

impl PassSpec {
    pub fn w_l(&self) -> u64 {
        1 << self.r
    }

    pub fn delta_f64(&self) -> f64 {
        self.delta_min.to_f64().unwrap_or(f64::NAN)
    }

    pub fn big_delta_f64(&self) -> Option<f64> {
        self.big_delta_max.as_ref().and_then(|v| v.to_f64())
    }

    pub fn threshold_f64(&self) -> Option<f64> {
        self.threshold.as_ref().and_then(|v| v.to_f64())
    }

    /// `threshold²`: the criterion certifies every `q` above it.
    pub fn q_bound(&self) -> Option<BigRational> {
        self.threshold.as_ref().map(|t| t * t)
    }

    /// `threshold < bound`, exactly.
    pub fn threshold_below(&self, bound: u64) -> bool {
        self.threshold
            .as_ref()
            .is_some_and(|t| *t < BigRational::from_integer(BigInt::from(bound)))
    }
}

pub fn worst_case_pass(n: u64, a: u32, b: u32, r: u32) -> Result<PassSpec, BoundsError> {
    if !(b >= a && a >= r) {
        return Err(BoundsError::Domain(format!("need b >= a >= r, got a={a} b={b} r={r}")));
    }
    if n < 1 {
        return Err(BoundsError::Domain("n must be positive".into()));
    }
    let primes = first_primes(b as usize);
    let sieved = primes[r as usize..].to_vec();
    let delta_min = sieved.iter().fold(BigRational::one(), |acc, &p| {
        acc - BigRational::new(BigInt::from(2), BigInt::from(p))
    });
    let big_delta_max = if sieved.is_empty() {
        Some(BigRational::one())
    } else if delta_min > BigRational::zero() {
        let s = BigInt::from(2 * sieved.len() as u64 - 1);
        Some(BigRational::from_integer(s) / &delta_min + BigRational::from_integer(BigInt::from(2)))
    } else {
        None
    };
    let weight = BigRational::from_integer(BigInt::from(n) * (BigInt::one() << (2 * r as usize)));
    let threshold = big_delta_max.as_ref().map(|d| d * &weight);
    Ok(PassSpec { n, a, b, r, sieved, delta_min, big_delta_max, threshold })
}

fn first_primes(count: usize) -> Vec<u64> {
    let mut limit = 64u64;
    loop {
        let ps = small_primes(limit);
        if ps.len() >= count {
            return ps[..count].to_vec();
        }
        limit *= 2;
    }
}

/// One printed row of a worst-case pass: `(n, a, b, r)`, the printed
/// `δ >` and `Δ <` values, and the integer the threshold stays below.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ReferencePass {
    pub n: u64,
    pub a: u32,
    pub b: u32,
    pub r: u32,
    pub delta: f64,
    pub big_delta: f64,
    pub threshold_below: u64,
}

const fn row(n: u64, a: u32, b: u32, r: u32, delta: f64, big_delta: f64, threshold_below: u64) -> ReferencePass {
    ReferencePass { n, a, b, r, delta, big_delta, threshold_below }
}

/// The `n = 2` passes followed by the rows for `n = 3, 4, 5`.
pub const REFERENCE_PASSES: [ReferencePass; 13] = [
    row(2, 5, 16, 5, 0.173170, 123.267943, 252453),
    row(2, 4, 10, 4, 0.2855034, 40.5284367, 20751),
    row(2, 4, 9, 4, 0.3544689, 27.3900959, 14024),
    row(2, 3, 8, 3, 0.1557111, 59.7993247, 7655),
    row(3, 5, 17, 5, 0.1392719, 167.1445296, 513468),
    row(3, 4, 11, 4, 0.2209872, 60.8269154, 46716),
    row(3, 4, 9, 4, 0.3544689, 27.3900959, 21036),
    row(4, 5, 17, 5, 0.1392719, 167.1445296, 684624),
    row(4, 4, 11, 4, 0.2209872, 60.8269154, 62287),
    row(4, 4, 9, 4, 0.3544689, 27.3900959, 28048),
    row(5, 5, 18, 5, 0.1064850, 236.7747170, 1212287),
    row(5, 4, 11, 4, 0.2209872, 60.8269154, 77859),
    row(5, 4, 9, 4, 0.3544689, 27.3900959, 35060),
];

pub const DELTA_TOLERANCE: f64 = 1e-5;
pub const BIG_DELTA_TOLERANCE: f64 = 1e-3;

#[derive(Clone, Debug, Serialize)]
pub struct RowCheck {
    pub reference: ReferencePass,
    pub computed: PassSpec,
    pub delta_ok: bool,
    pub big_delta_ok: bool,
    pub threshold_ok: bool,
}

impl RowCheck {
    pub fn ok(&self) -> bool {
        self.delta_ok && self.big_delta_ok && self.threshold_ok
    }
}

/// Recomputes one reference row and compares within the fixed tolerances.
pub fn check_reference(reference: &ReferencePass) -> Result<RowCheck, BoundsError> {
    let computed = worst_case_pass(reference.n, reference.a, reference.b, reference.r)?;
    let delta_ok = (computed.delta_f64() - reference.delta).abs() <= DELTA_TOLERANCE;
    let big_delta_ok = computed
        .big_delta_f64()
        .is_some_and(|d| (d - reference.big_delta).abs() <= BIG_DELTA_TOLERANCE);
    let threshold_ok = computed.threshold_below(reference.threshold_below);
    Ok(RowCheck { reference: *reference, computed, delta_ok, big_delta_ok, threshold_ok })
}
