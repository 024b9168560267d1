//! Integer arithmetic: deterministic primality, factorization, and the
//! multiplicative functions (ω, W, φ, μ, radical) read off a factorization.

use serde::{Deserialize, Serialize};
use std::fmt;

use super::FieldError;

/// Largest input accepted by [`factorize`].
pub const FACTORIZE_MAX: u64 = 1 << 63;

/// Primes below 64, the range used by the `c_m` constant.
pub const PRIMES_BELOW_64: [u64; 18] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61,
];

const TRIAL_PRIMES: [u64; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

// Deterministic for every n < 2^64.
const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd(a, b) * b
}

/// Deterministic Miller–Rabin, valid for all `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &TRIAL_PRIMES {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'bases: for &a in &MR_BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Returns `(p, k)` when `q = p^k` for a prime `p` and `k >= 1`.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    if is_prime(q) {
        return Some((q, 1));
    }
    for k in (2..=63u32).rev() {
        let r = integer_root(q, k);
        if r >= 2 && r.checked_pow(k) == Some(q) && is_prime(r) {
            return Some((r, k));
        }
    }
    None
}

/// Floor of the k-th root of `n`.
pub fn integer_root(n: u64, k: u32) -> u64 {
    if k == 1 || n < 2 {
        return n;
    }
    let mut r = (n as f64).powf(1.0 / k as f64).round() as u64;
    while r > 0 && r.checked_pow(k).is_none_or(|v| v > n) {
        r -= 1;
    }
    while (r + 1).checked_pow(k).is_some_and(|v| v <= n) {
        r += 1;
    }
    r
}

pub fn isqrt(n: u64) -> u64 {
    integer_root(n, 2)
}

/// Brent's variant of Pollard rho. `n` must be odd, composite, and not a
/// perfect power of a small prime already stripped by trial division.
fn rho_split(n: u64) -> u64 {
    for c in 1u64.. {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let mut y = 2u64;
        let mut r = 1u64;
        let mut q = 1u64;
        let mut g = 1u64;
        let mut x = y;
        let mut ys = y;
        const BATCH: u64 = 128;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..BATCH.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += BATCH;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!()
}

fn push_prime_factors(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let r = isqrt(n);
    if r * r == n {
        push_prime_factors(r, out);
        push_prime_factors(r, out);
        return;
    }
    let d = rho_split(n);
    push_prime_factors(d, out);
    push_prime_factors(n / d, out);
}

/// Exact prime factorization of a positive integer.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Factorization {
    value: u64,
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    /// Builds a factorization from `(prime, exponent)` pairs, checking every
    /// invariant (ordering, primality, product).
    pub fn from_parts(factors: Vec<(u64, u32)>) -> Result<Self, FieldError> {
        let mut value = 1u64;
        for (i, &(p, e)) in factors.iter().enumerate() {
            if e == 0 || !is_prime(p) || (i > 0 && factors[i - 1].0 >= p) {
                return Err(FieldError::Domain(format!("invalid factor list {factors:?}")));
            }
            for _ in 0..e {
                value = value
                    .checked_mul(p)
                    .ok_or_else(|| FieldError::Domain("factorization overflows u64".into()))?;
            }
        }
        Ok(Factorization { value, factors })
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// Number of distinct prime divisors.
    pub fn omega(&self) -> u32 {
        self.factors.len() as u32
    }

    /// Number of square-free divisors, `2^ω`.
    pub fn w(&self) -> u64 {
        1u64 << self.omega()
    }

    pub fn phi(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(p, e)| (p - 1) * p.pow(e - 1))
            .product()
    }

    pub fn radical(&self) -> u64 {
        self.primes().product()
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    /// Möbius function of the factored value.
    pub fn mu(&self) -> i64 {
        if self.is_squarefree() {
            if self.omega() % 2 == 0 {
                1
            } else {
                -1
            }
        } else {
            0
        }
    }

    /// All positive divisors in increasing order.
    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &(p, e) in &self.factors {
            let len = divs.len();
            let mut pk = 1;
            for _ in 0..e {
                pk *= p;
                for i in 0..len {
                    divs.push(divs[i] * pk);
                }
            }
        }
        divs.sort_unstable();
        divs
    }

    /// Square-free divisors in increasing order (the support of μ).
    pub fn squarefree_divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for p in self.primes() {
            let len = divs.len();
            for i in 0..len {
                divs.push(divs[i] * p);
            }
        }
        divs.sort_unstable();
        divs
    }

    /// Factorization of a divisor `d` of this value.
    pub fn of_divisor(&self, d: u64) -> Option<Factorization> {
        if d == 0 || self.value % d != 0 {
            return None;
        }
        let mut rest = d;
        let mut factors = Vec::new();
        for &(p, _) in &self.factors {
            let mut e = 0;
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            if e > 0 {
                factors.push((p, e));
            }
        }
        Some(Factorization { value: d, factors })
    }

    /// `p^e` terms joined by `;`, e.g. `2^2;3^1;5^1`.
    pub fn to_factor_string(&self) -> String {
        self.factors
            .iter()
            .map(|(p, e)| format!("{p}^{e}"))
            .collect::<Vec<_>>()
            .join(";")
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|&(p, e)| if e == 1 { p.to_string() } else { format!("{p}^{e}") })
            .collect();
        write!(f, "{}", parts.join(" * "))
    }
}

/// Exact factorization: trial division by small primes, then Miller–Rabin and
/// Pollard–Brent rho on what remains.
pub fn factorize(m: u64) -> Result<Factorization, FieldError> {
    if m == 0 {
        return Err(FieldError::Domain("cannot factor 0".into()));
    }
    if m > FACTORIZE_MAX {
        return Err(FieldError::Domain(format!("{m} exceeds 2^63")));
    }
    let mut n = m;
    let mut factors: Vec<(u64, u32)> = Vec::new();
    for &p in &TRIAL_PRIMES {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            factors.push((p, e));
        }
    }
    if n > 1 {
        let mut rest = Vec::new();
        push_prime_factors(n, &mut rest);
        rest.sort_unstable();
        for p in rest {
            match factors.last_mut() {
                Some((last, e)) if *last == p => *e += 1,
                _ => factors.push((p, 1)),
            }
        }
    }
    Ok(Factorization { value: m, factors })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division(mut m: u64) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        let mut p = 2;
        while p * p <= m {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            if e > 0 {
                out.push((p, e));
            }
            p += 1;
        }
        if m > 1 {
            out.push((m, 1));
        }
        out
    }

    #[test]
    fn factor_330() {
        let f = factorize(330).unwrap();
        assert_eq!(f.factors(), &[(2, 1), (3, 1), (5, 1), (11, 1)]);
        assert_eq!(f.omega(), 4);
        assert_eq!(f.w(), 16);
        assert_eq!(f.phi(), 80);
    }

    #[test]
    fn factor_one_and_zero() {
        let f = factorize(1).unwrap();
        assert!(f.factors().is_empty());
        assert_eq!(f.w(), 1);
        assert_eq!(f.mu(), 1);
        assert!(factorize(0).is_err());
    }

    #[test]
    fn factor_largest_candidate_minus_one() {
        let f = factorize(33_093_060).unwrap();
        assert_eq!(f.factors().to_vec(), trial_division(33_093_060));
        assert!(f.primes().all(is_prime));
    }

    #[test]
    fn factorization_matches_trial_division_up_to_1e6() {
        for m in 1..=1_000_000u64 {
            assert_eq!(factorize(m).unwrap().factors().to_vec(), trial_division(m), "m={m}");
        }
    }

    #[test]
    fn large_semiprimes() {
        let p = 4_294_967_291u64; // 2^32 - 5
        let q = 2_147_483_647u64;
        let f = factorize(p * q).unwrap();
        assert_eq!(f.factors(), &[(q, 1), (p, 1)]);
        let f = factorize(q * q).unwrap();
        assert_eq!(f.factors(), &[(q, 2)]);
        assert!(factorize(p * p).is_err());
    }

    #[test]
    fn primality_known_values() {
        assert!(is_prime(2) && is_prime(3) && is_prime(65537));
        assert!(!is_prime(1) && !is_prime(561) && !is_prime(3_215_031_751));
        assert!(is_prime(18_446_744_073_709_551_557));
    }

    #[test]
    fn prime_power_detection() {
        assert_eq!(prime_power(16), Some((2, 4)));
        assert_eq!(prime_power(121), Some((11, 2)));
        assert_eq!(prime_power(13), Some((13, 1)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
        assert_eq!(prime_power(36), None);
    }

    #[test]
    fn divisor_helpers() {
        let f = factorize(12).unwrap();
        assert_eq!(f.divisors(), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(f.squarefree_divisors(), vec![1, 2, 3, 6]);
        assert_eq!(f.radical(), 6);
        assert_eq!(f.of_divisor(4).unwrap().factors(), &[(2, 2)]);
        assert!(f.of_divisor(5).is_none());
        assert_eq!(f.to_factor_string(), "2^2;3^1");
    }

    proptest::proptest! {
        #[test]
        fn recomposition(m in 1u64..1_000_000_000_000u64) {
            let f = factorize(m).unwrap();
            let back: u64 = f.factors().iter().map(|&(p, e)| p.pow(e)).product();
            proptest::prop_assert_eq!(back, m);
            proptest::prop_assert!(f.primes().all(is_prime));
            proptest::prop_assert!(f.factors().windows(2).all(|w| w[0].0 < w[1].0));
        }
    }
}
