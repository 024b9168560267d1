use serde::{Deserialize, Serialize};
use std::fmt;

use super::arith::{self, factorize, gcd, Factorization};
use super::FieldError;

/// Default largest `q` for which discrete-log tables are materialized.
pub const DEFAULT_TABLE_CAP: u64 = 1 << 24;

/// A field element, stored as the integer `Σ c_i p^i` of its coefficient
/// vector `(c_0, …, c_{k-1})` modulo the defining polynomial. The integer
/// order is the fixed element order used everywhere: constants first, then
/// lexicographic with the highest coefficient most significant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Elem(u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    pub fn index(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A materialized finite field `F_{p^k}` with a fixed generator and full
/// discrete-log / antilog tables. Immutable once built.
pub struct FieldCtx {
    p: u32,
    k: u32,
    q: u32,
    modulus: Vec<u32>,
    generator: Elem,
    exp: Vec<u32>,
    log: Vec<u32>,
    order: Factorization,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldCtx")
            .field("p", &self.p)
            .field("k", &self.k)
            .field("q", &self.q)
            .field("modulus", &self.modulus)
            .field("generator", &self.generator)
            .finish()
    }
}

/// Builds `F_{p^k}` with the default table cap.
pub fn field_make(p: u64, k: u32) -> Result<FieldCtx, FieldError> {
    FieldCtx::with_cap(p, k, DEFAULT_TABLE_CAP)
}

// Dense polynomial helpers over F_p, lowest coefficient first, no trailing zeros.
mod fp {
    pub fn trim(v: &mut Vec<u64>) {
        while v.last() == Some(&0) {
            v.pop();
        }
    }

    pub fn inv(a: u64, p: u64) -> u64 {
        super::arith::pow_mod(a, p - 2, p)
    }

    pub fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y) % p;
            }
        }
        trim(&mut out);
        out
    }

    pub fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let mut r = a.to_vec();
        trim(&mut r);
        let dm = m.len() - 1;
        let lead_inv = inv(m[dm], p);
        while r.len() > dm {
            let top = r.len() - 1;
            let c = r[top] * lead_inv % p;
            if c != 0 {
                for (i, &mi) in m.iter().enumerate() {
                    let idx = top - dm + i;
                    r[idx] = (r[idx] + p - c * mi % p) % p;
                }
            }
            r.pop();
            trim(&mut r);
        }
        r
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    pub fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let n = a.len().max(b.len());
        let mut out: Vec<u64> = (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect();
        trim(&mut out);
        out
    }

    pub fn pow_mod(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
        let mut acc = vec![1u64];
        let mut b = rem(base, m, p);
        while e > 0 {
            if e & 1 == 1 {
                acc = rem(&mul(&acc, &b, p), m, p);
            }
            b = rem(&mul(&b, &b, p), m, p);
            e >>= 1;
        }
        acc
    }

    /// Degree-k monic `m` is irreducible iff gcd(x^{p^i} - x, m) = 1 for
    /// every i <= k/2.
    pub fn is_irreducible(m: &[u64], p: u64) -> bool {
        let k = m.len() - 1;
        let x = vec![0, 1];
        let mut xp = x.clone();
        for _ in 1..=k / 2 {
            xp = pow_mod(&xp, p, m, p);
            let g = gcd(m, &sub(&xp, &x, p), p);
            if g.len() > 1 {
                return false;
            }
        }
        true
    }
}

impl FieldCtx {
    /// Builds `F_{p^k}`. The modulus is the first monic irreducible of degree
    /// `k` in lexicographic order of its lower coefficients; the generator is
    /// the least element (in [`Elem`] order) of multiplicative order `q - 1`.
    pub fn with_cap(p: u64, k: u32, cap: u64) -> Result<FieldCtx, FieldError> {
        if !arith::is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if k == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let q = p
            .checked_pow(k)
            .ok_or(FieldError::TableCap { q: u64::MAX, cap })?;
        if q > cap || q > u32::MAX as u64 {
            return Err(FieldError::TableCap { q, cap });
        }
        let modulus: Vec<u64> = if k == 1 {
            vec![0, 1]
        } else {
            (0..q)
                .map(|lower| {
                    let mut m: Vec<u64> = digits(lower, p, k as usize);
                    m.push(1);
                    m
                })
                .find(|m| fp::is_irreducible(m, p))
                .expect("an irreducible polynomial of every degree exists")
        };
        let order = factorize(q - 1)?;
        let mut ctx = FieldCtx {
            p: p as u32,
            k,
            q: q as u32,
            modulus: modulus.iter().map(|&c| c as u32).collect(),
            generator: Elem::ONE,
            exp: Vec::new(),
            log: Vec::new(),
            order,
        };
        let generator = (1..q as u32)
            .map(Elem)
            .find(|&g| ctx.has_full_order_slow(g))
            .expect("F_q* is cyclic");
        ctx.generator = generator;
        ctx.build_tables();
        Ok(ctx)
    }

    /// Builds the field of order `q`, which must be a prime power.
    pub fn from_order(q: u64) -> Result<FieldCtx, FieldError> {
        let (p, k) = arith::prime_power(q).ok_or(FieldError::NotPrimePower(q))?;
        field_make(p, k)
    }

    fn has_full_order_slow(&self, g: Elem) -> bool {
        let n = (self.q - 1) as u64;
        if n == 1 {
            return g == Elem::ONE;
        }
        self.order
            .primes()
            .all(|r| self.pow_slow(g, n / r) != Elem::ONE)
    }

    fn mul_slow(&self, a: Elem, b: Elem) -> Elem {
        let p = self.p as u64;
        if self.k == 1 {
            return Elem((a.0 as u64 * b.0 as u64 % p) as u32);
        }
        let m: Vec<u64> = self.modulus.iter().map(|&c| c as u64).collect();
        let prod = fp::mul(&self.coeffs_u64(a), &self.coeffs_u64(b), p);
        self.from_u64_coeffs(&fp::rem(&prod, &m, p))
    }

    fn pow_slow(&self, mut a: Elem, mut e: u64) -> Elem {
        let mut acc = Elem::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_slow(acc, a);
            }
            a = self.mul_slow(a, a);
            e >>= 1;
        }
        acc
    }

    // Multiplication by x: shift coefficients up and reduce by the monic modulus.
    fn mul_by_x(&self, a: Elem) -> Elem {
        let p = self.p as u64;
        let k = self.k as usize;
        let mut c = self.coeffs_u64(a);
        let top = c[k - 1];
        for i in (1..k).rev() {
            c[i] = c[i - 1];
        }
        c[0] = 0;
        if top != 0 {
            for (i, ci) in c.iter_mut().enumerate() {
                *ci = (*ci + p - top * self.modulus[i] as u64 % p) % p;
            }
        }
        self.from_u64_coeffs(&c)
    }

    fn build_tables(&mut self) {
        let n = (self.q - 1) as usize;
        let mut exp = Vec::with_capacity(n);
        let mut log = vec![u32::MAX; self.q as usize];
        let g = self.generator;
        let x = Elem(self.p);
        let mut cur = Elem::ONE;
        for t in 0..n {
            exp.push(cur.0);
            log[cur.0 as usize] = t as u32;
            cur = if self.k == 1 {
                Elem((cur.0 as u64 * g.0 as u64 % self.p as u64) as u32)
            } else if g == x {
                self.mul_by_x(cur)
            } else {
                self.mul_slow(cur, g)
            };
        }
        debug_assert_eq!(cur, Elem::ONE);
        self.exp = exp;
        self.log = log;
    }

    fn coeffs_u64(&self, a: Elem) -> Vec<u64> {
        digits(a.0 as u64, self.p as u64, self.k as usize)
    }

    fn from_u64_coeffs(&self, c: &[u64]) -> Elem {
        let p = self.p as u64;
        let mut v = 0u64;
        for &ci in c.iter().take(self.k as usize).rev() {
            v = v * p + ci % p;
        }
        Elem(v as u32)
    }

    pub fn p(&self) -> u64 {
        self.p as u64
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn q(&self) -> u64 {
        self.q as u64
    }

    /// `q - 1`, the order of `F_q*`.
    pub fn order(&self) -> u64 {
        self.q as u64 - 1
    }

    /// Factorization of `q - 1`.
    pub fn order_factorization(&self) -> &Factorization {
        &self.order
    }

    /// Monic defining polynomial over `F_p`, lowest coefficient first
    /// (`x` itself for prime fields).
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn generator(&self) -> Elem {
        self.generator
    }

    /// The constant `v mod p`.
    pub fn elem(&self, v: u64) -> Elem {
        Elem((v % self.p as u64) as u32)
    }

    /// Element with the given index in the fixed order, if in range.
    pub fn from_index(&self, i: u64) -> Result<Elem, FieldError> {
        if i < self.q as u64 {
            Ok(Elem(i as u32))
        } else {
            Err(FieldError::BadElement(i))
        }
    }

    pub fn from_coeffs(&self, c: &[u64]) -> Result<Elem, FieldError> {
        if c.len() > self.k as usize {
            return Err(FieldError::Domain(format!(
                "{} coefficients given for a degree-{} extension",
                c.len(),
                self.k
            )));
        }
        Ok(self.from_u64_coeffs(c))
    }

    pub fn coeffs(&self, a: Elem) -> Vec<u64> {
        self.coeffs_u64(a)
    }

    /// All elements in the fixed order, zero first.
    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.q).map(Elem)
    }

    pub fn nonzero(&self) -> impl Iterator<Item = Elem> + '_ {
        (1..self.q).map(Elem)
    }

    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        let p = self.p;
        if self.k == 1 {
            let s = a.0 + b.0;
            return Elem(if s >= p { s - p } else { s });
        }
        if p == 2 {
            return Elem(a.0 ^ b.0);
        }
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.k {
            let d = (x % p + y % p) % p;
            out += d * place;
            place = place.wrapping_mul(p);
            x /= p;
            y /= p;
        }
        Elem(out)
    }

    pub fn neg(&self, a: Elem) -> Elem {
        let p = self.p;
        if self.k == 1 {
            return Elem(if a.0 == 0 { 0 } else { p - a.0 });
        }
        if p == 2 {
            return a;
        }
        let mut x = a.0;
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.k {
            let d = (p - x % p) % p;
            out += d * place;
            place = place.wrapping_mul(p);
            x /= p;
        }
        Elem(out)
    }

    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a.0 == 0 || b.0 == 0 {
            return Elem::ZERO;
        }
        let n = self.q - 1;
        let s = self.log[a.0 as usize] as u64 + self.log[b.0 as usize] as u64;
        Elem(self.exp[(s % n as u64) as usize])
    }

    pub fn inv(&self, a: Elem) -> Option<Elem> {
        if a.0 == 0 {
            return None;
        }
        let n = self.q - 1;
        let t = self.log[a.0 as usize];
        Some(Elem(self.exp[((n - t) % n) as usize]))
    }

    /// `a / b`, `None` when `b = 0`.
    pub fn div(&self, a: Elem, b: Elem) -> Option<Elem> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        if e == 0 {
            return Elem::ONE;
        }
        match self.dlog(a) {
            None => Elem::ZERO,
            Some(t) => self.exp_of(arith::mul_mod(t, e, self.order())),
        }
    }

    /// Discrete logarithm to the base of the fixed generator.
    pub fn dlog(&self, a: Elem) -> Option<u64> {
        if a.0 == 0 || a.0 >= self.q {
            None
        } else {
            Some(self.log[a.0 as usize] as u64)
        }
    }

    /// `g^t`.
    pub fn exp_of(&self, t: u64) -> Elem {
        Elem(self.exp[(t % self.order()) as usize])
    }

    /// The unique `b` with `b^p = a` (Frobenius is a bijection on `F_q`).
    pub fn pth_root(&self, a: Elem) -> Elem {
        self.pow(a, self.q as u64 / self.p as u64)
    }

    /// Generator of `F_q*`: nonzero with `gcd(dlog a, q - 1) = 1`.
    pub fn is_primitive(&self, a: Elem) -> bool {
        match self.dlog(a) {
            None => false,
            Some(t) => gcd(t, self.order()) == 1,
        }
    }

    /// `u`-free test for a divisor `u` of `q - 1`: `a` is nonzero and not an
    /// `r`-th power for any prime `r | u`.
    pub fn is_ufree(&self, a: Elem, u: u64) -> Result<bool, FieldError> {
        let rad = self.radical_of_divisor(u)?;
        Ok(match self.dlog(a) {
            None => false,
            Some(t) => gcd(t, rad) == 1,
        })
    }

    /// Radical of a divisor `u` of `q - 1`.
    pub fn radical_of_divisor(&self, u: u64) -> Result<u64, FieldError> {
        if u == 0 || self.order() % u != 0 {
            return Err(FieldError::NotDivisor { u, order: self.order() });
        }
        Ok(self.order.primes().filter(|&r| u % r == 0).product())
    }
}

fn digits(mut v: u64, p: u64, k: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        out.push(v % p);
        v /= p;
    }
    out
}
