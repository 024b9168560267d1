//! Segmented sieve of Eratosthenes producing every prime power in a range.

use serde::{Deserialize, Serialize};

use super::arith::isqrt;

const SEGMENT: u64 = 1 << 18;

/// A prime power `q = p^k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PrimePower {
    pub p: u64,
    pub k: u32,
    pub q: u64,
}

/// Primes up to `limit` (inclusive) by a plain sieve.
pub fn small_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Iterator over prime powers in `[lo, hi]`, ascending.
pub struct PrimePowers {
    hi: u64,
    next_lo: u64,
    base: Vec<u64>,
    higher: Vec<PrimePower>,
    higher_pos: usize,
    buf: Vec<PrimePower>,
    buf_pos: usize,
    mark: Vec<bool>,
}

/// Every prime power `q = p^k` with `lo <= q <= hi`, each exactly once, in
/// increasing order. Primes come from a segmented sieve; higher powers are
/// enumerated from the base primes up to `sqrt(hi)`.
pub fn prime_power_iter(lo: u64, hi: u64) -> PrimePowers {
    let lo = lo.max(2);
    let base = small_primes(isqrt(hi));
    let mut higher = Vec::new();
    for &p in &base {
        let mut q = p;
        let mut k = 1;
        while let Some(next) = q.checked_mul(p) {
            if next > hi {
                break;
            }
            q = next;
            k += 1;
            if q >= lo {
                higher.push(PrimePower { p, k, q });
            }
        }
    }
    higher.sort_unstable_by_key(|pp| pp.q);
    PrimePowers {
        hi,
        next_lo: lo,
        base,
        higher,
        higher_pos: 0,
        buf: Vec::new(),
        buf_pos: 0,
        mark: Vec::new(),
    }
}

impl PrimePowers {
    fn fill(&mut self) -> bool {
        if self.next_lo > self.hi {
            return false;
        }
        let lo = self.next_lo;
        let hi = self.hi.min(lo.saturating_add(SEGMENT - 1));
        let len = (hi - lo + 1) as usize;
        self.mark.clear();
        self.mark.resize(len, true);
        for &p in &self.base {
            if p * p > hi {
                break;
            }
            let mut start = lo.div_ceil(p) * p;
            if start < p * p {
                start = p * p;
            }
            let mut m = start;
            while m <= hi {
                self.mark[(m - lo) as usize] = false;
                m += p;
            }
        }
        self.buf.clear();
        self.buf_pos = 0;
        let mut h = self.higher_pos;
        for (i, &is_p) in self.mark.iter().enumerate() {
            let v = lo + i as u64;
            while h < self.higher.len() && self.higher[h].q < v {
                self.buf.push(self.higher[h]);
                h += 1;
            }
            if is_p && v >= 2 {
                self.buf.push(PrimePower { p: v, k: 1, q: v });
            }
        }
        while h < self.higher.len() && self.higher[h].q <= hi {
            self.buf.push(self.higher[h]);
            h += 1;
        }
        self.higher_pos = h;
        match hi.checked_add(1) {
            Some(n) => self.next_lo = n,
            None => self.hi = 0,
        }
        true
    }
}

impl Iterator for PrimePowers {
    type Item = PrimePower;

    fn next(&mut self) -> Option<PrimePower> {
        loop {
            if self.buf_pos < self.buf.len() {
                let v = self.buf[self.buf_pos];
                self.buf_pos += 1;
                return Some(v);
            }
            if !self.fill() {
                return None;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffcore::arith::prime_power;

    fn qs(lo: u64, hi: u64) -> Vec<u64> {
        prime_power_iter(lo, hi).map(|pp| pp.q).collect()
    }

    #[test]
    fn small_ranges() {
        assert_eq!(qs(3, 16), vec![3, 4, 5, 7, 8, 9, 11, 13, 16]);
        assert_eq!(qs(25, 27), vec![25, 27]);
        assert_eq!(qs(24, 24), Vec::<u64>::new());
    }

    #[test]
    fn matches_direct_predicate_across_segments() {
        let lo = 3;
        let hi = 3 * SEGMENT + 77;
        let direct: Vec<u64> = (lo..=hi).filter(|&q| prime_power(q).is_some()).collect();
        assert_eq!(qs(lo, hi), direct);
        for pp in prime_power_iter(1_000_000, 1_001_000) {
            assert_eq!(prime_power(pp.q), Some((pp.p, pp.k)));
        }
    }

    #[test]
    fn unaligned_window() {
        let direct: Vec<u64> = (999_000..=1_100_000u64)
            .filter(|&q| prime_power(q).is_some())
            .collect();
        assert_eq!(qs(999_000, 1_100_000), direct);
    }
}
