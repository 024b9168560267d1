use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::ffcore::arith::gcd;
use crate::ffcore::factorize;

/// `Σ_t c_t ζ_m^t` held as nonnegative integer counts per residue class mod
/// `m`. Sums accumulate exactly; the complex value is computed on demand.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycloSum {
    modulus: u64,
    counts: Vec<u64>,
}

impl CycloSum {
    pub fn new(modulus: u64) -> CycloSum {
        assert!(modulus >= 1, "cyclotomic modulus must be positive");
        CycloSum { modulus, counts: vec![0; modulus as usize] }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Adds one copy of `ζ_m^r`.
    pub fn push(&mut self, r: u64) {
        self.counts[(r % self.modulus) as usize] += 1;
    }

    pub fn push_n(&mut self, r: u64, n: u64) {
        self.counts[(r % self.modulus) as usize] += n;
    }

    /// Componentwise sum; both sides must share the modulus.
    pub fn merge(&mut self, other: &CycloSum) {
        assert_eq!(self.modulus, other.modulus, "cyclotomic moduli differ");
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }

    /// Number of accumulated roots of unity.
    pub fn terms(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn value(&self) -> Complex64 {
        let m = self.modulus as f64;
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(t, &c)| Complex64::from_polar(c as f64, 2.0 * PI * t as f64 / m))
            .sum()
    }

    pub fn abs(&self) -> f64 {
        self.value().norm()
    }

    /// The exact rational-integer value when the count vector is invariant
    /// under `ζ ↦ ζ^a` for every unit `a` (constant on each class
    /// `{t : gcd(t, m) = g}`); each such class sums to `μ(m/g)`.
    pub fn exact_integer(&self) -> Option<i64> {
        let m = self.modulus;
        let mut class_count: Vec<Option<u64>> = vec![None; m as usize + 1];
        for t in 0..m {
            let g = gcd(t, m) as usize;
            let c = self.counts[t as usize];
            match class_count[g] {
                None => class_count[g] = Some(c),
                Some(prev) if prev != c => return None,
                Some(_) => {}
            }
        }
        let mut total = 0i64;
        for (g, c) in class_count.iter().enumerate() {
            if let Some(c) = c {
                if *c != 0 {
                    let mu = factorize(m / g as u64).expect("nonzero").mu();
                    total += mu * *c as i64;
                }
            }
        }
        Some(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ramanujan_sums() {
        // Σ over primitive 6th roots = μ(6) = 1; over all 6th roots = 0
        let mut s = CycloSum::new(6);
        s.push(1);
        s.push(5);
        assert_eq!(s.exact_integer(), Some(1));
        let mut all = CycloSum::new(6);
        (0..6).for_each(|t| all.push(t));
        assert_eq!(all.exact_integer(), Some(0));
        assert!(all.abs() < 1e-12);
    }

    #[test]
    fn non_invariant_has_no_integer_form() {
        let mut s = CycloSum::new(4);
        s.push(1);
        assert_eq!(s.exact_integer(), None);
        assert!((s.value() - Complex64::new(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn value_matches_direct_evaluation() {
        let mut s = CycloSum::new(30);
        for t in 0..1000u64 {
            s.push(t * t + 3 * t);
        }
        let direct: Complex64 = (0..1000u64)
            .map(|t| {
                let r = (t * t + 3 * t) % 30;
                Complex64::from_polar(1.0, 2.0 * PI * r as f64 / 30.0)
            })
            .sum();
        assert!((s.value() - direct).norm() < 1e-9);
        assert_eq!(s.terms(), 1000);
    }
}
