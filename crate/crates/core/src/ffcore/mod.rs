//! Finite fields `F_q`, discrete-log tables, and the integer arithmetic the
//! criteria are stated in (factorizations, φ, μ, ω, W).

pub mod arith;
mod field;
pub mod sieve;

pub use arith::{factorize, is_prime, prime_power, Factorization};
pub use field::{field_make, Elem, FieldCtx, DEFAULT_TABLE_CAP};
pub use sieve::{prime_power_iter, PrimePower, PrimePowers};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("q = {q} exceeds the discrete-log table cap {cap}; use the table-free order checks instead")]
    TableCap { q: u64, cap: u64 },
    #[error("{u} does not divide q - 1 = {order}")]
    NotDivisor { u: u64, order: u64 },
    #[error("element index {0} is outside the field")]
    BadElement(u64),
}

/// True iff `a` generates `(Z/pZ)*`, checked from the factorization of `p - 1`
/// without any tables.
pub fn is_primitive_root_mod(a: u64, p: u64, p_minus_1: &Factorization) -> bool {
    let a = a % p;
    if a == 0 || p_minus_1.value() != p - 1 {
        return false;
    }
    p_minus_1
        .primes()
        .all(|r| arith::pow_mod(a, (p - 1) / r, p) != 1)
}

/// Least primitive root modulo a prime, table-free.
pub fn least_primitive_root_mod(p: u64) -> Result<u64, FieldError> {
    if !is_prime(p) {
        return Err(FieldError::NotPrime(p));
    }
    if p == 2 {
        return Ok(1);
    }
    let f = factorize(p - 1)?;
    Ok((1..p)
        .find(|&a| is_primitive_root_mod(a, p, &f))
        .expect("cyclic group has a generator"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_free_roots() {
        assert_eq!(least_primitive_root_mod(7).unwrap(), 3);
        assert_eq!(least_primitive_root_mod(4_294_967_291).unwrap(), 2);
        assert_eq!(least_primitive_root_mod(65537).unwrap(), 3);
        assert!(least_primitive_root_mod(9).is_err());
    }
}
