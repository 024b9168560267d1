use serde::{Deserialize, Serialize};

use super::PolyError;
use crate::ffcore::{Elem, FieldCtx};

/// Dense univariate polynomial over `F_q`, lowest coefficient first. Trailing
/// zeros are never stored, so the zero polynomial has no coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Poly {
    coeffs: Vec<Elem>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Poly {
        Poly::constant(Elem::ONE)
    }

    pub fn constant(c: Elem) -> Poly {
        Poly::new(vec![c])
    }

    pub fn x() -> Poly {
        Poly::new(vec![Elem::ZERO, Elem::ONE])
    }

    /// `c x^n`.
    pub fn monomial(c: Elem, n: usize) -> Poly {
        let mut coeffs = vec![Elem::ZERO; n + 1];
        coeffs[n] = c;
        Poly::new(coeffs)
    }

    pub fn new(mut coeffs: Vec<Elem>) -> Poly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Elem {
        self.coeffs.get(i).copied().unwrap_or(Elem::ZERO)
    }

    /// `None` for the zero polynomial (degree −∞).
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading(&self) -> Option<Elem> {
        self.coeffs.last().copied()
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == Some(Elem::ONE)
    }

    pub fn constant_term(&self) -> Elem {
        self.coeff(0)
    }

    pub fn add(&self, other: &Poly, f: &FieldCtx) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|i| f.add(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn neg(&self, f: &FieldCtx) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| f.neg(c)).collect())
    }

    pub fn sub(&self, other: &Poly, f: &FieldCtx) -> Poly {
        self.add(&other.neg(f), f)
    }

    pub fn scale(&self, c: Elem, f: &FieldCtx) -> Poly {
        Poly::new(self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    pub fn mul(&self, other: &Poly, f: &FieldCtx) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Elem::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Poly::new(out)
    }

    pub fn pow(&self, mut e: u32, f: &FieldCtx) -> Poly {
        let mut acc = Poly::one();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, f);
            }
            base = base.mul(&base, f);
            e >>= 1;
        }
        acc
    }

    /// Quotient and remainder with `deg r < deg divisor`.
    pub fn divmod(&self, divisor: &Poly, f: &FieldCtx) -> Result<(Poly, Poly), PolyError> {
        let dd = divisor.degree().ok_or(PolyError::DivisionByZero)?;
        let lead_inv = f.inv(divisor.coeffs[dd]).expect("nonzero leading coefficient");
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Poly::zero(), self.clone()));
        }
        let mut quot = vec![Elem::ZERO; rem.len() - dd];
        for top in (dd..rem.len()).rev() {
            let c = f.mul(rem[top], lead_inv);
            if c.is_zero() {
                continue;
            }
            quot[top - dd] = c;
            for (i, &dc) in divisor.coeffs.iter().enumerate() {
                let idx = top - dd + i;
                rem[idx] = f.sub(rem[idx], f.mul(c, dc));
            }
        }
        rem.truncate(dd);
        Ok((Poly::new(quot), Poly::new(rem)))
    }

    /// Exact division; errors when the remainder is nonzero.
    pub fn div_exact(&self, divisor: &Poly, f: &FieldCtx) -> Result<Poly, PolyError> {
        let (q, r) = self.divmod(divisor, f)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(PolyError::Inexact)
        }
    }

    /// Scales to leading coefficient 1; zero stays zero.
    pub fn monic(&self, f: &FieldCtx) -> Poly {
        match self.leading() {
            None => Poly::zero(),
            Some(l) => self.scale(f.inv(l).expect("nonzero"), f),
        }
    }

    /// Monic greatest common divisor (zero iff both inputs are zero).
    pub fn gcd(&self, other: &Poly, f: &FieldCtx) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divmod(&b, f).expect("b nonzero");
            a = b;
            b = r;
        }
        a.monic(f)
    }

    /// Formal derivative; `i·c_i` uses `i mod p`, so `x^p` terms vanish.
    pub fn derivative(&self, f: &FieldCtx) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| f.mul(f.elem(i as u64), c))
                .collect(),
        )
    }

    /// Horner evaluation.
    pub fn eval(&self, alpha: Elem, f: &FieldCtx) -> Elem {
        self.coeffs
            .iter()
            .rev()
            .fold(Elem::ZERO, |acc, &c| f.add(f.mul(acc, alpha), c))
    }

    /// Largest `v` with `x^v | self` (0 for the zero polynomial).
    pub fn x_valuation(&self) -> usize {
        self.coeffs.iter().take_while(|c| c.is_zero()).count()
    }

    /// `self / x^v`; the caller guarantees divisibility.
    pub fn shift_down(&self, v: usize) -> Poly {
        Poly::new(self.coeffs[v.min(self.coeffs.len())..].to_vec())
    }

    /// `x^n · self(1/x)` for `n >= deg self`.
    pub fn reverse(&self, n: usize) -> Poly {
        let mut out = vec![Elem::ZERO; n + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            out[n - i] = c;
        }
        Poly::new(out)
    }

    /// Substitutes `x -> x^e` inverse: keeps every `e`-th coefficient. Only
    /// meaningful when all other coefficients vanish.
    pub(crate) fn deflate(&self, e: usize) -> Poly {
        Poly::new(self.coeffs.iter().step_by(e).copied().collect())
    }

    /// Coefficients as `F_q` element indices, lowest first.
    pub fn to_indices(&self) -> Vec<u32> {
        self.coeffs.iter().map(|c| c.index()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffcore::field_make;

    fn p(f: &FieldCtx, c: &[i64]) -> Poly {
        let pm = f.p() as i64;
        Poly::new(c.iter().map(|&v| f.elem(v.rem_euclid(pm) as u64)).collect())
    }

    #[test]
    fn gcd_is_monic() {
        let f = field_make(7, 1).unwrap();
        let g = p(&f, &[-1, 0, 1]).gcd(&p(&f, &[-1, 1]), &f);
        assert_eq!(g, p(&f, &[-1, 1]));
        let g = p(&f, &[-3, 0, 3]).gcd(&p(&f, &[-2, 2]), &f);
        assert!(g.is_monic());
        assert_eq!(g, p(&f, &[-1, 1]));
    }

    #[test]
    fn derivative_in_characteristic_p() {
        let f = field_make(7, 1).unwrap();
        let mut c = vec![0i64; 8];
        c[7] = 1;
        c[1] = 1;
        assert_eq!(p(&f, &c).derivative(&f), Poly::one());
    }

    #[test]
    fn eval_root() {
        let f = field_make(13, 1).unwrap();
        assert_eq!(p(&f, &[1, 0, 1]).eval(f.elem(5), &f), Elem::ZERO);
    }

    #[test]
    fn divmod_and_errors() {
        let f = field_make(5, 1).unwrap();
        let a = p(&f, &[1, 2, 3, 4]);
        let b = p(&f, &[2, 0, 1]);
        let (q, r) = a.divmod(&b, &f).unwrap();
        assert!(r.degree().unwrap_or(0) < 2);
        assert_eq!(q.mul(&b, &f).add(&r, &f), a);
        assert_eq!(a.divmod(&Poly::zero(), &f).unwrap_err(), PolyError::DivisionByZero);
        assert!(Poly::zero().degree().is_none());
    }

    #[test]
    fn reverse_and_valuation() {
        let f = field_make(7, 1).unwrap();
        let a = p(&f, &[0, 0, 3, 1]);
        assert_eq!(a.x_valuation(), 2);
        assert_eq!(a.shift_down(2), p(&f, &[3, 1]));
        assert_eq!(p(&f, &[2, 3]).reverse(2), p(&f, &[0, 3, 2]));
    }

    #[test]
    fn extension_field_ring_laws() {
        let f = field_make(3, 2).unwrap();
        let a = Poly::new((0..4).map(|i| f.from_index(i * 2 + 1).unwrap()).collect());
        let b = Poly::new((0..3).map(|i| f.from_index(8 - i).unwrap()).collect());
        let c = a.mul(&b, &f);
        for x in f.elements() {
            assert_eq!(c.eval(x, &f), f.mul(a.eval(x, &f), b.eval(x, &f)));
        }
        assert_eq!(c.div_exact(&b, &f).unwrap(), a);
    }
}
