use serde::{Deserialize, Serialize};
use std::fmt;

use super::squarefree::squarefree_decomp;
use super::{Poly, PolyError};
use crate::ffcore::arith::gcd;
use crate::ffcore::{Elem, FieldCtx};

/// `f = f1 / f2` in lowest terms, `f2` monic, `f1` nonzero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RationalFunc {
    num: Poly,
    den: Poly,
}

impl RationalFunc {
    /// Reduces `num / den` to lowest terms with a monic denominator.
    pub fn new(num: Poly, den: Poly, f: &FieldCtx) -> Result<RationalFunc, PolyError> {
        if num.is_zero() {
            return Err(PolyError::ZeroNumerator);
        }
        if den.is_zero() {
            return Err(PolyError::ZeroDenominator);
        }
        let g = num.gcd(&den, f);
        let (num, den) = if g.is_constant() {
            (num, den)
        } else {
            (num.div_exact(&g, f)?, den.div_exact(&g, f)?)
        };
        let lead = f.inv(den.leading().expect("nonzero")).expect("nonzero");
        Ok(RationalFunc {
            num: num.scale(lead, f),
            den: den.scale(lead, f),
        })
    }

    /// A polynomial viewed as an `(n, 0)`-function.
    pub fn polynomial(num: Poly, f: &FieldCtx) -> Result<RationalFunc, PolyError> {
        RationalFunc::new(num, Poly::one(), f)
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn n1(&self) -> usize {
        self.num.degree().expect("nonzero numerator")
    }

    pub fn n2(&self) -> usize {
        self.den.degree().expect("nonzero denominator")
    }

    pub fn degree(&self) -> usize {
        self.n1() + self.n2()
    }

    /// `f(α)`, or `None` at a pole.
    pub fn eval(&self, alpha: Elem, f: &FieldCtx) -> Option<Elem> {
        let d = self.den.eval(alpha, f);
        f.div(self.num.eval(alpha, f), d)
    }

    /// Poles of `f` lying in `F_q`.
    pub fn poles(&self, f: &FieldCtx) -> Vec<Elem> {
        f.elements().filter(|&a| self.den.eval(a, f).is_zero()).collect()
    }

    /// `1/f`, renormalized.
    pub fn invert(&self, f: &FieldCtx) -> RationalFunc {
        RationalFunc::new(self.den.clone(), self.num.clone(), f).expect("both parts nonzero")
    }

    /// `f` or `1/f`, whichever has `n1 >= n2`; `(α, f(α))` and `(α, 1/f(α))`
    /// are primitive together, so callers may switch freely.
    pub fn oriented(&self, f: &FieldCtx) -> RationalFunc {
        if self.n1() >= self.n2() {
            self.clone()
        } else {
            self.invert(f)
        }
    }

    pub fn display<'a>(&'a self, f: &'a FieldCtx) -> RationalDisplay<'a> {
        RationalDisplay { func: self, field: f }
    }
}

/// Exceptionality data: `f = c · x^j · f0`, with the square-free layer
/// profile of `f0` and the prime `d | q−1` certifying `f0 = c' g^d` when one
/// exists.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExceptionalityWitness {
    pub j: i64,
    pub d: Option<u64>,
    /// `(layer degree, multiplicity)` over the layers of `f0`'s numerator and
    /// denominator.
    pub profile: Vec<(usize, u32)>,
    pub monomial: bool,
}

/// Whether `f` has the form `c · x^j · g(x)^d` with `d > 1`, `d | q−1`.
/// Monomials `c · x^j` count as exceptional (take `g` constant).
pub fn is_exceptional(ctx: &FieldCtx, f: &RationalFunc) -> (bool, ExceptionalityWitness) {
    let vn = f.num.x_valuation();
    let vd = f.den.x_valuation();
    let j = vn as i64 - vd as i64;
    let num0 = f.num.shift_down(vn);
    let den0 = f.den.shift_down(vd);
    let mut profile = Vec::new();
    for part in [&num0, &den0] {
        let sq = squarefree_decomp(part, ctx).expect("nonzero");
        profile.extend(sq.layers.iter().map(|(a, m)| (a.degree().unwrap_or(0), *m)));
    }
    profile.sort_unstable();
    if profile.is_empty() {
        return (
            true,
            ExceptionalityWitness { j, d: None, profile, monomial: true },
        );
    }
    let g = profile.iter().fold(0u64, |acc, &(_, m)| gcd(acc, m as u64));
    let d = ctx
        .order_factorization()
        .primes()
        .find(|&r| g % r == 0);
    (
        d.is_some(),
        ExceptionalityWitness { j, d, profile, monomial: false },
    )
}

/// Whether `F = c · G^d` for some rational `G` (including any power of `x`):
/// every square-free layer multiplicity of numerator and denominator is a
/// multiple of `d`.
pub fn is_constant_times_power(ctx: &FieldCtx, func: &RationalFunc, d: u64) -> bool {
    [func.num(), func.den()].iter().all(|part| {
        squarefree_decomp(part, ctx)
            .expect("nonzero")
            .layers
            .iter()
            .all(|(_, m)| *m as u64 % d == 0)
    })
}

/// `f*(x) = f(1/x)` in lowest terms, for `n1 = n2` with `x` dividing exactly
/// one of `f1`, `f2`. The result has strictly smaller degree, and a primitive
/// pair `(α, f*(α))` yields the primitive pair `(1/α, f(1/α))`.
pub fn reciprocal_reduce(ctx: &FieldCtx, func: &RationalFunc) -> Result<RationalFunc, PolyError> {
    let n = func.n1();
    if n != func.n2() {
        return Err(PolyError::Precondition(format!(
            "reciprocal reduction needs n1 = n2, got ({}, {})",
            n,
            func.n2()
        )));
    }
    let x_num = func.num.x_valuation() > 0;
    let x_den = func.den.x_valuation() > 0;
    if x_num == x_den {
        return Err(PolyError::Precondition(
            "x must divide exactly one of numerator and denominator".into(),
        ));
    }
    RationalFunc::new(func.num.reverse(n), func.den.reverse(n), ctx)
}

pub struct RationalDisplay<'a> {
    func: &'a RationalFunc,
    field: &'a FieldCtx,
}

fn write_poly(out: &mut fmt::Formatter<'_>, p: &Poly, field: &FieldCtx) -> fmt::Result {
    let mut terms = Vec::new();
    for (i, &c) in p.coeffs().iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let coef = if field.k() == 1 {
            c.index().to_string()
        } else {
            format!("{:?}", field.coeffs(c))
        };
        terms.push(match (i, c == Elem::ONE) {
            (0, _) => coef,
            (1, true) => "x".to_string(),
            (1, false) => format!("{coef}*x"),
            (_, true) => format!("x^{i}"),
            (_, false) => format!("{coef}*x^{i}"),
        });
    }
    write!(out, "{}", terms.join(" + "))
}

impl fmt::Display for RationalDisplay<'_> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "(")?;
        write_poly(out, &self.func.num, self.field)?;
        write!(out, ")")?;
        if self.func.den != Poly::one() {
            write!(out, "/(")?;
            write_poly(out, &self.func.den, self.field)?;
            write!(out, ")")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffcore::field_make;

    fn p(f: &FieldCtx, c: &[u64]) -> Poly {
        Poly::new(c.iter().map(|&v| f.elem(v)).collect())
    }

    #[test]
    fn normalization() {
        let f = field_make(7, 1).unwrap();
        // (x^2 - 1) / (3x - 3) = (x + 1)/3 -> den monic
        let r = RationalFunc::new(p(&f, &[6, 0, 1]), p(&f, &[4, 3]), &f).unwrap();
        assert!(r.den().is_monic());
        assert_eq!(r.den(), &Poly::one());
        assert_eq!(r.n1(), 1);
        let again = RationalFunc::new(r.num().clone(), r.den().clone(), &f).unwrap();
        assert_eq!(again, r);
        assert_eq!(
            RationalFunc::new(Poly::zero(), Poly::one(), &f).unwrap_err(),
            PolyError::ZeroNumerator
        );
        assert_eq!(
            RationalFunc::new(Poly::one(), Poly::zero(), &f).unwrap_err(),
            PolyError::ZeroDenominator
        );
    }

    #[test]
    fn no_silent_swap() {
        let f = field_make(5, 1).unwrap();
        let r = RationalFunc::new(p(&f, &[1, 1]), p(&f, &[1, 0, 1]), &f).unwrap();
        assert_eq!((r.n1(), r.n2()), (1, 2));
        let o = r.oriented(&f);
        assert_eq!((o.n1(), o.n2()), (2, 1));
    }

    #[test]
    fn exceptional_examples() {
        let f = field_make(7, 1).unwrap();
        // 3(x+1)^2 / x
        let num = p(&f, &[1, 1]).pow(2, &f).scale(f.elem(3), &f);
        let r = RationalFunc::new(num, Poly::x(), &f).unwrap();
        let (exc, w) = is_exceptional(&f, &r);
        assert!(exc);
        assert_eq!(w.d, Some(2));
        assert_eq!(w.j, -1);

        let f13 = field_make(13, 1).unwrap();
        let r = RationalFunc::new(p(&f13, &[1, 0, 1]), Poly::x(), &f13).unwrap();
        let (exc, w) = is_exceptional(&f13, &r);
        assert!(!exc);
        assert_eq!(w.profile, vec![(2, 1)]);

        // 5x^2 over F_7: monomial
        let r = RationalFunc::polynomial(Poly::monomial(f.elem(5), 2), &f).unwrap();
        let (exc, w) = is_exceptional(&f, &r);
        assert!(exc && w.monomial && w.j == 2);
    }

    #[test]
    fn exceptionality_depends_on_field() {
        // (x+1)^3: exceptional over F_7 (3 | 6), not over F_5 (3 ∤ 4).
        let f7 = field_make(7, 1).unwrap();
        let r = RationalFunc::polynomial(p(&f7, &[1, 1]).pow(3, &f7), &f7).unwrap();
        assert_eq!(is_exceptional(&f7, &r).1.d, Some(3));
        let f5 = field_make(5, 1).unwrap();
        let r = RationalFunc::polynomial(p(&f5, &[1, 1]).pow(3, &f5), &f5).unwrap();
        assert!(!is_exceptional(&f5, &r).0);
        // (x+1)^5 over F_5 is a p-th power, but p never divides q-1.
        let r = RationalFunc::polynomial(p(&f5, &[1, 1]).pow(5, &f5), &f5).unwrap();
        assert!(!is_exceptional(&f5, &r).0);
    }

    #[test]
    fn reciprocal_examples() {
        let f = field_make(11, 1).unwrap();
        let (a, b) = (f.elem(3), f.elem(4));
        let r = RationalFunc::new(Poly::new(vec![f.mul(a, b), a]), Poly::x(), &f).unwrap();
        let star = reciprocal_reduce(&f, &r).unwrap();
        // ab (x + 1/b)
        let ab = f.mul(a, b);
        let expect = Poly::new(vec![f.mul(ab, f.inv(b).unwrap()), ab]);
        assert_eq!(star.num(), &expect);
        assert_eq!(star.den(), &Poly::one());

        let r = RationalFunc::new(p(&f, &[0, 1, 1]), p(&f, &[1, 0, 1]), &f).unwrap();
        let star = reciprocal_reduce(&f, &r).unwrap();
        assert!(star.degree() < 4);

        let r = RationalFunc::new(p(&f, &[1, 1]), p(&f, &[2, 1]), &f).unwrap();
        assert!(matches!(reciprocal_reduce(&f, &r), Err(PolyError::Precondition(_))));
    }

    #[test]
    fn reciprocal_agrees_with_substitution() {
        for q in [5u64, 7, 8, 9, 11, 13] {
            let f = crate::ffcore::FieldCtx::from_order(q).unwrap();
            let one = Elem::ONE;
            for b in f.nonzero() {
                for c in f.nonzero() {
                    // (x^2 + b x) / (x^2 + c x + 1), when coprime and of equal degree
                    let num = Poly::new(vec![Elem::ZERO, b, one]);
                    let den = Poly::new(vec![one, c, one]);
                    let Ok(r) = RationalFunc::new(num, den, &f) else { continue };
                    if r.n1() != r.n2() {
                        continue;
                    }
                    let Ok(star) = reciprocal_reduce(&f, &r) else { continue };
                    assert!(star.degree() < r.degree());
                    for a in f.nonzero() {
                        let inv = f.inv(a).unwrap();
                        assert_eq!(star.eval(a, &f), r.eval(inv, &f), "q={q}");
                    }
                }
            }
        }
    }
}
