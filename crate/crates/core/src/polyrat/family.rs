//! Canonical enumeration of `(n1, n2)`-function families.
//!
//! The two degree-2 families have closed forms:
//!  * `(1,1)`: `a(x+b)/(x+c)` with `a, b, c ≠ 0`, `b ≠ c`, one representative
//!    per `f ~ 1/f` orbit, i.e. per `(a,b,c) ~ (1/a,c,b)`;
//!  * `(2,0)`: `ax² + bx + c` with `a ≠ 0` and `b² − 4ac ≠ 0`.
//!
//! Everything else enumerates coefficient vectors directly. All orders are
//! lexicographic over coefficient tuples in the field's element order.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use super::rational::is_exceptional;
use super::{Poly, PolyError, RationalFunc};
use crate::ffcore::{Elem, FieldCtx};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Family {
    pub n1: usize,
    pub n2: usize,
}

impl Family {
    pub const LINEAR_FRACTIONAL: Family = Family { n1: 1, n2: 1 };
    pub const QUADRATIC: Family = Family { n1: 2, n2: 0 };

    pub fn new(n1: usize, n2: usize) -> Result<Family, PolyError> {
        if n1 < n2 {
            return Err(PolyError::Precondition(format!(
                "family ({n1},{n2}) needs n1 >= n2"
            )));
        }
        Ok(Family { n1, n2 })
    }

    pub fn degree(self) -> usize {
        self.n1 + self.n2
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.n1, self.n2)
    }
}

impl FromStr for Family {
    type Err = PolyError;

    fn from_str(s: &str) -> Result<Family, PolyError> {
        let bad = || PolyError::Parse(format!("family must look like `1,1`, got `{s}`"));
        let (a, b) = s.split_once(',').ok_or_else(bad)?;
        let n1 = a.trim().parse().map_err(|_| bad())?;
        let n2 = b.trim().parse().map_err(|_| bad())?;
        Family::new(n1, n2)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyOptions {
    /// Admit monomials `c·x^j` (exceptional under the literal definition)
    /// into general enumerations, for exploration only.
    pub include_monomials: bool,
    /// Restrict the `(2,0)` family to quadratics with no root in `F_q`.
    pub irreducible_quadratics: bool,
}

/// `a(x+b)/(x+c)`.
pub fn linear_fractional(ctx: &FieldCtx, a: Elem, b: Elem, c: Elem) -> Result<RationalFunc, PolyError> {
    RationalFunc::new(
        Poly::new(vec![ctx.mul(a, b), a]),
        Poly::new(vec![c, Elem::ONE]),
        ctx,
    )
}

/// `ax² + bx + c`.
pub fn quadratic(ctx: &FieldCtx, a: Elem, b: Elem, c: Elem) -> Result<RationalFunc, PolyError> {
    RationalFunc::polynomial(Poly::new(vec![c, b, a]), ctx)
}

/// Whether `(a,b,c)` is the orbit representative of `a(x+b)/(x+c)` under
/// `f ~ 1/f`. There are no fixed points because `b ≠ c`.
pub fn is_lf_representative(ctx: &FieldCtx, a: Elem, b: Elem, c: Elem) -> bool {
    let ai = ctx.inv(a).expect("a nonzero");
    (a, b, c) <= (ai, c, b)
}

/// Parameters `(a,b,c)` of the `(1,1)` family, orbit representatives only,
/// lexicographic.
pub fn linear_fractional_params(ctx: &FieldCtx) -> impl Iterator<Item = (Elem, Elem, Elem)> + '_ {
    ctx.nonzero().flat_map(move |a| {
        ctx.nonzero().flat_map(move |b| {
            ctx.nonzero()
                .filter(move |&c| c != b && is_lf_representative(ctx, a, b, c))
                .map(move |c| (a, b, c))
        })
    })
}

/// `b² − 4ac ≠ 0` (in characteristic 2 this is `b ≠ 0`).
pub fn quadratic_is_squarefree(ctx: &FieldCtx, a: Elem, b: Elem, c: Elem) -> bool {
    let four = ctx.elem(4);
    ctx.sub(ctx.mul(b, b), ctx.mul(four, ctx.mul(a, c))) != Elem::ZERO
}

/// `ax² + bx + c` has no root in `F_q`.
pub fn quadratic_is_irreducible(ctx: &FieldCtx, a: Elem, b: Elem, c: Elem) -> bool {
    !ctx.elements().any(|x| ctx.add(ctx.mul(ctx.add(ctx.mul(a, x), b), x), c).is_zero())
}

/// Parameters `(a,b,c)` of the `(2,0)` family, lexicographic.
pub fn quadratic_params(ctx: &FieldCtx) -> impl Iterator<Item = (Elem, Elem, Elem)> + '_ {
    ctx.nonzero().flat_map(move |a| {
        ctx.elements().flat_map(move |b| {
            ctx.elements()
                .filter(move |&c| quadratic_is_squarefree(ctx, a, b, c))
                .map(move |c| (a, b, c))
        })
    })
}

pub fn enumerate_family(
    ctx: &FieldCtx,
    n1: usize,
    n2: usize,
) -> Result<Box<dyn Iterator<Item = RationalFunc> + '_>, PolyError> {
    enumerate_family_with(ctx, n1, n2, FamilyOptions::default())
}

/// Every canonical member of `R_{n1,n2}` over `ctx`, exactly once.
pub fn enumerate_family_with(
    ctx: &FieldCtx,
    n1: usize,
    n2: usize,
    opts: FamilyOptions,
) -> Result<Box<dyn Iterator<Item = RationalFunc> + '_>, PolyError> {
    let fam = Family::new(n1, n2)?;
    Ok(match fam {
        Family::LINEAR_FRACTIONAL => Box::new(
            linear_fractional_params(ctx)
                .map(move |(a, b, c)| linear_fractional(ctx, a, b, c).expect("b != c")),
        ),
        Family::QUADRATIC => Box::new(
            quadratic_params(ctx)
                .filter(move |&(a, b, c)| !opts.irreducible_quadratics || quadratic_is_irreducible(ctx, a, b, c))
                .map(move |(a, b, c)| quadratic(ctx, a, b, c).expect("a != 0")),
        ),
        _ => Box::new(general(ctx, fam, opts)),
    })
}

fn tuples(ctx: &FieldCtx, len: usize) -> impl Iterator<Item = Vec<Elem>> + '_ {
    let q = ctx.q();
    let total = q.pow(len as u32);
    // Highest coefficient most significant, so tuple order is lexicographic.
    (0..total).map(move |mut v| {
        let mut out = vec![Elem::ZERO; len];
        for slot in out.iter_mut().rev() {
            *slot = ctx.from_index(v % q).expect("in range");
            v /= q;
        }
        out
    })
}

fn general(ctx: &FieldCtx, fam: Family, opts: FamilyOptions) -> impl Iterator<Item = RationalFunc> + '_ {
    let Family { n1, n2 } = fam;
    ctx.nonzero().flat_map(move |lead| {
        tuples(ctx, n1).flat_map(move |num_rest| {
            tuples(ctx, n2).filter_map(move |den_rest| {
                // num_rest / den_rest are highest-first
                let mut nc: Vec<Elem> = num_rest.iter().rev().copied().collect();
                nc.push(lead);
                let mut dc: Vec<Elem> = den_rest.iter().rev().copied().collect();
                dc.push(Elem::ONE);
                let num = Poly::new(nc);
                let den = Poly::new(dc);
                if n1 == n2 && (num.constant_term().is_zero() || den.constant_term().is_zero()) {
                    return None;
                }
                if !num.gcd(&den, ctx).is_constant() {
                    return None;
                }
                let f = RationalFunc::new(num, den, ctx).ok()?;
                let (exc, w) = is_exceptional(ctx, &f);
                if exc && !(opts.include_monomials && w.monomial) {
                    return None;
                }
                Some(f)
            })
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffcore::{field_make, FieldCtx};

    #[test]
    fn lf_orbit_count_f5() {
        let f = field_make(5, 1).unwrap();
        let reps: Vec<_> = enumerate_family(&f, 1, 1).unwrap().collect();
        // 4 choices of a, 4·3 ordered (b, c), free action of the involution.
        assert_eq!(reps.len(), 4 * 4 * 3 / 2);
        // every unreduced triple is a representative or the inverse of one
        let set: std::collections::HashSet<_> = reps.iter().cloned().collect();
        for a in f.nonzero() {
            for b in f.nonzero() {
                for c in f.nonzero().filter(|&c| c != b) {
                    let g = linear_fractional(&f, a, b, c).unwrap();
                    assert!(set.contains(&g) ^ set.contains(&g.invert(&f)));
                }
            }
        }
    }

    #[test]
    fn quadratic_count_f5() {
        let f = field_make(5, 1).unwrap();
        let n = enumerate_family(&f, 2, 0).unwrap().count();
        let fr = &f;
        let brute = fr
            .nonzero()
            .flat_map(|a| fr.elements().flat_map(move |b| fr.elements().map(move |c| (a, b, c))))
            .filter(|&(a, b, c)| {
                let sq = crate::polyrat::squarefree_decomp(&Poly::new(vec![c, b, a]), &f).unwrap();
                sq.layers.iter().all(|(_, m)| *m == 1)
            })
            .count();
        assert_eq!(n, 4 * 5 * 4);
        assert_eq!(n, brute);
    }

    #[test]
    fn quadratic_char2_uses_b_nonzero() {
        let f = field_make(2, 2).unwrap();
        assert_eq!(enumerate_family(&f, 2, 0).unwrap().count(), 3 * 3 * 4);
    }

    #[test]
    fn irreducible_quadratics() {
        for q in [5u64, 7, 4, 8, 9] {
            let f = FieldCtx::from_order(q).unwrap();
            let opts = FamilyOptions { irreducible_quadratics: true, ..FamilyOptions::default() };
            // (q−1) leading coefficients times (q² − q)/2 monic irreducibles
            let n = enumerate_family_with(&f, 2, 0, opts).unwrap().count() as u64;
            assert_eq!(n, (q - 1) * (q * q - q) / 2, "q={q}");
        }
    }

    #[test]
    fn bad_family() {
        let f = field_make(5, 1).unwrap();
        assert!(enumerate_family(&f, 0, 1).is_err());
        assert!("0,1".parse::<Family>().is_err());
        assert_eq!("2, 0".parse::<Family>().unwrap(), Family::QUADRATIC);
    }

    #[test]
    fn general_matches_closed_form_membership() {
        // general (1,1) enumeration without orbit reduction has twice the reps
        let f = field_make(7, 1).unwrap();
        let g: Vec<_> = general(&f, Family::LINEAR_FRACTIONAL, FamilyOptions::default()).collect();
        assert_eq!(g.len(), 6 * 6 * 5);
        let g: Vec<_> = general(&f, Family::QUADRATIC, FamilyOptions::default()).collect();
        assert_eq!(g.len(), enumerate_family(&f, 2, 0).unwrap().count());
    }

    #[test]
    fn monomial_flag() {
        let f = field_make(5, 1).unwrap();
        let plain = enumerate_family(&f, 1, 0).unwrap().count();
        let with = enumerate_family_with(&f, 1, 0, FamilyOptions { include_monomials: true, ..FamilyOptions::default() })
            .unwrap()
            .count();
        // a(x+b) with b != 0, plus the 4 monomials ax
        assert_eq!(plain, 16);
        assert_eq!(with, 20);
    }

    #[test]
    fn general_family_is_canonical_and_valid() {
        let f = field_make(3, 1).unwrap();
        let all: Vec<_> = enumerate_family(&f, 2, 1).unwrap().collect();
        let set: std::collections::HashSet<_> = all.iter().cloned().collect();
        assert_eq!(set.len(), all.len());
        for r in &all {
            assert_eq!((r.n1(), r.n2()), (2, 1));
            assert!(!is_exceptional(&f, r).0);
        }
    }
}
