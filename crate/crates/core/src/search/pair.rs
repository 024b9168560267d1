use serde::Serialize;

use super::SearchError;
use crate::ffcore::arith::gcd;
use crate::ffcore::{Elem, FieldCtx};
use crate::polyrat::{is_exceptional, RationalFunc};

/// Outcome of a primitive-pair search for one `f`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PairWitness {
    Found {
        alpha: Elem,
        f_alpha: Elem,
        alpha_dlog: u64,
        falpha_dlog: u64,
    },
    /// No primitive pair; `examined` primitive `α` were tried, which is
    /// `φ(q−1)`.
    Absent { examined: u64 },
}

impl PairWitness {
    pub fn is_found(&self) -> bool {
        matches!(self, PairWitness::Found { .. })
    }
}

/// Searches for a primitive pair, taking `α = g^t` with `t` coprime to
/// `q−1` in ascending order. Exceptional `f` are refused.
pub fn pair_exists(ctx: &FieldCtx, f: &RationalFunc) -> Result<PairWitness, SearchError> {
    if is_exceptional(ctx, f).0 {
        return Err(SearchError::Exceptional);
    }
    pair_search(ctx, f)
}

/// [`pair_exists`] without the exceptionality check.
pub fn pair_search(ctx: &FieldCtx, f: &RationalFunc) -> Result<PairWitness, SearchError> {
    let m = ctx.order();
    if m < 2 {
        return Err(SearchError::Degenerate(ctx.q()));
    }
    let mut examined = 0;
    for t in (1..m).filter(|&t| gcd(t, m) == 1) {
        examined += 1;
        let alpha = ctx.exp_of(t);
        let Some(v) = f.eval(alpha, ctx) else { continue };
        if let Some(s) = ctx.dlog(v) {
            if gcd(s, m) == 1 {
                return Ok(PairWitness::Found { alpha, f_alpha: v, alpha_dlog: t, falpha_dlog: s });
            }
        }
    }
    Ok(PairWitness::Absent { examined })
}

/// Independent confirmation that `f` has no primitive pair: walks every
/// element in descending order and tests primitivity directly.
pub fn verify_absent(ctx: &FieldCtx, f: &RationalFunc) -> bool {
    let mut elems: Vec<Elem> = ctx.elements().collect();
    elems.reverse();
    !elems.into_iter().any(|a| {
        ctx.is_primitive(a) && f.eval(a, ctx).is_some_and(|v| ctx.is_primitive(v))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffcore::field_make;
    use crate::polyrat::family::linear_fractional;
    use crate::polyrat::Poly;

    #[test]
    fn x_plus_one_over_f13() {
        let f = field_make(13, 1).unwrap();
        let g = RationalFunc::polynomial(Poly::new(vec![f.elem(1), f.elem(1)]), &f).unwrap();
        let w = pair_exists(&f, &g).unwrap();
        let PairWitness::Found { alpha, f_alpha, alpha_dlog, .. } = w else { panic!("{w:?}") };
        assert!(f.is_primitive(alpha) && f.is_primitive(f_alpha));
        assert_eq!(f_alpha, f.add(alpha, Elem::ONE));
        // 6 → 7 is a primitive pair; the search may stop earlier in dlog order
        assert!(f.is_primitive(f.elem(6)) && f.is_primitive(f.elem(7)));
        assert!(alpha_dlog <= f.dlog(f.elem(6)).unwrap());
    }

    #[test]
    fn some_linear_fractional_fails_over_f13() {
        let f = field_make(13, 1).unwrap();
        let mut absent = 0;
        for a in f.nonzero() {
            for b in f.nonzero() {
                for c in f.nonzero().filter(|&c| c != b) {
                    let g = linear_fractional(&f, a, b, c).unwrap();
                    let w = pair_exists(&f, &g).unwrap();
                    assert_eq!(w.is_found(), !verify_absent(&f, &g));
                    if let PairWitness::Absent { examined } = w {
                        assert_eq!(examined, 4);
                        absent += 1;
                    }
                }
            }
        }
        assert!(absent > 0);
    }

    #[test]
    fn refusals() {
        let f = field_make(13, 1).unwrap();
        let sq = RationalFunc::polynomial(Poly::new(vec![f.elem(1), f.elem(2), f.elem(1)]), &f).unwrap();
        assert_eq!(pair_exists(&f, &sq).unwrap_err(), SearchError::Exceptional);
        let mono = RationalFunc::polynomial(Poly::x(), &f).unwrap();
        assert_eq!(pair_exists(&f, &mono).unwrap_err(), SearchError::Exceptional);
        assert!(pair_search(&f, &mono).unwrap().is_found());
        let f2 = field_make(2, 1).unwrap();
        let g = RationalFunc::polynomial(Poly::new(vec![Elem::ONE, Elem::ONE]), &f2).unwrap();
        assert_eq!(pair_exists(&f2, &g).unwrap_err(), SearchError::Degenerate(2));
    }
}
