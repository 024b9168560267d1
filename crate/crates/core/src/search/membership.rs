use rayon::prelude::*;
use serde::Serialize;

use super::pair::{pair_search, verify_absent};
use super::SearchError;
use crate::ffcore::arith::gcd;
use crate::ffcore::{Elem, FieldCtx};
use crate::polyrat::family::{linear_fractional, quadratic, quadratic_is_squarefree};
use crate::polyrat::{enumerate_family_with, Family, FamilyOptions, RationalFunc};

/// Result of checking every canonical member of a family over one field.
#[derive(Clone, Debug, Serialize)]
pub struct Membership {
    pub q: u64,
    pub family: Family,
    pub member: bool,
    /// First member in enumeration order with no primitive pair.
    pub failing: Option<RationalFunc>,
}

/// `q ∈ Q_{n1,n2}`: every canonical `f` of the family has a primitive pair.
/// The `(1,1)` and `(2,0)` families use dedicated discrete-log kernels.
pub fn q_in_q(ctx: &FieldCtx, family: Family) -> Result<Membership, SearchError> {
    q_in_q_with(ctx, family, FamilyOptions::default())
}

/// [`q_in_q`] over the members selected by `opts`.
pub fn q_in_q_with(ctx: &FieldCtx, family: Family, opts: FamilyOptions) -> Result<Membership, SearchError> {
    if ctx.order() < 2 {
        return Err(SearchError::Degenerate(ctx.q()));
    }
    let failing = match family {
        Family::LINEAR_FRACTIONAL => kernel_linear_fractional(ctx)
            .map(|(a, b, c)| linear_fractional(ctx, a, b, c).expect("b != c")),
        Family::QUADRATIC => kernel_quadratic(ctx, opts.irreducible_quadratics)
            .map(|(a, b, c)| quadratic(ctx, a, b, c).expect("a != 0")),
        _ => return q_in_q_generic(ctx, family, opts),
    };
    if let Some(f) = &failing {
        if pair_search(ctx, f)?.is_found() || !verify_absent(ctx, f) {
            return Err(SearchError::Internal(format!(
                "kernel reported {} over F_{} but a primitive pair exists",
                f.display(ctx),
                ctx.q()
            )));
        }
    }
    Ok(Membership { q: ctx.q(), family, member: failing.is_none(), failing })
}

/// Membership by running [`pair_search`] on each enumerated member.
pub fn q_in_q_generic(ctx: &FieldCtx, family: Family, opts: FamilyOptions) -> Result<Membership, SearchError> {
    const BATCH: usize = 1 << 12;
    let mut members = enumerate_family_with(ctx, family.n1, family.n2, opts)?;
    loop {
        let batch: Vec<RationalFunc> = members.by_ref().take(BATCH).collect();
        if batch.is_empty() {
            return Ok(Membership { q: ctx.q(), family, member: true, failing: None });
        }
        let outcomes: Vec<bool> = batch
            .par_iter()
            .map(|f| pair_search(ctx, f).map(|w| w.is_found()))
            .collect::<Result<_, _>>()?;
        if let Some(i) = outcomes.iter().position(|found| !found) {
            let failing = batch.into_iter().nth(i);
            return Ok(Membership { q: ctx.q(), family, member: false, failing });
        }
    }
}

/// Shared tables: coprimality of residues mod `q−1` and the primitive `α`.
struct LogTables {
    m: usize,
    coprime: Vec<bool>,
    primitive: Vec<Elem>,
}

impl LogTables {
    fn new(ctx: &FieldCtx) -> LogTables {
        let m = ctx.order();
        let coprime: Vec<bool> = (0..m).map(|t| gcd(t, m) == 1).collect();
        let primitive = (1..m).filter(|&t| coprime[t as usize]).map(|t| ctx.exp_of(t)).collect();
        LogTables { m: m as usize, coprime, primitive }
    }

    /// The first `a` (ascending) such that `dlog a + t` is never coprime to
    /// `q−1` over the residue set `ts`.
    fn first_dead_scalar(&self, ctx: &FieldCtx, ts: &[usize]) -> Option<Elem> {
        ctx.nonzero().find(|&a| {
            let s = ctx.dlog(a).expect("nonzero") as usize;
            !ts.iter().any(|&t| self.coprime[(s + t) % self.m])
        })
    }

    fn residues(&self, logs: impl Iterator<Item = usize>) -> Vec<usize> {
        let mut seen = vec![false; self.m];
        let mut out = Vec::new();
        for t in logs {
            if !seen[t] {
                seen[t] = true;
                out.push(t);
            }
        }
        out
    }
}

/// Least `(a, b, c)` such that `a(x+b)/(x+c)` has no primitive pair.
/// `f(α) = a·(α+b)/(α+c)` is primitive iff
/// `dlog a + dlog(α+b) − dlog(α+c)` is coprime to `q−1`.
fn kernel_linear_fractional(ctx: &FieldCtx) -> Option<(Elem, Elem, Elem)> {
    let tabs = LogTables::new(ctx);
    let m = tabs.m;
    let nonzero: Vec<Elem> = ctx.nonzero().collect();
    nonzero
        .par_iter()
        .filter_map(|&b| {
            ctx.nonzero().filter(|&c| c != b).filter_map(|c| {
                let logs = tabs.primitive.iter().filter_map(|&alpha| {
                    let u = ctx.dlog(ctx.add(alpha, b))? as usize;
                    let v = ctx.dlog(ctx.add(alpha, c))? as usize;
                    Some((u + m - v) % m)
                });
                let ts = tabs.residues(logs);
                tabs.first_dead_scalar(ctx, &ts).map(|a| (a, b, c))
            })
            .min()
        })
        .min()
}

/// Least `(a, b, c)` such that `ax² + bx + c` (square-free) has no
/// primitive pair, via the monic part `x² + Bx + C` with `b = aB`, `c = aC`.
fn kernel_quadratic(ctx: &FieldCtx, irreducible_only: bool) -> Option<(Elem, Elem, Elem)> {
    let tabs = LogTables::new(ctx);
    let q = ctx.q() as usize;
    // (B, C) of the split monic quadratics (x − r)(x − s)
    let mut split = vec![false; if irreducible_only { q * q } else { 0 }];
    if irreducible_only {
        for r in ctx.elements() {
            for s in ctx.elements().filter(|&s| s >= r) {
                let bb = ctx.neg(ctx.add(r, s));
                split[bb.index() as usize * q + ctx.mul(r, s).index() as usize] = true;
            }
        }
    }
    let split = &split;
    let elems: Vec<Elem> = ctx.elements().collect();
    elems
        .par_iter()
        .flat_map_iter(|&bb| {
            let tabs = &tabs;
            ctx.elements()
                .filter(move |&cc| quadratic_is_squarefree(ctx, Elem::ONE, bb, cc))
                .filter(move |&cc| !irreducible_only || !split[bb.index() as usize * q + cc.index() as usize])
                .filter_map(move |cc| {
                    let logs = tabs.primitive.iter().filter_map(|&alpha| {
                        let v = ctx.add(ctx.mul(ctx.add(alpha, bb), alpha), cc);
                        ctx.dlog(v).map(|t| t as usize)
                    });
                    let ts = tabs.residues(logs);
                    tabs.first_dead_scalar(ctx, &ts).map(|a| (a, ctx.mul(a, bb), ctx.mul(a, cc)))
                })
        })
        .min()
}
