//! Square-free decomposition over `F_q` (Yun's algorithm with the
//! characteristic-p correction).

use serde::{Deserialize, Serialize};

use super::{Poly, PolyError};
use crate::ffcore::{Elem, FieldCtx};

/// `p = unit · Π layer^multiplicity`, layers monic, square-free, pairwise
/// coprime and nonconstant, sorted by multiplicity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquarefreeDecomposition {
    pub unit: Elem,
    pub layers: Vec<(Poly, u32)>,
}

impl SquarefreeDecomposition {
    pub fn recompose(&self, f: &FieldCtx) -> Poly {
        self.layers
            .iter()
            .fold(Poly::constant(self.unit), |acc, (a, m)| acc.mul(&a.pow(*m, f), f))
    }

    /// Degree of the radical: total degree of the distinct layers.
    pub fn radical_degree(&self) -> usize {
        self.layers.iter().map(|(a, _)| a.degree().unwrap_or(0)).sum()
    }
}

pub fn squarefree_decomp(poly: &Poly, f: &FieldCtx) -> Result<SquarefreeDecomposition, PolyError> {
    let unit = poly.leading().ok_or(PolyError::ZeroPolynomial)?;
    let mut layers = Vec::new();
    monic_layers(&poly.monic(f), f, 1, &mut layers);
    layers.sort_by_key(|(_, m)| *m);
    Ok(SquarefreeDecomposition { unit, layers })
}

fn monic_layers(poly: &Poly, f: &FieldCtx, scale: u32, out: &mut Vec<(Poly, u32)>) {
    if poly.is_constant() {
        return;
    }
    let p = f.p() as usize;
    let d = poly.derivative(f);
    let mut c = poly.gcd(&d, f);
    let mut w = poly.div_exact(&c, f).expect("gcd divides");
    let mut i = 1u32;
    while !w.is_constant() {
        let y = w.gcd(&c, f);
        let fac = w.div_exact(&y, f).expect("gcd divides");
        if !fac.is_constant() {
            out.push((fac, i * scale));
        }
        c = c.div_exact(&y, f).expect("gcd divides");
        w = y;
        i += 1;
    }
    if !c.is_constant() {
        // Every surviving multiplicity is divisible by p, so c(x) = h(x^p).
        let h = c.deflate(p);
        let root = Poly::new(h.coeffs().iter().map(|&a| f.pth_root(a)).collect());
        monic_layers(&root, f, scale * p as u32, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffcore::{field_make, FieldCtx};

    fn lin(f: &FieldCtx, a: u64) -> Poly {
        Poly::new(vec![f.elem(a), Elem::ONE])
    }

    #[test]
    fn constructed_input() {
        let f = field_make(7, 1).unwrap();
        let p = lin(&f, 1).pow(2, &f).mul(&lin(&f, 2), &f);
        let d = squarefree_decomp(&p, &f).unwrap();
        assert_eq!(d.layers, vec![(lin(&f, 2), 1), (lin(&f, 1), 2)]);
        assert_eq!(d.recompose(&f), p);
    }

    #[test]
    fn frobenius_identity() {
        let f = field_make(7, 1).unwrap();
        let p = Poly::monomial(Elem::ONE, 7).add(&Poly::one(), &f);
        let d = squarefree_decomp(&p, &f).unwrap();
        assert_eq!(d.layers, vec![(lin(&f, 1), 7)]);
    }

    #[test]
    fn mixed_multiplicities_over_extension() {
        let f = field_make(3, 2).unwrap();
        let a = lin(&f, 1);
        let b = Poly::new(vec![f.from_index(5).unwrap(), f.from_index(4).unwrap(), Elem::ONE]);
        let c = lin(&f, 2);
        // a^3 · b^4 · c^6 with the x^3 layers needing p-th roots of non-prime-field constants
        let p = a.pow(3, &f).mul(&b.pow(4, &f), &f).mul(&c.pow(6, &f), &f).scale(f.from_index(7).unwrap(), &f);
        let d = squarefree_decomp(&p, &f).unwrap();
        assert_eq!(d.recompose(&f), p);
        for (i, (a, _)) in d.layers.iter().enumerate() {
            let da = a.derivative(&f);
            assert!(da.is_zero() || a.gcd(&da, &f) == Poly::one());
            for (b, _) in &d.layers[i + 1..] {
                assert_eq!(a.gcd(b, &f), Poly::one());
            }
        }
        assert!(d.layers.iter().any(|(_, m)| m % 3 == 0));
    }

    #[test]
    fn zero_is_rejected() {
        let f = field_make(5, 1).unwrap();
        assert_eq!(squarefree_decomp(&Poly::zero(), &f).unwrap_err(), PolyError::ZeroPolynomial);
        let d = squarefree_decomp(&Poly::constant(f.elem(3)), &f).unwrap();
        assert!(d.layers.is_empty());
        assert_eq!(d.unit, f.elem(3));
    }
}
