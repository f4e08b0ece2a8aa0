//! Digit sets `D_{F,ϑ} = ϑ·(F·ω) ∩ O`.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::domain::FundamentalDomain;
use crate::error::{GnsError, Result};
use crate::linalg::{inverse_rational, mat_vec, rat_mat_vec, Hnf, IntMatrix};
use crate::order::{Order, OrderElement, RationalVector};

/// The digit set of a fundamental domain for a modulus `ϑ`, one digit per
/// residue class, listed in residue order (zero first).
#[derive(Clone, Debug)]
pub struct DigitSet {
    modulus: OrderElement,
    elements: Vec<OrderElement>,
    hnf: Hnf,
    /// `det · P⁻¹` and `det = norm(ϑ)`, for exact quotients.
    adj: IntMatrix,
    det: BigInt,
    lookup: HashMap<Vec<BigInt>, usize>,
}

impl DigitSet {
    pub fn new(order: &Order, domain: &dyn FundamentalDomain, modulus: &OrderElement) -> Result<DigitSet> {
        let k = order.degree();
        if domain.dim() != k {
            return Err(GnsError::DimensionMismatch { expected: k, got: domain.dim() });
        }
        order.check(modulus)?;
        let p = order.mul_matrix(modulus);
        let det = p.det();
        if det.is_zero() {
            return Err(GnsError::ZeroModulus);
        }
        let inv = inverse_rational(&p.rows).ok_or(GnsError::ZeroModulus)?;
        let adj: IntMatrix = inv
            .iter()
            .map(|row| row.iter().map(|x| (x * crate::ball::rat_int(&det)).to_integer()).collect())
            .collect();
        let hnf = order.modulus_hnf(modulus)?;
        let mut elements = Vec::new();
        let mut lookup = HashMap::new();
        for rho in hnf.transversal() {
            let b = RationalVector::new(rat_mat_vec(&inv, &rho));
            let m = domain.locate(&b)?;
            let shift = order.mul(modulus, &OrderElement::new(m));
            let d = &OrderElement::new(rho.clone()) - &shift;
            lookup.insert(rho, elements.len());
            elements.push(d);
        }
        Ok(DigitSet { modulus: modulus.clone(), elements, hnf, adj, det, lookup })
    }

    /// As [`DigitSet::new`] but rejects unit moduli, whose digit set is `{0}`.
    pub fn strict(order: &Order, domain: &dyn FundamentalDomain, modulus: &OrderElement) -> Result<DigitSet> {
        if order.norm(modulus).abs().is_one() {
            return Err(GnsError::DegenerateModulus);
        }
        DigitSet::new(order, domain, modulus)
    }

    pub fn modulus(&self) -> &OrderElement {
        &self.modulus
    }

    pub fn elements(&self) -> &[OrderElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn hnf(&self) -> &Hnf {
        &self.hnf
    }

    /// `det · P⁻¹` where `P` multiplies by the modulus.
    pub fn adjugate(&self) -> &IntMatrix {
        &self.adj
    }

    pub fn norm(&self) -> &BigInt {
        &self.det
    }

    /// Index of the digit congruent to `beta`.
    pub fn class_of(&self, beta: &OrderElement) -> usize {
        self.lookup[&self.hnf.reduce(&beta.coords)]
    }

    pub fn contains(&self, e: &OrderElement) -> bool {
        self.elements[self.class_of(e)] == *e
    }

    /// Exact quotient `(beta − d) / ϑ` for `d ≡ beta`.
    fn quotient(&self, diff: &OrderElement) -> Result<OrderElement> {
        let num = mat_vec(&self.adj, &diff.coords);
        let mut q = Vec::with_capacity(num.len());
        for x in num {
            if !(&x % &self.det).is_zero() {
                return Err(GnsError::Internal("digit quotient is not integral".into()));
            }
            q.push(x / &self.det);
        }
        Ok(OrderElement::new(q))
    }

    /// The digit `d ≡ β (mod ϑ)` and the quotient `q` with `β = d + q·ϑ`.
    pub fn digit_for(&self, beta: &OrderElement) -> Result<(OrderElement, OrderElement)> {
        let d = self.elements[self.class_of(beta)].clone();
        let q = self.quotient(&(beta - &d))?;
        Ok((d, q))
    }
}

impl fmt::Display for DigitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.elements {
            let parts: Vec<String> = d.coords.iter().map(|c| c.to_string()).collect();
            writeln!(f, "{}", parts.join(" "))?;
        }
        Ok(())
    }
}

/// Brute-force digit set: all elements of `O` in the bounding box of
/// `ϑ·(F·ω)` whose quotient by `ϑ` lies in `F`. Intended for small moduli.
pub fn brute_force_digits(order: &Order, domain: &dyn FundamentalDomain, modulus: &OrderElement) -> Result<Vec<OrderElement>> {
    let k = order.degree();
    let p = order.mul_matrix(modulus);
    let inv = inverse_rational(&p.rows).ok_or(GnsError::ZeroModulus)?;
    let (lo, hi) = domain.bbox();
    // image of the box corners bounds the coordinates of ϑ·b
    let mut bounds = vec![BigInt::zero(); k];
    for (i, row) in p.rows.iter().enumerate() {
        let mut s = crate::ball::Rat::zero();
        for (j, c) in row.iter().enumerate() {
            let m = lo[j].abs().max(hi[j].abs());
            s += crate::ball::rat_int(&c.abs()) * m;
        }
        bounds[i] = crate::ball::floor_rat(&s) + 1;
    }
    let mut out = Vec::new();
    let mut cur: Vec<BigInt> = bounds.iter().map(|b| -b).collect();
    loop {
        let b = RationalVector::new(rat_mat_vec(&inv, &cur));
        if domain.contains(&b) {
            out.push(OrderElement::new(cur.clone()));
        }
        let mut i = 0;
        loop {
            if i == k {
                return Ok(out);
            }
            cur[i] += 1;
            if cur[i] <= bounds[i] {
                break;
            }
            cur[i] = -bounds[i].clone();
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::rat;
    use crate::domain::{BoxDomain, SailDomain};

    fn z() -> Order {
        Order::from_i64s(&[-1, 1]).unwrap()
    }

    fn ints(d: &DigitSet) -> Vec<i64> {
        let mut v: Vec<i64> = d.elements().iter().map(|e| i64::try_from(&e.coords[0]).unwrap()).collect();
        v.sort();
        v
    }

    #[test]
    fn classical_digit_sets() {
        let o = z();
        let f = BoxDomain::unit(1);
        assert_eq!(ints(&DigitSet::new(&o, &f, &o.int(10)).unwrap()), (0..10).collect::<Vec<_>>());
        assert_eq!(ints(&DigitSet::new(&o, &f, &o.int(-2)).unwrap()), vec![-1, 0]);
        let s = BoxDomain::symmetric(1);
        assert_eq!(ints(&DigitSet::new(&o, &s, &o.int(3)).unwrap()), vec![-1, 0, 1]);
        assert_eq!(DigitSet::new(&o, &f, &o.int(7)).unwrap().elements()[0], o.int(0));
        assert_eq!(DigitSet::strict(&o, &f, &o.int(-1)).unwrap_err(), GnsError::DegenerateModulus);
        assert_eq!(DigitSet::new(&o, &f, &o.int(1)).unwrap().len(), 1);
    }

    #[test]
    fn sail_digits() {
        let g = Order::from_i64s(&[1, 0, 1]).unwrap();
        let d = DigitSet::new(&g, &SailDomain::euclidean(), &g.element(&[1, 1]).unwrap()).unwrap();
        assert_eq!(d.elements(), &[g.zero(), g.element(&[0, -1]).unwrap()]);
        let b = g.to_rational_coords(&g.element(&[0, -1]).unwrap(), &g.element(&[1, 1]).unwrap()).unwrap();
        assert_eq!(b, RationalVector::from_pairs(&[(-1, 2), (-1, 2)]));
    }

    #[test]
    fn digit_lookup() {
        let o = z();
        let d = DigitSet::new(&o, &BoxDomain::unit(1), &o.int(2)).unwrap();
        assert_eq!(d.digit_for(&o.int(7)).unwrap(), (o.int(1), o.int(3)));
        assert_eq!(d.digit_for(&o.int(-1)).unwrap(), (o.int(1), o.int(-1)));
        let g = Order::from_i64s(&[1, 0, 1]).unwrap();
        let t = g.element(&[-1, 1]).unwrap();
        let d = DigitSet::new(&g, &BoxDomain::unit(2), &t).unwrap();
        assert_eq!(d.digit_for(&g.one()).unwrap(), (g.int(-1), g.element(&[-1, -1]).unwrap()));
        assert!(d.contains(&g.int(-1)));
        assert!(!d.contains(&g.one()));
    }

    #[test]
    fn brute_force_agrees() {
        let g = Order::from_i64s(&[1, 0, 1]).unwrap();
        let f = BoxDomain::new(vec![rat(-1, 2), rat(-1, 2)]).unwrap();
        let t = g.element(&[2, 3]).unwrap();
        let mut a = DigitSet::new(&g, &f, &t).unwrap().elements().to_vec();
        let mut b = brute_force_digits(&g, &f, &t).unwrap();
        a.sort();
        b.sort();
        assert_eq!(a, b);
        assert_eq!(a.len(), 13);
    }
}
