//! Polynomials over an order and over `Z`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::ball::{eval_poly, Ball, Rat};
use crate::error::{GnsError, Result};
use crate::order::{Order, OrderElement};
use crate::roots::isolate_roots;

/// Integer polynomial, lowest degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntPoly {
    pub coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64s(c: &[i64]) -> Self {
        IntPoly::new(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: BigInt) -> Self {
        IntPoly::new(vec![c])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.lead().is_some_and(One::is_one)
    }

    pub fn add(&self, o: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let z = BigInt::zero();
        IntPoly::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&z) + o.coeffs.get(i).unwrap_or(&z))
                .collect(),
        )
    }

    pub fn neg(&self) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, o: &IntPoly) -> IntPoly {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &IntPoly) -> IntPoly {
        if self.is_zero() || o.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }

    /// Quotient of an exact division over `Z`, or `None` if not exact.
    pub fn div_exact(&self, d: &IntPoly) -> Option<IntPoly> {
        let dl = d.lead()?;
        let dn = d.coeffs.len();
        let mut r = self.coeffs.clone();
        if r.len() < dn {
            return if self.is_zero() { Some(IntPoly::zero()) } else { None };
        }
        let mut q = vec![BigInt::zero(); r.len() - dn + 1];
        for i in (0..q.len()).rev() {
            let c = &r[i + dn - 1];
            if c.is_zero() {
                continue;
            }
            if !(c % dl).is_zero() {
                return None;
            }
            let f = c / dl;
            for (j, dc) in d.coeffs.iter().enumerate() {
                r[i + j] -= &f * dc;
            }
            q[i] = f;
        }
        if r.iter().all(Zero::is_zero) {
            Some(IntPoly::new(q))
        } else {
            None
        }
    }

    pub fn derivative(&self) -> IntPoly {
        IntPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, c)| c * BigInt::from(j))
                .collect(),
        )
    }

    /// `x^deg · F(1/x)`.
    pub fn reciprocal(&self) -> IntPoly {
        IntPoly::new(self.coeffs.iter().rev().cloned().collect())
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_ball(&self, z: &Ball) -> Ball {
        let c: Vec<Ball> = self.coeffs.iter().map(Ball::from_int).collect();
        eval_poly(&c, z)
    }

    fn to_rat(&self) -> Vec<Rat> {
        self.coeffs.iter().map(|c| Rat::from_integer(c.clone())).collect()
    }

    fn from_rat_primitive(mut v: Vec<Rat>) -> IntPoly {
        while v.last().is_some_and(Zero::is_zero) {
            v.pop();
        }
        if v.is_empty() {
            return IntPoly::zero();
        }
        let lcm = v.iter().fold(BigInt::one(), |acc, c| num_integer::lcm(acc, c.denom().clone()));
        let ints: Vec<BigInt> = v.iter().map(|c| (c * Rat::from_integer(lcm.clone())).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, c| num_integer::gcd(acc, c.clone()));
        let sign = if ints.last().unwrap().is_negative() { -BigInt::one() } else { BigInt::one() };
        IntPoly::new(ints.into_iter().map(|c| c / &g * &sign).collect())
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            }
            first = false;
            match (j, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "x")?,
                (1, false) => write!(f, "{mag}x")?,
                (_, true) => write!(f, "x^{j}")?,
                (_, false) => write!(f, "{mag}x^{j}")?,
            }
        }
        Ok(())
    }
}

fn rat_rem(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut r = a.to_vec();
    let bn = b.len();
    let bl = b.last().unwrap().clone();
    while r.len() >= bn {
        let c = r.last().unwrap() / &bl;
        let off = r.len() - bn;
        for (j, bc) in b.iter().enumerate() {
            r[off + j] -= &c * bc;
        }
        r.pop();
        while r.last().is_some_and(Zero::is_zero) {
            r.pop();
        }
    }
    r
}

fn rat_quo(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut r = a.to_vec();
    let bn = b.len();
    let bl = b.last().unwrap().clone();
    let mut q = vec![Rat::zero(); (r.len() + 1).saturating_sub(bn)];
    while r.len() >= bn {
        let c = r.last().unwrap() / &bl;
        let off = r.len() - bn;
        for (j, bc) in b.iter().enumerate() {
            r[off + j] -= &c * bc;
        }
        q[off] = c;
        r.pop();
    }
    q
}

/// Greatest common divisor over `Q`, returned primitive with positive leading coefficient.
pub fn gcd_rational(a: &IntPoly, b: &IntPoly) -> IntPoly {
    let mut x = a.to_rat();
    let mut y = b.to_rat();
    while !y.is_empty() {
        let r = rat_rem(&x, &y);
        x = y;
        y = r;
        // keep sizes in check
        if let Some(l) = y.last().cloned() {
            for c in y.iter_mut() {
                *c /= &l;
            }
        }
    }
    IntPoly::from_rat_primitive(x)
}

/// Squarefree part `F / gcd(F, F')`, primitive.
pub fn squarefree_part(f: &IntPoly) -> IntPoly {
    let g = gcd_rational(f, &f.derivative());
    if g.degree().unwrap_or(0) == 0 {
        return IntPoly::from_rat_primitive(f.to_rat());
    }
    IntPoly::from_rat_primitive(rat_quo(&f.to_rat(), &g.to_rat()))
}

pub fn is_squarefree(f: &IntPoly) -> bool {
    gcd_rational(f, &f.derivative()).degree().unwrap_or(0) == 0
}

/// Why a polynomial fails to be expansive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NonExpansiveReason {
    /// `F(0) = 0`.
    ZeroRoot,
    /// `F` has a nontrivial common factor with its reciprocal; the factor is reported.
    ReciprocalFactor(IntPoly),
    /// A certified root of modulus below one.
    RootInsideDisk,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expansivity {
    Expansive,
    NotExpansive(NonExpansiveReason),
    /// Enclosures still straddle the unit circle at the given precision.
    Inconclusive(u32),
}

impl Expansivity {
    pub fn is_expansive(&self) -> bool {
        matches!(self, Expansivity::Expansive)
    }
}

/// Certified test whether every complex root of `F` has modulus greater than one.
pub fn is_expansive(f: &IntPoly, precision_cap: u32) -> Result<Expansivity> {
    let n = f.degree().ok_or_else(|| GnsError::InvalidArgument("zero polynomial".into()))?;
    if n == 0 {
        return Ok(Expansivity::Expansive);
    }
    if f.coeffs[0].is_zero() {
        return Ok(Expansivity::NotExpansive(NonExpansiveReason::ZeroRoot));
    }
    // a common root z of F and its reciprocal makes 1/z a root as well
    let g = gcd_rational(f, &f.reciprocal());
    if g.degree().unwrap_or(0) > 0 {
        return Ok(Expansivity::NotExpansive(NonExpansiveReason::ReciprocalFactor(g)));
    }
    // no root on the unit circle, so refinement terminates
    let sf = squarefree_part(f);
    let lead = Rat::from_integer(sf.lead().unwrap().clone());
    let coeffs: Vec<Ball> = sf.coeffs.iter().map(|c| Ball::real(Rat::from_integer(c.clone()) / &lead)).collect();
    let one = Rat::one();
    let mut bits = 32u32;
    loop {
        let roots = isolate_roots(|_| Ok(coeffs.clone()), bits, precision_cap)?;
        if roots.iter().any(|r| r.abs_upper() < one) {
            return Ok(Expansivity::NotExpansive(NonExpansiveReason::RootInsideDisk));
        }
        if roots.iter().all(|r| r.abs_lower() > one) {
            return Ok(Expansivity::Expansive);
        }
        if bits >= precision_cap {
            return Ok(Expansivity::Inconclusive(precision_cap));
        }
        bits = (bits * 2).min(precision_cap);
    }
}

/// Polynomial with coefficients in an order, lowest degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OPoly {
    pub coeffs: Vec<OrderElement>,
}

impl OPoly {
    pub fn new(mut coeffs: Vec<OrderElement>) -> Self {
        while coeffs.last().is_some_and(OrderElement::is_zero) {
            coeffs.pop();
        }
        OPoly { coeffs }
    }

    /// Polynomial over `Z` (degree-one order).
    pub fn from_ints(c: &[i64]) -> Self {
        OPoly::new(c.iter().map(|&x| OrderElement::from_i64s(&[x])).collect())
    }

    /// Coefficients given as coordinate vectors.
    pub fn from_coords(c: &[Vec<i64>]) -> Self {
        OPoly::new(c.iter().map(|v| OrderElement::from_i64s(v)).collect())
    }

    pub fn zero() -> Self {
        OPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: OrderElement) -> Self {
        OPoly::new(vec![c])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Coefficient of `x^j` in an order of degree `k`.
    pub fn coeff(&self, j: usize, k: usize) -> OrderElement {
        self.coeffs.get(j).cloned().unwrap_or_else(|| OrderElement::zero(k))
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| c.as_integer().is_some_and(One::is_one))
    }

    pub fn add(&self, o: &OPoly) -> OPoly {
        let k = self.k().or(o.k()).unwrap_or(1);
        let n = self.coeffs.len().max(o.coeffs.len());
        OPoly::new((0..n).map(|i| &self.coeff(i, k) + &o.coeff(i, k)).collect())
    }

    pub fn neg(&self) -> OPoly {
        OPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, o: &OPoly) -> OPoly {
        self.add(&o.neg())
    }

    fn k(&self) -> Option<usize> {
        self.coeffs.first().map(OrderElement::degree)
    }

    pub fn mul(&self, order: &Order, o: &OPoly) -> OPoly {
        if self.is_zero() || o.is_zero() {
            return OPoly::zero();
        }
        let mut out = vec![order.zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &order.mul(a, b);
            }
        }
        OPoly::new(out)
    }

    pub fn scale(&self, order: &Order, c: &OrderElement) -> OPoly {
        OPoly::new(self.coeffs.iter().map(|a| order.mul(a, c)).collect())
    }

    /// Multiplies by `x^h`.
    pub fn shift(&self, h: usize, k: usize) -> OPoly {
        if self.is_zero() {
            return OPoly::zero();
        }
        let mut c = vec![OrderElement::zero(k); h];
        c.extend(self.coeffs.iter().cloned());
        OPoly::new(c)
    }

    /// Remainder modulo a monic `p`.
    pub fn rem(&self, order: &Order, p: &OPoly) -> Result<OPoly> {
        if !p.is_monic() {
            return Err(GnsError::NotMonic);
        }
        let n = p.coeffs.len() - 1;
        let mut r = self.coeffs.clone();
        while r.len() > n {
            let top = r.pop().unwrap();
            if top.is_zero() {
                continue;
            }
            let off = r.len() - n;
            for (j, pc) in p.coeffs[..n].iter().enumerate() {
                r[off + j] = &r[off + j] - &order.mul(&top, pc);
            }
        }
        Ok(OPoly::new(r))
    }

    /// Exact evaluation at `β ∈ O`.
    pub fn evaluate(&self, order: &Order, beta: &OrderElement) -> OrderElement {
        self.coeffs
            .iter()
            .rev()
            .fold(order.zero(), |acc, c| &order.mul(&acc, beta) + c)
    }

    /// Enclosure of `a^{(i)}(z)` for the `i`-th embedding.
    pub fn evaluate_embedded(&self, order: &Order, i: usize, z: &Ball, bits: u32) -> Result<Ball> {
        if i >= order.degree() {
            return Err(GnsError::DimensionMismatch { expected: order.degree(), got: i });
        }
        let mut cs = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            cs.push(order.conjugate_values(c, bits)?[i].clone());
        }
        Ok(eval_poly(&cs, z))
    }

    /// Certified upper bound of the height (largest modulus of a conjugate of a coefficient).
    pub fn height(&self, order: &Order, bits: u32) -> Result<Rat> {
        let mut h = Rat::zero();
        for c in &self.coeffs {
            if let Some(n) = c.as_integer() {
                let a = Rat::from_integer(n.abs());
                if a > h {
                    h = a;
                }
                continue;
            }
            for v in order.conjugate_values(c, bits)? {
                let a = v.abs_upper();
                if a > h {
                    h = a;
                }
            }
        }
        Ok(h)
    }

    /// Conjugate coefficient enclosures `p^{(i)}_j`, one vector per embedding.
    pub fn conjugate_coeffs(&self, order: &Order, bits: u32) -> Result<Vec<Vec<Ball>>> {
        let k = order.degree();
        let mut out = vec![Vec::with_capacity(self.coeffs.len()); k];
        for c in &self.coeffs {
            let v = order.conjugate_values(c, bits)?;
            for (i, b) in v.into_iter().enumerate() {
                out[i].push(b);
            }
        }
        Ok(out)
    }
}

impl fmt::Display for OPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        if let Some(ints) = self.coeffs.iter().map(|c| c.as_integer().cloned()).collect::<Option<Vec<_>>>() {
            return write!(f, "{}", IntPoly::new(ints));
        }
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let unit = c.as_integer().is_some_and(|v| v.is_one());
            match (j, unit) {
                (0, _) => write!(f, "{c}")?,
                (1, true) => write!(f, "x")?,
                (1, false) => write!(f, "{c}*x")?,
                (_, true) => write!(f, "x^{j}")?,
                (_, false) => write!(f, "{c}*x^{j}")?,
            }
        }
        Ok(())
    }
}

/// Bareiss determinant over `Z[x]`.
pub(crate) fn det_poly(m: &[Vec<IntPoly>]) -> IntPoly {
    let n = m.len();
    if n == 0 {
        return IntPoly::constant(BigInt::one());
    }
    let mut a = m.to_vec();
    let mut neg = false;
    let mut prev = IntPoly::constant(BigInt::one());
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    neg = !neg;
                }
                None => return IntPoly::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = a[i][j].mul(&a[k][k]).sub(&a[i][k].mul(&a[k][j]));
                a[i][j] = v.div_exact(&prev).expect("Bareiss division is exact");
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if neg {
        d.neg()
    } else {
        d
    }
}

/// The integer polynomial `Π_i p^{(i)}(x)`, as the resultant in `y` of the
/// minimal polynomial `f(y)` and `p` with `θ` replaced by `y`.
pub fn conjugate_product(order: &Order, p: &OPoly) -> Result<IntPoly> {
    if !p.is_monic() {
        return Err(GnsError::NotMonic);
    }
    let k = order.degree();
    let f = order.min_poly();
    // g(y) = Σ_c g_c(x) y^c with formal degree k-1
    let g: Vec<IntPoly> = (0..k)
        .map(|c| IntPoly::new(p.coeffs.iter().map(|e| e.coords[c].clone()).collect()))
        .collect();
    let size = 2 * k - 1;
    let mut syl = vec![vec![IntPoly::zero(); size]; size];
    // k-1 rows of f, k rows of g, highest y-power in the first column
    for r in 0..k - 1 {
        for (c, fc) in f.iter().enumerate() {
            syl[r][r + k - c] = IntPoly::constant(fc.clone());
        }
    }
    for r in 0..k {
        for (c, gc) in g.iter().enumerate() {
            syl[k - 1 + r][r + k - 1 - c] = gc.clone();
        }
    }
    let res = det_poly(&syl);
    Ok(if res.lead().is_some_and(Signed::is_negative) { res.neg() } else { res })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::rat;
    use crate::roots::DEFAULT_PRECISION_CAP;

    fn ip(c: &[i64]) -> IntPoly {
        IntPoly::from_i64s(c)
    }

    #[test]
    fn remainders() {
        let z = Order::from_i64s(&[-1, 1]).unwrap();
        let r = OPoly::from_ints(&[0, 0, 1]).rem(&z, &OPoly::from_ints(&[1, 0, 1])).unwrap();
        assert_eq!(r, OPoly::from_ints(&[-1]));
        let r = OPoly::from_ints(&[0, 1, 0, 1]).rem(&z, &OPoly::from_ints(&[-2, 0, 1])).unwrap();
        assert_eq!(r, OPoly::from_ints(&[0, 3]));
        let d = OPoly::from_ints(&[5]);
        assert_eq!(d.rem(&z, &OPoly::from_ints(&[2, 1])).unwrap(), d);
        assert_eq!(d.rem(&z, &OPoly::from_ints(&[2, 2])), Err(GnsError::NotMonic));
    }

    #[test]
    fn heights() {
        let z = Order::from_i64s(&[-1, 1]).unwrap();
        assert_eq!(OPoly::from_ints(&[3]).height(&z, 30).unwrap(), rat(3, 1));
        assert_eq!(OPoly::zero().height(&z, 30).unwrap(), rat(0, 1));
        let g = Order::from_i64s(&[1, 0, 1]).unwrap();
        let a = OPoly::from_coords(&[vec![0, 0], vec![2, 1]]);
        let h = a.height(&g, 40).unwrap();
        assert!(h >= rat(22360679, 10000000) && h < rat(2236068, 1000000));
    }

    #[test]
    fn conjugate_products() {
        let g = Order::from_i64s(&[1, 0, 1]).unwrap();
        let p = OPoly::from_coords(&[vec![1, 1], vec![1, 0]]);
        assert_eq!(conjugate_product(&g, &p).unwrap(), ip(&[2, 2, 1]));
        let p = OPoly::from_coords(&[vec![0, 0], vec![0, 0], vec![1, 0]]);
        assert_eq!(conjugate_product(&g, &p).unwrap(), ip(&[0, 0, 0, 0, 1]));
        let z = Order::from_i64s(&[-1, 1]).unwrap();
        let p = OPoly::from_ints(&[7, -3, 1]);
        assert_eq!(conjugate_product(&z, &p).unwrap(), ip(&[7, -3, 1]));
    }

    #[test]
    fn expansivity() {
        let cap = DEFAULT_PRECISION_CAP;
        assert_eq!(is_expansive(&ip(&[2, 2, 1]), cap).unwrap(), Expansivity::Expansive);
        assert!(matches!(
            is_expansive(&ip(&[-1, 1]), cap).unwrap(),
            Expansivity::NotExpansive(NonExpansiveReason::ReciprocalFactor(_))
        ));
        assert!(!is_expansive(&ip(&[2, -3, 1]), cap).unwrap().is_expansive());
        assert_eq!(
            is_expansive(&ip(&[0, 0, 1]), cap).unwrap(),
            Expansivity::NotExpansive(NonExpansiveReason::ZeroRoot)
        );
        // roots near -0.44 and -4.56
        assert_eq!(
            is_expansive(&ip(&[2, 5, 1]), cap).unwrap(),
            Expansivity::NotExpansive(NonExpansiveReason::RootInsideDisk)
        );
        // repeated expanding root
        assert_eq!(is_expansive(&ip(&[9, -6, 1]), cap).unwrap(), Expansivity::Expansive);
    }

    #[test]
    fn evaluation() {
        let z = Order::from_i64s(&[-1, 1]).unwrap();
        assert_eq!(OPoly::from_ints(&[2, 1]).evaluate(&z, &z.int(3)), z.int(5));
        let sq = OPoly::from_ints(&[0, 0, 1]);
        let v = sq.evaluate_embedded(&z, 0, &Ball::real(rat(-2, 1)), 30).unwrap();
        assert!(v.contains_point(&rat(4, 1), &rat(0, 1)));
        let g = Order::from_i64s(&[1, 0, 1]).unwrap();
        let a = OPoly::from_coords(&[vec![0, 1], vec![1, 0]]);
        assert_eq!(a.evaluate(&g, &g.basis(1)), g.element(&[0, 2]).unwrap());
    }

    #[test]
    fn gcd_and_squarefree() {
        let g = gcd_rational(&ip(&[-1, 0, 1]), &ip(&[-1, 1]));
        assert_eq!(g, ip(&[-1, 1]));
        assert_eq!(squarefree_part(&ip(&[9, -6, 1])), ip(&[-3, 1]));
        assert!(is_squarefree(&ip(&[2, 2, 1])));
        assert!(!is_squarefree(&ip(&[1, 2, 1])));
    }
}
