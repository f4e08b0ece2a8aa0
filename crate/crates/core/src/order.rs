//! Arithmetic in a monogenic order `Z[θ]`.
//!
//! Elements are integer coordinate vectors with respect to the power basis
//! `1, θ, …, θ^{k-1}`. Products are reduced with a precomputed table of the
//! coordinates of `θ^k, …, θ^{2k-2}`. Complex embeddings are certified
//! enclosures of the roots of the minimal polynomial.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::RwLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::ball::{eval_poly, Ball, Rat};
use crate::error::{GnsError, Result};
use crate::linalg::{det_bareiss, inverse_rational, inverse_vandermonde, rat_mat_vec, Hnf, IntMatrix};
use crate::poly::{gcd_rational, IntPoly};
use crate::roots::{isolate_roots, DEFAULT_PRECISION_CAP};

/// Precision (bits) of the enclosures computed at construction.
const BASE_BITS: u32 = 64;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrderElement {
    pub coords: Vec<BigInt>,
}

impl OrderElement {
    pub fn new(coords: Vec<BigInt>) -> Self {
        OrderElement { coords }
    }

    pub fn from_i64s(coords: &[i64]) -> Self {
        OrderElement::new(coords.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero(k: usize) -> Self {
        OrderElement::new(vec![BigInt::zero(); k])
    }

    pub fn one(k: usize) -> Self {
        Self::from_int(k, &BigInt::one())
    }

    /// Rational integer `n` embedded in a degree-`k` order.
    pub fn from_int(k: usize, n: &BigInt) -> Self {
        let mut c = vec![BigInt::zero(); k];
        c[0] = n.clone();
        OrderElement::new(c)
    }

    pub fn degree(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    /// `Some(n)` when the element is the rational integer `n`.
    pub fn as_integer(&self) -> Option<&BigInt> {
        if self.coords[1..].iter().all(Zero::is_zero) {
            Some(&self.coords[0])
        } else {
            None
        }
    }

    pub fn scale(&self, c: &BigInt) -> OrderElement {
        OrderElement::new(self.coords.iter().map(|x| x * c).collect())
    }
}

impl Add for &OrderElement {
    type Output = OrderElement;
    fn add(self, o: &OrderElement) -> OrderElement {
        OrderElement::new(self.coords.iter().zip(&o.coords).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &OrderElement {
    type Output = OrderElement;
    fn sub(self, o: &OrderElement) -> OrderElement {
        OrderElement::new(self.coords.iter().zip(&o.coords).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &OrderElement {
    type Output = OrderElement;
    fn neg(self) -> OrderElement {
        OrderElement::new(self.coords.iter().map(|a| -a).collect())
    }
}

impl fmt::Display for OrderElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coords.len() == 1 {
            return write!(f, "{}", self.coords[0]);
        }
        write!(f, "[")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

/// Exact rational coordinates with respect to the basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalVector {
    pub entries: Vec<Rat>,
}

impl RationalVector {
    pub fn new(entries: Vec<Rat>) -> Self {
        RationalVector { entries }
    }

    pub fn from_ints(v: &[i64]) -> Self {
        RationalVector::new(v.iter().map(|&x| Rat::from_integer(x.into())).collect())
    }

    pub fn from_pairs(v: &[(i64, i64)]) -> Self {
        RationalVector::new(v.iter().map(|&(n, d)| Rat::new(n.into(), d.into())).collect())
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    /// `self - m` for an integer vector `m`.
    pub fn shift(&self, m: &[BigInt]) -> RationalVector {
        RationalVector::new(
            self.entries
                .iter()
                .zip(m)
                .map(|(a, b)| a - Rat::from_integer(b.clone()))
                .collect(),
        )
    }
}

/// Matrix of multiplication by a fixed element; column `j` is `coords(ϑ·θ^j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MulMatrix {
    pub rows: IntMatrix,
}

impl MulMatrix {
    pub fn apply(&self, v: &OrderElement) -> OrderElement {
        OrderElement::new(crate::linalg::mat_vec(&self.rows, &v.coords))
    }

    pub fn transpose(&self) -> IntMatrix {
        let k = self.rows.len();
        (0..k).map(|j| (0..k).map(|i| self.rows[i][j].clone()).collect()).collect()
    }

    pub fn det(&self) -> BigInt {
        det_bareiss(&self.rows)
    }
}

/// Enclosures of the embedding matrix `Ω_{ij} = ω_j^{(i)}` and its inverse.
#[derive(Clone, Debug)]
pub struct EmbeddingMatrix {
    pub omega: Vec<Vec<Ball>>,
    pub inverse: Vec<Vec<Ball>>,
}

/// A monogenic order `Z[θ]` given by the minimal polynomial of `θ`.
#[derive(Debug)]
pub struct Order {
    min_poly: Vec<BigInt>,
    k: usize,
    power_table: Vec<Vec<BigInt>>,
    roots: Vec<Ball>,
    /// Most precise enclosures computed so far, in the order of `roots`.
    refined: RwLock<Vec<Ball>>,
    precision_cap: u32,
}

impl Clone for Order {
    fn clone(&self) -> Self {
        Order {
            min_poly: self.min_poly.clone(),
            k: self.k,
            power_table: self.power_table.clone(),
            roots: self.roots.clone(),
            refined: RwLock::new(self.refined.read().unwrap().clone()),
            precision_cap: self.precision_cap,
        }
    }
}

impl PartialEq for Order {
    fn eq(&self, other: &Self) -> bool {
        self.min_poly == other.min_poly
    }
}

impl Order {
    /// Builds `Z[θ]` for `θ` a root of `f` (coefficients lowest degree first).
    pub fn new(f: &[BigInt]) -> Result<Order> {
        Order::with_precision_cap(f, DEFAULT_PRECISION_CAP)
    }

    pub fn from_i64s(f: &[i64]) -> Result<Order> {
        Order::new(&f.iter().map(|&c| BigInt::from(c)).collect::<Vec<_>>())
    }

    pub fn with_precision_cap(f: &[BigInt], precision_cap: u32) -> Result<Order> {
        if f.len() < 2 {
            return Err(GnsError::InvalidArgument("minimal polynomial must have degree >= 1".into()));
        }
        if !f.last().unwrap().is_one() {
            return Err(GnsError::NotMonic);
        }
        let k = f.len() - 1;
        if k >= 2 {
            if let Some(r) = rational_root(f) {
                return Err(GnsError::RationalRootFound(r.to_string()));
            }
            let fp = IntPoly::new(f.to_vec());
            if gcd_rational(&fp, &fp.derivative()).degree() > Some(0) {
                return Err(GnsError::EnclosureFailure(precision_cap));
            }
        }
        // θ^{k+s}, s = 0..k-2
        let mut power_table = Vec::new();
        let mut cur: Vec<BigInt> = f[..k].iter().map(|c| -c).collect();
        for _ in 0..k.saturating_sub(1) {
            power_table.push(cur.clone());
            // multiply by θ
            let top = cur[k - 1].clone();
            let mut next = vec![BigInt::zero(); k];
            for j in 1..k {
                next[j] = cur[j - 1].clone();
            }
            for j in 0..k {
                next[j] -= &top * &f[j];
            }
            cur = next;
        }
        let balls: Vec<Ball> = f.iter().map(Ball::from_int).collect();
        let roots = isolate_roots(|_| Ok(balls.clone()), BASE_BITS, precision_cap)?;
        let refined = RwLock::new(roots.clone());
        Ok(Order { min_poly: f.to_vec(), k, power_table, roots, refined, precision_cap })
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn min_poly(&self) -> &[BigInt] {
        &self.min_poly
    }

    pub fn precision_cap(&self) -> u32 {
        self.precision_cap
    }

    pub fn zero(&self) -> OrderElement {
        OrderElement::zero(self.k)
    }

    pub fn one(&self) -> OrderElement {
        OrderElement::one(self.k)
    }

    pub fn int(&self, n: i64) -> OrderElement {
        OrderElement::from_int(self.k, &BigInt::from(n))
    }

    pub fn element(&self, coords: &[i64]) -> Result<OrderElement> {
        self.check(&OrderElement::from_i64s(coords))
    }

    pub fn check(&self, e: &OrderElement) -> Result<OrderElement> {
        if e.degree() != self.k {
            return Err(GnsError::DimensionMismatch { expected: self.k, got: e.degree() });
        }
        Ok(e.clone())
    }

    /// The basis element `θ^j`.
    pub fn basis(&self, j: usize) -> OrderElement {
        let mut c = vec![BigInt::zero(); self.k];
        c[j] = BigInt::one();
        OrderElement::new(c)
    }

    pub fn mul(&self, a: &OrderElement, b: &OrderElement) -> OrderElement {
        let k = self.k;
        let mut prod = vec![BigInt::zero(); 2 * k - 1];
        for (i, x) in a.coords.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coords.iter().enumerate() {
                prod[i + j] += x * y;
            }
        }
        let mut out: Vec<BigInt> = prod[..k].to_vec();
        for (s, c) in prod[k..].iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (o, t) in out.iter_mut().zip(&self.power_table[s]) {
                *o += c * t;
            }
        }
        OrderElement::new(out)
    }

    pub fn pow(&self, a: &OrderElement, e: u32) -> OrderElement {
        let mut acc = self.one();
        for _ in 0..e {
            acc = self.mul(&acc, a);
        }
        acc
    }

    pub fn mul_matrix(&self, t: &OrderElement) -> MulMatrix {
        let k = self.k;
        let cols: Vec<OrderElement> = (0..k).map(|j| self.mul(t, &self.basis(j))).collect();
        MulMatrix { rows: (0..k).map(|i| (0..k).map(|j| cols[j].coords[i].clone()).collect()).collect() }
    }

    /// Field norm of `t`, the determinant of its multiplication matrix.
    pub fn norm(&self, t: &OrderElement) -> BigInt {
        self.mul_matrix(t).det()
    }

    /// Exact rational solution `b` of `β = ϑ · (b·ω)`.
    pub fn to_rational_coords(&self, beta: &OrderElement, t: &OrderElement) -> Result<RationalVector> {
        let inv = inverse_rational(&self.mul_matrix(t).rows).ok_or(GnsError::ZeroModulus)?;
        Ok(RationalVector::new(rat_mat_vec(&inv, &beta.coords)))
    }

    /// Quotient `q` with `q·ϑ = β`, or `NotDivisible`.
    pub fn exact_div(&self, beta: &OrderElement, t: &OrderElement) -> Result<OrderElement> {
        let b = self.to_rational_coords(beta, t)?;
        let mut out = Vec::with_capacity(self.k);
        for e in b.entries {
            if !e.is_integer() {
                return Err(GnsError::NotDivisible);
            }
            out.push(e.to_integer());
        }
        Ok(OrderElement::new(out))
    }

    /// Hermite normal form of the lattice `ϑO` (rows generate `ϑO`).
    pub fn modulus_hnf(&self, t: &OrderElement) -> Result<Hnf> {
        if self.norm(t).is_zero() {
            return Err(GnsError::ZeroModulus);
        }
        Hnf::new(&self.mul_matrix(t).transpose()).ok_or(GnsError::ZeroModulus)
    }

    /// A complete residue system of `O/ϑO`, in mixed-radix order over the HNF diagonal.
    pub fn residues(&self, t: &OrderElement) -> Result<Vec<OrderElement>> {
        Ok(self.modulus_hnf(t)?.transversal().into_iter().map(OrderElement::new).collect())
    }

    /// Enclosures of `θ^{(1)}, …, θ^{(k)}` with radius at most `2^-bits`.
    pub fn conjugate_roots(&self, bits: u32) -> Result<Vec<Ball>> {
        let target = Rat::new(BigInt::one(), BigInt::one() << bits);
        if self.roots.iter().all(|r| r.rad <= target) {
            return Ok(self.roots.clone());
        }
        {
            let cached = self.refined.read().unwrap();
            if cached.iter().all(|r| r.rad <= target) {
                return Ok(cached.clone());
            }
        }
        let balls: Vec<Ball> = self.min_poly.iter().map(Ball::from_int).collect();
        let refined = isolate_roots(|_| Ok(balls.clone()), bits, self.precision_cap)?;
        // keep the embedding order of the base enclosures
        let mut out = Vec::with_capacity(self.k);
        for base in &self.roots {
            let r = refined
                .iter()
                .find(|r| r.intersects(base))
                .ok_or_else(|| GnsError::Internal("refined root lost".into()))?;
            out.push(r.clone());
        }
        *self.refined.write().unwrap() = out.clone();
        Ok(out)
    }

    /// Evaluates a coordinate vector at enclosed conjugates of `θ`.
    pub fn embed_with(&self, coords: &[BigInt], thetas: &[Ball], bits: u32) -> Vec<Ball> {
        let c: Vec<Ball> = coords.iter().map(Ball::from_int).collect();
        thetas.iter().map(|t| eval_poly(&c, t).round(bits)).collect()
    }

    /// Enclosures of `β^{(1)}, …, β^{(k)}` with radius at most `2^-bits`.
    pub fn conjugate_values(&self, beta: &OrderElement, bits: u32) -> Result<Vec<Ball>> {
        let target = Rat::new(BigInt::one(), BigInt::one() << bits);
        let mag = beta.coords.iter().map(|c| c.bits()).max().unwrap_or(0) as u32;
        let mut work = bits + 8 + mag + 2 * self.k as u32;
        loop {
            let thetas = self.conjugate_roots(work)?;
            let vals = self.embed_with(&beta.coords, &thetas, work + 8);
            if vals.iter().all(|v| v.rad <= target) {
                return Ok(vals);
            }
            if work >= self.precision_cap {
                return Err(GnsError::EnclosureFailure(self.precision_cap));
            }
            work = (work * 2).min(self.precision_cap);
        }
    }

    /// Enclosures of `Ω_{ij} = (θ^{(i)})^j` and of `Ω^{-1}`.
    pub fn embedding_matrix(&self, bits: u32) -> Result<EmbeddingMatrix> {
        let thetas = self.conjugate_roots(bits)?;
        let omega: Vec<Vec<Ball>> = thetas
            .iter()
            .map(|t| (0..self.k).map(|j| t.pow(j).round(bits + 8)).collect())
            .collect();
        let inverse = inverse_vandermonde(&thetas)
            .ok_or(GnsError::EnclosureFailure(bits))?
            .into_iter()
            .map(|row| row.into_iter().map(|b| b.round(bits + 8)).collect())
            .collect();
        Ok(EmbeddingMatrix { omega, inverse })
    }
}

/// A rational (hence integer) root of a monic integer polynomial, if any.
fn rational_root(f: &[BigInt]) -> Option<BigInt> {
    let eval = |x: &BigInt| f.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c);
    let c0 = f[0].abs();
    if c0.is_zero() {
        return Some(BigInt::zero());
    }
    // divisors of the constant term by trial division
    let mut d = BigInt::one();
    loop {
        if &d * &d > c0 {
            break;
        }
        if c0.is_multiple_of(&d) {
            for cand in [d.clone(), &c0 / &d] {
                for s in [cand.clone(), -cand] {
                    if eval(&s).is_zero() {
                        return Some(s);
                    }
                }
            }
        }
        d += 1;
        if d.to_u64().map(|v| v > 10_000_000).unwrap_or(true) {
            break;
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::rat;

    fn gauss() -> Order {
        Order::from_i64s(&[1, 0, 1]).unwrap()
    }

    #[test]
    fn construction_checks() {
        assert_eq!(Order::from_i64s(&[-1, 1]).unwrap().degree(), 1);
        assert_eq!(Order::from_i64s(&[1, 0, 2]).unwrap_err(), GnsError::NotMonic);
        assert!(matches!(Order::from_i64s(&[-1, 0, 1]), Err(GnsError::RationalRootFound(_))));
        let sail = Order::from_i64s(&[3, -1, 1]).unwrap();
        assert_eq!(sail.degree(), 2);
        // θ = (1 + sqrt(-11))/2 satisfies θ² = θ - 3
        let t = sail.basis(1);
        assert_eq!(sail.mul(&t, &t), sail.element(&[-3, 1]).unwrap());
    }

    #[test]
    fn gaussian_products() {
        let o = gauss();
        let i = o.element(&[0, 1]).unwrap();
        assert_eq!(o.mul(&i, &i), o.element(&[-1, 0]).unwrap());
        let t = o.element(&[-1, 1]).unwrap();
        assert_eq!(o.mul(&t, &t), o.element(&[0, -2]).unwrap());
        assert_eq!(o.mul(&t, &o.one()), t);
    }

    #[test]
    fn multiplication_matrices_and_norms() {
        let z = Order::from_i64s(&[-1, 1]).unwrap();
        assert_eq!(z.mul_matrix(&z.int(-2)).rows, vec![vec![BigInt::from(-2)]]);
        assert_eq!(z.norm(&z.int(7)), BigInt::from(7));
        let o = gauss();
        let t = o.element(&[-1, 1]).unwrap();
        let m = o.mul_matrix(&t);
        assert_eq!(m.rows, vec![vec![BigInt::from(-1), BigInt::from(-1)], vec![BigInt::from(1), BigInt::from(-1)]]);
        assert_eq!(o.norm(&t), BigInt::from(2));
        assert_eq!(o.norm(&o.zero()), BigInt::zero());
        let id = o.mul_matrix(&o.one());
        assert_eq!(id.rows, vec![vec![BigInt::from(1), BigInt::from(0)], vec![BigInt::from(0), BigInt::from(1)]]);
    }

    #[test]
    fn division() {
        let o = gauss();
        let t = o.element(&[-1, 1]).unwrap();
        assert_eq!(o.exact_div(&o.int(2), &t).unwrap(), o.element(&[-1, -1]).unwrap());
        assert_eq!(o.exact_div(&t, &o.one()).unwrap(), t);
        let z = Order::from_i64s(&[-1, 1]).unwrap();
        assert_eq!(z.exact_div(&z.int(1), &z.int(2)), Err(GnsError::NotDivisible));
        assert_eq!(
            o.to_rational_coords(&o.one(), &t).unwrap(),
            RationalVector::from_pairs(&[(-1, 2), (-1, 2)])
        );
        assert_eq!(o.to_rational_coords(&t, &t).unwrap(), RationalVector::from_ints(&[1, 0]));
        assert_eq!(z.to_rational_coords(&z.int(3), &z.int(2)).unwrap(), RationalVector::from_pairs(&[(3, 2)]));
    }

    #[test]
    fn residue_systems() {
        let z = Order::from_i64s(&[-1, 1]).unwrap();
        assert_eq!(z.residues(&z.int(2)).unwrap(), vec![z.int(0), z.int(1)]);
        assert_eq!(z.residues(&z.int(3)).unwrap(), vec![z.int(0), z.int(1), z.int(2)]);
        let o = gauss();
        let t = o.element(&[-1, 1]).unwrap();
        let r = o.residues(&t).unwrap();
        assert_eq!(r, vec![o.zero(), o.element(&[0, 1]).unwrap()]);
        assert_eq!(o.exact_div(&(&r[1] - &r[0]), &t), Err(GnsError::NotDivisible));
        assert_eq!(o.residues(&o.zero()), Err(GnsError::ZeroModulus));
    }

    #[test]
    fn conjugates() {
        let o = gauss();
        let v = o.conjugate_values(&o.element(&[2, 1]).unwrap(), 40).unwrap();
        assert!(v[0].contains_point(&rat(2, 1), &rat(1, 1)));
        assert!(v[1].contains_point(&rat(2, 1), &rat(-1, 1)));
        let five = o.conjugate_values(&o.int(5), 40).unwrap();
        assert!(five.iter().all(|b| b.contains_point(&rat(5, 1), &rat(0, 1))));
        let sail = Order::from_i64s(&[3, -1, 1]).unwrap();
        let v = sail.conjugate_values(&sail.basis(1), 50).unwrap();
        let (re, im, _) = v[0].to_f64();
        assert!((re - 0.5).abs() < 1e-12 && (im - 11f64.sqrt() / 2.0).abs() < 1e-12);
        assert!(v[1].to_f64().1 < 0.0);
    }

    #[test]
    fn embedding_matrix_inverse() {
        let z = Order::from_i64s(&[-1, 1]).unwrap();
        let e = z.embedding_matrix(40).unwrap();
        assert_eq!(e.omega[0][0], Ball::one());
        assert!(e.inverse[0][0].contains_point(&rat(1, 1), &rat(0, 1)));
        let o = gauss();
        let e = o.embedding_matrix(40).unwrap();
        assert!(e.omega[0][1].contains_point(&rat(0, 1), &rat(1, 1)));
        assert!(e.omega[1][1].contains_point(&rat(0, 1), &rat(-1, 1)));
        assert!(e.inverse[0][0].contains_point(&rat(1, 2), &rat(0, 1)));
        assert!(e.inverse[0][1].contains_point(&rat(1, 2), &rat(0, 1)));
        assert!(e.inverse[1][0].contains_point(&rat(0, 1), &rat(-1, 2)));
        assert!(e.inverse[1][1].contains_point(&rat(0, 1), &rat(1, 2)));
    }
}
