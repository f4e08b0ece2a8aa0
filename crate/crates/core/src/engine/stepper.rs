//! Flat, allocation-light backward division on state vectors.
//!
//! A state `b = Σ_{j<n} b_j x^j` is stored as `n·k` integers, coefficient `j`
//! occupying positions `j·k .. (j+1)·k`. The arithmetic is generic so the
//! common case runs on checked `i128` and falls back to big integers.

use std::collections::HashMap;
use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::digits::DigitSet;
use crate::error::{GnsError, Result};
use crate::order::Order;
use crate::poly::OPoly;

pub trait StepInt: Clone + Eq + Hash + Ord + Debug + Send + Sync + Sized {
    fn from_big(b: &BigInt) -> Option<Self>;
    fn to_big(&self) -> BigInt;
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Option<Self>;
    fn sub(&self, o: &Self) -> Option<Self>;
    fn mul(&self, o: &Self) -> Option<Self>;
    fn neg(&self) -> Option<Self>;
    fn div_floor(&self, o: &Self) -> Option<Self>;
    fn div_exact(&self, o: &Self) -> Option<Self>;
    fn to_usize(&self) -> Option<usize>;
}

impl StepInt for i128 {
    fn from_big(b: &BigInt) -> Option<Self> {
        b.to_i128()
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn zero() -> Self {
        0
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn add(&self, o: &Self) -> Option<Self> {
        self.checked_add(*o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        self.checked_sub(*o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        self.checked_mul(*o)
    }
    fn neg(&self) -> Option<Self> {
        self.checked_neg()
    }
    fn div_floor(&self, o: &Self) -> Option<Self> {
        if *self == i128::MIN {
            return None;
        }
        Some(Integer::div_floor(self, o))
    }
    fn div_exact(&self, o: &Self) -> Option<Self> {
        if *self == i128::MIN || self % o != 0 {
            return None;
        }
        Some(self / o)
    }
    fn to_usize(&self) -> Option<usize> {
        usize::try_from(*self).ok()
    }
}

impl StepInt for BigInt {
    fn from_big(b: &BigInt) -> Option<Self> {
        Some(b.clone())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
    fn zero() -> Self {
        <BigInt as Zero>::zero()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        Some(self - o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn neg(&self) -> Option<Self> {
        Some(-self)
    }
    fn div_floor(&self, o: &Self) -> Option<Self> {
        Some(Integer::div_floor(self, o))
    }
    fn div_exact(&self, o: &Self) -> Option<Self> {
        let (q, r) = self.div_rem(o);
        if Zero::is_zero(&r) {
            Some(q)
        } else {
            None
        }
    }
    fn to_usize(&self) -> Option<usize> {
        ToPrimitive::to_usize(self)
    }
}

#[derive(Clone, Debug)]
pub struct Stepper<T> {
    pub k: usize,
    pub n: usize,
    rows: Vec<Vec<T>>,
    diag: Vec<T>,
    radix: Vec<T>,
    digits: Vec<Vec<T>>,
    adj: Vec<Vec<T>>,
    det: T,
    /// Multiplication matrices of `p_1, …, p_{n-1}`.
    pmats: Vec<Vec<Vec<T>>>,
}

fn conv<T: StepInt>(v: &[BigInt]) -> Option<Vec<T>> {
    v.iter().map(T::from_big).collect()
}

fn conv_mat<T: StepInt>(m: &[Vec<BigInt>]) -> Option<Vec<Vec<T>>> {
    m.iter().map(|r| conv(r)).collect()
}

impl<T: StepInt> Stepper<T> {
    pub fn new(order: &Order, p: &OPoly, digits: &DigitSet) -> Option<Self> {
        let k = order.degree();
        let n = p.degree()?;
        let hnf = digits.hnf();
        let mut radix = Vec::with_capacity(k);
        let mut acc = BigInt::from(1);
        for d in &hnf.diag {
            radix.push(T::from_big(&acc)?);
            acc *= d;
        }
        let pmats = (1..n)
            .map(|j| conv_mat(&order.mul_matrix(&p.coeff(j, k)).rows))
            .collect::<Option<Vec<_>>>()?;
        Some(Stepper {
            k,
            n,
            rows: conv_mat(&hnf.rows)?,
            diag: conv(&hnf.diag)?,
            radix,
            digits: digits.elements().iter().map(|d| conv(&d.coords)).collect::<Option<Vec<_>>>()?,
            adj: conv_mat(digits.adjugate())?,
            det: T::from_big(digits.norm())?,
            pmats,
        })
    }

    pub fn dim(&self) -> usize {
        self.k * self.n
    }

    /// One backward division step; returns the next state and the digit index.
    /// `None` signals arithmetic overflow.
    pub fn step(&self, s: &[T]) -> Option<(Vec<T>, usize)> {
        let k = self.k;
        let mut r: Vec<T> = s[..k].to_vec();
        let mut idx = T::zero();
        for i in 0..k {
            let q = r[i].div_floor(&self.diag[i])?;
            if !q.is_zero() {
                for j in i..k {
                    r[j] = r[j].sub(&q.mul(&self.rows[i][j])?)?;
                }
            }
            idx = idx.add(&r[i].mul(&self.radix[i])?)?;
        }
        let di = idx.to_usize()?;
        let d = &self.digits[di];
        let mut q = Vec::with_capacity(k);
        for row in &self.adj {
            let mut acc = T::zero();
            for (a, (b, dd)) in row.iter().zip(s[..k].iter().zip(d)) {
                acc = acc.add(&a.mul(&b.sub(dd)?)?)?;
            }
            q.push(acc.div_exact(&self.det)?);
        }
        let mut next = Vec::with_capacity(self.dim());
        for j in 0..self.n - 1 {
            let m = &self.pmats[j];
            for c in 0..k {
                let mut acc = s[(j + 1) * k + c].clone();
                for (mc, qc) in m[c].iter().zip(&q) {
                    acc = acc.sub(&mc.mul(qc)?)?;
                }
                next.push(acc);
            }
        }
        for qc in &q {
            next.push(qc.neg()?);
        }
        Some((next, di))
    }
}

pub fn is_zero_state<T: StepInt>(s: &[T]) -> bool {
    s.iter().all(StepInt::is_zero)
}

/// Result of classifying every state of a box.
pub struct Classification<T> {
    pub states_checked: u128,
    /// Nonzero cycles, each rotated to start at its smallest state, in order of discovery.
    pub cycles: Vec<Vec<Vec<T>>>,
}

/// Iterates the box `|s_i| <= radius_i`, first coordinate fastest.
pub fn for_each_in_box<T: StepInt, F: FnMut(&[T]) -> Result<bool>>(radius: &[T], mut f: F) -> Result<Option<u128>> {
    let dim = radius.len();
    let lo: Vec<T> = radius.iter().map(|r| r.neg()).collect::<Option<_>>().ok_or(GnsError::Internal("box overflow".into()))?;
    let one = T::from_big(&BigInt::from(1)).unwrap();
    let mut cur = lo.clone();
    let mut count: u128 = 0;
    loop {
        count += 1;
        if !f(&cur)? {
            return Ok(None);
        }
        let mut i = 0;
        loop {
            if i == dim {
                return Ok(Some(count));
            }
            cur[i] = cur[i].add(&one).unwrap();
            if cur[i] <= radius[i] {
                break;
            }
            cur[i] = lo[i].clone();
            i += 1;
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Class {
    Good,
    Bad,
}

/// Classifies all orbits starting in the box. `Ok(None)` on overflow.
pub fn classify<T: StepInt>(st: &Stepper<T>, radius: &[T], orbit_cap: usize) -> Result<Option<Classification<T>>> {
    let mut memo: HashMap<Vec<T>, Class> = HashMap::new();
    let mut cycles = Vec::new();
    let mut overflow = false;
    let mut path: Vec<Vec<T>> = Vec::new();
    let mut on_path: HashMap<Vec<T>, usize> = HashMap::new();
    let done = for_each_in_box(radius, |start| {
        path.clear();
        on_path.clear();
        let mut s = start.to_vec();
        let class = loop {
            if is_zero_state(&s) {
                break Class::Good;
            }
            if let Some(&c) = memo.get(&s) {
                break c;
            }
            if let Some(&i) = on_path.get(&s) {
                let mut cyc: Vec<Vec<T>> = path[i..].to_vec();
                let m = (0..cyc.len()).min_by(|&a, &b| cyc[a].cmp(&cyc[b])).unwrap();
                cyc.rotate_left(m);
                cycles.push(cyc);
                break Class::Bad;
            }
            if path.len() >= orbit_cap {
                return Err(GnsError::StepCapExceeded(orbit_cap));
            }
            on_path.insert(s.clone(), path.len());
            path.push(s.clone());
            match st.step(&s) {
                Some((next, _)) => s = next,
                None => {
                    overflow = true;
                    return Ok(false);
                }
            }
        };
        for p in path.drain(..) {
            memo.insert(p, class);
        }
        Ok(true)
    })?;
    if overflow {
        return Ok(None);
    }
    Ok(done.map(|states_checked| Classification { states_checked, cycles }))
}

/// Expansion length of every state in the box; the maximum is returned.
/// `Ok(None)` on overflow.
pub fn max_length<T: StepInt>(st: &Stepper<T>, radius: &[T], orbit_cap: usize) -> Result<Option<usize>> {
    let mut memo: HashMap<Vec<T>, usize> = HashMap::new();
    let mut best = 0usize;
    let mut overflow = false;
    let mut path: Vec<Vec<T>> = Vec::new();
    let done = for_each_in_box(radius, |start| {
        path.clear();
        let mut s = start.to_vec();
        let base = loop {
            if is_zero_state(&s) {
                break 0;
            }
            if let Some(&l) = memo.get(&s) {
                break l;
            }
            if path.len() >= orbit_cap {
                return Err(GnsError::NotApplicable("a state in the box does not terminate".into()));
            }
            path.push(s.clone());
            match st.step(&s) {
                Some((next, _)) => s = next,
                None => {
                    overflow = true;
                    return Ok(false);
                }
            }
        };
        let len = path.len();
        for (i, p) in path.drain(..).enumerate() {
            memo.insert(p, base + len - i);
        }
        best = best.max(base + len);
        Ok(true)
    })?;
    if overflow {
        return Ok(None);
    }
    Ok(done.map(|_| best))
}
