//! Exact linear algebra over Z and Q for small dense matrices.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::ball::{Ball, Rat};

pub type IntMatrix = Vec<Vec<BigInt>>;

/// Determinant by fraction-free (Bareiss) elimination.
pub fn det_bareiss(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: IntMatrix = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Inverse over Q by Gauss–Jordan elimination; `None` if singular.
pub fn inverse_rational(m: &[Vec<BigInt>]) -> Option<Vec<Vec<Rat>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rat>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<Rat> = row.iter().map(|x| Rat::from_integer(x.clone())).collect();
            r.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, p);
        let inv = a[c][c].recip();
        for x in a[c].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                for j in 0..2 * n {
                    let v = &f * &a[c][j];
                    a[r][j] -= v;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn mat_vec(m: &[Vec<BigInt>], v: &[BigInt]) -> Vec<BigInt> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

pub fn rat_mat_vec(m: &[Vec<Rat>], v: &[BigInt]) -> Vec<Rat> {
    m.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .fold(Rat::zero(), |acc, (a, b)| acc + a * Rat::from_integer(b.clone()))
        })
        .collect()
}

/// Row-style Hermite normal form of a nonsingular square integer matrix.
///
/// The rows of `rows` generate the same lattice as the input rows. The matrix
/// is upper triangular with positive diagonal and entries above the diagonal
/// reduced into `[0, diag)`. The box `0 <= v_i < diag_i` is then a complete
/// residue system of `Z^k` modulo the lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hnf {
    pub rows: IntMatrix,
    pub diag: Vec<BigInt>,
}

impl Hnf {
    pub fn new(input: &[Vec<BigInt>]) -> Option<Hnf> {
        let k = input.len();
        let mut a: IntMatrix = input.to_vec();
        for col in 0..k {
            loop {
                let pivot = (col..k)
                    .filter(|&r| !a[r][col].is_zero())
                    .min_by_key(|&r| a[r][col].abs())?;
                a.swap(col, pivot);
                let mut clean = true;
                for r in col + 1..k {
                    if a[r][col].is_zero() {
                        continue;
                    }
                    let q = a[r][col].div_floor(&a[col][col]);
                    let (top, bottom) = a.split_at_mut(r);
                    for (x, y) in bottom[0].iter_mut().zip(&top[col]) {
                        *x -= &q * y;
                    }
                    if !a[r][col].is_zero() {
                        clean = false;
                    }
                }
                if clean {
                    break;
                }
            }
            if a[col][col].is_negative() {
                for x in a[col].iter_mut() {
                    *x = -&*x;
                }
            }
            for r in 0..col {
                let q = a[r][col].div_floor(&a[col][col]);
                if q.is_zero() {
                    continue;
                }
                let (top, bottom) = a.split_at_mut(col);
                for (x, y) in top[r].iter_mut().zip(&bottom[0]) {
                    *x -= &q * y;
                }
            }
        }
        let diag = (0..k).map(|i| a[i][i].clone()).collect();
        Some(Hnf { rows: a, diag })
    }

    /// Canonical representative of `v` modulo the lattice.
    pub fn reduce(&self, v: &[BigInt]) -> Vec<BigInt> {
        let mut v = v.to_vec();
        for i in 0..v.len() {
            let q = v[i].div_floor(&self.diag[i]);
            if q.is_zero() {
                continue;
            }
            for (x, y) in v.iter_mut().zip(&self.rows[i]).skip(i) {
                *x -= &q * y;
            }
        }
        v
    }

    /// Number of residue classes, `Π diag_i`.
    pub fn index(&self) -> BigInt {
        self.diag.iter().product()
    }

    /// Mixed-radix position of a reduced vector (first coordinate fastest).
    pub fn position(&self, reduced: &[BigInt]) -> BigInt {
        let mut pos = BigInt::zero();
        for i in (0..reduced.len()).rev() {
            pos = pos * &self.diag[i] + &reduced[i];
        }
        pos
    }

    /// All reduced vectors in mixed-radix order.
    pub fn transversal(&self) -> Vec<Vec<BigInt>> {
        let k = self.diag.len();
        let mut out = vec![vec![BigInt::zero(); k]];
        for i in 0..k {
            let mut next = Vec::new();
            let mut c = BigInt::zero();
            while c < self.diag[i] {
                for v in &out {
                    let mut w = v.clone();
                    w[i] = c.clone();
                    next.push(w);
                }
                c += 1;
            }
            out = next;
        }
        // first coordinate fastest
        out.sort_by(|a, b| self.position(a).cmp(&self.position(b)));
        out
    }
}

/// Inverse of the Vandermonde matrix with rows `(1, a_l, a_l^2, ...)`.
///
/// Entry `[j][l]` is the coefficient of `x^j` in the Lagrange basis
/// polynomial of node `l`. `None` when two nodes cannot be separated.
pub fn inverse_vandermonde(nodes: &[Ball]) -> Option<Vec<Vec<Ball>>> {
    let n = nodes.len();
    let mut inv = vec![vec![Ball::zero(); n]; n];
    for l in 0..n {
        // numerator Π_{m≠l} (x - a_m), lowest degree first
        let mut num = vec![Ball::one()];
        let mut den = Ball::one();
        for (m, a) in nodes.iter().enumerate() {
            if m == l {
                continue;
            }
            let mut next = vec![Ball::zero(); num.len() + 1];
            for (j, c) in num.iter().enumerate() {
                next[j + 1] = next[j + 1].add(c);
                next[j] = next[j].sub(&c.mul(a));
            }
            num = next;
            den = den.mul(&nodes[l].sub(a));
        }
        let r = den.recip()?;
        for j in 0..n {
            inv[j][l] = num[j].mul(&r);
        }
    }
    Some(inv)
}
