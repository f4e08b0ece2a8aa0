//! Fundamental domains for the action of `Z^k` on `R^k`.
//!
//! Membership is decided exactly on rational points. Built-in families are
//! half-open boxes and the sail of an imaginary quadratic order.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ball::{floor_rat, rat, rat_to_f64, Rat};
use crate::error::{GnsError, Result};
use crate::order::RationalVector;

/// The interior conditions on `0` used by the shift theorems.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct HypothesisFlags {
    /// `0 ∈ int(F)`.
    pub zero_in_int: bool,
    /// `0 ∈ int₊(F)`, interior relative to the half-space `r₁ ≥ 0`.
    pub zero_in_int_plus: bool,
    /// `0 ∈ int(F ∪ (F − e₁))`.
    pub zero_in_int_union: bool,
    /// `0 ∈ int₋(cl F − e₁)`, interior relative to `r₁ ≤ 0`.
    pub zero_in_int_minus_shift: bool,
}

/// Finite set of lattice vectors containing the neighbors of `0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NeighborSet {
    pub vectors: Vec<Vec<BigInt>>,
}

impl NeighborSet {
    /// All vectors with `|z_i| <= radius_i`, lexicographic with the last
    /// coordinate fastest.
    pub fn cube(radius: &[i64]) -> Self {
        let mut out: Vec<Vec<BigInt>> = vec![Vec::new()];
        for &r in radius {
            let mut next = Vec::new();
            for v in &out {
                for c in -r..=r {
                    let mut w = v.clone();
                    w.push(BigInt::from(c));
                    next.push(w);
                }
            }
            out = next;
        }
        NeighborSet { vectors: out }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn contains_zero(&self) -> bool {
        self.vectors.iter().any(|v| v.iter().all(Zero::is_zero))
    }

    /// Checks that every `±e_i` is a sum of at most four members.
    pub fn generates_semigroup(&self) -> bool {
        let k = match self.vectors.first() {
            Some(v) => v.len(),
            None => return false,
        };
        let mut reach: std::collections::BTreeSet<Vec<BigInt>> = std::collections::BTreeSet::new();
        reach.insert(vec![BigInt::zero(); k]);
        for _ in 0..4 {
            let mut next = reach.clone();
            for r in &reach {
                for v in &self.vectors {
                    next.insert(r.iter().zip(v).map(|(a, b)| a + b).collect());
                }
            }
            reach = next;
        }
        (0..k).all(|i| {
            [1i64, -1].iter().all(|&s| {
                let mut e = vec![BigInt::zero(); k];
                e[i] = BigInt::from(s);
                reach.contains(&e)
            })
        })
    }
}

/// A bounded fundamental domain `F` with `0 ∈ F` and `R^k = F + Z^k` disjointly.
pub trait FundamentalDomain: fmt::Debug + Send + Sync {
    fn dim(&self) -> usize;

    /// Exact membership test.
    fn contains(&self, b: &RationalVector) -> bool;

    /// Closed bounding box `(lo, hi)` of `F`.
    fn bbox(&self) -> (Vec<Rat>, Vec<Rat>);

    /// Short description used in reports.
    fn describe(&self) -> String;

    /// The unique `m ∈ Z^k` with `b − m ∈ F`.
    fn locate(&self, b: &RationalVector) -> Result<Vec<BigInt>> {
        let hits = window_matches(self, b);
        match hits.len() {
            1 => Ok(hits.into_iter().next().unwrap()),
            n => Err(GnsError::NotTiling(format!("{n} translates contain the point"))),
        }
    }

    /// Superset of the neighbor set, from the bounding box: touching
    /// translates satisfy `|z_i| <= hi_i − lo_i`.
    fn neighbor_superset(&self) -> NeighborSet {
        let (lo, hi) = self.bbox();
        let r: Vec<i64> = lo
            .iter()
            .zip(&hi)
            .map(|(l, h)| floor_rat(&(h - l)).to_i64().unwrap_or(1).max(1))
            .collect();
        NeighborSet::cube(&r)
    }

    fn hypothesis_flags(&self) -> Result<HypothesisFlags> {
        Err(GnsError::UnsupportedDomain)
    }
}

/// All `m` in the bounding-box window with `b − m ∈ F`.
fn window_matches<D: FundamentalDomain + ?Sized>(d: &D, b: &RationalVector) -> Vec<Vec<BigInt>> {
    let (lo, hi) = d.bbox();
    // b - m ∈ [lo, hi]  ⇔  b - hi <= m <= b - lo
    let ranges: Vec<(BigInt, BigInt)> = (0..d.dim())
        .map(|i| {
            let a = -floor_rat(&-(&b.entries[i] - &hi[i]));
            let z = floor_rat(&(&b.entries[i] - &lo[i]));
            (a, z)
        })
        .collect();
    let mut out = Vec::new();
    let mut cur: Vec<BigInt> = ranges.iter().map(|r| r.0.clone()).collect();
    if ranges.iter().any(|(a, z)| a > z) {
        return out;
    }
    loop {
        if d.contains(&b.shift(&cur)) {
            out.push(cur.clone());
        }
        let mut i = 0;
        loop {
            if i == cur.len() {
                return out;
            }
            cur[i] += 1;
            if cur[i] <= ranges[i].1 {
                break;
            }
            cur[i] = ranges[i].0.clone();
            i += 1;
        }
    }
}

/// `F = Π [a_i, a_i + 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxDomain {
    pub offsets: Vec<Rat>,
}

impl BoxDomain {
    pub fn new(offsets: Vec<Rat>) -> Result<Self> {
        if offsets.is_empty() {
            return Err(GnsError::InvalidArgument("box needs at least one offset".into()));
        }
        for a in &offsets {
            if a.is_positive() || a <= &-Rat::one() {
                return Err(GnsError::InvalidArgument(format!("offset {a} does not put 0 in the box")));
            }
        }
        Ok(BoxDomain { offsets })
    }

    /// `[0,1)^k`.
    pub fn unit(k: usize) -> Self {
        BoxDomain { offsets: vec![Rat::zero(); k] }
    }

    /// `[-1/2,1/2)^k`.
    pub fn symmetric(k: usize) -> Self {
        BoxDomain { offsets: vec![rat(-1, 2); k] }
    }
}

impl FundamentalDomain for BoxDomain {
    fn dim(&self) -> usize {
        self.offsets.len()
    }

    fn contains(&self, b: &RationalVector) -> bool {
        b.entries
            .iter()
            .zip(&self.offsets)
            .all(|(x, a)| a <= x && x < &(a + Rat::one()))
    }

    fn bbox(&self) -> (Vec<Rat>, Vec<Rat>) {
        (self.offsets.clone(), self.offsets.iter().map(|a| a + Rat::one()).collect())
    }

    fn describe(&self) -> String {
        let parts: Vec<String> = self.offsets.iter().map(|a| format!("[{a},{})", a + Rat::one())).collect();
        format!("box{}", parts.join("x"))
    }

    fn locate(&self, b: &RationalVector) -> Result<Vec<BigInt>> {
        Ok(b.entries.iter().zip(&self.offsets).map(|(x, a)| floor_rat(&(x - a))).collect())
    }

    fn neighbor_superset(&self) -> NeighborSet {
        NeighborSet::cube(&vec![1; self.dim()])
    }

    fn hypothesis_flags(&self) -> Result<HypothesisFlags> {
        let rest_open = self.offsets[1..].iter().all(Signed::is_negative);
        Ok(HypothesisFlags {
            zero_in_int: self.offsets.iter().all(Signed::is_negative),
            zero_in_int_plus: rest_open,
            zero_in_int_union: rest_open,
            zero_in_int_minus_shift: self.offsets[0].is_zero() && rest_open,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SailVariant {
    /// Moduli measured through `|r₁ + r₂ω|`.
    NormForm,
    /// Moduli measured with the Euclidean norm of `(r₁, r₂)`.
    Euclidean,
}

/// `{ |r₁ + r₂ω| < 1, |r₁ − 1 + r₂ω| ≥ 1, −1/2 ≤ r₂ < 1/2 }`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SailDomain {
    pub omega_re: Rat,
    pub omega_im_sq: Rat,
    pub variant: SailVariant,
}

impl SailDomain {
    /// Sail for `ω` with the given real part and squared imaginary part.
    ///
    /// The sections `r₂ = const` have length one only when `Im(ω)² <= 3`;
    /// wider parameters do not tile and are rejected.
    pub fn norm_form(omega_re: Rat, omega_im_sq: Rat) -> Result<Self> {
        if !omega_im_sq.is_positive() {
            return Err(GnsError::InvalidArgument("omega must be non-real".into()));
        }
        if omega_im_sq > Rat::from_integer(3.into()) {
            return Err(GnsError::NotTiling(format!("Im(omega)^2 = {omega_im_sq} exceeds 3")));
        }
        Ok(SailDomain { omega_re, omega_im_sq, variant: SailVariant::NormForm })
    }

    pub fn euclidean() -> Self {
        SailDomain { omega_re: Rat::zero(), omega_im_sq: Rat::one(), variant: SailVariant::Euclidean }
    }

    /// `(u, t²)` with `|r₁ + r₂ω|² = u² + t²`.
    fn form(&self, r1: &Rat, r2: &Rat) -> (Rat, Rat) {
        (r1 + r2 * &self.omega_re, r2 * r2 * &self.omega_im_sq)
    }
}

impl FundamentalDomain for SailDomain {
    fn dim(&self) -> usize {
        2
    }

    fn contains(&self, b: &RationalVector) -> bool {
        let (r1, r2) = (&b.entries[0], &b.entries[1]);
        if r2 < &rat(-1, 2) || r2 >= &rat(1, 2) {
            return false;
        }
        let (u, t2) = self.form(r1, r2);
        let one = Rat::one();
        let v = &u - &one;
        &u * &u + &t2 < one && &v * &v + &t2 >= one
    }

    fn bbox(&self) -> (Vec<Rat>, Vec<Rat>) {
        let w = Rat::one() + self.omega_re.abs() / Rat::from_integer(2.into());
        (vec![-w.clone(), rat(-1, 2)], vec![w, rat(1, 2)])
    }

    fn describe(&self) -> String {
        match self.variant {
            SailVariant::NormForm => format!("sail(re={},im2={})", self.omega_re, self.omega_im_sq),
            SailVariant::Euclidean => "sail_euclidean".to_string(),
        }
    }

    fn locate(&self, b: &RationalVector) -> Result<Vec<BigInt>> {
        let m2 = floor_rat(&(&b.entries[1] + rat(1, 2)));
        let r2 = &b.entries[1] - Rat::from_integer(m2.clone());
        let (u, t2) = self.form(&b.entries[0], &r2);
        // u - m1 ∈ (-w, 1-w] with w = sqrt(1 - t²)
        let w = (1.0 - rat_to_f64(&t2)).max(0.0).sqrt();
        let est = (rat_to_f64(&u) + w - 1.0).ceil() as i64;
        let mut found = Vec::new();
        for m1 in est - 3..=est + 3 {
            let m = vec![BigInt::from(m1), m2.clone()];
            if self.contains(&b.shift(&m)) {
                found.push(m);
            }
        }
        match found.len() {
            1 => Ok(found.pop().unwrap()),
            n => Err(GnsError::NotTiling(format!("{n} translates of the sail contain the point"))),
        }
    }

    fn hypothesis_flags(&self) -> Result<HypothesisFlags> {
        // 0 lies on the circle |z - 1| = 1 and the sail is locally {|z - 1| >= 1}
        Ok(HypothesisFlags::default())
    }
}

/// Outcome of [`verify_tiling`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TilingReport {
    pub samples: usize,
    pub failures: Vec<(RationalVector, String)>,
}

impl TilingReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Samples pseudo-random rational points and checks that exactly one lattice
/// translate of `F` contains each of them.
pub fn verify_tiling<D: FundamentalDomain + ?Sized>(d: &D, sample_count: usize, seed: u64) -> TilingReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for _ in 0..sample_count {
        let b = RationalVector::new(
            (0..d.dim())
                .map(|_| {
                    let den: i64 = rng.gen_range(1..=360);
                    Rat::new(BigInt::from(rng.gen_range(-6 * den..=6 * den)), BigInt::from(den))
                })
                .collect(),
        );
        let hits = window_matches(d, &b);
        if hits.len() != 1 {
            failures.push((b, format!("{} translates contain the point", hits.len())));
            continue;
        }
        match d.locate(&b) {
            Ok(m) if m == hits[0] => {}
            Ok(m) => failures.push((b, format!("locate returned {m:?}, expected {:?}", hits[0]))),
            Err(e) => failures.push((b, e.to_string())),
        }
    }
    TilingReport { samples: sample_count, failures }
}
