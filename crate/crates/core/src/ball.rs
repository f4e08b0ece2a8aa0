//! Certified complex enclosures.
//!
//! A [`Ball`] is a closed disk with an exact rational center and an exact
//! rational radius. Every operation returns a disk containing all possible
//! results of the operation applied to points of the operands, so chains of
//! operations stay certified. Magnitudes are bounded through rational square
//! root bounds; no floating point is involved.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rat = BigRational;

/// Significant bits kept when bounding square roots.
const SQRT_BITS: i64 = 160;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ball {
    pub re: Rat,
    pub im: Rat,
    pub rad: Rat,
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: &BigInt) -> Rat {
    Rat::from_integer(n.clone())
}

fn bit_len(n: &BigInt) -> i64 {
    n.bits() as i64
}

fn pow2(e: u64) -> BigInt {
    BigInt::one() << e
}

/// Exact square root when `q` is the square of a rational.
fn exact_sqrt(q: &Rat) -> Option<Rat> {
    let n = q.numer();
    let d = q.denom();
    let sn = n.sqrt();
    let sd = d.sqrt();
    if &(&sn * &sn) == n && &(&sd * &sd) == d {
        Some(Rat::new(sn, sd))
    } else {
        None
    }
}

/// Returns `(lo, hi)` with `lo <= sqrt(q) <= hi`, for `q >= 0`.
pub fn sqrt_bounds(q: &Rat) -> (Rat, Rat) {
    assert!(!q.is_negative(), "square root of a negative rational");
    if q.is_zero() {
        return (Rat::zero(), Rat::zero());
    }
    if let Some(s) = exact_sqrt(q) {
        return (s.clone(), s);
    }
    // sqrt(n/d) = sqrt(n * 4^b / d) / 2^b
    let mag = bit_len(q.numer()) - bit_len(q.denom());
    let b = ((2 * SQRT_BITS - mag) / 2).max(0) as u64;
    let scaled = (q.numer() << (2 * b)) / q.denom();
    let s = scaled.sqrt();
    let den = pow2(b);
    (Rat::new(s.clone(), den.clone()), Rat::new(s + 1, den))
}

pub fn sqrt_upper(q: &Rat) -> Rat {
    sqrt_bounds(q).1
}

pub fn sqrt_lower(q: &Rat) -> Rat {
    sqrt_bounds(q).0
}

/// Nearest multiple of `2^-bits`.
pub fn round_rat(q: &Rat, bits: u32) -> Rat {
    let scale = pow2(bits as u64);
    let scaled = q * Rat::from_integer(scale.clone());
    Rat::new(scaled.round().to_integer(), scale)
}

/// Smallest multiple of `2^-bits` that is `>= q`.
pub fn ceil_rat(q: &Rat, bits: u32) -> Rat {
    let scale = pow2(bits as u64);
    let scaled = q * Rat::from_integer(scale.clone());
    Rat::new(scaled.ceil().to_integer(), scale)
}

/// Lossy conversion for display and heuristics only.
pub fn rat_to_f64(q: &Rat) -> f64 {
    let n = q.numer();
    let d = q.denom();
    let shift = (bit_len(n).max(bit_len(d)) - 60).max(0) as u64;
    let nf = f64_of(&(n >> shift));
    let df = f64_of(&(d >> shift));
    if df == 0.0 {
        return if n.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY };
    }
    nf / df
}

fn f64_of(n: &BigInt) -> f64 {
    use num_traits::ToPrimitive;
    n.to_f64().unwrap_or(f64::NAN)
}

/// Dyadic rational close to a finite `f64`.
pub fn rat_from_f64(x: f64) -> Rat {
    Rat::from_float(x).unwrap_or_else(Rat::zero)
}

impl Ball {
    pub fn new(re: Rat, im: Rat, rad: Rat) -> Self {
        debug_assert!(!rad.is_negative());
        Ball { re, im, rad }
    }

    pub fn exact(re: Rat, im: Rat) -> Self {
        Ball::new(re, im, Rat::zero())
    }

    pub fn real(re: Rat) -> Self {
        Ball::exact(re, Rat::zero())
    }

    pub fn from_int(n: &BigInt) -> Self {
        Ball::real(rat_int(n))
    }

    pub fn zero() -> Self {
        Ball::real(Rat::zero())
    }

    pub fn one() -> Self {
        Ball::real(Rat::one())
    }

    pub fn center_norm_sqr(&self) -> Rat {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn add(&self, o: &Ball) -> Ball {
        Ball::new(&self.re + &o.re, &self.im + &o.im, &self.rad + &o.rad)
    }

    pub fn sub(&self, o: &Ball) -> Ball {
        Ball::new(&self.re - &o.re, &self.im - &o.im, &self.rad + &o.rad)
    }

    pub fn neg(&self) -> Ball {
        Ball::new(-&self.re, -&self.im, self.rad.clone())
    }

    pub fn conj(&self) -> Ball {
        Ball::new(self.re.clone(), -&self.im, self.rad.clone())
    }

    pub fn mul(&self, o: &Ball) -> Ball {
        let re = &self.re * &o.re - &self.im * &o.im;
        let im = &self.re * &o.im + &self.im * &o.re;
        let rad = if self.rad.is_zero() && o.rad.is_zero() {
            Rat::zero()
        } else {
            let a = sqrt_upper(&self.center_norm_sqr());
            let b = sqrt_upper(&o.center_norm_sqr());
            &a * &o.rad + &b * &self.rad + &self.rad * &o.rad
        };
        Ball::new(re, im, rad)
    }

    pub fn scale(&self, k: &Rat) -> Ball {
        Ball::new(&self.re * k, &self.im * k, &self.rad * k.abs())
    }

    /// Enclosure of `1/z` for all `z` in the ball; `None` when the ball meets 0.
    pub fn recip(&self) -> Option<Ball> {
        let n2 = self.center_norm_sqr();
        if n2.is_zero() {
            return None;
        }
        let re = &self.re / &n2;
        let im = -&self.im / &n2;
        if self.rad.is_zero() {
            return Some(Ball::exact(re, im));
        }
        let l = sqrt_lower(&n2);
        if l <= self.rad {
            return None;
        }
        let rad = &self.rad / (&l * (&l - &self.rad));
        Some(Ball::new(re, im, rad))
    }

    pub fn div(&self, o: &Ball) -> Option<Ball> {
        o.recip().map(|r| self.mul(&r))
    }

    pub fn pow(&self, e: usize) -> Ball {
        let mut acc = Ball::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Upper bound of `|z|` over the ball.
    pub fn abs_upper(&self) -> Rat {
        sqrt_upper(&self.center_norm_sqr()) + &self.rad
    }

    /// Lower bound of `|z|` over the ball (zero if the ball meets 0).
    pub fn abs_lower(&self) -> Rat {
        let l = sqrt_lower(&self.center_norm_sqr()) - &self.rad;
        if l.is_negative() {
            Rat::zero()
        } else {
            l
        }
    }

    pub fn contains_zero(&self) -> bool {
        self.center_norm_sqr() <= &self.rad * &self.rad
    }

    pub fn contains_point(&self, re: &Rat, im: &Rat) -> bool {
        let dr = &self.re - re;
        let di = &self.im - im;
        &dr * &dr + &di * &di <= &self.rad * &self.rad
    }

    /// True when `o` lies entirely inside `self`.
    pub fn contains_ball(&self, o: &Ball) -> bool {
        if o.rad > self.rad {
            return false;
        }
        let gap = &self.rad - &o.rad;
        let dr = &self.re - &o.re;
        let di = &self.im - &o.im;
        &dr * &dr + &di * &di <= &gap * &gap
    }

    pub fn disjoint(&self, o: &Ball) -> bool {
        let dr = &self.re - &o.re;
        let di = &self.im - &o.im;
        let s = &self.rad + &o.rad;
        &s * &s < &dr * &dr + &di * &di
    }

    pub fn intersects(&self, o: &Ball) -> bool {
        !self.disjoint(o)
    }

    /// Rounds the center to a dyadic grid of mesh `2^-bits` and absorbs the error.
    pub fn round(&self, bits: u32) -> Ball {
        let re = round_rat(&self.re, bits);
        let im = round_rat(&self.im, bits);
        let err = (&re - &self.re).abs() + (&im - &self.im).abs();
        let rad = ceil_rat(&(&self.rad + err), bits);
        Ball::new(re, im, rad)
    }

    pub fn to_f64(&self) -> (f64, f64, f64) {
        (rat_to_f64(&self.re), rat_to_f64(&self.im), rat_to_f64(&self.rad))
    }
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (re, im, rad) = self.to_f64();
        write!(f, "{re:.12}{im:+.12}i ± {rad:.3e}")
    }
}

/// Horner evaluation of `Σ c_j z^j` with enclosed coefficients.
pub fn eval_poly(coeffs: &[Ball], z: &Ball) -> Ball {
    let mut acc = Ball::zero();
    for c in coeffs.iter().rev() {
        acc = acc.mul(z).add(c);
    }
    acc
}

/// Exact floor of a rational.
pub fn floor_rat(q: &Rat) -> BigInt {
    q.numer().div_floor(q.denom())
}
