//! Certified isolation of the complex roots of a monic polynomial.
//!
//! Approximations come from an Aberth iteration in `f64`, refined by
//! Weierstrass (Durand–Kerner) corrections in exact dyadic arithmetic. The
//! certificate is the Weierstrass–Gerschgorin inclusion: with
//! `W_j = P(z_j) / Π_{m≠j} (z_j − z_m)`, every root lies in a disk
//! `|z − z_j| <= n |W_j|`, and a connected component made of `m` disks holds
//! exactly `m` roots. Pairwise disjoint disks therefore isolate one root
//! each. Coefficients may themselves be enclosures; the bound on `|W_j|` is
//! then taken over the whole coefficient enclosure.

use num_traits::{One, Zero};

use crate::ball::{ceil_rat, eval_poly, rat_from_f64, rat_to_f64, round_rat, Ball, Rat};
use crate::error::{GnsError, Result};

/// Default cap on working precision (mantissa bits).
pub const DEFAULT_PRECISION_CAP: u32 = 1 << 14;

#[derive(Clone, Copy, Debug)]
struct C64 {
    re: f64,
    im: f64,
}

impl C64 {
    fn new(re: f64, im: f64) -> Self {
        C64 { re, im }
    }
    fn add(self, o: C64) -> C64 {
        C64::new(self.re + o.re, self.im + o.im)
    }
    fn sub(self, o: C64) -> C64 {
        C64::new(self.re - o.re, self.im - o.im)
    }
    fn mul(self, o: C64) -> C64 {
        C64::new(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
    }
    fn div(self, o: C64) -> C64 {
        let d = o.re * o.re + o.im * o.im;
        C64::new((self.re * o.re + self.im * o.im) / d, (self.im * o.re - self.re * o.im) / d)
    }
    fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }
    fn finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Aberth–Ehrlich iteration on a monic polynomial given by `f64` coefficients.
fn aberth(coeffs: &[C64]) -> Vec<C64> {
    let n = coeffs.len() - 1;
    let deriv: Vec<C64> = (1..=n)
        .map(|j| coeffs[j].mul(C64::new(j as f64, 0.0)))
        .collect();
    let eval = |c: &[C64], z: C64| c.iter().rev().fold(C64::new(0.0, 0.0), |acc, &a| acc.mul(z).add(a));
    // Fujiwara-style radius
    let mut radius: f64 = 0.0;
    for (j, c) in coeffs.iter().take(n).enumerate() {
        radius = radius.max(c.abs().powf(1.0 / (n - j) as f64));
    }
    let radius = (2.0 * radius).max(1e-3);
    let mut z: Vec<C64> = (0..n)
        .map(|j| {
            let t = std::f64::consts::TAU * j as f64 / n as f64 + 0.4;
            C64::new(radius * t.cos(), radius * t.sin())
        })
        .collect();
    for _ in 0..400 {
        let mut moved: f64 = 0.0;
        for i in 0..n {
            let p = eval(coeffs, z[i]);
            let dp = eval(&deriv, z[i]);
            if p.abs() == 0.0 {
                continue;
            }
            let ratio = p.div(dp);
            let mut s = C64::new(0.0, 0.0);
            for (m, zm) in z.iter().enumerate() {
                if m != i {
                    s = s.add(C64::new(1.0, 0.0).div(z[i].sub(*zm)));
                }
            }
            let denom = C64::new(1.0, 0.0).sub(ratio.mul(s));
            let w = ratio.div(denom);
            if !w.finite() {
                continue;
            }
            z[i] = z[i].sub(w);
            moved = moved.max(w.abs() / (1.0 + z[i].abs()));
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

fn center_mul(a: &(Rat, Rat), b: &(Rat, Rat)) -> (Rat, Rat) {
    (&a.0 * &b.0 - &a.1 * &b.1, &a.0 * &b.1 + &a.1 * &b.0)
}

fn center_div(a: &(Rat, Rat), b: &(Rat, Rat)) -> Option<(Rat, Rat)> {
    let d = &b.0 * &b.0 + &b.1 * &b.1;
    if d.is_zero() {
        return None;
    }
    Some((
        (&a.0 * &b.0 + &a.1 * &b.1) / &d,
        (&a.1 * &b.0 - &a.0 * &b.1) / &d,
    ))
}

/// One Weierstrass sweep on exact centers; returns the largest correction size (squared).
fn weierstrass_sweep(coeffs: &[(Rat, Rat)], z: &mut [(Rat, Rat)], bits: u32) -> Rat {
    let n = z.len();
    let mut worst = Rat::zero();
    for i in 0..n {
        let mut p = (Rat::zero(), Rat::zero());
        for c in coeffs.iter().rev() {
            p = center_mul(&p, &z[i]);
            p = (&p.0 + &c.0, &p.1 + &c.1);
        }
        let mut den = (Rat::one(), Rat::zero());
        for m in 0..n {
            if m != i {
                den = center_mul(&den, &(&z[i].0 - &z[m].0, &z[i].1 - &z[m].1));
            }
        }
        let w = match center_div(&p, &den) {
            Some(w) => w,
            None => {
                // coincident approximations: nudge apart
                let eps = Rat::new(1.into(), num_bigint::BigInt::one() << (bits / 2).max(8));
                z[i].0 += &eps * Rat::from_integer((i as i64 + 1).into());
                z[i].1 += &eps;
                continue;
            }
        };
        let size = &w.0 * &w.0 + &w.1 * &w.1;
        if size > worst {
            worst = size;
        }
        z[i] = (round_rat(&(&z[i].0 - &w.0), bits), round_rat(&(&z[i].1 - &w.1), bits));
    }
    worst
}

/// Certified Weierstrass–Gerschgorin disks around the approximations `z`.
fn inclusion_disks(coeffs: &[Ball], z: &[(Rat, Rat)], bits: u32) -> Option<Vec<Ball>> {
    let n = z.len();
    let nr = Rat::from_integer((n as i64).into());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let zi = Ball::exact(z[i].0.clone(), z[i].1.clone());
        let p = eval_poly(coeffs, &zi);
        let mut den = (Rat::one(), Rat::zero());
        for m in 0..n {
            if m != i {
                den = center_mul(&den, &(&z[i].0 - &z[m].0, &z[i].1 - &z[m].1));
            }
        }
        let w = p.div(&Ball::exact(den.0, den.1))?;
        let r = ceil_rat(&(w.abs_upper() * &nr), bits + 4);
        out.push(Ball::new(z[i].0.clone(), z[i].1.clone(), r));
    }
    Some(out)
}

fn pairwise_disjoint(disks: &[Ball]) -> bool {
    for i in 0..disks.len() {
        for j in i + 1..disks.len() {
            if !disks[i].disjoint(&disks[j]) {
                return false;
            }
        }
    }
    true
}

/// Isolates the roots of a monic polynomial whose coefficient enclosures at a
/// given working precision are produced by `coeffs_at` (lowest degree first,
/// leading coefficient exactly one).
///
/// Returns one disk per root, pairwise disjoint, each of radius at most
/// `2^-target_bits`. Fails with `EnclosureFailure` when the disks cannot be
/// separated below `cap_bits` (repeated or extremely close roots).
pub fn isolate_roots<F>(mut coeffs_at: F, target_bits: u32, cap_bits: u32) -> Result<Vec<Ball>>
where
    F: FnMut(u32) -> Result<Vec<Ball>>,
{
    let mut bits = (target_bits + 16).clamp(64, cap_bits.max(64));
    let mut approx: Option<Vec<(Rat, Rat)>> = None;
    let target = Rat::new(1.into(), num_bigint::BigInt::one() << target_bits);
    loop {
        let coeffs = coeffs_at(bits + 16)?;
        let n = coeffs.len().saturating_sub(1);
        if n == 0 {
            return Ok(Vec::new());
        }
        let centers: Vec<(Rat, Rat)> = coeffs.iter().map(|c| (c.re.clone(), c.im.clone())).collect();
        let mut z = match approx.take() {
            Some(z) => z,
            None => {
                let cf: Vec<C64> = centers
                    .iter()
                    .map(|(re, im)| C64::new(rat_to_f64(re), rat_to_f64(im)))
                    .collect();
                aberth(&cf)
                    .into_iter()
                    .map(|c| {
                        let c = if c.finite() { c } else { C64::new(0.5, 0.5) };
                        (round_rat(&rat_from_f64(c.re), 60), round_rat(&rat_from_f64(c.im), 60))
                    })
                    .collect()
            }
        };
        let tol = Rat::new(1.into(), num_bigint::BigInt::one() << (2 * bits as u64));
        for _ in 0..(12 + bits.ilog2() as usize * 2) {
            if weierstrass_sweep(&centers, &mut z, bits) <= tol {
                break;
            }
        }
        if let Some(disks) = inclusion_disks(&coeffs, &z, bits) {
            if pairwise_disjoint(&disks) && disks.iter().all(|d| d.rad <= target) {
                return Ok(sort_roots(disks));
            }
        }
        if bits >= cap_bits {
            return Err(GnsError::EnclosureFailure(cap_bits));
        }
        approx = Some(z);
        bits = (bits * 2).min(cap_bits);
    }
}

/// Ordering used for embeddings: increasing real part, then decreasing imaginary part.
fn sort_roots(mut disks: Vec<Ball>) -> Vec<Ball> {
    disks.sort_by(|a, b| {
        let (ar, ai, _) = a.to_f64();
        let (br, bi, _) = b.to_f64();
        let key = |r: f64| (r * 1e9).round();
        key(ar)
            .partial_cmp(&key(br))
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(bi.partial_cmp(&ai).unwrap_or(std::cmp::Ordering::Equal))
    });
    disks
}

/// Isolates the roots of a monic integer polynomial.
pub fn isolate_integer_roots(coeffs: &[num_bigint::BigInt], target_bits: u32, cap_bits: u32) -> Result<Vec<Ball>> {
    let balls: Vec<Ball> = coeffs.iter().map(Ball::from_int).collect();
    if balls.last().map(|b| b.re != Rat::one() || !b.im.is_zero()).unwrap_or(true) {
        return Err(GnsError::NotMonic);
    }
    isolate_roots(|_| Ok(balls.clone()), target_bits, cap_bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::rat;
    use num_bigint::BigInt;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn gaussian_roots() {
        let roots = isolate_integer_roots(&ints(&[1, 0, 1]), 40, DEFAULT_PRECISION_CAP).unwrap();
        assert_eq!(roots.len(), 2);
        assert!(roots[0].contains_point(&Rat::zero(), &Rat::one()));
        assert!(roots[1].contains_point(&Rat::zero(), &-Rat::one()));
    }

    #[test]
    fn rational_root_is_exact() {
        let roots = isolate_integer_roots(&ints(&[2, 1]), 40, DEFAULT_PRECISION_CAP).unwrap();
        assert_eq!(roots[0], Ball::real(rat(-2, 1)));
    }

    #[test]
    fn close_real_roots_separate() {
        // (x - 1000)(x - 1001)(x + 3)
        let roots = isolate_integer_roots(&ints(&[3003000, 994997, -1998, 1]), 30, DEFAULT_PRECISION_CAP).unwrap();
        assert_eq!(roots.len(), 3);
        assert!(roots[0].contains_point(&rat(-3, 1), &Rat::zero()));
        assert!(roots[2].contains_point(&rat(1001, 1), &Rat::zero()));
    }

    #[test]
    fn repeated_root_fails() {
        let err = isolate_integer_roots(&ints(&[4, 4, 1]), 20, 512).unwrap_err();
        assert_eq!(err, GnsError::EnclosureFailure(512));
    }
}
