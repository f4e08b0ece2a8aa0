//! Certified boxes containing every state that lies on a cycle of `T_p`.
//!
//! Two bounds are available. The value bound works with the conjugates of a
//! state evaluated at the roots `α_{iℓ}` of `p^{(i)}`: every cycle state `b`
//! satisfies `|b^{(i)}(α_{iℓ})| <= V_{iℓ} = max|d^{(i)}| / (1 − 1/|α_{iℓ}|) + 1`.
//! Values are turned into coefficient conjugates with an inverse Vandermonde
//! matrix and into coordinates with the inverse embedding matrix. It needs
//! distinct roots.
//!
//! The contraction bound uses the exact matrix `X` of multiplication by
//! `x^{-1}` on `O[x]/(p) ⊗ Q`, for which `T_p(b) = X(b − d₀)`. If
//! `c = ||X^h||_∞ < 1` then every cycle state has sup-norm at most
//! `δ Σ_{m<=h} ||X^m||_∞ / (1 − c)` with `δ` the largest digit coordinate.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::GnsInstance;
use crate::ball::{ceil_rat, floor_rat, Ball, Rat};
use crate::error::{GnsError, Result};
use crate::linalg::inverse_vandermonde;
use crate::poly::is_squarefree;
use crate::roots::isolate_roots;

/// Value-bound boxes larger than this are intersected with the contraction box.
const EXPLICIT_BOX_LIMIT: u128 = 4096;
/// Largest power of `x^{-1}` tried for the contraction bound.
const MAX_POWER: u32 = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Contraction {
    /// `h` with `||X^h||_∞ < 1`.
    pub power: u32,
    /// `||X^h||_∞`.
    pub factor: Rat,
    /// Sup-norm bound on cycle states.
    pub radius: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateBound {
    /// `C`: the largest value bound `V_{iℓ}`, or the contraction radius when
    /// the value bound is unavailable.
    pub c: Rat,
    /// `V_{iℓ}` per embedding and root.
    pub values: Vec<Vec<Rat>>,
    /// Coordinate radii from the value bound.
    pub explicit_radius: Option<Vec<BigInt>>,
    pub contraction: Option<Contraction>,
    /// Radii of the box that is enumerated.
    pub radius: Vec<BigInt>,
}

pub fn box_size(radius: &[BigInt]) -> u128 {
    radius.iter().fold(1u128, |acc, r| {
        let w: BigInt = r * 2 + 1;
        let w = w.to_u128().unwrap_or(u128::MAX);
        acc.saturating_mul(w)
    })
}

pub(super) fn isolate_conjugate_roots(inst: &GnsInstance, bits: u32) -> Result<Vec<Vec<Ball>>> {
    let order = inst.order();
    let cap = order.precision_cap();
    let one = Rat::one();
    let mut out = Vec::with_capacity(order.degree());
    for i in 0..order.degree() {
        let mut b = bits;
        loop {
            let roots = isolate_roots(|w| Ok(inst.poly().conjugate_coeffs(order, w)?.swap_remove(i)), b, cap)?;
            if roots.iter().all(|r| r.abs_lower() > one) {
                out.push(roots);
                break;
            }
            if b >= cap {
                return Err(GnsError::EnclosureFailure(cap));
            }
            b = (b * 2).min(cap);
        }
    }
    Ok(out)
}

struct ExplicitBound {
    c: Rat,
    values: Vec<Vec<Rat>>,
    radius: Vec<BigInt>,
}

fn explicit_bound(inst: &GnsInstance, bits: u32) -> Result<ExplicitBound> {
    let order = inst.order();
    let k = order.degree();
    let n = inst.degree();
    let mut maxd = Rat::zero();
    for d in inst.digits().elements() {
        if let Some(v) = d.as_integer() {
            maxd = maxd.max(Rat::from_integer(v.abs()));
            continue;
        }
        for v in order.conjugate_values(d, bits)? {
            maxd = maxd.max(v.abs_upper());
        }
    }
    let roots = inst.roots(bits)?;
    let one = Rat::one();
    let mut values = Vec::with_capacity(k);
    let mut c = Rat::zero();
    for alphas in &roots {
        let mut row = Vec::with_capacity(n);
        for a in alphas {
            let lo = a.abs_lower();
            let v = ceil_rat(&(&maxd * &lo / (&lo - &one) + &one), bits);
            c = c.max(v.clone());
            row.push(v);
        }
        values.push(row);
    }
    // coefficient conjugate bounds B[i][j]
    let mut coef = vec![vec![Rat::zero(); n]; k];
    for i in 0..k {
        let inv = inverse_vandermonde(&roots[i]).ok_or(GnsError::EnclosureFailure(bits))?;
        for j in 0..n {
            let mut s = Rat::zero();
            for l in 0..n {
                s += ceil_rat(&inv[j][l].abs_upper(), bits) * &values[i][l];
            }
            coef[i][j] = s;
        }
    }
    let omega_inv = order.embedding_matrix(bits)?.inverse;
    let mut radius = Vec::with_capacity(n * k);
    for j in 0..n {
        for row in omega_inv.iter().take(k) {
            let mut s = Rat::zero();
            for i in 0..k {
                s += ceil_rat(&row[i].abs_upper(), bits) * &coef[i][j];
            }
            radius.push(floor_rat(&s));
        }
    }
    Ok(ExplicitBound { c, values, radius })
}

fn mat_mul(a: &[Vec<Rat>], b: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    let n = a.len();
    let mut out = vec![vec![Rat::zero(); n]; n];
    for i in 0..n {
        for l in 0..n {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..n {
                if !b[l][j].is_zero() {
                    out[i][j] += &a[i][l] * &b[l][j];
                }
            }
        }
    }
    out
}

fn inf_norm(a: &[Vec<Rat>]) -> Rat {
    a.iter()
        .map(|r| r.iter().fold(Rat::zero(), |s, x| s + x.abs()))
        .fold(Rat::zero(), |m, x| m.max(x))
}

/// Matrix of multiplication by `x^{-1}` on the flat state coordinates.
fn inverse_x_matrix(inst: &GnsInstance) -> Result<Vec<Vec<Rat>>> {
    let order = inst.order();
    let k = order.degree();
    let n = inst.degree();
    let dim = n * k;
    let p = inst.poly();
    let p0 = p.coeff(0, k);
    let mut m = vec![vec![Rat::zero(); dim]; dim];
    for j in 1..n {
        for c in 0..k {
            m[(j - 1) * k + c][j * k + c] = Rat::one();
        }
    }
    // θ^c / x = -θ^c (p_1 + p_2 x + … + x^{n-1}) / p_0
    for c in 0..k {
        let tc = order.basis(c);
        for t in 0..n {
            let v = order.to_rational_coords(&order.mul(&tc, &p.coeff(t + 1, k)), &p0)?;
            for (cc, e) in v.entries.into_iter().enumerate() {
                m[t * k + cc][c] = -e;
            }
        }
    }
    Ok(m)
}

pub(crate) fn contraction_bound(inst: &GnsInstance) -> Result<Option<Contraction>> {
    let x = inverse_x_matrix(inst)?;
    let delta = inst
        .digits()
        .elements()
        .iter()
        .flat_map(|d| d.coords.iter().map(|c| c.abs()))
        .max()
        .unwrap_or_default();
    let one = Rat::one();
    let mut pw = x.clone();
    let mut sum = Rat::zero();
    for h in 1..=MAX_POWER {
        if h > 1 {
            pw = mat_mul(&pw, &x);
        }
        let nrm = inf_norm(&pw);
        sum += &nrm;
        if nrm < one {
            let e = &sum * Rat::from_integer(delta.clone());
            let radius = floor_rat(&(e / (&one - &nrm)));
            return Ok(Some(Contraction { power: h, factor: nrm, radius }));
        }
    }
    Ok(None)
}

pub(super) fn state_bound(inst: &GnsInstance, bits: u32) -> Result<StateBound> {
    let dim = inst.degree() * inst.order().degree();
    let explicit = if is_squarefree(inst.conjugate_product()) { Some(explicit_bound(inst, bits)?) } else { None };
    let need_contraction = explicit.as_ref().map(|p| box_size(&p.radius) > EXPLICIT_BOX_LIMIT).unwrap_or(true);
    let contraction = if need_contraction { contraction_bound(inst)? } else { None };
    let radius = match (&explicit, &contraction) {
        (Some(p), Some(c)) => p.radius.iter().map(|r| r.min(&c.radius).clone()).collect(),
        (Some(p), None) => p.radius.clone(),
        (None, Some(c)) => vec![c.radius.clone(); dim],
        (None, None) => return Err(GnsError::NotApplicable("no contraction within the power cap".into())),
    };
    let (c, values, explicit_radius) = match explicit {
        Some(p) => (p.c, p.values, Some(p.radius)),
        None => (Rat::from_integer(contraction.as_ref().unwrap().radius.clone()), Vec::new(), None),
    };
    Ok(StateBound { c, values, explicit_radius, contraction, radius })
}
