//! Sufficient and necessary criteria: the dominant condition, shift
//! searches, and the `h = 1` non-finiteness family.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::digits::DigitSet;
use crate::domain::FundamentalDomain;
use crate::engine::Witness;
use crate::error::{GnsError, Result};
use crate::order::{Order, OrderElement};
use crate::poly::OPoly;

/// Default cap on the number of tuples enumerated for `Z`.
pub const DEFAULT_Z_CAP: u128 = 1_000_000;

/// `Δ = N·ω` for the neighbor superset `N` of the domain.
pub fn delta_set(domain: &dyn FundamentalDomain) -> Vec<OrderElement> {
    domain
        .neighbor_superset()
        .vectors
        .into_iter()
        .map(OrderElement::new)
        .collect()
}

/// `Z = { Σ_{j=1}^n δ_j p_j : δ_j ∈ Δ }` with `p_n = 1`, sorted.
pub fn z_set(order: &Order, p: &OPoly, delta: &[OrderElement], size_cap: u128) -> Result<Vec<OrderElement>> {
    let k = order.degree();
    let n = p.degree().ok_or_else(|| GnsError::InvalidArgument("zero polynomial".into()))?;
    let size = (delta.len() as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if size > size_cap {
        return Err(GnsError::TooLarge { size, cap: size_cap });
    }
    let mut acc: BTreeSet<OrderElement> = BTreeSet::new();
    acc.insert(order.zero());
    for j in 1..=n {
        let pj = p.coeff(j, k);
        let terms: BTreeSet<OrderElement> = delta.iter().map(|d| order.mul(d, &pj)).collect();
        let mut next = BTreeSet::new();
        for a in &acc {
            for t in &terms {
                next.insert(a + t);
            }
        }
        acc = next;
    }
    Ok(acc.into_iter().collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Condition {
    Pass,
    /// The offending element; for the first condition also the pair `(ζ, d)`.
    Fail { element: OrderElement, pair: Option<(OrderElement, OrderElement)> },
}

impl Condition {
    pub fn passed(&self) -> bool {
        matches!(self, Condition::Pass)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DominantReport {
    pub delta: Vec<OrderElement>,
    pub z_size: usize,
    /// `Z + D ⊆ D + p₀Δ`.
    pub cond_i: Condition,
    /// `Z ⊆ D ∪ (D − p₀)`.
    pub cond_ii: Condition,
    /// Subset sums of `p_1, …, p_n` lie in `D`.
    pub cond_iii: Condition,
}

impl DominantReport {
    pub fn passes(&self) -> bool {
        self.cond_i.passed() && self.cond_ii.passed() && self.cond_iii.passed()
    }

    /// Index (1, 2 or 3) of the first failing condition.
    pub fn first_failure(&self) -> Option<u8> {
        [&self.cond_i, &self.cond_ii, &self.cond_iii]
            .iter()
            .position(|c| !c.passed())
            .map(|i| i as u8 + 1)
    }
}

impl fmt::Display for DominantReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |c: &Condition| match c {
            Condition::Pass => "pass".to_string(),
            Condition::Fail { element, pair: Some((z, d)) } => format!("fail at {element} = {z} + {d}"),
            Condition::Fail { element, pair: None } => format!("fail at {element}"),
        };
        writeln!(f, "|Delta| = {}, |Z| = {}", self.delta.len(), self.z_size)?;
        writeln!(f, "(i)   {}", show(&self.cond_i))?;
        writeln!(f, "(ii)  {}", show(&self.cond_ii))?;
        write!(f, "(iii) {}", show(&self.cond_iii))
    }
}

/// Checks the three inclusions of the dominant condition for `(p, D)`.
pub fn check_dominant(
    order: &Order,
    p: &OPoly,
    digits: &DigitSet,
    delta: &[OrderElement],
    size_cap: u128,
) -> Result<DominantReport> {
    let k = order.degree();
    let n = p.degree().ok_or_else(|| GnsError::InvalidArgument("zero polynomial".into()))?;
    let p0 = p.coeff(0, k);
    let z = z_set(order, p, delta, size_cap)?;
    let dset: HashSet<&OrderElement> = delta.iter().collect();

    let mut cond_i = Condition::Pass;
    'outer: for zeta in &z {
        for d in digits.elements() {
            let e = zeta + d;
            let (_, q) = digits.digit_for(&e)?;
            if !dset.contains(&q) {
                cond_i = Condition::Fail { element: e, pair: Some((zeta.clone(), d.clone())) };
                break 'outer;
            }
        }
    }

    let cond_ii = z
        .iter()
        .find(|zeta| !digits.contains(zeta) && !digits.contains(&(*zeta + &p0)))
        .map(|zeta| Condition::Fail { element: zeta.clone(), pair: None })
        .unwrap_or(Condition::Pass);

    let mut cond_iii = Condition::Pass;
    for mask in 0u64..(1u64 << n) {
        let mut s = order.zero();
        for j in 1..=n {
            if mask >> (j - 1) & 1 == 1 {
                s = &s + &p.coeff(j, k);
            }
        }
        if !digits.contains(&s) {
            cond_iii = Condition::Fail { element: s, pair: None };
            break;
        }
    }

    Ok(DominantReport { delta: delta.to_vec(), z_size: z.len(), cond_i, cond_ii, cond_iii })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShiftSign {
    Plus,
    Minus,
}

/// `p(x ± α)` by Horner's scheme.
pub fn taylor_shift(order: &Order, p: &OPoly, alpha: &OrderElement, sign: ShiftSign) -> OPoly {
    let a = match sign {
        ShiftSign::Plus => alpha.clone(),
        ShiftSign::Minus => -alpha,
    };
    let lin = OPoly::new(vec![a, order.one()]);
    let mut acc = OPoly::zero();
    for c in p.coeffs.iter().rev() {
        acc = acc.mul(order, &lin).add(&OPoly::constant(c.clone()));
    }
    acc
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShiftMode {
    /// `p(x + mδ)`.
    Compose,
    /// `p(x) + mδ`.
    Add,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrailEntry {
    pub m: u64,
    pub passed: bool,
    /// 1, 2 or 3 for a failed condition; 0 when the shifted constant term has norm zero.
    pub failed: Option<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftSearchResult {
    /// Smallest passing `m`, or `None` if none up to `m_max`.
    pub found: Option<u64>,
    pub m_max: u64,
    pub trail: Vec<TrailEntry>,
    /// The interior hypotheses behind the shift theorems are not satisfied
    /// for this domain and direction; a pass is still a valid certificate.
    pub hypothesis_not_met: bool,
}

/// The shifted polynomial used by [`shift_search`] at step `m`.
pub fn shifted(order: &Order, p: &OPoly, dir: &OrderElement, mode: ShiftMode, m: i64) -> OPoly {
    let a = dir.scale(&BigInt::from(m));
    match mode {
        ShiftMode::Compose => taylor_shift(order, p, &a, ShiftSign::Plus),
        ShiftMode::Add => p.add(&OPoly::constant(a)),
    }
}

/// Smallest `m ∈ 1..=m_max` for which the dominant condition holds for the
/// shifted polynomial. The result bounds the true finiteness threshold from above.
pub fn shift_search(
    order: &Order,
    domain: &dyn FundamentalDomain,
    p: &OPoly,
    dir: &OrderElement,
    mode: ShiftMode,
    m_max: u64,
    size_cap: u128,
) -> Result<ShiftSearchResult> {
    let k = order.degree();
    order.check(dir)?;
    let simple_dir = dir.coords[1..].iter().all(Zero::is_zero);
    let hypothesis_met = match (domain.hypothesis_flags(), mode) {
        (Ok(f), ShiftMode::Compose) => f.zero_in_int_union && f.zero_in_int_plus && simple_dir && dir.coords[0].is_positive(),
        (Ok(f), ShiftMode::Add) => f.zero_in_int && simple_dir && !dir.coords[0].is_zero(),
        (Err(_), _) => false,
    };
    let mut res = ShiftSearchResult { found: None, m_max, trail: Vec::new(), hypothesis_not_met: !hypothesis_met };
    if dir.is_zero() {
        return Ok(res);
    }
    let delta = delta_set(domain);
    for m in 1..=m_max {
        let q = shifted(order, p, dir, mode, m as i64);
        let q0 = q.coeff(0, k);
        if order.norm(&q0).is_zero() {
            res.trail.push(TrailEntry { m, passed: false, failed: Some(0) });
            continue;
        }
        let digits = DigitSet::new(order, domain, &q0)?;
        let rep = check_dominant(order, &q, &digits, &delta, size_cap)?;
        let passed = rep.passes();
        res.trail.push(TrailEntry { m, passed, failed: rep.first_failure() });
        if passed {
            res.found = Some(m);
            break;
        }
    }
    Ok(res)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyNote {
    Ok,
    /// `p(−m) = 0`: the witness digits would all vanish.
    DegenerateWitness,
    /// `p(−m−1)` has norm zero.
    ZeroModulus,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyRecord {
    pub m: i64,
    /// `p(−m) ∈ D_{F, p(−m−1)}`.
    pub flagged: bool,
    pub note: FamilyNote,
    /// `p(x − m − 1)`, the instance the witness refers to.
    pub shifted: OPoly,
    pub witness: Option<Witness>,
}

/// Runs the `h = 1` non-finiteness test for each `m` in the range.
pub fn non_finiteness_family(
    order: &Order,
    domain: &dyn FundamentalDomain,
    p: &OPoly,
    m_range: std::ops::RangeInclusive<i64>,
) -> Result<Vec<FamilyRecord>> {
    let k = order.degree();
    if !p.is_monic() {
        return Err(GnsError::NotMonic);
    }
    let mut out = Vec::new();
    for m in m_range {
        let pi = taylor_shift(order, p, &order.int(m + 1), ShiftSign::Minus);
        let theta = p.evaluate(order, &order.int(-m - 1));
        if order.norm(&theta).is_zero() {
            out.push(FamilyRecord { m, flagged: false, note: FamilyNote::ZeroModulus, shifted: pi, witness: None });
            continue;
        }
        let d0 = p.evaluate(order, &order.int(-m));
        let digits = DigitSet::new(order, domain, &theta)?;
        let flagged = digits.contains(&d0);
        if !flagged {
            out.push(FamilyRecord { m, flagged, note: FamilyNote::Ok, shifted: pi, witness: None });
            continue;
        }
        if d0.is_zero() {
            out.push(FamilyRecord { m, flagged, note: FamilyNote::DegenerateWitness, shifted: pi, witness: None });
            continue;
        }
        // Π(x) = (x − 1)·s(x) + Π(1) by synthetic division
        let n = pi.degree().unwrap();
        let mut s = vec![order.zero(); n];
        let mut carry = order.zero();
        for j in (1..=n).rev() {
            carry = &carry + &pi.coeff(j, k);
            s[j - 1] = carry.clone();
        }
        let s = OPoly::new(s);
        let w = Witness {
            period: 1,
            states: vec![s.clone()],
            digits: vec![d0],
            q1: s.neg(),
            q2: OPoly::constant(order.one()),
        };
        if !w.verify(order, &pi) {
            return Err(GnsError::Internal("family witness identity failed".into()));
        }
        out.push(FamilyRecord { m, flagged, note: FamilyNote::Ok, shifted: pi, witness: Some(w) });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{BoxDomain, SailDomain};

    fn z() -> Order {
        Order::from_i64s(&[-1, 1]).unwrap()
    }

    fn ints(v: &[OrderElement]) -> Vec<i64> {
        v.iter().map(|e| i64::try_from(&e.coords[0]).unwrap()).collect()
    }

    fn dominant(p: &[i64], f: &BoxDomain) -> DominantReport {
        let o = z();
        let p = OPoly::from_ints(p);
        let d = DigitSet::new(&o, f, &p.coeff(0, 1)).unwrap();
        check_dominant(&o, &p, &d, &delta_set(f), DEFAULT_Z_CAP).unwrap()
    }

    #[test]
    fn deltas() {
        assert_eq!(ints(&delta_set(&BoxDomain::unit(1))), vec![-1, 0, 1]);
        assert_eq!(delta_set(&BoxDomain::unit(2)).len(), 9);
        assert_eq!(delta_set(&SailDomain::euclidean()).len(), 15);
    }

    #[test]
    fn z_sets() {
        let o = z();
        let delta = delta_set(&BoxDomain::unit(1));
        let zs = z_set(&o, &OPoly::from_ints(&[12, 4, 1]), &delta, DEFAULT_Z_CAP).unwrap();
        assert_eq!(ints(&zs), vec![-5, -4, -3, -1, 0, 1, 3, 4, 5]);
        let zs = z_set(&o, &OPoly::from_ints(&[2, 1]), &delta, DEFAULT_Z_CAP).unwrap();
        assert_eq!(ints(&zs), vec![-1, 0, 1]);
        let zs = z_set(&o, &OPoly::from_ints(&[12, 4, 1]), &[o.zero()], DEFAULT_Z_CAP).unwrap();
        assert_eq!(ints(&zs), vec![0]);
        assert!(matches!(z_set(&o, &OPoly::from_ints(&[12, 4, 1]), &delta, 8), Err(GnsError::TooLarge { .. })));
    }

    #[test]
    fn dominant_examples() {
        let f = BoxDomain::unit(1);
        assert!(dominant(&[12, 4, 1], &f).passes());
        let r = dominant(&[5, 4, 1], &f);
        assert_eq!(r.first_failure(), Some(2));
        assert_eq!(r.cond_ii, Condition::Fail { element: z().int(5), pair: None });
        assert!(dominant(&[2, 1], &f).passes());
    }

    #[test]
    fn shifts() {
        let o = z();
        let p = OPoly::from_ints(&[0, 0, 1]);
        assert_eq!(taylor_shift(&o, &p, &o.int(1), ShiftSign::Plus), OPoly::from_ints(&[1, 2, 1]));
        let q = OPoly::from_ints(&[1, 1, 1]);
        assert_eq!(taylor_shift(&o, &q, &o.int(4), ShiftSign::Plus), OPoly::from_ints(&[21, 9, 1]));
        assert_eq!(taylor_shift(&o, &q, &o.int(0), ShiftSign::Plus), q);
        let back = taylor_shift(&o, &taylor_shift(&o, &q, &o.int(3), ShiftSign::Plus), &o.int(3), ShiftSign::Minus);
        assert_eq!(back, q);
    }

    #[test]
    fn shift_search_examples() {
        let o = z();
        let f = BoxDomain::unit(1);
        let r = shift_search(&o, &f, &OPoly::from_ints(&[1, 1, 1]), &o.int(1), ShiftMode::Compose, 20, DEFAULT_Z_CAP).unwrap();
        assert_eq!(r.found, Some(2));
        assert_eq!(r.trail[0].failed, Some(1));
        assert!(!r.hypothesis_not_met);
        let r = shift_search(&o, &f, &OPoly::from_ints(&[0, 0, 1]), &o.int(1), ShiftMode::Compose, 20, DEFAULT_Z_CAP).unwrap();
        assert_eq!(r.found, Some(3));
        let r = shift_search(&o, &f, &OPoly::from_ints(&[0, 0, 1]), &o.int(0), ShiftMode::Compose, 20, DEFAULT_Z_CAP).unwrap();
        assert_eq!(r.found, None);
        let r = shift_search(&o, &f, &OPoly::from_ints(&[0, 0, 1]), &o.int(-1), ShiftMode::Compose, 3, DEFAULT_Z_CAP).unwrap();
        assert!(r.hypothesis_not_met);
    }

    #[test]
    fn family() {
        let o = z();
        let p = OPoly::from_ints(&[0, 0, 1]);
        let recs = non_finiteness_family(&o, &BoxDomain::unit(1), &p, 1..=6).unwrap();
        for r in &recs {
            assert!(r.flagged);
            assert!(r.witness.as_ref().unwrap().verify(&o, &r.shifted));
        }
        let recs = non_finiteness_family(&o, &BoxDomain::symmetric(1), &p, 3..=8).unwrap();
        assert!(recs.iter().all(|r| !r.flagged));
        // p(-m) = 0 at m = 0
        let recs = non_finiteness_family(&o, &BoxDomain::unit(1), &p, 0..=0).unwrap();
        assert_eq!(recs[0].note, FamilyNote::DegenerateWitness);
    }
}
