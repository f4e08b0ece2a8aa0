//! Backward division, expansions, and the finiteness decision.

mod bound;
pub mod stepper;

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::ball::{Ball, Rat};
use crate::digits::DigitSet;
use crate::domain::FundamentalDomain;
use crate::error::{GnsError, Result};
use crate::order::{Order, OrderElement};
use crate::poly::{conjugate_product, is_expansive, is_squarefree, Expansivity, IntPoly, NonExpansiveReason, OPoly};

pub use bound::{Contraction, StateBound};
use stepper::{classify, max_length, Stepper};

/// Default working precision (bits) for enclosures.
pub const DEFAULT_BITS: u32 = 64;
/// Default cap on the number of states enumerated by [`GnsInstance::decide`].
pub const DEFAULT_MAX_STATES: u128 = 20_000_000;
/// Safety cap on the length of a single orbit during classification.
const ORBIT_CAP: usize = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DecideOptions {
    pub precision_bits: u32,
    pub max_states: u128,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions { precision_bits: DEFAULT_BITS, max_states: DEFAULT_MAX_STATES }
    }
}

/// A digit expansion `a ≡ Σ d_j x^j (mod p)`, least significant digit first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expansion {
    pub digits: Vec<OrderElement>,
}

impl Expansion {
    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// The polynomial `Σ d_j x^j`.
    pub fn to_poly(&self) -> OPoly {
        OPoly::new(self.digits.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExpandOutcome {
    Finite(Expansion),
    /// The orbit entered a nonzero cycle; the periodic states in visiting order.
    Cycle(Vec<OPoly>),
}

/// Certificate that `(p, D)` lacks the finiteness property:
/// `Σ_{j<h} d_j x^j = (x^h − 1)·q₁ + q₂·p` with digits not all zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub period: usize,
    pub states: Vec<OPoly>,
    pub digits: Vec<OrderElement>,
    pub q1: OPoly,
    pub q2: OPoly,
}

impl Witness {
    /// Checks the identity exactly and that some digit is nonzero.
    pub fn verify(&self, order: &Order, p: &OPoly) -> bool {
        let k = order.degree();
        if self.digits.len() != self.period || self.digits.iter().all(OrderElement::is_zero) {
            return false;
        }
        let lhs = OPoly::new(self.digits.clone());
        let xh = OPoly::constant(order.one()).shift(self.period, k).sub(&OPoly::constant(order.one()));
        let rhs = xh.mul(order, &self.q1).add(&self.q2.mul(order, p));
        lhs == rhs
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FailureReason {
    /// The modulus `p(0)` is a unit, so the digit set is `{0}`.
    DegenerateModulus,
    NotExpansive(NonExpansiveReason),
    Cycle(Box<Witness>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    FinitenessHolds,
    FinitenessFails(FailureReason),
    /// Expansivity could not be decided below the precision cap.
    Inconclusive(u32),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::FinitenessHolds)
    }

    pub fn fails(&self) -> bool {
        matches!(self, Verdict::FinitenessFails(_))
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::FinitenessFails(FailureReason::Cycle(w)) => Some(w),
            _ => None,
        }
    }

    /// Short machine-friendly name.
    pub fn tag(&self) -> &'static str {
        match self {
            Verdict::FinitenessHolds => "holds",
            Verdict::FinitenessFails(FailureReason::DegenerateModulus) => "fails:degenerate",
            Verdict::FinitenessFails(FailureReason::NotExpansive(_)) => "fails:not_expansive",
            Verdict::FinitenessFails(FailureReason::Cycle(_)) => "fails:cycle",
            Verdict::Inconclusive(_) => "inconclusive",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::FinitenessHolds => write!(f, "FinitenessHolds"),
            Verdict::FinitenessFails(FailureReason::DegenerateModulus) => write!(f, "FinitenessFails(DegenerateModulus)"),
            Verdict::FinitenessFails(FailureReason::NotExpansive(_)) => write!(f, "FinitenessFails(NotExpansive)"),
            Verdict::FinitenessFails(FailureReason::Cycle(w)) => write!(f, "FinitenessFails(Cycle, period {})", w.period),
            Verdict::Inconclusive(b) => write!(f, "Inconclusive({b} bits)"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecisionReport {
    pub verdict: Verdict,
    /// The bound `C` on conjugate values of cycle states, when computed.
    pub bound: Option<Rat>,
    /// Coordinate radii of the enumerated box (flattened, coefficient-major).
    pub radius: Vec<BigInt>,
    pub states_checked: u128,
    /// Number of distinct nonzero cycles meeting the box.
    pub cycles_found: usize,
}

/// A generalized number system `(p, D_{F,p(0)})` over an order.
pub struct GnsInstance {
    order: Arc<Order>,
    domain: Arc<dyn FundamentalDomain>,
    p: OPoly,
    n: usize,
    digits: DigitSet,
    conj: IntPoly,
    small: OnceLock<Option<Stepper<i128>>>,
    big: OnceLock<Option<Stepper<BigInt>>>,
    roots: OnceLock<Result<Vec<Vec<Ball>>>>,
    length_c: OnceLock<Result<usize>>,
}

impl fmt::Debug for GnsInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GnsInstance")
            .field("p", &self.p)
            .field("domain", &self.domain.describe())
            .field("digits", &self.digits.len())
            .finish()
    }
}

impl GnsInstance {
    pub fn new(order: Arc<Order>, domain: Arc<dyn FundamentalDomain>, p: OPoly) -> Result<GnsInstance> {
        let k = order.degree();
        if !p.is_monic() {
            return Err(GnsError::NotMonic);
        }
        let n = p.degree().unwrap();
        if n == 0 {
            return Err(GnsError::InvalidArgument("polynomial must have degree >= 1".into()));
        }
        for c in &p.coeffs {
            order.check(c)?;
        }
        if domain.dim() != k {
            return Err(GnsError::DimensionMismatch { expected: k, got: domain.dim() });
        }
        let digits = DigitSet::new(&order, domain.as_ref(), &p.coeff(0, k))?;
        let conj = conjugate_product(&order, &p)?;
        Ok(GnsInstance {
            order,
            domain,
            p,
            n,
            digits,
            conj,
            small: OnceLock::new(),
            big: OnceLock::new(),
            roots: OnceLock::new(),
            length_c: OnceLock::new(),
        })
    }

    pub fn order(&self) -> &Order {
        &self.order
    }

    pub fn order_arc(&self) -> Arc<Order> {
        self.order.clone()
    }

    pub fn domain(&self) -> &dyn FundamentalDomain {
        self.domain.as_ref()
    }

    pub fn domain_arc(&self) -> Arc<dyn FundamentalDomain> {
        self.domain.clone()
    }

    pub fn poly(&self) -> &OPoly {
        &self.p
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn digits(&self) -> &DigitSet {
        &self.digits
    }

    /// The integer polynomial `Π_i p^{(i)}`.
    pub fn conjugate_product(&self) -> &IntPoly {
        &self.conj
    }

    fn k(&self) -> usize {
        self.order.degree()
    }

    /// Converts a state polynomial to the flat coordinate layout.
    pub fn flatten(&self, b: &OPoly) -> Vec<BigInt> {
        let k = self.k();
        (0..self.n).flat_map(|j| b.coeff(j, k).coords).collect()
    }

    pub fn unflatten(&self, s: &[BigInt]) -> OPoly {
        let k = self.k();
        OPoly::new(s.chunks(k).map(|c| OrderElement::new(c.to_vec())).collect())
    }

    /// `T_p`: returns `(d₀, b′, q)` with `b = d₀ + x·b′ + q·p`.
    pub fn backward_step(&self, b: &OPoly) -> Result<(OrderElement, OPoly, OrderElement)> {
        if b.degree().is_some_and(|d| d >= self.n) {
            return Err(GnsError::InvalidArgument(format!("state degree must be below {}", self.n)));
        }
        let k = self.k();
        let (d, q) = self.digits.digit_for(&b.coeff(0, k))?;
        let next: Vec<OrderElement> = (1..=self.n)
            .map(|j| &b.coeff(j, k) - &self.order.mul(&q, &self.p.coeff(j, k)))
            .collect();
        Ok((d, OPoly::new(next), q))
    }

    /// Digit expansion of `a`, or the cycle its orbit falls into.
    pub fn expand(&self, a: &OPoly, step_cap: usize) -> Result<ExpandOutcome> {
        let mut b = a.rem(&self.order, &self.p)?;
        let mut digits = Vec::new();
        let mut seen: HashMap<OPoly, usize> = HashMap::new();
        let mut states = Vec::new();
        while !b.is_zero() {
            if let Some(&i) = seen.get(&b) {
                return Ok(ExpandOutcome::Cycle(states[i..].to_vec()));
            }
            if digits.len() >= step_cap {
                return Err(GnsError::StepCapExceeded(step_cap));
            }
            seen.insert(b.clone(), states.len());
            states.push(b.clone());
            let (d, next, _) = self.backward_step(&b)?;
            digits.push(d);
            b = next;
        }
        Ok(ExpandOutcome::Finite(Expansion { digits }))
    }

    fn small_stepper(&self) -> Option<&Stepper<i128>> {
        self.small.get_or_init(|| Stepper::new(&self.order, &self.p, &self.digits)).as_ref()
    }

    fn big_stepper(&self) -> Result<&Stepper<BigInt>> {
        self.big
            .get_or_init(|| Stepper::new(&self.order, &self.p, &self.digits))
            .as_ref()
            .ok_or_else(|| GnsError::Internal("could not build stepper".into()))
    }

    /// Certified bound on the states that can lie on a cycle.
    pub fn state_bound(&self, bits: u32) -> Result<StateBound> {
        match is_expansive(&self.conj, self.order.precision_cap())? {
            Expansivity::Expansive => {}
            Expansivity::NotExpansive(_) => {
                return Err(GnsError::NotApplicable("conjugate product is not expansive".into()))
            }
            Expansivity::Inconclusive(b) => return Err(GnsError::EnclosureFailure(b)),
        }
        bound::state_bound(self, bits)
    }

    /// Enclosures `α_{iℓ}` of the roots of each `p^{(i)}` (squarefree case).
    pub(crate) fn roots(&self, bits: u32) -> Result<Vec<Vec<Ball>>> {
        if bits <= DEFAULT_BITS {
            return self.roots.get_or_init(|| bound::isolate_conjugate_roots(self, DEFAULT_BITS)).clone();
        }
        bound::isolate_conjugate_roots(self, bits)
    }

    /// Decides the finiteness property.
    pub fn decide(&self, opts: &DecideOptions) -> Result<DecisionReport> {
        let dim = self.n * self.k();
        let empty = |verdict| DecisionReport {
            verdict,
            bound: None,
            radius: vec![BigInt::zero(); dim],
            states_checked: 0,
            cycles_found: 0,
        };
        if self.digits.norm().abs().is_one() {
            return Ok(empty(Verdict::FinitenessFails(FailureReason::DegenerateModulus)));
        }
        match is_expansive(&self.conj, self.order.precision_cap())? {
            Expansivity::Expansive => {}
            Expansivity::NotExpansive(r) => return Ok(empty(Verdict::FinitenessFails(FailureReason::NotExpansive(r)))),
            Expansivity::Inconclusive(b) => return Ok(empty(Verdict::Inconclusive(b))),
        }
        let sb = bound::state_bound(self, opts.precision_bits)?;
        let size = bound::box_size(&sb.radius);
        if size > opts.max_states {
            return Err(GnsError::TooLarge { size, cap: opts.max_states });
        }
        let (states_checked, cycles) = self.classify_box(&sb.radius)?;
        let verdict = match cycles.first() {
            None => Verdict::FinitenessHolds,
            Some(c) => {
                let states: Vec<OPoly> = c.iter().map(|s| self.unflatten(s)).collect();
                Verdict::FinitenessFails(FailureReason::Cycle(Box::new(self.witness_certificate(&states)?)))
            }
        };
        Ok(DecisionReport {
            verdict,
            bound: Some(sb.c.clone()),
            radius: sb.radius,
            states_checked,
            cycles_found: cycles.len(),
        })
    }

    /// Classifies every state in the box; returns the count and the distinct nonzero cycles.
    fn classify_box(&self, radius: &[BigInt]) -> Result<(u128, Vec<Vec<Vec<BigInt>>>)> {
        let dedup = |cycles: Vec<Vec<Vec<BigInt>>>| {
            let mut seen = std::collections::HashSet::new();
            cycles.into_iter().filter(|c| seen.insert(c[0].clone())).collect::<Vec<_>>()
        };
        if let Some(st) = self.small_stepper() {
            if let Some(r) = radius.iter().map(|x| i128::try_from(x).ok()).collect::<Option<Vec<_>>>() {
                if let Some(res) = classify(st, &r, ORBIT_CAP)? {
                    let cycles = res
                        .cycles
                        .into_iter()
                        .map(|c| c.into_iter().map(|s| s.into_iter().map(BigInt::from).collect()).collect())
                        .collect();
                    return Ok((res.states_checked, dedup(cycles)));
                }
            }
        }
        let st = self.big_stepper()?;
        let res = classify(st, radius, ORBIT_CAP)?.ok_or_else(|| GnsError::Internal("big stepper overflow".into()))?;
        Ok((res.states_checked, dedup(res.cycles)))
    }

    /// Certificate for a nonzero cycle `b₀ → b₁ → … → b₀`.
    pub fn witness_certificate(&self, cycle: &[OPoly]) -> Result<Witness> {
        if cycle.is_empty() || cycle[0].is_zero() {
            return Err(GnsError::InvalidArgument("witness needs a nonzero cycle".into()));
        }
        let h = cycle.len();
        let mut digits = Vec::with_capacity(h);
        let mut qs = Vec::with_capacity(h);
        let mut b = cycle[0].clone();
        for t in 0..h {
            if b != cycle[t] {
                return Err(GnsError::InvalidArgument("states do not form a cycle".into()));
            }
            let (d, next, q) = self.backward_step(&b)?;
            digits.push(d);
            qs.push(q);
            b = next;
        }
        if b != cycle[0] {
            return Err(GnsError::InvalidArgument("states do not form a cycle".into()));
        }
        let w = Witness {
            period: h,
            states: cycle.to_vec(),
            digits,
            q1: cycle[0].neg(),
            q2: OPoly::new(qs).neg(),
        };
        if !w.verify(&self.order, &self.p) {
            return Err(GnsError::Internal("witness identity failed".into()));
        }
        Ok(w)
    }

    /// Upper bound on the expansion length of `a`.
    pub fn length_bound(&self, a: &OPoly, bits: u32) -> Result<LengthBound> {
        if !is_squarefree(&self.conj) {
            return Err(GnsError::NotApplicable("conjugate product is not squarefree".into()));
        }
        let roots = self.roots(bits)?;
        let mut h: u64 = 0;
        for (i, alphas) in roots.iter().enumerate() {
            for alpha in alphas {
                let v = a.evaluate_embedded(&self.order, i, alpha, bits + 16)?.abs_upper();
                let base = alpha.abs_lower();
                if base <= Rat::one() {
                    return Err(GnsError::EnclosureFailure(bits));
                }
                let mut pow = Rat::one();
                let mut e = 0u64;
                while pow < v {
                    pow *= &base;
                    e += 1;
                }
                h = h.max(e);
            }
        }
        let c = self.length_constant()?;
        Ok(LengthBound { log_part: h, constant: c as u64 })
    }

    /// Longest expansion among the states of the value-bound box.
    pub fn length_constant(&self) -> Result<usize> {
        self.length_c
            .get_or_init(|| {
                let sb = self.state_bound(DEFAULT_BITS)?;
                let radius = sb
                    .explicit_radius
                    .ok_or_else(|| GnsError::NotApplicable("conjugate product is not squarefree".into()))?;
                let size = bound::box_size(&radius);
                if size > DEFAULT_MAX_STATES {
                    return Err(GnsError::TooLarge { size, cap: DEFAULT_MAX_STATES });
                }
                if let Some(st) = self.small_stepper() {
                    if let Some(r) = radius.iter().map(|x| i128::try_from(x).ok()).collect::<Option<Vec<_>>>() {
                        if let Some(l) = max_length(st, &r, ORBIT_CAP)? {
                            return Ok(l);
                        }
                    }
                }
                max_length(self.big_stepper()?, &radius, ORBIT_CAP)?
                    .ok_or_else(|| GnsError::Internal("big stepper overflow".into()))
            })
            .clone()
    }
}

/// `L(a) <= log_part + constant`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LengthBound {
    /// Smallest `h` with `|a^{(i)}(α_{iℓ})| <= |α_{iℓ}|^h` for all embeddings and roots.
    pub log_part: u64,
    /// Longest expansion of a state in the value-bound box.
    pub constant: u64,
}

impl LengthBound {
    pub fn total(&self) -> u64 {
        self.log_part + self.constant
    }
}
