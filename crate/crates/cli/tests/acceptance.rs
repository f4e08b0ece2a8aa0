//! Acceptance run: one PASS/FAIL line per criterion.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::panic::{self, AssertUnwindSafe};
use std::sync::{Arc, OnceLock};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gns_cli::{parse_config, run_scan, ScanOptions};
use gns_core::{
    check_dominant, delta_set, is_expansive, non_finiteness_family, shift_search, taylor_shift, BoxDomain,
    DecideOptions, DigitSet, ExpandOutcome, Expansivity, FailureReason, FundamentalDomain, GnsInstance, IntPoly,
    NonExpansiveReason, OPoly, Order, OrderElement, SailDomain, ShiftMode, ShiftSign, Verdict, DEFAULT_Z_CAP,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn ok(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn z() -> Arc<Order> {
    Arc::new(Order::from_i64s(&[-1, 1]).unwrap())
}

fn gauss() -> Arc<Order> {
    Arc::new(Order::from_i64s(&[1, 0, 1]).unwrap())
}

fn unit() -> Arc<dyn FundamentalDomain> {
    Arc::new(BoxDomain::unit(1))
}

fn half(k: usize) -> Arc<dyn FundamentalDomain> {
    Arc::new(BoxDomain::symmetric(k))
}

fn zinst(p: &[i64], f: Arc<dyn FundamentalDomain>) -> GnsInstance {
    GnsInstance::new(z(), f, OPoly::from_ints(p)).unwrap()
}

fn decide(inst: &GnsInstance) -> gns_core::DecisionReport {
    inst.decide(&DecideOptions::default()).unwrap()
}

fn c1_base_two() -> Outcome {
    let start = Instant::now();
    let r = decide(&zinst(&[2, 1], unit()));
    let plus = r.verdict.holds() && r.bound == Some(BigRational::from_integer(3.into())) && r.states_checked <= 7;
    let inst = zinst(&[-2, 1], unit());
    let r2 = decide(&inst);
    let minus = match r2.verdict.witness() {
        Some(w) => {
            w.period == 1
                && w.digits == vec![OrderElement::from_i64s(&[-1])]
                && w.verify(inst.order(), inst.poly())
                && check_identity(w, inst.poly())
        }
        None => false,
    };
    let t = start.elapsed();
    ok(
        plus && minus && t < Duration::from_secs(1),
        format!("x+2: {} C={:?} states={}; x-2: {} ({:.3}s)", r.verdict, r.bound.map(|c| c.to_string()), r.states_checked, r2.verdict, t.as_secs_f64()),
    )
}

/// `Σ d_j x^j = (x^h − 1) q₁ + q₂ p` recomputed with plain integer polynomials.
fn check_identity(w: &gns_core::Witness, p: &OPoly) -> bool {
    let ints = |q: &OPoly| IntPoly::new(q.coeffs.iter().map(|c| c.coords[0].clone()).collect());
    let lhs = IntPoly::new(w.digits.iter().map(|d| d.coords[0].clone()).collect());
    let mut xh = vec![BigInt::zero(); w.period + 1];
    xh[0] = -BigInt::one();
    xh[w.period] = BigInt::one();
    lhs == IntPoly::new(xh).mul(&ints(&w.q1)).add(&ints(&w.q2).mul(&ints(p)))
}

/// Forward search for `x² + bx + c` with digits `{0, …, c−1}`: every
/// `a₀ + a₁x` with `|a_i| <= 50` is expanded with a step cap; returns whether
/// any orbit revisits a nonzero state or exceeds the cap.
fn quadratic_oracle(b: i64, c: i64) -> bool {
    let mut good: HashSet<(i64, i64)> = HashSet::new();
    for a0 in -50..=50 {
        for a1 in -50..=50 {
            let mut s = (a0, a1);
            let mut path = Vec::new();
            let mut on_path = HashSet::new();
            let mut steps = 0;
            while s != (0, 0) && !good.contains(&s) {
                if !on_path.insert(s) || steps >= 10_000 {
                    return true;
                }
                path.push(s);
                let d = s.0.rem_euclid(c);
                let q = (s.0 - d) / c;
                match q.checked_mul(b).and_then(|qb| s.1.checked_sub(qb)) {
                    Some(v) => s = (v, -q),
                    None => return true,
                }
                steps += 1;
            }
            good.extend(path);
        }
    }
    false
}

fn c2_quadratic_oracle() -> Outcome {
    let start = Instant::now();
    let mut disagree = Vec::new();
    let mut region_ok = true;
    let mut total = 0;
    for c in 2i64..=8 {
        for b in -(c + 2)..=(c + 2) {
            total += 1;
            let oracle_holds = !quadratic_oracle(b, c);
            let holds = decide(&zinst(&[c, b, 1], unit())).verdict.holds();
            if holds != oracle_holds {
                disagree.push((b, c));
            }
            if oracle_holds != (-1 <= b && b <= c) {
                region_ok = false;
            }
        }
    }
    let t = start.elapsed();
    ok(
        disagree.is_empty() && region_ok && t < Duration::from_secs(120),
        format!("{total} instances, disagreements {disagree:?}, oracle region -1<=b<=c: {region_ok} ({:.1}s)", t.as_secs_f64()),
    )
}

fn c3_shifted_family() -> Outcome {
    let start = Instant::now();
    let bad: Vec<i64> = (0..=10).filter(|&m| !decide(&zinst(&[2 + m, -2, 1], unit())).verdict.fails()).collect();
    let t = start.elapsed();
    ok(bad.is_empty() && t < Duration::from_secs(60), format!("m in 0..=10, not failing: {bad:?} ({:.1}s)", t.as_secs_f64()))
}

static GAUSS_INSTANCE: OnceLock<Option<OPoly>> = OnceLock::new();

fn c4_dominant_soundness() -> Outcome {
    let start = Instant::now();
    let mut passes = 0;
    let mut checked = 0;
    let mut exceptions = Vec::new();
    // integer corpus of criterion 2
    let f = unit();
    for c in 2i64..=8 {
        for b in -(c + 2)..=(c + 2) {
            let p = OPoly::from_ints(&[c, b, 1]);
            let o = z();
            let d = DigitSet::new(&o, f.as_ref(), &p.coeff(0, 1)).unwrap();
            checked += 1;
            if check_dominant(&o, &p, &d, &delta_set(f.as_ref()), DEFAULT_Z_CAP).unwrap().passes() {
                passes += 1;
                if !decide(&zinst(&[c, b, 1], f.clone())).verdict.holds() {
                    exceptions.push(p.to_string());
                }
            }
        }
    }
    let zpasses = passes;
    // Gaussian corpus
    let g = gauss();
    let f = half(2);
    let delta = delta_set(f.as_ref());
    let mut first: Option<OPoly> = None;
    for a0 in -3i64..=3 {
        for b0 in -3i64..=3 {
            if a0 == 0 && b0 == 0 {
                continue;
            }
            let p0 = g.element(&[a0, b0]).unwrap();
            let d = DigitSet::new(&g, f.as_ref(), &p0).unwrap();
            for a1 in -3i64..=3 {
                for b1 in -3i64..=3 {
                    let p = OPoly::from_coords(&[vec![a0, b0], vec![a1, b1], vec![1, 0]]);
                    checked += 1;
                    if !check_dominant(&g, &p, &d, &delta, DEFAULT_Z_CAP).unwrap().passes() {
                        continue;
                    }
                    passes += 1;
                    let inst = GnsInstance::new(g.clone(), f.clone(), p.clone()).unwrap();
                    if !decide(&inst).verdict.holds() {
                        exceptions.push(p.to_string());
                    } else if first.is_none() && gns_core::poly::is_squarefree(inst.conjugate_product()) {
                        first = Some(p.clone());
                    }
                }
            }
        }
    }
    let _ = GAUSS_INSTANCE.set(first);
    ok(
        exceptions.is_empty() && passes > zpasses && zpasses > 0,
        format!(
            "{checked} instances, {passes} dominant passes ({zpasses} over Z), exceptions {exceptions:?} ({:.1}s)",
            start.elapsed().as_secs_f64()
        ),
    )
}

fn c5_shift_search() -> Outcome {
    let start = Instant::now();
    let o = z();
    let f = half(1);
    let mut failures = Vec::new();
    let mut worst = 0;
    // failures at m itself would mean the dominant check is unsound
    let mut unsound = 0;
    for b in -3i64..=3 {
        for c in -3i64..=3 {
            let p = OPoly::from_ints(&[c, b, 1]);
            let r = shift_search(&o, f.as_ref(), &p, &o.one(), ShiftMode::Compose, 50, DEFAULT_Z_CAP).unwrap();
            let Some(m) = r.found else {
                failures.push(format!("{p}: none <= 50"));
                continue;
            };
            worst = worst.max(m);
            for mm in m..=m + 5 {
                let before = failures.len();
                let q = taylor_shift(&o, &p, &o.int(mm as i64), ShiftSign::Plus);
                let inst = match GnsInstance::new(o.clone(), f.clone(), q.clone()) {
                    Ok(i) => i,
                    Err(e) => {
                        failures.push(format!("{q} (m={m}, m'={mm}): {e}"));
                        continue;
                    }
                };
                match inst.decide(&DecideOptions::default()) {
                    Ok(r) if r.verdict.holds() => {}
                    Ok(r) => failures.push(format!("{q}: {}", r.verdict)),
                    Err(e) => failures.push(format!("{q}: {e}")),
                }
                if mm == m && failures.len() > before {
                    unsound += 1;
                }
            }
        }
    }
    let t = start.elapsed();
    ok(
        failures.is_empty() && t < Duration::from_secs(300),
        format!(
            "49 polynomials, largest m {worst}, failures at m itself {unsound}, failures {failures:?} ({:.1}s)",
            t.as_secs_f64()
        ),
    )
}

fn c6_family() -> Outcome {
    let start = Instant::now();
    let o = z();
    let mut problems = Vec::new();
    for pc in [vec![0i64, 0, 1], vec![1, 1, 1]] {
        let p = OPoly::from_ints(&pc);
        let recs = non_finiteness_family(&o, &BoxDomain::unit(1), &p, 1..=12).unwrap();
        let by_m: HashMap<i64, _> = recs.iter().map(|r| (r.m, r)).collect();
        for m in 2..=12i64 {
            let r = by_m[&m];
            let verified = r.witness.as_ref().is_some_and(|w| w.verify(&o, &r.shifted));
            if !r.flagged || !verified {
                problems.push(format!("{p}, m={m}: flagged={} verified={verified}", r.flagged));
            }
            // p(x − m) is covered by the record for m − 1
            let prev = by_m[&(m - 1)];
            let target = taylor_shift(&o, &p, &o.int(m), ShiftSign::Minus);
            let cross = prev.shifted == target && prev.witness.as_ref().is_some_and(|w| w.verify(&o, &target));
            let v = decide(&GnsInstance::new(o.clone(), unit(), target.clone()).unwrap()).verdict;
            if !cross || !v.fails() {
                problems.push(format!("{target}: certificate {cross}, decide {v}"));
            }
        }
    }
    let sym = non_finiteness_family(&o, &BoxDomain::symmetric(1), &OPoly::from_ints(&[0, 0, 1]), 3..=12).unwrap();
    let flagged: Vec<i64> = sym.iter().filter(|r| r.flagged).map(|r| r.m).collect();
    let t = start.elapsed();
    ok(
        problems.is_empty() && flagged.is_empty() && t < Duration::from_secs(120),
        format!("problems {problems:?}; symmetric x^2 flagged at {flagged:?} ({:.1}s)", t.as_secs_f64()),
    )
}

type Q = BigRational;

fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

/// Independent digit enumeration for `Z` and quadratic orders `Z[θ]`,
/// `θ² = −c − bθ`: all lattice points `x` near `ϑF` with `ϑ⁻¹x ∈ F`.
fn oracle_digits(minpoly: &[i64], t: &[i64], member: &dyn Fn(&[Q]) -> bool, reach: i64) -> BTreeSet<Vec<i64>> {
    let mut out = BTreeSet::new();
    if minpoly.len() == 2 {
        let r = t[0].abs() * reach + 1;
        for x in -r..=r {
            if member(&[Q::new(x.into(), t[0].into())]) {
                out.insert(vec![x]);
            }
        }
        return out;
    }
    let (c, b) = (minpoly[0], minpoly[1]);
    // columns: ϑ·1 = (t0, t1), ϑ·θ = (−c t1, t0 − b t1)
    let m = [[t[0], -c * t[1]], [t[1], t[0] - b * t[1]]];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let r0 = (m[0][0].abs() + m[0][1].abs()) * reach + 1;
    let r1 = (m[1][0].abs() + m[1][1].abs()) * reach + 1;
    for x0 in -r0..=r0 {
        for x1 in -r1..=r1 {
            let y0 = Q::new((m[1][1] * x0 - m[0][1] * x1).into(), det.into());
            let y1 = Q::new((m[0][0] * x1 - m[1][0] * x0).into(), det.into());
            if member(&[y0, y1]) {
                out.insert(vec![x0, x1]);
            }
        }
    }
    out
}

fn box_member(a: Vec<Q>) -> impl Fn(&[Q]) -> bool {
    move |y: &[Q]| y.iter().zip(&a).all(|(v, lo)| lo <= v && *v < lo + q(1))
}

fn sail_member(re: Q, im_sq: Q) -> impl Fn(&[Q]) -> bool {
    move |y: &[Q]| {
        let (r1, r2) = (&y[0], &y[1]);
        if *r2 < Q::new((-1).into(), 2.into()) || *r2 >= Q::new(1.into(), 2.into()) {
            return false;
        }
        let u = r1 + r2 * &re;
        let t2 = r2 * r2 * &im_sq;
        let v = &u - q(1);
        &u * &u + &t2 < q(1) && &v * &v + &t2 >= q(1)
    }
}

fn c7_digit_sets() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut problems = Vec::new();
    let mut tested = 0;
    let mut brute = 0;
    let orders: [(&str, Vec<i64>); 3] = [("Z", vec![-1, 1]), ("Z[i]", vec![1, 0, 1]), ("Z[(1+sqrt(-11))/2]", vec![3, -1, 1])];
    for (name, mp) in &orders {
        let o = Order::from_i64s(mp).unwrap();
        let k = o.degree();
        let mut domains: Vec<(String, Box<dyn FundamentalDomain>, Box<dyn Fn(&[Q]) -> bool>)> = Vec::new();
        let zero = vec![q(0); k];
        let halfs = vec![Q::new((-1).into(), 2.into()); k];
        domains.push(("unit box".into(), Box::new(BoxDomain::unit(k)), Box::new(box_member(zero))));
        domains.push(("half box".into(), Box::new(BoxDomain::symmetric(k)), Box::new(box_member(halfs))));
        if k == 2 {
            let re = Q::new((-mp[1]).into(), 2.into());
            let im_sq = q(mp[0]) - Q::new((mp[1] * mp[1]).into(), 4.into());
            domains.push(("sail".into(), Box::new(SailDomain::norm_form(re.clone(), im_sq.clone()).unwrap()), Box::new(sail_member(re, im_sq))));
        }
        let mut count = 0;
        while count < 200 {
            let t: Vec<i64> = if k == 1 {
                vec![rng.gen_range(-200..=200)]
            } else {
                vec![rng.gen_range(-15..=15), rng.gen_range(-15..=15)]
            };
            let te = OrderElement::from_i64s(&t);
            let n = o.norm(&te).abs();
            if n < BigInt::from(2) || n > BigInt::from(200) {
                continue;
            }
            count += 1;
            for (dname, f, member) in &domains {
                tested += 1;
                let d = match DigitSet::new(&o, f.as_ref(), &te) {
                    Ok(d) => d,
                    Err(e) => {
                        problems.push(format!("{name} {dname} {t:?}: {e}"));
                        continue;
                    }
                };
                if BigInt::from(d.len()) != n {
                    problems.push(format!("{name} {dname} {t:?}: |D| = {}", d.len()));
                }
                let hnf = o.modulus_hnf(&te).unwrap();
                let classes: HashSet<Vec<BigInt>> = d.elements().iter().map(|e| hnf.reduce(&e.coords)).collect();
                if classes.len() != d.len() {
                    problems.push(format!("{name} {dname} {t:?}: congruent digits"));
                }
                for e in d.elements() {
                    let y = o.to_rational_coords(e, &te).unwrap();
                    if !member(&y.entries) {
                        problems.push(format!("{name} {dname} {t:?}: {e}/theta outside F"));
                    }
                }
                if n <= BigInt::from(20) {
                    brute += 1;
                    let mine: BTreeSet<Vec<i64>> =
                        d.elements().iter().map(|e| e.coords.iter().map(|c| i64::try_from(c).unwrap()).collect()).collect();
                    if mine != oracle_digits(mp, &t, member.as_ref(), 3) {
                        problems.push(format!("{name} {dname} {t:?}: differs from brute force"));
                    }
                }
            }
        }
    }
    problems.truncate(5);
    ok(
        problems.is_empty(),
        format!("{tested} digit sets, {brute} brute-force comparisons, problems {problems:?} ({:.1}s)", start.elapsed().as_secs_f64()),
    )
}

fn round_trip(inst: &GnsInstance, rng: &mut ChaCha8Rng, problems: &mut Vec<String>) {
    let k = inst.order().degree();
    for _ in 0..100 {
        let deg = rng.gen_range(0..=3);
        let coeffs: Vec<Vec<i64>> = (0..=deg).map(|_| (0..k).map(|_| rng.gen_range(-1000..=1000)).collect()).collect();
        let a = OPoly::from_coords(&coeffs);
        match inst.expand(&a, 100_000) {
            Ok(ExpandOutcome::Finite(x)) => {
                if !x.to_poly().sub(&a).rem(inst.order(), inst.poly()).unwrap().is_zero() {
                    problems.push(format!("{a}: wrong expansion"));
                }
                match inst.length_bound(&a, 64) {
                    Ok(lb) if x.len() as u64 <= lb.total() => {}
                    Ok(lb) => problems.push(format!("{a}: L = {} > {}", x.len(), lb.total())),
                    Err(e) => problems.push(format!("{a}: {e}")),
                }
            }
            other => problems.push(format!("{a}: {other:?}")),
        }
    }
}

fn c8_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut problems = Vec::new();
    round_trip(&zinst(&[2, 1], unit()), &mut rng, &mut problems);
    let gp = GAUSS_INSTANCE.get().cloned().flatten();
    let label = match &gp {
        Some(p) => {
            round_trip(&GnsInstance::new(gauss(), half(2), p.clone()).unwrap(), &mut rng, &mut problems);
            p.to_string()
        }
        None => {
            problems.push("no Z[i] instance from the soundness corpus".into());
            "none".into()
        }
    };
    problems.truncate(5);
    ok(problems.is_empty(), format!("x+2 and Z[i] instance {label}: problems {problems:?}"))
}

fn c9_expansivity() -> Outcome {
    let r = decide(&zinst(&[2, -3, 1], unit()));
    let first = matches!(r.verdict, Verdict::FinitenessFails(FailureReason::NotExpansive(_))) && r.states_checked == 0;
    let recip =
        |c: &[i64]| matches!(is_expansive(&IntPoly::from_i64s(c), 64), Ok(Expansivity::NotExpansive(NonExpansiveReason::ReciprocalFactor(_))));
    let lin = recip(&[-1, 1]);
    let quartic = recip(&[-1, 0, 0, 0, 1]);
    ok(first && lin && quartic, format!("x^2-3x+2: {} with {} states; x-1: {lin}; x^4-1: {quartic}", r.verdict, r.states_checked))
}

fn c10_scan_determinism() -> Outcome {
    let text = "[order]\nmin_poly = [-1, 1]\n[domain]\nfamily = \"box\"\n[scan]\ncommand = \"decide\"\nranges = [[[2, 8]], [[-10, 10]]]\n";
    let cfg = parse_config(text).unwrap();
    let run = |workers| {
        let mut out = Vec::new();
        let opts = ScanOptions { workers, format: gns_cli::Format::Records, ..Default::default() };
        let t = Instant::now();
        run_scan(&cfg, &opts, &mut out).unwrap();
        (out, t.elapsed())
    };
    let (serial, ts) = run(1);
    let (parallel, tp) = run(4);
    let same = serial == parallel && !serial.is_empty();
    ok(
        same && ts < Duration::from_secs(120),
        format!("{} bytes, identical: {same}, serial {:.1}s, 4 workers {:.1}s", serial.len(), ts.as_secs_f64(), tp.as_secs_f64()),
    )
}

fn main() {
    let criteria: [(u8, &str, fn() -> Outcome); 10] = [
        (1, "base +-2 sanity", c1_base_two),
        (2, "quadratic oracle equivalence", c2_quadratic_oracle),
        (3, "x^2-2x+2+m fails", c3_shifted_family),
        (4, "dominant condition soundness", c4_dominant_soundness),
        (5, "constructive shift search", c5_shift_search),
        (6, "h=1 non-finiteness family", c6_family),
        (7, "digit-set invariants", c7_digit_sets),
        (8, "round trip and length bound", c8_round_trip),
        (9, "expansivity necessity", c9_expansivity),
        (10, "scan determinism and speed", c10_scan_determinism),
    ];
    let mut failed = 0;
    for (n, name, f) in criteria {
        let outcome = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            ok(false, format!("panicked: {}", msg.unwrap_or_default()))
        });
        if !outcome.pass {
            failed += 1;
        }
        println!("criterion {n:2} {}: {name} -- {}", if outcome.pass { "PASS" } else { "FAIL" }, outcome.detail);
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    // the report is the result; set ACCEPTANCE_STRICT=1 to also fail the process
    if failed > 0 && std::env::var_os("ACCEPTANCE_STRICT").is_some() {
        std::process::exit(1);
    }
}
