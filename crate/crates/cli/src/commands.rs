//! Single-instance commands. Each returns a [`Report`] carrying both the
//! human-readable lines and the machine-readable records.

use std::sync::Arc;

use num_bigint::BigInt;

use gns_core::ball::rat_to_f64;
use gns_core::{
    check_dominant, delta_set, non_finiteness_family, shift_search, verify_tiling, DecideOptions, DigitSet,
    ExpandOutcome, FailureReason, FamilyNote, GnsInstance, NonExpansiveReason, OPoly, OrderElement, ShiftMode,
    Verdict, Witness,
};

use crate::config::{Config, EngineOptions};
use crate::error::CliError;
use crate::records::Record;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Human,
    Records,
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub human: Vec<String>,
    pub records: Vec<Record>,
    pub code: i32,
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        let mut s = String::new();
        match format {
            Format::Human => self.human.iter().for_each(|l| {
                s.push_str(l);
                s.push('\n');
            }),
            Format::Records => self.records.iter().for_each(|r| {
                s.push_str(&r.to_string());
                s.push('\n');
            }),
        }
        s
    }
}

pub fn fmt_elem(e: &OrderElement) -> String {
    e.coords.iter().map(BigInt::to_string).collect::<Vec<_>>().join(",")
}

/// Coefficients lowest first, `;`-separated, each a `,`-separated coordinate vector.
pub fn fmt_poly(p: &OPoly, k: usize) -> String {
    if p.is_zero() {
        return fmt_elem(&OrderElement::zero(k));
    }
    p.coeffs.iter().map(fmt_elem).collect::<Vec<_>>().join(";")
}

fn fmt_list(items: impl IntoIterator<Item = String>) -> String {
    format!("[{}]", items.into_iter().collect::<Vec<_>>().join(" "))
}

pub fn fmt_witness(w: &Witness, k: usize) -> String {
    format!(
        "h={} states={} digits={} q1={} q2={}",
        w.period,
        fmt_list(w.states.iter().map(|s| fmt_poly(s, k))),
        fmt_list(w.digits.iter().map(fmt_elem)),
        fmt_poly(&w.q1, k),
        fmt_poly(&w.q2, k)
    )
}

pub fn parse_elem(s: &str, k: usize) -> Result<OrderElement, CliError> {
    let coords = s
        .split(',')
        .map(|c| c.trim().parse::<BigInt>().map_err(|_| CliError::Usage(format!("invalid integer {c:?}"))))
        .collect::<Result<Vec<_>, _>>()?;
    if coords.len() != k {
        return Err(CliError::Usage(format!("{s:?} has {} coordinates, expected {k}", coords.len())));
    }
    Ok(OrderElement::new(coords))
}

/// Inverse of [`fmt_poly`].
pub fn parse_poly(s: &str, k: usize) -> Result<OPoly, CliError> {
    Ok(OPoly::new(s.split(';').map(|c| parse_elem(c, k)).collect::<Result<_, _>>()?))
}

fn instance(cfg: &Config) -> Result<GnsInstance, CliError> {
    Ok(GnsInstance::new(cfg.order.clone(), cfg.domain.clone(), cfg.poly()?.clone())?)
}

fn base_record(cmd: &str, p: &OPoly, k: usize, domain: &str) -> Record {
    Record::new().with("cmd", cmd).with("p", fmt_poly(p, k)).with("domain", domain)
}

pub fn cmd_digits(cfg: &Config) -> Result<Report, CliError> {
    let p = cfg.poly()?;
    let k = cfg.order.degree();
    let t = p.coeff(0, k);
    let d = DigitSet::new(&cfg.order, cfg.domain.as_ref(), &t)?;
    let mut human = vec![format!("modulus {} (norm {}), {} digits", fmt_elem(&t), d.norm(), d.len())];
    human.extend(d.elements().iter().map(|e| e.coords.iter().map(BigInt::to_string).collect::<Vec<_>>().join(" ")));
    let rec = base_record("digits", p, k, &cfg.domain.describe())
        .with("modulus", fmt_elem(&t))
        .with("count", d.len())
        .with("digits", fmt_list(d.elements().iter().map(fmt_elem)));
    Ok(Report { human, records: vec![rec], code: 0 })
}

/// Verdict fields shared by `decide` and `scan`.
pub fn decide_fields(inst: &GnsInstance, opts: &EngineOptions, rec: &mut Record, human: &mut Vec<String>) -> Result<i32, CliError> {
    let k = inst.order().degree();
    let r = inst.decide(&DecideOptions { precision_bits: opts.precision_bits, max_states: opts.max_states })?;
    rec.push("verdict", r.verdict.tag());
    human.push(format!("verdict: {}", r.verdict));
    if let Verdict::FinitenessFails(FailureReason::NotExpansive(reason)) = &r.verdict {
        let s = match reason {
            NonExpansiveReason::ZeroRoot => "zero_root".to_string(),
            NonExpansiveReason::ReciprocalFactor(g) => format!("reciprocal_factor({g})"),
            NonExpansiveReason::RootInsideDisk => "root_inside_disk".to_string(),
        };
        human.push(format!("reason: {s}"));
        rec.push("reason", s);
    }
    if let Some(c) = &r.bound {
        if c.is_integer() {
            human.push(format!("C: {c}"));
        } else {
            human.push(format!("C: {:.6} (exact {c})", rat_to_f64(c)));
        }
        rec.push("C", c);
    }
    let radius = r.radius.iter().map(BigInt::to_string).collect::<Vec<_>>().join(",");
    human.push(format!("box radius: {radius}"));
    human.push(format!("states_checked: {}", r.states_checked));
    human.push(format!("cycles_found: {}", r.cycles_found));
    rec.push("radius", radius);
    rec.push("states", r.states_checked);
    rec.push("cycles", r.cycles_found);
    if let Some(w) = r.verdict.witness() {
        let cert = fmt_witness(w, k);
        human.push(format!("witness: {cert}"));
        rec.push("certificate", cert);
    }
    Ok(if matches!(r.verdict, Verdict::Inconclusive(_)) { 2 } else { 0 })
}

pub fn cmd_decide(cfg: &Config) -> Result<Report, CliError> {
    let inst = instance(cfg)?;
    let k = cfg.order.degree();
    let mut rec = base_record("decide", inst.poly(), k, &cfg.domain.describe());
    let mut human = vec![format!("p = {}, F = {}", inst.poly(), cfg.domain.describe())];
    let code = decide_fields(&inst, &cfg.engine, &mut rec, &mut human)?;
    Ok(Report { human, records: vec![rec], code })
}

pub fn cmd_expand(cfg: &Config, value: &str) -> Result<Report, CliError> {
    let inst = instance(cfg)?;
    let k = cfg.order.degree();
    let a = parse_poly(value, k)?;
    let mut rec = base_record("expand", inst.poly(), k, &cfg.domain.describe()).with("a", fmt_poly(&a, k));
    let human = match inst.expand(&a, cfg.engine.step_cap)? {
        ExpandOutcome::Finite(x) => {
            let residual = x.to_poly().sub(&a).rem(inst.order(), inst.poly())?;
            if !residual.is_zero() {
                return Err(CliError::Gns(gns_core::GnsError::Internal("expansion does not reproduce its input".into())));
            }
            let digits: Vec<String> = x.digits.iter().map(fmt_elem).collect();
            rec.push("outcome", "finite");
            rec.push("length", x.len());
            rec.push("digits", digits.join(" "));
            vec![if digits.is_empty() { "(empty)".to_string() } else { digits.join(" ") }]
        }
        ExpandOutcome::Cycle(states) => {
            let s: Vec<String> = states.iter().map(|b| fmt_poly(b, k)).collect();
            rec.push("outcome", "cycle");
            rec.push("cycle", fmt_list(s.clone()));
            vec![format!("cycle: {}", s.join(" -> "))]
        }
    };
    Ok(Report { human, records: vec![rec], code: 0 })
}

pub fn cmd_dominant(cfg: &Config) -> Result<Report, CliError> {
    let p = cfg.poly()?;
    let k = cfg.order.degree();
    let d = DigitSet::new(&cfg.order, cfg.domain.as_ref(), &p.coeff(0, k))?;
    let delta = delta_set(cfg.domain.as_ref());
    let r = check_dominant(&cfg.order, p, &d, &delta, cfg.engine.z_cap)?;
    let mut rec = base_record("dominant", p, k, &cfg.domain.describe());
    dominant_fields(&r, &mut rec);
    let mut human: Vec<String> = r.to_string().lines().map(str::to_string).collect();
    human.push(format!("dominant condition: {}", if r.passes() { "holds" } else { "fails" }));
    Ok(Report { human, records: vec![rec], code: 0 })
}

pub fn dominant_fields(r: &gns_core::DominantReport, rec: &mut Record) {
    use gns_core::Condition;
    let show = |c: &Condition| match c {
        Condition::Pass => "pass".to_string(),
        Condition::Fail { element, .. } => format!("fail:{}", fmt_elem(element)),
    };
    rec.push("passes", r.passes());
    rec.push("delta", r.delta.len());
    rec.push("z", r.z_size);
    rec.push("cond_i", show(&r.cond_i));
    rec.push("cond_ii", show(&r.cond_ii));
    rec.push("cond_iii", show(&r.cond_iii));
}

pub fn cmd_shift_search(cfg: &Config, direction: Option<&str>, max_m: u64, mode: ShiftMode) -> Result<Report, CliError> {
    let p = cfg.poly()?;
    let k = cfg.order.degree();
    let dir = match direction {
        Some(s) => parse_elem(s, k)?,
        None => cfg.order.one(),
    };
    let r = shift_search(&cfg.order, cfg.domain.as_ref(), p, &dir, mode, max_m, cfg.engine.z_cap)?;
    let mode_s = match mode {
        ShiftMode::Compose => "compose",
        ShiftMode::Add => "add",
    };
    let trail: Vec<String> = r
        .trail
        .iter()
        .map(|t| match t.failed {
            None => format!("{}:pass", t.m),
            Some(c) => format!("{}:{}", t.m, c),
        })
        .collect();
    let mut human = vec![match r.found {
        Some(m) => format!("dominant condition holds at m = {m}"),
        None => format!("no m <= {} passes", r.m_max),
    }];
    if r.hypothesis_not_met {
        human.push("note: the interior hypotheses for this domain and direction are not met".into());
    }
    human.push(format!("trail: {}", trail.join(" ")));
    let rec = base_record("shift_search", p, k, &cfg.domain.describe())
        .with("direction", fmt_elem(&dir))
        .with("mode", mode_s)
        .with("found", r.found.map_or("none".to_string(), |m| m.to_string()))
        .with("m_max", r.m_max)
        .with("hypothesis_not_met", r.hypothesis_not_met)
        .with("trail", trail.join(" "));
    Ok(Report { human, records: vec![rec], code: 0 })
}

pub fn cmd_witness_family(cfg: &Config, min_m: i64, max_m: i64) -> Result<Report, CliError> {
    let p = cfg.poly()?;
    let k = cfg.order.degree();
    if min_m > max_m {
        return Ok(Report::default());
    }
    let recs = non_finiteness_family(&cfg.order, cfg.domain.as_ref(), p, min_m..=max_m)?;
    let mut report = Report::default();
    for r in recs {
        let note = match r.note {
            FamilyNote::Ok => "ok",
            FamilyNote::DegenerateWitness => "degenerate_witness",
            FamilyNote::ZeroModulus => "zero_modulus",
        };
        let verified = r.witness.as_ref().is_some_and(|w| w.verify(&cfg.order, &r.shifted));
        let mut rec = base_record("witness_family", p, k, &cfg.domain.describe())
            .with("m", r.m)
            .with("shifted", fmt_poly(&r.shifted, k))
            .with("flagged", r.flagged)
            .with("note", note);
        let mut line = format!("m = {}: {}", r.m, if r.flagged { "flagged" } else { "not flagged" });
        if let Some(w) = &r.witness {
            let cert = fmt_witness(w, k);
            line.push_str(&format!(", witness for {} ({})", r.shifted, if verified { "verified" } else { "NOT verified" }));
            rec.push("verified", verified);
            rec.push("certificate", cert);
        }
        if r.note != FamilyNote::Ok {
            line.push_str(&format!(" [{note}]"));
        }
        report.human.push(line);
        report.records.push(rec);
    }
    Ok(report)
}

pub fn cmd_hypotheses(cfg: &Config, samples: usize) -> Result<Report, CliError> {
    let d = cfg.domain.as_ref();
    let mut rec = Record::new().with("cmd", "hypotheses").with("domain", d.describe());
    let mut human = vec![format!("F = {}", d.describe())];
    match d.hypothesis_flags() {
        Ok(f) => {
            for (name, v) in [
                ("zero_in_int", f.zero_in_int),
                ("zero_in_int_plus", f.zero_in_int_plus),
                ("zero_in_int_union", f.zero_in_int_union),
                ("zero_in_int_minus_shift", f.zero_in_int_minus_shift),
            ] {
                human.push(format!("{name}: {v}"));
                rec.push(name, v);
            }
        }
        Err(_) => {
            human.push("interior flags: unsupported for this domain".into());
            rec.push("flags", "unsupported");
        }
    }
    let n = d.neighbor_superset();
    human.push(format!("neighbor superset: {} elements, contains 0: {}, generates: {}", n.len(), n.contains_zero(), n.generates_semigroup()));
    rec.push("neighbors", n.len());
    rec.push("generates", n.generates_semigroup());
    let t = verify_tiling(d, samples, 0);
    human.push(format!("tiling check: {} samples, {} failures", t.samples, t.failures.len()));
    rec.push("tiling_samples", t.samples);
    rec.push("tiling_failures", t.failures.len());
    Ok(Report { human, records: vec![rec], code: 0 })
}

/// Builds the instance for a scan row; shared with the scan driver.
pub fn row_instance(cfg: &Config, domain: &Arc<dyn gns_core::FundamentalDomain>, p: OPoly) -> Result<GnsInstance, CliError> {
    Ok(GnsInstance::new(cfg.order.clone(), domain.clone(), p)?)
}
