//! Batch sweeps over coefficient ranges.
//!
//! Rows are numbered domain-major, then lexicographically over the
//! coefficient coordinates (last coordinate fastest). Results are computed in
//! chunks, optionally in parallel, and written in row order; after each chunk
//! the checkpoint file receives the last completed row index.

use std::fs::{self, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;

use gns_core::{check_dominant, delta_set, DigitSet, OPoly, OrderElement};

use crate::commands::{decide_fields, dominant_fields, fmt_poly, row_instance, Format};
use crate::config::{Config, ScanCommand, ScanSpec};
use crate::error::CliError;
use crate::records::Record;

const CHUNK: u128 = 256;

#[derive(Clone, Debug, Default)]
pub struct ScanOptions {
    pub workers: usize,
    pub checkpoint: Option<PathBuf>,
    pub timing: bool,
    pub format: Format,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanSummary {
    pub total: u128,
    pub first_row: u128,
    pub written: u128,
}

/// The polynomial of row `idx` within a domain block.
pub fn row_poly(spec: &ScanSpec, k: usize, idx: u128) -> OPoly {
    let mut vals = vec![0i64; spec.ranges.len()];
    let mut rest = idx;
    for (i, &(lo, hi)) in spec.ranges.iter().enumerate().rev() {
        let w = (hi - lo + 1) as u128;
        vals[i] = lo + (rest % w) as i64;
        rest /= w;
    }
    let mut coeffs: Vec<OrderElement> = vals.chunks(k).map(OrderElement::from_i64s).collect();
    coeffs.push(OrderElement::one(k));
    OPoly::new(coeffs)
}

fn eval_row(cfg: &Config, spec: &ScanSpec, idx: u128, timing: bool) -> (Record, String) {
    let k = cfg.order.degree();
    let per = spec.rows_per_domain();
    let domain = &spec.domains[(idx / per) as usize];
    let p = row_poly(spec, k, idx % per);
    let mut rec = Record::new()
        .with("row", idx)
        .with("cmd", spec.command)
        .with("p", fmt_poly(&p, k))
        .with("domain", domain.describe());
    let start = Instant::now();
    let res: Result<String, CliError> = (|| match spec.command {
        ScanCommand::Decide => {
            let inst = row_instance(cfg, domain, p.clone())?;
            decide_fields(&inst, &cfg.engine, &mut rec, &mut Vec::new())?;
            Ok(rec.get("verdict").unwrap_or_default().to_string())
        }
        ScanCommand::Dominant => {
            let d = DigitSet::new(&cfg.order, domain.as_ref(), &p.coeff(0, k))?;
            let r = check_dominant(&cfg.order, &p, &d, &delta_set(domain.as_ref()), cfg.engine.z_cap)?;
            dominant_fields(&r, &mut rec);
            Ok(if r.passes() { "pass".to_string() } else { format!("fail({})", r.first_failure().unwrap()) })
        }
    })();
    let summary = match res {
        Ok(s) => s,
        Err(e) => {
            rec.push("status", "error");
            rec.push("error", &e);
            format!("error: {e}")
        }
    };
    if timing {
        rec.push("ms", start.elapsed().as_millis());
    }
    let line = format!("{idx}\t{}\t{}\t{summary}", fmt_poly(&p, k), domain.describe());
    (rec, line)
}

fn read_checkpoint(path: &PathBuf) -> Result<Option<u128>, CliError> {
    match fs::read_to_string(path) {
        Ok(s) => s
            .trim()
            .parse::<u128>()
            .map(Some)
            .map_err(|_| CliError::Validation(format!("malformed checkpoint file {}", path.display()))),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(e.into()),
    }
}

pub fn run_scan(cfg: &Config, opts: &ScanOptions, out: &mut dyn Write) -> Result<ScanSummary, CliError> {
    let spec = cfg.scan.as_ref().ok_or_else(|| CliError::Validation("missing [scan] section".into()))?;
    let total = spec.row_count();
    let first_row = match &opts.checkpoint {
        Some(p) => read_checkpoint(p)?.map_or(0, |i| i + 1),
        None => 0,
    };
    let mut file_out;
    let sink: &mut dyn Write = match &spec.output {
        Some(path) => {
            let f = OpenOptions::new()
                .create(true)
                .write(true)
                .append(first_row > 0)
                .truncate(first_row == 0)
                .open(path)?;
            file_out = BufWriter::new(f);
            &mut file_out
        }
        None => out,
    };
    let pool = if opts.workers > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(opts.workers)
                .build()
                .map_err(|e| CliError::Usage(e.to_string()))?,
        )
    } else {
        None
    };
    let mut written = 0u128;
    let mut start = first_row;
    while start < total {
        let end = (start + CHUNK).min(total);
        let rows: Vec<(Record, String)> = match &pool {
            Some(pool) => pool.install(|| {
                (start..end)
                    .into_par_iter()
                    .map(|i| eval_row(cfg, spec, i, opts.timing))
                    .collect()
            }),
            None => (start..end).map(|i| eval_row(cfg, spec, i, opts.timing)).collect(),
        };
        for (rec, line) in rows {
            match opts.format {
                Format::Records => writeln!(sink, "{rec}")?,
                Format::Human => writeln!(sink, "{line}")?,
            }
        }
        sink.flush()?;
        written += end - start;
        if let Some(p) = &opts.checkpoint {
            fs::write(p, format!("{}\n", end - 1))?;
        }
        start = end;
    }
    Ok(ScanSummary { total, first_row, written })
}
