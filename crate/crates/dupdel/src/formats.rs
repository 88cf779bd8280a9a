//! File formats: snapshot CSV/JSON, theory tables, comparison reports, and
//! the checkpoint-list syntax used on the command line.
//!
//! All writers go through [`atomic_write`] (temp file + rename) so a failed
//! run never leaves a truncated output behind.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analysis::ComparisonReport;
use crate::process::Snapshot;
use crate::theory::{regime_params, DegreeDistribution};
use crate::{Error, Result};

/// Write `contents` to `path` via a sibling temp file and an atomic rename.
pub fn atomic_write(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::invalid("out", "output path has no file name"))?;
    let tmp = dir.join(format!(".{}.tmp", file_name.to_string_lossy()));
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Snapshots

/// CSV with header `m,k,count,n_vertices`, one row per (checkpoint, size).
pub fn snapshots_to_csv(snapshots: &[Snapshot]) -> String {
    let mut out = String::from("m,k,count,n_vertices\n");
    for s in snapshots {
        for &(k, c) in &s.counts {
            let _ = writeln!(out, "{},{},{},{}", s.m, k, c, s.n_vertices);
        }
    }
    out
}

/// Parse the snapshot CSV format. Rows for one checkpoint must be
/// contiguous with sizes strictly ascending; every parsed snapshot is
/// consistency-checked.
pub fn snapshots_from_csv(text: &str) -> Result<Vec<Snapshot>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == "m,k,count,n_vertices" => {}
        Some((_, header)) => {
            return Err(Error::parse(
                1,
                format!("expected header `m,k,count,n_vertices`, got `{header}`"),
            ))
        }
        None => return Err(Error::parse(1, "empty snapshot file")),
    }
    let mut snapshots: Vec<Snapshot> = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let mut next = |name: &str| -> Result<u64> {
            let raw = fields
                .next()
                .ok_or_else(|| Error::parse(line_no, format!("missing field `{name}`")))?;
            raw.trim()
                .parse::<u64>()
                .map_err(|e| Error::parse(line_no, format!("bad `{name}` value `{raw}`: {e}")))
        };
        let m = next("m")?;
        let k = next("k")?;
        let count = next("count")?;
        let n_vertices = next("n_vertices")?;
        if fields.next().is_some() {
            return Err(Error::parse(line_no, "too many fields"));
        }
        if k == 0 || k > u32::MAX as u64 {
            return Err(Error::parse(
                line_no,
                format!("clique size {k} out of range"),
            ));
        }
        if count == 0 {
            return Err(Error::parse(line_no, "zero count row"));
        }
        match snapshots.last_mut() {
            Some(s) if s.m == m => {
                if s.n_vertices != n_vertices {
                    return Err(Error::parse(
                        line_no,
                        format!("n_vertices changed within checkpoint m={m}"),
                    ));
                }
                if s.counts.last().map(|&(prev, _)| prev as u64) >= Some(k) {
                    return Err(Error::parse(
                        line_no,
                        format!("sizes not ascending at m={m}"),
                    ));
                }
                s.counts.push((k as u32, count));
            }
            _ => snapshots.push(Snapshot {
                m,
                n_vertices,
                counts: vec![(k as u32, count)],
            }),
        }
    }
    for s in &snapshots {
        s.check_consistency()?;
    }
    Ok(snapshots)
}

pub fn snapshots_to_json(snapshots: &[Snapshot]) -> Result<String> {
    Ok(serde_json::to_string_pretty(snapshots)?)
}

/// Parse the JSON snapshot form, enforcing ascending sizes, positive
/// counts and vertex-count consistency.
pub fn snapshots_from_json(text: &str) -> Result<Vec<Snapshot>> {
    let snapshots: Vec<Snapshot> = serde_json::from_str(text)?;
    for s in &snapshots {
        for w in s.counts.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::parse(
                    0,
                    format!("sizes not ascending in snapshot m={}", s.m),
                ));
            }
        }
        if s.counts.iter().any(|&(k, c)| k == 0 || c == 0) {
            return Err(Error::parse(
                0,
                format!("zero size or count in snapshot m={}", s.m),
            ));
        }
        s.check_consistency()?;
    }
    Ok(snapshots)
}

// ---------------------------------------------------------------------------
// Theory tables

/// One row of the exported theory table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryRow {
    pub k: usize,
    pub d_k: f64,
    pub c_k: f64,
    pub asymptotic_k: f64,
}

/// JSON form of the theory table; the CSV form carries the same metadata in
/// a `#` header comment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryTable {
    pub p: f64,
    pub regime: String,
    pub beta: Option<f64>,
    pub gamma: f64,
    pub method: String,
    pub truncation: usize,
    pub tol: f64,
    pub tail_mass: f64,
    pub rows: Vec<TheoryRow>,
}

pub fn theory_table(d: &DegreeDistribution) -> Result<TheoryTable> {
    let rp = regime_params(d.p)?;
    let rows = (1..=d.truncation())
        .map(|k| {
            Ok(TheoryRow {
                k,
                d_k: d.entry(k),
                c_k: d.entry(k) / k as f64,
                asymptotic_k: crate::theory::asymptotic_value(d.p, k)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TheoryTable {
        p: d.p,
        regime: rp.regime.to_string(),
        beta: if rp.beta.is_nan() {
            None
        } else {
            Some(rp.beta)
        },
        gamma: rp.gamma,
        method: d.method.to_string(),
        truncation: d.truncation(),
        tol: d.tol,
        tail_mass: d.tail_mass,
        rows,
    })
}

pub fn theory_table_to_csv(table: &TheoryTable) -> String {
    let beta = table
        .beta
        .map(|b| format!("{b}"))
        .unwrap_or_else(|| "undefined".into());
    let mut out = format!(
        "# p={} regime={} beta={} gamma={} method={} K={} tol={} tail_mass={}\n",
        table.p,
        table.regime,
        beta,
        table.gamma,
        table.method,
        table.truncation,
        table.tol,
        table.tail_mass
    );
    out.push_str("k,d_k,c_k,asymptotic_k\n");
    for r in &table.rows {
        let _ = writeln!(out, "{},{:e},{:e},{:e}", r.k, r.d_k, r.c_k, r.asymptotic_k);
    }
    out
}

pub fn theory_table_to_json(table: &TheoryTable) -> Result<String> {
    Ok(serde_json::to_string_pretty(table)?)
}

// ---------------------------------------------------------------------------
// Comparison reports

pub fn reports_to_json(reports: &[(u64, ComparisonReport)]) -> Result<String> {
    #[derive(Serialize)]
    struct Entry<'a> {
        m: u64,
        #[serde(flatten)]
        report: &'a ComparisonReport,
    }
    let entries: Vec<Entry> = reports
        .iter()
        .map(|(m, r)| Entry { m: *m, report: r })
        .collect();
    Ok(serde_json::to_string_pretty(&entries)?)
}

/// Flat CSV for plotting: one row per checkpoint, per-k errors elided.
pub fn reports_to_csv(reports: &[(u64, ComparisonReport)]) -> String {
    let mut out = String::from("m,tv_distance,fitted_exponent,fitted_rate,growth_ratio\n");
    for (m, r) in reports {
        let opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{:e},{},{},{:e}",
            m,
            r.tv_distance,
            opt(r.fitted_exponent),
            opt(r.fitted_rate),
            r.growth_ratio
        );
    }
    out
}

// ---------------------------------------------------------------------------
// Checkpoint lists

/// Parse a comma-separated checkpoint list. Entries are positive integers,
/// plain (`1000`) or in scientific notation (`1e6`, `2.5e3`) — the latter
/// parsed exactly in integer arithmetic, never through floating point. The
/// list must be strictly increasing.
pub fn parse_checkpoint_list(text: &str) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for (i, raw) in text.split(',').enumerate() {
        let item = raw.trim();
        if item.is_empty() {
            return Err(Error::parse(i + 1, "empty checkpoint entry"));
        }
        let value = parse_exact_integer(item).ok_or_else(|| {
            Error::parse(i + 1, format!("`{item}` is not an exact positive integer"))
        })?;
        if value == 0 {
            return Err(Error::parse(i + 1, "checkpoint must be >= 1"));
        }
        if let Some(&prev) = out.last() {
            if value <= prev {
                return Err(Error::parse(
                    i + 1,
                    format!("checkpoints must be strictly increasing ({value} after {prev})"),
                ));
            }
        }
        out.push(value);
    }
    Ok(out)
}

/// `mantissa[.frac][e exponent]` with a non-negative integral value, or
/// `None` on overflow / non-integer results.
fn parse_exact_integer(s: &str) -> Option<u64> {
    let (mantissa, exponent) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit())
        || !frac_part.bytes().all(|b| b.is_ascii_digit())
    {
        return None;
    }
    // Shift the decimal point by the exponent: digits = int_part ++ frac_part
    // with implied exponent  exponent - frac_part.len().
    let shift = exponent.checked_sub(frac_part.len() as i32)?;
    let mut value: u64 = 0;
    for b in int_part.bytes().chain(frac_part.bytes()) {
        value = value.checked_mul(10)?.checked_add((b - b'0') as u64)?;
    }
    if shift >= 0 {
        for _ in 0..shift {
            value = value.checked_mul(10)?;
        }
        Some(value)
    } else {
        // negative shift must cancel against trailing zeros exactly
        for _ in 0..(-shift) {
            if value % 10 != 0 {
                return None;
            }
            value /= 10;
        }
        Some(value)
    }
}
