//! The `verify-all` grid: certificates, TC values and witnesses over the
//! standard parameter ranges.

use rayon::prelude::*;
use serde::Serialize;

use conftc::certificates::{verify_certificate, ChainPolicy, VerifyOptions};
use conftc::cohomology::evaluate_witness;
use conftc::symbols::ComplexParams;
use conftc::tc_report::tc_value;

use crate::{emit, Failure, RunConfig};

#[derive(Debug, Serialize)]
struct Row {
    check: String,
    passed: bool,
    detail: String,
}

#[derive(Debug, Serialize)]
struct Summary {
    rows: Vec<Row>,
    total: usize,
    failed: usize,
}

fn certificate_cells() -> Vec<(usize, usize)> {
    let mut cells = Vec::new();
    for n in 3..=7 {
        for w in 2..n {
            cells.push((n, w));
        }
    }
    for w in 2..=5 {
        for n in 2..=w {
            cells.push((n, w));
        }
    }
    cells
}

pub(crate) fn verify_all(config: &RunConfig) -> Result<(), Failure> {
    let mut rows = Vec::new();
    let options = VerifyOptions {
        chain: ChainPolicy::Auto,
        budget: config.budget,
    };

    // par_iter keeps parameter order in the collected rows
    let certified: Vec<Row> = certificate_cells()
        .into_par_iter()
        .map(|(n, w)| match ComplexParams::new(n, w).and_then(|p| verify_certificate(p, options)) {
            Ok(rep) => Row {
                check: format!("certify conf({n},{w})"),
                passed: rep.passed(),
                detail: format!(
                    "m={} l={} chain={}",
                    rep.pair.m,
                    rep.pair.l,
                    match rep.disjoint_chain.passed() {
                        Some(b) => b.to_string(),
                        None => "skipped".into(),
                    }
                ),
            },
            Err(e) => Row {
                check: format!("certify conf({n},{w})"),
                passed: false,
                detail: e.to_string(),
            },
        })
        .collect();
    rows.extend(certified);

    for (n, w) in certificate_cells() {
        for r in 2..=5 {
            let (passed, detail) = match tc_value(n, w, r) {
                Ok(rep) => (
                    rep.tc == rep.dtc && rep.lower_tori <= rep.tc && rep.tc <= rep.upper_bgrt,
                    format!("TC={} dTC={}", rep.tc, rep.dtc),
                ),
                Err(e) => (false, e.to_string()),
            };
            rows.push(Row {
                check: format!("tc conf({n},{w}) r={r}"),
                passed,
                detail,
            });
        }
    }

    for m in 1..=4 {
        for l in 1..=m {
            for r in 2..=4 {
                let (passed, detail) = match evaluate_witness(m, l, r) {
                    Ok(rep) => (rep.verified, format!("value={}", rep.value)),
                    Err(e) => (false, e.to_string()),
                };
                rows.push(Row {
                    check: format!("witness m={m} l={l} r={r}"),
                    passed,
                    detail,
                });
            }
        }
    }

    let failed = rows.iter().filter(|r| !r.passed).count();
    let summary = Summary {
        total: rows.len(),
        failed,
        rows,
    };
    emit(config, &summary, || {
        let width = summary.rows.iter().map(|r| r.check.len()).max().unwrap_or(0);
        let mut s = String::new();
        for row in &summary.rows {
            let mark = if row.passed { "PASS" } else { "FAIL" };
            s += &format!("{mark}  {:width$}  {}\n", row.check, row.detail);
        }
        s += &format!("{} checks, {} failed\n", summary.total, summary.failed);
        s
    });
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure::verification(format!("{failed} grid checks failed")))
    }
}
