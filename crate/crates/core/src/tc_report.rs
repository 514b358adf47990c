//! Sequential (distributional) topological complexity of `conf(n, w)`.
//!
//! The upper bound is `r * hdim / (conn + 1)` with `hdim = n - ceil(n / w)`
//! and `conn = 0`. For `n > w` the certificate tori give the matching lower
//! bound, so both invariants equal `r (n - ceil(n / w))`. For `1 < n <= w`
//! the tori give `r (n - 1) - 1`, which matches the known value for planar
//! configuration spaces; that upper bound is cited, not derived here.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::certificates::{verify_with_complex, CertificateReport, VerifyOptions};
use crate::chains::ChainComplexF2;
use crate::error::{Error, Result};
use crate::symbols::ComplexParams;

/// `floor(r * hdim / (conn + 1))`.
pub fn bgrt_upper(hdim: usize, conn: usize, r: usize) -> usize {
    r * hdim / (conn + 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TcCase {
    #[serde(rename = "n=1")]
    SingleDisk,
    #[serde(rename = "n<=w")]
    FewDisks,
    #[serde(rename = "n>w")]
    ManyDisks,
}

impl fmt::Display for TcCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TcCase::SingleDisk => "n=1",
            TcCase::FewDisks => "n<=w",
            TcCase::ManyDisks => "n>w",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TcReport {
    pub n: usize,
    pub w: usize,
    pub r: usize,
    pub hdim: usize,
    pub conn: usize,
    pub upper_bgrt: usize,
    pub lower_tori: usize,
    pub tc: usize,
    pub dtc: usize,
    pub case: TcCase,
    pub provenance: Vec<String>,
    pub gap_note: Option<String>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct TcOptions {
    pub verify: VerifyOptions,
    /// Build the complex and check that its top nonzero Betti index equals
    /// the closed-form homotopy dimension.
    pub check_hdim: bool,
}

impl TcOptions {
    /// Symbolic certificate only, no complex.
    pub fn fast() -> Self {
        Self {
            verify: VerifyOptions::symbolic_only(),
            check_hdim: false,
        }
    }
}

/// Homotopy dimension read off a built complex: the highest degree with
/// nonzero homology.
pub fn hdim_from_complex(complex: &ChainComplexF2) -> usize {
    let betti = complex.betti();
    betti.iter().rposition(|&b| b > 0).unwrap_or(0)
}

/// Assembles bounds and values with the given options.
pub fn tc_report(n: usize, w: usize, r: usize, options: TcOptions) -> Result<(TcReport, Option<CertificateReport>)> {
    if w <= 1 {
        return Err(Error::NotApplicable(
            "strips of width 1 are outside the supported domain".into(),
        ));
    }
    if r < 2 {
        return Err(Error::InvalidBound(format!("r = {r} must be at least 2")));
    }
    let params = ComplexParams::new(n, w)?;
    let hdim = params.top_dimension();
    let mut provenance = Vec::new();

    let complex = if options.check_hdim {
        let c = ChainComplexF2::build_with_budget(params, options.verify.budget)?;
        let from_complex = hdim_from_complex(&c);
        if from_complex != hdim {
            return Err(Error::Construction(format!(
                "top homology of {params} is in degree {from_complex}, closed form gives {hdim}"
            )));
        }
        provenance.push(format!("hdim {hdim} confirmed by Betti numbers of {params}"));
        Some(c)
    } else {
        provenance.push(format!("hdim = n - ceil(n/w) = {hdim}"));
        None
    };

    let upper_bgrt = bgrt_upper(hdim, 0, r);
    provenance.push(format!("upper bound r*hdim/(conn+1) = {upper_bgrt} with conn = 0"));

    if n == 1 {
        provenance.push("conf(1,w) is contractible".into());
        let report = TcReport {
            n,
            w,
            r,
            hdim,
            conn: 0,
            upper_bgrt,
            lower_tori: 0,
            tc: 0,
            dtc: 0,
            case: TcCase::SingleDisk,
            provenance,
            gap_note: None,
        };
        return Ok((report, None));
    }

    let cert = verify_with_complex(params, options.verify, complex.as_ref())?;
    let lower_tori = cert.lower_bound(r).ok_or_else(|| {
        Error::Construction(format!("certificate for {params} failed verification"))
    })?;
    provenance.push(format!(
        "lower bound (r-1)m + l = {lower_tori} from A = {}, B = {} (m = {}, l = {})",
        cert.pair.a, cert.pair.b, cert.pair.m, cert.pair.l
    ));
    let (m, l) = (cert.pair.m, cert.pair.l);
    if m == l {
        provenance.push(format!(
            "distributional bound uses (r-1)m + l = {lower_tori}; the variant r(m-1) + l would give {}",
            r * (m - 1) + l
        ));
    }

    let (case, tc, gap_note) = if n <= w {
        let value = r * (n - 1) - 1;
        provenance.push(format!(
            "upper bound r(n-1) - 1 = {value} is the planar configuration space value (external citation)"
        ));
        let gap = format!(
            "derived upper bound {upper_bgrt} exceeds the value {value} by {}; closed by external citation",
            upper_bgrt - value
        );
        (TcCase::FewDisks, value, Some(gap))
    } else {
        provenance.push("tori lower bound meets the upper bound".into());
        (TcCase::ManyDisks, upper_bgrt, None)
    };
    provenance.push("dTC_r <= TC_r".into());

    if lower_tori > tc || tc > upper_bgrt {
        return Err(Error::Construction(format!(
            "bounds out of order: lower {lower_tori}, value {tc}, upper {upper_bgrt}"
        )));
    }
    if lower_tori != tc {
        return Err(Error::Construction(format!(
            "lower bound {lower_tori} does not meet the value {tc}"
        )));
    }

    let report = TcReport {
        n,
        w,
        r,
        hdim,
        conn: 0,
        upper_bgrt,
        lower_tori,
        tc,
        dtc: tc,
        case,
        provenance,
        gap_note,
    };
    Ok((report, Some(cert)))
}

/// `TC_r(conf(n, w))` with its bounds.
pub fn tc_value(n: usize, w: usize, r: usize) -> Result<TcReport> {
    Ok(tc_report(n, w, r, TcOptions::fast())?.0)
}

/// `dTC_r(conf(n, w))` with its bounds; equal to `TC_r` in every case.
pub fn dtc_value(n: usize, w: usize, r: usize) -> Result<TcReport> {
    tc_value(n, w, r)
}

/// Spaces with tabulated values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "space", rename_all = "snake_case")]
pub enum Space {
    /// `F_n(R^m)`, ordered configurations of `n` points in `R^m`.
    Euclidean { n: usize, dim: usize },
    /// `conf(n, w)`.
    Strip { n: usize, w: usize },
    /// `uconf(n, 2)` for odd `n >= 3`.
    UnorderedStrip { n: usize },
}

impl FromStr for Space {
    type Err = Error;

    /// Accepts `F(n,m)`, `conf(n,w)` and `uconf(n,2)`.
    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        let open = text.find('(').ok_or_else(|| Error::UnknownSpace(text.into()))?;
        let name = &text[..open];
        let args: Vec<usize> = text[open + 1..]
            .strip_suffix(')')
            .ok_or_else(|| Error::Parse(format!("unclosed space {text:?}")))?
            .split(',')
            .map(|t| t.trim().parse().map_err(|_| Error::Parse(format!("bad argument {t:?}"))))
            .collect::<Result<_>>()?;
        match (name, args.as_slice()) {
            ("F", &[n, dim]) => Ok(Space::Euclidean { n, dim }),
            ("conf", &[n, w]) => Ok(Space::Strip { n, w }),
            ("uconf", &[n, 2]) => Ok(Space::UnorderedStrip { n }),
            ("F" | "conf" | "uconf", _) => Err(Error::Parse(format!("wrong arguments in {text:?}"))),
            _ => Err(Error::UnknownSpace(name.into())),
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Space::Euclidean { n, dim } => write!(f, "F({n},{dim})"),
            Space::Strip { n, w } => write!(f, "conf({n},{w})"),
            Space::UnorderedStrip { n } => write!(f, "uconf({n},2)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReferenceValue {
    pub space: Space,
    /// `"TC_r"` or `"dTC_r"`.
    pub invariant: String,
    pub r: usize,
    pub value: usize,
    pub citation: String,
}

/// Tabulated values for `space` at `r` stops.
pub fn reference_values(space: Space, r: usize) -> Result<Vec<ReferenceValue>> {
    if r < 2 {
        return Err(Error::InvalidBound(format!("r = {r} must be at least 2")));
    }
    let entry = |invariant: &str, value: usize, citation: &str| ReferenceValue {
        space,
        invariant: invariant.into(),
        r,
        value,
        citation: citation.into(),
    };
    let mut out = Vec::new();
    match space {
        Space::Euclidean { n, dim } => {
            if n < 2 || dim < 1 {
                return Err(Error::InvalidParams(format!("{space} needs n >= 2 and m >= 1")));
            }
            let tc = if dim % 2 == 0 { r * (n - 1) - 1 } else { r * (n - 1) };
            out.push(entry("TC_r", tc, "gonzalez2015sequential"));
            if r == 2 {
                out.push(entry("TC_r", if dim % 2 == 0 { 2 * n - 3 } else { 2 * n - 2 }, "farber2009topological"));
                if dim == 2 {
                    out.push(entry("TC_r", 2 * n - 3, "farber2002topological"));
                }
            }
            if dim == 2 {
                out.push(entry("dTC_r", r * (n - 1) - 1, "conf-strip"));
            }
        }
        Space::Strip { n, w } => {
            let report = tc_value(n, w, r)?;
            out.push(entry("TC_r", report.tc, "conf-strip"));
            out.push(entry("dTC_r", report.dtc, "conf-strip"));
            if r == 2 && n > w {
                out.push(entry("TC_r", 2 * (n - n.div_ceil(w)), "strip-classical-tc"));
            }
        }
        Space::UnorderedStrip { n } => {
            if n < 3 || n % 2 == 0 {
                return Err(Error::InvalidParams(format!("{space} needs odd n >= 3")));
            }
            let half = (n - 1) / 2;
            out.push(entry("TC_r", r * half, "conf-strip"));
            out.push(entry("dTC_r", r * half, "conf-strip"));
        }
    }
    Ok(out)
}
