//! Disjoint pairs of homologically decomposable tori in `conf(n, w)`.
//!
//! Three constructions cover every `n >= 2`, `w >= 2`:
//!
//! * `w = 2`, `n > 2`: products of two-disk wheels pairing high labels with
//!   low ones, plus one singleton when `n` is odd.
//! * `w > 2`, `n > w`: `ceil(n / w)` wheels led by the largest labels, with
//!   the remaining labels handed out `w - 1` at a time in decreasing order.
//!   `B` rotates the leads so every follower sits under a different lead.
//! * `n <= w`: `A = W(n, ..., 1)` and `B = W(n-1, ..., 1) W(n)`.
//!
//! A pair is checked symbolically in the wheel basis of first homology and,
//! when the complex fits the budget, against the F2 chain complex.

use serde::Serialize;

use crate::chains::{Budget, ChainComplexF2, ChainVector};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::symbols::ComplexParams;
use crate::wheels::{h1_rank, product_h1_image, spans_disjoint, H1BasisClass, H1Vector, Wheel, WheelProduct};
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    /// `w = 2`, `n > w`.
    NarrowStrip,
    /// `w > 2`, `n > w`.
    WideStrip,
    /// `2 <= n <= w`.
    FewDisks,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TorusPair {
    pub a: WheelProduct,
    pub b: WheelProduct,
    /// Dimension of `a`.
    pub m: usize,
    /// Dimension of `b`.
    pub l: usize,
    pub construction: Construction,
}

fn wheel(disks: Vec<u8>) -> Result<Wheel> {
    Wheel::new(disks).map_err(|e| Error::Construction(e.to_string()))
}

fn product(factors: Vec<Vec<u8>>, params: ComplexParams) -> Result<WheelProduct> {
    let factors = factors.into_iter().map(wheel).collect::<Result<Vec<_>>>()?;
    WheelProduct::new(factors, params).map_err(|e| Error::Construction(e.to_string()))
}

fn narrow_strip_pair(n: u8, params: ComplexParams) -> Result<(WheelProduct, WheelProduct)> {
    let half = n / 2;
    let (a, b) = if n.is_multiple_of(2) {
        let a = (0..half).map(|k| vec![n - k, half - k]).collect();
        let mut b = vec![vec![n, 1]];
        b.extend((1..half).map(|k| vec![n - k, half - k + 1]));
        (a, b)
    } else {
        let mut a: Vec<Vec<u8>> = (0..half).map(|k| vec![n - k, half - k]).collect();
        a.push(vec![half + 1]);
        let mut b: Vec<Vec<u8>> = (0..half).map(|k| vec![n - 1 - k, half - k]).collect();
        b.push(vec![n]);
        (a, b)
    };
    Ok((product(a, params)?, product(b, params)?))
}

fn wide_strip_pair(n: u8, w: u8, params: ComplexParams) -> Result<(WheelProduct, WheelProduct)> {
    let wheels = n.div_ceil(w);
    if wheels < 2 {
        return Err(Error::Construction(format!(
            "wide-strip construction needs n > w, got n = {n}, w = {w}"
        )));
    }
    let mut pool = (1..=n - wheels).rev();
    let groups: Vec<Vec<u8>> = (0..wheels)
        .map(|k| {
            if k + 1 < wheels {
                pool.by_ref().take(w as usize - 1).collect()
            } else {
                pool.by_ref().collect()
            }
        })
        .collect();
    let leads_a: Vec<u8> = (0..wheels).map(|k| n - k).collect();
    let leads_b: Vec<u8> = (1..wheels).map(|k| n - k).chain([n]).collect();
    let build = |leads: &[u8]| {
        leads
            .iter()
            .zip(&groups)
            .map(|(&lead, g)| std::iter::once(lead).chain(g.iter().copied()).collect())
            .collect::<Vec<Vec<u8>>>()
    };
    Ok((product(build(&leads_a), params)?, product(build(&leads_b), params)?))
}

/// The certificate pair for `(n, w)`.
pub fn build_tori(params: ComplexParams) -> Result<TorusPair> {
    let ComplexParams { n, w } = params;
    if n < 2 {
        return Err(Error::NotApplicable(
            "conf(1, w) is contractible and needs no certificate".into(),
        ));
    }
    if w < 2 {
        return Err(Error::NotApplicable("no certificate for strips of width 1".into()));
    }
    let nb = n as u8;
    let (a, b, construction) = if n <= w {
        let a = product(vec![(1..=nb).rev().collect()], params)?;
        let b = product(vec![(1..nb).rev().collect(), vec![nb]], params)?;
        (a, b, Construction::FewDisks)
    } else if w == 2 {
        let (a, b) = narrow_strip_pair(nb, params)?;
        (a, b, Construction::NarrowStrip)
    } else {
        let (a, b) = wide_strip_pair(nb, w as u8, params)?;
        (a, b, Construction::WideStrip)
    };

    let full = ((1u32 << (n + 1)) - 1) & !1;
    for p in [&a, &b] {
        if p.disk_mask() != full {
            return Err(Error::Construction(format!("{p} does not use every disk 1..={n}")));
        }
        if let Some(f) = p.factors().iter().find(|f| !f.is_canonical()) {
            return Err(Error::Construction(format!("{f} in {p} is not largest-first")));
        }
    }
    let (m, l) = (a.dimension(), b.dimension());
    let expected = if n <= w {
        (n - 1, n - 2)
    } else {
        let top = params.top_dimension();
        (top, top)
    };
    if (m, l) != expected {
        return Err(Error::Construction(format!(
            "dimensions ({m}, {l}) differ from the expected {expected:?} for {params}"
        )));
    }
    Ok(TorusPair {
        a,
        b,
        m,
        l,
        construction,
    })
}

/// `(r - 1) m + l`, the number of zero-divisors the pair yields.
pub fn lower_bound(m: usize, l: usize, r: usize) -> Result<usize> {
    if m < l {
        return Err(Error::InvalidBound(format!("m = {m} is smaller than l = {l}")));
    }
    if r < 2 {
        return Err(Error::InvalidBound(format!("r = {r} must be at least 2")));
    }
    Ok((r - 1) * m + l)
}

/// When to run the chain-level check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainPolicy {
    /// Run when [`chain_check_by_default`] says so and the budget allows.
    Auto,
    Always,
    Never,
}

/// Default chain coverage: `w = 2` up to `n = 8`, every width up to `n = 7`.
pub fn chain_check_by_default(params: ComplexParams) -> bool {
    (params.w == 2 && params.n <= 8) || params.n <= 7
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub chain: ChainPolicy,
    pub budget: Budget,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            chain: ChainPolicy::Auto,
            budget: Budget::default(),
        }
    }
}

impl VerifyOptions {
    pub fn symbolic_only() -> Self {
        Self {
            chain: ChainPolicy::Never,
            ..Self::default()
        }
    }
}

/// Outcome of the chain-level check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum ChainCheck {
    Ran(bool),
    Skipped { skipped: String },
}

impl ChainCheck {
    pub fn passed(&self) -> Option<bool> {
        match self {
            ChainCheck::Ran(b) => Some(*b),
            ChainCheck::Skipped { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateReport {
    pub n: usize,
    pub w: usize,
    pub pair: TorusPair,
    pub decomposable_a: bool,
    pub decomposable_b: bool,
    pub disjoint_symbolic: bool,
    pub disjoint_chain: ChainCheck,
    /// The two images use no common basis class.
    pub support_disjoint: bool,
    /// `w > 2`, `n > w` only: projecting onto the (lead, follower) classes of
    /// `A` is onto for `A` and zero for `B`.
    pub projection_check: Option<bool>,
    pub basis_form_a: bool,
    pub basis_form_b: bool,
    /// Chain verdict, when computed, agrees with the symbolic one.
    pub consistent: bool,
    #[serde(skip)]
    pub image_a: Vec<H1Vector<Rational>>,
    #[serde(skip)]
    pub image_b: Vec<H1Vector<Rational>>,
}

impl CertificateReport {
    /// Symbolic checks all hold and the chain check, if run, agrees.
    pub fn passed(&self) -> bool {
        self.decomposable_a
            && self.decomposable_b
            && self.disjoint_symbolic
            && self.consistent
            && self.projection_check.unwrap_or(true)
    }

    /// `(r - 1) m + l`, reported only for a passing certificate.
    pub fn lower_bound(&self, r: usize) -> Option<usize> {
        if self.passed() {
            lower_bound(self.pair.m, self.pair.l, r).ok()
        } else {
            None
        }
    }
}

/// Coordinates `(lead, follower)` of each wheel of `a`.
fn lead_follower_classes(a: &WheelProduct) -> Vec<H1BasisClass> {
    a.factors()
        .iter()
        .flat_map(|f| {
            let lead = f.disks()[0];
            f.disks()[1..].iter().map(move |&d| H1BasisClass::new(lead, d))
        })
        .collect()
}

fn projection_check<S: Scalar>(
    pair: &TorusPair,
    image_a: &[H1Vector<S>],
    image_b: &[H1Vector<S>],
) -> Result<bool> {
    let coords = lead_follower_classes(&pair.a);
    let keep = |c: &H1BasisClass| coords.contains(c);
    let proj_a: Vec<_> = image_a.iter().map(|v| v.project(keep)).collect();
    let onto = coords.len() == pair.m && h1_rank(&proj_a)? == pair.m;
    let b_zero = image_b.iter().all(|v| v.project(keep).is_zero());
    Ok(onto && b_zero)
}

/// Mod-2 chain of an image vector: sum of its classes' cycles. Coefficients
/// must be integers; even ones drop out.
pub fn image_cycle<S: Scalar>(v: &H1Vector<S>, complex: &ChainComplexF2) -> Result<ChainVector> {
    let mut support = Vec::new();
    for (class, coeff) in v.terms() {
        let c = coeff.to_i64().ok_or_else(|| {
            Error::Construction(format!("non-integral coefficient on {class}"))
        })?;
        if c % 2 != 0 {
            support.extend(crate::wheels::class_to_cycle(class, complex)?.support);
        }
    }
    Ok(ChainVector::new(1, support))
}

/// Whether the images of both tori are jointly independent in `H_1(cell(n, w); F2)`.
pub fn chain_disjoint(pair: &TorusPair, complex: &ChainComplexF2) -> Result<bool> {
    let cycles = product_h1_image::<Rational>(&pair.a)
        .iter()
        .chain(&product_h1_image::<Rational>(&pair.b))
        .map(|v| image_cycle(v, complex))
        .collect::<Result<Vec<_>>>()?;
    complex.classes_independent(&cycles)
}

pub fn verify_certificate(params: ComplexParams, options: VerifyOptions) -> Result<CertificateReport> {
    verify_with_complex(params, options, None)
}

/// Like [`verify_certificate`], reusing an already built complex for the chain check.
pub fn verify_with_complex(
    params: ComplexParams,
    options: VerifyOptions,
    complex: Option<&ChainComplexF2>,
) -> Result<CertificateReport> {
    let pair = build_tori(params)?;
    let image_a = product_h1_image::<Rational>(&pair.a);
    let image_b = product_h1_image::<Rational>(&pair.b);
    let decomposable_a = image_a.len() == pair.m && h1_rank(&image_a)? == pair.m;
    let decomposable_b = image_b.len() == pair.l && h1_rank(&image_b)? == pair.l;
    let disjoint_symbolic = spans_disjoint(&image_a, &image_b)?;
    let support_disjoint = image_a
        .iter()
        .flat_map(|v| v.support())
        .all(|c| image_b.iter().all(|v| v.coeff(c).is_negligible()));
    let projection = if pair.construction == Construction::WideStrip {
        Some(projection_check(&pair, &image_a, &image_b)?)
    } else {
        None
    };

    let run_chain = match options.chain {
        ChainPolicy::Never => None,
        ChainPolicy::Always => Some(true),
        ChainPolicy::Auto => Some(chain_check_by_default(params)),
    };
    let disjoint_chain = match (run_chain, complex) {
        (None, _) => ChainCheck::Skipped {
            skipped: "chain check disabled".into(),
        },
        (Some(false), _) => ChainCheck::Skipped {
            skipped: format!("{params} is outside the default chain-check range"),
        },
        (Some(true), Some(c)) => ChainCheck::Ran(chain_disjoint(&pair, c)?),
        (Some(true), None) => match ChainComplexF2::build_with_budget(params, options.budget) {
            Ok(c) => ChainCheck::Ran(chain_disjoint(&pair, &c)?),
            Err(e @ Error::ResourceLimit { .. }) => {
                if options.chain == ChainPolicy::Always {
                    return Err(e);
                }
                ChainCheck::Skipped {
                    skipped: e.to_string(),
                }
            }
            Err(e) => return Err(e),
        },
    };
    let symbolic = decomposable_a && decomposable_b && disjoint_symbolic;
    let consistent = match disjoint_chain.passed() {
        Some(chain) => chain == symbolic,
        None => true,
    };

    Ok(CertificateReport {
        n: params.n,
        w: params.w,
        basis_form_a: pair.a.is_basis_form(),
        basis_form_b: pair.b.is_basis_form(),
        pair,
        decomposable_a,
        decomposable_b,
        disjoint_symbolic,
        disjoint_chain,
        support_disjoint,
        projection_check: projection,
        consistent,
        image_a,
        image_b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: usize, w: usize) -> ComplexParams {
        ComplexParams::new(n, w).unwrap()
    }

    fn pair(n: usize, w: usize) -> (String, String) {
        let p = build_tori(params(n, w)).unwrap();
        (p.a.to_string(), p.b.to_string())
    }

    #[test]
    fn constructions() {
        assert_eq!(pair(3, 2), ("W(3,1)W(2)".into(), "W(2,1)W(3)".into()));
        assert_eq!(
            pair(7, 3),
            ("W(7,4,3)W(6,2,1)W(5)".into(), "W(6,4,3)W(5,2,1)W(7)".into())
        );
        assert_eq!(pair(4, 2), ("W(4,2)W(3,1)".into(), "W(4,1)W(3,2)".into()));
        assert_eq!(pair(5, 2), ("W(5,2)W(4,1)W(3)".into(), "W(4,2)W(3,1)W(5)".into()));
        assert_eq!(
            pair(6, 2),
            ("W(6,3)W(5,2)W(4,1)".into(), "W(6,1)W(5,3)W(4,2)".into())
        );
        assert_eq!(pair(4, 4), ("W(4,3,2,1)".into(), "W(3,2,1)W(4)".into()));
        assert_eq!(pair(5, 4), ("W(5,3,2,1)W(4)".into(), "W(4,3,2,1)W(5)".into()));
        assert_eq!(pair(2, 2), ("W(2,1)".into(), "W(1)W(2)".into()));
    }

    #[test]
    fn not_applicable() {
        assert!(matches!(build_tori(params(1, 2)), Err(Error::NotApplicable(_))));
        assert!(matches!(build_tori(params(3, 1)), Err(Error::NotApplicable(_))));
    }

    #[test]
    fn dimensions() {
        let p = build_tori(params(4, 4)).unwrap();
        assert_eq!((p.m, p.l), (3, 2));
        let p = build_tori(params(7, 3)).unwrap();
        assert_eq!((p.m, p.l), (4, 4));
    }

    #[test]
    fn bounds() {
        assert_eq!(lower_bound(4, 4, 3).unwrap(), 12);
        assert_eq!(lower_bound(2, 1, 2).unwrap(), 3);
        assert_eq!(lower_bound(3, 2, 5).unwrap(), 14);
        assert_eq!(lower_bound(1, 0, 3).unwrap(), 2);
        assert!(lower_bound(1, 2, 3).is_err());
        assert!(lower_bound(2, 2, 1).is_err());
    }

    #[test]
    fn small_certificates_pass() {
        let r = verify_certificate(params(3, 2), VerifyOptions::default()).unwrap();
        assert!(r.passed());
        assert_eq!(r.disjoint_chain, ChainCheck::Ran(true));
        assert_eq!(r.lower_bound(4), Some(4));

        let r = verify_certificate(params(7, 3), VerifyOptions::default()).unwrap();
        assert!(r.passed());
        assert_eq!(r.projection_check, Some(true));
        assert_eq!(r.lower_bound(2), Some(8));

        let r = verify_certificate(params(4, 4), VerifyOptions::default()).unwrap();
        assert!(r.passed());
        assert_eq!(r.lower_bound(3), Some(8));
    }

    #[test]
    fn chain_check_can_be_skipped_or_forced() {
        let p = params(6, 2);
        let r = verify_certificate(p, VerifyOptions::symbolic_only()).unwrap();
        assert!(matches!(r.disjoint_chain, ChainCheck::Skipped { .. }));
        let tiny = VerifyOptions {
            chain: ChainPolicy::Auto,
            budget: Budget { memory_bytes: 10 },
        };
        let r = verify_certificate(p, tiny).unwrap();
        assert!(matches!(r.disjoint_chain, ChainCheck::Skipped { .. }));
        assert!(r.passed());
        let forced = VerifyOptions {
            chain: ChainPolicy::Always,
            ..tiny
        };
        assert!(matches!(verify_certificate(p, forced), Err(Error::ResourceLimit { .. })));
    }

    #[test]
    fn chain_detects_a_bad_pair() {
        let p = params(3, 2);
        let complex = ChainComplexF2::build(p).unwrap();
        let a = WheelProduct::parse("W(3,1)W(2)", p).unwrap();
        let bad = TorusPair {
            a: a.clone(),
            b: a,
            m: 1,
            l: 1,
            construction: Construction::NarrowStrip,
        };
        assert!(!chain_disjoint(&bad, &complex).unwrap());
    }
}
