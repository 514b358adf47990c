//! The zero-divisor product behind the tori lower bound.
//!
//! Given an `m`-torus `f` and an `l`-torus `g` that are decomposable and
//! homologically disjoint, pick classes `y_1..y_m` dual to `f` and
//! `z_1..z_l` dual to `g`. With `zeta(a) = a (x) 1 - 1 (x) a` pulled back to
//! factors `i < j` of `X^r`, the product
//!
//! ```text
//! zeta^{12}_g  zeta^{12}_f  prod_{k=3..r} zeta^{(k-1)k}_f
//! ```
//!
//! has `(r - 1) m + l` degree-one factors. Pulled back along
//! `g x f x ... x f` (the `g`-torus in tensor factor 1) it lands in the top
//! exterior power of `H^1` of a torus of that dimension, and its coefficient
//! on the fundamental class is `+-1`.
//!
//! Exterior monomials are bitmasks over a global generator order (tensor
//! factors in a chosen order, slots within a factor); the sign of a product
//! counts the transpositions needed to merge two monomials.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Most generators a monomial can hold.
pub const MAX_GENERATORS: usize = 128;

/// Element of an exterior algebra on at most 128 generators.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtElement<S> {
    terms: BTreeMap<u128, S>,
}

/// Sign of `a * b` for monomials with disjoint support: each generator of `b`
/// moves left past every larger generator of `a`.
fn merge_sign(a: u128, b: u128) -> bool {
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        swaps += (a >> j >> 1).count_ones();
        rest &= rest - 1;
    }
    swaps % 2 == 1
}

impl<S: Scalar> ExtElement<S> {
    pub fn zero() -> Self {
        Self {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::monomial(0, S::one())
    }

    pub fn generator(index: usize) -> Self {
        assert!(index < MAX_GENERATORS, "generator index {index} out of range");
        Self::monomial(1 << index, S::one())
    }

    pub fn monomial(mask: u128, coeff: S) -> Self {
        let mut e = Self::zero();
        e.add_term(mask, coeff);
        e
    }

    fn add_term(&mut self, mask: u128, coeff: S) {
        let entry = self.terms.entry(mask).or_insert_with(S::zero);
        *entry = entry.clone() + coeff;
        if entry.is_negligible() {
            self.terms.remove(&mask);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u128, &S)> {
        self.terms.iter().map(|(&m, c)| (m, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, mask: u128) -> S {
        self.terms.get(&mask).cloned().unwrap_or_else(S::zero)
    }

    /// Degree if every term has the same degree.
    pub fn degree(&self) -> Option<usize> {
        let mut degrees = self.terms.keys().map(|m| m.count_ones() as usize);
        let first = degrees.next()?;
        degrees.all(|d| d == first).then_some(first)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&m, c) in &other.terms {
            out.add_term(m, c.clone());
        }
        out
    }

    pub fn scale(&self, k: &S) -> Self {
        let mut out = Self::zero();
        for (&m, c) in &self.terms {
            out.add_term(m, c.clone() * k.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (&a, ca) in &self.terms {
            for (&b, cb) in &other.terms {
                if a & b != 0 {
                    continue;
                }
                let c = ca.clone() * cb.clone();
                out.add_term(a | b, if merge_sign(a, b) { -c } else { c });
            }
        }
        out
    }

    /// Drops every term that involves a generator outside `allowed`.
    pub fn restrict(&self, allowed: u128) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(&m, _)| m & !allowed == 0)
                .map(|(&m, c)| (m, c.clone()))
                .collect(),
        }
    }
}

/// Product of many elements, left to right.
pub fn product<S: Scalar>(factors: &[ExtElement<S>]) -> ExtElement<S> {
    factors.iter().fold(ExtElement::one(), |acc, f| acc.mul(f))
}

/// Ambient degree-one classes: `y_p` pulls back to the `m`-torus, `z_q` to the `l`-torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AmbientClass {
    Y(usize),
    Z(usize),
}

impl fmt::Display for AmbientClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AmbientClass::Y(p) => write!(f, "y{p}"),
            AmbientClass::Z(q) => write!(f, "z{q}"),
        }
    }
}

/// A torus generator `x_slot` in tensor factor `factor` (both 1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct ExtGenerator {
    pub factor: usize,
    pub slot: usize,
}

/// Tensor layout of `T^l x (T^m)^(r-1)`: which factor carries the `l`-torus
/// and in what order factors are laid out for signs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorLayout {
    pub m: usize,
    pub l: usize,
    pub r: usize,
    /// 1-based factor holding the `l`-torus.
    pub g_factor: usize,
    /// Factor order used for the global generator order (1-based factors).
    pub order: Vec<usize>,
}

impl TensorLayout {
    pub fn new(m: usize, l: usize, r: usize) -> Result<Self> {
        if r < 2 {
            return Err(Error::InvalidBound(format!("r = {r} must be at least 2")));
        }
        if m < l || m == 0 {
            return Err(Error::InvalidBound(format!("need m >= l and m >= 1, got m = {m}, l = {l}")));
        }
        let layout = Self {
            m,
            l,
            r,
            g_factor: 1,
            order: (1..=r).collect(),
        };
        if layout.top_degree() > MAX_GENERATORS {
            return Err(Error::InvalidBound(format!(
                "top degree {} exceeds {MAX_GENERATORS} generators",
                layout.top_degree()
            )));
        }
        Ok(layout)
    }

    /// Same tori, factors laid out in `order` (a permutation of `1..=r`).
    pub fn with_order(mut self, order: Vec<usize>) -> Result<Self> {
        let mut sorted = order.clone();
        sorted.sort_unstable();
        if sorted != (1..=self.r).collect::<Vec<_>>() {
            return Err(Error::InvalidParams(format!(
                "{order:?} is not a permutation of 1..={}",
                self.r
            )));
        }
        self.order = order;
        Ok(self)
    }

    pub fn slots(&self, factor: usize) -> usize {
        if factor == self.g_factor {
            self.l
        } else {
            self.m
        }
    }

    pub fn top_degree(&self) -> usize {
        (self.r - 1) * self.m + self.l
    }

    /// Position of a generator in the global order.
    pub fn index(&self, g: ExtGenerator) -> usize {
        let mut offset = 0;
        for &f in &self.order {
            if f == g.factor {
                return offset + g.slot - 1;
            }
            offset += self.slots(f);
        }
        unreachable!("factor {} not in layout", g.factor)
    }

    pub fn top_mask(&self) -> u128 {
        let d = self.top_degree();
        if d == 128 {
            u128::MAX
        } else {
            (1u128 << d) - 1
        }
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        if !(1 <= i && i < j && j <= self.r) {
            return Err(Error::InvalidFactor { i, j, r: self.r });
        }
        Ok(())
    }

    /// Pullback of `a` placed in tensor factor `k`: `y_p` survives on the
    /// `m`-torus factors, `z_q` on the `l`-torus factor, all else is zero.
    pub fn pull<S: Scalar>(&self, a: AmbientClass, k: usize) -> ExtElement<S> {
        match a {
            AmbientClass::Y(p) if k != self.g_factor && (1..=self.m).contains(&p) => {
                ExtElement::generator(self.index(ExtGenerator { factor: k, slot: p }))
            }
            AmbientClass::Z(q) if k == self.g_factor && (1..=self.l).contains(&q) => {
                ExtElement::generator(self.index(ExtGenerator { factor: k, slot: q }))
            }
            _ => ExtElement::zero(),
        }
    }
}

/// `zeta^{ij}(a)` pulled back to the torus: `a` in factor `i` minus `a` in factor `j`.
pub fn zeta_pullback<S: Scalar>(
    a: AmbientClass,
    i: usize,
    j: usize,
    layout: &TensorLayout,
) -> Result<ExtElement<S>> {
    layout.check_pair(i, j)?;
    Ok(layout.pull::<S>(a, i).add(&layout.pull::<S>(a, j).scale(&-S::one())))
}

/// The zeta factors in product order: `(class, i, j)`.
pub fn witness_factors(layout: &TensorLayout) -> Vec<(AmbientClass, usize, usize)> {
    let mut out: Vec<_> = (1..=layout.l).map(|q| (AmbientClass::Z(q), 1, 2)).collect();
    out.extend((1..=layout.m).map(|p| (AmbientClass::Y(p), 1, 2)));
    for k in 3..=layout.r {
        out.extend((1..=layout.m).map(|p| (AmbientClass::Y(p), k - 1, k)));
    }
    out
}

/// Coefficient of the fundamental class in the pulled-back product.
pub fn witness_value<S: Scalar>(layout: &TensorLayout) -> Result<S> {
    let factors = witness_factors(layout);
    if factors.len() != layout.top_degree() {
        return Err(Error::DegreeMismatch {
            expected: layout.top_degree(),
            found: factors.len(),
        });
    }
    let pulled = factors
        .iter()
        .map(|&(a, i, j)| zeta_pullback::<S>(a, i, j, layout))
        .collect::<Result<Vec<_>>>()?;
    let prod = product(&pulled);
    match prod.degree() {
        Some(d) if d != layout.top_degree() => Err(Error::DegreeMismatch {
            expected: layout.top_degree(),
            found: d,
        }),
        _ => Ok(prod.coeff(layout.top_mask())),
    }
}

/// One term of the ambient expansion that survives the pullback.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurvivingTerm {
    /// Integer coefficient of the ambient monomial.
    pub coefficient: i64,
    /// Per tensor factor, the ambient classes in the monomial, e.g. `["z1 z2", "y1 y2"]`.
    pub factors: Vec<String>,
}

/// Ambient generator order: factor-major, `y_1..y_m` then `z_1..z_l` inside a factor.
fn ambient_index(layout: &TensorLayout, a: AmbientClass, k: usize) -> usize {
    let per = layout.m + layout.l;
    let pos = layout.order.iter().position(|&f| f == k).unwrap();
    pos * per
        + match a {
            AmbientClass::Y(p) => p - 1,
            AmbientClass::Z(q) => layout.m + q - 1,
        }
}

/// Expands the product of zeta factors before pulling back, and keeps the
/// top-degree monomials whose classes all survive the pullback: no `z` on an
/// `m`-torus factor and no `y` on the `l`-torus factor.
pub fn surviving_terms(layout: &TensorLayout) -> Result<Vec<SurvivingTerm>> {
    let per = layout.m + layout.l;
    if layout.r * per > MAX_GENERATORS {
        return Err(Error::InvalidBound(format!(
            "ambient expansion needs {} generators",
            layout.r * per
        )));
    }
    let zetas: Vec<ExtElement<i64>> = witness_factors(layout)
        .into_iter()
        .map(|(a, i, j)| {
            ExtElement::generator(ambient_index(layout, a, i))
                .add(&ExtElement::monomial(1 << ambient_index(layout, a, j), -1))
        })
        .collect();
    let expanded = product(&zetas);

    let mut allowed = 0u128;
    for k in 1..=layout.r {
        if k == layout.g_factor {
            for q in 1..=layout.l {
                allowed |= 1 << ambient_index(layout, AmbientClass::Z(q), k);
            }
        } else {
            for p in 1..=layout.m {
                allowed |= 1 << ambient_index(layout, AmbientClass::Y(p), k);
            }
        }
    }
    Ok(expanded
        .restrict(allowed)
        .terms()
        .map(|(mask, &c)| SurvivingTerm {
            coefficient: c,
            factors: layout
                .order
                .iter()
                .map(|&k| {
                    let mut names = Vec::new();
                    for p in 1..=layout.m {
                        if mask & (1 << ambient_index(layout, AmbientClass::Y(p), k)) != 0 {
                            names.push(AmbientClass::Y(p).to_string());
                        }
                    }
                    for q in 1..=layout.l {
                        if mask & (1 << ambient_index(layout, AmbientClass::Z(q), k)) != 0 {
                            names.push(AmbientClass::Z(q).to_string());
                        }
                    }
                    if names.is_empty() {
                        "1".to_string()
                    } else {
                        names.join(" ")
                    }
                })
                .collect(),
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessReport {
    pub m: usize,
    pub l: usize,
    pub r: usize,
    /// Coefficient on the fundamental class.
    pub value: i64,
    /// Number of degree-one zero-divisor factors, `(r - 1) m + l`.
    pub factors: usize,
    pub surviving_terms: usize,
    pub terms: Vec<SurvivingTerm>,
    /// `|value| = 1`, a single surviving term, and both routes agree.
    pub verified: bool,
}

/// Evaluates the witness for an `m`-torus and `l`-torus over `r` stops.
pub fn evaluate_witness(m: usize, l: usize, r: usize) -> Result<WitnessReport> {
    let layout = TensorLayout::new(m, l, r)?;
    let value: crate::Rational = witness_value(&layout)?;
    let value = value.to_i64().ok_or_else(|| {
        Error::Construction(format!("witness value {value} is not an integer"))
    })?;
    let terms = surviving_terms(&layout)?;
    let verified = value.abs() == 1 && terms.len() == 1 && terms[0].coefficient == value;
    Ok(WitnessReport {
        m,
        l,
        r,
        value,
        factors: witness_factors(&layout).len(),
        surviving_terms: terms.len(),
        terms,
        verified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;
    use num_rational::Rational64;
    use proptest::prelude::*;

    fn q(v: i64) -> Rational {
        Rational::from_i64(v)
    }

    #[test]
    fn generators_anticommute() {
        let a = ExtElement::<Rational>::generator(0);
        let b = ExtElement::<Rational>::generator(3);
        assert_eq!(a.mul(&b), b.mul(&a).scale(&q(-1)));
        assert!(a.mul(&a).is_zero());
    }

    #[test]
    fn pullback_examples() {
        let layout = TensorLayout::new(1, 1, 2).unwrap();
        let y = zeta_pullback::<Rational>(AmbientClass::Y(1), 1, 2, &layout).unwrap();
        let x21 = layout.index(ExtGenerator { factor: 2, slot: 1 });
        assert_eq!(y, ExtElement::monomial(1 << x21, q(-1)));
        let z = zeta_pullback::<Rational>(AmbientClass::Z(1), 1, 2, &layout).unwrap();
        let x11 = layout.index(ExtGenerator { factor: 1, slot: 1 });
        assert_eq!(z, ExtElement::monomial(1 << x11, q(1)));

        let layout = TensorLayout::new(1, 1, 3).unwrap();
        let y = zeta_pullback::<Rational>(AmbientClass::Y(1), 2, 3, &layout).unwrap();
        let x2 = layout.index(ExtGenerator { factor: 2, slot: 1 });
        let x3 = layout.index(ExtGenerator { factor: 3, slot: 1 });
        assert_eq!(y, ExtElement::monomial(1 << x2, q(1)).add(&ExtElement::monomial(1 << x3, q(-1))));

        assert!(matches!(
            zeta_pullback::<Rational>(AmbientClass::Y(1), 2, 2, &layout),
            Err(Error::InvalidFactor { .. })
        ));
        assert!(matches!(
            zeta_pullback::<Rational>(AmbientClass::Y(1), 1, 4, &layout),
            Err(Error::InvalidFactor { .. })
        ));
    }

    #[test]
    fn witness_examples() {
        // (z (x) 1 - 1 (x) z)(y (x) 1 - 1 (x) y) keeps only -z (x) y
        let w = evaluate_witness(1, 1, 2).unwrap();
        assert_eq!(w.value, -1);
        assert_eq!(w.factors, 2);
        assert_eq!(w.terms[0].factors, vec!["z1", "y1"]);
        assert!(w.verified);
        for (m, l, r) in [(2, 1, 2), (2, 2, 3), (3, 3, 2)] {
            let w = evaluate_witness(m, l, r).unwrap();
            assert!(w.verified, "{w:?}");
            assert_eq!(w.surviving_terms, 1);
        }
    }

    #[test]
    fn invalid_layouts() {
        assert!(evaluate_witness(1, 2, 2).is_err());
        assert!(evaluate_witness(2, 1, 1).is_err());
        assert!(TensorLayout::new(2, 1, 3).unwrap().with_order(vec![1, 1, 2]).is_err());
    }

    #[test]
    fn placing_the_l_torus_elsewhere_kills_the_product() {
        let mut layout = TensorLayout::new(2, 2, 3).unwrap();
        layout.g_factor = 3;
        assert_eq!(witness_value::<Rational>(&layout).unwrap(), q(0));
    }

    fn arb_element(gens: usize) -> impl Strategy<Value = ExtElement<Rational64>> {
        proptest::collection::vec((0u128..(1 << gens), -3i64..=3), 0..5).prop_map(|terms| {
            let mut e = ExtElement::zero();
            for (m, c) in terms {
                e.add_term(m, Rational64::from_integer(c));
            }
            e
        })
    }

    fn arb_homogeneous(gens: usize, deg: usize) -> impl Strategy<Value = ExtElement<Rational64>> {
        proptest::collection::vec(
            (proptest::sample::subsequence((0..gens).collect::<Vec<_>>(), deg), -3i64..=3),
            0..4,
        )
        .prop_map(|terms| {
            let mut e = ExtElement::zero();
            for (idx, c) in terms {
                let mask = idx.iter().fold(0u128, |m, &i| m | (1 << i));
                e.add_term(mask, Rational64::from_integer(c));
            }
            e
        })
    }

    proptest! {
        #[test]
        fn multiplication_is_associative(a in arb_element(6), b in arb_element(6), c in arb_element(6)) {
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        }

        #[test]
        fn graded_commutative(
            (da, db, a, b) in (0usize..4, 0usize..4).prop_flat_map(|(da, db)| {
                (Just(da), Just(db), arb_homogeneous(6, da), arb_homogeneous(6, db))
            })
        ) {
            let sign = Rational64::from_integer(if da * db % 2 == 1 { -1 } else { 1 });
            prop_assert_eq!(a.mul(&b), b.mul(&a).scale(&sign));
        }
    }
}
