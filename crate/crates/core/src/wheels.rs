//! Wheels, their concatenation products, and their images in first homology.
//!
//! A wheel `W(i1, ..., ik)` is the embedded `(k-1)`-torus where `i2` orbits
//! `i1`, `i3` orbits both, and so on. In degree one the homology of the strip
//! configuration space is spanned (on the part we need) by two-disk wheels
//! with every other disk a singleton. When `w >= 3` singletons commute with
//! a two-disk wheel, so the class depends only on the pair. When `w = 2` a
//! two-disk wheel splits the strip, so the class also records which disks sit
//! to its left.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::chains::{ChainComplexF2, ChainVector};
use crate::error::{Error, Result};
use crate::scalar::{self, Scalar};
use crate::symbols::{ComplexParams, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Wheel {
    disks: Vec<u8>,
}

impl Wheel {
    pub fn new(disks: Vec<u8>) -> Result<Self> {
        if disks.is_empty() {
            return Err(Error::InvalidParams("a wheel needs at least one disk".into()));
        }
        if disks.contains(&0) {
            return Err(Error::InvalidParams("disk labels start at 1".into()));
        }
        let mut sorted = disks.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|p| p[0] == p[1]) {
            return Err(Error::InvalidParams(format!(
                "repeated disk in wheel {:?}",
                disks
            )));
        }
        Ok(Self { disks })
    }

    pub fn disks(&self) -> &[u8] {
        &self.disks
    }

    pub fn len(&self) -> usize {
        self.disks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.disks.is_empty()
    }

    pub fn max_label(&self) -> u8 {
        *self.disks.iter().max().unwrap()
    }

    /// Dimension of the torus.
    pub fn dimension(&self) -> usize {
        self.disks.len() - 1
    }

    /// Largest label first.
    pub fn is_canonical(&self) -> bool {
        self.disks[0] == self.max_label()
    }
}

impl fmt::Display for Wheel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("W(")?;
        for (i, d) in self.disks.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{d}")?;
        }
        f.write_str(")")
    }
}

/// More disks ranks higher; ties go to the larger maximum label.
pub fn rank_compare(a: &Wheel, b: &Wheel) -> Ordering {
    (a.len(), a.max_label()).cmp(&(b.len(), b.max_label()))
}

/// Left-to-right concatenation of wheels with disjoint disks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WheelProduct {
    factors: Vec<Wheel>,
    params: ComplexParams,
}

impl WheelProduct {
    pub fn new(factors: Vec<Wheel>, params: ComplexParams) -> Result<Self> {
        let mut seen = 0u32;
        for wh in &factors {
            if wh.len() > params.w {
                return Err(Error::InvalidParams(format!(
                    "{wh} has more than w = {} disks",
                    params.w
                )));
            }
            for &d in wh.disks() {
                if d as usize > params.n {
                    return Err(Error::InvalidParams(format!(
                        "{wh} uses disk {d} > n = {}",
                        params.n
                    )));
                }
                if seen & (1 << d) != 0 {
                    return Err(Error::InvalidParams(format!("disk {d} appears twice")));
                }
                seen |= 1 << d;
            }
        }
        Ok(Self { factors, params })
    }

    /// Parses `"W(7,4,3)W(6,2,1)W(5)"`.
    pub fn parse(text: &str, params: ComplexParams) -> Result<Self> {
        let mut factors = Vec::new();
        let mut rest = text.trim();
        while !rest.is_empty() {
            let body = rest
                .strip_prefix("W(")
                .ok_or_else(|| Error::Parse(format!("expected W( in {text:?}")))?;
            let close = body
                .find(')')
                .ok_or_else(|| Error::Parse(format!("unclosed wheel in {text:?}")))?;
            let disks = body[..close]
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<u8>()
                        .map_err(|_| Error::Parse(format!("bad label {t:?} in {text:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            factors.push(Wheel::new(disks)?);
            rest = body[close + 1..].trim_start();
        }
        Self::new(factors, params)
    }

    pub fn factors(&self) -> &[Wheel] {
        &self.factors
    }

    pub fn params(&self) -> ComplexParams {
        self.params
    }

    /// Torus dimension, the sum of `k - 1` over factors.
    pub fn dimension(&self) -> usize {
        self.factors.iter().map(Wheel::dimension).sum()
    }

    /// Disks used by the product, as a bitmask over labels.
    pub fn disk_mask(&self) -> u32 {
        self.factors
            .iter()
            .flat_map(|w| w.disks())
            .fold(0, |m, &d| m | (1 << d))
    }

    /// Every wheel has its largest label first, and each adjacent pair
    /// `W1 W2` has `W1` outranking `W2` or more than `w` disks between them.
    pub fn is_basis_form(&self) -> bool {
        self.factors.iter().all(Wheel::is_canonical)
            && self.factors.windows(2).all(|p| {
                rank_compare(&p[0], &p[1]) == Ordering::Greater
                    || p[0].len() + p[1].len() > self.params.w
            })
    }

    /// Images in first homology, factor by factor.
    pub fn h1_image<S: Scalar>(&self) -> Vec<H1Vector<S>> {
        self.factors
            .iter()
            .enumerate()
            .filter(|(_, wh)| wh.len() >= 2)
            .flat_map(|(pos, _)| self.factor_image(pos))
            .collect()
    }

    fn factor_image<S: Scalar>(&self, pos: usize) -> Vec<H1Vector<S>> {
        let wh = &self.factors[pos];
        let left: u16 = if self.params.w == 2 {
            self.factors[..pos]
                .iter()
                .flat_map(|f| f.disks())
                .fold(0, |m, &d| m | (1 << d))
        } else {
            0
        };
        let disks = wh.disks();
        (1..disks.len())
            .map(|t| {
                let mut v = H1Vector::zero(self.params);
                for &s in &disks[..t] {
                    v.add_term(H1BasisClass::with_left(s, disks[t], left), S::one());
                }
                v
            })
            .collect()
    }
}

impl fmt::Display for WheelProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for wh in &self.factors {
            write!(f, "{wh}")?;
        }
        Ok(())
    }
}

impl Serialize for WheelProduct {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Images of one factor of a product in first homology: for
/// `W(i1, ..., ik)` the `t`-th vector is the sum of the pair classes
/// `(i_s, i_t)` over `s < t`.
pub fn wheel_h1_image<S: Scalar>(wheel: &Wheel, context: &WheelProduct) -> Result<Vec<H1Vector<S>>> {
    if wheel.len() < 2 {
        return Err(Error::WheelTooSmall(wheel.to_string()));
    }
    let pos = context
        .factors
        .iter()
        .position(|f| f == wheel)
        .ok_or_else(|| Error::NotAFactor(wheel.to_string()))?;
    Ok(context.factor_image(pos))
}

/// Images of every factor, concatenated; one vector per torus dimension.
pub fn product_h1_image<S: Scalar>(product: &WheelProduct) -> Vec<H1Vector<S>> {
    product.h1_image()
}

/// A degree-one basis class: the two-disk wheel on `high > low` with the
/// remaining disks as singletons, `left` of them (as a label bitmask) placed
/// to its left and the rest to its right, each side in decreasing order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct H1BasisClass {
    pub high: u8,
    pub low: u8,
    left: u16,
}

impl H1BasisClass {
    /// Class with every singleton to the right; the canonical position for `w >= 3`.
    pub fn new(a: u8, b: u8) -> Self {
        Self::with_left(a, b, 0)
    }

    /// Class of the pair `{a, b}` with the disks of `left` (a label bitmask)
    /// on its left. Labels of the pair itself are dropped from the mask.
    pub fn with_left(a: u8, b: u8, left: u16) -> Self {
        assert_ne!(a, b, "a two-disk wheel needs distinct disks");
        let (high, low) = if a > b { (a, b) } else { (b, a) };
        Self {
            high,
            low,
            left: left & !(1 << high) & !(1 << low),
        }
    }

    pub fn from_left_labels(a: u8, b: u8, left: &[u8]) -> Self {
        Self::with_left(a, b, left.iter().fold(0, |m, &d| m | (1 << d)))
    }

    /// Disks to the left of the wheel, decreasing.
    pub fn left_disks(&self) -> Vec<u8> {
        (1..16u8).rev().filter(|d| self.left & (1 << d) != 0).collect()
    }

    pub fn left_count(&self) -> usize {
        self.left.count_ones() as usize
    }

    /// The two one-cells whose sum is this class: singletons of the left set
    /// in decreasing order, the pair block in both orders, then the remaining
    /// singletons in decreasing order.
    pub fn cycle_symbols(&self, params: &ComplexParams) -> Result<[Symbol; 2]> {
        if self.high as usize > params.n || self.low == 0 {
            return Err(Error::InvalidParams(format!(
                "class ({}, {}) does not fit n = {}",
                self.high, self.low, params.n
            )));
        }
        if params.w < 2 {
            return Err(Error::NotApplicable("no two-disk blocks when w = 1".into()));
        }
        let left = self.left_disks();
        if left.iter().any(|&d| d as usize > params.n) {
            return Err(Error::InvalidParams("left disks exceed n".into()));
        }
        let right: Vec<u8> = (1..=params.n as u8)
            .rev()
            .filter(|&d| d != self.high && d != self.low && !left.contains(&d))
            .collect();
        let build = |pair: [u8; 2]| {
            let mut blocks: Vec<Vec<u8>> = left.iter().map(|&d| vec![d]).collect();
            blocks.push(pair.to_vec());
            blocks.extend(right.iter().map(|&d| vec![d]));
            Symbol::from_blocks(&blocks)
        };
        Ok([build([self.high, self.low])?, build([self.low, self.high])?])
    }
}

impl fmt::Display for H1BasisClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W({},{})", self.high, self.low)?;
        if self.left != 0 {
            write!(f, "[left {:?}]", self.left_disks())?;
        }
        Ok(())
    }
}

/// Chain-level representative of a basis class.
pub fn class_to_cycle(class: &H1BasisClass, complex: &ChainComplexF2) -> Result<ChainVector> {
    let symbols = class.cycle_symbols(&complex.params())?;
    complex.chain_from_symbols(&symbols)
}

/// Vector in the wheel-spanned part of first homology.
#[derive(Debug, Clone, PartialEq)]
pub struct H1Vector<S> {
    params: ComplexParams,
    coeffs: BTreeMap<H1BasisClass, S>,
}

impl<S: Scalar> H1Vector<S> {
    pub fn zero(params: ComplexParams) -> Self {
        Self {
            params,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn basis(params: ComplexParams, class: H1BasisClass) -> Self {
        let mut v = Self::zero(params);
        v.add_term(class, S::one());
        v
    }

    pub fn params(&self) -> ComplexParams {
        self.params
    }

    pub fn add_term(&mut self, class: H1BasisClass, coeff: S) {
        let entry = self.coeffs.entry(class).or_insert_with(S::zero);
        *entry = entry.clone() + coeff;
        if entry.is_negligible() {
            self.coeffs.remove(&class);
        }
    }

    pub fn coeff(&self, class: &H1BasisClass) -> S {
        self.coeffs.get(class).cloned().unwrap_or_else(S::zero)
    }

    pub fn support(&self) -> impl Iterator<Item = &H1BasisClass> {
        self.coeffs.keys()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&H1BasisClass, &S)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Keeps only the coordinates accepted by `keep`.
    pub fn project(&self, keep: impl Fn(&H1BasisClass) -> bool) -> Self {
        Self {
            params: self.params,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(c, _)| keep(c))
                .map(|(c, v)| (*c, v.clone()))
                .collect(),
        }
    }

    /// Serializable view: `{i, j, left_count, left, coeff}` per term.
    pub fn to_terms(&self) -> Vec<H1Term> {
        self.coeffs
            .iter()
            .map(|(c, v)| H1Term {
                i: c.high,
                j: c.low,
                left_count: c.left_count(),
                left: c.left_disks(),
                coeff: v.to_i64().map_or_else(|| format!("{v:?}"), |x| x.to_string()),
            })
            .collect()
    }
}

impl<S: Scalar> fmt::Display for H1Vector<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        for (i, (c, v)) in self.coeffs.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            match v.to_i64() {
                Some(1) => write!(f, "{c}")?,
                Some(x) => write!(f, "{x}*{c}")?,
                None => write!(f, "{v:?}*{c}")?,
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct H1Term {
    pub i: u8,
    pub j: u8,
    pub left_count: usize,
    pub left: Vec<u8>,
    pub coeff: String,
}

fn check_ambient<S: Scalar>(vectors: &[&H1Vector<S>]) -> Result<()> {
    if let Some(first) = vectors.first() {
        if let Some(v) = vectors.iter().find(|v| v.params != first.params) {
            return Err(Error::DimensionMismatch(format!(
                "vectors live in {} and {}",
                first.params, v.params
            )));
        }
    }
    Ok(())
}

/// Rank of the span over the coefficient field.
pub fn h1_rank<S: Scalar>(vectors: &[H1Vector<S>]) -> Result<usize> {
    let refs: Vec<&H1Vector<S>> = vectors.iter().collect();
    check_ambient(&refs)?;
    let coords: Vec<H1BasisClass> = {
        let mut all: Vec<_> = vectors.iter().flat_map(|v| v.support().copied()).collect();
        all.sort_unstable();
        all.dedup();
        all
    };
    let rows: Vec<Vec<S>> = vectors
        .iter()
        .map(|v| coords.iter().map(|c| v.coeff(c)).collect())
        .collect();
    Ok(scalar::rank(&rows))
}

/// Whether the spans of `a` and `b` meet only in zero.
pub fn spans_disjoint<S: Scalar>(a: &[H1Vector<S>], b: &[H1Vector<S>]) -> Result<bool> {
    let refs: Vec<&H1Vector<S>> = a.iter().chain(b).collect();
    check_ambient(&refs)?;
    let union: Vec<H1Vector<S>> = a.iter().chain(b).cloned().collect();
    Ok(h1_rank(&union)? == h1_rank(a)? + h1_rank(b)?)
}

impl FromStr for Wheel {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let inner = text
            .trim()
            .strip_prefix("W(")
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(|| Error::Parse(format!("expected W(...), got {text:?}")))?;
        let disks = inner
            .split(',')
            .map(|t| t.trim().parse::<u8>().map_err(|_| Error::Parse(format!("bad label {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Wheel::new(disks)
    }
}
