//! Cells of the strip complex as bar-separated orderings of disk labels.
//!
//! A cell of `cell(n, w)` is an ordering of `1..=n` cut by bars into nonempty
//! blocks of at most `w` labels. Each bar lowers the dimension by one, so a
//! symbol with `b` bars has dimension `n - 1 - b`. A face is obtained by
//! splitting one block into an ordered pair of complementary subsequences; a
//! coface by deleting a bar and riffle-shuffling the two neighbouring blocks.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported number of disks. Cells pack into a `u64` key at five
/// bits per position.
pub const MAX_DISKS: usize = 12;

/// Number of disks and strip width.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ComplexParams {
    pub n: usize,
    pub w: usize,
}

impl ComplexParams {
    pub fn new(n: usize, w: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidParams(format!("n must be at least 1, got {n}")));
        }
        if w < 1 {
            return Err(Error::InvalidParams(format!("w must be at least 1, got {w}")));
        }
        if n > MAX_DISKS {
            return Err(Error::InvalidParams(format!(
                "n = {n} exceeds the supported maximum of {MAX_DISKS}"
            )));
        }
        Ok(Self { n, w })
    }

    /// `n - ceil(n / w)`, the dimension of the complex.
    pub fn top_dimension(&self) -> usize {
        self.n - self.n.div_ceil(self.w)
    }

    /// Number of cells of dimension `d`, computed without enumerating them.
    pub fn cell_count(&self, d: usize) -> u64 {
        if d >= self.n {
            return 0;
        }
        let blocks = self.n - d;
        factorial(self.n) * bounded_compositions(self.n, blocks, self.w)
    }
}

impl fmt::Display for ComplexParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cell({},{})", self.n, self.w)
    }
}

pub(crate) fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Number of compositions of `total` into exactly `parts` parts, each in `1..=max`.
pub fn bounded_compositions(total: usize, parts: usize, max: usize) -> u64 {
    // ways[p][t]: compositions of t into p parts
    let mut ways = vec![0u64; total + 1];
    ways[0] = 1;
    for _ in 0..parts {
        let mut next = vec![0u64; total + 1];
        for (t, &count) in ways.iter().enumerate() {
            if count == 0 {
                continue;
            }
            for part in 1..=max {
                if t + part > total {
                    break;
                }
                next[t + part] += count;
            }
        }
        ways = next;
    }
    ways[total]
}

fn compositions(total: usize, parts: usize, max: usize) -> Vec<Vec<usize>> {
    fn go(rest: usize, parts: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 0 {
            if rest == 0 {
                out.push(cur.clone());
            }
            return;
        }
        if rest < parts || rest > parts * max {
            return;
        }
        for part in 1..=max.min(rest) {
            cur.push(part);
            go(rest - part, parts - 1, max, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(total, parts, max, &mut Vec::with_capacity(parts), &mut out);
    out
}

/// One cell of `cell(n)`: a permutation of `1..=n` with bars between some
/// adjacent positions.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Symbol {
    n: u8,
    labels: [u8; MAX_DISKS],
    /// Bit `i` set means a bar sits between positions `i` and `i + 1`.
    bars: u16,
}

impl Symbol {
    /// Builds a symbol from its blocks, left to right.
    pub fn from_blocks<B: AsRef<[u8]>>(blocks: &[B]) -> Result<Self> {
        let mut labels = [0u8; MAX_DISKS];
        let mut bars = 0u16;
        let mut len = 0usize;
        for (b, block) in blocks.iter().enumerate() {
            let block = block.as_ref();
            if block.is_empty() {
                return Err(Error::EmptyBlock);
            }
            if len + block.len() > MAX_DISKS {
                return Err(Error::InvalidParams(format!(
                    "more than {MAX_DISKS} labels in symbol"
                )));
            }
            labels[len..len + block.len()].copy_from_slice(block);
            len += block.len();
            if b + 1 < blocks.len() {
                bars |= 1 << (len - 1);
            }
        }
        if len == 0 {
            return Err(Error::EmptyBlock);
        }
        let mut seen = 0u32;
        for &l in &labels[..len] {
            if l == 0 || l as usize > len || seen & (1 << l) != 0 {
                return Err(Error::InvalidParams(format!(
                    "labels must be a permutation of 1..={len}"
                )));
            }
            seen |= 1 << l;
        }
        Ok(Self {
            n: len as u8,
            labels,
            bars,
        })
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels[..self.n as usize]
    }

    /// Cut indices in `1..n`: a bar at index `k` separates the first `k`
    /// labels from the rest.
    pub fn bar_positions(&self) -> Vec<usize> {
        (0..self.n as usize - 1)
            .filter(|i| self.bars & (1 << i) != 0)
            .map(|i| i + 1)
            .collect()
    }

    pub fn dimension(&self) -> usize {
        self.n as usize - 1 - self.bars.count_ones() as usize
    }

    /// Half-open position ranges of the blocks.
    fn block_ranges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n as usize;
        let mut start = 0;
        (0..n).filter_map(move |i| {
            if i + 1 == n || self.bars & (1 << i) != 0 {
                let range = (start, i + 1);
                start = i + 1;
                Some(range)
            } else {
                None
            }
        })
    }

    pub fn blocks(&self) -> Vec<&[u8]> {
        self.block_ranges().map(|(s, e)| &self.labels[s..e]).collect()
    }

    pub fn max_block(&self) -> usize {
        self.block_ranges().map(|(s, e)| e - s).max().unwrap_or(0)
    }

    /// Whether every block has at most `w` labels.
    pub fn fits(&self, w: usize) -> bool {
        self.max_block() <= w
    }

    /// Packed key whose integer order equals the lexicographic order of the
    /// (label, separator) sequence. For `n <= 9` this is the byte order of the
    /// serialized form.
    pub fn key(&self) -> u64 {
        let mut key = 0u64;
        for i in 0..self.n as usize {
            let sep = u64::from(self.bars & (1 << i) != 0);
            key = (key << 5) | ((self.labels[i] as u64) << 1) | sep;
        }
        key
    }

    pub fn from_key(key: u64, n: usize) -> Self {
        let mut labels = [0u8; MAX_DISKS];
        let mut bars = 0u16;
        for (i, label) in labels.iter_mut().enumerate().take(n) {
            let chunk = (key >> (5 * (n - 1 - i))) & 0x1f;
            *label = (chunk >> 1) as u8;
            if chunk & 1 == 1 && i + 1 < n {
                bars |= 1 << i;
            }
        }
        Self {
            n: n as u8,
            labels,
            bars,
        }
    }

    /// Calls `f` once per codimension-one face, one call per deshuffle of a
    /// block into an ordered pair of nonempty complementary subsequences.
    pub fn for_each_face(&self, mut f: impl FnMut(Symbol)) {
        for (start, end) in self.block_ranges() {
            let k = end - start;
            if k < 2 {
                continue;
            }
            let block = &self.labels[start..end];
            for mask in 1u32..(1 << k) - 1 {
                let mut face = *self;
                let mut pos = start;
                for (t, &l) in block.iter().enumerate() {
                    if mask & (1 << t) != 0 {
                        face.labels[pos] = l;
                        pos += 1;
                    }
                }
                face.bars |= 1 << (pos - 1);
                for (t, &l) in block.iter().enumerate() {
                    if mask & (1 << t) == 0 {
                        face.labels[pos] = l;
                        pos += 1;
                    }
                }
                f(face);
            }
        }
    }

    /// All faces, with one entry per deshuffle.
    pub fn faces(&self) -> Vec<Symbol> {
        let mut out = Vec::new();
        self.for_each_face(|s| out.push(s));
        out
    }

    /// Cofaces inside `cell(n, w)`: delete one bar whose neighbouring blocks
    /// fit together in `w`, then riffle-shuffle them.
    pub fn cofaces(&self, params: &ComplexParams) -> Vec<Symbol> {
        let ranges: Vec<_> = self.block_ranges().collect();
        let mut out = Vec::new();
        for pair in ranges.windows(2) {
            let (ls, le) = pair[0];
            let (_, re) = pair[1];
            let (left, right) = (le - ls, re - le);
            if left + right > params.w {
                continue;
            }
            let merged = &self.labels[ls..re];
            for_each_riffle(left, right, |mask| {
                let mut coface = *self;
                coface.bars &= !(1 << (le - 1));
                let (mut li, mut ri) = (0, left);
                for t in 0..left + right {
                    if mask & (1 << t) != 0 {
                        coface.labels[ls + t] = merged[li];
                        li += 1;
                    } else {
                        coface.labels[ls + t] = merged[ri];
                        ri += 1;
                    }
                }
                out.push(coface);
            });
        }
        out
    }
}

/// Calls `f` with every `left + right`-bit mask having exactly `left` bits
/// set; a set bit marks a position taken by the left sequence.
fn for_each_riffle(left: usize, right: usize, mut f: impl FnMut(u32)) {
    let total = left + right;
    for mask in 0u32..(1 << total) {
        if mask.count_ones() as usize == left {
            f(mask);
        }
    }
}

/// All order-preserving interleavings of two disjoint nonempty sequences.
pub fn shuffles(left: &[u8], right: &[u8]) -> Result<Vec<Vec<u8>>> {
    if left.is_empty() || right.is_empty() {
        return Err(Error::EmptyBlock);
    }
    if left.iter().any(|l| right.contains(l)) {
        return Err(Error::InvalidParams("blocks must be disjoint".into()));
    }
    let mut out = Vec::new();
    for_each_riffle(left.len(), right.len(), |mask| {
        let (mut li, mut ri) = (left.iter(), right.iter());
        let merged = (0..left.len() + right.len())
            .map(|t| {
                if mask & (1 << t) != 0 {
                    *li.next().unwrap()
                } else {
                    *ri.next().unwrap()
                }
            })
            .collect();
        out.push(merged);
    });
    Ok(out)
}

/// Next permutation in lexicographic order; false once the last is reached.
fn next_permutation(xs: &mut [u8]) -> bool {
    let n = xs.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && xs[i - 1] >= xs[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while xs[j] <= xs[i - 1] {
        j -= 1;
    }
    xs.swap(i - 1, j);
    xs[i..].reverse();
    true
}

/// Sorted keys of all `d`-cells of `cell(n, w)`.
pub(crate) fn enumerate_keys(params: &ComplexParams, d: usize) -> Vec<u64> {
    let n = params.n;
    if d >= n {
        return Vec::new();
    }
    let comps = compositions(n, n - d, params.w);
    let mut keys: Vec<u64> = comps
        .par_iter()
        .flat_map_iter(|comp| {
            let mut bars = 0u16;
            let mut acc = 0;
            for &part in &comp[..comp.len() - 1] {
                acc += part;
                bars |= 1 << (acc - 1);
            }
            let mut perm: Vec<u8> = (1..=n as u8).collect();
            let mut out = Vec::with_capacity(factorial(n) as usize);
            loop {
                let mut labels = [0u8; MAX_DISKS];
                labels[..n].copy_from_slice(&perm);
                let sym = Symbol {
                    n: n as u8,
                    labels,
                    bars,
                };
                out.push(sym.key());
                if !next_permutation(&mut perm) {
                    break;
                }
            }
            out
        })
        .collect();
    keys.par_sort_unstable();
    keys
}

/// The `d`-cells of `cell(n, w)` in canonical order.
pub fn enumerate_cells(params: &ComplexParams, d: usize) -> Vec<Symbol> {
    enumerate_keys(params, d)
        .into_iter()
        .map(|k| Symbol::from_key(k, params.n))
        .collect()
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (b, block) in self.blocks().into_iter().enumerate() {
            if b > 0 {
                f.write_str("|")?;
            }
            for (i, l) in block.iter().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{l}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Symbol({self})")
    }
}

impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Symbol {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.n, self.key()).cmp(&(other.n, other.key()))
    }
}

impl FromStr for Symbol {
    type Err = Error;

    /// Parses `"2 1|3"`. Blocks without spaces are read one digit per label,
    /// so `"21|3"` is accepted too.
    fn from_str(text: &str) -> Result<Self> {
        let bad = |reason: &str| Error::BadSymbol {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        let mut blocks = Vec::new();
        for raw in text.split('|') {
            let raw = raw.trim();
            if raw.is_empty() {
                return Err(bad("empty block"));
            }
            let block: Vec<u8> = if raw.contains(char::is_whitespace) {
                raw.split_whitespace()
                    .map(|t| t.parse::<u8>().map_err(|_| bad("label is not an integer")))
                    .collect::<Result<_>>()?
            } else {
                raw.chars()
                    .map(|c| {
                        c.to_digit(10)
                            .map(|d| d as u8)
                            .ok_or_else(|| bad("label is not a digit"))
                    })
                    .collect::<Result<_>>()?
            };
            blocks.push(block);
        }
        Symbol::from_blocks(&blocks).map_err(|e| bad(&e.to_string()))
    }
}

impl Serialize for Symbol {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Symbol {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(s: &str) -> Symbol {
        s.parse().unwrap()
    }

    fn strings(v: &[Symbol]) -> Vec<String> {
        let mut out: Vec<_> = v.iter().map(|s| s.to_string()).collect();
        out.sort();
        out
    }

    #[test]
    fn enumerates_cell_3_2() {
        let p = ComplexParams::new(3, 2).unwrap();
        let vertices = enumerate_cells(&p, 0);
        assert_eq!(vertices.len(), 6);
        assert!(vertices.iter().all(|s| s.blocks().len() == 3));
        let edges = enumerate_cells(&p, 1);
        assert_eq!(edges.len(), 12);
        assert!(edges.iter().all(|s| s.fits(2) && s.dimension() == 1));
        assert!(enumerate_cells(&p, 2).is_empty());
    }

    #[test]
    fn enumeration_is_in_serialization_order() {
        let p = ComplexParams::new(4, 3).unwrap();
        for d in 0..=p.top_dimension() {
            let cells = enumerate_cells(&p, d);
            let text: Vec<String> = cells.iter().map(|s| s.to_string()).collect();
            let mut sorted = text.clone();
            sorted.sort();
            assert_eq!(text, sorted);
        }
    }

    #[test]
    fn invalid_params() {
        assert!(ComplexParams::new(0, 2).is_err());
        assert!(ComplexParams::new(3, 0).is_err());
    }

    #[test]
    fn shuffle_examples() {
        let mut s = shuffles(&[1], &[2]).unwrap();
        s.sort();
        assert_eq!(s, vec![vec![1, 2], vec![2, 1]]);
        let mut s = shuffles(&[1], &[3, 2]).unwrap();
        s.sort();
        assert_eq!(s, vec![vec![1, 3, 2], vec![3, 1, 2], vec![3, 2, 1]]);
        assert_eq!(shuffles(&[5], &[]), Err(Error::EmptyBlock));
    }

    #[test]
    fn coface_examples() {
        let p2 = ComplexParams::new(3, 2).unwrap();
        assert_eq!(
            strings(&sym("1|2|3").cofaces(&p2)),
            vec!["1 2|3", "1|2 3", "1|3 2", "2 1|3"]
        );
        assert!(sym("12|3").cofaces(&p2).is_empty());
        let p3 = ComplexParams::new(3, 3).unwrap();
        assert_eq!(
            strings(&sym("1|2|3").cofaces(&p3)),
            vec!["1 2|3", "1|2 3", "1|3 2", "2 1|3"]
        );
        assert_eq!(sym("12|3").cofaces(&p3).len(), 3);
    }

    #[test]
    fn face_examples() {
        assert_eq!(strings(&sym("12|3").faces()), vec!["1|2|3", "2|1|3"]);
        assert!(sym("1|2|3").faces().is_empty());
        assert_eq!(
            strings(&sym("132").faces()),
            vec!["1 2|3", "1 3|2", "1|3 2", "2|1 3", "3 2|1", "3|1 2"]
        );
    }

    #[test]
    fn parse_and_display() {
        let s = sym("2 1|3");
        assert_eq!(s.to_string(), "2 1|3");
        assert_eq!(s, sym("21|3"));
        assert_eq!(s.bar_positions(), vec![2]);
        assert_eq!(s.dimension(), 1);
        assert!("1||2".parse::<Symbol>().is_err());
        assert!("1 1|2".parse::<Symbol>().is_err());
        assert!("1 3".parse::<Symbol>().is_err());
    }

    #[test]
    fn key_roundtrip() {
        let s = sym("3 1|4|2");
        assert_eq!(Symbol::from_key(s.key(), 4), s);
    }

    #[test]
    fn composition_counts() {
        assert_eq!(bounded_compositions(3, 2, 2), 2);
        assert_eq!(bounded_compositions(8, 6, 2), 15);
        assert_eq!(bounded_compositions(3, 1, 2), 0);
        assert_eq!(compositions(5, 3, 2).len() as u64, bounded_compositions(5, 3, 2));
    }
}
