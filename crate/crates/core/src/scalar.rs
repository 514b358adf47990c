//! Coefficient fields for the symbolic modules.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio, Rational64};
use num_traits::Num;

/// A field the homology-vector and exterior-algebra code can compute in.
///
/// Exact types report zero exactly. Floating types treat tiny magnitudes as
/// zero during elimination.
pub trait Scalar: Num + Neg<Output = Self> + Clone + PartialEq + Debug + Send + Sync {
    fn is_negligible(&self) -> bool {
        self.is_zero()
    }

    /// Preference for choosing elimination pivots; larger is better.
    fn pivot_weight(&self) -> f64 {
        1.0
    }

    fn from_i64(v: i64) -> Self;

    /// Integer value, if the scalar is one.
    fn to_i64(&self) -> Option<i64>;
}

impl Scalar for BigRational {
    fn from_i64(v: i64) -> Self {
        Ratio::from_integer(BigInt::from(v))
    }

    fn to_i64(&self) -> Option<i64> {
        if self.is_integer() {
            i64::try_from(self.to_integer()).ok()
        } else {
            None
        }
    }
}

impl Scalar for Rational64 {
    fn from_i64(v: i64) -> Self {
        Ratio::from_integer(v)
    }

    fn to_i64(&self) -> Option<i64> {
        self.is_integer().then(|| self.to_integer())
    }
}

/// Integers, for expansions that never divide.
impl Scalar for i64 {
    fn from_i64(v: i64) -> Self {
        v
    }

    fn to_i64(&self) -> Option<i64> {
        Some(*self)
    }
}

macro_rules! float_scalar {
    ($t:ty, $eps:expr) => {
        impl Scalar for $t {
            fn is_negligible(&self) -> bool {
                self.abs() <= $eps
            }

            fn pivot_weight(&self) -> f64 {
                self.abs() as f64
            }

            fn from_i64(v: i64) -> Self {
                v as $t
            }

            fn to_i64(&self) -> Option<i64> {
                let r = self.round();
                ((self - r).abs() <= $eps).then_some(r as i64)
            }
        }
    };
}

float_scalar!(f64, 1e-9);
float_scalar!(f32, 1e-4);

/// Rank of a dense row-major matrix by Gaussian elimination.
pub fn rank<S: Scalar>(rows: &[Vec<S>]) -> usize {
    let mut m: Vec<Vec<S>> = rows.to_vec();
    let ncols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let pivot = (rank..m.len())
            .filter(|&r| !m[r][col].is_negligible())
            .max_by(|&a, &b| m[a][col].pivot_weight().total_cmp(&m[b][col].pivot_weight()));
        let Some(p) = pivot else { continue };
        m.swap(rank, p);
        let pivot_row = m[rank].clone();
        for row in m.iter_mut().skip(rank + 1) {
            if row[col].is_negligible() {
                continue;
            }
            let factor = row[col].clone() / pivot_row[col].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row).skip(col) {
                *x = x.clone() - factor.clone() * y.clone();
            }
        }
        rank += 1;
    }
    rank
}
