//! Exact dyadic rationals `p / 2^q` and sparse vectors over them.
//!
//! Every coefficient that appears in the construction — vector entries,
//! dual functionals, operator scales, traces — is a dyadic rational, so all
//! structural identities can be checked with zero rounding error. Floating
//! point only enters downstream, when matrices are handed to the SVD.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// An exact dyadic rational `num / 2^exp`.
///
/// Canonical form: `num` is odd, or `num == 0 && exp == 0`, or `exp == 0`
/// (integers keep their value in `num`). Arithmetic goes through `i128`
/// intermediates and panics on overflow; the quantities this crate builds
/// stay far below that (numerators fit in a few thousand, exponents below 32).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: i64,
    exp: u32,
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { num: 0, exp: 0 };
    pub const ONE: Dyadic = Dyadic { num: 1, exp: 0 };

    /// `num / 2^exp`, reduced to canonical form.
    pub fn new(num: i64, exp: u32) -> Self {
        Self::canonical(num as i128, exp)
    }

    pub fn from_int(n: i64) -> Self {
        Dyadic { num: n, exp: 0 }
    }

    /// `1 / 2^q`.
    pub fn inv_pow2(q: u32) -> Self {
        Dyadic { num: 1, exp: q }
    }

    fn canonical(mut num: i128, mut exp: u32) -> Self {
        if num == 0 {
            return Dyadic::ZERO;
        }
        while num % 2 == 0 && exp > 0 {
            num /= 2;
            exp -= 1;
        }
        Dyadic {
            num: i64::try_from(num).expect("dyadic numerator overflow"),
            exp,
        }
    }

    pub fn numerator(&self) -> i64 {
        self.num
    }

    pub fn exponent(&self) -> u32 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn is_one(&self) -> bool {
        self.num == 1 && self.exp == 0
    }

    pub fn abs(&self) -> Self {
        Dyadic {
            num: self.num.abs(),
            exp: self.exp,
        }
    }

    pub fn to_f64(&self) -> f64 {
        // Exact for every value this crate produces (|num| < 2^53).
        self.num as f64 / (2f64).powi(self.exp as i32)
    }

    /// Renders the canonical `p/2^q` form, e.g. `-3/2^4`; integers render bare.
    pub fn render(&self) -> String {
        if self.exp == 0 {
            format!("{}", self.num)
        } else {
            format!("{}/2^{}", self.num, self.exp)
        }
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        let exp = self.exp.max(rhs.exp);
        let a = (self.num as i128) << (exp - self.exp);
        let b = (rhs.num as i128) << (exp - rhs.exp);
        Dyadic::canonical(a + b, exp)
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Dyadic) -> Dyadic {
        self + (-rhs)
    }
}

impl Mul for Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: Dyadic) -> Dyadic {
        Dyadic::canonical(self.num as i128 * rhs.num as i128, self.exp + rhs.exp)
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            num: -self.num,
            exp: self.exp,
        }
    }
}

impl AddAssign for Dyadic {
    fn add_assign(&mut self, rhs: Dyadic) {
        *self = *self + rhs;
    }
}

/// A sparse vector with dyadic entries, indexed by basis index.
///
/// Zero entries are never stored, so `==` is exact vector equality and
/// iteration order is always ascending in the index.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DyadicVector {
    entries: BTreeMap<u64, Dyadic>,
}

impl DyadicVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_entries<I: IntoIterator<Item = (u64, Dyadic)>>(iter: I) -> Self {
        let mut v = Self::new();
        for (j, c) in iter {
            v.add_entry(j, c);
        }
        v
    }

    /// Adds `c` to the entry at `j`, dropping it if the sum cancels to zero.
    pub fn add_entry(&mut self, j: u64, c: Dyadic) {
        if c.is_zero() {
            return;
        }
        let slot = self.entries.entry(j).or_insert(Dyadic::ZERO);
        *slot += c;
        if slot.is_zero() {
            self.entries.remove(&j);
        }
    }

    pub fn get(&self, j: u64) -> Dyadic {
        self.entries.get(&j).copied().unwrap_or(Dyadic::ZERO)
    }

    /// Number of nonzero entries.
    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn support(&self) -> impl Iterator<Item = u64> + '_ {
        self.entries.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, Dyadic)> + '_ {
        self.entries.iter().map(|(&j, &c)| (j, c))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// `self += coeff * other`, exactly.
    pub fn add_scaled(&mut self, other: &DyadicVector, coeff: Dyadic) {
        if coeff.is_zero() {
            return;
        }
        for (j, c) in other.iter() {
            self.add_entry(j, c * coeff);
        }
    }

    pub fn scaled(&self, coeff: Dyadic) -> DyadicVector {
        let mut out = DyadicVector::new();
        out.add_scaled(self, coeff);
        out
    }

    /// Exact inner product (real scalars).
    pub fn inner(&self, other: &DyadicVector) -> Dyadic {
        // Walk the smaller support.
        let (small, large) = if self.support_len() <= other.support_len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut acc = Dyadic::ZERO;
        for (j, c) in small.iter() {
            acc += c * large.get(j);
        }
        acc
    }

    /// Exact squared Euclidean norm.
    pub fn norm_sq(&self) -> Dyadic {
        let mut acc = Dyadic::ZERO;
        for (_, c) in self.iter() {
            acc += c * c;
        }
        acc
    }

    pub fn min_index(&self) -> Option<u64> {
        self.entries.keys().next().copied()
    }

    pub fn max_index(&self) -> Option<u64> {
        self.entries.keys().next_back().copied()
    }
}
