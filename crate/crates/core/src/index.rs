//! Basis bookkeeping: dyadic levels, index windows, and the nine reindexing
//! maps that express each perturbation vector `y_j` in the ambient basis.
//!
//! The ambient space is spanned by `e_2, e_3, e_4, ...`. Level `n` owns the
//! window `sigma_n = {2^n, ..., 2^{n+1} - 1}`. Every index `j >= 4` splits as
//! `j = 4i + l` with `i >= 1` and `l` in `0..4`; the reindexing maps send `j`
//! to nine pairwise distinct targets spread over the levels adjacent to `j`,
//! and the attached integer coefficients are the exact coordinates of `y_j`.

use crate::dyadic::{Dyadic, DyadicVector};
use crate::error::{Error, Result};
use std::ops::Range;

/// Number of reindexing maps (`k` ranges over `1..=REINDEX_COUNT`).
pub const REINDEX_COUNT: usize = 9;

/// Dyadic level of `j`: the unique `n` with `2^n <= j < 2^{n+1}`. Requires `j >= 2`.
pub fn level(j: u64) -> Result<u32> {
    if j < 2 {
        return Err(Error::Domain(format!("level: index {j} below first basis index 2")));
    }
    Ok(63 - j.leading_zeros())
}

/// The window `sigma_n = [2^n, 2^{n+1})`. Requires `1 <= n <= 62`.
pub fn sigma_range(n: u32) -> Result<Range<u64>> {
    if n == 0 {
        return Err(Error::Domain("sigma_range: level must be >= 1".into()));
    }
    if n > 62 {
        return Err(Error::Domain(format!("sigma_range: level {n} too large")));
    }
    Ok((1u64 << n)..(1u64 << (n + 1)))
}

fn split(j: u64) -> Result<(u64, u64)> {
    if j < 4 {
        return Err(Error::Domain(format!(
            "reindexing maps are defined for j >= 4, got {j}"
        )));
    }
    Ok((j / 4, j % 4))
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 || k > REINDEX_COUNT {
        return Err(Error::Domain(format!(
            "reindex map number must lie in 1..={REINDEX_COUNT}, got {k}"
        )));
    }
    Ok(())
}

/// Target index of the `k`-th reindexing map at `j = 4i + l`:
///
/// * `k = 1, 2`: the parent pair `2i`, `2i + 1` (one level down);
/// * `k = 3, 4, 5`: the other three members of `j`'s own quad, visited in
///   cyclic order `4i + ((l + k - 2) mod 4)`;
/// * `k = 6..=9`: four children two levels up, `8i + (k - 6)` when `l < 2`
///   and `8i + 4 + (k - 6)` when `l >= 2`.
pub fn reindex(k: usize, j: u64) -> Result<u64> {
    check_k(k)?;
    let (i, l) = split(j)?;
    Ok(match k {
        1 => 2 * i,
        2 => 2 * i + 1,
        3..=5 => {
            let m = (k - 2) as u64;
            4 * i + (l + m) % 4
        }
        _ => {
            let t = (k - 6) as u64;
            if l < 2 {
                8 * i + t
            } else {
                8 * i + 4 + t
            }
        }
    })
}

/// Coefficient attached to the `k`-th reindexing map at `j`.
///
/// Eight of the nine weights are `+-1`; within `j`'s own quad the map that
/// lands on `j`'s sign partner (`j XOR 1`) carries weight `-2` instead.
pub fn coeff(k: usize, j: u64) -> Result<i64> {
    check_k(k)?;
    let (_, l) = split(j)?;
    Ok(match k {
        1 => -1,
        2 => 1,
        3..=5 => {
            if reindex(k, j)? == j ^ 1 {
                -2
            } else {
                -1
            }
        }
        _ => {
            if l % 2 == 0 {
                1
            } else {
                -1
            }
        }
    })
}

/// All nine `(target, coefficient)` pairs of `j`, ordered by map number.
pub fn terms(j: u64) -> Result<[(u64, i64); REINDEX_COUNT]> {
    let mut out = [(0u64, 0i64); REINDEX_COUNT];
    for (k, slot) in out.iter_mut().enumerate() {
        *slot = (reindex(k + 1, j)?, coeff(k + 1, j)?);
    }
    Ok(out)
}

/// The perturbation vector `y_j = sum_k coeff(k, j) * e_{reindex(k, j)}`,
/// with exact integer coordinates.
pub fn expand_y(j: u64) -> Result<DyadicVector> {
    let mut v = DyadicVector::new();
    for (target, c) in terms(j)? {
        v.add_entry(target, Dyadic::from_int(c));
    }
    Ok(v)
}

/// `y_j` written in the `z` family: `y_j = sign * z_half - z_quarter`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZCombination {
    /// `+1` for even `j`, `-1` for odd `j`.
    pub sign: i64,
    /// Index of the positively-leveled term: `floor(j / 2)`.
    pub half: u64,
    /// Index of the subtracted term: `floor(j / 4)`.
    pub quarter: u64,
}

/// Expresses `y_j` as a two-term combination of `z` vectors.
///
/// For `j = 4i + l` this is `(-1)^l z_{2i + floor(l/2)} - z_i`, i.e.
/// `(-1)^j z_{floor(j/2)} - z_{floor(j/4)}`.
pub fn y_as_z_combination(j: u64) -> Result<ZCombination> {
    split(j)?;
    Ok(ZCombination {
        sign: if j % 2 == 0 { 1 } else { -1 },
        half: j / 2,
        quarter: j / 4,
    })
}
