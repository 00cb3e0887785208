//! The vector family `z_i`, its biorthogonal duals, and the finite-rank
//! averaging operators `beta_n` built from them — all with exact dyadic
//! coefficients and explicit index windows.
//!
//! `z_i = e_{2i} - e_{2i+1} + e_{4i} + e_{4i+1} + e_{4i+2} + e_{4i+3}` for
//! `i >= 1`. The family is orthogonal with `<z_i, z_j> = 6 delta_ij`, and the
//! dual functional `z*_i` has two interchangeable realizations that agree on
//! the span of the family: a two-entry "pair" form supported one level up and
//! a four-entry "quad" form supported two levels up. `beta_n` averages the
//! rank-one operators `z*_i (x) z_i` over `i` in `sigma_n` with weight `1/2^n`.

use crate::dyadic::{Dyadic, DyadicVector};
use crate::error::{Error, Result};
use crate::index::{expand_y, sigma_range};
use crate::linalg::DenseMatrix;
use std::collections::BTreeMap;

/// Contiguous half-open window `[lo, hi)` of basis indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexWindow {
    pub lo: u64,
    pub hi: u64,
}

impl IndexWindow {
    /// Window spanning levels `a..=b`, i.e. `[2^a, 2^{b+1})`.
    pub fn levels(a: u32, b: u32) -> Result<Self> {
        if a == 0 || b < a || b > 62 {
            return Err(Error::Domain(format!("invalid level window {a}..={b}")));
        }
        Ok(IndexWindow {
            lo: 1u64 << a,
            hi: 1u64 << (b + 1),
        })
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.hi <= self.lo
    }

    pub fn contains(&self, j: u64) -> bool {
        self.lo <= j && j < self.hi
    }

    /// Offset of `j` inside the window, for matrix realizations.
    pub fn offset(&self, j: u64) -> Option<usize> {
        self.contains(j).then(|| (j - self.lo) as usize)
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> {
        self.lo..self.hi
    }
}

/// `z_i` with exact `+-1` coordinates. Requires `i >= 1`.
pub fn z_vector(i: u64) -> Result<DyadicVector> {
    if i == 0 {
        return Err(Error::Domain("z_vector: index must be >= 1".into()));
    }
    let one = Dyadic::ONE;
    Ok(DyadicVector::from_entries([
        (2 * i, one),
        (2 * i + 1, -one),
        (4 * i, one),
        (4 * i + 1, one),
        (4 * i + 2, one),
        (4 * i + 3, one),
    ]))
}

/// Which realization of the dual functional `z*_i` to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DualForm {
    /// `(e*_{2i} - e*_{2i+1}) / 2`, supported one level above `i`.
    Pair,
    /// `(e*_{4i} + e*_{4i+1} + e*_{4i+2} + e*_{4i+3}) / 4`, two levels above.
    Quad,
}

/// The dual functional `z*_i` in the chosen form; both satisfy
/// `z*_i(z_k) = delta_ik` exactly. Requires `i >= 1`.
pub fn z_dual(i: u64, form: DualForm) -> Result<DyadicVector> {
    if i == 0 {
        return Err(Error::Domain("z_dual: index must be >= 1".into()));
    }
    Ok(match form {
        DualForm::Pair => {
            let h = Dyadic::inv_pow2(1);
            DyadicVector::from_entries([(2 * i, h), (2 * i + 1, -h)])
        }
        DualForm::Quad => {
            let q = Dyadic::inv_pow2(2);
            DyadicVector::from_entries([
                (4 * i, q),
                (4 * i + 1, q),
                (4 * i + 2, q),
                (4 * i + 3, q),
            ])
        }
    })
}

/// Sparse exact matrix: `(row index, column index) -> coefficient`,
/// zero entries never stored.
pub type SparseMatrix = BTreeMap<(u64, u64), Dyadic>;

/// Exact entrywise difference of two sparse matrices.
pub fn sparse_diff(a: &SparseMatrix, b: &SparseMatrix) -> SparseMatrix {
    let mut out = a.clone();
    for (&key, &c) in b {
        let slot = out.entry(key).or_insert(Dyadic::ZERO);
        *slot = *slot - c;
        if slot.is_zero() {
            out.remove(&key);
        }
    }
    out
}

/// Exact entrywise sum of sparse matrices.
pub fn sparse_sum<'a, I: IntoIterator<Item = &'a SparseMatrix>>(mats: I) -> SparseMatrix {
    let mut out = SparseMatrix::new();
    for m in mats {
        for (&key, &c) in m {
            let slot = out.entry(key).or_insert(Dyadic::ZERO);
            *slot += c;
            if slot.is_zero() {
                out.remove(&key);
            }
        }
    }
    out
}

/// A finite-rank operator `scale * sum_t u_t* (x) v_t` together with the
/// index windows its matrix realization lives on.
///
/// Functionals must be supported inside `domain`, vectors inside `range`;
/// the constructor rejects out-of-window coordinates rather than dropping
/// them silently.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteRankOperator {
    scale: Dyadic,
    terms: Vec<(DyadicVector, DyadicVector)>,
    domain: IndexWindow,
    range: IndexWindow,
}

impl FiniteRankOperator {
    pub fn new(
        scale: Dyadic,
        terms: Vec<(DyadicVector, DyadicVector)>,
        domain: IndexWindow,
        range: IndexWindow,
    ) -> Result<Self> {
        for (t, (u, v)) in terms.iter().enumerate() {
            if let Some(j) = u.support().find(|&j| !domain.contains(j)) {
                return Err(Error::Input(format!(
                    "term {t}: functional coordinate {j} outside domain window [{}, {})",
                    domain.lo, domain.hi
                )));
            }
            if let Some(j) = v.support().find(|&j| !range.contains(j)) {
                return Err(Error::Input(format!(
                    "term {t}: vector coordinate {j} outside range window [{}, {})",
                    range.lo, range.hi
                )));
            }
        }
        Ok(FiniteRankOperator {
            scale,
            terms,
            domain,
            range,
        })
    }

    pub fn scale(&self) -> Dyadic {
        self.scale
    }

    pub fn terms(&self) -> &[(DyadicVector, DyadicVector)] {
        &self.terms
    }

    pub fn domain(&self) -> IndexWindow {
        self.domain
    }

    pub fn range(&self) -> IndexWindow {
        self.range
    }

    /// Exact trace against the biorthogonal coordinate functionals:
    /// `scale * sum_t <u_t, v_t>`.
    pub fn trace(&self) -> Dyadic {
        let mut acc = Dyadic::ZERO;
        for (u, v) in &self.terms {
            acc += u.inner(v);
        }
        acc * self.scale
    }

    /// Exact action on a vector: `scale * sum_t <u_t, x> v_t`.
    pub fn apply(&self, x: &DyadicVector) -> DyadicVector {
        let mut out = DyadicVector::new();
        for (u, v) in &self.terms {
            let c = u.inner(x) * self.scale;
            out.add_scaled(v, c);
        }
        out
    }

    /// Exact sparse matrix realization, keyed by absolute (row, column) index.
    pub fn sparse_matrix(&self) -> SparseMatrix {
        let mut out = SparseMatrix::new();
        for (u, v) in &self.terms {
            for (col, uc) in u.iter() {
                for (row, vc) in v.iter() {
                    let c = self.scale * uc * vc;
                    let slot = out.entry((row, col)).or_insert(Dyadic::ZERO);
                    *slot += c;
                    if slot.is_zero() {
                        out.remove(&(row, col));
                    }
                }
            }
        }
        out
    }

    /// Dense floating-point realization on the operator's own windows:
    /// `range.len()` rows by `domain.len()` columns.
    pub fn dense_matrix(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.range.len(), self.domain.len());
        for (&(row, col), &c) in self.sparse_matrix().iter() {
            let r = self.range.offset(row).expect("row validated at construction");
            let q = self.domain.offset(col).expect("col validated at construction");
            m.set(r, q, c.to_f64());
        }
        m
    }
}

/// The averaging operator `beta_n = (1/2^n) sum_{i in sigma_n} z*_i (x) z_i`
/// in the chosen dual form. Requires `n >= 2`.
///
/// Windows: pair form acts on `sigma_{n+1}`, quad form on `sigma_{n+2}`;
/// both map into `sigma_{n+1} + sigma_{n+2}`.
pub fn beta(n: u32, form: DualForm) -> Result<FiniteRankOperator> {
    if n < 2 {
        return Err(Error::Domain(format!("beta: level must be >= 2, got {n}")));
    }
    let domain = match form {
        DualForm::Pair => IndexWindow::levels(n + 1, n + 1)?,
        DualForm::Quad => IndexWindow::levels(n + 2, n + 2)?,
    };
    let range = IndexWindow::levels(n + 1, n + 2)?;
    let mut terms = Vec::with_capacity(1 << n);
    for i in sigma_range(n)? {
        terms.push((z_dual(i, form)?, z_vector(i)?));
    }
    FiniteRankOperator::new(Dyadic::inv_pow2(n), terms, domain, range)
}

/// The level difference `beta_n - beta_{n-1}` in its regrouped form
/// `(1/2^{n+1}) sum_{j in sigma_{n+1}} e*_j (x) y_j`. Requires `n >= 3`.
///
/// Acts on `sigma_{n+1}`, maps into levels `n ..= n+2`.
pub fn beta_diff(n: u32) -> Result<FiniteRankOperator> {
    if n < 3 {
        return Err(Error::Domain(format!(
            "beta_diff: level must be >= 3, got {n}"
        )));
    }
    let domain = IndexWindow::levels(n + 1, n + 1)?;
    let range = IndexWindow::levels(n, n + 2)?;
    let mut terms = Vec::with_capacity(1 << (n + 1));
    for j in sigma_range(n + 1)? {
        let functional = DyadicVector::from_entries([(j, Dyadic::ONE)]);
        terms.push((functional, expand_y(j)?));
    }
    FiniteRankOperator::new(Dyadic::inv_pow2(n + 1), terms, domain, range)
}

/// Splits an operator with singleton-supported functionals into one
/// sub-operator per block of `blocks`, preserving scale and windows.
///
/// `blocks` must partition the operator's domain window exactly; every
/// term's functional support must sit inside a single block. The returned
/// (block, operator) pairs re-sum to the original exactly.
pub fn group_by_blocks(
    op: &FiniteRankOperator,
    blocks: &[Vec<u64>],
) -> Result<Vec<(Vec<u64>, FiniteRankOperator)>> {
    // Check the blocks partition the domain window.
    let mut owner: BTreeMap<u64, usize> = BTreeMap::new();
    for (b, block) in blocks.iter().enumerate() {
        for &j in block {
            if !op.domain().contains(j) {
                return Err(Error::Input(format!(
                    "block element {j} outside operator domain window"
                )));
            }
            if owner.insert(j, b).is_some() {
                return Err(Error::Input(format!("element {j} appears in two blocks")));
            }
        }
    }
    if owner.len() != op.domain().len() {
        return Err(Error::Input(format!(
            "blocks cover {} of {} domain indices",
            owner.len(),
            op.domain().len()
        )));
    }

    let mut grouped: Vec<Vec<(DyadicVector, DyadicVector)>> = vec![Vec::new(); blocks.len()];
    for (u, v) in op.terms() {
        let mut supp = u.support();
        let first = supp
            .next()
            .ok_or_else(|| Error::Input("term with empty functional support".into()))?;
        let b = owner[&first];
        if let Some(stray) = u.support().find(|j| owner[j] != b) {
            return Err(Error::Input(format!(
                "functional support straddles blocks (indices {first} and {stray})"
            )));
        }
        grouped[b].push((u.clone(), v.clone()));
    }

    blocks
        .iter()
        .zip(grouped)
        .map(|(block, terms)| {
            Ok((
                block.clone(),
                FiniteRankOperator::new(op.scale(), terms, op.domain(), op.range())?,
            ))
        })
        .collect()
}
