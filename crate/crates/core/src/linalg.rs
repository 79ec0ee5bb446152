//! Exact dense and sparse linear algebra over a cyclotomic field.
//!
//! Everything here reduces to one primitive: deterministic reduced row
//! echelon form with exact pivots. The sparse variant maintains the full
//! RREF invariant incrementally so that membership tests against a growing
//! ideal stay cheap; its rows stay short because every row of an RREF has at
//! most 1 + (number of non-pivot columns) nonzero entries.

use std::collections::BTreeMap;

use crate::cyclo::CycloNumber;
use crate::error::{Result, WharfError};

/// Dense matrix with entries in one cyclotomic field.
#[derive(Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    order: u32,
    data: Vec<CycloNumber>,
}

impl ExactMatrix {
    pub fn zero(order: u32, rows: usize, cols: usize) -> ExactMatrix {
        ExactMatrix {
            rows,
            cols,
            order,
            data: vec![CycloNumber::zero(order); rows * cols],
        }
    }

    pub fn identity(order: u32, n: usize) -> ExactMatrix {
        let mut m = ExactMatrix::zero(order, n, n);
        for i in 0..n {
            *m.at_mut(i, i) = CycloNumber::one(order);
        }
        m
    }

    pub fn from_rows(order: u32, rows: Vec<Vec<CycloNumber>>) -> Result<ExactMatrix> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(WharfError::ShapeMismatch(r, c, r, row.len()));
            }
            for v in row {
                if v.order() != order {
                    return Err(WharfError::OrderMismatch(order, v.order()));
                }
                data.push(v);
            }
        }
        Ok(ExactMatrix { rows: r, cols: c, order, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn at(&self, i: usize, j: usize) -> &CycloNumber {
        &self.data[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut CycloNumber {
        &mut self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[CycloNumber] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> ExactMatrix {
        let mut t = ExactMatrix::zero(self.order, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *t.at_mut(j, i) = self.at(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &ExactMatrix) -> Result<ExactMatrix> {
        if self.cols != other.rows {
            return Err(WharfError::ShapeMismatch(self.rows, self.cols, other.rows, other.cols));
        }
        let mut out = ExactMatrix::zero(self.order, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.at(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let t = a.mul_ref(b);
                    *out.at_mut(i, j) += &t;
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[CycloNumber]) -> Result<Vec<CycloNumber>> {
        if v.len() != self.cols {
            return Err(WharfError::ShapeMismatch(self.rows, self.cols, v.len(), 1));
        }
        let mut out = vec![CycloNumber::zero(self.order); self.rows];
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.at(i, j);
                if a.is_zero() || v[j].is_zero() {
                    continue;
                }
                let t = a.mul_ref(&v[j]);
                out[i] += &t;
            }
        }
        Ok(out)
    }

    /// Laplace-expansion determinant; exponential, only for small oracles.
    pub fn determinant_by_expansion(&self) -> Result<CycloNumber> {
        if self.rows != self.cols {
            return Err(WharfError::ShapeMismatch(self.rows, self.cols, self.cols, self.rows));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(CycloNumber::one(self.order));
        }
        if n == 1 {
            return Ok(self.at(0, 0).clone());
        }
        let mut det = CycloNumber::zero(self.order);
        for j in 0..n {
            let a = self.at(0, j);
            if a.is_zero() {
                continue;
            }
            let mut minor =
                ExactMatrix::zero(self.order, n - 1, n - 1);
            for i in 1..n {
                let mut cc = 0;
                for c in 0..n {
                    if c == j {
                        continue;
                    }
                    *minor.at_mut(i - 1, cc) = self.at(i, c).clone();
                    cc += 1;
                }
            }
            let sub = minor.determinant_by_expansion()?;
            let term = a.mul_ref(&sub);
            if j % 2 == 0 {
                det += &term;
            } else {
                det -= &term;
            }
        }
        Ok(det)
    }
}

impl std::fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "ExactMatrix {}x{} (order {})", self.rows, self.cols, self.order)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| format!("{}", self.at(i, j))).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Outcome of row reduction: the reduced matrix, its rank, and the pivot
/// column of each nonzero row.
pub struct Rref {
    pub matrix: ExactMatrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

/// Deterministic reduced row echelon form: scan columns left to right, pick
/// the first row with a nonzero entry, normalize, eliminate everywhere.
pub fn rref(m: &ExactMatrix) -> Result<Rref> {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..a.cols() {
        if r == a.rows() {
            break;
        }
        let mut sel = None;
        for i in r..a.rows() {
            if !a.at(i, col).is_zero() {
                sel = Some(i);
                break;
            }
        }
        let Some(i) = sel else { continue };
        if i != r {
            for j in 0..a.cols() {
                let x = a.at(i, j).clone();
                let y = a.at(r, j).clone();
                *a.at_mut(i, j) = y;
                *a.at_mut(r, j) = x;
            }
        }
        let inv = a.at(r, col).inverse()?;
        for j in col..a.cols() {
            let v = a.at(r, j).mul_ref(&inv);
            *a.at_mut(r, j) = v;
        }
        for i in 0..a.rows() {
            if i == r || a.at(i, col).is_zero() {
                continue;
            }
            let f = a.at(i, col).clone();
            for j in col..a.cols() {
                let t = f.mul_ref(a.at(r, j));
                *a.at_mut(i, j) -= &t;
            }
        }
        pivots.push(col);
        r += 1;
    }
    Ok(Rref { matrix: a, rank: r, pivots })
}

/// Basis of the right kernel {x : Mx = 0}, one vector per free column, in
/// RREF-style normal form (free coordinate = 1).
pub fn kernel_basis(m: &ExactMatrix) -> Result<Vec<Vec<CycloNumber>>> {
    let red = rref(m)?;
    let order = m.order();
    let piv_set: BTreeMap<usize, usize> =
        red.pivots.iter().enumerate().map(|(row, &col)| (col, row)).collect();
    let mut basis = Vec::new();
    for free in 0..m.cols() {
        if piv_set.contains_key(&free) {
            continue;
        }
        let mut v = vec![CycloNumber::zero(order); m.cols()];
        v[free] = CycloNumber::one(order);
        for (&col, &row) in &piv_set {
            let c = red.matrix.at(row, free);
            if !c.is_zero() {
                v[col] = -c;
            }
        }
        basis.push(v);
    }
    Ok(basis)
}

/// Solution of A·x = b as (particular solution, kernel basis); `None` when
/// the system is inconsistent.
#[allow(clippy::type_complexity)]
pub fn solve_affine(
    a: &ExactMatrix,
    b: &[CycloNumber],
) -> Result<Option<(Vec<CycloNumber>, Vec<Vec<CycloNumber>>)>> {
    if b.len() != a.rows() {
        return Err(WharfError::ShapeMismatch(a.rows(), a.cols(), b.len(), 1));
    }
    let order = a.order();
    let mut aug = ExactMatrix::zero(order, a.rows(), a.cols() + 1);
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            *aug.at_mut(i, j) = a.at(i, j).clone();
        }
        *aug.at_mut(i, a.cols()) = b[i].clone();
    }
    let red = rref(&aug)?;
    if red.pivots.contains(&a.cols()) {
        return Ok(None);
    }
    let mut x = vec![CycloNumber::zero(order); a.cols()];
    for (row, &col) in red.pivots.iter().enumerate() {
        x[col] = red.matrix.at(row, a.cols()).clone();
    }
    let kernel = kernel_basis(a)?;
    Ok(Some((x, kernel)))
}

/// A sparse vector: strictly increasing column indices with nonzero values.
pub type SparseVec = Vec<(usize, CycloNumber)>;

/// Incrementally maintained reduced row echelon form of a growing row span.
///
/// Rows are stored by pivot column and are always fully reduced against each
/// other, so reducing a candidate against the structure is a short loop over
/// its nonzeros and insertion keeps all rows short.
pub struct SparseRref {
    order: u32,
    cols: usize,
    /// pivot column → fully reduced row with leading 1 at that column.
    rows: BTreeMap<usize, SparseVec>,
}

impl SparseRref {
    pub fn new(order: u32, cols: usize) -> SparseRref {
        SparseRref { order, cols, rows: BTreeMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    pub fn row_for_pivot(&self, col: usize) -> Option<&SparseVec> {
        self.rows.get(&col)
    }

    /// Fully reduces `v` against the current structure (in place semantics,
    /// returns the residue). The residue has no support on pivot columns.
    pub fn reduce(&self, v: SparseVec) -> SparseVec {
        let mut acc: BTreeMap<usize, CycloNumber> = v.into_iter().collect();
        loop {
            let hit = acc
                .iter()
                .find_map(|(c, x)| {
                    if x.is_zero() {
                        return None;
                    }
                    self.rows.get(c).map(|row| (*c, row))
                });
            let Some((col, row)) = hit else { break };
            let coef = acc.remove(&col).unwrap();
            for (c, x) in row.iter().skip(1) {
                let t = coef.mul_ref(x);
                match acc.entry(*c) {
                    std::collections::btree_map::Entry::Occupied(mut e) => {
                        *e.get_mut() -= &t;
                        if e.get().is_zero() {
                            e.remove();
                        }
                    }
                    std::collections::btree_map::Entry::Vacant(e) => {
                        e.insert(-t);
                    }
                }
            }
        }
        acc.into_iter().filter(|(_, x)| !x.is_zero()).collect()
    }

    /// Reduces `v`; if a nonzero residue remains, normalizes it, inserts it
    /// as a new row, eliminates its pivot from all existing rows, and
    /// returns true. Returns false when `v` was already in the span.
    pub fn insert(&mut self, v: SparseVec) -> Result<bool> {
        let residue = self.reduce(v);
        let Some((pivot, lead)) = residue.first().cloned() else {
            return Ok(false);
        };
        let inv = lead.inverse()?;
        let row: SparseVec = residue
            .into_iter()
            .map(|(c, x)| (c, x.mul_ref(&inv)))
            .collect();
        // Eliminate the new pivot from every stored row that touches it.
        let touching: Vec<usize> = self
            .rows
            .iter()
            .filter(|(_, r)| r.iter().any(|(c, _)| *c == pivot))
            .map(|(p, _)| *p)
            .collect();
        for p in touching {
            let old = self.rows.remove(&p).unwrap();
            let coef = old
                .iter()
                .find(|(c, _)| *c == pivot)
                .map(|(_, x)| x.clone())
                .unwrap();
            let mut acc: BTreeMap<usize, CycloNumber> = old.into_iter().collect();
            acc.remove(&pivot);
            for (c, x) in row.iter().skip(1) {
                let t = coef.mul_ref(x);
                match acc.entry(*c) {
                    std::collections::btree_map::Entry::Occupied(mut e) => {
                        *e.get_mut() -= &t;
                        if e.get().is_zero() {
                            e.remove();
                        }
                    }
                    std::collections::btree_map::Entry::Vacant(e) => {
                        e.insert(-t);
                    }
                }
            }
            let new_row: SparseVec = acc.into_iter().filter(|(_, x)| !x.is_zero()).collect();
            self.rows.insert(p, new_row);
        }
        self.rows.insert(pivot, row);
        Ok(true)
    }

    /// True iff `v` lies in the row span.
    pub fn contains(&self, v: SparseVec) -> bool {
        self.reduce(v).is_empty()
    }

    /// Dense snapshot of the structure, rows ordered by pivot column.
    pub fn to_dense(&self) -> ExactMatrix {
        let mut m = ExactMatrix::zero(self.order, self.rows.len(), self.cols);
        for (i, row) in self.rows.values().enumerate() {
            for (c, x) in row {
                *m.at_mut(i, *c) = x.clone();
            }
        }
        m
    }
}
