//! The graded weak bialgebra on path pairs of a dimension graph.
//!
//! Basis elements are [p|q]_m with p, q paths of equal length m. The
//! algebra multiplies by concatenation gated on matching endpoints, the
//! coalgebra splits along all middle paths of the same length:
//!   μ([p|q]·[r|s]) = δ_{σ(p),τ(r)} δ_{σ(q),τ(s)} [pr|qs]
//!   Δ([p|q]_m)    = Σ_{r of length m} [p|r] ⊗ [r|q]
//!   ε([p|q]_m)    = δ_{pq},   η(1) = Σ_{j,ℓ} [j|ℓ]₀.
//! The algebra is infinite dimensional, so every element carries a degree
//! cap; operations that would pass the cap fail loudly instead of
//! truncating.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cyclo::CycloNumber;
use crate::error::{Result, WharfError};
use crate::graph::{DimensionGraph, Path};
use crate::linalg::ExactMatrix;

/// (degree, p, q); the key of one basis monomial.
pub type BasisKey = (usize, Path, Path);

#[derive(Clone, PartialEq, Eq)]
pub struct WbaElement {
    order: u32,
    cap: usize,
    terms: BTreeMap<BasisKey, CycloNumber>,
}

impl WbaElement {
    pub fn zero(order: u32, cap: usize) -> WbaElement {
        WbaElement { order, cap, terms: BTreeMap::new() }
    }

    pub fn monomial(
        order: u32,
        cap: usize,
        p: Path,
        q: Path,
        c: CycloNumber,
    ) -> Result<WbaElement> {
        if p.len() != q.len() {
            return Err(WharfError::Invalid(format!(
                "path pair of unequal lengths {} vs {}",
                p.len(),
                q.len()
            )));
        }
        if p.len() > cap {
            return Err(WharfError::DegreeOverflow { requested: p.len(), cap });
        }
        let mut e = WbaElement::zero(order, cap);
        e.add_term((p.len(), p, q), c);
        Ok(e)
    }

    pub fn basis(order: u32, cap: usize, p: Path, q: Path) -> Result<WbaElement> {
        let one = CycloNumber::one(order);
        WbaElement::monomial(order, cap, p, q, one)
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BasisKey, &CycloNumber)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, key: &BasisKey) -> CycloNumber {
        self.terms.get(key).cloned().unwrap_or_else(|| CycloNumber::zero(self.order))
    }

    pub fn add_term(&mut self, key: BasisKey, c: CycloNumber) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn add(&self, other: &WbaElement) -> WbaElement {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &WbaElement) -> WbaElement {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), -c);
        }
        out
    }

    pub fn scale(&self, c: &CycloNumber) -> WbaElement {
        let mut out = WbaElement::zero(self.order, self.cap);
        for (k, x) in &self.terms {
            out.add_term(k.clone(), x.mul_ref(c));
        }
        out
    }

    /// Largest degree with a nonzero term.
    pub fn top_degree(&self) -> Option<usize> {
        self.terms.keys().map(|(m, _, _)| *m).max()
    }

    pub fn to_json(&self, g: &DimensionGraph) -> WbaDto {
        WbaDto {
            terms: self
                .terms
                .iter()
                .map(|((m, p, q), c)| TermDto {
                    m: *m as u64,
                    p: path_to_seq(g, p),
                    q: path_to_seq(g, q),
                    c: c.clone(),
                })
                .collect(),
        }
    }

    pub fn from_json(
        g: &DimensionGraph,
        order: u32,
        cap: usize,
        dto: &WbaDto,
    ) -> Result<WbaElement> {
        let mut e = WbaElement::zero(order, cap);
        for t in &dto.terms {
            let p = path_from_seq(g, &t.p)?;
            let q = path_from_seq(g, &t.q)?;
            if p.len() != t.m as usize || q.len() != t.m as usize {
                return Err(WharfError::Invalid("term degree disagrees with paths".into()));
            }
            if t.m as usize > cap {
                return Err(WharfError::DegreeOverflow { requested: t.m as usize, cap });
            }
            if t.c.order() != order {
                return Err(WharfError::OrderMismatch(order, t.c.order()));
            }
            e.add_term((t.m as usize, p, q), t.c.clone());
        }
        Ok(e)
    }
}

impl std::fmt::Debug for WbaElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((m, p, q), c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})[{:?}|{:?}]_{}", c, p, q, m)?;
        }
        Ok(())
    }
}

/// Serialized paths list the vertex sequence; graphs with parallel edges
/// interleave edge ids: [v0, id1, v1, id2, v2, ...].
fn path_to_seq(g: &DimensionGraph, p: &Path) -> Vec<u64> {
    if g.is_simple() {
        p.vertices().iter().map(|&v| v as u64).collect()
    } else {
        let mut seq = vec![p.vertices()[0] as u64];
        for (k, &e) in p.edge_indices().iter().enumerate() {
            seq.push(g.edges()[e as usize].id as u64);
            seq.push(p.vertices()[k + 1] as u64);
        }
        seq
    }
}

fn path_from_seq(g: &DimensionGraph, seq: &[u64]) -> Result<Path> {
    if g.is_simple() {
        let verts: Vec<usize> = seq.iter().map(|&v| v as usize).collect();
        g.path_from_vertices(&verts)
    } else {
        if seq.is_empty() || seq.len() % 2 == 0 {
            return Err(WharfError::Invalid("interleaved path needs odd length".into()));
        }
        let verts: Vec<usize> = seq.iter().step_by(2).map(|&v| v as usize).collect();
        let ids: Vec<u32> = seq.iter().skip(1).step_by(2).map(|&v| v as u32).collect();
        let mut vs: Vec<u16> = vec![verts[0] as u16];
        let mut es: Vec<u32> = Vec::with_capacity(ids.len());
        for (k, &id) in ids.iter().enumerate() {
            // the step from vertex verts[k] to verts[k+1] in the sequence
            // traverses the graph edge verts[k+1] → verts[k]
            let (u, w) = (verts[k + 1], verts[k]);
            let idx = g
                .edges()
                .iter()
                .position(|e| e.src as usize == u && e.tgt as usize == w && e.id == id)
                .ok_or_else(|| WharfError::NotAPath(verts.clone()))?;
            vs.push(u as u16);
            es.push(idx as u32);
        }
        Ok(Path::from_raw(vs, es))
    }
}

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct WbaDto {
    pub terms: Vec<TermDto>,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct TermDto {
    pub m: u64,
    pub p: Vec<u64>,
    pub q: Vec<u64>,
    pub c: CycloNumber,
}

/// η(1): the sum of all degree-0 basis elements.
pub fn unit(g: &DimensionGraph, order: u32, cap: usize) -> WbaElement {
    let mut e = WbaElement::zero(order, cap);
    let one = CycloNumber::one(order);
    for j in 0..g.vertex_count() {
        for l in 0..g.vertex_count() {
            e.add_term((0, Path::vertex(j), Path::vertex(l)), one.clone());
        }
    }
    e
}

/// Bilinear product; degrees add, endpoints gate composability.
pub fn multiply(a: &WbaElement, b: &WbaElement) -> Result<WbaElement> {
    if a.order != b.order {
        return Err(WharfError::OrderMismatch(a.order, b.order));
    }
    let cap = a.cap.min(b.cap);
    let mut out = WbaElement::zero(a.order, cap);
    for ((ma, pa, qa), ca) in &a.terms {
        for ((mb, pb, qb), cb) in &b.terms {
            if pa.sigma() != pb.tau() || qa.sigma() != qb.tau() {
                continue;
            }
            let m = ma + mb;
            if m > cap {
                return Err(WharfError::DegreeOverflow { requested: m, cap });
            }
            let p = pa.concat(pb).unwrap();
            let q = qa.concat(qb).unwrap();
            out.add_term((m, p, q), ca.mul_ref(cb));
        }
    }
    Ok(out)
}

/// Element of H ⊗ H with sparse storage.
#[derive(Clone, PartialEq, Eq)]
pub struct TensorSquareElement {
    order: u32,
    cap: usize,
    terms: BTreeMap<(BasisKey, BasisKey), CycloNumber>,
}

impl TensorSquareElement {
    pub fn zero(order: u32, cap: usize) -> TensorSquareElement {
        TensorSquareElement { order, cap, terms: BTreeMap::new() }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(BasisKey, BasisKey), &CycloNumber)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, key: (BasisKey, BasisKey), c: CycloNumber) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn sub(&self, other: &TensorSquareElement) -> TensorSquareElement {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), -c);
        }
        out
    }

    /// σ ∘ self: swaps the legs.
    pub fn flip(&self) -> TensorSquareElement {
        let mut out = TensorSquareElement::zero(self.order, self.cap);
        for ((a, b), c) in &self.terms {
            out.add_term((b.clone(), a.clone()), c.clone());
        }
        out
    }
}

impl std::fmt::Debug for TensorSquareElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (((_, p, q), (_, r, s)), c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})[{:?}|{:?}]⊗[{:?}|{:?}]", c, p, q, r, s)?;
        }
        Ok(())
    }
}

/// Δ: splits each [p|q]_m along every middle path of length m.
pub fn comultiply(g: &DimensionGraph, a: &WbaElement) -> TensorSquareElement {
    let mut out = TensorSquareElement::zero(a.order, a.cap);
    let mut middles: BTreeMap<usize, Vec<Path>> = BTreeMap::new();
    for ((m, p, q), c) in &a.terms {
        let rs = middles.entry(*m).or_insert_with(|| g.enumerate_paths(*m));
        for r in rs.iter() {
            out.add_term(
                ((*m, p.clone(), r.clone()), (*m, r.clone(), q.clone())),
                c.clone(),
            );
        }
    }
    out
}

/// ε: sums the coefficients of diagonal pairs.
pub fn counit(a: &WbaElement) -> CycloNumber {
    let mut acc = CycloNumber::zero(a.order);
    for ((_, p, q), c) in &a.terms {
        if p == q {
            acc += c;
        }
    }
    acc
}

/// ε_s(h) = Σ 1′ ε(h 1″); on the basis: ε_s([p|q]_m) = δ_{pq} Σ_j [j|σ(p)]₀.
pub fn counital_source(g: &DimensionGraph, a: &WbaElement) -> WbaElement {
    let mut out = WbaElement::zero(a.order, a.cap);
    for ((_, p, q), c) in &a.terms {
        if p != q {
            continue;
        }
        for j in 0..g.vertex_count() {
            out.add_term(
                (0, Path::vertex(j), Path::vertex(p.sigma())),
                c.clone(),
            );
        }
    }
    out
}

/// ε_t(h) = Σ ε(1′ h) 1″; on the basis: ε_t([p|q]_m) = δ_{pq} Σ_j [τ(q)|j]₀.
pub fn counital_target(g: &DimensionGraph, a: &WbaElement) -> WbaElement {
    let mut out = WbaElement::zero(a.order, a.cap);
    for ((_, p, q), c) in &a.terms {
        if p != q {
            continue;
        }
        for j in 0..g.vertex_count() {
            out.add_term(
                (0, Path::vertex(q.tau()), Path::vertex(j)),
                c.clone(),
            );
        }
    }
    out
}

/// The idempotent on k𝒢^m ⊗ k𝒢^ℓ projecting onto composable pairs,
/// as a matrix over the basis 𝒢^m × 𝒢^ℓ in enumeration order.
pub fn truncation_idempotent(
    g: &DimensionGraph,
    order: u32,
    m: usize,
    l: usize,
) -> ExactMatrix {
    let pm = g.enumerate_paths(m);
    let pl = g.enumerate_paths(l);
    let dim = pm.len() * pl.len();
    let mut mat = ExactMatrix::zero(order, dim, dim);
    for (i, p) in pm.iter().enumerate() {
        for (j, q) in pl.iter().enumerate() {
            if p.sigma() == q.tau() {
                let idx = i * pl.len() + j;
                *mat.at_mut(idx, idx) = CycloNumber::one(order);
            }
        }
    }
    mat
}
