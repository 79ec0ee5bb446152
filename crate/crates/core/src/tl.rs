//! Exact Temperley-Lieb diagram calculus: planar diagrams, Jones-Wenzl
//! projectors, theta and tetrahedral networks, quantum 6j-symbols, and the
//! diagrammatic braiding matrix on length-two paths of the level graph.
//!
//! Conventions. Morphisms run bottom to top; `compose(f, g)` stacks g on
//! top of f (so it is g after f). Every closed loop evaluates to
//! delta = -[2]. The crossing resolves as A*(cup-cap) + A^{-1}*(identity),
//! and the braiding matrix carries one global factor q^{-1} relative to
//! that literal resolution; `raw_pairing_matrix` exposes the unnormalized
//! pairing so the relation between the two is pinned by a test rather
//! than folded in silently.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cyclo::{CycloNumber, FieldContext};
use crate::error::{Result, WharfError};
use crate::graph::{sl2_admissible, sl2_dimension_graph, Path};

/// A planar tangle diagram: `bottom` points below, `top` points above,
/// joined by a non-crossing perfect matching. Point ids run left to right
/// along the bottom (0..bottom), then left to right along the top.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlanarDiagram {
    bottom: usize,
    top: usize,
    pairing: Vec<usize>,
}

impl PlanarDiagram {
    pub fn new(bottom: usize, top: usize, pairing: Vec<usize>) -> Result<PlanarDiagram> {
        let n = bottom + top;
        if pairing.len() != n {
            return Err(WharfError::Invalid(format!(
                "pairing length {} for {} boundary points",
                pairing.len(),
                n
            )));
        }
        for (i, &j) in pairing.iter().enumerate() {
            if j >= n || j == i || pairing[j] != i {
                return Err(WharfError::Invalid(
                    "pairing is not a fixed-point-free involution".into(),
                ));
            }
        }
        let d = PlanarDiagram { bottom, top, pairing };
        if !d.is_planar() {
            return Err(WharfError::Invalid("pairing is not planar".into()));
        }
        Ok(d)
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn pairing(&self) -> &[usize] {
        &self.pairing
    }

    /// Boundary position on the disk: bottom left-to-right, then top
    /// right-to-left. The matching is planar iff it is non-crossing in
    /// this circular order.
    fn circle_pos(&self, p: usize) -> usize {
        if p < self.bottom {
            p
        } else {
            self.bottom + self.top - 1 - (p - self.bottom)
        }
    }

    fn is_planar(&self) -> bool {
        let n = self.bottom + self.top;
        let mut partner_at = vec![usize::MAX; n];
        for p in 0..n {
            partner_at[self.circle_pos(p)] = self.circle_pos(self.pairing[p]);
        }
        let mut stack = Vec::new();
        for pos in 0..n {
            let q = partner_at[pos];
            if q > pos {
                stack.push(q);
            } else if stack.pop() != Some(pos) {
                return false;
            }
        }
        stack.is_empty()
    }

    pub fn identity(n: usize) -> PlanarDiagram {
        let pairing = (0..2 * n).map(|i| (i + n) % (2 * n)).collect();
        PlanarDiagram { bottom: n, top: n, pairing }
    }

    /// The Temperley-Lieb generator e_i on n strands: strands i, i+1 are
    /// capped below and cupped above, all others pass through.
    pub fn generator(n: usize, i: usize) -> Result<PlanarDiagram> {
        if i + 1 >= n {
            return Err(WharfError::Invalid(format!("generator {} needs {} strands", i, n)));
        }
        let mut pairing = vec![0; 2 * n];
        for s in 0..n {
            if s == i || s == i + 1 {
                continue;
            }
            pairing[s] = n + s;
            pairing[n + s] = s;
        }
        pairing[i] = i + 1;
        pairing[i + 1] = i;
        pairing[n + i] = n + i + 1;
        pairing[n + i + 1] = n + i;
        Ok(PlanarDiagram { bottom: n, top: n, pairing })
    }

    /// Nested arcs creating 2k top points from nothing; arc depth grows
    /// inward (point j joins point 2k-1-j).
    pub fn rainbow(k: usize) -> PlanarDiagram {
        let pairing = (0..2 * k).map(|j| 2 * k - 1 - j).collect();
        PlanarDiagram { bottom: 0, top: 2 * k, pairing }
    }

    /// Mirror across the horizontal axis: bottom and top swap roles.
    pub fn flip(&self) -> PlanarDiagram {
        let (b, t) = (self.bottom, self.top);
        let relabel = |p: usize| if p < b { t + p } else { p - b };
        let mut pairing = vec![0; b + t];
        for p in 0..b + t {
            pairing[relabel(p)] = relabel(self.pairing[p]);
        }
        PlanarDiagram { bottom: t, top: b, pairing }
    }

    /// Side-by-side juxtaposition.
    pub fn tensor(&self, other: &PlanarDiagram) -> PlanarDiagram {
        let (b1, t1, b2, t2) = (self.bottom, self.top, other.bottom, other.top);
        let map1 = |p: usize| if p < b1 { p } else { b1 + b2 + (p - b1) };
        let map2 = |p: usize| if p < b2 { b1 + p } else { b1 + b2 + t1 + (p - b2) };
        let mut pairing = vec![0; b1 + b2 + t1 + t2];
        for p in 0..b1 + t1 {
            pairing[map1(p)] = map1(self.pairing[p]);
        }
        for p in 0..b2 + t2 {
            pairing[map2(p)] = map2(other.pairing[p]);
        }
        PlanarDiagram { bottom: b1 + b2, top: t1 + t2, pairing }
    }

    /// Stacks `above` on top of self (self's top glued to above's bottom).
    /// Returns the composite diagram and the number of closed loops formed.
    pub fn compose(&self, above: &PlanarDiagram) -> Result<(PlanarDiagram, usize)> {
        if self.top != above.bottom {
            return Err(WharfError::StrandMismatch {
                expected: self.top,
                got: above.bottom,
            });
        }
        let (b, m, t) = (self.bottom, self.top, above.top);
        // walk from a boundary point through alternating interface hops
        let mut visited = vec![false; m];
        let walk = |start_in_f: bool, start: usize, visited: &mut Vec<bool>| -> usize {
            let mut in_f = start_in_f;
            let mut p = start;
            loop {
                let partner = if in_f { self.pairing[p] } else { above.pairing[p] };
                if in_f {
                    if partner < b {
                        return partner; // final bottom point
                    }
                    let k = partner - b;
                    visited[k] = true;
                    in_f = false;
                    p = k;
                } else {
                    if partner >= m {
                        return b + (partner - m); // final top point
                    }
                    visited[partner] = true;
                    in_f = true;
                    p = b + partner;
                }
            }
        };
        let mut pairing = vec![usize::MAX; b + t];
        for i in 0..b {
            if pairing[i] != usize::MAX {
                continue;
            }
            let end = walk(true, i, &mut visited);
            pairing[i] = end;
            pairing[end] = i;
        }
        for j in 0..t {
            if pairing[b + j] != usize::MAX {
                continue;
            }
            let end = walk(false, m + j, &mut visited);
            pairing[b + j] = end;
            pairing[end] = b + j;
        }
        let mut loops = 0;
        for k in 0..m {
            if visited[k] {
                continue;
            }
            loops += 1;
            let mut in_f = true;
            let mut p = b + k;
            loop {
                let partner = if in_f { self.pairing[p] } else { above.pairing[p] };
                let k2 = if in_f { partner - b } else { partner };
                if visited[k2] {
                    break;
                }
                visited[k2] = true;
                in_f = !in_f;
                p = if in_f { b + k2 } else { k2 };
            }
        }
        Ok((PlanarDiagram { bottom: b, top: t, pairing }, loops))
    }

    /// Markov closure of a square diagram: top i joins bottom i around the
    /// side; returns the total loop count.
    pub fn closure_loops(&self) -> Result<usize> {
        if self.bottom != self.top {
            return Err(WharfError::StrandMismatch {
                expected: self.bottom,
                got: self.top,
            });
        }
        let n = self.bottom;
        let mut visited = vec![false; 2 * n];
        let mut loops = 0;
        for start in 0..2 * n {
            if visited[start] {
                continue;
            }
            loops += 1;
            let mut p = start;
            while !visited[p] {
                visited[p] = true;
                let q = self.pairing[p];
                visited[q] = true;
                p = if q < n { q + n } else { q - n };
            }
        }
        Ok(loops)
    }
}

/// All planar diagrams with the given boundary, in lexicographic pairing
/// order. Counts are Catalan numbers when bottom + top is even.
pub fn enumerate_diagrams(bottom: usize, top: usize) -> Vec<PlanarDiagram> {
    let n = bottom + top;
    if n % 2 != 0 {
        return Vec::new();
    }
    // positions in circular order; recursion splits the arc at the match
    fn rec(points: &[usize], out: &mut Vec<Vec<(usize, usize)>>, acc: &mut Vec<(usize, usize)>) {
        if points.is_empty() {
            out.push(acc.clone());
            return;
        }
        let first = points[0];
        for k in (1..points.len()).step_by(2) {
            acc.push((first, points[k]));
            let inner: Vec<usize> = points[1..k].to_vec();
            let outer: Vec<usize> = points[k + 1..].to_vec();
            // fully split recursion: match inner then outer
            fn rec2(
                segs: &[Vec<usize>],
                idx: usize,
                out: &mut Vec<Vec<(usize, usize)>>,
                acc: &mut Vec<(usize, usize)>,
            ) {
                if idx == segs.len() {
                    out.push(acc.clone());
                    return;
                }
                let seg = &segs[idx];
                if seg.is_empty() {
                    rec2(segs, idx + 1, out, acc);
                    return;
                }
                let first = seg[0];
                for k in (1..seg.len()).step_by(2) {
                    acc.push((first, seg[k]));
                    let mut next = segs.to_vec();
                    next[idx] = seg[1..k].to_vec();
                    next.insert(idx + 1, seg[k + 1..].to_vec());
                    rec2(&next, idx, out, acc);
                    acc.pop();
                }
            }
            rec2(&[inner, outer], 0, out, acc);
            acc.pop();
        }
    }
    let dummy = PlanarDiagram { bottom, top, pairing: Vec::new() };
    let circle: Vec<usize> = {
        let mut inv = vec![0; n];
        for p in 0..n {
            inv[dummy.circle_pos(p)] = p;
        }
        inv
    };
    let mut matchings = Vec::new();
    rec(&circle, &mut matchings, &mut Vec::new());
    let mut result: Vec<PlanarDiagram> = matchings
        .into_iter()
        .map(|pairs| {
            let mut pairing = vec![0; n];
            for (a, b) in pairs {
                pairing[a] = b;
                pairing[b] = a;
            }
            PlanarDiagram { bottom, top, pairing }
        })
        .collect();
    result.sort();
    result.dedup();
    result
}

/// A formal linear combination of planar diagrams with a common boundary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TlElement {
    order: u32,
    bottom: usize,
    top: usize,
    terms: BTreeMap<PlanarDiagram, CycloNumber>,
}

impl TlElement {
    pub fn zero(order: u32, bottom: usize, top: usize) -> TlElement {
        TlElement { order, bottom, top, terms: BTreeMap::new() }
    }

    pub fn from_diagram(order: u32, d: PlanarDiagram) -> TlElement {
        let mut terms = BTreeMap::new();
        let (bottom, top) = (d.bottom, d.top);
        terms.insert(d, CycloNumber::one(order));
        TlElement { order, bottom, top, terms }
    }

    pub fn identity(order: u32, n: usize) -> TlElement {
        TlElement::from_diagram(order, PlanarDiagram::identity(n))
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn terms(&self) -> &BTreeMap<PlanarDiagram, CycloNumber> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, d: PlanarDiagram, c: &CycloNumber) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(d) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &TlElement) -> Result<TlElement> {
        if self.bottom != other.bottom || self.top != other.top {
            return Err(WharfError::StrandMismatch {
                expected: self.bottom + self.top,
                got: other.bottom + other.top,
            });
        }
        let mut out = self.clone();
        for (d, c) in &other.terms {
            out.add_term(d.clone(), c);
        }
        Ok(out)
    }

    pub fn scale(&self, c: &CycloNumber) -> TlElement {
        if c.is_zero() {
            return TlElement::zero(self.order, self.bottom, self.top);
        }
        let terms = self.terms.iter().map(|(d, x)| (d.clone(), x.mul_ref(c))).collect();
        TlElement { order: self.order, bottom: self.bottom, top: self.top, terms }
    }

    pub fn flip(&self) -> TlElement {
        let terms = self.terms.iter().map(|(d, c)| (d.flip(), c.clone())).collect();
        TlElement { order: self.order, bottom: self.top, top: self.bottom, terms }
    }

    pub fn tensor(&self, other: &TlElement) -> TlElement {
        let mut out = TlElement::zero(
            self.order,
            self.bottom + other.bottom,
            self.top + other.top,
        );
        for (d1, c1) in &self.terms {
            for (d2, c2) in &other.terms {
                out.add_term(d1.tensor(d2), &c1.mul_ref(c2));
            }
        }
        out
    }

    /// Stacks `above` on top of self; each closed loop contributes a
    /// factor delta = -[2].
    pub fn compose(&self, ctx: &FieldContext, above: &TlElement) -> Result<TlElement> {
        if self.top != above.bottom {
            return Err(WharfError::StrandMismatch {
                expected: self.top,
                got: above.bottom,
            });
        }
        let delta = loop_value(ctx);
        let mut out = TlElement::zero(self.order, self.bottom, above.top);
        for (d1, c1) in &self.terms {
            for (d2, c2) in &above.terms {
                let (d, loops) = d1.compose(d2)?;
                let mut c = c1.mul_ref(c2);
                for _ in 0..loops {
                    c = c.mul_ref(&delta);
                }
                out.add_term(d, &c);
            }
        }
        Ok(out)
    }

    /// Markov trace: close every strand around the side; loops evaluate
    /// to delta = -[2].
    pub fn closure(&self, ctx: &FieldContext) -> Result<CycloNumber> {
        let delta = loop_value(ctx);
        let mut acc = CycloNumber::zero(self.order);
        for (d, c) in &self.terms {
            let loops = d.closure_loops()?;
            let mut v = c.clone();
            for _ in 0..loops {
                v = v.mul_ref(&delta);
            }
            acc += &v;
        }
        Ok(acc)
    }
}

/// Value of one closed loop: -[2] = -(q + q^{-1}).
pub fn loop_value(ctx: &FieldContext) -> CycloNumber {
    -ctx.quantum_integer(2)
}

/// Algebra product in TL_n (square diagrams only).
pub fn tl_multiply(ctx: &FieldContext, a: &TlElement, b: &TlElement) -> Result<TlElement> {
    if a.bottom != a.top || b.bottom != b.top || a.bottom != b.bottom {
        return Err(WharfError::StrandMismatch {
            expected: a.bottom,
            got: b.bottom,
        });
    }
    b.compose(ctx, a)
}

/// The Jones-Wenzl projector P_n. Requires n <= r-2 so that every
/// quantum integer in the recursion is invertible; n = 0 is the empty
/// diagram.
pub fn jones_wenzl(ctx: &FieldContext, n: usize) -> Result<TlElement> {
    if n + 2 > ctx.level() as usize {
        return Err(WharfError::VanishingQuantumInteger(n as i64 + 1));
    }
    let order = ctx.order();
    let mut p = TlElement::identity(order, 0);
    for k in 1..=n {
        // P_k = P_{k-1} x 1 + ([k-1]/[k]) (P_{k-1} x 1) e_{k-1} (P_{k-1} x 1)
        let padded = p.tensor(&TlElement::identity(order, 1));
        if k == 1 {
            p = padded;
            continue;
        }
        let e = TlElement::from_diagram(order, PlanarDiagram::generator(k, k - 2)?);
        let hook = padded.compose(ctx, &e)?.compose(ctx, &padded)?;
        let coeff = ctx
            .quantum_integer(k as i64 - 1)
            .mul_ref(&ctx.quantum_integer(k as i64).inverse()?);
        p = padded.add(&hook.scale(&coeff))?;
    }
    Ok(p)
}

/// Quantum dimension of the n-th simple object: (-1)^n [n+1].
pub fn quantum_dim(ctx: &FieldContext, n: usize) -> Result<CycloNumber> {
    if n + 2 > ctx.level() as usize {
        return Err(WharfError::FusionIndexOutOfRange(n, ctx.level() as usize - 2));
    }
    let v = ctx.quantum_integer(n as i64 + 1);
    Ok(if n % 2 == 0 { v } else { -&v })
}

/// Admissibility of a triple of labels: parity, triangle inequality, and
/// the level bound a+b+c <= 2r-4.
pub fn admissible(ctx: &FieldContext, a: usize, b: usize, c: usize) -> bool {
    sl2_admissible(ctx.level() as i64 - 2, a as i64, b as i64, c as i64)
}

/// The trivalent vertex map V_source -> V_left x V_right: the source
/// projector, a nest of arcs splitting the strands, and the two target
/// projectors. Zero for inadmissible triples.
pub fn trivalent(
    ctx: &FieldContext,
    left: usize,
    right: usize,
    source: usize,
) -> Result<TlElement> {
    let order = ctx.order();
    if !admissible(ctx, left, right, source) {
        return Ok(TlElement::zero(order, source, left + right));
    }
    let alpha = (left + source - right) / 2;
    let gamma = (left + right - source) / 2;
    let beta = (right + source - left) / 2;
    let p_src = jones_wenzl(ctx, source)?;
    let split = TlElement::identity(order, alpha)
        .tensor(&TlElement::from_diagram(order, PlanarDiagram::rainbow(gamma)))
        .tensor(&TlElement::identity(order, beta));
    let targets = jones_wenzl(ctx, left)?.tensor(&jones_wenzl(ctx, right)?);
    p_src.compose(ctx, &split)?.compose(ctx, &targets)
}

/// The theta network: two trivalent vertices joined along all three legs.
/// Zero for inadmissible triples, nonzero for all admissible ones.
pub fn theta(ctx: &FieldContext, a: usize, b: usize, c: usize) -> Result<CycloNumber> {
    if !admissible(ctx, a, b, c) {
        return Ok(CycloNumber::zero(ctx.order()));
    }
    let y = trivalent(ctx, a, b, c)?;
    y.compose(ctx, &y.flip())?.closure(ctx)
}

/// The tetrahedral network with vertices (a,b,j), (c,d,j), (b,c,i),
/// (a,d,i): the closed pairing of the horizontal j-tree against the
/// vertical i-tree of the four-point intertwiner space.
pub fn tet(
    ctx: &FieldContext,
    a: usize,
    b: usize,
    i: usize,
    c: usize,
    d: usize,
    j: usize,
) -> Result<CycloNumber> {
    let order = ctx.order();
    for (x, y, z) in [(a, b, j), (c, d, j), (b, c, i), (a, d, i)] {
        if !admissible(ctx, x, y, z) {
            return Ok(CycloNumber::zero(order));
        }
    }
    // H: a+d -> b+c through the horizontal j-channel
    let w = trivalent(ctx, b, j, a)?; // V_a -> V_b x V_j
    let e = trivalent(ctx, j, d, c)?.flip(); // V_j x V_d -> V_c
    let h = w
        .tensor(&TlElement::identity(order, d))
        .compose(ctx, &TlElement::identity(order, b).tensor(&e))?;
    // I: a+d -> b+c through the vertical i-channel
    let iv = trivalent(ctx, a, d, i)?
        .flip()
        .compose(ctx, &trivalent(ctx, b, c, i)?)?;
    h.compose(ctx, &iv.flip())?.closure(ctx)
}

/// The quantum 6j-symbol: Delta_i x tetrahedron / (theta(a,d,i) theta(b,c,i)).
pub fn six_j(
    ctx: &FieldContext,
    a: usize,
    b: usize,
    i: usize,
    c: usize,
    d: usize,
    j: usize,
) -> Result<CycloNumber> {
    let order = ctx.order();
    for (x, y, z) in [(a, b, j), (c, d, j), (b, c, i), (a, d, i)] {
        if !admissible(ctx, x, y, z) {
            return Ok(CycloNumber::zero(order));
        }
    }
    let t = tet(ctx, a, b, i, c, d, j)?;
    let num = quantum_dim(ctx, i)?.mul_ref(&t);
    let den = theta(ctx, a, d, i)?.mul_ref(&theta(ctx, b, c, i)?);
    Ok(num.mul_ref(&den.inverse()?))
}

/// Braiding matrix on length-two paths: sparse map (p, q) -> R_{p;q},
/// zero unless the endpoints of p and q agree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RMatrix {
    r: u32,
    entries: BTreeMap<(Path, Path), CycloNumber>,
}

impl RMatrix {
    pub fn new(r: u32) -> RMatrix {
        RMatrix { r, entries: BTreeMap::new() }
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn entries(&self) -> &BTreeMap<(Path, Path), CycloNumber> {
        &self.entries
    }

    pub fn coefficient(&self, p: &Path, q: &Path) -> Option<&CycloNumber> {
        self.entries.get(&(p.clone(), q.clone()))
    }

    pub fn insert(&mut self, p: Path, q: Path, c: CycloNumber) {
        if !c.is_zero() {
            self.entries.insert((p, q), c);
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let entries = self
            .entries
            .iter()
            .map(|((p, q), c)| REntryDto {
                p: p.vertices().to_vec(),
                q: q.vertices().to_vec(),
                c: c.clone(),
            })
            .collect();
        serde_json::to_string(&RMatrixDto { r: self.r, entries })
            .map_err(|e| WharfError::Serde(e.to_string()))
    }

    pub fn from_json(ctx: &FieldContext, s: &str) -> Result<RMatrix> {
        let dto: RMatrixDto =
            serde_json::from_str(s).map_err(|e| WharfError::Serde(e.to_string()))?;
        let g = sl2_dimension_graph(dto.r)?;
        let mut out = RMatrix::new(dto.r);
        for e in dto.entries {
            if e.c.order() != ctx.order() {
                return Err(WharfError::OrderMismatch(e.c.order(), ctx.order()));
            }
            let p = g.path_from_vertices(&e.p.iter().map(|&v| v as usize).collect::<Vec<_>>())?;
            let q = g.path_from_vertices(&e.q.iter().map(|&v| v as usize).collect::<Vec<_>>())?;
            out.insert(p, q, e.c);
        }
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
struct RMatrixDto {
    r: u32,
    entries: Vec<REntryDto>,
}

#[derive(Serialize, Deserialize)]
struct REntryDto {
    p: Vec<u16>,
    q: Vec<u16>,
    c: CycloNumber,
}

/// The path tree of a length-two path (j0, j1, j2): the composite
/// V_{j2} -> V_{j1} x V_1 -> V_{j0} x V_1 x V_1 of two vertex maps.
fn path_tree(ctx: &FieldContext, p: &Path) -> Result<TlElement> {
    let v = p.vertices();
    let (j0, j1, j2) = (v[0] as usize, v[1] as usize, v[2] as usize);
    let lower = trivalent(ctx, j1, 1, j2)?;
    let upper = trivalent(ctx, j0, 1, j1)?.tensor(&TlElement::identity(ctx.order(), 1));
    lower.compose(ctx, &upper)
}

/// The crossing on two strands: A (cup-cap) + A^{-1} (identity).
fn crossing(ctx: &FieldContext, inverse: bool) -> Result<TlElement> {
    let order = ctx.order();
    let e = TlElement::from_diagram(order, PlanarDiagram::generator(2, 0)?);
    let id = TlElement::identity(order, 2);
    let (ca, ci) = if inverse {
        (ctx.q_half_pow(-1), ctx.q_half_pow(1))
    } else {
        (ctx.q_half_pow(1), ctx.q_half_pow(-1))
    };
    e.scale(&ca).add(&id.scale(&ci))
}

/// Matrix of the literal crossing resolution in the path-tree basis,
/// without the global normalization: entry (p, q) is the coefficient of
/// the tree of p in the crossing applied atop the tree of q.
pub fn raw_pairing_matrix(ctx: &FieldContext, inverse: bool) -> Result<RMatrix> {
    let r = ctx.level();
    let g = sl2_dimension_graph(r)?;
    let paths = g.enumerate_paths(2);
    let psi = crossing(ctx, inverse)?;
    let mut trees = Vec::with_capacity(paths.len());
    let mut norms = Vec::with_capacity(paths.len());
    for p in &paths {
        let t = path_tree(ctx, p)?;
        let n = t.compose(ctx, &t.flip())?.closure(ctx)?;
        trees.push(t);
        norms.push(n);
    }
    let mut out = RMatrix::new(r);
    for (qi, q) in paths.iter().enumerate() {
        let braided = trees[qi].compose(
            ctx,
            &TlElement::identity(ctx.order(), q.vertices()[0] as usize).tensor(&psi),
        )?;
        for (pi, p) in paths.iter().enumerate() {
            if p.vertices()[0] != q.vertices()[0] || p.vertices()[2] != q.vertices()[2] {
                continue;
            }
            let num = braided.compose(ctx, &trees[pi].flip())?.closure(ctx)?;
            if num.is_zero() {
                continue;
            }
            let c = num.mul_ref(&norms[pi].inverse()?);
            out.insert(p.clone(), q.clone(), c);
        }
    }
    Ok(out)
}

/// Braiding matrix derived diagrammatically: the raw crossing pairing
/// scaled by the global factor q^{-1}.
pub fn derive_r_matrix(ctx: &FieldContext) -> Result<RMatrix> {
    let raw = raw_pairing_matrix(ctx, false)?;
    let scale = ctx.q_pow(-1);
    let mut out = RMatrix::new(raw.r);
    for ((p, q), c) in raw.entries {
        out.insert(p, q, c.mul_ref(&scale));
    }
    Ok(out)
}

/// Inverse braiding matrix: the inverse-crossing pairing scaled by q.
pub fn derive_r_matrix_inverse(ctx: &FieldContext) -> Result<RMatrix> {
    let raw = raw_pairing_matrix(ctx, true)?;
    let scale = ctx.q_pow(1);
    let mut out = RMatrix::new(raw.r);
    for ((p, q), c) in raw.entries {
        out.insert(p, q, c.mul_ref(&scale));
    }
    Ok(out)
}

/// The four closed-form coefficient families of the braiding matrix,
/// transcribed entry by entry wherever both paths exist in the graph.
pub fn closed_form_r(ctx: &FieldContext) -> Result<RMatrix> {
    let r = ctx.level() as i64;
    let g = sl2_dimension_graph(ctx.level())?;
    let mut out = RMatrix::new(ctx.level());
    let path = |a: i64, b: i64, c: i64| -> Result<Path> {
        g.path_from_vertices(&[a as usize, b as usize, c as usize])
    };
    let top = r - 2;
    for j in 0..=top {
        let qinv_half = ctx.q_half_pow(-1);
        // R_{(j,j+1,j);(j,j+1,j)} = -q^{-1/2} q^{j+1} / [j+1]
        if j + 1 <= top {
            let c = qinv_half
                .mul_ref(&ctx.q_pow(j + 1))
                .mul_ref(&ctx.quantum_integer(j + 1).inverse()?);
            out.insert(path(j, j + 1, j)?, path(j, j + 1, j)?, -&c);
        }
        // R_{(j,j-1,j);(j,j-1,j)} = q^{-1/2} q^{-(j+1)} / [j+1]
        if j >= 1 {
            let c = qinv_half
                .mul_ref(&ctx.q_pow(-(j + 1)))
                .mul_ref(&ctx.quantum_integer(j + 1).inverse()?);
            out.insert(path(j, j - 1, j)?, path(j, j - 1, j)?, c);
        }
        // R_{(j,j-1,j);(j,j+1,j)} = q^{-1/2} [j][j+2] / [j+1]^2
        if j >= 1 && j + 1 <= top {
            let den = ctx.quantum_integer(j + 1);
            let c = qinv_half
                .mul_ref(&ctx.quantum_integer(j))
                .mul_ref(&ctx.quantum_integer(j + 2))
                .mul_ref(&den.mul_ref(&den).inverse()?);
            out.insert(path(j, j - 1, j)?, path(j, j + 1, j)?, c);
        }
        // R_{(j,j+1,j);(j,j-1,j)} = q^{-1/2}
        if j >= 1 && j + 1 <= top {
            out.insert(path(j, j + 1, j)?, path(j, j - 1, j)?, qinv_half.clone());
        }
        // R_{(j,j+1,j+2);(j,j+1,j+2)} = R_{(j,j-1,j-2);(j,j-1,j-2)} = q^{-3/2}
        if j + 2 <= top {
            out.insert(path(j, j + 1, j + 2)?, path(j, j + 1, j + 2)?, ctx.q_half_pow(-3));
        }
        if j >= 2 {
            out.insert(path(j, j - 1, j - 2)?, path(j, j - 1, j - 2)?, ctx.q_half_pow(-3));
        }
    }
    Ok(out)
}
