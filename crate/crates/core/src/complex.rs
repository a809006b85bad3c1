//! Finite cell complexes stored as face posets.
//!
//! A [`CellComplex`] keeps, for every cell, its dimension and the full
//! (transitively closed) set of proper faces. Cells are addressed internally by
//! a dense index; the string [`CellId`] is the stable external name used by the
//! JSON schema and by reports.
//!
//! Geometric predicates reduce to poset queries: two closed cells meet iff
//! their closures share a cell, and a union of cells joins opposite sides iff
//! no cell is a common face of every cell it meets.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use petgraph::graph::UnGraph;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CellId(pub String);

impl CellId {
    pub fn new(s: impl Into<String>) -> Self {
        CellId(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for CellId {
    fn from(s: &str) -> Self {
        CellId(s.to_owned())
    }
}

/// Input record for building a complex. `faces` may be immediate faces only.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellSpec {
    pub id: CellId,
    pub dim: usize,
    #[serde(default)]
    pub faces: Vec<CellId>,
}

#[derive(Debug, Clone)]
pub struct CellComplex {
    dim_top: usize,
    ids: Vec<CellId>,
    lookup: HashMap<CellId, usize>,
    dims: Vec<usize>,
    faces: Vec<Vec<usize>>,
    cofaces: Vec<Vec<usize>>,
}

impl PartialEq for CellComplex {
    fn eq(&self, other: &Self) -> bool {
        self.dim_top == other.dim_top
            && self.ids == other.ids
            && self.dims == other.dims
            && self.faces == other.faces
    }
}

/// A set of cells of one complex, kept sorted by index.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct CellSet(BTreeSet<usize>);

impl CellSet {
    pub fn new() -> Self {
        CellSet(BTreeSet::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, ix: usize) -> bool {
        self.0.contains(&ix)
    }

    pub fn insert(&mut self, ix: usize) -> bool {
        self.0.insert(ix)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn ids(&self, complex: &CellComplex) -> Vec<CellId> {
        self.iter().map(|ix| complex.id(ix).clone()).collect()
    }
}

impl FromIterator<usize> for CellSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        CellSet(iter.into_iter().collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommonFaces {
    /// Maximal cells lying in both closures.
    pub cells: CellSet,
    pub intersects: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdjacencyKind {
    Chambers,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    FaceOrder,
    DimensionMonotone,
    FaceDimensions,
    ChamberCoverage,
    CellBoundary,
    PseudoManifold,
    ImageDimension,
    ImageFaces,
    ClosureBijection,
    ParentDimension,
    ParentFaces,
    RefinementPartition,
    Realization,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub check: Check,
    pub cells: Vec<CellId>,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn from_violations(violations: Vec<Violation>) -> Self {
        ValidationReport {
            ok: violations.is_empty(),
            violations,
        }
    }

    pub fn merge(&mut self, other: ValidationReport) {
        self.violations.extend(other.violations);
        self.ok = self.violations.is_empty();
    }

    /// True if some violation names the given cell.
    pub fn names(&self, id: &str) -> bool {
        self.violations
            .iter()
            .any(|v| v.cells.iter().any(|c| c.as_str() == id))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValidationOptions {
    pub pseudo_manifold: bool,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        ValidationOptions {
            pseudo_manifold: true,
        }
    }
}

impl CellComplex {
    /// Builds a complex from cell records, closing the face relation
    /// transitively. Rejects unknown ids, cycles and faces whose dimension is
    /// not strictly smaller than the cell's.
    pub fn new(dim_top: usize, cells: Vec<CellSpec>) -> Result<Self> {
        let mut lookup = HashMap::with_capacity(cells.len());
        for (ix, c) in cells.iter().enumerate() {
            if lookup.insert(c.id.clone(), ix).is_some() {
                return Err(Error::DuplicateCell(c.id.0.clone()));
            }
        }
        let n = cells.len();
        let mut immediate = vec![Vec::new(); n];
        for (ix, c) in cells.iter().enumerate() {
            for f in &c.faces {
                let fx = *lookup
                    .get(f)
                    .ok_or_else(|| Error::UnknownCell(f.0.clone()))?;
                immediate[ix].push(fx);
            }
        }

        // Topological order (faces before cofaces); detects cycles.
        let mut state = vec![0u8; n];
        let mut order = Vec::with_capacity(n);
        for start in 0..n {
            if state[start] != 0 {
                continue;
            }
            let mut stack = vec![(start, 0usize)];
            state[start] = 1;
            while let Some((v, i)) = stack.pop() {
                if i < immediate[v].len() {
                    stack.push((v, i + 1));
                    let w = immediate[v][i];
                    match state[w] {
                        0 => {
                            state[w] = 1;
                            stack.push((w, 0));
                        }
                        1 => return Err(Error::FaceCycle(cells[w].id.0.clone())),
                        _ => {}
                    }
                } else {
                    state[v] = 2;
                    order.push(v);
                }
            }
        }

        for (ix, c) in cells.iter().enumerate() {
            for &fx in &immediate[ix] {
                if cells[fx].dim >= c.dim {
                    return Err(Error::Dimension {
                        cell: c.id.0.clone(),
                        dim: c.dim,
                        face: cells[fx].id.0.clone(),
                        face_dim: cells[fx].dim,
                    });
                }
            }
        }

        let mut faces: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &v in &order {
            let mut acc = BTreeSet::new();
            for &w in &immediate[v] {
                acc.insert(w);
                acc.extend(faces[w].iter().copied());
            }
            faces[v] = acc.into_iter().collect();
        }
        let mut cofaces = vec![Vec::new(); n];
        for (v, fs) in faces.iter().enumerate() {
            for &w in fs {
                cofaces[w].push(v);
            }
        }
        Ok(CellComplex {
            dim_top,
            ids: cells.iter().map(|c| c.id.clone()).collect(),
            lookup,
            dims: cells.iter().map(|c| c.dim).collect(),
            faces,
            cofaces,
        })
    }

    pub fn dim_top(&self) -> usize {
        self.dim_top
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, ix: usize) -> &CellId {
        &self.ids[ix]
    }

    pub fn ids(&self) -> &[CellId] {
        &self.ids
    }

    pub fn index_of(&self, id: &CellId) -> Result<usize> {
        self.lookup
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownCell(id.0.clone()))
    }

    pub fn dim(&self, ix: usize) -> usize {
        self.dims[ix]
    }

    /// Proper faces, transitively closed, sorted.
    pub fn faces(&self, ix: usize) -> &[usize] {
        &self.faces[ix]
    }

    /// Proper cofaces, sorted.
    pub fn cofaces(&self, ix: usize) -> &[usize] {
        &self.cofaces[ix]
    }

    pub fn is_face_or_equal(&self, a: usize, b: usize) -> bool {
        a == b || self.faces[b].binary_search(&a).is_ok()
    }

    pub fn closure_ix(&self, ix: usize) -> Vec<usize> {
        let mut v = self.faces[ix].clone();
        let pos = v.binary_search(&ix).unwrap_err();
        v.insert(pos, ix);
        v
    }

    pub fn star_ix(&self, ix: usize) -> Vec<usize> {
        let mut v = self.cofaces[ix].clone();
        let pos = v.binary_search(&ix).unwrap_err();
        v.insert(pos, ix);
        v
    }

    pub fn star_chambers_ix(&self, ix: usize) -> Vec<usize> {
        self.star_ix(ix)
            .into_iter()
            .filter(|&c| self.dims[c] == self.dim_top)
            .collect()
    }

    pub fn closure(&self, id: &CellId) -> Result<CellSet> {
        Ok(self.closure_ix(self.index_of(id)?).into_iter().collect())
    }

    /// The cells whose open union is the flower of `id`.
    pub fn star(&self, id: &CellId) -> Result<CellSet> {
        Ok(self.star_ix(self.index_of(id)?).into_iter().collect())
    }

    pub fn chambers(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&c| self.dims[c] == self.dim_top)
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&c| self.dims[c] == 0)
    }

    pub fn cell_set<'a, I>(&self, ids: I) -> Result<CellSet>
    where
        I: IntoIterator<Item = &'a CellId>,
    {
        ids.into_iter().map(|id| self.index_of(id)).collect()
    }

    /// Immediate faces: proper faces not contained in another proper face.
    pub fn immediate_faces(&self, ix: usize) -> Vec<usize> {
        let fs = &self.faces[ix];
        fs.iter()
            .copied()
            .filter(|&f| !fs.iter().any(|&g| g != f && self.faces[g].binary_search(&f).is_ok()))
            .collect()
    }

    pub fn intersects_ix(&self, a: usize, b: usize) -> bool {
        a == b || self.common_closure(a, b).next().is_some()
    }

    fn common_closure(&self, a: usize, b: usize) -> impl Iterator<Item = usize> + '_ {
        let cb = self.closure_ix(b);
        self.closure_ix(a)
            .into_iter()
            .filter(move |x| cb.binary_search(x).is_ok())
    }

    pub fn common_faces_ix(&self, a: usize, b: usize) -> CommonFaces {
        let common: Vec<usize> = self.common_closure(a, b).collect();
        let maximal: CellSet = common
            .iter()
            .copied()
            .filter(|&x| !common.iter().any(|&y| y != x && self.is_face_or_equal(x, y)))
            .collect();
        CommonFaces {
            intersects: !maximal.is_empty(),
            cells: maximal,
        }
    }

    pub fn common_faces(&self, a: &CellId, b: &CellId) -> Result<CommonFaces> {
        Ok(self.common_faces_ix(self.index_of(a)?, self.index_of(b)?))
    }

    /// Cells meeting the union of `set`.
    pub fn met_cells(&self, set: &CellSet) -> CellSet {
        let mut met = CellSet::new();
        for a in set.iter() {
            for b in self.closure_ix(a) {
                met.insert(b);
                for &c in &self.cofaces[b] {
                    met.insert(c);
                }
            }
        }
        met
    }

    /// True iff the cells meeting `|set|` have empty common intersection.
    /// The empty set never joins.
    pub fn joins_opposite_sides(&self, set: &CellSet) -> bool {
        if set.is_empty() {
            return false;
        }
        let met = self.met_cells(set);
        let mut common: Option<BTreeSet<usize>> = None;
        for c in met.iter() {
            let cl: BTreeSet<usize> = self.closure_ix(c).into_iter().collect();
            common = Some(match common {
                None => cl,
                Some(acc) => acc.intersection(&cl).copied().collect(),
            });
            if common.as_ref().is_some_and(|s| s.is_empty()) {
                return true;
            }
        }
        common.is_some_and(|s| s.is_empty())
    }

    pub fn adjacency_graph(&self, kind: AdjacencyKind) -> UnGraph<CellId, ()> {
        let nodes: Vec<usize> = match kind {
            AdjacencyKind::Chambers => self.chambers().collect(),
            AdjacencyKind::All => (0..self.len()).collect(),
        };
        let mut g = UnGraph::with_capacity(nodes.len(), 0);
        let handles: Vec<_> = nodes.iter().map(|&c| g.add_node(self.ids[c].clone())).collect();
        for i in 0..nodes.len() {
            for j in i + 1..nodes.len() {
                if self.intersects_ix(nodes[i], nodes[j]) {
                    g.add_edge(handles[i], handles[j], ());
                }
            }
        }
        g
    }

    /// The sub-poset on a face-closed set, as a standalone complex.
    pub fn restriction(&self, set: &CellSet) -> Result<CellComplex> {
        for c in set.iter() {
            if let Some(&f) = self.faces[c].iter().find(|f| !set.contains(**f)) {
                return Err(Error::NotFaceClosed {
                    missing: self.ids[f].0.clone(),
                    of: self.ids[c].0.clone(),
                });
            }
        }
        let dim_top = set.iter().map(|c| self.dims[c]).max().unwrap_or(0);
        let specs = set
            .iter()
            .map(|c| CellSpec {
                id: self.ids[c].clone(),
                dim: self.dims[c],
                faces: self.immediate_faces(c).into_iter().map(|f| self.ids[f].clone()).collect(),
            })
            .collect();
        CellComplex::new(dim_top, specs)
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.dims
            .iter()
            .map(|&d| if d % 2 == 0 { 1 } else { -1 })
            .sum()
    }

    pub fn count_by_dim(&self) -> Vec<usize> {
        let mut counts = vec![0; self.dim_top + 1];
        for &d in &self.dims {
            if d < counts.len() {
                counts[d] += 1;
            }
        }
        counts
    }

    pub fn validate(&self) -> ValidationReport {
        self.validate_with(ValidationOptions::default())
    }

    pub fn validate_with(&self, opts: ValidationOptions) -> ValidationReport {
        let mut out = Vec::new();
        let name = |ix: usize| self.ids[ix].clone();

        for c in 0..self.len() {
            if self.dims[c] > self.dim_top {
                out.push(Violation {
                    check: Check::DimensionMonotone,
                    cells: vec![name(c)],
                    detail: format!("dimension {} exceeds ambient {}", self.dims[c], self.dim_top),
                });
            }
            if self.faces[c].binary_search(&c).is_ok() {
                out.push(Violation {
                    check: Check::FaceOrder,
                    cells: vec![name(c)],
                    detail: "cell is its own face".into(),
                });
            }
            for &f in &self.faces[c] {
                if self.dims[f] >= self.dims[c] {
                    out.push(Violation {
                        check: Check::DimensionMonotone,
                        cells: vec![name(c), name(f)],
                        detail: "face dimension not smaller".into(),
                    });
                }
                if let Some(&g) = self.faces[f].iter().find(|g| self.faces[c].binary_search(g).is_err()) {
                    out.push(Violation {
                        check: Check::FaceOrder,
                        cells: vec![name(c), name(g)],
                        detail: "face of a face is not a face".into(),
                    });
                }
            }
            let d = self.dims[c];
            for k in 0..d {
                if !self.faces[c].iter().any(|&f| self.dims[f] == k) {
                    out.push(Violation {
                        check: Check::FaceDimensions,
                        cells: vec![name(c)],
                        detail: format!("no face of dimension {k}"),
                    });
                }
            }
            if d != self.dim_top && !self.cofaces[c].iter().any(|&x| self.dims[x] == self.dim_top) {
                out.push(Violation {
                    check: Check::ChamberCoverage,
                    cells: vec![name(c)],
                    detail: "not contained in any chamber".into(),
                });
            }
            self.check_cell_boundary(c, &mut out);
        }

        if opts.pseudo_manifold && self.dim_top > 0 {
            for c in 0..self.len() {
                if self.dims[c] + 1 != self.dim_top {
                    continue;
                }
                let n = self.cofaces[c].iter().filter(|&&x| self.dims[x] == self.dim_top).count();
                if n != 2 {
                    out.push(Violation {
                        check: Check::PseudoManifold,
                        cells: vec![name(c)],
                        detail: format!("facet bounds {n} chambers, expected 2"),
                    });
                }
            }
        }
        ValidationReport::from_violations(out)
    }

    // The boundary of a k-cell is a (k-1)-sphere: an edge has two endpoints, and
    // inside a k-cell (k >= 2) every (k-2)-face lies on exactly two (k-1)-faces.
    fn check_cell_boundary(&self, c: usize, out: &mut Vec<Violation>) {
        let d = self.dims[c];
        if d == 0 {
            return;
        }
        let fs = &self.faces[c];
        if d == 1 {
            let n = fs.iter().filter(|&&f| self.dims[f] == 0).count();
            if n != 2 {
                out.push(Violation {
                    check: Check::CellBoundary,
                    cells: vec![self.ids[c].clone()],
                    detail: format!("edge has {n} endpoints"),
                });
            }
            return;
        }
        for &r in fs.iter().filter(|&&f| self.dims[f] + 2 == d) {
            let n = fs
                .iter()
                .filter(|&&f| self.dims[f] + 1 == d && self.faces[f].binary_search(&r).is_ok())
                .count();
            if n != 2 {
                out.push(Violation {
                    check: Check::CellBoundary,
                    cells: vec![self.ids[c].clone(), self.ids[r].clone()],
                    detail: format!("ridge lies on {n} facets of the cell, expected 2"),
                });
            }
        }
    }

    /// Records with immediate faces only; the inverse of [`CellComplex::new`].
    pub fn to_specs(&self) -> Vec<CellSpec> {
        (0..self.len())
            .map(|c| CellSpec {
                id: self.ids[c].clone(),
                dim: self.dims[c],
                faces: self.immediate_faces(c).into_iter().map(|f| self.ids[f].clone()).collect(),
            })
            .collect()
    }
}

/// Number of chambers whose closure contains the vertex.
pub fn vertex_chamber_count(complex: &CellComplex, vertex: usize) -> Result<usize> {
    if complex.dim(vertex) != 0 {
        return Err(Error::NotVertex(complex.id(vertex).0.clone()));
    }
    Ok(complex.star_chambers_ix(vertex).len())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(id: &str, dim: usize, faces: &[&str]) -> CellSpec {
        CellSpec {
            id: id.into(),
            dim,
            faces: faces.iter().map(|f| CellId::from(*f)).collect(),
        }
    }

    // Square [0,1]^2 as a single-cell complex.
    fn square() -> CellComplex {
        CellComplex::new(
            2,
            vec![
                spec("a", 0, &[]),
                spec("b", 0, &[]),
                spec("c", 0, &[]),
                spec("d", 0, &[]),
                spec("ab", 1, &["a", "b"]),
                spec("bc", 1, &["b", "c"]),
                spec("cd", 1, &["c", "d"]),
                spec("da", 1, &["d", "a"]),
                spec("Q", 2, &["ab", "bc", "cd", "da"]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn faces_are_transitively_closed() {
        let sq = square();
        let q = sq.index_of(&"Q".into()).unwrap();
        assert_eq!(sq.faces(q).len(), 8);
        assert_eq!(sq.closure_ix(q).len(), 9);
        assert_eq!(sq.euler_characteristic(), 1);
    }

    #[test]
    fn square_boundary_is_a_circle() {
        let r = square().validate_with(ValidationOptions { pseudo_manifold: false });
        assert!(r.ok, "{:?}", r.violations);
    }

    #[test]
    fn rejects_cycles_and_dimension_violations() {
        let cyc = CellComplex::new(1, vec![spec("x", 1, &["y"]), spec("y", 1, &["x"])]);
        assert!(matches!(cyc, Err(Error::FaceCycle(_))));
        let dimbad = CellComplex::new(1, vec![spec("x", 1, &["y"]), spec("y", 1, &[])]);
        assert!(matches!(dimbad, Err(Error::Dimension { .. })));
        let unknown = CellComplex::new(1, vec![spec("x", 1, &["nope"])]);
        assert!(matches!(unknown, Err(Error::UnknownCell(_))));
    }

    #[test]
    fn restriction_requires_face_closed_sets() {
        let sq = square();
        let q = sq.index_of(&"Q".into()).unwrap();
        let ab = sq.index_of(&"ab".into()).unwrap();
        let a = sq.index_of(&"a".into()).unwrap();
        let whole = sq.restriction(&sq.closure_ix(q).into_iter().collect()).unwrap();
        assert_eq!(whole.len(), 9);
        let v = sq.restriction(&[a].into_iter().collect()).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v.dim_top(), 0);
        assert!(matches!(
            sq.restriction(&[ab].into_iter().collect()),
            Err(Error::NotFaceClosed { .. })
        ));
    }

    #[test]
    fn missing_endpoint_is_reported() {
        let bad = CellComplex::new(
            1,
            vec![spec("a", 0, &[]), spec("e", 1, &["a"])],
        )
        .unwrap();
        let r = bad.validate_with(ValidationOptions { pseudo_manifold: false });
        assert!(!r.ok);
        assert!(r.names("e"));
    }

    #[test]
    fn empty_set_never_joins() {
        assert!(!square().joins_opposite_sides(&CellSet::new()));
    }

    #[test]
    fn immediate_faces_roundtrip() {
        let sq = square();
        let again = CellComplex::new(2, sq.to_specs()).unwrap();
        assert_eq!(sq, again);
    }
}
