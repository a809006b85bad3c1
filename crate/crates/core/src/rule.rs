//! Cellular Markov subdivision rules: a base complex `D0`, a refinement `D1`,
//! the minimal-parent map `D1 -> D0` and the cellular map `f: D1 -> D0`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::complex::{
    CellComplex, CellId, Check, ValidationOptions, ValidationReport, Violation,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SubdivisionRule {
    base: CellComplex,
    refined: CellComplex,
    parent: Vec<usize>,
    image: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexCount {
    pub vertex: CellId,
    pub multiplicity: usize,
    /// Chambers of `D1` around the vertex.
    pub n_refined: usize,
    /// Chambers of `D0` around the image vertex.
    pub n_base: usize,
}

impl VertexCount {
    pub fn inequality_holds(&self) -> bool {
        self.multiplicity <= self.n_refined && self.n_refined <= self.n_base * self.multiplicity
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplicityTable {
    pub cells: BTreeMap<CellId, usize>,
    pub vertices: Vec<VertexCount>,
}

impl MultiplicityTable {
    pub fn max(&self) -> usize {
        self.cells.values().copied().max().unwrap_or(0)
    }

    pub fn inequality_holds(&self) -> bool {
        self.vertices.iter().all(VertexCount::inequality_holds)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CpcfReport {
    pub branch: Vec<CellId>,
    /// Least set containing `f(B)` and closed under the forward map of `D0`.
    pub postcritical: Vec<CellId>,
    /// Union of forward images `f^k(B)`, `k >= 1`.
    pub forward_orbit_of_branch: Vec<CellId>,
    /// Cells of `D1` subdividing the postcritical cells.
    pub postcritical_refined: Vec<CellId>,
    pub iterations: usize,
    pub forward_invariant: bool,
    pub branch_is_subcomplex: bool,
    pub restriction_cellular: bool,
    pub is_cpcf: bool,
}

impl SubdivisionRule {
    /// Assembles a rule from id maps. Every `D1` cell needs a parent and an image.
    pub fn new(
        base: CellComplex,
        refined: CellComplex,
        parent: &BTreeMap<CellId, CellId>,
        image: &BTreeMap<CellId, CellId>,
    ) -> Result<Self> {
        let lookup = |map: &BTreeMap<CellId, CellId>, what: &str| -> Result<Vec<usize>> {
            refined
                .ids()
                .iter()
                .map(|id| {
                    let target = map.get(id).ok_or_else(|| {
                        Error::InvalidRule(format!("no {what} for refined cell `{id}`"))
                    })?;
                    base.index_of(target)
                })
                .collect()
        };
        let parent = lookup(parent, "parent")?;
        let image = lookup(image, "image")?;
        Ok(SubdivisionRule::from_indices(base, refined, parent, image))
    }

    pub fn from_indices(
        base: CellComplex,
        refined: CellComplex,
        parent: Vec<usize>,
        image: Vec<usize>,
    ) -> Self {
        assert_eq!(parent.len(), refined.len());
        assert_eq!(image.len(), refined.len());
        SubdivisionRule {
            base,
            refined,
            parent,
            image,
        }
    }

    pub fn base(&self) -> &CellComplex {
        &self.base
    }

    pub fn refined(&self) -> &CellComplex {
        &self.refined
    }

    pub fn parent(&self, c: usize) -> usize {
        self.parent[c]
    }

    pub fn image(&self, c: usize) -> usize {
        self.image[c]
    }

    pub fn parents(&self) -> &[usize] {
        &self.parent
    }

    pub fn images(&self) -> &[usize] {
        &self.image
    }

    pub fn parent_map(&self) -> BTreeMap<CellId, CellId> {
        self.id_map(&self.parent)
    }

    pub fn image_map(&self) -> BTreeMap<CellId, CellId> {
        self.id_map(&self.image)
    }

    fn id_map(&self, v: &[usize]) -> BTreeMap<CellId, CellId> {
        v.iter()
            .enumerate()
            .map(|(c, &p)| (self.refined.id(c).clone(), self.base.id(p).clone()))
            .collect()
    }

    /// Cells of `D1` whose minimal parent is `p`.
    pub fn children(&self, p: usize) -> Vec<usize> {
        (0..self.refined.len()).filter(|&c| self.parent[c] == p).collect()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = self.base.validate();
        report.merge(self.refined.validate());
        if self.base.dim_top() != self.refined.dim_top() {
            report.merge(ValidationReport::from_violations(vec![Violation {
                check: Check::DimensionMonotone,
                cells: vec![],
                detail: "base and refined complexes differ in dimension".into(),
            }]));
        }
        report.merge(self.validate_maps());
        report
    }

    /// Like [`SubdivisionRule::validate`] but without the facet-pairing check
    /// on the two complexes (for rules on manifolds with boundary).
    pub fn validate_with(&self, opts: ValidationOptions) -> ValidationReport {
        let mut report = self.base.validate_with(opts);
        report.merge(self.refined.validate_with(opts));
        report.merge(self.validate_maps());
        report
    }

    fn validate_maps(&self) -> ValidationReport {
        let (b, r) = (&self.base, &self.refined);
        let mut out = Vec::new();
        let v = |check, cells: Vec<CellId>, detail: String| Violation {
            check,
            cells,
            detail,
        };

        for c in 0..r.len() {
            let ic = self.image[c];
            let pc = self.parent[c];
            if b.dim(ic) != r.dim(c) {
                out.push(v(
                    Check::ImageDimension,
                    vec![r.id(c).clone(), b.id(ic).clone()],
                    format!("dim {} mapped to dim {}", r.dim(c), b.dim(ic)),
                ));
                continue;
            }
            let cl = r.closure_ix(c);
            let mut imgs: Vec<usize> = cl.iter().map(|&f| self.image[f]).collect();
            for &f in r.faces(c) {
                if !b.is_face_or_equal(self.image[f], ic) || self.image[f] == ic {
                    out.push(v(
                        Check::ImageFaces,
                        vec![r.id(c).clone(), r.id(f).clone()],
                        "image of a face is not a face of the image".into(),
                    ));
                }
            }
            imgs.sort_unstable();
            imgs.dedup();
            if imgs != b.closure_ix(ic) {
                out.push(v(
                    Check::ClosureBijection,
                    vec![r.id(c).clone()],
                    "image is not a bijection of closures".into(),
                ));
            } else {
                'pairs: for &f in &cl {
                    for &g in &cl {
                        let up = r.is_face_or_equal(f, g);
                        let down = b.is_face_or_equal(self.image[f], self.image[g]);
                        if up != down {
                            out.push(v(
                                Check::ClosureBijection,
                                vec![r.id(c).clone(), r.id(f).clone(), r.id(g).clone()],
                                "face order not preserved on the closure".into(),
                            ));
                            break 'pairs;
                        }
                    }
                }
            }
            if b.dim(pc) < r.dim(c) {
                out.push(v(
                    Check::ParentDimension,
                    vec![r.id(c).clone(), b.id(pc).clone()],
                    "parent has smaller dimension".into(),
                ));
            }
            for &f in r.faces(c) {
                if !b.is_face_or_equal(self.parent[f], pc) {
                    out.push(v(
                        Check::ParentFaces,
                        vec![r.id(c).clone(), r.id(f).clone()],
                        format!(
                            "parent `{}` of face is outside the closure of parent `{}`",
                            b.id(self.parent[f]),
                            b.id(pc)
                        ),
                    ));
                }
            }
        }

        for p in 0..b.len() {
            self.check_partition(p, &mut out);
        }
        ValidationReport::from_violations(out)
    }

    fn check_partition(&self, p: usize, out: &mut Vec<Violation>) {
        let (b, r) = (&self.base, &self.refined);
        let kids = self.children(p);
        let dp = b.dim(p);
        let bad = |cells: Vec<CellId>, detail: String| Violation {
            check: Check::RefinementPartition,
            cells,
            detail,
        };
        if kids.is_empty() {
            out.push(bad(vec![b.id(p).clone()], "cell is not subdivided".into()));
            return;
        }
        let top = kids.iter().map(|&c| r.dim(c)).max().unwrap_or(0);
        if top != dp {
            out.push(bad(
                vec![b.id(p).clone()],
                format!("subdivision has top dimension {top}, expected {dp}"),
            ));
            return;
        }
        let tops: Vec<usize> = kids.iter().copied().filter(|&c| r.dim(c) == dp).collect();
        if dp == 0 {
            if tops.len() != 1 {
                out.push(bad(
                    vec![b.id(p).clone()],
                    format!("vertex subdivided into {} vertices", tops.len()),
                ));
            }
            return;
        }
        let mut seen = BTreeSet::new();
        for &x in &tops {
            for &s in r.faces(x) {
                if r.dim(s) + 1 != dp || !seen.insert(s) {
                    continue;
                }
                let n = tops.iter().filter(|&&y| r.faces(y).binary_search(&s).is_ok()).count();
                let want = if self.parent[s] == p { 2 } else { 1 };
                if n != want {
                    out.push(bad(
                        vec![r.id(s).clone(), b.id(p).clone()],
                        format!("facet bounds {n} pieces of its parent, expected {want}"),
                    ));
                }
            }
        }
    }

    /// `max_{tau in star(f(c))} #{sigma in star(c) : f(sigma) = tau}`.
    pub fn local_multiplicity(&self, c: usize) -> usize {
        let star1 = self.refined.star_ix(c);
        self.base
            .star_ix(self.image[c])
            .into_iter()
            .map(|tau| star1.iter().filter(|&&s| self.image[s] == tau).count())
            .max()
            .unwrap_or(0)
    }

    pub fn multiplicity_table(&self) -> MultiplicityTable {
        let r = &self.refined;
        let cells = (0..r.len())
            .map(|c| (r.id(c).clone(), self.local_multiplicity(c)))
            .collect();
        let vertices = r
            .vertices()
            .map(|x| VertexCount {
                vertex: r.id(x).clone(),
                multiplicity: self.local_multiplicity(x),
                n_refined: r.star_chambers_ix(x).len(),
                n_base: self.base.star_chambers_ix(self.image[x]).len(),
            })
            .collect();
        MultiplicityTable { cells, vertices }
    }

    /// Number of `D1` chambers over each `D0` chamber; errors unless constant.
    pub fn degree(&self) -> Result<usize> {
        let mut counts: BTreeMap<usize, usize> = self.base.chambers().map(|y| (y, 0)).collect();
        for x in self.refined.chambers() {
            if let Some(n) = counts.get_mut(&self.image[x]) {
                *n += 1;
            }
        }
        let values: BTreeSet<usize> = counts.values().copied().collect();
        match values.len() {
            1 => Ok(*values.iter().next().unwrap_or(&0)),
            _ => Err(Error::NonConstantDegree(
                counts
                    .iter()
                    .map(|(y, n)| format!("{}:{n}", self.base.id(*y)))
                    .collect::<Vec<_>>()
                    .join(", "),
            )),
        }
    }

    /// Cells of `D1` with local multiplicity at least two; checked face-closed.
    pub fn branch_complex(&self) -> Result<Vec<usize>> {
        let set: Vec<usize> = (0..self.refined.len())
            .filter(|&c| self.local_multiplicity(c) >= 2)
            .collect();
        for &c in &set {
            if let Some(&f) = self.refined.faces(c).iter().find(|f| set.binary_search(f).is_err()) {
                return Err(Error::BranchNotClosed {
                    missing: self.refined.id(f).0.clone(),
                    of: self.refined.id(c).0.clone(),
                });
            }
        }
        Ok(set)
    }

    /// `{f(c') : c' in D1, parent(c') in closure(c)}`.
    pub fn forward_set(&self, c: usize) -> BTreeSet<usize> {
        (0..self.refined.len())
            .filter(|&x| self.base.is_face_or_equal(self.parent[x], c))
            .map(|x| self.image[x])
            .collect()
    }

    pub fn cpcf_data(&self) -> Result<CpcfReport> {
        let branch = self.branch_complex()?;
        let seed: BTreeSet<usize> = branch.iter().map(|&c| self.image[c]).collect();

        let mut p = seed.clone();
        let mut iterations = 0;
        loop {
            iterations += 1;
            let next: BTreeSet<usize> = p.iter().flat_map(|&c| self.forward_set(c)).collect();
            let before = p.len();
            p.extend(next);
            if p.len() == before {
                break;
            }
        }

        // f^k(B) for k >= 1: seed, then images of the refined cells lying in it.
        let mut orbit = seed.clone();
        let mut frontier = seed;
        while !frontier.is_empty() {
            let next: BTreeSet<usize> = (0..self.refined.len())
                .filter(|&x| frontier.contains(&self.parent[x]))
                .map(|x| self.image[x])
                .filter(|y| !orbit.contains(y))
                .collect();
            orbit.extend(next.iter().copied());
            frontier = next;
        }

        let forward: BTreeSet<usize> = p.iter().flat_map(|&c| self.forward_set(c)).collect();
        let forward_invariant = forward.is_subset(&p);
        let p1: Vec<usize> = (0..self.refined.len())
            .filter(|&x| p.contains(&self.parent[x]))
            .collect();
        let restriction_cellular = p1.iter().all(|&x| p.contains(&self.image[x]));
        let p_closed = p
            .iter()
            .all(|&c| self.base.faces(c).iter().all(|f| p.contains(f)));
        let names0 = |s: &BTreeSet<usize>| s.iter().map(|&c| self.base.id(c).clone()).collect();
        Ok(CpcfReport {
            branch: branch.iter().map(|&c| self.refined.id(c).clone()).collect(),
            postcritical: names0(&p),
            forward_orbit_of_branch: names0(&orbit),
            postcritical_refined: p1.iter().map(|&c| self.refined.id(c).clone()).collect(),
            iterations,
            forward_invariant,
            branch_is_subcomplex: true,
            restriction_cellular,
            is_cpcf: forward_invariant && restriction_cellular && p_closed,
        })
    }
}

#[cfg(test)]
mod tests {
    use crate::builtin;

    #[test]
    fn torus_rule_is_a_covering() {
        let ex = builtin::torus_doubling(2).unwrap();
        let r = &ex.rule;
        assert!(r.validate().ok);
        assert_eq!(r.degree().unwrap(), 4);
        assert!(r.branch_complex().unwrap().is_empty());
        let t = r.multiplicity_table();
        assert_eq!(t.max(), 1);
        assert!(t.inequality_holds());
        let cp = r.cpcf_data().unwrap();
        assert!(cp.postcritical.is_empty());
        assert!(cp.is_cpcf);
    }

    #[test]
    fn pillow_multiplicity_is_upper_semicontinuous() {
        let ex = builtin::pillowcase();
        let r = &ex.rule;
        for c in 0..r.refined().len() {
            for &f in r.refined().faces(c) {
                assert!(r.local_multiplicity(f) >= r.local_multiplicity(c));
            }
        }
    }

    #[test]
    fn identity_rule_has_degree_one() {
        let ex = builtin::identity_rule();
        let r = &ex.rule;
        assert!(r.validate().ok, "{:?}", r.validate().violations);
        assert_eq!(r.degree().unwrap(), 1);
        assert!(r.branch_complex().unwrap().is_empty());
        assert!(r.cpcf_data().unwrap().postcritical.is_empty());
    }
}
