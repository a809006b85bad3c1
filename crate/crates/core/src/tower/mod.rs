//! The cellular sequence `D_0, D_1, D_2, ...` generated by a subdivision rule.
//!
//! A cell of `D_m` (`m >= 2`) is the pair `(p, q)` of its minimal parent `p` and
//! its image `q`, both cells of `D_{m-1}`, subject to `parent(q) = image(p)`.
//! Levels are materialized on demand as flat arrays; the children of every
//! level-`(m-1)` cell occupy a contiguous index range of level `m`, so the pair
//! `(p, q)` is located in O(1). Closures and stars are componentwise.

use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::builtin::Example;
use crate::error::{Error, Result};
use crate::realization::Realization;
use crate::rule::SubdivisionRule;

pub mod flowers;
pub mod joining;
pub mod separation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LevelCell {
    pub level: u32,
    pub index: u32,
}

impl LevelCell {
    pub fn new(level: u32, index: u32) -> Self {
        LevelCell { level, index }
    }

    pub fn ix(self) -> usize {
        self.index as usize
    }
}

impl fmt::Display for LevelCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L{}#{}", self.level, self.index)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TowerLimits {
    /// Largest number of cells a single level may hold.
    pub max_cells: u64,
}

impl Default for TowerLimits {
    fn default() -> Self {
        TowerLimits {
            max_cells: 40_000_000,
        }
    }
}

/// Compressed rows of cell indices.
#[derive(Debug, Default)]
pub struct Csr {
    off: Vec<u32>,
    val: Vec<u32>,
}

impl Csr {
    fn from_rows<I: IntoIterator<Item = Vec<u32>>>(rows: I) -> Self {
        let mut off = vec![0u32];
        let mut val = Vec::new();
        for r in rows {
            val.extend_from_slice(&r);
            off.push(val.len() as u32);
        }
        Csr { off, val }
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.val[self.off[i] as usize..self.off[i + 1] as usize]
    }

    pub fn rows(&self) -> usize {
        self.off.len() - 1
    }

    fn transpose(&self, n: usize) -> Csr {
        let mut counts = vec![0u32; n + 1];
        for &v in &self.val {
            counts[v as usize + 1] += 1;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let mut fill = counts.clone();
        let mut val = vec![0u32; self.val.len()];
        for i in 0..self.rows() {
            for &v in self.row(i) {
                val[fill[v as usize] as usize] = i as u32;
                fill[v as usize] += 1;
            }
        }
        Csr { off: counts, val }
    }
}

/// One level `D_m` of the sequence.
#[derive(Debug)]
pub struct Level {
    pub m: u32,
    parent: Vec<u32>,
    image: Vec<u32>,
    dim: Vec<u8>,
    anc1: Vec<u32>,
    child_off: Vec<u32>,
    closure: OnceLock<Csr>,
    star: OnceLock<Csr>,
    chamber_star: OnceLock<Csr>,
    pub(crate) boxes: OnceLock<Vec<f64>>,
}

impl Level {
    pub fn len(&self) -> usize {
        self.dim.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dim.is_empty()
    }

    pub fn dim(&self, i: usize) -> usize {
        self.dim[i] as usize
    }

    pub fn parent(&self, i: usize) -> usize {
        self.parent[i] as usize
    }

    pub fn image(&self, i: usize) -> usize {
        self.image[i] as usize
    }

    /// Index of the level-1 ancestor (level >= 1).
    pub fn anc1(&self, i: usize) -> usize {
        self.anc1[i] as usize
    }

    /// Children (at the next level) of cell `p` of the previous level.
    pub fn children_of_prev(&self, p: usize) -> std::ops::Range<usize> {
        self.child_off[p] as usize..self.child_off[p + 1] as usize
    }

    fn child_start(&self, p: usize) -> u32 {
        self.child_off[p]
    }

    pub fn closure(&self, i: usize) -> &[u32] {
        self.closure.get().expect("closure table not built").row(i)
    }

    pub fn star(&self, i: usize) -> &[u32] {
        self.star.get().expect("star table not built").row(i)
    }

    pub fn chamber_star(&self, i: usize) -> &[u32] {
        self.chamber_star.get().expect("chamber-star table not built").row(i)
    }
}

pub struct Tower {
    rule: SubdivisionRule,
    realization: Option<Realization>,
    limits: TowerLimits,
    dim_top: u8,
    /// Level-1 index -> `D1` index, and back.
    l1_order: Vec<usize>,
    l1_index: Vec<u32>,
    /// A level-1 chamber in the star of each level-1 cell.
    chart: Vec<u32>,
    levels: RwLock<Vec<Arc<Level>>>,
}

impl fmt::Debug for Tower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Tower")
            .field("levels", &self.levels.read().map(|l| l.len()).unwrap_or(0))
            .finish()
    }
}

fn new_level(m: u32, parent: Vec<u32>, image: Vec<u32>, dim: Vec<u8>, anc1: Vec<u32>, child_off: Vec<u32>) -> Level {
    Level {
        m,
        parent,
        image,
        dim,
        anc1,
        child_off,
        closure: OnceLock::new(),
        star: OnceLock::new(),
        chamber_star: OnceLock::new(),
        boxes: OnceLock::new(),
    }
}

impl Tower {
    pub fn new(rule: SubdivisionRule, realization: Option<Realization>) -> Self {
        Self::with_limits(rule, realization, TowerLimits::default())
    }

    pub fn from_example(ex: &Example) -> Self {
        Self::new(ex.rule.clone(), ex.realization.clone())
    }

    pub fn with_limits(rule: SubdivisionRule, realization: Option<Realization>, limits: TowerLimits) -> Self {
        let base = rule.base();
        let refined = rule.refined();
        let mut l1_order: Vec<usize> = (0..refined.len()).collect();
        l1_order.sort_by_key(|&c| (rule.parent(c), c));
        let mut l1_index = vec![0u32; refined.len()];
        for (i, &c) in l1_order.iter().enumerate() {
            l1_index[c] = i as u32;
        }
        let chart = l1_order
            .iter()
            .map(|&c| {
                let x = refined.star_chambers_ix(c).first().copied().unwrap_or(c);
                l1_index[x]
            })
            .collect();

        let level0 = new_level(
            0,
            Vec::new(),
            Vec::new(),
            (0..base.len()).map(|c| base.dim(c) as u8).collect(),
            Vec::new(),
            Vec::new(),
        );
        let mut child_off = vec![0u32; base.len() + 1];
        for &c in &l1_order {
            child_off[rule.parent(c) + 1] += 1;
        }
        for i in 0..base.len() {
            child_off[i + 1] += child_off[i];
        }
        let level1 = new_level(
            1,
            l1_order.iter().map(|&c| rule.parent(c) as u32).collect(),
            l1_order.iter().map(|&c| rule.image(c) as u32).collect(),
            l1_order.iter().map(|&c| refined.dim(c) as u8).collect(),
            (0..l1_order.len() as u32).collect(),
            child_off,
        );
        Tower {
            dim_top: base.dim_top() as u8,
            rule,
            realization,
            limits,
            l1_order,
            l1_index,
            chart,
            levels: RwLock::new(vec![Arc::new(level0), Arc::new(level1)]),
        }
    }

    pub fn rule(&self) -> &SubdivisionRule {
        &self.rule
    }

    pub fn realization(&self) -> Result<&Realization> {
        self.realization.as_ref().ok_or(Error::NoRealization)
    }

    pub fn has_realization(&self) -> bool {
        self.realization.is_some()
    }

    pub fn dim_top(&self) -> usize {
        self.dim_top as usize
    }

    pub fn limits(&self) -> TowerLimits {
        self.limits
    }

    /// `D1` index of a level-1 cell.
    pub fn d1_index(&self, level1: usize) -> usize {
        self.l1_order[level1]
    }

    pub fn level1_index(&self, d1: usize) -> usize {
        self.l1_index[d1] as usize
    }

    pub(crate) fn chart(&self, level1: usize) -> usize {
        self.chart[level1] as usize
    }

    /// The level `m`, building all levels below it if necessary.
    pub fn level(&self, m: u32) -> Result<Arc<Level>> {
        if let Some(l) = self.levels.read().expect("level table poisoned").get(m as usize) {
            return Ok(l.clone());
        }
        let mut levels = self.levels.write().expect("level table poisoned");
        while levels.len() <= m as usize {
            let next = self.build_level(&levels)?;
            levels.push(Arc::new(next));
        }
        Ok(levels[m as usize].clone())
    }

    /// Cell count of level `m` without building it (its predecessor is built).
    pub fn count_cells(&self, m: u32) -> Result<u64> {
        if m <= 1 {
            return Ok(self.level(m)?.len() as u64);
        }
        let prev = self.level(m - 1)?;
        Ok((0..prev.len())
            .map(|p| prev.children_of_prev(prev.image(p)).len() as u64)
            .sum())
    }

    fn build_level(&self, levels: &[Arc<Level>]) -> Result<Level> {
        let m = levels.len() as u32;
        let prev = &levels[m as usize - 1];
        let total: u64 = (0..prev.len())
            .map(|p| prev.children_of_prev(prev.image(p)).len() as u64)
            .sum();
        if total > self.limits.max_cells || total > u32::MAX as u64 {
            return Err(Error::ResourceCap {
                level: m,
                cells: total,
                cap: self.limits.max_cells,
            });
        }
        let n = total as usize;
        let mut parent = Vec::with_capacity(n);
        let mut image = Vec::with_capacity(n);
        let mut dim = Vec::with_capacity(n);
        let mut anc1 = Vec::with_capacity(n);
        let mut child_off = Vec::with_capacity(prev.len() + 1);
        child_off.push(0u32);
        for p in 0..prev.len() {
            let a = prev.anc1[p];
            for q in prev.children_of_prev(prev.image(p)) {
                parent.push(p as u32);
                image.push(q as u32);
                dim.push(prev.dim[q]);
                anc1.push(a);
            }
            child_off.push(parent.len() as u32);
        }
        Ok(new_level(m, parent, image, dim, anc1, child_off))
    }

    /// Index of the pair `(r, s)` at level `m >= 2`, if it is a cell.
    fn pair_index(cur: &Level, prev: &Level, r: usize, s: usize) -> Option<u32> {
        let ir = prev.image(r);
        if prev.parent(s) != ir {
            return None;
        }
        Some(cur.child_start(r) + (s as u32 - prev.child_start(ir)))
    }

    pub fn pair(&self, m: u32, p: usize, q: usize) -> Result<Option<LevelCell>> {
        if m < 2 {
            return Err(Error::LevelMismatch(m, 2));
        }
        let cur = self.level(m)?;
        let prev = self.level(m - 1)?;
        Ok(Self::pair_index(&cur, &prev, p, q).map(|i| LevelCell::new(m, i)))
    }

    /// Level `m` with its closure table built.
    pub fn with_closure(&self, m: u32) -> Result<Arc<Level>> {
        let cur = self.level(m)?;
        if cur.closure.get().is_some() {
            return Ok(cur);
        }
        let table = match m {
            0 => {
                let b = self.rule.base();
                Csr::from_rows((0..b.len()).map(|c| b.closure_ix(c).into_iter().map(|x| x as u32).collect()))
            }
            1 => {
                let r = self.rule.refined();
                Csr::from_rows(self.l1_order.iter().map(|&c| {
                    let mut v: Vec<u32> = r.closure_ix(c).into_iter().map(|x| self.l1_index[x]).collect();
                    v.sort_unstable();
                    v
                }))
            }
            _ => {
                let prev = self.with_closure(m - 1)?;
                let mut rows = Vec::with_capacity(cur.len());
                for c in 0..cur.len() {
                    let (p, q) = (cur.parent(c), cur.image(c));
                    let mut row = Vec::new();
                    for &r in prev.closure(p) {
                        for &s in prev.closure(q) {
                            if let Some(id) = Self::pair_index(&cur, &prev, r as usize, s as usize) {
                                row.push(id);
                            }
                        }
                    }
                    row.sort_unstable();
                    rows.push(row);
                }
                Csr::from_rows(rows)
            }
        };
        let _ = cur.closure.set(table);
        Ok(cur)
    }

    /// Level `m` with closure and star tables built.
    pub fn with_star(&self, m: u32) -> Result<Arc<Level>> {
        let cur = self.with_closure(m)?;
        if cur.star.get().is_none() {
            let t = cur.closure.get().expect("closure built").transpose(cur.len());
            let _ = cur.star.set(t);
        }
        Ok(cur)
    }

    /// Level `m` with the chamber-star table built (closures not required).
    pub fn with_chamber_star(&self, m: u32) -> Result<Arc<Level>> {
        let cur = self.level(m)?;
        if cur.chamber_star.get().is_some() {
            return Ok(cur);
        }
        let top = self.dim_top;
        let table = match m {
            0 => {
                let b = self.rule.base();
                Csr::from_rows((0..b.len()).map(|c| b.star_chambers_ix(c).into_iter().map(|x| x as u32).collect()))
            }
            1 => {
                let r = self.rule.refined();
                Csr::from_rows(self.l1_order.iter().map(|&c| {
                    let mut v: Vec<u32> = r.star_chambers_ix(c).into_iter().map(|x| self.l1_index[x]).collect();
                    v.sort_unstable();
                    v
                }))
            }
            _ => {
                let prev = self.with_chamber_star(m - 1)?;
                let mut rows = Vec::with_capacity(cur.len());
                for c in 0..cur.len() {
                    let (p, q) = (cur.parent(c), cur.image(c));
                    let mut row = Vec::new();
                    for &r in prev.chamber_star(p) {
                        for &s in prev.chamber_star(q) {
                            if let Some(id) = Self::pair_index(&cur, &prev, r as usize, s as usize) {
                                debug_assert_eq!(cur.dim[id as usize], top);
                                row.push(id);
                            }
                        }
                    }
                    row.sort_unstable();
                    rows.push(row);
                }
                Csr::from_rows(rows)
            }
        };
        let _ = cur.chamber_star.set(table);
        Ok(cur)
    }

    pub fn dim(&self, c: LevelCell) -> Result<usize> {
        let l = self.level(c.level)?;
        self.check(&l, c)?;
        Ok(l.dim(c.ix()))
    }

    fn check(&self, l: &Level, c: LevelCell) -> Result<()> {
        if c.ix() >= l.len() {
            return Err(Error::CellOutOfRange {
                level: c.level,
                index: c.index,
            });
        }
        Ok(())
    }

    pub fn image(&self, c: LevelCell) -> Result<LevelCell> {
        if c.level == 0 {
            return Err(Error::LevelZero);
        }
        let l = self.level(c.level)?;
        self.check(&l, c)?;
        Ok(LevelCell::new(c.level - 1, l.image[c.ix()]))
    }

    pub fn minimal_parent(&self, c: LevelCell) -> Result<LevelCell> {
        if c.level == 0 {
            return Err(Error::LevelZero);
        }
        let l = self.level(c.level)?;
        self.check(&l, c)?;
        Ok(LevelCell::new(c.level - 1, l.parent[c.ix()]))
    }

    /// The level-`l` cell whose interior contains the interior of `c`.
    pub fn ancestor(&self, c: LevelCell, l: u32) -> Result<LevelCell> {
        if l > c.level {
            return Err(Error::LevelMismatch(l, c.level));
        }
        let mut cur = c;
        while cur.level > l {
            cur = self.minimal_parent(cur)?;
        }
        Ok(cur)
    }

    pub fn image_k(&self, c: LevelCell, k: u32) -> Result<LevelCell> {
        let mut cur = c;
        for _ in 0..k {
            cur = self.image(cur)?;
        }
        Ok(cur)
    }

    pub fn cells_at_level(&self, m: u32) -> Result<Vec<LevelCell>> {
        let l = self.level(m)?;
        Ok((0..l.len() as u32).map(|i| LevelCell::new(m, i)).collect())
    }

    pub fn chambers_at_level(&self, m: u32) -> Result<Vec<LevelCell>> {
        self.cells_of_dim(m, self.dim_top())
    }

    pub fn vertices_at_level(&self, m: u32) -> Result<Vec<LevelCell>> {
        self.cells_of_dim(m, 0)
    }

    pub fn cells_of_dim(&self, m: u32, d: usize) -> Result<Vec<LevelCell>> {
        let l = self.level(m)?;
        Ok((0..l.len())
            .filter(|&i| l.dim(i) == d)
            .map(|i| LevelCell::new(m, i as u32))
            .collect())
    }

    /// Chamber count at level `m`, computed from per-cell child counts.
    pub fn chamber_count(&self, m: u32) -> Result<u64> {
        if m <= 1 {
            return Ok(self.chambers_at_level(m)?.len() as u64);
        }
        // A chamber (p, q) has both components chambers.
        let prev = self.level(m - 1)?;
        let top = self.dim_top;
        Ok((0..prev.len())
            .filter(|&p| prev.dim[p] == top)
            .map(|p| {
                prev.children_of_prev(prev.image(p))
                    .filter(|&q| prev.dim[q] == top)
                    .count() as u64
            })
            .sum())
    }

    pub fn closure(&self, c: LevelCell) -> Result<Vec<LevelCell>> {
        let l = self.with_closure(c.level)?;
        self.check(&l, c)?;
        Ok(l.closure(c.ix()).iter().map(|&i| LevelCell::new(c.level, i)).collect())
    }

    /// The cells whose open union is the flower of `c`.
    pub fn star(&self, c: LevelCell) -> Result<Vec<LevelCell>> {
        let l = self.with_star(c.level)?;
        self.check(&l, c)?;
        Ok(l.star(c.ix()).iter().map(|&i| LevelCell::new(c.level, i)).collect())
    }

    pub fn flower_at_level(&self, c: LevelCell) -> Result<Vec<LevelCell>> {
        self.star(c)
    }

    pub fn star_chambers(&self, c: LevelCell) -> Result<Vec<LevelCell>> {
        let l = self.with_chamber_star(c.level)?;
        self.check(&l, c)?;
        Ok(l.chamber_star(c.ix()).iter().map(|&i| LevelCell::new(c.level, i)).collect())
    }

    /// A cell common to both closures, if the closed cells meet.
    pub fn common_face(&self, a: LevelCell, b: LevelCell) -> Result<Option<LevelCell>> {
        if a.level != b.level {
            return Err(Error::LevelMismatch(a.level, b.level));
        }
        let l = self.with_closure(a.level)?;
        self.check(&l, a)?;
        self.check(&l, b)?;
        let (x, y) = (l.closure(a.ix()), l.closure(b.ix()));
        let (mut i, mut j) = (0, 0);
        while i < x.len() && j < y.len() {
            match x[i].cmp(&y[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return Ok(Some(LevelCell::new(a.level, x[i]))),
            }
        }
        Ok(None)
    }

    pub fn intersects_at_level(&self, a: LevelCell, b: LevelCell) -> Result<bool> {
        Ok(a == b || self.common_face(a, b)?.is_some())
    }

    /// Is `a` a face of `b` or equal to it?
    pub fn is_face_or_equal(&self, a: LevelCell, b: LevelCell) -> Result<bool> {
        if a.level != b.level {
            return Err(Error::LevelMismatch(a.level, b.level));
        }
        let l = self.with_closure(b.level)?;
        Ok(l.closure(b.ix()).binary_search(&a.index).is_ok())
    }

    /// Chambers meeting `|cells|`, sorted.
    pub fn u1(&self, cells: &[LevelCell]) -> Result<Vec<LevelCell>> {
        let Some(first) = cells.first() else {
            return Ok(Vec::new());
        };
        let m = first.level;
        let lc = self.with_closure(m)?;
        let l = self.with_chamber_star(m)?;
        let mut out = Vec::new();
        for c in cells {
            if c.level != m {
                return Err(Error::LevelMismatch(c.level, m));
            }
            for &f in lc.closure(c.ix()) {
                out.extend_from_slice(l.chamber_star(f as usize));
            }
        }
        out.sort_unstable();
        out.dedup();
        Ok(out.into_iter().map(|i| LevelCell::new(m, i)).collect())
    }

    /// The cellular neighborhoods `U^1(G)` and `U^2(G)` as chamber sets.
    pub fn neighborhoods_u1_u2(&self, g: &[LevelCell]) -> Result<(Vec<LevelCell>, Vec<LevelCell>)> {
        let u1 = self.u1(g)?;
        let u2 = self.u1(&u1)?;
        Ok((u1, u2))
    }

    /// Level-1 ancestors of `c, f(c), ..., f^{m-1}(c)`, as `D1` indices.
    pub fn itinerary(&self, c: LevelCell) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(c.level as usize);
        let mut cur = c;
        while cur.level >= 1 {
            let l = self.level(cur.level)?;
            self.check(&l, cur)?;
            out.push(self.l1_order[l.anc1(cur.ix())]);
            if cur.level == 1 {
                break;
            }
            cur = self.image(cur)?;
        }
        Ok(out)
    }

    /// Printable canonical address: the `D0` id at level 0, else the itinerary.
    pub fn address(&self, c: LevelCell) -> Result<String> {
        if c.level == 0 {
            let l = self.level(0)?;
            self.check(&l, c)?;
            return Ok(self.rule.base().id(c.ix()).0.clone());
        }
        let r = self.rule.refined();
        Ok(self
            .itinerary(c)?
            .into_iter()
            .map(|i| r.id(i).0.clone())
            .collect::<Vec<_>>()
            .join("/"))
    }

    /// Inverse of [`Tower::itinerary`]; `None` if the word is not admissible.
    pub fn from_itinerary(&self, word: &[usize]) -> Result<Option<LevelCell>> {
        let m = word.len() as u32;
        if m == 0 {
            return Err(Error::LevelZero);
        }
        let l1: Vec<usize> = word.iter().map(|&d| self.l1_index[d] as usize).collect();
        // Build from the last letter: the level-1 cell f^{m-1}(c).
        let mut cur = l1[m as usize - 1];
        for k in (0..m as usize - 1).rev() {
            let level = m - k as u32;
            match self.find_with_image(level, l1[k], cur)? {
                Some(i) => cur = i,
                None => return Ok(None),
            }
        }
        Ok(Some(LevelCell::new(m, cur as u32)))
    }

    // The level-`k` cell with level-1 ancestor `a` and image `i` (level k-1).
    fn find_with_image(&self, k: u32, a: usize, i: usize) -> Result<Option<usize>> {
        if k == 1 {
            let l1 = self.level(1)?;
            return Ok((l1.image(a) == i).then_some(a));
        }
        let prev = self.level(k - 1)?;
        let cur = self.level(k)?;
        let Some(p) = self.find_with_image(k - 1, a, prev.parent(i))? else {
            return Ok(None);
        };
        Ok(Self::pair_index(&cur, &prev, p, i).map(|x| x as usize))
    }

    /// Checks that the level-`(m+1)` cells with a fixed parent partition it
    /// (facet pairing inside every level-`m` cell).
    pub fn refinement_ok(&self, m: u32) -> Result<bool> {
        let cur = self.with_closure(m + 1)?;
        let prev = self.level(m)?;
        let top_of = |p: usize| prev.dim(p);
        for p in 0..prev.len() {
            let kids: Vec<usize> = cur.children_of_prev(p).collect();
            if kids.is_empty() || kids.iter().map(|&c| cur.dim(c)).max() != Some(top_of(p)) {
                return Ok(false);
            }
            let d = top_of(p);
            let tops: Vec<usize> = kids.iter().copied().filter(|&c| cur.dim(c) == d).collect();
            if d == 0 {
                if tops.len() != 1 {
                    return Ok(false);
                }
                continue;
            }
            let mut facets: Vec<u32> = tops
                .iter()
                .flat_map(|&x| cur.closure(x).iter().copied())
                .filter(|&s| cur.dim(s as usize) + 1 == d)
                .collect();
            facets.sort_unstable();
            let mut i = 0;
            while i < facets.len() {
                let mut j = i;
                while j < facets.len() && facets[j] == facets[i] {
                    j += 1;
                }
                let want = if cur.parent(facets[i] as usize) == p { 2 } else { 1 };
                if j - i != want {
                    return Ok(false);
                }
                i = j;
            }
        }
        Ok(true)
    }

    /// Checks that `f(U^1_{m+k}(G)) ⊆ U^1_m(f^k(G))`.
    pub fn u1_forward_invariant(&self, g: &[LevelCell], k: u32) -> Result<bool> {
        let u = self.u1(g)?;
        let fg: Vec<LevelCell> = g.iter().map(|&c| self.image_k(c, k)).collect::<Result<_>>()?;
        let target = self.u1(&fg)?;
        for c in u {
            let fc = self.image_k(c, k)?;
            if target.binary_search(&fc).is_err() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}
