//! Flowers across levels: invariance under the map, bounded chamber counts
//! around vertices (ffi), and a combinatorial exactness proxy.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{LevelCell, Tower};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowerReport {
    pub level: u32,
    pub vertices: usize,
    /// Vertices `p` with `f(star p) != star f(p)`.
    pub failures: Vec<String>,
    /// `f` maps each closed level-`m` cell bijectively onto its image's
    /// closure, so the flowers over a vertex `q` partition `f^{-1}(star q)`.
    pub pullback_partition: bool,
}

impl FlowerReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty() && self.pullback_partition
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FfiRow {
    pub level: u32,
    pub max_vertex_chambers: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReachabilityReport {
    pub level: u32,
    /// `f^m` maps level-`m` chambers onto the chambers of `D_0`.
    pub onto: bool,
    /// Largest over chambers `X` of the least `k` with `f^k(U^1(X))` covering
    /// level `m - k`; `None` if some chamber never covers (non-expanding).
    pub k: Option<u32>,
}

impl Tower {
    pub fn check_flower_invariance(&self, m: u32) -> Result<FlowerReport> {
        if m == 0 {
            return Err(Error::LevelZero);
        }
        let cur = self.with_star(m)?;
        let prev = self.with_star(m - 1)?;
        let mut failures = Vec::new();
        let mut vertices = 0;
        for p in 0..cur.len() {
            if cur.dim(p) != 0 {
                continue;
            }
            vertices += 1;
            let img: BTreeSet<u32> = cur.star(p).iter().map(|&s| cur.image(s as usize) as u32).collect();
            let want: BTreeSet<u32> = prev.star(cur.image(p)).iter().copied().collect();
            if img != want {
                failures.push(self.address(LevelCell::new(m, p as u32))?);
            }
        }
        let mut partition = true;
        'cells: for s in 0..cur.len() {
            let mut img: Vec<u32> = cur.closure(s).iter().map(|&f| cur.image(f as usize) as u32).collect();
            let n = img.len();
            img.sort_unstable();
            img.dedup();
            if img.len() != n || img.as_slice() != prev.closure(cur.image(s)) {
                partition = false;
                break 'cells;
            }
        }
        Ok(FlowerReport {
            level: m,
            vertices,
            failures,
            pullback_partition: partition,
        })
    }

    /// `sup` over level-`m` vertices of the number of chambers around them.
    /// Level `m` itself is never materialized; its vertices are streamed from
    /// level `m - 1`.
    pub fn ffi_row(&self, m: u32) -> Result<FfiRow> {
        let max = if m <= 1 {
            let l = self.with_chamber_star(m)?;
            (0..l.len())
                .filter(|&v| l.dim(v) == 0)
                .map(|v| l.chamber_star(v).len())
                .max()
                .unwrap_or(0)
        } else {
            let prev = self.with_chamber_star(m - 1)?;
            let mut best = 0;
            for p in 0..prev.len() {
                let ip = prev.image(p);
                for q in prev.children_of_prev(ip) {
                    if prev.dim(q) != 0 {
                        continue;
                    }
                    let sq = prev.chamber_star(q);
                    let count: usize = prev
                        .chamber_star(p)
                        .iter()
                        .map(|&r| {
                            let ir = prev.image(r as usize);
                            sq.iter().filter(|&&s| prev.parent(s as usize) == ir).count()
                        })
                        .sum();
                    best = best.max(count);
                }
            }
            best
        };
        Ok(FfiRow {
            level: m,
            max_vertex_chambers: max,
        })
    }

    pub fn ffi_report(&self, max_m: u32) -> Result<Vec<FfiRow>> {
        (0..=max_m).map(|m| self.ffi_row(m)).collect()
    }

    pub fn image_reachability(&self, m: u32) -> Result<ReachabilityReport> {
        let chambers = self.chambers_at_level(m)?;
        let base: BTreeSet<LevelCell> = self.chambers_at_level(0)?.into_iter().collect();
        let mut hit = BTreeSet::new();
        for &x in &chambers {
            hit.insert(self.image_k(x, m)?);
        }
        let onto = hit == base;

        let totals: Vec<usize> = (0..=m)
            .map(|l| self.chambers_at_level(l).map(|c| c.len()))
            .collect::<Result<_>>()?;
        let mut worst = Some(0);
        for &x in &chambers {
            let mut set: BTreeSet<LevelCell> = self.u1(&[x])?.into_iter().collect();
            let mut found = None;
            for k in 0..=m {
                if set.len() == totals[(m - k) as usize] {
                    found = Some(k);
                    break;
                }
                if k < m {
                    set = set.iter().map(|&c| self.image(c)).collect::<Result<_>>()?;
                }
            }
            worst = match (worst, found) {
                (Some(a), Some(b)) => Some(a.max(b)),
                _ => None,
            };
            if worst.is_none() {
                break;
            }
        }
        Ok(ReachabilityReport { level: m, onto, k: worst })
    }
}
