//! The joining number `J(D_m, D_0)`: the fewest level-`m` chambers forming a
//! connected set that joins opposite sides of `D_0`.
//!
//! A set joins opposite sides iff it lies in no flower of a `D_0` vertex, so
//! every vertex `v` yields a group of chambers that stick out of the flower of
//! `v`, and `J` is the minimum node-weighted group Steiner tree over these
//! groups in the chamber intersection graph (Dreyfus-Wagner over subsets).

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{LevelCell, Tower};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JoiningReport {
    pub level: u32,
    /// `None` when the minimum exceeds `cap`.
    pub value: Option<usize>,
    pub cap: usize,
    pub witness: Vec<String>,
    /// The witness is connected and joins opposite sides by definition.
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JoiningSummary {
    pub reports: Vec<JoiningReport>,
    pub monotone: bool,
}

#[derive(Clone, Copy)]
enum Back {
    Leaf,
    Split(usize),
    Via(u32),
}

const INF: u32 = u32::MAX / 4;

impl Tower {
    /// `D_0` ancestors of every level-`m` cell.
    pub fn base_ancestors(&self, m: u32) -> Result<Vec<u32>> {
        let mut anc: Vec<u32> = (0..self.level(0)?.len() as u32).collect();
        for l in 1..=m {
            let lv = self.level(l)?;
            anc = (0..lv.len()).map(|c| anc[lv.parent(c)]).collect();
        }
        Ok(anc)
    }

    /// Definitional check: the `D_0` cells meeting `|cells|` have empty
    /// common intersection.
    pub fn joins_opposite_sides_of_base(&self, cells: &[LevelCell]) -> Result<bool> {
        let Some(first) = cells.first() else {
            return Ok(false);
        };
        let m = first.level;
        let anc = self.base_ancestors(m)?;
        let lc = self.with_closure(m)?;
        let base = self.rule().base();
        let mut met = BTreeSet::new();
        for c in cells {
            for &b in lc.closure(c.ix()) {
                met.extend(base.star_ix(anc[b as usize] as usize));
            }
        }
        let mut common: Option<BTreeSet<usize>> = None;
        for c in met {
            let cl: BTreeSet<usize> = base.closure_ix(c).into_iter().collect();
            common = Some(match common {
                None => cl,
                Some(acc) => acc.intersection(&cl).copied().collect(),
            });
        }
        Ok(common.is_some_and(|s| s.is_empty()))
    }

    /// Chamber adjacency (closed chambers meet) at level `m`, by chamber rank.
    pub fn chamber_graph(&self, m: u32) -> Result<(Vec<LevelCell>, Vec<Vec<u32>>)> {
        let chambers = self.chambers_at_level(m)?;
        let lc = self.with_closure(m)?;
        let ls = self.with_chamber_star(m)?;
        let mut rank = vec![u32::MAX; lc.len()];
        for (i, c) in chambers.iter().enumerate() {
            rank[c.ix()] = i as u32;
        }
        let adj = chambers
            .iter()
            .map(|c| {
                let mut nb: Vec<u32> = lc
                    .closure(c.ix())
                    .iter()
                    .filter(|&&v| lc.dim(v as usize) == 0)
                    .flat_map(|&v| ls.chamber_star(v as usize).iter().map(|&x| rank[x as usize]))
                    .filter(|&x| x != rank[c.ix()])
                    .collect();
                nb.sort_unstable();
                nb.dedup();
                nb
            })
            .collect();
        Ok((chambers, adj))
    }

    /// For every `D_0` vertex, the level-`m` chambers not contained in its flower.
    fn flower_exit_groups(&self, m: u32, chambers: &[LevelCell]) -> Result<Vec<Vec<bool>>> {
        let anc = self.base_ancestors(m)?;
        let lc = self.with_closure(m)?;
        let base = self.rule().base();
        Ok(base
            .vertices()
            .map(|v| {
                chambers
                    .iter()
                    .map(|c| {
                        lc.closure(c.ix())
                            .iter()
                            .any(|&b| !base.is_face_or_equal(v, anc[b as usize] as usize))
                    })
                    .collect()
            })
            .collect())
    }

    pub fn joining_number(&self, m: u32, cap: usize) -> Result<JoiningReport> {
        let (chambers, adj) = self.chamber_graph(m)?;
        let groups = self.flower_exit_groups(m, &chambers)?;
        let n = chambers.len();
        let k = groups.len();
        let full = (1usize << k) - 1;
        let mut dp = vec![INF; (full + 1) * n];
        let mut back = vec![Back::Leaf; (full + 1) * n];

        for s in 1..=full {
            let row = s * n;
            if s.count_ones() == 1 {
                let g = s.trailing_zeros() as usize;
                for v in 0..n {
                    if groups[g][v] {
                        dp[row + v] = 1;
                    }
                }
            } else {
                let mut s1 = (s - 1) & s;
                while s1 > 0 {
                    let s2 = s ^ s1;
                    if s1 < s2 {
                        for v in 0..n {
                            let c = dp[s1 * n + v] + dp[s2 * n + v] - 1;
                            if c < dp[row + v] {
                                dp[row + v] = c;
                                back[row + v] = Back::Split(s1);
                            }
                        }
                    }
                    s1 = (s1 - 1) & s;
                }
            }
            // Unit node weights: relax along edges in order of cost.
            let mut buckets: Vec<Vec<u32>> = Vec::new();
            for v in 0..n {
                let d = dp[row + v];
                if d < INF {
                    if buckets.len() <= d as usize {
                        buckets.resize(d as usize + 1, Vec::new());
                    }
                    buckets[d as usize].push(v as u32);
                }
            }
            let mut d = 0;
            while d < buckets.len() {
                let mut i = 0;
                while i < buckets[d].len() {
                    let v = buckets[d][i] as usize;
                    i += 1;
                    if dp[row + v] != d as u32 {
                        continue;
                    }
                    for &u in &adj[v] {
                        let u = u as usize;
                        if dp[row + u] > d as u32 + 1 {
                            dp[row + u] = d as u32 + 1;
                            back[row + u] = Back::Via(v as u32);
                            if buckets.len() <= d + 1 {
                                buckets.push(Vec::new());
                            }
                            buckets[d + 1].push(u as u32);
                        }
                    }
                }
                d += 1;
            }
        }

        let best = (0..n).min_by_key(|&v| (dp[full * n + v], v));
        let (value, witness_ix) = match best {
            Some(v) if dp[full * n + v] < INF => {
                let mut set = BTreeSet::new();
                collect(&back, n, full, v, &mut set);
                (dp[full * n + v] as usize, set)
            }
            _ => (usize::MAX, BTreeSet::new()),
        };
        let cells: Vec<LevelCell> = witness_ix.iter().map(|&i| chambers[i]).collect();
        let verified = !cells.is_empty()
            && cells.len() == value
            && connected(&adj, &witness_ix)
            && self.joins_opposite_sides_of_base(&cells)?;
        Ok(JoiningReport {
            level: m,
            value: (value <= cap).then_some(value),
            cap,
            witness: cells.iter().map(|&c| self.address(c)).collect::<Result<_>>()?,
            verified,
        })
    }

    pub fn joining_numbers(&self, max_m: u32, cap: usize) -> Result<JoiningSummary> {
        let reports: Vec<JoiningReport> = (0..=max_m)
            .map(|m| self.joining_number(m, cap))
            .collect::<Result<_>>()?;
        let monotone = reports.windows(2).all(|w| match (w[0].value, w[1].value) {
            (Some(a), Some(b)) => a <= b,
            (Some(_), None) => true,
            (None, Some(_)) => false,
            (None, None) => true,
        });
        Ok(JoiningSummary { reports, monotone })
    }
}

fn collect(back: &[Back], n: usize, s: usize, v: usize, out: &mut BTreeSet<usize>) {
    out.insert(v);
    match back[s * n + v] {
        Back::Leaf => {}
        Back::Split(s1) => {
            collect(back, n, s1, v, out);
            collect(back, n, s ^ s1, v, out);
        }
        Back::Via(u) => collect(back, n, s, u as usize, out),
    }
}

fn connected(adj: &[Vec<u32>], set: &BTreeSet<usize>) -> bool {
    let Some(&start) = set.iter().next() else {
        return false;
    };
    let mut seen = BTreeSet::from([start]);
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for &u in &adj[v] {
            let u = u as usize;
            if set.contains(&u) && seen.insert(u) {
                stack.push(u);
            }
        }
    }
    seen.len() == set.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;

    #[test]
    fn one_chamber_joins_at_level_zero() {
        let t = Tower::from_example(&builtin::torus_doubling(2).unwrap());
        let r = t.joining_number(0, 16).unwrap();
        assert_eq!(r.value, Some(1));
        assert!(r.verified);
    }

    #[test]
    fn half_square_does_not_join() {
        let t = Tower::from_example(&builtin::torus_doubling(2).unwrap());
        let x = t.chambers_at_level(1).unwrap()[0];
        assert!(!t.joins_opposite_sides_of_base(&[x]).unwrap());
        assert!(!t.joins_opposite_sides_of_base(&[]).unwrap());
    }

    #[test]
    fn cap_is_reported() {
        let t = Tower::from_example(&builtin::torus_doubling(2).unwrap());
        let r = t.joining_number(2, 3).unwrap();
        assert_eq!(r.value, None);
    }
}
