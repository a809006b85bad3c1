//! Points as depth-`M` carriers and the separation level `m(x, y)`.

use serde::{Deserialize, Serialize};

use super::{LevelCell, Tower};
use crate::error::{Error, Result};

/// A point given by its carrier at level `depth`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PointAddress {
    pub carrier: LevelCell,
}

impl PointAddress {
    pub fn depth(&self) -> u32 {
        self.carrier.level
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Separation {
    Exact(u32),
    /// Chambers still meet at the deepest level inspected.
    Truncated { depth: u32 },
}

impl Separation {
    pub fn exact(self) -> Option<u32> {
        match self {
            Separation::Exact(m) => Some(m),
            Separation::Truncated { .. } => None,
        }
    }

    pub fn is_truncated(self) -> bool {
        matches!(self, Separation::Truncated { .. })
    }

    /// The level, with truncated pairs scored as the depth.
    pub fn scored(self) -> u32 {
        match self {
            Separation::Exact(m) => m,
            Separation::Truncated { depth } => depth,
        }
    }
}

impl Tower {
    /// The address of a level-`l` vertex at depth `depth >= l`.
    pub fn vertex_address(&self, v: LevelCell, depth: u32) -> Result<PointAddress> {
        if self.dim(v)? != 0 {
            return Err(Error::NotVertex(v.to_string()));
        }
        if depth < v.level {
            return Err(Error::LevelMismatch(depth, v.level));
        }
        let mut cur = v;
        while cur.level < depth {
            let next = self.level(cur.level + 1)?;
            let child = next
                .children_of_prev(cur.ix())
                .find(|&c| next.dim(c) == 0)
                .ok_or_else(|| Error::InvalidRule(format!("vertex {cur} has no vertex child")))?;
            cur = LevelCell::new(cur.level + 1, child as u32);
        }
        Ok(PointAddress { carrier: cur })
    }

    /// Addresses of all level-`l` vertices at depth `depth`.
    pub fn vertex_sample(&self, l: u32, depth: u32) -> Result<Vec<PointAddress>> {
        self.vertices_at_level(l)?
            .into_iter()
            .map(|v| self.vertex_address(v, depth))
            .collect()
    }

    /// Sorted vertex set of the closed chambers around the level-`l` carrier.
    fn chamber_vertices(&self, x: &PointAddress, l: u32) -> Result<Vec<u32>> {
        let c = self.ancestor(x.carrier, l)?;
        let ls = self.with_chamber_star(l)?;
        let lc = self.with_closure(l)?;
        let mut out = Vec::new();
        for &ch in ls.chamber_star(c.ix()) {
            out.extend(
                lc.closure(ch as usize)
                    .iter()
                    .copied()
                    .filter(|&v| lc.dim(v as usize) == 0),
            );
        }
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    /// `m(x, y)`: the deepest level at which a chamber containing `x` meets
    /// one containing `y`; `0` if none does.
    pub fn separation_level(&self, x: &PointAddress, y: &PointAddress) -> Result<Separation> {
        if x.depth() != y.depth() {
            return Err(Error::LevelMismatch(x.depth(), y.depth()));
        }
        let depth = x.depth();
        let mut last = None;
        for l in 0..=depth {
            let vx = self.chamber_vertices(x, l)?;
            let vy = self.chamber_vertices(y, l)?;
            if sorted_meet(&vx, &vy) {
                last = Some(l);
            } else {
                break;
            }
        }
        Ok(match last {
            Some(l) if l == depth => Separation::Truncated { depth },
            Some(l) => Separation::Exact(l),
            None => Separation::Exact(0),
        })
    }

    pub fn image_address(&self, x: &PointAddress) -> Result<PointAddress> {
        Ok(PointAddress {
            carrier: self.image(x.carrier)?,
        })
    }

    /// All-pairs separation levels over a sample of equal depth.
    pub fn separation_table(&self, points: &[PointAddress]) -> Result<SeparationTable> {
        let Some(first) = points.first() else {
            return Err(Error::EmptySample);
        };
        let depth = first.depth();
        if let Some(p) = points.iter().find(|p| p.depth() != depth) {
            return Err(Error::LevelMismatch(p.depth(), depth));
        }
        let n = points.len();
        let words = n.div_ceil(64);
        // code[i*n+j] = number of consecutive passing levels starting at 0.
        let mut passes = vec![0u8; n * n];
        for l in 0..=depth {
            let lv = self.level(l)?;
            let verts: Vec<Vec<u32>> = points
                .iter()
                .map(|p| self.chamber_vertices(p, l))
                .collect::<Result<_>>()?;
            let mut index = vec![Vec::new(); lv.len()];
            for (i, vs) in verts.iter().enumerate() {
                for &v in vs {
                    index[v as usize].push(i);
                }
            }
            let mut row = vec![0u64; words];
            for (i, vs) in verts.iter().enumerate() {
                row.iter_mut().for_each(|w| *w = 0);
                for &v in vs {
                    for &j in &index[v as usize] {
                        row[j / 64] |= 1 << (j % 64);
                    }
                }
                let base = i * n;
                for j in 0..n {
                    if passes[base + j] as u32 == l && row[j / 64] >> (j % 64) & 1 == 1 {
                        passes[base + j] += 1;
                    }
                }
            }
        }
        Ok(SeparationTable {
            depth,
            points: points.to_vec(),
            passes,
        })
    }
}

fn sorted_meet(a: &[u32], b: &[u32]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return true,
        }
    }
    false
}

#[derive(Debug, Clone)]
pub struct SeparationTable {
    pub depth: u32,
    pub points: Vec<PointAddress>,
    passes: Vec<u8>,
}

impl SeparationTable {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> Separation {
        let p = self.passes[i * self.len() + j] as u32;
        if p == self.depth + 1 {
            Separation::Truncated { depth: self.depth }
        } else {
            Separation::Exact(p.saturating_sub(1))
        }
    }

    pub fn truncated_pairs(&self) -> usize {
        let n = self.len();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.get(i, j).is_truncated())
            .count()
    }

    // Score used for triples: equal points count as +infinity, truncated
    // distinct points as the depth.
    fn score(&self, i: usize, j: usize) -> u32 {
        if i == j || self.points[i] == self.points[j] {
            u32::MAX
        } else {
            self.get(i, j).scored()
        }
    }

    /// `max over triples of min(m(x,z), m(z,y)) - m(x,y)`.
    pub fn hyperbolicity_k0(&self) -> u32 {
        let n = self.len();
        let words = n.div_ceil(64);
        let depth = self.depth;
        // balls[t][i] = { z : score(i, z) >= t }
        let balls: Vec<Vec<u64>> = (0..=depth)
            .map(|t| {
                let mut b = vec![0u64; n * words];
                for i in 0..n {
                    for z in 0..n {
                        if self.score(i, z) >= t {
                            b[i * words + z / 64] |= 1 << (z % 64);
                        }
                    }
                }
                b
            })
            .collect();
        let mut k0 = 0;
        for x in 0..n {
            for y in x + 1..n {
                let m = self.score(x, y);
                if m >= depth {
                    continue;
                }
                let mut t = m + 1;
                while t <= depth {
                    let b = &balls[t as usize];
                    let (bx, by) = (&b[x * words..(x + 1) * words], &b[y * words..(y + 1) * words]);
                    if !bx.iter().zip(by).any(|(u, v)| u & v != 0) {
                        break;
                    }
                    t += 1;
                }
                k0 = k0.max(t - 1 - m);
            }
        }
        k0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationCheck {
    pub pairs: usize,
    pub violations: usize,
    pub min_drop_margin: i64,
}

impl Tower {
    /// Checks `m(f x, f y) >= m(x, y) - 1` on every pair of the table.
    pub fn iteration_check(&self, table: &SeparationTable) -> Result<IterationCheck> {
        let images: Vec<PointAddress> = table
            .points
            .iter()
            .map(|p| self.image_address(p))
            .collect::<Result<_>>()?;
        let mut uniq = images.clone();
        uniq.sort();
        uniq.dedup();
        let slot: Vec<usize> = images
            .iter()
            .map(|p| uniq.binary_search(p).expect("image in list"))
            .collect();
        let img = self.separation_table(&uniq)?;
        let n = table.len();
        let mut violations = 0;
        let mut margin = i64::MAX;
        let mut pairs = 0;
        for x in 0..n {
            for y in x + 1..n {
                pairs += 1;
                let before = table.get(x, y);
                let (a, b) = (slot[x], slot[y]);
                let after = if a == b {
                    None
                } else {
                    match img.get(a, b) {
                        Separation::Exact(v) => Some(v as i64),
                        Separation::Truncated { .. } => None,
                    }
                };
                let ok = match (before, after) {
                    (_, None) => true,
                    (Separation::Truncated { .. }, Some(_)) => false,
                    (Separation::Exact(m), Some(v)) => {
                        margin = margin.min(v - (m as i64 - 1));
                        v >= m as i64 - 1
                    }
                };
                if !ok {
                    violations += 1;
                }
            }
        }
        Ok(IterationCheck {
            pairs,
            violations,
            min_drop_margin: if margin == i64::MAX { 0 } else { margin },
        })
    }
}
