//! Brute-force geometric complexes on dyadic grids, built without the tower.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use cellseq::{LevelCell, Model, Tower};

/// Integer box: per axis `[lo, lo + len]` with `len` in `{0, 1}`, grid units.
pub type Key = Vec<(i64, i64)>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quotient {
    Torus,
    Pillow,
}

pub struct GridOracle {
    pub dim: usize,
    /// Grid points per period.
    pub n: i64,
    pub quotient: Quotient,
    pub h: f64,
    pub cells: Vec<Key>,
    pub index: BTreeMap<Key, usize>,
    /// Faces (including the cell itself), sorted.
    pub faces: Vec<Vec<usize>>,
}

impl GridOracle {
    pub fn canonical(&self, k: &[(i64, i64)]) -> Key {
        let signs: &[i64] = match self.quotient {
            Quotient::Torus => &[1],
            Quotient::Pillow => &[1, -1],
        };
        signs
            .iter()
            .map(|&s| {
                k.iter()
                    .map(|&(lo, len)| {
                        let lo = if s == 1 { lo } else { -(lo + len) };
                        (lo.rem_euclid(self.n), len)
                    })
                    .collect::<Key>()
            })
            .min()
            .unwrap()
    }

    /// Level-`m` grid of a model whose level-0 cells are unit cubes.
    pub fn new(model: &Model, m: u32) -> Self {
        let (dim, period, quotient) = match model {
            Model::FlatTorus { side, dim } => (*dim, *side, Quotient::Torus),
            Model::Pillowcase { side } => (2, 2.0 * side, Quotient::Pillow),
        };
        let h = 0.5f64.powi(m as i32);
        let n = (period / h).round() as i64;
        let mut me = GridOracle {
            dim,
            n,
            quotient,
            h,
            cells: Vec::new(),
            index: BTreeMap::new(),
            faces: Vec::new(),
        };
        let mut all = BTreeSet::new();
        let total = (2 * n).pow(dim as u32);
        for code in 0..total {
            let mut c = code;
            let k: Key = (0..dim)
                .map(|_| {
                    let v = c % (2 * n);
                    c /= 2 * n;
                    (v / 2, v % 2)
                })
                .collect();
            all.insert(me.canonical(&k));
        }
        me.cells = all.into_iter().collect();
        me.index = me.cells.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        me.faces = me
            .cells
            .iter()
            .map(|k| {
                let mut fs: Vec<Key> = vec![Vec::new()];
                for &(lo, len) in k {
                    let options: Vec<(i64, i64)> = if len == 0 {
                        vec![(lo, 0)]
                    } else {
                        vec![(lo, 0), (lo + 1, 0), (lo, 1)]
                    };
                    fs = fs
                        .into_iter()
                        .flat_map(|p| {
                            options.iter().map(move |o| {
                                let mut q = p.clone();
                                q.push(*o);
                                q
                            })
                        })
                        .collect();
                }
                let mut ix: Vec<usize> = fs.iter().map(|f| me.index[&me.canonical(f)]).collect();
                ix.sort_unstable();
                ix.dedup();
                ix
            })
            .collect();
        me
    }

    pub fn dim_of(&self, i: usize) -> usize {
        self.cells[i].iter().map(|p| p.1 as usize).sum()
    }

    pub fn vertex_set(&self, i: usize) -> Vec<usize> {
        self.faces[i].iter().copied().filter(|&f| self.dim_of(f) == 0).collect()
    }

    /// Oracle key of a box given in model coordinates.
    pub fn key_of(&self, lo: &[f64], hi: &[f64]) -> Key {
        let k: Key = (0..self.dim)
            .map(|i| {
                let a = (lo[i] / self.h).round() as i64;
                let b = (hi[i] / self.h).round() as i64;
                (a, b - a)
            })
            .collect();
        self.canonical(&k)
    }
}

/// Map every level-`m` tower cell to its oracle cell.
pub fn tower_to_oracle(t: &Tower, o: &GridOracle, m: u32) -> Vec<usize> {
    t.cells_at_level(m)
        .unwrap()
        .into_iter()
        .map(|c| {
            let b = t.geom_of(c).unwrap();
            let k = o.key_of(&b.lo, &b.hi);
            *o.index.get(&k).unwrap_or_else(|| panic!("{c} has box {b:?} off the grid"))
        })
        .collect()
}

/// Checks the full isomorphism; returns a description of the first mismatch.
pub fn isomorphic(t: &Tower, m: u32) -> Result<(), String> {
    let model = t.realization().unwrap().model.clone();
    let o = GridOracle::new(&model, m);
    let map = tower_to_oracle(t, &o, m);
    let n = map.len();
    if n != o.cells.len() {
        return Err(format!("level {m}: {n} tower cells, {} oracle cells", o.cells.len()));
    }
    let mut seen = vec![false; n];
    for &j in &map {
        if std::mem::replace(&mut seen[j], true) {
            return Err(format!("level {m}: two cells share oracle cell {:?}", o.cells[j]));
        }
    }
    for i in 0..n {
        let c = LevelCell::new(m, i as u32);
        if t.dim(c).unwrap() != o.dim_of(map[i]) {
            return Err(format!("{c}: dimension differs"));
        }
        let mut mine: Vec<usize> = t.closure(c).unwrap().iter().map(|f| map[f.ix()]).collect();
        mine.sort_unstable();
        if mine != o.faces[map[i]] {
            return Err(format!("{c}: faces differ"));
        }
    }
    // Intersection: two closed cells meet iff their vertex sets meet.
    let mut star_of_vertex: Vec<Vec<usize>> = vec![Vec::new(); n];
    for j in 0..n {
        for v in o.vertex_set(j) {
            star_of_vertex[v].push(j);
        }
    }
    let mut inv = vec![0; n];
    for (k, &j) in map.iter().enumerate() {
        inv[j] = k;
    }
    for i in 0..n {
        let a = LevelCell::new(m, i as u32);
        let mut oracle: BTreeSet<usize> = BTreeSet::new();
        for v in o.vertex_set(map[i]) {
            oracle.extend(star_of_vertex[v].iter().copied());
        }
        let mut mine: BTreeSet<usize> = BTreeSet::new();
        for v in t.closure(a).unwrap() {
            if t.dim(v).unwrap() == 0 {
                mine.extend(t.star(v).unwrap().iter().map(|s| map[s.ix()]));
            }
        }
        if mine != oracle {
            return Err(format!("{a}: intersecting cells differ"));
        }
        for j in (0..n).step_by(5) {
            let b = LevelCell::new(m, inv[j] as u32);
            if t.intersects_at_level(a, b).unwrap() != oracle.contains(&j) {
                return Err(format!("{a} vs {b}: intersects disagrees"));
            }
        }
    }
    Ok(())
}
