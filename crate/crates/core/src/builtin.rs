//! Built-in model systems: torus doubling in dimension 2 and 3, the
//! pillowcase Lattès map, and the identity subdivision of a torus.
//!
//! All three are cut out of a cubical grid on `(R/PZ)^n`. A grid cell is a
//! product of per-axis pieces `(a, e)`: the point `a*h` when `e = 0`, the
//! interval `[a*h, (a+1)*h]` when `e = 1`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::complex::{CellComplex, CellId, CellSpec};
use crate::error::{Error, Result};
use crate::realization::{AffineBranch, Cuboid, Model, Realization};
use crate::rule::SubdivisionRule;

/// A rule together with its (optional) flat realization.
#[derive(Debug, Clone)]
pub struct Example {
    pub name: String,
    pub rule: SubdivisionRule,
    pub realization: Option<Realization>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExampleSpec {
    TorusDoubling(usize),
    Pillowcase,
    Identity,
    FromFile(PathBuf),
}

impl FromStr for ExampleSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "torus2" => ExampleSpec::TorusDoubling(2),
            "torus3" => ExampleSpec::TorusDoubling(3),
            "pillow" | "pillowcase" => ExampleSpec::Pillowcase,
            "identity" => ExampleSpec::Identity,
            path => ExampleSpec::FromFile(PathBuf::from(path)),
        })
    }
}

impl fmt::Display for ExampleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExampleSpec::TorusDoubling(n) => write!(f, "torus{n}"),
            ExampleSpec::Pillowcase => f.write_str("pillow"),
            ExampleSpec::Identity => f.write_str("identity"),
            ExampleSpec::FromFile(p) => write!(f, "{}", p.display()),
        }
    }
}

impl ExampleSpec {
    pub fn build(&self) -> Result<Example> {
        match self {
            ExampleSpec::TorusDoubling(n) => torus_doubling(*n),
            ExampleSpec::Pillowcase => Ok(pillowcase()),
            ExampleSpec::Identity => Ok(identity_rule()),
            ExampleSpec::FromFile(p) => load_rule(p),
        }
    }
}

type Key = Vec<(i64, u8)>;

struct Grid {
    dim: usize,
    cells_per_axis: i64,
    h: f64,
    quotient: bool,
    keys: Vec<Key>,
    index: BTreeMap<Key, usize>,
}

impl Grid {
    fn new(dim: usize, cells_per_axis: i64, h: f64, quotient: bool) -> Self {
        let mut g = Grid {
            dim,
            cells_per_axis,
            h,
            quotient,
            keys: Vec::new(),
            index: BTreeMap::new(),
        };
        let per_axis = 2 * cells_per_axis as usize;
        let mut reps = std::collections::BTreeSet::new();
        for code in 0..per_axis.pow(dim as u32) {
            let mut c = code;
            let mut key = Vec::with_capacity(dim);
            for _ in 0..dim {
                let piece = (c % per_axis) as i64;
                c /= per_axis;
                key.push((piece / 2, (piece % 2) as u8));
            }
            reps.insert(g.canonical(&key));
        }
        // Vertices first, then by dimension; stable order within a dimension.
        let mut keys: Vec<Key> = reps.into_iter().collect();
        keys.sort_by_key(|k| (k.iter().map(|p| p.1 as usize).sum::<usize>(), k.clone()));
        for (i, k) in keys.iter().enumerate() {
            g.index.insert(k.clone(), i);
        }
        g.keys = keys;
        g
    }

    fn negate(&self, key: &Key) -> Key {
        key.iter()
            .map(|&(a, e)| ((-a - e as i64).rem_euclid(self.cells_per_axis), e))
            .collect()
    }

    fn canonical(&self, key: &Key) -> Key {
        let k: Key = key
            .iter()
            .map(|&(a, e)| (a.rem_euclid(self.cells_per_axis), e))
            .collect();
        if self.quotient {
            let n = self.negate(&k);
            k.min(n)
        } else {
            k
        }
    }

    fn ix(&self, key: &Key) -> usize {
        self.index[&self.canonical(key)]
    }

    fn name(key: &Key) -> String {
        let d: usize = key.iter().map(|p| p.1 as usize).sum();
        let letter = ["v", "e", "f", "c"].get(d).copied().unwrap_or("x");
        let parts: Vec<String> = key
            .iter()
            .map(|&(a, e)| if e == 1 { format!("{a}+") } else { a.to_string() })
            .collect();
        format!("{letter}({})", parts.join(","))
    }

    fn immediate_faces(&self, key: &Key) -> Vec<Key> {
        let mut out = Vec::new();
        for i in 0..self.dim {
            let (a, e) = key[i];
            if e == 1 {
                for a2 in [a, a + 1] {
                    let mut k = key.clone();
                    k[i] = (a2, 0);
                    out.push(self.canonical(&k));
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }

    fn complex(&self) -> Result<CellComplex> {
        let specs = self
            .keys
            .iter()
            .map(|k| CellSpec {
                id: CellId(Self::name(k)),
                dim: k.iter().map(|p| p.1 as usize).sum(),
                faces: self.immediate_faces(k).iter().map(|f| CellId(Self::name(f))).collect(),
            })
            .collect();
        CellComplex::new(self.dim, specs)
    }

    fn cuboid(&self, key: &Key) -> Cuboid {
        Cuboid::new(
            key.iter().map(|&(a, _)| a as f64 * self.h).collect(),
            key.iter().map(|&(a, e)| (a + e as i64) as f64 * self.h).collect(),
        )
    }
}

// Per-axis minimal parent of a piece at the doubled resolution.
fn parent_piece((a, e): (i64, u8)) -> (i64, u8) {
    if e == 1 || a % 2 == 1 {
        (a.div_euclid(2), 1)
    } else {
        (a / 2, 0)
    }
}

fn doubling(name: &str, dim: usize, quotient: bool) -> Result<Example> {
    let period = 2.0;
    let coarse = Grid::new(dim, 2, 1.0, quotient);
    let fine = Grid::new(dim, 4, 0.5, quotient);
    let base = coarse.complex()?;
    let refined = fine.complex()?;
    let parent: Vec<usize> = fine
        .keys
        .iter()
        .map(|k| coarse.ix(&k.iter().map(|&p| parent_piece(p)).collect()))
        .collect();
    let image: Vec<usize> = fine.keys.iter().map(|k| coarse.ix(k)).collect();
    let model = if quotient {
        Model::Pillowcase { side: 1.0 }
    } else {
        Model::FlatTorus { side: period, dim }
    };
    let base_boxes: Vec<Cuboid> = coarse.keys.iter().map(|k| coarse.cuboid(k)).collect();
    let refined_boxes: Vec<Cuboid> = fine.keys.iter().map(|k| fine.cuboid(k)).collect();
    let mut branches = Vec::with_capacity(fine.keys.len());
    for (c, k) in fine.keys.iter().enumerate() {
        if k.iter().any(|p| p.1 == 0) {
            branches.push(None);
            continue;
        }
        // x -> 2x sends the chamber onto a representative of its image box.
        let doubled = Cuboid::new(
            refined_boxes[c].lo.iter().map(|v| 2.0 * v).collect(),
            refined_boxes[c].hi.iter().map(|v| 2.0 * v).collect(),
        );
        let target = &base_boxes[image[c]];
        let branch = [1.0, -1.0]
            .iter()
            .filter(|&&s| quotient || s > 0.0)
            .find_map(|&s| {
                let t: Vec<f64> = (0..dim)
                    .map(|i| target.lo[i] - (s * doubled.lo[i]).min(s * doubled.hi[i]))
                    .collect();
                let aligned = t.iter().all(|v| (v / period).fract().abs() < 1e-12);
                let fits = (0..dim).all(|i| {
                    ((s * doubled.lo[i]).max(s * doubled.hi[i]) + t[i] - target.hi[i]).abs() < 1e-12
                });
                (aligned && fits).then(|| AffineBranch {
                    scale: s / 2.0,
                    offset: t.iter().map(|v| -s * v / 2.0).collect(),
                })
            })
            .ok_or_else(|| Error::InvalidRealization(format!("no branch for {}", Grid::name(k))))?;
        branches.push(Some(branch));
    }
    Ok(Example {
        name: name.to_owned(),
        rule: SubdivisionRule::from_indices(base, refined, parent, image),
        realization: Some(Realization {
            model,
            base_boxes,
            refined_boxes,
            branches,
        }),
    })
}

/// Multiplication by 2 on `(R/2Z)^n`, `n` in {2, 3}.
pub fn torus_doubling(n: usize) -> Result<Example> {
    if !(2..=3).contains(&n) {
        return Err(Error::Config(format!("torus doubling is built for n = 2 or 3, not {n}")));
    }
    doubling(&format!("torus{n}"), n, false)
}

/// The Lattès map induced by doubling on the pillowcase sphere.
pub fn pillowcase() -> Example {
    doubling("pillow", 2, true).expect("pillowcase construction is fixed")
}

/// The identity map on a `4 x 4` cubical torus, with `D1 = D0`.
pub fn identity_rule() -> Example {
    let g = Grid::new(2, 4, 1.0, false);
    let base = g.complex().expect("grid complex is valid");
    let n = base.len();
    let boxes: Vec<Cuboid> = g.keys.iter().map(|k| g.cuboid(k)).collect();
    let branches = g
        .keys
        .iter()
        .map(|k| {
            k.iter().all(|p| p.1 == 1).then(|| AffineBranch {
                scale: 1.0,
                offset: vec![0.0; 2],
            })
        })
        .collect();
    Example {
        name: "identity".into(),
        rule: SubdivisionRule::from_indices(base.clone(), base, (0..n).collect(), (0..n).collect()),
        realization: Some(Realization {
            model: Model::FlatTorus { side: 4.0, dim: 2 },
            base_boxes: boxes.clone(),
            refined_boxes: boxes,
            branches,
        }),
    }
}

pub fn load_rule(path: &Path) -> Result<Example> {
    let text = std::fs::read_to_string(path)?;
    let mut ex = crate::json::rule_from_str(&text)?;
    ex.name = path.display().to_string();
    Ok(ex)
}
