//! Geometry of the cellular sequence under a flat realization: boxes of
//! level-`m` cells, diameters, distances, meshes, markings and Lebesgue numbers.
//!
//! A level-`m` cell `c` lies in a level-1 chamber `X`, and `f(c)` lies in
//! `f(X)`; its box is the branch inverse of `X` applied to the representative
//! of `f(c)` inside the box of `f(X)`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::realization::Cuboid;
use crate::tolerance;
use crate::tower::separation::PointAddress;
use crate::tower::{Level, LevelCell, Tower};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionReport {
    pub model: String,
    pub mesh: Vec<f64>,
    pub mesh_ratios: Vec<f64>,
    /// `exp` of the least-squares slope of `log mesh(m)`.
    pub fitted_rate: f64,
    pub flower_mesh: Vec<f64>,
    pub flower_ratios: Vec<f64>,
    pub expanding: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cover {
    /// Flowers of the level-`m` vertices.
    Flowers(u32),
    Whole,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LebesgueReport {
    pub cover: Cover,
    pub value: f64,
    pub sample_spacing: f64,
    pub samples: usize,
}

/// Marked points `p_m(c)` for every cell up to some level.
#[derive(Debug, Clone, PartialEq)]
pub struct Marking {
    dim: usize,
    levels: Vec<Vec<f64>>,
}

impl Marking {
    pub fn max_level(&self) -> u32 {
        self.levels.len() as u32 - 1
    }

    pub fn point(&self, c: LevelCell) -> &[f64] {
        let i = c.ix() * self.dim;
        &self.levels[c.level as usize][i..i + self.dim]
    }
}

fn level_box(l: &Level, dim: usize, i: usize) -> Cuboid {
    let data = l.boxes.get().expect("boxes built");
    let s = &data[2 * dim * i..2 * dim * (i + 1)];
    Cuboid::new(s[..dim].to_vec(), s[dim..].to_vec())
}

impl Tower {
    /// Level `m` with the box table built.
    pub fn with_boxes(&self, m: u32) -> Result<Arc<Level>> {
        let cur = self.level(m)?;
        if cur.boxes.get().is_some() {
            return Ok(cur);
        }
        let real = self.realization()?;
        let n = real.model.dim();
        let mut data = Vec::with_capacity(2 * n * cur.len());
        let mut push = |b: &Cuboid| {
            data.extend_from_slice(&b.lo);
            data.extend_from_slice(&b.hi);
        };
        match m {
            0 => real.base_boxes.iter().for_each(&mut push),
            1 => (0..cur.len()).for_each(|i| push(&real.refined_boxes[self.d1_index(i)])),
            _ => {
                let prev = self.with_boxes(m - 1)?;
                let l1 = self.level(1)?;
                for c in 0..cur.len() {
                    let q = level_box(&prev, n, cur.image(c));
                    let x = self.chart(cur.anc1(c));
                    let target = &real.base_boxes[l1.image(x)];
                    let lifted = real.model.snap_box(&q, target).ok_or_else(|| {
                        Error::InvalidRealization(format!("image of L{m}#{c} does not fit its chart"))
                    })?;
                    push(&real.branch(self.d1_index(x))?.apply_box(&lifted));
                }
            }
        }
        let _ = cur.boxes.set(data);
        Ok(cur)
    }

    pub fn geom_of(&self, c: LevelCell) -> Result<Cuboid> {
        let l = self.with_boxes(c.level)?;
        if c.ix() >= l.len() {
            return Err(Error::CellOutOfRange {
                level: c.level,
                index: c.index,
            });
        }
        Ok(level_box(&l, self.realization()?.model.dim(), c.ix()))
    }

    pub fn diam(&self, c: LevelCell) -> Result<f64> {
        Ok(self.realization()?.model.box_diam(&self.geom_of(c)?))
    }

    pub fn dist(&self, a: LevelCell, b: LevelCell) -> Result<f64> {
        Ok(self.realization()?.model.box_dist(&self.geom_of(a)?, &self.geom_of(b)?))
    }

    /// Diameters of all level-`m` chambers, in chamber order.
    pub fn chamber_diams(&self, m: u32) -> Result<Vec<f64>> {
        let model = &self.realization()?.model;
        let l = self.with_boxes(m)?;
        let n = model.dim();
        Ok(self
            .chambers_at_level(m)?
            .iter()
            .map(|c| model.box_diam(&level_box(&l, n, c.ix())))
            .collect())
    }

    pub fn mesh(&self, m: u32) -> Result<f64> {
        Ok(self.chamber_diams(m)?.into_iter().fold(0.0, f64::max))
    }

    /// Boxes of the chambers around vertex `v`, lifted to surround one
    /// representative of `v`.
    pub fn flower_chart(&self, v: LevelCell) -> Result<(Vec<f64>, Vec<Cuboid>)> {
        let model = &self.realization()?.model;
        let center = self.geom_of(v)?.lo;
        let mut boxes = Vec::new();
        for x in self.star_chambers(v)? {
            let b = self.geom_of(x)?;
            let target = Cuboid::new(
                (0..b.dim()).map(|i| center[i] - b.extent(i)).collect(),
                (0..b.dim()).map(|i| center[i] + b.extent(i)).collect(),
            );
            boxes.push(model.snap_box(&b, &target).ok_or_else(|| {
                Error::InvalidRealization(format!("chamber {x} does not surround vertex {v}"))
            })?);
        }
        Ok((center, boxes))
    }

    /// Diameter of the flower of a vertex.
    pub fn flower_diam(&self, v: LevelCell) -> Result<f64> {
        let model = &self.realization()?.model;
        let (_, boxes) = self.flower_chart(v)?;
        if let Some(hull) = box_hull(&boxes) {
            return Ok(model.box_diam(&hull));
        }
        let pts: Vec<Vec<f64>> = boxes.iter().flat_map(|b| b.sample_points()).collect();
        Ok(model.points_diam(&pts))
    }

    pub fn flower_mesh(&self, m: u32) -> Result<f64> {
        let mut best: f64 = 0.0;
        for v in self.vertices_at_level(m)? {
            best = best.max(self.flower_diam(v)?);
        }
        Ok(best)
    }

    pub fn expansion_check(&self, max_m: u32) -> Result<ExpansionReport> {
        let model = self.realization()?.model.name().to_owned();
        let mesh: Vec<f64> = (0..=max_m).map(|m| self.mesh(m)).collect::<Result<_>>()?;
        let flower_mesh: Vec<f64> = (0..=max_m).map(|m| self.flower_mesh(m)).collect::<Result<_>>()?;
        let ratios = |v: &[f64]| v.windows(2).map(|w| w[1] / w[0]).collect::<Vec<_>>();
        let mesh_ratios = ratios(&mesh);
        let flower_ratios = ratios(&flower_mesh);
        let fitted_rate = fitted_rate(&mesh);
        let decreasing = |r: &[f64]| r.iter().all(|&x| x < 1.0 - tolerance::METRIC_REL);
        // Level-0 flowers may wrap around the whole space, so only the overall
        // flower decay is required.
        let expanding = !mesh_ratios.is_empty()
            && decreasing(&mesh_ratios)
            && flower_mesh[flower_mesh.len() - 1] < flower_mesh[0]
            && fitted_rate < 1.0;
        Ok(ExpansionReport {
            model,
            mesh,
            mesh_ratios,
            fitted_rate,
            flower_mesh,
            flower_ratios,
            expanding,
        })
    }

    /// Carrier of a point at level `depth`.
    pub fn locate(&self, x: &[f64], depth: u32) -> Result<PointAddress> {
        let model = &self.realization()?.model;
        let n = model.dim();
        let l0 = self.with_boxes(0)?;
        let mut cur = (0..l0.len())
            .find(|&i| model.in_relative_interior(x, &level_box(&l0, n, i)))
            .ok_or_else(|| Error::Unlocated(x.to_vec()))?;
        for l in 1..=depth {
            let lv = self.with_boxes(l)?;
            cur = lv
                .children_of_prev(cur)
                .find(|&i| model.in_relative_interior(x, &level_box(&lv, n, i)))
                .ok_or_else(|| Error::Unlocated(x.to_vec()))?;
        }
        Ok(PointAddress {
            carrier: LevelCell::new(depth, cur as u32),
        })
    }

    /// Coordinates of an address: the vertex itself, else the box barycenter.
    pub fn point_of(&self, a: &PointAddress) -> Result<Vec<f64>> {
        let b = self.geom_of(a.carrier)?;
        Ok(if b.cell_dim() == 0 { b.lo } else { b.barycenter() })
    }

    /// `f(x)` through the branch inverse of a level-1 chamber containing `x`.
    pub fn forward_point(&self, x: &[f64]) -> Result<Vec<f64>> {
        let real = self.realization()?;
        let r = self.rule().refined();
        for y in r.chambers() {
            if let Some(p) = real.model.snap_point(x, &real.refined_boxes[y]) {
                return Ok(real.branch(y)?.invert(&p));
            }
        }
        Err(Error::Unlocated(x.to_vec()))
    }

    pub fn forward_k(&self, x: &[f64], k: u32) -> Result<Vec<f64>> {
        let mut p = x.to_vec();
        for _ in 0..k {
            p = self.forward_point(&p)?;
        }
        Ok(p)
    }

    /// `p_m(c)` from `p_0` by branch inverses. `base` defaults to barycenters.
    pub fn make_marking(&self, max_m: u32, base: Option<&[Vec<f64>]>) -> Result<Marking> {
        let real = self.realization()?;
        let model = &real.model;
        let n = model.dim();
        let mut p0 = Vec::with_capacity(n * real.base_boxes.len());
        for (i, b) in real.base_boxes.iter().enumerate() {
            let pt = match base {
                Some(pts) => pts
                    .get(i)
                    .cloned()
                    .ok_or_else(|| Error::Config(format!("no base point for cell {i}")))?,
                None => b.barycenter(),
            };
            if !model.in_relative_interior(&pt, b) {
                return Err(Error::NotInterior(self.rule().base().id(i).0.clone()));
            }
            p0.extend(pt);
        }
        let mut levels = vec![p0];
        let l1 = self.level(1)?;
        for m in 1..=max_m {
            let cur = self.level(m)?;
            let prev = &levels[m as usize - 1];
            let mut pts = Vec::with_capacity(n * cur.len());
            for c in 0..cur.len() {
                let q = cur.image(c);
                let x = self.chart(cur.anc1(c));
                let target = &real.base_boxes[l1.image(x)];
                let lifted = model
                    .snap_point(&prev[n * q..n * (q + 1)], target)
                    .ok_or_else(|| Error::InvalidRealization(format!("marked point of L{}#{q} off chart", m - 1)))?;
                pts.extend(real.branch(self.d1_index(x))?.apply(&lifted));
            }
            levels.push(pts);
        }
        Ok(Marking { dim: n, levels })
    }

    /// Largest quotient distance between `f(p_m(c))` and `p_{m-1}(f(c))`.
    pub fn marking_error(&self, marking: &Marking) -> Result<f64> {
        let model = &self.realization()?.model;
        let mut worst: f64 = 0.0;
        for m in 1..=marking.max_level() {
            for c in self.cells_at_level(m)? {
                let fx = self.forward_point(marking.point(c))?;
                let want = marking.point(self.image(c)?);
                worst = worst.max(model.dist(&fx, want));
            }
        }
        Ok(worst)
    }

    pub fn lebesgue_number(&self, cover: Cover) -> Result<LebesgueReport> {
        let real = self.realization()?;
        let model = &real.model;
        let base = self.rule().base();
        let m = match cover {
            Cover::Whole => {
                let pts: Vec<Vec<f64>> = base
                    .chambers()
                    .flat_map(|c| real.base_boxes[c].sample_points())
                    .collect();
                return Ok(LebesgueReport {
                    cover,
                    value: model.points_diam(&pts) / 2.0,
                    sample_spacing: 0.0,
                    samples: pts.len(),
                });
            }
            Cover::Flowers(m) => m,
        };
        let per_axis = 4usize << m;
        let lc = self.with_closure(m)?;
        let ls = self.with_chamber_star(m)?;
        let lb = self.with_boxes(m)?;
        let n = model.dim();
        let mut value = f64::INFINITY;
        let mut samples = 0;
        let mut spacing: f64 = 0.0;
        for ch in base.chambers() {
            let b = &real.base_boxes[ch];
            spacing = spacing.max((0..n).map(|i| b.extent(i)).fold(0.0, f64::max) / per_axis as f64);
            for code in 0..per_axis.pow(n as u32) {
                let mut k = code;
                let x: Vec<f64> = (0..n)
                    .map(|i| {
                        let t = (k % per_axis) as f64 + 0.5;
                        k /= per_axis;
                        b.lo[i] + t * b.extent(i) / per_axis as f64
                    })
                    .collect();
                samples += 1;
                let c = self.locate(&x, m)?.carrier.ix();
                let pb = Cuboid::point(&x);
                let mut best: f64 = 0.0;
                for &v in lc.closure(c).iter().filter(|&&v| lc.dim(v as usize) == 0) {
                    let mut d = f64::INFINITY;
                    for &xch in ls.chamber_star(v as usize) {
                        for &s in lc.closure(xch as usize) {
                            if lc.closure(s as usize).binary_search(&v).is_err() {
                                d = d.min(model.box_dist(&pb, &level_box(&lb, n, s as usize)));
                            }
                        }
                    }
                    best = best.max(d);
                }
                value = value.min(best);
            }
        }
        Ok(LebesgueReport {
            cover,
            value,
            sample_spacing: spacing,
            samples,
        })
    }
}

/// The bounding box of `boxes` if their union fills it.
fn box_hull(boxes: &[Cuboid]) -> Option<Cuboid> {
    let first = boxes.first()?;
    let n = first.dim();
    let mut hull = first.clone();
    for b in boxes {
        for i in 0..n {
            hull.lo[i] = hull.lo[i].min(b.lo[i]);
            hull.hi[i] = hull.hi[i].max(b.hi[i]);
        }
    }
    let vol = |b: &Cuboid| (0..n).map(|i| b.extent(i)).product::<f64>();
    let sum: f64 = boxes.iter().map(vol).sum();
    ((sum - vol(&hull)).abs() <= tolerance::SNAP * vol(&hull).max(1.0)).then_some(hull)
}

pub fn fitted_rate(values: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = values
        .iter()
        .enumerate()
        .filter(|(_, v)| **v > 0.0)
        .map(|(i, v)| (i as f64, v.ln()))
        .collect();
    if pts.len() < 2 {
        return 1.0;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxy / sxx).exp()
}
