//! Numeric estimates of the quasisymmetry, BQS and CXC quantities of a
//! realized cellular sequence. Every reported bound is an empirical bound over
//! the sampled range; nothing is extrapolated.

use std::collections::BTreeMap;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{fitted_rate, ExpansionReport, Marking};
use crate::realization::Cuboid;
use crate::tower::flowers::ReachabilityReport;
use crate::tower::{LevelCell, Tower};
use crate::visual::{VisualMetricConfig, VisualMetricReport};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QVConstants {
    pub max_m: u32,
    /// `alpha[k-1]`, `beta[k-1]`: extreme ratios `diam Z / diam W` over
    /// intersecting chambers `Z` of level `m` and `W` of level `m + k`.
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub alpha_increasing: bool,
    /// Per level, `min dist(Z, W) / diam Z` over disjoint chambers; `None`
    /// when every pair meets.
    pub lambda_sep_by_level: Vec<Option<f64>>,
    pub lambda_sep: Option<f64>,
    /// `(depth, mu)` from vertex pairs with untruncated separation level.
    pub mu_by_depth: Vec<(u32, f64)>,
    pub mu: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BqsSample {
    pub level: u32,
    pub t: f64,
    pub r: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelEnvelope {
    pub level: u32,
    pub samples: usize,
    pub rejected: usize,
    /// Step function `(t, eta)`: `eta` is the largest `r` among samples with
    /// ratio at most `t`.
    pub steps: Vec<(f64, f64)>,
    pub min_ratio: f64,
    pub max_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BQSEnvelope {
    pub seed: u64,
    pub levels: Vec<LevelEnvelope>,
    /// Extremes of `eta(t) / t` over all levels and steps.
    pub min_eta_over_t: f64,
    pub max_eta_over_t: f64,
    /// Largest ratio between two levels' envelopes at a shared probe `t`.
    pub stability_factor: f64,
    /// `eta(t1 t2) <= 2 eta(t1) eta(t2)` on the probe grid (estimator QA).
    pub submultiplicative: bool,
    pub samples: Vec<BqsSample>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Approximation {
    /// Deepest level with a flower containing the sample, `-1` if none.
    pub level: i32,
    pub vertex: Option<LevelCell>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Distortion {
    pub samples: usize,
    /// Extremes of `image / source` over the sampled pairs.
    pub min_ratio: f64,
    pub max_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CXCReport {
    pub expans: ExpansionReport,
    /// Flower diameters decay like `C theta^m`.
    pub theta: f64,
    pub c: f64,
    /// `B(x, r) ⊆ U ⊆ B(x, K r)` for every vertex flower.
    pub k: f64,
    /// Largest local degree of `f^k` on a flower component over all windows.
    pub deg_max: usize,
    /// Roundness of `f^k(U)` against roundness of `U`.
    pub round: Distortion,
    /// Relative diameters of nested flowers before and after `f^k`.
    pub diam: Distortion,
    /// Combinatorial reachability, a proxy for irreducibility.
    pub irred_proxy: ReachabilityReport,
    pub expanding: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QsModulus {
    pub points: usize,
    pub triples: usize,
    /// Nondecreasing step function `(t, theta)`.
    pub steps: Vec<(f64, f64)>,
    /// `max theta(t) / t`: the modulus is bounded by this multiple of `t`.
    pub linear_slope: f64,
    /// `max theta(t) / (1 + t)`.
    pub affine_constant: f64,
}

/// Running maximum of `r` over `t`, sorted by `t`.
fn envelope(mut pairs: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut steps: Vec<(f64, f64)> = Vec::new();
    let mut best = f64::NEG_INFINITY;
    for (t, r) in pairs {
        if r > best {
            best = r;
        }
        match steps.last_mut() {
            Some(last) if last.0 == t => last.1 = best,
            _ => steps.push((t, best)),
        }
    }
    steps
}

fn eval_steps(steps: &[(f64, f64)], t: f64) -> Option<f64> {
    let i = steps.partition_point(|s| s.0 <= t);
    (i > 0).then(|| steps[i - 1].1)
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

/// Points along the axis-parallel path `a -> (b_0, a_1, ..) -> .. -> b`.
fn l_path(a: &[f64], b: &[f64], per_leg: usize) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut corners = vec![a.to_vec()];
    let mut cur = a.to_vec();
    for i in 0..n {
        cur[i] = b[i];
        corners.push(cur.clone());
    }
    let mut out = vec![a.to_vec()];
    for w in corners.windows(2) {
        if w[0] == w[1] {
            continue;
        }
        for s in 1..=per_leg {
            let u = s as f64 / per_leg as f64;
            out.push((0..n).map(|i| w[0][i] + u * (w[1][i] - w[0][i])).collect());
        }
    }
    out
}

impl Tower {
    /// Diameters of level-`m` cells, indexed by cell.
    fn cell_diams(&self, m: u32) -> Result<Vec<f64>> {
        let model = &self.realization()?.model;
        (0..self.level(m)?.len())
            .map(|i| Ok(model.box_diam(&self.geom_of(LevelCell::new(m, i as u32))?)))
            .collect()
    }

    pub fn qv_constants(&self, max_m: u32, max_k: u32) -> Result<QVConstants> {
        let model = self.realization()?.model.clone();
        let diams: Vec<Vec<f64>> = (0..=max_m).map(|m| self.cell_diams(m)).collect::<Result<_>>()?;
        let mut alpha = Vec::new();
        let mut beta = Vec::new();
        for k in 1..=max_k {
            let mut lo = f64::INFINITY;
            let mut hi: f64 = 0.0;
            for m in 0..=max_m.saturating_sub(k) {
                if m + k > max_m {
                    break;
                }
                let coarse = self.with_chamber_star(m)?;
                let fine = self.with_chamber_star(m + k)?;
                for v in 0..fine.len() {
                    if fine.dim(v) != 0 {
                        continue;
                    }
                    let c = self.ancestor(LevelCell::new(m + k, v as u32), m)?;
                    let zs = coarse.chamber_star(c.ix());
                    let ws = fine.chamber_star(v);
                    let dz = |f: fn(f64, f64) -> f64, init| zs.iter().map(|&z| diams[m as usize][z as usize]).fold(init, f);
                    let dw = |f: fn(f64, f64) -> f64, init| ws.iter().map(|&w| diams[(m + k) as usize][w as usize]).fold(init, f);
                    lo = lo.min(dz(f64::min, f64::INFINITY) / dw(f64::max, 0.0));
                    hi = hi.max(dz(f64::max, 0.0) / dw(f64::min, f64::INFINITY));
                }
            }
            if lo.is_finite() {
                alpha.push(lo);
                beta.push(hi);
            }
        }
        let alpha_increasing = alpha.windows(2).all(|w| w[1] > w[0]);

        let mut lambda_sep_by_level = Vec::new();
        for m in 0..=max_m {
            let lc = self.with_closure(m)?;
            let chambers = self.chambers_at_level(m)?;
            let boxes: Vec<Cuboid> = chambers.iter().map(|&c| self.geom_of(c)).collect::<Result<_>>()?;
            let mut best: Option<f64> = None;
            for a in 0..chambers.len() {
                for b in a + 1..chambers.len() {
                    if sorted_meet(lc.closure(chambers[a].ix()), lc.closure(chambers[b].ix())) {
                        continue;
                    }
                    let d = model.box_dist(&boxes[a], &boxes[b]);
                    let da = diams[m as usize][chambers[a].ix()];
                    let db = diams[m as usize][chambers[b].ix()];
                    let r = d / da.max(db);
                    best = Some(best.map_or(r, |x| x.min(r)));
                }
            }
            lambda_sep_by_level.push(best);
        }
        let lambda_sep = lambda_sep_by_level.iter().flatten().copied().reduce(f64::min);

        let mut mu_by_depth = Vec::new();
        for depth in 2..=max_m.max(2) {
            mu_by_depth.push((depth, self.mu_at_depth(depth)?));
        }
        let mu = mu_by_depth.iter().map(|p| p.1).fold(1.0, f64::max);
        Ok(QVConstants {
            max_m,
            alpha,
            beta,
            alpha_increasing,
            lambda_sep_by_level,
            lambda_sep,
            mu_by_depth,
            mu,
        })
    }

    fn mu_at_depth(&self, depth: u32) -> Result<f64> {
        let model = &self.realization()?.model;
        let pts = self.vertex_sample(depth - 2, depth)?;
        let table = self.separation_table(&pts)?;
        let coords: Vec<Vec<f64>> = pts.iter().map(|p| self.point_of(p)).collect::<Result<_>>()?;
        let mut mu: f64 = 1.0;
        for i in 0..pts.len() {
            for j in 0..pts.len() {
                let Some(m) = table.get(i, j).exact() else {
                    continue;
                };
                if i == j {
                    continue;
                }
                let d = model.dist(&coords[i], &coords[j]);
                let c = self.ancestor(pts[i].carrier, m)?;
                for z in self.star_chambers(c)? {
                    let r = d / self.diam(z)?;
                    mu = mu.max(r).max(1.0 / r);
                }
            }
        }
        Ok(mu)
    }

    /// Deepest vertex flower (levels `0..=max_level`) containing every point.
    pub fn approximation_of(&self, points: &[Vec<f64>], max_level: u32) -> Result<Approximation> {
        let model = &self.realization()?.model;
        if points.is_empty() || model.points_diam(points) == 0.0 {
            return Err(Error::DegenerateContinuum);
        }
        let mut found = Approximation { level: -1, vertex: None };
        for m in 0..=max_level {
            let lc = self.with_closure(m)?;
            let mut common: Option<Vec<u32>> = None;
            for x in points {
                let c = self.locate(x, m)?.carrier.ix();
                let vs: Vec<u32> = lc
                    .closure(c)
                    .iter()
                    .copied()
                    .filter(|&v| lc.dim(v as usize) == 0)
                    .collect();
                common = Some(match common {
                    None => vs,
                    Some(acc) => acc.into_iter().filter(|v| vs.binary_search(v).is_ok()).collect(),
                });
                if common.as_ref().is_some_and(|c| c.is_empty()) {
                    break;
                }
            }
            match common.and_then(|c| c.first().copied()) {
                Some(v) => {
                    found = Approximation {
                        level: m as i32,
                        vertex: Some(LevelCell::new(m, v)),
                    }
                }
                None => break,
            }
        }
        Ok(found)
    }

    /// Ratios `t = diam E / diam F` and `r = diam f^m E / diam f^m F` for
    /// L-shaped polylines `E`, `F` through markings of level-`(m+2)` chambers
    /// inside level-`m` flowers, sharing one endpoint.
    pub fn bqs_envelope(&self, levels: std::ops::RangeInclusive<u32>, seed: u64) -> Result<BQSEnvelope> {
        const FLOWERS: usize = 6;
        const TRIPLES: usize = 24;
        const PER_LEG: usize = 8;
        let model = self.realization()?.model.clone();
        let top = *levels.end();
        let marking = self.make_marking(top + 2, None)?;
        let mut out_levels = Vec::new();
        let mut all = Vec::new();
        for m in levels {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (u64::from(m) << 32));
            let verts = self.vertices_at_level(m)?;
            let chosen = sample(&mut rng, verts.len(), FLOWERS.min(verts.len())).into_vec();
            let mut pairs = Vec::new();
            let mut rejected = 0;
            for vi in chosen {
                let v = verts[vi];
                let (_, boxes) = self.flower_chart(v)?;
                let marks = self.flower_marks(v, m + 2, &marking, &boxes)?;
                if marks.len() < 3 {
                    continue;
                }
                for _ in 0..TRIPLES {
                    let ix = sample(&mut rng, marks.len(), 3).into_vec();
                    let (a, b, c) = (&marks[ix[0]], &marks[ix[1]], &marks[ix[2]]);
                    let e = l_path(a, b, PER_LEG);
                    let f = l_path(a, c, PER_LEG);
                    let (de, df) = (model.points_diam(&e), model.points_diam(&f));
                    if de == 0.0 || df == 0.0 {
                        rejected += 1;
                        continue;
                    }
                    let fe: Vec<Vec<f64>> = e.iter().map(|p| self.forward_k(p, m)).collect::<Result<_>>()?;
                    let ff: Vec<Vec<f64>> = f.iter().map(|p| self.forward_k(p, m)).collect::<Result<_>>()?;
                    let (dfe, dff) = (model.points_diam(&fe), model.points_diam(&ff));
                    if dff == 0.0 {
                        rejected += 1;
                        continue;
                    }
                    pairs.push((de / df, dfe / dff));
                }
            }
            all.extend(pairs.iter().map(|&(t, r)| BqsSample { level: m, t, r }));
            let steps = envelope(pairs.clone());
            let ratios = steps.iter().map(|s| s.1 / s.0);
            out_levels.push(LevelEnvelope {
                level: m,
                samples: pairs.len(),
                rejected,
                min_ratio: ratios.clone().fold(f64::INFINITY, f64::min),
                max_ratio: ratios.fold(0.0, f64::max),
                steps,
            });
        }
        let min_eta_over_t = out_levels.iter().map(|l| l.min_ratio).fold(f64::INFINITY, f64::min);
        let max_eta_over_t = out_levels.iter().map(|l| l.max_ratio).fold(0.0, f64::max);

        let probes = [0.25, 0.5, 1.0, 2.0, 4.0];
        let mut stability_factor: f64 = 1.0;
        for &t in &probes {
            let vals: Vec<f64> = out_levels.iter().filter_map(|l| eval_steps(&l.steps, t)).collect();
            if let (Some(lo), Some(hi)) = (vals.iter().copied().reduce(f64::min), vals.iter().copied().reduce(f64::max)) {
                if lo > 0.0 {
                    stability_factor = stability_factor.max(hi / lo);
                }
            }
        }
        let merged = envelope(all.iter().map(|s| (s.t, s.r)).collect());
        let submultiplicative = probes.iter().all(|&a| {
            probes.iter().all(|&b| {
                match (eval_steps(&merged, a * b), eval_steps(&merged, a), eval_steps(&merged, b)) {
                    (Some(ab), Some(ea), Some(eb)) => ab <= 2.0 * ea * eb,
                    _ => true,
                }
            })
        });
        Ok(BQSEnvelope {
            seed,
            levels: out_levels,
            min_eta_over_t,
            max_eta_over_t,
            stability_factor,
            submultiplicative,
            samples: all,
        })
    }

    /// Marked points of level-`l` chambers inside the flower of `v`, in the
    /// flower's chart.
    fn flower_marks(&self, v: LevelCell, l: u32, marking: &Marking, boxes: &[Cuboid]) -> Result<Vec<Vec<f64>>> {
        let model = &self.realization()?.model;
        let star = self.star_chambers(v)?;
        let mut out = Vec::new();
        for (x, b) in star.iter().zip(boxes) {
            let mut frontier = vec![*x];
            for lv in x.level + 1..=l {
                let next = self.level(lv)?;
                frontier = frontier
                    .iter()
                    .flat_map(|c| next.children_of_prev(c.ix()).map(move |q| LevelCell::new(lv, q as u32)))
                    .filter(|&q| next.dim(q.ix()) == self.dim_top())
                    .collect();
            }
            for c in frontier {
                let p = model
                    .snap_point(marking.point(c), b)
                    .ok_or_else(|| Error::InvalidRealization(format!("marked point of {c} outside its flower chart")))?;
                out.push(p);
            }
        }
        Ok(out)
    }

    /// Inner and outer radii of the flower of a vertex about the vertex.
    fn flower_radii(&self, v: LevelCell) -> Result<(f64, f64)> {
        let model = &self.realization()?.model;
        let (center, boxes) = self.flower_chart(v)?;
        let pc = Cuboid::point(&center);
        let lc = self.with_closure(v.level)?;
        let mut inner = f64::INFINITY;
        for x in self.star_chambers(v)? {
            for &s in lc.closure(x.ix()) {
                if lc.closure(s as usize).binary_search(&v.index).is_err() {
                    inner = inner.min(model.box_dist(&pc, &self.geom_of(LevelCell::new(v.level, s))?));
                }
            }
        }
        let outer = boxes
            .iter()
            .flat_map(|b| b.sample_points())
            .map(|p| model.dist(&center, &p))
            .fold(0.0, f64::max);
        Ok((inner, outer))
    }

    pub fn cxc_report(&self, max_m: u32) -> Result<CXCReport> {
        let expans = self.expansion_check(max_m)?;
        let fm = &expans.flower_mesh;
        // Level-0 flowers can cover most of the space; fit from level 1.
        let theta = if fm.len() > 2 { fitted_rate(&fm[1..]) } else { fitted_rate(fm) };
        let c = (0..fm.len())
            .map(|m| fm[m] / (fm[0] * theta.powi(m as i32)))
            .fold(1.0, f64::max);

        let mut deg_max = 0;
        let mut roundness: Vec<BTreeMap<u32, f64>> = Vec::new();
        let mut fdiam: Vec<BTreeMap<u32, f64>> = Vec::new();
        let mut k: f64 = 1.0;
        for m in 0..=max_m {
            let ls = self.with_chamber_star(m)?;
            let mut rm = BTreeMap::new();
            let mut dm = BTreeMap::new();
            for v in self.vertices_at_level(m)? {
                let (inner, outer) = self.flower_radii(v)?;
                let round = outer / inner;
                k = k.max(round);
                rm.insert(v.index, round);
                dm.insert(v.index, self.flower_diam(v)?);
                for j in 1..=m {
                    let w = self.image_k(v, j)?;
                    let lw = self.with_chamber_star(m - j)?;
                    let d = ls.chamber_star(v.ix()).len() / lw.chamber_star(w.ix()).len().max(1);
                    deg_max = deg_max.max(d);
                }
            }
            roundness.push(rm);
            fdiam.push(dm);
        }
        if max_m == 0 {
            deg_max = 1;
        }

        let mut round = Distortion {
            samples: 0,
            min_ratio: f64::INFINITY,
            max_ratio: 0.0,
        };
        let mut diam = round;
        for m in 1..=max_m {
            for v in self.vertices_at_level(m)? {
                for j in 1..=m {
                    let w = self.image_k(v, j)?;
                    let r = roundness[(m - j) as usize][&w.index] / roundness[m as usize][&v.index];
                    round.samples += 1;
                    round.min_ratio = round.min_ratio.min(r);
                    round.max_ratio = round.max_ratio.max(r);
                }
            }
        }
        for m in 0..max_m {
            let next = self.with_closure(m + 1)?;
            for v in self.vertices_at_level(m)? {
                let child = next
                    .children_of_prev(v.ix())
                    .find(|&q| next.dim(q) == 0)
                    .map(|q| LevelCell::new(m + 1, q as u32))
                    .ok_or_else(|| Error::InvalidRule(format!("vertex {v} has no vertex child")))?;
                let inner: Vec<LevelCell> = std::iter::once(child)
                    .chain(self.u1(&[child])?.into_iter().filter(|c| next.dim(c.ix()) == 0))
                    .filter(|&w| {
                        self.ancestor(w, m)
                            .and_then(|a| self.is_face_or_equal(v, a))
                            .unwrap_or(false)
                    })
                    .collect();
                let source_u = fdiam[m as usize][&v.index];
                for w in inner {
                    let source = fdiam[(m + 1) as usize][&w.index] / source_u;
                    for j in 1..=m {
                        let (fv, fw) = (self.image_k(v, j)?, self.image_k(w, j)?);
                        let image = fdiam[(m + 1 - j) as usize][&fw.index] / fdiam[(m - j) as usize][&fv.index];
                        let r = image / source;
                        diam.samples += 1;
                        diam.min_ratio = diam.min_ratio.min(r);
                        diam.max_ratio = diam.max_ratio.max(r);
                    }
                }
            }
        }
        let irred_proxy = self.image_reachability(max_m.min(3))?;
        let expanding = expans.expanding;
        Ok(CXCReport {
            expans,
            theta,
            c,
            k,
            deg_max,
            round,
            diam,
            irred_proxy,
            expanding,
        })
    }

    /// Empirical quasisymmetry modulus of the identity from `(S, ρ)` to
    /// `(S, d)` over at most `max_points` evenly spaced sample points.
    pub fn qs_identity_modulus(&self, report: &VisualMetricReport, config: &VisualMetricConfig, max_points: usize) -> Result<QsModulus> {
        let model = &self.realization()?.model;
        let n = report.len();
        let take = max_points.min(n);
        let idx: Vec<usize> = (0..take).map(|i| i * n / take.max(1)).collect();
        let coords: Vec<Vec<f64>> = idx
            .iter()
            .map(|&i| self.point_of(&config.sample[i]))
            .collect::<Result<_>>()?;
        let mut pairs = Vec::new();
        for (a, &x) in idx.iter().enumerate() {
            for (b, &y) in idx.iter().enumerate() {
                for (c, &z) in idx.iter().enumerate() {
                    if a == b || a == c || b == c {
                        continue;
                    }
                    let (rxy, rxz) = (report.rho(x, y), report.rho(x, z));
                    let (dxy, dxz) = (model.dist(&coords[a], &coords[b]), model.dist(&coords[a], &coords[c]));
                    if rxz > 0.0 && dxz > 0.0 {
                        pairs.push((rxy / rxz, dxy / dxz));
                    }
                }
            }
        }
        let triples = pairs.len();
        let mut steps = envelope(pairs);
        steps.dedup_by(|b, a| b.1 == a.1);
        let linear_slope = steps.iter().map(|s| s.1 / s.0).fold(0.0, f64::max);
        let affine_constant = steps.iter().map(|s| s.1 / (1.0 + s.0)).fold(0.0, f64::max);
        Ok(QsModulus {
            points: take,
            triples,
            steps,
            linear_slope,
            affine_constant,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;

    fn torus() -> Tower {
        Tower::from_example(&builtin::torus_doubling(2).unwrap())
    }

    #[test]
    fn torus_qv_constants_are_dyadic() {
        let t = torus();
        let qv = t.qv_constants(3, 3).unwrap();
        for k in 1..=3 {
            assert_eq!(qv.alpha[k - 1], 2f64.powi(k as i32));
            assert_eq!(qv.beta[k - 1], 2f64.powi(k as i32));
        }
        assert!(qv.alpha_increasing);
        assert_eq!(qv.lambda_sep_by_level[0], None);
        for m in 1..=3 {
            let l = qv.lambda_sep_by_level[m].unwrap();
            assert!((l - 0.5f64.sqrt()).abs() < 1e-12, "{l}");
        }
        assert!(qv.mu >= 1.0 && qv.mu.is_finite());
    }

    #[test]
    fn envelope_is_monotone_and_dominating() {
        let steps = envelope(vec![(1.0, 2.0), (0.5, 3.0), (2.0, 1.0), (1.0, 1.0)]);
        assert_eq!(steps, vec![(0.5, 3.0), (1.0, 3.0), (2.0, 3.0)]);
        assert_eq!(eval_steps(&steps, 0.1), None);
        assert_eq!(eval_steps(&steps, 1.5), Some(3.0));
    }

    #[test]
    fn equal_continua_have_unit_ratios() {
        let t = torus();
        let e = l_path(&[0.1, 0.1], &[0.3, 0.2], 4);
        let fe: Vec<Vec<f64>> = e.iter().map(|p| t.forward_k(p, 1).unwrap()).collect();
        let model = &t.realization().unwrap().model;
        let r = model.points_diam(&fe) / model.points_diam(&fe);
        assert_eq!(r, 1.0);
    }

    #[test]
    fn approximation_levels() {
        let t = torus();
        let tiny = vec![vec![0.5 / 32.0 + 0.001, 0.5 / 32.0], vec![0.5 / 32.0 + 0.002, 0.5 / 32.0]];
        let a = t.approximation_of(&tiny, 8).unwrap();
        assert!(a.level >= 5, "{a:?}");
        let whole: Vec<Vec<f64>> = (0..8)
            .flat_map(|i| (0..8).map(move |j| vec![0.25 * i as f64, 0.25 * j as f64]))
            .collect();
        assert_eq!(t.approximation_of(&whole, 3).unwrap().level, -1);
        assert!(matches!(
            t.approximation_of(&[vec![0.2, 0.2]], 3),
            Err(Error::DegenerateContinuum)
        ));
    }

    #[test]
    fn torus_bqs_envelope_is_linear() {
        let t = torus();
        let env = t.bqs_envelope(1..=3, 0).unwrap();
        assert!(env.min_eta_over_t >= 0.25 && env.max_eta_over_t <= 4.0, "{env:?}");
        assert_eq!(env, t.bqs_envelope(1..=3, 0).unwrap());
    }

    #[test]
    fn cxc_degrees() {
        let t = torus();
        let r = t.cxc_report(3).unwrap();
        assert_eq!(r.deg_max, 1);
        assert!((r.theta - 0.5).abs() < 1e-12);
        assert!(r.expanding);
        let p = Tower::from_example(&builtin::pillowcase());
        assert_eq!(p.cxc_report(3).unwrap().deg_max, 2);
        let id = Tower::from_example(&builtin::identity_rule());
        assert!(!id.cxc_report(2).unwrap().expanding);
    }

    #[test]
    fn qs_modulus_is_monotone() {
        let t = torus();
        let cfg = VisualMetricConfig::vertices(&t, 2.0, 1.0, 4).unwrap();
        let rep = t.chain_metric(&cfg).unwrap();
        let q = t.qs_identity_modulus(&rep, &cfg, 32).unwrap();
        assert!(q.steps.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 <= w[1].1));
        assert!(q.linear_slope.is_finite());
        let pair = VisualMetricConfig::new(2.0, 1.0, 4, cfg.sample[..2].to_vec()).unwrap();
        let rep2 = t.chain_metric(&pair).unwrap();
        assert!(t.qs_identity_modulus(&rep2, &pair, 64).unwrap().steps.is_empty());
    }
}
