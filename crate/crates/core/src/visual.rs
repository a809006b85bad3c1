//! Visual metrics on finite point samples.
//!
//! The quasi-distance `q(x, y) = Λ^{-m(x,y)}` is metrized by chains: `ρ_ε` is
//! the shortest-path metric of the complete graph weighted by `q^ε`. The chain
//! infimum is taken within the sample only.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance;
use crate::tower::separation::{IterationCheck, PointAddress, Separation, SeparationTable};
use crate::tower::Tower;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VisualMetricConfig {
    pub lambda: f64,
    pub eps: f64,
    pub depth: u32,
    pub sample: Vec<PointAddress>,
}

impl VisualMetricConfig {
    pub fn new(lambda: f64, eps: f64, depth: u32, sample: Vec<PointAddress>) -> Result<Self> {
        if lambda.is_nan() || lambda <= 1.0 {
            return Err(Error::Config(format!("expansion factor must exceed 1, got {lambda}")));
        }
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::Config(format!("eps must lie in (0, 1], got {eps}")));
        }
        if sample.is_empty() {
            return Err(Error::EmptySample);
        }
        if let Some(p) = sample.iter().find(|p| p.depth() != depth) {
            return Err(Error::LevelMismatch(p.depth(), depth));
        }
        Ok(VisualMetricConfig {
            lambda,
            eps,
            depth,
            sample,
        })
    }

    /// Vertices of level `depth - 2` at depth `depth`; distinct ones are never
    /// truncated.
    pub fn vertices(tower: &Tower, lambda: f64, eps: f64, depth: u32) -> Result<Self> {
        let l = depth.saturating_sub(2);
        Self::new(lambda, eps, depth, tower.vertex_sample(l, depth)?)
    }
}

/// Result of the numerical metric checks on `ρ_ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricCheck {
    pub symmetric: bool,
    pub positive: bool,
    pub triangle_violations: u64,
    /// Largest `ρ(x,z) - ρ(x,y) - ρ(y,z)`, relative to `ρ(x,z)`.
    pub worst_triangle_excess: f64,
    pub dominated_by_q: bool,
}

impl MetricCheck {
    pub fn ok(&self) -> bool {
        self.symmetric && self.positive && self.triangle_violations == 0 && self.dominated_by_q
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VisualMetricReport {
    pub lambda: f64,
    pub eps: f64,
    pub depth: u32,
    pub points: Vec<String>,
    pub truncated_pairs: usize,
    /// `max` over untruncated distinct pairs of `q^ε / ρ`.
    pub c_meas: f64,
    pub check: MetricCheck,
    /// `(min, max)` of `ρ / d` against the flat metric, when realized.
    pub flat_ratio: Option<(f64, f64)>,
    #[serde(skip)]
    pub q: Vec<f64>,
    #[serde(skip)]
    pub rho: Vec<f64>,
    #[serde(skip)]
    pub truncated: Vec<bool>,
}

impl VisualMetricReport {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn q(&self, i: usize, j: usize) -> f64 {
        self.q[i * self.len() + j]
    }

    pub fn rho(&self, i: usize, j: usize) -> f64 {
        self.rho[i * self.len() + j]
    }

    /// `(q, ρ)` for every pair `i < j`.
    pub fn scatter(&self) -> Vec<(f64, f64)> {
        let n = self.len();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| (self.q(i, j), self.rho(i, j)))
            .collect()
    }
}

impl Tower {
    /// `Λ^{-m(x,y)}`, `0` for equal points.
    pub fn quasi_distance(&self, x: &PointAddress, y: &PointAddress, lambda: f64) -> Result<f64> {
        if x == y {
            return Ok(0.0);
        }
        match self.separation_level(x, y)? {
            Separation::Exact(m) => Ok(lambda.powi(-(m as i32))),
            Separation::Truncated { depth } => Err(Error::Truncated(depth)),
        }
    }

    pub fn chain_metric(&self, config: &VisualMetricConfig) -> Result<VisualMetricReport> {
        let table = self.separation_table(&config.sample)?;
        let n = table.len();
        let mut q = vec![0.0; n * n];
        let mut truncated = vec![false; n * n];
        for i in 0..n {
            for j in 0..n {
                if i == j || config.sample[i] == config.sample[j] {
                    continue;
                }
                let s = table.get(i, j);
                truncated[i * n + j] = s.is_truncated();
                q[i * n + j] = config.lambda.powi(-(s.scored() as i32));
            }
        }
        let weights: Vec<f64> = q.iter().map(|v| v.powf(config.eps)).collect();
        let rho = floyd_warshall(weights.clone(), n);

        let mut c_meas: f64 = 1.0;
        for i in 0..n {
            for j in 0..n {
                let k = i * n + j;
                if q[k] > 0.0 && !truncated[k] {
                    c_meas = c_meas.max(weights[k] / rho[k]).max(rho[k] / weights[k]);
                }
            }
        }
        let check = check_metric(&rho, &weights, n);
        let flat_ratio = if self.has_realization() {
            let model = &self.realization()?.model;
            let pts: Vec<Vec<f64>> = config.sample.iter().map(|p| self.point_of(p)).collect::<Result<_>>()?;
            let mut lo = f64::INFINITY;
            let mut hi: f64 = 0.0;
            for i in 0..n {
                for j in i + 1..n {
                    let d = model.dist(&pts[i], &pts[j]);
                    if d > tolerance::COORD && !truncated[i * n + j] {
                        let r = rho[i * n + j] / d;
                        lo = lo.min(r);
                        hi = hi.max(r);
                    }
                }
            }
            lo.is_finite().then_some((lo, hi))
        } else {
            None
        };
        Ok(VisualMetricReport {
            lambda: config.lambda,
            eps: config.eps,
            depth: config.depth,
            points: config
                .sample
                .iter()
                .map(|p| self.address(p.carrier))
                .collect::<Result<_>>()?,
            truncated_pairs: table.truncated_pairs(),
            c_meas,
            check,
            flat_ratio,
            q,
            rho,
            truncated,
        })
    }

    /// Largest `ε = 2^{-j}` (`j <= 4`) whose comparability constant changes by
    /// at most a factor 2 between the two depths.
    pub fn stable_eps(&self, lambda: f64, shallow: u32, deep: u32) -> Result<f64> {
        let mut eps = 1.0;
        for _ in 0..4 {
            let a = self.chain_metric(&VisualMetricConfig::vertices(self, lambda, eps, shallow)?)?;
            let b = self.chain_metric(&VisualMetricConfig::vertices(self, lambda, eps, deep)?)?;
            if b.c_meas / a.c_meas <= 2.0 && a.c_meas / b.c_meas <= 2.0 {
                return Ok(eps);
            }
            eps /= 2.0;
        }
        Ok(eps)
    }
}

const BLOCK: usize = 64;

fn relax_row(row: &mut [f64], via: &[f64], a: f64) {
    for (x, &y) in row.iter_mut().zip(via) {
        let c = a + y;
        *x = if c < *x { c } else { *x };
    }
}

/// Blocked by row stripes so each pass over intermediate vertices stays in cache.
fn floyd_warshall(mut d: Vec<f64>, n: usize) -> Vec<f64> {
    if n == 0 {
        return d;
    }
    let mut buf = vec![0.0; BLOCK * n];
    let mut row_k = vec![0.0; n];
    for kb in (0..n).step_by(BLOCK) {
        let ke = (kb + BLOCK).min(n);
        let stripe = &mut d[kb * n..ke * n];
        for k in kb..ke {
            row_k.copy_from_slice(&stripe[(k - kb) * n..(k - kb + 1) * n]);
            for row in stripe.chunks_mut(n) {
                let a = row[k];
                relax_row(row, &row_k, a);
            }
        }
        buf[..stripe.len()].copy_from_slice(stripe);
        let buf = &buf;
        d.par_chunks_mut(BLOCK * n).enumerate().for_each(|(s, stripe)| {
            if s * BLOCK == kb {
                return;
            }
            for k in kb..ke {
                let via = &buf[(k - kb) * n..(k - kb + 1) * n];
                for row in stripe.chunks_mut(n) {
                    let a = row[k];
                    relax_row(row, via, a);
                }
            }
        });
    }
    d
}

/// `max_z (rx[z] - ry[z])`, four lanes at a time.
fn max_gap(rx: &[f64], ry: &[f64]) -> f64 {
    let mut acc = [f64::NEG_INFINITY; 4];
    let mut cx = rx.chunks_exact(4);
    let mut cy = ry.chunks_exact(4);
    for (a, b) in (&mut cx).zip(&mut cy) {
        for l in 0..4 {
            let e = a[l] - b[l];
            acc[l] = if e > acc[l] { e } else { acc[l] };
        }
    }
    let tail = cx.remainder().iter().zip(cy.remainder()).map(|(a, b)| a - b);
    tail.chain(acc).fold(f64::NEG_INFINITY, f64::max)
}

fn check_metric(rho: &[f64], w: &[f64], n: usize) -> MetricCheck {
    let mut symmetric = true;
    let mut positive = true;
    let mut dominated = true;
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (rho[i * n + j], rho[j * n + i]);
            symmetric &= a == b;
            if i != j && w[i * n + j] > 0.0 {
                positive &= a > 0.0;
            }
            dominated &= a <= w[i * n + j];
        }
    }
    let rows: Vec<&[f64]> = rho.chunks(n.max(1)).collect();
    let (violations, worst) = rows
        .par_chunks(32)
        .map(|xs| {
            let mut v = 0u64;
            let mut worst: f64 = 0.0;
            for (y, ry) in rows.iter().enumerate() {
                for rx in xs {
                    let dxy = rx[y];
                    if max_gap(rx, ry) <= dxy {
                        continue;
                    }
                    for z in 0..n {
                        let excess = rx[z] - dxy - ry[z];
                        if excess > 0.0 {
                            let rel = excess / rx[z];
                            worst = worst.max(rel);
                            if rel > tolerance::METRIC_REL {
                                v += 1;
                            }
                        }
                    }
                }
            }
            (v, worst)
        })
        .reduce(|| (0, 0.0), |a, b| (a.0 + b.0, a.1.max(b.1)));
    MetricCheck {
        symmetric,
        positive,
        triangle_violations: violations,
        worst_triangle_excess: worst,
        dominated_by_q: dominated,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellMetricRow {
    pub level: u32,
    /// `max` and `min` over chambers of `diam_ρ(X) Λ^m`.
    pub max_diam_scaled: f64,
    pub min_diam_scaled: f64,
    /// `min` over disjoint chamber pairs of `dist_ρ Λ^m`; `None` if every
    /// pair meets.
    pub min_gap_scaled: Option<f64>,
    /// Chambers holding fewer than two sample points.
    pub uncovered: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellMetricTable {
    pub rows: Vec<CellMetricRow>,
    /// One constant bounding every row, `None` when coverage is insufficient.
    pub c_prime: Option<f64>,
}

impl Tower {
    /// Diameters and gaps of chambers of levels `0..=max_m` in `ρ`.
    pub fn cell_metric_report(&self, report: &VisualMetricReport, config: &VisualMetricConfig, max_m: u32) -> Result<CellMetricTable> {
        if max_m > config.depth {
            return Err(Error::LevelMismatch(max_m, config.depth));
        }
        let n = report.len();
        let mut rows = Vec::new();
        for m in 0..=max_m {
            let ls = self.with_chamber_star(m)?;
            let chambers = self.chambers_at_level(m)?;
            let mut rank = vec![usize::MAX; ls.len()];
            for (r, c) in chambers.iter().enumerate() {
                rank[c.ix()] = r;
            }
            let mut members: Vec<Vec<usize>> = vec![Vec::new(); chambers.len()];
            for (i, p) in config.sample.iter().enumerate() {
                let c = self.ancestor(p.carrier, m)?;
                for &x in ls.chamber_star(c.ix()) {
                    members[rank[x as usize]].push(i);
                }
            }
            let scale = config.lambda.powi(m as i32);
            let mut uncovered = 0;
            let mut dmax: f64 = 0.0;
            let mut dmin = f64::INFINITY;
            for pts in &members {
                if pts.len() < 2 {
                    uncovered += 1;
                    continue;
                }
                let mut d: f64 = 0.0;
                for (a, &i) in pts.iter().enumerate() {
                    for &j in &pts[a + 1..] {
                        d = d.max(report.rho[i * n + j]);
                    }
                }
                dmax = dmax.max(d * scale);
                dmin = dmin.min(d * scale);
            }
            let lc = self.with_closure(m)?;
            let mut gap: Option<f64> = None;
            for a in 0..chambers.len() {
                for b in a + 1..chambers.len() {
                    if sorted_meet(lc.closure(chambers[a].ix()), lc.closure(chambers[b].ix())) {
                        continue;
                    }
                    let mut d = f64::INFINITY;
                    for &i in &members[a] {
                        for &j in &members[b] {
                            d = d.min(report.rho[i * n + j]);
                        }
                    }
                    if d.is_finite() {
                        gap = Some(gap.map_or(d * scale, |g: f64| g.min(d * scale)));
                    }
                }
            }
            rows.push(CellMetricRow {
                level: m,
                max_diam_scaled: dmax,
                min_diam_scaled: dmin,
                min_gap_scaled: gap,
                uncovered,
            });
        }
        let covered = rows.iter().all(|r| r.uncovered == 0 && r.min_diam_scaled > 0.0);
        let c_prime = covered.then(|| {
            rows.iter()
                .flat_map(|r| {
                    [r.max_diam_scaled, 1.0 / r.min_diam_scaled]
                        .into_iter()
                        .chain(r.min_gap_scaled.map(|g| 1.0 / g))
                })
                .fold(1.0, f64::max)
        });
        Ok(CellMetricTable { rows, c_prime })
    }

    pub fn hyperbolicity_constants(&self, depth: u32) -> Result<HyperbolicityReport> {
        let pts = self.vertex_sample(depth, depth)?;
        let table = self.separation_table(&pts)?;
        self.hyperbolicity_from(&table)
    }

    pub fn hyperbolicity_from(&self, table: &SeparationTable) -> Result<HyperbolicityReport> {
        let iteration = self.iteration_check(table)?;
        Ok(HyperbolicityReport {
            depth: table.depth,
            points: table.len(),
            k0: table.hyperbolicity_k0(),
            iteration_ok: iteration.violations == 0,
            iteration,
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

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicityReport {
    pub depth: u32,
    pub points: usize,
    pub k0: u32,
    pub iteration_ok: bool,
    pub iteration: IterationCheck,
}

/// Level-`m` vertices at depth `depth` forming a checkerboard: every chamber
/// keeps two opposite corners.
pub fn checkerboard_sample(tower: &Tower, m: u32, depth: u32) -> Result<Vec<PointAddress>> {
    let model = &tower.realization()?.model;
    let side = tower.geom_of(tower.chambers_at_level(m)?[0])?.extent(0);
    let mut out = Vec::new();
    for v in tower.vertices_at_level(m)? {
        let c = model.canonical_box(&tower.geom_of(v)?);
        let parity: i64 = c.lo.iter().map(|x| (x / side).round() as i64).sum();
        if parity.rem_euclid(2) == 0 {
            out.push(tower.vertex_address(v, depth)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;

    fn torus() -> Tower {
        Tower::from_example(&builtin::torus_doubling(2).unwrap())
    }

    #[test]
    fn neighbours_on_axis_are_half_apart() {
        let t = torus();
        let x = t.locate(&[0.0, 0.0], 6).unwrap();
        let y = t.locate(&[1.0, 0.0], 6).unwrap();
        assert_eq!(t.quasi_distance(&x, &y, 2.0).unwrap(), 0.5);
        assert_eq!(t.quasi_distance(&x, &x, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn two_points_use_the_direct_chain() {
        let t = torus();
        let x = t.locate(&[0.0, 0.0], 4).unwrap();
        let y = t.locate(&[0.5, 0.0], 4).unwrap();
        let cfg = VisualMetricConfig::new(2.0, 0.5, 4, vec![x, y]).unwrap();
        let r = t.chain_metric(&cfg).unwrap();
        assert_eq!(r.rho(0, 1), r.q(0, 1).powf(0.5));
        assert!(r.check.ok());
    }

    #[test]
    fn chain_metric_is_a_metric() {
        let t = Tower::from_example(&builtin::pillowcase());
        let cfg = VisualMetricConfig::vertices(&t, 2.0, 1.0, 4).unwrap();
        let r = t.chain_metric(&cfg).unwrap();
        assert!(r.check.ok(), "{:?}", r.check);
        assert_eq!(r.truncated_pairs, 0);
        assert!(r.c_meas.is_finite());
    }

    #[test]
    fn blocked_floyd_warshall_matches_plain() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let n = 150;
        let mut w = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let x = rng.gen_range(1..100) as f64;
                w[i * n + j] = x;
                w[j * n + i] = x;
            }
        }
        let mut plain = w.clone();
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let c = plain[i * n + k] + plain[k * n + j];
                    if c < plain[i * n + j] {
                        plain[i * n + j] = c;
                    }
                }
            }
        }
        assert_eq!(floyd_warshall(w, n), plain);
    }

    #[test]
    fn config_rejects_bad_parameters() {
        let t = torus();
        assert!(VisualMetricConfig::vertices(&t, 1.0, 1.0, 3).is_err());
        assert!(VisualMetricConfig::vertices(&t, 2.0, 0.0, 3).is_err());
        assert!(VisualMetricConfig::new(2.0, 1.0, 3, vec![]).is_err());
    }

    #[test]
    fn checkerboard_keeps_two_corners_per_chamber() {
        let t = torus();
        let pts = checkerboard_sample(&t, 2, 3).unwrap();
        assert_eq!(pts.len(), t.vertices_at_level(2).unwrap().len() / 2);
        let cfg = VisualMetricConfig::new(2.0, 1.0, 3, pts).unwrap();
        let r = t.chain_metric(&cfg).unwrap();
        let table = t.cell_metric_report(&r, &cfg, 2).unwrap();
        assert!(table.rows.iter().all(|r| r.uncovered == 0));
        assert!(table.c_prime.is_some());
    }
}
