//! Flat models for subdivision rules: the flat torus `(R/PZ)^n` and the
//! pillowcase `R^2 / (2sZ^2 ⋊ {±1})`.
//!
//! Every cell is realized as an axis-aligned box in the covering space `R^n`;
//! any representative of its orbit under the deck group will do. Distances are
//! quotient distances, i.e. minima over the orbit.

use serde::{Deserialize, Serialize};

use crate::complex::{CellComplex, Check, ValidationReport, Violation};
use crate::error::{Error, Result};
use crate::rule::SubdivisionRule;
use crate::tolerance;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum Model {
    /// Torus with period `side` in each of `dim` coordinates.
    FlatTorus { side: f64, dim: usize },
    /// Two squares of side `side` glued along their boundary.
    Pillowcase { side: f64 },
}

impl Model {
    pub fn dim(&self) -> usize {
        match self {
            Model::FlatTorus { dim, .. } => *dim,
            Model::Pillowcase { .. } => 2,
        }
    }

    /// Translation period of the deck group.
    pub fn period(&self) -> f64 {
        match self {
            Model::FlatTorus { side, .. } => *side,
            Model::Pillowcase { side } => 2.0 * side,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Model::FlatTorus { .. } => "flat_torus",
            Model::Pillowcase { .. } => "pillowcase",
        }
    }

    fn signs(&self) -> &'static [f64] {
        match self {
            Model::FlatTorus { .. } => &[1.0],
            Model::Pillowcase { .. } => &[1.0, -1.0],
        }
    }

    fn circle_gap(&self, d: f64) -> f64 {
        let p = self.period();
        let r = d.rem_euclid(p);
        r.min(p - r)
    }

    fn torus_dist(&self, x: &[f64], y: &[f64]) -> f64 {
        x.iter()
            .zip(y)
            .map(|(a, b)| self.circle_gap(a - b).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Quotient distance between two points of the covering space.
    pub fn dist(&self, x: &[f64], y: &[f64]) -> f64 {
        self.signs()
            .iter()
            .map(|&s| {
                let sy: Vec<f64> = y.iter().map(|v| s * v).collect();
                self.torus_dist(x, &sy)
            })
            .fold(f64::INFINITY, f64::min)
    }

    fn interval_gap(&self, (l1, h1): (f64, f64), (l2, h2): (f64, f64)) -> f64 {
        let p = self.period();
        let k0 = ((l1 - l2) / p).round();
        [k0 - 1.0, k0, k0 + 1.0]
            .iter()
            .map(|k| {
                let (a, b) = (l2 + k * p, h2 + k * p);
                (a - h1).max(l1 - b).max(0.0)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Quotient distance between two boxes.
    pub fn box_dist(&self, a: &Cuboid, b: &Cuboid) -> f64 {
        self.signs()
            .iter()
            .map(|&s| {
                let sb = b.scaled(s);
                (0..a.dim())
                    .map(|i| self.interval_gap((a.lo[i], a.hi[i]), (sb.lo[i], sb.hi[i])).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Diameter of a box in the quotient metric.
    pub fn box_diam(&self, b: &Cuboid) -> f64 {
        match self {
            Model::FlatTorus { .. } => {
                let half = self.period() / 2.0;
                (0..b.dim())
                    .map(|i| (b.hi[i] - b.lo[i]).min(half).powi(2))
                    .sum::<f64>()
                    .sqrt()
            }
            Model::Pillowcase { .. } => self.points_diam(&b.sample_points()),
        }
    }

    pub fn points_diam(&self, pts: &[Vec<f64>]) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                d = d.max(self.dist(&pts[i], &pts[j]));
            }
        }
        d
    }

    /// Group elements `x -> s x + t` with `s x + t` inside `target` (slack `tol`).
    fn lift_into(&self, b: &Cuboid, target: &Cuboid, tol: f64) -> Option<(f64, Vec<f64>)> {
        let p = self.period();
        'sign: for &s in self.signs() {
            let sb = b.scaled(s);
            let mut t = Vec::with_capacity(b.dim());
            for i in 0..b.dim() {
                let k = ((target.lo[i] - tol - sb.lo[i]) / p).ceil();
                let shift = k * p;
                if sb.hi[i] + shift > target.hi[i] + tol {
                    continue 'sign;
                }
                t.push(shift);
            }
            return Some((s, t));
        }
        None
    }

    /// The representative of `b` lying inside `target`, if any.
    pub fn snap_box(&self, b: &Cuboid, target: &Cuboid) -> Option<Cuboid> {
        let (s, t) = self.lift_into(b, target, tolerance::SNAP)?;
        Some(b.scaled(s).translated(&t))
    }

    pub fn snap_point(&self, x: &[f64], target: &Cuboid) -> Option<Vec<f64>> {
        let pb = Cuboid::point(x);
        self.snap_box(&pb, target).map(|c| c.lo)
    }

    /// True if some representative of `x` lies in the relative interior of `b`.
    pub fn in_relative_interior(&self, x: &[f64], b: &Cuboid) -> bool {
        let tol = tolerance::SNAP;
        let pb = Cuboid::point(x);
        let p = self.period();
        for &s in self.signs() {
            let sx: Vec<f64> = pb.lo.iter().map(|v| s * v).collect();
            let ok = (0..b.dim()).all(|i| {
                let shift = ((b.lo[i] - tol - sx[i]) / p).ceil() * p;
                let y = sx[i] + shift;
                if b.hi[i] - b.lo[i] <= tol {
                    (y - b.lo[i]).abs() <= tol
                } else {
                    y > b.lo[i] + tol && y < b.hi[i] - tol
                }
            });
            if ok {
                return true;
            }
        }
        false
    }

    /// Canonical orbit representative (lexicographically smallest reduced box).
    pub fn canonical_box(&self, b: &Cuboid) -> Cuboid {
        let p = self.period();
        self.signs()
            .iter()
            .map(|&s| {
                let sb = b.scaled(s);
                let t: Vec<f64> = sb.lo.iter().map(|l| -(l / p).floor() * p).collect();
                let mut c = sb.translated(&t);
                for i in 0..c.dim() {
                    // Snap values that land a rounding error below the period.
                    if (c.lo[i] - p).abs() < tolerance::SNAP {
                        c.hi[i] -= p;
                        c.lo[i] = 0.0;
                    }
                }
                c
            })
            .min_by(|a, b| a.key().partial_cmp(&b.key()).unwrap_or(std::cmp::Ordering::Equal))
            .unwrap_or_else(|| b.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cuboid {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Cuboid {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        Cuboid { lo, hi }
    }

    pub fn point(x: &[f64]) -> Self {
        Cuboid {
            lo: x.to_vec(),
            hi: x.to_vec(),
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    /// Number of non-degenerate axes.
    pub fn cell_dim(&self) -> usize {
        (0..self.dim())
            .filter(|&i| self.hi[i] - self.lo[i] > tolerance::SNAP)
            .count()
    }

    pub fn extent(&self, i: usize) -> f64 {
        self.hi[i] - self.lo[i]
    }

    pub fn diagonal(&self) -> f64 {
        (0..self.dim()).map(|i| self.extent(i).powi(2)).sum::<f64>().sqrt()
    }

    pub fn barycenter(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| 0.5 * (self.lo[i] + self.hi[i])).collect()
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        (0..self.dim()).all(|i| x[i] >= self.lo[i] - tol && x[i] <= self.hi[i] + tol)
    }

    pub fn contains_box(&self, b: &Cuboid, tol: f64) -> bool {
        self.contains(&b.lo, tol) && self.contains(&b.hi, tol)
    }

    fn scaled(&self, s: f64) -> Cuboid {
        let (mut lo, mut hi) = (Vec::with_capacity(self.dim()), Vec::with_capacity(self.dim()));
        for i in 0..self.dim() {
            let (a, b) = (s * self.lo[i], s * self.hi[i]);
            lo.push(a.min(b));
            hi.push(a.max(b));
        }
        Cuboid { lo, hi }
    }

    fn translated(&self, t: &[f64]) -> Cuboid {
        Cuboid {
            lo: self.lo.iter().zip(t).map(|(a, b)| a + b).collect(),
            hi: self.hi.iter().zip(t).map(|(a, b)| a + b).collect(),
        }
    }

    fn key(&self) -> Vec<f64> {
        self.lo.iter().chain(self.hi.iter()).copied().collect()
    }

    /// Corners, edge midpoints, face centers... (`3^n` points).
    pub fn sample_points(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        let mut out = Vec::with_capacity(3usize.pow(n as u32));
        for code in 0..3usize.pow(n as u32) {
            let mut c = code;
            let mut x = Vec::with_capacity(n);
            for i in 0..n {
                let t = (c % 3) as f64 * 0.5;
                c /= 3;
                x.push(self.lo[i] + t * self.extent(i));
            }
            out.push(x);
        }
        out
    }
}

/// `x -> scale * x + offset`, sending the box of `f(X)` onto the box of `X`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineBranch {
    pub scale: f64,
    pub offset: Vec<f64>,
}

impl AffineBranch {
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.offset).map(|(v, o)| self.scale * v + o).collect()
    }

    pub fn invert(&self, y: &[f64]) -> Vec<f64> {
        y.iter().zip(&self.offset).map(|(v, o)| (v - o) / self.scale).collect()
    }

    pub fn apply_box(&self, b: &Cuboid) -> Cuboid {
        let a = self.apply(&b.lo);
        let c = self.apply(&b.hi);
        Cuboid {
            lo: a.iter().zip(&c).map(|(u, v)| u.min(*v)).collect(),
            hi: a.iter().zip(&c).map(|(u, v)| u.max(*v)).collect(),
        }
    }
}

/// Boxes for the cells of `D0` and `D1` and one branch inverse per `D1` chamber.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    pub model: Model,
    pub base_boxes: Vec<Cuboid>,
    pub refined_boxes: Vec<Cuboid>,
    /// Indexed by `D1` cell; `Some` exactly on chambers.
    pub branches: Vec<Option<AffineBranch>>,
}

impl Realization {
    pub fn branch(&self, chamber: usize) -> Result<&AffineBranch> {
        self.branches
            .get(chamber)
            .and_then(Option::as_ref)
            .ok_or_else(|| Error::InvalidRealization(format!("no branch inverse for cell {chamber}")))
    }

    /// Checks shapes, parent containment and the branch-inverse identities.
    pub fn validate(&self, rule: &SubdivisionRule) -> ValidationReport {
        let (b, r) = (rule.base(), rule.refined());
        let mut out = Vec::new();
        let push = |out: &mut Vec<Violation>, cells, detail: String| {
            out.push(Violation {
                check: Check::Realization,
                cells,
                detail,
            })
        };
        let n = self.model.dim();
        if b.dim_top() != n {
            push(&mut out, vec![], format!("model dimension {n} differs from complex dimension {}", b.dim_top()));
            return ValidationReport::from_violations(out);
        }
        if self.base_boxes.len() != b.len() || self.refined_boxes.len() != r.len() || self.branches.len() != r.len() {
            push(&mut out, vec![], "box or branch tables do not match the complexes".into());
            return ValidationReport::from_violations(out);
        }
        check_boxes(&self.base_boxes, b, n, &mut out);
        check_boxes(&self.refined_boxes, r, n, &mut out);
        for c in 0..r.len() {
            let pbox = &self.base_boxes[rule.parent(c)];
            if self.model.snap_box(&self.refined_boxes[c], pbox).is_none() {
                push(&mut out, vec![r.id(c).clone(), b.id(rule.parent(c)).clone()], "box not inside parent box".into());
            }
            let chamber = r.dim(c) == r.dim_top();
            match (&self.branches[c], chamber) {
                (Some(phi), true) => {
                    let img = phi.apply_box(&self.base_boxes[rule.image(c)]);
                    let target = &self.refined_boxes[c];
                    let same = self
                        .model
                        .snap_box(&img, target)
                        .is_some_and(|s| target.contains_box(&s, tolerance::SNAP));
                    if !same {
                        push(&mut out, vec![r.id(c).clone()], "branch inverse does not map the image box onto the chamber".into());
                    }
                    // Faces of the chamber must map to faces of the image.
                    for &f in r.faces(c) {
                        let ibox = &self.base_boxes[rule.image(c)];
                        let fimg = self
                            .model
                            .snap_box(&self.base_boxes[rule.image(f)], ibox)
                            .map(|b| phi.apply_box(&b));
                        let fb = self.model.snap_box(&self.refined_boxes[f], target);
                        let ok = fb.zip(fimg).is_some_and(|(fb, fimg)| {
                            self.model.snap_box(&fimg, target).is_some_and(|fi| {
                                (0..n).all(|i| {
                                    (fi.lo[i] - fb.lo[i]).abs() < tolerance::SNAP
                                        && (fi.hi[i] - fb.hi[i]).abs() < tolerance::SNAP
                                })
                            })
                        });
                        if !ok {
                            push(&mut out, vec![r.id(c).clone(), r.id(f).clone()], "branch inverse does not respect the face correspondence".into());
                        }
                    }
                }
                (None, true) => push(&mut out, vec![r.id(c).clone()], "chamber has no branch inverse".into()),
                (Some(_), false) => push(&mut out, vec![r.id(c).clone()], "branch inverse on a non-chamber".into()),
                (None, false) => {}
            }
        }
        ValidationReport::from_violations(out)
    }
}

fn check_boxes(boxes: &[Cuboid], c: &CellComplex, n: usize, out: &mut Vec<Violation>) {
    for (ix, bx) in boxes.iter().enumerate() {
        if bx.dim() != n || bx.hi.len() != n || bx.cell_dim() != c.dim(ix) {
            out.push(Violation {
                check: Check::Realization,
                cells: vec![c.id(ix).clone()],
                detail: "box shape does not match the cell dimension".into(),
            });
        }
    }
}
