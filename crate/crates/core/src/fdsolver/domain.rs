use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::geometry::{norm, GraphDomain2D};
use crate::grid::Grid;
use crate::pucci::{Dir, StencilSet};

/// Which piece of the boundary a point lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Part {
    /// The flat face `{x·n = 0}`, or the graph for graph domains.
    Flat,
    /// The spherical part `∂B_r`.
    Curved,
    /// Top face of the half-cube.
    Top,
    /// Lateral faces of the half-cube.
    Side,
}

/// Geometric region to be gridded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    /// `B_r ∩ {y > 0}`.
    HalfDisc { radius: f64 },
    /// `(−s/2, s/2) × (0, s/2)`: the upper half of the cube of side `s`.
    HalfCube { side: f64 },
    /// `(B_r ∩ {x·n > 0}) + shift`.
    HalfBall {
        radius: f64,
        normal: [f64; 2],
        #[serde(default)]
        shift: [f64; 2],
    },
    /// `Ω ∩ B_r` for a graph domain `Ω`.
    Graph { domain: GraphDomain2D, radius: f64 },
}

impl Shape {
    pub fn half_disc(radius: f64) -> Self {
        Shape::HalfDisc { radius }
    }

    pub fn half_cube(side: f64) -> Self {
        Shape::HalfCube { side }
    }

    pub fn half_ball(radius: f64, normal: [f64; 2]) -> Self {
        Shape::HalfBall {
            radius,
            normal,
            shift: [0.0, 0.0],
        }
    }

    /// `B⁺_Γ − offset·n`, the half-ball translated against its normal.
    pub fn shifted_half_ball(radius: f64, normal: [f64; 2], offset: f64) -> Self {
        let len = norm(normal);
        Shape::HalfBall {
            radius,
            normal,
            shift: [-offset * normal[0] / len, -offset * normal[1] / len],
        }
    }

    pub fn graph(domain: GraphDomain2D, radius: f64) -> Self {
        Shape::Graph { domain, radius }
    }

    fn validate(&self) -> Result<()> {
        let ok = match self {
            Shape::HalfDisc { radius } => *radius > 0.0,
            Shape::HalfCube { side } => *side > 0.0,
            Shape::HalfBall { radius, normal, .. } => *radius > 0.0 && norm(*normal) > 0.0,
            Shape::Graph { domain, radius } => *radius > 0.0 && *radius <= domain.effective_radius() * (1.0 + 1e-12),
        };
        if ok {
            Ok(())
        } else {
            Err(LabError::DegenerateDomain(format!("invalid shape parameters: {self:?}")))
        }
    }

    /// Constraint values, each positive exactly inside.
    pub(crate) fn levels(&self, p: [f64; 2]) -> [(Part, f64); 3] {
        match self {
            Shape::HalfDisc { radius } => [(Part::Flat, p[1]), (Part::Curved, radius - norm(p)), (Part::Curved, 1.0)],
            Shape::HalfCube { side } => [(Part::Flat, p[1]), (Part::Top, 0.5 * side - p[1]), (Part::Side, 0.5 * side - p[0].abs())],
            Shape::HalfBall { radius, normal, shift } => {
                let q = [p[0] - shift[0], p[1] - shift[1]];
                let len = norm(*normal);
                let along = (q[0] * normal[0] + q[1] * normal[1]) / len;
                [(Part::Flat, along), (Part::Curved, radius - norm(q)), (Part::Curved, 1.0)]
            }
            Shape::Graph { domain, radius } => {
                [(Part::Flat, domain.graph_level(p)), (Part::Curved, radius - norm(p)), (Part::Curved, 1.0)]
            }
        }
    }

    pub fn inside(&self, p: [f64; 2]) -> bool {
        self.levels(p).iter().all(|&(_, v)| v > 0.0)
    }

    /// The part whose constraint is closest to active at `p`.
    pub fn part_at(&self, p: [f64; 2]) -> Part {
        self.levels(p)
            .iter()
            .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map(|l| l.0)
            .unwrap_or(Part::Flat)
    }

    pub fn bbox(&self) -> [f64; 4] {
        match self {
            Shape::HalfDisc { radius } => [-radius, *radius, 0.0, *radius],
            Shape::HalfCube { side } => [-0.5 * side, 0.5 * side, 0.0, 0.5 * side],
            Shape::HalfBall { radius, shift, .. } => {
                [shift[0] - radius, shift[0] + radius, shift[1] - radius, shift[1] + radius]
            }
            Shape::Graph { radius, .. } => [-radius, *radius, -radius, *radius],
        }
    }
}

/// Gridded shape: the inside mask on an origin-anchored grid with a padding
/// layer wide enough for stencils of width `pad`.
#[derive(Debug, Clone)]
pub struct GridDomain {
    pub shape: Shape,
    pub grid: Grid,
    pub inside: Vec<bool>,
    /// Grid indices of the inside nodes, in lexicographic order.
    pub nodes: Vec<usize>,
    pub pad: usize,
}

/// Default padding: enough for the default stencil width.
pub const DEFAULT_PAD: usize = crate::pucci::DEFAULT_WIDTH;

impl GridDomain {
    pub fn build(shape: Shape, h: f64) -> Result<Self> {
        Self::build_padded(shape, h, DEFAULT_PAD)
    }

    pub fn build_padded(shape: Shape, h: f64, pad: usize) -> Result<Self> {
        shape.validate()?;
        let [x0, x1, y0, y1] = shape.bbox();
        let grid = Grid::covering(h, x0, x1, y0, y1, pad + 1)?;
        let inside: Vec<bool> = (0..grid.len()).into_par_iter().map(|k| shape.inside(grid.point(k))).collect();
        let nodes: Vec<usize> = (0..grid.len()).filter(|&k| inside[k]).collect();
        if nodes.is_empty() {
            return Err(LabError::DegenerateDomain(format!("no grid nodes inside at h = {h}")));
        }
        let dom = Self {
            shape,
            grid,
            inside,
            nodes,
            pad,
        };
        dom.check_connected()?;
        Ok(dom)
    }

    fn check_connected(&self) -> Result<()> {
        let g = &self.grid;
        let mut seen = vec![false; g.len()];
        let mut queue = VecDeque::from([self.nodes[0]]);
        seen[self.nodes[0]] = true;
        let mut count = 0usize;
        while let Some(k) = queue.pop_front() {
            count += 1;
            for (di, dj) in [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)] {
                if let Some(n) = g.offset(k, di, dj) {
                    if self.inside[n] && !seen[n] {
                        seen[n] = true;
                        queue.push_back(n);
                    }
                }
            }
        }
        if count != self.nodes.len() {
            return Err(LabError::DegenerateDomain(format!(
                "inside set is disconnected: {count} of {} nodes reachable",
                self.nodes.len()
            )));
        }
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_inside(&self, idx: usize) -> bool {
        self.inside[idx]
    }
}

/// Where a stencil arm ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Target {
    Node(usize),
    Crossing(usize),
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Arm {
    pub coef: f64,
    pub target: Target,
}

/// One second difference `Σ c±(u± − u₀)` along a direction.
#[derive(Debug, Clone, Copy)]
pub(crate) struct DirArms {
    pub plus: Arm,
    pub minus: Arm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub point: [f64; 2],
    pub part: Part,
}

/// Cut-cell discretization of a [`GridDomain`] for one stencil set.
///
/// Arms that leave the domain are shortened to the boundary crossing
/// (fraction `θ` of the full step) and use the Shortley–Weller weights
/// `2 / (h²|v|² θ±(θ₊ + θ₋))`, which keep the scheme monotone and exact on
/// affine functions.
#[derive(Debug, Clone)]
pub(crate) struct Discretization {
    pub dirs: Vec<Dir>,
    /// Per inside node (in `GridDomain::nodes` order), `dirs.len()` entries.
    pub arms: Vec<DirArms>,
    pub crossings: Vec<Crossing>,
    /// For each outside node reached by an arm, its nearest crossing.
    pub band: Vec<(usize, usize)>,
}

const MARCH_STEPS: usize = 16;
const BISECTIONS: usize = 64;

fn lerp(a: [f64; 2], b: [f64; 2], t: f64) -> [f64; 2] {
    [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
}

/// First exit fraction along `p → q`, if the segment leaves the shape.
fn first_exit(shape: &Shape, p: [f64; 2], q: [f64; 2]) -> Option<f64> {
    let mut prev = 0.0;
    for s in 1..=MARCH_STEPS {
        let t = s as f64 / MARCH_STEPS as f64;
        if !shape.inside(lerp(p, q, t)) {
            let (mut lo, mut hi) = (prev, t);
            for _ in 0..BISECTIONS {
                let mid = 0.5 * (lo + hi);
                if shape.inside(lerp(p, q, mid)) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Some(hi);
        }
        prev = t;
    }
    None
}

impl Discretization {
    pub fn new(dom: &GridDomain, stencil: &StencilSet) -> Result<Self> {
        if stencil.width > dom.pad {
            return Err(LabError::NeedsBoundary(format!(
                "stencil width {} exceeds the domain padding {}",
                stencil.width, dom.pad
            )));
        }
        let g = dom.grid;
        let h = g.h;
        let dirs: Vec<Dir> = stencil.directions().collect();

        // Per node, per direction, per sign: (target node or crossing data).
        type Raw = (Option<usize>, f64, Option<Crossing>, Option<usize>);
        let raw: Vec<Vec<[Raw; 2]>> = dom
            .nodes
            .par_iter()
            .map(|&k| {
                let p = g.point(k);
                dirs.iter()
                    .map(|&d| {
                        let one = |sign: i64| -> Raw {
                            let n = g.offset(k, sign * d[0], sign * d[1]).expect("padding covers the stencil");
                            let q = g.point(n);
                            match first_exit(&dom.shape, p, q) {
                                None if dom.inside[n] => (Some(n), 1.0, None, None),
                                None => {
                                    // Target is outside but every sample along the way is
                                    // inside: the crossing sits at the far end.
                                    (None, 1.0, Some(Crossing { point: q, part: dom.shape.part_at(q) }), Some(n))
                                }
                                Some(theta) => {
                                    let c = lerp(p, q, theta);
                                    let far = (!dom.inside[n]).then_some(n);
                                    (None, theta, Some(Crossing { point: c, part: dom.shape.part_at(c) }), far)
                                }
                            }
                        };
                        [one(1), one(-1)]
                    })
                    .collect()
            })
            .collect();

        let mut arms = Vec::with_capacity(dom.nodes.len() * dirs.len());
        let mut crossings = Vec::new();
        let mut best: std::collections::HashMap<usize, (f64, usize)> = std::collections::HashMap::new();
        for node_raw in &raw {
            for (d, pair) in dirs.iter().zip(node_raw) {
                let len2 = (d[0] * d[0] + d[1] * d[1]) as f64;
                let (tp, tm) = (pair[0].1, pair[1].1);
                let mut make = |r: &Raw, theta: f64| -> Arm {
                    let coef = 2.0 / (h * h * len2 * theta * (tp + tm));
                    let target = match (r.0, r.2) {
                        (Some(n), _) => Target::Node(n),
                        (None, Some(c)) => {
                            let id = crossings.len();
                            crossings.push(c);
                            if let Some(out) = r.3 {
                                let q = g.point(out);
                                let dist = norm([q[0] - c.point[0], q[1] - c.point[1]]);
                                let e = best.entry(out).or_insert((f64::INFINITY, id));
                                if dist < e.0 {
                                    *e = (dist, id);
                                }
                            }
                            Target::Crossing(id)
                        }
                        (None, None) => unreachable!("arm has neither node nor crossing"),
                    };
                    Arm { coef, target }
                };
                let plus = make(&pair[0], tp);
                let minus = make(&pair[1], tm);
                arms.push(DirArms { plus, minus });
            }
        }
        let mut band: Vec<(usize, usize)> = best.into_iter().map(|(n, (_, id))| (n, id)).collect();
        band.sort_unstable();
        Ok(Self {
            dirs,
            arms,
            crossings,
            band,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::GraphDomain2D;

    #[test]
    fn half_disc_node_count() {
        let dom = GridDomain::build(Shape::half_disc(1.0), 1.0 / 64.0).unwrap();
        let est = std::f64::consts::FRAC_PI_2 * 64.0 * 64.0;
        let rel = (dom.node_count() as f64 - est).abs() / est;
        assert!(rel < 0.02, "count {} vs {est}", dom.node_count());
    }

    #[test]
    fn half_cube_mask_is_a_box() {
        let h = 1.0 / 64.0;
        let dom = GridDomain::build(Shape::half_cube(1.0), h).unwrap();
        // x ∈ (−1/2, 1/2) exclusive gives 63 columns; y ∈ (0, 1/2) gives 31 rows.
        assert_eq!(dom.node_count(), 63 * 31);
        for &k in &dom.nodes {
            let p = dom.grid.point(k);
            assert!(p[0].abs() < 0.5 && p[1] > 0.0 && p[1] < 0.5);
        }
    }

    #[test]
    fn log_domain_contains_probe_point() {
        let shape = Shape::graph(GraphDomain2D::log_example(), 0.5);
        let dom = GridDomain::build(shape, 1.0 / 256.0).unwrap();
        let k = dom.grid.node_at([0.0, 0.25]).unwrap();
        assert!(dom.is_inside(k));
        assert!(!dom.is_inside(dom.grid.origin().unwrap()));
    }

    #[test]
    fn shifted_half_ball_translates() {
        let s = Shape::shifted_half_ball(1.0, [0.0, 1.0], 0.1);
        assert!(s.inside([0.0, -0.05]));
        assert!(!s.inside([0.0, -0.15]));
        assert_eq!(s.part_at([0.0, -0.1]), Part::Flat);
    }

    #[test]
    fn degenerate_shapes_are_rejected() {
        assert!(matches!(
            GridDomain::build(Shape::half_disc(0.01), 0.1),
            Err(LabError::DegenerateDomain(_))
        ));
        assert!(GridDomain::build(Shape::half_disc(-1.0), 0.1).is_err());
    }

    #[test]
    fn cut_cell_weights_are_exact_on_affine_functions() {
        let dom = GridDomain::build(Shape::half_disc(1.0), 0.1).unwrap();
        let disc = Discretization::new(&dom, &StencilSet::default()).unwrap();
        let f = |p: [f64; 2]| 0.3 + 1.7 * p[0] - 2.1 * p[1];
        let nd = disc.dirs.len();
        for (i, &k) in dom.nodes.iter().enumerate() {
            let u0 = f(dom.grid.point(k));
            for a in &disc.arms[i * nd..(i + 1) * nd] {
                let val = |arm: &Arm| match arm.target {
                    Target::Node(n) => f(dom.grid.point(n)),
                    Target::Crossing(c) => f(disc.crossings[c].point),
                };
                let second = a.plus.coef * (val(&a.plus) - u0) + a.minus.coef * (val(&a.minus) - u0);
                assert!(second.abs() < 1e-8, "second difference {second}");
                assert!(a.plus.coef > 0.0 && a.minus.coef > 0.0);
            }
        }
        assert!(!disc.band.is_empty());
    }
}
