//! Pucci extremal operators and their monotone wide-stencil discretization.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::grid::GridFunction;

/// Ellipticity constants `0 < λ ≤ Λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ellipticity {
    pub lambda: f64,
    #[serde(rename = "Lambda")]
    pub big_lambda: f64,
}

impl Ellipticity {
    pub fn new(lambda: f64, big_lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda <= big_lambda && big_lambda.is_finite()) {
            return Err(LabError::Precondition(format!(
                "ellipticity needs 0 < λ ≤ Λ, got λ = {lambda}, Λ = {big_lambda}"
            )));
        }
        Ok(Self { lambda, big_lambda })
    }

    pub fn laplace() -> Self {
        Self {
            lambda: 1.0,
            big_lambda: 1.0,
        }
    }
}

/// Symmetric `n × n` matrix stored as its upper triangle, row by row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymMat {
    n: usize,
    upper: Vec<f64>,
}

impl SymMat {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            upper: vec![0.0; n * (n + 1) / 2],
        }
    }

    pub fn diag(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &v) in d.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    /// `[[a, b], [b, c]]`.
    pub fn sym2(a: f64, b: f64, c: f64) -> Self {
        Self { n: 2, upper: vec![a, b, c] }
    }

    /// Builds from full rows; fails unless the rows form a symmetric matrix.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(LabError::Domain("matrix rows must form a square".into()));
        }
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                if rows[i][j] != rows[j][i] {
                    return Err(LabError::Domain(format!("matrix not symmetric at ({i}, {j})")));
                }
                m.set(i, j, rows[i][j]);
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        i * self.n - i * (i + 1) / 2 + j
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.upper[self.slot(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let s = self.slot(i, j);
        self.upper[s] = v;
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn scale(&self, t: f64) -> Self {
        Self {
            n: self.n,
            upper: self.upper.iter().map(|v| v * t).collect(),
        }
    }

    pub fn add(&self, other: &SymMat) -> Result<Self> {
        if self.n != other.n {
            return Err(LabError::Domain("dimension mismatch".into()));
        }
        Ok(Self {
            n: self.n,
            upper: self.upper.iter().zip(&other.upper).map(|(a, b)| a + b).collect(),
        })
    }

    /// `R M Rᵀ` for the plane rotation by `angle` (2×2 only).
    pub fn rotated2(&self, angle: f64) -> Self {
        assert_eq!(self.n, 2, "rotated2 needs a 2x2 matrix");
        let (s, c) = angle.sin_cos();
        let (a, b, d) = (self.get(0, 0), self.get(0, 1), self.get(1, 1));
        Self::sym2(
            c * c * a - 2.0 * s * c * b + s * s * d,
            s * c * (a - d) + (c * c - s * s) * b,
            s * s * a + 2.0 * s * c * b + c * c * d,
        )
    }

    /// `tr(A M)` for another symmetric matrix `A`.
    pub fn frobenius(&self, other: &SymMat) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                s += self.get(i, j) * other.get(i, j);
            }
        }
        s
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        match self.n {
            0 => vec![],
            1 => vec![self.upper[0]],
            2 => {
                let (a, b, c) = (self.upper[0], self.upper[1], self.upper[2]);
                let mean = 0.5 * (a + c);
                let rad = (0.5 * (a - c)).hypot(b);
                vec![mean - rad, mean + rad]
            }
            n => {
                let m = nalgebra::DMatrix::from_fn(n, n, |i, j| self.get(i, j));
                m.symmetric_eigenvalues().iter().copied().collect()
            }
        }
    }
}

/// `M⁺(M, λ, Λ) = Λ Σ μᵢ⁺ − λ Σ μᵢ⁻`.
pub fn pucci_sup(m: &SymMat, e: Ellipticity) -> f64 {
    m.eigenvalues().iter().map(|&mu| g_sup(mu, e)).sum()
}

/// `M⁻(M, λ, Λ) = λ Σ μᵢ⁺ − Λ Σ μᵢ⁻`.
pub fn pucci_inf(m: &SymMat, e: Ellipticity) -> f64 {
    m.eigenvalues().iter().map(|&mu| g_inf(mu, e)).sum()
}

#[inline]
pub(crate) fn g_sup(d: f64, e: Ellipticity) -> f64 {
    if d >= 0.0 {
        e.big_lambda * d
    } else {
        e.lambda * d
    }
}

#[inline]
pub(crate) fn g_inf(d: f64, e: Ellipticity) -> f64 {
    if d >= 0.0 {
        e.lambda * d
    } else {
        e.big_lambda * d
    }
}

/// Which operator a discretization or solve uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OpMode {
    Sup,
    Inf,
    /// `λ Δ` with the five-point stencil.
    Laplace,
}

impl std::str::FromStr for OpMode {
    type Err = LabError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sup" | "max" | "plus" => Ok(OpMode::Sup),
            "inf" | "min" | "minus" => Ok(OpMode::Inf),
            "laplace" | "harmonic" => Ok(OpMode::Laplace),
            other => Err(LabError::Parse(format!("unknown operator mode '{other}'"))),
        }
    }
}

pub type Dir = [i64; 2];

/// Orthogonal direction pairs `(v, v⊥)` of a wide stencil. The first pair is
/// always the axis pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StencilSet {
    pub width: usize,
    pub pairs: Vec<(Dir, Dir)>,
}

/// Default stencil width.
pub const DEFAULT_WIDTH: usize = 3;

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

impl StencilSet {
    /// All primitive directions `v = (a, b)` with `a > 0`, `b ≥ 0` and
    /// `max(a, b) ≤ width`, each paired with `v⊥ = (−b, a)`.
    pub fn new(width: usize) -> Result<Self> {
        if width == 0 {
            return Err(LabError::Precondition("stencil width must be at least 1".into()));
        }
        let w = width as i64;
        let mut dirs: Vec<Dir> = Vec::new();
        for a in 1..=w {
            for b in 0..=w {
                if gcd(a, b) == 1 {
                    dirs.push([a, b]);
                }
            }
        }
        dirs.sort_by(|p, q| (p[1] as f64).atan2(p[0] as f64).total_cmp(&(q[1] as f64).atan2(q[0] as f64)));
        Ok(Self {
            width,
            pairs: dirs.into_iter().map(|v| (v, [-v[1], v[0]])).collect(),
        })
    }

    /// The axis pair only.
    pub fn axis() -> Self {
        Self {
            width: 1,
            pairs: vec![([1, 0], [0, 1])],
        }
    }

    pub fn directions(&self) -> impl Iterator<Item = Dir> + '_ {
        self.pairs.iter().flat_map(|&(v, w)| [v, w])
    }

    /// Largest angular gap between consecutive directions, modulo π.
    pub fn angular_resolution(&self) -> f64 {
        let mut angles: Vec<f64> = self
            .directions()
            .map(|d| (d[1] as f64).atan2(d[0] as f64).rem_euclid(std::f64::consts::PI))
            .collect();
        angles.sort_by(f64::total_cmp);
        let mut gap = angles[0] + std::f64::consts::PI - angles[angles.len() - 1];
        for w in angles.windows(2) {
            gap = gap.max(w[1] - w[0]);
        }
        gap
    }
}

impl Default for StencilSet {
    fn default() -> Self {
        Self::new(DEFAULT_WIDTH).expect("default width is valid")
    }
}

/// Value of one orthogonal pair given its two second differences.
#[inline]
pub fn pair_value(dv: f64, dw: f64, e: Ellipticity, mode: OpMode) -> f64 {
    match mode {
        OpMode::Sup => g_sup(dv, e) + g_sup(dw, e),
        OpMode::Inf => g_inf(dv, e) + g_inf(dw, e),
        OpMode::Laplace => e.lambda * (dv + dw),
    }
}

/// Combines pair second differences into the discrete operator: the max over
/// pairs in sup mode, the min in inf mode, the axis pair alone for Laplace.
pub fn combine_pairs<I: IntoIterator<Item = (f64, f64)>>(pairs: I, e: Ellipticity, mode: OpMode) -> f64 {
    let mut it = pairs.into_iter();
    match mode {
        OpMode::Sup => it.map(|(a, b)| pair_value(a, b, e, mode)).fold(f64::NEG_INFINITY, f64::max),
        OpMode::Inf => it.map(|(a, b)| pair_value(a, b, e, mode)).fold(f64::INFINITY, f64::min),
        OpMode::Laplace => {
            let (a, b) = it.next().expect("at least the axis pair");
            pair_value(a, b, e, mode)
        }
    }
}

/// Centered wide-stencil Pucci operator of `u` at grid node `node`.
pub fn discrete_pucci(u: &GridFunction, node: usize, e: Ellipticity, s: &StencilSet, mode: OpMode) -> Result<f64> {
    let g = &u.grid;
    let u0 = u.values[node];
    if !u0.is_finite() {
        return Err(LabError::NeedsBoundary(format!("no value at node {node}")));
    }
    let h2 = g.h * g.h;
    let second = |d: Dir| -> Result<f64> {
        let look = |sign: i64| {
            g.offset(node, sign * d[0], sign * d[1])
                .map(|k| u.values[k])
                .filter(|v| v.is_finite())
                .ok_or_else(|| LabError::NeedsBoundary(format!("direction {d:?} leaves the grid at node {node}")))
        };
        let len2 = (d[0] * d[0] + d[1] * d[1]) as f64;
        Ok((look(1)? + look(-1)? - 2.0 * u0) / (h2 * len2))
    };
    let pairs = s
        .pairs
        .iter()
        .map(|&(v, w)| Ok((second(v)?, second(w)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(combine_pairs(pairs, e, mode))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    fn e12() -> Ellipticity {
        Ellipticity::new(1.0, 2.0).unwrap()
    }

    #[test]
    fn closed_form_examples() {
        let id = SymMat::diag(&[1.0, 1.0]);
        assert_eq!(pucci_sup(&id, e12()), 4.0);
        assert_eq!(pucci_inf(&id, e12()), 2.0);
        let m = SymMat::diag(&[3.0, -1.0]);
        assert_eq!(pucci_sup(&m, e12()), 5.0);
        assert_eq!(pucci_inf(&m, e12()), 1.0);
    }

    #[test]
    fn equal_constants_collapse_to_trace() {
        let e = Ellipticity::new(0.7, 0.7).unwrap();
        let m = SymMat::sym2(1.3, -2.2, 0.4);
        assert!((pucci_sup(&m, e) - 0.7 * m.trace()).abs() < 1e-14);
        assert!((pucci_inf(&m, e) - 0.7 * m.trace()).abs() < 1e-14);
    }

    #[test]
    fn general_dimension_uses_eigen_routine() {
        let m = SymMat::diag(&[2.0, -1.0, 0.5]);
        assert!((pucci_sup(&m, e12()) - (2.0 * 2.5 - 1.0)).abs() < 1e-12);
        assert!((pucci_inf(&m, e12()) - (2.5 - 2.0)).abs() < 1e-12);
    }

    #[test]
    fn invalid_inputs() {
        assert!(Ellipticity::new(2.0, 1.0).is_err());
        assert!(Ellipticity::new(0.0, 1.0).is_err());
        assert!(SymMat::from_rows(&[vec![1.0, 2.0], vec![3.0, 1.0]]).is_err());
        assert!(StencilSet::new(0).is_err());
    }

    #[test]
    fn stencil_pair_counts() {
        assert_eq!(StencilSet::new(1).unwrap().pairs.len(), 2);
        assert_eq!(StencilSet::new(2).unwrap().pairs.len(), 4);
        assert_eq!(StencilSet::new(3).unwrap().pairs.len(), 8);
        for w in 1..=4 {
            let s = StencilSet::new(w).unwrap();
            assert_eq!(s.pairs[0], ([1, 0], [0, 1]));
            for (v, p) in &s.pairs {
                assert_eq!(v[0] * p[0] + v[1] * p[1], 0);
            }
        }
        assert!(StencilSet::new(3).unwrap().angular_resolution() < StencilSet::new(1).unwrap().angular_resolution());
    }

    #[test]
    fn discrete_quadratic_identity() {
        let g = Grid::covering(0.05, -0.5, 0.5, -0.5, 0.5, 0).unwrap();
        let u = GridFunction::from_fn(g, |p| 0.5 * (p[0] * p[0] + p[1] * p[1]));
        let node = g.origin().unwrap();
        let v = discrete_pucci(&u, node, e12(), &StencilSet::axis(), OpMode::Sup).unwrap();
        assert!((v - 4.0).abs() < 1e-9);
        let corner = g.idx(0, 0);
        assert!(matches!(
            discrete_pucci(&u, corner, e12(), &StencilSet::axis(), OpMode::Sup),
            Err(LabError::NeedsBoundary(_))
        ));
    }

    #[test]
    fn rotated_saddle_approaches_closed_form() {
        let m = SymMat::diag(&[3.0, -1.0]).rotated2(std::f64::consts::PI / 8.0);
        let g = Grid::covering(0.01, -0.1, 0.1, -0.1, 0.1, 0).unwrap();
        let u = GridFunction::from_fn(g, |p| {
            0.5 * (m.get(0, 0) * p[0] * p[0] + 2.0 * m.get(0, 1) * p[0] * p[1] + m.get(1, 1) * p[1] * p[1])
        });
        let node = g.origin().unwrap();
        let exact = pucci_sup(&m, e12());
        let gaps: Vec<f64> = (1..=3)
            .map(|w| exact - discrete_pucci(&u, node, e12(), &StencilSet::new(w).unwrap(), OpMode::Sup).unwrap())
            .collect();
        let axis = exact - discrete_pucci(&u, node, e12(), &StencilSet::axis(), OpMode::Sup).unwrap();
        assert!(gaps.iter().all(|&g| g >= -1e-9));
        assert!(gaps[2] <= gaps[1] + 1e-9 && gaps[1] <= gaps[0] + 1e-9);
        assert!(axis > gaps[2] + 1e-3);
        assert!(gaps[2] < 0.1 * 3.0);
    }
}
