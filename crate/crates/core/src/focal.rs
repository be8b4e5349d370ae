//! Complex focal radii, the lifted spectrum and focal hyperplane arrangements.
//!
//! Along a unit normal `v` with `R(., v)v = mu` and `A_v = lambda` on a common
//! eigenvector, the focal radii are the zeros of
//! `cosh(z b) - lambda sinh(z b) / b` with `b = sqrt(-mu)`.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::exact::{self, ExactVector, Rational};
use crate::hermann::{HermannAction, HermannError};
use crate::reflgroup::{self, AffineIsometry, GeneratedGroup};

pub type ComplexScalar = Complex64;

#[derive(thiserror::Error, Debug)]
pub enum FocalError {
    #[error("not proper complex equifocal datum: |lambda| = sqrt(-mu) for lambda = {lambda}, mu = {mu}")]
    NotProper { lambda: f64, mu: f64 },
    #[error("invalid Jacobi datum: {0}")]
    InvalidDatum(String),
    #[error(transparent)]
    Hermann(#[from] HermannError),
    #[error("vector has dimension {got}, expected {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("xi = {0} does not lie in the section")]
    OffSection(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

/// Inclusive range of lattice indices; empty when `min > max`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct JRange {
    pub min: i64,
    pub max: i64,
}

impl JRange {
    pub const DEFAULT: JRange = JRange { min: -3, max: 3 };

    pub fn new(min: i64, max: i64) -> Self {
        Self { min, max }
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> {
        self.min..=self.max
    }

    pub fn is_empty(&self) -> bool {
        self.min > self.max
    }
}

impl Default for JRange {
    fn default() -> Self {
        Self::DEFAULT
    }
}

impl std::str::FromStr for JRange {
    type Err = String;

    /// `a..b` (inclusive) or a single integer.
    fn from_str(s: &str) -> Result<Self, String> {
        let bad = || format!("bad j-range {s:?}, expected e.g. -3..3");
        match s.split_once("..") {
            Some((a, b)) => {
                let b = b.strip_prefix('=').unwrap_or(b);
                Ok(Self::new(a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
            }
            None => {
                let j = s.trim().parse().map_err(|_| bad())?;
                Ok(Self::new(j, j))
            }
        }
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

/// Solutions of `tanh(z beta) = beta / lambda`.
pub fn complex_focal_radii(lambda: f64, beta: f64, j: JRange) -> Vec<ComplexScalar> {
    let beta = beta.abs();
    if beta == 0.0 {
        return if lambda == 0.0 { Vec::new() } else { vec![Complex64::new(1.0 / lambda, 0.0)] };
    }
    if close(lambda.abs(), beta) {
        return Vec::new();
    }
    let (re, shift) = if lambda.abs() > beta { ((beta / lambda).atanh(), 0.0) } else { ((lambda / beta).atanh(), 0.5) };
    j.iter().map(|j| Complex64::new(re, (j as f64 + shift) * PI) / beta).collect()
}

/// `cosh(z beta) - lambda sinh(z beta) / beta`, or `1 - z lambda` when `beta = 0`.
pub fn focal_residual(z: ComplexScalar, lambda: f64, beta: f64) -> ComplexScalar {
    if beta == 0.0 {
        return Complex64::new(1.0, 0.0) - z * lambda;
    }
    (z * beta).cosh() - (z * beta).sinh() * (lambda / beta)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct JacobiPair {
    pub lambda: f64,
    pub mu: f64,
    pub weight: f64,
}

/// Joint eigenvalues of `A_v` and `R(., v)v` with the squared norms of the
/// corresponding components of a Jacobi field's initial value.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct JacobiSpectralDatum {
    pub pairs: Vec<JacobiPair>,
}

impl JacobiSpectralDatum {
    pub fn new(pairs: Vec<JacobiPair>) -> Result<Self, FocalError> {
        for p in &pairs {
            if !(p.lambda.is_finite() && p.mu.is_finite() && p.weight.is_finite()) {
                return Err(FocalError::InvalidDatum("non-finite entry".into()));
            }
            if p.mu > 0.0 {
                return Err(FocalError::InvalidDatum(format!("mu = {} is positive", p.mu)));
            }
            if p.weight <= 0.0 {
                return Err(FocalError::InvalidDatum(format!("weight = {} is not positive", p.weight)));
            }
        }
        Ok(Self { pairs })
    }

    /// Unit weights.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self, FocalError> {
        Self::new(pairs.iter().map(|&(lambda, mu)| JacobiPair { lambda, mu, weight: 1.0 }).collect())
    }
}

/// Reciprocals of the focal radii for one `(lambda, mu)` pair, in the same
/// order as [`complex_focal_radii`].
pub fn lifted_values(lambda: f64, mu: f64, j: JRange) -> Result<Vec<ComplexScalar>, FocalError> {
    if mu == 0.0 {
        return Ok(vec![Complex64::new(lambda, 0.0)]);
    }
    let s = (-mu).sqrt();
    if close(lambda.abs(), s) {
        return Err(FocalError::NotProper { lambda, mu });
    }
    let (re, shift) = if lambda.abs() > s { ((s / lambda).atanh(), 0.0) } else { ((lambda / s).atanh(), 0.5) };
    Ok(j.iter().map(|j| Complex64::new(s, 0.0) / Complex64::new(re, (j as f64 + shift) * PI)).collect())
}

/// Spectrum of the lifted shape operator on path space: `0`, every
/// Euclidean `lambda`, and both arctanh families over `j`.
pub fn lifted_spectrum(pairs: &[(f64, f64)], j: JRange) -> Result<Vec<ComplexScalar>, FocalError> {
    let mut out = vec![Complex64::zero()];
    for &(lambda, mu) in pairs {
        if mu > 0.0 {
            return Err(FocalError::InvalidDatum(format!("mu = {mu} is positive")));
        }
        out.extend(lifted_values(lambda, mu, j)?);
    }
    Ok(out)
}

/// `||Y(t)||^2` for the Jacobi field with `Y(0) = sum X_{lambda,mu}`,
/// `Y'(0) = -A_v Y(0)`.
pub fn jacobi_norm_sq(data: &JacobiSpectralDatum, t: f64) -> f64 {
    data.pairs
        .iter()
        .map(|p| {
            let f = if p.mu == 0.0 {
                1.0 - t * p.lambda
            } else {
                let s = (-p.mu).sqrt();
                (t * s).cosh() - p.lambda * (t * s).sinh() / s
            };
            f * f * p.weight
        })
        .sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct IdealBoundaryFocal {
    pub has_focal: bool,
    pub has_non_euclidean_focal: bool,
}

/// Whether some Jacobi field grows sublinearly, i.e. some `lambda = ±sqrt(-mu)`.
pub fn ideal_boundary_focal(data: &JacobiSpectralDatum) -> IdealBoundaryFocal {
    let non_euclidean = data.pairs.iter().any(|p| p.mu != 0.0 && close(p.lambda.abs(), (-p.mu).sqrt()));
    let euclidean = data.pairs.iter().any(|p| p.mu == 0.0 && p.lambda == 0.0);
    IdealBoundaryFocal { has_focal: non_euclidean || euclidean, has_non_euclidean_focal: non_euclidean }
}

/// Imaginary lattice of a hyperplane family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    /// offsets `j pi i`
    IntegerPi,
    /// offsets `(j + 1/2) pi i`
    HalfIntegerPi,
}

impl FamilyKind {
    /// Imaginary offset at `j = 0`, in units of `pi`.
    pub fn shift(self) -> Rational {
        match self {
            FamilyKind::IntegerPi => Rational::zero(),
            FamilyKind::HalfIntegerPi => exact::ratio(1, 2),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::IntegerPi => "integer_pi",
            FamilyKind::HalfIntegerPi => "half_integer_pi",
        }
    }
}

/// `{(beta^c)^{-1}(base_offset + (j + shift) pi i) : j}` for one root.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FocalFamily {
    pub root: ExactVector,
    pub family: FamilyKind,
    pub base_offset: f64,
    /// exact real offset, when known
    #[serde(skip)]
    pub exact_offset: Option<Rational>,
}

impl FocalFamily {
    pub fn new(root: ExactVector, family: FamilyKind, base_offset: f64) -> Self {
        Self { root, family, base_offset, exact_offset: None }
    }

    pub fn level(&self, j: i64) -> ComplexScalar {
        let shift = exact::to_f64(&self.family.shift());
        Complex64::new(self.base_offset, (j as f64 + shift) * PI)
    }
}

/// One member of a family.
#[derive(Clone, Debug, PartialEq)]
pub struct FocalHyperplane {
    pub root: ExactVector,
    pub family: FamilyKind,
    pub base_offset: f64,
    pub j: i64,
    pub level: ComplexScalar,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FocalArrangement {
    pub dim: usize,
    pub j_range: JRange,
    pub families: Vec<FocalFamily>,
    /// normals of the section inside the ambient coordinates, if it is proper
    pub section_normals: Vec<ExactVector>,
}

impl FocalArrangement {
    pub fn new(dim: usize, families: Vec<FocalFamily>, j_range: JRange) -> Self {
        Self { dim, j_range, families, section_normals: Vec::new() }
    }

    /// Families enumerated over the truncating range.
    pub fn hyperplanes(&self) -> Vec<FocalHyperplane> {
        let mut out = Vec::new();
        for f in &self.families {
            for j in self.j_range.iter() {
                out.push(FocalHyperplane {
                    root: f.root.clone(),
                    family: f.family,
                    base_offset: f.base_offset,
                    j,
                    level: f.level(j),
                });
            }
        }
        out
    }

    pub fn count(&self, kind: FamilyKind) -> usize {
        self.families.iter().filter(|f| f.family == kind).count()
    }

    /// For each root every family has the same real offset.
    pub fn offsets_coincide(&self, tol: f64) -> bool {
        self.families.iter().all(|f| {
            self.families
                .iter()
                .filter(|g| g.root.ratio_to(&f.root).is_some())
                .all(|g| {
                    let r = exact::to_f64(&g.root.ratio_to(&f.root).unwrap());
                    (g.base_offset - r * f.base_offset).abs() <= tol
                })
        })
    }

    /// CSV with one row per enumerated hyperplane.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), FocalError> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["root", "family", "base_offset", "j", "level_re", "level_im"])?;
        for h in self.hyperplanes() {
            out.write_record([
                h.root.to_string(),
                h.family.name().to_string(),
                format!("{:.12}", h.base_offset),
                h.j.to_string(),
                format!("{:.12}", h.level.re),
                format!("{:.12}", h.level.im),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Focal arrangement of the principal orbit through `exp(xi)`: vertical
/// roots give `-beta(xi) + j pi i`, horizontal ones `-beta(xi) + (j + 1/2) pi i`.
pub fn hermann_focal_arrangement(action: &HermannAction, xi: &ExactVector, j: JRange) -> Result<FocalArrangement, FocalError> {
    let dim = action.system.ambient_dim();
    if xi.dim() != dim {
        return Err(FocalError::Dimension { expected: dim, got: xi.dim() });
    }
    let mut families = Vec::new();
    for (root, flags) in action.per_root()? {
        let bx = root.vector.dot(xi);
        if flags.in_v && bx.is_zero() {
            return Err(HermannError::NonPrincipal(root.vector.to_string()).into());
        }
        let offset = -bx;
        for (on, kind) in [(flags.in_v, FamilyKind::IntegerPi), (flags.in_h, FamilyKind::HalfIntegerPi)] {
            if on {
                families.push(FocalFamily {
                    root: root.vector.clone(),
                    family: kind,
                    base_offset: exact::to_f64(&offset),
                    exact_offset: Some(offset.clone()),
                });
            }
        }
    }
    let normals = section_normals(&action.system.span_basis(), dim);
    if normals.iter().any(|n| !n.dot(xi).is_zero()) {
        return Err(FocalError::OffSection(xi.to_string()));
    }
    let mut arr = FocalArrangement::new(dim, families, j);
    arr.section_normals = normals;
    Ok(arr)
}

/// Basis of the orthogonal complement of `span` in `dim` coordinates.
pub fn section_normals(span: &[ExactVector], dim: usize) -> Vec<ExactVector> {
    let rows: Vec<Vec<Rational>> = span.iter().map(|v| v.coords().to_vec()).collect();
    let zeros = vec![Rational::zero(); rows.len()];
    exact::solve(&rows, &zeros, dim).map(|s| s.kernel.into_iter().map(ExactVector::new).collect()).unwrap_or_default()
}

/// Real hyperplanes `beta(X) = offset` and their common intersection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealFocalSet {
    pub hyperplanes: Vec<(ExactVector, Rational)>,
    /// a point of the intersection, `None` when it is empty
    pub common_point: Option<ExactVector>,
    /// directions of the intersection flat (empty when it is a point)
    pub flat_directions: Vec<ExactVector>,
}

impl RealFocalSet {
    pub fn is_point(&self) -> bool {
        self.common_point.is_some() && self.flat_directions.is_empty()
    }

    /// Whether `x` lies on every hyperplane.
    pub fn contains(&self, x: &ExactVector) -> bool {
        self.hyperplanes.iter().all(|(r, c)| &r.dot(x) == c)
    }
}

fn exact_offset(f: &FocalFamily) -> Rational {
    f.exact_offset
        .clone()
        .unwrap_or_else(|| Rational::from_float(f.base_offset).unwrap_or_else(Rational::zero))
}

/// The real slice: the `j = 0` members of the integer families, intersected
/// inside the section.
pub fn real_focal_set(arr: &FocalArrangement) -> RealFocalSet {
    let hyperplanes: Vec<(ExactVector, Rational)> = arr
        .families
        .iter()
        .filter(|f| f.family == FamilyKind::IntegerPi)
        .map(|f| (f.root.clone(), exact_offset(f)))
        .collect();
    let mut a: Vec<Vec<Rational>> = hyperplanes.iter().map(|(r, _)| r.coords().to_vec()).collect();
    let mut b: Vec<Rational> = hyperplanes.iter().map(|(_, c)| c.clone()).collect();
    for n in &arr.section_normals {
        a.push(n.coords().to_vec());
        b.push(Rational::zero());
    }
    match exact::solve(&a, &b, arr.dim) {
        Some(sol) => RealFocalSet {
            hyperplanes,
            common_point: Some(ExactVector::new(sol.particular)),
            flat_directions: sol.kernel.into_iter().map(ExactVector::new).collect(),
        },
        None => RealFocalSet { hyperplanes, common_point: None, flat_directions: Vec::new() },
    }
}

/// Reflections in the imaginary slices at `j = 0, 1`, with levels in units
/// of `pi`. They generate the group acting on the imaginary parts.
pub fn arrangement_reflections(arr: &FocalArrangement) -> Vec<AffineIsometry> {
    let mut out: Vec<AffineIsometry> = Vec::new();
    for f in &arr.families {
        for j in 0..2 {
            let level = f.family.shift() + exact::int(j);
            let g = reflgroup::affine_reflection_at(&f.root, &level).expect("roots are nonzero");
            if !out.contains(&g) {
                out.push(g);
            }
        }
    }
    out
}

struct Lattice1 {
    dir: Vec<f64>,
    /// levels `(shift + Z) * step` along `dir`
    shift: f64,
    step: f64,
}

fn canonical(v: &[f64]) -> (Vec<f64>, f64) {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let sign = v.iter().find(|x| x.abs() > 1e-12).map_or(1.0, |x| x.signum());
    (v.iter().map(|x| x * sign / n).collect(), sign * n)
}

/// Whether every group element maps each truncated imaginary slice
/// `{Y : beta(Y) = (j + shift)}` (levels in units of `pi`) onto a hyperplane
/// of the periodically extended arrangement.
pub fn arrangement_invariance(arr: &FocalArrangement, ball: &GeneratedGroup, tol: f64) -> bool {
    let lattices: Vec<Lattice1> = arr
        .families
        .iter()
        .map(|f| {
            let (dir, scale) = canonical(&f.root.to_f64());
            Lattice1 { dir, shift: exact::to_f64(&f.family.shift()), step: 1.0 / scale }
        })
        .collect();
    let hits = |dir: &[f64], level: f64| {
        lattices.iter().any(|l| {
            let dot: f64 = l.dir.iter().zip(dir).map(|(a, b)| a * b).sum();
            if (dot.abs() - 1.0).abs() > tol {
                return false;
            }
            let k = level * dot.signum() / l.step - l.shift;
            (k - k.round()).abs() <= tol
        })
    };
    let range = if arr.j_range.is_empty() { JRange::new(0, 0) } else { arr.j_range };
    for g in ball.elements() {
        let lin = g.linear().to_f64();
        let t = g.translation().to_f64();
        for f in &arr.families {
            let beta = f.root.to_f64();
            let lb: Vec<f64> = lin.iter().map(|row| row.iter().zip(&beta).map(|(a, b)| a * b).sum()).collect();
            let (dir, scale) = canonical(&lb);
            let lt: f64 = lb.iter().zip(&t).map(|(a, b)| a * b).sum();
            let shift = exact::to_f64(&f.family.shift());
            for j in range.iter() {
                let level = (j as f64 + shift + lt) / scale;
                if !hits(&dir, level) {
                    return false;
                }
            }
        }
    }
    true
}

/// SVG drawing of a rank-2 real slice, in an orthonormal frame of `plane`.
pub fn render_svg(set: &RealFocalSet, plane: &[ExactVector]) -> Option<String> {
    if plane.len() != 2 {
        return None;
    }
    let basis = float_orthonormal(plane);
    let to2 = |v: &[f64]| -> [f64; 2] {
        [
            basis[0].iter().zip(v).map(|(a, b)| a * b).sum(),
            basis[1].iter().zip(v).map(|(a, b)| a * b).sum(),
        ]
    };
    let centre = set.common_point.as_ref().map(|p| to2(&p.to_f64())).unwrap_or([0.0, 0.0]);
    let half = 4.0;
    let size = 400.0;
    let sx = |x: f64| (x - centre[0] + half) / (2.0 * half) * size;
    let sy = |y: f64| size - (y - centre[1] + half) / (2.0 * half) * size;
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\" viewBox=\"0 0 {size} {size}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    );
    for (root, offset) in &set.hyperplanes {
        let n = to2(&root.to_f64());
        let c = offset.to_f64().unwrap_or(0.0);
        let nn = n[0] * n[0] + n[1] * n[1];
        if nn == 0.0 {
            continue;
        }
        let foot = [n[0] * c / nn, n[1] * c / nn];
        let d = [-n[1] / nn.sqrt(), n[0] / nn.sqrt()];
        let r = 3.0 * half;
        let (x1, y1) = (foot[0] - r * d[0], foot[1] - r * d[1]);
        let (x2, y2) = (foot[0] + r * d[0], foot[1] + r * d[1]);
        svg.push_str(&format!(
            "<line x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\" stroke=\"black\" stroke-width=\"1.5\"><title>{}</title></line>\n",
            sx(x1),
            sy(y1),
            sx(x2),
            sy(y2),
            root
        ));
    }
    if set.common_point.is_some() {
        svg.push_str(&format!(
            "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"5\" fill=\"red\"><title>common point</title></circle>\n",
            sx(centre[0]),
            sy(centre[1])
        ));
    }
    svg.push_str("</svg>\n");
    Some(svg)
}

fn float_orthonormal(vs: &[ExactVector]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for v in vs {
        let mut w = v.to_f64();
        for u in &out {
            let d: f64 = u.iter().zip(&w).map(|(a, b)| a * b).sum();
            w.iter_mut().zip(u).for_each(|(x, y)| *x -= d * y);
        }
        let n = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        out.push(w.into_iter().map(|x| x / n).collect());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermann::HermannCatalog;

    #[test]
    fn radii_examples() {
        let r = complex_focal_radii(2.0, 1.0, JRange::new(0, 0));
        assert!((r[0].re - 0.5f64.atanh()).abs() < 1e-15 && r[0].im == 0.0);
        assert!((r[0].re - 0.549306144334055).abs() < 1e-12);
        assert_eq!(complex_focal_radii(3.0, 0.0, JRange::DEFAULT), vec![Complex64::new(1.0 / 3.0, 0.0)]);
        assert!(complex_focal_radii(1.0, 1.0, JRange::DEFAULT).is_empty());
        assert!(complex_focal_radii(0.0, 0.0, JRange::DEFAULT).is_empty());
        let small = complex_focal_radii(0.0, 2.0, JRange::new(0, 0));
        assert!((small[0] - Complex64::new(0.0, PI / 4.0)).norm() < 1e-15);
        for l in [-3.0, -0.5, 0.0, 0.7, 4.0] {
            for z in complex_focal_radii(l, 1.3, JRange::DEFAULT) {
                assert!(focal_residual(z, l, 1.3).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn lifted_examples() {
        let v = lifted_spectrum(&[(2.0, -1.0)], JRange::new(0, 0)).unwrap();
        assert_eq!(v[0], Complex64::zero());
        assert!((v[1].re - 1.0 / 0.5f64.atanh()).abs() < 1e-12);
        assert!((v[1].re - 1.820478453253675).abs() < 1e-12);
        let w = lifted_spectrum(&[(0.0, -1.0)], JRange::new(0, 0)).unwrap();
        assert!((w[1] - Complex64::new(0.0, -2.0 / PI)).norm() < 1e-15);
        assert_eq!(lifted_spectrum(&[(5.0, 0.0)], JRange::DEFAULT).unwrap()[1], Complex64::new(5.0, 0.0));
        assert!(matches!(lifted_spectrum(&[(1.0, -1.0)], JRange::DEFAULT), Err(FocalError::NotProper { .. })));
    }

    #[test]
    fn jacobi_examples() {
        let d = JacobiSpectralDatum::from_pairs(&[(1.0, -1.0)]).unwrap();
        for t in [0.0, 0.5, 3.0, 10.0] {
            assert!((jacobi_norm_sq(&d, t) - (-2.0 * t).exp()).abs() < 1e-9);
        }
        let c = JacobiSpectralDatum::from_pairs(&[(0.0, 0.0)]).unwrap();
        assert_eq!(jacobi_norm_sq(&c, 7.0), 1.0);
        let e = JacobiSpectralDatum::from_pairs(&[(2.0, 0.0)]).unwrap();
        assert_eq!(jacobi_norm_sq(&e, 0.5), 0.0);
        assert_eq!(ideal_boundary_focal(&d), IdealBoundaryFocal { has_focal: true, has_non_euclidean_focal: true });
        let g = JacobiSpectralDatum::from_pairs(&[(2.0, -1.0)]).unwrap();
        assert_eq!(ideal_boundary_focal(&g), IdealBoundaryFocal { has_focal: false, has_non_euclidean_focal: false });
        assert_eq!(ideal_boundary_focal(&c), IdealBoundaryFocal { has_focal: true, has_non_euclidean_focal: false });
        assert!(jacobi_norm_sq(&g, 50.0) / 2500.0 > 1e6);
        assert!(JacobiSpectralDatum::from_pairs(&[(1.0, 1.0)]).is_err());
    }

    #[test]
    fn isotropy_arrangement() {
        let cat = HermannCatalog::builtin();
        let iso = cat.get("T2-01[n=3]").unwrap();
        let xi = ExactVector::from_ints(&[2, 1, -3]);
        let arr = hermann_focal_arrangement(iso, &xi, JRange::DEFAULT).unwrap();
        assert_eq!(arr.count(FamilyKind::IntegerPi), 3);
        assert_eq!(arr.count(FamilyKind::HalfIntegerPi), 0);
        assert_eq!(arr.hyperplanes().len(), 21);
        assert!(arr.offsets_coincide(1e-12));
        let set = real_focal_set(&arr);
        assert!(set.is_point());
        assert_eq!(set.common_point, Some(-&xi));
        let off = ExactVector::from_ints(&[3, 1, 0]);
        assert!(matches!(hermann_focal_arrangement(iso, &off, JRange::DEFAULT), Err(FocalError::OffSection(_))));
        let empty = hermann_focal_arrangement(iso, &xi, JRange::new(1, 0)).unwrap();
        assert_eq!(empty.families.len(), 3);
        assert!(empty.hyperplanes().is_empty());
        let mut buf = Vec::new();
        arr.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 22);
    }

    #[test]
    fn real_focal_set_cases() {
        let e1 = ExactVector::from_ints(&[1, 0]);
        let e2 = ExactVector::from_ints(&[0, 1]);
        let fam = |r: &ExactVector, c: f64| FocalFamily::new(r.clone(), FamilyKind::IntegerPi, c);
        let arr = FocalArrangement::new(2, vec![fam(&e1, 0.5), fam(&e2, -2.0), fam(&(&e1 + &e2), -1.5)], JRange::DEFAULT);
        let set = real_focal_set(&arr);
        assert!(set.is_point());
        assert_eq!(set.common_point, Some(ExactVector::new(vec![exact::ratio(1, 2), exact::int(-2)])));
        let par = FocalArrangement::new(2, vec![fam(&e1, 0.0), fam(&e1, 1.0)], JRange::DEFAULT);
        assert_eq!(real_focal_set(&par).common_point, None);
    }

    #[test]
    fn invariance_a1() {
        let a = ExactVector::from_ints(&[1]);
        let arr = FocalArrangement::new(1, vec![FocalFamily::new(a, FamilyKind::IntegerPi, 0.0)], JRange::DEFAULT);
        let ball = reflgroup::generate_affine_ball(&arrangement_reflections(&arr), 4).unwrap();
        assert!(arrangement_invariance(&arr, &ball, 1e-9));
        let id = reflgroup::generate_affine_ball(&[AffineIsometry::identity(1)], 4).unwrap();
        assert!(arrangement_invariance(&arr, &id, 1e-9));
    }

    #[test]
    fn invariance_broken() {
        let e1 = ExactVector::from_ints(&[1, 0]);
        let e2 = ExactVector::from_ints(&[0, 1]);
        let full = FocalArrangement::new(
            2,
            vec![
                FocalFamily::new(e1.clone(), FamilyKind::IntegerPi, 0.0),
                FocalFamily::new(e2.clone(), FamilyKind::IntegerPi, 0.0),
                FocalFamily::new(&e1 + &e2, FamilyKind::IntegerPi, 0.0),
                FocalFamily::new(&e1 - &e2, FamilyKind::IntegerPi, 0.0),
            ],
            JRange::DEFAULT,
        );
        let ball = reflgroup::generate_affine_ball(&arrangement_reflections(&full), 3).unwrap();
        assert!(arrangement_invariance(&full, &ball, 1e-9));
        let mut broken = full.clone();
        broken.families.remove(1);
        assert!(!arrangement_invariance(&broken, &ball, 1e-9));
    }

    #[test]
    fn svg_has_lines() {
        let cat = HermannCatalog::builtin();
        let iso = cat.get("T2-01[n=3]").unwrap();
        let xi = ExactVector::from_ints(&[2, 1, -3]);
        let set = real_focal_set(&hermann_focal_arrangement(iso, &xi, JRange::new(0, 0)).unwrap());
        let svg = render_svg(&set, &iso.system.span_basis()).unwrap();
        assert_eq!(svg.matches("<line").count(), 3);
        assert!(svg.contains("<circle"));
    }
}
