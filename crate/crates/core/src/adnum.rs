//! Floating-point matrix models of `sl(n, R)` and `so(p, q)`.
//!
//! The Jacobi operator `R(., v)v = -ad(v)^2` and the operators
//! `D^co = cosh(s ad v)`, `D^si = sinh(s ad v) / (s ad v)` are computed on
//! `p` from explicit matrices and compared with the closed forms built from
//! restricted roots.

use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::exact::ExactVector;
use crate::focal::{self, JRange};
use crate::formula::Params;
use crate::rootsys::{build_root_system, RootSystem, RootType};
use crate::symcat::{self, Catalog};

pub const MAX_SL_N: usize = 5;
pub const MAX_SO_PQ: usize = 6;

#[derive(thiserror::Error, Debug)]
pub enum AdnumError {
    #[error("model too large: {0}")]
    TooLarge(String),
    #[error("unsupported model: {0}")]
    Unsupported(String),
    #[error("vector has dimension {got}, expected {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("vector is not in a: {0}")]
    NotInA(String),
    #[error("not curvature-adapted: ||[R_v, A]|| = {0:e}")]
    NotCurvatureAdapted(f64),
    #[error("b is not abelian: ||[b_i, b_j]|| = {0:e}")]
    NotAbelian(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "family")]
pub enum ModelFamily {
    /// `SL(n, R) / SO(n)`
    #[serde(rename = "sl_n_R")]
    SlNR { n: usize },
    /// `SO_0(p, q) / SO(p) x SO(q)`, `p <= q`
    #[serde(rename = "so_p_q")]
    SoPQ { p: usize, q: usize },
}

impl fmt::Display for ModelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelFamily::SlNR { n } => write!(f, "sl_n_R(n={n})"),
            ModelFamily::SoPQ { p, q } => write!(f, "so_p_q(p={p},q={q})"),
        }
    }
}

/// Orthonormal basis of `p` made of root vectors, with `a` first.
#[derive(Clone, Debug)]
pub struct MatrixModel {
    pub family: ModelFamily,
    /// basis of `p` as matrices of `g`
    pub basis_p: Vec<DMatrix<f64>>,
    /// the first `basis_a.len()` entries of `basis_p`
    pub basis_a: Vec<DMatrix<f64>>,
    /// positive root labelling each basis vector (`None` on `a`)
    pub basis_roots: Vec<Option<ExactVector>>,
    /// restricted roots in the coordinates used for `v`
    pub system: RootSystem,
    inner_scale: f64,
}

fn unit(n: usize, i: usize, j: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    m[(i, j)] = 1.0;
    m
}

fn bracket(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a * b - b * a
}

fn op_norm(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().max()
}

impl MatrixModel {
    pub fn sl_n_r(n: usize) -> Result<Self, AdnumError> {
        if n > MAX_SL_N {
            return Err(AdnumError::TooLarge(format!("sl(n,R) supports n <= {MAX_SL_N}, got {n}")));
        }
        if n < 2 {
            return Err(AdnumError::Unsupported(format!("sl(n,R) needs n >= 2, got {n}")));
        }
        // orthonormal traceless diagonals by Gram-Schmidt on e_i - e_{i+1}
        let mut diag: Vec<Vec<f64>> = Vec::new();
        for i in 0..n - 1 {
            let mut w = vec![0.0; n];
            w[i] = 1.0;
            w[i + 1] = -1.0;
            for u in &diag {
                let d: f64 = u.iter().zip(&w).map(|(a, b)| a * b).sum();
                w.iter_mut().zip(u).for_each(|(x, y)| *x -= d * y);
            }
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            diag.push(w.into_iter().map(|x| x / norm).collect());
        }
        let basis_a: Vec<DMatrix<f64>> = diag.iter().map(|d| DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d.clone()))).collect();
        let mut basis_p = basis_a.clone();
        let mut basis_roots = vec![None; basis_a.len()];
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for i in 0..n {
            for j in i + 1..n {
                basis_p.push((unit(n, i, j) + unit(n, j, i)) * h);
                let mut r = vec![0i64; n];
                r[i] = 1;
                r[j] = -1;
                basis_roots.push(Some(ExactVector::from_ints(&r)));
            }
        }
        let family = ModelFamily::SlNR { n };
        Ok(Self { family, basis_p, basis_a, basis_roots, system: expected_system(family), inner_scale: 1.0 })
    }

    pub fn so_p_q(p: usize, q: usize) -> Result<Self, AdnumError> {
        if p + q > MAX_SO_PQ {
            return Err(AdnumError::TooLarge(format!("so(p,q) supports p+q <= {MAX_SO_PQ}, got {}", p + q)));
        }
        if p < 1 || p > q {
            return Err(AdnumError::Unsupported(format!("so(p,q) needs 1 <= p <= q, got ({p},{q})")));
        }
        let n = p + q;
        let embed = |b: DMatrix<f64>| {
            let mut m = DMatrix::zeros(n, n);
            m.view_mut((0, p), (p, q)).copy_from(&b);
            m.view_mut((p, 0), (q, p)).copy_from(&b.transpose());
            m
        };
        let e = |i: usize, j: usize| {
            let mut b = DMatrix::zeros(p, q);
            b[(i, j)] = 1.0;
            b
        };
        let basis_a: Vec<DMatrix<f64>> = (0..p).map(|i| embed(e(i, i))).collect();
        let mut basis_p = basis_a.clone();
        let mut basis_roots = vec![None; p];
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let root = |i: usize, j: Option<(usize, i64)>| {
            let mut r = vec![0i64; p];
            r[i] = 1;
            if let Some((j, s)) = j {
                r[j] = s;
            }
            Some(ExactVector::from_ints(&r))
        };
        for i in 0..p {
            for j in i + 1..p {
                // ad(a)^2 (E_ij + s E_ji) = (t_i - s t_j)^2 (E_ij + s E_ji)
                basis_p.push(embed((e(i, j) + e(j, i)) * h));
                basis_roots.push(root(i, Some((j, -1))));
                basis_p.push(embed((e(i, j) - e(j, i)) * h));
                basis_roots.push(root(i, Some((j, 1))));
            }
            for c in p..q {
                basis_p.push(embed(e(i, c)));
                basis_roots.push(root(i, None));
            }
        }
        let family = ModelFamily::SoPQ { p, q };
        Ok(Self { family, basis_p, basis_a, basis_roots, system: expected_system(family), inner_scale: 0.5 })
    }

    pub fn new(family: ModelFamily) -> Result<Self, AdnumError> {
        match family {
            ModelFamily::SlNR { n } => Self::sl_n_r(n),
            ModelFamily::SoPQ { p, q } => Self::so_p_q(p, q),
        }
    }

    pub fn dim_p(&self) -> usize {
        self.basis_p.len()
    }

    pub fn rank(&self) -> usize {
        self.basis_a.len()
    }

    /// Length of vectors in `a`-coordinates.
    pub fn coord_dim(&self) -> usize {
        match self.family {
            ModelFamily::SlNR { n } => n,
            ModelFamily::SoPQ { p, .. } => p,
        }
    }

    /// The catalog entry this model realises, if the catalog lists it.
    pub fn catalog_id(&self) -> String {
        let mut params = Params::new();
        match self.family {
            ModelFamily::SlNR { n } => {
                params.insert("n".into(), n as i64);
                symcat::instance_id("AI", &params)
            }
            ModelFamily::SoPQ { p, q } if p == q => {
                params.insert("p".into(), p as i64);
                symcat::instance_id("BDI'", &params)
            }
            ModelFamily::SoPQ { p, q } => {
                params.insert("p".into(), p as i64);
                params.insert("q".into(), q as i64);
                symcat::instance_id("BDI", &params)
            }
        }
    }

    /// The trace form on `g`, normalised so that the basis is orthonormal.
    pub fn inner(&self, x: &DMatrix<f64>, y: &DMatrix<f64>) -> f64 {
        self.inner_scale * (x * y).trace()
    }

    /// `v` in `a`-coordinates as a matrix.
    pub fn a_matrix(&self, v: &[f64]) -> Result<DMatrix<f64>, AdnumError> {
        let d = self.coord_dim();
        if v.len() != d {
            return Err(AdnumError::Dimension { expected: d, got: v.len() });
        }
        match self.family {
            ModelFamily::SlNR { n } => {
                let s: f64 = v.iter().sum();
                let scale = v.iter().map(|x| x.abs()).fold(1.0, f64::max);
                if s.abs() > 1e-9 * scale {
                    return Err(AdnumError::NotInA(format!("coordinates sum to {s}, not 0")));
                }
                Ok(DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(n, v.iter().copied())))
            }
            ModelFamily::SoPQ { p, q } => {
                let mut m = DMatrix::zeros(p + q, p + q);
                for (i, &t) in v.iter().enumerate() {
                    m[(i, p + i)] = t;
                    m[(p + i, i)] = t;
                }
                Ok(m)
            }
        }
    }

    /// Matrix on `p` of `X -> [a, [a, X]]`.
    fn ad_sq(&self, a: &DMatrix<f64>) -> DMatrix<f64> {
        let d = self.dim_p();
        let images: Vec<DMatrix<f64>> = self.basis_p.iter().map(|b| bracket(a, &bracket(a, b))).collect();
        DMatrix::from_fn(d, d, |k, l| self.inner(&self.basis_p[k], &images[l]))
    }

    /// Random vector of `a` with standard normal coordinates.
    pub fn random_a(&self, rng: &mut impl Rng) -> Vec<f64> {
        let mut v: Vec<f64> = (0..self.coord_dim()).map(|_| rng.sample(StandardNormal)).collect();
        if let ModelFamily::SlNR { n } = self.family {
            let mean = v.iter().sum::<f64>() / n as f64;
            v.iter_mut().for_each(|x| *x -= mean);
        }
        v
    }
}

fn expected_system(family: ModelFamily) -> RootSystem {
    let built = match family {
        ModelFamily::SlNR { n } => build_root_system(RootType::A, n - 1),
        ModelFamily::SoPQ { p, q } if p == q && p >= 2 => build_root_system(RootType::D, p),
        ModelFamily::SoPQ { p, q } if p == q => Ok(RootSystem::empty(1)),
        ModelFamily::SoPQ { p, q } => build_root_system(RootType::B, p).and_then(|rs| {
            let lengths = rs.squared_lengths().len();
            rs.with_class_multiplicities(|class| match class {
                "short" => (q - p) as u32,
                "all" if lengths == 1 => (q - p) as u32,
                _ => 1,
            })
        }),
    };
    built.expect("classical types build for supported ranks")
}

/// Multiplicities of the catalog entry for the model, when listed.
pub fn catalog_system(model: &MatrixModel, catalog: &Catalog) -> Option<RootSystem> {
    catalog.get(&model.catalog_id()).map(symcat::restricted_system)
}

/// `R(., v)v = -ad(v)^2` on `p`; its spectrum is `{-beta(v)^2} ∪ {0}`.
pub fn jacobi_operator(model: &MatrixModel, v: &[f64]) -> Result<DMatrix<f64>, AdnumError> {
    let a = model.a_matrix(v)?;
    Ok(-model.ad_sq(&a))
}

fn sym_eigen(m: &DMatrix<f64>) -> SymmetricEigen<f64, nalgebra::Dyn> {
    let sym = (m + m.transpose()) * 0.5;
    SymmetricEigen::new(sym)
}

/// `(cosh(s ad v), sinh(s ad v) / (s ad v))` on `p` by even functional
/// calculus on `ad(v)^2`.
pub fn d_operators(model: &MatrixModel, v: &[f64], s: f64) -> Result<(DMatrix<f64>, DMatrix<f64>), AdnumError> {
    let ad2 = -jacobi_operator(model, v)?;
    let eig = sym_eigen(&ad2);
    let mut co = eig.eigenvalues.clone();
    let mut si = eig.eigenvalues.clone();
    for k in 0..co.len() {
        let b = eig.eigenvalues[k].max(0.0).sqrt();
        let x = s * b;
        co[k] = x.cosh();
        si[k] = if x.abs() < 1e-8 { 1.0 + x * x / 6.0 } else { x.sinh() / x };
    }
    let u = &eig.eigenvectors;
    let dco = u * DMatrix::from_diagonal(&co) * u.transpose();
    let dsi = u * DMatrix::from_diagonal(&si) * u.transpose();
    Ok((dco, dsi))
}

fn check_adapted(j: &DMatrix<f64>, a: &DMatrix<f64>) -> Result<(), AdnumError> {
    if j.shape() != a.shape() {
        return Err(AdnumError::Dimension { expected: j.nrows(), got: a.nrows() });
    }
    let c = op_norm(&(j * a - a * j));
    let scale = 1.0 + op_norm(j) * op_norm(a);
    if c > 1e-9 * scale {
        return Err(AdnumError::NotCurvatureAdapted(c));
    }
    Ok(())
}

/// Smallest singular value of `D^co_{tv} - t D^si_{tv} A` for each `t`.
pub fn numeric_focal_sweep(model: &MatrixModel, v: &[f64], shape_op: &DMatrix<f64>, t_grid: &[f64]) -> Result<Vec<f64>, AdnumError> {
    let j = jacobi_operator(model, v)?;
    check_adapted(&j, shape_op)?;
    t_grid.iter().map(|&t| sigma_min(model, v, shape_op, t)).collect()
}

fn sigma_min(model: &MatrixModel, v: &[f64], a: &DMatrix<f64>, t: f64) -> Result<f64, AdnumError> {
    let (co, si) = d_operators(model, v, t)?;
    let f = co - si * a * t;
    Ok(f.singular_values().min())
}

/// Joint eigenvalues `(mu, lambda, dim)` of `R(., v)v` and a commuting `A`.
pub fn joint_spectrum(model: &MatrixModel, v: &[f64], shape_op: &DMatrix<f64>) -> Result<Vec<(f64, f64, usize)>, AdnumError> {
    let j = jacobi_operator(model, v)?;
    check_adapted(&j, shape_op)?;
    let tol = 1e-8 * (1.0 + op_norm(&j));
    let mut out = Vec::new();
    for (mu, u) in clusters(&j, tol) {
        let block = u.transpose() * shape_op * &u;
        let ltol = 1e-8 * (1.0 + op_norm(&block));
        for (lambda, w) in clusters(&block, ltol) {
            out.push((mu, lambda, w.ncols()));
        }
    }
    Ok(out)
}

/// Eigenvalue clusters with orthonormal bases of their eigenspaces.
fn clusters(m: &DMatrix<f64>, tol: f64) -> Vec<(f64, DMatrix<f64>)> {
    if m.is_empty() {
        return Vec::new();
    }
    let eig = sym_eigen(m);
    let mut idx: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in idx {
        match groups.last_mut() {
            Some(g) if (eig.eigenvalues[i] - eig.eigenvalues[*g.last().unwrap()]).abs() <= tol => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    groups
        .into_iter()
        .map(|g| {
            let mean = g.iter().map(|&i| eig.eigenvalues[i]).sum::<f64>() / g.len() as f64;
            let cols: Vec<_> = g.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect();
            (mean, DMatrix::from_columns(&cols))
        })
        .collect()
}

/// `A` acting by `lambdas[c]` on the `c`-th eigenspace of `R(., v)v`
/// (eigenvalues ascending).
pub fn synthetic_shape_operator(model: &MatrixModel, v: &[f64], lambdas: &[f64]) -> Result<DMatrix<f64>, AdnumError> {
    let j = jacobi_operator(model, v)?;
    let cl = clusters(&j, 1e-8 * (1.0 + op_norm(&j)));
    if lambdas.len() != cl.len() {
        return Err(AdnumError::Dimension { expected: cl.len(), got: lambdas.len() });
    }
    let d = model.dim_p();
    let mut a = DMatrix::zeros(d, d);
    for ((_, u), l) in cl.iter().zip(lambdas) {
        a += u * u.transpose() * *l;
    }
    Ok(a)
}

/// Number of eigenspaces of `R(., v)v`.
pub fn cluster_count(model: &MatrixModel, v: &[f64]) -> Result<usize, AdnumError> {
    let j = jacobi_operator(model, v)?;
    Ok(clusters(&j, 1e-8 * (1.0 + op_norm(&j))).len())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NumericFocalRadius {
    pub t: f64,
    pub mu: f64,
    pub lambda: f64,
    pub sigma_min: f64,
}

/// Real focal radii in `(0, t_max]`: sign changes of each block factor
/// `cosh(t b) - lambda sinh(t b) / b` on a grid, refined by bisection.
pub fn locate_focal_radii(
    model: &MatrixModel,
    v: &[f64],
    shape_op: &DMatrix<f64>,
    t_max: f64,
    grid: usize,
) -> Result<Vec<NumericFocalRadius>, AdnumError> {
    let blocks = joint_spectrum(model, v, shape_op)?;
    let scale = blocks.iter().map(|b| b.0.abs()).fold(1.0, f64::max);
    let mut out: Vec<NumericFocalRadius> = Vec::new();
    for (mu, lambda, _) in blocks {
        let b = if mu.abs() <= 1e-10 * scale { 0.0 } else { (-mu).max(0.0).sqrt() };
        let g = |t: f64| if b == 0.0 { 1.0 - t * lambda } else { (t * b).cosh() - lambda * (t * b).sinh() / b };
        let h = t_max / grid as f64;
        for k in 0..grid {
            let (mut lo, mut hi) = (k as f64 * h, (k + 1) as f64 * h);
            let (glo, ghi) = (g(lo), g(hi));
            if glo == 0.0 && k > 0 || glo.signum() == ghi.signum() && ghi != 0.0 {
                continue;
            }
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if g(mid).signum() == g(lo).signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let t = 0.5 * (lo + hi);
            if t <= 0.0 || out.iter().any(|r| (r.t - t).abs() < 1e-9) {
                continue;
            }
            out.push(NumericFocalRadius { t, mu, lambda, sigma_min: sigma_min(model, v, shape_op, t)? });
        }
    }
    out.sort_by(|a, b| a.t.total_cmp(&b.t));
    Ok(out)
}

/// Whether the Jacobi operators of `b_basis` and the shape operators all
/// commute pairwise to within `tol` in operator norm.
pub fn commuting_family_check(model: &MatrixModel, b_basis: &[Vec<f64>], shape_ops: &[DMatrix<f64>], tol: f64) -> Result<bool, AdnumError> {
    let mats = b_basis.iter().map(|v| model.a_matrix(v)).collect::<Result<Vec<_>, _>>()?;
    for (i, x) in mats.iter().enumerate() {
        for y in &mats[i + 1..] {
            let c = bracket(x, y).norm();
            if c >= tol {
                return Err(AdnumError::NotAbelian(c));
            }
        }
    }
    let mut ops = b_basis.iter().map(|v| jacobi_operator(model, v)).collect::<Result<Vec<_>, _>>()?;
    ops.extend(shape_ops.iter().cloned());
    for (i, x) in ops.iter().enumerate() {
        for y in &ops[i + 1..] {
            if x.shape() != y.shape() {
                return Err(AdnumError::Dimension { expected: x.nrows(), got: y.nrows() });
            }
            if op_norm(&(x * y - y * x)) >= tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Expected spectrum of `R(., v)v` from the restricted roots, ascending.
pub fn expected_jacobi_spectrum(system: &RootSystem, dim_p: usize, v: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(dim_p);
    for r in system.positive_roots() {
        let b: f64 = r.vector.to_f64().iter().zip(v).map(|(a, x)| a * x).sum();
        out.extend(std::iter::repeat_n(-b * b, r.mult as usize));
    }
    let zeros = dim_p.saturating_sub(out.len());
    out.extend(std::iter::repeat_n(0.0, zeros));
    out.sort_by(f64::total_cmp);
    out
}

/// Relative residual between the numeric and expected Jacobi spectra.
pub fn spectrum_residual(model: &MatrixModel, v: &[f64]) -> Result<f64, AdnumError> {
    let j = jacobi_operator(model, v)?;
    let mut num: Vec<f64> = sym_eigen(&j).eigenvalues.iter().copied().collect();
    num.sort_by(f64::total_cmp);
    let exp = expected_jacobi_spectrum(&model.system, model.dim_p(), v);
    if exp.len() != num.len() {
        return Ok(f64::INFINITY);
    }
    let scale = exp.iter().map(|x| x.abs()).fold(1.0, f64::max);
    Ok(num.iter().zip(&exp).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / scale)
}

/// Residuals of `D^co^2 - s^2 ad(v)^2 D^si^2 = 1` and of the block values
/// `cosh(s b)`, `sinh(s b) / (s b)` on each root vector.
pub fn functional_calculus_residual(model: &MatrixModel, v: &[f64], s: f64) -> Result<f64, AdnumError> {
    let (co, si) = d_operators(model, v, s)?;
    let ad2 = -jacobi_operator(model, v)?;
    let d = model.dim_p();
    let id = DMatrix::<f64>::identity(d, d);
    let lhs = &co * &co - &ad2 * &si * &si * (s * s);
    let scale = 1.0 + op_norm(&co).powi(2);
    let mut worst = op_norm(&(lhs - id)) / scale;
    for (k, root) in model.basis_roots.iter().enumerate() {
        let b = match root {
            Some(r) => r.to_f64().iter().zip(v).map(|(a, x)| a * x).sum::<f64>().abs(),
            None => 0.0,
        };
        let x = s * b;
        let want_co = x.cosh();
        let want_si = if x.abs() < 1e-8 { 1.0 } else { x.sinh() / x };
        let e = (co[(k, k)] - want_co).abs() / (1.0 + want_co) + (si[(k, k)] - want_si).abs() / (1.0 + want_si);
        worst = worst.max(e);
    }
    Ok(worst)
}

/// Real focal radii in `(0, t_max]` predicted by the closed form for
/// `A = lambda` on the `beta` root spaces.
pub fn predicted_focal_radii(pairs: &[(f64, f64)], t_max: f64) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for &(beta, lambda) in pairs {
        for z in focal::complex_focal_radii(lambda, beta, JRange::new(0, 0)) {
            if z.im == 0.0 && z.re > 0.0 && z.re <= t_max && !out.iter().any(|t| (t - z.re).abs() < 1e-9) {
                out.push(z.re);
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleReport {
    pub model: String,
    pub catalog_id: String,
    pub trials: usize,
    pub seed: u64,
    pub max_spectrum_residual: f64,
    pub multiplicities_match_catalog: bool,
    pub max_functional_residual: f64,
    pub focal_trials: usize,
    pub focal_matches: usize,
    pub max_focal_error: f64,
    pub commuting_ok: bool,
    pub passed: bool,
}

pub const SPECTRUM_TOL: f64 = 1e-8;
pub const FUNCTIONAL_TOL: f64 = 1e-9;
pub const FOCAL_TOL: f64 = 1e-6;
pub const COMMUTING_TOL: f64 = 1e-9;
pub const FOCAL_TRIALS: usize = 20;

fn unit_vector(v: Vec<f64>) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n == 0.0 {
        return v;
    }
    v.into_iter().map(|x| x / n).collect()
}

/// One focal trial: random unit `v`, one random `lambda` per eigenspace.
fn focal_trial(model: &MatrixModel, rng: &mut ChaCha8Rng, t_max: f64) -> Result<(bool, f64), AdnumError> {
    let v = unit_vector(model.random_a(rng));
    let j = jacobi_operator(model, &v)?;
    let cl = clusters(&j, 1e-8 * (1.0 + op_norm(&j)));
    let mut lambdas = Vec::with_capacity(cl.len());
    for (mu, _) in &cl {
        let b = (-mu).max(0.0).sqrt();
        // stay away from |lambda| = b, where the radius escapes to infinity
        let l = loop {
            let l: f64 = rng.random_range(-3.0..3.0);
            if (l.abs() - b).abs() > 0.05 && l.abs() > 0.05 {
                break l;
            }
        };
        lambdas.push(l);
    }
    let a = synthetic_shape_operator(model, &v, &lambdas)?;
    let found = locate_focal_radii(model, &v, &a, t_max, 2000)?;
    // expected radii from the restricted roots, each root matched to the
    // eigenspace with eigenvalue -beta(v)^2
    let mut pairs = Vec::new();
    let mut betas: Vec<f64> = model
        .system
        .positive_roots()
        .iter()
        .map(|r| r.vector.to_f64().iter().zip(&v).map(|(a, x)| a * x).sum::<f64>().abs())
        .collect();
    betas.push(0.0);
    for b in betas {
        let Some(c) = cl.iter().position(|(mu, _)| (mu + b * b).abs() < 1e-7) else {
            if b == 0.0 {
                continue;
            }
            return Ok((false, f64::INFINITY));
        };
        pairs.push((b, lambdas[c]));
    }
    let predicted = predicted_focal_radii(&pairs, t_max);
    let mut ts: Vec<f64> = found.iter().map(|r| r.t).collect();
    ts.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    if ts.len() != predicted.len() {
        return Ok((false, f64::INFINITY));
    }
    let err = ts.iter().zip(&predicted).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let sigma = found.iter().map(|r| r.sigma_min).fold(0.0, f64::max);
    Ok((err < FOCAL_TOL && sigma < FOCAL_TOL, err.max(sigma)))
}

/// Spectrum match, functional calculus, focal sweep and commuting-family
/// suites for one model.
pub fn run_oracle(model: &MatrixModel, trials: usize, seed: u64) -> Result<OracleReport, AdnumError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_spec: f64 = 0.0;
    let mut max_fun: f64 = 0.0;
    for _ in 0..trials {
        let v = model.random_a(&mut rng);
        max_spec = max_spec.max(spectrum_residual(model, &v)?);
        let u = unit_vector(v);
        let s: f64 = rng.random_range(0.0..2.0);
        max_fun = max_fun.max(functional_calculus_residual(model, &u, s)?);
    }
    let catalog_ok = match catalog_system(model, &Catalog::builtin()) {
        Some(cat) => cat.roots() == model.system.roots(),
        None => true,
    };

    let mut matches = 0;
    let mut max_focal: f64 = 0.0;
    for _ in 0..FOCAL_TRIALS {
        let (ok, err) = focal_trial(model, &mut rng, 5.0)?;
        matches += ok as usize;
        max_focal = max_focal.max(err);
    }

    // commuting family: a basis of a with shape operators diagonal in the
    // root-vector basis, one random value per root
    let b_basis: Vec<Vec<f64>> = (0..model.rank())
        .map(|k| {
            let m = &model.basis_a[k];
            match model.family {
                ModelFamily::SlNR { n } => (0..n).map(|i| m[(i, i)]).collect(),
                ModelFamily::SoPQ { p, .. } => (0..p).map(|i| m[(i, p + i)]).collect(),
            }
        })
        .collect();
    let shape_ops: Vec<DMatrix<f64>> = (0..model.rank().max(1))
        .map(|_| root_diagonal_operator(model, &mut rng))
        .collect();
    let commuting_ok = commuting_family_check(model, &b_basis, &shape_ops, COMMUTING_TOL)?;

    let passed = max_spec < SPECTRUM_TOL
        && max_fun < FUNCTIONAL_TOL
        && catalog_ok
        && matches == FOCAL_TRIALS
        && commuting_ok;
    Ok(OracleReport {
        model: model.family.to_string(),
        catalog_id: model.catalog_id(),
        trials,
        seed,
        max_spectrum_residual: max_spec,
        multiplicities_match_catalog: catalog_ok,
        max_functional_residual: max_fun,
        focal_trials: FOCAL_TRIALS,
        focal_matches: matches,
        max_focal_error: max_focal,
        commuting_ok,
        passed,
    })
}

/// Diagonal in the root-vector basis with one random value per root (and
/// per `a`), as for a submanifold with globally flat abelian normal bundle.
pub fn root_diagonal_operator(model: &MatrixModel, rng: &mut impl Rng) -> DMatrix<f64> {
    let mut values: Vec<(Option<ExactVector>, f64)> = Vec::new();
    let diag: Vec<f64> = model
        .basis_roots
        .iter()
        .map(|r| {
            if let Some((_, x)) = values.iter().find(|(k, _)| k == r) {
                return *x;
            }
            let x: f64 = rng.random_range(-2.0..2.0);
            values.push((r.clone(), x));
            x
        })
        .collect();
    DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sl3_spectrum() {
        let m = MatrixModel::sl_n_r(3).unwrap();
        assert_eq!(m.dim_p(), 5);
        let v = [1.0, 0.0, -1.0];
        let j = jacobi_operator(&m, &v).unwrap();
        let mut ev: Vec<f64> = sym_eigen(&j).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        let want = [-4.0, -1.0, -1.0, 0.0, 0.0];
        for (a, b) in ev.iter().zip(want) {
            assert!((a - b).abs() < 1e-12, "{ev:?}");
        }
        assert!(spectrum_residual(&m, &v).unwrap() < 1e-12);
        assert!(jacobi_operator(&m, &[0.0; 3]).unwrap().iter().all(|x| *x == 0.0));
        assert!(matches!(jacobi_operator(&m, &[1.0, 1.0, 1.0]), Err(AdnumError::NotInA(_))));
    }

    #[test]
    fn so_multiplicities() {
        let m = MatrixModel::so_p_q(2, 4).unwrap();
        assert_eq!(m.dim_p(), 8);
        let v = [0.7, 0.3];
        assert!(spectrum_residual(&m, &v).unwrap() < 1e-12);
        let j = jacobi_operator(&m, &v).unwrap();
        let cl = clusters(&j, 1e-9);
        let dims: Vec<usize> = cl.iter().map(|(_, u)| u.ncols()).collect();
        // -1, -0.49 (mult 2), -0.16, -0.09 (mult 2), 0 (mult 2)
        assert_eq!(dims, vec![1, 2, 1, 2, 2]);
        for (p, q) in [(1, 1), (1, 2), (1, 5), (2, 2), (3, 3), (2, 3)] {
            let m = MatrixModel::so_p_q(p, q).unwrap();
            let v = vec![0.4; p].iter().enumerate().map(|(i, x)| x + i as f64 * 0.35).collect::<Vec<_>>();
            assert!(spectrum_residual(&m, &v).unwrap() < 1e-12, "so({p},{q})");
        }
    }

    #[test]
    fn model_limits() {
        assert!(matches!(MatrixModel::sl_n_r(50), Err(AdnumError::TooLarge(_))));
        assert!(matches!(MatrixModel::so_p_q(3, 4), Err(AdnumError::TooLarge(_))));
        assert!(matches!(MatrixModel::so_p_q(3, 2), Err(AdnumError::Unsupported(_))));
        assert!(MatrixModel::sl_n_r(5).is_ok());
    }

    #[test]
    fn basis_orthonormal_and_a_abelian() {
        for m in [MatrixModel::sl_n_r(4).unwrap(), MatrixModel::so_p_q(2, 3).unwrap()] {
            for (i, x) in m.basis_p.iter().enumerate() {
                for (j, y) in m.basis_p.iter().enumerate() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((m.inner(x, y) - want).abs() < 1e-12);
                }
            }
            for x in &m.basis_a {
                for y in &m.basis_a {
                    assert!(bracket(x, y).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn d_operator_examples() {
        let m = MatrixModel::so_p_q(1, 2).unwrap();
        let (co, si) = d_operators(&m, &[1.0], 0.0).unwrap();
        let id = DMatrix::<f64>::identity(2, 2);
        assert!((co - &id).norm() < 1e-15 && (si - &id).norm() < 1e-15);
        // e_1 block with beta(v) = ln 2 at s = 1
        let (co, _) = d_operators(&m, &[2f64.ln()], 1.0).unwrap();
        assert!((co[(1, 1)] - 1.25).abs() < 1e-12);
        assert!((co[(0, 0)] - 1.0).abs() < 1e-12);
        let m = MatrixModel::sl_n_r(4).unwrap();
        assert!(functional_calculus_residual(&m, &[0.5, 0.2, -0.1, -0.6], 1.7).unwrap() < 1e-12);
    }

    #[test]
    fn focal_sweep_examples() {
        let m = MatrixModel::so_p_q(1, 2).unwrap();
        let v = [1.0];
        // clusters ascending: beta block (-1) then a (0)
        let a = synthetic_shape_operator(&m, &v, &[2.0, 0.0]).unwrap();
        let r = locate_focal_radii(&m, &v, &a, 5.0, 1000).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0].t - 0.5f64.atanh()).abs() < 1e-9);
        assert!(r[0].sigma_min < 1e-9);
        let zero = DMatrix::zeros(2, 2);
        let sweep = numeric_focal_sweep(&m, &v, &zero, &[0.5, 1.0, 2.0, 4.0]).unwrap();
        assert!(sweep.iter().all(|s| *s >= 1.0 - 1e-12));
        assert!(locate_focal_radii(&m, &v, &zero, 5.0, 1000).unwrap().is_empty());
        let flat = synthetic_shape_operator(&m, &v, &[0.0, 2.0]).unwrap();
        let r = locate_focal_radii(&m, &v, &flat, 5.0, 1000).unwrap();
        assert!((r[0].t - 0.5).abs() < 1e-12);
        let mut bad = a.clone();
        bad[(0, 1)] += 1e-3;
        bad[(1, 0)] += 1e-3;
        assert!(matches!(numeric_focal_sweep(&m, &v, &bad, &[1.0]), Err(AdnumError::NotCurvatureAdapted(_))));
    }

    #[test]
    fn commuting_family() {
        let m = MatrixModel::so_p_q(2, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let b = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let ops = vec![root_diagonal_operator(&m, &mut rng), root_diagonal_operator(&m, &mut rng)];
        assert!(commuting_family_check(&m, &b, &ops, 1e-9).unwrap());
        assert!(commuting_family_check(&m, &b, &[], 1e-9).unwrap());
        let mut bad = ops[0].clone();
        bad[(2, 5)] += 1e-3;
        bad[(5, 2)] += 1e-3;
        assert!(!commuting_family_check(&m, &b, &[bad], 1e-6).unwrap());
    }

    #[test]
    fn oracle_small() {
        for m in [MatrixModel::sl_n_r(3).unwrap(), MatrixModel::so_p_q(2, 3).unwrap()] {
            let r = run_oracle(&m, 10, 0).unwrap();
            assert!(r.passed, "{r:?}");
        }
    }
}
