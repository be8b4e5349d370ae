//! Root systems with multiplicities, built in standard rational coordinates.
//!
//! Positive roots are the ones whose first nonzero coordinate is positive.
//! Every system keeps its roots sorted so iteration order is reproducible.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::exact::{self, int, ratio, ExactVector, Rational};

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum RootSystemError {
    #[error("unsupported root system {kind} of rank {rank}")]
    Unsupported { kind: String, rank: usize },
    #[error("unknown root system type {0:?}")]
    UnknownType(String),
    #[error("zero vector is not a root")]
    ZeroRoot,
    #[error("root multiplicity must be at least 1")]
    ZeroMultiplicity,
    #[error("root {root} has dimension {got}, expected {expected}")]
    Dimension { root: String, expected: usize, got: usize },
    #[error("root {0} appears twice")]
    Duplicate(String),
    #[error("-({0}) is missing: roots must come in +- pairs")]
    NotSymmetric(String),
    #[error("roots {0} and its negative carry different multiplicities")]
    MultiplicityMismatch(String),
    #[error("subspace basis is linearly dependent")]
    DependentBasis,
    #[error("invalid root system JSON: {0}")]
    Json(String),
}

/// Family of a standard root system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RootType {
    A,
    B,
    C,
    D,
    BC,
    E6,
    E7,
    E8,
    F4,
    G2,
}

impl RootType {
    pub const ALL: [RootType; 10] = [
        RootType::A,
        RootType::B,
        RootType::C,
        RootType::D,
        RootType::BC,
        RootType::E6,
        RootType::E7,
        RootType::E8,
        RootType::F4,
        RootType::G2,
    ];

    /// Rank forced by an exceptional type.
    pub fn fixed_rank(self) -> Option<usize> {
        match self {
            RootType::E6 => Some(6),
            RootType::E7 => Some(7),
            RootType::E8 => Some(8),
            RootType::F4 => Some(4),
            RootType::G2 => Some(2),
            _ => None,
        }
    }
}

impl fmt::Display for RootType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RootType::A => "A",
            RootType::B => "B",
            RootType::C => "C",
            RootType::D => "D",
            RootType::BC => "BC",
            RootType::E6 => "E6",
            RootType::E7 => "E7",
            RootType::E8 => "E8",
            RootType::F4 => "F4",
            RootType::G2 => "G2",
        };
        f.write_str(s)
    }
}

impl FromStr for RootType {
    type Err = RootSystemError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RootType::ALL
            .into_iter()
            .find(|t| t.to_string().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| RootSystemError::UnknownType(s.to_string()))
    }
}

/// A type together with its rank, e.g. `BC2` or `E6`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypeTag {
    pub kind: RootType,
    pub rank: usize,
}

impl TypeTag {
    pub fn new(kind: RootType, rank: usize) -> Self {
        Self { kind, rank }
    }
}

impl fmt::Display for TypeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.kind.fixed_rank().is_some() {
            write!(f, "{}", self.kind)
        } else {
            write!(f, "{}{}", self.kind, self.rank)
        }
    }
}

impl Serialize for TypeTag {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl FromStr for TypeTag {
    type Err = RootSystemError;

    /// Accepts `A3`, `BC2`, `E6`, `G2`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Ok(kind) = s.parse::<RootType>() {
            if let Some(rank) = kind.fixed_rank() {
                return Ok(TypeTag::new(kind, rank));
            }
        }
        let split = s.find(|c: char| c.is_ascii_digit()).unwrap_or(s.len());
        let kind: RootType = s[..split].parse()?;
        let rank: usize = s[split..].parse().map_err(|_| RootSystemError::UnknownType(s.to_string()))?;
        if let Some(fixed) = kind.fixed_rank() {
            if fixed != rank {
                return Err(RootSystemError::Unsupported { kind: kind.to_string(), rank });
            }
        }
        Ok(TypeTag::new(kind, rank))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Root {
    #[serde(rename = "coords")]
    pub vector: ExactVector,
    pub mult: u32,
}

impl Root {
    pub fn new(vector: ExactVector, mult: u32) -> Self {
        Self { vector, mult }
    }
}

/// The three conditions used to classify a finite set of vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RootConditions {
    /// closed under its own reflections
    pub cond_i: bool,
    /// Cartan integers are integers
    pub cond_ii: bool,
    /// the only multiples of a root that are roots are +-1
    pub cond_iii: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootSystem {
    ambient_dim: usize,
    roots: Vec<Root>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
}

impl RootSystem {
    /// Validates and canonicalises (sorts) a root list.
    pub fn new(ambient_dim: usize, mut roots: Vec<Root>, label: Option<String>) -> Result<Self, RootSystemError> {
        let mut seen: BTreeMap<ExactVector, u32> = BTreeMap::new();
        for r in &roots {
            if r.vector.dim() != ambient_dim {
                return Err(RootSystemError::Dimension {
                    root: r.vector.to_string(),
                    expected: ambient_dim,
                    got: r.vector.dim(),
                });
            }
            if r.vector.is_zero() {
                return Err(RootSystemError::ZeroRoot);
            }
            if r.mult == 0 {
                return Err(RootSystemError::ZeroMultiplicity);
            }
            if seen.insert(r.vector.clone(), r.mult).is_some() {
                return Err(RootSystemError::Duplicate(r.vector.to_string()));
            }
        }
        for (v, m) in &seen {
            match seen.get(&-v) {
                None => return Err(RootSystemError::NotSymmetric(v.to_string())),
                Some(n) if n != m => return Err(RootSystemError::MultiplicityMismatch(v.to_string())),
                _ => {}
            }
        }
        roots.sort_by(|a, b| a.vector.cmp(&b.vector));
        Ok(Self { ambient_dim, roots, label })
    }

    /// Builds from the positive roots; negatives are added.
    pub fn from_positive(ambient_dim: usize, positive: Vec<Root>, label: Option<String>) -> Result<Self, RootSystemError> {
        let mut all = Vec::with_capacity(positive.len() * 2);
        for r in positive {
            all.push(Root::new(-&r.vector, r.mult));
            all.push(r);
        }
        Self::new(ambient_dim, all, label)
    }

    pub fn empty(ambient_dim: usize) -> Self {
        Self { ambient_dim, roots: Vec::new(), label: None }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn roots(&self) -> &[Root] {
        &self.roots
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn vectors(&self) -> impl Iterator<Item = &ExactVector> {
        self.roots.iter().map(|r| &r.vector)
    }

    pub fn contains(&self, v: &ExactVector) -> bool {
        self.roots.binary_search_by(|r| r.vector.cmp(v)).is_ok()
    }

    pub fn multiplicity(&self, v: &ExactVector) -> Option<u32> {
        self.roots
            .binary_search_by(|r| r.vector.cmp(v))
            .ok()
            .map(|i| self.roots[i].mult)
    }

    /// Positive roots, in increasing lexicographic order.
    pub fn positive_roots(&self) -> Vec<&Root> {
        self.roots.iter().filter(|r| r.vector.is_positive()).collect()
    }

    pub fn n_positive(&self) -> usize {
        self.roots.len() / 2
    }

    /// Positive roots of multiplicity one.
    pub fn n_positive_mult1(&self) -> usize {
        self.positive_roots().iter().filter(|r| r.mult == 1).count()
    }

    pub fn total_multiplicity(&self) -> u64 {
        self.roots.iter().map(|r| u64::from(r.mult)).sum()
    }

    /// Dimension of the span of the roots.
    pub fn rank(&self) -> usize {
        exact::rank(&self.roots.iter().map(|r| r.vector.clone()).collect::<Vec<_>>())
    }

    /// A basis of the span of the roots, chosen among the positive roots.
    pub fn span_basis(&self) -> Vec<ExactVector> {
        let pos: Vec<ExactVector> = self.positive_roots().iter().map(|r| r.vector.clone()).collect();
        exact::independent_subset(&pos)
    }

    /// Positive roots that are not the sum of two positive roots.
    pub fn simple_roots(&self) -> Vec<ExactVector> {
        let pos: Vec<&ExactVector> = self.positive_roots().iter().map(|r| &r.vector).collect();
        let set: HashSet<&ExactVector> = pos.iter().copied().collect();
        pos.iter()
            .filter(|&&a| {
                !pos.iter().any(|&b| {
                    let rest = a - b;
                    rest.is_positive() && set.contains(&rest)
                })
            })
            .map(|&a| a.clone())
            .collect()
    }

    /// Distinct squared lengths, increasing.
    pub fn squared_lengths(&self) -> Vec<Rational> {
        let set: BTreeSet<Rational> = self.roots.iter().map(|r| r.vector.norm_sq()).collect();
        set.into_iter().collect()
    }

    /// Length class of a root: `all` for one length, `short`/`long` for two,
    /// `short`/`middle`/`long` for three.
    pub fn root_class(&self, v: &ExactVector) -> &'static str {
        class_of(&self.squared_lengths(), &v.norm_sq())
    }

    /// Replaces each multiplicity by `f(class)`.
    pub fn with_class_multiplicities(&self, f: impl Fn(&str) -> u32) -> Result<Self, RootSystemError> {
        let lengths = self.squared_lengths();
        let roots = self
            .roots
            .iter()
            .map(|r| Root::new(r.vector.clone(), f(class_of(&lengths, &r.vector.norm_sq()))))
            .collect();
        Self::new(self.ambient_dim, roots, self.label.clone())
    }

    pub fn to_json(&self) -> Result<String, RootSystemError> {
        serde_json::to_string_pretty(self).map_err(|e| RootSystemError::Json(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self, RootSystemError> {
        let raw: RootSystem = serde_json::from_str(s).map_err(|e| RootSystemError::Json(e.to_string()))?;
        Self::new(raw.ambient_dim, raw.roots, raw.label)
    }
}

fn class_of(lengths: &[Rational], n: &Rational) -> &'static str {
    let idx = lengths.iter().position(|l| l == n);
    match (lengths.len(), idx) {
        (1, _) => "all",
        (2, Some(0)) => "short",
        (2, Some(_)) => "long",
        (3, Some(0)) => "short",
        (3, Some(1)) => "middle",
        (3, Some(_)) => "long",
        _ => "other",
    }
}

/// Orthogonal direct sum; coordinates are concatenated.
pub fn direct_sum(parts: &[RootSystem]) -> RootSystem {
    let dim: usize = parts.iter().map(RootSystem::ambient_dim).sum();
    let mut roots = Vec::new();
    let mut offset = 0;
    for p in parts {
        for r in p.roots() {
            let mut coords = vec![Rational::zero(); dim];
            coords[offset..offset + p.ambient_dim()].clone_from_slice(r.vector.coords());
            roots.push(Root::new(ExactVector::new(coords), r.mult));
        }
        offset += p.ambient_dim();
    }
    let label = parts.iter().map(|p| p.label().unwrap_or("?")).collect::<Vec<_>>().join("+");
    RootSystem::new(dim, roots, Some(label)).expect("direct sum of valid systems is valid")
}

fn signed_pairs(n: usize, out: &mut Vec<ExactVector>) {
    for i in 0..n {
        for j in i + 1..n {
            for (si, sj) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                let mut v = vec![0i64; n];
                v[i] = si;
                v[j] = sj;
                out.push(ExactVector::from_ints(&v));
            }
        }
    }
}

fn signed_units(n: usize, scale: i64, out: &mut Vec<ExactVector>) {
    for i in 0..n {
        for s in [scale, -scale] {
            let mut v = vec![0i64; n];
            v[i] = s;
            out.push(ExactVector::from_ints(&v));
        }
    }
}

fn e8_vectors() -> Vec<ExactVector> {
    let mut out = Vec::with_capacity(240);
    signed_pairs(8, &mut out);
    for mask in 0u32..256 {
        if mask.count_ones() % 2 == 0 {
            let coords = (0..8)
                .map(|i| if mask & (1 << i) != 0 { ratio(-1, 2) } else { ratio(1, 2) })
                .collect();
            out.push(ExactVector::new(coords));
        }
    }
    out
}

/// Standard root system of the given type, all multiplicities 1.
///
/// `A_n` lives in dimension `n+1`, `G2` in the hyperplane `x+y+z=0` of
/// dimension 3, `E6` and `E7` inside the `E8` lattice of dimension 8.
pub fn build_root_system(kind: RootType, rank: usize) -> Result<RootSystem, RootSystemError> {
    let unsupported = || RootSystemError::Unsupported { kind: kind.to_string(), rank };
    if let Some(fixed) = kind.fixed_rank() {
        if fixed != rank {
            return Err(unsupported());
        }
    }
    let min_rank = match kind {
        RootType::D => 2,
        _ => 1,
    };
    if rank < min_rank {
        return Err(unsupported());
    }
    let n = rank;
    let mut v = Vec::new();
    let dim = match kind {
        RootType::A => {
            for i in 0..=n {
                for j in 0..=n {
                    if i != j {
                        let mut c = vec![0i64; n + 1];
                        c[i] = 1;
                        c[j] = -1;
                        v.push(ExactVector::from_ints(&c));
                    }
                }
            }
            n + 1
        }
        RootType::B => {
            signed_units(n, 1, &mut v);
            signed_pairs(n, &mut v);
            n
        }
        RootType::C => {
            signed_units(n, 2, &mut v);
            signed_pairs(n, &mut v);
            n
        }
        RootType::D => {
            signed_pairs(n, &mut v);
            n
        }
        RootType::BC => {
            signed_units(n, 1, &mut v);
            signed_units(n, 2, &mut v);
            signed_pairs(n, &mut v);
            n
        }
        RootType::F4 => {
            signed_units(4, 1, &mut v);
            signed_pairs(4, &mut v);
            for mask in 0u32..16 {
                let coords = (0..4)
                    .map(|i| if mask & (1 << i) != 0 { ratio(-1, 2) } else { ratio(1, 2) })
                    .collect();
                v.push(ExactVector::new(coords));
            }
            4
        }
        RootType::G2 => {
            for i in 0..3 {
                for j in 0..3 {
                    if i != j {
                        let mut c = [0i64; 3];
                        c[i] = 1;
                        c[j] = -1;
                        v.push(ExactVector::from_ints(&c));
                    }
                }
                for s in [1, -1] {
                    let mut c = [-s; 3];
                    c[i] = 2 * s;
                    v.push(ExactVector::from_ints(&c));
                }
            }
            3
        }
        RootType::E8 => {
            v = e8_vectors();
            8
        }
        RootType::E7 => {
            let a = ExactVector::from_ints(&[0, 0, 0, 0, 0, 0, 1, 1]);
            v = e8_vectors().into_iter().filter(|r| r.dot(&a).is_zero()).collect();
            8
        }
        RootType::E6 => {
            let a = ExactVector::from_ints(&[0, 0, 0, 0, 0, 0, 1, 1]);
            let b = ExactVector::from_ints(&[0, 0, 0, 0, 0, 1, 0, 1]);
            v = e8_vectors()
                .into_iter()
                .filter(|r| r.dot(&a).is_zero() && r.dot(&b).is_zero())
                .collect();
            8
        }
    };
    let roots = v.into_iter().map(|x| Root::new(x, 1)).collect();
    RootSystem::new(dim, roots, Some(TypeTag::new(kind, rank).to_string()))
}

/// Reflection of `beta` in the hyperplane orthogonal to `alpha`.
pub fn reflect(alpha: &ExactVector, beta: &ExactVector) -> ExactVector {
    let c = int(2) * beta.dot(alpha) / alpha.norm_sq();
    beta - &alpha.scale(&c)
}

/// Closed under all reflections `s_alpha`, multiplicities ignored.
pub fn check_weakly_root_system(rs: &RootSystem) -> bool {
    let set: HashSet<&ExactVector> = rs.vectors().collect();
    rs.vectors()
        .all(|a| rs.vectors().all(|b| set.contains(&reflect(a, b))))
}

pub fn check_root_system_conditions(rs: &RootSystem) -> RootConditions {
    let cond_i = check_weakly_root_system(rs);
    let cond_ii = rs.vectors().all(|a| {
        let na = a.norm_sq();
        rs.vectors().all(|b| exact::is_integer(&(int(2) * a.dot(b) / &na)))
    });
    let cond_iii = rs.vectors().all(|a| {
        rs.vectors().all(|b| match b.ratio_to(a) {
            Some(c) => c == Rational::one() || c == -Rational::one(),
            None => true,
        })
    });
    RootConditions { cond_i, cond_ii, cond_iii }
}

/// Orthogonal projection of every root onto `span(basis)`.
///
/// Roots with zero projection are dropped and equal projections merge with
/// summed multiplicities. The result stays in the ambient coordinates of
/// `rs`; use [`subspace_coordinates`] for coordinates in the basis.
pub fn restrict(rs: &RootSystem, basis: &[ExactVector]) -> Result<RootSystem, RootSystemError> {
    for b in basis {
        if b.dim() != rs.ambient_dim() {
            return Err(RootSystemError::Dimension {
                root: b.to_string(),
                expected: rs.ambient_dim(),
                got: b.dim(),
            });
        }
    }
    let ortho = exact::gram_schmidt(basis).ok_or(RootSystemError::DependentBasis)?;
    let mut merged: BTreeMap<ExactVector, u32> = BTreeMap::new();
    for r in rs.roots() {
        let p = exact::project(&r.vector, &ortho);
        if !p.is_zero() {
            *merged.entry(p).or_insert(0) += r.mult;
        }
    }
    let roots = merged.into_iter().map(|(v, m)| Root::new(v, m)).collect();
    RootSystem::new(rs.ambient_dim(), roots, Some("restricted".to_string()))
}

/// Coordinates of `v` in `basis`, if `v` lies in its span.
pub fn subspace_coordinates(v: &ExactVector, basis: &[ExactVector]) -> Option<Vec<Rational>> {
    let rows: Vec<Vec<Rational>> = (0..v.dim())
        .map(|i| basis.iter().map(|b| b.coords()[i].clone()).collect())
        .collect();
    let sol = exact::solve(&rows, v.coords(), basis.len())?;
    sol.kernel.is_empty().then_some(sol.particular)
}

/// Connected components of the non-orthogonality graph, ordered by their
/// smallest positive root.
pub fn decompose(rs: &RootSystem) -> Vec<RootSystem> {
    let n = rs.len();
    let mut comp = vec![usize::MAX; n];
    let mut count = 0;
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        comp[start] = count;
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            for (j, c) in comp.iter_mut().enumerate() {
                if *c == usize::MAX && !rs.roots[i].vector.dot(&rs.roots[j].vector).is_zero() {
                    *c = count;
                    stack.push(j);
                }
            }
        }
        count += 1;
    }
    let mut parts: Vec<RootSystem> = (0..count)
        .map(|c| {
            let roots = rs
                .roots
                .iter()
                .zip(&comp)
                .filter(|(_, &k)| k == c)
                .map(|(r, _)| r.clone())
                .collect();
            RootSystem::new(rs.ambient_dim, roots, None).expect("component of a valid system")
        })
        .collect();
    parts.sort_by(|a, b| {
        let ka = a.positive_roots().first().map(|r| r.vector.clone());
        let kb = b.positive_roots().first().map(|r| r.vector.clone());
        ka.cmp(&kb)
    });
    parts
}
