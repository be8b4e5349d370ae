//! Finite and affine reflection groups generated by exact closure.

use std::collections::{HashSet, VecDeque};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::exact::{self, int, ExactMatrix, ExactVector, Rational};
use crate::rootsys::{self, RootSystem, RootType};

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum ReflGroupError {
    #[error("cannot reflect in the zero vector")]
    ZeroRoot,
    #[error("generator {0} has a nonzero translation; finite closure needs linear generators")]
    Translation(usize),
    #[error("ambient group is not complete")]
    IncompleteAmbient,
    #[error("generators act on different dimensions")]
    Dimension,
    #[error("not a rank-one system (rank {0})")]
    NotRankOne(usize),
}

/// `x -> linear * x + translation`, with `linear` orthogonal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineIsometry {
    linear: ExactMatrix,
    translation: ExactVector,
}

impl AffineIsometry {
    pub fn new(linear: ExactMatrix, translation: ExactVector) -> Self {
        Self { linear, translation }
    }

    pub fn identity(dim: usize) -> Self {
        Self { linear: ExactMatrix::identity(dim), translation: ExactVector::zeros(dim) }
    }

    pub fn translation_by(t: ExactVector) -> Self {
        Self { linear: ExactMatrix::identity(t.dim()), translation: t }
    }

    pub fn dim(&self) -> usize {
        self.translation.dim()
    }

    pub fn linear(&self) -> &ExactMatrix {
        &self.linear
    }

    pub fn translation(&self) -> &ExactVector {
        &self.translation
    }

    pub fn is_linear(&self) -> bool {
        self.translation.is_zero()
    }

    pub fn is_pure_translation(&self) -> bool {
        self.linear.is_identity()
    }

    pub fn is_identity(&self) -> bool {
        self.is_linear() && self.is_pure_translation()
    }

    pub fn apply(&self, x: &ExactVector) -> ExactVector {
        &self.linear.mul_vec(x) + &self.translation
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &AffineIsometry) -> AffineIsometry {
        AffineIsometry {
            linear: &self.linear * &other.linear,
            translation: &self.linear.mul_vec(&other.translation) + &self.translation,
        }
    }

    pub fn inverse(&self) -> AffineIsometry {
        let lt = self.linear.transpose();
        let t = -&lt.mul_vec(&self.translation);
        AffineIsometry { linear: lt, translation: t }
    }

    /// The part without translation.
    pub fn linear_part(&self) -> AffineIsometry {
        AffineIsometry { linear: self.linear.clone(), translation: ExactVector::zeros(self.dim()) }
    }
}

/// Reflection in the hyperplane orthogonal to `root`.
pub fn reflection(root: &ExactVector) -> Result<AffineIsometry, ReflGroupError> {
    affine_reflection_at(root, &Rational::zero())
}

/// Reflection in `{x : <x, root> = level}`.
pub fn affine_reflection(root: &ExactVector, level: i64) -> Result<AffineIsometry, ReflGroupError> {
    affine_reflection_at(root, &int(level))
}

/// As [`affine_reflection`] with a rational level.
pub fn affine_reflection_at(root: &ExactVector, level: &Rational) -> Result<AffineIsometry, ReflGroupError> {
    if root.is_zero() {
        return Err(ReflGroupError::ZeroRoot);
    }
    let n = root.dim();
    let c = int(2) / root.norm_sq();
    let mut m = ExactMatrix::identity(n);
    for i in 0..n {
        for j in 0..n {
            let a = &root.coords()[i] * &root.coords()[j] * &c;
            if !a.is_zero() {
                let v = m.get(i, j) - a;
                m.set(i, j, v);
            }
        }
    }
    let t = root.scale(&(level * &c));
    Ok(AffineIsometry::new(m, t))
}

/// The coroot `2 alpha / <alpha, alpha>`.
pub fn coroot(alpha: &ExactVector) -> ExactVector {
    alpha.scale(&(int(2) / alpha.norm_sq()))
}

#[derive(Clone, Debug)]
pub struct GeneratedGroup {
    generators: Vec<AffineIsometry>,
    elements: Vec<AffineIsometry>,
    index: HashSet<AffineIsometry>,
    is_complete: bool,
}

impl GeneratedGroup {
    pub fn generators(&self) -> &[AffineIsometry] {
        &self.generators
    }

    /// Elements in discovery order; the identity comes first.
    pub fn elements(&self) -> &[AffineIsometry] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn is_complete(&self) -> bool {
        self.is_complete
    }

    pub fn contains(&self, g: &AffineIsometry) -> bool {
        self.index.contains(g)
    }

    /// Pure-translation elements (identity included).
    pub fn translations(&self) -> Vec<&ExactVector> {
        self.elements
            .iter()
            .filter(|g| g.is_pure_translation())
            .map(|g| g.translation())
            .collect()
    }
}

fn common_dim(generators: &[AffineIsometry]) -> Result<Option<usize>, ReflGroupError> {
    let mut dims = generators.iter().map(AffineIsometry::dim);
    let Some(d) = dims.next() else { return Ok(None) };
    if dims.any(|x| x != d) {
        return Err(ReflGroupError::Dimension);
    }
    Ok(Some(d))
}

/// Breadth-first closure. Stops early (incomplete) once more than
/// `max_order` elements have been found.
pub fn generate_finite(generators: &[AffineIsometry], max_order: usize) -> Result<GeneratedGroup, ReflGroupError> {
    if let Some(i) = generators.iter().position(|g| !g.is_linear()) {
        return Err(ReflGroupError::Translation(i));
    }
    let dim = common_dim(generators)?.unwrap_or(0);
    let id = AffineIsometry::identity(dim);
    let mut index = HashSet::from([id.clone()]);
    let mut elements = vec![id.clone()];
    let mut queue = VecDeque::from([id]);
    let mut is_complete = true;
    'outer: while let Some(e) = queue.pop_front() {
        for g in generators {
            let h = g.compose(&e);
            if index.insert(h.clone()) {
                elements.push(h.clone());
                if elements.len() > max_order {
                    is_complete = false;
                    break 'outer;
                }
                queue.push_back(h);
            }
        }
    }
    Ok(GeneratedGroup { generators: generators.to_vec(), elements, index, is_complete })
}

/// All products of at most `word_length` generators and their inverses.
pub fn generate_affine_ball(generators: &[AffineIsometry], word_length: usize) -> Result<GeneratedGroup, ReflGroupError> {
    let dim = common_dim(generators)?.unwrap_or(0);
    let mut letters: Vec<AffineIsometry> = Vec::new();
    for g in generators {
        for h in [g.clone(), g.inverse()] {
            if !letters.contains(&h) {
                letters.push(h);
            }
        }
    }
    let id = AffineIsometry::identity(dim);
    let mut index = HashSet::from([id.clone()]);
    let mut elements = vec![id.clone()];
    let mut frontier = vec![id];
    for _ in 0..word_length {
        let mut next = Vec::new();
        for e in &frontier {
            for l in &letters {
                let h = l.compose(e);
                if index.insert(h.clone()) {
                    elements.push(h.clone());
                    next.push(h);
                }
            }
        }
        frontier = next;
    }
    Ok(GeneratedGroup { generators: generators.to_vec(), elements, index, is_complete: false })
}

/// Reflections `s_alpha` for the positive roots of `rs`.
pub fn root_reflections(rs: &RootSystem) -> Vec<AffineIsometry> {
    rs.positive_roots()
        .iter()
        .map(|r| reflection(&r.vector).expect("roots are nonzero"))
        .collect()
}

/// Affine reflections in `alpha^{-1}(j)` for positive `alpha`, `|j| <= max_level`.
pub fn affine_root_reflections(rs: &RootSystem, max_level: i64) -> Vec<AffineIsometry> {
    let mut out = Vec::new();
    for r in rs.positive_roots() {
        for j in -max_level..=max_level {
            out.push(affine_reflection(&r.vector, j).expect("roots are nonzero"));
        }
    }
    out
}

/// Membership of a vector in the integer span of a family of rational vectors.
pub struct Lattice {
    denominator: BigInt,
    basis: Vec<Vec<BigInt>>,
}

impl Lattice {
    pub fn spanned_by(vectors: &[ExactVector]) -> Self {
        let denominator = exact::common_denominator(vectors);
        let d = Rational::from_integer(denominator.clone());
        let rows: Vec<Vec<BigInt>> = vectors
            .iter()
            .map(|v| v.coords().iter().map(|c| (c * &d).to_integer()).collect())
            .collect();
        Self { denominator, basis: exact::integer_row_basis(&rows) }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn contains(&self, v: &ExactVector) -> bool {
        let d = Rational::from_integer(self.denominator.clone());
        let scaled: Vec<Rational> = v.coords().iter().map(|c| c * &d).collect();
        if !scaled.iter().all(exact::is_integer) {
            return false;
        }
        // basis is in echelon form, so an exact solve decides membership
        let n = v.dim();
        let rows: Vec<Vec<Rational>> = (0..n)
            .map(|i| self.basis.iter().map(|b| Rational::from_integer(b[i].clone())).collect())
            .collect();
        match exact::solve(&rows, &scaled, self.basis.len()) {
            Some(sol) => sol.particular.iter().all(exact::is_integer),
            None => false,
        }
    }
}

/// Every pure translation in the ball lies in the coroot lattice of `rs`.
pub fn translation_lattice_check(group_ball: &GeneratedGroup, rs: &RootSystem) -> bool {
    let coroots: Vec<ExactVector> = rs.vectors().map(coroot).collect();
    let lattice = Lattice::spanned_by(&coroots);
    group_ball.translations().into_iter().all(|t| lattice.contains(t))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubgroupCheck {
    pub contained: bool,
    pub sub_order: usize,
    pub diagnostic: Option<String>,
}

/// Whether the closure of `sub_gens` lies inside the complete group `ambient`.
pub fn is_subgroup_of(sub_gens: &[AffineIsometry], ambient: &GeneratedGroup) -> Result<SubgroupCheck, ReflGroupError> {
    if !ambient.is_complete() {
        return Err(ReflGroupError::IncompleteAmbient);
    }
    if sub_gens.iter().any(|g| !g.is_linear()) {
        let missing = sub_gens.iter().position(|g| !ambient.contains(g));
        return Ok(SubgroupCheck {
            contained: false,
            sub_order: 0,
            diagnostic: Some(format!("generator {missing:?} has a translation; closure is infinite")),
        });
    }
    let sub = generate_finite(sub_gens, ambient.order())?;
    if !sub.is_complete() {
        return Ok(SubgroupCheck {
            contained: false,
            sub_order: sub.order(),
            diagnostic: Some(format!("closure exceeds ambient order {}", ambient.order())),
        });
    }
    let outside = sub.elements().iter().position(|g| !ambient.contains(g));
    Ok(SubgroupCheck {
        contained: outside.is_none(),
        sub_order: sub.order(),
        diagnostic: outside.map(|i| format!("element {i} of the closure is not in the ambient group")),
    })
}

pub fn is_decomposable(rs: &RootSystem) -> bool {
    rootsys::decompose(rs).len() >= 2
}

/// Structure of the affine group of a rank-one system.
#[derive(Clone, Debug)]
pub struct RankOneStructure {
    /// reflections in the two adjacent walls of an alcove
    pub involutions: [AffineIsometry; 2],
    /// every ball element is `s -> ±s + 2kd` along the root line
    pub generated_by_two: bool,
    /// rank of the lattice spanned by pure translations found in the ball
    pub translation_rank: usize,
}

/// Checks that the affine group of a rank-one system is an infinite
/// dihedral group `Z_2 ⋉ Z` by sampling a word-length ball built from all
/// affine root reflections with levels in `-2..=2`.
pub fn rank_one_structure(rs: &RootSystem, word_length: usize) -> Result<RankOneStructure, ReflGroupError> {
    let rank = rs.rank();
    if rank != 1 {
        return Err(ReflGroupError::NotRankOne(rank));
    }
    let pos = rs.positive_roots();
    let u = pos[0].vector.clone();
    // alpha = c u; walls at <x,u> = j / c, so the spacing is 1 / c_max
    let longest = pos
        .iter()
        .max_by(|a, b| a.vector.ratio_to(&u).cmp(&b.vector.ratio_to(&u)))
        .expect("nonempty");
    let c_max = longest.vector.ratio_to(&u).expect("rank one");
    let spacing = Rational::one() / &c_max;
    let involutions = [
        affine_reflection(&longest.vector, 0)?,
        affine_reflection(&longest.vector, 1)?,
    ];
    let ball = generate_affine_ball(&affine_root_reflections(rs, 2), word_length)?;
    let uu = u.norm_sq();
    let generated_by_two = ball.elements().iter().all(|g| {
        // acts on u^perp trivially and on the line by s -> eps s + tau
        let image = g.linear().mul_vec(&u);
        let eps = image.ratio_to(&u);
        let tau = g.translation().dot(&u);
        let along = g.translation().ratio_to(&u).is_some() || g.translation().is_zero();
        let k = &tau / (int(2) * &spacing);
        let perp_fixed = {
            let proj = |x: &ExactVector| x - &u.scale(&(x.dot(&u) / &uu));
            (0..u.dim()).all(|i| {
                let e = ExactVector::unit(u.dim(), i);
                let pe = proj(&e);
                g.linear().mul_vec(&pe) == pe
            })
        };
        matches!(eps, Some(ref e) if e.is_one() || *e == -Rational::one()) && along && exact::is_integer(&k) && perp_fixed
    });
    let translations: Vec<ExactVector> = ball.translations().into_iter().cloned().collect();
    Ok(RankOneStructure { involutions, generated_by_two, translation_rank: exact::rank(&translations) })
}

/// Order of the Weyl group from the standard product formulas.
pub fn weyl_order(kind: RootType, rank: usize) -> Option<u128> {
    let fact = |n: usize| (1..=n as u128).product::<u128>();
    let n = rank;
    match kind {
        RootType::A if n >= 1 => Some(fact(n + 1)),
        RootType::B | RootType::C | RootType::BC if n >= 1 => Some((1u128 << n) * fact(n)),
        RootType::D if n >= 2 => Some((1u128 << (n - 1)) * fact(n)),
        RootType::E6 if n == 6 => Some(51_840),
        RootType::E7 if n == 7 => Some(2_903_040),
        RootType::E8 if n == 8 => Some(696_729_600),
        RootType::F4 if n == 4 => Some(1_152),
        RootType::G2 if n == 2 => Some(12),
        _ => None,
    }
}

#[derive(Serialize)]
struct ElementJson {
    linear: Vec<Vec<[i64; 2]>>,
    translation: ExactVector,
}

/// JSON list of `{linear, translation}` with `[num, den]` entries.
pub fn group_to_json(group: &GeneratedGroup) -> Result<String, exact::ExactError> {
    let rows = group
        .elements()
        .iter()
        .map(|g| {
            let linear = g
                .linear()
                .to_rows()
                .iter()
                .map(|row| row.iter().map(exact::rational_to_pair).collect::<Result<Vec<_>, _>>())
                .collect::<Result<Vec<_>, _>>()?;
            Ok(ElementJson { linear, translation: g.translation().clone() })
        })
        .collect::<Result<Vec<_>, exact::ExactError>>()?;
    Ok(serde_json::to_string(&rows).expect("plain data serializes"))
}
