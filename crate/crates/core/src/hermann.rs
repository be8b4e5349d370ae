//! Hermann actions and the closed-form spectrum of their principal orbits.
//!
//! A principal orbit through `exp(xi)` has, for each positive restricted
//! root `beta`, eigenvalue `-beta(eta) / tanh beta(xi)` when `beta` is
//! vertical and `-beta(eta) * tanh beta(xi)` when it is horizontal. A root
//! may be both. The maximal number of distinct principal curvatures is then
//! `#positive roots + #(vertical ∩ horizontal)`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::OnceLock;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::exact::{self, ExactVector, Rational};
use crate::formula::{self, FormulaError, Params};
use crate::reflgroup::{self, AffineIsometry};
use crate::rootsys::{Root, RootSystem};
use crate::symcat::{self, enumerate_params, Catalog, ParamSpec, SymcatError, SymmetricSpace};

pub const BUILTIN_ACTIONS: &str = include_str!("../data/hermann_actions.json");

#[derive(thiserror::Error, Debug)]
pub enum HermannError {
    #[error("invalid Hermann catalog JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("in action {id}: {source}")]
    Formula {
        id: String,
        #[source]
        source: FormulaError,
    },
    #[error("in action {id}: {source}")]
    Space {
        id: String,
        #[source]
        source: SymcatError,
    },
    #[error("in action {id}: {message}")]
    Split { id: String, message: String },
    #[error("{0}: insufficient split data (only aggregate counts are known)")]
    InsufficientSplitData(String),
    #[error("non-principal basepoint: vertical root {0} vanishes on xi")]
    NonPrincipal(String),
    #[error("vector has dimension {got}, expected {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("unknown Hermann action {0}")]
    UnknownAction(String),
}

/// Vertical/horizontal membership of one positive root.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RootFlags {
    #[serde(rename = "in_V")]
    pub in_v: bool,
    #[serde(rename = "in_H")]
    pub in_h: bool,
}

impl RootFlags {
    pub const V: RootFlags = RootFlags { in_v: true, in_h: false };
    pub const H: RootFlags = RootFlags { in_v: false, in_h: true };
    pub const VH: RootFlags = RootFlags { in_v: true, in_h: true };

    fn parse(s: &str) -> Option<Self> {
        match s {
            "V" => Some(Self::V),
            "H" => Some(Self::H),
            "VH" | "HV" => Some(Self::VH),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSpec {
    pub cut: String,
    #[serde(rename = "where")]
    pub place: String,
}

/// One clause of a split rule; the first matching clause decides.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleClause {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<String>,
    /// `minus` for `e_i - e_j`, `plus` for `e_i + e_j`
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub form: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block: Option<BlockSpec>,
    pub flags: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExplicitFlag {
    pub root_index: usize,
    #[serde(rename = "in_V")]
    pub in_v: bool,
    #[serde(rename = "in_H")]
    pub in_h: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SplitSpec {
    Explicit(Vec<ExplicitFlag>),
    Rule {
        rule: Vec<RuleClause>,
    },
    Counts {
        #[serde(rename = "count_V", default, skip_serializing_if = "Option::is_none")]
        count_v: Option<usize>,
        #[serde(rename = "count_H", default, skip_serializing_if = "Option::is_none")]
        count_h: Option<usize>,
        count_both: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceRef {
    pub label: String,
    #[serde(default)]
    pub params: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionFamily {
    pub id: String,
    pub table: u8,
    pub h_label: String,
    pub space: SpaceRef,
    #[serde(default)]
    pub params: Vec<ParamSpec>,
    pub split: SplitSpec,
    pub expected_max_spec: String,
    /// the value as printed, when it differs from `expected_max_spec`
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub printed_max_spec: Option<String>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
struct ActionFile {
    #[serde(default)]
    actions: Vec<ActionFamily>,
}

/// Split data after resolution against the restricted root system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Split {
    /// flags aligned with `RootSystem::positive_roots`
    PerRoot(Vec<RootFlags>),
    Aggregate {
        count_v: Option<usize>,
        count_h: Option<usize>,
        count_both: usize,
    },
}

/// A concrete Hermann action on a concrete symmetric space.
#[derive(Clone, Debug)]
pub struct HermannAction {
    pub id: String,
    pub family_id: String,
    pub table: u8,
    pub h_label: String,
    pub space: SymmetricSpace,
    pub params: Params,
    pub system: RootSystem,
    pub split: Split,
    pub expected_max_spec: Option<i64>,
    pub printed_max_spec: Option<Rational>,
}

impl fmt::Display for HermannAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} on {}", self.h_label, self.space.name)
    }
}

/// `minus` for two-term roots with opposite signs, `plus` for equal signs.
fn root_form(v: &ExactVector) -> Option<&'static str> {
    let support = v.support();
    if support.len() != 2 {
        return None;
    }
    let a = &v.coords()[support[0]];
    let b = &v.coords()[support[1]];
    Some(if (a > &Rational::zero()) == (b > &Rational::zero()) { "plus" } else { "minus" })
}

fn block_place(v: &ExactVector, cut: usize) -> &'static str {
    let support = v.support();
    let low = support.iter().all(|&i| i < cut);
    let high = support.iter().all(|&i| i >= cut);
    match (low, high) {
        (true, _) => "low",
        (_, true) => "high",
        _ => "cross",
    }
}

fn clause_matches(clause: &RuleClause, lengths: &[Rational], v: &ExactVector, cut: Option<usize>) -> bool {
    if let Some(c) = &clause.class {
        let class = class_name(lengths, v);
        if class != c {
            return false;
        }
    }
    if let Some(f) = &clause.form {
        if root_form(v) != Some(f.as_str()) {
            return false;
        }
    }
    if let (Some(b), Some(cut)) = (&clause.block, cut) {
        let place = block_place(v, cut);
        let ok = match b.place.as_str() {
            "same" => place != "cross",
            other => place == other,
        };
        if !ok {
            return false;
        }
    }
    true
}

fn class_name(lengths: &[Rational], v: &ExactVector) -> &'static str {
    let n = v.norm_sq();
    let idx = lengths.iter().position(|l| *l == n);
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

fn resolve_split(id: &str, spec: &SplitSpec, rs: &RootSystem, params: &Params) -> Result<Split, HermannError> {
    let split_err = |message: String| HermannError::Split { id: id.to_string(), message };
    let positive = rs.positive_roots();
    let split = match spec {
        SplitSpec::Explicit(flags) => {
            let mut out = vec![None; positive.len()];
            for f in flags {
                let slot = out
                    .get_mut(f.root_index)
                    .ok_or_else(|| split_err(format!("root_index {} out of range", f.root_index)))?;
                *slot = Some(RootFlags { in_v: f.in_v, in_h: f.in_h });
            }
            let flags = out
                .into_iter()
                .enumerate()
                .map(|(i, f)| f.ok_or_else(|| split_err(format!("no flags for positive root {i}"))))
                .collect::<Result<Vec<_>, _>>()?;
            Split::PerRoot(flags)
        }
        SplitSpec::Rule { rule } => {
            let lengths = rs.squared_lengths();
            let mut flags = Vec::with_capacity(positive.len());
            for r in &positive {
                let mut chosen = None;
                for clause in rule {
                    let cut = match &clause.block {
                        Some(b) => {
                            let c = formula::eval_int(&b.cut, params)
                                .map_err(|source| HermannError::Formula { id: id.to_string(), source })?;
                            Some(c.max(0) as usize)
                        }
                        None => None,
                    };
                    if clause_matches(clause, &lengths, &r.vector, cut) {
                        chosen = Some(
                            RootFlags::parse(&clause.flags)
                                .ok_or_else(|| split_err(format!("bad flags {:?}", clause.flags)))?,
                        );
                        break;
                    }
                }
                flags.push(chosen.ok_or_else(|| split_err(format!("no rule clause matches root {}", r.vector)))?);
            }
            Split::PerRoot(flags)
        }
        SplitSpec::Counts { count_v, count_h, count_both } => {
            Split::Aggregate { count_v: *count_v, count_h: *count_h, count_both: *count_both }
        }
    };
    validate_split(&split, rs).map_err(split_err)?;
    Ok(split)
}

/// Structural constraints any split must satisfy.
pub fn validate_split(split: &Split, rs: &RootSystem) -> Result<(), String> {
    let positive = rs.positive_roots();
    let non_mult1 = positive.iter().filter(|r| r.mult > 1).count();
    match split {
        Split::PerRoot(flags) => {
            if flags.len() != positive.len() {
                return Err(format!("{} flags for {} positive roots", flags.len(), positive.len()));
            }
            for (r, f) in positive.iter().zip(flags) {
                if !f.in_v && !f.in_h {
                    return Err(format!("root {} is neither vertical nor horizontal", r.vector));
                }
                if f.in_v && f.in_h && r.mult == 1 {
                    return Err(format!("root {} has multiplicity 1 but is both vertical and horizontal", r.vector));
                }
            }
        }
        Split::Aggregate { count_v, count_h, count_both } => {
            if *count_both > non_mult1 {
                return Err(format!("overlap {count_both} exceeds the {non_mult1} roots of multiplicity > 1"));
            }
            if let (Some(v), Some(h)) = (count_v, count_h) {
                if v + h != positive.len() + count_both {
                    return Err(format!("count_V + count_H = {} but #positive + overlap = {}", v + h, positive.len() + count_both));
                }
            }
        }
    }
    Ok(())
}

impl ActionFamily {
    pub fn instantiate(&self, params: &Params, spaces: &Catalog) -> Result<HermannAction, HermannError> {
        self.instantiate_cached(params, spaces, &mut HashMap::new())
    }

    fn instantiate_cached(
        &self,
        params: &Params,
        spaces: &Catalog,
        cache: &mut HashMap<String, (SymmetricSpace, RootSystem)>,
    ) -> Result<HermannAction, HermannError> {
        let ferr = |source| HermannError::Formula { id: self.id.clone(), source };
        let mut space_params = Params::new();
        for (k, expr) in &self.space.params {
            space_params.insert(k.clone(), formula::eval_int(expr, params).map_err(ferr)?);
        }
        let key = symcat::instance_id(&self.space.label, &space_params);
        let (space, system) = match cache.get(&key) {
            Some(hit) => hit.clone(),
            None => {
                let space = spaces
                    .instantiate(&self.space.label, &space_params)
                    .map_err(|source| HermannError::Space { id: self.id.clone(), source })?;
                let system = symcat::restricted_system(&space);
                cache.insert(key, (space.clone(), system.clone()));
                (space, system)
            }
        };
        let split = resolve_split(&self.id, &self.split, &system, params)?;
        let expected = formula::eval_int(&self.expected_max_spec, params).map_err(ferr)?;
        let printed = match &self.printed_max_spec {
            Some(e) => Some(formula::eval(e, params).map_err(ferr)?),
            None => None,
        };
        Ok(HermannAction {
            id: symcat::instance_id(&self.id, params),
            family_id: self.id.clone(),
            table: self.table,
            h_label: formula::render(&self.h_label, params).map_err(ferr)?,
            space,
            params: params.clone(),
            system,
            split,
            expected_max_spec: Some(expected),
            printed_max_spec: printed,
        })
    }
}

#[derive(Clone, Debug, Default)]
pub struct HermannCatalog {
    families: Vec<ActionFamily>,
    actions: Vec<HermannAction>,
}

impl HermannCatalog {
    pub fn from_json_str(s: &str, spaces: &Catalog) -> Result<Self, HermannError> {
        if s.trim().is_empty() {
            return Ok(Self::default());
        }
        let file: ActionFile = serde_json::from_str(s)?;
        let mut actions = Vec::new();
        let mut cache = HashMap::new();
        for fam in &file.actions {
            let all = enumerate_params(&fam.params).map_err(|source| HermannError::Formula { id: fam.id.clone(), source })?;
            for p in all {
                actions.push(fam.instantiate_cached(&p, spaces, &mut cache)?);
            }
        }
        Ok(Self { families: file.actions, actions })
    }

    /// The bundled catalog over the bundled spaces (parsed once).
    pub fn builtin() -> Self {
        static CELL: OnceLock<HermannCatalog> = OnceLock::new();
        CELL.get_or_init(|| Self::from_json_str(BUILTIN_ACTIONS, &Catalog::builtin()).expect("bundled catalog is valid"))
            .clone()
    }

    pub fn families(&self) -> &[ActionFamily] {
        &self.families
    }

    pub fn actions(&self) -> &[HermannAction] {
        &self.actions
    }

    pub fn get(&self, id: &str) -> Option<&HermannAction> {
        self.actions.iter().find(|a| a.id == id)
    }
}

/// Kind of a principal curvature.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumKind {
    Zero,
    Vertical,
    Horizontal,
}

/// A principal curvature as a symbolic function of the basepoint and normal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpectrumValue {
    pub kind: SpectrumKind,
    pub root: Option<Root>,
}

impl SpectrumValue {
    /// Numeric value at section coordinates `xi`, `eta`.
    pub fn evaluate(&self, xi: &[f64], eta: &[f64]) -> f64 {
        let Some(root) = &self.root else { return 0.0 };
        let b = root.vector.to_f64();
        let bx: f64 = b.iter().zip(xi).map(|(a, x)| a * x).sum();
        let be: f64 = b.iter().zip(eta).map(|(a, x)| a * x).sum();
        match self.kind {
            SpectrumKind::Zero => 0.0,
            SpectrumKind::Vertical => -be / bx.tanh(),
            SpectrumKind::Horizontal => -be * bx.tanh(),
        }
    }
}

impl HermannAction {
    /// Number of roots that are both vertical and horizontal.
    pub fn overlap(&self) -> usize {
        match &self.split {
            Split::PerRoot(flags) => flags.iter().filter(|f| f.in_v && f.in_h).count(),
            Split::Aggregate { count_both, .. } => *count_both,
        }
    }

    pub fn has_per_root_split(&self) -> bool {
        matches!(self.split, Split::PerRoot(_))
    }

    pub fn rank(&self) -> usize {
        self.space.rank
    }

    /// Positive roots with their flags.
    pub fn per_root(&self) -> Result<Vec<(Root, RootFlags)>, HermannError> {
        match &self.split {
            Split::PerRoot(flags) => Ok(self
                .system
                .positive_roots()
                .into_iter()
                .cloned()
                .zip(flags.iter().copied())
                .collect()),
            Split::Aggregate { .. } => Err(HermannError::InsufficientSplitData(self.id.clone())),
        }
    }

    pub fn vertical_roots(&self) -> Result<Vec<Root>, HermannError> {
        Ok(self.per_root()?.into_iter().filter(|(_, f)| f.in_v).map(|(r, _)| r).collect())
    }

    pub fn horizontal_roots(&self) -> Result<Vec<Root>, HermannError> {
        Ok(self.per_root()?.into_iter().filter(|(_, f)| f.in_h).map(|(r, _)| r).collect())
    }

    fn check_dim(&self, v: usize) -> Result<(), HermannError> {
        let d = self.system.ambient_dim();
        if v != d {
            return Err(HermannError::Dimension { expected: d, got: v });
        }
        Ok(())
    }
}

/// One vertical value per vertical root and one horizontal value per
/// horizontal root. `xi` and `eta` are in the coordinates of the restricted
/// root system.
pub fn orbit_spectrum(action: &HermannAction, xi: &ExactVector, eta: &ExactVector) -> Result<Vec<SpectrumValue>, HermannError> {
    action.check_dim(xi.dim())?;
    action.check_dim(eta.dim())?;
    let mut out = Vec::new();
    for (root, flags) in action.per_root()? {
        if flags.in_v {
            if root.vector.dot(xi).is_zero() {
                return Err(HermannError::NonPrincipal(root.vector.to_string()));
            }
            out.push(SpectrumValue { kind: SpectrumKind::Vertical, root: Some(root.clone()) });
        }
        if flags.in_h {
            out.push(SpectrumValue { kind: SpectrumKind::Horizontal, root: Some(root) });
        }
    }
    Ok(out)
}

/// `#positive roots + #(vertical ∩ horizontal)`.
pub fn max_distinct_spec(action: &HermannAction) -> i64 {
    (action.system.n_positive() + action.overlap()) as i64
}

/// Number of values pairwise separated by more than `tol`.
pub fn count_distinct(values: &mut [f64], tol: f64) -> usize {
    values.sort_by(f64::total_cmp);
    let mut count = 0;
    let mut last: Option<f64> = None;
    for &v in values.iter() {
        if last.is_none_or(|l| v - l > tol) {
            count += 1;
            last = Some(v);
        }
    }
    count
}

/// Evaluates the spectrum in floating point and counts distinct values.
pub fn numeric_distinct_count(action: &HermannAction, xi: &[f64], eta: &[f64], tol: f64) -> Result<usize, HermannError> {
    action.check_dim(xi.len())?;
    action.check_dim(eta.len())?;
    let mut values = Vec::new();
    for (root, flags) in action.per_root()? {
        let b = root.vector.to_f64();
        let bx: f64 = b.iter().zip(xi).map(|(a, x)| a * x).sum();
        if flags.in_v && bx.abs() < 1e-12 {
            return Err(HermannError::NonPrincipal(root.vector.to_string()));
        }
        let root = Some(root);
        if flags.in_v {
            values.push(SpectrumValue { kind: SpectrumKind::Vertical, root: root.clone() }.evaluate(xi, eta));
        }
        if flags.in_h {
            values.push(SpectrumValue { kind: SpectrumKind::Horizontal, root }.evaluate(xi, eta));
        }
    }
    Ok(count_distinct(&mut values, tol))
}

/// Logarithm of the distance of a principal curvature from `±|beta(eta)|`:
/// the distance is `|beta(eta)| (coth|x| - 1) = 2|beta(eta)| / (e^{2|x|} - 1)`
/// for vertical and `|beta(eta)| (1 - tanh|x|) = 2|beta(eta)| / (e^{2|x|} + 1)`
/// for horizontal roots, with `x = beta(xi)`. The logarithm is never `-inf`
/// for `beta(eta) != 0`, even where the distance itself underflows.
fn log_gap(kind: SpectrumKind, bx: f64, be: f64) -> f64 {
    let x = 2.0 * bx.abs();
    let e = (-x).exp();
    let tail = match kind {
        SpectrumKind::Vertical => (-e).ln_1p(),
        SpectrumKind::Horizontal => e.ln_1p(),
        SpectrumKind::Zero => return be.abs().ln(),
    };
    be.abs().ln() + std::f64::consts::LN_2 - x - tail
}

/// No principal curvature on a root space equals `±sqrt(-mu)` with
/// `mu = -beta(eta)^2 != 0` (`eta` normalised).
///
/// For actions with only aggregate split data every root is tested with
/// both branches, which covers whatever the actual split is.
pub fn properness_check(action: &HermannAction, xi: &ExactVector, eta: &ExactVector) -> Result<bool, HermannError> {
    action.check_dim(xi.dim())?;
    action.check_dim(eta.dim())?;
    let norm = exact::to_f64(&eta.norm_sq()).sqrt();
    if norm == 0.0 {
        return Ok(true);
    }
    let xf = xi.to_f64();
    let ef: Vec<f64> = eta.to_f64().iter().map(|x| x / norm).collect();
    let roots: Vec<(Root, RootFlags)> = match action.per_root() {
        Ok(r) => r,
        Err(_) => action
            .system
            .positive_roots()
            .into_iter()
            .map(|r| (r.clone(), RootFlags::VH))
            .collect(),
    };
    for (root, flags) in roots {
        let b = root.vector.to_f64();
        let bx: f64 = b.iter().zip(&xf).map(|(a, x)| a * x).sum();
        let be: f64 = b.iter().zip(&ef).map(|(a, x)| a * x).sum();
        if be == 0.0 {
            continue;
        }
        if flags.in_v {
            if bx == 0.0 {
                return Err(HermannError::NonPrincipal(root.vector.to_string()));
            }
            if log_gap(SpectrumKind::Vertical, bx, be) == f64::NEG_INFINITY {
                return Ok(false);
            }
        }
        if flags.in_h && log_gap(SpectrumKind::Horizontal, bx, be) == f64::NEG_INFINITY {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Raw `(lambda, mu)` pairs: false iff some `mu < 0` has `|lambda| = sqrt(-mu)`
/// up to a relative tolerance.
pub fn properness_from_pairs(pairs: &[(f64, f64)], rel_tol: f64) -> bool {
    pairs.iter().all(|&(lambda, mu)| {
        if mu >= 0.0 {
            return true;
        }
        let s = (-mu).sqrt();
        (lambda.abs() - s).abs() > rel_tol * s
    })
}

/// Reflections in the vertical roots; they generate the real Coxeter group.
pub fn real_coxeter_generators(action: &HermannAction) -> Result<Vec<AffineIsometry>, HermannError> {
    Ok(action
        .vertical_roots()?
        .iter()
        .map(|r| reflgroup::reflection(&r.vector).expect("roots are nonzero"))
        .collect())
}

/// Computed against expected counts for one catalog row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConsistencyReport {
    pub n_pos: i64,
    pub overlap: i64,
    pub computed: i64,
    pub expected: Option<i64>,
    /// expected minus `n_pos`, i.e. the overlap the count formula demands
    pub implied_overlap: Option<i64>,
    pub consistent: bool,
}

pub fn consistency(action: &HermannAction) -> ConsistencyReport {
    let n_pos = action.system.n_positive() as i64;
    let overlap = action.overlap() as i64;
    let computed = n_pos + overlap;
    let implied = action.expected_max_spec.map(|e| e - n_pos);
    let consistent = match implied {
        Some(k) => k >= 0 && k <= n_pos && k == overlap,
        None => true,
    };
    ConsistencyReport { n_pos, overlap, computed, expected: action.expected_max_spec, implied_overlap: implied, consistent }
}
