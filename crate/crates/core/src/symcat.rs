//! Catalog of irreducible symmetric spaces of non-compact type.
//!
//! The catalog file lists parametric families. Each family gives the
//! restricted root type, the rank and the multiplicity of every root length
//! class as expressions in the family parameters, together with the
//! expected counts `(#positive roots, #multiplicity-one roots, m)`.
//! Loading materialises every parameter value in the declared ranges.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::formula::{self, FormulaError, Params};
use crate::rootsys::{build_root_system, RootSystem, RootSystemError, RootType, TypeTag};

pub const BUILTIN_SPACES: &str = include_str!("../data/symmetric_spaces.json");

#[derive(thiserror::Error, Debug)]
pub enum SymcatError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid catalog JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("in family {family}: {source}")]
    Formula {
        family: String,
        #[source]
        source: FormulaError,
    },
    #[error("in family {family}: {source}")]
    RootSystem {
        family: String,
        #[source]
        source: RootSystemError,
    },
    #[error("in family {family}: {message}")]
    Schema { family: String, message: String },
    #[error("unknown symmetric space {0}")]
    UnknownSpace(String),
    #[error("codimension {codim} exceeds rank {rank}")]
    Codimension { codim: usize, rank: usize },
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ParamSpec {
    pub name: String,
    pub min: String,
    pub max: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct Table1Exprs {
    pub n_pos: String,
    pub n_mult1: String,
    pub m: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct SpaceFamily {
    pub label: String,
    pub name: String,
    #[serde(default)]
    pub params: Vec<ParamSpec>,
    pub restricted_type: String,
    pub rank: String,
    pub multiplicities: BTreeMap<String, String>,
    pub table1: Table1Exprs,
}

#[derive(Debug, Default, Serialize, Deserialize)]
struct CatalogFile {
    #[serde(default)]
    spaces: Vec<SpaceFamily>,
}

/// `(#positive roots, #positive roots of multiplicity 1, m)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MInvariant {
    pub n_pos: i64,
    pub n_mult1: i64,
    pub m: i64,
}

impl MInvariant {
    pub fn from_counts(n_pos: usize, n_mult1: usize) -> Self {
        let (n_pos, n_mult1) = (n_pos as i64, n_mult1 as i64);
        Self { n_pos, n_mult1, m: 2 * (n_pos - n_mult1) + n_mult1 }
    }
}

/// One concrete symmetric space, e.g. `AIII[p=2,q=5]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SymmetricSpace {
    pub id: String,
    pub label: String,
    pub name: String,
    pub params: Params,
    pub rank: usize,
    pub restricted_type: TypeTag,
    pub multiplicities: BTreeMap<String, u32>,
    /// the triple listed for this family in the catalog
    pub expected: MInvariant,
}

impl SymmetricSpace {
    pub fn multiplicity_of_class(&self, class: &str) -> Option<u32> {
        self.multiplicities
            .get(class)
            .or_else(|| self.multiplicities.get("all"))
            .copied()
    }
}

impl fmt::Display for SymmetricSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.id, self.name)
    }
}

pub fn instance_id(label: &str, params: &Params) -> String {
    if params.is_empty() {
        return label.to_string();
    }
    let inner: Vec<String> = params.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!("{label}[{}]", inner.join(","))
}

/// Parses `AIII[p=2,q=5]` into label and parameters.
pub fn parse_instance_id(id: &str) -> Option<(String, Params)> {
    let id = id.trim();
    let Some(open) = id.find('[') else {
        return Some((id.to_string(), Params::new()));
    };
    let label = id[..open].to_string();
    let inner = id[open + 1..].strip_suffix(']')?;
    let mut params = Params::new();
    for part in inner.split(',').filter(|s| !s.trim().is_empty()) {
        let (k, v) = part.split_once('=')?;
        params.insert(k.trim().to_string(), v.trim().parse().ok()?);
    }
    Some((label, params))
}

/// Enumerates parameter assignments from range specs whose bounds may
/// reference earlier parameters.
pub fn enumerate_params(specs: &[ParamSpec]) -> Result<Vec<Params>, FormulaError> {
    let mut out = vec![Params::new()];
    for spec in specs {
        let mut next = Vec::new();
        for partial in &out {
            let lo = formula::eval_int(&spec.min, partial)?;
            let hi = formula::eval_int(&spec.max, partial)?;
            let step = match &spec.step {
                Some(s) => formula::eval_int(s, partial)?.max(1),
                None => 1,
            };
            let mut v = lo;
            while v <= hi {
                let mut p = partial.clone();
                p.insert(spec.name.clone(), v);
                next.push(p);
                v += step;
            }
        }
        out = next;
    }
    Ok(out)
}

fn params_admitted(specs: &[ParamSpec], params: &Params) -> Result<bool, FormulaError> {
    if specs.len() != params.len() || specs.iter().any(|s| !params.contains_key(&s.name)) {
        return Ok(false);
    }
    let mut partial = Params::new();
    for spec in specs {
        let v = params[&spec.name];
        let lo = formula::eval_int(&spec.min, &partial)?;
        let hi = formula::eval_int(&spec.max, &partial)?;
        let step = match &spec.step {
            Some(s) => formula::eval_int(s, &partial)?.max(1),
            None => 1,
        };
        if v < lo || v > hi || (v - lo) % step != 0 {
            return Ok(false);
        }
        partial.insert(spec.name.clone(), v);
    }
    Ok(true)
}

impl SpaceFamily {
    pub fn instantiate(&self, params: &Params) -> Result<SymmetricSpace, SymcatError> {
        let family = self.label.clone();
        let ferr = |source| SymcatError::Formula { family: family.clone(), source };
        let kind: RootType = self
            .restricted_type
            .parse()
            .map_err(|source| SymcatError::RootSystem { family: family.clone(), source })?;
        let rank_i = formula::eval_int(&self.rank, params).map_err(ferr)?;
        if rank_i < 1 {
            return Err(SymcatError::Schema { family, message: format!("rank {rank_i} must be positive") });
        }
        let rank = rank_i as usize;
        if kind.fixed_rank().is_some_and(|r| r != rank) {
            return Err(SymcatError::Schema {
                family,
                message: format!("type {kind} has rank {}, not {rank}", kind.fixed_rank().unwrap_or(0)),
            });
        }
        let mut multiplicities = BTreeMap::new();
        for (class, expr) in &self.multiplicities {
            let m = formula::eval_int(expr, params).map_err(ferr)?;
            if m < 1 {
                return Err(SymcatError::Schema {
                    family,
                    message: format!("multiplicity of {class} roots is {m}, must be positive"),
                });
            }
            multiplicities.insert(class.clone(), m as u32);
        }
        let name = formula::render(&self.name, params).map_err(ferr)?;
        let expected = MInvariant {
            n_pos: formula::eval_int(&self.table1.n_pos, params).map_err(ferr)?,
            n_mult1: formula::eval_int(&self.table1.n_mult1, params).map_err(ferr)?,
            m: formula::eval_int(&self.table1.m, params).map_err(ferr)?,
        };
        let space = SymmetricSpace {
            id: instance_id(&self.label, params),
            label: self.label.clone(),
            name,
            params: params.clone(),
            rank,
            restricted_type: TypeTag::new(kind, rank),
            multiplicities,
            expected,
        };
        // every length class of the root system needs a multiplicity
        let rs = build_root_system(kind, rank).map_err(|source| SymcatError::RootSystem { family: family.clone(), source })?;
        let classes: BTreeSet<&str> = match rs.squared_lengths().len() {
            1 => BTreeSet::from(["all"]),
            2 => BTreeSet::from(["short", "long"]),
            _ => BTreeSet::from(["short", "middle", "long"]),
        };
        for class in classes {
            if space.multiplicity_of_class(class).is_none() {
                return Err(SymcatError::Schema {
                    family,
                    message: format!("no multiplicity for {class} roots of {}", space.restricted_type),
                });
            }
        }
        Ok(space)
    }
}

/// Loaded catalog: the families and every materialised instance.
#[derive(Clone, Debug, Default)]
pub struct Catalog {
    families: Vec<SpaceFamily>,
    spaces: Vec<SymmetricSpace>,
}

impl Catalog {
    pub fn from_json_str(s: &str) -> Result<Self, SymcatError> {
        if s.trim().is_empty() {
            return Ok(Self::default());
        }
        let file: CatalogFile = serde_json::from_str(s)?;
        let mut spaces = Vec::new();
        for fam in &file.spaces {
            let all = enumerate_params(&fam.params)
                .map_err(|source| SymcatError::Formula { family: fam.label.clone(), source })?;
            for p in all {
                spaces.push(fam.instantiate(&p)?);
            }
        }
        Ok(Self { families: file.spaces, spaces })
    }

    /// The bundled catalog (parsed once).
    pub fn builtin() -> Self {
        static CELL: OnceLock<Catalog> = OnceLock::new();
        CELL.get_or_init(|| Self::from_json_str(BUILTIN_SPACES).expect("bundled catalog is valid"))
            .clone()
    }

    pub fn families(&self) -> &[SpaceFamily] {
        &self.families
    }

    pub fn spaces(&self) -> &[SymmetricSpace] {
        &self.spaces
    }

    pub fn len(&self) -> usize {
        self.spaces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spaces.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&SymmetricSpace> {
        self.spaces.iter().find(|s| s.id == id)
    }

    /// Builds the space `label` at `params` from the first family whose
    /// ranges admit them.
    pub fn instantiate(&self, label: &str, params: &Params) -> Result<SymmetricSpace, SymcatError> {
        for fam in self.families.iter().filter(|f| f.label == label) {
            let ok = params_admitted(&fam.params, params)
                .map_err(|source| SymcatError::Formula { family: fam.label.clone(), source })?;
            if ok {
                return fam.instantiate(params);
            }
        }
        Err(SymcatError::UnknownSpace(instance_id(label, params)))
    }
}

/// Reads a catalog file; an empty file yields an empty catalog.
pub fn catalog_load(path: &Path) -> Result<Catalog, SymcatError> {
    let s = std::fs::read_to_string(path).map_err(|source| SymcatError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Catalog::from_json_str(&s)
}

/// The restricted root system with the catalog multiplicities attached.
pub fn restricted_system(desc: &SymmetricSpace) -> RootSystem {
    let tag = desc.restricted_type;
    let rs = build_root_system(tag.kind, tag.rank).expect("validated at load time");
    rs.with_class_multiplicities(|class| desc.multiplicity_of_class(class).expect("validated at load time"))
        .expect("positive multiplicities")
        .with_label(desc.id.clone())
}

pub fn m_invariant_of(rs: &RootSystem) -> MInvariant {
    MInvariant::from_counts(rs.n_positive(), rs.n_positive_mult1())
}

pub fn m_invariant(desc: &SymmetricSpace) -> MInvariant {
    m_invariant_of(&restricted_system(desc))
}

/// `2 #(D+ \ D+^1) + #D+^1 + dim_centralizer - codim` for a restricted datum.
pub fn theorem_c_bound_for(restricted: &RootSystem, codim: usize, dim_centralizer: usize) -> i64 {
    m_invariant_of(restricted).m + dim_centralizer as i64 - codim as i64
}

/// The bound evaluated on the full restricted system of `desc`.
pub fn theorem_c_bound(desc: &SymmetricSpace, codim: usize, dim_centralizer: usize) -> Result<i64, SymcatError> {
    if codim > desc.rank {
        return Err(SymcatError::Codimension { codim, rank: desc.rank });
    }
    Ok(theorem_c_bound_for(&restricted_system(desc), codim, dim_centralizer))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::check_weakly_root_system;

    fn p(kv: &[(&str, i64)]) -> Params {
        kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn ids() {
        assert_eq!(instance_id("AIII", &p(&[("q", 5), ("p", 2)])), "AIII[p=2,q=5]");
        assert_eq!(parse_instance_id("AIII[p=2,q=5]"), Some(("AIII".to_string(), p(&[("p", 2), ("q", 5)]))));
        assert_eq!(parse_instance_id("FII"), Some(("FII".to_string(), Params::new())));
        assert_eq!(parse_instance_id("AI[n=x]"), None);
    }

    #[test]
    fn ranges_reference_earlier_params() {
        let specs = vec![
            ParamSpec { name: "p".into(), min: "1".into(), max: "2".into(), step: None },
            ParamSpec { name: "q".into(), min: "p+1".into(), max: "3".into(), step: None },
        ];
        let all = enumerate_params(&specs).unwrap();
        assert_eq!(all, vec![p(&[("p", 1), ("q", 2)]), p(&[("p", 1), ("q", 3)]), p(&[("p", 2), ("q", 3)])]);
        assert!(params_admitted(&specs, &p(&[("p", 2), ("q", 3)])).unwrap());
        assert!(!params_admitted(&specs, &p(&[("p", 2), ("q", 2)])).unwrap());
    }

    #[test]
    fn builtin_examples() {
        let cat = Catalog::builtin();
        let ai3 = cat.get("AI[n=3]").unwrap();
        assert_eq!(ai3.rank, 2);
        assert_eq!(ai3.restricted_type.to_string(), "A2");
        assert!(restricted_system(ai3).roots().iter().all(|r| r.mult == 1));

        let fii = cat.get("FII").unwrap();
        assert_eq!(fii.rank, 1);
        assert_eq!(fii.restricted_type.to_string(), "BC1");
        assert_eq!(m_invariant(fii), MInvariant { n_pos: 2, n_mult1: 0, m: 4 });

        let aii = restricted_system(cat.get("AII[n=3]").unwrap());
        assert!(aii.roots().iter().all(|r| r.mult == 4));
        let g = restricted_system(cat.get("G").unwrap());
        assert_eq!(m_invariant_of(&g), MInvariant { n_pos: 6, n_mult1: 6, m: 6 });
        let bdi = restricted_system(cat.get("BDI[p=1,q=3]").unwrap());
        assert_eq!(bdi.len(), 2);
        assert_eq!(bdi.roots()[0].mult, 2);
        assert!(check_weakly_root_system(&bdi));

        assert_eq!(m_invariant(cat.get("AI[n=4]").unwrap()), MInvariant { n_pos: 6, n_mult1: 6, m: 6 });
        assert_eq!(m_invariant(cat.get("EIV").unwrap()), MInvariant { n_pos: 3, n_mult1: 0, m: 6 });
    }

    #[test]
    fn instantiate_outside_materialised_grid() {
        let cat = Catalog::builtin();
        let s = cat.instantiate("AIII", &p(&[("p", 2), ("q", 5)])).unwrap();
        assert_eq!(s.restricted_type.to_string(), "BC2");
        let s = cat.instantiate("AIII", &p(&[("p", 3), ("q", 3)])).unwrap();
        assert_eq!(s.restricted_type.to_string(), "C3");
        assert!(matches!(cat.instantiate("AIII", &p(&[("p", 3)])), Err(SymcatError::UnknownSpace(_))));
    }

    #[test]
    fn codimension_bound() {
        let cat = Catalog::builtin();
        let ai3 = cat.get("AI[n=3]").unwrap();
        assert_eq!(theorem_c_bound(ai3, 2, 2).unwrap(), 3);
        assert_eq!(theorem_c_bound(ai3, 1, 1).unwrap(), m_invariant(ai3).m);
        assert!(theorem_c_bound(ai3, 3, 3).is_err());
    }

    #[test]
    fn empty_and_bad_files() {
        assert!(Catalog::from_json_str("").unwrap().is_empty());
        assert!(Catalog::from_json_str("{\"spaces\": []}").unwrap().is_empty());
        let bad_mult = r#"{"spaces":[{"label":"X","name":"x","params":[],"restricted_type":"B","rank":"2",
            "multiplicities":{"short":"0","long":"1"},"table1":{"n_pos":"4","n_mult1":"2","m":"6"}}]}"#;
        assert!(matches!(Catalog::from_json_str(bad_mult), Err(SymcatError::Schema { .. })));
        let bad_rank = r#"{"spaces":[{"label":"X","name":"x","params":[],"restricted_type":"E6","rank":"5",
            "multiplicities":{"all":"1"},"table1":{"n_pos":"4","n_mult1":"2","m":"6"}}]}"#;
        assert!(matches!(Catalog::from_json_str(bad_rank), Err(SymcatError::Schema { .. })));
        let missing_class = r#"{"spaces":[{"label":"X","name":"x","params":[],"restricted_type":"B","rank":"2",
            "multiplicities":{"short":"1"},"table1":{"n_pos":"4","n_mult1":"2","m":"6"}}]}"#;
        assert!(matches!(Catalog::from_json_str(missing_class), Err(SymcatError::Schema { .. })));
        assert!(matches!(Catalog::from_json_str("{"), Err(SymcatError::Json(_))));
    }
}
