use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use equifocal::adnum::{self, MatrixModel, ModelFamily};
use equifocal::exact::{self, ExactVector};
use equifocal::focal::{self, JRange};
use equifocal::hermann::{self, HermannAction, HermannCatalog};
use equifocal::reflgroup;
use equifocal::rootsys::{self, RootSystem, RootType};
use equifocal::symcat::{self, Catalog};

pub const CATALOG_DIR_ENV: &str = "EQUIFOCAL_CATALOG_DIR";
const SPACES_FILE: &str = "symmetric_spaces.json";
const ACTIONS_FILE: &str = "hermann_actions.json";

/// Process exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Match = 0,
    Mismatch = 1,
    Usage = 2,
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow!(msg.into())
}

#[derive(Parser, Debug)]
#[command(name = "equifocal", version, about = "Root systems, Hermann actions and focal structure of equifocal submanifolds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Reproduce (#Delta+, #Delta+^1, m) for every symmetric space
    Table1(CatalogArgs),
    /// Reproduce max #Spec for every Hermann action
    Hermann(HermannArgs),
    /// Focal hyperplane arrangement of a principal Hermann orbit
    Arrange(ArrangeArgs),
    /// Principal curvatures of a principal Hermann orbit
    Spectra(SpectraArgs),
    /// Complex focal radii (or their reciprocals) for one eigenvalue pair
    FocalRadii(FocalRadiiArgs),
    /// Root-system axioms for a built or restricted system
    RootsCheck(RootsCheckArgs),
    /// Weyl group order by closure against the product formula
    WeylOrder(WeylOrderArgs),
    /// Matrix-model oracle suites
    Oracle(OracleArgs),
}

#[derive(Args, Debug)]
pub struct CatalogArgs {
    /// symmetric-space catalog (JSON)
    #[arg(long)]
    pub catalog: Option<PathBuf>,
    /// output file, standard output if omitted
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct HermannArgs {
    /// Hermann action catalog (JSON)
    #[arg(long)]
    pub catalog: Option<PathBuf>,
    /// symmetric-space catalog (JSON)
    #[arg(long)]
    pub spaces: Option<PathBuf>,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ActionArgs {
    /// action id, e.g. "T2-01[n=3]"
    #[arg(long = "space")]
    pub id: String,
    /// basepoint: ambient coordinates, or simple-root values (one per rank)
    #[arg(long, allow_hyphen_values = true)]
    pub xi: String,
    #[arg(long)]
    pub catalog: Option<PathBuf>,
    #[arg(long)]
    pub spaces: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ArrangeArgs {
    #[command(flatten)]
    pub action: ActionArgs,
    #[arg(long, default_value = "-3..3", allow_hyphen_values = true)]
    pub j_range: JRange,
    /// CSV output, standard output if omitted
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// SVG of the real slice (rank 2 only)
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SpectraArgs {
    #[command(flatten)]
    pub action: ActionArgs,
    /// normal direction, same coordinates as --xi
    #[arg(long, allow_hyphen_values = true)]
    pub eta: String,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Args, Debug)]
pub struct FocalRadiiArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: f64,
    /// beta(v) >= 0
    #[arg(long)]
    pub beta: f64,
    #[arg(long, default_value = "-3..3", allow_hyphen_values = true)]
    pub j_range: JRange,
    /// print the lifted spectrum values instead of the radii
    #[arg(long)]
    pub lifted: bool,
}

#[derive(Args, Debug)]
pub struct RootsCheckArgs {
    /// root type, e.g. B
    #[arg(long = "type", value_name = "TYPE")]
    pub kind: Option<RootType>,
    #[arg(long)]
    pub rank: Option<usize>,
    /// catalog space id, e.g. "AIII[p=2,q=5]"
    #[arg(long)]
    pub space: Option<String>,
    /// root system JSON file
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// restrict to the span of these vectors, separated by ';'
    #[arg(long, allow_hyphen_values = true)]
    pub restrict: Option<String>,
}

#[derive(Args, Debug)]
pub struct WeylOrderArgs {
    #[arg(long = "type", value_name = "TYPE")]
    pub kind: RootType,
    #[arg(long)]
    pub rank: Option<usize>,
    /// abort the closure beyond this many elements
    #[arg(long, default_value_t = 100_000)]
    pub max_order: usize,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    /// sl_n_R or so_p_q
    pub model: String,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long)]
    pub q: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
}

fn catalog_file(explicit: Option<&Path>, name: &str) -> Option<PathBuf> {
    explicit
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(CATALOG_DIR_ENV).map(|d| PathBuf::from(d).join(name)))
}

fn read_catalog_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read catalog {}: {e}", path.display())))
}

fn load_spaces(explicit: Option<&Path>) -> Result<Catalog> {
    match catalog_file(explicit, SPACES_FILE) {
        Some(p) => Catalog::from_json_str(&read_catalog_text(&p)?).map_err(|e| usage(format!("{}: {e}", p.display()))),
        None => Ok(Catalog::builtin()),
    }
}

fn load_actions(explicit: Option<&Path>, spaces: &Catalog) -> Result<HermannCatalog> {
    match catalog_file(explicit, ACTIONS_FILE) {
        Some(p) => HermannCatalog::from_json_str(&read_catalog_text(&p)?, spaces).map_err(|e| usage(format!("{}: {e}", p.display()))),
        None if std::env::var_os(CATALOG_DIR_ENV).is_none() => Ok(HermannCatalog::builtin()),
        None => HermannCatalog::from_json_str(hermann::BUILTIN_ACTIONS, spaces).map_err(|e| usage(e.to_string())),
    }
}

fn writer<'a>(out: Option<&Path>, stdout: &'a mut dyn Write) -> Result<Box<dyn Write + 'a>> {
    Ok(match out {
        Some(p) => Box::new(File::create(p).with_context(|| format!("cannot create {}", p.display()))?),
        None => Box::new(stdout),
    })
}

pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<Status> {
    match cli.command {
        Command::Table1(a) => cmd_table1(&a, stdout),
        Command::Hermann(a) => cmd_hermann(&a, stdout),
        Command::Arrange(a) => cmd_arrange(&a, stdout),
        Command::Spectra(a) => cmd_spectra(&a, stdout),
        Command::FocalRadii(a) => cmd_focal_radii(&a, stdout),
        Command::RootsCheck(a) => cmd_roots_check(&a, stdout),
        Command::WeylOrder(a) => cmd_weyl_order(&a, stdout),
        Command::Oracle(a) => cmd_oracle(&a, stdout),
    }
}

fn cmd_table1(args: &CatalogArgs, stdout: &mut dyn Write) -> Result<Status> {
    let cat = load_spaces(args.catalog.as_deref())?;
    let mut w = csv::Writer::from_writer(writer(args.out.as_deref(), stdout)?);
    w.write_record(["id", "name", "type", "n_pos", "n_mult1", "m", "expected_n_pos", "expected_n_mult1", "expected_m", "match"])?;
    let mut all = true;
    for s in cat.spaces() {
        let got = symcat::m_invariant(s);
        let ok = got == s.expected;
        all &= ok;
        w.write_record([
            s.id.clone(),
            s.name.clone(),
            s.restricted_type.to_string(),
            got.n_pos.to_string(),
            got.n_mult1.to_string(),
            got.m.to_string(),
            s.expected.n_pos.to_string(),
            s.expected.n_mult1.to_string(),
            s.expected.m.to_string(),
            ok.to_string(),
        ])?;
        if !ok {
            eprintln!("mismatch: {} computed {:?}, expected {:?}", s.id, got, s.expected);
        }
    }
    w.flush()?;
    Ok(if all { Status::Match } else { Status::Mismatch })
}

fn cmd_hermann(args: &HermannArgs, stdout: &mut dyn Write) -> Result<Status> {
    let spaces = load_spaces(args.spaces.as_deref())?;
    let cat = load_actions(args.catalog.as_deref(), &spaces)?;
    let mut w = csv::Writer::from_writer(writer(args.out.as_deref(), stdout)?);
    w.write_record(["id", "table", "h", "space", "n_pos", "overlap", "computed", "expected", "printed", "match", "note"])?;
    let mut all = true;
    for a in cat.actions() {
        let computed = hermann::max_distinct_spec(a);
        let ok = a.expected_max_spec == Some(computed);
        all &= ok;
        let printed = a.printed_max_spec.as_ref().map(exact::format_rational).unwrap_or_default();
        let note = if a.printed_max_spec.is_some() { "erratum: printed value differs" } else { "" };
        w.write_record([
            a.id.clone(),
            a.table.to_string(),
            a.h_label.clone(),
            a.space.name.clone(),
            a.system.n_positive().to_string(),
            a.overlap().to_string(),
            computed.to_string(),
            a.expected_max_spec.map(|e| e.to_string()).unwrap_or_default(),
            printed,
            ok.to_string(),
            note.to_string(),
        ])?;
        if !ok {
            eprintln!("mismatch: {} computed {computed}, expected {:?}", a.id, a.expected_max_spec);
        }
    }
    w.flush()?;
    Ok(if all { Status::Match } else { Status::Mismatch })
}

fn find_action(args: &ActionArgs) -> Result<HermannAction> {
    let spaces = load_spaces(args.spaces.as_deref())?;
    let cat = load_actions(args.catalog.as_deref(), &spaces)?;
    cat.get(&args.id).cloned().ok_or_else(|| usage(format!("unknown Hermann action {:?}", args.id)))
}

/// Ambient coordinates, or the values of the simple roots (in the order
/// printed by `roots-check`) when the length equals the rank. Positive
/// simple-root values give a point of the open Weyl chamber.
fn section_vector(action: &HermannAction, text: &str) -> Result<ExactVector> {
    let v: ExactVector = text.parse().map_err(|e| usage(format!("bad vector {text:?}: {e}")))?;
    let dim = action.system.ambient_dim();
    if v.dim() == dim {
        return Ok(v);
    }
    let simple = action.system.simple_roots();
    if v.dim() != simple.len() || simple.len() != action.system.rank() {
        return Err(usage(format!("vector has {} coordinates; expected {dim} (ambient) or {} (simple-root values)", v.dim(), action.rank())));
    }
    let mut rows: Vec<Vec<exact::Rational>> = simple.iter().map(|r| r.coords().to_vec()).collect();
    let mut rhs: Vec<exact::Rational> = v.coords().to_vec();
    for n in focal::section_normals(&action.system.span_basis(), dim) {
        rows.push(n.into_coords());
        rhs.push(exact::int(0));
    }
    let sol = exact::solve(&rows, &rhs, dim).ok_or_else(|| usage("simple-root values are inconsistent"))?;
    Ok(ExactVector::new(sol.particular))
}

fn cmd_arrange(args: &ArrangeArgs, stdout: &mut dyn Write) -> Result<Status> {
    let action = find_action(&args.action)?;
    action.per_root()?;
    let xi = section_vector(&action, &args.action.xi)?;
    let arr = focal::hermann_focal_arrangement(&action, &xi, args.j_range).map_err(|e| usage(e.to_string()))?;
    let set = focal::real_focal_set(&arr);
    if let Some(path) = &args.svg {
        let plane = action.system.span_basis();
        let svg = focal::render_svg(&set, &plane)
            .ok_or_else(|| usage(format!("SVG needs a rank-2 section, {} has rank {}", action.id, plane.len())))?;
        std::fs::write(path, svg).with_context(|| format!("cannot write {}", path.display()))?;
    }
    arr.write_csv(writer(args.out.as_deref(), stdout)?)?;
    let through = set.contains(&-&xi);
    match &set.common_point {
        Some(p) if set.is_point() => eprintln!("common point: {p}"),
        Some(p) => eprintln!("common flat: {p} + span of {} directions", set.flat_directions.len()),
        None => eprintln!("real focal hyperplanes have no common point"),
    }
    Ok(if through { Status::Match } else { Status::Mismatch })
}

#[derive(Serialize)]
struct SpectrumLine {
    kind: hermann::SpectrumKind,
    root: String,
    multiplicity: u32,
    value: f64,
}

#[derive(Serialize)]
struct SpectraReport {
    action: String,
    xi: String,
    eta: String,
    values: Vec<SpectrumLine>,
    distinct: usize,
    max_distinct_spec: i64,
    proper: bool,
}

fn cmd_spectra(args: &SpectraArgs, stdout: &mut dyn Write) -> Result<Status> {
    let action = find_action(&args.action)?;
    action.per_root()?;
    let xi = section_vector(&action, &args.action.xi)?;
    let eta = section_vector(&action, &args.eta)?;
    let spec = hermann::orbit_spectrum(&action, &xi, &eta).map_err(|e| usage(e.to_string()))?;
    let (xf, ef) = (xi.to_f64(), eta.to_f64());
    let values: Vec<SpectrumLine> = spec
        .iter()
        .map(|s| {
            let root = s.root.as_ref().expect("orbit spectrum values carry a root");
            SpectrumLine { kind: s.kind, root: root.vector.to_string(), multiplicity: root.mult, value: s.evaluate(&xf, &ef) }
        })
        .collect();
    let distinct = hermann::numeric_distinct_count(&action, &xf, &ef, args.tol)?;
    let report = SpectraReport {
        action: action.id.clone(),
        xi: xi.to_string(),
        eta: eta.to_string(),
        values,
        distinct,
        max_distinct_spec: hermann::max_distinct_spec(&action),
        proper: hermann::properness_check(&action, &xi, &eta)?,
    };
    serde_json::to_writer_pretty(&mut *stdout, &report)?;
    writeln!(stdout)?;
    Ok(Status::Match)
}

fn cmd_focal_radii(args: &FocalRadiiArgs, stdout: &mut dyn Write) -> Result<Status> {
    if args.beta < 0.0 {
        return Err(usage("--beta must be non-negative"));
    }
    let mut w = csv::Writer::from_writer(stdout);
    w.write_record(["index", "re", "im", "residual"])?;
    if args.lifted {
        let vals = focal::lifted_values(args.lambda, -args.beta * args.beta, args.j_range).map_err(|e| usage(e.to_string()))?;
        for (k, z) in vals.iter().enumerate() {
            let r = focal::focal_residual(1.0 / z, args.lambda, args.beta).norm();
            w.write_record([k.to_string(), format!("{:.15}", z.re), format!("{:.15}", z.im), format!("{r:.3e}")])?;
        }
    } else {
        let radii = focal::complex_focal_radii(args.lambda, args.beta, args.j_range);
        let single = args.beta == 0.0;
        for (k, z) in radii.iter().enumerate() {
            let index = if single { "0".to_string() } else { (args.j_range.min + k as i64).to_string() };
            let r = focal::focal_residual(*z, args.lambda, args.beta).norm();
            w.write_record([index, format!("{:.15}", z.re), format!("{:.15}", z.im), format!("{r:.3e}")])?;
        }
        if radii.is_empty() {
            eprintln!("no focal radius: |lambda| = beta(v) or lambda = beta(v) = 0");
        }
    }
    w.flush()?;
    Ok(Status::Match)
}

#[derive(Serialize)]
struct RootsReport {
    label: Option<String>,
    ambient_dim: usize,
    rank: usize,
    n_roots: usize,
    n_positive: usize,
    simple_roots: Vec<String>,
    weakly_root_system: bool,
    conditions: rootsys::RootConditions,
}

fn parse_vectors(text: &str) -> Result<Vec<ExactVector>> {
    text.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.parse::<ExactVector>().map_err(|e| usage(format!("bad vector {s:?}: {e}"))))
        .collect()
}

fn cmd_roots_check(args: &RootsCheckArgs, stdout: &mut dyn Write) -> Result<Status> {
    let mut rs: RootSystem = match (&args.kind, &args.space, &args.file) {
        (Some(kind), None, None) => {
            let rank = args.rank.or(kind.fixed_rank()).ok_or_else(|| usage("--rank is required for this type"))?;
            rootsys::build_root_system(*kind, rank).map_err(|e| usage(e.to_string()))?
        }
        (None, Some(id), None) => {
            let cat = load_spaces(None)?;
            let s = cat.get(id).ok_or_else(|| usage(format!("unknown space {id:?}")))?;
            symcat::restricted_system(s)
        }
        (None, None, Some(path)) => RootSystem::from_json(&read_catalog_text(path)?).map_err(|e| usage(e.to_string()))?,
        _ => return Err(usage("give exactly one of --type, --space, --file")),
    };
    if let Some(text) = &args.restrict {
        let basis = parse_vectors(text)?;
        rs = rootsys::restrict(&rs, &basis).map_err(|e| usage(e.to_string()))?;
    }
    let conditions = rootsys::check_root_system_conditions(&rs);
    let report = RootsReport {
        label: rs.label().map(str::to_string),
        ambient_dim: rs.ambient_dim(),
        rank: rs.rank(),
        n_roots: rs.len(),
        n_positive: rs.n_positive(),
        simple_roots: rs.simple_roots().iter().map(|v| v.to_string()).collect(),
        weakly_root_system: rootsys::check_weakly_root_system(&rs),
        conditions,
    };
    serde_json::to_writer_pretty(&mut *stdout, &report)?;
    writeln!(stdout)?;
    Ok(if report.weakly_root_system { Status::Match } else { Status::Mismatch })
}

#[derive(Serialize)]
struct WeylReport {
    kind: String,
    rank: usize,
    closure_order: usize,
    formula_order: Option<u128>,
    complete: bool,
    #[serde(rename = "match")]
    matches: bool,
}

fn cmd_weyl_order(args: &WeylOrderArgs, stdout: &mut dyn Write) -> Result<Status> {
    let rank = args.rank.or(args.kind.fixed_rank()).ok_or_else(|| usage("--rank is required for this type"))?;
    let rs = rootsys::build_root_system(args.kind, rank).map_err(|e| usage(e.to_string()))?;
    let group = reflgroup::generate_finite(&reflgroup::root_reflections(&rs), args.max_order)?;
    let formula = reflgroup::weyl_order(args.kind, rank);
    let matches = group.is_complete() && formula == Some(group.order() as u128);
    let report = WeylReport {
        kind: args.kind.to_string(),
        rank,
        closure_order: group.order(),
        formula_order: formula,
        complete: group.is_complete(),
        matches,
    };
    serde_json::to_writer_pretty(&mut *stdout, &report)?;
    writeln!(stdout)?;
    Ok(if matches { Status::Match } else { Status::Mismatch })
}

fn cmd_oracle(args: &OracleArgs, stdout: &mut dyn Write) -> Result<Status> {
    let family = match args.model.as_str() {
        "sl_n_R" | "sl" => ModelFamily::SlNR { n: args.n.ok_or_else(|| usage("sl_n_R needs --n"))? },
        "so_p_q" | "so" => ModelFamily::SoPQ {
            p: args.p.ok_or_else(|| usage("so_p_q needs --p"))?,
            q: args.q.ok_or_else(|| usage("so_p_q needs --q"))?,
        },
        other => return Err(usage(format!("unsupported model {other:?}; use sl_n_R or so_p_q"))),
    };
    let model = MatrixModel::new(family).map_err(|e| usage(e.to_string()))?;
    let report = adnum::run_oracle(&model, args.trials, args.seed)?;
    serde_json::to_writer_pretty(&mut *stdout, &report)?;
    writeln!(stdout)?;
    Ok(if report.passed { Status::Match } else { Status::Mismatch })
}

pub fn main_with(args: impl IntoIterator<Item = String>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { Status::Usage as i32 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    match run(cli, &mut lock) {
        Ok(s) => s as i32,
        Err(e) if e.chain().any(|c| c.downcast_ref::<io::Error>().is_some_and(|io| io.kind() == io::ErrorKind::BrokenPipe)) => 0,
        Err(e) => {
            // every error is a usage or data problem: no comparison was made
            eprintln!("error: {e:#}");
            Status::Usage as i32
        }
    }
}
