//! Command dispatch for the `symspread` binary. A [`CommandConfig`] fully
//! determines a run; [`run`] executes it and returns the report and exit status.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use symspread_core::census::{
    classify_all_planes, disjoint_plane_census, first_rejecting_vector, linset_search, orbit_transitivity_check,
    with_threads, OrbitOptions, PlaneCensusOptions, SearchOptions, Strategy,
};
use symspread_core::field::Field;
use symspread_core::linset::{
    closed_form_fg, derive_fg, disjoint_from_secant, fg_zeros,
    forbidden_monomials_absent, LinearSetSpec, LinsetContext, Poly,
};
use symspread_core::spread::{
    desarguesian_spread_set, spread_cover, spread_to_linset, validate_spread_set, Presemifield, SpreadSet,
    PRESEMIFIELD_BUDGET,
};
use symspread_core::veronese::{nucleus_plane, secant_value, GeomContext};
use symspread_core::{CensusReport, Error as CoreError};

/// Environment variable consulted when `--threads` is absent.
pub const THREADS_ENV: &str = "SYMSPREAD_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("malformed input {path}: {reason}")]
    Input { path: PathBuf, reason: String },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Core(#[from] CoreError),
}

macro_rules! core_err {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Core(e.into())
            }
        }
    )*};
}
core_err!(
    symspread_core::CensusError,
    symspread_core::FieldError,
    symspread_core::GeomError,
    symspread_core::LinsetError,
    symspread_core::SpreadError,
    symspread_core::ProjError
);

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    ClassifyPlanes,
    DisjointPlanes,
    OrbitCheck,
    SearchLinsets,
    VerifySpread,
    DeriveFg,
    Selftest,
}

impl Command {
    pub fn as_str(&self) -> &'static str {
        match self {
            Command::ClassifyPlanes => "classify-planes",
            Command::DisjointPlanes => "disjoint-planes",
            Command::OrbitCheck => "orbit-check",
            Command::SearchLinsets => "search-linsets",
            Command::VerifySpread => "verify-spread",
            Command::DeriveFg => "derive-fg",
            Command::Selftest => "selftest",
        }
    }
}

/// A complete, serializable description of one run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommandConfig {
    pub command: Command,
    /// Order `Q` of the base field of `PG(5, Q)` for `classify-planes`.
    pub order: u32,
    /// `q` with linear sets in `PG(5, q^2)`.
    pub q: u32,
    pub seed: u64,
    /// Worker count; `None` uses the rayon default.
    pub threads: Option<usize>,
    pub strategy: Strategy,
    pub out: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub checkpoint: Option<PathBuf>,
    pub checkpoint_every: u64,
    pub input: Option<PathBuf>,
    /// Pairs sampled by `orbit-check`.
    pub pairs: usize,
    /// Allows `disjoint-planes` beyond `q = 2`.
    pub long_run: bool,
    pub timing: bool,
}

impl CommandConfig {
    pub fn new(command: Command) -> CommandConfig {
        CommandConfig {
            command,
            order: 2,
            q: 2,
            seed: 0,
            threads: None,
            strategy: Strategy::RestrictedSlice,
            out: None,
            csv: None,
            checkpoint: None,
            checkpoint_every: SearchOptions::default().checkpoint_every,
            input: None,
            pairs: OrbitOptions::default().pairs,
            long_run: false,
            timing: false,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn from_json(s: &str) -> Result<CommandConfig> {
        serde_json::from_str(s).map_err(|e| CliError::Usage(format!("bad config: {e}")))
    }
}

/// Result of a run: the report, and whether every checked property held.
#[derive(Debug)]
pub struct RunOutcome {
    pub report: CensusReport,
    pub passed: bool,
}

impl RunOutcome {
    /// 0 when all checks hold, 1 on a counterexample.
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }
}

/// Executes the configured command and writes the report files it names.
pub fn run(cfg: &CommandConfig) -> Result<RunOutcome> {
    let report = with_threads(cfg.threads, || dispatch(cfg))?;
    let passed = report.checks_pass();
    let body = report.to_json();
    match &cfg.out {
        Some(path) => fs::write(path, &body)?,
        None => print!("{body}"),
    }
    if let Some(path) = &cfg.csv {
        fs::write(path, report.to_csv())?;
    }
    Ok(RunOutcome { report, passed })
}

fn dispatch(cfg: &CommandConfig) -> Result<CensusReport> {
    let plane_opts = PlaneCensusOptions { timing: cfg.timing, ..Default::default() };
    let mut report = match cfg.command {
        Command::ClassifyPlanes => {
            if !(2..=4).contains(&cfg.order) {
                return Err(CliError::Usage(format!("--order must be 2, 3 or 4, got {}", cfg.order)));
            }
            classify_all_planes(cfg.order, &plane_opts)?
        }
        Command::DisjointPlanes => {
            check_q(cfg)?;
            disjoint_plane_census(cfg.q, &plane_opts)?.report
        }
        Command::OrbitCheck => {
            check_q(cfg)?;
            let census = disjoint_plane_census(cfg.q, &PlaneCensusOptions::default())?;
            let opts = OrbitOptions { pairs: cfg.pairs, seed: cfg.seed, timing: cfg.timing };
            orbit_transitivity_check(&census, &opts)?
        }
        Command::SearchLinsets => {
            if cfg.q != 2 {
                return Err(CliError::Usage("search-linsets supports --q 2 only".into()));
            }
            let ctx = LinsetContext::for_q(2)?;
            let opts = SearchOptions {
                strategy: cfg.strategy,
                checkpoint: cfg.checkpoint.clone(),
                checkpoint_every: cfg.checkpoint_every,
                stop_after: None,
                timing: cfg.timing,
            };
            linset_search(&ctx, &opts)?.report
        }
        Command::VerifySpread => verify_spread(cfg)?,
        Command::DeriveFg => derive(cfg)?,
        Command::Selftest => selftest()?,
    };
    report.param("seed", cfg.seed);
    Ok(report)
}

fn check_q(cfg: &CommandConfig) -> Result<()> {
    if cfg.q != 2 && !cfg.long_run {
        return Err(CliError::Usage(format!("--q {} needs --long-run; the default census is q = 2", cfg.q)));
    }
    Ok(())
}

fn read_input(cfg: &CommandConfig) -> Result<Option<(PathBuf, String)>> {
    match &cfg.input {
        Some(p) => Ok(Some((p.clone(), fs::read_to_string(p)?))),
        None => Ok(None),
    }
}

fn malformed(path: &Path, reason: impl ToString) -> CliError {
    CliError::Input { path: path.to_path_buf(), reason: reason.to_string() }
}

fn verify_spread(cfg: &CommandConfig) -> Result<CensusReport> {
    let c = match read_input(cfg)? {
        Some((path, text)) => SpreadSet::from_json(&text).map_err(|e| malformed(&path, e))?,
        None => {
            let ctx = LinsetContext::for_q(cfg.q)?;
            desarguesian_spread_set(&ctx.top, &ctx.ext)?
        }
    };
    let flags = validate_spread_set(&c);
    let cover = spread_cover(&c)?;
    let mut r = CensusReport::new("verify-spread");
    r.param("n", c.n as u64)
        .param("field_order", c.field.order())
        .param("members", c.len() as u64)
        .param("source", if cfg.input.is_some() { "input" } else { "desarguesian" });
    r.counts.insert("members".into(), c.len() as u64);
    r.check("flags", serde_json::to_value(flags).expect("flags serialize"))
        .check("partition", cover.partition)
        .check("isotropic", cover.isotropic)
        .check("spread-iff-partition", (flags.spread && flags.full_size) == cover.partition)
        .check("symplectic-iff-isotropic", flags.symplectic == cover.isotropic || !flags.spread);
    if let Some(a) = &cover.affine_plane {
        r.check("affine-plane", a.holds());
    }
    let order = (c.field.order() as u64).checked_pow(c.n as u32);
    if flags.semifield && order.is_some_and(|o| o <= PRESEMIFIELD_BUDGET) {
        let ps = Presemifield::new(&c)?;
        r.check("presemifield-nuclei", serde_json::to_value(ps.nuclei()).expect("serialize"))
            .check("semifield-nuclei", serde_json::to_value(ps.semifield_nuclei()?).expect("serialize"));
    }
    // Over F_{q^2} inside a tower that also holds F_q and F_{q^6}, report the linear set.
    let level = c.field.level();
    if c.n == 3 && flags.semifield && flags.symplectic && level >= 1 {
        if let Ok(ctx) = LinsetContext::from_tower(c.field.tower(), level - 1) {
            let lin = spread_to_linset(&ctx, &c)?;
            r.check("linear-set-is-plane", lin.is_plane());
        }
    }
    Ok(r)
}

const VARS: [&str; 6] = ["x1", "x2", "y1", "y2", "z1", "z2"];

/// `c*x1*y2*z1 + ...` in monomial order; coefficients are field encodings.
pub fn poly_text(p: &Poly) -> String {
    let mut s = String::new();
    for (m, &c) in p {
        if c == 0 {
            continue;
        }
        if !s.is_empty() {
            s.push_str(" + ");
        }
        let mut factors: Vec<String> = Vec::new();
        if c != 1 {
            factors.push(c.to_string());
        }
        for (v, &e) in VARS.iter().zip(m) {
            for _ in 0..e {
                factors.push(v.to_string());
            }
        }
        let _ = write!(s, "{}", factors.join("*"));
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

fn derive(cfg: &CommandConfig) -> Result<CensusReport> {
    let (path, text) =
        read_input(cfg)?.ok_or_else(|| CliError::Usage("derive-fg needs --input <spec.json>".into()))?;
    let spec = LinearSetSpec::from_json(&text).map_err(|e| malformed(&path, e))?;
    let ctx = LinsetContext::for_q(cfg.q)?;
    spec.validate(&ctx).map_err(|e| malformed(&path, e))?;
    let sys = derive_fg(&ctx, &spec)?;
    let mut r = CensusReport::new("derive-fg");
    r.param("q", cfg.q).param("a", spec.a);
    r.check("homogeneous-cubic", sys.is_homogeneous_cubic())
        .check("forbidden-monomials-absent", forbidden_monomials_absent(&ctx.base, &sys))
        .check("closed-form-match", sys == closed_form_fg(&ctx.base, &spec));
    let mut witness = json!({
        "system": sys,
        "f": poly_text(&sys.f),
        "g": poly_text(&sys.g),
    });
    if ctx.q() <= symspread_core::linset::MAX_POINTS_Q {
        let v = disjoint_from_secant(&ctx, &spec)?;
        let zeros = fg_zeros(&ctx.base, &sys)?.len() as u64;
        r.counts.insert("fg-zeros".into(), zeros);
        r.counts.insert("secant-params".into(), v.secant_params);
        r.check("oracle-agreement", zeros == v.secant_params);
        witness["verdict"] = serde_json::to_value(&v).expect("verdict serializes");
    }
    r.witnesses = vec![witness];
    Ok(r)
}

fn selftest() -> Result<CensusReport> {
    let mut r = CensusReport::new("selftest");
    let f4 = Field::new(2, 2)?;
    r.check("f4-inverses", f4.elements().skip(1).all(|x| f4.inv(x).is_ok_and(|y| f4.mul(x, y) == 1)));
    let pn = nucleus_plane(&f4)?;
    r.check("nucleus-point-in-secant", secant_value(&f4, &[0, 0, 0, 1, 1, 1]) == 0)
        .check("nucleus-plane-points", pn.num_points(4) == 21);
    let g3 = GeomContext::for_order(3)?;
    r.check("no-nucleus-plane-odd", nucleus_plane(&g3.base).is_err());

    let ctx = LinsetContext::for_q(2)?;
    r.check(
        "zero-spec-rejected-first",
        first_rejecting_vector(&ctx, &LinearSetSpec::zero(ctx.param.a))? == Some(0),
    );
    let c8 = {
        let t = symspread_core::Tower::new(2, &[1, 3])?;
        desarguesian_spread_set(&t.field(2)?, &t.field(1)?)?
    };
    let n8 = Presemifield::new(&c8)?.nuclei();
    r.check("desarguesian-8-left-nucleus", n8.left_nucleus == 8).check("desarguesian-8-center", n8.center == 8);

    let classify = classify_all_planes(2, &PlaneCensusOptions::default())?;
    r.check(
        "classify-q2-7-7-1",
        classify.count("contained-conic") == 7
            && classify.count("contained-tangent") == 7
            && classify.count("contained-nucleus") == 1,
    );
    let checks = r.checks.len() as u64;
    let passed = r.checks.values().filter(|v| v.as_bool() == Some(true)).count() as u64;
    r.counts.insert("passed".into(), passed);
    r.counts.insert("failed".into(), checks - passed);
    Ok(r)
}
