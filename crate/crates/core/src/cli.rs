//! Command-line front end.
//!
//! Exit codes: 0 pass, 1 failed check, 2 bad configuration, 3 parameters
//! outside the uniqueness condition, 4 numerical failure.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bie::Quadrature;
use crate::error::{Error, Result};
use crate::solve::{
    admissibility_check, evaluate_field_grid, solve_scattering, Admissibility, GridSpec, IncidentField, LinearSolver, MediumParams,
};
use crate::specfun::Point2;
use crate::surface::{default_margin, make_mesh, make_profile, strip_heights, MeshSpec, ProfileSpec};
use crate::verify::{
    convergence_suite, fresnel_suite, greens_suite, hypersingular_probe, inverse_discrimination_demo, jumps_suite, operator_suite,
    singularity_probe, specfun_suite, InverseOptions, JumpOptions, ProbeMesh, ProbeOptions, ProbeReport, SuiteReport, Table,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INADMISSIBLE: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

/// Seed for the random targets of the operator suite.
pub const OPERATOR_SEED: u64 = 20_240_517;

#[derive(Parser, Debug)]
#[command(name = "roughwave", version, about = "2D acoustic transmission scattering by rough interfaces")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Solve the scenario in a JSON config and write densities, fields and diagnostics.
    Solve {
        config: PathBuf,
        /// output directory (overrides `outputs.dir`)
        #[arg(long)]
        out: Option<PathBuf>,
        /// solve even when the uniqueness condition fails
        #[arg(long)]
        force: bool,
    },
    /// Run a verification suite and write its evidence tables.
    Verify {
        suite: Suite,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long)]
        kp: Option<f64>,
        #[arg(long)]
        km: Option<f64>,
        /// comma-separated N sweep (fresnel, convergence)
        #[arg(long, value_delimiter = ',')]
        n: Option<Vec<usize>>,
    },
    /// Run a singularity probe or the inverse discrimination demo.
    Probe {
        kind: ProbeKind,
        /// scenario config with a `probe` (or `inverse`) block; defaults otherwise
        config: Option<PathBuf>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Suite {
    Greens,
    Specfun,
    Fresnel,
    Jumps,
    Operators,
    Convergence,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ProbeKind {
    Point,
    Hyper,
    Inverse,
}

// ---------------------------------------------------------------------------
// configuration

/// A scattering scenario as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub profile: ProfileConfig,
    pub medium: MediumConfig,
    #[serde(default)]
    pub incidence: Option<IncidentField>,
    pub mesh: MeshSpec,
    #[serde(default)]
    pub solver: LinearSolver,
    #[serde(default)]
    pub outputs: OutputConfig,
    #[serde(default)]
    pub probe: Option<ProbeConfig>,
    #[serde(default)]
    pub inverse: Option<InverseOptions>,
}

/// An inline profile, or a two-column `x,f` spline file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProfileConfig {
    SplineCsv { spline_csv: PathBuf },
    Inline(ProfileSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediumConfig {
    pub k_plus: f64,
    pub k_minus: f64,
    pub mu: f64,
    /// strip margin around `[f_-, f_+]`; a profile-based default when absent
    #[serde(default)]
    pub margin: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub dir: Option<PathBuf>,
    #[serde(default)]
    pub grid: Option<GridSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeConfig {
    #[serde(default)]
    pub x0_param: f64,
    pub delta: f64,
    pub j_max: usize,
    #[serde(default)]
    pub mesh: ProbeMesh,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        // before the admissibility gate, so a bad value reads as a config error
        let m = &cfg.medium;
        for (name, v) in [("k_plus", m.k_plus), ("k_minus", m.k_minus), ("mu", m.mu)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("medium.{name} must be finite and positive, got {v}")));
            }
        }
        Ok(cfg)
    }

    /// SHA-256 of the canonical re-serialisation, so formatting does not
    /// change the hash.
    pub fn sha256(&self) -> String {
        sha256_hex(&serde_json::to_string(self).expect("config serialises"))
    }

    /// The profile with any spline file read in (relative to `base`).
    pub fn profile_spec(&self, base: &Path) -> Result<ProfileSpec> {
        match &self.profile {
            ProfileConfig::Inline(p) => Ok(p.clone()),
            ProfileConfig::SplineCsv { spline_csv } => read_spline(&base.join(spline_csv)),
        }
    }
}

fn sha256_hex(s: &str) -> String {
    let d = Sha256::digest(s.as_bytes());
    d.iter().fold(String::with_capacity(64), |mut acc, b| {
        let _ = write!(acc, "{b:02x}");
        acc
    })
}

fn read_spline(path: &Path) -> Result<ProfileSpec> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let (mut x, mut f) = (vec![], vec![]);
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let num = |k: usize| rec.get(k).and_then(|s| s.parse::<f64>().ok());
        match (num(0), num(1)) {
            (Some(a), Some(b)) => {
                x.push(a);
                f.push(b);
            }
            // tolerate one header row
            _ if i == 0 => {}
            _ => return Err(Error::Config(format!("{}: row {} is not two numbers", path.display(), i + 1))),
        }
    }
    Ok(ProfileSpec::CustomSpline { x, f })
}

// ---------------------------------------------------------------------------
// artifacts

fn header(hash: &str) -> String {
    format!("# roughwave {} config_sha256={hash}\n", env!("CARGO_PKG_VERSION"))
}

#[derive(Serialize)]
struct Meta<'a> {
    tool: &'static str,
    version: &'static str,
    config_sha256: &'a str,
}

fn meta(hash: &str) -> Meta<'_> {
    Meta { tool: "roughwave", version: env!("CARGO_PKG_VERSION"), config_sha256: hash }
}

fn write_file(path: &Path, body: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    fs::write(path, body)?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, hash: &str, body: &T) -> Result<()> {
    #[derive(Serialize)]
    struct Doc<'a, T> {
        meta: Meta<'a>,
        #[serde(flatten)]
        body: &'a T,
    }
    let mut s = serde_json::to_string_pretty(&Doc { meta: meta(hash), body }).map_err(|e| Error::Io(e.to_string()))?;
    s.push('\n');
    write_file(path, &s)
}

fn write_table(dir: &Path, prefix: &str, hash: &str, t: &Table) -> Result<()> {
    write_file(&dir.join(format!("{prefix}_{}.csv", t.name)), &(header(hash) + &t.to_csv()))
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_)
        | Error::InvalidParameter(_)
        | Error::Window(_)
        | Error::DegenerateMesh(_)
        | Error::Io(_)
        | Error::SourceOnSurface { .. }
        | Error::GrazingIncidence { .. }
        | Error::SegmentTooLow { .. } => EXIT_CONFIG,
        Error::Inadmissible(_) => EXIT_INADMISSIBLE,
        _ => EXIT_NUMERIC,
    }
}

fn fail(e: &Error) -> i32 {
    eprintln!("error: {e}");
    exit_code(e)
}

fn load(path: &Path) -> Result<(ScenarioConfig, PathBuf)> {
    let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let cfg = ScenarioConfig::from_json(&text)?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok((cfg, base))
}

// ---------------------------------------------------------------------------
// solve

#[derive(Serialize)]
struct SolveDiagnosticsDoc {
    admissibility: Admissibility,
    forced: bool,
    residual: f64,
    condition_estimate: Option<f64>,
    iterations: usize,
    n: usize,
    window: (f64, f64),
    a_core: f64,
    strip_heights: (f64, f64),
}

pub fn cmd_solve(config: &Path, out: Option<&Path>, force: bool) -> i32 {
    let (cfg, base) = match load(config) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    let hash = cfg.sha256();
    let adm = admissibility_check(cfg.medium.k_plus, cfg.medium.k_minus, cfg.medium.mu);
    if let Admissibility::Inadmissible(reason) = &adm {
        if !force {
            eprintln!("error: inadmissible parameters: {reason} (use --force to solve anyway)");
            return EXIT_INADMISSIBLE;
        }
        eprintln!("warning: inadmissible parameters ({reason}); solving anyway");
    }
    let dir = out.map(Path::to_path_buf).or_else(|| cfg.outputs.dir.as_ref().map(|d| base.join(d))).unwrap_or_else(|| PathBuf::from("."));
    match run_solve(&cfg, &base, &dir, &hash, adm, force) {
        Ok(()) => EXIT_PASS,
        Err(e) => fail(&e),
    }
}

fn run_solve(cfg: &ScenarioConfig, base: &Path, dir: &Path, hash: &str, adm: Admissibility, forced: bool) -> Result<()> {
    let profile = make_profile(&cfg.profile_spec(base)?)?;
    let margin = cfg.medium.margin.unwrap_or_else(|| default_margin(&profile));
    let (hm, hp) = strip_heights(&profile, margin)?;
    let params = MediumParams::new(cfg.medium.k_plus, cfg.medium.k_minus, cfg.medium.mu, hm, hp)?;
    let incident = cfg.incidence.unwrap_or(IncidentField::PlaneWave { d: Point2::new(0.0, -1.0) });
    incident.validate()?;
    let mesh = make_mesh(&profile, &cfg.mesh)?;
    fs::create_dir_all(dir)?;
    let sol = solve_scattering(&mesh, &params, &incident, Quadrature::default(), cfg.solver)?;

    let mut csv = header(hash);
    csv.push_str("x1,x2,weight,phi_re,phi_im,psi_re,psi_im\n");
    for i in 0..mesh.len() {
        let (p, s) = (sol.densities.phi[i], sol.densities.psi[i]);
        let _ = writeln!(csv, "{:e},{:e},{:e},{:e},{:e},{:e},{:e}", mesh.nodes[i].x1, mesh.nodes[i].x2, mesh.weights[i], p.re, p.im, s.re, s.im);
    }
    write_file(&dir.join("densities.csv"), &csv)?;

    if let Some(grid) = &cfg.outputs.grid {
        let samples = evaluate_field_grid(&sol, grid)?;
        let mut csv = header(hash);
        csv.push_str("x1,x2,region,masked,u_re,u_im\n");
        for s in &samples {
            let _ = writeln!(csv, "{:e},{:e},{},{},{:e},{:e}", s.x.x1, s.x.x2, s.region.as_str(), s.masked as u8, s.u.re, s.u.im);
        }
        write_file(&dir.join("field.csv"), &csv)?;
    }

    let d = SolveDiagnosticsDoc {
        admissibility: adm,
        forced,
        residual: sol.diagnostics.residual,
        condition_estimate: sol.diagnostics.condition_estimate,
        iterations: sol.diagnostics.iterations,
        n: mesh.len(),
        window: mesh.window,
        a_core: cfg.mesh.a_core,
        strip_heights: (hm, hp),
    };
    write_json(&dir.join("diagnostics.json"), hash, &d)?;
    println!("solved N = {}: residual {:.3e}, condition estimate {:?}", mesh.len(), d.residual, d.condition_estimate);
    Ok(())
}

// ---------------------------------------------------------------------------
// verify

/// Options of a `verify` run, hashed into its artifacts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub suite: String,
    pub mu: f64,
    pub k_plus: f64,
    pub k_minus: f64,
    pub ns: Vec<usize>,
    pub a: f64,
    pub a_core: f64,
}

impl VerifyOptions {
    pub fn defaults(suite: &str) -> Self {
        Self { suite: suite.into(), mu: 2.0, k_plus: 3.0, k_minus: 1.0, ns: vec![200, 400, 800, 1600], a: 40.0, a_core: 20.0 }
    }
}

/// Run a named suite with the given options.
pub fn run_suite(o: &VerifyOptions) -> Result<SuiteReport> {
    let flat = |o: &VerifyOptions| -> Result<MediumParams> {
        // flat interface at 0: the strip is the default margin around it
        let p = make_profile(&ProfileSpec::Flat { c: 0.0 })?;
        let (hm, hp) = strip_heights(&p, default_margin(&p))?;
        if let Admissibility::Inadmissible(r) = admissibility_check(o.k_plus, o.k_minus, o.mu) {
            return Err(Error::Inadmissible(r));
        }
        MediumParams::new(o.k_plus, o.k_minus, o.mu, hm, hp)
    };
    let down = Point2::new(0.0, -1.0);
    match o.suite.as_str() {
        "greens" => greens_suite(),
        "specfun" => specfun_suite(),
        "jumps" => jumps_suite(&JumpOptions::default()),
        "operators" => operator_suite(800, 10.0, 5, OPERATOR_SEED),
        "fresnel" => fresnel_suite(&flat(o)?, down, &o.ns, o.a, o.a_core),
        "convergence" => {
            let nest = *o.ns.iter().min().ok_or_else(|| Error::Config("empty N sweep".into()))?;
            convergence_suite(&flat(o)?, down, &o.ns, o.a, o.a_core, 2 * nest)
        }
        s => Err(Error::Config(format!("unknown suite {s}"))),
    }
}

fn print_checks(rep: &SuiteReport) {
    for c in &rep.checks {
        println!("{} {:<40} {:>12.4e} {} {:e}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.value, c.relation, c.tolerance);
    }
}

fn cmd_verify(suite: Suite, out: &Path, mu: Option<f64>, kp: Option<f64>, km: Option<f64>, n: Option<Vec<usize>>) -> i32 {
    let name = suite.to_possible_value().expect("named").get_name().to_string();
    let mut o = VerifyOptions::defaults(&name);
    o.mu = mu.unwrap_or(o.mu);
    o.k_plus = kp.unwrap_or(o.k_plus);
    o.k_minus = km.unwrap_or(o.k_minus);
    if let Some(ns) = n {
        o.ns = ns;
    }
    let hash = sha256_hex(&serde_json::to_string(&o).expect("options serialise"));
    let rep = match run_suite(&o) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    print_checks(&rep);
    let write = || -> Result<()> {
        for t in &rep.tables {
            write_table(out, &name, &hash, t)?;
        }
        write_json(&out.join(format!("{name}_report.json")), &hash, &rep)
    };
    if let Err(e) = write() {
        return fail(&e);
    }
    if rep.pass() {
        EXIT_PASS
    } else {
        for c in rep.failures() {
            eprintln!("failed: {} = {:e} (required {} {:e})", c.name, c.value, c.relation, c.tolerance);
        }
        EXIT_CHECK_FAILED
    }
}

// ---------------------------------------------------------------------------
// probe

fn probe_options(cfg: Option<&(ScenarioConfig, PathBuf)>) -> Result<ProbeOptions> {
    let Some((cfg, base)) = cfg else {
        return Ok(ProbeOptions::default());
    };
    let p = cfg.probe.ok_or_else(|| Error::Config("config has no `probe` block".into()))?;
    Ok(ProbeOptions {
        profile: cfg.profile_spec(base)?,
        k_plus: cfg.medium.k_plus,
        k_minus: cfg.medium.k_minus,
        mu: cfg.medium.mu,
        x0_param: p.x0_param,
        delta: p.delta,
        j_max: p.j_max,
        mesh: p.mesh,
    })
}

fn norm_table(r: &ProbeReport) -> Table {
    let mut cols = vec!["j", "h1_remainder", "h1_reference"];
    if r.v_l2.is_some() {
        cols.push("v_l2");
    }
    let mut t = Table::new("norms", &cols);
    for (i, &j) in r.j.iter().enumerate() {
        let mut row = vec![j as f64, r.h1_remainder[i], r.h1_reference[i]];
        if let Some(v) = &r.v_l2 {
            row.push(v[i]);
        }
        t.push(row);
    }
    t
}

#[derive(Serialize)]
struct ProbeFailure<'a> {
    kind: &'a str,
    error: String,
    pass: bool,
}

fn cmd_probe(kind: ProbeKind, config: Option<&Path>, out: &Path) -> i32 {
    let loaded = match config.map(load).transpose() {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    let name = kind.to_possible_value().expect("named").get_name().to_string();
    let result: Result<(String, Box<dyn erased::Report>)> = (|| {
        if kind == ProbeKind::Inverse {
            let o = match &loaded {
                Some((c, _)) => c.inverse.clone().ok_or_else(|| Error::Config("config has no `inverse` block".into()))?,
                None => InverseOptions::default(),
            };
            if let Admissibility::Inadmissible(r) = admissibility_check(o.k_plus, o.k_minus, o.mu) {
                return Err(Error::Inadmissible(r));
            }
            let hash = sha256_hex(&serde_json::to_string(&o).expect("options serialise"));
            return Ok((hash, Box::new(inverse_discrimination_demo(&o)?) as Box<dyn erased::Report>));
        }
        let o = probe_options(loaded.as_ref())?;
        if let Admissibility::Inadmissible(r) = admissibility_check(o.k_plus, o.k_minus, o.mu) {
            return Err(Error::Inadmissible(r));
        }
        let hash = sha256_hex(&serde_json::to_string(&o).expect("options serialise"));
        let r = if kind == ProbeKind::Point { singularity_probe(&o)? } else { hypersingular_probe(&o)? };
        Ok((hash, Box::new(r) as Box<dyn erased::Report>))
    })();
    let (hash, rep) = match result {
        Ok(v) => v,
        Err(e) => {
            // flush what is known so a failed run still leaves a report
            let hash = sha256_hex(&format!("{name}:{e}"));
            let _ = write_json(&out.join(format!("probe_{name}_report.json")), &hash, &ProbeFailure { kind: &name, error: e.to_string(), pass: false });
            return fail(&e);
        }
    };
    for c in rep.checks() {
        println!("{} {:<40} {:>12.4e} {} {:e}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.value, c.relation, c.tolerance);
    }
    let write = || -> Result<()> {
        write_table(out, &format!("probe_{name}"), &hash, &rep.table())?;
        rep.write(&out.join(format!("probe_{name}_report.json")), &hash)
    };
    if let Err(e) = write() {
        return fail(&e);
    }
    if rep.pass() {
        EXIT_PASS
    } else {
        EXIT_CHECK_FAILED
    }
}

mod erased {
    use super::*;
    use crate::verify::{Check, InverseReport};

    /// The common face of the probe and inverse reports.
    pub trait Report {
        fn checks(&self) -> &[Check];
        fn pass(&self) -> bool;
        fn table(&self) -> Table;
        fn write(&self, path: &Path, hash: &str) -> Result<()>;
    }

    impl Report for ProbeReport {
        fn checks(&self) -> &[Check] {
            &self.checks
        }
        fn pass(&self) -> bool {
            self.pass
        }
        fn table(&self) -> Table {
            norm_table(self)
        }
        fn write(&self, path: &Path, hash: &str) -> Result<()> {
            write_json(path, hash, self)
        }
    }

    impl Report for InverseReport {
        fn checks(&self) -> &[Check] {
            &self.checks
        }
        fn pass(&self) -> bool {
            self.pass
        }
        fn table(&self) -> Table {
            let mut t = Table::new("norms", &["j", "reference_h1", "decoy_h1"]);
            for (i, &j) in self.j.iter().enumerate() {
                t.push(vec![j as f64, self.reference_norms[i], self.decoy_norms[i]]);
            }
            t
        }
        fn write(&self, path: &Path, hash: &str) -> Result<()> {
            write_json(path, hash, self)
        }
    }
}

pub fn main() -> i32 {
    crate::par::init_threads_from_env();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_PASS,
                _ => EXIT_CONFIG,
            };
        }
    };
    match cli.cmd {
        Cmd::Solve { config, out, force } => cmd_solve(&config, out.as_deref(), force),
        Cmd::Verify { suite, out, mu, kp, km, n } => cmd_verify(suite, &out, mu, kp, km, n),
        Cmd::Probe { kind, config, out } => cmd_probe(kind, config.as_deref(), &out),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "profile": {"kind": "flat"},
        "medium": {"k_plus": 3, "k_minus": 1, "mu": 2},
        "mesh": {"a": 10, "a_core": 5, "n": 64}
    }"#;

    #[test]
    fn minimal_config_parses_with_defaults() {
        let c = ScenarioConfig::from_json(MINIMAL).unwrap();
        assert_eq!(c.solver, LinearSolver::Lu);
        assert!(c.incidence.is_none() && c.probe.is_none());
        assert_eq!(c.profile, ProfileConfig::Inline(ProfileSpec::Flat { c: 0.0 }));
    }

    #[test]
    fn hash_ignores_formatting() {
        let a = ScenarioConfig::from_json(MINIMAL).unwrap();
        let b = ScenarioConfig::from_json(&MINIMAL.replace(['\n', ' '], "")).unwrap();
        assert_eq!(a.sha256(), b.sha256());
        assert_eq!(a.sha256().len(), 64);
    }

    #[test]
    fn unknown_fields_are_config_errors() {
        let bad = MINIMAL.replace("\"mu\": 2", "\"mu\": 2, \"nu\": 1");
        let e = ScenarioConfig::from_json(&bad).unwrap_err();
        assert_eq!(exit_code(&e), EXIT_CONFIG);
    }

    #[test]
    fn spline_file_profile() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("s.csv"), "x,f\n-2,0\n-1,0.1\n0,0.2\n1,0.1\n2,0\n").unwrap();
        let cfg = MINIMAL.replace(r#"{"kind": "flat"}"#, r#"{"spline_csv": "s.csv"}"#);
        let c = ScenarioConfig::from_json(&cfg).unwrap();
        match c.profile_spec(dir.path()).unwrap() {
            ProfileSpec::CustomSpline { x, f } => {
                assert_eq!(x, vec![-2.0, -1.0, 0.0, 1.0, 2.0]);
                assert_eq!(f[2], 0.2);
            }
            p => panic!("{p:?}"),
        }
    }

    #[test]
    fn error_classes_map_to_exit_codes() {
        assert_eq!(exit_code(&Error::Inadmissible("x".into())), EXIT_INADMISSIBLE);
        assert_eq!(exit_code(&Error::SingularMatrix { pivot: 0.0, scale: 1.0 }), EXIT_NUMERIC);
        assert_eq!(exit_code(&Error::Window("x".into())), EXIT_CONFIG);
    }
}
