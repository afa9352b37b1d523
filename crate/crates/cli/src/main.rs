use std::fs;
use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use layerkit::adapt::{ks_adapt, DEFAULT_C0, DEFAULT_MAX_ITER};
use layerkit::diagnostics::{mesh_report, MeshReport};
use layerkit::harness::{convergence_study, dl_robustness_study, ErrorNorm, RateModel, StudyConfig};
use layerkit::mesh::io::{fmt_f64, mesh_from_str, mesh_to_csv, mesh_to_json, to_json};
use layerkit::solver::{manufactured_problem, solve, ProblemKind, Scheme};
use layerkit::{generate, Error, LayerSide, Mesh1D, MeshSpec, Psi};

#[derive(Parser)]
#[command(name = "layerkit", version, about = "Layer-adapted meshes for singularly perturbed two-point problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a mesh.
    Mesh(MeshArgs),
    /// Solve a manufactured problem on a mesh and compare with its exact solution.
    Solve(SolveArgs),
    /// Run a convergence sweep or the Durán–Lombardi robustness table.
    Study(StudyArgs),
    /// Run the adaptive equidistribution loop.
    Adapt(AdaptArgs),
    /// Report quasi-equidistance and admissibility of a mesh file.
    Check(CheckArgs),
}

#[derive(Args, Clone)]
struct MeshParams {
    /// Mesh family, e.g. shishkin, bakhvalov-type, bakhvalov-shishkin, duran-lombardi.
    #[arg(long, default_value = "shishkin")]
    family: String,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long = "N")]
    n: Option<usize>,
    #[arg(long)]
    q: Option<f64>,
    /// Coarse step of the recursive families.
    #[arg(long = "H")]
    h: Option<f64>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
    /// shishkin or bakhvalov-shishkin (S-type family).
    #[arg(long)]
    psi: Option<String>,
    /// left, right or both.
    #[arg(long)]
    side: Option<String>,
    #[arg(long)]
    k_tilde: Option<f64>,
}

#[derive(Args)]
struct MeshArgs {
    #[command(flatten)]
    params: MeshParams,
    /// JSON mesh spec; flags given on the command line override it.
    #[arg(long)]
    config: Option<String>,
    /// Output file, `-` for stdout.
    #[arg(long, default_value = "-")]
    out: String,
    /// json or csv.
    #[arg(long, default_value = "json")]
    format: String,
}

#[derive(Args)]
struct SolveArgs {
    /// cd or rd.
    #[arg(long, default_value = "cd")]
    problem: String,
    #[arg(long)]
    eps: f64,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    /// Mesh file (JSON or CSV) or a family name built with the mesh flags.
    #[arg(long, default_value = "shishkin")]
    mesh: String,
    #[arg(long = "N")]
    n: Option<usize>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long = "H")]
    h: Option<f64>,
    #[arg(long)]
    side: Option<String>,
    /// upwind, conservative-upwind, central or fem.
    #[arg(long, default_value = "upwind")]
    scheme: String,
    /// json or csv.
    #[arg(long, default_value = "csv")]
    out: String,
    /// Write to this file instead of stdout.
    #[arg(long)]
    output: Option<String>,
}

#[derive(Args)]
struct StudyArgs {
    /// JSON study config.
    #[arg(long)]
    config: Option<String>,
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    gamma: Option<f64>,
    /// Comma-separated eps values.
    #[arg(long, value_delimiter = ',')]
    eps: Vec<f64>,
    /// Comma-separated N values.
    #[arg(long = "N", value_delimiter = ',')]
    n: Vec<usize>,
    /// Comma-separated family names.
    #[arg(long, value_delimiter = ',')]
    family: Vec<String>,
    /// Comma-separated schemes.
    #[arg(long, value_delimiter = ',')]
    scheme: Vec<String>,
    /// Comma-separated norms: max, energy.
    #[arg(long, value_delimiter = ',')]
    norm: Vec<String>,
    /// plain-power or log-factor; per-family default otherwise.
    #[arg(long)]
    rate_model: Option<String>,
    /// CSV output path; stdout when neither --csv nor --json is given.
    #[arg(long)]
    csv: Option<String>,
    #[arg(long)]
    json: Option<String>,
    /// Run the Durán–Lombardi eps* table instead of a sweep.
    #[arg(long)]
    robustness: bool,
    #[arg(long = "H", default_value_t = 0.05)]
    h: f64,
    #[arg(long, default_value_t = 1.0)]
    kappa: f64,
}

#[derive(Args)]
struct AdaptArgs {
    #[arg(long, default_value = "cd")]
    problem: String,
    #[arg(long)]
    eps: f64,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long = "N", default_value_t = 128)]
    n: usize,
    #[arg(long, default_value_t = DEFAULT_C0)]
    c0: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    max_iter: usize,
    /// json or csv.
    #[arg(long, default_value = "json")]
    out: String,
    #[arg(long)]
    output: Option<String>,
}

#[derive(Args)]
struct CheckArgs {
    /// Mesh file, JSON or CSV.
    #[arg(long)]
    mesh: String,
    #[arg(long)]
    eps: f64,
    /// Constant of the sufficient admissibility condition.
    #[arg(long = "S", default_value_t = 4.0)]
    s: f64,
}

enum Failure {
    Input(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_input_error() {
            Failure::Input(e.to_string())
        } else {
            Failure::Numerical(e.to_string())
        }
    }
}

type Outcome<T = ()> = Result<T, Failure>;

fn input(msg: impl Into<String>) -> Failure {
    Failure::Input(msg.into())
}

fn read(path: &str) -> Outcome<String> {
    fs::read_to_string(path).map_err(|e| input(format!("cannot read {path}: {e}")))
}

fn emit(path: Option<&str>, text: &str) -> Outcome {
    match path {
        None | Some("-") => {
            print!("{text}");
            Ok(())
        }
        Some(p) => fs::write(p, text).map_err(|e| input(format!("cannot write {p}: {e}"))),
    }
}

fn with_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn parse_kebab<T: serde::de::DeserializeOwned>(what: &str, s: &str) -> Outcome<T> {
    serde_json::from_value(serde_json::Value::String(s.trim().to_ascii_lowercase()))
        .map_err(|_| input(format!("unknown {what} `{s}`")))
}

fn apply_params(mut spec: MeshSpec, p: &MeshParams) -> Outcome<MeshSpec> {
    if let Some(v) = p.eps {
        spec.eps = v;
    }
    if let Some(v) = p.gamma {
        spec.gamma = v;
    }
    if let Some(v) = p.mu {
        spec.mu = v;
    }
    if let Some(v) = p.n {
        spec.n = v;
    }
    if let Some(v) = p.q {
        spec.q = v;
    }
    if p.h.is_some() {
        spec.coarse_step = p.h;
    }
    if let Some(v) = p.kappa {
        spec.kappa = v;
    }
    if let Some(v) = p.theta {
        spec.theta = v;
    }
    if let Some(v) = &p.psi {
        spec.psi = parse_kebab::<Psi>("psi", v)?;
    }
    if let Some(v) = &p.side {
        spec.layer_side = parse_kebab::<LayerSide>("layer side", v)?;
    }
    if let Some(v) = p.k_tilde {
        spec.k_tilde = v;
    }
    Ok(spec)
}

fn run_mesh(a: MeshArgs) -> Outcome {
    let base = match &a.config {
        Some(path) => serde_json::from_str::<MeshSpec>(&read(path)?)
            .map_err(|e| input(format!("bad mesh spec {path}: {e}")))?,
        None => MeshSpec::from_name(&a.params.family)?,
    };
    let spec = apply_params(base, &a.params)?;
    let g = generate(&spec)?;
    if let Some(why) = g.fallback {
        eprintln!("note: uniform fallback ({why:?})");
    }
    let text = match a.format.as_str() {
        "json" => with_newline(mesh_to_json(&spec, &g.mesh)?),
        "csv" => mesh_to_csv(&g.mesh),
        other => return Err(input(format!("unknown format `{other}`, expected json or csv"))),
    };
    emit(Some(&a.out), &text)
}

fn solve_mesh(a: &SolveArgs, kind: ProblemKind) -> Outcome<Mesh1D> {
    if Path::new(&a.mesh).is_file() {
        return Ok(mesh_from_str(&read(&a.mesh)?)?);
    }
    let default_side = match kind {
        ProblemKind::ConvectionDiffusion => None,
        ProblemKind::ReactionDiffusion => Some("both".to_string()),
    };
    let params = MeshParams {
        family: a.mesh.clone(),
        eps: Some(a.eps),
        gamma: Some(a.gamma),
        mu: a.mu,
        n: a.n,
        q: None,
        h: a.h,
        kappa: None,
        theta: None,
        psi: None,
        side: a.side.clone().or(default_side),
        k_tilde: None,
    };
    let spec = apply_params(MeshSpec::from_name(&a.mesh)?, &params)?;
    Ok(generate(&spec)?.mesh)
}

fn run_solve(a: SolveArgs) -> Outcome {
    let kind: ProblemKind = a.problem.parse()?;
    let scheme: Scheme = a.scheme.parse()?;
    let problem = manufactured_problem(kind, a.eps, a.gamma)?;
    let mesh = solve_mesh(&a, kind)?;
    let sol = solve(&problem, &mesh, scheme)?;
    let exact = problem.exact()?;
    let text = match a.out.as_str() {
        "csv" => {
            let mut out = String::from("i,x,u,uexact,err\n");
            for (i, (x, u)) in sol.mesh.nodes().iter().zip(&sol.values).enumerate() {
                let ue = (exact.u)(*x);
                out.push_str(&format!("{i},{},{},{},{}\n", fmt_f64(*x), fmt_f64(*u), fmt_f64(ue), fmt_f64((u - ue).abs())));
            }
            out
        }
        "json" => {
            let uexact: Vec<f64> = sol.mesh.nodes().iter().map(|x| (exact.u)(*x)).collect();
            let value = serde_json::json!({
                "problem": kind.short_name(),
                "eps": a.eps,
                "gamma": a.gamma,
                "scheme": scheme.name(),
                "nodes": sol.mesh.nodes(),
                "u": sol.values,
                "uexact": uexact,
                "error_max": layerkit::solver::error_max(&sol, exact),
            });
            with_newline(to_json(&value)?)
        }
        other => return Err(input(format!("unknown output format `{other}`, expected json or csv"))),
    };
    emit(a.output.as_deref(), &text)
}

fn run_study(a: StudyArgs) -> Outcome {
    let mut cfg = match &a.config {
        Some(path) => StudyConfig::from_json(&read(path)?)?,
        None => StudyConfig::default(),
    };
    if let Some(p) = &a.problem {
        cfg.problem.kind = p.parse()?;
    }
    if let Some(g) = a.gamma {
        cfg.problem.gamma = g;
    }
    if !a.eps.is_empty() {
        cfg.eps = a.eps.clone();
    }
    if !a.n.is_empty() {
        cfg.n = a.n.clone();
    }
    if !a.family.is_empty() {
        cfg.meshes = a.family.iter().map(|f| MeshSpec::from_name(f)).collect::<Result<_, _>>()?;
    }
    if !a.scheme.is_empty() {
        cfg.schemes = a.scheme.iter().map(|s| s.parse()).collect::<Result<_, Error>>()?;
    }
    if !a.norm.is_empty() {
        cfg.norms = a.norm.iter().map(|s| s.parse()).collect::<Result<Vec<ErrorNorm>, Error>>()?;
    }
    if let Some(m) = &a.rate_model {
        cfg.rate_model = Some(parse_kebab::<RateModel>("rate model", m)?);
    }
    if a.csv.is_some() {
        cfg.output.csv = a.csv.clone();
    }
    if a.json.is_some() {
        cfg.output.json = a.json.clone();
    }
    let (csv, json) = if a.robustness {
        let scheme = cfg.schemes.first().copied().unwrap_or(Scheme::Upwind);
        let t = dl_robustness_study(cfg.problem.gamma, a.h, a.kappa, &cfg.eps, scheme)?;
        (t.to_csv(), to_json(&t)?)
    } else {
        let r = convergence_study(&cfg)?;
        for row in r.rows.iter().filter(|r| r.failure.is_some()) {
            eprintln!("{} {} eps={} N={}: {}", row.family, row.scheme.name(), row.eps, row.n, row.failure.as_deref().unwrap_or(""));
        }
        (r.to_csv(), to_json(&r)?)
    };
    if cfg.output.csv.is_none() && cfg.output.json.is_none() {
        return emit(None, &csv);
    }
    if let Some(p) = &cfg.output.csv {
        emit(Some(p), &csv)?;
    }
    if let Some(p) = &cfg.output.json {
        emit(Some(p), &with_newline(json))?;
    }
    Ok(())
}

fn run_adapt(a: AdaptArgs) -> Outcome {
    let kind: ProblemKind = a.problem.parse()?;
    let problem = manufactured_problem(kind, a.eps, a.gamma)?;
    let trace = ks_adapt(&problem, a.n, a.c0, a.max_iter)?;
    let text = match a.out.as_str() {
        "json" => with_newline(to_json(&trace)?),
        "csv" => trace.to_csv(),
        other => return Err(input(format!("unknown output format `{other}`, expected json or csv"))),
    };
    emit(a.output.as_deref(), &text)
}

fn run_check(a: CheckArgs) -> Outcome {
    let mesh = mesh_from_str(&read(&a.mesh)?)?;
    if !(a.eps > 0.0 && a.eps <= 1.0) {
        return Err(input(format!("eps must lie in (0, 1], got {}", a.eps)));
    }
    let report = mesh_report(&mesh, a.eps, a.s);
    println!("{}", to_json(&report)?);
    println!("{}", MeshReport::CSV_HEADER);
    println!("{}", report.csv_row());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Mesh(a) => run_mesh(a),
        Command::Solve(a) => run_solve(a),
        Command::Study(a) => run_study(a),
        Command::Adapt(a) => run_adapt(a),
        Command::Check(a) => run_check(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(2)
        }
    }
}
