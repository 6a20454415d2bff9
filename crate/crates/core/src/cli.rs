//! Command-line front end.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::arith::Rational;
use crate::examples::builtin_example;
use crate::fans::Fan;
use crate::moment::{
    classify_setup, ClassificationReport, ConvexityReport, LvmbCheck, LvmbData, MomentModel, QuotientData, Setup,
    Verdict,
};
use crate::polytope::{enumerate_vertices, normal_fan, PolytopeDoc};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NOT_LVM: i32 = 2;
pub const EXIT_NOT_LVMB: i32 = 3;
pub const EXIT_HARNESS: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "lvmb", version, about = "Polytopality of quotient fans and moment-map convexity checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Number of sampled points for verify-convexity.
    #[arg(long, global = true, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Tolerance for floating-point checks.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Include wall-clock runtimes (makes reports non-reproducible).
    #[arg(long, global = true)]
    pub timings: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the two LVMB conditions.
    Check { input: String },
    /// Decide LVM / LVMB-not-LVM / not-LVMB.
    Classify { input: String },
    /// Print the normal polytope P.
    Polytope { input: String },
    /// Normal fan of a polytope file, or of P for LVMB data.
    NormalFan { input: String },
    /// Sample the level set and check the convexity statements.
    VerifyConvexity { input: String },
    /// Print a built-in data set as JSON input.
    Example { name: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// A rendered report and the process exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub report: String,
}

#[derive(Debug, thiserror::Error)]
pub enum InputError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: String, source: serde_json::Error },
    #[error(transparent)]
    Example(#[from] crate::examples::UnknownExample),
    #[error("{0}")]
    Polytope(String),
}

/// `example:NAME` names a built-in data set; anything else is a file path.
pub fn load_text(input: &str) -> Result<String, InputError> {
    match input.strip_prefix("example:") {
        Some(name) => Ok(serde_json::to_string(&builtin_example(name)?).expect("data serializes")),
        None => std::fs::read_to_string(input).map_err(|source| InputError::Read { path: input.to_string(), source }),
    }
}

pub fn load_data(input: &str) -> Result<LvmbData, InputError> {
    let text = load_text(input)?;
    serde_json::from_str(&text).map_err(|source| InputError::Parse { path: input.to_string(), source })
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    command: &'a str,
    input: &'a str,
    #[serde(flatten)]
    body: T,
    #[serde(skip_serializing_if = "Option::is_none")]
    runtime_ms: Option<f64>,
}

#[derive(Serialize)]
struct ErrorBody {
    error: String,
}

#[derive(Serialize)]
struct CheckBody<'a> {
    lvmb_ok: bool,
    lvmb: &'a LvmbCheck,
    quotient: &'a QuotientData,
    #[serde(skip_serializing_if = "Option::is_none")]
    quotient_fan: Option<&'a Fan>,
}

#[derive(Serialize)]
struct PolytopeBody<'a> {
    verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    polytope: Option<&'a PolytopeDoc>,
}

#[derive(Serialize)]
struct NormalFanBody {
    #[serde(skip_serializing_if = "Option::is_none")]
    verdict: Option<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    polytope: Option<PolytopeDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    normal_fan: Option<Fan>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Serialize)]
struct ConvexityBody {
    verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    harness: Option<ConvexityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Serialize)]
struct ExampleBody {
    data: LvmbData,
}

fn verdict_code(v: Verdict) -> i32 {
    match v {
        Verdict::Lvm => EXIT_OK,
        Verdict::LvmbNotLvm => EXIT_NOT_LVM,
        Verdict::NotLvmb => EXIT_NOT_LVMB,
    }
}

struct Ctx<'a> {
    cli: &'a Cli,
    command: &'a str,
    input: &'a str,
    start: Instant,
}

impl Ctx<'_> {
    fn emit<T: Serialize>(&self, code: i32, body: T, text: impl FnOnce(&mut String)) -> Outcome {
        let runtime_ms = self.cli.timings.then(|| self.start.elapsed().as_secs_f64() * 1e3);
        let report = match self.cli.format {
            Format::Json => {
                let env = Envelope { command: self.command, input: self.input, body, runtime_ms };
                let mut s = serde_json::to_string_pretty(&env).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Text => {
                let mut s = String::new();
                text(&mut s);
                if let Some(ms) = runtime_ms {
                    let _ = writeln!(s, "runtime: {ms:.3} ms");
                }
                s
            }
        };
        Outcome { code, report }
    }

    fn error(&self, e: &dyn std::fmt::Display) -> Outcome {
        let msg = e.to_string();
        log::error!("{msg}");
        self.emit(EXIT_INPUT, ErrorBody { error: msg.clone() }, |s| {
            let _ = writeln!(s, "error: {msg}");
        })
    }
}

pub fn run(cli: &Cli) -> Outcome {
    let (command, input) = match &cli.command {
        Command::Check { input } => ("check", input.as_str()),
        Command::Classify { input } => ("classify", input.as_str()),
        Command::Polytope { input } => ("polytope", input.as_str()),
        Command::NormalFan { input } => ("normal-fan", input.as_str()),
        Command::VerifyConvexity { input } => ("verify-convexity", input.as_str()),
        Command::Example { name } => ("example", name.as_str()),
    };
    let ctx = Ctx { cli, command, input, start: Instant::now() };
    match &cli.command {
        Command::Example { name } => match builtin_example(name) {
            Ok(data) => {
                let json = serde_json::to_string_pretty(&data).expect("data serializes");
                ctx.emit(EXIT_OK, ExampleBody { data }, |s| {
                    let _ = writeln!(s, "{json}");
                })
            }
            Err(e) => ctx.error(&e),
        },
        Command::NormalFan { .. } => run_normal_fan(&ctx),
        _ => match load_data(input) {
            Err(e) => ctx.error(&e),
            Ok(data) => {
                let setup = Setup::new(&data);
                match &cli.command {
                    Command::Check { .. } => run_check(&ctx, &setup),
                    Command::Classify { .. } => run_classify(&ctx, &setup),
                    Command::Polytope { .. } => run_polytope(&ctx, &setup),
                    Command::VerifyConvexity { .. } => run_verify(&ctx, &setup),
                    _ => unreachable!(),
                }
            }
        },
    }
}

fn run_check(ctx: &Ctx, setup: &Setup) -> Outcome {
    let c = &setup.check;
    let code = if c.ok { EXIT_OK } else { EXIT_NOT_LVMB };
    let body = CheckBody { lvmb_ok: c.ok, lvmb: c, quotient: &setup.quotient, quotient_fan: setup.quotient_fan() };
    ctx.emit(code, body, |s| {
        let _ = writeln!(s, "LVMB conditions: {}", if c.ok { "hold" } else { "fail" });
        text_check(s, c);
        text_quotient(s, &setup.quotient, setup.quotient_fan());
    })
}

fn run_classify(ctx: &Ctx, setup: &Setup) -> Outcome {
    let r = classify_setup(setup);
    ctx.emit(verdict_code(r.verdict), &r, |s| text_classification(s, &r))
}

fn run_polytope(ctx: &Ctx, setup: &Setup) -> Outcome {
    let r = classify_setup(setup);
    let body = PolytopeBody { verdict: r.verdict, polytope: r.polytope.as_ref() };
    ctx.emit(verdict_code(r.verdict), body, |s| {
        let _ = writeln!(s, "verdict: {}", r.verdict);
        match &r.polytope {
            Some(p) => text_polytope(s, p),
            None => {
                let _ = writeln!(s, "no normal polytope");
            }
        }
    })
}

fn run_normal_fan(ctx: &Ctx) -> Outcome {
    let text = match load_text(ctx.input) {
        Ok(t) => t,
        Err(e) => return ctx.error(&e),
    };
    let is_polytope = serde_json::from_str::<serde_json::Value>(&text)
        .map(|v| v.get("normals").is_some())
        .unwrap_or(false);
    let (verdict, doc) = if is_polytope {
        match serde_json::from_str::<PolytopeDoc>(&text) {
            Ok(d) => (None, d),
            Err(source) => return ctx.error(&InputError::Parse { path: ctx.input.to_string(), source }),
        }
    } else {
        let data = match serde_json::from_str::<LvmbData>(&text) {
            Ok(d) => d,
            Err(source) => return ctx.error(&InputError::Parse { path: ctx.input.to_string(), source }),
        };
        let r = classify_setup(&Setup::new(&data));
        match r.polytope {
            Some(p) => (Some(r.verdict), p),
            None => {
                let body = NormalFanBody { verdict: Some(r.verdict), polytope: None, normal_fan: None, error: None };
                return ctx.emit(verdict_code(r.verdict), body, |s| {
                    let _ = writeln!(s, "verdict: {}", r.verdict);
                    let _ = writeln!(s, "no normal polytope");
                });
            }
        }
    };
    let poly = match doc.polytope() {
        Ok(p) => p,
        Err(e) => return ctx.error(&InputError::Polytope(e.to_string())),
    };
    match normal_fan(&poly) {
        Ok(fan) => {
            let doc = if doc.vertices.is_some() {
                doc
            } else {
                let verts = enumerate_vertices(&poly).into_iter().map(|(v, _)| v).collect();
                PolytopeDoc::from_polytope(&poly, Some(verts))
            };
            let body = NormalFanBody { verdict, polytope: Some(doc.clone()), normal_fan: Some(fan.clone()), error: None };
            ctx.emit(EXIT_OK, body, |s| {
                if let Some(v) = verdict {
                    let _ = writeln!(s, "verdict: {v}");
                }
                text_polytope(s, &doc);
                text_fan(s, "normal fan", &fan);
            })
        }
        Err(e) => ctx.error(&InputError::Polytope(format!("normal fan unavailable: {e}"))),
    }
}

fn run_verify(ctx: &Ctx, setup: &Setup) -> Outcome {
    let r = classify_setup(setup);
    let Some(offsets) = r.offsets() else {
        let body = ConvexityBody { verdict: r.verdict, harness: None, error: None };
        return ctx.emit(verdict_code(r.verdict), body, |s| {
            let _ = writeln!(s, "verdict: {}; convexity harness needs LVM", r.verdict);
        });
    };
    let model = match MomentModel::new(setup, offsets) {
        Ok(m) => m,
        Err(e) => {
            let msg = e.to_string();
            let body = ConvexityBody { verdict: r.verdict, harness: None, error: Some(msg.clone()) };
            return ctx.emit(EXIT_HARNESS, body, |s| {
                let _ = writeln!(s, "harness error: {msg}");
            });
        }
    };
    let t0 = Instant::now();
    let mut h = crate::moment::verify_model(&model, ctx.cli.samples, ctx.cli.seed, ctx.cli.tol);
    if ctx.cli.timings {
        h.runtime_ms = Some(t0.elapsed().as_secs_f64() * 1e3);
    }
    let code = if h.pass { EXIT_OK } else { EXIT_HARNESS };
    let body = ConvexityBody { verdict: r.verdict, harness: Some(h.clone()), error: None };
    ctx.emit(code, body, |s| text_convexity(s, &h))
}

fn pass(b: bool) -> &'static str {
    if b {
        "pass"
    } else {
        "FAIL"
    }
}

fn vec_str(v: &[Rational]) -> String {
    let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(", "))
}

fn text_check(s: &mut String, c: &LvmbCheck) {
    let c1 = &c.condition1;
    let _ = writeln!(
        s,
        "condition (1), p injective on h: {} (dim p(h) = {}, expected {})",
        if c1.holds { "holds" } else { "fails" },
        c1.ph_dim,
        c1.expected_dim
    );
    if let Some(w) = &c1.witness {
        let coeffs: Vec<String> = w.coefficients.iter().map(|z| format!("{z:?}")).collect();
        let elem: Vec<String> = w.element.iter().map(|z| format!("{z:?}")).collect();
        let _ = writeln!(s, "  witness coefficients [{}], element [{}] with p(element) = 0", coeffs.join(", "), elem.join(", "));
    }
    let c2 = &c.condition2;
    let _ = writeln!(
        s,
        "condition (2), q(Delta) a complete fan: {} (quotient dimension {})",
        if c2.holds { "holds" } else { "fails" },
        c2.quotient_dim
    );
    if let Some(v) = &c2.violation {
        let _ = writeln!(s, "  not a fan: {v}");
    }
    if let Some(complete) = c2.complete {
        let _ = writeln!(s, "  complete by wall criterion: {complete}; sampled cover: {}", c2.sampled_cover.unwrap_or(false));
    }
    if !c.ambient_nonsingular {
        let _ = writeln!(s, "note: ambient fan is singular");
    }
}

fn text_quotient(s: &mut String, q: &QuotientData, fan: Option<&Fan>) {
    let rows: Vec<String> = q.ph.row_vecs().iter().map(|r| vec_str(r)).collect();
    let _ = writeln!(s, "g_J = p(h) basis: [{}]", rows.join(", "));
    let rows: Vec<String> = q.q.row_vecs().iter().map(|r| vec_str(r)).collect();
    let _ = writeln!(s, "quotient map q rows: [{}]", rows.join(", "));
    if let Some(f) = fan {
        text_fan(s, "quotient fan", f);
    }
}

fn text_fan(s: &mut String, name: &str, f: &Fan) {
    let rays: Vec<String> = f.rays().iter().map(|r| format!("{r:?}")).collect();
    let cones: Vec<String> = f.maximal_cones().iter().map(|c| format!("{:?}", c.ray_ids())).collect();
    let _ = writeln!(s, "{name}: dimension {}, rays [{}], maximal cones [{}]", f.ambient_dim(), rays.join(", "), cones.join(", "));
}

fn text_polytope(s: &mut String, p: &PolytopeDoc) {
    let _ = writeln!(s, "polytope P in dimension {} (coordinates of q):", p.dim);
    for (n, a) in p.normals.iter().zip(&p.offsets) {
        let _ = writeln!(s, "  <alpha, {}> >= {a}", vec_str(n));
    }
    if let Some(vs) = &p.vertices {
        let _ = writeln!(s, "vertices:");
        for v in vs {
            let _ = writeln!(s, "  {}", vec_str(v));
        }
    }
}

fn text_classification(s: &mut String, r: &ClassificationReport) {
    let _ = writeln!(s, "verdict: {}", r.verdict);
    text_check(s, &r.lvmb);
    text_quotient(s, &r.quotient, r.quotient_fan.as_ref());
    if let Some(sup) = &r.support {
        let _ = writeln!(
            s,
            "support LP: t* = {} after {} pivots, certificate {}",
            sup.t_star,
            sup.certificate.pivots,
            if sup.certificate_verified { "verified" } else { "REJECTED" }
        );
        if let Some(ob) = &sup.obstruction {
            let _ = writeln!(
                s,
                "with t >= 1: {:?}, Farkas certificate {}",
                ob.status,
                if sup.obstruction_verified == Some(true) { "verified" } else { "REJECTED" }
            );
        }
    }
    if let Some(p) = &r.polytope {
        text_polytope(s, p);
    }
    if let Some(n) = &r.normality {
        let _ = writeln!(s, "normal fan of P equals q(Delta): {}", n.normal);
        for d in &n.diagnostics {
            let _ = writeln!(s, "  {d}");
        }
    }
}

fn text_convexity(s: &mut String, h: &ConvexityReport) {
    let _ = writeln!(s, "convexity harness: {} (samples {}, seed {}, tol {:e})", pass(h.pass), h.samples, h.seed, h.tol);
    if let Some(e) = &h.sampling_error {
        let _ = writeln!(s, "sampling error: {e}");
    }
    let _ = writeln!(s, "max P-membership violation: {:e} {}", h.membership.max, pass(h.membership.pass));
    let _ = writeln!(s, "max lift residual: {:e} {}", h.lift_residual.max, pass(h.lift_residual.pass));
    let _ = writeln!(s, "max level residual: {:e} {}", h.level_residual.max, pass(h.level_residual.pass));
    let v = &h.vertices;
    let _ = writeln!(
        s,
        "vertex images: {} ({} images, match enumeration {}, facets tight {}, normal {})",
        pass(v.pass),
        v.images.len(),
        v.match_vertices,
        v.facets_tight,
        v.normality.normal
    );
    for i in &v.images {
        let _ = writeln!(s, "  cone {:?} zeros {:?} -> {}", i.cone.ray_ids(), i.zero_labels, vec_str(&i.image));
    }
    let ok = h.directions.iter().filter(|d| d.pass).count();
    let _ = writeln!(s, "directions: {ok}/{} pass", h.directions.len());
    for d in &h.directions {
        let sampled = d.sampled_min.map_or("none".to_string(), |x| format!("{x:e}"));
        let _ = writeln!(
            s,
            "  v {:?} q(v) {} lp min {} sampled min {} face {:?} {}",
            d.v,
            vec_str(&d.qv),
            d.lp_min,
            sampled,
            d.tight_set,
            pass(d.pass)
        );
    }
    let ok = h.kernel_directions.iter().filter(|k| k.pass).count();
    let _ = writeln!(s, "kernel directions: {ok}/{} pass", h.kernel_directions.len());
    for k in &h.kernel_directions {
        let _ = writeln!(s, "  w {} spread {:e} deviation {:e} {}", vec_str(&k.w), k.spread, k.max_deviation, pass(k.pass));
    }
}

/// Parse arguments, run, write the report; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let out = run(&cli);
    match &cli.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &out.report) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return EXIT_INPUT;
            }
        }
        None => print!("{}", out.report),
    }
    if out.code == EXIT_INPUT && cli.output.is_none() && cli.format == Format::Json {
        eprintln!("error: see report");
    }
    out.code
}
