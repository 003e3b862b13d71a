use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use quantum6j::cgc::{cgqc, CgcIndex};
use quantum6j::graphinv::{evaluate, kashaev_limit, parse_color, Cut, Model, MorseDiagram};
use quantum6j::sixj::{find_z0, sixj, sixj_by_fusion, tet, tet_admissible, trunc_range, AdmissibleSixJ, SixJLabels};
use quantum6j::verify::{self, Suite, THREADS_ENV};
use quantum6j::volume::{
    asymptotic_ratio, ideal_asymptotic_ratio, ideal_asymptotic_ratio_bar, ideal_labels, ideal_volume, truncated_volume,
    volume_scan, zeta_roots, AngleKind, DihedralAngles,
};
use quantum6j::{LogComplex, QError, RootContext};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "q6j", version, about = "Quantum 6j symbols at roots of unity, graph invariants and volume asymptotics")]
struct Cli {
    /// Order of the root of unity, xi = exp(i pi / n)
    #[arg(long, global = true)]
    n: Option<u32>,
    /// Seed for anything random
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Pass threshold for residual checks
    #[arg(long, global = true, default_value_t = 1e-8)]
    tolerance: f64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Quantum numbers {a}, [a], theta(a) and optionally the binomial [a; b]
    Qnum {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: Option<String>,
    },
    /// One Clebsch-Gordan coefficient C^{a,b,c}_{u,v,t}
    Cgc {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[arg(long, allow_hyphen_values = true)]
        c: String,
        #[arg(long)]
        u: u32,
        #[arg(long)]
        v: u32,
        #[arg(long)]
        t: u32,
    },
    /// The 6j symbol {a b e; d c f}
    Sixj {
        /// Six colors in the order a b e d c f
        #[arg(num_args = 6)]
        labels: Vec<String>,
        /// Also solve the fusion relation numerically and report it
        #[arg(long)]
        fusion: bool,
    },
    /// The tetrahedral symbol tet{a b e; d c f}
    Tet {
        #[arg(num_args = 6)]
        labels: Vec<String>,
        /// Integer labels; use the positive-summand form in log space
        #[arg(long)]
        admissible: bool,
    },
    /// Volume asymptotics
    Volume {
        #[command(subcommand)]
        kind: VolumeCmd,
    },
    /// Invariant of a colored closed diagram
    Invariant {
        /// Path to a diagram JSON file, or the name of a bundled diagram
        #[arg(long)]
        diagram: String,
        /// Use the state-sum (face) model instead of the tangle operator
        #[arg(long)]
        face_model: bool,
        /// Edge to cut along; defaults to the first strand created
        #[arg(long)]
        cut_edge: Option<String>,
        /// Override an edge color, as `edge=base+k`; repeatable
        #[arg(long = "color", allow_hyphen_values = true)]
        colors: Vec<String>,
        /// Report the lambda -> (n-1)/2 limit instead (links only)
        #[arg(long)]
        kashaev: bool,
    },
    /// Run identity checks; exits 1 if any fails
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        /// Root orders to cover when --n is not given
        #[arg(long, value_delimiter = ',', default_value = "2,3,4,5")]
        ns: Vec<u32>,
        /// Number of consecutive seeds starting at --seed
        #[arg(long, default_value_t = 5)]
        seeds: u64,
    },
}

#[derive(Subcommand)]
enum VolumeCmd {
    /// Ideal tetrahedron with angles alpha, beta, gamma
    Ideal {
        #[arg(long, value_delimiter = ',', default_value = "pi/3,pi/3,pi/3")]
        angles: Vec<String>,
    },
    /// Truncated tetrahedron; report the volume and, with --n, the finite-n ratio
    Truncated(AngleArgs),
    /// CSV of ratio against volume over several n
    Scan {
        #[command(flatten)]
        angles: AngleArgs,
        #[arg(long, value_delimiter = ',', default_value = "250,500,1000,2000,4000")]
        ns: Vec<u32>,
    },
}

#[derive(Args)]
struct AngleArgs {
    /// Six dihedral angles in the order a,b,c,d,e,f; `pi/5` style is accepted
    #[arg(long, value_delimiter = ',')]
    angles: Option<Vec<String>>,
    /// One angle for all six edges
    #[arg(long)]
    uniform: Option<String>,
}

/// Failure categories mapped to exit codes.
enum Failure {
    Input(String, String),
    Check(String),
}

impl From<QError> for Failure {
    fn from(e: QError) -> Self {
        Failure::Input(e.code().to_string(), e.to_string())
    }
}

fn input(code: &str, msg: impl Into<String>) -> Failure {
    Failure::Input(code.to_string(), msg.into())
}

fn cx(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn lc(z: LogComplex) -> Value {
    json!({ "logmag": z.log_magnitude, "phase": z.phase })
}

fn parse_angle(s: &str) -> Result<f64, Failure> {
    let t = s.trim().to_ascii_lowercase();
    let bad = || input("BAD_ANGLE", format!("cannot parse angle `{s}`"));
    if let Some(pos) = t.find("pi") {
        let coef = match t[..pos].trim_end_matches('*') {
            "" => 1.0,
            c => c.parse::<f64>().map_err(|_| bad())?,
        };
        let rest = &t[pos + 2..];
        let div = match rest.strip_prefix('/') {
            Some(d) => d.parse::<f64>().map_err(|_| bad())?,
            None if rest.is_empty() => 1.0,
            None => return Err(bad()),
        };
        Ok(coef * PI / div)
    } else {
        t.parse().map_err(|_| bad())
    }
}

fn angles(a: &AngleArgs) -> Result<DihedralAngles, Failure> {
    match (&a.angles, &a.uniform) {
        (Some(v), None) => {
            if v.len() != 6 {
                return Err(input("BAD_ANGLE", format!("expected 6 angles, got {}", v.len())));
            }
            let mut t = [0.0; 6];
            for (x, s) in t.iter_mut().zip(v) {
                *x = parse_angle(s)?;
            }
            Ok(DihedralAngles::new(t))
        }
        (None, Some(u)) => Ok(DihedralAngles::uniform(parse_angle(u)?)),
        _ => Err(input("BAD_ANGLE", "give exactly one of --angles and --uniform")),
    }
}

fn need_n(n: Option<u32>) -> Result<RootContext, Failure> {
    let n = n.ok_or_else(|| input("MISSING_ARGUMENT", "--n is required"))?;
    Ok(RootContext::new(n)?)
}

fn colors(v: &[String]) -> Result<Vec<Complex64>, Failure> {
    v.iter().map(|s| parse_color(s).map_err(Failure::from)).collect()
}

fn integer_labels(v: &[String]) -> Result<AdmissibleSixJ, Failure> {
    let x: Vec<i64> = v
        .iter()
        .map(|s| s.parse::<i64>().map_err(|_| input("BAD_LABEL", format!("`{s}` is not an integer label"))))
        .collect::<Result<_, _>>()?;
    Ok(AdmissibleSixJ::new(x[0], x[1], x[2], x[3], x[4], x[5]))
}

fn load_diagram(spec: &str) -> Result<MorseDiagram, Failure> {
    if std::path::Path::new(spec).exists() {
        let text = std::fs::read_to_string(spec).map_err(|e| input("IO", format!("{spec}: {e}")))?;
        Ok(MorseDiagram::from_json(&text)?)
    } else {
        Ok(MorseDiagram::bundled(spec)?)
    }
}

fn run(cli: Cli) -> Result<Option<Value>, Failure> {
    let out = match cli.cmd {
        Cmd::Qnum { a, b } => {
            let ctx = need_n(cli.n)?;
            let a = parse_color(&a)?;
            let mut v = json!({
                "n": ctx.n(),
                "xi": cx(ctx.xi()),
                "a": cx(a),
                "brace": cx(ctx.qbrace(a)),
                "qint": cx(ctx.qint(a)),
                "theta": cx(ctx.theta(a)),
            });
            if let Some(b) = b {
                let b = parse_color(&b)?;
                v["b"] = cx(b);
                v["qbinom"] = cx(ctx.qbinom(a, b)?);
            }
            v
        }
        Cmd::Cgc { a, b, c, u, v, t } => {
            let ctx = need_n(cli.n)?;
            let (a, b, c) = (parse_color(&a)?, parse_color(&b)?, parse_color(&c)?);
            let value = cgqc(&ctx, CgcIndex { a, b, c, u, v, t })?;
            json!({ "n": ctx.n(), "a": cx(a), "b": cx(b), "c": cx(c), "u": u, "v": v, "t": t, "value": cx(value) })
        }
        Cmd::Sixj { labels, fusion } => {
            let ctx = need_n(cli.n)?;
            let c = colors(&labels)?;
            let l = SixJLabels::new(c[0], c[1], c[2], c[3], c[4], c[5]);
            let mut v = json!({
                "n": ctx.n(),
                "labels": c.iter().map(|&z| cx(z)).collect::<Vec<_>>(),
                "sixj": cx(sixj(&ctx, &l)?),
                "tet": cx(tet(&ctx, &l)?),
            });
            if fusion {
                v["fusion"] = cx(sixj_by_fusion(&ctx, &l)?);
            }
            v
        }
        Cmd::Tet { labels, admissible } => {
            let ctx = need_n(cli.n)?;
            if admissible {
                let l = integer_labels(&labels)?;
                l.validate(ctx.n())?;
                let (lo, hi) = trunc_range(ctx.n(), &l);
                json!({
                    "n": ctx.n(),
                    "labels": [l.a, l.b, l.e, l.d, l.c, l.f],
                    "tet": lc(tet_admissible(&ctx, &l, true)?),
                    "z0": find_z0(&ctx, &l)?,
                    "range": [lo, hi],
                })
            } else {
                let c = colors(&labels)?;
                let l = SixJLabels::new(c[0], c[1], c[2], c[3], c[4], c[5]);
                json!({ "n": ctx.n(), "labels": c.iter().map(|&z| cx(z)).collect::<Vec<_>>(), "tet": cx(tet(&ctx, &l)?) })
            }
        }
        Cmd::Volume { kind } => match kind {
            VolumeCmd::Ideal { angles } => {
                if angles.len() != 3 {
                    return Err(input("BAD_ANGLE", format!("expected 3 angles, got {}", angles.len())));
                }
                let t: Vec<f64> = angles.iter().map(|s| parse_angle(s)).collect::<Result<_, _>>()?;
                let volume = ideal_volume(t[0], t[1], t[2])?;
                let mut v = json!({ "angles": t, "volume": volume });
                if let Some(n) = cli.n {
                    let ctx = RootContext::new(n)?;
                    let [a, b, c] = ideal_labels(n, t[0], t[1], t[2]);
                    let ratio = ideal_asymptotic_ratio(&ctx, a, b, c)?;
                    v["n"] = json!(n);
                    v["labels"] = json!([a, b, c]);
                    v["ratio"] = json!(ratio);
                    v["ratio_bar"] = json!(ideal_asymptotic_ratio_bar(&ctx, a, b, c)?);
                    v["gap"] = json!((ratio - volume).abs());
                }
                v
            }
            VolumeCmd::Truncated(a) => {
                let ang = angles(&a)?;
                let kind = ang.kind()?;
                let volume = truncated_volume(&ang)?;
                let mut v = json!({
                    "angles": ang.theta,
                    "kind": if kind == AngleKind::Ideal { "ideal" } else { "truncated" },
                    "volume": volume,
                });
                if kind == AngleKind::Truncated {
                    let z = zeta_roots(&ang)?;
                    v["zeta1"] = json!(z.zeta1);
                    v["zeta2"] = json!(z.zeta2);
                }
                if let Some(n) = cli.n {
                    let ctx = RootContext::new(n)?;
                    let l = ang.labels(n);
                    let r = asymptotic_ratio(&ctx, &l)?;
                    v["n"] = json!(n);
                    v["labels"] = json!([l.a, l.b, l.e, l.d, l.c, l.f]);
                    v["ratio"] = json!(r.ratio);
                    v["bounds"] = json!([r.lower, r.upper]);
                    v["gap"] = json!((r.ratio - volume).abs());
                }
                v
            }
            VolumeCmd::Scan { angles: a, ns } => {
                let ang = angles(&a)?;
                let rows = volume_scan(&ang, &ns)?;
                let mut s = String::from("n,ratio,volume,gap,warn\n");
                let opt = |x: Option<f64>| x.map(|v| format!("{v:.12}")).unwrap_or_default();
                for r in rows {
                    s.push_str(&format!("{},{},{:.12},{},{}\n", r.n, opt(r.ratio), r.volume, opt(r.gap), r.warn));
                }
                print!("{s}");
                return Ok(None);
            }
        },
        Cmd::Invariant { diagram, face_model, cut_edge, colors: overrides, kashaev } => {
            let ctx = need_n(cli.n)?;
            let mut d = load_diagram(&diagram)?;
            let mut cols = d.colors.clone();
            for o in &overrides {
                let (e, c) = o.split_once('=').ok_or_else(|| input("BAD_COLOR", format!("`{o}` must look like edge=color")))?;
                if !d.edges().iter().any(|x| x == e) {
                    return Err(input("DIAGRAM", format!("no edge `{e}` in {}", d.name)));
                }
                cols.insert(e.to_string(), parse_color(c)?);
            }
            d = d.with_colors(cols);
            let cut = match cut_edge {
                Some(e) => Cut::Edge(e),
                None => Cut::At { level: 1, pos: 0 },
            };
            let model = if face_model { Model::Face } else { Model::Tangle };
            let color_map: BTreeMap<&String, Value> = d.colors.iter().map(|(k, v)| (k, cx(*v))).collect();
            if kashaev {
                let k = kashaev_limit(&ctx, &d, &cut)?;
                json!({ "value": cx(k.value), "model": "kashaev", "n": ctx.n(), "spread": k.spread,
                        "epsilons": k.epsilons, "samples": k.samples.iter().map(|&z| cx(z)).collect::<Vec<_>>() })
            } else {
                json!({ "value": cx(evaluate(&ctx, &d, &cut, model)?), "model": model, "n": ctx.n(), "colors": color_map })
            }
        }
        Cmd::Verify { suite, ns, seeds } => {
            let suite: Suite = suite.parse()?;
            let ns = cli.n.map(|n| vec![n]).unwrap_or(ns);
            let report = verify::run(suite, &ns, cli.seed, seeds, cli.tolerance)?;
            let v = serde_json::to_value(&report).expect("report serializes");
            if !report.all_pass() {
                println!("{v}");
                return Err(Failure::Check(format!("{} of {} checks failed", report.failed, report.checks.len())));
            }
            v
        }
    };
    Ok(Some(out))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let first = e.to_string().lines().next().unwrap_or("").trim_start_matches("error: ").to_string();
            eprintln!("error code=USAGE message={first:?}");
            return ExitCode::from(2);
        }
    };
    if let Ok(t) = std::env::var(THREADS_ENV) {
        let threads = t.parse::<usize>().ok().filter(|&x| x > 0);
        match threads {
            Some(k) => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
            }
            None => {
                eprintln!("error code=BAD_ENV message={:?}", format!("{THREADS_ENV} must be a positive integer, got `{t}`"));
                return ExitCode::from(2);
            }
        }
    }
    match run(cli) {
        Ok(Some(v)) => {
            let mut out = std::io::stdout().lock();
            let _ = writeln!(out, "{v}");
            ExitCode::SUCCESS
        }
        Ok(None) => ExitCode::SUCCESS,
        Err(Failure::Input(code, msg)) => {
            eprintln!("error code={code} message={msg:?}");
            ExitCode::from(2)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("error code=CHECK_FAILED message={msg:?}");
            ExitCode::from(1)
        }
    }
}
