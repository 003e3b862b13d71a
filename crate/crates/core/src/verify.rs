//! Seeded identity checks across all modules, run in parallel and reported in id order.

use std::f64::consts::PI;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cgc::{
    bend_identity_residual, highest_weight_residual, identity_decomposition_residual, inclusion_module_map_residual,
    projection_module_map_residual, theta_residual,
};
use crate::error::QError;
use crate::graphinv::{face_invariant, invariant, Cut, MorseDiagram};
use crate::qarith::{as_integer, near_half_integer, RootContext, C64};
use crate::repcat::{
    algebra_relation_residual, duality_residual, intertwiner_residual, positive_curl, twist_exponent, yang_baxter_residual,
    zigzag_residual, Color, RepOperator,
};
use crate::sixj::{
    orthogonality_residual, pentagon_residual, sixj, sixj_by_fusion, symmetry_suite, tet, AdmissibleSixJ, PentagonLabels,
    SixJLabels,
};
use crate::volume::{abs_identity_residual, discriminant_residual, schlafli_residuals, zeta_roots, AngleKind, DihedralAngles};

/// Environment variable read for the worker thread count.
pub const THREADS_ENV: &str = "Q6J_THREADS";

pub const SCHLAFLI_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Qarith,
    Repcat,
    Cgc,
    Sixj,
    Volume,
    Graphinv,
    All,
}

impl FromStr for Suite {
    type Err = QError;
    fn from_str(s: &str) -> Result<Self, QError> {
        Ok(match s {
            "qarith" => Suite::Qarith,
            "repcat" => Suite::Repcat,
            "cgc" => Suite::Cgc,
            "sixj" => Suite::Sixj,
            "volume" => Suite::Volume,
            "graphinv" => Suite::Graphinv,
            "all" => Suite::All,
            _ => return Err(QError::OutOfRange(format!("unknown suite `{s}`"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub id: String,
    /// `None` when the check could not be evaluated; see `error`.
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub seed: u64,
    pub ns: Vec<u32>,
    pub tolerance: f64,
    pub passed: usize,
    pub failed: usize,
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.failed == 0
    }
}

type CheckFn = Box<dyn Fn(&mut ChaCha8Rng) -> Result<f64, QError> + Send + Sync>;

struct Job {
    id: String,
    tol: f64,
    run: CheckFn,
}

fn stream_of(id: &str) -> u64 {
    // FNV-1a, so the stream depends only on the id
    id.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

/// A color `frac + i*im + k` kept away from the half-integers.
pub fn random_color<R: Rng>(rng: &mut R, n: u32) -> C64 {
    C64::new(rng.random_range(0.05..0.45) + rng.random_range(0..n) as f64, rng.random_range(-0.2..0.2))
}

/// Generic 6j labels with every gap in `[0, n-1]` and every label regular.
pub fn random_sixj_labels<R: Rng>(rng: &mut R, ctx: &RootContext) -> SixJLabels {
    let n = ctx.n();
    loop {
        let mut frac = || C64::new(rng.random_range(0.05..0.45), rng.random_range(-0.2..0.2));
        let (a, b, d) = (frac(), frac(), frac());
        let mut k = || rng.random_range(0..n) as f64;
        let e = a + b - k();
        let f = b + d - k();
        let cc = a + f - k();
        let l = SixJLabels::new(a, b, e, d, cc, f);
        if l.checked_gaps(ctx).is_ok() {
            return l;
        }
    }
}

/// Strictly admissible integer labels for a random `n` in `lo..=hi`.
pub fn random_admissible<R: Rng>(rng: &mut R, lo: u32, hi: u32) -> (u32, AdmissibleSixJ) {
    loop {
        let n = rng.random_range(lo.max(4)..=hi);
        let v: Vec<i64> = (0..6).map(|_| rng.random_range(1..n as i64 - 1)).collect();
        let l = AdmissibleSixJ::new(v[0], v[1], v[2], v[3], v[4], v[5]);
        if l.is_strictly_admissible(n) {
            return (n, l);
        }
    }
}

/// Dihedral angles of a hyperideal (truncated) tetrahedron, each in `(0.15, pi/3 - 0.05)`.
pub fn random_truncated_angles<R: Rng>(rng: &mut R) -> DihedralAngles {
    loop {
        let mut t = [0.0; 6];
        for x in t.iter_mut() {
            *x = rng.random_range(0.15..PI / 3.0 - 0.05);
        }
        let ang = DihedralAngles::new(t);
        if matches!(ang.kind(), Ok(AngleKind::Truncated)) && zeta_roots(&ang).is_ok() {
            return ang;
        }
    }
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / (1.0 + b.norm())
}

fn push(jobs: &mut Vec<Job>, id: String, tol: f64, f: impl Fn(&mut ChaCha8Rng) -> Result<f64, QError> + Send + Sync + 'static) {
    jobs.push(Job { id, tol, run: Box::new(f) });
}

fn qarith_jobs(jobs: &mut Vec<Job>, n: u32, s: u64, tol: f64) {
    push(jobs, format!("qarith.sum_identity.n{n:02}.s{s:03}"), tol, move |rng| {
        let ctx = RootContext::new(n)?;
        let (a, b) = (random_color(rng, n), random_color(rng, n));
        let cc = rng.random_range(0..n);
        let sign = if rng.random_bool(0.5) { 1 } else { -1 };
        ctx.cg_sum_identity_residual(a, b, cc, sign)
    });
    push(jobs, format!("qarith.theta_duality.n{n:02}.s{s:03}"), tol, move |rng| {
        let ctx = RootContext::new(n)?;
        let a = random_color(rng, n);
        Ok(rel(ctx.theta(ctx.nf() - 1.0 - a), ctx.theta(a)))
    });
}

fn repcat_jobs(jobs: &mut Vec<Job>, n: u32, s: u64, tol: f64) {
    let ctx_colors = move |rng: &mut ChaCha8Rng| -> Result<(RootContext, Color, Color, Color), QError> {
        let ctx = RootContext::new(n)?;
        Ok((ctx, Color::new(random_color(rng, n)), Color::new(random_color(rng, n)), Color::new(random_color(rng, n))))
    };
    push(jobs, format!("repcat.relations.n{n:02}.s{s:03}"), tol, move |rng| {
        let (ctx, a, _, _) = ctx_colors(rng)?;
        algebra_relation_residual(&ctx, a)
    });
    push(jobs, format!("repcat.r_intertwines.n{n:02}.s{s:03}"), tol, move |rng| {
        let (ctx, a, b, _) = ctx_colors(rng)?;
        intertwiner_residual(&ctx, a, b)
    });
    push(jobs, format!("repcat.yang_baxter.n{n:02}.s{s:03}"), tol, move |rng| {
        let (ctx, a, b, cc) = ctx_colors(rng)?;
        yang_baxter_residual(&ctx, a, b, cc)
    });
    push(jobs, format!("repcat.duality.n{n:02}.s{s:03}"), tol, move |rng| {
        let (ctx, a, _, _) = ctx_colors(rng)?;
        Ok(duality_residual(&ctx, a)?.max(zigzag_residual(&ctx, a)?))
    });
    push(jobs, format!("repcat.curl.n{n:02}.s{s:03}"), tol, move |rng| {
        let (ctx, a, _, _) = ctx_colors(rng)?;
        let want = RepOperator::identity(&ctx, &[a.value]).scale(ctx.xi_pow(2.0 * twist_exponent(&ctx, a.value)));
        Ok(positive_curl(&ctx, a)?.distance(&want) / (1.0 + want.norm()))
    });
}

/// A generic admissible triple `(a, b, c)` with `c = a + b - k`.
fn random_triple(rng: &mut ChaCha8Rng, n: u32) -> (Color, Color, Color) {
    loop {
        let (a, b) = (random_color(rng, n), random_color(rng, n));
        let cc = a + b - rng.random_range(0..n) as f64;
        if !near_half_integer(cc, 0.02) {
            return (Color::new(a), Color::new(b), Color::new(cc));
        }
    }
}

fn cgc_jobs(jobs: &mut Vec<Job>, n: u32, s: u64, tol: f64) {
    push(jobs, format!("cgc.module_map.n{n:02}.s{s:03}"), tol, move |rng| {
        let ctx = RootContext::new(n)?;
        let (a, b, cc) = random_triple(rng, n);
        Ok(inclusion_module_map_residual(&ctx, a, b, cc)?.max(projection_module_map_residual(&ctx, a, b, cc)?))
    });
    push(jobs, format!("cgc.highest_weight.n{n:02}.s{s:03}"), tol, move |rng| {
        let ctx = RootContext::new(n)?;
        let (a, b, cc) = random_triple(rng, n);
        highest_weight_residual(&ctx, a, b, cc)
    });
    push(jobs, format!("cgc.bend.n{n:02}.s{s:03}"), tol, move |rng| {
        let ctx = RootContext::new(n)?;
        let (a, b, cc) = random_triple(rng, n);
        let k = as_integer(a.value + b.value - cc.value).expect("integral by construction");
        let mut worst: f64 = 0.0;
        for u in 0..n {
            for t in 0..n {
                let v = t as i64 + k - u as i64;
                if (0..n as i64).contains(&v) {
                    worst = worst.max(bend_identity_residual(&ctx, a.value, b.value, cc.value, u, v as u32, t)?);
                }
            }
        }
        Ok(worst)
    });
    push(jobs, format!("cgc.theta.n{n:02}.s{s:03}"), tol, move |rng| {
        let ctx = RootContext::new(n)?;
        let (b, cc, a) = random_triple(rng, n);
        Ok(theta_residual(&ctx, a, b, cc)?.1)
    });
    push(jobs, format!("cgc.decomposition.n{n:02}.s{s:03}"), tol, move |rng| {
        let ctx = RootContext::new(n)?;
        loop {
            let (a, b) = (Color::new(random_color(rng, n)), Color::new(random_color(rng, n)));
            match identity_decomposition_residual(&ctx, a, b) {
                Err(QError::HalfIntegerColor(_)) => continue,
                r => return r,
            }
        }
    });
}

fn sixj_jobs(jobs: &mut Vec<Job>, n: u32, s: u64, tol: f64) {
    push(jobs, format!("sixj.formula_vs_fusion.n{n:02}.s{s:03}"), tol, move |rng| {
        let ctx = RootContext::new(n)?;
        let l = random_sixj_labels(rng, &ctx);
        Ok(rel(sixj(&ctx, &l)?, sixj_by_fusion(&ctx, &l)?))
    });
    push(jobs, format!("sixj.orthogonality.n{n:02}.s{s:03}"), tol, move |rng| {
        let ctx = RootContext::new(n)?;
        let SixJLabels { a, b, e, d, c: cc, .. } = random_sixj_labels(rng, &ctx);
        let mut worst: f64 = 0.0;
        for k in 0..n {
            let g = a + b - k as f64;
            let gap = as_integer(d + g - cc);
            if matches!(gap, Some(x) if (0..n as i64).contains(&x)) {
                worst = worst.max(orthogonality_residual(&ctx, a, b, cc, d, e, g)?);
            }
        }
        Ok(worst)
    });
    push(jobs, format!("sixj.pentagon.n{n:02}.s{s:03}"), tol, move |rng| {
        let ctx = RootContext::new(n)?;
        let inside = |g: C64| matches!(as_integer(g), Some(x) if (0..n as i64).contains(&x));
        loop {
            let mut frac = || C64::new(rng.random_range(0.05..0.45), rng.random_range(-0.2..0.2));
            let (j1, j2, j3, j4) = (frac(), frac(), frac(), frac());
            let mut k = || rng.random_range(0..n) as f64;
            let x = j1 + j2 - k();
            let y = x + j3 - k();
            let j = y + j4 - k();
            let r = j3 + j4 - k();
            let q = j2 + r - k();
            if inside(j1 + q - j) && inside(x + r - j) {
                return Ok(pentagon_residual(&ctx, &PentagonLabels { j1, j2, j3, j4, x, y, j, q, r })?.0);
            }
        }
    });
    for i in 0..6 {
        push(jobs, format!("sixj.symmetry{}.n{n:02}.s{s:03}", i + 1), tol, move |rng| {
            let ctx = RootContext::new(n)?;
            let l = random_sixj_labels(rng, &ctx);
            Ok(symmetry_suite(&ctx, &l)?[i])
        });
    }
}

fn volume_jobs(jobs: &mut Vec<Job>, s: u64, tol: f64) {
    push(jobs, format!("volume.discriminant.s{s:03}"), tol, |rng| Ok(discriminant_residual(&random_truncated_angles(rng))));
    push(jobs, format!("volume.abs_identity.s{s:03}"), tol, |rng| {
        let ang = random_truncated_angles(rng);
        let z = zeta_roots(&ang)?;
        Ok(abs_identity_residual(&ang, z.zeta1).max(abs_identity_residual(&ang, -z.zeta2)))
    });
    push(jobs, format!("volume.schlafli.s{s:03}"), SCHLAFLI_TOL, |rng| {
        let ang = random_truncated_angles(rng);
        Ok(schlafli_residuals(&ang)?.into_iter().fold(0.0, f64::max))
    });
}

/// Diagrams used by the graph checks, with the face and tangle models compared on each.
pub const GRAPH_DIAGRAMS: [&str; 5] = ["theta", "tetrahedron", "unknot", "hopf", "trefoil"];

fn graph_jobs(jobs: &mut Vec<Job>, n: u32, s: u64, tol: f64) {
    for name in GRAPH_DIAGRAMS {
        push(jobs, format!("graphinv.{name}.n{n:02}.s{s:03}"), tol, move |rng| {
            let ctx = RootContext::new(n)?;
            let d0 = MorseDiagram::bundled(name)?;
            let d = d0.with_colors(d0.random_coloring(&ctx, rng)?);
            let base = invariant(&ctx, &d, &Cut::At { level: 1, pos: 0 })?;
            let mut worst: f64 = 0.0;
            for e in d.edges() {
                let cut = Cut::Edge(e);
                worst = worst.max(rel(invariant(&ctx, &d, &cut)?, base));
                worst = worst.max(rel(face_invariant(&ctx, &d, &cut, None, 0)?, base));
            }
            if name == "tetrahedron" {
                let c = |e: &str| d.colors[e];
                let t = tet(&ctx, &SixJLabels::new(c("a"), c("b"), c("e"), c("d"), c("c"), c("f")))?;
                worst = worst.max(rel(base, t));
            }
            if name == "theta" {
                worst = worst.max(rel(base, C64::new(1.0, 0.0)));
            }
            Ok(worst)
        });
    }
}

/// Run `suite` for every `n` in `ns` and seeds `1..=seeds`, starting the seed range at `seed`.
pub fn run(suite: Suite, ns: &[u32], seed: u64, seeds: u64, tolerance: f64) -> Result<Report, QError> {
    for &n in ns {
        RootContext::new(n)?;
    }
    let mut jobs = Vec::new();
    let want = |s: Suite| suite == Suite::All || suite == s;
    for s in seed..seed + seeds {
        for &n in ns {
            if want(Suite::Qarith) {
                qarith_jobs(&mut jobs, n, s, tolerance);
            }
            if want(Suite::Repcat) {
                repcat_jobs(&mut jobs, n, s, tolerance);
            }
            if want(Suite::Cgc) {
                cgc_jobs(&mut jobs, n, s, tolerance);
            }
            if want(Suite::Sixj) {
                sixj_jobs(&mut jobs, n, s, tolerance);
            }
            if want(Suite::Graphinv) {
                graph_jobs(&mut jobs, n, s, tolerance);
            }
        }
        if want(Suite::Volume) {
            volume_jobs(&mut jobs, s, tolerance);
        }
    }
    let exec = |jobs: Vec<Job>| -> Vec<CheckResult> {
        jobs.into_par_iter()
            .map(|job| {
                let s: u64 = job.id.rsplit(".s").next().and_then(|x| x.parse().ok()).unwrap_or(seed);
                let mut rng = ChaCha8Rng::seed_from_u64(s);
                rng.set_stream(stream_of(&job.id));
                match (job.run)(&mut rng) {
                    Ok(r) => CheckResult { pass: r.is_finite() && r < job.tol, residual: Some(r), tolerance: job.tol, id: job.id, error: None },
                    Err(e) => CheckResult { id: job.id, residual: None, tolerance: job.tol, pass: false, error: Some(e.to_string()) },
                }
            })
            .collect()
    };
    let mut checks = match std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| QError::OutOfRange(format!("{THREADS_ENV}: {e}")))?
            .install(|| exec(jobs)),
        None => exec(jobs),
    };
    checks.sort_by(|a, b| a.id.cmp(&b.id));
    let passed = checks.iter().filter(|c| c.pass).count();
    Ok(Report { seed, ns: ns.to_vec(), tolerance, passed, failed: checks.len() - passed, checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reports_are_reproducible_and_sorted() {
        let r1 = run(Suite::Qarith, &[3, 4], 1, 2, 1e-8).unwrap();
        let r2 = run(Suite::Qarith, &[3, 4], 1, 2, 1e-8).unwrap();
        assert_eq!(serde_json::to_string(&r1).unwrap(), serde_json::to_string(&r2).unwrap());
        assert!(r1.checks.windows(2).all(|w| w[0].id < w[1].id));
        assert!(r1.all_pass());
    }

    #[test]
    fn each_suite_passes_small() {
        for suite in [Suite::Repcat, Suite::Cgc, Suite::Sixj, Suite::Volume, Suite::Graphinv] {
            let r = run(suite, &[2, 3], 1, 1, 1e-8).unwrap();
            let bad: Vec<_> = r.checks.iter().filter(|c| !c.pass).collect();
            assert!(bad.is_empty(), "{suite:?}: {bad:?}");
        }
    }

    #[test]
    fn tiny_tolerance_fails() {
        let r = run(Suite::Sixj, &[3], 1, 1, 0.0).unwrap();
        assert!(!r.all_pass());
    }

    #[test]
    fn bad_order_is_input_error() {
        assert!(matches!(run(Suite::All, &[1], 1, 1, 1e-8), Err(QError::InvalidOrder(1))));
        assert!("nope".parse::<Suite>().is_err());
    }
}
