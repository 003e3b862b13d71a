//! One line per acceptance criterion; exits nonzero if any criterion fails.

use std::f64::consts::PI;
use std::time::Instant;

use quantum6j::graphinv::{face_invariant, invariant, kashaev_limit, Cut, MorseDiagram};
use quantum6j::sixj::{find_z0, tet, tet_admissible, trunc_log_terms, trunc_terms, SixJLabels};
use quantum6j::verify::{self, random_admissible, random_truncated_angles, Suite, GRAPH_DIAGRAMS};
use quantum6j::volume::{
    abs_identity_residual, asymptotic_ratio, discriminant_residual, ideal_asymptotic_ratio, ideal_asymptotic_ratio_bar,
    ideal_labels, lobachevsky, schlafli_residuals, truncated_volume, zeta_roots, DihedralAngles,
};
use quantum6j::{RootContext, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / (1.0 + b.norm())
}

fn identity_suites() -> Outcome {
    let t = Instant::now();
    let mut total = 0;
    let mut worst: f64 = 0.0;
    for suite in [Suite::Qarith, Suite::Repcat, Suite::Cgc, Suite::Sixj] {
        let r = verify::run(suite, &[2, 3, 4, 5], 1, 5, 1e-8).map_err(|e| e.to_string())?;
        if let Some(bad) = r.checks.iter().find(|c| !c.pass) {
            return Err(format!("{} residual {:?} {:?}", bad.id, bad.residual, bad.error));
        }
        total += r.checks.len();
        worst = r.checks.iter().filter_map(|c| c.residual).fold(worst, f64::max);
    }
    let secs = t.elapsed().as_secs_f64();
    if secs >= 60.0 {
        return Err(format!("took {secs:.1} s"));
    }
    Ok(format!("{total} checks, worst residual {worst:.1e}, {secs:.2} s"))
}

fn admissible_forms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    let mut z0_hits = 0;
    for _ in 0..100 {
        let (n, l) = random_admissible(&mut rng, 4, 20);
        let ctx = RootContext::new(n).unwrap();
        let direct = tet(&ctx, &l.labels()).map_err(|e| e.to_string())?;
        let pos = tet_admissible(&ctx, &l, true).map_err(|e| e.to_string())?.to_complex();
        worst = worst.max(rel(pos, direct));
        for (_, r) in trunc_terms(&ctx, &l).map_err(|e| e.to_string())? {
            if !(r.re > 0.0 && r.im.abs() <= 1e-10 * r.norm()) {
                return Err(format!("non-positive summand {r} for n={n} {l:?}"));
            }
        }
        let terms = trunc_log_terms(&ctx, &l).map_err(|e| e.to_string())?;
        let best = terms.iter().fold(terms[0], |acc, &t| if t.1 > acc.1 + 1e-12 { t } else { acc });
        if find_z0(&ctx, &l).map_err(|e| e.to_string())? == best.0 {
            z0_hits += 1;
        }
    }
    if worst >= 1e-8 || z0_hits != 100 {
        return Err(format!("worst {worst:.1e}, z0 {z0_hits}/100"));
    }
    Ok(format!("worst relative gap {worst:.1e}, all summands positive, z0 = argmax in {z0_hits}/100"))
}

fn ideal_volume() -> Outcome {
    let t = Instant::now();
    let n = 3000;
    let ctx = RootContext::new(n).unwrap();
    let [a, b, c] = ideal_labels(n, PI / 3.0, PI / 3.0, PI / 3.0);
    let r = ideal_asymptotic_ratio(&ctx, a, b, c).map_err(|e| e.to_string())?;
    let rb = ideal_asymptotic_ratio_bar(&ctx, a, b, c).map_err(|e| e.to_string())?;
    let secs = t.elapsed().as_secs_f64();
    let vol = 3.0 * lobachevsky(PI / 3.0);
    let msg = format!("ratio {r:.7} vs {vol:.7} (gap {:.1e}), bar gap {:.1e}, {secs:.3} s", (r - vol).abs(), (r - rb).abs());
    if (r - vol).abs() < 6e-3 && (r - rb).abs() < 1e-9 && secs < 1.0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn truncated_volume_convergence() -> Outcome {
    let t = Instant::now();
    let ang = DihedralAngles::uniform(PI / 5.0);
    let vol = truncated_volume(&ang).map_err(|e| e.to_string())?;
    let gap = |n: u32| -> Result<f64, String> {
        let ctx = RootContext::new(n).unwrap();
        let r = asymptotic_ratio(&ctx, &ang.labels(n)).map_err(|e| e.to_string())?;
        Ok((r.ratio - vol).abs())
    };
    let (g2, g4) = (gap(2000)?, gap(4000)?);
    let secs = t.elapsed().as_secs_f64();
    let msg = format!("Vol {vol:.9}, gap(2000) {g2:.4}, gap(4000) {g4:.4}, {secs:.2} s");
    if g4 < 1e-2 && g2 > g4 && secs < 30.0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn geometry() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let (mut disc, mut abs_id, mut sch): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..20 {
        let ang = random_truncated_angles(&mut rng);
        disc = disc.max(discriminant_residual(&ang));
        let z = zeta_roots(&ang).map_err(|e| e.to_string())?;
        abs_id = abs_id.max(abs_identity_residual(&ang, z.zeta1)).max(abs_identity_residual(&ang, -z.zeta2));
        sch = schlafli_residuals(&ang).map_err(|e| e.to_string())?.into_iter().fold(sch, f64::max);
    }
    let msg = format!("discriminant {disc:.1e}, |.| identity {abs_id:.1e}, Schlafli {sch:.1e} over 20 angle sets");
    if disc < 1e-9 && abs_id < 1e-8 && sch < 1e-4 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn graph_invariants() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let (mut face, mut cut, mut outer, mut tet_gap): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    for n in [2, 3] {
        let ctx = RootContext::new(n).unwrap();
        for name in GRAPH_DIAGRAMS {
            let d0 = MorseDiagram::bundled(name).map_err(|e| e.to_string())?;
            for _ in 0..5 {
                let d = d0.with_colors(d0.random_coloring(&ctx, &mut rng).map_err(|e| e.to_string())?);
                let first = Cut::At { level: 1, pos: 0 };
                let base = invariant(&ctx, &d, &first).map_err(|e| e.to_string())?;
                for e in d.edges() {
                    let c = Cut::Edge(e);
                    let t = invariant(&ctx, &d, &c).map_err(|e| e.to_string())?;
                    let f = face_invariant(&ctx, &d, &c, None, 0).map_err(|e| e.to_string())?;
                    cut = cut.max(rel(t, base));
                    face = face.max(rel(f, t));
                }
                let x = d.colors.values().next().copied().unwrap();
                for (a0, l0) in [(C64::new(0.2468, 0.05) + x, 1), (C64::new(0.61, -0.02), 0)] {
                    let f = face_invariant(&ctx, &d, &first, Some(a0), l0).map_err(|e| e.to_string())?;
                    outer = outer.max(rel(f, base));
                }
                if name == "tetrahedron" {
                    let c = |e: &str| d.colors[e];
                    let t = tet(&ctx, &SixJLabels::new(c("a"), c("b"), c("e"), c("d"), c("c"), c("f"))).map_err(|e| e.to_string())?;
                    tet_gap = tet_gap.max(rel(base, t));
                }
            }
        }
    }
    let msg = format!("face/tangle {face:.1e}, cut {cut:.1e}, (a0,a1) {outer:.1e}, tetrahedron vs tet {tet_gap:.1e}");
    if face < 1e-9 && cut < 1e-9 && outer < 1e-9 && tet_gap < 1e-9 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn kashaev() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in 2..=6u32 {
        let ctx = RootContext::new(n).unwrap();
        let lam = C64::new((n as f64 - 1.0) / 2.0 + 1e-6, 0.0);
        let want = if n % 2 == 0 { -1.0 } else { 1.0 };
        worst = worst.max((ctx.theta(lam) - want).norm());
    }
    let ctx = RootContext::new(5).unwrap();
    let unknot = MorseDiagram::bundled("unknot").map_err(|e| e.to_string())?;
    let k = kashaev_limit(&ctx, &unknot, &Cut::At { level: 1, pos: 0 }).map_err(|e| e.to_string())?;
    let ku = (k.value - 1.0).norm();
    let msg = format!("binomial limit {worst:.1e}, unknot limit {} (gap {ku:.1e})", k.value.re);
    if worst < 1e-4 && ku < 1e-6 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("identity suites n=2..5, seeds 1-5", identity_suites),
        ("admissible positive form, 100 label sets", admissible_forms),
        ("ideal volume at n=3000", ideal_volume),
        ("truncated volume, all angles pi/5", truncated_volume_convergence),
        ("geometry identities", geometry),
        ("graph invariants", graph_invariants),
        ("Kashaev limits", kashaev),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(msg) => println!("criterion {}: PASS  {name}: {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {msg}", i + 1)
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
