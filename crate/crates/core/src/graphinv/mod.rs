//! Invariants of colored trivalent graphs: the tangle model, the face model and the
//! Kashaev limit for links.

mod diagram;
mod face;
mod tangle;

pub use diagram::{parse_color, ColoringReport, Cut, Dir, Event, MorseDiagram, Sign, Strand, BUNDLED};
pub use face::{enumerate_states, state_sum};
pub use tangle::{tangle_matrix, tangle_scalar};

use serde::Serialize;

use crate::error::QError;
use crate::qarith::{RootContext, C64};
use crate::repcat::twist_exponent;

/// Offset added to the cut color to get the default left region `a0`.
pub const DEFAULT_A0_SHIFT: f64 = 0.1357;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Tangle,
    Face,
}

/// Cut `d`, check its coloring, and return the tangle with the effective color of the
/// cut strand and the factor `xi^(-2 t_x) / theta(x)` that turns its scalar into the
/// invariant. The first factor undoes the kink left by the cut.
fn prepare(ctx: &RootContext, d: &MorseDiagram, cut: &Cut) -> Result<(MorseDiagram, C64, C64), QError> {
    let report = d.validate_coloring(ctx)?;
    if !report.ok {
        return Err(QError::Diagram(report.problems.join("; ")));
    }
    let (t, strand) = d.cut(cut)?;
    let x = t.effective(ctx, &strand)?;
    let th = ctx.theta(x);
    if th.norm() < 1e-300 {
        return Err(QError::HalfIntegerColor(x));
    }
    Ok((t, x, ctx.xi_pow(-2.0 * twist_exponent(ctx, x)) / th))
}

/// The invariant of a closed colored diagram through the tangle operator.
pub fn invariant(ctx: &RootContext, d: &MorseDiagram, cut: &Cut) -> Result<C64, QError> {
    let (t, _, norm) = prepare(ctx, d, cut)?;
    Ok(tangle_scalar(ctx, &t)? * norm)
}

/// The same invariant as a state sum. `a0` defaults to `x + 0.1357` and `a1 = a0 + x - l0`.
/// If a region lands on a half-integer the left region is moved by `1/pi` and the sum
/// is retried.
pub fn face_invariant(ctx: &RootContext, d: &MorseDiagram, cut: &Cut, a0: Option<C64>, l0: i64) -> Result<C64, QError> {
    let (t, x, norm) = prepare(ctx, d, cut)?;
    let mut a = a0.unwrap_or(x + DEFAULT_A0_SHIFT);
    for _ in 0..8 {
        match state_sum(ctx, &t, a, l0) {
            Err(QError::HalfIntegerColor(_)) => a += std::f64::consts::FRAC_1_PI,
            r => return Ok(r? * norm),
        }
    }
    Err(QError::HalfIntegerColor(a))
}

pub fn evaluate(ctx: &RootContext, d: &MorseDiagram, cut: &Cut, model: Model) -> Result<C64, QError> {
    match model {
        Model::Tangle => invariant(ctx, d, cut),
        Model::Face => face_invariant(ctx, d, cut, None, 0),
    }
}

/// Result of the `lambda -> (n-1)/2` limit for a link diagram.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KashaevLimit {
    pub value: C64,
    pub epsilons: [f64; 3],
    pub samples: [C64; 3],
    pub spread: f64,
}

pub const KASHAEV_EPSILONS: [f64; 3] = [1e-3, 5e-4, 2.5e-4];

/// `(-1)^(n-1)` times the invariant of a link with every color at `(n-1)/2 + eps`,
/// extrapolated to `eps = 0` (Richardson, assuming a smooth expansion in `eps`).
pub fn kashaev_limit(ctx: &RootContext, d: &MorseDiagram, cut: &Cut) -> Result<KashaevLimit, QError> {
    if !d.is_link() {
        return Err(QError::Diagram("the Kashaev limit is defined for link diagrams only".into()));
    }
    let sign = if ctx.n().is_multiple_of(2) { -1.0 } else { 1.0 };
    let mut samples = [C64::new(0.0, 0.0); 3];
    for (s, eps) in samples.iter_mut().zip(KASHAEV_EPSILONS) {
        let c = C64::new((ctx.nf() - 1.0) / 2.0 + eps, 0.0);
        let colors = d.edges().into_iter().map(|e| (e, c)).collect();
        *s = invariant(ctx, &d.with_colors(colors), cut)? * sign;
    }
    let r1 = samples[1] * 2.0 - samples[0];
    let r2 = samples[2] * 2.0 - samples[1];
    let value = (r2 * 4.0 - r1) / 3.0;
    let spread = (r2 - r1).norm();
    if !value.is_finite() || spread > 1e-4 * (1.0 + value.norm()) {
        return Err(QError::ExtrapolationUnstable(spread));
    }
    Ok(KashaevLimit { value, epsilons: KASHAEV_EPSILONS, samples, spread })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repcat::{positive_curl, Color};
    use crate::sixj::{tet, SixJLabels};
    use rand::SeedableRng;

    fn all_cuts(d: &MorseDiagram) -> Vec<Cut> {
        let lv = d.levels().unwrap();
        let mut out = Vec::new();
        for (k, l) in lv.iter().enumerate() {
            for p in 0..l.len() {
                out.push(Cut::At { level: k, pos: p });
            }
        }
        out
    }

    fn close(a: C64, b: C64) -> bool {
        (a - b).norm() <= 1e-9 * (1.0 + b.norm())
    }

    #[test]
    fn unknot_is_inverse_theta() {
        for n in 2..=5 {
            let ctx = RootContext::new(n).unwrap();
            let d = MorseDiagram::bundled("unknot").unwrap();
            let want = ctx.theta(d.colors["k"]).inv();
            for cut in all_cuts(&d) {
                assert!(close(invariant(&ctx, &d, &cut).unwrap(), want));
                assert!(close(face_invariant(&ctx, &d, &cut, None, 0).unwrap(), want));
            }
        }
    }

    #[test]
    fn theta_graph_is_one_for_every_cut() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for n in 2..=4 {
            let ctx = RootContext::new(n).unwrap();
            let d0 = MorseDiagram::bundled("theta").unwrap();
            let d = d0.with_colors(d0.random_coloring(&ctx, &mut rng).unwrap());
            for cut in all_cuts(&d) {
                let v = invariant(&ctx, &d, &cut).unwrap();
                assert!(close(v, C64::new(1.0, 0.0)), "n={n} {cut:?}: {v}");
            }
        }
    }

    #[test]
    fn tetrahedron_matches_tet() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        for n in 2..=4 {
            let ctx = RootContext::new(n).unwrap();
            let d0 = MorseDiagram::bundled("tetrahedron").unwrap();
            let d = d0.with_colors(d0.random_coloring(&ctx, &mut rng).unwrap());
            let c = |e: &str| d.colors[e];
            let want = tet(&ctx, &SixJLabels::new(c("a"), c("b"), c("e"), c("d"), c("c"), c("f"))).unwrap();
            for cut in all_cuts(&d) {
                assert!(close(invariant(&ctx, &d, &cut).unwrap(), want), "n={n} {cut:?}");
                assert!(close(face_invariant(&ctx, &d, &cut, None, 0).unwrap(), want), "n={n} {cut:?}");
            }
        }
    }

    #[test]
    fn face_model_is_independent_of_outer_regions() {
        let ctx = RootContext::new(3).unwrap();
        let d = MorseDiagram::bundled("trefoil").unwrap();
        let cut = Cut::Edge("k".into());
        let base = invariant(&ctx, &d, &cut).unwrap();
        for (a0, l0) in [(0.2468, 0), (0.77, 1), (1.9, 2)] {
            let v = face_invariant(&ctx, &d, &cut, Some(C64::new(a0, 0.03)), l0).unwrap();
            assert!(close(v, base), "a0={a0} l0={l0}");
        }
    }

    #[test]
    fn curl_tangle_is_twist() {
        let ctx = RootContext::new(3).unwrap();
        let text = r#"{"name":"curl","top":["k:down"],"colors":{"k":"0.41+1"},"events":[
            {"op":"cap","at":1,"out":["k:down","k:up"]},
            {"op":"cross","at":0,"sign":"+"},
            {"op":"cup","at":1}]}"#;
        let t = MorseDiagram::from_json(text).unwrap();
        let a = t.colors["k"];
        let lambda = tangle_scalar(&ctx, &t).unwrap();
        assert!(close(lambda, ctx.xi_pow(2.0 * twist_exponent(&ctx, a))));
        let op = positive_curl(&ctx, Color::new(a)).unwrap();
        assert!(close(op.matrix[(0, 0)], lambda));
        assert!(close(state_sum(&ctx, &t, a + 0.1357, 0).unwrap(), lambda));
    }

    #[test]
    fn states_of_a_straight_strand_and_a_loop() {
        let ctx = RootContext::new(4).unwrap();
        let line = MorseDiagram::from_json(r#"{"name":"line","top":["k:down"],"colors":{"k":"0.3"},"events":[]}"#).unwrap();
        assert_eq!(enumerate_states(&ctx, &line, C64::new(0.61, 0.0), 0, 100).unwrap().len(), 1);
        // a strand beside a small circle: the inner region runs over n values
        let ring = r#"{"name":"ring","top":["k:down"],"colors":{"k":"0.3","r":"0.2"},"events":[
            {"op":"cap","at":1,"out":["r:down","r:up"]},{"op":"cup","at":1}]}"#;
        let ring = MorseDiagram::from_json(ring).unwrap();
        let states = enumerate_states(&ctx, &ring, C64::new(0.61, 0.0), 0, 100).unwrap();
        assert_eq!(states.len(), 4);
        // the weights sum to the quantum dimension of the ring, which vanishes
        assert!(state_sum(&ctx, &ring, C64::new(0.61, 0.0), 0).unwrap().norm() < 1e-9);
    }

    #[test]
    fn kashaev_limits() {
        for n in 2..=5 {
            let ctx = RootContext::new(n).unwrap();
            let cut = Cut::At { level: 1, pos: 0 };
            let u = kashaev_limit(&ctx, &MorseDiagram::bundled("unknot").unwrap(), &cut).unwrap();
            assert!((u.value - 1.0).norm() < 1e-6);
            let h = kashaev_limit(&ctx, &MorseDiagram::bundled("hopf").unwrap(), &cut).unwrap();
            assert!((h.value - n as f64).norm() < 1e-6);
        }
        // figure-eight: 5, 13, 27 are the classical values for N = 2, 3, 4
        for (n, want) in [(2, 5.0), (3, 13.0), (4, 27.0)] {
            let ctx = RootContext::new(n).unwrap();
            let k = kashaev_limit(&ctx, &MorseDiagram::bundled("figure-eight").unwrap(), &Cut::Edge("k".into())).unwrap();
            assert!((k.value - want).norm() < 1e-5, "{n}: {}", k.value);
        }
        let ctx = RootContext::new(3).unwrap();
        let theta = MorseDiagram::bundled("theta").unwrap();
        assert!(matches!(kashaev_limit(&ctx, &theta, &Cut::Edge("a".into())), Err(QError::Diagram(_))));
    }

    #[test]
    fn invalid_coloring_is_rejected() {
        let ctx = RootContext::new(3).unwrap();
        let d = MorseDiagram::bundled("theta").unwrap();
        let mut cols = d.colors.clone();
        cols.insert("c".into(), C64::new(0.5, 0.0));
        let e = invariant(&ctx, &d.with_colors(cols), &Cut::Edge("a".into())).unwrap_err();
        assert!(matches!(e, QError::Diagram(_)));
        assert!(d.cut(&Cut::Edge("zz".into())).is_err());
    }
}
