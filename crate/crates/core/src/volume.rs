//! Hyperbolic side: Lobachevsky function, ideal and truncated tetrahedra, and the
//! finite-n comparison with tetrahedral symbols.

use std::f64::consts::PI;
use std::sync::OnceLock;

use nalgebra::Matrix4;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::QError;
use crate::qarith::{c, RootContext, C64};
use crate::sixj::{find_z0, tet_admissible, trunc_log_terms, trunc_range, AdmissibleSixJ};

const SERIES_TERMS: usize = 40;

fn zeta_even(s: f64) -> f64 {
    // direct sum plus Euler-Maclaurin tail at J = 50
    const J: f64 = 50.0;
    let head: f64 = (1..50).map(|j| (j as f64).powf(-s)).sum();
    head + J.powf(1.0 - s) / (s - 1.0) + J.powf(-s) / 2.0 + s * J.powf(-s - 1.0) / 12.0
        - s * (s + 1.0) * (s + 2.0) * J.powf(-s - 3.0) / 720.0
}

/// `zeta(2k) / (k (2k+1) (2 pi)^{2k})` for `k = 1..SERIES_TERMS`.
fn clausen_coefficients() -> &'static [f64] {
    static COEF: OnceLock<Vec<f64>> = OnceLock::new();
    COEF.get_or_init(|| {
        (1..=SERIES_TERMS)
            .map(|k| {
                let kf = k as f64;
                let z = if k == 1 { PI * PI / 6.0 } else { zeta_even(2.0 * kf) };
                z / (kf * (2.0 * kf + 1.0) * (2.0 * PI).powi(2 * k as i32))
            })
            .collect()
    })
}

/// Clausen function `Cl2(t) = -int_0^t log|2 sin(s/2)| ds`.
pub fn clausen2(t: f64) -> f64 {
    let mut t = t.rem_euclid(2.0 * PI);
    if t > PI {
        t -= 2.0 * PI;
    }
    if t == 0.0 {
        return 0.0;
    }
    // Cl2(t) = t - t log|t| + sum_k zeta(2k)/(k(2k+1)) t (t/2pi)^{2k}, |t| <= pi
    let t2 = t * t;
    let mut pow = t * t2;
    let mut tail = 0.0;
    for &coef in clausen_coefficients() {
        let term = coef * pow;
        tail += term;
        if term.abs() < 1e-18 {
            break;
        }
        pow *= t2;
    }
    t - t * t.abs().ln() + tail
}

/// `Lambda(x) = -int_0^x log|2 sin t| dt`, pi-periodic and odd.
pub fn lobachevsky(x: f64) -> f64 {
    0.5 * clausen2(2.0 * x)
}

pub fn ideal_volume(alpha: f64, beta: f64, gamma: f64) -> Result<f64, QError> {
    let ok = [alpha, beta, gamma].iter().all(|&x| x > 0.0 && x < PI);
    if !ok || (alpha + beta + gamma - PI).abs() > 1e-9 {
        return Err(QError::AngleSumViolation(format!(
            "ideal angles must be in (0, pi) and sum to pi, got {alpha} + {beta} + {gamma}"
        )));
    }
    Ok(lobachevsky(alpha) + lobachevsky(beta) + lobachevsky(gamma))
}

/// Integer labels `(a, b, c)` with `a+b+c = n-1` and `2 pi a / n -> pi - alpha`, etc.
/// Targets are shifted by `1/3` so that they sum to `n-1` and then rounded by largest remainder.
pub fn ideal_labels(n: u32, alpha: f64, beta: f64, gamma: f64) -> [i64; 3] {
    let nf = n as f64;
    let target: Vec<f64> = [alpha, beta, gamma].iter().map(|t| (PI - t) * nf / (2.0 * PI) - 1.0 / 3.0).collect();
    let mut out: Vec<i64> = target.iter().map(|x| x.floor() as i64).collect();
    let mut missing = n as i64 - 1 - out.iter().sum::<i64>();
    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by(|&i, &j| (target[j] - target[j].floor()).total_cmp(&(target[i] - target[i].floor())));
    for &i in order.iter().cycle() {
        if missing == 0 {
            break;
        }
        let step = missing.signum();
        out[i] += step;
        missing -= step;
    }
    [out[0], out[1], out[2]]
}

/// `(pi/n) log((-1)^(n-1) {a b c; a b c}_tet)` from `{2a}!{2b}!{2c}! / n^2`.
pub fn ideal_asymptotic_ratio(ctx: &RootContext, a: i64, b: i64, cc: i64) -> Result<f64, QError> {
    let n = ctx.n() as i64;
    if a <= 0 || b <= 0 || cc <= 0 || a + b + cc != n - 1 {
        let r = |x: i64| c(x as f64, 0.0);
        return Err(QError::InadmissibleTriple {
            a: r(a),
            b: r(b),
            c: r(cc),
            why: format!("ideal labels must be positive with sum {}", n - 1),
        });
    }
    let nf = ctx.nf();
    let mut log = -2.0 * nf.ln();
    for x in [a, b, cc] {
        log += ctx.log_sin_sum(2 * x as u32)?;
    }
    Ok(PI / nf * log)
}

/// Same ratio for the barred labels, evaluated through the positive-summand form.
pub fn ideal_asymptotic_ratio_bar(ctx: &RootContext, a: i64, b: i64, cc: i64) -> Result<f64, QError> {
    let m = ctx.n() as i64 - 1;
    let (x, y, z) = (m - a, m - b, m - cc);
    let t = tet_admissible(ctx, &AdmissibleSixJ::new(x, y, z, x, y, z), true)?;
    Ok(PI / ctx.nf() * t.log_magnitude)
}

/// Six dihedral angles, in the order `a, b, c, d, e, f`.
/// Vertex triples are `(a,b,e)`, `(a,c,f)`, `(b,d,f)`, `(c,d,e)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DihedralAngles {
    pub theta: [f64; 6],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Edge {
    A,
    B,
    C,
    D,
    E,
    F,
}

impl Edge {
    pub const ALL: [Edge; 6] = [Edge::A, Edge::B, Edge::C, Edge::D, Edge::E, Edge::F];

    pub fn index(self) -> usize {
        self as usize
    }

    /// The pair of faces (Gram rows) meeting along this edge.
    fn faces(self) -> (usize, usize) {
        match self {
            Edge::A => (0, 1),
            Edge::B => (0, 2),
            Edge::F => (0, 3),
            Edge::E => (1, 2),
            Edge::C => (1, 3),
            Edge::D => (2, 3),
        }
    }

    pub fn parse(s: &str) -> Option<Edge> {
        match s {
            "a" => Some(Edge::A),
            "b" => Some(Edge::B),
            "c" => Some(Edge::C),
            "d" => Some(Edge::D),
            "e" => Some(Edge::E),
            "f" => Some(Edge::F),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AngleKind {
    Truncated,
    Ideal,
}

impl DihedralAngles {
    pub fn new(theta: [f64; 6]) -> Self {
        DihedralAngles { theta }
    }

    pub fn uniform(t: f64) -> Self {
        Self::new([t; 6])
    }

    fn get(&self, e: Edge) -> f64 {
        self.theta[e.index()]
    }

    pub fn vertex_sums(&self) -> [f64; 4] {
        let [a, b, cc, d, e, f] = self.theta;
        [a + b + e, a + cc + f, b + d + f, cc + d + e]
    }

    pub fn kind(&self) -> Result<AngleKind, QError> {
        if self.theta.iter().any(|&t| !(t > 0.0 && t < PI)) {
            return Err(QError::AngleSumViolation(format!("angles must lie in (0, pi): {:?}", self.theta)));
        }
        let sums = self.vertex_sums();
        if sums.iter().all(|s| (s - PI).abs() < 1e-9) {
            Ok(AngleKind::Ideal)
        } else if sums.iter().all(|&s| s < PI) {
            Ok(AngleKind::Truncated)
        } else {
            Err(QError::AngleSumViolation(format!("vertex sums {sums:?} must all be < pi (or all = pi)")))
        }
    }

    pub fn with(&self, e: Edge, t: f64) -> Self {
        let mut th = self.theta;
        th[e.index()] = t;
        Self::new(th)
    }

    /// Integer labels `floor((pi - theta) n / 2pi)` for every edge.
    pub fn labels(&self, n: u32) -> AdmissibleSixJ {
        let l = |t: f64| ((PI - t) * n as f64 / (2.0 * PI)).floor() as i64;
        let [a, b, cc, d, e, f] = self.theta;
        AdmissibleSixJ::new(l(a), l(b), l(e), l(d), l(cc), l(f))
    }
}

pub fn gram_matrix(ang: &DihedralAngles) -> Matrix4<f64> {
    let [a, b, cc, d, e, f] = ang.theta.map(|t| -t.cos());
    Matrix4::new(1.0, a, b, f, a, 1.0, e, cc, b, e, 1.0, d, f, cc, d, 1.0)
}

fn det_g(ang: &DihedralAngles) -> Result<f64, QError> {
    let d = gram_matrix(ang).determinant();
    if d >= 0.0 {
        return Err(QError::NonHyperbolicGram(d));
    }
    Ok(d)
}

/// Coefficients `C0, C1, C2` of the quadratic in `z = e^{i zeta}` and `P = a b c^2 d e f`.
pub fn quadratic_coefficients(ang: &DihedralAngles) -> (C64, C64, C64, C64) {
    let [a, b, cc, d, e, f] = ang.theta.map(|t| C64::from_polar(1.0, t));
    let c2 = cc * cc;
    let c3 = c2 * cc;
    let c4 = c2 * c2;
    let q0 = a * b * c2 * d + a * b * c4 * d + a * b * c3 * e + a * b * c3 * d * d * e + b * c3 * d * f
        + a * a * b * c3 * d * f
        + a * c3 * d * e * f
        + a * b * b * c3 * d * e * f;
    let q1 = -a * b * c2 * d + a * b * c2 * d * e * e + b * c2 * e * f + a * a * b * c2 * e * f
        - a * cc * d * e * f
        - a * b * b * cc * d * e * f
        - a * c3 * d * e * f
        - a * b * b * c3 * d * e * f
        + b * c2 * d * d * e * f
        + a * a * b * c2 * d * d * e * f
        + a * b * c2 * d * f * f
        - a * b * c2 * d * e * e * f * f;
    let q2 = a * cc * d * e * f + a * b * b * cc * d * e * f + b * cc * d * e * e * f + a * a * b * cc * d * e * e * f
        + a * b * cc * e * f * f
        + a * b * cc * d * d * e * f * f
        + a * b * d * e * e * f * f
        + a * b * c2 * d * e * e * f * f;
    (q0, q1, q2, a * b * c2 * d * e * f)
}

/// `|C1^2 - 4 C0 C2 - 16 P^2 det G| / (|C1|^2 + 4|C0||C2|)`.
pub fn discriminant_residual(ang: &DihedralAngles) -> f64 {
    let (q0, q1, q2, p) = quadratic_coefficients(ang);
    let dg = gram_matrix(ang).determinant();
    (q1 * q1 - 4.0 * q0 * q2 - 16.0 * p * p * dg).norm() / (q1.norm_sqr() + 4.0 * q0.norm() * q2.norm())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZetaPair {
    pub zeta1: f64,
    pub zeta2: f64,
}

/// Open intervals that pin down `zeta1` and `zeta2`.
pub fn zeta_intervals(ang: &DihedralAngles) -> ((f64, f64), (f64, f64)) {
    let [a, b, cc, d, e, f] = ang.theta;
    (
        ((2.0 * cc).max(b + cc - e - f), (PI + cc - d - e).min(PI - a + cc - f)),
        (0f64.max(b - cc + e + f), (PI - a - cc + f).min(PI - cc - d + e)),
    )
}

fn fit(x: f64, (lo, hi): (f64, f64)) -> Option<f64> {
    [0.0, 2.0 * PI, -2.0 * PI].iter().map(|k| x + k).find(|&y| lo < y && y < hi)
}

pub fn zeta_roots(ang: &DihedralAngles) -> Result<ZetaPair, QError> {
    ang.kind()?;
    let dg = det_g(ang)?;
    let (q0, q1, q2, p) = quadratic_coefficients(ang);
    let s = c(0.0, (-dg).sqrt());
    let roots = [(-q1 - 4.0 * p * s) / (2.0 * q2), (-q1 + 4.0 * p * s) / (2.0 * q2)];
    for r in roots {
        if (r.norm() - 1.0).abs() > 1e-9 {
            return Err(QError::RootOffUnitCircle(r.norm()));
        }
    }
    let _ = q0;
    let (i1, i2) = zeta_intervals(ang);
    let z1 = roots
        .iter()
        .find_map(|r| fit(r.arg(), i1))
        .ok_or(QError::IntervalViolation { lo: i1.0, hi: i1.1 })?;
    let z2 = roots
        .iter()
        .find_map(|r| fit(-r.arg(), i2))
        .ok_or(QError::IntervalViolation { lo: i2.0, hi: i2.1 })?;
    Ok(ZetaPair { zeta1: z1, zeta2: z2 })
}

pub fn g_function(ang: &DihedralAngles, z: f64) -> f64 {
    let [a, b, cc, d, e, f] = ang.theta;
    let l = lobachevsky;
    l((PI - a - f + cc - z) / 2.0) + l((-2.0 * cc + z) / 2.0) - l((PI - a - cc + f + z) / 2.0) + l(z / 2.0)
        - l((-b + cc - e - f - z) / 2.0)
        + l((PI - d - e + cc - z) / 2.0)
        - l((PI - d - cc + e + z) / 2.0)
        + l((-b - cc + e + f + z) / 2.0)
}

/// `|product of cosines / product of sines - 1|` at `zeta`.
pub fn abs_identity_residual(ang: &DihedralAngles, z: f64) -> f64 {
    let [a, b, cc, d, e, f] = ang.theta;
    let num = ((a - cc + f + z) / 2.0).cos().abs()
        * ((a + cc - f - z) / 2.0).cos().abs()
        * ((cc - d - e - z) / 2.0).cos().abs()
        * ((cc + d - e - z) / 2.0).cos().abs();
    let den = ((z - 2.0 * cc) / 2.0).sin().abs()
        * ((-b + cc - e - f - z) / 2.0).sin().abs()
        * ((-b - cc + e + f + z) / 2.0).sin().abs()
        * (z / 2.0).sin().abs();
    (num / den - 1.0).abs()
}

pub const FD_STEP: f64 = 1e-5;

/// Central difference of `g` in `zeta`.
pub fn g_zeta_derivative(ang: &DihedralAngles, z: f64) -> f64 {
    (g_function(ang, z + FD_STEP) - g_function(ang, z - FD_STEP)) / (2.0 * FD_STEP)
}

pub fn truncated_volume(ang: &DihedralAngles) -> Result<f64, QError> {
    if ang.kind()? == AngleKind::Ideal {
        let [a, b, _, _, e, _] = ang.theta;
        return ideal_volume(a, b, e);
    }
    let z = zeta_roots(ang)?;
    Ok((g_function(ang, z.zeta1) - g_function(ang, -z.zeta2)) / 2.0)
}

fn cofactor(g: &Matrix4<f64>, i: usize, j: usize) -> f64 {
    let m = g.remove_row(i).remove_column(j);
    let s = if (i + j).is_multiple_of(2) { 1.0 } else { -1.0 };
    s * m.determinant()
}

/// The two bracketed ratios `(2c^2 - c_kk c_ll +/- 2 c sqrt(-det G) sin theta) / (c_kk c_ll)`.
/// `2l` is the log of the first; their product is one.
pub fn edge_length_ratios(ang: &DihedralAngles, edge: Edge) -> Result<(f64, f64), QError> {
    let g = gram_matrix(ang);
    let dg = det_g(ang)?;
    let (i, j) = edge.faces();
    let mut rest = (0..4).filter(|x| *x != i && *x != j);
    let (k, l) = (rest.next().unwrap(), rest.next().unwrap());
    let (ckl, ckk, cll) = (cofactor(&g, k, l), cofactor(&g, k, k), cofactor(&g, l, l));
    let s = 2.0 * ckl * (-dg).sqrt() * ang.get(edge).sin();
    let base = 2.0 * ckl * ckl - ckk * cll;
    Ok(((base + s) / (ckk * cll), (base - s) / (ckk * cll)))
}

pub fn edge_length(ang: &DihedralAngles, edge: Edge) -> Result<f64, QError> {
    Ok(0.5 * edge_length_ratios(ang, edge)?.0.ln())
}

/// For each edge, `|dVol/dtheta + l/2|` with a central difference.
pub fn schlafli_residuals(ang: &DihedralAngles) -> Result<[f64; 6], QError> {
    let mut out = [0.0; 6];
    for e in Edge::ALL {
        let t = ang.get(e);
        let dv = (truncated_volume(&ang.with(e, t + FD_STEP))? - truncated_volume(&ang.with(e, t - FD_STEP))?)
            / (2.0 * FD_STEP);
        out[e.index()] = (dv + edge_length(ang, e)? / 2.0).abs();
    }
    Ok(out)
}

/// Compares `2 d/dtheta_a (g(zeta1) - g(-zeta2))` with the log of the cosine ratio.
pub fn diffg_residual(ang: &DihedralAngles) -> Result<f64, QError> {
    let gap = |an: &DihedralAngles| -> Result<f64, QError> {
        let z = zeta_roots(an)?;
        Ok(g_function(an, z.zeta1) - g_function(an, -z.zeta2))
    };
    let t = ang.theta[0];
    let lhs = 2.0 * (gap(&ang.with(Edge::A, t + FD_STEP))? - gap(&ang.with(Edge::A, t - FD_STEP))?) / (2.0 * FD_STEP);
    let [a, _, cc, _, _, f] = ang.theta;
    let z = zeta_roots(ang)?;
    let (z1, z2) = (z.zeta1, z.zeta2);
    let ratio = ((a - cc + f + z1) / 2.0).cos() * ((a + cc - f + z2) / 2.0).cos()
        / (((a - cc + f - z2) / 2.0).cos() * ((a + cc - f - z1) / 2.0).cos());
    Ok((lhs - ratio.abs().ln()).abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticRatio {
    /// `(pi/2n) log(tet(L) tet(bar L))`
    pub ratio: f64,
    /// Same quantity with each sum replaced by its largest summand.
    pub lower: f64,
    /// `lower` plus `(pi/2n) log(#terms)` for each factor.
    pub upper: f64,
    /// Phase of the product, expected to be `0 mod 2 pi`.
    pub phase: f64,
}

pub fn asymptotic_ratio(ctx: &RootContext, l: &AdmissibleSixJ) -> Result<AsymptoticRatio, QError> {
    let n = ctx.n();
    let lb = l.bar(n);
    let t1 = tet_admissible(ctx, l, true)?;
    let t2 = tet_admissible(ctx, &lb, true)?;
    let scale = PI / (2.0 * n as f64);
    let peak = |x: &AdmissibleSixJ, t: crate::qarith::LogComplex| -> Result<(f64, f64), QError> {
        // log of the prefactor is log|tet| - log(sum); recover log(max term) and the count
        let terms = trunc_log_terms(ctx, x)?;
        let z0 = find_z0(ctx, x)?;
        let log_max = terms.iter().find(|(z, _)| *z == z0).map(|t| t.1).unwrap_or(f64::NEG_INFINITY);
        let log_sum = crate::qarith::log_sum_exp(&terms.iter().map(|t| t.1).collect::<Vec<_>>());
        let (lo, hi) = trunc_range(n, x);
        Ok((t.log_magnitude - log_sum + log_max, ((hi - lo + 1) as f64).ln()))
    };
    let (p1, w1) = peak(l, t1)?;
    let (p2, w2) = peak(&lb, t2)?;
    let prod = t1 * t2;
    Ok(AsymptoticRatio {
        ratio: scale * prod.log_magnitude,
        lower: scale * (p1 + p2),
        upper: scale * (p1 + p2 + w1 + w2),
        phase: prod.phase,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub n: u32,
    pub ratio: Option<f64>,
    pub volume: f64,
    pub gap: Option<f64>,
    pub warn: String,
}

/// Finite-n ratios against the closed-form volume. Ideal angles go through the ideal formula.
pub fn volume_scan(ang: &DihedralAngles, ns: &[u32]) -> Result<Vec<ScanRow>, QError> {
    let kind = ang.kind()?;
    let volume = truncated_volume(ang)?;
    let rows = ns
        .par_iter()
        .map(|&n| {
            let res = RootContext::new(n).and_then(|ctx| match kind {
                AngleKind::Ideal => {
                    let [a, b, _, _, e, _] = ang.theta;
                    let [x, y, z] = ideal_labels(n, a, b, e);
                    ideal_asymptotic_ratio(&ctx, x, y, z)
                }
                AngleKind::Truncated => asymptotic_ratio(&ctx, &ang.labels(n)).map(|r| r.ratio),
            });
            match res {
                Ok(r) => ScanRow { n, ratio: Some(r), volume, gap: Some((r - volume).abs()), warn: String::new() },
                Err(e) => ScanRow { n, ratio: None, volume, gap: None, warn: e.to_string() },
            }
        })
        .collect();
    Ok(rows)
}
