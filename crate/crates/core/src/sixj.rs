//! Quantum 6j-symbols, tetrahedral symbols and their identities.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::cgc::inclusion;
use crate::error::QError;
use crate::qarith::{as_integer, c, log_sum_exp, KahanSum, LogComplex, LogSinTable, RootContext, C64};
use crate::repcat::{regular, Color, RepOperator};

/// Labels `{a b e; d c f}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SixJLabels {
    pub a: C64,
    pub b: C64,
    pub e: C64,
    pub d: C64,
    pub c: C64,
    pub f: C64,
}

/// The four integral combinations `B_abe, B_afc, B_bdf, B_dec`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Gaps {
    pub abe: i64,
    pub afc: i64,
    pub bdf: i64,
    pub dec: i64,
}

impl SixJLabels {
    pub fn new(a: C64, b: C64, e: C64, d: C64, c: C64, f: C64) -> Self {
        SixJLabels { a, b, e, d, c, f }
    }

    pub fn real(a: f64, b: f64, e: f64, d: f64, cc: f64, f: f64) -> Self {
        Self::new(c(a, 0.0), c(b, 0.0), c(e, 0.0), c(d, 0.0), c(cc, 0.0), c(f, 0.0))
    }

    pub fn as_array(&self) -> [C64; 6] {
        [self.a, self.b, self.e, self.d, self.c, self.f]
    }

    /// Integrality of the four B-combinations, without range checks.
    pub fn gaps(&self) -> Result<Gaps, QError> {
        let get = |x: C64, name: &str| {
            as_integer(x).ok_or_else(|| QError::IntegralityViolation(format!("{name} = {x} is not an integer")))
        };
        Ok(Gaps {
            abe: get(self.a + self.b - self.e, "a+b-e")?,
            afc: get(self.a + self.f - self.c, "a+f-c")?,
            bdf: get(self.b + self.d - self.f, "b+d-f")?,
            dec: get(self.d + self.e - self.c, "d+e-c")?,
        })
    }

    /// Gaps checked to lie in `[0, n-1]`, which makes every binomial of the closed form well posed.
    pub fn checked_gaps(&self, ctx: &RootContext) -> Result<Gaps, QError> {
        let g = self.gaps_in_range(ctx)?;
        for x in self.as_array() {
            regular(x)?;
        }
        Ok(g)
    }

    /// As `checked_gaps` but allowing half-integer labels, where the tetrahedral form stays finite.
    pub fn gaps_in_range(&self, ctx: &RootContext) -> Result<Gaps, QError> {
        let g = self.gaps()?;
        let n = ctx.n() as i64;
        for (name, v) in [("a+b-e", g.abe), ("a+f-c", g.afc), ("b+d-f", g.bdf), ("d+e-c", g.dec)] {
            if !(0..n).contains(&v) {
                return Err(QError::IntegralityViolation(format!("{name} = {v} outside [0, {}]", n - 1)));
            }
        }
        Ok(g)
    }

    /// Replace every label `x` by `n-1-x`.
    pub fn bar(&self, ctx: &RootContext) -> Self {
        let m = ctx.nf() - 1.0;
        Self::new(m - self.a, m - self.b, m - self.e, m - self.d, m - self.c, m - self.f)
    }
}

fn sgn(k: i64) -> f64 {
    if k.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `qbinom(2e, A_abe+1-n) / qbinom(2e, B_ecd)` with the common brace factors cancelled,
/// so that integer `e` does not produce `0/0`.
fn q_ratio(ctx: &RootContext, l: &SixJLabels, g: &Gaps) -> C64 {
    let n = ctx.n() as i64;
    let two_e = 2.0 * l.e;
    let top = n - 1 - g.abe;
    let mut p = c(1.0, 0.0);
    if top >= g.dec {
        for j in g.dec..top {
            p *= ctx.qbrace(two_e - j as f64);
        }
    } else {
        for j in top..g.dec {
            p /= ctx.qbrace(two_e - j as f64);
        }
    }
    ctx.qfact(g.dec as u32) / ctx.qfact(top as u32) * p
}

fn direct_sum(ctx: &RootContext, l: &SixJLabels, g: &Gaps) -> Result<C64, QError> {
    let SixJLabels { a, b, e, d, c: cc, f } = *l;
    let lo = 0.max(g.dec - g.bdf);
    let hi = g.dec.min(g.afc);
    let mut sum = KahanSum::default();
    for z in lo..=hi {
        let zf = z as f64;
        let term = ctx.qbinom(a + f + cc + 1.0, 2.0 * cc + zf + 1.0)?
            * ctx.qbinom(a + cc - f + zf, a + cc - f)?
            * ctx.qbinom(b + f - d + g.dec as f64 - zf, b + f - d)?
            * ctx.qbinom(d + cc - e + zf, d + f - b)?;
        sum.add(term * sgn(z));
    }
    Ok(sum.value())
}

/// Tetrahedral symbol `{a b e; d c f}_tet`, i.e. the 6j-symbol times `qbinom(2f+n, 2f+1)`.
/// Labels may be half-integers; the closed form has no poles once the gaps are in range.
pub fn tet(ctx: &RootContext, l: &SixJLabels) -> Result<C64, QError> {
    let g = l.gaps_in_range(ctx)?;
    let n = ctx.n() as i64;
    let pre = sgn(n - 1 + g.afc) * ctx.qfact(g.dec as u32) * ctx.qfact(g.abe as u32)
        / (ctx.qfact(g.bdf as u32) * ctx.qfact(g.afc as u32))
        * q_ratio(ctx, l, &g);
    Ok(pre * direct_sum(ctx, l, &g)?)
}

/// The 6j-symbol: coefficient of the right-bracketed basis vector with middle color `f`
/// when the left-bracketed inclusion with middle color `e` is expanded.
pub fn sixj(ctx: &RootContext, l: &SixJLabels) -> Result<C64, QError> {
    l.checked_gaps(ctx)?;
    let t = tet(ctx, l)?;
    let th = ctx.theta(l.f);
    if th.norm() < 1e-300 {
        return Err(QError::OutOfRange(format!("theta({}) vanishes; use tet for this label set", l.f)));
    }
    Ok(t / th)
}

/// Matrix-side oracle: expands `(Y^{a,b}_e (x) id)Y^{e,d}_c` in the basis
/// `(id (x) Y^{b,d}_f')Y^{a,f'}_c` by least squares and returns the coefficient at `f' = f`.
pub fn sixj_by_fusion(ctx: &RootContext, l: &SixJLabels) -> Result<C64, QError> {
    l.checked_gaps(ctx)?;
    let SixJLabels { a, b, e, d, c: cc, f } = *l;
    let col = Color::new;
    let ida = RepOperator::identity(ctx, &[a]);
    let idd = RepOperator::identity(ctx, &[d]);
    let left = inclusion(ctx, col(a), col(b), col(e))?
        .tensor(&idd)
        .compose(&inclusion(ctx, col(e), col(d), col(cc))?)?;
    let n = ctx.n();
    let fs: Vec<C64> = (0..n)
        .map(|k| b + d - k as f64)
        .filter(|&fp| matches!(as_integer(a + fp - cc), Some(v) if (0..n as i64).contains(&v)))
        .collect();
    let target = fs
        .iter()
        .position(|&fp| (fp - f).norm() < 1e-9)
        .ok_or_else(|| QError::IntegralityViolation(format!("f = {f} is not a channel of V^b (x) V^d")))?;
    let rows = left.matrix.len();
    let mut basis = DMatrix::<C64>::zeros(rows, fs.len());
    for (j, &fp) in fs.iter().enumerate() {
        let m = ida
            .tensor(&inclusion(ctx, col(b), col(d), col(fp))?)
            .compose(&inclusion(ctx, col(a), col(fp), col(cc))?)?;
        basis.set_column(j, &DVector::from_column_slice(m.matrix.as_slice()));
    }
    let rhs = DVector::from_column_slice(left.matrix.as_slice());
    let coef = basis
        .svd(true, true)
        .solve(&rhs, 1e-12)
        .map_err(|e| QError::SingularMatrix(e.to_string()))?;
    Ok(coef[target])
}

/// Integer labels for the positive-summand form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissibleSixJ {
    pub a: i64,
    pub b: i64,
    pub e: i64,
    pub d: i64,
    pub c: i64,
    pub f: i64,
}

impl AdmissibleSixJ {
    pub fn new(a: i64, b: i64, e: i64, d: i64, c: i64, f: i64) -> Self {
        AdmissibleSixJ { a, b, e, d, c, f }
    }

    pub fn labels(&self) -> SixJLabels {
        SixJLabels::real(self.a as f64, self.b as f64, self.e as f64, self.d as f64, self.c as f64, self.f as f64)
    }

    pub fn bar(&self, n: u32) -> Self {
        let m = n as i64 - 1;
        Self::new(m - self.a, m - self.b, m - self.e, m - self.d, m - self.c, m - self.f)
    }

    fn triples(&self) -> [(i64, i64, i64); 4] {
        [(self.a, self.b, self.e), (self.a, self.c, self.f), (self.b, self.d, self.f), (self.c, self.d, self.e)]
    }

    /// The strict inequalities `0 < i+j-k, j+k-i, k+i-j < n-1`, `n-1 < i+j+k < 2(n-1)` on all four faces.
    pub fn is_strictly_admissible(&self, n: u32) -> bool {
        let m = n as i64 - 1;
        self.triples().iter().all(|&(i, j, k)| {
            [i + j - k, j + k - i, k + i - j].iter().all(|&x| 0 < x && x < m) && m < i + j + k && i + j + k < 2 * m
        })
    }

    /// The closed versions of the same inequalities. These are what the positive-summand form
    /// needs to be well posed; the strict ones additionally exclude the ideal boundary.
    pub fn validate(&self, n: u32) -> Result<(), QError> {
        let m = n as i64 - 1;
        for (i, j, k) in self.triples() {
            let ok = [i, j, k].iter().all(|&x| (0..=m).contains(&x))
                && [i + j - k, j + k - i, k + i - j].iter().all(|&x| (0..=m).contains(&x))
                && (m..=2 * m).contains(&(i + j + k));
            if !ok {
                let r = |x: i64| c(x as f64, 0.0);
                return Err(QError::InadmissibleTriple {
                    a: r(i),
                    b: r(j),
                    c: r(k),
                    why: format!("face ({i}, {j}, {k}) violates the admissibility inequalities for n = {n}"),
                });
            }
        }
        Ok(())
    }
}

/// Summation window `[m, M]` of the positive-summand form.
pub fn trunc_range(n: u32, l: &AdmissibleSixJ) -> (i64, i64) {
    let n = n as i64;
    let AdmissibleSixJ { a, b, e, d, c, f } = *l;
    let lo = 0.max(n - 1 - 2 * c).max(b - c + e + f - n + 1).max(-b - c + e + f);
    let hi = (d + e - c).min(a + f - c).min(n - 1 - (a + c - f)).min(n - 1 - (d + c - e));
    (lo, hi)
}

/// `log R(z)` in terms of the log-sine table.
fn log_r(t: &LogSinTable, l: &AdmissibleSixJ, z: i64) -> f64 {
    let n = t.n() as i64;
    let AdmissibleSixJ { a, b, e, d, c, f } = *l;
    let (acf, bfd, dec, dce, dfb) = (a + c - f, b + f - d, d + e - c, d + c - e, d + f - b);
    t.log_binom(a + f + c + 1 - n, 2 * c + z + 1 - n)
        + t.log_binom(acf + z, acf)
        + t.log_binom(bfd + dec - z, bfd)
        + t.log_binom(dce + z, dfb)
}

/// The summands `R(z)` evaluated in complex arithmetic, for positivity checks.
pub fn trunc_terms(ctx: &RootContext, l: &AdmissibleSixJ) -> Result<Vec<(i64, C64)>, QError> {
    l.validate(ctx.n())?;
    let n = ctx.n() as i64;
    let AdmissibleSixJ { a, b, e, d, c: cc, f } = *l;
    let (acf, bfd, dec, dce, dfb) = (a + cc - f, b + f - d, d + e - cc, d + cc - e, d + f - b);
    let qb = |x: i64, y: i64| ctx.qbinom_re(x as f64, y as f64);
    let (lo, hi) = trunc_range(ctx.n(), l);
    (lo..=hi)
        .map(|z| {
            Ok((
                z,
                qb(a + f + cc + 1 - n, 2 * cc + z + 1 - n)? * qb(acf + z, acf)? * qb(bfd + dec - z, bfd)? * qb(dce + z, dfb)?,
            ))
        })
        .collect()
}

/// Magnitude and phase of the prefactor
/// `(-1)^(n-1) {B_dec}!^2 {B_abe}! {B_ecd}! / ({B_bdf}! {B_afc}! {n-1-B_abe}! {A_abe+1-n}!)`.
fn trunc_prefactor(t: &LogSinTable, l: &AdmissibleSixJ) -> LogComplex {
    let n = t.n() as i64;
    let AdmissibleSixJ { a, b, e, d, c, f } = *l;
    let (dec, abe, ecd, bdf, afc) = (d + e - c, a + b - e, e + c - d, b + d - f, a + f - c);
    let (r1, r2) = (n - 1 - abe, a + b + e + 1 - n);
    let logmag = 2.0 * t.log_fact(dec) + t.log_fact(abe) + t.log_fact(ecd)
        - t.log_fact(bdf)
        - t.log_fact(afc)
        - t.log_fact(r1)
        - t.log_fact(r2);
    // {k}! has phase i^k for 0 <= k < n; the sign contributes two more quarter turns per unit
    let quarter = 2 * dec + abe + ecd - bdf - afc - r1 - r2 + 2 * (n - 1);
    LogComplex::new(logmag, std::f64::consts::FRAC_PI_2 * quarter.rem_euclid(4) as f64)
}

/// Tetrahedral symbol of integer labels from the positive-summand form.
/// With `logspace` the sum is a log-sum-exp over `log R(z)`; otherwise the summands are
/// added in increasing order in ordinary floating point.
pub fn tet_admissible(ctx: &RootContext, l: &AdmissibleSixJ, logspace: bool) -> Result<LogComplex, QError> {
    l.validate(ctx.n())?;
    let table = ctx.log_sin_table();
    let pre = trunc_prefactor(&table, l);
    let (lo, hi) = trunc_range(ctx.n(), l);
    if lo > hi {
        return Ok(LogComplex::zero());
    }
    let mut logs: Vec<f64> = (lo..=hi).map(|z| log_r(&table, l, z)).collect();
    let log_sum = if logspace {
        log_sum_exp(&logs)
    } else {
        logs.sort_by(|x, y| x.total_cmp(y));
        logs.iter().map(|x| x.exp()).sum::<f64>().ln()
    };
    Ok(pre * LogComplex::new(log_sum, 0.0))
}

/// Peak of `R(z)` on `[m, M]`: the last `z` where the ratio `R(z)/R(z-1)` still exceeds one.
/// Exact ties go to the smaller index.
pub fn find_z0(ctx: &RootContext, l: &AdmissibleSixJ) -> Result<i64, QError> {
    l.validate(ctx.n())?;
    let (lo, hi) = trunc_range(ctx.n(), l);
    if lo > hi {
        return Err(QError::EmptyRange { m: lo, big_m: hi });
    }
    let table = ctx.log_sin_table();
    let mut z0 = lo;
    let mut prev = log_r(&table, l, lo);
    for z in lo + 1..=hi {
        let cur = log_r(&table, l, z);
        if cur - prev <= 1e-12 {
            break;
        }
        z0 = z;
        prev = cur;
    }
    Ok(z0)
}

/// `log R(z)` for every `z` in the window, exposed for peak and unimodality checks.
pub fn trunc_log_terms(ctx: &RootContext, l: &AdmissibleSixJ) -> Result<Vec<(i64, f64)>, QError> {
    l.validate(ctx.n())?;
    let table = ctx.log_sin_table();
    let (lo, hi) = trunc_range(ctx.n(), l);
    Ok((lo..=hi).map(|z| (z, log_r(&table, l, z))).collect())
}

fn channel(ctx: &RootContext, x: C64) -> bool {
    matches!(as_integer(x), Some(v) if (0..ctx.n() as i64).contains(&v))
}

/// `| sum_f theta(f)^-1 theta(g)^-1 {a b e; d c f}_tet {d b f; a c g}_tet - delta_eg |`
/// with `f` running over the channels where `b+d-f` and `a+f-c` lie in `[0, n-1]`.
pub fn orthogonality_residual(ctx: &RootContext, a: C64, b: C64, cc: C64, d: C64, e: C64, g: C64) -> Result<f64, QError> {
    let mut sum = KahanSum::default();
    for k in 0..ctx.n() {
        let f = b + d - k as f64;
        if !channel(ctx, a + f - cc) {
            continue;
        }
        regular(f)?;
        let t1 = tet(ctx, &SixJLabels::new(a, b, e, d, cc, f))?;
        let t2 = tet(ctx, &SixJLabels::new(d, b, f, a, cc, g))?;
        sum.add(t1 * t2 / (ctx.theta(f) * ctx.theta(g)));
    }
    let delta = if (e - g).norm() < 1e-9 { 1.0 } else { 0.0 };
    Ok((sum.value() - delta).norm())
}

/// Labels of a four-fold tensor product `V^1 (x) V^2 (x) V^3 (x) V^4` with total color `j`,
/// left-bracketed intermediates `x = (12)`, `y = ((12)3)` and right-bracketed intermediates
/// `r = (34)`, `q = (2(34))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PentagonLabels {
    pub j1: C64,
    pub j2: C64,
    pub j3: C64,
    pub j4: C64,
    pub x: C64,
    pub y: C64,
    pub j: C64,
    pub q: C64,
    pub r: C64,
}

/// Pentagon identity between the two ways of turning `(((12)_x 3)_y 4)_j` into `(1(2(34)_r)_q)_j`:
/// `sum_p {1 2 x; 3 y p}{1 p y; 4 j q}{2 3 p; 4 q r} = {x 3 y; 4 j r}{1 2 x; r j q}`.
/// Terms whose labels leave the channel ranges vanish and are skipped.
/// Returns `(|LHS - RHS| / (1 + |RHS|), number of p terms)`.
pub fn pentagon_residual(ctx: &RootContext, p: &PentagonLabels) -> Result<(f64, usize), QError> {
    let PentagonLabels { j1, j2, j3, j4, x, y, j, q, r } = *p;
    // a label set outside the channel ranges is a coupling that does not occur
    let s = |a, b, e, d, cc, f| {
        let l = SixJLabels::new(a, b, e, d, cc, f);
        if l.gaps_in_range(ctx).is_err() {
            Ok(c(0.0, 0.0))
        } else {
            sixj(ctx, &l)
        }
    };
    let rhs = s(x, j3, y, j4, j, r)? * s(j1, j2, x, r, j, q)?;
    let mut sum = KahanSum::default();
    let mut terms = 0;
    for k in 0..ctx.n() {
        let h = j2 + j3 - k as f64;
        let sets = [
            SixJLabels::new(j1, j2, x, j3, y, h),
            SixJLabels::new(j1, h, y, j4, j, q),
            SixJLabels::new(j2, j3, h, j4, q, r),
        ];
        if sets.iter().any(|l| l.gaps_in_range(ctx).is_err()) {
            continue;
        }
        regular(h)?;
        terms += 1;
        let mut prod = c(1.0, 0.0);
        for l in &sets {
            prod *= sixj(ctx, l)?;
        }
        sum.add(prod);
    }
    Ok(((sum.value() - rhs).norm() / (1.0 + rhs.norm()), terms))
}

/// The six label permutations of the printed symmetry chain, in printed order.
pub fn symmetry_images(ctx: &RootContext, l: &SixJLabels) -> [SixJLabels; 6] {
    let m = ctx.nf() - 1.0;
    let bar = |x: C64| m - x;
    let SixJLabels { a, b, e, d, c: cc, f } = *l;
    [
        SixJLabels::new(b, bar(e), bar(a), cc, f, d),
        SixJLabels::new(f, bar(b), d, e, cc, a),
        SixJLabels::new(bar(d), bar(b), bar(f), bar(a), bar(cc), bar(e)),
        SixJLabels::new(cc, bar(f), a, b, e, bar(d)),
        SixJLabels::new(d, e, cc, bar(a), f, b),
        SixJLabels::new(e, d, cc, bar(f), a, bar(b)),
    ]
}

/// Relative residuals `|tet(L) - tet(sigma L)| / (1 + |tet(L)|)` for each printed symmetry.
pub fn symmetry_suite(ctx: &RootContext, l: &SixJLabels) -> Result<Vec<f64>, QError> {
    let base = tet(ctx, l)?;
    symmetry_images(ctx, l)
        .iter()
        .map(|s| Ok((tet(ctx, s)? - base).norm() / (1.0 + base.norm())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ctx(n: u32) -> RootContext {
        RootContext::new(n).unwrap()
    }

    /// Random labels with all four gaps in `[0, n-1]`.
    fn random_labels(rng: &mut ChaCha8Rng, n: u32) -> SixJLabels {
        let mut frac = || c(rng.random_range(0.05..0.45), rng.random_range(-0.2..0.2));
        let (a, b, d) = (frac(), frac(), frac());
        let mut k = || rng.random_range(0..n) as f64;
        let e = a + b - k();
        let f = b + d - k();
        let cc = a + f - k();
        let l = SixJLabels::new(a, b, e, d, cc, f);
        if l.checked_gaps(&ctx(n)).is_ok() {
            l
        } else {
            random_labels(rng, n)
        }
    }

    #[test]
    fn matches_fusion_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 2..=4 {
            let cx = ctx(n);
            for _ in 0..8 {
                let l = random_labels(&mut rng, n);
                let (s, o) = (sixj(&cx, &l).unwrap(), sixj_by_fusion(&cx, &l).unwrap());
                assert!((s - o).norm() < 1e-8 * (1.0 + o.norm()), "n={n} {l:?}: {s} vs {o}");
            }
        }
    }

    #[test]
    fn ideal_collapse_n4() {
        let cx = ctx(4);
        let t = tet(&cx, &SixJLabels::real(1.0, 1.0, 1.0, 1.0, 1.0, 1.0)).unwrap();
        assert!((t - c(-2f64.sqrt(), 0.0)).norm() < 1e-12, "{t}");
        let t2 = tet_admissible(&cx, &AdmissibleSixJ::new(1, 1, 1, 1, 1, 1), true).unwrap().to_complex();
        assert!((t2 - t).norm() < 1e-12, "{t2}");
    }

    #[test]
    fn ideal_collapse_product() {
        // {a b c; a b c}_tet = {2a}!{2b}!{2c}! / n^2 when a+b+c = n-1
        for (n, a, b) in [(5u32, 1i64, 2i64), (7, 2, 3), (9, 4, 1)] {
            let cx = ctx(n);
            let cc = n as i64 - 1 - a - b;
            let t = tet(&cx, &SixJLabels::real(a as f64, b as f64, cc as f64, a as f64, b as f64, cc as f64)).unwrap();
            let want = cx.qfact(2 * a as u32) * cx.qfact(2 * b as u32) * cx.qfact(2 * cc as u32) / (n * n) as f64;
            assert!((t - want).norm() < 1e-10 * (1.0 + want.norm()), "n={n}: {t} vs {want}");
        }
    }

    #[test]
    fn positive_form_agrees_with_direct_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut seen = 0;
        while seen < 30 {
            let n = rng.random_range(4..=20u32);
            let v: Vec<i64> = (0..6).map(|_| rng.random_range(1..n as i64 - 1)).collect();
            let l = AdmissibleSixJ::new(v[0], v[1], v[2], v[3], v[4], v[5]);
            if !l.is_strictly_admissible(n) {
                continue;
            }
            seen += 1;
            let cx = ctx(n);
            let direct = tet(&cx, &l.labels()).unwrap();
            for logspace in [true, false] {
                let t = tet_admissible(&cx, &l, logspace).unwrap().to_complex();
                assert!((t - direct).norm() < 1e-8 * (1.0 + direct.norm()), "n={n} {l:?}: {t} vs {direct}");
            }
            for (_, r) in trunc_terms(&cx, &l).unwrap() {
                assert!(r.re > 0.0 && r.im.abs() < 1e-10 * r.norm());
            }
        }
    }

    #[test]
    fn z0_is_brute_force_argmax() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut seen = 0;
        while seen < 40 {
            let n = rng.random_range(6..=50u32);
            let v: Vec<i64> = (0..6).map(|_| rng.random_range(1..n as i64 - 1)).collect();
            let l = AdmissibleSixJ::new(v[0], v[1], v[2], v[3], v[4], v[5]);
            if !l.is_strictly_admissible(n) {
                continue;
            }
            seen += 1;
            let cx = ctx(n);
            let terms = trunc_log_terms(&cx, &l).unwrap();
            let best = terms.iter().fold(terms[0], |acc, &t| if t.1 > acc.1 + 1e-12 { t } else { acc });
            assert_eq!(find_z0(&cx, &l).unwrap(), best.0);
        }
    }

    #[test]
    fn window_never_empty_on_admissible_labels() {
        // exhaustive for small n: validation alone guarantees m <= M
        for n in 2..=6u32 {
            let r = 0..n as i64;
            for a in r.clone() {
                for b in r.clone() {
                    for e in r.clone() {
                        for d in r.clone() {
                            for cc in r.clone() {
                                for f in r.clone() {
                                    let l = AdmissibleSixJ::new(a, b, e, d, cc, f);
                                    if l.validate(n).is_ok() {
                                        let (lo, hi) = trunc_range(n, &l);
                                        assert!(lo <= hi, "{l:?}");
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        let bad = AdmissibleSixJ::new(5, 1, 1, 1, 1, 1);
        assert!(matches!(find_z0(&ctx(4), &bad), Err(QError::InadmissibleTriple { .. })));
    }

    #[test]
    fn orthogonality() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 2..=5 {
            let cx = ctx(n);
            for _ in 0..4 {
                let l = random_labels(&mut rng, n);
                let SixJLabels { a, b, e, d, c: cc, .. } = l;
                for k in 0..n {
                    let g = a + b - k as f64;
                    if !channel(&cx, d + g - cc) {
                        continue;
                    }
                    let r = orthogonality_residual(&cx, a, b, cc, d, e, g).unwrap();
                    assert!(r < 1e-8, "n={n} k={k}: {r}");
                }
            }
        }
    }

    #[test]
    fn pentagon() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for n in 2..=4 {
            let cx = ctx(n);
            let mut done = 0;
            while done < 4 {
                let mut frac = || c(rng.random_range(0.05..0.45), rng.random_range(-0.2..0.2));
                let (j1, j2, j3, j4) = (frac(), frac(), frac(), frac());
                let mut k = || rng.random_range(0..n) as f64;
                let x = j1 + j2 - k();
                let y = x + j3 - k();
                let j = y + j4 - k();
                let r = j3 + j4 - k();
                let q = j2 + r - k();
                if !channel(&cx, j1 + q - j) || !channel(&cx, x + r - j) {
                    continue;
                }
                let p = PentagonLabels { j1, j2, j3, j4, x, y, j, q, r };
                let (res, _) = pentagon_residual(&cx, &p).unwrap();
                assert!(res < 1e-8, "n={n}: {res}");
                done += 1;
            }
        }
    }

    #[test]
    fn symmetries() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for n in 2..=5 {
            let cx = ctx(n);
            for _ in 0..6 {
                let l = random_labels(&mut rng, n);
                for (i, r) in symmetry_suite(&cx, &l).unwrap().into_iter().enumerate() {
                    assert!(r < 1e-8, "n={n} symmetry {i}: {r}");
                }
            }
        }
    }

    #[test]
    fn bar_symmetry_is_an_involution() {
        let cx = ctx(5);
        let l = SixJLabels::real(0.3, 1.2, 0.5, 2.1, 0.4, 1.4);
        let once = symmetry_images(&cx, &l)[2];
        let twice = symmetry_images(&cx, &once)[2];
        for (u, v) in l.as_array().iter().zip(twice.as_array()) {
            assert!((u - v).norm() < 1e-14);
        }
    }
}
