//! The modules `V^a`, their duality maps and the braiding.
//!
//! Basis convention: `e_u (x) e_v` sits at index `u*n + v`, and in general
//! the leftmost tensor factor is the most significant digit.

use nalgebra::DMatrix;

use crate::error::QError;
use crate::qarith::{as_integer, c, near_half_integer, RootContext, C64, INT_TOL};

pub type CMat = DMatrix<C64>;

/// A spin label `a`. Regularity is derived from the value on demand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Color {
    pub value: C64,
}

impl Color {
    pub fn new(value: C64) -> Self {
        Color { value }
    }

    pub fn re(x: f64) -> Self {
        Color { value: c(x, 0.0) }
    }

    pub fn is_regular(&self) -> bool {
        !near_half_integer(self.value, INT_TOL)
    }

    /// The dual label `n - 1 - a`.
    pub fn complement(&self, ctx: &RootContext) -> Color {
        Color::new(ctx.nf() - 1.0 - self.value)
    }

    pub fn checked(&self) -> Result<C64, QError> {
        if self.is_regular() {
            Ok(self.value)
        } else {
            Err(QError::HalfIntegerColor(self.value))
        }
    }
}

impl From<C64> for Color {
    fn from(v: C64) -> Self {
        Color::new(v)
    }
}

impl From<f64> for Color {
    fn from(v: f64) -> Self {
        Color::re(v)
    }
}

pub(crate) fn regular(a: C64) -> Result<C64, QError> {
    Color::new(a).checked()
}

/// A morphism between tensor products of `V^a`s.
#[derive(Debug, Clone, PartialEq)]
pub struct RepOperator {
    pub domain: Vec<C64>,
    pub codomain: Vec<C64>,
    pub matrix: CMat,
}

fn same_colors(x: &[C64], y: &[C64]) -> bool {
    x.len() == y.len() && x.iter().zip(y).all(|(p, q)| (p - q).norm() < 1e-9)
}

impl RepOperator {
    pub fn new(domain: Vec<C64>, codomain: Vec<C64>, matrix: CMat, n: u32) -> Self {
        let n = n as usize;
        assert_eq!(matrix.nrows(), n.pow(codomain.len() as u32), "codomain dimension");
        assert_eq!(matrix.ncols(), n.pow(domain.len() as u32), "domain dimension");
        RepOperator { domain, codomain, matrix }
    }

    pub fn identity(ctx: &RootContext, colors: &[C64]) -> Self {
        let d = (ctx.n() as usize).pow(colors.len() as u32);
        RepOperator { domain: colors.to_vec(), codomain: colors.to_vec(), matrix: CMat::identity(d, d) }
    }

    /// `self . other`, i.e. apply `other` first.
    pub fn compose(&self, other: &RepOperator) -> Result<RepOperator, QError> {
        if !same_colors(&self.domain, &other.codomain) {
            return Err(QError::ColorMismatch { expected: self.domain.clone(), found: other.codomain.clone() });
        }
        Ok(RepOperator {
            domain: other.domain.clone(),
            codomain: self.codomain.clone(),
            matrix: &self.matrix * &other.matrix,
        })
    }

    pub fn tensor(&self, other: &RepOperator) -> RepOperator {
        let cat = |x: &[C64], y: &[C64]| x.iter().chain(y).cloned().collect::<Vec<_>>();
        RepOperator {
            domain: cat(&self.domain, &other.domain),
            codomain: cat(&self.codomain, &other.codomain),
            matrix: self.matrix.kronecker(&other.matrix),
        }
    }

    pub fn scale(&self, z: C64) -> RepOperator {
        RepOperator { matrix: &self.matrix * z, ..self.clone() }
    }

    /// Frobenius norm of `self - other`.
    pub fn distance(&self, other: &RepOperator) -> f64 {
        (&self.matrix - &other.matrix).norm()
    }

    pub fn norm(&self) -> f64 {
        self.matrix.norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gen {
    E,
    F,
    K,
}

/// `E e_j = [j] e_{j-1}`, `F e_j = [2a-j] e_{j+1}`, `K e_j = xi^(a-j) e_j`.
pub fn generators(ctx: &RootContext, a: Color) -> Result<(RepOperator, RepOperator, RepOperator), QError> {
    let av = a.checked()?;
    let n = ctx.n() as usize;
    let mut e = CMat::zeros(n, n);
    let mut f = CMat::zeros(n, n);
    let mut k = CMat::zeros(n, n);
    for j in 0..n {
        let jf = j as f64;
        if j > 0 {
            e[(j - 1, j)] = ctx.qint(c(jf, 0.0));
        }
        if j + 1 < n {
            f[(j + 1, j)] = ctx.qint(2.0 * av - jf);
        }
        k[(j, j)] = ctx.xi_pow(av - jf);
    }
    let wrap = |m: CMat| RepOperator::new(vec![av], vec![av], m, ctx.n());
    Ok((wrap(e), wrap(f), wrap(k)))
}

pub fn generator(ctx: &RootContext, g: Gen, a: Color) -> Result<RepOperator, QError> {
    let (e, f, k) = generators(ctx, a)?;
    Ok(match g {
        Gen::E => e,
        Gen::F => f,
        Gen::K => k,
    })
}

fn diag_inverse(m: &CMat) -> CMat {
    CMat::from_diagonal(&m.diagonal().map(|z| 1.0 / z))
}

/// `Delta(E) = E(x)K + K^-1(x)E`, `Delta(F) = F(x)K + K^-1(x)F`, `Delta(K) = K(x)K`.
pub fn coproduct_action(ctx: &RootContext, g: Gen, a: Color, b: Color) -> Result<RepOperator, QError> {
    let (ea, fa, ka) = generators(ctx, a)?;
    let (eb, fb, kb) = generators(ctx, b)?;
    let kai = diag_inverse(&ka.matrix);
    let m = match g {
        Gen::E => ea.matrix.kronecker(&kb.matrix) + kai.kronecker(&eb.matrix),
        Gen::F => fa.matrix.kronecker(&kb.matrix) + kai.kronecker(&fb.matrix),
        Gen::K => ka.matrix.kronecker(&kb.matrix),
    };
    Ok(RepOperator::new(vec![a.value, b.value], vec![a.value, b.value], m, ctx.n()))
}

/// Three-fold coproduct `(Delta (x) id) Delta(g)` on `V^a (x) V^b (x) V^c`.
pub fn coproduct3(ctx: &RootContext, g: Gen, a: Color, b: Color, cc: Color) -> Result<CMat, QError> {
    let ab = coproduct_action(ctx, g, a, b)?.matrix;
    let (ec, fc, kc) = generators(ctx, cc)?;
    let kab = coproduct_action(ctx, Gen::K, a, b)?.matrix;
    let kabi = diag_inverse(&kab);
    Ok(match g {
        Gen::E => ab.kronecker(&kc.matrix) + kabi.kronecker(&ec.matrix),
        Gen::F => ab.kronecker(&kc.matrix) + kabi.kronecker(&fc.matrix),
        Gen::K => ab.kronecker(&kc.matrix),
    })
}

/// Duality pairing `V^a (x) V^(n-1-a) -> C`, `(e_i, e_j) -> delta_{i,n-1-j} xi^(-(a-i)(n-1))`.
pub fn cap(ctx: &RootContext, a: Color) -> Result<RepOperator, QError> {
    let av = a.checked()?;
    let n = ctx.n() as usize;
    let nm1 = ctx.nf() - 1.0;
    let mut m = CMat::zeros(1, n * n);
    for i in 0..n {
        m[(0, i * n + (n - 1 - i))] = ctx.xi_pow(-(av - i as f64) * nm1);
    }
    Ok(RepOperator::new(vec![av, nm1 - av], vec![], m, ctx.n()))
}

/// Invariant vector `sum_i xi^((b-n+1+i)(n-1)) e_i (x) e_{n-1-i}` of `V^a (x) V^b`, `b = n-1-a`.
pub fn cup(ctx: &RootContext, a: Color) -> Result<RepOperator, QError> {
    let av = a.checked()?;
    let n = ctx.n() as usize;
    let nm1 = ctx.nf() - 1.0;
    let b = nm1 - av;
    let mut m = CMat::zeros(n * n, 1);
    for i in 0..n {
        m[(i * n + (n - 1 - i), 0)] = ctx.xi_pow((b - nm1 + i as f64) * nm1);
    }
    Ok(RepOperator::new(vec![], vec![av, b], m, ctx.n()))
}

/// Braiding `V^a (x) V^b -> V^b (x) V^a` (R-matrix composed with the flip).
pub fn rmatrix(ctx: &RootContext, a: Color, b: Color) -> Result<RepOperator, QError> {
    let av = a.checked()?;
    let bv = b.checked()?;
    let n = ctx.n() as usize;
    let mut m = CMat::zeros(n * n, n * n);
    for u in 0..n {
        for v in 0..n {
            let (uf, vf) = (u as f64, v as f64);
            for mm in 0..=u.min(n - v - 1) {
                let mf = mm as f64;
                let ph = ctx.xi_pow(2.0 * (av - uf) * (bv - vf) - mf * (av - bv - uf + vf) - mf * (mf + 1.0) / 2.0);
                let coef = ctx.qfact(mm as u32)
                    * ph
                    * ctx.qbinom_re(uf, uf - mf)?
                    * ctx.qbinom(2.0 * bv - vf, 2.0 * bv - vf - mf)?;
                m[((v + mm) * n + (u - mm), u * n + v)] += coef;
            }
        }
    }
    Ok(RepOperator::new(vec![av, bv], vec![bv, av], m, ctx.n()))
}

/// The negative crossing `V^a (x) V^b -> V^b (x) V^a`, the inverse of `rmatrix(b, a)`.
pub fn rmatrix_inverse(ctx: &RootContext, a: Color, b: Color) -> Result<RepOperator, QError> {
    let r = rmatrix(ctx, b, a)?;
    let inv = r
        .matrix
        .clone()
        .try_inverse()
        .ok_or_else(|| QError::SingularMatrix(format!("R-matrix for colors ({}, {})", b.value, a.value)))?;
    Ok(RepOperator::new(vec![a.value, b.value], vec![b.value, a.value], inv, ctx.n()))
}

/// `t_a = a (a + 1 - n)`; a positive curl acts by `xi^(2 t_a)`.
pub fn twist_exponent(ctx: &RootContext, a: C64) -> C64 {
    a * (a + 1.0 - ctx.nf())
}

/// Positive curl `(id (x) cap)(R_a^a (x) id)(id (x) cup)` on `V^a`.
pub fn positive_curl(ctx: &RootContext, a: Color) -> Result<RepOperator, QError> {
    let id = RepOperator::identity(ctx, &[a.value]);
    let up = id.tensor(&cup(ctx, a)?);
    let cross = rmatrix(ctx, a, a)?.tensor(&RepOperator::identity(ctx, &[a.complement(ctx).value]));
    let down = id.tensor(&cap(ctx, a)?);
    down.compose(&cross.compose(&up)?)
}

/// `|| K E K^-1 - xi E || + || K F K^-1 - xi^-1 F || + || [E,F] - (K^2 - K^-2)/(xi - xi^-1) ||`.
pub fn algebra_relation_residual(ctx: &RootContext, a: Color) -> Result<f64, QError> {
    let (e, f, k) = generators(ctx, a)?;
    let (e, f, k) = (e.matrix, f.matrix, k.matrix);
    let ki = diag_inverse(&k);
    let xi = ctx.xi();
    let r1 = (&k * &e * &ki - &e * xi).norm();
    let r2 = (&k * &f * &ki - &f / xi).norm();
    let comm = &e * &f - &f * &e;
    let rhs = (&k * &k - &ki * &ki) / (xi - 1.0 / xi);
    let r3 = (comm - rhs).norm();
    Ok(r1 + r2 + r3)
}

/// Relative residual of `R Delta(x) = Delta(x) R` for `x = E, F, K`.
pub fn intertwiner_residual(ctx: &RootContext, a: Color, b: Color) -> Result<f64, QError> {
    let r = rmatrix(ctx, a, b)?.matrix;
    let mut worst: f64 = 0.0;
    for g in [Gen::E, Gen::F, Gen::K] {
        let dab = coproduct_action(ctx, g, a, b)?.matrix;
        let dba = coproduct_action(ctx, g, b, a)?.matrix;
        let lhs = &r * &dab;
        let rhs = &dba * &r;
        worst = worst.max((&lhs - &rhs).norm() / (1.0 + lhs.norm()));
    }
    Ok(worst)
}

/// Relative residual of the braid relation on `V^a (x) V^b (x) V^c`.
pub fn yang_baxter_residual(ctx: &RootContext, a: Color, b: Color, cc: Color) -> Result<f64, QError> {
    let id = |x: Color| RepOperator::identity(ctx, &[x.value]);
    let lhs = rmatrix(ctx, b, cc)?
        .tensor(&id(a))
        .compose(&id(b).tensor(&rmatrix(ctx, a, cc)?))?
        .compose(&rmatrix(ctx, a, b)?.tensor(&id(cc)))?;
    let rhs = id(cc)
        .tensor(&rmatrix(ctx, a, b)?)
        .compose(&rmatrix(ctx, a, cc)?.tensor(&id(b)))?
        .compose(&id(a).tensor(&rmatrix(ctx, b, cc)?))?;
    Ok(lhs.distance(&rhs) / (1.0 + lhs.norm()))
}

/// Worst invariance residual of cap and cup under the coproduct action.
pub fn duality_residual(ctx: &RootContext, a: Color) -> Result<f64, QError> {
    let abar = a.complement(ctx);
    let cp = cap(ctx, a)?.matrix;
    let cu = cup(ctx, a)?.matrix;
    let mut worst: f64 = 0.0;
    for (g, eps) in [(Gen::E, 0.0), (Gen::F, 0.0), (Gen::K, 1.0)] {
        let d = coproduct_action(ctx, g, a, abar)?.matrix;
        let dim = d.nrows();
        let target = CMat::identity(dim, dim) * c(eps, 0.0);
        worst = worst.max((&cp * (&d - &target)).norm());
        worst = worst.max(((&d - &target) * &cu).norm());
    }
    Ok(worst)
}

/// Both zig-zag composites minus the identity.
pub fn zigzag_residual(ctx: &RootContext, a: Color) -> Result<f64, QError> {
    let abar = a.complement(ctx);
    let ida = RepOperator::identity(ctx, &[a.value]);
    let idb = RepOperator::identity(ctx, &[abar.value]);
    let z1 = cap(ctx, a)?.tensor(&ida).compose(&ida.tensor(&cup(ctx, abar)?))?;
    let z2 = idb.tensor(&cap(ctx, a)?).compose(&cup(ctx, abar)?.tensor(&idb))?;
    Ok(z1.distance(&ida).max(z2.distance(&idb)))
}

/// Integer part of a color difference, used when wiring diagrams.
pub fn integer_gap(x: C64, y: C64) -> Option<i64> {
    as_integer(x - y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(n: u32) -> RootContext {
        RootContext::new(n).unwrap()
    }

    #[test]
    fn k_and_e_read_off() {
        let cx = ctx(4);
        let a = Color::new(c(0.31, 0.2));
        let (e, _, k) = generators(&cx, a).unwrap();
        assert!((k.matrix[(0, 0)] - cx.xi_pow(a.value)).norm() < 1e-14);
        assert!(e.matrix.column(0).norm() < 1e-15);
        assert!(algebra_relation_residual(&cx, a).unwrap() < 1e-10);
    }

    #[test]
    fn half_integer_rejected() {
        assert!(matches!(generators(&ctx(3), Color::re(1.5)), Err(QError::HalfIntegerColor(_))));
        assert!(cap(&ctx(3), Color::re(2.0)).is_err());
    }

    #[test]
    fn coproduct_on_highest_vectors() {
        let cx = ctx(3);
        let (a, b) = (Color::re(0.3), Color::re(1.1));
        let de = coproduct_action(&cx, Gen::E, a, b).unwrap().matrix;
        assert!(de.column(0).norm() < 1e-15);
        let df = coproduct_action(&cx, Gen::F, a, b).unwrap().matrix;
        let n = 3;
        let want_10 = cx.qint(c(0.6, 0.0)) * cx.xi_pow_re(1.1);
        let want_01 = cx.xi_pow_re(-0.3) * cx.qint(c(2.2, 0.0));
        assert!((df[(n, 0)] - want_10).norm() < 1e-13);
        assert!((df[(1, 0)] - want_01).norm() < 1e-13);
        let dk = coproduct_action(&cx, Gen::K, a, b).unwrap().matrix;
        let (_, _, ka) = generators(&cx, a).unwrap();
        let (_, _, kb) = generators(&cx, b).unwrap();
        assert!((dk - ka.matrix.kronecker(&kb.matrix)).norm() < 1e-15);
    }

    #[test]
    fn cap_entries() {
        let cx = ctx(3);
        let m = cap(&cx, Color::re(0.4)).unwrap().matrix;
        assert!((m[(0, 2)] - cx.xi_pow_re(-0.4 * 2.0)).norm() < 1e-15);
        for i in 0..3 {
            for j in 0..3 {
                if i + j != 2 {
                    assert_eq!(m[(0, i * 3 + j)], c(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn cup_n2_explicit() {
        let cx = ctx(2);
        let m = cup(&cx, Color::re(0.3)).unwrap().matrix;
        assert!((m[(1, 0)] - cx.xi_pow_re(-0.3)).norm() < 1e-15);
        assert!((m[(2, 0)] - cx.xi_pow_re(0.7)).norm() < 1e-15);
        assert_eq!(m[(0, 0)], c(0.0, 0.0));
    }

    #[test]
    fn zigzag_and_duality() {
        for n in 2..=5 {
            let cx = ctx(n);
            let a = Color::new(c(0.37 + n as f64 * 0.21, -0.15));
            assert!(zigzag_residual(&cx, a).unwrap() < 1e-10);
            assert!(duality_residual(&cx, a).unwrap() < 1e-10);
        }
    }

    #[test]
    fn r_matrix_highest_and_m0() {
        let cx = ctx(4);
        let (a, b) = (Color::re(0.23), Color::re(1.41));
        let r = rmatrix(&cx, a, b).unwrap().matrix;
        assert!((r[(0, 0)] - cx.xi_pow_re(2.0 * 0.23 * 1.41)).norm() < 1e-13);
        let (u, v) = (2usize, 1usize);
        let want = cx.xi_pow_re(2.0 * (0.23 - 2.0) * (1.41 - 1.0));
        assert!((r[(v * 4 + u, u * 4 + v)] - want).norm() < 1e-12);
        assert!(intertwiner_residual(&cx, a, b).unwrap() < 1e-9);
    }

    #[test]
    fn reidemeister_two_and_twist() {
        let cx = ctx(3);
        let (a, b) = (Color::re(0.71), Color::new(c(1.2, 0.3)));
        let pos = rmatrix(&cx, a, b).unwrap();
        let neg = rmatrix_inverse(&cx, b, a).unwrap();
        let id = RepOperator::identity(&cx, &[a.value, b.value]);
        assert!(neg.compose(&pos).unwrap().distance(&id) < 1e-9);
        let curl = positive_curl(&cx, a).unwrap();
        let want = cx.xi_pow(2.0 * twist_exponent(&cx, a.value));
        let ida = RepOperator::identity(&cx, &[a.value]);
        assert!(curl.distance(&ida.scale(want)) < 1e-10);
    }

    #[test]
    fn yang_baxter_small() {
        let cx = ctx(3);
        let r = yang_baxter_residual(&cx, Color::re(0.2), Color::re(1.37), Color::new(c(0.6, 0.1))).unwrap();
        assert!(r < 1e-8, "{r}");
    }

    #[test]
    fn compose_checks_colors() {
        let cx = ctx(2);
        let x = RepOperator::identity(&cx, &[c(0.3, 0.0)]);
        let y = RepOperator::identity(&cx, &[c(0.4, 0.0)]);
        assert!(matches!(x.compose(&y), Err(QError::ColorMismatch { .. })));
    }
}
