//! Clebsch-Gordan quantum coefficients and the trivalent vertex maps.

use nalgebra::DMatrix;

use crate::error::QError;
use crate::qarith::{as_integer, c, near_half_integer, KahanSum, RootContext, C64};
use crate::repcat::{cap, coproduct_action, generators, regular, CMat, Color, Gen, RepOperator};

/// Indices of `C^{a,b,c}_{u,v,t}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgcIndex {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub u: u32,
    pub v: u32,
    pub t: u32,
}

/// `a + b - c` as an integer in `[0, n-1]`.
pub fn triple_gap(ctx: &RootContext, a: C64, b: C64, cc: C64) -> Result<u32, QError> {
    match as_integer(a + b - cc) {
        Some(k) if (0..ctx.n() as i64).contains(&k) => Ok(k as u32),
        _ => Err(QError::InadmissibleTriple {
            a,
            b,
            c: cc,
            why: format!("a + b - c must be an integer in [0, {}]", ctx.n() - 1),
        }),
    }
}

fn check_regular(xs: &[C64]) -> Result<(), QError> {
    for &x in xs {
        regular(x)?;
    }
    Ok(())
}

pub fn cgqc(ctx: &RootContext, idx: CgcIndex) -> Result<C64, QError> {
    let CgcIndex { a, b, c: cc, u, v, t } = idx;
    check_regular(&[a, b, cc])?;
    let k = triple_gap(ctx, a, b, cc)?;
    let n = ctx.n();
    if u >= n || v >= n || t >= n {
        return Err(QError::OutOfRange(format!("weight index ({u}, {v}, {t}) outside [0, {}]", n - 1)));
    }
    if u as i64 + v as i64 - t as i64 != k as i64 {
        return Ok(c(0.0, 0.0));
    }
    cgqc_core(ctx, a, b, cc, k, u, v, t)
}

#[allow(clippy::too_many_arguments)]
fn cgqc_core(ctx: &RootContext, a: C64, b: C64, cc: C64, k: u32, u: u32, v: u32, t: u32) -> Result<C64, QError> {
    let nm1 = ctx.nf() - 1.0;
    let (uf, vf, tf) = (u as f64, v as f64, t as f64);
    let kf = k as f64;
    // sqrt(-1)^(c-a-b) on the principal branch; c-a-b = -k is an integer here
    let fourth = C64::from_polar(1.0, -std::f64::consts::FRAC_PI_2 * kf);
    let sign = if (v as i64 - t as i64).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let ph = ctx.xi_pow((vf * (2.0 * b - vf + 1.0) - uf * (2.0 * a - uf + 1.0)) / 2.0);
    let pre = fourth * sign * ph / ctx.qbinom(2.0 * cc, 2.0 * cc - tf)? * ctx.qbinom(2.0 * cc, a + b + cc - nm1)?;
    let mut sum = KahanSum::default();
    for z in 0..=t {
        let w = t - z;
        let uz = u as i64 - z as i64;
        // [a+b-c; u-z] vanishes unless 0 <= u-z <= a+b-c
        if uz < 0 || uz > k as i64 {
            continue;
        }
        let (zf, wf) = (z as f64, w as f64);
        let s = if z % 2 == 0 { 1.0 } else { -1.0 };
        let term = ctx.xi_pow((2.0 * zf - tf) * (2.0 * cc - tf + 1.0) / 2.0)
            * ctx.qbinom_re(kf, uz as f64)?
            * ctx.qbinom(2.0 * a - uf + zf, 2.0 * a - uf)?
            * ctx.qbinom(2.0 * b - vf + wf, 2.0 * b - vf)?;
        sum.add(term * s);
    }
    Ok(pre * sum.value())
}

/// `Y_c^{a,b} : V^c -> V^a (x) V^b`.
pub fn inclusion(ctx: &RootContext, a: Color, b: Color, cc: Color) -> Result<RepOperator, QError> {
    let (av, bv, cv) = (a.value, b.value, cc.value);
    check_regular(&[av, bv, cv])?;
    let k = triple_gap(ctx, av, bv, cv)?;
    let n = ctx.n();
    let nu = n as usize;
    let mut m = CMat::zeros(nu * nu, nu);
    for t in 0..n {
        for u in 0..n {
            let v = t as i64 + k as i64 - u as i64;
            if !(0..n as i64).contains(&v) {
                continue;
            }
            let v = v as u32;
            m[(u as usize * nu + v as usize, t as usize)] = cgqc_core(ctx, av, bv, cv, k, u, v, t)?;
        }
    }
    Ok(RepOperator::new(vec![cv], vec![av, bv], m, n))
}

/// `Y^c_{a,b} : V^a (x) V^b -> V^c`, entries `C^{n-1-b,n-1-a,n-1-c}_{n-1-v,n-1-u,n-1-t}`.
pub fn projection(ctx: &RootContext, a: Color, b: Color, cc: Color) -> Result<RepOperator, QError> {
    let (av, bv, cv) = (a.value, b.value, cc.value);
    check_regular(&[av, bv, cv])?;
    triple_gap(ctx, av, bv, cv)?;
    let nm1 = ctx.nf() - 1.0;
    let dual = inclusion(ctx, Color::new(nm1 - bv), Color::new(nm1 - av), Color::new(nm1 - cv))?.matrix;
    let nu = ctx.n() as usize;
    let mut m = CMat::zeros(nu, nu * nu);
    for t in 0..nu {
        for u in 0..nu {
            for v in 0..nu {
                m[(t, u * nu + v)] = dual[((nu - 1 - v) * nu + (nu - 1 - u), nu - 1 - t)];
            }
        }
    }
    Ok(RepOperator::new(vec![av, bv], vec![cv], m, ctx.n()))
}

/// Projection obtained by raising the left leg of an inclusion:
/// `(cap_{a,n-1-a} (x) id_c)(id_a (x) Y_b^{n-1-a,c})`.
pub fn left_bent_projection(ctx: &RootContext, a: Color, b: Color, cc: Color) -> Result<RepOperator, QError> {
    let abar = a.complement(ctx);
    let ida = RepOperator::identity(ctx, &[a.value]);
    let idc = RepOperator::identity(ctx, &[cc.value]);
    cap(ctx, a)?.tensor(&idc).compose(&ida.tensor(&inclusion(ctx, abar, cc, b)?))
}

/// Projection obtained by raising the right leg:
/// `(id_c (x) cap_{n-1-b,b})(Y_a^{c,n-1-b} (x) id_b)`.
pub fn right_bent_projection(ctx: &RootContext, a: Color, b: Color, cc: Color) -> Result<RepOperator, QError> {
    let bbar = b.complement(ctx);
    let idb = RepOperator::identity(ctx, &[b.value]);
    let idc = RepOperator::identity(ctx, &[cc.value]);
    idc.tensor(&cap(ctx, bbar)?).compose(&inclusion(ctx, cc, bbar, a)?.tensor(&idb))
}

/// Closed form of the left-bent projection, `L^{a,b,c}_{u,v,t} = C^{n-1-a,c,b}_{n-1-u,t,v} xi^(-a(n-1)) xi^((n-1)u)`.
pub fn l_form(ctx: &RootContext, a: Color, b: Color, cc: Color) -> Result<RepOperator, QError> {
    let (av, bv, cv) = (a.value, b.value, cc.value);
    let nm1 = ctx.nf() - 1.0;
    let nu = ctx.n() as usize;
    let inc = inclusion(ctx, Color::new(nm1 - av), cc, b)?.matrix;
    let mut m = CMat::zeros(nu, nu * nu);
    for t in 0..nu {
        for u in 0..nu {
            for v in 0..nu {
                let ph = ctx.xi_pow(-av * nm1 + nm1 * u as f64);
                m[(t, u * nu + v)] = inc[((nu - 1 - u) * nu + t, v)] * ph;
            }
        }
    }
    Ok(RepOperator::new(vec![av, bv], vec![cv], m, ctx.n()))
}

/// Residual of the scalar bend identity
/// `C^{n-1-a,c,b}_{n-1-u,t,v} xi^(-a(n-1)) xi^((n-1)u) = C^{c,n-1-b,a}_{t,n-1-v,u} xi^(-(n-1-b)(n-1)) xi^((n-1)(n-1-v))`.
pub fn bend_identity_residual(ctx: &RootContext, a: C64, b: C64, cc: C64, u: u32, v: u32, t: u32) -> Result<f64, QError> {
    let nm1 = ctx.nf() - 1.0;
    let n = ctx.n();
    let lhs = cgqc(ctx, CgcIndex { a: nm1 - a, b: cc, c: b, u: n - 1 - u, v: t, t: v })?
        * ctx.xi_pow(-a * nm1 + nm1 * u as f64);
    let rhs = cgqc(ctx, CgcIndex { a: cc, b: nm1 - b, c: a, u: t, v: n - 1 - v, t: u })?
        * ctx.xi_pow(-(nm1 - b) * nm1 + nm1 * (nm1 - v as f64));
    Ok((lhs - rhs).norm() / (1.0 + lhs.norm()))
}

/// Worst relative residual of `Delta(x) Y = Y x` over the generators.
pub fn inclusion_module_map_residual(ctx: &RootContext, a: Color, b: Color, cc: Color) -> Result<f64, QError> {
    let y = inclusion(ctx, a, b, cc)?.matrix;
    let (e, f, k) = generators(ctx, cc)?;
    let mut worst: f64 = 0.0;
    for (g, x) in [(Gen::E, e), (Gen::F, f), (Gen::K, k)] {
        let d = coproduct_action(ctx, g, a, b)?.matrix;
        let lhs = &d * &y;
        worst = worst.max((&lhs - &y * &x.matrix).norm() / (1.0 + lhs.norm()));
    }
    Ok(worst)
}

/// Same for the projection: `x Y^c = Y^c Delta(x)`.
pub fn projection_module_map_residual(ctx: &RootContext, a: Color, b: Color, cc: Color) -> Result<f64, QError> {
    let p = projection(ctx, a, b, cc)?.matrix;
    let (e, f, k) = generators(ctx, cc)?;
    let mut worst: f64 = 0.0;
    for (g, x) in [(Gen::E, e), (Gen::F, f), (Gen::K, k)] {
        let d = coproduct_action(ctx, g, a, b)?.matrix;
        let lhs = &x.matrix * &p;
        worst = worst.max((&lhs - &p * &d).norm() / (1.0 + lhs.norm()));
    }
    Ok(worst)
}

/// The theta graph with through color `a` and inner legs `b, c`:
/// `Y^a_{b,c} Y_a^{b,c} = qbinom(2a+n, 2a+1) Id_a`. Returns the closed form
/// after checking the matrix product against it.
pub fn theta_value(ctx: &RootContext, a: Color, b: Color, cc: Color) -> Result<C64, QError> {
    let (closed, res) = theta_residual(ctx, a, b, cc)?;
    if res > 1e-8 {
        return Err(QError::NonScalarOperator(res));
    }
    Ok(closed)
}

/// `(closed form, relative distance of the matrix product from closed form * Id)`.
pub fn theta_residual(ctx: &RootContext, a: Color, b: Color, cc: Color) -> Result<(C64, f64), QError> {
    let prod = projection(ctx, b, cc, a)?.compose(&inclusion(ctx, b, cc, a)?)?;
    let closed = ctx.theta(a.checked()?);
    let target = RepOperator::identity(ctx, &[a.value]).scale(closed);
    Ok((closed, prod.distance(&target) / (1.0 + target.norm())))
}

/// `|| id - sum_c qbinom(2c+n,2c+1)^-1 Y_c^{a,b} Y^c_{a,b} ||_F` on `V^a (x) V^b`.
pub fn identity_decomposition_residual(ctx: &RootContext, a: Color, b: Color) -> Result<f64, QError> {
    let nu = ctx.n() as usize;
    let mut acc = DMatrix::<C64>::zeros(nu * nu, nu * nu);
    for k in 0..ctx.n() {
        let cv = a.value + b.value - k as f64;
        if near_half_integer(cv, 1e-6) {
            return Err(QError::HalfIntegerColor(cv));
        }
        let cc = Color::new(cv);
        let piece = inclusion(ctx, a, b, cc)?.compose(&projection(ctx, a, b, cc)?)?;
        acc += piece.matrix / ctx.theta(cv);
    }
    Ok((DMatrix::<C64>::identity(nu * nu, nu * nu) - acc).norm())
}

/// `Delta(F) Y(e_t) = [2c - t] Y(e_{t+1})` and `Delta(E) Y(e_0) = 0`.
pub fn highest_weight_residual(ctx: &RootContext, a: Color, b: Color, cc: Color) -> Result<f64, QError> {
    let y = inclusion(ctx, a, b, cc)?.matrix;
    let de = coproduct_action(ctx, Gen::E, a, b)?.matrix;
    let df = coproduct_action(ctx, Gen::F, a, b)?.matrix;
    let mut worst = (&de * y.column(0)).norm();
    for t in 0..(ctx.n() as usize - 1) {
        let lhs = &df * y.column(t);
        let rhs = y.column(t + 1) * ctx.qint(2.0 * cc.value - t as f64);
        worst = worst.max((&lhs - &rhs).norm() / (1.0 + lhs.norm()));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(n: u32) -> RootContext {
        RootContext::new(n).unwrap()
    }

    #[test]
    fn weight_conservation() {
        let cx = ctx(3);
        let idx = CgcIndex { a: c(0.3, 0.0), b: c(1.15, 0.0), c: c(0.45, 0.0), u: 1, v: 1, t: 0 };
        assert_eq!(cgqc(&cx, idx).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn t_zero_single_term() {
        let cx = ctx(4);
        let (a, b) = (c(0.3, 0.1), c(1.2, 0.0));
        let cc = a + b - 2.0;
        let got = cgqc(&cx, CgcIndex { a, b, c: cc, u: 0, v: 2, t: 0 }).unwrap();
        // only z = w = 0 survives, which needs u = 0
        let nm1 = 3.0;
        let want = C64::from_polar(1.0, -std::f64::consts::PI)
            * cx.xi_pow((2.0 * (2.0 * b - 2.0 + 1.0)) / 2.0)
            * cx.qbinom(2.0 * cc, a + b + cc - nm1).unwrap()
            * cx.qbinom_re(2.0, 0.0).unwrap();
        assert!((got - want).norm() < 1e-12 * (1.0 + want.norm()));
    }

    #[test]
    fn inadmissible_triple_is_an_error() {
        let cx = ctx(3);
        let r = inclusion(&cx, Color::re(0.3), Color::re(0.4), Color::re(0.2));
        assert!(matches!(r, Err(QError::InadmissibleTriple { .. })));
        let r = inclusion(&cx, Color::re(0.3), Color::re(0.4), Color::re(0.7 - 5.0));
        assert!(r.is_err());
    }

    #[test]
    fn n2_hand_expansion() {
        // n = 2, a = b = 0.3, c = 0.6: V^c sits in V^a (x) V^b as the top component.
        let cx = ctx(2);
        let y = inclusion(&cx, Color::re(0.3), Color::re(0.3), Color::re(0.6)).unwrap().matrix;
        let pre0 = cx.qbinom_re(1.2, 0.2).unwrap();
        assert!((y[(0, 0)] - pre0).norm() < 1e-13);
        assert_eq!(y[(1, 0)], c(0.0, 0.0));
        assert_eq!(y[(3, 0)], c(0.0, 0.0));
        // column t = 1 is F applied to column 0, divided by [2c]
        let df = coproduct_action(&cx, Gen::F, Color::re(0.3), Color::re(0.3)).unwrap().matrix;
        let col1 = (&df * y.column(0)) / cx.qint(c(1.2, 0.0));
        assert!((col1 - y.column(1)).norm() < 1e-12);
    }

    #[test]
    fn module_maps_and_bends() {
        for n in 2..=5u32 {
            let cx = ctx(n);
            let (a, b) = (Color::new(c(0.27 + 0.3 * n as f64, 0.05)), Color::re(1.61));
            let cc = Color::new(a.value + b.value - (n - 1) as f64 / 2.0f64.floor().max(1.0));
            let cc = if triple_gap(&cx, a.value, b.value, cc.value).is_ok() { cc } else { Color::new(a.value + b.value) };
            assert!(inclusion_module_map_residual(&cx, a, b, cc).unwrap() < 1e-9);
            assert!(projection_module_map_residual(&cx, a, b, cc).unwrap() < 1e-9);
            assert!(highest_weight_residual(&cx, a, b, cc).unwrap() < 1e-9);
            let p = projection(&cx, a, b, cc).unwrap();
            assert!(p.distance(&l_form(&cx, a, b, cc).unwrap()) < 1e-9 * (1.0 + p.norm()));
            assert!(p.distance(&left_bent_projection(&cx, a, b, cc).unwrap()) < 1e-9 * (1.0 + p.norm()));
            assert!(p.distance(&right_bent_projection(&cx, a, b, cc).unwrap()) < 1e-9 * (1.0 + p.norm()));
        }
    }

    #[test]
    fn theta_and_decomposition() {
        let cx = ctx(4);
        let (a, b) = (Color::re(0.27), Color::re(1.61));
        assert!(identity_decomposition_residual(&cx, a, b).unwrap() < 1e-9);
        let cc = Color::new(a.value + b.value - 1.0);
        let th = theta_value(&cx, cc, a, b).unwrap();
        assert!((th - cx.theta(cc.value)).norm() < 1e-12);
        let c2 = ctx(2);
        let t = theta_value(&c2, Color::re(0.3), Color::re(0.1), Color::re(0.2)).unwrap();
        // single factor ratio {2.6}/{1}
        assert!((t - c2.qbrace_re(2.6) / c2.qbrace_re(1.0)).norm() < 1e-13);
    }

    #[test]
    fn decomposition_reports_half_integer_summand() {
        let cx = ctx(3);
        let r = identity_decomposition_residual(&cx, Color::re(0.25), Color::re(0.25));
        assert!(matches!(r, Err(QError::HalfIntegerColor(_))));
    }
}
