//! The face (state-sum) model: region colorings weighted by 6j symbols.
//!
//! A level with strands of effective colors `x_1..x_m` carries region colors
//! `c_0..c_m` with `c_0 = a0` and `c_i = c_{i-1} + x_i - l_i`, `l_i` in `0..n`.
//! States are keyed by the integer vector `l`, which keeps the bookkeeping exact.

use std::collections::BTreeMap;

use crate::error::QError;
use crate::qarith::{as_integer, near_half_integer, RootContext, C64};
use crate::repcat::twist_exponent;
use crate::sixj::{sixj, tet, SixJLabels};

use super::diagram::{Event, MorseDiagram, Sign, Strand};

type Key = Vec<i64>;

fn regions(a0: C64, xs: &[C64], key: &[i64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(xs.len() + 1);
    out.push(a0);
    for (x, l) in xs.iter().zip(key) {
        let last = *out.last().unwrap();
        out.push(last + x - *l as f64);
    }
    out
}

fn generic(c: C64) -> Result<C64, QError> {
    if near_half_integer(c, 1e-6) {
        Err(QError::HalfIntegerColor(c))
    } else {
        Ok(c)
    }
}

fn gap(g: C64, what: &str) -> Result<i64, QError> {
    as_integer(g).ok_or_else(|| QError::Diagram(format!("{what}: vertex gap {g} is not an integer")))
}

struct Transfer<'a> {
    ctx: &'a RootContext,
    t: &'a MorseDiagram,
    levels: Vec<Vec<Strand>>,
    a0: C64,
}

impl Transfer<'_> {
    fn eff(&self, s: &Strand) -> Result<C64, QError> {
        self.t.effective(self.ctx, s)
    }

    fn colors(&self, k: usize) -> Result<Vec<C64>, QError> {
        self.levels[k].iter().map(|s| self.eff(s)).collect()
    }

    /// Successor states across event `i` (from level `i+1` up to level `i`) with weights.
    /// Every admissible successor is listed, including those of weight zero.
    fn step(&self, i: usize, key: &Key) -> Result<Vec<(Key, C64)>, QError> {
        let ctx = self.ctx;
        let n = ctx.n() as i64;
        let (above, below) = (&self.levels[i], &self.levels[i + 1]);
        let c = regions(self.a0, &self.colors(i + 1)?, key);
        let splice = |p: usize, del: usize, ins: &[i64]| {
            let mut k = key.clone();
            k.splice(p..p + del, ins.iter().copied());
            k
        };
        let mut out = Vec::new();
        match &self.t.events[i] {
            Event::Cup { at } => {
                let p = *at;
                let x = self.eff(&above[p])?;
                for l in 0..n {
                    let b = generic(c[p] + x - l as f64)?;
                    out.push((splice(p, 0, &[l, n - 1 - l]), ctx.theta(b).inv()));
                }
            }
            Event::Cap { at, .. } => {
                let p = *at;
                if key[p] + key[p + 1] == n - 1 {
                    out.push((splice(p, 2, &[]), ctx.theta(c[p])));
                }
            }
            Event::Cross { at, sign } => {
                let p = *at;
                let (mu, lam) = (self.eff(&below[p])?, self.eff(&below[p + 1])?);
                let (a, cc, b) = (c[p], c[p + 1], c[p + 2]);
                let s = if *sign == Sign::Pos { 1.0 } else { -1.0 };
                for k in 0..n {
                    let j = key[p] + key[p + 1] - k;
                    if !(0..n).contains(&j) {
                        continue;
                    }
                    let d = generic(a + lam - k as f64)?;
                    let tw = twist_exponent(ctx, a) + twist_exponent(ctx, b) - twist_exponent(ctx, cc) - twist_exponent(ctx, d);
                    let w = ctx.xi_pow(tw * s) * sixj(ctx, &SixJLabels::new(mu, a, cc, lam, b, d))?;
                    out.push((splice(p, 2, &[k, j]), w));
                }
            }
            Event::Merge { at, .. } => {
                let p = *at;
                let eta = self.eff(&below[p])?;
                let (lam, mu) = (self.eff(&above[p])?, self.eff(&above[p + 1])?);
                let g = gap(lam + mu - eta, "merge")?;
                let (b, cc) = (c[p], c[p + 1]);
                for j in 0..n {
                    let j2 = g - j + key[p];
                    if !(0..n).contains(&j2) {
                        continue;
                    }
                    let a = generic(b + lam - j as f64)?;
                    out.push((splice(p, 1, &[j, j2]), sixj(ctx, &SixJLabels::new(mu, lam, eta, b, cc, a))?));
                }
            }
            Event::Split { at, .. } => {
                let p = *at;
                let (lam, mu) = (self.eff(&below[p])?, self.eff(&below[p + 1])?);
                let eta = self.eff(&above[p])?;
                let g = gap(lam + mu - eta, "split")?;
                let l = key[p] + key[p + 1] - g;
                if (0..n).contains(&l) {
                    let (b, a, cc) = (c[p], c[p + 1], c[p + 2]);
                    out.push((splice(p, 2, &[l]), tet(ctx, &SixJLabels::new(b, lam, a, mu, cc, eta))?));
                }
            }
        }
        Ok(out)
    }
}

fn transfer<'a>(ctx: &'a RootContext, t: &'a MorseDiagram, a0: C64) -> Result<Transfer<'a>, QError> {
    let levels = t.levels()?;
    if t.top.len() != 1 || levels.last().map(|l| l.len()) != Some(1) {
        return Err(QError::Diagram("the face model runs on a (1,1)-tangle".into()));
    }
    Ok(Transfer { ctx, t, levels, a0: generic(a0)? })
}

/// `Z(a0, a1)` for a (1,1)-tangle, where `a1 = a0 + x - l0` and `x` is the color of
/// the open strand. Equals the scalar of the tangle operator.
pub fn state_sum(ctx: &RootContext, t: &MorseDiagram, a0: C64, l0: i64) -> Result<C64, QError> {
    let tr = transfer(ctx, t, a0)?;
    generic(regions(a0, &tr.colors(tr.levels.len() - 1)?, &[l0])[1])?;
    let mut cur: BTreeMap<Key, C64> = BTreeMap::new();
    cur.insert(vec![l0], C64::new(1.0, 0.0));
    for i in (0..t.events.len()).rev() {
        let mut next: BTreeMap<Key, C64> = BTreeMap::new();
        for (key, amp) in &cur {
            for (k2, w) in tr.step(i, key)? {
                *next.entry(k2).or_insert(C64::new(0.0, 0.0)) += amp * w;
            }
        }
        if next.is_empty() {
            return Err(QError::NoStates(format!("no admissible region coloring above event {i}")));
        }
        cur = next;
    }
    Ok(cur.get(&vec![l0]).copied().unwrap_or(C64::new(0.0, 0.0)))
}

/// All admissible states, each given as the region colors of every level from top to
/// bottom. Exponential in the diagram size; `limit` caps the output.
pub fn enumerate_states(ctx: &RootContext, t: &MorseDiagram, a0: C64, l0: i64, limit: usize) -> Result<Vec<Vec<Vec<C64>>>, QError> {
    let tr = transfer(ctx, t, a0)?;
    let last = t.events.len();
    let mut out = Vec::new();
    let mut stack: Vec<(usize, Vec<Key>)> = vec![(last, vec![vec![l0]])];
    while let Some((lvl, path)) = stack.pop() {
        if out.len() >= limit {
            break;
        }
        if lvl == 0 {
            if path.last().map(|k| k == &vec![l0]).unwrap_or(false) {
                let mut s = Vec::new();
                for (j, key) in path.iter().rev().enumerate() {
                    s.push(regions(a0, &tr.colors(j)?, key));
                }
                out.push(s);
            }
            continue;
        }
        for (k2, _) in tr.step(lvl - 1, path.last().unwrap())? {
            let mut p = path.clone();
            p.push(k2);
            stack.push((lvl - 1, p));
        }
    }
    Ok(out)
}
