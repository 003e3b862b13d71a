//! Direct evaluation of a (1,1)-tangle as an operator on `V^x`.

use crate::cgc::{inclusion, projection};
use crate::error::QError;
use crate::qarith::{RootContext, C64};
use crate::repcat::{cap, cup, rmatrix, rmatrix_inverse, CMat, Color};

use super::diagram::{Event, MorseDiagram, Sign};

/// Column-stacked state: a map from the bottom strand into the tensor product of the
/// current strands, stored with the leftmost strand as the most significant digit and
/// the input index last.
struct State {
    strands: usize,
    data: Vec<C64>,
}

impl State {
    /// Apply `op` (`n^r_out x n^r_in`) to strands `p..p+r_in`.
    fn apply(&mut self, n: usize, p: usize, r_in: usize, r_out: usize, op: &CMat) {
        let left = n.pow(p as u32);
        let right = n.pow((self.strands - p - r_in) as u32) * n;
        let (din, dout) = (n.pow(r_in as u32), n.pow(r_out as u32));
        let mut out = vec![C64::new(0.0, 0.0); left * dout * right];
        for l in 0..left {
            for o in 0..dout {
                let dst = (l * dout + o) * right;
                for i in 0..din {
                    let w = op[(o, i)];
                    if w == C64::new(0.0, 0.0) {
                        continue;
                    }
                    let src = (l * din + i) * right;
                    for r in 0..right {
                        out[dst + r] += w * self.data[src + r];
                    }
                }
            }
        }
        self.strands = self.strands + r_out - r_in;
        self.data = out;
    }
}

/// The operator of a (1,1)-tangle, built from the bottom up.
pub fn tangle_matrix(ctx: &RootContext, t: &MorseDiagram) -> Result<CMat, QError> {
    let levels = t.levels()?;
    if t.top.len() != 1 || levels.last().map(|l| l.len()) != Some(1) {
        return Err(QError::Diagram("a (1,1)-tangle needs one strand at the top and one at the bottom".into()));
    }
    let n = ctx.n() as usize;
    let eff = |s| t.effective(ctx, s).map(Color::new);
    let mut st = State { strands: 1, data: CMat::identity(n, n).as_slice().to_vec() };
    for (i, ev) in t.events.iter().enumerate().rev() {
        let (above, below) = (&levels[i], &levels[i + 1]);
        match ev {
            Event::Cap { at, .. } => st.apply(n, *at, 2, 0, &cap(ctx, eff(&below[*at])?)?.matrix),
            Event::Cup { at } => st.apply(n, *at, 0, 2, &cup(ctx, eff(&above[*at])?)?.matrix),
            Event::Cross { at, sign } => {
                let (x, y) = (eff(&below[*at])?, eff(&below[at + 1])?);
                let op = match sign {
                    Sign::Pos => rmatrix(ctx, x, y)?,
                    Sign::Neg => rmatrix_inverse(ctx, x, y)?,
                };
                st.apply(n, *at, 2, 2, &op.matrix)
            }
            Event::Merge { at, .. } => {
                let op = inclusion(ctx, eff(&above[*at])?, eff(&above[at + 1])?, eff(&below[*at])?)?;
                st.apply(n, *at, 1, 2, &op.matrix)
            }
            Event::Split { at, .. } => {
                let op = projection(ctx, eff(&below[*at])?, eff(&below[at + 1])?, eff(&above[*at])?)?;
                st.apply(n, *at, 2, 1, &op.matrix)
            }
        }
    }
    // data is row-major (out, in); nalgebra is column-major
    Ok(CMat::from_row_slice(n, n, &st.data))
}

/// The scalar `lambda` with `T = lambda * id`; errors if `T` is not scalar.
pub fn tangle_scalar(ctx: &RootContext, t: &MorseDiagram) -> Result<C64, QError> {
    let m = tangle_matrix(ctx, t)?;
    let n = m.nrows();
    let lambda = m.trace() / n as f64;
    let off = (&m - CMat::identity(n, n) * lambda).norm();
    if off > 1e-8 * (1.0 + lambda.norm()) {
        return Err(QError::NonScalarOperator(off));
    }
    Ok(lambda)
}
