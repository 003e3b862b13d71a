//! Sliced (Morse) presentations of colored, oriented, framed trivalent graphs.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::QError;
use crate::qarith::{as_integer, near_half_integer, RootContext, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Dir {
    Down,
    Up,
}

/// A strand segment at some level: the edge it belongs to and which way it points.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Strand {
    pub edge: String,
    pub dir: Dir,
}

impl Strand {
    pub fn new(edge: &str, dir: Dir) -> Self {
        Strand { edge: edge.to_string(), dir }
    }
}

impl fmt::Display for Strand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = match self.dir {
            Dir::Down => "down",
            Dir::Up => "up",
        };
        write!(f, "{}:{d}", self.edge)
    }
}

impl TryFrom<String> for Strand {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        let (edge, d) = s.split_once(':').ok_or_else(|| format!("strand `{s}` must look like `edge:down` or `edge:up`"))?;
        let dir = match d {
            "down" => Dir::Down,
            "up" => Dir::Up,
            _ => return Err(format!("strand `{s}`: direction must be `down` or `up`")),
        };
        Ok(Strand::new(edge, dir))
    }
}

impl From<Strand> for String {
    fn from(s: Strand) -> String {
        s.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Pos,
    #[serde(rename = "-")]
    Neg,
}

/// One slice event, read from top to bottom. `at` is the 0-based position of the
/// leftmost strand involved.
///
/// * `cap`: a maximum, two new strands start at `at`, `at+1`
/// * `cup`: a minimum, strands `at`, `at+1` end
/// * `cross`: strands `at`, `at+1` swap; `+` when the over strand joins bottom-left to top-right
/// * `merge`: strands `at`, `at+1` meet at a vertex and leave as one strand
/// * `split`: strand `at` meets a vertex and leaves as two strands
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum Event {
    Cap { at: usize, out: [Strand; 2] },
    Cup { at: usize },
    Cross { at: usize, sign: Sign },
    Merge { at: usize, out: Strand },
    Split { at: usize, out: [Strand; 2] },
}

impl Event {
    pub fn at(&self) -> usize {
        match self {
            Event::Cap { at, .. } | Event::Cup { at } | Event::Cross { at, .. } | Event::Merge { at, .. } | Event::Split { at, .. } => *at,
        }
    }

    fn shifted(&self, k: usize) -> Event {
        let mut e = self.clone();
        match &mut e {
            Event::Cap { at, .. } | Event::Cup { at } | Event::Cross { at, .. } | Event::Merge { at, .. } | Event::Split { at, .. } => *at += k,
        }
        e
    }
}

/// Parse a color written as `base`, `base+k` or `base-k`. A complex base goes in
/// parentheses, e.g. `(0.13+0.02i)+2`. The integer offset is kept separate from the
/// base so that integrality conditions survive float input.
pub fn parse_color(s: &str) -> Result<C64, QError> {
    let s = s.trim();
    let bad = || QError::OutOfRange(format!("cannot parse color `{s}`; expected `base`, `base+k` or `(re+imi)+k`"));
    let (base, rest) = if let Some(inner) = s.strip_prefix('(') {
        let close = inner.find(')').ok_or_else(bad)?;
        (C64::from_str(&inner[..close]).map_err(|_| bad())?, &inner[close + 1..])
    } else {
        // split at the last sign that is not leading and not part of an exponent
        let bytes = s.as_bytes();
        let split = (1..bytes.len())
            .rev()
            .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
        match split {
            Some(i) if s[i + 1..].parse::<i64>().is_ok() => (C64::new(s[..i].parse::<f64>().map_err(|_| bad())?, 0.0), &s[i..]),
            _ => (C64::new(s.parse::<f64>().map_err(|_| bad())?, 0.0), ""),
        }
    };
    let k: i64 = match rest {
        "" => 0,
        r => r.strip_prefix('+').unwrap_or(r).parse().map_err(|_| bad())?,
    };
    Ok(base + k as f64)
}

#[derive(Debug, Deserialize)]
struct DiagramFile {
    name: String,
    #[serde(default)]
    top: Vec<Strand>,
    events: Vec<Event>,
    #[serde(default)]
    colors: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MorseDiagram {
    pub name: String,
    /// Strands entering from the top; empty for a closed diagram.
    pub top: Vec<Strand>,
    pub events: Vec<Event>,
    pub colors: BTreeMap<String, C64>,
}

pub const BUNDLED: [(&str, &str); 6] = [
    ("unknot", include_str!("../../diagrams/unknot.json")),
    ("theta", include_str!("../../diagrams/theta.json")),
    ("tetrahedron", include_str!("../../diagrams/tetrahedron.json")),
    ("hopf", include_str!("../../diagrams/hopf.json")),
    ("trefoil", include_str!("../../diagrams/trefoil.json")),
    ("figure-eight", include_str!("../../diagrams/figure-eight.json")),
];

/// Which strand segment to cut a closed diagram along.
#[derive(Debug, Clone, PartialEq)]
pub enum Cut {
    /// First level at which the edge appears, leftmost occurrence.
    Edge(String),
    /// Strand `pos` of level `level` (level `k` sits below event `k-1`).
    At { level: usize, pos: usize },
}

/// Outcome of a coloring check; `problems` lists offending vertices and edges.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColoringReport {
    pub ok: bool,
    pub problems: Vec<String>,
}

impl MorseDiagram {
    pub fn from_json(text: &str) -> Result<Self, QError> {
        let raw: DiagramFile = serde_json::from_str(text)
            .map_err(|e| QError::Diagram(format!("line {} column {}: {e}", e.line(), e.column())))?;
        let mut colors = BTreeMap::new();
        for (k, v) in raw.colors {
            colors.insert(k, parse_color(&v)?);
        }
        let d = MorseDiagram { name: raw.name, top: raw.top, events: raw.events, colors };
        d.levels()?;
        Ok(d)
    }

    pub fn bundled(name: &str) -> Result<Self, QError> {
        let text = BUNDLED
            .iter()
            .find(|(k, _)| *k == name)
            .map(|(_, t)| *t)
            .ok_or_else(|| QError::Diagram(format!("no bundled diagram `{name}`")))?;
        Self::from_json(text)
    }

    /// Edge names in order of first appearance.
    pub fn edges(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        let mut push = |s: &Strand| {
            if !out.contains(&s.edge) {
                out.push(s.edge.clone());
            }
        };
        self.top.iter().for_each(&mut push);
        for e in &self.events {
            match e {
                Event::Cap { out, .. } | Event::Split { out, .. } => out.iter().for_each(&mut push),
                Event::Merge { out, .. } => push(out),
                _ => {}
            }
        }
        out
    }

    pub fn is_link(&self) -> bool {
        !self.events.iter().any(|e| matches!(e, Event::Merge { .. } | Event::Split { .. }))
    }

    pub fn with_colors(&self, colors: BTreeMap<String, C64>) -> Self {
        MorseDiagram { colors, ..self.clone() }
    }

    /// Strand lists between events: `levels[0]` is the top, `levels[k+1]` lies below event `k`.
    pub fn levels(&self) -> Result<Vec<Vec<Strand>>, QError> {
        let mut cur = self.top.clone();
        let mut out = vec![cur.clone()];
        for (i, ev) in self.events.iter().enumerate() {
            let err = |msg: String| QError::Diagram(format!("event {i} ({ev:?}): {msg}"));
            let at = ev.at();
            let need = match ev {
                Event::Cap { .. } => 0,
                Event::Split { .. } => 1,
                _ => 2,
            };
            if at + need > cur.len() {
                return Err(err(format!("position out of range for {} strands", cur.len())));
            }
            match ev {
                Event::Cap { out, .. } => {
                    if out[0].edge != out[1].edge || out[0].dir == out[1].dir {
                        return Err(err("a cap must create one edge with opposite directions".into()));
                    }
                    cur.splice(at..at, out.iter().cloned());
                }
                Event::Cup { .. } => {
                    if cur[at].edge != cur[at + 1].edge || cur[at].dir == cur[at + 1].dir {
                        return Err(err("a cup must close one edge with opposite directions".into()));
                    }
                    cur.drain(at..at + 2);
                }
                Event::Cross { .. } => cur.swap(at, at + 1),
                Event::Merge { out, .. } => {
                    cur.splice(at..at + 2, [out.clone()]);
                }
                Event::Split { out, .. } => {
                    cur.splice(at..at + 1, out.iter().cloned());
                }
            }
            out.push(cur.clone());
        }
        Ok(out)
    }

    pub fn color(&self, edge: &str) -> Result<C64, QError> {
        self.colors.get(edge).copied().ok_or_else(|| QError::Diagram(format!("edge `{edge}` has no color")))
    }

    /// Color of the module carried by the strand: `col` pointing down, `n-1-col` pointing up.
    pub fn effective(&self, ctx: &RootContext, s: &Strand) -> Result<C64, QError> {
        let col = self.color(&s.edge)?;
        Ok(match s.dir {
            Dir::Down => col,
            Dir::Up => ctx.nf() - 1.0 - col,
        })
    }

    /// Vertices as `(upper-left, upper-right or lower, ...)` triples `(x, y, z)` of strands
    /// with the condition `x + y - z` integral in `[0, n-1]` on effective colors.
    fn vertex_triples(&self) -> Result<Vec<(usize, Strand, Strand, Strand)>, QError> {
        let levels = self.levels()?;
        let mut out = Vec::new();
        for (i, ev) in self.events.iter().enumerate() {
            let (above, below) = (&levels[i], &levels[i + 1]);
            match ev {
                Event::Merge { at, .. } => out.push((i, above[*at].clone(), above[at + 1].clone(), below[*at].clone())),
                Event::Split { at, .. } => out.push((i, below[*at].clone(), below[at + 1].clone(), above[*at].clone())),
                _ => {}
            }
        }
        Ok(out)
    }

    pub fn validate_coloring(&self, ctx: &RootContext) -> Result<ColoringReport, QError> {
        let mut problems = Vec::new();
        for e in self.edges() {
            match self.colors.get(&e) {
                None => problems.push(format!("edge {e}: no color")),
                Some(&c) if near_half_integer(c, 1e-9) => problems.push(format!("edge {e}: color {c} is a half-integer")),
                _ => {}
            }
        }
        if !problems.is_empty() {
            return Ok(ColoringReport { ok: false, problems });
        }
        for (i, x, y, z) in self.vertex_triples()? {
            let gap = self.effective(ctx, &x)? + self.effective(ctx, &y)? - self.effective(ctx, &z)?;
            let ok = matches!(as_integer(gap), Some(k) if (0..ctx.n() as i64).contains(&k));
            if !ok {
                problems.push(format!("vertex at event {i} ({x}, {y} | {z}): gap {gap} not an integer in [0, {}]", ctx.n() - 1));
            }
        }
        Ok(ColoringReport { ok: problems.is_empty(), problems })
    }

    /// Random coloring near the stored one: a random move inside the null space of the
    /// vertex constraints plus random integer shifts, retried until it validates and
    /// every color stays at least `0.03` away from the half-integers.
    pub fn random_coloring<R: Rng>(&self, ctx: &RootContext, rng: &mut R) -> Result<BTreeMap<String, C64>, QError> {
        let edges = self.edges();
        let triples = self.vertex_triples()?;
        let idx = |e: &str| edges.iter().position(|x| x == e).unwrap();
        let mut a = DMatrix::<f64>::zeros(triples.len().max(1), edges.len());
        for (r, (_, x, y, z)) in triples.iter().enumerate() {
            for (s, sgn) in [(x, 1.0), (y, 1.0), (z, -1.0)] {
                let w = if s.dir == Dir::Down { sgn } else { -sgn };
                a[(r, idx(&s.edge))] += w;
            }
        }
        let null = null_space(&a, edges.len());
        for _ in 0..2000 {
            let w: Vec<C64> = null.iter().map(|_| C64::new(rng.random_range(-0.3..0.3), rng.random_range(-0.1..0.1))).collect();
            let mut cols = BTreeMap::new();
            for (j, e) in edges.iter().enumerate() {
                let mut v = self.color(e)?;
                for (basis, wk) in null.iter().zip(&w) {
                    v += wk * basis[j];
                }
                v += rng.random_range(-1..=1) as f64;
                cols.insert(e.clone(), v);
            }
            let d = self.with_colors(cols.clone());
            let far = cols.values().all(|c| {
                let t = 2.0 * c.re;
                (t - t.round()).abs() > 0.06 || c.im.abs() > 0.03
            });
            if far && d.validate_coloring(ctx)?.ok {
                return Ok(cols);
            }
        }
        Err(QError::Diagram(format!("could not draw a valid coloring for `{}`", self.name)))
    }

    /// Turn a closed diagram into a (1,1)-tangle by cutting it at a strand.
    ///
    /// A new strand `O` enters at the top left and runs down to the cut level, where it
    /// passes over strands `0..p` and becomes the lower half of the cut strand. The upper
    /// half passes over the strands to its right and leaves at the bottom right. Both
    /// detours go over everything, so the closure is isotopic to the original graph up to
    /// one positive kink on the cut strand, which the caller removes with `xi^(-2 t_x)`.
    pub fn cut(&self, cut: &Cut) -> Result<(MorseDiagram, Strand), QError> {
        if !self.top.is_empty() {
            return Err(QError::Diagram("only closed diagrams can be cut".into()));
        }
        let levels = self.levels()?;
        if !levels.last().map(|l| l.is_empty()).unwrap_or(false) {
            return Err(QError::Diagram("diagram is not closed at the bottom".into()));
        }
        let (k, p) = match cut {
            Cut::At { level, pos } => (*level, *pos),
            Cut::Edge(e) => levels
                .iter()
                .enumerate()
                .find_map(|(k, l)| l.iter().position(|s| &s.edge == e).map(|p| (k, p)))
                .ok_or_else(|| QError::Diagram(format!("edge `{e}` does not occur")))?,
        };
        let strand = levels
            .get(k)
            .and_then(|l| l.get(p))
            .cloned()
            .ok_or_else(|| QError::Diagram(format!("no strand at level {k}, position {p}")))?;
        let m = levels[k].len();
        let mut events: Vec<Event> = self.events[..k].iter().map(|e| e.shifted(1)).collect();
        for i in 0..p {
            events.push(Event::Cross { at: i, sign: Sign::Neg });
        }
        for i in p + 1..m {
            events.push(Event::Cross { at: i, sign: Sign::Neg });
        }
        events.extend(self.events[k..].iter().cloned());
        let t = MorseDiagram {
            name: format!("{} cut at level {k} position {p}", self.name),
            top: vec![strand.clone()],
            events,
            colors: self.colors.clone(),
        };
        let ls = t.levels()?;
        if ls.last().map(|l| l.len()) != Some(1) {
            return Err(QError::Diagram("cut did not produce a (1,1)-tangle".into()));
        }
        Ok((t, strand))
    }
}

/// Null space basis from the projector `I - A^+ A`.
fn null_space(a: &DMatrix<f64>, cols: usize) -> Vec<Vec<f64>> {
    let pinv = a.clone().pseudo_inverse(1e-10).expect("non-negative epsilon");
    let proj = DMatrix::<f64>::identity(cols, cols) - pinv * a;
    let svd = proj.svd(true, false);
    let u = svd.u.expect("requested");
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s > 0.5)
        .map(|(j, _)| u.column(j).iter().copied().collect())
        .collect()
}
