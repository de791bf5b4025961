//! Real potentials on `T²` with Hölder metadata.
//!
//! Every potential carries the numbers the estimates are phrased in:
//! the Hölder exponent `α`, the Hölder constant `B_α`, the sup norm `B₀`
//! and the gradient bound `B₁` (infinite when the function is not `C¹`).
//! Distances are Euclidean on the torus.

use std::f64::consts::TAU;
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::torus::{wrap, TorusPoint};

/// Highest octave of the truncated Weierstrass builtin.
pub const WEIERSTRASS_OCTAVES: u32 = 12;

/// Closed-form potentials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Builtin {
    Constant(f64),
    /// `cos 2πx₁`
    Cos1,
    /// `cos 2πx₁ + cos 2πx₂`
    Cos2d,
    /// `cos 2πx₁ · cos 2πx₂`
    CosProduct,
    /// `x₁` on `[0,1)`; discontinuous on the torus.
    Ramp,
    /// `Σ_{j=0}^{12} 2^{−αj} cos(2π·2^j x₁) + cos 2πx₂`, `C^α` but not `C¹`.
    Weierstrass { alpha: f64 },
}

impl Builtin {
    /// Parses `const(c)`, `cos1`, `cos2d`, `cosprod`, `ramp`, `weierstrass(alpha)`.
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let (name, arg) = match spec.find('(') {
            Some(i) if spec.ends_with(')') => (&spec[..i], Some(&spec[i + 1..spec.len() - 1])),
            Some(_) => return Err(Error::Domain(format!("malformed potential `{spec}`"))),
            None => (spec, None),
        };
        let number = |arg: Option<&str>| -> Result<f64> {
            arg.ok_or_else(|| Error::Domain(format!("`{name}` needs a parameter")))?
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Domain(format!("bad parameter for `{name}`: {e}")))
        };
        let no_arg = |b: Builtin| -> Result<Builtin> {
            match arg {
                None => Ok(b),
                Some(_) => Err(Error::Domain(format!("`{name}` takes no parameter"))),
            }
        };
        match name {
            "const" => Ok(Builtin::Constant(number(arg)?)),
            "cos1" => no_arg(Builtin::Cos1),
            "cos2d" => no_arg(Builtin::Cos2d),
            "cosprod" => no_arg(Builtin::CosProduct),
            "ramp" => no_arg(Builtin::Ramp),
            "weierstrass" => {
                let alpha = number(arg)?;
                if !(alpha > 0.0 && alpha <= 1.0) {
                    return Err(Error::Domain(format!("weierstrass alpha {alpha} not in (0,1]")));
                }
                Ok(Builtin::Weierstrass { alpha })
            }
            _ => Err(Error::Domain(format!("unknown potential `{name}`"))),
        }
    }

    #[inline]
    pub fn eval(&self, x: TorusPoint) -> f64 {
        match *self {
            Builtin::Constant(c) => c,
            Builtin::Cos1 => (TAU * x.x1).cos(),
            Builtin::Cos2d => (TAU * x.x1).cos() + (TAU * x.x2).cos(),
            Builtin::CosProduct => (TAU * x.x1).cos() * (TAU * x.x2).cos(),
            Builtin::Ramp => x.x1,
            Builtin::Weierstrass { alpha } => {
                let mut s = (TAU * x.x2).cos();
                let mut amp = 1.0;
                let mut freq = 1.0;
                let decay = 2f64.powf(-alpha);
                for _ in 0..=WEIERSTRASS_OCTAVES {
                    s += amp * (TAU * wrap(freq * x.x1)).cos();
                    amp *= decay;
                    freq *= 2.0;
                }
                s
            }
        }
    }

    fn metadata(&self) -> Holder {
        let sqrt2 = std::f64::consts::SQRT_2;
        match *self {
            Builtin::Constant(c) => Holder::smooth(c.abs(), 0.0),
            Builtin::Cos1 => Holder::smooth(1.0, TAU),
            Builtin::Cos2d => Holder::smooth(2.0, TAU * sqrt2),
            Builtin::CosProduct => Holder::smooth(1.0, TAU),
            Builtin::Ramp => Holder {
                alpha: 1.0,
                holder_constant: f64::INFINITY,
                sup_norm: 1.0,
                grad_bound: f64::INFINITY,
            },
            Builtin::Weierstrass { alpha } => {
                let amps = (0..=WEIERSTRASS_OCTAVES).map(|j| 2f64.powf(-alpha * j as f64));
                let sup_norm = amps.clone().sum::<f64>() + 1.0;
                let slope: f64 = (0..=WEIERSTRASS_OCTAVES)
                    .map(|j| 2f64.powf((1.0 - alpha) * j as f64))
                    .sum();
                Holder {
                    alpha,
                    holder_constant: weierstrass_holder_bound(alpha),
                    sup_norm,
                    grad_bound: TAU * slope.hypot(1.0),
                }
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            Builtin::Constant(c) => format!("const({c})"),
            Builtin::Cos1 => "cos1".into(),
            Builtin::Cos2d => "cos2d".into(),
            Builtin::CosProduct => "cosprod".into(),
            Builtin::Ramp => "ramp".into(),
            Builtin::Weierstrass { alpha } => format!("weierstrass({alpha})"),
        }
    }
}

/// Certified bound on `sup |f(x) − f(y)| / |x − y|^α` for the Weierstrass
/// builtin: the increment over a displacement of length `h` is at most
/// `g(h) = Σ 2^{−αj} min(2, 2π2^j h) + min(2, 2πh)`, which is increasing in
/// `h`, so `g(h_{i+1}) / h_i^α` on a geometric grid bounds the supremum.
fn weierstrass_holder_bound(alpha: f64) -> f64 {
    let g = |h: f64| -> f64 {
        let mut s = (TAU * h).min(2.0);
        for j in 0..=WEIERSTRASS_OCTAVES {
            let f = 2f64.powi(j as i32);
            s += 2f64.powf(-alpha * j as f64) * (TAU * f * h).min(2.0);
        }
        s
    };
    let h_max = std::f64::consts::FRAC_1_SQRT_2;
    let ratio = 1.001f64;
    let mut h = 1e-9;
    let mut best = 0.0f64;
    while h < h_max {
        let next = (h * ratio).min(h_max);
        best = best.max(g(next) / h.powf(alpha));
        h = next;
    }
    best
}

/// Hölder metadata `(α, B_α, B₀, B₁)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Holder {
    pub alpha: f64,
    pub holder_constant: f64,
    pub sup_norm: f64,
    pub grad_bound: f64,
}

impl Holder {
    fn smooth(sup_norm: f64, grad_bound: f64) -> Self {
        Holder {
            alpha: 1.0,
            holder_constant: grad_bound,
            sup_norm,
            grad_bound,
        }
    }
}

/// `M×M` periodic samples at nodes `(i/M, j/M)`, stored row-major with the
/// row index running over `x₁`; evaluated by bilinear interpolation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grid {
    m: usize,
    values: Vec<f64>,
}

impl Grid {
    pub fn new(m: usize, values: Vec<f64>) -> Result<Self> {
        if m < 2 || values.len() != m * m {
            return Err(Error::Format(format!(
                "grid of size {m} needs {} values, got {}",
                m * m,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Format("non-finite grid value".into()));
        }
        Ok(Grid { m, values })
    }

    pub fn size(&self) -> usize {
        self.m
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn node(&self, i: usize, j: usize) -> f64 {
        self.values[(i % self.m) * self.m + (j % self.m)]
    }

    #[inline]
    pub fn eval(&self, x: TorusPoint) -> f64 {
        let m = self.m as f64;
        let (u, v) = (x.x1 * m, x.x2 * m);
        let (i, j) = (u.floor(), v.floor());
        let (s, t) = (u - i, v - j);
        let (i, j) = (i as usize % self.m, j as usize % self.m);
        let a = self.node(i, j);
        let b = self.node(i + 1, j);
        let c = self.node(i, j + 1);
        let d = self.node(i + 1, j + 1);
        (1.0 - s) * ((1.0 - t) * a + t * c) + s * ((1.0 - t) * b + t * d)
    }

    /// Writes the CSV form: header `m,row,v0,…,v{M−1}`, then one line per row
    /// `M,i,values…` with 17 significant digits.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["m".to_string(), "row".to_string()];
        header.extend((0..self.m).map(|j| format!("v{j}")));
        w.write_record(&header)?;
        for i in 0..self.m {
            let mut rec = vec![self.m.to_string(), i.to_string()];
            rec.extend(
                self.values[i * self.m..(i + 1) * self.m]
                    .iter()
                    .map(|v| crate::report::fmt_real(*v)),
            );
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
        let headers = r.headers()?.clone();
        if headers.get(0) != Some("m") || headers.get(1) != Some("row") {
            return Err(Error::Format("header must start with `m,row`".into()));
        }
        let mut m = None;
        let mut rows: Vec<Option<Vec<f64>>> = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let size: usize = parse_field(rec.get(0), "m")?;
            let row: usize = parse_field(rec.get(1), "row")?;
            match m {
                None => {
                    m = Some(size);
                    rows = vec![None; size];
                }
                Some(prev) if prev != size => {
                    return Err(Error::Format(format!("inconsistent m: {prev} vs {size}")))
                }
                _ => {}
            }
            if row >= size || rec.len() != size + 2 {
                return Err(Error::Format(format!("row {row} malformed")));
            }
            if rows[row].is_some() {
                return Err(Error::Format(format!("row {row} repeated")));
            }
            let vals = rec
                .iter()
                .skip(2)
                .map(|s| parse_field::<f64>(Some(s), "value"))
                .collect::<Result<Vec<_>>>()?;
            rows[row] = Some(vals);
        }
        let m = m.ok_or_else(|| Error::Format("empty grid file".into()))?;
        let mut values = Vec::with_capacity(m * m);
        for (i, row) in rows.into_iter().enumerate() {
            values.extend(row.ok_or_else(|| Error::Format(format!("row {i} missing")))?);
        }
        Grid::new(m, values)
    }
}

fn parse_field<T: std::str::FromStr>(s: Option<&str>, what: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    let s = s.ok_or_else(|| Error::Format(format!("missing {what}")))?;
    s.trim()
        .parse()
        .map_err(|e| Error::Format(format!("bad {what} `{s}`: {e}")))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum PotentialKind {
    Builtin(Builtin),
    Grid(Grid),
}

/// A potential `V: T² → ℝ` together with its Hölder metadata.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Potential {
    pub kind: PotentialKind,
    pub holder: Holder,
}

impl Potential {
    pub fn builtin(b: Builtin) -> Self {
        Potential {
            holder: b.metadata(),
            kind: PotentialKind::Builtin(b),
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::builtin(Builtin::Constant(c))
    }

    pub fn cos2d() -> Self {
        Self::builtin(Builtin::Cos2d)
    }

    pub fn parse(spec: &str) -> Result<Self> {
        Builtin::parse(spec).map(Self::builtin)
    }

    /// Grid potential with metadata estimated from node differences at
    /// dyadic separations, inflated by 5%.
    pub fn from_grid(grid: Grid, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::Domain(format!("alpha {alpha} not in (0,1]")));
        }
        let holder = estimate_grid_holder(&grid, alpha);
        Ok(Potential {
            kind: PotentialKind::Grid(grid),
            holder,
        })
    }

    pub fn load_grid(path: &Path, alpha: f64) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::from_grid(Grid::read_csv(file)?, alpha)
    }

    #[inline]
    pub fn eval(&self, x: TorusPoint) -> f64 {
        match &self.kind {
            PotentialKind::Builtin(b) => b.eval(x),
            PotentialKind::Grid(g) => g.eval(x),
        }
    }

    /// `B₀`
    pub fn sup_norm(&self) -> f64 {
        self.holder.sup_norm
    }

    pub fn name(&self) -> String {
        match &self.kind {
            PotentialKind::Builtin(b) => b.name(),
            PotentialKind::Grid(g) => format!("grid({})", g.size()),
        }
    }

    /// Whether the potential is a constant (phase-independent).
    pub fn as_constant(&self) -> Option<f64> {
        match self.kind {
            PotentialKind::Builtin(Builtin::Constant(c)) => Some(c),
            _ => None,
        }
    }

    /// Node values `V(i/M, j/M)`.
    pub fn sample_grid(&self, m: usize) -> Grid {
        let values = (0..m)
            .flat_map(|i| (0..m).map(move |j| (i, j)))
            .map(|(i, j)| self.eval(TorusPoint::new(i as f64 / m as f64, j as f64 / m as f64)))
            .collect();
        Grid { m, values }
    }
}

fn estimate_grid_holder(grid: &Grid, alpha: f64) -> Holder {
    const SAFETY: f64 = 1.05;
    let m = grid.size();
    let sup_norm = grid.values().iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let mut holder = 0.0f64;
    let mut slope = 0.0f64;
    let mut step = 1;
    while step <= m / 2 {
        let h = step as f64 / m as f64;
        let mut max_diff = 0.0f64;
        for i in 0..m {
            for j in 0..m {
                let v = grid.node(i, j);
                max_diff = max_diff
                    .max((grid.node(i + step, j) - v).abs())
                    .max((grid.node(i, j + step) - v).abs());
            }
        }
        if step == 1 {
            // bilinear pieces: gradient is bounded by the two edge slopes
            slope = max_diff / h * std::f64::consts::SQRT_2;
        }
        holder = holder.max(max_diff / h.powf(alpha));
        step *= 2;
    }
    Holder {
        alpha,
        holder_constant: holder * SAFETY,
        sup_norm,
        grad_bound: slope * SAFETY,
    }
}

/// One row of the builtin listing; parameterized entries show the
/// parameter name in place of a number.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CatalogRow {
    pub name: String,
    pub alpha: String,
    pub sup_norm: String,
    pub holder_constant: String,
}

/// Sorted listing of the builtin potentials and their metadata.
pub fn builtin_catalog() -> Vec<CatalogRow> {
    let num = |v: f64| format!("{v:.6}");
    let mut rows: Vec<CatalogRow> = [
        Builtin::Cos1,
        Builtin::Cos2d,
        Builtin::CosProduct,
        Builtin::Ramp,
    ]
    .iter()
    .map(|b| {
        let h = b.metadata();
        CatalogRow {
            name: b.name(),
            alpha: num(h.alpha),
            sup_norm: num(h.sup_norm),
            holder_constant: num(h.holder_constant),
        }
    })
    .collect();
    rows.push(CatalogRow {
        name: "const(c)".into(),
        alpha: num(1.0),
        sup_norm: "|c|".into(),
        holder_constant: num(0.0),
    });
    let w = |a: f64| Builtin::Weierstrass { alpha: a }.metadata();
    rows.push(CatalogRow {
        name: "weierstrass(alpha)".into(),
        alpha: "alpha".into(),
        sup_norm: format!("{} at alpha=0.5", num(w(0.5).sup_norm)),
        holder_constant: format!("{} at alpha=0.5", num(w(0.5).holder_constant)),
    });
    rows.sort_by(|a, b| a.name.cmp(&b.name));
    rows
}
