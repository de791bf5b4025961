//! Mollification, exponential and Weyl sums, Birkhoff versus space averages,
//! level-set statistics and (regularized) logarithmic averages.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::diophantine::torus_norm;
use crate::error::{Error, Result};
use crate::potential::{Grid, Holder, Potential};
use crate::rng;
use crate::stats::{wilson95, Mean};
use crate::torus::{frac_combination, Dynamics, TorusPoint};

/// Default nodes per axis of the tensor midpoint rule.
pub const DEFAULT_QUADRATURE: usize = 1024;

/// Values below this are clamped before taking logarithms.
pub const LOG_FLOOR: f64 = 1e-300;

/// `e(θ) = exp(2πiθ)` for a phase already reduced mod 1.
#[inline]
fn e(theta: f64) -> Complex64 {
    let (s, c) = (std::f64::consts::TAU * theta).sin_cos();
    Complex64::new(c, s)
}

/// Offset of the `x₂` nodes inside their cell. Cell midpoints on both axes
/// put nodes exactly on lines such as `x₁ + x₂ = 1/2`, where builtin
/// potentials vanish identically, so the second axis is shifted by an
/// irrational fraction of a cell.
const X2_OFFSET: f64 = 0.618_033_988_749_894_9;

/// Node `(i, j)` of the `m×m` product rule.
#[inline]
pub fn quadrature_node(i: usize, j: usize, m: usize) -> TorusPoint {
    let h = 1.0 / m as f64;
    TorusPoint {
        x1: (i as f64 + 0.5) * h,
        x2: (j as f64 + X2_OFFSET) * h,
    }
}

/// Tensor product-rule average of `g` over `T²` on an `m×m` grid (midpoints
/// along `x₁`). Rows are averaged in parallel and merged in row order.
pub fn midpoint_average<G>(m: usize, g: G) -> f64
where
    G: Fn(TorusPoint) -> f64 + Sync,
{
    let rows: Vec<Mean> = (0..m)
        .into_par_iter()
        .map(|i| (0..m).map(|j| g(quadrature_node(i, j, m))).collect())
        .collect();
    let mut total = Mean::default();
    for r in &rows {
        total.merge(r);
    }
    total.value()
}

/// The bump `h_τ(y) = c_τ (1 − (y/τ)²)⁵` on `[−τ, τ]`, periodized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Mollifier {
    pub tau: f64,
}

/// `∫_{−1}^{1} (1 − u²)⁵ du = 512/693`.
const BUMP_MASS: f64 = 512.0 / 693.0;

/// Coefficients of `(1 − u²)⁵` in powers of `u`.
fn bump_poly() -> Vec<f64> {
    // (1 - u²)^5 = Σ C(5,k) (-1)^k u^{2k}
    let binom = [1.0, 5.0, 10.0, 10.0, 5.0, 1.0];
    let mut c = vec![0.0; 11];
    for (k, b) in binom.iter().enumerate() {
        c[2 * k] = if k % 2 == 0 { *b } else { -*b };
    }
    c
}

fn poly_derivative(c: &[f64]) -> Vec<f64> {
    c.iter().enumerate().skip(1).map(|(k, a)| k as f64 * a).collect()
}

fn poly_eval(c: &[f64], u: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, a| acc * u + a)
}

impl Mollifier {
    pub fn new(tau: f64) -> Result<Self> {
        if !(tau > 0.0 && tau < 0.25) {
            return Err(Error::Domain(format!("tau = {tau} not in (0, 1/4)")));
        }
        Ok(Mollifier { tau })
    }

    /// `h_τ(y)` for `y` taken mod 1.
    pub fn eval(&self, y: f64) -> f64 {
        let y = y - y.round();
        let u = y / self.tau;
        if u.abs() >= 1.0 {
            0.0
        } else {
            (1.0 - u * u).powi(5) / (BUMP_MASS * self.tau)
        }
    }

    /// `C_m` with `|h_τ^{(m)}| ≤ C_m τ^{−(m+1)}`, `m = 0..=4`, measured on a
    /// fine grid of the reference bump.
    pub fn derivative_constants() -> [f64; 5] {
        Self::derivative_norms(|v| v.abs(), |acc, v| acc.max(v))
    }

    /// `∫|p^{(m)}(u)| du / mass`, so `‖h_τ^{(m)}‖_{L¹} = τ^{−m}` times this.
    pub fn derivative_l1() -> [f64; 5] {
        let n = 20_000;
        let du = 2.0 / n as f64;
        Self::derivative_norms(|v| v.abs() * du, |acc, v| acc + v)
    }

    fn derivative_norms(
        map: impl Fn(f64) -> f64,
        fold: impl Fn(f64, f64) -> f64,
    ) -> [f64; 5] {
        let mut poly = bump_poly();
        let mut out = [0.0; 5];
        let n = 20_000;
        for slot in out.iter_mut() {
            let mut acc = 0.0;
            for i in 0..n {
                let u = -1.0 + (i as f64 + 0.5) * 2.0 / n as f64;
                acc = fold(acc, map(poly_eval(&poly, u)));
            }
            *slot = acc / BUMP_MASS;
            poly = poly_derivative(&poly);
        }
        out
    }

    /// Discrete kernel for a grid of `m` nodes: weights at offsets
    /// `−r..=r`, normalized to sum 1.
    fn weights(&self, m: usize) -> Vec<f64> {
        let r = (self.tau * m as f64).ceil() as i64;
        let mut w: Vec<f64> = (-r..=r).map(|d| self.eval(d as f64 / m as f64)).collect();
        let s: f64 = w.iter().sum();
        for v in &mut w {
            *v /= s;
        }
        w
    }
}

/// `ρ_δ(y) = |y|` for `|y| ≥ δ` and `δ/2 + y²/(2δ)` inside; `C¹`, `≥ |y|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegularizedAbs {
    pub delta: f64,
}

impl RegularizedAbs {
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::Domain(format!("delta = {delta} not in (0,1)")));
        }
        Ok(RegularizedAbs { delta })
    }

    #[inline]
    pub fn eval(&self, y: f64) -> f64 {
        let a = y.abs();
        if a >= self.delta {
            a
        } else {
            0.5 * self.delta + y * y / (2.0 * self.delta)
        }
    }
}

/// Plateau `χ_δ`: 1 on `[−δ, δ]`, cubic smoothstep down to 0 at `±2δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Plateau {
    pub delta: f64,
}

impl Plateau {
    #[inline]
    pub fn eval(&self, y: f64) -> f64 {
        let s = (y.abs() - self.delta) / self.delta;
        if s <= 0.0 {
            1.0
        } else if s >= 1.0 {
            0.0
        } else {
            1.0 - s * s * (3.0 - 2.0 * s)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpSum {
    pub value: Complex64,
    pub bound: f64,
}

/// `S = Σ_{m=1}^N e(mθ)` and the bound `2N/(1 + N‖θ‖)`.
pub fn exp_sum_linear(theta: f64, n: u64) -> ExpSum {
    let value = (1..=n as i128)
        .map(|m| e(frac_combination(&[(m, theta)])))
        .sum();
    let nf = n as f64;
    ExpSum {
        value,
        bound: 2.0 * nf / (1.0 + nf * torus_norm(theta)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeylSum {
    pub value: Complex64,
    /// `N^{1/2+ε}`, attached for comparison only.
    pub reference: f64,
}

/// `S = Σ_{k=1}^N e(k²α + kβ)`.
pub fn weyl_sum_quadratic(alpha: f64, beta: f64, n: u64, eps: f64) -> WeylSum {
    let value = (1..n as usize + 1)
        .into_par_iter()
        .with_min_len(4096)
        .map(|k| {
            let k = k as i128;
            e(frac_combination(&[(k * k, alpha), (k, beta)]))
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    WeylSum {
        value,
        reference: (n as f64).powf(0.5 + eps),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MinInvSum {
    pub value: f64,
    /// `c^{−1} N^{1+ε} log N` when Diophantine data `(c, ε)` are supplied.
    pub reference: Option<f64>,
}

/// `Σ_{k=1}^N min(N, ‖kα‖^{−1})`.
pub fn min_inv_sum(alpha: f64, n: u64, dioph: Option<(f64, f64)>) -> MinInvSum {
    let nf = n as f64;
    let value = (1..=n as i128)
        .map(|k| {
            let d = torus_norm(frac_combination(&[(k, alpha)]));
            if d * nf <= 1.0 {
                nf
            } else {
                1.0 / d
            }
        })
        .sum();
    MinInvSum {
        value,
        reference: dioph.map(|(c, eps)| nf.powf(1.0 + eps) * nf.ln() / c),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mollified {
    pub psi: Potential,
    pub tau: f64,
    pub grid_size: usize,
    /// `B_α(f) τ^α ‖h_τ^{(m)}‖_{L¹}` bounds on `|∂^m ψ|` along one axis.
    pub derivative_bounds: [f64; 5],
}

/// `ψ = f * h̃_τ` by separable periodic convolution on an `M×M` grid,
/// `M = max(⌈8/τ⌉, 64)`.
pub fn mollify(f: &Potential, tau: f64) -> Result<Mollified> {
    let moll = Mollifier::new(tau)?;
    let m = ((8.0 / tau).ceil() as usize).max(64);
    let w = moll.weights(m);
    let r = (w.len() / 2) as i64;
    let samples = f.sample_grid(m);
    let src = samples.values();
    let idx = |k: i64| k.rem_euclid(m as i64) as usize;
    // along x₂ (within rows)
    let pass1: Vec<f64> = (0..m)
        .into_par_iter()
        .flat_map_iter(|i| {
            let w = &w;
            (0..m).map(move |j| {
                w.iter()
                    .enumerate()
                    .map(|(t, wt)| wt * src[i * m + idx(j as i64 + t as i64 - r)])
                    .sum::<f64>()
            })
        })
        .collect();
    // along x₁
    let out: Vec<f64> = (0..m)
        .into_par_iter()
        .flat_map_iter(|i| {
            let (w, pass1) = (&w, &pass1);
            (0..m).map(move |j| {
                w.iter()
                    .enumerate()
                    .map(|(t, wt)| wt * pass1[idx(i as i64 + t as i64 - r) * m + j])
                    .sum::<f64>()
            })
        })
        .collect();
    let grid = Grid::new(m, out)?;
    let l1 = Mollifier::derivative_l1();
    let scale = if f.holder.holder_constant.is_finite() {
        f.holder.holder_constant * tau.powf(f.holder.alpha)
    } else {
        f.holder.sup_norm
    };
    let mut derivative_bounds = [0.0; 5];
    derivative_bounds[0] = f.holder.sup_norm;
    for (k, b) in derivative_bounds.iter_mut().enumerate().skip(1) {
        *b = scale * l1[k] * tau.powi(-(k as i32));
    }
    let sup_norm = grid.values().iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let grad = derivative_bounds[1] * std::f64::consts::SQRT_2;
    let psi = Potential {
        kind: crate::potential::PotentialKind::Grid(grid),
        holder: Holder {
            alpha: 1.0,
            holder_constant: grad,
            sup_norm,
            grad_bound: grad,
        },
    };
    Ok(Mollified {
        psi,
        tau,
        grid_size: m,
        derivative_bounds,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BirkhoffGap {
    pub orbit_average: f64,
    pub space_average: f64,
    pub gap: f64,
}

/// `N^{−1}Σ_{m=1}^N ψ(T^m x)` against `⟨ψ⟩`.
pub fn birkhoff_vs_space(
    psi: &Potential,
    dynamics: &Dynamics,
    x: TorusPoint,
    n: usize,
    quadrature: usize,
) -> BirkhoffGap {
    let orbit: Mean = dynamics.orbit(x, 1).take(n).map(|p| psi.eval(p)).collect();
    let space_average = midpoint_average(quadrature, |p| psi.eval(p));
    let orbit_average = orbit.value();
    BirkhoffGap {
        orbit_average,
        space_average,
        gap: (orbit_average - space_average).abs(),
    }
}

/// `sup_x |N^{−1}Σ ψ(T^m x) − ⟨ψ⟩|` over the given phases.
pub fn sup_birkhoff_gap(
    psi: &Potential,
    dynamics: &Dynamics,
    phases: &[TorusPoint],
    n: usize,
    quadrature: usize,
) -> f64 {
    let space = midpoint_average(quadrature, |p| psi.eval(p));
    phases
        .par_iter()
        .map(|&x| {
            let avg: Mean = dynamics.orbit(x, 1).take(n).map(|p| psi.eval(p)).collect();
            (avg.value() - space).abs()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(0.0, f64::max)
}

/// Sorted values of `f` at the midpoint nodes, for fast level-set measures.
#[derive(Debug, Clone)]
pub struct ValueDistribution {
    sorted: Vec<f64>,
}

impl ValueDistribution {
    pub fn new(f: &Potential, quadrature: usize) -> Self {
        let mut sorted: Vec<f64> = (0..quadrature * quadrature)
            .into_par_iter()
            .map(|k| f.eval(quadrature_node(k / quadrature, k % quadrature, quadrature)))
            .collect();
        sorted.par_sort_by(|a, b| a.total_cmp(b));
        ValueDistribution { sorted }
    }

    /// Quadrature measure of `S_f(ξ, δ) = {x : |f(x) − ξ| < δ}`.
    pub fn level_set_measure(&self, xi: f64, delta: f64) -> f64 {
        let lo = self.sorted.partition_point(|v| *v <= xi - delta);
        let hi = self.sorted.partition_point(|v| *v < xi + delta);
        hi.saturating_sub(lo) as f64 / self.sorted.len() as f64
    }

    pub fn mean_of(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.sorted.iter().map(|v| g(*v)).collect::<Mean>().value()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelSetReport {
    pub hits: usize,
    pub measure_delta: f64,
    pub measure_2delta: f64,
    /// `mes S_f(ξ, 2δ) + (1 + B₁)δ^{1/2}`
    pub reference_bound: f64,
    /// `Σ_k χ_δ(f(T^k x) − ξ)`
    pub plateau_hits: f64,
    /// `⟨χ_δ(f − ξ)⟩`
    pub plateau_mean: f64,
}

/// Orbit visits to `S_f(ξ, δ)` and the measures of `S_f(ξ, δ)`, `S_f(ξ, 2δ)`.
pub fn level_set_report(
    f: &Potential,
    dynamics: &Dynamics,
    x: TorusPoint,
    n: usize,
    xi: f64,
    delta: f64,
    quadrature: usize,
) -> Result<LevelSetReport> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain(format!("delta = {delta} not in (0,1)")));
    }
    let chi = Plateau { delta };
    let mut hits = 0;
    let mut plateau_hits = 0.0;
    for p in dynamics.orbit(x, 1).take(n) {
        let y = f.eval(p) - xi;
        if y.abs() < delta {
            hits += 1;
        }
        plateau_hits += chi.eval(y);
    }
    let dist = ValueDistribution::new(f, quadrature);
    let measure_2delta = dist.level_set_measure(xi, 2.0 * delta);
    Ok(LevelSetReport {
        hits,
        measure_delta: dist.level_set_measure(xi, delta),
        measure_2delta,
        reference_bound: measure_2delta + (1.0 + f.holder.grad_bound) * delta.sqrt(),
        plateau_hits,
        plateau_mean: dist.mean_of(|v| chi.eval(v - xi)),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExceptionalScan {
    pub exceptional: Vec<f64>,
    pub measures: Vec<f64>,
    /// Grid fraction flagged times the grid's span.
    pub estimated_measure: f64,
    pub fraction: f64,
}

/// `{ξ ∈ grid : mes S_f(ξ, δ) > δ^{1/2}}`.
pub fn exceptional_xi_scan(
    f: &Potential,
    delta: f64,
    xi_grid: &[f64],
    quadrature: usize,
) -> ExceptionalScan {
    let dist = ValueDistribution::new(f, quadrature);
    let threshold = delta.sqrt();
    let measures: Vec<f64> = xi_grid
        .iter()
        .map(|&xi| dist.level_set_measure(xi, delta))
        .collect();
    let exceptional: Vec<f64> = xi_grid
        .iter()
        .zip(&measures)
        .filter(|(_, m)| **m > threshold)
        .map(|(xi, _)| *xi)
        .collect();
    let fraction = if xi_grid.is_empty() {
        0.0
    } else {
        exceptional.len() as f64 / xi_grid.len() as f64
    };
    let span = match (xi_grid.first(), xi_grid.last()) {
        (Some(a), Some(b)) => (b - a).abs(),
        _ => 0.0,
    };
    ExceptionalScan {
        exceptional,
        measures,
        estimated_measure: fraction * span,
        fraction,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum LogMode {
    Raw,
    Regularized { delta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogAverage {
    pub value: f64,
    /// Nodes where `|f − ξ| < 1e-300` was clamped (raw mode only).
    pub clamped: usize,
}

#[inline]
pub fn clamped_log(y: f64) -> f64 {
    y.abs().max(LOG_FLOOR).ln()
}

/// `⟨log|f − ξ|⟩` (raw, clamped) or `⟨log ρ_δ(f − ξ)⟩`.
pub fn log_average(f: &Potential, xi: f64, mode: LogMode, quadrature: usize) -> Result<LogAverage> {
    if let Some(c) = f.as_constant() {
        let y = c - xi;
        let value = match mode {
            LogMode::Raw => clamped_log(y),
            LogMode::Regularized { delta } => RegularizedAbs::new(delta)?.eval(y).ln(),
        };
        let clamped = usize::from(mode == LogMode::Raw && y.abs() < LOG_FLOOR) * quadrature * quadrature;
        return Ok(LogAverage { value, clamped });
    }
    match mode {
        LogMode::Raw => {
            let clamped = (0..quadrature)
                .into_par_iter()
                .map(|i| {
                    (0..quadrature)
                        .filter(|&j| (f.eval(quadrature_node(i, j, quadrature)) - xi).abs() < LOG_FLOOR)
                        .count()
                })
                .sum();
            let value = midpoint_average(quadrature, |p| clamped_log(f.eval(p) - xi));
            Ok(LogAverage { value, clamped })
        }
        LogMode::Regularized { delta } => {
            let rho = RegularizedAbs::new(delta)?;
            let value = midpoint_average(quadrature, |p| rho.eval(f.eval(p) - xi).ln());
            Ok(LogAverage { value, clamped: 0 })
        }
    }
}

/// Raw `⟨log|g − ξ|⟩` for an arbitrary function on `T²`.
pub fn log_average_of<G>(g: G, xi: f64, quadrature: usize) -> LogAverage
where
    G: Fn(TorusPoint) -> f64 + Sync,
{
    let vals: Vec<f64> = (0..quadrature * quadrature)
        .into_par_iter()
        .map(|k| g(quadrature_node(k / quadrature, k % quadrature, quadrature)) - xi)
        .collect();
    LogAverage {
        clamped: vals.iter().filter(|v| v.abs() < LOG_FLOOR).count(),
        value: vals.iter().map(|v| clamped_log(*v)).collect::<Mean>().value(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeviationMeasure {
    pub fraction: f64,
    pub ci95: f64,
    pub space_average: f64,
    pub samples: usize,
}

/// Orbit log-average of `|f(T^k x) − ξ|` at phase `x`, `k = 1..=n`.
pub fn orbit_log_average(f: &Potential, dynamics: &Dynamics, x: TorusPoint, n: usize, xi: f64) -> f64 {
    dynamics
        .orbit(x, 1)
        .take(n)
        .map(|p| clamped_log(f.eval(p) - xi))
        .collect::<Mean>()
        .value()
}

/// Monte-Carlo measure of phases where the orbit log-average deviates from
/// `⟨log|f − ξ|⟩` by more than `tol`, with a Wilson 95% half-width.
#[allow(clippy::too_many_arguments)]
pub fn deviation_measure(
    f: &Potential,
    dynamics: &Dynamics,
    n: usize,
    xi: f64,
    tol: f64,
    samples: usize,
    seed: u64,
    quadrature: usize,
) -> Result<DeviationMeasure> {
    if samples < 100 {
        return Err(Error::Domain(format!("need at least 100 phase samples, got {samples}")));
    }
    let space_average = log_average(f, xi, LogMode::Raw, quadrature)?.value;
    let deviations = orbit_deviations(f, dynamics, n, xi, samples, seed, space_average);
    let hits = deviations.iter().filter(|d| **d > tol).count();
    let (fraction, ci95) = wilson95(hits, samples);
    Ok(DeviationMeasure {
        fraction,
        ci95,
        space_average,
        samples,
    })
}

/// Per-sample `|orbit average − space average|`, in sample order.
pub fn orbit_deviations(
    f: &Potential,
    dynamics: &Dynamics,
    n: usize,
    xi: f64,
    samples: usize,
    seed: u64,
    space_average: f64,
) -> Vec<f64> {
    (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let x = rng::phase(seed, i);
            (orbit_log_average(f, dynamics, x, n, xi) - space_average).abs()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::Builtin;
    use proptest::prelude::*;

    const GOLDEN: f64 = 0.618_033_988_749_894_9;

    /// Gauss–Legendre on [−1,1] via Newton iteration, independent of the
    /// midpoint machinery above.
    fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
        }
        out
    }

    #[test]
    fn bump_normalized_and_supported() {
        let m = Mollifier::new(0.1).unwrap();
        let gl = gauss_legendre(40);
        let mass: f64 = gl.iter().map(|(u, w)| w * m.tau * m.eval(u * m.tau)).sum();
        assert!((mass - 1.0).abs() < 1e-10);
        assert_eq!(m.eval(0.1), 0.0);
        assert_eq!(m.eval(0.5), 0.0);
        assert!(m.eval(0.95) > 0.0);
        assert!(Mollifier::new(0.25).is_err());
        assert!(Mollifier::new(0.0).is_err());
    }

    #[test]
    fn derivative_constants_bound_finite_differences() {
        let c = Mollifier::derivative_constants();
        let tau = 0.05;
        let m = Mollifier::new(tau).unwrap();
        let h = 1e-4 * tau;
        for i in 0..200 {
            let y = -tau + (i as f64 + 0.5) * 2.0 * tau / 200.0;
            let d1 = (m.eval(y + h) - m.eval(y - h)) / (2.0 * h);
            assert!(d1.abs() <= c[1] * tau.powi(-2) * 1.001);
            assert!(m.eval(y) <= c[0] / tau * 1.000_001);
        }
        assert!(c.iter().all(|v| v.is_finite() && *v > 0.0));
    }

    #[test]
    fn regularized_abs_dominates() {
        let rho = RegularizedAbs::new(0.05).unwrap();
        for i in 0..100_000 {
            let y = -1.0 + 2.0 * (i as f64 + 0.5) / 100_000.0;
            let r = rho.eval(y);
            assert!(r >= y.abs());
            if y.abs() >= 0.05 {
                assert_eq!(r, y.abs());
            } else {
                assert!((0.025..=0.05).contains(&r));
            }
        }
    }

    #[test]
    fn plateau_shape() {
        let chi = Plateau { delta: 0.1 };
        assert_eq!(chi.eval(0.05), 1.0);
        assert_eq!(chi.eval(-0.1), 1.0);
        assert_eq!(chi.eval(0.2), 0.0);
        assert!((chi.eval(0.15) - 0.5).abs() < 1e-12);
        let h = 1e-7;
        for i in 0..1000 {
            let y = 0.1 + 0.1 * i as f64 / 1000.0;
            let d = (chi.eval(y + h) - chi.eval(y - h)) / (2.0 * h);
            assert!(d.abs() <= 2.0 / 0.1 + 1e-3);
        }
    }

    #[test]
    fn exp_sum_examples() {
        let s = exp_sum_linear(0.0, 7);
        assert!((s.value - Complex64::new(7.0, 0.0)).norm() < 1e-12);
        assert_eq!(s.bound, 14.0);
        assert!(exp_sum_linear(0.5, 6).value.norm() < 1e-12);
        let s = exp_sum_linear(GOLDEN, 10_000);
        // direct oracle: |sin(πNθ)/sin(πθ)|
        let pi = std::f64::consts::PI;
        let closed = ((pi * 10_000.0 * GOLDEN).sin() / (pi * GOLDEN).sin()).abs();
        assert!((s.value.norm() - closed).abs() < 1e-8);
        assert!(s.value.norm() <= 2.0 / torus_norm(GOLDEN));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]
        #[test]
        fn exp_sum_bound_holds(theta in 0.0f64..1.0, n in 1u64..3000) {
            let s = exp_sum_linear(theta, n);
            prop_assert!(s.value.norm() <= s.bound * (1.0 + 1e-12));
        }
    }

    #[test]
    fn weyl_sum_examples() {
        let s = weyl_sum_quadratic(0.0, 0.0, 5, 0.1);
        assert!((s.value - Complex64::new(5.0, 0.0)).norm() < 1e-12);
        assert!(weyl_sum_quadratic(0.5, 0.0, 4, 0.1).value.norm() < 1e-12);
        let s = weyl_sum_quadratic(GOLDEN / 2.0, 0.3, 10_000, 0.1);
        let direct: Complex64 = (1..=10_000u64)
            .map(|k| {
                let kf = k as f64;
                let ph = (kf * kf * (GOLDEN / 2.0)).fract() + (kf * 0.3).fract();
                e(ph)
            })
            .sum();
        // naive phases lose ~1e-12 per term at k² ~ 1e8
        assert!((s.value - direct).norm() < 1e-5);
        assert!((s.value.norm() / 10_000f64.powf(0.6)).is_finite());
    }

    #[test]
    fn min_inv_sum_examples() {
        assert_eq!(min_inv_sum(0.0, 9, None).value, 81.0);
        assert_eq!(min_inv_sum(0.5, 4, None).value, 12.0);
        let s = min_inv_sum(GOLDEN, 10_000, Some((0.2, 0.2)));
        let direct: f64 = (1..=10_000)
            .map(|k| {
                let d = torus_norm(k as f64 * GOLDEN);
                (1.0 / d).min(10_000.0)
            })
            .sum();
        assert!((s.value - direct).abs() < 1e-6 * direct);
        assert!(s.reference.unwrap() > s.value);
    }

    #[test]
    fn mollify_constant_is_constant() {
        let out = mollify(&Potential::constant(3.0), 0.1).unwrap();
        for p in [TorusPoint::new(0.1, 0.7), TorusPoint::new(0.55, 0.05)] {
            assert!((out.psi.eval(p) - 3.0).abs() < 1e-9);
        }
    }

    #[test]
    fn mollify_cosine_is_fourier_multiplier() {
        let tau = 0.05;
        let f = Potential::builtin(Builtin::Cos1);
        let out = mollify(&f, tau).unwrap();
        // ĥ(1) = ∫ h_τ(y) cos(2πy) dy by Gauss–Legendre
        let m = Mollifier::new(tau).unwrap();
        let h1: f64 = gauss_legendre(60)
            .iter()
            .map(|(u, w)| w * tau * m.eval(u * tau) * (std::f64::consts::TAU * u * tau).cos())
            .sum();
        assert!(h1 > 0.0 && h1 < 1.0);
        let mut worst_gap = 0.0f64;
        let mut worst_mult = 0.0f64;
        for i in 0..50 {
            for j in 0..7 {
                let p = TorusPoint::new(i as f64 / 50.0 + 0.003, j as f64 / 7.0);
                let psi = out.psi.eval(p);
                worst_gap = worst_gap.max((f.eval(p) - psi).abs());
                worst_mult = worst_mult.max((psi - h1 * f.eval(p)).abs());
            }
        }
        assert!(worst_gap <= f.holder.grad_bound * tau);
        // bilinear interpolation error on a 160-point grid
        assert!(worst_mult < 5e-4, "{worst_mult}");
    }

    #[test]
    fn mollify_error_bound_all_builtins() {
        let pots = [
            Potential::builtin(Builtin::Cos1),
            Potential::cos2d(),
            Potential::builtin(Builtin::CosProduct),
            Potential::builtin(Builtin::Weierstrass { alpha: 0.5 }),
        ];
        for f in &pots {
            for tau in [0.1, 0.03, 0.01] {
                let out = mollify(f, tau).unwrap();
                let bound = f.holder.holder_constant * tau.powf(f.holder.alpha);
                let k = 128;
                let mut worst = 0.0f64;
                for i in 0..k {
                    for j in 0..k {
                        let p = TorusPoint::new(
                            (i as f64 + 0.29) / k as f64,
                            (j as f64 + 0.71) / k as f64,
                        );
                        worst = worst.max((f.eval(p) - out.psi.eval(p)).abs());
                    }
                }
                assert!(worst <= bound, "{} tau={tau}: {worst} > {bound}", f.name());
            }
        }
    }

    #[test]
    fn birkhoff_constant_gap_is_zero() {
        let g = birkhoff_vs_space(
            &Potential::constant(0.1),
            &Dynamics::skew_shift(GOLDEN),
            TorusPoint::new(0.3, 0.4),
            1000,
            64,
        );
        assert_eq!(g.gap, 0.0);
    }

    #[test]
    fn birkhoff_shift_cosine_small_gap() {
        let f = Potential::builtin(Builtin::Cos1);
        let d = Dynamics::shift(GOLDEN, 0.414_213_562_373_095_1);
        for x in [TorusPoint::ORIGIN, TorusPoint::new(0.77, 0.12)] {
            let g = birkhoff_vs_space(&f, &d, x, 10_000, 256);
            assert!(g.gap <= 1e-3, "{}", g.gap);
            // exp_sum_linear closed form: |avg| ≤ 1/(N‖ω₁‖)
            assert!(g.gap <= 1.0 / (10_000.0 * torus_norm(GOLDEN)) + 1e-12);
        }
    }

    #[test]
    fn birkhoff_skew_gap_decreases() {
        let f = Potential::builtin(Builtin::Cos1);
        let d = Dynamics::skew_shift(GOLDEN);
        let phases: Vec<TorusPoint> = (0..16).map(|i| rng::phase(3, i)).collect();
        let gaps: Vec<f64> = [1_000, 10_000, 100_000]
            .iter()
            .map(|&n| sup_birkhoff_gap(&f, &d, &phases, n, 64))
            .collect();
        assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{gaps:?}");
    }

    #[test]
    fn level_sets_of_ramp() {
        let f = Potential::builtin(Builtin::Ramp);
        let d = Dynamics::shift(GOLDEN, 0.0);
        let r = level_set_report(&f, &d, TorusPoint::ORIGIN, 10_000, 0.5, 0.1, 1024).unwrap();
        assert!((r.measure_delta - 0.2).abs() <= 2.0 / 1024.0);
        let frac = r.hits as f64 / 10_000.0;
        assert!((0.18..=0.22).contains(&frac));
        let out = level_set_report(&f, &d, TorusPoint::ORIGIN, 1000, 2.0, 0.1, 256).unwrap();
        assert_eq!((out.hits, out.measure_delta, out.measure_2delta), (0, 0.0, 0.0));
        assert!(level_set_report(&f, &d, TorusPoint::ORIGIN, 10, 0.5, 1.5, 16).is_err());
    }

    #[test]
    fn plateau_sandwich_on_builtins() {
        for f in [Potential::cos2d(), Potential::builtin(Builtin::Weierstrass { alpha: 0.5 })] {
            let d = Dynamics::skew_shift(GOLDEN);
            for (xi, delta) in [(0.3, 0.05), (-1.0, 0.02), (0.0, 0.1)] {
                let r = level_set_report(&f, &d, TorusPoint::new(0.1, 0.2), 5000, xi, delta, 512)
                    .unwrap();
                assert!(r.hits as f64 <= r.plateau_hits);
                assert!(r.measure_delta <= r.plateau_mean + 1e-12);
                assert!(r.plateau_mean <= r.measure_2delta + 1e-12);
            }
        }
    }

    #[test]
    fn exceptional_scan_examples() {
        let zero = Potential::constant(0.0);
        let grid: Vec<f64> = (-10..=10).map(|i| i as f64 * 0.002).collect();
        let s = exceptional_xi_scan(&zero, 0.01, &grid, 32);
        for (xi, m) in grid.iter().zip(&s.measures) {
            assert_eq!(*m > 0.1, xi.abs() < 0.01, "xi = {xi}");
        }
        let ramp = Potential::builtin(Builtin::Ramp);
        let grid: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
        assert!(exceptional_xi_scan(&ramp, 0.04, &grid, 256).exceptional.is_empty());
        let grid: Vec<f64> = (0..401).map(|i| -2.0 + 4.0 * i as f64 / 400.0).collect();
        let s = exceptional_xi_scan(&Potential::cos2d(), 1e-3, &grid, 1024);
        assert!(s.fraction <= 0.05);
    }

    #[test]
    fn log_average_constant() {
        let v = log_average(&Potential::constant(0.0), 2.0, LogMode::Raw, 64).unwrap();
        assert_eq!(v.value, 2f64.ln());
        assert_eq!(v.clamped, 0);
    }

    /// Adaptive Simpson on `log|cos a + cos b|` along one axis, nested.
    fn adaptive_log_cos2d() -> f64 {
        fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
            let c = 0.5 * (a + b);
            let (fa, fb, fc) = (f(a), f(b), f(c));
            let whole = (b - a) / 6.0 * (fa + 4.0 * fc + fb);
            rec(f, a, b, fa, fb, fc, whole, tol, depth)
        }
        #[allow(clippy::too_many_arguments)]
        fn rec<F: Fn(f64) -> f64>(
            f: &F, a: f64, b: f64, fa: f64, fb: f64, fc: f64, whole: f64, tol: f64, depth: u32,
        ) -> f64 {
            let c = 0.5 * (a + b);
            let (d, e) = (0.5 * (a + c), 0.5 * (c + b));
            let (fd, fe) = (f(d), f(e));
            let left = (c - a) / 6.0 * (fa + 4.0 * fd + fc);
            let right = (b - c) / 6.0 * (fc + 4.0 * fe + fb);
            if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
                return left + right + (left + right - whole) / 15.0;
            }
            rec(f, a, c, fa, fc, fd, left, tol / 2.0, depth - 1)
                + rec(f, c, b, fc, fb, fe, right, tol / 2.0, depth - 1)
        }
        let tau = std::f64::consts::TAU;
        // inner integral over x₂ has log singularities where cos b = −cos a;
        // split at those points so each piece has endpoint singularities only
        let inner = |x1: f64| -> f64 {
            let ca = (tau * x1).cos();
            let b0 = (-ca).clamp(-1.0, 1.0).acos() / tau;
            let mut cuts = vec![0.0, b0, 1.0 - b0, 1.0];
            cuts.sort_by(|a, b| a.total_cmp(b));
            let g = |x2: f64| clamped_log(ca + (tau * x2).cos());
            cuts.windows(2)
                .filter(|w| w[1] - w[0] > 1e-15)
                .map(|w| {
                    let (a, b) = (w[0], w[1]);
                    // shave the endpoints; the omitted mass is O(ε log ε)
                    let eps = 1e-9;
                    simpson(&g, a + eps, b - eps, 1e-9, 40)
                })
                .sum()
        };
        simpson(&inner, 0.0, 0.5, 1e-7, 30) * 2.0
    }

    #[test]
    fn log_average_cos2d_matches_adaptive_oracle() {
        let oracle = adaptive_log_cos2d();
        assert!((oracle + 2f64.ln()).abs() < 1e-3, "oracle {oracle}");
        let v = log_average(&Potential::cos2d(), 0.0, LogMode::Raw, DEFAULT_QUADRATURE).unwrap();
        assert!((v.value - oracle).abs() < 1e-3, "{} vs {oracle}", v.value);
    }

    #[test]
    fn regularized_close_to_raw() {
        let f = Potential::cos2d();
        let raw = log_average(&f, 0.7, LogMode::Raw, 512).unwrap().value;
        let reg = log_average(&f, 0.7, LogMode::Regularized { delta: 0.01 }, 512).unwrap().value;
        assert!(reg >= raw);
        assert!((raw - reg).abs() <= 0.05);
    }

    #[test]
    fn deviation_examples() {
        let d = Dynamics::shift(GOLDEN, 0.414_213_562_373_095_1);
        let c = deviation_measure(&Potential::constant(0.5), &d, 100, 2.0, 1e-12, 100, 1, 16).unwrap();
        assert_eq!(c.fraction, 0.0);
        let f = Potential::cos2d();
        let r = deviation_measure(&f, &d, 1000, 0.7, 0.1, 200, 5, 512).unwrap();
        assert!(r.fraction <= 0.1, "{}", r.fraction);
        let r = deviation_measure(&f, &d, 1000, 0.7, 10.0, 200, 5, 512).unwrap();
        assert_eq!(r.fraction, 0.0);
        assert!(deviation_measure(&f, &d, 10, 0.7, 0.1, 99, 5, 16).is_err());
    }

    #[test]
    fn deviation_monotone_in_tol() {
        let d = Dynamics::skew_shift(GOLDEN);
        let f = Potential::cos2d();
        let fr: Vec<f64> = [0.0, 0.02, 0.05, 0.1, 0.5]
            .iter()
            .map(|&t| deviation_measure(&f, &d, 200, 0.3, t, 100, 9, 256).unwrap().fraction)
            .collect();
        assert!(fr.windows(2).all(|w| w[0] >= w[1]), "{fr:?}");
    }
}
