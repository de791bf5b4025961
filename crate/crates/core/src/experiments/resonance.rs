//! Resonance scan: the orbit log-average of `|f − ξ|` started from the far
//! shifted phase `T^{N̄}x₀`, compared with the space average.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{require, Report, Setup};
use crate::ergodic::{clamped_log, quadrature_node};
use crate::error::Result;
use crate::operator::eigen;
use crate::report::Table;
use crate::row;
use crate::stats::Mean;
use crate::torus::TorusPoint;

/// The function whose level sets are scanned.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ResonanceTarget {
    /// `λV` itself.
    Potential,
    /// `x ↦ E_j^{(ℓ)}(x)`, the `j`-th smallest eigenvalue of `H_{[1,ℓ]}(x)`.
    /// `ℓ` defaults to `⌈N^{0.2}⌉`; `j` is clamped to `ℓ − 1`.
    Eigenvalue { index: usize, ell: Option<usize> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResonanceParams {
    pub x0: TorusPoint,
    pub n: usize,
    pub nbar: Vec<u64>,
    pub xi: Vec<f64>,
    pub kappa: f64,
    pub beta: f64,
    pub target: ResonanceTarget,
    pub quadrature: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResonanceRow {
    pub nbar: u64,
    pub xi: f64,
    pub orbit_average: f64,
    pub space_average: f64,
    pub deviation: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResonanceReport {
    pub n: usize,
    pub threshold: f64,
    pub ell: Option<usize>,
    pub flagged_fraction: f64,
    /// `(N̄, flagged fraction over ξ)`
    pub per_nbar: Vec<(u64, f64)>,
    pub rows: Vec<ResonanceRow>,
}

struct Evaluator<'a> {
    setup: &'a Setup<'a>,
    eig: Option<(usize, usize)>,
}

impl Evaluator<'_> {
    fn eval(&self, x: TorusPoint) -> f64 {
        match self.eig {
            None => self.setup.lambda * self.setup.potential.eval(x),
            Some((j, ell)) => {
                let d = self.setup.sites(x, 1, ell as i64);
                let ev = eigen::eigenvalues(&d, eigen::default_tolerance(&d))
                    .expect("bisection on a finite window converges");
                ev[j]
            }
        }
    }
}

/// Flags `(N̄, ξ)` when
/// `|N^{−1}Σ_{k=1}^{N} log|f(T^k T^{N̄} x₀) − ξ| − ⟨log|f − ξ|⟩| > N^{−κ}`.
pub fn resonance_scan(setup: &Setup, params: &ResonanceParams) -> Result<ResonanceReport> {
    let p = params;
    require(p.n >= 1, "N must be positive")?;
    require(!p.nbar.is_empty() && !p.xi.is_empty(), "empty N̄ or ξ list")?;
    require(p.quadrature >= 2, "quadrature must be at least 2")?;
    let nf = p.n as f64;
    let cap = nf.powf(p.beta).exp();
    for &nb in &p.nbar {
        require(
            nb as f64 > nf * nf,
            format!("N̄ = {nb} must exceed N² = {}", nf * nf),
        )?;
        require(nb as f64 <= cap, format!("N̄ = {nb} exceeds e^(N^β) = {cap:.6e}"))?;
        require(nb <= i64::MAX as u64 - p.n as u64, "N̄ too large")?;
    }
    let ell = match p.target {
        ResonanceTarget::Potential => None,
        ResonanceTarget::Eigenvalue { ell, .. } => Some(ell.unwrap_or_else(|| nf.powf(0.2).ceil() as usize).max(1)),
    };
    let ev = Evaluator {
        setup,
        eig: match (p.target, ell) {
            (ResonanceTarget::Eigenvalue { index, .. }, Some(l)) => Some((index.min(l - 1), l)),
            _ => None,
        },
    };

    let m = p.quadrature;
    let grid: Vec<f64> = (0..m * m)
        .into_par_iter()
        .map(|k| ev.eval(quadrature_node(k / m, k % m, m)))
        .collect();
    let space: Vec<f64> = p
        .xi
        .par_iter()
        .map(|&xi| grid.iter().map(|v| clamped_log(v - xi)).collect::<Mean>().value())
        .collect();

    let threshold = nf.powf(-p.kappa);
    let per: Vec<Vec<ResonanceRow>> = p
        .nbar
        .par_iter()
        .map(|&nb| {
            let orbit: Vec<f64> = (1..=p.n as i64)
                .map(|k| ev.eval(setup.dynamics.orbit_point(p.x0, nb as i64 + k)))
                .collect();
            p.xi
                .iter()
                .zip(&space)
                .map(|(&xi, &sa)| {
                    let oa = orbit.iter().map(|v| clamped_log(v - xi)).collect::<Mean>().value();
                    let deviation = (oa - sa).abs();
                    ResonanceRow {
                        nbar: nb,
                        xi,
                        orbit_average: oa,
                        space_average: sa,
                        deviation,
                        flagged: deviation > threshold,
                    }
                })
                .collect()
        })
        .collect();
    let per_nbar = p
        .nbar
        .iter()
        .zip(&per)
        .map(|(&nb, rows)| (nb, rows.iter().filter(|r| r.flagged).count() as f64 / rows.len() as f64))
        .collect();
    let rows: Vec<ResonanceRow> = per.into_iter().flatten().collect();
    let flagged_fraction = rows.iter().filter(|r| r.flagged).count() as f64 / rows.len() as f64;
    Ok(ResonanceReport {
        n: p.n,
        threshold,
        ell,
        flagged_fraction,
        per_nbar,
        rows,
    })
}

impl Report for ResonanceReport {
    fn tables(&self) -> Vec<Table> {
        let mut t = Table::new(
            "resonance",
            &["nbar", "xi", "orbit_average", "space_average", "deviation", "flagged"],
        );
        for r in &self.rows {
            t.push(row![r.nbar, r.xi, r.orbit_average, r.space_average, r.deviation, r.flagged]);
        }
        vec![t]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::linspace;
    use crate::potential::Potential;
    use crate::torus::Dynamics;

    const GOLDEN: f64 = 0.618_033_988_749_894_9;
    const SILVER: f64 = 0.414_213_562_373_095_1;

    fn base(xi: Vec<f64>) -> ResonanceParams {
        ResonanceParams {
            x0: TorusPoint::new(0.1, 0.2),
            n: 200,
            nbar: vec![100_000, 1_000_000],
            xi,
            kappa: 0.2,
            beta: 0.5,
            target: ResonanceTarget::Potential,
            quadrature: 256,
        }
    }

    #[test]
    fn constant_function_never_flags() {
        let p = Potential::constant(0.3);
        let s = Setup::new(&p, Dynamics::shift(GOLDEN, SILVER), 1.0);
        let r = resonance_scan(&s, &base(vec![-1.0, 0.0, 2.0])).unwrap();
        assert_eq!(r.flagged_fraction, 0.0);
        for row in &r.rows {
            assert_eq!(row.deviation, 0.0);
        }
    }

    #[test]
    fn raw_cosine_rarely_flags() {
        let p = Potential::cos2d();
        let s = Setup::new(&p, Dynamics::shift(GOLDEN, SILVER), 1.0);
        let r = resonance_scan(&s, &base(linspace(-2.0, 2.0, 101))).unwrap();
        assert!(r.flagged_fraction <= 0.1, "{}", r.flagged_fraction);
        assert_eq!(r.rows.len(), 202);
    }

    #[test]
    fn preconditions_on_nbar() {
        let p = Potential::cos2d();
        let s = Setup::new(&p, Dynamics::shift(GOLDEN, SILVER), 1.0);
        let mut q = base(vec![0.0]);
        q.nbar = vec![40_000];
        assert!(resonance_scan(&s, &q).is_err());
        q.nbar = vec![10_000_000];
        assert!(resonance_scan(&s, &q).is_err());
    }

    #[test]
    fn eigenvalue_target_runs() {
        let p = Potential::cos2d();
        let s = Setup::new(&p, Dynamics::skew_shift(GOLDEN), 2.0);
        let mut q = base(linspace(-4.0, 4.0, 9));
        q.target = ResonanceTarget::Eigenvalue { index: 0, ell: None };
        q.quadrature = 64;
        let r = resonance_scan(&s, &q).unwrap();
        assert_eq!(r.ell, Some(3));
        assert!(r.rows.iter().all(|r| r.deviation.is_finite()));
    }
}
