//! Large deviations of `log|f_N|` over phases, and the large-disorder
//! comparison of `f_N` against its diagonal part.

use serde::Serialize;

use super::{require, sample_phases, Report, Setup};
use crate::error::Result;
use crate::operator::determinant::determinant;
use crate::operator::Kernel;
use crate::report::Table;
use crate::rng::subseed;
use crate::row;
use crate::stats::{mean_stderr, wilson95, Mean};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LdtParams {
    pub n: usize,
    pub kappa: f64,
    pub samples: usize,
    /// Overrides the deviation threshold `N^{1−κ}`.
    pub tol: Option<f64>,
}

impl LdtParams {
    pub fn threshold(&self) -> f64 {
        self.tol.unwrap_or_else(|| (self.n as f64).powf(1.0 - self.kappa))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeviationReport {
    pub n: usize,
    pub energy: f64,
    pub tol: f64,
    pub samples: usize,
    pub fraction: f64,
    pub ci95: f64,
    /// Mean of `log|f_N|` over the sample the fraction is computed on.
    pub mean_log_det: f64,
    /// Mean of `log|f_N|` over an independent sample of the same size.
    pub mean_log_det_independent: f64,
    /// Fraction measured against the independent mean.
    pub fraction_independent: f64,
    pub max_deviation: f64,
}

fn log_dets(setup: &Setup, e: f64, n: usize, samples: usize, seed: u64) -> Vec<f64> {
    sample_phases(seed, samples, |_, x| {
        determinant(&setup.shifted(x, n, e), Kernel::EXACT).log_abs
    })
}

/// Fraction of phases with `|log|f_N(x)| − ⟨log|f_N|⟩| > N^{1−κ}`.
pub fn determinant_ldt(setup: &Setup, e: f64, params: LdtParams, seed: u64) -> Result<DeviationReport> {
    require(params.samples >= 100, format!("samples = {} must be at least 100", params.samples))?;
    require(params.n >= 1, "N must be positive")?;
    let tol = params.threshold();
    require(tol >= 0.0, "deviation threshold must be nonnegative")?;
    let vals = log_dets(setup, e, params.n, params.samples, seed);
    let other = log_dets(setup, e, params.n, params.samples, subseed(seed, 0x1d7));
    let mean: f64 = vals.iter().copied().collect::<Mean>().value();
    let mean_ind: f64 = other.iter().copied().collect::<Mean>().value();
    let count = |m: f64| vals.iter().filter(|v| (*v - m).abs() > tol).count();
    let hits = count(mean);
    let (fraction, ci95) = wilson95(hits, params.samples);
    Ok(DeviationReport {
        n: params.n,
        energy: e,
        tol,
        samples: params.samples,
        fraction,
        ci95,
        mean_log_det: mean,
        mean_log_det_independent: mean_ind,
        fraction_independent: count(mean_ind) as f64 / params.samples as f64,
        max_deviation: vals.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max),
    })
}

impl Report for DeviationReport {
    fn tables(&self) -> Vec<Table> {
        let mut t = Table::new(
            "deviation",
            &[
                "n",
                "energy",
                "tol",
                "samples",
                "fraction",
                "ci95",
                "mean_log_det",
                "mean_log_det_independent",
                "fraction_independent",
                "max_deviation",
            ],
        );
        t.push(row![
            self.n,
            self.energy,
            self.tol,
            self.samples,
            self.fraction,
            self.ci95,
            self.mean_log_det,
            self.mean_log_det_independent,
            self.fraction_independent,
            self.max_deviation
        ]);
        vec![t]
    }
}

/// `|log|f_N| − Σ log|c_n||`, the distance between the determinant and the
/// product of its diagonal. Infinite when a diagonal entry vanishes.
pub fn diagonal_gap(c: &[f64]) -> f64 {
    let f = determinant(c, Kernel::EXACT).log_abs;
    let d: f64 = c.iter().map(|v| v.abs().ln()).sum();
    if f.is_finite() && d.is_finite() {
        (f - d).abs()
    } else if f == d {
        0.0
    } else {
        f64::INFINITY
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DisorderRow {
    pub energy: f64,
    /// `N^{−1}⟨log|f_N|⟩`
    pub mean: f64,
    pub stderr: f64,
    /// `mean > ½ log λ`
    pub pass: bool,
    pub diag_gap_median: f64,
    pub diag_gap_max: f64,
    /// Fraction of phases with `diag_gap > N λ^{−1/2}`.
    pub diag_gap_flagged: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DisorderReport {
    pub lambda: f64,
    pub n: usize,
    pub samples: usize,
    pub threshold: f64,
    pub diag_gap_scale: f64,
    pub failing_fraction: f64,
    pub rows: Vec<DisorderRow>,
}

/// Per-energy phase means of `N^{−1} log|f_N|` against `½ log λ`.
pub fn large_disorder_check(
    setup: &Setup,
    energies: &[f64],
    n: usize,
    samples: usize,
    lambda0: f64,
    seed: u64,
) -> Result<DisorderReport> {
    require(
        setup.lambda >= lambda0,
        format!("λ = {} is below the large-disorder floor {lambda0}", setup.lambda),
    )?;
    require(n >= 1 && samples >= 1 && !energies.is_empty(), "empty scan")?;
    let nf = n as f64;
    let per_sample = sample_phases(seed, samples, |_, x| {
        let sites = setup.sites(x, 1, n as i64);
        energies
            .iter()
            .map(|&e| {
                let c: Vec<f64> = sites.iter().map(|v| v - e).collect();
                (determinant(&c, Kernel::EXACT).log_abs / nf, diagonal_gap(&c))
            })
            .collect::<Vec<_>>()
    });
    let threshold = 0.5 * setup.lambda.ln();
    let gap_scale = nf / setup.lambda.sqrt();
    let rows: Vec<DisorderRow> = energies
        .iter()
        .enumerate()
        .map(|(k, &energy)| {
            let vals: Vec<f64> = per_sample.iter().map(|s| s[k].0).collect();
            let mut gaps: Vec<f64> = per_sample.iter().map(|s| s[k].1).collect();
            gaps.sort_by(f64::total_cmp);
            let (mean, stderr) = mean_stderr(&vals);
            DisorderRow {
                energy,
                mean,
                stderr,
                pass: mean > threshold,
                diag_gap_median: gaps[gaps.len() / 2],
                diag_gap_max: gaps[gaps.len() - 1],
                diag_gap_flagged: gaps.iter().filter(|g| **g > gap_scale).count() as f64
                    / samples as f64,
            }
        })
        .collect();
    let failing = rows.iter().filter(|r| !r.pass).count();
    Ok(DisorderReport {
        lambda: setup.lambda,
        n,
        samples,
        threshold,
        diag_gap_scale: gap_scale,
        failing_fraction: failing as f64 / rows.len() as f64,
        rows,
    })
}

impl Report for DisorderReport {
    fn tables(&self) -> Vec<Table> {
        let mut t = Table::new(
            "large_disorder",
            &[
                "energy",
                "mean_log_det_per_site",
                "stderr",
                "pass",
                "diag_gap_median",
                "diag_gap_max",
                "diag_gap_flagged",
            ],
        );
        for r in &self.rows {
            t.push(row![
                r.energy,
                r.mean,
                r.stderr,
                r.pass,
                r.diag_gap_median,
                r.diag_gap_max,
                r.diag_gap_flagged
            ]);
        }
        vec![t]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::Potential;
    use crate::torus::{Dynamics, TorusPoint};

    const GOLDEN: f64 = 0.618_033_988_749_894_9;

    fn params(n: usize, tol: Option<f64>) -> LdtParams {
        LdtParams {
            n,
            kappa: 0.2,
            samples: 200,
            tol,
        }
    }

    #[test]
    fn constant_potential_never_deviates() {
        let p = Potential::constant(0.4);
        let s = Setup::new(&p, Dynamics::shift(GOLDEN, 0.4142135623730951), 2.0);
        let r = determinant_ldt(&s, 0.7, params(100, None), 5).unwrap();
        assert_eq!(r.fraction, 0.0);
        assert_eq!(r.mean_log_det, r.mean_log_det_independent);
    }

    #[test]
    fn degenerate_thresholds() {
        let p = Potential::cos2d();
        let s = Setup::new(&p, Dynamics::shift(GOLDEN, 0.4142135623730951), 2.0);
        let inf = determinant_ldt(&s, 0.7, params(50, Some(f64::INFINITY)), 1).unwrap();
        assert_eq!(inf.fraction, 0.0);
        let zero = determinant_ldt(&s, 0.7, params(50, Some(0.0)), 1).unwrap();
        assert_eq!(zero.fraction, 1.0);
        assert!(determinant_ldt(&s, 0.7, LdtParams { samples: 99, ..params(50, None) }, 1).is_err());
    }

    #[test]
    fn constant_diagonal_large_disorder() {
        let p = Potential::constant(1.0);
        let s = Setup::new(&p, Dynamics::skew_shift(GOLDEN), 100.0);
        let r = large_disorder_check(&s, &[0.0], 40, 3, 20.0, 1).unwrap();
        // f_N for constant c = 100: (r^{N+1} − r^{−N−1})/(r − 1/r), r + 1/r = 100
        let rr = (100.0 + (100.0f64 * 100.0 - 4.0).sqrt()) / 2.0;
        let exact = (41.0 * rr.ln() - (rr - 1.0 / rr).ln()) / 40.0;
        assert!((r.rows[0].mean - exact).abs() < 1e-12);
        assert!(r.rows[0].pass);
        assert!((r.rows[0].mean - 99f64.ln()).abs() < 0.02);
        assert!(large_disorder_check(&s, &[0.0], 40, 3, 200.0, 1).is_err());
    }

    #[test]
    fn resonant_energy_inflates_diagonal_gap() {
        let p = Potential::cos2d();
        let dyn_ = Dynamics::skew_shift(GOLDEN);
        let x = TorusPoint::new(0.2, 0.7);
        let lambda = 100.0;
        let s = Setup::new(&p, dyn_, lambda);
        let sites = s.sites(x, 1, 50);
        let resonant = sites[20];
        let at = |e: f64| diagonal_gap(&sites.iter().map(|v| v - e).collect::<Vec<_>>());
        let scale = 50.0 / lambda.sqrt();
        assert!(at(resonant + 1e-9) > scale);
        assert!(at(1000.0) < 1e-3);
    }
}
