//! Lyapunov exponents, finite-scale determinant means and the uniform upper
//! bound on `N′^{−1} log‖M_{N′}‖`.

use serde::Serialize;

use super::{require, sample_phases, Report, Setup};
use crate::error::Result;
use crate::operator::determinant::prefix_determinants;
use crate::operator::monodromy::log_norm_profile;
use crate::operator::Kernel;
use crate::report::Table;
use crate::row;
use crate::stats::{fit_line, mean_stderr, LineFit};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LyapunovEstimate {
    pub energy: f64,
    pub l_hat: f64,
    pub stderr: f64,
    pub n: usize,
    pub samples: usize,
    /// `(ℓ, mean of ℓ^{−1} log‖M_ℓ‖, stderr)` at `ℓ ∈ {N/8, N/4, N/2, N}`
    pub per_scale: Vec<(usize, f64, f64)>,
}

/// Phase average of `N^{−1} log‖M_N(x, ω, E)‖` over `samples` random phases.
pub fn lyapunov_estimate(
    setup: &Setup,
    e: f64,
    n: usize,
    samples: usize,
    seed: u64,
) -> Result<LyapunovEstimate> {
    require(n >= 10, format!("N = {n} must be at least 10"))?;
    require(samples >= 10, format!("samples = {samples} must be at least 10"))?;
    let mut scales = vec![n / 8, n / 4, n / 2, n];
    scales.dedup();
    let per_sample = sample_phases(seed, samples, |_, x| {
        let c = setup.shifted(x, n, e);
        let prof = log_norm_profile(&c, &scales);
        prof.iter().zip(&scales).map(|(v, l)| v / *l as f64).collect::<Vec<_>>()
    });
    let per_scale: Vec<(usize, f64, f64)> = scales
        .iter()
        .enumerate()
        .map(|(k, &l)| {
            let col: Vec<f64> = per_sample.iter().map(|s| s[k]).collect();
            let (m, se) = mean_stderr(&col);
            (l, m, se)
        })
        .collect();
    let &(_, l_hat, stderr) = per_scale.last().expect("nonempty scales");
    Ok(LyapunovEstimate {
        energy: e,
        l_hat,
        stderr,
        n,
        samples,
        per_scale,
    })
}

impl Report for LyapunovEstimate {
    fn tables(&self) -> Vec<Table> {
        let mut t = Table::new("lyapunov_scales", &["ell", "mean_log_norm_per_site", "stderr"]);
        for &(l, m, s) in &self.per_scale {
            t.push(row![l, m, s]);
        }
        vec![t]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaleRow {
    pub ell: usize,
    pub mean: f64,
    pub stderr: f64,
    /// `|mean_ℓ − mean_{previous ℓ}|`
    pub gap: Option<f64>,
    /// `ℓ^{−1/2}`
    pub reference: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScaleScan {
    pub energy: f64,
    pub samples: usize,
    pub rows: Vec<ScaleRow>,
    /// Fit of `log` of the non-increasing envelope of the gaps against `log ℓ`.
    pub envelope_fit: Option<LineFit>,
}

/// `ℓ^{−1}⟨log|f_ℓ|⟩` at each scale, estimated on windows `[1, ℓ]` that
/// share their phase across scales.
pub fn scale_convergence_scan(
    setup: &Setup,
    e: f64,
    scales: &[usize],
    samples: usize,
    seed: u64,
) -> Result<ScaleScan> {
    require(!scales.is_empty(), "no scales given")?;
    require(scales[0] >= 1 && scales.windows(2).all(|w| w[0] < w[1]), "scales must increase")?;
    require(samples >= 1, "need at least one sample")?;
    let top = *scales.last().unwrap();
    let per_sample = sample_phases(seed, samples, |_, x| {
        let pre = prefix_determinants(&setup.shifted(x, top, e), Kernel::EXACT);
        scales.iter().map(|&l| pre[l].log_abs / l as f64).collect::<Vec<_>>()
    });
    let mut rows: Vec<ScaleRow> = Vec::with_capacity(scales.len());
    for (k, &ell) in scales.iter().enumerate() {
        let col: Vec<f64> = per_sample.iter().map(|s| s[k]).collect();
        let (mean, stderr) = mean_stderr(&col);
        let gap = rows.last().map(|p| (mean - p.mean).abs());
        rows.push(ScaleRow {
            ell,
            mean,
            stderr,
            gap,
            reference: (ell as f64).powf(-0.5),
        });
    }
    let mut env: Vec<(f64, f64)> = Vec::new();
    let mut running = 0.0f64;
    for r in rows.iter().rev() {
        if let Some(g) = r.gap {
            running = running.max(g);
            env.push(((r.ell as f64).ln(), running.ln()));
        }
    }
    let envelope_fit = if env.iter().all(|(_, y)| y.is_finite()) {
        let (xs, ys): (Vec<f64>, Vec<f64>) = env.into_iter().unzip();
        fit_line(&xs, &ys)
    } else {
        None
    };
    Ok(ScaleScan {
        energy: e,
        samples,
        rows,
        envelope_fit,
    })
}

impl Report for ScaleScan {
    fn tables(&self) -> Vec<Table> {
        let mut t = Table::new(
            "scale_convergence",
            &["ell", "mean_log_det_per_site", "stderr", "gap", "reference"],
        );
        for r in &self.rows {
            t.push(row![r.ell, r.mean, r.stderr, r.gap.unwrap_or(f64::NAN), r.reference]);
        }
        vec![t]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UniformUpper {
    pub energy: f64,
    pub n: usize,
    pub samples: usize,
    /// `sup_x max_{√N ≤ N′ ≤ N} N′^{−1} log‖M_{N′}(x)‖`
    pub sup: f64,
    /// `N^{−1}·mean_x log‖M_N(x)‖`
    pub mean: f64,
    pub excess: f64,
    /// `N^{−κ}`
    pub allowance: f64,
    pub argmax_length: usize,
}

/// Sampled supremum of the normalized log-norms above the mean.
pub fn uniform_upper_check(
    setup: &Setup,
    e: f64,
    n: usize,
    sample_sup: usize,
    kappa: f64,
    seed: u64,
) -> Result<UniformUpper> {
    require(sample_sup >= 1000, format!("sample_sup = {sample_sup} must be at least 1000"))?;
    require(n >= 4, "N must be at least 4")?;
    let start = (n as f64).sqrt().ceil() as usize;
    let lengths: Vec<usize> = (start..=n).collect();
    let per_sample = sample_phases(seed, sample_sup, |_, x| {
        let prof = log_norm_profile(&setup.shifted(x, n, e), &lengths);
        let (mut best, mut arg) = (f64::NEG_INFINITY, start);
        for (v, &l) in prof.iter().zip(&lengths) {
            let r = v / l as f64;
            if r > best {
                best = r;
                arg = l;
            }
        }
        (best, arg, prof[prof.len() - 1] / n as f64)
    });
    let (mut sup, mut argmax_length) = (f64::NEG_INFINITY, start);
    for &(b, a, _) in &per_sample {
        if b > sup {
            sup = b;
            argmax_length = a;
        }
    }
    let finals: Vec<f64> = per_sample.iter().map(|p| p.2).collect();
    let (mean, _) = mean_stderr(&finals);
    Ok(UniformUpper {
        energy: e,
        n,
        samples: sample_sup,
        sup,
        mean,
        excess: sup - mean,
        allowance: (n as f64).powf(-kappa),
        argmax_length,
    })
}

impl Report for UniformUpper {
    fn tables(&self) -> Vec<Table> {
        let mut t = Table::new(
            "uniform_upper",
            &["energy", "n", "sup", "mean", "excess", "allowance", "argmax_length"],
        );
        t.push(row![
            self.energy,
            self.n,
            self.sup,
            self.mean,
            self.excess,
            self.allowance,
            self.argmax_length
        ]);
        vec![t]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::Potential;
    use crate::torus::Dynamics;

    const GOLDEN: f64 = 0.618_033_988_749_894_9;

    /// `log‖M_N‖` for the constant cocycle `[[E, −1], [1, 0]]`, `E > 2`, from
    /// the explicit entries `[[f_N, −f_{N−1}], [f_{N−1}, −f_{N−2}]]`,
    /// `f_k = (r^{k+1} − r^{−k−1})/(r − r^{−1})`.
    fn free_log_norm(e: f64, n: usize) -> f64 {
        let r = (e + (e * e - 4.0).sqrt()) / 2.0;
        let f = |k: i64| (r.powi((k + 1) as i32) - r.powi(-(k as i32) - 1)) / (r - 1.0 / r);
        let n = n as i64;
        let m = [[f(n), -f(n - 1)], [f(n - 1), -f(n - 2)]];
        crate::operator::LogScaledMatrix::from_matrix(m).log_norm()
    }

    #[test]
    fn free_hyperbolic_exponent() {
        let p = Potential::constant(0.0);
        let s = Setup::new(&p, Dynamics::skew_shift(GOLDEN), 1.0);
        let est = lyapunov_estimate(&s, 3.0, 200, 10, 1).unwrap();
        assert!(est.stderr < 1e-15);
        let exact = free_log_norm(3.0, 200) / 200.0;
        assert!((est.l_hat - exact).abs() < 1e-13);
        let l = ((3.0 + 5f64.sqrt()) / 2.0).ln();
        // finite-size bias is log(const)/N
        assert!((est.l_hat - l).abs() < 0.3 / 200.0);
        assert_eq!(est.per_scale.iter().map(|p| p.0).collect::<Vec<_>>(), vec![25, 50, 100, 200]);
    }

    #[test]
    fn free_elliptic_exponent_vanishes() {
        let p = Potential::constant(0.0);
        let s = Setup::new(&p, Dynamics::skew_shift(GOLDEN), 1.0);
        let est = lyapunov_estimate(&s, 0.0, 10_000, 10, 1).unwrap();
        assert!(est.l_hat.abs() < 0.02);
        assert!(est.l_hat >= -1e-9);
    }

    #[test]
    fn preconditions() {
        let p = Potential::constant(0.0);
        let s = Setup::new(&p, Dynamics::skew_shift(GOLDEN), 1.0);
        assert!(lyapunov_estimate(&s, 0.0, 9, 10, 1).is_err());
        assert!(lyapunov_estimate(&s, 0.0, 10, 9, 1).is_err());
        assert!(scale_convergence_scan(&s, 0.0, &[10, 10], 5, 1).is_err());
        assert!(uniform_upper_check(&s, 3.0, 100, 999, 0.1, 1).is_err());
    }

    #[test]
    fn constant_scale_scan_closed_form() {
        let p = Potential::constant(1.0);
        let s = Setup::new(&p, Dynamics::shift(GOLDEN, 0.3), 1.0);
        let scan = scale_convergence_scan(&s, -1.0, &[1, 2, 5, 10, 100], 4, 3).unwrap();
        for r in &scan.rows {
            let exact = ((r.ell + 1) as f64).ln() / r.ell as f64;
            assert!((r.mean - exact).abs() < 1e-14, "{r:?}");
            assert!(r.stderr < 1e-15);
        }
        for w in scan.rows.windows(2) {
            let g = (((w[1].ell + 1) as f64).ln() / w[1].ell as f64
                - ((w[0].ell + 1) as f64).ln() / w[0].ell as f64)
                .abs();
            assert!((w[1].gap.unwrap() - g).abs() < 1e-14);
        }
    }

    #[test]
    fn uniform_upper_free_hyperbolic() {
        let p = Potential::constant(0.0);
        let s = Setup::new(&p, Dynamics::skew_shift(GOLDEN), 1.0);
        let u = uniform_upper_check(&s, 3.0, 400, 1000, 0.1, 2).unwrap();
        // N′^{−1} log‖M_{N′}‖ decreases in N′, so the sup sits at N′ = √N
        assert_eq!(u.argmax_length, 20);
        let exact = free_log_norm(3.0, 20) / 20.0 - free_log_norm(3.0, 400) / 400.0;
        assert!((u.excess - exact).abs() < 1e-12, "{} vs {exact}", u.excess);
        assert!(u.excess < u.allowance);
    }
}
