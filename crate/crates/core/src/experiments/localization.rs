//! Eigenfunction profiles of `H_{[−N_box, N_box]}(x₀)`: centers, mass
//! fractions and exponential tail rates.

use rayon::prelude::*;
use serde::Serialize;

use super::lyapunov::lyapunov_estimate;
use super::{require, Report, Setup};
use crate::error::Result;
use crate::operator::eigen;
use crate::report::Table;
use crate::rng::subseed;
use crate::row;
use crate::stats::fit_line;
use crate::torus::TorusPoint;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocalizationParams {
    pub x0: TorusPoint,
    pub n_box: usize,
    /// Required fraction `ρ` of the rate `L̂(E)/2`.
    pub rho: f64,
    pub min_r2: f64,
    /// Mass level and total width for the compactness statistic.
    pub mass_level: f64,
    pub width: usize,
    pub lyapunov_n: usize,
    pub lyapunov_samples: usize,
    pub seed: u64,
}

impl LocalizationParams {
    pub fn new(x0: TorusPoint, n_box: usize) -> Self {
        LocalizationParams {
            x0,
            n_box,
            rho: 0.5,
            min_r2: 0.8,
            mass_level: 0.99,
            width: 60,
            lyapunov_n: 200,
            lyapunov_samples: 10,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayProfile {
    pub energy: f64,
    /// Rounded center of mass `Σ n ψ(n)²`, as a global site.
    pub center: i64,
    /// Smallest `h` with `mass_level` of the mass in `[center − h, center + h]`.
    pub half_width: usize,
    /// `(2h + 1, mass in [center − h, center + h])` for `h = 0, 1, 2, 4, …`
    /// and finally the `h` covering the whole box, where the fraction is 1.
    pub mass_fraction: Vec<(usize, f64)>,
    pub fitted_rate: f64,
    pub fit_r2: f64,
    pub l_hat: f64,
    pub near_edge: bool,
    pub localized: bool,
    pub compact: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalizationReport {
    pub n_box: usize,
    pub collar: usize,
    pub considered: usize,
    /// Fraction of edge-excluded eigenpairs with `rate ≥ ρL̂/2` and `r² ≥ min_r2`.
    pub localized_fraction: f64,
    /// Fraction of edge-excluded eigenpairs whose `mass_level` window fits in `width` sites.
    pub compact_fraction: f64,
    /// Fraction that is both localized and compact.
    pub localized_compact_fraction: f64,
    pub profiles: Vec<DecayProfile>,
}

/// `log|ψ(n)|` on the window from the anchor value at `p`, using the ratio
/// recurrences that run towards `p` from either Dirichlet end.
fn log_profile(c: &[f64], p: usize, log_peak: f64) -> Vec<f64> {
    let len = c.len();
    let mut out = vec![0.0; len];
    out[p] = log_peak;
    // s[k] = ψ(k+1)/ψ(k), s[len−1] = 0
    let mut s = vec![0.0; len];
    for k in (p + 1..len).rev() {
        s[k - 1] = 1.0 / (c[k] - s[k]);
    }
    for n in p + 1..len {
        out[n] = out[n - 1] + s[n - 1].abs().ln();
    }
    // t[k] = ψ(k−1)/ψ(k), t[0] = 0
    let mut t = vec![0.0; len];
    for k in 0..p {
        t[k + 1] = 1.0 / (c[k] - t[k]);
    }
    for n in (0..p).rev() {
        out[n] = out[n + 1] + t[n + 1].abs().ln();
    }
    out
}

fn profile(
    c: &[f64],
    v: &[f64],
    a: i64,
    energy: f64,
    l_hat: f64,
    collar: usize,
    params: &LocalizationParams,
) -> DecayProfile {
    let len = v.len();
    let mass: Vec<f64> = v.iter().map(|x| x * x).collect();
    let com = mass.iter().enumerate().map(|(i, m)| i as f64 * m).sum::<f64>() / mass.iter().sum::<f64>();
    let ci = (com.round() as usize).min(len - 1);
    let reach = ci.max(len - 1 - ci);

    let mut cumulative = Vec::with_capacity(reach + 1);
    let mut acc = mass[ci];
    cumulative.push(acc);
    for h in 1..=reach {
        if h <= ci {
            acc += mass[ci - h];
        }
        if ci + h < len {
            acc += mass[ci + h];
        }
        cumulative.push(acc);
    }
    let total = acc;
    let frac = |h: usize| if h == reach { 1.0 } else { (cumulative[h] / total).min(1.0) };
    let half_width = (0..=reach).find(|&h| frac(h) >= params.mass_level).unwrap_or(reach);
    let mut mass_fraction = Vec::new();
    let mut h = 0;
    while h < reach {
        mass_fraction.push((2 * h + 1, frac(h)));
        h = if h == 0 { 1 } else { 2 * h };
    }
    mass_fraction.push((2 * reach + 1, 1.0));

    let peak = (0..len).max_by(|&i, &j| v[i].abs().total_cmp(&v[j].abs())).unwrap_or(0);
    let logs = log_profile(c, peak, v[peak].abs().ln());
    let (xs, ys): (Vec<f64>, Vec<f64>) = (0..len)
        .filter(|&i| i != peak && logs[i].is_finite())
        .map(|i| ((i as f64 - peak as f64).abs(), logs[i]))
        .unzip();
    let (fitted_rate, fit_r2) = match fit_line(&xs, &ys) {
        Some(f) => (-f.slope, f.r2),
        None => (0.0, 0.0),
    };
    let near_edge = ci < collar || len - 1 - ci < collar;
    DecayProfile {
        energy,
        center: a + ci as i64,
        half_width,
        mass_fraction,
        fitted_rate,
        fit_r2,
        l_hat,
        near_edge,
        localized: fitted_rate > 0.0
            && fitted_rate >= params.rho * l_hat / 2.0
            && fit_r2 >= params.min_r2,
        compact: 2 * half_width + 1 <= params.width,
    }
}

/// Full eigen-decomposition of `H_{[−N_box, N_box]}(x₀)` with a decay
/// profile per eigenpair.
pub fn localization_profile(setup: &Setup, params: &LocalizationParams) -> Result<LocalizationReport> {
    require(params.n_box >= 50, format!("N_box = {} must be at least 50", params.n_box))?;
    let a = -(params.n_box as i64);
    let b = params.n_box as i64;
    let d = setup.sites(params.x0, a, b);
    let dec = eigen::decompose(&d, eigen::default_tolerance(&d), true)?;
    let vecs = dec.eigenvectors.expect("vectors requested");
    let collar = (params.n_box as f64).powf(0.75).floor() as usize;
    let l_hats: Vec<f64> = dec
        .eigenvalues
        .par_iter()
        .enumerate()
        .map(|(j, &e)| {
            lyapunov_estimate(
                setup,
                e,
                params.lyapunov_n,
                params.lyapunov_samples,
                subseed(params.seed, j as u64),
            )
            .map(|est| est.l_hat)
        })
        .collect::<Result<_>>()?;
    let profiles: Vec<DecayProfile> = dec
        .eigenvalues
        .par_iter()
        .zip(&vecs)
        .zip(&l_hats)
        .map(|((&e, v), &l)| {
            let c: Vec<f64> = d.iter().map(|x| x - e).collect();
            profile(&c, v, a, e, l, collar, params)
        })
        .collect();
    let inner: Vec<&DecayProfile> = profiles.iter().filter(|p| !p.near_edge).collect();
    let considered = inner.len();
    let share = |pred: &dyn Fn(&DecayProfile) -> bool| {
        if considered == 0 {
            0.0
        } else {
            inner.iter().filter(|p| pred(p)).count() as f64 / considered as f64
        }
    };
    Ok(LocalizationReport {
        n_box: params.n_box,
        collar,
        considered,
        localized_fraction: share(&|p| p.localized),
        compact_fraction: share(&|p| p.compact),
        localized_compact_fraction: share(&|p| p.localized && p.compact),
        profiles,
    })
}

impl Report for LocalizationReport {
    fn tables(&self) -> Vec<Table> {
        let mut t = Table::new(
            "localization_profiles",
            &[
                "j",
                "energy",
                "center",
                "half_width",
                "fitted_rate",
                "fit_r2",
                "l_hat",
                "near_edge",
                "localized",
                "compact",
            ],
        );
        let mut m = Table::new("mass_fractions", &["j", "width", "fraction"]);
        for (j, p) in self.profiles.iter().enumerate() {
            t.push(row![
                j,
                p.energy,
                p.center,
                p.half_width,
                p.fitted_rate,
                p.fit_r2,
                p.l_hat,
                p.near_edge,
                p.localized,
                p.compact
            ]);
            for &(w, f) in &p.mass_fraction {
                m.push(row![j, w, f]);
            }
        }
        vec![t, m]
    }
}
