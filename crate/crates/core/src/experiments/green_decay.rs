//! Off-diagonal decay of `G_{[1,N]}(T^{N̄}x₀, E)` across an energy grid.

use serde::{Deserialize, Serialize};

use super::lyapunov::lyapunov_estimate;
use super::{require, Report, Setup};
use crate::error::Result;
use crate::operator::eigen;
use crate::operator::{GreenTable, Kernel};
use crate::report::Table;
use crate::row;
use crate::torus::TorusPoint;

/// Energies closer than this to the window spectrum are skipped.
pub const SPECTRUM_GUARD: f64 = 1e-9;

/// Decay rate used in the bound `|G(m,n)| ≤ exp(−L₀|m−n|/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum L0Policy {
    Fixed { l0: f64 },
    /// `L₀ = L̂(E)/2` from a Lyapunov estimate at each energy.
    FromLyapunov { n: usize, samples: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayRow {
    pub energy: f64,
    pub l0: f64,
    pub distance_to_spectrum: f64,
    pub skipped: bool,
    /// `max_{|m−n|>N/2} log|G(m,n)| + L₀|m−n|/2`; NaN when skipped.
    pub max_excess: f64,
    pub violated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GreenDecayReport {
    pub n: usize,
    pub nbar: u64,
    pub skipped: usize,
    /// Violations over the energies that were not skipped.
    pub violating_fraction: f64,
    pub rows: Vec<DecayRow>,
}

/// Green-function decay scan on `[N̄+1, N̄+N]`, i.e. `[1, N]` at `T^{N̄}x₀`.
pub fn green_decay_scan(
    setup: &Setup,
    x0: TorusPoint,
    n: usize,
    nbar: u64,
    energies: &[f64],
    policy: L0Policy,
    seed: u64,
) -> Result<GreenDecayReport> {
    require(n >= 2, "N must be at least 2")?;
    require(!energies.is_empty(), "empty energy grid")?;
    require(nbar <= i64::MAX as u64 - n as u64, "N̄ too large")?;
    let start = nbar as i64 + 1;
    let sites = setup.sites(x0, start, start + n as i64 - 1);
    let spectrum = eigen::eigenvalues(&sites, eigen::default_tolerance(&sites))?;
    let half = n / 2;

    let mut rows = Vec::with_capacity(energies.len());
    for (k, &e) in energies.iter().enumerate() {
        let l0 = match policy {
            L0Policy::Fixed { l0 } => l0,
            L0Policy::FromLyapunov { n: ln, samples } => {
                0.5 * lyapunov_estimate(setup, e, ln, samples, crate::rng::subseed(seed, k as u64))?.l_hat
            }
        };
        let dist = spectrum.iter().map(|v| (v - e).abs()).fold(f64::INFINITY, f64::min);
        if dist < SPECTRUM_GUARD {
            rows.push(DecayRow {
                energy: e,
                l0,
                distance_to_spectrum: dist,
                skipped: true,
                max_excess: f64::NAN,
                violated: false,
            });
            continue;
        }
        let c: Vec<f64> = sites.iter().map(|v| v - e).collect();
        let table = GreenTable::new(&c, Kernel::EXACT)?;
        let mut worst = f64::NEG_INFINITY;
        for i in 0..n {
            for j in i + half + 1..n {
                let d = (j - i) as f64;
                worst = worst.max(table.entry(i, j).log_abs + 0.5 * l0 * d);
            }
        }
        rows.push(DecayRow {
            energy: e,
            l0,
            distance_to_spectrum: dist,
            skipped: false,
            max_excess: worst,
            violated: worst > 0.0,
        });
    }
    let skipped = rows.iter().filter(|r| r.skipped).count();
    let kept = rows.len() - skipped;
    let violating = rows.iter().filter(|r| r.violated).count();
    Ok(GreenDecayReport {
        n,
        nbar,
        skipped,
        violating_fraction: if kept == 0 { 0.0 } else { violating as f64 / kept as f64 },
        rows,
    })
}

impl Report for GreenDecayReport {
    fn tables(&self) -> Vec<Table> {
        let mut t = Table::new(
            "green_decay",
            &["energy", "l0", "distance_to_spectrum", "skipped", "max_excess", "violated"],
        );
        for r in &self.rows {
            t.push(row![
                r.energy,
                r.l0,
                r.distance_to_spectrum,
                r.skipped,
                r.max_excess,
                r.violated
            ]);
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

    #[test]
    fn free_hyperbolic_decay() {
        let p = Potential::constant(0.0);
        let s = Setup::new(&p, Dynamics::skew_shift(GOLDEN), 1.0);
        let x0 = TorusPoint::new(0.3, 0.1);
        let fixed = green_decay_scan(&s, x0, 40, 2000, &[3.0], L0Policy::Fixed { l0: 0.48 }, 1).unwrap();
        assert!(!fixed.rows[0].violated && fixed.rows[0].max_excess < 0.0);
        let auto = green_decay_scan(
            &s,
            x0,
            40,
            2000,
            &[3.0],
            L0Policy::FromLyapunov { n: 200, samples: 10 },
            1,
        )
        .unwrap();
        let l = ((3.0 + 5f64.sqrt()) / 2.0).ln();
        assert!((auto.rows[0].l0 - l / 2.0).abs() < 1e-2);
        assert_eq!(auto.violating_fraction, 0.0);
    }

    #[test]
    fn free_decay_rate_matches_twisted_oracle() {
        let c = vec![-3.0; 40];
        let col = crate::operator::TwistedFactorization::new(&c).column(0).unwrap();
        let l = ((3.0 + 5f64.sqrt()) / 2.0).ln();
        let slope = (col[25].log_abs - col[5].log_abs) / 20.0;
        assert!((slope + l).abs() < 1e-9);
    }

    #[test]
    fn eigenvalue_is_skipped() {
        let p = Potential::constant(0.0);
        let s = Setup::new(&p, Dynamics::skew_shift(GOLDEN), 1.0);
        let e = -2.0 * (std::f64::consts::PI / 11.0).cos();
        let r = green_decay_scan(&s, TorusPoint::ORIGIN, 10, 200, &[e, 3.0], L0Policy::Fixed { l0: 0.1 }, 0)
            .unwrap();
        assert!(r.rows[0].skipped && !r.rows[1].skipped);
        assert_eq!(r.skipped, 1);
    }

    #[test]
    fn strong_disorder_scan() {
        let p = Potential::cos2d();
        let s = Setup::new(&p, Dynamics::skew_shift(GOLDEN), 100.0);
        let grid = linspace(-202.0, 202.0, 201);
        let r = green_decay_scan(
            &s,
            TorusPoint::new(0.25, 0.5),
            100,
            20_000,
            &grid,
            L0Policy::FromLyapunov { n: 200, samples: 10 },
            3,
        )
        .unwrap();
        assert!(r.violating_fraction <= 0.2, "{}", r.violating_fraction);
    }
}
