//! Monte-Carlo and scan experiments on `H(x) = −Δ + λV(Tⁿx)`.
//!
//! Every experiment draws phase `i` from the stream `(seed, i)`, maps over
//! samples in parallel, and reduces in index order, so results do not depend
//! on the number of worker threads. Each result type can render itself as
//! CSV tables and serializes to a JSON summary.

mod disorder;
mod green_decay;
mod localization;
mod lyapunov;
mod resonance;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::potential::Potential;
use crate::report::Table;
use crate::rng;
use crate::torus::{Dynamics, TorusPoint};

pub use disorder::{
    determinant_ldt, large_disorder_check, DeviationReport, DisorderReport, DisorderRow, LdtParams,
};
pub use green_decay::{green_decay_scan, DecayRow, GreenDecayReport, L0Policy};
pub use localization::{localization_profile, DecayProfile, LocalizationParams, LocalizationReport};
pub use lyapunov::{
    lyapunov_estimate, scale_convergence_scan, uniform_upper_check, LyapunovEstimate, ScaleRow,
    ScaleScan, UniformUpper,
};
pub use resonance::{resonance_scan, ResonanceParams, ResonanceReport, ResonanceRow, ResonanceTarget};

/// Potential, dynamics and coupling shared by all windows of an experiment.
#[derive(Debug, Clone, Copy)]
pub struct Setup<'a> {
    pub potential: &'a Potential,
    pub dynamics: Dynamics,
    pub lambda: f64,
}

impl<'a> Setup<'a> {
    pub fn new(potential: &'a Potential, dynamics: Dynamics, lambda: f64) -> Self {
        Setup {
            potential,
            dynamics,
            lambda,
        }
    }

    /// `λV(Tⁿx)` for `n = a..=b`.
    pub fn sites(&self, x: TorusPoint, a: i64, b: i64) -> Vec<f64> {
        (a..=b)
            .map(|n| self.lambda * self.potential.eval(self.dynamics.orbit_point(x, n)))
            .collect()
    }

    /// `λV(Tⁿx) − E` for `n = 1..=len`.
    pub fn shifted(&self, x: TorusPoint, len: usize, e: f64) -> Vec<f64> {
        let mut s = self.sites(x, 1, len as i64);
        for v in &mut s {
            *v -= e;
        }
        s
    }

    /// `|λ|·B₀(V)`
    pub fn bound(&self) -> f64 {
        self.lambda.abs() * self.potential.sup_norm()
    }
}

/// Anything an experiment returns: a JSON-ready summary plus CSV tables.
pub trait Report: Serialize {
    fn tables(&self) -> Vec<Table>;
}

/// `count` equally spaced points on `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![0.5 * (lo + hi)],
        _ => (0..count)
            .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

/// The energy grid `[−λB₀ − 2, λB₀ + 2]` with `count` points.
pub fn spectral_grid(setup: &Setup, count: usize) -> Vec<f64> {
    let r = setup.bound() + 2.0;
    linspace(-r, r, count)
}

/// Per-sample values `f(i, x_i)` for phases `x_i` from `(seed, i)`, in index
/// order.
pub(crate) fn sample_phases<T, F>(seed: u64, samples: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, TorusPoint) -> T + Sync,
{
    (0..samples)
        .into_par_iter()
        .map(|i| f(i, rng::phase(seed, i as u64)))
        .collect()
}

pub(crate) fn require(cond: bool, msg: impl Into<String>) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Domain(msg.into()))
    }
}
