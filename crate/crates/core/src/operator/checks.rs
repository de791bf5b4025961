//! Dual-path consistency checks between determinants, transfer matrices,
//! spectra and perturbations.

use serde::Serialize;

use super::determinant::determinant;
use super::eigen::{default_tolerance, eigenvalues, spectral_scale};
use super::monodromy::transfer_product;
use super::{Kernel, SpectralWindow};
use crate::diophantine::torus_norm;
use crate::error::{Error, Result};
use crate::torus::{Dynamics, TorusPoint};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub max_relative_discrepancy: f64,
    pub signs_agree: bool,
}

impl IdentityCheck {
    pub fn passes(&self, tol: f64) -> bool {
        self.signs_agree && self.max_relative_discrepancy <= tol
    }
}

/// Compares the entries of `M_{[a,b]}` with
/// `[[f_{[a,b]}, −f_{[a+1,b]}], [f_{[a,b−1]}, −f_{[a+1,b−1]}]]`.
pub fn monodromy_identity_check(w: &SpectralWindow, kernel: Kernel) -> Result<IdentityCheck> {
    if w.b - w.a < 2 {
        return Err(Error::Domain("identity check needs b − a ≥ 2".into()));
    }
    let c = w.shifted_diagonal();
    let n = c.len();
    let m = transfer_product(&c, kernel);
    let expected = [
        [determinant(&c, kernel), determinant(&c[1..], kernel).neg()],
        [determinant(&c[..n - 1], kernel), determinant(&c[1..n - 1], kernel).neg()],
    ];
    let mut worst = 0.0f64;
    let mut signs_agree = true;
    for (i, row) in expected.iter().enumerate() {
        for (j, f) in row.iter().enumerate() {
            let got = m.entry(i, j);
            let gap = got.relative_log_gap(f);
            worst = if gap.is_nan() { f64::INFINITY } else { worst.max(gap) };
            signs_agree &= got.sign == f.sign;
        }
    }
    Ok(IdentityCheck {
        max_relative_discrepancy: worst,
        signs_agree,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeylComparison {
    pub lhs: f64,
    pub eta: f64,
    pub bound_ratio: f64,
    pub blocks: usize,
    /// Sites after the last block, `N − b_n`.
    pub uncovered: usize,
}

/// `|log|f_N| − Σ_k log|f_{[a_k,b_k]}||` for blocks ending at `cuts`
/// (global, strictly increasing, last one `≤ b`), with `η` the distance from
/// `E` to the union of all the spectra involved.
pub fn weyl_comparison_report(w: &SpectralWindow, cuts: &[i64]) -> Result<WeylComparison> {
    if cuts.is_empty() || cuts.windows(2).any(|p| p[0] >= p[1]) {
        return Err(Error::Domain("cuts must be nonempty and strictly increasing".into()));
    }
    if cuts[0] < w.a || *cuts.last().unwrap() > w.b {
        return Err(Error::Domain(format!("cuts outside [{}, {}]", w.a, w.b)));
    }
    let d = w.site_values();
    let c: Vec<f64> = d.iter().map(|v| v - w.energy).collect();
    let tol = default_tolerance(&d);
    let mut eta = dist_to(&eigenvalues(&d, tol)?, w.energy);
    let mut sum = 0.0;
    let mut start = 0usize;
    for &cut in cuts {
        let end = (cut - w.a) as usize + 1;
        sum += determinant(&c[start..end], Kernel::EXACT).log_abs;
        eta = eta.min(dist_to(&eigenvalues(&d[start..end], tol)?, w.energy));
        start = end;
    }
    if eta == 0.0 {
        return Err(Error::Singular("E lies in a block spectrum".into()));
    }
    let lhs = (determinant(&c, Kernel::EXACT).log_abs - sum).abs();
    let uncovered = (w.b - cuts.last().unwrap()) as usize;
    let weight = (cuts.len() + uncovered) as f64;
    let bound_ratio = lhs / (weight * ((w.potential_bound() + 1.0) / eta).ln());
    Ok(WeylComparison {
        lhs,
        eta,
        bound_ratio,
        blocks: cuts.len(),
        uncovered,
    })
}

fn dist_to(spec: &[f64], e: f64) -> f64 {
    spec.iter().map(|v| (v - e).abs()).fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PerturbationCheck {
    pub max_eigen_shift: f64,
    pub diagonal_sup: f64,
    pub holds: bool,
    /// `max_j |ΔE_j| / (N² λB_α (|Δx| + |Δω|)^α)`
    pub holder_ratio: f64,
}

/// Compares the spectra of `H(x, ω)` and `H(x′, ω′)` on the same interval.
pub fn eigenvalue_perturbation_check(
    w: &SpectralWindow,
    x2: TorusPoint,
    dyn2: Dynamics,
) -> Result<PerturbationCheck> {
    let domega = match (w.dynamics, dyn2) {
        (Dynamics::Shift { omega: a }, Dynamics::Shift { omega: b }) => {
            torus_norm(a[0] - b[0]).hypot(torus_norm(a[1] - b[1]))
        }
        (Dynamics::SkewShift { omega: a }, Dynamics::SkewShift { omega: b }) => torus_norm(a - b),
        _ => return Err(Error::Domain("perturbation must keep the kind of dynamics".into())),
    };
    let mut w2 = *w;
    w2.phase = x2;
    w2.dynamics = dyn2;
    let (d1, d2) = (w.site_values(), w2.site_values());
    let tol = default_tolerance(&d1).max(default_tolerance(&d2));
    let (e1, e2) = (eigenvalues(&d1, tol)?, eigenvalues(&d2, tol)?);
    let max_eigen_shift = e1.iter().zip(&e2).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let diagonal_sup = d1.iter().zip(&d2).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let h = w.potential.holder;
    let n = w.len() as f64;
    let denom = n * n * w.coupling.abs() * h.holder_constant * (w.phase.distance(&x2) + domega).powf(h.alpha);
    let holder_ratio = if max_eigen_shift == 0.0 || denom.is_infinite() {
        0.0
    } else {
        max_eigen_shift / denom
    };
    Ok(PerturbationCheck {
        max_eigen_shift,
        diagonal_sup,
        holds: max_eigen_shift <= diagonal_sup + 2.0 * tol,
        holder_ratio,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThoulessCheck {
    pub discrepancy: f64,
    pub distance: f64,
    /// `N·tol/dist(E, spec)`
    pub bound: f64,
}

/// Distance floor below which the identity is not tested.
pub const THOULESS_FLOOR: f64 = 1e-6;

/// `|log|f_N(E)| − Σ_j log|E_j − E||`, with the eigenvalues bisected down
/// to a few ulps of the spectral scale.
pub fn thouless_check(w: &SpectralWindow, kernel: Kernel) -> Result<ThoulessCheck> {
    let d = w.site_values();
    let tol = 4.0 * f64::EPSILON * spectral_scale(&d);
    let spec = eigenvalues(&d, tol)?;
    let distance = dist_to(&spec, w.energy);
    if distance < THOULESS_FLOOR {
        return Err(Error::Singular(format!(
            "E within {distance:e} of the spectrum"
        )));
    }
    let c: Vec<f64> = d.iter().map(|v| v - w.energy).collect();
    let lhs = determinant(&c, kernel);
    let rhs: f64 = spec.iter().map(|v| (v - w.energy).abs().ln()).sum();
    let expected_sign: i8 = if spec.iter().filter(|v| **v < w.energy).count() % 2 == 0 {
        1
    } else {
        -1
    };
    let mut discrepancy = (lhs.log_abs - rhs).abs();
    if lhs.sign != expected_sign || discrepancy.is_nan() {
        discrepancy = f64::INFINITY;
    }
    Ok(ThoulessCheck {
        discrepancy,
        distance,
        bound: spec.len() as f64 * tol / distance,
    })
}
