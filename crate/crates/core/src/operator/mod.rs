//! Finite-volume operators `H_{[a,b]} = tridiag(−1, λV(Tⁿx), −1)`:
//! Dirichlet determinants, transfer matrices, spectra and Green functions.

pub mod checks;
pub mod determinant;
pub mod eigen;
pub mod green;
pub mod logscaled;
pub mod monodromy;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::Potential;
use crate::torus::{Dynamics, TorusPoint};

pub use checks::{
    eigenvalue_perturbation_check, monodromy_identity_check, thouless_check,
    weyl_comparison_report, IdentityCheck, PerturbationCheck, ThoulessCheck, WeylComparison,
};
pub use eigen::SpectralDecomposition;
pub use green::{GreenTable, TwistedFactorization};
pub use logscaled::{LogScaledMatrix, SignedLogDet};

/// Deliberate defects used to show that the identity suite detects them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// `f_n = (V_n − E) f_{n−1} + f_{n−2}`
    RecurrenceSignFlip,
    /// Determinants and transfer products are never renormalized.
    DroppedRescale,
    /// Cramer numerator uses `f_{[a,m]}` in place of `f_{[a,m−1]}`.
    CramerOffByOne,
}

impl Fault {
    pub const ALL: [Fault; 3] = [
        Fault::RecurrenceSignFlip,
        Fault::DroppedRescale,
        Fault::CramerOffByOne,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Fault::RecurrenceSignFlip => "recurrence-sign-flip",
            Fault::DroppedRescale => "dropped-rescale",
            Fault::CramerOffByOne => "cramer-off-by-one",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown fault `{s}`")))
    }
}

/// Selects the arithmetic used by the determinant, transfer-product and
/// Cramer kernels.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Kernel {
    pub fault: Option<Fault>,
}

impl Kernel {
    pub const EXACT: Kernel = Kernel { fault: None };

    pub fn with_fault(fault: Option<Fault>) -> Self {
        Kernel { fault }
    }
}

/// The data defining `H_{[a,b]}(x, ω)` and an energy `E`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SpectralWindow<'a> {
    pub a: i64,
    pub b: i64,
    pub phase: TorusPoint,
    pub dynamics: Dynamics,
    pub potential: &'a Potential,
    pub coupling: f64,
    pub energy: f64,
}

impl<'a> SpectralWindow<'a> {
    /// Window `[a, b]` with `λ = 1`, `E = 0`.
    pub fn new(
        potential: &'a Potential,
        dynamics: Dynamics,
        phase: TorusPoint,
        a: i64,
        b: i64,
    ) -> Result<Self> {
        if a > b {
            return Err(Error::Domain(format!("empty interval [{a}, {b}]")));
        }
        Ok(SpectralWindow {
            a,
            b,
            phase,
            dynamics,
            potential,
            coupling: 1.0,
            energy: 0.0,
        })
    }

    /// `[1, n]`
    pub fn first(potential: &'a Potential, dynamics: Dynamics, phase: TorusPoint, n: usize) -> Result<Self> {
        Self::new(potential, dynamics, phase, 1, n as i64)
    }

    pub fn with_coupling(mut self, lambda: f64) -> Self {
        self.coupling = lambda;
        self
    }

    pub fn with_energy(mut self, e: f64) -> Self {
        self.energy = e;
        self
    }

    pub fn with_interval(mut self, a: i64, b: i64) -> Result<Self> {
        if a > b {
            return Err(Error::Domain(format!("empty interval [{a}, {b}]")));
        }
        self.a = a;
        self.b = b;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        (self.b - self.a + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `λ·V(Tⁿx)` for `n = a..=b`.
    pub fn site_values(&self) -> Vec<f64> {
        (self.a..=self.b)
            .map(|n| self.coupling * self.potential.eval(self.dynamics.orbit_point(self.phase, n)))
            .collect()
    }

    /// `λ·V(Tⁿx) − E` for `n = a..=b`.
    pub fn shifted_diagonal(&self) -> Vec<f64> {
        self.site_values().into_iter().map(|v| v - self.energy).collect()
    }

    /// `|λ|·B₀(V)`
    pub fn potential_bound(&self) -> f64 {
        self.coupling.abs() * self.potential.sup_norm()
    }

    /// Local position of the global site `n`.
    pub fn local(&self, n: i64) -> Result<usize> {
        if n < self.a || n > self.b {
            return Err(Error::Domain(format!(
                "site {n} outside [{}, {}]",
                self.a, self.b
            )));
        }
        Ok((n - self.a) as usize)
    }
}

/// `f_{[a,b]}(x, ω, E) = det(H_{[a,b]} − E)`
pub fn dirichlet_determinant(w: &SpectralWindow) -> SignedLogDet {
    determinant::determinant(&w.shifted_diagonal(), Kernel::EXACT)
}

/// `M_{[a,b]}(x, ω, E)`
pub fn monodromy(w: &SpectralWindow) -> LogScaledMatrix {
    monodromy::transfer_product(&w.shifted_diagonal(), Kernel::EXACT)
}

/// Eigenvalues only; the residual column carries the bracket tolerance.
pub fn eigenvalues_sturm(w: &SpectralWindow, tol: f64) -> Result<SpectralDecomposition> {
    eigen::decompose(&w.site_values(), tol, false)
}

/// Eigenvalues and unit eigenvectors at the default tolerance.
pub fn eigen_decomposition(w: &SpectralWindow) -> Result<SpectralDecomposition> {
    let d = w.site_values();
    eigen::decompose(&d, eigen::default_tolerance(&d), true)
}

/// Unit eigenvector for an approximate eigenvalue, and its residual.
pub fn eigenvector_inverse_iteration(w: &SpectralWindow, e_approx: f64) -> Result<(Vec<f64>, f64)> {
    eigen::eigenvector(&w.site_values(), e_approx)
}

/// `G_{[a,b]}(m, n)` by Cramer's rule, global site indices.
pub fn green_entry(w: &SpectralWindow, m: i64, n: i64) -> Result<SignedLogDet> {
    let (i, j) = (w.local(m)?, w.local(n)?);
    green::cramer_entry(&w.shifted_diagonal(), i, j, Kernel::EXACT)
}

/// Column `m` of `(H − E)^{−1}` by the twisted factorization.
pub fn green_oracle(w: &SpectralWindow, m: i64) -> Result<Vec<SignedLogDet>> {
    let i = w.local(m)?;
    TwistedFactorization::new(&w.shifted_diagonal()).column(i)
}
